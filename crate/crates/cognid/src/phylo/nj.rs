//! Neighbor-Joining tree construction from a distance matrix.

use super::matrix::DistanceMatrix;
use super::tree::{check_newick_safe, Node, PhyloTree};
use super::PhyloError;
use crate::scalar::Scalar;

/// One active cluster during agglomeration. `key` is the lexicographically
/// smallest leaf label inside the cluster and breaks ties deterministically.
struct Cluster {
    node: usize,
    key: String,
}

/// Builds an unrooted tree by Neighbor-Joining. At every step the pair with
/// the minimal adjusted distance `(r - 2) d(i, j) - R_i - R_j` is joined;
/// exact ties fall back to the lexicographically smallest pair of cluster
/// keys, so the output is a pure function of the input matrix. Negative limb
/// lengths are clamped to zero with the clipped amount moved to the sibling
/// limb, keeping the pair's total at `d(i, j)`.
///
/// The result is anchored at the final degree-3 junction: `l` leaves produce
/// `l - 2` internal nodes. Three labels produce the unique star directly.
pub fn neighbor_joining<F: Scalar>(dm: &DistanceMatrix<F>) -> Result<PhyloTree<F>, PhyloError> {
    let l = dm.len();
    if l < 3 {
        return Err(PhyloError::TooFewLabels { found: l, min: 3 });
    }
    for label in dm.labels() {
        check_newick_safe(label)?;
    }

    let mut nodes: Vec<Node<F>> = dm
        .labels()
        .iter()
        .map(|label| Node {
            label: Some(label.clone()),
            parent: None,
            children: Vec::new(),
            length: None,
        })
        .collect();
    let mut clusters: Vec<Cluster> = dm
        .labels()
        .iter()
        .enumerate()
        .map(|(i, label)| Cluster {
            node: i,
            key: label.clone(),
        })
        .collect();
    let mut dist: Vec<Vec<F>> = (0..l)
        .map(|i| (0..l).map(|j| dm.get(i, j)).collect())
        .collect();

    let half = F::from_f64(0.5).unwrap();
    while clusters.len() > 3 {
        let r = clusters.len();
        let sums: Vec<F> = dist
            .iter()
            .map(|row| row.iter().fold(F::zero(), |acc, &v| acc + v))
            .collect();
        let r_minus_2 = F::from_usize(r - 2).unwrap();

        let mut best: Option<(F, usize, usize)> = None;
        for i in 0..r {
            for j in i + 1..r {
                let q = r_minus_2 * dist[i][j] - sums[i] - sums[j];
                let better = match best {
                    None => true,
                    Some((bq, bi, bj)) => {
                        q < bq || (q == bq && key_pair(&clusters, i, j) < key_pair(&clusters, bi, bj))
                    }
                };
                if better {
                    best = Some((q, i, j));
                }
            }
        }
        let (_, i, j) = best.expect("at least one pair exists");

        let d_ij = dist[i][j];
        let mut li = half * d_ij + (sums[i] - sums[j]) / (F::from_usize(2 * (r - 2)).unwrap());
        let mut lj = d_ij - li;
        if li < F::zero() {
            li = F::zero();
            lj = if d_ij > F::zero() { d_ij } else { F::zero() };
        } else if lj < F::zero() {
            lj = F::zero();
            li = if d_ij > F::zero() { d_ij } else { F::zero() };
        }

        let parent = nodes.len();
        nodes.push(Node {
            label: None,
            parent: None,
            children: vec![clusters[i].node, clusters[j].node],
            length: None,
        });
        nodes[clusters[i].node].parent = Some(parent);
        nodes[clusters[i].node].length = Some(li);
        nodes[clusters[j].node].parent = Some(parent);
        nodes[clusters[j].node].length = Some(lj);

        let merged_row: Vec<F> = (0..r)
            .filter(|&k| k != i && k != j)
            .map(|k| half * (dist[i][k] + dist[j][k] - d_ij))
            .collect();
        let merged_key = std::cmp::min(clusters[i].key.clone(), clusters[j].key.clone());

        // Drop the larger index first so the smaller one stays valid.
        remove_pair(&mut clusters, &mut dist, i, j);
        for (row, &value) in dist.iter_mut().zip(merged_row.iter()) {
            row.push(value);
        }
        let mut new_row = merged_row;
        new_row.push(F::zero());
        dist.push(new_row);
        clusters.push(Cluster {
            node: parent,
            key: merged_key,
        });
    }

    let (d01, d02, d12) = (dist[0][1], dist[0][2], dist[1][2]);
    let limbs = [
        half * (d01 + d02 - d12),
        half * (d01 + d12 - d02),
        half * (d02 + d12 - d01),
    ];
    let center = nodes.len();
    nodes.push(Node {
        label: None,
        parent: None,
        children: clusters.iter().map(|c| c.node).collect(),
        length: None,
    });
    for (cluster, &limb) in clusters.iter().zip(limbs.iter()) {
        nodes[cluster.node].parent = Some(center);
        nodes[cluster.node].length = Some(if limb > F::zero() { limb } else { F::zero() });
    }

    Ok(PhyloTree::from_parts(nodes, center))
}

fn key_pair(clusters: &[Cluster], i: usize, j: usize) -> (String, String) {
    let a = clusters[i].key.clone();
    let b = clusters[j].key.clone();
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn remove_pair<F>(clusters: &mut Vec<Cluster>, dist: &mut Vec<Vec<F>>, i: usize, j: usize) {
    debug_assert!(i < j);
    clusters.remove(j);
    clusters.remove(i);
    dist.remove(j);
    dist.remove(i);
    for row in dist.iter_mut() {
        row.remove(j);
        row.remove(i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phylo::tree::write_newick;
    use std::collections::BTreeSet;

    fn matrix(labels: &[&str], values: &[f64]) -> DistanceMatrix {
        DistanceMatrix::new(labels.iter().map(|l| l.to_string()).collect(), values.to_vec())
            .unwrap()
    }

    #[test]
    fn three_leaves_give_the_closed_form_star() {
        let dm = matrix(
            &["A", "B", "C"],
            &[
                0.0, 0.3, 0.5, //
                0.3, 0.0, 0.6, //
                0.5, 0.6, 0.0,
            ],
        );
        let tree = neighbor_joining(&dm).unwrap();
        assert_eq!(tree.leaf_count(), 3);
        assert_eq!(tree.internal_node_count(), 1);
        let dm_back = tree.path_length_matrix().unwrap();
        let i = |l: &str| dm_back.index_of(l).unwrap();
        assert!((dm_back.get(i("A"), i("B")) - 0.3).abs() < 1e-12);
        assert!((dm_back.get(i("A"), i("C")) - 0.5).abs() < 1e-12);
        assert!((dm_back.get(i("B"), i("C")) - 0.6).abs() < 1e-12);
    }

    #[test]
    fn additive_five_leaf_matrix_is_recovered_exactly() {
        // Path lengths of ((A:0.2,B:0.3):0.1,(C:0.4,D:0.5):0.2,E:0.6);
        let dm = matrix(
            &["A", "B", "C", "D", "E"],
            &[
                0.0, 0.5, 0.9, 1.0, 0.9, //
                0.5, 0.0, 1.0, 1.1, 1.0, //
                0.9, 1.0, 0.0, 0.9, 1.2, //
                1.0, 1.1, 0.9, 0.0, 1.3, //
                0.9, 1.0, 1.2, 1.3, 0.0,
            ],
        );
        let tree = neighbor_joining(&dm).unwrap();
        let expected: BTreeSet<BTreeSet<String>> = [
            ["C", "D"].iter().map(|s| s.to_string()).collect(),
            ["C", "D", "E"].iter().map(|s| s.to_string()).collect(),
        ]
        .into_iter()
        .collect();
        assert_eq!(tree.splits(), expected);
        let back = tree.path_length_matrix().unwrap();
        for (i, a) in dm.labels().iter().enumerate() {
            for (j, b) in dm.labels().iter().enumerate() {
                let bi = back.index_of(a).unwrap();
                let bj = back.index_of(b).unwrap();
                assert!(
                    (dm.get(i, j) - back.get(bi, bj)).abs() < 1e-12,
                    "path length mismatch for {a} / {b}"
                );
            }
        }
    }

    #[test]
    fn ties_break_towards_the_smallest_label_pair() {
        // Equidistant points make every Q value identical.
        let dm = matrix(
            &["C", "A", "B", "D"],
            &[
                0.0, 1.0, 1.0, 1.0, //
                1.0, 0.0, 1.0, 1.0, //
                1.0, 1.0, 0.0, 1.0, //
                1.0, 1.0, 1.0, 0.0,
            ],
        );
        let tree = neighbor_joining(&dm).unwrap();
        let splits = tree.splits();
        let ab: BTreeSet<String> = ["C", "D"].iter().map(|s| s.to_string()).collect();
        assert_eq!(splits.len(), 1);
        assert!(splits.contains(&ab), "expected A,B joined first, got {splits:?}");
    }

    #[test]
    fn output_is_deterministic() {
        let dm = matrix(
            &["A", "B", "C", "D", "E"],
            &[
                0.0, 0.4, 0.4, 0.8, 0.8, //
                0.4, 0.0, 0.4, 0.8, 0.8, //
                0.4, 0.4, 0.0, 0.8, 0.8, //
                0.8, 0.8, 0.8, 0.0, 0.2, //
                0.8, 0.8, 0.8, 0.2, 0.0,
            ],
        );
        let first = write_newick(&neighbor_joining(&dm).unwrap());
        for _ in 0..5 {
            assert_eq!(write_newick(&neighbor_joining(&dm).unwrap()), first);
        }
    }

    #[test]
    fn negative_limbs_are_clamped_and_transferred() {
        // A sits far from C and D while B sits near everything, which drives
        // B's raw limb to -0.4 when A and B are joined first.
        let dm = matrix(
            &["A", "B", "C", "D"],
            &[
                0.0, 0.1, 1.0, 1.0, //
                0.1, 0.0, 0.1, 0.1, //
                1.0, 0.1, 0.0, 1.0, //
                1.0, 0.1, 1.0, 0.0,
            ],
        );
        let tree = neighbor_joining(&dm).unwrap();
        let text = write_newick(&tree);
        assert!(!text.contains('-'), "no negative lengths in {text}");
        let back = tree.path_length_matrix().unwrap();
        let i = |l: &str| back.index_of(l).unwrap();
        // The clipped amount moves to the sibling, so the joined pair keeps
        // its matrix distance.
        assert!((back.get(i("A"), i("B")) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn triangle_violations_at_the_final_star_are_clamped() {
        let dm = matrix(
            &["A", "B", "C"],
            &[
                0.0, 0.2, 0.2, //
                0.2, 0.0, 0.9, //
                0.2, 0.9, 0.0,
            ],
        );
        let tree = neighbor_joining(&dm).unwrap();
        assert!(!write_newick(&tree).contains('-'));
    }

    #[test]
    fn too_few_labels_error() {
        let dm = matrix(&["A", "B"], &[0.0, 0.5, 0.5, 0.0]);
        assert_eq!(
            neighbor_joining(&dm).unwrap_err(),
            PhyloError::TooFewLabels { found: 2, min: 3 }
        );
    }

    #[test]
    fn labels_unfit_for_newick_are_rejected() {
        let dm = matrix(&["A", "B", "bad name"], &[0.0, 0.5, 0.5, 0.5, 0.0, 0.5, 0.5, 0.5, 0.0]);
        assert!(matches!(
            neighbor_joining(&dm).unwrap_err(),
            PhyloError::BadLabel { .. }
        ));
    }

    #[test]
    fn forty_one_leaves_make_thirty_nine_internal_nodes() {
        let n = 41;
        let labels: Vec<String> = (0..n).map(|i| format!("L{i:02}")).collect();
        // Distances from a line arrangement keep the matrix additive enough
        // for structural checks without constructing a tree first.
        let mut values = vec![0.0f64; n * n];
        for i in 0..n {
            for j in 0..n {
                values[i * n + j] = (i as f64 - j as f64).abs() / n as f64;
            }
        }
        let dm = DistanceMatrix::new(labels, values).unwrap();
        let tree = neighbor_joining(&dm).unwrap();
        assert_eq!(tree.leaf_count(), 41);
        assert_eq!(tree.internal_node_count(), 39);
    }
}
