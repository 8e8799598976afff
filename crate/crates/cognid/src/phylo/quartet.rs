//! Quartet-based comparison of (possibly multifurcating) trees sharing a
//! leaf set: butterfly counts, the quartet distance, and the generalized
//! quartet distance used against partially resolved reference trees.

use super::tree::PhyloTree;
use super::PhyloError;
use crate::scalar::Scalar;

/// How one tree arranges one quartet of leaves `{a, b, c, d}` taken in
/// sorted order: one of the three pairings, or unresolved (a star).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Resolution {
    /// 0 is `ab|cd`, 1 is `ac|bd`, 2 is `ad|bc`.
    Pairing(u8),
    Star,
}

/// Joint classification of every leaf quartet across two trees.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuartetTally {
    /// Butterflies in both trees with the same pairing.
    pub same: u64,
    /// Butterflies in both trees with different pairings.
    pub different: u64,
    /// Butterflies in the first tree only.
    pub only_first: u64,
    /// Butterflies in the second tree only.
    pub only_second: u64,
    /// Stars in both trees.
    pub both_star: u64,
    /// All `C(l, 4)` quartets.
    pub total: u64,
}

impl QuartetTally {
    /// Butterflies of the first tree.
    pub fn butterflies_first(&self) -> u64 {
        self.same + self.different + self.only_first
    }

    /// Butterflies of the second tree.
    pub fn butterflies_second(&self) -> u64 {
        self.same + self.different + self.only_second
    }

    /// Quartets on which the trees disagree: resolved differently in both,
    /// or resolved in exactly one.
    pub fn disagreements(&self) -> u64 {
        self.different + self.only_first + self.only_second
    }
}

/// Hop distances between sorted leaves, for four-point classification.
struct HopTable {
    l: usize,
    hops: Vec<u32>,
}

impl HopTable {
    fn build<F: Scalar>(tree: &PhyloTree<F>) -> Self {
        let (labels, hops) = tree.leaf_hop_matrix();
        HopTable {
            l: labels.len(),
            hops,
        }
    }

    fn d(&self, i: usize, j: usize) -> u32 {
        self.hops[i * self.l + j]
    }

    /// Classifies a quartet by the four-point condition on hop counts. In a
    /// tree the two largest of the three pairing sums are equal, so either
    /// one sum is strictly smallest and names the butterfly, or all three
    /// are equal and the quartet is a star. Degree-2 nodes on a path only
    /// stretch all three sums together, so an anchor of degree 2 cannot
    /// change the answer.
    fn resolve(&self, a: usize, b: usize, c: usize, d: usize) -> Resolution {
        let s0 = self.d(a, b) + self.d(c, d);
        let s1 = self.d(a, c) + self.d(b, d);
        let s2 = self.d(a, d) + self.d(b, c);
        if s0 < s1 && s0 < s2 {
            Resolution::Pairing(0)
        } else if s1 < s0 && s1 < s2 {
            Resolution::Pairing(1)
        } else if s2 < s0 && s2 < s1 {
            Resolution::Pairing(2)
        } else {
            Resolution::Star
        }
    }
}

fn check_leaf_sets<F: Scalar>(t1: &PhyloTree<F>, t2: &PhyloTree<F>) -> Result<usize, PhyloError> {
    let l1 = t1.leaf_labels();
    let l2 = t2.leaf_labels();
    if l1 != l2 {
        let only_first: Vec<&str> = l1.iter().filter(|l| !l2.contains(l)).copied().collect();
        let only_second: Vec<&str> = l2.iter().filter(|l| !l1.contains(l)).copied().collect();
        return Err(PhyloError::LeafSetMismatch {
            only_first: only_first.join(", "),
            only_second: only_second.join(", "),
        });
    }
    if l1.len() < 4 {
        return Err(PhyloError::TooFewLeaves {
            found: l1.len(),
            min: 4,
        });
    }
    Ok(l1.len())
}

fn choose4(l: u64) -> u64 {
    l * (l - 1) * (l - 2) * (l - 3) / 24
}

/// Counts the butterflies of a single tree: quartets of leaves on which the
/// tree induces a resolved two-against-two topology. A binary tree on `l`
/// leaves has `C(l, 4)` butterflies; a star has none. Needs at least four
/// leaves. Runs in `O(l^4)` over precomputed hop counts.
pub fn count_butterflies<F: Scalar>(tree: &PhyloTree<F>) -> Result<u64, PhyloError> {
    let l = tree.leaf_count();
    if l < 4 {
        return Err(PhyloError::TooFewLeaves { found: l, min: 4 });
    }
    let table = HopTable::build(tree);
    let mut count = 0u64;
    for a in 0..l {
        for b in a + 1..l {
            for c in b + 1..l {
                for d in c + 1..l {
                    if table.resolve(a, b, c, d) != Resolution::Star {
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(count)
}

/// Jointly classifies every quartet of two trees over the same leaf set.
/// Both trees index leaves in sorted label order, so classifications line
/// up. The classification of each quartet is independent of every other, so
/// the counts are a pure fold over quartets.
pub fn quartet_tally<F: Scalar>(
    t1: &PhyloTree<F>,
    t2: &PhyloTree<F>,
) -> Result<QuartetTally, PhyloError> {
    let l = check_leaf_sets(t1, t2)?;
    let table1 = HopTable::build(t1);
    let table2 = HopTable::build(t2);
    let mut tally = QuartetTally {
        same: 0,
        different: 0,
        only_first: 0,
        only_second: 0,
        both_star: 0,
        total: choose4(l as u64),
    };
    for a in 0..l {
        for b in a + 1..l {
            for c in b + 1..l {
                for d in c + 1..l {
                    let r1 = table1.resolve(a, b, c, d);
                    let r2 = table2.resolve(a, b, c, d);
                    match (r1, r2) {
                        (Resolution::Pairing(p), Resolution::Pairing(q)) if p == q => {
                            tally.same += 1
                        }
                        (Resolution::Pairing(_), Resolution::Pairing(_)) => tally.different += 1,
                        (Resolution::Pairing(_), Resolution::Star) => tally.only_first += 1,
                        (Resolution::Star, Resolution::Pairing(_)) => tally.only_second += 1,
                        (Resolution::Star, Resolution::Star) => tally.both_star += 1,
                    }
                }
            }
        }
    }
    Ok(tally)
}

/// The normalized quartet distance between two trees on the same leaf set:
/// with `q1` and `q2` the butterfly counts, `s` the shared butterflies with
/// equal pairing, and `d` those with different pairings, the distance is
/// `(q1 + q2 - 2s - d) / C(l, 4)`. The numerator equals the number of
/// quartets whose classifications disagree, so identical trees measure zero
/// and a fully resolved tree measures one against a star.
pub fn quartet_distance<F: Scalar>(t1: &PhyloTree<F>, t2: &PhyloTree<F>) -> Result<F, PhyloError> {
    let tally = quartet_tally(t1, t2)?;
    let q1 = tally.butterflies_first();
    let q2 = tally.butterflies_second();
    let numerator = q1 + q2 - 2 * tally.same - tally.different;
    debug_assert_eq!(numerator, tally.disagreements());
    Ok(F::from_u64(numerator).unwrap() / F::from_u64(tally.total).unwrap())
}

/// The generalized quartet distance of an inferred tree against a reference
/// tree: the number of quartets resolved in both trees but with different
/// pairings, divided by the reference tree's butterfly count. Quartets the
/// reference leaves unresolved are not charged, so any binary refinement of
/// a partially resolved reference scores zero. Errors if the reference has
/// no butterflies at all.
pub fn gqd<F: Scalar>(inferred: &PhyloTree<F>, reference: &PhyloTree<F>) -> Result<F, PhyloError> {
    let tally = quartet_tally(inferred, reference)?;
    let q_ref = tally.butterflies_second();
    if q_ref == 0 {
        return Err(PhyloError::GoldUnresolved);
    }
    Ok(F::from_u64(tally.different).unwrap() / F::from_u64(q_ref).unwrap())
}
