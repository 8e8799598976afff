//! Unrooted phylogenetic trees with optional branch lengths, stored as a
//! rooted arborescence whose root is only a serialization anchor.

use std::collections::{BTreeMap, BTreeSet};

use super::PhyloError;
use crate::phylo::matrix::DistanceMatrix;
use crate::scalar::{NeumaierSum, Scalar};

/// One tree node. The branch length belongs to the edge towards the parent.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Node<F> {
    pub(crate) label: Option<String>,
    pub(crate) parent: Option<usize>,
    pub(crate) children: Vec<usize>,
    pub(crate) length: Option<F>,
}

/// A phylogenetic tree. Leaves carry unique labels; internal nodes may carry
/// labels too but are never required to. Multifurcations are allowed, so the
/// same type holds binary trees, partially resolved trees, and stars.
///
/// The tree is conceptually unrooted: every topology query (splits, quartet
/// classification, path lengths) is invariant under the choice of anchor
/// node used for storage and serialization.
#[derive(Debug, Clone, PartialEq)]
pub struct PhyloTree<F = f64> {
    nodes: Vec<Node<F>>,
    root: usize,
}

impl<F: Scalar> PhyloTree<F> {
    pub(crate) fn from_parts(nodes: Vec<Node<F>>, root: usize) -> Self {
        debug_assert!(root < nodes.len());
        PhyloTree { nodes, root }
    }

    pub(crate) fn nodes(&self) -> &[Node<F>] {
        &self.nodes
    }

    pub(crate) fn root(&self) -> usize {
        self.root
    }

    /// Leaf labels in sorted order.
    pub fn leaf_labels(&self) -> Vec<&str> {
        let mut labels: Vec<&str> = self
            .nodes
            .iter()
            .filter(|n| n.children.is_empty())
            .filter_map(|n| n.label.as_deref())
            .collect();
        labels.sort_unstable();
        labels
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.children.is_empty()).count()
    }

    /// Number of non-leaf nodes, including the anchor node.
    pub fn internal_node_count(&self) -> usize {
        self.nodes.len() - self.leaf_count()
    }

    /// The nontrivial bipartitions induced by internal edges, each reported
    /// as the side that does not contain the lexicographically smallest leaf.
    /// Edges incident to a leaf induce trivial bipartitions and are skipped;
    /// a degree-2 anchor induces the same bipartition twice and the set
    /// representation collapses the duplicate.
    pub fn splits(&self) -> BTreeSet<BTreeSet<String>> {
        let leaves = self.leaf_labels();
        let total = leaves.len();
        let mut out = BTreeSet::new();
        if total < 4 {
            return out;
        }
        let smallest = leaves[0];
        let sets = self.leaf_sets_below();
        for (id, node) in self.nodes.iter().enumerate() {
            if node.parent.is_none() {
                continue;
            }
            let below = &sets[id];
            if below.len() < 2 || below.len() > total - 2 {
                continue;
            }
            let side: BTreeSet<String> = if below.contains(smallest) {
                leaves
                    .iter()
                    .filter(|l| !below.contains(**l))
                    .map(|l| l.to_string())
                    .collect()
            } else {
                below.iter().map(|l| l.to_string()).collect()
            };
            out.insert(side);
        }
        out
    }

    /// Hop counts between every pair of leaves, with leaves indexed in
    /// sorted label order. Used for quartet classification, where only the
    /// meeting pattern of paths matters, not the branch lengths.
    pub(crate) fn leaf_hop_matrix(&self) -> (Vec<&str>, Vec<u32>) {
        let labels = self.leaf_labels();
        let index: BTreeMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (*l, i)).collect();
        let l = labels.len();
        let adjacency = self.adjacency();
        let mut out = vec![0u32; l * l];
        for (id, node) in self.nodes.iter().enumerate() {
            if !node.children.is_empty() {
                continue;
            }
            let label = node.label.as_deref().expect("leaves are labeled");
            let src = index[label];
            let hops = bfs_hops(&adjacency, id);
            for (other_id, other) in self.nodes.iter().enumerate() {
                if other.children.is_empty() {
                    let dst = index[other.label.as_deref().expect("leaves are labeled")];
                    out[src * l + dst] = hops[other_id];
                }
            }
        }
        (labels, out)
    }

    /// Sum of branch lengths along the path between every pair of leaves,
    /// returned as a distance matrix over the sorted leaf labels. Errors if
    /// any non-anchor node is missing a branch length.
    pub fn path_length_matrix(&self) -> Result<DistanceMatrix<F>, PhyloError> {
        for (id, node) in self.nodes.iter().enumerate() {
            if id != self.root && node.length.is_none() {
                return Err(PhyloError::MissingBranchLengths);
            }
        }
        let labels = self.leaf_labels();
        let index: BTreeMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (*l, i)).collect();
        let l = labels.len();
        let adjacency = self.length_adjacency();
        let mut values = vec![F::zero(); l * l];
        for (id, node) in self.nodes.iter().enumerate() {
            if !node.children.is_empty() {
                continue;
            }
            let src = index[node.label.as_deref().expect("leaves are labeled")];
            let dist = bfs_lengths(&adjacency, id);
            for (other_id, other) in self.nodes.iter().enumerate() {
                if other.children.is_empty() && other_id != id {
                    let dst = index[other.label.as_deref().expect("leaves are labeled")];
                    values[src * l + dst] = dist[other_id];
                }
            }
        }
        DistanceMatrix::new(labels.iter().map(|l| l.to_string()).collect(), values)
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adjacency = vec![Vec::new(); self.nodes.len()];
        for (id, node) in self.nodes.iter().enumerate() {
            if let Some(parent) = node.parent {
                adjacency[id].push(parent);
                adjacency[parent].push(id);
            }
        }
        adjacency
    }

    fn length_adjacency(&self) -> Vec<Vec<(usize, F)>> {
        let mut adjacency = vec![Vec::new(); self.nodes.len()];
        for (id, node) in self.nodes.iter().enumerate() {
            if let Some(parent) = node.parent {
                let len = node.length.expect("checked by caller");
                adjacency[id].push((parent, len));
                adjacency[parent].push((id, len));
            }
        }
        adjacency
    }

    /// Leaf labels below each node in the rooted storage orientation.
    fn leaf_sets_below(&self) -> Vec<BTreeSet<&str>> {
        let mut sets: Vec<BTreeSet<&str>> = vec![BTreeSet::new(); self.nodes.len()];
        for id in self.postorder() {
            if self.nodes[id].children.is_empty() {
                if let Some(label) = self.nodes[id].label.as_deref() {
                    sets[id].insert(label);
                }
            } else {
                let mut merged = BTreeSet::new();
                for &child in &self.nodes[id].children {
                    merged.extend(sets[child].iter().copied());
                }
                sets[id] = merged;
            }
        }
        sets
    }

    fn postorder(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![(self.root, false)];
        while let Some((id, expanded)) = stack.pop() {
            if expanded {
                order.push(id);
            } else {
                stack.push((id, true));
                for &child in &self.nodes[id].children {
                    stack.push((child, false));
                }
            }
        }
        order
    }
}

fn bfs_hops(adjacency: &[Vec<usize>], start: usize) -> Vec<u32> {
    let mut dist = vec![u32::MAX; adjacency.len()];
    dist[start] = 0;
    let mut queue = std::collections::VecDeque::from([start]);
    while let Some(id) = queue.pop_front() {
        for &next in &adjacency[id] {
            if dist[next] == u32::MAX {
                dist[next] = dist[id] + 1;
                queue.push_back(next);
            }
        }
    }
    dist
}

fn bfs_lengths<F: Scalar>(adjacency: &[Vec<(usize, F)>], start: usize) -> Vec<F> {
    let mut visited = vec![false; adjacency.len()];
    let mut sums = vec![NeumaierSum::<F>::new(); adjacency.len()];
    visited[start] = true;
    let mut queue = std::collections::VecDeque::from([start]);
    while let Some(id) = queue.pop_front() {
        for &(next, len) in &adjacency[id] {
            if !visited[next] {
                visited[next] = true;
                let mut sum = sums[id];
                sum.add(len);
                sums[next] = sum;
                queue.push_back(next);
            }
        }
    }
    sums.iter().map(NeumaierSum::total).collect()
}

/// Parses a tree in Newick form. The accepted grammar is
///
/// ```text
/// tree     := subtree ";"
/// subtree  := leaf | internal
/// internal := "(" subtree ("," subtree)+ ")" [name] [":" length]
/// leaf     := name [":" length]
/// ```
///
/// Names stop at whitespace or any of `( ) , : ;`. Branch lengths are
/// optional and must be non-negative. Leaf names must be unique; internal
/// node names are kept and written back verbatim. Multifurcations are
/// allowed anywhere.
pub fn parse_newick<F: Scalar>(text: &str) -> Result<PhyloTree<F>, PhyloError> {
    let mut parser = Parser { text, pos: 0 };
    let mut nodes = Vec::new();
    let root = parser.subtree(&mut nodes, None)?;
    parser.skip_ws();
    match parser.peek() {
        Some(';') => parser.advance(),
        _ => return Err(parser.error("expected ';'")),
    }
    parser.skip_ws();
    if let Some(c) = parser.peek() {
        return Err(parser.error(&format!("unexpected trailing {c:?}")));
    }
    let mut seen = BTreeSet::new();
    for node in &nodes {
        if node.children.is_empty() {
            let name = node.label.as_deref().expect("leaf names are mandatory");
            if !seen.insert(name.to_string()) {
                return Err(PhyloError::DuplicateLeaf { name: name.to_string() });
            }
        }
    }
    Ok(PhyloTree::from_parts(nodes, root))
}

/// Writes a tree in Newick form, including the trailing semicolon. Children
/// appear in stored order and branch lengths round-trip exactly for `f64`
/// trees because the shortest representation that parses back to the same
/// value is used.
pub fn write_newick<F: Scalar>(tree: &PhyloTree<F>) -> String {
    let mut out = String::new();
    write_subtree(tree, tree.root(), &mut out);
    out.push(';');
    out
}

fn write_subtree<F: Scalar>(tree: &PhyloTree<F>, id: usize, out: &mut String) {
    let node = &tree.nodes()[id];
    if !node.children.is_empty() {
        out.push('(');
        for (i, &child) in node.children.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            write_subtree(tree, child, out);
        }
        out.push(')');
    }
    if let Some(label) = &node.label {
        out.push_str(label);
    }
    if let Some(len) = node.length {
        out.push(':');
        out.push_str(&format!("{len}"));
    }
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn advance(&mut self) {
        if let Some(c) = self.peek() {
            self.pos += c.len_utf8();
        }
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.advance();
        }
    }

    fn error(&self, message: &str) -> PhyloError {
        PhyloError::Newick {
            pos: self.pos,
            message: message.to_string(),
        }
    }

    fn subtree<F: Scalar>(
        &mut self,
        nodes: &mut Vec<Node<F>>,
        parent: Option<usize>,
    ) -> Result<usize, PhyloError> {
        self.skip_ws();
        let id = nodes.len();
        nodes.push(Node {
            label: None,
            parent,
            children: Vec::new(),
            length: None,
        });
        if self.peek() == Some('(') {
            self.advance();
            let first = self.subtree(nodes, Some(id))?;
            nodes[id].children.push(first);
            self.skip_ws();
            if self.peek() != Some(',') {
                return Err(self.error("expected ',': internal nodes need at least two children"));
            }
            while self.peek() == Some(',') {
                self.advance();
                let child = self.subtree(nodes, Some(id))?;
                nodes[id].children.push(child);
                self.skip_ws();
            }
            match self.peek() {
                Some(')') => self.advance(),
                Some(c) => return Err(self.error(&format!("expected ')' , found {c:?}"))),
                None => return Err(self.error("expected ')' , found end of input")),
            }
            let name = self.name();
            if !name.is_empty() {
                nodes[id].label = Some(name);
            }
        } else {
            let name = self.name();
            if name.is_empty() {
                return Err(match self.peek() {
                    Some(c) => self.error(&format!("expected a name, found {c:?}")),
                    None => self.error("expected a name, found end of input"),
                });
            }
            nodes[id].label = Some(name);
        }
        self.skip_ws();
        if self.peek() == Some(':') {
            self.advance();
            nodes[id].length = Some(self.length()?);
        }
        Ok(id)
    }

    fn name(&mut self) -> String {
        let mut out = String::new();
        while let Some(c) = self.peek() {
            if c.is_whitespace() || matches!(c, '(' | ')' | ',' | ':' | ';') {
                break;
            }
            out.push(c);
            self.advance();
        }
        out
    }

    fn length<F: Scalar>(&mut self) -> Result<F, PhyloError> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E') {
                self.advance();
            } else {
                break;
            }
        }
        let raw = &self.text[start..self.pos];
        let value: f64 = raw.parse().map_err(|_| PhyloError::Newick {
            pos: start,
            message: format!("invalid branch length {raw:?}"),
        })?;
        if !value.is_finite() || value < 0.0 {
            return Err(PhyloError::Newick {
                pos: start,
                message: format!("branch length {raw} must be finite and non-negative"),
            });
        }
        F::from_f64(value).ok_or(PhyloError::Newick {
            pos: start,
            message: format!("branch length {raw} does not fit the scalar type"),
        })
    }
}

/// Checks that a label survives Newick serialization unchanged.
pub(crate) fn check_newick_safe(label: &str) -> Result<(), PhyloError> {
    let bad = label.is_empty()
        || label
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, '(' | ')' | ',' | ':' | ';' | '\'' | '"'));
    if bad {
        Err(PhyloError::BadLabel {
            name: label.to_string(),
        })
    } else {
        Ok(())
    }
}
