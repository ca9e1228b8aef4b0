//! The marked spatial dependence graph and the queries used to read it.
//!
//! Vertices are the component processes (types). Two vertices are joined
//! when their edge statistic strictly exceeds the threshold; a missing edge
//! encodes conditional orthogonality given all remaining components.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::partial::EdgeStatisticMatrix;
use crate::{Error, Result};

/// The canonical weak, intermediate and strong thresholds.
pub const DEFAULT_THRESHOLDS: [f64; 3] = [0.3, 0.6, 0.9];

pub fn validate_threshold(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidThreshold(alpha))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DependenceGraph {
    names: Vec<String>,
    alpha: f64,
    stats: EdgeStatisticMatrix,
    /// Unordered pairs stored as `(low, high)`.
    edges: BTreeSet<(usize, usize)>,
}

/// Builds the graph with an edge `{i, j}` iff `stats(i, j) > alpha`.
/// Every type is a vertex, isolated or not.
pub fn build_msdgm(stats: &EdgeStatisticMatrix, names: &[String], alpha: f64) -> Result<DependenceGraph> {
    validate_threshold(alpha)?;
    let d = stats.dim();
    if names.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: names.len(),
        });
    }
    let mut edges = BTreeSet::new();
    for i in 0..d {
        for j in (i + 1)..d {
            if stats.get(i, j) > alpha {
                edges.insert((i, j));
            }
        }
    }
    Ok(DependenceGraph {
        names: names.to_vec(),
        alpha,
        stats: stats.clone(),
        edges,
    })
}

impl DependenceGraph {
    /// Rebuilds a graph from stored parts. The listed edges must be exactly
    /// the pairs whose statistic exceeds `alpha`.
    pub fn from_parts(
        names: &[String],
        alpha: f64,
        stats: &EdgeStatisticMatrix,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let graph = build_msdgm(stats, names, alpha)?;
        let listed: BTreeSet<(usize, usize)> = edges.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        if let Some(&(a, b)) = listed.symmetric_difference(&graph.edges).next() {
            return Err(Error::InconsistentEdge(a, b));
        }
        Ok(graph)
    }

    pub fn num_vertices(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn statistics(&self) -> &EdgeStatisticMatrix {
        &self.stats
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i.min(j), i.max(j)))
    }

    pub fn weight(&self, i: usize, j: usize) -> Option<f64> {
        self.has_edge(i, j).then(|| self.stats.get(i, j))
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.num_vertices() {
            Ok(())
        } else {
            Err(Error::UnknownVertex(v))
        }
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.num_vertices()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// All vertices adjacent to `v`.
    pub fn neighborhood(&self, v: usize) -> Result<BTreeSet<usize>> {
        self.check_vertex(v)?;
        Ok(self
            .edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect())
    }

    fn components_without(&self, removed: &BTreeSet<usize>) -> Vec<Vec<usize>> {
        let adj = self.adjacency();
        let mut seen = vec![false; self.num_vertices()];
        let mut out = Vec::new();
        for start in 0..self.num_vertices() {
            if seen[start] || removed.contains(&start) {
                continue;
            }
            seen[start] = true;
            let mut block = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &u in &adj[v] {
                    if !seen[u] && !removed.contains(&u) {
                        seen[u] = true;
                        block.push(u);
                        queue.push_back(u);
                    }
                }
            }
            block.sort_unstable();
            out.push(block);
        }
        out
    }

    /// Partition of the vertices into connected components, each sorted,
    /// ordered by smallest member.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        self.components_without(&BTreeSet::new())
    }

    /// Component-size census: size -> number of components of that size.
    pub fn component_census(&self) -> BTreeMap<usize, usize> {
        let mut census = BTreeMap::new();
        for c in self.connected_components() {
            *census.entry(c.len()).or_insert(0) += 1;
        }
        census
    }

    /// Whether removing `separator` leaves `i` and `j` in different components.
    pub fn is_separator(&self, separator: &BTreeSet<usize>, i: usize, j: usize) -> Result<bool> {
        self.check_vertex(i)?;
        self.check_vertex(j)?;
        if let Some(&v) = separator.iter().find(|&&v| v >= self.num_vertices()) {
            return Err(Error::UnknownVertex(v));
        }
        if i == j {
            return Err(Error::InvalidSeparatorQuery("i and j must differ"));
        }
        if separator.contains(&i) || separator.contains(&j) {
            return Err(Error::InvalidSeparatorQuery("i and j must not be in the separator"));
        }
        let same = self
            .components_without(separator)
            .iter()
            .any(|c| c.contains(&i) && c.contains(&j));
        Ok(!same)
    }

    /// Graphviz description; vertices in registry order, edge weight = statistic.
    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "graph msdgm {{");
        let _ = writeln!(out, "  // alpha = {}", self.alpha);
        for (i, name) in self.names.iter().enumerate() {
            let _ = writeln!(out, "  n{i} [label=\"{}\"];", escape_dot(name));
        }
        for &(a, b) in &self.edges {
            let _ = writeln!(out, "  n{a} -- n{b} [weight={}];", self.stats.get(a, b));
        }
        out.push_str("}\n");
        out
    }
}

fn escape_dot(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '"' | '\\' => {
                out.push('\\');
                out.push(ch);
            }
            '\n' => out.push_str("\\n"),
            _ => out.push(ch),
        }
    }
    out
}
