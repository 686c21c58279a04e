//! Immutable simple undirected graphs, degree statistics and edge-list I/O.
//!
//! Edge-list text format: the first non-comment line is `N M` (node count,
//! edge count), followed by exactly `M` lines `u v` of 0-indexed endpoints.
//! Lines starting with `#` and blank lines are ignored.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

/// Node-count ceiling accepted by the text parser.
pub const MAX_PARSED_NODES: usize = 1 << 24;

/// Simple undirected graph with sorted neighbor lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    neighbors: Vec<Vec<usize>>,
    edge_count: usize,
}

/// First and second moments of the degree sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DegreeMoments {
    pub n: usize,
    pub mu1: f64,
    pub mu2: f64,
}

impl DegreeMoments {
    pub fn new(n: usize, mu1: f64, mu2: f64) -> Self {
        Self { n, mu1, mu2 }
    }

    pub fn variance(&self) -> f64 {
        self.mu2 - self.mu1 * self.mu1
    }
}

impl Graph {
    /// Builds a graph from `n` nodes and a list of endpoint pairs.
    ///
    /// Duplicate pairs (in either orientation) collapse to one edge.
    /// Self-loops and out-of-range endpoints are rejected.
    pub fn from_edge_list<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut neighbors = vec![Vec::new(); n];
        for (u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::NodeOutOfRange { index: x, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            neighbors[u].push(v);
            neighbors[v].push(u);
        }
        let mut edge_count = 0;
        for list in &mut neighbors {
            list.sort_unstable();
            list.dedup();
            edge_count += list.len();
        }
        Ok(Self {
            neighbors,
            edge_count: edge_count / 2,
        })
    }

    /// Graph with `n` nodes and no edges.
    pub fn empty(n: usize) -> Result<Self> {
        Self::from_edge_list(n, std::iter::empty())
    }

    pub fn complete(n: usize) -> Result<Self> {
        Self::from_edge_list(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
    }

    pub fn path(n: usize) -> Result<Self> {
        Self::from_edge_list(n, (1..n).map(|v| (v - 1, v)))
    }

    /// Star with node 0 at the center and `n - 1` leaves.
    pub fn star(n: usize) -> Result<Self> {
        Self::from_edge_list(n, (1..n).map(|v| (0, v)))
    }

    /// Ring where every node links to its `degree / 2` nearest neighbors on each side.
    pub fn ring_lattice(n: usize, degree: usize) -> Result<Self> {
        if !degree.is_multiple_of(2) || degree == 0 || degree >= n {
            return Err(Error::param(format!(
                "ring lattice degree {degree} must be even, positive and below n = {n}"
            )));
        }
        let half = degree / 2;
        Self::from_edge_list(
            n,
            (0..n).flat_map(|u| (1..=half).map(move |d| (u, (u + d) % n))),
        )
    }

    pub fn n(&self) -> usize {
        self.neighbors.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, x: usize) -> &[usize] {
        &self.neighbors[x]
    }

    pub fn degree(&self, x: usize) -> usize {
        self.neighbors[x].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.neighbors.iter().map(Vec::len).collect()
    }

    pub fn min_degree(&self) -> usize {
        self.neighbors.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn max_degree(&self) -> usize {
        self.neighbors.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.neighbors.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    pub fn degree_moments(&self) -> DegreeMoments {
        let n = self.n() as f64;
        let (s1, s2) = self.neighbors.iter().fold((0.0, 0.0), |(s1, s2), list| {
            let k = list.len() as f64;
            (s1 + k, s2 + k * k)
        });
        DegreeMoments::new(self.n(), s1 / n, s2 / n)
    }

    /// `p_x = Σ_{y ∈ N(x)} 1 / (k_x k_y)`: probability that a two-step walk from `x` returns.
    pub fn reciprocal_degree_weight(&self, x: usize) -> Result<f64> {
        if x >= self.n() {
            return Err(Error::NodeOutOfRange {
                index: x,
                n: self.n(),
            });
        }
        let kx = self.degree(x);
        if kx == 0 {
            return Err(Error::IsolatedNode(x));
        }
        let kx = kx as f64;
        Ok(self.neighbors[x]
            .iter()
            .map(|&y| 1.0 / (kx * self.degree(y) as f64))
            .sum())
    }

    /// `p_x` for every node; fails on the first isolated node.
    pub fn reciprocal_degree_weights(&self) -> Result<Vec<f64>> {
        (0..self.n())
            .map(|x| self.reciprocal_degree_weight(x))
            .collect()
    }

    /// Sizes of the connected components, largest first.
    pub fn component_sizes(&self) -> Vec<usize> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut sizes = Vec::new();
        let mut queue = VecDeque::new();
        for root in 0..n {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            queue.push_back(root);
            let mut size = 0;
            while let Some(u) = queue.pop_front() {
                size += 1;
                for &v in &self.neighbors[u] {
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
            sizes.push(size);
        }
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        sizes
    }

    pub fn is_connected(&self) -> bool {
        self.component_sizes().len() == 1
    }

    /// Returns `Err(Disconnected)` naming component sizes unless connected.
    pub fn require_connected(&self) -> Result<()> {
        let sizes = self.component_sizes();
        if sizes.len() == 1 {
            Ok(())
        } else {
            Err(Error::Disconnected { sizes })
        }
    }

    /// Mean local clustering coefficient; nodes with degree < 2 contribute 0.
    pub fn mean_clustering(&self) -> f64 {
        let n = self.n();
        let total: f64 = (0..n)
            .map(|x| {
                let list = &self.neighbors[x];
                let k = list.len();
                if k < 2 {
                    return 0.0;
                }
                let mut links = 0usize;
                for (i, &a) in list.iter().enumerate() {
                    for &b in &list[i + 1..] {
                        if self.has_edge(a, b) {
                            links += 1;
                        }
                    }
                }
                2.0 * links as f64 / (k * (k - 1)) as f64
            })
            .sum();
        total / n as f64
    }

    pub fn to_edge_list_string(&self) -> String {
        let mut out = String::with_capacity(16 + 12 * self.edge_count);
        let _ = writeln!(out, "{} {}", self.n(), self.edge_count);
        for (u, v) in self.edges() {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let (header_line, header) = lines.next().ok_or(Error::Parse {
            line: 0,
            msg: "missing \"N M\" header".into(),
        })?;
        let [n, m] = parse_pair(header_line, header)?;
        if n > MAX_PARSED_NODES {
            return Err(Error::Parse {
                line: header_line,
                msg: format!("node count {n} exceeds limit {MAX_PARSED_NODES}"),
            });
        }

        let mut edges = Vec::new();
        let mut last_line = header_line;
        for (line, l) in lines {
            last_line = line;
            if edges.len() == m {
                return Err(Error::Parse {
                    line,
                    msg: format!("more edge lines than the {m} declared in the header"),
                });
            }
            let [u, v] = parse_pair(line, l)?;
            for x in [u, v] {
                if x >= n {
                    return Err(Error::Parse {
                        line,
                        msg: format!("node index {x} out of range for N = {n}"),
                    });
                }
            }
            if u == v {
                return Err(Error::Parse {
                    line,
                    msg: format!("self-loop on node {u}"),
                });
            }
            edges.push((u, v));
        }
        if edges.len() != m {
            return Err(Error::Parse {
                line: last_line,
                msg: format!("header declares {m} edges, found {}", edges.len()),
            });
        }
        Self::from_edge_list(n, edges).map_err(|e| Error::Parse {
            line: header_line,
            msg: e.to_string(),
        })
    }

    pub fn read_edge_list_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_edge_list(&text)
    }

    pub fn write_edge_list_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_edge_list_string()).map_err(|e| Error::io(path, e))
    }
}

fn parse_pair(line: usize, text: &str) -> Result<[usize; 2]> {
    let mut fields = text.split_whitespace();
    let mut next = |what: &str| -> Result<usize> {
        let tok = fields.next().ok_or_else(|| Error::Parse {
            line,
            msg: format!("missing {what}"),
        })?;
        tok.parse().map_err(|_| Error::Parse {
            line,
            msg: format!("expected a non-negative integer for {what}, got {tok:?}"),
        })
    };
    let a = next("first field")?;
    let b = next("second field")?;
    if fields.next().is_some() {
        return Err(Error::Parse {
            line,
            msg: "expected exactly two fields".into(),
        });
    }
    Ok([a, b])
}
