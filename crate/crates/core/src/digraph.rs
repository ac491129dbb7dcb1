//! Static directed graphs with simplex (one-way) links.
//!
//! Edges are stored once, sorted lexicographically by `(source, target)`, and
//! referenced by index. Each edge `j -> i` carries the weight that node `i`
//! assigns to its in-neighbor `j`.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    n_nodes: usize,
    edges: Vec<(usize, usize)>,
    out_neighbors: Vec<Vec<usize>>,
    in_neighbors: Vec<Vec<usize>>,
    /// Edge ids leaving each node, aligned with `out_neighbors`.
    out_edges: Vec<Vec<usize>>,
    /// Edge ids entering each node, aligned with `in_neighbors`.
    in_edges: Vec<Vec<usize>>,
}

impl Digraph {
    /// Builds a graph from an edge list. Self-loops, duplicate edges and
    /// out-of-range endpoints are rejected.
    pub fn from_edges(n_nodes: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n_nodes == 0 {
            return Err(Error::invalid("graph needs at least one node"));
        }
        let mut edges: Vec<(usize, usize)> = edges.into_iter().collect();
        for &(i, j) in &edges {
            if i >= n_nodes || j >= n_nodes {
                return Err(Error::invalid(format!("edge ({i},{j}) out of range for {n_nodes} nodes")));
            }
            if i == j {
                return Err(Error::invalid(format!("self-loop at node {i}")));
            }
        }
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::invalid(format!("duplicate edge ({},{})", w[0].0, w[0].1)));
        }

        let mut out_neighbors = vec![Vec::new(); n_nodes];
        let mut in_neighbors = vec![Vec::new(); n_nodes];
        let mut out_edges = vec![Vec::new(); n_nodes];
        let mut in_edges = vec![Vec::new(); n_nodes];
        for (e, &(src, dst)) in edges.iter().enumerate() {
            out_neighbors[src].push(dst);
            out_edges[src].push(e);
            in_neighbors[dst].push(src);
            in_edges[dst].push(e);
        }
        Ok(Self {
            n_nodes,
            edges,
            out_neighbors,
            in_neighbors,
            out_edges,
            in_edges,
        })
    }

    /// Directed ring `0 -> 1 -> ... -> n-1 -> 0` plus every other ordered pair
    /// added independently with probability `p`.
    ///
    /// Candidate pairs are visited in lexicographic order, skipping ring edges,
    /// and each consumes exactly one uniform draw, so the output is a fixed
    /// function of `(n, p, rng state)`.
    pub fn ring_plus_random<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!("ring needs n >= 2, got {n}")));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid(format!("edge probability {p} outside [0, 1]")));
        }
        let is_ring = |i: usize, j: usize| j == (i + 1) % n;
        let mut edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        for i in 0..n {
            for j in 0..n {
                if i == j || is_ring(i, j) {
                    continue;
                }
                let u: f64 = rng.random();
                if u < p {
                    edges.push((i, j));
                }
            }
        }
        Self::from_edges(n, edges)
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// All edges as `(source, target)`, indexed by edge id.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn out_neighbors(&self, i: usize) -> &[usize] {
        &self.out_neighbors[i]
    }

    pub fn in_neighbors(&self, i: usize) -> &[usize] {
        &self.in_neighbors[i]
    }

    pub fn out_edges(&self, i: usize) -> &[usize] {
        &self.out_edges[i]
    }

    pub fn in_edges(&self, i: usize) -> &[usize] {
        &self.in_edges[i]
    }

    pub fn out_degree(&self, i: usize) -> usize {
        self.out_neighbors[i].len()
    }

    pub fn in_degree(&self, i: usize) -> usize {
        self.in_neighbors[i].len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.out_neighbors[i].binary_search(&j).is_ok()
    }

    pub fn edge_id(&self, i: usize, j: usize) -> Option<usize> {
        self.edges.binary_search(&(i, j)).ok()
    }

    pub fn is_strongly_connected(&self) -> bool {
        let reach = |adj: &Vec<Vec<usize>>| {
            let mut seen = vec![false; self.n_nodes];
            let mut stack = vec![0];
            seen[0] = true;
            while let Some(u) = stack.pop() {
                for &v in &adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        };
        reach(&self.out_neighbors) && reach(&self.in_neighbors)
    }

    /// For every node, the directed hop distance to the nearest node of
    /// `targets` (`None` when no target is reachable). Computed as a BFS over
    /// reversed edges starting from the targets.
    pub fn distances_to_set(&self, targets: &[usize]) -> Result<Vec<Option<usize>>> {
        if targets.is_empty() {
            return Err(Error::invalid("distance target set is empty"));
        }
        let mut dist = vec![None; self.n_nodes];
        let mut queue = VecDeque::new();
        for &t in targets {
            if t >= self.n_nodes {
                return Err(Error::invalid(format!("target {t} out of range")));
            }
            if dist[t].is_none() {
                dist[t] = Some(0);
                queue.push_back(t);
            }
        }
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap_or(0);
            for &v in &self.in_neighbors[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        Ok(dist)
    }

    /// Edge-list text: a header `n <count>` followed by one `i j` line per edge.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("n {}\n", self.n_nodes);
        for &(i, j) in &self.edges {
            let _ = writeln!(s, "{i} {j}");
        }
        s
    }

    /// Parses the edge-list format. Blank lines and `#` comments are ignored.
    pub fn parse_edge_list(text: &str) -> std::result::Result<Self, String> {
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .enumerate()
            .filter(|(_, l)| !l.is_empty());
        let (_, header) = lines.next().ok_or("missing `n <count>` header")?;
        let n = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["n", count] => count.parse::<usize>().map_err(|e| format!("bad node count: {e}"))?,
            _ => return Err(format!("expected `n <count>` header, got `{header}`")),
        };
        let mut edges = Vec::new();
        for (lineno, line) in lines {
            let mut it = line.split_whitespace().map(str::parse::<usize>);
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(i)), Some(Ok(j)), None) => edges.push((i, j)),
                _ => return Err(format!("line {}: expected `i j`, got `{line}`", lineno + 1)),
            }
        }
        Self::from_edges(n, edges).map_err(|e| e.to_string())
    }

    pub fn read_edge_list(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_edge_list(&text).map_err(|msg| Error::Parse {
            path: path.to_path_buf(),
            msg,
        })
    }

    pub fn write_edge_list(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_edge_list())?;
        Ok(())
    }
}
