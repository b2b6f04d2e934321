//! Simple undirected graphs: the unit-edge skeleton every space in this
//! crate is built from.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A simple undirected graph on vertices `0..n` (no loops, no multi-edges).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
        }
    }

    /// Builds a graph from an edge list. Loops and repeated edges are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::empty(n);
        for &(a, b) in edges {
            g.try_add_edge(a, b)?;
        }
        g.normalize();
        Ok(g)
    }

    /// Like [`Graph::from_edges`] but silently drops loops and duplicates.
    /// Used by Cayley constructions where `s` and `s^-1` may coincide.
    pub fn from_edges_dedup(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = Graph::empty(n);
        for (a, b) in edges {
            if a != b && a < n && b < n && !g.adj[a].contains(&b) {
                g.adj[a].push(b);
                g.adj[b].push(a);
            }
        }
        g.normalize();
        g
    }

    fn try_add_edge(&mut self, a: usize, b: usize) -> Result<()> {
        let n = self.adj.len();
        if a >= n {
            return Err(Error::InvalidPoint { id: a, len: n });
        }
        if b >= n {
            return Err(Error::InvalidPoint { id: b, len: n });
        }
        if a == b {
            return Err(Error::input(format!("loop at vertex {a}")));
        }
        if self.adj[a].contains(&b) {
            return Err(Error::input(format!("repeated edge {{{a}, {b}}}")));
        }
        self.adj[a].push(b);
        self.adj[b].push(a);
        Ok(())
    }

    fn normalize(&mut self) {
        for nb in &mut self.adj {
            nb.sort_unstable();
        }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// `Some(d)` when every vertex has degree `d`.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.adj.first().map(Vec::len)?;
        self.adj.iter().all(|nb| nb.len() == d).then_some(d)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(a, b)` with `a < b`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (a, nb) in self.adj.iter().enumerate() {
            for &b in nb {
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Breadth-first distances from `src`; `None` for unreachable vertices.
    pub fn bfs(&self, src: usize) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.len()];
        let mut queue = VecDeque::new();
        dist[src] = Some(0);
        queue.push_back(src);
        while let Some(v) = queue.pop_front() {
            let dv = dist[v].unwrap();
            for &w in &self.adj[v] {
                if dist[w].is_none() {
                    dist[w] = Some(dv + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for s in 0..self.len() {
            if seen[s] {
                continue;
            }
            let comp: Vec<usize> = self
                .bfs(s)
                .iter()
                .enumerate()
                .filter_map(|(v, d)| d.map(|_| v))
                .collect();
            for &v in &comp {
                seen[v] = true;
            }
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.len() <= 1 || self.bfs(0).iter().all(Option::is_some)
    }

    /// Length of the shortest cycle, or `None` for forests.
    ///
    /// One BFS per root; a non-tree edge `(v, w)` met at depths `d(v), d(w)`
    /// closes a cycle of length at most `d(v) + d(w) + 1`, and the minimum over
    /// all roots is exact.
    pub fn girth(&self) -> Option<usize> {
        let n = self.len();
        let mut best: Option<usize> = None;
        let mut dist = vec![usize::MAX; n];
        let mut parent = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        for root in 0..n {
            dist.iter_mut().for_each(|d| *d = usize::MAX);
            dist[root] = 0;
            parent[root] = usize::MAX;
            queue.clear();
            queue.push_back(root);
            while let Some(v) = queue.pop_front() {
                if let Some(b) = best {
                    if 2 * dist[v] >= b {
                        break;
                    }
                }
                for &w in &self.adj[v] {
                    if dist[w] == usize::MAX {
                        dist[w] = dist[v] + 1;
                        parent[w] = v;
                        queue.push_back(w);
                    } else if parent[v] != w {
                        let len = dist[v] + dist[w] + 1;
                        best = Some(best.map_or(len, |b| b.min(len)));
                    }
                }
            }
        }
        best
    }

    /// Induced subgraph on `vertices` (relabelled in the given order).
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.len()];
        for (i, &v) in vertices.iter().enumerate() {
            index[v] = i;
        }
        let edges = vertices.iter().enumerate().flat_map(|(i, &v)| {
            let index = &index;
            self.adj[v]
                .iter()
                .filter_map(move |&w| (index[w] != usize::MAX).then_some((i, index[w])))
        });
        Graph::from_edges_dedup(vertices.len(), edges.collect::<Vec<_>>())
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges_dedup(n, edges)
    }

    pub fn cycle(n: usize) -> Self {
        let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        if n >= 3 {
            edges.push((n - 1, 0));
        }
        Graph::from_edges_dedup(n, edges)
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)));
        Graph::from_edges_dedup(n, edges.collect::<Vec<_>>())
    }

    /// Truncation of the `degree`-regular tree: the root has `degree`
    /// children and every other internal vertex `degree - 1`, down to `depth`.
    /// Vertex 0 is the root and ids increase with depth.
    pub fn regular_tree(degree: usize, depth: usize) -> Self {
        let mut edges = Vec::new();
        let mut frontier = vec![0usize];
        let mut next_id = 1usize;
        for level in 0..depth {
            let children = if level == 0 { degree } else { degree.saturating_sub(1) };
            let mut next = Vec::new();
            for &v in &frontier {
                for _ in 0..children {
                    edges.push((v, next_id));
                    next.push(next_id);
                    next_id += 1;
                }
            }
            frontier = next;
        }
        Graph::from_edges_dedup(next_id, edges)
    }

    /// Depth of each vertex below vertex 0 (BFS distance).
    pub fn depths(&self) -> Vec<Option<u32>> {
        if self.is_empty() {
            return Vec::new();
        }
        self.bfs(0)
    }
}
