use serde::{Deserialize, Serialize};

use super::GraphError;

/// Simple undirected graph on vertices `0..order()`.
pub trait Graph {
    fn order(&self) -> usize;
    fn adjacent(&self, u: usize, v: usize) -> bool;
    /// Neighbors of `u` in increasing order.
    fn neighbors(&self, u: usize) -> Vec<usize>;
}

impl<G: Graph + ?Sized> Graph for &G {
    fn order(&self) -> usize {
        (**self).order()
    }
    fn adjacent(&self, u: usize, v: usize) -> bool {
        (**self).adjacent(u, v)
    }
    fn neighbors(&self, u: usize) -> Vec<usize> {
        (**self).neighbors(u)
    }
}

/// Graph given by sorted adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitGraph {
    adj: Vec<Vec<usize>>,
}

/// On-disk form: `{"n": .., "edges": [[u, v], ..]}`. Extra fields are ignored,
/// so graph exports with edge lists load directly.
#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl ExplicitGraph {
    pub fn empty(n: usize) -> Self {
        ExplicitGraph { adj: vec![Vec::new(); n] }
    }

    pub fn complete(n: usize) -> Self {
        ExplicitGraph { adj: (0..n).map(|u| (0..n).filter(|&v| v != u).collect()).collect() }
    }

    pub fn cycle(n: usize) -> Self {
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::from_edges(n, &edges).expect("valid cycle")
    }

    /// Loops are rejected; duplicate edges are merged.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n {
                return Err(GraphError::VertexOutOfRange(u));
            }
            if v >= n {
                return Err(GraphError::VertexOutOfRange(v));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Ok(ExplicitGraph { adj })
    }

    /// Assumes symmetric, loop-free lists; sorts them.
    pub(crate) fn from_adjacency(mut adj: Vec<Vec<usize>>) -> Self {
        for list in &mut adj {
            list.sort_unstable();
        }
        ExplicitGraph { adj }
    }

    /// Builds the graph whose edges are the pairs where `f` holds.
    pub fn from_predicate(n: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut adj = vec![Vec::new(); n];
        for u in 0..n {
            for v in u + 1..n {
                if f(u, v) {
                    adj[u].push(v);
                    adj[v].push(u);
                }
            }
        }
        ExplicitGraph { adj }
    }

    pub fn materialize<G: Graph>(g: &G) -> Self {
        Self::from_adjacency((0..g.order()).map(|u| g.neighbors(u)).collect())
    }

    pub fn complement(&self) -> Self {
        let n = self.adj.len();
        Self::from_predicate(n, |u, v| !self.adjacent(u, v))
    }

    /// Induced subgraph on `keep`, relabelled `0..keep.len()` in the given order.
    pub fn induced<G: Graph>(g: &G, keep: &[usize]) -> Self {
        Self::from_predicate(keep.len(), |a, b| g.adjacent(keep[a], keep[b]))
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, list) in self.adj.iter().enumerate() {
            out.extend(list.iter().filter(|&&v| v > u).map(|&v| (u, v)));
        }
        out
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let edges: Vec<[usize; 2]> = self.edges().into_iter().map(|(u, v)| [u, v]).collect();
        serde_json::json!({ "n": self.order(), "edges": edges })
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self, String> {
        let parsed: GraphJson = serde_json::from_value(value.clone()).map_err(|e| e.to_string())?;
        let edges: Vec<(usize, usize)> = parsed.edges.iter().map(|e| (e[0], e[1])).collect();
        Self::from_edges(parsed.n, &edges).map_err(|e| e.to_string())
    }

    /// All labelled graphs on `n` vertices (`2^(n(n-1)/2)` of them), indexed by edge bitmask.
    pub fn all_labelled(n: usize) -> impl Iterator<Item = ExplicitGraph> {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        let total = 1u64 << pairs.len();
        (0..total).map(move |bits| {
            let edges: Vec<(usize, usize)> =
                pairs.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, &e)| e).collect();
            ExplicitGraph::from_edges(n, &edges).expect("valid pairs")
        })
    }
}

impl Graph for ExplicitGraph {
    fn order(&self) -> usize {
        self.adj.len()
    }

    fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    fn neighbors(&self, u: usize) -> Vec<usize> {
        self.adj[u].clone()
    }
}

/// The complement of a graph, computed lazily.
#[derive(Clone, Copy, Debug)]
pub struct Complement<G>(pub G);

impl<G: Graph> Graph for Complement<G> {
    fn order(&self) -> usize {
        self.0.order()
    }

    fn adjacent(&self, u: usize, v: usize) -> bool {
        u != v && !self.0.adjacent(u, v)
    }

    fn neighbors(&self, u: usize) -> Vec<usize> {
        (0..self.order()).filter(|&v| self.adjacent(u, v)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_of_cycle() {
        let c5 = ExplicitGraph::cycle(5);
        assert_eq!(c5.edge_count(), 5);
        let comp = c5.complement();
        assert_eq!(comp.edge_count(), 5);
        assert_eq!(ExplicitGraph::materialize(&Complement(&c5)), comp);
    }

    #[test]
    fn json_round_trip() {
        let g = ExplicitGraph::from_edges(4, &[(0, 1), (2, 3), (1, 0)]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(ExplicitGraph::from_json(&g.to_json()).unwrap(), g);
        assert!(ExplicitGraph::from_edges(3, &[(0, 3)]).is_err());
        assert!(ExplicitGraph::from_edges(3, &[(1, 1)]).is_err());
    }

    #[test]
    fn labelled_graph_counts() {
        assert_eq!(ExplicitGraph::all_labelled(4).count(), 64);
        assert_eq!(ExplicitGraph::all_labelled(1).count(), 1);
    }
}
