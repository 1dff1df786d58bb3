//! Directed graph storage with in- and out-adjacency.

use std::collections::HashSet;

use crate::error::{Error, Result};

/// Dense node index.
pub type NodeId = u32;

/// Directed, unweighted graph. Immutable once built.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    out_adj: Vec<Vec<NodeId>>,
    in_adj: Vec<Vec<NodeId>>,
    edge_count: usize,
}

impl Graph {
    /// Builds a graph from an edge list. The node count is `max id + 1`.
    ///
    /// Self-loops and repeated edges are rejected with the offending index.
    pub fn from_edges(edges: &[(NodeId, NodeId)]) -> Result<Self> {
        let node_count = edges
            .iter()
            .map(|&(u, v)| u.max(v) as usize + 1)
            .max()
            .unwrap_or(0);
        Self::with_node_count(node_count, edges)
    }

    /// Like [`Graph::from_edges`] but with an explicit node count, so that
    /// isolated trailing nodes can exist.
    pub fn with_node_count(node_count: usize, edges: &[(NodeId, NodeId)]) -> Result<Self> {
        let mut out_adj = vec![Vec::new(); node_count];
        let mut in_adj = vec![Vec::new(); node_count];
        let mut seen = HashSet::with_capacity(edges.len());
        for (index, &(u, v)) in edges.iter().enumerate() {
            for node in [u, v] {
                if node as usize >= node_count {
                    return Err(Error::NodeOutOfRange { node, node_count });
                }
            }
            if u == v {
                return Err(Error::SelfLoop { node: u, index });
            }
            if !seen.insert((u, v)) {
                return Err(Error::DuplicateEdge {
                    src: u,
                    dst: v,
                    index,
                });
            }
            out_adj[u as usize].push(v);
            in_adj[v as usize].push(u);
        }
        for list in out_adj.iter_mut().chain(in_adj.iter_mut()) {
            list.sort_unstable();
        }
        Ok(Self {
            out_adj,
            in_adj,
            edge_count: edges.len(),
        })
    }

    pub fn node_count(&self) -> usize {
        self.out_adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Nodes `u` with an edge `(u, v)`: the potential influencers of `v`.
    pub fn in_neighbors(&self, v: NodeId) -> Result<&[NodeId]> {
        self.in_adj
            .get(v as usize)
            .map(Vec::as_slice)
            .ok_or(Error::NodeOutOfRange {
                node: v,
                node_count: self.node_count(),
            })
    }

    pub fn out_neighbors(&self, u: NodeId) -> Result<&[NodeId]> {
        self.out_adj
            .get(u as usize)
            .map(Vec::as_slice)
            .ok_or(Error::NodeOutOfRange {
                node: u,
                node_count: self.node_count(),
            })
    }

    /// Unchecked in-neighbor access for hot loops over known-valid ids.
    pub(crate) fn ins(&self, v: NodeId) -> &[NodeId] {
        &self.in_adj[v as usize]
    }

    pub(crate) fn outs(&self, u: NodeId) -> &[NodeId] {
        &self.out_adj[u as usize]
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.out_adj
            .get(u as usize)
            .is_some_and(|outs| outs.binary_search(&v).is_ok())
    }

    /// All edges in `(src, dst)` order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.out_adj
            .iter()
            .enumerate()
            .flat_map(|(u, outs)| outs.iter().map(move |&v| (u as NodeId, v)))
    }

    pub fn max_in_degree(&self) -> usize {
        self.in_adj.iter().map(Vec::len).max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_edge_list() {
        let g = Graph::from_edges(&[]).unwrap();
        assert_eq!(g.node_count(), 0);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn adjacency_in_both_directions() {
        let g = Graph::from_edges(&[(0, 1), (1, 2)]).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.in_neighbors(2).unwrap(), &[1]);
        assert_eq!(g.out_neighbors(0).unwrap(), &[1]);
    }

    #[test]
    fn duplicate_edge_rejected_with_position() {
        match Graph::from_edges(&[(0, 1), (0, 1)]) {
            Err(Error::DuplicateEdge { index, .. }) => assert_eq!(index, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn self_loop_rejected() {
        assert!(matches!(
            Graph::from_edges(&[(0, 1), (2, 2)]),
            Err(Error::SelfLoop { node: 2, index: 1 })
        ));
    }

    #[test]
    fn in_neighbor_queries() {
        let g = Graph::from_edges(&[(0, 2), (1, 2)]).unwrap();
        assert_eq!(g.in_neighbors(2).unwrap(), &[0, 1]);
        let g = Graph::from_edges(&[(0, 2)]).unwrap();
        assert!(g.in_neighbors(0).unwrap().is_empty());
        let g = Graph::from_edges(&[(0, 1), (1, 0)]).unwrap();
        assert_eq!(g.in_neighbors(0).unwrap(), &[1]);
        assert!(matches!(
            g.in_neighbors(7),
            Err(Error::NodeOutOfRange { node: 7, .. })
        ));
    }
}
