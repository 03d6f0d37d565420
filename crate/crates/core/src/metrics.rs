//! Interaction graph of the swarm without the target, its connected
//! components and the separation test.

use std::collections::VecDeque;

use crate::swarm::{neighbor_set, SwarmState};
use crate::{Error, Result};

/// Undirected graph over all sheep except the target; `{i, j}` is an edge
/// iff the pair is strictly closer than the sensing radius.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionGraph {
    /// Sheep ids, ascending.
    pub nodes: Vec<usize>,
    /// Edges as `(i, j)` with `i < j`, lexicographically sorted.
    pub edges: Vec<(usize, usize)>,
}

pub fn interaction_graph(state: &SwarmState, t: usize, r: f64) -> Result<InteractionGraph> {
    state.check_index(t)?;
    let nodes: Vec<usize> = (0..state.len()).filter(|&i| i != t).collect();
    let mut edges = Vec::new();
    for (a, &i) in nodes.iter().enumerate() {
        for &j in &nodes[a + 1..] {
            if state.distance(i, j) < r {
                edges.push((i, j));
            }
        }
    }
    Ok(InteractionGraph { nodes, edges })
}

impl InteractionGraph {
    /// Connected components as sorted id lists, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let max_id = self.nodes.iter().copied().max().map_or(0, |m| m + 1);
        let mut slot = vec![usize::MAX; max_id];
        for (k, &n) in self.nodes.iter().enumerate() {
            slot[n] = k;
        }
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for &(i, j) in &self.edges {
            adj[slot[i]].push(slot[j]);
            adj[slot[j]].push(slot[i]);
        }

        let mut seen = vec![false; self.nodes.len()];
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..self.nodes.len() {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start);
            let mut comp = Vec::new();
            while let Some(u) = queue.pop_front() {
                comp.push(self.nodes[u]);
                for &w in &adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn max_component_size(&self) -> usize {
        self.components().iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// Largest component size over node count, in `(0, 1]`.
pub fn max_component_fraction(graph: &InteractionGraph) -> Result<f64> {
    if graph.nodes.is_empty() {
        return Err(Error::EmptyGraph);
    }
    Ok(graph.max_component_size() as f64 / graph.nodes.len() as f64)
}

/// True iff the target has no sheep within its sensing disc.
pub fn is_separated(state: &SwarmState, t: usize, r: f64) -> Result<bool> {
    Ok(neighbor_set(state, t, r)?.is_empty())
}
