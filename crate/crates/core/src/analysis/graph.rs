use serde::{Deserialize, Serialize};

use super::DisjointSets;
use crate::model::PopulationStructure;

/// Undirected edge; `a <= b`, and `a == b` is a self-loop.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureGraph {
    pub agents: usize,
    pub edges: Vec<Edge>,
    /// Agents without any edge to another agent.
    pub isolated: Vec<usize>,
}

impl StructureGraph {
    pub fn self_loops(&self) -> usize {
        self.edges.iter().filter(|e| e.a == e.b).count()
    }

    pub fn links(&self) -> usize {
        self.edges.len() - self.self_loops()
    }
}

/// Thresholded interaction graph. The weight of `{i, j}` is the symmetrized
/// probability `(p(i,j) + p(j,i)) / 2`; a self-loop carries `p(i,i)`. Edges
/// are kept when the weight exceeds `threshold`.
pub fn structure_graph(structure: &PopulationStructure, threshold: f64) -> StructureGraph {
    let n = structure.agents();
    let mut edges = Vec::new();
    let mut linked = vec![false; n];
    for a in 0..n {
        for b in a..n {
            let weight = if a == b {
                structure.get(a, a)
            } else {
                0.5 * (structure.get(a, b) + structure.get(b, a))
            };
            if weight > threshold {
                edges.push(Edge { a, b, weight });
                if a != b {
                    linked[a] = true;
                    linked[b] = true;
                }
            }
        }
    }
    StructureGraph {
        agents: n,
        edges,
        isolated: (0..n).filter(|&i| !linked[i]).collect(),
    }
}

/// Connected components, self-loops ignored. Every agent appears in exactly
/// one component; components are ordered by their lowest member.
pub fn connected_components(graph: &StructureGraph) -> Vec<Vec<usize>> {
    let mut sets = DisjointSets::new(graph.agents);
    for e in &graph.edges {
        sets.union(e.a, e.b);
    }
    sets.groups()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn well_mixed_is_complete_with_uniform_weights() {
        let g = structure_graph(&PopulationStructure::well_mixed(3).unwrap(), 0.0);
        assert_eq!(g.links(), 3);
        assert_eq!(g.self_loops(), 3);
        assert!(g.edges.iter().all(|e| (e.weight - 1.0 / 9.0).abs() < 1e-15));
        assert!(g.isolated.is_empty());
        assert_eq!(connected_components(&g), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn grid_edge_count() {
        let g = structure_graph(&PopulationStructure::grid(5, 5).unwrap(), 0.0);
        // 5 rows x 4 horizontal + 5 columns x 4 vertical
        assert_eq!(g.links(), 40);
        assert_eq!(g.self_loops(), 25);
    }

    #[test]
    fn zero_probability_agent_is_isolated() {
        let mut p = vec![0.0; 9];
        p[1] = 0.5;
        p[3] = 0.5; // agents 0 and 1 only
        let g = structure_graph(&PopulationStructure::new(3, p).unwrap(), 0.0);
        assert_eq!(g.isolated, vec![2]);
        assert_eq!(connected_components(&g), vec![vec![0, 1], vec![2]]);
    }

    #[test]
    fn components_of_cliques_and_empty_graphs() {
        let empty = StructureGraph {
            agents: 4,
            edges: vec![],
            isolated: vec![0, 1, 2, 3],
        };
        assert_eq!(connected_components(&empty).len(), 4);
        let mut p = vec![0.0; 16];
        for (a, b) in [(0, 1), (1, 0), (2, 3), (3, 2), (0, 0)] {
            p[a * 4 + b] = 0.2;
        }
        let g = structure_graph(&PopulationStructure::new(4, p).unwrap(), 0.0);
        assert_eq!(connected_components(&g), vec![vec![0, 1], vec![2, 3]]);
    }
}
