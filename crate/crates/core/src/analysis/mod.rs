//! Post-hoc analysis of evolved populations.

mod cluster;
mod concept;
mod distance;
mod graph;
mod mds;

pub use cluster::{group_codes, CodeCluster, DEFAULT_CLUSTER_TOLERANCE};
pub use concept::{concept_table, ConceptRow, ConceptTable};
pub use distance::{code_distance, distance_matrix, DistanceMatrix};
pub use graph::{connected_components, structure_graph, Edge, StructureGraph};
pub use mds::classical_mds;

/// Minimal union-find used by clustering and component search.
pub(crate) struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // smaller root wins so group order is stable
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    /// Groups ordered by their smallest member, members ascending.
    pub(crate) fn groups(mut self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut by_root: Vec<Vec<usize>> = vec![Vec::new(); n];
        for i in 0..n {
            let r = self.find(i);
            by_root[r].push(i);
        }
        by_root.into_iter().filter(|g| !g.is_empty()).collect()
    }
}
