use serde::{Deserialize, Serialize};

use super::{distance_matrix, DisjointSets};
use crate::model::Code;
use crate::Result;

/// Default single-linkage tolerance on code distance.
pub const DEFAULT_CLUSTER_TOLERANCE: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeCluster {
    /// Entrywise mean of the member codes, rows re-normalized.
    pub representative: Code,
    pub members: Vec<usize>,
    pub count: usize,
}

/// Single-linkage grouping: codes closer than or equal to `tolerance` end up
/// in the same cluster. Clusters are ordered by their lowest member index.
pub fn group_codes(codes: &[Code], tolerance: f64) -> Result<Vec<CodeCluster>> {
    if codes.is_empty() {
        return Ok(Vec::new());
    }
    let d = distance_matrix(codes)?;
    let n = codes.len();
    let mut sets = DisjointSets::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if d.get(i, j) <= tolerance {
                sets.union(i, j);
            }
        }
    }
    sets.groups()
        .into_iter()
        .map(|members| {
            let first = &codes[members[0]];
            let (ys, xs) = (first.sensor_states(), first.output_states());
            let mut table = vec![0.0; ys * xs];
            for &m in &members {
                for (t, v) in table.iter_mut().zip(codes[m].table()) {
                    *t += v;
                }
            }
            for row in table.chunks_mut(xs) {
                let total: f64 = row.iter().sum();
                row.iter_mut().for_each(|v| *v /= total);
            }
            Ok(CodeCluster {
                representative: Code::new(ys, xs, table)?,
                count: members.len(),
                members,
            })
        })
        .collect()
}
