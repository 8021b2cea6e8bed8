use serde::{Deserialize, Serialize};

use crate::infotheory::jensen_shannon_divergence;
use crate::model::Code;
use crate::{Error, Execution, Result};

/// Distance between two codes: the square root of the Jensen-Shannon
/// divergence of their rows, averaged uniformly over sensor states.
///
/// Sensor states must be named consistently across agents for this to be
/// meaningful. The result is a metric with values in `[0, 1]`.
pub fn code_distance(a: &Code, b: &Code) -> Result<f64> {
    if a.sensor_states() != b.sensor_states() || a.output_states() != b.output_states() {
        return Err(Error::InvalidModel(format!(
            "cannot compare a {}x{} code with a {}x{} code",
            a.sensor_states(),
            a.output_states(),
            b.sensor_states(),
            b.output_states()
        )));
    }
    let mut total = 0.0;
    for y in 0..a.sensor_states() {
        total += jensen_shannon_divergence(a.row(y), b.row(y))?;
    }
    Ok((total / a.sensor_states() as f64).sqrt().min(1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    pub labels: Vec<String>,
    size: usize,
    values: Vec<f64>,
}

impl DistanceMatrix {
    /// Builds from a full row-major matrix; it must be symmetric with a zero
    /// diagonal and finite non-negative entries.
    pub fn new(labels: Vec<String>, values: Vec<f64>) -> Result<Self> {
        let size = labels.len();
        if values.len() != size * size {
            return Err(Error::LengthMismatch {
                left: size * size,
                right: values.len(),
            });
        }
        for i in 0..size {
            if values[i * size + i] != 0.0 {
                return Err(Error::InvalidModel(format!(
                    "diagonal entry {i} is nonzero"
                )));
            }
            for j in 0..size {
                let v = values[i * size + j];
                if v != values[j * size + i] || !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidModel(format!(
                        "entry ({i},{j}) = {v} breaks symmetry or range"
                    )));
                }
            }
        }
        Ok(Self {
            labels,
            size,
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.size + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Pairwise code distances, labelled `0..n`.
pub fn distance_matrix(codes: &[Code]) -> Result<DistanceMatrix> {
    if codes.is_empty() {
        return Err(Error::InvalidModel("no codes to compare".into()));
    }
    let n = codes.len();
    for (i, c) in codes.iter().enumerate() {
        if c.sensor_states() != codes[0].sensor_states()
            || c.output_states() != codes[0].output_states()
        {
            return Err(Error::InvalidModel(format!(
                "code {i} has shape {}x{}, code 0 has {}x{}",
                c.sensor_states(),
                c.output_states(),
                codes[0].sensor_states(),
                codes[0].output_states()
            )));
        }
    }
    let upper = Execution::default().map_range(n, |i| {
        (i + 1..n)
            .map(|j| code_distance(&codes[i], &codes[j]))
            .collect::<Result<Vec<f64>>>()
    });
    let mut values = vec![0.0; n * n];
    for (i, row) in upper.into_iter().enumerate() {
        for (k, d) in row?.into_iter().enumerate() {
            let j = i + 1 + k;
            values[i * n + j] = d;
            values[j * n + i] = d;
        }
    }
    DistanceMatrix::new((0..n).map(|i| i.to_string()).collect(), values)
}
