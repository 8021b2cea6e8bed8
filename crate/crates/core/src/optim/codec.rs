use serde::{Deserialize, Serialize};

use crate::model::{Code, PopulationModel, PopulationStructure};
use crate::{Error, Result};

/// Numerically stable softmax.
pub fn softmax(block: &[f64]) -> Vec<f64> {
    let max = block.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = block.iter().map(|&v| (v - max).exp()).collect();
    let total: f64 = out.iter().sum();
    for v in &mut out {
        *v /= total;
    }
    out
}

/// One code row in the parameter vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowDescriptor {
    pub agent: usize,
    pub sensor_state: usize,
}

/// Maps unconstrained real vectors onto code rows (and optionally the
/// interaction structure) by per-block softmax. Every real vector of the
/// right length decodes to a valid model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamCodec {
    agents: usize,
    sensor_states: usize,
    output_states: usize,
    rows: Vec<RowDescriptor>,
    free_structure: bool,
}

/// The probabilities carried by one parameter vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Decoded {
    pub codes: Vec<Code>,
    pub structure: Option<PopulationStructure>,
}

impl ParamCodec {
    pub fn new(agents: usize, sensor_states: usize, output_states: usize) -> Result<Self> {
        if agents == 0 || sensor_states == 0 || output_states == 0 {
            return Err(Error::InvalidConfig(
                "codec dimensions must all be positive".into(),
            ));
        }
        let rows = (0..agents)
            .flat_map(|agent| {
                (0..sensor_states).map(move |sensor_state| RowDescriptor {
                    agent,
                    sensor_state,
                })
            })
            .collect();
        Ok(Self {
            agents,
            sensor_states,
            output_states,
            rows,
            free_structure: false,
        })
    }

    pub fn for_model(model: &PopulationModel, free_structure: bool) -> Result<Self> {
        let codec = Self::new(
            model.agents().len(),
            model.sensor_states(),
            model.output_states(),
        )?;
        Ok(if free_structure {
            codec.with_free_structure()
        } else {
            codec
        })
    }

    /// Appends an `n²` block decoded into `p(θ,θ′)`.
    pub fn with_free_structure(mut self) -> Self {
        self.free_structure = true;
        self
    }

    pub fn rows(&self) -> &[RowDescriptor] {
        &self.rows
    }

    pub fn agents(&self) -> usize {
        self.agents
    }

    pub fn free_structure(&self) -> bool {
        self.free_structure
    }

    pub fn code_dimension(&self) -> usize {
        self.rows.len() * self.output_states
    }

    pub fn dimension(&self) -> usize {
        self.code_dimension()
            + if self.free_structure {
                self.agents * self.agents
            } else {
                0
            }
    }

    fn check_len(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.dimension() {
            return Err(Error::LengthMismatch {
                left: self.dimension(),
                right: params.len(),
            });
        }
        Ok(())
    }

    pub fn decode_codes(&self, params: &[f64]) -> Result<Vec<Code>> {
        self.check_len(params)?;
        let row_block = self.output_states;
        let code_block = self.sensor_states * row_block;
        params[..self.code_dimension()]
            .chunks(code_block)
            .map(|block| {
                let table: Vec<f64> = block.chunks(row_block).flat_map(softmax).collect();
                Code::new(self.sensor_states, self.output_states, table)
            })
            .collect()
    }

    pub fn decode_structure(&self, params: &[f64]) -> Result<Option<PopulationStructure>> {
        self.check_len(params)?;
        if !self.free_structure {
            return Ok(None);
        }
        let block = &params[self.code_dimension()..];
        PopulationStructure::new(self.agents, softmax(block)).map(Some)
    }

    pub fn decode(&self, params: &[f64]) -> Result<Decoded> {
        Ok(Decoded {
            codes: self.decode_codes(params)?,
            structure: self.decode_structure(params)?,
        })
    }

    /// A parameter vector decoding to the same model with every probability
    /// raised to at least `floor` (structure entries to `floor / n²`), with
    /// each block centred at zero. Saturated blocks come back to a region
    /// where the softmax still has slope.
    pub fn tempered(&self, params: &[f64], floor: f64) -> Result<Vec<f64>> {
        self.check_len(params)?;
        if !(floor > 0.0 && floor < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "temper floor {floor} must lie in (0, 1)"
            )));
        }
        fn centred_logs(block: &[f64], floor: f64) -> Vec<f64> {
            let logs: Vec<f64> = softmax(block).iter().map(|p| p.max(floor).ln()).collect();
            let centre = logs.iter().sum::<f64>() / logs.len() as f64;
            logs.iter().map(|l| l - centre).collect()
        }
        let mut out: Vec<f64> = params[..self.code_dimension()]
            .chunks(self.output_states)
            .flat_map(|block| centred_logs(block, floor))
            .collect();
        if self.free_structure {
            let block = &params[self.code_dimension()..];
            out.extend(centred_logs(block, floor / block.len() as f64));
        }
        Ok(out)
    }

    /// Replaces the template's codes (and structure, when free) with the
    /// decoded ones.
    pub fn apply(&self, template: &PopulationModel, params: &[f64]) -> Result<PopulationModel> {
        if template.agents().len() != self.agents
            || template.sensor_states() != self.sensor_states
            || template.output_states() != self.output_states
        {
            return Err(Error::InvalidConfig(
                "codec layout does not match the model template".into(),
            ));
        }
        let decoded = self.decode(params)?;
        let model = template.with_codes(decoded.codes)?;
        match decoded.structure {
            Some(s) => model.with_structure(s),
            None => Ok(model),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_block_is_uniform() {
        let codec = ParamCodec::new(1, 1, 4).unwrap();
        let codes = codec.decode_codes(&[0.0; 4]).unwrap();
        assert_eq!(codes[0].row(0), &[0.25; 4]);
    }

    #[test]
    fn large_logit_saturates() {
        let codec = ParamCodec::new(1, 1, 4).unwrap();
        for t in [10.0, 50.0, 800.0] {
            let row = codec.decode_codes(&[t, 0.0, 0.0, 0.0]).unwrap()[0]
                .row(0)
                .to_vec();
            assert_abs_diff_eq!(row[0], 1.0, epsilon = 3.0 * (-t).exp() + 1e-15);
        }
        // no overflow for huge logits
        let row = softmax(&[1e308, -1e308, 0.0]);
        assert_eq!(row, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn layout_and_dimension() {
        let codec = ParamCodec::new(3, 2, 4).unwrap();
        assert_eq!(codec.dimension(), 24);
        assert_eq!(
            codec.rows()[3],
            RowDescriptor {
                agent: 1,
                sensor_state: 1
            }
        );
        let free = codec.clone().with_free_structure();
        assert_eq!(free.dimension(), 33);
        assert!(codec.decode(&[0.0; 23]).is_err());
        let d = free.decode(&[0.0; 33]).unwrap();
        let s = d.structure.unwrap();
        assert!(s
            .probabilities()
            .iter()
            .all(|&p| (p - 1.0 / 9.0).abs() < 1e-15));
    }

    #[test]
    fn tempering_keeps_argmax_and_bounds_gaps() {
        let codec = ParamCodec::new(1, 2, 3).unwrap().with_free_structure();
        let p = [80.0, 0.0, -5.0, 0.3, 0.2, 0.1, 9.0];
        let t = codec.tempered(&p, 1e-2).unwrap();
        assert_eq!(t.len(), p.len());
        let rows = codec.decode_codes(&t).unwrap();
        let row = rows[0].row(0);
        assert!(row[0] > 0.97 && row[1] > 0.0098 && row[2] > 0.0098);
        // unsaturated rows are reproduced exactly
        let before = codec.decode_codes(&p).unwrap();
        for (a, b) in rows[0].row(1).iter().zip(before[0].row(1)) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(t[..3].iter().sum::<f64>(), 0.0, epsilon = 1e-12);
        assert!(codec.tempered(&p, 0.0).is_err());
        assert!(codec.tempered(&p[..6], 1e-2).is_err());
    }

    #[test]
    fn block_order_is_agent_then_sensor_state() {
        let codec = ParamCodec::new(2, 2, 2).unwrap();
        // agent 1, sensor state 0 favours symbol 1
        let p = [0.0, 0.0, 0.0, 0.0, 0.0, 30.0, 0.0, 0.0];
        let codes = codec.decode_codes(&p).unwrap();
        assert!(codes[1].row(0)[1] > 0.999);
        assert_eq!(codes[0].row(0), &[0.5, 0.5]);
    }
}
