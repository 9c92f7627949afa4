use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RoundStats {
    pub name: String,
    pub reducers: usize,
    pub input_records: u64,
    pub map_records: u64,
    pub map_bytes: u64,
    /// Distinct keys reduced.
    pub reduce_groups: u64,
    pub reduce_output_records: u64,
    pub reduce_output_bytes: u64,
    /// Wall time of each reducer's batch of keys, in milliseconds.
    pub reducer_millis: Vec<f64>,
    pub map_millis: f64,
    pub wall_millis: f64,
}

impl RoundStats {
    /// Bytes emitted by all mappers plus all reducers.
    pub fn communication_bytes(&self) -> u64 {
        self.map_bytes + self.reduce_output_bytes
    }

    pub fn communication_records(&self) -> u64 {
        self.map_records + self.reduce_output_records
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct JobStats {
    pub rounds: Vec<RoundStats>,
    pub total_millis: f64,
}

impl JobStats {
    /// Sum of per-round communication over the whole job.
    pub fn communication_bytes(&self) -> u64 {
        self.rounds
            .iter()
            .map(RoundStats::communication_bytes)
            .sum()
    }

    pub fn communication_records(&self) -> u64 {
        self.rounds
            .iter()
            .map(RoundStats::communication_records)
            .sum()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<JobStats> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Population mean, variance and standard deviation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Skew {
    pub mean: f64,
    pub variance: f64,
    pub stddev: f64,
}

impl Skew {
    pub fn of(xs: &[f64]) -> Skew {
        if xs.is_empty() {
            return Skew {
                mean: 0.0,
                variance: 0.0,
                stddev: 0.0,
            };
        }
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let variance = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        Skew {
            mean,
            variance,
            stddev: variance.sqrt(),
        }
    }
}

/// Dispersion of the per-reducer wall times of one round.
pub fn reducer_skew(stats: &JobStats, round: usize) -> Result<Skew> {
    let r = stats.rounds.get(round).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "round {round} not executed (job has {} rounds)",
            stats.rounds.len()
        ))
    })?;
    Ok(Skew::of(&r.reducer_millis))
}
