use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::qos::Genome;

/// Optimizers known to the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Sfga,
    Ga,
    Pso,
    Ca,
    Gapso,
    Brute,
}

impl Algorithm {
    /// The five population-based optimizers compared in benchmarks.
    pub const COMPARED: [Algorithm; 5] =
        [Algorithm::Pso, Algorithm::Ga, Algorithm::Gapso, Algorithm::Ca, Algorithm::Sfga];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Sfga => "sfga",
            Algorithm::Ga => "ga",
            Algorithm::Pso => "pso",
            Algorithm::Ca => "ca",
            Algorithm::Gapso => "gapso",
            Algorithm::Brute => "brute",
        }
    }

    /// Upper-case label used in report tables.
    pub fn label(self) -> &'static str {
        match self {
            Algorithm::Sfga => "SFGA",
            Algorithm::Ga => "GA",
            Algorithm::Pso => "PSO",
            Algorithm::Ca => "CA",
            Algorithm::Gapso => "GAPSO",
            Algorithm::Brute => "BRUTE",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sfga" => Ok(Algorithm::Sfga),
            "ga" => Ok(Algorithm::Ga),
            "pso" => Ok(Algorithm::Pso),
            "ca" => Ok(Algorithm::Ca),
            "gapso" => Ok(Algorithm::Gapso),
            "brute" => Ok(Algorithm::Brute),
            other => Err(format!("unknown algorithm `{other}`")),
        }
    }
}

/// Outcome of one seeded optimizer run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub algorithm: Algorithm,
    pub instance: String,
    pub seed: u64,
    pub best_genome: Vec<usize>,
    pub best_fitness: f64,
    /// Best-so-far fitness after initialization and after every generation.
    pub trace: Vec<f64>,
    pub evaluations: u64,
    pub wall_time_s: f64,
    /// Every knob the run used, for auditing comparisons.
    pub params: BTreeMap<String, String>,
}

impl RunRecord {
    pub fn best(&self) -> Genome {
        Genome::new(self.best_genome.clone())
    }

    /// True when no trace entry exceeds its predecessor.
    pub fn trace_is_monotone(&self) -> bool {
        self.trace.windows(2).all(|w| w[1] <= w[0])
    }

    /// Equality on everything except the wall clock.
    pub fn same_outcome(&self, other: &RunRecord) -> bool {
        let strip = |r: &RunRecord| RunRecord { wall_time_s: 0.0, ..r.clone() };
        strip(self) == strip(other)
    }
}
