use rand::Rng;
use thiserror::Error;

use super::pool::{PoolEntry, ServicePool};
use crate::qos::QosTriple;
use crate::search::run_rng;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid synthetic spec: {0}")]
pub struct InvalidSpec(pub String);

/// Independent uniform ranges per attribute. The defaults are the extremes
/// of the worked example quality matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub response_time: (f64, f64),
    pub energy: (f64, f64),
    pub cost: (f64, f64),
    pub size: usize,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            response_time: (19.0, 90.0),
            energy: (33.0, 147.0),
            cost: (28.0, 106.0),
            size: 100,
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<(), InvalidSpec> {
        if self.size == 0 {
            return Err(InvalidSpec("pool size must be positive".into()));
        }
        for (name, (lo, hi)) in
            [("response_time", self.response_time), ("energy", self.energy), ("cost", self.cost)]
        {
            if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi) {
                return Err(InvalidSpec(format!("{name} range [{lo}, {hi}] is invalid")));
            }
        }
        Ok(())
    }
}

/// Pool of `spec.size` services drawn uniformly; deterministic in the seed.
pub fn generate_synthetic_pool(spec: &SyntheticSpec) -> Result<ServicePool, InvalidSpec> {
    spec.validate()?;
    let mut rng = run_rng(spec.seed);
    let entries = (0..spec.size)
        .map(|i| {
            let t = rng.gen_range(spec.response_time.0..=spec.response_time.1);
            let e = rng.gen_range(spec.energy.0..=spec.energy.1);
            let c = rng.gen_range(spec.cost.0..=spec.cost.1);
            PoolEntry { service_id: format!("syn{i}"), qos: QosTriple::new(t, e, c) }
        })
        .collect();
    Ok(ServicePool { entries, source: format!("synthetic(size={}, seed={})", spec.size, spec.seed) })
}
