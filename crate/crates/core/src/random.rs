//! Seeded generators for schedules and initial states.
//!
//! All randomness comes from `ChaCha8Rng::seed_from_u64(seed)`, so a seed
//! fixes the output on every platform.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{Schedule, Segment};
use crate::{Error, Result};

/// Parameters of the random switching-signal generator.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleParams {
    pub segments: usize,
    /// Inclusive range of CT segment durations.
    pub ct_duration: (f64, f64),
    /// Inclusive range of DT step counts.
    pub dt_steps: (u64, u64),
    /// Probability that a segment is CT.
    pub ct_probability: f64,
    /// Topology ids to draw from, uniformly per segment.
    pub topology_ids: Vec<String>,
}

impl Default for ScheduleParams {
    fn default() -> Self {
        Self {
            segments: 10,
            ct_duration: (1.0, 5.0),
            dt_steps: (10, 40),
            ct_probability: 0.5,
            topology_ids: vec!["0".to_string()],
        }
    }
}

impl ScheduleParams {
    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        let (clo, chi) = self.ct_duration;
        let (dlo, dhi) = self.dt_steps;
        if self.segments == 0 {
            return bad("need at least one segment".into());
        }
        if !(clo > 0.0 && clo <= chi && chi.is_finite()) {
            return bad(format!("CT duration range [{clo}, {chi}] must satisfy 0 < lo <= hi"));
        }
        if !(dlo >= 1 && dlo <= dhi) {
            return bad(format!("DT step range [{dlo}, {dhi}] must satisfy 1 <= lo <= hi"));
        }
        if !(0.0..=1.0).contains(&self.ct_probability) {
            return bad(format!("CT probability {} outside [0, 1]", self.ct_probability));
        }
        if self.topology_ids.is_empty() {
            return bad("need at least one topology id".into());
        }
        Ok(())
    }
}

/// A reproducible random schedule. Both the CT/DT alternation and the
/// topology per segment are drawn independently for every segment.
pub fn random_schedule(seed: u64, params: &ScheduleParams) -> Result<Schedule> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (clo, chi) = params.ct_duration;
    let (dlo, dhi) = params.dt_steps;
    let segments = (0..params.segments)
        .map(|_| {
            let ct = rng.random_bool(params.ct_probability);
            let topology = params.topology_ids[rng.random_range(0..params.topology_ids.len())].clone();
            if ct {
                let duration = clo + (chi - clo) * rng.random::<f64>();
                Segment::Ct { duration, topology }
            } else {
                Segment::Dt {
                    steps: rng.random_range(dlo..=dhi),
                    topology,
                }
            }
        })
        .collect();
    Schedule::new(segments)
}

/// `n` states drawn uniformly from `[lo, hi)`.
pub fn random_state(seed: u64, n: usize, lo: f64, hi: f64) -> Result<DVector<f64>> {
    if !(lo < hi && lo.is_finite() && hi.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "state range [{lo}, {hi}) must be finite with lo < hi"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(DVector::from_fn(n, |_, _| lo + (hi - lo) * rng.random::<f64>()))
}
