//! Post-hoc diagnostics over trajectories: centroid and disagreement,
//! Lyapunov values, consensus verdicts, decay-rate fits, and the predicted
//! consensus value.

use std::io::{self, Write};

use nalgebra::DVector;

use crate::bounds::ValueRule;
use crate::dynamics::Trajectory;
use crate::fmt::sig;
use crate::graph::{build_laplacian, left_eigenvector, Graph};
use crate::{Error, Result};

/// Default tolerance on the final spread `max_ij |x_i − x_j|`.
pub const DEFAULT_TOLERANCE: f64 = 1e-6;

/// Minimum number of usable samples for a rate fit.
const MIN_FIT_SAMPLES: usize = 10;

/// `V` below this fraction of the squared state magnitude is at the
/// rounding floor of double precision and is left out of rate fits.
const ROUNDING_FLOOR: f64 = 1e-26;

#[derive(Debug, Clone, PartialEq)]
pub struct DisagreementEntry {
    pub t: f64,
    /// `c = (1/n) Σ x_i`.
    pub centroid: f64,
    /// `δ = x − 1c`.
    pub delta: DVector<f64>,
    /// `V = δᵀδ`.
    pub v: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DisagreementSeries {
    entries: Vec<DisagreementEntry>,
}

impl DisagreementSeries {
    /// Series from arbitrary time-stamped states.
    pub fn from_states<'a>(states: impl IntoIterator<Item = (f64, &'a DVector<f64>)>) -> Self {
        Self {
            entries: states.into_iter().map(|(t, x)| entry(t, x)).collect(),
        }
    }

    pub fn entries(&self) -> &[DisagreementEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `(t, V)` pairs.
    pub fn lyapunov(&self) -> Vec<(f64, f64)> {
        self.entries.iter().map(|e| (e.t, e.v)).collect()
    }

    /// `t,c,V` CSV.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,c,V")?;
        for e in &self.entries {
            writeln!(w, "{},{},{}", sig(e.t, 12), sig(e.centroid, 12), sig(e.v, 12))?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV is ASCII")
    }
}

fn entry(t: f64, x: &DVector<f64>) -> DisagreementEntry {
    let centroid = x.mean();
    let delta = x.map(|v| v - centroid);
    let v = delta.norm_squared();
    DisagreementEntry {
        t,
        centroid,
        delta,
        v,
    }
}

/// Centroid, disagreement vector and `V = δᵀδ` at every sample.
pub fn disagreement(traj: &Trajectory) -> DisagreementSeries {
    DisagreementSeries {
        entries: traj.samples().iter().map(|s| entry(s.t, &s.x)).collect(),
    }
}

/// Fitted exponential rate of `V`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateEstimate {
    /// `α̂` such that `V(t) ≈ V₀ e^{−2α̂t}`.
    Finite(f64),
    /// `V` hit exactly zero: the rate is unbounded.
    Deadbeat,
}

impl RateEstimate {
    pub fn value(&self) -> f64 {
        match self {
            RateEstimate::Finite(r) => *r,
            RateEstimate::Deadbeat => f64::INFINITY,
        }
    }
}

/// Least-squares slope of `ln V` against `t`, halved and negated, over the
/// usable points with the first 10% dropped. Points with `V ≤ floor` are
/// unusable.
///
/// `V` dropping to exactly 0 straight from above the floor is deadbeat
/// convergence; reaching 0 after sinking below the floor is just rounding.
fn fit_above(points: &[(f64, f64)], floor: f64) -> Result<RateEstimate> {
    let first_is_zero = points.first().is_some_and(|&(_, v)| v == 0.0);
    let jumps_to_zero = points
        .windows(2)
        .any(|w| w[1].1 == 0.0 && w[0].1 > floor);
    if first_is_zero || jumps_to_zero {
        return Ok(RateEstimate::Deadbeat);
    }
    let usable: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|&(t, v)| t.is_finite() && v.is_finite() && v > floor.max(1e-300))
        .collect();
    if usable.len() < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientData {
            needed: MIN_FIT_SAMPLES,
            found: usable.len(),
        });
    }
    let fit = &usable[usable.len() / 10..];
    let m = fit.len() as f64;
    let t_mean = fit.iter().map(|p| p.0).sum::<f64>() / m;
    // Logs relative to the first point, so a flat series fits exactly 0.
    let y0 = fit[0].1.ln();
    let y = |v: f64| v.ln() - y0;
    let y_mean = fit.iter().map(|p| y(p.1)).sum::<f64>() / m;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(t, v) in fit {
        sxy += (t - t_mean) * (y(v) - y_mean);
        sxx += (t - t_mean) * (t - t_mean);
    }
    if sxx == 0.0 {
        return Err(Error::InsufficientData {
            needed: 2,
            found: 1,
        });
    }
    // `+ 0.0` turns a −0 from a flat series into 0.
    Ok(RateEstimate::Finite(-(sxy / sxx) / 2.0 + 0.0))
}

/// Rate fit on raw `(t, V)` points.
pub fn fit_decay_rate(points: &[(f64, f64)]) -> Result<RateEstimate> {
    fit_above(points, 1e-300)
}

/// Empirical decay rate `α̂` of a disagreement series. Points whose `V` has
/// sunk to the rounding floor relative to the state magnitude are ignored.
pub fn estimate_decay_rate(series: &DisagreementSeries) -> Result<RateEstimate> {
    let scale = series
        .entries
        .iter()
        .map(|e| e.v + e.delta.len() as f64 * e.centroid * e.centroid)
        .fold(0.0, f64::max);
    fit_above(&series.lyapunov(), ROUNDING_FLOOR * scale)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub value: f64,
    pub rule: ValueRule,
}

/// Predicted consensus value `x*`.
///
/// Undirected connected topologies (fixed or switching) preserve the
/// average; a single directed topology with a spanning tree converges to
/// `wᵀx(0)`. Switching among directed topologies is not covered.
pub fn predict_consensus_value<'a>(
    graphs: impl IntoIterator<Item = &'a Graph>,
    x0: &DVector<f64>,
) -> Result<Prediction> {
    let graphs: Vec<&Graph> = graphs.into_iter().collect();
    if graphs.is_empty() {
        return Err(Error::EmptyTopologySet);
    }
    for g in &graphs {
        if g.n() != x0.len() {
            return Err(Error::DimensionMismatch {
                expected: g.n(),
                found: x0.len(),
            });
        }
    }
    if graphs.iter().all(|g| g.is_undirected()) {
        for g in &graphs {
            let comps = g.components()?;
            if comps.len() > 1 {
                return Err(Error::NotConnected { components: comps });
            }
        }
        return Ok(Prediction {
            value: x0.mean(),
            rule: ValueRule::Average,
        });
    }
    if graphs.len() > 1 {
        return Err(Error::Unsupported(
            "no consensus-value formula for switching directed topologies".into(),
        ));
    }
    let w = left_eigenvector(&build_laplacian(graphs[0]))?;
    Ok(Prediction {
        value: w.weighted_value(x0),
        rule: ValueRule::WWeighted,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusVerdict {
    pub reached: bool,
    pub tolerance: f64,
    /// `max_ij |x_i − x_j|` at the last sample.
    pub final_spread: f64,
    pub predicted_value: Option<f64>,
    /// Final centroid, when consensus was reached.
    pub achieved_value: Option<f64>,
    pub estimated_rate: Option<RateEstimate>,
}

impl ConsensusVerdict {
    pub fn with_prediction(mut self, p: &Prediction) -> Self {
        self.predicted_value = Some(p.value);
        self
    }

    /// `|achieved − predicted|`, when both are known.
    pub fn value_error(&self) -> Option<f64> {
        Some((self.achieved_value? - self.predicted_value?).abs())
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("reached = {}\n", self.reached);
        out.push_str(&format!("tolerance = {}\n", sig(self.tolerance, 12)));
        out.push_str(&format!("final_spread = {}\n", sig(self.final_spread, 12)));
        if let Some(p) = self.predicted_value {
            out.push_str(&format!("predicted_value = {}\n", sig(p, 12)));
        }
        if let Some(a) = self.achieved_value {
            out.push_str(&format!("achieved_value = {}\n", sig(a, 12)));
        }
        match self.estimated_rate {
            Some(RateEstimate::Finite(r)) => {
                out.push_str(&format!("estimated_rate = {}\n", sig(r, 12)))
            }
            Some(RateEstimate::Deadbeat) => out.push_str("estimated_rate = inf\n"),
            None => {}
        }
        out
    }
}

/// Consensus is declared when the final spread is below `tol`.
pub fn check_consensus(traj: &Trajectory, tol: f64) -> Result<ConsensusVerdict> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let x = traj.final_state();
    let (lo, hi) = x
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let final_spread = hi - lo;
    let reached = final_spread < tol;
    Ok(ConsensusVerdict {
        reached,
        tolerance: tol,
        final_spread,
        predicted_value: None,
        achieved_value: reached.then(|| x.mean()),
        estimated_rate: estimate_decay_rate(&disagreement(traj)).ok(),
    })
}
