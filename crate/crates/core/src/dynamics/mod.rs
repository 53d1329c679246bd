//! The switched closed loop: CT flow `ẋ = −L_σ x`, DT map
//! `x⁺ = (I − hL_σ) x`, their nonlinear-coupling counterparts, and the
//! simulator that runs them under an explicit switching schedule.
//!
//! One DT step advances logical time by exactly one unit, so a run's final
//! time is `t = t_c + t_d`. Topologies only change at segment boundaries.

mod protocol;
mod schedule;
mod trajectory;

pub use protocol::{
    validate_protocol_function, Assumption, Coupling, ProbeRange, ProtocolKind, ProtocolSpec,
    ValidationReport, Violation, DEFAULT_DT_INTERNAL,
};
pub use schedule::{Mode, Schedule, Segment};
pub use trajectory::{Sample, Trajectory, CSV_DIGITS};

use std::collections::{BTreeMap, HashMap};

use nalgebra::{DMatrix, DVector};

use crate::graph::{build_laplacian, Graph, Laplacian};
use crate::linalg::expm;
use crate::{Error, Result};

/// Default spacing of recorded samples inside CT segments.
pub const DEFAULT_OUTPUT_RESOLUTION: f64 = 0.01;

/// The registered topology set, keyed by id. All graphs share one agent
/// count.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Topologies {
    graphs: BTreeMap<String, Graph>,
}

impl Topologies {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(id: impl Into<String>, g: Graph) -> Self {
        let mut t = Self::new();
        t.insert(id, g).expect("first insert always succeeds");
        t
    }

    pub fn insert(&mut self, id: impl Into<String>, g: Graph) -> Result<()> {
        let id = id.into();
        if id.is_empty() || id.chars().any(char::is_whitespace) {
            return Err(Error::InvalidParameter(format!("invalid topology id `{id}`")));
        }
        if let Some(n) = self.n() {
            if g.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: g.n(),
                });
            }
        }
        if self.graphs.contains_key(&id) {
            return Err(Error::InvalidParameter(format!("duplicate topology id `{id}`")));
        }
        self.graphs.insert(id, g);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&Graph> {
        self.graphs.get(id)
    }

    pub fn n(&self) -> Option<usize> {
        self.graphs.values().next().map(Graph::n)
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.graphs.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Graph)> {
        self.graphs.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Graphs in id order.
    pub fn graphs(&self) -> Vec<Graph> {
        self.graphs.values().cloned().collect()
    }
}

fn check_dims(x: &DVector<f64>, n: usize) -> Result<()> {
    if x.len() == n {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: n,
            found: x.len(),
        })
    }
}

fn check_state(x: &DVector<f64>, context: &str, time: Option<f64>) -> Result<()> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite {
            context: context.into(),
            time,
        })
    }
}

/// One DT step `(I − hL) x`.
pub fn dt_step(x: &DVector<f64>, l: &Laplacian, h: f64) -> Result<DVector<f64>> {
    check_dims(x, l.n())?;
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "sampling period must be positive, got {h}"
        )));
    }
    Ok(x - l.apply(x) * h)
}

fn flow_matrix(l: &Laplacian, duration: f64) -> Result<DMatrix<f64>> {
    if !(duration.is_finite() && duration >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "CT duration must be finite and nonnegative, got {duration}"
        )));
    }
    expm(&(l.matrix() * -duration))
}

/// `exp(−L·duration) x` by Padé scaling and squaring.
pub fn ct_flow(x: &DVector<f64>, l: &Laplacian, duration: f64) -> Result<DVector<f64>> {
    check_dims(x, l.n())?;
    check_state(x, "CT flow input", None)?;
    Ok(flow_matrix(l, duration)? * x)
}

/// `u_i = Σ_j a_ij f(x_j − x_i)`, times `h` in DT mode.
pub fn nonlinear_input(
    x: &DVector<f64>,
    g: &Graph,
    f: &Coupling,
    h: f64,
    mode: Mode,
) -> Result<DVector<f64>> {
    let n = g.n();
    check_dims(x, n)?;
    let a = g.weights();
    let scale = match mode {
        Mode::Ct => 1.0,
        Mode::Dt => h,
    };
    Ok(DVector::from_fn(n, |i, _| {
        let mut u = 0.0;
        for j in 0..n {
            let w = a[(i, j)];
            if w != 0.0 {
                u += w * f.eval(x[j] - x[i]);
            }
        }
        scale * u
    }))
}

fn ct_field(x: &DVector<f64>, g: &Graph, f: &Coupling) -> DVector<f64> {
    nonlinear_input(x, g, f, 1.0, Mode::Ct).expect("dimensions checked by caller")
}

/// Integrates `ẋ_i = Σ_j a_ij f(x_j − x_i)` with classical RK4 at a fixed
/// step, finishing with a partial step that lands exactly on `duration`.
pub fn nonlinear_ct_flow(
    x: &DVector<f64>,
    g: &Graph,
    f: &Coupling,
    duration: f64,
    dt_internal: f64,
) -> Result<DVector<f64>> {
    check_dims(x, g.n())?;
    check_state(x, "nonlinear CT input", None)?;
    if !(duration.is_finite() && duration >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "CT duration must be finite and nonnegative, got {duration}"
        )));
    }
    if !(dt_internal.is_finite() && dt_internal > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "internal step must be positive, got {dt_internal}"
        )));
    }

    let mut state = x.clone();
    let mut t = 0.0;
    let full = (duration / dt_internal).floor() as u64;
    let rk4 = |s: &DVector<f64>, dt: f64| {
        let k1 = ct_field(s, g, f);
        let k2 = ct_field(&(s + &k1 * (dt / 2.0)), g, f);
        let k3 = ct_field(&(s + &k2 * (dt / 2.0)), g, f);
        let k4 = ct_field(&(s + &k3 * dt), g, f);
        s + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0)
    };
    for k in 1..=full {
        state = rk4(&state, dt_internal);
        t = k as f64 * dt_internal;
        check_state(&state, "nonlinear CT integration", Some(t))?;
    }
    let rest = duration - t;
    if rest > 1e-12 * dt_internal {
        state = rk4(&state, rest);
        check_state(&state, "nonlinear CT integration", Some(duration))?;
    }
    Ok(state)
}

/// Runs the schedule from `x0`.
///
/// CT segments record a sample every `output_resolution` time units plus
/// the segment end; DT segments record every step. The first sample is
/// `x(0)` at `t = 0`. Segment errors carry the segment index.
pub fn simulate(
    x0: &DVector<f64>,
    schedule: &Schedule,
    topologies: &Topologies,
    protocol: &ProtocolSpec,
    output_resolution: f64,
) -> Result<Trajectory> {
    if !(output_resolution.is_finite() && output_resolution > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "output resolution must be positive, got {output_resolution}"
        )));
    }
    let n = topologies.n().ok_or(Error::EmptyTopologySet)?;
    check_dims(x0, n)?;
    check_state(x0, "initial state", Some(0.0))?;

    let mut laplacians: HashMap<&str, Laplacian> = HashMap::new();
    for (index, seg) in schedule.segments().iter().enumerate() {
        let id = seg.topology();
        let g = topologies.get(id).ok_or_else(|| Error::Segment {
            index,
            source: Box::new(Error::UnknownTopology(id.to_string())),
        })?;
        laplacians
            .entry(id)
            .or_insert_with(|| build_laplacian(g));
    }

    let first = &schedule.segments()[0];
    let mut samples = vec![Sample {
        t: 0.0,
        x: x0.clone(),
        mode: first.mode(),
        topology: first.topology().to_string(),
    }];
    let mut step_cache: HashMap<&str, DMatrix<f64>> = HashMap::new();
    let mut x = x0.clone();
    let mut t0 = 0.0;

    for (index, seg) in schedule.segments().iter().enumerate() {
        let id = seg.topology();
        let l = &laplacians[id];
        let g = topologies.get(id).expect("resolved above");
        let wrap = |e: Error| Error::Segment {
            index,
            source: Box::new(e),
        };
        let push = |samples: &mut Vec<Sample>, t: f64, x: &DVector<f64>| -> Result<()> {
            check_state(x, "state", Some(t)).map_err(wrap)?;
            samples.push(Sample {
                t,
                x: x.clone(),
                mode: seg.mode(),
                topology: id.to_string(),
            });
            Ok(())
        };

        match (seg, protocol.kind()) {
            (Segment::Ct { duration, .. }, kind) => {
                let duration = *duration;
                let start = x.clone();
                let mut j = 1u64;
                match kind {
                    ProtocolKind::Linear => {
                        if !step_cache.contains_key(id) {
                            step_cache.insert(id, flow_matrix(l, output_resolution).map_err(wrap)?);
                        }
                        let e_step = &step_cache[id];
                        while (j as f64) * output_resolution < duration - 1e-9 * output_resolution {
                            x = e_step * &x;
                            push(&mut samples, t0 + j as f64 * output_resolution, &x)?;
                            j += 1;
                        }
                        // The endpoint is taken directly from the segment start.
                        x = flow_matrix(l, duration).map_err(wrap)? * &start;
                    }
                    ProtocolKind::Nonlinear(f) => {
                        let dt = protocol.dt_internal();
                        let mut local = 0.0;
                        while (j as f64) * output_resolution < duration - 1e-9 * output_resolution {
                            let next = j as f64 * output_resolution;
                            x = nonlinear_ct_flow(&x, g, f, next - local, dt).map_err(wrap)?;
                            local = next;
                            push(&mut samples, t0 + next, &x)?;
                            j += 1;
                        }
                        x = nonlinear_ct_flow(&x, g, f, duration - local, dt).map_err(wrap)?;
                    }
                }
                t0 += duration;
                push(&mut samples, t0, &x)?;
            }
            (Segment::Dt { steps, .. }, kind) => {
                for k in 1..=*steps {
                    x = match kind {
                        ProtocolKind::Linear => dt_step(&x, l, protocol.h()).map_err(wrap)?,
                        ProtocolKind::Nonlinear(f) => {
                            let u = nonlinear_input(&x, g, f, protocol.h(), Mode::Dt)
                                .map_err(wrap)?;
                            &x + u
                        }
                    };
                    push(&mut samples, t0 + k as f64, &x)?;
                }
                t0 += *steps as f64;
            }
        }
    }

    Ok(Trajectory {
        samples,
        h: protocol.h(),
        schedule_digest: schedule.digest(),
    })
}
