//! Admissible sampling periods and exponential decay certificates.
//!
//! All bounds are exclusive suprema: a certificate is only issued for
//! `0 < h < h_max`.
//!
//! The per-step DT factor reported as `dt_contraction` is the exact
//! `max_{λ≠0} (1 − hλ)²` over every topology in the set. The factor
//! obtained from `λ₂` alone, `1 − 2hλ₂ + h²λ₂²`, is kept alongside as
//! `lambda2_step_factor`: it is not an upper bound on the per-step decrease
//! once `h(λ₂ + λₙ) > 2`, so it never enters the decay rate.

use serde_json::{json, Value};

use crate::fmt::sig;
use crate::graph::{build_laplacian, has_directed_spanning_tree, spectrum, Graph, Spectrum};
use crate::{Error, Result};

/// Safety factor applied to a certified bound when `h` is chosen
/// automatically.
pub const AUTO_H_FACTOR: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regime {
    /// One undirected connected topology, linear protocol.
    UndirectedFixed,
    /// One directed topology with a directed spanning tree, linear protocol.
    DirectedFixed,
    /// Several undirected connected topologies, linear protocol.
    UndirectedSwitching,
    /// Undirected connected topologies with a sector-bounded coupling
    /// `γ₁x ≤ f(x) ≤ γ₂x`.
    NonlinearSwitching { gamma1: f64, gamma2: f64 },
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::UndirectedFixed => "undirected-fixed",
            Regime::DirectedFixed => "directed-fixed",
            Regime::UndirectedSwitching => "undirected-switching",
            Regime::NonlinearSwitching { .. } => "nonlinear-switching",
        }
    }

    /// Picks the regime whose hypotheses match the shape of the topology
    /// set. Structural hypotheses (connectivity, spanning tree) are checked
    /// later by [`certify`].
    pub fn infer(graphs: &[Graph], sector: Option<(f64, f64)>) -> Result<Self> {
        if graphs.is_empty() {
            return Err(Error::EmptyTopologySet);
        }
        let all_undirected = graphs.iter().all(Graph::is_undirected);
        if let Some((gamma1, gamma2)) = sector {
            if !all_undirected {
                return Err(Error::Unsupported(
                    "nonlinear protocol is only certified on undirected topologies".into(),
                ));
            }
            return Ok(Regime::NonlinearSwitching { gamma1, gamma2 });
        }
        match (graphs.len(), all_undirected) {
            (1, true) => Ok(Regime::UndirectedFixed),
            (1, false) => Ok(Regime::DirectedFixed),
            (_, true) => Ok(Regime::UndirectedSwitching),
            (_, false) => Err(Error::Unsupported(
                "switching among directed topologies has no certified bound".into(),
            )),
        }
    }
}

/// How the consensus value follows from the initial state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueRule {
    /// `x* = mean(x(0))`.
    Average,
    /// `x* = wᵀx(0)` with `w` the normalised left null vector of `L`.
    WWeighted,
}

impl ValueRule {
    pub fn name(&self) -> &'static str {
        match self {
            ValueRule::Average => "average",
            ValueRule::WWeighted => "w-weighted",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport {
    pub regime: Regime,
    /// The sampling period the certificate was evaluated at.
    pub h: f64,
    pub h_max: f64,
    pub gershgorin_h: Option<f64>,
    /// Guaranteed rate `r` with `V(t) ≤ e^{−2rt} V(0)`.
    pub decay_rate: Option<f64>,
    /// Worst per-DT-step factor on `V = δᵀδ`.
    pub dt_contraction: Option<f64>,
    /// Smallest algebraic connectivity over the topology set.
    pub lambda2_min: Option<f64>,
    /// `max_s (1 − hλ₂(L_s))²`: the per-step factor from `λ₂` alone, worst
    /// topology.
    pub lambda2_step_factor: Option<f64>,
    /// `min_s (1 − hλ₂(L_s))²`: the same factor at the best topology.
    pub lambda2_step_factor_best: Option<f64>,
    pub consensus_value_rule: ValueRule,
}

impl CertificateReport {
    /// Flat `key = value` block, 6 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| out.push_str(&format!("{k} = {v}\n"));
        line("regime", self.regime.name().to_string());
        if let Regime::NonlinearSwitching { gamma1, gamma2 } = self.regime {
            line("gamma1", sig(gamma1, 6));
            line("gamma2", sig(gamma2, 6));
        }
        line("h", sig(self.h, 6));
        line("h_max", sig(self.h_max, 6));
        let opt = [
            ("gershgorin_h", self.gershgorin_h),
            ("decay_rate", self.decay_rate),
            ("dt_contraction", self.dt_contraction),
            ("lambda2_min", self.lambda2_min),
            ("lambda2_step_factor", self.lambda2_step_factor),
            ("lambda2_step_factor_best", self.lambda2_step_factor_best),
        ];
        for (k, v) in opt {
            if let Some(v) = v {
                line(k, sig(v, 6));
            }
        }
        line(
            "consensus_value_rule",
            self.consensus_value_rule.name().to_string(),
        );
        line(
            "note",
            "bounds are exclusive; choose h strictly below h_max".to_string(),
        );
        out
    }

    /// One JSON object, full precision. Absent fields are `null`.
    pub fn to_json(&self) -> Value {
        let (g1, g2) = match self.regime {
            Regime::NonlinearSwitching { gamma1, gamma2 } => (Some(gamma1), Some(gamma2)),
            _ => (None, None),
        };
        json!({
            "regime": self.regime.name(),
            "gamma1": g1,
            "gamma2": g2,
            "h": self.h,
            "h_max": self.h_max,
            "gershgorin_h": self.gershgorin_h,
            "decay_rate": self.decay_rate,
            "dt_contraction": self.dt_contraction,
            "lambda2_min": self.lambda2_min,
            "lambda2_step_factor": self.lambda2_step_factor,
            "lambda2_step_factor_best": self.lambda2_step_factor_best,
            "consensus_value_rule": self.consensus_value_rule.name(),
        })
    }
}

fn need_two_agents(s: &Spectrum) -> Result<()> {
    if s.len() < 2 {
        return Err(Error::InvalidParameter(
            "sampling-period bounds need at least two agents".into(),
        ));
    }
    Ok(())
}

/// `2/λₙ` for the real spectrum of an undirected connected graph.
pub fn undirected_bound(s: &Spectrum) -> Result<f64> {
    need_two_agents(s)?;
    if let Some(z) = s.eigenvalues().iter().find(|z| z.im != 0.0) {
        return Err(Error::ComplexSpectrum { re: z.re, im: z.im });
    }
    if s.lambda2() <= s.zero_tol() {
        return Err(Error::NotConnected {
            components: Vec::new(),
        });
    }
    Ok(2.0 / s.lambda_n())
}

/// `1 / max_i d_ii`, the spectrum-free bound from Geršgorin discs.
pub fn gershgorin_bound(g: &Graph) -> Result<f64> {
    let comps = g.components()?;
    if comps.len() > 1 {
        return Err(Error::NotConnected { components: comps });
    }
    let d = g.max_degree();
    if d <= 0.0 {
        return Err(Error::InvalidGraph("all degrees are zero".into()));
    }
    Ok(1.0 / d)
}

/// `min_{λ≠0} 2 Re(λ)/|λ|²`. The zero eigenvalue is excluded; it must be
/// simple.
pub fn directed_bound(s: &Spectrum) -> Result<f64> {
    need_two_agents(s)?;
    let zeros = s.zero_multiplicity();
    if zeros != 1 {
        return Err(Error::ZeroMultiplicity {
            multiplicity: zeros,
        });
    }
    let mut bound = f64::INFINITY;
    for z in s.nonzero() {
        if z.re <= 0.0 {
            return Err(Error::NonPositiveRealPart { re: z.re, im: z.im });
        }
        bound = bound.min(2.0 * z.re / z.norm_sqr());
    }
    Ok(bound)
}

/// `min_s 2/λₙ(L_s)` over a set of undirected connected topologies.
pub fn switching_bound(spectra: &[Spectrum]) -> Result<f64> {
    if spectra.is_empty() {
        return Err(Error::EmptyTopologySet);
    }
    spectra
        .iter()
        .map(undirected_bound)
        .try_fold(f64::INFINITY, |acc, b| Ok(acc.min(b?)))
}

fn check_sector(gamma1: f64, gamma2: f64) -> Result<()> {
    if gamma1.is_finite() && gamma2.is_finite() && 0.0 < gamma1 && gamma1 < gamma2 {
        Ok(())
    } else {
        Err(Error::SectorOrder { gamma1, gamma2 })
    }
}

/// `(γ₁/γ₂²) · min_s 2/λₙ(L_s)`.
pub fn nonlinear_bound(spectra: &[Spectrum], gamma1: f64, gamma2: f64) -> Result<f64> {
    check_sector(gamma1, gamma2)?;
    Ok(gamma1 / (gamma2 * gamma2) * switching_bound(spectra)?)
}

/// `max_s max_{λ≠0} (1 − hλ)²`, the exact worst per-step factor on
/// `δᵀδ` for symmetric Laplacians. No admissibility check.
pub fn dt_contraction_factor(spectra: &[Spectrum], h: f64) -> f64 {
    spectra
        .iter()
        .flat_map(|s| s.nonzero())
        .map(|z| (1.0 - h * z.re).powi(2))
        .fold(0.0, f64::max)
}

fn check_h(h: f64, bound: f64) -> Result<()> {
    if h.is_finite() && h > 0.0 && h < bound {
        Ok(())
    } else {
        Err(Error::SamplingPeriod { h, bound })
    }
}

/// Fills the certificate for the regime at sampling period `h`.
///
/// Fixed regimes take exactly one spectrum; switching regimes take one per
/// topology. Fails with [`Error::SamplingPeriod`] when `h` is not strictly
/// inside the admissible interval.
pub fn decay_certificate(spectra: &[Spectrum], h: f64, regime: Regime) -> Result<CertificateReport> {
    if spectra.is_empty() {
        return Err(Error::EmptyTopologySet);
    }
    let fixed = matches!(regime, Regime::UndirectedFixed | Regime::DirectedFixed);
    if fixed && spectra.len() != 1 {
        return Err(Error::InvalidParameter(format!(
            "{} expects one topology, got {}",
            regime.name(),
            spectra.len()
        )));
    }

    let mut report = CertificateReport {
        regime,
        h,
        h_max: 0.0,
        gershgorin_h: None,
        decay_rate: None,
        dt_contraction: None,
        lambda2_min: None,
        lambda2_step_factor: None,
        lambda2_step_factor_best: None,
        consensus_value_rule: ValueRule::Average,
    };

    match regime {
        Regime::DirectedFixed => {
            report.h_max = directed_bound(&spectra[0])?;
            check_h(h, report.h_max)?;
            report.consensus_value_rule = ValueRule::WWeighted;
            return Ok(report);
        }
        Regime::UndirectedFixed | Regime::UndirectedSwitching => {
            report.h_max = switching_bound(spectra)?;
        }
        Regime::NonlinearSwitching { gamma1, gamma2 } => {
            report.h_max = nonlinear_bound(spectra, gamma1, gamma2)?;
        }
    }
    check_h(h, report.h_max)?;

    let lambda2: Vec<f64> = spectra.iter().map(Spectrum::lambda2).collect();
    let lambda2_min = lambda2.iter().copied().fold(f64::INFINITY, f64::min);
    let step = |l2: f64| (1.0 - h * l2).powi(2);
    report.lambda2_min = Some(lambda2_min);
    report.lambda2_step_factor = Some(lambda2.iter().map(|&l| step(l)).fold(0.0, f64::max));
    report.lambda2_step_factor_best = Some(
        lambda2
            .iter()
            .map(|&l| step(l))
            .fold(f64::INFINITY, f64::min),
    );

    if !matches!(regime, Regime::NonlinearSwitching { .. }) {
        let kappa = dt_contraction_factor(spectra, h);
        report.dt_contraction = Some(kappa);
        // ln(0) = −∞ for a deadbeat step, leaving the CT rate in charge.
        report.decay_rate = Some(lambda2_min.min(-kappa.ln() / 2.0));
    }
    Ok(report)
}

/// Checks the structural hypotheses of `regime` on `graphs`, computes their
/// spectra, and issues the certificate at `h` (default: 0.9 × `h_max`).
/// Undirected regimes also carry the Geršgorin bound, scaled by `γ₁/γ₂²`
/// in the nonlinear case.
pub fn certify(graphs: &[Graph], regime: Regime, h: Option<f64>) -> Result<CertificateReport> {
    if graphs.is_empty() {
        return Err(Error::EmptyTopologySet);
    }
    let undirected = !matches!(regime, Regime::DirectedFixed);
    for g in graphs {
        if undirected {
            let comps = g.components()?;
            if comps.len() > 1 {
                return Err(Error::NotConnected { components: comps });
            }
        } else if !has_directed_spanning_tree(g) {
            return Err(Error::NoSpanningTree {
                sources: g.source_components(),
            });
        }
    }
    let spectra = graphs
        .iter()
        .map(|g| spectrum(&build_laplacian(g)))
        .collect::<Result<Vec<_>>>()?;

    let h = match h {
        Some(h) => h,
        None => {
            let bound = match regime {
                Regime::DirectedFixed => directed_bound(&spectra[0])?,
                Regime::UndirectedFixed | Regime::UndirectedSwitching => switching_bound(&spectra)?,
                Regime::NonlinearSwitching { gamma1, gamma2 } => {
                    nonlinear_bound(&spectra, gamma1, gamma2)?
                }
            };
            AUTO_H_FACTOR * bound
        }
    };

    let mut report = decay_certificate(&spectra, h, regime)?;
    if undirected {
        let mut gersh = graphs
            .iter()
            .map(gershgorin_bound)
            .try_fold(f64::INFINITY, |acc, b| Ok::<_, Error>(acc.min(b?)))?;
        if let Regime::NonlinearSwitching { gamma1, gamma2 } = regime {
            gersh *= gamma1 / (gamma2 * gamma2);
        }
        report.gershgorin_h = Some(gersh);
    }
    Ok(report)
}
