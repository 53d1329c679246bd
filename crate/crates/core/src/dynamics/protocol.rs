use std::fmt;
use std::sync::Arc;

use crate::{Error, Result};

/// Default internal RK4 step for nonlinear CT segments.
pub const DEFAULT_DT_INTERNAL: f64 = 1e-3;

/// Odd-sign tolerance `|f(x) + f(−x)|` used by the probe check.
const ODD_TOL: f64 = 1e-9;
/// Relative slack on the sector inequalities, to absorb rounding in `f`.
const SECTOR_SLACK: f64 = 1e-12;

/// A coupling nonlinearity `f` with its declared sector `[γ₁, γ₂]`.
#[derive(Clone)]
pub struct Coupling {
    label: String,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    gamma1: f64,
    gamma2: f64,
}

impl fmt::Debug for Coupling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Coupling")
            .field("label", &self.label)
            .field("gamma1", &self.gamma1)
            .field("gamma2", &self.gamma2)
            .finish()
    }
}

impl Coupling {
    pub fn new(
        label: impl Into<String>,
        gamma1: f64,
        gamma2: f64,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            f: Arc::new(f),
            gamma1,
            gamma2,
        }
    }

    /// `f(x) = x`. Its sector is degenerate, so it is only useful for
    /// exercising the nonlinear kernels against the linear ones.
    pub fn identity() -> Self {
        Self::new("identity", 1.0, 1.0, |x| x)
    }

    /// `f(x) = a·x + b·x/(1+|x|)`, whose ratio `f(x)/x` sweeps `(a, a+b]`,
    /// so it lies in the sector `[a, a+b]`.
    pub fn family(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a > 0.0 && b >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "coupling family needs a > 0 and b >= 0 (got a = {a}, b = {b})"
            )));
        }
        Ok(Self::new(
            format!("{a}*x + {b}*x/(1+|x|)"),
            a,
            a + b,
            move |x| a * x + b * x / (1.0 + x.abs()),
        ))
    }

    /// The family member that spans exactly `[γ₁, γ₂]`.
    pub fn from_sector(gamma1: f64, gamma2: f64) -> Result<Self> {
        if !(gamma1 > 0.0 && gamma1 < gamma2 && gamma2.is_finite()) {
            return Err(Error::SectorOrder { gamma1, gamma2 });
        }
        Self::family(gamma1, gamma2 - gamma1)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn gamma1(&self) -> f64 {
        self.gamma1
    }

    pub fn gamma2(&self) -> f64 {
        self.gamma2
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }
}

#[derive(Debug, Clone)]
pub enum ProtocolKind {
    Linear,
    Nonlinear(Coupling),
}

/// The consensus protocol: linear or sector-bounded nonlinear coupling, with
/// the DT sampling period `h`.
#[derive(Debug, Clone)]
pub struct ProtocolSpec {
    kind: ProtocolKind,
    h: f64,
    dt_internal: f64,
}

fn check_period(h: f64) -> Result<()> {
    if h.is_finite() && h > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "sampling period must be positive, got {h}"
        )))
    }
}

impl ProtocolSpec {
    pub fn linear(h: f64) -> Result<Self> {
        check_period(h)?;
        Ok(Self {
            kind: ProtocolKind::Linear,
            h,
            dt_internal: DEFAULT_DT_INTERNAL,
        })
    }

    /// Nonlinear protocol; the coupling must pass
    /// [`validate_protocol_function`] on the default probe grid.
    pub fn nonlinear(h: f64, coupling: Coupling) -> Result<Self> {
        check_period(h)?;
        let report = validate_protocol_function(
            &|x| coupling.eval(x),
            coupling.gamma1(),
            coupling.gamma2(),
            ProbeRange::default(),
        )?;
        if let Some(v) = report.violation {
            return Err(Error::CouplingRejected(v.to_string()));
        }
        Ok(Self {
            kind: ProtocolKind::Nonlinear(coupling),
            h,
            dt_internal: DEFAULT_DT_INTERNAL,
        })
    }

    /// Nonlinear protocol without the probe check. Used to run the linear
    /// special case `f = identity` through the nonlinear kernels.
    pub fn nonlinear_unchecked(h: f64, coupling: Coupling) -> Result<Self> {
        check_period(h)?;
        Ok(Self {
            kind: ProtocolKind::Nonlinear(coupling),
            h,
            dt_internal: DEFAULT_DT_INTERNAL,
        })
    }

    pub fn with_dt_internal(mut self, dt_internal: f64) -> Result<Self> {
        if !(dt_internal.is_finite() && dt_internal > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "internal step must be positive, got {dt_internal}"
            )));
        }
        self.dt_internal = dt_internal;
        Ok(self)
    }

    pub fn kind(&self) -> &ProtocolKind {
        &self.kind
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn dt_internal(&self) -> f64 {
        self.dt_internal
    }
}

/// Positive probe points, log-spaced over `[lo, hi]`; each is also checked
/// at `−x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeRange {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Default for ProbeRange {
    fn default() -> Self {
        Self {
            lo: 1e-6,
            hi: 1e3,
            count: 400,
        }
    }
}

impl ProbeRange {
    fn points(&self) -> impl Iterator<Item = f64> + '_ {
        let (a, b) = (self.lo.ln(), self.hi.ln());
        let last = (self.count - 1) as f64;
        (0..self.count).map(move |k| (a + (b - a) * k as f64 / last).exp())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Assumption {
    /// `f(0) = 0`.
    ZeroAtOrigin,
    /// `f(−x) = −f(x)`.
    Odd,
    /// `γ₁x ≤ f(x)`.
    LowerSector,
    /// `f(x) ≤ γ₂x`.
    UpperSector,
}

/// A probe point where `f` broke one of the assumptions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub assumption: Assumption,
    pub x: f64,
    pub fx: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.assumption {
            Assumption::ZeroAtOrigin => "f(0) != 0",
            Assumption::Odd => "f(x) + f(-x) != 0",
            Assumption::LowerSector => "f(x) < gamma1 * x",
            Assumption::UpperSector => "f(x) > gamma2 * x",
        };
        write!(f, "{what} at x = {} (f(x) = {})", self.x, self.fx)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub passed: bool,
    pub probes: usize,
    /// First violation found, if any.
    pub violation: Option<Violation>,
}

impl ValidationReport {
    /// Sampling is evidence, never a proof of the sector condition.
    pub const CAVEAT: &'static str =
        "probe sampling is evidence only; it does not prove the assumptions hold between probes";
}

/// Probes `f` for `f(0) = 0`, oddness, and `γ₁x ≤ f(x) ≤ γ₂x` on `x > 0`.
pub fn validate_protocol_function(
    f: &dyn Fn(f64) -> f64,
    gamma1: f64,
    gamma2: f64,
    range: ProbeRange,
) -> Result<ValidationReport> {
    if !(gamma1 > 0.0 && gamma1 < gamma2 && gamma2.is_finite()) {
        return Err(Error::SectorOrder { gamma1, gamma2 });
    }
    if range.count < 100 {
        return Err(Error::InvalidParameter(format!(
            "need at least 100 probes, got {}",
            range.count
        )));
    }
    if !(range.lo > 0.0 && range.lo < range.hi && range.hi.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "probe range must satisfy 0 < lo < hi (got [{}, {}])",
            range.lo, range.hi
        )));
    }

    let fail = |assumption, x: f64, fx: f64| ValidationReport {
        passed: false,
        probes: range.count,
        violation: Some(Violation { assumption, x, fx }),
    };

    let f0 = f(0.0);
    if f0.abs() >= 1e-12 || !f0.is_finite() {
        return Ok(fail(Assumption::ZeroAtOrigin, 0.0, f0));
    }
    for x in range.points() {
        let fx = f(x);
        let fneg = f(-x);
        let odd_gap = (fx + fneg).abs();
        // Written so that a NaN from `f` fails each check.
        if odd_gap.is_nan() || odd_gap >= ODD_TOL {
            return Ok(fail(Assumption::Odd, x, fx));
        }
        if fx.is_nan() || fx < gamma1 * x * (1.0 - SECTOR_SLACK) {
            return Ok(fail(Assumption::LowerSector, x, fx));
        }
        if fx > gamma2 * x * (1.0 + SECTOR_SLACK) {
            return Ok(fail(Assumption::UpperSector, x, fx));
        }
    }
    Ok(ValidationReport {
        passed: true,
        probes: range.count,
        violation: None,
    })
}
