use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{has_directed_spanning_tree, Laplacian};
use crate::linalg::{self, norm_inf};
use crate::{Error, Result};

/// Relative tolerance for declaring an eigenvalue zero.
pub const ZERO_TOL_REL: f64 = 1e-9;
/// Imaginary parts below this (relative) are discarded as rounding.
const IMAG_TOL_REL: f64 = 1e-10;

/// Laplacian eigenvalues sorted by real part, then imaginary part.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<Complex64>,
    zero_tol: f64,
}

impl Spectrum {
    /// Builds a spectrum from raw eigenvalues of a matrix whose infinity
    /// norm is `scale`. Values within the zero tolerance are snapped to 0
    /// and negligible imaginary parts dropped.
    pub fn from_eigenvalues(values: Vec<Complex64>, scale: f64) -> Self {
        let scale = scale.max(1.0);
        let zero_tol = ZERO_TOL_REL * scale;
        let mut eigenvalues: Vec<Complex64> = values
            .into_iter()
            .map(|z| {
                if z.norm() < zero_tol {
                    Complex64::new(0.0, 0.0)
                } else if z.im.abs() < IMAG_TOL_REL * scale {
                    Complex64::new(z.re, 0.0)
                } else {
                    z
                }
            })
            .collect();
        eigenvalues.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        Self {
            eigenvalues,
            zero_tol,
        }
    }

    /// Convenience for real spectra (tests, hand-built inputs).
    pub fn from_real(values: &[f64]) -> Self {
        let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Self::from_eigenvalues(
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            scale,
        )
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn zero_tol(&self) -> f64 {
        self.zero_tol
    }

    pub fn is_real(&self) -> bool {
        self.eigenvalues.iter().all(|z| z.im == 0.0)
    }

    /// Real parts, in sorted order.
    pub fn real_parts(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|z| z.re).collect()
    }

    pub fn zero_multiplicity(&self) -> usize {
        self.eigenvalues.iter().filter(|z| z.norm() == 0.0).count()
    }

    pub fn nonzero(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.eigenvalues.iter().copied().filter(|z| z.norm() != 0.0)
    }

    /// Real part of the second-smallest eigenvalue (0 for `n = 1`).
    pub fn lambda2(&self) -> f64 {
        self.eigenvalues.get(1).map_or(0.0, |z| z.re)
    }

    /// Real part of the largest eigenvalue.
    pub fn lambda_n(&self) -> f64 {
        self.eigenvalues.last().map_or(0.0, |z| z.re)
    }

    pub fn trace(&self) -> Complex64 {
        self.eigenvalues.iter().sum()
    }
}

/// All `n` eigenvalues of the Laplacian. Symmetric input goes through the
/// symmetric solver and comes back real.
pub fn spectrum(l: &Laplacian) -> Result<Spectrum> {
    let m = l.matrix();
    let scale = norm_inf(m);
    let values = if l.is_symmetric() {
        linalg::symmetric_eigenvalues(m)?
            .into_iter()
            .map(|v| Complex64::new(v, 0.0))
            .collect()
    } else {
        linalg::eigenvalues(m)?
    };
    Ok(Spectrum::from_eigenvalues(values, scale))
}

/// Normalised left null vector of a Laplacian: `wᵀL = 0`, `wᵀ1 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeftEigenvector {
    w: DVector<f64>,
}

impl LeftEigenvector {
    pub fn as_vector(&self) -> &DVector<f64> {
        &self.w
    }

    pub fn weights(&self) -> &[f64] {
        self.w.as_slice()
    }

    /// `wᵀ x`.
    pub fn weighted_value(&self, x: &DVector<f64>) -> f64 {
        self.w.dot(x)
    }

    /// `‖wᵀL‖∞`.
    pub fn residual(&self, l: &Laplacian) -> f64 {
        (self.w.transpose() * l.matrix())
            .iter()
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// The unique `w` with `wᵀL = 0`, `wᵀ1 = 1`.
///
/// `w` vanishes outside the root component (the unique source component
/// of the condensation), so only that irreducible block is solved. Within
/// it one column equation of `L_CCᵀ w = 0` is replaced by the
/// normalisation `1ᵀw = 1`.
pub fn left_eigenvector(l: &Laplacian) -> Result<LeftEigenvector> {
    let g = l.source();
    let n = l.n();
    if !has_directed_spanning_tree(g) {
        return Err(Error::NoSpanningTree {
            sources: g.source_components(),
        });
    }
    let roots = g.spanning_tree_roots();
    let k = roots.len();
    let m = l.matrix();

    let mut system = DMatrix::from_fn(k, k, |r, c| m[(roots[c], roots[r])]);
    for c in 0..k {
        system[(k - 1, c)] = 1.0;
    }
    let mut rhs = DVector::zeros(k);
    rhs[k - 1] = 1.0;
    let sol = system
        .lu()
        .solve(&rhs)
        .ok_or(Error::ZeroMultiplicity { multiplicity: 2 })?;

    let mut w = DVector::zeros(n);
    for (idx, &v) in roots.iter().enumerate() {
        w[v] = sol[idx];
    }
    if w.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            context: "left eigenvector".into(),
            time: None,
        });
    }
    let out = LeftEigenvector { w };
    let tol = 1e-9 * norm_inf(m).max(1.0);
    if out.residual(l) > tol || out.w.iter().any(|&v| v < -tol) {
        return Err(Error::ZeroMultiplicity { multiplicity: 2 });
    }
    Ok(out)
}
