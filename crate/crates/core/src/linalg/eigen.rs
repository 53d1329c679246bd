use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Sub, SubAssign};

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::dd::Dd;

use crate::scc::condensation;
use crate::{Error, Result};

/// Sweeps allowed per eigenvalue before the QR iteration gives up.
const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

/// Two eigenvalues of a block closer than this (relative to the block's
/// norm) send the block back through QR in double-double arithmetic.
const CLUSTER_REL: f64 = 1e-3;

/// Arithmetic the QR kernel needs; implemented for `f64` and double-double.
trait Real:
    nalgebra::Scalar
    + Copy
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
{
    /// Unit roundoff of the representation.
    const EPSILON: f64;
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn abs(self) -> Self;
    fn sqrt(self) -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }
}

impl Real for f64 {
    const EPSILON: f64 = f64::EPSILON;

    fn from_f64(x: f64) -> Self {
        x
    }

    fn to_f64(self) -> f64 {
        self
    }

    fn abs(self) -> Self {
        f64::abs(self)
    }

    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
}

impl Real for Dd {
    const EPSILON: f64 = 4.930380657631324e-32; // 2^-104

    fn from_f64(x: f64) -> Self {
        Dd::from(x)
    }

    fn to_f64(self) -> f64 {
        Dd::to_f64(self)
    }

    fn abs(self) -> Self {
        Dd::abs(self)
    }

    fn sqrt(self) -> Self {
        Dd::sqrt(self)
    }
}

/// Eigenvalues of a symmetric matrix (unsorted order is ascending).
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    check_finite(m)?;
    let n = m.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let eig = nalgebra::SymmetricEigen::try_new(m.clone(), f64::EPSILON, 0)
        .ok_or(Error::NoConvergence { iterations: 0 })?;
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

/// Eigenvalues of a general real square matrix.
///
/// The matrix is first permuted to block upper-triangular form along the
/// strongly connected components of its off-diagonal sparsity pattern; each
/// diagonal block is then reduced to Hessenberg form and iterated with
/// Francis double-shift QR. Splitting first isolates the eigenvalues that
/// sit on reducible structure (chains, leader-follower trees) exactly,
/// where a full QR sweep would smear Jordan blocks across components.
pub fn eigenvalues(m: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    check_finite(m)?;
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: m.ncols(),
        });
    }
    let succ: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| j != i && m[(i, j)] != 0.0).collect())
        .collect();
    let cond = condensation(&succ);

    let mut out = Vec::with_capacity(n);
    for comp in &cond.components {
        match comp.len() {
            1 => out.push(Complex64::new(m[(comp[0], comp[0])], 0.0)),
            k => {
                let block = DMatrix::from_fn(k, k, |r, c| m[(comp[r], comp[c])]);
                out.extend(dense_eigenvalues(block)?);
            }
        }
    }
    Ok(out)
}

fn check_finite(m: &DMatrix<f64>) -> Result<()> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite {
            context: "eigenvalue input".into(),
            time: None,
        })
    }
}

/// Eigenvalues of one irreducible block.
///
/// A defective eigenvalue of multiplicity `k` is only determined to about
/// `ε^(1/k)` by any backward-stable method, which in double precision is
/// `1e-8` for a double root. When the double-precision pass returns a
/// cluster, the block is solved again in double-double, where the same
/// loss leaves `1e-16` for double roots and `1e-11` for triple ones.
fn dense_eigenvalues(block: DMatrix<f64>) -> Result<Vec<Complex64>> {
    let scale = super::norm_inf(&block).max(f64::MIN_POSITIVE);
    let values = qr_eigenvalues(block.clone())?;
    let clustered = values.iter().enumerate().any(|(i, a)| {
        values[i + 1..]
            .iter()
            .any(|b| (a - b).norm() < CLUSTER_REL * scale)
    });
    if !clustered {
        return Ok(values);
    }
    qr_eigenvalues(block.map(Dd::from))
}

/// Householder reduction to upper Hessenberg form, in place.
fn hessenberg<T: Real>(h: &mut DMatrix<T>) {
    let n = h.nrows();
    if n < 3 {
        return;
    }
    let high = n - 1;
    let mut ort = vec![T::zero(); n];
    for m in 1..high {
        let scale = (m..=high).fold(T::zero(), |acc, i| acc + h[(i, m - 1)].abs());
        if scale == T::zero() {
            continue;
        }
        let mut hh = T::zero();
        for i in (m..=high).rev() {
            ort[i] = h[(i, m - 1)] / scale;
            hh += ort[i] * ort[i];
        }
        let mut g = hh.sqrt();
        if ort[m] > T::zero() {
            g = T::zero() - g;
        }
        hh -= ort[m] * g;
        ort[m] -= g;

        for j in m..n {
            let mut f = T::zero();
            for i in (m..=high).rev() {
                f += ort[i] * h[(i, j)];
            }
            f /= hh;
            for i in m..=high {
                h[(i, j)] -= f * ort[i];
            }
        }
        for i in 0..=high {
            let mut f = T::zero();
            for j in (m..=high).rev() {
                f += ort[j] * h[(i, j)];
            }
            f /= hh;
            for j in m..=high {
                h[(i, j)] -= f * ort[j];
            }
        }
        ort[m] *= scale;
        h[(m, m - 1)] = scale * g;
        for i in m + 1..=high {
            h[(i, m - 1)] = T::zero();
        }
    }
}

/// Eigenvalues of a dense block via Hessenberg reduction and shifted QR.
fn qr_eigenvalues<T: Real>(mut h: DMatrix<T>) -> Result<Vec<Complex64>> {
    let nn = h.nrows();
    hessenberg(&mut h);

    let zero = T::zero();
    let two = T::from_f64(2.0);
    let mut re = vec![zero; nn];
    let mut im = vec![zero; nn];
    let eps = T::from_f64(T::EPSILON);
    let mut exshift = zero;
    let (mut p, mut q, mut r, mut s, mut z);
    let (mut x, mut y, mut w);

    let mut norm = zero;
    for i in 0..nn {
        for j in i.saturating_sub(1)..nn {
            norm += h[(i, j)].abs();
        }
    }

    let max_iter = MAX_SWEEPS_PER_EIGENVALUE * nn.max(1);
    let mut total_iter = 0usize;
    let mut iter = 0usize;
    // `n` is the index of the active trailing row; signed so it can pass 0.
    let mut n = nn as isize - 1;
    while n >= 0 {
        let nu = n as usize;
        let mut l = nu;
        while l > 0 {
            s = h[(l - 1, l - 1)].abs() + h[(l, l)].abs();
            if s == zero {
                s = norm;
            }
            if h[(l, l - 1)].abs() < eps * s {
                break;
            }
            l -= 1;
        }

        if l == nu {
            re[nu] = h[(nu, nu)] + exshift;
            im[nu] = zero;
            n -= 1;
            iter = 0;
        } else if l + 1 == nu {
            w = h[(nu, nu - 1)] * h[(nu - 1, nu)];
            p = (h[(nu - 1, nu - 1)] - h[(nu, nu)]) / two;
            q = p * p + w;
            z = q.abs().sqrt();
            x = h[(nu, nu)] + exshift;
            if q >= zero {
                z = if p >= zero { p + z } else { p - z };
                re[nu - 1] = x + z;
                re[nu] = if z != zero { x - w / z } else { x + z };
                im[nu - 1] = zero;
                im[nu] = zero;
            } else {
                re[nu - 1] = x + p;
                re[nu] = x + p;
                im[nu - 1] = z;
                im[nu] = zero - z;
            }
            n -= 2;
            iter = 0;
        } else {
            x = h[(nu, nu)];
            y = h[(nu - 1, nu - 1)];
            w = h[(nu, nu - 1)] * h[(nu - 1, nu)];

            // Exceptional shifts break cycles of the standard Francis shift.
            if iter == 10 {
                exshift += x;
                for i in 0..=nu {
                    h[(i, i)] -= x;
                }
                s = h[(nu, nu - 1)].abs() + h[(nu - 1, nu - 2)].abs();
                x = T::from_f64(0.75) * s;
                y = x;
                w = T::from_f64(-0.4375) * s * s;
            }
            if iter == 30 {
                s = (y - x) / two;
                s = s * s + w;
                if s > zero {
                    s = s.sqrt();
                    if y < x {
                        s = zero - s;
                    }
                    s = x - w / ((y - x) / two + s);
                    for i in 0..=nu {
                        h[(i, i)] -= s;
                    }
                    exshift += s;
                    x = T::from_f64(0.964);
                    y = x;
                    w = x;
                }
            }
            iter += 1;
            total_iter += 1;
            if total_iter > max_iter {
                return Err(Error::NoConvergence {
                    iterations: total_iter,
                });
            }

            // Look for two consecutive small subdiagonal elements.
            let mut m = nu - 2;
            loop {
                z = h[(m, m)];
                r = x - z;
                s = y - z;
                p = (r * s - w) / h[(m + 1, m)] + h[(m, m + 1)];
                q = h[(m + 1, m + 1)] - z - r - s;
                r = h[(m + 2, m + 1)];
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                if h[(m, m - 1)].abs() * (q.abs() + r.abs())
                    < eps * (p.abs() * (h[(m - 1, m - 1)].abs() + z.abs() + h[(m + 1, m + 1)].abs()))
                {
                    break;
                }
                m -= 1;
            }

            for i in m + 2..=nu {
                h[(i, i - 2)] = zero;
                if i > m + 2 {
                    h[(i, i - 3)] = zero;
                }
            }

            // Double QR step on rows l..=n and columns m..=n.
            let mut k = m;
            while k < nu {
                let notlast = k + 1 != nu;
                if k != m {
                    p = h[(k, k - 1)];
                    q = h[(k + 1, k - 1)];
                    r = if notlast { h[(k + 2, k - 1)] } else { zero };
                    x = p.abs() + q.abs() + r.abs();
                    if x == zero {
                        k += 1;
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }
                s = (p * p + q * q + r * r).sqrt();
                if p < zero {
                    s = zero - s;
                }
                if s != zero {
                    if k != m {
                        h[(k, k - 1)] = zero - s * x;
                    } else if l != m {
                        h[(k, k - 1)] = zero - h[(k, k - 1)];
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;

                    for j in k..nn {
                        p = h[(k, j)] + q * h[(k + 1, j)];
                        if notlast {
                            p += r * h[(k + 2, j)];
                            h[(k + 2, j)] -= p * z;
                        }
                        h[(k, j)] -= p * x;
                        h[(k + 1, j)] -= p * y;
                    }
                    for i in 0..=nu.min(k + 3) {
                        p = x * h[(i, k)] + y * h[(i, k + 1)];
                        if notlast {
                            p += z * h[(i, k + 2)];
                            h[(i, k + 2)] -= p * r;
                        }
                        h[(i, k)] -= p;
                        h[(i, k + 1)] -= p * q;
                    }
                }
                k += 1;
            }
        }
    }

    Ok(re
        .into_iter()
        .zip(im)
        .map(|(a, b)| Complex64::new(a.to_f64(), b.to_f64()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn triangular_chain_is_exact() {
        // Lower bidiagonal Laplacian of a directed chain: Jordan block at 1.
        let m = DMatrix::from_row_slice(
            4,
            4,
            &[
                0.0, 0.0, 0.0, 0.0, -1.0, 1.0, 0.0, 0.0, 0.0, -1.0, 1.0, 0.0, 0.0, 0.0, -1.0, 1.0,
            ],
        );
        let ev = sorted(eigenvalues(&m).unwrap());
        assert_eq!(ev[0], Complex64::new(0.0, 0.0));
        for e in &ev[1..] {
            assert_eq!(*e, Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn defective_double_root_is_resolved() {
        // Characteristic polynomial λ(λ − 2)², with the double root inside a
        // single strongly connected block carrying a Jordan chain.
        let m = DMatrix::from_row_slice(3, 3, &[2.0, -1.0, -1.0, 0.0, 1.0, -1.0, -1.0, 0.0, 1.0]);
        let plain = qr_eigenvalues(m.clone()).unwrap();
        assert!(plain.iter().any(|z| (z - 2.0).norm() > 1e-9), "{plain:?}");
        let v = sorted(eigenvalues(&m).unwrap());
        assert!(v[0].norm() < 1e-14);
        for z in &v[1..] {
            assert!((z - 2.0).norm() < 1e-13, "{z}");
        }
    }

    #[test]
    fn rotation_block_gives_conjugate_pair() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, -2.0, 2.0, 0.0]);
        let ev = sorted(eigenvalues(&m).unwrap());
        assert!((ev[0] - Complex64::new(0.0, -2.0)).norm() < 1e-14);
        assert!((ev[1] - Complex64::new(0.0, 2.0)).norm() < 1e-14);
    }

    #[test]
    fn companion_matrix_roots() {
        // x^4 - 10x^3 + 35x^2 - 50x + 24 = (x-1)(x-2)(x-3)(x-4)
        let m = DMatrix::from_row_slice(
            4,
            4,
            &[
                10.0, -35.0, 50.0, -24.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0,
                0.0,
            ],
        );
        let ev = sorted(eigenvalues(&m).unwrap());
        for (k, e) in ev.iter().enumerate() {
            assert!((e - Complex64::new(k as f64 + 1.0, 0.0)).norm() < 1e-10, "{e}");
        }
    }

    #[test]
    fn trace_and_count_on_dense_random() {
        let n = 9;
        let m = DMatrix::from_fn(n, n, |i, j| ((i * 7 + j * 13) % 11) as f64 - 5.0);
        let ev = eigenvalues(&m).unwrap();
        assert_eq!(ev.len(), n);
        let sum: Complex64 = ev.iter().sum();
        assert!((sum.re - m.trace()).abs() < 1e-9);
        assert!(sum.im.abs() < 1e-9);
    }

    #[test]
    fn rejects_non_finite() {
        let m = DMatrix::from_row_slice(2, 2, &[f64::NAN, 0.0, 0.0, 1.0]);
        assert!(eigenvalues(&m).is_err());
    }
}
