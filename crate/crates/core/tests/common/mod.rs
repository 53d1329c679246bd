//! Independent oracles and helpers shared by the integration suites.
//!
//! Nothing here goes through the crate's eigen-solver or Padé exponential:
//! characteristic polynomials come from exact Faddeev–LeVerrier on integer
//! matrices (or f64 for weighted graphs), roots from Durand–Kerner on the
//! square-free factors, and the exponential from a scaled Taylor series.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_rational::Ratio;

use switched_consensus::{Graph, ScheduleParams};

type Q = Ratio<i128>;
type Poly = Vec<Q>;

fn q(v: i128) -> Q {
    Q::from_integer(v)
}

fn trim(mut p: Poly) -> Poly {
    while p.last() == Some(&q(0)) {
        p.pop();
    }
    p
}

fn deriv(p: &Poly) -> Poly {
    trim(
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| *c * q(k as i128))
            .collect(),
    )
}

fn divrem(a: &Poly, b: &Poly) -> (Poly, Poly) {
    let b = trim(b.clone());
    assert!(!b.is_empty(), "division by zero polynomial");
    let mut r = trim(a.clone());
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut quot = vec![q(0); r.len() - b.len() + 1];
    let lead = *b.last().unwrap();
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let coef = *r.last().unwrap() / lead;
        quot[shift] = coef;
        for (k, bc) in b.iter().enumerate() {
            r[k + shift] -= coef * *bc;
        }
        r = trim(r);
    }
    (trim(quot), r)
}

fn monic(p: Poly) -> Poly {
    let lead = *p.last().unwrap();
    p.into_iter().map(|c| c / lead).collect()
}

fn gcd(a: &Poly, b: &Poly) -> Poly {
    let (mut a, mut b) = (trim(a.clone()), trim(b.clone()));
    while !b.is_empty() {
        let (_, r) = divrem(&a, &b);
        a = b;
        b = r;
    }
    monic(a)
}

/// Square-free decomposition `p = Π a_i^i` over ℚ.
fn square_free(p: &Poly) -> Vec<(Poly, usize)> {
    let mut out = Vec::new();
    let mut c = gcd(p, &deriv(p));
    let mut w = divrem(p, &c).0;
    let mut i = 1;
    while w.len() > 1 {
        let y = gcd(&w, &c);
        let z = divrem(&w, &y).0;
        if z.len() > 1 {
            out.push((monic(z), i));
        }
        i += 1;
        w = y.clone();
        c = divrem(&c, &y).0;
    }
    out
}

/// Exact `det(λI − A)` coefficients (low to high) of an integer matrix.
pub fn integer_char_poly(a: &[Vec<i128>]) -> Vec<i128> {
    let n = a.len();
    let mul = |x: &Vec<Vec<i128>>, y: &Vec<Vec<i128>>| -> Vec<Vec<i128>> {
        (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| x[i][k] * y[k][j]).sum()).collect())
            .collect()
    };
    let a: Vec<Vec<i128>> = a.to_vec();
    let mut c = vec![0i128; n + 1];
    c[n] = 1;
    let mut m = vec![vec![0i128; n]; n];
    for k in 1..=n {
        m = mul(&a, &m);
        for (i, row) in m.iter_mut().enumerate() {
            row[i] += c[n - k + 1];
        }
        let am = mul(&a, &m);
        let tr: i128 = (0..n).map(|i| am[i][i]).sum();
        assert_eq!(tr % k as i128, 0, "Faddeev–LeVerrier division must be exact");
        c[n - k] = -tr / k as i128;
    }
    c
}

/// `det(λI − A)` coefficients (low to high) in floating point.
pub fn float_char_poly(a: &DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    let mut c = vec![0.0; n + 1];
    c[n] = 1.0;
    let mut m = DMatrix::<f64>::zeros(n, n);
    for k in 1..=n {
        m = a * &m + DMatrix::identity(n, n) * c[n - k + 1];
        c[n - k] = -(a * &m).trace() / k as f64;
    }
    c
}

fn horner(p: &[Complex64], z: Complex64) -> Complex64 {
    p.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

/// Roots of a polynomial with simple roots (coefficients low to high).
pub fn simple_roots(p: &[f64]) -> Vec<Complex64> {
    let lead = *p.last().unwrap();
    let p: Vec<Complex64> = p.iter().map(|c| Complex64::new(c / lead, 0.0)).collect();
    let d = p.len() - 1;
    if d == 0 {
        return Vec::new();
    }
    if d == 1 {
        return vec![-p[0]];
    }
    let dp: Vec<Complex64> = p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * k as f64)
        .collect();
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..d).map(|k| seed.powu(k as u32 + 1)).collect();
    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for i in 0..d {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..d {
                if i != j {
                    denom *= z[i] - z[j];
                }
            }
            let step = horner(&p, z[i]) / denom;
            z[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-16 {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..5 {
            let d = horner(&dp, *zi);
            if d.norm() == 0.0 {
                break;
            }
            *zi -= horner(&p, *zi) / d;
        }
    }
    z
}

/// Eigenvalues of an integer matrix, with multiplicities resolved exactly
/// through the square-free factorisation of its characteristic polynomial.
pub fn integer_matrix_eigenvalues(a: &[Vec<i128>]) -> Vec<Complex64> {
    let cp: Poly = integer_char_poly(a).into_iter().map(q).collect();
    let mut out = Vec::new();
    for (factor, mult) in square_free(&cp) {
        let coeffs: Vec<f64> = factor
            .iter()
            .map(|r| *r.numer() as f64 / *r.denom() as f64)
            .collect();
        for root in simple_roots(&coeffs) {
            for _ in 0..mult {
                out.push(root);
            }
        }
    }
    out
}

/// Sorts by real part, then by imaginary part within runs of equal real
/// part (up to `tol`).
pub fn sort_eigenvalues(mut v: Vec<Complex64>, tol: f64) -> Vec<Complex64> {
    v.sort_by(|a, b| a.re.total_cmp(&b.re));
    let mut start = 0;
    while start < v.len() {
        let mut end = start + 1;
        while end < v.len() && (v[end].re - v[end - 1].re).abs() < tol {
            end += 1;
        }
        v[start..end].sort_by(|a, b| a.im.total_cmp(&b.im));
        start = end;
    }
    v
}

/// Largest distance between two eigenvalue multisets after sorting.
pub fn spectrum_distance(a: Vec<Complex64>, b: Vec<Complex64>) -> f64 {
    assert_eq!(a.len(), b.len());
    let a = sort_eigenvalues(a, 1e-6);
    let b = sort_eigenvalues(b, 1e-6);
    a.iter()
        .zip(&b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// `exp(A)` by Taylor series with scaling and squaring.
pub fn taylor_expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let norm = a.iter().fold(0.0f64, |m, v| m.max(v.abs())) * n as f64;
    let mut s = 0;
    while norm / 2f64.powi(s) > 0.25 {
        s += 1;
    }
    let scaled = a / 2f64.powi(s);
    let mut sum = DMatrix::identity(n, n);
    let mut term = DMatrix::identity(n, n);
    for k in 1..=30 {
        term = &term * &scaled / k as f64;
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// `exp(−L t_c) (I − hL)^{t_d} x0`, the closed-form fixed-topology state.
pub fn closed_form_state(l: &DMatrix<f64>, h: f64, t_c: f64, t_d: u64, x0: &DVector<f64>) -> DVector<f64> {
    let n = l.nrows();
    let step = DMatrix::identity(n, n) - l * h;
    let mut x = x0.clone();
    for _ in 0..t_d {
        x = &step * x;
    }
    taylor_expm(&(l * -t_c)) * x
}

/// Time for `V₀ e^{−2rt}` to fall below `(tol/4)²`, which keeps the spread
/// `≤ √(2V)` well under `tol`.
pub fn horizon(v0: f64, tol: f64, rate: f64) -> f64 {
    ((16.0 * v0 / (tol * tol)).ln() / (2.0 * rate)).max(1.0)
}

/// 20-segment schedule parameters whose shortest possible schedule still
/// covers `horizon`.
pub fn params_covering(horizon: f64, segments: usize, ids: &[&str]) -> ScheduleParams {
    let per = horizon / segments as f64;
    let steps = per.ceil().max(1.0) as u64;
    ScheduleParams {
        segments,
        ct_duration: (per, 2.0 * per),
        dt_steps: (steps, 2 * steps),
        ct_probability: 0.5,
        topology_ids: ids.iter().map(|s| s.to_string()).collect(),
    }
}

/// Unit-weight digraph from a bit mask over the ordered pairs `(i, j)`, `i ≠ j`.
pub fn digraph_from_mask(n: usize, mask: u64) -> Graph {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let edges: Vec<(usize, usize, f64)> = pairs
        .iter()
        .enumerate()
        .filter(|(k, _)| mask >> k & 1 == 1)
        .map(|(_, &(i, j))| (i, j, 1.0))
        .collect();
    Graph::directed(n, &edges).unwrap()
}

pub fn to_integer(m: &DMatrix<f64>) -> Vec<Vec<i128>> {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| {
                    let v = m[(i, j)];
                    assert_eq!(v.fract(), 0.0);
                    v as i128
                })
                .collect()
        })
        .collect()
}

/// Tiny xorshift for test-side randomness that must not share the crate's
/// generator.
pub struct XorShift(u64);

impl XorShift {
    pub fn new(seed: u64) -> Self {
        Self(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1)
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    /// Uniform in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }
}

/// Random connected undirected graph: a random spanning tree plus extra
/// edges with probability `p`, weights in `(0, 2]`.
pub fn random_connected(rng: &mut XorShift, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    let weight = |rng: &mut XorShift| 2.0 * (1.0 - rng.unit());
    for v in 1..n {
        let parent = rng.below(v);
        edges.push((parent, v, weight(rng)));
    }
    for i in 0..n {
        for j in i + 1..n {
            let exists = edges.iter().any(|&(a, b, _)| (a, b) == (i, j) || (a, b) == (j, i));
            if !exists && rng.unit() < p {
                edges.push((i, j, weight(rng)));
            }
        }
    }
    Graph::undirected(n, &edges).unwrap()
}

#[test]
fn oracle_self_checks() {
    // (x-1)^2 (x-2): square-free split recovers the double root exactly.
    let a = vec![vec![1, 1, 0], vec![0, 1, 0], vec![0, 0, 2]];
    assert_eq!(integer_char_poly(&a), vec![-2, 5, -4, 1]);
    let ev = sort_eigenvalues(integer_matrix_eigenvalues(&a), 1e-6);
    assert!((ev[0] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    assert!((ev[1] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    assert!((ev[2] - Complex64::new(2.0, 0.0)).norm() < 1e-14);

    let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
    let e = taylor_expm(&m);
    assert!((e[(0, 0)] - 1f64.cos()).abs() < 1e-14);
    assert!((e[(0, 1)] - 1f64.sin()).abs() < 1e-14);
}
