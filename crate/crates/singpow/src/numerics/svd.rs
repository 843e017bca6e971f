//! Double-precision SVD by one-sided Jacobi, generic over real and complex
//! scalars.
//!
//! One code path serves both element types. The scalar trait is written so
//! that a complex run whose imaginary parts are all ±0 performs bit-identical
//! real-part arithmetic to the real run: moduli of zero-imaginary values are
//! taken as |re| exactly (never via a rounded re²+im² square root), so the
//! rotation angles — and therefore every subsequent operation — coincide.

use crate::{Error, Result};
use num_complex::Complex64;

/// Scalar element of a double-precision matrix: `f64` or `Complex64`.
pub trait Scalar:
    Copy
    + PartialEq
    + std::fmt::Debug
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + 'static
{
    const ZERO: Self;
    fn conj(self) -> Self;
    /// Multiply by a real scalar.
    fn scale(self, r: f64) -> Self;
    /// Modulus. Exact (|re|) when the imaginary part is ±0.
    fn modulus(self) -> f64;
    fn is_finite_scalar(self) -> bool;
    fn from_re(r: f64) -> Self;
    fn re(self) -> f64;
}

impl Scalar for f64 {
    const ZERO: Self = 0.0;
    fn conj(self) -> Self {
        self
    }
    fn scale(self, r: f64) -> Self {
        self * r
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn is_finite_scalar(self) -> bool {
        self.is_finite()
    }
    fn from_re(r: f64) -> Self {
        r
    }
    fn re(self) -> f64 {
        self
    }
}

impl Scalar for Complex64 {
    const ZERO: Self = Complex64::new(0.0, 0.0);
    fn conj(self) -> Self {
        Complex64::new(self.re, -self.im)
    }
    fn scale(self, r: f64) -> Self {
        Complex64::new(self.re * r, self.im * r)
    }
    fn modulus(self) -> f64 {
        if self.im == 0.0 {
            self.re.abs()
        } else {
            self.re.hypot(self.im)
        }
    }
    fn is_finite_scalar(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    fn from_re(r: f64) -> Self {
        Complex64::new(r, 0.0)
    }
    fn re(self) -> f64 {
        self.re
    }
}

/// Thin SVD A = U Σ Vᴴ with singular values descending.
#[derive(Debug, Clone)]
pub struct SvdResult<T> {
    /// Left factor columns: `u[j]` has `rows(A)` entries.
    pub u: Vec<Vec<T>>,
    /// Singular values, descending and nonnegative; length min(rows, cols).
    pub s: Vec<f64>,
    /// Right factor columns: `v[j]` has `cols(A)` entries.
    pub v: Vec<Vec<T>>,
}

fn dot_conj<T: Scalar>(a: &[T], b: &[T]) -> T {
    let mut acc = T::ZERO;
    for (x, y) in a.iter().zip(b) {
        acc = acc + x.conj() * *y;
    }
    acc
}

fn norm2<T: Scalar>(a: &[T]) -> f64 {
    let mut acc = 0.0;
    for x in a {
        let m = x.modulus();
        acc += m * m;
    }
    acc
}

/// One-sided Jacobi on the columns of `a` (rows ≥ cols assumed by caller).
fn jacobi_columns<T: Scalar>(cols: &mut [Vec<T>], v: &mut [Vec<T>]) -> Result<()> {
    let n = cols.len();
    if n < 2 {
        return Ok(());
    }
    let m = cols[0].len();
    let tol = (m as f64).sqrt() * f64::EPSILON;
    let max_sweeps = 60;
    for _sweep in 0..max_sweeps {
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = dot_conj(&cols[p], &cols[q]);
                let napq = apq.modulus();
                if napq == 0.0 {
                    continue;
                }
                let app = norm2(&cols[p]);
                let aqq = norm2(&cols[q]);
                if napq <= tol * (app * aqq).sqrt() {
                    continue;
                }
                rotated = true;
                // Phase making ⟨a_p, φ̄ a_q⟩ real positive, then a real rotation.
                let phase = apq.scale(1.0 / napq);
                let zeta = (aqq - app) / (2.0 * napq);
                let t = {
                    let d = zeta.abs() + (1.0 + zeta * zeta).sqrt();
                    if zeta >= 0.0 {
                        1.0 / d
                    } else {
                        -1.0 / d
                    }
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (cp, cq) = split_two(cols, p, q);
                rotate_pair(cp, cq, c, s, phase);
                let (vp, vq) = split_two(v, p, q);
                rotate_pair(vp, vq, c, s, phase);
            }
        }
        if !rotated {
            return Ok(());
        }
    }
    Err(Error::Precision(
        "svd_double: Jacobi sweeps did not converge".into(),
    ))
}

/// a_p ← c·a_p − s·φ̄·a_q ;  a_q ← s·φ·a_p + c·a_q (with the original a_p).
fn rotate_pair<T: Scalar>(ap: &mut [T], aq: &mut [T], c: f64, s: f64, phase: T) {
    let pc = phase.conj();
    for (x, y) in ap.iter_mut().zip(aq.iter_mut()) {
        let xp = *x;
        let yq = *y;
        let yq_ph = pc * yq;
        *x = xp.scale(c) - yq_ph.scale(s);
        *y = (phase * xp).scale(s) + yq.scale(c);
    }
}

fn split_two<T>(cols: &mut [Vec<T>], p: usize, q: usize) -> (&mut [T], &mut [T]) {
    debug_assert!(p < q);
    let (lo, hi) = cols.split_at_mut(q);
    (&mut lo[p], &mut hi[0])
}

/// SVD of a dense real or complex matrix in double precision.
///
/// `a` is row-major (`a[i][j]`, m rows, n columns). Returns the thin SVD with
/// min(m, n) singular triplets, values descending. Zero singular values get
/// deterministically completed orthonormal left columns.
pub fn svd_double<T: Scalar>(a: &[Vec<T>]) -> Result<SvdResult<T>> {
    let m = a.len();
    if m == 0 || a.iter().any(|r| r.len() != a[0].len()) {
        return Err(Error::Parameter("svd_double: empty or ragged matrix".into()));
    }
    let n = a[0].len();
    if n == 0 {
        return Err(Error::Parameter("svd_double: matrix has no columns".into()));
    }
    if a.iter().any(|r| r.iter().any(|e| !e.is_finite_scalar())) {
        return Err(Error::Parameter("svd_double: non-finite entries".into()));
    }
    if m < n {
        // Work on the conjugate transpose and swap factors.
        let at: Vec<Vec<T>> = (0..n)
            .map(|j| (0..m).map(|i| a[i][j].conj()).collect())
            .collect();
        let r = svd_double(&at)?;
        return Ok(SvdResult {
            u: r.v,
            s: r.s,
            v: r.u,
        });
    }

    // Column-major working copy.
    let mut cols: Vec<Vec<T>> = (0..n)
        .map(|j| (0..m).map(|i| a[i][j]).collect())
        .collect();
    let mut v: Vec<Vec<T>> = (0..n)
        .map(|j| {
            (0..n)
                .map(|i| if i == j { T::from_re(1.0) } else { T::ZERO })
                .collect()
        })
        .collect();
    jacobi_columns(&mut cols, &mut v)?;

    // Extract singular values and sort descending (stable in column index).
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = cols.iter().map(|c| norm2(c).sqrt()).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap().then(i.cmp(&j)));

    let mut u: Vec<Vec<T>> = Vec::with_capacity(n);
    let mut s: Vec<f64> = Vec::with_capacity(n);
    let mut vs: Vec<Vec<T>> = Vec::with_capacity(n);
    for &j in &order {
        s.push(norms[j]);
        if norms[j] > 0.0 {
            u.push(cols[j].iter().map(|e| e.scale(1.0 / norms[j])).collect());
        } else {
            u.push(vec![T::ZERO; m]); // placeholder, completed below
        }
        vs.push(v[j].clone());
    }
    // Complete left columns for zero singular values: pick the coordinate axis
    // with the largest residual after projecting out the accumulated columns.
    for j in 0..n {
        if s[j] > 0.0 {
            continue;
        }
        let mut best: Option<(f64, Vec<T>)> = None;
        for axis in 0..m {
            let mut cand = vec![T::ZERO; m];
            cand[axis] = T::from_re(1.0);
            for uc in u.iter().take(j) {
                let proj = dot_conj(uc, &cand);
                for (c, b) in cand.iter_mut().zip(uc) {
                    *c = *c - *b * proj;
                }
            }
            let r = norm2(&cand).sqrt();
            if best.as_ref().map_or(true, |(br, _)| r > *br + 1e-12) {
                best = Some((r, cand));
            }
        }
        let (r, cand) = best.expect("m >= 1");
        u[j] = cand.iter().map(|e| e.scale(1.0 / r)).collect();
    }

    // Thin output: keep min(m, n) = n triplets (m >= n here).
    Ok(SvdResult { u, s, v: vs })
}
