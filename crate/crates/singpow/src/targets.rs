//! Target measures and distributions σ on the band [a,b], oracle evaluation
//! of f(z) = ∫_a^b z^μ σ(μ) dμ at real points of [0,1] and at complex arc
//! points, total-variation normalization, and the C^k norm bound U_{n,k} of
//! the right singular functions used by the distribution-order error bounds.

use std::fmt;
use std::sync::Arc as Shared;

use num_complex::Complex64;
use once_cell::sync::Lazy;

use crate::laplace::{Band, LaplaceSvd};
use crate::numerics::cpow::{pow_ct, pow_from_log, principal_log};
use crate::numerics::gauss_legendre;
use crate::{Error, Result};

/// Absolutely continuous densities σ(μ).
#[derive(Clone)]
pub enum Density {
    /// σ₁(μ) = 1/μ.
    Sigma1,
    /// σ₂(μ) = sin(12μ).
    Sigma2,
    /// σ₃(μ) = e^{−10μ}.
    Sigma3,
    /// σ₄(μ) = μ·sin μ.
    Sigma4,
    /// A user-supplied density, finite on the band.
    User(Shared<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl Density {
    pub fn eval(&self, mu: f64) -> f64 {
        match self {
            Density::Sigma1 => 1.0 / mu,
            Density::Sigma2 => (12.0 * mu).sin(),
            Density::Sigma3 => (-10.0 * mu).exp(),
            Density::Sigma4 => mu * mu.sin(),
            Density::User(f) => f(mu),
        }
    }

    /// Interior sign-change points, used to panel |σ| exactly piecewise.
    fn sign_knots(&self, band: Band) -> Vec<f64> {
        let period = match self {
            Density::Sigma2 => std::f64::consts::PI / 12.0,
            Density::Sigma4 => std::f64::consts::PI,
            _ => return Vec::new(),
        };
        let mut knots = Vec::new();
        let mut k = (band.a / period).floor() as i64 + 1;
        loop {
            let mu = k as f64 * period;
            if mu >= band.b {
                break;
            }
            if mu > band.a {
                knots.push(mu);
            }
            k += 1;
        }
        knots
    }
}

impl fmt::Debug for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Density::Sigma1 => write!(f, "Sigma1"),
            Density::Sigma2 => write!(f, "Sigma2"),
            Density::Sigma3 => write!(f, "Sigma3"),
            Density::Sigma4 => write!(f, "Sigma4"),
            Density::User(_) => write!(f, "User(..)"),
        }
    }
}

/// A target measure or distribution on [a,b]: an absolutely continuous part
/// σ(μ)dμ, a point mass δ(μ−c) generating f(x) = x^c, or a derivative point
/// mass (−1)^k δ^{(k)}(μ−c) generating f(x) = x^c (log x)^k.
#[derive(Clone, Debug)]
pub enum Measure {
    Density(Density),
    PointMass { c: f64 },
    DerivativePointMass { c: f64, k: u32 },
}

impl Measure {
    /// A point mass with its location validated against the band.
    pub fn point_mass(c: f64, band: Band) -> Result<Measure> {
        if !c.is_finite() || c < band.a || c > band.b {
            return Err(Error::Parameter(format!(
                "point mass location c = {c} outside the band [{}, {}]",
                band.a, band.b
            )));
        }
        Ok(Measure::PointMass { c })
    }

    /// Sweep-only point mass: permits c outside the band (the power target
    /// x^c is still well defined for c > 0), for the flagged c-sweep.
    pub fn point_mass_swept(c: f64) -> Result<Measure> {
        if !c.is_finite() || c <= 0.0 {
            return Err(Error::Parameter(format!(
                "swept point mass needs a finite c > 0, got {c}"
            )));
        }
        Ok(Measure::PointMass { c })
    }

    /// A derivative point mass of order k ≥ 1 located inside the band.
    pub fn derivative_point_mass(c: f64, k: u32, band: Band) -> Result<Measure> {
        if k < 1 {
            return Err(Error::Parameter(
                "derivative point mass needs order k >= 1".into(),
            ));
        }
        if !c.is_finite() || c < band.a || c > band.b {
            return Err(Error::Parameter(format!(
                "derivative point mass location c = {c} outside the band [{}, {}]",
                band.a, band.b
            )));
        }
        Ok(Measure::DerivativePointMass { c, k })
    }

    /// Named targets addressable from the command line: "sigma1".."sigma6".
    /// sigma5 and sigma6 require a location c; sigma6 defaults to order k = 1.
    pub fn from_id(id: &str, band: Band, c: Option<f64>, k: Option<u32>) -> Result<Measure> {
        match id {
            "sigma1" => Ok(Measure::Density(Density::Sigma1)),
            "sigma2" => Ok(Measure::Density(Density::Sigma2)),
            "sigma3" => Ok(Measure::Density(Density::Sigma3)),
            "sigma4" => Ok(Measure::Density(Density::Sigma4)),
            "sigma5" => {
                let c = c.ok_or_else(|| {
                    Error::Parameter("target sigma5 requires a location c".into())
                })?;
                Measure::point_mass(c, band)
            }
            "sigma6" => {
                let c = c.ok_or_else(|| {
                    Error::Parameter("target sigma6 requires a location c".into())
                })?;
                Measure::derivative_point_mass(c, k.unwrap_or(1), band)
            }
            other => Err(Error::Parameter(format!("unknown target id '{other}'"))),
        }
    }

    /// Stable identifier for table output.
    pub fn id(&self) -> &'static str {
        match self {
            Measure::Density(Density::Sigma1) => "sigma1",
            Measure::Density(Density::Sigma2) => "sigma2",
            Measure::Density(Density::Sigma3) => "sigma3",
            Measure::Density(Density::Sigma4) => "sigma4",
            Measure::Density(Density::User(_)) => "user",
            Measure::PointMass { .. } => "sigma5",
            Measure::DerivativePointMass { .. } => "sigma6",
        }
    }
}

/// 16-point Gauss–Legendre rule on [0,1], generated once at extended
/// precision and rounded to double.
static GL16: Lazy<(Vec<f64>, Vec<f64>)> = Lazy::new(|| {
    let rule = gauss_legendre(16, 0.0, 1.0, 96).expect("16-point Gauss-Legendre");
    (
        rule.nodes.iter().map(|t| t.to_f64()).collect(),
        rule.weights.iter().map(|w| w.to_f64()).collect(),
    )
});

/// f(z) = ∫_a^b z^μ σ(μ) dμ with principal-branch powers; f(0) := 0 (a > 0
/// forces the limit for every in-scope target). Real points must lie in
/// [0,1]; densities are integrated by a panel-doubling Gauss–Legendre rule,
/// point masses use their closed forms z^c and z^c (log z)^k.
pub fn eval_f(measure: &Measure, band: Band, z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 && !(0.0..=1.0).contains(&z.re) {
        return Err(Error::Parameter(format!(
            "eval_f: real point x = {} outside [0,1]",
            z.re
        )));
    }
    if z.re == 0.0 && z.im == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    match measure {
        Measure::PointMass { c } => pow_ct(z, *c),
        Measure::DerivativePointMass { c, k } => {
            let l = principal_log(z)?;
            let mut val = pow_from_log(l, *c);
            for _ in 0..*k {
                val *= l;
            }
            Ok(val)
        }
        Measure::Density(sig) => density_f(sig, band, z),
    }
}

/// Real-point convenience wrapper for [`eval_f`].
pub fn eval_f_real(measure: &Measure, band: Band, x: f64) -> Result<f64> {
    Ok(eval_f(measure, band, Complex64::new(x, 0.0))?.re)
}

/// Intrinsic variation rate of a named density: the modulus of its dominant
/// exponential/oscillatory rate in μ. Bounds how fast σ itself moves so that
/// quadrature cells can be sized to resolve it; 0 for σ₁ (whose difficulty is
/// the pole at μ = 0, graded separately) and for user densities (whose
/// resolution is the panel-doubling loop's job).
fn sig_rate(sig: &Density) -> f64 {
    match sig {
        Density::Sigma1 | Density::User(_) => 0.0,
        Density::Sigma2 => 12.0,
        Density::Sigma3 => 10.0,
        Density::Sigma4 => 1.0,
    }
}

/// Composite Gauss–Legendre value of ∫ σ(μ)·e^{μ·l} dμ over [lo, hi] with the
/// given top-level panel count. Each panel is internally split into leaves
/// short enough that the integrand's total complex rate |l| + rate(σ) stays
/// modest per leaf (and, for σ₁, that the leaf stays clear of the pole at
/// μ = 0), so every panel count resolves the integrand; refining the panel
/// count re-lays all leaf boundaries and thereby cross-checks the value. Leaf
/// contributions are combined by compensated summation to keep cancellation
/// (oscillatory σ on wide bands) from surfacing as accumulation roundoff.
fn density_panels(sig: &Density, lo: f64, hi: f64, l: Complex64, panels: usize) -> Complex64 {
    let (nodes, weights) = (&GL16.0, &GL16.1);
    let h = (hi - lo) / panels as f64;
    let rate = l.norm() + sig_rate(sig);
    let w_cap = if rate > 0.0 { 8.0 / rate } else { f64::INFINITY };
    let pole_graded = matches!(sig, Density::Sigma1);
    let mut sum_re = 0.0f64;
    let mut sum_im = 0.0f64;
    let mut comp_re = 0.0f64;
    let mut comp_im = 0.0f64;
    for p in 0..panels {
        let p0 = lo + h * p as f64;
        let p1 = if p + 1 == panels { hi } else { lo + h * (p + 1) as f64 };
        let mut left = p0;
        while left < p1 {
            let mut w = w_cap;
            if pole_graded {
                w = w.min(0.5 * left);
            }
            let right = (left + w).min(p1);
            let hw = right - left;
            let mut acc = Complex64::new(0.0, 0.0);
            for q in 0..16 {
                let mu = left + hw * nodes[q];
                let s = weights[q] * sig.eval(mu);
                let e = pow_from_log(l, mu);
                acc = Complex64::new(acc.re + s * e.re, acc.im + s * e.im);
            }
            let y = hw * acc.re - comp_re;
            let t = sum_re + y;
            comp_re = (t - sum_re) - y;
            sum_re = t;
            let y = hw * acc.im - comp_im;
            let t = sum_im + y;
            comp_im = (t - sum_im) - y;
            sum_im = t;
            left = right;
        }
    }
    Complex64::new(sum_re, sum_im)
}

/// Order-of-magnitude estimate of ∫|σ|, used only to floor the relative
/// convergence scale of the oracle quadrature; constant-factor accuracy is
/// all that is needed, so the oscillatory densities use the mean of |sin|.
fn tv_scale(sig: &Density, band: Band) -> f64 {
    match sig {
        Density::Sigma1 => (band.b / band.a).ln(),
        Density::Sigma2 => 2.0 / std::f64::consts::PI * (band.b - band.a),
        Density::Sigma3 => ((-10.0 * band.a).exp() - (-10.0 * band.b).exp()) / 10.0,
        Density::Sigma4 => (band.b * band.b - band.a * band.a) / std::f64::consts::PI,
        Density::User(f) => {
            let mut acc = 0.0;
            for j in 0..33 {
                let mu = band.a + (band.b - band.a) * j as f64 / 32.0;
                acc += f(mu).abs();
            }
            acc / 33.0 * (band.b - band.a)
        }
    }
}

fn density_f(sig: &Density, band: Band, z: Complex64) -> Result<Complex64> {
    let l = principal_log(z)?;
    // Exponents beyond the point where |z^μ| has decayed by e^-750 contribute
    // below the double-precision underflow threshold; capping the window there
    // keeps the panels resolving the live part of the integrand.
    let decay = -l.re;
    let hi = if decay > 0.0 {
        band.b.min(band.a + 750.0 / decay)
    } else {
        band.b
    };
    // |f(z)| ≲ |z|^a·∫|σ| bounds the attainable magnitude; it floors the
    // relative convergence scale so near-cancellation values of oscillatory
    // targets still terminate.
    let cap = (band.a * l.re).exp() * tv_scale(sig, band);
    let mut prev = density_panels(sig, band.a, hi, l, 8);
    let mut panels = 16usize;
    while panels <= 512 {
        let cur = density_panels(sig, band.a, hi, l, panels);
        let diff = (cur - prev).norm();
        if diff <= 1e-14 * cur.norm().max(cap) {
            return Ok(cur);
        }
        prev = cur;
        panels *= 2;
    }
    Err(Error::Oracle(format!(
        "density quadrature did not converge at z = ({}, {})",
        z.re, z.im
    )))
}

/// Total variation |σ|: ∫_a^b |σ(μ)| dμ for densities, integrated by
/// panel-doubling quadrature on each single-signed piece between interior
/// sign knots; 1 for point masses and derivative point masses (unit mass and
/// the unit dual-norm normalization of δ^{(k)}).
pub fn total_variation(measure: &Measure, band: Band) -> f64 {
    match measure {
        Measure::PointMass { .. } | Measure::DerivativePointMass { .. } => 1.0,
        Measure::Density(sig) => {
            let mut cuts = vec![band.a];
            cuts.extend(sig.sign_knots(band));
            cuts.push(band.b);
            let mut total = 0.0;
            for pair in cuts.windows(2) {
                total += abs_piece(sig, pair[0], pair[1]);
            }
            total
        }
    }
}

/// ∫|σ| over one smooth piece, panel count doubled to relative 1e-14; the
/// final refinement is accepted if the cap is reached (user densities may
/// have interior kinks; named densities converge in a few doublings).
fn abs_piece(sig: &Density, lo: f64, hi: f64) -> f64 {
    let (nodes, weights) = (&GL16.0, &GL16.1);
    let value = |panels: usize| -> f64 {
        let h = (hi - lo) / panels as f64;
        let mut total = 0.0;
        for p in 0..panels {
            let base = lo + h * p as f64;
            let mut acc = 0.0;
            for q in 0..16 {
                acc += weights[q] * sig.eval(base + h * nodes[q]).abs();
            }
            total += h * acc;
        }
        total
    };
    let mut prev = value(8);
    let mut panels = 16usize;
    while panels <= 512 {
        let cur = value(panels);
        if (cur - prev).abs() <= 1e-14 * cur.abs() {
            return cur;
        }
        prev = cur;
        panels *= 2;
    }
    prev
}

/// U_{n,k} = max_{i<n} Σ_{m=0}^{k} sup_{t∈[a,b]} |(b−a)^{−m}·uᵢ^{(m)}((t−a)/(b−a))|,
/// the C^k([a,b]) norm bound of the rescaled right singular functions, with
/// suprema taken over a uniform 50·n-point grid plus the endpoints.
pub fn ck_norm_bound(svd: &LaplaceSvd, n: usize, k: usize) -> Result<f64> {
    let grid = uniform_grid(50 * n + 2);
    let sups = svd.u_derivative_sups(n, k, &grid)?;
    let table = combine_sups(&sups, svd.band(), n, k);
    Ok(table[n - 1][k])
}

/// U_{n',k'} for all 1 ≤ n' ≤ n and 0 ≤ k' ≤ k from one shared evaluation
/// grid of 50·n points plus endpoints; table[n'−1][k'] = U_{n',k'}. Agrees
/// with [`ck_norm_bound`] up to the grid resolution of the suprema.
pub fn ck_norm_table(svd: &LaplaceSvd, n: usize, k: usize) -> Result<Vec<Vec<f64>>> {
    let grid = uniform_grid(50 * n + 2);
    let sups = svd.u_derivative_sups(n, k, &grid)?;
    Ok(combine_sups(&sups, svd.band(), n, k))
}

fn uniform_grid(count: usize) -> Vec<f64> {
    (0..count)
        .map(|j| j as f64 / (count - 1) as f64)
        .collect()
}

fn combine_sups(sups: &[Vec<f64>], band: Band, n: usize, k: usize) -> Vec<Vec<f64>> {
    let w = 1.0 / (band.b - band.a);
    let mut table = vec![vec![0.0f64; k + 1]; n];
    for np in 1..=n {
        let row = &sups[np - 1];
        for kk in 0..=k {
            // C^kk norm of u_{np−1}: partial sums of the scaled derivative sups.
            let mut sum = 0.0;
            for (m, s) in row.iter().take(kk + 1).enumerate() {
                sum += s * w.powi(m as i32);
            }
            let prev = if np > 1 { table[np - 2][kk] } else { 0.0 };
            table[np - 1][kk] = prev.max(sum);
        }
    }
    table
}
