//! A priori approximation schemes: the singular powers t_j = a + (b−a)·t̃_j
//! (mapped roots of u_N), the collocation points x_j = e^{−s_j/(b−a)} (mapped
//! roots of v_N), TSVD-backed fitting of target samples, and evaluation and
//! sup-error measurement of the fitted expansions f̂(x) = Σ ĉ_j x^{t_j} on
//! [0,1] or along complex arcs.

use num_complex::Complex64;
use rug::ops::CompleteRound;
use serde::{Deserialize, Serialize};

use crate::laplace::{self, Band, LaplaceSvd, Side, SideRule, SvdDiagnostics};
use crate::mp::{big, Big};
use crate::numerics::cpow::{pow_from_log, principal_log};
use crate::targets::{eval_f, total_variation, Measure};
use crate::tsvd::{tsvd_solve, TsvdReport};
use crate::{Error, Result};

/// Default TSVD threshold: double-precision machine epsilon ε₀.
pub const EPS0: f64 = f64::EPSILON;

/// Default sup-error grid size.
pub const SUP_GRID: usize = 2000;

/// Which generalized quadrature size backs the powers and collocation points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleSize {
    /// N = n points. Empirically sufficient; the first-kind quadrature error
    /// E₁ of this rule sits at ≈ 1.08·α_n² rather than below α_n².
    Practical,
    /// N = 2n points, for validation runs that need the error-bound premise
    /// E₁ ≤ α_n² to hold with a wide margin (E₁ of the 2n-point rule is of
    /// order α_{2n}² ≪ α_n²). Requires a spectrum of length ≥ 2n+1.
    Certified,
}

/// A precomputed approximation scheme on the band [a,b].
///
/// `n` is the spectral truncation (α_n ≤ eps ≤ α_{n−1}); `powers` holds the
/// N exponents t_j strictly increasing in [a,b]; `collocation` holds the N
/// sample points x_j, stored in the order of increasing V-side nodes s_j and
/// hence strictly decreasing in value; `alphas` records α₀..α_n in double
/// precision. N equals n for the practical rule and 2n for the certified one.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ApproxScheme {
    pub version: u32,
    pub a: f64,
    pub b: f64,
    pub n: usize,
    pub eps: f64,
    pub powers: Vec<f64>,
    pub collocation: Vec<f64>,
    pub alphas: Vec<f64>,
    /// Rule diagnostics from construction; not serialized.
    #[serde(skip)]
    pub diagnostics: Option<SvdDiagnostics>,
}

impl ApproxScheme {
    pub fn band(&self) -> Result<Band> {
        Band::new(self.a, self.b)
    }

    /// Number of powers N (= collocation points).
    pub fn n_powers(&self) -> usize {
        self.powers.len()
    }

    /// Structural validation of all scheme invariants.
    pub fn validate(&self) -> Result<()> {
        if self.version != 1 {
            return Err(Error::Parameter(format!(
                "unsupported scheme version {}",
                self.version
            )));
        }
        let band = self.band()?;
        if self.n < 1 {
            return Err(Error::Parameter("scheme: n must be >= 1".into()));
        }
        if !(self.eps.is_finite() && self.eps > 0.0) {
            return Err(Error::Parameter(format!(
                "scheme: eps = {} must be positive and finite",
                self.eps
            )));
        }
        if self.alphas.len() != self.n + 1 {
            return Err(Error::Parameter(format!(
                "scheme: {} singular values recorded for n = {}",
                self.alphas.len(),
                self.n
            )));
        }
        for w in self.alphas.windows(2) {
            if !(w[1].is_finite() && w[1] > 0.0 && w[1] < w[0]) {
                return Err(Error::Parameter(
                    "scheme: singular values must be positive and strictly decreasing".into(),
                ));
            }
        }
        if !(self.alphas[self.n] <= self.eps && self.alphas[self.n - 1] >= self.eps) {
            return Err(Error::Parameter(format!(
                "scheme: eps = {:e} does not separate α_n = {:e} from α_(n-1) = {:e}",
                self.eps,
                self.alphas[self.n],
                self.alphas[self.n - 1]
            )));
        }
        let nn = self.powers.len();
        if nn != self.n && nn != 2 * self.n {
            return Err(Error::Parameter(format!(
                "scheme: {} powers for n = {} (expected n or 2n)",
                nn, self.n
            )));
        }
        if self.collocation.len() != nn {
            return Err(Error::Parameter(format!(
                "scheme: {} collocation points for {} powers",
                self.collocation.len(),
                nn
            )));
        }
        for w in self.powers.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::Parameter(
                    "scheme: powers must be strictly increasing".into(),
                ));
            }
        }
        if !self.powers.is_empty()
            && !(self.powers[0] >= band.a && *self.powers.last().unwrap() <= band.b)
        {
            return Err(Error::Parameter(
                "scheme: powers must lie within [a,b]".into(),
            ));
        }
        for w in self.collocation.windows(2) {
            if !(w[0] > w[1]) {
                return Err(Error::Parameter(
                    "scheme: collocation points must be strictly decreasing".into(),
                ));
            }
        }
        if !self
            .collocation
            .iter()
            .all(|&x| x.is_finite() && 0.0 < x && x < 1.0)
        {
            return Err(Error::Parameter(
                "scheme: collocation points must lie in (0,1)".into(),
            ));
        }
        Ok(())
    }

    /// Serializes to the versioned JSON schema (shortest round-trip decimals).
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Parses and validates a scheme from its JSON form.
    pub fn from_json(text: &str) -> Result<ApproxScheme> {
        let scheme: ApproxScheme = serde_json::from_str(text)?;
        scheme.validate()?;
        Ok(scheme)
    }
}

/// A quadratic arc γ̃(t) = t + α·i·(t²−t) through 0 and 1, parameterized over
/// [0,1]; α = 0 degenerates to the real segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub alpha: f64,
}

impl Arc {
    pub fn map(&self, t: f64) -> Complex64 {
        Complex64::new(t, self.alpha * (t * t - t))
    }
}

/// A fitted expansion: the scheme it was fitted on, the (complex-capable)
/// coefficients ĉ, the TSVD report, and the collocation residual ‖Vĉ − F‖₂.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub scheme: ApproxScheme,
    pub arc: Option<Arc>,
    pub eps: f64,
    pub coefficients: Vec<Complex64>,
    pub report: TsvdReport,
    pub residual: f64,
}

/// Serialized form of a fit; complex coefficients split into components.
#[derive(Serialize, Deserialize)]
struct FitFile {
    version: u32,
    scheme: ApproxScheme,
    arc_alpha: Option<f64>,
    eps: f64,
    coeff_re: Vec<f64>,
    coeff_im: Vec<f64>,
    k: usize,
    sigma_k: Option<f64>,
    sigma_k1: f64,
    solution_norm: f64,
    residual: f64,
}

impl FitResult {
    pub fn to_json(&self) -> Result<String> {
        let file = FitFile {
            version: 1,
            scheme: self.scheme.clone(),
            arc_alpha: self.arc.map(|g| g.alpha),
            eps: self.eps,
            coeff_re: self.coefficients.iter().map(|c| c.re).collect(),
            coeff_im: self.coefficients.iter().map(|c| c.im).collect(),
            k: self.report.k,
            sigma_k: self.report.sigma_k.is_finite().then_some(self.report.sigma_k),
            sigma_k1: self.report.sigma_k1,
            solution_norm: self.report.solution_norm,
            residual: self.residual,
        };
        let mut s = serde_json::to_string_pretty(&file)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<FitResult> {
        let file: FitFile = serde_json::from_str(text)?;
        if file.version != 1 {
            return Err(Error::Parameter(format!(
                "unsupported fit version {}",
                file.version
            )));
        }
        file.scheme.validate()?;
        let nn = file.scheme.powers.len();
        if file.coeff_re.len() != nn || file.coeff_im.len() != nn {
            return Err(Error::Parameter(
                "fit: coefficient count does not match the scheme".into(),
            ));
        }
        let coefficients = file
            .coeff_re
            .iter()
            .zip(&file.coeff_im)
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect();
        Ok(FitResult {
            scheme: file.scheme,
            arc: file.arc_alpha.map(|alpha| Arc { alpha }),
            eps: file.eps,
            coefficients,
            report: TsvdReport {
                k: file.k,
                sigma_k: file.sigma_k.unwrap_or(f64::INFINITY),
                sigma_k1: file.sigma_k1,
                solution_norm: file.solution_norm,
                residual_norm: file.residual,
            },
            residual: file.residual,
        })
    }
}

fn validate_eps_target(eps_target: f64, digits: u32) -> Result<()> {
    if !(eps_target.is_finite() && eps_target > 0.0) {
        return Err(Error::Parameter(format!(
            "eps_target = {eps_target} must be positive and finite"
        )));
    }
    let floor = 10f64.powi(20 - digits as i32);
    if eps_target < floor {
        return Err(Error::Parameter(format!(
            "eps_target = {eps_target:e} is below the trust floor 10^(20-digits) = {floor:e} \
             at digits = {digits}; raise digits"
        )));
    }
    Ok(())
}

/// One-call scheme construction: runs the spectral build at the given
/// precision and mesh (requesting a spectrum of length mesh/4), picks
/// n = min{m : α_m ≤ eps_target}, and derives the practical N = n scheme
/// with rule diagnostics recorded.
pub fn build_scheme(
    band: Band,
    eps_target: f64,
    digits: u32,
    mesh_size: usize,
) -> Result<ApproxScheme> {
    build_scheme_with(band, eps_target, digits, mesh_size, RuleSize::Practical)
}

/// [`build_scheme`] with an explicit rule size.
pub fn build_scheme_with(
    band: Band,
    eps_target: f64,
    digits: u32,
    mesh_size: usize,
    rule: RuleSize,
) -> Result<ApproxScheme> {
    validate_eps_target(eps_target, digits)?;
    let svd = laplace::build(band, mesh_size / 4, digits, mesh_size)?;
    scheme_from_svd(&svd, eps_target, rule)
}

/// Derives a scheme from an existing spectral build: n = min{m : α_m ≤
/// eps_target}, with rule diagnostics recorded. Errors with a precision
/// error if the delivered spectrum never reaches eps_target.
pub fn scheme_from_svd(
    svd: &LaplaceSvd,
    eps_target: f64,
    rule: RuleSize,
) -> Result<ApproxScheme> {
    validate_eps_target(eps_target, svd.digits())?;
    let n = svd
        .alphas()
        .iter()
        .position(|al| *al <= eps_target)
        .ok_or_else(|| {
            Error::Precision(format!(
                "delivered spectrum stops at α_{} = {:e} > eps_target = {:e}; \
                 raise the mesh (and the requested spectrum length) or eps_target",
                svd.n_max(),
                svd.alpha_f64(svd.n_max()),
                eps_target
            ))
        })?;
    if n == 0 {
        return Err(Error::Parameter(format!(
            "eps_target = {eps_target:e} is at or above α₀ = {:e}; nothing to resolve",
            svd.alpha_f64(0)
        )));
    }
    let mut scheme = scheme_core(svd, n, rule, true)?;
    scheme.eps = eps_target;
    scheme.validate()?;
    Ok(scheme)
}

/// The scheme at a prescribed truncation n ≥ 1, recording eps = α_n and no
/// diagnostics (cheap path for parameter sweeps).
pub fn scheme_for_n(svd: &LaplaceSvd, n: usize, rule: RuleSize) -> Result<ApproxScheme> {
    scheme_core(svd, n, rule, false)
}

fn map_power(a_big: &Big, width: &Big, node: &Big, bits: u32) -> f64 {
    let scaled = (node * width).complete(bits);
    (a_big + &scaled).complete(bits).to_f64()
}

fn map_colloc(node: &Big, width: &Big, bits: u32) -> f64 {
    let ratio = (node / width).complete(bits);
    (-ratio).exp().to_f64()
}

/// Assembles the scheme at truncation n from caller-provided side rules (as
/// built by [`LaplaceSvd::nodes_and_weights`], both of the same size n or
/// 2n), recording eps = α_n and no diagnostics. Useful when the rules are
/// already at hand; [`scheme_for_n`] builds them internally.
pub fn scheme_from_rules(
    svd: &LaplaceSvd,
    n: usize,
    urule: &SideRule,
    vrule: &SideRule,
) -> Result<ApproxScheme> {
    if n < 1 {
        return Err(Error::Parameter("scheme: need n >= 1".into()));
    }
    if urule.side != Side::U || vrule.side != Side::V {
        return Err(Error::Parameter(
            "scheme: rules passed with swapped or repeated sides".into(),
        ));
    }
    if urule.n() != vrule.n() || (urule.n() != n && urule.n() != 2 * n) {
        return Err(Error::Parameter(format!(
            "scheme: rule sizes {} / {} do not fit n = {n} (expected both n or both 2n)",
            urule.n(),
            vrule.n()
        )));
    }
    let band = svd.band();
    let bits = svd.wbits();
    let a_big = big(bits, band.a);
    let width = band.width_big(bits);
    let powers: Vec<f64> = urule
        .nodes
        .iter()
        .map(|t| map_power(&a_big, &width, t, bits))
        .collect();
    let collocation: Vec<f64> = vrule
        .nodes
        .iter()
        .map(|s| map_colloc(s, &width, bits))
        .collect();
    let alphas: Vec<f64> = (0..=n).map(|i| svd.alpha_f64(i)).collect();
    let scheme = ApproxScheme {
        version: 1,
        a: band.a,
        b: band.b,
        n,
        eps: svd.alpha_f64(n),
        powers,
        collocation,
        alphas,
        diagnostics: None,
    };
    scheme.validate()?;
    Ok(scheme)
}

fn scheme_core(
    svd: &LaplaceSvd,
    n: usize,
    rule: RuleSize,
    with_diagnostics: bool,
) -> Result<ApproxScheme> {
    if n < 1 {
        return Err(Error::Parameter("scheme: need n >= 1".into()));
    }
    let nn = match rule {
        RuleSize::Practical => n,
        RuleSize::Certified => 2 * n,
    };
    let urule = svd.nodes_and_weights(nn, Side::U)?;
    let vrule = svd.nodes_and_weights(nn, Side::V)?;
    let mut scheme = scheme_from_rules(svd, n, &urule, &vrule)?;
    if with_diagnostics {
        let e1 = svd.gram_error(nn, &urule)?;
        let e2 = svd.gram_error(nn, &vrule)?;
        let etilde = svd.etilde(&urule)?;
        let (a_pinv_norm, a_pinv_bound) = svd.interp_conditioning(nn, &vrule)?;
        scheme.diagnostics = Some(SvdDiagnostics {
            e1,
            e2,
            etilde,
            a_pinv_norm,
            a_pinv_bound,
        });
    }
    Ok(scheme)
}

fn arc_point(arc: Option<Arc>, t: f64) -> Complex64 {
    match arc {
        Some(g) => g.map(t),
        None => Complex64::new(t, 0.0),
    }
}

fn power_row(z: Complex64, powers: &[f64]) -> Result<Vec<Complex64>> {
    if z.re == 0.0 && z.im == 0.0 {
        return Ok(vec![Complex64::new(0.0, 0.0); powers.len()]);
    }
    let l = principal_log(z)?;
    Ok(powers.iter().map(|&t| pow_from_log(l, t)).collect())
}

/// The collocation matrix V[i][j] = z_i^{t_j} on the principal branch, where
/// z_i is the i-th collocation point mapped through the arc (identity when
/// absent); 0^t := 0 for t > 0. Real points produce entries with exactly
/// zero imaginary part, so a degenerate arc matches the real path bit for
/// bit.
pub fn vandermonde(scheme: &ApproxScheme, arc: Option<Arc>) -> Result<Vec<Vec<Complex64>>> {
    scheme
        .collocation
        .iter()
        .map(|&x| power_row(arc_point(arc, x), &scheme.powers))
        .collect()
}

/// Samples the target at the scheme's (arc-mapped) collocation points.
pub fn sample_target(
    scheme: &ApproxScheme,
    measure: &Measure,
    arc: Option<Arc>,
) -> Result<Vec<Complex64>> {
    let band = scheme.band()?;
    scheme
        .collocation
        .iter()
        .map(|&x| eval_f(measure, band, arc_point(arc, x)))
        .collect()
}

/// Fits samples F (taken at the scheme's collocation points, mapped through
/// the arc when present) by TSVD at threshold eps, returning coefficients of
/// the expansion Σ ĉ_j z^{t_j}.
pub fn fit(
    scheme: &ApproxScheme,
    f_values: &[Complex64],
    eps: f64,
    arc: Option<Arc>,
) -> Result<FitResult> {
    if f_values.len() != scheme.powers.len() {
        return Err(Error::Parameter(format!(
            "fit: {} samples for {} collocation points",
            f_values.len(),
            scheme.powers.len()
        )));
    }
    let v = vandermonde(scheme, arc)?;
    let (coefficients, report) = tsvd_solve(&v, f_values, eps)?;
    Ok(FitResult {
        scheme: scheme.clone(),
        arc,
        eps,
        coefficients,
        report,
        residual: report.residual_norm,
    })
}

/// [`fit`] for real samples on the real segment.
pub fn fit_real(scheme: &ApproxScheme, f_values: &[f64], eps: f64) -> Result<FitResult> {
    let fc: Vec<Complex64> = f_values.iter().map(|&y| Complex64::new(y, 0.0)).collect();
    fit(scheme, &fc, eps, None)
}

/// Evaluates the fitted expansion at x ∈ [0,1] (the arc parameter when the
/// fit was taken on an arc): Σ ĉ_j·z^{t_j} with z = γ̃(x) or x itself.
/// Extrapolation outside [0,1] is refused; evaluate(·, 0) = 0 since every
/// t_j ≥ a > 0.
pub fn evaluate(fit: &FitResult, x: f64) -> Result<Complex64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Parameter(format!(
            "evaluate: x = {x} outside [0,1] (extrapolation refused)"
        )));
    }
    let z = arc_point(fit.arc, x);
    if z.re == 0.0 && z.im == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let l = principal_log(z)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (c, &t) in fit.coefficients.iter().zip(&fit.scheme.powers) {
        acc += c * pow_from_log(l, t);
    }
    Ok(acc)
}

/// Normalized sup error E_N = max_j |f(z_j) − f̂(z_j)| / |σ| over a uniform
/// grid of the given size on [0,1] including both endpoints (arc-mapped when
/// the fit lives on an arc).
pub fn sup_error(fit: &FitResult, measure: &Measure, grid_points: usize) -> Result<f64> {
    if grid_points < 2 {
        return Err(Error::Parameter(
            "sup_error: need at least two grid points".into(),
        ));
    }
    let band = fit.scheme.band()?;
    let tv = total_variation(measure, band);
    let mut worst = 0.0f64;
    for j in 0..grid_points {
        let x = j as f64 / (grid_points - 1) as f64;
        let f = eval_f(measure, band, arc_point(fit.arc, x))?;
        let g = evaluate(fit, x)?;
        let d = (f - g).norm();
        if d > worst {
            worst = d;
        }
    }
    Ok(worst / tv)
}
