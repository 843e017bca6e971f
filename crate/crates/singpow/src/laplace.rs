//! Singular system of the shifted truncated Laplace transform.
//!
//! For a band [a, b] with ratio γ = b/a and shift d = 1/(γ−1), the operator
//! (Tη)(x) = ∫₀¹ e^{−x(t+d)} η(t) dt maps L²[0,1] into L²[0,∞) and is compact
//! with exponentially decaying singular values α₀ > α₁ > …. This module
//! computes the singular system {αᵢ, uᵢ, vᵢ} by a Nyström eigendecomposition
//! of T*T — whose kernel is the explicit Cauchy-type function
//! K(t,s) = 1/(t+s+2d) — at extended precision, and exposes evaluation of the
//! singular functions, generalized quadrature rules built on their roots, and
//! the quadrature/conditioning diagnostics the downstream approximation
//! scheme is judged by.
//!
//! Everything here is deterministic: identical inputs produce bitwise
//! identical results at fixed precision.

use crate::mp::{big, big_i, bits_for_digits, dot, pow10, Big};
use crate::numerics::{find_roots, gauss_legendre, svd_double, sym_eig, sym_eig_values, QuadRule};
use crate::{Error, Result};
use rug::ops::{CompleteRound, Pow};

/// The singularity band [a, b] of exponents, 0 < a < b.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    pub a: f64,
    pub b: f64,
}

impl Band {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || !(0.0 < a && a < b) {
            return Err(Error::Parameter(format!(
                "band requires 0 < a < b, got a = {a}, b = {b}"
            )));
        }
        Ok(Band { a, b })
    }

    /// Band ratio γ = b/a (> 1).
    pub fn gamma(&self) -> f64 {
        self.b / self.a
    }

    /// Kernel shift d = 1/(γ−1) in double precision.
    pub fn d_f64(&self) -> f64 {
        self.a / (self.b - self.a)
    }

    /// Kernel shift d = a/(b−a) at the given precision (exact f64 operands).
    pub fn d_big(&self, bits: u32) -> Big {
        let den = Big::with_val(bits, big(bits, self.b) - big(bits, self.a));
        big(bits, self.a) / den
    }

    /// Band width b−a at the given precision.
    pub fn width_big(&self, bits: u32) -> Big {
        Big::with_val(bits, big(bits, self.b) - big(bits, self.a))
    }
}

/// Which family a quadrature rule discretizes: U lives on (0,1), V on (0,∞).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    U,
    V,
}

/// A generalized quadrature rule on the roots of u_n (side U) or v_n (side V):
/// n strictly increasing nodes with strictly positive weights, constructed so
/// that the rule integrates u₀..u_{n−1} (resp. v₀..v_{n−1}) exactly.
#[derive(Debug, Clone)]
pub struct SideRule {
    pub side: Side,
    pub nodes: Vec<Big>,
    pub weights: Vec<Big>,
}

impl SideRule {
    pub fn n(&self) -> usize {
        self.nodes.len()
    }
}

/// Quality diagnostics for the practical m = n quadrature rules.
#[derive(Debug, Clone)]
pub struct SvdDiagnostics {
    /// Worst quadrature error of the U-side rule on products αᵢuᵢ·αⱼuⱼ, i,j<n.
    pub e1: Big,
    /// Worst quadrature error of the V-side rule on products αᵢvᵢ·αⱼvⱼ, i,j<n
    /// (unhalved nodes).
    pub e2: Big,
    /// Ẽᵢ: worst deviation over an x-grid between αᵢvᵢ(x) and the U-side rule
    /// applied to e^{−x(t+d)}uᵢ(t), for i < n.
    pub etilde: Vec<Big>,
    /// ‖A†‖₂ of the double-precision interpolation matrix A[k][i] = vᵢ(s_k).
    pub a_pinv_norm: f64,
    /// The weight bound √2·max_k √w_k that ‖A†‖₂ is compared against.
    pub a_pinv_bound: f64,
}

/// Per-precision evaluation tables for the Nyström representation.
#[derive(Debug, Clone)]
struct EvalSet {
    bits: u32,
    /// t_q + 2d per mesh node (denominator shift of the T*T kernel).
    t2d: Vec<Big>,
    /// t_q + d per mesh node (exponent shift of T itself).
    tpd: Vec<Big>,
    /// uw[i][q] = uᵢ(t_q)·w_q — the vector the kernels get dotted against.
    uw: Vec<Vec<Big>>,
}

/// A scan hit while locating roots of v_n: either an exact zero at a mesh
/// point, or a sign-change bracket carrying the exponential state at its left
/// endpoint so bisection can continue multiplicatively.
enum Hit {
    Exact(Big),
    Change {
        lo_pos: Big,
        lo_ev: Vec<Big>,
        lo_neg: bool,
    },
}

/// Computed singular system of T for one band: singular values α₀..α_{n_max},
/// right singular functions uᵢ stored by their mesh-node values, and machinery
/// to evaluate uᵢ (with derivatives), vᵢ, and the derived quadrature rules.
///
/// Immutable after construction; all methods are read-only.
#[derive(Debug, Clone)]
pub struct LaplaceSvd {
    band: Band,
    digits: u32,
    wbits: u32,
    ebits: u32,
    mesh: QuadRule,
    alphas: Vec<Big>,
    u_nodes: Vec<Vec<Big>>,
    hi: EvalSet,
    lo: EvalSet,
    ints_u: Vec<Big>,
    ints_v: Vec<Big>,
    n_max: usize,
}

/// Computes the singular system of the band's transform.
///
/// `digits` is the requested decimal accuracy (≥ 40); internal arithmetic runs
/// at roughly twice that to absorb the cancellation in resolving singular
/// values far below α₀. `mesh_size` is the Gauss–Legendre Nyström mesh size on
/// [0,1] and must be at least 4·n_max; mesh convergence is verified by
/// recomputing the singular values on a 3/2-times finer mesh and requiring 10
/// significant digits of agreement.
///
/// The delivered spectrum may be shorter than requested: singular values below
/// α₀·10^(−digits+20) sit outside the reliable range at this precision and are
/// trimmed, so callers should consult [`LaplaceSvd::n_max`].
pub fn build(band: Band, n_max: usize, digits: u32, mesh_size: usize) -> Result<LaplaceSvd> {
    if n_max < 1 {
        return Err(Error::Parameter("build: n_max must be >= 1".into()));
    }
    if digits < 40 {
        return Err(Error::Parameter(
            "build: working precision must be at least 40 digits".into(),
        ));
    }
    if mesh_size < 4 * n_max {
        return Err(Error::Parameter(format!(
            "build: mesh_size {mesh_size} is below 4*n_max = {}",
            4 * n_max
        )));
    }
    let wbits = bits_for_digits(2 * digits + 14);
    let ebits = bits_for_digits(digits);
    let mesh = gauss_legendre(mesh_size, 0.0, 1.0, wbits)?;
    let d = band.d_big(wbits);

    let (alphas_all, u_all) = spectrum(&mesh, &d, digits, true)?;
    if alphas_all.is_empty() {
        return Err(Error::Precision(
            "build: no positive eigenvalues recovered".into(),
        ));
    }

    // Trim to the reliable part of the spectrum: strictly decreasing, positive,
    // and no smaller than α₀·10^(−digits+20).
    let floor = Big::with_val(wbits, &alphas_all[0] * &pow10(wbits, 20 - digits as i64));
    let mut keep = 0usize;
    for (i, alpha) in alphas_all.iter().enumerate() {
        if *alpha < floor || (i > 0 && *alpha >= alphas_all[i - 1]) {
            break;
        }
        keep = i + 1;
    }
    if keep < 2 {
        return Err(Error::Precision(
            "build: fewer than two reliable singular values; increase digits".into(),
        ));
    }
    let requested = n_max.min(keep - 1);
    let mut alphas: Vec<Big> = alphas_all[..=requested].to_vec();
    let mut u_nodes: Vec<Vec<Big>> = u_all.expect("vectors requested")[..=requested].to_vec();

    // Mesh-convergence check: deliver only the leading singular values that
    // are stable to 10 significant digits under a 3/2 mesh refinement. A
    // trailing under-resolved range is trimmed off (like the precision floor
    // above); a mesh that cannot stabilize even the first two values is
    // unusable.
    let fine_mesh = gauss_legendre(3 * mesh_size / 2, 0.0, 1.0, wbits)?;
    let (alphas_fine, _) = spectrum(&fine_mesh, &d, digits, false)?;
    let tol = pow10(wbits, -10);
    let mut stable = 0usize;
    for i in 0..=requested {
        if i >= alphas_fine.len() {
            break;
        }
        let rel = Big::with_val(wbits, &alphas[i] - &alphas_fine[i]).abs() / &alphas[i];
        if rel > tol {
            break;
        }
        stable = i + 1;
    }
    if stable < 2 {
        return Err(Error::Precision(format!(
            "build: only {stable} singular value(s) stable under mesh refinement; \
             increase mesh_size or digits"
        )));
    }
    let delivered = stable - 1;
    alphas.truncate(delivered + 1);
    u_nodes.truncate(delivered + 1);

    // Evaluation tables at both working precisions.
    let make_set = |bits: u32| -> EvalSet {
        let db = band.d_big(bits);
        let two_d = Big::with_val(bits, &db + &db);
        let t2d = mesh
            .nodes
            .iter()
            .map(|t| Big::with_val(bits, t + &two_d))
            .collect();
        let tpd = mesh
            .nodes
            .iter()
            .map(|t| Big::with_val(bits, t + &db))
            .collect();
        let uw = u_nodes
            .iter()
            .map(|ui| {
                ui.iter()
                    .zip(&mesh.weights)
                    .map(|(u, w)| (u * w).complete(bits))
                    .collect()
            })
            .collect();
        EvalSet {
            bits,
            t2d,
            tpd,
            uw,
        }
    };
    let hi = make_set(wbits);
    let lo = make_set(ebits);

    // ∫₀¹ uᵢ and ∫₀^∞ vᵢ = (1/αᵢ)∫₀¹ uᵢ(t)/(t+d) dt, both by the mesh rule.
    let ints_u: Vec<Big> = hi
        .uw
        .iter()
        .map(|uwi| {
            let mut acc = Big::new(wbits);
            for e in uwi {
                acc += e;
            }
            acc
        })
        .collect();
    let ints_v: Vec<Big> = hi
        .uw
        .iter()
        .zip(&alphas)
        .map(|(uwi, alpha)| {
            let mut acc = Big::new(wbits);
            for (e, tpd) in uwi.iter().zip(&hi.tpd) {
                acc += (e / tpd).complete(wbits);
            }
            acc / alpha
        })
        .collect();

    Ok(LaplaceSvd {
        band,
        digits,
        wbits,
        ebits,
        mesh,
        alphas,
        u_nodes,
        hi,
        lo,
        ints_u,
        ints_v,
        n_max: delivered,
    })
}

/// Nyström spectrum of T*T on the given mesh: singular values (descending)
/// and, when requested, the u-eigenfunction values at the mesh nodes with the
/// u(1) > 0 sign convention applied.
///
/// The weighted kernel matrix B[p][q] = √w_p √w_q K(t_p,t_q) is symmetric
/// positive definite; a pivoted Cholesky factorization B ≈ LLᵀ truncated at
/// relative pivot 10^(10−2·digits) compresses it to numerical rank r, and the
/// r×r core LᵀL shares its nonzero spectrum.
fn spectrum(
    mesh: &QuadRule,
    d: &Big,
    digits: u32,
    with_vectors: bool,
) -> Result<(Vec<Big>, Option<Vec<Vec<Big>>>)> {
    let bits = d.prec();
    let m = mesh.nodes.len();
    let two_d = Big::with_val(bits, d + d);
    let sqrt_w: Vec<Big> = mesh.weights.iter().map(|w| w.clone().sqrt()).collect();

    let trunc = pow10(bits, 10 - 2 * digits as i64);
    let mut diag: Vec<Big> = (0..m)
        .map(|p| {
            let den =
                Big::with_val(bits, (&mesh.nodes[p] + &mesh.nodes[p]).complete(bits) + &two_d);
            Big::with_val(bits, (&sqrt_w[p] * &sqrt_w[p]).complete(bits) / den)
        })
        .collect();
    let mut in_basis = vec![false; m];
    let mut lcols: Vec<Vec<Big>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    let mut stop = Big::new(bits);
    loop {
        let mut best: Option<usize> = None;
        for p in 0..m {
            if !in_basis[p] && best.map_or(true, |b| diag[p] > diag[b]) {
                best = Some(p);
            }
        }
        let Some(pj) = best else { break };
        if pivots.is_empty() {
            stop = Big::with_val(bits, &trunc * &diag[pj]);
        } else if diag[pj] <= stop {
            break;
        }
        let piv_sqrt = diag[pj].clone().sqrt();
        let prior: Vec<Big> = lcols.iter().map(|c| c[pj].clone()).collect();
        let mut col = vec![Big::new(bits); m];
        for p in 0..m {
            if in_basis[p] {
                continue;
            }
            if p == pj {
                col[p] = piv_sqrt.clone();
                continue;
            }
            let den =
                Big::with_val(bits, (&mesh.nodes[p] + &mesh.nodes[pj]).complete(bits) + &two_d);
            let mut entry = Big::with_val(bits, (&sqrt_w[p] * &sqrt_w[pj]).complete(bits) / den);
            for (c, pr) in lcols.iter().zip(&prior) {
                entry -= (&c[p] * pr).complete(bits);
            }
            entry /= &piv_sqrt;
            diag[p] -= (&entry * &entry).complete(bits);
            col[p] = entry;
        }
        in_basis[pj] = true;
        pivots.push(pj);
        lcols.push(col);
        if pivots.len() == m {
            break;
        }
    }
    let r = pivots.len();
    if r < 2 {
        return Err(Error::Precision(
            "spectrum: kernel Gram matrix has numerical rank < 2".into(),
        ));
    }

    // Core matrix C = LᵀL shares the nonzero spectrum of B ≈ LLᵀ.
    let mut core = vec![vec![Big::new(bits); r]; r];
    for i in 0..r {
        for j in 0..=i {
            let v = dot(bits, &lcols[i], &lcols[j]);
            core[i][j] = v.clone();
            core[j][i] = v;
        }
    }

    if !with_vectors {
        let lambdas = sym_eig_values(&core)?;
        let alphas = lambdas
            .into_iter()
            .take_while(|l| *l > 0)
            .map(|l| l.sqrt())
            .collect();
        return Ok((alphas, None));
    }

    let eig = sym_eig(&core)?;
    let mut alphas = Vec::new();
    let mut u_nodes = Vec::new();
    for (lambda, q) in eig.eigenvalues.iter().zip(&eig.eigenvectors) {
        if !(*lambda > 0) {
            break;
        }
        let alpha = lambda.clone().sqrt();
        // φ = L·q/√λ is the unit eigenvector of B; u(t_p) = φ_p/√w_p.
        let mut phi = vec![Big::new(bits); m];
        for (c, qj) in lcols.iter().zip(q) {
            for (ph, cp) in phi.iter_mut().zip(c) {
                *ph += (cp * qj).complete(bits);
            }
        }
        for ph in phi.iter_mut() {
            *ph /= &alpha;
        }
        // Sign convention u(1) > 0 via the Nyström extension at t = 1; the
        // numerator Σ_q φ_q √w_q/(1+t_q+2d) carries its sign. If u(1) is too
        // small to be trusted, fall back to the mesh node of largest |u|.
        let mut num = Big::new(bits);
        for ((ph, sw), t) in phi.iter().zip(&sqrt_w).zip(&mesh.nodes) {
            let den = Big::with_val(bits, (t + &two_d).complete(bits) + 1u32);
            num += (ph * sw).complete(bits) / den;
        }
        let u1 = Big::with_val(bits, &num / lambda);
        let tiny = pow10(bits, -((digits / 2) as i64));
        let flip = if u1.clone().abs() >= tiny {
            u1 < 0
        } else {
            let mut best = 0usize;
            let mut best_abs = Big::new(bits);
            for (p, (ph, sw)) in phi.iter().zip(&sqrt_w).enumerate() {
                let a = Big::with_val(bits, ph / sw).abs();
                if a > best_abs {
                    best_abs = a;
                    best = p;
                }
            }
            (&phi[best] / &sqrt_w[best]).complete(bits) < 0
        };
        let u: Vec<Big> = phi
            .iter()
            .zip(&sqrt_w)
            .map(|(ph, sw)| {
                let v = (ph / sw).complete(bits);
                if flip {
                    -v
                } else {
                    v
                }
            })
            .collect();
        alphas.push(alpha);
        u_nodes.push(u);
    }
    Ok((alphas, Some(u_nodes)))
}

impl LaplaceSvd {
    pub fn band(&self) -> Band {
        self.band
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// Largest computed index: the spectrum runs α₀..α_{n_max}.
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Singular values α₀ > α₁ > … > α_{n_max} at working precision.
    pub fn alphas(&self) -> &[Big] {
        &self.alphas
    }

    pub fn alpha_f64(&self, i: usize) -> f64 {
        self.alphas[i].to_f64()
    }

    /// The Nyström mesh on [0,1].
    pub fn mesh(&self) -> &QuadRule {
        &self.mesh
    }

    pub(crate) fn wbits(&self) -> u32 {
        self.wbits
    }

    /// ∫₀¹ uᵢ by the mesh rule.
    #[cfg(test)]
    pub(crate) fn int_u(&self, i: usize) -> &Big {
        &self.ints_u[i]
    }

    /// ∫₀^∞ vᵢ = (1/αᵢ)∫₀¹ uᵢ(t)/(t+d) dt by the mesh rule.
    #[cfg(test)]
    pub(crate) fn int_v(&self, i: usize) -> &Big {
        &self.ints_v[i]
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i > self.n_max {
            return Err(Error::Index(format!(
                "singular index {i} beyond computed n_max = {}",
                self.n_max
            )));
        }
        Ok(())
    }

    /// Vector 1/(t + t_q + 2d) over the mesh, at the set's precision.
    fn recip_vec(set: &EvalSet, t: &Big) -> Vec<Big> {
        set.t2d
            .iter()
            .map(|s| Big::with_val(set.bits, t + s).recip())
            .collect()
    }

    /// Vector e^{−x(t_q + d)} over the mesh, at the set's precision.
    fn exp_vec(set: &EvalSet, x: &Big) -> Vec<Big> {
        set.tpd
            .iter()
            .map(|s| (-Big::with_val(set.bits, x * s)).exp())
            .collect()
    }

    /// uᵢ^{(m)}(t) from a precomputed vector of 1/(t+t_q+2d)^{m+1}:
    /// ((−1)^m m!/αᵢ²)·Σ_q pows_q·uᵢ(t_q)·w_q.
    fn ext_u_from_pows(&self, set: &EvalSet, i: usize, pows: &[Big], m: usize) -> Big {
        let bits = set.bits;
        let mut val = dot(bits, pows, &set.uw[i]);
        if m > 0 {
            let mut fact = big_i(bits, 1);
            for j in 2..=m {
                fact *= j as u32;
            }
            val *= fact;
            if m % 2 == 1 {
                val = -val;
            }
        }
        let lambda = (&self.alphas[i] * &self.alphas[i]).complete(bits);
        val / lambda
    }

    /// uᵢ^{(m)}(t) for t ∈ [0,1] via the Nyström extension
    /// uᵢ(t) = (1/αᵢ²)·Σ_q uᵢ(t_q)·w_q/(t+t_q+2d), differentiated through the
    /// kernel: ∂ₜ^m 1/(t+s+2d) = (−1)^m m!/(t+s+2d)^{m+1}.
    pub fn eval_u(&self, i: usize, t: &Big, m: usize) -> Result<Big> {
        self.check_index(i)?;
        if !(*t >= 0 && *t <= 1) {
            return Err(Error::Parameter(format!(
                "eval_u: t = {} outside [0,1]",
                t.to_f64()
            )));
        }
        let recip = Self::recip_vec(&self.hi, t);
        if m == 0 {
            return Ok(self.ext_u_from_pows(&self.hi, i, &recip, 0));
        }
        let pows: Vec<Big> = recip
            .iter()
            .map(|r| Big::with_val(self.wbits, r.pow((m + 1) as u32)))
            .collect();
        Ok(self.ext_u_from_pows(&self.hi, i, &pows, m))
    }

    /// vᵢ(x) = (1/αᵢ)∫₀¹ e^{−x(t+d)} uᵢ(t) dt by the mesh rule, for x ≥ 0.
    pub fn eval_v(&self, i: usize, x: &Big) -> Result<Big> {
        self.check_index(i)?;
        if !(*x >= 0) {
            return Err(Error::Parameter(format!(
                "eval_v: x = {} is negative",
                x.to_f64()
            )));
        }
        let ev = Self::exp_vec(&self.hi, x);
        Ok(dot(self.wbits, &ev, &self.hi.uw[i]) / &self.alphas[i])
    }

    /// The n-point generalized quadrature rule of one side: nodes are the n
    /// roots of u_n (side U, in (0,1)) or v_n (side V, in (0,∞) under an
    /// adaptive upper search bound), and the weights solve the n×n moment
    /// system reproducing ∫uᵢ (resp. ∫vᵢ) for i < n.
    ///
    /// Root location runs at the user precision with the scan-then-bisect
    /// contract of `find_roots` (100·n-point scans, bisection to relative gap
    /// 10^(10−digits)); the moment system is formed and solved at the full
    /// internal precision. Nonpositive solved weights or non-increasing nodes
    /// are invariant violations.
    pub fn nodes_and_weights(&self, n: usize, side: Side) -> Result<SideRule> {
        if n < 1 || n + 1 > self.n_max {
            return Err(Error::Parameter(format!(
                "nodes_and_weights: need 1 <= n <= n_max-1 = {}, got {n}",
                self.n_max.saturating_sub(1)
            )));
        }
        match side {
            Side::U => self.u_side_rule(n),
            Side::V => self.v_side_rule(n),
        }
    }

    fn u_side_rule(&self, n: usize) -> Result<SideRule> {
        let lo = big(self.ebits, 0.0);
        let hi = big(self.ebits, 1.0);
        // Sign function of u_n: the extension numerator Σ_q uw_q/(t+t_q+2d)
        // (the positive prefactor 1/α_n² cannot change the sign).
        let roots = find_roots(
            |t| {
                let recip = Self::recip_vec(&self.lo, t);
                dot(self.ebits, &recip, &self.lo.uw[n])
            },
            &lo,
            &hi,
            n,
        )?;
        let nodes: Vec<Big> = roots
            .iter()
            .map(|r| Big::with_val(self.wbits, r))
            .collect();

        // Moment system: Σ_k w̃_k uᵢ(t̃_k) = ∫₀¹uᵢ for i = 0..n−1.
        let mut mat = vec![vec![Big::new(self.wbits); n]; n];
        for (k, node) in nodes.iter().enumerate() {
            let recip = Self::recip_vec(&self.hi, node);
            for (i, row) in mat.iter_mut().enumerate() {
                row[k] = self.ext_u_from_pows(&self.hi, i, &recip, 0);
            }
        }
        let rhs: Vec<Big> = (0..n).map(|i| self.ints_u[i].clone()).collect();
        let weights = solve_dense(mat, rhs)?;
        finish_rule(Side::U, nodes, weights)
    }

    fn v_side_rule(&self, n: usize) -> Result<SideRule> {
        let base_span = 20.0 * (n as f64 + 1.0);
        let mut span = base_span;
        let mut found: Option<Vec<Big>> = None;
        for _attempt in 0..=8 {
            match self.v_scan(n, base_span, span)? {
                Some(roots) => {
                    found = Some(roots);
                    break;
                }
                None => span *= 2.0,
            }
        }
        let Some(roots) = found else {
            return Err(Error::RootCount(format!(
                "v-side rule: could not isolate the {n} roots of v_{n} within \
                 search span {span}"
            )));
        };
        let nodes: Vec<Big> = roots
            .iter()
            .map(|r| Big::with_val(self.wbits, r))
            .collect();

        // Moment system: Σ_k w_k vᵢ(s_k) = ∫₀^∞vᵢ for i = 0..n−1.
        let evs: Vec<Vec<Big>> = nodes.iter().map(|s| Self::exp_vec(&self.hi, s)).collect();
        let mut mat = vec![vec![Big::new(self.wbits); n]; n];
        for (k, ev) in evs.iter().enumerate() {
            for (i, row) in mat.iter_mut().enumerate() {
                row[k] = dot(self.wbits, ev, &self.hi.uw[i]) / &self.alphas[i];
            }
        }
        let rhs: Vec<Big> = (0..n).map(|i| self.ints_v[i].clone()).collect();
        let weights = solve_dense(mat, rhs)?;
        finish_rule(Side::V, nodes, weights)
    }

    /// One deterministic scan-and-refine pass for the n roots of v_n on
    /// (0, span]. Returns the refined roots, or None when the span is too
    /// short (missing sign changes, or a tail that has not decayed yet — the
    /// caller then doubles the span). More than n sign changes anywhere is a
    /// hard root-count error.
    ///
    /// The scan walks a uniform mesh whose step matches the 100·n points of
    /// the base span, exploiting e^{−(s+h)(t+d)} = e^{−s(t+d)}·e^{−h(t+d)}:
    /// each step costs one elementwise product. Bisection and local refinement
    /// halve steps with the square-root cascade of the same factor vector. A
    /// deficit of sign changes triggers re-scans of the leading subinterval
    /// (roots of v_n cluster toward 0) at doubled density before giving up.
    /// After all n roots are found, |Σ_q uw_q e^{−s(t_q+d)}| at
    /// s ∈ {1.25, 1.5, 2}·span must be below 2^{−10} ≈ 10^{−3} of the scanned
    /// maximum, confirming no further roots hide beyond the span.
    fn v_scan(&self, n: usize, base_span: f64, span: f64) -> Result<Option<Vec<Big>>> {
        let set = &self.lo;
        let bits = set.bits;
        let uwn = &set.uw[n];
        let steps = (((100 * n) as f64) * (span / base_span)).round() as usize;
        let steps = steps.max(100 * n);
        let h = Big::with_val(bits, big(bits, span) / (steps as u32));
        let factor: Vec<Big> = Self::exp_vec(set, &h);

        let mut ev: Vec<Big> = vec![big_i(bits, 1); uwn.len()];
        let mut prev_ev = ev.clone();
        let mut val = {
            let mut acc = Big::new(bits);
            for e in uwn {
                acc += e;
            }
            acc
        };
        let mut max_abs = val.clone().abs();
        let mut prev_sign = sign_of(&val);
        let mut hits: Vec<(usize, Hit)> = Vec::new();
        for k in 1..=steps {
            std::mem::swap(&mut ev, &mut prev_ev);
            for (e, (p, f)) in ev.iter_mut().zip(prev_ev.iter().zip(&factor)) {
                *e = (p * f).complete(bits);
            }
            val = dot(bits, &ev, uwn);
            let a = val.clone().abs();
            if a > max_abs {
                max_abs = a;
            }
            let sign = sign_of(&val);
            if sign == 0 {
                hits.push((k, Hit::Exact(Big::with_val(bits, &h * (k as u32)))));
            } else if prev_sign != 0 && sign != prev_sign {
                hits.push((
                    k,
                    Hit::Change {
                        lo_pos: Big::with_val(bits, &h * (k as u32 - 1)),
                        lo_ev: prev_ev.clone(),
                        lo_neg: prev_sign < 0,
                    },
                ));
            }
            prev_sign = sign;
            if hits.len() > n {
                return Err(Error::RootCount(format!(
                    "v-side rule: more than {n} sign changes for v_{n}"
                )));
            }
        }

        // Square-root cascade of the step factor, shared by refinement and
        // bisection: cascade[j][q] = factor[q]^(1/2^j), the step for h/2^j.
        let mut cascade: Vec<Vec<Big>> = vec![factor];

        if hits.len() < n {
            return self.v_scan_refine(n, span, hits, &h, steps, &max_abs, &mut cascade);
        }

        let mut roots = Vec::with_capacity(n);
        for (_, hit) in hits {
            roots.push(self.resolve_hit(hit, 0, &h, &mut cascade, uwn));
        }
        if self.v_tail_confirms(span, &max_abs, uwn) {
            Ok(Some(roots))
        } else {
            Ok(None)
        }
    }

    /// Deficit path of the scan: missing roots cluster near s = 0 below the
    /// first detected hit, so re-scan [0, first hit] at densities doubled up
    /// to 2^12 until exactly the missing count of sign changes appears there.
    #[allow(clippy::too_many_arguments)]
    fn v_scan_refine(
        &self,
        n: usize,
        span: f64,
        hits: Vec<(usize, Hit)>,
        h: &Big,
        steps: usize,
        max_abs: &Big,
        cascade: &mut Vec<Vec<Big>>,
    ) -> Result<Option<Vec<Big>>> {
        let set = &self.lo;
        let bits = set.bits;
        let uwn = &set.uw[n];
        let k_end = hits
            .first()
            .map_or(steps.min(64), |(k, _)| *k)
            .min(steps)
            .min(256);
        let tail: Vec<Hit> = hits
            .into_iter()
            .filter(|(k, _)| *k > k_end)
            .map(|(_, hit)| hit)
            .collect();
        let missing = n - tail.len();
        for dbl in 1..=12usize {
            ensure_cascade_level(cascade, dbl);
            let fine = cascade[dbl].clone();
            let fine_steps = k_end << dbl;
            let hstep = (h >> (dbl as u32)).complete(bits);
            let mut ev: Vec<Big> = vec![big_i(bits, 1); uwn.len()];
            let mut prev_ev = ev.clone();
            let mut val = {
                let mut acc = Big::new(bits);
                for e in uwn {
                    acc += e;
                }
                acc
            };
            let mut prev_sign = sign_of(&val);
            let mut front: Vec<Hit> = Vec::new();
            let mut surplus = false;
            for k in 1..=fine_steps {
                std::mem::swap(&mut ev, &mut prev_ev);
                for (e, (p, f)) in ev.iter_mut().zip(prev_ev.iter().zip(&fine)) {
                    *e = (p * f).complete(bits);
                }
                val = dot(bits, &ev, uwn);
                let sign = sign_of(&val);
                if sign == 0 {
                    front.push(Hit::Exact(Big::with_val(bits, &hstep * (k as u32))));
                } else if prev_sign != 0 && sign != prev_sign {
                    front.push(Hit::Change {
                        lo_pos: Big::with_val(bits, &hstep * (k as u32 - 1)),
                        lo_ev: prev_ev.clone(),
                        lo_neg: prev_sign < 0,
                    });
                }
                prev_sign = sign;
                if front.len() > missing {
                    surplus = true;
                    break;
                }
            }
            if surplus {
                return Err(Error::RootCount(format!(
                    "v-side rule: more than {n} sign changes for v_{n} after \
                     refinement"
                )));
            }
            if front.len() == missing {
                let mut roots = Vec::with_capacity(n);
                for hit in front {
                    roots.push(self.resolve_hit(hit, dbl, h, cascade, uwn));
                }
                for hit in tail {
                    roots.push(self.resolve_hit(hit, 0, h, cascade, uwn));
                }
                if self.v_tail_confirms(span, max_abs, uwn) {
                    return Ok(Some(roots));
                }
                return Ok(None);
            }
        }
        Ok(None)
    }

    /// Bisect one scan hit down to relative gap 10^(10−digits). The bracket
    /// width starts at h/2^level; each halving multiplies the left-endpoint
    /// exponential state by the next cascade factor to reach the midpoint.
    fn resolve_hit(
        &self,
        hit: Hit,
        level: usize,
        h: &Big,
        cascade: &mut Vec<Vec<Big>>,
        uwn: &[Big],
    ) -> Big {
        let bits = self.ebits;
        let (mut lo_pos, mut ev, lo_neg) = match hit {
            Hit::Exact(p) => return p,
            Hit::Change {
                lo_pos,
                lo_ev,
                lo_neg,
            } => (lo_pos, lo_ev, lo_neg),
        };
        let rel_tol = pow10(bits, 10 - self.digits as i64);
        let max_iters = (bits as usize) + 64;
        let mut depth = level; // current bracket width is h/2^depth
        for _ in 0..max_iters {
            let width = (h >> (depth as u32)).complete(bits);
            let hi_end = (&lo_pos + &width).complete(bits);
            if width <= (&rel_tol * &hi_end).complete(bits) {
                break;
            }
            ensure_cascade_level(cascade, depth + 1);
            let half = (h >> (depth as u32 + 1)).complete(bits);
            let mid_ev: Vec<Big> = ev
                .iter()
                .zip(&cascade[depth + 1])
                .map(|(e, f)| (e * f).complete(bits))
                .collect();
            let val = dot(bits, &mid_ev, uwn);
            let sign = sign_of(&val);
            if sign == 0 {
                return lo_pos + half;
            }
            if (sign < 0) == lo_neg {
                lo_pos += half;
                ev = mid_ev;
            }
            depth += 1;
        }
        lo_pos + (h >> (depth as u32 + 1)).complete(bits)
    }

    /// Tail gate: |α_n v_n| sampled beyond the span must sit below 2^{−10} of
    /// the scanned maximum, evidence that all n roots lie inside the span.
    fn v_tail_confirms(&self, span: f64, max_abs: &Big, uwn: &[Big]) -> bool {
        let bits = self.ebits;
        let gate = (max_abs >> 10u32).complete(bits);
        for mult in [1.25f64, 1.5, 2.0] {
            let x = big(bits, span * mult);
            let ev = Self::exp_vec(&self.lo, &x);
            let val = dot(bits, &ev, uwn).abs();
            if val > gate {
                return false;
            }
        }
        true
    }

    /// Worst quadrature error of the rule on the orthonormal products of its
    /// own side: E = max_{i,j<n} |δᵢⱼαᵢ² − Σ_k w_k·αᵢφᵢ(x_k)·αⱼφⱼ(x_k)| with
    /// φ = u (side U) or φ = v (side V).
    pub fn gram_error(&self, n: usize, rule: &SideRule) -> Result<Big> {
        self.gram_error_impl(n, rule, false)
    }

    /// Halved variant for V-side rules: the products are sampled at x_k/2 with
    /// weights w_k/2. Substituting x → x/2 shows this measures how well the
    /// rule handles the dilated products vᵢ(·/2)vⱼ(·/2), a strictly harder
    /// family than the products the rule was fitted on.
    pub fn gram_error_halved(&self, n: usize, rule: &SideRule) -> Result<Big> {
        if rule.side != Side::V {
            return Err(Error::Parameter(
                "gram_error_halved: rule must be V-side".into(),
            ));
        }
        self.gram_error_impl(n, rule, true)
    }

    fn gram_error_impl(&self, n: usize, rule: &SideRule, halved: bool) -> Result<Big> {
        if rule.n() != n {
            return Err(Error::Parameter(format!(
                "gram_error: rule has {} nodes, expected n = {n}",
                rule.n()
            )));
        }
        if n > self.n_max {
            return Err(Error::Index(format!(
                "gram_error: n = {n} beyond n_max = {}",
                self.n_max
            )));
        }
        let bits = self.wbits;
        // a[i][k] = αᵢφᵢ(x_k): for side U, α·u = (Σ_q uw_q/(x+t_q+2d))/α; for
        // side V, α·v = Σ_q uw_q·e^{−x(t_q+d)}.
        let mut a = vec![vec![Big::new(bits); n]; n];
        for (k, node) in rule.nodes.iter().enumerate() {
            match rule.side {
                Side::U => {
                    let recip = Self::recip_vec(&self.hi, node);
                    for (i, row) in a.iter_mut().enumerate() {
                        row[k] = dot(bits, &recip, &self.hi.uw[i]) / &self.alphas[i];
                    }
                }
                Side::V => {
                    let x = if halved {
                        (node >> 1u32).complete(bits)
                    } else {
                        node.clone()
                    };
                    let ev = Self::exp_vec(&self.hi, &x);
                    for (i, row) in a.iter_mut().enumerate() {
                        row[k] = dot(bits, &ev, &self.hi.uw[i]);
                    }
                }
            }
        }
        let weights: Vec<Big> = rule
            .weights
            .iter()
            .map(|w| {
                if halved {
                    (w >> 1u32).complete(bits)
                } else {
                    w.clone()
                }
            })
            .collect();
        let mut worst = Big::new(bits);
        for i in 0..n {
            for j in 0..=i {
                let mut acc = Big::new(bits);
                for k in 0..n {
                    acc += (&weights[k] * &(&a[i][k] * &a[j][k]).complete(bits)).complete(bits);
                }
                if i == j {
                    acc -= (&self.alphas[i] * &self.alphas[i]).complete(bits);
                }
                let dev = acc.abs();
                if dev > worst {
                    worst = dev;
                }
            }
        }
        Ok(worst)
    }

    /// Orthonormality defect of the computed right singular functions on the
    /// build mesh: max over i,j < n of |Σ_k w_k·uᵢ(t_k)·uⱼ(t_k) − δᵢⱼ|.
    /// The Nyström construction orthonormalizes against exactly this rule, so
    /// the defect measures the conditioning of the eigendecomposition rather
    /// than quadrature error.
    pub fn orthonormality_error(&self, n: usize) -> Result<Big> {
        if n < 1 || n > self.n_max + 1 {
            return Err(Error::Index(format!(
                "orthonormality_error: need 1 <= n <= {}, got {n}",
                self.n_max + 1
            )));
        }
        let bits = self.wbits;
        let weights = &self.mesh.weights;
        let mut worst = Big::new(bits);
        for i in 0..n {
            for j in 0..=i {
                let mut acc = Big::new(bits);
                for (k, w) in weights.iter().enumerate() {
                    acc += (w * &(&self.u_nodes[i][k] * &self.u_nodes[j][k]).complete(bits))
                        .complete(bits);
                }
                if i == j {
                    acc -= 1u32;
                }
                let dev = acc.abs();
                if dev > worst {
                    worst = dev;
                }
            }
        }
        Ok(worst)
    }

    /// Transplant errors Ẽᵢ of a U-side rule: the rule applied to
    /// e^{−x(t+d)}uᵢ(t) should reproduce αᵢvᵢ(x); Ẽᵢ is the worst deviation
    /// over a 50-point x-grid on [0, 1.1·20(n+1)], for each i < n.
    pub fn etilde(&self, rule: &SideRule) -> Result<Vec<Big>> {
        if rule.side != Side::U {
            return Err(Error::Parameter("etilde: rule must be U-side".into()));
        }
        let n = rule.n();
        let bits = self.wbits;
        let db = self.band.d_big(bits);
        // uᵢ(t̃_k) and t̃_k + d at the rule nodes.
        let mut u_at = vec![vec![Big::new(bits); n]; n];
        for (k, node) in rule.nodes.iter().enumerate() {
            let recip = Self::recip_vec(&self.hi, node);
            for (i, row) in u_at.iter_mut().enumerate() {
                row[k] = self.ext_u_from_pows(&self.hi, i, &recip, 0);
            }
        }
        let node_pd: Vec<Big> = rule
            .nodes
            .iter()
            .map(|t| Big::with_val(bits, t + &db))
            .collect();
        let hi_x = 1.1 * 20.0 * (n as f64 + 1.0);
        let mut worst = vec![Big::new(bits); n];
        for g in 0..50usize {
            let x = big(bits, hi_x * (g as f64) / 49.0);
            let ev = Self::exp_vec(&self.hi, &x);
            let e_nodes: Vec<Big> = node_pd
                .iter()
                .map(|s| (-Big::with_val(bits, &x * s)).exp())
                .collect();
            for i in 0..n {
                let alpha_v = dot(bits, &ev, &self.hi.uw[i]);
                let mut quad = Big::new(bits);
                for k in 0..n {
                    quad += (&rule.weights[k] * &(&e_nodes[k] * &u_at[i][k]).complete(bits))
                        .complete(bits);
                }
                let dev = Big::with_val(bits, &alpha_v - &quad).abs();
                if dev > worst[i] {
                    worst[i] = dev;
                }
            }
        }
        Ok(worst)
    }

    /// Conditioning of V-side collocation in double precision: builds
    /// A[k][i] = vᵢ(s_k) as an n×n f64 matrix and returns (‖A†‖₂, bound) with
    /// bound = √2·max_k √w_k. A well-conditioned rule keeps ‖A†‖₂ ≤ bound.
    pub fn interp_conditioning(&self, n: usize, rule: &SideRule) -> Result<(f64, f64)> {
        if rule.side != Side::V {
            return Err(Error::Parameter(
                "interp_conditioning: rule must be V-side".into(),
            ));
        }
        if rule.n() != n {
            return Err(Error::Parameter(format!(
                "interp_conditioning: rule has {} nodes, expected n = {n}",
                rule.n()
            )));
        }
        let mut a = vec![vec![0f64; n]; n];
        for (k, node) in rule.nodes.iter().enumerate() {
            let ev = Self::exp_vec(&self.hi, node);
            for (i, col) in a.iter_mut().enumerate() {
                col[k] = (dot(self.wbits, &ev, &self.hi.uw[i]) / &self.alphas[i]).to_f64();
            }
        }
        // a holds a[i][k] = vᵢ(s_k); transpose to A[k][i].
        let mut at = vec![vec![0f64; n]; n];
        for (i, row) in a.iter().enumerate() {
            for (k, val) in row.iter().enumerate() {
                at[k][i] = *val;
            }
        }
        let svd = svd_double(&at)?;
        let smin = *svd.s.last().expect("n >= 1");
        let norm = if smin > 0.0 { 1.0 / smin } else { f64::INFINITY };
        let bound = std::f64::consts::SQRT_2
            * rule
                .weights
                .iter()
                .map(|w| w.to_f64().sqrt())
                .fold(0.0f64, f64::max);
        Ok((norm, bound))
    }

    /// Builds both practical n-point rules and collects their diagnostics.
    pub fn diagnostics(&self, n: usize) -> Result<SvdDiagnostics> {
        let urule = self.nodes_and_weights(n, Side::U)?;
        let vrule = self.nodes_and_weights(n, Side::V)?;
        let e1 = self.gram_error(n, &urule)?;
        let e2 = self.gram_error(n, &vrule)?;
        let etilde = self.etilde(&urule)?;
        let (a_pinv_norm, a_pinv_bound) = self.interp_conditioning(n, &vrule)?;
        Ok(SvdDiagnostics {
            e1,
            e2,
            etilde,
            a_pinv_norm,
            a_pinv_bound,
        })
    }

    /// sups[i][m] = max over the given t-grid of |uᵢ^{(m)}(t)|, for i < n and
    /// m ≤ k. Runs at a reduced precision sufficient for the cancellation in
    /// the extension sums (2·log10(α₀/α_{n−1}) + 30 digits), since suprema are
    /// only needed to a few digits; the power vectors 1/(t+t_q+2d)^{m+1} are
    /// shared across i and built incrementally across m.
    /// sups[i] = max over the given x-grid (x ≥ 0) of |vᵢ(x)| for i ≤ i_hi,
    /// with the kernel exponential vector shared across i per grid point and
    /// a reduced precision covering the cancellation ratio α₀/α_{i_hi}.
    pub(crate) fn v_sup_norms(&self, i_hi: usize, grid: &[f64]) -> Result<Vec<f64>> {
        if i_hi > self.n_max {
            return Err(Error::Index(format!(
                "v_sup_norms: need i_hi <= n_max = {}, got {i_hi}",
                self.n_max
            )));
        }
        let ratio =
            (self.alphas[0].to_f64().log10() - self.alphas[i_hi].to_f64().log10()).max(0.0);
        let rdigits = ((ratio + 30.0).ceil() as u32).clamp(40, 2 * self.digits + 14);
        let rbits = bits_for_digits(rdigits);
        let tpd: Vec<Big> = self
            .hi
            .tpd
            .iter()
            .map(|s| Big::with_val(rbits, s))
            .collect();
        let uw: Vec<Vec<Big>> = self.hi.uw[..=i_hi]
            .iter()
            .map(|row| row.iter().map(|e| Big::with_val(rbits, e)).collect())
            .collect();
        let alphas: Vec<Big> = self.alphas[..=i_hi]
            .iter()
            .map(|a| Big::with_val(rbits, a))
            .collect();
        let mut sups = vec![0f64; i_hi + 1];
        for &x in grid {
            if !(x >= 0.0) {
                return Err(Error::Parameter(format!(
                    "v_sup_norms: x = {x} is negative"
                )));
            }
            let xb = big(rbits, x);
            let ev: Vec<Big> = tpd
                .iter()
                .map(|s| (-(s * &xb).complete(rbits)).exp())
                .collect();
            for (i, sup) in sups.iter_mut().enumerate() {
                let val = (dot(rbits, &ev, &uw[i]) / &alphas[i]).abs().to_f64();
                if val > *sup {
                    *sup = val;
                }
            }
        }
        Ok(sups)
    }

    pub(crate) fn u_derivative_sups(
        &self,
        n: usize,
        k: usize,
        grid: &[f64],
    ) -> Result<Vec<Vec<f64>>> {
        if n < 1 || n > self.n_max + 1 {
            return Err(Error::Parameter(format!(
                "u_derivative_sups: need 1 <= n <= {}, got {n}",
                self.n_max + 1
            )));
        }
        let ratio =
            (self.alphas[0].to_f64().log10() - self.alphas[n - 1].to_f64().log10()).max(0.0);
        let rdigits = ((2.0 * ratio + 30.0).ceil() as u32).clamp(40, 2 * self.digits + 14);
        let rbits = bits_for_digits(rdigits);
        let t2d: Vec<Big> = self
            .hi
            .t2d
            .iter()
            .map(|s| Big::with_val(rbits, s))
            .collect();
        let uw: Vec<Vec<Big>> = self.hi.uw[..n]
            .iter()
            .map(|row| row.iter().map(|e| Big::with_val(rbits, e)).collect())
            .collect();
        let lambdas: Vec<Big> = self.alphas[..n]
            .iter()
            .map(|a| {
                let ar = Big::with_val(rbits, a);
                (&ar * &ar).complete(rbits)
            })
            .collect();
        let mut facts = vec![big_i(rbits, 1)];
        for m in 1..=k {
            let f = (facts.last().unwrap() * &big_i(rbits, m as i64)).complete(rbits);
            facts.push(f);
        }
        let mut sups = vec![vec![0f64; k + 1]; n];
        for &x in grid {
            let t = big(rbits, x);
            let recip: Vec<Big> = t2d
                .iter()
                .map(|s| Big::with_val(rbits, &t + s).recip())
                .collect();
            let mut pows = recip.clone();
            for m in 0..=k {
                if m > 0 {
                    for (p, r) in pows.iter_mut().zip(&recip) {
                        *p *= r;
                    }
                }
                for i in 0..n {
                    let raw = dot(rbits, &pows, &uw[i]);
                    let val = (Big::with_val(rbits, &raw * &facts[m]) / &lambdas[i])
                        .abs()
                        .to_f64();
                    if val > sups[i][m] {
                        sups[i][m] = val;
                    }
                }
            }
        }
        Ok(sups)
    }
}

fn ensure_cascade_level(cascade: &mut Vec<Vec<Big>>, j: usize) {
    while cascade.len() <= j {
        let next: Vec<Big> = cascade
            .last()
            .expect("cascade is seeded")
            .iter()
            .map(|f| f.clone().sqrt())
            .collect();
        cascade.push(next);
    }
}

fn sign_of(v: &Big) -> i8 {
    if v.is_zero() {
        0
    } else if v.is_sign_negative() {
        -1
    } else {
        1
    }
}

/// Gaussian elimination with partial pivoting at the matrix precision.
fn solve_dense(mut a: Vec<Vec<Big>>, mut b: Vec<Big>) -> Result<Vec<Big>> {
    let n = a.len();
    let bits = a[0][0].prec();
    for col in 0..n {
        let mut piv = col;
        for row in col + 1..n {
            if a[row][col].clone().abs() > a[piv][col].clone().abs() {
                piv = row;
            }
        }
        if a[piv][col].is_zero() {
            return Err(Error::Invariant(
                "weight system is numerically singular".into(),
            ));
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = Big::with_val(bits, &a[row][col] / &a[col][col]);
            if f.is_zero() {
                continue;
            }
            for k in col..n {
                let t = (&f * &a[col][k]).complete(bits);
                a[row][k] -= t;
            }
            let t = (&f * &b[col]).complete(bits);
            b[row] -= t;
        }
    }
    let mut x = vec![Big::new(bits); n];
    for col in (0..n).rev() {
        let mut acc = b[col].clone();
        for k in col + 1..n {
            acc -= (&a[col][k] * &x[k]).complete(bits);
        }
        x[col] = acc / &a[col][col];
    }
    Ok(x)
}

fn finish_rule(side: Side, nodes: Vec<Big>, weights: Vec<Big>) -> Result<SideRule> {
    for (k, w) in weights.iter().enumerate() {
        if !(*w > 0) {
            return Err(Error::Invariant(format!(
                "nonpositive quadrature weight w[{k}] = {}",
                w.to_f64()
            )));
        }
    }
    for pair in nodes.windows(2) {
        if !(pair[0] < pair[1]) {
            return Err(Error::Invariant("rule nodes are not increasing".into()));
        }
    }
    Ok(SideRule {
        side,
        nodes,
        weights,
    })
}
