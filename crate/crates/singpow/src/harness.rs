//! Experiment runner: reproduces the library's standard experiment families
//! as deterministic CSV/JSON tables, with scheme bundles cached in-process
//! and optionally on disk (`SINGPOW_CACHE_DIR`).
//!
//! Families: `alpha_decay`, `sing_norms`, `gram_u`, `gram_v_condition`,
//! `vnorm`, `error_vs_n`, `c_sweep`, `dist_orders`, `arc_error`,
//! `arc_c_sweep`, `clustering`. Every family runs per band [1, γ] for each
//! requested γ; rows are sorted lexicographically by their leading columns
//! so reruns are byte-identical.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::rc::Rc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::laplace::{self, Band, LaplaceSvd, Side};
use crate::numerics::svd_double;
use crate::scheme::{
    self, fit, scheme_for_n, ApproxScheme, Arc, FitResult, RuleSize, EPS0,
};
use crate::targets::{ck_norm_table, eval_f, total_variation, Measure};
use crate::{Error, Result};

/// Output format of an experiment table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

/// A parsed experiment request. `gammas`, `digits`, `format` carry usable
/// defaults; empty `targets`/`arc_alphas` select per-family defaults; `mesh`
/// and `n_range` override the per-γ build plan when present.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub name: String,
    pub gammas: Vec<f64>,
    pub targets: Vec<String>,
    pub n_range: Option<(usize, usize)>,
    pub arc_alphas: Vec<f64>,
    /// c_sweep families: 1000 sweep points instead of 100.
    pub full_sweep: bool,
    pub digits: u32,
    pub mesh: Option<usize>,
    pub format: Format,
    pub out: PathBuf,
}

impl ExperimentSpec {
    pub fn new(name: &str) -> ExperimentSpec {
        ExperimentSpec {
            name: name.to_string(),
            gammas: vec![10.0, 50.0, 250.0],
            targets: Vec::new(),
            n_range: None,
            arc_alphas: Vec::new(),
            full_sweep: false,
            digits: 60,
            mesh: None,
            format: Format::Csv,
            out: PathBuf::new(),
        }
    }
}

/// One table cell; columns are homogeneously typed.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Str(String),
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Num(v) => write!(f, "{v}"),
            Cell::Str(v) => f.write_str(v),
        }
    }
}

fn cell_rank(c: &Cell) -> u8 {
    match c {
        Cell::Int(_) => 0,
        Cell::Num(_) => 1,
        Cell::Str(_) => 2,
    }
}

fn cell_cmp(a: &Cell, b: &Cell) -> std::cmp::Ordering {
    match (a, b) {
        (Cell::Int(x), Cell::Int(y)) => x.cmp(y),
        (Cell::Num(x), Cell::Num(y)) => x.total_cmp(y),
        (Cell::Str(x), Cell::Str(y)) => x.cmp(y),
        _ => cell_rank(a).cmp(&cell_rank(b)),
    }
}

/// A rectangular result table with a reproducibility header.
#[derive(Debug, Clone)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub provenance: Vec<String>,
}

impl ResultTable {
    fn new(columns: &[&str], provenance: Vec<String>) -> ResultTable {
        ResultTable {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            provenance,
        }
    }

    /// Sorts rows lexicographically by all columns, left to right.
    pub fn sort_rows(&mut self) {
        self.rows.sort_by(|r, s| {
            for (a, b) in r.iter().zip(s) {
                let o = cell_cmp(a, b);
                if o != std::cmp::Ordering::Equal {
                    return o;
                }
            }
            std::cmp::Ordering::Equal
        });
    }

    /// CSV rendering: '#'-prefixed provenance lines, a header line, then one
    /// comma-joined line per row; doubles as shortest round-trip decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for line in &self.provenance {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let mut first = true;
            for cell in row {
                if !first {
                    out.push(',');
                }
                first = false;
                out.push_str(&cell.to_string());
            }
            out.push('\n');
        }
        out
    }

    /// JSON rendering: {"meta": {"provenance": […]}, "columns": […],
    /// "rows": [[…], …]}.
    pub fn to_json(&self) -> Result<String> {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                serde_json::Value::Array(
                    row.iter()
                        .map(|c| match c {
                            Cell::Int(v) => serde_json::json!(v),
                            Cell::Num(v) => serde_json::json!(v),
                            Cell::Str(v) => serde_json::json!(v),
                        })
                        .collect(),
                )
            })
            .collect();
        let doc = serde_json::json!({
            "meta": { "provenance": self.provenance },
            "columns": self.columns,
            "rows": rows,
        });
        let mut s = serde_json::to_string_pretty(&doc)?;
        s.push('\n');
        Ok(s)
    }
}

/// Writes a table to `path` in the given format.
pub fn export(table: &ResultTable, format: Format, path: &Path) -> Result<()> {
    let text = match format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json()?,
    };
    std::fs::write(path, text)?;
    Ok(())
}

/// Build parameters (requested spectrum length, mesh size) for the band
/// [1, γ]: anchored for the standard γ ∈ {10, 50, 250}, otherwise sized from
/// the empirical spectrum-decay fit with margin.
pub fn build_plan(gamma: f64) -> (usize, usize) {
    for &(g, n_req, mesh) in &[(10.0, 34, 272), (50.0, 46, 368), (250.0, 54, 720)] {
        if gamma == g {
            return (n_req, mesh);
        }
    }
    let guess = (28.0 + 7.45 * (gamma / 10.0).ln()).ceil() as i64 + 6;
    let n_req = guess.max(12) as usize;
    (n_req, (8 * n_req).max(200))
}

/// A per-band set of precomputed schemes: one practical scheme for every
/// truncation n = 1..=n_top (n_top = min(requested, deliverable)), plus the
/// delivered singular-value sequence. This is the unit of disk caching.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchemeBundle {
    pub version: u32,
    pub a: f64,
    pub b: f64,
    pub digits: u32,
    pub mesh: usize,
    /// Top index of the delivered spectrum (α₀..α_n_max).
    pub n_max: usize,
    pub alphas: Vec<f64>,
    pub schemes: Vec<ApproxScheme>,
}

impl SchemeBundle {
    fn from_svd(svd: &LaplaceSvd, n_req: usize) -> Result<SchemeBundle> {
        let n_top = n_req.min(svd.n_max().saturating_sub(1));
        if n_top < 1 {
            return Err(Error::Precision(
                "scheme bundle: delivered spectrum is too short for any rule".into(),
            ));
        }
        let schemes = (1..=n_top)
            .map(|n| scheme_for_n(svd, n, RuleSize::Practical))
            .collect::<Result<Vec<_>>>()?;
        Ok(SchemeBundle {
            version: 1,
            a: svd.band().a,
            b: svd.band().b,
            digits: svd.digits(),
            mesh: svd.mesh().nodes.len(),
            n_max: svd.n_max(),
            alphas: (0..=svd.n_max()).map(|i| svd.alpha_f64(i)).collect(),
            schemes,
        })
    }

    /// Largest n with a precomputed scheme.
    pub fn n_top(&self) -> usize {
        self.schemes.len()
    }

    /// The scheme at truncation n (1 ≤ n ≤ n_top).
    pub fn scheme(&self, n: usize) -> Result<&ApproxScheme> {
        if n < 1 || n > self.schemes.len() {
            return Err(Error::Index(format!(
                "bundle holds schemes for n = 1..={}, got {n}",
                self.schemes.len()
            )));
        }
        Ok(&self.schemes[n - 1])
    }

    /// min{n : α_n ≤ eps} within the delivered spectrum.
    pub fn n_at(&self, eps: f64) -> Option<usize> {
        self.alphas.iter().position(|&a| a <= eps)
    }

    fn check(&self, band: Band, digits: u32, mesh: usize, n_req: usize) -> bool {
        if self.version != 1
            || self.a.to_bits() != band.a.to_bits()
            || self.b.to_bits() != band.b.to_bits()
            || self.digits != digits
            || self.mesh != mesh
            || self.alphas.len() != self.n_max + 1
            || self.schemes.len() != n_req.min(self.n_max.saturating_sub(1))
        {
            return false;
        }
        if !self
            .alphas
            .windows(2)
            .all(|w| w[0].is_finite() && w[0] > 0.0 && w[1] > 0.0 && w[1] < w[0])
        {
            return false;
        }
        self.schemes.iter().enumerate().all(|(i, s)| {
            s.n == i + 1
                && s.a.to_bits() == band.a.to_bits()
                && s.b.to_bits() == band.b.to_bits()
                && s.validate().is_ok()
        })
    }
}

type BuildKey = (u64, u64, u32, usize, usize);

/// Caches spectral builds (in-process) and scheme bundles (in-process and,
/// when a directory is configured, on disk as JSON files). Disk entries that
/// fail to parse or validate are treated as misses and rewritten; disk I/O
/// failures degrade to cache misses rather than failing the computation.
pub struct SchemeCache {
    dir: Option<PathBuf>,
    svds: HashMap<BuildKey, Rc<LaplaceSvd>>,
    bundles: HashMap<BuildKey, Rc<SchemeBundle>>,
}

impl SchemeCache {
    pub fn with_dir(dir: Option<PathBuf>) -> SchemeCache {
        SchemeCache {
            dir,
            svds: HashMap::new(),
            bundles: HashMap::new(),
        }
    }

    /// Cache rooted at `SINGPOW_CACHE_DIR` when set, else in-process only.
    pub fn from_env() -> SchemeCache {
        SchemeCache::with_dir(std::env::var_os("SINGPOW_CACHE_DIR").map(PathBuf::from))
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    fn key(band: Band, digits: u32, mesh: usize, n_req: usize) -> BuildKey {
        (band.a.to_bits(), band.b.to_bits(), digits, mesh, n_req)
    }

    fn bundle_path(&self, key: &BuildKey) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| {
            d.join(format!(
                "bundle-{:016x}-{:016x}-d{}-m{}-n{}.json",
                key.0, key.1, key.2, key.3, key.4
            ))
        })
    }

    /// The spectral build for (band, digits, mesh) requesting n_req singular
    /// values, memoized in-process.
    pub fn svd(
        &mut self,
        band: Band,
        digits: u32,
        mesh: usize,
        n_req: usize,
    ) -> Result<Rc<LaplaceSvd>> {
        let key = Self::key(band, digits, mesh, n_req);
        if let Some(hit) = self.svds.get(&key) {
            return Ok(hit.clone());
        }
        let svd = Rc::new(laplace::build(band, n_req, digits, mesh)?);
        self.svds.insert(key, svd.clone());
        Ok(svd)
    }

    /// The scheme bundle for (band, digits, mesh, n_req): in-process hit,
    /// else disk hit, else built from the spectral build and persisted.
    pub fn schemes(
        &mut self,
        band: Band,
        digits: u32,
        mesh: usize,
        n_req: usize,
    ) -> Result<Rc<SchemeBundle>> {
        let key = Self::key(band, digits, mesh, n_req);
        if let Some(hit) = self.bundles.get(&key) {
            return Ok(hit.clone());
        }
        if let Some(path) = self.bundle_path(&key) {
            if let Ok(text) = std::fs::read_to_string(&path) {
                if let Ok(bundle) = serde_json::from_str::<SchemeBundle>(&text) {
                    if bundle.check(band, digits, mesh, n_req) {
                        let rc = Rc::new(bundle);
                        self.bundles.insert(key, rc.clone());
                        return Ok(rc);
                    }
                }
            }
        }
        let svd = self.svd(band, digits, mesh, n_req)?;
        let bundle = Rc::new(SchemeBundle::from_svd(&svd, n_req)?);
        if let Some(path) = self.bundle_path(&key) {
            let _ = self.write_bundle(&path, &bundle);
        }
        self.bundles.insert(key, bundle.clone());
        Ok(bundle)
    }

    fn write_bundle(&self, path: &Path, bundle: &SchemeBundle) -> Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let mut text = serde_json::to_string_pretty(bundle)?;
        text.push('\n');
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        std::fs::write(&tmp, text)?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }
}

/// Runs an experiment with a fresh environment-configured cache.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ResultTable> {
    let mut cache = SchemeCache::from_env();
    run_experiment_with_cache(spec, &mut cache)
}

/// Runs an experiment against a caller-owned cache (multiple experiments on
/// the same bands then share one spectral build per band).
pub fn run_experiment_with_cache(
    spec: &ExperimentSpec,
    cache: &mut SchemeCache,
) -> Result<ResultTable> {
    if spec.gammas.is_empty() {
        return Err(Error::Parameter("experiment: no gammas given".into()));
    }
    for &g in &spec.gammas {
        if !(g.is_finite() && g > 1.0) {
            return Err(Error::Parameter(format!(
                "experiment: gamma = {g} must be finite and > 1"
            )));
        }
    }
    if let Some((lo, hi)) = spec.n_range {
        if lo < 1 || hi < lo {
            return Err(Error::Parameter(format!(
                "experiment: invalid n range {lo}..={hi}"
            )));
        }
    }
    let mut table = match spec.name.as_str() {
        "alpha_decay" => fam_alpha_decay(spec, cache),
        "sing_norms" => fam_sing_norms(spec, cache),
        "gram_u" => fam_gram(spec, cache, Side::U),
        "gram_v_condition" => fam_gram(spec, cache, Side::V),
        "vnorm" => fam_vnorm(spec, cache),
        "error_vs_n" => fam_error_vs_n(spec, cache),
        "c_sweep" => fam_c_sweep(spec, cache),
        "dist_orders" => fam_dist_orders(spec, cache),
        "arc_error" => fam_arc_error(spec, cache),
        "arc_c_sweep" => fam_arc_c_sweep(spec, cache),
        "clustering" => fam_clustering(spec, cache),
        other => Err(Error::Parameter(format!(
            "unknown experiment '{other}' (expected one of: alpha_decay, sing_norms, \
             gram_u, gram_v_condition, vnorm, error_vs_n, c_sweep, dist_orders, \
             arc_error, arc_c_sweep, clustering)"
        ))),
    }?;
    table.sort_rows();
    Ok(table)
}

struct GammaCtx {
    band: Band,
    digits: u32,
    mesh: usize,
    n_req: usize,
}

fn resolve(spec: &ExperimentSpec, gamma: f64) -> Result<GammaCtx> {
    let band = Band::new(1.0, gamma)?;
    let (n_req, planned_mesh) = build_plan(gamma);
    let mesh = spec.mesh.unwrap_or(planned_mesh);
    Ok(GammaCtx {
        band,
        digits: spec.digits,
        mesh,
        n_req,
    })
}

fn common_provenance(spec: &ExperimentSpec) -> Vec<String> {
    let gam: Vec<String> = spec.gammas.iter().map(|g| g.to_string()).collect();
    let mut prov = vec![
        format!("singpow {}", env!("CARGO_PKG_VERSION")),
        format!("experiment = {}", spec.name),
        format!("gammas = {}", gam.join(", ")),
        format!("digits = {}", spec.digits),
        format!("eps0 = {:e}", EPS0),
    ];
    for &g in &spec.gammas {
        let (n_req, planned_mesh) = build_plan(g);
        let mesh = spec.mesh.unwrap_or(planned_mesh);
        prov.push(format!(
            "gamma={g}: a=1, b={g}, n_req={n_req}, mesh={mesh}"
        ));
    }
    prov
}

/// Default sweep range 1..=n(ε₀) (clamped to what the bundle holds), or the
/// clamp of an explicit request.
fn n_sweep(spec: &ExperimentSpec, bundle: &SchemeBundle) -> (usize, usize) {
    let n_top = bundle.n_top();
    let full_hi = bundle.n_at(EPS0).unwrap_or(n_top).min(n_top);
    match spec.n_range {
        Some((lo, hi)) => (lo.max(1).min(n_top), hi.min(n_top)),
        None => (1, full_hi),
    }
}

/// The single working truncation for fixed-n families: the top of an explicit
/// range, else n(ε₀).
fn n_fixed(spec: &ExperimentSpec, bundle: &SchemeBundle) -> usize {
    let n_top = bundle.n_top();
    let full_hi = bundle.n_at(EPS0).unwrap_or(n_top).min(n_top);
    spec.n_range
        .map(|(_, hi)| hi.min(n_top).max(1))
        .unwrap_or(full_hi)
}

fn uniform_grid(count: usize) -> Vec<f64> {
    (0..count)
        .map(|j| j as f64 / (count - 1) as f64)
        .collect()
}

fn log_spaced(count: usize, lo: f64, hi: f64) -> Vec<f64> {
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..count)
        .map(|j| {
            if j == 0 {
                lo
            } else if j == count - 1 {
                hi
            } else {
                (llo + (lhi - llo) * j as f64 / (count - 1) as f64).exp()
            }
        })
        .collect()
}

fn density_targets(spec: &ExperimentSpec, fallback: &[&str]) -> Vec<String> {
    if spec.targets.is_empty() {
        fallback.iter().map(|s| s.to_string()).collect()
    } else {
        spec.targets.clone()
    }
}

fn arc_alphas(spec: &ExperimentSpec, fallback: &[f64]) -> Vec<f64> {
    if spec.arc_alphas.is_empty() {
        fallback.to_vec()
    } else {
        spec.arc_alphas.clone()
    }
}

/// Worst |f − f̂|/tv over precomputed target values on a fixed grid.
fn sup_err_cached(
    fit: &FitResult,
    f_grid: &[Complex64],
    xs: &[f64],
    tv: f64,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for (j, &x) in xs.iter().enumerate() {
        let g = scheme::evaluate(fit, x)?;
        let d = (f_grid[j] - g).norm();
        if d > worst {
            worst = d;
        }
    }
    Ok(worst / tv)
}

fn fam_alpha_decay(spec: &ExperimentSpec, cache: &mut SchemeCache) -> Result<ResultTable> {
    let mut table = ResultTable::new(&["gamma", "i", "alpha"], common_provenance(spec));
    for &g in &spec.gammas {
        let ctx = resolve(spec, g)?;
        let bundle = cache.schemes(ctx.band, ctx.digits, ctx.mesh, ctx.n_req)?;
        let i_hi = spec
            .n_range
            .map(|(_, hi)| hi.min(bundle.n_max))
            .unwrap_or(bundle.n_max);
        table
            .provenance
            .push(format!("gamma={g}: i = 0..={i_hi}"));
        for (i, &al) in bundle.alphas.iter().enumerate().take(i_hi + 1) {
            table
                .rows
                .push(vec![Cell::Num(g), Cell::Int(i as i64), Cell::Num(al)]);
        }
    }
    Ok(table)
}

fn fam_sing_norms(spec: &ExperimentSpec, cache: &mut SchemeCache) -> Result<ResultTable> {
    const U_GRID: usize = 1200;
    const V_GRID: usize = 1200;
    let mut prov = common_provenance(spec);
    prov.push(format!(
        "u_sup over {U_GRID} uniform t in [0,1]; v_sup over {V_GRID} uniform x in [0, 25(i_hi+1)]"
    ));
    let mut table = ResultTable::new(&["gamma", "i", "u_sup", "v_sup"], prov);
    for &g in &spec.gammas {
        let ctx = resolve(spec, g)?;
        let svd = cache.svd(ctx.band, ctx.digits, ctx.mesh, ctx.n_req)?;
        let i_hi = spec
            .n_range
            .map(|(_, hi)| hi.min(svd.n_max()))
            .unwrap_or(svd.n_max());
        let t_grid = uniform_grid(U_GRID);
        let u_sups = svd.u_derivative_sups(i_hi + 1, 0, &t_grid)?;
        let span = 25.0 * (i_hi + 1) as f64;
        let x_grid: Vec<f64> = (0..V_GRID)
            .map(|j| span * j as f64 / (V_GRID - 1) as f64)
            .collect();
        let v_sups = svd.v_sup_norms(i_hi, &x_grid)?;
        for i in 0..=i_hi {
            table.rows.push(vec![
                Cell::Num(g),
                Cell::Int(i as i64),
                Cell::Num(u_sups[i][0]),
                Cell::Num(v_sups[i]),
            ]);
        }
    }
    Ok(table)
}

fn fam_gram(
    spec: &ExperimentSpec,
    cache: &mut SchemeCache,
    side: Side,
) -> Result<ResultTable> {
    let columns: &[&str] = match side {
        Side::U => &["gamma", "n", "e1", "alpha_n_sq"],
        Side::V => &["gamma", "n", "e2", "a_dagger_norm", "bound"],
    };
    let mut table = ResultTable::new(columns, common_provenance(spec));
    for &g in &spec.gammas {
        let ctx = resolve(spec, g)?;
        let svd = cache.svd(ctx.band, ctx.digits, ctx.mesh, ctx.n_req)?;
        let n_top = svd.n_max().saturating_sub(1);
        let alphas_f64: Vec<f64> = (0..=svd.n_max()).map(|i| svd.alpha_f64(i)).collect();
        let full_hi = alphas_f64
            .iter()
            .position(|&a| a <= EPS0)
            .unwrap_or(n_top)
            .min(n_top);
        let (lo, hi) = match spec.n_range {
            Some((l, h)) => (l.max(1).min(n_top), h.min(n_top)),
            None => (1, full_hi),
        };
        table.provenance.push(format!("gamma={g}: n = {lo}..={hi}"));
        for n in lo..=hi {
            let rule = svd.nodes_and_weights(n, side)?;
            let e = svd.gram_error(n, &rule)?.to_f64();
            match side {
                Side::U => {
                    table.rows.push(vec![
                        Cell::Num(g),
                        Cell::Int(n as i64),
                        Cell::Num(e),
                        Cell::Num(alphas_f64[n] * alphas_f64[n]),
                    ]);
                }
                Side::V => {
                    let (norm, bound) = svd.interp_conditioning(n, &rule)?;
                    table.rows.push(vec![
                        Cell::Num(g),
                        Cell::Int(n as i64),
                        Cell::Num(e),
                        Cell::Num(norm),
                        Cell::Num(bound),
                    ]);
                }
            }
        }
    }
    Ok(table)
}

fn fam_vnorm(spec: &ExperimentSpec, cache: &mut SchemeCache) -> Result<ResultTable> {
    let mut table = ResultTable::new(
        &["gamma", "n", "vinv_norm", "bound"],
        common_provenance(spec),
    );
    for &g in &spec.gammas {
        let ctx = resolve(spec, g)?;
        let bundle = cache.schemes(ctx.band, ctx.digits, ctx.mesh, ctx.n_req)?;
        let (lo, hi) = n_sweep(spec, &bundle);
        table.provenance.push(format!("gamma={g}: n = {lo}..={hi}"));
        for n in lo..=hi {
            let sch = bundle.scheme(n)?;
            let v = scheme::vandermonde(sch, None)?;
            let vr: Vec<Vec<f64>> = v
                .iter()
                .map(|row| row.iter().map(|e| e.re).collect())
                .collect();
            let sv = svd_double(&vr)?;
            let smin = *sv.s.last().expect("n >= 1");
            let vinv = if smin > 0.0 { 1.0 / smin } else { f64::INFINITY };
            table.rows.push(vec![
                Cell::Num(g),
                Cell::Int(n as i64),
                Cell::Num(vinv),
                Cell::Num(10.0 / bundle.alphas[n]),
            ]);
        }
    }
    Ok(table)
}

fn fam_error_vs_n(spec: &ExperimentSpec, cache: &mut SchemeCache) -> Result<ResultTable> {
    const GRID: usize = 2000;
    let targets = density_targets(spec, &["sigma1", "sigma2", "sigma3", "sigma4"]);
    let mut prov = common_provenance(spec);
    prov.push(format!("targets = {}", targets.join(", ")));
    prov.push(format!("sup grid = {GRID} uniform points in [0,1]"));
    let mut table = ResultTable::new(
        &["gamma", "target", "n", "alpha_n", "E_N"],
        prov,
    );
    let xs = uniform_grid(GRID);
    for &g in &spec.gammas {
        let ctx = resolve(spec, g)?;
        let bundle = cache.schemes(ctx.band, ctx.digits, ctx.mesh, ctx.n_req)?;
        let (lo, hi) = n_sweep(spec, &bundle);
        table.provenance.push(format!("gamma={g}: n = {lo}..={hi}"));
        for id in &targets {
            let measure = Measure::from_id(id, ctx.band, None, None)?;
            let tv = total_variation(&measure, ctx.band);
            let f_grid: Vec<Complex64> = xs
                .iter()
                .map(|&x| eval_f(&measure, ctx.band, Complex64::new(x, 0.0)))
                .collect::<Result<_>>()?;
            for n in lo..=hi {
                let sch = bundle.scheme(n)?;
                let samples = scheme::sample_target(sch, &measure, None)?;
                let fitted = fit(sch, &samples, EPS0, None)?;
                let e = sup_err_cached(&fitted, &f_grid, &xs, tv)?;
                table.rows.push(vec![
                    Cell::Num(g),
                    Cell::Str(id.clone()),
                    Cell::Int(n as i64),
                    Cell::Num(bundle.alphas[n]),
                    Cell::Num(e),
                ]);
            }
        }
    }
    Ok(table)
}

fn fam_c_sweep(spec: &ExperimentSpec, cache: &mut SchemeCache) -> Result<ResultTable> {
    const GRID: usize = 1000;
    let count = if spec.full_sweep { 1000 } else { 100 };
    let mut prov = common_provenance(spec);
    prov.push(format!(
        "c = {count} log-spaced in [a/1.5, 1.5b]; sup grid = {GRID} uniform points"
    ));
    let mut table = ResultTable::new(&["gamma", "n", "c", "E_N"], prov);
    let xs = uniform_grid(GRID);
    for &g in &spec.gammas {
        let ctx = resolve(spec, g)?;
        let bundle = cache.schemes(ctx.band, ctx.digits, ctx.mesh, ctx.n_req)?;
        let n = n_fixed(spec, &bundle);
        table.provenance.push(format!("gamma={g}: n = {n}"));
        let sch = bundle.scheme(n)?;
        for &c in &log_spaced(count, ctx.band.a / 1.5, 1.5 * ctx.band.b) {
            let measure = Measure::point_mass_swept(c)?;
            let samples = scheme::sample_target(sch, &measure, None)?;
            let fitted = fit(sch, &samples, EPS0, None)?;
            let f_grid: Vec<Complex64> = xs
                .iter()
                .map(|&x| eval_f(&measure, ctx.band, Complex64::new(x, 0.0)))
                .collect::<Result<_>>()?;
            let e = sup_err_cached(&fitted, &f_grid, &xs, 1.0)?;
            table.rows.push(vec![
                Cell::Num(g),
                Cell::Int(n as i64),
                Cell::Num(c),
                Cell::Num(e),
            ]);
        }
    }
    Ok(table)
}

fn fam_dist_orders(spec: &ExperimentSpec, cache: &mut SchemeCache) -> Result<ResultTable> {
    const GRID: usize = 2000;
    const K_HI: u32 = 6;
    let mut prov = common_provenance(spec);
    prov.push(format!(
        "c in {{a, (a+b)/2, b}}; k = 1..={K_HI}; sup grid = {GRID} uniform points"
    ));
    let mut table = ResultTable::new(
        &["gamma", "c", "k", "n", "alpha_n", "U_nk", "E_N"],
        prov,
    );
    let xs = uniform_grid(GRID);
    for &g in &spec.gammas {
        let ctx = resolve(spec, g)?;
        let svd = cache.svd(ctx.band, ctx.digits, ctx.mesh, ctx.n_req)?;
        let bundle = cache.schemes(ctx.band, ctx.digits, ctx.mesh, ctx.n_req)?;
        let (lo, hi) = n_sweep(spec, &bundle);
        table.provenance.push(format!("gamma={g}: n = {lo}..={hi}"));
        let norm_table = ck_norm_table(&svd, hi, K_HI as usize)?;
        let (a, b) = (ctx.band.a, ctx.band.b);
        for &c in &[a, 0.5 * (a + b), b] {
            for k in 1..=K_HI {
                let measure = Measure::derivative_point_mass(c, k, ctx.band)?;
                let f_grid: Vec<Complex64> = xs
                    .iter()
                    .map(|&x| eval_f(&measure, ctx.band, Complex64::new(x, 0.0)))
                    .collect::<Result<_>>()?;
                for n in lo..=hi {
                    let sch = bundle.scheme(n)?;
                    let samples = scheme::sample_target(sch, &measure, None)?;
                    let fitted = fit(sch, &samples, EPS0, None)?;
                    let e = sup_err_cached(&fitted, &f_grid, &xs, 1.0)?;
                    table.rows.push(vec![
                        Cell::Num(g),
                        Cell::Num(c),
                        Cell::Int(k as i64),
                        Cell::Int(n as i64),
                        Cell::Num(bundle.alphas[n]),
                        Cell::Num(norm_table[n - 1][k as usize]),
                        Cell::Num(e),
                    ]);
                }
            }
        }
    }
    Ok(table)
}

fn fam_arc_error(spec: &ExperimentSpec, cache: &mut SchemeCache) -> Result<ResultTable> {
    const GRID: usize = 2000;
    let targets = density_targets(spec, &["sigma3", "sigma4"]);
    let alphas = arc_alphas(spec, &[0.0, 0.2, 0.4, 0.6, 0.8]);
    let mut prov = common_provenance(spec);
    prov.push(format!("targets = {}", targets.join(", ")));
    let al: Vec<String> = alphas.iter().map(|a| a.to_string()).collect();
    prov.push(format!("arc alphas = {}", al.join(", ")));
    prov.push(format!("sup grid = {GRID} uniform arc parameters"));
    let mut table = ResultTable::new(
        &["gamma", "target", "alpha", "n", "E_N"],
        prov,
    );
    let xs = uniform_grid(GRID);
    for &g in &spec.gammas {
        let ctx = resolve(spec, g)?;
        let bundle = cache.schemes(ctx.band, ctx.digits, ctx.mesh, ctx.n_req)?;
        let (lo, hi) = n_sweep(spec, &bundle);
        table.provenance.push(format!("gamma={g}: n = {lo}..={hi}"));
        for id in &targets {
            let measure = Measure::from_id(id, ctx.band, None, None)?;
            let tv = total_variation(&measure, ctx.band);
            for &alpha in &alphas {
                let arc = Arc { alpha };
                let f_grid: Vec<Complex64> = xs
                    .iter()
                    .map(|&x| eval_f(&measure, ctx.band, arc.map(x)))
                    .collect::<Result<_>>()?;
                for n in lo..=hi {
                    let sch = bundle.scheme(n)?;
                    let samples = scheme::sample_target(sch, &measure, Some(arc))?;
                    let fitted = fit(sch, &samples, EPS0, Some(arc))?;
                    let e = sup_err_cached(&fitted, &f_grid, &xs, tv)?;
                    table.rows.push(vec![
                        Cell::Num(g),
                        Cell::Str(id.clone()),
                        Cell::Num(alpha),
                        Cell::Int(n as i64),
                        Cell::Num(e),
                    ]);
                }
            }
        }
    }
    Ok(table)
}

fn fam_arc_c_sweep(spec: &ExperimentSpec, cache: &mut SchemeCache) -> Result<ResultTable> {
    const GRID: usize = 1000;
    let count = if spec.full_sweep { 1000 } else { 100 };
    let alphas = arc_alphas(spec, &[0.4, 0.8]);
    let mut prov = common_provenance(spec);
    let al: Vec<String> = alphas.iter().map(|a| a.to_string()).collect();
    prov.push(format!("arc alphas = {}", al.join(", ")));
    prov.push(format!(
        "c = {count} log-spaced in [a/1.5, 1.5b]; sup grid = {GRID} uniform arc parameters"
    ));
    let mut table = ResultTable::new(&["gamma", "n", "alpha", "c", "E_N"], prov);
    let xs = uniform_grid(GRID);
    for &g in &spec.gammas {
        let ctx = resolve(spec, g)?;
        let bundle = cache.schemes(ctx.band, ctx.digits, ctx.mesh, ctx.n_req)?;
        let n = n_fixed(spec, &bundle);
        table.provenance.push(format!("gamma={g}: n = {n}"));
        let sch = bundle.scheme(n)?;
        for &alpha in &alphas {
            let arc = Arc { alpha };
            for &c in &log_spaced(count, ctx.band.a / 1.5, 1.5 * ctx.band.b) {
                let measure = Measure::point_mass_swept(c)?;
                let samples = scheme::sample_target(sch, &measure, Some(arc))?;
                let fitted = fit(sch, &samples, EPS0, Some(arc))?;
                let f_grid: Vec<Complex64> = xs
                    .iter()
                    .map(|&x| eval_f(&measure, ctx.band, arc.map(x)))
                    .collect::<Result<_>>()?;
                let e = sup_err_cached(&fitted, &f_grid, &xs, 1.0)?;
                table.rows.push(vec![
                    Cell::Num(g),
                    Cell::Int(n as i64),
                    Cell::Num(alpha),
                    Cell::Num(c),
                    Cell::Num(e),
                ]);
            }
        }
    }
    Ok(table)
}

fn fam_clustering(spec: &ExperimentSpec, cache: &mut SchemeCache) -> Result<ResultTable> {
    let mut table = ResultTable::new(&["gamma", "n", "j", "x_j"], common_provenance(spec));
    for &g in &spec.gammas {
        let ctx = resolve(spec, g)?;
        let bundle = cache.schemes(ctx.band, ctx.digits, ctx.mesh, ctx.n_req)?;
        let n = n_fixed(spec, &bundle);
        table.provenance.push(format!("gamma={g}: n = {n}"));
        let sch = bundle.scheme(n)?;
        let mut xs = sch.collocation.clone();
        xs.sort_by(f64::total_cmp);
        for (j, &x) in xs.iter().enumerate() {
            table.rows.push(vec![
                Cell::Num(g),
                Cell::Int(n as i64),
                Cell::Int((j + 1) as i64),
                Cell::Num(x),
            ]);
        }
    }
    Ok(table)
}
