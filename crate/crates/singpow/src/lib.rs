//! Short power expansions for endpoint-singular functions.
//!
//! Functions of the form f(x) = ∫_a^b x^μ σ(μ) dμ on [0,1] have a branch-point
//! singularity at x = 0 but are approximated to near machine precision by short
//! expansions Σ c_j x^{t_j} whose exponents t_j and collocation points x_j depend
//! only on the band [a,b] and the accuracy target — not on σ. Both point sets come
//! from the singular value decomposition of a truncated Laplace transform, computed
//! here by an extended-precision Nyström eigendecomposition; the expansion
//! coefficients come from a truncated-SVD collocation solve in double precision.
//!
//! Module map:
//! - [`numerics`]: extended-precision substrate (quadrature, symmetric eigensolver,
//!   double-precision SVD, bracketed root finding).
//! - [`laplace`]: the singular system {α_i, u_i, v_i} of the transform, its
//!   generalized quadrature rules and diagnostics.
//! - [`tsvd`]: truncated-SVD solves with the ε-threshold rule.
//! - [`scheme`]: a-priori approximation schemes (powers + collocation points),
//!   fitting and evaluation on [0,1] or on complex arcs.
//! - [`targets`]: built-in target measures/distributions and their f-oracles.
//! - [`harness`]: experiment runner producing deterministic CSV/JSON tables.

pub mod harness;
pub mod laplace;
pub mod mp;
pub mod numerics;
pub mod scheme;
pub mod targets;
pub mod tsvd;

/// Crate-wide error type.
///
/// `exit_code` groups variants the way the CLI reports them: bad inputs exit
/// with 2, numerical/convergence failures with 3.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Invalid argument or malformed input data.
    #[error("parameter error: {0}")]
    Parameter(String),
    /// Requested accuracy is not reachable with the given precision/mesh.
    #[error("precision error: {0}")]
    Precision(String),
    /// A sign-change scan did not produce the structurally expected root count.
    #[error("root-count error: {0}")]
    RootCount(String),
    /// A reference quadrature failed to converge within its panel cap.
    #[error("oracle error: {0}")]
    Oracle(String),
    /// A computed quantity violated a structural invariant (e.g. a nonpositive
    /// quadrature weight).
    #[error("invariant violation: {0}")]
    Invariant(String),
    /// Index beyond the computed part of the spectrum.
    #[error("index error: {0}")]
    Index(String),
    /// Complex power evaluation hit the branch cut (negative real axis).
    #[error("branch-cut error: {0}")]
    Branch(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// CLI exit code for this error class: 2 = parameter, 3 = numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parameter(_) | Error::Index(_) | Error::Branch(_) | Error::Io(_) | Error::Json(_) => 2,
            Error::Precision(_) | Error::RootCount(_) | Error::Oracle(_) | Error::Invariant(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
