use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("(λ, E) is not an eigenpair: |D| = {residual:.3e} exceeds {tolerance:.3e}")]
    NotAnEigenpair { residual: f64, tolerance: f64 },

    #[error("eigenfunction vanishes identically on a half-interval at λ = {lambda}, E = {e}")]
    DegenerateEigenfunction { lambda: f64, e: f64 },

    #[error("closed-form node count {closed_form} disagrees with sampled count {sampled}")]
    NodeCountMismatch { closed_form: usize, sampled: usize },

    #[error("roots closer than the floating-point resolution near E = {near}")]
    GridTooCoarse { near: f64 },

    #[error("a root lies on (or too close to) the contour near λ = {re} + {im}i")]
    BoundaryRoot { re: f64, im: f64 },

    #[error("{what} did not converge after {iterations} iterations")]
    NonConvergence { what: &'static str, iterations: usize },

    #[error("Jacobian is numerically singular (|det| = {det:.3e})")]
    DegenerateJacobian { det: f64 },

    #[error("sheet {sheet}: found {found} critical points, expected {expected}")]
    MissingExtremum {
        sheet: usize,
        found: usize,
        expected: usize,
    },

    #[error("mirror image of branch point {re} + {im}i failed to converge")]
    SymmetryViolation { re: f64, im: f64 },

    #[error("continuation lost track at {at}")]
    LostTrack { at: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no lattice energy with multiplicity {target} below {ceiling}")]
    SearchExhausted { target: u64, ceiling: u64 },

    #[error("⟨ψ|ψ⟩_R = {value:.3e} is too small for the derivative formula")]
    NearDegenerate { value: f64 },

    #[error("inhomogeneous problem is not solvable: defect product {value:.3e}")]
    FredholmViolated { value: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
