use thiserror::Error;

/// Errors raised by the analytic, parsing and rank routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("operation `{0}` is undefined for the zero form")]
    ZeroForm(&'static str),

    #[error("operation `{op}` needs degree {requirement}, got {actual}")]
    Degree {
        op: &'static str,
        requirement: &'static str,
        actual: usize,
    },

    #[error("coefficient list has length {len}, expected degree + 1 = {expected}")]
    CoefficientLength { len: usize, expected: usize },

    #[error("linear form must have (alpha, beta) != (0, 0)")]
    ZeroLinearForm,

    #[error("coordinate change matrix is singular")]
    SingularMatrix,

    #[error("form has a multiple root over C")]
    NotSquareFree,

    #[error("polynomial is zero")]
    ZeroPolynomial,

    #[error("polynomial is constant")]
    ConstantPolynomial,

    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("expression is not homogeneous: it mixes total degrees {0} and {1}")]
    NonHomogeneous(usize, usize),

    #[error("unknown identifier `{name}` at byte {position}; only x and y are allowed (write products as x*y)")]
    UnknownIdentifier { name: String, position: usize },

    #[error("expression expands to the zero polynomial")]
    ZeroExpression,

    #[error("angle increment {increment:.4} rad at step {step} reaches pi/2; increase the step count")]
    Undersampled { step: usize, increment: f64 },

    #[error("gradient norm {norm:e} below threshold at theta = {theta}")]
    DegenerateGradient { theta: f64, norm: f64 },

    #[error("step count {steps} is below the minimum {minimum} for degree {degree}")]
    TooFewSteps {
        steps: usize,
        minimum: usize,
        degree: usize,
    },

    #[error("the Hessian has real projective roots; exact degree computation needs a nowhere-vanishing Hessian")]
    HessianHasRealRoots,

    #[error("could not certify a sign: {0}")]
    SignUndetermined(&'static str),

    #[error("form is not apolar to the target")]
    NotApolar,

    #[error("apolar form must have {expected} distinct real roots, found {found} (square-free: {squarefree})")]
    ApolarRoots {
        expected: usize,
        found: usize,
        squarefree: bool,
    },

    #[error("linear system for the decomposition weights is inconsistent or singular")]
    SingularSolve,

    #[error("no square-free sample after {0} retries")]
    SampleRetries(usize),

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
