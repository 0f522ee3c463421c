use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("degenerate spectrum: {0}")]
    Degenerate(String),
    #[error("quadrature did not converge: estimate {value:e}, error {err:e}, requested {tol:e}")]
    Quadrature { value: f64, err: f64, tol: f64 },
    #[error("dressed pole: |1 - sigma^2 G1 G2| = {0:e} relative to its terms")]
    DressedPole(f64),
    #[error("quadratic form is not positive definite (overcritical coupling)")]
    Unstable,
    #[error("root finding failed: {0}")]
    RootFinding(String),
    #[error("coincident arguments k' = k~ are not supported by the difference identities")]
    Coincident,
    #[error("imaginary residue {0:e} exceeds tolerance")]
    ImaginaryResidue(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
