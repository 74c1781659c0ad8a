use thiserror::Error;

use crate::jets::JetError;
use crate::spaceforms::SpaceFormError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    SpaceForm(#[from] SpaceFormError),
    #[error("chart point ({u}, {v}) lies outside the surface domain")]
    OutsideDomain { u: f64, v: f64 },
    #[error("chart is not an immersion here: det g = {det:e}")]
    DegenerateMetric { det: f64 },
    #[error("chart returned {got} flat coordinates, ambient expects {expected}")]
    ChartDimension { expected: usize, got: usize },
    #[error("vector is not normal to the surface (defect {defect:e})")]
    NotNormal { defect: f64 },
    #[error("surface is minimal here (|H| = {norm_h:e}); operator S is undefined")]
    MinimalSurface { norm_h: f64 },
    #[error("surface is not minimal (max |H| = {norm_h:e})")]
    NotMinimal { norm_h: f64 },
    #[error("operator is singular (det = {det:e})")]
    SingularOperator { det: f64 },
    #[error("|S| = {norm:e} is below the floor; ln|S| is undefined")]
    ZeroOfS { norm: f64 },
    #[error("operator is not traceless (trace = {trace:e})")]
    NotTraceless { trace: f64 },
    #[error("operator fails the Codazzi gate (max residual {residual:e})")]
    CodazziGate { residual: f64 },
    #[error("surface fails the parallel-mean-curvature gate (max |∇^⊥H| = {residual:e})")]
    PmcGate { residual: f64 },
    #[error("unknown surface id `{0}`")]
    UnknownSurface(String),
    #[error("parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for errors caused by the caller's choice of surface, parameters
    /// or theorem, as opposed to numerical breakdown.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::OutsideDomain { .. }
                | Error::MinimalSurface { .. }
                | Error::NotMinimal { .. }
                | Error::CodazziGate { .. }
                | Error::PmcGate { .. }
                | Error::UnknownSurface(_)
                | Error::InvalidParameter { .. }
                | Error::InvalidArgument(_)
                | Error::NotTraceless { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
