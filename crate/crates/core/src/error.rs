use thiserror::Error;

/// Errors raised by the numerical engine, the harnesses and the scenario layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("quadrature did not converge on [{lo}, {hi}] within {max_subdiv} panels (error estimate {estimate:e})")]
    NonConvergent { lo: f64, hi: f64, max_subdiv: usize, estimate: f64 },

    #[error("divergent integral: tail beyond radius {radius:e} still contributes {increment:e}")]
    DivergentIntegral { radius: f64, increment: f64 },

    #[error("objective decreases toward the edge of the search box (value {value} at {edge:?})")]
    Unbounded { edge: Vec<f64>, value: f64 },

    #[error("stencil point {0} lies outside the sampled domain")]
    OutOfDomain(f64),

    #[error("point {0:?} is not inside the domain")]
    PointOutsideDomain(Vec<f64>),

    #[error("analytic disc leaves the domain at w = {re} + {im}i")]
    DiscEscapesDomain { re: f64, im: f64 },

    #[error("unknown weight name `{0}`")]
    UnknownName(String),

    #[error("Bergman kernel vanishes identically: constants are not square integrable")]
    ZeroKernel,

    #[error("Gram matrix is ill-conditioned (condition estimate {0:e})")]
    IllConditioned(f64),

    #[error("kernel method unavailable: {0}")]
    MethodUnavailable(String),

    #[error("weight `{0}` carries no lower bound")]
    MissingLowerBound(String),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures of the numerics themselves (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergent { .. }
                | Error::DivergentIntegral { .. }
                | Error::Unbounded { .. }
                | Error::ZeroKernel
                | Error::IllConditioned(_)
                | Error::DiscEscapesDomain { .. }
                | Error::MethodUnavailable(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
