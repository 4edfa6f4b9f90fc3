use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge: estimate {estimate:e}, error bound {error_bound:e} after {evaluations} evaluations")]
    Quadrature {
        estimate: f64,
        error_bound: f64,
        evaluations: usize,
    },

    /// The closed form could not be resolved even at the maximum working
    /// precision; the quadrature path should be used instead.
    #[error("{}", ill_conditioned(*.precision_bits, *.previous, *.last))]
    IllConditioned {
        precision_bits: u32,
        previous: f64,
        last: f64,
    },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("target {target} is infeasible: the rate saturates at {ceiling} as power grows")]
    Infeasible { target: f64, ceiling: f64 },

    #[error("SINR limit is unbounded (no inter-cell interference)")]
    Unbounded,
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

fn ill_conditioned(bits: u32, previous: f64, last: f64) -> String {
    if previous.is_nan() && last.is_nan() {
        format!("closed form would need about {bits} bits of working precision; use the quadrature path")
    } else {
        format!("closed form is ill-conditioned at {bits} bits (last two estimates {previous:e} and {last:e}); use the quadrature path")
    }
}
