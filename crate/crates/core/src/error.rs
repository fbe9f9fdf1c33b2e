use thiserror::Error;

/// Failures raised by the model engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("utility is not strictly concave: {0}")]
    NotConcave(String),

    #[error("no saddle path: a_c1h = {a_c1h} must lie below {bound}")]
    NotSaddle { a_c1h: f64, bound: f64 },

    #[error("restriction `{threshold}` violated: {detail}")]
    Restriction {
        threshold: &'static str,
        detail: String,
    },

    #[error("threshold undefined: {0}")]
    UndefinedThreshold(String),

    #[error("residual has no sign change on [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },

    #[error(
        "sector 2 is not viable without a lockdown: lowest price {p_low} is below the floor {p_min}"
    )]
    CounterfactualNotViable { p_low: f64, p_min: f64 },

    #[error("steady-state price {p_star} does not exceed the floor {p_min}; no transitory subsidy reopens sector 2")]
    NeverViable { p_star: f64, p_min: f64 },

    #[error("singular linear system (condition number {cond:e})")]
    Singular { cond: f64 },

    #[error("quadrature missed its tolerance: error estimate {estimate:e}")]
    Quadrature { estimate: f64 },

    #[error("expectation undefined: {0}")]
    UndefinedExpectation(String),
}

pub type Result<T> = std::result::Result<T, ModelError>;
