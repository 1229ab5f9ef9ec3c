use thiserror::Error;

pub type Result<T> = std::result::Result<T, VolspecError>;

#[derive(Debug, Error)]
pub enum VolspecError {
    /// Inputs outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Model or run configuration is inconsistent.
    #[error("configuration error: {0}")]
    Config(String),

    /// Eigenvector matrix stayed ill-conditioned after the perturbation retry.
    #[error("diagonalization failed (condition estimate {condition:.3e}): {detail}")]
    Diagonalization { condition: f64, detail: String },

    /// A numerical guard tripped (imaginary residue, negative rates, ...).
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Spectral failure inside the block family, tagged with the block index.
    #[error("block {block}: {source}")]
    Block {
        block: usize,
        #[source]
        source: Box<VolspecError>,
    },

    /// Probability mass escaped through the periodic variance boundary.
    #[error("leakage guard tripped: {mass:.3e} in the top {buckets} buckets (limit {limit:.1e})")]
    Leakage { mass: f64, buckets: usize, limit: f64 },

    /// Price outside the no-arbitrage bounds of the inverted formula.
    #[error("implied volatility inversion failed: {0}")]
    Inversion(String),

    #[error("config parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl VolspecError {
    /// True for errors caused by user-supplied configuration rather than by
    /// the numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            VolspecError::Config(_) | VolspecError::Parse { .. } | VolspecError::Domain(_)
        )
    }
}
