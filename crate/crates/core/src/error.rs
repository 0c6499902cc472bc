use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("size error: {0}")]
    Size(String),

    #[error("index error: qubits ({i}, {j}) invalid for a {n}-qubit register")]
    Index { i: usize, j: usize, n: usize },

    #[error("bipartition error: half-chain cut needs an even qubit count, got {0}")]
    Bipartition(usize),

    #[error("numerical consistency error: {0}")]
    Numerical(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("(e_p, g_t) = ({e_p}, {g_t}) lies outside the permissible region")]
    OutsideRegion { e_p: f64, g_t: f64 },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("no crossing: {0}")]
    NoCrossing(String),
}

impl Error {
    /// Short stable tag, used in machine-readable error lines.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Size(_) => "size",
            Error::Index { .. } => "index",
            Error::Bipartition(_) => "bipartition",
            Error::Numerical(_) => "numerical",
            Error::Domain(_) => "domain",
            Error::OutsideRegion { .. } => "outside-region",
            Error::DegenerateFit(_) => "degenerate-fit",
            Error::NoCrossing(_) => "no-crossing",
        }
    }
}
