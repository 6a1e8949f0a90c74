use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("elements belong to different generator sets: {0}")]
    IncompatibleAlgebras(String),
    #[error("matrix is not unimodular (det = {det})")]
    NotUnimodular { det: String },
    #[error("invalid involution matrix: {0}")]
    InvalidInvolution(String),
    #[error("orbit classification of the zero vector")]
    ZeroVector,
    #[error("singular transformation: {0}")]
    SingularTransformation(String),
    #[error("aliasing risk: {nodes} nodes cannot resolve degree {degree}")]
    AliasingRisk { nodes: usize, degree: usize },
    #[error("argument outside the supported domain: {0}")]
    DomainError(String),
    #[error("null subrepresentation: {0}")]
    NullSubrepresentation(String),
    #[error("generator is not regularizable: {0}")]
    NotRegularizable(String),
    #[error("matrix is not hermitian")]
    NotHermitian,
    #[error("matrix is degenerate: {0}")]
    Degenerate(String),
    #[error("input state is zero")]
    ZeroInput,
    #[error("parse error at byte {offset}: expected one of [{}]", expected.join(", "))]
    Parse { offset: usize, expected: Vec<String> },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable machine-readable code, used by the CLI and the C ABI.
    pub fn code(&self) -> &'static str {
        match self {
            Error::IncompatibleAlgebras(_) => "IncompatibleAlgebras",
            Error::NotUnimodular { .. } => "NotUnimodular",
            Error::InvalidInvolution(_) => "InvalidInvolution",
            Error::ZeroVector => "ZeroVector",
            Error::SingularTransformation(_) => "SingularTransformation",
            Error::AliasingRisk { .. } => "AliasingRisk",
            Error::DomainError(_) => "DomainError",
            Error::NullSubrepresentation(_) => "NullSubrepresentation",
            Error::NotRegularizable(_) => "NotRegularizable",
            Error::NotHermitian => "NotHermitian",
            Error::Degenerate(_) => "Degenerate",
            Error::ZeroInput => "ZeroInput",
            Error::Parse { .. } => "ParseError",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }

    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse { .. })
    }
}
