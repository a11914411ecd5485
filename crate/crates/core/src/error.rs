use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("stratification violation: `{0}` node has a child with the same connective")]
    Stratification(String),
    #[error("arity-{arity} node at byte {pos}: internal nodes need at least two children")]
    Arity { pos: usize, arity: usize },
    #[error("variable x{var} out of range 1..={n}")]
    VariableOutOfRange { var: u32, n: u32 },
    #[error("empty size class: no tree has size {0}")]
    EmptySizeClass(usize),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("unknown, L(f) > {0}")]
    ComplexityUnknown(usize),
    #[error("elements of Q(sqrt({0})) and Q(sqrt({1})) cannot be mixed")]
    FieldMismatch(u64, u64),
    #[error("division by zero while evaluating `{0}`")]
    Pole(String),
    #[error("missing environment value `{0}`")]
    MissingEnv(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid path {0:?}")]
    InvalidPath(Vec<usize>),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
