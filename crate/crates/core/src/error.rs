use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("player index {0} out of range (expected 0 or 1)")]
    PlayerOutOfRange(usize),
    #[error("strategy index {index} out of range for {count} strategies")]
    StrategyOutOfRange { index: usize, count: usize },
    #[error("malformed game: {0}")]
    MalformedGame(String),
    #[error("unknown payoff symbol `{0}`")]
    UnknownSymbol(String),
    #[error("invalid constraint {left} > {right}: {reason}")]
    InvalidConstraint { left: String, right: String, reason: String },
    #[error("inconsistent order: certain constraints form a cycle {}", cycle.join(" > "))]
    InconsistentOrder { cycle: Vec<String> },
    #[error("no point probability stored for {left} > {right}")]
    MissingProbability { left: String, right: String },
    #[error("rejection sampling gave up after {attempts} attempts")]
    SamplingExhausted { attempts: u64 },
    #[error("invalid event space: {0}")]
    InvalidEventSpace(String),
    #[error("zero evidence: all prior-weighted likelihoods vanish")]
    ZeroEvidence,
    #[error("degenerate prior for the distinguished event: {0}")]
    DegeneratePrior(f64),
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter { name: &'static str, value: f64, reason: &'static str },
    #[error("published constants are only available in paper mode")]
    ModeGate,
    #[error("survey: {0}")]
    Survey(String),
    #[error("empty parameter grid")]
    EmptyGrid,
    #[error("scenario: {0}")]
    Scenario(String),
}
