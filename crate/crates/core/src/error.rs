use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("player count {0} out of range (1..=64)")]
    PlayerCount(usize),
    #[error("player {player} out of range for a game on {n} players")]
    PlayerOutOfRange { player: usize, n: usize },
    #[error("minimal winning coalitions must be non-empty and must not contain the empty coalition")]
    ImproperGame,
    #[error("minimal winning coalitions are not an antichain: {0} and {1} are comparable")]
    NotAntichain(String, String),
    #[error("operation requires a complete game")]
    NotComplete,
    #[error("game is fully trivial (only vetoers and null players)")]
    FullyTrivial,
    #[error("type vectors have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("type vector {0:?} lies outside the lattice for class sizes {1:?}")]
    TypeOutOfRange(Vec<u32>, Vec<u32>),
    #[error("invalid characteristic invariants: {0}")]
    InvalidInvariants(String),
    #[error("operation requires exactly two player classes, got {0}")]
    NotTwoClasses(usize),
    #[error("game is weighted")]
    Weighted,
    #[error("closed form not applicable: {0}")]
    NotCovered(String),
    #[error("invalid family parameters: {0}")]
    FamilyParams(String),
    #[error("invalid trade: {0}")]
    InvalidTrade(String),
    #[error("invalid document: {0}")]
    Document(String),
}

pub type Result<T> = std::result::Result<T, Error>;
