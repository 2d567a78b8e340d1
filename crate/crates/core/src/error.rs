use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: duplicate interaction for user {user:?} and item {item:?}")]
    Duplicate {
        line: usize,
        user: String,
        item: String,
    },

    #[error("line {line}: unknown {kind} identifier {id:?}")]
    UnknownIdentifier {
        line: usize,
        kind: &'static str,
        id: String,
    },

    #[error("line {line}: user {user:?} already interacted with item {item:?} in training")]
    MaskViolation {
        line: usize,
        user: String,
        item: String,
    },

    #[error("dataset contains no interactions")]
    EmptyDataset,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(
        "infeasible capacity: item caps provide {total} usable slots but {required} are needed"
    )]
    InfeasibleCapacity { total: usize, required: usize },

    #[error("user {user} has only {len} ranked items, fewer than k = {k}")]
    ShortPreferenceList { user: usize, len: usize, k: usize },

    #[error("user {user} ran out of preferences {shortfall} item(s) short of a full list")]
    ExhaustedPreferences { user: usize, shortfall: usize },

    #[error("invalid ranking: {0}")]
    InvalidRanking(String),

    #[error("entity {0} does not appear in the ranking")]
    NotRanked(usize),

    #[error("invalid matching: {0}")]
    InvalidMatching(String),

    #[error("invalid probability vector: {0}")]
    InvalidDistribution(String),

    #[error("matching contains no recommendations")]
    EmptyMatching,

    #[error("negative score {score} for user {user}, item {item}")]
    NegativeScore { user: usize, item: usize, score: f64 },

    #[error(
        "instance too large to enumerate: {users} users, {items} items, k = {k}, max cap = {max_cap} \
         (limits: 6 users, 6 items, k <= 2, cap <= 3)"
    )]
    EnumerationGuard {
        users: usize,
        items: usize,
        k: usize,
        max_cap: usize,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
