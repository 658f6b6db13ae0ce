use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("payload of {0} bytes exceeds the 255-byte limit")]
    PayloadTooLong(usize),

    #[error("node name {0:?} is not exactly 4 hex digits")]
    InvalidNodeName(String),
    #[error("invalid timestamp: {0}")]
    InvalidTimestamp(String),
    #[error("flags byte {0:#04X} uses reserved bits")]
    ReservedFlagBits(u8),

    #[error("bad magic {0:02X?}")]
    BadMagic([u8; 2]),
    #[error("unsupported frame version {0:#04X}")]
    BadVersion(u8),
    #[error("frame truncated at {0} bytes")]
    TruncatedFrame(usize),
    #[error("length field says {declared} payload bytes but frame carries {actual}")]
    LengthMismatch { declared: usize, actual: usize },
    #[error("checksum mismatch: computed {computed:#04X}, received {received:#04X}")]
    ChecksumMismatch { computed: u8, received: u8 },

    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("duplicate node name {0}")]
    DuplicateName(String),
    #[error("node {name}: {which}")]
    InvariantViolation { name: String, which: String },
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("line {line}: next update is not after last update")]
    NonMonotoneUpdate { line: usize },

    #[error("node {0} has no relay path to the coordinator")]
    Unreachable(String),
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),

    #[error("pair {0} implies a different key than pair 0")]
    InconsistentPairs(usize),
    #[error("frame is not timestamp-keyed")]
    WrongMode,
    #[error("input must not be empty")]
    EmptyInput,
}
