use std::path::PathBuf;

/// Errors surfaced by the codec, container format, and baselines.
///
/// Decode-side failures are split into distinct classes so that a caller
/// (and the fuzz tests) can tell a truncated file from a corrupted one
/// from a file that is simply not ours.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A (k, d) configuration whose enumeration counts do not fit in 64 bits.
    #[error("configuration too large: psi({k},{d},{v}) overflows 64-bit counts")]
    ConfigTooLarge { k: u8, d: u8, v: u32 },

    /// Parameter outside its documented range (e.g. block size d).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A rank that names no vector for the given sum; during decode this
    /// signals a corrupted Qstream.
    #[error("invalid rank {rank} for sum {sum} (only {count} vectors exist)")]
    InvalidRank { sum: u32, rank: u64, count: u64 },

    /// Input with no symbols where at least one is required.
    #[error("empty input")]
    EmptyInput,

    /// Decoded data is structurally impossible (codeword rank past the
    /// alphabet, inconsistent stream contents).
    #[error("corrupt stream: {0}")]
    CorruptStream(String),

    /// Ran out of bytes or bits before the declared content ended.
    #[error("truncated stream: {0}")]
    TruncatedStream(String),

    /// Not an npf container.
    #[error("bad magic: not an npf container")]
    BadMagic,

    /// Container version this build does not understand.
    #[error("unsupported container version {0}")]
    UnsupportedVersion(u8),

    /// Structurally invalid header (bad lengths, bad alphabet, ...).
    #[error("malformed header: {0}")]
    MalformedHeader(String),

    /// A codeword-stream file (`.npfb`) was given without its boundary
    /// streams; the codewords alone are not uniquely decodable.
    #[error("missing boundary stream: codeword file requires its .npfk companion")]
    MissingBoundaryStream,

    /// A boundary-stream file (`.npfk`) was given without the codewords.
    #[error("missing codeword stream: boundary file requires its .npfb companion")]
    MissingCodewordStream,

    /// I/O failure, tagged with the file it happened on.
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
