//! Lossless compression with non-prefix-free codes.
//!
//! Symbols are mapped to minimal-binary-representation codewords ordered
//! by frequency, which beats prefix-free codeword lengths but leaves the
//! stream ambiguous: some codewords are prefixes of others. Decodability
//! is restored block-wise. For every `d` consecutive symbols the codeword
//! lengths form a vector summing to `p`; the vector is stored as the pair
//! `(p, q)` where `q` is its lexicographic rank among all length vectors
//! with that sum. Both streams are compressed with context-adaptive range
//! coding, and sums admitting a single vector skip `q` entirely.
//!
//! The crate provides the codec ([`pipeline`]), the persisted format
//! ([`container`]) with an optional split of codewords and boundary
//! streams into separate files, the exact composition combinatorics
//! ([`enumeration`]), and baseline compressors for benchmarking
//! ([`baselines`]).
//!
//! ```
//! let data = b"abracadabra abracadabra";
//! let container = npf_core::pipeline::encode(data, 6).unwrap();
//! let restored = npf_core::pipeline::decode(&container).unwrap();
//! assert_eq!(restored, data);
//! ```

pub mod baselines;
pub mod bits;
pub mod codebook;
pub mod container;
pub mod entropy;
pub mod enumeration;
pub mod error;
pub mod pipeline;

pub use container::Container;
pub use error::{Error, Result};
