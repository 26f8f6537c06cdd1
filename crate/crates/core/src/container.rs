//! The persisted artifact: a fixed little-endian header followed by the
//! codeword bitstream `B`, the Pstream, and the Qstream.
//!
//! A container can be written as one blob or split into a codeword file
//! (`.npfb`) and a boundary file (`.npfk`). Neither half decodes alone;
//! both carry the full header so either is self-describing.

use std::fs;
use std::path::Path;

use crate::bits::Bitstream;
use crate::error::{Error, Result};

const MAGIC: [u8; 4] = *b"NPFC";
const VERSION: u8 = 1;

/// Fixed header bytes before the variable-length alphabet.
const FIXED_PREFIX: usize = 4 + 1 + 1 + 8 + 1 + 2;
/// Stream-length fields after the alphabet.
const LENGTH_FIELDS: usize = 8 * 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    Combined,
    Codewords,
    Boundaries,
}

impl Role {
    fn as_byte(self) -> u8 {
        match self {
            Role::Combined => 0,
            Role::Codewords => 1,
            Role::Boundaries => 2,
        }
    }

    fn from_byte(b: u8) -> Result<Self> {
        match b {
            0 => Ok(Role::Combined),
            1 => Ok(Role::Codewords),
            2 => Ok(Role::Boundaries),
            other => Err(Error::MalformedHeader(format!("unknown role byte {other}"))),
        }
    }
}

/// One compressed artifact: header fields plus the three payloads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Container {
    n: u64,
    d: u8,
    alphabet: Vec<u8>,
    codewords: Bitstream,
    pstream: Vec<u8>,
    qstream: Vec<u8>,
}

impl Container {
    pub fn new(
        n: u64,
        d: u8,
        alphabet: Vec<u8>,
        codewords: Bitstream,
        pstream: Vec<u8>,
        qstream: Vec<u8>,
    ) -> Result<Self> {
        if !(1..=16).contains(&d) {
            return Err(Error::InvalidParameter(format!(
                "block size d must be in [1..16], got {d}"
            )));
        }
        if alphabet.len() > 256 {
            return Err(Error::InvalidParameter(format!(
                "alphabet of {} symbols exceeds 256",
                alphabet.len()
            )));
        }
        if n > 0 && alphabet.is_empty() {
            return Err(Error::InvalidParameter(
                "nonempty data requires a nonempty alphabet".into(),
            ));
        }
        Ok(Container {
            n,
            d,
            alphabet,
            codewords,
            pstream,
            qstream,
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn d(&self) -> u8 {
        self.d
    }

    pub fn sigma(&self) -> usize {
        self.alphabet.len()
    }

    /// Symbols in codebook rank order.
    pub fn alphabet(&self) -> &[u8] {
        &self.alphabet
    }

    pub fn codeword_stream(&self) -> &Bitstream {
        &self.codewords
    }

    pub fn pstream(&self) -> &[u8] {
        &self.pstream
    }

    pub fn qstream(&self) -> &[u8] {
        &self.qstream
    }

    /// Serialized header size in bytes.
    pub fn header_len(&self) -> usize {
        FIXED_PREFIX + self.alphabet.len() + LENGTH_FIELDS
    }

    /// Size of the single-file serialization in bytes.
    pub fn encoded_len(&self) -> usize {
        self.header_len() + self.codewords.bytes().len() + self.pstream.len() + self.qstream.len()
    }

    fn header_bytes(&self, role: Role) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.header_len());
        out.extend_from_slice(&MAGIC);
        out.push(VERSION);
        out.push(role.as_byte());
        out.extend_from_slice(&self.n.to_le_bytes());
        out.push(self.d);
        out.extend_from_slice(&(self.alphabet.len() as u16).to_le_bytes());
        out.extend_from_slice(&self.alphabet);
        out.extend_from_slice(&self.codewords.bit_len().to_le_bytes());
        out.extend_from_slice(&(self.codewords.bytes().len() as u64).to_le_bytes());
        out.extend_from_slice(&(self.pstream.len() as u64).to_le_bytes());
        out.extend_from_slice(&(self.qstream.len() as u64).to_le_bytes());
        out
    }

    /// Single-file serialization.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = self.header_bytes(Role::Combined);
        out.extend_from_slice(self.codewords.bytes());
        out.extend_from_slice(&self.pstream);
        out.extend_from_slice(&self.qstream);
        out
    }

    /// Split serialization: `(codeword file, boundary file)`.
    pub fn to_split_bytes(&self) -> (Vec<u8>, Vec<u8>) {
        let mut b = self.header_bytes(Role::Codewords);
        b.extend_from_slice(self.codewords.bytes());
        let mut k = self.header_bytes(Role::Boundaries);
        k.extend_from_slice(&self.pstream);
        k.extend_from_slice(&self.qstream);
        (b, k)
    }

    /// Parse a single-file container.
    ///
    /// A split half parses but is refused here: codewords without their
    /// boundary streams (or vice versa) cannot decode.
    pub fn from_bytes(data: &[u8]) -> Result<Self> {
        let parsed = Parsed::parse(data)?;
        match parsed.role {
            Role::Combined => parsed.into_container(),
            Role::Codewords => Err(Error::MissingBoundaryStream),
            Role::Boundaries => Err(Error::MissingCodewordStream),
        }
    }

    /// Recombine split halves, in either order.
    pub fn from_split_bytes(first: &[u8], second: &[u8]) -> Result<Self> {
        let a = Parsed::parse(first)?;
        let b = Parsed::parse(second)?;
        let (codewords, boundaries) = match (a.role, b.role) {
            (Role::Codewords, Role::Boundaries) => (a, b),
            (Role::Boundaries, Role::Codewords) => (b, a),
            (Role::Codewords, Role::Codewords) => return Err(Error::MissingBoundaryStream),
            (Role::Boundaries, Role::Boundaries) => return Err(Error::MissingCodewordStream),
            _ => {
                return Err(Error::MalformedHeader(
                    "expected one codeword half and one boundary half".into(),
                ))
            }
        };
        if !codewords.header_matches(&boundaries) {
            return Err(Error::MalformedHeader(
                "split halves describe different containers".into(),
            ));
        }
        Container::new(
            codewords.n,
            codewords.d,
            codewords.alphabet,
            Bitstream::from_parts(codewords.b_payload, codewords.b_bits)?,
            boundaries.p_payload,
            boundaries.q_payload,
        )
    }

    pub fn write_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn write_split_files(
        &self,
        codeword_path: impl AsRef<Path>,
        boundary_path: impl AsRef<Path>,
    ) -> Result<()> {
        let (b, k) = self.to_split_bytes();
        let bp = codeword_path.as_ref();
        fs::write(bp, b).map_err(|e| Error::io(bp, e))?;
        let kp = boundary_path.as_ref();
        fs::write(kp, k).map_err(|e| Error::io(kp, e))
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let data = fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&data)
    }

    pub fn read_split_files(
        first: impl AsRef<Path>,
        second: impl AsRef<Path>,
    ) -> Result<Self> {
        let fp = first.as_ref();
        let a = fs::read(fp).map_err(|e| Error::io(fp, e))?;
        let sp = second.as_ref();
        let b = fs::read(sp).map_err(|e| Error::io(sp, e))?;
        Self::from_split_bytes(&a, &b)
    }
}

/// A validated header plus whichever payloads the role carries.
struct Parsed {
    role: Role,
    n: u64,
    d: u8,
    alphabet: Vec<u8>,
    b_bits: u64,
    declared: (u64, u64, u64),
    b_payload: Vec<u8>,
    p_payload: Vec<u8>,
    q_payload: Vec<u8>,
}

impl Parsed {
    fn parse(data: &[u8]) -> Result<Self> {
        let mut cur = Cursor { data, pos: 0 };
        let magic = cur.take(4)?;
        if magic != MAGIC {
            return Err(Error::BadMagic);
        }
        let version = cur.take(1)?[0];
        if version != VERSION {
            return Err(Error::UnsupportedVersion(version));
        }
        let role = Role::from_byte(cur.take(1)?[0])?;
        let n = cur.u64()?;
        let d = cur.take(1)?[0];
        if !(1..=16).contains(&d) {
            return Err(Error::MalformedHeader(format!(
                "block size {d} outside [1..16]"
            )));
        }
        let sigma = u16::from_le_bytes(cur.take(2)?.try_into().unwrap()) as usize;
        if sigma > 256 {
            return Err(Error::MalformedHeader(format!(
                "alphabet size {sigma} exceeds 256"
            )));
        }
        if n > 0 && sigma == 0 {
            return Err(Error::MalformedHeader(
                "nonempty data with empty alphabet".into(),
            ));
        }
        let alphabet = cur.take(sigma)?.to_vec();
        let mut seen = [false; 256];
        for &s in &alphabet {
            if seen[s as usize] {
                return Err(Error::MalformedHeader(format!(
                    "alphabet repeats symbol {s:#04x}"
                )));
            }
            seen[s as usize] = true;
        }
        let b_bits = cur.u64()?;
        let b_len = cur.u64()?;
        let p_len = cur.u64()?;
        let q_len = cur.u64()?;
        if b_len != b_bits.div_ceil(8) {
            return Err(Error::MalformedHeader(format!(
                "codeword stream declares {b_bits} bits in {b_len} bytes"
            )));
        }

        let expected: u64 = match role {
            Role::Combined => b_len
                .checked_add(p_len)
                .and_then(|s| s.checked_add(q_len))
                .ok_or_else(|| Error::MalformedHeader("stream lengths overflow".into()))?,
            Role::Codewords => b_len,
            Role::Boundaries => p_len
                .checked_add(q_len)
                .ok_or_else(|| Error::MalformedHeader("stream lengths overflow".into()))?,
        };
        let remaining = (data.len() - cur.pos) as u64;
        if remaining < expected {
            return Err(Error::TruncatedStream(format!(
                "payload holds {remaining} of {expected} declared bytes"
            )));
        }
        if remaining > expected {
            return Err(Error::MalformedHeader(format!(
                "{} trailing bytes past declared payload",
                remaining - expected
            )));
        }

        let mut b_payload = Vec::new();
        let mut p_payload = Vec::new();
        let mut q_payload = Vec::new();
        match role {
            Role::Combined => {
                b_payload = cur.take(b_len as usize)?.to_vec();
                p_payload = cur.take(p_len as usize)?.to_vec();
                q_payload = cur.take(q_len as usize)?.to_vec();
            }
            Role::Codewords => {
                b_payload = cur.take(b_len as usize)?.to_vec();
            }
            Role::Boundaries => {
                p_payload = cur.take(p_len as usize)?.to_vec();
                q_payload = cur.take(q_len as usize)?.to_vec();
            }
        }
        Ok(Parsed {
            role,
            n,
            d,
            alphabet,
            b_bits,
            declared: (b_len, p_len, q_len),
            b_payload,
            p_payload,
            q_payload,
        })
    }

    fn header_matches(&self, other: &Parsed) -> bool {
        self.n == other.n
            && self.d == other.d
            && self.alphabet == other.alphabet
            && self.b_bits == other.b_bits
            && self.declared == other.declared
    }

    fn into_container(self) -> Result<Container> {
        Container::new(
            self.n,
            self.d,
            self.alphabet,
            Bitstream::from_parts(self.b_payload, self.b_bits)?,
            self.p_payload,
            self.q_payload,
        )
    }
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        if self.data.len() - self.pos < len {
            return Err(Error::TruncatedStream(format!(
                "header wanted {len} bytes at offset {}",
                self.pos
            )));
        }
        let slice = &self.data[self.pos..self.pos + len];
        self.pos += len;
        Ok(slice)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}
