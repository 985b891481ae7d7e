//! On-disk spectrum cache.
//!
//! Layout, all little-endian:
//!
//! ```text
//! offset  size  field
//!      0     4  magic "TGSP"
//!      4     4  version (u32) = 1
//!      8     1  class (0 generic, 1 rectangular)
//!      9     3  zero padding
//!     12    24  a1, a2, a3 (f64)
//!     36     8  cutoff N (f64)
//!     44     8  count (u64)
//!     52  8*count  values (f64)
//!   end      4  CRC32 of every preceding byte
//! ```
//!
//! Writes go to a temporary file in the destination directory which is then
//! renamed over the target, so readers never observe a partial file.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use thiserror::Error;

use crate::form::{FormError, ReducedForm, SymmetryClass};
use crate::spectrum::{Spectrum, SpectrumError};

pub const MAGIC: [u8; 4] = *b"TGSP";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 52;

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("bad magic bytes {0:?}")]
    BadMagic([u8; 4]),
    #[error("unsupported cache version {0}")]
    VersionMismatch(u32),
    #[error("file truncated: expected {expected} bytes, found {found}")]
    TruncatedFile { expected: u64, found: u64 },
    #[error("checksum mismatch: stored {stored:#010x}, computed {computed:#010x}")]
    ChecksumMismatch { stored: u32, computed: u32 },
    #[error("unknown symmetry class code {0}")]
    BadClass(u8),
    #[error("cached form is invalid: {0}")]
    Form(#[from] FormError),
    #[error("cached spectrum is invalid: {0}")]
    Spectrum(#[from] SpectrumError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub fn encode(spectrum: &Spectrum) -> Vec<u8> {
    let values = spectrum.values();
    let mut buf = Vec::with_capacity(HEADER_LEN + 8 * values.len() + 4);
    buf.extend_from_slice(&MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.push(spectrum.form().class().code());
    buf.extend_from_slice(&[0u8; 3]);
    let (a1, a2, a3) = spectrum.form().coefficients();
    for x in [a1, a2, a3, spectrum.cutoff()] {
        buf.extend_from_slice(&x.to_le_bytes());
    }
    buf.extend_from_slice(&(values.len() as u64).to_le_bytes());
    for v in values {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    let crc = crc32fast::hash(&buf);
    buf.extend_from_slice(&crc.to_le_bytes());
    buf
}

fn f64_at(bytes: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(bytes[at..at + 8].try_into().unwrap())
}

pub fn decode(bytes: &[u8]) -> Result<Spectrum, CacheError> {
    let found = bytes.len() as u64;
    if bytes.len() < 4 {
        return Err(CacheError::TruncatedFile {
            expected: HEADER_LEN as u64 + 4,
            found,
        });
    }
    let magic: [u8; 4] = bytes[..4].try_into().unwrap();
    if magic != MAGIC {
        return Err(CacheError::BadMagic(magic));
    }
    if bytes.len() < 8 {
        return Err(CacheError::TruncatedFile {
            expected: HEADER_LEN as u64 + 4,
            found,
        });
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != VERSION {
        return Err(CacheError::VersionMismatch(version));
    }
    if bytes.len() < HEADER_LEN {
        return Err(CacheError::TruncatedFile {
            expected: HEADER_LEN as u64 + 4,
            found,
        });
    }
    let count = u64::from_le_bytes(bytes[44..52].try_into().unwrap());
    let expected = count
        .checked_mul(8)
        .and_then(|v| v.checked_add(HEADER_LEN as u64 + 4))
        .unwrap_or(u64::MAX);
    if found < expected {
        return Err(CacheError::TruncatedFile { expected, found });
    }
    let body_end = expected as usize - 4;
    let stored = u32::from_le_bytes(bytes[body_end..body_end + 4].try_into().unwrap());
    let computed = crc32fast::hash(&bytes[..body_end]);
    if stored != computed {
        return Err(CacheError::ChecksumMismatch { stored, computed });
    }
    let class = SymmetryClass::from_code(bytes[8]).ok_or(CacheError::BadClass(bytes[8]))?;
    let form = ReducedForm::new(
        f64_at(bytes, 12),
        f64_at(bytes, 20),
        f64_at(bytes, 28),
        class,
    )?;
    let cutoff = f64_at(bytes, 36);
    let values = bytes[HEADER_LEN..body_end]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(Spectrum::from_sorted(form, cutoff, values)?)
}

/// Atomically writes `spectrum` to `path`.
pub fn write_cache(spectrum: &Spectrum, path: &Path) -> Result<(), CacheError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(&encode(spectrum))?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn read_cache(path: &Path) -> Result<Spectrum, CacheError> {
    let bytes = fs::read(path)?;
    decode(&bytes)
}
