//! Fine-grid reference solutions and their on-disk cache.
//!
//! A cache file is a 64-byte ASCII header
//!
//! ```text
//! FCREF1 <16 hex digits of the config hash> <final count> <trace count> <n> <m>  ...padding...\n
//! ```
//!
//! followed by the final-time values and then the time trace, all as
//! little-endian f64.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use fastcaputo::{
    solve_ode, solve_pde, EpsilonPolicy, OdeProblem, ProblemSpec, Scheme, SolveOptions, TimeGrid,
    VoOrderProfile,
};
use sha2::{Digest, Sha256};

use crate::error::{BenchError, Result};
use crate::study::Example;

const MAGIC: &str = "FCREF1";
pub const HEADER_LEN: usize = 64;

/// Everything a reference solution depends on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceKey {
    pub example: Example,
    pub alpha0: f64,
    pub alpha_t: f64,
    pub steps: usize,
    pub cells: Option<usize>,
    pub epsilon: f64,
    pub scheme: Scheme,
}

impl ReferenceKey {
    /// First eight bytes of SHA-256 over a canonical rendering of the key.
    pub fn hash(&self) -> u64 {
        let canonical = format!(
            "example={};alpha0={:016x};alphaT={:016x};n={};m={};eps={:016x};scheme={}",
            self.example,
            self.alpha0.to_bits(),
            self.alpha_t.to_bits(),
            self.steps,
            self.cells.map_or(0, |m| m),
            self.epsilon.to_bits(),
            self.scheme,
        );
        let digest = Sha256::digest(canonical.as_bytes());
        let mut head = [0u8; 8];
        head.copy_from_slice(&digest[..8]);
        u64::from_be_bytes(head)
    }

    pub fn file_name(&self) -> String {
        format!("ref-{}-{:016x}.bin", self.example, self.hash())
    }

    pub fn describe(&self) -> String {
        let space = self.cells.map(|m| format!(", m={m}")).unwrap_or_default();
        format!(
            "{} n={}{space} eps={:e} ({}, {})",
            self.scheme, self.steps, self.epsilon, self.alpha0, self.alpha_t
        )
    }
}

/// Final-time values of a fine solve, plus the full trace for the ODE.
#[derive(Debug, Clone, PartialEq)]
pub struct Reference {
    pub steps: usize,
    pub cells: Option<usize>,
    pub final_values: Vec<f64>,
    pub trace: Vec<f64>,
}

pub fn compute_reference(key: &ReferenceKey) -> Result<Reference> {
    let profile =
        VoOrderProfile::sine(key.alpha0, key.alpha_t, 1.0, crate::study::PROFILE_SAMPLES)?;
    let time = TimeGrid::new(1.0, key.steps)?;
    let eps = EpsilonPolicy::Fixed(key.epsilon);
    match key.example {
        Example::Ode => {
            let out = solve_ode(
                key.scheme,
                &OdeProblem::unit_source(),
                &profile,
                time,
                eps,
                SolveOptions { keep_trace: true },
            )?;
            let trace = out.field.scalar_trace();
            Ok(Reference {
                steps: key.steps,
                cells: None,
                final_values: vec![out.field.final_scalar()],
                trace,
            })
        }
        Example::Pde => {
            let cells = key.cells.ok_or_else(|| {
                BenchError::Config("PDE reference needs a spatial resolution".into())
            })?;
            let out = solve_pde(
                key.scheme,
                &ProblemSpec::sine_decay(),
                &profile,
                time,
                cells,
                eps,
                SolveOptions::default(),
            )?;
            Ok(Reference {
                steps: key.steps,
                cells: Some(cells),
                final_values: out.field.final_values().to_vec(),
                trace: Vec::new(),
            })
        }
    }
}

fn header(key: &ReferenceKey, reference: &Reference) -> String {
    let mut h = format!(
        "{MAGIC} {:016x} {} {} {} {}",
        key.hash(),
        reference.final_values.len(),
        reference.trace.len(),
        key.steps,
        key.cells.unwrap_or(0),
    );
    debug_assert!(h.len() < HEADER_LEN);
    while h.len() < HEADER_LEN - 1 {
        h.push(' ');
    }
    h.push('\n');
    h
}

pub fn save_reference(path: &Path, key: &ReferenceKey, reference: &Reference) -> Result<()> {
    let mut bytes =
        Vec::with_capacity(HEADER_LEN + 8 * (reference.final_values.len() + reference.trace.len()));
    bytes.extend_from_slice(header(key, reference).as_bytes());
    for v in reference.final_values.iter().chain(&reference.trace) {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut file = fs::File::create(path)?;
    file.write_all(&bytes)?;
    Ok(())
}

/// Parsed cache header.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Header {
    pub hash: u64,
    pub final_len: usize,
    pub trace_len: usize,
    pub steps: usize,
    pub cells: Option<usize>,
}

fn parse_header(path: &Path, bytes: &[u8]) -> Result<Header> {
    let bad = |reason: &str| BenchError::Cache {
        path: path.to_path_buf(),
        reason: reason.into(),
    };
    let head = bytes
        .get(..HEADER_LEN)
        .ok_or_else(|| bad("truncated header"))?;
    let text = std::str::from_utf8(head).map_err(|_| bad("header is not ASCII"))?;
    let mut fields = text.split_ascii_whitespace();
    if fields.next() != Some(MAGIC) {
        return Err(bad("bad magic"));
    }
    let hash = fields
        .next()
        .and_then(|h| u64::from_str_radix(h, 16).ok())
        .ok_or_else(|| bad("unreadable hash"))?;
    let mut count = || -> Result<usize> {
        fields
            .next()
            .and_then(|c| c.parse().ok())
            .ok_or_else(|| bad("unreadable counts"))
    };
    let (final_len, trace_len, steps, cells) = (count()?, count()?, count()?, count()?);
    Ok(Header {
        hash,
        final_len,
        trace_len,
        steps,
        cells: (cells > 0).then_some(cells),
    })
}

pub fn read_header(path: &Path) -> Result<Header> {
    let mut head = Vec::with_capacity(HEADER_LEN);
    fs::File::open(path)?
        .take(HEADER_LEN as u64)
        .read_to_end(&mut head)?;
    parse_header(path, &head)
}

/// Loads a cached reference, refusing files written for a different key.
pub fn load_reference(path: &Path, key: &ReferenceKey) -> Result<Reference> {
    let bytes = fs::read(path)?;
    let header = parse_header(path, &bytes)?;
    let bad = |reason: String| BenchError::Cache {
        path: path.to_path_buf(),
        reason,
    };
    if header.hash != key.hash() {
        return Err(bad(format!(
            "hash mismatch: file has {:016x}, configuration needs {:016x}",
            header.hash,
            key.hash()
        )));
    }
    let total = header.final_len + header.trace_len;
    let payload = &bytes[HEADER_LEN..];
    if payload.len() != 8 * total {
        return Err(bad(format!(
            "payload holds {} bytes, header announces {total} values",
            payload.len()
        )));
    }
    let values: Vec<f64> = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of eight")))
        .collect();
    Ok(Reference {
        steps: header.steps,
        cells: header.cells,
        final_values: values[..header.final_len].to_vec(),
        trace: values[header.final_len..].to_vec(),
    })
}

/// Where a reference came from, for report metadata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Computed,
    Cached(PathBuf),
    Loaded(PathBuf),
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Provenance::Computed => write!(f, "computed"),
            Provenance::Cached(p) => write!(f, "cache {}", p.display()),
            Provenance::Loaded(p) => write!(f, "file {}", p.display()),
        }
    }
}

/// Returns the cached reference for `key` under `dir`, computing and storing
/// it on a miss.
pub fn cache_reference(dir: &Path, key: &ReferenceKey) -> Result<(Reference, Provenance)> {
    let path = dir.join(key.file_name());
    if path.exists() {
        return Ok((load_reference(&path, key)?, Provenance::Cached(path)));
    }
    let reference = compute_reference(key)?;
    save_reference(&path, key, &reference)?;
    Ok((reference, Provenance::Computed))
}
