//! IQ sample files and their metadata sidecars.
//!
//! Samples are stored as interleaved little-endian `f32` pairs
//! (I0, Q0, I1, Q1, ...) with no header. Everything else about the capture
//! lives in a `key = value` text sidecar next to it (`<file>.meta`).

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::signal::IqBuffer;

/// Encode samples as interleaved little-endian cf32.
pub fn encode_cf32(samples: &[Complex64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(samples.len() * 8);
    for s in samples {
        out.extend_from_slice(&(s.re as f32).to_le_bytes());
        out.extend_from_slice(&(s.im as f32).to_le_bytes());
    }
    out
}

pub fn decode_cf32(bytes: &[u8]) -> Result<Vec<Complex64>> {
    if !bytes.len().is_multiple_of(8) {
        return Err(Error::invalid(format!(
            "cf32 stream length {} is not a multiple of 8 bytes",
            bytes.len()
        )));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| {
            let re = f32::from_le_bytes([c[0], c[1], c[2], c[3]]);
            let im = f32::from_le_bytes([c[4], c[5], c[6], c[7]]);
            Complex64::new(re as f64, im as f64)
        })
        .collect())
}

/// Ordered `key = value` metadata, written one pair per line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Metadata {
    entries: Vec<(String, String)>,
}

impl Metadata {
    pub fn new() -> Self {
        Self::default()
    }

    /// Insert or replace a key, keeping first-insertion order.
    pub fn set(&mut self, key: impl Into<String>, value: impl ToString) {
        let key = key.into();
        let value = value.to_string();
        match self.entries.iter_mut().find(|(k, _)| *k == key) {
            Some(entry) => entry.1 = value,
            None => self.entries.push((key, value)),
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.entries {
            s.push_str(k);
            s.push_str(" = ");
            s.push_str(v);
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut meta = Metadata::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Config {
                line: idx + 1,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            meta.set(k.trim(), v.trim());
        }
        Ok(meta)
    }
}

pub fn sidecar_path(iq_path: &Path) -> PathBuf {
    let mut name = iq_path.as_os_str().to_owned();
    name.push(".meta");
    PathBuf::from(name)
}

/// Write `buf` as cf32 plus its sidecar. The sample rate is always recorded
/// in the sidecar, overriding any `sample_rate_hz` entry in `meta`.
pub fn write_iq(path: &Path, buf: &IqBuffer, meta: &Metadata) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&encode_cf32(&buf.samples))?;
    w.flush()?;

    let mut meta = meta.clone();
    meta.set("format", "cf32le");
    meta.set("sample_rate_hz", buf.sample_rate_hz);
    meta.set("n_samples", buf.len());
    std::fs::write(sidecar_path(path), meta.to_text())?;
    Ok(())
}

pub fn read_iq(path: &Path) -> Result<(IqBuffer, Metadata)> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    let samples = decode_cf32(&bytes)?;

    let mut text = String::new();
    for line in BufReader::new(File::open(sidecar_path(path))?).lines() {
        text.push_str(&line?);
        text.push('\n');
    }
    let meta = Metadata::parse(&text)?;
    let rate: f64 = meta
        .get("sample_rate_hz")
        .ok_or_else(|| Error::invalid("sidecar has no sample_rate_hz"))?
        .parse()
        .map_err(|e| Error::invalid(format!("bad sample_rate_hz: {e}")))?;
    Ok((IqBuffer::new(samples, rate)?, meta))
}
