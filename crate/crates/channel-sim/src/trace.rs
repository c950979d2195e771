//! Receiver waveforms and their on-disk forms.
//!
//! Binary layout (little-endian):
//!
//! ```text
//! offset  size  field
//! 0       4     magic "PHTR"
//! 4       4     u32 format version (currently 1)
//! 8       8     u64 header length H
//! 16      H     UTF-8 JSON header: {"sample_rate", "seed",
//!               "params_digest", "n_samples"}
//! 16+H    8·n   f64 pH samples
//! ```
//!
//! The JSON-lines debug form puts the same header object on line 1 and
//! one `{"t": seconds, "ph": value}` object per sample after it.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const MAGIC: &[u8; 4] = b"PHTR";
const VERSION: u32 = 1;

/// Uniformly sampled pH time series at the receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveformTrace {
    sample_rate: f64,
    samples: Vec<f64>,
}

/// Provenance header carried by trace files.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TraceMeta {
    pub sample_rate: f64,
    pub seed: u64,
    pub params_digest: String,
    pub n_samples: usize,
}

impl WaveformTrace {
    pub fn new(sample_rate: f64, samples: Vec<f64>) -> Self {
        assert!(sample_rate > 0.0);
        debug_assert!(
            samples.iter().all(|&s| (0.0..=14.0).contains(&s)),
            "pH sample outside [0, 14]"
        );
        WaveformTrace {
            sample_rate,
            samples,
        }
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }

    pub fn time_of(&self, index: usize) -> f64 {
        index as f64 / self.sample_rate
    }

    /// Nearest sample index for a time, clamped into range.
    pub fn index_of(&self, t: f64) -> usize {
        ((t * self.sample_rate).round() as usize).min(self.samples.len().saturating_sub(1))
    }

    /// First time the trace deviates from its initial level by more than
    /// `threshold` pH units. On a noiseless trace this pins the arrival
    /// of the first injected slug at the receiver — the bookkeeping
    /// ground truth that synchronization detectors are measured against.
    pub fn first_deviation(&self, threshold: f64) -> Option<f64> {
        let base = *self.samples.first()?;
        self.samples
            .iter()
            .position(|&s| (s - base).abs() > threshold)
            .map(|i| self.time_of(i))
    }

    /// RMS of the sample-wise difference, normalized by the RMS
    /// deviation of `self` from its initial level. Traces must share a
    /// sample rate; the comparison runs over the common prefix.
    pub fn relative_rms_diff(&self, other: &WaveformTrace) -> f64 {
        assert_eq!(self.sample_rate, other.sample_rate);
        let n = self.samples.len().min(other.samples.len());
        let base = self.samples[0];
        let mut diff = 0.0;
        let mut energy = 0.0;
        for i in 0..n {
            let d = self.samples[i] - other.samples[i];
            diff += d * d;
            let e = self.samples[i] - base;
            energy += e * e;
        }
        if energy == 0.0 {
            return if diff == 0.0 { 0.0 } else { f64::INFINITY };
        }
        (diff / energy).sqrt()
    }

    pub fn write_binary(&self, path: &Path, meta: &TraceMeta) -> Result<()> {
        let header = serde_json::to_vec(meta)?;
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&(header.len() as u64).to_le_bytes())?;
        w.write_all(&header)?;
        for s in &self.samples {
            w.write_all(&s.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_binary(path: &Path) -> Result<(WaveformTrace, TraceMeta)> {
        let mut r = BufReader::new(File::open(path)?);
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::BadTraceFile(format!("bad magic {magic:?}")));
        }
        let mut v4 = [0u8; 4];
        r.read_exact(&mut v4)?;
        if u32::from_le_bytes(v4) != VERSION {
            return Err(Error::BadTraceFile("unsupported version".into()));
        }
        let mut l8 = [0u8; 8];
        r.read_exact(&mut l8)?;
        let hlen = u64::from_le_bytes(l8) as usize;
        let mut hbytes = vec![0u8; hlen];
        r.read_exact(&mut hbytes)?;
        let meta: TraceMeta = serde_json::from_slice(&hbytes)?;
        let mut samples = vec![0.0f64; meta.n_samples];
        let mut buf = [0u8; 8];
        for s in &mut samples {
            r.read_exact(&mut buf)?;
            *s = f64::from_le_bytes(buf);
        }
        Ok((
            WaveformTrace {
                sample_rate: meta.sample_rate,
                samples,
            },
            meta,
        ))
    }

    pub fn write_jsonl(&self, path: &Path, meta: &TraceMeta) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        serde_json::to_writer(&mut w, meta)?;
        w.write_all(b"\n")?;
        for (i, s) in self.samples.iter().enumerate() {
            writeln!(w, r#"{{"t":{},"ph":{}}}"#, self.time_of(i), s)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_jsonl(path: &Path) -> Result<(WaveformTrace, TraceMeta)> {
        let r = BufReader::new(File::open(path)?);
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::BadTraceFile("empty file".into()))??;
        let meta: TraceMeta = serde_json::from_str(&header)?;
        #[derive(Deserialize)]
        struct Row {
            #[allow(dead_code)]
            t: f64,
            ph: f64,
        }
        let mut samples = Vec::with_capacity(meta.n_samples);
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let row: Row = serde_json::from_str(&line)?;
            samples.push(row.ph);
        }
        if samples.len() != meta.n_samples {
            return Err(Error::BadTraceFile(format!(
                "expected {} samples, found {}",
                meta.n_samples,
                samples.len()
            )));
        }
        Ok((
            WaveformTrace {
                sample_rate: meta.sample_rate,
                samples,
            },
            meta,
        ))
    }
}
