//! ECG text ingestion and fixed-length windowing.
//!
//! Records are plain text: one decimal sample per line, `#` starts a comment,
//! and an optional `# rate=<Hz>` header overrides the default 360 Hz sampling
//! rate. Multi-column lines (comma or whitespace separated) are supported via
//! an explicit column index.

use std::path::Path;

use ndarray::Array1;

use crate::error::{invalid, Error, Result};

/// Sampling rate assumed when a record carries no `# rate=` header.
pub const DEFAULT_SAMPLE_RATE: f64 = 360.0;

/// A full record as read from disk, before windowing.
#[derive(Debug, Clone, PartialEq)]
pub struct EcgRecord {
    pub samples: Vec<f64>,
    pub sample_rate: f64,
    pub origin: String,
}

/// One fixed-length analysis window of a record.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalWindow {
    samples: Array1<f64>,
    sample_rate: f64,
    origin: String,
}

impl SignalWindow {
    /// Validates and wraps a window: non-empty, all samples finite,
    /// positive sampling rate.
    pub fn new(samples: Array1<f64>, sample_rate: f64, origin: impl Into<String>) -> Result<Self> {
        if samples.is_empty() {
            return Err(invalid("signal window must contain at least one sample"));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(invalid("signal window contains a non-finite sample"));
        }
        if !(sample_rate > 0.0) || !sample_rate.is_finite() {
            return Err(invalid(format!("sample rate must be positive, got {sample_rate}")));
        }
        Ok(Self { samples, sample_rate, origin: origin.into() })
    }

    pub fn samples(&self) -> &Array1<f64> {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false // `new` rejects empty windows
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn origin(&self) -> &str {
        &self.origin
    }
}

/// What to do with a trailing partial window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pad {
    /// Discard the remainder.
    Drop,
    /// Zero-fill the remainder up to the window length.
    Zero,
}

/// Reads a text ECG record. `column` selects a field on multi-column lines
/// (default: first). Lines starting with `#` are comments; `# rate=<Hz>`
/// sets the sampling rate.
pub fn load_ecg(path: impl AsRef<Path>, column: Option<usize>) -> Result<EcgRecord> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let origin = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    parse_ecg_text(&text, column, path, origin)
}

fn parse_ecg_text(
    text: &str,
    column: Option<usize>,
    path: &Path,
    origin: String,
) -> Result<EcgRecord> {
    let col = column.unwrap_or(0);
    let mut sample_rate = DEFAULT_SAMPLE_RATE;
    let mut samples = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(rate) = comment.strip_prefix("rate=") {
                sample_rate = rate.trim().parse::<f64>().map_err(|_| Error::Parse {
                    path: path.to_path_buf(),
                    line: idx + 1,
                    msg: format!("invalid rate header {comment:?}"),
                })?;
                if !(sample_rate > 0.0) || !sample_rate.is_finite() {
                    return Err(Error::Parse {
                        path: path.to_path_buf(),
                        line: idx + 1,
                        msg: format!("sample rate must be positive, got {sample_rate}"),
                    });
                }
            }
            continue;
        }
        let field = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .nth(col)
            .ok_or_else(|| Error::Parse {
                path: path.to_path_buf(),
                line: idx + 1,
                msg: format!("line has no column {col}"),
            })?;
        let v = field.parse::<f64>().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            line: idx + 1,
            msg: format!("not a decimal sample: {field:?}"),
        })?;
        if !v.is_finite() {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: idx + 1,
                msg: format!("non-finite sample: {field:?}"),
            });
        }
        samples.push(v);
    }
    if samples.is_empty() {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            msg: "record contains no samples".into(),
        });
    }
    Ok(EcgRecord { samples, sample_rate, origin })
}

/// Splits a record into non-overlapping windows of length `n`. The trailing
/// remainder is dropped or zero-padded per `pad`; window origins are
/// `"<record origin>#w<index>"`.
pub fn window(record: &EcgRecord, n: usize, pad: Pad) -> Result<Vec<SignalWindow>> {
    if n == 0 {
        return Err(invalid("window length must be positive"));
    }
    let mut out = Vec::new();
    let full = record.samples.len() / n;
    for w in 0..full {
        let chunk = Array1::from_iter(record.samples[w * n..(w + 1) * n].iter().copied());
        out.push(SignalWindow::new(
            chunk,
            record.sample_rate,
            format!("{}#w{}", record.origin, w),
        )?);
    }
    let rem = record.samples.len() - full * n;
    if rem > 0 && pad == Pad::Zero {
        let mut chunk = Array1::zeros(n);
        for (i, v) in record.samples[full * n..].iter().enumerate() {
            chunk[i] = *v;
        }
        out.push(SignalWindow::new(
            chunk,
            record.sample_rate,
            format!("{}#w{}", record.origin, full),
        )?);
    }
    Ok(out)
}

/// Writes a record back out in the same text format (used by the synthetic
/// data examples and test fixtures).
pub fn save_ecg(path: impl AsRef<Path>, record: &EcgRecord) -> Result<()> {
    let path = path.as_ref();
    let mut text = String::with_capacity(record.samples.len() * 12);
    text.push_str(&format!("# rate={}\n", record.sample_rate));
    for v in &record.samples {
        text.push_str(&format!("{v}\n"));
    }
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
