//! Binary container file format.
//!
//! Every artifact the pipeline exchanges (signals, operators, keys, mixed
//! measurements, intermediate ciphers) is stored in one self-describing
//! little-endian format:
//!
//! ```text
//! offset size  field
//! 0      4     magic "PACS"
//! 4      2     format version (currently 1), u16
//! 6      1     kind: 0 signal, 1 dense_matrix, 2 bipolar_key,
//!              3 cipher, 4 intermediate
//! 7      1     ndims
//! 8      4·nd  dims, u32 each
//! …      …     kind-specific payload
//! ```
//!
//! Payloads:
//!
//! * **signal** (dims `[n]`): sample rate f64, then n f64 samples.
//! * **dense_matrix** (dims `[rows, cols]`): the payload length picks the
//!   representation, with `D = 8·rows·cols`:
//!   - `D` bytes — plain row-major f64 data;
//!   - `D + 2` — `[tag][levels]` then data (dictionaries; tag 1 dct,
//!     2 db10, 3 learned);
//!   - `D + 9` — `[tag][seed u64]` then data (tag 4 Gaussian sensing
//!     matrix, 7 explicit mixing key);
//!   - `1` — `[tag]` alone, matrix rebuilt from dims (tag 5 block-diagonal
//!     sensing matrix, 8 identity mixing key);
//!   - `9` — `[tag][seed u64]`, matrix regenerated from the seed
//!     (tag 6 seeded mixing key).
//! * **bipolar_key** (dims `[n]`): alpha f64, n row indices u32, signs
//!   bit-packed LSB-first (1 = +α), generation seed u64.
//! * **cipher** (dims `[m]`): the mixed measurement vector `ŷ`, f64 each.
//! * **intermediate** (dims `[l]`): the cloud's scrambled coefficient
//!   vector `z`, f64 each.
//!
//! Compact forms exist so that seeded or structural operators ship as a few
//! bytes instead of megabytes; loading regenerates them deterministically.

use std::path::{Path, PathBuf};

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::dictionaries::{Dictionary, DictionaryKind};
use crate::error::{format as format_err, Error, Result};
use crate::keys::{BipolarKey, MatrixKey, QProvenance};
use crate::protocol::IntermediateCipher;
use crate::sensing::{make_dbbd_phi, MeasurementMatrix, PhiKind};
use crate::signal_io::SignalWindow;

/// File magic.
pub const MAGIC: [u8; 4] = *b"PACS";
/// Current format version.
pub const VERSION: u16 = 1;

/// Top-level payload type of a container file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContainerKind {
    Signal,
    DenseMatrix,
    BipolarKey,
    Cipher,
    Intermediate,
}

impl ContainerKind {
    fn code(self) -> u8 {
        match self {
            ContainerKind::Signal => 0,
            ContainerKind::DenseMatrix => 1,
            ContainerKind::BipolarKey => 2,
            ContainerKind::Cipher => 3,
            ContainerKind::Intermediate => 4,
        }
    }

    fn from_code(code: u8) -> Option<Self> {
        Some(match code {
            0 => ContainerKind::Signal,
            1 => ContainerKind::DenseMatrix,
            2 => ContainerKind::BipolarKey,
            3 => ContainerKind::Cipher,
            4 => ContainerKind::Intermediate,
            _ => return None,
        })
    }

    /// Stable lowercase name used in error messages and listings.
    pub fn name(self) -> &'static str {
        match self {
            ContainerKind::Signal => "signal",
            ContainerKind::DenseMatrix => "dense_matrix",
            ContainerKind::BipolarKey => "bipolar_key",
            ContainerKind::Cipher => "cipher",
            ContainerKind::Intermediate => "intermediate",
        }
    }
}

// Representation tags inside dense_matrix payloads.
const TAG_DCT: u8 = 1;
const TAG_DB10: u8 = 2;
const TAG_LEARNED: u8 = 3;
const TAG_GAUSSIAN_PHI: u8 = 4;
const TAG_DBBD: u8 = 5;
const TAG_MIXING_SEEDED: u8 = 6;
const TAG_MIXING_DENSE: u8 = 7;
const TAG_MIXING_IDENTITY: u8 = 8;

// ---------------------------------------------------------------------------
// Low-level reading/writing
// ---------------------------------------------------------------------------

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io { path: path.to_path_buf(), source }
}

struct Reader {
    buf: Vec<u8>,
    pos: usize,
    path: PathBuf,
}

impl Reader {
    fn open(path: &Path) -> Result<Self> {
        let buf = std::fs::read(path).map_err(|e| io_err(path, e))?;
        Ok(Self { buf, pos: 0, path: path.to_path_buf() })
    }

    fn context(&self, msg: impl std::fmt::Display) -> Error {
        format_err(format!("{}: {msg}", self.path.display()))
    }

    fn take(&mut self, n: usize) -> Result<&[u8]> {
        if self.pos + n > self.buf.len() {
            return Err(self.context(format!(
                "truncated: wanted {n} bytes at offset {}, file has {}",
                self.pos,
                self.buf.len()
            )));
        }
        let slice = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64_slice(&mut self, count: usize) -> Result<Vec<f64>> {
        let bytes = self.take(count * 8)?;
        Ok(bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }

    /// Reads and validates the fixed prefix, returning the dims.
    fn header(&mut self, expected: ContainerKind) -> Result<Vec<usize>> {
        let kind = self.header_any()?;
        if kind != expected {
            return Err(self.context(format!(
                "expected {} container, found {}",
                expected.name(),
                kind.name()
            )));
        }
        self.dims()
    }

    fn header_any(&mut self) -> Result<ContainerKind> {
        let magic = self.take(4)?;
        if magic != MAGIC {
            return Err(self.context("bad magic: not a container file"));
        }
        let version = self.u16()?;
        if version != VERSION {
            return Err(self.context(format!(
                "unsupported format version {version} (this build reads {VERSION})"
            )));
        }
        let code = self.u8()?;
        ContainerKind::from_code(code)
            .ok_or_else(|| self.context(format!("unknown container kind {code}")))
    }

    fn dims(&mut self) -> Result<Vec<usize>> {
        let ndims = self.u8()? as usize;
        let mut dims = Vec::with_capacity(ndims);
        for _ in 0..ndims {
            dims.push(self.u32()? as usize);
        }
        Ok(dims)
    }

    fn finish(&self) -> Result<()> {
        if self.remaining() != 0 {
            return Err(self.context(format!(
                "{} trailing bytes after the payload",
                self.remaining()
            )));
        }
        Ok(())
    }
}

struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn new(kind: ContainerKind, dims: &[usize]) -> Result<Self> {
        let mut buf = Vec::new();
        buf.extend_from_slice(&MAGIC);
        buf.extend_from_slice(&VERSION.to_le_bytes());
        buf.push(kind.code());
        buf.push(
            u8::try_from(dims.len())
                .map_err(|_| format_err("too many dimensions for the container header"))?,
        );
        for &d in dims {
            let d = u32::try_from(d)
                .map_err(|_| format_err(format!("dimension {d} exceeds the u32 limit")))?;
            buf.extend_from_slice(&d.to_le_bytes());
        }
        Ok(Self { buf })
    }

    fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    fn f64(&mut self, v: f64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    fn f64_iter<'a>(&mut self, values: impl IntoIterator<Item = &'a f64>) {
        for v in values {
            self.buf.extend_from_slice(&v.to_le_bytes());
        }
    }

    fn commit(self, path: &Path) -> Result<()> {
        std::fs::write(path, &self.buf).map_err(|e| io_err(path, e))
    }
}

/// Reads just the kind byte of a container (for dispatch and diagnostics).
pub fn peek_kind(path: impl AsRef<Path>) -> Result<ContainerKind> {
    let mut r = Reader::open(path.as_ref())?;
    r.header_any()
}

// ---------------------------------------------------------------------------
// Signals
// ---------------------------------------------------------------------------

/// Saves a signal window (kind 0). The origin label is not persisted;
/// loading derives it from the file name.
pub fn save_signal(path: impl AsRef<Path>, window: &SignalWindow) -> Result<()> {
    let mut w = Writer::new(ContainerKind::Signal, &[window.len()])?;
    w.f64(window.sample_rate());
    w.f64_iter(window.samples().iter());
    w.commit(path.as_ref())
}

pub fn load_signal(path: impl AsRef<Path>) -> Result<SignalWindow> {
    let path = path.as_ref();
    let mut r = Reader::open(path)?;
    let dims = r.header(ContainerKind::Signal)?;
    let [n] = dims[..] else {
        return Err(r.context(format!("signal containers are 1-D, found {} dims", dims.len())));
    };
    let rate = r.f64()?;
    let samples = r.f64_slice(n)?;
    r.finish()?;
    let origin = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    SignalWindow::new(Array1::from_vec(samples), rate, origin)
        .map_err(|e| format_err(format!("{}: {e}", path.display())))
}

// ---------------------------------------------------------------------------
// Dense matrices and their compact forms
// ---------------------------------------------------------------------------

fn write_matrix_payload(w: &mut Writer, m: &ArrayView2<f64>) {
    for row in m.rows() {
        w.f64_iter(row.iter());
    }
}

fn read_matrix_data(r: &mut Reader, rows: usize, cols: usize) -> Result<Array2<f64>> {
    let data = r.f64_slice(rows * cols)?;
    Array2::from_shape_vec((rows, cols), data)
        .map_err(|e| r.context(format!("bad matrix shape: {e}")))
}

/// Saves a plain dense matrix (kind 1, no tag).
pub fn save_matrix(path: impl AsRef<Path>, matrix: &ArrayView2<f64>) -> Result<()> {
    let mut w = Writer::new(ContainerKind::DenseMatrix, &[matrix.nrows(), matrix.ncols()])?;
    write_matrix_payload(&mut w, matrix);
    w.commit(path.as_ref())
}

/// One parsed dense_matrix payload, before interpretation.
enum MatrixPayload {
    Plain(Array2<f64>),
    Dictionary { tag: u8, levels: u8, data: Array2<f64> },
    SeededDense { tag: u8, seed: u64, data: Array2<f64> },
    Structural { tag: u8 },
    SeededCompact { tag: u8, seed: u64 },
}

fn read_matrix_payload(r: &mut Reader) -> Result<(usize, usize, MatrixPayload)> {
    let dims = r.header(ContainerKind::DenseMatrix)?;
    let [rows, cols] = dims[..] else {
        return Err(r.context(format!(
            "dense_matrix containers are 2-D, found {} dims",
            dims.len()
        )));
    };
    let d = rows
        .checked_mul(cols)
        .and_then(|c| c.checked_mul(8))
        .ok_or_else(|| r.context("matrix dimensions overflow"))?;
    let len = r.remaining();
    let payload = if len == d {
        MatrixPayload::Plain(read_matrix_data(r, rows, cols)?)
    } else if len == d + 2 {
        let tag = r.u8()?;
        let levels = r.u8()?;
        MatrixPayload::Dictionary { tag, levels, data: read_matrix_data(r, rows, cols)? }
    } else if len == d + 9 {
        let tag = r.u8()?;
        let seed = r.u64()?;
        MatrixPayload::SeededDense { tag, seed, data: read_matrix_data(r, rows, cols)? }
    } else if len == 1 {
        MatrixPayload::Structural { tag: r.u8()? }
    } else if len == 9 {
        let tag = r.u8()?;
        let seed = r.u64()?;
        MatrixPayload::SeededCompact { tag, seed }
    } else {
        return Err(r.context(format!(
            "dense_matrix payload of {len} bytes matches no representation for a \
             {rows}×{cols} matrix"
        )));
    };
    r.finish()?;
    Ok((rows, cols, payload))
}

/// Materializes any dense_matrix container as a plain matrix, regenerating
/// compact forms.
pub fn load_matrix(path: impl AsRef<Path>) -> Result<Array2<f64>> {
    let path = path.as_ref();
    let mut r = Reader::open(path)?;
    let (rows, cols, payload) = read_matrix_payload(&mut r)?;
    let wrap = |e: Error| format_err(format!("{}: {e}", path.display()));
    Ok(match payload {
        MatrixPayload::Plain(m)
        | MatrixPayload::Dictionary { data: m, .. }
        | MatrixPayload::SeededDense { data: m, .. } => m,
        MatrixPayload::Structural { tag } => match tag {
            TAG_DBBD => make_dbbd_phi(rows, cols).map_err(wrap)?.matrix().clone(),
            TAG_MIXING_IDENTITY => Array2::eye(rows),
            other => return Err(format_err(format!(
                "{}: unknown structural matrix tag {other}",
                path.display()
            ))),
        },
        MatrixPayload::SeededCompact { tag, seed } => match tag {
            TAG_MIXING_SEEDED => {
                if rows != cols {
                    return Err(format_err(format!(
                        "{}: seeded mixing key must be square, found {rows}×{cols}",
                        path.display()
                    )));
                }
                MatrixKey::generate(rows, seed).map_err(wrap)?.matrix().clone()
            }
            other => return Err(format_err(format!(
                "{}: unknown seeded matrix tag {other}",
                path.display()
            ))),
        },
    })
}

/// Saves a dictionary (kind 1 with a `[tag][levels]` prefix).
pub fn save_dictionary(path: impl AsRef<Path>, dictionary: &Dictionary) -> Result<()> {
    let m = dictionary.matrix();
    let mut w = Writer::new(ContainerKind::DenseMatrix, &[m.nrows(), m.ncols()])?;
    let (tag, levels) = match dictionary.kind() {
        DictionaryKind::Dct => (TAG_DCT, 0),
        DictionaryKind::Db10 { levels } => (TAG_DB10, levels),
        DictionaryKind::Learned => (TAG_LEARNED, 0),
    };
    w.u8(tag);
    w.u8(levels);
    write_matrix_payload(&mut w, &m.view());
    w.commit(path.as_ref())
}

pub fn load_dictionary(path: impl AsRef<Path>) -> Result<Dictionary> {
    let path = path.as_ref();
    let mut r = Reader::open(path)?;
    let (_rows, _cols, payload) = read_matrix_payload(&mut r)?;
    let MatrixPayload::Dictionary { tag, levels, data } = payload else {
        return Err(format_err(format!(
            "{}: dense_matrix container does not hold a dictionary",
            path.display()
        )));
    };
    let kind = match tag {
        TAG_DCT => DictionaryKind::Dct,
        TAG_DB10 => DictionaryKind::Db10 { levels },
        TAG_LEARNED => DictionaryKind::Learned,
        other => {
            return Err(format_err(format!(
                "{}: unknown dictionary tag {other}",
                path.display()
            )))
        }
    };
    Dictionary::from_matrix(data, kind).map_err(|e| format_err(format!("{}: {e}", path.display())))
}

/// Saves a sensing matrix: Gaussian ones keep their seed alongside the
/// data; block-diagonal ones are structural and ship as a single tag byte.
pub fn save_measurement_matrix(path: impl AsRef<Path>, phi: &MeasurementMatrix) -> Result<()> {
    let mut w = Writer::new(ContainerKind::DenseMatrix, &[phi.m(), phi.n()])?;
    match phi.kind() {
        PhiKind::Gaussian { seed } => {
            w.u8(TAG_GAUSSIAN_PHI);
            w.u64(seed);
            write_matrix_payload(&mut w, &phi.matrix().view());
        }
        PhiKind::Dbbd => {
            w.u8(TAG_DBBD);
        }
    }
    w.commit(path.as_ref())
}

pub fn load_measurement_matrix(path: impl AsRef<Path>) -> Result<MeasurementMatrix> {
    let path = path.as_ref();
    let mut r = Reader::open(path)?;
    let (rows, cols, payload) = read_matrix_payload(&mut r)?;
    match payload {
        MatrixPayload::SeededDense { tag: TAG_GAUSSIAN_PHI, seed, data } => {
            Ok(MeasurementMatrix::from_parts(data, PhiKind::Gaussian { seed }))
        }
        MatrixPayload::Structural { tag: TAG_DBBD } => {
            make_dbbd_phi(rows, cols).map_err(|e| format_err(format!("{}: {e}", path.display())))
        }
        _ => Err(format_err(format!(
            "{}: dense_matrix container does not hold a sensing matrix",
            path.display()
        ))),
    }
}

/// Saves a mixing key: seeded keys as `(m, seed)` only, identity keys as a
/// tag byte, explicit keys with full data.
pub fn save_matrix_key(path: impl AsRef<Path>, key: &MatrixKey) -> Result<()> {
    let mut w = Writer::new(ContainerKind::DenseMatrix, &[key.m(), key.m()])?;
    match key.provenance() {
        QProvenance::Seeded => {
            w.u8(TAG_MIXING_SEEDED);
            w.u64(key.seed());
        }
        QProvenance::Identity => {
            w.u8(TAG_MIXING_IDENTITY);
        }
        QProvenance::Explicit => {
            w.u8(TAG_MIXING_DENSE);
            w.u64(key.seed());
            write_matrix_payload(&mut w, &key.matrix().view());
        }
    }
    w.commit(path.as_ref())
}

pub fn load_matrix_key(path: impl AsRef<Path>) -> Result<MatrixKey> {
    let path = path.as_ref();
    let mut r = Reader::open(path)?;
    let (rows, cols, payload) = read_matrix_payload(&mut r)?;
    let wrap = |e: Error| format_err(format!("{}: {e}", path.display()));
    if rows != cols {
        return Err(format_err(format!(
            "{}: mixing key must be square, found {rows}×{cols}",
            path.display()
        )));
    }
    match payload {
        MatrixPayload::SeededCompact { tag: TAG_MIXING_SEEDED, seed } => {
            MatrixKey::generate(rows, seed).map_err(wrap)
        }
        MatrixPayload::Structural { tag: TAG_MIXING_IDENTITY } => {
            MatrixKey::identity(rows).map_err(wrap)
        }
        MatrixPayload::SeededDense { tag: TAG_MIXING_DENSE, seed, data } => {
            MatrixKey::from_matrix(data, seed).map_err(wrap)
        }
        _ => Err(format_err(format!(
            "{}: dense_matrix container does not hold a mixing key",
            path.display()
        ))),
    }
}

// ---------------------------------------------------------------------------
// Bipolar keys
// ---------------------------------------------------------------------------

/// Saves a bipolar key (kind 2).
pub fn save_bipolar_key(path: impl AsRef<Path>, key: &BipolarKey) -> Result<()> {
    let n = key.n();
    let mut w = Writer::new(ContainerKind::BipolarKey, &[n])?;
    w.f64(key.alpha());
    for &row in key.perm() {
        w.buf.extend_from_slice(&row.to_le_bytes());
    }
    let mut packed = vec![0u8; n.div_ceil(8)];
    for (j, &positive) in key.signs().iter().enumerate() {
        if positive {
            packed[j / 8] |= 1 << (j % 8);
        }
    }
    w.buf.extend_from_slice(&packed);
    w.u64(key.seed());
    w.commit(path.as_ref())
}

pub fn load_bipolar_key(path: impl AsRef<Path>) -> Result<BipolarKey> {
    let path = path.as_ref();
    let mut r = Reader::open(path)?;
    let dims = r.header(ContainerKind::BipolarKey)?;
    let [n] = dims[..] else {
        return Err(r.context(format!(
            "bipolar_key containers are 1-D, found {} dims",
            dims.len()
        )));
    };
    let alpha = r.f64()?;
    let mut perm = Vec::with_capacity(n);
    for _ in 0..n {
        perm.push(r.u32()?);
    }
    let packed = r.take(n.div_ceil(8))?.to_vec();
    let signs: Vec<bool> = (0..n).map(|j| packed[j / 8] & (1 << (j % 8)) != 0).collect();
    let seed = r.u64()?;
    r.finish()?;
    BipolarKey::from_parts(perm, signs, alpha, seed)
        .map_err(|e| format_err(format!("{}: {e}", path.display())))
}

// ---------------------------------------------------------------------------
// Vectors: mixed measurements and intermediate ciphers
// ---------------------------------------------------------------------------

fn save_vector(path: &Path, kind: ContainerKind, v: &ArrayView1<f64>) -> Result<()> {
    let mut w = Writer::new(kind, &[v.len()])?;
    w.f64_iter(v.iter());
    w.commit(path)
}

fn load_vector(path: &Path, kind: ContainerKind) -> Result<Array1<f64>> {
    let mut r = Reader::open(path)?;
    let dims = r.header(kind)?;
    let [n] = dims[..] else {
        return Err(r.context(format!(
            "{} containers are 1-D, found {} dims",
            kind.name(),
            dims.len()
        )));
    };
    let data = r.f64_slice(n)?;
    r.finish()?;
    Ok(Array1::from_vec(data))
}

/// Saves the mixed measurement vector `ŷ` (kind 3).
pub fn save_cipher(path: impl AsRef<Path>, y_hat: &ArrayView1<f64>) -> Result<()> {
    save_vector(path.as_ref(), ContainerKind::Cipher, y_hat)
}

pub fn load_cipher(path: impl AsRef<Path>) -> Result<Array1<f64>> {
    load_vector(path.as_ref(), ContainerKind::Cipher)
}

/// Saves the cloud's scrambled coefficients (kind 4).
pub fn save_intermediate(path: impl AsRef<Path>, cipher: &IntermediateCipher) -> Result<()> {
    save_vector(
        path.as_ref(),
        ContainerKind::Intermediate,
        &cipher.coeffs().view(),
    )
}

pub fn load_intermediate(path: impl AsRef<Path>) -> Result<IntermediateCipher> {
    let path = path.as_ref();
    let v = load_vector(path, ContainerKind::Intermediate)?;
    IntermediateCipher::new(v).map_err(|e| format_err(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dictionaries::{make_db10, make_dct};
    use crate::sensing::make_gaussian_phi;
    use ndarray::{Array1, Array2};
    use tempfile::TempDir;

    fn tmp() -> TempDir {
        TempDir::new().unwrap()
    }

    #[test]
    fn plain_two_by_two_identity_is_48_bytes() {
        let dir = tmp();
        let path = dir.path().join("eye.pacs");
        save_matrix(&path, &Array2::<f64>::eye(2).view()).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(bytes.len(), 48); // 8 header + 2·4 dims + 4·8 data
        assert_eq!(&bytes[0..4], b"PACS");
        assert_eq!(u16::from_le_bytes([bytes[4], bytes[5]]), 1);
        assert_eq!(bytes[6], 1); // dense_matrix
        assert_eq!(bytes[7], 2); // two dims
        assert_eq!(load_matrix(&path).unwrap(), Array2::<f64>::eye(2));
    }

    #[test]
    fn signal_round_trip() {
        let dir = tmp();
        let path = dir.path().join("w.pacs");
        let samples: Array1<f64> = (0..100).map(|i| (i as f64 * 0.1).sin()).collect();
        let window = SignalWindow::new(samples, 250.0, "rec#w0").unwrap();
        save_signal(&path, &window).unwrap();
        let back = load_signal(&path).unwrap();
        assert_eq!(back.samples(), window.samples());
        assert_eq!(back.sample_rate(), 250.0);
        assert_eq!(back.origin(), "w"); // origin comes from the file name
        assert_eq!(peek_kind(&path).unwrap(), ContainerKind::Signal);
    }

    #[test]
    fn dictionary_round_trips_with_kind() {
        let dir = tmp();
        for dict in [make_dct(32).unwrap(), make_db10(80, 1).unwrap()] {
            let path = dir.path().join("d.pacs");
            save_dictionary(&path, &dict).unwrap();
            let back = load_dictionary(&path).unwrap();
            assert_eq!(back.kind(), dict.kind());
            assert_eq!(back.matrix(), dict.matrix());
        }
    }

    #[test]
    fn gaussian_phi_round_trips_bitwise_with_seed() {
        let dir = tmp();
        let path = dir.path().join("phi.pacs");
        let phi = make_gaussian_phi(16, 64, 123, false).unwrap();
        save_measurement_matrix(&path, &phi).unwrap();
        let back = load_measurement_matrix(&path).unwrap();
        assert_eq!(back.kind(), PhiKind::Gaussian { seed: 123 });
        assert_eq!(back.matrix(), phi.matrix());
    }

    #[test]
    fn dbbd_phi_is_structural_and_tiny() {
        let dir = tmp();
        let path = dir.path().join("dbbd.pacs");
        let phi = make_dbbd_phi(4, 16).unwrap();
        save_measurement_matrix(&path, &phi).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(bytes.len(), 8 + 8 + 1); // header + dims + tag
        let back = load_measurement_matrix(&path).unwrap();
        assert_eq!(back.matrix(), phi.matrix());
        assert_eq!(back.kind(), PhiKind::Dbbd);
        // The generic loader also materializes it.
        assert_eq!(load_matrix(&path).unwrap(), *phi.matrix());
    }

    #[test]
    fn mixing_keys_round_trip_in_all_three_forms() {
        let dir = tmp();

        let seeded = MatrixKey::generate(24, 7).unwrap();
        let path = dir.path().join("q_seeded.pacs");
        save_matrix_key(&path, &seeded).unwrap();
        assert_eq!(std::fs::read(&path).unwrap().len(), 8 + 8 + 9);
        let back = load_matrix_key(&path).unwrap();
        assert_eq!(back, seeded);

        let identity = MatrixKey::identity(24).unwrap();
        let path = dir.path().join("q_id.pacs");
        save_matrix_key(&path, &identity).unwrap();
        assert_eq!(std::fs::read(&path).unwrap().len(), 8 + 8 + 1);
        assert_eq!(load_matrix_key(&path).unwrap(), identity);

        let explicit = MatrixKey::from_matrix(seeded.matrix().clone(), 0).unwrap();
        let path = dir.path().join("q_dense.pacs");
        save_matrix_key(&path, &explicit).unwrap();
        let back = load_matrix_key(&path).unwrap();
        assert_eq!(back.matrix(), explicit.matrix());
        assert_eq!(back.provenance(), QProvenance::Explicit);
    }

    #[test]
    fn bipolar_key_round_trips_bitwise() {
        let dir = tmp();
        let path = dir.path().join("p.pacs");
        let key = BipolarKey::generate(129, 2.25, 99).unwrap(); // odd n exercises bit packing
        save_bipolar_key(&path, &key).unwrap();
        let back = load_bipolar_key(&path).unwrap();
        assert_eq!(back, key);
        assert_eq!(peek_kind(&path).unwrap(), ContainerKind::BipolarKey);
    }

    #[test]
    fn vectors_round_trip_and_kinds_do_not_cross() {
        let dir = tmp();
        let y: Array1<f64> = (0..16).map(|i| i as f64 * 0.5 - 4.0).collect();
        let cipher_path = dir.path().join("y.pacs");
        save_cipher(&cipher_path, &y.view()).unwrap();
        assert_eq!(load_cipher(&cipher_path).unwrap(), y);

        let z = IntermediateCipher::new(y.clone()).unwrap();
        let inter_path = dir.path().join("z.pacs");
        save_intermediate(&inter_path, &z).unwrap();
        assert_eq!(load_intermediate(&inter_path).unwrap(), z);

        // A cipher is not an intermediate and vice versa.
        let err = load_intermediate(&cipher_path).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("expected intermediate"));
        assert!(load_cipher(&inter_path).is_err());
    }

    #[test]
    fn malformed_files_are_rejected_with_exit_code_2() {
        let dir = tmp();

        // Bad magic.
        let path = dir.path().join("bad_magic.pacs");
        std::fs::write(&path, b"NOPE\x01\x00\x00\x01\x04\x00\x00\x00").unwrap();
        let err = load_cipher(&path).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("bad magic"));

        // Unsupported version.
        let path = dir.path().join("bad_version.pacs");
        std::fs::write(&path, b"PACS\x09\x00\x03\x01\x01\x00\x00\x00").unwrap();
        assert!(load_cipher(&path).unwrap_err().to_string().contains("version"));

        // Unknown kind.
        let path = dir.path().join("bad_kind.pacs");
        std::fs::write(&path, b"PACS\x01\x00\x63\x01\x01\x00\x00\x00").unwrap();
        assert!(load_cipher(&path).unwrap_err().to_string().contains("kind"));

        // Truncated payload.
        let path = dir.path().join("trunc.pacs");
        let y = Array1::<f64>::ones(4);
        save_cipher(&path, &y.view()).unwrap();
        let full = std::fs::read(&path).unwrap();
        std::fs::write(&path, &full[..full.len() - 5]).unwrap();
        let err = load_cipher(&path).unwrap_err();
        assert!(err.to_string().contains("truncated"));

        // Trailing garbage.
        let path = dir.path().join("trail.pacs");
        save_cipher(&path, &y.view()).unwrap();
        let mut grown = std::fs::read(&path).unwrap();
        grown.push(0);
        std::fs::write(&path, &grown).unwrap();
        let err = load_cipher(&path).unwrap_err();
        assert!(err.to_string().contains("trailing"));

        // Dense payload whose length matches no representation.
        let path = dir.path().join("odd_len.pacs");
        save_matrix(&path, &Array2::<f64>::eye(2).view()).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes.truncate(bytes.len() - 4);
        std::fs::write(&path, &bytes).unwrap();
        let err = load_matrix(&path).unwrap_err();
        assert!(err.to_string().contains("matches no representation"));

        // A corrupt permutation inside a bipolar key.
        let path = dir.path().join("bad_perm.pacs");
        let key = BipolarKey::generate(4, 1.0, 1).unwrap();
        save_bipolar_key(&path, &key).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        // perm entries start after header(8) + dims(4) + alpha(8); clobber
        // the second entry to duplicate the first.
        let first = bytes[20..24].to_vec();
        bytes[24..28].copy_from_slice(&first);
        std::fs::write(&path, &bytes).unwrap();
        let err = load_bipolar_key(&path).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("permutation"));
    }

    #[test]
    fn missing_file_is_an_io_error() {
        let dir = tmp();
        let err = load_signal(dir.path().join("nope.pacs")).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
