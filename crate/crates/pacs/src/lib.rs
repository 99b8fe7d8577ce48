//! Privacy-assured compressive sensing for ECG signals.
//!
//! A resource-poor sensor compresses an ECG window with random projections,
//! a cloud service runs the expensive sparse-recovery step, and only the
//! user can read the result — the cloud works entirely on encrypted data.
//!
//! The scheme rests on two independent secrets: an m×m Gaussian **mixing
//! key** Q applied to the measurements, and an L×L **bipolar permutation
//! key** P (one ±α per column) that scrambles the sparse coefficient
//! domain. The cloud solves `A* z = ŷ` with `A* = Q Φ Ψ P` and `ŷ = Q Φ x`;
//! its best answer is `z = P⁻¹ s`, a permuted, sign-flipped, rescaled
//! version of the true coefficients. Decryption is the cheap exact map
//! `x̃ = Ψ P z`, because P is α times an orthonormal matrix.
//!
//! # Modules
//!
//! * [`signal_io`] — ECG text records, fixed-length windowing.
//! * [`synth`] — deterministic synthetic ECG generation.
//! * [`dictionaries`] — DCT, Daubechies-10 wavelet, and learned sparsifying
//!   dictionaries.
//! * [`sensing`] — Gaussian and block-diagonal measurement matrices,
//!   coherence diagnostics.
//! * [`keys`] — bipolar permutation keys, mixing keys, attack estimates,
//!   key-space arithmetic.
//! * [`protocol`] — the sensor/cloud/user roles wired together.
//! * [`solvers`] — OMP, smoothed-ℓ0, and exhaustive-search recovery.
//! * [`metrics`] — PRD/PRDN/SNR quality figures and clinical bands.
//! * [`container`] — the binary file format all CLI stages exchange.
//! * [`cli`] — the `pacs` command-line tool built from the above.
//!
//! # Where to start
//!
//! The `examples/` directory is the guided tour — each example is a
//! runnable, self-contained walk through one capability:
//!
//! * `end_to_end` — sense, encrypt, outsource, decrypt one window.
//! * `secure_vs_ordinary` — proves encryption costs nothing in quality.
//! * `key_attack` — decrypts with partially known keys and watches the
//!   signal degrade.
//! * `coherence_sweep` — sensing/dictionary coherence with and without
//!   scrambling.
//! * `cloud_audit` — what the cloud actually sees, statistically.
//! * `learn_dictionary` — trains a dictionary on ECG windows and compares
//!   it against the DCT.
//! * `file_formats` — tours the container format and the CLI pipeline.
//!
//! Run one with `cargo run --example end_to_end`.

pub mod cli;
pub mod container;
pub mod dictionaries;
pub mod error;
pub mod keys;
mod linalg;
pub mod metrics;
pub mod protocol;
pub mod sensing;
pub mod signal_io;
pub mod solvers;
pub mod synth;

pub use error::{Error, Result};
