//! One ECG window through the whole outsourcing protocol.
//!
//! The sensor compresses and mixes the window, the cloud recovers a sparse
//! vector it cannot read (the intermediate cipher), and the user decrypts it
//! with the bipolar permutation key.
//!
//! Run with `cargo run --example end_to_end`.

use ndarray::Array1;
use pacs::dictionaries::make_dct;
use pacs::keys::{BipolarKey, MatrixKey};
use pacs::metrics::quality_report;
use pacs::protocol::{cloud_recover, user_decrypt, PublicRecoveryPackage};
use pacs::sensing::make_gaussian_phi;
use pacs::signal_io::SignalWindow;
use pacs::solvers::{SolverChoice, SolverParams};

fn main() -> pacs::Result<()> {
    let (n, m, k) = (512, 128, 16);

    // --- A test signal whose DCT spectrum is exactly k-sparse -------------
    // (so greedy recovery is provably in its comfort zone: m = 8k).
    let dict = make_dct(n)?;
    let mut s = Array1::<f64>::zeros(n);
    for j in 0..k {
        let idx = (37 * j + 11) % n;
        s[idx] = if j % 2 == 0 { 1.0 + 0.1 * j as f64 } else { -0.6 - 0.05 * j as f64 };
    }
    let x = dict.synthesize(&s.view())?;
    let window = SignalWindow::new(x, 360.0, "demo")?;
    println!("signal: n = {n} samples, {k} non-zero DCT coefficients");

    // --- Keys --------------------------------------------------------------
    // Q mixes the m measurements; P scrambles the coefficient domain.
    let phi = make_gaussian_phi(m, n, 7, false)?;
    let q = MatrixKey::generate(m, 11)?;
    let p = BipolarKey::generate(n, 1.0, 13)?;
    println!("keys:   Q is {m}x{m} Gaussian (cond = {:.2e}), P is {n}x{n} bipolar", q.condition());

    // --- Sensor + key setup -------------------------------------------------
    // The package is everything the cloud gets: A* = QΦΨP and ŷ = QΦx.
    let package = PublicRecoveryPackage::build(&window, &phi, &dict, &q, &p)?;
    println!(
        "cloud receives: operator {}x{}, {} mixed measurements (m/n = {})",
        package.m(),
        package.l(),
        package.m(),
        m as f64 / n as f64
    );

    // --- Cloud -------------------------------------------------------------
    let recovery = cloud_recover(&package, SolverChoice::Omp, &SolverParams::with_sparsity(k))?;
    println!(
        "cloud solves:  {} iterations of {}, residual {:.2e}, converged = {}",
        recovery.iterations, recovery.solver, recovery.residual_norm, recovery.converged
    );

    // The cloud's answer is P⁻¹s — right values, wrong places and signs.
    let z = recovery.cipher.coeffs();
    let mismatches = (0..n).filter(|&i| (z[i] - s[i]).abs() > 1e-8).count();
    println!(
        "intermediate cipher: {} of {} coefficient slots disagree with the plaintext spectrum",
        mismatches, n
    );

    // --- User --------------------------------------------------------------
    let decrypted = user_decrypt(&recovery.cipher, &p, &dict)?;
    let report = quality_report(&window.samples().view(), &decrypted.samples.view())?;
    println!(
        "user decrypts: PRD = {:.3e}%  SNR = {:.1} dB  band = {}",
        report.prd, report.snr_db, report.band
    );

    assert!(report.prd < 1e-6, "exact recovery expected in this regime");
    Ok(())
}
