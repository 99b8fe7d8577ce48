//! Train a sparsifying dictionary on ECG windows and race it against the DCT.
//!
//! Method-of-optimal-directions (MOD) alternates OMP sparse coding with a
//! closed-form dictionary update. A dictionary learned on heartbeats should
//! represent heartbeats more sparsely than a generic transform — which
//! translates directly into better reconstructions at the same number of
//! measurements.
//!
//! Run with `cargo run --example learn_dictionary`.

use pacs::dictionaries::{learn_mod, make_dct, Dictionary};
use pacs::keys::{BipolarKey, MatrixKey};
use pacs::metrics::quality_report;
use pacs::protocol::{cloud_recover, user_decrypt, PublicRecoveryPackage};
use pacs::sensing::make_gaussian_phi;
use pacs::signal_io::{window, Pad, SignalWindow};
use pacs::solvers::{SolverChoice, SolverParams};
use pacs::synth::{synth_ecg, SynthEcgConfig};

/// Full encrypted round trip of one window; returns the PRD.
fn round_trip(w: &SignalWindow, dict: &Dictionary, m: usize) -> pacs::Result<f64> {
    let phi = make_gaussian_phi(m, w.len(), 77, false)?;
    let q = MatrixKey::generate(m, 78)?;
    let p = BipolarKey::generate(dict.atoms(), 1.0, 79)?;
    let package = PublicRecoveryPackage::build(w, &phi, dict, &q, &p)?;
    let recovery = cloud_recover(&package, SolverChoice::Omp, &SolverParams::with_sparsity(m / 4))?;
    let decrypted = user_decrypt(&recovery.cipher, &p, dict)?;
    Ok(quality_report(&w.samples().view(), &decrypted.samples.view())?.prd)
}

fn main() -> pacs::Result<()> {
    let n = 128;

    // Training corpus: many short windows cut from one long synthetic record.
    let record = synth_ecg(&SynthEcgConfig::new(404 * n, 11))?;
    let mut windows = window(&record, n, Pad::Drop)?;
    let holdout: Vec<SignalWindow> = windows.split_off(windows.len() - 4);
    println!("{} training windows of {} samples, 4 held out\n", windows.len(), n);

    // Learn: 160 atoms, sparsity 8, 12 update rounds.
    let (atoms, sparsity, iters) = (160, 8, 12);
    let result = learn_mod(&windows, atoms, sparsity, iters, 13)?;
    println!("MOD, {atoms} atoms, sparsity {sparsity}:");
    println!("  round   representation error (squared Frobenius)");
    for (i, err) in result.iteration_errors.iter().enumerate() {
        println!("  {:5}   {err:.6}", i + 1);
    }
    let first = result.iteration_errors.first().copied().unwrap_or(0.0);
    let last = result.iteration_errors.last().copied().unwrap_or(0.0);
    println!("  error shrank to {:.1}% of round 1\n", 100.0 * last / first);

    // Race on held-out windows: same sensing, same solver, m = n/2.
    let dct = make_dct(n)?;
    let m = n / 2;
    println!("held-out reconstruction at m = {m} ({}% compression):", 100 * (n - m) / n);
    println!("  window   PRD with DCT   PRD with learned dictionary");
    for (i, w) in holdout.iter().enumerate() {
        let prd_dct = round_trip(w, &dct, m)?;
        let prd_learned = round_trip(w, &result.dictionary, m)?;
        println!("  {i:6}   {prd_dct:10.3}%   {prd_learned:10.3}%");
    }
    println!("\nthe learned dictionary wins on its home distribution.");
    Ok(())
}
