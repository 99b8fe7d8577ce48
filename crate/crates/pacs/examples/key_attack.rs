//! What an attacker with a stolen intermediate cipher can (and cannot) do.
//!
//! Three views of the same question:
//! 1. how big the key space is (why guessing is hopeless),
//! 2. how far a partially-correct key sits from the true one (Frobenius
//!    distance, with its closed-form expectation), and
//! 3. what decrypting with such a key actually does to the signal.
//!
//! Run with `cargo run --example key_attack`.

use pacs::dictionaries::make_dct;
use pacs::keys::{
    format_log10, frobenius_distance, keyspace_bits, make_estimated_key,
    sparse_search_log10_trials, BipolarKey, MatrixKey,
};
use pacs::metrics::quality_report;
use pacs::protocol::{cloud_recover, user_decrypt, user_decrypt_estimated, PublicRecoveryPackage};
use pacs::sensing::make_gaussian_phi;
use pacs::signal_io::{window, Pad};
use pacs::solvers::{SolverChoice, SolverParams};
use pacs::synth::{apply_spectral_floor, synth_ecg, SynthEcgConfig};

fn main() -> pacs::Result<()> {
    // --- 1. Key space ------------------------------------------------------
    println!("== key space ==");
    for &n in &[128u64, 512, 1000] {
        println!("  n = {n:4}: key space 2^n * n!  ~ 2^{:.1}", keyspace_bits(n));
    }
    println!(
        "  keyless alternative (enumerate 64-sparse supports in 1024 atoms):\n  \
         ~{} least-squares trials",
        format_log10(sparse_search_log10_trials(1024, 64))
    );

    // --- 2. Distance of a partial key from the truth -----------------------
    // A guessed column lands on the right row with probability 1/n and then
    // on the right sign with probability 1/2, so its expected squared
    // contribution is 4α²/(2n) + 2α²(1 − 1/n) = 2α² exactly. With w guessed
    // columns, E‖P − E‖²_F = 2α²w.
    println!("\n== partial keys: Frobenius distance, n = 1000, alpha = 1 ==");
    let n = 1000usize;
    let p = BipolarKey::generate(n, 1.0, 5)?;
    println!("  r (% copied)   mean distance (20 seeds)   sqrt(2w)");
    for &r in &[99.0f64, 98.0, 97.0, 95.0, 90.0] {
        let mut sum = 0.0;
        let seeds = 20u64;
        for seed in 0..seeds {
            let estimate = make_estimated_key(&p, r, 900 + seed)?;
            sum += frobenius_distance(&p, &estimate)?;
        }
        let copied = ((r * n as f64) / 100.0).floor();
        let expected = (2.0 * (n as f64 - copied)).sqrt();
        println!("  {r:10.0}   {:24.3}   {expected:8.3}", sum / seeds as f64);
    }

    // --- 3. Decrypting with the wrong key -----------------------------------
    // Square sensing isolates the encryption layer (recovery itself is then
    // exact), and a spectral floor guarantees every coefficient matters, so
    // every wrong column provably hurts.
    println!("\n== wrong-key decryption, one ECG window ==");
    let n = 512;
    let record = synth_ecg(&SynthEcgConfig::new(n, 7))?;
    let dict = make_dct(n)?;
    let raw = window(&record, n, Pad::Drop)?.remove(0);
    let floored = apply_spectral_floor(&raw, &dict, 0.35)?;

    let phi = make_gaussian_phi(n, n, 17, true)?;
    let q = MatrixKey::generate(n, 19)?;
    let p = BipolarKey::generate(n, 1.0, 23)?;
    let package = PublicRecoveryPackage::build(&floored, &phi, &dict, &q, &p)?;
    let recovery = cloud_recover(&package, SolverChoice::Sl0, &SolverParams::with_sparsity(n / 4))?;
    println!(
        "  cloud recovery: residual {:.2e}, converged = {}",
        recovery.residual_norm, recovery.converged
    );

    let truth = user_decrypt(&recovery.cipher, &p, &dict)?;
    let base = quality_report(&floored.samples().view(), &truth.samples.view())?;
    println!("\n  key            distance        PRD        band");
    println!("  true key       {:8.3} {:10.3e}%   {}", 0.0, base.prd, base.band);

    for &r in &[99.0f64, 97.0, 90.0, 80.0, 70.0] {
        let estimate = make_estimated_key(&p, r, 31)?;
        let distance = frobenius_distance(&p, &estimate)?;
        let guess = user_decrypt_estimated(&recovery.cipher, &estimate, &dict)?;
        let report = quality_report(&floored.samples().view(), &guess.samples.view())?;
        println!(
            "  {r:3.0}% copied    {distance:8.3} {:10.3}%   {}",
            report.prd, report.band
        );
    }
    println!(
        "\na 99%-correct key already costs ten orders of magnitude in precision;\n\
         at 97% the record is clinically worthless."
    );
    Ok(())
}
