//! What the cloud actually sees, statistically.
//!
//! The cloud receives the scrambled operator A* = QΦΨP and the mixed
//! measurements ŷ. If those leaked structure, the whole outsourcing story
//! would collapse. This audit computes entry statistics of A* and checks
//! them against the closed-form prediction: with Gaussian Φ (row std 1/m),
//! orthonormal Ψ, bipolar P of weight α, and no measurement mixing, the
//! entries of ΦΨP behave like i.i.d. N(0, α²/m²) draws — zero mean, flat
//! variance, no detectable row structure.
//!
//! Run with `cargo run --example cloud_audit`.

use pacs::dictionaries::make_dct;
use pacs::keys::{BipolarKey, MatrixKey};
use pacs::protocol::{cloud_view_audit, encode_operator};
use pacs::sensing::make_gaussian_phi;

fn main() -> pacs::Result<()> {
    let (m, n, alpha) = (128usize, 512usize, 1.0f64);
    let dict = make_dct(n)?;
    let q_identity = MatrixKey::identity(m)?;

    let var_predicted = (alpha / m as f64).powi(2);
    // Mean of m·n i.i.d. N(0, (α/m)²) samples: std of the mean is (α/m)/√(mn).
    let mean_3sigma = 3.0 * (alpha / m as f64) / ((m * n) as f64).sqrt();

    println!("operator: {m} x {n}, alpha = {alpha}, Q = identity");
    println!("predicted entry variance alpha^2/m^2 = {var_predicted:.3e}");
    println!("3-sigma band for the entry mean     = +/- {mean_3sigma:.3e}\n");

    println!("  seed   entry mean   entry variance   var/predicted   max |row corr|");
    for seed in 0..10u64 {
        let phi = make_gaussian_phi(m, n, 100 + seed, false)?;
        let p = BipolarKey::generate(n, alpha, 200 + seed)?;
        let a_star = encode_operator(&phi, &dict, &q_identity, &p)?;
        let audit = cloud_view_audit(&a_star.view())?;

        assert!(audit.entry_mean.abs() <= mean_3sigma, "mean outside its 3-sigma band");
        assert!(
            (audit.entry_variance / var_predicted - 1.0).abs() < 0.05,
            "variance off by more than 5%"
        );
        println!(
            "  {seed:4}   {:10.2e}   {:14.6e}   {:13.4}   {:14.4}",
            audit.entry_mean,
            audit.entry_variance,
            audit.entry_variance / var_predicted,
            audit.max_abs_row_correlation
        );
    }

    println!("\nevery operator passed: Gaussian-looking entries, no row structure.");

    // With a real mixing key Q the entries stay zero-mean and unstructured,
    // but the variance scale changes (each output row is a random combination
    // of m rows with N(0, 1/m²) weights, shrinking the variance by ~1/m).
    let phi = make_gaussian_phi(m, n, 100, false)?;
    let p = BipolarKey::generate(n, alpha, 200)?;
    let q = MatrixKey::generate(m, 300)?;
    let mixed = cloud_view_audit(&encode_operator(&phi, &dict, &q, &p)?.view())?;
    println!(
        "\nwith a generated Q: mean {:.2e}, variance {:.3e} (~ alpha^2/m^3 = {:.3e}), \
         max |row corr| {:.4}",
        mixed.entry_mean,
        mixed.entry_variance,
        alpha.powi(2) / (m as f64).powi(3),
        mixed.max_abs_row_correlation
    );
    println!(
        "rows now correlate through Q's own geometry — but Q is secret too,\n\
         so that structure tells the cloud nothing about the signal or P."
    );
    Ok(())
}
