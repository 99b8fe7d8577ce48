//! A tour of every file the toolkit reads or writes.
//!
//! The binary container format carries all protocol artifacts between CLI
//! stages: signals, dense matrices, bipolar keys, ciphers and intermediate
//! (recovered-but-still-scrambled) coefficients. Text CSV handles raw ECG
//! records. This example writes one of each into a temporary directory,
//! reads everything back, and checks the round trips.
//!
//! Run with `cargo run --example file_formats`.

use ndarray::{arr1, arr2, Array1};
use sha2::{Digest, Sha256};

use pacs::container::{
    load_bipolar_key, load_cipher, load_intermediate, load_matrix, load_matrix_key,
    load_measurement_matrix, load_signal, peek_kind, save_bipolar_key, save_cipher,
    save_intermediate, save_matrix, save_matrix_key, save_measurement_matrix, save_signal,
};
use pacs::keys::{BipolarKey, MatrixKey};
use pacs::protocol::IntermediateCipher;
use pacs::sensing::make_gaussian_phi;
use pacs::signal_io::{load_ecg, save_ecg, SignalWindow};
use pacs::synth::{synth_ecg, SynthEcgConfig};

fn describe(path: &std::path::Path) -> pacs::Result<String> {
    let bytes = std::fs::read(path)
        .map_err(|e| pacs::Error::Io { path: path.to_path_buf(), source: e })?;
    let digest = Sha256::digest(&bytes);
    let fingerprint: String = digest[..4].iter().map(|b| format!("{b:02x}")).collect();
    Ok(format!("{:5} bytes, fingerprint {fingerprint}", bytes.len()))
}

fn main() -> pacs::Result<()> {
    let dir = tempfile::tempdir()
        .map_err(|e| pacs::Error::Io { path: "tempdir".into(), source: e })?;
    let at = |name: &str| dir.path().join(name);

    println!("container files (magic 'PACS', versioned little-endian header):\n");

    // --- signal -------------------------------------------------------------
    let signal = SignalWindow::new(arr1(&[0.25, -1.0, 0.5, 2.0]), 360.0, "tour")?;
    save_signal(at("window.pacs"), &signal)?;
    let back = load_signal(at("window.pacs"))?;
    assert_eq!(back.samples(), signal.samples());
    println!("  window.pacs        {:12} {}", peek_kind(at("window.pacs"))?.name(), describe(&at("window.pacs"))?);

    // --- dense matrix (2x2 is the smallest interesting one: 48 bytes) -------
    let tiny = arr2(&[[1.0, 2.0], [3.0, 4.0]]);
    save_matrix(at("tiny.pacs"), &tiny.view())?;
    assert_eq!(load_matrix(at("tiny.pacs"))?, tiny);
    println!("  tiny.pacs          {:12} {}", peek_kind(at("tiny.pacs"))?.name(), describe(&at("tiny.pacs"))?);

    // --- measurement matrix ---------------------------------------------------
    let phi = make_gaussian_phi(4, 16, 9, false)?;
    save_measurement_matrix(at("phi.pacs"), &phi)?;
    let phi_back = load_measurement_matrix(at("phi.pacs"))?;
    assert_eq!(phi_back.m(), 4);
    println!("  phi.pacs           {:12} {}", peek_kind(at("phi.pacs"))?.name(), describe(&at("phi.pacs"))?);

    // --- keys ----------------------------------------------------------------
    let q = MatrixKey::generate(4, 21)?;
    save_matrix_key(at("mix.qkey"), &q)?;
    assert_eq!(load_matrix_key(at("mix.qkey"))?.matrix(), q.matrix());

    let p = BipolarKey::generate(16, 1.0, 22)?;
    save_bipolar_key(at("perm.pkey"), &p)?;
    let p_back = load_bipolar_key(at("perm.pkey"))?;
    assert_eq!(p_back.perm(), p.perm());
    assert_eq!(p_back.signs(), p.signs());
    println!("  mix.qkey           {:12} {}", peek_kind(at("mix.qkey"))?.name(), describe(&at("mix.qkey"))?);
    println!("  perm.pkey          {:12} {}", peek_kind(at("perm.pkey"))?.name(), describe(&at("perm.pkey"))?);
    println!("    (a seeded mixing key stores only its size and seed — 25 bytes,");
    println!("     not m^2 floats; it is regenerated bit-exactly on load)");

    // --- cipher + intermediate -------------------------------------------------
    let y_hat: Array1<f64> = arr1(&[0.5, -0.25, 0.125, 1.0]);
    save_cipher(at("window.cipher"), &y_hat.view())?;
    assert_eq!(load_cipher(at("window.cipher"))?, y_hat);

    let z = IntermediateCipher::new(arr1(&[0.0, 3.0, 0.0, -2.0, 0.0, 0.0, 0.0, 1.0]))?;
    save_intermediate(at("window.z"), &z)?;
    assert_eq!(load_intermediate(at("window.z"))?, z);
    println!("  window.cipher      {:12} {}", peek_kind(at("window.cipher"))?.name(), describe(&at("window.cipher"))?);
    println!("  window.z           {:12} {}", peek_kind(at("window.z"))?.name(), describe(&at("window.z"))?);

    // --- text ECG records ------------------------------------------------------
    let record = synth_ecg(&SynthEcgConfig::new(32, 1))?;
    save_ecg(at("record.csv"), &record)?;
    let record_back = load_ecg(at("record.csv"), None)?;
    assert_eq!(record_back.samples.len(), 32);
    assert_eq!(record_back.sample_rate, record.sample_rate);
    println!("\n  record.csv         text, `# rate=<Hz>` header, one sample per line");

    println!("\nall round trips exact. The same files drive the CLI:");
    println!("  pacs keygen --m 4 --n 16 ... && pacs sense ... && pacs recover ...");
    Ok(())
}
