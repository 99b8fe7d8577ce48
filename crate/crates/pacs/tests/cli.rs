//! Black-box tests of the `pacs` binary: exit codes, determinism of every
//! artifact, file-safety guarantees, and the end-to-end workflows the tool
//! advertises.

use std::path::Path;
use std::process::{Command, Output};

use ndarray::Array1;
use pacs::dictionaries::make_dct;
use pacs::signal_io::{save_ecg, EcgRecord};
use pacs::synth::{synth_ecg, SynthEcgConfig};

fn pacs_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pacs"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary should run")
}

fn expect_code(out: &Output, code: i32) {
    assert_eq!(
        out.status.code(),
        Some(code),
        "expected exit {code}\n-- stdout --\n{}\n-- stderr --\n{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("reading {name}: {e}"))
}

/// Non-comment, non-empty lines of a CSV.
fn data_lines(text: &str) -> Vec<&str> {
    text.lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .collect()
}

/// Writes a one-window record whose DCT spectrum is exactly 3-sparse and
/// returns the samples.
fn write_sparse_record(dir: &Path, name: &str, n: usize) -> Vec<f64> {
    let dict = make_dct(n).unwrap();
    let mut s = Array1::<f64>::zeros(n);
    s[2] = 1.5;
    s[17] = -0.8;
    s[33] = 0.6;
    let x = dict.synthesize(&s.view()).unwrap();
    let record = EcgRecord {
        samples: x.to_vec(),
        sample_rate: 360.0,
        origin: "sparse-test".into(),
    };
    save_ecg(dir.join(name), &record).unwrap();
    x.to_vec()
}

fn write_synthetic_record(dir: &Path, name: &str, samples: usize, seed: u64) {
    let record = synth_ecg(&SynthEcgConfig::new(samples, seed)).unwrap();
    save_ecg(dir.join(name), &record).unwrap();
}

// ---------------------------------------------------------------------------
// Exit codes
// ---------------------------------------------------------------------------

#[test]
fn help_and_version_succeed_while_usage_errors_fail_with_one() {
    let dir = tempfile::tempdir().unwrap();
    expect_code(&pacs_in(dir.path(), &["--help"]), 0);
    expect_code(&pacs_in(dir.path(), &["--version"]), 0);
    expect_code(&pacs_in(dir.path(), &["keygen", "--help"]), 0);

    // No subcommand, unknown flags, missing required arguments.
    expect_code(&pacs_in(dir.path(), &[]), 1);
    expect_code(&pacs_in(dir.path(), &["keygen", "--bogus"]), 1);
    expect_code(&pacs_in(dir.path(), &["recover"]), 1);

    // Domain-level argument rejections.
    let out = pacs_in(
        dir.path(),
        &["keygen", "--n", "8", "--m", "4", "--alpha", "0", "--seed", "1", "--out", "k"],
    );
    expect_code(&out, 1);

    write_sparse_record(dir.path(), "in.csv", 64);
    // Gaussian sensing without a seed: seeds are explicit, never clock-derived.
    let out = pacs_in(
        dir.path(),
        &["sense", "--input", "in.csv", "--n", "64", "--m", "32", "--out", "y.pacs"],
    );
    expect_code(&out, 1);
    assert!(stderr_of(&out).contains("--phi-seed"));

    // --m and --cr must agree when both are given.
    let out = pacs_in(
        dir.path(),
        &[
            "pipeline", "--input", "in.csv", "--n", "64", "--m", "32", "--cr", "0.25",
            "--phi-seed", "1", "--q-seed", "2", "--p-seed", "3", "--out-prefix", "p",
        ],
    );
    expect_code(&out, 1);
}

#[test]
fn unreadable_and_malformed_inputs_fail_with_two() {
    let dir = tempfile::tempdir().unwrap();

    let out = pacs_in(
        dir.path(),
        &["metrics", "--reference", "absent.csv", "--test", "absent.csv"],
    );
    expect_code(&out, 2);

    std::fs::write(dir.path().join("garbage.pacs"), b"not a container at all").unwrap();
    let out = pacs_in(
        dir.path(),
        &[
            "recover", "--operator", "garbage.pacs", "--cipher", "garbage.pacs",
            "--out", "z.pacs",
        ],
    );
    expect_code(&out, 2);
}

// ---------------------------------------------------------------------------
// keygen
// ---------------------------------------------------------------------------

#[test]
fn keygen_is_deterministic_and_refuses_silent_overwrites() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let args = ["keygen", "--n", "32", "--m", "16", "--alpha", "1.5", "--seed", "9", "--out", "k"];

    expect_code(&pacs_in(dir_a.path(), &args), 0);
    expect_code(&pacs_in(dir_b.path(), &args), 0);
    for name in ["k.qkey", "k.pkey"] {
        let a = std::fs::read(dir_a.path().join(name)).unwrap();
        let b = std::fs::read(dir_b.path().join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical keygen runs");
    }

    // Existing keys are never clobbered without --force.
    let out = pacs_in(dir_a.path(), &args);
    expect_code(&out, 2);
    assert!(stderr_of(&out).contains("--force"));

    let mut forced: Vec<&str> = args.to_vec();
    forced.push("--force");
    expect_code(&pacs_in(dir_a.path(), &forced), 0);
}

// ---------------------------------------------------------------------------
// The split workflow agrees with the one-shot pipeline
// ---------------------------------------------------------------------------

#[test]
fn staged_commands_reproduce_the_pipeline_reconstruction() {
    let dir = tempfile::tempdir().unwrap();
    let original = write_sparse_record(dir.path(), "in.csv", 64);

    expect_code(
        &pacs_in(
            dir.path(),
            &["keygen", "--n", "64", "--m", "32", "--alpha", "1", "--seed", "5", "--out", "keys"],
        ),
        0,
    );
    expect_code(
        &pacs_in(
            dir.path(),
            &[
                "sense", "--input", "in.csv", "--n", "64", "--m", "32", "--phi-seed", "3",
                "--q-key", "keys.qkey", "--p-key", "keys.pkey",
                "--operator-out", "op.pacs", "--out", "w.cipher",
            ],
        ),
        0,
    );
    expect_code(
        &pacs_in(
            dir.path(),
            &["recover", "--operator", "op.pacs", "--cipher", "w.cipher", "--out", "w.z"],
        ),
        0,
    );
    expect_code(
        &pacs_in(
            dir.path(),
            &["decrypt", "--intermediate", "w.z", "--p-key", "keys.pkey", "--out", "split.csv"],
        ),
        0,
    );

    // One-shot run with the same seeds (keygen derives both keys from --seed).
    expect_code(
        &pacs_in(
            dir.path(),
            &[
                "pipeline", "--input", "in.csv", "--n", "64", "--m", "32",
                "--phi-seed", "3", "--q-seed", "5", "--p-seed", "5", "--out-prefix", "pipe",
            ],
        ),
        0,
    );

    let split: Vec<f64> = data_lines(&read(dir.path(), "split.csv"))
        .iter()
        .map(|l| l.parse().unwrap())
        .collect();
    let piped: Vec<f64> = data_lines(&read(dir.path(), "pipe.recon.csv"))
        .iter()
        .map(|l| {
            let cols: Vec<&str> = l.split(',').collect();
            assert_eq!(cols[0], "0", "expected a single window");
            cols[3].parse().unwrap()
        })
        .collect();

    assert_eq!(split.len(), 64);
    assert_eq!(split, piped, "staged and one-shot reconstructions diverge");

    // And both are exact: the input's spectrum is 3-sparse at m = 32.
    let err: f64 = original
        .iter()
        .zip(&split)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let scale: f64 = original.iter().map(|v| v * v).sum::<f64>().sqrt();
    assert!(err < 1e-6 * scale, "relative error {:.3e}", err / scale);
}

// ---------------------------------------------------------------------------
// Determinism and attack-file isolation
// ---------------------------------------------------------------------------

#[test]
fn pipeline_outputs_are_reproducible_and_wrong_key_files_are_separate() {
    let dir = tempfile::tempdir().unwrap();
    write_synthetic_record(dir.path(), "in.csv", 2 * 64, 3);
    let base = [
        "pipeline", "--input", "in.csv", "--n", "64", "--m", "32",
        "--phi-seed", "1", "--q-seed", "2", "--p-seed", "3",
    ];

    let run = |prefix: &str, extra: &[&str]| {
        let mut args: Vec<&str> = base.to_vec();
        args.extend_from_slice(extra);
        args.extend_from_slice(&["--out-prefix", prefix]);
        expect_code(&pacs_in(dir.path(), &args), 0);
    };

    run("a", &[]);
    run("b", &[]);
    for suffix in [".recon.csv", ".quality.csv"] {
        assert_eq!(
            read(dir.path(), &format!("a{suffix}")),
            read(dir.path(), &format!("b{suffix}")),
            "rerun changed {suffix}"
        );
    }

    // A wrong-key run adds its own files and leaves the correct-key
    // artifacts byte-identical.
    run("c", &["--wrong-key", "90", "--attack-seed", "7"]);
    assert_eq!(read(dir.path(), "a.quality.csv"), read(dir.path(), "c.quality.csv"));
    assert_eq!(read(dir.path(), "a.recon.csv"), read(dir.path(), "c.recon.csv"));

    let wrong_quality = read(dir.path(), "c.wrongkey-r90.quality.csv");
    assert!(dir.path().join("c.wrongkey-r90.recon.csv").exists());
    assert_ne!(
        data_lines(&wrong_quality),
        data_lines(&read(dir.path(), "c.quality.csv")),
        "wrong-key quality should differ from the true-key quality"
    );
    assert!(wrong_quality.contains("# wrong_key_r=90"));
    assert!(wrong_quality.contains("# frobenius_distance="));
}

// ---------------------------------------------------------------------------
// coherence
// ---------------------------------------------------------------------------

#[test]
fn coherence_reports_invariance_and_skips_impossible_block_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let out = pacs_in(
        dir.path(),
        &[
            "coherence", "--n", "60", "--m-range", "20,25",
            "--phi-seed", "8", "--p-seed", "9", "--out", "coh.csv",
        ],
    );
    expect_code(&out, 0);
    assert!(
        stderr_of(&out).contains("skipping dbbd at m=25"),
        "expected a skip notice for the non-dividing measurement count"
    );

    let text = read(dir.path(), "coh.csv");
    let rows = data_lines(&text);
    let tags: Vec<String> = rows
        .iter()
        .map(|r| {
            let c: Vec<&str> = r.split(',').collect();
            format!("{},{}", c[0], c[1])
        })
        .collect();
    assert_eq!(tags, ["20,gaussian", "20,dbbd", "25,gaussian"]);

    for row in rows {
        let c: Vec<&str> = row.split(',').collect();
        let plain: f64 = c[2].parse().unwrap();
        let encrypted: f64 = c[3].parse().unwrap();
        assert!(
            (plain - encrypted).abs() <= 1e-12,
            "row {row}: scrambling moved the coherence"
        );
    }
}

// ---------------------------------------------------------------------------
// learn-dict feeding the pipeline
// ---------------------------------------------------------------------------

#[test]
fn learned_dictionary_reaches_clinical_quality_on_its_training_data() {
    let dir = tempfile::tempdir().unwrap();
    write_synthetic_record(dir.path(), "train.csv", 48 * 32, 21);

    expect_code(
        &pacs_in(
            dir.path(),
            &[
                "learn-dict", "--input", "train.csv", "--window-len", "32",
                "--atoms", "40", "--sparsity", "4", "--iters", "8", "--seed", "1",
                "--out", "learned.pacs",
            ],
        ),
        0,
    );

    expect_code(
        &pacs_in(
            dir.path(),
            &[
                "pipeline", "--input", "train.csv", "--n", "32", "--m", "16",
                "--dict", "learned.pacs", "--phi-seed", "2", "--q-seed", "3", "--p-seed", "4",
                "--sparsity", "8", "--out-prefix", "ld",
            ],
        ),
        0,
    );

    let quality = read(dir.path(), "ld.quality.csv");
    for row in data_lines(&quality) {
        let band = row.split(',').next_back().unwrap();
        assert!(
            band == "very_good" || band == "good",
            "window fell below clinical quality: {row}"
        );
    }
}

// ---------------------------------------------------------------------------
// metrics
// ---------------------------------------------------------------------------

#[test]
fn metrics_emits_one_self_consistent_csv_row() {
    let dir = tempfile::tempdir().unwrap();
    write_synthetic_record(dir.path(), "ref.csv", 64, 5);

    // A slightly perturbed copy of the reference.
    let record = synth_ecg(&SynthEcgConfig::new(64, 5)).unwrap();
    let perturbed = EcgRecord {
        samples: record.samples.iter().map(|v| v + 0.01).collect(),
        sample_rate: record.sample_rate,
        origin: "perturbed".into(),
    };
    save_ecg(dir.path().join("test.csv"), &perturbed).unwrap();

    let out = pacs_in(
        dir.path(),
        &[
            "metrics", "--reference", "ref.csv", "--test", "test.csv",
            "--m", "16", "--n", "64", "--out", "q.csv",
        ],
    );
    expect_code(&out, 0);

    let text = read(dir.path(), "q.csv");
    let rows = data_lines(&text);
    assert_eq!(rows.len(), 1);
    let cols: Vec<&str> = rows[0].split(',').collect();
    assert_eq!(cols.len(), 5, "row should be window_id,prd,prdn,snr,band");
    let prd: f64 = cols[1].parse().unwrap();
    let snr: f64 = cols[3].parse().unwrap();
    assert!((snr - (-20.0 * (prd / 100.0).log10())).abs() < 1e-9);
    // Identical inputs score an exact zero.
    let out = pacs_in(dir.path(), &["metrics", "--reference", "ref.csv", "--test", "ref.csv"]);
    expect_code(&out, 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("very_good"));
}
