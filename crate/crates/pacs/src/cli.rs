//! Command-line surface: nine subcommands that tie the protocol together and
//! regenerate the experiment result tables as CSV files.
//!
//! Exit codes: `0` success, `1` usage error (bad flags, inconsistent
//! parameters), `2` data error (unreadable/malformed input, refusal to
//! overwrite), `3` numeric failure (singular systems, divergence).
//!
//! Every output CSV starts with `#`-prefixed comment lines that embed the
//! full experiment configuration, seeds included, followed by a
//! `# columns: ...` line. Reruns with identical flags produce byte-identical
//! files. Signal CSVs stay loadable as input records (comment lines are
//! skipped on read).

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use ndarray::Array1;
use sha2::{Digest, Sha256};

use crate::container;
use crate::dictionaries::{self, Dictionary};
use crate::error::{invalid, Error, Result};
use crate::keys::{self, BipolarKey, MatrixKey};
use crate::metrics;
use crate::protocol;
use crate::sensing::{self, MeasurementMatrix};
use crate::signal_io::{self, EcgRecord, Pad, SignalWindow};
use crate::solvers::{Sl0Params, SolverChoice, SolverParams};

/// Runs the CLI on the given argv (including the program name); returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return code;
        }
    };
    let outcome = match &cli.command {
        Command::Keygen(a) => cmd_keygen(a),
        Command::Sense(a) => cmd_sense(a),
        Command::Recover(a) => cmd_recover(a),
        Command::Decrypt(a) => cmd_decrypt(a),
        Command::Pipeline(a) => cmd_pipeline(a),
        Command::Attack(a) => cmd_attack(a),
        Command::Coherence(a) => cmd_coherence(a),
        Command::LearnDict(a) => cmd_learn_dict(a),
        Command::Metrics(a) => cmd_metrics(a),
    };
    match outcome {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

#[derive(Parser)]
#[command(
    name = "pacs",
    version,
    about = "Privacy-assured compressive sensing of ECG signals: \
             compress and encrypt on the sensor, recover in the cloud without \
             exposing the signal, decrypt with the user's key."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the mixing key Q and the bipolar permutation key P
    Keygen(KeygenArgs),
    /// Sensor side: compress one window (and mix it when a Q key is given)
    Sense(SenseArgs),
    /// Cloud side: sparse recovery against a scrambled operator (no keys)
    Recover(RecoverArgs),
    /// User side: unscramble an intermediate cipher and resynthesize
    Decrypt(DecryptArgs),
    /// Full loop per window: sense, encode, recover, decrypt, score
    Pipeline(PipelineArgs),
    /// Key-guessing attack: decrypt with partially-correct keys
    Attack(AttackArgs),
    /// Mutual-coherence sweep with and without the bipolar key
    Coherence(CoherenceArgs),
    /// Learn a dictionary from training records (method of optimal directions)
    LearnDict(LearnDictArgs),
    /// Quality metrics between a reference signal and a reconstruction
    Metrics(MetricsArgs),
}

// ---------------------------------------------------------------------------
// Shared flag groups and small value enums
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum PhiArg {
    /// Dense Gaussian matrix, entries N(0, (1/m)^2), seeded
    Gaussian,
    /// Deterministic binary block-diagonal matrix (requires m | n)
    Dbbd,
}

fn phi_name(phi: PhiArg) -> &'static str {
    match phi {
        PhiArg::Gaussian => "gaussian",
        PhiArg::Dbbd => "dbbd",
    }
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum PadArg {
    /// Drop the trailing remainder shorter than one window
    Drop,
    /// Zero-pad the trailing remainder to a full window
    Zero,
}

impl From<PadArg> for Pad {
    fn from(p: PadArg) -> Pad {
        match p {
            PadArg::Drop => Pad::Drop,
            PadArg::Zero => Pad::Zero,
        }
    }
}

fn pad_name(pad: PadArg) -> &'static str {
    match pad {
        PadArg::Drop => "drop",
        PadArg::Zero => "zero",
    }
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum SolverArg {
    /// Orthogonal matching pursuit
    Omp,
    /// Smoothed-l0 gradient descent
    Sl0,
    /// Exhaustive support search (tiny problems only)
    BruteForce,
}

/// Solver selection plus every tunable of [`SolverParams`], exposed as flags.
#[derive(Args)]
struct SolverFlags {
    /// Recovery algorithm
    #[arg(long, value_enum, default_value_t = SolverArg::Omp)]
    solver: SolverArg,
    /// Sparsity budget (atoms for omp, support cap for brute-force);
    /// defaults to m/4, at least 1
    #[arg(long)]
    sparsity: Option<usize>,
    /// Relative residual below which a solve counts as converged
    #[arg(long, default_value_t = 1e-6)]
    residual_tol: f64,
    /// SL0: stop once the kernel width falls below this (default: 1e-4 of
    /// the initial width)
    #[arg(long)]
    sl0_sigma_min: Option<f64>,
    /// SL0: geometric decay of the kernel width, in (0, 1)
    #[arg(long, default_value_t = 0.5)]
    sl0_sigma_decrease: f64,
    /// SL0: gradient step size
    #[arg(long, default_value_t = 2.0)]
    sl0_mu: f64,
    /// SL0: gradient/projection steps per kernel width
    #[arg(long, default_value_t = 3)]
    sl0_inner_iters: usize,
}

impl SolverFlags {
    fn choice(&self) -> SolverChoice {
        match self.solver {
            SolverArg::Omp => SolverChoice::Omp,
            SolverArg::Sl0 => SolverChoice::Sl0,
            SolverArg::BruteForce => SolverChoice::BruteForce,
        }
    }

    fn resolved_sparsity(&self, m: usize) -> usize {
        self.sparsity.unwrap_or_else(|| (m / 4).max(1))
    }

    fn params(&self, m: usize) -> SolverParams {
        SolverParams {
            max_sparsity: self.resolved_sparsity(m),
            residual_tol: self.residual_tol,
            sl0: Sl0Params {
                sigma_min: self.sl0_sigma_min,
                sigma_decrease: self.sl0_sigma_decrease,
                mu: self.sl0_mu,
                inner_iters: self.sl0_inner_iters,
            },
        }
    }

    fn describe(&self, cfg: &mut ExperimentConfig, m: usize) {
        cfg.push("solver", self.choice());
        cfg.push("sparsity", self.resolved_sparsity(m));
        cfg.push("residual_tol", self.residual_tol);
        if self.choice() == SolverChoice::Sl0 {
            if let Some(s) = self.sl0_sigma_min {
                cfg.push("sl0_sigma_min", s);
            }
            cfg.push("sl0_sigma_decrease", self.sl0_sigma_decrease);
            cfg.push("sl0_mu", self.sl0_mu);
            cfg.push("sl0_inner_iters", self.sl0_inner_iters);
        }
    }
}

// ---------------------------------------------------------------------------
// Subcommand argument structs
// ---------------------------------------------------------------------------

#[derive(Args)]
struct KeygenArgs {
    /// Coefficient-domain size (bipolar key dimension)
    #[arg(long)]
    n: usize,
    /// Measurement count (mixing key dimension)
    #[arg(long)]
    m: usize,
    /// Magnitude of the bipolar key's non-zero entries
    #[arg(long)]
    alpha: f64,
    /// RNG seed for both keys
    #[arg(long)]
    seed: u64,
    /// Output path prefix; writes <out>.qkey and <out>.pkey
    #[arg(long)]
    out: PathBuf,
    /// Overwrite existing key files
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct SenseArgs {
    /// Input record: CSV text or a signal container
    #[arg(long)]
    input: PathBuf,
    /// Zero-based column when the input has several per line
    #[arg(long)]
    column: Option<usize>,
    /// Sample-rate override in Hz
    #[arg(long)]
    rate: Option<f64>,
    /// Window length N
    #[arg(long)]
    n: usize,
    /// Measurement count M
    #[arg(long)]
    m: usize,
    /// Which window of the record to sense
    #[arg(long, default_value_t = 0)]
    window: usize,
    /// Policy for a trailing remainder shorter than one window
    #[arg(long, value_enum, default_value_t = PadArg::Drop)]
    pad: PadArg,
    /// Sensing matrix family
    #[arg(long, value_enum, default_value_t = PhiArg::Gaussian)]
    phi: PhiArg,
    /// Seed for the Gaussian sensing matrix (required with --phi gaussian)
    #[arg(long)]
    phi_seed: Option<u64>,
    /// Mixing-key container; omit to emit plain (unmixed) measurements
    #[arg(long)]
    q_key: Option<PathBuf>,
    /// Output cipher container
    #[arg(long)]
    out: PathBuf,
    /// Also write the recovery operator (Q Phi Psi P, falling back to
    /// identity for whichever keys are not given) as a matrix container
    #[arg(long)]
    operator_out: Option<PathBuf>,
    /// Bipolar-key container used for --operator-out
    #[arg(long)]
    p_key: Option<PathBuf>,
    /// Dictionary for --operator-out: dct, db10, or a container path
    #[arg(long, default_value = "dct")]
    dict: String,
    /// Cascade depth for the db10 dictionary
    #[arg(long, default_value_t = 2)]
    db10_levels: u8,
}

#[derive(Args)]
struct RecoverArgs {
    /// Recovery operator (dense matrix container)
    #[arg(long)]
    operator: PathBuf,
    /// Cipher container with the measurements
    #[arg(long)]
    cipher: PathBuf,
    #[command(flatten)]
    solver: SolverFlags,
    /// Output intermediate-cipher container
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DecryptArgs {
    /// Intermediate-cipher container produced by `recover`
    #[arg(long)]
    intermediate: PathBuf,
    /// Bipolar-key container
    #[arg(long)]
    p_key: PathBuf,
    /// Dictionary: dct, db10, or a container path
    #[arg(long, default_value = "dct")]
    dict: String,
    /// Cascade depth for the db10 dictionary
    #[arg(long, default_value_t = 2)]
    db10_levels: u8,
    /// Sample rate recorded in the output, Hz
    #[arg(long, default_value_t = 360.0)]
    rate: f64,
    /// Output reconstruction CSV
    #[arg(long)]
    out: PathBuf,
    /// Optional CSV for the decrypted coefficient vector
    #[arg(long)]
    coeffs_out: Option<PathBuf>,
}

#[derive(Args)]
struct PipelineArgs {
    /// Input record: CSV text or a signal container
    #[arg(long)]
    input: PathBuf,
    /// Zero-based column when the input has several per line
    #[arg(long)]
    column: Option<usize>,
    /// Sample-rate override in Hz
    #[arg(long)]
    rate: Option<f64>,
    /// Window length N
    #[arg(long)]
    n: usize,
    /// Measurement count M (alternatively --cr)
    #[arg(long)]
    m: Option<usize>,
    /// Measurement fraction M/N in (0, 1]; sets M = round(N * cr)
    #[arg(long)]
    cr: Option<f64>,
    /// Policy for a trailing remainder shorter than one window
    #[arg(long, value_enum, default_value_t = PadArg::Drop)]
    pad: PadArg,
    /// Dictionary: dct, db10, or a container path
    #[arg(long, default_value = "dct")]
    dict: String,
    /// Cascade depth for the db10 dictionary
    #[arg(long, default_value_t = 2)]
    db10_levels: u8,
    /// Sensing matrix family
    #[arg(long, value_enum, default_value_t = PhiArg::Gaussian)]
    phi: PhiArg,
    /// Seed for the Gaussian sensing matrix (required with --phi gaussian)
    #[arg(long)]
    phi_seed: Option<u64>,
    /// Seed for the mixing key Q
    #[arg(long)]
    q_seed: Option<u64>,
    /// Seed for the bipolar key P
    #[arg(long)]
    p_seed: Option<u64>,
    /// Magnitude of the bipolar key's non-zero entries
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Ordinary (unencrypted) compressive sensing: both keys identity
    #[arg(long)]
    ordinary: bool,
    #[command(flatten)]
    solver: SolverFlags,
    /// Additionally decrypt with an estimated key matching r% of the true
    /// key's columns; written under a distinct file suffix
    #[arg(long, value_name = "R")]
    wrong_key: Option<f64>,
    /// Seed for the estimated key (required with --wrong-key)
    #[arg(long)]
    attack_seed: Option<u64>,
    /// Output prefix; writes <prefix>.recon.csv and <prefix>.quality.csv
    #[arg(long)]
    out_prefix: PathBuf,
}

#[derive(Args)]
struct AttackArgs {
    /// Input records (repeat the flag or pass several paths)
    #[arg(long, required = true, num_args = 1..)]
    input: Vec<PathBuf>,
    /// Zero-based column when inputs have several per line
    #[arg(long)]
    column: Option<usize>,
    /// Sample-rate override in Hz
    #[arg(long)]
    rate: Option<f64>,
    /// Window length N
    #[arg(long)]
    n: usize,
    /// Measurement count M (alternatively --cr)
    #[arg(long)]
    m: Option<usize>,
    /// Measurement fraction M/N in (0, 1]; sets M = round(N * cr)
    #[arg(long)]
    cr: Option<f64>,
    /// Policy for a trailing remainder shorter than one window
    #[arg(long, value_enum, default_value_t = PadArg::Drop)]
    pad: PadArg,
    /// Dictionary: dct, db10, or a container path
    #[arg(long, default_value = "dct")]
    dict: String,
    /// Cascade depth for the db10 dictionary
    #[arg(long, default_value_t = 2)]
    db10_levels: u8,
    /// Sensing matrix family
    #[arg(long, value_enum, default_value_t = PhiArg::Gaussian)]
    phi: PhiArg,
    /// Seed for the Gaussian sensing matrix (required with --phi gaussian)
    #[arg(long)]
    phi_seed: Option<u64>,
    /// Seed for the mixing key Q
    #[arg(long)]
    q_seed: Option<u64>,
    /// Seed for the bipolar key P
    #[arg(long)]
    p_seed: Option<u64>,
    /// Magnitude of the bipolar key's non-zero entries
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[command(flatten)]
    solver: SolverFlags,
    /// Percentages of correctly guessed key columns, e.g. 100,99,98,97
    /// (100 = the true key; it is added when missing)
    #[arg(long, value_delimiter = ',', default_value = "100,99,98,97")]
    r: Vec<f64>,
    /// Estimated-key seeds; every r < 100 is tried once per seed
    #[arg(long, value_delimiter = ',', default_value = "1")]
    attack_seeds: Vec<u64>,
    /// Output CSV
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CoherenceArgs {
    /// Signal length N
    #[arg(long)]
    n: usize,
    /// Measurement counts: comma list (50,100,125) or start:step:end
    #[arg(long)]
    m_range: String,
    /// Dictionary: dct, db10, or a container path
    #[arg(long, default_value = "dct")]
    dict: String,
    /// Cascade depth for the db10 dictionary
    #[arg(long, default_value_t = 2)]
    db10_levels: u8,
    /// Base seed for the Gaussian sensing matrices (offset by m per row)
    #[arg(long)]
    phi_seed: Option<u64>,
    /// Seed for the bipolar key P
    #[arg(long)]
    p_seed: Option<u64>,
    /// Magnitude of the bipolar key's non-zero entries
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Output CSV
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct LearnDictArgs {
    /// Training records (repeat the flag or pass several paths)
    #[arg(long, required = true, num_args = 1..)]
    input: Vec<PathBuf>,
    /// Zero-based column when inputs have several per line
    #[arg(long)]
    column: Option<usize>,
    /// Sample-rate override in Hz
    #[arg(long)]
    rate: Option<f64>,
    /// Training window length (also the atom length)
    #[arg(long)]
    window_len: usize,
    /// Policy for a trailing remainder shorter than one window
    #[arg(long, value_enum, default_value_t = PadArg::Drop)]
    pad: PadArg,
    /// Number of atoms to learn
    #[arg(long)]
    atoms: usize,
    /// Coding sparsity during learning
    #[arg(long)]
    sparsity: usize,
    /// Training iterations (0 writes the normalized initialization)
    #[arg(long)]
    iters: usize,
    /// Seed for the atom initialization
    #[arg(long)]
    seed: Option<u64>,
    /// Output dictionary container
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct MetricsArgs {
    /// Reference signal: CSV text or a signal container
    #[arg(long)]
    reference: PathBuf,
    /// Signal under test: CSV text or a signal container
    #[arg(long)]
    test: PathBuf,
    /// Zero-based column applied to both CSV inputs
    #[arg(long)]
    column: Option<usize>,
    /// Label written in the emitted CSV row
    #[arg(long, default_value_t = 0)]
    window_id: usize,
    /// Measurement count; with --n, adds compression figures
    #[arg(long)]
    m: Option<usize>,
    /// Signal length; with --m, adds compression figures
    #[arg(long)]
    n: Option<usize>,
    /// Output CSV (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

// ---------------------------------------------------------------------------
// Configuration header embedded in every output CSV
// ---------------------------------------------------------------------------

/// Ordered key=value lines rendered as `#` comments at the top of each CSV,
/// so a result file records the exact experiment (seeds included) that
/// produced it.
struct ExperimentConfig {
    lines: Vec<String>,
}

impl ExperimentConfig {
    fn new(subcommand: &str) -> Self {
        Self { lines: vec![format!("# pacs {subcommand}")] }
    }

    fn push(&mut self, key: &str, value: impl std::fmt::Display) {
        self.lines.push(format!("# {key}={value}"));
    }

    fn render(&self) -> String {
        let mut text = self.lines.join("\n");
        text.push('\n');
        text
    }
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io { path: path.to_path_buf(), source }
}

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
        }
    }
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    ensure_parent(path)?;
    std::fs::write(path, text).map_err(|e| io_error(path, e))
}

/// First 8 hex digits of the SHA-256 of the file's bytes.
fn fingerprint(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| io_error(path, e))?;
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().take(4).map(|b| format!("{b:02x}")).collect())
}

fn check_overwrite(path: &Path, force: bool) -> Result<()> {
    if path.exists() && !force {
        return Err(Error::Data(format!(
            "{} already exists; pass --force to overwrite",
            path.display()
        )));
    }
    Ok(())
}

/// `prefix` + literal `suffix` (no extension juggling).
fn suffixed(prefix: &Path, suffix: &str) -> PathBuf {
    PathBuf::from(format!("{}{}", prefix.display(), suffix))
}

/// Loads a record from either a signal container or CSV text, with an
/// optional sample-rate override.
fn load_record(path: &Path, column: Option<usize>, rate: Option<f64>) -> Result<EcgRecord> {
    let is_container = container::peek_kind(path).is_ok();
    let mut record = if is_container {
        let w = container::load_signal(path)?;
        EcgRecord {
            samples: w.samples().to_vec(),
            sample_rate: w.sample_rate(),
            origin: w.origin().to_string(),
        }
    } else {
        signal_io::load_ecg(path, column)?
    };
    if let Some(r) = rate {
        if !(r.is_finite() && r > 0.0) {
            return Err(invalid("--rate must be positive and finite"));
        }
        record.sample_rate = r;
    }
    Ok(record)
}

/// Builds a square dictionary of the named kind, or loads one from a
/// container path and checks its signal dimension.
fn build_dictionary(spec: &str, n: usize, db10_levels: u8) -> Result<Dictionary> {
    match spec {
        "dct" => dictionaries::make_dct(n),
        "db10" => dictionaries::make_db10(n, db10_levels),
        path => {
            let dict = container::load_dictionary(Path::new(path))?;
            if dict.n() != n {
                return Err(invalid(format!(
                    "dictionary {} synthesizes {}-sample signals but the window length is {}",
                    path,
                    dict.n(),
                    n
                )));
            }
            Ok(dict)
        }
    }
}

fn build_phi(
    kind: PhiArg,
    m: usize,
    n: usize,
    seed: Option<u64>,
) -> Result<MeasurementMatrix> {
    match kind {
        PhiArg::Gaussian => {
            let s = seed.ok_or_else(|| invalid("--phi-seed is required with --phi gaussian"))?;
            sensing::make_gaussian_phi(m, n, s, true)
        }
        PhiArg::Dbbd => {
            if seed.is_some() {
                return Err(invalid(
                    "--phi-seed does not apply to the deterministic dbbd matrix",
                ));
            }
            sensing::make_dbbd_phi(m, n)
        }
    }
}

/// Resolves the measurement count from `--m`, `--cr`, or both (consistent).
fn resolve_m(n: usize, m: Option<usize>, cr: Option<f64>) -> Result<usize> {
    match (m, cr) {
        (None, None) => Err(invalid("pass --m or --cr")),
        (Some(m), None) => Ok(m),
        (None, Some(cr)) => {
            if !(cr.is_finite() && cr > 0.0 && cr <= 1.0) {
                return Err(invalid("--cr must lie in (0, 1]"));
            }
            let m = (cr * n as f64).round() as usize;
            if m == 0 {
                return Err(invalid(format!("--cr {cr} yields zero measurements at n = {n}")));
            }
            Ok(m)
        }
        (Some(m), Some(cr)) => {
            let expected = cr * n as f64;
            if (m as f64 - expected).abs() > 0.5 {
                return Err(invalid(format!(
                    "--m {m} and --cr {cr} disagree: n*cr = {expected}"
                )));
            }
            Ok(m)
        }
    }
}

/// Parses `--m-range`: either a comma list or an inclusive start:step:end.
fn parse_m_range(text: &str) -> Result<Vec<usize>> {
    let one = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| invalid(format!("bad measurement count '{t}' in --m-range")))
    };
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(invalid("--m-range as a range needs exactly start:step:end"));
        }
        let (start, step, end) = (one(parts[0])?, one(parts[1])?, one(parts[2])?);
        if step == 0 {
            return Err(invalid("--m-range step must be positive"));
        }
        let mut ms = Vec::new();
        let mut m = start;
        while m <= end {
            ms.push(m);
            m += step;
        }
        if ms.is_empty() {
            return Err(invalid("--m-range selects no measurement counts"));
        }
        Ok(ms)
    } else {
        text.split(',').map(one).collect()
    }
}

fn require_seed(seed: Option<u64>, flag: &str) -> Result<u64> {
    seed.ok_or_else(|| invalid(format!("{flag} is required (seeds are explicit, never clock-derived)")))
}

fn quality_row(window_id: usize, q: &metrics::QualityReport) -> String {
    format!("{},{},{},{},{}\n", window_id, q.prd, q.prdn, q.snr_db, q.band)
}

const QUALITY_COLUMNS: &str = "# columns: window_id,prd,prdn,snr,band\n";

// ---------------------------------------------------------------------------
// keygen
// ---------------------------------------------------------------------------

fn cmd_keygen(a: &KeygenArgs) -> Result<()> {
    if !(a.alpha.is_finite() && a.alpha > 0.0) {
        return Err(invalid("--alpha must be positive and finite"));
    }
    let q_path = suffixed(&a.out, ".qkey");
    let p_path = suffixed(&a.out, ".pkey");
    check_overwrite(&q_path, a.force)?;
    check_overwrite(&p_path, a.force)?;

    let q = MatrixKey::generate(a.m, a.seed)?;
    let p = BipolarKey::generate(a.n, a.alpha, a.seed)?;
    ensure_parent(&q_path)?;
    container::save_matrix_key(&q_path, &q)?;
    container::save_bipolar_key(&p_path, &p)?;

    println!(
        "wrote {} (mixing key {}x{}, cond={:.3e}, fp={})",
        q_path.display(),
        q.m(),
        q.m(),
        q.condition(),
        fingerprint(&q_path)?
    );
    println!(
        "wrote {} (bipolar key n={}, alpha={}, fp={})",
        p_path.display(),
        p.n(),
        p.alpha(),
        fingerprint(&p_path)?
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// sense
// ---------------------------------------------------------------------------

fn cmd_sense(a: &SenseArgs) -> Result<()> {
    let record = load_record(&a.input, a.column, a.rate)?;
    let windows = signal_io::window(&record, a.n, a.pad.into())?;
    let w = windows.get(a.window).ok_or_else(|| {
        Error::Data(format!(
            "record yields {} window(s) of length {}; --window {} is out of range",
            windows.len(),
            a.n,
            a.window
        ))
    })?;
    let phi = build_phi(a.phi, a.m, a.n, a.phi_seed)?;
    let q = a.q_key.as_deref().map(container::load_matrix_key).transpose()?;

    let y_hat = match &q {
        Some(qk) => protocol::sensor_encode(w, &phi, qk)?,
        None => sensing::sense(&phi, &w.samples().view())?,
    };
    ensure_parent(&a.out)?;
    container::save_cipher(&a.out, &y_hat.view())?;
    println!(
        "wrote {} ({} measurements, window {} of {}, fp={})",
        a.out.display(),
        y_hat.len(),
        a.window,
        record.origin,
        fingerprint(&a.out)?
    );

    if let Some(op_out) = &a.operator_out {
        let dict = build_dictionary(&a.dict, a.n, a.db10_levels)?;
        let q_eff = match q {
            Some(qk) => qk,
            None => MatrixKey::identity(a.m)?,
        };
        let p_eff = match &a.p_key {
            Some(path) => container::load_bipolar_key(path)?,
            None => BipolarKey::identity(dict.atoms(), 1.0)?,
        };
        let a_star = protocol::encode_operator(&phi, &dict, &q_eff, &p_eff)?;
        ensure_parent(op_out)?;
        container::save_matrix(op_out, &a_star.view())?;
        println!(
            "wrote {} (recovery operator {}x{}, fp={})",
            op_out.display(),
            a_star.nrows(),
            a_star.ncols(),
            fingerprint(op_out)?
        );
    } else if a.p_key.is_some() {
        return Err(invalid("--p-key only applies together with --operator-out"));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// recover
// ---------------------------------------------------------------------------

fn cmd_recover(a: &RecoverArgs) -> Result<()> {
    let a_star = container::load_matrix(&a.operator)?;
    let y_hat = container::load_cipher(&a.cipher)?;
    let package = protocol::PublicRecoveryPackage::new(a_star, y_hat)?;
    let params = a.solver.params(package.m());
    let recovery = protocol::cloud_recover(&package, a.solver.choice(), &params)?;

    ensure_parent(&a.out)?;
    container::save_intermediate(&a.out, &recovery.cipher)?;
    println!(
        "wrote {} (intermediate cipher, length {}, fp={})",
        a.out.display(),
        recovery.cipher.len(),
        fingerprint(&a.out)?
    );
    println!(
        "solver={} iterations={} residual={:e} converged={}",
        recovery.solver, recovery.iterations, recovery.residual_norm, recovery.converged
    );
    if let Some(note) = &recovery.note {
        eprintln!("note: {note}");
    }
    if !recovery.converged {
        eprintln!("notice: the residual target was not reached; the cipher is a best effort");
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// decrypt
// ---------------------------------------------------------------------------

fn cmd_decrypt(a: &DecryptArgs) -> Result<()> {
    if !(a.rate.is_finite() && a.rate > 0.0) {
        return Err(invalid("--rate must be positive and finite"));
    }
    let z = container::load_intermediate(&a.intermediate)?;
    let p = container::load_bipolar_key(&a.p_key)?;
    let dict = match a.dict.as_str() {
        "dct" => dictionaries::make_dct(z.len())?,
        "db10" => dictionaries::make_db10(z.len(), a.db10_levels)?,
        path => {
            let d = container::load_dictionary(Path::new(path))?;
            if d.atoms() != z.len() {
                return Err(invalid(format!(
                    "dictionary {} has {} atoms but the intermediate cipher has length {}",
                    path,
                    d.atoms(),
                    z.len()
                )));
            }
            d
        }
    };
    let dec = protocol::user_decrypt(&z, &p, &dict)?;

    let mut cfg = ExperimentConfig::new("decrypt");
    cfg.push("intermediate", a.intermediate.display());
    cfg.push("p_key", a.p_key.display());
    cfg.push("dict", &a.dict);
    if a.dict == "db10" {
        cfg.push("db10_levels", a.db10_levels);
    }
    let mut text = cfg.render();
    text.push_str(&format!("# rate={}\n", a.rate));
    for v in dec.samples.iter() {
        text.push_str(&format!("{v}\n"));
    }
    write_text(&a.out, &text)?;
    println!(
        "wrote {} ({} samples, fp={})",
        a.out.display(),
        dec.samples.len(),
        fingerprint(&a.out)?
    );

    if let Some(coeffs_out) = &a.coeffs_out {
        let mut text = cfg.render();
        text.push_str("# columns: coefficient\n");
        for v in dec.coefficients.iter() {
            text.push_str(&format!("{v}\n"));
        }
        write_text(coeffs_out, &text)?;
        println!(
            "wrote {} ({} coefficients, fp={})",
            coeffs_out.display(),
            dec.coefficients.len(),
            fingerprint(coeffs_out)?
        );
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// pipeline
// ---------------------------------------------------------------------------

fn cmd_pipeline(a: &PipelineArgs) -> Result<()> {
    let record = load_record(&a.input, a.column, a.rate)?;
    let m = resolve_m(a.n, a.m, a.cr)?;
    let dict = build_dictionary(&a.dict, a.n, a.db10_levels)?;
    let atoms = dict.atoms();
    let phi = build_phi(a.phi, m, a.n, a.phi_seed)?;

    let (q, p) = if a.ordinary {
        if a.q_seed.is_some() || a.p_seed.is_some() {
            return Err(invalid("--ordinary replaces both keys; drop --q-seed/--p-seed"));
        }
        (MatrixKey::identity(m)?, BipolarKey::identity(atoms, a.alpha)?)
    } else {
        (
            MatrixKey::generate(m, require_seed(a.q_seed, "--q-seed")?)?,
            BipolarKey::generate(atoms, a.alpha, require_seed(a.p_seed, "--p-seed")?)?,
        )
    };
    let estimated = match a.wrong_key {
        Some(r) => {
            let seed = a.attack_seed.ok_or_else(|| invalid("--wrong-key requires --attack-seed"))?;
            Some(keys::make_estimated_key(&p, r, seed)?)
        }
        None => {
            if a.attack_seed.is_some() {
                return Err(invalid("--attack-seed only applies together with --wrong-key"));
            }
            None
        }
    };

    let windows = signal_io::window(&record, a.n, a.pad.into())?;
    if windows.is_empty() {
        eprintln!(
            "notice: {} has only {} samples; no window of length {} to process",
            a.input.display(),
            record.samples.len(),
            a.n
        );
    }
    let params = a.solver.params(m);
    let choice = a.solver.choice();
    let a_star = protocol::encode_operator(&phi, &dict, &q, &p)?;

    let mut cfg = ExperimentConfig::new("pipeline");
    cfg.push("input", a.input.display());
    if let Some(c) = a.column {
        cfg.push("column", c);
    }
    cfg.push("rate", record.sample_rate);
    cfg.push("n", a.n);
    cfg.push("m", m);
    cfg.push("cr_m_over_n", m as f64 / a.n as f64);
    cfg.push("cr_n_over_m", a.n as f64 / m as f64);
    cfg.push("compression_percent", metrics::compression_percent(m, a.n)?);
    cfg.push("dict", &a.dict);
    if a.dict == "db10" {
        cfg.push("db10_levels", a.db10_levels);
    }
    if atoms != a.n {
        cfg.push("atoms", atoms);
    }
    cfg.push("phi", phi_name(a.phi));
    if let Some(s) = a.phi_seed {
        cfg.push("phi_seed", s);
    }
    if a.ordinary {
        cfg.push("keys", "identity (ordinary compressive sensing)");
    } else {
        cfg.push("q_seed", a.q_seed.expect("checked above"));
        cfg.push("p_seed", a.p_seed.expect("checked above"));
    }
    cfg.push("alpha", a.alpha);
    a.solver.describe(&mut cfg, m);
    cfg.push("pad", pad_name(a.pad));
    cfg.push("windows", windows.len());

    let mut recon_rows = String::new();
    let mut quality_rows = String::new();
    let mut wrong_recon_rows = String::new();
    let mut wrong_quality_rows = String::new();
    let mut prd_sum = 0.0;

    for (wi, w) in windows.iter().enumerate() {
        let y_hat = protocol::sensor_encode(w, &phi, &q)?;
        let package = protocol::PublicRecoveryPackage::new(a_star.clone(), y_hat)?;
        let recovery = protocol::cloud_recover(&package, choice, &params)?;
        if !recovery.converged {
            eprintln!(
                "notice: window {wi}: solver stopped above the residual target (residual {})",
                recovery.residual_norm
            );
        }
        let dec = protocol::user_decrypt(&recovery.cipher, &p, &dict)?;
        let report = metrics::quality_report(&w.samples().view(), &dec.samples.view())?;
        for i in 0..w.len() {
            recon_rows.push_str(&format!("{wi},{i},{},{}\n", w.samples()[i], dec.samples[i]));
        }
        quality_rows.push_str(&quality_row(wi, &report));
        println!(
            "window {wi}: prd={}% prdn={}% snr={} dB band={}",
            report.prd, report.prdn, report.snr_db, report.band
        );
        prd_sum += report.prd;

        if let Some(est) = &estimated {
            let wrong = protocol::user_decrypt_estimated(&recovery.cipher, est, &dict)?;
            let wrong_report = metrics::quality_report(&w.samples().view(), &wrong.samples.view())?;
            for i in 0..w.len() {
                wrong_recon_rows
                    .push_str(&format!("{wi},{i},{},{}\n", w.samples()[i], wrong.samples[i]));
            }
            wrong_quality_rows.push_str(&quality_row(wi, &wrong_report));
            println!(
                "window {wi} (wrong key r={}): prd={}% snr={} dB band={}",
                est.r(),
                wrong_report.prd,
                wrong_report.snr_db,
                wrong_report.band
            );
        }
    }

    let recon_path = suffixed(&a.out_prefix, ".recon.csv");
    let quality_path = suffixed(&a.out_prefix, ".quality.csv");
    let recon_columns = "# columns: window,sample,original,reconstructed\n";
    write_text(&recon_path, &format!("{}{}{}", cfg.render(), recon_columns, recon_rows))?;
    write_text(&quality_path, &format!("{}{}{}", cfg.render(), QUALITY_COLUMNS, quality_rows))?;
    println!("wrote {}", recon_path.display());
    println!("wrote {}", quality_path.display());

    if let Some(est) = &estimated {
        let mut wrong_cfg = ExperimentConfig { lines: cfg.lines.clone() };
        wrong_cfg.push("wrong_key_r", est.r());
        wrong_cfg.push("attack_seed", est.seed());
        wrong_cfg.push("frobenius_distance", keys::frobenius_distance(&p, est)?);
        // The wrong-key artifacts always live under their own suffix so an
        // attack run can never clobber the correct-key outputs above.
        let tag = format!(".wrongkey-r{}", est.r());
        let wrong_recon_path = suffixed(&a.out_prefix, &format!("{tag}.recon.csv"));
        let wrong_quality_path = suffixed(&a.out_prefix, &format!("{tag}.quality.csv"));
        write_text(
            &wrong_recon_path,
            &format!("{}{}{}", wrong_cfg.render(), recon_columns, wrong_recon_rows),
        )?;
        write_text(
            &wrong_quality_path,
            &format!("{}{}{}", wrong_cfg.render(), QUALITY_COLUMNS, wrong_quality_rows),
        )?;
        println!("wrote {}", wrong_recon_path.display());
        println!("wrote {}", wrong_quality_path.display());
    }

    println!(
        "compression: m/n={} n/m={} ({}% fewer samples)",
        m as f64 / a.n as f64,
        a.n as f64 / m as f64,
        metrics::compression_percent(m, a.n)?
    );
    if !windows.is_empty() {
        println!("mean prd over {} window(s): {}%", windows.len(), prd_sum / windows.len() as f64);
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// attack
// ---------------------------------------------------------------------------

fn cmd_attack(a: &AttackArgs) -> Result<()> {
    let m = resolve_m(a.n, a.m, a.cr)?;
    let dict = build_dictionary(&a.dict, a.n, a.db10_levels)?;
    let atoms = dict.atoms();
    let phi = build_phi(a.phi, m, a.n, a.phi_seed)?;
    let q = MatrixKey::generate(m, require_seed(a.q_seed, "--q-seed")?)?;
    let p = BipolarKey::generate(atoms, a.alpha, require_seed(a.p_seed, "--p-seed")?)?;
    let a_star = protocol::encode_operator(&phi, &dict, &q, &p)?;
    let params = a.solver.params(m);
    let choice = a.solver.choice();
    if a.attack_seeds.is_empty() {
        return Err(invalid("--attack-seeds must name at least one seed"));
    }

    // The true key is the r=100 baseline; prepend it when missing. One row
    // suffices there (every seed reproduces the key exactly).
    let mut r_list = a.r.clone();
    if !r_list.iter().any(|&r| r == 100.0) {
        r_list.insert(0, 100.0);
    }
    struct Attack {
        r: f64,
        seed: u64,
        key: keys::EstimatedKey,
        distance: f64,
    }
    let mut attacks = Vec::new();
    for &r in &r_list {
        let seeds: &[u64] =
            if r == 100.0 { &a.attack_seeds[..1] } else { &a.attack_seeds[..] };
        for &seed in seeds {
            let key = keys::make_estimated_key(&p, r, seed)?;
            let distance = keys::frobenius_distance(&p, &key)?;
            attacks.push(Attack { r, seed, key, distance });
        }
    }

    let mut cfg = ExperimentConfig::new("attack");
    for (i, path) in a.input.iter().enumerate() {
        cfg.push(&format!("record_{i}"), path.display());
    }
    if let Some(c) = a.column {
        cfg.push("column", c);
    }
    cfg.push("n", a.n);
    cfg.push("m", m);
    cfg.push("cr_m_over_n", m as f64 / a.n as f64);
    cfg.push("cr_n_over_m", a.n as f64 / m as f64);
    cfg.push("dict", &a.dict);
    if a.dict == "db10" {
        cfg.push("db10_levels", a.db10_levels);
    }
    cfg.push("phi", phi_name(a.phi));
    if let Some(s) = a.phi_seed {
        cfg.push("phi_seed", s);
    }
    cfg.push("q_seed", a.q_seed.expect("checked above"));
    cfg.push("p_seed", a.p_seed.expect("checked above"));
    cfg.push("alpha", a.alpha);
    a.solver.describe(&mut cfg, m);
    cfg.push("pad", pad_name(a.pad));
    cfg.push("r_list", r_list.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(","));
    cfg.push(
        "attack_seeds",
        a.attack_seeds.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(","),
    );

    let mut rows = String::new();
    for (ri, path) in a.input.iter().enumerate() {
        let record = load_record(path, a.column, a.rate)?;
        let windows = signal_io::window(&record, a.n, a.pad.into())?;
        if windows.is_empty() {
            eprintln!(
                "notice: {} has only {} samples; no window of length {}",
                path.display(),
                record.samples.len(),
                a.n
            );
        }
        for (wi, w) in windows.iter().enumerate() {
            let y_hat = protocol::sensor_encode(w, &phi, &q)?;
            let package = protocol::PublicRecoveryPackage::new(a_star.clone(), y_hat)?;
            let recovery = protocol::cloud_recover(&package, choice, &params)?;
            for attack in &attacks {
                let dec = protocol::user_decrypt_estimated(&recovery.cipher, &attack.key, &dict)?;
                let report = metrics::quality_report(&w.samples().view(), &dec.samples.view())?;
                rows.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    ri, wi, attack.r, attack.seed, attack.distance, report.prd, report.prdn
                ));
            }
        }
    }

    let columns = "# columns: record,window,r,attack_seed,frobenius_distance,prd,prdn\n";
    write_text(&a.out, &format!("{}{}{}", cfg.render(), columns, rows))?;
    println!("wrote {}", a.out.display());
    Ok(())
}

// ---------------------------------------------------------------------------
// coherence
// ---------------------------------------------------------------------------

fn cmd_coherence(a: &CoherenceArgs) -> Result<()> {
    let ms = parse_m_range(&a.m_range)?;
    let dict = build_dictionary(&a.dict, a.n, a.db10_levels)?;
    let p = BipolarKey::generate(dict.atoms(), a.alpha, require_seed(a.p_seed, "--p-seed")?)?;
    let psi = dict.matrix();
    let psi_p = keys::permute_columns(&psi.view(), &p)?;
    let phi_seed = require_seed(a.phi_seed, "--phi-seed")?;

    let mut cfg = ExperimentConfig::new("coherence");
    cfg.push("n", a.n);
    cfg.push("m_range", &a.m_range);
    cfg.push("dict", &a.dict);
    if a.dict == "db10" {
        cfg.push("db10_levels", a.db10_levels);
    }
    cfg.push("phi_seed", phi_seed);
    cfg.push("p_seed", a.p_seed.expect("checked above"));
    cfg.push("alpha", a.alpha);

    let mut rows = String::new();
    for &m in &ms {
        // Independent matrix per sweep point (same stream would make larger
        // m extend smaller m row-for-row, freezing the max correlation).
        let gaussian = sensing::make_gaussian_phi(m, a.n, phi_seed.wrapping_add(m as u64), true)?;
        let mu_plain = sensing::mutual_coherence(&gaussian, &psi.view())?;
        let mu_encrypted = sensing::mutual_coherence(&gaussian, &psi_p.view())?;
        rows.push_str(&format!("{m},gaussian,{mu_plain},{mu_encrypted}\n"));
        if a.n % m == 0 {
            let dbbd = sensing::make_dbbd_phi(m, a.n)?;
            let mu_plain = sensing::mutual_coherence(&dbbd, &psi.view())?;
            let mu_encrypted = sensing::mutual_coherence(&dbbd, &psi_p.view())?;
            rows.push_str(&format!("{m},dbbd,{mu_plain},{mu_encrypted}\n"));
        } else {
            eprintln!(
                "notice: skipping dbbd at m={m}: {m} does not divide n={}",
                a.n
            );
        }
    }

    let columns = "# columns: m,phi,mu_plain,mu_encrypted\n";
    write_text(&a.out, &format!("{}{}{}", cfg.render(), columns, rows))?;
    println!("wrote {}", a.out.display());
    Ok(())
}

// ---------------------------------------------------------------------------
// learn-dict
// ---------------------------------------------------------------------------

fn cmd_learn_dict(a: &LearnDictArgs) -> Result<()> {
    let seed = require_seed(a.seed, "--seed")?;
    let mut training: Vec<SignalWindow> = Vec::new();
    for path in &a.input {
        let record = load_record(path, a.column, a.rate)?;
        training.extend(signal_io::window(&record, a.window_len, a.pad.into())?);
    }
    let result = dictionaries::learn_mod(&training, a.atoms, a.sparsity, a.iters, seed)?;

    ensure_parent(&a.out)?;
    container::save_dictionary(&a.out, &result.dictionary)?;
    for (i, err) in result.iteration_errors.iter().enumerate() {
        println!("iteration {}: representation error {}", i + 1, err);
    }
    match result.iteration_errors.last() {
        Some(err) => println!("final representation error: {err}"),
        None => println!("no iterations run; wrote the normalized initialization"),
    }
    println!(
        "wrote {} ({} atoms of length {}, fp={})",
        a.out.display(),
        result.dictionary.atoms(),
        result.dictionary.n(),
        fingerprint(&a.out)?
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// metrics
// ---------------------------------------------------------------------------

fn cmd_metrics(a: &MetricsArgs) -> Result<()> {
    let reference = load_record(&a.reference, a.column, None)?;
    let test = load_record(&a.test, a.column, None)?;
    let x = Array1::from(reference.samples);
    let y = Array1::from(test.samples);
    let report = metrics::quality_report(&x.view(), &y.view())?;

    let mut cfg = ExperimentConfig::new("metrics");
    cfg.push("reference", a.reference.display());
    cfg.push("test", a.test.display());
    if let Some(c) = a.column {
        cfg.push("column", c);
    }
    match (a.m, a.n) {
        (Some(m), Some(n)) => {
            cfg.push("m", m);
            cfg.push("n", n);
            cfg.push("cr_m_over_n", m as f64 / n as f64);
            cfg.push("cr_n_over_m", metrics::compression_ratio(m, n)?);
            cfg.push("compression_percent", metrics::compression_percent(m, n)?);
        }
        (None, None) => {}
        _ => return Err(invalid("--m and --n go together")),
    }

    let text = format!("{}{}{}", cfg.render(), QUALITY_COLUMNS, quality_row(a.window_id, &report));
    match &a.out {
        Some(path) => {
            write_text(path, &text)?;
            println!("wrote {}", path.display());
        }
        None => print!("{text}"),
    }
    println!(
        "prd={}% prdn={}% snr={} dB band={}",
        report.prd, report.prdn, report.snr_db, report.band
    );
    if let (Some(m), Some(n)) = (a.m, a.n) {
        println!(
            "compression: m/n={} n/m={} ({}% fewer samples)",
            m as f64 / n as f64,
            metrics::compression_ratio(m, n)?,
            metrics::compression_percent(m, n)?
        );
    }
    Ok(())
}

// ---------------------------------------------------------------------------
