//! Sparsifying dictionaries: orthonormal DCT-II, a periodized orthogonal
//! Daubechies wavelet matrix (20-tap), and MOD dictionary learning.
//!
//! A dictionary is the synthesis operator `x = Ψ s` with atoms as columns.
//! `dct` and `db10` build square orthonormal Ψ, so analysis is just `Ψᵀ x`;
//! learned dictionaries have unit-norm columns but are not orthogonal, and
//! their `analyze` is only the adjoint (sparse coding goes through a solver).

use ndarray::{Array1, Array2, ArrayView1};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{dim, invalid, numeric, Result};
use crate::linalg;
use crate::signal_io::SignalWindow;
use crate::solvers::{self, SolverParams};

/// How a dictionary was constructed (also its serialization tag).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DictionaryKind {
    Dct,
    Db10 { levels: u8 },
    Learned,
}

/// Synthesis dictionary: `n`-sample signals, `l` atoms (columns of an n×l matrix).
#[derive(Debug, Clone, PartialEq)]
pub struct Dictionary {
    matrix: Array2<f64>,
    kind: DictionaryKind,
}

/// The 20 low-pass filter taps of the order-10 Daubechies orthogonal wavelet
/// (sum √2, unit energy, orthonormal even shifts — asserted in tests).
pub const DB10_LOWPASS: [f64; 20] = [
    0.026670057900950813,
    0.18817680007762133,
    0.5272011889309198,
    0.6884590394525921,
    0.2811723436604265,
    -0.24984642432648865,
    -0.19594627437659665,
    0.12736934033574265,
    0.09305736460380659,
    -0.07139414716586077,
    -0.02945753682194567,
    0.03321267405893324,
    0.0036065535669883944,
    -0.010733175482979604,
    0.0013953517469940798,
    0.00199240529499085,
    -0.0006858566950046825,
    -0.0001164668549943862,
    0.00009358867000108985,
    -0.000013264203002354869,
];

impl Dictionary {
    /// Wraps an existing matrix as a dictionary (columns are atoms).
    pub fn from_matrix(matrix: Array2<f64>, kind: DictionaryKind) -> Result<Self> {
        if matrix.nrows() == 0 || matrix.ncols() == 0 {
            return Err(invalid("dictionary must have at least one row and column"));
        }
        Ok(Self { matrix, kind })
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }

    pub fn kind(&self) -> DictionaryKind {
        self.kind
    }

    /// Signal length (rows).
    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    /// Number of atoms (columns).
    pub fn atoms(&self) -> usize {
        self.matrix.ncols()
    }

    /// `x = Ψ s`.
    pub fn synthesize(&self, s: &ArrayView1<f64>) -> Result<Array1<f64>> {
        if s.len() != self.atoms() {
            return Err(dim(format!(
                "coefficient length {} does not match atom count {}",
                s.len(),
                self.atoms()
            )));
        }
        Ok(self.matrix.dot(s))
    }

    /// `s = Ψᵀ x` — the exact inverse of [`Self::synthesize`] for the
    /// orthonormal kinds, the plain adjoint otherwise.
    pub fn analyze(&self, x: &ArrayView1<f64>) -> Result<Array1<f64>> {
        if x.len() != self.n() {
            return Err(dim(format!(
                "signal length {} does not match dictionary rows {}",
                x.len(),
                self.n()
            )));
        }
        Ok(self.matrix.t().dot(x))
    }
}

/// Orthonormal DCT-II synthesis matrix:
/// `Ψ[t][k] = c_k · cos(π (2t+1) k / (2n))`, `c_0 = √(1/n)`, `c_k = √(2/n)`.
pub fn make_dct(n: usize) -> Result<Dictionary> {
    if n == 0 {
        return Err(invalid("dictionary size must be positive"));
    }
    let mut m = Array2::<f64>::zeros((n, n));
    let nf = n as f64;
    for k in 0..n {
        let ck = if k == 0 { (1.0 / nf).sqrt() } else { (2.0 / nf).sqrt() };
        for t in 0..n {
            m[[t, k]] =
                ck * (std::f64::consts::PI * (2.0 * t as f64 + 1.0) * k as f64 / (2.0 * nf)).cos();
        }
    }
    Dictionary::from_matrix(m, DictionaryKind::Dct)
}

/// Periodized orthogonal wavelet synthesis matrix from the 20-tap filter,
/// cascaded over `levels` decomposition levels.
///
/// Analysis coefficient layout: `[approx | detail_deepest … detail_1]`.
/// Requires `n` divisible by `2^levels` and every cascade stage at least two
/// filter lengths long (the periodization stays orthogonal only then).
pub fn make_db10(n: usize, levels: u8) -> Result<Dictionary> {
    let taps = DB10_LOWPASS.len(); // 20
    if n == 0 {
        return Err(invalid("dictionary size must be positive"));
    }
    if levels == 0 {
        return Err(invalid("wavelet cascade needs at least one level"));
    }
    if n % (1usize << levels) != 0 {
        return Err(invalid(format!(
            "signal length {n} is not divisible by 2^levels = {}",
            1usize << levels
        )));
    }
    let deepest = n >> (levels - 1);
    if deepest < 2 * taps {
        return Err(invalid(format!(
            "signal length {n} too small for the {taps}-tap filter at {levels} levels \
             (deepest stage {deepest} < {})",
            2 * taps
        )));
    }

    // High-pass by quadrature mirror: g[k] = (−1)^k h[taps−1−k].
    let h = DB10_LOWPASS;
    let mut g = [0.0f64; 20];
    for k in 0..taps {
        g[k] = if k % 2 == 0 { h[taps - 1 - k] } else { -h[taps - 1 - k] };
    }

    // Total analysis operator W: cascade of periodized single-level
    // transforms, each acting on the current approximation block.
    let mut w = Array2::<f64>::eye(n);
    let mut m = n;
    for _ in 0..levels {
        let mut stage = Array2::<f64>::eye(n);
        let half = m / 2;
        for i in 0..m {
            for j in 0..m {
                stage[[i, j]] = 0.0;
            }
        }
        for i in 0..half {
            for k in 0..taps {
                let col = (2 * i + k) % m;
                stage[[i, col]] += h[k];
                stage[[half + i, col]] += g[k];
            }
        }
        w = stage.dot(&w);
        m = half;
    }
    // Synthesis is the transpose of the orthogonal analysis operator.
    Dictionary::from_matrix(w.t().to_owned(), DictionaryKind::Db10 { levels })
}

/// Result of a MOD learning run: the dictionary plus the Frobenius-squared
/// representation error after each iteration's dictionary update.
#[derive(Debug, Clone)]
pub struct ModResult {
    pub dictionary: Dictionary,
    pub iteration_errors: Vec<f64>,
}

/// Method-of-optimal-directions dictionary learning.
///
/// Alternates OMP sparse coding (sparsity `k`) with the closed-form update
/// `D ← X Sᵀ (S Sᵀ + εI)⁻¹` (ε = 1e-8 ridge for rank safety), then
/// re-normalizes atoms. Initial atoms are `l` distinct non-zero training
/// windows (seeded choice), normalized. Deterministic for a fixed seed.
pub fn learn_mod(
    training: &[SignalWindow],
    l: usize,
    k: usize,
    iters: usize,
    seed: u64,
) -> Result<ModResult> {
    const RIDGE: f64 = 1e-8;
    if training.is_empty() {
        return Err(invalid("training set is empty"));
    }
    let n = training[0].len();
    if training.iter().any(|w| w.len() != n) {
        return Err(dim("training windows have differing lengths"));
    }
    if l == 0 || k == 0 {
        return Err(invalid("atom count and target sparsity must be positive"));
    }
    if l > training.len() {
        return Err(invalid(format!(
            "cannot initialize {l} atoms from {} training windows; \
             provide at least as many windows as atoms",
            training.len()
        )));
    }
    if k > l.min(n) {
        return Err(invalid(format!("target sparsity {k} exceeds min(atoms={l}, n={n})")));
    }

    // Seeded pick of l distinct, non-degenerate windows as initial atoms.
    let mut order: Vec<usize> = (0..training.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let mut d = Array2::<f64>::zeros((n, l));
    let mut filled = 0;
    for &idx in &order {
        if filled == l {
            break;
        }
        let w = training[idx].samples();
        let norm = w.dot(w).sqrt();
        if norm > 0.0 {
            for i in 0..n {
                d[[i, filled]] = w[i] / norm;
            }
            filled += 1;
        }
    }
    if filled < l {
        return Err(invalid(
            "degenerate training set: not enough non-zero windows to initialize atoms",
        ));
    }

    let j = training.len();
    let mut x = Array2::<f64>::zeros((n, j));
    for (c, w) in training.iter().enumerate() {
        x.column_mut(c).assign(w.samples());
    }

    let params = SolverParams::with_sparsity(k);
    let mut errors = Vec::with_capacity(iters);
    for _ in 0..iters {
        // Sparse-coding pass.
        let mut s = Array2::<f64>::zeros((l, j));
        for c in 0..j {
            let res = solvers::omp(&d.view(), &x.column(c), &params)?;
            s.column_mut(c).assign(&res.coeffs);
        }
        // Closed-form update: D = X Sᵀ (S Sᵀ + εI)⁻¹, solved per row of D.
        let mut gram = s.dot(&s.t());
        for i in 0..l {
            gram[[i, i]] += RIDGE;
        }
        let chol = linalg::cholesky(&gram.view())
            .ok_or_else(|| numeric("MOD update: coefficient Gram matrix not positive-definite"))?;
        let xs = x.dot(&s.t()); // n×l
        let mut d_new = Array2::<f64>::zeros((n, l));
        for r in 0..n {
            let rhs = xs.row(r).to_owned();
            let sol = linalg::chol_solve(&chol, &rhs.view());
            d_new.row_mut(r).assign(&sol);
        }
        let err = {
            let diff = &x - &d_new.dot(&s);
            diff.iter().map(|v| v * v).sum::<f64>()
        };
        errors.push(err);
        // Normalize atoms; keep the previous atom when an update column dies.
        for a in 0..l {
            let norm = d_new.column(a).dot(&d_new.column(a)).sqrt();
            if norm > 1e-12 {
                let col = d_new.column(a).mapv(|v| v / norm);
                d.column_mut(a).assign(&col);
            }
        }
    }

    Ok(ModResult {
        dictionary: Dictionary::from_matrix(d, DictionaryKind::Learned)?,
        iteration_errors: errors,
    })
}
