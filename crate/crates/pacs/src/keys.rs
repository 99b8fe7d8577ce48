//! Protocol key material.
//!
//! Two independent secrets protect an outsourced recovery job:
//!
//! * [`MatrixKey`] — an m×m Gaussian mixing matrix Q applied to the
//!   measurements and to the recovery operator (`ŷ = Q y`, `Â = Q Φ Ψ`).
//! * [`BipolarKey`] — an L×L bipolar permutation P (one ±α per column) that
//!   scrambles the sparse domain (`A* = Â P`), so the cloud only ever sees
//!   and returns a permuted, sign-flipped, scaled coefficient vector.
//!
//! P is α times an orthonormal matrix: `Pᵀ P = α² I` and `P⁻¹ = (1/α²) Pᵀ`,
//! which keeps decryption exact and cheap. [`EstimatedKey`] models an
//! attacker who knows some percentage of P's columns and guesses the rest;
//! [`frobenius_distance`] measures how far such a guess sits from the truth.
//!
//! Key-space size: an L×L bipolar permutation has `2^L · L!` variants
//! ([`keyspace_bits`]); brute-forcing the sparse support instead costs
//! `C(L, k)` least-squares trials ([`sparse_search_log10_trials`]).

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{dim, invalid, numeric, Result};
use crate::linalg;

// ---------------------------------------------------------------------------
// Bipolar permutation key P
// ---------------------------------------------------------------------------

/// L×L bipolar permutation key: column j holds a single entry `sign_j · α`
/// at row `perm[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BipolarKey {
    alpha: f64,
    /// Row index of the nonzero in each column.
    perm: Vec<u32>,
    /// `true` = +α, `false` = −α, per column.
    signs: Vec<bool>,
    /// Generation seed (metadata; identity/explicit keys store 0).
    seed: u64,
}

impl BipolarKey {
    /// Uniformly random permutation and signs from a seeded stream.
    pub fn generate(n: usize, alpha: f64, seed: u64) -> Result<Self> {
        validate_key_shape(n, alpha)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut perm: Vec<u32> = (0..n as u32).collect();
        perm.shuffle(&mut rng);
        let signs: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
        Ok(Self { alpha, perm, signs, seed })
    }

    /// `α · I` — the "no scrambling" key used to compare secure and ordinary
    /// pipelines on identical footing.
    pub fn identity(n: usize, alpha: f64) -> Result<Self> {
        validate_key_shape(n, alpha)?;
        Ok(Self {
            alpha,
            perm: (0..n as u32).collect(),
            signs: vec![true; n],
            seed: 0,
        })
    }

    /// Builds a key from explicit parts; `perm` must be a permutation of
    /// `0..n` (each row used exactly once).
    pub fn from_parts(perm: Vec<u32>, signs: Vec<bool>, alpha: f64, seed: u64) -> Result<Self> {
        let n = perm.len();
        validate_key_shape(n, alpha)?;
        if signs.len() != n {
            return Err(dim(format!("{} signs for {n} columns", signs.len())));
        }
        let mut seen = vec![false; n];
        for &r in &perm {
            let r = r as usize;
            if r >= n || seen[r] {
                return Err(invalid("perm is not a permutation: row index repeated or out of range"));
            }
            seen[r] = true;
        }
        Ok(Self { alpha, perm, signs, seed })
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn perm(&self) -> &[u32] {
        &self.perm
    }

    pub fn signs(&self) -> &[bool] {
        &self.signs
    }

    /// Dense P (test/diagnostic use; applications go through [`Self::apply`]).
    pub fn dense(&self) -> Array2<f64> {
        let n = self.n();
        let mut p = Array2::<f64>::zeros((n, n));
        for j in 0..n {
            p[[self.perm[j] as usize, j]] = self.signed_alpha(j);
        }
        p
    }

    fn signed_alpha(&self, j: usize) -> f64 {
        if self.signs[j] {
            self.alpha
        } else {
            -self.alpha
        }
    }

    /// `P z` — decryption direction (recovers `s` from the intermediate
    /// cipher `z = P⁻¹ s`).
    pub fn apply(&self, z: &ArrayView1<f64>) -> Result<Array1<f64>> {
        let n = self.n();
        if z.len() != n {
            return Err(dim(format!("vector length {} does not match key size {n}", z.len())));
        }
        let mut out = Array1::<f64>::zeros(n);
        for j in 0..n {
            out[self.perm[j] as usize] = self.signed_alpha(j) * z[j];
        }
        Ok(out)
    }

    /// `P⁻¹ y = (1/α²) Pᵀ y` — encryption direction in the sparse domain.
    pub fn apply_inverse(&self, y: &ArrayView1<f64>) -> Result<Array1<f64>> {
        let n = self.n();
        if y.len() != n {
            return Err(dim(format!("vector length {} does not match key size {n}", y.len())));
        }
        let mut out = Array1::<f64>::zeros(n);
        for j in 0..n {
            let v = y[self.perm[j] as usize] / self.alpha;
            out[j] = if self.signs[j] { v } else { -v };
        }
        Ok(out)
    }

    /// The inverse key as a bipolar key in its own right:
    /// `P⁻¹ = (1/α²) Pᵀ` is again one-nonzero-per-column with weight `1/α`.
    pub fn inverse(&self) -> Self {
        let n = self.n();
        let mut perm = vec![0u32; n];
        let mut signs = vec![true; n];
        for j in 0..n {
            let row = self.perm[j] as usize;
            perm[row] = j as u32;
            signs[row] = self.signs[j];
        }
        Self { alpha: 1.0 / self.alpha, perm, signs, seed: self.seed }
    }
}

fn validate_key_shape(n: usize, alpha: f64) -> Result<()> {
    if n == 0 {
        return Err(invalid("key size must be positive"));
    }
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(invalid(format!("alpha must be a positive real, got {alpha}")));
    }
    Ok(())
}

/// `A · P`: gathers and sign-scales columns of `a` (column j of the result is
/// `sign_j α · a[:, perm[j]]`). This is how the recovery operator is
/// encrypted without ever materializing dense P.
pub fn permute_columns(a: &ArrayView2<f64>, key: &BipolarKey) -> Result<Array2<f64>> {
    if a.ncols() != key.n() {
        return Err(dim(format!(
            "matrix has {} columns but key size is {}",
            a.ncols(),
            key.n()
        )));
    }
    let mut out = Array2::<f64>::zeros((a.nrows(), a.ncols()));
    for j in 0..key.n() {
        let src = a.column(key.perm[j] as usize);
        let w = key.signed_alpha(j);
        let mut dst = out.column_mut(j);
        for i in 0..a.nrows() {
            dst[i] = w * src[i];
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Gaussian mixing key Q
// ---------------------------------------------------------------------------

/// Where a mixing key came from (controls compact serialization).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QProvenance {
    /// Drawn from the seeded generator; can be rebuilt from `(m, seed)`.
    Seeded,
    /// `I` — the "no mixing" key.
    Identity,
    /// Loaded or constructed from explicit entries.
    Explicit,
}

/// m×m Gaussian mixing key Q, entries i.i.d. N(0, (1/m)²), regenerated until
/// comfortably invertible (1-norm condition estimate < 1e8).
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixKey {
    matrix: Array2<f64>,
    seed: u64,
    condition: f64,
    provenance: QProvenance,
}

impl MatrixKey {
    /// Draws Q from the seed; if a draw is ill-conditioned the seed is
    /// advanced and the draw repeated (bounded at 16 attempts, deterministic).
    pub fn generate(m: usize, seed: u64) -> Result<Self> {
        if m == 0 {
            return Err(invalid("key size must be positive"));
        }
        const MAX_ATTEMPTS: u64 = 16;
        const COND_LIMIT: f64 = 1e8;
        let normal = Normal::new(0.0, 1.0 / m as f64).expect("finite std");
        for attempt in 0..MAX_ATTEMPTS {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt));
            let mut q = Array2::<f64>::zeros((m, m));
            for i in 0..m {
                for j in 0..m {
                    q[[i, j]] = normal.sample(&mut rng);
                }
            }
            if let Some(cond) = linalg::cond_1(&q.view()) {
                if cond < COND_LIMIT {
                    return Ok(Self {
                        matrix: q,
                        seed,
                        condition: cond,
                        provenance: QProvenance::Seeded,
                    });
                }
            }
        }
        Err(numeric(format!(
            "no invertible mixing key within {MAX_ATTEMPTS} attempts from seed {seed}"
        )))
    }

    /// `I` — used to run the ordinary (unencrypted) pipeline through the
    /// same code path as the secure one.
    pub fn identity(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(invalid("key size must be positive"));
        }
        Ok(Self {
            matrix: Array2::eye(m),
            seed: 0,
            condition: 1.0,
            provenance: QProvenance::Identity,
        })
    }

    /// Wraps explicit entries (validates invertibility).
    pub fn from_matrix(matrix: Array2<f64>, seed: u64) -> Result<Self> {
        if matrix.nrows() == 0 || matrix.nrows() != matrix.ncols() {
            return Err(dim("mixing key must be square and non-empty"));
        }
        let cond = linalg::cond_1(&matrix.view())
            .ok_or_else(|| numeric("mixing key matrix is singular"))?;
        Ok(Self { matrix, seed, condition: cond, provenance: QProvenance::Explicit })
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }

    pub fn m(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn provenance(&self) -> QProvenance {
        self.provenance
    }

    /// Dense Q⁻¹ (the user needs it only for diagnostics; decryption itself
    /// never inverts Q because the cloud solves against `Q Φ Ψ P` directly).
    pub fn inverse(&self) -> Result<Array2<f64>> {
        let lu = linalg::lu_factor(&self.matrix.view())
            .ok_or_else(|| numeric("mixing key matrix is singular"))?;
        Ok(lu.inverse())
    }
}

// ---------------------------------------------------------------------------
// Estimated (attack) keys E^r
// ---------------------------------------------------------------------------

/// An attacker's estimate of P that copies `⌊r·L/100⌋` true columns and
/// fills each remaining column with a single ±α entry at a random row.
/// Unlike a true key, guessed rows may collide, so E^r is generally not a
/// permutation.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatedKey {
    alpha: f64,
    /// Row of the single nonzero per column.
    rows: Vec<u32>,
    /// `true` = +α per column.
    signs: Vec<bool>,
    /// Which columns were copied from the true key.
    copied: Vec<bool>,
    r: f64,
    seed: u64,
}

impl EstimatedKey {
    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn copied_columns(&self) -> usize {
        self.copied.iter().filter(|c| **c).count()
    }

    /// Dense E^r (diagnostics only).
    pub fn dense(&self) -> Array2<f64> {
        let n = self.n();
        let mut e = Array2::<f64>::zeros((n, n));
        for j in 0..n {
            let w = if self.signs[j] { self.alpha } else { -self.alpha };
            e[[self.rows[j] as usize, j]] = w;
        }
        e
    }

    /// `E z` — wrong-key decryption. Colliding columns accumulate.
    pub fn apply(&self, z: &ArrayView1<f64>) -> Result<Array1<f64>> {
        let n = self.n();
        if z.len() != n {
            return Err(dim(format!("vector length {} does not match key size {n}", z.len())));
        }
        let mut out = Array1::<f64>::zeros(n);
        for j in 0..n {
            let w = if self.signs[j] { self.alpha } else { -self.alpha };
            out[self.rows[j] as usize] += w * z[j];
        }
        Ok(out)
    }
}

fn mix_seed(seed: u64, column: usize) -> u64 {
    // SplitMix64 finalizer over (seed, column) — decorrelates per-column
    // guess streams so estimates for different r but one seed agree on the
    // columns they share.
    let mut z = seed ^ (column as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Builds an estimate that knows `r` percent of the true key: `⌊r·L/100⌋`
/// uniformly chosen columns are copied verbatim, every other column gets a
/// single ±α at a uniformly random row.
///
/// For one `seed`, the copied sets are nested across `r` (they are prefixes
/// of one seeded shuffle) and shared guessed columns get identical guesses,
/// so degradation experiments sweep r without re-rolling the attacker.
pub fn make_estimated_key(p: &BipolarKey, r: f64, seed: u64) -> Result<EstimatedKey> {
    if !(0.0..=100.0).contains(&r) || !r.is_finite() {
        return Err(invalid(format!("r must be a percentage in [0, 100], got {r}")));
    }
    let n = p.n();
    let copied_count = ((r * n as f64) / 100.0).floor() as usize;
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let mut copied = vec![false; n];
    for &j in order.iter().take(copied_count) {
        copied[j] = true;
    }
    let mut rows = vec![0u32; n];
    let mut signs = vec![true; n];
    for j in 0..n {
        if copied[j] {
            rows[j] = p.perm()[j];
            signs[j] = p.signs()[j];
        } else {
            let mut col_rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, j));
            rows[j] = col_rng.random_range(0..n as u32);
            signs[j] = col_rng.random_bool(0.5);
        }
    }
    Ok(EstimatedKey { alpha: p.alpha(), rows, signs, copied, r, seed })
}

/// Frobenius distance `‖P − E‖_F` between a true key and an estimate.
///
/// Column-wise: a correct guess contributes 0; a wrong row contributes
/// `α_P² + α_E²` (two disjoint nonzeros); the right row with the wrong sign
/// contributes `(α_P + α_E)²`.
pub fn frobenius_distance(p: &BipolarKey, e: &EstimatedKey) -> Result<f64> {
    if p.n() != e.n() {
        return Err(dim(format!("key sizes differ: {} vs {}", p.n(), e.n())));
    }
    let (ap, ae) = (p.alpha(), e.alpha());
    let mut sum = 0.0;
    for j in 0..p.n() {
        let same_row = p.perm()[j] == e.rows[j];
        let same_sign = p.signs()[j] == e.signs[j];
        sum += match (same_row, same_sign) {
            (true, true) => (ap - ae) * (ap - ae),
            (true, false) => (ap + ae) * (ap + ae),
            (false, _) => ap * ap + ae * ae,
        };
    }
    Ok(sum.sqrt())
}

/// Frobenius distance between two dense matrices (test oracle for
/// [`frobenius_distance`]).
pub fn frobenius_dense(a: &ArrayView2<f64>, b: &ArrayView2<f64>) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(dim("matrices must share a shape"));
    }
    Ok(a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt())
}

// ---------------------------------------------------------------------------
// Key-space arithmetic
// ---------------------------------------------------------------------------

/// `log₁₀(n!)` by direct summation (exact to f64 rounding for the sizes here).
pub fn log10_factorial(n: u64) -> f64 {
    (2..=n).map(|k| (k as f64).log10()).sum()
}

/// Size of the bipolar-permutation key space, `log₂(2ⁿ · n!)`, in bits.
pub fn keyspace_bits(n: u64) -> f64 {
    n as f64 + log10_factorial(n) / std::f64::consts::LOG10_2
}

/// `log₁₀ C(l, k)` — support candidates an attacker must try to brute-force
/// a k-sparse recovery instead of stealing the key (coefficient values per
/// support come from a least-squares fit, so only supports are enumerated).
pub fn sparse_search_log10_trials(l: u64, k: u64) -> f64 {
    let k = k.min(l);
    // log10 C(l,k) = Σ_{i=0}^{k-1} log10(l−i) − log10(k−i)
    let mut log10_c = 0.0;
    for i in 0..k {
        log10_c += ((l - i) as f64).log10() - ((k - i) as f64).log10();
    }
    log10_c
}

/// Formats a base-10 log as `m.De±E` scientific notation (e.g. `4.8e102`).
pub fn format_log10(log10: f64) -> String {
    let mut exp = log10.floor();
    let mut mant = 10f64.powf(log10 - exp);
    // Rounding the mantissa to one decimal can carry (9.97 → 10.0).
    if mant >= 9.95 {
        mant /= 10.0;
        exp += 1.0;
    }
    format!("{:.1}e{}", mant, exp as i64)
}
