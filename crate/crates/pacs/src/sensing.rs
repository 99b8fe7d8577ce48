//! Measurement matrices and incoherence diagnostics.
//!
//! Two sensing families: dense i.i.d. Gaussian Φ with entry standard
//! deviation 1/m (seeded, reproducible), and the binary deterministic
//! block-diagonal (DBBD) matrix whose row i carries n/m consecutive ones.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{dim, invalid, Result};

/// How a measurement matrix was constructed (also its serialization tag).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiKind {
    Gaussian { seed: u64 },
    Dbbd,
}

/// An m×n sensing operator `y = Φ x`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementMatrix {
    matrix: Array2<f64>,
    kind: PhiKind,
}

impl MeasurementMatrix {
    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }

    pub fn kind(&self) -> PhiKind {
        self.kind
    }

    pub fn m(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n(&self) -> usize {
        self.matrix.ncols()
    }

    pub(crate) fn from_parts(matrix: Array2<f64>, kind: PhiKind) -> Self {
        Self { matrix, kind }
    }
}

/// Dense Gaussian sensing matrix, entries i.i.d. N(0, (1/m)²) — the 1/m is a
/// standard deviation. Requires m < n (compression); pass `allow_square` to
/// permit m == n in experiments that isolate the encryption layer.
pub fn make_gaussian_phi(
    m: usize,
    n: usize,
    seed: u64,
    allow_square: bool,
) -> Result<MeasurementMatrix> {
    if m == 0 || n == 0 {
        return Err(invalid("measurement matrix dimensions must be positive"));
    }
    if m > n || (m == n && !allow_square) {
        return Err(invalid(format!(
            "measurements m = {m} must be fewer than signal length n = {n} \
             (or equal, when square sensing is explicitly allowed)"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0 / m as f64).expect("finite std");
    let mut matrix = Array2::<f64>::zeros((m, n));
    for i in 0..m {
        for j in 0..n {
            matrix[[i, j]] = normal.sample(&mut rng);
        }
    }
    Ok(MeasurementMatrix { matrix, kind: PhiKind::Gaussian { seed } })
}

/// Binary deterministic block-diagonal matrix: row i has ones exactly at
/// columns `[i·n/m, (i+1)·n/m)`, so `Φ Φᵀ = (n/m) I`. Requires `m | n`.
pub fn make_dbbd_phi(m: usize, n: usize) -> Result<MeasurementMatrix> {
    if m == 0 || n == 0 {
        return Err(invalid("measurement matrix dimensions must be positive"));
    }
    if n % m != 0 {
        return Err(invalid(format!(
            "block sensing needs m to divide n; {m} does not divide {n}"
        )));
    }
    let block = n / m;
    let mut matrix = Array2::<f64>::zeros((m, n));
    for i in 0..m {
        for j in i * block..(i + 1) * block {
            matrix[[i, j]] = 1.0;
        }
    }
    Ok(MeasurementMatrix { matrix, kind: PhiKind::Dbbd })
}

/// `y = Φ x`.
pub fn sense(phi: &MeasurementMatrix, x: &ArrayView1<f64>) -> Result<Array1<f64>> {
    if x.len() != phi.n() {
        return Err(dim(format!(
            "signal length {} does not match sensing columns {}",
            x.len(),
            phi.n()
        )));
    }
    Ok(phi.matrix.dot(x))
}

/// Mutual coherence between sensing rows and dictionary atoms:
/// `μ = √N · max_{i,j} |⟨φ_i, ψ_j⟩| / (‖φ_i‖‖ψ_j‖)`, N the signal length.
///
/// μ lies in [1, √N] for an orthonormal Ψ, and is invariant under bipolar
/// permutation of the atoms (signs and column order cancel in the ratio).
pub fn mutual_coherence(phi: &MeasurementMatrix, psi: &ArrayView2<f64>) -> Result<f64> {
    let n = phi.n();
    if psi.nrows() != n {
        return Err(dim(format!(
            "dictionary rows {} do not match sensing columns {n}",
            psi.nrows()
        )));
    }
    let mut row_norms = Vec::with_capacity(phi.m());
    for i in 0..phi.m() {
        let r = phi.matrix.row(i);
        let norm = r.dot(&r).sqrt();
        if norm == 0.0 {
            return Err(invalid(format!("sensing row {i} is zero; coherence undefined")));
        }
        row_norms.push(norm);
    }
    let mut col_norms = Vec::with_capacity(psi.ncols());
    for j in 0..psi.ncols() {
        let c = psi.column(j);
        let norm = c.dot(&c).sqrt();
        if norm == 0.0 {
            return Err(invalid(format!("dictionary atom {j} is zero; coherence undefined")));
        }
        col_norms.push(norm);
    }
    // products[i][j] = ⟨φ_i, ψ_j⟩
    let products = phi.matrix.dot(psi);
    let mut best = 0.0f64;
    for i in 0..phi.m() {
        for j in 0..psi.ncols() {
            let v = products[[i, j]].abs() / (row_norms[i] * col_norms[j]);
            if v > best {
                best = v;
            }
        }
    }
    Ok((n as f64).sqrt() * best)
}

/// Min and max of `‖A s‖₂²` over the given unit-norm samples — an empirical
/// isometry surrogate for the total dictionary `A = ΦΨ`.
///
/// Every sample must be unit-norm to 1e-9 (the spread is only meaningful on
/// the sphere).
pub fn norm_spread(a: &ArrayView2<f64>, samples: &[Array1<f64>]) -> Result<(f64, f64)> {
    if samples.is_empty() {
        return Err(invalid("norm spread needs at least one sample"));
    }
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for (idx, s) in samples.iter().enumerate() {
        if s.len() != a.ncols() {
            return Err(dim(format!(
                "sample {idx} has length {}, expected {}",
                s.len(),
                a.ncols()
            )));
        }
        let norm = s.dot(s).sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(invalid(format!(
                "sample {idx} is not unit-norm (‖s‖ = {norm}); spread is defined on the sphere"
            )));
        }
        let v = a.dot(s);
        let e = v.dot(&v);
        min = min.min(e);
        max = max.max(e);
    }
    Ok((min, max))
}

/// Seeded k-sparse unit-norm sample vectors (Gaussian values on a random
/// support, then normalized) for [`norm_spread`].
pub fn sparse_unit_samples(l: usize, k: usize, count: usize, seed: u64) -> Result<Vec<Array1<f64>>> {
    if l == 0 || k == 0 || k > l {
        return Err(invalid(format!("need 0 < k ≤ l, got k = {k}, l = {l}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).expect("unit std");
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut support: Vec<usize> = (0..l).collect();
        // Partial Fisher–Yates: the first k entries form the support.
        for i in 0..k {
            let j = rng.random_range(i..l);
            support.swap(i, j);
        }
        let mut s = Array1::<f64>::zeros(l);
        for &pos in &support[..k] {
            s[pos] = normal.sample(&mut rng);
        }
        let norm = s.dot(&s).sqrt();
        if norm == 0.0 {
            continue; // astronomically unlikely; redraw
        }
        out.push(s.mapv(|v| v / norm));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dictionaries::make_dct;
    use ndarray::array;

    #[test]
    fn gaussian_moments_match_declared_law() {
        let m = 128;
        let n = 512;
        let phi = make_gaussian_phi(m, n, 7, false).unwrap();
        let count = (m * n) as f64;
        let mean: f64 = phi.matrix().iter().sum::<f64>() / count;
        let sigma = 1.0 / m as f64;
        let band = 3.0 * sigma / count.sqrt();
        assert!(mean.abs() < band, "mean {mean} outside ±{band}");
        let var: f64 = phi.matrix().iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / count;
        assert!(
            (var - sigma * sigma).abs() < 0.05 * sigma * sigma,
            "variance {var} vs {}",
            sigma * sigma
        );
    }

    #[test]
    fn gaussian_is_deterministic_per_seed() {
        let a = make_gaussian_phi(16, 64, 3, false).unwrap();
        let b = make_gaussian_phi(16, 64, 3, false).unwrap();
        assert_eq!(a.matrix(), b.matrix());
        let c = make_gaussian_phi(16, 64, 4, false).unwrap();
        assert_ne!(a.matrix(), c.matrix());
    }

    #[test]
    fn gaussian_square_needs_explicit_permission() {
        assert!(make_gaussian_phi(64, 64, 0, false).is_err());
        assert!(make_gaussian_phi(65, 64, 0, true).is_err());
        assert!(make_gaussian_phi(64, 64, 0, true).is_ok());
    }

    #[test]
    fn dbbd_smallest_case_and_row_structure() {
        let phi = make_dbbd_phi(2, 4).unwrap();
        let expect = array![[1.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 1.0]];
        assert_eq!(phi.matrix(), &expect);

        let phi = make_dbbd_phi(128, 512).unwrap();
        let ones = Array1::from_elem(512, 1.0);
        let sums = sense(&phi, &ones.view()).unwrap();
        for v in &sums {
            assert_eq!(*v, 4.0);
        }
        // Orthogonal rows: Φ Φᵀ = (n/m) I, exactly (integer arithmetic).
        let gram = phi.matrix().dot(&phi.matrix().t());
        for i in 0..128 {
            for j in 0..128 {
                let expect = if i == j { 4.0 } else { 0.0 };
                assert_eq!(gram[[i, j]], expect);
            }
        }
    }

    #[test]
    fn dbbd_requires_divisibility() {
        assert!(make_dbbd_phi(3, 8).is_err());
    }

    #[test]
    fn sense_matches_hand_computation() {
        let phi = make_dbbd_phi(2, 4).unwrap();
        let y = sense(&phi, &array![1.0, 2.0, 3.0, 4.0].view()).unwrap();
        assert_eq!(y, array![3.0, 7.0]);
        let zero = sense(&phi, &Array1::zeros(4).view()).unwrap();
        assert!(zero.iter().all(|v| *v == 0.0));
        assert!(sense(&phi, &Array1::zeros(5).view()).is_err());
    }

    #[test]
    fn sense_is_linear() {
        let phi = make_gaussian_phi(8, 32, 11, false).unwrap();
        let a: Array1<f64> = (0..32).map(|i| (i as f64 * 0.37).sin()).collect();
        let b: Array1<f64> = (0..32).map(|i| (i as f64 * 0.81).cos()).collect();
        let combined = &a * 2.5 + &b * -1.25;
        let lhs = sense(&phi, &combined.view()).unwrap();
        let rhs = sense(&phi, &a.view()).unwrap() * 2.5 + sense(&phi, &b.view()).unwrap() * -1.25;
        for i in 0..8 {
            assert!((lhs[i] - rhs[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn coherence_of_identity_pairs() {
        // Identity vs identity: perfectly coherent, μ = √N.
        let eye = MeasurementMatrix::from_parts(Array2::eye(4), PhiKind::Dbbd);
        let mu = mutual_coherence(&eye, &Array2::eye(4).view()).unwrap();
        assert!((mu - 2.0).abs() < 1e-12);

        // Identity rows vs DCT atoms: maximally incoherent, μ = 1.
        let eye2 = MeasurementMatrix::from_parts(Array2::eye(2), PhiKind::Dbbd);
        let dct = make_dct(2).unwrap();
        let mu = mutual_coherence(&eye2, &dct.matrix().view()).unwrap();
        assert!((mu - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coherence_stays_in_range() {
        let n = 100;
        let dct = make_dct(n).unwrap();
        for (phi, label) in [
            (make_gaussian_phi(20, n, 5, false).unwrap(), "gaussian"),
            (make_dbbd_phi(20, n).unwrap(), "dbbd"),
        ] {
            let mu = mutual_coherence(&phi, &dct.matrix().view()).unwrap();
            assert!(mu >= 1.0 - 1e-12 && mu <= (n as f64).sqrt() + 1e-12, "{label}: μ = {mu}");
        }
    }

    #[test]
    fn coherence_rejects_degenerate_inputs() {
        let mut z = Array2::<f64>::eye(3);
        z.row_mut(1).fill(0.0);
        let phi = MeasurementMatrix::from_parts(z, PhiKind::Dbbd);
        assert!(mutual_coherence(&phi, &Array2::eye(3).view()).is_err());

        let eye = MeasurementMatrix::from_parts(Array2::eye(3), PhiKind::Dbbd);
        let mut psi = Array2::<f64>::eye(3);
        psi.column_mut(2).fill(0.0);
        assert!(mutual_coherence(&eye, &psi.view()).is_err());
    }

    #[test]
    fn norm_spread_of_orthonormal_matrix_is_one() {
        let dct = make_dct(32).unwrap();
        let samples = sparse_unit_samples(32, 4, 50, 9).unwrap();
        let (lo, hi) = norm_spread(&dct.matrix().view(), &samples).unwrap();
        assert!((lo - 1.0).abs() < 1e-12);
        assert!((hi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn norm_spread_zero_matrix_and_validation() {
        let z = Array2::<f64>::zeros((4, 8));
        let samples = sparse_unit_samples(8, 2, 10, 1).unwrap();
        let (lo, hi) = norm_spread(&z.view(), &samples).unwrap();
        assert_eq!((lo, hi), (0.0, 0.0));

        let bad = vec![Array1::from_elem(8, 1.0)]; // ‖s‖ = √8
        assert!(norm_spread(&z.view(), &bad).is_err());
        assert!(norm_spread(&z.view(), &[]).is_err());
    }

    #[test]
    fn sparse_samples_have_requested_support() {
        let samples = sparse_unit_samples(20, 3, 25, 4).unwrap();
        assert_eq!(samples.len(), 25);
        for s in &samples {
            let nnz = s.iter().filter(|v| **v != 0.0).count();
            assert!(nnz <= 3 && nnz >= 1);
            assert!((s.dot(s) - 1.0).abs() < 1e-12);
        }
    }
}
