//! Sparse recovery solvers.
//!
//! All solvers take a flat operator `A` (m×L) and measurements `y` (m) and
//! look for a sparse `z` with `A z ≈ y`. In the encrypted protocol `A` is the
//! scrambled operator `A* = Q Φ Ψ P` and the returned `z` is the intermediate
//! cipher `P⁻¹ s` — the solvers themselves are key-agnostic.
//!
//! * [`omp`] — orthogonal matching pursuit: greedy atom selection with an
//!   exact least-squares re-fit each round. Fast, needs a sparsity budget.
//! * [`sl0`] — smoothed-ℓ0 descent: relaxes the ℓ0 count with shrinking
//!   Gaussian kernels; every step commutes with bipolar column scrambling,
//!   so encrypted and plain recoveries agree to rounding error.
//! * [`brute_force`] — exhaustive support search, feasible only for toy
//!   sizes; exists to demonstrate why attacking sparsity head-on is hopeless.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use std::fmt;

use crate::error::{dim, invalid, numeric, Result};
use crate::keys::{format_log10, sparse_search_log10_trials};
use crate::linalg;

/// Parameters specific to the smoothed-ℓ0 solver.
#[derive(Debug, Clone, PartialEq)]
pub struct Sl0Params {
    /// Stop once the kernel width falls below this; `None` means
    /// `1e-4 · σ₀` where `σ₀` is derived from the initial guess.
    pub sigma_min: Option<f64>,
    /// Geometric decay factor applied to σ between outer rounds, in (0, 1).
    pub sigma_decrease: f64,
    /// Gradient step size.
    pub mu: f64,
    /// Gradient/projection steps per σ level.
    pub inner_iters: usize,
}

impl Default for Sl0Params {
    fn default() -> Self {
        Self { sigma_min: None, sigma_decrease: 0.5, mu: 2.0, inner_iters: 3 }
    }
}

/// Shared solver configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverParams {
    /// Atom budget for [`omp`] and support-size cap for [`brute_force`].
    pub max_sparsity: usize,
    /// Relative residual (`‖Az − y‖ / ‖y‖`) below which a solve counts as
    /// converged.
    pub residual_tol: f64,
    pub sl0: Sl0Params,
}

impl SolverParams {
    /// Defaults with the given sparsity budget.
    pub fn with_sparsity(max_sparsity: usize) -> Self {
        Self { max_sparsity, residual_tol: 1e-6, sl0: Sl0Params::default() }
    }
}

/// Which algorithm to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverChoice {
    Omp,
    Sl0,
    BruteForce,
}

impl fmt::Display for SolverChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverChoice::Omp => "omp",
            SolverChoice::Sl0 => "sl0",
            SolverChoice::BruteForce => "brute_force",
        })
    }
}

impl std::str::FromStr for SolverChoice {
    type Err = crate::error::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "omp" => Ok(SolverChoice::Omp),
            "sl0" => Ok(SolverChoice::Sl0),
            "brute_force" | "brute-force" => Ok(SolverChoice::BruteForce),
            other => Err(invalid(format!(
                "unknown solver '{other}' (expected omp, sl0, or brute_force)"
            ))),
        }
    }
}

/// Outcome of a recovery attempt.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    /// Recovered coefficient vector (length L).
    pub coeffs: Array1<f64>,
    /// Final `‖A·coeffs − y‖₂`.
    pub residual_norm: f64,
    /// OMP: atoms selected; SL0: σ levels processed; brute force: supports
    /// evaluated.
    pub iterations: usize,
    /// Whether the relative-residual target was met.
    pub converged: bool,
    pub solver: SolverChoice,
    /// Human-readable diagnostics (e.g. early stop reasons).
    pub note: Option<String>,
}

/// Dispatches to the chosen solver.
pub fn solve(
    a: &ArrayView2<f64>,
    y: &ArrayView1<f64>,
    choice: SolverChoice,
    params: &SolverParams,
) -> Result<SolveResult> {
    match choice {
        SolverChoice::Omp => omp(a, y, params),
        SolverChoice::Sl0 => sl0(a, y, params),
        SolverChoice::BruteForce => brute_force(a, y, params),
    }
}

fn check_system(a: &ArrayView2<f64>, y: &ArrayView1<f64>) -> Result<()> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Err(dim("operator must be non-empty"));
    }
    if a.nrows() != y.len() {
        return Err(dim(format!(
            "operator has {} rows but measurement vector has {} entries",
            a.nrows(),
            y.len()
        )));
    }
    Ok(())
}

/// Least-squares fit of `y` on the listed columns of `a`.
/// Returns the support coefficients and the residual vector, or `None` if
/// the submatrix is numerically rank-deficient.
fn fit_support(
    a: &ArrayView2<f64>,
    y: &ArrayView1<f64>,
    support: &[usize],
) -> Option<(Array1<f64>, Array1<f64>)> {
    if support.is_empty() {
        return Some((Array1::zeros(0), y.to_owned()));
    }
    let m = a.nrows();
    let mut sub = Array2::<f64>::zeros((m, support.len()));
    for (c, &j) in support.iter().enumerate() {
        sub.column_mut(c).assign(&a.column(j));
    }
    let coeffs = linalg::lstsq_qr(&sub.view(), y)?;
    let residual = y - &sub.dot(&coeffs);
    Some((coeffs, residual))
}

fn norm2(v: &ArrayView1<f64>) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn scatter(n: usize, support: &[usize], coeffs: &Array1<f64>) -> Array1<f64> {
    let mut z = Array1::<f64>::zeros(n);
    for (c, &j) in support.iter().enumerate() {
        z[j] = coeffs[c];
    }
    z
}

/// Orthogonal matching pursuit.
///
/// Each round picks the column with the largest normalized correlation
/// `|⟨a_j, r⟩| / ‖a_j‖` against the current residual (lowest index wins
/// ties), then re-solves the least-squares fit over all selected columns.
/// The selection path is prefix-stable: rerunning with a larger
/// `max_sparsity` extends, never revises, a shorter run.
pub fn omp(a: &ArrayView2<f64>, y: &ArrayView1<f64>, params: &SolverParams) -> Result<SolveResult> {
    check_system(a, y)?;
    if params.max_sparsity == 0 {
        return Err(invalid("max_sparsity must be at least 1"));
    }
    let (m, l) = (a.nrows(), a.ncols());
    let budget = params.max_sparsity.min(m).min(l);
    let y_norm = norm2(y);
    let target = params.residual_tol * y_norm;

    let col_norms: Vec<f64> = (0..l).map(|j| norm2(&a.column(j))).collect();

    let mut support: Vec<usize> = Vec::with_capacity(budget);
    let mut in_support = vec![false; l];
    let mut coeffs = Array1::<f64>::zeros(0);
    let mut residual = y.to_owned();
    let mut note = None;

    while support.len() < budget {
        if norm2(&residual.view()) <= target {
            break;
        }
        // Score every unselected, non-degenerate column.
        let mut best_j = None;
        let mut best_score = 0.0;
        for j in 0..l {
            if in_support[j] || col_norms[j] <= f64::MIN_POSITIVE {
                continue;
            }
            let score = a.column(j).dot(&residual).abs() / col_norms[j];
            if score > best_score {
                best_score = score;
                best_j = Some(j);
            }
        }
        let Some(j) = best_j else {
            note = Some("no column correlates with the residual".to_string());
            break;
        };
        if best_score <= 1e-13 * y_norm.max(f64::MIN_POSITIVE) {
            note = Some("residual is numerically orthogonal to all columns".to_string());
            break;
        }
        support.push(j);
        in_support[j] = true;
        match fit_support(a, y, &support) {
            Some((c, r)) => {
                coeffs = c;
                residual = r;
            }
            None => {
                // The new column made the fit rank-deficient; undo and stop.
                in_support[j] = false;
                support.pop();
                note = Some(format!("column {j} made the selected set rank-deficient"));
                break;
            }
        }
    }

    let residual_norm = norm2(&residual.view());
    Ok(SolveResult {
        coeffs: scatter(l, &support, &coeffs),
        residual_norm,
        iterations: support.len(),
        converged: residual_norm <= target,
        solver: SolverChoice::Omp,
        note,
    })
}

/// Smoothed-ℓ0 recovery.
///
/// Starts from the minimum-energy solution `z₀ = Aᵀ(AAᵀ)⁻¹y`, then for a
/// geometric ladder of kernel widths σ runs a few gradient steps on the
/// smoothed sparsity measure followed by projection back onto `Az = y`.
/// Requires `A` to have full row rank (the Gram matrix must be Cholesky-
/// factorizable); otherwise fails with a numeric error.
pub fn sl0(a: &ArrayView2<f64>, y: &ArrayView1<f64>, params: &SolverParams) -> Result<SolveResult> {
    check_system(a, y)?;
    let p = &params.sl0;
    if !(p.sigma_decrease > 0.0 && p.sigma_decrease < 1.0) {
        return Err(invalid(format!(
            "sigma_decrease must lie in (0, 1), got {}",
            p.sigma_decrease
        )));
    }
    if !(p.mu > 0.0) || !p.mu.is_finite() {
        return Err(invalid(format!("mu must be positive, got {}", p.mu)));
    }
    if p.inner_iters == 0 {
        return Err(invalid("inner_iters must be at least 1"));
    }
    if let Some(smin) = p.sigma_min {
        if !(smin > 0.0) || !smin.is_finite() {
            return Err(invalid(format!("sigma_min must be positive, got {smin}")));
        }
    }

    let l = a.ncols();
    let y_norm = norm2(y);
    if y_norm == 0.0 {
        return Ok(SolveResult {
            coeffs: Array1::zeros(l),
            residual_norm: 0.0,
            iterations: 0,
            converged: true,
            solver: SolverChoice::Sl0,
            note: Some("zero measurements: zero vector is exact".to_string()),
        });
    }

    let gram = a.dot(&a.t());
    let chol = linalg::cholesky(&gram.view()).ok_or_else(|| {
        numeric("AAᵀ is not positive definite: operator rows are linearly dependent")
    })?;

    // Minimum-energy initialization.
    let u = linalg::chol_solve(&chol, y);
    let mut z = a.t().dot(&u);

    let z_max = z.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if z_max == 0.0 {
        // Only possible when y ⊥ range(A)… which contradicts full row rank;
        // guard anyway.
        return Err(numeric("initialization collapsed to zero"));
    }
    let sigma0 = 2.0 * z_max;
    let sigma_min = p.sigma_min.unwrap_or(1e-4 * sigma0);

    let mut sigma = sigma0;
    let mut outer = 0usize;
    loop {
        for _ in 0..p.inner_iters {
            // Gradient ascent on smoothed sparsity: δ_i = z_i·exp(−z_i²/2σ²).
            let two_s2 = 2.0 * sigma * sigma;
            let delta = z.mapv(|v| v * (-v * v / two_s2).exp());
            z = &z - &delta.mapv(|d| p.mu * d);
            // Project back onto the measurement-consistent affine set.
            let defect = a.dot(&z) - y;
            let w = linalg::chol_solve(&chol, &defect.view());
            z = &z - &a.t().dot(&w);
        }
        outer += 1;
        if sigma <= sigma_min {
            break;
        }
        sigma *= p.sigma_decrease;
    }

    let residual = a.dot(&z) - y;
    let residual_norm = norm2(&residual.view());
    let converged = residual_norm <= 1e-8 * (1.0 + y_norm);
    Ok(SolveResult {
        coeffs: z,
        residual_norm,
        iterations: outer,
        converged,
        solver: SolverChoice::Sl0,
        note: None,
    })
}

struct SearchState {
    best_res: f64,
    best_support: Vec<usize>,
    best_coeffs: Array1<f64>,
    evaluated: usize,
    target: f64,
    done: bool,
}

fn search(
    a: &ArrayView2<f64>,
    y: &ArrayView1<f64>,
    k: usize,
    start: usize,
    support: &mut Vec<usize>,
    state: &mut SearchState,
) {
    state.evaluated += 1;
    if let Some((coeffs, residual)) = fit_support(a, y, support) {
        let res = norm2(&residual.view());
        if res < state.best_res {
            state.best_res = res;
            state.best_support = support.clone();
            state.best_coeffs = coeffs;
            if res <= state.target {
                state.done = true;
                return;
            }
        }
    }
    if support.len() == k {
        return;
    }
    for j in start..a.ncols() {
        support.push(j);
        search(a, y, k, j + 1, support, state);
        support.pop();
        if state.done {
            return;
        }
    }
}

/// Maximum dictionary size accepted by [`brute_force`].
pub const BRUTE_FORCE_MAX_L: usize = 24;
/// Maximum support size accepted by [`brute_force`].
pub const BRUTE_FORCE_MAX_K: usize = 4;

/// Exhaustive sparse recovery: tries every support of size ≤ `max_sparsity`
/// in lexicographic order and keeps the first best least-squares fit,
/// stopping early once the residual target is met.
///
/// The search space is `Σ C(L, j)` supports; refuses to run beyond
/// `L ≤ 24, k ≤ 4` and reports the would-be trial count for realistic sizes
/// (e.g. L = 1024, k = 64 needs C(1024,64) ≈ 4.8e102 support trials) to
/// make the cost of key-less attacks concrete.
pub fn brute_force(
    a: &ArrayView2<f64>,
    y: &ArrayView1<f64>,
    params: &SolverParams,
) -> Result<SolveResult> {
    check_system(a, y)?;
    if params.max_sparsity == 0 {
        return Err(invalid("max_sparsity must be at least 1"));
    }
    let (l, k) = (a.ncols(), params.max_sparsity);
    if l > BRUTE_FORCE_MAX_L || k > BRUTE_FORCE_MAX_K {
        let log10_trials = sparse_search_log10_trials(l as u64, k as u64);
        return Err(invalid(format!(
            "exhaustive search over L = {l}, k = {k} needs ≈ {} support trials; \
             this solver is capped at L ≤ {BRUTE_FORCE_MAX_L}, k ≤ {BRUTE_FORCE_MAX_K}",
            format_log10(log10_trials)
        )));
    }

    let y_norm = norm2(y);
    let mut state = SearchState {
        best_res: f64::INFINITY,
        best_support: Vec::new(),
        best_coeffs: Array1::zeros(0),
        evaluated: 0,
        target: params.residual_tol * y_norm,
        done: false,
    };
    let mut support = Vec::with_capacity(k);
    search(a, y, k, 0, &mut support, &mut state);

    let converged = state.best_res <= state.target;
    Ok(SolveResult {
        coeffs: scatter(l, &state.best_support, &state.best_coeffs),
        residual_norm: state.best_res,
        iterations: state.evaluated,
        converged,
        solver: SolverChoice::BruteForce,
        note: if state.done {
            Some("stopped at first support meeting the residual target".to_string())
        } else {
            None
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::keys::{permute_columns, BipolarKey};
    use crate::sensing::make_gaussian_phi;
    use ndarray::array;

    fn planted_problem(
        m: usize,
        l: usize,
        support: &[usize],
        values: &[f64],
        seed: u64,
    ) -> (Array2<f64>, Array1<f64>, Array1<f64>) {
        let a = make_gaussian_phi(m, l, seed, false).unwrap().matrix().clone();
        let mut x = Array1::<f64>::zeros(l);
        for (&j, &v) in support.iter().zip(values) {
            x[j] = v;
        }
        let y = a.dot(&x);
        (a, x, y)
    }

    #[test]
    fn omp_recovers_planted_two_sparse() {
        let (a, x, y) = planted_problem(32, 64, &[10, 40], &[1.5, -0.8], 100);
        let r = omp(&a.view(), &y.view(), &SolverParams::with_sparsity(4)).unwrap();
        assert!(r.converged);
        assert_eq!(r.iterations, 2);
        for j in 0..64 {
            assert!(
                (r.coeffs[j] - x[j]).abs() < 1e-8,
                "coeff {j}: {} vs {}",
                r.coeffs[j],
                x[j]
            );
        }
        assert!(r.residual_norm < 1e-8);
    }

    #[test]
    fn omp_breaks_ties_toward_lowest_index() {
        // Columns 0 and 2 are identical; y is exactly that column.
        let a = array![[1.0, 0.3, 1.0], [2.0, -0.4, 2.0], [0.5, 0.9, 0.5]];
        let y = array![1.0, 2.0, 0.5];
        let r = omp(&a.view(), &y.view(), &SolverParams::with_sparsity(3)).unwrap();
        assert!(r.converged);
        assert!((r.coeffs[0] - 1.0).abs() < 1e-12);
        assert_eq!(r.coeffs[2], 0.0);
    }

    #[test]
    fn omp_residual_is_monotone_along_the_selection_path() {
        let (a, _x, y) = planted_problem(24, 48, &[3, 20, 33], &[1.0, 2.0, -1.5], 7);
        let mut prev = f64::INFINITY;
        let mut prev_support: Vec<usize> = Vec::new();
        for budget in 1..=3 {
            let mut params = SolverParams::with_sparsity(budget);
            params.residual_tol = 0.0; // force the full budget
            let r = omp(&a.view(), &y.view(), &params).unwrap();
            assert!(r.residual_norm <= prev + 1e-12);
            prev = r.residual_norm;
            let support: Vec<usize> =
                (0..48).filter(|&j| r.coeffs[j] != 0.0).collect();
            for j in &prev_support {
                assert!(support.contains(j), "prefix stability violated");
            }
            prev_support = support;
        }
        assert!(prev < 1e-10);
    }

    #[test]
    fn omp_handles_zero_measurements() {
        let a = make_gaussian_phi(8, 16, 3, false).unwrap().matrix().clone();
        let y = Array1::<f64>::zeros(8);
        let r = omp(&a.view(), &y.view(), &SolverParams::with_sparsity(4)).unwrap();
        assert!(r.converged);
        assert_eq!(r.iterations, 0);
        assert_eq!(r.coeffs, Array1::<f64>::zeros(16));
    }

    #[test]
    fn omp_validation() {
        let a = Array2::<f64>::zeros((4, 8));
        let y = Array1::<f64>::zeros(3);
        assert!(omp(&a.view(), &y.view(), &SolverParams::with_sparsity(2)).is_err());
        let y = Array1::<f64>::zeros(4);
        assert!(omp(&a.view(), &y.view(), &SolverParams::with_sparsity(0)).is_err());
    }

    #[test]
    fn sl0_is_exact_on_an_orthonormal_operator() {
        let a = Array2::<f64>::eye(8);
        let y: Array1<f64> = (0..8).map(|i| (i as f64 - 3.0) * 0.25).collect();
        let r = sl0(&a.view(), &y.view(), &SolverParams::with_sparsity(8)).unwrap();
        assert!(r.converged);
        assert!(r.residual_norm < 1e-12);
        for i in 0..8 {
            assert!((r.coeffs[i] - y[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn sl0_recovers_planted_sparse_vector() {
        let (a, x, y) = planted_problem(40, 64, &[5, 30, 55], &[2.0, -1.2, 0.9], 11);
        let r = sl0(&a.view(), &y.view(), &SolverParams::with_sparsity(3)).unwrap();
        assert!(r.converged, "not feasible: residual {}", r.residual_norm);
        let num: f64 = (0..64).map(|j| (r.coeffs[j] - x[j]).powi(2)).sum::<f64>();
        let den: f64 = x.iter().map(|v| v * v).sum();
        assert!(
            (num / den).sqrt() < 1e-3,
            "relative error {}",
            (num / den).sqrt()
        );
    }

    #[test]
    fn sl0_commutes_with_bipolar_scrambling() {
        // Solving against A·P and unscrambling must match solving against A.
        let (a, _x, y) = planted_problem(16, 32, &[4, 19], &[1.0, -2.0], 21);
        let params = SolverParams::with_sparsity(2);
        let plain = sl0(&a.view(), &y.view(), &params).unwrap();

        let key = BipolarKey::generate(32, 2.0, 77).unwrap();
        let a_scrambled = permute_columns(&a.view(), &key).unwrap();
        let enc = sl0(&a_scrambled.view(), &y.view(), &params).unwrap();
        let unscrambled = key.apply(&enc.coeffs.view()).unwrap();

        let scale = 1.0 + plain.coeffs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for j in 0..32 {
            assert!(
                (unscrambled[j] - plain.coeffs[j]).abs() < 1e-6 * scale,
                "coeff {j}: {} vs {}",
                unscrambled[j],
                plain.coeffs[j]
            );
        }
    }

    #[test]
    fn sl0_zero_measurements_short_circuit() {
        let a = make_gaussian_phi(8, 16, 5, false).unwrap().matrix().clone();
        let y = Array1::<f64>::zeros(8);
        let r = sl0(&a.view(), &y.view(), &SolverParams::with_sparsity(4)).unwrap();
        assert!(r.converged);
        assert_eq!(r.coeffs, Array1::<f64>::zeros(16));
    }

    #[test]
    fn sl0_rejects_rank_deficient_operators() {
        let a = Array2::<f64>::zeros((4, 8));
        let y = Array1::<f64>::ones(4);
        let err = sl0(&a.view(), &y.view(), &SolverParams::with_sparsity(2)).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn sl0_parameter_validation() {
        let a = Array2::<f64>::eye(4);
        let y = Array1::<f64>::ones(4);
        let mut p = SolverParams::with_sparsity(2);
        p.sl0.sigma_decrease = 1.0;
        assert!(sl0(&a.view(), &y.view(), &p).is_err());
        let mut p = SolverParams::with_sparsity(2);
        p.sl0.mu = 0.0;
        assert!(sl0(&a.view(), &y.view(), &p).is_err());
        let mut p = SolverParams::with_sparsity(2);
        p.sl0.inner_iters = 0;
        assert!(sl0(&a.view(), &y.view(), &p).is_err());
        let mut p = SolverParams::with_sparsity(2);
        p.sl0.sigma_min = Some(0.0);
        assert!(sl0(&a.view(), &y.view(), &p).is_err());
    }

    #[test]
    fn brute_force_finds_exact_support() {
        let (a, x, y) = planted_problem(6, 10, &[2, 7], &[1.0, -2.0], 31);
        let r = brute_force(&a.view(), &y.view(), &SolverParams::with_sparsity(2)).unwrap();
        assert!(r.converged);
        for j in 0..10 {
            assert!((r.coeffs[j] - x[j]).abs() < 1e-8);
        }
    }

    #[test]
    fn brute_force_prefers_lexicographically_first_support() {
        // Columns 0 and 3 identical; y equals that column → support {0} wins.
        let a = array![[1.0, 0.2, 0.4, 1.0], [0.0, 1.0, 0.1, 0.0], [2.0, 0.3, 0.9, 2.0]];
        let y = array![1.0, 0.0, 2.0];
        let r = brute_force(&a.view(), &y.view(), &SolverParams::with_sparsity(2)).unwrap();
        assert!(r.converged);
        assert!((r.coeffs[0] - 1.0).abs() < 1e-12);
        assert_eq!(r.coeffs[3], 0.0);
    }

    #[test]
    fn brute_force_refuses_realistic_sizes() {
        let a = Array2::<f64>::zeros((2, 1024));
        let y = Array1::<f64>::zeros(2);
        let mut params = SolverParams::with_sparsity(64);
        params.residual_tol = 1e-6;
        let err = brute_force(&a.view(), &y.view(), &params).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("4.8e102"), "message was: {msg}");
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn dispatch_matches_direct_calls() {
        let (a, _x, y) = planted_problem(12, 20, &[1, 9], &[1.0, 1.0], 41);
        let params = SolverParams::with_sparsity(2);
        let via = solve(&a.view(), &y.view(), SolverChoice::Omp, &params).unwrap();
        let direct = omp(&a.view(), &y.view(), &params).unwrap();
        assert_eq!(via, direct);
        assert_eq!(via.solver, SolverChoice::Omp);
    }

    #[test]
    fn solver_names_round_trip() {
        for c in [SolverChoice::Omp, SolverChoice::Sl0, SolverChoice::BruteForce] {
            let s = c.to_string();
            assert_eq!(s.parse::<SolverChoice>().unwrap(), c);
        }
        assert!("magic".parse::<SolverChoice>().is_err());
    }
}
