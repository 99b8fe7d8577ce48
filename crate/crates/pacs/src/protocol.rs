//! The outsourcing protocol: who computes what, and who holds which secret.
//!
//! Roles and data flow for one window `x`:
//!
//! 1. **Sensor** (holds Φ and the mixing key Q): measures `y = Φ x` and
//!    transmits `ŷ = Q y` ([`sensor_encode`]).
//! 2. **Key setup** (user side, once per key rotation): publishes the
//!    scrambled operator `A* = Q Φ Ψ P` ([`encode_operator`]) where P is the
//!    user's bipolar permutation key.
//! 3. **Cloud** (sees only `A*` and `ŷ`): whitens the rows of the received
//!    system (a key-free preconditioning step) and runs sparse recovery
//!    ([`cloud_recover`]), returning the intermediate cipher `z`. Because
//!    `A* (P⁻¹ s) = Q Φ Ψ s = ŷ`, the best sparse solution is `z = P⁻¹ s` —
//!    the true coefficients scrambled by the key the cloud never sees.
//! 4. **User** (holds P): unscrambles `s = P z` and resynthesizes
//!    `x̃ = Ψ s` ([`user_decrypt`]).
//!
//! [`user_decrypt_estimated`] plays the attacker: decrypting with a partial
//! key estimate instead of P. [`cloud_view_audit`] summarizes what the cloud
//! actually observes (zero-mean, structureless Gaussian-looking entries).

use ndarray::{Array1, Array2, ArrayView2};

use crate::dictionaries::Dictionary;
use crate::error::{dim, invalid, Result};
use crate::keys::{permute_columns, BipolarKey, EstimatedKey, MatrixKey};
use crate::linalg;
use crate::sensing::{sense, MeasurementMatrix};
use crate::signal_io::SignalWindow;
use crate::solvers::{solve, SolveResult, SolverChoice, SolverParams};

/// Builds the scrambled recovery operator `A* = Q Φ Ψ P`.
pub fn encode_operator(
    phi: &MeasurementMatrix,
    dictionary: &Dictionary,
    q: &MatrixKey,
    p: &BipolarKey,
) -> Result<Array2<f64>> {
    if dictionary.n() != phi.n() {
        return Err(dim(format!(
            "dictionary is {}-dimensional but the measurement matrix has {} columns",
            dictionary.n(),
            phi.n()
        )));
    }
    if q.m() != phi.m() {
        return Err(dim(format!(
            "mixing key is {}×{0} but there are {} measurements",
            q.m(),
            phi.m()
        )));
    }
    if p.n() != dictionary.atoms() {
        return Err(dim(format!(
            "bipolar key size {} does not match the {} dictionary atoms",
            p.n(),
            dictionary.atoms()
        )));
    }
    let flat = phi.matrix().dot(dictionary.matrix());
    let scrambled = permute_columns(&flat.view(), p)?;
    Ok(q.matrix().dot(&scrambled))
}

/// Sensor side: compress and mix one window, `ŷ = Q Φ x`.
pub fn sensor_encode(
    window: &SignalWindow,
    phi: &MeasurementMatrix,
    q: &MatrixKey,
) -> Result<Array1<f64>> {
    if q.m() != phi.m() {
        return Err(dim(format!(
            "mixing key is {}×{0} but there are {} measurements",
            q.m(),
            phi.m()
        )));
    }
    let y = sense(phi, &window.samples().view())?;
    Ok(q.matrix().dot(&y))
}

/// Everything the cloud is allowed to see for one recovery job.
#[derive(Debug, Clone, PartialEq)]
pub struct PublicRecoveryPackage {
    a_star: Array2<f64>,
    y_hat: Array1<f64>,
}

impl PublicRecoveryPackage {
    pub fn new(a_star: Array2<f64>, y_hat: Array1<f64>) -> Result<Self> {
        if a_star.nrows() == 0 || a_star.ncols() == 0 {
            return Err(dim("scrambled operator must be non-empty"));
        }
        if a_star.nrows() != y_hat.len() {
            return Err(dim(format!(
                "operator has {} rows but {} mixed measurements were supplied",
                a_star.nrows(),
                y_hat.len()
            )));
        }
        if y_hat.iter().any(|v| !v.is_finite()) || a_star.iter().any(|v| !v.is_finite()) {
            return Err(invalid("package contains non-finite values"));
        }
        Ok(Self { a_star, y_hat })
    }

    /// Runs both protocol sides that precede the cloud: operator encoding
    /// and sensor encoding of one window.
    pub fn build(
        window: &SignalWindow,
        phi: &MeasurementMatrix,
        dictionary: &Dictionary,
        q: &MatrixKey,
        p: &BipolarKey,
    ) -> Result<Self> {
        let a_star = encode_operator(phi, dictionary, q, p)?;
        let y_hat = sensor_encode(window, phi, q)?;
        Self::new(a_star, y_hat)
    }

    pub fn a_star(&self) -> &Array2<f64> {
        &self.a_star
    }

    pub fn y_hat(&self) -> &Array1<f64> {
        &self.y_hat
    }

    /// Measurement count.
    pub fn m(&self) -> usize {
        self.a_star.nrows()
    }

    /// Coefficient-domain size.
    pub fn l(&self) -> usize {
        self.a_star.ncols()
    }
}

/// The cloud's answer: recovered coefficients, still scrambled by the
/// bipolar key (`z = P⁻¹ s`).
#[derive(Debug, Clone, PartialEq)]
pub struct IntermediateCipher {
    coeffs: Array1<f64>,
}

impl IntermediateCipher {
    pub fn new(coeffs: Array1<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(dim("intermediate cipher must be non-empty"));
        }
        if coeffs.iter().any(|v| !v.is_finite()) {
            return Err(invalid("intermediate cipher contains non-finite values"));
        }
        Ok(Self { coeffs })
    }

    pub fn coeffs(&self) -> &Array1<f64> {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false // `new` rejects empty vectors
    }
}

/// Cloud-side result: the cipher plus solver diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct CloudRecovery {
    pub cipher: IntermediateCipher,
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    pub solver: SolverChoice,
    pub note: Option<String>,
}

/// Cloud side: sparse recovery against the scrambled operator. The cloud
/// needs no key material; `m > L` is rejected because an overdetermined
/// "recovery" would mean the job was never compressed.
///
/// Before solving, the rows of the received system are whitened with the
/// Cholesky factor of `A* A*ᵀ` (public material only — no keys involved).
/// Whitening rewrites `(A*, ŷ)` as `(L⁻¹A*, L⁻¹ŷ)` without changing the
/// solution set, and it reduces any invertible mixing of the measurements to
/// an orthogonal factor. Greedy correlation-based selection (OMP) is exactly
/// invariant under orthogonal mixing, so recovery quality matches the
/// unmixed problem; for SL0 the whitened projections are the same
/// least-squares projections it would compute anyway. If the row Gram matrix
/// is not positive definite the raw system is solved and a note is attached.
///
/// The reported residual and convergence flag always refer to the original
/// system `‖A*z − ŷ‖`.
pub fn cloud_recover(
    package: &PublicRecoveryPackage,
    solver: SolverChoice,
    params: &SolverParams,
) -> Result<CloudRecovery> {
    if package.m() > package.l() {
        return Err(dim(format!(
            "more measurements ({}) than unknowns ({}): not a compressed job",
            package.m(),
            package.l()
        )));
    }
    let a_star = package.a_star();
    let y_hat = package.y_hat();
    let gram = a_star.dot(&a_star.t());
    let (result, whiten_note): (SolveResult, Option<String>) =
        match linalg::cholesky(&gram.view()) {
            Some(l) => {
                let white_a = linalg::forward_solve_matrix(&l, &a_star.view());
                let white_y = linalg::forward_solve(&l, &y_hat.view());
                let result = solve(&white_a.view(), &white_y.view(), solver, params)?;
                (result, None)
            }
            None => {
                let result = solve(&a_star.view(), &y_hat.view(), solver, params)?;
                (result, Some("row Gram matrix not positive definite; solved unwhitened".into()))
            }
        };

    // Re-express the diagnostics against the system the cloud was handed.
    let residual_norm = {
        let diff = a_star.dot(&result.coeffs) - y_hat;
        diff.dot(&diff).sqrt()
    };
    let y_norm = y_hat.dot(y_hat).sqrt();
    let converged = residual_norm <= params.residual_tol * y_norm;
    let note = match (whiten_note, result.note) {
        (Some(w), Some(s)) => Some(format!("{w}; {s}")),
        (Some(w), None) => Some(w),
        (None, s) => s,
    };
    Ok(CloudRecovery {
        cipher: IntermediateCipher::new(result.coeffs)?,
        residual_norm,
        iterations: result.iterations,
        converged,
        solver: result.solver,
        note,
    })
}

/// A decrypted window: coefficients in the dictionary domain and the
/// resynthesized time-domain samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Decryption {
    pub coefficients: Array1<f64>,
    pub samples: Array1<f64>,
}

/// User side: unscramble with the true key and resynthesize,
/// `x̃ = Ψ (P z)`.
pub fn user_decrypt(
    cipher: &IntermediateCipher,
    key: &BipolarKey,
    dictionary: &Dictionary,
) -> Result<Decryption> {
    let coefficients = key.apply(&cipher.coeffs().view())?;
    let samples = dictionary.synthesize(&coefficients.view())?;
    Ok(Decryption { coefficients, samples })
}

/// Attacker side: decrypt with a (partially) guessed key instead of the
/// true one.
pub fn user_decrypt_estimated(
    cipher: &IntermediateCipher,
    key: &EstimatedKey,
    dictionary: &Dictionary,
) -> Result<Decryption> {
    let coefficients = key.apply(&cipher.coeffs().view())?;
    let samples = dictionary.synthesize(&coefficients.view())?;
    Ok(Decryption { coefficients, samples })
}

/// Entry statistics of a scrambled operator, as seen by the cloud.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorAudit {
    pub rows: usize,
    pub cols: usize,
    /// Mean over all entries.
    pub entry_mean: f64,
    /// Population variance over all entries.
    pub entry_variance: f64,
    /// Largest |cosine| between distinct rows — near zero when the operator
    /// carries no visible structure.
    pub max_abs_row_correlation: f64,
}

/// Summarizes what the cloud observes. For a Gaussian Φ with row variance
/// 1/m², an orthonormal Ψ and a bipolar key of weight α (no mixing key),
/// the entries behave like i.i.d. N(0, α²/m²) draws: zero mean, flat
/// variance, no row structure — nothing for the cloud to exploit.
pub fn cloud_view_audit(a_star: &ArrayView2<f64>) -> Result<OperatorAudit> {
    let (m, l) = (a_star.nrows(), a_star.ncols());
    if m == 0 || l == 0 {
        return Err(dim("operator must be non-empty"));
    }
    let count = (m * l) as f64;
    let mean = a_star.iter().sum::<f64>() / count;
    let variance = a_star.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / count;

    let norms: Vec<f64> = (0..m)
        .map(|i| a_star.row(i).iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    let mut max_corr = 0.0f64;
    for i in 0..m {
        if norms[i] == 0.0 {
            continue;
        }
        for k in (i + 1)..m {
            if norms[k] == 0.0 {
                continue;
            }
            let dot = a_star.row(i).dot(&a_star.row(k));
            max_corr = max_corr.max((dot / (norms[i] * norms[k])).abs());
        }
    }
    Ok(OperatorAudit {
        rows: m,
        cols: l,
        entry_mean: mean,
        entry_variance: variance,
        max_abs_row_correlation: max_corr,
    })
}
