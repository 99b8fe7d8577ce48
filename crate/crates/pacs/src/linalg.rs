//! Small dense factorizations used by the solvers and key generation.
//!
//! Everything in here operates on plain `ndarray` types and is sized for the
//! matrices this crate actually sees (a few hundred to ~1024 on a side), so
//! no external BLAS/LAPACK backend is required. Matrix products go through
//! `ndarray::dot`, which already uses a fast kernel.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
///
/// Returns `None` when a pivot collapses (matrix not numerically SPD).
pub(crate) fn cholesky(a: &ArrayView2<f64>) -> Option<Array2<f64>> {
    let n = a.nrows();
    debug_assert_eq!(n, a.ncols());
    let mut l = Array2::<f64>::zeros((n, n));
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    for j in 0..n {
        let mut d = a[[j, j]];
        for k in 0..j {
            d -= l[[j, k] ] * l[[j, k]];
        }
        if d <= scale * 1e-14 {
            return None;
        }
        let dj = d.sqrt();
        l[[j, j]] = dj;
        for i in (j + 1)..n {
            let mut s = a[[i, j]];
            for k in 0..j {
                s -= l[[i, k]] * l[[j, k]];
            }
            l[[i, j]] = s / dj;
        }
    }
    Some(l)
}

/// Solves `L Lᵀ x = b` given the lower factor from [`cholesky`].
pub(crate) fn chol_solve(l: &Array2<f64>, b: &ArrayView1<f64>) -> Array1<f64> {
    let mut x = forward_solve(l, b);
    let n = l.nrows();
    for i in (0..n).rev() {
        let mut s = x[i];
        for k in (i + 1)..n {
            s -= l[[k, i]] * x[k];
        }
        x[i] = s / l[[i, i]];
    }
    x
}

/// Solves `L w = b` for lower-triangular `L` (forward substitution).
pub(crate) fn forward_solve(l: &Array2<f64>, b: &ArrayView1<f64>) -> Array1<f64> {
    let n = l.nrows();
    let mut x = b.to_owned();
    for i in 0..n {
        let mut s = x[i];
        for k in 0..i {
            s -= l[[i, k]] * x[k];
        }
        x[i] = s / l[[i, i]];
    }
    x
}

/// Solves `L W = B` column-by-column for lower-triangular `L`.
pub(crate) fn forward_solve_matrix(l: &Array2<f64>, b: &ArrayView2<f64>) -> Array2<f64> {
    let mut w = Array2::<f64>::zeros(b.raw_dim());
    for (c, col) in b.columns().into_iter().enumerate() {
        w.column_mut(c).assign(&forward_solve(l, &col));
    }
    w
}

/// LU factorization with partial pivoting. Returns `None` for a singular
/// (to working precision) matrix.
pub(crate) struct Lu {
    lu: Array2<f64>,
    piv: Vec<usize>,
}

pub(crate) fn lu_factor(a: &ArrayView2<f64>) -> Option<Lu> {
    let n = a.nrows();
    debug_assert_eq!(n, a.ncols());
    let mut lu = a.to_owned();
    let mut piv = Vec::with_capacity(n);
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    for j in 0..n {
        let mut p = j;
        let mut best = lu[[j, j]].abs();
        for i in (j + 1)..n {
            let v = lu[[i, j]].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best <= scale * 1e-300 {
            return None;
        }
        if p != j {
            for k in 0..n {
                lu.swap([j, k], [p, k]);
            }
        }
        piv.push(p);
        let d = lu[[j, j]];
        for i in (j + 1)..n {
            let f = lu[[i, j]] / d;
            lu[[i, j]] = f;
            for k in (j + 1)..n {
                lu[[i, k]] -= f * lu[[j, k]];
            }
        }
    }
    Some(Lu { lu, piv })
}

impl Lu {
    pub(crate) fn solve(&self, b: &ArrayView1<f64>) -> Array1<f64> {
        let n = self.lu.nrows();
        let mut x = b.to_owned();
        // The factorization swapped whole rows as it pivoted; replaying the
        // swap sequence aligns b with the final row order before any
        // elimination (swapping mid-substitution would mix processed and
        // unprocessed entries).
        for j in 0..n {
            x.swap(j, self.piv[j]);
        }
        for j in 0..n {
            let xj = x[j];
            for i in (j + 1)..n {
                x[i] -= self.lu[[i, j]] * xj;
            }
        }
        for j in (0..n).rev() {
            x[j] /= self.lu[[j, j]];
            let xj = x[j];
            for i in 0..j {
                x[i] -= self.lu[[i, j]] * xj;
            }
        }
        x
    }

    pub(crate) fn inverse(&self) -> Array2<f64> {
        let n = self.lu.nrows();
        let mut inv = Array2::<f64>::zeros((n, n));
        let mut e = Array1::<f64>::zeros(n);
        for j in 0..n {
            e.fill(0.0);
            e[j] = 1.0;
            let col = self.solve(&e.view());
            inv.column_mut(j).assign(&col);
        }
        inv
    }
}

/// Max absolute column sum (operator 1-norm).
pub(crate) fn norm_1(a: &ArrayView2<f64>) -> f64 {
    let mut best = 0.0f64;
    for j in 0..a.ncols() {
        let s: f64 = a.column(j).iter().map(|v| v.abs()).sum();
        best = best.max(s);
    }
    best
}

/// 1-norm condition estimate via the explicit inverse; `None` if singular.
pub(crate) fn cond_1(a: &ArrayView2<f64>) -> Option<f64> {
    let lu = lu_factor(a)?;
    let inv = lu.inverse();
    Some(norm_1(a) * norm_1(&inv.view()))
}

/// Least squares `min ‖A c − y‖₂` for a tall (m ≥ k) matrix via Householder
/// QR. Returns `None` when the columns are numerically rank-deficient.
pub(crate) fn lstsq_qr(a: &ArrayView2<f64>, y: &ArrayView1<f64>) -> Option<Array1<f64>> {
    let (m, k) = a.dim();
    debug_assert!(m >= k);
    debug_assert_eq!(m, y.len());
    let mut r = a.to_owned();
    let mut qty = y.to_owned();
    let col_scale = a.iter().fold(0.0f64, |mx, v| mx.max(v.abs())).max(f64::MIN_POSITIVE);

    for j in 0..k {
        // Householder vector for column j (rows j..m).
        let mut norm2 = 0.0;
        for i in j..m {
            norm2 += r[[i, j]] * r[[i, j]];
        }
        let norm = norm2.sqrt();
        if norm <= col_scale * (m as f64).sqrt() * 1e-13 {
            return None;
        }
        let alpha = if r[[j, j]] >= 0.0 { -norm } else { norm };
        let v0 = r[[j, j]] - alpha;
        // beta = vᵀv with v = (v0, r[j+1..m, j])
        let beta = v0 * v0 + (norm2 - r[[j, j]] * r[[j, j]]);
        r[[j, j]] = alpha;
        if beta <= 0.0 {
            continue;
        }
        // Apply H = I − 2 v vᵀ / beta to the remaining columns and to qty.
        for c in (j + 1)..k {
            let mut dot = v0 * r[[j, c]];
            for i in (j + 1)..m {
                dot += r[[i, j]] * r[[i, c]];
            }
            let f = 2.0 * dot / beta;
            r[[j, c]] -= f * v0;
            for i in (j + 1)..m {
                let vij = r[[i, j]];
                r[[i, c]] -= f * vij;
            }
        }
        let mut dot = v0 * qty[j];
        for i in (j + 1)..m {
            dot += r[[i, j]] * qty[i];
        }
        let f = 2.0 * dot / beta;
        qty[j] -= f * v0;
        for i in (j + 1)..m {
            qty[i] -= f * r[[i, j]];
        }
    }

    // Back-substitution on the k×k upper triangle.
    let mut c = Array1::<f64>::zeros(k);
    for j in (0..k).rev() {
        if r[[j, j]].abs() <= col_scale * (m as f64).sqrt() * 1e-13 {
            return None;
        }
        let mut s = qty[j];
        for t in (j + 1)..k {
            s -= r[[j, t]] * c[t];
        }
        c[j] = s / r[[j, j]];
    }
    Some(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn cholesky_solves_spd_system() {
        let a = array![[4.0, 2.0], [2.0, 3.0]];
        let l = cholesky(&a.view()).expect("spd");
        let b = array![8.0, 7.0];
        let x = chol_solve(&l, &b.view());
        // 4x + 2y = 8, 2x + 3y = 7 → x = 1.25, y = 1.5
        assert!((x[0] - 1.25).abs() < 1e-12);
        assert!((x[1] - 1.5).abs() < 1e-12);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = array![[1.0, 2.0], [2.0, 1.0]];
        assert!(cholesky(&a.view()).is_none());
    }

    #[test]
    fn lu_solve_and_inverse() {
        let a = array![[0.0, 2.0], [3.0, 1.0]];
        let lu = lu_factor(&a.view()).expect("nonsingular");
        let x = lu.solve(&array![4.0, 5.0].view());
        // 2y = 4 → y = 2; 3x + y = 5 → x = 1
        assert!((x[0] - 1.0).abs() < 1e-12);
        assert!((x[1] - 2.0).abs() < 1e-12);
        let inv = lu.inverse();
        let id = a.dot(&inv);
        assert!((id[[0, 0]] - 1.0).abs() < 1e-12);
        assert!((id[[0, 1]]).abs() < 1e-12);
        assert!((id[[1, 0]]).abs() < 1e-12);
        assert!((id[[1, 1]] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lu_detects_singular() {
        let a = array![[1.0, 2.0], [2.0, 4.0]];
        assert!(lu_factor(&a.view()).is_none());
    }

    /// Large enough that partial pivoting performs many nontrivial row
    /// swaps — guards the swap/substitution ordering in `Lu::solve`.
    #[test]
    fn lu_inverse_survives_heavy_pivoting() {
        let n = 60;
        let mut a = Array2::<f64>::zeros((n, n));
        // Deterministic full-rank matrix with no structure the pivoting
        // could shortcut.
        let mut state = 0x2545F4914F6CDD1Du64;
        for i in 0..n {
            for j in 0..n {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                a[[i, j]] = (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
            }
        }
        let lu = lu_factor(&a.view()).expect("random matrix is nonsingular");
        let id = a.dot(&lu.inverse());
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((id[[i, j]] - expect).abs());
            }
        }
        assert!(worst < 1e-10, "‖AA⁻¹ − I‖_max = {worst:.3e}");
    }

    #[test]
    fn cond_of_identity_is_one() {
        let a = Array2::<f64>::eye(5);
        let c = cond_1(&a.view()).unwrap();
        assert!((c - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lstsq_exact_and_overdetermined() {
        // Exact: pick c so that Ac = y has a solution.
        let a = array![[1.0, 0.0], [1.0, 1.0], [0.0, 2.0]];
        let truth = array![2.0, -1.5];
        let y = a.dot(&truth);
        let c = lstsq_qr(&a.view(), &y.view()).expect("full rank");
        assert!((c[0] - truth[0]).abs() < 1e-12);
        assert!((c[1] - truth[1]).abs() < 1e-12);

        // Overdetermined with residual: projection of y = (1,1,1) on col(1,1,1)…
        let a1 = array![[1.0], [1.0], [1.0]];
        let c1 = lstsq_qr(&a1.view(), &array![1.0, 2.0, 6.0].view()).unwrap();
        assert!((c1[0] - 3.0).abs() < 1e-12); // mean minimizes ℓ2
    }

    #[test]
    fn lstsq_flags_rank_deficiency() {
        let a = array![[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]];
        assert!(lstsq_qr(&a.view(), &array![1.0, 2.0, 3.0].view()).is_none());
    }
}
