//! Reconstruction quality metrics for ECG recovery.
//!
//! The headline figure is the percentage root-mean-square difference
//! ([`prd`]); its mean-removed variant ([`prdn`]) ignores baseline offset,
//! and [`snr`] is the same information on a decibel scale
//! (`SNR = −20·log₁₀(PRD/100)`). Clinical interpretation buckets PRD into
//! [`QualityBand`]s: below 2% is very good, 2–9% good, and at 9% or above
//! the reconstruction is considered diagnostically undetermined.

use ndarray::ArrayView1;

use crate::error::{data, dim, Result};

/// Clinical quality bucket for a PRD value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QualityBand {
    /// PRD < 2%.
    VeryGood,
    /// 2% ≤ PRD < 9%.
    Good,
    /// PRD ≥ 9%: not diagnostically usable.
    Undetermined,
}

impl QualityBand {
    /// Bucket for a PRD percentage.
    pub fn from_prd(prd: f64) -> Self {
        if prd < 2.0 {
            QualityBand::VeryGood
        } else if prd < 9.0 {
            QualityBand::Good
        } else {
            QualityBand::Undetermined
        }
    }
}

impl std::fmt::Display for QualityBand {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            QualityBand::VeryGood => "very_good",
            QualityBand::Good => "good",
            QualityBand::Undetermined => "undetermined",
        })
    }
}

/// All quality figures for one reconstruction.
#[derive(Debug, Clone, PartialEq)]
pub struct QualityReport {
    /// Percentage root-mean-square difference.
    pub prd: f64,
    /// PRD with the reference mean removed from the denominator.
    pub prdn: f64,
    /// Signal-to-noise ratio in dB (`+∞` for an exact reconstruction).
    pub snr_db: f64,
    pub band: QualityBand,
}

fn check_pair(x: &ArrayView1<f64>, x_rec: &ArrayView1<f64>) -> Result<()> {
    if x.len() != x_rec.len() {
        return Err(dim(format!(
            "reference has {} samples but reconstruction has {}",
            x.len(),
            x_rec.len()
        )));
    }
    if x.is_empty() {
        return Err(dim("signals must be non-empty"));
    }
    Ok(())
}

fn squared_error(x: &ArrayView1<f64>, x_rec: &ArrayView1<f64>) -> f64 {
    x.iter().zip(x_rec.iter()).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Percentage root-mean-square difference:
/// `PRD = 100 · √( Σ(x − x̃)² / Σx² )`.
///
/// Fails on a zero-energy reference (the ratio is undefined).
pub fn prd(x: &ArrayView1<f64>, x_rec: &ArrayView1<f64>) -> Result<f64> {
    check_pair(x, x_rec)?;
    let energy: f64 = x.iter().map(|v| v * v).sum();
    if energy == 0.0 {
        return Err(data("reference signal has zero energy; PRD is undefined"));
    }
    Ok(100.0 * (squared_error(x, x_rec) / energy).sqrt())
}

/// Normalized PRD: the reference mean is removed from the denominator,
/// `PRDN = 100 · √( Σ(x − x̃)² / Σ(x − x̄)² )`.
///
/// Fails on a constant reference (zero variance).
pub fn prdn(x: &ArrayView1<f64>, x_rec: &ArrayView1<f64>) -> Result<f64> {
    check_pair(x, x_rec)?;
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let var_energy: f64 = x.iter().map(|v| (v - mean) * (v - mean)).sum();
    if var_energy == 0.0 {
        return Err(data("reference signal is constant; PRDN is undefined"));
    }
    Ok(100.0 * (squared_error(x, x_rec) / var_energy).sqrt())
}

/// Signal-to-noise ratio in dB: `SNR = −20·log₁₀(PRD/100)`.
/// Exact reconstructions (PRD = 0) return `+∞`.
pub fn snr(x: &ArrayView1<f64>, x_rec: &ArrayView1<f64>) -> Result<f64> {
    Ok(snr_from_prd(prd(x, x_rec)?))
}

/// dB equivalent of a PRD percentage (`+∞` at zero).
pub fn snr_from_prd(prd: f64) -> f64 {
    if prd == 0.0 {
        f64::INFINITY
    } else {
        -20.0 * (prd / 100.0).log10()
    }
}

/// Computes every quality figure at once.
pub fn quality_report(x: &ArrayView1<f64>, x_rec: &ArrayView1<f64>) -> Result<QualityReport> {
    let prd_v = prd(x, x_rec)?;
    let prdn_v = prdn(x, x_rec)?;
    Ok(QualityReport {
        prd: prd_v,
        prdn: prdn_v,
        snr_db: snr_from_prd(prd_v),
        band: QualityBand::from_prd(prd_v),
    })
}

/// Fraction of measurements saved, as a percentage: `(1 − m/n) · 100`.
pub fn compression_percent(m: usize, n: usize) -> Result<f64> {
    if n == 0 || m > n {
        return Err(dim(format!("need 0 < m ≤ n, got m = {m}, n = {n}")));
    }
    Ok((1.0 - m as f64 / n as f64) * 100.0)
}

/// Undersampling factor `n / m` (e.g. 4 when keeping a quarter of the
/// samples).
pub fn compression_ratio(m: usize, n: usize) -> Result<f64> {
    if m == 0 || m > n {
        return Err(dim(format!("need 0 < m ≤ n, got m = {m}, n = {n}")));
    }
    Ok(n as f64 / m as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array1};

    #[test]
    fn prd_worked_values() {
        let x = array![3.0, 4.0];
        assert_eq!(prd(&x.view(), &x.view()).unwrap(), 0.0);
        let zero = array![0.0, 0.0];
        assert!((prd(&x.view(), &zero.view()).unwrap() - 100.0).abs() < 1e-12);
        let x = array![2.0, 0.0];
        let half = array![1.0, 0.0];
        assert!((prd(&x.view(), &half.view()).unwrap() - 50.0).abs() < 1e-12);
    }

    #[test]
    fn prd_rejects_zero_energy_reference() {
        let zero = array![0.0, 0.0];
        let any = array![1.0, 1.0];
        let err = prd(&zero.view(), &any.view()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn prdn_removes_the_mean() {
        // x has mean 2, centered energy 2; error vector (0, 2) has energy 4.
        let x = array![1.0, 3.0];
        let rec = array![1.0, 1.0];
        let got = prdn(&x.view(), &rec.view()).unwrap();
        assert!((got - 100.0 * (4.0f64 / 2.0).sqrt()).abs() < 1e-10);
        // A constant reference is rejected even though its energy is nonzero.
        let flat = array![5.0, 5.0];
        let err = prdn(&flat.view(), &rec.view()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn snr_follows_the_log_law() {
        assert!((snr_from_prd(1.0) - 40.0).abs() < 1e-12);
        assert!((snr_from_prd(10.0) - 20.0).abs() < 1e-12);
        assert!((snr_from_prd(100.0) - 0.0).abs() < 1e-12);
        // A reconstruction 10⁴× worse than the signal: PRD = 1e6 % ↔ −80 dB.
        assert!((snr_from_prd(1e6) - (-80.0)).abs() < 1e-12);
        assert_eq!(snr_from_prd(0.0), f64::INFINITY);
    }

    #[test]
    fn snr_matches_energy_ratio_identity() {
        let x = array![1.0, 2.0, -1.0, 0.5];
        let rec = array![0.9, 2.2, -1.1, 0.4];
        let direct = snr(&x.view(), &rec.view()).unwrap();
        let sig: f64 = x.iter().map(|v| v * v).sum();
        let err: f64 = x
            .iter()
            .zip(rec.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        let oracle = 10.0 * (sig / err).log10();
        assert!((direct - oracle).abs() < 1e-12);
    }

    #[test]
    fn bands_cut_at_two_and_nine_percent() {
        assert_eq!(QualityBand::from_prd(0.0), QualityBand::VeryGood);
        assert_eq!(QualityBand::from_prd(1.999), QualityBand::VeryGood);
        assert_eq!(QualityBand::from_prd(2.0), QualityBand::Good);
        assert_eq!(QualityBand::from_prd(8.999), QualityBand::Good);
        assert_eq!(QualityBand::from_prd(9.0), QualityBand::Undetermined);
        assert_eq!(QualityBand::from_prd(1e6), QualityBand::Undetermined);
    }

    #[test]
    fn report_is_self_consistent() {
        let x = array![1.0, -2.0, 3.0, 0.0];
        let rec = array![1.1, -2.0, 2.9, 0.05];
        let rep = quality_report(&x.view(), &rec.view()).unwrap();
        assert!((rep.prd - prd(&x.view(), &rec.view()).unwrap()).abs() < 1e-15);
        assert!((rep.snr_db - snr_from_prd(rep.prd)).abs() < 1e-15);
        assert_eq!(rep.band, QualityBand::from_prd(rep.prd));
        let exact = quality_report(&x.view(), &x.view()).unwrap();
        assert_eq!(exact.snr_db, f64::INFINITY);
        assert_eq!(exact.band, QualityBand::VeryGood);
    }

    #[test]
    fn compression_figures() {
        assert_eq!(compression_percent(256, 512).unwrap(), 50.0);
        assert_eq!(compression_percent(128, 512).unwrap(), 75.0);
        assert_eq!(compression_ratio(256, 512).unwrap(), 2.0);
        assert_eq!(compression_ratio(128, 512).unwrap(), 4.0);
        assert!(compression_percent(10, 5).is_err());
        assert!(compression_ratio(0, 5).is_err());
    }

    #[test]
    fn metric_validation() {
        let a = array![1.0, 2.0];
        let b = array![1.0];
        assert!(prd(&a.view(), &b.view()).is_err());
        let empty = Array1::<f64>::zeros(0);
        assert!(prd(&empty.view(), &empty.view()).is_err());
    }
}
