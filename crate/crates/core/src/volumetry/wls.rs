//! Weighted least squares through the SVD.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub(crate) struct WlsFit {
    pub beta: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
    pub condition: f64,
}

/// Minimizes `Σ_j ((y_j − Σ_k x_{jk} β_k) / σ_j)²`.
pub(crate) fn weighted_least_squares(design: &[Vec<f64>], y: &[f64], sigma: &[f64], max_condition: f64) -> Result<WlsFit> {
    let m = design.len();
    let p = design[0].len();
    if m < p {
        return Err(Error::input(format!("{m} observations cannot determine {p} parameters")));
    }
    let a = DMatrix::from_fn(m, p, |j, k| design[j][k] / sigma[j]);
    let b = DVector::from_fn(m, |j, _| y[j] / sigma[j]);
    // column equilibration so the reported condition reflects the fit, not units
    let scale: Vec<f64> = (0..p).map(|k| a.column(k).norm().max(f64::MIN_POSITIVE)).collect();
    let a_s = DMatrix::from_fn(m, p, |j, k| a[(j, k)] / scale[k]);
    let svd = a_s.svd(true, true);
    let s = &svd.singular_values;
    let smax = s.max();
    let smin = s.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition <= max_condition) {
        return Err(Error::Conditioning { condition });
    }
    let u = svd.u.as_ref().expect("u requested");
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let uty = u.transpose() * b;
    let mut beta = vec![0.0; p];
    let mut covariance = vec![vec![0.0; p]; p];
    for k in 0..p {
        for i in 0..p {
            beta[k] += v_t[(i, k)] * uty[i] / s[i];
            for l in 0..p {
                covariance[k][l] += v_t[(i, k)] * v_t[(i, l)] / (s[i] * s[i]);
            }
        }
    }
    for k in 0..p {
        beta[k] /= scale[k];
        for l in 0..p {
            covariance[k][l] /= scale[k] * scale[l];
        }
    }
    Ok(WlsFit {
        beta,
        covariance,
        condition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let design: Vec<Vec<f64>> = (0..5).map(|i| vec![1.0, i as f64]).collect();
        let y: Vec<f64> = (0..5).map(|i| 2.0 + 3.0 * i as f64).collect();
        let fit = weighted_least_squares(&design, &y, &[1.0; 5], 1e12).unwrap();
        assert!((fit.beta[0] - 2.0).abs() < 1e-12 && (fit.beta[1] - 3.0).abs() < 1e-12);
        // textbook OLS covariance for x = 0..4: Var(slope) = 1/Σ(x − 2)² = 0.1
        assert!((fit.covariance[1][1] - 0.1).abs() < 1e-12);
    }

    #[test]
    fn collinear_design_is_rejected() {
        let design: Vec<Vec<f64>> = (0..4).map(|i| vec![i as f64, 2.0 * i as f64]).collect();
        let err = weighted_least_squares(&design, &[0.0, 1.0, 2.0, 3.0], &[1.0; 4], 1e12);
        assert!(matches!(err, Err(Error::Conditioning { .. })));
    }
}
