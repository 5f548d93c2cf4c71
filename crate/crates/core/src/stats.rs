//! Correlation and summary statistics for the corpus scan.

use statrs::function::beta::beta_reg;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("series lengths differ: {xs} vs {ys}")]
    LengthMismatch { xs: usize, ys: usize },
    #[error("need at least 3 paired samples, got {n}")]
    TooShort { n: usize },
    #[error("correlation is undefined for a constant series")]
    ConstantSeries,
}

/// Product-moment correlation with a two-sided p-value from the
/// t-distribution with n - 2 degrees of freedom.
///
/// The p-value is evaluated through the regularized incomplete beta
/// function, `p = I_x(nu/2, 1/2)` at `x = nu / (nu + t^2)`, which stays
/// accurate for the very small p-values a 20,000-text corpus produces.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<(f64, f64), StatsError> {
    if xs.len() != ys.len() {
        return Err(StatsError::LengthMismatch {
            xs: xs.len(),
            ys: ys.len(),
        });
    }
    let n = xs.len();
    if n < 3 {
        return Err(StatsError::TooShort { n });
    }
    let nf = n as f64;
    let mean_x = xs.iter().sum::<f64>() / nf;
    let mean_y = ys.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let dx = x - mean_x;
        let dy = y - mean_y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::ConstantSeries);
    }
    let rho = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
    let nu = nf - 2.0;
    let p = if rho.abs() >= 1.0 {
        0.0
    } else {
        let t2 = rho * rho * nu / (1.0 - rho * rho);
        beta_reg(nu / 2.0, 0.5, nu / (nu + t2))
    };
    Ok((rho, p))
}

/// Multiple-comparison gate: significant iff `p < alpha_level / m`.
pub fn bonferroni_significant(p: f64, m: usize, alpha_level: f64) -> bool {
    assert!(m >= 1, "m must be at least 1");
    p < alpha_level / m as f64
}

/// Quantile by linear interpolation between order statistics on an
/// already-sorted slice (the convention NumPy and R's default use).
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty slice");
    assert!((0.0..=1.0).contains(&q), "quantile fraction out of range");
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    if lo == hi {
        return sorted[lo];
    }
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn median_sorted(sorted: &[f64]) -> f64 {
    quantile_sorted(sorted, 0.5)
}

/// Convenience: sorts a copy and takes the quantile.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("non-NaN values"));
    quantile_sorted(&v, q)
}
