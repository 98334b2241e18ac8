//! The pooled-error statistics battery: signed and absolute error moments,
//! relative precision, Spearman correlation with average ranks, Bland–Altman
//! agreement limits and the error-vs-agreement regression line.

use crate::error::{degenerate, invalid, Result};

pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (n−1 denominator); 0.0 for fewer than 2 values.
pub(crate) fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    (ss / (xs.len() - 1) as f64).sqrt()
}

fn check_paired(y: &[f64], y_ref: &[f64]) -> Result<()> {
    if y.is_empty() {
        return Err(invalid("statistics need at least one prediction"));
    }
    if y.len() != y_ref.len() {
        return Err(invalid(format!(
            "prediction/reference length mismatch: {} vs {}",
            y.len(),
            y_ref.len()
        )));
    }
    Ok(())
}

fn signed_errors(y: &[f64], y_ref: &[f64]) -> Vec<f64> {
    y.iter().zip(y_ref).map(|(&a, &b)| a - b).collect()
}

/// Mean (accuracy) and sample standard deviation (precision) of the signed
/// error `y − y_ref`.
pub fn signed_error_stats(y: &[f64], y_ref: &[f64]) -> Result<(f64, f64)> {
    check_paired(y, y_ref)?;
    let e = signed_errors(y, y_ref);
    Ok((mean(&e), sample_std(&e)))
}

/// Mean and sample standard deviation of the absolute error `|y − y_ref|`.
pub fn abs_error_stats(y: &[f64], y_ref: &[f64]) -> Result<(f64, f64)> {
    check_paired(y, y_ref)?;
    let e: Vec<f64> = signed_errors(y, y_ref).iter().map(|v| v.abs()).collect();
    Ok((mean(&e), sample_std(&e)))
}

/// Precision divided by the mean reference length (a unitless fraction).
pub fn relative_precision(y: &[f64], y_ref: &[f64]) -> Result<f64> {
    let (_, precision) = signed_error_stats(y, y_ref)?;
    let mean_ref = mean(y_ref);
    if !(mean_ref.is_finite() && mean_ref > 0.0) {
        return Err(degenerate(format!("mean reference length {mean_ref} is not positive")));
    }
    Ok(precision / mean_ref)
}

/// Average ranks (1-based); tied values share the mean of their rank range.
fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).expect("finite values"));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        // Positions i..=j (0-based) tie; their 1-based ranks average to:
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    let (mx, my) = (mean(x), mean(y));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(degenerate("correlation undefined: an input has zero variance"));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Spearman rank correlation: Pearson correlation of average-ranked data.
pub fn spearman_cc(y: &[f64], y_ref: &[f64]) -> Result<f64> {
    check_paired(y, y_ref)?;
    if y.len() < 2 {
        return Err(invalid("Spearman correlation needs at least 2 pairs"));
    }
    pearson(&average_ranks(y), &average_ranks(y_ref))
}

/// One measurement pair in agreement coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgreementPoint {
    /// Mean of the two measurements, (y + y_ref)/2.
    pub agreement: f64,
    /// Their difference, y − y_ref.
    pub difference: f64,
}

/// Bland–Altman summary: per-pair points plus the ±1.96σ limits of agreement.
#[derive(Debug, Clone, PartialEq)]
pub struct BlandAltman {
    pub points: Vec<AgreementPoint>,
    pub mean_difference: f64,
    pub lower_limit: f64,
    pub upper_limit: f64,
}

pub fn bland_altman(y: &[f64], y_ref: &[f64]) -> Result<BlandAltman> {
    check_paired(y, y_ref)?;
    let points: Vec<AgreementPoint> = y
        .iter()
        .zip(y_ref)
        .map(|(&a, &b)| AgreementPoint { agreement: (a + b) / 2.0, difference: a - b })
        .collect();
    let diffs: Vec<f64> = points.iter().map(|p| p.difference).collect();
    let mean_difference = mean(&diffs);
    let spread = 1.96 * sample_std(&diffs);
    Ok(BlandAltman {
        points,
        mean_difference,
        lower_limit: mean_difference - spread,
        upper_limit: mean_difference + spread,
    })
}

/// Ordinary least squares of the difference on the agreement value:
/// `difference ≈ slope · agreement + intercept`.
pub fn error_regression(y: &[f64], y_ref: &[f64]) -> Result<(f64, f64)> {
    check_paired(y, y_ref)?;
    let ba = bland_altman(y, y_ref)?;
    let a: Vec<f64> = ba.points.iter().map(|p| p.agreement).collect();
    let d: Vec<f64> = ba.points.iter().map(|p| p.difference).collect();
    let ma = mean(&a);
    let md = mean(&d);
    let mut sad = 0.0;
    let mut saa = 0.0;
    for (&x, &e) in a.iter().zip(&d) {
        sad += (x - ma) * (e - md);
        saa += (x - ma) * (x - ma);
    }
    if saa == 0.0 {
        return Err(degenerate("regression undefined: all agreement values identical"));
    }
    let slope = sad / saa;
    Ok((slope, md - slope * ma))
}
