use crate::{Error, Result};

/// Sample quantile by the median-unbiased rule (Hyndman–Fan type 8) on
/// sorted data.
pub fn quantile_type8(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let h = (n as f64 + 1.0 / 3.0) * p + 1.0 / 3.0;
    if h <= 1.0 {
        return sorted[0];
    }
    if h >= n as f64 {
        return sorted[n - 1];
    }
    let lo = h.floor();
    let i = lo as usize - 1;
    sorted[i] + (h - lo) * (sorted[i + 1] - sorted[i])
}

/// Indices whose value lies between the `lower` and `upper` sample quantiles,
/// both inclusive.
pub fn quartile_filter(y: &[f64], lower: f64, upper: f64) -> Result<Vec<usize>> {
    if y.is_empty() {
        return Err(Error::domain("quartile_filter: empty input"));
    }
    if !(0.0..=1.0).contains(&lower) || !(0.0..=1.0).contains(&upper) || lower >= upper {
        return Err(Error::domain(format!(
            "quartile_filter: need 0 <= lower < upper <= 1, got ({lower}, {upper})"
        )));
    }
    if y.iter().any(|v| v.is_nan()) {
        return Err(Error::domain("quartile_filter: NaN value"));
    }
    let mut sorted = y.to_vec();
    sorted.sort_by(f64::total_cmp);
    let lo = quantile_type8(&sorted, lower);
    let hi = quantile_type8(&sorted, upper);
    Ok((0..y.len()).filter(|&i| y[i] >= lo && y[i] <= hi).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keeps_everything_on_full_range() {
        let y = [5.0, -1.0, 3.3, 8.0, 0.0];
        assert_eq!(quartile_filter(&y, 0.0, 1.0).unwrap(), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn interior_half_of_one_to_eight() {
        // type 8: h = (8 + 1/3) p + 1/3 → Q(.25) = 2.4167, Q(.75) = 6.5833
        let y: Vec<f64> = (1..=8).map(f64::from).collect();
        let mut sorted = y.clone();
        sorted.sort_by(f64::total_cmp);
        assert!((quantile_type8(&sorted, 0.25) - (2.0 + 5.0 / 12.0)).abs() < 1e-12);
        assert!((quantile_type8(&sorted, 0.75) - (6.0 + 7.0 / 12.0)).abs() < 1e-12);
        assert_eq!(quartile_filter(&y, 0.25, 0.75).unwrap(), vec![2, 3, 4, 5]);
    }

    #[test]
    fn constant_vector_kept() {
        let y = [2.5; 9];
        assert_eq!(quartile_filter(&y, 0.25, 0.75).unwrap().len(), 9);
    }

    #[test]
    fn errors() {
        assert!(quartile_filter(&[], 0.25, 0.75).is_err());
        assert!(quartile_filter(&[1.0, 2.0], 0.75, 0.25).is_err());
        assert!(quartile_filter(&[1.0, 2.0], -0.1, 0.5).is_err());
    }
}
