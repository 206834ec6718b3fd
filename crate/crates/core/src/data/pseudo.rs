use crate::{Error, Result};

/// Rank transform R_i / (n + 1), with tied values sharing their mid-rank.
pub fn pseudo_observations(y: &[f64]) -> Result<Vec<f64>> {
    let n = y.len();
    if n < 2 {
        return Err(Error::domain("pseudo_observations: need at least two values"));
    }
    if y.iter().any(|v| v.is_nan()) {
        return Err(Error::domain("pseudo_observations: NaN value"));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| y[a].total_cmp(&y[b]));
    let mut out = vec![0.0; n];
    let denom = (n + 1) as f64;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && y[order[end]] == y[order[start]] {
            end += 1;
        }
        // ranks start+1 ..= end share their average
        let rank = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            out[i] = rank / denom;
        }
        start = end;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        let got = pseudo_observations(&[3.2, 1.1, 5.0, 2.2]).unwrap();
        let want = [0.6, 0.2, 0.8, 0.4];
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < 1e-15);
        }
        let got = pseudo_observations(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        for (k, g) in got.iter().enumerate() {
            assert_eq!(*g, (k + 1) as f64 / 6.0);
        }
        assert_eq!(pseudo_observations(&[2.0, 2.0, 1.0]).unwrap(), vec![0.625, 0.625, 0.25]);
    }

    #[test]
    fn too_short() {
        assert!(pseudo_observations(&[]).is_err());
        assert!(pseudo_observations(&[1.0]).is_err());
        assert!(pseudo_observations(&[1.0, f64::NAN]).is_err());
    }

    proptest! {
        #[test]
        fn invariant_under_increasing_transform(ys in prop::collection::vec(-50.0f64..50.0, 2..60)) {
            let a = pseudo_observations(&ys).unwrap();
            let t: Vec<f64> = ys.iter().map(|v| (v / 10.0).exp() + 3.0 * v).collect();
            let b = pseudo_observations(&t).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn interior_rank_grid(ys in prop::collection::vec(-1e3f64..1e3, 2..80)) {
            let n = ys.len() as f64;
            for u in pseudo_observations(&ys).unwrap() {
                prop_assert!(u > 0.0 && u < 1.0);
                let twice_rank = 2.0 * u * (n + 1.0);
                prop_assert!((twice_rank - twice_rank.round()).abs() < 1e-9);
            }
        }
    }
}
