//! Summary statistics used as post-functions.
//!
//! Every kernel sorts a private copy of its input first, so results are
//! bit-identical under any permutation of the input.

use crate::error::{Error, Result};

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

pub fn max(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

pub fn min(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn mean(v: &[f64]) -> f64 {
    sorted(v).iter().sum::<f64>() / v.len() as f64
}

fn is_constant(s: &[f64]) -> bool {
    s.first() == s.last()
}

/// Central moments `(m2, m3, m4)` with the population denominator.
fn central_moments(s: &[f64]) -> (f64, f64, f64) {
    let n = s.len() as f64;
    let mu = s.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in s {
        let d = x - mu;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    (m2 / n, m3 / n, m4 / n)
}

/// Sample standard deviation (n - 1 denominator); 0 below three values or
/// for constant input.
pub fn sd(v: &[f64]) -> f64 {
    let s = sorted(v);
    if s.len() < 3 || is_constant(&s) {
        return 0.0;
    }
    let n = s.len() as f64;
    let (m2, _, _) = central_moments(&s);
    (m2 * n / (n - 1.0)).sqrt()
}

pub fn median(v: &[f64]) -> f64 {
    let s = sorted(v);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

/// Runs of exactly equal values in sorted order, as `(value, count)`.
fn runs(s: &[f64]) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    for &x in s {
        match out.last_mut() {
            Some((v, c)) if *v == x => *c += 1,
            _ => out.push((x, 1)),
        }
    }
    out
}

/// Most frequent value; the smallest one on ties.
pub fn mode(v: &[f64]) -> f64 {
    let mut best = (f64::NAN, 0usize);
    for (x, c) in runs(&sorted(v)) {
        if c > best.1 {
            best = (x, c);
        }
    }
    best.0
}

/// Shannon entropy (nats) of the empirical distribution of distinct values.
pub fn entropy(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let h: f64 = runs(&sorted(v))
        .into_iter()
        .map(|(_, c)| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum();
    // a single bucket yields -1 * ln(1) = -0.0
    h.max(0.0)
}

/// Gini coefficient `sum_ij |x_i - x_j| / (2 n^2 mean)` of a non-negative
/// vector. An all-zero vector has coefficient 0.
pub fn gini(v: &[f64]) -> Result<f64> {
    if let Some(x) = v.iter().find(|x| **x < 0.0) {
        return Err(Error::invalid(format!(
            "gini undefined for negative value {x}"
        )));
    }
    let s = sorted(v);
    let n = s.len() as f64;
    let total: f64 = s.iter().sum();
    if total == 0.0 || is_constant(&s) {
        return Ok(0.0);
    }
    // on sorted input sum_ij |x_i - x_j| = 2 sum_i (2i - n - 1) x_i, i 1-based
    let weighted: f64 = s
        .iter()
        .enumerate()
        .map(|(i, &x)| (2.0 * (i as f64 + 1.0) - n - 1.0) * x)
        .sum();
    Ok(weighted / (n * total))
}

/// Sample skewness g1 = m3 / m2^(3/2); 0 below three values or for
/// constant input.
pub fn skewness(v: &[f64]) -> f64 {
    let s = sorted(v);
    if s.len() < 3 || is_constant(&s) {
        return 0.0;
    }
    let (m2, m3, _) = central_moments(&s);
    m3 / m2.powf(1.5)
}

/// Excess kurtosis g2 = m4 / m2^2 - 3; 0 below three values or for
/// constant input.
pub fn kurtosis(v: &[f64]) -> f64 {
    let s = sorted(v);
    if s.len() < 3 || is_constant(&s) {
        return 0.0;
    }
    let (m2, _, m4) = central_moments(&s);
    m4 / (m2 * m2) - 3.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn entropy_of_uniform_is_ln_n() {
        for n in 1..20 {
            let v: Vec<f64> = (0..n).flat_map(|i| [i as f64, i as f64]).collect();
            assert!(close(entropy(&v), (n as f64).ln()), "n={n}");
        }
    }

    #[test]
    fn gini_cases() {
        assert_eq!(gini(&[3.0, 3.0, 3.0]).unwrap(), 0.0);
        assert_eq!(gini(&[0.0, 0.0]).unwrap(), 0.0);
        // (0, 1): sum |xi - xj| = 2, n = 2, mean = .5 -> 2 / (2 * 4 * .5) = .5
        assert!(close(gini(&[0.0, 1.0]).unwrap(), 0.5));
        assert!(gini(&[-1.0, 2.0]).is_err());
    }

    #[test]
    fn symmetric_vector_has_no_skew() {
        assert_eq!(skewness(&[1.0, 2.0, 3.0]), 0.0);
        assert!(close(skewness(&[1.0, 5.0, 9.0, 3.0, 7.0]), 0.0));
    }

    #[test]
    fn known_moments() {
        // (1, 2, 10): mean 13/3, deviations (-10/3, -7/3, 17/3)
        let v = [1.0, 2.0, 10.0];
        let m2: f64 = (100.0 + 49.0 + 289.0) / 27.0;
        let m3: f64 = (-1000.0 - 343.0 + 4913.0) / 81.0;
        let m4: f64 = (10000.0 + 2401.0 + 83521.0) / 243.0;
        assert!(close(skewness(&v), m3 / m2.powf(1.5)));
        assert!(close(kurtosis(&v), m4 / (m2 * m2) - 3.0));
        assert!(close(sd(&v), (m2 * 1.5).sqrt()));
    }

    #[test]
    fn short_and_constant_vectors_are_zero() {
        assert_eq!(sd(&[1.0, 9.0]), 0.0);
        assert_eq!(skewness(&[1.0, 9.0]), 0.0);
        assert_eq!(kurtosis(&[2.0, 2.0, 2.0, 2.0]), 0.0);
        assert_eq!(sd(&[0.1, 0.1, 0.1]), 0.0);
    }

    #[test]
    fn mode_and_median() {
        assert_eq!(mode(&[3.0, 1.0, 3.0, 1.0, 2.0]), 1.0);
        assert_eq!(mode(&[5.0, 4.0, 5.0]), 5.0);
        assert_eq!(median(&[4.0, 1.0, 3.0]), 3.0);
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), 2.5);
        assert_eq!(max(&[1.0, 7.0, 3.0]), 7.0);
        assert_eq!(min(&[1.0, 7.0, 3.0]), 1.0);
    }

    proptest! {
        #[test]
        fn order_does_not_matter(mut v in proptest::collection::vec(0.0f64..100.0, 1..40), seed in any::<u64>()) {
            let before = (mean(&v), sd(&v), entropy(&v), gini(&v).unwrap(), skewness(&v), kurtosis(&v), mode(&v), median(&v));
            use rand::{seq::SliceRandom, SeedableRng};
            v.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let after = (mean(&v), sd(&v), entropy(&v), gini(&v).unwrap(), skewness(&v), kurtosis(&v), mode(&v), median(&v));
            prop_assert_eq!(before, after);
        }

        #[test]
        fn gini_in_unit_interval(v in proptest::collection::vec(0.0f64..100.0, 1..40)) {
            let g = gini(&v).unwrap();
            prop_assert!((0.0..1.0).contains(&g));
        }
    }
}
