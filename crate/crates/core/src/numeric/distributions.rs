//! Chi-square and F distribution tails.

use serde::{Deserialize, Serialize};

use super::special::{regularized_beta, regularized_gamma, Evaluated};
use crate::error::{Error, Result};

/// Values below this are reported as underflowed zeros.
pub const UNDERFLOW: f64 = 1e-300;

/// A tail probability with its achieved accuracy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailProbability {
    pub value: f64,
    pub achieved_relative_error: f64,
    /// The true value is positive but below [`UNDERFLOW`].
    pub underflow: bool,
}

impl TailProbability {
    pub fn exact(value: f64) -> Self {
        TailProbability {
            value,
            achieved_relative_error: 0.0,
            underflow: false,
        }
    }

    fn from_evaluated(e: Evaluated) -> Self {
        if e.value < UNDERFLOW {
            TailProbability {
                value: 0.0,
                achieved_relative_error: 1.0,
                underflow: e.value == 0.0 || e.value < UNDERFLOW,
            }
        } else {
            TailProbability {
                value: e.value.min(1.0),
                achieved_relative_error: e.relative_error,
                underflow: false,
            }
        }
    }
}

fn check_statistic(x: f64) -> Result<()> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain(format!("statistic must be a nonnegative number, got {x}")));
    }
    Ok(())
}

/// Upper tail `P(χ²_df > x)`.
pub fn chi2_sf(x: f64, df: usize) -> Result<TailProbability> {
    check_statistic(x)?;
    if df == 0 {
        return Err(Error::Domain("chi-square needs df >= 1".into()));
    }
    if x <= 0.0 {
        return Ok(TailProbability::exact(1.0));
    }
    if x == f64::INFINITY {
        return Ok(TailProbability {
            value: 0.0,
            achieved_relative_error: 0.0,
            underflow: false,
        });
    }
    let (_, q) = regularized_gamma(df as f64 / 2.0, x / 2.0)?;
    Ok(TailProbability::from_evaluated(q))
}

/// Lower tail `P(χ²_df <= x)`.
pub fn chi2_cdf(x: f64, df: usize) -> Result<f64> {
    check_statistic(x)?;
    if df == 0 {
        return Err(Error::Domain("chi-square needs df >= 1".into()));
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return Ok(1.0);
    }
    let (p, _) = regularized_gamma(df as f64 / 2.0, x / 2.0)?;
    Ok(p.value)
}

fn check_f_df(d1: f64, d2: f64) -> Result<()> {
    if !(d1 > 0.0) || !(d2 > 0.0) || !d1.is_finite() || !d2.is_finite() {
        return Err(Error::Domain(format!(
            "F distribution needs positive finite degrees of freedom ({d1}, {d2})"
        )));
    }
    Ok(())
}

/// Upper tail `P(F_{d1,d2} > x)`.
pub fn f_sf(x: f64, d1: f64, d2: f64) -> Result<TailProbability> {
    check_statistic(x)?;
    check_f_df(d1, d2)?;
    if x <= 0.0 {
        return Ok(TailProbability::exact(1.0));
    }
    if x == f64::INFINITY {
        return Ok(TailProbability::exact(0.0));
    }
    let denom = d2 + d1 * x;
    let e = regularized_beta(d2 / 2.0, d1 / 2.0, d2 / denom, d1 * x / denom)?;
    Ok(TailProbability::from_evaluated(e))
}

/// Lower tail `P(F_{d1,d2} <= x)`.
pub fn f_cdf(x: f64, d1: f64, d2: f64) -> Result<f64> {
    check_statistic(x)?;
    check_f_df(d1, d2)?;
    if x <= 0.0 {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return Ok(1.0);
    }
    let denom = d2 + d1 * x;
    Ok(regularized_beta(d1 / 2.0, d2 / 2.0, d1 * x / denom, d2 / denom)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Composite Simpson on `[a, b]` with `n` (even) panels.
    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(a + i as f64 * h);
        }
        s * h / 3.0
    }

    fn chi2_density(x: f64, df: f64) -> f64 {
        let k = df / 2.0;
        ((k - 1.0) * x.ln() - x / 2.0 - k * 2f64.ln() - super::super::special::ln_gamma(k)).exp()
    }

    fn f_density(x: f64, d1: f64, d2: f64) -> f64 {
        let lb = super::super::special::ln_gamma(d1 / 2.0) + super::super::special::ln_gamma(d2 / 2.0)
            - super::super::special::ln_gamma((d1 + d2) / 2.0);
        (0.5 * d1 * (d1 / d2).ln() + (0.5 * d1 - 1.0) * x.ln()
            - 0.5 * (d1 + d2) * (1.0 + d1 * x / d2).ln()
            - lb)
            .exp()
    }

    /// Upper tail by quadrature after mapping `[x, ∞)` onto `(0, 1]` with `t = x / u`.
    fn tail_by_quadrature(density: impl Fn(f64) -> f64, x: f64) -> f64 {
        simpson(
            |u| if u == 0.0 { 0.0 } else { density(x / u) * x / (u * u) },
            0.0,
            1.0,
            20_000,
        )
    }

    #[test]
    fn chi2_matches_quadrature() {
        for &(x, df) in &[(3.841_459, 1usize), (5.991_465, 2), (10.0, 7), (30.0, 20), (1.0, 4)] {
            let oracle = tail_by_quadrature(|t| chi2_density(t, df as f64), x);
            assert_relative_eq!(chi2_sf(x, df).unwrap().value, oracle, max_relative = 1e-8);
        }
        assert_relative_eq!(chi2_sf(3.841_459, 1).unwrap().value, 0.05, max_relative = 1e-6);
    }

    #[test]
    fn agrees_with_independent_library() {
        use statrs::distribution::{ChiSquared, ContinuousCDF, FisherSnedecor};
        for &df in &[1usize, 2, 5, 17, 120, 1854] {
            let dist = ChiSquared::new(df as f64).unwrap();
            for &scale in &[0.1, 0.5, 0.9, 1.0, 1.1, 1.5, 3.0] {
                let x = scale * df as f64;
                let want = dist.sf(x);
                if want > 1e-280 {
                    assert_relative_eq!(chi2_sf(x, df).unwrap().value, want, max_relative = 1e-9);
                }
            }
        }
        for &(d1, d2) in &[(1.0, 4.0), (3.0, 38.0), (19.0, 380.0), (2.0, 1e5)] {
            let dist = FisherSnedecor::new(d1, d2).unwrap();
            for &x in &[0.2, 1.0, 2.5, 6.0] {
                assert_relative_eq!(f_sf(x, d1, d2).unwrap().value, dist.sf(x), max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn chi2_two_df_closed_form() {
        for &x in &[0.01, 0.5, 1.0, 3.0, 10.0, 50.0, 300.0] {
            let got = chi2_sf(x, 2).unwrap().value;
            assert_relative_eq!(got, (-x / 2.0).exp(), max_relative = 1e-12);
        }
    }

    #[test]
    fn chi2_sf_and_cdf_sum_to_one() {
        for &(x, df) in &[(0.3, 1usize), (5.0, 3), (100.0, 90), (1900.0, 1854)] {
            let s = chi2_sf(x, df).unwrap().value + chi2_cdf(x, df).unwrap();
            assert_relative_eq!(s, 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn f_matches_quadrature() {
        for &(x, d1, d2) in &[(4.0, 2.0, 10.0), (1.0, 3.0, 20.0), (2.5, 5.0, 5.0), (0.4, 1.0, 30.0)] {
            let oracle = tail_by_quadrature(|t| f_density(t, d1, d2), x);
            assert_relative_eq!(f_sf(x, d1, d2).unwrap().value, oracle, max_relative = 1e-7);
        }
        // With d1 = 2 the tail is (1 + 2x/d2)^(-d2/2).
        assert_relative_eq!(f_sf(4.0, 2.0, 10.0).unwrap().value, 1.8f64.powi(-5), max_relative = 1e-12);
    }

    #[test]
    fn f_equal_df_is_median_one() {
        for &d in &[1.0, 2.0, 7.0, 40.0, 1000.0] {
            assert_relative_eq!(f_sf(1.0, d, d).unwrap().value, 0.5, max_relative = 1e-12);
        }
    }

    #[test]
    fn f_approaches_scaled_chi2_as_d2_grows() {
        let (x, d1) = (2.0, 3.0);
        let target = chi2_sf(x * d1, 3).unwrap().value;
        let err = |d2: f64| (f_sf(x, d1, d2).unwrap().value - target).abs();
        assert!(err(1e3) < err(1e2));
        assert!(err(1e6) < 1e-5);
    }

    #[test]
    fn tails_are_monotone() {
        let mut prev = 1.0;
        for i in 1..200 {
            let v = chi2_sf(i as f64 * 0.5, 5).unwrap().value;
            assert!(v <= prev);
            prev = v;
        }
        let mut prev = 1.0;
        for i in 1..200 {
            let v = f_sf(i as f64 * 0.1, 4.0, 38.0).unwrap().value;
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn edge_cases() {
        assert_eq!(chi2_sf(0.0, 3).unwrap().value, 1.0);
        assert_eq!(chi2_sf(f64::INFINITY, 3).unwrap().value, 0.0);
        assert!(chi2_sf(1.0, 0).is_err());
        assert!(chi2_sf(f64::NAN, 1).is_err());
        assert!(chi2_sf(-1.0, 1).is_err());
        assert!(f_sf(-0.5, 1.0, 2.0).is_err());
        assert_eq!(f_sf(f64::INFINITY, 1.0, 2.0).unwrap().value, 0.0);
        assert!(f_sf(1.0, 0.0, 2.0).is_err());
        let tiny = chi2_sf(5000.0, 1).unwrap();
        assert!(tiny.underflow);
        assert_eq!(tiny.value, 0.0);
    }
}
