//! Shapiro-Wilk W test, following Royston's algorithm AS R94 (1995): the
//! weights are polynomial corrections to normalised expected normal order
//! statistics, and W is mapped to a normal deviate with separate
//! normalisations for `4 <= n <= 11` and `12 <= n <= 5000`. For `n = 3` the
//! distribution of W is known exactly.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use super::{Method, TestReport};
use crate::error::{domain, Error, Result};
use crate::specfn::{normal_cdf_unchecked, normal_quantile_unchecked};

const MIN_N: usize = 3;
const MAX_N: usize = 5000;

const G: [f64; 2] = [-2.273, 0.459];
const C1: [f64; 6] = [0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056];
const C2: [f64; 6] = [0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633];
const C3: [f64; 4] = [0.544, -0.39978, 0.025054, -6.714e-4];
const C4: [f64; 4] = [1.3822, -0.77857, 0.062767, -0.0020322];
const C5: [f64; 4] = [-1.5861, -0.31082, -0.083751, 0.0038915];
const C6: [f64; 3] = [-0.4803, -0.082676, 0.0030302];

fn poly(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Shapiro-Wilk weights for a fixed sample size, reusable across samples.
#[derive(Debug, Clone)]
pub struct ShapiroWilk {
    n: usize,
    /// Weights for the lower half of the order statistics, largest first.
    half: Vec<f64>,
}

impl ShapiroWilk {
    pub fn new(n: usize) -> Result<Self> {
        if !(MIN_N..=MAX_N).contains(&n) {
            return domain(format!("Shapiro-Wilk needs 3 <= n <= 5000, got {n}"));
        }
        let nn2 = n / 2;
        if n == 3 {
            return Ok(Self {
                n,
                half: vec![FRAC_1_SQRT_2],
            });
        }
        let an = n as f64;
        let an25 = an + 0.25;
        let mut m: Vec<f64> = (1..=nn2)
            .map(|i| normal_quantile_unchecked((i as f64 - 0.375) / an25))
            .collect();
        let summ2 = 2.0 * m.iter().map(|v| v * v).sum::<f64>();
        let ssumm2 = summ2.sqrt();
        let rsn = 1.0 / an.sqrt();
        let a1 = poly(&C1, rsn) - m[0] / ssumm2;

        let (first_scaled, fac) = if n > 5 {
            let a2 = -m[1] / ssumm2 + poly(&C2, rsn);
            let fac = ((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1])
                / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2))
                .sqrt();
            m[1] = a2;
            (2, fac)
        } else {
            let fac = ((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1)).sqrt();
            (1, fac)
        };
        m[0] = a1;
        for v in &mut m[first_scaled..] {
            *v /= -fac;
        }
        Ok(Self { n, half: m })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Full antisymmetric coefficient vector for the sorted sample.
    pub fn coefficients(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.coefficient(i)).collect()
    }

    fn coefficient(&self, i: usize) -> f64 {
        let j = self.n - 1 - i;
        match i.cmp(&j) {
            std::cmp::Ordering::Less => -self.half[i],
            std::cmp::Ordering::Greater => self.half[j],
            std::cmp::Ordering::Equal => 0.0,
        }
    }

    /// Returns `(W, p)` for a sample of the prepared size.
    pub fn statistic(&self, y: &[f64]) -> Result<(f64, f64)> {
        if y.len() != self.n {
            return domain(format!("prepared for n = {} but got {} values", self.n, y.len()));
        }
        if let Some(bad) = y.iter().find(|v| !v.is_finite()) {
            return domain(format!("Shapiro-Wilk got non-finite value {bad}"));
        }
        let mut x = y.to_vec();
        x.sort_by(f64::total_cmp);
        let n = self.n;
        let range = x[n - 1] - x[0];
        if range <= 0.0 {
            return Err(Error::Degenerate("all values are equal".into()));
        }

        // W as the squared correlation between scaled data and weights;
        // 1 - W is formed directly to keep precision when W is close to 1.
        let an = n as f64;
        let sa = (0..n).map(|i| self.coefficient(i)).sum::<f64>() / an;
        let sx = x.iter().map(|v| v / range).sum::<f64>() / an;
        let (mut ssa, mut ssx, mut sax) = (0.0, 0.0, 0.0);
        for (i, xi) in x.iter().enumerate() {
            let asa = self.coefficient(i) - sa;
            let xsx = xi / range - sx;
            ssa += asa * asa;
            ssx += xsx * xsx;
            sax += asa * xsx;
        }
        let ssassx = (ssa * ssx).sqrt();
        let w1 = (ssassx - sax) * (ssassx + sax) / (ssa * ssx);
        let w = (1.0 - w1).min(1.0);

        Ok((w, p_value(w, w1, n)))
    }

    pub fn test(&self, y: &[f64], alpha: f64) -> Result<TestReport> {
        super::check_alpha(alpha)?;
        let (w, p) = self.statistic(y)?;
        Ok(TestReport::new(w, p, alpha, Method::ShapiroWilk { n: self.n }))
    }
}

fn p_value(w: f64, w1: f64, n: usize) -> f64 {
    if n == 3 {
        // 6/π (asin √W − asin √(3/4))
        let pw = 6.0 / PI * (w.sqrt().asin() - PI / 3.0);
        return pw.clamp(0.0, 1.0);
    }
    let an = n as f64;
    let mut y = w1.ln();
    let (m, s) = if n <= 11 {
        let gamma = poly(&G, an);
        if y >= gamma {
            return 1e-99;
        }
        y = -(gamma - y).ln();
        (poly(&C3, an), poly(&C4, an).exp())
    } else {
        let ln_n = an.ln();
        (poly(&C5, ln_n), poly(&C6, ln_n).exp())
    };
    // upper tail of N(m, s)
    normal_cdf_unchecked(-(y - m) / s)
}

/// Shapiro-Wilk normality test of `y` at level `alpha`.
pub fn shapiro_wilk(y: &[f64], alpha: f64) -> Result<TestReport> {
    ShapiroWilk::new(y.len())?.test(y, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_points_on_a_line() {
        let r = shapiro_wilk(&[1.0, 2.0, 3.0], 0.05).unwrap();
        assert!((r.statistic - 1.0).abs() < 1e-12);
        assert!((r.p_value - 1.0).abs() < 1e-9);
        assert!(!r.reject);
    }

    #[test]
    fn constant_sample_is_degenerate() {
        assert!(matches!(
            shapiro_wilk(&[2.0; 10], 0.05),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn size_limits() {
        assert!(matches!(shapiro_wilk(&[1.0, 2.0], 0.05), Err(Error::Domain(_))));
        let big: Vec<f64> = (0..5001).map(|i| i as f64).collect();
        assert!(matches!(shapiro_wilk(&big, 0.05), Err(Error::Domain(_))));
        assert!(shapiro_wilk(&big[..5000], 0.05).is_ok());
    }

    #[test]
    fn weights_are_antisymmetric_unit_vector() {
        for n in [3, 4, 5, 6, 11, 12, 50, 501] {
            let a = ShapiroWilk::new(n).unwrap().coefficients();
            let norm: f64 = a.iter().map(|v| v * v).sum();
            assert!((norm - 1.0).abs() < 1e-10, "n = {n}: {norm}");
            for i in 0..n {
                assert_eq!(a[i], -a[n - 1 - i]);
            }
        }
    }

    #[test]
    fn invariant_under_location_and_scale() {
        let y = [0.3, -1.2, 0.8, 2.2, -0.4, 0.1, 1.7, -0.9, 0.05, 0.6, -2.1, 1.1];
        let (w0, p0) = ShapiroWilk::new(12).unwrap().statistic(&y).unwrap();
        let z: Vec<f64> = y.iter().map(|v| 5.0 + 3.0 * v).collect();
        let (w1, p1) = ShapiroWilk::new(12).unwrap().statistic(&z).unwrap();
        assert!((w0 - w1).abs() < 1e-12 && (p0 - p1).abs() < 1e-10);
    }

    #[test]
    fn linear_sequences_match_published_w() {
        // W for 1..n as reported by common reference implementations
        for (n, w) in [(5usize, 0.9868), (10, 0.9702), (20, 0.9604)] {
            let y: Vec<f64> = (1..=n).map(|i| i as f64).collect();
            let r = shapiro_wilk(&y, 0.05).unwrap();
            assert!((r.statistic - w).abs() < 1e-3, "n = {n}: {}", r.statistic);
        }
    }
}
