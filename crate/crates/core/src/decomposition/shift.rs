//! Shift-variable distributions and the closed-form quantities derived from
//! their tails.

use std::fmt;
use std::str::FromStr;

use rand::distributions::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::Seed;

/// A continuous distribution on `[0, inf)` with `F(0) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ShiftDistribution {
    /// `F(x) = 1 - (1 + x)^(-alpha)`.
    PolyTail { alpha: f64 },
    /// `F(x) = 1 - exp(-lambda x)`.
    Exponential { lambda: f64 },
}

impl ShiftDistribution {
    pub fn poly_tail(alpha: f64) -> Result<Self, String> {
        if alpha.is_finite() && alpha > 0.0 {
            Ok(ShiftDistribution::PolyTail { alpha })
        } else {
            Err(format!(
                "poly-tail exponent must be finite and > 0, got {alpha}"
            ))
        }
    }

    /// `lambda = 0` is accepted as the degenerate `G = 1` case, but cannot
    /// be sampled.
    pub fn exponential(lambda: f64) -> Result<Self, String> {
        if lambda.is_finite() && lambda >= 0.0 {
            Ok(ShiftDistribution::Exponential { lambda })
        } else {
            Err(format!(
                "exponential rate must be finite and >= 0, got {lambda}"
            ))
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match *self {
            ShiftDistribution::PolyTail { alpha } => Some(alpha),
            ShiftDistribution::Exponential { .. } => None,
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        1.0 - self.tail(x)
    }

    /// `G(x) = 1 - F(x)`.
    pub fn tail(&self, x: f64) -> f64 {
        let x = x.max(0.0);
        match *self {
            ShiftDistribution::PolyTail { alpha } => (1.0 + x).powf(-alpha),
            ShiftDistribution::Exponential { lambda } => (-lambda * x).exp(),
        }
    }

    pub fn density(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        match *self {
            ShiftDistribution::PolyTail { alpha } => alpha * (1.0 + x).powf(-alpha - 1.0),
            ShiftDistribution::Exponential { lambda } => lambda * (-lambda * x).exp(),
        }
    }

    /// Inverse CDF on `(0, 1)`.
    pub fn inverse_cdf(&self, u: f64) -> f64 {
        match *self {
            ShiftDistribution::PolyTail { alpha } => (1.0 - u).powf(-1.0 / alpha) - 1.0,
            ShiftDistribution::Exponential { lambda } => -(1.0 - u).ln() / lambda,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.sample(Open01);
        self.inverse_cdf(u).max(0.0)
    }
}

impl fmt::Display for ShiftDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShiftDistribution::PolyTail { alpha } => write!(f, "poly:{alpha}"),
            ShiftDistribution::Exponential { lambda } => write!(f, "exp:{lambda}"),
        }
    }
}

impl FromStr for ShiftDistribution {
    type Err = String;

    /// `poly:ALPHA` or `exp:LAMBDA`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, param) = s
            .split_once(':')
            .ok_or_else(|| format!("`{s}`: expected name:param"))?;
        let value: f64 = param
            .parse()
            .map_err(|_| format!("`{s}`: bad parameter `{param}`"))?;
        match name {
            "poly" | "poly_tail" => ShiftDistribution::poly_tail(value),
            "exp" | "exponential" => ShiftDistribution::exponential(value),
            other => Err(format!("unknown shift distribution `{other}`")),
        }
    }
}

/// I.i.d. shifts by inverse-CDF sampling.
pub fn sample_shifts(dist: &ShiftDistribution, n: usize, seed: Seed) -> Vec<f64> {
    let mut rng = seed.rng();
    (0..n).map(|_| dist.sample(&mut rng)).collect()
}

/// The `x*` with `G(x*) = n^-3`: any single shift exceeds it with
/// probability exactly `n^-3`, so all `n` stay below it except with
/// probability at most `n^-2`.
pub fn radius_tail_bound(dist: &ShiftDistribution, n: usize) -> f64 {
    let n = n.max(1) as f64;
    match *dist {
        ShiftDistribution::PolyTail { alpha } => n.powf(3.0 / alpha) - 1.0,
        ShiftDistribution::Exponential { lambda } => 3.0 * n.ln() / lambda,
    }
}

/// `sup_{x >= q} (G(x) / G(x + 2) - 1)`.
///
/// Only the width-2 window is implemented; it is the one the adjacency
/// bounds need. For the poly tail the ratio `((x + 3) / (x + 1))^alpha` is
/// decreasing in `x`, so the supremum sits at `x = q`.
pub fn tail_ratio_sup(dist: &ShiftDistribution, q: f64) -> f64 {
    match *dist {
        ShiftDistribution::PolyTail { alpha } => ((q + 3.0) / (q + 1.0)).powf(alpha) - 1.0,
        ShiftDistribution::Exponential { lambda } => (2.0 * lambda).exp_m1(),
    }
}

/// Exponent `gamma(q)` for the moment bound, with the premise
/// `e^gamma - 1 <= F(1) / (2 * sup-ratio)` evaluated for the poly tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentExponent {
    pub alpha: f64,
    pub q: f64,
    pub gamma: f64,
    pub premise_lhs: f64,
    pub premise_rhs: f64,
    pub premise_holds: bool,
}

/// `gamma(q) = e^(-2 alpha / (1 + q)) / 6`.
pub fn moment_exponent(alpha: f64, q: f64) -> MomentExponent {
    let gamma = (-2.0 * alpha / (1.0 + q)).exp() / 6.0;
    let f1 = 1.0 - 2f64.powf(-alpha);
    let sup = tail_ratio_sup(&ShiftDistribution::PolyTail { alpha }, q);
    let premise_lhs = gamma.exp_m1();
    let premise_rhs = if sup > 0.0 {
        f1 / (2.0 * sup)
    } else {
        f64::INFINITY
    };
    MomentExponent {
        alpha,
        q,
        gamma,
        premise_lhs,
        premise_rhs,
        premise_holds: premise_lhs <= premise_rhs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(alpha: f64) -> ShiftDistribution {
        ShiftDistribution::poly_tail(alpha).unwrap()
    }

    // Numeric supremum of G(x)/G(x+2) - 1 over a dense grid on [q, q + 100].
    fn grid_sup(dist: &ShiftDistribution, q: f64) -> f64 {
        (0..=200_000)
            .map(|i| q + 100.0 * i as f64 / 200_000.0)
            .map(|x| dist.tail(x) / dist.tail(x + 2.0) - 1.0)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn inverse_cdf_examples() {
        assert!((poly(1.0).inverse_cdf(0.75) - 3.0).abs() < 1e-12);
        assert!(poly(2.5).inverse_cdf(1e-15) < 1e-12);
        let exp = ShiftDistribution::exponential(1.0).unwrap();
        assert!((exp.inverse_cdf(1.0 - (-2.0f64).exp()) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cdf_shape() {
        for dist in [
            poly(0.5),
            poly(3.0),
            ShiftDistribution::exponential(2.0).unwrap(),
        ] {
            assert_eq!(dist.cdf(0.0), 0.0);
            let mut last = 0.0;
            for i in 0..1000 {
                let f = dist.cdf(i as f64 * 0.1);
                assert!(f >= last);
                last = f;
            }
            assert!(dist.cdf(1e12) > 1.0 - 1e-5);
            // inverse really inverts
            for u in [0.1, 0.5, 0.9] {
                assert!((dist.cdf(dist.inverse_cdf(u)) - u).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn density_matches_cdf_derivative() {
        let dist = poly(2.0);
        for x in [0.0, 0.5, 3.0] {
            let h = 1e-6;
            let fd = (dist.cdf(x + h) - dist.cdf((x - h).max(0.0))) / (x + h - (x - h).max(0.0));
            assert!((fd - dist.density(x)).abs() < 1e-4);
        }
    }

    #[test]
    fn radius_tail_bound_examples() {
        assert!((radius_tail_bound(&poly(3.0), 10) - 9.0).abs() < 1e-9);
        // alpha = 3 ln n / ln t  =>  x* = t - 1
        let (n, t) = (1000usize, 7.0f64);
        let alpha = 3.0 * (n as f64).ln() / t.ln();
        assert!((radius_tail_bound(&poly(alpha), n) - (t - 1.0)).abs() < 1e-9);
        // exponential(1) with n = e: G(x) = e^-x = e^-3
        let x = 3.0 * 1f64.exp().ln();
        assert!((x - 3.0).abs() < 1e-12);
        let exp = ShiftDistribution::exponential(1.0).unwrap();
        let b = radius_tail_bound(&exp, 20);
        assert!((exp.tail(b) - 20f64.powi(-3)).abs() < 1e-15);
    }

    #[test]
    fn tail_ratio_examples() {
        assert!((tail_ratio_sup(&poly(1.0), 0.0) - 2.0).abs() < 1e-12);
        assert!((tail_ratio_sup(&poly(2.0), 1.0) - 3.0).abs() < 1e-12);
        assert_eq!(
            tail_ratio_sup(&ShiftDistribution::exponential(0.0).unwrap(), 4.0),
            0.0
        );
    }

    #[test]
    fn tail_ratio_matches_grid_sup() {
        for dist in [
            poly(1.0),
            poly(2.0),
            poly(4.5),
            ShiftDistribution::exponential(0.7).unwrap(),
        ] {
            for q in [0.0, 1.0, 2.5, 7.0] {
                let exact = tail_ratio_sup(&dist, q);
                let numeric = grid_sup(&dist, q);
                assert!(
                    ((exact - numeric) / exact).abs() < 1e-9,
                    "{dist} q={q}: {exact} vs {numeric}"
                );
            }
        }
    }

    #[test]
    fn moment_exponent_examples() {
        // 2 alpha / (1 + q) -> 0 gives 1/6
        assert!((moment_exponent(1e-12, 0.0).gamma - 1.0 / 6.0).abs() < 1e-10);
        let m = moment_exponent(5.0, 0.0);
        assert!((m.gamma - (-10.0f64).exp() / 6.0).abs() < 1e-18);
        // both sides of the premise from their closed forms
        let lhs = ((-10.0f64).exp() / 6.0).exp() - 1.0;
        let rhs = (1.0 - 2f64.powi(-5)) / (2.0 * (3f64.powi(5) - 1.0));
        assert!((m.premise_lhs - lhs).abs() < 1e-15);
        assert!((m.premise_rhs - rhs).abs() < 1e-15);
        assert_eq!(m.premise_holds, lhs <= rhs);
        assert!(m.premise_holds);
    }

    #[test]
    fn parse_distribution() {
        assert_eq!("poly:4".parse::<ShiftDistribution>().unwrap(), poly(4.0));
        assert!("poly:-1".parse::<ShiftDistribution>().is_err());
        assert!("poly:0".parse::<ShiftDistribution>().is_err());
        assert!("exp:-2".parse::<ShiftDistribution>().is_err());
        assert!("gauss:1".parse::<ShiftDistribution>().is_err());
    }

    #[test]
    fn empirical_cdf_converges() {
        // Kolmogorov-Smirnov distance at 1e5 samples
        let dist = poly(2.0);
        let mut xs = sample_shifts(&dist, 100_000, Seed(42));
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        let ks = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = dist.cdf(x);
                (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks < 0.02, "KS distance {ks}");
    }

    #[test]
    fn sampling_is_deterministic() {
        let d = poly(3.0);
        assert_eq!(
            sample_shifts(&d, 50, Seed(9)),
            sample_shifts(&d, 50, Seed(9))
        );
        assert!(sample_shifts(&d, 50, Seed(9)).iter().all(|&x| x >= 0.0));
    }
}
