//! Functions on horizontal lines of the strip, the strip Poisson kernel and its Fourier
//! symbol, weighted norms and the Hardy norm on the dual strip.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::bipolar_denominator;
use crate::quadrature::{integrate_line, LineRule};

const SYMBOL_TAYLOR_RADIUS: f64 = 1e-4;

/// Poisson kernel of the strip at distance `theta` from the boundary line.
pub fn poisson_kernel(tau: f64, theta: f64) -> f64 {
    theta.sin() / (TAU * bipolar_denominator(tau, theta))
}

/// Values on the nodes of a line rule, on the line of height `sigma`.
#[derive(Debug, Clone, PartialEq)]
pub struct StripSample {
    pub sigma: f64,
    pub rule: LineRule,
    pub values: Vec<Complex64>,
}

impl StripSample {
    pub fn from_fn(sigma: f64, rule: &LineRule, f: impl Fn(f64) -> Complex64) -> Self {
        Self { sigma, rule: rule.clone(), values: rule.nodes().into_iter().map(f).collect() }
    }

    pub fn zeros(sigma: f64, rule: &LineRule) -> Self {
        Self { sigma, rule: rule.clone(), values: vec![Complex64::new(0.0, 0.0); rule.len()] }
    }

    pub fn add(&self, other: &StripSample) -> Result<StripSample> {
        if self.rule != other.rule || (self.sigma - other.sigma).abs() > 1e-12 {
            return Err(Error::GridMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(StripSample { sigma: self.sigma, rule: self.rule.clone(), values })
    }

    pub fn scaled(&self, s: Complex64) -> StripSample {
        StripSample { sigma: self.sigma, rule: self.rule.clone(), values: self.values.iter().map(|v| v * s).collect() }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// `P_theta * g` on the same grid, labelled with height `sigma + theta`.
pub fn convolve(g: &StripSample, theta: f64) -> Result<StripSample> {
    convolve_to(g, theta, g.sigma + theta)
}

/// `P_d * g` with `d = |target - sigma|`, labelled with height `target`.
pub fn convolve_between(g: &StripSample, target: f64) -> Result<StripSample> {
    convolve_to(g, (target - g.sigma).abs(), target)
}

fn convolve_to(g: &StripSample, theta: f64, target: f64) -> Result<StripSample> {
    if !(theta > 0.0 && theta < PI) || !(target > 0.0 && target < TAU) {
        return Err(Error::InvalidInput(format!("convolution by P_{theta} from line {} leaves the strip", g.sigma)));
    }
    let rule = &g.rule;
    let n = rule.len();
    let kernel: Vec<f64> = (0..n).map(|k| poisson_kernel(k as f64 * rule.h, theta)).collect();
    let weighted: Vec<Complex64> = (0..n).map(|j| g.values[j] * rule.weight(j)).collect();
    let values = (0..n)
        .into_par_iter()
        .map(|k| {
            weighted
                .iter()
                .enumerate()
                .map(|(j, w)| w * kernel[k.abs_diff(j)])
                .sum::<Complex64>()
        })
        .collect();
    Ok(StripSample { sigma: target, rule: rule.clone(), values })
}

/// Norm of `L^2` with weight `1/(cosh tau - cos sigma)`.
pub fn weighted_norm(g: &StripSample) -> f64 {
    let s: Vec<Complex64> = g
        .rule
        .nodes()
        .iter()
        .zip(&g.values)
        .map(|(&t, v)| Complex64::new(v.norm_sqr() / bipolar_denominator(t, g.sigma), 0.0))
        .collect();
    integrate_line(&s, &g.rule).re.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Multiplication by `(cosh tau - cos sigma)^{-1/2}` (forward) or its inverse.
pub fn weight_map(g: &StripSample, direction: Direction) -> StripSample {
    let values = g
        .rule
        .nodes()
        .iter()
        .zip(&g.values)
        .map(|(&t, v)| {
            let w = bipolar_denominator(t, g.sigma).sqrt();
            match direction {
                Direction::Forward => v / w,
                Direction::Inverse => v * w,
            }
        })
        .collect();
    StripSample { sigma: g.sigma, rule: g.rule.clone(), values }
}

/// Plain `L^2(R)` norm of line samples.
pub fn l2_norm(g: &StripSample) -> f64 {
    let s: Vec<Complex64> = g.values.iter().map(|v| Complex64::new(v.norm_sqr(), 0.0)).collect();
    integrate_line(&s, &g.rule).re.sqrt()
}

fn expm1(w: Complex64) -> Complex64 {
    if w.norm() < 1e-2 {
        let mut term = w;
        let mut acc = w;
        for k in 2..10 {
            term = term * w / k as f64;
            acc += term;
        }
        acc
    } else {
        w.exp() - 1.0
    }
}

/// Fourier symbol `sinh((pi - theta) z) / sinh(pi z)` of the kernel `P_theta`.
pub fn symbol(z: Complex64, theta: f64) -> Complex64 {
    let a = PI - theta;
    let b = PI;
    if z.norm() < SYMBOL_TAYLOR_RADIUS {
        let z2 = z * z;
        let num = 1.0 + z2 * (a * a / 6.0) + z2 * z2 * (a.powi(4) / 120.0);
        let den = 1.0 + z2 * (b * b / 6.0) + z2 * z2 * (b.powi(4) / 120.0);
        return num / den * (a / b);
    }
    // Even in z; write the ratio with decaying exponentials to avoid overflow.
    let z = if z.re < 0.0 { -z } else { z };
    (z * (a - b)).exp() * expm1(z * (-2.0 * a)) / expm1(z * (-2.0 * b))
}

/// Samples of a function of the dual strip on the lines `Im z = 1/2, 0, -1/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct HardyLines {
    pub rule: LineRule,
    pub top: Vec<Complex64>,
    pub mid: Vec<Complex64>,
    pub bottom: Vec<Complex64>,
}

impl HardyLines {
    pub fn from_fn(rule: &LineRule, f: impl Fn(Complex64) -> Complex64) -> Self {
        let nodes = rule.nodes();
        let line = |y: f64| nodes.iter().map(|&x| f(Complex64::new(x, y))).collect();
        Self { rule: rule.clone(), top: line(0.5), mid: line(0.0), bottom: line(-0.5) }
    }
}

/// Hardy inner product, conjugate-linear in `a`.
pub fn hardy_inner(a: &HardyLines, b: &HardyLines, sigma: f64) -> Result<Complex64> {
    if a.rule != b.rule {
        return Err(Error::GridMismatch);
    }
    let c = sigma.cos();
    let s: Vec<Complex64> = (0..a.rule.len())
        .map(|k| {
            0.5 * (a.top[k].conj() * b.top[k] + a.bottom[k].conj() * b.bottom[k]) - c * a.mid[k].conj() * b.mid[k]
        })
        .collect();
    Ok(integrate_line(&s, &a.rule) / TAU)
}

pub fn hardy_norm(h: &HardyLines, sigma: f64) -> Result<f64> {
    let n2 = hardy_inner(h, h, sigma)?.re;
    let scale = [&h.top, &h.mid, &h.bottom]
        .iter()
        .flat_map(|v| v.iter())
        .map(|z| z.norm_sqr())
        .fold(0.0, f64::max)
        * h.rule.t;
    if n2 < -1e-12 * scale.max(1.0) {
        return Err(Error::NegativeNorm(n2));
    }
    Ok(n2.max(0.0).sqrt())
}

/// `cos^2` taper rising over the outer `fraction` of the grid on each side.
pub fn taper(rule: &LineRule, fraction: f64) -> Vec<f64> {
    let inner = rule.t * (1.0 - fraction);
    rule.nodes()
        .iter()
        .map(|&t| {
            let a = t.abs();
            if a <= inner {
                1.0
            } else {
                let u = (a - inner) / (rule.t - inner);
                (0.5 * PI * u).cos().powi(2)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn std_rule() -> LineRule {
        LineRule::new(40.0, 0.05)
    }

    #[test]
    fn kernel_values() {
        assert!((poisson_kernel(0.0, PI / 2.0) - 1.0 / TAU).abs() < 1e-16);
        for &(tau, theta) in &[(0.3f64, 0.4f64), (2.0, 1.1), (-1.5, 2.9)] {
            let want = theta.sin() / (TAU * (tau.cosh() + theta.cos()));
            assert!((poisson_kernel(tau, PI - theta) - want).abs() < 1e-15);
        }
        let rule = std_rule();
        for theta in [PI / 4.0, PI / 2.0, 3.0 * PI / 4.0] {
            let s: Vec<_> = rule.nodes().iter().map(|&t| c(poisson_kernel(t, theta), 0.0)).collect();
            assert!((integrate_line(&s, &rule).re - (PI - theta) / PI).abs() < 1e-10);
        }
    }

    #[test]
    fn kernel_even_positive() {
        let rule = std_rule();
        for theta in [0.2, 1.3, 3.0] {
            for t in rule.nodes() {
                let p = poisson_kernel(t, theta);
                assert!(p > 0.0);
                assert_eq!(p, poisson_kernel(-t, theta));
            }
        }
    }

    #[test]
    fn convolve_constant() {
        let rule = std_rule();
        let one = StripSample::from_fn(0.5, &rule, |_| c(1.0, 0.0));
        let out = convolve(&one, 1.2).unwrap();
        assert!((out.sigma - 1.7).abs() < 1e-15);
        let mass = (PI - 1.2) / PI;
        let mid = rule.len() / 2;
        for k in mid - 200..=mid + 200 {
            assert!((out.values[k] - c(mass, 0.0)).norm() < 1e-10);
        }
        assert!(convolve(&one, 6.0).is_err());
        let high = StripSample::from_fn(5.0, &rule, |_| c(1.0, 0.0));
        assert!(convolve(&high, 2.0).is_err());
    }

    #[test]
    fn convolve_narrow_gaussian() {
        let rule = LineRule::new(20.0, 0.005);
        let theta = 1.0;
        let mut prev = f64::INFINITY;
        for width in [0.2, 0.1, 0.05] {
            let g = StripSample::from_fn(0.3, &rule, |t| c((-(t / width).powi(2)).exp() / (width * PI.sqrt()), 0.0));
            let out = convolve(&g, theta).unwrap();
            let err = rule
                .nodes()
                .iter()
                .zip(&out.values)
                .map(|(&t, v)| (v.re - poisson_kernel(t, theta)).abs())
                .fold(0.0, f64::max);
            assert!(err < prev);
            prev = err;
        }
        assert!(prev < 2e-3);
    }

    #[test]
    fn convolve_multiplier() {
        let rule = std_rule();
        let w = taper(&rule, 0.25);
        let nodes = rule.nodes();
        for &(xi, theta) in &[(0.7, PI / 2.0), (2.0, 1.0), (-1.3, 2.4)] {
            let g = StripSample { sigma: 0.2, rule: rule.clone(), values: nodes.iter().zip(&w).map(|(&t, &wt)| Complex64::from_polar(wt, xi * t)).collect() };
            let out = convolve(&g, theta).unwrap();
            let s = symbol(c(xi, 0.0), theta);
            for (k, &t) in nodes.iter().enumerate() {
                if t.abs() < 10.0 {
                    assert!((out.values[k] - s * Complex64::from_polar(1.0, xi * t)).norm() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn weighted_norm_examples() {
        let rule = std_rule();
        let one = StripSample::from_fn(PI / 2.0, &rule, |_| c(1.0, 0.0));
        assert!((weighted_norm(&one) - PI.sqrt()).abs() < 1e-10);
        assert_eq!(weighted_norm(&StripSample::zeros(1.0, &rule)), 0.0);
        let f = weight_map(&one, Direction::Forward);
        assert!((f.values[rule.len() / 2] - c(1.0, 0.0)).norm() < 1e-15);
        let g = StripSample::from_fn(2.3, &rule, |t| c((0.3 * t).cos(), (0.1 * t).sin()));
        let back = weight_map(&weight_map(&g, Direction::Forward), Direction::Inverse);
        for (a, b) in back.values.iter().zip(&g.values) {
            assert!((a - b).norm() < 1e-14 * (1.0 + b.norm()));
        }
        assert!((l2_norm(&weight_map(&g, Direction::Forward)) - weighted_norm(&g)).abs() < 1e-12);
    }

    #[test]
    fn symbol_examples() {
        for theta in [0.3, PI / 2.0, 2.8] {
            assert!((symbol(c(0.0, 0.0), theta) - c((PI - theta) / PI, 0.0)).norm() < 1e-15);
            assert!((symbol(c(0.0, 0.5), theta).norm() - (theta / 2.0).cos()).abs() < 1e-14);
            // Continuity across the Taylor switch.
            let inside = symbol(c(0.99e-4, 0.3e-5), theta);
            let outside = symbol(c(1.01e-4, 0.3e-5), theta);
            assert!((inside - outside).norm() < 1e-8);
        }
        assert!((symbol(c(0.0, 0.0), PI / 2.0) - c(0.5, 0.0)).norm() < 1e-15);
        let rule = std_rule();
        let s: Vec<_> = rule.nodes().iter().map(|&t| Complex64::from_polar(poisson_kernel(t, PI / 2.0), -2.0 * t)).collect();
        assert!((integrate_line(&s, &rule) - symbol(c(2.0, 0.0), PI / 2.0)).norm() < 1e-8);
        let big = symbol(c(400.0, 0.2), 1.0);
        assert!(big.is_finite() && big.norm() < 1e-100);
    }

    #[test]
    fn symbol_fourier_transform_on_interval() {
        let rule = std_rule();
        for theta in [PI / 4.0, PI / 2.0, 3.0 * PI / 4.0] {
            for k in 0..=100 {
                let x = -5.0 + 0.1 * k as f64;
                let s: Vec<_> = rule.nodes().iter().map(|&t| Complex64::from_polar(poisson_kernel(t, theta), -x * t)).collect();
                assert!((integrate_line(&s, &rule) - symbol(c(x, 0.0), theta)).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn symbol_sup_on_strip() {
        for theta in [PI / 6.0, PI / 2.0, 5.0 * PI / 6.0] {
            let target = (theta / 2.0).cos();
            let mut best = 0.0f64;
            for i in -400..=400 {
                for j in -50..=50 {
                    let z = c(0.01 * i as f64, 0.01 * j as f64);
                    let v = symbol(z, theta).norm();
                    best = best.max(v);
                    assert!(v <= target + 1e-12);
                    if v > target - 1e-6 {
                        assert!((z - c(0.0, 0.5)).norm().min((z + c(0.0, 0.5)).norm()) < 0.05);
                    }
                }
            }
            assert!((best - target).abs() < 1e-6);
        }
    }

    #[test]
    fn symbol_difference_bounds() {
        for k in 1..=40 {
            let theta = PI / 2.0 * k as f64 / 40.0;
            for i in -500..=500 {
                let x = 0.02 * i as f64;
                let d = symbol(c(x, 0.0), theta).norm_sqr() - symbol(c(x, 0.0), PI - theta).norm_sqr();
                assert!(d >= -1e-14);
                assert!(d <= 1.0 - 2.0 * theta / PI + 1e-14);
            }
            assert!(1.0 - 2.0 * theta / PI <= theta.cos() + 1e-15);
        }
    }

    #[test]
    fn hardy_norm_of_symbol() {
        let rule = LineRule::new(60.0, 0.01);
        for sigma in [0.7, PI / 2.0, 2.2] {
            let h = HardyLines::from_fn(&rule, |z| symbol(z, sigma));
            let n = hardy_norm(&h, sigma).unwrap();
            assert!((n * n - sigma.sin() * (PI - sigma) / (2.0 * PI * PI)).abs() < 1e-10);
        }
        let h = HardyLines::from_fn(&rule, |z| symbol(z, PI / 2.0));
        assert!((hardy_norm(&h, PI / 2.0).unwrap().powi(2) - 1.0 / (4.0 * PI)).abs() < 1e-10);
        let zero = HardyLines::from_fn(&rule, |_| c(0.0, 0.0));
        assert_eq!(hardy_norm(&zero, 1.0).unwrap(), 0.0);
        let bad = HardyLines { rule: rule.clone(), top: zero.top.clone(), mid: vec![c(1.0, 0.0); rule.len()], bottom: zero.bottom.clone() };
        assert!(matches!(hardy_norm(&bad, 0.5), Err(Error::NegativeNorm(_))));
    }

    #[test]
    fn reproducing_kernel() {
        let rule = LineRule::new(60.0, 0.01);
        for sigma in [0.7, PI / 2.0, 2.2] {
            for sigma_h in [0.9, 1.9] {
                let h = HardyLines::from_fn(&rule, |z| symbol(z, sigma_h));
                for z0 in [c(0.0, 0.0), c(0.0, 0.3), c(0.5, 0.2)] {
                    let k = HardyLines::from_fn(&rule, |z| symbol(z - z0.conj(), sigma));
                    let got = hardy_inner(&k, &h, sigma).unwrap() * (TAU / sigma.sin());
                    assert!((got - symbol(z0, sigma_h)).norm() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn composition_multiplies_symbols() {
        // Not a semigroup: symbols multiply, so masses do too.
        let rule = std_rule();
        let one = StripSample::from_fn(0.1, &rule, |_| c(1.0, 0.0));
        let two = convolve(&convolve(&one, 0.8).unwrap(), 1.1).unwrap();
        let want = (PI - 0.8) * (PI - 1.1) / (PI * PI);
        assert!((two.values[rule.len() / 2].re - want).abs() < 1e-10);
        assert!((want - (PI - 1.9) / PI).abs() > 0.05);
    }

    #[test]
    fn grid_mismatch() {
        let a = StripSample::zeros(1.0, &std_rule());
        let b = StripSample::zeros(1.0, &LineRule::new(40.0, 0.1));
        assert_eq!(a.add(&b), Err(Error::GridMismatch));
    }

    proptest! {
        #[test]
        fn sup_contraction(seed in 0u64..500, theta in 0.5f64..3.0) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let rule = LineRule::new(20.0, 0.1);
            let amps: Vec<(f64, f64, f64)> = (0..4).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-3.0..3.0), rng.gen_range(-1.0..1.0))).collect();
            let g = StripSample::from_fn(0.0, &rule, |t| amps.iter().map(|&(a, f, p)| Complex64::new(a * (f * t + p).cos(), 0.0)).sum());
            let out = convolve(&g, theta).unwrap();
            prop_assert!(out.sup_norm() <= (PI - theta) / PI * g.sup_norm() + 1e-12);
        }
    }
}
