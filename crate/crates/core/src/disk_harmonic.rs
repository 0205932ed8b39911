//! Boundary traces on a circle as Fourier coefficients, their harmonic extensions and the
//! disk Poisson integral.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result, Warning};
use crate::geometry::Disk;
use crate::quadrature::PeriodicRule;

/// Boundary function on circle `disk` with coefficients `c_l`, `l = -L..=L`, of the unit
/// modulus basis `e^{i l phi}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceFunction {
    pub disk: usize,
    pub bandwidth: usize,
    pub coefficients: Vec<Complex64>,
    pub samples: Option<Vec<Complex64>>,
}

impl TraceFunction {
    pub fn zeros(disk: usize, bandwidth: usize) -> Self {
        Self { disk, bandwidth, coefficients: vec![Complex64::new(0.0, 0.0); 2 * bandwidth + 1], samples: None }
    }

    pub fn from_coefficients(disk: usize, coefficients: Vec<Complex64>) -> Self {
        assert!(coefficients.len() % 2 == 1, "coefficient vector must have odd length");
        let bandwidth = coefficients.len() / 2;
        Self { disk, bandwidth, coefficients, samples: None }
    }

    pub fn constant(disk: usize, bandwidth: usize, value: Complex64) -> Self {
        let mut t = Self::zeros(disk, bandwidth);
        t.coefficients[bandwidth] = value;
        t
    }

    pub fn coefficient(&self, l: i64) -> Complex64 {
        if l.unsigned_abs() as usize > self.bandwidth {
            return Complex64::new(0.0, 0.0);
        }
        self.coefficients[(l + self.bandwidth as i64) as usize]
    }

    pub fn modes(&self) -> impl Iterator<Item = i64> {
        let l = self.bandwidth as i64;
        -l..=l
    }

    pub fn norm_sq(&self, radius: f64) -> f64 {
        TAU * radius * self.coefficients.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    /// Coordinates in the orthonormal basis `e^{i l phi} / sqrt(2 pi r)`.
    pub fn to_orthonormal(&self, radius: f64) -> Vec<Complex64> {
        let s = (TAU * radius).sqrt();
        self.coefficients.iter().map(|c| c * s).collect()
    }

    pub fn from_orthonormal(disk: usize, radius: f64, coords: &[Complex64]) -> Self {
        let s = (TAU * radius).sqrt();
        Self::from_coefficients(disk, coords.iter().map(|c| c / s).collect())
    }

    /// Fourier series value at polar angle `phi`.
    pub fn synthesize(&self, phi: f64) -> Complex64 {
        let z = Complex64::from_polar(1.0, phi);
        self.evaluate_w(z)
    }

    /// Truncated series at the normalized point `w = (x - c)/r` with `|w| <= 1`.
    fn evaluate_w(&self, w: Complex64) -> Complex64 {
        let l = self.bandwidth;
        let mut pos = Complex64::new(0.0, 0.0);
        for k in (0..=l).rev() {
            pos = pos * w + self.coefficients[l + k];
        }
        let wc = w.conj();
        let mut neg = Complex64::new(0.0, 0.0);
        for k in (1..=l).rev() {
            neg = neg * wc + self.coefficients[l - k];
        }
        pos + neg * wc
    }

    /// Coefficients truncated or zero-padded to a new bandwidth.
    pub fn with_bandwidth(&self, bandwidth: usize) -> Self {
        let mut t = Self::zeros(self.disk, bandwidth);
        for l in -(bandwidth as i64)..=(bandwidth as i64) {
            t.coefficients[(l + bandwidth as i64) as usize] = self.coefficient(l);
        }
        t
    }
}

/// A pair of traces, one per disk.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalTrace {
    pub parts: Vec<TraceFunction>,
}

impl GlobalTrace {
    pub fn norm_sq(&self, disks: &[Disk]) -> f64 {
        self.parts.iter().map(|t| t.norm_sq(disks[t.disk].radius)).sum()
    }

    pub fn norm(&self, disks: &[Disk]) -> f64 {
        self.norm_sq(disks).sqrt()
    }

    /// Concatenated orthonormal coordinates.
    pub fn to_orthonormal(&self, disks: &[Disk]) -> Vec<Complex64> {
        self.parts.iter().flat_map(|t| t.to_orthonormal(disks[t.disk].radius)).collect()
    }

    pub fn from_orthonormal(disks: &[Disk], bandwidth: usize, coords: &[Complex64]) -> Self {
        let n = 2 * bandwidth + 1;
        assert_eq!(coords.len(), n * disks.len());
        let parts = disks
            .iter()
            .enumerate()
            .map(|(j, d)| TraceFunction::from_orthonormal(j, d.radius, &coords[j * n..(j + 1) * n]))
            .collect();
        Self { parts }
    }
}

/// Coefficients `c_l` of boundary samples taken at the nodes of `rule`.
pub fn fourier_coefficients(
    disk: usize,
    samples: &[Complex64],
    rule: &PeriodicRule,
    bandwidth: usize,
) -> (TraceFunction, Option<Warning>) {
    assert_eq!(samples.len(), rule.m);
    let warning = (rule.m <= 2 * bandwidth).then_some(Warning::AliasRisk { nodes: rule.m, bandwidth });
    let nodes = rule.nodes();
    let scale = 1.0 / rule.m as f64;
    let coefficients = (-(bandwidth as i64)..=bandwidth as i64)
        .map(|l| {
            nodes
                .iter()
                .zip(samples)
                .map(|(&phi, g)| g * Complex64::from_polar(1.0, -(l as f64) * phi))
                .sum::<Complex64>()
                * scale
        })
        .collect();
    (TraceFunction { disk, bandwidth, coefficients, samples: Some(samples.to_vec()) }, warning)
}

/// Harmonic extension of a bandlimited trace, exact on the closed disk.
pub fn truncated_extension(t: &TraceFunction, disk: &Disk, x: Complex64) -> Result<Complex64> {
    let w = (x - disk.center) / disk.radius;
    let ratio = w.norm();
    if ratio > 1.0 + 1e-12 {
        return Err(Error::OutsideDisk { disk: t.disk, ratio });
    }
    Ok(t.evaluate_w(w))
}

/// Poisson integral of boundary samples on the nodes of `rule`.
pub fn poisson_integral(
    samples: &[Complex64],
    rule: &PeriodicRule,
    disk_index: usize,
    disk: &Disk,
    x: Complex64,
) -> Result<(Complex64, Option<Warning>)> {
    assert_eq!(samples.len(), rule.m);
    let r = disk.radius;
    let rel = x - disk.center;
    let ratio = rel.norm() / r;
    if ratio >= 1.0 {
        return Err(Error::OutsideDisk { disk: disk_index, ratio });
    }
    let gap = 1.0 - ratio;
    let warning = (gap < 10.0 * rule.weight()).then_some(Warning::NearBoundary { disk: disk_index, gap: gap * r });
    let num = r * r - rel.norm_sqr();
    let value = rule
        .nodes()
        .iter()
        .zip(samples)
        .map(|(&phi, g)| {
            let y = disk.point_at(phi);
            g * (num / (y - x).norm_sqr())
        })
        .sum::<Complex64>()
        * (rule.weight() / TAU);
    Ok((value, warning))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample(rule: &PeriodicRule, f: impl Fn(f64) -> Complex64) -> Vec<Complex64> {
        rule.nodes().into_iter().map(f).collect()
    }

    fn random_trace(rng: &mut ChaCha8Rng, disk: usize, l: usize) -> TraceFunction {
        TraceFunction::from_coefficients(
            disk,
            (0..2 * l + 1).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect(),
        )
    }

    #[test]
    fn coefficient_examples() {
        let rule = PeriodicRule::new(64);
        let (t, w) = fourier_coefficients(0, &sample(&rule, |p| Complex64::from_polar(1.0, 2.0 * p)), &rule, 4);
        assert!(w.is_none());
        for l in t.modes() {
            let want = if l == 2 { 1.0 } else { 0.0 };
            assert!((t.coefficient(l) - c(want, 0.0)).norm() < 1e-13);
        }
        let (t, _) = fourier_coefficients(0, &sample(&rule, |_| c(5.0, 0.0)), &rule, 4);
        assert!((t.coefficient(0) - c(5.0, 0.0)).norm() < 1e-13);
        assert!(t.coefficients.iter().map(|z| z.norm()).sum::<f64>() - 5.0 < 1e-12);
        let (_, w) = fourier_coefficients(0, &[c(0.0, 0.0); 8], &PeriodicRule::new(8), 4);
        assert!(matches!(w, Some(Warning::AliasRisk { .. })));
    }

    #[test]
    fn indicator_coefficients() {
        // Indicator of |phi - mid| < beta: c_0 = beta/pi, c_l = sin(l beta)/(pi l) e^{-i l mid}.
        let beta = 0.9;
        let mid = 0.4;
        let rule = PeriodicRule::new(1 << 16);
        let g = sample(&rule, |p| {
            let d = (p - mid + std::f64::consts::PI).rem_euclid(TAU) - std::f64::consts::PI;
            c(if d.abs() < beta { 1.0 } else { 0.0 }, 0.0)
        });
        let (t, _) = fourier_coefficients(0, &g, &rule, 6);
        for l in t.modes() {
            let want = if l == 0 {
                c(beta / std::f64::consts::PI, 0.0)
            } else {
                Complex64::from_polar((l as f64 * beta).sin() / (std::f64::consts::PI * l as f64), -(l as f64) * mid)
            };
            assert!((t.coefficient(l) - want).norm() < 1e-4);
        }
    }

    #[test]
    fn extension_examples() {
        let unit = Disk::new(c(0.0, 0.0), 1.0).unwrap();
        let one = TraceFunction::constant(0, 3, c(1.0, 0.0));
        for x in [c(0.1, 0.2), c(-0.7, 0.3), c(0.0, 0.99)] {
            assert!((truncated_extension(&one, &unit, x).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        }
        let mut z = TraceFunction::zeros(0, 3);
        z.coefficients[4] = c(1.0, 0.0);
        for x in [c(0.1, 0.2), c(-0.7, 0.3)] {
            assert!((truncated_extension(&z, &unit, x).unwrap() - x).norm() < 1e-15);
        }
        assert!(matches!(truncated_extension(&z, &unit, c(1.5, 0.0)), Err(Error::OutsideDisk { .. })));
    }

    #[test]
    fn poisson_examples() {
        let disk = Disk::new(c(0.5, -0.3), 1.7).unwrap();
        let rule = PeriodicRule::new(512);
        let ones = vec![c(1.0, 0.0); 512];
        let (v, _) = poisson_integral(&ones, &rule, 0, &disk, c(0.9, 0.4)).unwrap();
        assert!((v - c(1.0, 0.0)).norm() < 1e-12);
        let g = sample(&rule, |p| c(p.cos() * 3.0 + (2.0 * p).sin(), 0.0));
        let (t, _) = fourier_coefficients(0, &g, &rule, 4);
        let (v, _) = poisson_integral(&g, &rule, 0, &disk, disk.center).unwrap();
        assert!((v - t.coefficient(0)).norm() < 1e-13);
        for l in [-3i64, 1, 4] {
            let g = sample(&rule, |p| Complex64::from_polar(1.0, l as f64 * p));
            let (rho, phi) = (0.6, 1.1);
            let x = disk.center + Complex64::from_polar(rho * disk.radius, phi);
            let (v, _) = poisson_integral(&g, &rule, 0, &disk, x).unwrap();
            let want = Complex64::from_polar(rho.powi(l.abs() as i32), l as f64 * phi);
            assert!((v - want).norm() < 1e-12);
        }
        let near = disk.center + c(disk.radius * 0.999, 0.0);
        assert!(matches!(poisson_integral(&ones, &rule, 0, &disk, near).unwrap().1, Some(Warning::NearBoundary { .. })));
    }

    #[test]
    fn poisson_matches_extension() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let disk = Disk::new(c(-0.2, 0.1), 1.3).unwrap();
        let rule = PeriodicRule::new(512);
        for _ in 0..10 {
            let t = random_trace(&mut rng, 0, 32);
            let g = sample(&rule, |p| t.synthesize(p));
            let norm = t.norm_sq(disk.radius).sqrt();
            for k in 0..12 {
                let rho = rng.gen_range(0.0..0.9);
                let x = disk.center + Complex64::from_polar(rho * disk.radius, k as f64 * 0.5);
                let a = poisson_integral(&g, &rule, 0, &disk, x).unwrap().0;
                let b = truncated_extension(&t, &disk, x).unwrap();
                assert!((a - b).norm() <= 1e-9 * norm);
            }
        }
    }

    #[test]
    fn parseval() {
        let disk = Disk::new(c(0.0, 0.0), 2.0).unwrap();
        let f = |p: f64| c(1.0 / (1.3 + p.cos()), (p.sin() * 2.0).exp());
        let mut prev = f64::INFINITY;
        for m in [16usize, 32, 64, 128] {
            let rule = PeriodicRule::new(m);
            let g = sample(&rule, f);
            let (t, _) = fourier_coefficients(0, &g, &rule, (m - 1) / 2 - 1);
            let quad = crate::quadrature::integrate_circle(
                &g.iter().map(|v| c(v.norm_sqr(), 0.0)).collect::<Vec<_>>(),
                &rule,
                disk.radius,
            )
            .re;
            let gap = (quad - t.norm_sq(disk.radius)).abs();
            assert!(gap <= prev.max(1e-10));
            prev = gap;
        }
        assert!(prev < 1e-9);
    }

    #[test]
    fn orthonormal_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = random_trace(&mut rng, 1, 5);
        let v = t.to_orthonormal(0.7);
        let back = TraceFunction::from_orthonormal(1, 0.7, &v);
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        assert!((norm - t.norm_sq(0.7)).abs() < 1e-12);
        for (a, b) in back.coefficients.iter().zip(&t.coefficients) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    proptest! {
        #[test]
        fn maximum_principle(seed in 0u64..1000, rho in 0.0f64..0.95, phi in 0.0f64..TAU) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = random_trace(&mut rng, 0, 6);
            let disk = Disk::new(c(0.0, 0.0), 1.0).unwrap();
            let rule = PeriodicRule::new(256);
            let g: Vec<_> = sample(&rule, |p| c(t.synthesize(p).re, 0.0));
            let (lo, hi) = g.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v.re), b.max(v.re)));
            let v = poisson_integral(&g, &rule, 0, &disk, Complex64::from_polar(rho, phi)).unwrap().0.re;
            prop_assert!(v >= lo - 1e-10 && v <= hi + 1e-10);
        }
    }
}
