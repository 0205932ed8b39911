//! A harmonic function on two overlapping disks with prescribed algebraic decay of its
//! Fourier coefficients on the first circle, for discretization-error studies.
//!
//! `U = 2 Re F(w) - 1` with `F(w) = Li_{k+1}(w) / w` and `w` the normalized position on
//! circle 1 rotated so that the branch point `w = 1` sits at the point of circle 1 farthest
//! from disk 2. The trace on circle 1 has coefficients of modulus `(1 + |l|)^{-(k+1)}`.

use std::f64::consts::TAU;
use std::sync::Arc as Shared;

use num_complex::Complex64;
use polylog::Li;

use crate::disk_harmonic::{fourier_coefficients, GlobalTrace, TraceFunction};
use crate::error::{Error, Result};
use crate::geometry::TwoDiskGeometry;
use crate::quadrature::{integrate_arc, PeriodicRule, QuadratureConfig};
use crate::schwarz::{solve_system, BoundaryData};

#[derive(Debug, Clone)]
pub struct Manufactured {
    pub geom: TwoDiskGeometry,
    pub k: i32,
    /// Unit vector from the center of disk 1 to the branch point.
    unit: Complex64,
    /// Trace coefficients on circle 2, accurate to machine precision.
    circle2: TraceFunction,
}

/// Modes kept for the circle-2 trace; its coefficients decay geometrically.
const CIRCLE2_BANDWIDTH: usize = 2048;

impl Manufactured {
    pub fn new(geom: &TwoDiskGeometry, k: i32) -> Result<Self> {
        if k < 1 {
            return Err(Error::InvalidInput(format!("smoothness index must be >= 1, got {k}")));
        }
        let axis = geom.disks[1].center - geom.disks[0].center;
        let unit = -axis / axis.norm();
        let mut m = Self { geom: *geom, k, unit, circle2: TraceFunction::zeros(1, 0) };
        let rule = PeriodicRule::new(4 * CIRCLE2_BANDWIDTH);
        let samples: Vec<Complex64> = rule.nodes().iter().map(|&phi| m.value(geom.disks[1].point_at(phi))).collect();
        m.circle2 = fourier_coefficients(1, &samples, &rule, CIRCLE2_BANDWIDTH).0;
        Ok(m)
    }

    pub fn branch_point(&self) -> Complex64 {
        self.geom.disks[0].center + self.unit * self.geom.disks[0].radius
    }

    pub fn value(&self, z: Complex64) -> Complex64 {
        let d = self.geom.disks[0];
        let w = (z - d.center) / (d.radius * self.unit);
        let f = if w.norm() < 1e-3 {
            // Series of Li_{k+1}(w) / w.
            (0..12).map(|m| w.powi(m) / ((m + 1) as f64).powi(self.k + 1)).sum()
        } else {
            // Pin the imaginary part's sign so the cut is approached from above.
            let w = if w.im == 0.0 { Complex64::new(w.re, 0.0) } else { w };
            w.li(self.k + 1) / w
        };
        Complex64::new(2.0 * f.re - 1.0, 0.0)
    }

    pub fn boundary(&self) -> BoundaryData {
        let me = self.clone();
        Shared::new(move |j, phi| me.value(me.geom.disks[j].point_at(phi)))
    }

    /// Exact Fourier coefficient of the trace on circle 1.
    pub fn coefficient1(&self, l: i64) -> Complex64 {
        let m = l.unsigned_abs() as i32;
        let mag = 1.0 / ((m + 1) as f64).powi(self.k + 1);
        if l == 0 {
            Complex64::new(1.0, 0.0)
        } else if l > 0 {
            self.unit.conj().powi(m) * mag
        } else {
            self.unit.powi(m) * mag
        }
    }

    pub fn trace(&self, disk: usize, bandwidth: usize) -> TraceFunction {
        match disk {
            0 => TraceFunction::from_coefficients(0, (-(bandwidth as i64)..=bandwidth as i64).map(|l| self.coefficient1(l)).collect()),
            _ => self.circle2.with_bandwidth(bandwidth),
        }
    }

    /// `||P_L^perp u||_H^2` on each circle.
    pub fn tail_norm_sq(&self, bandwidth: usize) -> [f64; 2] {
        let r1 = self.geom.disks[0].radius;
        let p = 2 * (self.k + 1);
        let start = bandwidth as f64 + 2.0;
        let cutoff = 200_000usize;
        let mut sum: f64 = (0..cutoff).map(|j| (start + j as f64).powi(-p)).sum();
        // Euler-Maclaurin remainder.
        let end = start + cutoff as f64;
        sum += end.powi(1 - p) / (p - 1) as f64 + 0.5 * end.powi(-p);
        let t1 = TAU * r1 * 2.0 * sum;
        let r2 = self.geom.disks[1].radius;
        let t2 = TAU * r2 * self.circle2.modes().filter(|l| l.unsigned_abs() as usize > bandwidth).map(|l| self.circle2.coefficient(l).norm_sqr()).sum::<f64>();
        [t1, t2]
    }

    /// `P_L g` for the data `g = u` on the exterior arcs and `0` on the interior arcs.
    pub fn projected_data(&self, bandwidth: usize, quad: &QuadratureConfig) -> GlobalTrace {
        let l = bandwidth as i64;
        let arc_integral = |disk: usize, start: f64, end: f64| -> Vec<Complex64> {
            let rule = quad.arc_rule(start, end, 2 * bandwidth + 64);
            let d = self.geom.disks[disk];
            let vals: Vec<Complex64> = rule.nodes.iter().map(|&phi| self.value(d.point_at(phi))).collect();
            (-l..=l)
                .map(|m| {
                    let f: Vec<Complex64> = rule.nodes.iter().zip(&vals).map(|(&phi, v)| v * Complex64::from_polar(1.0, -(m as f64) * phi)).collect();
                    integrate_arc(&f, &rule, 1.0) / TAU
                })
                .collect()
        };
        let int1 = self.geom.arcs.interior[0];
        let inner = arc_integral(0, int1.start, int1.end);
        let c1 = (-l..=l).zip(inner).map(|(m, v)| self.coefficient1(m) - v).collect();
        let ext2 = self.geom.arcs.exterior[1];
        let c2 = arc_integral(1, ext2.start, ext2.end);
        GlobalTrace { parts: vec![TraceFunction::from_coefficients(0, c1), TraceFunction::from_coefficients(1, c2)] }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorSample {
    pub bandwidth: usize,
    /// `||u - u_L||_H`.
    pub error: f64,
    /// `||P_L^perp u||_H`.
    pub best: f64,
}

/// Galerkin error of the direct solve at one bandwidth.
pub fn discretization_error(m: &Manufactured, bandwidth: usize, quad: &QuadratureConfig) -> Result<ErrorSample> {
    let disks = m.geom.disks;
    let u_l = solve_system(&disks, bandwidth, quad, &m.projected_data(bandwidth, quad))?;
    let tails = m.tail_norm_sq(bandwidth);
    let mut err = tails[0] + tails[1];
    for (disk, part) in u_l.parts.iter().enumerate() {
        let exact = m.trace(disk, bandwidth);
        let r = disks[disk].radius;
        err += TAU * r * part.coefficients.iter().zip(&exact.coefficients).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>();
    }
    Ok(ErrorSample { bandwidth, error: err.sqrt(), best: (tails[0] + tails[1]).sqrt() })
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x.ln(), b + y.ln()));
    let (mx, my) = (sx / n, sy / n);
    let (num, den) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| {
        let dx = x.ln() - mx;
        (a + dx * (y.ln() - my), b + dx * dx)
    });
    num / den
}

/// `(1 + sqrt 2) / (1 - f(theta))`.
pub fn cea_constant(theta: f64) -> f64 {
    (1.0 + 2f64.sqrt()) / (1.0 - crate::spectral::f(theta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disk_harmonic::poisson_integral;
    use crate::quadrature::Profile;
    use std::f64::consts::PI;

    fn geom() -> TwoDiskGeometry {
        TwoDiskGeometry::symmetric(PI / 2.0, 1.0).unwrap()
    }

    #[test]
    fn circle1_coefficients_match_samples() {
        for k in [1, 2] {
            let m = Manufactured::new(&geom(), k).unwrap();
            let rule = PeriodicRule::new(1 << 16);
            let d = m.geom.disks[0];
            let samples: Vec<Complex64> = rule.nodes().iter().map(|&phi| m.value(d.point_at(phi))).collect();
            let (t, _) = fourier_coefficients(0, &samples, &rule, 20);
            for l in -20i64..=20 {
                assert!((t.coefficient(l) - m.coefficient1(l)).norm() < 1e-8);
                let want = 1.0 / (1.0 + l.abs() as f64).powi(k + 1);
                assert!((m.coefficient1(l).norm() - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn harmonic_across_both_disks() {
        // Value inside disk 2 agrees with the Poisson integral of the circle-2 trace.
        let m = Manufactured::new(&geom(), 1).unwrap();
        let rule = PeriodicRule::new(4096);
        let d = m.geom.disks[1];
        let samples: Vec<Complex64> = rule.nodes().iter().map(|&phi| m.value(d.point_at(phi))).collect();
        for x in [d.center, d.center + Complex64::new(0.3, -0.4)] {
            let (v, _) = poisson_integral(&samples, &rule, 1, &d, x).unwrap();
            assert!((v - m.value(x)).norm() < 1e-10);
        }
        assert!(m.geom.disks[1].depth(m.branch_point()) < 0.0);
    }

    #[test]
    fn tail_is_consistent() {
        let m = Manufactured::new(&geom(), 2).unwrap();
        let a = m.tail_norm_sq(10)[0];
        let b = m.tail_norm_sq(11)[0];
        let r1 = m.geom.disks[0].radius;
        assert!(((a - b) - TAU * r1 * 2.0 / 12f64.powi(6)).abs() < 1e-15);
    }

    #[test]
    fn error_is_at_least_best_approximation() {
        let m = Manufactured::new(&geom(), 1).unwrap();
        let quad = QuadratureConfig::new(Profile::Standard);
        let s = discretization_error(&m, 8, &quad).unwrap();
        assert!(s.error >= s.best);
        assert!(s.error <= cea_constant(m.geom.theta) * s.best);
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = [8.0, 16.0, 32.0].iter().map(|&x: &f64| (x, 3.0 * x.powf(-1.5))).collect();
        assert!((loglog_slope(&pts) + 1.5).abs() < 1e-12);
    }
}
