//! Disk pairs, their intersection angles, the canonical frame and the bipolar transform.
//!
//! Points are complex numbers. In the canonical frame the intersection points sit at
//! `-1` and `1`, the exterior arc of disk 0 lies in the lower half-plane, and the
//! horizontal line of height `sigma` in the strip is carried by [`bipolar`] onto the
//! circle returned by [`circle_of_line`].

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};

const TANGENCY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disk {
    pub center: Complex64,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: Complex64, radius: f64) -> Result<Self> {
        if radius.is_nan() || radius <= 0.0 || !radius.is_finite() || !center.re.is_finite() || !center.im.is_finite() {
            return Err(Error::InvalidInput(format!("disk radius must be positive, got {radius}")));
        }
        Ok(Self { center, radius })
    }

    pub fn point_at(&self, phi: f64) -> Complex64 {
        self.center + Complex64::from_polar(self.radius, phi)
    }

    pub fn contains(&self, p: Complex64) -> bool {
        (p - self.center).norm() < self.radius
    }

    /// Signed distance to the boundary circle, positive inside.
    pub fn depth(&self, p: Complex64) -> f64 {
        self.radius - (p - self.center).norm()
    }
}

/// Counter-clockwise angular interval `[start, end]` on a circle, `end - start` in `(0, 2pi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub start: f64,
    pub end: f64,
}

impl Arc {
    pub fn width(&self) -> f64 {
        self.end - self.start
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.start + self.end)
    }

    pub fn half_aperture(&self) -> f64 {
        0.5 * self.width()
    }

    pub fn contains(&self, phi: f64) -> bool {
        (phi - self.start).rem_euclid(TAU) <= self.width()
    }

    /// Complementary arc on the same circle.
    pub fn complement(&self) -> Arc {
        Arc { start: self.end, end: self.start + TAU }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Interior,
    Exterior,
}

/// Orientation-preserving similarity `z -> (z - shift) * factor`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Similarity {
    pub shift: Complex64,
    pub factor: Complex64,
}

impl Similarity {
    pub fn apply(&self, z: Complex64) -> Complex64 {
        (z - self.shift) * self.factor
    }

    pub fn invert(&self, w: Complex64) -> Complex64 {
        w / self.factor + self.shift
    }

    /// Length scale: canonical lengths times `scale()` give physical lengths.
    pub fn scale(&self) -> f64 {
        1.0 / self.factor.norm()
    }
}

/// Interior and exterior arcs of each boundary circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcDecomposition {
    pub interior: [Arc; 2],
    pub exterior: [Arc; 2],
}

impl ArcDecomposition {
    pub fn arc(&self, disk: usize, side: Side) -> Arc {
        match side {
            Side::Interior => self.interior[disk],
            Side::Exterior => self.exterior[disk],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoDiskGeometry {
    pub disks: [Disk; 2],
    pub a1: Complex64,
    pub a2: Complex64,
    pub theta: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub canonical_map: Similarity,
    pub arcs: ArcDecomposition,
}

/// Triangle area from side lengths, in Kahan's cancellation-free arrangement.
fn heron(a: f64, b: f64, c: f64) -> f64 {
    let mut s = [a, b, c];
    s.sort_by(|x, y| y.total_cmp(x));
    let [a, b, c] = s;
    0.25 * ((a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c))).max(0.0).sqrt()
}

/// Builds the intersection data of two properly overlapping disks.
pub fn intersect(d1: Disk, d2: Disk) -> Result<TwoDiskGeometry> {
    let (r1, r2) = (d1.radius, d2.radius);
    let axis = d2.center - d1.center;
    let d = axis.norm();
    let tol = TANGENCY_TOL * r1.max(r2);
    if d >= r1 + r2 - tol {
        return Err(Error::DegenerateGeometry(format!(
            "disks are disjoint or tangent (d = {d}, r1 + r2 = {})",
            r1 + r2
        )));
    }
    if d <= (r1 - r2).abs() + tol {
        return Err(Error::DegenerateGeometry(format!(
            "one disk contains the other (d = {d}, |r1 - r2| = {})",
            (r1 - r2).abs()
        )));
    }
    // Twice the triangle area gives the sines; atan2 keeps the angles accurate near tangency.
    let area2 = 2.0 * heron(r1, r2, d);
    let cos_b1 = (d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1);
    let theta = area2.atan2((r1 * r1 + r2 * r2 - d * d) / 2.0);
    let beta1 = area2.atan2((d * d + r1 * r1 - r2 * r2) / 2.0);
    let beta2 = area2.atan2((d * d + r2 * r2 - r1 * r1) / 2.0);

    let e = axis / d;
    let foot = d1.center + e * (r1 * cos_b1);
    let half_chord = area2 / d;
    let i = Complex64::i();
    let a1 = foot + i * e * half_chord;
    let a2 = foot - i * e * half_chord;
    let canonical_map = Similarity { shift: foot, factor: i * e.conj() / half_chord };

    let toward = e.arg();
    let away = (-e).arg();
    let int0 = Arc { start: toward - beta1, end: toward + beta1 };
    let int1 = Arc { start: away - beta2, end: away + beta2 };
    let arcs = ArcDecomposition {
        interior: [int0, int1],
        exterior: [int0.complement(), int1.complement()],
    };

    Ok(TwoDiskGeometry {
        disks: [d1, d2],
        a1,
        a2,
        theta,
        beta1,
        beta2,
        sigma1: beta1,
        sigma2: PI - beta2,
        canonical_map,
        arcs,
    })
}

impl TwoDiskGeometry {
    /// Two disks of radius `radius` meeting at angle `theta`, disk 0 below disk 1.
    pub fn symmetric(theta: f64, radius: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < PI) {
            return Err(Error::ThetaOutOfRange(theta));
        }
        let half = radius * (0.5 * theta).sin();
        intersect(
            Disk::new(Complex64::new(0.0, -half), radius)?,
            Disk::new(Complex64::new(0.0, half), radius)?,
        )
    }

    pub fn other(disk: usize) -> usize {
        1 - disk
    }

    pub fn beta(&self, disk: usize) -> f64 {
        if disk == 0 {
            self.beta1
        } else {
            self.beta2
        }
    }

    /// Height of the strip line whose bipolar image is the given arc.
    pub fn line_height(&self, disk: usize, side: Side) -> f64 {
        match (disk, side) {
            (0, Side::Exterior) => self.sigma1,
            (0, Side::Interior) => self.sigma1 + PI,
            (_, Side::Interior) => self.sigma2,
            (_, Side::Exterior) => self.sigma2 + PI,
        }
    }

    /// Physical point with strip coordinates `(tau, sigma)`.
    pub fn strip_point(&self, tau: f64, sigma: f64) -> Complex64 {
        let (anchor, delta) = anchored_bipolar(tau, sigma);
        let a = if anchor > 0 { self.a2 } else { self.a1 };
        a + delta / self.canonical_map.factor
    }

    /// Polar angle about the center of `disk` of the point `(tau, sigma)`, computed from the
    /// nearest intersection point so that it stays accurate as `|tau|` grows.
    pub fn strip_angle(&self, disk: usize, tau: f64, sigma: f64) -> f64 {
        let (anchor, delta) = anchored_bipolar(tau, sigma);
        let a = if anchor > 0 { self.a2 } else { self.a1 };
        (a - self.disks[disk].center + delta / self.canonical_map.factor).arg()
    }

    /// Arc-length density `ds/dtau` of the line `sigma` in physical units.
    pub fn arc_length_density(&self, tau: f64, sigma: f64) -> f64 {
        self.canonical_map.scale() / bipolar_denominator(tau, sigma)
    }
}

/// `cosh(tau) - cos(sigma)`, evaluated without cancellation near `(0, 0)`.
pub fn bipolar_denominator(tau: f64, sigma: f64) -> f64 {
    let a = (0.5 * tau).sinh();
    let b = (0.5 * sigma).sin();
    2.0 * (a * a + b * b)
}

pub fn bipolar(tau: f64, sigma: f64) -> Complex64 {
    let den = bipolar_denominator(tau, sigma);
    Complex64::new(tau.sinh() / den, -sigma.sin() / den)
}

/// Canonical-frame bipolar point as `anchor + delta` with `anchor = +-1` the nearer
/// intersection point. `delta` keeps full relative precision for large `|tau|`.
pub fn anchored_bipolar(tau: f64, sigma: f64) -> (i8, Complex64) {
    let zeta = Complex64::new(tau, sigma);
    if tau >= 0.0 {
        (1, 2.0 / (zeta.exp() - 1.0))
    } else {
        (-1, 2.0 / (1.0 - (-zeta).exp()))
    }
}

pub fn inverse_bipolar(p: Complex64) -> Result<(f64, f64)> {
    if p.im == 0.0 && p.re.abs() >= 1.0 {
        return Err(Error::OutOfDomain { re: p.re, im: p.im });
    }
    let q = (p + 1.0) / (p - 1.0);
    let tau = ((p + 1.0).norm() / (p - 1.0).norm()).ln();
    let sigma = q.arg().rem_euclid(TAU);
    Ok((tau, sigma))
}

/// The disk bounded by the image of the line of height `sigma` in `(0, pi)`.
pub fn circle_of_line(sigma: f64) -> Disk {
    Disk { center: Complex64::new(0.0, -1.0 / sigma.tan()), radius: 1.0 / sigma.sin() }
}
