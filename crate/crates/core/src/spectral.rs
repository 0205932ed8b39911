//! Closed-form spectral theory of the two-disk problem and numerical spectral estimates of
//! the assembled operators.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::dtd::{disk_side_transfer, line_coefficients, BlockOperator, CMat, OperatorKind};
use crate::disk_harmonic::TraceFunction;
use crate::error::{Error, Result, Warning};
use crate::geometry::{Side, TwoDiskGeometry};
use crate::linalg;
use crate::quadrature::{LineRule, Profile, QuadratureConfig};
use crate::strip::{convolve_between, symbol, weighted_norm, StripSample};

/// Largest admissible overlap angle; `alpha` degenerates to `0/0` at `theta = pi`.
pub const THETA_MAX: f64 = PI - 1e-9;

fn pos(x: f64) -> f64 {
    x.max(0.0)
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta < THETA_MAX {
        Ok(())
    } else {
        Err(Error::ThetaOutOfRange(theta))
    }
}

pub fn alpha(theta: f64) -> f64 {
    let s2 = (theta / 2.0).sin().powi(2);
    let t2 = theta * theta;
    (PI * PI * s2 * theta.cos() + t2) / (PI * PI * s2 + t2 * theta.cos())
}

pub fn g(theta: f64) -> f64 {
    let s2 = (theta / 2.0).sin().powi(2);
    let a = pos(alpha(theta));
    let p = theta / PI;
    let q = (PI - theta) / PI;
    let head = (a / 2.0 * p + pos(theta.cos()) / 2.0 * q) * q;
    // s^2 (sqrt(1 + x) - 1) rewritten without cancellation.
    let x = a * p * q / s2;
    head + a * p * q / (1.0 + (1.0 + x).sqrt())
}

pub fn h(theta: f64) -> f64 {
    let s2 = (theta / 2.0).sin().powi(2);
    let c2 = (theta / 2.0).cos().powi(2);
    let gv = g(theta);
    gv * gv + 2.0 * gv * (1.0 + s2) - c2 * pos(theta.cos()) * ((PI - theta) / PI).powi(2)
}

/// Upper envelope of the numerical radius of `B`.
pub fn f(theta: f64) -> f64 {
    let s2 = (theta / 2.0).sin().powi(2);
    0.5 * (1.0 + s2 + g(theta) + (4.0 * s2 + h(theta)).sqrt()).sqrt()
}

/// Upper bound on `||gamma||^2` for source height `sigma` and target `sigma + theta`.
pub fn gamma_norm_sq_upper(theta: f64, sigma: f64) -> f64 {
    1.0 + pos(theta.sin() / (sigma + theta).tan()) * (PI - sigma - theta) / PI
}

/// `[lower, upper]` windows for the squared norms of `gamma` restricted to the interior and
/// exterior arcs.
pub fn restricted_windows(theta: f64, sigma: f64) -> ([f64; 2], [f64; 2]) {
    let s2 = (theta / 2.0).sin().powi(2);
    let c2 = 1.0 - s2;
    let r = theta * theta / (PI * PI * s2);
    let a = ((sigma + theta).cos() + sigma.cos() * r) / (1.0 + theta.cos() * r);
    let ratio = theta.sin() / (theta + sigma).sin();
    let tail = (PI - theta - sigma) / PI;
    let interior = pos(a) * ratio * theta / PI * tail;
    let exterior = pos((sigma + theta).cos()) * ratio * (PI - theta) / PI * tail;
    ([s2, s2 + interior], [c2, c2 + exterior])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoryReport {
    pub theta: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub beta1: f64,
    pub beta2: f64,
    /// Spectral radius of `gamma_1 gamma_2`.
    pub rho: f64,
    /// Spectral radius of `B`, the asymptotic Schwarz rate.
    pub rate: f64,
    pub f_theta: f64,
    pub g_theta: f64,
    pub alpha_theta: f64,
    pub h_theta: f64,
    /// Window for `||gamma_2||^2`.
    pub gamma2_norm_sq_window: [f64; 2],
    /// Windows for the squared norms of `gamma_2` restricted to the arcs of circle 1.
    pub interior_window: [f64; 2],
    pub exterior_window: [f64; 2],
    pub numerical_radius_window: [f64; 2],
}

pub fn theory(geom: &TwoDiskGeometry) -> Result<TheoryReport> {
    let theta = geom.theta;
    check_theta(theta)?;
    let s = (theta / 2.0).sin();
    let (interior_window, exterior_window) = restricted_windows(theta, geom.sigma1);
    Ok(TheoryReport {
        theta,
        sigma1: geom.sigma1,
        sigma2: geom.sigma2,
        beta1: geom.beta1,
        beta2: geom.beta2,
        rho: (1.0 - theta.cos()) / 2.0,
        rate: s,
        f_theta: f(theta),
        g_theta: g(theta),
        alpha_theta: alpha(theta),
        h_theta: h(theta),
        gamma2_norm_sq_window: [1.0, gamma_norm_sq_upper(theta, geom.sigma1)],
        interior_window,
        exterior_window,
        numerical_radius_window: [(1.0 + s) / 2.0, f(theta)],
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumEstimate {
    pub bandwidth: usize,
    pub eigenvalues: Vec<Complex64>,
    pub spectral_radius: f64,
    pub numerical_radius: f64,
    pub top_singular_value: f64,
}

const NUMRAD_TOL: f64 = 1e-9;

/// Spectral data of a dense matrix. The numerical radius scans 721 rotations.
pub fn spectrum(m: &CMat, bandwidth: usize) -> Result<SpectrumEstimate> {
    let eigenvalues = linalg::eigenvalues(m)?;
    let spectral_radius = eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let (numerical_radius, _) = linalg::numerical_radius(m, 721, NUMRAD_TOL * 1e-3)?;
    let top_singular_value = linalg::top_singular_value(m)?;
    Ok(SpectrumEstimate { bandwidth, eigenvalues, spectral_radius, numerical_radius, top_singular_value })
}

/// Spectral data of a block operator, exploiting the off-diagonal structure of `B`:
/// `eig(B) = +-sqrt(eig(G1 G2))` and the numerical range is symmetric about 0.
pub fn spectrum_block(op: &BlockOperator) -> Result<SpectrumEstimate> {
    if op.kind != OperatorKind::B {
        return spectrum(&op.matrix, op.bandwidth);
    }
    let (g1, g2) = (op.block(0, 1), op.block(1, 0));
    let product = &g1 * &g2;
    let mut eigenvalues = Vec::new();
    for mu in linalg::eigenvalues(&product)? {
        let r = mu.sqrt();
        eigenvalues.push(r);
        eigenvalues.push(-r);
    }
    let spectral_radius = eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let (numerical_radius, _) = linalg::numerical_radius_offdiag(&g1, &g2, 361, NUMRAD_TOL * 1e-3)?;
    let top_singular_value = linalg::top_singular_value(&g1)?.max(linalg::top_singular_value(&g2)?);
    Ok(SpectrumEstimate { bandwidth: op.bandwidth, eigenvalues, spectral_radius, numerical_radius, top_singular_value })
}

/// `min Re <u, A u>` over unit vectors for `A = I - B`.
pub fn coercivity(op: &BlockOperator) -> Result<f64> {
    let b = match op.kind {
        OperatorKind::B => op.matrix.clone(),
        OperatorKind::A => {
            let n = op.matrix.nrows();
            faer::Mat::from_fn(n, n, |r, c| if r == c { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) } - op.matrix[(r, c)])
        }
        OperatorKind::Gamma21 => return Err(Error::InvalidInput("coercivity needs B or A".into())),
    };
    let apply = |x: &[Complex64]| {
        let a = crate::dtd::matvec(&b, x);
        let c = crate::dtd::matvec_adjoint(&b, x);
        a.iter().zip(&c).map(|(a, c)| (a + c) * 0.5).collect()
    };
    let (lam, _) = linalg::lanczos_max(b.nrows(), apply, None, 1e-13)?;
    Ok(1.0 - lam)
}

/// An eigenpair of `gamma_1 gamma_2` built on the interior line of circle 1.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub z0: Complex64,
    /// `conj(symbol(z0, pi - theta)^2)`.
    pub lambda: Complex64,
    /// Eigenvalue of `B` on `(f, gamma_2 f / sqrt(lambda))`.
    pub sqrt_lambda: Complex64,
    /// Relative residual with both transfers evaluated by the disk Poisson integral.
    pub residual_disk: f64,
    /// Relative residual with both transfers evaluated by strip convolution.
    pub residual_strip: f64,
    pub warning: Option<Warning>,
}

impl EigenPair {
    /// The eigenfunction at the strip coordinate `tau` of the interior arc of circle 1.
    pub fn value(&self, tau: f64) -> Complex64 {
        (Complex64::i() * self.z0.conj() * tau).exp()
    }

    /// Fourier coefficients of the eigenfunction (extended by zero) on circle 1, and of
    /// `gamma_2 f / sqrt(lambda)` on circle 2.
    pub fn traces(&self, geom: &TwoDiskGeometry, bandwidth: usize) -> [TraceFunction; 2] {
        let rule = coefficient_rule(geom, bandwidth);
        [0, 1].map(|disk| line_coefficients(geom, disk, Side::Interior, bandwidth, &rule, |t| self.value(t)))
    }
}

/// Uniform `tau` rule resolving modes up to `bandwidth` on both interior arcs.
pub fn coefficient_rule(geom: &TwoDiskGeometry, bandwidth: usize) -> LineRule {
    let speed = (0..2)
        .map(|d| geom.arc_length_density(0.0, geom.line_height(d, Side::Interior)) / geom.disks[d].radius)
        .fold(0.0, f64::max);
    LineRule::new(40.0, (0.25 / (bandwidth.max(1) as f64 * speed)).min(0.05))
}

pub fn eigenpair(geom: &TwoDiskGeometry, z0: Complex64, quad: &QuadratureConfig) -> Result<EigenPair> {
    if z0.im.abs() >= 0.5 || !z0.re.is_finite() {
        return Err(Error::OutOfDomain { re: z0.re, im: z0.im });
    }
    check_theta(geom.theta)?;
    let warning = (z0.im.abs() > 0.45).then_some(Warning::NearBoundaryZ0 { im: z0.im });
    let root = symbol(z0.conj(), PI - geom.theta);
    let lambda = root * root;

    let (t, h) = match quad.profile {
        Profile::Fast => (20.0, 0.1),
        Profile::Standard => (30.0, 0.05),
        Profile::Paranoid => (40.0, 0.025),
    };
    let value = |tau: f64| (Complex64::i() * z0.conj() * tau).exp();
    let sig1 = geom.line_height(0, Side::Interior);
    let sig2 = geom.line_height(1, Side::Interior);
    let outer = LineRule::new(t + 40.0, h);
    let middle = LineRule::new(t + 20.0, h);
    let inner = LineRule::new(t, h);
    let f_outer = StripSample::from_fn(sig1, &outer, value);
    let f_inner = StripSample::from_fn(sig1, &inner, value);
    let f_norm = weighted_norm(&f_inner);

    let relative = |image: Vec<Complex64>| {
        let res = StripSample {
            sigma: sig1,
            rule: inner.clone(),
            values: image.iter().zip(&f_inner.values).map(|(a, b)| a - lambda * b).collect(),
        };
        weighted_norm(&res) / f_norm
    };

    let mid = StripSample { sigma: sig2, rule: middle.clone(), values: disk_side_transfer(geom, 0, &[&f_outer], sig2, &middle) };
    let residual_disk = relative(disk_side_transfer(geom, 1, &[&mid], sig1, &inner));

    let step = convolve_between(&f_outer, sig2)?;
    let back = convolve_between(&step, sig1)?;
    let offset = (outer.len() - inner.len()) / 2;
    let residual_strip = relative(back.values[offset..offset + inner.len()].to_vec());

    Ok(EigenPair { z0, lambda, sqrt_lambda: root, residual_disk, residual_strip, warning })
}

/// Sampling grid of the closed dual strip `R x [-1/2, 1/2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualStripGrid {
    pub xmax: f64,
    pub nx: usize,
    pub ny: usize,
}

impl DualStripGrid {
    pub fn points(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.nx * self.ny);
        for i in 0..self.nx {
            let x = -self.xmax + 2.0 * self.xmax * i as f64 / (self.nx - 1) as f64;
            for k in 0..self.ny {
                out.push(Complex64::new(x, -0.5 + k as f64 / (self.ny - 1) as f64));
            }
        }
        out
    }
}

/// `{ conj(symbol(z, pi - theta)^2) }` over the grid: a sampling of the spectrum of
/// `gamma_1 gamma_2`.
pub fn spectrum_image(theta: f64, grid: &DualStripGrid) -> Result<Vec<Complex64>> {
    check_theta(theta)?;
    Ok(grid.points().into_iter().map(|z| symbol(z, PI - theta).powi(2).conj()).collect())
}

/// Distance from `p` to a finite point set.
pub fn distance_to_set(p: Complex64, set: &[Complex64]) -> f64 {
    set.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min)
}
