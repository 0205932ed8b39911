//! The Dirichlet-to-Dirichlet maps `gamma_j` between two overlapping disks: pointwise
//! application, Galerkin matrices in the orthonormal Fourier bases, restrictions to one
//! arc, and the equivalent convolution operators on the strip.

use std::f64::consts::{PI, TAU};

use faer::Mat;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::disk_harmonic::{truncated_extension, TraceFunction};
use crate::error::{Error, Result};
use crate::geometry::{anchored_bipolar, bipolar_denominator, Side, TwoDiskGeometry};
use crate::quadrature::{ArcRule, LineRule, Profile, QuadratureConfig};
use crate::strip::{convolve_between, poisson_kernel, StripSample};

pub type CMat = Mat<Complex64>;

/// `gamma_j g` at polar angles on circle `j = 1 - g.disk`; zero on the exterior arc.
pub fn apply_dtd(g: &TraceFunction, geom: &TwoDiskGeometry, angles: &[f64]) -> Result<Vec<Complex64>> {
    let i = g.disk;
    let j = 1 - i;
    let arc = geom.arcs.interior[j];
    angles
        .iter()
        .map(|&phi| {
            if arc.contains(phi) {
                truncated_extension(g, &geom.disks[i], geom.disks[j].point_at(phi))
            } else {
                Ok(Complex64::new(0.0, 0.0))
            }
        })
        .collect()
}

/// `gamma_j g` at the strip points `(tau, sigma_j^int)` of the interior arc of disk `j`.
pub fn apply_dtd_on_line(g: &TraceFunction, geom: &TwoDiskGeometry, rule: &LineRule) -> Result<StripSample> {
    let i = g.disk;
    let sigma = geom.line_height(1 - i, Side::Interior);
    let values = rule
        .nodes()
        .iter()
        .map(|&t| truncated_extension(g, &geom.disks[i], geom.strip_point(t, sigma)))
        .collect::<Result<Vec<_>>>()?;
    Ok(StripSample { sigma, rule: rule.clone(), values })
}

/// Pullback of a trace on circle `disk` to the strip line carrying the given arc.
pub fn pullback(t: &TraceFunction, geom: &TwoDiskGeometry, side: Side, rule: &LineRule) -> StripSample {
    let sigma = geom.line_height(t.disk, side);
    StripSample::from_fn(sigma, rule, |tau| t.synthesize(geom.strip_angle(t.disk, tau, sigma)))
}

/// Strip form of `gamma_j`: data `(ext, int)` of disk `i` mapped onto the interior line of
/// disk `j` by `P_d` convolutions, `d` the distance between lines.
pub fn strip_gamma(geom: &TwoDiskGeometry, from: usize, ext: &StripSample, int: &StripSample) -> Result<StripSample> {
    let target = geom.line_height(1 - from, Side::Interior);
    if (ext.sigma - geom.line_height(from, Side::Exterior)).abs() > 1e-12
        || (int.sigma - geom.line_height(from, Side::Interior)).abs() > 1e-12
    {
        return Err(Error::InvalidInput("strip data not on the lines of the source disk".into()));
    }
    convolve_between(ext, target)?.add(&convolve_between(int, target)?)
}

/// Fourier coefficients on circle `disk` of a function given along one of its arcs as a
/// function of `tau` and extended by zero, integrated on the uniform `tau` grid.
pub fn line_coefficients(
    geom: &TwoDiskGeometry,
    disk: usize,
    side: Side,
    bandwidth: usize,
    rule: &LineRule,
    f: impl Fn(f64) -> Complex64,
) -> TraceFunction {
    let sigma = geom.line_height(disk, side);
    let r = geom.disks[disk].radius;
    let mut t = TraceFunction::zeros(disk, bandwidth);
    let nodes = rule.nodes();
    let l = bandwidth as i64;
    for (k, &tau) in nodes.iter().enumerate() {
        let phi = geom.strip_angle(disk, tau, sigma);
        let w = f(tau) * (rule.weight(k) * geom.arc_length_density(tau, sigma) / (TAU * r));
        let step = Complex64::from_polar(1.0, -phi);
        let mut e = Complex64::from_polar(1.0, l as f64 * phi);
        for c in t.coefficients.iter_mut() {
            *c += w * e;
            e *= step;
        }
    }
    t
}

/// Arc rule on the interior arc of disk `j` resolving the Galerkin integrands at bandwidth `L`.
pub fn target_rule(geom: &TwoDiskGeometry, j: usize, bandwidth: usize, quad: &QuadratureConfig) -> ArcRule {
    let arc = geom.arcs.interior[j];
    quad.arc_rule(arc.start, arc.end, 2 * bandwidth + 2)
}

fn gamma_on_rule(geom: &TwoDiskGeometry, from: usize, bandwidth: usize, rule: &ArcRule) -> CMat {
    let i = from;
    let j = 1 - i;
    let (di, dj) = (geom.disks[i], geom.disks[j]);
    let n = 2 * bandwidth + 1;
    let l = bandwidth as i64;
    let scale = dj.radius / (TAU * (di.radius * dj.radius).sqrt());
    let m = rule.len();
    let left = Mat::from_fn(n, m, |k, q| {
        Complex64::from_polar(rule.weights[q] * scale, -((k as i64 - l) as f64) * rule.nodes[q])
    });
    let mut right = Mat::<Complex64>::zeros(m, n);
    for q in 0..m {
        let w = (dj.point_at(rule.nodes[q]) - di.center) / di.radius;
        let wc = w.conj();
        right[(q, bandwidth)] = Complex64::new(1.0, 0.0);
        let (mut p, mut pc) = (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
        for s in 1..=bandwidth {
            p *= w;
            pc *= wc;
            right[(q, bandwidth + s)] = p;
            right[(q, bandwidth - s)] = pc;
        }
    }
    &left * &right
}

/// Matrix of `P_{j,L} gamma_j` on `H_L(circle i)` in the orthonormal Fourier bases.
pub fn assemble_gamma(geom: &TwoDiskGeometry, from: usize, bandwidth: usize, quad: &QuadratureConfig) -> Result<CMat> {
    let rule = target_rule(geom, 1 - from, bandwidth, quad);
    let m = gamma_on_rule(geom, from, bandwidth, &rule);
    if quad.profile == Profile::Paranoid {
        let fine = gamma_on_rule(geom, from, bandwidth, &rule.refined());
        let diff = max_abs_diff(&m, &fine);
        if diff > 1e-8 {
            return Err(Error::QuadratureUnconverged(diff));
        }
    }
    Ok(m)
}

pub(crate) fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    let mut d = 0.0f64;
    for c in 0..a.ncols() {
        for r in 0..a.nrows() {
            d = d.max((a[(r, c)] - b[(r, c)]).norm());
        }
    }
    d
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    /// `B_L = offdiag(gamma_1, gamma_2)`.
    B,
    /// `A_L = I - B_L`.
    A,
    /// `blockdiag((gamma_1 gamma_2)_L, (gamma_2 gamma_1)_L)`, equal to `B_L^2`.
    Gamma21,
}

/// `2 x 2` block operator on the orthonormal coefficients of both circles.
#[derive(Debug, Clone)]
pub struct BlockOperator {
    pub bandwidth: usize,
    pub kind: OperatorKind,
    pub matrix: CMat,
}

impl BlockOperator {
    pub fn block_size(&self) -> usize {
        2 * self.bandwidth + 1
    }

    pub fn block(&self, row: usize, col: usize) -> CMat {
        let n = self.block_size();
        self.matrix.as_ref().submatrix(row * n, col * n, n, n).to_owned()
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        matvec(&self.matrix, x)
    }
}

pub fn matvec(m: &CMat, x: &[Complex64]) -> Vec<Complex64> {
    assert_eq!(m.ncols(), x.len());
    let mut y = vec![Complex64::new(0.0, 0.0); m.nrows()];
    for (c, xc) in x.iter().enumerate() {
        if *xc == Complex64::new(0.0, 0.0) {
            continue;
        }
        let col = m.col(c);
        for (r, yr) in y.iter_mut().enumerate() {
            *yr += col[r] * xc;
        }
    }
    y
}

pub fn matvec_adjoint(m: &CMat, x: &[Complex64]) -> Vec<Complex64> {
    assert_eq!(m.nrows(), x.len());
    (0..m.ncols())
        .map(|c| {
            let col = m.col(c);
            x.iter().enumerate().map(|(r, xr)| col[r].conj() * xr).sum()
        })
        .collect()
}

/// Galerkin matrices `(G1, G2)` with `G1 = P_L gamma_1` (circle 2 to circle 1) and
/// `G2 = P_L gamma_2` (circle 1 to circle 2).
pub fn assemble_pair(geom: &TwoDiskGeometry, bandwidth: usize, quad: &QuadratureConfig) -> Result<(CMat, CMat)> {
    let (g1, g2) = rayon::join(
        || assemble_gamma(geom, 1, bandwidth, quad),
        || assemble_gamma(geom, 0, bandwidth, quad),
    );
    Ok((g1?, g2?))
}

pub fn block_from_pair(g1: &CMat, g2: &CMat, kind: OperatorKind) -> BlockOperator {
    let n = g1.nrows();
    let bandwidth = (n - 1) / 2;
    let zero = Complex64::new(0.0, 0.0);
    let matrix = match kind {
        OperatorKind::B | OperatorKind::A => {
            let sign = if kind == OperatorKind::A { -1.0 } else { 1.0 };
            Mat::from_fn(2 * n, 2 * n, |r, c| {
                let v = match (r < n, c < n) {
                    (true, false) => g1[(r, c - n)],
                    (false, true) => g2[(r - n, c)],
                    _ => zero,
                };
                let id = if kind == OperatorKind::A && r == c { 1.0 } else { 0.0 };
                v * sign + id
            })
        }
        OperatorKind::Gamma21 => {
            let p12 = g1 * g2;
            let p21 = g2 * g1;
            Mat::from_fn(2 * n, 2 * n, |r, c| match (r < n, c < n) {
                (true, true) => p12[(r, c)],
                (false, false) => p21[(r - n, c - n)],
                _ => zero,
            })
        }
    };
    BlockOperator { bandwidth, kind, matrix }
}

pub fn assemble_block(geom: &TwoDiskGeometry, bandwidth: usize, kind: OperatorKind, quad: &QuadratureConfig) -> Result<BlockOperator> {
    let (g1, g2) = assemble_pair(geom, bandwidth, quad)?;
    Ok(block_from_pair(&g1, &g2, kind))
}

/// Nodes `t = a sinh(u)` on `[-T, T]`, uniform in `u`: fine near `t = 0`, coarse in the tails.
#[derive(Debug, Clone, PartialEq)]
pub struct SinhLineRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl SinhLineRule {
    pub fn new(t: f64, center_step: f64, du: f64) -> Self {
        let a = center_step / du;
        let umax = (t / a).asinh();
        let n = (2.0 * umax / du).ceil() as usize + 1;
        let du = 2.0 * umax / (n - 1) as f64;
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for k in 0..n {
            let u = -umax + k as f64 * du;
            let end = if k == 0 || k + 1 == n { 0.5 } else { 1.0 };
            nodes.push(a * u.sinh());
            weights.push(end * a * u.cosh() * du);
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// `gamma_j` restricted to `L^2` of one arc of circle `i`, on an orthonormal family of arc
/// Fourier modes, with exact `L^2` representation of the image on the interior arc of `j`.
#[derive(Debug, Clone)]
pub struct RestrictedGamma {
    pub from: usize,
    pub side: Side,
    pub bandwidth: usize,
    /// Discretized arc modes in `L^2`-weighted source coordinates (columns).
    pub basis: CMat,
    /// Transfer kernel from weighted source to weighted target coordinates.
    pub kernel: CMat,
    /// Gram matrix of the discretized arc modes.
    pub gram: CMat,
}

impl RestrictedGamma {
    /// Largest deviation of the mode Gram matrix from the identity.
    pub fn gram_defect(&self) -> f64 {
        max_abs_diff(&self.gram, &Mat::identity(self.gram.nrows(), self.gram.ncols()))
    }

    /// Operator norm on the span of the modes.
    pub fn top_singular_value(&self) -> Result<f64> {
        crate::linalg::top_singular_value(&self.orthonormal_image())
    }

    /// Images of an orthonormal basis of the span of the modes.
    pub fn orthonormal_image(&self) -> CMat {
        &self.kernel * self.basis.qr().compute_thin_Q()
    }
}

pub fn restricted_gamma(
    geom: &TwoDiskGeometry,
    from: usize,
    side: Side,
    bandwidth: usize,
    quad: &QuadratureConfig,
) -> Result<RestrictedGamma> {
    let i = from;
    let j = 1 - i;
    let sig_s = geom.line_height(i, side);
    let sig_t = geom.line_height(j, Side::Interior);
    let dist = (sig_t - sig_s).abs();
    let arc = geom.arcs.arc(i, side);
    let r = geom.disks[i].radius;
    let half = arc.half_aperture();

    // Step small enough to resolve the fastest arc mode where the arc is traversed fastest.
    let speed = geom.arc_length_density(0.0, sig_s) / r;
    let freq = (bandwidth.max(1) as f64) * PI / half * speed;
    let (du, factor) = match quad.profile {
        Profile::Fast => (0.02, 0.6),
        Profile::Standard => (0.01, 0.4),
        Profile::Paranoid => (0.005, 0.25),
    };
    let center_step = (factor / freq).min(0.05);
    let line = SinhLineRule::new(quad.line_t, center_step, du);
    let n = line.len();

    let src_w: Vec<f64> = (0..n).map(|q| (line.weights[q] * geom.arc_length_density(line.nodes[q], sig_s)).sqrt()).collect();
    let tgt_w: Vec<f64> = (0..n).map(|p| (line.weights[p] * geom.arc_length_density(line.nodes[p], sig_t)).sqrt()).collect();
    let phase: Vec<f64> = line
        .nodes
        .iter()
        .map(|&t| (geom.strip_angle(i, t, sig_s) - arc.start).rem_euclid(TAU))
        .collect();

    let modes = 2 * bandwidth + 1;
    let l = bandwidth as i64;
    let norm = 1.0 / (2.0 * half * r).sqrt();
    let basis = Mat::from_fn(n, modes, |q, k| {
        let kk = (k as i64 - l) as f64;
        Complex64::from_polar(src_w[q] * norm, kk * PI * phase[q] / half)
    });
    let gram = basis.adjoint() * &basis;

    // Kernel in weighted coordinates: sqrt(w_p) P(t_p - t_q) w_q f_q with f_q = x_q / sqrt(w_q).
    let kernel = Mat::from_fn(n, n, |p, q| {
        let k = poisson_kernel(line.nodes[p] - line.nodes[q], dist) * line.weights[q];
        Complex64::new(tgt_w[p] * k / src_w[q], 0.0)
    });
    Ok(RestrictedGamma { from, side, bandwidth, basis, kernel, gram })
}

/// Harmonic extension from circle `from` evaluated by the disk Poisson integral in the
/// canonical frame. Source data live on the lines of disk `from` (`ext`, `int`, each
/// optional), targets are `(tau, sigma_target)` for every node of `target`.
///
/// All points are carried as offsets from the nearer intersection point, so the kernel
/// keeps full relative accuracy arbitrarily close to the corners.
pub fn disk_side_transfer(
    geom: &TwoDiskGeometry,
    from: usize,
    sources: &[&StripSample],
    sigma_target: f64,
    target: &LineRule,
) -> Vec<Complex64> {
    let sig_ext = geom.line_height(from, Side::Exterior);
    let circle_sigma = if sig_ext < PI { sig_ext } else { sig_ext - PI };
    let radius = 1.0 / circle_sigma.sin();
    let k = 1.0 / circle_sigma.tan();

    struct Node {
        anchor: i8,
        delta: Complex64,
        weight: Complex64,
    }
    let mut nodes = Vec::new();
    for s in sources {
        for (q, &tau) in s.rule.nodes().iter().enumerate() {
            let (anchor, delta) = anchored_bipolar(tau, s.sigma);
            let ds = s.rule.weight(q) / bipolar_denominator(tau, s.sigma);
            nodes.push(Node { anchor, delta, weight: s.values[q] * ds });
        }
    }
    let taus = target.nodes();
    taus.par_iter()
        .map(|&tau| {
            let (ay, dy) = anchored_bipolar(tau, sigma_target);
            let a = ay as f64;
            // r^2 - |y - c|^2 for y = a + dy on the circle through +-1 with center -ik.
            let power = -(2.0 * (a * dy.re + k * dy.im) + dy.norm_sqr());
            let scale = power / (TAU * radius);
            nodes
                .iter()
                .map(|nd| {
                    let dist2 = if nd.anchor == ay {
                        (nd.delta - dy).norm_sqr()
                    } else {
                        (Complex64::new(nd.anchor as f64 - a, 0.0) + nd.delta - dy).norm_sqr()
                    };
                    nd.weight / dist2
                })
                .sum::<Complex64>()
                * scale
        })
        .collect()
}

/// Nystrom discretization of both DtD maps on the strip, in `L^2`-orthonormal coordinates
/// of the uniform line rule. Each disk's space is `[exterior line; interior line]`.
#[derive(Debug, Clone)]
pub struct StripNystrom {
    pub rule: LineRule,
    /// `gamma_1`: disk 1 lines to the interior line of disk 0 (`N x 2N`).
    pub g1: CMat,
    /// `gamma_2`: disk 0 lines to the interior line of disk 1 (`N x 2N`).
    pub g2: CMat,
}

impl StripNystrom {
    pub fn new(geom: &TwoDiskGeometry, rule: &LineRule) -> Self {
        let build = |from: usize| {
            let target = geom.line_height(1 - from, Side::Interior);
            let lines = [geom.line_height(from, Side::Exterior), geom.line_height(from, Side::Interior)];
            let nodes = rule.nodes();
            let n = nodes.len();
            let w = |k: usize, sigma: f64| (rule.weight(k) / bipolar_denominator(nodes[k], sigma)).sqrt();
            Mat::from_fn(n, 2 * n, |p, c| {
                let (side, q) = (c / n, c % n);
                let sigma = lines[side];
                let dist = (target - sigma).abs();
                let k = poisson_kernel(nodes[p] - nodes[q], dist) * rule.weight(q);
                Complex64::new(w(p, target) * k / w(q, sigma), 0.0)
            })
        };
        let (g1, g2) = rayon::join(|| build(1), || build(0));
        Self { rule: rule.clone(), g1, g2 }
    }

    /// `gamma` mapping disk `from` into the full `2N` space of the other disk.
    pub fn full(&self, from: usize) -> CMat {
        let g = if from == 0 { &self.g2 } else { &self.g1 };
        let n = g.nrows();
        Mat::from_fn(2 * n, 2 * n, |r, c| if r >= n { g[(r - n, c)] } else { Complex64::new(0.0, 0.0) })
    }
}
