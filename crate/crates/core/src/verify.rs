//! Invariant battery behind `ddcosmo verify`.
//!
//! Hard checks are exact identities or one-sided bounds that must hold at every bandwidth.
//! Soft checks compare finite-bandwidth quantities against their continuous limits and are
//! reported without affecting the exit status.

use std::f64::consts::{PI, TAU};
use std::sync::Arc as Shared;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::disk_harmonic::{fourier_coefficients, poisson_integral, truncated_extension, GlobalTrace, TraceFunction};
use crate::dtd::{self, assemble_block, assemble_gamma, assemble_pair, block_from_pair, matvec, OperatorKind};
use crate::error::Result;
use crate::geometry::{bipolar, circle_of_line, intersect, inverse_bipolar, Disk, Side, TwoDiskGeometry};
use crate::linalg;
use crate::quadrature::{integrate_arc, integrate_circle, integrate_line, LineRule, PeriodicRule, Profile, QuadratureConfig};
use crate::schwarz::{convergence_study, projected_data, solve_direct, sweep, BoundaryData, ProblemSpec, SchwarzState};
use crate::spectral::{self, coercivity, eigenpair, spectrum_block};
use crate::strip::{convolve, hardy_inner, poisson_kernel, symbol, HardyLines, StripSample};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub hard: bool,
    pub pass: bool,
    pub detail: String,
}

#[derive(Default)]
struct Log {
    checks: Vec<Check>,
}

impl Log {
    fn hard(&mut self, suite: &'static str, name: &str, pass: bool, detail: String) {
        self.checks.push(Check { suite, name: name.into(), hard: true, pass, detail });
    }

    fn soft(&mut self, suite: &'static str, name: &str, pass: bool, detail: String) {
        self.checks.push(Check { suite, name: name.into(), hard: false, pass, detail });
    }
}

/// Bandwidth ladder used by the operator suites.
pub fn ladder(profile: Profile) -> Vec<usize> {
    match profile {
        Profile::Fast => vec![8, 16, 32],
        Profile::Standard => vec![16, 32, 64],
        Profile::Paranoid => vec![16, 32, 64, 128],
    }
}

/// Runs every suite and returns the checks in order.
pub fn run_battery(profile: Profile, seed: u64) -> Result<Vec<Check>> {
    let mut log = Log::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let quad = QuadratureConfig::new(profile);
    geometry_suite(&mut log, &mut rng)?;
    quadrature_suite(&mut log);
    harmonic_suite(&mut log, &mut rng)?;
    strip_suite(&mut log, &mut rng)?;
    dtd_suite(&mut log, &mut rng, &quad)?;
    schwarz_suite(&mut log, &mut rng, &quad)?;
    spectral_suite(&mut log, &quad)?;
    Ok(log.checks)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_trace(rng: &mut ChaCha8Rng, disk: usize, bandwidth: usize) -> TraceFunction {
    TraceFunction::from_coefficients(disk, (0..2 * bandwidth + 1).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect())
}

fn random_pair(rng: &mut ChaCha8Rng) -> TwoDiskGeometry {
    loop {
        let d1 = Disk::new(c(0.0, 0.0), rng.gen_range(0.3..2.0)).unwrap();
        let d2 = Disk::new(c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)), rng.gen_range(0.3..2.0)).unwrap();
        if let Ok(g) = intersect(d1, d2) {
            return g;
        }
    }
}

fn skewed() -> TwoDiskGeometry {
    intersect(Disk::new(c(0.0, 0.0), 1.0).unwrap(), Disk::new(c(0.6, 0.0), 0.6).unwrap()).unwrap()
}

fn monotone(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] >= w[0] - 1e-12)
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(" ")
}

fn geometry_suite(log: &mut Log, rng: &mut ChaCha8Rng) -> Result<()> {
    let pairs: Vec<TwoDiskGeometry> = (0..50).map(|_| random_pair(rng)).collect();
    let worst = pairs.iter().map(|g| (g.theta + g.beta1 + g.beta2 - PI).abs()).fold(0.0, f64::max);
    log.hard("geometry", "angle_sum", worst <= 1e-12, format!("max |theta + beta1 + beta2 - pi| = {worst:.2e} over 50 pairs"));

    let mut worst: f64 = 0.0;
    for i in -20..=20 {
        for j in 1..40 {
            let (tau, sigma) = (0.25 * i as f64, PI * j as f64 / 40.0 * 2.0 - 0.01);
            let (t, s) = inverse_bipolar(bipolar(tau, sigma))?;
            worst = worst.max((t - tau).abs()).max((s - sigma).abs());
        }
    }
    log.hard("geometry", "bipolar_round_trip", worst <= 1e-10, format!("max deviation {worst:.2e}"));

    let mut worst: f64 = 0.0;
    for sigma in [0.3, 1.0, PI / 2.0, 2.5] {
        let d = circle_of_line(sigma);
        for k in 0..100 {
            let tau = -5.0 + 0.1 * k as f64;
            worst = worst.max(((bipolar(tau, sigma) - d.center).norm() - d.radius).abs());
        }
    }
    log.hard("geometry", "lines_map_to_circles", worst <= 1e-12, format!("max radial deviation {worst:.2e}"));

    let mut ok = true;
    for g in pairs.iter().take(10) {
        let ext = g.arcs.exterior[0];
        ok &= (1..20).all(|k| g.canonical_map.apply(g.disks[0].point_at(ext.start + ext.width() * k as f64 / 20.0)).im < 0.0);
        for (disk, side) in [(0, Side::Interior), (1, Side::Interior)] {
            let sigma = g.line_height(disk, side);
            let arc = g.arcs.arc(disk, side);
            for k in 0..25 {
                let p = g.strip_point(-8.0 + 16.0 * k as f64 / 24.0, sigma);
                let d = g.disks[disk];
                ok &= ((p - d.center).norm() - d.radius).abs() < 1e-10 && arc.contains((p - d.center).arg());
            }
        }
    }
    log.hard("geometry", "canonical_frame", ok, "exterior arc below the axis, interior arcs are the lines sigma1 + pi and sigma2".into());
    Ok(())
}

fn quadrature_suite(log: &mut Log) {
    let m = 32;
    let rule = PeriodicRule::new(m);
    let nodes = rule.nodes();
    let mut worst: f64 = 0.0;
    for k in -15i32..=15 {
        for l in -15i32..=15 {
            if (k - l).unsigned_abs() as usize >= m {
                continue;
            }
            let f: Vec<_> = nodes.iter().map(|&p| Complex64::from_polar(1.0, (k - l) as f64 * p)).collect();
            let want = if k == l { TAU * 1.5 } else { 0.0 };
            worst = worst.max((integrate_circle(&f, &rule, 1.5) - want).norm());
        }
    }
    log.hard("quadrature", "circle_orthogonality", worst <= 1e-13, format!("max deviation {worst:.2e}"));

    let battery: [fn(f64) -> f64; 3] = [|x| x.exp(), |x| (3.0 * x).cos(), |x| 1.0 / (1.2 + x.cos())];
    let mut ok = true;
    for f in battery {
        let fine = PeriodicRule::new(4096);
        let reference = integrate_circle(&fine.nodes().iter().map(|&x| c(f(x), 0.0)).collect::<Vec<_>>(), &fine, 1.0).re;
        let mut prev = f64::INFINITY;
        for m in [8usize, 16, 32, 64] {
            let r = PeriodicRule::new(m);
            let err = (integrate_circle(&r.nodes().iter().map(|&x| c(f(x), 0.0)).collect::<Vec<_>>(), &r, 1.0).re - reference).abs();
            ok &= err <= prev.max(1e-13);
            prev = err;
        }
        let mut rule = crate::quadrature::ArcRule::uniform(0.0, 3.0, 1, 4);
        let fine = crate::quadrature::ArcRule::uniform(0.0, 3.0, 64, 16);
        let reference = integrate_arc(&fine.nodes.iter().map(|&x| c(f(x), 0.0)).collect::<Vec<_>>(), &fine, 1.0).re;
        let mut prev = f64::INFINITY;
        for _ in 0..5 {
            let err = (integrate_arc(&rule.nodes.iter().map(|&x| c(f(x), 0.0)).collect::<Vec<_>>(), &rule, 1.0).re - reference).abs();
            ok &= err <= prev.max(1e-14);
            prev = err;
            rule = rule.refined();
        }
        let mut prev = f64::INFINITY;
        for h in [0.4, 0.2, 0.1, 0.05] {
            let r = LineRule::new(30.0, h);
            let g: Vec<_> = r.nodes().iter().map(|&t| c(f(t.tanh()) / t.cosh(), 0.0)).collect();
            let fine = LineRule::new(30.0, 0.01);
            let gf: Vec<_> = fine.nodes().iter().map(|&t| c(f(t.tanh()) / t.cosh(), 0.0)).collect();
            let err = (integrate_line(&g, &r) - integrate_line(&gf, &fine)).norm();
            ok &= err <= prev.max(1e-13);
            prev = err;
        }
    }
    log.hard("quadrature", "refinement_monotone", ok, "doubling nodes, panels or line density never increases the error".into());
}

fn harmonic_suite(log: &mut Log, rng: &mut ChaCha8Rng) -> Result<()> {
    let disk = Disk::new(c(-0.2, 0.1), 1.3)?;
    let rule = PeriodicRule::new(512);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let t = random_trace(rng, 0, 32);
        let g: Vec<_> = rule.nodes().iter().map(|&p| t.synthesize(p)).collect();
        let norm = t.norm_sq(disk.radius).sqrt();
        for k in 0..12 {
            let x = disk.center + Complex64::from_polar(rng.gen_range(0.0..0.9) * disk.radius, 0.5 * k as f64);
            let a = poisson_integral(&g, &rule, 0, &disk, x)?.0;
            worst = worst.max((a - truncated_extension(&t, &disk, x)?).norm() / norm);
        }
    }
    log.hard("disk_harmonic", "oracle_equivalence", worst <= 1e-9, format!("max relative gap {worst:.2e}"));

    let f = |p: f64| c(1.0 / (1.3 + p.cos()), (2.0 * p.sin()).exp());
    let mut gaps = Vec::new();
    for m in [16usize, 32, 64, 128] {
        let r = PeriodicRule::new(m);
        let g: Vec<_> = r.nodes().iter().map(|&p| f(p)).collect();
        let (t, _) = fourier_coefficients(0, &g, &r, (m - 1) / 2 - 1);
        let quad = integrate_circle(&g.iter().map(|v| c(v.norm_sqr(), 0.0)).collect::<Vec<_>>(), &r, disk.radius).re;
        gaps.push((quad - t.norm_sq(disk.radius)).abs());
    }
    let ok = gaps.windows(2).all(|w| w[1] <= w[0].max(1e-10)) && gaps[3] < 1e-9;
    log.hard("disk_harmonic", "parseval", ok, format!("aliasing gaps {}", gaps.iter().map(|g| format!("{g:.1e}")).collect::<Vec<_>>().join(" ")));

    let mut ok = true;
    for _ in 0..10 {
        let t = random_trace(rng, 0, 12);
        let g: Vec<_> = rule.nodes().iter().map(|&p| c(t.synthesize(p).re, 0.0)).collect();
        let lo = g.iter().map(|v| v.re).fold(f64::INFINITY, f64::min);
        let hi = g.iter().map(|v| v.re).fold(f64::NEG_INFINITY, f64::max);
        for _ in 0..20 {
            let x = disk.center + Complex64::from_polar(rng.gen_range(0.0..0.95) * disk.radius, rng.gen_range(0.0..TAU));
            let v = poisson_integral(&g, &rule, 0, &disk, x)?.0.re;
            ok &= v >= lo - 1e-10 && v <= hi + 1e-10;
        }
    }
    log.hard("disk_harmonic", "maximum_principle", ok, "Poisson integral of real data stays within its range".into());
    Ok(())
}

fn strip_suite(log: &mut Log, rng: &mut ChaCha8Rng) -> Result<()> {
    let rule = LineRule::new(40.0, 0.05);
    let mut ok = true;
    for theta in [0.1, 1.0, PI / 2.0, 2.5, 3.0] {
        for &t in &rule.nodes() {
            let p = poisson_kernel(t, theta);
            ok &= p > 0.0 && p == poisson_kernel(-t, theta);
        }
    }
    log.hard("strip", "kernel_even_positive", ok, "P_theta(tau) = P_theta(-tau) > 0 on the grid".into());

    let mut worst = f64::NEG_INFINITY;
    for _ in 0..10 {
        let (a, b, w) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(0.2..3.0));
        let g = StripSample::from_fn(0.3, &rule, |t| c(a * (w * t).cos(), b * (-t * t / w).exp()));
        for theta in [0.4, PI / 2.0, 2.6] {
            let out = convolve(&g, theta)?;
            worst = worst.max(out.sup_norm() - (PI - theta) / PI * g.sup_norm());
        }
    }
    log.hard("strip", "sup_contraction", worst <= 1e-12, format!("max of ||P * g|| - (pi - theta)/pi ||g|| = {worst:.2e}"));

    let mut ok = true;
    let mut detail = Vec::new();
    for theta in [PI / 6.0, PI / 2.0, 5.0 * PI / 6.0] {
        let target = (theta / 2.0).cos();
        let (mut best, mut far) = (0.0f64, 0.0f64);
        for i in -400..=400 {
            for j in -50..=50 {
                let z = c(0.01 * i as f64, 0.01 * j as f64);
                let v = symbol(z, theta).norm();
                best = best.max(v);
                if (z - c(0.0, 0.5)).norm().min((z + c(0.0, 0.5)).norm()) >= 0.05 {
                    far = far.max(v);
                }
            }
        }
        ok &= (best - target).abs() <= 1e-6 && far < target - 1e-6;
        detail.push(format!("{theta:.4}: {best:.9} vs {target:.9}"));
    }
    log.hard("strip", "symbol_sup", ok, format!("max |symbol| on the closed strip, attained only near +-i/2: {}", detail.join(", ")));

    let mut ok = true;
    for k in 1..=40 {
        let theta = PI / 2.0 * k as f64 / 40.0;
        for i in -500..=500 {
            let x = c(0.02 * i as f64, 0.0);
            let d = symbol(x, theta).norm_sqr() - symbol(x, PI - theta).norm_sqr();
            ok &= d >= -1e-14 && d <= 1.0 - 2.0 * theta / PI + 1e-14;
        }
        ok &= 1.0 - 2.0 * theta / PI <= theta.cos() + 1e-15;
    }
    log.hard("strip", "symbol_difference", ok, "0 <= |P_t|^2 - |P_(pi-t)|^2 <= 1 - 2t/pi <= cos t".into());

    let wide = LineRule::new(60.0, 0.01);
    let mut worst: f64 = 0.0;
    for sigma in [0.7, PI / 2.0, 2.2] {
        for sigma_h in [0.9, 1.9] {
            let h = HardyLines::from_fn(&wide, |z| symbol(z, sigma_h));
            for z0 in [c(0.0, 0.0), c(0.0, 0.3), c(0.5, 0.2)] {
                let k = HardyLines::from_fn(&wide, |z| symbol(z - z0.conj(), sigma));
                let got = hardy_inner(&k, &h, sigma)? * (TAU / sigma.sin());
                worst = worst.max((got - symbol(z0, sigma_h)).norm());
            }
        }
    }
    log.hard("strip", "reproducing_kernel", worst <= 1e-6, format!("max deviation {worst:.2e}"));

    let one = StripSample::from_fn(0.1, &rule, |_| c(1.0, 0.0));
    let two = convolve(&convolve(&one, 0.8)?, 1.1)?;
    let want = (PI - 0.8) * (PI - 1.1) / (PI * PI);
    let err = (two.values[rule.len() / 2].re - want).abs();
    log.hard("strip", "composition_multiplies_symbols", err <= 1e-10, format!("mass of P_0.8 * P_1.1 off by {err:.2e}"));
    Ok(())
}

fn dtd_suite(log: &mut Log, rng: &mut ChaCha8Rng, quad: &QuadratureConfig) -> Result<()> {
    let geom = skewed();
    let rule = LineRule::new(40.0, 0.05);
    let mut worst: f64 = 0.0;
    for trial in 0..10 {
        let from = trial % 2;
        let t = random_trace(rng, from, 6);
        let direct = dtd::apply_dtd_on_line(&t, &geom, &rule)?;
        let f = dtd::pullback(&t, &geom, Side::Exterior, &rule);
        let h = dtd::pullback(&t, &geom, Side::Interior, &rule);
        let conv = dtd::strip_gamma(&geom, from, &f, &h)?;
        for (k, tau) in rule.nodes().iter().enumerate() {
            if tau.abs() <= 20.0 {
                worst = worst.max((direct.values[k] - conv.values[k]).norm());
            }
        }
    }
    log.hard("dtd", "disk_strip_agreement", worst <= 1e-6, format!("max deviation over 10 traces {worst:.2e}"));

    let l = 10;
    let mut worst: f64 = 0.0;
    for from in [0usize, 1] {
        let j = 1 - from;
        let m = assemble_gamma(&geom, from, l, quad)?;
        let arc = geom.arcs.interior[j];
        let arule = quad.arc_rule(arc.start, arc.end, 4 * l);
        let (ri, rj) = (geom.disks[from].radius, geom.disks[j].radius);
        for _ in 0..5 {
            let t = random_trace(rng, from, l);
            let vals = dtd::apply_dtd(&t, &geom, &arule.nodes)?;
            let y = matvec(&m, &t.to_orthonormal(ri));
            for k in -(l as i64)..=(l as i64) {
                let f: Vec<_> = arule.nodes.iter().zip(&vals).map(|(&p, v)| v * Complex64::from_polar(1.0, -(k as f64) * p)).collect();
                let ck = integrate_arc(&f, &arule, 1.0) / TAU;
                worst = worst.max((y[(k + l as i64) as usize] - ck * (TAU * rj).sqrt()).norm());
            }
        }
    }
    log.hard("dtd", "matrix_free_consistency", worst <= 1e-8, format!("max deviation {worst:.2e}"));

    for (name, geom) in [("pi/2", TwoDiskGeometry::symmetric(PI / 2.0, 1.0)?), ("skewed", skewed())] {
        let norms: Vec<f64> = ladder(quad.profile)
            .iter()
            .map(|&l| linalg::top_singular_value(&assemble_gamma(&geom, 0, l, quad)?))
            .collect::<Result<_>>()?;
        let upper = spectral::gamma_norm_sq_upper(geom.theta, geom.sigma1);
        let top = *norms.last().unwrap();
        log.hard("dtd", &format!("gamma2_monotone[{name}]"), monotone(&norms), format!("||gamma2||_L = {}", fmt_list(&norms)));
        log.hard("dtd", &format!("gamma2_upper[{name}]"), top * top <= upper + 1e-9, format!("{:.6} <= {upper:.6}", top * top));
        log.soft("dtd", &format!("gamma2_lower[{name}]"), top >= 0.98, format!("1 - ||gamma2||^2 = {:.4} at the top of the ladder", 1.0 - top * top));
    }
    Ok(())
}

fn schwarz_suite(log: &mut Log, rng: &mut ChaCha8Rng, quad: &QuadratureConfig) -> Result<()> {
    let disks = vec![Disk::new(c(0.0, 0.0), 1.0)?, Disk::new(c(1.3, 0.4), 0.8)?];
    let smooth: BoundaryData = Shared::new(|j, phi| c((2.0 * phi).cos() + j as f64, 0.3 * phi.sin()));
    let spec = ProblemSpec::new(disks.clone(), smooth, 10, *quad)?;
    let u = solve_direct(&spec)?;
    let again = sweep(&SchwarzState::from_trace(u.clone()), &spec)?;
    let gap = crate::schwarz::difference_norm(&again.global(), &u, &disks) / u.norm(&disks);
    log.hard("schwarz", "fixed_point", gap <= 1e-10, format!("relative sweep defect {gap:.2e}"));

    let geom = intersect(disks[0], disks[1])?;
    let (g1, g2) = assemble_pair(&geom, 10, quad)?;
    let b = block_from_pair(&g1, &g2, OperatorKind::B);
    let pg = projected_data(&spec)?.to_orthonormal(&disks);
    let n = 21;
    let parts = (0..2).map(|j| random_trace(rng, j, 10)).collect();
    let mut state = SchwarzState::from_trace(GlobalTrace { parts });
    let mut x = state.global().to_orthonormal(&disks);
    for _ in 0..5 {
        state = sweep(&state, &spec)?;
        x = matvec(&b.matrix, &x).iter().zip(&pg).map(|(a, b)| a + b).collect();
    }
    let y = state.global().to_orthonormal(&disks);
    let diff = linalg::norm(&x.iter().zip(&y).map(|(a, b)| a - b).collect::<Vec<_>>()) / linalg::norm(&x);
    log.hard("schwarz", "error_recursion", diff <= 1e-10 && x.len() == 2 * n, format!("trace and matrix routes differ by {diff:.2e}"));

    let zero: BoundaryData = Shared::new(|_, _| c(0.0, 0.0));
    let top = *ladder(quad.profile).last().unwrap();
    for theta in [PI / 4.0, PI / 2.0] {
        let geom = TwoDiskGeometry::symmetric(theta, 1.0)?;
        let f = spectral::f(theta);
        let mut rates = Vec::new();
        for &l in &ladder(quad.profile) {
            let spec = ProblemSpec::new(geom.disks.to_vec(), zero.clone(), l, *quad)?;
            let parts = (0..2).map(|j| random_trace(rng, j, l)).collect();
            let reference = SchwarzState::zero(&spec).global();
            let t = convergence_study(&spec, &reference, SchwarzState::from_trace(GlobalTrace { parts }), 60)?;
            rates.push(t.rate.unwrap_or(0.0));
        }
        let worst = rates.iter().cloned().fold(0.0, f64::max);
        log.hard("schwarz", &format!("rate_below_f[{theta:.4}]"), worst <= f + 0.02, format!("rates {} <= {:.6}", fmt_list(&rates), f + 0.02));
        if top >= 128 {
            let s = (theta / 2.0).sin();
            log.soft("schwarz", &format!("rate_below_s[{theta:.4}]"), worst <= s + 0.02, format!("rate {worst:.6} <= {:.6}", s + 0.02));
        }
    }

    let geom = TwoDiskGeometry::symmetric(PI / 2.0, 1.0)?;
    let e = eigenpair(&geom, c(0.0, 0.3), quad)?;
    let spec = ProblemSpec::new(geom.disks.to_vec(), zero, top, *quad)?;
    let reference = SchwarzState::zero(&spec).global();
    let t = convergence_study(&spec, &reference, SchwarzState::from_trace(GlobalTrace { parts: e.traces(&geom, top).to_vec() }), 10)?;
    let floor = e.sqrt_lambda.norm() - 0.01;
    let ratios: Vec<f64> = t.rows.iter().filter_map(|r| r.ratio).collect();
    let low = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    log.soft("schwarz", "eigen_ratio_floor", low >= floor, format!("min ratio {low:.4} >= |sqrt(lambda)| - 0.01 = {floor:.4} at L = {top}"));
    Ok(())
}

fn spectral_suite(log: &mut Log, quad: &QuadratureConfig) -> Result<()> {
    let ladder = ladder(quad.profile);
    let asymptotic = *ladder.last().unwrap() >= 128;
    for (name, geom) in [
        ("pi/4", TwoDiskGeometry::symmetric(PI / 4.0, 1.0)?),
        ("pi/2", TwoDiskGeometry::symmetric(PI / 2.0, 1.0)?),
        ("3pi/4", TwoDiskGeometry::symmetric(3.0 * PI / 4.0, 1.0)?),
        ("skewed", skewed()),
    ] {
        let f = spectral::f(geom.theta);
        let s = (geom.theta / 2.0).sin();
        let (mut rho, mut numrad, mut norm, mut coer) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for &l in &ladder {
            let op = assemble_block(&geom, l, OperatorKind::B, quad)?;
            let est = spectrum_block(&op)?;
            rho.push(est.spectral_radius);
            numrad.push(est.numerical_radius);
            norm.push(est.top_singular_value);
            coer.push(coercivity(&op)?);
        }
        log.hard("spectral", &format!("numrad_upper[{name}]"), numrad.iter().all(|&w| w <= f + 1e-9), format!("r(B_L) = {} <= f = {f:.6}", fmt_list(&numrad)));
        log.hard("spectral", &format!("norm_upper[{name}]"), norm.iter().all(|&n| n <= 2f64.sqrt()), format!("||B_L|| = {} <= sqrt 2", fmt_list(&norm)));
        log.hard(
            "spectral",
            &format!("monotone[{name}]"),
            monotone(&numrad) && monotone(&norm),
            format!("r {} | norm {}", fmt_list(&numrad), fmt_list(&norm)),
        );
        log.soft("spectral", &format!("rho_monotone[{name}]"), monotone(&rho), format!("rho {}", fmt_list(&rho)));
        log.hard("spectral", &format!("coercivity_floor[{name}]"), coer.iter().all(|&a| a >= 1.0 - f - 1e-9), format!("min Re<u, A_L u> = {} >= 1 - f", fmt_list(&coer)));
        if geom.beta2 <= PI / 2.0 {
            let (_, g2) = assemble_pair(&geom, *ladder.last().unwrap(), quad)?;
            let n2 = linalg::top_singular_value(&g2)?;
            log.hard("spectral", &format!("gamma2_unit[{name}]"), n2 <= 1.0 + 1e-9, format!("||gamma2|| = {n2:.6} <= 1 for beta2 <= pi/2"));
        }
        if asymptotic {
            let (w, n, a) = (*numrad.last().unwrap(), *norm.last().unwrap(), *coer.last().unwrap());
            log.soft("spectral", &format!("numrad_lower[{name}]"), w >= (1.0 + s) / 2.0 - 0.03, format!("r(B_128) = {w:.6} >= {:.6}", (1.0 + s) / 2.0 - 0.03));
            log.soft("spectral", &format!("norm_lower[{name}]"), n >= 0.98, format!("||B_128|| = {n:.6} >= 0.98"));
            log.soft("spectral", &format!("coercivity_window[{name}]"), a <= (1.0 - s) / 2.0 + 0.02, format!("{a:.6} <= {:.6}", (1.0 - s) / 2.0 + 0.02));
        }
    }
    Ok(())
}
