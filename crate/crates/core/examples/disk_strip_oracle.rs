//! The same Dirichlet-to-Dirichlet map evaluated by disk quadrature and by strip convolution.

use ddcosmo::disk_harmonic::TraceFunction;
use ddcosmo::dtd::{apply_dtd_on_line, pullback, strip_gamma};
use ddcosmo::geometry::{intersect, Disk, Side};
use ddcosmo::quadrature::LineRule;
use num_complex::Complex64;

fn main() -> ddcosmo::Result<()> {
    let geom = intersect(Disk::new(Complex64::new(0.0, 0.0), 1.0)?, Disk::new(Complex64::new(0.9, -0.3), 0.7)?)?;
    let rule = LineRule::new(40.0, 0.05);
    let t = TraceFunction::from_coefficients(0, (0..13).map(|k| Complex64::new(1.0 / (1.0 + k as f64), 0.3 * (k as f64).sin())).collect());
    let direct = apply_dtd_on_line(&t, &geom, &rule)?;
    let ext = pullback(&t, &geom, Side::Exterior, &rule);
    let int = pullback(&t, &geom, Side::Interior, &rule);
    let conv = strip_gamma(&geom, 0, &ext, &int)?;
    let gap = rule.nodes().iter().zip(direct.values.iter().zip(&conv.values)).filter(|(tau, _)| tau.abs() <= 20.0).map(|(_, (a, b))| (a - b).norm()).fold(0.0, f64::max);
    println!("max |disk - strip| on |tau| <= 20: {gap:.2e}");
    Ok(())
}
