//! Spectral radius, numerical radius and norms of the discrete operator as L grows.

use std::f64::consts::PI;

use ddcosmo::dtd::{assemble_pair, block_from_pair, OperatorKind};
use ddcosmo::geometry::TwoDiskGeometry;
use ddcosmo::linalg;
use ddcosmo::quadrature::{Profile, QuadratureConfig};
use ddcosmo::spectral::{spectrum_block, theory};

fn main() -> ddcosmo::Result<()> {
    let geom = TwoDiskGeometry::symmetric(PI / 2.0, 1.0)?;
    let report = theory(&geom)?;
    println!("theory: rho = {:.6}, numerical radius in [{:.6}, {:.6}]", report.rho, report.numerical_radius_window[0], report.numerical_radius_window[1]);
    let quad = QuadratureConfig::new(Profile::Standard);
    for l in [8, 16, 32, 64] {
        let (g1, g2) = assemble_pair(&geom, l, &quad)?;
        let rho = linalg::spectral_radius(&(&g1 * &g2))?;
        let est = spectrum_block(&block_from_pair(&g1, &g2, OperatorKind::B))?;
        println!("L = {l:>3}: rho = {rho:.6}, r(B) = {:.6}, ||gamma2|| = {:.6}", est.numerical_radius, linalg::top_singular_value(&g2)?);
    }
    Ok(())
}
