//! Explicit eigenfunctions of gamma_1 gamma_2 and their residuals.

use std::f64::consts::PI;

use ddcosmo::geometry::TwoDiskGeometry;
use ddcosmo::quadrature::{Profile, QuadratureConfig};
use ddcosmo::spectral::eigenpair;
use num_complex::Complex64;

fn main() -> ddcosmo::Result<()> {
    let geom = TwoDiskGeometry::symmetric(2.0 * PI / 3.0, 1.0)?;
    let quad = QuadratureConfig::new(Profile::Standard);
    for z0 in [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.45), Complex64::new(0.8, -0.2)] {
        let e = eigenpair(&geom, z0, &quad)?;
        println!("z0 = {z0}: lambda = {:.6}, residual {:.2e} (disk) {:.2e} (strip)", e.lambda, e.residual_disk, e.residual_strip);
    }
    Ok(())
}
