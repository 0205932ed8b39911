//! Galerkin error against a manufactured solution with algebraic coefficient decay.

use std::f64::consts::PI;

use ddcosmo::geometry::TwoDiskGeometry;
use ddcosmo::manufactured::{cea_constant, discretization_error, loglog_slope, Manufactured};
use ddcosmo::quadrature::{Profile, QuadratureConfig};

fn main() -> ddcosmo::Result<()> {
    let geom = TwoDiskGeometry::symmetric(PI / 2.0, 1.0)?;
    let quad = QuadratureConfig::new(Profile::Standard);
    let m = Manufactured::new(&geom, 2)?;
    let mut points = Vec::new();
    for l in [8, 16, 32, 64] {
        let s = discretization_error(&m, l, &quad)?;
        println!("L = {l:>3}: ||u - u_L|| = {:.3e}, best approximation {:.3e}", s.error, s.best);
        points.push((l as f64, s.error));
    }
    println!("slope {:.3}, quasi-optimality constant bound {:.3}", loglog_slope(&points), cea_constant(geom.theta));
    Ok(())
}
