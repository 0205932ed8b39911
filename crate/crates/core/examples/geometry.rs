//! Overlap angles, arcs and the bipolar frame of two intersecting disks.

use ddcosmo::geometry::{intersect, Disk, Side};
use num_complex::Complex64;

fn main() -> ddcosmo::Result<()> {
    let g = intersect(Disk::new(Complex64::new(0.0, 0.0), 1.0)?, Disk::new(Complex64::new(1.1, 0.4), 0.8)?)?;
    println!("theta = {:.6}, beta = ({:.6}, {:.6})", g.theta, g.beta1, g.beta2);
    println!("intersection points a1 = {:.4}, a2 = {:.4}", g.a1, g.a2);
    for (disk, side) in [(0, Side::Exterior), (0, Side::Interior), (1, Side::Interior), (1, Side::Exterior)] {
        let arc = g.arcs.arc(disk, side);
        let sigma = g.line_height(disk, side);
        let p = g.strip_point(0.0, sigma);
        println!("disk {disk} {side:?}: arc [{:.4}, {:.4}], line sigma = {sigma:.4}, tau = 0 maps to {p:.4}", arc.start, arc.end);
    }
    Ok(())
}
