//! The strip Poisson kernel: mass, Fourier symbol and convolution of a plane wave.

use std::f64::consts::PI;

use ddcosmo::quadrature::{integrate_line, LineRule};
use ddcosmo::strip::{convolve, poisson_kernel, symbol, StripSample};
use num_complex::Complex64;

fn main() -> ddcosmo::Result<()> {
    let rule = LineRule::new(40.0, 0.05);
    let theta = 1.0;
    let kernel: Vec<Complex64> = rule.nodes().iter().map(|&t| Complex64::new(poisson_kernel(t, theta), 0.0)).collect();
    println!("mass {:.12} vs (pi - theta)/pi = {:.12}", integrate_line(&kernel, &rule).re, (PI - theta) / PI);
    let x = 0.7;
    let wave = StripSample::from_fn(0.0, &rule, |t| Complex64::from_polar(1.0, x * t));
    let out = convolve(&wave, theta)?;
    let mid = rule.len() / 2;
    println!("P * e^(ix tau) at tau = 0: {:.10}, symbol: {:.10}", out.values[mid], symbol(Complex64::new(x, 0.0), theta));
    println!("sup of |symbol| on the strip: {:.10} = cos(theta/2) = {:.10}", symbol(Complex64::new(0.0, 0.5), theta).norm(), (theta / 2.0).cos());
    Ok(())
}
