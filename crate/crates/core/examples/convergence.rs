//! Measured Schwarz contraction against sin(theta/2) and the discrete envelope f(theta).

use std::f64::consts::PI;
use std::sync::Arc;

use ddcosmo::disk_harmonic::{GlobalTrace, TraceFunction};
use ddcosmo::geometry::TwoDiskGeometry;
use ddcosmo::quadrature::{Profile, QuadratureConfig};
use ddcosmo::schwarz::{convergence_study, ProblemSpec, SchwarzState};
use ddcosmo::spectral::f;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> ddcosmo::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let bandwidth = 64;
    println!("{:>8} {:>10} {:>10} {:>10}", "theta", "measured", "sin(t/2)", "f(t)");
    for theta in [PI / 4.0, PI / 2.0, 3.0 * PI / 4.0] {
        let geom = TwoDiskGeometry::symmetric(theta, 1.0)?;
        let zero = Arc::new(|_, _| Complex64::new(0.0, 0.0));
        let spec = ProblemSpec::new(geom.disks.to_vec(), zero, bandwidth, QuadratureConfig::new(Profile::Standard))?;
        let parts = (0..2)
            .map(|j| TraceFunction::from_coefficients(j, (0..2 * bandwidth + 1).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0)).collect()))
            .collect();
        let reference = SchwarzState::zero(&spec).global();
        let table = convergence_study(&spec, &reference, SchwarzState::from_trace(GlobalTrace { parts }), 40)?;
        println!("{theta:>8.4} {:>10.6} {:>10.6} {:>10.6}", table.rate.unwrap_or(f64::NAN), (theta / 2.0).sin(), f(theta));
    }
    Ok(())
}
