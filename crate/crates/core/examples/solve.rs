//! Direct solve on two disks and Schwarz iteration on a chain of three.

use std::sync::Arc;

use ddcosmo::geometry::Disk;
use ddcosmo::quadrature::{Profile, QuadratureConfig};
use ddcosmo::schwarz::{glue_partition_of_unity, iterate, solve_direct, BoundaryData, ProblemSpec, SchwarzState};
use num_complex::Complex64;

fn main() -> ddcosmo::Result<()> {
    let source = Complex64::new(1.0, 3.0);
    let exact = move |z: Complex64| (z - source).norm().ln();
    let quad = QuadratureConfig::new(Profile::Standard);

    let pair = vec![Disk::new(Complex64::new(0.0, 0.0), 1.0)?, Disk::new(Complex64::new(1.3, 0.2), 0.8)?];
    let chain = vec![pair[0], pair[1], Disk::new(Complex64::new(2.3, -0.1), 0.7)?];
    for (name, disks) in [("two disks", pair), ("three disks", chain)] {
        let data = disks.clone();
        let g: BoundaryData = Arc::new(move |j, phi| Complex64::new(exact(data[j].point_at(phi)), 0.0));
        let spec = ProblemSpec::new(disks.clone(), g, 24, quad)?;
        let traces = if disks.len() == 2 {
            solve_direct(&spec)?.parts
        } else {
            let state = iterate(&spec, SchwarzState::zero(&spec))?;
            println!("{name}: {} sweeps", state.iteration);
            state.traces
        };
        let p = Complex64::new(1.0, 0.1);
        let u = glue_partition_of_unity(&disks, &traces, p)?;
        println!("{name}: u({p}) = {:.12}, exact {:.12}", u.re, exact(p));
    }
    Ok(())
}
