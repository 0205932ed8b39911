//! Parallel Schwarz iteration on a union of disks and the direct Galerkin solve for two disks.

use std::f64::consts::TAU;
use std::sync::Arc as Shared;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::disk_harmonic::{truncated_extension, GlobalTrace, TraceFunction};
use crate::dtd::{assemble_block, OperatorKind};
use crate::error::{Error, Result, Warning};
use crate::geometry::{intersect, Disk};
use crate::linalg;
use crate::quadrature::{integrate_arc, QuadratureConfig};

/// Dirichlet data as a function of `(disk, polar angle)`; only read on exterior arcs.
pub type BoundaryData = Shared<dyn Fn(usize, f64) -> Complex64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stopping {
    pub max_iters: usize,
    /// Bound on the `H`-norm of the difference of successive iterates.
    pub tol: f64,
}

impl Default for Stopping {
    fn default() -> Self {
        Self { max_iters: 500, tol: 1e-12 }
    }
}

/// An arc of one circle between consecutive intersection points, with the set of other
/// disks covering it.
#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub start: f64,
    pub end: f64,
    pub covering: Vec<usize>,
}

impl Piece {
    pub fn is_exterior(&self) -> bool {
        self.covering.is_empty()
    }
}

#[derive(Clone)]
pub struct ProblemSpec {
    pub disks: Vec<Disk>,
    pub boundary: BoundaryData,
    pub bandwidth: usize,
    pub stopping: Stopping,
    pub quad: QuadratureConfig,
    pieces: Vec<Vec<Piece>>,
}

impl std::fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("disks", &self.disks)
            .field("bandwidth", &self.bandwidth)
            .field("stopping", &self.stopping)
            .field("quad", &self.quad)
            .finish_non_exhaustive()
    }
}

impl ProblemSpec {
    pub fn new(disks: Vec<Disk>, boundary: BoundaryData, bandwidth: usize, quad: QuadratureConfig) -> Result<Self> {
        if disks.len() < 2 {
            return Err(Error::InvalidInput("at least two disks are required".into()));
        }
        let pieces = decompose(&disks)?;
        Ok(Self { disks, boundary, bandwidth, stopping: Stopping::default(), quad, pieces })
    }

    pub fn with_stopping(mut self, stopping: Stopping) -> Self {
        self.stopping = stopping;
        self
    }

    pub fn pieces(&self, disk: usize) -> &[Piece] {
        &self.pieces[disk]
    }
}

/// Splits every circle at its intersection points with the other circles.
pub fn decompose(disks: &[Disk]) -> Result<Vec<Vec<Piece>>> {
    let mut out = Vec::with_capacity(disks.len());
    for (j, dj) in disks.iter().enumerate() {
        let mut cuts = Vec::new();
        for (i, di) in disks.iter().enumerate() {
            if i == j {
                continue;
            }
            let d = (di.center - dj.center).norm();
            if d >= di.radius + dj.radius {
                if d <= di.radius + dj.radius + 1e-12 * di.radius.max(dj.radius) {
                    return Err(Error::DegenerateGeometry(format!("disks {i} and {j} are tangent")));
                }
                continue;
            }
            let g = intersect(*dj, *di)?;
            cuts.push((g.a1 - dj.center).arg());
            cuts.push((g.a2 - dj.center).arg());
        }
        let mut pieces = Vec::new();
        if cuts.is_empty() {
            pieces.push(Piece { start: 0.0, end: TAU, covering: Vec::new() });
        } else {
            let base = cuts[0];
            let mut rel: Vec<f64> = cuts.iter().map(|c| (c - base).rem_euclid(TAU)).collect();
            rel.sort_by(f64::total_cmp);
            rel.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
            for k in 0..rel.len() {
                let start = base + rel[k];
                let end = if k + 1 < rel.len() { base + rel[k + 1] } else { base + TAU };
                let mid = dj.point_at(0.5 * (start + end));
                let covering = (0..disks.len()).filter(|&i| i != j && disks[i].depth(mid) > 0.0).collect();
                pieces.push(Piece { start, end, covering });
            }
        }
        out.push(pieces);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchwarzState {
    pub iteration: usize,
    pub traces: Vec<TraceFunction>,
    pub error_history: Vec<f64>,
}

impl SchwarzState {
    pub fn zero(spec: &ProblemSpec) -> Self {
        Self::from_trace(GlobalTrace { parts: (0..spec.disks.len()).map(|j| TraceFunction::zeros(j, spec.bandwidth)).collect() })
    }

    pub fn from_trace(trace: GlobalTrace) -> Self {
        Self { iteration: 0, traces: trace.parts, error_history: Vec::new() }
    }

    pub fn global(&self) -> GlobalTrace {
        GlobalTrace { parts: self.traces.clone() }
    }
}

/// Weighted average of the harmonic extensions of all disks strictly containing `point`,
/// with weights given by the distance to each disk's boundary.
pub fn glue_partition_of_unity(disks: &[Disk], traces: &[TraceFunction], point: Complex64) -> Result<Complex64> {
    let mut total = 0.0;
    let mut value = Complex64::new(0.0, 0.0);
    for (disk, t) in disks.iter().zip(traces) {
        let w = disk.depth(point);
        if w > 0.0 {
            total += w;
            value += truncated_extension(t, disk, point)? * w;
        }
    }
    if total > 0.0 {
        Ok(value / total)
    } else {
        Err(Error::NoCoveringDisk)
    }
}

fn local_trace(spec: &ProblemSpec, j: usize, traces: &[TraceFunction]) -> Result<TraceFunction> {
    let l = spec.bandwidth;
    let disk = spec.disks[j];
    let mut t = TraceFunction::zeros(j, l);
    for piece in &spec.pieces[j] {
        let rule = spec.quad.arc_rule(piece.start, piece.end, 2 * l + 2);
        let values = rule
            .nodes
            .iter()
            .map(|&phi| {
                if piece.is_exterior() {
                    Ok((spec.boundary)(j, phi))
                } else {
                    glue_partition_of_unity(&spec.disks, traces, disk.point_at(phi))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        for (k, c) in t.coefficients.iter_mut().enumerate() {
            let ell = k as f64 - l as f64;
            let f: Vec<Complex64> =
                rule.nodes.iter().zip(&values).map(|(&phi, v)| v * Complex64::from_polar(1.0, -ell * phi)).collect();
            *c += integrate_arc(&f, &rule, 1.0) / TAU;
        }
    }
    Ok(t)
}

/// One block-Jacobi step: every disk solves with the given data on its exterior arcs and
/// the previous iterate on its interior arcs.
pub fn sweep(state: &SchwarzState, spec: &ProblemSpec) -> Result<SchwarzState> {
    let traces = (0..spec.disks.len())
        .into_par_iter()
        .map(|j| local_trace(spec, j, &state.traces))
        .collect::<Result<Vec<_>>>()?;
    Ok(SchwarzState { iteration: state.iteration + 1, traces, error_history: state.error_history.clone() })
}

/// `P_L g`: the first sweep from zero.
pub fn projected_data(spec: &ProblemSpec) -> Result<GlobalTrace> {
    Ok(sweep(&SchwarzState::zero(spec), spec)?.global())
}

/// Iterates until successive iterates differ by less than the tolerance.
pub fn iterate(spec: &ProblemSpec, initial: SchwarzState) -> Result<SchwarzState> {
    let mut state = initial;
    for _ in 0..spec.stopping.max_iters {
        let next = sweep(&state, spec)?;
        let diff = difference_norm(&next.global(), &state.global(), &spec.disks);
        state = next;
        if diff < spec.stopping.tol {
            break;
        }
    }
    Ok(state)
}

pub fn difference_norm(a: &GlobalTrace, b: &GlobalTrace, disks: &[Disk]) -> f64 {
    a.parts
        .iter()
        .zip(&b.parts)
        .zip(disks)
        .map(|((x, y), d)| {
            let diff = TraceFunction::from_coefficients(x.disk, x.coefficients.iter().zip(&y.coefficients).map(|(p, q)| p - q).collect());
            diff.norm_sq(d.radius)
        })
        .sum::<f64>()
        .sqrt()
}

/// Relative residual threshold of the direct solve.
pub const SOLVE_TOL: f64 = 1e-10;

/// Solves `A_L u = P_L g` for two disks.
pub fn solve_direct(spec: &ProblemSpec) -> Result<GlobalTrace> {
    if spec.disks.len() != 2 {
        return Err(Error::InvalidInput("the direct solve needs exactly two disks".into()));
    }
    solve_system(&spec.disks, spec.bandwidth, &spec.quad, &projected_data(spec)?)
}

/// Solves `A_L u = rhs` for two disks, `rhs` already in `H_L`.
pub fn solve_system(disks: &[Disk], bandwidth: usize, quad: &QuadratureConfig, rhs: &GlobalTrace) -> Result<GlobalTrace> {
    let geom = intersect(disks[0], disks[1])?;
    let a = assemble_block(&geom, bandwidth, OperatorKind::A, quad)?;
    let (x, residual) = linalg::solve(&a.matrix, &rhs.to_orthonormal(disks));
    if residual > SOLVE_TOL {
        return Err(Error::SolveFailure { residual, threshold: SOLVE_TOL });
    }
    Ok(GlobalTrace::from_orthonormal(disks, bandwidth, &x))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub error: f64,
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    /// Geometric mean of the last five ratios.
    pub rate: Option<f64>,
    pub warning: Option<Warning>,
}

/// Below this error the ratios stop carrying information.
pub const STAGNATION: f64 = 1e-13;

/// Runs `n_iters` sweeps from `initial` and tabulates `||u_ref - u^(n)||_H`.
pub fn convergence_study(spec: &ProblemSpec, reference: &GlobalTrace, initial: SchwarzState, n_iters: usize) -> Result<ConvergenceTable> {
    let mut state = initial;
    let mut rows = Vec::with_capacity(n_iters + 1);
    let mut warning = None;
    for n in 0..=n_iters {
        if n > 0 {
            state = sweep(&state, spec)?;
        }
        let error = difference_norm(&state.global(), reference, &spec.disks);
        state.error_history.push(error);
        let ratio = rows.last().map(|r: &ConvergenceRow| error / r.error);
        rows.push(ConvergenceRow { n, error, ratio });
        if error < STAGNATION {
            warning = Some(Warning::StagnationAtMachineEps { iteration: n });
            break;
        }
    }
    let ratios: Vec<f64> = rows.iter().filter_map(|r| r.ratio).collect();
    let rate = (ratios.len() >= 5).then(|| geometric_mean(&ratios[ratios.len() - 5..]));
    Ok(ConvergenceTable { rows, rate, warning })
}

fn geometric_mean(x: &[f64]) -> f64 {
    (x.iter().map(|r| r.ln()).sum::<f64>() / x.len() as f64).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dtd::{assemble_pair, matvec};
    use crate::geometry::TwoDiskGeometry;
    use crate::quadrature::Profile;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ones() -> BoundaryData {
        Shared::new(|_, _| c(1.0, 0.0))
    }

    fn two_disks() -> Vec<Disk> {
        vec![Disk::new(c(0.0, 0.0), 1.0).unwrap(), Disk::new(c(1.3, 0.4), 0.8).unwrap()]
    }

    fn smooth() -> BoundaryData {
        Shared::new(|j, phi| c((2.0 * phi).cos() + j as f64, 0.3 * phi.sin()))
    }

    fn random_state(spec: &ProblemSpec, seed: u64) -> SchwarzState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 2 * spec.bandwidth + 1;
        let parts = (0..spec.disks.len())
            .map(|j| TraceFunction::from_coefficients(j, (0..n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()))
            .collect();
        SchwarzState::from_trace(GlobalTrace { parts })
    }

    #[test]
    fn pieces_of_two_disks() {
        let disks = two_disks();
        let geom = intersect(disks[0], disks[1]).unwrap();
        let p = decompose(&disks).unwrap();
        for (j, pieces) in p.iter().enumerate() {
            assert_eq!(pieces.len(), 2);
            let int = pieces.iter().find(|q| !q.is_exterior()).unwrap();
            assert!((int.end - int.start - 2.0 * geom.beta(j)).abs() < 1e-12);
            assert_eq!(int.covering, vec![1 - j]);
        }
    }

    #[test]
    fn constants_are_fixed_points() {
        let spec = ProblemSpec::new(two_disks(), ones(), 12, QuadratureConfig::new(Profile::Standard)).unwrap();
        let mut state = SchwarzState::zero(&spec);
        for _ in 0..200 {
            state = sweep(&state, &spec).unwrap();
        }
        for t in &state.traces {
            for k in t.modes() {
                let want = if k == 0 { 1.0 } else { 0.0 };
                assert!((t.coefficient(k) - c(want, 0.0)).norm() < 1e-10);
            }
        }
        let u = solve_direct(&spec).unwrap();
        for t in &u.parts {
            assert!((t.coefficient(0) - c(1.0, 0.0)).norm() < 1e-12);
            assert!(t.modes().filter(|&k| k != 0).all(|k| t.coefficient(k).norm() < 1e-12));
        }
    }

    #[test]
    fn sweep_matches_matrix_form() {
        let spec = ProblemSpec::new(two_disks(), smooth(), 10, QuadratureConfig::new(Profile::Standard)).unwrap();
        let geom = intersect(spec.disks[0], spec.disks[1]).unwrap();
        let (g1, g2) = assemble_pair(&geom, 10, &spec.quad).unwrap();
        let b = crate::dtd::block_from_pair(&g1, &g2, OperatorKind::B);
        let pg = projected_data(&spec).unwrap().to_orthonormal(&spec.disks);
        let mut state = random_state(&spec, 7);
        let mut x = state.global().to_orthonormal(&spec.disks);
        for _ in 0..5 {
            state = sweep(&state, &spec).unwrap();
            x = matvec(&b.matrix, &x).iter().zip(&pg).map(|(a, b)| a + b).collect();
        }
        let y = state.global().to_orthonormal(&spec.disks);
        let diff = linalg::norm(&x.iter().zip(&y).map(|(a, b)| a - b).collect::<Vec<_>>());
        assert!(diff < 1e-10 * linalg::norm(&x));
    }

    #[test]
    fn direct_solve_is_fixed_point_and_limit() {
        let spec = ProblemSpec::new(two_disks(), smooth(), 10, QuadratureConfig::new(Profile::Standard)).unwrap();
        let u = solve_direct(&spec).unwrap();
        let again = sweep(&SchwarzState::from_trace(u.clone()), &spec).unwrap();
        assert!(difference_norm(&again.global(), &u, &spec.disks) < 1e-10 * u.norm(&spec.disks));
        let mut state = SchwarzState::zero(&spec);
        for _ in 0..200 {
            state = sweep(&state, &spec).unwrap();
        }
        assert!(difference_norm(&state.global(), &u, &spec.disks) < 1e-8);
        let stop = iterate(&spec, SchwarzState::zero(&spec)).unwrap();
        assert!(stop.iteration < 500);
        assert!(difference_norm(&stop.global(), &u, &spec.disks) < 1e-9);
    }

    #[test]
    fn convergence_table() {
        let geom = TwoDiskGeometry::symmetric(PI / 2.0, 1.0).unwrap();
        let zero: BoundaryData = Shared::new(|_, _| c(0.0, 0.0));
        let spec = ProblemSpec::new(geom.disks.to_vec(), zero, 8, QuadratureConfig::new(Profile::Fast)).unwrap();
        let reference = SchwarzState::zero(&spec).global();
        let table = convergence_study(&spec, &reference, random_state(&spec, 3), 12).unwrap();
        assert_eq!(table.rows.len(), 13);
        assert!(table.rows[0].ratio.is_none());
        let rate = table.rate.unwrap();
        assert!(rate > 0.0 && rate < 1.0);
        let big = convergence_study(&spec, &reference, random_state(&spec, 3), 400).unwrap();
        assert!(matches!(big.warning, Some(Warning::StagnationAtMachineEps { .. })));
    }

    #[test]
    fn three_disk_chain_keeps_constants() {
        let disks = vec![
            Disk::new(c(0.0, 0.0), 1.0).unwrap(),
            Disk::new(c(1.5, 0.0), 1.0).unwrap(),
            Disk::new(c(3.0, 0.2), 1.0).unwrap(),
        ];
        let spec = ProblemSpec::new(disks, ones(), 8, QuadratureConfig::new(Profile::Fast)).unwrap();
        let mut state = SchwarzState::zero(&spec);
        for _ in 0..100 {
            state = sweep(&state, &spec).unwrap();
        }
        for t in &state.traces {
            assert!((t.coefficient(0) - c(1.0, 0.0)).norm() < 1e-9);
        }
        let s2 = sweep(&state, &spec).unwrap();
        assert!(difference_norm(&s2.global(), &state.global(), &spec.disks) < 1e-9);
    }

    #[test]
    fn glue_cases() {
        let disks = two_disks();
        let t = vec![TraceFunction::constant(0, 3, c(2.0, 0.0)), TraceFunction::constant(1, 3, c(5.0, 0.0))];
        // Point on circle 0 inside disk 1: only disk 1 contributes.
        let geom = intersect(disks[0], disks[1]).unwrap();
        let p = disks[0].point_at(geom.arcs.interior[0].mid());
        assert!((glue_partition_of_unity(&disks, &t, p).unwrap() - c(5.0, 0.0)).norm() < 1e-14);
        let same = vec![TraceFunction::constant(0, 3, c(4.0, 0.0)), TraceFunction::constant(1, 3, c(4.0, 0.0))];
        let q = c(0.9, 0.2);
        assert!((glue_partition_of_unity(&disks, &same, q).unwrap() - c(4.0, 0.0)).norm() < 1e-14);
        assert!(matches!(glue_partition_of_unity(&disks, &t, c(10.0, 0.0)), Err(Error::NoCoveringDisk)));
    }

    #[test]
    fn rejects_degenerate_layouts() {
        let tangent = vec![Disk::new(c(0.0, 0.0), 1.0).unwrap(), Disk::new(c(2.0, 0.0), 1.0).unwrap()];
        assert!(ProblemSpec::new(tangent, ones(), 4, QuadratureConfig::new(Profile::Fast)).is_err());
        let nested = vec![Disk::new(c(0.0, 0.0), 1.0).unwrap(), Disk::new(c(0.1, 0.0), 0.5).unwrap()];
        assert!(ProblemSpec::new(nested, ones(), 4, QuadratureConfig::new(Profile::Fast)).is_err());
    }
}
