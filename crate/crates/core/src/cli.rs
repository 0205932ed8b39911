//! Command-line front end.
//!
//! Flags override `DDCOSMO_*` environment variables, which override the config file.
//! Exit codes: 0 success, 1 verification failure or I/O error, 2 configuration error,
//! 3 numerical failure.

use std::fmt::Write as _;
use std::fs::File;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{ConfigError, Initial, RunConfig};
use crate::disk_harmonic::{GlobalTrace, TraceFunction};
use crate::dtd::{assemble_pair, block_from_pair, OperatorKind};
use crate::geometry::TwoDiskGeometry;
use crate::linalg;
use crate::quadrature::{Profile, QuadratureConfig};
use crate::schwarz::{self, convergence_study, decompose, solve_direct, ProblemSpec, SchwarzState};
use crate::spectral::{self, spectrum_block};
use crate::verify::run_battery;

pub const GENERATOR: &str = "ChaCha8";

#[derive(Debug, Parser)]
#[command(name = "ddcosmo", version, about = "Schwarz solver and spectral checks for overlapping disks")]
pub struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true, env = "DDCOSMO_CONFIG")]
    pub config: Option<PathBuf>,
    /// Quadrature precision profile: fast, standard or paranoid.
    #[arg(long, global = true, env = "DDCOSMO_PROFILE")]
    pub profile: Option<Profile>,
    /// Output directory.
    #[arg(long, global = true, env = "DDCOSMO_OUT")]
    pub out: Option<PathBuf>,
    /// Seed for random trial vectors.
    #[arg(long, global = true, env = "DDCOSMO_SEED")]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Angles, arcs and line heights of the configured disks.
    Geometry,
    /// Closed-form rates and norm windows for the configured pair.
    Predict,
    /// Direct solve of the discrete trace system; writes per-disk coefficients.
    Solve,
    /// Schwarz iteration against the direct solution; writes n, err, ratio.
    Iterate,
    /// Spectral estimates over the theta and bandwidth sweep.
    Spectrum {
        /// Also write every assembled B matrix.
        #[arg(long)]
        dump: bool,
    },
    /// Runs the invariant battery.
    Verify,
}

#[derive(Debug, thiserror::Error)]
enum Failure {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Numerical(#[from] crate::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0} hard check(s) failed")]
    Verify(usize),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Io(_) | Failure::Csv(_) | Failure::Verify(_) => 1,
        }
    }
}

/// Settings after merging flags, environment and config file.
struct Resolved {
    cfg: RunConfig,
    profile: Profile,
    quad: QuadratureConfig,
    out: PathBuf,
    seed: u64,
}

impl Resolved {
    fn new(cli: &Cli) -> Result<Self, ConfigError> {
        let cfg = match &cli.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        cfg.validate()?;
        let profile = cli.profile.or(cfg.quadrature.profile).unwrap_or_default();
        let out = cli.out.clone().or(cfg.out.clone()).unwrap_or_else(|| PathBuf::from("out"));
        let seed = cli.seed.or(cfg.seed).unwrap_or(1);
        Ok(Self { cfg, profile, quad: QuadratureConfig::new(profile), out, seed })
    }

    fn header(&self, extra: &str) -> Vec<String> {
        let mut lines = vec![format!("# ddcosmo {} profile={:?} seed={} generator={GENERATOR}", env!("CARGO_PKG_VERSION"), self.profile, self.seed)];
        if !extra.is_empty() {
            lines.push(format!("# {extra}"));
        }
        lines
    }

    fn file(&self, name: &str) -> Result<File, Failure> {
        std::fs::create_dir_all(&self.out)?;
        Ok(File::create(self.out.join(name))?)
    }

    fn csv(&self, name: &str, comments: &[String], header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf, Failure> {
        let mut file = self.file(name)?;
        for c in comments {
            writeln!(file, "{c}")?;
        }
        let mut w = csv::Writer::from_writer(file);
        if !header.is_empty() {
            w.write_record(header)?;
        }
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(self.out.join(name))
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn main_entry() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ddcosmo: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let r = Resolved::new(cli)?;
    match cli.command {
        Command::Geometry => geometry(&r),
        Command::Predict => predict(&r),
        Command::Solve => solve(&r),
        Command::Iterate => iterate(&r),
        Command::Spectrum { dump } => spectrum(&r, dump),
        Command::Verify => verify(&r),
    }
}

fn geometry(r: &Resolved) -> Result<(), Failure> {
    let disks = r.cfg.disks()?;
    let pieces = decompose(&disks)?;
    let mut rows = Vec::new();
    for (j, list) in pieces.iter().enumerate() {
        for p in list {
            let covering = p.covering.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(";");
            rows.push(vec![j.to_string(), num(p.start), num(p.end), covering]);
        }
    }
    let path = r.csv("pieces.csv", &r.header(""), &["disk", "start", "end", "covering"], &rows)?;
    println!("{} disks, {} boundary pieces -> {}", disks.len(), rows.len(), path.display());
    if disks.len() == 2 {
        let g = r.cfg.pair()?;
        let rows = pair_rows(&g);
        let path = r.csv("geometry.csv", &r.header(""), &["quantity", "value"], &rows)?;
        for row in &rows {
            println!("{:>8} = {}", row[0], row[1]);
        }
        println!("-> {}", path.display());
    }
    Ok(())
}

fn pair_rows(g: &TwoDiskGeometry) -> Vec<Vec<String>> {
    let mut rows: Vec<Vec<String>> = [("theta", g.theta), ("beta1", g.beta1), ("beta2", g.beta2), ("sigma1", g.sigma1), ("sigma2", g.sigma2)]
        .iter()
        .map(|(k, v)| vec![k.to_string(), num(*v)])
        .collect();
    for (name, p) in [("a1", g.a1), ("a2", g.a2)] {
        rows.push(vec![format!("{name}.re"), num(p.re)]);
        rows.push(vec![format!("{name}.im"), num(p.im)]);
    }
    rows
}

fn predict(r: &Resolved) -> Result<(), Failure> {
    let report = spectral::theory(&r.cfg.pair()?)?;
    let text = toml::to_string(&report).map_err(|e| std::io::Error::other(e.to_string()))?;
    let mut file = r.file("predict.toml")?;
    file.write_all(text.as_bytes())?;
    print!("{text}");
    Ok(())
}

fn problem(r: &Resolved) -> Result<ProblemSpec, Failure> {
    Ok(ProblemSpec::new(r.cfg.disks()?, r.cfg.boundary()?, r.cfg.discretization.bandwidth, r.quad)?)
}

fn solve(r: &Resolved) -> Result<(), Failure> {
    let spec = problem(r)?;
    let (u, method) = if spec.disks.len() == 2 {
        (solve_direct(&spec)?, "direct".to_string())
    } else {
        let state = schwarz::iterate(&spec, SchwarzState::zero(&spec))?;
        let method = format!("schwarz iterations={}", state.iteration);
        (state.global(), method)
    };
    let rows: Vec<Vec<String>> = u
        .parts
        .iter()
        .enumerate()
        .flat_map(|(j, t)| t.modes().map(move |l| (j, l, t.coefficient(l))).collect::<Vec<_>>())
        .map(|(j, l, c)| vec![j.to_string(), l.to_string(), num(c.re), num(c.im)])
        .collect();
    let extra = format!("bandwidth={} method={method}", spec.bandwidth);
    let path = r.csv("solve.csv", &r.header(&extra), &["disk", "l", "re", "im"], &rows)?;
    println!("solved {} disks at L = {} -> {}", spec.disks.len(), spec.bandwidth, path.display());
    Ok(())
}

fn random_state(spec: &ProblemSpec, seed: u64) -> SchwarzState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 2 * spec.bandwidth + 1;
    let parts = (0..spec.disks.len())
        .map(|j| TraceFunction::from_coefficients(j, (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()))
        .collect();
    SchwarzState::from_trace(GlobalTrace { parts })
}

fn iterate(r: &Resolved) -> Result<(), Failure> {
    let spec = problem(r)?;
    let reference = solve_direct(&spec)?;
    let initial = match r.cfg.experiment.initial {
        Initial::Zero => SchwarzState::zero(&spec),
        Initial::Random => random_state(&spec, r.seed),
    };
    let table = convergence_study(&spec, &reference, initial, r.cfg.experiment.iterations)?;
    let rows: Vec<Vec<String>> =
        table.rows.iter().map(|row| vec![row.n.to_string(), num(row.error), row.ratio.map(num).unwrap_or_default()]).collect();
    let mut extra = format!("bandwidth={} initial={:?}", spec.bandwidth, r.cfg.experiment.initial);
    if let Some(w) = &table.warning {
        let _ = write!(extra, " warning={w:?}");
    }
    let path = r.csv("iterate.csv", &r.header(&extra), &["n", "err", "ratio"], &rows)?;
    match table.rate {
        Some(rate) => println!("{} sweeps, asymptotic rate {rate:.6} -> {}", table.rows.len() - 1, path.display()),
        None => println!("{} sweeps -> {}", table.rows.len() - 1, path.display()),
    }
    Ok(())
}

struct Cell {
    index: usize,
    geom: TwoDiskGeometry,
    bandwidth: usize,
}

fn spectrum(r: &Resolved, dump: bool) -> Result<(), Failure> {
    let geoms: Vec<TwoDiskGeometry> = if r.cfg.experiment.thetas.is_empty() {
        vec![r.cfg.pair()?]
    } else {
        r.cfg.experiment.thetas.iter().map(|&t| TwoDiskGeometry::symmetric(t, r.cfg.geometry.radius)).collect::<crate::Result<_>>()?
    };
    let cells: Vec<Cell> = geoms
        .iter()
        .enumerate()
        .flat_map(|(index, g)| r.cfg.experiment.bandwidths.iter().map(move |&bandwidth| Cell { index, geom: *g, bandwidth }))
        .collect();
    let results: Vec<_> = cells
        .par_iter()
        .map(|cell| -> crate::Result<_> {
            let (g1, g2) = assemble_pair(&cell.geom, cell.bandwidth, &r.quad)?;
            let rho = linalg::spectral_radius(&(&g1 * &g2))?;
            let b = block_from_pair(&g1, &g2, OperatorKind::B);
            let est = spectrum_block(&b)?;
            let norm = linalg::top_singular_value(&g2)?;
            Ok((rho, est.numerical_radius, norm, dump.then_some(b)))
        })
        .collect::<crate::Result<_>>()?;
    let mut rows = Vec::new();
    for (cell, (rho, numrad, norm, b)) in cells.iter().zip(&results) {
        let g = &cell.geom;
        rows.push(vec![
            cell.bandwidth.to_string(),
            num(g.theta),
            num(*rho),
            num((1.0 - g.theta.cos()) / 2.0),
            num(*numrad),
            num(spectral::f(g.theta)),
            num(*norm),
            num(spectral::gamma_norm_sq_upper(g.theta, g.sigma1).sqrt()),
        ]);
        if let Some(b) = b {
            dump_matrix(r, &format!("B_{}_L{}.csv", cell.index, cell.bandwidth), &b.matrix, g.theta, cell.bandwidth)?;
        }
    }
    let header = ["L", "theta", "rho_est", "rho_theory", "numrad_est", "f_theta", "norm_est", "norm_upper"];
    let path = r.csv("spectrum.csv", &r.header(""), &header, &rows)?;
    println!("{} cells -> {}", rows.len(), path.display());
    Ok(())
}

fn dump_matrix(r: &Resolved, name: &str, m: &crate::dtd::CMat, theta: f64, bandwidth: usize) -> Result<(), Failure> {
    let rows: Vec<Vec<String>> =
        (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| format!("{},{}", num(m[(i, j)].re), num(m[(i, j)].im))).collect()).collect();
    let extra = format!("B theta={} L={bandwidth} orthonormal basis, row-major re,im cells", num(theta));
    r.csv(name, &r.header(&extra), &[], &rows)?;
    Ok(())
}

fn verify(r: &Resolved) -> Result<(), Failure> {
    let checks = run_battery(r.profile, r.seed)?;
    let mut rows = Vec::new();
    let mut hard_failures = 0;
    for c in &checks {
        let status = match (c.pass, c.hard) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "ADVISORY",
        };
        hard_failures += usize::from(!c.pass && c.hard);
        println!("{status:<8} {}/{}: {}", c.suite, c.name, c.detail);
        rows.push(vec![c.suite.to_string(), c.name.clone(), if c.hard { "hard" } else { "soft" }.to_string(), status.to_string(), c.detail.clone()]);
    }
    let path = r.csv("verify.csv", &r.header(""), &["suite", "check", "kind", "status", "detail"], &rows)?;
    println!("{} checks, {hard_failures} hard failures -> {}", checks.len(), path.display());
    if hard_failures > 0 {
        return Err(Failure::Verify(hard_failures));
    }
    Ok(())
}

/// Exit code the binary would return for `args`.
pub fn exit_code_for(args: &[&str]) -> u8 {
    match Cli::try_parse_from(std::iter::once("ddcosmo").chain(args.iter().copied())) {
        Ok(cli) => match run(&cli) {
            Ok(()) => 0,
            Err(e) => e.code(),
        },
        Err(_) => 2,
    }
}
