//! Batch driver around `thetaconv-core`: body specs, run configurations,
//! sweeps, fuzzing and plot-data dumps.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use thetaconv_core::bodies::{cone_power, StarBody};
use thetaconv_core::covariogram::{normalize, CovariogramHandle};
use thetaconv_core::geometry::{
    centered, make_standard_bodies, random_polytope, sphere_grid, star_volume_from_samples,
    transform, BodyKind, Direction, Polytope, SphereGrid, MAX_DIM,
};
use thetaconv_core::verify::{
    check_c1_bound, check_logconcave_inclusion, check_mass_identity, check_monotone_family,
    check_thm1, check_thm2_sweep, check_zhang, equality_gap, theta_zero, Tolerances,
    VerificationReport, CSV_HEADER,
};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical convergence failure in {cell}: {source}")]
    Convergence {
        cell: String,
        source: thetaconv_core::Error,
    },
    #[error("{cell}: {source}")]
    Compute {
        cell: String,
        source: thetaconv_core::Error,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for bad input, 3 for numerical non-convergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Convergence { .. } => 3,
            _ => 2,
        }
    }

    fn at(cell: impl Into<String>, source: thetaconv_core::Error) -> Self {
        let cell = cell.into();
        match source {
            thetaconv_core::Error::Convergence(_) => CliError::Convergence { cell, source },
            source => CliError::Compute { cell, source },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Thm1,
    Thm2,
    Covariogram,
    Zhang,
    C1,
    Fuzz,
    DumpBody,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Thm1 => "thm1",
            Command::Thm2 => "thm2",
            Command::Covariogram => "covariogram",
            Command::Zhang => "zhang",
            Command::C1 => "c1",
            Command::Fuzz => "fuzz",
            Command::DumpBody => "dump-body",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Which body `dump-body` writes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum DumpKind {
    #[default]
    Theta,
    Ball,
    Superlevel,
    Polar,
    Limit,
}

/// Everything needed to reproduce one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    /// Dimension for `fuzz`; otherwise taken from the bodies.
    pub dim: usize,
    /// Body specs: `simplex2`, `neg-cube3`, `centered-cross2`,
    /// `random:<n>:<vertices>:<seed>` or a polytope JSON path.
    pub bodies: Vec<String>,
    pub theta_grid: Vec<f64>,
    pub t_grid: Vec<f64>,
    /// Ball-body exponent; defaults to the dimension.
    pub p: Option<f64>,
    /// With one body, `thm2` tests the cone power of that body with this α.
    pub alpha: Option<f64>,
    /// Sphere-grid size; defaults depend on the command and dimension.
    pub directions: Option<usize>,
    pub seed: u64,
    pub pairs: usize,
    pub tolerances: Tolerances,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub jobs: Option<usize>,
    /// Also emit log-concave inclusion reports from `thm2`.
    pub logconcave: bool,
    pub kind: DumpKind,
    /// θ for `dump-body --kind theta`, r for `--kind superlevel`.
    pub theta: f64,
    /// Which checks `fuzz` runs: any of `thm1`, `thm2`, `mass`, `c1`, `monotone`.
    pub checks: Vec<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: Command::Thm1,
            dim: 2,
            bodies: Vec::new(),
            theta_grid: Vec::new(),
            t_grid: Vec::new(),
            p: None,
            alpha: None,
            directions: None,
            seed: 1,
            pairs: 10,
            tolerances: Tolerances::default(),
            output: None,
            format: Format::Json,
            jobs: None,
            logconcave: false,
            kind: DumpKind::Theta,
            theta: 0.5,
            checks: vec!["thm1".into(), "thm2".into()],
        }
    }
}

impl RunConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// The θ grid used when none is given: both regimes of the volume
    /// bound, including `θ_0 = (3/4)^n`.
    pub fn default_theta_grid(n: usize) -> Vec<f64> {
        vec![0.05, 0.2, 0.4, theta_zero(n), 0.7, 0.81, 0.9, 0.95, 0.99]
    }

    pub fn default_t_grid() -> Vec<f64> {
        vec![0.05, 0.10, 0.15, 0.20, 0.25]
    }

    fn thetas(&self, n: usize) -> Vec<f64> {
        if self.theta_grid.is_empty() {
            Self::default_theta_grid(n)
        } else {
            self.theta_grid.clone()
        }
    }

    fn ts(&self) -> Vec<f64> {
        if self.t_grid.is_empty() {
            Self::default_t_grid()
        } else {
            self.t_grid.clone()
        }
    }

    fn directions_for(&self, n: usize) -> usize {
        if let Some(d) = self.directions {
            return d;
        }
        match (self.command, n) {
            (Command::Thm2, _) => 64,
            (_, 1) => 2,
            (_, 2) => 2048,
            (_, 3) => 1000,
            _ => 2000,
        }
    }

    /// Checks everything that can be checked before any computation.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.command == Command::Fuzz {
            if !(2..=3).contains(&self.dim) {
                return bad(format!("fuzz supports dim 2 or 3, got {}", self.dim));
            }
            if self.pairs == 0 {
                return bad("fuzz needs at least one pair".into());
            }
            for c in &self.checks {
                if !["thm1", "thm2", "mass", "c1", "monotone"].contains(&c.as_str()) {
                    return bad(format!("unknown fuzz check '{c}'"));
                }
            }
        } else if self.bodies.is_empty() && self.command != Command::DumpBody {
            return bad("no bodies given".into());
        }
        if self.theta_grid.iter().any(|t| !(0.0..1.0).contains(t)) {
            return bad("theta grid values must lie in [0, 1)".into());
        }
        if self.t_grid.iter().any(|t| !(*t >= 0.0)) {
            return bad("t grid values must be nonnegative".into());
        }
        if let Some(p) = self.p {
            if !(p > 0.0) {
                return bad(format!("p must be positive, got {p}"));
            }
        }
        if let Some(a) = self.alpha {
            if !(a > 0.0) {
                return bad(format!("alpha must be positive, got {a}"));
            }
        }
        let t = &self.tolerances;
        if [t.exact, t.bisection, t.cubature, t.extrapolation].iter().any(|x| !(*x >= 0.0 && x.is_finite())) {
            return bad("tolerances must be finite and nonnegative".into());
        }
        if self.jobs == Some(0) {
            return bad("jobs must be at least 1".into());
        }
        for spec in &self.bodies {
            if spec.ends_with(".json") && !Path::new(spec).exists() {
                return bad(format!("body file {spec} does not exist"));
            }
        }
        Ok(())
    }
}

/// Parses a body spec. Prefixes `neg-` (reflect through the origin) and
/// `centered-` (move the vertex centroid to the origin) may be combined.
pub fn parse_body(spec: &str) -> Result<Polytope> {
    let cfg = |m: String| CliError::Config(m);
    if let Some(rest) = spec.strip_prefix("neg-") {
        let p = parse_body(rest)?;
        let zero = vec![0.0; p.dim()];
        return transform(&p, -1.0, &zero).map_err(|e| cfg(format!("{spec}: {e}")));
    }
    if let Some(rest) = spec.strip_prefix("centered-") {
        return Ok(centered(&parse_body(rest)?));
    }
    if let Some(rest) = spec.strip_prefix("random:") {
        let parts: Vec<&str> = rest.split(':').collect();
        let [n, k, seed] = parts.as_slice() else {
            return Err(cfg(format!("expected random:<n>:<vertices>:<seed>, got {spec}")));
        };
        let parse = |s: &str| s.parse::<u64>().map_err(|_| cfg(format!("bad number '{s}' in {spec}")));
        let (n, k, seed) = (parse(n)? as usize, parse(k)? as usize, parse(seed)?);
        return random_polytope(n, k, seed).map_err(|e| cfg(format!("{spec}: {e}")));
    }
    if spec.ends_with(".json") {
        return Polytope::load(Path::new(spec)).map_err(|e| cfg(e.to_string()));
    }
    let split = spec
        .find(|c: char| c.is_ascii_digit())
        .ok_or_else(|| cfg(format!("unknown body '{spec}'")))?;
    let (name, dim) = spec.split_at(split);
    let n: usize = dim.parse().map_err(|_| cfg(format!("bad dimension in '{spec}'")))?;
    let kind = match name {
        "simplex" => BodyKind::Simplex,
        "cube" => BodyKind::Cube,
        "cross" | "crosspolytope" => BodyKind::Crosspolytope,
        _ => return Err(cfg(format!("unknown body '{spec}'"))),
    };
    if n == 0 || n > MAX_DIM {
        return Err(cfg(format!("dimension {n} in '{spec}' is outside 1..={MAX_DIM}")));
    }
    make_standard_bodies(kind, n).map_err(|e| cfg(format!("{spec}: {e}")))
}

/// Reports plus any rendered artifact of a run.
#[derive(Debug, Default)]
pub struct RunOutcome {
    pub reports: Vec<VerificationReport>,
    /// Text written for `dump-body`; reports are rendered by [`render`].
    pub artifact: Option<String>,
}

impl RunOutcome {
    pub fn failures(&self) -> Vec<&VerificationReport> {
        self.reports.iter().filter(|r| !r.pass).collect()
    }

    /// 0 when every report passes, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.failures().is_empty() {
            0
        } else {
            1
        }
    }
}

/// JSON Lines (one report object per line) or CSV with a header row.
pub fn render(reports: &[VerificationReport], format: Format) -> Result<String> {
    let mut out = String::new();
    match format {
        Format::Json => {
            for r in reports {
                let line = r.to_json().map_err(|e| CliError::at("render", e))?;
                out.push_str(&line);
                out.push('\n');
            }
        }
        Format::Csv => {
            out.push_str(CSV_HEADER);
            out.push('\n');
            for r in reports {
                out.push_str(&r.to_csv_row());
                out.push('\n');
            }
        }
    }
    Ok(out)
}

fn grid(n: usize, count: usize) -> Result<SphereGrid> {
    sphere_grid(n, count).map_err(|e| CliError::Config(e.to_string()))
}

fn pair(config: &RunConfig) -> Result<(Polytope, Polytope)> {
    if config.bodies.len() != 2 {
        return Err(CliError::Config(format!(
            "{} needs exactly two bodies, got {}",
            config.command.name(),
            config.bodies.len()
        )));
    }
    let k = parse_body(&config.bodies[0])?;
    let l = parse_body(&config.bodies[1])?;
    if k.dim() != l.dim() {
        return Err(CliError::Config(format!(
            "bodies have dimensions {} and {}",
            k.dim(),
            l.dim()
        )));
    }
    Ok((k, l))
}

fn handle(config: &RunConfig, cell: &str) -> Result<CovariogramHandle> {
    let (k, l) = pair(config)?;
    normalize(&k, &l).map_err(|e| CliError::at(cell, e))
}

fn thm1_reports(h: &CovariogramHandle, thetas: &[f64], g: &SphereGrid, tol: &Tolerances, cell: &str) -> Result<Vec<VerificationReport>> {
    let t0 = theta_zero(h.dim());
    let gap = thetas.iter().any(|&t| t >= t0).then(|| equality_gap(h, g, 16));
    thetas
        .par_iter()
        .map(|&theta| {
            let mut r = check_thm1(h, theta, g, tol).map_err(|e| CliError::at(format!("{cell} thm1 theta={theta}"), e))?;
            if let (Some(gap), true) = (gap, theta >= t0) {
                r.diagnostics.insert("equality_gap".into(), gap);
            }
            Ok(r)
        })
        .collect()
}

fn thm2_reports(h: &CovariogramHandle, p: f64, ts: &[f64], g: &SphereGrid, tol: &Tolerances, cell: &str) -> Result<Vec<VerificationReport>> {
    check_thm2_sweep(h, p, ts, g, tol).map_err(|e| CliError::at(format!("{cell} thm2 p={p}"), e))
}

fn tag(mut reports: Vec<VerificationReport>, key: &str, value: f64) -> Vec<VerificationReport> {
    for r in &mut reports {
        r.parameters.insert(key.into(), value);
    }
    reports
}

/// The `i`-th fuzz pair for a seed: independent random polytopes.
pub fn fuzz_pair(n: usize, seed: u64, i: usize) -> Result<(Polytope, Polytope)> {
    let (kk, kl) = match n {
        2 => (5 + i % 6, 5 + (i / 6) % 6),
        _ => (6 + i % 3, 6 + (i / 3) % 3),
    };
    let base = seed * 1000 + 2 * i as u64;
    let cell = |e| CliError::at(format!("fuzz pair {i}"), e);
    Ok((
        random_polytope(n, kk, base).map_err(cell)?,
        random_polytope(n, kl, base + 1).map_err(cell)?,
    ))
}

fn fuzz(config: &RunConfig) -> Result<Vec<VerificationReport>> {
    let n = config.dim;
    let thetas = config.thetas(n);
    let ts = config.ts();
    let p = config.p.unwrap_or(n as f64);
    let tol = config.tolerances;
    let dirs = config.directions_for(n);
    let vol_grid = grid(n, dirs)?;
    let ray_grid = grid(n, config.directions.unwrap_or(64))?;
    let wants = |c: &str| config.checks.iter().any(|x| x == c);
    let per_pair: Vec<Result<Vec<VerificationReport>>> = (0..config.pairs)
        .into_par_iter()
        .map(|i| {
            let cell = format!("fuzz pair {i} (seed {})", config.seed);
            let (k, l) = fuzz_pair(n, config.seed, i)?;
            let h = normalize(&k, &l).map_err(|e| CliError::at(&cell, e))?;
            let mut out = Vec::new();
            if wants("thm1") {
                out.extend(thm1_reports(&h, &thetas, &vol_grid, &tol, &cell)?);
            }
            if wants("thm2") {
                out.extend(thm2_reports(&h, p, &ts, &ray_grid, &tol, &cell)?);
            }
            if wants("mass") {
                out.push(check_mass_identity(&h, &vol_grid, &tol).map_err(|e| CliError::at(format!("{cell} mass"), e))?);
            }
            if wants("monotone") {
                let mono: Vec<f64> = thetas.iter().cloned().filter(|&t| t <= 0.9).collect();
                out.push(check_monotone_family(&h, &mono, &ray_grid, &tol).map_err(|e| CliError::at(format!("{cell} monotone"), e))?);
            }
            if wants("c1") {
                out.push(check_c1_bound(&h, &vol_grid, &tol).map_err(|e| CliError::at(format!("{cell} c1"), e))?);
            }
            Ok(tag(tag(out, "pair", i as f64), "seed", config.seed as f64))
        })
        .collect();
    let mut all = Vec::new();
    for r in per_pair {
        all.extend(r?);
    }
    Ok(all)
}

fn thm2(config: &RunConfig) -> Result<Vec<VerificationReport>> {
    let ts = config.ts();
    let tol = config.tolerances;
    let mut out = Vec::new();
    match config.bodies.len() {
        1 => {
            let body = centered(&parse_body(&config.bodies[0])?);
            let n = body.dim();
            let alpha = config.alpha.unwrap_or(1.0 / n as f64);
            let p = config.p.unwrap_or(n as f64);
            let g = cone_power(&body, alpha).map_err(|e| CliError::at("cone power", e))?;
            let gr = grid(n, config.directions_for(n))?;
            let cell = format!("cone power alpha={alpha} thm2 p={p}");
            out.extend(check_thm2_sweep(&g, p, &ts, &gr, &tol).map_err(|e| CliError::at(cell, e))?);
            if config.logconcave {
                for &t in &ts {
                    let r = check_logconcave_inclusion(&g, p, t, &gr, &tol).map_err(|e| CliError::at(format!("logconcave t={t}"), e))?;
                    out.push(r);
                }
            }
        }
        _ => {
            let h = handle(config, "normalize")?;
            let n = h.dim();
            let p = config.p.unwrap_or(n as f64);
            let gr = grid(n, config.directions_for(n))?;
            out.extend(thm2_reports(&h, p, &ts, &gr, &tol, "pair")?);
            if config.logconcave {
                for &t in &ts {
                    let r = check_logconcave_inclusion(&h, p, t, &gr, &tol).map_err(|e| CliError::at(format!("logconcave t={t}"), e))?;
                    out.push(r);
                }
            }
        }
    }
    Ok(out)
}

fn dump(config: &RunConfig) -> Result<String> {
    let bodies = if config.bodies.is_empty() {
        vec!["simplex2".to_string(), "neg-simplex2".to_string()]
    } else {
        config.bodies.clone()
    };
    let cfg = RunConfig {
        bodies,
        ..config.clone()
    };
    let n;
    let rows = match config.kind {
        DumpKind::Polar => {
            let k = parse_body(&cfg.bodies[0])?;
            n = k.dim();
            let g = grid(n, cfg.directions_for(n))?;
            let body = StarBody::polar_projection(&k);
            plot_rows(&body, &g)?
        }
        kind => {
            let h = handle(&cfg, "normalize")?;
            n = h.dim();
            let g = grid(n, cfg.directions_for(n))?;
            let body = match kind {
                DumpKind::Theta => StarBody::theta_body(&h, config.theta),
                DumpKind::Superlevel => StarBody::superlevel(&h, config.theta),
                DumpKind::Ball => StarBody::ball_body(&h, config.p.unwrap_or(n as f64)),
                _ => Ok(StarBody::limit_body(&h)),
            }
            .map_err(|e| CliError::at("dump-body", e))?;
            plot_rows(&body, &g)?
        }
    };
    Ok(rows)
}

fn plot_rows(body: &StarBody<'_>, grid: &SphereGrid) -> Result<String> {
    let radials = body
        .radials(grid)
        .map_err(|e| CliError::at(format!("{:?} radials", body.provenance), e))?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = (1..=grid.dim).map(|i| format!("u_{i}")).collect();
    header.push("rho".into());
    let io = |e: csv::Error| CliError::Config(e.to_string());
    w.write_record(&header).map_err(io)?;
    for (u, r) in grid.points.iter().zip(&radials) {
        let mut row: Vec<String> = u.iter().map(|x| format!("{x:.16e}")).collect();
        row.push(format!("{r:.16e}"));
        w.write_record(&row).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("ascii csv"))
}

/// Writes `u_1,…,u_n,rho` rows for every grid direction, in grid order.
pub fn dump_plot_data(body: &StarBody<'_>, grid: &SphereGrid, path: &Path) -> Result<()> {
    if grid.is_empty() {
        return Err(CliError::Config("empty grid".into()));
    }
    let text = plot_rows(body, grid)?;
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads rows written by [`dump_plot_data`] back as an equal-weight grid
/// and the radial values.
pub fn load_plot_data(path: &Path) -> Result<(SphereGrid, Vec<f64>)> {
    let io = |e: csv::Error| CliError::Config(format!("{}: {e}", path.display()));
    let mut rd = csv::Reader::from_path(path).map_err(io)?;
    let dim = rd.headers().map_err(io)?.len().saturating_sub(1);
    let mut points = Vec::new();
    let mut rho = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(io)?;
        let vals: Vec<f64> = rec
            .iter()
            .map(|s| s.parse::<f64>().map_err(|e| CliError::Config(format!("{}: {e}", path.display()))))
            .collect::<Result<_>>()?;
        let (r, u) = vals.split_last().ok_or_else(|| CliError::Config("empty row".into()))?;
        points.push(Direction::new(u.to_vec()).map_err(|e| CliError::at(path.display().to_string(), e))?);
        rho.push(*r);
    }
    let grid = SphereGrid::from_points(dim, points).map_err(|e| CliError::at(path.display().to_string(), e))?;
    Ok((grid, rho))
}

/// Star volume of a dumped body, recomputed from the file alone.
pub fn dumped_volume(path: &Path) -> Result<f64> {
    let (grid, rho) = load_plot_data(path)?;
    star_volume_from_samples(&grid, &rho).map_err(|e| CliError::at(path.display().to_string(), e))
}

fn execute(config: &RunConfig) -> Result<RunOutcome> {
    let tol = config.tolerances;
    let reports = match config.command {
        Command::Thm1 => {
            let h = handle(config, "normalize")?;
            let n = h.dim();
            thm1_reports(&h, &config.thetas(n), &grid(n, config.directions_for(n))?, &tol, "pair")?
        }
        Command::Thm2 => thm2(config)?,
        Command::Covariogram => {
            let h = handle(config, "normalize")?;
            let n = h.dim();
            let g = grid(n, config.directions_for(n))?;
            let mass = check_mass_identity(&h, &g, &tol).map_err(|e| CliError::at("mass identity", e))?;
            let thetas: Vec<f64> = config.thetas(n).into_iter().filter(|&t| t <= 0.9).collect();
            let small = grid(n, config.directions.unwrap_or(64).min(g.len()))?;
            let mono = check_monotone_family(&h, &thetas, &small, &tol).map_err(|e| CliError::at("monotone family", e))?;
            vec![mass, mono]
        }
        Command::Zhang => config
            .bodies
            .iter()
            .map(|spec| {
                let k = parse_body(spec)?;
                let g = grid(k.dim(), config.directions_for(k.dim()))?;
                check_zhang(&k, &g, &tol).map_err(|e| CliError::at(format!("zhang {spec}"), e))
            })
            .collect::<Result<Vec<_>>>()?,
        Command::C1 => {
            let h = handle(config, "normalize")?;
            let n = h.dim();
            vec![check_c1_bound(&h, &grid(n, config.directions_for(n))?, &tol).map_err(|e| CliError::at("c1", e))?]
        }
        Command::Fuzz => fuzz(config)?,
        Command::DumpBody => {
            return Ok(RunOutcome {
                reports: Vec::new(),
                artifact: Some(dump(config)?),
            })
        }
    };
    Ok(RunOutcome {
        reports,
        artifact: None,
    })
}

/// Validates and runs a configuration on a pool of `jobs` workers. Output
/// content and order never depend on the pool size.
pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let mut outcome = pool.install(|| execute(config))?;
    if outcome.artifact.is_none() {
        outcome.artifact = Some(render(&outcome.reports, config.format)?);
    }
    Ok(outcome)
}

/// Writes the artifact to `config.output`, or stdout when unset.
pub fn write_outcome(config: &RunConfig, outcome: &RunOutcome) -> Result<()> {
    let text = outcome.artifact.as_deref().unwrap_or_default();
    match &config.output {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        }),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            }),
    }
}

/// One line per failing report for the end-of-run summary.
pub fn failure_summary(outcome: &RunOutcome) -> Vec<String> {
    outcome
        .failures()
        .iter()
        .map(|r| {
            let params: Vec<String> = r.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
            format!(
                "{} [{}]: lhs {:.6e} rhs {:.6e} slack {:.3e} (tolerance {:.1e})",
                r.kind.as_str(),
                params.join(", "),
                r.lhs,
                r.rhs,
                r.slack,
                r.tolerance
            )
        })
        .collect()
}
