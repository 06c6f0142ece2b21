//! Numerical certificates for the inequalities and inclusions.
//!
//! Every check returns a [`VerificationReport`]. Inclusions are compared
//! radially on a shared grid; per-direction slacks are divided by the
//! support radius `l_u` so they are scale free.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::bodies::{
    ball_body_radial, gen_binom, limiting_body_radial, polar_projection_radial,
    superlevel_radial, t_max, theta_body_volume, RadialCache, StarBody,
};
use crate::covariogram::{mass_ratio, CovariogramHandle, RayFunction};
use crate::error::{Error, Result};
use crate::geometry::{sample_radials, star_volume, Polytope, SphereGrid};

/// Tolerances split by the dominant error source of each pipeline.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Comparisons of exact polytope quantities.
    pub exact: f64,
    /// Radials found by root bracketing.
    pub bisection: f64,
    /// Relative error of sphere-cubature volumes.
    pub cubature: f64,
    /// Relative error of extrapolated limit bodies.
    pub extrapolation: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            exact: 1e-9,
            bisection: 1e-7,
            cubature: 5e-3,
            extrapolation: 2e-2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportKind {
    Thm1,
    Thm2Inclusion,
    LogconcaveInclusion,
    Zhang,
    C1Bound,
    Monotone,
    MassIdentity,
}

impl ReportKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ReportKind::Thm1 => "thm1",
            ReportKind::Thm2Inclusion => "thm2-inclusion",
            ReportKind::LogconcaveInclusion => "logconcave-inclusion",
            ReportKind::Zhang => "zhang",
            ReportKind::C1Bound => "c1-bound",
            ReportKind::Monotone => "monotone",
            ReportKind::MassIdentity => "mass-identity",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub kind: ReportKind,
    pub parameters: BTreeMap<String, f64>,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs - rhs`.
    pub slack: f64,
    /// Smallest per-direction slack, for inclusion-type checks.
    pub min_direction_slack: Option<f64>,
    pub witness: Option<Vec<f64>>,
    pub pass: bool,
    pub tolerance: f64,
    /// Endpoint cases excluded from pass/fail; they pass vacuously.
    pub degenerate: bool,
    pub flags: BTreeMap<String, bool>,
    pub diagnostics: BTreeMap<String, f64>,
}

pub const CSV_HEADER: &str = "kind,parameters,lhs,rhs,slack,min_direction_slack,pass,degenerate";

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

impl VerificationReport {
    fn new(kind: ReportKind, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let slack = lhs - rhs;
        VerificationReport {
            kind,
            parameters: BTreeMap::new(),
            lhs,
            rhs,
            slack,
            min_direction_slack: None,
            witness: None,
            pass: slack >= -tolerance,
            tolerance,
            degenerate: false,
            flags: BTreeMap::new(),
            diagnostics: BTreeMap::new(),
        }
    }

    fn param(mut self, key: &str, value: f64) -> Self {
        self.parameters.insert(key.into(), value);
        self
    }

    fn flag(mut self, key: &str, value: bool) -> Self {
        self.flags.insert(key.into(), value);
        self
    }

    fn diag(mut self, key: &str, value: f64) -> Self {
        self.diagnostics.insert(key.into(), value);
        self
    }

    fn degenerate(mut self) -> Self {
        self.degenerate = true;
        self.pass = true;
        self
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    /// One CSV row matching [`CSV_HEADER`]; parameters as `key=value`
    /// pairs separated by `;`, numbers with 17 significant digits.
    pub fn to_csv_row(&self) -> String {
        let mut params = String::new();
        for (i, (k, v)) in self.parameters.iter().enumerate() {
            if i > 0 {
                params.push(';');
            }
            let _ = write!(params, "{k}={}", num(*v));
        }
        format!(
            "{},{},{},{},{},{},{},{}",
            self.kind.as_str(),
            params,
            num(self.lhs),
            num(self.rhs),
            num(self.slack),
            self.min_direction_slack.map(num).unwrap_or_default(),
            self.pass,
            self.degenerate
        )
    }
}

fn binom_root(n: usize) -> f64 {
    let n = n as f64;
    gen_binom(2.0 * n, n).expect("positive integers").powf(1.0 / n)
}

/// `θ_0 = (3/4)^n`, where the two regimes of the volume bound meet.
pub fn theta_zero(n: usize) -> f64 {
    0.75f64.powi(n as i32)
}

/// `(1/2) C(2n,n)^{1/n} (1 - θ^{1/n})`.
pub fn thm1_large_factor(n: usize, theta: f64) -> f64 {
    0.5 * binom_root(n) * (1.0 - theta.powf(1.0 / n as f64))
}

/// `1 - (4/3 - C(2n,n)^{1/n} / 6) θ^{1/n}`.
pub fn thm1_small_factor(n: usize, theta: f64) -> f64 {
    1.0 - (4.0 / 3.0 - binom_root(n) / 6.0) * theta.powf(1.0 / n as f64)
}

/// The volume-bound factor for the regime containing `θ`.
pub fn thm1_factor(n: usize, theta: f64) -> f64 {
    if theta >= theta_zero(n) {
        thm1_large_factor(n, theta)
    } else {
        thm1_small_factor(n, theta)
    }
}

const EQUALITY_RATIO: f64 = 1e-3;

/// `|K +_θ L|^{1/n}` against the θ-convolution volume bound. The tolerance combines
/// `exact` on the scale `|K|^{1/n} + |L|^{1/n}` with `cubature` on the bound.
pub fn check_thm1(
    h: &CovariogramHandle,
    theta: f64,
    grid: &SphereGrid,
    tol: &Tolerances,
) -> Result<VerificationReport> {
    if theta == 1.0 {
        return Err(Error::Domain(
            "theta = 1 is degenerate: both sides vanish".into(),
        ));
    }
    if !(0.0..1.0).contains(&theta) {
        return Err(Error::Domain(format!("theta must lie in [0, 1), got {theta}")));
    }
    let n = h.dim();
    let inv = 1.0 / n as f64;
    let scale = h.k().volume().powf(inv) + h.l().volume().powf(inv);
    let volume = theta_body_volume(h, theta, grid)?;
    let lhs = volume.powf(inv);
    let rhs = thm1_factor(n, theta) * scale;
    let tolerance = tol.exact * scale + tol.cubature * rhs;
    let large = theta >= theta_zero(n);
    let equality = large && (lhs / rhs - 1.0).abs() <= EQUALITY_RATIO;
    let mut report = VerificationReport::new(ReportKind::Thm1, lhs, rhs, tolerance)
        .param("theta", theta)
        .param("n", n as f64)
        .param("grid", grid.len() as f64)
        .flag("large_theta_regime", large)
        .diag("volume", volume)
        .diag("old_bound", (1.0 - theta.powf(inv)) * scale)
        .diag("large_regime_rhs", thm1_large_factor(n, theta) * scale)
        .diag("small_regime_rhs", thm1_small_factor(n, theta) * scale)
        .diag("max_value", h.max_value());
    if large {
        report = report.flag("equality", equality);
    }
    Ok(report)
}

/// Radial comparison `outer(u) - inner(u)` normalized by `l_u`.
struct Inclusion {
    min: f64,
    max_abs: f64,
    strict_count: usize,
    witness: usize,
    outer: f64,
    inner: f64,
}

fn compare_radials(outer: &[f64], inner: &[f64], lu: &[f64], tolerance: f64) -> Inclusion {
    let mut best = Inclusion {
        min: f64::INFINITY,
        max_abs: 0.0,
        strict_count: 0,
        witness: 0,
        outer: 0.0,
        inner: 0.0,
    };
    for i in 0..outer.len() {
        let s = (outer[i] - inner[i]) / lu[i];
        best.max_abs = best.max_abs.max(s.abs());
        if s > tolerance {
            best.strict_count += 1;
        }
        if s < best.min {
            best.min = s;
            best.witness = i;
            best.outer = outer[i] / lu[i];
            best.inner = inner[i] / lu[i];
        }
    }
    best
}

fn inclusion_report(
    kind: ReportKind,
    cmp: Inclusion,
    grid: &SphereGrid,
    tolerance: f64,
) -> VerificationReport {
    let mut r = VerificationReport::new(kind, cmp.outer, cmp.inner, tolerance);
    r.slack = cmp.min;
    r.min_direction_slack = Some(cmp.min);
    r.witness = Some(grid.points[cmp.witness].to_vec());
    r.pass = cmp.min >= -tolerance;
    r.diag("max_abs_direction_slack", cmp.max_abs)
        .diag("strict_directions", cmp.strict_count as f64)
        .flag("equality", cmp.max_abs <= tolerance)
        .flag("strict", cmp.min > tolerance)
}

fn support_radii(g: &dyn RayFunction, grid: &SphereGrid) -> Vec<f64> {
    grid.points.iter().map(|u| g.support_radius(u)).collect()
}

fn vacuous_inclusion(kind: ReportKind, g: &dyn RayFunction, grid: &SphereGrid, tolerance: f64) -> Result<VerificationReport> {
    let outer = sample_radials(grid, |u| superlevel_radial(g, 1.0, u))?;
    let lu = support_radii(g, grid);
    let zero = vec![0.0; outer.len()];
    Ok(inclusion_report(kind, compare_radials(&outer, &zero, &lu, tolerance), grid, tolerance).degenerate())
}

/// `t C(p+1/α, p)^{1/p} K_p(g) ⊆ L_{1-t}(g)`, for one `t`.
pub fn check_thm2_inclusion(
    g: &dyn RayFunction,
    p: f64,
    t: f64,
    grid: &SphereGrid,
    tol: &Tolerances,
) -> Result<VerificationReport> {
    Ok(check_thm2_sweep(g, p, &[t], grid, tol)?.remove(0))
}

/// [`check_thm2_inclusion`] for several `t`, sharing the Ball-body radials.
pub fn check_thm2_sweep(
    g: &dyn RayFunction,
    p: f64,
    ts: &[f64],
    grid: &SphereGrid,
    tol: &Tolerances,
) -> Result<Vec<VerificationReport>> {
    let alpha = g.alpha();
    let tm = t_max(p, alpha)?;
    for &t in ts {
        if !(t >= 0.0 && t <= tm * (1.0 + 1e-12)) {
            return Err(Error::Domain(format!(
                "t = {t} is outside the admissible range [0, {tm}]"
            )));
        }
    }
    let factor = gen_binom(p + 1.0 / alpha, p)?.powf(1.0 / p);
    let baseline = 1.0 / gamma(1.0 + p).powf(1.0 / p);
    let lu = support_radii(g, grid);
    let ball = if ts.iter().any(|&t| t > 0.0) {
        sample_radials(grid, |u| ball_body_radial(g, p, u))?
    } else {
        Vec::new()
    };
    ts.iter()
        .map(|&t| {
            let report = if t == 0.0 {
                vacuous_inclusion(ReportKind::Thm2Inclusion, g, grid, tol.bisection)?
            } else {
                let outer = sample_radials(grid, |u| superlevel_radial(g, 1.0 - t, u))?;
                let inner: Vec<f64> = ball.iter().map(|b| t * factor * b).collect();
                inclusion_report(
                    ReportKind::Thm2Inclusion,
                    compare_radials(&outer, &inner, &lu, tol.bisection),
                    grid,
                    tol.bisection,
                )
            };
            Ok(report
                .param("p", p)
                .param("t", t)
                .param("alpha", alpha)
                .param("grid", grid.len() as f64)
                .diag("t_max", tm)
                .diag("sharp_factor", t * factor)
                .diag("baseline_factor", t * baseline))
        })
        .collect()
}

/// `t / Γ(1+p)^{1/p} K_p(g) ⊆ {g >= e^{-t} ||g||_∞}`, read as a super-level
/// set, i.e. `L_r(g)` with `r = e^{-tα}`.
pub fn check_logconcave_inclusion(
    g: &dyn RayFunction,
    p: f64,
    t: f64,
    grid: &SphereGrid,
    tol: &Tolerances,
) -> Result<VerificationReport> {
    if !(p > 0.0) {
        return Err(Error::Domain(format!("p must be positive, got {p}")));
    }
    let limit = p / std::f64::consts::E;
    if !(t >= 0.0 && t < limit) {
        return Err(Error::Domain(format!(
            "t = {t} is outside the admissible range [0, {limit})"
        )));
    }
    let alpha = g.alpha();
    let baseline = 1.0 / gamma(1.0 + p).powf(1.0 / p);
    let sharp = gen_binom(p + 1.0 / alpha, p)?.powf(1.0 / p);
    let report = if t == 0.0 {
        vacuous_inclusion(ReportKind::LogconcaveInclusion, g, grid, tol.bisection)?
    } else {
        let r = (-t * alpha).exp();
        let outer = sample_radials(grid, |u| superlevel_radial(g, r, u))?;
        let inner = sample_radials(grid, |u| Ok(t * baseline * ball_body_radial(g, p, u)?))?;
        let lu = support_radii(g, grid);
        inclusion_report(
            ReportKind::LogconcaveInclusion,
            compare_radials(&outer, &inner, &lu, tol.bisection),
            grid,
            tol.bisection,
        )
    };
    let tm = t_max(p, alpha)?;
    Ok(report
        .param("p", p)
        .param("t", t)
        .param("alpha", alpha)
        .param("grid", grid.len() as f64)
        .flag("superlevel_reading", true)
        .flag("within_sharp_range", t <= tm)
        .flag("sharp_factor_dominates", sharp >= baseline)
        .diag("baseline_factor", t * baseline)
        .diag("sharp_factor", t * sharp)
        .diag("sharp_over_baseline", sharp / baseline))
}

/// Increments of `ρ_{K+_θL}(u) / (1 - θ^{1/n})` over consecutive θ.
pub fn check_monotone_family(
    h: &CovariogramHandle,
    thetas: &[f64],
    grid: &SphereGrid,
    tol: &Tolerances,
) -> Result<VerificationReport> {
    if thetas.is_empty() {
        return Err(Error::Domain("empty theta grid".into()));
    }
    if thetas.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Domain("theta grid must be strictly increasing".into()));
    }
    if thetas.iter().any(|t| !(0.0..1.0).contains(t)) {
        return Err(Error::Domain("theta grid must lie in [0, 1)".into()));
    }
    let n = h.dim() as f64;
    let tolerance = tol.bisection;
    let cache = RadialCache::new();
    let rescaled = |theta: f64| -> Result<Vec<f64>> {
        let body = StarBody::theta_body(h, theta)?;
        let denom = 1.0 - theta.powf(1.0 / n);
        Ok(cache
            .radials(&body, grid)?
            .into_iter()
            .map(|r| r / denom)
            .collect())
    };
    let mut min = f64::INFINITY;
    let mut max_abs = 0.0f64;
    let mut witness = (0usize, 0usize);
    let mut prev = rescaled(thetas[0])?;
    for (j, &theta) in thetas.iter().enumerate().skip(1) {
        let cur = rescaled(theta)?;
        for i in 0..cur.len() {
            let inc = cur[i] - prev[i];
            max_abs = max_abs.max(inc.abs());
            if inc < min {
                min = inc;
                witness = (i, j);
            }
        }
        prev = cur;
    }
    let mut report = if thetas.len() == 1 {
        VerificationReport::new(ReportKind::Monotone, 0.0, 0.0, tolerance).degenerate()
    } else {
        let mut r = VerificationReport::new(ReportKind::Monotone, min, 0.0, tolerance);
        r.min_direction_slack = Some(min);
        r.witness = Some(grid.points[witness.0].to_vec());
        r = r.param("witness_theta", thetas[witness.1]);
        r
    };
    report = report
        .param("thetas", thetas.len() as f64)
        .param("theta_min", thetas[0])
        .param("theta_max", thetas[thetas.len() - 1])
        .param("grid", grid.len() as f64)
        .diag("max_abs_increment", max_abs)
        .diag("cached_radials", cache.len() as f64)
        .flag("constant_family", max_abs <= tolerance);
    Ok(report)
}

/// `|K_n(g)|` by cubature against `|K||L|/M`; passes when the relative
/// difference is within `cubature`.
pub fn check_mass_identity(
    h: &CovariogramHandle,
    grid: &SphereGrid,
    tol: &Tolerances,
) -> Result<VerificationReport> {
    let p = h.dim() as f64;
    let lhs = star_volume(|u| ball_body_radial(h, p, u), grid)?;
    let rhs = mass_ratio(h);
    let tolerance = tol.cubature * rhs;
    let mut r = VerificationReport::new(ReportKind::MassIdentity, lhs, rhs, tolerance)
        .param("p", p)
        .param("grid", grid.len() as f64)
        .diag("relative_error", (lhs - rhs) / rhs);
    r.pass = r.slack.abs() <= tolerance;
    Ok(r)
}

/// `|K|^{n-1} |Π*K|` against `C(2n,n) / n^n`.
pub fn check_zhang(k: &Polytope, grid: &SphereGrid, tol: &Tolerances) -> Result<VerificationReport> {
    let n = k.dim();
    let pi_star = star_volume(|u| polar_projection_radial(k, u), grid)?;
    let lhs = k.volume().powi(n as i32 - 1) * pi_star;
    let nf = n as f64;
    let rhs = gen_binom(2.0 * nf, nf)? / nf.powi(n as i32);
    let tolerance = tol.cubature * rhs;
    Ok(VerificationReport::new(ReportKind::Zhang, lhs, rhs, tolerance)
        .param("n", nf)
        .param("grid", grid.len() as f64)
        .flag("simplex_input", k.vertices().len() == n + 1)
        .flag("equality", (lhs - rhs).abs() <= tolerance)
        .diag("polar_projection_volume", pi_star))
}

/// `|C_1(K,L)|^{1/n}` against `(1/n) C(2n,n)^{1/n} (|K||L|/M)^{1/n}`.
///
/// `C_1` is unbounded when the maximum is flat, or when `g` is smooth at its
/// maximizer so that it decays quadratically; such pairs are reported as
/// degenerate passes (the bound holds trivially) with `lhs = rhs`.
pub fn check_c1_bound(
    h: &CovariogramHandle,
    grid: &SphereGrid,
    tol: &Tolerances,
) -> Result<VerificationReport> {
    let n = h.dim();
    let inv = 1.0 / n as f64;
    let rhs = inv * binom_root(n) * mass_ratio(h).powf(inv);
    let tolerance = tol.extrapolation * rhs;
    if h.has_flat_maximum() {
        return Ok(VerificationReport::new(ReportKind::C1Bound, rhs, rhs, tolerance)
            .degenerate()
            .param("n", n as f64)
            .param("grid", grid.len() as f64)
            .flag("flat_maximum", true)
            .flag("unbounded", true));
    }
    let estimates = grid
        .points
        .par_iter()
        .map(|u| limiting_body_radial(h, u))
        .collect::<Result<Vec<_>>>()?;
    let divergent = estimates.iter().filter(|e| e.unbounded).count();
    if divergent > 0 {
        return Ok(VerificationReport::new(ReportKind::C1Bound, rhs, rhs, tolerance)
            .degenerate()
            .param("n", n as f64)
            .param("grid", grid.len() as f64)
            .flag("flat_maximum", false)
            .flag("unbounded", true)
            .diag("unbounded_directions", divergent as f64));
    }
    let values: Vec<f64> = estimates.iter().map(|e| e.value).collect();
    let lowers: Vec<f64> = estimates.iter().map(|e| e.bracket.0).collect();
    let uppers: Vec<f64> = estimates.iter().map(|e| e.bracket.1).collect();
    let volume = crate::geometry::star_volume_from_samples(grid, &values)?;
    let lhs = volume.powf(inv);
    let bracket_lo = crate::geometry::star_volume_from_samples(grid, &lowers)?.powf(inv);
    let bracket_hi = crate::geometry::star_volume_from_samples(grid, &uppers)?.powf(inv);
    Ok(VerificationReport::new(ReportKind::C1Bound, lhs, rhs, tolerance)
        .param("n", n as f64)
        .param("grid", grid.len() as f64)
        .flag("flat_maximum", false)
        .flag("unbounded", false)
        .flag("equality", (lhs / rhs - 1.0).abs() <= tol.extrapolation)
        .diag("volume", volume)
        .diag("bracket_low", bracket_lo)
        .diag("bracket_high", bracket_hi))
}

/// `sup |g(ru) - M (1 - r/l_u)^n| / M` over the grid and `radial_samples`
/// interior radii per direction; zero exactly for simplex pairs `K = -L`.
pub fn equality_gap(h: &CovariogramHandle, grid: &SphereGrid, radial_samples: usize) -> f64 {
    let n = h.dim() as i32;
    let m = h.max_value();
    grid.points
        .par_iter()
        .map(|u| {
            let lu = h.support_radius(u);
            (1..=radial_samples)
                .map(|i| {
                    let s = i as f64 / (radial_samples + 1) as f64;
                    (h.eval(u, s * lu) - m * (1.0 - s).powi(n)).abs() / m
                })
                .fold(0.0, f64::max)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::cone_power;
    use crate::covariogram::normalize;
    use crate::geometry::{centered, make_standard_bodies, sphere_grid, transform, BodyKind};
    use approx::assert_relative_eq;

    fn simplex_pair() -> CovariogramHandle {
        let s = make_standard_bodies(BodyKind::Simplex, 2).unwrap();
        let ns = transform(&s, -1.0, &[0.0, 0.0]).unwrap();
        normalize(&s, &ns).unwrap()
    }

    fn cube_pair() -> CovariogramHandle {
        let c = make_standard_bodies(BodyKind::Cube, 2).unwrap();
        normalize(&c, &c).unwrap()
    }

    #[test]
    fn regimes_meet_at_theta_zero() {
        let t0 = theta_zero(2);
        assert_eq!(t0, 0.5625);
        assert_relative_eq!(thm1_large_factor(2, t0), 0.306186, epsilon = 1e-6);
        for n in 1..=4 {
            let t0 = theta_zero(n);
            assert!((thm1_large_factor(n, t0) - thm1_small_factor(n, t0)).abs() < 1e-12);
        }
    }

    #[test]
    fn thm1_simplex_equality_and_cube_slack() {
        let grid = sphere_grid(2, 2048).unwrap();
        let tol = Tolerances::default();
        let r = check_thm1(&simplex_pair(), 0.81, &grid, &tol).unwrap();
        assert!(r.pass);
        assert_relative_eq!(r.lhs, 0.173205, epsilon = 1e-5);
        assert!((r.lhs / r.rhs - 1.0).abs() < 1e-3);
        assert!(r.flags["equality"]);
        let r = check_thm1(&cube_pair(), 0.9, &grid, &tol).unwrap();
        assert!(r.pass && r.slack > 0.0 && !r.flags["equality"]);
        let r = check_thm1(&cube_pair(), 0.2, &grid, &tol).unwrap();
        assert!(r.pass && !r.flags.contains_key("equality"));
        assert!(check_thm1(&cube_pair(), 1.0, &grid, &tol).is_err());
    }

    #[test]
    fn thm2_cone_power_is_equality() {
        let x2 = make_standard_bodies(BodyKind::Crosspolytope, 2).unwrap();
        let grid = sphere_grid(2, 64).unwrap();
        let tol = Tolerances::default();
        for alpha in [0.5, 1.0] {
            let g = cone_power(&x2, alpha).unwrap();
            let tm = t_max(2.0, alpha).unwrap();
            for r in check_thm2_sweep(&g, 2.0, &[0.3 * tm, tm], &grid, &tol).unwrap() {
                assert!(r.pass);
                assert!(r.diagnostics["max_abs_direction_slack"] <= 1e-7, "{r:?}");
            }
        }
        let g = cone_power(&x2, 1.0).unwrap();
        assert!(check_thm2_inclusion(&g, 2.0, 0.5, &grid, &tol).is_err());
        let zero = check_thm2_inclusion(&g, 2.0, 0.0, &grid, &tol).unwrap();
        assert!(zero.degenerate && zero.pass);
    }

    #[test]
    fn thm2_cube_is_strict() {
        let grid = sphere_grid(2, 64).unwrap();
        let r = check_thm2_inclusion(&cube_pair(), 2.0, 0.25, &grid, &Tolerances::default()).unwrap();
        assert!(r.pass, "{r:?}");
        // Along the four diagonals the tent product is (1 - r/l_u)^2, a cone
        // power on that ray, so those directions are tight; all others are strict.
        assert_eq!(r.diagnostics["strict_directions"], 60.0);
        assert!(r.min_direction_slack.unwrap().abs() < 1e-9);
        let w = r.witness.unwrap();
        assert!((w[0].abs() - w[1].abs()).abs() < 1e-12);
    }

    #[test]
    fn logconcave_factors() {
        let x2 = make_standard_bodies(BodyKind::Crosspolytope, 2).unwrap();
        let g = cone_power(&x2, 1.0).unwrap();
        let grid = sphere_grid(2, 32).unwrap();
        let r = check_logconcave_inclusion(&g, 1.0, 0.3, &grid, &Tolerances::default()).unwrap();
        assert!(r.pass);
        assert_relative_eq!(r.diagnostics["baseline_factor"], 0.3, epsilon = 1e-12);
        assert_relative_eq!(r.diagnostics["sharp_factor"], 0.6, epsilon = 1e-12);
        assert_relative_eq!(r.diagnostics["sharp_over_baseline"], 2.0, epsilon = 1e-12);
        assert!(check_logconcave_inclusion(&g, 1.0, 0.4, &grid, &Tolerances::default()).is_err());
    }

    #[test]
    fn monotone_family() {
        let grid = sphere_grid(2, 64).unwrap();
        let tol = Tolerances { bisection: 1e-8, ..Tolerances::default() };
        let thetas = [0.1, 0.3, 0.5, 0.7, 0.9];
        let r = check_monotone_family(&simplex_pair(), &thetas, &grid, &tol).unwrap();
        assert!(r.pass && r.flags["constant_family"], "{r:?}");
        let r = check_monotone_family(&cube_pair(), &thetas, &grid, &tol).unwrap();
        assert!(r.pass && !r.flags["constant_family"]);
        assert!(r.diagnostics["max_abs_increment"] > 1e-3);
        let r = check_monotone_family(&cube_pair(), &[0.4], &grid, &tol).unwrap();
        assert!(r.pass && r.degenerate);
        assert!(check_monotone_family(&cube_pair(), &[0.5, 0.4], &grid, &tol).is_err());
    }

    #[test]
    fn mass_identity() {
        let grid = sphere_grid(2, 512).unwrap();
        let tol = Tolerances::default();
        for (h, expect) in [(cube_pair(), 1.0), (simplex_pair(), 0.5)] {
            let r = check_mass_identity(&h, &grid, &tol).unwrap();
            assert!(r.pass, "{r:?}");
            assert_relative_eq!(r.rhs, expect, max_relative = 1e-9);
        }
    }

    #[test]
    fn zhang() {
        let grid = sphere_grid(2, 2048).unwrap();
        let tol = Tolerances::default();
        let s = make_standard_bodies(BodyKind::Simplex, 2).unwrap();
        let r = check_zhang(&s, &grid, &tol).unwrap();
        assert!((r.lhs - 1.5).abs() < 1e-3 && r.flags["equality"] && r.flags["simplex_input"]);
        let moved = transform(&s, 2.0, &[0.3, -1.0]).unwrap();
        let r2 = check_zhang(&moved, &grid, &tol).unwrap();
        assert!((r2.lhs - r.lhs).abs() < 1e-6);
        let c = make_standard_bodies(BodyKind::Cube, 2).unwrap();
        let r = check_zhang(&c, &grid, &tol).unwrap();
        assert!((r.lhs - 2.0).abs() < 1e-3 && r.pass && !r.flags["equality"]);
    }

    #[test]
    fn c1_bounds() {
        let grid = sphere_grid(2, 256).unwrap();
        let tol = Tolerances::default();
        let r = check_c1_bound(&simplex_pair(), &grid, &tol).unwrap();
        assert!(r.pass && r.flags["equality"]);
        assert_relative_eq!(r.diagnostics["volume"], 0.75, max_relative = 2e-2);
        let c = centered(&make_standard_bodies(BodyKind::Cube, 2).unwrap());
        let nc = transform(&c, -1.0, &[0.0, 0.0]).unwrap();
        let r = check_c1_bound(&normalize(&c, &nc).unwrap(), &grid, &tol).unwrap();
        assert!(r.pass && !r.flags["equality"]);
        assert_relative_eq!(r.diagnostics["volume"], 2.0, max_relative = 2e-2);
        assert_relative_eq!(r.rhs, 1.5f64.sqrt(), max_relative = 1e-9);
    }

    #[test]
    fn equality_gaps() {
        let grid = sphere_grid(2, 32).unwrap();
        assert!(equality_gap(&simplex_pair(), &grid, 20) <= 1e-6);
        assert!(equality_gap(&cube_pair(), &grid, 20) > 1e-2);
        let c = centered(&make_standard_bodies(BodyKind::Cube, 2).unwrap());
        let nc = transform(&c, -1.0, &[0.0, 0.0]).unwrap();
        assert!(equality_gap(&normalize(&c, &nc).unwrap(), &grid, 20) > 1e-2);
    }

    #[test]
    fn report_serialization() {
        let grid = sphere_grid(2, 64).unwrap();
        let r = check_thm1(&cube_pair(), 0.5, &grid, &Tolerances::default()).unwrap();
        let back = VerificationReport::from_json(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
        let row = r.to_csv_row();
        assert_eq!(row.split(',').count(), CSV_HEADER.split(',').count());
        assert!(row.starts_with("thm1,grid=6.4000000000000000e1;n="));
    }
}
