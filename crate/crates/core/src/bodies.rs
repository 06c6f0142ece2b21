//! Bodies derived from a ray function: super-level sets `L_r(g)`,
//! θ-convolution bodies, Ball's bodies `K_p(g)`, the limiting body `C_1`,
//! the polar projection body and the cone-power test functions.

use std::collections::HashMap;
use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::covariogram::{CovariogramHandle, RayFunction};
use crate::error::{Error, Result};
use crate::geometry::{sample_radials, star_volume, Direction, Polytope, SphereGrid};
use crate::linalg;
use crate::quadrature;

/// `Γ(1+x) / (Γ(1+y) Γ(1+x-y))`, exact for integer arguments up to 60.
pub fn gen_binom(x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0 && y > 0.0) || !x.is_finite() || !y.is_finite() {
        return Err(Error::Domain(format!("gen_binom needs positive arguments, got ({x}, {y})")));
    }
    if x < y {
        return Err(Error::Domain(format!("gen_binom needs x >= y, got ({x}, {y})")));
    }
    if x.fract() == 0.0 && y.fract() == 0.0 && x <= 60.0 {
        let (n, k) = (x as u128, y as u128);
        let k = k.min(n - k);
        let mut acc: u128 = 1;
        for i in 1..=k {
            acc = acc * (n - k + i) / i;
        }
        return Ok(acc as f64);
    }
    Ok((ln_gamma(1.0 + x) - ln_gamma(1.0 + y) - ln_gamma(1.0 + x - y)).exp())
}

/// Right end `pα / (1+pα)^{1 + 1/(pα)}` of the admissible range of `t`.
pub fn t_max(p: f64, alpha: f64) -> Result<f64> {
    if !(p > 0.0 && alpha > 0.0) {
        return Err(Error::Domain(format!("t_max needs p, alpha > 0, got ({p}, {alpha})")));
    }
    let q = p * alpha;
    Ok(q / (1.0 + q).powf(1.0 + 1.0 / q))
}

/// `ρ_{K_p(g)}(u) = ((p / g(0)) ∫_0^{l_u} r^{p-1} g(ru) dr)^{1/p}`.
pub fn ball_body_radial(g: &dyn RayFunction, p: f64, u: &Direction) -> Result<f64> {
    ball_body_radial_tol(g, p, u, 1e-8)
}

pub(crate) fn ball_body_radial_tol(
    g: &dyn RayFunction,
    p: f64,
    u: &Direction,
    rel_tol: f64,
) -> Result<f64> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::Domain(format!("ball body needs p > 0, got {p}")));
    }
    let lu = g.support_radius(u);
    if !(lu > 0.0) {
        return Ok(0.0);
    }
    let m = g.max_value();
    let breaks = g.breakpoints(u);
    let integral = if p >= 1.0 {
        let pm1 = p - 1.0;
        let f = |r: f64| {
            let w = if pm1 == 0.0 { 1.0 } else { r.powf(pm1) };
            w * g.eval(u, r)
        };
        p * quadrature::integrate(f, 0.0, lu, &breaks, rel_tol)?
    } else {
        // s = r^p removes the r^{p-1} singularity at the origin
        let inv = 1.0 / p;
        let f = |s: f64| g.eval(u, s.powf(inv));
        let sb: Vec<f64> = breaks.iter().map(|b| b.powf(p)).collect();
        quadrature::integrate(f, 0.0, lu.powf(p), &sb, rel_tol)?
    };
    Ok((integral / m).max(0.0).powf(1.0 / p))
}

/// Largest `ρ` with `g(ρu) >= r^{1/α} ||g||_∞`.
///
/// Along a ray `φ(ρ) = (g(ρu)/M)^α - r` is concave and decreasing, so the
/// root is bracketed by `[(1-r) l_u, l_u]`; the bracket is shrunk by
/// Illinois steps with bisection as a fallback until its width is below
/// `1e-10 l_u`.
pub fn superlevel_radial(g: &dyn RayFunction, r: f64, u: &Direction) -> Result<f64> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::Domain(format!("super-level index must lie in [0, 1], got {r}")));
    }
    let lu = g.support_radius(u);
    if r == 0.0 || !(lu > 0.0) {
        return Ok(lu);
    }
    let m = g.max_value();
    let tol = 1e-10 * lu;
    if r == 1.0 {
        // plateau edge, if any
        let (mut a, mut b) = (0.0, lu);
        while b - a > tol {
            let c = 0.5 * (a + b);
            if g.eval(u, c) >= m {
                a = c;
            } else {
                b = c;
            }
        }
        return Ok(if a == 0.0 { 0.0 } else { 0.5 * (a + b) });
    }
    let alpha = g.alpha();
    let phi = |rho: f64| (g.eval(u, rho) / m).powf(alpha) - r;
    let (mut a, mut b) = ((1.0 - r) * lu, lu);
    let mut fa = phi(a);
    if fa == 0.0 {
        return Ok(a);
    }
    if fa < 0.0 {
        a = 0.0;
        fa = 1.0 - r;
    }
    let mut fb = -r;
    let mut last_side = 0i8;
    let mut width_before = b - a;
    for iter in 0..200 {
        if b - a <= tol {
            break;
        }
        let secant = b - fb * (b - a) / (fb - fa);
        let c = if iter % 3 == 2 && b - a > 0.5 * width_before {
            0.5 * (a + b)
        } else if secant > a && secant < b {
            secant
        } else {
            0.5 * (a + b)
        };
        if iter % 3 == 2 {
            width_before = b - a;
        }
        let fc = phi(c);
        if fc == 0.0 {
            return Ok(c);
        }
        if fc > 0.0 {
            a = c;
            fa = fc;
            if last_side == 1 {
                fb *= 0.5;
            }
            last_side = 1;
        } else {
            b = c;
            fb = fc;
            if last_side == -1 {
                fa *= 0.5;
            }
            last_side = -1;
        }
    }
    Ok(0.5 * (a + b))
}

fn check_theta(theta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::Domain(format!("theta must lie in [0, 1], got {theta}")));
    }
    Ok(())
}

/// Radial function of `K +_θ L = L_{θ^{1/n}}(g_{K,L})` about the maximizer.
pub fn theta_body_radial(h: &CovariogramHandle, theta: f64, u: &Direction) -> Result<f64> {
    check_theta(theta)?;
    superlevel_radial(h, theta.powf(1.0 / h.dim() as f64), u)
}

/// `|K +_θ L|` by star-volume cubature; 0 at θ = 1.
pub fn theta_body_volume(h: &CovariogramHandle, theta: f64, grid: &SphereGrid) -> Result<f64> {
    check_theta(theta)?;
    if theta == 1.0 {
        return Ok(0.0);
    }
    star_volume(|u| theta_body_radial(h, theta, u), grid)
}

/// Richardson estimate of `ρ_{C_1(K,L)}(u)` with the evidence behind it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitEstimate {
    pub value: f64,
    /// Lower bound from monotonicity of `ρ_θ / (1 - θ^{1/n})` and the last
    /// raw ratio `ρ_θ / (1 - θ)`, ordered.
    pub bracket: (f64, f64),
    /// Raw ratios at `θ_k = 1 - 2^{-k}`, `k = 4..=12`, continued up to
    /// `k = 24` when that is not enough to decide.
    pub ratios: Vec<f64>,
    /// Set when the raw ratios keep growing geometrically, i.e. `g` decays
    /// sublinearly along `u` (smooth maximum) and the radial is infinite.
    /// `value` and the upper bracket end are then `+∞`.
    pub unbounded: bool,
}

const LIMIT_LEVELS: std::ops::RangeInclusive<i32> = 4..=12;
/// Directions whose ratios neither settle nor clearly diverge by the last
/// level are continued this far.
const LIMIT_MAX_LEVEL: i32 = 24;
const LIMIT_STABILITY: f64 = 1e-3;
/// Per-halving growth of the raw ratio above which the limit is taken to be
/// infinite; a finite limit gives `1 + O(1 - θ)`, decay like `r^a` gives
/// `2^{1 - 1/a}`.
const LIMIT_DIVERGENCE: f64 = 1.05;

enum Verdict {
    Settled(f64),
    Unbounded,
    Open(f64, f64),
}

fn limit_verdict(ratios: &[f64]) -> Verdict {
    let m = ratios.len();
    if ratios[m - 4..].windows(2).all(|w| w[1] > LIMIT_DIVERGENCE * w[0]) {
        return Verdict::Unbounded;
    }
    let prev = 2.0 * ratios[m - 2] - ratios[m - 3];
    let value = 2.0 * ratios[m - 1] - ratios[m - 2];
    if value.is_finite() && (value - prev).abs() <= LIMIT_STABILITY * value.abs() {
        Verdict::Settled(value)
    } else {
        Verdict::Open(prev, value)
    }
}

pub fn limiting_body_radial(h: &CovariogramHandle, u: &Direction) -> Result<LimitEstimate> {
    let n = h.dim() as f64;
    let mut ratios = Vec::new();
    let mut last = (0.0, 0.0);
    let mut level = |k: i32, ratios: &mut Vec<f64>| -> Result<()> {
        let x = 2f64.powi(-k);
        let theta = 1.0 - x;
        let rho = theta_body_radial(h, theta, u)?;
        ratios.push(rho / x);
        last = (rho, theta);
        Ok(())
    };
    for k in LIMIT_LEVELS {
        level(k, &mut ratios)?;
    }
    let mut k = *LIMIT_LEVELS.end();
    let verdict = loop {
        match limit_verdict(&ratios) {
            Verdict::Open(prev, value) if k >= LIMIT_MAX_LEVEL => {
                return Err(Error::Convergence(format!(
                    "limit body radial along {:?} did not settle: {prev} then {value}",
                    u.as_slice()
                )))
            }
            Verdict::Open(..) => {
                k += 1;
                level(k, &mut ratios)?;
            }
            v => break v,
        }
    };
    let (rho, theta) = last;
    let lower = rho / (n * (1.0 - theta.powf(1.0 / n)));
    let raw = ratios[ratios.len() - 1];
    Ok(match verdict {
        Verdict::Settled(value) => LimitEstimate {
            value,
            bracket: (lower.min(raw), lower.max(raw)),
            ratios,
            unbounded: false,
        },
        _ => LimitEstimate {
            value: f64::INFINITY,
            bracket: (lower.min(raw), f64::INFINITY),
            ratios,
            unbounded: true,
        },
    })
}

/// `ρ_{Π*K}(u) = 1 / |P_{u⊥} K|`.
pub fn polar_projection_radial(k: &Polytope, u: &Direction) -> Result<f64> {
    let shadow = k.projection_volume(u);
    if !(shadow > 0.0) {
        return Err(Error::Integrity(format!(
            "zero projection along {:?}",
            u.as_slice()
        )));
    }
    Ok(1.0 / shadow)
}

/// `g(x) = M (1 - ||x||_B)^{1/α}`, the equality case of the sharp inclusion.
#[derive(Clone, Debug)]
pub struct ConePowerFunction {
    pub body: Polytope,
    pub alpha: f64,
    pub max_value: f64,
}

pub fn cone_power(body: &Polytope, alpha: f64) -> Result<ConePowerFunction> {
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
    }
    if !body.has_interior_origin() {
        return Err(Error::Domain("cone power needs the origin inside the body".into()));
    }
    Ok(ConePowerFunction {
        body: body.clone(),
        alpha,
        max_value: 1.0,
    })
}

impl RayFunction for ConePowerFunction {
    fn dim(&self) -> usize {
        self.body.dim()
    }

    fn alpha(&self) -> f64 {
        self.alpha
    }

    fn max_value(&self) -> f64 {
        self.max_value
    }

    fn support_radius(&self, u: &Direction) -> f64 {
        self.body.radial_unchecked(u)
    }

    fn eval(&self, u: &Direction, r: f64) -> f64 {
        let s = 1.0 - r / self.support_radius(u);
        if s <= 0.0 {
            0.0
        } else {
            self.max_value * s.powf(1.0 / self.alpha)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ThetaBody,
    BallBody,
    Superlevel,
    PolarProjection,
    LimitBody,
}

type Radial<'a> = Box<dyn Fn(&Direction) -> Result<f64> + Sync + 'a>;
type Membership<'a> = Box<dyn Fn(&[f64]) -> bool + Sync + 'a>;

/// A star body about the origin given by its radial function.
pub struct StarBody<'a> {
    pub dim: usize,
    pub provenance: Provenance,
    /// θ, p or r, where the provenance has one.
    pub parameter: Option<f64>,
    rho: Radial<'a>,
    membership: Option<Membership<'a>>,
}

impl std::fmt::Debug for StarBody<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("StarBody")
            .field("dim", &self.dim)
            .field("provenance", &self.provenance)
            .field("parameter", &self.parameter)
            .finish()
    }
}

/// Membership in `{g >= level}` with a relative slack on the value.
fn level_membership<'a>(g: &'a dyn RayFunction, level: f64) -> Membership<'a> {
    let slack = 1e-9 * g.max_value();
    Box::new(move |x: &[f64]| {
        let r = linalg::norm(x);
        if r == 0.0 {
            return true;
        }
        let u = Direction::new(x.to_vec()).expect("nonzero point");
        g.eval(&u, r) >= level - slack
    })
}

impl<'a> StarBody<'a> {
    pub fn new(
        dim: usize,
        provenance: Provenance,
        parameter: Option<f64>,
        rho: impl Fn(&Direction) -> Result<f64> + Sync + 'a,
    ) -> Self {
        StarBody {
            dim,
            provenance,
            parameter,
            rho: Box::new(rho),
            membership: None,
        }
    }

    pub fn theta_body(h: &'a CovariogramHandle, theta: f64) -> Result<Self> {
        check_theta(theta)?;
        let mut body = Self::new(h.dim(), Provenance::ThetaBody, Some(theta), move |u| {
            theta_body_radial(h, theta, u)
        });
        body.membership = Some(level_membership(h, theta * h.max_value()));
        Ok(body)
    }

    pub fn superlevel(g: &'a dyn RayFunction, r: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::Domain(format!("super-level index must lie in [0, 1], got {r}")));
        }
        let level = r.powf(1.0 / g.alpha()) * g.max_value();
        let mut body = Self::new(g.dim(), Provenance::Superlevel, Some(r), move |u| {
            superlevel_radial(g, r, u)
        });
        body.membership = Some(level_membership(g, level));
        Ok(body)
    }

    pub fn ball_body(g: &'a dyn RayFunction, p: f64) -> Result<Self> {
        if !(p > 0.0) {
            return Err(Error::Domain(format!("ball body needs p > 0, got {p}")));
        }
        Ok(Self::new(g.dim(), Provenance::BallBody, Some(p), move |u| {
            ball_body_radial(g, p, u)
        }))
    }

    pub fn polar_projection(k: &'a Polytope) -> Self {
        Self::new(k.dim(), Provenance::PolarProjection, None, move |u| {
            polar_projection_radial(k, u)
        })
    }

    pub fn limit_body(h: &'a CovariogramHandle) -> Self {
        Self::new(h.dim(), Provenance::LimitBody, None, move |u| {
            limiting_body_radial(h, u).map(|e| e.value)
        })
    }

    pub fn radial(&self, u: &Direction) -> Result<f64> {
        let r = (self.rho)(u)?;
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Domain(format!(
                "{:?} radial {r} along {:?} is not positive",
                self.provenance,
                u.as_slice()
            )));
        }
        Ok(r)
    }

    /// Radial values in grid order.
    pub fn radials(&self, grid: &SphereGrid) -> Result<Vec<f64>> {
        sample_radials(grid, |u| self.radial(u))
    }

    pub fn volume(&self, grid: &SphereGrid) -> Result<f64> {
        star_volume(|u| self.radial(u), grid)
    }

    /// Membership through the defining inequality when there is one,
    /// otherwise by comparing against the radial function.
    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        if let Some(m) = &self.membership {
            return Ok(m(x));
        }
        let r = linalg::norm(x);
        if r == 0.0 {
            return Ok(true);
        }
        let u = Direction::new(x.to_vec())?;
        Ok(r <= self.radial(&u)? * (1.0 + 1e-7))
    }

    /// Number of random direction pairs whose boundary-point midpoint falls
    /// outside the body.
    pub fn midpoint_convexity_failures(&self, pairs: usize, seed: u64) -> Result<usize> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let draw = |rng: &mut ChaCha8Rng| loop {
            let v: Vec<f64> = (0..self.dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            let s = linalg::norm(&v);
            if s > 1e-3 && s <= 1.0 {
                return Direction::new(v);
            }
        };
        let mut failures = 0;
        for _ in 0..pairs {
            let u1 = draw(&mut rng)?;
            let u2 = draw(&mut rng)?;
            let p1 = u1.at(self.radial(&u1)?);
            let p2 = u2.at(self.radial(&u2)?);
            let mid: Vec<f64> = p1.iter().zip(&p2).map(|(a, b)| 0.5 * (a + b)).collect();
            if !self.contains(&mid)? {
                failures += 1;
            }
        }
        Ok(failures)
    }
}

/// Memo of radial values keyed by provenance, parameter and grid index.
/// Values depend only on the key, so hits and misses give identical output.
#[derive(Debug, Default)]
pub struct RadialCache {
    map: Mutex<HashMap<(Provenance, u64, usize), f64>>,
}

impl RadialCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get_or_compute(
        &self,
        provenance: Provenance,
        parameter: f64,
        index: usize,
        compute: impl FnOnce() -> Result<f64>,
    ) -> Result<f64> {
        let key = (provenance, parameter.to_bits(), index);
        if let Some(&v) = self.map.lock().expect("cache lock").get(&key) {
            return Ok(v);
        }
        let v = compute()?;
        self.map.lock().expect("cache lock").insert(key, v);
        Ok(v)
    }

    /// Radials of `body` on `grid`, in grid order, through the cache.
    pub fn radials(&self, body: &StarBody<'_>, grid: &SphereGrid) -> Result<Vec<f64>> {
        let param = body.parameter.unwrap_or(f64::NAN);
        let indexed: Vec<(usize, &Direction)> = grid.points.iter().enumerate().collect();
        use rayon::prelude::*;
        indexed
            .par_iter()
            .map(|&(i, u)| self.get_or_compute(body.provenance, param, i, || body.radial(u)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covariogram::normalize;
    use crate::geometry::{centered, make_standard_bodies, random_polytope, sphere_grid, transform, BodyKind};
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
    fn binomials() {
        assert_eq!(gen_binom(4.0, 2.0).unwrap(), 6.0);
        assert_relative_eq!(0.5 * gen_binom(4.0, 2.0).unwrap().sqrt(), 1.224745, epsilon = 1e-6);
        assert_eq!(gen_binom(6.0, 3.0).unwrap(), 20.0);
        // Γ(3.5)/(Γ(1.5)Γ(3)) = (2.5·1.5)/2
        assert_relative_eq!(gen_binom(2.5, 0.5).unwrap(), 1.875, max_relative = 1e-12);
        assert!(gen_binom(1.0, 2.0).is_err());
        assert!(gen_binom(0.0, 0.0).is_err());
        assert!(gen_binom(-1.0, 0.5).is_err());
    }

    #[test]
    fn admissible_t() {
        for n in 1..=4 {
            assert_relative_eq!(t_max(n as f64, 1.0 / n as f64).unwrap(), 0.25, epsilon = 1e-15);
        }
        assert_relative_eq!(t_max(2.0, 1.0).unwrap(), 2.0 / 3f64.powf(1.5), epsilon = 1e-15);
        assert_relative_eq!(t_max(2.0, 1.0).unwrap(), 0.3849, epsilon = 1e-4);
        assert!(t_max(0.0, 1.0).is_err());
    }

    #[test]
    fn cone_power_closed_forms() {
        let x2 = make_standard_bodies(BodyKind::Crosspolytope, 2).unwrap();
        let g = cone_power(&x2, 1.0).unwrap();
        let u = Direction::new(vec![0.6, 0.8]).unwrap();
        let rb = x2.radial(&u).unwrap();
        assert_relative_eq!(g.eval(&u, 0.5 * rb), 0.5, epsilon = 1e-15);
        for r in [0.0, 0.3, 0.9] {
            assert_relative_eq!(superlevel_radial(&g, r, &u).unwrap(), (1.0 - r) * rb, epsilon = 1e-10);
        }
        for alpha in [0.5, 1.0, 2.0] {
            let g = cone_power(&x2, alpha).unwrap();
            for p in [1.0, 2.0] {
                let expect = rb * gen_binom(p + 1.0 / alpha, p).unwrap().powf(-1.0 / p);
                assert_relative_eq!(ball_body_radial(&g, p, &u).unwrap(), expect, max_relative = 1e-7);
            }
        }
        let off = transform(&x2, 1.0, &[1.5, 0.0]).unwrap();
        assert!(cone_power(&off, 1.0).is_err());
    }

    #[test]
    fn simplex_theta_bodies() {
        let h = simplex_pair();
        let grid = sphere_grid(2, 64).unwrap();
        for u in &grid.points {
            let lu = h.support().radial(u).unwrap();
            assert_relative_eq!(theta_body_radial(&h, 0.0, u).unwrap(), lu, epsilon = 1e-12);
            for theta in [0.3f64, 0.81] {
                let expect = (1.0 - theta.sqrt()) * lu;
                assert_relative_eq!(theta_body_radial(&h, theta, u).unwrap(), expect, epsilon = 1e-8);
            }
            let k2 = ball_body_radial(&h, 2.0, u).unwrap();
            assert_relative_eq!(k2, lu / 6f64.sqrt(), max_relative = 1e-7);
        }
        let grid = sphere_grid(2, 2048).unwrap();
        assert_relative_eq!(theta_body_volume(&h, 0.81, &grid).unwrap(), 0.03, max_relative = 1e-3);
        assert_relative_eq!(theta_body_volume(&h, 0.0, &grid).unwrap(), 3.0, max_relative = 1e-3);
        assert_eq!(theta_body_volume(&h, 1.0, &grid).unwrap(), 0.0);
        assert!(theta_body_radial(&h, 1.5, &grid.points[0]).is_err());
    }

    #[test]
    fn cube_sections() {
        let h = cube_pair();
        let e1 = Direction::axis(2, 0);
        // along an axis the tent product is 1 - x; along the diagonal (1 - s)^2
        for theta in [0.1f64, 0.5, 0.9] {
            assert_relative_eq!(theta_body_radial(&h, theta, &e1).unwrap(), 1.0 - theta, epsilon = 1e-8);
            let d = Direction::new(vec![1.0, 1.0]).unwrap();
            let s = theta_body_radial(&h, theta, &d).unwrap() / 2f64.sqrt();
            assert_relative_eq!(s, 1.0 - theta.sqrt(), epsilon = 1e-8);
        }
        let l = superlevel_radial(&h, 0.5, &e1).unwrap();
        assert_relative_eq!(l, 0.75, epsilon = 1e-8);
        let diag = Direction::new(vec![1.0, 1.0]).unwrap();
        let rho = theta_body_radial(&h, 0.25, &diag).unwrap();
        let s = rho / 2f64.sqrt();
        assert_relative_eq!((1.0 - s) * (1.0 - s), 0.25, epsilon = 1e-8);
    }

    #[test]
    fn bisection_lands_on_the_level() {
        let h = cube_pair();
        let grid = sphere_grid(2, 40).unwrap();
        for u in &grid.points {
            for r in [0.2, 0.5, 0.8] {
                let rho = superlevel_radial(&h, r, u).unwrap();
                assert!(rho > 0.0 && rho < h.support_radius(u));
                assert!((h.eval(u, rho) - r * r * h.max_value()).abs() <= 1e-7 * h.max_value());
            }
        }
    }

    #[test]
    fn limit_bodies() {
        let h = simplex_pair();
        let grid = sphere_grid(2, 16).unwrap();
        for u in &grid.points {
            let est = limiting_body_radial(&h, u).unwrap();
            let lu = h.support().radial(u).unwrap();
            assert_relative_eq!(est.value, lu / 2.0, max_relative = 1e-5);
            assert!(est.bracket.0 <= est.bracket.1);
            assert_eq!(est.ratios.len(), 9);
        }
        let c = centered(&make_standard_bodies(BodyKind::Cube, 2).unwrap());
        let nc = transform(&c, -1.0, &[0.0, 0.0]).unwrap();
        let h = normalize(&c, &nc).unwrap();
        for u in &grid.points {
            let est = limiting_body_radial(&h, u).unwrap();
            let pi = c.volume() * polar_projection_radial(&c, u).unwrap();
            assert_relative_eq!(est.value, pi, max_relative = 1e-5);
        }
    }

    #[test]
    fn flat_and_smooth_maxima_give_unbounded_limits() {
        let big = make_standard_bodies(BodyKind::Cube, 2).unwrap();
        let big = transform(&big, 3.0, &[0.0, 0.0]).unwrap();
        let small = make_standard_bodies(BodyKind::Cube, 2).unwrap();
        let h = normalize(&big, &small).unwrap();
        let grid = sphere_grid(2, 8).unwrap();
        for u in &grid.points {
            let est = limiting_body_radial(&h, u).unwrap();
            assert!(est.unbounded && est.value == f64::INFINITY);
        }
        // generic pair: g is smooth at its maximizer, so it decays quadratically
        let k = random_polytope(2, 5, 1000).unwrap();
        let l = random_polytope(2, 5, 1001).unwrap();
        let h = normalize(&k, &l).unwrap();
        let est = limiting_body_radial(&h, &grid.points[0]).unwrap();
        assert!(est.unbounded);
        let growth = est.ratios[8] / est.ratios[7];
        assert!((growth - 2f64.sqrt()).abs() < 0.05, "growth {growth}");
    }

    #[test]
    fn polar_projection() {
        let c = make_standard_bodies(BodyKind::Cube, 2).unwrap();
        assert_relative_eq!(polar_projection_radial(&c, &Direction::axis(2, 0)).unwrap(), 1.0, epsilon = 1e-12);
        let d = Direction::new(vec![1.0, 1.0]).unwrap();
        assert_relative_eq!(polar_projection_radial(&c, &d).unwrap(), 0.5f64.sqrt(), epsilon = 1e-12);
        let body = StarBody::polar_projection(&c);
        let grid = sphere_grid(2, 2048).unwrap();
        assert_relative_eq!(body.volume(&grid).unwrap(), 2.0, max_relative = 1e-3);
    }

    #[test]
    fn mass_identity_through_ball_body() {
        let h = cube_pair();
        let grid = sphere_grid(2, 512).unwrap();
        let body = StarBody::ball_body(&h, 2.0).unwrap();
        assert_relative_eq!(body.volume(&grid).unwrap(), 1.0, max_relative = 5e-3);
    }

    #[test]
    fn star_bodies_are_convex() {
        let h = cube_pair();
        for body in [
            StarBody::theta_body(&h, 0.4).unwrap(),
            StarBody::ball_body(&h, 2.0).unwrap(),
            StarBody::superlevel(&h, 0.7).unwrap(),
        ] {
            assert_eq!(body.midpoint_convexity_failures(200, 9).unwrap(), 0, "{body:?}");
        }
    }

    #[test]
    fn cache_is_transparent() {
        let h = cube_pair();
        let grid = sphere_grid(2, 32).unwrap();
        let body = StarBody::theta_body(&h, 0.3).unwrap();
        let cache = RadialCache::new();
        let first = cache.radials(&body, &grid).unwrap();
        assert_eq!(cache.len(), 32);
        let again = cache.radials(&body, &grid).unwrap();
        assert_eq!(first, again);
        assert_eq!(first, body.radials(&grid).unwrap());
    }
}
