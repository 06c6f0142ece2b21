//! The generalized covariogram `g_{K,L}(z) = |K ∩ (z - L)|`.
//!
//! [`normalize`] locates the maximizer `z*`, translates `K` so that the
//! maximum sits at the origin, and returns a [`CovariogramHandle`] that
//! exposes `r ↦ g(z* + r u)` as a [`RayFunction`] with `α = 1/n`.

use crate::error::{Error, Result};
use crate::geometry::{
    minkowski_sum, sphere_grid, transform, Direction, Polytope, ReflectedOverlap, EPS,
};
use crate::linalg::{self, dot};
use crate::optimize::NelderMead;

/// A nonnegative α-concave function seen along rays from its maximizer at
/// the origin.
///
/// Implementors guarantee `eval(u, 0) = max_value()`, `eval(u, r) = 0` for
/// `r >= support_radius(u)`, and concavity of `r ↦ eval(u, r)^α` on the
/// support.
pub trait RayFunction: Sync {
    fn dim(&self) -> usize;
    fn alpha(&self) -> f64;
    fn max_value(&self) -> f64;
    /// `l_u`, the distance from the origin to the boundary of the support.
    fn support_radius(&self, u: &Direction) -> f64;
    fn eval(&self, u: &Direction, r: f64) -> f64;
    /// Radii in `(0, l_u)` where `r ↦ eval(u, r)` may fail to be smooth.
    /// Quadrature splits there. Empty when unknown.
    fn breakpoints(&self, _u: &Direction) -> Vec<f64> {
        Vec::new()
    }
}

/// Largest violation of α-concavity along `u` over a uniform grid of
/// `samples` radii (all ordered triples of adjacent-or-not points with
/// midpoint weights 1/4, 1/2, 3/4).
pub fn alpha_concavity_defect(g: &dyn RayFunction, u: &Direction, samples: usize) -> f64 {
    let l = g.support_radius(u);
    let a = g.alpha();
    let m = g.max_value().powf(a);
    let pts: Vec<f64> = (0..=samples).map(|i| l * i as f64 / samples as f64).collect();
    let vals: Vec<f64> = pts.iter().map(|&r| g.eval(u, r).powf(a) / m).collect();
    let mut worst = 0.0f64;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            for lam in [0.25, 0.5, 0.75] {
                let r = (1.0 - lam) * pts[i] + lam * pts[j];
                let lhs = g.eval(u, r).powf(a) / m;
                let rhs = (1.0 - lam) * vals[i] + lam * vals[j];
                worst = worst.max(rhs - lhs);
            }
        }
    }
    worst
}

/// Repeated evaluation of `g_{K,L}` for one pair.
#[derive(Clone, Debug)]
pub struct Covariogram {
    overlap: ReflectedOverlap,
}

impl Covariogram {
    pub fn new(k: &Polytope, l: &Polytope) -> Result<Self> {
        Ok(Covariogram {
            overlap: ReflectedOverlap::new(k, l)?,
        })
    }

    pub fn eval(&self, z: &[f64]) -> f64 {
        self.overlap.volume_at(z)
    }
}

/// `|K ∩ (z - L)|`; zero for empty or lower-dimensional intersections.
pub fn eval_covariogram(k: &Polytope, l: &Polytope, z: &[f64]) -> Result<f64> {
    if z.len() != k.dim() {
        return Err(Error::DimensionMismatch {
            left: k.dim(),
            right: z.len(),
        });
    }
    Ok(Covariogram::new(k, l)?.eval(z))
}

/// Maximizes `g_{K,L}` by Nelder-Mead on `-g^{1/n}` (concave, so any local
/// maximum is global) from the sum of centroids and eight perturbations.
pub fn find_max(k: &Polytope, l: &Polytope) -> Result<(Vec<f64>, f64)> {
    let sum = minkowski_sum(k, l)?;
    let cov = Covariogram::new(k, l)?;
    find_max_with(&cov, &sum, k, l)
}

fn find_max_with(
    cov: &Covariogram,
    sum: &Polytope,
    k: &Polytope,
    l: &Polytope,
) -> Result<(Vec<f64>, f64)> {
    let n = k.dim();
    let c0 = linalg::add(&k.vertex_centroid(), &l.vertex_centroid());
    let centered_sum = transform(sum, 1.0, &c0.iter().map(|x| -x).collect::<Vec<_>>())?;
    let inv_n = 1.0 / n as f64;
    let objective = |z: &[f64]| {
        let g = cov.eval(z);
        if g > 0.0 {
            -g.powf(inv_n)
        } else {
            // Outside the support: push back towards the sum's centroid.
            let d = linalg::sub(z, &c0);
            centered_sum.gauge(&d).unwrap_or(f64::INFINITY) - 1.0
        }
    };
    let scale = sum
        .vertices()
        .iter()
        .map(|v| linalg::dist(v, &c0))
        .fold(0.0, f64::max);
    let nm = NelderMead {
        initial_step: 0.1 * scale,
        f_tol: 1e-10,
        x_tol: 1e-10 * scale.max(1.0),
        max_evals: 4000,
    };
    let mut starts = vec![c0.clone()];
    let spread = sphere_grid(n, 8.max(2 * n))?;
    for u in spread.points.iter().take(8) {
        starts.push(linalg::add(&c0, &u.at(0.25 * scale)));
    }
    let mut best = starts
        .iter()
        .map(|s| nm.minimize(objective, s))
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .expect("at least one start");
    // Polish: restart with a fresh simplex until no further progress.
    for round in 0..8 {
        let step = 0.02 * scale * 0.3f64.powi(round);
        let again = NelderMead {
            initial_step: step,
            max_evals: 4000,
            ..nm.clone()
        }
        .minimize(objective, &best.x);
        let improved = again.value < best.value - 1e-15;
        if again.value <= best.value {
            best = again;
        }
        if !improved && round >= 1 {
            break;
        }
    }
    let m = cov.eval(&best.x);
    if !(m > 0.0) {
        return Err(Error::DegeneratePair(
            "covariogram maximum search found no positive overlap".into(),
        ));
    }
    log::debug!("covariogram max {m} at {:?} after {} evals", best.x, best.evals);
    Ok((best.x, m))
}

/// `g_{K,L}` recentred at its maximizer, as used by all downstream bodies.
#[derive(Clone, Debug)]
pub struct CovariogramHandle {
    k: Polytope,
    l: Polytope,
    shifted_k: Polytope,
    maximizer: Vec<f64>,
    max_value: f64,
    support: Polytope,
    overlap: ReflectedOverlap,
    k_edges: Vec<(usize, usize)>,
    l_edges: Vec<(usize, usize)>,
}

/// Builds the handle: stores `K' = K - z*` so that `M(K', L) = |K' ∩ (-L)|`.
pub fn normalize(k: &Polytope, l: &Polytope) -> Result<CovariogramHandle> {
    let sum = minkowski_sum(k, l)?;
    let cov = Covariogram::new(k, l)?;
    let (z, _) = find_max_with(&cov, &sum, k, l)?;
    let minus_z: Vec<f64> = z.iter().map(|x| -x).collect();
    let shifted_k = transform(k, 1.0, &minus_z)?;
    let support = transform(&sum, 1.0, &minus_z)?;
    let overlap = ReflectedOverlap::new(&shifted_k, l)?;
    let max_value = overlap.volume_at(&vec![0.0; k.dim()]);
    if !support.has_interior_origin() {
        return Err(Error::DegeneratePair(
            "maximizer is not interior to K + L".into(),
        ));
    }
    let (k_edges, l_edges) = if k.dim() == 3 {
        (shifted_k.edges(), l.edges())
    } else {
        (Vec::new(), Vec::new())
    };
    Ok(CovariogramHandle {
        k: k.clone(),
        l: l.clone(),
        shifted_k,
        maximizer: z,
        max_value,
        support,
        overlap,
        k_edges,
        l_edges,
    })
}

/// `∫ g / ||g||_∞ = |K||L| / M(K, L)`, from exact volumes.
pub fn mass_ratio(h: &CovariogramHandle) -> f64 {
    h.k.volume() * h.l.volume() / h.max_value
}

impl CovariogramHandle {
    pub fn k(&self) -> &Polytope {
        &self.k
    }

    pub fn l(&self) -> &Polytope {
        &self.l
    }

    /// `K - z*`.
    pub fn shifted_k(&self) -> &Polytope {
        &self.shifted_k
    }

    pub fn maximizer(&self) -> &[f64] {
        &self.maximizer
    }

    /// `M(K, L)`.
    pub fn max_value(&self) -> f64 {
        self.max_value
    }

    /// `K + L - z*`, the support of the recentred covariogram.
    pub fn support(&self) -> &Polytope {
        &self.support
    }

    pub fn dim(&self) -> usize {
        self.k.dim()
    }

    /// `g_{K,L}(z* + x)`.
    pub fn eval_offset(&self, x: &[f64]) -> f64 {
        self.overlap.volume_at(x)
    }

    /// True when `g` stays at its maximum a short way out along some probed
    /// direction, i.e. the maximizer is not unique.
    pub fn has_flat_maximum(&self) -> bool {
        let Ok(grid) = sphere_grid(self.dim(), 16.max(2 * self.dim())) else {
            return false;
        };
        grid.points.iter().any(|u| {
            let r = 1e-4 * self.support_radius(u);
            self.eval(u, r) >= self.max_value * (1.0 - 1e-12)
        })
    }
}

impl RayFunction for CovariogramHandle {
    fn dim(&self) -> usize {
        self.k.dim()
    }

    fn alpha(&self) -> f64 {
        1.0 / self.k.dim() as f64
    }

    fn max_value(&self) -> f64 {
        self.max_value
    }

    fn support_radius(&self, u: &Direction) -> f64 {
        self.support.radial_unchecked(u)
    }

    fn eval(&self, u: &Direction, r: f64) -> f64 {
        if r <= 0.0 {
            return self.max_value;
        }
        if r >= self.support_radius(u) {
            return 0.0;
        }
        self.overlap.volume_at(&u.at(r))
    }

    /// Radii where a vertex of one body crosses a facet hyperplane of the
    /// other (plus edge-edge crossings in R^3), restricted to crossings that
    /// actually touch.
    fn breakpoints(&self, u: &Direction) -> Vec<f64> {
        let lu = self.support_radius(u);
        let kp = &self.shifted_k;
        let lp = &self.l;
        let tol = 1e-9;
        let mut out = Vec::new();
        let mut push = |r: f64| {
            if r > tol * lu && r < lu * (1.0 - tol) {
                out.push(r);
            }
        };
        // vertex v of K' on facet (a, b) of ru - L: a·(ru - v) = b
        for v in kp.vertices() {
            for h in lp.halfspaces() {
                let s = dot(&h.a, u);
                if s.abs() < 1e-14 {
                    continue;
                }
                let r = (h.b + dot(&h.a, v)) / s;
                let w = linalg::sub(&u.at(r), v);
                if lp.contains(&w, EPS) {
                    push(r);
                }
            }
        }
        // vertex w of L: ru - w on facet (c, d) of K'
        for w in lp.vertices() {
            for h in kp.halfspaces() {
                let s = dot(&h.a, u);
                if s.abs() < 1e-14 {
                    continue;
                }
                let r = (h.b + dot(&h.a, w)) / s;
                let x = linalg::sub(&u.at(r), w);
                if kp.contains(&x, EPS) {
                    push(r);
                }
            }
        }
        if self.k_edges.is_empty() {
            out.sort_by(f64::total_cmp);
            return out;
        }
        // edge p + s e1 of K' meets edge ru - q - t e2 of ru - L
        let kv = kp.vertices();
        let lv = lp.vertices();
        for &(i, j) in &self.k_edges {
            let e1 = linalg::sub(&kv[j], &kv[i]);
            for &(a, b) in &self.l_edges {
                let e2 = linalg::sub(&lv[b], &lv[a]);
                let m: Vec<Vec<f64>> = (0..3).map(|row| vec![e1[row], e2[row], -u[row]]).collect();
                let rhs: Vec<f64> = (0..3).map(|row| -(kv[i][row] + lv[a][row])).collect();
                if let Some(sol) = linalg::solve(&m, &rhs, 1e-12) {
                    let (s, t, r) = (sol[0], sol[1], sol[2]);
                    if (-tol..=1.0 + tol).contains(&s) && (-tol..=1.0 + tol).contains(&t) {
                        push(r);
                    }
                }
            }
        }
        out.sort_by(f64::total_cmp);
        out
    }
}
