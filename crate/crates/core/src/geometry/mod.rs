//! Exact polytope kernel.
//!
//! A [`Polytope`] always carries both representations: the irredundant vertex
//! list and one unit-normal halfspace `a·x <= b` per facet. Every constructor
//! goes through the convex hull of a point set, so the two stay consistent.
//!
//! Supported dimensions are `1..=4`. Hulls and vertex enumeration are brute
//! force over `n`-subsets (see [`hull`]), which is the bottleneck for large
//! inputs in n = 4.

mod clip;
mod hull;
mod sphere;

pub use clip::ReflectedOverlap;
pub use sphere::{sample_radials, sphere_grid, star_volume, star_volume_from_samples, surface_measure, SphereGrid};

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, dot, norm};

/// Merge / feasibility tolerance for the exact kernel.
pub const EPS: f64 = 1e-9;

pub const MAX_DIM: usize = 4;

/// Closed halfspace `a·x <= b`. Inside a [`Polytope`], `a` has unit length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub a: Vec<f64>,
    pub b: f64,
}

impl Halfspace {
    pub fn new(a: Vec<f64>, b: f64) -> Self {
        Self { a, b }
    }

    pub fn violation(&self, x: &[f64]) -> f64 {
        dot(&self.a, x) - self.b
    }
}

/// Unit vector on the sphere.
#[derive(Clone, Debug, PartialEq)]
pub struct Direction(Vec<f64>);

impl Direction {
    /// Normalizes `v`. Fails on the zero vector.
    pub fn new(v: Vec<f64>) -> Result<Self> {
        let n = norm(&v);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::Domain("direction must be a nonzero finite vector".into()));
        }
        Ok(Direction(v.into_iter().map(|x| x / n).collect()))
    }

    /// Accepts `u` as-is when it already has unit length within 1e-12.
    pub fn from_unit(u: Vec<f64>) -> Result<Self> {
        if (norm(&u) - 1.0).abs() > 1e-12 {
            return Err(Error::Domain("direction is not a unit vector".into()));
        }
        Ok(Direction(u))
    }

    /// The `i`-th standard basis vector of R^dim.
    pub fn axis(dim: usize, i: usize) -> Self {
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        Direction(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// The point `r·u`.
    pub fn at(&self, r: f64) -> Vec<f64> {
        self.0.iter().map(|x| x * r).collect()
    }
}

impl std::ops::Deref for Direction {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BodyKind {
    Simplex,
    Cube,
    Crosspolytope,
}

/// Bounded full-dimensional convex polytope in R^n with both representations.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "PolytopeFile", into = "PolytopeFile")]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Vec<f64>>,
    halfspaces: Vec<Halfspace>,
    /// Vertex indices tight on each halfspace.
    facets: Vec<Vec<usize>>,
    facet_volumes: Vec<f64>,
    volume: f64,
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::InvalidDimension(dim));
    }
    Ok(())
}

fn same_dim(p: &Polytope, q: &Polytope) -> Result<()> {
    if p.dim != q.dim {
        return Err(Error::DimensionMismatch {
            left: p.dim,
            right: q.dim,
        });
    }
    Ok(())
}

impl Polytope {
    /// Convex hull of a point set. Interior and duplicate points are dropped.
    pub fn from_vertices(dim: usize, points: &[Vec<f64>]) -> Result<Self> {
        check_dim(dim)?;
        let h = hull::convex_hull(dim, points)?;
        Ok(Self::assemble(dim, h.vertices, h.halfspaces, h.facets))
    }

    /// Bounded polytope `{x : a_i·x <= b_i}`. Redundant halfspaces are removed.
    pub fn from_halfspaces(dim: usize, halfspaces: &[Halfspace]) -> Result<Self> {
        check_dim(dim)?;
        if halfspaces.iter().any(|h| h.a.len() != dim) {
            return Err(Error::Parse(format!("halfspace normals must have {dim} entries")));
        }
        let hs = hull::normalize_halfspaces(halfspaces)?;
        let pts = hull::enumerate_vertices(dim, &hs);
        let p = Self::from_vertices(dim, &pts)?;
        // A bounded H-polytope has every facet among its input halfspaces;
        // a facet of the vertex hull that is not an input signals a recession
        // direction the enumeration could not see.
        for h in &p.halfspaces {
            let matched = hs.iter().any(|g| {
                (g.b - h.b).abs() <= 1e-7
                    && g.a.iter().zip(&h.a).all(|(x, y)| (x - y).abs() <= 1e-7)
            });
            if !matched {
                return Err(Error::Integrity("halfspace system is unbounded".into()));
            }
        }
        Ok(p)
    }

    fn assemble(
        dim: usize,
        vertices: Vec<Vec<f64>>,
        halfspaces: Vec<Halfspace>,
        facets: Vec<Vec<usize>>,
    ) -> Self {
        let mut p = Polytope {
            dim,
            vertices,
            halfspaces,
            facets,
            facet_volumes: Vec::new(),
            volume: 0.0,
        };
        p.facet_volumes = (0..p.halfspaces.len()).map(|i| p.compute_facet_volume(i)).collect();
        let c = p.vertex_centroid();
        p.volume = p
            .halfspaces
            .iter()
            .zip(&p.facet_volumes)
            .map(|(h, fv)| (h.b - dot(&h.a, &c)) * fv / dim as f64)
            .sum();
        p
    }

    /// (n-1)-volume of facet `i`, triangulated inside its own hyperplane.
    fn compute_facet_volume(&self, i: usize) -> f64 {
        if self.dim == 1 {
            return 1.0;
        }
        let h = &self.halfspaces[i];
        let basis = linalg::complement_basis(&h.a);
        let verts = &self.facets[i];
        let origin = &self.vertices[verts[0]];
        let local: Vec<Vec<f64>> = verts
            .iter()
            .map(|&j| {
                let d = linalg::sub(&self.vertices[j], origin);
                basis.iter().map(|e| dot(e, &d)).collect()
            })
            .collect();
        point_set_volume(self.dim - 1, &local)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    /// Vertex indices of each facet, aligned with [`Polytope::halfspaces`].
    pub fn facets(&self) -> &[Vec<usize>] {
        &self.facets
    }

    /// (n-1)-volume of each facet, aligned with [`Polytope::halfspaces`].
    pub fn facet_volumes(&self) -> &[f64] {
        &self.facet_volumes
    }

    /// Exact Lebesgue measure: cones from the vertex centroid over the facets.
    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn vertex_centroid(&self) -> Vec<f64> {
        linalg::centroid(&self.vertices)
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.halfspaces.iter().all(|h| h.violation(x) <= tol)
    }

    /// Pairs of vertices spanning an edge (sharing facets with rank n-1 normals).
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let nv = self.vertices.len();
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); nv];
        for (f, verts) in self.facets.iter().enumerate() {
            for &v in verts {
                incident[v].push(f);
            }
        }
        let mut out = Vec::new();
        for i in 0..nv {
            for j in i + 1..nv {
                let shared: Vec<Vec<f64>> = incident[i]
                    .iter()
                    .filter(|f| incident[j].contains(f))
                    .map(|&f| self.halfspaces[f].a.clone())
                    .collect();
                if linalg::rank(&shared, 1e-9) == self.dim - 1 {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Checks every representation invariant.
    pub fn validate(&self) -> Result<()> {
        let n = self.dim;
        if self.vertices.len() < n + 1 {
            return Err(Error::Integrity("fewer than n+1 vertices".into()));
        }
        for (i, h) in self.halfspaces.iter().enumerate() {
            if (norm(&h.a) - 1.0).abs() > 1e-9 {
                return Err(Error::Integrity(format!("halfspace {i} is not normalized")));
            }
            let tight = self
                .vertices
                .iter()
                .filter(|v| h.violation(v).abs() <= EPS)
                .count();
            if tight < n {
                return Err(Error::Integrity(format!(
                    "halfspace {i} is tight at {tight} < {n} vertices"
                )));
            }
        }
        for (j, v) in self.vertices.iter().enumerate() {
            if let Some(h) = self.halfspaces.iter().find(|h| h.violation(v) > EPS) {
                return Err(Error::Integrity(format!(
                    "vertex {j} violates {:?} by {:e}",
                    h,
                    h.violation(v)
                )));
            }
            let normals: Vec<Vec<f64>> = self
                .halfspaces
                .iter()
                .filter(|h| h.violation(v).abs() <= EPS)
                .map(|h| h.a.clone())
                .collect();
            if linalg::rank(&normals, 1e-9) < n {
                return Err(Error::Integrity(format!("vertex {j} is not extreme")));
            }
        }
        if !(self.volume > 0.0) {
            return Err(Error::Integrity("nonpositive volume".into()));
        }
        Ok(())
    }

    /// Minkowski gauge `||x||_P`. Requires the origin in the interior.
    pub fn gauge(&self, x: &[f64]) -> Result<f64> {
        self.require_interior_origin()?;
        Ok(self
            .halfspaces
            .iter()
            .map(|h| dot(&h.a, x) / h.b)
            .fold(0.0, f64::max))
    }

    /// Radial function `max{λ >= 0 : λu ∈ P}`. Requires the origin in the interior.
    pub fn radial(&self, u: &Direction) -> Result<f64> {
        self.require_interior_origin()?;
        Ok(self.radial_unchecked(u))
    }

    pub(crate) fn radial_unchecked(&self, u: &[f64]) -> f64 {
        self.halfspaces
            .iter()
            .filter_map(|h| {
                let s = dot(&h.a, u);
                (s > 0.0).then(|| h.b / s)
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn has_interior_origin(&self) -> bool {
        self.halfspaces.iter().all(|h| h.b > EPS)
    }

    fn require_interior_origin(&self) -> Result<()> {
        if !self.has_interior_origin() {
            return Err(Error::Domain(
                "origin is not interior; recenter with transform(P, 1, -centroid)".into(),
            ));
        }
        Ok(())
    }

    /// (n-1)-volume of the orthogonal projection onto `u⊥` (Cauchy's formula).
    pub fn projection_volume(&self, u: &Direction) -> f64 {
        0.5 * self
            .halfspaces
            .iter()
            .zip(&self.facet_volumes)
            .map(|(h, fv)| fv * dot(&h.a, u).abs())
            .sum::<f64>()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("polytope serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&s).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }
}

/// Volume of the convex hull of a point set in R^dim, dim >= 1.
fn point_set_volume(dim: usize, pts: &[Vec<f64>]) -> f64 {
    match dim {
        1 => {
            let lo = pts.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
            let hi = pts.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
            hi - lo
        }
        2 => {
            let c = linalg::centroid(pts);
            let mut ordered: Vec<&Vec<f64>> = pts.iter().collect();
            ordered.sort_by(|a, b| {
                let ta = (a[1] - c[1]).atan2(a[0] - c[0]);
                let tb = (b[1] - c[1]).atan2(b[0] - c[0]);
                ta.total_cmp(&tb)
            });
            let k = ordered.len();
            let twice: f64 = (0..k)
                .map(|i| {
                    let p = ordered[i];
                    let q = ordered[(i + 1) % k];
                    (p[0] - c[0]) * (q[1] - c[1]) - (p[1] - c[1]) * (q[0] - c[0])
                })
                .sum();
            0.5 * twice.abs()
        }
        _ => Polytope::from_vertices(dim, pts)
            .map(|p| p.volume())
            .unwrap_or(0.0),
    }
}

#[derive(Serialize, Deserialize)]
struct PolytopeFile {
    dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    vertices: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    halfspaces: Option<Vec<Halfspace>>,
}

impl TryFrom<PolytopeFile> for Polytope {
    type Error = Error;

    fn try_from(f: PolytopeFile) -> Result<Self> {
        let p = match (&f.vertices, &f.halfspaces) {
            (Some(v), None) => Polytope::from_vertices(f.dim, v)?,
            (None, Some(h)) => Polytope::from_halfspaces(f.dim, h)?,
            (Some(v), Some(h)) => {
                let p = Polytope::from_vertices(f.dim, v)?;
                let q = Polytope::from_halfspaces(f.dim, h)?;
                if p.vertices.len() != q.vertices.len()
                    || !p
                        .vertices
                        .iter()
                        .all(|x| q.vertices.iter().any(|y| linalg::dist(x, y) <= 1e-7))
                {
                    return Err(Error::Integrity(
                        "vertex and halfspace representations disagree".into(),
                    ));
                }
                p
            }
            (None, None) => {
                return Err(Error::Parse("need `vertices` or `halfspaces`".into()));
            }
        };
        p.validate()?;
        Ok(p)
    }
}

impl From<Polytope> for PolytopeFile {
    fn from(p: Polytope) -> Self {
        PolytopeFile {
            dim: p.dim,
            vertices: Some(p.vertices),
            halfspaces: Some(p.halfspaces),
        }
    }
}

/// Standard simplex `conv{0, e_1, ..., e_n}`, unit cube `[0,1]^n`, or
/// cross-polytope `conv{±e_i}`.
pub fn make_standard_bodies(kind: BodyKind, n: usize) -> Result<Polytope> {
    check_dim(n)?;
    let unit = |i: usize, s: f64| {
        let mut v = vec![0.0; n];
        v[i] = s;
        v
    };
    let points: Vec<Vec<f64>> = match kind {
        BodyKind::Simplex => std::iter::once(vec![0.0; n])
            .chain((0..n).map(|i| unit(i, 1.0)))
            .collect(),
        BodyKind::Cube => (0..1usize << n)
            .map(|mask| (0..n).map(|i| ((mask >> i) & 1) as f64).collect())
            .collect(),
        BodyKind::Crosspolytope => (0..n)
            .flat_map(|i| [unit(i, 1.0), unit(i, -1.0)])
            .collect(),
    };
    Polytope::from_vertices(n, &points)
}

/// Convex hull of `k` uniform points in the unit ball, reproducible from `seed`.
/// Nearly flat draws are discarded and redrawn from the same stream.
pub fn random_polytope(n: usize, k: usize, seed: u64) -> Result<Polytope> {
    check_dim(n)?;
    if k <= n {
        return Err(Error::TooFewPoints {
            dim: n,
            needed: n + 1,
            got: k,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ball = surface_measure(n) / n as f64;
    loop {
        let pts: Vec<Vec<f64>> = (0..k)
            .map(|_| {
                let g: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
                let r: f64 = rng.random::<f64>().powf(1.0 / n as f64);
                let gn = norm(&g);
                g.iter().map(|x| x * r / gn).collect()
            })
            .collect();
        match Polytope::from_vertices(n, &pts) {
            Ok(p) if p.volume() > 1e-4 * ball => return Ok(p),
            Ok(_) | Err(Error::NotFullDimensional(_)) => continue,
            Err(e) => return Err(e),
        }
    }
}

/// `{scale·p + shift : p ∈ P}`.
pub fn transform(p: &Polytope, scale: f64, shift: &[f64]) -> Result<Polytope> {
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::DegenerateTransform);
    }
    if shift.len() != p.dim {
        return Err(Error::DimensionMismatch {
            left: p.dim,
            right: shift.len(),
        });
    }
    let vertices = p
        .vertices
        .iter()
        .map(|v| v.iter().zip(shift).map(|(x, t)| scale * x + t).collect())
        .collect();
    let sign = scale.signum();
    let halfspaces = p
        .halfspaces
        .iter()
        .map(|h| {
            let a: Vec<f64> = h.a.iter().map(|x| sign * x).collect();
            let b = scale.abs() * h.b + dot(&a, shift);
            Halfspace { a, b }
        })
        .collect();
    let s = scale.abs();
    Ok(Polytope {
        dim: p.dim,
        vertices,
        halfspaces,
        facets: p.facets.clone(),
        facet_volumes: p
            .facet_volumes
            .iter()
            .map(|v| v * s.powi(p.dim as i32 - 1))
            .collect(),
        volume: p.volume * s.powi(p.dim as i32),
    })
}

/// Translate of `p` whose vertex centroid sits at the origin.
pub fn centered(p: &Polytope) -> Polytope {
    let c = p.vertex_centroid();
    let shift: Vec<f64> = c.iter().map(|x| -x).collect();
    transform(p, 1.0, &shift).expect("unit scale is valid")
}

/// `P + Q`, the hull of all pairwise vertex sums.
pub fn minkowski_sum(p: &Polytope, q: &Polytope) -> Result<Polytope> {
    same_dim(p, q)?;
    let sums: Vec<Vec<f64>> = p
        .vertices
        .iter()
        .flat_map(|a| q.vertices.iter().map(move |b| linalg::add(a, b)))
        .collect();
    Polytope::from_vertices(p.dim, &sums)
}

/// `P ∩ Q` from the stacked halfspace systems; `None` when the intersection
/// is empty or lower-dimensional.
pub fn intersect(p: &Polytope, q: &Polytope) -> Result<Option<Polytope>> {
    same_dim(p, q)?;
    let stacked: Vec<Halfspace> = p
        .halfspaces
        .iter()
        .chain(q.halfspaces.iter())
        .cloned()
        .collect();
    let pts = hull::enumerate_vertices(p.dim, &stacked);
    match Polytope::from_vertices(p.dim, &pts) {
        Ok(r) => Ok(Some(r)),
        Err(Error::NotFullDimensional(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

pub fn volume(p: &Polytope) -> f64 {
    p.volume()
}

pub fn radial(p: &Polytope, u: &Direction) -> Result<f64> {
    p.radial(u)
}

pub fn gauge(p: &Polytope, x: &[f64]) -> Result<f64> {
    p.gauge(x)
}

pub fn projection_volume(p: &Polytope, u: &Direction) -> f64 {
    p.projection_volume(u)
}
