//! Convex hull (vertex -> halfspace) and vertex enumeration (halfspace -> vertex).
//!
//! Both directions are brute force over `n`-subsets. That is fine for the
//! body sizes used here (a few dozen points in n <= 3) but the cost grows like
//! `C(m, n) * m`, so n = 4 inputs should stay small.

use super::{Halfspace, EPS};
use crate::error::{Error, Result};
use crate::linalg::{cofactor_normal, dot, for_each_combination, norm, rank, solve, sub};

pub(crate) struct Hull {
    pub vertices: Vec<Vec<f64>>,
    pub halfspaces: Vec<Halfspace>,
    /// Vertex indices tight on each halfspace, same order as `halfspaces`.
    pub facets: Vec<Vec<usize>>,
}

/// Merges points closer than `EPS`, keeping first occurrences.
pub(crate) fn dedup_points(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(points.len());
    for p in points {
        if !out
            .iter()
            .all(|q| p.iter().zip(q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) > EPS)
        {
            continue;
        }
        out.push(p.clone());
    }
    out
}

fn affine_rank(points: &[Vec<f64>]) -> usize {
    if points.len() < 2 {
        return 0;
    }
    let diffs: Vec<Vec<f64>> = points[1..].iter().map(|p| sub(p, &points[0])).collect();
    let scale = diffs.iter().map(|d| norm(d)).fold(0.0, f64::max).max(1.0);
    rank(&diffs, 1e-10 * scale)
}

pub(crate) fn convex_hull(dim: usize, points: &[Vec<f64>]) -> Result<Hull> {
    if points.iter().any(|p| p.len() != dim) {
        return Err(Error::Parse(format!("points must have {dim} coordinates")));
    }
    let pts = dedup_points(points);
    if pts.len() < dim + 1 {
        return Err(Error::NotFullDimensional(dim));
    }
    if affine_rank(&pts) < dim {
        return Err(Error::NotFullDimensional(dim));
    }
    match dim {
        1 => Ok(hull_1d(&pts)),
        2 => Ok(hull_2d(&pts)),
        _ => Ok(hull_nd(dim, &pts)),
    }
}

fn hull_1d(pts: &[Vec<f64>]) -> Hull {
    let lo = pts.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
    let hi = pts.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
    Hull {
        vertices: vec![vec![lo], vec![hi]],
        halfspaces: vec![
            Halfspace {
                a: vec![-1.0],
                b: -lo,
            },
            Halfspace { a: vec![1.0], b: hi },
        ],
        facets: vec![vec![0], vec![1]],
    }
}

/// Andrew's monotone chain; collinear points are dropped. Vertices come out
/// counter-clockwise starting from the lexicographically smallest point.
fn hull_2d(pts: &[Vec<f64>]) -> Hull {
    let mut sorted: Vec<&Vec<f64>> = pts.iter().collect();
    sorted.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut chain = half_chain(sorted.iter().copied());
    chain.extend(half_chain(sorted.iter().rev().copied()));
    let vertices: Vec<Vec<f64>> = chain.into_iter().cloned().collect();
    let k = vertices.len();
    let mut halfspaces = Vec::with_capacity(k);
    let mut facets = Vec::with_capacity(k);
    for i in 0..k {
        let p = &vertices[i];
        let q = &vertices[(i + 1) % k];
        let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
        let len = (dx * dx + dy * dy).sqrt();
        let a = vec![dy / len, -dx / len];
        let b = dot(&a, p);
        halfspaces.push(Halfspace { a, b });
        facets.push(vec![i, (i + 1) % k]);
    }
    Hull {
        vertices,
        halfspaces,
        facets,
    }
}

fn half_chain<'a>(points: impl Iterator<Item = &'a Vec<f64>>) -> Vec<&'a Vec<f64>> {
    let cross = |o: &[f64], a: &[f64], b: &[f64]| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let turn_tol = |o: &[f64], a: &[f64], b: &[f64]| {
        1e-12 * (1.0 + crate::linalg::dist(o, a) * crate::linalg::dist(o, b))
    };
    let mut half: Vec<&Vec<f64>> = Vec::new();
    for p in points {
        while half.len() >= 2 {
            let o = half[half.len() - 2];
            let a = half[half.len() - 1];
            if cross(o, a, p) <= turn_tol(o, a, p) {
                half.pop();
            } else {
                break;
            }
        }
        half.push(p);
    }
    half.pop();
    half
}

struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
}

fn hull_nd(dim: usize, pts: &[Vec<f64>]) -> Hull {
    let m = pts.len();
    let mut planes: Vec<(Halfspace, Vec<usize>, Bits)> = Vec::new();
    let mut dists = vec![0.0; m];
    for_each_combination(m, dim, |idx| {
        if planes
            .iter()
            .any(|(_, _, bits)| idx.iter().all(|&i| bits.get(i)))
        {
            return;
        }
        let base = &pts[idx[0]];
        let diffs: Vec<Vec<f64>> = idx[1..].iter().map(|&i| sub(&pts[i], base)).collect();
        let normal = cofactor_normal(&diffs);
        let nn = norm(&normal);
        let scale: f64 = diffs.iter().map(|d| norm(d)).product();
        if nn <= 1e-10 * scale || nn == 0.0 {
            return;
        }
        let a: Vec<f64> = normal.iter().map(|x| x / nn).collect();
        let b = dot(&a, base);
        let (mut pos, mut neg) = (false, false);
        for (j, p) in pts.iter().enumerate() {
            let d = dot(&a, p) - b;
            dists[j] = d;
            if d > EPS {
                pos = true;
            } else if d < -EPS {
                neg = true;
            }
            if pos && neg {
                return;
            }
        }
        let (a, b) = if pos {
            (a.iter().map(|x| -x).collect(), -b)
        } else {
            (a, b)
        };
        let mut bits = Bits::new(m);
        let mut tight = Vec::new();
        for (j, d) in dists.iter().enumerate() {
            if d.abs() <= EPS {
                bits.set(j);
                tight.push(j);
            }
        }
        planes.push((Halfspace { a, b }, tight, bits));
    });

    // Extreme points are exactly those whose incident facet normals span R^n.
    let is_vertex: Vec<bool> = (0..m)
        .map(|i| {
            let normals: Vec<Vec<f64>> = planes
                .iter()
                .filter(|(_, _, bits)| bits.get(i))
                .map(|(h, _, _)| h.a.clone())
                .collect();
            rank(&normals, 1e-9) == dim
        })
        .collect();
    let mut remap = vec![usize::MAX; m];
    let mut vertices = Vec::new();
    for i in 0..m {
        if is_vertex[i] {
            remap[i] = vertices.len();
            vertices.push(pts[i].clone());
        }
    }
    let mut halfspaces = Vec::with_capacity(planes.len());
    let mut facets = Vec::with_capacity(planes.len());
    for (h, tight, _) in planes {
        facets.push(
            tight
                .iter()
                .filter(|&&j| is_vertex[j])
                .map(|&j| remap[j])
                .collect(),
        );
        halfspaces.push(h);
    }
    Hull {
        vertices,
        halfspaces,
        facets,
    }
}

/// Normalizes each halfspace to a unit normal; zero normals are dropped when
/// trivially satisfied and reported when infeasible.
pub(crate) fn normalize_halfspaces(hs: &[Halfspace]) -> Result<Vec<Halfspace>> {
    let mut out = Vec::with_capacity(hs.len());
    for h in hs {
        let n = norm(&h.a);
        if n <= 1e-14 {
            if h.b < -EPS {
                return Err(Error::Integrity("infeasible zero-normal halfspace".into()));
            }
            continue;
        }
        out.push(Halfspace {
            a: h.a.iter().map(|x| x / n).collect(),
            b: h.b / n,
        });
    }
    Ok(out)
}

/// All points where `dim` of the (unit-normal) halfspaces are tight and every
/// other halfspace holds within `EPS`. Duplicates are merged.
pub(crate) fn enumerate_vertices(dim: usize, hs: &[Halfspace]) -> Vec<Vec<f64>> {
    let mut found: Vec<Vec<f64>> = Vec::new();
    if dim == 1 {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for h in hs {
            if h.a[0] > 0.0 {
                hi = hi.min(h.b / h.a[0]);
            } else {
                lo = lo.max(h.b / h.a[0]);
            }
        }
        if lo.is_finite() && hi.is_finite() && lo <= hi + EPS {
            found.push(vec![lo]);
            found.push(vec![hi]);
        }
        return dedup_points(&found);
    }
    for_each_combination(hs.len(), dim, |idx| {
        let a: Vec<Vec<f64>> = idx.iter().map(|&i| hs[i].a.clone()).collect();
        let b: Vec<f64> = idx.iter().map(|&i| hs[i].b).collect();
        let Some(x) = solve(&a, &b, 1e-12) else {
            return;
        };
        if hs.iter().all(|h| dot(&h.a, &x) <= h.b + EPS) {
            found.push(x);
        }
    });
    dedup_points(&found)
}
