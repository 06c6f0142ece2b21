//! Fast evaluation of `|K ∩ (z - L)|` for a fixed pair and moving `z`.
//!
//! In the plane `K` is clipped as a polygon (Sutherland-Hodgman); in space
//! it is clipped as a face list, closing each cut with a cap polygon. Other
//! dimensions fall back on [`intersect`](super::intersect) + exact volume.

use super::{intersect, transform, Polytope};
use crate::error::Result;
use crate::linalg::dot;

const CLIP_EPS: f64 = 1e-12;

#[derive(Clone, Debug)]
struct Face {
    normal: [f64; 3],
    pts: Vec<[f64; 3]>,
}

#[derive(Clone, Debug)]
enum Base {
    Interval(f64, f64),
    Polygon(Vec<[f64; 2]>),
    Faces(Vec<Face>),
    Generic(Polytope),
}

/// Precomputed clipping data for the covariogram `z ↦ |K ∩ (z - L)|`.
#[derive(Clone, Debug)]
pub struct ReflectedOverlap {
    dim: usize,
    base: Base,
    l: Polytope,
    scale: f64,
}

impl ReflectedOverlap {
    pub fn new(k: &Polytope, l: &Polytope) -> Result<Self> {
        super::same_dim(k, l)?;
        let dim = k.dim();
        let base = match dim {
            1 => {
                let xs: Vec<f64> = k.vertices().iter().map(|v| v[0]).collect();
                Base::Interval(
                    xs.iter().cloned().fold(f64::INFINITY, f64::min),
                    xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
                )
            }
            2 => Base::Polygon(ccw_polygon(k)),
            3 => Base::Faces(face_list(k)),
            _ => Base::Generic(k.clone()),
        };
        let scale = k
            .vertices()
            .iter()
            .chain(l.vertices())
            .flat_map(|v| v.iter())
            .fold(1.0f64, |m, x| m.max(x.abs()));
        Ok(ReflectedOverlap {
            dim,
            base,
            l: l.clone(),
            scale,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `|K ∩ (z - L)|`, zero when empty or lower-dimensional.
    pub fn volume_at(&self, z: &[f64]) -> f64 {
        // z - L = {x : (-a)·x <= b - a·z} for each facet (a, b) of L.
        let cuts = self
            .l
            .halfspaces()
            .iter()
            .map(|h| (h, h.b - dot(&h.a, z)));
        let eps = CLIP_EPS * self.scale;
        match &self.base {
            Base::Interval(lo, hi) => {
                let mut lo = *lo;
                let mut hi = *hi;
                for (h, c) in cuts {
                    let a = -h.a[0];
                    if a > 0.0 {
                        hi = hi.min(c / a);
                    } else {
                        lo = lo.max(c / a);
                    }
                }
                (hi - lo).max(0.0)
            }
            Base::Polygon(poly) => {
                let mut cur = poly.clone();
                let mut next = Vec::with_capacity(cur.len() + 8);
                for (h, c) in cuts {
                    clip_polygon(&cur, &mut next, [-h.a[0], -h.a[1]], c, eps);
                    std::mem::swap(&mut cur, &mut next);
                    if cur.len() < 3 {
                        return 0.0;
                    }
                }
                polygon_area(&cur)
            }
            Base::Faces(faces) => {
                let mut cur = faces.clone();
                for (h, c) in cuts {
                    if !clip_faces(&mut cur, [-h.a[0], -h.a[1], -h.a[2]], c, eps) {
                        return 0.0;
                    }
                }
                faces_volume(&cur)
            }
            Base::Generic(k) => {
                let zl = transform(&self.l, -1.0, z).expect("unit scale");
                match intersect(k, &zl) {
                    Ok(Some(p)) => p.volume(),
                    _ => 0.0,
                }
            }
        }
    }
}

fn ccw_polygon(k: &Polytope) -> Vec<[f64; 2]> {
    let c = k.vertex_centroid();
    let mut pts: Vec<[f64; 2]> = k.vertices().iter().map(|v| [v[0], v[1]]).collect();
    pts.sort_by(|p, q| {
        let tp = (p[1] - c[1]).atan2(p[0] - c[0]);
        let tq = (q[1] - c[1]).atan2(q[0] - c[0]);
        tp.total_cmp(&tq)
    });
    pts
}

fn polygon_area(poly: &[[f64; 2]]) -> f64 {
    let o = poly[0];
    let mut twice = 0.0;
    for w in poly[1..].windows(2) {
        let (p, q) = (w[0], w[1]);
        twice += (p[0] - o[0]) * (q[1] - o[1]) - (p[1] - o[1]) * (q[0] - o[0]);
    }
    0.5 * twice.abs()
}

/// Keeps `{x : a·x <= c}` of a convex polygon.
fn clip_polygon(poly: &[[f64; 2]], out: &mut Vec<[f64; 2]>, a: [f64; 2], c: f64, eps: f64) {
    out.clear();
    let k = poly.len();
    let d: Vec<f64> = poly.iter().map(|p| a[0] * p[0] + a[1] * p[1] - c).collect();
    if d.iter().all(|&x| x <= eps) {
        out.extend_from_slice(poly);
        return;
    }
    for i in 0..k {
        let j = (i + 1) % k;
        let (p, q) = (poly[i], poly[j]);
        let (dp, dq) = (d[i], d[j]);
        if dp <= eps {
            out.push(p);
        }
        if (dp < -eps && dq > eps) || (dp > eps && dq < -eps) {
            let t = dp / (dp - dq);
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
}

fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Orders coplanar points by angle around their centroid.
fn order_in_plane(pts: &mut [[f64; 3]], normal: [f64; 3]) {
    let k = pts.len() as f64;
    let c = pts.iter().fold([0.0; 3], |acc, p| {
        [acc[0] + p[0] / k, acc[1] + p[1] / k, acc[2] + p[2] / k]
    });
    let helper = if normal[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let e1 = cross3(normal, helper);
    let e2 = cross3(normal, e1);
    pts.sort_by(|p, q| {
        let dp = sub3(*p, c);
        let dq = sub3(*q, c);
        let tp = dot3(dp, e2).atan2(dot3(dp, e1));
        let tq = dot3(dq, e2).atan2(dot3(dq, e1));
        tp.total_cmp(&tq)
    });
}

fn face_list(k: &Polytope) -> Vec<Face> {
    k.halfspaces()
        .iter()
        .zip(k.facets())
        .map(|(h, verts)| {
            let normal = [h.a[0], h.a[1], h.a[2]];
            let mut pts: Vec<[f64; 3]> = verts
                .iter()
                .map(|&i| {
                    let v = &k.vertices()[i];
                    [v[0], v[1], v[2]]
                })
                .collect();
            order_in_plane(&mut pts, normal);
            Face { normal, pts }
        })
        .collect()
}

/// Keeps `{x : a·x <= c}` of a convex solid given by its faces. Returns
/// `false` when nothing full-dimensional is left.
fn clip_faces(faces: &mut Vec<Face>, a: [f64; 3], c: f64, eps: f64) -> bool {
    let mut any_out = false;
    let mut any_in = false;
    for f in faces.iter() {
        for p in &f.pts {
            let d = dot3(a, *p) - c;
            any_out |= d > eps;
            any_in |= d < -eps;
        }
    }
    if !any_out {
        return true;
    }
    if !any_in {
        return false;
    }
    let mut cap: Vec<[f64; 3]> = Vec::new();
    let mut has_face_on_plane = false;
    let mut kept = Vec::with_capacity(faces.len() + 1);
    for f in faces.drain(..) {
        let d: Vec<f64> = f.pts.iter().map(|p| dot3(a, *p) - c).collect();
        if d.iter().all(|x| x.abs() <= eps) {
            has_face_on_plane = true;
            kept.push(f);
            continue;
        }
        let k = f.pts.len();
        let mut out = Vec::with_capacity(k + 2);
        for i in 0..k {
            let j = (i + 1) % k;
            let (p, q) = (f.pts[i], f.pts[j]);
            let (dp, dq) = (d[i], d[j]);
            if dp <= eps {
                out.push(p);
                if dp >= -eps {
                    cap.push(p);
                }
            }
            if (dp < -eps && dq > eps) || (dp > eps && dq < -eps) {
                let t = dp / (dp - dq);
                let x = [
                    p[0] + t * (q[0] - p[0]),
                    p[1] + t * (q[1] - p[1]),
                    p[2] + t * (q[2] - p[2]),
                ];
                out.push(x);
                cap.push(x);
            }
        }
        if out.len() >= 3 {
            kept.push(Face {
                normal: f.normal,
                pts: out,
            });
        }
    }
    if !has_face_on_plane {
        let mut uniq: Vec<[f64; 3]> = Vec::with_capacity(cap.len() / 2 + 1);
        for p in cap {
            if !uniq.iter().any(|q| {
                (p[0] - q[0]).abs() <= 2.0 * eps
                    && (p[1] - q[1]).abs() <= 2.0 * eps
                    && (p[2] - q[2]).abs() <= 2.0 * eps
            }) {
                uniq.push(p);
            }
        }
        if uniq.len() >= 3 {
            order_in_plane(&mut uniq, a);
            kept.push(Face {
                normal: a,
                pts: uniq,
            });
        }
    }
    *faces = kept;
    faces.len() >= 4
}

fn faces_volume(faces: &[Face]) -> f64 {
    let mut n = 0.0;
    let mut c = [0.0; 3];
    for f in faces {
        for p in &f.pts {
            c = [c[0] + p[0], c[1] + p[1], c[2] + p[2]];
            n += 1.0;
        }
    }
    let c = [c[0] / n, c[1] / n, c[2] / n];
    let mut vol = 0.0;
    for f in faces {
        let o = f.pts[0];
        let mut doubled = [0.0; 3];
        for w in f.pts[1..].windows(2) {
            let x = cross3(sub3(w[0], o), sub3(w[1], o));
            doubled = [doubled[0] + x[0], doubled[1] + x[1], doubled[2] + x[2]];
        }
        let area = 0.5 * dot3(doubled, f.normal).abs();
        let height = dot3(f.normal, sub3(o, c));
        vol += height * area / 3.0;
    }
    vol.max(0.0)
}
