//! Deterministic equal-weight cubature on S^{n-1} and star-body volumes.

use rayon::prelude::*;
use statrs::function::gamma::gamma;

use super::Direction;
use crate::error::{Error, Result};

/// Quasi-uniform directions with cubature weights summing to |S^{n-1}|.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereGrid {
    pub dim: usize,
    pub points: Vec<Direction>,
    pub weights: Vec<f64>,
}

impl SphereGrid {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Equal-weight grid over an explicit list of directions.
    pub fn from_points(dim: usize, points: Vec<Direction>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Domain("empty direction list".into()));
        }
        if points.iter().any(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: points.iter().find(|p| p.dim() != dim).unwrap().dim(),
            });
        }
        let w = surface_measure(dim) / points.len() as f64;
        let weights = vec![w; points.len()];
        Ok(SphereGrid {
            dim,
            points,
            weights,
        })
    }
}

/// Surface measure of the unit sphere S^{n-1}, `2π^{n/2}/Γ(n/2)`.
pub fn surface_measure(n: usize) -> f64 {
    let h = n as f64 / 2.0;
    2.0 * std::f64::consts::PI.powf(h) / gamma(h)
}

/// `count` directions: equiangular for n = 2, a Fibonacci spiral for n = 3,
/// and an equal-area rank-1 lattice for n = 4. For n = 1 the sphere is
/// `{-1, +1}` regardless of `count`.
pub fn sphere_grid(n: usize, count: usize) -> Result<SphereGrid> {
    if n == 0 || n > super::MAX_DIM {
        return Err(Error::InvalidDimension(n));
    }
    if count < 2 * n {
        return Err(Error::Domain(format!(
            "sphere grid needs at least {} points in dimension {n}, got {count}",
            2 * n
        )));
    }
    let tau = 2.0 * std::f64::consts::PI;
    let raw: Vec<Vec<f64>> = match n {
        1 => vec![vec![-1.0], vec![1.0]],
        2 => (0..count)
            .map(|k| {
                let t = tau * k as f64 / count as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        3 => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|k| {
                    let z = 1.0 - (2 * k + 1) as f64 / count as f64;
                    let r = (1.0 - z * z).sqrt();
                    let phi = golden * k as f64;
                    vec![r * phi.cos(), r * phi.sin(), z]
                })
                .collect()
        }
        _ => {
            // Plastic-number lattice mapped through the S^3 volume element
            // sin^2(psi) sin(theta).
            let plastic = 1.324_717_957_244_746_f64;
            let (g1, g2) = (1.0 / plastic, 1.0 / (plastic * plastic));
            (0..count)
                .map(|k| {
                    let t1 = (k as f64 + 0.5) / count as f64;
                    let t2 = (k as f64 * g1).fract();
                    let t3 = (k as f64 * g2).fract();
                    let psi = invert_s3_polar(t1);
                    let cos_t = 1.0 - 2.0 * t2;
                    let sin_t = (1.0 - cos_t * cos_t).max(0.0).sqrt();
                    let phi = tau * t3;
                    let (sp, cp) = psi.sin_cos();
                    vec![cp, sp * cos_t, sp * sin_t * phi.cos(), sp * sin_t * phi.sin()]
                })
                .collect()
        }
    };
    let points = raw
        .into_iter()
        .map(Direction::new)
        .collect::<Result<Vec<_>>>()?;
    SphereGrid::from_points(n, points)
}

/// Solves `(psi - sin psi cos psi) / π = t` on `[0, π]`.
fn invert_s3_polar(t: f64) -> f64 {
    let pi = std::f64::consts::PI;
    let f = |p: f64| (p - p.sin() * p.cos()) / pi - t;
    let (mut lo, mut hi) = (0.0, pi);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Evaluates `rho` on every grid direction, in grid order. Work may fan out
/// across the current rayon pool; the output order never depends on it.
pub fn sample_radials<F>(grid: &SphereGrid, rho: F) -> Result<Vec<f64>>
where
    F: Fn(&Direction) -> Result<f64> + Sync,
{
    grid.points.par_iter().map(&rho).collect()
}

/// `(1/n) Σ w_i ρ(u_i)^n`, summed sequentially in grid order.
pub fn star_volume_from_samples(grid: &SphereGrid, samples: &[f64]) -> Result<f64> {
    if samples.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            left: grid.len(),
            right: samples.len(),
        });
    }
    let n = grid.dim as i32;
    let mut acc = 0.0;
    for (w, &r) in grid.weights.iter().zip(samples) {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Domain(format!("radial value {r} is not positive")));
        }
        acc += w * r.powi(n);
    }
    Ok(acc / grid.dim as f64)
}

pub fn star_volume<F>(rho: F, grid: &SphereGrid) -> Result<f64>
where
    F: Fn(&Direction) -> Result<f64> + Sync,
{
    let samples = sample_radials(grid, rho)?;
    star_volume_from_samples(grid, &samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{centered, make_standard_bodies, BodyKind};
    use approx::assert_relative_eq;

    #[test]
    fn four_point_circle() {
        let g = sphere_grid(2, 4).unwrap();
        let angles: Vec<f64> = g.points.iter().map(|p| p[1].atan2(p[0])).collect();
        let pi = std::f64::consts::PI;
        for (a, e) in angles.iter().zip([0.0, pi / 2.0, pi, -pi / 2.0]) {
            assert!((a - e).abs() < 1e-12);
        }
        assert!(g.weights.iter().all(|&w| (w - pi / 2.0).abs() < 1e-12));
    }

    #[test]
    fn weights_sum_to_surface_measure() {
        for (n, total) in [
            (1, 2.0),
            (2, 2.0 * std::f64::consts::PI),
            (3, 4.0 * std::f64::consts::PI),
            (4, 2.0 * std::f64::consts::PI.powi(2)),
        ] {
            let g = sphere_grid(n, 100).unwrap();
            let s: f64 = g.weights.iter().sum();
            assert_relative_eq!(s, total, max_relative = 1e-6);
            assert!(g.points.iter().all(|p| (crate::linalg::norm(p) - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn deterministic_and_size_checked() {
        assert_eq!(sphere_grid(3, 50).unwrap(), sphere_grid(3, 50).unwrap());
        assert!(sphere_grid(3, 5).is_err());
    }

    #[test]
    fn disk_and_polygons() {
        let g = sphere_grid(2, 256).unwrap();
        assert_relative_eq!(
            star_volume(|_| Ok(1.0), &g).unwrap(),
            std::f64::consts::PI,
            epsilon = 1e-6
        );
        let g = sphere_grid(2, 1024).unwrap();
        let x2 = make_standard_bodies(BodyKind::Crosspolytope, 2).unwrap();
        assert_relative_eq!(star_volume(|u| x2.radial(u), &g).unwrap(), 2.0, epsilon = 1e-3);
        let c2 = centered(&make_standard_bodies(BodyKind::Cube, 2).unwrap());
        assert_relative_eq!(star_volume(|u| c2.radial(u), &g).unwrap(), 1.0, epsilon = 1e-3);
    }

    #[test]
    fn nonpositive_radial_rejected() {
        let g = sphere_grid(2, 8).unwrap();
        assert!(matches!(star_volume(|_| Ok(0.0), &g), Err(Error::Domain(_))));
    }

    #[test]
    fn ball_volumes() {
        let g3 = sphere_grid(3, 2000).unwrap();
        assert_relative_eq!(
            star_volume(|_| Ok(1.0), &g3).unwrap(),
            4.0 / 3.0 * std::f64::consts::PI,
            max_relative = 1e-9
        );
        let g4 = sphere_grid(4, 4000).unwrap();
        let x4 = make_standard_bodies(BodyKind::Crosspolytope, 4).unwrap();
        assert_relative_eq!(
            star_volume(|u| x4.radial(u), &g4).unwrap(),
            2.0 / 3.0,
            max_relative = 2e-2
        );
    }
}
