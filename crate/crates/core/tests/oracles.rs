//! Independent oracles: Monte-Carlo hit counting, grid search, analytic
//! tent products and brute-force quadrature.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use thetaconv_core::bodies::{ball_body_radial, theta_body_volume};
use thetaconv_core::covariogram::{eval_covariogram, find_max, normalize, RayFunction};
use thetaconv_core::geometry::{
    make_standard_bodies, minkowski_sum, random_polytope, sphere_grid, transform, BodyKind,
    Direction, Polytope,
};

fn bounding_box(p: &Polytope) -> (Vec<f64>, Vec<f64>) {
    let n = p.dim();
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for v in p.vertices() {
        for i in 0..n {
            lo[i] = lo[i].min(v[i]);
            hi[i] = hi[i].max(v[i]);
        }
    }
    (lo, hi)
}

/// Hit-counting estimate of `|K ∩ (z - L)|` with its standard error.
fn mc_covariogram(k: &Polytope, l: &Polytope, z: &[f64], samples: usize, seed: u64) -> (f64, f64) {
    let (lo, hi) = bounding_box(k);
    let boxv: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = vec![0.0; k.dim()];
    let mut y = vec![0.0; k.dim()];
    let mut hits = 0usize;
    for _ in 0..samples {
        for i in 0..x.len() {
            x[i] = rng.random_range(lo[i]..hi[i]);
            y[i] = z[i] - x[i];
        }
        if k.contains(&x, 0.0) && l.contains(&y, 0.0) {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    (boxv * p, boxv * (p * (1.0 - p) / samples as f64).sqrt())
}

#[test]
fn cube_pair_is_a_tent_product() {
    let c = make_standard_bodies(BodyKind::Cube, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let z = [rng.random_range(-0.5..2.5), rng.random_range(-0.5..2.5)];
        let tent = (1.0 - (z[0] - 1.0f64).abs()).max(0.0) * (1.0 - (z[1] - 1.0f64).abs()).max(0.0);
        assert!((eval_covariogram(&c, &c, &z).unwrap() - tent).abs() < 1e-12);
    }
    let c3 = make_standard_bodies(BodyKind::Cube, 3).unwrap();
    let z = [1.5, 0.75, 1.2];
    let tent = 0.5 * 0.75 * 0.8;
    assert!((eval_covariogram(&c3, &c3, &z).unwrap() - tent).abs() < 1e-12);
}

#[test]
fn monte_carlo_agrees_with_exact_covariogram() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for case in 0..50u64 {
        let n = if case < 30 { 2 } else { 3 };
        let k = random_polytope(n, 7, 100 + 2 * case).unwrap();
        let l = random_polytope(n, 7, 101 + 2 * case).unwrap();
        let sum = minkowski_sum(&k, &l).unwrap();
        let c = sum.vertex_centroid();
        let v = &sum.vertices()[rng.random_range(0..sum.vertices().len())];
        let s: f64 = rng.random_range(0.0..0.8);
        let z: Vec<f64> = c.iter().zip(v).map(|(c, v)| c + s * (v - c)).collect();
        let exact = eval_covariogram(&k, &l, &z).unwrap();
        let (est, se) = mc_covariogram(&k, &l, &z, 1_000_000, case);
        let score = (exact - est).abs() / se.max(1e-12);
        worst = worst.max(score);
        assert!(score <= 3.0, "case {case}: exact {exact} mc {est} ± {se}");
    }
    println!("worst Monte-Carlo deviation {worst:.2} standard errors");
}

#[test]
fn grid_search_never_beats_find_max() {
    for (k, l) in [
        (
            make_standard_bodies(BodyKind::Cube, 2).unwrap(),
            make_standard_bodies(BodyKind::Cube, 2).unwrap(),
        ),
        (random_polytope(2, 8, 7).unwrap(), random_polytope(2, 6, 8).unwrap()),
        (random_polytope(2, 5, 9).unwrap(), random_polytope(2, 9, 10).unwrap()),
    ] {
        let (_, m) = find_max(&k, &l).unwrap();
        let sum = minkowski_sum(&k, &l).unwrap();
        let (lo, hi) = bounding_box(&sum);
        let steps = 120;
        let mut best = 0.0f64;
        for i in 0..=steps {
            for j in 0..=steps {
                let z = [
                    lo[0] + (hi[0] - lo[0]) * i as f64 / steps as f64,
                    lo[1] + (hi[1] - lo[1]) * j as f64 / steps as f64,
                ];
                best = best.max(eval_covariogram(&k, &l, &z).unwrap());
            }
        }
        assert!(best <= m * (1.0 + 1e-9), "grid {best} > optimizer {m}");
        assert!(best >= 0.97 * m);
    }
    let c = make_standard_bodies(BodyKind::Cube, 2).unwrap();
    let (z, m) = find_max(&c, &c).unwrap();
    assert!((m - 1.0).abs() < 1e-9 && (z[0] - 1.0).abs() < 1e-6 && (z[1] - 1.0).abs() < 1e-6);
}

#[test]
fn simplex_theta_volume_by_hit_counting() {
    let s = make_standard_bodies(BodyKind::Simplex, 2).unwrap();
    let ns = transform(&s, -1.0, &[0.0, 0.0]).unwrap();
    let h = normalize(&s, &ns).unwrap();
    let theta = 0.81;
    let grid = sphere_grid(2, 2048).unwrap();
    let cubature = theta_body_volume(&h, theta, &grid).unwrap();
    // sample the hexagon's bounding box, count points above the level
    let (lo, hi) = bounding_box(h.support());
    let boxv = (hi[0] - lo[0]) * (hi[1] - lo[1]);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let samples = 400_000;
    let level = theta * h.max_value();
    let mut hits = 0;
    for _ in 0..samples {
        let x = [rng.random_range(lo[0]..hi[0]), rng.random_range(lo[1]..hi[1])];
        if h.eval_offset(&x) >= level {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    let (est, se) = (boxv * p, boxv * (p * (1.0 - p) / samples as f64).sqrt());
    assert!((est - 0.03).abs() <= 4.0 * se, "mc {est} ± {se}");
    assert!((cubature - 0.03).abs() <= 3e-5, "cubature {cubature}");
}

#[test]
fn polytope_volumes_by_hit_counting() {
    for seed in 0..6u64 {
        let n = 2 + (seed % 2) as usize;
        let p = random_polytope(n, 9, seed + 300).unwrap();
        let (lo, hi) = bounding_box(&p);
        let boxv: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let samples = 300_000;
        let mut hits = 0;
        let mut x = vec![0.0; n];
        for _ in 0..samples {
            for i in 0..n {
                x[i] = rng.random_range(lo[i]..hi[i]);
            }
            if p.contains(&x, 0.0) {
                hits += 1;
            }
        }
        let q = hits as f64 / samples as f64;
        let se = boxv * (q * (1.0 - q) / samples as f64).sqrt();
        assert!((boxv * q - p.volume()).abs() <= 4.0 * se);
    }
}

#[test]
fn ball_body_matches_brute_force_quadrature() {
    for (n, seed) in [(2usize, 40u64), (3, 41)] {
        let k = random_polytope(n, 7, seed).unwrap();
        let l = random_polytope(n, 8, seed + 1000).unwrap();
        let h = normalize(&k, &l).unwrap();
        let u = Direction::new((0..n).map(|i| 0.3 + i as f64).collect()).unwrap();
        let p = n as f64;
        let lu = h.support_radius(&u);
        // composite Simpson with many panels
        let m = 20_000;
        let step = lu / m as f64;
        let f = |r: f64| r.powf(p - 1.0) * h.eval(&u, r);
        let mut acc = f(0.0) + f(lu);
        for i in 1..m {
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * step);
        }
        let brute = (p / h.max_value() * acc * step / 3.0).powf(1.0 / p);
        let fast = ball_body_radial(&h, p, &u).unwrap();
        assert!((fast - brute).abs() <= 1e-6 * brute, "{fast} vs {brute}");
    }
}
