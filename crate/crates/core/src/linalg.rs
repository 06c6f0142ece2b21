//! Small dense helpers for dimensions up to four. Everything works on plain
//! slices; matrices are `Vec<Vec<f64>>` row-major.

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub(crate) fn centroid(points: &[Vec<f64>]) -> Vec<f64> {
    let dim = points[0].len();
    let mut c = vec![0.0; dim];
    for p in points {
        for (ci, pi) in c.iter_mut().zip(p) {
            *ci += pi;
        }
    }
    let k = points.len() as f64;
    c.iter_mut().for_each(|x| *x /= k);
    c
}

/// Determinant by Gaussian elimination with partial pivoting.
pub(crate) fn det(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    if n == 0 {
        return 1.0;
    }
    let mut d = 1.0;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        if m[piv][col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            m.swap(piv, col);
            d = -d;
        }
        d *= m[col][col];
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            for k in col..n {
                m[row][k] -= f * m[col][k];
            }
        }
    }
    d
}

/// Solves `a x = b`. Returns `None` when the pivot falls below `pivot_tol`
/// relative to the largest entry.
pub(crate) fn solve(a: &[Vec<f64>], b: &[f64], pivot_tol: f64) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    let amax = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |acc, x| acc.max(x.abs()));
    if amax == 0.0 {
        return None;
    }
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        if m[piv][col].abs() <= pivot_tol * amax {
            return None;
        }
        m.swap(piv, col);
        for row in 0..n {
            if row != col {
                let f = m[row][col] / m[col][col];
                if f != 0.0 {
                    for k in col..=n {
                        m[row][k] -= f * m[col][k];
                    }
                }
            }
        }
    }
    Some((0..n).map(|i| m[i][n] / m[i][i]).collect())
}

/// Numerical rank of a set of row vectors.
pub(crate) fn rank(rows: &[Vec<f64>], tol: f64) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let mut m: Vec<Vec<f64>> = rows.to_vec();
    let ncols = m[0].len();
    let mut r = 0;
    for col in 0..ncols {
        if r == m.len() {
            break;
        }
        let piv = (r..m.len())
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        if m[piv][col].abs() <= tol {
            continue;
        }
        m.swap(piv, r);
        for row in r + 1..m.len() {
            let f = m[row][col] / m[r][col];
            for k in col..ncols {
                m[row][k] -= f * m[r][k];
            }
        }
        r += 1;
    }
    r
}

/// Vector orthogonal to the `n - 1` given difference vectors in R^n (generalized
/// cross product via signed cofactors). Not normalized.
pub(crate) fn cofactor_normal(diffs: &[Vec<f64>]) -> Vec<f64> {
    let n = diffs.len() + 1;
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<f64>> = diffs
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|(k, _)| *k != j)
                        .map(|(_, x)| *x)
                        .collect()
                })
                .collect();
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * det(minor)
        })
        .collect()
}

/// Orthonormal basis of the hyperplane orthogonal to the unit vector `normal`.
pub(crate) fn complement_basis(normal: &[f64]) -> Vec<Vec<f64>> {
    let n = normal.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    // Start from the standard basis vectors least aligned with the normal.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| normal[i].abs().total_cmp(&normal[j].abs()));
    for &i in &order {
        if basis.len() == n - 1 {
            break;
        }
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        let c = dot(&v, normal);
        for (vk, nk) in v.iter_mut().zip(normal) {
            *vk -= c * nk;
        }
        for b in &basis {
            let c = dot(&v, b);
            for (vk, bk) in v.iter_mut().zip(b) {
                *vk -= c * bk;
            }
        }
        let nv = norm(&v);
        if nv > 1e-6 {
            v.iter_mut().for_each(|x| *x /= nv);
            basis.push(v);
        }
    }
    basis
}

/// Iterates over all `k`-subsets of `0..n` in lexicographic order.
pub(crate) fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] < i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_count() {
        let mut c = 0;
        for_each_combination(6, 3, |_| c += 1);
        assert_eq!(c, 20);
        let mut c = 0;
        for_each_combination(4, 4, |_| c += 1);
        assert_eq!(c, 1);
        let mut seen = Vec::new();
        for_each_combination(4, 2, |s| seen.push(s.to_vec()));
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[5], vec![2, 3]);
    }

    #[test]
    fn cofactor_normal_is_orthogonal() {
        let d = vec![vec![1.0, 2.0, 0.5], vec![-0.3, 1.0, 4.0]];
        let nrm = cofactor_normal(&d);
        assert!(dot(&nrm, &d[0]).abs() < 1e-12);
        assert!(dot(&nrm, &d[1]).abs() < 1e-12);
        assert!(norm(&nrm) > 1.0);
    }

    #[test]
    fn solve_and_rank() {
        let a = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let x = solve(&a, &[3.0, 5.0], 1e-12).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-12 && (x[1] - 1.4).abs() < 1e-12);
        assert!(solve(&[vec![1.0, 2.0], vec![2.0, 4.0]], &[1.0, 2.0], 1e-12).is_none());
        assert_eq!(rank(&[vec![1.0, 2.0], vec![2.0, 4.0]], 1e-9), 1);
    }

    #[test]
    fn complement_basis_is_orthonormal() {
        let nrm = [0.6, 0.0, 0.8];
        let b = complement_basis(&nrm);
        assert_eq!(b.len(), 2);
        for v in &b {
            assert!((norm(v) - 1.0).abs() < 1e-12);
            assert!(dot(v, &nrm).abs() < 1e-12);
        }
        assert!(dot(&b[0], &b[1]).abs() < 1e-12);
    }
}
