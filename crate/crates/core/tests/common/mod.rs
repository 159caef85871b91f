//! Independent reference implementations used only by tests.
//!
//! Eigenvalues come from cyclic Jacobi rotations on the real symmetric
//! embedding `[[Re H, −Im H], [Im H, Re H]]`, whose spectrum is that of `H`
//! with every eigenvalue doubled. Partial transposes are done by explicit
//! multi-index arithmetic. Neither path touches the library's linear algebra.

#![allow(dead_code)]

use wfsim::{ComplexMatrix, DensityMatrix};

#[allow(clippy::needless_range_loop)]
pub fn jacobi_symmetric(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| y.partial_cmp(x).unwrap());
    ev
}

/// Eigenvalues of a Hermitian matrix, descending.
pub fn oracle_eigenvalues(h: &ComplexMatrix) -> Vec<f64> {
    let n = h.rows();
    let mut emb = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            emb[i][j] = z.re;
            emb[i + n][j + n] = z.re;
            emb[i][j + n] = -z.im;
            emb[i + n][j] = z.im;
        }
    }
    jacobi_symmetric(emb).into_iter().step_by(2).collect()
}

pub fn oracle_trace_norm(h: &ComplexMatrix) -> f64 {
    oracle_eigenvalues(h).iter().map(|x| x.abs()).sum()
}

fn digits(mut idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = idx % dims[k];
        idx /= dims[k];
    }
    out
}

fn undigits(d: &[usize], dims: &[usize]) -> usize {
    d.iter().zip(dims).fold(0, |acc, (x, n)| acc * n + x)
}

/// Transpose of the subsystems at `positions` (layout order indices).
pub fn oracle_partial_transpose(m: &ComplexMatrix, dims: &[usize], positions: &[usize]) -> ComplexMatrix {
    let n = m.rows();
    ComplexMatrix::from_fn(n, n, |r, c| {
        let (mut dr, mut dc) = (digits(r, dims), digits(c, dims));
        for &p in positions {
            std::mem::swap(&mut dr[p], &mut dc[p]);
        }
        m[(undigits(&dr, dims), undigits(&dc, dims))]
    })
}

/// Negativity with the left side given as layout positions.
pub fn oracle_negativity(rho: &DensityMatrix, left_labels: &[&str]) -> f64 {
    let labels: Vec<&str> = rho.layout().labels().collect();
    let dims = rho.layout().dims();
    let positions: Vec<usize> = left_labels
        .iter()
        .map(|l| labels.iter().position(|x| x == l).expect("label"))
        .collect();
    let pt = oracle_partial_transpose(rho.matrix(), &dims, &positions);
    oracle_eigenvalues(&pt).iter().filter(|&&x| x < 0.0).map(|x| -x).sum()
}

/// Reduced state keeping the listed positions (ascending).
pub fn oracle_partial_trace(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> ComplexMatrix {
    let kdims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let kn: usize = kdims.iter().product();
    let mut out = ComplexMatrix::zeros(kn, kn);
    let n = m.rows();
    for r in 0..n {
        let dr = digits(r, dims);
        for c in 0..n {
            let dc = digits(c, dims);
            let traced_equal = (0..dims.len())
                .filter(|k| !keep.contains(k))
                .all(|k| dr[k] == dc[k]);
            if traced_equal {
                let kr: Vec<usize> = keep.iter().map(|&k| dr[k]).collect();
                let kc: Vec<usize> = keep.iter().map(|&k| dc[k]).collect();
                out[(undigits(&kr, &kdims), undigits(&kc, &kdims))] += m[(r, c)];
            }
        }
    }
    out
}
