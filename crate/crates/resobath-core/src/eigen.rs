//! Dense symmetric eigendecomposition: Householder tridiagonalization
//! followed by implicit-shift QL, with eigenvectors accumulated.
//!
//! The oracle Hamiltonians (Kronecker sums of ladder operators) have heavily
//! clustered spectra that defeat some general-purpose eigensolvers at a few
//! hundred dimensions, so the oracles use this one. Reconstruction accuracy
//! is checked in the tests against both random matrices and the clustered
//! case that matters.

use nalgebra::DMatrix;

pub(crate) struct Eigen {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Column `m` is the eigenvector of `values[m]`.
    pub vectors: DMatrix<f64>,
}

/// Decompose a symmetric matrix. Symmetry is the caller's contract; only the
/// lower triangle is read during tridiagonalization.
pub(crate) fn symmetric_eigen(a: &DMatrix<f64>) -> Eigen {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "matrix must be square");
    let mut z: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| a[(i, j)]).collect())
        .collect();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut z, &mut d, &mut e);
    tqli(&mut d, &mut e, &mut z);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &m) in order.iter().enumerate() {
        for row in 0..n {
            vectors[(row, col)] = z[row][m];
        }
    }
    Eigen { values, vectors }
}

/// Householder reduction to tridiagonal form, accumulating the orthogonal
/// transform in `z`. On return `d` holds the diagonal and `e[1..]` the
/// subdiagonal.
fn tred2(z: &mut [Vec<f64>], d: &mut [f64], e: &mut [f64]) {
    let n = z.len();
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let scale: f64 = z[i][..=l].iter().map(|v| v.abs()).sum();
            if scale == 0.0 {
                e[i] = z[i][l];
            } else {
                for k in 0..=l {
                    z[i][k] /= scale;
                    h += z[i][k] * z[i][k];
                }
                let f = z[i][l];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                z[i][l] = f - g;
                let mut f_acc = 0.0;
                for j in 0..=l {
                    z[j][i] = z[i][j] / h;
                    let mut g_acc = 0.0;
                    for k in 0..=j {
                        g_acc += z[j][k] * z[i][k];
                    }
                    for k in (j + 1)..=l {
                        g_acc += z[k][j] * z[i][k];
                    }
                    e[j] = g_acc / h;
                    f_acc += e[j] * z[i][j];
                }
                let hh = f_acc / (h + h);
                for j in 0..=l {
                    let f = z[i][j];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        z[j][k] -= f * e[k] + g * z[i][k];
                    }
                }
            }
        } else {
            e[i] = z[i][l];
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for i in 0..n {
        if d[i] != 0.0 {
            for j in 0..i {
                let mut g = 0.0;
                for k in 0..i {
                    g += z[i][k] * z[k][j];
                }
                for k in 0..i {
                    z[k][j] -= g * z[k][i];
                }
            }
        }
        d[i] = z[i][i];
        z[i][i] = 1.0;
        for j in 0..i {
            z[j][i] = 0.0;
            z[i][j] = 0.0;
        }
    }
}

/// Implicit-shift QL on the tridiagonal (d, e), rotating the columns of `z`
/// along. `e[0]` is unused on entry.
fn tqli(d: &mut [f64], e: &mut [f64], z: &mut [Vec<f64>]) {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            // split point: subdiagonal negligible relative to its neighbors
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter <= 64, "QL iteration failed to converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            let sign_r = if g >= 0.0 { r.abs() } else { -r.abs() };
            g = d[m] - d[l] + e[l] / (g + sign_r);
            let (mut s, mut c) = (1.0, 1.0);
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    // rotation underflow: deflate and restart this l
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for row in z.iter_mut() {
                    f = row[i + 1];
                    row[i + 1] = s * row[i] + c * f;
                    row[i] = c * row[i] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}
