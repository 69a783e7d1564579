//! Test-side oracles, written independently of the library numerics.
#![allow(dead_code)]

use num_complex::Complex64 as C;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// Pseudohyperbolic distance `|a - b| / |1 - conj(b) a|`.
pub fn pseudo(a: C, b: C) -> f64 {
    ((a - b) / (c(1.0, 0.0) - b.conj() * a)).norm()
}

/// Disc Pick solvability by the classical Schur reduction: peel the first
/// node with the automorphisms that send it and its value to the origin.
pub fn schur_solvable(nodes: &[C], values: &[C]) -> bool {
    if values.iter().any(|w| w.norm() > 1.0 + 1e-12) {
        return false;
    }
    if nodes.len() <= 1 {
        return true;
    }
    let (l0, w0) = (nodes[0], values[0]);
    if w0.norm() >= 1.0 - 1e-12 {
        return values.iter().all(|w| (w - w0).norm() <= 1e-9);
    }
    let mut next_nodes = Vec::new();
    let mut next_values = Vec::new();
    for (&l, &w) in nodes[1..].iter().zip(&values[1..]) {
        let zl = (l - l0) / (c(1.0, 0.0) - l0.conj() * l);
        let zw = (w - w0) / (c(1.0, 0.0) - w0.conj() * w);
        next_nodes.push(l);
        next_values.push(zw / zl);
    }
    schur_solvable(&next_nodes, &next_values)
}

pub type Mat = Vec<Vec<C>>;

pub fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    (0..n)
        .map(|i| (0..m).map(|j| (0..k).map(|t| a[i][t] * b[t][j]).sum()).collect())
        .collect()
}

pub fn adjoint(a: &Mat) -> Mat {
    let n = a.len();
    let m = a[0].len();
    (0..m).map(|i| (0..n).map(|j| a[j][i].conj()).collect()).collect()
}

/// Lower Cholesky factor of a Hermitian positive definite matrix.
pub fn cholesky(a: &Mat) -> Mat {
    let n = a.len();
    let mut l = vec![vec![c(0.0, 0.0); n]; n];
    for j in 0..n {
        let mut d = a[j][j].re;
        for k in 0..j {
            d -= l[j][k].norm_sqr();
        }
        assert!(d > 0.0, "not positive definite");
        let d = d.sqrt();
        l[j][j] = c(d, 0.0);
        for i in (j + 1)..n {
            let mut v = a[i][j];
            for k in 0..j {
                v -= l[i][k] * l[j][k].conj();
            }
            l[i][j] = v / d;
        }
    }
    l
}

/// Inverse of a lower-triangular matrix.
pub fn lower_inverse(l: &Mat) -> Mat {
    let n = l.len();
    let mut inv = vec![vec![c(0.0, 0.0); n]; n];
    for col in 0..n {
        for i in 0..n {
            let mut v = if i == col { c(1.0, 0.0) } else { c(0.0, 0.0) };
            for k in 0..i {
                v -= l[i][k] * inv[k][col];
            }
            inv[i][col] = v / l[i][i];
        }
    }
    inv
}

/// Largest eigenvalue of a Hermitian PSD matrix by repeated squaring.
pub fn top_eigenvalue(b: &Mat) -> f64 {
    let n = b.len();
    let mut p = b.clone();
    for _ in 0..40 {
        p = mat_mul(&p, &p);
        let tr: f64 = (0..n).map(|i| p[i][i].re).sum();
        if tr <= 0.0 {
            return 0.0;
        }
        for row in p.iter_mut() {
            for v in row.iter_mut() {
                *v /= tr;
            }
        }
    }
    // Dominant column of P spans the top eigenvector.
    let col = (0..n)
        .max_by(|&i, &j| p[i][i].re.total_cmp(&p[j][j].re))
        .unwrap();
    let x: Vec<C> = (0..n).map(|i| p[i][col]).collect();
    let bx: Vec<C> = (0..n).map(|i| (0..n).map(|j| b[i][j] * x[j]).sum()).collect();
    let num: C = (0..n).map(|i| x[i].conj() * bx[i]).sum();
    let den: f64 = x.iter().map(|z| z.norm_sqr()).sum();
    num.re / den
}

/// `||T_w||` for the kernel `k`: the spectral norm of `L^{-1} W L` with `K = L L*`.
pub fn multiplier_norm(k: &Mat, w: &[C]) -> f64 {
    let l = cholesky(k);
    let li = lower_inverse(&l);
    let n = k.len();
    let wl: Mat = (0..n).map(|i| (0..n).map(|j| w[i] * l[i][j]).collect()).collect();
    let a = mat_mul(&li, &wl);
    top_eigenvalue(&mat_mul(&adjoint(&a), &a)).max(0.0).sqrt()
}

/// Smallest eigenvalue of a 3x3 Hermitian matrix from its characteristic cubic.
pub fn min_eig3(a: &Mat) -> f64 {
    let a11 = a[0][0].re;
    let a22 = a[1][1].re;
    let a33 = a[2][2].re;
    let p1 = a[0][1].norm_sqr() + a[0][2].norm_sqr() + a[1][2].norm_sqr();
    let q = (a11 + a22 + a33) / 3.0;
    let p2 = (a11 - q).powi(2) + (a22 - q).powi(2) + (a33 - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    if p == 0.0 {
        return q;
    }
    let b: Mat = (0..3)
        .map(|i| {
            (0..3)
                .map(|j| (a[i][j] - if i == j { c(q, 0.0) } else { c(0.0, 0.0) }) / p)
                .collect()
        })
        .collect();
    let det = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
        + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    let r = (det.re / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos()
}
