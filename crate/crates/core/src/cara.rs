//! Caratheodory quantities and Pick bodies on the disc and the polydisc.
//!
//! On the polydisc the Caratheodory pseudodistance is the largest coordinate
//! Moebius distance. Pick-body membership is exact on the disc (Szego kernel),
//! for two points on any polydisc, and on the bidisc through an Agler
//! decomposition: `w` is a value tuple iff there are PSD `G_1, G_2` with
//!
//! ```text
//! 1 - w_i conj(w_j) = (1 - l_i conj(l_j)) G_1(i, j) + (1 - m_i conj(m_j)) G_2(i, j).
//! ```
//!
//! The decomposition is searched by Dykstra's alternating projections between
//! the product PSD cone and the (entrywise) affine constraint set. A verified
//! dual certificate doubles as an admissible kernel whose ball excludes `w`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, precondition, Result};
use crate::kernel_ball::{schur_scale, Kernel};
use crate::moebius::mdist;
use crate::numlin::{
    c, hermitian_eigen, is_psd, project_psd, ComplexMatrix, HermitianMatrix, ToleranceConfig, C64,
};
use crate::pick_disc::szego_matrix;
use crate::sampling;

/// The implemented model domains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DomainModel {
    Disc,
    Polydisc { dim: usize },
}

impl DomainModel {
    pub fn polydisc(dim: usize) -> Result<Self> {
        if dim == 0 {
            return invalid("polydisc dimension must be at least 1");
        }
        Ok(DomainModel::Polydisc { dim })
    }

    pub fn dim(&self) -> usize {
        match self {
            DomainModel::Disc => 1,
            DomainModel::Polydisc { dim } => *dim,
        }
    }
}

/// A point of a model domain, one coordinate per disc factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainPoint(pub Vec<C64>);

impl DomainPoint {
    pub fn new(coords: Vec<C64>) -> Result<Self> {
        if coords.is_empty() {
            return invalid("a domain point needs at least one coordinate");
        }
        if let Some(z) = coords.iter().find(|z| !(z.norm() < 1.0)) {
            return invalid(format!("coordinate {z} is not in the open disc"));
        }
        Ok(DomainPoint(coords))
    }

    pub fn disc(z: C64) -> Result<Self> {
        Self::new(vec![z])
    }

    pub fn coords(&self) -> &[C64] {
        &self.0
    }
}

fn check_point(d: &DomainModel, z: &DomainPoint) -> Result<()> {
    if z.0.len() != d.dim() {
        return invalid(format!(
            "point has {} coordinates, domain has dimension {}",
            z.0.len(),
            d.dim()
        ));
    }
    if let Some(v) = z.0.iter().find(|v| !(v.norm() < 1.0)) {
        return invalid(format!("coordinate {v} is not in the open disc"));
    }
    Ok(())
}

fn check_distinct(d: &DomainModel, z: &[DomainPoint]) -> Result<()> {
    for p in z {
        check_point(d, p)?;
    }
    for i in 0..z.len() {
        for j in (i + 1)..z.len() {
            let gap = z[i].0.iter().zip(&z[j].0).fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
            if gap <= 1e-12 {
                return invalid(format!("points {i} and {j} coincide"));
            }
        }
    }
    Ok(())
}

/// Coordinate `k` of every point.
pub fn coordinate_nodes(z: &[DomainPoint], k: usize) -> Vec<C64> {
    z.iter().map(|p| p.0[k]).collect()
}

/// Caratheodory pseudodistance `c*(z, w)`.
pub fn cara_distance(d: &DomainModel, z: &DomainPoint, w: &DomainPoint) -> Result<f64> {
    check_point(d, z)?;
    check_point(d, w)?;
    Ok(z.0.iter().zip(&w.0).fold(0.0f64, |m, (&a, &b)| m.max(mdist(a, b))))
}

/// Generalized Caratheodory function on the disc: `prod_j m(z1, z_j)`, the
/// value at `z1` of the Blaschke product vanishing at the distinct zeros.
pub fn gen_cara_disc(z1: C64, zeros: &[C64]) -> f64 {
    dedupe(zeros).iter().map(|&a| mdist(z1, a)).product()
}

fn dedupe(points: &[C64]) -> Vec<C64> {
    let mut out: Vec<C64> = Vec::with_capacity(points.len());
    for &p in points {
        if out.iter().all(|q| (q - p).norm() > 1e-14) {
            out.push(p);
        }
    }
    out
}

/// Certified lower bound for `c*(z1; zeros)` on a polydisc.
///
/// Maximizes `|f(z1)|` over a finite family of maps into the closed disc
/// that vanish at every zero: products of coordinate Blaschke factors (each
/// zero killed through a chosen coordinate) and Blaschke products of the
/// one-variable slices `t z_k + (1 - t) e^{i phi} z_l`. `budget` caps the
/// number of candidates per family.
pub fn gen_cara_lower_bound(
    d: &DomainModel,
    z1: &DomainPoint,
    zeros: &[DomainPoint],
    budget: usize,
) -> Result<f64> {
    check_point(d, z1)?;
    for p in zeros {
        check_point(d, p)?;
    }
    if zeros.is_empty() {
        return Ok(1.0);
    }
    let m = d.dim();
    if m == 1 {
        return Ok(gen_cara_disc(z1.0[0], &coordinate_nodes(zeros, 0)));
    }
    let budget = budget.max(1);
    let mut best = 0.0f64;

    // Coordinate assignments: zero j is killed by a factor in coordinate choice[j].
    let total = (m as u128).checked_pow(zeros.len() as u32).unwrap_or(u128::MAX);
    let count = total.min(budget as u128) as usize;
    for code in 0..count {
        let mut rest = code;
        let mut factors: Vec<(usize, C64)> = Vec::new();
        for zero in zeros {
            let k = rest % m;
            rest /= m;
            let a = zero.0[k];
            if factors.iter().all(|&(kk, aa)| kk != k || (aa - a).norm() > 1e-14) {
                factors.push((k, a));
            }
        }
        let f = |p: &DomainPoint| -> f64 {
            factors.iter().map(|&(k, a)| mdist(p.0[k], a)).product()
        };
        if zeros.iter().all(|zr| f(zr) <= 1e-10) {
            best = best.max(f(z1));
        }
    }

    // Linear slices through pairs of coordinates.
    let steps = ((budget as f64).sqrt().ceil() as usize).max(2);
    for k in 0..m {
        for l in (k + 1)..m {
            for ti in 0..=steps {
                let t = ti as f64 / steps as f64;
                for pi in 0..steps {
                    let rot = C64::from_polar(1.0, std::f64::consts::TAU * pi as f64 / steps as f64);
                    let slice = |p: &DomainPoint| p.0[k] * t + rot * p.0[l] * (1.0 - t);
                    let zs: Vec<C64> = zeros.iter().map(slice).collect();
                    let value = gen_cara_disc(slice(z1), &zs);
                    let vanishes = zs.iter().all(|&zz| gen_cara_disc(zz, &zs) <= 1e-10);
                    if vanishes {
                        best = best.max(value);
                    }
                }
            }
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Membership {
    Member,
    NonMember,
    Undecided,
}

/// Settings for the alternating-projection feasibility search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeasibilityConfig {
    /// Residual level below which the iteration counts as converged.
    pub tol: f64,
    /// Maximum number of Dykstra iterations.
    pub budget: usize,
    /// Window over which a stalled residual is detected.
    pub plateau_window: usize,
    /// Relative change below which the residual counts as stalled.
    pub plateau_rel: f64,
    /// Affine-constraint accuracy required of a witness.
    pub witness_tol: f64,
}

impl Default for FeasibilityConfig {
    fn default() -> Self {
        FeasibilityConfig {
            tol: 1e-9,
            budget: 20_000,
            plateau_window: 500,
            plateau_rel: 1e-12,
            witness_tol: 1e-7,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FeasibilityStatus {
    /// PSD witnesses, one per coordinate.
    Feasible { witnesses: Vec<HermitianMatrix> },
    /// `certificate`, when present, is a positive definite admissible kernel
    /// whose ball excludes the target tuple.
    Infeasible {
        residual: f64,
        certificate: Option<HermitianMatrix>,
    },
    Undecided { residual: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityResult {
    pub status: FeasibilityStatus,
    pub iterations: usize,
}

/// Agler-Pick feasibility on the bidisc with coordinate nodes `lambda`, `mu`.
pub fn agler_pick_feasibility(
    lambda: &[C64],
    mu: &[C64],
    w: &[C64],
    tol: &ToleranceConfig,
    cfg: &FeasibilityConfig,
) -> Result<FeasibilityResult> {
    agler_feasibility(&[lambda.to_vec(), mu.to_vec()], w, tol, cfg)
}

/// Searches PSD `G_1..G_m` with `1 - w_i conj(w_j) = sum_k (1 - x^k_i conj(x^k_j)) G_k(i, j)`
/// where `x^k` are the coordinate-`k` nodes.
pub fn agler_feasibility(
    coords: &[Vec<C64>],
    w: &[C64],
    tol: &ToleranceConfig,
    cfg: &FeasibilityConfig,
) -> Result<FeasibilityResult> {
    if cfg.budget == 0 {
        return invalid("iteration budget must be positive");
    }
    if coords.is_empty() {
        return invalid("at least one coordinate is required");
    }
    let n = w.len();
    if n == 0 || coords.iter().any(|x| x.len() != n) {
        return invalid("every coordinate needs one node per target");
    }
    for x in coords {
        if let Some(z) = x.iter().find(|z| !(z.norm() < 1.0)) {
            return invalid(format!("node {z} is not in the open disc"));
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if coords.iter().all(|x| (x[i] - x[j]).norm() <= 1e-12) {
                return invalid(format!("points {i} and {j} coincide"));
            }
        }
    }
    let problem = AglerProblem::new(coords, w);

    // A target outside the closed disc is excluded by a coordinate spike.
    if let Some(i) = w.iter().position(|z| z.norm() > 1.0 + 1e-12) {
        let spike = HermitianMatrix::from_fn(n, |a, b| {
            if a == i && b == i {
                c(1.0, 0.0)
            } else if a == b {
                c(1e-3, 0.0)
            } else {
                c(0.0, 0.0)
            }
        })?;
        let certificate = problem.verify_certificate(&spike, tol);
        return Ok(FeasibilityResult {
            status: FeasibilityStatus::Infeasible {
                residual: f64::INFINITY,
                certificate,
            },
            iterations: 0,
        });
    }

    let m = coords.len();
    let zero = HermitianMatrix::from_fn(n, |_, _| c(0.0, 0.0))?;
    let mut x: Vec<HermitianMatrix> = vec![zero.clone(); m];
    let mut p: Vec<HermitianMatrix> = vec![zero.clone(); m];
    let mut q: Vec<HermitianMatrix> = vec![zero; m];
    if problem.affine_residual(&x) <= cfg.witness_tol {
        return Ok(FeasibilityResult {
            status: FeasibilityStatus::Feasible { witnesses: x },
            iterations: 0,
        });
    }

    let mut history: Vec<f64> = Vec::with_capacity(cfg.budget);
    let mut last_residual = f64::INFINITY;
    for it in 1..=cfg.budget {
        let xp: Vec<HermitianMatrix> = x.iter().zip(&p).map(|(a, b)| a.add(b)).collect();
        let y = problem.project_affine(&xp);
        p = xp.iter().zip(&y).map(|(a, b)| a.sub(b)).collect();
        let yq: Vec<HermitianMatrix> = y.iter().zip(&q).map(|(a, b)| a.add(b)).collect();
        let x_new = yq.iter().map(project_psd).collect::<Result<Vec<_>>>()?;
        q = yq.iter().zip(&x_new).map(|(a, b)| a.sub(b)).collect();
        x = x_new;

        let residual = frobenius_gap(&y, &x);
        last_residual = residual;
        history.push(residual);

        if problem.affine_residual(&x) <= cfg.witness_tol {
            return Ok(FeasibilityResult {
                status: FeasibilityStatus::Feasible { witnesses: x },
                iterations: it,
            });
        }
        if it == 50 || it % 500 == 0 {
            if let Some(witnesses) = problem.factor_polish(&x, 500, cfg.witness_tol) {
                return Ok(FeasibilityResult {
                    status: FeasibilityStatus::Feasible { witnesses },
                    iterations: it,
                });
            }
        }
        if residual > 10.0 * cfg.tol {
            if it % 50 == 0 {
                if let Some(cert) = problem.certificate_from(&y, tol)? {
                    return Ok(FeasibilityResult {
                        status: FeasibilityStatus::Infeasible {
                            residual,
                            certificate: Some(cert),
                        },
                        iterations: it,
                    });
                }
            }
            if it > cfg.plateau_window {
                let before = history[it - 1 - cfg.plateau_window];
                if (before - residual).abs() <= cfg.plateau_rel * residual {
                    let certificate = problem.certificate_from(&y, tol)?;
                    return Ok(FeasibilityResult {
                        status: FeasibilityStatus::Infeasible {
                            residual,
                            certificate,
                        },
                        iterations: it,
                    });
                }
            }
        }
    }
    Ok(FeasibilityResult {
        status: FeasibilityStatus::Undecided {
            residual: last_residual,
        },
        iterations: cfg.budget,
    })
}

fn frobenius_gap(a: &[HermitianMatrix], b: &[HermitianMatrix]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.entries().iter().zip(y.entries()).map(|(u, v)| (u - v).norm_sqr()).sum::<f64>())
        .sum::<f64>()
        .sqrt()
}

/// Coefficient matrices `a_k = (1 - x^k_i conj(x^k_j))` and the target
/// `e = (1 - w_i conj(w_j))` of an Agler decomposition problem.
struct AglerProblem {
    n: usize,
    coeffs: Vec<HermitianMatrix>,
    target: HermitianMatrix,
}

impl AglerProblem {
    fn new(coords: &[Vec<C64>], w: &[C64]) -> Self {
        let n = w.len();
        let one = c(1.0, 0.0);
        let coeffs = coords
            .iter()
            .map(|x| {
                HermitianMatrix::from_fn(n, |i, j| one - x[i] * x[j].conj()).expect("finite")
            })
            .collect();
        let target = HermitianMatrix::from_fn(n, |i, j| one - w[i] * w[j].conj()).expect("finite");
        AglerProblem { n, coeffs, target }
    }

    fn affine_residual(&self, x: &[HermitianMatrix]) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mut r = self.target.get(i, j);
                for (a, g) in self.coeffs.iter().zip(x) {
                    r -= a.get(i, j) * g.get(i, j);
                }
                worst = worst.max(r.norm());
            }
        }
        worst
    }

    /// Entrywise projection onto `{sum_k a_k . G_k = e}`.
    fn project_affine(&self, x: &[HermitianMatrix]) -> Vec<HermitianMatrix> {
        let n = self.n;
        let m = x.len();
        let mut out: Vec<Vec<C64>> = x.iter().map(|g| g.entries().to_vec()).collect();
        for i in 0..n {
            for j in 0..n {
                let mut r = self.target.get(i, j);
                let mut weight = 0.0;
                for k in 0..m {
                    let a = self.coeffs[k].get(i, j);
                    r -= a * x[k].get(i, j);
                    weight += a.norm_sqr();
                }
                for k in 0..m {
                    let a = self.coeffs[k].get(i, j);
                    out[k][i * n + j] += a.conj() * r / weight;
                }
            }
        }
        out.into_iter()
            .map(|d| HermitianMatrix::from_row_major(n, d).expect("finite"))
            .collect()
    }

    /// Polishes a near-feasible PSD iterate by Levenberg-Marquardt on Gram
    /// factors `G_k = L_k L_k*`, so every iterate stays PSD. Returns the
    /// blocks when the affine residual drops below `witness_tol`.
    fn factor_polish(&self, x: &[HermitianMatrix], steps: usize, witness_tol: f64) -> Option<Vec<HermitianMatrix>> {
        let n = self.n;
        let mut factors: Vec<ComplexMatrix> = Vec::with_capacity(x.len());
        for g in x {
            let e = hermitian_eigen(g).ok()?;
            let mut l = e.vectors.clone();
            for j in 0..n {
                let s = e.values[j].max(0.0).sqrt();
                for i in 0..n {
                    l.set(i, j, l.get(i, j) * s);
                }
            }
            factors.push(l);
        }
        let blocks = |fs: &[ComplexMatrix]| -> Vec<HermitianMatrix> {
            fs.iter().map(|l| HermitianMatrix::symmetrize(&l.matmul(&l.adjoint()))).collect()
        };
        let residual_vec = |gs: &[HermitianMatrix]| -> Vec<f64> {
            let mut r = self.target.clone();
            for (a, g) in self.coeffs.iter().zip(gs) {
                r = r.sub(&a.hadamard(g));
            }
            hermitian_to_real(&r)
        };
        let norm = |v: &[f64]| v.iter().map(|t| t * t).sum::<f64>().sqrt();

        let mut gs = blocks(&factors);
        let mut r = residual_vec(&gs);
        let mut damping = 1e-3 * norm(&r).max(1e-12);
        for _ in 0..steps {
            if self.affine_residual(&gs) <= witness_tol {
                return Some(gs);
            }
            // Jacobian columns: derivative of sum_k a_k . (L_k L_k*) along each real parameter.
            let mut columns: Vec<Vec<f64>> = Vec::with_capacity(factors.len() * 2 * n * n);
            for (k, l) in factors.iter().enumerate() {
                for i in 0..n {
                    for j in 0..n {
                        for unit in [c(1.0, 0.0), c(0.0, 1.0)] {
                            // d(L L*) = dL L* + L dL* with dL = unit e_i e_j^T.
                            let d = HermitianMatrix::from_fn(n, |p, q| {
                                let mut v = c(0.0, 0.0);
                                if p == i {
                                    v += unit * l.get(q, j).conj();
                                }
                                if q == i {
                                    v += l.get(p, j) * unit.conj();
                                }
                                v
                            })
                            .ok()?;
                            columns.push(hermitian_to_real(&self.coeffs[k].hadamard(&d)));
                        }
                    }
                }
            }
            let rows = r.len();
            let mut improved = false;
            for _ in 0..8 {
                // delta = J^T (J J^T + damping I)^{-1} r solves the damped step in row space.
                let y = damped_solve(&columns, &r, damping)?;
                let step: Vec<f64> = columns.iter().map(|col| (0..rows).map(|t| col[t] * y[t]).sum()).collect();
                let mut trial = factors.clone();
                let mut idx = 0;
                for l in trial.iter_mut() {
                    for i in 0..n {
                        for j in 0..n {
                            let v = l.get(i, j) + c(step[idx], step[idx + 1]);
                            l.set(i, j, v);
                            idx += 2;
                        }
                    }
                }
                let trial_gs = blocks(&trial);
                let trial_r = residual_vec(&trial_gs);
                if norm(&trial_r) < norm(&r) {
                    factors = trial;
                    gs = trial_gs;
                    r = trial_r;
                    damping = (damping / 3.0).max(1e-15);
                    improved = true;
                    break;
                }
                damping *= 4.0;
            }
            if !improved {
                break;
            }
        }
        (self.affine_residual(&gs) <= witness_tol).then_some(gs)
    }

    /// Candidate dual certificate from the normal direction at `y` and its verification.
    fn certificate_from(&self, y: &[HermitianMatrix], tol: &ToleranceConfig) -> Result<Option<HermitianMatrix>> {
        let n = self.n;
        let px = y.iter().map(project_psd).collect::<Result<Vec<_>>>()?;
        let d: Vec<HermitianMatrix> = y.iter().zip(&px).map(|(a, b)| a.sub(b)).collect();
        // d_k = conj(a_k) . Y' in least squares; the admissible kernel is conj(-Y').
        let gamma = HermitianMatrix::from_fn(n, |i, j| {
            let mut num = c(0.0, 0.0);
            let mut den = 0.0;
            for (a, dk) in self.coeffs.iter().zip(&d) {
                num += a.get(i, j) * dk.get(i, j);
                den += a.get(i, j).norm_sqr();
            }
            -(num / den).conj()
        })?;
        Ok(self.verify_certificate(&gamma, tol))
    }

    /// Shifts `gamma` by a multiple of the identity until it is admissible
    /// and positive definite, then checks that its ball excludes the target.
    fn verify_certificate(&self, gamma: &HermitianMatrix, tol: &ToleranceConfig) -> Option<HermitianMatrix> {
        let n = self.n;
        let scale = gamma.max_abs();
        if !(scale > 0.0) || !scale.is_finite() {
            return None;
        }
        let gamma = gamma.scale(1.0 / scale);
        let mut shift = 0.0f64;
        for a in &self.coeffs {
            let lo = hermitian_eigen(&a.hadamard(&gamma)).ok()?.min();
            let diag_min = (0..n).map(|i| a.get(i, i).re).fold(f64::INFINITY, f64::min);
            if lo < 0.0 {
                shift = shift.max(-lo / diag_min);
            }
        }
        let own = hermitian_eigen(&gamma).ok()?.min();
        if own < 0.0 {
            shift = shift.max(-own);
        }
        shift = shift * (1.0 + 1e-9) + 1e-9;
        let candidate = gamma.add(&HermitianMatrix::identity(n).scale(shift));
        if !is_admissible(&candidate, &self.coeffs, tol) {
            return None;
        }
        let scaled = self.target.hadamard(&candidate);
        let lo = hermitian_eigen(&scaled).ok()?.min();
        if lo < -1e3 * tol.psd_tol.max(1e-12) * scaled.tolerance_scale() {
            Some(candidate)
        } else {
            None
        }
    }
}

/// Real coordinates of a Hermitian matrix: diagonal, then real and
/// imaginary parts of the strict upper triangle.
fn hermitian_to_real(h: &HermitianMatrix) -> Vec<f64> {
    let n = h.dim();
    let mut out: Vec<f64> = (0..n).map(|i| h.get(i, i).re).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            out.push(h.get(i, j).re);
            out.push(h.get(i, j).im);
        }
    }
    out
}

/// Solves `(A A^T + damping I) y = b` by Cholesky, with `A` given by columns.
fn damped_solve(columns: &[Vec<f64>], b: &[f64], damping: f64) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let v: f64 = columns.iter().map(|col| col[i] * col[j]).sum();
            m[i * n + j] = v;
            m[j * n + i] = v;
        }
        m[i * n + i] += damping;
    }
    // In-place lower Cholesky factor.
    for j in 0..n {
        let mut d = m[j * n + j];
        for k in 0..j {
            d -= m[j * n + k] * m[j * n + k];
        }
        if !(d > 0.0) {
            return None;
        }
        let d = d.sqrt();
        m[j * n + j] = d;
        for i in (j + 1)..n {
            let mut v = m[i * n + j];
            for k in 0..j {
                v -= m[i * n + k] * m[j * n + k];
            }
            m[i * n + j] = v / d;
        }
    }
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] -= m[i * n + k] * y[k];
        }
        y[i] /= m[i * n + i];
    }
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            y[i] -= m[k * n + i] * y[k];
        }
        y[i] /= m[i * n + i];
    }
    Some(y)
}

/// `G` positive definite with every `a_k . G` PSD.
fn is_admissible(g: &HermitianMatrix, coeffs: &[HermitianMatrix], tol: &ToleranceConfig) -> bool {
    let Ok(e) = hermitian_eigen(g) else { return false };
    if e.min() <= 0.0 {
        return false;
    }
    coeffs
        .iter()
        .all(|a| is_psd(&a.hadamard(g), tol).unwrap_or(false))
}

/// Whether `g` is an admissible kernel for the polydisc configuration `z`:
/// positive definite with `((1 - z^k_i conj(z^k_j)) g(i, j)) >= 0` for every coordinate `k`.
pub fn admissible(g: &HermitianMatrix, z: &[DomainPoint], tol: &ToleranceConfig) -> bool {
    if z.is_empty() || g.dim() != z.len() {
        return false;
    }
    let w_zero = vec![c(0.0, 0.0); z.len()];
    let coeffs: Vec<HermitianMatrix> = (0..z[0].0.len())
        .map(|k| AglerProblem::new(&[coordinate_nodes(z, k)], &w_zero).coeffs.remove(0))
        .collect();
    is_admissible(g, &coeffs, tol)
}

fn two_point_member(d: &DomainModel, z: &[DomainPoint], w: &[C64]) -> Result<bool> {
    if w[0].norm() >= 1.0 || w[1].norm() >= 1.0 {
        // Only equal unimodular pairs are values of a map into the closed disc.
        return Ok((w[0] - w[1]).norm() <= 1e-12 && w[0].norm() <= 1.0 + 1e-12);
    }
    let cstar = cara_distance(d, &z[0], &z[1])?;
    Ok(mdist(w[0], w[1]) <= cstar + 1e-12)
}

/// Membership of `w` in the Pick body `{(f(z_1), ..., f(z_n)) : f in O(domain, closed D)}`.
///
/// Exact on the disc, for `n <= 2` on every polydisc, and on the bidisc via
/// the Agler decomposition (`Undecided` when the iteration budget runs out).
/// On polydiscs of dimension three or more a feasible decomposition proves
/// membership and a violated two-point condition disproves it; other cases
/// are `Undecided`.
pub fn pick_body_membership(
    d: &DomainModel,
    z: &[DomainPoint],
    w: &[C64],
    tol: &ToleranceConfig,
    cfg: &FeasibilityConfig,
) -> Result<Membership> {
    if z.is_empty() {
        return invalid("at least one point is required");
    }
    if z.len() != w.len() {
        return invalid(format!("{} points but {} values", z.len(), w.len()));
    }
    check_distinct(d, z)?;
    if w.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return invalid("non-finite target");
    }
    if w.iter().any(|v| v.norm() > 1.0 + 1e-12) {
        return Ok(Membership::NonMember);
    }
    if w.iter().all(|v| (v - w[0]).norm() <= 1e-12) {
        return Ok(Membership::Member);
    }
    let n = w.len();
    if n == 1 {
        return Ok(Membership::Member);
    }
    if n == 2 {
        return Ok(if two_point_member(d, z, w)? {
            Membership::Member
        } else {
            Membership::NonMember
        });
    }
    let m = d.dim();
    if m == 1 {
        let k = Kernel::szego(&coordinate_nodes(z, 0))?;
        return Ok(if is_psd(&schur_scale(&k, w)?, tol)? {
            Membership::Member
        } else {
            Membership::NonMember
        });
    }
    // A boundary value forces a constant map; the values are not all equal here.
    if w.iter().any(|v| v.norm() >= 1.0) {
        return Ok(Membership::NonMember);
    }
    let coords: Vec<Vec<C64>> = (0..m).map(|k| coordinate_nodes(z, k)).collect();
    let result = agler_feasibility(&coords, w, tol, cfg)?;
    Ok(match result.status {
        FeasibilityStatus::Feasible { .. } => Membership::Member,
        _ if m >= 3 => {
            if pairwise_violation(d, z, w)? {
                Membership::NonMember
            } else {
                Membership::Undecided
            }
        }
        FeasibilityStatus::Infeasible { .. } => Membership::NonMember,
        FeasibilityStatus::Undecided { .. } => Membership::Undecided,
    })
}

fn pairwise_violation(d: &DomainModel, z: &[DomainPoint], w: &[C64]) -> Result<bool> {
    for i in 0..z.len() {
        for j in (i + 1)..z.len() {
            if !two_point_member(d, &[z[i].clone(), z[j].clone()], &[w[i], w[j]])? {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Searches the admissible kernels of a polydisc configuration for one whose
/// ball excludes the non-member `w`.
///
/// On the disc the Szego kernel is returned. On a polydisc the search tries,
/// in order, the coordinate Szego kernels that are admissible, the Schur
/// product of all coordinate Szego kernels, the dual certificate of the
/// Agler feasibility search, and then `budget` random kernels of the form
/// `S_1 . ... . S_m . R` with `R` positive definite.
pub fn admissible_separation(
    d: &DomainModel,
    z: &[DomainPoint],
    w: &[C64],
    budget: usize,
    seed: u64,
    tol: &ToleranceConfig,
    cfg: &FeasibilityConfig,
) -> Result<Option<Kernel>> {
    match pick_body_membership(d, z, w, tol, cfg)? {
        Membership::Member => {
            return precondition("the tuple is a member of the Pick body; nothing to separate")
        }
        Membership::NonMember | Membership::Undecided => {}
    }
    let n = z.len();
    let m = d.dim();
    let separates = |g: &HermitianMatrix| -> Option<Kernel> {
        if !admissible(g, z, tol) {
            return None;
        }
        let k = Kernel::new(g.clone(), &ToleranceConfig { psd_tol: 0.0, ..*tol }).ok()?;
        match crate::kernel_ball::membership(&k, w, tol) {
            Ok(false) => Some(k),
            _ => None,
        }
    };

    let szegos: Vec<HermitianMatrix> = (0..m)
        .map(|k| szego_matrix(&coordinate_nodes(z, k)))
        .collect::<Result<_>>()?;
    for s in &szegos {
        if let Some(k) = separates(s) {
            return Ok(Some(k));
        }
    }
    let product = szegos[1..].iter().fold(szegos[0].clone(), |acc, s| acc.hadamard(s));
    if let Some(k) = separates(&product) {
        return Ok(Some(k));
    }
    if m >= 2 && w.iter().all(|v| v.norm() < 1.0) {
        let coords: Vec<Vec<C64>> = (0..m).map(|k| coordinate_nodes(z, k)).collect();
        let result = agler_feasibility(&coords, w, tol, cfg)?;
        if let FeasibilityStatus::Infeasible {
            certificate: Some(cert),
            ..
        } = result.status
        {
            if let Some(k) = separates(&cert) {
                return Ok(Some(k));
            }
        }
    }
    let mut rng = sampling::rng(seed);
    for _ in 0..budget {
        let r = sampling::pd_matrix(&mut rng, n, 1e-3);
        if let Some(k) = separates(&product.hadamard(&r)) {
            return Ok(Some(k));
        }
    }
    Ok(None)
}
