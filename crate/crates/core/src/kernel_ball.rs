//! Kernel balls `D_K = { w : ((1 - w_i conj(w_j)) K(i, j)) >= 0 }`.
//!
//! Writing `K(i, j) = <k_j, k_i>` for a Gram frame `k_1..k_n` and letting
//! `T_w k_j = conj(w_j) k_j`, the Schur-scaled matrix is the Gram matrix of
//! `I - T_w* T_w`, so `D_K` is the closed unit ball of `w -> ||T_w||`. This
//! module computes with both descriptions: PSD tests on the scaled matrix,
//! and the operator norm through the Hermitian reduction
//! `K^{-1/2} diag(w) K diag(w)* K^{-1/2}` (whose spectrum is that of `T_w* T_w`).

use serde::{Deserialize, Serialize};

use crate::error::{invalid, precondition, Error, Result};
use crate::moebius::mdist;
use crate::numlin::{
    c, count_above, hermitian_eigen, inverse_sqrt, is_psd, HermitianMatrix, ToleranceConfig, C64,
};

/// A positive definite kernel on `n` labelled nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    labels: Vec<String>,
    matrix: HermitianMatrix,
    normalized: bool,
}

const UNIT_DIAGONAL_TOL: f64 = 1e-10;

impl Kernel {
    pub fn new(matrix: HermitianMatrix, tol: &ToleranceConfig) -> Result<Self> {
        let labels = (1..=matrix.dim()).map(|i| i.to_string()).collect();
        Self::with_labels(labels, matrix, tol)
    }

    pub fn with_labels(
        labels: Vec<String>,
        matrix: HermitianMatrix,
        tol: &ToleranceConfig,
    ) -> Result<Self> {
        if labels.len() != matrix.dim() {
            return invalid(format!(
                "{} labels for a {}x{} kernel",
                labels.len(),
                matrix.dim(),
                matrix.dim()
            ));
        }
        let e = hermitian_eigen(&matrix)?;
        if e.min() <= tol.psd_tol * matrix.tolerance_scale() {
            return precondition(format!(
                "kernel must be positive definite; smallest eigenvalue is {:e}",
                e.min()
            ));
        }
        let normalized = (0..matrix.dim()).all(|i| (matrix.get(i, i).re - 1.0).abs() <= UNIT_DIAGONAL_TOL);
        Ok(Kernel {
            labels,
            matrix,
            normalized,
        })
    }

    /// Diagonal kernel; its ball is the closed unit polydisc.
    pub fn diagonal(values: &[f64]) -> Result<Self> {
        Self::new(HermitianMatrix::diagonal(values)?, &ToleranceConfig::default())
    }

    /// The (unnormalized) Szego kernel `1 / (1 - l_i conj(l_j))` on distinct interior nodes.
    pub fn szego(nodes: &[C64]) -> Result<Self> {
        check_distinct_interior(nodes)?;
        let m = crate::pick_disc::szego_matrix(nodes)?;
        Self::new(m, &ToleranceConfig::default())
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.matrix.get(i, j)
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// `D^{-1/2} K D^{-1/2}` with `D = diag(K)`. The ball is unchanged.
    pub fn normalize(&self) -> Kernel {
        let d: Vec<C64> = (0..self.dim())
            .map(|i| c(1.0 / self.matrix.get(i, i).re.sqrt(), 0.0))
            .collect();
        let mut m = self.matrix.congruence_diag(&d);
        // Force an exactly unit diagonal.
        m = HermitianMatrix::from_fn(m.dim(), |i, j| if i == j { c(1.0, 0.0) } else { m.get(i, j) })
            .expect("finite");
        Kernel {
            labels: self.labels.clone(),
            matrix: m,
            normalized: true,
        }
    }
}

fn check_distinct_interior(nodes: &[C64]) -> Result<()> {
    if nodes.is_empty() {
        return invalid("at least one node is required");
    }
    if let Some(a) = nodes.iter().find(|a| !(a.norm() < 1.0)) {
        return invalid(format!("node {a} is not in the open disc"));
    }
    for i in 0..nodes.len() {
        for j in (i + 1)..nodes.len() {
            if (nodes[i] - nodes[j]).norm() <= 1e-12 {
                return invalid(format!("nodes {i} and {j} coincide"));
            }
        }
    }
    Ok(())
}

/// Strictly increasing 0-based index tuple selecting a subconfiguration.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TupleIndex(Vec<usize>);

impl TupleIndex {
    pub fn new(indices: Vec<usize>, n: usize) -> Result<Self> {
        if indices.is_empty() {
            return invalid("tuple index must be nonempty");
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return invalid(format!("tuple index {indices:?} is not strictly increasing"));
        }
        if let Some(&i) = indices.iter().find(|&&i| i >= n) {
            return invalid(format!("index {i} out of range for {n} nodes"));
        }
        Ok(TupleIndex(indices))
    }

    pub fn full(n: usize) -> Self {
        TupleIndex((0..n).collect())
    }

    /// Every nonempty proper subtuple of `0..n`, ordered by size then lexicographically.
    pub fn all_proper(n: usize) -> Vec<TupleIndex> {
        let mut out: Vec<TupleIndex> = (1..(1u32 << n) - 1)
            .map(|mask| TupleIndex((0..n).filter(|i| mask & (1 << i) != 0).collect()))
            .collect();
        out.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
        out
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Indices of `0..n` not in the tuple.
    pub fn complement(&self, n: usize) -> Vec<usize> {
        (0..n).filter(|i| !self.0.contains(i)).collect()
    }
}

pub fn restrict(k: &Kernel, index: &TupleIndex) -> Result<Kernel> {
    if let Some(&i) = index.indices().iter().find(|&&i| i >= k.dim()) {
        return invalid(format!("index {i} out of range for {} nodes", k.dim()));
    }
    let m = k.matrix.principal_submatrix(index.indices());
    let labels = index.indices().iter().map(|&i| k.labels[i].clone()).collect();
    let normalized = k.normalized;
    Ok(Kernel {
        labels,
        matrix: m,
        normalized,
    })
}

/// The coordinate projection `pi_I`.
pub fn project<T: Copy>(w: &[T], index: &TupleIndex) -> Result<Vec<T>> {
    index
        .indices()
        .iter()
        .map(|&i| {
            w.get(i)
                .copied()
                .ok_or_else(|| Error::InvalidInput(format!("index {i} out of range")))
        })
        .collect()
}

fn check_len(k: &Kernel, w: &[C64]) -> Result<()> {
    if w.len() != k.dim() {
        return invalid(format!("tuple has {} entries for a {}-node kernel", w.len(), k.dim()));
    }
    if w.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return invalid("tuple has non-finite entries");
    }
    Ok(())
}

/// `((1 - w_i conj(w_j)) K(i, j))`.
pub fn schur_scale(k: &Kernel, w: &[C64]) -> Result<HermitianMatrix> {
    check_len(k, w)?;
    HermitianMatrix::from_fn(k.dim(), |i, j| (c(1.0, 0.0) - w[i] * w[j].conj()) * k.get(i, j))
}

pub fn membership(k: &Kernel, w: &[C64], tol: &ToleranceConfig) -> Result<bool> {
    is_psd(&schur_scale(k, w)?, tol)
}

/// Smallest eigenvalue of the Schur-scaled matrix divided by its tolerance scale.
pub fn scaled_min_eigenvalue(k: &Kernel, w: &[C64]) -> Result<f64> {
    let s = schur_scale(k, w)?;
    Ok(hermitian_eigen(&s)?.min() / s.tolerance_scale())
}

/// `K^{-1/2} W K W* K^{-1/2}` with `W = diag(w)`: unitarily similar to `T_w* T_w`.
fn operator_gram(k: &Kernel, w: &[C64]) -> Result<HermitianMatrix> {
    check_len(k, w)?;
    let tol = ToleranceConfig {
        psd_tol: 0.0,
        ..Default::default()
    };
    let root = inverse_sqrt(&k.matrix, &tol)?;
    let inner = k.matrix.congruence_diag(w);
    let m = root.to_complex().matmul(&inner.to_complex()).matmul(&root.to_complex());
    Ok(HermitianMatrix::symmetrize(&m))
}

/// `||T_w||`.
pub fn operator_norm(k: &Kernel, w: &[C64]) -> Result<f64> {
    let g = operator_gram(k, w)?;
    Ok(hermitian_eigen(&g)?.max().max(0.0).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DefectReport {
    pub operator_norm: f64,
    /// Rank of `I - T_w* T_w` (number of eigenvalues above the rank threshold).
    pub defect_rank: usize,
    pub boundary: bool,
}

pub fn defect(k: &Kernel, w: &[C64], tol: &ToleranceConfig) -> Result<DefectReport> {
    let g = operator_gram(k, w)?;
    let e = hermitian_eigen(&g)?;
    let norm = e.max().max(0.0).sqrt();
    let defect_values: Vec<f64> = e.values.iter().map(|mu| 1.0 - mu).collect();
    let scale = defect_values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    Ok(DefectReport {
        operator_norm: norm,
        defect_rank: count_above(&defect_values, tol.rank_tol * scale),
        boundary: (norm - 1.0).abs() <= tol.boundary_tol,
    })
}

/// `r* = 1 / ||T_w||`: the unique `r > 0` with `r w` on the boundary of `D_K`.
pub fn boundary_scale(k: &Kernel, w: &[C64]) -> Result<f64> {
    let norm = operator_norm(k, w)?;
    if norm <= 1e-300 || w.iter().all(|z| z.norm() == 0.0) {
        return Err(Error::NoBoundaryScale);
    }
    Ok(1.0 / norm)
}

/// Normalized, phase-modulated Szego kernel
/// `e^{i(t_l - t_m)} sqrt(1-|a_l|^2) sqrt(1-|a_m|^2) / (1 - a_l conj(a_m))`.
pub fn szego_kernel(alpha: &[C64], theta: &[f64]) -> Result<Kernel> {
    if alpha.len() != theta.len() {
        return invalid("alpha and theta must have the same length");
    }
    check_distinct_interior(alpha)?;
    let m = HermitianMatrix::from_fn(alpha.len(), |l, m| {
        if l == m {
            return c(1.0, 0.0);
        }
        C64::from_polar(1.0, theta[l] - theta[m]) * szego_modulus_factor(alpha[l], alpha[m])
    })?;
    let tol = ToleranceConfig {
        psd_tol: 0.0,
        ..Default::default()
    };
    Kernel::new(m, &tol)
}

/// `sqrt(1-|a|^2) sqrt(1-|b|^2) / (1 - a conj(b))`.
pub fn szego_modulus_factor(a: C64, b: C64) -> C64 {
    c((1.0 - a.norm_sqr()).sqrt() * (1.0 - b.norm_sqr()).sqrt(), 0.0) / (c(1.0, 0.0) - a * b.conj())
}

/// Nodes and phases reproducing a normalized kernel in Szego form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SzegoForm {
    /// Canonical nodes: `alpha[0] = 0`, `alpha[1]` real and positive.
    pub alpha: Vec<C64>,
    /// Phases with `theta[0] = 0`.
    pub theta: Vec<f64>,
    /// Largest entrywise deviation between the kernel and the reconstruction.
    pub residual: f64,
}

const RECOGNITION_MATCH_TOL: f64 = 1e-7;
const EMBEDDING_TOL: f64 = 1e-6;

/// Recovers `(alpha, theta)` with `szego_kernel(alpha, theta) = K`, or `None`
/// when `K` is not of that form.
///
/// Target Moebius distances come from the entry moduli, `m_lm = sqrt(1 - |K(l,m)|^2)`.
/// Nodes are placed one at a time as intersections of two Moebius circles
/// around already placed nodes (both intersection candidates are explored),
/// phases are read off the first row, and the full matrix is compared.
pub fn szego_recognition(k: &Kernel, tol: &ToleranceConfig) -> Result<Option<SzegoForm>> {
    let _ = tol;
    if !k.is_normalized() {
        return precondition("Szego recognition needs a kernel with unit diagonal");
    }
    let n = k.dim();
    let mut dist = vec![vec![0.0f64; n]; n];
    for l in 0..n {
        for m in 0..n {
            if l != m {
                let modulus = k.get(l, m).norm();
                if modulus <= 1e-12 || modulus >= 1.0 {
                    return Ok(None);
                }
                dist[l][m] = (1.0 - modulus * modulus).max(0.0).sqrt();
            }
        }
    }
    let mut placed = vec![c(0.0, 0.0)];
    if n >= 2 {
        placed.push(c(dist[0][1], 0.0));
    }
    let mut best: Option<SzegoForm> = None;
    place_nodes(k, &dist, &mut placed, &mut best);
    Ok(best)
}

fn place_nodes(k: &Kernel, dist: &[Vec<f64>], placed: &mut Vec<C64>, best: &mut Option<SzegoForm>) {
    if best.is_some() {
        return;
    }
    let n = k.dim();
    if placed.len() == n {
        if let Some(form) = finish_recognition(k, placed) {
            *best = Some(form);
        }
        return;
    }
    let next = placed.len();
    // Reference: the origin and the placed node farthest from it.
    let far = (1..next)
        .max_by(|&a, &b| placed[a].norm().total_cmp(&placed[b].norm()))
        .expect("at least two nodes are placed");
    let candidates = match moebius_circle_intersection(
        placed[0],
        dist[0][next],
        placed[far],
        dist[far][next],
    ) {
        Some(cands) => cands,
        None => return,
    };
    for cand in candidates {
        if !(cand.norm() < 1.0) {
            continue;
        }
        let fits = (0..next).all(|j| (mdist(placed[j], cand) - dist[j][next]).abs() <= EMBEDDING_TOL);
        if !fits {
            continue;
        }
        placed.push(cand);
        place_nodes(k, dist, placed, best);
        placed.pop();
        if best.is_some() {
            return;
        }
    }
}

/// Euclidean circle `{z : m(z, b) = rho}`: center and radius.
fn moebius_circle(b: C64, rho: f64) -> (C64, f64) {
    let d = 1.0 - rho * rho * b.norm_sqr();
    (b * ((1.0 - rho * rho) / d), rho * (1.0 - b.norm_sqr()) / d)
}

/// Intersection points of two Moebius circles; tangency within tolerance
/// counts as a single point.
fn moebius_circle_intersection(b1: C64, rho1: f64, b2: C64, rho2: f64) -> Option<Vec<C64>> {
    let (c1, r1) = moebius_circle(b1, rho1);
    let (c2, r2) = moebius_circle(b2, rho2);
    let delta = c2 - c1;
    let d = delta.norm();
    if d <= 1e-14 {
        return None;
    }
    let a = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
    let h2 = r1 * r1 - a * a;
    let slack = EMBEDDING_TOL * (r1 + r2).max(1.0);
    if h2 < -slack {
        return None;
    }
    let h = h2.max(0.0).sqrt();
    let u = delta / d;
    let base = c1 + u * a;
    let perp = u * c(0.0, 1.0);
    if h == 0.0 {
        Some(vec![base])
    } else {
        Some(vec![base + perp * h, base - perp * h])
    }
}

fn finish_recognition(k: &Kernel, alpha: &[C64]) -> Option<SzegoForm> {
    let n = alpha.len();
    let theta: Vec<f64> = (0..n)
        .map(|m| {
            if m == 0 {
                0.0
            } else {
                // K(0, m) = e^{-i t_m} M_{0m} with M_{0m} real positive because alpha_0 = 0.
                -(k.get(0, m) / szego_modulus_factor(alpha[0], alpha[m])).arg()
            }
        })
        .collect();
    let rebuilt = szego_kernel(alpha, &theta).ok()?;
    let residual = rebuilt.matrix().max_abs_diff(k.matrix());
    if residual <= RECOGNITION_MATCH_TOL {
        Some(SzegoForm {
            alpha: alpha.to_vec(),
            theta,
            residual,
        })
    } else {
        None
    }
}

/// Outcome of the singular-point classification for a 3-point kernel.
#[derive(Debug, Clone, PartialEq)]
pub enum SingularClass {
    /// Defect rank one: `K(i, j) = conj(c_i) c_j / (1 - a_i conj(a_j))`.
    Rank1 {
        c: Vec<C64>,
        alpha_kernel: Kernel,
        residual: f64,
        /// Smallest pairwise distance between the coordinates of the point.
        min_separation: f64,
    },
    /// Defect rank two: a smooth boundary point.
    Rank2,
}

/// Classifies an interior boundary point `alpha` of `D_K` (`n = 3`) by the
/// rank of `I - T_alpha* T_alpha`.
pub fn singular_classify(k: &Kernel, alpha: &[C64], tol: &ToleranceConfig) -> Result<SingularClass> {
    if k.dim() != 3 {
        return invalid("singular classification is defined for 3-point kernels");
    }
    check_len(k, alpha)?;
    if alpha.iter().any(|a| !(a.norm() < 1.0)) {
        return precondition("the point must lie in the open tridisc");
    }
    let report = defect(k, alpha, tol)?;
    if !report.boundary {
        return precondition(format!(
            "the point is not on the boundary: ||T|| = {}",
            report.operator_norm
        ));
    }
    let s = schur_scale(k, alpha)?;
    let e = hermitian_eigen(&s)?;
    let rank = count_above(&e.values, tol.rank_tol * s.tolerance_scale());
    if rank >= 2 {
        return Ok(SingularClass::Rank2);
    }
    // S = v v*, with S(i, j) = conj(c_i) c_j, hence c_i = conj(v_i).
    let top = e.max().max(0.0).sqrt();
    let v: Vec<C64> = e.vector(2).iter().map(|z| z * top).collect();
    let coeffs: Vec<C64> = v.iter().map(|z| z.conj()).collect();
    let min_separation = (0..3)
        .flat_map(|i| ((i + 1)..3).map(move |j| (i, j)))
        .map(|(i, j)| (alpha[i] - alpha[j]).norm())
        .fold(f64::INFINITY, f64::min);
    if min_separation <= 1e-9 {
        return precondition("rank-one defect with coincident coordinates; the kernel would be singular");
    }
    let m = HermitianMatrix::from_fn(3, |i, j| {
        coeffs[i].conj() * coeffs[j] / (c(1.0, 0.0) - alpha[i] * alpha[j].conj())
    })?;
    let residual = m.max_abs_diff(k.matrix());
    let alpha_kernel = Kernel::with_labels(
        k.labels().to_vec(),
        m,
        &ToleranceConfig {
            psd_tol: 0.0,
            ..*tol
        },
    )?;
    Ok(SingularClass::Rank1 {
        c: coeffs,
        alpha_kernel,
        residual,
        min_separation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moebius::moebius_distance;
    use crate::numlin::numeric_rank;

    fn r(x: f64) -> C64 {
        c(x, 0.0)
    }

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn kernel_rejects_singular() {
        let ones = HermitianMatrix::from_row_major(2, vec![r(1.0); 4]).unwrap();
        assert!(matches!(
            Kernel::new(ones, &tol()),
            Err(Error::PreconditionViolation(_))
        ));
        assert!(Kernel::szego(&[r(0.1), r(0.1)]).is_err());
    }

    #[test]
    fn schur_scale_examples() {
        let k = Kernel::szego(&[r(0.0), r(0.5), c(0.1, 0.3)]).unwrap();
        let s = schur_scale(&k, &[r(0.0); 3]).unwrap();
        assert!(s.max_abs_diff(k.matrix()) < 1e-15);

        let d = Kernel::diagonal(&[1.0, 2.0]).unwrap();
        let w = [c(0.3, 0.4), r(0.5)];
        let s = schur_scale(&d, &w).unwrap();
        assert!((s.get(0, 0).re - 0.75).abs() < 1e-15);
        assert!((s.get(1, 1).re - 1.5).abs() < 1e-15);
        assert_eq!(s.get(0, 1), r(0.0));

        let nodes = [r(0.0), r(0.5), c(0.1, 0.3)];
        let s = schur_scale(&Kernel::szego(&nodes).unwrap(), &nodes).unwrap();
        for z in s.entries() {
            assert!((z - r(1.0)).norm() < 1e-14);
        }
        assert!(schur_scale(&k, &[r(0.0)]).is_err());
    }

    #[test]
    fn membership_examples() {
        let k = Kernel::szego(&[r(0.0), r(0.5)]).unwrap();
        let u = C64::from_polar(1.0, 0.77);
        assert!(membership(&k, &[u, u], &tol()).unwrap());
        assert!(membership(&k, &[r(0.0), r(0.3)], &tol()).unwrap());
        assert!(!membership(&k, &[r(0.0), r(0.6)], &tol()).unwrap());
    }

    #[test]
    fn defect_examples() {
        let k = Kernel::szego(&[r(0.0), r(0.5)]).unwrap();
        let d = defect(&k, &[r(0.0), r(0.0)], &tol()).unwrap();
        assert_eq!(d.operator_norm, 0.0);
        let d = defect(&k, &[r(0.0), r(0.5)], &tol()).unwrap();
        assert!((d.operator_norm - 1.0).abs() < 1e-12);
        assert!(d.boundary);
        assert_eq!(d.defect_rank, 1);

        let k = Kernel::diagonal(&[1.0, 1.0, 1.0]).unwrap();
        let d = defect(&k, &[r(0.5), r(0.25), r(0.8)], &tol()).unwrap();
        assert!((d.operator_norm - 0.8).abs() < 1e-14);
        assert!(!d.boundary);
    }

    #[test]
    fn defect_rank_matches_scaled_rank_at_boundary() {
        let k = Kernel::szego(&[r(0.0), r(0.5)]).unwrap();
        let s = schur_scale(&k, &[r(0.0), r(0.5)]).unwrap();
        assert_eq!(numeric_rank(&s, &tol()).unwrap(), 1);
    }

    #[test]
    fn boundary_scale_examples() {
        let k = Kernel::szego(&[r(0.0), r(0.5)]).unwrap();
        assert!((boundary_scale(&k, &[r(0.0), r(0.25)]).unwrap() - 2.0).abs() < 1e-12);
        assert!((boundary_scale(&k, &[r(0.0), r(0.5)]).unwrap() - 1.0).abs() < 1e-12);
        let d = Kernel::diagonal(&[1.0, 3.0]).unwrap();
        assert!((boundary_scale(&d, &[r(0.5), r(0.2)]).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(boundary_scale(&k, &[r(0.0), r(0.0)]), Err(Error::NoBoundaryScale));
    }

    #[test]
    fn restrict_and_project() {
        let nodes = [r(0.0), r(0.5), r(-0.5)];
        let k = Kernel::szego(&nodes).unwrap();
        let full = restrict(&k, &TupleIndex::full(3)).unwrap();
        assert_eq!(full.matrix(), k.matrix());
        let sub = restrict(&k, &TupleIndex::new(vec![0, 2], 3).unwrap()).unwrap();
        let expect = Kernel::szego(&[r(0.0), r(-0.5)]).unwrap();
        assert!(sub.matrix().max_abs_diff(expect.matrix()) < 1e-15);
        let w = [r(1.0), r(2.0), r(3.0)];
        assert_eq!(project(&w, &TupleIndex::new(vec![1], 3).unwrap()).unwrap(), vec![r(2.0)]);
        assert!(TupleIndex::new(vec![1, 1], 3).is_err());
        assert!(TupleIndex::new(vec![3], 3).is_err());
        assert!(TupleIndex::new(vec![], 3).is_err());
        assert_eq!(TupleIndex::all_proper(3).len(), 6);
    }

    #[test]
    fn szego_kernel_examples() {
        let k = szego_kernel(&[r(0.0)], &[0.0]).unwrap();
        assert_eq!(k.get(0, 0), r(1.0));
        let k = szego_kernel(&[r(0.0), r(0.5)], &[0.0, 0.0]).unwrap();
        assert!((k.get(0, 1).re - 0.75f64.sqrt()).abs() < 1e-15);
        let alpha = [r(0.0), r(0.5), c(0.0, 0.5), c(-0.3, -0.6)];
        let k = szego_kernel(&alpha, &[0.0, 1.0, -2.0, 0.3]).unwrap();
        assert!(k.is_normalized());
        for l in 0..4 {
            for m in 0..4 {
                let md = moebius_distance(alpha[l], alpha[m]).unwrap();
                assert!((k.get(l, m).norm_sqr() + md * md - 1.0).abs() < 1e-12);
            }
        }
        assert!(szego_kernel(&[r(0.2), r(0.2)], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn recognition_round_trip() {
        let alpha = [r(0.0), r(0.5), c(0.0, 0.5)];
        let theta = [0.0, std::f64::consts::FRAC_PI_3, -std::f64::consts::FRAC_PI_4];
        let k = szego_kernel(&alpha, &theta).unwrap();
        let form = szego_recognition(&k, &tol()).unwrap().expect("recognized");
        assert_eq!(form.alpha[0], r(0.0));
        assert!(form.alpha[1].im == 0.0 && form.alpha[1].re > 0.0);
        for l in 0..3 {
            for m in 0..3 {
                let a = mdist(alpha[l], alpha[m]);
                let b = mdist(form.alpha[l], form.alpha[m]);
                assert!((a - b).abs() < 1e-9);
            }
        }
        assert!(form.residual < 1e-7);
    }

    #[test]
    fn recognition_rejects() {
        let d = Kernel::diagonal(&[1.0, 1.0]).unwrap();
        assert_eq!(szego_recognition(&d, &tol()).unwrap(), None);

        // Phases not of difference form.
        let alpha = [r(0.0), r(0.7), c(0.0, 0.7)];
        let k = szego_kernel(&alpha, &[0.0; 3]).unwrap();
        let bumped = HermitianMatrix::from_fn(3, |i, j| {
            let v = k.get(i, j);
            match (i, j) {
                (0, 2) => v * C64::from_polar(1.0, 0.3),
                (2, 0) => v * C64::from_polar(1.0, -0.3),
                _ => v,
            }
        })
        .unwrap();
        let bumped = Kernel::new(bumped, &tol()).unwrap();
        assert_eq!(szego_recognition(&bumped, &tol()).unwrap(), None);

        let unnormalized = Kernel::szego(&[r(0.0), r(0.5)]).unwrap();
        assert!(szego_recognition(&unnormalized, &tol()).is_err());
    }

    #[test]
    fn singular_classify_szego() {
        let alpha = [c(0.1, 0.2), r(-0.4), c(0.3, -0.5)];
        let k = Kernel::szego(&alpha).unwrap();
        match singular_classify(&k, &alpha, &tol()).unwrap() {
            SingularClass::Rank1 { c: coeffs, residual, .. } => {
                assert!(residual < 1e-7);
                // conj(c_i) c_j = 1 for the unnormalized Szego kernel.
                for i in 0..3 {
                    for j in 0..3 {
                        assert!((coeffs[i].conj() * coeffs[j] - r(1.0)).norm() < 1e-8);
                    }
                }
            }
            SingularClass::Rank2 => panic!("expected rank one"),
        }
    }

    #[test]
    fn singular_classify_conjugated_szego() {
        let alpha = [c(0.1, 0.2), r(-0.4), c(0.3, -0.5)];
        let phases: Vec<C64> = [0.3, -1.1, 2.0].iter().map(|&p| C64::from_polar(1.0, p)).collect();
        let base = Kernel::szego(&alpha).unwrap();
        let k = Kernel::new(base.matrix().congruence_diag(&phases), &tol()).unwrap();
        match singular_classify(&k, &alpha, &tol()).unwrap() {
            SingularClass::Rank1 { c: coeffs, residual, .. } => {
                assert!(residual < 1e-7);
                // K(i,j) = e^{i(p_i - p_j)} / (1 - ...) so conj(c_i) c_j = e^{i(p_i - p_j)}.
                for i in 0..3 {
                    for j in 0..3 {
                        let expect = phases[i] * phases[j].conj();
                        assert!((coeffs[i].conj() * coeffs[j] - expect).norm() < 1e-8);
                    }
                }
            }
            SingularClass::Rank2 => panic!("expected rank one"),
        }
    }

    #[test]
    fn singular_classify_requires_boundary() {
        let alpha = [c(0.1, 0.2), r(-0.4), c(0.3, -0.5)];
        let k = Kernel::szego(&alpha).unwrap();
        let inside: Vec<C64> = alpha.iter().map(|a| a * 0.5).collect();
        assert!(matches!(
            singular_classify(&k, &inside, &tol()),
            Err(Error::PreconditionViolation(_))
        ));
    }
}
