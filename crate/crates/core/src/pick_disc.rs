//! Classical Pick interpolation on the unit disc.
//!
//! For distinct nodes `l_1..l_n` in the open disc and targets `w_1..w_n` in
//! the closed disc, a holomorphic `f: D -> closed D` with `f(l_j) = w_j`
//! exists iff the Pick matrix `((1 - w_i conj(w_j)) / (1 - l_i conj(l_j)))` is
//! positive semidefinite. When it is singular of rank `r < n` the solution is
//! unique and is a Blaschke product of degree `r`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, precondition, Result};
use crate::moebius::{blaschke_from_nodes, BlaschkeProduct};
use crate::numlin::{c, hermitian_eigen, count_above, HermitianMatrix, ToleranceConfig, C64};

const MIN_NODE_SEPARATION: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PickProblem {
    nodes: Vec<C64>,
    targets: Vec<C64>,
}

impl PickProblem {
    pub fn new(nodes: Vec<C64>, targets: Vec<C64>) -> Result<Self> {
        if nodes.is_empty() {
            return invalid("a Pick problem needs at least one node");
        }
        if nodes.len() != targets.len() {
            return invalid(format!(
                "{} nodes but {} targets",
                nodes.len(),
                targets.len()
            ));
        }
        for z in nodes.iter().chain(&targets) {
            if !z.re.is_finite() || !z.im.is_finite() {
                return invalid("non-finite node or target");
            }
        }
        if let Some(l) = nodes.iter().find(|l| !(l.norm() < 1.0)) {
            return invalid(format!("node {l} is not in the open disc"));
        }
        if let Some(w) = targets.iter().find(|w| w.norm() > 1.0 + 1e-12) {
            return invalid(format!("target {w} is outside the closed disc"));
        }
        for i in 0..nodes.len() {
            for j in (i + 1)..nodes.len() {
                if (nodes[i] - nodes[j]).norm() <= MIN_NODE_SEPARATION {
                    return invalid(format!("nodes {i} and {j} coincide"));
                }
            }
        }
        Ok(PickProblem { nodes, targets })
    }

    pub fn nodes(&self) -> &[C64] {
        &self.nodes
    }

    pub fn targets(&self) -> &[C64] {
        &self.targets
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "class", content = "rank")]
pub enum SolutionClass {
    None,
    Unique(usize),
    Many,
}

pub fn pick_matrix(p: &PickProblem) -> HermitianMatrix {
    let (l, w) = (&p.nodes, &p.targets);
    HermitianMatrix::from_fn(p.len(), |i, j| {
        (c(1.0, 0.0) - w[i] * w[j].conj()) / (c(1.0, 0.0) - l[i] * l[j].conj())
    })
    .expect("Pick matrix entries are finite for interior nodes")
}

/// The Szego matrix `1 / (1 - l_i conj(l_j))`.
pub fn szego_matrix(nodes: &[C64]) -> Result<HermitianMatrix> {
    HermitianMatrix::from_fn(nodes.len(), |i, j| {
        c(1.0, 0.0) / (c(1.0, 0.0) - nodes[i] * nodes[j].conj())
    })
}

pub fn solvable(p: &PickProblem, tol: &ToleranceConfig) -> bool {
    solution_count_class(p, tol) != SolutionClass::None
}

pub fn solution_count_class(p: &PickProblem, tol: &ToleranceConfig) -> SolutionClass {
    let m = pick_matrix(p);
    let e = hermitian_eigen(&m).expect("Pick matrix is finite");
    let scale = m.tolerance_scale();
    if e.min() < -tol.psd_tol * scale {
        return SolutionClass::None;
    }
    let rank = count_above(&e.values, tol.rank_tol * scale);
    if rank < p.len() {
        SolutionClass::Unique(rank)
    } else {
        SolutionClass::Many
    }
}

pub fn unique_solution(p: &PickProblem, tol: &ToleranceConfig) -> Result<BlaschkeProduct> {
    match solution_count_class(p, tol) {
        SolutionClass::Unique(r) => blaschke_from_nodes(&p.nodes, &p.targets, r, tol.boundary_tol),
        other => precondition(format!("the problem has solution class {other:?}, not Unique")),
    }
}

/// Values at `extra_nodes` of the unique solution of `p_sub`.
pub fn extend_values(
    p_sub: &PickProblem,
    extra_nodes: &[C64],
    tol: &ToleranceConfig,
) -> Result<Vec<C64>> {
    let b = unique_solution(p_sub, tol)?;
    Ok(extra_nodes.iter().map(|&z| b.eval(z)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x: f64) -> C64 {
        c(x, 0.0)
    }

    fn prob(nodes: &[C64], targets: &[C64]) -> PickProblem {
        PickProblem::new(nodes.to_vec(), targets.to_vec()).unwrap()
    }

    #[test]
    fn pick_matrix_examples() {
        let tol = 1e-15;
        let m = pick_matrix(&prob(&[r(0.0), r(0.5)], &[r(0.0), r(0.5)]));
        for i in 0..2 {
            for j in 0..2 {
                assert!((m.get(i, j) - r(1.0)).norm() < tol);
            }
        }
        let nodes = [c(0.1, 0.2), c(-0.3, 0.4)];
        let m = pick_matrix(&prob(&nodes, &[r(0.0), r(0.0)]));
        let s = szego_matrix(&nodes).unwrap();
        assert!(m.max_abs_diff(&s) < tol);
        let (l, w) = (c(0.3, -0.1), c(0.2, 0.5));
        let m = pick_matrix(&prob(&[l], &[w]));
        assert!((m.get(0, 0).re - (1.0 - w.norm_sqr()) / (1.0 - l.norm_sqr())).abs() < tol);
    }

    #[test]
    fn rejects_coincident_nodes() {
        assert!(PickProblem::new(vec![r(0.1), r(0.1)], vec![r(0.0), r(0.0)]).is_err());
        assert!(PickProblem::new(vec![r(1.0)], vec![r(0.0)]).is_err());
        assert!(PickProblem::new(vec![r(0.1)], vec![r(1.5)]).is_err());
        assert!(PickProblem::new(vec![], vec![]).is_err());
    }

    #[test]
    fn classification_examples() {
        let tol = ToleranceConfig::default();
        let nodes = [r(0.0), r(0.5)];
        assert!(solvable(&prob(&nodes, &[r(0.0), r(0.3)]), &tol));
        assert!(!solvable(&prob(&nodes, &[r(0.0), r(0.9)]), &tol));
        assert!(solvable(&prob(&nodes, &nodes), &tol));
        assert_eq!(
            solution_count_class(&prob(&nodes, &nodes), &tol),
            SolutionClass::Unique(1)
        );
        assert_eq!(
            solution_count_class(&prob(&nodes, &[r(0.0), r(0.3)]), &tol),
            SolutionClass::Many
        );
        assert_eq!(
            solution_count_class(&prob(&nodes, &[r(0.0), r(0.9)]), &tol),
            SolutionClass::None
        );
    }

    #[test]
    fn boundary_targets() {
        let tol = ToleranceConfig::default();
        let u = C64::from_polar(1.0, 0.4);
        let nodes = [r(0.0), r(0.5)];
        assert_eq!(
            solution_count_class(&prob(&nodes, &[u, u]), &tol),
            SolutionClass::Unique(0)
        );
        assert_eq!(
            solution_count_class(&prob(&nodes, &[u, r(0.2)]), &tol),
            SolutionClass::None
        );
    }

    #[test]
    fn unique_solution_examples() {
        let tol = ToleranceConfig::default();
        let nodes = [r(0.0), r(0.5)];
        let b = unique_solution(&prob(&nodes, &nodes), &tol).unwrap();
        assert!((b.eval(c(0.2, 0.3)) - c(0.2, 0.3)).norm() < 1e-12);

        let b = unique_solution(&prob(&nodes, &[r(-0.5), r(0.0)]), &tol).unwrap();
        let z = c(0.1, -0.6);
        assert!((b.eval(z) - (z - 0.5) / (r(1.0) - z * 0.5)).norm() < 1e-12);

        let nodes = [r(0.0), r(0.5), r(-0.5)];
        let p = prob(&nodes, &[r(0.0), r(0.25), r(0.25)]);
        assert_eq!(solution_count_class(&p, &tol), SolutionClass::Unique(2));
        let b = unique_solution(&p, &tol).unwrap();
        assert_eq!(b.degree(), 2);
        assert!((b.eval(c(0.3, 0.3)) - c(0.3, 0.3) * c(0.3, 0.3)).norm() < 1e-9);

        assert!(matches!(
            unique_solution(&prob(&[r(0.0), r(0.5)], &[r(0.0), r(0.3)]), &tol),
            Err(crate::Error::PreconditionViolation(_))
        ));
    }

    #[test]
    fn extend_values_examples() {
        let tol = ToleranceConfig::default();
        let v = extend_values(&prob(&[r(0.0), r(0.5)], &[r(0.0), r(0.5)]), &[r(-0.5)], &tol).unwrap();
        assert!((v[0] - r(-0.5)).norm() < 1e-12);

        let u = C64::from_polar(1.0, 2.1);
        let v = extend_values(&prob(&[r(0.0)], &[u]), &[r(0.5)], &tol).unwrap();
        assert!((v[0] - u).norm() < 1e-12);

        let v = extend_values(&prob(&[r(0.0), r(0.5)], &[r(-0.5), r(0.0)]), &[r(-0.5)], &tol)
            .unwrap();
        assert!((v[0] - r(-0.8)).norm() < 1e-12);
    }
}
