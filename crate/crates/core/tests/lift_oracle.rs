//! Lift searches checked against a brute-force scan of the free coordinate.

mod common;

use common::{c, min_eig3, Mat};
use num_complex::Complex64 as C;
use pickbody::extremal::{lift_search, verify_extremal, LiftOutcome, DEFAULT_LIFT_BUDGET};
use pickbody::kernel_ball::{boundary_scale, restrict, szego_kernel, Kernel, TupleIndex};
use pickbody::numlin::{HermitianMatrix, ToleranceConfig};

/// A phase-perturbed Szego kernel whose ball does not lift every boundary
/// point of its `(0, 1)` restriction.
fn non_extremal_kernel() -> Kernel {
    let alpha = [c(0.47, -0.51), c(-0.13, -0.06), c(0.67, 0.32)];
    let base = szego_kernel(&alpha, &[0.0; 3]).unwrap();
    let phase = [[0.0, 0.26, -0.28], [-0.26, 0.0, -0.28], [0.28, 0.28, 0.0]];
    let m = HermitianMatrix::from_fn(3, |i, j| base.get(i, j) * C::from_polar(1.0, phase[i][j])).unwrap();
    Kernel::new(m, &ToleranceConfig::default()).unwrap()
}

fn scaled(k: &Kernel, w: &[C]) -> Mat {
    (0..3)
        .map(|i| (0..3).map(|j| (c(1.0, 0.0) - w[i] * w[j].conj()) * k.get(i, j)).collect())
        .collect()
}

/// Largest value of the minimum eigenvalue over a grid of third
/// coordinates, together with an upper bound valid on the whole closed disc.
fn brute_force_max(k: &Kernel, w01: [C; 2]) -> (f64, f64) {
    let h = 0.004;
    let steps = (2.0 / h) as i32 + 1;
    let mut best = f64::NEG_INFINITY;
    for a in 0..=steps {
        for b in 0..=steps {
            let x = c(-1.0 + a as f64 * h, -1.0 + b as f64 * h);
            if x.norm() > 1.0 + h {
                continue;
            }
            best = best.max(min_eig3(&scaled(k, &[w01[0], w01[1], x])));
        }
    }
    // Moving w_3 by d perturbs row and column 3 by at most
    // |d| (sqrt(2) |K(3, .)| |w| + 3 K(3, 3)) in Frobenius norm.
    let row: f64 = (0..2).map(|j| (w01[j] * k.get(2, j)).norm_sqr()).sum::<f64>().sqrt();
    let lip = 2f64.sqrt() * row + 3.0 * k.get(2, 2).re;
    (best, best + lip * h / 2f64.sqrt())
}

#[test]
fn refuted_boundary_point_has_no_completion() {
    let k = non_extremal_kernel();
    let idx = TupleIndex::new(vec![0, 1], 3).unwrap();
    let u = [c(0.6, 0.2), c(-0.15, 0.02)];
    let r = boundary_scale(&restrict(&k, &idx).unwrap(), &u).unwrap();
    let w01 = [u[0] * r, u[1] * r];

    let (grid_best, upper) = brute_force_max(&k, w01);
    assert!(upper < 0.0, "grid upper bound {upper} should exclude every completion");

    match lift_search(&k, &idx, &w01, DEFAULT_LIFT_BUDGET, &ToleranceConfig::default()).unwrap() {
        LiftOutcome::Refuted { best, bound } => {
            assert!(bound < 0.0);
            assert!(bound >= grid_best - 1e-9, "bound {bound} below grid value {grid_best}");
            assert!(best <= bound + 1e-12);
        }
        other => panic!("expected a refutation, got {other:?}"),
    }
}

#[test]
fn sampled_verification_finds_counterexamples() {
    let v = verify_extremal(&non_extremal_kernel(), 10, 5, DEFAULT_LIFT_BUDGET, &ToleranceConfig::default()).unwrap();
    assert!(!v.extremal);
    assert!(!v.counterexamples.is_empty());
    for f in &v.counterexamples {
        assert!(f.bound < 0.0);
    }
}

#[test]
fn szego_lift_attains_the_grid_maximum() {
    let nodes = [c(0.1, 0.2), c(-0.4, 0.3), c(0.5, -0.1)];
    let k = Kernel::szego(&nodes).unwrap();
    let idx = TupleIndex::new(vec![0, 1], 3).unwrap();
    let u = [c(0.3, -0.5), c(0.2, 0.4)];
    let r = boundary_scale(&restrict(&k, &idx).unwrap(), &u).unwrap();
    let w01 = [u[0] * r, u[1] * r];
    let tol = ToleranceConfig::default();
    let lift = match lift_search(&k, &idx, &w01, DEFAULT_LIFT_BUDGET, &tol).unwrap() {
        LiftOutcome::Lifted(w) => w,
        other => panic!("expected a lift, got {other:?}"),
    };
    // The trigonometric cubic loses about sqrt(eps) near repeated roots.
    let at_lift = min_eig3(&scaled(&k, &lift));
    assert!(at_lift >= -1e-7, "lift leaves the ball: {at_lift}");
    let (grid_best, _) = brute_force_max(&k, w01);
    assert!(grid_best <= at_lift + 1e-7);
}
