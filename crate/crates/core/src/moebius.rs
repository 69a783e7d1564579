//! Disc geometry: the Moebius (pseudohyperbolic) distance, disc automorphisms
//! and finite Blaschke products.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numlin::{c, C64};

const CLOSED_DISC_SLACK: f64 = 1e-12;

/// A point of the closed unit disc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscPoint(C64);

impl DiscPoint {
    pub fn new(value: C64) -> Result<Self> {
        if !value.re.is_finite() || !value.im.is_finite() {
            return invalid("disc point must be finite");
        }
        if value.norm() > 1.0 + CLOSED_DISC_SLACK {
            return invalid(format!("{value} lies outside the closed unit disc"));
        }
        Ok(DiscPoint(value))
    }

    pub fn from_re_im(re: f64, im: f64) -> Result<Self> {
        Self::new(c(re, im))
    }

    pub fn value(self) -> C64 {
        self.0
    }

    pub fn is_interior(self, boundary_tol: f64) -> bool {
        self.0.norm() < 1.0 - boundary_tol
    }
}

/// `m(a, b) = |a - b| / |1 - conj(a) b|`.
pub fn moebius_distance(a: C64, b: C64) -> Result<f64> {
    let den = (c(1.0, 0.0) - a.conj() * b).norm();
    if den < 1e-15 {
        if (a - b).norm() < 1e-12 {
            return Err(Error::DegenerateBoundaryPair);
        }
        return Ok(1.0);
    }
    Ok(((a - b).norm() / den).min(1.0))
}

/// Moebius distance for points known to be interior; never fails.
pub(crate) fn mdist(a: C64, b: C64) -> f64 {
    let den = (c(1.0, 0.0) - a.conj() * b).norm();
    if den == 0.0 {
        return 0.0;
    }
    ((a - b).norm() / den).min(1.0)
}

/// A disc automorphism `z -> e^{i rotation} (z - center) / (1 - conj(center) z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscAutomorphism {
    pub rotation: f64,
    pub center: C64,
}

impl DiscAutomorphism {
    pub fn new(rotation: f64, center: C64) -> Result<Self> {
        if center.norm() >= 1.0 {
            return invalid("automorphism center must be interior");
        }
        Ok(DiscAutomorphism { rotation, center })
    }

    pub fn apply(&self, z: C64) -> C64 {
        C64::from_polar(1.0, self.rotation) * (z - self.center)
            / (c(1.0, 0.0) - self.center.conj() * z)
    }

    pub fn inverse(&self) -> DiscAutomorphism {
        // phi^{-1}(w) = (e^{-it} w + a) / (1 + conj(a) e^{-it} w)
        //            = e^{-it} (w + e^{it} a) / (1 + conj(e^{it} a) w)
        let shifted = C64::from_polar(1.0, self.rotation) * self.center;
        DiscAutomorphism {
            rotation: -self.rotation,
            center: -shifted,
        }
    }
}

/// `B(z) = constant * prod_k (z - a_k) / (1 - conj(a_k) z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlaschkeProduct {
    constant: C64,
    zeros: Vec<C64>,
}

impl BlaschkeProduct {
    pub fn new(constant: C64, zeros: Vec<C64>) -> Result<Self> {
        if (constant.norm() - 1.0).abs() > 1e-12 {
            return invalid(format!("Blaschke constant {constant} is not unimodular"));
        }
        if let Some(a) = zeros.iter().find(|a| !(a.norm() < 1.0)) {
            return invalid(format!("Blaschke zero {a} is not interior"));
        }
        Ok(BlaschkeProduct {
            constant: constant / constant.norm(),
            zeros,
        })
    }

    pub fn constant(c: C64) -> Result<Self> {
        Self::new(c, Vec::new())
    }

    pub fn identity() -> Self {
        BlaschkeProduct {
            constant: c(1.0, 0.0),
            zeros: vec![c(0.0, 0.0)],
        }
    }

    pub fn unimodular_constant(&self) -> C64 {
        self.constant
    }

    pub fn zeros(&self) -> &[C64] {
        &self.zeros
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.zeros.iter().fold(self.constant, |acc, &a| {
            acc * (z - a) / (c(1.0, 0.0) - a.conj() * z)
        })
    }
}

pub fn blaschke_eval(b: &BlaschkeProduct, z: DiscPoint) -> DiscPoint {
    let v = b.eval(z.value());
    // |B| <= 1 on the closed disc; clamp round-off so the result stays a DiscPoint.
    let n = v.norm();
    DiscPoint(if n > 1.0 { v / n } else { v })
}

/// Dense polynomial with coefficients in ascending degree.
#[derive(Debug, Clone)]
struct Poly(Vec<C64>);

impl Poly {
    fn eval(&self, z: C64) -> C64 {
        self.0.iter().rev().fold(c(0.0, 0.0), |acc, &a| acc * z + a)
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![c(0.0, 0.0); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }

    fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        Poly(
            (0..n)
                .map(|k| {
                    self.0.get(k).copied().unwrap_or_default()
                        + other.0.get(k).copied().unwrap_or_default()
                })
                .collect(),
        )
    }

    fn scale(&self, s: C64) -> Poly {
        Poly(self.0.iter().map(|a| a * s).collect())
    }
}

/// Roots of a polynomial of exact degree `coeffs.len() - 1` (Durand-Kerner
/// iteration followed by Newton polishing).
fn poly_roots(p: &Poly) -> Vec<C64> {
    let deg = p.0.len() - 1;
    if deg == 0 {
        return Vec::new();
    }
    let lead = p.0[deg];
    let monic = Poly(p.0.iter().map(|a| a / lead).collect());
    let mut roots: Vec<C64> = (0..deg)
        .map(|k| C64::from_polar(0.4 + 0.5 * k as f64 / deg as f64, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / deg as f64))
        .collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..deg {
            let num = monic.eval(roots[i]);
            let mut den = c(1.0, 0.0);
            for j in 0..deg {
                if i != j {
                    den *= roots[i] - roots[j];
                }
            }
            if den.norm() == 0.0 {
                roots[i] += c(1e-9, 1e-9);
                delta = f64::INFINITY;
                continue;
            }
            let step = num / den;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    let deriv = Poly((1..=deg).map(|k| monic.0[k] * k as f64).collect());
    for r in roots.iter_mut() {
        for _ in 0..3 {
            let d = deriv.eval(*r);
            if d.norm() < 1e-14 {
                break;
            }
            let step = monic.eval(*r) / d;
            if !step.re.is_finite() || step.norm() > 1e-6 {
                break;
            }
            *r -= step;
        }
    }
    roots
}

/// Reconstructs the unique Blaschke product of degree `rank` through the
/// data by Schur-Nevanlinna peeling.
///
/// Each step removes the first remaining node: with `f(l_1) = w_1` interior,
/// `g = [(f - w_1)/(1 - conj(w_1) f)] / [(z - l_1)/(1 - conj(l_1) z)]` is again
/// a Schur function of one lower degree. After `rank` steps the residual data
/// must be a single unimodular constant. The solution is carried as a
/// numerator/denominator polynomial pair and its zeros are extracted at the end.
pub fn blaschke_from_nodes(
    nodes: &[C64],
    targets: &[C64],
    rank: usize,
    boundary_tol: f64,
) -> Result<BlaschkeProduct> {
    if nodes.len() != targets.len() || nodes.is_empty() {
        return invalid("nodes and targets must be nonempty and of equal length");
    }
    let n = nodes.len();
    if rank >= n {
        return Err(Error::ReconstructionFailure(format!(
            "rank {rank} is not below the number of nodes {n}"
        )));
    }

    // Any boundary target forces the constant solution.
    if let Some(&w) = targets.iter().find(|w| w.norm() >= 1.0 - boundary_tol) {
        let unit = w / w.norm();
        if targets.iter().all(|t| (t - unit).norm() <= 1e-7) {
            return BlaschkeProduct::constant(unit);
        }
        return Err(Error::ReconstructionFailure(
            "a boundary target forces a constant interpolant but the targets differ".into(),
        ));
    }

    let mut peeled: Vec<(C64, C64)> = Vec::with_capacity(rank);
    let mut xs: Vec<C64> = nodes.to_vec();
    let mut ys: Vec<C64> = targets.to_vec();
    for step in 0..rank {
        let (l1, w1) = (xs[0], ys[0]);
        if w1.norm() >= 1.0 {
            return Err(Error::ReconstructionFailure(format!(
                "Schur parameter reached the boundary after {step} of {rank} steps"
            )));
        }
        let mut next_x = Vec::with_capacity(xs.len() - 1);
        let mut next_y = Vec::with_capacity(xs.len() - 1);
        for (&x, &y) in xs.iter().zip(&ys).skip(1) {
            let num = (y - w1) / (c(1.0, 0.0) - w1.conj() * y);
            let den = (x - l1) / (c(1.0, 0.0) - l1.conj() * x);
            next_x.push(x);
            next_y.push(num / den);
        }
        peeled.push((l1, w1));
        xs = next_x;
        ys = next_y;
    }

    // The residual data is a unimodular constant.
    let mean = ys.iter().fold(c(0.0, 0.0), |a, b| a + b) / ys.len() as f64;
    if mean.norm() == 0.0 {
        return Err(Error::ReconstructionFailure("residual data averages to zero".into()));
    }
    let unit = mean / mean.norm();
    let spread = ys.iter().fold(0.0f64, |m, y| m.max((y - unit).norm()));
    if spread > 1e-5 {
        return Err(Error::ReconstructionFailure(format!(
            "residual data is not a unimodular constant (spread {spread:e})"
        )));
    }

    // Rebuild f = (w + b g) / (1 + conj(w) b g) from the innermost level out.
    let one = c(1.0, 0.0);
    let mut num = Poly(vec![unit]);
    let mut den = Poly(vec![one]);
    for &(l, w) in peeled.iter().rev() {
        let bz = Poly(vec![-l, one]);
        let bd = Poly(vec![one, -l.conj()]);
        let new_num = bd.mul(&den).scale(w).add(&bz.mul(&num));
        let new_den = bd.mul(&den).add(&bz.mul(&num).scale(w.conj()));
        num = new_num;
        den = new_den;
    }

    let zeros = if rank == 0 {
        Vec::new()
    } else {
        poly_roots(&num)
    };
    if zeros.len() != rank {
        return Err(Error::ReconstructionFailure("numerator degree mismatch".into()));
    }
    if let Some(a) = zeros.iter().find(|a| !(a.norm() < 1.0)) {
        return Err(Error::ReconstructionFailure(format!(
            "recovered zero {a} is not interior"
        )));
    }
    // Fix the constant from the rational function at a boundary point where
    // every Blaschke factor is unimodular.
    let probe = (0..8)
        .map(|k| C64::from_polar(1.0, 0.3 + k as f64 * 0.7))
        .find(|&z| den.eval(z).norm() > 1e-8)
        .unwrap_or(one);
    let value = num.eval(probe) / den.eval(probe);
    let factors = zeros
        .iter()
        .fold(one, |acc, &a| acc * (probe - a) / (one - a.conj() * probe));
    let constant = value / factors;
    if !(constant.norm() > 0.0) || !constant.re.is_finite() {
        return Err(Error::ReconstructionFailure("could not fix the unimodular constant".into()));
    }
    let b = BlaschkeProduct {
        constant: constant / constant.norm(),
        zeros,
    };
    let err = nodes
        .iter()
        .zip(targets)
        .fold(0.0f64, |m, (&x, &y)| m.max((b.eval(x) - y).norm()));
    if err > 1e-8 {
        return Err(Error::ReconstructionFailure(format!(
            "reconstructed product misses the data by {err:e}"
        )));
    }
    Ok(b)
}
