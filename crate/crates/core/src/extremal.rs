//! Extremal kernels and sampled verification of the structural statements
//! about kernels whose ball is a Pick body.
//!
//! A kernel `K` on `n` points is extremal when every boundary point of every
//! restricted ball `D_{K_I}` is the projection of a point of `D_K`. Lifts are
//! found by maximizing `lambda_min((1 - w_i conj(w_j)) K(i, j))` over the free
//! coordinates. That function is concave in `w`: it is the minimum over unit
//! `u` of the concave quadratics
//!
//! ```text
//! q_u(w) = u* K u - || K^{1/2} diag(conj(w)) u ||^2,
//! ```
//!
//! so the tangent plane of `q_u` at any evaluated point, with `u` the bottom
//! eigenvector there, bounds the maximum from above. A lift failure is
//! reported as a counterexample only when such a bound is conclusively
//! negative.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::cara::{
    cara_distance, gen_cara_disc, gen_cara_lower_bound, pick_body_membership, DomainModel, DomainPoint,
    FeasibilityConfig, Membership,
};
use crate::error::{invalid, precondition, Result};
use crate::json;
use crate::kernel_ball::{
    boundary_scale, defect, membership, restrict, schur_scale, szego_recognition, Kernel, TupleIndex,
};
use crate::moebius::{mdist, DiscAutomorphism};
use crate::numlin::{c, hermitian_eigen, HermitianMatrix, ToleranceConfig, C64};
use crate::pick_disc::{solvable, szego_matrix, PickProblem};
use crate::sampling;

/// Result of a lift search.
#[derive(Debug, Clone, PartialEq)]
pub enum LiftOutcome {
    /// A full tuple in `D_K` projecting onto the boundary point.
    Lifted(Vec<C64>),
    /// No lift exists; `bound` is a certified upper bound on the Schur-scaled
    /// minimum eigenvalue over all completions and `best` the best value found.
    Refuted { best: f64, bound: f64 },
    /// The search neither found a lift nor excluded one.
    Undecided { best: f64, bound: f64 },
}

/// Default number of objective evaluations for one lift search.
pub const DEFAULT_LIFT_BUDGET: usize = 3000;

/// Searches for `w` in `D_K` with `pi_I(w) = w_sub`, where `w_sub` lies on
/// the boundary of `D_{K_I}`.
pub fn lift_boundary_point(
    k: &Kernel,
    index: &TupleIndex,
    w_sub: &[C64],
    budget: usize,
    tol: &ToleranceConfig,
) -> Result<Option<Vec<C64>>> {
    Ok(match lift_search(k, index, w_sub, budget, tol)? {
        LiftOutcome::Lifted(w) => Some(w),
        _ => None,
    })
}

/// Objective evaluation: Schur-scaled minimum eigenvalue (relative to the
/// tolerance scale) and the tangent-plane upper bound (absolute).
struct Probe {
    value: f64,
    bound: f64,
}

struct LiftProblem<'a> {
    k: &'a Kernel,
    fixed: Vec<(usize, C64)>,
    free: Vec<usize>,
    evaluations: usize,
}

impl LiftProblem<'_> {
    fn assemble(&self, x: &[C64]) -> Vec<C64> {
        let mut w = vec![c(0.0, 0.0); self.k.dim()];
        for &(i, v) in &self.fixed {
            w[i] = v;
        }
        for (&f, &v) in self.free.iter().zip(x) {
            w[f] = v;
        }
        w
    }

    fn probe(&mut self, x: &[C64]) -> Result<Probe> {
        self.evaluations += 1;
        let w = self.assemble(x);
        let s = schur_scale(self.k, &w)?;
        let e = hermitian_eigen(&s)?;
        let lo = e.min();
        let u = e.vector(0);
        // Gradient of q_u in each free coordinate: dq = Re(conj(g_f) dw_f).
        let n = self.k.dim();
        let v: Vec<C64> = (0..n).map(|j| w[j].conj() * u[j]).collect();
        let mut slack = 0.0;
        for (&f, &xf) in self.free.iter().zip(x) {
            let kv: C64 = (0..n).map(|j| self.k.get(f, j) * v[j]).sum();
            let g = -2.0 * u[f] * kv.conj();
            slack += g.norm() - (g.conj() * xf).re;
        }
        Ok(Probe {
            value: lo / s.tolerance_scale(),
            bound: lo + slack.max(0.0),
        })
    }
}

fn clamp_disc(z: C64) -> C64 {
    let r = z.norm();
    if r > 1.0 {
        z / r
    } else {
        z
    }
}

/// Lift search with a three-way outcome.
///
/// Starts from the completion forced by null vectors of the restricted
/// Schur-scaled matrix, then a coarse 17-point grid per free coordinate
/// (origin plus eight angles at radii 0.5 and 0.95), then compass searches
/// from eight starts.
pub fn lift_search(
    k: &Kernel,
    index: &TupleIndex,
    w_sub: &[C64],
    budget: usize,
    tol: &ToleranceConfig,
) -> Result<LiftOutcome> {
    let n = k.dim();
    if w_sub.len() != index.len() {
        return invalid(format!(
            "boundary point has {} entries for a tuple of size {}",
            w_sub.len(),
            index.len()
        ));
    }
    let sub = restrict(k, index)?;
    let report = defect(&sub, w_sub, tol)?;
    if !report.boundary {
        return precondition(format!(
            "the point is not on the boundary of the restricted ball: ||T|| = {}",
            report.operator_norm
        ));
    }
    let free = index.complement(n);
    let fixed: Vec<(usize, C64)> = index.indices().iter().copied().zip(w_sub.iter().copied()).collect();
    let mut lp = LiftProblem {
        k,
        fixed,
        free: free.clone(),
        evaluations: 0,
    };
    if free.is_empty() {
        let w = lp.assemble(&[]);
        return Ok(if membership(k, &w, tol)? {
            LiftOutcome::Lifted(w)
        } else {
            let p = lp.probe(&[])?;
            LiftOutcome::Refuted {
                best: p.value,
                bound: p.bound,
            }
        });
    }

    let threshold = -tol.psd_tol;
    // A completion is a lift iff its unscaled minimum eigenvalue reaches
    // -psd_tol * scale, and the scale never exceeds this value.
    let max_scale = (2.0 * k.matrix().max_abs()).max(1.0);
    let refute_level = -10.0 * tol.psd_tol * max_scale;

    let mut best_x = forced_completion(k, index, w_sub, &free, tol)?;
    let mut best = lp.probe(&best_x)?;
    let mut bound = best.bound;
    let succeed = |lp: &LiftProblem, x: &[C64]| -> Result<Option<LiftOutcome>> {
        let w = lp.assemble(x);
        Ok(membership(k, &w, tol)?.then_some(LiftOutcome::Lifted(w)))
    };
    if best.value >= threshold {
        if let Some(out) = succeed(&lp, &best_x)? {
            return Ok(out);
        }
    }

    let mut starts: Vec<Vec<C64>> = vec![best_x.clone(), vec![c(0.0, 0.0); free.len()]];

    // Coordinate-wise coarse grid.
    let mut grid = vec![c(0.0, 0.0)];
    for radius in [0.5, 0.95] {
        for a in 0..8 {
            grid.push(C64::from_polar(radius, std::f64::consts::TAU * a as f64 / 8.0));
        }
    }
    let mut x = best_x.clone();
    let mut current = lp.probe(&x)?;
    for _pass in 0..2 {
        for slot in 0..free.len() {
            for &g in &grid {
                if lp.evaluations >= budget {
                    break;
                }
                let mut trial = x.clone();
                trial[slot] = g;
                let p = lp.probe(&trial)?;
                bound = bound.min(p.bound);
                if p.value > current.value {
                    x = trial;
                    current = p;
                }
            }
        }
    }
    if current.value > best.value {
        best = current;
        best_x = x.clone();
    }
    if best.value >= threshold {
        if let Some(out) = succeed(&lp, &best_x)? {
            return Ok(out);
        }
    }
    starts.push(x);
    let mut rng = sampling::rng(0x11f7 ^ (n as u64) ^ ((index.len() as u64) << 8));
    while starts.len() < 8 {
        starts.push((0..free.len()).map(|_| sampling::disc_point(&mut rng, 0.9)).collect());
    }

    // Compass search over the real coordinates of the free entries.
    let per_start = (budget.saturating_sub(lp.evaluations) / starts.len()).max(1);
    for start in starts {
        let stop_at = lp.evaluations + per_start;
        let mut x = start;
        let mut cur = lp.probe(&x)?;
        bound = bound.min(cur.bound);
        let mut step = 0.25;
        while step > 1e-12 && lp.evaluations < stop_at.min(budget.max(stop_at)) {
            let mut moved = false;
            for slot in 0..free.len() {
                for dir in [c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0)] {
                    let mut trial = x.clone();
                    trial[slot] = clamp_disc(trial[slot] + dir * step);
                    let p = lp.probe(&trial)?;
                    bound = bound.min(p.bound);
                    if p.value > cur.value {
                        x = trial;
                        cur = p;
                        moved = true;
                    }
                }
            }
            if !moved {
                step *= 0.5;
            }
            if cur.value >= threshold {
                break;
            }
        }
        if cur.value > best.value {
            best = cur;
            best_x = x;
        }
        if best.value >= threshold {
            if let Some(out) = succeed(&lp, &best_x)? {
                return Ok(out);
            }
        }
        if bound < refute_level {
            break;
        }
    }
    Ok(if bound < refute_level {
        LiftOutcome::Refuted {
            best: best.value,
            bound,
        }
    } else {
        LiftOutcome::Undecided {
            best: best.value,
            bound,
        }
    })
}

/// Free coordinates forced by the kernel of the restricted Schur-scaled
/// matrix. For a PSD completion, a null vector `v` of the restricted block
/// must also annihilate the new rows: `sum_i (1 - w_f conj(w_i)) K(f, i) v_i = 0`.
/// Coordinates left unconstrained start at zero.
fn forced_completion(
    k: &Kernel,
    index: &TupleIndex,
    w_sub: &[C64],
    free: &[usize],
    tol: &ToleranceConfig,
) -> Result<Vec<C64>> {
    let sub = restrict(k, index)?;
    let s = schur_scale(&sub, w_sub)?;
    let e = hermitian_eigen(&s)?;
    let cut = tol.rank_tol * s.tolerance_scale();
    let nulls: Vec<Vec<C64>> = (0..e.values.len())
        .filter(|&t| e.values[t] <= cut)
        .map(|t| e.vector(t))
        .collect();
    let idx = index.indices();
    let kscale = k.matrix().max_abs();
    Ok(free
        .iter()
        .map(|&f| {
            let mut num = c(0.0, 0.0);
            let mut den = 0.0;
            for v in &nulls {
                let a: C64 = idx.iter().zip(v).map(|(&i, &vi)| k.get(f, i) * vi).sum();
                let b: C64 = idx
                    .iter()
                    .zip(v)
                    .zip(w_sub)
                    .map(|((&i, &vi), wi)| wi.conj() * k.get(f, i) * vi)
                    .sum();
                num += b.conj() * a;
                den += b.norm_sqr();
            }
            if den.sqrt() > 1e-6 * kscale {
                clamp_disc(num / den)
            } else {
                c(0.0, 0.0)
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiftWitness {
    pub index: TupleIndex,
    pub boundary_point: Vec<C64>,
    pub lift: Vec<C64>,
    /// Whether the lift lies on the boundary of `D_K` within `boundary_tol`.
    pub on_boundary: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiftFailure {
    pub index: TupleIndex,
    pub boundary_point: Vec<C64>,
    /// Best Schur-scaled minimum eigenvalue found over the completions.
    pub best: f64,
    /// Certified upper bound on the unscaled minimum eigenvalue.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalVerdict {
    pub extremal: bool,
    pub checked_tuples: Vec<TupleIndex>,
    pub witnesses: Vec<LiftWitness>,
    pub counterexamples: Vec<LiftFailure>,
    pub undecided: Vec<LiftFailure>,
}

/// Sampled extremality test.
///
/// For every proper subtuple `I`, `samples_per_tuple` boundary points of
/// `D_{K_I}` are drawn (random directions scaled by the boundary scale) and
/// lifted. Counterexamples are conclusive; success is evidence.
pub fn verify_extremal(
    k: &Kernel,
    samples_per_tuple: usize,
    seed: u64,
    budget: usize,
    tol: &ToleranceConfig,
) -> Result<ExtremalVerdict> {
    let n = k.dim();
    let mut rng = sampling::rng(seed);
    let mut verdict = ExtremalVerdict {
        extremal: true,
        checked_tuples: Vec::new(),
        witnesses: Vec::new(),
        counterexamples: Vec::new(),
        undecided: Vec::new(),
    };
    for index in TupleIndex::all_proper(n) {
        let sub = restrict(k, &index)?;
        for _ in 0..samples_per_tuple {
            let u = sampling::direction(&mut rng, index.len());
            let r = boundary_scale(&sub, &u)?;
            let w_sub: Vec<C64> = u.iter().map(|z| z * r).collect();
            match lift_search(k, &index, &w_sub, budget, tol)? {
                LiftOutcome::Lifted(lift) => {
                    let on_boundary = defect(k, &lift, tol)?.boundary;
                    verdict.witnesses.push(LiftWitness {
                        index: index.clone(),
                        boundary_point: w_sub,
                        lift,
                        on_boundary,
                    });
                }
                LiftOutcome::Refuted { best, bound } => verdict.counterexamples.push(LiftFailure {
                    index: index.clone(),
                    boundary_point: w_sub,
                    best,
                    bound,
                }),
                LiftOutcome::Undecided { best, bound } => verdict.undecided.push(LiftFailure {
                    index: index.clone(),
                    boundary_point: w_sub,
                    best,
                    bound,
                }),
            }
        }
        verdict.checked_tuples.push(index);
    }
    verdict.extremal = verdict.counterexamples.is_empty() && verdict.undecided.is_empty();
    Ok(verdict)
}

/// A named pass/fail check with its numerical residual.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub residual: f64,
}

impl Check {
    fn new(name: &str, pass: bool, residual: f64) -> Self {
        let residual = if residual.is_finite() { residual } else { f64::MAX };
        Check {
            name: name.to_string(),
            pass,
            residual,
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct TheoremReport {
    pub theorem: String,
    pub hypotheses: Vec<Check>,
    /// Empty when some hypothesis failed.
    pub conclusion: Vec<Check>,
    pub conclusion_evaluated: bool,
    pub instance: Value,
    /// Number of random samples consumed by sampled checks.
    pub samples: usize,
}

impl TheoremReport {
    fn new(theorem: &str, instance: Value) -> Self {
        TheoremReport {
            theorem: theorem.to_string(),
            hypotheses: Vec::new(),
            conclusion: Vec::new(),
            conclusion_evaluated: false,
            instance,
            samples: 0,
        }
    }

    pub fn hypotheses_hold(&self) -> bool {
        self.hypotheses.iter().all(|h| h.pass)
    }

    /// Hypotheses hold and every conclusion check passed.
    pub fn passed(&self) -> bool {
        self.hypotheses_hold() && self.conclusion_evaluated && self.conclusion.iter().all(|c| c.pass)
    }

    pub fn conclusion_residual(&self) -> f64 {
        self.conclusion.iter().fold(0.0, |m, c| m.max(c.residual))
    }
}

/// Settings shared by the theorem checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub tol: ToleranceConfig,
    pub feasibility: FeasibilityConfig,
    /// Boundary samples per subtuple in sampled extremality checks.
    pub extremal_samples: usize,
    /// Tuples drawn in sampled body comparisons.
    pub cross_samples: usize,
    pub lift_budget: usize,
    pub seed: u64,
    /// Tolerance for distance conditions and numerical identities.
    pub match_tol: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            tol: ToleranceConfig::default(),
            feasibility: FeasibilityConfig::default(),
            extremal_samples: 20,
            cross_samples: 1000,
            lift_budget: DEFAULT_LIFT_BUDGET,
            seed: 0,
            match_tol: 1e-7,
        }
    }
}

fn instance(k: Option<&Kernel>, z: &[DomainPoint], alpha: Option<&[C64]>) -> Value {
    let pts: Vec<Vec<C64>> = z.iter().map(|p| p.coords().to_vec()).collect();
    json!({
        "kernel": k.map(|k| json::matrix(k.matrix())),
        "points": json::points(&pts),
        "alpha": alpha.map(json::complexes),
    })
}

fn check_config(d: &DomainModel, z: &[DomainPoint], n: usize) -> Result<()> {
    if z.len() != n {
        return invalid(format!("{} points for a {}-node kernel", z.len(), n));
    }
    for p in z {
        if p.coords().len() != d.dim() {
            return invalid("point dimension does not match the domain");
        }
    }
    Ok(())
}

fn unit_diagonal(k: &Kernel) -> Check {
    let dev = (0..k.dim()).fold(0.0f64, |m, i| m.max((k.get(i, i).re - 1.0).abs()));
    Check::new("unit diagonal", k.is_normalized(), dev)
}

/// `|K(i, j)| = sqrt(1 - c*(z_i, z_j)^2)` for all pairs of a normalized kernel.
///
/// Extremality of `K` and `D_K = D_Omega(z)` are preconditions of the
/// identity; they are not re-checked here.
pub fn entry_modulus_check(k: &Kernel, d: &DomainModel, z: &[DomainPoint], tol: f64) -> Result<TheoremReport> {
    check_config(d, z, k.dim())?;
    let mut report = TheoremReport::new("entry-modulus", instance(Some(k), z, None));
    report.hypotheses.push(unit_diagonal(k));
    if !report.hypotheses_hold() {
        return Ok(report);
    }
    let n = k.dim();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            let cs = cara_distance(d, &z[i], &z[j])?;
            worst = worst.max((k.get(i, j).norm() - (1.0 - cs * cs).max(0.0).sqrt()).abs());
        }
    }
    report.conclusion.push(Check::new("entry moduli", worst <= tol, worst));
    report.conclusion_evaluated = true;
    Ok(report)
}

/// Membership threshold of `(0, .., mu, .., 0)` in `D_K` by bisection on `|mu|`.
pub fn axis_threshold(k: &Kernel, position: usize, tol: &ToleranceConfig) -> Result<f64> {
    let n = k.dim();
    if position >= n {
        return invalid(format!("position {position} out of range"));
    }
    let tuple = |mu: f64| {
        let mut w = vec![c(0.0, 0.0); n];
        w[position] = c(mu, 0.0);
        w
    };
    if membership(k, &tuple(1.0), tol)? {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        if membership(k, &tuple(mid), tol)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Compares the axis threshold at `position` with the generalized
/// Caratheodory function of `z_position` with zeros at the other points:
/// equality on the disc, a one-sided bound on the polydisc.
pub fn axis_point_check(
    k: &Kernel,
    d: &DomainModel,
    z: &[DomainPoint],
    position: usize,
    tol: f64,
    cfg: &VerifyConfig,
) -> Result<TheoremReport> {
    check_config(d, z, k.dim())?;
    if position >= z.len() {
        return invalid(format!("position {position} out of range"));
    }
    let mut report = TheoremReport::new("axis-point", instance(Some(k), z, None));
    let zero_member = membership(k, &vec![c(0.0, 0.0); k.dim()], &cfg.tol)?;
    report.hypotheses.push(Check::new("zero tuple is a member", zero_member, 0.0));
    if !report.hypotheses_hold() {
        return Ok(report);
    }
    let threshold = axis_threshold(k, position, &cfg.tol)?;
    let zeros: Vec<DomainPoint> = z
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != position)
        .map(|(_, p)| p.clone())
        .collect();
    let check = match d {
        DomainModel::Disc => {
            let exact = gen_cara_disc(
                z[position].coords()[0],
                &zeros.iter().map(|p| p.coords()[0]).collect::<Vec<_>>(),
            );
            let r = (threshold - exact).abs();
            Check::new("threshold equals generalized Caratheodory value", r <= tol, r)
        }
        DomainModel::Polydisc { .. } => {
            let lb = gen_cara_lower_bound(d, &z[position], &zeros, cfg.lift_budget)?;
            let r = (lb - threshold).max(0.0);
            Check::new("threshold dominates certified lower bound", r <= tol, r)
        }
    };
    report.conclusion.push(check);
    report.conclusion_evaluated = true;
    Ok(report)
}

/// Draws tuples around the boundary of `D_K`: a random direction scaled to
/// the boundary and then by `1 +- t`, `t` uniform in `[1e-3, 0.1)`.
fn straddling_tuple(k: &Kernel, rng: &mut ChaCha8Rng) -> Result<Vec<C64>> {
    let u = sampling::direction(rng, k.dim());
    let r = boundary_scale(k, &u)?;
    let t = sampling::uniform(rng, 1e-3, 0.1);
    let t = if rng.gen::<bool>() { 1.0 + t } else { 1.0 - t };
    Ok(u.iter().map(|z| z * (r * t)).collect())
}

fn disc_pick_member(nodes: &[C64], w: &[C64], tol: &ToleranceConfig) -> Result<bool> {
    if w.iter().any(|v| v.norm() > 1.0 + 1e-12) {
        return Ok(false);
    }
    Ok(solvable(&PickProblem::new(nodes.to_vec(), w.to_vec())?, tol))
}

/// Fraction of straddling samples on which `D_K` and the disc Pick body at
/// `alpha` disagree.
fn cross_membership_disagreement(
    k: &Kernel,
    alpha: &[C64],
    samples: usize,
    rng: &mut ChaCha8Rng,
    tol: &ToleranceConfig,
) -> Result<f64> {
    let mut bad = 0usize;
    for _ in 0..samples {
        let w = straddling_tuple(k, rng)?;
        if membership(k, &w, tol)? != disc_pick_member(alpha, &w, tol)? {
            bad += 1;
        }
    }
    Ok(bad as f64 / samples.max(1) as f64)
}

/// Sampled comparison of `D_K` with the domain Pick body `D_Omega(z)`.
/// Undecided domain verdicts count as disagreements.
fn body_equality(
    k: &Kernel,
    d: &DomainModel,
    z: &[DomainPoint],
    samples: usize,
    rng: &mut ChaCha8Rng,
    cfg: &VerifyConfig,
) -> Result<Check> {
    let mut bad = 0usize;
    for _ in 0..samples {
        let w = straddling_tuple(k, rng)?;
        let in_k = membership(k, &w, &cfg.tol)?;
        let in_body = pick_body_membership(d, z, &w, &cfg.tol, &cfg.feasibility)?;
        let agree = matches!(
            (in_k, in_body),
            (true, Membership::Member) | (false, Membership::NonMember)
        );
        if !agree {
            bad += 1;
        }
    }
    let frac = bad as f64 / samples.max(1) as f64;
    Ok(Check::new("kernel ball equals Pick body (sampled)", bad == 0, frac))
}

fn extremal_check(k: &Kernel, cfg: &VerifyConfig) -> Result<Check> {
    let v = verify_extremal(k, cfg.extremal_samples, cfg.seed, cfg.lift_budget, &cfg.tol)?;
    let failures = (v.counterexamples.len() + v.undecided.len()) as f64;
    Ok(Check::new("extremal (sampled)", v.extremal, failures))
}

fn pairwise_min_separation(alpha: &[C64]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..alpha.len() {
        for j in (i + 1)..alpha.len() {
            best = best.min((alpha[i] - alpha[j]).norm());
        }
    }
    best
}

fn interior(alpha: &[C64]) -> Check {
    let worst = alpha.iter().fold(0.0f64, |m, a| m.max(a.norm()));
    Check::new("alpha in the open polydisc", worst < 1.0, worst)
}

/// Three-point bound: `c*(z_3; z_1, z_2)` is at least
/// `max_j sqrt((c*(z_j, z_3)^2 - m(a_j, a_3)^2) / (1 - m(a_j, a_3)^2))`
/// for a boundary point `alpha` of an extremal kernel ball equal to the Pick
/// body with `m(a_1, a_2) = c*(z_1, z_2)`. Also checks that the two ratios
/// `sqrt(1 - c*(z_j, z_3)^2) / sqrt(1 - m(a_j, a_3)^2)` agree.
pub fn theorem3_check(
    k: &Kernel,
    d: &DomainModel,
    z: &[DomainPoint],
    alpha: &[C64],
    cfg: &VerifyConfig,
) -> Result<TheoremReport> {
    if k.dim() != 3 || alpha.len() != 3 {
        return invalid("the three-point check needs a 3-node kernel and three values");
    }
    check_config(d, z, 3)?;
    let mut rng = sampling::rng(cfg.seed);
    let mut report = TheoremReport::new("3", instance(Some(k), z, Some(alpha)));
    report.hypotheses.push(unit_diagonal(k));
    report.hypotheses.push(interior(alpha));
    if !report.hypotheses_hold() {
        return Ok(report);
    }
    let def = defect(k, alpha, &cfg.tol)?;
    report.hypotheses.push(Check::new(
        "alpha on the boundary of the kernel ball",
        def.boundary,
        (def.operator_norm - 1.0).abs(),
    ));
    let c12 = cara_distance(d, &z[0], &z[1])?;
    let gap = (mdist(alpha[0], alpha[1]) - c12).abs();
    report.hypotheses.push(Check::new("m(a1, a2) = c*(z1, z2)", gap <= cfg.match_tol, gap));
    report.hypotheses.push(extremal_check(k, cfg)?);
    report.hypotheses.push(body_equality(k, d, z, cfg.cross_samples, &mut rng, cfg)?);
    report.samples = cfg.cross_samples + 6 * cfg.extremal_samples;
    if !report.hypotheses_hold() {
        return Ok(report);
    }

    let mut rhs = 0.0f64;
    let mut mus = [0.0f64; 2];
    for j in 0..2 {
        let cs = cara_distance(d, &z[j], &z[2])?;
        let m = mdist(alpha[j], alpha[2]);
        let ratio = ((cs * cs - m * m) / (1.0 - m * m)).max(0.0);
        rhs = rhs.max(ratio.sqrt());
        mus[j] = (1.0 - cs * cs).max(0.0).sqrt() / (1.0 - m * m).sqrt();
    }
    let zeros = [z[0].clone(), z[1].clone()];
    let (value, label) = match d {
        DomainModel::Disc => (
            gen_cara_disc(z[2].coords()[0], &[z[0].coords()[0], z[1].coords()[0]]),
            "generalized Caratheodory value bounds the right-hand side",
        ),
        DomainModel::Polydisc { .. } => (
            gen_cara_lower_bound(d, &z[2], &zeros, cfg.lift_budget)?,
            "certified lower bound dominates the right-hand side (one-sided)",
        ),
    };
    let shortfall = (rhs - value).max(0.0);
    report.conclusion.push(Check::new(label, shortfall <= cfg.match_tol, shortfall));
    report.conclusion.push(Check::new("right-hand side", true, rhs));
    let spread = (mus[0] - mus[1]).abs();
    report.conclusion.push(Check::new("mu consistency", spread <= cfg.match_tol, spread));
    report.conclusion_evaluated = true;
    Ok(report)
}

/// A bidisc configuration scored against the three-point hypotheses.
#[derive(Debug, Clone, PartialEq)]
pub struct Theorem3Candidate {
    pub points: Vec<DomainPoint>,
    /// Coordinate whose normalized Szego kernel is the candidate `K`.
    pub coordinate: usize,
    pub alpha: Vec<C64>,
    /// Largest pairwise excess `c*(z_i, z_j) - m(z^k_i, z^k_j)`; zero when the
    /// coordinate ball can equal the Pick body pairwise.
    pub hypothesis_gap: f64,
    pub rhs: f64,
    pub lower_bound: f64,
}

/// Scans random bidisc configurations. Each coordinate Szego kernel is
/// paired with the boundary point given by a random automorphism image of
/// that coordinate; candidates are returned sorted by how nearly they meet
/// the hypotheses. Nothing is asserted about their existence.
pub fn theorem3_search(trials: usize, seed: u64, budget: usize) -> Result<Vec<Theorem3Candidate>> {
    let d = DomainModel::polydisc(2)?;
    let mut rng = sampling::rng(seed);
    let mut out = Vec::new();
    for _ in 0..trials {
        let coords: Vec<Vec<C64>> = (0..2)
            .map(|_| sampling::distinct_disc_points(&mut rng, 3, 0.8, 0.05))
            .collect();
        let points: Vec<DomainPoint> = (0..3)
            .map(|i| DomainPoint::new(vec![coords[0][i], coords[1][i]]))
            .collect::<Result<_>>()?;
        let phi = sampling::automorphism(&mut rng, 0.5);
        for (kk, nodes) in coords.iter().enumerate() {
            let alpha: Vec<C64> = nodes.iter().map(|&x| phi.apply(x)).collect();
            let mut gap = 0.0f64;
            for i in 0..3 {
                for j in (i + 1)..3 {
                    gap = gap.max(cara_distance(&d, &points[i], &points[j])? - mdist(nodes[i], nodes[j]));
                }
            }
            let mut rhs = 0.0f64;
            for j in 0..2 {
                let cs = cara_distance(&d, &points[j], &points[2])?;
                let m = mdist(alpha[j], alpha[2]);
                rhs = rhs.max(((cs * cs - m * m) / (1.0 - m * m)).max(0.0).sqrt());
            }
            let lower_bound = gen_cara_lower_bound(&d, &points[2], &points[..2], budget)?;
            out.push(Theorem3Candidate {
                points: points.clone(),
                coordinate: kk,
                alpha,
                hypothesis_gap: gap,
                rhs,
                lower_bound,
            });
        }
    }
    out.sort_by(|a, b| a.hypothesis_gap.total_cmp(&b.hypothesis_gap));
    Ok(out)
}

/// For a 3-point kernel and a boundary point `alpha` in the open tridisc
/// with at least two pairs on the boundaries of the restricted balls:
/// the coordinates of `alpha` are distinct and `D_K = D_D(alpha)`.
pub fn theorem2_pipeline(
    k: &Kernel,
    d: &DomainModel,
    z: &[DomainPoint],
    alpha: &[C64],
    cfg: &VerifyConfig,
) -> Result<TheoremReport> {
    if k.dim() != 3 || alpha.len() != 3 {
        return invalid("the pipeline needs a 3-node kernel and three values");
    }
    check_config(d, z, 3)?;
    let mut rng = sampling::rng(cfg.seed);
    let mut report = TheoremReport::new("2", instance(Some(k), z, Some(alpha)));
    report.hypotheses.push(interior(alpha));
    if !report.hypotheses_hold() {
        return Ok(report);
    }
    let def = defect(k, alpha, &cfg.tol)?;
    report.hypotheses.push(Check::new(
        "alpha on the boundary of the kernel ball",
        def.boundary,
        (def.operator_norm - 1.0).abs(),
    ));
    let flags = pair_flags(k, alpha, &cfg.tol)?;
    let on = flags.iter().filter(|f| **f).count();
    report
        .hypotheses
        .push(Check::new("at least two pairs on restricted boundaries", on >= 2, on as f64));
    report.hypotheses.push(body_equality(k, d, z, cfg.cross_samples, &mut rng, cfg)?);
    report.samples = cfg.cross_samples;
    if !report.hypotheses_hold() {
        return Ok(report);
    }

    let sep = pairwise_min_separation(alpha);
    report.conclusion.push(Check::new("alpha coordinates distinct", sep > 1e-9, sep));
    let normalized = k.normalize();
    let form = szego_recognition(&normalized, &cfg.tol)?;
    report.conclusion.push(match &form {
        Some(f) => Check::new("Szego recognition", true, f.residual),
        None => Check::new("Szego recognition", false, 1.0),
    });
    if sep > 1e-9 {
        let frac = cross_membership_disagreement(k, alpha, cfg.cross_samples, &mut rng, &cfg.tol)?;
        report
            .conclusion
            .push(Check::new("kernel ball equals disc Pick body at alpha (sampled)", frac == 0.0, frac));
        report.samples += cfg.cross_samples;
    }
    report.conclusion_evaluated = true;
    Ok(report)
}

/// Which pairs `(0,1), (0,2), (1,2)` of `alpha` lie on the boundary of the
/// corresponding restricted ball.
pub fn pair_flags(k: &Kernel, alpha: &[C64], tol: &ToleranceConfig) -> Result<Vec<bool>> {
    let n = k.dim();
    let mut flags = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let idx = TupleIndex::new(vec![i, j], n)?;
            let sub = restrict(k, &idx)?;
            let pair = [alpha[i], alpha[j]];
            let on = match boundary_scale(&sub, &pair) {
                Ok(r) => (r - 1.0).abs() <= tol.boundary_tol,
                Err(_) => false,
            };
            flags.push(on);
        }
    }
    Ok(flags)
}

/// For an extremal normalized kernel whose ball is the Pick body and a
/// point `alpha` of the ball with `m(a_1, a_j) = c*(z_1, z_j)` for all `j`:
/// `K` is a Szego kernel whose nodes are automorphism-equivalent to `alpha`
/// and `D_K = D_D(alpha)`.
pub fn theorem4_pipeline(
    k: &Kernel,
    d: &DomainModel,
    z: &[DomainPoint],
    alpha: &[C64],
    cfg: &VerifyConfig,
) -> Result<TheoremReport> {
    let n = k.dim();
    if alpha.len() != n || n < 2 {
        return invalid("alpha must have one value per kernel node");
    }
    check_config(d, z, n)?;
    let mut rng = sampling::rng(cfg.seed);
    let mut report = TheoremReport::new("4", instance(Some(k), z, Some(alpha)));
    report.hypotheses.push(unit_diagonal(k));
    report.hypotheses.push(interior(alpha));
    if !report.hypotheses_hold() {
        return Ok(report);
    }
    let inside = membership(k, alpha, &cfg.tol)?;
    report.hypotheses.push(Check::new("alpha in the kernel ball", inside, 0.0));
    let mut gap = 0.0f64;
    let mut modulus_gap = 0.0f64;
    for j in 1..n {
        let cs = cara_distance(d, &z[0], &z[j])?;
        gap = gap.max((mdist(alpha[0], alpha[j]) - cs).abs());
        modulus_gap = modulus_gap.max((k.get(0, j).norm() - (1.0 - cs * cs).max(0.0).sqrt()).abs());
    }
    report
        .hypotheses
        .push(Check::new("m(a1, aj) = c*(z1, zj)", gap <= cfg.match_tol, gap));
    report.hypotheses.push(Check::new(
        "first-row moduli match c*",
        modulus_gap <= cfg.match_tol,
        modulus_gap,
    ));
    if !report.hypotheses_hold() {
        return Ok(report);
    }
    report.hypotheses.push(extremal_check(k, cfg)?);
    report.hypotheses.push(body_equality(k, d, z, cfg.cross_samples, &mut rng, cfg)?);
    report.samples = cfg.cross_samples;
    if !report.hypotheses_hold() {
        return Ok(report);
    }

    match szego_recognition(k, &cfg.tol)? {
        Some(form) => {
            report.conclusion.push(Check::new("Szego recognition", true, form.residual));
            let mut worst = 0.0f64;
            for i in 0..n {
                for j in (i + 1)..n {
                    worst = worst.max((mdist(form.alpha[i], form.alpha[j]) - mdist(alpha[i], alpha[j])).abs());
                }
            }
            report.conclusion.push(Check::new(
                "recovered nodes automorphism-equivalent to alpha",
                worst <= cfg.match_tol,
                worst,
            ));
        }
        None => report.conclusion.push(Check::new("Szego recognition", false, 1.0)),
    }
    let sep = pairwise_min_separation(alpha);
    if sep > 1e-12 {
        let frac = cross_membership_disagreement(k, alpha, cfg.cross_samples, &mut rng, &cfg.tol)?;
        report
            .conclusion
            .push(Check::new("kernel ball equals disc Pick body at alpha (sampled)", frac == 0.0, frac));
        report.samples += cfg.cross_samples;
    } else {
        report.conclusion.push(Check::new("alpha coordinates distinct", false, sep));
    }
    report.conclusion_evaluated = true;
    Ok(report)
}

/// Desk-scale check of the intersection description of the Pick body.
///
/// Disc: the Szego kernel ball and the Pick body agree on sampled tuples.
/// Polydisc: sampled admissible kernels contain every sampled member, and
/// `admissible_separation` excludes sampled non-members.
pub fn theorem1_check(d: &DomainModel, z: &[DomainPoint], cfg: &VerifyConfig) -> Result<TheoremReport> {
    let n = z.len();
    if n == 0 {
        return invalid("at least one point is required");
    }
    check_config(d, z, n)?;
    let mut rng = sampling::rng(cfg.seed);
    let mut report = TheoremReport::new("1", instance(None, z, None));
    let distinct = {
        let mut ok = true;
        for i in 0..n {
            for j in (i + 1)..n {
                ok &= z[i]
                    .coords()
                    .iter()
                    .zip(z[j].coords())
                    .any(|(a, b)| (a - b).norm() > 1e-12);
            }
        }
        ok
    };
    report.hypotheses.push(Check::new("points distinct", distinct, 0.0));
    if !distinct {
        return Ok(report);
    }
    let coords: Vec<Vec<C64>> = (0..d.dim()).map(|k| crate::cara::coordinate_nodes(z, k)).collect();
    let szegos: Vec<HermitianMatrix> = coords.iter().map(|x| szego_matrix(x)).collect::<Result<_>>()?;
    let product = szegos[1..].iter().fold(szegos[0].clone(), |acc, s| acc.hadamard(s));
    let sample_kernel = Kernel::new(product.clone(), &ToleranceConfig { psd_tol: 0.0, ..cfg.tol })?;

    // Sample tuples straddling the boundary of the largest coordinate ball.
    let mut members = Vec::new();
    let mut non_members = Vec::new();
    let mut undecided = 0usize;
    for _ in 0..cfg.cross_samples {
        let w = straddling_tuple(&sample_kernel, &mut rng)?;
        match pick_body_membership(d, z, &w, &cfg.tol, &cfg.feasibility)? {
            Membership::Member => members.push(w),
            Membership::NonMember => non_members.push(w),
            Membership::Undecided => undecided += 1,
        }
    }
    report.samples = cfg.cross_samples;

    if let DomainModel::Disc = d {
        let k = Kernel::new(szegos[0].clone(), &ToleranceConfig { psd_tol: 0.0, ..cfg.tol })?;
        let mut bad = 0usize;
        for (w, expected) in members.iter().map(|w| (w, true)).chain(non_members.iter().map(|w| (w, false))) {
            if membership(&k, w, &cfg.tol)? != expected {
                bad += 1;
            }
        }
        report
            .conclusion
            .push(Check::new("Szego kernel ball reproduces the Pick body", bad == 0, bad as f64));
        report.conclusion_evaluated = true;
        return Ok(report);
    }

    // Intersection inclusion over sampled admissible kernels.
    let mut kernels: Vec<HermitianMatrix> = szegos
        .iter()
        .filter(|s| crate::cara::admissible(s, z, &cfg.tol))
        .cloned()
        .collect();
    kernels.push(product.clone());
    for _ in 0..20 {
        kernels.push(product.hadamard(&sampling::pd_matrix(&mut rng, n, 1e-3)));
    }
    let mut violations = 0usize;
    for g in &kernels {
        let k = Kernel::new(g.clone(), &ToleranceConfig { psd_tol: 0.0, ..cfg.tol })?;
        for w in &members {
            if !membership(&k, w, &cfg.tol)? {
                violations += 1;
            }
        }
    }
    report.conclusion.push(Check::new(
        "admissible kernel balls contain every member",
        violations == 0,
        violations as f64,
    ));
    let mut separated = 0usize;
    for (t, w) in non_members.iter().enumerate() {
        let found = crate::cara::admissible_separation(
            d,
            z,
            w,
            cfg.lift_budget.min(200),
            cfg.seed.wrapping_add(t as u64),
            &cfg.tol,
            &cfg.feasibility,
        )?;
        if found.is_some() {
            separated += 1;
        }
    }
    let rate = if non_members.is_empty() {
        1.0
    } else {
        separated as f64 / non_members.len() as f64
    };
    report
        .conclusion
        .push(Check::new("non-members separated by an admissible kernel", rate >= 0.99, 1.0 - rate));
    report.conclusion.push(Check::new(
        "undecided memberships",
        true,
        undecided as f64 / cfg.cross_samples.max(1) as f64,
    ));
    report.conclusion_evaluated = true;
    Ok(report)
}

/// Boundary point `phi(z)` of the Szego ball for a disc automorphism `phi`.
pub fn automorphism_image(phi: &DiscAutomorphism, z: &[C64]) -> Vec<C64> {
    z.iter().map(|&x| phi.apply(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel_ball::szego_kernel;
    use crate::pick_disc::extend_values;

    fn r(x: f64) -> C64 {
        c(x, 0.0)
    }

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn disc_points(xs: &[C64]) -> Vec<DomainPoint> {
        xs.iter().map(|&x| DomainPoint::disc(x).unwrap()).collect()
    }

    #[test]
    fn tangent_bound_dominates_objective() {
        let k = szego_kernel(&[r(0.0), r(0.5), c(0.1, -0.6)], &[0.0, 0.4, -1.0]).unwrap();
        let mut lp = LiftProblem {
            k: &k,
            fixed: vec![(0, c(0.3, 0.1))],
            free: vec![1, 2],
            evaluations: 0,
        };
        let mut rng = sampling::rng(3);
        for _ in 0..200 {
            let x0: Vec<C64> = (0..2).map(|_| sampling::disc_point(&mut rng, 1.0)).collect();
            let bound = lp.probe(&x0).unwrap().bound;
            for _ in 0..20 {
                let y: Vec<C64> = (0..2).map(|_| sampling::disc_point(&mut rng, 1.0)).collect();
                let s = schur_scale(&k, &lp.assemble(&y)).unwrap();
                assert!(hermitian_eigen(&s).unwrap().min() <= bound + 1e-12);
            }
        }
    }

    #[test]
    fn szego_pair_lift_matches_blaschke_extension() {
        let nodes = [r(0.0), c(0.4, 0.2), c(-0.3, 0.5)];
        let k = Kernel::szego(&nodes).unwrap();
        let idx = TupleIndex::new(vec![0, 1], 3).unwrap();
        let sub = restrict(&k, &idx).unwrap();
        let u = [c(0.2, 0.1), c(-0.4, 0.3)];
        let s = boundary_scale(&sub, &u).unwrap();
        let w_sub: Vec<C64> = u.iter().map(|z| z * s).collect();
        let lift = lift_boundary_point(&k, &idx, &w_sub, DEFAULT_LIFT_BUDGET, &tol()).unwrap().unwrap();
        let p = PickProblem::new(nodes[..2].to_vec(), w_sub.clone()).unwrap();
        let ext = extend_values(&p, &[nodes[2]], &tol()).unwrap();
        assert!((lift[2] - ext[0]).norm() < 1e-7);
    }

    #[test]
    fn diagonal_and_full_lifts() {
        let k = Kernel::diagonal(&[1.0, 2.0, 0.5]).unwrap();
        let idx = TupleIndex::new(vec![0], 3).unwrap();
        let u = C64::from_polar(1.0, 0.7);
        let w = lift_boundary_point(&k, &idx, &[u], 100, &tol()).unwrap().unwrap();
        assert_eq!(w[0], u);

        let k = Kernel::szego(&[r(0.0), r(0.5)]).unwrap();
        let full = TupleIndex::full(2);
        let w = [r(0.0), r(0.5)];
        assert_eq!(lift_boundary_point(&k, &full, &w, 100, &tol()).unwrap().unwrap(), w.to_vec());
        assert!(matches!(
            lift_boundary_point(&k, &full, &[r(0.0), r(0.1)], 100, &tol()),
            Err(crate::Error::PreconditionViolation(_))
        ));
    }

    #[test]
    fn small_kernels_are_extremal() {
        let k = Kernel::diagonal(&[1.0, 1.0, 1.0]).unwrap();
        let v = verify_extremal(&k, 5, 1, DEFAULT_LIFT_BUDGET, &tol()).unwrap();
        assert!(v.extremal && v.counterexamples.is_empty());
        assert_eq!(v.checked_tuples.len(), 6);
        let k = Kernel::szego(&[r(0.0), r(0.5), c(0.0, -0.4)]).unwrap();
        let v = verify_extremal(&k, 5, 1, DEFAULT_LIFT_BUDGET, &tol()).unwrap();
        assert!(v.extremal, "{:?}", v.counterexamples);
        assert!(v.witnesses.iter().all(|w| w.on_boundary));
    }

    #[test]
    fn axis_thresholds() {
        let k = Kernel::szego(&[r(0.0), r(0.5)]).unwrap();
        assert!((axis_threshold(&k, 1, &tol()).unwrap() - 0.5).abs() < 1e-9);
        let k = Kernel::szego(&[r(0.5), r(0.0), r(-0.5)]).unwrap();
        assert!((axis_threshold(&k, 0, &tol()).unwrap() - 0.4).abs() < 1e-9);
    }

    #[test]
    fn entry_modulus_examples() {
        let nodes = [r(0.1), c(0.3, -0.5), c(-0.6, 0.2)];
        let k = Kernel::szego(&nodes).unwrap().normalize();
        let rep = entry_modulus_check(&k, &DomainModel::Disc, &disc_points(&nodes), 1e-10).unwrap();
        assert!(rep.passed(), "{rep:?}");

        let mut m = k.matrix().clone();
        let bumped = HermitianMatrix::from_fn(3, |i, j| {
            if (i, j) == (0, 1) || (i, j) == (1, 0) {
                m.get(i, j) * 1.05
            } else {
                m.get(i, j)
            }
        })
        .unwrap();
        m = bumped;
        let k2 = Kernel::new(m, &tol()).unwrap();
        let rep = entry_modulus_check(&k2, &DomainModel::Disc, &disc_points(&nodes), 1e-10).unwrap();
        assert!(!rep.passed() && rep.conclusion_residual() > 0.0);
    }
}
