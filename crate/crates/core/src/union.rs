//! Approximation oracles for strongly spectral sets and the constructive
//! union / decomposition procedures built on them.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{GFunction, Group};
use crate::projector::SubsetIndex;
use crate::synthesis::{kernel_defect, null_set, support, NULL_THRESHOLD};
use crate::transform::a_norm;

/// Output of an [`ApproxOracle`] call.
#[derive(Debug, Clone)]
pub struct OracleOutput {
    pub g: GFunction,
    /// `g` vanishes on `ball(S, radius)`.
    pub radius: usize,
    /// `‖f − g‖_A` as computed by the oracle.
    pub distance: f64,
}

/// Given `f ∈ k(S ∪ T)` and `ε > 0`, produce `g ∈ j(S) ∩ k(T)` with
/// `‖f − g‖_A < ε`. Callers re-verify every output.
pub trait ApproxOracle {
    fn approximate(&self, s: &SubsetIndex, t: &SubsetIndex, f: &GFunction, eps: f64) -> Result<OracleOutput>;

    fn name(&self) -> &str {
        "custom"
    }
}

/// Multiplies by `1 − w_r`, where `w_r` is a clipped sum of trapezoids equal
/// to 1 on the box neighborhood of radius `r` around `S`, trying
/// `r = r₀, r₀/2, …, 1` in turn.
#[derive(Debug, Clone)]
pub struct LatticeCutoffOracle {
    group: Arc<Group>,
    r0: usize,
}

pub fn default_oracle(group: &Arc<Group>, smoothing_radius: usize) -> Result<LatticeCutoffOracle> {
    if !group.is_abelian() {
        return Err(Error::NotAbelian);
    }
    if smoothing_radius == 0 {
        return Err(Error::InvalidArgument("smoothing radius must be at least 1".into()));
    }
    Ok(LatticeCutoffOracle { group: Arc::clone(group), r0: smoothing_radius })
}

fn circular(a: usize, b: usize, n: usize) -> usize {
    let d = a.abs_diff(b);
    d.min(n - d)
}

/// Coordinatewise circular offsets from `center`, largest first.
fn linf_distance(group: &Group, x: &[usize], y: &[usize]) -> usize {
    let factors = group.factors().expect("abelian");
    x.iter().zip(y).zip(factors).map(|((&a, &b), &n)| circular(a, b, n)).max().unwrap_or(0)
}

impl LatticeCutoffOracle {
    pub fn radius_grid(&self) -> Vec<usize> {
        std::iter::successors(Some(self.r0), |&r| (r > 1).then_some(r / 2)).collect()
    }

    /// `w_r = min(1, Σ_{s ∈ S} Π_j φ_r(x_j − s_j))` with `φ_r` equal to 1 on
    /// `[-r, r]` and tapering linearly to 0 at `±2r`.
    pub fn cutoff(&self, s: &SubsetIndex, r: usize) -> GFunction {
        let g = &self.group;
        let factors = g.factors().expect("abelian");
        let centers: Vec<Vec<usize>> = s.indices().iter().map(|&c| g.coords(c).expect("abelian")).collect();
        GFunction::from_fn(g, |x| {
            let cx = g.coords(x).expect("abelian");
            let total: f64 = centers
                .iter()
                .map(|c| {
                    cx.iter()
                        .zip(c)
                        .zip(factors)
                        .map(|((&a, &b), &n)| {
                            let t = circular(a, b, n) as f64;
                            let r = r as f64;
                            ((2.0 * r - t) / r).clamp(0.0, 1.0)
                        })
                        .product::<f64>()
                })
                .sum();
            total.min(1.0).into()
        })
    }
}

impl ApproxOracle for LatticeCutoffOracle {
    fn approximate(&self, s: &SubsetIndex, t: &SubsetIndex, f: &GFunction, eps: f64) -> Result<OracleOutput> {
        if !f.group().same_as(&self.group) || !s.group().same_as(&self.group) || !t.group().same_as(&self.group) {
            return Err(Error::GroupMismatch);
        }
        if s.is_empty() {
            if eps > 0.0 {
                return Ok(OracleOutput { g: f.clone(), radius: self.r0, distance: 0.0 });
            }
            return Err(Error::NoAdmissibleRadius { eps, best: 0.0 });
        }
        let mut best = f64::INFINITY;
        for r in self.radius_grid() {
            let w = self.cutoff(s, r);
            let removed = f.pointwise(&w)?;
            let distance = a_norm(&removed);
            best = best.min(distance);
            if distance < eps {
                let g = f - &removed;
                if kernel_defect(&g, t) <= NULL_THRESHOLD * f.norm_inf() {
                    return Ok(OracleOutput { g, radius: r, distance });
                }
            }
        }
        Err(Error::NoAdmissibleRadius { eps, best })
    }

    fn name(&self) -> &str {
        "lattice-cutoff"
    }
}

/// Neighborhood, vanishing and distance checks on one oracle call.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    pub stage: String,
    pub radius: usize,
    /// `‖f − g‖_A`, recomputed.
    pub distance: f64,
    /// `max |g|` on `ball(S, radius) ∪ T`.
    pub vanishing_defect: f64,
}

fn run_oracle(
    oracle: &dyn ApproxOracle,
    stage: &'static str,
    s: &SubsetIndex,
    t: &SubsetIndex,
    f: &GFunction,
    eps: f64,
) -> Result<(OracleOutput, StageReport)> {
    let out = oracle
        .approximate(s, t, f, eps)
        .map_err(|e| Error::OracleFailure { stage, reason: e.to_string() })?;
    if !out.g.group().same_as(f.group()) {
        return Err(Error::OracleVerification(format!("{stage}: output lives on another group")));
    }
    if out.radius == 0 && !s.is_empty() {
        return Err(Error::OracleVerification(format!("{stage}: reported neighborhood has radius 0")));
    }
    let distance = a_norm(&(f - &out.g));
    if distance >= eps {
        return Err(Error::OracleVerification(format!("{stage}: ‖f − g‖_A = {distance:.6e} is not below ε = {eps}")));
    }
    let zero_set = s.ball(out.radius)?.union(t)?;
    let defect = kernel_defect(&out.g, &zero_set);
    if defect > NULL_THRESHOLD * f.norm_inf() {
        return Err(Error::OracleVerification(format!(
            "{stage}: output does not vanish on the reported neighborhood (max {defect:.3e})"
        )));
    }
    let report = StageReport { stage: stage.to_string(), radius: out.radius, distance, vanishing_defect: defect };
    Ok((out, report))
}

#[derive(Debug, Clone)]
pub struct UnionResult {
    pub g: GFunction,
    pub stages: Vec<StageReport>,
    /// `‖u − g‖_A`.
    pub distance: f64,
    pub bound: f64,
    /// `max |g|` on `W₁ ∪ W₂`.
    pub vanishing_defect: f64,
    pub verified: bool,
}

fn require_kernel(u: &GFunction, set: &SubsetIndex) -> Result<()> {
    let defect = kernel_defect(u, set);
    if defect > NULL_THRESHOLD * u.norm_inf() {
        Err(Error::NotInKernel(defect))
    } else {
        Ok(())
    }
}

/// `u₁ = o₁(S₁, null u, u)`, then `u₂ = o₂(S₂, null u₁, u₁)`; `u₂` vanishes
/// near `S₁ ∪ S₂` and `‖u − u₂‖_A < 2ε`.
pub fn union_construct(
    oracle1: &dyn ApproxOracle,
    oracle2: &dyn ApproxOracle,
    s1: &SubsetIndex,
    s2: &SubsetIndex,
    u: &GFunction,
    eps: f64,
) -> Result<UnionResult> {
    let union = s1.union(s2)?;
    if !u.group().same_as(union.group()) {
        return Err(Error::GroupMismatch);
    }
    require_kernel(u, &union)?;
    let (u1, stage1) = run_oracle(oracle1, "first", s1, &null_set(u), u, eps)?;
    let mut stages = vec![stage1];
    let (g, neighborhood) = if s1 == s2 {
        let w = s1.ball(u1.radius)?;
        (u1.g, w)
    } else {
        let (u2, stage2) = run_oracle(oracle2, "second", s2, &null_set(&u1.g), &u1.g, eps)?;
        stages.push(stage2);
        let w = s1.ball(u1.radius)?.union(&s2.ball(u2.radius)?)?;
        (u2.g, w)
    };
    let distance = a_norm(&(u - &g));
    let bound = 2.0 * eps;
    let vanishing_defect = kernel_defect(&g, &neighborhood);
    let verified = distance < bound && vanishing_defect <= NULL_THRESHOLD * u.norm_inf();
    if !verified {
        return Err(Error::OracleVerification(format!(
            "union output: distance {distance:.6e} (bound {bound}), vanishing defect {vanishing_defect:.3e}"
        )));
    }
    Ok(UnionResult { g, stages, distance, bound, vanishing_defect, verified })
}

/// `w = 1` on `ones`, `w = 0` on `zeros`.
#[derive(Debug, Clone)]
pub struct BumpFunction {
    pub w: GFunction,
    pub ones: SubsetIndex,
    pub zeros: SubsetIndex,
    pub a_norm: f64,
}

/// Clipped sum of product triangles of half-width `L = dist_∞(ones, zeros)`
/// around each point of `ones`, then pinned to exact values on both sets.
pub fn bump(group: &Arc<Group>, ones: &SubsetIndex, zeros: &SubsetIndex) -> Result<BumpFunction> {
    if !group.is_abelian() {
        return Err(Error::NotAbelian);
    }
    if !ones.group().same_as(group) || !zeros.group().same_as(group) {
        return Err(Error::GroupMismatch);
    }
    if !ones.ball(1)?.intersection(zeros)?.is_empty() {
        return Err(Error::BumpSeparation);
    }
    let coords = |x: usize| group.coords(x).expect("abelian");
    let w = if zeros.is_empty() {
        GFunction::constant(group, 1.0.into())
    } else if ones.is_empty() {
        GFunction::zeros(group)
    } else {
        let one_coords: Vec<Vec<usize>> = ones.indices().iter().map(|&x| coords(x)).collect();
        let zero_coords: Vec<Vec<usize>> = zeros.indices().iter().map(|&x| coords(x)).collect();
        let width = one_coords
            .iter()
            .flat_map(|a| zero_coords.iter().map(move |b| (a, b)))
            .map(|(a, b)| linf_distance(group, a, b))
            .min()
            .expect("both sets non-empty") as f64;
        let factors = group.factors().expect("abelian");
        let mut w = GFunction::from_fn(group, |x| {
            let cx = coords(x);
            let total: f64 = one_coords
                .iter()
                .map(|c| {
                    cx.iter()
                        .zip(c)
                        .zip(factors)
                        .map(|((&a, &b), &n)| (1.0 - circular(a, b, n) as f64 / width).max(0.0))
                        .product::<f64>()
                })
                .sum();
            total.min(1.0).into()
        });
        for &x in ones.indices() {
            w.values_mut()[x] = 1.0.into();
        }
        for &x in zeros.indices() {
            w.values_mut()[x] = 0.0.into();
        }
        w
    };
    let norm = a_norm(&w);
    Ok(BumpFunction { w, ones: ones.clone(), zeros: zeros.clone(), a_norm: norm })
}

#[derive(Debug, Clone)]
pub struct DecomposeResult {
    /// `g' + w g`.
    pub g: GFunction,
    pub bump: BumpFunction,
    pub stages: Vec<StageReport>,
    /// `C = S₂ ∩ supp g`.
    pub ones: SubsetIndex,
    pub distance: f64,
    pub bound: f64,
    /// `max |result|` on `ball(S₁, 1) ∪ null(u)`.
    pub vanishing_defect: f64,
    pub verified: bool,
}

/// From oracles for `S₁ ∩ S₂` and `S₁ ∪ S₂`, builds `g' + w g ∈ j(S₁) ∩ k(null u)`
/// with `‖u − g' − w g‖_A < 2ε`.
pub fn decompose_from_union(
    oracle_cap: &dyn ApproxOracle,
    oracle_cup: &dyn ApproxOracle,
    s1: &SubsetIndex,
    s2: &SubsetIndex,
    u: &GFunction,
    eps: f64,
) -> Result<DecomposeResult> {
    let group = u.group();
    let cap = s1.intersection(s2)?;
    let cup = s1.union(s2)?;
    if !group.same_as(cap.group()) {
        return Err(Error::GroupMismatch);
    }
    require_kernel(u, s1)?;
    let null_u = null_set(u);
    let (g, stage_cap) = run_oracle(oracle_cap, "intersection", &cap, &null_u, u, eps)?;
    let ones = s2.intersection(&support(&g.g))?;
    let zeros = s1.ball(1)?;
    let w = bump(group, &ones, &zeros)?;
    let wg = g.g.pointwise(&w.w)?;
    let h = &g.g - &wg;
    require_kernel(&h, &cup).map_err(|e| Error::OracleVerification(format!("h = g − gw: {e}")))?;
    let (g_prime, stage_cup) = run_oracle(oracle_cup, "union", &cup, &null_set(&h), &h, eps)?;
    let result = &g_prime.g + &wg;
    let distance = a_norm(&(u - &result));
    let bound = 2.0 * eps;
    let vanishing_defect = kernel_defect(&result, &zeros.union(&null_u)?);
    let verified = distance < bound && vanishing_defect <= NULL_THRESHOLD * u.norm_inf();
    if !verified {
        return Err(Error::OracleVerification(format!(
            "decomposition output: distance {distance:.6e} (bound {bound}), vanishing defect {vanishing_defect:.3e}"
        )));
    }
    Ok(DecomposeResult {
        g: result,
        bump: w,
        stages: vec![stage_cap, stage_cup],
        ones,
        distance,
        bound,
        vanishing_defect,
        verified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Group;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    /// Smooth function vanishing to second order at each point of `zeros`.
    fn vanishing_on(g: &Arc<Group>, zeros: &[usize]) -> GFunction {
        let n = g.order() as f64;
        GFunction::from_fn(g, |x| {
            let envelope = (2.0 * PI * x as f64 / n).cos() + 1.5;
            let factor: f64 = zeros.iter().map(|&s| 1.0 - (2.0 * PI * (x as f64 - s as f64) / n).cos()).product();
            Complex64::new(envelope * factor, 0.0)
        })
    }

    #[test]
    fn oracle_leaves_j_functions_alone() {
        let g = Group::cyclic(64).unwrap();
        let s = SubsetIndex::singleton(&g, 0).unwrap();
        let f = GFunction::delta(&g, 32);
        let oracle = default_oracle(&g, 8).unwrap();
        let out = oracle.approximate(&s, &SubsetIndex::empty(&g), &f, 1e-6).unwrap();
        assert_eq!(out.radius, 8);
        assert!(out.g.max_abs_diff(&f) == 0.0);
    }

    #[test]
    fn oracle_finds_a_radius_and_rejects_zero_eps() {
        let g = Group::cyclic(256).unwrap();
        let s = SubsetIndex::singleton(&g, 0).unwrap();
        let f = vanishing_on(&g, &[0]);
        let oracle = default_oracle(&g, 32).unwrap();
        let out = oracle.approximate(&s, &SubsetIndex::empty(&g), &f, 0.1).unwrap();
        assert!(out.distance < 0.1 && out.radius >= 1);
        assert!(matches!(
            oracle.approximate(&s, &SubsetIndex::empty(&g), &f, 0.0),
            Err(Error::NoAdmissibleRadius { .. })
        ));
    }

    #[test]
    fn union_of_two_points() {
        let g = Group::cyclic(256).unwrap();
        let s1 = SubsetIndex::singleton(&g, 0).unwrap();
        let s2 = SubsetIndex::singleton(&g, 5).unwrap();
        let u = vanishing_on(&g, &[0, 5]).scale_real(1.0 / 16.0);
        let oracle = default_oracle(&g, 32).unwrap();
        let res = union_construct(&oracle, &oracle, &s1, &s2, &u, 0.05).unwrap();
        assert!(res.distance < 0.1 && res.verified);
        let zero = union_construct(&oracle, &oracle, &s1, &s2, &GFunction::zeros(&g), 0.05).unwrap();
        assert_eq!(zero.g.norm_inf(), 0.0);
        let same = union_construct(&oracle, &oracle, &s1, &s1, &u, 0.05).unwrap();
        assert_eq!(same.stages.len(), 1);
    }

    #[test]
    fn bump_examples() {
        let g = Group::cyclic(64).unwrap();
        let ones = SubsetIndex::singleton(&g, 10).unwrap();
        let zeros = SubsetIndex::singleton(&g, 0).unwrap().ball(3).unwrap();
        let b = bump(&g, &ones, &zeros).unwrap();
        assert!((b.w[10].re - 1.0).abs() < 1e-10);
        assert!(zeros.indices().iter().all(|&x| b.w[x].norm() < 1e-10));
        let empty = SubsetIndex::empty(&g);
        assert_eq!(bump(&g, &empty, &zeros).unwrap().w.norm_inf(), 0.0);
        let all = bump(&g, &SubsetIndex::whole(&g), &empty).unwrap();
        assert!((all.a_norm - 1.0).abs() < 1e-12);
        let close = SubsetIndex::singleton(&g, 4).unwrap();
        assert!(matches!(bump(&g, &close, &zeros), Err(Error::BumpSeparation)));
    }

    #[test]
    fn decomposition_of_separated_balls() {
        let g = Group::cyclic(256).unwrap();
        let s1 = SubsetIndex::singleton(&g, 0).unwrap().ball(2).unwrap();
        let s2 = SubsetIndex::singleton(&g, 8).unwrap().ball(2).unwrap();
        let u = vanishing_on(&g, &[254, 255, 0, 1, 2]).scale_real(1.0 / 64.0);
        let oracle = default_oracle(&g, 32).unwrap();
        let res = decompose_from_union(&oracle, &oracle, &s1, &s2, &u, 0.05).unwrap();
        assert!(res.verified && res.distance < 0.1);
        let zero = decompose_from_union(&oracle, &oracle, &s1, &s2, &GFunction::zeros(&g), 0.05).unwrap();
        assert_eq!(zero.g.norm_inf(), 0.0);
    }
}
