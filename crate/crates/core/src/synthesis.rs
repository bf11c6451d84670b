//! Hull/kernel bookkeeping, neighborhood chains, residual certificates
//! `r_k = ‖P_{S_k·c}(d)‖₂`, the reconstruction sequence they certify, the
//! localizer pipeline for abelian groups and the `r_∞` experiment.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::canonical::{canonical_rep, CanonicalRep};
use crate::error::{Error, Result};
use crate::group::{GFunction, Group};
use crate::projector::{project, project_fast_with, FastOptions, ProjectionReport, SubsetIndex};
use crate::transform::a_norm;

/// Relative threshold below which a value counts as zero.
pub const NULL_THRESHOLD: f64 = 1e-12;

/// `null(f) = {x : |f(x)| ≤ 1e-12 ‖f‖_∞}`.
pub fn null_set(f: &GFunction) -> SubsetIndex {
    let cut = NULL_THRESHOLD * f.norm_inf();
    SubsetIndex::from_predicate(f.group(), |x| f[x].norm() <= cut)
}

/// `supp(f)`, the complement of [`null_set`].
pub fn support(f: &GFunction) -> SubsetIndex {
    let cut = NULL_THRESHOLD * f.norm_inf();
    SubsetIndex::from_predicate(f.group(), |x| f[x].norm() > cut)
}

/// `max_{x ∈ E} |f(x)|`.
pub fn kernel_defect(f: &GFunction, e: &SubsetIndex) -> f64 {
    e.indices().iter().map(|&x| f[x].norm()).fold(0.0, f64::max)
}

/// `f ∈ k(E)`: `f` vanishes on `E` up to the null threshold.
pub fn in_kernel(f: &GFunction, e: &SubsetIndex) -> bool {
    kernel_defect(f, e) <= NULL_THRESHOLD * f.norm_inf()
}

/// `f ∈ j(E)` with the neighborhood `ball(E, radius)`, `radius ≥ 1`.
pub fn in_j(f: &GFunction, e: &SubsetIndex, radius: usize) -> Result<bool> {
    if radius == 0 {
        return Err(Error::InvalidArgument("a neighborhood needs radius ≥ 1".into()));
    }
    Ok(in_kernel(f, &e.ball(radius)?))
}

/// Zeroes `f` on `E`.
pub fn restrict_to_kernel(f: &GFunction, e: &SubsetIndex) -> GFunction {
    let mut out = f.clone();
    for &x in e.indices() {
        out.values_mut()[x] = 0.0.into();
    }
    out
}

fn require_kernel(u: &GFunction, e: &SubsetIndex) -> Result<()> {
    if !u.group().same_as(e.group()) {
        return Err(Error::GroupMismatch);
    }
    let defect = kernel_defect(u, e);
    if defect > 1e-10 * u.norm_inf() {
        Err(Error::NotInKernel(defect))
    } else {
        Ok(())
    }
}

/// How a [`NeighborhoodFamily`] was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ChainGenerator {
    /// `S_k = {x : dist(x, S) ≤ r_k}` in the torus word metric.
    Balls { radii: Vec<usize> },
    Explicit,
}

/// Decreasing chain `S_1 ⊇ S_2 ⊇ … ⊇ S_K ⊇ S`.
#[derive(Debug, Clone)]
pub struct NeighborhoodFamily {
    base: SubsetIndex,
    chain: Vec<SubsetIndex>,
    generator: ChainGenerator,
}

impl NeighborhoodFamily {
    pub fn balls(base: &SubsetIndex, radii: &[usize]) -> Result<Self> {
        if radii.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidChain("radii must be non-increasing".into()));
        }
        let chain = radii.iter().map(|&r| base.ball(r)).collect::<Result<Vec<_>>>()?;
        Ok(Self { base: base.clone(), chain, generator: ChainGenerator::Balls { radii: radii.to_vec() } })
    }

    pub fn explicit(base: &SubsetIndex, chain: Vec<SubsetIndex>) -> Result<Self> {
        for (k, set) in chain.iter().enumerate() {
            if !base.is_subset(set) {
                return Err(Error::InvalidChain(format!("S_{} does not contain the base set", k + 1)));
            }
            if k > 0 && !set.is_subset(&chain[k - 1]) {
                return Err(Error::InvalidChain(format!("S_{} is not contained in S_{}", k + 1, k)));
            }
        }
        Ok(Self { base: base.clone(), chain, generator: ChainGenerator::Explicit })
    }

    pub fn base(&self) -> &SubsetIndex {
        &self.base
    }

    pub fn chain(&self) -> &[SubsetIndex] {
        &self.chain
    }

    pub fn generator(&self) -> &ChainGenerator {
        &self.generator
    }

    pub fn len(&self) -> usize {
        self.chain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chain.is_empty()
    }

    /// `S_k ∪ T` for every `k`, based at `S ∪ T`.
    pub fn with_extra(&self, t: &SubsetIndex) -> Result<Self> {
        let base = self.base.union(t)?;
        let chain = self.chain.iter().map(|s| s.union(t)).collect::<Result<Vec<_>>>()?;
        Ok(Self { base, chain, generator: self.generator.clone() })
    }
}

/// Which projection solver to run per `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverChoice {
    #[default]
    Dense,
    /// Conjugate gradients with FFT matvec (abelian groups only).
    Fast,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificateOptions {
    /// `r_K` at or below this certifies.
    pub tolerance: f64,
    pub solver: SolverChoice,
    /// Record per-row wall time; otherwise the column is 0 so outputs stay
    /// byte-identical across runs.
    pub timing: bool,
}

impl Default for CertificateOptions {
    fn default() -> Self {
        Self { tolerance: 1e-3, solver: SolverChoice::Dense, timing: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateRow {
    pub k: usize,
    pub set_size: usize,
    pub residual: f64,
    pub gram_rank: usize,
    pub condition: f64,
    pub wall_time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateVerdict {
    Certified,
    /// The tail did not reach the tolerance; says nothing about synthesis.
    InconclusiveAtResolution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateTrace {
    pub group: String,
    pub rows: Vec<CertificateRow>,
    pub tolerance: f64,
    pub final_residual: f64,
    /// Least-squares slope of `log₂ r_k` against `k` over positive residuals.
    pub decay_slope: Option<f64>,
    /// `r_k` non-increasing up to 1e-9.
    pub monotone: bool,
    pub verdict: CertificateVerdict,
    pub caveat: Option<String>,
}

struct Stopwatch(#[cfg(not(target_arch = "wasm32"))] Option<std::time::Instant>);

impl Stopwatch {
    fn start(enabled: bool) -> Self {
        #[cfg(not(target_arch = "wasm32"))]
        {
            Stopwatch(enabled.then(std::time::Instant::now))
        }
        #[cfg(target_arch = "wasm32")]
        {
            let _ = enabled;
            Stopwatch()
        }
    }

    fn seconds(&self) -> f64 {
        #[cfg(not(target_arch = "wasm32"))]
        {
            self.0.map_or(0.0, |t| t.elapsed().as_secs_f64())
        }
        #[cfg(target_arch = "wasm32")]
        {
            0.0
        }
    }
}

fn run_projection(
    c: &GFunction,
    d: &GFunction,
    s: &SubsetIndex,
    solver: SolverChoice,
) -> Result<(GFunction, ProjectionReport)> {
    match solver {
        SolverChoice::Fast if c.group().is_abelian() => project_fast_with(c, d, s, FastOptions::default()),
        _ => project(c, d, s),
    }
}

fn decay_slope(rows: &[CertificateRow]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        rows.iter().filter(|r| r.residual > 0.0).map(|r| (r.k as f64, r.residual.log2())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

fn check_c_seq(u: &GFunction, family: &NeighborhoodFamily, c_seq: Option<&[GFunction]>) -> Result<()> {
    if let Some(seq) = c_seq {
        if seq.len() != family.len() {
            return Err(Error::InvalidArgument(format!(
                "c_seq has {} entries, the chain has {}",
                seq.len(),
                family.len()
            )));
        }
        for c in seq {
            u.ensure_same_group(c)?;
        }
    }
    Ok(())
}

fn certificate_from(
    u: &GFunction,
    rep: &CanonicalRep,
    family: &NeighborhoodFamily,
    c_seq: Option<&[GFunction]>,
    options: &CertificateOptions,
) -> Result<CertificateTrace> {
    let mut rows = Vec::with_capacity(family.len());
    for (i, s_k) in family.chain().iter().enumerate() {
        let watch = Stopwatch::start(options.timing);
        let c_k = c_seq.map_or(&rep.c, |seq| &seq[i]);
        let (_, report) = run_projection(c_k, &rep.d, s_k, options.solver)?;
        rows.push(CertificateRow {
            k: i + 1,
            set_size: s_k.len(),
            residual: report.residual_norm,
            gram_rank: report.gram_rank,
            condition: report.gram_condition,
            wall_time: watch.seconds(),
        });
    }
    let final_residual = rows.last().map_or(0.0, |r| r.residual);
    let scale = 1.0 + rep.d.norm2();
    let monotone = rows.windows(2).all(|w| w[1].residual <= w[0].residual + 1e-9 * scale);
    let verdict = if final_residual <= options.tolerance {
        CertificateVerdict::Certified
    } else {
        CertificateVerdict::InconclusiveAtResolution
    };
    Ok(CertificateTrace {
        group: u.group().name().to_string(),
        decay_slope: decay_slope(&rows),
        rows,
        tolerance: options.tolerance,
        final_residual,
        monotone,
        verdict,
        caveat: None,
    })
}

/// `r_k = ‖P_{S_k·c_k}(d)‖₂` with `(c, d)` the canonical representation of `u`
/// and `c_k = c` unless a sequence is supplied.
pub fn residual_certificate(
    u: &GFunction,
    s: &SubsetIndex,
    family: &NeighborhoodFamily,
    c_seq: Option<&[GFunction]>,
    options: &CertificateOptions,
) -> Result<CertificateTrace> {
    require_kernel(u, s)?;
    check_c_seq(u, family, c_seq)?;
    let rep = canonical_rep(u);
    certificate_from(u, &rep, family, c_seq, options)
}

/// Per-`k` check of the reconstruction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionRow {
    pub k: usize,
    /// `max_{S_k} |u_k|`.
    pub vanishing_defect: f64,
    /// `‖u − u_k‖_A`.
    pub a_dist: f64,
    /// `‖c − c_k‖₂‖d_k‖₂ + ‖c_k‖₂‖d − d_k‖₂`.
    pub bound: f64,
    pub bound_holds: bool,
}

#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub sequence: Vec<GFunction>,
    pub rows: Vec<ReconstructionRow>,
}

impl Reconstruction {
    /// Every `u_k` vanishes on `S_k` to `tol` and satisfies its A-norm bound.
    pub fn verified(&self, tol: f64) -> bool {
        self.rows.iter().all(|r| r.vanishing_defect <= tol && r.bound_holds)
    }
}

pub fn reconstruct_sequence(u: &GFunction, s: &SubsetIndex, family: &NeighborhoodFamily) -> Result<Reconstruction> {
    reconstruct_sequence_with(u, s, family, None)
}

/// `d_k = d − P_{S_k·c_k}(d)` and `u_k(s) = ⟨d_k, λ(s)c_k⟩`.
pub fn reconstruct_sequence_with(
    u: &GFunction,
    s: &SubsetIndex,
    family: &NeighborhoodFamily,
    c_seq: Option<&[GFunction]>,
) -> Result<Reconstruction> {
    require_kernel(u, s)?;
    check_c_seq(u, family, c_seq)?;
    let rep = canonical_rep(u);
    let (c, d) = (&rep.c, &rep.d);
    let mut sequence = Vec::with_capacity(family.len());
    let mut rows = Vec::with_capacity(family.len());
    for (i, s_k) in family.chain().iter().enumerate() {
        let c_k = c_seq.map_or(c, |seq| &seq[i]);
        let (p, _) = project(c_k, d, s_k)?;
        let d_k = d - &p;
        let u_k = d_k.convolve(&c_k.tilde())?;
        let a_dist = a_norm(&(u - &u_k));
        let bound = c.dist2(c_k) * d_k.norm2() + c_k.norm2() * d.dist2(&d_k);
        let slack = 1e-10 * (1.0 + c.norm2() * d.norm2());
        rows.push(ReconstructionRow {
            k: i + 1,
            vanishing_defect: kernel_defect(&u_k, s_k),
            a_dist,
            bound,
            bound_holds: a_dist <= bound + slack,
        });
        sequence.push(u_k);
    }
    Ok(Reconstruction { sequence, rows })
}

/// Localizer `v = L^{-r} 1_B ∗ 1̃_B` with `B = [0, L)^r`: a product of
/// triangles of half-width `L`, positive definite with `v(0) = ‖v‖_A = 1`.
pub fn fejer_localizer(group: &Arc<Group>, width: usize) -> Result<GFunction> {
    let factors = group.factors().ok_or(Error::NotAbelian)?;
    if width == 0 {
        return Err(Error::InvalidArgument("localizer width must be positive".into()));
    }
    let boxed = GFunction::from_fn(group, |x| {
        let inside = group.coords(x).expect("abelian").iter().zip(factors).all(|(&c, &n)| c < width.min(n));
        if inside {
            1.0.into()
        } else {
            0.0.into()
        }
    });
    let mass = boxed.norm1();
    Ok(boxed.convolve(&boxed.tilde())?.scale_real(1.0 / mass))
}

/// One `(i, k)` entry of the localizer pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkukisRow {
    pub i: usize,
    pub k: usize,
    /// `‖P_{S_k·c}(d)‖₂`.
    pub residual: f64,
    /// `‖c − c^i‖₂`.
    pub c_dist: f64,
    /// `‖d − d^i‖₂`.
    pub d_dist: f64,
    /// `‖P_{S_k·c^i}(d^i)‖₂`.
    pub localized_residual: f64,
    /// `‖P_{S_k·c^i_k}(d^i_k)‖₂`, zero when `v_i u_k` vanishes on `S_k`.
    pub sequence_residual: f64,
    /// `‖P_{S_k·c}(d^i − d)‖₂`.
    pub term_difference: f64,
    /// `‖P_{S_k⁻¹·d^i}(c − c^i)‖₂`.
    pub term_swap: f64,
    /// `|‖P_{S_k·c}(d^i)‖₂ − ‖P_{S_k⁻¹·d^i}(c)‖₂|`.
    pub swap_gap: f64,
    /// `c_dist + d_dist + localized_residual`.
    pub bound: f64,
    pub bound_holds: Option<bool>,
    pub flag: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkukisReport {
    pub rows: Vec<SkukisRow>,
    /// `‖v_i‖_A` per localizer.
    pub localizer_norms: Vec<f64>,
    pub flags: Vec<String>,
    /// Every unflagged row satisfies its bound.
    pub pass: bool,
}

/// Forms `u^i_k = v_i u_k` and `u^i = v_i u`, takes canonical representations
/// and evaluates each term of the chain
/// `‖P_{S_k·c}(d)‖ ≤ ‖c − c^i‖ + ‖d − d^i‖ + ‖P_{S_k·c^i}(d^i)‖`.
pub fn skukis_pipeline(
    u: &GFunction,
    u_seq: &[GFunction],
    s_chain: &[SubsetIndex],
    localizers: &[GFunction],
) -> Result<SkukisReport> {
    if !u.group().is_abelian() {
        return Err(Error::NotAbelian);
    }
    if u_seq.len() != s_chain.len() {
        return Err(Error::InvalidArgument(format!(
            "{} functions for {} sets",
            u_seq.len(),
            s_chain.len()
        )));
    }
    for f in u_seq.iter().chain(localizers) {
        u.ensure_same_group(f)?;
    }
    let mut flags = Vec::new();
    let localizer_norms: Vec<f64> = localizers.iter().map(a_norm).collect();
    for (i, &norm) in localizer_norms.iter().enumerate() {
        if norm > 1.0 + 1e-12 {
            flags.push(format!("localizer {} has A-norm {norm:.6e} > 1", i + 1));
        }
    }
    let vanishing: Vec<bool> = u_seq
        .iter()
        .zip(s_chain)
        .map(|(uk, sk)| kernel_defect(uk, sk) <= 1e-10 * uk.norm_inf().max(f64::MIN_POSITIVE))
        .collect();
    for (k, ok) in vanishing.iter().enumerate() {
        if !ok {
            flags.push(format!("u_{} does not vanish on S_{}", k + 1, k + 1));
        }
    }

    let rep = canonical_rep(u);
    let residuals: Vec<f64> = s_chain
        .iter()
        .map(|sk| project(&rep.c, &rep.d, sk).map(|r| r.1.residual_norm))
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for (i, v) in localizers.iter().enumerate() {
        let localizer_ok = localizer_norms[i] <= 1.0 + 1e-12;
        let rep_i = canonical_rep(&v.pointwise(u)?);
        let c_dist = rep.c.dist2(&rep_i.c);
        let d_dist = rep.d.dist2(&rep_i.d);
        let d_diff = &rep_i.d - &rep.d;
        let c_diff = &rep.c - &rep_i.c;
        for (k, (uk, sk)) in u_seq.iter().zip(s_chain).enumerate() {
            let rep_ik = canonical_rep(&v.pointwise(uk)?);
            let s_inv = sk.inverse();
            let localized_residual = project(&rep_i.c, &rep_i.d, sk)?.1.residual_norm;
            let bound = c_dist + d_dist + localized_residual;
            let direct = project(&rep.c, &rep_i.d, sk)?.1.residual_norm;
            let swapped = project(&rep_i.d, &rep.c, &s_inv)?.1.residual_norm;
            let flag = match (localizer_ok, vanishing[k]) {
                (false, _) => Some("localizer norm exceeds 1".to_string()),
                (_, false) => Some("u_k does not vanish on S_k".to_string()),
                _ => None,
            };
            let residual = residuals[k];
            let bound_holds = flag.is_none().then(|| residual <= bound + 1e-9);
            rows.push(SkukisRow {
                i: i + 1,
                k: k + 1,
                residual,
                c_dist,
                d_dist,
                localized_residual,
                sequence_residual: project(&rep_ik.c, &rep_ik.d, sk)?.1.residual_norm,
                term_difference: project(&rep.c, &d_diff, sk)?.1.residual_norm,
                term_swap: project(&rep_i.d, &c_diff, &s_inv)?.1.residual_norm,
                swap_gap: (direct - swapped).abs(),
                bound,
                bound_holds,
                flag,
            });
        }
    }
    let pass = rows.iter().all(|r| r.bound_holds != Some(false));
    Ok(SkukisReport { rows, localizer_norms, flags, pass })
}

pub const OPEN_QUESTION_CAVEAT: &str =
    "open-question experiment: the limit value is an estimate at this resolution, not a claim about r_inf = 0";

/// `r_k = ‖P_{(S_k ∪ T)·c}(d)‖₂` over the chain, reported with its last value
/// as the estimate of the limit.
pub fn r_infinity_experiment(
    u: &GFunction,
    s: &SubsetIndex,
    t: &SubsetIndex,
    family: &NeighborhoodFamily,
    options: &CertificateOptions,
) -> Result<CertificateTrace> {
    let union = s.union(t)?;
    require_kernel(u, &union)?;
    let extended = family.with_extra(t)?;
    let rep = canonical_rep(u);
    let mut trace = certificate_from(u, &rep, &extended, None, options)?;
    trace.caveat = Some(OPEN_QUESTION_CAVEAT.to_string());
    Ok(trace)
}
