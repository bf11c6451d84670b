//! Right-convolution operators `ρ(b) f = f ∗ b`, their spectral functional
//! calculus, and a verifier for the convergence theorem relating `A(G)`
//! convergence to `L²` convergence of canonical representations.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::canonical::{self, canonical_rep_with};
use crate::dense::{self, CMatrix};
use crate::error::{Error, Result};
use crate::group::{GFunction, Group};
use crate::projector::SubsetIndex;
use crate::random;
use crate::transform::{self, a_norm_with, Backend, DualFunction};

#[derive(Debug, Clone)]
enum Repr {
    /// Eigenvalues `b̂(ξ)`.
    Diagonal(DualFunction),
    Dense(CMatrix),
}

/// `ρ(b) : f ↦ f ∗ b`.
#[derive(Debug, Clone)]
pub struct ConvOperator {
    b: GFunction,
    repr: Repr,
}

/// Which resolvent `(ρ(b) ± iI)⁻¹` to form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn shift(self) -> Complex64 {
        match self {
            Sign::Plus => Complex64::i(),
            Sign::Minus => -Complex64::i(),
        }
    }
}

pub fn h(t: f64) -> f64 {
    if t <= 1.0 {
        t.max(0.0).sqrt() - t
    } else {
        0.0
    }
}

pub fn q(t: f64) -> f64 {
    if t <= 1.0 {
        1.0
    } else {
        1.0 / t.sqrt()
    }
}

impl ConvOperator {
    pub fn new(b: &GFunction) -> Self {
        Self::with_backend(b, Backend::for_group(b.group())).expect("natural backend")
    }

    pub fn with_backend(b: &GFunction, backend: Backend) -> Result<Self> {
        let repr = match backend.check(b.group())? {
            Backend::Fourier => Repr::Diagonal(transform::fourier(b)?),
            Backend::Dense => Repr::Dense(dense::right_convolution(b)),
        };
        Ok(Self { b: b.clone(), repr })
    }

    pub fn kernel(&self) -> &GFunction {
        &self.b
    }

    pub fn group(&self) -> &Arc<Group> {
        self.b.group()
    }

    pub fn backend(&self) -> Backend {
        match self.repr {
            Repr::Diagonal(_) => Backend::Fourier,
            Repr::Dense(_) => Backend::Dense,
        }
    }

    pub fn apply(&self, f: &GFunction) -> Result<GFunction> {
        if !f.group().same_as(self.group()) {
            return Err(Error::GroupMismatch);
        }
        Ok(match &self.repr {
            Repr::Diagonal(m) => transform::inv_fourier(&transform::fourier(f)?.pointwise(m)),
            Repr::Dense(m) => dense::matvec(m, f),
        })
    }

    pub fn to_matrix(&self) -> CMatrix {
        match &self.repr {
            Repr::Diagonal(_) => dense::right_convolution(&self.b),
            Repr::Dense(m) => m.clone(),
        }
    }

    /// Hermitian iff `b = b̃`.
    pub fn is_hermitian(&self) -> bool {
        self.b.max_abs_diff(&self.b.tilde()) <= 1e-10 * self.b.norm_inf().max(f64::MIN_POSITIVE)
    }

    pub fn is_psd(&self) -> bool {
        canonical::is_positive_definite_with(&self.b, self.backend()).expect("backend matches group")
    }

    /// Ascending eigenvalues of the Hermitian part.
    pub fn spectrum(&self) -> Vec<f64> {
        match &self.repr {
            Repr::Diagonal(m) => {
                let mut v: Vec<f64> = m.values().iter().map(|z| z.re).collect();
                v.sort_by(f64::total_cmp);
                v
            }
            Repr::Dense(m) => dense::hermitian_eigen(m).0,
        }
    }

    pub fn operator_norm(&self) -> f64 {
        match &self.repr {
            Repr::Diagonal(m) => m.sup_norm(),
            Repr::Dense(m) => dense::operator_norm(m),
        }
    }

    /// `φ(ρ(b))` for a real function on the spectrum of a PSD operator.
    pub fn functional(&self, phi: impl Fn(f64) -> f64) -> Result<Self> {
        self.require_psd()?;
        match &self.repr {
            Repr::Diagonal(m) => {
                let symbol = m.map(|z| Complex64::new(phi(z.re.max(0.0)), 0.0));
                let b = transform::inv_fourier(&symbol);
                Ok(Self { b, repr: Repr::Diagonal(symbol) })
            }
            Repr::Dense(m) => {
                let (values, vectors) = dense::hermitian_eigen(m);
                let matrix = dense::spectral_apply(&values, &vectors, |t| Complex64::new(phi(t.max(0.0)), 0.0));
                let e = self.group().identity();
                let b = GFunction::from_fn(self.group(), |x| matrix[(x, e)]);
                Ok(Self { b, repr: Repr::Dense(matrix) })
            }
        }
    }

    fn require_psd(&self) -> Result<()> {
        if self.is_psd() {
            Ok(())
        } else {
            let min = self.spectrum().first().copied().unwrap_or(0.0);
            Err(Error::NotPositiveDefinite(min))
        }
    }

    /// `ρ(b)^{1/2} = ρ(√b)`.
    pub fn sqrt_op(&self) -> Result<Self> {
        self.functional(f64::sqrt)
    }

    /// `(h(ρ(b)), q(ρ(b)))` with `√t = h(t) + q(t) t`.
    pub fn hq_split(&self) -> Result<(Self, Self)> {
        Ok((self.functional(h)?, self.functional(q)?))
    }

    /// `(ρ(b) ± iI)⁻¹`.
    pub fn resolvent(&self, sign: Sign) -> Result<LinearMap> {
        let shift = sign.shift();
        match &self.repr {
            Repr::Diagonal(m) => {
                if let Some(xi) = m.values().iter().position(|z| (z + shift).norm() == 0.0) {
                    return Err(Error::Precondition(format!("ρ(b) ± iI is singular at ξ = {xi}")));
                }
                Ok(LinearMap::Diagonal(m.map(|z| (z + shift).inv())))
            }
            Repr::Dense(m) => {
                let n = m.nrows();
                let shifted = m + CMatrix::identity(n, n) * shift;
                let inverse = shifted
                    .try_inverse()
                    .ok_or_else(|| Error::Precondition("ρ(b) ± iI is singular".into()))?;
                Ok(LinearMap::Dense { group: Arc::clone(self.group()), matrix: inverse })
            }
        }
    }
}

/// Linear map on `L²(G)`, as returned by [`ConvOperator::resolvent`].
#[derive(Debug, Clone)]
pub enum LinearMap {
    /// Fourier multiplier.
    Diagonal(DualFunction),
    Dense { group: Arc<Group>, matrix: CMatrix },
}

impl LinearMap {
    pub fn apply(&self, f: &GFunction) -> Result<GFunction> {
        match self {
            LinearMap::Diagonal(m) => {
                if !m.group().same_as(f.group()) {
                    return Err(Error::GroupMismatch);
                }
                Ok(transform::inv_fourier(&transform::fourier(f)?.pointwise(m)))
            }
            LinearMap::Dense { group, matrix } => {
                if !group.same_as(f.group()) {
                    return Err(Error::GroupMismatch);
                }
                Ok(dense::matvec(matrix, f))
            }
        }
    }

    pub fn to_matrix(&self) -> CMatrix {
        match self {
            LinearMap::Diagonal(m) => {
                let kernel = transform::inv_fourier(m);
                dense::right_convolution(&kernel)
            }
            LinearMap::Dense { matrix, .. } => matrix.clone(),
        }
    }

    pub fn operator_norm(&self) -> f64 {
        match self {
            LinearMap::Diagonal(m) => m.sup_norm(),
            LinearMap::Dense { matrix, .. } => dense::operator_norm(matrix),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub degree: usize,
    /// Sup of `|q − P|` over the joint spectrum.
    pub fit_error: f64,
    /// Max over operators of `‖q(op) f − P(R₊, R₋) f‖₂`.
    pub apply_error: f64,
    pub f_norm: f64,
    pub bound: f64,
    pub spectrum_points: usize,
    /// `None` at degree 0, where no bound is claimed.
    pub pass: Option<bool>,
}

/// Fits `P(r₊, r₋) = Σ_{a+b ≤ D} c_{ab} r₊^a r₋^b`, `r± = 1/(x ± i)`, to `q`
/// on the joint spectrum of `ops` by least squares, then compares `q(op) f`
/// with `P((op+iI)⁻¹, (op−iI)⁻¹) f` for each operator.
pub fn stone_weierstrass_probe(ops: &[ConvOperator], f: &GFunction, degree: usize) -> Result<ProbeReport> {
    let mut points: Vec<f64> = Vec::new();
    for op in ops {
        if !op.group().same_as(f.group()) {
            return Err(Error::GroupMismatch);
        }
        op.require_psd()?;
        points.extend(op.spectrum().into_iter().map(|t| t.max(0.0)));
    }
    points.sort_by(f64::total_cmp);
    points.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));

    let basis: Vec<(usize, usize)> = (0..=degree).flat_map(|a| (0..=degree - a).map(move |b| (a, b))).collect();
    let eval = |x: f64, coeffs: &[Complex64]| -> Complex64 {
        let rp = Complex64::new(x, 1.0).inv();
        let rm = Complex64::new(x, -1.0).inv();
        basis.iter().zip(coeffs).map(|(&(a, b), c)| c * rp.powu(a as u32) * rm.powu(b as u32)).sum()
    };
    let coeffs: Vec<Complex64> = if points.is_empty() {
        vec![Complex64::new(0.0, 0.0); basis.len()]
    } else {
        let design = CMatrix::from_fn(points.len(), basis.len(), |i, j| {
            let (a, b) = basis[j];
            let rp = Complex64::new(points[i], 1.0).inv();
            let rm = Complex64::new(points[i], -1.0).inv();
            rp.powu(a as u32) * rm.powu(b as u32)
        });
        let target = nalgebra::DVector::from_iterator(points.len(), points.iter().map(|&t| Complex64::new(q(t), 0.0)));
        let svd = design.svd(true, true);
        let solution = svd.solve(&target, 1e-14).map_err(|e| Error::Precondition(e.to_string()))?;
        solution.iter().copied().collect()
    };
    let fit_error = points.iter().map(|&t| (eval(t, &coeffs) - q(t)).norm()).fold(0.0, f64::max);

    let mut apply_error: f64 = 0.0;
    for op in ops {
        let exact = op.functional(q)?.apply(f)?;
        let plus = op.resolvent(Sign::Plus)?;
        let minus = op.resolvent(Sign::Minus)?;
        let mut approx = GFunction::zeros(f.group());
        let mut plus_power = f.clone();
        for a in 0..=degree {
            let mut term = plus_power.clone();
            for b in 0..=degree - a {
                let idx = basis.iter().position(|&k| k == (a, b)).expect("in basis");
                approx = &approx + &term.scale(coeffs[idx]);
                if b < degree - a {
                    term = minus.apply(&term)?;
                }
            }
            if a < degree {
                plus_power = plus.apply(&plus_power)?;
            }
        }
        apply_error = apply_error.max(approx.dist2(&exact));
    }
    let f_norm = f.norm2();
    let bound = 3.0 * fit_error * f_norm + 1e-10 * f_norm;
    let pass = if degree == 0 { None } else { Some(apply_error <= bound) };
    Ok(ProbeReport { degree, fit_error, apply_error, f_norm, bound, spectrum_points: points.len(), pass })
}

/// One row of a [`ConvergenceTrace`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub k: usize,
    /// `‖u_k − u‖_A`.
    pub a_dist: f64,
    /// `‖u_k − u‖₂`.
    pub l2_dist: f64,
    /// `max_j |⟨p_k − p, e_j⟩|` over the probe family.
    pub weak_dist: f64,
    /// `‖c_k − c‖₂`.
    pub c_dist: f64,
    /// `‖d_k − d‖₂`.
    pub d_dist: f64,
    /// `|‖u_k‖_A − ‖u‖_A|`.
    pub norm_gap: f64,
    /// `‖p_k − p‖_A`.
    pub p_a_dist: f64,
}

/// Per-hypothesis verdicts: `true` means the column was judged to tend to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypotheses {
    pub norm_convergence: bool,
    pub l2_convergence: bool,
    pub weak_convergence: bool,
}

impl Hypotheses {
    pub fn all(&self) -> bool {
        self.norm_convergence && self.l2_convergence && self.weak_convergence
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    HypothesesViolated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTrace {
    pub rows: Vec<ConvergenceRow>,
    pub hypotheses: Hypotheses,
    pub tolerance: f64,
    /// Last quarter of the `c` and `d` columns non-increasing up to 10% slack.
    pub monotone_tail: bool,
    pub verdict: Verdict,
}

impl ConvergenceTrace {
    pub fn last(&self) -> Option<&ConvergenceRow> {
        self.rows.last()
    }
}

/// Thresholds for [`verify_l2l2`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceOptions {
    /// Final `‖c_K − c‖₂` and `‖d_K − d‖₂` must fall below this.
    pub tolerance: f64,
    /// A hypothesis column counts as vanishing when its last value is below
    /// this absolute level ...
    pub hypothesis_floor: f64,
    /// ... or below this fraction of its largest value with a monotone tail.
    pub decay_ratio: f64,
    /// Number of seeded random probes added to the `δ_t` probes.
    pub random_probes: usize,
    pub probe_seed: u64,
}

impl Default for ConvergenceOptions {
    fn default() -> Self {
        Self { tolerance: 1e-6, hypothesis_floor: 1e-10, decay_ratio: 0.1, random_probes: 32, probe_seed: 0x5eed }
    }
}

fn tail_non_increasing(values: &[f64]) -> bool {
    let start = values.len() - values.len().div_ceil(4);
    values[start..].windows(2).all(|w| w[1] <= 1.1 * w[0] + 1e-14)
}

fn vanishes(values: &[f64], options: &ConvergenceOptions) -> bool {
    let Some(&last) = values.last() else {
        return true;
    };
    let peak = values.iter().copied().fold(0.0, f64::max);
    let tail_start = values[values.len() - values.len().div_ceil(4)];
    let decreasing = last < tail_start && tail_non_increasing(values);
    last <= options.hypothesis_floor || (last <= options.decay_ratio * peak && decreasing)
}

pub fn verify_l2l2(u: &GFunction, u_seq: &[GFunction]) -> Result<ConvergenceTrace> {
    verify_l2l2_with(u, u_seq, &ConvergenceOptions::default())
}

/// Canonical representations of `u` and every `u_k`, the three hypothesis
/// columns and the two conclusion columns.
pub fn verify_l2l2_with(u: &GFunction, u_seq: &[GFunction], options: &ConvergenceOptions) -> Result<ConvergenceTrace> {
    let g = u.group();
    for uk in u_seq {
        u.ensure_same_group(uk)?;
    }
    let backend = Backend::for_group(g);
    let rep = canonical_rep_with(u, backend)?;
    let u_norm = a_norm_with(u, backend)?;
    let mut probe_rng = random::rng(options.probe_seed);
    let probes: Vec<GFunction> = (0..options.random_probes).map(|_| random::unit_vector(g, &mut probe_rng)).collect();

    let mut rows = Vec::with_capacity(u_seq.len());
    for (i, uk) in u_seq.iter().enumerate() {
        let rk = canonical_rep_with(uk, backend)?;
        let diff = uk - u;
        let p_diff = &rk.polar.p - &rep.polar.p;
        let mut weak = p_diff.norm_inf();
        for e in &probes {
            weak = weak.max(p_diff.inner(e)?.norm());
        }
        rows.push(ConvergenceRow {
            k: i + 1,
            a_dist: a_norm_with(&diff, backend)?,
            l2_dist: diff.norm2(),
            weak_dist: weak,
            c_dist: rk.c.dist2(&rep.c),
            d_dist: rk.d.dist2(&rep.d),
            norm_gap: (a_norm_with(uk, backend)? - u_norm).abs(),
            p_a_dist: a_norm_with(&p_diff, backend)?,
        });
    }
    let column = |f: fn(&ConvergenceRow) -> f64| rows.iter().map(f).collect::<Vec<f64>>();
    let hypotheses = Hypotheses {
        norm_convergence: vanishes(&column(|r| r.norm_gap), options),
        l2_convergence: vanishes(&column(|r| r.l2_dist), options),
        weak_convergence: vanishes(&column(|r| r.weak_dist), options),
    };
    Ok(finish(rows, hypotheses, options))
}

fn finish(rows: Vec<ConvergenceRow>, hypotheses: Hypotheses, options: &ConvergenceOptions) -> ConvergenceTrace {
    let c_col: Vec<f64> = rows.iter().map(|r| r.c_dist).collect();
    let d_col: Vec<f64> = rows.iter().map(|r| r.d_dist).collect();
    let monotone_tail = rows.is_empty() || (tail_non_increasing(&c_col) && tail_non_increasing(&d_col));
    let verdict = if !hypotheses.all() {
        Verdict::HypothesesViolated
    } else if rows.last().is_none_or(|r| r.c_dist <= options.tolerance && r.d_dist <= options.tolerance) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    ConvergenceTrace { rows, hypotheses, tolerance: options.tolerance, monotone_tail, verdict }
}

pub fn verify_ckak(u: &GFunction, u_seq: &[GFunction], support_bound: &SubsetIndex) -> Result<ConvergenceTrace> {
    verify_ckak_with(u, u_seq, support_bound, &ConvergenceOptions::default())
}

/// Same trace as [`verify_l2l2_with`], with `A(G)` convergence as the only
/// hypothesis and a common support `K` required of every `u_k`.
pub fn verify_ckak_with(
    u: &GFunction,
    u_seq: &[GFunction],
    support_bound: &SubsetIndex,
    options: &ConvergenceOptions,
) -> Result<ConvergenceTrace> {
    if !u.group().same_as(support_bound.group()) {
        return Err(Error::GroupMismatch);
    }
    for f in std::iter::once(u).chain(u_seq) {
        let threshold = 1e-12 * f.norm_inf();
        let outside = (0..f.len())
            .filter(|&x| !support_bound.contains(x))
            .map(|x| f[x].norm())
            .fold(0.0, f64::max);
        if outside > threshold {
            return Err(Error::SupportViolation(outside));
        }
    }
    let trace = verify_l2l2_with(u, u_seq, options)?;
    let a_col: Vec<f64> = trace.rows.iter().map(|r| r.a_dist).collect();
    let converges = vanishes(&a_col, options);
    let hypotheses = Hypotheses { norm_convergence: converges, l2_convergence: converges, weak_convergence: converges };
    Ok(finish(trace.rows, hypotheses, options))
}

/// Builtin sequence generators for the convergence verifier.
pub mod sequences {
    use super::*;

    /// `u_k = u`.
    pub fn constant(u: &GFunction, len: usize) -> Vec<GFunction> {
        vec![u.clone(); len]
    }

    /// `u_k = (1 − 1/k) u`.
    pub fn scaled(u: &GFunction, len: usize) -> Vec<GFunction> {
        (1..=len).map(|k| u.scale_real(1.0 - 1.0 / k as f64)).collect()
    }

    /// `u_k = (1 − 1/k) u + k⁻² v`.
    pub fn perturbed(u: &GFunction, v: &GFunction, len: usize) -> Vec<GFunction> {
        (1..=len)
            .map(|k| {
                let k = k as f64;
                &u.scale_real(1.0 - 1.0 / k) + &v.scale_real(1.0 / (k * k))
            })
            .collect()
    }

    /// `u_k = u + a·δ_t` with a fixed offset, so no hypothesis holds.
    pub fn offset(u: &GFunction, t: usize, amplitude: Complex64, len: usize) -> Vec<GFunction> {
        let bump = GFunction::delta(u.group(), t).scale(amplitude);
        vec![u + &bump; len]
    }

    /// `u_k = u + (−1)^k a·δ_t`: oscillates without converging.
    pub fn oscillating(u: &GFunction, t: usize, amplitude: Complex64, len: usize) -> Vec<GFunction> {
        let bump = GFunction::delta(u.group(), t).scale(amplitude);
        (1..=len).map(|k| if k % 2 == 0 { u + &bump } else { u - &bump }).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;

    #[test]
    fn scalar_functions() {
        assert_eq!((h(1.0), q(1.0)), (0.0, 1.0));
        assert_eq!((h(4.0), q(4.0)), (0.0, 0.5));
        for i in 0..200 {
            let t = i as f64 * 0.05;
            assert!((h(t) + q(t) * t - t.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn trivial_operators() {
        let g = Group::cyclic(8).unwrap();
        let e = ConvOperator::new(&GFunction::delta(&g, 0));
        assert!(e.sqrt_op().unwrap().kernel().max_abs_diff(e.kernel()) < 1e-14);
        let zero = ConvOperator::new(&GFunction::zeros(&g));
        let r = zero.resolvent(Sign::Plus).unwrap();
        let target = CMatrix::identity(8, 8) * -Complex64::i();
        assert!(dense::max_entry(&(r.to_matrix() - target)) < 1e-14);
    }

    #[test]
    fn sqrt_and_split_on_both_backends() {
        let mut rng = random::rng(21);
        for (g, backend) in [(Group::cyclic(12).unwrap(), Backend::Fourier), (Group::symmetric(3).unwrap(), Backend::Dense)] {
            let p = random::positive_definite(&g, &mut rng).scale_real(3.0);
            let op = ConvOperator::with_backend(&p, backend).unwrap();
            let root = op.sqrt_op().unwrap().to_matrix();
            assert!(dense::max_entry(&(&root * &root - op.to_matrix())) < 1e-10);
            let (hh, qq) = op.hq_split().unwrap();
            let recombined = hh.to_matrix() + qq.to_matrix() * op.to_matrix();
            assert!(dense::max_entry(&(recombined - root)) < 1e-10);
            assert!(qq.operator_norm() <= 1.0 + 1e-12);
            for sign in [Sign::Plus, Sign::Minus] {
                assert!(op.resolvent(sign).unwrap().operator_norm() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn sqrt_rejects_non_psd() {
        let g = Group::cyclic(4).unwrap();
        assert!(ConvOperator::new(&GFunction::delta(&g, 1)).sqrt_op().is_err());
    }

    #[test]
    fn probe_examples() {
        let g = Group::cyclic(16).unwrap();
        let mut rng = random::rng(22);
        let f = random::function(&g, &mut rng);
        let scalar = ConvOperator::new(&GFunction::delta(&g, 0).scale_real(2.5));
        let report = stone_weierstrass_probe(std::slice::from_ref(&scalar), &f, 1).unwrap();
        assert!(report.fit_error < 1e-12 && report.pass == Some(true));
        let p = random::positive_definite(&g, &mut rng).scale_real(4.0);
        let report = stone_weierstrass_probe(&[ConvOperator::new(&p)], &f, 8).unwrap();
        assert_eq!(report.pass, Some(true), "{report:?}");
        let report = stone_weierstrass_probe(&[ConvOperator::new(&p)], &f, 0).unwrap();
        assert_eq!(report.pass, None);
    }

    #[test]
    fn constant_sequence_has_zero_trace() {
        let g = Group::cyclic(16).unwrap();
        let mut rng = random::rng(23);
        let u = random::function(&g, &mut rng);
        let trace = verify_l2l2(&u, &sequences::constant(&u, 5)).unwrap();
        assert!(trace.rows.iter().all(|r| r.a_dist == 0.0 && r.c_dist == 0.0 && r.d_dist == 0.0));
        assert_eq!(trace.verdict, Verdict::Pass);
    }

    #[test]
    fn offset_sequence_flags_hypotheses() {
        let g = Group::cyclic(16).unwrap();
        let mut rng = random::rng(24);
        let u = random::function(&g, &mut rng);
        let trace = verify_l2l2(&u, &sequences::offset(&u, 3, Complex64::new(0.5, 0.5), 8)).unwrap();
        assert!(!trace.hypotheses.norm_convergence && !trace.hypotheses.l2_convergence);
        assert_eq!(trace.verdict, Verdict::HypothesesViolated);
    }

    #[test]
    fn ckak_support_violation() {
        let g = Group::cyclic(8).unwrap();
        let k = SubsetIndex::new(&g, [0, 1, 2]).unwrap();
        let u = GFunction::delta(&g, 1);
        let bad = vec![GFunction::delta(&g, 5)];
        assert!(matches!(verify_ckak(&u, &bad, &k), Err(Error::SupportViolation(_))));
        let good = sequences::scaled(&u, 16);
        let trace = verify_ckak(&u, &good, &k).unwrap();
        assert!(trace.hypotheses.all());
    }
}
