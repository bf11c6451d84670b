//! Subsets of a group, orthogonal projections onto spans of translates
//! `Λ(S·c) = span{λ(s)c : s ∈ S}`, and the abelian duality between
//! `P_{S·c}(d)` and `P_{S⁻¹·d}(c)`.

use std::collections::VecDeque;
use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::canonical::CanonicalRep;
use crate::dense::{self, CMatrix};
use crate::error::{Error, Result};
use crate::group::{GFunction, Group};
use crate::transform::{self, coefficient};

/// Sorted, duplicate-free set of group elements.
#[derive(Debug, Clone)]
pub struct SubsetIndex {
    group: Arc<Group>,
    indices: Vec<usize>,
}

impl PartialEq for SubsetIndex {
    fn eq(&self, other: &Self) -> bool {
        self.group.same_as(&other.group) && self.indices == other.indices
    }
}

impl SubsetIndex {
    pub fn new(group: &Arc<Group>, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut indices: Vec<usize> = indices.into_iter().collect();
        if let Some(&bad) = indices.iter().find(|&&i| i >= group.order()) {
            return Err(Error::IndexOutOfRange(bad));
        }
        indices.sort_unstable();
        indices.dedup();
        Ok(Self { group: Arc::clone(group), indices })
    }

    pub fn empty(group: &Arc<Group>) -> Self {
        Self { group: Arc::clone(group), indices: Vec::new() }
    }

    pub fn whole(group: &Arc<Group>) -> Self {
        Self { group: Arc::clone(group), indices: (0..group.order()).collect() }
    }

    pub fn singleton(group: &Arc<Group>, s: usize) -> Result<Self> {
        Self::new(group, [s])
    }

    /// Elements `x` with `pred(x)`.
    pub fn from_predicate(group: &Arc<Group>, pred: impl Fn(usize) -> bool) -> Self {
        Self { group: Arc::clone(group), indices: (0..group.order()).filter(|&x| pred(x)).collect() }
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, s: usize) -> bool {
        self.indices.binary_search(&s).is_ok()
    }

    fn ensure_same_group(&self, other: &Self) -> Result<()> {
        if self.group.same_as(&other.group) {
            Ok(())
        } else {
            Err(Error::GroupMismatch)
        }
    }

    pub fn complement(&self) -> Self {
        Self::from_predicate(&self.group, |x| !self.contains(x))
    }

    /// `S⁻¹`.
    pub fn inverse(&self) -> Self {
        Self::new(&self.group, self.indices.iter().map(|&s| self.group.inv(s))).expect("in range")
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.ensure_same_group(other)?;
        Self::new(&self.group, self.indices.iter().chain(&other.indices).copied())
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.ensure_same_group(other)?;
        Ok(Self::from_predicate(&self.group, |x| self.contains(x) && other.contains(x)))
    }

    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.ensure_same_group(other)?;
        Ok(Self::from_predicate(&self.group, |x| self.contains(x) && !other.contains(x)))
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.group.same_as(&other.group) && self.indices.iter().all(|&s| other.contains(s))
    }

    /// `U·S = {u s : u ∈ U, s ∈ S}` with `self = U`.
    pub fn product(&self, other: &Self) -> Result<Self> {
        self.ensure_same_group(other)?;
        let g = &self.group;
        Self::new(g, self.indices.iter().flat_map(|&u| other.indices.iter().map(move |&s| g.mul(u, s))))
    }

    /// `tS`.
    pub fn translate(&self, t: usize) -> Self {
        Self::new(&self.group, self.indices.iter().map(|&s| self.group.mul(t, s))).expect("in range")
    }

    /// Word-metric distance from the set, generators `±e_j` on `ℤ_{n₁}×…×ℤ_{n_r}`.
    /// `None` marks elements unreachable from an empty set.
    pub fn word_distances(&self) -> Result<Vec<Option<usize>>> {
        let g = &self.group;
        let factors = g.factors().ok_or(Error::NotAbelian)?;
        let mut dist = vec![None; g.order()];
        let mut queue = VecDeque::new();
        for &s in &self.indices {
            dist[s] = Some(0);
            queue.push_back(s);
        }
        while let Some(x) = queue.pop_front() {
            let d = dist[x].expect("queued nodes have distances");
            let coords = g.coords(x).expect("abelian");
            for (j, &n) in factors.iter().enumerate() {
                for step in [1, n - 1] {
                    let mut next = coords.clone();
                    next[j] = (next[j] + step) % n;
                    let y = g.index(&next).expect("valid coords");
                    if dist[y].is_none() {
                        dist[y] = Some(d + 1);
                        queue.push_back(y);
                    }
                }
            }
        }
        Ok(dist)
    }

    /// `{x : dist(x, S) ≤ radius}` in the word metric.
    pub fn ball(&self, radius: usize) -> Result<Self> {
        let dist = self.word_distances()?;
        Ok(Self::from_predicate(&self.group, |x| dist[x].is_some_and(|d| d <= radius)))
    }

    /// Word-metric distance between two sets (`None` if either is empty).
    pub fn distance(&self, other: &Self) -> Result<Option<usize>> {
        self.ensure_same_group(other)?;
        let dist = self.word_distances()?;
        Ok(other.indices.iter().filter_map(|&x| dist[x]).min())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Solver {
    DensePseudoinverse,
    Iterative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionReport {
    /// `‖P_{S·c}(d)‖₂`.
    pub residual_norm: f64,
    pub gram_rank: usize,
    /// Ratio of extreme retained Gram eigenvalues.
    pub gram_condition: f64,
    pub solver: Solver,
    pub iterations: usize,
    pub converged: bool,
    /// Why the iterative solver handed over to the dense path.
    pub fallback: Option<String>,
}

/// `Gram[i, j] = ⟨λ(s_j)c, λ(s_i)c⟩ = γ_{c,c}(s_i⁻¹ s_j)`.
pub fn gram_matrix(c: &GFunction, s: &SubsetIndex) -> Result<CMatrix> {
    if !c.group().same_as(s.group()) {
        return Err(Error::GroupMismatch);
    }
    let g = c.group();
    let gamma = coefficient(c, c)?;
    let idx = s.indices();
    Ok(CMatrix::from_fn(idx.len(), idx.len(), |i, j| gamma[g.mul(g.inv(idx[i]), idx[j])]))
}

/// `N × |S|` matrix whose columns are the translates `λ(s_j)c`.
pub fn translate_matrix(c: &GFunction, s: &SubsetIndex) -> CMatrix {
    let g = c.group();
    let idx = s.indices();
    CMatrix::from_fn(g.order(), idx.len(), |x, j| c[g.mul(g.inv(idx[j]), x)])
}

/// `P_{Λ(S·c)}(d)` via the thin SVD of the translate matrix (equivalently the
/// spectral pseudoinverse of the Gram matrix).
pub fn project(c: &GFunction, d: &GFunction, s: &SubsetIndex) -> Result<(GFunction, ProjectionReport)> {
    c.ensure_same_group(d)?;
    if !c.group().same_as(s.group()) {
        return Err(Error::GroupMismatch);
    }
    let g = c.group();
    let n = g.order();
    if s.is_empty() {
        return Ok((GFunction::zeros(g), dense_report(0.0, 0, 1.0)));
    }
    let t = translate_matrix(c, s);
    let sigma = t.singular_values();
    let smax = sigma.iter().copied().fold(0.0, f64::max);
    let cutoff = n.max(s.len()) as f64 * f64::EPSILON * smax;
    let kept: Vec<usize> = (0..sigma.len()).filter(|&i| sigma[i] > cutoff && sigma[i] > 0.0).collect();
    let q = t.col_piv_qr().q();
    let dv = dense::to_vector(d);
    let mut out = DVector::<Complex64>::zeros(n);
    for i in 0..kept.len() {
        let col = q.column(i);
        let coeff = col.dotc(&dv);
        out += col * coeff;
    }
    let smin = kept.iter().map(|&i| sigma[i]).fold(f64::INFINITY, f64::min);
    let condition = if kept.is_empty() { 1.0 } else { (smax / smin).powi(2) };
    let projection = GFunction::from_fn(g, |x| out[x]);
    let norm = projection.norm2();
    Ok((projection, dense_report(norm, kept.len(), condition)))
}

fn dense_report(norm: f64, rank: usize, condition: f64) -> ProjectionReport {
    ProjectionReport {
        residual_norm: norm,
        gram_rank: rank,
        gram_condition: condition,
        solver: Solver::DensePseudoinverse,
        iterations: 0,
        converged: true,
        fallback: None,
    }
}

/// `b_i = ⟨d, λ(s_i)c⟩`.
pub fn rhs_vector(c: &GFunction, d: &GFunction, s: &SubsetIndex) -> Result<Vec<Complex64>> {
    let cross = d.convolve(&c.tilde())?;
    Ok(s.indices().iter().map(|&x| cross[x]).collect())
}

/// [`project`] for `(c, d)` from a canonical representation of `u`, after
/// asserting `⟨d, λ(s_i)c⟩ = u(s_i)`.
pub fn project_canonical(rep: &CanonicalRep, u: &GFunction, s: &SubsetIndex) -> Result<(GFunction, ProjectionReport)> {
    let b = rhs_vector(&rep.c, &rep.d, s)?;
    let drift = s.indices().iter().zip(&b).map(|(&x, bi)| (bi - u[x]).norm()).fold(0.0, f64::max);
    let scale = 1.0 + rep.c.norm2() * rep.d.norm2();
    if drift > 1e-9 * scale {
        return Err(Error::ConventionDrift(drift));
    }
    project(&rep.c, &rep.d, s)
}

/// Knobs for [`project_fast_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FastOptions {
    /// Relative residual target `‖G a − b‖ ≤ tol ‖b‖`.
    pub tol: f64,
    /// Defaults to `4 |S|`.
    pub max_iter: Option<usize>,
    pub allow_fallback: bool,
}

impl Default for FastOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: None, allow_fallback: true }
    }
}

pub fn project_fast(
    c: &GFunction,
    d: &GFunction,
    s: &SubsetIndex,
    tol: f64,
    max_iter: usize,
) -> Result<(GFunction, ProjectionReport)> {
    project_fast_with(c, d, s, FastOptions { tol, max_iter: Some(max_iter), allow_fallback: true })
}

/// Conjugate gradients on the Gram system with matvec
/// `(G a)_i = (A ∗ γ̌)(s_i)`, `A = Σ_j a_j δ_{s_j}`, evaluated by FFT.
pub fn project_fast_with(
    c: &GFunction,
    d: &GFunction,
    s: &SubsetIndex,
    options: FastOptions,
) -> Result<(GFunction, ProjectionReport)> {
    c.ensure_same_group(d)?;
    if !c.group().same_as(s.group()) {
        return Err(Error::GroupMismatch);
    }
    let g = c.group();
    if !g.is_abelian() {
        return Err(Error::NotAbelian);
    }
    let m = s.len();
    let max_iter = options.max_iter.unwrap_or(4 * m).max(1);
    let fallback = |reason: String, iterations: usize| -> Result<(GFunction, ProjectionReport)> {
        let (projection, mut report) = project(c, d, s)?;
        report.iterations = iterations;
        report.fallback = Some(reason);
        Ok((projection, report))
    };
    if m == 0 {
        return project(c, d, s);
    }

    let c_hat = transform::fourier(c)?;
    let power: Vec<f64> = c_hat.values().iter().map(|v| v.norm_sqr()).collect();
    let max_power = power.iter().copied().fold(0.0, f64::max);
    let support = power.iter().filter(|&&p| p > 1e-12 * max_power).count();
    if support < m {
        return fallback(format!("Gram matrix is singular: |supp ĉ| = {support} < |S| = {m}"), 0);
    }

    let gamma_check = coefficient(c, c)?.check();
    let gamma_check_hat = transform::fourier(&gamma_check)?;
    let spread = |a: &[Complex64]| {
        let mut f = GFunction::zeros(g);
        for (&x, &v) in s.indices().iter().zip(a) {
            f.values_mut()[x] = v;
        }
        f
    };
    let gram_apply = |a: &[Complex64]| -> Result<Vec<Complex64>> {
        let hat = transform::fourier(&spread(a))?.pointwise(&gamma_check_hat);
        let full = transform::inv_fourier(&hat);
        Ok(s.indices().iter().map(|&x| full[x]).collect())
    };
    let dot = |x: &[Complex64], y: &[Complex64]| -> Complex64 { x.iter().zip(y).map(|(a, b)| a.conj() * b).sum() };
    let norm = |x: &[Complex64]| dot(x, x).re.sqrt();

    let b = rhs_vector(c, d, s)?;
    let b_norm = norm(&b);
    if b_norm == 0.0 {
        let report = ProjectionReport {
            residual_norm: 0.0,
            gram_rank: m,
            gram_condition: f64::NAN,
            solver: Solver::Iterative,
            iterations: 0,
            converged: true,
            fallback: None,
        };
        return Ok((GFunction::zeros(g), report));
    }
    let mut x = vec![Complex64::new(0.0, 0.0); m];
    let mut r = b.clone();
    let mut p = r.clone();
    let mut rr = dot(&r, &r).re;
    let mut best = rr.sqrt();
    let mut last_improvement = 0;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        if rr.sqrt() <= options.tol * b_norm {
            converged = true;
            break;
        }
        let gp = gram_apply(&p)?;
        let curvature = dot(&p, &gp).re;
        if curvature <= 1e-14 * dot(&p, &p).re * max_power {
            return fallback(format!("breakdown at iteration {iterations}"), iterations);
        }
        let alpha = rr / curvature;
        for i in 0..m {
            x[i] += p[i] * alpha;
            r[i] -= gp[i] * alpha;
        }
        iterations += 1;
        let rr_new = dot(&r, &r).re;
        if rr_new.sqrt() < 0.99 * best {
            best = rr_new.sqrt();
            last_improvement = iterations;
        } else if iterations - last_improvement >= 50 {
            return fallback(format!("stagnation after {iterations} iterations"), iterations);
        }
        let beta = rr_new / rr;
        for i in 0..m {
            p[i] = r[i] + p[i] * beta;
        }
        rr = rr_new;
    }
    if !converged && rr.sqrt() <= options.tol * b_norm {
        converged = true;
    }
    if !converged && options.allow_fallback {
        return fallback(format!("max_iter = {max_iter} exceeded"), iterations);
    }
    let projection = spread(&x).convolve(c)?;
    let report = ProjectionReport {
        residual_norm: projection.norm2(),
        gram_rank: m,
        gram_condition: f64::NAN,
        solver: Solver::Iterative,
        iterations,
        converged,
        fallback: None,
    };
    Ok((projection, report))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LtwoReport {
    /// `‖P_{S·c}(d)‖₂`.
    pub lhs: f64,
    /// `‖P_{S⁻¹·d}(c)‖₂`.
    pub rhs: f64,
    pub psi_bound: f64,
    /// `psi_bound · rhs − lhs`.
    pub slack: f64,
    pub pass: bool,
}

/// Compares `‖P_{S·c}(d)‖₂` with `‖ψ‖_∞ ‖P_{S⁻¹·d}(c)‖₂` where `d̂ = ψ ĉ`.
pub fn check_ltwo_lemma(c: &GFunction, d: &GFunction, psi_bound: f64, s: &SubsetIndex) -> Result<LtwoReport> {
    c.ensure_same_group(d)?;
    let c_hat = transform::fourier(c)?;
    let d_hat = transform::fourier(d)?;
    let c_max = c_hat.sup_norm();
    let d_max = d_hat.sup_norm();
    for xi in 0..c.len() {
        let (cv, dv) = (c_hat[xi], d_hat[xi]);
        if cv.norm() <= 1e-12 * c_max {
            if dv.norm() > 1e-9 * d_max.max(1e-300) {
                return Err(Error::Precondition(format!("d̂ does not vanish where ĉ does (ξ = {xi})")));
            }
        } else if dv.norm() > psi_bound * cv.norm() * (1.0 + 1e-9) + 1e-12 * d_max {
            return Err(Error::Precondition(format!(
                "|d̂/ĉ| = {:.6e} exceeds the bound {psi_bound} at ξ = {xi}",
                dv.norm() / cv.norm()
            )));
        }
    }
    let lhs = project(c, d, s)?.1.residual_norm;
    let rhs = project(d, c, &s.inverse())?.1.residual_norm;
    let slack = psi_bound * rhs - lhs;
    Ok(LtwoReport { lhs, rhs, psi_bound, slack, pass: slack >= -1e-9 })
}
