//! Fourier/Plancherel transform on finite abelian groups, the Fourier algebra
//! norm, and the group von Neumann algebra with its module actions on `A(G)`.
//!
//! Conventions:
//! * characters `χ_ξ(s) = exp(2πi Σ_j ξ_j s_j / n_j)`,
//!   transform `f̂(ξ) = Σ_s f(s) conj χ_ξ(s)`, so `(f∗g)^ = f̂ ĝ`;
//! * coefficients `γ_{f,g}(t) = ⟨λ(t)f, g⟩ = (ḡ ∗ f̌)(t)`;
//! * duality `⟨u, T⟩ = tr(T ρ_u)` with `ρ_u = (1/N) Σ_t u(t) λ(t⁻¹)`.
//!
//! Every element of `VN(G)` is a left convolution `L_a f = a ∗ f`. The
//! abelian backend stores its symbol `â`, the dense backend its matrix.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dense::{self, CMatrix};
use crate::error::{Error, Result};
use crate::fft;
use crate::group::{GFunction, Group};
use crate::random;

/// Residual bound for the identity suite on unit-normalized inputs.
pub const IDENTITY_TOLERANCE: f64 = 1e-10;

/// Which realization of `A(G)` / `VN(G)` to compute with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    /// Diagonalize by the abelian Fourier transform.
    Fourier,
    /// Dense `N x N` matrices; works on every group.
    Dense,
}

impl Backend {
    pub fn for_group(group: &Group) -> Self {
        if group.is_abelian() {
            Backend::Fourier
        } else {
            Backend::Dense
        }
    }

    pub(crate) fn check(self, group: &Group) -> Result<Self> {
        match self {
            Backend::Fourier if !group.is_abelian() => Err(Error::NotAbelian),
            b => Ok(b),
        }
    }
}

/// Function on the dual group, indexed like the group itself.
#[derive(Debug, Clone)]
pub struct DualFunction {
    group: Arc<Group>,
    values: Vec<Complex64>,
}

impl DualFunction {
    pub fn new(group: &Arc<Group>, values: Vec<Complex64>) -> Result<Self> {
        if !group.is_abelian() {
            return Err(Error::NotAbelian);
        }
        if values.len() != group.order() {
            return Err(Error::LengthMismatch { expected: group.order(), got: values.len() });
        }
        Ok(Self { group: Arc::clone(group), values })
    }

    pub fn from_fn(group: &Arc<Group>, f: impl FnMut(usize) -> Complex64) -> Result<Self> {
        Self::new(group, (0..group.order()).map(f).collect())
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self { group: Arc::clone(&self.group), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// `ξ ↦ m(-ξ)`.
    pub fn reflect(&self) -> Self {
        let g = &self.group;
        Self { group: Arc::clone(g), values: (0..g.order()).map(|x| self.values[g.inv(x)]).collect() }
    }

    pub fn pointwise(&self, other: &Self) -> Self {
        Self {
            group: Arc::clone(&self.group),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect(),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

impl std::ops::Index<usize> for DualFunction {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.values[i]
    }
}

/// `χ_ξ(s)`.
pub fn character(group: &Group, xi: usize, s: usize) -> Result<Complex64> {
    let factors = group.factors().ok_or(Error::NotAbelian)?;
    let (cx, cs) = (group.coords(xi).unwrap(), group.coords(s).unwrap());
    let phase: f64 = cx
        .iter()
        .zip(&cs)
        .zip(factors)
        .map(|((a, b), n)| ((a * b) % n) as f64 / *n as f64)
        .sum();
    Ok(Complex64::from_polar(1.0, 2.0 * PI * phase))
}

pub fn fourier(f: &GFunction) -> Result<DualFunction> {
    let factors = f.group().factors().ok_or(Error::NotAbelian)?;
    Ok(DualFunction { group: Arc::clone(f.group()), values: fft::forward(factors, f.values()) })
}

pub fn inv_fourier(hat: &DualFunction) -> GFunction {
    let factors = hat.group.factors().expect("dual functions live on abelian groups");
    GFunction::new(&hat.group, fft::inverse(factors, &hat.values)).expect("length preserved")
}

/// `γ_{f,g}(t) = ⟨λ(t)f, g⟩`.
pub fn coefficient(f: &GFunction, g: &GFunction) -> Result<GFunction> {
    g.bar().convolve(&f.check())
}

/// `‖u‖_{A(G)}` with the natural backend for the group.
pub fn a_norm(u: &GFunction) -> f64 {
    a_norm_with(u, Backend::for_group(u.group())).expect("natural backend always applies")
}

/// Abelian: `(1/N) Σ_ξ |û(ξ)|`. Dense: trace norm of `ρ_u`.
pub fn a_norm_with(u: &GFunction, backend: Backend) -> Result<f64> {
    match backend.check(u.group())? {
        Backend::Fourier => {
            let hat = fourier(u)?;
            Ok(hat.values.iter().map(|v| v.norm()).sum::<f64>() / u.len() as f64)
        }
        Backend::Dense => Ok(dense::nuclear_norm(&dense::density(u))),
    }
}

/// An element of the group von Neumann algebra `VN(G)`.
#[derive(Debug, Clone)]
pub enum VNOperator {
    /// Fourier multiplier: `(T f)^ = m · f̂`.
    Symbol(DualFunction),
    /// Dense matrix commuting with all right translations.
    Matrix { group: Arc<Group>, matrix: CMatrix },
}

impl VNOperator {
    /// `L_a : f ↦ a ∗ f`.
    pub fn from_kernel(a: &GFunction, backend: Backend) -> Result<Self> {
        match backend.check(a.group())? {
            Backend::Fourier => Ok(VNOperator::Symbol(fourier(a)?)),
            Backend::Dense => {
                Ok(VNOperator::Matrix { group: Arc::clone(a.group()), matrix: dense::left_convolution(a) })
            }
        }
    }

    pub fn identity(group: &Arc<Group>, backend: Backend) -> Result<Self> {
        Self::from_kernel(&GFunction::delta(group, group.identity()), backend)
    }

    /// `λ(t)`.
    pub fn translation(group: &Arc<Group>, t: usize, backend: Backend) -> Result<Self> {
        Self::from_kernel(&GFunction::delta(group, t), backend)
    }

    /// Accepts a matrix only if it commutes with right translations,
    /// i.e. `m[x, y]` depends on `x y⁻¹` alone.
    pub fn from_matrix(group: &Arc<Group>, matrix: CMatrix) -> Result<Self> {
        let n = group.order();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::LengthMismatch { expected: n, got: matrix.nrows() });
        }
        let e = group.identity();
        let scale = dense::max_entry(&matrix).max(1.0);
        let mut residual: f64 = 0.0;
        for x in 0..n {
            for y in 0..n {
                let z = group.mul(x, group.inv(y));
                residual = residual.max((matrix[(x, y)] - matrix[(z, e)]).norm());
            }
        }
        if residual > 1e-10 * scale {
            return Err(Error::NotInVonNeumannAlgebra(residual));
        }
        Ok(VNOperator::Matrix { group: Arc::clone(group), matrix })
    }

    pub fn group(&self) -> &Arc<Group> {
        match self {
            VNOperator::Symbol(m) => m.group(),
            VNOperator::Matrix { group, .. } => group,
        }
    }

    pub fn backend(&self) -> Backend {
        match self {
            VNOperator::Symbol(_) => Backend::Fourier,
            VNOperator::Matrix { .. } => Backend::Dense,
        }
    }

    /// The function `a` with `T = L_a` (equivalently `T δ_e`).
    pub fn kernel(&self) -> GFunction {
        match self {
            VNOperator::Symbol(m) => inv_fourier(m),
            VNOperator::Matrix { group, matrix } => {
                let e = group.identity();
                GFunction::from_fn(group, |x| matrix[(x, e)])
            }
        }
    }

    pub fn to_matrix(&self) -> CMatrix {
        match self {
            VNOperator::Symbol(_) => dense::left_convolution(&self.kernel()),
            VNOperator::Matrix { matrix, .. } => matrix.clone(),
        }
    }

    /// Action on `L²(G)`.
    pub fn apply(&self, f: &GFunction) -> Result<GFunction> {
        if !self.group().same_as(f.group()) {
            return Err(Error::GroupMismatch);
        }
        Ok(match self {
            VNOperator::Symbol(m) => inv_fourier(&fourier(f)?.pointwise(m)),
            VNOperator::Matrix { matrix, .. } => dense::matvec(matrix, f),
        })
    }

    pub fn adjoint(&self) -> Self {
        match self {
            VNOperator::Symbol(m) => VNOperator::Symbol(m.map(|v| v.conj())),
            VNOperator::Matrix { group, matrix } => {
                VNOperator::Matrix { group: Arc::clone(group), matrix: matrix.adjoint() }
            }
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (VNOperator::Symbol(a), VNOperator::Symbol(b)) => {
                if !a.group().same_as(b.group()) {
                    return Err(Error::GroupMismatch);
                }
                Ok(VNOperator::Symbol(a.pointwise(b)))
            }
            (VNOperator::Matrix { group, matrix: a }, VNOperator::Matrix { group: g2, matrix: b }) => {
                if !group.same_as(g2) {
                    return Err(Error::GroupMismatch);
                }
                Ok(VNOperator::Matrix { group: Arc::clone(group), matrix: a * b })
            }
            _ => Err(Error::BackendMismatch),
        }
    }

    /// Scalar combination `self + alpha * other`.
    pub fn add_scaled(&self, alpha: Complex64, other: &Self) -> Result<Self> {
        match (self, other) {
            (VNOperator::Symbol(a), VNOperator::Symbol(b)) => Ok(VNOperator::Symbol(DualFunction {
                group: Arc::clone(a.group()),
                values: a.values.iter().zip(&b.values).map(|(x, y)| x + alpha * y).collect(),
            })),
            (VNOperator::Matrix { group, matrix: a }, VNOperator::Matrix { matrix: b, .. }) => {
                Ok(VNOperator::Matrix { group: Arc::clone(group), matrix: a + b * alpha })
            }
            _ => Err(Error::BackendMismatch),
        }
    }

    /// `⟨u, T⟩`: `Σ_t a(t) u(t)` for `T = L_a`; computed as `tr(T ρ_u)` on the dense backend.
    pub fn pairing(&self, u: &GFunction) -> Result<Complex64> {
        if !self.group().same_as(u.group()) {
            return Err(Error::GroupMismatch);
        }
        match self {
            VNOperator::Symbol(m) => {
                let hat = fourier(u)?;
                let g = m.group();
                let total: Complex64 = (0..g.order()).map(|xi| m[xi] * hat[g.inv(xi)]).sum();
                Ok(total / g.order() as f64)
            }
            VNOperator::Matrix { matrix, .. } => Ok(dense::trace_of_product(matrix, &dense::density(u))),
        }
    }

    /// Largest entry (dense) or symbol value difference between two operators.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        match (self, other) {
            (VNOperator::Symbol(a), VNOperator::Symbol(b)) => {
                Ok(a.values.iter().zip(&b.values).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max))
            }
            (VNOperator::Matrix { matrix: a, .. }, VNOperator::Matrix { matrix: b, .. }) => {
                Ok(dense::max_entry(&(a - b)))
            }
            _ => Err(Error::BackendMismatch),
        }
    }

    pub fn operator_norm(&self) -> f64 {
        match self {
            VNOperator::Symbol(m) => m.sup_norm(),
            VNOperator::Matrix { matrix, .. } => dense::operator_norm(matrix),
        }
    }
}

/// `Ť`, defined by `⟨Ť, u⟩ = ⟨T, ǔ⟩`.
pub fn check_op(t: &VNOperator) -> VNOperator {
    match t {
        VNOperator::Symbol(m) => VNOperator::Symbol(m.reflect()),
        VNOperator::Matrix { group, matrix } => {
            VNOperator::Matrix { group: Arc::clone(group), matrix: matrix.transpose() }
        }
    }
}

/// `T̄ f = conj(T conj f)`.
pub fn bar_op(t: &VNOperator) -> VNOperator {
    match t {
        VNOperator::Symbol(m) => VNOperator::Symbol(m.reflect().map(|v| v.conj())),
        VNOperator::Matrix { group, matrix } => {
            VNOperator::Matrix { group: Arc::clone(group), matrix: matrix.map(|v| v.conj()) }
        }
    }
}

fn ensure_compatible(t: &VNOperator, u: &GFunction) -> Result<()> {
    if t.group().same_as(u.group()) {
        Ok(())
    } else {
        Err(Error::GroupMismatch)
    }
}

/// `T·u`, defined by `⟨S, T·u⟩ = ⟨ST, u⟩`.
pub fn act_left(t: &VNOperator, u: &GFunction) -> Result<GFunction> {
    ensure_compatible(t, u)?;
    match t {
        VNOperator::Symbol(m) => Ok(inv_fourier(&fourier(u)?.pointwise(&m.reflect()))),
        VNOperator::Matrix { group, matrix } => {
            Ok(dense::function_from_density(group, &(matrix * dense::density(u))))
        }
    }
}

/// `u·T`, defined by `⟨S, u·T⟩ = ⟨TS, u⟩`.
pub fn act_right(u: &GFunction, t: &VNOperator) -> Result<GFunction> {
    ensure_compatible(t, u)?;
    match t {
        VNOperator::Symbol(m) => Ok(inv_fourier(&fourier(u)?.pointwise(&m.reflect()))),
        VNOperator::Matrix { group, matrix } => {
            Ok(dense::function_from_density(group, &(dense::density(u) * matrix)))
        }
    }
}

/// Eymard's action `T∘u`, defined by `⟨S, T∘u⟩ = ⟨Ť S, u⟩`, evaluated pointwise
/// as `(T∘u)(s) = ⟨Ť λ(s), u⟩`.
pub fn act_eymard(t: &VNOperator, u: &GFunction) -> Result<GFunction> {
    ensure_compatible(t, u)?;
    let g = u.group();
    let n = g.order();
    match t {
        VNOperator::Symbol(m) => {
            let hat = fourier(u)?;
            let checked = m.reflect();
            let mut out = Vec::with_capacity(n);
            for s in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for xi in 0..n {
                    let translate_symbol = character(g, xi, s)?.conj();
                    acc += checked[xi] * translate_symbol * hat[g.inv(xi)];
                }
                out.push(acc / n as f64);
            }
            GFunction::new(g, out)
        }
        VNOperator::Matrix { matrix, .. } => {
            // tr(Ť λ(s) ρ_u) = Σ_{x,y} T[s y, x] ρ_u[y, x]
            let rho = dense::density(u);
            Ok(GFunction::from_fn(g, |s| {
                let mut acc = Complex64::new(0.0, 0.0);
                for y in 0..n {
                    let sy = g.mul(s, y);
                    for x in 0..n {
                        acc += matrix[(sy, x)] * rho[(y, x)];
                    }
                }
                acc
            }))
        }
    }
}

/// Outcome of one identity in the module-action suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityResult {
    pub max_residual: f64,
    pub trials: usize,
    pub pass: bool,
}

/// Max residual per identity over random trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppendixReport {
    pub group: String,
    pub backend: Backend,
    pub trials: usize,
    pub tolerance: f64,
    pub identities: BTreeMap<String, IdentityResult>,
    pub pass: bool,
}

pub const APPENDIX_IDENTITIES: [&str; 8] = ["leri", "check", "tilde", "tista", "inversion", "eyac", "leey", "l2ag"];

pub fn verify_appendix<R: Rng + ?Sized>(group: &Arc<Group>, trials: usize, rng: &mut R) -> Result<AppendixReport> {
    verify_appendix_with(group, Backend::for_group(group), trials, rng)
}

/// Evaluates both sides of each module-action identity on random unit
/// vectors `f, g`, random `u` and random `T = L_a` with `‖a‖₁ = 1`.
pub fn verify_appendix_with<R: Rng + ?Sized>(
    group: &Arc<Group>,
    backend: Backend,
    trials: usize,
    rng: &mut R,
) -> Result<AppendixReport> {
    let backend = backend.check(group)?;
    let mut worst: BTreeMap<&'static str, f64> = BTreeMap::new();
    for _ in 0..trials {
        let f = random::unit_vector(group, rng);
        let g = random::unit_vector(group, rng);
        let u = random::unit_vector(group, rng);
        let a = random::function(group, rng);
        let a = a.scale_real(1.0 / a.norm1());
        let t = VNOperator::from_kernel(&a, backend)?;
        let t_adj = t.adjoint();
        let t_check = check_op(&t);
        let t_bar = bar_op(&t);
        let gamma = coefficient(&f, &g)?;

        let mut record = |name: &'static str, value: f64| {
            let slot = worst.entry(name).or_insert(0.0);
            *slot = slot.max(value);
        };

        // T·γ_{f,g} = γ_{Tf,g},  γ_{f,g}·T = γ_{f,T*g}
        let leri = act_left(&t, &gamma)?
            .max_abs_diff(&coefficient(&t.apply(&f)?, &g)?)
            .max(act_right(&gamma, &t)?.max_abs_diff(&coefficient(&f, &t_adj.apply(&g)?)?));
        record("leri", leri);

        // γ̌_{f,g} = γ_{ḡ,f̄}
        record("check", gamma.check().max_abs_diff(&coefficient(&g.bar(), &f.bar())?));

        // γ̃_{f,g} = γ_{g,f}
        record("tilde", gamma.tilde().max_abs_diff(&coefficient(&g, &f)?));

        // Ť = T̄*, tested through the pairing and as operators.
        let pairing_gap = (t_check.pairing(&u)? - t.pairing(&u.check())?).norm();
        let operator_gap = t_check.max_abs_diff(&t_bar.adjoint())?;
        record("tista", pairing_gap.max(operator_gap));

        // (u·T)~ = T*·ũ,  (T·u)~ = ũ·T*
        let inversion = act_right(&u, &t)?
            .tilde()
            .max_abs_diff(&act_left(&t_adj, &u.tilde())?)
            .max(act_left(&t, &u)?.tilde().max_abs_diff(&act_right(&u.tilde(), &t_adj)?));
        record("inversion", inversion);

        // T∘γ_{f,g} = γ_{f,T̄g}
        record("eyac", act_eymard(&t, &gamma)?.max_abs_diff(&coefficient(&f, &t_bar.apply(&g)?)?));

        // T∘u = u·Ť
        let eymard_u = act_eymard(&t, &u)?;
        record("leey", eymard_u.max_abs_diff(&act_right(&u, &t_check)?));

        // T(u) = T∘u = u·Ť
        let direct = t.apply(&u)?;
        record("l2ag", direct.max_abs_diff(&eymard_u).max(direct.max_abs_diff(&act_right(&u, &t_check)?)));
    }
    let identities: BTreeMap<String, IdentityResult> = if trials == 0 {
        BTreeMap::new()
    } else {
        APPENDIX_IDENTITIES
            .iter()
            .map(|&name| {
                let max_residual = worst.get(name).copied().unwrap_or(0.0);
                (
                    name.to_string(),
                    IdentityResult { max_residual, trials, pass: max_residual <= IDENTITY_TOLERANCE },
                )
            })
            .collect()
    };
    let pass = identities.values().all(|r| r.pass);
    Ok(AppendixReport {
        group: group.name().to_string(),
        backend,
        trials,
        tolerance: IDENTITY_TOLERANCE,
        identities,
        pass,
    })
}
