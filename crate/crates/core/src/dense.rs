//! Dense matrix realizations of translation and convolution operators.
//!
//! Matrices act on column vectors indexed by group elements.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::group::{GFunction, Group};

pub type CMatrix = DMatrix<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub(crate) fn to_vector(f: &GFunction) -> DVector<Complex64> {
    DVector::from_column_slice(f.values())
}

pub(crate) fn matvec(m: &CMatrix, f: &GFunction) -> GFunction {
    let v = m * to_vector(f);
    GFunction::from_fn(f.group(), |i| v[i])
}

/// Matrix of `λ(s)`: entry `[x, y] = 1` iff `x = s y`.
pub fn left_translation(group: &Group, s: usize) -> CMatrix {
    let n = group.order();
    let mut m = CMatrix::from_element(n, n, ZERO);
    for y in 0..n {
        m[(group.mul(s, y), y)] = ONE;
    }
    m
}

/// Matrix of `f ↦ f ∗ b`: entry `[x, y] = b(y⁻¹x)`.
pub fn right_convolution(b: &GFunction) -> CMatrix {
    let g = b.group();
    let n = g.order();
    CMatrix::from_fn(n, n, |x, y| b[g.mul(g.inv(y), x)])
}

/// Matrix of `f ↦ a ∗ f` (an element of VN(G)): entry `[x, y] = a(x y⁻¹)`.
pub fn left_convolution(a: &GFunction) -> CMatrix {
    let g = a.group();
    let n = g.order();
    CMatrix::from_fn(n, n, |x, y| a[g.mul(x, g.inv(y))])
}

/// Density `ρ_u = (1/N) Σ_t u(t) λ(t⁻¹)`, so that `tr(λ(s) ρ_u) = u(s)`.
pub fn density(u: &GFunction) -> CMatrix {
    let g = u.group();
    let n = g.order();
    let scale = 1.0 / n as f64;
    CMatrix::from_fn(n, n, |x, y| u[g.mul(y, g.inv(x))] * scale)
}

/// Inverse of [`density`]: `u(s) = tr(λ(s) ρ) = Σ_x ρ[s⁻¹x, x]`.
pub fn function_from_density(group: &std::sync::Arc<Group>, rho: &CMatrix) -> GFunction {
    GFunction::from_fn(group, |s| {
        let si = group.inv(s);
        (0..group.order()).map(|x| rho[(group.mul(si, x), x)]).sum()
    })
}

/// `tr(A B)` without forming the product.
pub(crate) fn trace_of_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for x in 0..n {
        for y in 0..a.ncols() {
            acc += a[(x, y)] * b[(y, x)];
        }
    }
    acc
}

/// Eigen-decomposition of the Hermitian part of `m`: ascending eigenvalues
/// and the matching orthonormal eigenvectors as columns.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let herm = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = herm.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// `V diag(f(λ)) V^H` for a Hermitian decomposition.
pub fn spectral_apply(values: &[f64], vectors: &CMatrix, f: impl Fn(f64) -> Complex64) -> CMatrix {
    let n = vectors.nrows();
    let mut scaled = vectors.clone();
    for (c, &lambda) in values.iter().enumerate() {
        let w = f(lambda);
        for r in 0..n {
            scaled[(r, c)] *= w;
        }
    }
    scaled * vectors.adjoint()
}

/// Max-entry asymmetry `max |m - m^H|`.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for x in 0..m.nrows() {
        for y in 0..=x {
            worst = worst.max((m[(x, y)] - m[(y, x)].conj()).norm());
        }
    }
    worst
}

pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Trace (nuclear) norm.
pub fn nuclear_norm(m: &CMatrix) -> f64 {
    singular_values(m).iter().sum()
}

pub fn operator_norm(m: &CMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

pub fn min_singular_value(m: &CMatrix) -> f64 {
    singular_values(m).last().copied().unwrap_or(0.0)
}

pub(crate) fn max_entry(m: &CMatrix) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}
