//! Positive square roots, polar decomposition and the canonical
//! representation `u(s) = ⟨d, λ(s)c⟩` of elements of `A(G)`.

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dense::{self, CMatrix};
use crate::error::{Error, Result};
use crate::group::GFunction;
use crate::random;
use crate::transform::{self, bar_op, Backend, DualFunction, VNOperator};

/// Relative cutoff below which a singular value or Fourier coefficient
/// counts as zero when building partial isometries.
pub const SUPPORT_CUTOFF: f64 = 1e-12;

/// Most negative spectral value of `f` (abelian: of `f̂`, general: of `N ρ_f`),
/// together with the non-Hermitian defect.
fn spectral_extremes(f: &GFunction, backend: Backend) -> Result<(f64, f64)> {
    match backend.check(f.group())? {
        Backend::Fourier => {
            let hat = transform::fourier(f)?;
            let min_re = hat.values().iter().map(|v| v.re).fold(f64::INFINITY, f64::min);
            let max_im = hat.values().iter().map(|v| v.im.abs()).fold(0.0, f64::max);
            Ok((min_re, max_im))
        }
        Backend::Dense => {
            let gram = dense::density(f) * Complex64::new(f.len() as f64, 0.0);
            let defect = dense::hermitian_defect(&gram);
            let (values, _) = dense::hermitian_eigen(&gram);
            Ok((values.first().copied().unwrap_or(0.0), defect))
        }
    }
}

pub fn is_positive_definite(f: &GFunction) -> bool {
    is_positive_definite_with(f, Backend::for_group(f.group())).expect("natural backend")
}

/// `tol = 1e-10 ‖f‖_∞`; abelian: `f̂ ≥ -tol`, general: `ρ_f` Hermitian PSD.
pub fn is_positive_definite_with(f: &GFunction, backend: Backend) -> Result<bool> {
    let tol = 1e-10 * f.norm_inf();
    let (min, defect) = spectral_extremes(f, backend)?;
    Ok(min >= -tol && defect <= tol)
}

fn require_positive_definite(p: &GFunction, backend: Backend) -> Result<()> {
    if is_positive_definite_with(p, backend)? {
        Ok(())
    } else {
        let (min, defect) = spectral_extremes(p, backend)?;
        Err(Error::NotPositiveDefinite(if min < 0.0 { min } else { -defect }))
    }
}

pub fn positive_sqrt(p: &GFunction) -> Result<GFunction> {
    positive_sqrt_with(p, Backend::for_group(p.group()))
}

/// The unique `c` of positive type with `c ∗ c = p`.
pub fn positive_sqrt_with(p: &GFunction, backend: Backend) -> Result<GFunction> {
    require_positive_definite(p, backend)?;
    match backend {
        Backend::Fourier => {
            let hat = transform::fourier(p)?;
            Ok(transform::inv_fourier(&hat.map(|v| Complex64::new(clipped_sqrt(v.re), 0.0))))
        }
        Backend::Dense => {
            let root = sqrt_matrix(&dense::right_convolution(p));
            let e = p.group().identity();
            Ok(GFunction::from_fn(p.group(), |x| root[(x, e)]))
        }
    }
}

/// Spectral values within the positive-definiteness tolerance are clipped to zero.
fn clipped_sqrt(t: f64) -> f64 {
    t.max(0.0).sqrt()
}

/// Square root of a PSD matrix via its Hermitian eigen-decomposition.
pub(crate) fn sqrt_matrix(m: &CMatrix) -> CMatrix {
    let (values, vectors) = dense::hermitian_eigen(m);
    dense::spectral_apply(&values, &vectors, |t| Complex64::new(clipped_sqrt(t), 0.0))
}

fn phase(z: Complex64, cutoff: f64) -> Complex64 {
    let r = z.norm();
    if r <= cutoff || r == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        z / r
    }
}

/// `ũ = A·p` with `p` positive definite and `A` a minimal partial isometry.
#[derive(Debug, Clone)]
pub struct PolarDecomposition {
    pub u: GFunction,
    pub p: GFunction,
    pub a: VNOperator,
}

impl PolarDecomposition {
    /// Max residual of `ũ = A·p`, `p = A*·ũ` and `A A* A = A`.
    pub fn residuals(&self) -> Result<PolarResiduals> {
        let ut = self.u.tilde();
        let a_star = self.a.adjoint();
        let aaa = self.a.compose(&a_star)?.compose(&self.a)?;
        Ok(PolarResiduals {
            factor: transform::act_left(&self.a, &self.p)?.max_abs_diff(&ut),
            inverse: transform::act_left(&a_star, &ut)?.max_abs_diff(&self.p),
            partial_isometry: aaa.max_abs_diff(&self.a)?,
            norm_gap: (transform::a_norm(&self.u) - transform::a_norm(&self.p)).abs(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarResiduals {
    pub factor: f64,
    pub inverse: f64,
    pub partial_isometry: f64,
    pub norm_gap: f64,
}

impl PolarResiduals {
    pub fn max(&self) -> f64 {
        self.factor.max(self.inverse).max(self.partial_isometry).max(self.norm_gap)
    }
}

pub fn polar(u: &GFunction) -> PolarDecomposition {
    polar_with(u, Backend::for_group(u.group())).expect("natural backend")
}

/// Polar decomposition of `ũ`.
pub fn polar_with(u: &GFunction, backend: Backend) -> Result<PolarDecomposition> {
    let g = u.group();
    match backend.check(g)? {
        Backend::Fourier => {
            let hat = transform::fourier(u)?;
            let cutoff = SUPPORT_CUTOFF * hat.sup_norm();
            let p = transform::inv_fourier(&hat.map(|v| Complex64::new(v.norm(), 0.0)));
            let symbol = DualFunction::from_fn(g, |eta| phase(hat[g.inv(eta)], cutoff).conj())?;
            Ok(PolarDecomposition { u: u.clone(), p, a: VNOperator::Symbol(symbol) })
        }
        Backend::Dense => {
            let rho = dense::density(&u.tilde());
            let svd = rho.svd(true, true);
            let (w, xh) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
            let sigma = &svd.singular_values;
            let cutoff = SUPPORT_CUTOFF * sigma.iter().copied().fold(0.0, f64::max);
            let n = g.order();
            let mut a = CMatrix::zeros(n, n);
            let mut abs = CMatrix::zeros(n, n);
            for (i, &s) in sigma.iter().enumerate() {
                let xi = xh.row(i);
                let col = xh.row(i).adjoint();
                abs += &col * xi * Complex64::new(s, 0.0);
                if s > cutoff && s > 0.0 {
                    a += w.column(i) * xi;
                }
            }
            let p = dense::function_from_density(g, &abs);
            Ok(PolarDecomposition { u: u.clone(), p, a: VNOperator::Matrix { group: Arc::clone(g), matrix: a } })
        }
    }
}

/// `u(s) = ⟨d, λ(s)c⟩` with `c` of positive type.
#[derive(Debug, Clone)]
pub struct CanonicalRep {
    pub c: GFunction,
    pub d: GFunction,
    /// Abelian backend only: `d̂ = ψ ĉ`, `|ψ| = 1` on the support of `ĉ`.
    pub psi: Option<DualFunction>,
    pub polar: PolarDecomposition,
}

impl CanonicalRep {
    /// `s ↦ ⟨d, λ(s)c⟩`.
    pub fn reconstruct(&self) -> GFunction {
        self.d.convolve(&self.c.tilde()).expect("same group")
    }
}

pub fn canonical_rep(u: &GFunction) -> CanonicalRep {
    canonical_rep_with(u, Backend::for_group(u.group())).expect("natural backend")
}

/// `c = √p`, `d = Ā(c)` from the polar decomposition of `ũ`.
pub fn canonical_rep_with(u: &GFunction, backend: Backend) -> Result<CanonicalRep> {
    let polar = polar_with(u, backend)?;
    let p = &polar.p;
    let c = match backend {
        Backend::Fourier => {
            let hat = transform::fourier(p)?;
            transform::inv_fourier(&hat.map(|v| Complex64::new(clipped_sqrt(v.re), 0.0)))
        }
        Backend::Dense => {
            let root = sqrt_matrix(&dense::right_convolution(p));
            let e = u.group().identity();
            GFunction::from_fn(u.group(), |x| root[(x, e)])
        }
    };
    let a_bar = bar_op(&polar.a);
    let d = a_bar.apply(&c)?;
    let psi = match &a_bar {
        VNOperator::Symbol(m) => Some(m.clone()),
        VNOperator::Matrix { .. } => None,
    };
    Ok(CanonicalRep { c, d, psi, polar })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RightPositivityReport {
    pub trials: usize,
    pub min_real: f64,
    pub max_imag: f64,
    pub pass: bool,
}

/// Samples `⟨η ∗ p, η⟩` over random unit `η`.
pub fn right_positivity_check<R: Rng + ?Sized>(
    p: &GFunction,
    trials: usize,
    rng: &mut R,
) -> Result<RightPositivityReport> {
    require_positive_definite(p, Backend::for_group(p.group()))?;
    let mut min_real = f64::INFINITY;
    let mut max_imag: f64 = 0.0;
    for _ in 0..trials {
        let eta = random::unit_vector(p.group(), rng);
        let value = eta.convolve(p)?.inner(&eta)?;
        min_real = min_real.min(value.re);
        max_imag = max_imag.max(value.im.abs());
    }
    if trials == 0 {
        min_real = 0.0;
    }
    Ok(RightPositivityReport { trials, min_real, max_imag, pass: min_real >= -1e-10 && max_imag <= 1e-10 })
}

pub fn density_check(p: &GFunction) -> Result<f64> {
    density_check_with(p, Backend::for_group(p.group()))
}

/// Smallest singular value of `f ↦ f ∗ p + i f`.
pub fn density_check_with(p: &GFunction, backend: Backend) -> Result<f64> {
    require_positive_definite(p, backend)?;
    match backend {
        Backend::Fourier => {
            let hat = transform::fourier(p)?;
            Ok(hat.values().iter().map(|v| (v + Complex64::i()).norm()).fold(f64::INFINITY, f64::min))
        }
        Backend::Dense => {
            let n = p.len();
            let m = dense::right_convolution(p) + CMatrix::identity(n, n) * Complex64::i();
            Ok(dense::min_singular_value(&m))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use crate::group::Group;
    use crate::transform::a_norm;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// All principal Gram matrices `(f(s_i⁻¹ s_j))` PSD, checked on every subset.
    fn exhaustive_gram_oracle(f: &GFunction) -> bool {
        let g = f.group();
        let n = g.order();
        let tol = 1e-9 * f.norm_inf().max(1e-300);
        for mask in 1u32..(1 << n) {
            let pts: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let m = CMatrix::from_fn(pts.len(), pts.len(), |i, j| f[g.mul(g.inv(pts[i]), pts[j])]);
            if dense::hermitian_defect(&m) > tol {
                return false;
            }
            let (values, _) = dense::hermitian_eigen(&m);
            if values[0] < -tol {
                return false;
            }
        }
        true
    }

    #[test]
    fn positive_definiteness_examples() {
        let g = Group::cyclic(4).unwrap();
        assert!(is_positive_definite(&GFunction::delta(&g, 0)));
        assert!(!is_positive_definite(&GFunction::delta(&g, 1)));
        assert!(!exhaustive_gram_oracle(&GFunction::delta(&g, 1)));
    }

    #[test]
    fn positive_definiteness_matches_exhaustive_oracle() {
        let mut rng = random::rng(17);
        for g in [Group::cyclic(6).unwrap(), Group::symmetric(3).unwrap(), Group::abelian(&[2, 4]).unwrap()] {
            for trial in 0..20 {
                let f = if trial % 2 == 0 {
                    random::positive_definite(&g, &mut rng)
                } else {
                    let mut f = random::positive_definite(&g, &mut rng);
                    f.values_mut()[g.identity()] -= c(0.9, 0.0);
                    f
                };
                assert_eq!(is_positive_definite(&f), exhaustive_gram_oracle(&f), "{g} trial {trial}");
            }
        }
    }

    #[test]
    fn sqrt_on_z2() {
        let g = Group::cyclic(2).unwrap();
        let p = GFunction::from_real(&g, &[2.0, 2.0]).unwrap();
        let c = positive_sqrt(&p).unwrap();
        let direct = GFunction::from_fn(&g, |t| (0..2).map(|s| c[s] * c[g.mul(g.inv(s), t)]).sum());
        assert!(direct.max_abs_diff(&p) < 1e-14);
        assert!((c[0].re - 1.0).abs() < 1e-14 && (c[1].re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sqrt_of_delta_and_rejection() {
        let g = Group::symmetric(3).unwrap();
        let e = GFunction::delta(&g, g.identity());
        assert!(positive_sqrt(&e).unwrap().max_abs_diff(&e) < 1e-13);
        assert!(matches!(positive_sqrt(&GFunction::delta(&g, 1)), Err(Error::NotPositiveDefinite(_))));
    }

    #[test]
    fn sqrt_backends_agree() {
        let g = Group::cyclic(12).unwrap();
        let mut rng = random::rng(4);
        for _ in 0..10 {
            let p = random::positive_definite(&g, &mut rng);
            let a = positive_sqrt_with(&p, Backend::Fourier).unwrap();
            let b = positive_sqrt_with(&p, Backend::Dense).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-10);
        }
    }

    #[test]
    fn polar_examples() {
        let g = Group::cyclic(4).unwrap();
        for backend in [Backend::Fourier, Backend::Dense] {
            let pd = polar_with(&GFunction::delta(&g, 1), backend).unwrap();
            assert!(pd.p.max_abs_diff(&GFunction::delta(&g, 0)) < 1e-12);
            assert!(pd.residuals().unwrap().max() < 1e-12);
        }
        let mut rng = random::rng(8);
        let p = random::positive_definite(&g, &mut rng);
        assert!(polar(&p).p.max_abs_diff(&p) < 1e-12);
    }

    #[test]
    fn polar_backends_agree_on_abelian() {
        let g = Group::abelian(&[2, 4]).unwrap();
        let mut rng = random::rng(10);
        for _ in 0..10 {
            let u = random::function(&g, &mut rng);
            let a = polar_with(&u, Backend::Fourier).unwrap();
            let b = polar_with(&u, Backend::Dense).unwrap();
            assert!(a.p.max_abs_diff(&b.p) < 1e-10);
            assert!(a.a.kernel().max_abs_diff(&b.a.kernel()) < 1e-10);
        }
    }

    #[test]
    fn canonical_rep_of_zero_and_positive() {
        let g = Group::cyclic(8).unwrap();
        let rep = canonical_rep(&GFunction::zeros(&g));
        assert!(rep.c.norm_inf() == 0.0 && rep.d.norm_inf() == 0.0);
        let mut rng = random::rng(12);
        let p = random::positive_definite(&g, &mut rng);
        let rep = canonical_rep(&p);
        assert!(rep.d.max_abs_diff(&rep.c) < 1e-12);
        let direct = GFunction::from_fn(&g, |s| rep.c.inner(&rep.c.translate(s)).unwrap());
        assert!(direct.max_abs_diff(&p) < 1e-12);
    }

    #[test]
    fn canonical_norms_on_z8_and_s3() {
        let mut rng = random::rng(13);
        for g in [Group::cyclic(8).unwrap(), Group::symmetric(3).unwrap()] {
            for _ in 0..10 {
                let u = random::function(&g, &mut rng);
                let rep = canonical_rep(&u);
                let norm = a_norm(&u);
                assert!((rep.d.norm2().powi(2) - norm).abs() < 1e-10 * norm);
                assert!((rep.c.norm2().powi(2) - norm).abs() < 1e-10 * norm);
                assert!(rep.reconstruct().max_abs_diff(&u) < 1e-10 * norm);
            }
        }
    }

    #[test]
    fn density_examples() {
        let g = Group::cyclic(16).unwrap();
        assert!((density_check(&GFunction::zeros(&g)).unwrap() - 1.0).abs() < 1e-14);
        let e = GFunction::delta(&g, 0);
        assert!((density_check(&e).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        let mut rng = random::rng(14);
        let p = random::positive_definite(&g, &mut rng);
        let fast = density_check_with(&p, Backend::Fourier).unwrap();
        let slow = density_check_with(&p, Backend::Dense).unwrap();
        assert!(fast >= 1.0 - 1e-12 && (fast - slow).abs() < 1e-10);
    }

    #[test]
    fn right_positivity_examples() {
        let mut rng = random::rng(15);
        for g in [Group::cyclic(10).unwrap(), Group::symmetric(3).unwrap()] {
            let p = random::positive_definite(&g, &mut rng);
            assert!(right_positivity_check(&p, 200, &mut rng).unwrap().pass);
        }
        let g = Group::cyclic(4).unwrap();
        assert!(right_positivity_check(&GFunction::delta(&g, 1), 1, &mut rng).is_err());
    }
}
