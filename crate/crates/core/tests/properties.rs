use std::sync::Arc;

use proptest::prelude::*;
use synthlab_core::canonical::{canonical_rep, canonical_rep_with, polar};
use synthlab_core::projector::{project, project_fast_with, FastOptions, SubsetIndex};
use synthlab_core::random;
use synthlab_core::synthesis::{residual_certificate, CertificateOptions, NeighborhoodFamily};
use synthlab_core::transform::{a_norm, a_norm_with, fourier, inv_fourier, Backend};
use synthlab_core::{GFunction, Group};

fn groups() -> Vec<Arc<Group>> {
    vec![
        Group::cyclic(12).unwrap(),
        Group::abelian(&[2, 4]).unwrap(),
        Group::abelian(&[3, 5]).unwrap(),
        Group::symmetric(3).unwrap(),
        Group::dihedral(5).unwrap(),
    ]
}

fn group_strategy() -> impl Strategy<Value = Arc<Group>> {
    (0..groups().len()).prop_map(|i| groups()[i].clone())
}

fn abelian_strategy() -> impl Strategy<Value = Arc<Group>> {
    (0..3usize).prop_map(|i| groups()[i].clone())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn convolution_is_associative(g in group_strategy(), seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let (a, b, c) = (random::function(&g, &mut rng), random::function(&g, &mut rng), random::function(&g, &mut rng));
        let left = a.convolve(&b).unwrap().convolve(&c).unwrap();
        let right = a.convolve(&b.convolve(&c).unwrap()).unwrap();
        prop_assert!(left.max_abs_diff(&right) < 1e-10 * (1.0 + left.norm_inf()));
        let direct = a.convolve_direct(&b).unwrap();
        prop_assert!(a.convolve(&b).unwrap().max_abs_diff(&direct) < 1e-10 * (1.0 + direct.norm_inf()));
    }

    #[test]
    fn translations_are_unitary(g in group_strategy(), seed in any::<u64>(), t in 0usize..10) {
        let mut rng = random::rng(seed);
        let f = random::function(&g, &mut rng);
        let t = t % g.order();
        prop_assert!((f.translate(t).norm2() - f.norm2()).abs() < 1e-12 * f.norm2());
        let back = f.translate(t).translate(g.inv(t));
        prop_assert!(back.max_abs_diff(&f) == 0.0);
    }

    #[test]
    fn fourier_round_trip(g in abelian_strategy(), seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let f = random::function(&g, &mut rng);
        let back = inv_fourier(&fourier(&f).unwrap());
        prop_assert!(back.max_abs_diff(&f) < 1e-12 * (1.0 + f.norm_inf()));
    }

    #[test]
    fn a_norm_invariances(g in group_strategy(), seed in any::<u64>(), t in 0usize..10) {
        let mut rng = random::rng(seed);
        let u = random::function(&g, &mut rng);
        let v = random::function(&g, &mut rng);
        let nu = a_norm(&u);
        let tol = 1e-9 * (1.0 + nu);
        prop_assert!((a_norm(&u.tilde()) - nu).abs() < tol);
        prop_assert!((a_norm(&u.check()) - nu).abs() < tol);
        prop_assert!((a_norm(&u.translate(t % g.order())) - nu).abs() < tol);
        prop_assert!(u.norm_inf() <= nu + tol);
        let product = a_norm(&u.pointwise(&v).unwrap());
        prop_assert!(product <= nu * a_norm(&v) * (1.0 + 1e-9));
        let sum = a_norm(&(&u + &v));
        prop_assert!(sum <= nu + a_norm(&v) + tol);
    }

    #[test]
    fn backends_agree_on_abelian_groups(g in abelian_strategy(), seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let u = random::function(&g, &mut rng);
        let fourier_norm = a_norm_with(&u, Backend::Fourier).unwrap();
        let dense_norm = a_norm_with(&u, Backend::Dense).unwrap();
        prop_assert!((fourier_norm - dense_norm).abs() < 1e-9 * (1.0 + fourier_norm));
        let rep = canonical_rep_with(&u, Backend::Dense).unwrap();
        prop_assert!((rep.c.norm2().powi(2) - fourier_norm).abs() < 1e-9 * (1.0 + fourier_norm));
    }

    #[test]
    fn canonical_representation_reconstructs(g in group_strategy(), seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let u = random::function(&g, &mut rng);
        let rep = canonical_rep(&u);
        let nu = a_norm(&u);
        prop_assert!(rep.reconstruct().max_abs_diff(&u) < 1e-10 * (1.0 + nu));
        prop_assert!((rep.c.norm2().powi(2) - nu).abs() < 1e-10 * (1.0 + nu));
        prop_assert!((rep.d.norm2().powi(2) - nu).abs() < 1e-9 * (1.0 + nu));
        let pd = polar(&u);
        prop_assert!((pd.p[g.identity()].re - nu).abs() < 1e-10 * (1.0 + nu));
        prop_assert!(pd.residuals().unwrap().max() < 1e-9 * (1.0 + nu));
    }

    #[test]
    fn projection_is_monotone_and_covariant(g in group_strategy(), seed in any::<u64>(), t in 0usize..10) {
        let mut rng = random::rng(seed);
        let n = g.order();
        let c = random::function(&g, &mut rng);
        let d = random::function(&g, &mut rng);
        let small = SubsetIndex::new(&g, random::subset(n, n / 3, &mut rng)).unwrap();
        let extra = SubsetIndex::new(&g, random::subset(n, n / 3, &mut rng)).unwrap();
        let large = small.union(&extra).unwrap();
        let (p_small, r_small) = project(&c, &d, &small).unwrap();
        let (_, r_large) = project(&c, &d, &large).unwrap();
        prop_assert!(r_small.residual_norm <= r_large.residual_norm + 1e-10 * d.norm2());
        prop_assert!(r_large.residual_norm <= d.norm2() * (1.0 + 1e-12));
        let t = t % n;
        let (p_moved, _) = project(&c, &d.translate(t), &small.translate(t)).unwrap();
        prop_assert!(p_moved.max_abs_diff(&p_small.translate(t)) < 1e-9 * (1.0 + d.norm2()));
        let twice = project(&c, &p_small, &small).unwrap().0;
        prop_assert!(twice.max_abs_diff(&p_small) < 1e-9 * (1.0 + d.norm2()));
    }

    #[test]
    fn fast_projection_matches_dense(seed in any::<u64>(), size in 1usize..40) {
        let g = Group::cyclic(64).unwrap();
        let mut rng = random::rng(seed);
        let c = random::function(&g, &mut rng);
        let d = random::function(&g, &mut rng);
        let s = SubsetIndex::new(&g, random::subset(64, size, &mut rng)).unwrap();
        let (dense, _) = project(&c, &d, &s).unwrap();
        let (fast, _) = project_fast_with(&c, &d, &s, FastOptions { tol: 1e-13, ..FastOptions::default() }).unwrap();
        prop_assert!(dense.max_abs_diff(&fast) < 1e-8 * (1.0 + d.norm2()));
    }

    #[test]
    fn certificate_traces_are_non_increasing(seed in any::<u64>(), point in 0usize..64) {
        let g = Group::cyclic(64).unwrap();
        let mut rng = random::rng(seed);
        let mut u = random::function(&g, &mut rng);
        u.values_mut()[point] = 0.0.into();
        let s = SubsetIndex::singleton(&g, point).unwrap();
        let family = NeighborhoodFamily::balls(&s, &[16, 8, 4, 2, 1, 0]).unwrap();
        let trace = residual_certificate(&u, &s, &family, None, &CertificateOptions::default()).unwrap();
        prop_assert!(trace.monotone);
        prop_assert!(trace.final_residual < 1e-9);
    }
}

#[test]
fn zero_function_has_trivial_certificate_on_whole_group() {
    let g = Group::cyclic(16).unwrap();
    let s = SubsetIndex::whole(&g);
    let family = NeighborhoodFamily::balls(&s, &[3, 1, 0]).unwrap();
    let trace = residual_certificate(&GFunction::zeros(&g), &s, &family, None, &CertificateOptions::default()).unwrap();
    assert!(trace.rows.iter().all(|r| r.residual == 0.0));
}
