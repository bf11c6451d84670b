use synthlab_core::projector::SubsetIndex;
use synthlab_core::random;
use synthlab_core::scenarios::{random_decompose_scenario, random_union_scenario};
use synthlab_core::synthesis::kernel_defect;
use synthlab_core::transform::a_norm;
use synthlab_core::union::{
    bump, decompose_from_union, default_oracle, union_construct, ApproxOracle, OracleOutput,
};
use synthlab_core::{Error, GFunction, Group, Result};

struct Careless;

impl ApproxOracle for Careless {
    fn approximate(&self, _s: &SubsetIndex, _t: &SubsetIndex, f: &GFunction, _eps: f64) -> Result<OracleOutput> {
        Ok(OracleOutput { g: f.scale_real(0.5), radius: 1, distance: 0.0 })
    }
}

struct Failing;

impl ApproxOracle for Failing {
    fn approximate(&self, _s: &SubsetIndex, _t: &SubsetIndex, _f: &GFunction, eps: f64) -> Result<OracleOutput> {
        Err(Error::NoAdmissibleRadius { eps, best: 1.0 })
    }
}

#[test]
fn random_unions_meet_the_two_epsilon_bound() {
    let g = Group::cyclic(256).unwrap();
    let oracle = default_oracle(&g, 32).unwrap();
    let mut rng = random::rng(11);
    for _ in 0..10 {
        let sc = random_union_scenario(&g, 0.05, &mut rng).unwrap();
        let res = union_construct(&oracle, &oracle, &sc.s1, &sc.s2, &sc.u, sc.eps).unwrap();
        assert!(a_norm(&(&sc.u - &res.g)) < 2.0 * sc.eps);
        let w1 = sc.s1.ball(res.stages[0].radius).unwrap();
        assert!(kernel_defect(&res.g, &w1) < 1e-12);
    }
}

#[test]
fn disjoint_union_succeeds_when_each_oracle_does() {
    let g = Group::cyclic(256).unwrap();
    let oracle = default_oracle(&g, 16).unwrap();
    let s1 = SubsetIndex::singleton(&g, 40).unwrap();
    let s2 = SubsetIndex::singleton(&g, 200).unwrap();
    let mut rng = random::rng(5);
    let u = synthlab_core::scenarios::smooth_vanishing(&g, &[40, 200], &mut rng).unwrap();
    let none = SubsetIndex::empty(&g);
    assert!(oracle.approximate(&s1, &none, &u, 0.05).is_ok());
    assert!(oracle.approximate(&s2, &none, &u, 0.05).is_ok());
    assert!(union_construct(&oracle, &oracle, &s1, &s2, &u, 0.05).is_ok());
}

#[test]
fn random_decompositions_meet_the_two_epsilon_bound() {
    let g = Group::cyclic(256).unwrap();
    let oracle = default_oracle(&g, 32).unwrap();
    let mut rng = random::rng(12);
    for _ in 0..6 {
        let sc = random_decompose_scenario(&g, 0.05, &mut rng).unwrap();
        let res = decompose_from_union(&oracle, &oracle, &sc.s1, &sc.s2, &sc.u, sc.eps).unwrap();
        assert!(a_norm(&(&sc.u - &res.g)) < 2.0 * sc.eps);
        assert!(kernel_defect(&res.g, &sc.s1.ball(1).unwrap()) < 1e-12);
    }
}

#[test]
fn oracle_outputs_are_rechecked() {
    let g = Group::cyclic(64).unwrap();
    let s1 = SubsetIndex::singleton(&g, 0).unwrap();
    let s2 = SubsetIndex::singleton(&g, 30).unwrap();
    let mut rng = random::rng(2);
    let u = synthlab_core::scenarios::smooth_vanishing(&g, &[0, 30], &mut rng).unwrap();
    assert!(matches!(
        union_construct(&Careless, &Careless, &s1, &s2, &u, 0.05),
        Err(Error::OracleVerification(_))
    ));
    match union_construct(&Failing, &Failing, &s1, &s2, &u, 0.05) {
        Err(Error::OracleFailure { stage, .. }) => assert_eq!(stage, "first"),
        other => panic!("unexpected {other:?}"),
    }
    let not_vanishing = GFunction::constant(&g, 1.0.into());
    let oracle = default_oracle(&g, 8).unwrap();
    assert!(matches!(
        union_construct(&oracle, &oracle, &s1, &s2, &not_vanishing, 0.05),
        Err(Error::NotInKernel(_))
    ));
}

#[test]
fn decomposition_with_no_overlap_uses_a_zero_bump() {
    let g = Group::cyclic(128).unwrap();
    let s1 = SubsetIndex::singleton(&g, 0).unwrap();
    let s2 = SubsetIndex::singleton(&g, 64).unwrap();
    let mut rng = random::rng(9);
    let u = synthlab_core::scenarios::smooth_vanishing(&g, &[0, 64], &mut rng).unwrap();
    let oracle = default_oracle(&g, 16).unwrap();
    let res = decompose_from_union(&oracle, &oracle, &s1, &s2, &u, 0.05).unwrap();
    assert!(res.ones.is_empty());
    assert_eq!(res.bump.w.norm_inf(), 0.0);
}

#[test]
fn bump_on_a_torus_respects_constraints() {
    let g = Group::abelian(&[16, 16]).unwrap();
    let ones = SubsetIndex::new(&g, [g.index(&[8, 8]).unwrap(), g.index(&[8, 9]).unwrap()]).unwrap();
    let zeros = SubsetIndex::singleton(&g, 0).unwrap().ball(2).unwrap();
    let b = bump(&g, &ones, &zeros).unwrap();
    assert!(ones.indices().iter().all(|&x| (b.w[x].re - 1.0).abs() < 1e-10));
    assert!(zeros.indices().iter().all(|&x| b.w[x].norm() < 1e-10));
    assert!(b.a_norm >= 1.0 - 1e-10);
}
