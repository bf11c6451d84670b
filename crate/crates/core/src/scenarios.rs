//! Builtin experiment scenarios shared by the harness and the browser demo.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{GFunction, Group};
use crate::projector::SubsetIndex;
use crate::random;
use crate::synthesis::NeighborhoodFamily;
use crate::transform::a_norm;

/// Kind of set a certificate scenario is built around.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    PointSet,
    Subgroup,
    ArithmeticProgression,
    DiscreteSphere,
    Union,
    Custom,
}

/// Input of one residual-certificate run.
#[derive(Debug, Clone)]
pub struct CertificateScenario {
    pub name: String,
    pub kind: ScenarioKind,
    /// Never compared against a continuum answer.
    pub exploratory: bool,
    pub u: GFunction,
    pub s: SubsetIndex,
    /// Extra set for the r_∞ experiment.
    pub t: Option<SubsetIndex>,
    pub family: NeighborhoodFamily,
}

pub const BUILTIN_CERTIFICATE_SCENARIOS: [&str; 5] =
    ["point-on-Z256", "subgroup-2Z256", "progression-Z256", "sphere-Z10^3", "r-infinity-Z256"];

/// Ball radii `2^{7−k}`, `k = 1, …, 7`.
pub fn dyadic_radii() -> Vec<usize> {
    (1..=7).map(|k| 1usize << (7 - k)).collect()
}

fn circular(x: usize, a: usize, n: usize) -> f64 {
    let d = x.abs_diff(a);
    d.min(n - d) as f64
}

/// `1 − cos(2π(x − s)/n)`: vanishes to second order at `s`.
fn cosine_zero(x: usize, s: usize, n: usize) -> f64 {
    1.0 - (2.0 * PI * (x as f64 - s as f64) / n as f64).cos()
}

/// Real trigonometric polynomial of degree `degree` with Gaussian coefficients.
fn low_frequency<R: Rng + ?Sized>(n: usize, degree: usize, rng: &mut R) -> Vec<f64> {
    let offset: f64 = 2.0 + rng.sample::<f64, _>(StandardNormal).abs();
    let coeffs: Vec<(f64, f64)> =
        (0..degree).map(|_| (rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
    (0..n)
        .map(|x| {
            let t = 2.0 * PI * x as f64 / n as f64;
            offset
                + coeffs
                    .iter()
                    .enumerate()
                    .map(|(j, &(a, b))| {
                        let f = (j + 1) as f64 * t;
                        (a * f.cos() + b * f.sin()) / (j + 1) as f64
                    })
                    .sum::<f64>()
        })
        .collect()
}

fn normalized(u: GFunction) -> GFunction {
    let norm = a_norm(&u);
    if norm == 0.0 {
        u
    } else {
        u.scale_real(1.0 / norm)
    }
}

fn cyclic_order(group: &Group) -> Result<usize> {
    match group.factors() {
        Some([n]) => Ok(*n),
        _ => Err(Error::InvalidArgument(format!("{} is not a cyclic group", group.name()))),
    }
}

/// Difference of two Gaussians centred at `±offset`, odd about 0.
pub fn gaussian_difference(group: &Arc<Group>, offset: usize, sigma: f64) -> Result<GFunction> {
    let n = cyclic_order(group)?;
    let u = GFunction::from_fn(group, |x| {
        let g = |a: usize| (-circular(x, a, n).powi(2) / (2.0 * sigma * sigma)).exp();
        Complex64::new(g(offset % n) - g((n - offset % n) % n), 0.0)
    });
    Ok(normalized(u))
}

pub fn certificate_scenario(name: &str, seed: u64) -> Result<CertificateScenario> {
    let mut rng = random::rng(seed);
    match name {
        "point-on-Z256" => {
            let g = Group::cyclic(256)?;
            let s = SubsetIndex::singleton(&g, 0)?;
            let family = NeighborhoodFamily::balls(&s, &dyadic_radii())?;
            Ok(CertificateScenario {
                name: name.into(),
                kind: ScenarioKind::PointSet,
                exploratory: false,
                u: gaussian_difference(&g, 16, 2.0)?,
                s,
                t: None,
                family,
            })
        }
        "subgroup-2Z256" => {
            let g = Group::cyclic(256)?;
            let s = SubsetIndex::from_predicate(&g, |x| x % 2 == 0);
            let u = GFunction::from_fn(&g, |x| {
                if x % 2 == 1 {
                    random::complex_normal(&mut rng)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            let family = NeighborhoodFamily::balls(&s, &[2, 1, 0])?;
            Ok(CertificateScenario {
                name: name.into(),
                kind: ScenarioKind::Subgroup,
                exploratory: false,
                u: normalized(u),
                s,
                t: None,
                family,
            })
        }
        "progression-Z256" => {
            let g = Group::cyclic(256)?;
            let points = [0, 32, 64, 96];
            let s = SubsetIndex::new(&g, points)?;
            let envelope = low_frequency(256, 3, &mut rng);
            let u = GFunction::from_fn(&g, |x| {
                let zeros: f64 = points.iter().map(|&p| cosine_zero(x, p, 256)).product();
                Complex64::new(envelope[x] * zeros, 0.0)
            });
            let family = NeighborhoodFamily::balls(&s, &[16, 8, 4, 2, 1, 0])?;
            Ok(CertificateScenario {
                name: name.into(),
                kind: ScenarioKind::ArithmeticProgression,
                exploratory: false,
                u: normalized(u),
                s,
                t: None,
                family,
            })
        }
        "sphere-Z10^3" => {
            let g = Group::abelian(&[10, 10, 10])?;
            let centred = |x: usize| -> Vec<i64> {
                g.coords(x).expect("abelian").iter().map(|&c| if c >= 5 { c as i64 - 10 } else { c as i64 }).collect()
            };
            let radius2 = |x: usize| centred(x).iter().map(|c| c * c).sum::<i64>();
            let s = SubsetIndex::from_predicate(&g, |x| radius2(x) == 9);
            let u = GFunction::from_fn(&g, |x| {
                let r2 = radius2(x) as f64;
                Complex64::new((r2 - 9.0) * (-r2 / 18.0).exp(), 0.0)
            });
            let family = NeighborhoodFamily::balls(&s, &[2, 1, 0])?;
            Ok(CertificateScenario {
                name: name.into(),
                kind: ScenarioKind::DiscreteSphere,
                exploratory: true,
                u: normalized(u),
                s,
                t: None,
                family,
            })
        }
        "r-infinity-Z256" => {
            let g = Group::cyclic(256)?;
            let s = SubsetIndex::singleton(&g, 0)?;
            let t = SubsetIndex::singleton(&g, 64)?;
            let base = gaussian_difference(&g, 16, 2.0)?;
            let u = GFunction::from_fn(&g, |x| base[x] * cosine_zero(x, 64, 256));
            let family = NeighborhoodFamily::balls(&s, &dyadic_radii())?;
            Ok(CertificateScenario {
                name: name.into(),
                kind: ScenarioKind::PointSet,
                exploratory: true,
                u: normalized(u),
                s,
                t: Some(t),
                family,
            })
        }
        other => Err(Error::InvalidArgument(format!("unknown builtin scenario `{other}`"))),
    }
}

/// Input of one union or decomposition run.
#[derive(Debug, Clone)]
pub struct UnionScenario {
    pub s1: SubsetIndex,
    pub s2: SubsetIndex,
    pub u: GFunction,
    pub eps: f64,
}

fn random_interval<R: Rng + ?Sized>(n: usize, start: usize, max_len: usize, rng: &mut R) -> Vec<usize> {
    let len = rng.random_range(1..=max_len);
    (0..len).map(|i| (start + i) % n).collect()
}

/// Smooth `u` with `‖u‖_A = 1` vanishing to second order on every point of `zeros`.
pub fn smooth_vanishing<R: Rng + ?Sized>(group: &Arc<Group>, zeros: &[usize], rng: &mut R) -> Result<GFunction> {
    let n = cyclic_order(group)?;
    let envelope = low_frequency(n, 3, rng);
    let u = GFunction::from_fn(group, |x| {
        let factor: f64 = zeros.iter().map(|&s| cosine_zero(x, s, n)).product();
        Complex64::new(envelope[x] * factor, 0.0)
    });
    Ok(normalized(u))
}

/// Two short intervals anywhere on a cyclic group, `u ∈ k(S₁ ∪ S₂)`.
pub fn random_union_scenario<R: Rng + ?Sized>(group: &Arc<Group>, eps: f64, rng: &mut R) -> Result<UnionScenario> {
    let n = cyclic_order(group)?;
    let a = random_interval(n, rng.random_range(0..n), 3, rng);
    let b = random_interval(n, rng.random_range(0..n), 3, rng);
    let s1 = SubsetIndex::new(group, a)?;
    let s2 = SubsetIndex::new(group, b)?;
    let zeros = s1.union(&s2)?;
    let u = smooth_vanishing(group, zeros.indices(), rng)?;
    Ok(UnionScenario { s1, s2, u, eps })
}

/// `u ∈ k(S₁)` with `S₂` an interval at distance at least `n/4` from `S₁`,
/// optionally also containing `S₁`.
pub fn random_decompose_scenario<R: Rng + ?Sized>(
    group: &Arc<Group>,
    eps: f64,
    rng: &mut R,
) -> Result<UnionScenario> {
    let n = cyclic_order(group)?;
    let start = rng.random_range(0..n);
    let a = random_interval(n, start, 3, rng);
    let far = (start + n / 4 + rng.random_range(0..n / 4)) % n;
    let b = random_interval(n, far, 3, rng);
    let s1 = SubsetIndex::new(group, a)?;
    let mut s2 = SubsetIndex::new(group, b)?;
    if rng.random_bool(0.5) {
        s2 = s2.union(&s1)?;
    }
    let u = smooth_vanishing(group, s1.indices(), rng)?;
    Ok(UnionScenario { s1, s2, u, eps })
}
