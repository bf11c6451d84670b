//! Browser bindings for the synthlab demo page. Every export returns a JSON
//! string; the page in `www/` draws it on canvases.

use serde_json::{json, Value};
use synthlab_core::canonical::canonical_rep;
use synthlab_core::projector::SubsetIndex;
use synthlab_core::random;
use synthlab_core::scenarios::{self, certificate_scenario};
use synthlab_core::synthesis::{residual_certificate, CertificateOptions};
use synthlab_core::transform::a_norm;
use synthlab_core::union::{bump, decompose_from_union, default_oracle, union_construct};
use synthlab_core::{Complex64, GFunction, Group, Result};
use wasm_bindgen::prelude::*;

fn re(f: &GFunction) -> Vec<f64> {
    f.values().iter().map(|v| v.re).collect()
}

fn im(f: &GFunction) -> Vec<f64> {
    f.values().iter().map(|v| v.im).collect()
}

fn to_js(result: Result<Value>) -> std::result::Result<String, JsError> {
    result.map(|v| v.to_string()).map_err(|e| JsError::new(&e.to_string()))
}

/// Gaussian difference on `Z_n` plus seeded noise, and its canonical pair.
pub fn canonical_value(n: usize, offset: usize, sigma: f64, noise: f64, seed: u64) -> Result<Value> {
    let g = Group::cyclic(n)?;
    let base = scenarios::gaussian_difference(&g, offset, sigma)?;
    let mut rng = random::rng(seed);
    let jitter = random::function(&g, &mut rng);
    let u = GFunction::from_fn(&g, |x| base[x] + jitter[x] * Complex64::new(noise / (n as f64).sqrt(), 0.0));
    let rep = canonical_rep(&u);
    let error = rep.reconstruct().max_abs_diff(&u);
    Ok(json!({
        "n": n,
        "u_re": re(&u),
        "u_im": im(&u),
        "c": re(&rep.c),
        "d_re": re(&rep.d),
        "d_im": im(&rep.d),
        "p": re(&rep.polar.p),
        "a_norm": a_norm(&u),
        "c_norm_sq": rep.c.norm2().powi(2),
        "reconstruction_error": error,
    }))
}

/// Residual certificate for a builtin scenario.
pub fn certificate_value(name: &str, seed: u64) -> Result<Value> {
    let sc = certificate_scenario(name, seed)?;
    let trace = residual_certificate(&sc.u, &sc.s, &sc.family, None, &CertificateOptions::default())?;
    Ok(json!({
        "name": sc.name,
        "set_size": sc.s.len(),
        "exploratory": sc.exploratory,
        "trace": trace,
    }))
}

/// Random decomposition on `Z_n`: bump, oracle outputs and the final `g`.
pub fn union_value(n: usize, seed: u64, eps: f64, smoothing_radius: usize) -> Result<Value> {
    let g = Group::cyclic(n)?;
    let mut rng = random::rng(seed);
    let sc = scenarios::random_decompose_scenario(&g, eps, &mut rng)?;
    let oracle = default_oracle(&g, smoothing_radius)?;
    let result = decompose_from_union(&oracle, &oracle, &sc.s1, &sc.s2, &sc.u, eps)?;
    Ok(json!({
        "n": n,
        "s1": sc.s1.indices(),
        "s2": sc.s2.indices(),
        "u": re(&sc.u),
        "g": re(&result.g),
        "w": re(&result.bump.w),
        "bump_a_norm": result.bump.a_norm,
        "stages": result.stages,
        "distance": result.distance,
        "bound": result.bound,
        "verified": result.verified,
    }))
}

/// Two random intervals, `u` vanishing on both, union construction.
pub fn construct_value(n: usize, seed: u64, eps: f64, smoothing_radius: usize) -> Result<Value> {
    let g = Group::cyclic(n)?;
    let mut rng = random::rng(seed);
    let sc = scenarios::random_union_scenario(&g, eps, &mut rng)?;
    let oracle = default_oracle(&g, smoothing_radius)?;
    let result = union_construct(&oracle, &oracle, &sc.s1, &sc.s2, &sc.u, eps)?;
    Ok(json!({
        "n": n,
        "s1": sc.s1.indices(),
        "s2": sc.s2.indices(),
        "u": re(&sc.u),
        "g": re(&result.g),
        "stages": result.stages,
        "distance": result.distance,
        "bound": result.bound,
        "verified": result.verified,
    }))
}

/// Bump with `w = 1` on `ones` and `w = 0` on `zeros`, both on `Z_n`.
pub fn bump_value(n: usize, ones: &[usize], zeros: &[usize]) -> Result<Value> {
    let g = Group::cyclic(n)?;
    let ones = SubsetIndex::new(&g, ones.iter().copied())?;
    let zeros = SubsetIndex::new(&g, zeros.iter().copied())?;
    let b = bump(&g, &ones, &zeros)?;
    Ok(json!({ "n": n, "w": re(&b.w), "a_norm": b.a_norm }))
}

#[wasm_bindgen]
pub fn canonical(n: usize, offset: usize, sigma: f64, noise: f64, seed: u64) -> std::result::Result<String, JsError> {
    to_js(canonical_value(n, offset, sigma, noise, seed))
}

#[wasm_bindgen]
pub fn certificate(name: &str, seed: u64) -> std::result::Result<String, JsError> {
    to_js(certificate_value(name, seed))
}

#[wasm_bindgen]
pub fn union(mode: &str, n: usize, seed: u64, eps: f64, smoothing_radius: usize) -> std::result::Result<String, JsError> {
    match mode {
        "construct" => to_js(construct_value(n, seed, eps, smoothing_radius)),
        _ => to_js(union_value(n, seed, eps, smoothing_radius)),
    }
}

#[wasm_bindgen]
pub fn bump_on_cyclic(n: usize, ones: Vec<usize>, zeros: Vec<usize>) -> std::result::Result<String, JsError> {
    to_js(bump_value(n, &ones, &zeros))
}

#[wasm_bindgen]
pub fn builtin_scenarios() -> Vec<String> {
    scenarios::BUILTIN_CERTIFICATE_SCENARIOS.iter().map(|s| s.to_string()).collect()
}
