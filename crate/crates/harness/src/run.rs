//! The four experiment runners.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};
use synthlab_core::calculus::{sequences, verify_ckak_with, verify_l2l2_with, ConvOperator, ConvergenceOptions, Verdict};
use synthlab_core::canonical::{canonical_rep, density_check, positive_sqrt, right_positivity_check};
use synthlab_core::projector::SubsetIndex;
use synthlab_core::random::{self, ChaCha8Rng};
use synthlab_core::scenarios::{self, CertificateScenario, UnionScenario};
use synthlab_core::synthesis::{
    kernel_defect, r_infinity_experiment, reconstruct_sequence, residual_certificate, CertificateOptions,
    CertificateTrace,
};
use synthlab_core::transform::{a_norm, verify_appendix};
use synthlab_core::union::{decompose_from_union, default_oracle, union_construct};
use synthlab_core::{GFunction, Group};

use crate::config::{ConfigError, Experiment, Format, FunctionConfig, Generator, UnionMode};

pub const CERTIFICATE_COLUMNS: [&str; 6] = ["k", "set_size", "r_k", "gram_rank", "cond", "wall_time"];
pub const CONVERGENCE_COLUMNS: [&str; 8] =
    ["k", "a_dist", "l2_dist", "weak_dist", "c_dist", "d_dist", "norm_gap", "p_a_dist"];

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Numerical(synthlab_core::Error),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => e.fmt(f),
            RunError::Numerical(e) => write!(f, "numerical failure: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl From<synthlab_core::Error> for RunError {
    fn from(e: synthlab_core::Error) -> Self {
        RunError::Numerical(e)
    }
}

/// Result of one subcommand: both renderings and the invariant verdict.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub command: &'static str,
    pub pass: bool,
    pub json: Value,
    pub csv: String,
}

impl Outcome {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.csv.clone(),
            Format::Json => {
                let mut text = serde_json::to_string_pretty(&self.json).expect("serializable");
                text.push('\n');
                text
            }
        }
    }

    pub fn default_format(&self) -> Format {
        match self.command {
            "certificate" | "convergence" => Format::Csv,
            _ => Format::Json,
        }
    }
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(header).expect("in-memory write");
    for row in rows {
        writer.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn num(v: f64) -> String {
    format!("{v:e}")
}

fn rng_for(exp: &Experiment) -> ChaCha8Rng {
    random::rng(exp.config.seed)
}

#[derive(Debug, Clone, Serialize)]
struct CheckResult {
    max_residual: f64,
    trials: usize,
    pass: bool,
}

fn check(max_residual: f64, trials: usize, tol: f64) -> CheckResult {
    CheckResult { max_residual, trials, pass: max_residual <= tol }
}

fn canonical_suite(group: &Arc<Group>, trials: usize, tol: f64, rng: &mut ChaCha8Rng) -> synthlab_core::Result<BTreeMap<String, CheckResult>> {
    let mut worst = BTreeMap::<&str, f64>::new();
    let mut record = |name: &'static str, value: f64| {
        let slot = worst.entry(name).or_insert(0.0);
        *slot = slot.max(value);
    };
    for _ in 0..trials {
        let u = random::function(group, rng);
        let u = u.scale_real(1.0 / a_norm(&u));
        let rep = canonical_rep(&u);
        let nu = a_norm(&u);
        record("polar", rep.polar.residuals()?.max());
        record("reconstruction", rep.reconstruct().max_abs_diff(&u));
        let p_e = rep.polar.p[group.identity()].re;
        let gaps = [rep.c.norm2().powi(2) - nu, p_e - nu, a_norm(&rep.polar.p) - nu];
        record("norm-identity", gaps.iter().fold(0.0, |m, g| m.max(g.abs())));

        let p = random::positive_definite(group, rng);
        let c = positive_sqrt(&p)?;
        record("sqrt-square", c.convolve(&c)?.max_abs_diff(&p));
        let root = ConvOperator::new(&p).sqrt_op()?.to_matrix();
        let direct = ConvOperator::new(&c).to_matrix();
        let diff = &root - &direct;
        let worst_column = diff.column_iter().map(|col| col.norm()).fold(0.0, f64::max);
        record("sqrt-operator", worst_column);
        let positivity = right_positivity_check(&p, 5, rng)?;
        record("right-positivity", (-positivity.min_real).max(positivity.max_imag).max(0.0));
        record("density", (1.0 - density_check(&p)?).max(0.0));
    }
    Ok(worst.into_iter().map(|(name, value)| (name.to_string(), check(value, trials, tol))).collect())
}

fn default_identity_groups() -> Vec<Arc<Group>> {
    vec![Group::cyclic(6).expect("valid"), Group::abelian(&[2, 4]).expect("valid"), Group::symmetric(3).expect("valid")]
}

/// Module-action identities plus the canonical-decomposition property suite.
pub fn run_identities(exp: &Experiment) -> Result<Outcome, RunError> {
    let cfg = &exp.config;
    let groups = match (&cfg.identities.groups, &cfg.group) {
        (Some(specs), _) => specs
            .iter()
            .map(|s| Group::from_spec(s).map_err(|e| ConfigError::new(format!("identities.groups: {e}"))))
            .collect::<Result<Vec<_>, _>>()?,
        (None, Some(_)) => vec![exp.group()?],
        (None, None) => default_identity_groups(),
    };
    let tol = cfg.tolerances.identities;
    let trials = cfg.identities.trials;
    let mut rng = rng_for(exp);
    let mut reports = Vec::new();
    let mut rows = Vec::new();
    let mut pass = true;
    for group in &groups {
        let appendix = verify_appendix(group, trials, &mut rng)?;
        let appendix_checks: BTreeMap<String, CheckResult> = appendix
            .identities
            .iter()
            .map(|(name, r)| (name.clone(), check(r.max_residual, r.trials, tol)))
            .collect();
        let canonical = canonical_suite(group, trials, tol, &mut rng)?;
        for (suite, checks) in [("appendix", &appendix_checks), ("canonical", &canonical)] {
            for (name, r) in checks {
                pass &= r.pass;
                rows.push(vec![
                    group.name().to_string(),
                    suite.to_string(),
                    name.clone(),
                    num(r.max_residual),
                    r.trials.to_string(),
                    r.pass.to_string(),
                ]);
            }
        }
        reports.push(json!({
            "group": group.name(),
            "order": group.order(),
            "appendix": appendix_checks,
            "canonical": canonical,
        }));
    }
    let json = json!({
        "command": "identities",
        "seed": cfg.seed,
        "trials": trials,
        "tolerance": tol,
        "groups": reports,
        "pass": pass,
    });
    let csv = csv_text(&["group", "suite", "check", "max_residual", "trials", "pass"], rows);
    Ok(Outcome { command: "identities", pass, json, csv })
}

fn normalized(u: GFunction) -> GFunction {
    let n = a_norm(&u);
    if n > 0.0 {
        u.scale_real(1.0 / n)
    } else {
        u
    }
}

/// Builds `u` from `[function]`, checking that it vanishes on `zeros`.
fn build_function(
    exp: &Experiment,
    group: &Arc<Group>,
    zeros: &SubsetIndex,
    rng: &mut ChaCha8Rng,
) -> Result<GFunction, RunError> {
    let spec = exp.config.function.as_ref();
    let kind = spec.map(|s| s.get_ref().clone()).unwrap_or(FunctionConfig::RandomVanishing);
    let at = |message: String| match spec {
        Some(s) => exp.error_at(s, message),
        None => ConfigError::new(message),
    };
    let u = match kind {
        FunctionConfig::GaussianDifference { offset, sigma } => {
            scenarios::gaussian_difference(group, offset, sigma).map_err(|e| at(e.to_string()))?
        }
        FunctionConfig::SmoothVanishing => {
            scenarios::smooth_vanishing(group, zeros.indices(), rng).map_err(|e| at(e.to_string()))?
        }
        FunctionConfig::RandomVanishing => {
            let mut u = random::function(group, rng);
            for &x in zeros.indices() {
                u.values_mut()[x] = 0.0.into();
            }
            normalized(u)
        }
        FunctionConfig::Values { re, im } => {
            let im = im.unwrap_or_else(|| vec![0.0; re.len()]);
            let values = re.iter().zip(&im).map(|(&a, &b)| synthlab_core::Complex64::new(a, b)).collect();
            GFunction::new(group, values).map_err(|e| at(e.to_string()))?
        }
    };
    let defect = kernel_defect(&u, zeros);
    if defect > 1e-12 * u.norm_inf() {
        return Err(at(format!("u does not vanish on the required set (max |u| there is {defect:.3e})")).into());
    }
    Ok(u)
}

fn certificate_input(exp: &Experiment) -> Result<CertificateScenario, RunError> {
    let cfg = &exp.config;
    if let Some(name) = &cfg.builtin {
        return Ok(scenarios::certificate_scenario(name.get_ref(), cfg.seed)?);
    }
    let group = exp.group()?;
    let s = exp.require_set(&group, "s")?;
    let t = exp.set(&group, "t")?;
    let family = exp.family(&s)?;
    let zeros = match &t {
        Some(t) => s.union(t)?,
        None => s.clone(),
    };
    let mut rng = rng_for(exp);
    let u = build_function(exp, &group, &zeros, &mut rng)?;
    Ok(CertificateScenario {
        name: cfg.name.clone().unwrap_or_else(|| "custom".into()),
        kind: cfg.scenario,
        exploratory: false,
        u,
        s,
        t,
        family,
    })
}

fn certificate_rows(trace: &CertificateTrace) -> Vec<Vec<String>> {
    trace
        .rows
        .iter()
        .map(|r| {
            vec![
                r.k.to_string(),
                r.set_size.to_string(),
                num(r.residual),
                r.gram_rank.to_string(),
                num(r.condition),
                num(r.wall_time),
            ]
        })
        .collect()
}

/// Residual certificate, reconstruction check and, when `sets.t` is given,
/// the r_∞ experiment.
pub fn run_certificate(exp: &Experiment, timing: bool) -> Result<Outcome, RunError> {
    let sc = certificate_input(exp)?;
    let options = CertificateOptions { tolerance: exp.config.tolerances.certificate, timing, ..Default::default() };
    let trace = residual_certificate(&sc.u, &sc.s, &sc.family, None, &options)?;
    let recon = reconstruct_sequence(&sc.u, &sc.s, &sc.family)?;
    let reconstruction_verified = recon.verified(1e-10);
    let r_infinity = match &sc.t {
        Some(t) => Some(r_infinity_experiment(&sc.u, &sc.s, t, &sc.family, &options)?),
        None => None,
    };
    let pass = trace.monotone && reconstruction_verified && r_infinity.as_ref().is_none_or(|r| r.monotone);
    let json = json!({
        "command": "certificate",
        "schema": "certificate-v1",
        "scenario": sc.name,
        "kind": sc.kind,
        "exploratory": sc.exploratory,
        "seed": exp.config.seed,
        "set_size": sc.s.len(),
        "trace": trace,
        "reconstruction": { "verified": reconstruction_verified, "rows": recon.rows },
        "r_infinity": r_infinity,
        "pass": pass,
    });
    let primary = r_infinity.as_ref().unwrap_or(&trace);
    let csv = csv_text(&CERTIFICATE_COLUMNS, certificate_rows(primary));
    Ok(Outcome { command: "certificate", pass, json, csv })
}

/// Convergence verifier on a builtin sequence generator.
pub fn run_convergence(exp: &Experiment) -> Result<Outcome, RunError> {
    let cfg = &exp.config;
    let conv = &cfg.convergence;
    let group = exp.group()?;
    let support = conv.support.as_ref().map(|s| exp.build_set(&group, s)).transpose()?;
    let mut rng = rng_for(exp);
    let restrict = |f: GFunction| match &support {
        Some(k) => GFunction::from_fn(&group, |x| if k.contains(x) { f[x] } else { 0.0.into() }),
        None => f,
    };
    let u = match &cfg.function {
        Some(_) => build_function(exp, &group, &SubsetIndex::empty(&group), &mut rng)?,
        None => normalized(restrict(random::function(&group, &mut rng))),
    };
    let u = restrict(u);
    let v = normalized(restrict(random::function(&group, &mut rng)));
    let amplitude = synthlab_core::Complex64::new(conv.amplitude, 0.0);
    let seq = match conv.generator {
        Generator::Constant => sequences::constant(&u, conv.length),
        Generator::Scaled => sequences::scaled(&u, conv.length),
        Generator::Perturbed => sequences::perturbed(&u, &v, conv.length),
        Generator::Offset => sequences::offset(&u, conv.point, amplitude, conv.length),
        Generator::Oscillating => sequences::oscillating(&u, conv.point, amplitude, conv.length),
    };
    let options = ConvergenceOptions { tolerance: cfg.tolerances.convergence, ..Default::default() };
    let trace = match &support {
        Some(k) => verify_ckak_with(&u, &seq, k, &options)?,
        None => verify_l2l2_with(&u, &seq, &options)?,
    };
    let pass = trace.verdict != Verdict::Fail;
    let rows = trace.rows.iter().map(|r| {
        [r.k as f64, r.a_dist, r.l2_dist, r.weak_dist, r.c_dist, r.d_dist, r.norm_gap, r.p_a_dist]
            .iter()
            .enumerate()
            .map(|(i, v)| if i == 0 { (*v as usize).to_string() } else { num(*v) })
            .collect()
    });
    let csv = csv_text(&CONVERGENCE_COLUMNS, rows);
    let json = json!({
        "command": "convergence",
        "schema": "convergence-v1",
        "seed": cfg.seed,
        "generator": conv.generator,
        "compact_support": support.as_ref().map(|k| k.len()),
        "trace": trace,
        "pass": pass,
    });
    Ok(Outcome { command: "convergence", pass, json, csv })
}

#[derive(Debug, Clone, Serialize)]
struct UnionEntry {
    index: usize,
    mode: UnionMode,
    s1: Vec<usize>,
    s2: Vec<usize>,
    eps: f64,
    verified: bool,
    distance: Option<f64>,
    bound: f64,
    radii: Vec<usize>,
    stage_distances: Vec<f64>,
    vanishing_defect: Option<f64>,
    bump_a_norm: Option<f64>,
    error: Option<String>,
}

/// Union construction or decomposition with the default lattice oracle.
pub fn run_union(exp: &Experiment) -> Result<Outcome, RunError> {
    let cfg = &exp.config;
    let ucfg = &cfg.union;
    let group = exp.group()?;
    let oracle = default_oracle(&group, ucfg.smoothing_radius).map_err(|e| ConfigError::new(e.to_string()))?;
    let mut rng = rng_for(exp);
    let inputs: Vec<UnionScenario> = if ucfg.random_scenarios > 0 {
        (0..ucfg.random_scenarios)
            .map(|_| match ucfg.mode {
                UnionMode::Construct => scenarios::random_union_scenario(&group, ucfg.eps, &mut rng),
                UnionMode::Decompose => scenarios::random_decompose_scenario(&group, ucfg.eps, &mut rng),
            })
            .collect::<Result<_, _>>()
            .map_err(|e| ConfigError::new(format!("random scenarios: {e}")))?
    } else {
        let s1 = exp.require_set(&group, "s")?;
        let s2 = exp.require_set(&group, "s2")?;
        let zeros = match ucfg.mode {
            UnionMode::Construct => s1.union(&s2)?,
            UnionMode::Decompose => s1.clone(),
        };
        let u = build_function(exp, &group, &zeros, &mut rng)?;
        vec![UnionScenario { s1, s2, u, eps: ucfg.eps }]
    };
    let mut entries = Vec::new();
    for (index, sc) in inputs.iter().enumerate() {
        let mut entry = UnionEntry {
            index,
            mode: ucfg.mode,
            s1: sc.s1.indices().to_vec(),
            s2: sc.s2.indices().to_vec(),
            eps: sc.eps,
            verified: false,
            distance: None,
            bound: 2.0 * sc.eps,
            radii: Vec::new(),
            stage_distances: Vec::new(),
            vanishing_defect: None,
            bump_a_norm: None,
            error: None,
        };
        let result = match ucfg.mode {
            UnionMode::Construct => union_construct(&oracle, &oracle, &sc.s1, &sc.s2, &sc.u, sc.eps)
                .map(|r| (r.verified, r.distance, r.vanishing_defect, r.stages, None)),
            UnionMode::Decompose => decompose_from_union(&oracle, &oracle, &sc.s1, &sc.s2, &sc.u, sc.eps)
                .map(|r| (r.verified, r.distance, r.vanishing_defect, r.stages, Some(r.bump.a_norm))),
        };
        match result {
            Ok((verified, distance, defect, stages, bump)) => {
                entry.verified = verified;
                entry.distance = Some(distance);
                entry.vanishing_defect = Some(defect);
                entry.radii = stages.iter().map(|s| s.radius).collect();
                entry.stage_distances = stages.iter().map(|s| s.distance).collect();
                entry.bump_a_norm = bump;
            }
            Err(e) => entry.error = Some(e.to_string()),
        }
        entries.push(entry);
    }
    let pass = entries.iter().all(|e| e.verified);
    let rows = entries.iter().map(|e| {
        vec![
            e.index.to_string(),
            format!("{:?}", e.mode).to_lowercase(),
            e.s1.len().to_string(),
            e.s2.len().to_string(),
            num(e.eps),
            e.distance.map_or(String::new(), num),
            num(e.bound),
            e.radii.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(";"),
            e.verified.to_string(),
        ]
    });
    let csv = csv_text(&["index", "mode", "s1_size", "s2_size", "eps", "distance", "bound", "radii", "verified"], rows);
    let json = json!({
        "command": "union",
        "schema": "union-v1",
        "seed": cfg.seed,
        "oracle": { "kind": "lattice-cutoff", "smoothing_radius": ucfg.smoothing_radius },
        "scenarios": entries,
        "pass": pass,
    });
    Ok(Outcome { command: "union", pass, json, csv })
}
