//! Experiment configuration: a TOML file with nested tables, validated
//! before anything runs.

use std::fmt;
use std::ops::Range;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use synthlab_core::group::GroupSpec;
use synthlab_core::projector::SubsetIndex;
use synthlab_core::scenarios::ScenarioKind;
use synthlab_core::synthesis::NeighborhoodFamily;
use synthlab_core::Group;
use toml::Spanned;

use crate::builtins;

/// Schema or semantic problem in a config; exit code 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    pub fn new(message: impl Into<String>) -> Self {
        Self { line: None, message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "config error at line {line}: {}", self.message),
            None => write!(f, "config error: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

fn default_scenario() -> ScenarioKind {
    ScenarioKind::Custom
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: Option<String>,
    /// Take group, sets, chain and function from a builtin certificate scenario.
    #[serde(default)]
    pub builtin: Option<Spanned<String>>,
    #[serde(default = "default_scenario")]
    pub scenario: ScenarioKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub group: Option<Spanned<GroupSpec>>,
    #[serde(default)]
    pub sets: Sets,
    #[serde(default)]
    pub chain: Option<ChainConfig>,
    #[serde(default)]
    pub function: Option<Spanned<FunctionConfig>>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub identities: IdentitiesConfig,
    #[serde(default)]
    pub convergence: ConvergenceConfig,
    #[serde(default)]
    pub union: UnionConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sets {
    pub s: Option<Spanned<SetSpec>>,
    pub t: Option<Spanned<SetSpec>>,
    pub s2: Option<Spanned<SetSpec>>,
}

/// A list of element indices or a described set.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum SetSpec {
    Indices(Vec<usize>),
    Described(SetDescription),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SetDescription {
    /// Points given by lattice coordinates.
    Points { coords: Vec<Vec<usize>> },
    /// `{x : x ≡ 0 mod step}` on a cyclic group.
    Multiples { step: usize },
    /// `start, start + step, …` (`count` terms) on a cyclic group.
    Progression { start: usize, step: usize, count: usize },
    /// Lattice points with `|x|² = radius2` in centred coordinates.
    Sphere { radius2: u64 },
    /// Word-metric ball around one element.
    Ball { center: usize, radius: usize },
    Whole,
    Empty,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    pub radii: Option<Spanned<Vec<usize>>>,
    pub explicit: Option<Spanned<Vec<SetSpec>>>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FunctionConfig {
    /// Gaussians at `±offset`, cyclic groups only.
    GaussianDifference { offset: usize, sigma: f64 },
    /// Low-frequency envelope times `Π (1 − cos)` factors, cyclic groups only.
    SmoothVanishing,
    /// Complex Gaussian values zeroed where the scenario requires.
    RandomVanishing,
    Values {
        re: Vec<f64>,
        #[serde(default)]
        im: Option<Vec<f64>>,
    },
}

fn default_certificate_tol() -> f64 {
    1e-3
}
fn default_identity_tol() -> f64 {
    1e-10
}
fn default_convergence_tol() -> f64 {
    1e-6
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_certificate_tol")]
    pub certificate: f64,
    #[serde(default = "default_identity_tol")]
    pub identities: f64,
    #[serde(default = "default_convergence_tol")]
    pub convergence: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            certificate: default_certificate_tol(),
            identities: default_identity_tol(),
            convergence: default_convergence_tol(),
        }
    }
}

fn default_trials() -> usize {
    100
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentitiesConfig {
    #[serde(default = "default_trials")]
    pub trials: usize,
    /// Defaults to the top-level group, or `Z6`, `Z2×Z4`, `S3` when absent.
    #[serde(default)]
    pub groups: Option<Vec<GroupSpec>>,
}

impl Default for IdentitiesConfig {
    fn default() -> Self {
        Self { trials: default_trials(), groups: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Generator {
    Constant,
    Scaled,
    #[default]
    Perturbed,
    Offset,
    Oscillating,
}

fn default_length() -> usize {
    64
}
fn default_amplitude() -> f64 {
    0.5
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceConfig {
    #[serde(default)]
    pub generator: Generator,
    #[serde(default = "default_length")]
    pub length: usize,
    /// Size of the fixed bump for `offset` / `oscillating`.
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    #[serde(default)]
    pub point: usize,
    /// Common support `K`; switches to the compact-support verifier.
    #[serde(default)]
    pub support: Option<Spanned<SetSpec>>,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        Self {
            generator: Generator::default(),
            length: default_length(),
            amplitude: default_amplitude(),
            point: 0,
            support: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnionMode {
    #[default]
    Construct,
    Decompose,
}

fn default_eps() -> f64 {
    0.05
}
fn default_smoothing() -> usize {
    32
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnionConfig {
    #[serde(default)]
    pub mode: UnionMode,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_smoothing")]
    pub smoothing_radius: usize,
    /// Number of seeded random scenarios; 0 uses `sets.s` / `sets.s2`.
    #[serde(default)]
    pub random_scenarios: usize,
}

impl Default for UnionConfig {
    fn default() -> Self {
        Self { mode: UnionMode::default(), eps: default_eps(), smoothing_radius: default_smoothing(), random_scenarios: 0 }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<String>,
    pub format: Option<Format>,
}

/// Parsed config together with its source text for line lookups.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    source: String,
}

fn line_of(source: &str, span: Range<usize>) -> usize {
    source[..span.start.min(source.len())].matches('\n').count() + 1
}

impl Experiment {
    pub fn from_toml(source: &str) -> Result<Self, ConfigError> {
        let config: ExperimentConfig = toml::from_str(source).map_err(|e| ConfigError {
            line: e.span().map(|s| line_of(source, s)),
            message: e.message().trim().to_string(),
        })?;
        let experiment = Self { config, source: source.to_string() };
        experiment.validate()?;
        Ok(experiment)
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn builtin(name: &str) -> Result<Self, ConfigError> {
        let text = builtins::source(name).ok_or_else(|| {
            ConfigError::new(format!("unknown builtin `{name}` (available: {})", builtins::NAMES.join(", ")))
        })?;
        Self::from_toml(text)
    }

    pub fn error_at<T>(&self, value: &Spanned<T>, message: impl Into<String>) -> ConfigError {
        ConfigError { line: Some(line_of(&self.source, value.span())), message: message.into() }
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let c = &self.config;
        if let Some(name) = &c.builtin {
            if !synthlab_core::scenarios::BUILTIN_CERTIFICATE_SCENARIOS.contains(&name.get_ref().as_str()) {
                return Err(self.error_at(name, format!("unknown builtin scenario `{}`", name.get_ref())));
            }
        }
        let positive = |value: f64, key: &str| {
            if value.is_finite() && value > 0.0 {
                Ok(())
            } else {
                Err(ConfigError::new(format!("`{key}` must be a positive number, got {value}")))
            }
        };
        positive(c.tolerances.certificate, "tolerances.certificate")?;
        positive(c.tolerances.identities, "tolerances.identities")?;
        positive(c.tolerances.convergence, "tolerances.convergence")?;
        positive(c.union.eps, "union.eps")?;
        if c.union.smoothing_radius == 0 {
            return Err(ConfigError::new("`union.smoothing_radius` must be at least 1"));
        }
        if let Some(chain) = &c.chain {
            if let Some(radii) = &chain.radii {
                if radii.get_ref().windows(2).any(|w| w[1] > w[0]) {
                    return Err(self.error_at(radii, "chain radii must be non-increasing"));
                }
                if chain.explicit.is_some() {
                    return Err(self.error_at(radii, "give either `radii` or `explicit`, not both"));
                }
            }
        }
        if let Some(group) = &c.group {
            let g = Group::from_spec(group.get_ref()).map_err(|e| self.error_at(group, e.to_string()))?;
            for set in [&c.sets.s, &c.sets.t, &c.sets.s2, &c.convergence.support].into_iter().flatten() {
                self.build_set(&g, set)?;
            }
            if let Some(f) = &c.function {
                if let FunctionConfig::Values { re, im } = f.get_ref() {
                    let n = g.order();
                    if re.len() != n || im.as_ref().is_some_and(|im| im.len() != n) {
                        return Err(self.error_at(f, format!("`values` needs exactly {n} entries")));
                    }
                }
            }
            if c.convergence.point >= g.order() {
                return Err(ConfigError::new(format!("`convergence.point` must be below {}", g.order())));
            }
        }
        Ok(())
    }

    pub fn apply_overrides(&mut self, seed: Option<u64>, tol: Option<f64>) -> Result<(), ConfigError> {
        if let Some(seed) = seed {
            self.config.seed = seed;
        }
        if let Some(tol) = tol {
            if !(tol.is_finite() && tol > 0.0) {
                return Err(ConfigError::new(format!("--tol must be a positive number, got {tol}")));
            }
            let t = &mut self.config.tolerances;
            t.certificate = tol;
            t.identities = tol;
            t.convergence = tol;
        }
        Ok(())
    }

    pub fn group(&self) -> Result<Arc<Group>, ConfigError> {
        let spec = self.config.group.as_ref().ok_or_else(|| ConfigError::new("missing [group] table"))?;
        Group::from_spec(spec.get_ref()).map_err(|e| self.error_at(spec, e.to_string()))
    }

    pub fn build_set(&self, group: &Arc<Group>, spec: &Spanned<SetSpec>) -> Result<SubsetIndex, ConfigError> {
        let fail = |message: String| self.error_at(spec, message);
        let cyclic = || match group.factors() {
            Some([n]) => Ok(*n),
            _ => Err(fail(format!("this set kind needs a cyclic group, got {}", group.name()))),
        };
        let set = match spec.get_ref() {
            SetSpec::Indices(indices) => SubsetIndex::new(group, indices.iter().copied()),
            SetSpec::Described(description) => match description {
                SetDescription::Points { coords } => {
                    let indices = coords
                        .iter()
                        .map(|c| group.index(c).ok_or_else(|| fail(format!("coordinates {c:?} are not in the group"))))
                        .collect::<Result<Vec<_>, _>>()?;
                    SubsetIndex::new(group, indices)
                }
                SetDescription::Multiples { step } => {
                    let n = cyclic()?;
                    if *step == 0 || n % step != 0 {
                        return Err(fail(format!("step {step} must be a positive divisor of {n}")));
                    }
                    Ok(SubsetIndex::from_predicate(group, |x| x % step == 0))
                }
                SetDescription::Progression { start, step, count } => {
                    let n = cyclic()?;
                    SubsetIndex::new(group, (0..*count).map(|i| (start + i * step) % n))
                }
                SetDescription::Sphere { radius2 } => {
                    let factors = group.factors().ok_or_else(|| fail("spheres need an abelian group".into()))?;
                    Ok(SubsetIndex::from_predicate(group, |x| {
                        let coords = group.coords(x).expect("abelian");
                        let r2: u64 = coords
                            .iter()
                            .zip(factors)
                            .map(|(&c, &n)| {
                                let d = c.min(n - c) as u64;
                                d * d
                            })
                            .sum();
                        r2 == *radius2
                    }))
                }
                SetDescription::Ball { center, radius } => {
                    SubsetIndex::singleton(group, *center).and_then(|s| s.ball(*radius))
                }
                SetDescription::Whole => Ok(SubsetIndex::whole(group)),
                SetDescription::Empty => Ok(SubsetIndex::empty(group)),
            },
        };
        set.map_err(|e| fail(e.to_string()))
    }

    pub fn set(&self, group: &Arc<Group>, key: &str) -> Result<Option<SubsetIndex>, ConfigError> {
        let spec = match key {
            "s" => &self.config.sets.s,
            "t" => &self.config.sets.t,
            "s2" => &self.config.sets.s2,
            _ => unreachable!("unknown set key"),
        };
        spec.as_ref().map(|s| self.build_set(group, s)).transpose()
    }

    pub fn require_set(&self, group: &Arc<Group>, key: &str) -> Result<SubsetIndex, ConfigError> {
        self.set(group, key)?.ok_or_else(|| ConfigError::new(format!("missing `sets.{key}`")))
    }

    pub fn family(&self, base: &SubsetIndex) -> Result<NeighborhoodFamily, ConfigError> {
        let chain = self.config.chain.as_ref().ok_or_else(|| ConfigError::new("missing [chain] table"))?;
        match (&chain.radii, &chain.explicit) {
            (Some(radii), None) => {
                NeighborhoodFamily::balls(base, radii.get_ref()).map_err(|e| self.error_at(radii, e.to_string()))
            }
            (None, Some(explicit)) => {
                let sets = explicit
                    .get_ref()
                    .iter()
                    .map(|s| self.build_set(base.group(), &Spanned::new(explicit.span(), s.clone())))
                    .collect::<Result<Vec<_>, _>>()?;
                NeighborhoodFamily::explicit(base, sets).map_err(|e| self.error_at(explicit, e.to_string()))
            }
            _ => Err(ConfigError::new("[chain] needs exactly one of `radii` or `explicit`")),
        }
    }

    pub fn format(&self, cli: Option<Format>, default: Format) -> Format {
        cli.or(self.config.output.format).unwrap_or(default)
    }
}
