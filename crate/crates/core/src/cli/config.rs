//! Run configuration: a TOML document naming a manifold, grid sizes, fields,
//! representations and a list of jobs. Parsing is strict and everything is
//! validated before any job runs.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::run::reference_levels;
use crate::error::{Error, Result};
use crate::field::{parse, ScalarField, VectorField};
use crate::homotopy::{Pi1Representation, RepresentationInput};
use crate::manifold::{make_manifold, Manifold, ManifoldSpec, SubBox};
use crate::representations::Verdict;
use crate::stencil::Order;

/// Grid sizes: a bare integer on one-dimensional manifolds, or one entry per
/// axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Scalar(usize),
    Axes(Vec<usize>),
}

impl GridSpec {
    pub fn sizes(&self) -> Vec<usize> {
        match self {
            GridSpec::Scalar(n) => vec![*n],
            GridSpec::Axes(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldDef {
    pub expr: String,
    #[serde(default)]
    pub support: Option<SubBox>,
    /// Allows functions without compact support (potentials).
    #[serde(default)]
    pub unbounded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorDef {
    pub components: Vec<String>,
    #[serde(default)]
    pub support: Option<SubBox>,
}

fn default_steps() -> usize {
    256
}

fn default_samples() -> usize {
    50
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowDef {
    /// Name of a vector field.
    pub field: String,
    pub lambda: f64,
    #[serde(default = "default_steps")]
    pub steps: usize,
}

/// Analytic spectra a computed spectrum can be scored against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reference {
    /// `½ Σ_a ((m_a + θ_a/2π) 2π/L_a)²` for diagonal representations on a
    /// circle or torus.
    TwistedPlaneWaves,
    /// `n + ½`.
    HarmonicOscillator,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum JobSpec {
    VerifyLr {
        name: String,
        f: String,
        v: String,
    },
    VerifyResolvent {
        name: String,
        v: String,
        #[serde(default)]
        grid: Option<GridSpec>,
    },
    VerifyCovariance {
        name: String,
        flow: FlowDef,
        f: String,
        w: String,
    },
    VerifyLie {
        name: String,
        v: String,
        w: String,
    },
    VerifyCocycle {
        name: String,
        rep: String,
        g: FlowDef,
        h: FlowDef,
        #[serde(default = "default_samples")]
        samples: usize,
        #[serde(default)]
        grid: Option<GridSpec>,
    },
    VerifyLocal {
        name: String,
        rep: String,
        #[serde(rename = "box")]
        region: SubBox,
        #[serde(default)]
        grid: Option<GridSpec>,
    },
    Spectrum {
        name: String,
        rep: String,
        k: usize,
        #[serde(default)]
        potential: Option<String>,
        #[serde(default)]
        order: Order,
        #[serde(default)]
        reference: Option<Reference>,
        #[serde(default)]
        grid: Option<GridSpec>,
    },
    Sweep {
        name: String,
        reps: Vec<String>,
        k: usize,
        #[serde(default)]
        potential: Option<String>,
        #[serde(default)]
        order: Order,
        #[serde(default)]
        reference: Option<Reference>,
        #[serde(default)]
        grid: Option<GridSpec>,
    },
    Equivalence {
        name: String,
        a: String,
        b: String,
        /// Probe classes as exponent vectors of the canonical form.
        classes: Vec<Vec<i64>>,
        #[serde(default)]
        expect: Option<Verdict>,
        #[serde(default)]
        grid: Option<GridSpec>,
    },
}

impl JobSpec {
    pub fn name(&self) -> &str {
        match self {
            JobSpec::VerifyLr { name, .. }
            | JobSpec::VerifyResolvent { name, .. }
            | JobSpec::VerifyCovariance { name, .. }
            | JobSpec::VerifyLie { name, .. }
            | JobSpec::VerifyCocycle { name, .. }
            | JobSpec::VerifyLocal { name, .. }
            | JobSpec::Spectrum { name, .. }
            | JobSpec::Sweep { name, .. }
            | JobSpec::Equivalence { name, .. } => name,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            JobSpec::VerifyLr { .. } => "verify-lr",
            JobSpec::VerifyResolvent { .. } => "verify-resolvent",
            JobSpec::VerifyCovariance { .. } => "verify-covariance",
            JobSpec::VerifyLie { .. } => "verify-lie",
            JobSpec::VerifyCocycle { .. } => "verify-cocycle",
            JobSpec::VerifyLocal { .. } => "verify-local",
            JobSpec::Spectrum { .. } => "spectrum",
            JobSpec::Sweep { .. } => "sweep",
            JobSpec::Equivalence { .. } => "equivalence",
        }
    }

    pub fn is_verification(&self) -> bool {
        !matches!(self, JobSpec::Spectrum { .. } | JobSpec::Sweep { .. })
    }

    fn grid(&self) -> Option<&GridSpec> {
        match self {
            JobSpec::VerifyResolvent { grid, .. }
            | JobSpec::VerifyCocycle { grid, .. }
            | JobSpec::VerifyLocal { grid, .. }
            | JobSpec::Spectrum { grid, .. }
            | JobSpec::Sweep { grid, .. }
            | JobSpec::Equivalence { grid, .. } => grid.as_ref(),
            _ => None,
        }
    }
}

/// Pass thresholds. Config values may tighten these; under strict mode they
/// may not loosen them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case", default)]
pub struct Tolerances {
    /// Residuals at or below this count as exact; convergence ratios are not
    /// required of them.
    pub machine: f64,
    pub lr_residual: f64,
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub resolvent_identity: f64,
    pub limit_ratio_min: f64,
    pub limit_ratio_max: f64,
    pub min_decrease: f64,
    pub exact_shift: f64,
    pub cocycle: f64,
    pub local: f64,
    pub spectrum: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            machine: 1e-10,
            lr_residual: 1e-3,
            ratio_min: 3.5,
            ratio_max: 4.5,
            resolvent_identity: 1e-10,
            limit_ratio_min: 8.0,
            limit_ratio_max: 12.0,
            min_decrease: 3.0,
            exact_shift: 1e-9,
            cocycle: 1e-6,
            local: 1e-12,
            spectrum: 1e-3,
        }
    }
}

impl Tolerances {
    /// Names of thresholds that are looser than the defaults.
    pub fn loosened(&self) -> Vec<&'static str> {
        let d = Tolerances::default();
        let mut out = Vec::new();
        let upper = [
            ("machine", self.machine, d.machine),
            ("lr-residual", self.lr_residual, d.lr_residual),
            ("ratio-max", self.ratio_max, d.ratio_max),
            ("resolvent-identity", self.resolvent_identity, d.resolvent_identity),
            ("limit-ratio-max", self.limit_ratio_max, d.limit_ratio_max),
            ("exact-shift", self.exact_shift, d.exact_shift),
            ("cocycle", self.cocycle, d.cocycle),
            ("local", self.local, d.local),
            ("spectrum", self.spectrum, d.spectrum),
        ];
        for (name, v, def) in upper {
            if v > def {
                out.push(name);
            }
        }
        let lower = [
            ("ratio-min", self.ratio_min, d.ratio_min),
            ("limit-ratio-min", self.limit_ratio_min, d.limit_ratio_min),
            ("min-decrease", self.min_decrease, d.min_decrease),
        ];
        for (name, v, def) in lower {
            if v < def {
                out.push(name);
            }
        }
        out
    }
}

/// A representation as written: `angles`, or `fiber_dim` with `matrices`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepDef {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angles: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fiber_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrices: Option<Vec<Vec<[f64; 2]>>>,
}

impl RepDef {
    pub fn input(&self) -> std::result::Result<RepresentationInput, String> {
        match (&self.angles, self.fiber_dim, &self.matrices) {
            (Some(a), None, None) => Ok(RepresentationInput::Angles { angles: a.clone() }),
            (None, Some(k), Some(m)) => Ok(RepresentationInput::Matrices { fiber_dim: k, matrices: m.clone() }),
            _ => Err("give either `angles` or both `fiber_dim` and `matrices`".into()),
        }
    }
}

/// The document as written.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub manifold: ManifoldSpec,
    #[serde(default)]
    pub grids: Vec<GridSpec>,
    #[serde(default)]
    pub fields: BTreeMap<String, FieldDef>,
    #[serde(default)]
    pub vectors: BTreeMap<String, VectorDef>,
    #[serde(default)]
    pub reps: BTreeMap<String, RepDef>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub jobs: Vec<JobSpec>,
}

/// A validated configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub manifold: Manifold,
    pub grids: Vec<Vec<usize>>,
    pub fields: BTreeMap<String, ScalarField>,
    pub vectors: BTreeMap<String, VectorField>,
    pub reps: BTreeMap<String, Pi1Representation>,
    pub tolerances: Tolerances,
    pub jobs: Vec<JobSpec>,
    /// SHA-256 of the document text, hex.
    pub hash: String,
}

impl RunConfig {
    /// Grid for single-resolution jobs: the job's own, else the first listed.
    pub fn job_grid(&self, job: &JobSpec) -> Option<Vec<usize>> {
        job.grid().map(GridSpec::sizes).or_else(|| self.grids.first().cloned())
    }
}

/// 1-based line of a byte offset.
fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Line of the first `key = ...` or `[key]`-style header mentioning `key`.
fn line_of_key(text: &str, key: &str) -> usize {
    line_of_key_from(text, key, 1)
}

fn line_of_key_from(text: &str, key: &str, first: usize) -> usize {
    if key.is_empty() {
        return 0;
    }
    for (i, line) in text.lines().enumerate().skip(first.saturating_sub(1)) {
        let t = line.trim_start();
        let is_key = t.strip_prefix(key).is_some_and(|rest| rest.trim_start().starts_with('='));
        let is_header = t.starts_with('[') && t.trim_end_matches(']').trim_start_matches('[').split('.').any(|s| s.trim() == key);
        if is_key || is_header {
            return i + 1;
        }
    }
    0
}

fn config_error(text: &str, path: &str, key: &str, message: String) -> Error {
    Error::Config { path: path.into(), line: line_of_key(text, key), message }
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let de = toml::Deserializer::parse(text)
        .map_err(|e| Error::Config { path: String::new(), line: e.span().map_or(0, |s| line_of(text, s.start)), message: e.message().to_string() })?;
    let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let message = inner.message().to_string();
        // spans of tagged tables cover the whole table; narrow to the key named
        // in the message when there is one
        let named = message.split('`').nth(1).unwrap_or("");
        let key = if named.is_empty() { path.rsplit('.').next().unwrap_or("") } else { named };
        let line = match inner.span() {
            Some(s) => {
                let start = line_of(text, s.start);
                let end = text.lines().enumerate().skip(start).find(|(_, l)| l.trim_start().starts_with('[')).map_or(usize::MAX, |(i, _)| i);
                match line_of_key_from(text, key, start) {
                    l if l >= start && l <= end => l,
                    _ => start,
                }
            }
            None => line_of_key(text, key),
        };
        Error::Config { path, line, message }
    })?;
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    let hash = hasher.finalize().iter().map(|b| format!("{b:02x}")).collect();
    validate(text, raw, hash)
}

fn validate(text: &str, raw: RawConfig, hash: String) -> Result<RunConfig> {
    let manifold = make_manifold(raw.manifold.clone()).map_err(|e| config_error(text, "manifold", "manifold", e.to_string()))?;
    let d = manifold.dim();
    let check_grid = |g: &GridSpec, path: &str| -> Result<Vec<usize>> {
        let n = g.sizes();
        if n.len() != d {
            return Err(config_error(text, path, "grids", format!("grid {n:?} needs {d} sizes")));
        }
        crate::manifold::make_grid(&manifold, &n).map_err(|e| config_error(text, path, "grids", e.to_string()))?;
        Ok(n)
    };
    let grids = raw.grids.iter().enumerate().map(|(i, g)| check_grid(g, &format!("grids[{i}]"))).collect::<Result<Vec<_>>>()?;

    let mut fields = BTreeMap::new();
    for (name, def) in &raw.fields {
        let path = format!("fields.{name}");
        let err = |e: Error| config_error(text, &path, name, e.to_string());
        let expr = parse(&def.expr).map_err(err)?;
        let f = if def.unbounded {
            ScalarField::potential(&manifold, expr)
        } else {
            ScalarField::new(&manifold, expr, def.support.clone())
        }
        .map_err(err)?;
        fields.insert(name.clone(), f);
    }
    let mut vectors = BTreeMap::new();
    for (name, def) in &raw.vectors {
        let path = format!("vectors.{name}");
        let srcs: Vec<&str> = def.components.iter().map(String::as_str).collect();
        let v = VectorField::parse(&manifold, &srcs, def.support.clone())
            .map_err(|e| config_error(text, &path, name, e.to_string()))?;
        vectors.insert(name.clone(), v);
    }
    let mut reps = BTreeMap::new();
    for (name, input) in &raw.reps {
        let path = format!("reps.{name}");
        let r = input
            .input()
            .and_then(|i| i.build(manifold.presentation()).map_err(|e| e.to_string()))
            .map_err(|m| config_error(text, &path, name, m))?;
        reps.insert(name.clone(), r);
    }

    let mut names = BTreeSet::new();
    for (i, job) in raw.jobs.iter().enumerate() {
        let path = format!("jobs[{i}]");
        let name = job.name();
        let err = |m: String| config_error(text, &path, name, m);
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
            return Err(err(format!("job name `{name}` must be non-empty and use only letters, digits, '-' and '_'")));
        }
        if !names.insert(name.to_string()) {
            return Err(err(format!("duplicate job name `{name}`")));
        }
        let need_field = |n: &str| if fields.contains_key(n) { Ok(()) } else { Err(err(format!("unknown field `{n}`"))) };
        let need_vector = |n: &str| if vectors.contains_key(n) { Ok(()) } else { Err(err(format!("unknown vector field `{n}`"))) };
        let need_rep = |n: &str| if reps.contains_key(n) { Ok(()) } else { Err(err(format!("unknown representation `{n}`"))) };
        match job {
            JobSpec::VerifyLr { f, v, .. } => {
                need_field(f)?;
                need_vector(v)?;
            }
            JobSpec::VerifyResolvent { v, .. } => need_vector(v)?,
            JobSpec::VerifyCovariance { flow, f, w, .. } => {
                need_vector(&flow.field)?;
                need_field(f)?;
                need_vector(w)?;
            }
            JobSpec::VerifyLie { v, w, .. } => {
                need_vector(v)?;
                need_vector(w)?;
            }
            JobSpec::VerifyCocycle { rep, g, h, .. } => {
                need_rep(rep)?;
                need_vector(&g.field)?;
                need_vector(&h.field)?;
            }
            JobSpec::VerifyLocal { rep, region, .. } => {
                need_rep(rep)?;
                if region.dim() != d {
                    return Err(err(format!("box needs {d} coordinates")));
                }
            }
            JobSpec::Spectrum { rep, potential, reference, k, .. } => {
                need_rep(rep)?;
                if let Some(p) = potential {
                    need_field(p)?;
                }
                if let Some(kind) = reference {
                    reference_levels(&manifold, &reps[rep], *kind, *k).map_err(|e| err(e.to_string()))?;
                }
            }
            JobSpec::Sweep { reps: rs, potential, reference, k, .. } => {
                for r in rs {
                    need_rep(r)?;
                    if let Some(kind) = reference {
                        reference_levels(&manifold, &reps[r], *kind, *k).map_err(|e| err(e.to_string()))?;
                    }
                }
                if let Some(p) = potential {
                    need_field(p)?;
                }
            }
            JobSpec::Equivalence { a, b, classes, .. } => {
                need_rep(a)?;
                need_rep(b)?;
                let rank = manifold.presentation().rank();
                if classes.iter().any(|c| c.len() != rank) {
                    return Err(err(format!("probe classes need {rank} exponents")));
                }
            }
        }
        let grid = match job.grid() {
            Some(g) => Some(check_grid(g, &format!("{path}.grid"))?),
            None => grids.first().cloned(),
        };
        if grid.is_none() {
            return Err(err("no grid given for the job and `grids` is empty".into()));
        }
        if matches!(job, JobSpec::VerifyLr { .. } | JobSpec::VerifyCovariance { .. } | JobSpec::VerifyLie { .. })
            && grids.is_empty()
        {
            return Err(err("convergence jobs need `grids`".into()));
        }
    }
    Ok(RunConfig { manifold, grids, fields, vectors, reps, tolerances: raw.tolerances, jobs: raw.jobs, hash })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
grids = [64]

[manifold]
kind = "circle"
length = 6.283185307179586

[reps.zero]
angles = [0.0]

[[jobs]]
kind = "spectrum"
name = "free"
rep = "zero"
k = 3
"#;

    #[test]
    fn minimal_document() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.jobs.len(), 1);
        assert_eq!(c.grids, vec![vec![64]]);
        assert_eq!(c.hash.len(), 64);
    }

    #[test]
    fn grids_must_come_before_tables() {
        // a key after a table header belongs to that table
        let bad = MINIMAL.replace("grids = [64]\n", "").replace("[reps.zero]", "grids = [64]\n\n[reps.zero]");
        assert!(parse_config(&bad).is_err());
    }

    #[test]
    fn misspelled_key_is_named() {
        let bad = MINIMAL.replace("k = 3", "kk = 3");
        match parse_config(&bad) {
            Err(Error::Config { message, line, .. }) => {
                assert!(message.contains("kk"), "{message}");
                assert_eq!(line, 15);
            }
            other => panic!("{other:?}"),
        }
        let top = format!("{MINIMAL}\ngridz = [1]\n");
        match parse_config(&top) {
            Err(Error::Config { message, .. }) => assert!(message.contains("gridz")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn perturbed_unitary_is_rejected_with_its_generator() {
        let text = r#"
grids = [[16, 16]]

[manifold]
kind = "torus"
lengths = [1.0, 1.0]

[reps.bad]
fiber_dim = 1
matrices = [[[1.000001, 0.0]], [[1.0, 0.0]]]
"#;
        match parse_config(text) {
            Err(Error::Config { path, message, line }) => {
                assert_eq!(path, "reps.bad");
                assert!(message.contains("generator a"), "{message}");
                assert_eq!(line, 8);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_references_fail_fast() {
        let bad = MINIMAL.replace("rep = \"zero\"", "rep = \"one\"");
        assert!(matches!(parse_config(&bad), Err(Error::Config { .. })));
    }

    #[test]
    fn loosened_tolerances_are_listed() {
        let t = Tolerances { cocycle: 1e-3, ratio_min: 2.0, ..Default::default() };
        assert_eq!(t.loosened(), vec!["cocycle", "ratio-min"]);
        assert!(Tolerances::default().loosened().is_empty());
    }
}
