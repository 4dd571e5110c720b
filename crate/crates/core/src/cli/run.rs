//! Job execution.

use std::f64::consts::PI;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::config::{FlowDef, JobSpec, Reference, RunConfig, Tolerances};
use crate::error::{Error, Result};
use crate::flows::{FlowMap, FlowWord};
use crate::homotopy::{HomotopyClass, Pi1Representation};
use crate::manifold::{make_grid, Grid, Manifold, ManifoldKind};
use crate::operators::{
    check_resolvent_identities, covariance_residuals, lie_residual, lr_residual, ResidualReport,
};
use crate::representations::{check_cocycle, check_equivalence, compare_locally, RepSpace, Verdict};
use crate::spectra::{spectrum, theta_sweep, SpectrumOptions};

/// Which jobs a command runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Relation checks and equivalence tests.
    Verify,
    /// Spectra and sweeps.
    Spectrum,
    /// Everything.
    Report,
}

impl Command {
    pub fn selects(self, job: &JobSpec) -> bool {
        match self {
            Command::Verify => job.is_verification(),
            Command::Spectrum => !job.is_verification(),
            Command::Report => true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

/// A CSV body: header and rows, already formatted.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

#[derive(Debug, Clone)]
pub struct JobOutcome {
    pub name: String,
    pub kind: &'static str,
    pub inputs: Value,
    pub status: Status,
    pub message: Option<String>,
    pub results: Value,
    pub table: Option<Table>,
}

/// Settings shared by all jobs of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct JobContext {
    pub seed: u64,
    pub strict: bool,
}

/// Floats in tables: 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_grid(n: &[usize]) -> String {
    n.iter().map(usize::to_string).collect::<Vec<_>>().join("x")
}

/// Job outcome before it is labelled.
struct Done {
    pass: bool,
    message: Option<String>,
    results: Value,
    table: Table,
}

fn fail_unless(pass: bool, what: impl FnOnce() -> String) -> Option<String> {
    if pass {
        None
    } else {
        Some(what())
    }
}

pub fn run_job(cfg: &RunConfig, job: &JobSpec, ctx: &JobContext) -> JobOutcome {
    let inputs = serde_json::to_value(job).unwrap_or(Value::Null);
    let outcome = match job {
        JobSpec::VerifyLr { f, v, .. } => {
            let (f, v) = (&cfg.fields[f], &cfg.vectors[v]);
            convergence(cfg, |g| Ok(vec![lr_residual(g, f, v)?]), Criterion::Order2)
        }
        JobSpec::VerifyLie { v, w, .. } => {
            let (v, w) = (&cfg.vectors[v], &cfg.vectors[w]);
            convergence(cfg, |g| Ok(vec![lie_residual(g, v, w)?]), Criterion::Decrease)
        }
        JobSpec::VerifyCovariance { flow, f, w, .. } => flow_word(cfg, flow).and_then(|g| {
            let (f, w) = (&cfg.fields[f], &cfg.vectors[w]);
            convergence(cfg, |grid| covariance_residuals(grid, &g, f, w), Criterion::Decrease)
        }),
        JobSpec::VerifyResolvent { v, .. } => grid_for(cfg, job).and_then(|g| resolvent_job(&cfg.tolerances, &g, &cfg.vectors[v])),
        JobSpec::VerifyCocycle { rep, g, h, samples, .. } => cocycle_job(cfg, job, rep, g, h, *samples, ctx.seed),
        JobSpec::VerifyLocal { rep, region, .. } => space(cfg, job, rep).and_then(|s| {
            let c = compare_locally(&s, region)?;
            let tol = cfg.tolerances.local;
            let mut table = Table::new(&["part", "difference"]);
            for (part, x) in [
                ("multiplication", c.multiplication),
                ("momentum", c.momentum),
                ("unitary", c.unitary),
                ("dirichlet_spectrum", c.dirichlet_spectrum),
            ] {
                table.push(vec![part.into(), fmt_f64(x)]);
            }
            Ok(Done {
                pass: c.max() <= tol,
                message: fail_unless(c.max() <= tol, || format!("largest difference {:.3e} exceeds {tol:.1e}", c.max())),
                results: json!(c),
                table,
            })
        }),
        JobSpec::Spectrum { rep, k, potential, order, reference, .. } => space(cfg, job, rep).and_then(|s| {
            let opts = SpectrumOptions { order: *order, eigen: eigen_options(ctx.seed) };
            let pot = potential.as_ref().map(|p| &cfg.fields[p]);
            let r = spectrum(&s, pot, *k, &opts)?;
            let refs = match reference {
                Some(kind) => Some(reference_levels(&cfg.manifold, s.rep(), *kind, *k)?),
                None => None,
            };
            let mut table = Table::new(&["index", "eigenvalue", "residual", "reference", "error"]);
            let mut worst = 0.0f64;
            for (i, e) in r.eigenvalues.iter().enumerate() {
                let (rf, err) = match &refs {
                    Some(l) => {
                        let d = (e - l[i]).abs();
                        worst = worst.max(d);
                        (fmt_f64(l[i]), fmt_f64(d))
                    }
                    None => (String::new(), String::new()),
                };
                table.push(vec![i.to_string(), fmt_f64(*e), fmt_f64(r.residuals[i]), rf, err]);
            }
            let tol = cfg.tolerances.spectrum;
            Ok(Done {
                pass: worst <= tol,
                message: fail_unless(worst <= tol, || format!("reference error {worst:.3e} exceeds {tol:.1e}")),
                results: json!({ "spectrum": r, "degeneracies": r.degeneracies(), "max_reference_error": refs.map(|_| worst) }),
                table,
            })
        }),
        JobSpec::Sweep { reps, k, potential, order, reference, .. } => sweep_job(cfg, job, reps, *k, potential.as_deref(), *order, *reference, ctx.seed),
        JobSpec::Equivalence { a, b, classes, expect, .. } => grid_for(cfg, job).and_then(|g| {
            let s1 = RepSpace::new(g.clone(), cfg.reps[a].clone())?;
            let s2 = RepSpace::new(g, cfg.reps[b].clone())?;
            let classes: Vec<HomotopyClass> = classes.iter().map(|e| HomotopyClass { exponents: e.clone() }).collect();
            let r = check_equivalence(&s1, &s2, &classes)?;
            let verdict = serde_json::to_value(r.verdict).unwrap_or(Value::Null);
            let verdict = verdict.as_str().unwrap_or_default().to_string();
            let mut message = None;
            if let Some(e) = expect {
                if *e != r.verdict {
                    message = Some(format!("verdict {verdict}, expected {}", serde_json::to_value(e).unwrap_or(Value::Null)));
                }
            }
            if message.is_none() && ctx.strict && r.verdict == Verdict::Inconclusive {
                message = Some("inconclusive verdict under strict tolerance".into());
            }
            let mut table = Table::new(&["verdict", "max_trace_difference", "max_eigenvalue_difference", "eigenvalues_compared"]);
            table.push(vec![verdict, fmt_f64(r.max_trace_difference), fmt_f64(r.max_eigenvalue_difference), r.eigenvalues_compared.to_string()]);
            Ok(Done { pass: message.is_none(), message, results: json!(r), table })
        }),
    };
    let (status, message, results, table) = match outcome {
        Ok(d) => (if d.pass { Status::Pass } else { Status::Fail }, d.message, d.results, Some(d.table)),
        Err(e) => (Status::Error, Some(Error::Job { job: job.name().into(), message: e.to_string() }.to_string()), Value::Null, None),
    };
    JobOutcome { name: job.name().into(), kind: job.kind(), inputs, status, message, results, table }
}

fn eigen_options(seed: u64) -> crate::linalg::eigen::EigenOptions {
    crate::linalg::eigen::EigenOptions { seed, ..Default::default() }
}

fn grid_for(cfg: &RunConfig, job: &JobSpec) -> Result<Grid> {
    let n = cfg.job_grid(job).ok_or_else(|| Error::InvalidParam("no grid".into()))?;
    make_grid(&cfg.manifold, &n)
}

fn space(cfg: &RunConfig, job: &JobSpec, rep: &str) -> Result<RepSpace> {
    RepSpace::new(grid_for(cfg, job)?, cfg.reps[rep].clone())
}

fn flow_word(cfg: &RunConfig, f: &FlowDef) -> Result<FlowWord> {
    Ok(FlowWord::single(FlowMap::new(&cfg.vectors[&f.field], f.lambda, f.steps)?))
}

#[derive(Clone, Copy)]
enum Criterion {
    /// Finest residual under the LR tolerance, ratios in the order-two window.
    Order2,
    /// Ratios at least the minimum decrease, or the finest residual exact.
    Decrease,
}

/// Residual studies over the configured grids; a single grid is paired with
/// its doubling.
fn convergence(cfg: &RunConfig, study: impl Fn(&Grid) -> Result<Vec<ResidualReport>>, crit: Criterion) -> Result<Done> {
    let t = &cfg.tolerances;
    let mut sizes = cfg.grids.clone();
    if sizes.len() == 1 {
        sizes.push(sizes[0].iter().map(|n| 2 * n).collect());
    }
    let mut levels = Vec::new();
    for n in &sizes {
        levels.push(study(&make_grid(&cfg.manifold, n)?)?);
    }
    let mut table = Table::new(&["check", "resolution", "residual", "norm_kind", "ratio"]);
    let mut failures = Vec::new();
    let mut ratios = Vec::new();
    let checks = levels[0].len();
    for c in 0..checks {
        for (l, reports) in levels.iter().enumerate() {
            let r = &reports[c];
            let mut ratio = String::new();
            if l > 0 {
                let prev = &levels[l - 1][c];
                let doubled = prev.resolution.iter().zip(&r.resolution).all(|(a, b)| 2 * a == *b);
                if doubled {
                    let q = prev.residual / r.residual;
                    ratio = fmt_f64(q);
                    ratios.push(json!({ "check": r.check, "resolution": r.resolution, "ratio": q }));
                    let ok = match crit {
                        Criterion::Order2 => r.residual <= t.machine || (t.ratio_min..=t.ratio_max).contains(&q),
                        Criterion::Decrease => r.residual <= t.exact_shift || q >= t.min_decrease,
                    };
                    if !ok {
                        failures.push(format!("{} ratio {q:.3} at {}", r.check, fmt_grid(&r.resolution)));
                    }
                }
            }
            let norm = serde_json::to_value(r.norm_kind).unwrap_or(Value::Null);
            table.push(vec![
                r.check.clone(),
                fmt_grid(&r.resolution),
                fmt_f64(r.residual),
                norm.as_str().unwrap_or_default().into(),
                ratio,
            ]);
        }
        let finest = &levels[levels.len() - 1][c];
        if matches!(crit, Criterion::Order2) && finest.residual > t.lr_residual {
            failures.push(format!("{} residual {:.3e} exceeds {:.1e}", finest.check, finest.residual, t.lr_residual));
        }
    }
    let reports: Vec<&ResidualReport> = levels.iter().flatten().collect();
    Ok(Done {
        pass: failures.is_empty(),
        message: if failures.is_empty() { None } else { Some(failures.join("; ")) },
        results: json!({ "residuals": reports, "ratios": ratios }),
        table,
    })
}

fn resolvent_job(t: &Tolerances, grid: &Grid, v: &crate::field::VectorField) -> Result<Done> {
    let reports = check_resolvent_identities(grid, v)?;
    let mut table = Table::new(&["check", "lambda", "residual", "ratio"]);
    let mut failures = Vec::new();
    let mut prev: Option<f64> = None;
    for r in &reports {
        let lambda = r.params.get("lambda").and_then(Value::as_f64);
        let mut ratio = String::new();
        match lambda {
            None => {
                if r.residual > t.resolvent_identity {
                    failures.push(format!("{} residual {:.3e} exceeds {:.1e}", r.check, r.residual, t.resolvent_identity));
                }
            }
            Some(_) => {
                if let Some(p) = prev {
                    let q = p / r.residual;
                    ratio = fmt_f64(q);
                    if r.residual > t.machine && !(t.limit_ratio_min..=t.limit_ratio_max).contains(&q) {
                        failures.push(format!("{} ratio {q:.3}", r.check));
                    }
                }
                prev = Some(r.residual);
            }
        }
        table.push(vec![r.check.clone(), lambda.map(fmt_f64).unwrap_or_default(), fmt_f64(r.residual), ratio]);
    }
    Ok(Done {
        pass: failures.is_empty(),
        message: if failures.is_empty() { None } else { Some(failures.join("; ")) },
        results: json!({ "residuals": reports }),
        table,
    })
}

/// Stream seed for a job: the run seed mixed with the job name, so adding or
/// reordering jobs leaves the samples of the others unchanged.
fn job_seed(seed: u64, name: &str) -> u64 {
    let d = Sha256::digest(name.as_bytes());
    let mut b = [0u8; 8];
    b.copy_from_slice(&d[..8]);
    seed ^ u64::from_le_bytes(b)
}

/// Uniform points of the fundamental domain.
pub fn sample_points(m: &Manifold, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..m.dim()).map(|a| m.lo()[a] + rng.random::<f64>() * m.length(a)).collect())
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn cocycle_job(cfg: &RunConfig, job: &JobSpec, rep: &str, g: &FlowDef, h: &FlowDef, samples: usize, seed: u64) -> Result<Done> {
    let s = space(cfg, job, rep)?;
    let (g, h) = (flow_word(cfg, g)?, flow_word(cfg, h)?);
    let pts = sample_points(&cfg.manifold, samples, job_seed(seed, job.name()));
    let r = check_cocycle(&s, &g, &h, &pts)?;
    let tol = cfg.tolerances.cocycle;
    let mut table = Table::new(&["check", "resolution", "samples", "residual"]);
    table.push(vec![r.check.clone(), fmt_grid(&r.resolution), samples.to_string(), fmt_f64(r.residual)]);
    Ok(Done {
        pass: r.residual <= tol,
        message: fail_unless(r.residual <= tol, || format!("residual {:.3e} exceeds {tol:.1e}", r.residual)),
        results: json!(r),
        table,
    })
}

#[allow(clippy::too_many_arguments)]
fn sweep_job(
    cfg: &RunConfig,
    job: &JobSpec,
    reps: &[String],
    k: usize,
    potential: Option<&str>,
    order: crate::stencil::Order,
    reference: Option<Reference>,
    seed: u64,
) -> Result<Done> {
    let n = cfg.job_grid(job).ok_or_else(|| Error::InvalidParam("no grid".into()))?;
    let opts = SpectrumOptions { order, eigen: eigen_options(seed) };
    let pot = potential.map(|p| &cfg.fields[p]);
    let list: Vec<Pi1Representation> = reps.iter().map(|r| cfg.reps[r].clone()).collect();
    let out = theta_sweep(&cfg.manifold, &list, &n, k, pot, &opts);
    let mut header: Vec<String> = vec!["rep".into(), "fiber_dim".into(), "grid".into()];
    header.extend((0..k).map(|i| format!("e{i}")));
    header.extend(["max_residual".into(), "max_reference_error".into()]);
    let mut table = Table { header, rows: Vec::new() };
    let mut failures = Vec::new();
    let mut entries = Vec::new();
    for ((name, rep), r) in reps.iter().zip(&list).zip(out) {
        match r {
            Ok(r) => {
                let worst_res = r.residuals.iter().cloned().fold(0.0, f64::max);
                let err = match reference {
                    Some(kind) => {
                        let l = reference_levels(&cfg.manifold, rep, kind, k)?;
                        Some(r.eigenvalues.iter().zip(&l).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                    }
                    None => None,
                };
                if let Some(e) = err {
                    if e > cfg.tolerances.spectrum {
                        failures.push(format!("{name}: reference error {e:.3e}"));
                    }
                }
                let mut row = vec![name.clone(), r.fiber_dim.to_string(), fmt_grid(&r.grid)];
                row.extend(r.eigenvalues.iter().map(|e| fmt_f64(*e)));
                row.push(fmt_f64(worst_res));
                row.push(err.map(fmt_f64).unwrap_or_default());
                table.push(row);
                entries.push(json!({ "rep": name, "spectrum": r, "max_reference_error": err }));
            }
            Err(e) => {
                failures.push(format!("{name}: {e}"));
                entries.push(json!({ "rep": name, "error": e.to_string() }));
            }
        }
    }
    Ok(Done {
        pass: failures.is_empty(),
        message: if failures.is_empty() { None } else { Some(failures.join("; ")) },
        results: json!({ "entries": entries }),
        table,
    })
}

/// Analytic low spectrum of the free or harmonic problem, `k` levels.
pub fn reference_levels(m: &Manifold, rep: &Pi1Representation, kind: Reference, k: usize) -> Result<Vec<f64>> {
    match kind {
        Reference::HarmonicOscillator => {
            if m.kind() != ManifoldKind::Line {
                return Err(Error::InvalidParam("harmonic-oscillator reference needs the line".into()));
            }
            Ok((0..k).map(|n| n as f64 + 0.5).collect())
        }
        Reference::TwistedPlaneWaves => {
            if !matches!(m.kind(), ManifoldKind::Circle | ManifoldKind::Torus) {
                return Err(Error::InvalidParam("twisted-plane-waves reference needs a circle or torus".into()));
            }
            let f = rep.fiber_dim;
            for g in &rep.matrices {
                for i in 0..f {
                    for j in 0..f {
                        if i != j && g[(i, j)].norm() > 1e-12 {
                            return Err(Error::InvalidParam("twisted-plane-waves reference needs diagonal generators".into()));
                        }
                    }
                }
            }
            let reach = k as i64 + 2;
            let mut levels = Vec::new();
            for c in 0..f {
                let mut partial = vec![0.0];
                for (a, g) in rep.matrices.iter().enumerate() {
                    let shift = g[(c, c)].arg() / (2.0 * PI);
                    let scale = 2.0 * PI / m.length(a);
                    partial = partial
                        .iter()
                        .flat_map(|p| (-reach..=reach).map(move |n| p + 0.5 * ((n as f64 + shift) * scale).powi(2)))
                        .collect();
                }
                levels.extend(partial);
            }
            levels.sort_by(f64::total_cmp);
            levels.truncate(k);
            Ok(levels)
        }
    }
}
