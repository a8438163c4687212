//! Command-line surface: `solve`, `converge`, `check`, `oracle`, `catalogue`.
//!
//! Each command writes deterministic reports into the output directory;
//! wall-clock data goes to a separate `metadata.json`.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::assembly::{DiscreteOperatorPair, Geometry};
use crate::config::{ConvergeConfig, RunConfig};
use crate::eigensolve::{
    growth_diagnostics, sign_changes, solve_dense, solve_successive, EigenSequence, GrowthReport, DENSE_THRESHOLD,
};
use crate::inequalities::{
    check_ckn_radial, check_hardy, check_sobolev, hardy_constant, hardy_interpolation_gap, reduction_gaps,
    CheckVerdict, CknParams, InequalityReport, PowerCutoff, ProfileQuadrature, RadialProfile, TruncatedGaussian,
};
use crate::oracle::{oracle_eigen, RadialProblem, ShootSettings, ShootingResult};
use crate::report::{csv_table, write_json};
use crate::weights::{catalogue, verify_condition_g, GReport, GSampling, WeightSpec};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "ckn-eigen",
    version,
    about = "Eigenpairs of -div(|x|^alpha grad u) = lambda g u and weighted inequality checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// TOML configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Builtin preset (see `catalogue`).
    #[arg(long, global = true, value_name = "NAME")]
    pub preset: Option<String>,
    /// Output directory (overrides the configuration).
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Seed for start vectors and random test vectors.
    #[arg(long, global = true, value_name = "INT")]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the first eigenpairs and write the eigenvalue report.
    Solve {
        /// Also write A, B and H as coordinate triples.
        #[arg(long)]
        export_matrices: bool,
    },
    /// Mesh refinement and truncation study.
    Converge,
    /// Hardy, Sobolev and CKN quotient checks.
    Check,
    /// Shooting-oracle eigenvalues as a golden file.
    Oracle,
    /// List builtin weights with their condition (G) verdicts, and the presets.
    Catalogue,
}

/// Result of a command: the exit status and a human-readable summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub exit_code: i32,
    pub summary: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Claim {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

fn claim_le(name: &str, value: f64, threshold: f64) -> Claim {
    Claim {
        name: name.into(),
        value,
        threshold,
        pass: value <= threshold,
    }
}

fn claim_ge(name: &str, value: f64, threshold: f64) -> Claim {
    Claim {
        name: name.into(),
        value,
        threshold,
        pass: value >= threshold,
    }
}

fn claim_bool(name: &str, pass: bool) -> Claim {
    Claim {
        name: name.into(),
        value: if pass { 1.0 } else { 0.0 },
        threshold: 1.0,
        pass,
    }
}

fn load(common: &Common, required: bool) -> Result<Option<(RunConfig, String)>> {
    let (mut cfg, source) = match (&common.config, &common.preset) {
        (Some(_), Some(_)) => return Err(Error::config("--config", "give either --config or --preset, not both")),
        (Some(path), None) => (RunConfig::from_file(path)?, path.display().to_string()),
        (None, Some(name)) => (RunConfig::preset(name)?, format!("preset:{name}")),
        (None, None) if required => {
            return Err(Error::config(
                "--config",
                "a configuration is required: pass --config PATH or --preset NAME",
            ))
        }
        (None, None) => return Ok(None),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.output_dir = out.clone();
    }
    Ok(Some((cfg, source)))
}

fn write_text(dir: &Path, name: &str, text: &str) -> Result<()> {
    std::fs::write(dir.join(name), text)?;
    Ok(())
}

fn write_metadata(dir: &Path, command: &str, source: &str) -> Result<()> {
    let now = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    write_json(
        &dir.join("metadata.json"),
        &json!({
            "command": command,
            "source": source,
            "version": env!("CARGO_PKG_VERSION"),
            "timestamp_unix": now,
        }),
    )
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Catalogue => {
            let loaded = load(&cli.common, false)?;
            cmd_catalogue(loaded.as_ref().map(|(c, _)| c), cli.common.out.as_deref())
        }
        command => {
            let (cfg, source) = load(&cli.common, true)?.expect("required configuration");
            std::fs::create_dir_all(&cfg.output_dir)?;
            let (name, outcome) = match command {
                Command::Solve { export_matrices } => ("solve", cmd_solve(&cfg, *export_matrices)?),
                Command::Converge => ("converge", cmd_converge(&cfg)?),
                Command::Check => ("check", cmd_check(&cfg)?),
                Command::Oracle => ("oracle", cmd_oracle(&cfg)?),
                Command::Catalogue => unreachable!(),
            };
            write_metadata(&cfg.output_dir, name, &source)?;
            Ok(outcome)
        }
    }
}

fn is_pure_positive(pair: &DiscreteOperatorPair) -> bool {
    pair.mass == pair.mass_plus
}

fn max_off_diagonal(row: &[f64], i: usize) -> f64 {
    row.iter()
        .enumerate()
        .filter(|(j, _)| *j != i)
        .map(|(_, v)| v.abs())
        .fold(0.0, f64::max)
}

/// Claims checked on a computed sequence; shared by `solve` and the acceptance harness.
pub fn sequence_claims(pair: &DiscreteOperatorPair, seq: &EigenSequence, growth: Option<&GrowthReport>) -> Vec<Claim> {
    let mut claims = Vec::new();
    if seq.pairs.is_empty() {
        claims.push(claim_bool("at least one positive eigenvalue", false));
        return claims;
    }
    let l = seq.lambdas();
    let lk = l.iter().copied().fold(0.0, f64::max);
    claims.push(claim_bool("eigenvalues positive", l.iter().all(|&x| x > 0.0)));
    let min_gap = l.windows(2).map(|w| (w[1] - w[0]) / w[1]).fold(f64::INFINITY, f64::min);
    claims.push(Claim {
        name: "eigenvalues nondecreasing (min relative gap)".into(),
        value: if l.len() > 1 { min_gap } else { 0.0 },
        threshold: -1e-9,
        pass: l.len() < 2 || min_gap >= -1e-9,
    });
    let max_res = seq.pairs.iter().map(|p| p.residual).fold(0.0, f64::max);
    claims.push(claim_le("max relative residual", max_res, 1e-8));
    claims.push(claim_le(
        "max cross energy product / lambda_k",
        seq.max_cross_energy() / lk,
        1e-8,
    ));
    claims.push(claim_le(
        "max |int g e_i e_j - delta_ij|",
        seq.max_mass_deviation(),
        1e-8,
    ));
    claims.push(claim_le(
        "max |<e_n,e_n>_alpha - lambda_n| / lambda_n",
        seq.max_energy_mismatch(),
        1e-8,
    ));
    if let Some(g) = growth {
        claims.push(claim_le("max | ||f_n||_alpha^2 - 1 |", g.max_f_energy_error, 1e-10));
        claims.push(claim_le("max |1/lambda_n - int g f_n^2|", g.max_identity_error, 1e-10));
        claims.push(claim_ge("min (int g+ f_n^2 - 1/lambda_n)", g.min_bound_margin, -1e-12));
    }
    if is_pure_positive(pair) {
        let e1 = &seq.pairs[0].vector;
        let max = e1.iter().fold(0.0f64, |m, v| m.max(*v));
        let min = e1.iter().fold(f64::INFINITY, |m, v| m.min(*v));
        claims.push(claim_ge("min e_1 / max e_1", min / max, -1e-8));
    }
    if matches!(pair.geometry, Geometry::Radial(_)) && is_pure_positive(pair) {
        let ok = seq.pairs.iter().all(|p| sign_changes(&p.vector) == p.n - 1);
        claims.push(claim_bool("e_n has n-1 sign changes", ok));
    }
    claims
}

fn sequence_rows(seq: &EigenSequence) -> Vec<Value> {
    seq.pairs
        .iter()
        .enumerate()
        .map(|(i, p)| {
            json!({
                "n": p.n,
                "lambda": p.lambda,
                "residual": p.residual,
                "b_norm": p.b_norm,
                "max_cross_energy": max_off_diagonal(&seq.energy_products[i], i),
                "max_cross_mass": max_off_diagonal(&seq.mass_products[i], i),
                "iterations": p.iterations,
                "converged": p.converged,
                "cluster": p.cluster,
                "sign_changes": sign_changes(&p.vector),
            })
        })
        .collect()
}

/// `solve`: successive minimization, dense cross-check when the order permits.
pub fn cmd_solve(cfg: &RunConfig, export_matrices: bool) -> Result<Outcome> {
    let dir = &cfg.output_dir;
    let pair = cfg.problem.assemble()?;
    let settings = cfg.problem.settings(cfg.seed);
    let seq = solve_successive(&pair, &settings)?;
    let growth = if seq.pairs.is_empty() {
        None
    } else {
        Some(growth_diagnostics(&seq, &pair)?)
    };
    let mut claims = sequence_claims(&pair, &seq, growth.as_ref());

    let dense = if pair.order() <= DENSE_THRESHOLD {
        let d = solve_dense(&pair, settings.count)?;
        let diff = d
            .pairs
            .iter()
            .zip(&seq.pairs)
            .map(|(a, b)| (a.lambda - b.lambda).abs() / a.lambda)
            .fold(0.0, f64::max);
        claims.push(claim_le("max relative difference to dense solve", diff, 1e-6));
        claims.push(claim_bool(
            "dense and successive find the same count",
            d.pairs.len() == seq.pairs.len(),
        ));
        Some(json!({ "lambdas": d.lambdas(), "max_relative_difference": diff }))
    } else {
        None
    };

    let all_pass = claims.iter().all(|c| c.pass);
    let report = json!({
        "command": "solve",
        "problem": cfg.problem,
        "seed": cfg.seed,
        "order": pair.order(),
        "requested": seq.requested,
        "found": seq.pairs.len(),
        "partial": seq.is_partial(),
        "warnings": seq.warnings,
        "claims": claims,
        "all_claims_pass": all_pass,
        "eigenvalues": sequence_rows(&seq),
        "diagnostics": {
            "method": seq.method,
            "exhausted": seq.exhausted,
            "energy_products": seq.energy_products,
            "mass_products": seq.mass_products,
            "growth": growth,
            "dense": dense,
        },
    });
    write_json(&dir.join("report.json"), &report)?;
    for p in &seq.pairs {
        write_text(dir, &format!("eigenvector_{}.csv", p.n), &pair.vector_csv(&p.vector))?;
    }
    match &pair.geometry {
        Geometry::Radial(m) => write_text(dir, "mesh.csv", &m.to_csv())?,
        Geometry::Grid(g) => write_text(dir, "mesh.csv", &g.to_csv())?,
    }
    if export_matrices {
        write_text(dir, "stiffness.txt", &pair.stiffness.to_coordinate_text())?;
        write_text(dir, "mass.txt", &pair.mass.to_coordinate_text())?;
        write_text(dir, "hardy.txt", &pair.hardy.to_coordinate_text())?;
    }

    let mut summary = String::new();
    for p in &seq.pairs {
        summary += &format!("lambda_{} = {:.16e}  residual {:.3e}\n", p.n, p.lambda, p.residual);
    }
    for w in &seq.warnings {
        summary += &format!("warning: {w}\n");
    }
    for c in claims.iter().filter(|c| !c.pass) {
        summary += &format!("violated: {} = {:e} (threshold {:e})\n", c.name, c.value, c.threshold);
    }
    Ok(Outcome {
        exit_code: if all_pass { 0 } else { 2 },
        summary,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Rung {
    pub elements: usize,
    pub radius: f64,
    pub grading: f64,
    pub lambdas: Vec<f64>,
    pub hardy_gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModeTrend {
    pub n: usize,
    pub differences: Vec<f64>,
    pub orders: Vec<f64>,
    pub differences_decreasing: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceStudy {
    pub rungs: Vec<Rung>,
    pub trends: Vec<ModeTrend>,
    /// Hardy interpolation gap on the first rung divided by the gap on the last.
    pub hardy_gap_reduction: f64,
    pub truncation: Vec<Rung>,
}

fn run_rung(cfg: &RunConfig, geometry: crate::config::GeometryConfig) -> Result<Rung> {
    let mut problem = cfg.problem.clone();
    problem.geometry = geometry;
    let pair = problem.assemble()?;
    let seq = solve_successive(&pair, &problem.settings(cfg.seed))?;
    let profile = TruncatedGaussian {
        width: 1.0,
        radius: problem.geometry.radius(),
    };
    let (elements, grading) = match problem.geometry {
        crate::config::GeometryConfig::Radial { elements, grading, .. } => (elements, grading),
        crate::config::GeometryConfig::Grid { nodes, .. } => (nodes, 1.0),
    };
    Ok(Rung {
        elements,
        radius: problem.geometry.radius(),
        grading,
        lambdas: seq.lambdas(),
        hardy_gap: hardy_interpolation_gap(&pair, &profile)?,
    })
}

/// Runs the refinement ladder (and the optional truncation sweep).
pub fn convergence_study(cfg: &RunConfig) -> Result<ConvergenceStudy> {
    let ladder = match &cfg.converge {
        Some(c) => c.clone(),
        None => {
            let m = match cfg.problem.geometry {
                crate::config::GeometryConfig::Radial { elements, .. } => elements,
                _ => return Err(Error::config("converge", "refinement ladders need a radial geometry")),
            };
            ConvergeConfig {
                elements: vec![m / 4, m / 2, m, 2 * m],
                radii: Vec::new(),
            }
        }
    };
    if ladder.elements.len() < 3 {
        return Err(Error::config(
            "converge.elements",
            "refinement ladder needs at least 3 rungs",
        ));
    }
    let mut rungs = Vec::new();
    for &m in &ladder.elements {
        rungs.push(run_rung(cfg, cfg.problem.geometry.refined(m)?)?);
    }
    let k = rungs.iter().map(|r| r.lambdas.len()).min().unwrap_or(0);
    let mut trends = Vec::new();
    for n in 0..k {
        let differences: Vec<f64> = rungs
            .windows(2)
            .map(|w| (w[1].lambdas[n] - w[0].lambdas[n]).abs())
            .collect();
        let orders: Vec<f64> = differences
            .windows(2)
            .zip(rungs.windows(3))
            .map(|(d, r)| (d[0] / d[1]).ln() / (r[2].elements as f64 / r[1].elements as f64).ln())
            .collect();
        trends.push(ModeTrend {
            n: n + 1,
            differences_decreasing: differences.windows(2).all(|w| w[1] < w[0]),
            differences,
            orders,
        });
    }
    let finest = *ladder.elements.last().unwrap();
    let mut truncation = Vec::new();
    for &r in &ladder.radii {
        truncation.push(run_rung(cfg, cfg.problem.geometry.with_radius(r).refined(finest)?)?);
    }
    Ok(ConvergenceStudy {
        hardy_gap_reduction: rungs[0].hardy_gap / rungs[rungs.len() - 1].hardy_gap,
        rungs,
        trends,
        truncation,
    })
}

fn rung_table(rungs: &[Rung]) -> Result<String> {
    let k = rungs.iter().map(|r| r.lambdas.len()).min().unwrap_or(0);
    let mut header: Vec<String> = vec!["elements".into(), "radius".into(), "grading".into()];
    header.extend((1..=k).map(|n| format!("lambda_{n}")));
    header.push("hardy_gap".into());
    let rows: Vec<Vec<f64>> = rungs
        .iter()
        .map(|r| {
            let mut row = vec![r.elements as f64, r.radius, r.grading];
            row.extend(&r.lambdas[..k]);
            row.push(r.hardy_gap);
            row
        })
        .collect();
    let h: Vec<&str> = header.iter().map(String::as_str).collect();
    csv_table(&h, &rows)
}

/// `converge`: refinement ladder, order estimates, Hardy gap trend.
pub fn cmd_converge(cfg: &RunConfig) -> Result<Outcome> {
    let dir = &cfg.output_dir;
    let study = convergence_study(cfg)?;
    write_text(dir, "convergence.csv", &rung_table(&study.rungs)?)?;
    if !study.truncation.is_empty() {
        write_text(dir, "truncation.csv", &rung_table(&study.truncation)?)?;
    }
    let mut rows = Vec::new();
    for t in &study.trends {
        for (i, d) in t.differences.iter().enumerate() {
            rows.push(vec![
                t.n as f64,
                i as f64,
                *d,
                t.orders.get(i).copied().unwrap_or(f64::NAN),
            ]);
        }
    }
    write_text(
        dir,
        "orders.csv",
        &csv_table(&["n", "rung", "difference", "order"], &rows)?,
    )?;

    let claims: Vec<Claim> = study
        .trends
        .iter()
        .map(|t| {
            claim_bool(
                &format!("lambda_{} ladder differences decrease", t.n),
                t.differences_decreasing,
            )
        })
        .chain(study.trends.first().and_then(|t| t.orders.last()).map(|&p| Claim {
            name: "lambda_1 order estimate on the finest rungs".into(),
            value: p,
            threshold: 0.3,
            pass: (p - 2.0).abs() <= 0.3,
        }))
        .chain(std::iter::once(claim_ge(
            "hardy gap reduction first/last rung",
            study.hardy_gap_reduction,
            2.0,
        )))
        .collect();
    let all_pass = claims.iter().all(|c| c.pass);
    write_json(
        &dir.join("report.json"),
        &json!({
            "command": "converge",
            "problem": cfg.problem,
            "claims": claims,
            "all_claims_pass": all_pass,
            "diagnostics": study,
        }),
    )?;
    let mut summary = String::new();
    for t in &study.trends {
        summary += &format!("lambda_{}: orders {:?}\n", t.n, t.orders);
    }
    Ok(Outcome {
        exit_code: if all_pass { 0 } else { 2 },
        summary,
    })
}

/// Power-cutoff Hardy quotients for shrinking epsilon.
#[derive(Debug, Clone, Serialize)]
pub struct NearOptimizers {
    pub epsilons: Vec<f64>,
    pub quotients: Vec<f64>,
    pub constant: f64,
    pub increasing: bool,
    pub bounded: bool,
}

pub fn near_optimizers(dimension: usize, alpha: f64, slack: f64) -> Result<NearOptimizers> {
    let params = CknParams::hardy(dimension, alpha)?;
    let beta = (dimension as f64 - 2.0 + alpha) / 2.0;
    let epsilons: Vec<f64> = [0.4, 0.2, 0.1, 0.05, 0.02, 0.01].iter().map(|f| f * beta).collect();
    let profiles: Vec<PowerCutoff> = epsilons
        .iter()
        .map(|&e| PowerCutoff::new(dimension, alpha, e))
        .collect();
    let refs: Vec<&dyn RadialProfile> = profiles.iter().map(|p| p as &dyn RadialProfile).collect();
    let c = hardy_constant(dimension, alpha);
    let rep = check_ckn_radial(&params, &refs, &ProfileQuadrature::default(), Some(c), slack);
    let quotients: Vec<f64> = rep.entries.iter().map(|e| e.quotient).collect();
    Ok(NearOptimizers {
        increasing: quotients.windows(2).all(|w| w[1] > w[0]),
        bounded: quotients.iter().all(|&q| q <= c * (1.0 + slack)),
        epsilons,
        quotients,
        constant: c,
    })
}

/// `check`: Hardy on random vectors and profiles, Sobolev and CKN quotients.
pub fn cmd_check(cfg: &RunConfig) -> Result<Outcome> {
    let dir = &cfg.output_dir;
    let pair = cfg.problem.assemble()?;
    let (n, alpha) = (cfg.problem.dimension, cfg.problem.alpha);
    let radius = pair.truncation_radius();
    let slack = cfg.check.slack;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut random = Vec::new();
    for _ in 0..cfg.check.random_vectors {
        let u: Vec<f64> = (0..pair.order()).map(|_| rng.random_range(-1.0..1.0)).collect();
        random.push(check_hardy(&pair, &u, slack)?);
    }
    let hardy_random = InequalityReport::merge("hardy-random", random);

    let profiles = cfg
        .check
        .profiles
        .iter()
        .map(|p| p.build(n, alpha, radius))
        .collect::<Result<Vec<_>>>()?;
    let mut hardy_profiles = Vec::new();
    let mut sobolev_profiles = Vec::new();
    let mut reductions = Vec::new();
    for p in &profiles {
        let u = pair.interpolate(|r| p.value(r));
        let mut h = check_hardy(&pair, &u, slack)?;
        h.entries[0].name = p.name();
        hardy_profiles.push(h);
        let mut s = check_sobolev(&pair, &u)?;
        for e in &mut s.entries {
            e.name = format!("{} {}", p.name(), e.name);
        }
        sobolev_profiles.push(s);
        if matches!(pair.geometry, Geometry::Radial(_)) {
            reductions.push(json!({ "profile": p.name(), "gaps": reduction_gaps(&pair, &u)? }));
        }
    }
    let hardy_profiles = InequalityReport::merge("hardy-profiles", hardy_profiles);
    let sobolev = InequalityReport::merge("sobolev", sobolev_profiles);

    let refs: Vec<&dyn RadialProfile> = profiles.iter().map(|p| p.as_ref()).collect();
    let quad = ProfileQuadrature::default();
    let ckn_hardy = check_ckn_radial(
        &CknParams::hardy(n, alpha)?,
        &refs,
        &quad,
        Some(hardy_constant(n, alpha)),
        slack,
    );
    let ckn_sobolev = check_ckn_radial(&CknParams::sobolev(n, alpha)?, &refs, &quad, None, 0.0);
    let ckn_classical = check_ckn_radial(&CknParams::new(n, 2.0, 0.0, 0.0)?, &refs, &quad, None, 0.0);
    let near = near_optimizers(n, alpha, slack)?;

    let mut claims = vec![
        claim_bool(
            "hardy holds on random vectors",
            hardy_random.verdict == CheckVerdict::Pass,
        ),
        claim_bool("hardy holds on profiles", hardy_profiles.verdict == CheckVerdict::Pass),
        claim_bool(
            "ckn hardy instance holds on profiles",
            ckn_hardy.verdict == CheckVerdict::Pass,
        ),
        claim_le(
            "sobolev dilation spread (max over profiles)",
            max_spread(&sobolev, profiles.len()),
            2e-2,
        ),
        claim_bool("near-optimizer quotients increase", near.increasing),
        claim_bool("near-optimizer quotients bounded by the constant", near.bounded),
    ];
    if !reductions.is_empty() {
        let worst = reductions
            .iter()
            .flat_map(|r| [r["gaps"]["hardy"].as_f64(), r["gaps"]["sobolev"].as_f64()])
            .map(|v| v.unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max);
        claims.push(claim_le("ckn reductions reproduce matrix quotients", worst, 1e-8));
    }
    let all_pass = claims.iter().all(|c| c.pass);
    let report = json!({
        "command": "check",
        "problem": cfg.problem,
        "seed": cfg.seed,
        "hardy_constant": hardy_constant(n, alpha),
        "claims": claims,
        "all_claims_pass": all_pass,
        "hardy_random": hardy_random,
        "hardy_profiles": hardy_profiles,
        "sobolev": sobolev,
        "ckn_hardy": ckn_hardy,
        "ckn_sobolev": ckn_sobolev,
        "ckn_classical": ckn_classical,
        "near_optimizers": near,
        "reductions": reductions,
    });
    write_json(&dir.join("inequalities.json"), &report)?;
    let summary = claims
        .iter()
        .map(|c| format!("{} {}\n", if c.pass { "ok  " } else { "FAIL" }, c.name))
        .collect();
    Ok(Outcome {
        exit_code: if all_pass { 0 } else { 2 },
        summary,
    })
}

// largest relative spread over consecutive groups of dilations
fn max_spread(sobolev: &InequalityReport, groups: usize) -> f64 {
    if groups == 0 {
        return 0.0;
    }
    let per = sobolev.entries.len() / groups;
    sobolev
        .entries
        .chunks(per.max(1))
        .map(|c| {
            let q: Vec<f64> = c.iter().map(|e| e.quotient).collect();
            let max = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let min = q.iter().copied().fold(f64::INFINITY, f64::min);
            (max - min) / q[q.len() / 2]
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Serialize)]
pub struct GoldenFile {
    pub dimension: usize,
    pub alpha: f64,
    pub weight: WeightSpec,
    pub radius: f64,
    /// Set for sign-changing weights or when some mode could not be bracketed.
    pub partial: bool,
    pub modes: Vec<ShootingResult>,
    pub failures: Vec<String>,
}

pub fn golden(cfg: &RunConfig) -> Result<GoldenFile> {
    let problem = RadialProblem {
        dimension: cfg.problem.dimension,
        alpha: cfg.problem.alpha,
        weight: &cfg.problem.weight,
        radius: cfg.problem.geometry.radius(),
    };
    let settings = ShootSettings {
        rtol: cfg.oracle.rtol,
        ..ShootSettings::default()
    };
    let mut modes = Vec::new();
    let mut failures = Vec::new();
    for n in 1..=cfg.oracle.modes {
        match oracle_eigen(&problem, n, &settings) {
            Ok(r) => modes.push(r),
            Err(e @ Error::NoBracket { .. }) if n > 1 => {
                failures.push(e.to_string());
                break;
            }
            Err(e) => return Err(e),
        }
    }
    let sign_changing = matches!(cfg.problem.weight, WeightSpec::SignChangingRing { .. })
        || matches!(&cfg.problem.weight, WeightSpec::Tabulated(t) if t.values.iter().any(|&v| v < 0.0));
    Ok(GoldenFile {
        dimension: problem.dimension,
        alpha: problem.alpha,
        weight: cfg.problem.weight.clone(),
        radius: problem.radius,
        partial: sign_changing || !failures.is_empty() || modes.iter().any(|m| !m.certified),
        modes,
        failures,
    })
}

/// `oracle`: golden eigenvalues from the shooting solver.
pub fn cmd_oracle(cfg: &RunConfig) -> Result<Outcome> {
    let g = golden(cfg)?;
    write_json(&cfg.output_dir.join(&cfg.oracle.golden), &g)?;
    let mut summary = String::new();
    for m in &g.modes {
        summary += &format!("lambda_{} = {:.16e}  certified {}\n", m.n, m.lambda, m.certified);
    }
    Ok(Outcome { exit_code: 0, summary })
}

fn split_summary(spec: &WeightSpec) -> &'static str {
    match spec {
        WeightSpec::GaussianBump { .. } | WeightSpec::CompactBump { .. } | WeightSpec::IndicatorBall { .. } => {
            "g1 = g, g2 = 0, g- = 0"
        }
        WeightSpec::SignChangingRing { .. } => "g1 = 0, g2 = positive shell, g- = negative shell",
        WeightSpec::RemarkH | WeightSpec::CriticalPower => "g1 = 0, g2 = g, g- = 0",
        WeightSpec::Tabulated(_) => "g1 = max(g, 0), g2 = 0, g- = max(-g, 0)",
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CatalogueRow {
    pub weight: String,
    pub split: String,
    pub summary: String,
    pub report: GReport,
}

pub fn catalogue_rows(dimension: usize, alpha: f64) -> Result<Vec<CatalogueRow>> {
    let sampling = GSampling::decades(dimension, -6, 6);
    let exponent = "L^{N/(2-alpha)}";
    catalogue()
        .into_iter()
        .map(|spec| {
            let report = verify_condition_g(&spec, dimension, alpha, &sampling)?;
            let summary = format!(
                "decay: {}, {exponent} (g2): {}, g1 in {exponent}: {}, (G): {}",
                verdict_word(report.decay_verdict),
                integrability_word(report.g2_norm.verdict),
                integrability_word(report.g1_norm.verdict),
                verdict_word(report.verdict),
            );
            Ok(CatalogueRow {
                weight: spec.name().to_string(),
                split: split_summary(&spec).to_string(),
                summary,
                report,
            })
        })
        .collect()
}

fn verdict_word(v: crate::weights::Verdict) -> &'static str {
    match v {
        crate::weights::Verdict::Pass => "pass",
        crate::weights::Verdict::Fail => "fail",
        crate::weights::Verdict::Unverifiable => "unverifiable",
    }
}

fn integrability_word(v: crate::weights::Integrability) -> &'static str {
    match v {
        crate::weights::Integrability::Finite => "finite",
        crate::weights::Integrability::Diverges => "diverges",
        crate::weights::Integrability::Unverifiable => "unverifiable",
    }
}

/// `catalogue`: every builtin weight with its (G) verdict, plus preset names.
pub fn cmd_catalogue(cfg: Option<&RunConfig>, out: Option<&Path>) -> Result<Outcome> {
    let (dimension, alpha) = cfg.map_or((3, 1.0), |c| (c.problem.dimension, c.problem.alpha));
    let rows = catalogue_rows(dimension, alpha)?;
    let mut summary = format!("weights (N = {dimension}, alpha = {alpha}):\n");
    for r in &rows {
        summary += &format!("  {:<20} {:<50} {}\n", r.weight, r.split, r.summary);
    }
    summary += "presets:\n";
    for name in crate::config::preset_names() {
        summary += &format!("  {name}\n");
    }
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        write_json(
            &dir.join("catalogue.json"),
            &json!({ "dimension": dimension, "alpha": alpha, "weights": rows, "presets": crate::config::preset_names() }),
        )?;
    }
    Ok(Outcome { exit_code: 0, summary })
}
