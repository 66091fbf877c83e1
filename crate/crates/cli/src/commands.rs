use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::Parser;
use expanderlab::certified::DEFAULT_PRECISION_CAP;
use expanderlab::energy::{energy_with_cap, histogram, HistogramKind};
use expanderlab::field::parse_rational;
use expanderlab::search::{exponent_table, run, SearchConfig, SearchMode};
use expanderlab::verify::{
    check, default_epsilon, finite_field_pipeline, real_pipeline_with_cap, CheckInputs, PipelineTrace, RelationKey,
};
use expanderlab::{Error, FSet, FieldCtx, Verdict};
use num_rational::BigRational;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::manifest::{set_recorded_args, FileDigest, RunManifest, Sink};
use crate::{exit, Cli, Command, EnergyArgs, PipelineArgs, ReplayArgs, SearchArgs, VerifyArgs, PRECISION_CAP_ENV};

pub fn dispatch(command: Command) -> u8 {
    let result = match command {
        Command::Verify(a) => verify(a),
        Command::Pipeline(a) => pipeline(a),
        Command::Search(a) => search(a),
        Command::Energy(a) => energy(a),
        Command::Replay(a) => replay(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        code_for(&e)
    })
}

fn code_for(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(err) => code_for_core(err),
        None => exit::USAGE,
    }
}

fn code_for_core(e: &Error) -> u8 {
    match e {
        Error::BudgetExceeded { .. } => exit::BUDGET,
        Error::PrecisionCapExceeded { .. } => exit::INCONCLUSIVE,
        _ => exit::USAGE,
    }
}

fn verdict_code(v: Option<Verdict>) -> u8 {
    match v {
        Some(Verdict::Fails) => exit::FAILS,
        Some(Verdict::Inconclusive) => exit::INCONCLUSIVE,
        _ => exit::OK,
    }
}

/// The variant name of a core error, for machine-readable output.
fn error_kind(e: &Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or_default().to_string()
}

/// Flag, then environment, then the built-in default.
fn precision_cap(flag: Option<u32>) -> Result<u32> {
    if let Some(cap) = flag {
        return Ok(cap);
    }
    match std::env::var(PRECISION_CAP_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| anyhow!(Error::Malformed(format!("{PRECISION_CAP_ENV}={v:?}")))),
        Err(_) => Ok(DEFAULT_PRECISION_CAP),
    }
}

fn parse_epsilon(s: Option<&String>) -> Result<Option<BigRational>> {
    s.map(|s| parse_rational(s).map_err(anyhow::Error::from)).transpose()
}

fn parse_range(s: &str) -> Result<(i64, i64)> {
    let bad = || anyhow!(Error::Malformed(format!("range {s:?}, expected LO:HI")));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let (lo, hi) = (lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?);
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

/// A set file holds one set or an array of sets.
fn load_instance(path: &Path) -> Result<Vec<FSet>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))?;
    match &v {
        Value::Array(items) if items.is_empty() => Err(Error::Malformed(format!("{}: no sets", path.display())).into()),
        Value::Array(items) => Ok(items.iter().map(FSet::from_json_value).collect::<Result<_, _>>()?),
        _ => Ok(vec![FSet::from_json_value(&v)?]),
    }
}

fn field_ctx(p: Option<u64>, range: Option<&String>) -> Result<(FieldCtx, Option<(i64, i64)>)> {
    match (p, range) {
        (Some(p), None) => Ok((FieldCtx::prime(p)?, None)),
        (None, Some(r)) => Ok((FieldCtx::rational(), Some(parse_range(r)?))),
        _ => bail!(Error::InvalidArgument("give exactly one of --p and --rational-range".into())),
    }
}

/// Seeded triples `(A, B, C)` avoiding `0, ±1`, so every relation applies.
fn random_instances(
    count: usize,
    seed: u64,
    ctx: &FieldCtx,
    range: Option<(i64, i64)>,
    max: usize,
) -> Result<Vec<Vec<FSet>>> {
    let universe: Vec<i64> = match range {
        Some((lo, hi)) => (lo..=hi).collect(),
        None => {
            (0..ctx.modulus_u64().ok_or_else(|| Error::InvalidArgument("modulus too large".into()))? as i64).collect()
        }
    };
    let universe: Vec<_> =
        universe.into_iter().map(|v| ctx.from_i64(v)).filter(|e| !ctx.is_zero(e) && !ctx.is_minus_one(e)).collect();
    let universe: Vec<_> = universe.into_iter().filter(|e| *e != ctx.one()).collect();
    if universe.is_empty() || max == 0 {
        bail!(Error::InvalidArgument("no admissible elements for random instances".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let top = max.min(universe.len());
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut sets = Vec::with_capacity(3);
        for _ in 0..3 {
            let k = rng.gen_range(1..=top);
            let idx = sample(&mut rng, universe.len(), k);
            sets.push(FSet::new(ctx.clone(), idx.iter().map(|i| universe[i].clone()))?);
        }
        out.push(sets);
    }
    Ok(out)
}

fn verify(a: VerifyArgs) -> Result<u8> {
    let keys: Vec<RelationKey> = if a.all {
        RelationKey::ALL.to_vec()
    } else if a.relations.is_empty() {
        bail!(Error::InvalidArgument("give --relation KEY or --all".into()));
    } else {
        a.relations.iter().map(|k| k.parse()).collect::<Result<_, Error>>()?
    };
    let cap = precision_cap(a.precision_cap)?;
    let epsilon = parse_epsilon(a.epsilon.as_ref())?;

    let mut instances: Vec<(String, Vec<FSet>)> = Vec::new();
    for f in &a.files {
        instances.push((f.display().to_string(), load_instance(f)?));
    }
    if let Some(count) = a.random {
        let (ctx, range) = field_ctx(a.p, a.rational_range.as_ref())?;
        for (i, sets) in random_instances(count, a.seed, &ctx, range, a.max_size)?.into_iter().enumerate() {
            instances.push((format!("random#{i}"), sets));
        }
    }
    if instances.is_empty() {
        bail!(Error::InvalidArgument("no instances: give set files or --random".into()));
    }

    let mut lines = Vec::new();
    let mut worst = None;
    let mut error_code = None;
    let mut aborted = false;
    'outer: for (label, sets) in &instances {
        let mut inputs = CheckInputs::new(sets.clone()).with_precision_cap(cap);
        inputs.t = a.t;
        inputs.epsilon = epsilon.clone();
        for &key in &keys {
            match check(key, &inputs) {
                Ok(report) => {
                    let mut v = report.to_json();
                    v["instance"] = json!(label);
                    lines.push(v);
                    worst = worst.max(Some(report.verdict));
                    if report.fails() {
                        aborted = true;
                        break 'outer;
                    }
                }
                Err(e) => {
                    let code = code_for_core(&e);
                    error_code = error_code.max(Some(code));
                    eprintln!("{label}: {key}: {e}");
                    lines.push(json!({"instance": label, "name": key.as_str(), "error": error_kind(&e), "message": e.to_string()}));
                }
            }
        }
    }
    let text: String = lines.iter().map(|v| serde_json::to_string(v).expect("json") + "\n").collect();
    let config = json!({
        "relations": keys.iter().map(|k| k.as_str()).collect::<Vec<_>>(),
        "epsilon": a.epsilon, "t": a.t, "precision_cap": cap,
        "random": a.random, "seed": a.seed, "p": a.p, "rational_range": a.rational_range, "max_size": a.max_size,
    });
    Sink { out: a.out.clone() }.emit(&text, "verify", &a.files, config)?;
    let holds = lines.iter().filter(|v| v["verdict"] == "Holds").count();
    eprintln!(
        "{} reports over {} instances, {holds} hold{}",
        lines.len(),
        instances.len(),
        if aborted { ", aborted at first failure" } else { "" }
    );
    Ok(match (worst, error_code) {
        (Some(Verdict::Fails), _) => exit::FAILS,
        (_, Some(code)) => code,
        (w, None) => verdict_code(w),
    })
}

fn pipeline(a: PipelineArgs) -> Result<u8> {
    let sets = load_instance(&a.file)?;
    let [set] = sets.as_slice() else {
        bail!(Error::Malformed(format!("{}: pipeline takes exactly one set", a.file.display())));
    };
    let cap = precision_cap(a.precision_cap)?;
    let trace: PipelineTrace = match a.mode.as_str() {
        "fp" => {
            let eps = parse_epsilon(a.epsilon.as_ref())?.unwrap_or_else(default_epsilon);
            finite_field_pipeline(set, &eps)?
        }
        "real" => real_pipeline_with_cap(set, cap)?,
        other => bail!(Error::InvalidArgument(format!("unknown pipeline mode {other:?}, expected fp or real"))),
    };
    let text = trace.to_json_string() + "\n";
    let config = json!({"mode": a.mode, "epsilon": a.epsilon, "precision_cap": cap});
    Sink { out: a.out.clone() }.emit(&text, "pipeline", std::slice::from_ref(&a.file), config)?;
    eprintln!("{} steps, worst verdict {}", trace.steps.len(), trace.worst().map_or("none".into(), |v| v.to_string()));
    Ok(verdict_code(trace.worst()))
}

fn search(a: SearchArgs) -> Result<u8> {
    let (ctx, range) = field_ctx(a.p, a.rational_range.as_ref())?;
    let mode: SearchMode = a.mode.parse()?;
    let mut records = Vec::new();
    for &n in &a.n {
        let mut cfg = SearchConfig::new(ctx.clone(), n, mode).with_seed(a.seed);
        cfg.rational_range = range;
        cfg.budget = a.budget;
        cfg.iteration_cap = a.iterations;
        cfg.restarts = a.restarts;
        cfg.admit_degenerate = a.admit_degenerate;
        cfg.density_guard = !a.no_density_guard;
        let record = run(&cfg)?;
        if !record.recheck()? {
            bail!(Error::WitnessFailure(format!("witness for n = {n} does not re-evaluate")));
        }
        records.push(record);
    }
    let text = match a.format.as_str() {
        "csv" => exponent_table(&records)?,
        "json" => serde_json::to_string_pretty(&records)? + "\n",
        other => bail!(Error::InvalidArgument(format!("unknown format {other:?}, expected csv or json"))),
    };
    let config = json!({
        "p": a.p, "rational_range": a.rational_range, "n": a.n, "mode": mode, "seed": a.seed, "budget": a.budget,
        "iterations": a.iterations, "restarts": a.restarts, "admit_degenerate": a.admit_degenerate,
        "density_guard": !a.no_density_guard, "generator": "ChaCha8, stream = restart index",
    });
    Sink { out: a.out.clone() }.emit(&text, "search", &[], config)?;
    Ok(exit::OK)
}

fn energy(a: EnergyArgs) -> Result<u8> {
    let left = load_instance(&a.a)?.remove(0);
    let right = match &a.b {
        Some(p) => load_instance(p)?.remove(0),
        None => left.clone(),
    };
    let kind = match a.kind.as_str() {
        "product" => HistogramKind::Product,
        "ratio" => HistogramKind::Ratio,
        "additive-shift" | "additive_shift" => HistogramKind::AdditiveShift,
        other => bail!(Error::InvalidArgument(format!("unknown histogram kind {other:?}"))),
    };
    let cap = precision_cap(a.precision_cap)?;
    let hist = histogram(&left, &right, kind)?;
    let energies =
        a.alpha.iter().map(|s| Ok(energy_with_cap(&hist, &parse_rational(s)?, cap)?)).collect::<Result<Vec<_>>>()?;
    let out = json!({"a": left, "b": right, "histogram": hist, "energies": energies});
    let text = serde_json::to_string_pretty(&out)? + "\n";
    let mut inputs = vec![a.a.clone()];
    inputs.extend(a.b.clone());
    let config = json!({"kind": a.kind, "alpha": a.alpha, "precision_cap": cap});
    Sink { out: a.out.clone() }.emit(&text, "energy", &inputs, config)?;
    Ok(exit::OK)
}

fn replay(a: ReplayArgs) -> Result<u8> {
    let manifest = RunManifest::load(&a.manifest)?;
    for input in &manifest.inputs {
        let now = FileDigest::of(Path::new(&input.path))?;
        if now.sha256 != input.sha256 {
            bail!(Error::Malformed(format!("input {} changed since the recorded run", input.path)));
        }
    }
    let argv = std::iter::once("expanderlab".to_string()).chain(manifest.args.iter().cloned());
    let cli = Cli::try_parse_from(argv).map_err(|e| Error::Malformed(format!("recorded arguments: {e}")))?;
    if matches!(cli.command, Command::Replay(_)) {
        bail!(Error::Malformed("a manifest cannot record a replay".into()));
    }
    if let Some(cap) = manifest.config.get("precision_cap").and_then(Value::as_u64) {
        std::env::set_var(PRECISION_CAP_ENV, cap.to_string());
    }
    set_recorded_args(&manifest.args);
    let code = dispatch(cli.command);
    let mut identical = true;
    for out in &manifest.outputs {
        let now = FileDigest::of(&PathBuf::from(&out.path))?;
        let same = now.sha256 == out.sha256;
        identical &= same;
        eprintln!("{}: {}", out.path, if same { "identical" } else { "DIFFERS" });
    }
    Ok(if identical { code } else { exit::FAILS })
}
