mod args;
mod layered;
mod points;

use std::fmt::Write as _;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, ensure, Context, Result};
use clap::Parser;
use knnlab::experiments::{
    run_cover_hart, run_error_curve, run_hub_growth, run_preiss_inconsistency, run_stone_sweep, summarize, write_csv,
    CsvRecord, ExperimentConfig, StoneSweepConfig,
};
use knnlab::nagata_geometry::{hl_count_check, nagata_violation_witness_with_cap, BallSpec};
use serde::Deserialize;
use toml::{Table, Value};

use args::{Cli, Command, CurveArgs, HlArgs, HubArgs, PreissArgs, StoneArgs, StoneKind, WitnessArgs};
use layered::{int, k_rule, table_value, Layered};

/// A run either completes its check or finds a violation.
enum Outcome {
    Pass,
    CheckFailed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::CheckFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    let v = cli.verbose;
    match &cli.command {
        Command::Consistency(a) => consistency(a, v),
        Command::Preiss(a) => preiss(a, v),
        Command::Hub(a) => hub(a, v),
        Command::Stone(a) => stone(a, v),
        Command::DimWitness(a) => dim_witness(a),
        Command::HlCheck(a) => hl_check(a),
        Command::CoverHart(a) => cover_hart(a, v),
    }
}

fn emit<R: CsvRecord>(rows: &[R], out: &Path, verbose: u8) -> Result<()> {
    write_csv(rows, out)?;
    if verbose > 0 {
        eprintln!("wrote {} rows to {}", rows.len(), out.display());
    }
    Ok(())
}

fn space_table(toml_text: &str) -> Value {
    Value::Table(toml::from_str(toml_text).expect("built-in space table"))
}

fn curve_config(a: &CurveArgs, defaults: Table) -> Result<ExperimentConfig> {
    let mut l = Layered::new(defaults).file(a.run.config.as_deref())?;
    l.set_list("n_schedule", &a.n)?;
    if let Some(r) = &a.k_rule {
        l.set("k_rule", k_rule(r)?);
    }
    l.set_opt("trials", a.trials.map(int).transpose()?);
    l.set_opt("test_size", a.test_size.map(int).transpose()?);
    l.set_opt("policy", a.policy.map(|p| p.key()));
    l.require_seed(a.run.seed)?;
    l.build()
}

fn curve_defaults() -> Table {
    let mut t = Table::new();
    t.insert(
        "space".into(),
        space_table("family = \"euclidean\"\ndim = 1\nmixture = { class0 = [0.0, 1.0], class1 = [0.9, 1.9], prior1 = 0.5 }"),
    );
    t.insert(
        "n_schedule".into(),
        Value::Array([100, 1000, 10_000].into_iter().map(Value::Integer).collect()),
    );
    t
}

fn report_curve(rows: &[knnlab::experiments::ErrorCurveRow], verbose: u8) {
    if verbose == 0 {
        return;
    }
    for s in summarize(rows) {
        eprintln!(
            "n = {} k = {}: mean error {:.4} (s.e. {:.4}, median {:.4}), bayes {:.4}, mean {} {:.4}",
            s.n,
            s.k,
            s.mean_error,
            s.std_error,
            s.median_error,
            s.bayes_error,
            rows[0].aux_name,
            s.mean_aux
        );
    }
}

fn consistency(a: &CurveArgs, verbose: u8) -> Result<Outcome> {
    let cfg = curve_config(a, curve_defaults())?;
    let rows = run_error_curve(&cfg)?;
    report_curve(&rows, verbose);
    emit(&rows, &a.run.out, verbose)?;
    Ok(Outcome::Pass)
}

fn cover_hart(a: &CurveArgs, verbose: u8) -> Result<Outcome> {
    let mut defaults = curve_defaults();
    defaults.insert("space".into(), space_table("family = \"euclidean\"\ndim = 1"));
    defaults.insert("test_size".into(), Value::Integer(100));
    let cfg = curve_config(a, defaults)?;
    let rows = run_cover_hart(&cfg)?;
    if verbose > 0 {
        for r in &rows {
            eprintln!("n = {} k = {}: max radius {:.6}", r.n, r.k, r.max_radius);
        }
    }
    emit(&rows, &a.run.out, verbose)?;
    Ok(Outcome::Pass)
}

fn preiss(a: &PreissArgs, verbose: u8) -> Result<Outcome> {
    let mut defaults = Table::new();
    defaults.insert("space".into(), space_table("family = \"preiss\"\nlevels = 12"));
    defaults.insert("n_schedule".into(), Value::Array(vec![Value::Integer(4096)]));
    defaults.insert("k_rule".into(), table_value("fixed", Value::Integer(64)));
    defaults.insert("test_size".into(), Value::Integer(200));
    let mut l = Layered::new(defaults).file(a.run.config.as_deref())?;
    if let Some(levels) = a.levels {
        let mut space = Table::new();
        space.insert("family".into(), "preiss".into());
        space.insert("levels".into(), int(levels)?);
        l.set("space", Value::Table(space));
    }
    l.set_list("n_schedule", &a.n)?;
    l.set_opt("k_rule", a.k.map(|k| int(k).map(|v| table_value("fixed", v))).transpose()?);
    l.set_opt("trials", a.trials.map(int).transpose()?);
    l.set_opt("test_size", a.test_size.map(int).transpose()?);
    l.set_opt("policy", a.policy.map(|p| p.key()));
    l.require_seed(a.run.seed)?;
    let cfg: ExperimentConfig = l.build()?;
    let rows = run_preiss_inconsistency(&cfg)?;
    report_curve(&rows, verbose);
    emit(&rows, &a.run.out, verbose)?;
    Ok(Outcome::Pass)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HubConfig {
    n: usize,
    trials: usize,
    seed: u64,
}

fn hub(a: &HubArgs, verbose: u8) -> Result<Outcome> {
    let mut defaults = Table::new();
    defaults.insert("n".into(), Value::Integer(100));
    defaults.insert("trials".into(), Value::Integer(2000));
    let mut l = Layered::new(defaults).file(a.run.config.as_deref())?;
    l.set_opt("n", a.n.map(int).transpose()?);
    l.set_opt("trials", a.trials.map(int).transpose()?);
    l.require_seed(a.run.seed)?;
    let cfg: HubConfig = l.build()?;
    let rows = run_hub_growth(cfg.n, cfg.trials, cfg.seed)?;
    if verbose > 0 {
        let last = rows.last().expect("n >= 2 gives rows");
        eprintln!("n = {}: mean hub count {:.4} (s.e. {:.4})", last.n, last.mean_hub_count, last.stderr);
    }
    emit(&rows, &a.run.out, verbose)?;
    Ok(Outcome::Pass)
}

fn stone(a: &StoneArgs, verbose: u8) -> Result<Outcome> {
    let mut defaults = Table::new();
    defaults.insert("family".into(), stone_family(StoneKind::Line));
    defaults.insert("n".into(), Value::Integer(200));
    defaults.insert("k_list".into(), Value::Array([1, 5, 25].into_iter().map(Value::Integer).collect()));
    let mut l = Layered::new(defaults).file(a.run.config.as_deref())?;
    l.set_opt("family", a.family.map(stone_family));
    l.set_opt("n", a.n.map(int).transpose()?);
    l.set_list("k_list", &a.k)?;
    l.set_opt("trials", a.trials.map(int).transpose()?);
    l.set_opt("policy", a.policy.map(|p| p.key()));
    l.set_opt("placement", a.placement.map(|p| p.key()));
    l.require_seed(a.run.seed)?;
    let cfg: StoneSweepConfig = l.build()?;
    let rows = run_stone_sweep(&cfg)?;
    if verbose > 0 {
        for r in &rows {
            eprintln!("k = {}: max count {}, mean count {:.4}", r.k, r.max_count, r.mean_count);
        }
    }
    emit(&rows, &a.run.out, verbose)?;
    Ok(Outcome::Pass)
}

fn stone_family(kind: StoneKind) -> Value {
    match kind {
        StoneKind::Line => space_table("kind = \"sampled\"\nspace = { family = \"euclidean\", dim = 1 }"),
        StoneKind::Simplex => space_table("kind = \"simplex\""),
    }
}

fn write_report(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn scale_of(scale: Option<f64>) -> Result<f64> {
    let s = scale.unwrap_or(f64::INFINITY);
    ensure!(s > 0.0, "scale must be positive");
    Ok(s)
}

fn dim_witness(a: &WitnessArgs) -> Result<Outcome> {
    let loaded = points::load(&a.points)?;
    let scale = scale_of(a.scale)?;
    let found = nagata_violation_witness_with_cap(&loaded.points, &loaded.space, a.delta, scale, a.cap)?;
    let mut text = String::new();
    let outcome = match &found {
        None => {
            writeln!(text, "no witness")?;
            Outcome::Pass
        }
        Some(w) => {
            write!(text, "{w}")?;
            Outcome::CheckFailed
        }
    };
    writeln!(text, "delta: {}", a.delta)?;
    writeln!(text, "scale: {scale:?}")?;
    writeln!(text, "points searched: {}", loaded.points.len())?;
    write_report(&text, a.out.as_deref())?;
    Ok(outcome)
}

fn hl_check(a: &HlArgs) -> Result<Outcome> {
    let loaded = points::load(&a.points)?;
    let scale = scale_of(a.scale)?;
    let n = loaded.points.len();
    let Some(subset) = &loaded.file.subset else {
        bail!("point file needs a `subset` mask");
    };
    let Some(radii) = &loaded.file.radii else {
        bail!("point file needs `radii`, one per point");
    };
    ensure!(radii.len() == n, "{} radii for {n} points", radii.len());
    let balls: Vec<BallSpec> = radii
        .iter()
        .enumerate()
        .map(|(i, &radius)| BallSpec {
            center: i,
            radius,
            boundary: loaded.file.boundary,
        })
        .collect();
    let mut text = String::new();
    if a.certify {
        if let Some(w) = nagata_violation_witness_with_cap(&loaded.points, &loaded.space, a.delta, scale, a.cap)? {
            writeln!(text, "delta certificate fails")?;
            write!(text, "{w}")?;
            write_report(&text, a.out.as_deref())?;
            return Ok(Outcome::CheckFailed);
        }
        writeln!(text, "delta certified: no witness")?;
    }
    let chk = hl_count_check(&loaded.points, &loaded.space, subset, &balls, a.alpha, a.delta, scale)?;
    writeln!(text, "count: {}", chk.count)?;
    writeln!(text, "bound: {:?}", chk.bound)?;
    writeln!(text, "ok: {}", chk.ok)?;
    write_report(&text, a.out.as_deref())?;
    Ok(if chk.ok { Outcome::Pass } else { Outcome::CheckFailed })
}
