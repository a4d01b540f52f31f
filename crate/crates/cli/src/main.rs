//! `breaklab` batch front-end.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use breaklab::conjugacy::{singularity_profile, ConjugatePair, MeasureCase};
use breaklab::partition::{build_d, build_p, refine_check, DynamicalPartition};
use breaklab::rotation::{closest_return_times, tune_to_rotation, TunedMap};
use breaklab::verify::{
    comparability_report, decay_report, verify_denjoy, verify_finzi, verify_oscillation, Report,
    Sampling,
};
use breaklab::{Constants, PrecisionContext};

use config::{parse_levels, ExperimentConfig};
use output::Output;

#[derive(Parser)]
#[command(
    name = "breaklab",
    version,
    about = "Experiments on circle maps with breaks"
)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Mantissa bits; only 53 is supported.
    #[arg(long, global = true)]
    precision: Option<u32>,
    /// Inclusive level range, e.g. `8..14`.
    #[arg(long, global = true, value_parser = parse_levels)]
    levels: Option<[usize; 2]>,
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Clone, Copy, Debug)]
enum Verb {
    /// Tune each map and report achieved depth and return times.
    Rotation,
    /// Write P_n and D_n and check their structure.
    Partition,
    /// Run the verifier suite over the level range.
    Verify,
    /// Build h for a pair and report residual, thresholds and jumps.
    Conjugacy,
    /// Deviation measures and slope profiles of h.
    Singularity,
    /// Regularity and derived constants of each map.
    Constants,
}

impl Verb {
    fn name(self) -> &'static str {
        match self {
            Verb::Rotation => "rotation",
            Verb::Partition => "partition",
            Verb::Verify => "verify",
            Verb::Conjugacy => "conjugacy",
            Verb::Singularity => "singularity",
            Verb::Constants => "constants",
        }
    }
}

/// Failed checks, reported after every artifact is written.
#[derive(Default)]
struct Failures(Vec<String>);

impl Failures {
    fn record(&mut self, map: usize, r: &Report) {
        if !r.pass {
            let note = r
                .note
                .as_deref()
                .map(|n| format!(": {n}"))
                .unwrap_or_default();
            self.0
                .push(format!("{} (map {map}, level {}){note}", r.check, r.level));
        }
    }

    fn named(&mut self, map: usize, check: &str, level: usize, pass: bool) {
        if !pass {
            self.0.push(format!("{check} (map {map}, level {level})"));
        }
    }
}

fn tune_all(cfg: &ExperimentConfig) -> Result<Vec<TunedMap>> {
    let target = cfg.target_cf()?;
    cfg.map_specs()
        .iter()
        .enumerate()
        .map(|(i, spec)| {
            let base = spec.build().with_context(|| format!("map {i}"))?;
            tune_to_rotation(&base, &target, cfg.target.depth)
                .with_context(|| format!("tuning map {i}"))
        })
        .collect()
}

fn constants_of(tm: &TunedMap) -> Result<Constants> {
    let reg = tm.map.regularity(2.0)?;
    Ok(Constants::for_map(&reg, tm.cf.bounded_type().q_max))
}

fn pair_of(cfg: &ExperimentConfig) -> Result<ConjugatePair> {
    if cfg.maps.len() != 2 {
        bail!(
            "this verb needs exactly two maps, config has {}",
            cfg.maps.len()
        );
    }
    let tuned = tune_all(cfg)?;
    let table = tuned[0].table();
    let depth = tuned
        .iter()
        .map(|t| t.achieved_depth)
        .min()
        .unwrap_or(0)
        .min(cfg.target.depth);
    Ok(ConjugatePair::new(
        tuned[0].map.clone(),
        tuned[1].map.clone(),
        table,
        depth,
    )?)
}

fn cmd_rotation(cfg: &ExperimentConfig, out: &mut Output) -> Result<Failures> {
    let mut rows = vec![];
    for (i, tm) in tune_all(cfg)?.iter().enumerate() {
        let q = closest_return_times(&tm.map, tm.marked_point, cfg.target.depth)?;
        println!(
            "map {i}: t = {:.12}, rho = {:.12}, depth {} (requested {}), return times {:?}",
            tm.t,
            tm.rho(),
            tm.achieved_depth,
            tm.requested_depth,
            &q[..q.len().min(12)]
        );
        rows.push(json!({
            "map": i,
            "t": tm.t,
            "rho": tm.rho(),
            "requested_depth": tm.requested_depth,
            "achieved_depth": tm.achieved_depth,
            "return_times": q,
        }));
    }
    out.json("rotation.json", &rows)?;
    Ok(Failures::default())
}

fn cmd_partition(cfg: &ExperimentConfig, out: &mut Output) -> Result<Failures> {
    let mut fails = Failures::default();
    let mut rows = vec![];
    for (i, tm) in tune_all(cfg)?.iter().enumerate() {
        let t = tm.table();
        for n in cfg.levels() {
            let p = build_p(&tm.map, tm.marked_point, &t, n)?;
            let d = build_d(&tm.map, tm.marked_point, &t, n)?;
            let p1 = build_p(&tm.map, tm.marked_point, &t, n + 1)?;
            out.csv(&format!("partition_m{i}_P{n}.csv"), |path| {
                Ok(p.write_csv(path)?)
            })?;
            out.csv(&format!("partition_m{i}_D{n}.csv"), |path| {
                Ok(d.write_csv(path)?)
            })?;
            let (cp, cd) = (p.coverage(), d.coverage());
            let refine = refine_check(&p, &p1, &t)?;
            let contain = d.containment_in(&p);
            fails.named(i, "coverage", n, cp.pass && cd.pass);
            fails.named(i, "refine", n, refine.pass);
            fails.named(i, "containment", n, contain.pass);
            rows.push(json!({
                "map": i,
                "level": n,
                "p_atoms": p.len(),
                "d_atoms": d.len(),
                "coverage_p": cp,
                "coverage_d": cd,
                "refine": refine,
                "containment": contain,
            }));
        }
    }
    out.json("partition.json", &rows)?;
    Ok(fails)
}

fn cmd_verify(cfg: &ExperimentConfig, out: &mut Output) -> Result<Failures> {
    #[derive(Serialize)]
    struct Row {
        map: usize,
        #[serde(flatten)]
        report: Report,
    }
    let mut fails = Failures::default();
    let mut rows = vec![];
    let mut push = |fails: &mut Failures, map: usize, report: Report| {
        fails.record(map, &report);
        rows.push(Row { map, report });
    };
    for (i, tm) in tune_all(cfg)?.iter().enumerate() {
        let c = constants_of(tm)?;
        let t = tm.table();
        let s = Sampling::new(cfg.samples, cfg.seed.wrapping_add(i as u64));
        let inv = tm.map.inverse_map();
        for n in cfg.levels() {
            push(&mut fails, i, verify_denjoy(&tm.map, &t, n, c.v, &s)?);
            let mut r = verify_denjoy(&inv, &t, n, c.v, &s)?;
            r.check = "denjoy_inverse".into();
            push(&mut fails, i, r);
            push(&mut fails, i, verify_finzi(&tm.map, &t, n, c.v, &s)?);
            for &l in &cfg.oscillation_l {
                push(
                    &mut fails,
                    i,
                    verify_oscillation(&tm.map, &t, n, l, &c, &s)?,
                );
            }
            let p = build_p(&tm.map, tm.marked_point, &t, n)?;
            let d = build_d(&tm.map, tm.marked_point, &t, n)?;
            push(&mut fails, i, comparability_report(&p, &c));
            push(&mut fails, i, comparability_report(&d, &c));
            let p1 = build_p(&tm.map, tm.marked_point, &t, n + 1)?;
            let refine = refine_check(&p, &p1, &t)?;
            push(
                &mut fails,
                i,
                Report {
                    check: "refine".into(),
                    level: n,
                    bound: 1e-12,
                    observed_min: 0.0,
                    observed_max: refine.max_mismatch,
                    pass: refine.pass && refine.max_mismatch < 1e-12,
                    note: None,
                },
            );
            for part in [&p, &d] {
                push(&mut fails, i, coverage_report(part));
            }
        }
        let [a, b] = cfg.levels;
        let decay = decay_report(&tm.map, tm.marked_point, &t, a, b, &c, &s)?;
        push(&mut fails, i, decay.report());
    }
    if let Some(path) = &cfg.partition_fixture {
        let part = DynamicalPartition::read_csv(path)
            .with_context(|| format!("partition fixture {}", path.display()))?;
        push(&mut fails, 0, coverage_report(&part));
    }
    for r in &rows {
        let tag = if r.report.pass { "PASS" } else { "FAIL" };
        println!(
            "{tag} {:<16} map {} level {:>2}: observed [{:.4e}, {:.4e}] bound {:.4e}",
            r.report.check,
            r.map,
            r.report.level,
            r.report.observed_min,
            r.report.observed_max,
            r.report.bound
        );
    }
    out.json("verify.json", &rows)?;
    Ok(fails)
}

fn coverage_report(part: &DynamicalPartition) -> Report {
    let c = part.coverage();
    Report {
        check: "coverage".into(),
        level: part.level,
        bound: c.tolerance,
        observed_min: c.total_length,
        observed_max: c.max_endpoint_gap,
        pass: c.pass,
        note: (!c.pass).then(|| format!("{} atoms, total length {:.17}", c.atoms, c.total_length)),
    }
}

fn cmd_conjugacy(cfg: &ExperimentConfig, out: &mut Output) -> Result<Failures> {
    let pair = pair_of(cfg)?;
    let th = pair.thresholds()?;
    let residual = pair.residual(1 << 14);
    out.csv("h_knots.csv", |path| Ok(pair.h.write_csv(path)?))?;
    let mut jumps = vec![];
    for n in cfg.levels() {
        for jp in pair.jump_points(n, 0)? {
            jumps.push(
                json!({"n": n, "kind": jp.kind.to_string(), "k": jp.k, "x": jp.x, "jump": jp.jump}),
            );
        }
    }
    println!(
        "h: {} knots, mesh {:.3e}, residual {:.3e}; case {:?}, delta0 {:.6}, delta1 {:.6}",
        pair.h.len(),
        pair.h.mesh(),
        residual,
        th.case,
        th.delta0,
        th.delta1
    );
    out.json(
        "conjugacy.json",
        &json!({
            "knots": pair.h.len(),
            "mesh": pair.h.mesh(),
            "residual": residual,
            "thresholds": th,
            "jumps": jumps,
        }),
    )?;
    Ok(Failures::default())
}

fn cmd_singularity(cfg: &ExperimentConfig, out: &mut Output) -> Result<Failures> {
    let pair = pair_of(cfg)?;
    let th = pair.thresholds()?;
    if th.case == MeasureCase::Undetermined {
        println!("measure case undetermined: reporting both delta0 and delta1");
    }
    let mut deltas = cfg.deltas.clone();
    if deltas.is_empty() {
        deltas.push(th.delta0);
        if th.case == MeasureCase::Undetermined || th.delta1 != th.delta0 {
            deltas.push(th.delta1);
        }
    }
    let mut measures = csv::Writer::from_writer(vec![]);
    measures.write_record(["n", "delta", "measure", "unresolved", "partition_level"])?;
    let mut reports = vec![];
    for n in cfg.levels() {
        let cells = pair.cells(n, cfg.resolution)?;
        for (k, &delta) in deltas.iter().enumerate() {
            let r = cells.measure(delta);
            measures.serialize((n, delta, r.measure, r.unresolved, r.partition_level))?;
            out.csv(&format!("intervals_n{n}_d{k}.csv"), |path| {
                Ok(r.write_intervals_csv(path)?)
            })?;
            println!("n = {n:>2}, delta = {delta:.6}: measure {:.6}", r.measure);
            reports.push(json!({
                "n": r.n,
                "delta": r.delta,
                "measure": r.measure,
                "unresolved": r.unresolved,
                "resolution": r.resolution,
                "partition_level": r.partition_level,
                "intervals": r.intervals.len(),
            }));
        }
    }
    out.bytes("measures.csv", &measures.into_inner()?)?;
    let mut profile_csv = csv::Writer::from_writer(vec![]);
    profile_csv.write_record(["n", "eps", "m_of_eps", "min_slope", "max_slope"])?;
    let mut profiles = vec![];
    for n in cfg.levels() {
        let prof = singularity_profile(&pair.h, &pair.f1, &pair.table, n, &cfg.eps)?;
        for (e, m) in prof.eps.iter().zip(&prof.m_of_eps) {
            profile_csv.serialize((n, e, m, prof.min_slope, prof.max_slope))?;
        }
        profiles.push(prof);
    }
    out.bytes("profile.csv", &profile_csv.into_inner()?)?;
    out.json(
        "singularity.json",
        &json!({
            "thresholds": th,
            "case": match th.case {
                MeasureCase::Distinct => "distinct",
                MeasureCase::Undetermined => "undetermined",
            },
            "deltas": deltas,
            "measures": reports,
            "profiles": profiles,
        }),
    )?;
    Ok(Failures::default())
}

fn cmd_constants(cfg: &ExperimentConfig, out: &mut Output) -> Result<Failures> {
    let mut rows = vec![];
    for (i, tm) in tune_all(cfg)?.iter().enumerate() {
        let reg = tm.map.regularity(2.0)?;
        let c = constants_of(tm)?;
        println!(
            "map {i}: v = {:.6}, Q = {}, C2 = {:.4e}, C5 = {:.4e}, kappa = {:.4e}, lambda = {:.6}",
            c.v, c.q_bound, c.c2, c.c5, c.kappa, c.lambda
        );
        rows.push(json!({
            "map": i,
            "regularity": reg,
            "constants": c,
            "d_comparability": c.d_comparability(),
            "break_gap": c.break_gap(),
            "separation_l": c.separation_l(),
        }));
    }
    out.json("constants.json", &rows)?;
    Ok(Failures::default())
}

fn run(cli: Cli) -> Result<Failures> {
    let path = cli.config.context("--config PATH is required")?;
    let (mut cfg, raw) = ExperimentConfig::load(&path)?;
    if let Some(o) = cli.out {
        cfg.out = o;
    }
    if let Some(p) = cli.precision {
        cfg.precision = p;
    }
    if let Some(l) = cli.levels {
        cfg.levels = l;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    PrecisionContext::new(cfg.precision)?;
    let mut out = Output::new(&cfg.out)?;
    let fails = match cli.verb {
        Verb::Rotation => cmd_rotation(&cfg, &mut out),
        Verb::Partition => cmd_partition(&cfg, &mut out),
        Verb::Verify => cmd_verify(&cfg, &mut out),
        Verb::Conjugacy => cmd_conjugacy(&cfg, &mut out),
        Verb::Singularity => cmd_singularity(&cfg, &mut out),
        Verb::Constants => cmd_constants(&cfg, &mut out),
    }?;
    out.manifest(cli.verb.name(), &raw, &cfg, &fails.0)?;
    Ok(fails)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(f) if f.0.is_empty() => ExitCode::SUCCESS,
        Ok(f) => {
            for line in &f.0 {
                eprintln!("FAIL {line}");
            }
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
