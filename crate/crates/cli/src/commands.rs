use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use wfsim::random::seeded;
use wfsim::theorem1::standard_partitions;
use wfsim::{
    helstrom_povm, povm_classical_distance, random_instance, run_scenario, theorem1_bounds, trace_distance,
    with_param, DensityMatrix, Povm, RunReport, Scenario, ShieldFamily, SweepSpec,
};

use crate::output::{cell, emit, json, number, Format, Table};
use crate::Failure;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::invalid(format!("cannot read {}: {e}", path.display())))
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    serde_json::from_str(&read(path)?).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))
}

fn load_scenario(path: &Path) -> Result<Scenario, Failure> {
    let scenario = Scenario::from_json(&read(path)?)
        .map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
    scenario.validate()?;
    Ok(scenario)
}

fn warn(report: &RunReport) {
    for w in &report.warnings {
        eprintln!("wfsim: warning: {w}");
    }
}

pub fn simulate(path: &Path, out: Option<&Path>, format: Format) -> Result<(), Failure> {
    let scenario = load_scenario(path)?;
    let report = run_scenario(&scenario, path.parent())?;
    warn(&report);
    let text = match format {
        Format::Json => json(&report)?,
        Format::Csv => {
            let cols = report.columns();
            let mut table = Table::new(cols.iter().map(|(name, _)| name.clone()));
            table.push(cols.iter().map(|(_, v)| cell(*v)).collect());
            table.render()
        }
    };
    emit(out, &text)
}

#[derive(Serialize)]
struct SweepReport<'a> {
    param: &'a str,
    values: &'a [f64],
    reports: &'a [RunReport],
}

pub fn sweep(path: &Path, param: &str, out: Option<&Path>, format: Format) -> Result<(), Failure> {
    let scenario = load_scenario(path)?;
    let spec = SweepSpec::parse(param)?;
    let base = path.parent();
    let results: Vec<wfsim::Result<RunReport>> = spec
        .values
        .par_iter()
        .map(|&v| run_scenario(&with_param(&scenario, spec.param, v), base))
        .collect();
    let reports = results.into_iter().collect::<wfsim::Result<Vec<_>>>()?;
    if let Some(first) = reports.first() {
        warn(first);
    }
    let text = match format {
        Format::Json => json(&SweepReport {
            param: spec.param.name(),
            values: &spec.values,
            reports: &reports,
        })?,
        Format::Csv => {
            let columns = scenario.column_names();
            let mut table = Table::new(std::iter::once(spec.param.name().to_string()).chain(columns.iter().cloned()));
            for (v, r) in spec.values.iter().zip(&reports) {
                let mut row = vec![number(*v)];
                row.extend(columns.iter().map(|c| cell(r.value(c))));
                table.push(row);
            }
            table.render()
        }
    };
    emit(out, &text)
}

pub struct Theorem1Args<'a> {
    pub seed: Option<u64>,
    pub trials: usize,
    pub dims: &'a str,
    pub members: usize,
    pub family: &'a str,
    pub tolerance: f64,
}

#[derive(Serialize)]
struct TrialRow {
    trial: usize,
    family: &'static str,
    lower: f64,
    value_xz_y: f64,
    value_x_yz: f64,
    upper: f64,
    shields_disjoint: bool,
    sandwich_ok: bool,
    saturation_ok: bool,
    partitions_agree: bool,
}

#[derive(Serialize)]
struct Theorem1Report<'a> {
    seed: u64,
    trials: usize,
    dims: [usize; 3],
    members: usize,
    tolerance: f64,
    results: &'a [TrialRow],
}

fn family_name(f: ShieldFamily) -> &'static str {
    match f {
        ShieldFamily::Mixed => "mixed",
        ShieldFamily::Pure => "pure",
        ShieldFamily::Disjoint => "disjoint",
    }
}

fn parse_dims(s: &str) -> Result<[usize; 3], Failure> {
    let dims: Vec<usize> = s
        .split(',')
        .map(|x| x.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::invalid(format!("--dims `{s}` is not x,y,z")))?;
    match dims[..] {
        [x, y, z] if x >= 2 && y >= 2 && z >= 2 => Ok([x, y, z]),
        _ => Err(Failure::invalid(format!("--dims `{s}` needs three dimensions ≥ 2"))),
    }
}

/// Independent per-trial seed, so results do not depend on scheduling.
fn trial_seed(seed: u64, trial: usize) -> u64 {
    seed ^ (trial as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

pub fn theorem1(args: &Theorem1Args, out: Option<&Path>, format: Format) -> Result<(), Failure> {
    let seed = args
        .seed
        .ok_or_else(|| Failure::invalid("theorem1 needs an explicit --seed"))?;
    if args.trials == 0 {
        return Err(Failure::invalid("--trials must be at least 1"));
    }
    if args.members == 0 {
        return Err(Failure::invalid("--members must be at least 1"));
    }
    if args.tolerance.is_nan() || args.tolerance < 0.0 {
        return Err(Failure::invalid("--tolerance must be non-negative"));
    }
    let dims = parse_dims(args.dims)?;
    let families: Vec<ShieldFamily> = match args.family {
        "all" if dims[2] >= args.members => vec![ShieldFamily::Mixed, ShieldFamily::Pure, ShieldFamily::Disjoint],
        "all" => vec![ShieldFamily::Mixed, ShieldFamily::Pure],
        other => vec![other.parse::<ShieldFamily>()?],
    };

    let outcomes: Vec<wfsim::Result<_>> = (0..args.trials)
        .into_par_iter()
        .map(|trial| {
            let family = families[trial % families.len()];
            let inst = random_instance(&mut seeded(trial_seed(seed, trial)), dims, args.members, family)?;
            let (assisted, pair) = standard_partitions(&inst)?;
            let b = theorem1_bounds(&inst, &assisted, &pair)?;
            let row = TrialRow {
                trial,
                family: family_name(family),
                lower: b.lower,
                value_xz_y: b.value_xz_y,
                value_x_yz: b.value_x_yz,
                upper: b.upper,
                shields_disjoint: b.shields_disjoint,
                sandwich_ok: b.sandwich_holds(args.tolerance),
                saturation_ok: b.saturation_holds(args.tolerance),
                partitions_agree: b.partitions_agree(args.tolerance),
            };
            Ok((row, inst))
        })
        .collect();
    let outcomes = outcomes.into_iter().collect::<wfsim::Result<Vec<_>>>()?;
    let (rows, instances): (Vec<TrialRow>, Vec<_>) = outcomes.into_iter().unzip();

    let text = match format {
        Format::Json => json(&Theorem1Report {
            seed,
            trials: args.trials,
            dims,
            members: args.members,
            tolerance: args.tolerance,
            results: &rows,
        })?,
        Format::Csv => {
            let mut table = Table::new([
                "trial",
                "family",
                "lower",
                "value_xz_y",
                "value_x_yz",
                "upper",
                "shields_disjoint",
                "sandwich_ok",
                "saturation_ok",
                "partitions_agree",
            ]);
            for r in &rows {
                table.push(vec![
                    r.trial.to_string(),
                    r.family.to_string(),
                    number(r.lower),
                    number(r.value_xz_y),
                    number(r.value_x_yz),
                    number(r.upper),
                    r.shields_disjoint.to_string(),
                    r.sandwich_ok.to_string(),
                    r.saturation_ok.to_string(),
                    r.partitions_agree.to_string(),
                ]);
            }
            table.render()
        }
    };
    emit(out, &text)?;

    let failed: Vec<usize> = rows
        .iter()
        .filter(|r| !(r.sandwich_ok && r.saturation_ok))
        .map(|r| r.trial)
        .collect();
    let disagree = rows.iter().filter(|r| !r.partitions_agree).count();
    if disagree > 0 {
        eprintln!("wfsim: note: {disagree} of {} trials have xz|y and x|yz negativities differing by more than {:e}", rows.len(), args.tolerance);
    }
    if let Some(&first) = failed.first() {
        eprintln!("wfsim: offending instance (trial {first}):");
        eprintln!("{}", serde_json::to_string(&instances[first]).unwrap_or_default());
        return Err(Failure {
            code: 1,
            message: format!("bounds violated in {} of {} trials", failed.len(), rows.len()),
        });
    }
    Ok(())
}

#[derive(Serialize)]
struct Discrimination {
    trace_distance: f64,
    helstrom_distance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    povm_distance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gap: Option<f64>,
}

pub fn discriminate(
    tau: &Path,
    upsilon: &Path,
    povm: Option<&Path>,
    out: Option<&Path>,
    format: Format,
) -> Result<(), Failure> {
    let tau: DensityMatrix = parse_json(tau)?;
    let upsilon: DensityMatrix = parse_json(upsilon)?;
    let td = trace_distance(&tau, &upsilon)?;
    let helstrom = povm_classical_distance(&tau, &upsilon, &helstrom_povm(&tau, &upsilon)?)?;
    let povm_distance = match povm {
        Some(p) => {
            let p: Povm = parse_json(p)?;
            Some(povm_classical_distance(&tau, &upsilon, &p)?)
        }
        None => None,
    };
    let report = Discrimination {
        trace_distance: td,
        helstrom_distance: helstrom,
        povm_distance,
        gap: povm_distance.map(|d| td - d),
    };
    let text = match format {
        Format::Json => json(&report)?,
        Format::Csv => {
            let mut header = vec!["trace_distance", "helstrom_distance"];
            let mut row = vec![number(td), number(helstrom)];
            if let (Some(d), Some(g)) = (report.povm_distance, report.gap) {
                header.extend(["povm_distance", "gap"]);
                row.extend([number(d), number(g)]);
            }
            let mut table = Table::new(header);
            table.push(row);
            table.render()
        }
    };
    emit(out, &text)
}
