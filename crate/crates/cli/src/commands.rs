//! Subcommand implementations and report writers.

use std::io::Write;
use std::path::PathBuf;

use kofn_core::baselines::{
    mtdl_angus, mtdl_chen, mtdl_det_approx, mtdl_exp_approx, ExponentialRepairParams,
};
use kofn_core::inversion::invert_cdf;
use kofn_core::simulate::{estimate_mtdl, RepairModel};
use kofn_core::transform::{mtdl_embedded_chain, mtdl_lst_derivative};
use kofn_core::{Error, RepairDiscipline, Result, SystemParams};
use serde::Serialize;

use crate::{
    ArrayArgs, CurveArgs, Format, ModelArg, MtdlArgs, SimulateArgs, SweepArgs, ValidateArgs,
};

fn write_report(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::InvalidParams(format!("cannot write to standard output: {e}"))),
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::InvalidParams(format!("cannot write {}: {e}", path.display()))),
    }
}

fn csv_num(x: f64) -> String {
    format!("{x:.8e}")
}

fn csv_opt(x: Option<f64>) -> String {
    x.map(csv_num).unwrap_or_default()
}

fn to_json<T: Serialize>(report: &T) -> String {
    let mut text = serde_json::to_string_pretty(report)
        .expect("JSON encoding of plain records cannot fail");
    text.push('\n');
    text
}

/// The deterministic-repair system described by the flags; `--trep` is
/// mandatory and `--mu` must be absent.
fn deterministic_params(array: &ArrayArgs, trep: Option<f64>, mu: Option<f64>) -> Result<SystemParams> {
    if mu.is_some() {
        return Err(Error::InvalidParams("--mu only applies to --model exp".into()));
    }
    let trep = trep
        .ok_or_else(|| Error::InvalidParams("--trep is required with --model det".into()))?;
    SystemParams::new(array.n, array.k, array.lambda, trep)
}

/// The exponential-repair system described by the flags; `--mu` is
/// mandatory and `--trep` must be absent.
fn exponential_params(
    array: &ArrayArgs,
    trep: Option<f64>,
    mu: Option<f64>,
) -> Result<ExponentialRepairParams> {
    if trep.is_some() {
        return Err(Error::InvalidParams("--trep does not apply to --model exp".into()));
    }
    let mu = mu.ok_or_else(|| Error::InvalidParams("--mu is required with --model exp".into()))?;
    ExponentialRepairParams::new(array.n, array.k, array.lambda, mu)
}

#[derive(Serialize)]
struct MtdlRecord {
    discipline: &'static str,
    model: &'static str,
    n: u32,
    k: u32,
    lambda: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    trep: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mu: Option<f64>,
    exact: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    derivative: Option<f64>,
    approx: f64,
    unit: String,
}

#[derive(Serialize)]
struct MtdlReport {
    records: Vec<MtdlRecord>,
}

pub fn mtdl(args: MtdlArgs) -> Result<()> {
    let mut records = Vec::new();
    for discipline in args.discipline.list() {
        let record = match args.model {
            ModelArg::Det => {
                let p = deterministic_params(&args.array, args.trep, args.mu)?;
                MtdlRecord {
                    discipline: discipline.name(),
                    model: "det",
                    n: p.n,
                    k: p.k,
                    lambda: p.failure_rate,
                    trep: Some(p.repair_time),
                    mu: None,
                    exact: mtdl_embedded_chain(&p, discipline)?,
                    derivative: Some(mtdl_lst_derivative(&p, discipline)?),
                    approx: mtdl_det_approx(&p)?,
                    unit: args.output.unit.clone(),
                }
            }
            ModelArg::Exp => {
                let p = exponential_params(&args.array, args.trep, args.mu)?;
                let exact = match discipline {
                    RepairDiscipline::Serial => mtdl_chen(&p)?,
                    RepairDiscipline::Parallel => mtdl_angus(&p)?,
                };
                MtdlRecord {
                    discipline: discipline.name(),
                    model: "exp",
                    n: p.n,
                    k: p.k,
                    lambda: p.failure_rate,
                    trep: None,
                    mu: Some(p.repair_rate),
                    exact,
                    derivative: None,
                    approx: mtdl_exp_approx(&p, discipline)?,
                    unit: args.output.unit.clone(),
                }
            }
        };
        records.push(record);
    }
    let text = match args.output.format {
        Format::Json => to_json(&MtdlReport { records }),
        Format::Csv => {
            let mut text = String::from("discipline,model,n,k,lambda,trep,mu,exact,derivative,approx,unit\n");
            for r in &records {
                text.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{}\n",
                    r.discipline,
                    r.model,
                    r.n,
                    r.k,
                    csv_num(r.lambda),
                    csv_opt(r.trep),
                    csv_opt(r.mu),
                    csv_num(r.exact),
                    csv_opt(r.derivative),
                    csv_num(r.approx),
                    r.unit
                ));
            }
            text
        }
    };
    write_report(&args.output.out, &text)
}

#[derive(Serialize)]
struct CurvePoint {
    t: f64,
    cdf: f64,
    reliability: f64,
}

#[derive(Serialize)]
struct CurveReport {
    n: u32,
    k: u32,
    lambda: f64,
    trep: f64,
    discipline: &'static str,
    unit: String,
    records: Vec<CurvePoint>,
}

pub fn curve(args: CurveArgs) -> Result<()> {
    let p = SystemParams::new(args.array.n, args.array.k, args.array.lambda, args.trep)?;
    if args.points < 2 {
        return Err(Error::InvalidParams(format!(
            "--points must be at least 2, got {}",
            args.points
        )));
    }
    if !args.tmax.is_finite() || args.tmax <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "--tmax must be positive and finite, got {}",
            args.tmax
        )));
    }
    let discipline: RepairDiscipline = args.discipline.into();
    let grid: Vec<f64> = (0..args.points)
        .map(|i| args.tmax * i as f64 / (args.points - 1) as f64)
        .collect();
    let curve = invert_cdf(&p, discipline, &grid)?;
    let records: Vec<CurvePoint> = curve
        .points
        .iter()
        .map(|&(t, cdf)| CurvePoint { t, cdf, reliability: 1.0 - cdf })
        .collect();
    let text = match args.output.format {
        Format::Json => to_json(&CurveReport {
            n: p.n,
            k: p.k,
            lambda: p.failure_rate,
            trep: p.repair_time,
            discipline: discipline.name(),
            unit: args.output.unit.clone(),
            records,
        }),
        Format::Csv => {
            let mut text = String::from("t,cdf,reliability\n");
            for r in &records {
                text.push_str(&format!(
                    "{},{},{}\n",
                    csv_num(r.t),
                    csv_num(r.cdf),
                    csv_num(r.reliability)
                ));
            }
            text
        }
    };
    write_report(&args.output.out, &text)
}

#[derive(Serialize)]
struct SweepRow {
    trep: f64,
    mtdl_det_serial: f64,
    mtdl_det_parallel: f64,
    mtdl_exp_serial: f64,
    approx: f64,
}

#[derive(Serialize)]
struct SweepReport {
    n: u32,
    k: u32,
    lambda: f64,
    unit: String,
    records: Vec<SweepRow>,
}

pub fn sweep(args: SweepArgs) -> Result<()> {
    if args.sweep_points < 2 {
        return Err(Error::InvalidParams(format!(
            "--sweep-points must be at least 2, got {}",
            args.sweep_points
        )));
    }
    if !(args.trep_min.is_finite() && args.trep_min > 0.0 && args.trep_max.is_finite()) {
        return Err(Error::InvalidParams(
            "--trep-min and --trep-max must be positive and finite".into(),
        ));
    }
    if args.trep_min >= args.trep_max {
        return Err(Error::InvalidParams(format!(
            "--trep-min must be below --trep-max, got {} and {}",
            args.trep_min, args.trep_max
        )));
    }
    let (ln_min, ln_max) = (args.trep_min.ln(), args.trep_max.ln());
    let mut records = Vec::with_capacity(args.sweep_points);
    for i in 0..args.sweep_points {
        let frac = i as f64 / (args.sweep_points - 1) as f64;
        let trep = (ln_min + frac * (ln_max - ln_min)).exp();
        let p = SystemParams::new(args.array.n, args.array.k, args.array.lambda, trep)?;
        let e = ExponentialRepairParams::new(args.array.n, args.array.k, args.array.lambda, 1.0 / trep)?;
        records.push(SweepRow {
            trep,
            mtdl_det_serial: mtdl_embedded_chain(&p, RepairDiscipline::Serial)?,
            mtdl_det_parallel: mtdl_embedded_chain(&p, RepairDiscipline::Parallel)?,
            mtdl_exp_serial: mtdl_chen(&e)?,
            approx: mtdl_det_approx(&p)?,
        });
    }
    let text = match args.output.format {
        Format::Json => to_json(&SweepReport {
            n: args.array.n,
            k: args.array.k,
            lambda: args.array.lambda,
            unit: args.output.unit.clone(),
            records,
        }),
        Format::Csv => {
            let mut text =
                String::from("trep,mtdl_det_serial,mtdl_det_parallel,mtdl_exp_serial,approx\n");
            for r in &records {
                text.push_str(&format!(
                    "{},{},{},{},{}\n",
                    csv_num(r.trep),
                    csv_num(r.mtdl_det_serial),
                    csv_num(r.mtdl_det_parallel),
                    csv_num(r.mtdl_exp_serial),
                    csv_num(r.approx)
                ));
            }
            text
        }
    };
    write_report(&args.output.out, &text)
}

#[derive(Serialize)]
struct SimulateRecord {
    discipline: &'static str,
    model: &'static str,
    n: u32,
    k: u32,
    lambda: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    trep: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mu: Option<f64>,
    trials: u64,
    seed: u64,
    mean: f64,
    std_error: f64,
    analytic: f64,
    z: f64,
    unit: String,
}

#[derive(Serialize)]
struct SimulateReport {
    records: Vec<SimulateRecord>,
}

pub fn simulate(args: SimulateArgs) -> Result<()> {
    let mut records = Vec::new();
    for discipline in args.discipline.list() {
        let (params, model, analytic, trep, mu) = match args.model {
            ModelArg::Det => {
                let p = deterministic_params(&args.array, args.trep, args.mu)?;
                let analytic = mtdl_embedded_chain(&p, discipline)?;
                (p, RepairModel::Deterministic, analytic, Some(p.repair_time), None)
            }
            ModelArg::Exp => {
                let e = exponential_params(&args.array, args.trep, args.mu)?;
                let analytic = match discipline {
                    RepairDiscipline::Serial => mtdl_chen(&e)?,
                    RepairDiscipline::Parallel => mtdl_angus(&e)?,
                };
                // The exponential event loop never reads repair_time; any
                // positive value satisfies the parameter invariants.
                let p = SystemParams::new(e.n, e.k, e.failure_rate, 1.0)?;
                (p, RepairModel::Exponential { rate: e.repair_rate }, analytic, None, Some(e.repair_rate))
            }
        };
        let result = estimate_mtdl(&params, discipline, model, args.trials, args.seed)?;
        records.push(SimulateRecord {
            discipline: discipline.name(),
            model: match args.model {
                ModelArg::Det => "det",
                ModelArg::Exp => "exp",
            },
            n: params.n,
            k: params.k,
            lambda: params.failure_rate,
            trep,
            mu,
            trials: result.trials,
            seed: result.seed,
            mean: result.mean,
            std_error: result.std_error,
            analytic,
            z: (result.mean - analytic) / result.std_error,
            unit: args.output.unit.clone(),
        });
    }
    let text = match args.output.format {
        Format::Json => to_json(&SimulateReport { records }),
        Format::Csv => {
            let mut text = String::from(
                "discipline,model,n,k,lambda,trep,mu,trials,seed,mean,std_error,analytic,z,unit\n",
            );
            for r in &records {
                text.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                    r.discipline,
                    r.model,
                    r.n,
                    r.k,
                    csv_num(r.lambda),
                    csv_opt(r.trep),
                    csv_opt(r.mu),
                    r.trials,
                    r.seed,
                    csv_num(r.mean),
                    csv_num(r.std_error),
                    csv_num(r.analytic),
                    csv_num(r.z),
                    r.unit
                ));
            }
            text
        }
    };
    write_report(&args.output.out, &text)
}

pub fn validate(args: ValidateArgs) -> Result<i32> {
    let extra = match (args.n, args.k, args.lambda, args.trep) {
        (None, None, None, None) => None,
        (Some(n), Some(k), Some(lambda), Some(trep)) => {
            Some(SystemParams::new(n, k, lambda, trep)?)
        }
        _ => {
            return Err(Error::InvalidParams(
                "give all four of --n, --k, --lambda, --trep to add an array to the checks".into(),
            ))
        }
    };
    let checks = crate::validate::run_suite(extra, args.inject_fault);
    let failed = checks.iter().filter(|c| !c.passed).count();
    let mut text = String::new();
    for check in &checks {
        let status = if check.passed { "PASS" } else { "FAIL" };
        text.push_str(&format!("{status} {}: {}\n", check.name, check.detail));
    }
    if failed == 0 {
        text.push_str(&format!("all {} checks passed\n", checks.len()));
    } else {
        text.push_str(&format!("{failed} of {} checks failed\n", checks.len()));
    }
    write_report(&args.out, &text)?;
    Ok(if failed == 0 { 0 } else { 1 })
}
