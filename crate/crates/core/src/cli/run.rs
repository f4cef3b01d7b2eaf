//! Command dispatch, artifact writing and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::config::{Format, RunConfig};
use crate::certificate::CertificateReport;
use crate::discretization::{assemble, build_grid, GridFunction, Region};
use crate::error::{Error, Result};
use crate::experiments::{
    eig_scan, lap_sweep, oracle_compare, radiation_bound_measure, ScanFlag, ScanSettings,
    SweepSettings, Verdict,
};
use crate::geometry::{check_eidus, validate_assumption21};
use crate::medium::{check_assumption47, validate_assumption22};
use crate::solver::solve;
use crate::weighted_analysis::{
    identity_residual, weighted_norm, Alpha, IdentityReport, Shell, XiWeight,
};

/// Subcommands of the binary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Validate,
    Solve,
    Sweep,
    Eigscan,
    Identity,
    Oracle,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Solve => "solve",
            Command::Sweep => "sweep",
            Command::Eigscan => "eigscan",
            Command::Identity => "identity",
            Command::Oracle => "oracle",
        }
    }
}

/// Exit status: 0 success, 1 error, 2 a verdict or certificate failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Outcome {
    Success,
    Error,
    VerdictFailure,
}

impl Outcome {
    pub fn code(self) -> i32 {
        match self {
            Outcome::Success => 0,
            Outcome::Error => 1,
            Outcome::VerdictFailure => 2,
        }
    }
}

struct Artifacts {
    dir: PathBuf,
    formats: Vec<Format>,
    written: Vec<(String, String)>,
}

impl Artifacts {
    fn put(&mut self, name: &str, bytes: Vec<u8>) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, &bytes)?;
        self.written
            .push((name.to_string(), hex::encode(Sha256::digest(&bytes))));
        Ok(())
    }

    fn json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        if self.formats.contains(&Format::Json) {
            let mut bytes =
                serde_json::to_vec_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
            bytes.push(b'\n');
            self.put(name, bytes)?;
        }
        Ok(())
    }

    fn csv(&mut self, name: &str, write: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
        if self.formats.contains(&Format::Csv) {
            let mut bytes = Vec::new();
            write(&mut bytes)?;
            self.put(name, bytes)?;
        }
        Ok(())
    }
}

fn csv_io(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Runs `command` on the configuration at `config_path` with `overrides`,
/// writing artifacts and `manifest.json` under the output directory
/// (`out_dir` replaces the configured one). Returns the exit status.
pub fn run(
    command: Command,
    config_path: &Path,
    overrides: &[String],
    out_dir: Option<&Path>,
) -> Outcome {
    let start = Instant::now();
    let parsed = RunConfig::load(config_path, overrides);
    let (cfg, tree) = match parsed {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return Outcome::Error;
        }
    };
    let dir = out_dir
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from(&cfg.output.dir));
    if let Err(e) = fs::create_dir_all(&dir) {
        eprintln!("error: cannot create {}: {e}", dir.display());
        return Outcome::Error;
    }
    let mut arts = Artifacts {
        dir: dir.clone(),
        formats: cfg.output.formats.clone(),
        written: Vec::new(),
    };
    let result = dispatch(command, &cfg, &mut arts);
    let (outcome, error) = match result {
        Ok(o) => (o, None),
        Err(e) => {
            eprintln!("error: {e}");
            (Outcome::Error, Some(e.to_string()))
        }
    };
    let manifest = json!({
        "command": command.name(),
        "config_path": config_path.display().to_string(),
        "config_hash": cfg.hash(),
        "config": tree,
        "overrides": overrides,
        "versions": {
            "lap_lab": env!("CARGO_PKG_VERSION"),
            "manifest": 1,
        },
        "seed": cfg.seed,
        "threads": rayon::current_num_threads(),
        "wall_time_s": start.elapsed().as_secs_f64(),
        "outcome": outcome,
        "exit_code": outcome.code(),
        "error": error,
        "artifacts": arts.written.iter().map(|(f, h)| json!({"file": f, "sha256": h})).collect::<Vec<Value>>(),
    });
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    if let Err(e) = fs::write(dir.join("manifest.json"), text) {
        eprintln!("error: cannot write manifest: {e}");
        return Outcome::Error;
    }
    outcome
}

fn dispatch(command: Command, cfg: &RunConfig, arts: &mut Artifacts) -> Result<Outcome> {
    match command {
        Command::Validate => validate(cfg, arts),
        Command::Solve => solve_one(cfg, arts),
        Command::Sweep => sweep(cfg, arts),
        Command::Eigscan => eigscan(cfg, arts),
        Command::Identity => identity(cfg, arts),
        Command::Oracle => oracle(cfg, arts),
    }
}

fn verdict(ok: bool) -> Outcome {
    if ok {
        Outcome::Success
    } else {
        Outcome::VerdictFailure
    }
}

fn validate(cfg: &RunConfig, arts: &mut Artifacts) -> Result<Outcome> {
    let medium = cfg.medium()?;
    let grid = cfg.grid()?;
    let mut required: Vec<CertificateReport> = vec![
        validate_assumption21(&medium.partition, &medium.nus, grid.rmax)?,
        validate_assumption22(&medium, &grid),
    ];
    if cfg.geometry.kind == super::config::GeometryKind::Cone {
        required.push(check_eidus(&medium.partition, grid.rmax)?);
    }
    // informational: absence of eigenvalues
    let absence = match check_assumption47(&medium, cfg.experiment.lambda0, &grid) {
        Ok(r) => Some(r),
        Err(Error::NotDifferentiable) => None,
        Err(e) => return Err(e),
    };
    let pass = required.iter().all(|r| r.pass);
    arts.json(
        "validate.json",
        &json!({ "pass": pass, "required": required, "eigenvalue_absence": absence }),
    )?;
    arts.csv("validate.csv", |out| {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["report", "condition", "pass", "witness"])
            .map_err(csv_io)?;
        for r in required.iter().chain(absence.iter()) {
            for c in &r.entries {
                let witness = c
                    .witness
                    .as_ref()
                    .map(|p| {
                        p.iter()
                            .map(|v| format!("{v:e}"))
                            .collect::<Vec<_>>()
                            .join(" ")
                    })
                    .unwrap_or_default();
                w.write_record([
                    r.name.as_str(),
                    &c.condition,
                    if c.pass { "true" } else { "false" },
                    &witness,
                ])
                .map_err(csv_io)?;
            }
        }
        w.flush()?;
        Ok(())
    })?;
    Ok(verdict(pass))
}

fn solve_one(cfg: &RunConfig, arts: &mut Artifacts) -> Result<Outcome> {
    let medium = cfg.medium()?;
    let grid = cfg.grid()?;
    let e = &cfg.experiment;
    let lambda = cfg.lambdas()?[0];
    let eta = e.eta.unwrap_or(e.eta0);
    let side = e.side.sides()[0];
    let f = e.f_spec.build(&grid)?;
    let op = assemble(&grid, &medium, side.z(lambda, eta), side)?;
    let (u, stats) = solve(&op, &f, &e.solver)?;
    let delta = e
        .delta
        .unwrap_or_else(|| crate::experiments::default_delta(&medium));
    let norm_u = weighted_norm(
        &u,
        -delta,
        Region::Ball {
            radius: grid.physical_radius(),
        },
    );
    arts.json(
        "solve.json",
        &json!({ "lambda": lambda, "eta": eta, "side": side, "delta": delta, "norm_u": norm_u, "stats": stats }),
    )?;
    arts.csv("solve.csv", |out| write_field(out, &u))?;
    Ok(Outcome::Success)
}

fn write_field(out: &mut Vec<u8>, u: &GridFunction) -> Result<()> {
    let g = &u.grid;
    let mut w = csv::Writer::from_writer(out);
    let mut head: Vec<String> = (1..=g.dim).map(|j| format!("x{j}")).collect();
    head.extend(["u_re".into(), "u_im".into()]);
    w.write_record(&head).map_err(csv_io)?;
    let mut x = vec![0.0; g.dim];
    for (i, v) in u.values.iter().enumerate() {
        g.coords(i, &mut x);
        let mut rec: Vec<String> = x.iter().map(|c| format!("{c:e}")).collect();
        rec.push(format!("{:e}", v.re));
        rec.push(format!("{:e}", v.im));
        w.write_record(&rec).map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

fn sweep(cfg: &RunConfig, arts: &mut Artifacts) -> Result<Outcome> {
    let medium = cfg.medium()?;
    let grid = cfg.grid()?;
    let e = &cfg.experiment;
    let mut s = SweepSettings::new(cfg.lambdas()?);
    s.eta0 = e.eta0;
    s.factor = e.factor;
    s.count = e.count;
    s.sides = e.side.sides();
    s.delta = e.delta;
    s.f_spec = e.f_spec.clone();
    s.cauchy_ratio_max = e.cauchy_ratio_max;
    s.radiation_band = e.radiation_band;
    s.solve = e.solver.clone();
    let report = lap_sweep(&grid, &medium, &s)?;
    let bounds = radiation_bound_measure(&report);
    arts.csv("sweep.csv", |out| report.write_csv(out))?;
    arts.csv("radiation_bounds.csv", |out| {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "lambda",
            "side",
            "c_full",
            "c_star",
            "c_radial",
            "variation",
            "unbounded",
        ])
        .map_err(csv_io)?;
        for b in &bounds {
            w.write_record([
                format!("{:e}", b.lambda),
                b.side.symbol().into(),
                format!("{:e}", b.c_full),
                format!("{:e}", b.c_star),
                format!("{:e}", b.c_radial),
                format!("{:e}", b.variation),
                b.unbounded.to_string(),
            ])
            .map_err(csv_io)?;
        }
        w.flush()?;
        Ok(())
    })?;
    arts.json(
        "sweep.json",
        &json!({ "report": report, "radiation_bounds": bounds }),
    )?;
    let ok = report
        .verdicts
        .iter()
        .all(|v| v.verdict == Verdict::LAPConverged)
        && bounds.iter().all(|b| !b.unbounded);
    Ok(verdict(ok))
}

fn eigscan(cfg: &RunConfig, arts: &mut Artifacts) -> Result<Outcome> {
    let medium = cfg.medium()?;
    let grid = cfg.grid()?;
    let e = &cfg.experiment;
    let mut s = ScanSettings::new(cfg.lambdas()?);
    s.etas = (0..e.count)
        .map(|k| e.eta0 * e.factor.powi(-(k as i32)))
        .collect();
    s.samples = e.samples;
    s.seed = cfg.seed;
    s.plateau_tol = e.plateau_tol;
    s.lambda0 = e.lambda0;
    s.solve = e.solver.clone();
    let report = eig_scan(&grid, &medium, &s)?;
    arts.csv("eigscan.csv", |out| report.write_csv(out))?;
    arts.json("eigscan.json", &report)?;
    Ok(verdict(
        report
            .points
            .iter()
            .all(|p| p.flag != ScanFlag::Contradiction),
    ))
}

fn identity(cfg: &RunConfig, arts: &mut Artifacts) -> Result<Outcome> {
    let medium = cfg.medium()?;
    let ic = &cfg.experiment.identity;
    let dim = cfg.grid.dim;
    let center = ic.center.clone().unwrap_or_else(|| vec![0.0; dim]);
    let wave = ic.wave.clone().unwrap_or_else(|| vec![0.0; dim]);
    if center.len() != dim || wave.len() != dim {
        return Err(Error::Config {
            key: "experiment.identity".into(),
            message: "center and wave need N components".into(),
        });
    }
    let z = Complex64::new(ic.z[0], ic.z[1]);
    let xi = XiWeight::resolvent(dim, ic.xi_delta)?;
    let shell = Shell {
        inner: ic.inner,
        outer: ic.outer,
    };
    let mut reports: Vec<(f64, IdentityReport)> = Vec::new();
    for h in [cfg.grid.h, cfg.grid.h / 2.0] {
        // the identity needs a closed shell, so no sponge here
        let grid = build_grid(dim, cfg.grid.rmax, h, None)?;
        let u = GridFunction::from_fn(&grid, |x| {
            let q: f64 = x.iter().zip(&center).map(|(a, c)| (a - c) * (a - c)).sum();
            let phase: f64 = x.iter().zip(&wave).map(|(a, k)| a * k).sum();
            Complex64::new(-q / (2.0 * ic.width * ic.width), phase).exp()
        });
        reports.push((
            h,
            identity_residual(&u, None, z, &medium, &xi, shell, Alpha::default())?,
        ));
    }
    let ratio = reports[1].1.residual / reports[0].1.residual.max(f64::MIN_POSITIVE);
    arts.csv("identity.csv", |out| {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["h", "term", "value_re", "value_im"])
            .map_err(csv_io)?;
        for (h, r) in &reports {
            let totals = [
                ("lhs", r.lhs),
                ("rhs", r.rhs),
                ("residual", r.residual),
                ("interface_sign_form", r.interface_sign_form),
            ];
            for (name, v) in r
                .terms
                .iter()
                .map(|t| (t.name.as_str(), t.value))
                .chain(totals)
            {
                w.write_record([
                    format!("{h:e}"),
                    name.to_string(),
                    format!("{v:e}"),
                    "0".into(),
                ])
                .map_err(csv_io)?;
            }
        }
        w.flush()?;
        Ok(())
    })?;
    let reports_json: Vec<Value> = reports
        .iter()
        .map(|(h, r)| json!({ "h": h, "report": r }))
        .collect();
    arts.json(
        "identity.json",
        &json!({ "ratio": ratio, "reports": reports_json }),
    )?;
    Ok(verdict(ratio <= ic.max_ratio))
}

fn oracle(cfg: &RunConfig, arts: &mut Artifacts) -> Result<Outcome> {
    let stack = cfg.stratified()?;
    let e = &cfg.experiment;
    let oc = &e.oracle;
    let delta = e.delta.unwrap_or(0.75);
    let side = e.side.sides()[0];
    let rows = oracle_compare(
        &stack,
        &oc.source,
        side,
        &cfg.lambdas()?,
        &oc.etas,
        &oc.hs,
        delta,
        oc.x_max,
    )?;
    let max_err = rows
        .iter()
        .filter(|r| r.h <= oc.tol_h * (1.0 + 1e-12))
        .map(|r| r.rel_error)
        .fold(0.0, f64::max);
    arts.csv("oracle.csv", |out| {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["lambda", "eta", "h", "rel_error", "order"])
            .map_err(csv_io)?;
        for r in &rows {
            w.write_record([
                format!("{:e}", r.lambda),
                format!("{:e}", r.eta),
                format!("{:e}", r.h),
                format!("{:e}", r.rel_error),
                r.order.map(|o| format!("{o:e}")).unwrap_or_default(),
            ])
            .map_err(csv_io)?;
        }
        w.flush()?;
        Ok(())
    })?;
    arts.json(
        "oracle.json",
        &json!({ "delta": delta, "max_rel_error": max_err, "rows": rows }),
    )?;
    Ok(verdict(max_err <= oc.tol))
}
