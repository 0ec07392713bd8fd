use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::{json, Value};
use thiserror::Error;

use qdiv::certify::{self, Certificate, QuadFormInstance, Quantity, Verdict};
use qdiv::divergence::{self, DivergenceValue};
use qdiv::kernel::{self, DivergenceMode, KernelConfig};
use qdiv::opgen;
use qdiv::verify::{self, Suite, Tolerances};
use qdiv::{witness, HermitianMatrix};

use crate::{CertifyArgs, DivArgs, Format, PlotArgs, PlotKind, ReplayArgs, TolArgs, VerifyArgs};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Domain(_) => 3,
        }
    }
}

impl From<qdiv::Error> for CliError {
    fn from(e: qdiv::Error) -> Self {
        use qdiv::Error::*;
        match e {
            Parse(_)
            | InvalidKernel(_)
            | InvalidGenerator(_)
            | CoeffSumNonzero(_)
            | DimensionMismatch(..)
            | DimensionError(_) => CliError::Parse(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Violation,
    Inconclusive,
}

impl Outcome {
    pub fn code(&self) -> u8 {
        match self {
            Outcome::Pass => 0,
            Outcome::Violation => 1,
            Outcome::Inconclusive => 4,
        }
    }
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Domain(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Domain(format!("stdout: {e}")))
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn load_matrices(path: &Path) -> Result<Vec<HermitianMatrix>, CliError> {
    let v = read_json(path)?;
    let list = match &v {
        Value::Array(items) => items.clone(),
        Value::Object(map) if map.contains_key("matrices") => map["matrices"]
            .as_array()
            .cloned()
            .ok_or_else(|| CliError::Parse("\"matrices\" must be an array".into()))?,
        Value::Object(map) if map.contains_key("n") => vec![v.clone()],
        _ => return Err(CliError::Parse("expected a list of matrices".into())),
    };
    let mats = list.iter().map(HermitianMatrix::from_json).collect::<qdiv::Result<Vec<_>>>()?;
    if mats.is_empty() {
        return Err(CliError::Parse("no matrices in input".into()));
    }
    Ok(mats)
}

type PairFn = Box<dyn Fn(&HermitianMatrix, &HermitianMatrix) -> qdiv::Result<DivergenceValue>>;

pub fn divergence(a: &DivArgs) -> Result<Outcome, CliError> {
    let mats = load_matrices(&a.input)?;
    let eval: PairFn = match a.mode.as_str() {
        "sdiv" => Box::new(divergence::d_tau_sq),
        "qjsd" => Box::new(divergence::qjsd),
        m => match m.strip_prefix("jensen:") {
            Some(name) => {
                let g = opgen::lookup(name)
                    .ok_or_else(|| CliError::Parse(format!("unknown generator {name:?}")))?
                    .generator();
                Box::new(move |x, y| divergence::jensen_f(x, y, &g))
            }
            None => return Err(CliError::Parse(format!("unknown mode {m:?}"))),
        },
    };
    let m = mats.len();
    let mut table = vec![vec![DivergenceValue::ZERO; m]; m];
    // upper triangle only, mirrored, so the table is exactly symmetric
    for i in 0..m {
        for j in i..m {
            table[i][j] = eval(&mats[i], &mats[j])?;
            table[j][i] = table[i][j];
        }
    }
    let text = match a.format {
        Format::Json => pretty(&json!({
            "mode": a.mode,
            "points": m,
            "n": mats[0].n(),
            "squared": table.iter().map(|r| r.iter().map(|v| v.squared).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "root": table.iter().map(|r| r.iter().map(|v| v.root).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let mut s = String::from("i,j,squared,root\n");
            for (i, row) in table.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    s.push_str(&format!("{i},{j},{},{}\n", v.squared, v.root));
                }
            }
            s
        }
    };
    emit(&text, a.out.as_deref())?;
    Ok(Outcome::Pass)
}

fn tolerances(t: &TolArgs) -> Tolerances {
    Tolerances {
        triangle: t.tol_triangle,
        bound: t.tol_bound,
        identity: t.tol_identity,
        integral_rel: t.tol_integral,
        quad_rel: t.quad_rel,
        derivative_rel: t.tol_derivative,
        scalar_rel: t.tol_scalar,
        decomposition: t.tol_decomposition,
        embedding: t.tol_embedding,
        gram: t.tol_gram,
    }
}

pub fn verify(a: &VerifyArgs) -> Result<Outcome, CliError> {
    let suite = Suite::parse(&a.suite).ok_or_else(|| {
        CliError::Parse(format!(
            "unknown suite {:?}; expected one of metric, rearrange, integral, schoenberg, decomposition",
            a.suite
        ))
    })?;
    // Validate user input before spending time on the suite.
    let user_kernel = match &a.kernel {
        Some(p) => Some(KernelConfig::from_json(&read_json(p)?)?),
        None => None,
    };
    let tol = tolerances(&a.tol);
    let trials = a.trials.unwrap_or_else(|| suite.default_trials());
    let report = verify::run_suite(suite, a.seed, trials, &tol)?;
    let mut value = report.to_json();
    if let Some(cfg) = &user_kernel {
        let verdict = kernel::cnd_test(cfg)?;
        let sweep = kernel::schoenberg_test(cfg, &kernel::default_betas())?;
        value["kernel"] = cfg.to_json(Some(&verdict));
        value["kernel"]["schoenberg"] = json!(sweep);
    }
    if let Some(dir) = &a.replay_dir {
        fs::create_dir_all(dir).map_err(|e| CliError::Domain(format!("{}: {e}", dir.display())))?;
        for (i, r) in report.replays.iter().enumerate() {
            let check = r["check"].as_str().unwrap_or("check");
            let path = dir.join(format!("replay_{i}_{check}.json"));
            fs::write(&path, pretty(r)).map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))?;
            eprintln!("qdiv: wrote {}", path.display());
        }
    }
    let text = match a.format {
        Format::Json => pretty(&value),
        Format::Csv => {
            let mut s = String::from("check,count,failures,worst,tolerance\n");
            for c in &report.checks {
                s.push_str(&format!("{},{},{},{},{}\n", c.name, c.count, c.failures, c.worst, c.tolerance));
            }
            s
        }
    };
    emit(&text, a.out.as_deref())?;
    Ok(if report.passed { Outcome::Pass } else { Outcome::Violation })
}

pub fn replay(a: &ReplayArgs) -> Result<Outcome, CliError> {
    let v = read_json(&a.file)?;
    let out = verify::replay(&v, &tolerances(&a.tol))?;
    emit(
        &pretty(&json!({
            "check": v["check"],
            "excess": out.excess,
            "tolerance": out.tolerance,
            "failed": out.failed,
        })),
        None,
    )?;
    Ok(if out.failed { Outcome::Violation } else { Outcome::Pass })
}

pub fn certify(a: &CertifyArgs) -> Result<Outcome, CliError> {
    let cert = if a.recheck {
        let cert = Certificate::from_json(&read_json(Path::new(&a.target))?)?;
        if !certify::recheck(&cert)? {
            eprintln!("qdiv: recomputed enclosure differs from the certificate");
            emit(&pretty(&cert.to_json()), a.out.as_deref())?;
            return Ok(Outcome::Violation);
        }
        cert
    } else {
        match a.target.as_str() {
            "s2" => certify::certify_s2()?,
            "s3" => certify::certify_s3()?,
            path => {
                let instance = QuadFormInstance::from_json(&read_json(Path::new(path))?)?;
                certify::certify_instance(&instance, Quantity::Custom)?
            }
        }
    };
    emit(&pretty(&cert.to_json()), a.out.as_deref())?;
    Ok(match cert.verdict {
        Verdict::Inconclusive => Outcome::Inconclusive,
        _ => Outcome::Pass,
    })
}

fn log_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>, CliError> {
    if !(lo > 0.0 && hi > lo && hi.is_finite()) || points < 2 {
        return Err(CliError::Parse(format!(
            "need 0 < t_min < t_max and at least 2 points, got [{lo}, {hi}] x {points}"
        )));
    }
    let (a, b) = (lo.ln(), hi.ln());
    let mut grid: Vec<f64> = (0..points).map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp()).collect();
    // pin the endpoints exactly
    grid[0] = lo;
    grid[points - 1] = hi;
    Ok(grid)
}

fn pair(input: Option<&Path>) -> Result<(HermitianMatrix, HermitianMatrix), CliError> {
    match input {
        Some(p) => {
            let mats = load_matrices(p)?;
            if mats.len() < 2 {
                return Err(CliError::Parse("need at least two matrices".into()));
            }
            Ok((mats[0].clone(), mats[1].clone()))
        }
        None => {
            let x = witness::matrices();
            Ok((x[0].clone(), x[1].clone()))
        }
    }
}

pub fn plotdata(a: &PlotArgs) -> Result<Outcome, CliError> {
    let mut csv = String::new();
    match a.kind {
        PlotKind::ShiftedDistance => {
            let (x, y) = pair(a.input.as_deref())?;
            csv.push_str("t,shifted_distance_sq\n");
            for t in log_grid(a.t_min.unwrap_or(1e-3), a.t_max.unwrap_or(1e3), a.points)? {
                let d = divergence::d_tau_shifted_sq(&x, &y, t)?;
                csv.push_str(&format!("{t},{}\n", d.squared));
            }
        }
        PlotKind::QjsdTail => {
            let (x, y) = pair(a.input.as_deref())?;
            csv.push_str("t,qjsd_shifted\n");
            for t in log_grid(a.t_min.unwrap_or(1.0), a.t_max.unwrap_or(1e4), a.points)? {
                let j = divergence::qjsd(&x.shift(t), &y.shift(t))?;
                csv.push_str(&format!("{t},{}\n", j.squared));
            }
        }
        PlotKind::SchoenbergSweep => {
            let cfg = match a.input.as_deref() {
                Some(p) => KernelConfig::from_json(&read_json(p)?)?,
                None => kernel::build_divergence_kernel(&witness::matrices(), DivergenceMode::Qjsd)?,
            };
            let betas = match (a.t_min, a.t_max) {
                (None, None) => kernel::default_betas(),
                (lo, hi) => log_grid(lo.unwrap_or(1e-4), hi.unwrap_or(10.0), a.points)?,
            };
            csv.push_str("beta,min_eig\n");
            for (beta, e) in kernel::schoenberg_test(&cfg, &betas)? {
                csv.push_str(&format!("{beta},{e}\n"));
            }
        }
    }
    emit(&csv, a.out.as_deref())?;
    Ok(Outcome::Pass)
}
