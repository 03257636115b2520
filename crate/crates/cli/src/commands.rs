use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, Context};
use log::{info, warn};
use nematic_core::diagnostics::{clusters, concentration_scan, local_energy_audit, phi as phi_terms, Cutoff, PhiTerms};
use nematic_core::io::heatmap::extractor_registry;
use nematic_core::io::snapshot::{list_snapshots, read_snapshot, snapshot_name, write_snapshot};
use nematic_core::io::{parse_config, render_heatmap, serialize_config, write_ledger, Palette, SimConfig};
use nematic_core::params::{DEFAULT_COND_TOL, DEFAULT_PARODI_TOL};
use nematic_core::solver::{max_divergence, RunHook};
use nematic_core::{Error, FlowState, LeslieCoefficients, Solver, TorusGrid};

use crate::hooks::{Recorder, Scanner, SnapshotWriter};

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

pub const CONFIG_FILE: &str = "config.cfg";
pub const LEDGER_FILE: &str = "ledger.csv";
pub const EVENTS_FILE: &str = "events.csv";
pub const LOCAL_AUDIT_FILE: &str = "local_audit.csv";
pub const PHI_FILE: &str = "phi.csv";

#[derive(Debug)]
pub struct CliError {
    pub error: anyhow::Error,
    pub code: u8,
}

impl CliError {
    fn new(code: u8, error: impl Into<anyhow::Error>) -> Self {
        Self {
            error: error.into(),
            code,
        }
    }
}

fn code_of(e: &Error) -> u8 {
    match e {
        Error::ConfigSyntax { .. }
        | Error::ConfigField { .. }
        | Error::InvalidCoefficients(_)
        | Error::UnknownStrategy { .. } => EXIT_CONFIG,
        Error::NonFinite { .. } | Error::CflExceeded { .. } => EXIT_NUMERICAL,
        _ => EXIT_FAILURE,
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self::new(code_of(&e), e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::new(EXIT_FAILURE, e)
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        Self::new(EXIT_FAILURE, e)
    }
}

type CliResult = Result<(), CliError>;

fn load_config(path: &Path) -> Result<SimConfig, CliError> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(|e| CliError::new(EXIT_CONFIG, e))?;
    parse_config(&text).map_err(|e| CliError::new(EXIT_CONFIG, anyhow!(e).context(format!("{}", path.display()))))
}

fn csv_line(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join(",")
}

pub fn run(config: &Path, allow_invalid: bool, out: Option<PathBuf>) -> CliResult {
    let mut cfg = load_config(config)?;
    if let Some(dir) = out {
        cfg.output.dir = dir;
    }
    let coeffs = cfg
        .coefficients(allow_invalid)
        .map_err(|e| CliError::new(EXIT_CONFIG, e))?;
    let solver = Solver::new(coeffs, cfg.solver_config()).map_err(|e| CliError::new(EXIT_CONFIG, e))?;
    let grid = Arc::new(TorusGrid::new(cfg.grid.n, cfg.grid.length)?);
    let initial = cfg.initial.build()?.build(&grid)?;

    let dir = cfg.output.dir.clone();
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    fs::write(dir.join(CONFIG_FILE), serialize_config(&cfg))
        .with_context(|| format!("writing {}", dir.join(CONFIG_FILE).display()))?;

    let diag = &cfg.diagnostics;
    let mut snapshots = SnapshotWriter {
        dir: dir.clone(),
        every: cfg.time.snapshot_every,
        mode_flag: solver.scheme().mode_flag(),
        last_step: None,
    };
    let mut scanner = Scanner {
        radii: diag.concentration_radii.clone(),
        threshold: diag.threshold,
        flag_tol: diag.flag_tol,
        every: if diag.concentration_radii.is_empty() {
            0
        } else {
            diag.scan_every
        },
    };
    let audits = !diag.phi_probes.is_empty() || !diag.local_windows.is_empty();
    let mut recorder = Recorder {
        every: if audits { cfg.time.ledger_every.max(1) } else { 0 },
        states: Vec::new(),
    };

    info!(
        "running {} steps of dt = {} on n = {} ({} mode)",
        cfg.time.steps,
        cfg.time.dt,
        cfg.grid.n,
        solver.scheme().name()
    );
    let result = {
        let mut hooks: [&mut dyn RunHook; 3] = [&mut snapshots, &mut scanner, &mut recorder];
        solver.run(initial, &mut hooks)
    };
    let ledger_path = dir.join(LEDGER_FILE);
    let events_path = dir.join(EVENTS_FILE);
    let output = match result {
        Ok(o) => o,
        Err(failure) => {
            write_ledger(&failure.ledger, &ledger_path, &events_path)?;
            write_snapshot(
                &failure.last_good,
                snapshots.mode_flag,
                dir.join(snapshot_name(failure.steps)),
            )?;
            let code = code_of(&failure.error);
            let code = if code == EXIT_CONFIG { EXIT_FAILURE } else { code };
            return Err(CliError::new(code, anyhow!(failure.to_string())));
        }
    };
    write_ledger(&output.ledger, &ledger_path, &events_path)?;
    if cfg.time.snapshot_every > 0 && snapshots.last_step != Some(output.steps) {
        write_snapshot(
            &output.state,
            snapshots.mode_flag,
            dir.join(snapshot_name(output.steps)),
        )?;
    }
    if audits {
        if recorder.states.last().map(|s| s.t) != Some(output.state.t) {
            recorder.states.push(output.state.clone());
        }
        write_audits(&cfg, &coeffs, &recorder.states, &dir)?;
    }

    let last = output.ledger.last().ok_or_else(|| anyhow!("empty ledger"))?;
    info!(
        "done: t = {}, E = {:.6e}, max energy increase = {:.3e}, max |div u| = {:.3e}, {} concentration events",
        output.state.t,
        last.energy,
        output.ledger.max_energy_increase(),
        max_divergence(&output.state.u)?,
        output.ledger.events().len()
    );
    Ok(())
}

fn write_audits(cfg: &SimConfig, coeffs: &LeslieCoefficients, states: &[FlowState], dir: &Path) -> CliResult {
    let diag = &cfg.diagnostics;
    if !diag.local_windows.is_empty() {
        let mut text = String::from("cx,cy,inner,outer,t1,t2,lhs,flux_bound,alignment,pass\n");
        for w in &diag.local_windows {
            let cutoff = Cutoff::annular(w.center, w.inner, w.outer);
            let a = local_energy_audit(states, coeffs, &cutoff)?;
            let (t1, t2) = (states[0].t, states[states.len() - 1].t);
            let pass = a.passes(diag.c_audit);
            if !pass {
                warn!(
                    "local audit at ({}, {}): lhs {:.3e} exceeds {} x flux {:.3e}",
                    w.center.0, w.center.1, a.lhs, diag.c_audit, a.flux_bound
                );
            }
            let _ = writeln!(
                text,
                "{},{pass}",
                csv_line(&[
                    w.center.0,
                    w.center.1,
                    w.inner,
                    w.outer,
                    t1,
                    t2,
                    a.lhs,
                    a.flux_bound,
                    a.alignment
                ])
            );
        }
        fs::write(dir.join(LOCAL_AUDIT_FILE), text)?;
    }
    if !diag.phi_probes.is_empty() {
        let mut text =
            String::from("cx,cy,t0,r,velocity,velocity_gradient,director_gradient,director_laplacian,pressure,phi\n");
        for p in &diag.phi_probes {
            match phi_terms(states, coeffs, p.center, p.t0, p.r) {
                Ok(terms) => {
                    let _ = writeln!(text, "{}", csv_line(&phi_row(p.center, p.t0, p.r, &terms)));
                }
                Err(e) => warn!(
                    "phi probe at ({}, {}), t0 = {}, r = {}: {e}",
                    p.center.0, p.center.1, p.t0, p.r
                ),
            }
        }
        fs::write(dir.join(PHI_FILE), text)?;
    }
    Ok(())
}

fn phi_row(center: (f64, f64), t0: f64, r: f64, t: &PhiTerms) -> [f64; 10] {
    [
        center.0,
        center.1,
        t0,
        r,
        t.velocity,
        t.velocity_gradient,
        t.director_gradient,
        t.director_laplacian,
        t.pressure,
        t.total(),
    ]
}

pub fn validate(config: &Path) -> CliResult {
    let cfg = load_config(config)?;
    let coeffs = LeslieCoefficients::new(cfg.coefficients).map_err(|e| CliError::new(EXIT_CONFIG, e))?;
    let report = coeffs.validate(DEFAULT_PARODI_TOL, DEFAULT_COND_TOL);
    let mark = |ok: bool| if ok { "ok" } else { "FAIL" };
    println!("mu = {:?}", coeffs.mu());
    println!("lambda1 = {:?}, lambda2 = {:?}", coeffs.lambda1(), coeffs.lambda2());
    println!("parodi relation      {}", mark(report.parodi_ok));
    println!("lambda1 < 0          {}", mark(report.lambda1_negative));
    println!("alignment weights    {}", mark(report.alignment_nonneg));
    println!("mu4 > 0              {}", mark(report.viscosity_positive));
    println!("stretching condition {}", mark(report.stretching_ok));
    for m in &report.messages {
        println!("  {m}");
    }
    if report.is_valid() {
        println!("valid");
        Ok(())
    } else {
        Err(CliError::new(EXIT_CONFIG, anyhow!("coefficients fail validation")))
    }
}

pub fn scan(snapshot: &Path, radius: f64, threshold: f64, flag_tol: f64) -> CliResult {
    let snap = read_snapshot(snapshot)?;
    let state = &snap.state;
    let events = concentration_scan(state, radius, threshold, flag_tol)?;
    println!(
        "t = {}, r = {radius}, threshold = {threshold}, {} flagged points",
        state.t,
        events.len()
    );
    for c in clusters(state.grid(), &events) {
        println!(
            "cluster at ({:.6}, {:.6}): {} points, peak local energy {:.6}",
            c.peak.center.0,
            c.peak.center.1,
            c.members.len(),
            c.peak.local_energy
        );
    }
    Ok(())
}

fn parse_mu(raw: &str) -> Result<[f64; 6], CliError> {
    let v: Vec<f64> = raw
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::new(EXIT_CONFIG, anyhow!("--mu: {e}")))?;
    <[f64; 6]>::try_from(v).map_err(|_| CliError::new(EXIT_CONFIG, anyhow!("--mu needs six values")))
}

pub fn phi(dir: &Path, center: (f64, f64), t0: f64, r: f64, mu: Option<&str>) -> CliResult {
    let mu = match mu {
        Some(raw) => parse_mu(raw)?,
        None => load_config(&dir.join(CONFIG_FILE))?.coefficients,
    };
    let coeffs = LeslieCoefficients::new(mu).map_err(|e| CliError::new(EXIT_CONFIG, e))?;
    let paths = list_snapshots(dir)?;
    if paths.is_empty() {
        return Err(anyhow!("no snapshots in {}", dir.display()).into());
    }
    let mut states = Vec::with_capacity(paths.len());
    for p in &paths {
        let s = read_snapshot(p)?.state;
        if let Some(first) = states.first().map(|f: &FlowState| f.grid()) {
            if first.n() != s.grid().n() || first.length() != s.grid().length() {
                return Err(anyhow!("{} is on a different grid", p.display()).into());
            }
        }
        states.push(s);
    }
    states.sort_by(|a, b| a.t.total_cmp(&b.t));
    let terms = phi_terms(&states, &coeffs, center, t0, r)?;
    println!("velocity            {:.6e}", terms.velocity);
    println!("velocity_gradient   {:.6e}", terms.velocity_gradient);
    println!("director_gradient   {:.6e}", terms.director_gradient);
    println!("director_laplacian  {:.6e}", terms.director_laplacian);
    println!("pressure            {:.6e}", terms.pressure);
    println!("phi                 {:.6e}", terms.total());
    Ok(())
}

pub fn render(snapshot: &Path, field: &str, out: &Path, palette: Option<&str>) -> CliResult {
    let extractor = extractor_registry()
        .create(field, &())
        .map_err(|e| CliError::new(EXIT_CONFIG, e))?;
    let palette: Palette = match palette {
        Some(p) => p.parse().map_err(|e| CliError::new(EXIT_CONFIG, anyhow!("{e}")))?,
        None => extractor.palette(),
    };
    let state = read_snapshot(snapshot)?.state;
    render_heatmap(&extractor.extract(&state)?, out, palette)?;
    Ok(())
}
