//! Line-based simulation config: `[section]` headers, `key = value` pairs,
//! `#` comments. Unknown sections or keys and repeated keys are errors.
//!
//! ```text
//! [grid]
//! n = 64
//! length = 6.283185307179586
//!
//! [coefficients]
//! mu = 0, -2, 1, 4, 1, 0
//!
//! [initial]
//! preset = random
//! seed = 3
//! ```

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use log::warn;

use crate::diagnostics::concentration::{DEFAULT_FLAG_TOL, DEFAULT_THRESHOLD};
use crate::diagnostics::local::DEFAULT_C_AUDIT;
use crate::error::{Error, Result};
use crate::initial::{initial_registry, InitialCondition, PresetParams};
use crate::params::{LeslieCoefficients, DEFAULT_COND_TOL, DEFAULT_PARODI_TOL};
use crate::scheme::{scheme_registry, SchemeParams, DEFAULT_EPSILON, PROJECTION};
use crate::solver::{SolverConfig, DEFAULT_CFL_GUARD, DEFAULT_DT};

const SECTIONS: &[&str] = &[
    "grid",
    "coefficients",
    "time",
    "mode",
    "initial",
    "diagnostics",
    "output",
];

#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub n: usize,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeConfig {
    pub dt: f64,
    pub steps: usize,
    /// `0` disables snapshots.
    pub snapshot_every: usize,
    pub ledger_every: usize,
    pub cfl_guard: f64,
    pub dealias: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeConfig {
    pub name: String,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialConfig {
    pub preset: String,
    pub params: PresetParams,
}

impl InitialConfig {
    pub fn build(&self) -> Result<Box<dyn InitialCondition>> {
        initial_registry().create(&self.preset, &self.params)
    }
}

/// Φ evaluation point `(x0, t0)` and radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiProbe {
    pub center: (f64, f64),
    pub t0: f64,
    pub r: f64,
}

/// Annular cutoff of the local energy audit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalWindow {
    pub center: (f64, f64),
    pub inner: f64,
    pub outer: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsConfig {
    pub concentration_radii: Vec<f64>,
    pub threshold: f64,
    pub flag_tol: f64,
    /// Scan cadence in steps; `0` disables scanning.
    pub scan_every: usize,
    pub phi_probes: Vec<PhiProbe>,
    pub local_windows: Vec<LocalWindow>,
    pub c_audit: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub grid: GridConfig,
    pub coefficients: [f64; 6],
    pub time: TimeConfig,
    pub mode: ModeConfig,
    pub initial: InitialConfig,
    pub diagnostics: DiagnosticsConfig,
    pub output: OutputConfig,
}

impl SimConfig {
    /// Default configuration around the given coefficients.
    pub fn with_coefficients(mu: [f64; 6]) -> Self {
        Self {
            grid: GridConfig {
                n: 64,
                length: 2.0 * std::f64::consts::PI,
            },
            coefficients: mu,
            time: TimeConfig {
                dt: DEFAULT_DT,
                steps: 100,
                snapshot_every: 0,
                ledger_every: 1,
                cfl_guard: DEFAULT_CFL_GUARD,
                dealias: true,
            },
            mode: ModeConfig {
                name: PROJECTION.to_string(),
                epsilon: DEFAULT_EPSILON,
            },
            initial: InitialConfig {
                preset: "random".to_string(),
                params: PresetParams::new(),
            },
            diagnostics: DiagnosticsConfig {
                concentration_radii: Vec::new(),
                threshold: DEFAULT_THRESHOLD,
                flag_tol: DEFAULT_FLAG_TOL,
                scan_every: 0,
                phi_probes: Vec::new(),
                local_windows: Vec::new(),
                c_audit: DEFAULT_C_AUDIT,
            },
            output: OutputConfig {
                dir: PathBuf::from("out"),
            },
        }
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            dt: self.time.dt,
            steps: self.time.steps,
            mode: self.mode.name.clone(),
            epsilon: self.mode.epsilon,
            dealias: self.time.dealias,
            cfl_guard: self.time.cfl_guard,
            ledger_every: self.time.ledger_every,
        }
    }

    /// Coefficients checked against the dissipation conditions. With
    /// `allow_invalid` every failure is only logged.
    pub fn coefficients(&self, allow_invalid: bool) -> Result<LeslieCoefficients> {
        let c = LeslieCoefficients::new(self.coefficients)?;
        let report = c.validate(DEFAULT_PARODI_TOL, DEFAULT_COND_TOL);
        if !report.is_valid() {
            let msg = report.messages.join("; ");
            if !allow_invalid {
                return Err(Error::ConfigField {
                    field: "coefficients.mu".into(),
                    message: msg,
                });
            }
            warn!("accepting invalid coefficients: {msg}");
        }
        Ok(c)
    }

    /// Field-level validation applied by [`parse_config`].
    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, message: String| {
            Err(Error::ConfigField {
                field: field.to_string(),
                message,
            })
        };
        if self.grid.n < 8 || !self.grid.n.is_multiple_of(2) {
            return bad("grid.n", format!("{} must be even and at least 8", self.grid.n));
        }
        if !(self.grid.length.is_finite() && self.grid.length > 0.0) {
            return bad("grid.length", format!("{} must be positive", self.grid.length));
        }
        if self.coefficients.iter().any(|m| !m.is_finite()) {
            return bad("coefficients.mu", "coefficients must be finite".into());
        }
        self.solver_config().validate().map_err(|e| match e {
            Error::ConfigField { field, message } => Error::ConfigField {
                field: match field.as_str() {
                    "epsilon" => "mode.epsilon".into(),
                    other => format!("time.{other}"),
                },
                message,
            },
            other => other,
        })?;
        scheme_registry()
            .create(
                &self.mode.name,
                &SchemeParams {
                    epsilon: self.mode.epsilon,
                },
            )
            .map_err(|e| Error::ConfigField {
                field: "mode.mode".into(),
                message: e.to_string(),
            })?;
        self.initial.build()?;
        let d = &self.diagnostics;
        if d.concentration_radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return bad("diagnostics.concentration_radii", "radii must be positive".into());
        }
        if !(d.threshold > 0.0) {
            return bad("diagnostics.threshold", format!("{} must be positive", d.threshold));
        }
        if !(0.0..1.0).contains(&d.flag_tol) {
            return bad("diagnostics.flag_tol", format!("{} must lie in [0, 1)", d.flag_tol));
        }
        if d.phi_probes.iter().any(|p| !(p.r > 0.0)) {
            return bad("diagnostics.phi_probes", "probe radii must be positive".into());
        }
        if d.local_windows.iter().any(|w| !(w.inner >= 0.0 && w.inner < w.outer)) {
            return bad("diagnostics.local_windows", "windows need 0 <= inner < outer".into());
        }
        if !(d.c_audit > 0.0) {
            return bad("diagnostics.c_audit", format!("{} must be positive", d.c_audit));
        }
        Ok(())
    }
}

fn field_err(section: &str, key: &str, message: impl Into<String>) -> Error {
    Error::ConfigField {
        field: format!("{section}.{key}"),
        message: message.into(),
    }
}

fn scalar<T: FromStr>(section: &str, key: &str, raw: &str, what: &str) -> Result<T> {
    raw.trim()
        .parse::<T>()
        .map_err(|_| field_err(section, key, format!("`{raw}` is not {what}")))
}

fn real(section: &str, key: &str, raw: &str) -> Result<f64> {
    let v: f64 = scalar(section, key, raw, "a number")?;
    if !v.is_finite() {
        return Err(field_err(section, key, format!("`{raw}` is not finite")));
    }
    Ok(v)
}

fn reals(section: &str, key: &str, raw: &str, sep: char) -> Result<Vec<f64>> {
    raw.split(sep)
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| real(section, key, s))
        .collect()
}

fn boolean(section: &str, key: &str, raw: &str) -> Result<bool> {
    match raw.trim() {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(field_err(section, key, format!("`{other}` is not true or false"))),
    }
}

/// `a b c d; a b c d; ...` groups of four numbers.
fn quads(section: &str, key: &str, raw: &str) -> Result<Vec<[f64; 4]>> {
    raw.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|group| {
            let v: Vec<f64> = group
                .split_whitespace()
                .map(|s| real(section, key, s))
                .collect::<Result<_>>()?;
            <[f64; 4]>::try_from(v).map_err(|_| field_err(section, key, format!("`{group}` needs four numbers")))
        })
        .collect()
}

/// Parse and validate a config. Coefficient validity is checked separately
/// by [`SimConfig::coefficients`].
pub fn parse_config(text: &str) -> Result<SimConfig> {
    let mut cfg = SimConfig::with_coefficients([0.0; 6]);
    let mut section: Option<String> = None;
    let mut seen = BTreeSet::new();
    let mut have_coefficients = false;
    for (i, raw_line) in text.lines().enumerate() {
        let line_no = i + 1;
        let syntax = |message: String| Error::ConfigSyntax { line: line_no, message };
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| syntax(format!("unterminated section header `{line}`")))?
                .trim();
            if !SECTIONS.contains(&name) {
                return Err(syntax(format!("unknown section `[{name}]`")));
            }
            section = Some(name.to_string());
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| syntax(format!("expected `key = value`, found `{line}`")))?;
        let (key, value) = (key.trim(), value.trim());
        let sec = section
            .as_deref()
            .ok_or_else(|| syntax(format!("`{key}` appears before any section header")))?;
        if key.is_empty() {
            return Err(syntax("empty key".into()));
        }
        if !seen.insert(format!("{sec}.{key}")) {
            return Err(syntax(format!("duplicate key `{key}` in [{sec}]")));
        }
        let unknown = || syntax(format!("unknown key `{key}` in [{sec}]"));
        match (sec, key) {
            ("grid", "n") => cfg.grid.n = scalar(sec, key, value, "a positive integer")?,
            ("grid", "length") => cfg.grid.length = real(sec, key, value)?,
            ("coefficients", "mu") => {
                let v = reals(sec, key, value, ',')?;
                cfg.coefficients =
                    <[f64; 6]>::try_from(v).map_err(|_| field_err(sec, key, "expected six comma-separated values"))?;
                have_coefficients = true;
            }
            ("time", "dt") => cfg.time.dt = real(sec, key, value)?,
            ("time", "steps") => cfg.time.steps = scalar(sec, key, value, "a step count")?,
            ("time", "snapshot_every") => cfg.time.snapshot_every = scalar(sec, key, value, "a step count")?,
            ("time", "ledger_every") => cfg.time.ledger_every = scalar(sec, key, value, "a step count")?,
            ("time", "cfl_guard") => cfg.time.cfl_guard = real(sec, key, value)?,
            ("time", "dealias") => cfg.time.dealias = boolean(sec, key, value)?,
            ("mode", "mode") => cfg.mode.name = value.to_string(),
            ("mode", "epsilon") => cfg.mode.epsilon = real(sec, key, value)?,
            ("initial", "preset") => cfg.initial.preset = value.to_string(),
            ("initial", _) => {
                cfg.initial.params.insert(key.to_string(), value.to_string());
            }
            ("diagnostics", "concentration_radii") => {
                cfg.diagnostics.concentration_radii = reals(sec, key, value, ',')?
            }
            ("diagnostics", "threshold") => cfg.diagnostics.threshold = real(sec, key, value)?,
            ("diagnostics", "flag_tol") => cfg.diagnostics.flag_tol = real(sec, key, value)?,
            ("diagnostics", "scan_every") => cfg.diagnostics.scan_every = scalar(sec, key, value, "a step count")?,
            ("diagnostics", "phi_probes") => {
                cfg.diagnostics.phi_probes = quads(sec, key, value)?
                    .into_iter()
                    .map(|[x, y, t0, r]| PhiProbe { center: (x, y), t0, r })
                    .collect()
            }
            ("diagnostics", "local_windows") => {
                cfg.diagnostics.local_windows = quads(sec, key, value)?
                    .into_iter()
                    .map(|[x, y, inner, outer]| LocalWindow {
                        center: (x, y),
                        inner,
                        outer,
                    })
                    .collect()
            }
            ("diagnostics", "c_audit") => cfg.diagnostics.c_audit = real(sec, key, value)?,
            ("output", "dir") => cfg.output.dir = PathBuf::from(value),
            _ => return Err(unknown()),
        }
    }
    if !have_coefficients {
        return Err(field_err("coefficients", "mu", "required"));
    }
    cfg.validate()?;
    Ok(cfg)
}

fn join(v: impl IntoIterator<Item = f64>, sep: &str) -> String {
    v.into_iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(sep)
}

/// Text form accepted by [`parse_config`]; floats use their shortest exact
/// representation so the round trip is lossless.
pub fn serialize_config(cfg: &SimConfig) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "[grid]\nn = {}\nlength = {:?}\n", cfg.grid.n, cfg.grid.length);
    let _ = writeln!(s, "[coefficients]\nmu = {}\n", join(cfg.coefficients, ", "));
    let t = &cfg.time;
    let _ = writeln!(
        s,
        "[time]\ndt = {:?}\nsteps = {}\nsnapshot_every = {}\nledger_every = {}\ncfl_guard = {:?}\ndealias = {}\n",
        t.dt, t.steps, t.snapshot_every, t.ledger_every, t.cfl_guard, t.dealias
    );
    let _ = writeln!(
        s,
        "[mode]\nmode = {}\nepsilon = {:?}\n",
        cfg.mode.name, cfg.mode.epsilon
    );
    let _ = writeln!(s, "[initial]\npreset = {}", cfg.initial.preset);
    for (k, v) in &cfg.initial.params {
        let _ = writeln!(s, "{k} = {v}");
    }
    let d = &cfg.diagnostics;
    let _ = writeln!(s, "\n[diagnostics]");
    if !d.concentration_radii.is_empty() {
        let _ = writeln!(
            s,
            "concentration_radii = {}",
            join(d.concentration_radii.iter().copied(), ", ")
        );
    }
    let _ = writeln!(
        s,
        "threshold = {:?}\nflag_tol = {:?}\nscan_every = {}\nc_audit = {:?}",
        d.threshold, d.flag_tol, d.scan_every, d.c_audit
    );
    if !d.phi_probes.is_empty() {
        let groups: Vec<String> = d
            .phi_probes
            .iter()
            .map(|p| join([p.center.0, p.center.1, p.t0, p.r], " "))
            .collect();
        let _ = writeln!(s, "phi_probes = {}", groups.join("; "));
    }
    if !d.local_windows.is_empty() {
        let groups: Vec<String> = d
            .local_windows
            .iter()
            .map(|w| join([w.center.0, w.center.1, w.inner, w.outer], " "))
            .collect();
        let _ = writeln!(s, "local_windows = {}", groups.join("; "));
    }
    let _ = writeln!(s, "\n[output]\ndir = {}", cfg.output.dir.display());
    s
}
