//! Flat `key = value` experiment configs and their validation.
//!
//! The format is one assignment per line with `#` comments. Parsing keeps
//! line numbers so diagnostics point at the offending field; semantic
//! violations (a parameter outside its model's domain) are reported
//! separately from syntax so the two map to different exit codes.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

/// Failure modes of the front end, ordered by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable flags or config text (exit 2).
    Parse(String),
    /// Well-formed config asking for something outside the model's domain
    /// (exit 3).
    Domain(String),
    /// Reference-chain verification exceeded its tolerance (exit 4).
    OracleMismatch { worst: f64, tolerance: f64 },
    /// Filesystem trouble writing results (exit 1).
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Domain(_) => 3,
            CliError::OracleMismatch { .. } => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(msg) => write!(f, "config error: {msg}"),
            CliError::Domain(msg) => write!(f, "domain error: {msg}"),
            CliError::OracleMismatch { worst, tolerance } => write!(
                f,
                "oracle verification failed: worst deviation {worst:.3e} exceeds {tolerance:.0e}"
            ),
            CliError::Io(err) => write!(f, "io error: {err}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Io(err)
    }
}

impl From<twpa_lab::Error> for CliError {
    fn from(err: twpa_lab::Error) -> Self {
        CliError::Domain(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    LumpedSweep,
    DistributedSweep,
    QubitSweep,
    VerifyOracle,
    Preset,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "lumped-sweep" => Ok(Mode::LumpedSweep),
            "distributed-sweep" => Ok(Mode::DistributedSweep),
            "qubit-sweep" => Ok(Mode::QubitSweep),
            "verify-oracle" => Ok(Mode::VerifyOracle),
            "preset" => Ok(Mode::Preset),
            other => Err(format!(
                "unknown mode '{other}' (expected lumped-sweep, distributed-sweep, \
                 qubit-sweep, verify-oracle or preset)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
}

impl Preset {
    /// Unknown preset names are a domain error, not a syntax error: the line
    /// parses fine but asks for a figure that does not exist.
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "fig2" => Ok(Preset::Fig2),
            "fig3" => Ok(Preset::Fig3),
            "fig4" => Ok(Preset::Fig4),
            "fig5" => Ok(Preset::Fig5),
            "fig6" => Ok(Preset::Fig6),
            "fig7" => Ok(Preset::Fig7),
            other => Err(CliError::Domain(format!(
                "unknown preset '{other}' (fig2..fig7)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
            Preset::Fig6 => "fig6",
            Preset::Fig7 => "fig7",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

/// A swept parameter range, inclusive of both ends.
#[derive(Debug, Clone)]
pub struct SweepRange {
    pub key: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub scale: Scale,
}

impl SweepRange {
    pub fn values(&self) -> Vec<f64> {
        let step = 1.0 / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                let t = i as f64 * step;
                match self.scale {
                    Scale::Linear => self.start + (self.stop - self.start) * t,
                    Scale::Log => self.start * (self.stop / self.start).powf(t),
                }
            })
            .collect()
    }

    fn validate(&self) -> Result<()> {
        if self.count < 2 {
            return Err(CliError::Domain(format!(
                "sweep count must be at least 2, got {}",
                self.count
            )));
        }
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(CliError::Domain("sweep range must be finite".into()));
        }
        if self.scale == Scale::Log && (self.start <= 0.0 || self.stop <= 0.0) {
            return Err(CliError::Domain(format!(
                "log-scaled sweep needs positive endpoints, got [{}, {}]",
                self.start, self.stop
            )));
        }
        Ok(())
    }
}

/// Fully parsed experiment description.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub mode: Mode,
    pub preset: Option<Preset>,
    pub sweep: Option<SweepRange>,
    /// Fixed model parameters by key.
    pub fixed: BTreeMap<String, f64>,
    pub out: Option<PathBuf>,
}

impl Experiment {
    pub fn from_preset(preset: Preset) -> Self {
        Experiment {
            mode: Mode::Preset,
            preset: Some(preset),
            sweep: None,
            fixed: BTreeMap::new(),
            out: None,
        }
    }

    /// Fixed parameter with a default when the config omits it.
    pub fn fixed_or(&self, key: &str, default: f64) -> f64 {
        self.fixed.get(key).copied().unwrap_or(default)
    }

    /// Fixed parameter that the mode cannot run without.
    pub fn required(&self, key: &str) -> Result<f64> {
        self.fixed
            .get(key)
            .copied()
            .ok_or_else(|| CliError::Parse(format!("missing required key '{key}'")))
    }
}

/// One accepted line of the config file.
struct Assignment {
    value: String,
    line: usize,
    used: bool,
}

pub fn parse_experiment(text: &str) -> Result<Experiment> {
    let mut entries: BTreeMap<String, Assignment> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| {
            CliError::Parse(format!(
                "line {line}: expected 'key = value', got '{content}'"
            ))
        })?;
        let (key, value) = (key.trim().to_string(), value.trim().to_string());
        if key.is_empty() || value.is_empty() {
            return Err(CliError::Parse(format!("line {line}: empty key or value")));
        }
        if let Some(previous) = entries.get(&key) {
            return Err(CliError::Parse(format!(
                "line {line}: key '{key}' already set on line {}",
                previous.line
            )));
        }
        entries.insert(
            key,
            Assignment {
                value,
                line,
                used: false,
            },
        );
    }

    let mut take = |key: &str| -> Option<(String, usize)> {
        entries.get_mut(key).map(|entry| {
            entry.used = true;
            (entry.value.clone(), entry.line)
        })
    };

    let (mode_text, mode_line) =
        take("mode").ok_or_else(|| CliError::Parse("missing required key 'mode'".into()))?;
    let mode = Mode::from_str(&mode_text)
        .map_err(|msg| CliError::Parse(format!("line {mode_line}: {msg}")))?;

    let preset = match take("preset") {
        Some((name, _)) => Some(Preset::parse(&name)?),
        None => None,
    };
    if mode == Mode::Preset && preset.is_none() {
        return Err(CliError::Parse("mode = preset needs a 'preset' key".into()));
    }

    let out = take("out").map(|(path, _)| PathBuf::from(path));

    let sweep = match take("sweep") {
        Some((key, _)) => {
            let mut number = |name: &str| -> Result<(f64, usize)> {
                let (text, line) = take(name).ok_or_else(|| {
                    CliError::Parse(format!("sweep over '{key}' needs key '{name}'"))
                })?;
                let value = text.parse::<f64>().map_err(|_| {
                    CliError::Parse(format!("line {line}: '{name}' is not a number: '{text}'"))
                })?;
                Ok((value, line))
            };
            let (start, _) = number("start")?;
            let (stop, _) = number("stop")?;
            let (count_value, count_line) = number("count")?;
            if count_value.fract() != 0.0 || count_value < 0.0 {
                return Err(CliError::Parse(format!(
                    "line {count_line}: 'count' must be a nonnegative integer"
                )));
            }
            let scale = match take("scale") {
                None => Scale::Linear,
                Some((text, line)) => match text.as_str() {
                    "linear" => Scale::Linear,
                    "log" => Scale::Log,
                    other => {
                        return Err(CliError::Parse(format!(
                            "line {line}: unknown scale '{other}' (linear or log)"
                        )))
                    }
                },
            };
            let range = SweepRange {
                key,
                start,
                stop,
                count: count_value as usize,
                scale,
            };
            range.validate()?;
            Some(range)
        }
        None => None,
    };

    let mut fixed = BTreeMap::new();
    for (key, entry) in entries.iter_mut() {
        if entry.used {
            continue;
        }
        let value = entry.value.parse::<f64>().map_err(|_| {
            CliError::Parse(format!(
                "line {}: '{key}' is not a number: '{}'",
                entry.line, entry.value
            ))
        })?;
        if !KNOWN_PARAMETERS.contains(&key.as_str()) {
            return Err(CliError::Parse(format!(
                "line {}: unknown key '{key}'",
                entry.line
            )));
        }
        fixed.insert(key.clone(), value);
    }

    Ok(Experiment {
        mode,
        preset,
        sweep,
        fixed,
        out,
    })
}

/// Model parameters accepted as fixed values (swept keys come from the same
/// set, checked per mode by the runners).
const KNOWN_PARAMETERS: [&str; 9] = [
    "r",
    "eps_bar",
    "delta",
    "nu",
    "v",
    "length",
    "kappa_signal",
    "kappa_idler",
    "delta_k",
];
