//! Sweep engines, figure presets and the oracle-verification run, all
//! emitting deterministic CSV: `# key = value` metadata lines, a header row,
//! then one row per grid point with every float at full precision.

use std::fs;
use std::io::Write;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use twpa_lab::distributed::{DecayProfile, DistributedConfig};
use twpa_lab::lumped::{LossAsymmetry, LumpedConfig};
use twpa_lab::oracle::{moment_distance, ChainSpec, Stepping};
use twpa_lab::qubit::{liouvillian, steady_state, BathParams};
use twpa_lab::Error;

use crate::config::{CliError, Experiment, Mode, Preset, Result, Scale, SweepRange};

/// Segment count for oracle verification; measured to keep the worst
/// deviation a factor of a few under the tolerance.
const ORACLE_SEGMENTS: usize = 1 << 17;
const ORACLE_TOLERANCE: f64 = 1e-6;
const ORACLE_CONFIGS: usize = 50;
const ORACLE_SEED: u64 = 7;

pub fn execute(experiment: &Experiment) -> Result<()> {
    let table = match experiment.mode {
        Mode::LumpedSweep => lumped_sweep(experiment)?,
        Mode::DistributedSweep => distributed_sweep(experiment)?,
        Mode::QubitSweep => qubit_sweep(experiment)?,
        Mode::Preset => preset_table(experiment.preset.expect("validated by the parser"))?,
        Mode::VerifyOracle => return verify_oracle(experiment),
    };
    table.write(experiment)
}

struct Table {
    metadata: Vec<(String, String)>,
    header: Vec<String>,
    rows: Vec<Vec<f64>>,
}

fn float(value: f64) -> String {
    format!("{value:.16e}")
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Table {
            metadata: Vec::new(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn note(&mut self, key: &str, value: impl Into<String>) {
        self.metadata.push((key.to_string(), value.into()));
    }

    fn note_float(&mut self, key: &str, value: f64) {
        self.note(key, float(value));
    }

    fn render(&self) -> String {
        let mut text = String::new();
        for (key, value) in &self.metadata {
            text.push_str(&format!("# {key} = {value}\n"));
        }
        text.push_str(&self.header.join(","));
        text.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| float(v)).collect();
            text.push_str(&cells.join(","));
            text.push('\n');
        }
        text
    }

    fn write(&self, experiment: &Experiment) -> Result<()> {
        let text = self.render();
        match &experiment.out {
            Some(path) => fs::write(path, text)?,
            None => std::io::stdout().lock().write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

/// Runs `point` over the grid in parallel, keeping grid order.
fn fill<F>(table: &mut Table, grid: &[f64], point: F) -> Result<()>
where
    F: Fn(f64) -> Result<Vec<f64>> + Sync,
{
    let rows: Vec<Result<Vec<f64>>> = grid
        .par_iter()
        .map(|&x| {
            point(x).map(|mut row| {
                row.insert(0, x);
                row
            })
        })
        .collect();
    table.rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(())
}

/// The swept range, after checking it names a parameter the mode can sweep
/// and does not collide with a fixed value.
fn sweep_plan<'a>(
    experiment: &'a Experiment,
    mode: &str,
    allowed: &[&str],
) -> Result<&'a SweepRange> {
    let sweep = experiment
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Parse(format!("mode = {mode} needs a 'sweep' key")))?;
    if !allowed.contains(&sweep.key.as_str()) {
        return Err(CliError::Parse(format!(
            "mode = {mode} cannot sweep '{}' (one of: {})",
            sweep.key,
            allowed.join(", ")
        )));
    }
    if experiment.fixed.contains_key(&sweep.key) {
        return Err(CliError::Parse(format!(
            "'{}' is both swept and fixed to a value",
            sweep.key
        )));
    }
    Ok(sweep)
}

fn describe_sweep(table: &mut Table, experiment: &Experiment, sweep: &SweepRange) {
    table.note("sweep", sweep.key.clone());
    table.note_float("start", sweep.start);
    table.note_float("stop", sweep.stop);
    table.note("count", sweep.count.to_string());
    table.note(
        "scale",
        if sweep.scale == Scale::Log {
            "log"
        } else {
            "linear"
        },
    );
    for (key, value) in &experiment.fixed {
        table.note_float(key, *value);
    }
}

/// Parameter resolver for one grid point: the swept key takes the grid
/// value, everything else comes from the fixed table or the mode's default.
struct Point<'a> {
    experiment: &'a Experiment,
    sweep_key: &'a str,
    x: f64,
}

impl Point<'_> {
    fn get(&self, key: &str, default: f64) -> f64 {
        if key == self.sweep_key {
            self.x
        } else {
            self.experiment.fixed_or(key, default)
        }
    }

    fn get_required(&self, key: &str) -> Result<f64> {
        if key == self.sweep_key {
            Ok(self.x)
        } else {
            self.experiment.required(key)
        }
    }
}

fn lumped_state(r: f64, eps_bar: f64, delta: f64) -> Result<LumpedConfig> {
    Ok(LumpedConfig::from_asymmetry(
        r,
        LossAsymmetry::new(eps_bar, delta)?,
    )?)
}

fn lumped_sweep(experiment: &Experiment) -> Result<Table> {
    let sweep = sweep_plan(experiment, "lumped-sweep", &["r", "eps_bar", "delta"])?;
    // Require the squeeze strength explicitly; loss defaults to none.
    if sweep.key != "r" {
        experiment.required("r")?;
    }
    let mut table = Table::new(&[
        &sweep.key,
        "s_balanced",
        "s_matched",
        "s_corrected",
        "log_negativity",
        "nbar_sum",
    ]);
    table.note("mode", "lumped-sweep");
    describe_sweep(&mut table, experiment, sweep);

    fill(&mut table, &sweep.values(), |x| {
        let point = Point {
            experiment,
            sweep_key: &sweep.key,
            x,
        };
        let config = lumped_state(
            point.get_required("r")?,
            point.get("eps_bar", 0.0),
            point.get("delta", 0.0),
        )?;
        let normal = config.output_moments().to_th_tmss()?;
        Ok(vec![
            config.squeezing(),
            config.matched_quadrature_variance(),
            config.corrected()?.squeezing,
            normal.log_negativity(),
            normal.nbar_signal + normal.nbar_idler,
        ])
    })?;
    Ok(table)
}

fn distributed_line(point: &Point<'_>) -> Result<DistributedConfig> {
    Ok(DistributedConfig::new(
        point.get_required("nu")?,
        point.get("v", 1.0),
        point.get_required("length")?,
        DecayProfile::Constant(point.get("kappa_signal", 0.0)),
        DecayProfile::Constant(point.get("kappa_idler", 0.0)),
        point.get("delta_k", 0.0),
    )?)
}

/// Quantities that are undefined at some grid points (noise figure of a net
/// attenuator, the correction protocol off phase matching) render as NaN
/// rather than aborting the sweep.
fn distributed_row(config: &DistributedConfig) -> Result<Vec<f64>> {
    let added_noise = match config.added_noise() {
        Ok(value) => value,
        Err(Error::SubunityGain(_)) => f64::NAN,
        Err(err) => return Err(err.into()),
    };
    let corrected = if config.delta_k == 0.0 {
        config.corrected()?.squeezing
    } else {
        f64::NAN
    };
    Ok(vec![
        config.gain()?,
        added_noise,
        config.squeezing()?,
        corrected,
    ])
}

fn distributed_sweep(experiment: &Experiment) -> Result<Table> {
    let sweep = sweep_plan(
        experiment,
        "distributed-sweep",
        &["length", "nu", "kappa_signal", "kappa_idler", "delta_k"],
    )?;
    for key in ["nu", "length"] {
        if sweep.key != key {
            experiment.required(key)?;
        }
    }
    let mut table = Table::new(&[
        &sweep.key,
        "gain",
        "added_noise",
        "s_balanced",
        "s_corrected",
    ]);
    table.note("mode", "distributed-sweep");
    describe_sweep(&mut table, experiment, sweep);

    fill(&mut table, &sweep.values(), |x| {
        let point = Point {
            experiment,
            sweep_key: &sweep.key,
            x,
        };
        distributed_row(&distributed_line(&point)?)
    })?;
    Ok(table)
}

fn qubit_metrics(r: f64, eps_bar: f64, delta: f64) -> Result<(f64, f64)> {
    let bath = BathParams::from_lumped(&lumped_state(r, eps_bar, delta)?);
    let state = steady_state(&liouvillian(&bath))?;
    Ok((state.concurrence(), state.purity()))
}

fn qubit_sweep(experiment: &Experiment) -> Result<Table> {
    let sweep = sweep_plan(experiment, "qubit-sweep", &["r", "eps_bar", "delta"])?;
    if sweep.key != "r" {
        experiment.required("r")?;
    }
    let mut table = Table::new(&[&sweep.key, "concurrence", "purity"]);
    table.note("mode", "qubit-sweep");
    describe_sweep(&mut table, experiment, sweep);

    fill(&mut table, &sweep.values(), |x| {
        let point = Point {
            experiment,
            sweep_key: &sweep.key,
            x,
        };
        let (concurrence, purity) = qubit_metrics(
            point.get_required("r")?,
            point.get("eps_bar", 0.0),
            point.get("delta", 0.0),
        )?;
        Ok(vec![concurrence, purity])
    })?;
    Ok(table)
}

fn grid(start: f64, stop: f64, count: usize, scale: Scale) -> Vec<f64> {
    SweepRange {
        key: String::new(),
        start,
        stop,
        count,
        scale,
    }
    .values()
}

fn preset_table(preset: Preset) -> Result<Table> {
    let mut table = match preset {
        Preset::Fig2 => {
            // Normal-form heating and squeeze strength of the 20 dB
            // amplifier, balanced against fully one-sided loss.
            let r = 3.0;
            let mut table = Table::new(&["eps_bar", "nsum_sym", "nsum_asym", "R_sym", "R_asym"]);
            table.note_float("r", r);
            table.note_float("crossover_eps_bar", (-2.0 * r).exp());
            fill(&mut table, &grid(1e-4, 0.2, 200, Scale::Log), |eps_bar| {
                let sym = lumped_state(r, eps_bar, 0.0)?
                    .output_moments()
                    .to_th_tmss()?;
                let asym = lumped_state(r, eps_bar, 1.0)?
                    .output_moments()
                    .to_th_tmss()?;
                Ok(vec![
                    sym.nbar_signal + sym.nbar_idler,
                    asym.nbar_signal + asym.nbar_idler,
                    sym.squeeze,
                    asym.squeeze,
                ])
            })?;
            table
        }
        Preset::Fig3 => {
            // Squeezing vs loss at 17 dB: balanced, fully one-sided, and
            // one-sided with the attenuation correction.
            let r = 2.65;
            let mut table = Table::new(&["eps_bar", "S_sym", "S_asym", "S_corrected"]);
            table.note_float("r", r);
            table.note(
                "note",
                "eps_bar stops at 0.5 where delta = 1 uses up the signal channel",
            );
            fill(&mut table, &grid(1e-4, 0.5, 200, Scale::Log), |eps_bar| {
                let sym = lumped_state(r, eps_bar, 0.0)?;
                let asym = lumped_state(r, eps_bar, 1.0)?;
                Ok(vec![
                    sym.squeezing(),
                    asym.squeezing(),
                    asym.corrected()?.squeezing,
                ])
            })?;
            table
        }
        Preset::Fig4 => {
            // Balanced vs loss-matched quadrature under one-sided loss.
            let r = 2.65;
            let mut table = Table::new(&["eps_bar", "S_balanced", "S_matched"]);
            table.note_float("r", r);
            table.note_float("delta", 1.0);
            table.note(
                "note",
                "eps_bar stops at 0.5 where delta = 1 uses up the signal channel",
            );
            fill(&mut table, &grid(1e-4, 0.5, 200, Scale::Log), |eps_bar| {
                let config = lumped_state(r, eps_bar, 1.0)?;
                Ok(vec![
                    config.squeezing(),
                    config.matched_quadrature_variance(),
                ])
            })?;
            table
        }
        Preset::Fig5 => {
            let (eps_bar, delta) = (0.05, 0.0);
            let mut table = Table::new(&["r", "concurrence", "purity"]);
            table.note_float("eps_bar", eps_bar);
            table.note_float("delta", delta);
            fill(&mut table, &grid(0.05, 4.0, 100, Scale::Linear), |r| {
                let (concurrence, purity) = qubit_metrics(r, eps_bar, delta)?;
                Ok(vec![concurrence, purity])
            })?;
            table
        }
        Preset::Fig6 => {
            let eps_bar = 0.05;
            let mut table = Table::new(&[
                "r",
                "concurrence_delta_0",
                "concurrence_delta_05",
                "concurrence_delta_1",
            ]);
            table.note_float("eps_bar", eps_bar);
            fill(&mut table, &grid(0.05, 4.0, 100, Scale::Linear), |r| {
                Ok(vec![
                    qubit_metrics(r, eps_bar, 0.0)?.0,
                    qubit_metrics(r, eps_bar, 0.5)?.0,
                    qubit_metrics(r, eps_bar, 1.0)?.0,
                ])
            })?;
            table
        }
        Preset::Fig7 => {
            // Squeezing vs ideal gain for the distributed line: clean,
            // balanced loss, asymmetric loss, and asymmetric-corrected.
            let (nu, v, kbar, eps) = (1.0, 1.0, 0.2, 0.1);
            let mut table =
                Table::new(&["ideal_gain_dB", "S_sym", "S_asym", "S_ideal", "S_corrected"]);
            table.note_float("nu", nu);
            table.note_float("v", v);
            table.note_float("kappa_mean", kbar);
            table.note_float("kappa_half_split", eps);
            fill(&mut table, &grid(0.02, 4.5, 250, Scale::Linear), |length| {
                let clean = DistributedConfig::uniform(nu, v, length, 0.0, 0.0)?;
                let sym = DistributedConfig::symmetric(nu, v, length, kbar)?;
                let asym = DistributedConfig::uniform(nu, v, length, kbar + eps, kbar - eps)?;
                Ok(vec![
                    sym.squeezing()?,
                    asym.squeezing()?,
                    clean.squeezing()?,
                    asym.corrected()?.squeezing,
                ])
            })?;
            // The natural x axis is the clean gain the same length would
            // give, not the length itself.
            for row in &mut table.rows {
                let length = row[0];
                row[0] = 10.0
                    * DistributedConfig::uniform(nu, v, length, 0.0, 0.0)?
                        .ideal_gain()
                        .log10();
            }
            table
        }
    };
    table
        .metadata
        .insert(0, ("preset".to_string(), preset.name().to_string()));
    table
        .metadata
        .insert(0, ("mode".to_string(), "preset".to_string()));
    Ok(table)
}

fn verify_oracle(experiment: &Experiment) -> Result<()> {
    if experiment.sweep.is_some() || !experiment.fixed.is_empty() {
        return Err(CliError::Parse(
            "mode = verify-oracle takes no sweep or model parameters".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(ORACLE_SEED);
    let configs: Vec<DistributedConfig> = (0..ORACLE_CONFIGS)
        .map(|_| {
            let length = rng.random_range(0.1..5.0);
            let kappa_signal = rng.random_range(0.0..0.5);
            let kappa_idler = rng.random_range(0.0..0.5);
            let delta_k = rng.random_range(0.0..0.5);
            DistributedConfig::new(
                1.0,
                1.0,
                length,
                DecayProfile::Constant(kappa_signal),
                DecayProfile::Constant(kappa_idler),
                delta_k,
            )
            .expect("sampled within the valid domain")
        })
        .collect();

    let deviations: Vec<Result<f64>> = configs
        .par_iter()
        .map(|config| {
            let closed = config.output_moments()?;
            let chain =
                ChainSpec::new(config.clone(), ORACLE_SEGMENTS, Stepping::Strang)?.propagate();
            Ok(moment_distance(&chain, &closed))
        })
        .collect();
    let deviations = deviations.into_iter().collect::<Result<Vec<f64>>>()?;

    let mut table = Table::new(&[
        "index",
        "length",
        "kappa_signal",
        "kappa_idler",
        "delta_k",
        "deviation",
    ]);
    table.note("mode", "verify-oracle");
    table.note("segments", ORACLE_SEGMENTS.to_string());
    table.note_float("tolerance", ORACLE_TOLERANCE);
    let mut worst = 0.0_f64;
    for (index, (config, &deviation)) in configs.iter().zip(&deviations).enumerate() {
        worst = worst.max(deviation);
        println!(
            "config {index:02}: length = {:.4}, kappas = ({:.4}, {:.4}), delta_k = {:.4} \
             -> deviation {deviation:.3e}",
            config.length,
            config.kappa_signal.as_constant().unwrap(),
            config.kappa_idler.as_constant().unwrap(),
            config.delta_k,
        );
        table.rows.push(vec![
            index as f64,
            config.length,
            config.kappa_signal.as_constant().unwrap(),
            config.kappa_idler.as_constant().unwrap(),
            config.delta_k,
            deviation,
        ]);
    }
    println!(
        "worst deviation {worst:.3e} over {ORACLE_CONFIGS} configs (tolerance {ORACLE_TOLERANCE:.0e})"
    );
    if let Some(path) = &experiment.out {
        fs::write(path, table.render())?;
    }
    if worst > ORACLE_TOLERANCE {
        return Err(CliError::OracleMismatch {
            worst,
            tolerance: ORACLE_TOLERANCE,
        });
    }
    Ok(())
}
