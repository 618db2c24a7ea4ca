//! Flat `key = value` run configuration shared by every subcommand.

use std::fmt::Write as _;
use std::path::PathBuf;

use delaychain::classify::Hyper;
use delaychain::neuro::SimConfig;
use delaychain::pipeline::PipelineConfig;
use delaychain::readout::RateSchedule;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dataset: Option<PathBuf>,
    pub dataset_name: String,
    pub classes: usize,
    pub header: bool,
    pub pipeline: PipelineConfig,
    /// Seed for sampling, splitting and classifier initialisation.
    pub seed: u64,
    pub out: PathBuf,
    /// Row of the dataset used by `encode` and for the rasters of `run`.
    pub signal_index: usize,
    /// Times the selected beat is played back to back for the `run` rasters.
    pub repeat: usize,
    pub per_class: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dataset: None,
            dataset_name: String::new(),
            classes: 2,
            header: false,
            pipeline: PipelineConfig::default(),
            seed: 0,
            out: PathBuf::from("out"),
            signal_index: 0,
            repeat: 1,
            per_class: 500,
        }
    }
}

fn list(values: &[f64]) -> String {
    values.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>, CliError> {
    value
        .split(',')
        .map(|v| parse_num(key, v.trim()))
        .collect()
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Usage(format!("{key}: cannot parse {value:?}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, CliError> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(CliError::Usage(format!("{key}: expected true or false, got {value:?}"))),
    }
}

impl RunConfig {
    /// Apply one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let p = &mut self.pipeline;
        match key {
            "dataset" => self.dataset = (!value.is_empty()).then(|| PathBuf::from(value)),
            "dataset_name" => self.dataset_name = value.to_string(),
            "classes" => self.classes = parse_num(key, value)?,
            "header" => self.header = parse_bool(key, value)?,
            "thresholds" => p.thresholds = parse_list(key, value)?,
            "steps" => p.steps = parse_num(key, value)?,
            "pool_size" => p.pool_size = parse_num(key, value)?,
            "cv" => p.cv = parse_num(key, value)?,
            "mismatch_seed" => p.mismatch_seed = parse_num(key, value)?,
            "dt" => p.sim.dt = parse_num(key, value)?,
            "duration" => p.sim.duration = parse_num(key, value)?,
            "window" => p.schedule.window = parse_num(key, value)?,
            "snapshots" => p.schedule.snapshot_times = parse_list(key, value)?,
            "auto_schedule" => p.auto_schedule = parse_bool(key, value)?,
            "interpolate" => p.interpolate = parse_bool(key, value)?,
            "learning_rate" => p.hyper.learning_rate = parse_num(key, value)?,
            "epochs" => p.hyper.epochs = parse_num(key, value)?,
            "l2" => p.hyper.l2 = parse_num(key, value)?,
            "init_scale" => p.hyper.init_scale = parse_num(key, value)?,
            "sample_total" => p.sample_total = parse_num(key, value)?,
            "train_fraction" => p.train_fraction = parse_num(key, value)?,
            "jobs" => p.jobs = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "out" => self.out = PathBuf::from(value),
            "signal_index" => self.signal_index = parse_num(key, value)?,
            "repeat" => self.repeat = parse_num(key, value)?,
            "per_class" => self.per_class = parse_num(key, value)?,
            _ => return Err(CliError::Usage(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }

    /// Parse a config file; blank lines and lines starting with `#` are ignored.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", n + 1)))?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    pub fn serialize(&self) -> String {
        let p = &self.pipeline;
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv(
            "dataset",
            self.dataset.as_ref().map(|d| d.display().to_string()).unwrap_or_default(),
        );
        kv("dataset_name", self.dataset_name.clone());
        kv("classes", self.classes.to_string());
        kv("header", self.header.to_string());
        kv("thresholds", list(&p.thresholds));
        kv("steps", p.steps.to_string());
        kv("pool_size", p.pool_size.to_string());
        kv("cv", p.cv.to_string());
        kv("mismatch_seed", p.mismatch_seed.to_string());
        kv("dt", p.sim.dt.to_string());
        kv("duration", p.sim.duration.to_string());
        kv("window", p.schedule.window.to_string());
        kv("snapshots", list(&p.schedule.snapshot_times));
        kv("auto_schedule", p.auto_schedule.to_string());
        kv("interpolate", p.interpolate.to_string());
        kv("learning_rate", p.hyper.learning_rate.to_string());
        kv("epochs", p.hyper.epochs.to_string());
        kv("l2", p.hyper.l2.to_string());
        kv("init_scale", p.hyper.init_scale.to_string());
        kv("sample_total", p.sample_total.to_string());
        kv("train_fraction", p.train_fraction.to_string());
        kv("jobs", p.jobs.to_string());
        kv("seed", self.seed.to_string());
        kv("out", self.out.display().to_string());
        kv("signal_index", self.signal_index.to_string());
        kv("repeat", self.repeat.to_string());
        kv("per_class", self.per_class.to_string());
        s
    }

    /// Check every component's invariants before any work starts.
    pub fn validate(&self) -> Result<(), CliError> {
        let usage = |e: delaychain::Error| CliError::Usage(e.to_string());
        self.pipeline.validate().map_err(usage)?;
        SimConfig::new(self.pipeline.sim.dt, self.pipeline.sim.duration).map_err(usage)?;
        RateSchedule::new(
            self.pipeline.schedule.window,
            self.pipeline.schedule.snapshot_times.clone(),
        )
        .map_err(usage)?;
        Hyper {
            seed: self.seed,
            ..self.pipeline.hyper
        }
        .validate()
        .map_err(usage)?;
        if self.pipeline.pool_size > delaychain::chain::CORE_SIZE {
            return Err(CliError::Usage(format!(
                "pool_size {} exceeds the {} neurons of one core",
                self.pipeline.pool_size,
                delaychain::chain::CORE_SIZE
            )));
        }
        if self.classes == 0 {
            return Err(CliError::Usage("classes must be >= 1".into()));
        }
        if self.repeat == 0 {
            return Err(CliError::Usage("repeat must be >= 1".into()));
        }
        Ok(())
    }
}
