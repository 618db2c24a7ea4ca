//! Parallel delay chains: pool calibration, delay-matched neuron selection, network wiring
//! and whole-network simulation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::neuro::{
    measure_delay, measure_f_curve, sample_mismatch, Kernel, MismatchModel, NeuronParams,
    NeuronState, SimConfig,
};
use crate::spikes::{fmt_sig9, Channel, Polarity, SpikeTrain};

/// Neurons per core.
pub const CORE_SIZE: usize = 256;
/// Synaptic inputs per neuron.
pub const MAX_FAN_IN: usize = 64;
/// Output neurons live on the second core; their ids start here.
pub const OUTPUT_ID_BASE: u32 = CORE_SIZE as u32;
/// Rate a selected delay neuron must transfer one-to-one.
pub const MIN_ONE_TO_ONE_RATE: f64 = 20.0;
/// Input rates probed during pool calibration (Hz).
pub const CALIBRATION_RATES: [f64; 12] = [
    1.0, 2.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0, 45.0, 50.0,
];
/// Probe rate for pool delay calibration (Hz). Spikes along a chain mostly arrive
/// isolated, so the delay is measured on a sparse drive.
pub const CALIBRATION_PROBE_RATE: f64 = 2.0;
/// Largest lag error at which a first-neuron spike and a last-neuron spike still pair up.
pub const MATCH_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct NeuronRecord {
    pub id: u32,
    pub params: NeuronParams,
    pub measured_delay: Option<f64>,
    pub f_one_to_one_max: Option<f64>,
    /// (input rate, output rate) pairs at `CALIBRATION_RATES`.
    pub f_curve: Vec<(f64, f64)>,
}

impl NeuronRecord {
    pub fn is_usable(&self) -> bool {
        self.measured_delay.is_some()
            && self.f_one_to_one_max.is_some_and(|f| f >= MIN_ONE_TO_ONE_RATE)
    }
}

/// Draw `pool_size` mismatched neurons and measure each one's delay and rate transfer.
///
/// Fails when fewer than `required` neurons produce a delay measurement.
pub fn calibrate_pool(
    pool_size: usize,
    params: &NeuronParams,
    mm: &MismatchModel,
    sim: &SimConfig,
    required: usize,
) -> Result<Vec<NeuronRecord>> {
    params.validate()?;
    sim.validate()?;
    if pool_size > CORE_SIZE {
        return Err(Error::Capacity(format!(
            "pool of {pool_size} neurons exceeds one core ({CORE_SIZE})"
        )));
    }
    let records: Vec<NeuronRecord> = (0..pool_size as u32)
        .into_par_iter()
        .map(|id| {
            let p = sample_mismatch(params, mm, id);
            let measured_delay = measure_delay(&p, CALIBRATION_PROBE_RATE, sim).ok();
            let curve = measure_f_curve(&p, &CALIBRATION_RATES, sim)
                .expect("calibration rates are positive and ascending");
            NeuronRecord {
                id,
                params: p,
                measured_delay,
                f_one_to_one_max: curve.one_to_one_max,
                f_curve: curve.points,
            }
        })
        .collect();
    let usable = records.iter().filter(|r| r.measured_delay.is_some()).count();
    if usable < required {
        return Err(Error::PoolExhausted {
            usable,
            needed: required,
        });
    }
    Ok(records)
}

/// Neuron ids per chain, each listed from step 0 onwards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub chains: Vec<Vec<u32>>,
}

impl Assignment {
    pub fn steps(&self) -> usize {
        self.chains.first().map_or(0, Vec::len)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationReport {
    pub pool: Vec<NeuronRecord>,
    /// Mean measured delay across chains at each step (s).
    pub per_step_delay: Vec<f64>,
    /// Max minus min measured delay across chains at each step (s).
    pub per_step_spread: Vec<f64>,
    pub memory_span: f64,
    /// Measured delay of every assigned neuron, chains × steps.
    pub chain_delays: Vec<Vec<f64>>,
}

impl CalibrationReport {
    /// Calibrated delay accumulated from the input of step 0 to the output of `step`, per chain.
    pub fn cumulative_delay(&self, chain: usize, step: usize) -> f64 {
        self.chain_delays[chain][..=step].iter().sum()
    }

    /// Mean over chains of the calibrated delay from input to the output of `step`.
    pub fn mean_cumulative_delay(&self, step: usize) -> f64 {
        self.per_step_delay[..=step].iter().sum()
    }
}

fn group_spreads(sorted_delays: &[f64], chains: usize) -> Vec<f64> {
    sorted_delays
        .chunks(chains)
        .map(|g| g[g.len() - 1] - g[0])
        .collect()
}

/// Delay-matched selection: keep neurons that transfer one-to-one to 20 Hz, sort them by
/// delay, and cut the sorted list into `steps` consecutive groups of `chains` neurons,
/// group `k` populating step `k`. When the pool has spare neurons, the contiguous window
/// with the smallest worst-case spread is used.
///
/// Within a step the fastest neuron goes to the chain that has accumulated the most delay
/// so far, which keeps cumulative delays across chains close.
pub fn select_matched(
    records: &[NeuronRecord],
    chains: usize,
    steps: usize,
) -> Result<(Assignment, CalibrationReport)> {
    if chains == 0 || steps == 0 {
        return Err(Error::Validation("chains and steps must be >= 1".into()));
    }
    let needed = chains * steps;
    let mut usable: Vec<(f64, u32)> = records
        .iter()
        .filter(|r| r.is_usable())
        .map(|r| (r.measured_delay.expect("usable"), r.id))
        .collect();
    if usable.len() < needed {
        return Err(Error::PoolExhausted {
            usable: usable.len(),
            needed,
        });
    }
    usable.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let delays: Vec<f64> = usable.iter().map(|u| u.0).collect();

    let score = |start: usize| {
        let spreads = group_spreads(&delays[start..start + needed], chains);
        let worst = spreads.iter().copied().fold(0.0, f64::max);
        (worst, spreads.iter().sum::<f64>())
    };
    let best = (0..=usable.len() - needed)
        .min_by(|&a, &b| {
            let (sa, sb) = (score(a), score(b));
            sa.0.total_cmp(&sb.0).then(sa.1.total_cmp(&sb.1))
        })
        .expect("at least one window");
    let window = &usable[best..best + needed];

    let mut assignment = vec![Vec::with_capacity(steps); chains];
    let mut chain_delays = vec![Vec::with_capacity(steps); chains];
    let mut cumulative = vec![0.0f64; chains];
    for group in window.chunks(chains) {
        let mut order: Vec<usize> = (0..chains).collect();
        order.sort_by(|&a, &b| cumulative[b].total_cmp(&cumulative[a]).then(a.cmp(&b)));
        for (&(delay, id), &chain) in group.iter().zip(&order) {
            assignment[chain].push(id);
            chain_delays[chain].push(delay);
            cumulative[chain] += delay;
        }
    }

    let per_step_delay: Vec<f64> = (0..steps)
        .map(|k| chain_delays.iter().map(|c| c[k]).sum::<f64>() / chains as f64)
        .collect();
    let per_step_spread = group_spreads(&delays[best..best + needed], chains);
    let memory_span = per_step_delay.iter().sum();
    Ok((
        Assignment { chains: assignment },
        CalibrationReport {
            pool: records.to_vec(),
            per_step_delay,
            per_step_spread,
            memory_span,
            chain_delays,
        },
    ))
}

/// The wired network: chain `c` carries ADM channel `c` in `encode_bank` order.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSpec {
    pub thresholds: Vec<f64>,
    pub steps: usize,
    pub chains: Vec<Vec<u32>>,
    pub output_up: Vec<u32>,
    pub output_down: Vec<u32>,
    /// Readout weight per threshold index.
    pub readout_weights: Vec<f64>,
    pub output_params: NeuronParams,
    /// Parameters of every delay neuron, keyed by id.
    pub neuron_params: BTreeMap<u32, NeuronParams>,
}

/// ADM channel carried by chain `c`.
pub fn chain_channel(c: usize) -> Channel {
    let polarity = if c.is_multiple_of(2) {
        Polarity::Up
    } else {
        Polarity::Down
    };
    Channel::adm(c / 2, polarity)
}

fn check_capacity(chains: usize, steps: usize, thresholds: usize) -> Result<()> {
    if chains * steps > CORE_SIZE {
        return Err(Error::Build(format!(
            "{} delay neurons exceed one core ({CORE_SIZE})",
            chains * steps
        )));
    }
    if 2 * steps > CORE_SIZE {
        return Err(Error::Build(format!(
            "{} output neurons exceed one core ({CORE_SIZE})",
            2 * steps
        )));
    }
    if thresholds > MAX_FAN_IN {
        return Err(Error::Build(format!(
            "output fan-in {thresholds} exceeds {MAX_FAN_IN} inputs"
        )));
    }
    Ok(())
}

pub fn build_network(
    assignment: &Assignment,
    records: &[NeuronRecord],
    thresholds: &[f64],
    output_params: &NeuronParams,
    readout_weights: &[f64],
) -> Result<NetworkSpec> {
    let steps = assignment.steps();
    let chains = assignment.chains.len();
    if thresholds.is_empty() || steps == 0 {
        return Err(Error::Build("network needs at least one threshold and one step".into()));
    }
    check_capacity(chains, steps, thresholds.len())?;
    if chains != 2 * thresholds.len() {
        return Err(Error::Build(format!(
            "{chains} chains for {} thresholds; expected {}",
            thresholds.len(),
            2 * thresholds.len()
        )));
    }
    if assignment.chains.iter().any(|c| c.len() != steps) {
        return Err(Error::Build("chains differ in length".into()));
    }
    if readout_weights.len() != thresholds.len() {
        return Err(Error::Build(format!(
            "{} readout weights for {} thresholds",
            readout_weights.len(),
            thresholds.len()
        )));
    }
    output_params.validate()?;
    let by_id: BTreeMap<u32, &NeuronRecord> = records.iter().map(|r| (r.id, r)).collect();
    let mut seen = BTreeSet::new();
    let mut neuron_params = BTreeMap::new();
    for &id in assignment.chains.iter().flatten() {
        if !seen.insert(id) {
            return Err(Error::Build(format!("neuron {id} assigned twice")));
        }
        if id >= OUTPUT_ID_BASE {
            return Err(Error::Build(format!("delay neuron id {id} outside the delay core")));
        }
        let rec = by_id
            .get(&id)
            .ok_or_else(|| Error::Build(format!("no calibration record for neuron {id}")))?;
        neuron_params.insert(id, rec.params);
    }
    let steps_u32 = steps as u32;
    Ok(NetworkSpec {
        thresholds: thresholds.to_vec(),
        steps,
        chains: assignment.chains.clone(),
        output_up: (0..steps_u32).map(|k| OUTPUT_ID_BASE + k).collect(),
        output_down: (0..steps_u32).map(|k| OUTPUT_ID_BASE + steps_u32 + k).collect(),
        readout_weights: readout_weights.to_vec(),
        output_params: *output_params,
        neuron_params,
    })
}

impl NetworkSpec {
    pub fn chain_edges(&self) -> usize {
        self.chains.iter().map(|c| c.len().saturating_sub(1)).sum()
    }

    pub fn readout_edges(&self) -> usize {
        self.chains.iter().map(Vec::len).sum()
    }

    pub fn delay_neuron_count(&self) -> usize {
        self.chains.iter().map(Vec::len).sum()
    }

    /// Output neuron fed by step `k` of chain `c`.
    pub fn output_for(&self, c: usize, k: usize) -> u32 {
        match chain_channel(c) {
            Channel::Adm {
                polarity: Polarity::Up,
                ..
            } => self.output_up[k],
            _ => self.output_down[k],
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_capacity(self.chains.len(), self.steps, self.thresholds.len())?;
        if self.chains.len() != 2 * self.thresholds.len()
            || self.chains.iter().any(|c| c.len() != self.steps)
            || self.output_up.len() != self.steps
            || self.output_down.len() != self.steps
            || self.readout_weights.len() != self.thresholds.len()
        {
            return Err(Error::Build("inconsistent network dimensions".into()));
        }
        let mut seen = BTreeSet::new();
        for id in self
            .chains
            .iter()
            .flatten()
            .chain(&self.output_up)
            .chain(&self.output_down)
        {
            if !seen.insert(*id) {
                return Err(Error::Build(format!("neuron {id} used twice")));
            }
        }
        for id in self.chains.iter().flatten() {
            self.neuron_params
                .get(id)
                .ok_or_else(|| Error::Build(format!("missing parameters for neuron {id}")))?
                .validate()?;
        }
        self.output_params.validate()
    }

    /// Line-oriented `key = value` text that `from_text` reads back exactly.
    pub fn to_text(&self) -> String {
        let join = |xs: &mut dyn Iterator<Item = String>| xs.collect::<Vec<_>>().join(" ");
        let params = |p: &NeuronParams| {
            format!(
                "{} {} {} {} {} {}",
                p.tau_mem, p.tau_syn, p.v_threshold, p.v_reset, p.refractory, p.base_weight
            )
        };
        let mut s = String::from("# delay-chain network; params: tau_mem tau_syn v_threshold v_reset refractory base_weight\n");
        let _ = writeln!(s, "thresholds = {}", join(&mut self.thresholds.iter().map(f64::to_string)));
        let _ = writeln!(s, "steps = {}", self.steps);
        let _ = writeln!(
            s,
            "readout_weights = {}",
            join(&mut self.readout_weights.iter().map(f64::to_string))
        );
        let _ = writeln!(s, "output_params = {}", params(&self.output_params));
        let _ = writeln!(s, "output_up = {}", join(&mut self.output_up.iter().map(u32::to_string)));
        let _ = writeln!(
            s,
            "output_down = {}",
            join(&mut self.output_down.iter().map(u32::to_string))
        );
        for (c, chain) in self.chains.iter().enumerate() {
            let _ = writeln!(s, "chain.{c} = {}", join(&mut chain.iter().map(u32::to_string)));
        }
        for (id, p) in &self.neuron_params {
            let _ = writeln!(s, "neuron.{id} = {}", params(p));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        fn nums<T: std::str::FromStr>(row: usize, v: &str) -> Result<Vec<T>> {
            v.split_whitespace()
                .map(|x| {
                    x.parse().map_err(|_| Error::Parse {
                        row,
                        message: format!("bad number {x:?}"),
                    })
                })
                .collect()
        }
        fn params(row: usize, v: &str) -> Result<NeuronParams> {
            let x: Vec<f64> = nums(row, v)?;
            if x.len() != 6 {
                return Err(Error::Parse {
                    row,
                    message: format!("expected 6 neuron parameters, found {}", x.len()),
                });
            }
            Ok(NeuronParams {
                tau_mem: x[0],
                tau_syn: x[1],
                v_threshold: x[2],
                v_reset: x[3],
                refractory: x[4],
                base_weight: x[5],
            })
        }
        let mut thresholds = None;
        let mut steps = None;
        let mut readout_weights = None;
        let mut output_params = None;
        let mut output_up = None;
        let mut output_down = None;
        let mut chains: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
        let mut neuron_params = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let row = i + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                row,
                message: "expected `key = value`".into(),
            })?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "thresholds" => thresholds = Some(nums(row, value)?),
                "steps" => {
                    steps = Some(value.parse::<usize>().map_err(|_| Error::Parse {
                        row,
                        message: format!("bad step count {value:?}"),
                    })?)
                }
                "readout_weights" => readout_weights = Some(nums(row, value)?),
                "output_params" => output_params = Some(params(row, value)?),
                "output_up" => output_up = Some(nums(row, value)?),
                "output_down" => output_down = Some(nums(row, value)?),
                _ => {
                    let bad = || Error::Parse {
                        row,
                        message: format!("unknown key {key:?}"),
                    };
                    if let Some(c) = key.strip_prefix("chain.") {
                        chains.insert(c.parse().map_err(|_| bad())?, nums(row, value)?);
                    } else if let Some(id) = key.strip_prefix("neuron.") {
                        neuron_params.insert(id.parse().map_err(|_| bad())?, params(row, value)?);
                    } else {
                        return Err(bad());
                    }
                }
            }
        }
        let missing = |k: &str| Error::Structural(format!("network file lacks `{k}`"));
        if chains.keys().copied().ne(0..chains.len()) {
            return Err(Error::Structural("chain indices are not contiguous from 0".into()));
        }
        let net = NetworkSpec {
            thresholds: thresholds.ok_or_else(|| missing("thresholds"))?,
            steps: steps.ok_or_else(|| missing("steps"))?,
            chains: chains.into_values().collect(),
            output_up: output_up.ok_or_else(|| missing("output_up"))?,
            output_down: output_down.ok_or_else(|| missing("output_down"))?,
            readout_weights: readout_weights.ok_or_else(|| missing("readout_weights"))?,
            output_params: output_params.ok_or_else(|| missing("output_params"))?,
            neuron_params,
        };
        net.validate()?;
        Ok(net)
    }
}

struct Target {
    neuron: usize,
    weight: f64,
}

/// Simulate the network on one set of ADM trains and return the spike train of every
/// delay and output neuron, keyed by neuron id.
pub fn run_network(
    net: &NetworkSpec,
    inputs: &[SpikeTrain],
    sim: &SimConfig,
) -> Result<BTreeMap<u32, SpikeTrain>> {
    sim.validate()?;
    if inputs.len() != net.chains.len() {
        return Err(Error::Structural(format!(
            "{} input trains for {} chains",
            inputs.len(),
            net.chains.len()
        )));
    }
    let steps = net.steps;
    let n_delay = net.delay_neuron_count();
    let n_total = n_delay + 2 * steps;
    let delay_index = |c: usize, k: usize| c * steps + k;
    let up_index = |k: usize| n_delay + k;
    let down_index = |k: usize| n_delay + steps + k;

    let mut ids = vec![0u32; n_total];
    let mut kernels = Vec::with_capacity(n_total);
    let mut targets: Vec<Vec<Target>> = (0..n_total).map(|_| Vec::new()).collect();
    for (c, chain) in net.chains.iter().enumerate() {
        let threshold_index = c / 2;
        for (k, &id) in chain.iter().enumerate() {
            let i = delay_index(c, k);
            ids[i] = id;
            kernels.push(Kernel::new(&net.neuron_params[&id], sim.dt));
            if k + 1 < steps {
                targets[i].push(Target {
                    neuron: delay_index(c, k + 1),
                    weight: net.neuron_params[&chain[k + 1]].base_weight,
                });
            }
            let out = if c % 2 == 0 { up_index(k) } else { down_index(k) };
            targets[i].push(Target {
                neuron: out,
                weight: net.readout_weights[threshold_index],
            });
        }
    }
    let out_kernel = Kernel::new(&net.output_params, sim.dt);
    for k in 0..steps {
        ids[up_index(k)] = net.output_up[k];
        ids[down_index(k)] = net.output_down[k];
    }
    kernels.resize(n_total, out_kernel);

    // external events as (bin, neuron, weight), sorted by bin
    let mut external = Vec::new();
    for (c, chain) in net.chains.iter().enumerate() {
        let want = chain_channel(c);
        let train = inputs
            .iter()
            .find(|t| t.channel() == want)
            .ok_or_else(|| Error::Structural(format!("no input train for channel {want}")))?;
        let weight = net.neuron_params[&chain[0]].base_weight;
        external.extend(
            train
                .times()
                .iter()
                .map(|&t| (sim.bin_of(t), delay_index(c, 0), weight)),
        );
    }
    external.sort_by_key(|e| e.0);

    let mut state = vec![NeuronState::default(); n_total];
    let mut drive = vec![0.0; n_total];
    let mut next_drive = vec![0.0; n_total];
    let mut spikes: Vec<Vec<f64>> = vec![Vec::new(); n_total];
    let mut ext = 0;
    for n in 0..sim.steps() {
        while ext < external.len() && external[ext].0 <= n {
            drive[external[ext].1] += external[ext].2;
            ext += 1;
        }
        let t_fire = (n + 1) as f64 * sim.dt;
        for i in 0..n_total {
            if kernels[i].step(&mut state[i], drive[i]) {
                spikes[i].push(t_fire);
                for tg in &targets[i] {
                    next_drive[tg.neuron] += tg.weight;
                }
            }
        }
        std::mem::swap(&mut drive, &mut next_drive);
        next_drive.iter_mut().for_each(|x| *x = 0.0);
    }
    Ok(ids
        .into_iter()
        .zip(spikes)
        .map(|(id, times)| (id, SpikeTrain::from_sorted(Channel::Neuron(id), times)))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preservation {
    /// Relative spike-count difference between the two trains.
    pub count_error: f64,
    /// RMS deviation of matched pair lags from the expected delay (s).
    pub jitter: f64,
    pub matched: usize,
}

/// Compare a chain's first and last neuron: count difference, and lag error over spike
/// pairs matched in order within `MATCH_TOLERANCE` of the expected delay.
pub fn measure_preservation(first: &SpikeTrain, last: &SpikeTrain, expected_delay: f64) -> Preservation {
    let (a, b) = (first.times(), last.times());
    let count_error = (b.len() as f64 - a.len() as f64).abs() / (a.len().max(1) as f64);
    let mut j = 0;
    let mut sq = 0.0;
    let mut matched = 0;
    for &t in a {
        let target = t + expected_delay;
        while j < b.len() && b[j] < target - MATCH_TOLERANCE {
            j += 1;
        }
        if j < b.len() && b[j] <= target + MATCH_TOLERANCE {
            sq += (b[j] - target).powi(2);
            matched += 1;
            j += 1;
        }
    }
    Preservation {
        count_error,
        jitter: if matched > 0 { (sq / matched as f64).sqrt() } else { 0.0 },
        matched,
    }
}

/// Pool table: one row per neuron; absent measurements are left blank.
pub fn write_pool_csv<W: std::io::Write>(out: W, pool: &[NeuronRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::Validation(format!("csv write: {e}"));
    w.write_record([
        "id",
        "tau_mem",
        "tau_syn",
        "v_threshold",
        "base_weight",
        "measured_delay",
        "f_one_to_one_max",
    ])
    .map_err(err)?;
    let opt = |x: Option<f64>| x.map(fmt_sig9).unwrap_or_default();
    for r in pool {
        w.write_record([
            r.id.to_string(),
            fmt_sig9(r.params.tau_mem),
            fmt_sig9(r.params.tau_syn),
            fmt_sig9(r.params.v_threshold),
            fmt_sig9(r.params.base_weight),
            opt(r.measured_delay),
            opt(r.f_one_to_one_max),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| Error::Validation(format!("csv write: {e}")))?;
    Ok(())
}

/// Per-step table: step, mean delay, spread, cumulative delay.
pub fn write_steps_csv<W: std::io::Write>(out: W, report: &CalibrationReport) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::Validation(format!("csv write: {e}"));
    w.write_record(["step", "mean_delay", "spread", "cumulative_delay"])
        .map_err(err)?;
    for k in 0..report.per_step_delay.len() {
        w.write_record([
            k.to_string(),
            fmt_sig9(report.per_step_delay[k]),
            fmt_sig9(report.per_step_spread[k]),
            fmt_sig9(report.mean_cumulative_delay(k)),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| Error::Validation(format!("csv write: {e}")))?;
    Ok(())
}
