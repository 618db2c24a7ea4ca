//! Leaky integrate-and-fire neuron with an exponential current synapse, device mismatch
//! sampling, and single-neuron probes (delay and input/output rate curves).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};

use crate::error::{Error, Result};

/// Spikes delivered before measurements start, letting residual state settle.
pub const WARMUP_SPIKES: usize = 5;
/// Length of the regular drive used after warm-up when probing a neuron.
pub const PROBE_WINDOW: f64 = 2.0;
/// Relative rate error still counted as one-to-one transfer.
pub const ONE_TO_ONE_TOLERANCE: f64 = 0.02;
/// Default rate for delay probes.
pub const DEFAULT_PROBE_RATE: f64 = 10.0;

const FIRST_INPUT: f64 = 0.01;
const PROBE_TAIL: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeuronParams {
    /// Membrane leak time constant (s).
    pub tau_mem: f64,
    /// Synaptic current decay time constant (s).
    pub tau_syn: f64,
    pub v_threshold: f64,
    pub v_reset: f64,
    /// Absolute refractory period (s); the membrane is clamped to `v_reset` meanwhile.
    pub refractory: f64,
    /// Synaptic efficacy of one input spike.
    pub base_weight: f64,
}

impl NeuronParams {
    /// Slow neuron used along the delay chains: about 18 ms from input spike to output
    /// spike at any rate up to 20 Hz, with one-to-one transfer over that range. The
    /// synaptic current has all but expired by the end of the refractory period, so the
    /// latency barely depends on the preceding input. Latency plus refractory period stays
    /// 2 ms short of the 50 ms interval of a 20 Hz drive, which keeps 20 Hz transfer
    /// independent of the integration step.
    ///
    /// `base_weight` is the value `tune_weight_for_delay` returns for `DELAY_TARGET` at
    /// a 10 Hz probe; the unit tests re-derive it.
    pub fn delay_default() -> Self {
        Self {
            tau_mem: 0.5,
            tau_syn: 0.01,
            v_threshold: 1.0,
            v_reset: 0.0,
            refractory: 0.03,
            base_weight: DELAY_DEFAULT_WEIGHT,
        }
    }

    /// Fast readout neuron. Its input weights are assigned per connection by the readout
    /// calibration; `base_weight` is the geometric centre of the weight range that gives
    /// one-to-one transfer at 20 Hz (see `one_to_one_weight_range`).
    pub fn output_default() -> Self {
        Self {
            tau_mem: 0.01,
            tau_syn: 0.005,
            v_threshold: 1.0,
            v_reset: 0.0,
            refractory: 0.001,
            base_weight: OUTPUT_DEFAULT_WEIGHT,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("tau_mem", self.tau_mem),
            ("tau_syn", self.tau_syn),
            ("refractory", self.refractory),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::Validation(format!("{name} must be > 0, got {value}")));
            }
        }
        if !(self.v_threshold.is_finite() && self.v_reset.is_finite())
            || self.v_threshold <= self.v_reset
        {
            return Err(Error::Validation(format!(
                "v_threshold ({}) must exceed v_reset ({})",
                self.v_threshold, self.v_reset
            )));
        }
        if !self.base_weight.is_finite() {
            return Err(Error::Validation("base_weight must be finite".into()));
        }
        Ok(())
    }

    pub fn with_weight(self, base_weight: f64) -> Self {
        Self {
            base_weight,
            ..self
        }
    }
}

/// Latency the default delay neuron is tuned to at the 10 Hz probe (s).
pub const DELAY_TARGET: f64 = 0.018;

pub(crate) const DELAY_DEFAULT_WEIGHT: f64 = 121.117039;
pub(crate) const OUTPUT_DEFAULT_WEIGHT: f64 = 521.679077;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    /// Integration step (s).
    pub dt: f64,
    /// Simulated time span (s).
    pub duration: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 1e-4,
            duration: 1.5,
        }
    }
}

impl SimConfig {
    pub fn new(dt: f64, duration: f64) -> Result<Self> {
        let cfg = Self { dt, duration };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt <= 1e-3) {
            return Err(Error::Validation(format!(
                "dt must lie in (0, 1e-3], got {}",
                self.dt
            )));
        }
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(Error::Validation(format!(
                "duration must be > 0, got {}",
                self.duration
            )));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.duration / self.dt).round() as usize
    }

    /// Index of the integration step that receives an event at time `t`.
    pub fn bin_of(&self, t: f64) -> usize {
        (t / self.dt + 1e-9).floor() as usize
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NeuronState {
    pub v: f64,
    pub i: f64,
    refractory_left: u32,
}

impl NeuronState {
    pub fn is_refractory(&self) -> bool {
        self.refractory_left > 0
    }
}

/// Per-step constants derived from `NeuronParams` for a fixed `dt`.
#[derive(Debug, Clone, Copy)]
pub struct Kernel {
    decay_mem: f64,
    decay_syn: f64,
    dt: f64,
    v_threshold: f64,
    v_reset: f64,
    refractory_steps: u32,
}

impl Kernel {
    pub fn new(params: &NeuronParams, dt: f64) -> Self {
        Self {
            decay_mem: (-dt / params.tau_mem).exp(),
            decay_syn: (-dt / params.tau_syn).exp(),
            dt,
            v_threshold: params.v_threshold,
            v_reset: params.v_reset,
            refractory_steps: ((params.refractory / dt).round() as u32).max(1),
        }
    }

    /// Advance one step. `input` is the summed weight of spikes arriving in this step.
    /// Returns true when the neuron fires at the end of the step.
    #[inline]
    pub fn step(&self, state: &mut NeuronState, input: f64) -> bool {
        state.i = state.i * self.decay_syn + input;
        if state.refractory_left > 0 {
            state.refractory_left -= 1;
            state.v = self.v_reset;
            return false;
        }
        state.v = state.v * self.decay_mem + state.i * self.dt;
        debug_assert!(state.v.is_finite() && state.i.is_finite());
        if state.v >= self.v_threshold {
            state.v = self.v_reset;
            state.refractory_left = self.refractory_steps;
            true
        } else {
            false
        }
    }
}

/// One integration step of a single neuron; see [`Kernel::step`].
pub fn step_neuron(
    state: &mut NeuronState,
    input_weight: f64,
    params: &NeuronParams,
    dt: f64,
) -> bool {
    Kernel::new(params, dt).step(state, input_weight)
}

/// Log-normal device mismatch with median 1 and the given coefficient of variation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MismatchModel {
    pub cv: f64,
    pub seed: u64,
}

impl MismatchModel {
    pub fn new(cv: f64, seed: u64) -> Result<Self> {
        if !(0.0..1.0).contains(&cv) {
            return Err(Error::Validation(format!("mismatch cv must lie in [0, 1), got {cv}")));
        }
        Ok(Self { cv, seed })
    }

    /// Multiplicative factor for one parameter of one neuron.
    pub fn factor(&self, neuron_id: u32, field: u8) -> f64 {
        if self.cv == 0.0 {
            return 1.0;
        }
        let sigma = (1.0 + self.cv * self.cv).ln().sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(((neuron_id as u64) << 8) | field as u64);
        LogNormal::new(0.0, sigma)
            .expect("sigma is finite and non-negative")
            .sample(&mut rng)
    }
}

/// Scale `tau_mem`, `tau_syn`, `v_threshold` and `base_weight` by independent mismatch factors.
pub fn sample_mismatch(params: &NeuronParams, mm: &MismatchModel, neuron_id: u32) -> NeuronParams {
    let mut out = *params;
    out.tau_mem *= mm.factor(neuron_id, 0);
    out.tau_syn *= mm.factor(neuron_id, 1);
    out.v_threshold *= mm.factor(neuron_id, 2);
    if out.v_threshold <= out.v_reset {
        // only reachable with a non-negative reset and an extreme draw
        out.v_threshold = out.v_reset + f64::EPSILON.max(out.v_reset.abs() * 1e-9);
    }
    out.base_weight *= mm.factor(neuron_id, 3);
    out
}

/// Drive a lone neuron with spikes of weight `weight` at `inputs` and return its output times.
pub fn simulate_neuron(
    params: &NeuronParams,
    inputs: &[f64],
    weight: f64,
    dt: f64,
    duration: f64,
) -> Vec<f64> {
    let kernel = Kernel::new(params, dt);
    let steps = (duration / dt).round() as usize;
    let mut state = NeuronState::default();
    let mut out = Vec::new();
    let mut next = 0;
    for n in 0..steps {
        let mut drive = 0.0;
        while next < inputs.len() && ((inputs[next] / dt + 1e-9).floor() as usize) <= n {
            drive += weight;
            next += 1;
        }
        if kernel.step(&mut state, drive) {
            out.push((n + 1) as f64 * dt);
        }
    }
    out
}

fn regular_train(rate: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| FIRST_INPUT + k as f64 / rate).collect()
}

fn measured_spikes(rate: f64) -> usize {
    ((PROBE_WINDOW * rate).ceil() as usize).max(1)
}

/// Latency from each post-warm-up input spike to the first output spike that follows it.
///
/// Fails when the neuron does not emit exactly one output per measured input.
pub fn probe_latencies(params: &NeuronParams, rate: f64, dt: f64) -> Result<Vec<f64>> {
    if !(rate.is_finite() && rate > 0.0) {
        return Err(Error::Validation(format!("probe rate must be > 0, got {rate}")));
    }
    let measured = measured_spikes(rate);
    let inputs = regular_train(rate, WARMUP_SPIKES + measured);
    let duration = inputs[inputs.len() - 1] + PROBE_TAIL.max(2.0 / rate);
    let outputs = simulate_neuron(params, &inputs, params.base_weight, dt, duration);
    let window_start = inputs[WARMUP_SPIKES];
    let outputs: Vec<f64> = outputs.into_iter().filter(|&t| t >= window_start).collect();
    if outputs.len() != measured {
        return Err(Error::Calibration(format!(
            "{} output spikes for {} inputs at {rate} Hz",
            outputs.len(),
            measured
        )));
    }
    inputs[WARMUP_SPIKES..]
        .iter()
        .map(|&t_in| {
            outputs
                .iter()
                .find(|&&t_out| t_out > t_in)
                .map(|t_out| t_out - t_in)
                .ok_or_else(|| Error::Calibration(format!("no output after input at {t_in} s")))
        })
        .collect()
}

/// Mean input-to-output latency under a regular drive at `probe_rate`.
pub fn measure_delay(params: &NeuronParams, probe_rate: f64, sim: &SimConfig) -> Result<f64> {
    let lat = probe_latencies(params, probe_rate, sim.dt)?;
    Ok(lat.iter().sum::<f64>() / lat.len() as f64)
}

/// Output rate versus input rate under regular drive.
#[derive(Debug, Clone, PartialEq)]
pub struct FCurve {
    pub points: Vec<(f64, f64)>,
    /// Largest probed rate up to which every probed rate transfers one-to-one.
    pub one_to_one_max: Option<f64>,
}

/// Output rate of the neuron for a regular input at `rate` (Hz), measured over the
/// post-warm-up window.
pub fn output_rate(params: &NeuronParams, rate: f64, dt: f64) -> f64 {
    if rate <= 0.0 {
        return 0.0;
    }
    let measured = measured_spikes(rate);
    let inputs = regular_train(rate, WARMUP_SPIKES + measured);
    let duration = inputs[inputs.len() - 1] + PROBE_TAIL.max(2.0 / rate);
    let outputs = simulate_neuron(params, &inputs, params.base_weight, dt, duration);
    let window_start = inputs[WARMUP_SPIKES];
    let count = outputs.iter().filter(|&&t| t >= window_start).count();
    count as f64 / (measured as f64 / rate)
}

pub fn measure_f_curve(params: &NeuronParams, rates: &[f64], sim: &SimConfig) -> Result<FCurve> {
    if rates.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
        return Err(Error::Validation("probe rates must be finite and >= 0".into()));
    }
    if rates.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Validation("probe rates must be ascending".into()));
    }
    let points: Vec<(f64, f64)> = rates
        .iter()
        .map(|&r| (r, output_rate(params, r, sim.dt)))
        .collect();
    let mut one_to_one_max = None;
    for &(f_in, f_out) in &points {
        if f_in == 0.0 {
            continue;
        }
        if (f_out - f_in).abs() <= ONE_TO_ONE_TOLERANCE * f_in {
            one_to_one_max = Some(f_in);
        } else {
            break;
        }
    }
    Ok(FCurve {
        points,
        one_to_one_max,
    })
}

/// Input weight at which the neuron's mean latency at `probe_rate` equals `target` seconds.
///
/// Latency falls monotonically as the weight grows, so the weight is found by bisection
/// between a weight that never fires and one that fires within `dt`.
pub fn tune_weight_for_delay(
    params: &NeuronParams,
    target: f64,
    probe_rate: f64,
    dt: f64,
) -> Result<f64> {
    let delay_at = |w: f64| probe_latencies(&params.with_weight(w), probe_rate, dt)
        .map(|l| l.iter().sum::<f64>() / l.len() as f64);
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    // grow until latency drops below target
    loop {
        match delay_at(hi) {
            Ok(d) if d <= target => break,
            _ if hi > 1e9 => {
                return Err(Error::Calibration(format!(
                    "no weight reaches a latency of {target} s"
                )))
            }
            _ => {
                lo = hi;
                hi *= 2.0;
            }
        }
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        match delay_at(mid) {
            Ok(d) if d <= target => hi = mid,
            _ => lo = mid,
        }
        if hi - lo <= 1e-9 * hi {
            break;
        }
    }
    let w = 0.5 * (lo + hi);
    delay_at(w)?;
    Ok(w)
}

/// The range of weights for which the neuron transfers a regular train at `rate` one-to-one.
pub fn one_to_one_weight_range(params: &NeuronParams, rate: f64, dt: f64) -> Result<(f64, f64)> {
    let ok = |w: f64| probe_latencies(&params.with_weight(w), rate, dt).is_ok();
    // lower edge: smallest weight that fires for every input
    let mut probe = 1.0;
    while !ok(probe) {
        probe *= 1.5;
        if probe > 1e9 {
            return Err(Error::Calibration(format!(
                "no weight gives one-to-one transfer at {rate} Hz"
            )));
        }
    }
    let bisect = |mut bad: f64, mut good: f64| {
        for _ in 0..60 {
            let mid = 0.5 * (bad + good);
            if ok(mid) {
                good = mid;
            } else {
                bad = mid;
            }
            if (good - bad).abs() <= 1e-9 * good {
                break;
            }
        }
        good
    };
    let lower = bisect(0.0, probe);
    let mut upper_bad = probe * 2.0;
    while ok(upper_bad) {
        upper_bad *= 2.0;
        if upper_bad > 1e9 {
            return Ok((lower, f64::INFINITY));
        }
    }
    let upper = bisect(upper_bad, probe);
    Ok((lower, upper))
}

#[cfg(test)]
mod tests {
    use super::*;

    const DT: f64 = 1e-4;

    fn sim() -> SimConfig {
        SimConfig::default()
    }

    #[test]
    fn rest_state_is_silent() {
        let p = NeuronParams::delay_default();
        let mut s = NeuronState::default();
        for _ in 0..10_000 {
            assert!(!step_neuron(&mut s, 0.0, &p, DT));
        }
        assert_eq!(s.v, 0.0);
    }

    #[test]
    fn subthreshold_input_decays_without_firing() {
        let p = NeuronParams::delay_default();
        let out = simulate_neuron(&p, &[0.01], 0.3 * p.base_weight, DT, 1.0);
        assert!(out.is_empty());
        let k = Kernel::new(&p, DT);
        let mut s = NeuronState::default();
        k.step(&mut s, 0.3 * p.base_weight);
        let mut peak: f64 = 0.0;
        for _ in 0..20_000 {
            k.step(&mut s, 0.0);
            peak = peak.max(s.v);
        }
        assert!(peak > 0.0 && peak < p.v_threshold);
        // two seconds is four membrane time constants
        assert!(s.v > 0.0 && s.v < 0.05 * peak);
    }

    #[test]
    fn membrane_matches_closed_form_response() {
        // v(t) for a unit current kick integrates to a difference of exponentials
        let p = NeuronParams::delay_default();
        let w = 10.0;
        let k = Kernel::new(&p, DT);
        let mut s = NeuronState::default();
        k.step(&mut s, w);
        let n = 200;
        for _ in 1..n {
            k.step(&mut s, 0.0);
        }
        let t = n as f64 * DT;
        let (tm, ts) = (p.tau_mem, p.tau_syn);
        let exact = w * tm * ts / (tm - ts) * ((-t / tm).exp() - (-t / ts).exp());
        assert!((s.v - exact).abs() / exact < 0.01, "{} vs {exact}", s.v);
    }

    #[test]
    fn default_delay_weight_reproduces_tuning() {
        let p = NeuronParams::delay_default();
        let w = tune_weight_for_delay(&p, DELAY_TARGET, DEFAULT_PROBE_RATE, DT).unwrap();
        assert!((w - p.base_weight).abs() / w < 1e-4, "tuned {w}");
    }

    #[test]
    fn default_output_weight_is_centre_of_one_to_one_range() {
        let (lo, hi) = one_to_one_weight_range(&NeuronParams::output_default(), 20.0, DT).unwrap();
        let centre = (lo * hi).sqrt();
        let w = NeuronParams::output_default().base_weight;
        assert!((centre - w).abs() / w < 1e-4, "centre {centre}");
    }

    #[test]
    fn default_delay_neuron_latency() {
        let d = measure_delay(&NeuronParams::delay_default(), 10.0, &sim()).unwrap();
        assert!((d - DELAY_TARGET).abs() < 2e-4, "delay {d}");
    }

    #[test]
    fn latency_is_stationary_in_one_to_one_regime() {
        let p = NeuronParams::delay_default();
        for rate in [1.0, 5.0, 10.0, 20.0] {
            let lat = probe_latencies(&p, rate, DT).unwrap();
            let mean = lat.iter().sum::<f64>() / lat.len() as f64;
            let var = lat.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / lat.len() as f64;
            assert!(var.sqrt() < 0.1 * mean, "rate {rate}: sd {} mean {mean}", var.sqrt());
        }
    }

    #[test]
    fn fast_output_neuron_responds_within_5ms() {
        let d = measure_delay(&NeuronParams::output_default(), 10.0, &sim()).unwrap();
        assert!(d < 0.005, "delay {d}");
    }

    #[test]
    fn unreachable_threshold_fails_calibration() {
        let p = NeuronParams {
            v_threshold: 1e6,
            ..NeuronParams::delay_default()
        };
        assert!(matches!(
            measure_delay(&p, 10.0, &sim()),
            Err(Error::Calibration(_))
        ));
    }

    #[test]
    fn f_curve_one_to_one_then_saturates() {
        let p = NeuronParams::delay_default();
        let rates: Vec<f64> = (1..=50).map(f64::from).collect();
        let curve = measure_f_curve(&p, &rates, &sim()).unwrap();
        assert!(curve.one_to_one_max.unwrap() >= 20.0, "{:?}", curve.one_to_one_max);
        let (f_in, f_out) = *curve.points.last().unwrap();
        assert_eq!(f_in, 50.0);
        assert!(f_out < f_in, "f_out {f_out} at 50 Hz");
    }

    #[test]
    fn zero_rate_gives_zero_output() {
        let curve = measure_f_curve(&NeuronParams::delay_default(), &[0.0], &sim()).unwrap();
        assert_eq!(curve.points, vec![(0.0, 0.0)]);
        assert_eq!(curve.one_to_one_max, None);
    }

    #[test]
    fn f_curve_rejects_descending_rates() {
        assert!(measure_f_curve(&NeuronParams::delay_default(), &[10.0, 5.0], &sim()).is_err());
    }

    #[test]
    fn mismatch_zero_cv_is_identity() {
        let p = NeuronParams::delay_default();
        let mm = MismatchModel::new(0.0, 7).unwrap();
        assert_eq!(sample_mismatch(&p, &mm, 3), p);
    }

    #[test]
    fn mismatch_is_deterministic_and_per_neuron() {
        let p = NeuronParams::delay_default();
        let mm = MismatchModel::new(0.2, 7).unwrap();
        assert_eq!(sample_mismatch(&p, &mm, 3), sample_mismatch(&p, &mm, 3));
        assert_ne!(sample_mismatch(&p, &mm, 3), sample_mismatch(&p, &mm, 4));
        let other_seed = MismatchModel::new(0.2, 8).unwrap();
        assert_ne!(sample_mismatch(&p, &mm, 3), sample_mismatch(&p, &other_seed, 3));
    }

    #[test]
    fn mismatch_cv_matches_request() {
        let p = NeuronParams::delay_default();
        let mm = MismatchModel::new(0.2, 11).unwrap();
        let draws: Vec<f64> = (0..10_000).map(|id| sample_mismatch(&p, &mm, id).tau_mem).collect();
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (draws.len() - 1) as f64;
        let cv = var.sqrt() / mean;
        assert!((cv - 0.2).abs() < 0.02, "sample cv {cv}");
        for id in 0..1000 {
            sample_mismatch(&p, &mm, id).validate().unwrap();
        }
    }

    #[test]
    fn mismatch_rejects_out_of_range_cv() {
        assert!(MismatchModel::new(1.0, 0).is_err());
        assert!(MismatchModel::new(-0.1, 0).is_err());
    }

    #[test]
    fn halving_dt_changes_delay_by_under_two_percent() {
        let p = NeuronParams::delay_default();
        let coarse = measure_delay(&p, 10.0, &SimConfig::new(1e-4, 1.0).unwrap()).unwrap();
        let fine = measure_delay(&p, 10.0, &SimConfig::new(5e-5, 1.0).unwrap()).unwrap();
        assert!((coarse - fine).abs() / coarse < 0.02, "{coarse} vs {fine}");
    }

    #[test]
    fn twenty_hz_transfer_survives_finer_steps() {
        let p = NeuronParams::delay_default();
        for dt in [1e-4, 5e-5, 2.5e-5] {
            assert!(probe_latencies(&p, 20.0, dt).is_ok(), "dt {dt}");
        }
    }

    #[test]
    fn identical_inputs_give_bit_identical_outputs() {
        let p = sample_mismatch(
            &NeuronParams::delay_default(),
            &MismatchModel::new(0.2, 1).unwrap(),
            9,
        );
        let inputs = regular_train(15.0, 30);
        let a = simulate_neuron(&p, &inputs, p.base_weight, DT, 3.0);
        let b = simulate_neuron(&p, &inputs, p.base_weight, DT, 3.0);
        assert_eq!(a, b);
    }

    #[test]
    fn sim_config_bounds() {
        assert!(SimConfig::new(2e-3, 1.0).is_err());
        assert!(SimConfig::new(0.0, 1.0).is_err());
        assert!(SimConfig::new(1e-4, 0.0).is_err());
        assert_eq!(SimConfig::new(1e-4, 1.5).unwrap().steps(), 15_000);
    }

    #[test]
    fn params_validation() {
        assert!(NeuronParams::delay_default().validate().is_ok());
        let bad = NeuronParams {
            v_reset: 2.0,
            ..NeuronParams::delay_default()
        };
        assert!(bad.validate().is_err());
        let bad = NeuronParams {
            tau_syn: 0.0,
            ..NeuronParams::delay_default()
        };
        assert!(bad.validate().is_err());
    }
}
