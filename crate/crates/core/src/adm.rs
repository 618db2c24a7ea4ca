//! Asynchronous delta modulator: turns an amplitude signal into UP/DOWN spike trains.

use crate::dataio::Signal;
use crate::error::{Error, Result};
use crate::spikes::{Channel, Polarity, SpikeTrain};

/// Thresholds used for the coarse, medium and fine modulators.
pub const DEFAULT_THRESHOLDS: [f64; 3] = [0.2, 0.1, 0.04];

/// Spacing of same-sample crossings when crossing times are not interpolated.
const MICRO_OFFSET: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmConfig {
    pub threshold: f64,
    /// Place each crossing at its linearly interpolated time instead of the sample time.
    pub interpolate: bool,
}

impl AdmConfig {
    pub fn new(threshold: f64) -> Result<Self> {
        let cfg = Self {
            threshold,
            interpolate: true,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.threshold.is_finite() && self.threshold > 0.0) {
            return Err(Error::Validation(format!(
                "ADM threshold must be > 0, got {}",
                self.threshold
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmOutput {
    pub up: SpikeTrain,
    pub down: SpikeTrain,
}

fn push_strict(times: &mut Vec<f64>, t: f64) {
    let t = match times.last() {
        Some(&last) if t <= last => last.next_up(),
        _ => t,
    };
    times.push(t);
}

/// Encode with a reference that starts at the first sample and moves by one threshold per
/// emitted spike, so the reference stays strictly within one threshold of every sample.
pub fn encode(signal: &Signal, cfg: &AdmConfig) -> Result<AdmOutput> {
    encode_indexed(signal, cfg, 0)
}

fn encode_indexed(signal: &Signal, cfg: &AdmConfig, threshold_index: usize) -> Result<AdmOutput> {
    cfg.validate()?;
    let theta = cfg.threshold;
    let fs = signal.sample_rate_hz();
    let x = signal.samples();
    let origin = x[0];
    let mut level: i64 = 0;
    let (mut up, mut down) = (Vec::new(), Vec::new());
    for i in 1..x.len() {
        let (prev, cur) = (x[i - 1], x[i]);
        let mut emitted = 0u32;
        let mut crossing_time = |value: f64| {
            let t = if cfg.interpolate {
                let frac = ((value - prev) / (cur - prev)).clamp(0.0, 1.0);
                ((i - 1) as f64 + frac) / fs
            } else {
                i as f64 / fs + f64::from(emitted) * MICRO_OFFSET
            };
            emitted += 1;
            t
        };
        while cur >= origin + (level + 1) as f64 * theta {
            level += 1;
            push_strict(&mut up, crossing_time(origin + level as f64 * theta));
        }
        while cur <= origin + (level - 1) as f64 * theta {
            level -= 1;
            push_strict(&mut down, crossing_time(origin + level as f64 * theta));
        }
    }
    Ok(AdmOutput {
        up: SpikeTrain::from_sorted(Channel::adm(threshold_index, Polarity::Up), up),
        down: SpikeTrain::from_sorted(Channel::adm(threshold_index, Polarity::Down), down),
    })
}

/// One modulator per threshold; trains ordered (0, UP), (0, DOWN), (1, UP), ...
pub fn encode_bank(signal: &Signal, thresholds: &[f64], interpolate: bool) -> Result<Vec<SpikeTrain>> {
    if thresholds.is_empty() {
        return Err(Error::Validation("at least one ADM threshold is required".into()));
    }
    let mut trains = Vec::with_capacity(2 * thresholds.len());
    for (index, &threshold) in thresholds.iter().enumerate() {
        let out = encode_indexed(
            signal,
            &AdmConfig {
                threshold,
                interpolate,
            },
            index,
        )?;
        trains.push(out.up);
        trains.push(out.down);
    }
    Ok(trains)
}

/// Signal estimate at time `t` implied by the spikes emitted so far.
pub fn reconstruct(up: &SpikeTrain, down: &SpikeTrain, threshold: f64, v0: f64, t: f64) -> f64 {
    let net = up.count_until(t) as f64 - down.count_until(t) as f64;
    v0 + threshold * net
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn signal(samples: Vec<f64>) -> Signal {
        Signal::new(samples, 125.0, 0, "t").unwrap()
    }

    fn ramp() -> Signal {
        signal((0..=125).map(|i| i as f64 / 125.0).collect())
    }

    #[test]
    fn ramp_gives_ten_up_spikes() {
        for interpolate in [true, false] {
            let out = encode(
                &ramp(),
                &AdmConfig {
                    threshold: 0.1,
                    interpolate,
                },
            )
            .unwrap();
            assert_eq!(out.up.len(), 10);
            assert!(out.down.is_empty());
        }
    }

    #[test]
    fn interpolated_ramp_crossings_land_on_level_times() {
        let out = encode(&ramp(), &AdmConfig::new(0.1).unwrap()).unwrap();
        for (k, &t) in out.up.times().iter().enumerate() {
            assert!((t - 0.1 * (k + 1) as f64).abs() < 1e-9, "spike {k} at {t}");
        }
    }

    #[test]
    fn constant_signal_is_silent() {
        let out = encode(&signal(vec![0.4; 50]), &AdmConfig::new(0.04).unwrap()).unwrap();
        assert!(out.up.is_empty() && out.down.is_empty());
        let bank = encode_bank(&signal(vec![0.4; 50]), &DEFAULT_THRESHOLDS, true).unwrap();
        assert_eq!(bank.len(), 6);
        assert!(bank.iter().all(SpikeTrain::is_empty));
    }

    #[test]
    fn bank_labels_and_order() {
        let bank = encode_bank(&ramp(), &DEFAULT_THRESHOLDS, true).unwrap();
        let labels: Vec<String> = bank.iter().map(|t| t.channel().to_string()).collect();
        assert_eq!(
            labels,
            ["adm0_up", "adm0_down", "adm1_up", "adm1_down", "adm2_up", "adm2_down"]
        );
        assert_eq!(encode_bank(&ramp(), &[0.1], true).unwrap().len(), 2);
        assert!(encode_bank(&ramp(), &[], true).is_err());
        assert!(encode_bank(&ramp(), &[0.1, 0.0], true).is_err());
    }

    #[test]
    fn same_sample_crossings_are_micro_offset() {
        let out = encode(
            &signal(vec![0.0, 0.35, 0.0]),
            &AdmConfig {
                threshold: 0.1,
                interpolate: false,
            },
        )
        .unwrap();
        assert_eq!(out.up.times(), &[0.008, 0.008 + 1e-6, 0.008 + 2e-6]);
        assert_eq!(out.down.len(), 3);
        assert!((out.down.times()[0] - 0.016).abs() < 1e-12);
    }

    #[test]
    fn reconstruct_counts() {
        let empty = SpikeTrain::empty(Channel::adm(0, Polarity::Up));
        let down = SpikeTrain::empty(Channel::adm(0, Polarity::Down));
        assert_eq!(reconstruct(&empty, &down, 0.1, 0.3, 5.0), 0.3);
        let up = encode(&ramp(), &AdmConfig::new(0.1).unwrap()).unwrap().up;
        assert!((reconstruct(&up, &down, 0.1, 0.0, 1.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn heartbeat_counts_grow_as_threshold_shrinks() {
        let ds = crate::synth::generate(2, 5, 3).unwrap();
        for s in &ds.signals {
            let counts: Vec<usize> = DEFAULT_THRESHOLDS
                .iter()
                .map(|&th| {
                    let o = encode(s, &AdmConfig::new(th).unwrap()).unwrap();
                    o.up.len() + o.down.len()
                })
                .collect();
            assert!(counts.windows(2).all(|w| w[0] <= w[1]), "{counts:?}");
        }
    }

    fn arb_signal() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.0f64..=1.0, 2..200)
    }

    proptest! {
        #[test]
        fn reconstruction_error_below_threshold(xs in arb_signal(), th in 0.01f64..0.5, interp: bool) {
            let s = signal(xs.clone());
            let out = encode(&s, &AdmConfig { threshold: th, interpolate: interp }).unwrap();
            for (i, &x) in xs.iter().enumerate() {
                // in the non-interpolated mode a sample's own spikes trail it by micro offsets
                let t = i as f64 / 125.0 + if interp { 0.0 } else { 1e-3 };
                let est = reconstruct(&out.up, &out.down, th, xs[0], t);
                prop_assert!((est - x).abs() < th, "sample {i}: {est} vs {x}");
            }
        }

        #[test]
        fn up_and_down_never_coincide(xs in arb_signal(), th in 0.01f64..0.5) {
            let out = encode(&signal(xs), &AdmConfig::new(th).unwrap()).unwrap();
            for t in out.up.times() {
                prop_assert!(out.down.times().binary_search_by(|d| d.total_cmp(t)).is_err());
            }
        }

        #[test]
        fn prepending_constant_samples_shifts_spikes(xs in arb_signal(), pad in 1usize..50) {
            let s = signal(xs);
            let cfg = AdmConfig::new(0.1).unwrap();
            let base = encode(&s, &cfg).unwrap();
            let shifted = encode(&s.delayed(pad), &cfg).unwrap();
            let delta = pad as f64 / 125.0;
            for (a, b) in [(&base.up, &shifted.up), (&base.down, &shifted.down)] {
                prop_assert_eq!(a.len(), b.len());
                for (x, y) in a.times().iter().zip(b.times()) {
                    prop_assert!((y - x - delta).abs() < 1e-9);
                }
            }
        }

        #[test]
        fn integer_refinement_never_fewer_spikes(xs in arb_signal(), th in 0.02f64..0.5, k in 1u32..6) {
            let s = signal(xs);
            let count = |t: f64| {
                let o = encode(&s, &AdmConfig::new(t).unwrap()).unwrap();
                o.up.len() + o.down.len()
            };
            // refining the level grid by an integer factor keeps every coarse level;
            // arbitrary threshold pairs carry no such guarantee
            prop_assert!(count(th / f64::from(k)) >= count(th));
        }

        #[test]
        fn spike_times_within_signal(xs in arb_signal(), th in 0.01f64..0.5, interp: bool) {
            let s = signal(xs);
            let out = encode(&s, &AdmConfig { threshold: th, interpolate: interp }).unwrap();
            for t in out.up.times().iter().chain(out.down.times()) {
                prop_assert!(*t > 0.0 && *t <= s.duration());
            }
        }
    }
}
