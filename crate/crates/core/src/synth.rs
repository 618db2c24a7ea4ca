//! Seeded synthetic heartbeats built from Gaussian P, Q, R, S and T bumps.
//!
//! Class 0 is a normal beat. Higher classes alter the morphology in ways a rate code can
//! pick up: a wide QRS with an inverted T wave, a missing P wave with an early beat,
//! ST elevation, and a low-amplitude beat with a prolonged T wave.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::dataio::{Dataset, Signal, DEFAULT_SAMPLE_RATE};
use crate::error::{Error, Result};

pub const BEAT_SAMPLES: usize = 187;
pub const MAX_CLASSES: usize = 5;

#[derive(Debug, Clone, Copy)]
struct Wave {
    center: f64,
    width: f64,
    amplitude: f64,
}

fn morphology(class: usize) -> [Wave; 5] {
    let w = |center, width, amplitude| Wave {
        center,
        width,
        amplitude,
    };
    let mut waves = [
        w(0.10, 0.022, 0.15),
        w(0.215, 0.010, -0.10),
        w(0.25, 0.012, 1.0),
        w(0.285, 0.012, -0.25),
        w(0.50, 0.045, 0.30),
    ];
    match class {
        0 => {}
        1 => {
            waves[2].width = 0.030;
            waves[3].width = 0.030;
            waves[3].center = 0.31;
            waves[4].amplitude = -0.25;
        }
        2 => {
            waves[0].amplitude = 0.0;
            for wave in &mut waves[1..] {
                wave.center -= 0.07;
            }
        }
        3 => {
            waves[4] = w(0.42, 0.08, 0.55);
        }
        _ => {
            waves[2].amplitude = 0.55;
            waves[4] = w(0.62, 0.07, 0.35);
        }
    }
    waves
}

/// One beat of class `class` drawn from `rng`.
pub fn beat(class: usize, rng: &mut impl Rng) -> Vec<f64> {
    let noise = Normal::new(0.0, 0.012).expect("finite sigma");
    let jitter = Normal::new(0.0, 1.0).expect("finite sigma");
    let mut waves = morphology(class);
    let shift = 0.012 * jitter.sample(rng);
    for wave in &mut waves {
        wave.center += shift + 0.006 * jitter.sample(rng);
        wave.amplitude *= 1.0 + 0.12 * jitter.sample(rng);
        wave.width *= (1.0 + 0.1 * jitter.sample(rng)).max(0.5);
    }
    let active = rng.random_range(100..=140);
    let dt = 1.0 / DEFAULT_SAMPLE_RATE;
    let mut raw: Vec<f64> = (0..active)
        .map(|k| {
            let t = k as f64 * dt;
            let wander = 0.03 * (2.0 * std::f64::consts::PI * 0.3 * t).sin();
            waves
                .iter()
                .map(|w| w.amplitude * (-0.5 * ((t - w.center) / w.width).powi(2)).exp())
                .sum::<f64>()
                + wander
                + noise.sample(rng)
        })
        .collect();
    let lo = raw.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    for x in &mut raw {
        *x = (*x - lo) / (hi - lo);
    }
    raw.resize(BEAT_SAMPLES, 0.0);
    raw
}

/// `per_class` beats of each of `class_count` classes, interleaved by class.
pub fn generate(class_count: usize, per_class: usize, seed: u64) -> Result<Dataset> {
    if !(2..=MAX_CLASSES).contains(&class_count) {
        return Err(Error::Validation(format!(
            "synthetic generator supports 2..={MAX_CLASSES} classes, got {class_count}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut signals = Vec::with_capacity(class_count * per_class);
    for k in 0..per_class {
        for class in 0..class_count {
            let samples = beat(class, &mut rng);
            signals.push(Signal::new(
                samples,
                DEFAULT_SAMPLE_RATE,
                class,
                format!("synth:{}", k * class_count + class),
            )?);
        }
    }
    Dataset::new(format!("synth{class_count}"), class_count, signals)
}
