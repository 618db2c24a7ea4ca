pub mod adm;
pub mod chain;
pub mod classify;
pub mod dataio;
pub mod error;
pub mod neuro;
pub mod pipeline;
pub mod readout;
pub mod spikes;
pub mod synth;

pub use error::{Error, Result};
