//! Link-level Monte Carlo simulation: contaminated MMSE estimates, AR(1)
//! aging, zero-forcing detection and empirical SINR statistics.
//!
//! Every trial owns a ChaCha8 stream selected by its index from the master
//! seed; trials run on the current rayon pool and are reduced in index
//! order, so results are bit-identical for any number of worker threads.

mod mc;
mod power;
mod realization;

pub use mc::{law_sinr_samples, mc_ergodic_rate, mc_outage, mc_sum_rate, McEstimate, MonteCarlo};
pub use power::{rate_at_power, required_power, RateMethod};
pub use realization::{
    draw_realization, draw_realization_full_training, instantaneous_sinr, redraw_count, AgingSampling,
    ChannelRealization, EstimateModel,
};
