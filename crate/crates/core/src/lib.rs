//! Uplink performance of multi-cell massive MIMO systems with zero-forcing
//! receivers, pilot contamination and channel aging.
//!
//! Three independent routes are provided for every metric, and they are meant
//! to cross-check each other:
//!
//! * exact closed forms ([`analytics::ergodic_rate_exact`],
//!   [`analytics::outage_probability`], ...), evaluated in extended precision
//!   where the finite sums cancel;
//! * numerical quadrature over the reduced SINR law
//!   ([`analytics::ergodic_rate_quadrature`]);
//! * link-level Monte Carlo simulation of the full matrix pipeline
//!   ([`simulator`]).
//!
//! ```
//! use mimo_aging::{analytics, sysmodel::{Aging, FadingProfile, SystemConfig}};
//!
//! let config = SystemConfig::new(7, 10, 50, 10, 200, 1.0, Aging::Direct(0.9));
//! let profile = FadingProfile::symmetric(&config, 0.1).unwrap();
//! let law = analytics::sinr_law(&config, &profile, 0).unwrap();
//! let exact = analytics::ergodic_rate_exact(&law).unwrap();
//! let bound = analytics::rate_lower_bound(&law, &profile).unwrap();
//! assert!(bound <= exact && exact - bound < 0.1);
//! ```

pub mod analytics;
mod error;
pub mod simulator;
pub mod specfun;
pub mod stats;
pub mod sysmodel;

pub use error::{Error, Result};
