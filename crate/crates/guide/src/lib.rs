//! The chapters of the mimo-aging guide (`book/`), compiled here so that
//! every Rust snippet in them runs as a doc-test against the current API.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/system-model.md")]
pub mod system_model {}

#[doc = include_str!("../../../book/src/sinr-law.md")]
pub mod sinr_law {}

#[doc = include_str!("../../../book/src/ergodic-rate.md")]
pub mod ergodic_rate {}

#[doc = include_str!("../../../book/src/outage.md")]
pub mod outage {}

#[doc = include_str!("../../../book/src/low-snr.md")]
pub mod low_snr {}

#[doc = include_str!("../../../book/src/asymptotics.md")]
pub mod asymptotics {}

#[doc = include_str!("../../../book/src/simulation.md")]
pub mod simulation {}

#[doc = include_str!("../../../book/src/special-functions.md")]
pub mod special_functions {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

#[doc = include_str!("../../../book/src/closed-forms.md")]
pub mod closed_forms {}
