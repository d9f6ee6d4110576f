//! Two-party interactive communication over an adversarial channel.
//!
//! The crate models channels where the parties may adapt the length of the
//! conversation (each party may terminate on its own) or the order of speaking
//! (each party may stay silent in any round), and provides noise-resilient
//! protocols for both settings together with the attacks that bound what any
//! protocol can achieve.
//!
//! Module map:
//! - [`channel`]: channel models, the simulator and the noise metrics.
//! - [`codes`]: prefix-property linear codes, silence encodings, Blueberry
//!   detection codes and tree codes.
//! - [`protocols`]: the resilient protocols as pairs of [`channel::Party`]
//!   endpoints.
//! - [`adversaries`]: attack strategies and exhaustive noise enumeration.
//! - [`harness`]: experiment configuration, batch execution and CSV reports.

pub mod adversaries;
pub mod channel;
pub mod codes;
pub mod error;
pub mod harness;
pub mod protocols;
pub mod rate;
pub mod symbol;

pub use error::{Error, Result};
pub use rate::NoiseRate;
pub use symbol::{ChannelSymbol, Role};
