//! Sensorimotor information-flow analysis for a simulated quadruped.
//!
//! The crate is organised around the data flowing through an experiment:
//!
//! * [`channels`] and [`recording`] hold the 16-channel data model and
//!   epoch segmentation.
//! * [`info`] implements plug-in entropy, mutual information and transfer
//!   entropy over discretized channels, with circular-shift surrogates and
//!   a brute-force reference estimator.
//! * [`sim`] is a deterministic surrogate of the quadruped: servo hips,
//!   passive spring-damper knees, stance-phase foot pressure, gaits and
//!   grounds.
//! * [`flow`] builds the directed transfer-entropy matrix, selects dominant
//!   flows and renders them as DOT graphs.
//! * [`classify`] runs ground classification from epochs with and without
//!   gait context.
//! * [`tracking`] is a 1-D active-perception demo comparing visual entropy
//!   under closed-loop tracking and independent camera motion.

// `!(x > 0.0)` is used on purpose: it rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channels;
pub mod classify;
pub mod error;
pub mod flow;
pub mod info;
pub mod recording;
pub mod seeds;
pub mod sim;
pub mod tracking;

pub use channels::{ChannelId, Kind, Leg, CHANNEL_COUNT};
pub use error::{Error, Result};
pub use flow::{Flow, FlowMatrix, FlowPattern};
pub use info::{SymbolSeries, TeConfig, Discretization};
pub use recording::{Epoch, Meta, Recording};
pub use sim::{GaitSpec, Ground, SimConfig};
