//! Engine for gesture-driven augmented video presentations.
//!
//! Hand-landmark frames flow through [`gesture`] classification into the
//! per-widget activation machines of [`widget`], which drive the animated
//! charts of [`chart`] and the selection, foreshadowing and annotation
//! effects of [`foreshadow`]. [`scene`] composes presenter and audience
//! frames, and [`session`] ties the pipeline into a replayable engine loop.

pub mod chart;
pub mod foreshadow;
pub mod gesture;
pub mod landmark;
pub mod scene;
pub mod session;
pub mod synth;
pub mod templates;
pub mod widget;

pub use landmark::{HandFrame, Handedness, Landmark, LandmarkFrame, LandmarkTrace, NormRect};
