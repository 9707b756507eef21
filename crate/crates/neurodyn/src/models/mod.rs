//! Single-cell models. Each submodule defines a parameter record with
//! documented defaults and a [`crate::ModelSystem`] implementation; the
//! published state layouts live in the model catalog.

pub mod fhn;
pub mod fhn_cell;
pub mod hh;
pub mod hr;
pub mod izhikevich;
pub mod maeda;
pub mod ml;
pub mod presets;
