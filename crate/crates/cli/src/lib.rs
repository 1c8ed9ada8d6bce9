//! Experiment harness: rate sweeps over streams, atoms and layers, delay-bound
//! surfaces, analytic-versus-simulated queue tails and single traced runs.
//! Every command writes tab-separated tables plus a `manifest.toml`.

pub mod delay;
pub mod output;
pub mod sweep;
pub mod table;

pub use delay::{delay_surface, delay_tail, linspace, surface_table, tail_table, SurfaceCell, TailRow, QUOTED_RATES};
pub use output::{emit_outputs, Manifest, OutputError, AO_DEFINITION};
pub use sweep::{run_sweep, SweepResult, SweepRow, SweepSpec};
pub use table::Table;
