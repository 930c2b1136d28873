//! Entanglement distillation of mixed pair states using only particle
//! statistics: spin flips, 50/50 beam splitters and post-selection on which
//! ports the particles leave through.
//!
//! * [`linalg`]: fixed-size complex matrices, spectral routines, density
//!   matrix validation.
//! * [`fock`]: brute-force second-quantized splitter for fermions and bosons;
//!   the source of the per-step post-selection factors.
//! * [`protocol`]: pair states, the joint state, the per-step map and its
//!   n-step iteration and closed form.
//! * [`measures`]: Wootters concurrence (general and X-state forms) and the
//!   asymptotic summary.
//! * [`cli`]: the `statdistill` command-line front end.

pub mod basis;
pub mod cli;
pub mod fock;
pub mod linalg;
pub mod measures;
pub mod protocol;

pub use basis::Basis;
pub use fock::Statistics;
pub use linalg::{ComplexAmplitude, DensityMatrix4, Matrix2, Matrix4};
pub use measures::{concurrence, summarize, DistillationSummary};
pub use protocol::{
    distill, distill_step, final_state_closed_form, make_pair_state, make_total_state,
    ProtocolConfig, ProtocolError, ProtocolResult, SharedPairState, StepOutcome,
};
