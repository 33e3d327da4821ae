//! Channels in Kraus and Choi form, and bipartite probe states.

mod channel;
mod choi;
pub mod factories;
mod state;

pub use channel::{Channel, TP_TOL};
pub use choi::{ChoiOperator, CP_TOL};
pub use state::{BipartiteState, PSD_TOL, TRACE_TOL};
