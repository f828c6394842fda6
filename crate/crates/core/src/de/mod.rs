//! Population-dynamics density evolution for regular and spatially coupled
//! ensembles over asymmetric binary-input channels.

mod engine;
mod graph;
mod population;
mod run;

pub(crate) use engine::stream;
pub use engine::{draw_socket_bits, BerEstimate, DeConfig, DeState};
pub use graph::DeGraph;
pub use population::{
    check_output_from_product, check_update_sample, clip, tanh_half, Direction, Population, DEFAULT_CLIP,
    TANH_GUARD,
};
pub use run::{de_run, run_graph, DeTrace};
