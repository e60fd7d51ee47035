//! Computational resource allocation: energy model, Gas/compute ranking,
//! dissatisfaction-masked cost matrices, Kuhn–Munkres matching and the
//! baseline schemes it is compared against.

mod cost;
mod energy;
mod km;
mod ranking;
mod schemes;

pub use cost::{build_cost_matrix, CostMatrix, RankedInstance};
pub use energy::{offload_energy, Server, Task};
pub use km::{km_solve, Matching};
pub use ranking::{dissatisfaction, rank_sensors, rank_servers};
pub use schemes::{
    bidding_allocate, ecm_allocate, group_allocate, max_dissatisfaction, proposed_allocate, Scheme,
};
