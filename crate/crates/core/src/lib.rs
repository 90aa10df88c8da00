//! Placement and routing of processing VMs in fog and cloud radio access
//! networks, solved exactly as a mixed-integer linear program.

pub mod config;
pub mod demand;
pub mod formulation;
pub mod milp;
pub mod model;
pub mod oracle;
pub mod output;
pub mod queueing;
pub mod scenarios;
pub mod solver;
