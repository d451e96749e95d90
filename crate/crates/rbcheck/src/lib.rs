//! Parameterized model checking for rendezvous/broadcast systems.

pub mod automata;
pub mod cvrs;
pub mod edgetypes;
pub(crate) mod graph;
pub mod model;
pub mod oracle;
pub mod pmcp;
pub mod reductions;
pub mod samples;
pub mod unwinding;
