//! Evolutionary synthesis of finite state machine logic into NAND/NOR
//! netlists using single-row Cartesian Genetic Programming.

pub mod cgp;
pub mod eval;
pub mod evolve;
pub mod fsm;
pub mod netlist;
pub mod rng;
