//! Demand-dispatch resource allocation: optimal generation and load-class
//! trajectories on a finite horizon, with co-state and price certification.

pub mod banded;
pub mod cli;
pub mod collapse;
pub mod costfn;
pub mod economics;
pub mod kkt;
pub mod numeric;
pub mod optimality;
pub mod scenario;
pub mod transcribe;
