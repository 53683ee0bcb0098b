// SPDX-License-Identifier: Apache-2.0

//! Circuit IR, plaintext evaluation, transforms and fabric resource
//! estimation for Boolean (CGGI) and CKKS operator graphs.

pub mod cli;
pub mod cost;
pub mod critical_path;
pub mod eval;
pub mod fixtures;
pub mod ir;
pub mod report;
pub mod text;
pub mod transforms;

pub use cost::{estimate, CostTable, FabricConfig, ResourceReport};
pub use critical_path::{
    approximate_cp, longest_path_cp, paper_exact_cp, throughput, CpMethod, CriticalPathResult,
};
pub use eval::{evaluate, PlainValue};
pub use fixtures::Fixture;
pub use ir::{validate, CircuitGraph, GraphBuilder, OpKind, OpTag, ValueId, ValueType};
