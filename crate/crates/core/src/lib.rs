//! Exact symbolic workbench for Kähler–Poisson algebras.

pub mod constructions;
pub mod kp;
pub mod morphism;
pub mod poisson;
pub mod random;
pub mod ring;
pub mod verdict;
