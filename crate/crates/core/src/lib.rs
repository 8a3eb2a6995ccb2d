//! Exact computations for the fixed-point subalgebra V_L^τ of the lattice
//! vertex operator algebra V_L with L = √2A₂.

pub mod cards;
pub mod catalog;
pub mod charq;
pub mod classify;
pub mod commutators;
pub mod field;
pub mod fock;
pub mod fusion;
pub mod groebner;
pub mod lattice;
pub mod linalg;
pub mod modular;
pub mod poly;
pub mod property;
pub mod rational;
pub mod report;
pub mod suites;
pub mod vertex;
pub mod words;
pub mod zhu;

pub use field::FieldElem;
pub use fock::{FockState, HeisMono, VecH};
pub use lattice::{CosetLabel, Isometry, Klein, LatticeVec};
pub use rational::Rational;
