//! Hopf-algebraic and Rota-Baxter toolkit for non-autonomous linear ODEs.
//!
//! The crate provides, in exact rational arithmetic where possible:
//! - the free tensor and shuffle Hopf algebras with exp/log, Dynkin operator,
//!   and Lie-element tests ([`freetensor`]);
//! - the convolution algebra of graded endomorphisms, Eulerian idempotents,
//!   and Adams operations ([`idempotents`]);
//! - the CBHD series both as a formal log and through the first Eulerian
//!   idempotent ([`cbhd`]);
//! - Rota-Baxter operators of arbitrary weight with several concrete
//!   carriers ([`rotabaxter`]);
//! - Spitzer-type identities, Bohnenblust-Spitzer formulas, and the weighted
//!   BCH recursion ([`spitzer`]);
//! - Magnus expansions and numeric Magnus/Dyson integrators ([`magnus`]);
//! - Lie-Scheffers superposition for matrix Riccati equations ([`scheffers`]);
//! - the Faa di Bruno Hopf algebra ([`faadibruno`]).
//!
//! See the `examples/` directory for runnable entry points into each of
//! these capabilities, and the `hopfflow` binary for a command-line surface.

pub mod rat;
pub mod freetensor;
pub mod idempotents;
pub mod cbhd;
pub mod rotabaxter;
pub mod spitzer;
pub mod magnus;
pub mod scheffers;
pub mod faadibruno;
pub mod cli;

pub use rat::Q;
