//! Numerical toolkit for random cluster models with external field on finite
//! graphs.
//!
//! The crate is organised around a ground-truth layer of exhaustive-enumeration
//! partition functions ([`exact`]), the exact reformulation of the rank-2
//! vertex-subset sum as a two-spin / extended Ising model ([`mapping`]), belief
//! propagation and the Bethe partition function ([`bethe`]), and closed-form
//! pressure and phase-diagram computations for locally tree-like `d`-regular
//! graphs ([`regular`]). Graph construction, random generators and
//! cycle-structure statistics live in [`graphs`].
//!
//! Everything is deterministic: stochastic operations take explicit seeds and
//! use a fixed, versioned generator (ChaCha8), with streams split per sample
//! index.

// negated float guards of the form `!(x > 0.0)` also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// spin indices 0/1 address parallel marginal tables
#![allow(clippy::needless_range_loop)]

pub mod bethe;
pub mod exact;
pub mod graphs;
pub mod mapping;
pub mod num;
pub mod regular;
