//! Arithmetic of elliptic surfaces over finite fields.
//!
//! Given a non-isotrivial elliptic curve `E` over `F_q(t)` this crate computes
//! local reduction data, the L-function, the zeta factors of the minimal
//! elliptic surface, geometric torsion with its Frobenius action, and the
//! orders predicted for K-groups and motivic cohomology.

#![no_std]

extern crate alloc;

pub mod count;
pub mod funcfield;
pub mod gf;
pub mod lfun;
pub mod mw;
pub mod predict;
pub mod tate;
pub mod wmodel;
