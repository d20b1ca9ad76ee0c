//! Miniversal deformations of complex matrices under congruence.
//!
//! A square matrix `A` is moved to `Sᵀ A S` by congruence. This crate builds
//! the congruence canonical form (blocks `H_m(λ)`, `Γ_n`, `J_k(0)`), the
//! `(0,*)` star pattern of a miniversal deformation for any canonical form,
//! numerical checks that the pattern complements the tangent space of the
//! orbit, and an iterative reduction of small perturbations `A + E` to
//! `A + D` with `D` supported on the pattern.

pub mod canonical;
pub mod matcore;
pub mod patterns;
pub mod tangent;
pub mod reducer;
pub mod sweep;
pub mod catalog;
