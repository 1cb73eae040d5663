//! Pseudospectral simulation and diagnostics for the defocusing fourth-order
//! nonlinear Schrödinger equation `i u_t + Δ²u = -|u|^{ν-1} u` on a periodic box,
//! together with the exponent calculus behind its low-regularity global theory.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod spectral;
pub mod exponents;
pub mod diagnostics;
pub mod dynamics;
pub mod experiments;
