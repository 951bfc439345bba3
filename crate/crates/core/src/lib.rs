//! Verification, reconstruction and numerical monitoring of low-order
//! conservation laws of the coupled semilinear wave system
//!
//! ```text
//! u_tt - a^2 u_xx + c(u) + f(v) = 0
//! v_tt - b^2 v_xx + d(v) + g(u) = 0
//! ```

pub mod catalog;
pub mod expr;
pub mod jetcalc;
pub mod simulate;
pub mod verifier;
