//! Special functions behind the resolvent of `L₀`.
//!
//! * [`exp_integral`] and [`ExpIntegralTable`]: `E_p(a)` for `a > 0`.
//! * [`laguerre_phi`]: the growing solution `φ_{-a}` of `L₀φ = −aφ`.
//! * [`resolvent_psi`]: the decaying solution `ψ_{-a} = (L₀ + a)^{-1} χ₀`,
//!   with [`resolvent_psi_recurrence`] as an independent second method.
//! * [`psi_tail_asymptote`]: the closed large-`x` form of `ψ_{-a}`, used
//!   only to pick truncations and bound tails.

mod exp_integral;
mod profiles;
pub mod quadrature;

pub use exp_integral::{exp_integral, scaled_exp_integral, ExpIntegralTable, RECURRENCE_GUARD};
pub use profiles::{
    cached_psi, default_truncation, laguerre_eigenfunction, laguerre_phi, psi_tail_asymptote, psi_tail_l1_bound,
    resolvent_psi, resolvent_psi_recurrence, truncation_for, EigenfunctionProfile, ProfileKind,
};

pub(crate) use profiles::phi_profile_unchecked;
