//! Construction of the ground state `α_a` of `L₀u = −au + uᵖ`.
//!
//! For a boundary value `b = u(0)` the tail `u(x), x >= 1` is the limit of
//! the monotone iteration in [`tail_iteration`]. The boundary row then
//! fixes `b` as the unique root of `f⋆(a, b) = bᵖ − (a+1)b + u⋆(a, b; 1)` on
//! `[a^{1/(p−1)}, (a+1)^{1/(p−1)}]`, found by [`solve_boundary`].
//! [`construct_soliton`] runs the whole pipeline.

mod boundary;
mod bounds;
mod construct;
mod params;
mod tail;

pub use boundary::{
    boundary_function, evaluate_boundary, f, f_minus, f_plus, solve_boundary, BoundaryEval, BoundaryRoot,
};
pub use bounds::{
    b_minus, b_plus, bound_fixed_points, compute_thresholds, dh_ds, g, g_at_s_min, h, r, s_min, BoundSequence,
    Thresholds,
};
pub use construct::{construct_soliton, soliton_residual, SolitonResult};
pub use params::{SolitonParams, Truncation, MIN_AUTO_TRUNCATION};
pub use tail::{tail_iteration, TailDiagnostics};
