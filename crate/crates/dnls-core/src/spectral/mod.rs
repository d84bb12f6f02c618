//! Periodic grids, fields, Fourier multipliers and norms.

mod field;
mod grid;
mod ops;
pub mod product;
pub mod snapshot;
pub mod transform;

pub use field::{make_field, FieldState};
pub use grid::Grid;
pub use ops::{
    apply_multiplier, apply_symbol, derivative, frequency_restrict, half_resolvent,
    littlewood_paley, lp_bump, sobolev_norm, Side, Symbol,
};
