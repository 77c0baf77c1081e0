//! Finite-dimensional convex geometry shared by every other module.

pub mod grid;
pub mod lp;
mod point;
mod sets;

pub use grid::{hull_grid, make_grid, Grid};
pub use point::{convex_combination, convex_combination_tol, dot, lex_cmp, Point};
pub use sets::{
    hull_membership, hull_weights, relative_interior_margin, support_function, support_point,
    Ball, Polytope, RecessionSet, Region, SimplexM,
};
