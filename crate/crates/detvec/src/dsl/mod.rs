//! Expression DSL: scalar functions, vector fields and smooth maps on
//! chart coordinates, with exact symbolic differentiation.
//!
//! Exactness is the point: invariance checks compare exact-derivative
//! pushforward residuals against rounding-level thresholds, which finite
//! differences could never meet. Finite differences appear only as test
//! oracles.

mod chart;
pub mod expr;
mod field;
mod parse;
mod print;
pub mod validate;

pub use chart::Chart;
pub use expr::{
    add, coord, cos, differentiate, div, glue, jet5, konst, mul, neg, norm2, plateau, pow, sin,
    smooth_step, sub, substitute, ScalarExpr, E,
};
pub use field::{lie_bracket_fields, pushforward_residual, MapExpr, VFieldExpr};
pub use parse::{linear_field_components, parse_field, parse_map, parse_scalar, radial_components};
pub use print::display_in_chart;
