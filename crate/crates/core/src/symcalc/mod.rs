//! Exact polynomial arithmetic and exterior calculus on R^4.

pub mod dyadic;
pub mod forms;
pub mod parse;
pub mod poly;

pub use dyadic::{common_numerators, DyadicPoly};
pub use forms::{
    exterior_derivative, hodge_star, rescale_eps, rescale_eps_poly, volume_coefficient,
    volume_of_values, wedge, Form, FourForm, OneForm, ThreeForm, TwoForm, BASIS,
};
pub use parse::{format_rational, parse_polynomial, parse_rational};
pub use poly::{coord_assignment, rat, rat_int, rat_to_f64, Assignment, Polynomial, Var};

/// `dv` for a coordinate or any polynomial.
pub fn d(p: &Polynomial) -> OneForm {
    exterior_derivative(&Form::scalar(p.clone())).expect("degree 0 -> 1")
}
