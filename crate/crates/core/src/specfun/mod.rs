//! Special functions, distributions and quadrature used by the closed forms.

mod bessel;
mod erlang;
mod expint;
mod gamma;
mod hypergeometric;
mod hypoexp;
mod jfunc;
mod quad;
pub mod real;

pub use bessel::bessel_j0;
pub use erlang::{erlang_cdf, erlang_inverse_mean, erlang_pdf, ErlangLaw};
pub use expint::exp_integral_ei;
pub use gamma::{binomial, factorial, gamma, ln_factorial, ln_gamma, upper_incomplete_gamma};
pub use hypergeometric::{tricomi_u, tricomi_u_integer, tricomi_u_with, u_moment_table};
pub use hypoexp::{
    characteristic_coefficients, gamma_component, hypoexp_cdf, hypoexp_mean, hypoexp_pdf, HypoexpDensity,
    SpectralData, MERGE_TOLERANCE,
};
pub use jfunc::{j_function, j_function_literal, JKernel, JValue};
pub use quad::{adaptive_quad, density_breaks, integrate, integrate_piecewise, Domain, QuadOptions, QuadResult};
pub use real::{binomial_row, factorial as factorial_in, factorials, with_precision, Mp, Real};
