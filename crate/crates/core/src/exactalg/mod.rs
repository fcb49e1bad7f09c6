//! Exact arithmetic substrate: rationals of unbounded size, univariate
//! polynomials and rational functions over Q, factorization into
//! Q-irreducibles, and places/valuations of the rational function field.

pub mod factor;
pub mod intfactor;
pub mod parse;
pub mod poly;
pub mod ratfunc;
pub mod zpoly;

pub use factor::{is_irreducible, poly_factor, squarefree_decomposition};
pub use parse::{parse_poly, parse_ratfunc, parse_rational, rational_to_string};
pub use poly::Poly;
pub use ratfunc::{poles, valuation, Place, Pole, RatFunc};
