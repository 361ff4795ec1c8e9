//! Tropical matrix ranks and the machinery to certify them.
//!
//! The crate is split by subject:
//!
//! - [`tropical`]: exact min-plus arithmetic, the tropical determinant with a
//!   uniqueness certificate, tropical rank and Barvinok rank search.
//! - [`geometry`]: small Galois fields and the projective planes PG(2,q),
//!   emitted as (weighted) tropical incidence matrices.
//! - [`lifting`]: truncated power series, Kapranov lift certificates and
//!   rank-3 realizability of point/line incidence patterns.
//! - [`hall`]: compilation of Boolean and polynomial systems into incidence
//!   patterns through Hall's coordinatization gadgets.
//! - [`text`]: the plain-text file formats shared by the command line tool.

pub mod geometry;
pub mod hall;
pub mod lifting;
pub mod poly;
pub mod rational;
pub mod text;
pub mod tropical;

pub use num_rational::BigRational;
