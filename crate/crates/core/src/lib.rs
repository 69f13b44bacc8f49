//! Divided-difference calculus over arbitrary commutative rings.
//!
//! Rational maps are parsed from text ([`expr::MapExpr`]) and evaluated over a
//! runtime-selected ring ([`ring::RingDescriptor`]): exact rationals, `Z/m`,
//! approximate reals, or the quotient algebras of [`algebra`].

#![allow(clippy::needless_range_loop)]

pub mod algebra;
pub mod cubic;
pub mod error;
pub mod expr;
pub mod jet;
pub mod ring;
pub mod simplicial;
pub mod verify;

pub use error::{Error, Result};
pub use expr::{Expr, MapExpr, ParseError};
pub use ring::{RingDescriptor, RingElement};
