//! Exact-arithmetic toolkit for toric minimal model programs.
//!
//! The crate works entirely at the fan level with arbitrary-precision
//! rational arithmetic: fans and torus-invariant divisors, equivariant
//! morphisms, relative Mori cones and extremal contractions, flips through
//! relative Proj of section polyhedra, terminal/canonical classification via
//! shed lattice points, and equivariant completions of contraction
//! morphisms. A small scenario suite rebuilds the classical low-dimensional
//! examples (a non-factorial divisorial contraction, a flip that raises the
//! relative Picard number, a non-Gorenstein target, an extremal Fano
//! contraction and a four-dimensional Mori fiber space) and checks every one
//! of their published properties bit-exactly.

pub mod arith;
pub mod cone;
pub mod divisor;
pub mod error;
pub mod fan;
pub mod intersection;
pub mod lattice;
pub mod lp;
pub mod mat;
pub mod mmp;
pub mod morphism;
pub mod polyhedron;
pub mod singularity;

pub use arith::{Int, QVec, Rat};
pub use error::{Error, Result};
