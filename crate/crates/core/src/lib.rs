//! Exact rational computations for Whittaker pairs, deformation chains and
//! nilpotent orbit degenerations in `gl_n`.
//!
//! Everything is computed over Q with arbitrary-precision integers. Elements of
//! `gl_n` are `n x n` matrices; subspaces of `gl_n` are stored in reduced row
//! echelon form with respect to the row-major basis `E_11, E_12, ..., E_nn`.

pub mod error;
pub mod exactlin;
pub mod glmain;
pub mod gln;
pub mod grading;
pub mod mirabolic;
pub mod partitions;
pub mod principal;
pub mod suites;
pub mod whittaker;

pub use error::{Error, Result};
pub use exactlin::{Matrix, Scalar, Subspace};
pub use partitions::{Composition, Partition};

/// Exact rational number with arbitrary-precision numerator and denominator.
pub type Rational = num_rational::BigRational;

/// Dense matrix over Q.
pub type QMatrix = Matrix<Rational>;

/// Subspace of Q^d in canonical RREF form.
pub type QSubspace = Subspace<Rational>;

/// Builds a rational from an integer.
pub fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Builds the rational `num / den`. Panics when `den == 0`.
pub fn qf(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

/// Canonical string form: `"p/q"`, or `"p"` when the denominator is one.
pub fn rational_to_string(x: &Rational) -> String {
    x.to_string()
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    s.trim()
        .parse::<Rational>()
        .map_err(|_| Error::Parse(format!("not a rational number: {s:?}")))
}

pub(crate) mod ser {
    use crate::Rational;
    use serde::ser::SerializeSeq;
    use serde::Serializer;

    pub fn rational<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn rationals<S: Serializer>(xs: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&x.to_string())?;
        }
        seq.end()
    }
}
