//! Evidence attached to failed identities.

use std::fmt;

use crate::matrix::Matrix;
use crate::riesz::RieszElement;

/// One side of an identity: an element or an operator.
#[derive(Clone, PartialEq, Eq)]
pub enum Evidence {
    Element(RieszElement),
    Operator(Matrix),
}

impl fmt::Debug for Evidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Evidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Evidence::Element(e) => write!(f, "{e}"),
            Evidence::Operator(m) => write!(f, "{m}"),
        }
    }
}

impl From<RieszElement> for Evidence {
    fn from(e: RieszElement) -> Self {
        Evidence::Element(e)
    }
}

impl From<Matrix> for Evidence {
    fn from(m: Matrix) -> Self {
        Evidence::Operator(m)
    }
}
