//! Exact finite-dimensional probability on Riesz spaces.
//!
//! Elements are rational-valued functions on a finite weighted atom set,
//! conditional expectations are weighted block averages over partitions, and
//! band projections are indicator multiplications. On top of that kernel the
//! crate provides checkers for conditional independence of band projections
//! and subspaces, for the Markov property of finite processes together with its
//! equivalent operator characterizations, and for martingale and Brownian-motion
//! axioms of partial-sum processes. Every check is exact equality of rationals.

pub mod condexp;
pub mod error;
pub mod harness;
pub mod independence;
pub mod limits;
pub mod markov;
pub mod matrix;
pub mod partition;
pub mod processes;
pub mod rational;
pub mod riesz;
pub mod witness;

pub use condexp::{condexp_onto, ConditionalExpectation};
pub use error::{Result, RieszError};
pub use limits::Limits;
pub use matrix::Matrix;
pub use partition::Partition;
pub use rational::Rational;
pub use riesz::{BandProjection, RieszElement, SampleSpace, Space};
