//! Rainbow-coloring framework for coded caching and coded MapReduce.
//!
//! Users and packets are drawn from two families combined by an operation;
//! the combined elements that receive a color encode delivery, the uncolored
//! ones encode placement. The crate builds such schemes, checks the coloring
//! conditions that make them decodable, simulates placement/delivery/decoding
//! bytewise, and turns the same colorings into MapReduce shuffle plans.
//!
//! Module map:
//!
//! * [`universe`]: families, combining operations, forbidden patterns and
//!   rainbow colorings (validation, greedy and exact search).
//! * [`gf`]: GF(2)/GF(2^8) arithmetic, MDS matrices and packet kernels.
//! * [`schemes`]: caching schemes, placement delivery arrays and the
//!   catalog of known constructions.
//! * [`rainbow3ap`]: schemes from colorings of sets with rainbow 3-term
//!   arithmetic progressions.
//! * [`mapreduce`]: map assignment, shuffle synthesis and reduce checks.
//! * [`simulator`]: demand sweeps and bound comparisons.

pub mod gf;
pub mod mapreduce;
pub mod par;
pub mod rainbow3ap;
pub mod rational;
pub mod schemes;
pub mod simulator;
pub mod universe;

pub use rational::Rational;
