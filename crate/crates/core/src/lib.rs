//! Rate regions, channel-set distances and continuity certificates for
//! compound broadcast channels with confidential messages.
//!
//! A compound broadcast channel is a finite family of pairs `(W_s, V_s)`:
//! `W_s` carries a common and a confidential message to the legitimate
//! receiver, `V_s` reaches an eavesdropper that must learn nothing about
//! the confidential message. The sender knows the family but not the
//! active state.
//!
//! The crate computes
//! - grid-based inner approximations of the rate region ([`region`]),
//! - distances between channels, families and regions ([`metrics`]),
//! - the continuity bounds relating the two, checked on random and
//!   adversarial instances ([`continuity`]),
//! - the symmetrizability flip of a parameterised arbitrarily varying
//!   channel ([`avc`]).

pub mod avc;
pub mod channel;
pub mod cli;
pub mod continuity;
pub mod error;
pub mod geometry;
pub mod info;
pub mod io;
pub mod lp;
pub mod metrics;
pub mod region;
pub mod sampling;

pub use avc::{example_family, lambda_sweep, symmetrizability_check, AvcFamily, SymmetrizerResult};
pub use channel::{
    marginals, perturb_compound, product_channel, validate_channel, BroadcastPair, Channel, CompoundBcc,
    JointChannel, ProbVector,
};
pub use continuity::{
    delta1, delta2, hybrid_distribution, verify_capacity_continuity, verify_entropy_continuity, verify_mi_continuity,
    verify_rectangle_continuity, verify_telescoping, ContinuityReport, DeltaBundle,
};
pub use error::{Error, Result};
pub use geometry::{convex_hull, RatePoint};
pub use info::{
    binary_entropy, conditional_mutual_information, entropy, induced_joint, mutual_information, total_variation,
    AuxiliaryInput, JointDistribution,
};
pub use metrics::{
    channel_distance, channel_distance_witness, compound_distance, directed_set_distance, pair_distance, rectangle_corner_gap,
    region_distance, Direction, RegionPointSet,
};
pub use region::{capacity_region_approx, rate_rectangle, region_mn, GridSpec, RateRectangle, RegionApproximation};
