//! Exact-arithmetic workbench for n-partite two-setting, two-outcome
//! correlations: GHZ tables, non-signaling boxes, biseparable
//! decompositions, Bell expressions and local-polytope tests, plus a
//! statevector oracle and Monte-Carlo protocol simulations.
//!
//! Output bits follow the convention in [`behavior::ENCODING`]: bit `0`
//! is outcome `+1`, so a full correlator equals `(-1)^(parity of a')`.

pub mod behavior;
pub mod bell;
pub mod bisep;
pub mod certificate;
pub mod error;
pub mod lp;
pub mod nsbox;
pub mod oracle;
pub mod protocols;
pub mod rational;
pub mod root2;

pub use behavior::{mix, tensor, Behavior, Mixture, PartySubset, Sampler};
pub use bell::{classify, mermin_value, sigma_value, BellReport, MerminSign};
pub use bisep::{bisep_lp, enumerate_bipartitions, ghz_bisep_mixture, Bipartition};
pub use error::{Error, Result};
pub use nsbox::{ghz_behavior, ns_box, BoxFamily};
pub use rational::Rational;
pub use root2::Root2Scalar;
