//! Quantized weight balancing and average consensus over directed graphs.
//!
//! Nodes of a strongly connected digraph talk only along edge directions and
//! only with a few bits per round. The crate provides
//!
//! - [`balancer`]: a weight-balancing protocol whose weights and balances are
//!   exact integer multiples of a diminishing step size, with an
//!   [`audit`](balancer::audit) layer checking its convergence invariants;
//! - [`consensus`]: average consensus with a probabilistic quantizer running
//!   on the same time scale as the balancing;
//! - [`harness`]: seeded Monte-Carlo experiments, bit-allocation sweeps and
//!   CSV output.
//!
//! The runnable programs under `examples/` walk through each of these.

pub mod balancer;
pub mod consensus;
pub mod digraph;
pub mod error;
pub mod harness;
pub mod numerics;
pub mod rng;

pub use balancer::{Balancer, EventKind};
pub use consensus::{ConsensusEngine, QuantRange};
pub use digraph::Digraph;
pub use error::{Error, Result};
pub use numerics::{AlphaSchedule, BitScheme, SplitRule, StepSchedule};
