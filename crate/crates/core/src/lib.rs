//! Exact analysis of monotone simple games (monotone switching functions):
//! desirability and completeness, characteristic invariants of complete
//! games, weightedness decisions with integer weights, trade certificates of
//! non-weightedness, and isomorphism-free enumeration of complete games.
//!
//! ```
//! use threshold_lab::families::canada;
//! use threshold_lab::trades::{find_failure, TradeMode};
//! use threshold_lab::weightedness::decide_weighted;
//!
//! let ci = canada();
//! assert!(decide_weighted(&ci).is_none());
//! let report = find_failure(&ci, TradeMode::Invariant, 4);
//! assert_eq!(report.failing_k(), Some(2));
//! ```

pub mod classify;
pub mod coalition;
pub mod conjecture;
pub mod document;
pub mod enumeration;
pub mod error;
pub mod families;
pub mod formulas;
pub mod game;
pub mod invariants;
pub mod lattice;
pub mod lp;
pub mod trades;
pub mod weightedness;

pub use coalition::Coalition;
pub use error::{Error, Result};
pub use game::{DominanceVerdict, PlayerPartition, SimpleGame};
pub use invariants::CharacteristicInvariants;
pub use trades::{TradeMode, VectorialTrade};
pub use weightedness::WeightedRepresentation;
