//! Exact bounds on the embedding number ε(Y): the least `n` such that a closed
//! oriented 3-manifold `Y` embeds smoothly in `#_n S²×S²`.
//!
//! Upper bounds come from even-framed surgery presentations ([`kirby`]) and
//! explicit splittings ([`splitcon`]); lower bounds from a search over spin
//! splittings constrained by Rokhlin and 10/8 ([`obstruct`]). [`propagate`]
//! combines both over the lens spaces `L(n, n-1)`.

pub mod bound;
pub mod error;
pub mod forms;
pub mod kirby;
pub mod manifolds;
pub mod obstruct;
pub mod propagate;
pub mod splitcon;

pub use bound::{Assumption, Bound, Direction, Estimate};
pub use error::{Error, Result};
pub use forms::{FormSummary, QuadraticForm};
pub use obstruct::{Mode, SpinFilling, SplitConstraints};
