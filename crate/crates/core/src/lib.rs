//! Index computations for minimal zero-sum sequences over `Z_n`.
//!
//! * [`arith`]: residues in `[1, n]`, factorization, the unit group.
//! * [`sequence`]: multisets over `Z_n`, minimality, enumeration, orbits.
//! * [`index`]: the index itself and the two sufficient criteria for index one.
//! * [`witness`]: constructive unit witnesses and the certifying dispatcher.
//! * [`campaign`]: exhaustive and sampled verification runs over ranges of `n`.

pub mod arith;
pub mod campaign;
pub mod error;
pub mod index;
pub mod sequence;
pub mod witness;

pub use arith::GroupContext;
pub use error::{Error, Result};
pub use index::{index_oracle, IndexResult};
pub use sequence::ZsSequence;
pub use witness::{certify_index_one, Criterion, UnitCertificate, WitnessTrace};
