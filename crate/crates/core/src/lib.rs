pub mod certified;
pub mod constructions;
pub mod energy;
pub mod error;
pub mod field;
pub mod incidence;
pub mod report;
pub mod search;
pub mod set;
pub mod verify;

pub use error::{Error, Result};
pub use field::{ArithOp, Elem, FieldCtx, FieldKind};
pub use report::{InequalityReport, Quantity, Relation, Verdict};
pub use set::{FSet, PairGraph, SetOp};
