//! Exact computations with word maps on finite classical groups.

pub mod chars;
pub mod context;
pub mod error;
pub mod ff;
pub mod grp;
pub mod matgrp;
pub mod matrix;
pub mod store;
pub mod witness;
pub mod words;

pub use chars::{CharacterTable, StructureConstants};
pub use context::GroupData;
pub use error::{Error, Result};
pub use ff::Field;
pub use grp::{ClassData, EnumLimits, FiniteGroup};
pub use matgrp::{Family, GroupSpec};
pub use matrix::Matrix;
pub use store::{Cache, GroupBundle};
pub use witness::{Certificate, ExponentParams, Variant};
pub use words::{ClassUnion, ImageStrategy, Word};
