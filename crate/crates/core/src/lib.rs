//! Primitive and normal elements of finite field extensions F_{q^n}.
//!
//! The crate is layered bottom-up: integer arithmetic ([`numtheory`]),
//! the base field and polynomials over it ([`polyfq`]), the extension tower
//! ([`field`]), characters and indicator functions ([`characters`]),
//! exhaustive counting ([`counting`]), subset families ([`subsets`]) and a
//! claim checker ([`verify`]) that ties everything together.

pub mod characters;
pub mod counting;
mod error;
pub mod field;
pub mod numtheory;
pub mod polyfq;
pub mod registry;
pub mod seed;
pub mod subsets;
pub mod verify;

pub use error::{Error, Result};
pub use field::{ExtElement, FieldCtx, FieldSpec, NormalTest, RangeSpec};
pub use polyfq::{BaseField, Poly};

/// Default cap on the number of field elements any single enumeration may touch.
pub const DEFAULT_BUDGET: u64 = 1 << 24;
