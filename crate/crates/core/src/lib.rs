//! Universal outer coset codes that weakly secure systematic MSR-style
//! storage codes, with exact finite-field arithmetic, an inner striped MDS
//! array code, and a verifier that certifies `g`-weak security by rank
//! computations and cross-checks it against an exhaustive
//! mutual-information oracle.

mod combin;
pub mod coset;
pub mod error;
pub mod field;
pub mod matrix;
pub mod numtheory;
pub mod oracle;
pub mod security;
pub mod storage;
pub mod text;

pub use coset::{Construction, CosetCode, CosetParams, OuterParams};
pub use error::{Error, Result};
pub use field::{FElem, FieldTower, Op};
pub use matrix::FMatrix;
pub use oracle::{equivalence_check, mi_oracle, EquivalenceReport};
pub use security::{is_weakly_secure, leakage, max_g, Mode, Quantifier, SecurityReport, Verifier};
pub use storage::{Check, EavesdropView, StorageCode, StorageCodeSpec, StructureReport};
