//! Perfect hashing, counting, sequencing and uniform sampling of integer
//! sequences bounded entrywise and restricted by a boolean function of
//! pairwise entry comparisons.
//!
//! ```
//! use phorma::{builtin, Index};
//!
//! let spec = builtin::l_piece(7, 5).unwrap();
//! let idx = Index::compile(&spec).unwrap();
//! assert_eq!(*idx.count(), 190);
//! let alpha = idx.unrank(&60).unwrap();
//! assert_eq!(idx.rank(&alpha).unwrap(), 60);
//! ```

pub mod boolexpr;
pub mod builtin;
pub mod compositions;
pub mod count;
pub mod error;
pub mod hfamily;
pub mod index;
pub mod oracle;
pub mod redgen;
pub mod seqcore;
pub mod specio;

pub use boolexpr::{parse_bool, BoolExpr, CmpOp, Literal, Tri};
pub use compositions::{CompConstraint, Composition};
pub use count::Count;
pub use error::{Error, Result, Violation};
pub use hfamily::HVertexStore;
pub use index::{IndexStats, PhormaIndex, ReducedEntry};
pub use oracle::{brute_enum, verify, OracleReport};
pub use seqcore::{AscendingSeq, Bounds, PhormaSpec, ReducedSeq, Restriction};
pub use specio::{load_index, parse_spec, save_index};

/// Index with 64-bit ranks; compiling fails with [`Error::Overflow`] when
/// the family does not fit.
pub type Index = PhormaIndex<u64>;
/// Index with 128-bit ranks.
pub type WideIndex = PhormaIndex<u128>;
/// Index with arbitrary-precision ranks.
pub type BigIndex = PhormaIndex<num_bigint::BigUint>;
