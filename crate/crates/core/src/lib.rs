//! Hermitian self-orthogonal `[n, 2, n-1]` codes over GF(q^2) with dual
//! distance 3, for odd prime powers q and every `4 <= n <= q^2 + 1`, and
//! the `[[n, n-4, 3]]_q` quantum MDS codes they give.
//!
//! - [`gf`]: table-driven GF(q^2) arithmetic, conjugation, norm.
//! - [`partition`]: the special six elements and the `±x` pairs.
//! - [`construct`]: one generator matrix per `(q, n)`.
//! - [`verify`]: certificates, with a brute-force distance oracle.
//! - [`search`]: exhaustive / random search and repair.
//! - [`format`]: matrix files and certificate documents.
//! - [`cli`]: the `qmds` subcommands.

pub mod cli;
pub mod construct;
pub mod error;
pub mod format;
pub mod gf;
pub mod partition;
pub mod search;
pub mod verify;

pub use construct::{construct, CaseTag, Construction, GeneratorMatrix};
pub use error::{Error, Result};
pub use gf::{make_field, Element, FieldCtx};
pub use verify::{certify, CodeCertificate, QuantumParams};
