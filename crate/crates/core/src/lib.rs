//! Exact decision engine for anomalous exponent tuples.
//!
//! A tuple `0 < a_1 < ... < a_n` with `gcd = 1` is anomalous when the matrix
//! with rows `(a_i, a_i^2, ..., a_i^{n-2}, z^{a_i} - 1)` drops rank at some
//! `z != 1`. [`ranktest::decide`] settles this exactly through the GCD of the
//! augmented matrix's maximal minors and emits a [`RankCertificate`].
//! [`heights`] and [`lattice`] reproduce the quantitative finiteness bounds
//! for quadruples, [`search`] drives exhaustive sharded runs, and [`oracle`]
//! is an independent floating-point cross-check.

pub mod error;
pub mod heights;
pub mod lattice;
pub mod numeric;
pub mod oracle;
pub mod polyarith;
pub mod ranktest;
pub mod roots;
pub mod search;

pub use error::{Error, Result};
pub use lattice::{orthogonal_lattice, LatticeBasis};
pub use oracle::{root_scan, IncidenceScan};
pub use polyarith::{CyclotomicVerdict, DensePolynomial, SparsePolynomial};
pub use ranktest::{decide, Classification, ExponentTuple, MinorSystem, RankCertificate};
pub use search::{SearchConfig, SearchSummary};
