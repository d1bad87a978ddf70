//! Exact spectral and combinatorial machinery for the random inversion walk
//! on labelled tournaments.
//!
//! A tournament on `n` labelled vertices is encoded as a vector in
//! `F_2^m`, `m = n(n-1)/2`, recording which pairs disagree with a fixed
//! reference orientation. Inverting a vertex set `X` adds the clique vector
//! `v_X`, so the walk is a Cayley walk on `F_2^m` and everything reduces to
//! linear algebra and Fourier analysis over GF(2).
//!
//! Modules:
//!
//! - [`gf2`]: bit-packed vectors/matrices over GF(2) and the Walsh-Hadamard
//!   transform.
//! - [`encoding`]: pair indexing, clique vectors, inversions, inversion
//!   distance and balls.
//! - [`spectral`]: eigenvalues as quadratic-form character sums, exact total
//!   variation distance, and the spectral bounds.
//! - [`rank_stats`]: alternating-form rank census, random symmetric rank
//!   tails and the lower-tail / ball-volume bounds.
//! - [`restricted`]: the `k`-restricted walk, inclusion matrices and the
//!   parity description of the subgroup generated by `k`-cliques.
//! - [`walk_sim`]: seeded simulation, exact distribution evolution and
//!   cutoff profiles.

pub mod encoding;
pub mod error;
pub mod exact;
pub mod gf2;
pub mod rank_stats;
pub mod restricted;
pub mod rng;
pub mod spectral;
pub mod walk_sim;

pub use error::{Error, Result};
pub use exact::Dyadic;
pub use gf2::{Gf2Matrix, Gf2Vector, SignedTable};
