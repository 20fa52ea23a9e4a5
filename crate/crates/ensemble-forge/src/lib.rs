//! Classical random matrix ensembles sampled through matrix factorizations.
//!
//! Matrices over the reals, complexes and quaternions share one storage type,
//! [`DenseMatrix`], tagged with a [`FieldTag`] (`beta` = 1, 2, 4). Quaternion
//! matrices are stored as their `2n x 2n` complex embedding.
//!
//! The modules, bottom up:
//!
//! - [`matrix`]: Gaussian and Haar sampling, QL, Hermitian eigendecomposition, SVD.
//! - [`factorizations`]: CSD, GSVD, `U = O1 D O2` and `U = Q1 D Q2`.
//! - [`roots`]: restricted root tables, Jacobians and the map to classical
//!   ensemble parameters.
//! - [`pingpong`]: numerical root multiplicities from `ad_H` on explicit Lie algebras.
//! - [`ensembles`]: Hermite, Laguerre, Jacobi and circular samplers, each along
//!   one or more [`SamplerPath`](ensembles::SamplerPath)s.
//! - [`stats`] and [`verify`]: KS tests, quadrature marginals, check suites.
//! - [`cli`]: the `sample`, `verify`, `params` and `roots` subcommands.
//!
//! ```
//! use ensemble_forge::ensembles::{sample, EnsembleSpec, SamplerPath};
//! use ensemble_forge::RngState;
//!
//! let spec = EnsembleSpec::jacobi(3, 2, 1, 2, SamplerPath::Gsvd).unwrap();
//! let batch = sample(&spec, 100, &mut RngState::new(7)).unwrap();
//! assert!(batch.column(0).iter().all(|x| (0.0..=1.0).contains(x)));
//! ```
//!
//! Batches are reproducible: draw `i` uses its own ChaCha stream, so results do
//! not depend on the number of threads.

pub mod cli;
pub mod ensembles;
pub mod error;
pub mod factorizations;
pub mod field;
pub mod matrix;
pub mod pingpong;
pub mod rng;
pub mod roots;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
pub use field::FieldTag;
pub use matrix::DenseMatrix;
pub use rng::RngState;
