//! Hierarchies, ultrametrics and their number-theoretic encodings.
//!
//! Build a [`Dendrogram`] from a [`DissimilarityMatrix`] with
//! [`agglomerate`], read it back as an ultrametric with
//! [`ultrametric::cophenetic_matrix`], and move between equivalent
//! representations: p-adic codes ([`padic`]), longest-common-prefix strings
//! ([`baire`]), wavelet coefficients ([`haar`]) and permutations
//! ([`permutations`]). [`lattice`] covers set-valued dissimilarities on
//! boolean data.
//!
//! ```
//! use ultrahier::{agglomerate, pairwise_distances, Linkage, Metric};
//! use ultrahier::ultrametric::{cophenetic_matrix, verify_ultrametric};
//!
//! let rows = vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![5.0, 5.0]];
//! let d = pairwise_distances(&rows, Metric::Euclidean).unwrap();
//! let tree = agglomerate(&d, Linkage::Complete).unwrap();
//! let u = cophenetic_matrix(&tree);
//! assert!(verify_ultrametric(&u, 0.0).is_empty());
//! ```

pub mod baire;
pub mod error;
pub mod haar;
pub mod lattice;
pub mod hierarchy;
pub mod io;
pub mod matrix;
pub mod padic;
pub mod permutations;
pub mod render;
pub mod scalar;
pub mod ultrametric;

pub use error::{Error, Result};
pub use hierarchy::{agglomerate, agglomerate_contiguous, agglomerate_naive, Dendrogram, Linkage, Merge, NodeRef};
pub use matrix::{pairwise_distances, DissimilarityMatrix, Metric};
pub use scalar::Scalar;

pub type Dendrogram64 = Dendrogram<f64>;
pub type Dendrogram32 = Dendrogram<f32>;
pub type DissimilarityMatrix64 = DissimilarityMatrix<f64>;
pub type DissimilarityMatrix32 = DissimilarityMatrix<f32>;
