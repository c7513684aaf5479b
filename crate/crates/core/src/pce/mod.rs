//! Non-intrusive polynomial chaos: distributions and their orthogonal
//! families, graded multi-index sets, reproducible sampling, least-squares
//! fitting and empirical post-processing.

pub mod distribution;
pub mod empirical;
pub mod multi_index;
pub mod polynomial;
pub mod sampling;
pub mod surrogate;

pub use distribution::{Distribution, Family, UncertainInput};
pub use empirical::{chance_probability, compare_distributions, confidence_interval, EmpiricalDistribution, Histogram};
pub use multi_index::MultiIndexSet;
pub use polynomial::{univariate_polynomial, Basis};
pub use sampling::{derive_seed, draw_rows, draw_samples};
pub use surrogate::{
    evaluate_surrogate, fit_surrogate, surrogate_distribution, surrogate_moments, PceSurrogate,
};
