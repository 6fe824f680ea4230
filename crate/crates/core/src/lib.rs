pub mod bounds;
pub mod distributions;
pub mod error;
pub mod estimator;
pub mod harness;
pub mod quad;
pub mod sample;
pub mod schedule;
pub mod seqmodel;
pub mod special;
pub mod spectral;

pub use distributions::{cf_true, pdf_true, sample, DistributionSpec};
pub use error::{Error, Result};
pub use sample::Sample;
