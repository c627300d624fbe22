//! Exact truncated algebra of Chen-Fliess series.
//!
//! Series are stored with rational coefficients up to a truncation degree `N` and every
//! product is exact on the words it reports. See the crate README for the file formats
//! used by the `fpa` binary.

pub mod compose;
pub mod error;
pub mod feedback;
pub mod growth;
pub mod io;
pub mod series;
pub mod shuffle;
pub mod sim;
pub mod taylor;
pub mod word;

pub use compose::{composition, group_inverse, group_product, mixed_composition, wf_compose, wf_compose_hopf};
pub use error::{FpaError, Result};
pub use feedback::{dynamic_feedback, relative_degree, static_feedback, static_feedback_fixed_point};
pub use series::{q, qr, CommSeries, Monomial, NCSeries, Q};
pub use shuffle::{shuffle, shuffle_inverse, shuffle_inverse_antipode};
pub use word::Word;
