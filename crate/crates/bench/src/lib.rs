//! Shared fixtures for the evaluation benchmarks.

use foxwright::params::named::{set_a, set_b, set_c};
use foxwright::ParameterSet;

/// The three reference sets, labelled for benchmark ids.
pub fn reference_sets() -> [(&'static str, ParameterSet); 3] {
    [("set_a", set_a()), ("set_b", set_b()), ("set_c", set_c())]
}

/// Evaluation points as fractions of the support end.
pub const SUPPORT_FRACTIONS: [f64; 3] = [0.1, 0.5, 0.95];
