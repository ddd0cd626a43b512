//! Inputs shared by the benchmarks.

use keller_core::{default_var_names, parse_polynomial, PolyMap};

/// Parses a map written in the variables `x1..xn`.
pub fn map(texts: &[&str]) -> PolyMap {
    let names = default_var_names(texts.len());
    PolyMap::new(
        texts
            .iter()
            .map(|t| parse_polynomial(t, &names).expect("valid fixture"))
            .collect(),
    )
    .expect("square fixture")
}

/// The six-dimensional map with cubic-nilpotent Jacobian used throughout.
pub fn furter() -> PolyMap {
    keller_core::casebook::furter_map()
}
