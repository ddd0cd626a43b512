//! Exact computer algebra for polynomial maps `F = X + H` over the
//! rationals: sparse polynomials, rational linear algebra, power-linear
//! maps, Gorni–Zampieri pairing and certified inversion.

pub mod casebook;
pub mod error;
pub mod files;
pub mod inversion;
pub mod linalg;
pub mod pairing;
pub mod poly;
pub mod polymap;
pub mod power_linear;
pub mod rng;
pub mod scalar;
pub mod waring;

pub use error::{Error, Result};
pub use inversion::{formal_inverse, InverseResult, Verdict};
pub use linalg::RatMatrix;
pub use pairing::{GZPair, PairStatus};
pub use poly::{default_var_names, parse_polynomial, Degree, Monomial, Polynomial};
pub use polymap::{HomogeneousProfile, PolyMap, PolyMatrix};
pub use power_linear::PowerLinearData;
pub use rng::SplitMix64;
pub use scalar::Scalar;
