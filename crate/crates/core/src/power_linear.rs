//! Power-linear maps `F = X + H`, `H_i = (A_i X)^{d_i}`, and the diagnostics
//! built on the matrix `A`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::inversion::{formal_inverse, InverseResult};
use crate::linalg::{self, principal_minor_scan, MinorScanReport, RatMatrix};
use crate::poly::Polynomial;
use crate::polymap::PolyMap;
use crate::scalar::Scalar;

/// The matrix `A` and exponents `d_i >= 2`. Rows of `A` may be zero, in which
/// case `H_i = 0` and `d_i` is carried along anyway.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PowerLinearData {
    pub a: RatMatrix,
    pub degrees: Vec<u32>,
}

impl PowerLinearData {
    pub fn new(a: RatMatrix, degrees: Vec<u32>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NotSquare {
                rows: a.rows(),
                cols: a.cols(),
            });
        }
        if degrees.len() != a.rows() {
            return Err(Error::DimensionMismatch(format!(
                "{} exponents for a {}x{} matrix",
                degrees.len(),
                a.rows(),
                a.cols()
            )));
        }
        if let Some(d) = degrees.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidInput(format!("exponent {d} is below 2")));
        }
        Ok(PowerLinearData { a, degrees })
    }

    /// All exponents equal to `d`.
    pub fn homogeneous(a: RatMatrix, d: u32) -> Result<Self> {
        let n = a.rows();
        PowerLinearData::new(a, vec![d; n])
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    pub fn row_form(&self, i: usize) -> Polynomial {
        Polynomial::linear_form(self.a.row(i))
    }

    /// Components of `H`.
    pub fn h(&self) -> Vec<Polynomial> {
        (0..self.dim())
            .map(|i| self.row_form(i).pow(self.degrees[i]))
            .collect()
    }

    pub fn max_degree(&self) -> u32 {
        self.degrees.iter().copied().max().unwrap_or(2)
    }
}

/// `F = X + (AX)^{*d}`.
pub fn realize_map(data: &PowerLinearData) -> PolyMap {
    PolyMap::from_h(data.h()).expect("consistent dimensions")
}

/// `F∘G = G + (A·G)^{*d}` without expanding `F`.
pub fn compose_power_linear(data: &PowerLinearData, g: &PolyMap) -> Result<PolyMap> {
    let n = data.dim();
    if g.dim() != n {
        return Err(Error::DimensionMismatch(format!(
            "cannot compose a map of dimension {n} with one of dimension {}",
            g.dim()
        )));
    }
    let comps = (0..n)
        .map(|i| {
            let row = data.a.row(i);
            let mut lin = Polynomial::zero(n);
            for (j, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    lin = &lin + &g.component(j).scale(c);
                }
            }
            g.component(i) + &lin.pow(data.degrees[i])
        })
        .collect();
    PolyMap::new(comps)
}

/// `Tr JH = sum_i d_i A_ii (A_i X)^{d_i - 1}`.
pub fn trace_jh(data: &PowerLinearData) -> Polynomial {
    let n = data.dim();
    (0..n).fold(Polynomial::zero(n), |acc, i| {
        let aii = &data.a[(i, i)];
        if aii.is_zero() {
            return acc;
        }
        let d = data.degrees[i];
        let coef = &Scalar::from_int(d as i64) * aii;
        &acc + &data.row_form(i).pow(d - 1).scale(&coef)
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct InverseSummary {
    pub certified: bool,
    pub degree: Option<u32>,
    pub bound: u32,
}

impl From<&InverseResult> for InverseSummary {
    fn from(r: &InverseResult) -> Self {
        InverseSummary {
            certified: r.certified,
            degree: r.inverse_degree(),
            bound: r.bound,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceFreeReport {
    pub trace_vanishes: bool,
    pub trace: String,
    /// `None` when `n < 2` and the minor condition is vacuous.
    pub minors: Option<MinorScanReport>,
    pub hypotheses_hold: bool,
    pub inverse: Option<InverseSummary>,
    #[serde(skip)]
    pub inverse_result: Option<InverseResult>,
}

/// Checks `Tr JH = 0` and vanishing of all principal minors of `A` of sizes
/// `2..=n`; when both hold, confirms invertibility by formal inversion.
pub fn trace_free_check(data: &PowerLinearData) -> Result<TraceFreeReport> {
    let n = data.dim();
    let f = realize_map(data);
    let trace = f.jacobian_h().trace()?;
    let trace_vanishes = trace.is_zero();
    let minors = if n >= 2 {
        Some(principal_minor_scan(&data.a, 2, n)?)
    } else {
        None
    };
    let minors_vanish = minors.as_ref().is_none_or(MinorScanReport::all_vanish);
    let hypotheses_hold = trace_vanishes && minors_vanish;
    let inverse_result = if hypotheses_hold {
        Some(formal_inverse(&f, None)?)
    } else {
        None
    };
    Ok(TraceFreeReport {
        trace_vanishes,
        trace: trace.to_string(),
        minors,
        hypotheses_hold,
        inverse: inverse_result.as_ref().map(InverseSummary::from),
        inverse_result,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorollaryReport {
    pub n: usize,
    pub rank: usize,
    pub corank: usize,
    pub keller: bool,
    pub cubic: bool,
    /// Inclusive size range `[2, n-4]`, `None` when empty.
    pub minor_range: Option<(usize, usize)>,
    /// Whether all principal minors in `minor_range` vanish (vacuously true
    /// for an empty range).
    pub minors_vanish_in_range: bool,
    pub diagonal_nonzero: bool,
    pub rank_at_most_half: bool,
    /// Verdict on the minor-range corollary's hypotheses.
    pub minor_corollary: String,
    /// Verdict on the nonzero-diagonal corollary's hypotheses.
    pub diagonal_corollary: String,
}

/// Hypothesis diagnostics for the Drużkowski corollaries. Their conclusions
/// rest on external theorems and are never certified here.
pub fn corollary_diagnostics(data: &PowerLinearData) -> Result<CorollaryReport> {
    let n = data.dim();
    let rank = linalg::rank(&data.a);
    let f = realize_map(data);
    let keller = f.is_keller();
    let cubic = data.degrees.iter().all(|&d| d == 3);
    let minor_range = (n >= 6).then(|| (2, n - 4));
    let minors_vanish_in_range = match minor_range {
        Some((lo, hi)) => principal_minor_scan(&data.a, lo, hi)?.all_vanish(),
        None => true,
    };
    let diagonal_nonzero = (0..n).all(|i| !data.a[(i, i)].is_zero());
    let rank_at_most_half = rank <= n / 2;
    let minor_corollary = if !(keller && cubic) {
        "not applicable: requires a cubic power-linear map with det JF = 1".to_string()
    } else if minors_vanish_in_range {
        "hypothesis satisfied; conclusion per cited external theorem".to_string()
    } else {
        "hypothesis not satisfied".to_string()
    };
    let diagonal_corollary = if !(keller && cubic) || !diagonal_nonzero {
        "not applicable: requires det JF = 1, cubic exponents and a nonzero diagonal".to_string()
    } else if rank_at_most_half {
        "hypothesis satisfied; rank A <= floor(n/2) confirmed; conclusion per cited external theorem"
            .to_string()
    } else {
        "hypothesis satisfied but rank A > floor(n/2): contradicts the cited rank theorem".to_string()
    };
    Ok(CorollaryReport {
        n,
        rank,
        corank: n - rank,
        keller,
        cubic,
        minor_range,
        minors_vanish_in_range,
        diagonal_nonzero,
        rank_at_most_half,
        minor_corollary,
        diagonal_corollary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{default_var_names, parse_polynomial};
    use crate::polymap::detect_power_linear;

    fn map(texts: &[&str]) -> PolyMap {
        let names = default_var_names(texts.len());
        PolyMap::new(texts.iter().map(|t| parse_polynomial(t, &names).unwrap()).collect()).unwrap()
    }

    #[test]
    fn realize_examples() {
        let zero = PowerLinearData::homogeneous(RatMatrix::zeros(3, 3), 3).unwrap();
        assert!(realize_map(&zero).is_identity());
        let tri = PowerLinearData::homogeneous(RatMatrix::from_i64(&[&[0, 0], &[1, 0]]), 3).unwrap();
        assert_eq!(realize_map(&tri), map(&["x1", "x2 + x1^3"]));
        let dup = PowerLinearData::homogeneous(RatMatrix::from_i64(&[&[1, 1], &[2, 2]]), 2).unwrap();
        assert_eq!(
            realize_map(&dup),
            map(&["x1 + (x1 + x2)^2", "x2 + 4*(x1 + x2)^2"])
        );
    }

    #[test]
    fn detection_inverts_realization() {
        let data = PowerLinearData::new(
            RatMatrix::from_rows(vec![
                vec![Scalar::frac(1, 2), Scalar::from_int(-1), Scalar::zero()],
                vec![Scalar::zero(); 3],
                vec![Scalar::from_int(3), Scalar::zero(), Scalar::from_int(1)],
            ])
            .unwrap(),
            vec![3, 2, 4],
        )
        .unwrap();
        assert_eq!(detect_power_linear(&realize_map(&data)).unwrap(), data);
    }

    #[test]
    fn structured_composition_matches_generic() {
        let data = PowerLinearData::new(RatMatrix::from_i64(&[&[0, 1, -1], &[1, 0, 2], &[0, 0, 0]]), vec![2, 3, 2]).unwrap();
        let f = realize_map(&data);
        let g = map(&["x1 - x2^2", "x2 + x3^3", "2*x3 + x1*x2"]);
        assert_eq!(compose_power_linear(&data, &g).unwrap(), f.compose(&g).unwrap());
    }

    #[test]
    fn trace_formula_matches_jacobian_trace() {
        let data = PowerLinearData::new(RatMatrix::from_i64(&[&[2, 1, 0], &[0, -1, 1], &[1, 1, 1]]), vec![2, 3, 4]).unwrap();
        assert_eq!(trace_jh(&data), realize_map(&data).jacobian_h().trace().unwrap());
    }

    #[test]
    fn trace_free_triangular() {
        let a = RatMatrix::from_i64(&[&[0, 0, 0], &[1, 0, 0], &[2, -1, 0]]);
        let rep = trace_free_check(&PowerLinearData::homogeneous(a, 3).unwrap()).unwrap();
        assert!(rep.trace_vanishes && rep.hypotheses_hold);
        let inv = rep.inverse_result.unwrap();
        assert!(inv.certified);
    }

    #[test]
    fn trace_free_identity_fails() {
        let rep = trace_free_check(&PowerLinearData::homogeneous(RatMatrix::identity(3), 3).unwrap()).unwrap();
        assert!(!rep.trace_vanishes);
        assert!(!rep.hypotheses_hold);
        assert!(rep.inverse.is_none());
    }

    #[test]
    fn trace_free_permuted_nilpotent_block() {
        // [[0,1],[0,0]] conjugated by the swap permutation
        let a = RatMatrix::from_i64(&[&[0, 0], &[1, 0]]);
        let rep = trace_free_check(&PowerLinearData::homogeneous(a, 2).unwrap()).unwrap();
        assert!(rep.hypotheses_hold);
        let inv = rep.inverse_result.unwrap();
        let g = inv.inverse().unwrap();
        assert!(map(&["x1", "x2 + x1^2"]).compose(g).unwrap().is_identity());
    }

    #[test]
    fn corollary_examples() {
        let mut a = RatMatrix::zeros(6, 6);
        for i in 1..6 {
            a[(i, i - 1)] = Scalar::from_int(1);
        }
        let rep = corollary_diagnostics(&PowerLinearData::homogeneous(a, 3).unwrap()).unwrap();
        assert_eq!(rep.minor_range, Some((2, 2)));
        assert!(rep.minors_vanish_in_range);
        assert!(!rep.diagonal_nonzero);
        assert!(rep.keller);

        let rep = corollary_diagnostics(&PowerLinearData::homogeneous(RatMatrix::identity(4), 3).unwrap()).unwrap();
        assert!(rep.diagonal_nonzero);
        assert_eq!(rep.rank, 4);
        assert!(!rep.rank_at_most_half);
        assert!(!rep.keller);
        assert!(rep.diagonal_corollary.starts_with("not applicable"));

        // rank one, u = (1,1), v = (1,-1): sum u_i^3 v_i = 0 makes JH^2 = 0
        let a = RatMatrix::from_i64(&[&[1, -1], &[1, -1]]);
        let rep = corollary_diagnostics(&PowerLinearData::homogeneous(a, 3).unwrap()).unwrap();
        assert!(rep.keller && rep.diagonal_nonzero && rep.rank_at_most_half);
        assert!(rep.diagonal_corollary.contains("confirmed"));
    }
}
