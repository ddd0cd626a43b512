//! Decomposition of homogeneous forms into rational combinations of powers
//! of linear forms.
//!
//! Every monomial `x_{z_1} ... x_{z_e}` is expanded with the polarization
//! identity
//!
//! ```text
//! e! * z_1 ... z_e = sum over nonempty S ⊆ {1..e} of (-1)^(e-|S|) (sum_{i in S} z_i)^e
//! ```
//!
//! after which linear forms are normalized (first nonzero entry 1) and equal
//! forms are merged.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::scalar::Scalar;

/// `coefficient * (form · x)^exponent`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WaringTerm {
    pub coefficient: Scalar,
    pub form: Vec<Scalar>,
    pub exponent: u32,
}

impl WaringTerm {
    pub fn expand(&self) -> Polynomial {
        Polynomial::linear_form(&self.form)
            .pow(self.exponent)
            .scale(&self.coefficient)
    }
}

/// Scales `form` so its first nonzero entry is 1; returns the factor removed.
pub fn normalize_form(form: &mut [Scalar]) -> Option<Scalar> {
    let lead = form.iter().find(|c| !c.is_zero())?.clone();
    let inv = lead.recip().expect("nonzero");
    for c in form.iter_mut() {
        *c = &*c * &inv;
    }
    Some(lead)
}

/// Accumulates terms, merging equal normalized `(form, exponent)` pairs and
/// keeping first-appearance order.
#[derive(Default, Debug, Clone)]
pub struct TermAccumulator {
    terms: Vec<WaringTerm>,
    index: HashMap<(Vec<Scalar>, u32), usize>,
}

impl TermAccumulator {
    pub fn push(&mut self, coefficient: Scalar, mut form: Vec<Scalar>, exponent: u32) {
        let Some(lead) = normalize_form(&mut form) else {
            return;
        };
        let coefficient = &coefficient * &lead.pow(exponent);
        let key = (form, exponent);
        match self.index.get(&key) {
            Some(&i) => self.terms[i].coefficient += &coefficient,
            None => {
                self.index.insert(key.clone(), self.terms.len());
                self.terms.push(WaringTerm {
                    coefficient,
                    form: key.0,
                    exponent,
                });
            }
        }
    }

    pub fn finish(self) -> Vec<WaringTerm> {
        self.terms
            .into_iter()
            .filter(|t| !t.coefficient.is_zero())
            .collect()
    }
}

/// Exact decomposition `p = sum_j c_j (l_j · x)^d` of a homogeneous `p` of
/// degree `d >= 2`.
pub fn waring_decompose(p: &Polynomial) -> Result<Vec<WaringTerm>> {
    if p.is_zero() {
        return Ok(Vec::new());
    }
    let d = p
        .homogeneous_degree()
        .ok_or_else(|| Error::InvalidInput("polynomial is not homogeneous".into()))?;
    if d < 2 {
        return Err(Error::InvalidInput(format!(
            "degree {d} is below 2; only forms of degree >= 2 decompose into powers"
        )));
    }
    let n = p.arity();
    let mut acc = TermAccumulator::default();
    let fact_inv = Scalar::from_int(factorial(d)).recip().expect("nonzero");
    for (m, c) in p.terms() {
        let support: Vec<usize> = (0..n).filter(|&j| m.exponent(j) > 0).collect();
        if support.len() == 1 {
            let mut form = vec![Scalar::zero(); n];
            form[support[0]] = Scalar::one();
            acc.push(c.clone(), form, d);
            continue;
        }
        let z = m.factors();
        let e = z.len();
        let base = c * &fact_inv;
        for mask in 1u64..(1u64 << e) {
            let size = mask.count_ones() as usize;
            let mut form = vec![Scalar::zero(); n];
            for (bit, &var) in z.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    form[var] += &Scalar::one();
                }
            }
            let coef = if (e - size).is_multiple_of(2) { base.clone() } else { -&base };
            acc.push(coef, form, d);
        }
    }
    Ok(acc.finish())
}

fn factorial(d: u32) -> i64 {
    (1..=d as i64).product()
}

/// `sum_j c_j (l_j · x)^{e_j}` over `arity` variables.
pub fn expand_terms(terms: &[WaringTerm], arity: usize) -> Polynomial {
    terms
        .iter()
        .fold(Polynomial::zero(arity), |acc, t| &acc + &t.expand())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{default_var_names, parse_polynomial};

    fn p(text: &str, n: usize) -> Polynomial {
        parse_polynomial(text, &default_var_names(n)).unwrap()
    }

    #[test]
    fn polarization_of_a_product() {
        let q = p("x1*x2", 2);
        let terms = waring_decompose(&q).unwrap();
        assert_eq!(expand_terms(&terms, 2), q);
        // 1/2 (x1+x2)^2 - 1/2 x1^2 - 1/2 x2^2; the squares merge into nothing else
        assert_eq!(terms.len(), 3);
        let sum_form = vec![Scalar::one(), Scalar::one()];
        let t = terms.iter().find(|t| t.form == sum_form).unwrap();
        assert_eq!(t.coefficient, Scalar::frac(1, 2));
    }

    #[test]
    fn pure_power_is_a_single_term() {
        let terms = waring_decompose(&p("x1^2", 2)).unwrap();
        assert_eq!(
            terms,
            vec![WaringTerm {
                coefficient: Scalar::one(),
                form: vec![Scalar::one(), Scalar::zero()],
                exponent: 2
            }]
        );
    }

    #[test]
    fn furter_first_component() {
        let h1 = p("2*x2*x6 - 2*x3^2 - x4*x5", 6);
        let terms = waring_decompose(&h1).unwrap();
        assert_eq!(expand_terms(&terms, 6), h1);
        assert!(terms.iter().all(|t| t.exponent == 2));
        assert_eq!(terms.len(), 7);
    }

    #[test]
    fn normalization_and_repeated_variables() {
        let q = p("x1^2*x2 - 3*x2^3 + 5/2*x1*x2*x3", 3);
        let terms = waring_decompose(&q).unwrap();
        assert_eq!(expand_terms(&terms, 3), q);
        for t in &terms {
            assert_eq!(t.form.iter().find(|c| !c.is_zero()).unwrap(), &Scalar::one());
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(waring_decompose(&p("x1^2 + x2", 2)).is_err());
        assert!(waring_decompose(&p("x1 + x2", 2)).is_err());
        assert!(waring_decompose(&Polynomial::zero(2)).unwrap().is_empty());
    }
}
