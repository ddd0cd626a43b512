//! Sparse multivariate polynomials over the rationals.
//!
//! A [`Polynomial`] has a fixed arity and stores its terms as a vector sorted
//! in graded-lex order (total degree ascending, then lexicographically
//! descending exponents), with no zero coefficients. Two polynomials are equal
//! iff their term vectors are equal, so derived equality is structural
//! equality of canonical forms.

mod parse;

pub use parse::{default_var_names, parse_polynomial, Parser};

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Exponent vector of a monomial.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Box<[u32]>);

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial(exps.into_boxed_slice())
    }

    pub fn one(arity: usize) -> Self {
        Monomial(vec![0; arity].into_boxed_slice())
    }

    /// The monomial `x_j` (0-based).
    pub fn var(arity: usize, j: usize) -> Self {
        let mut e = vec![0; arity];
        e[j] = 1;
        Monomial::new(e)
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn exponent(&self, j: usize) -> u32 {
        self.0[j]
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Product of monomials; exponent overflow is a hard error.
    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.arity(), other.arity());
        Monomial(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a.checked_add(*b).expect("exponent overflow"))
                .collect(),
        )
    }

    /// Variables with nonzero exponent, each repeated by its exponent.
    pub fn factors(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.degree() as usize);
        for (j, &e) in self.0.iter().enumerate() {
            for _ in 0..e {
                out.push(j);
            }
        }
        out
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Total degree, with the zero polynomial at minus infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(u32),
}

impl Degree {
    pub fn finite(self) -> Option<u32> {
        match self {
            Degree::NegInfinity => None,
            Degree::Finite(d) => Some(d),
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInfinity => f.write_str("-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    arity: usize,
    terms: Vec<(Monomial, Scalar)>,
}

impl Polynomial {
    pub fn zero(arity: usize) -> Self {
        Polynomial {
            arity,
            terms: Vec::new(),
        }
    }

    pub fn one(arity: usize) -> Self {
        Polynomial::constant(arity, Scalar::one())
    }

    pub fn constant(arity: usize, c: Scalar) -> Self {
        Polynomial::monomial(arity, Monomial::one(arity), c)
    }

    /// The variable `x_j` (0-based).
    pub fn var(arity: usize, j: usize) -> Self {
        assert!(j < arity, "variable index {j} out of range for arity {arity}");
        Polynomial::monomial(arity, Monomial::var(arity, j), Scalar::one())
    }

    pub fn monomial(arity: usize, m: Monomial, c: Scalar) -> Self {
        assert_eq!(m.arity(), arity, "monomial arity");
        if c.is_zero() {
            Polynomial::zero(arity)
        } else {
            Polynomial {
                arity,
                terms: vec![(m, c)],
            }
        }
    }

    /// The linear form `sum_j coeffs[j] * x_j`.
    pub fn linear_form(coeffs: &[Scalar]) -> Self {
        let arity = coeffs.len();
        let mut terms: Vec<(Monomial, Scalar)> = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| (Monomial::var(arity, j), c.clone()))
            .collect();
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        Polynomial { arity, terms }
    }

    /// Builds a canonical polynomial from arbitrary (possibly repeated) terms.
    pub fn from_terms(arity: usize, terms: impl IntoIterator<Item = (Monomial, Scalar)>) -> Self {
        let mut acc: HashMap<Monomial, Scalar> = HashMap::new();
        for (m, c) in terms {
            assert_eq!(m.arity(), arity, "monomial arity");
            if c.is_zero() {
                continue;
            }
            match acc.get_mut(&m) {
                Some(v) => *v += &c,
                None => {
                    acc.insert(m, c);
                }
            }
        }
        Self::from_map(arity, acc)
    }

    fn from_map(arity: usize, acc: HashMap<Monomial, Scalar>) -> Self {
        let mut terms: Vec<(Monomial, Scalar)> =
            acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        Polynomial { arity, terms }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Terms in graded-lex order.
    pub fn terms(&self) -> &[(Monomial, Scalar)] {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.is_one())
    }

    pub fn coefficient(&self, m: &Monomial) -> Scalar {
        match self.terms.binary_search_by(|(k, _)| k.cmp(m)) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => Scalar::zero(),
        }
    }

    pub fn constant_term(&self) -> Scalar {
        self.coefficient(&Monomial::one(self.arity))
    }

    pub fn degree(&self) -> Degree {
        match self.terms.last() {
            None => Degree::NegInfinity,
            Some((m, _)) => Degree::Finite(m.degree()),
        }
    }

    /// Lowest total degree of a term.
    pub fn low_degree(&self) -> Degree {
        match self.terms.first() {
            None => Degree::NegInfinity,
            Some((m, _)) => Degree::Finite(m.degree()),
        }
    }

    /// Homogeneous components keyed by degree; their sum is `self`.
    pub fn homogeneous_components(&self) -> BTreeMap<u32, Polynomial> {
        let mut out: BTreeMap<u32, Polynomial> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.degree())
                .or_insert_with(|| Polynomial::zero(self.arity))
                .terms
                .push((m.clone(), c.clone()));
        }
        out
    }

    /// `Some(d)` if every term has degree `d`; `None` for the zero polynomial
    /// or a non-homogeneous one.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let (lo, hi) = (self.low_degree(), self.degree());
        match (lo, hi) {
            (Degree::Finite(a), Degree::Finite(b)) if a == b => Some(a),
            _ => None,
        }
    }

    /// Drops all terms of degree above `max_degree`.
    pub fn truncate(&self, max_degree: u32) -> Polynomial {
        let cut = self.terms.partition_point(|(m, _)| m.degree() <= max_degree);
        Polynomial {
            arity: self.arity,
            terms: self.terms[..cut].to_vec(),
        }
    }

    /// Variables that occur in some term.
    pub fn support_vars(&self) -> Vec<usize> {
        let mut used = vec![false; self.arity];
        for (m, _) in &self.terms {
            for (j, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    used[j] = true;
                }
            }
        }
        (0..self.arity).filter(|&j| used[j]).collect()
    }

    fn check_arity(&self, other: &Polynomial) -> Result<()> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: other.arity,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_arity(other)?;
        Ok(self.merge(other, false))
    }

    pub fn try_sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_arity(other)?;
        Ok(self.merge(other, true))
    }

    pub fn try_mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_arity(other)?;
        Ok(self.mul_truncated(other, None))
    }

    fn merge(&self, other: &Polynomial, negate: bool) -> Polynomial {
        let mut terms = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    terms.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    let c = if negate { -&b[j].1 } else { b[j].1.clone() };
                    terms.push((b[j].0.clone(), c));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate {
                        &a[i].1 - &b[j].1
                    } else {
                        &a[i].1 + &b[j].1
                    };
                    if !c.is_zero() {
                        terms.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        terms.extend(a[i..].iter().cloned());
        for (m, c) in &b[j..] {
            let c = if negate { -c } else { c.clone() };
            terms.push((m.clone(), c));
        }
        Polynomial {
            arity: self.arity,
            terms,
        }
    }

    /// Product, keeping only terms of degree at most `max_degree` when given.
    pub fn mul_truncated(&self, other: &Polynomial, max_degree: Option<u32>) -> Polynomial {
        assert_eq!(self.arity, other.arity, "arity mismatch in multiplication");
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero(self.arity);
        }
        if let Some(c) = other.as_constant() {
            return self.scale(&c).truncate(max_degree.unwrap_or(u32::MAX));
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c).truncate(max_degree.unwrap_or(u32::MAX));
        }
        let limit = max_degree.unwrap_or(u32::MAX);
        let mut acc: HashMap<Monomial, Scalar> =
            HashMap::with_capacity(self.terms.len().saturating_mul(other.terms.len()).min(1 << 20));
        for (ma, ca) in &self.terms {
            let da = ma.degree();
            if da > limit {
                break;
            }
            for (mb, cb) in &other.terms {
                if da + mb.degree() > limit {
                    break;
                }
                let m = ma.mul(mb);
                let c = ca * cb;
                match acc.get_mut(&m) {
                    Some(v) => *v += &c,
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        Self::from_map(self.arity, acc)
    }

    fn as_constant(&self) -> Option<Scalar> {
        match self.terms.as_slice() {
            [] => Some(Scalar::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn scale(&self, c: &Scalar) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.arity);
        }
        Polynomial {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.clone(), v * c))
                .collect(),
        }
    }

    pub fn pow(&self, exp: u32) -> Polynomial {
        self.pow_truncated(exp, None)
    }

    pub fn pow_truncated(&self, exp: u32, max_degree: Option<u32>) -> Polynomial {
        let mut result = Polynomial::one(self.arity);
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul_truncated(&base, max_degree);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_truncated(&base, max_degree);
            }
        }
        result
    }

    /// Partial derivative with respect to `x_j` (0-based).
    pub fn differentiate(&self, j: usize) -> Result<Polynomial> {
        if j >= self.arity {
            return Err(Error::IndexOutOfRange {
                index: j,
                arity: self.arity,
            });
        }
        let terms = self.terms.iter().filter_map(|(m, c)| {
            let e = m.exponent(j);
            if e == 0 {
                return None;
            }
            let mut exps = m.exponents().to_vec();
            exps[j] -= 1;
            Some((Monomial::new(exps), c * &Scalar::from_int(e as i64)))
        });
        Ok(Polynomial::from_terms(self.arity, terms))
    }

    /// Exact value at the point `a`.
    pub fn evaluate(&self, a: &[Scalar]) -> Result<Scalar> {
        if a.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: a.len(),
            });
        }
        let mut powers: Vec<Vec<Scalar>> = a.iter().map(|v| vec![Scalar::one(), v.clone()]).collect();
        let mut total = Scalar::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (j, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let p = &mut powers[j];
                while p.len() <= e as usize {
                    let next = p.last().unwrap() * &a[j];
                    p.push(next);
                }
                t *= &p[e as usize];
            }
            total += &t;
        }
        Ok(total)
    }

    /// Composition `p(g_1, ..., g_k)` where `k` is the arity of `p`.
    pub fn substitute(&self, g: &[Polynomial]) -> Result<Polynomial> {
        self.substitute_truncated(g, None)
    }

    /// Composition with every intermediate product truncated at `max_degree`.
    pub fn substitute_truncated(&self, g: &[Polynomial], max_degree: Option<u32>) -> Result<Polynomial> {
        if g.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: g.len(),
            });
        }
        let target = match g.first() {
            Some(p) => p.arity,
            None => {
                return Err(Error::InvalidInput(
                    "cannot substitute into an arity-0 polynomial".into(),
                ))
            }
        };
        if let Some(p) = g.iter().find(|p| p.arity != target) {
            return Err(Error::ArityMismatch {
                expected: target,
                found: p.arity,
            });
        }
        let mut cache = PowerCache::new(g, max_degree);
        let mut acc: HashMap<Monomial, Scalar> = HashMap::new();
        // Products of powers are memoized on exponent prefixes so terms that
        // share leading factors reuse work.
        let mut prefix_memo: HashMap<Vec<u32>, Polynomial> = HashMap::new();
        for (m, c) in &self.terms {
            let prod = cache.monomial_value(m, &mut prefix_memo);
            for (pm, pc) in prod.terms {
                let v = &pc * c;
                match acc.get_mut(&pm) {
                    Some(x) => *x += &v,
                    None => {
                        acc.insert(pm, v);
                    }
                }
            }
        }
        Ok(Self::from_map(target, acc))
    }

    /// Re-embeds into a larger arity; existing variables keep their indices.
    pub fn extend_arity(&self, new_arity: usize) -> Polynomial {
        assert!(new_arity >= self.arity);
        if new_arity == self.arity {
            return self.clone();
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut e = m.exponents().to_vec();
                e.resize(new_arity, 0);
                (Monomial::new(e), c.clone())
            })
            .collect::<Vec<_>>();
        // Appending zero exponents preserves the order.
        Polynomial {
            arity: new_arity,
            terms,
        }
    }

    /// Renders with the given variable names, in graded-lex order.
    pub fn render(&self, names: &[String]) -> String {
        assert_eq!(names.len(), self.arity, "variable name count");
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || m.is_one() {
                factors.push(mag.to_string());
            }
            for (j, &e) in m.exponents().iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(names[j].clone()),
                    _ => factors.push(format!("{}^{}", names[j], e)),
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

struct PowerCache<'a> {
    g: &'a [Polynomial],
    max_degree: Option<u32>,
    powers: Vec<Vec<Polynomial>>,
}

impl<'a> PowerCache<'a> {
    fn new(g: &'a [Polynomial], max_degree: Option<u32>) -> Self {
        let arity = g[0].arity;
        PowerCache {
            g,
            max_degree,
            powers: g.iter().map(|_| vec![Polynomial::one(arity)]).collect(),
        }
    }

    fn power(&mut self, j: usize, e: u32) -> &Polynomial {
        while self.powers[j].len() <= e as usize {
            let next = self.powers[j]
                .last()
                .unwrap()
                .mul_truncated(&self.g[j], self.max_degree);
            self.powers[j].push(next);
        }
        &self.powers[j][e as usize]
    }

    fn monomial_value(&mut self, m: &Monomial, memo: &mut HashMap<Vec<u32>, Polynomial>) -> Polynomial {
        let exps = m.exponents();
        let arity = self.g[0].arity;
        // Longest memoized prefix.
        let last_nz = exps.iter().rposition(|&e| e > 0);
        let Some(last) = last_nz else {
            return Polynomial::one(arity);
        };
        let mut start = 0;
        let mut value = Polynomial::one(arity);
        for k in (0..=last).rev() {
            let key = exps[..=k].to_vec();
            if let Some(v) = memo.get(&key) {
                value = v.clone();
                start = k + 1;
                break;
            }
        }
        for j in start..=last {
            let e = exps[j];
            if e > 0 {
                let pw = self.power(j, e).clone();
                value = value.mul_truncated(&pw, self.max_degree);
            }
            if j < last && e > 0 {
                memo.insert(exps[..=j].to_vec(), value.clone());
            }
        }
        value
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&default_var_names(self.arity)))
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial[{}]({})", self.arity, self)
    }
}

impl Add<&Polynomial> for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.try_add(rhs).expect("arity mismatch in addition")
    }
}

impl Sub<&Polynomial> for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.try_sub(rhs).expect("arity mismatch in subtraction")
    }
}

impl Mul<&Polynomial> for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.try_mul(rhs).expect("arity mismatch in multiplication")
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: Polynomial) -> Polynomial {
        &self + &rhs
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: Polynomial) -> Polynomial {
        &self - &rhs
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            arity: self.arity,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}
