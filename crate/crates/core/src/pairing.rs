//! Gorni–Zampieri pairing between a map `f` in dimension `r` and a map `F`
//! in dimension `n > r`: `f = B·F(Cx)`, `BC = I_r`, and `ker B` inside
//! the constant kernel of `J(F - X)` (equal to it for a strong pair).

use std::collections::HashMap;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::inversion::require_normalized;
use crate::linalg::{self, kernel_basis, matrix_with_kernel, right_inverse, RatMatrix};
use crate::poly::Polynomial;
use crate::polymap::PolyMap;
use crate::power_linear::{realize_map, PowerLinearData};
use crate::scalar::Scalar;
use crate::waring::waring_decompose;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PairStatus {
    Strong,
    Weak,
    /// The first failed condition: 1 for `f = B·F(Cx)`, 2 for `BC = I`,
    /// 3 for the kernel inclusion.
    Invalid(u8),
}

impl PairStatus {
    pub fn is_valid(self) -> bool {
        !matches!(self, PairStatus::Invalid(_))
    }
}

impl fmt::Display for PairStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairStatus::Strong => f.write_str("strong"),
            PairStatus::Weak => f.write_str("weak"),
            PairStatus::Invalid(c) => write!(f, "invalid (condition {c})"),
        }
    }
}

impl Serialize for PairStatus {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GZPair {
    /// The small map, dimension `r`.
    pub f: PolyMap,
    /// The large map `F`, dimension `n`.
    pub big: PolyMap,
    /// `r × n`.
    pub b: RatMatrix,
    /// `n × r`.
    pub c: RatMatrix,
    pub status: PairStatus,
}

impl GZPair {
    pub fn r(&self) -> usize {
        self.f.dim()
    }

    pub fn n(&self) -> usize {
        self.big.dim()
    }
}

/// Rows of `m` as linear forms in `m.cols()` variables.
fn row_forms(m: &RatMatrix) -> Vec<Polynomial> {
    (0..m.rows()).map(|i| Polynomial::linear_form(m.row(i))).collect()
}

/// `B·F(Cx)` as `r` polynomials in `r` variables.
pub fn pull_back(big: &PolyMap, b: &RatMatrix, c: &RatMatrix) -> Result<Vec<Polynomial>> {
    let n = big.dim();
    if b.cols() != n || c.rows() != n || b.rows() != c.cols() {
        return Err(Error::DimensionMismatch(format!(
            "B is {}x{}, C is {}x{}, F has dimension {n}",
            b.rows(),
            b.cols(),
            c.rows(),
            c.cols()
        )));
    }
    let r = b.rows();
    let cx = row_forms(c);
    let fc: Vec<Polynomial> = big
        .components()
        .iter()
        .map(|p| p.substitute(&cx))
        .collect::<Result<_>>()?;
    Ok((0..r)
        .map(|i| {
            fc.iter()
                .zip(b.row(i))
                .filter(|(_, coef)| !coef.is_zero())
                .fold(Polynomial::zero(r), |acc, (p, coef)| &acc + &p.scale(coef))
        })
        .collect())
}

/// Checks the three pairing conditions in order.
pub fn verify_pairing(f: &PolyMap, big: &PolyMap, b: &RatMatrix, c: &RatMatrix) -> Result<PairStatus> {
    let r = f.dim();
    let n = big.dim();
    if r >= n {
        return Err(Error::DimensionMismatch(format!(
            "the small dimension {r} must be below the large dimension {n}"
        )));
    }
    if (b.rows(), b.cols()) != (r, n) || (c.rows(), c.cols()) != (n, r) {
        return Err(Error::DimensionMismatch(format!(
            "expected B {r}x{n} and C {n}x{r}, got {}x{} and {}x{}",
            b.rows(),
            b.cols(),
            c.rows(),
            c.cols()
        )));
    }
    if pull_back(big, b, c)? != f.components() {
        return Ok(PairStatus::Invalid(1));
    }
    if b.mul(c)? != RatMatrix::identity(r) {
        return Ok(PairStatus::Invalid(2));
    }
    let ck = big.jacobian_h().constant_kernel();
    let kb = kernel_basis(b);
    if !kb.iter().all(|v| linalg::in_span(&ck, v)) {
        return Ok(PairStatus::Invalid(3));
    }
    Ok(if kb.len() == ck.len() {
        PairStatus::Strong
    } else {
        PairStatus::Weak
    })
}

fn unit(n: usize, j: usize) -> Vec<Scalar> {
    let mut v = vec![Scalar::zero(); n];
    v[j] = Scalar::one();
    v
}

/// Column data of a lift: coefficient vector in `Q^r`, linear form, exponent.
struct LiftColumns {
    coefs: Vec<Vec<Scalar>>,
    forms: Vec<Vec<Scalar>>,
    exponents: Vec<u32>,
}

impl LiftColumns {
    fn push(&mut self, coef: Vec<Scalar>, form: Vec<Scalar>, e: u32) {
        self.coefs.push(coef);
        self.forms.push(form);
        self.exponents.push(e);
    }

    fn rank(vectors: &[Vec<Scalar>], r: usize) -> usize {
        if vectors.is_empty() {
            0
        } else {
            linalg::rank(&RatMatrix::from_columns(r, vectors).expect("length r"))
        }
    }

    /// First unit vector outside the span of `vectors`, else `e_1`.
    fn first_missing(vectors: &[Vec<Scalar>], r: usize) -> Vec<Scalar> {
        (0..r)
            .map(|j| unit(r, j))
            .find(|u| !linalg::in_span(vectors, u))
            .unwrap_or_else(|| unit(r, 0))
    }
}

/// Lifts `f = x + h` to a power-linear `F = X + (AX)^{*e}` paired with it.
///
/// Every homogeneous part of every `h_i` is split into powers of linear
/// forms; the distinct (form, exponent) pairs become the coordinates of the
/// large space. Cancelling `±u` column pairs are appended until `B` has rank
/// `r`, the forms span the dual space, and `n > r`.
pub fn gz_lift(f: &PolyMap) -> Result<GZPair> {
    let r = f.dim();
    require_normalized(f)?;
    let h = f.h();
    if h.iter().all(Polynomial::is_zero) {
        return Err(Error::InvalidInput("nothing to lift: h = 0".into()));
    }
    let mut cols = LiftColumns {
        coefs: Vec::new(),
        forms: Vec::new(),
        exponents: Vec::new(),
    };
    let mut index: HashMap<(Vec<Scalar>, u32), usize> = HashMap::new();
    for (i, hi) in h.iter().enumerate() {
        for part in hi.homogeneous_components().values() {
            for t in waring_decompose(part)? {
                let key = (t.form.clone(), t.exponent);
                let k = *index.entry(key).or_insert_with(|| {
                    cols.push(vec![Scalar::zero(); r], t.form.clone(), t.exponent);
                    cols.coefs.len() - 1
                });
                cols.coefs[k][i] += &t.coefficient;
            }
        }
    }
    let e_min = *cols.exponents.iter().min().expect("h != 0");
    loop {
        let rank_c = LiftColumns::rank(&cols.coefs, r);
        let rank_m = LiftColumns::rank(&cols.forms, r);
        if rank_c == r && rank_m == r {
            break;
        }
        let u = LiftColumns::first_missing(&cols.coefs, r);
        let mu = LiftColumns::first_missing(&cols.forms, r);
        let neg: Vec<Scalar> = u.iter().map(|v| -v).collect();
        cols.push(u, mu.clone(), e_min);
        cols.push(neg, mu, e_min);
    }
    while cols.coefs.len() <= r {
        cols.push(unit(r, 0), unit(r, 0), e_min);
        cols.push(
            unit(r, 0).iter().map(|v| -v).collect(),
            unit(r, 0),
            e_min,
        );
    }
    let n = cols.coefs.len();
    let b = RatMatrix::from_columns(r, &cols.coefs)?;
    let c = right_inverse(&b)?;
    let m = RatMatrix::from_rows(cols.forms.clone())?;
    let a = m.mul(&b)?;
    debug_assert_eq!(a.rows(), n);
    let big = realize_map(&PowerLinearData::new(a, cols.exponents)?);
    let status = verify_pairing(f, &big, &b, &c)?;
    if !status.is_valid() {
        return Err(Error::VerificationFailed(format!("lift failed: {status}")));
    }
    Ok(GZPair {
        f: f.clone(),
        big,
        b,
        c,
        status,
    })
}

/// Reduces `F = X + H` to dimension `r` along the constant kernel of `JH`.
pub fn gz_reduce(big: &PolyMap, r: usize) -> Result<GZPair> {
    let n = big.dim();
    if r == 0 || r >= n {
        return Err(Error::BadRange(format!("need 1 <= r < {n}, got r = {r}")));
    }
    let ck = big.jacobian_h().constant_kernel();
    if r + ck.len() < n {
        return Err(Error::BadRange(format!(
            "r = {r} is below n - dim(constant kernel) = {}",
            n - ck.len()
        )));
    }
    let s = &ck[..n - r];
    let b = matrix_with_kernel(n, s)?;
    let c = right_inverse(&b)?;
    let f = PolyMap::new(pull_back(big, &b, &c)?)?;
    let status = verify_pairing(&f, big, &b, &c)?;
    if !status.is_valid() {
        return Err(Error::VerificationFailed(format!("reduction failed: {status}")));
    }
    Ok(GZPair {
        f,
        big: big.clone(),
        b,
        c,
        status,
    })
}

/// Translation invariance of `H` along `ker B`: `H(X + t·y0) = H(X)` for a
/// basis of `ker B`, `B(CB - I) = 0` and `H(CBX) = H(X)`.
pub fn kernel_translation_check(big: &PolyMap, b: &RatMatrix, c: &RatMatrix) -> Result<bool> {
    let n = big.dim();
    if b.cols() != n || c.rows() != n || b.rows() != c.cols() {
        return Err(Error::DimensionMismatch("B, C and F are inconsistent".into()));
    }
    let h = big.h();
    let m = n + 1;
    let t = Polynomial::var(m, n);
    for y0 in kernel_basis(b) {
        let shifted: Vec<Polynomial> = (0..n)
            .map(|j| &Polynomial::var(m, j) + &t.scale(&y0[j]))
            .collect();
        for hi in &h {
            if hi.substitute(&shifted)? != hi.extend_arity(m) {
                return Ok(false);
            }
        }
    }
    let cb = c.mul(b)?;
    if !b.mul(&cb.sub(&RatMatrix::identity(n))?)?.is_zero() {
        return Ok(false);
    }
    let cbx = row_forms(&cb);
    for hi in &h {
        if &hi.substitute(&cbx)? != hi {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `F~ = (F, x_{n+1} + (B_i X)^d)` with `B~ = [B | 0]` and `C~ = [C ; 0]`;
/// `i` is 0-based.
pub fn extend_with_power(pair: &GZPair, i: usize, d: u32) -> Result<GZPair> {
    let r = pair.r();
    let n = pair.n();
    if i >= r {
        return Err(Error::IndexOutOfRange { index: i, arity: r });
    }
    if d < 2 {
        return Err(Error::InvalidInput(format!("exponent {d} is below 2")));
    }
    let m = n + 1;
    let mut comps: Vec<Polynomial> = pair.big.components().iter().map(|p| p.extend_arity(m)).collect();
    let bi = Polynomial::linear_form(pair.b.row(i)).extend_arity(m);
    comps.push(&Polynomial::var(m, n) + &bi.pow(d));
    let big = PolyMap::new(comps)?;
    let b = pair.b.with_zero_column();
    let c = pair.c.with_zero_row();
    let status = verify_pairing(&pair.f, &big, &b, &c)?;
    if !status.is_valid() {
        return Err(Error::VerificationFailed(format!("extension failed: {status}")));
    }
    Ok(GZPair {
        f: pair.f.clone(),
        big,
        b,
        c,
        status,
    })
}

/// `x_{n+1} - (f^{-1}(BX))_i^d` in `n + 1` variables, where `B` is the
/// matrix of the unextended pair.
pub fn extension_inverse_component(f_inv: &PolyMap, b: &RatMatrix, i: usize, d: u32) -> Result<Polynomial> {
    let n = b.cols();
    let m = n + 1;
    let bx: Vec<Polynomial> = row_forms(b).iter().map(|p| p.extend_arity(m)).collect();
    let gi = f_inv.component(i).substitute(&bx)?;
    Ok(&Polynomial::var(m, n) - &gi.pow(d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inversion::formal_inverse;
    use crate::poly::{default_var_names, parse_polynomial};

    fn map(texts: &[&str]) -> PolyMap {
        let names = default_var_names(texts.len());
        PolyMap::new(texts.iter().map(|t| parse_polynomial(t, &names).unwrap()).collect()).unwrap()
    }

    fn ints(rows: &[&[i64]]) -> RatMatrix {
        RatMatrix::from_i64(rows)
    }

    fn worked_big() -> PolyMap {
        let l = "(x1 + x2 - x3)^2";
        map(&[&format!("x1 + {l}"), &format!("x2 + {l}"), &format!("x3 + {l}")])
    }

    #[test]
    fn one_dimensional_lift() {
        let f = map(&["x1 + x1^2"]);
        let pair = gz_lift(&f).unwrap();
        assert_eq!(pair.status, PairStatus::Strong);
        assert_eq!(pair.b, ints(&[&[1, 1, -1]]));
        assert_eq!(pair.c, ints(&[&[1], &[0], &[0]]));
        assert_eq!(pair.big, worked_big());
    }

    #[test]
    fn verify_detects_each_condition() {
        let f = map(&["x1 + x1^2"]);
        let big = worked_big();
        let b = ints(&[&[1, 1, -1]]);
        let c = ints(&[&[1], &[0], &[0]]);
        assert_eq!(verify_pairing(&f, &big, &b, &c).unwrap(), PairStatus::Strong);
        // condition 1 fails when f does not match
        let g = map(&["x1 + 2*x1^2"]);
        assert_eq!(verify_pairing(&g, &big, &b, &c).unwrap(), PairStatus::Invalid(1));
        // B C = 2, but f = B F(Cx) still holds for this choice of f
        let c2 = ints(&[&[2], &[0], &[0]]);
        let f2 = PolyMap::new(pull_back(&big, &b, &c2).unwrap()).unwrap();
        assert_eq!(verify_pairing(&f2, &big, &b, &c2).unwrap(), PairStatus::Invalid(2));
        // a naive B whose kernel leaves ker JH
        let b3 = ints(&[&[1, 0, 0]]);
        let f3 = PolyMap::new(pull_back(&big, &b3, &c).unwrap()).unwrap();
        assert_eq!(verify_pairing(&f3, &big, &b3, &c).unwrap(), PairStatus::Invalid(3));
        assert!(!kernel_translation_check(&big, &b3, &c).unwrap());
        assert!(verify_pairing(&f, &big, &c, &b).is_err());
    }

    #[test]
    fn lift_rejects_identity_and_linear_terms() {
        assert!(gz_lift(&PolyMap::identity(2)).is_err());
        assert!(gz_lift(&map(&["x1 + x2", "x2"])).is_err());
    }

    #[test]
    fn reduce_examples() {
        let pair = gz_reduce(&worked_big(), 1).unwrap();
        assert_eq!(pair.status, PairStatus::Strong);
        assert_eq!(pair.b, ints(&[&[-1, -1, 1]]));
        assert_eq!(pair.c, ints(&[&[-1], &[0], &[0]]));
        assert_eq!(pair.f, map(&["x1 - x1^2"]));

        let pair = gz_reduce(&map(&["x1", "x2 + x1^3"]), 1).unwrap();
        assert_eq!(pair.f, map(&["x1"]));
        assert_eq!(pair.status, PairStatus::Strong);

        assert!(gz_reduce(&worked_big(), 3).is_err());
        assert!(gz_reduce(&map(&["x1 + x2^2", "x2 + x1^2"]), 1).is_err());
    }

    #[test]
    fn reduce_with_room_to_spare_is_weak() {
        // constant kernel has dimension 2, so r = 2 keeps part of it
        let pair = gz_reduce(&worked_big(), 2).unwrap();
        assert_eq!(pair.status, PairStatus::Weak);
        assert!(kernel_translation_check(&pair.big, &pair.b, &pair.c).unwrap());
    }

    #[test]
    fn translation_checks() {
        let pair = gz_lift(&map(&["x1 + x2^2 + x1*x2", "x2 + x1^3"])).unwrap();
        assert!(kernel_translation_check(&pair.big, &pair.b, &pair.c).unwrap());
        let id = PolyMap::identity(3);
        assert!(kernel_translation_check(&id, &ints(&[&[1, 1, 0]]), &ints(&[&[1], &[0], &[0]])).unwrap());
    }

    #[test]
    fn extension_of_the_worked_pair() {
        let f = map(&["x1 + x1^2"]);
        let pair = gz_lift(&f).unwrap();
        let ext = extend_with_power(&pair, 0, 2).unwrap();
        assert_eq!(ext.n(), 4);
        assert!(ext.status.is_valid());
        assert!(extend_with_power(&pair, 1, 2).is_err());
        // with f = x + x^2 not invertible, use an invertible 2-d map instead
        let g = map(&["x1 + x2^2", "x2"]);
        let gp = gz_lift(&g).unwrap();
        let ext = extend_with_power(&gp, 0, 3).unwrap();
        let g_inv = formal_inverse(&g, None).unwrap().inverse().unwrap().clone();
        let tail = extension_inverse_component(&g_inv, &gp.b, 0, 3).unwrap();
        assert_eq!(tail.degree().finite(), Some(6));
        let inv = crate::inversion::inverse_via_pairing(&ext, &g_inv).unwrap();
        assert_eq!(inv.component(ext.n() - 1), &tail);
    }
}
