//! Certified inversion of polynomial maps and the line-injectivity tools.
//!
//! Every inverse returned from this module has been checked by exact,
//! untruncated composition.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::RatMatrix;
use crate::pairing::{GZPair, PairStatus};
use crate::poly::{Degree, Monomial, Polynomial};
use crate::polymap::{detect_power_linear, HomogeneousProfile, PolyMap, PolyMatrix};
use crate::power_linear::compose_power_linear;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Inverse { map: PolyMap, degree: u32 },
    NotInvertibleWithinBound,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InverseResult {
    pub verdict: Verdict,
    /// Truncation degree used by the search.
    pub bound: u32,
    /// `F∘G = X` and `G∘F = X` hold exactly.
    pub certified: bool,
}

impl InverseResult {
    pub fn inverse(&self) -> Option<&PolyMap> {
        match &self.verdict {
            Verdict::Inverse { map, .. } => Some(map),
            Verdict::NotInvertibleWithinBound => None,
        }
    }

    pub fn inverse_degree(&self) -> Option<u32> {
        match &self.verdict {
            Verdict::Inverse { degree, .. } => Some(*degree),
            Verdict::NotInvertibleWithinBound => None,
        }
    }

    fn certified(map: PolyMap, bound: u32) -> Self {
        let degree = map.degree_u32();
        InverseResult {
            verdict: Verdict::Inverse { map, degree },
            bound,
            certified: true,
        }
    }
}

/// `F∘G`, using the power-linear structure of `F` when present.
pub fn compose_fast(f: &PolyMap, g: &PolyMap) -> Result<PolyMap> {
    match detect_power_linear(f) {
        Some(data) => compose_power_linear(&data, g),
        None => f.compose(g),
    }
}

/// Whether `F∘G = X` exactly.
pub fn is_right_inverse(f: &PolyMap, g: &PolyMap) -> Result<bool> {
    Ok(compose_fast(f, g)?.is_identity())
}

/// Rejects `H = F - X` with constant or linear terms.
pub fn require_normalized(f: &PolyMap) -> Result<()> {
    for (i, hi) in f.h().iter().enumerate() {
        if let Degree::Finite(lo) = hi.low_degree() {
            if lo < 2 {
                return Err(Error::InvalidInput(format!(
                    "H_{} has a term of degree {lo}; normalize so that F(0) = 0 and JF(0) = I",
                    i + 1
                )));
            }
        }
    }
    Ok(())
}

/// `(deg F)^(n-1)`, saturating.
pub fn bcw_bound(f: &PolyMap) -> u32 {
    let d = f.degree_u32().max(1) as u64;
    let e = f.dim().saturating_sub(1) as u32;
    d.checked_pow(e).map_or(u32::MAX, |v| v.min(u32::MAX as u64) as u32)
}

/// Truncated formal inversion. Iteration `k` computes `G ← X - H(G)`
/// truncated at degree `k`, which fixes the degree-`k` part of the inverse
/// series; whenever no new terms appear the candidate is checked by exact
/// composition in both orders.
pub fn formal_inverse(f: &PolyMap, bound: Option<u32>) -> Result<InverseResult> {
    require_normalized(f)?;
    let bound = match bound {
        Some(0) => return Err(Error::InvalidInput("bound must be at least 1".into())),
        Some(b) => b,
        None => bcw_bound(f).max(1),
    };
    let n = f.dim();
    let h = PolyMap::new(f.h())?;
    let identity = PolyMap::identity(n);
    if f.is_identity() {
        return Ok(InverseResult::certified(identity, bound));
    }
    let mut g = identity.clone();
    let certify = |g: &PolyMap| -> Result<bool> {
        Ok(is_right_inverse(f, g)? && g.compose(f)?.is_identity())
    };
    for k in 2..=bound {
        let hg = h.compose_truncated(&g, k)?;
        let next = PolyMap::new(
            (0..n)
                .map(|i| identity.component(i) - hg.component(i))
                .collect(),
        )?;
        let stalled = next == g;
        g = next;
        if stalled && certify(&g)? {
            return Ok(InverseResult::certified(g, bound));
        }
    }
    if certify(&g)? {
        return Ok(InverseResult::certified(g, bound));
    }
    Ok(InverseResult {
        verdict: Verdict::NotInvertibleWithinBound,
        bound,
        certified: false,
    })
}

/// `F^{-1} = X - H(C f^{-1}(BX))` for a (weakly) paired `F`, verified by
/// composition before it is returned.
pub fn inverse_via_pairing(pair: &GZPair, f_inv: &PolyMap) -> Result<PolyMap> {
    if matches!(pair.status, PairStatus::Invalid(_)) {
        return Err(Error::InvalidInput("pair is not GZ-paired".into()));
    }
    if f_inv.dim() != pair.f.dim() || !is_right_inverse(&pair.f, f_inv)? {
        return Err(Error::VerificationFailed("f_inv is not an inverse of f".into()));
    }
    let n = pair.big.dim();
    let r = pair.f.dim();
    let bx = linear_images(&pair.b, n);
    let inner: Vec<Polynomial> = f_inv
        .components()
        .iter()
        .map(|p| p.substitute(&bx))
        .collect::<Result<_>>()?;
    debug_assert_eq!(inner.len(), r);
    // C · f^{-1}(BX)
    let c_inner: Vec<Polynomial> = (0..n)
        .map(|k| {
            (0..r).fold(Polynomial::zero(n), |acc, j| {
                let c = &pair.c[(k, j)];
                if c.is_zero() {
                    acc
                } else {
                    &acc + &inner[j].scale(c)
                }
            })
        })
        .collect();
    let h_map = PolyMap::new(pair.big.h())?;
    let h_at = compose_fast_h(&pair.big, &h_map, &PolyMap::new(c_inner)?)?;
    let g = PolyMap::new(
        (0..n)
            .map(|i| &Polynomial::var(n, i) - h_at.component(i))
            .collect(),
    )?;
    if !is_right_inverse(&pair.big, &g)? {
        return Err(Error::VerificationFailed(
            "X - H(C f^{-1}(BX)) does not invert F".into(),
        ));
    }
    Ok(g)
}

/// `H∘G` where `H = F - X`, using power-linear structure when present.
fn compose_fast_h(f: &PolyMap, h: &PolyMap, g: &PolyMap) -> Result<PolyMap> {
    match detect_power_linear(f) {
        Some(data) => {
            let fg = compose_power_linear(&data, g)?;
            PolyMap::new(
                (0..g.dim())
                    .map(|i| fg.component(i) - g.component(i))
                    .collect(),
            )
        }
        None => h.compose(g),
    }
}

/// Rows of `M` as linear forms in `arity` variables (`M` has `arity` columns).
pub fn linear_images(m: &RatMatrix, arity: usize) -> Vec<Polynomial> {
    assert_eq!(m.cols(), arity);
    (0..m.rows()).map(|i| Polynomial::linear_form(m.row(i))).collect()
}

/// `F^{-1} = X - H(X - H)` for homogeneous `H` with `JH^3 = 0` and generic
/// rank of `JH` equal to `n - dim(constant kernel)`.
pub fn nilpotent_inverse_formula(f: &PolyMap) -> Result<InverseResult> {
    let n = f.dim();
    let h = f.h();
    let degs: Vec<u32> = h.iter().filter_map(|p| match p.degree() {
        Degree::Finite(d) => Some(d),
        Degree::NegInfinity => None,
    }).collect();
    if let Some(&d) = degs.first() {
        let homogeneous = h
            .iter()
            .all(|p| p.is_zero() || p.homogeneous_degree() == Some(d));
        if !homogeneous {
            return Err(Error::HypothesisFailed(
                "H is not homogeneous of a single degree".into(),
            ));
        }
    }
    let jh = f.jacobian_h();
    let index = jh.nilpotency_index()?;
    if !matches!(index, Some(k) if k <= 3) {
        return Err(Error::HypothesisFailed("JH^3 != 0".into()));
    }
    let ck = jh.constant_kernel().len();
    let grank = jh.generic_rank();
    if grank != n - ck {
        return Err(Error::HypothesisFailed(format!(
            "kernel dimension surrogate fails: generic rank JH = {grank}, n - dim(ker JH ∩ Q^n) = {}",
            n - ck
        )));
    }
    let h_map = PolyMap::new(h)?;
    let x_minus_h = PolyMap::new(
        (0..n)
            .map(|i| &Polynomial::var(n, i) - h_map.component(i))
            .collect(),
    )?;
    let h_inner = h_map.compose(&x_minus_h)?;
    let g = PolyMap::new(
        (0..n)
            .map(|i| &Polynomial::var(n, i) - h_inner.component(i))
            .collect(),
    )?;
    if !is_right_inverse(f, &g)? || !g.compose(f)?.is_identity() {
        return Err(Error::VerificationFailed("X - H(X - H) does not invert F".into()));
    }
    let bound = f.degree_u32().pow(2);
    Ok(InverseResult::certified(g, bound))
}

/// Normal form `H = [c_1..c_s, λx_{s+1} + g, h_{s+2}(λx_{s+1} + g), ...]`
/// of a map with `rank JH <= 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankOneNormalForm {
    pub n: usize,
    pub s: usize,
    pub c: Vec<Scalar>,
    pub lambda: Scalar,
    /// Polynomial of arity `n` using only `x_1..x_s`.
    pub g: Polynomial,
    /// Univariate (arity 1) polynomials `h_{s+2}, ..., h_n`.
    pub tail: Vec<Polynomial>,
}

impl RankOneNormalForm {
    /// Reads the normal form off `F = X + H`: `s` is the number of leading
    /// constant components of `H`, the next one is the pivot, and each later
    /// component must be a univariate polynomial in the pivot.
    pub fn recognize(f: &PolyMap) -> Result<Self> {
        let n = f.dim();
        let h = f.h();
        let s = h.iter().take_while(|p| p.is_constant()).count().min(n - 1);
        let c = h[..s].iter().map(Polynomial::constant_term).collect();
        let pivot = &h[s];
        let x = Monomial::var(n, s);
        let lambda = pivot.coefficient(&x);
        let g = pivot - &Polynomial::monomial(n, x, lambda.clone());
        if g.support_vars().iter().any(|&j| j >= s) {
            let g = if s == 0 { "c".to_string() } else { format!("g(x_1..x_{s})") };
            return Err(Error::HypothesisFailed(format!(
                "H_{} is not of the form λ x_{} + {g}",
                s + 1,
                s + 1
            )));
        }
        let full_pivot = &Polynomial::var(n, s).scale(&lambda) + &g;
        let tail = h[s + 1..]
            .iter()
            .enumerate()
            .map(|(k, hj)| {
                univariate_in(hj, &full_pivot).ok_or_else(|| {
                    Error::HypothesisFailed(format!(
                        "H_{} is not a polynomial in the pivot λ x_{} + g",
                        s + k + 2,
                        s + 1
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let nf = RankOneNormalForm {
            n,
            s,
            c,
            lambda,
            g,
            tail,
        };
        nf.validate().map_err(|e| Error::HypothesisFailed(e.to_string()))?;
        Ok(nf)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.s >= self.n {
            return Err(Error::InvalidInput(format!("need 0 <= s <= n-1, got s={}, n={}", self.s, self.n)));
        }
        if self.c.len() != self.s {
            return Err(Error::DimensionMismatch(format!("expected {} constants", self.s)));
        }
        if self.tail.len() != self.n - self.s - 1 {
            return Err(Error::DimensionMismatch(format!(
                "expected {} tail polynomials",
                self.n - self.s - 1
            )));
        }
        if self.tail.iter().any(|t| t.arity() != 1) {
            return Err(Error::InvalidInput("tail polynomials must be univariate".into()));
        }
        if self.g.arity() != self.n || self.g.support_vars().iter().any(|&j| j >= self.s) {
            return Err(Error::InvalidInput("g must only use x_1..x_s".into()));
        }
        if self.lambda == Scalar::from_int(-1) {
            return Err(Error::InvalidInput("lambda must differ from -1".into()));
        }
        Ok(())
    }

    /// `λ x_{s+1} + g`.
    pub fn pivot(&self) -> Polynomial {
        &Polynomial::var(self.n, self.s).scale(&self.lambda) + &self.g
    }

    pub fn h(&self) -> Result<Vec<Polynomial>> {
        self.validate()?;
        let n = self.n;
        let pivot = self.pivot();
        let mut h: Vec<Polynomial> = self
            .c
            .iter()
            .map(|c| Polynomial::constant(n, c.clone()))
            .collect();
        h.push(pivot.clone());
        for t in &self.tail {
            h.push(t.substitute(std::slice::from_ref(&pivot))?);
        }
        Ok(h)
    }

    pub fn map(&self) -> Result<PolyMap> {
        PolyMap::from_h(self.h()?)
    }
}

/// The univariate `q` with `q(p) = target`, by peeling off leading terms;
/// the graded order is multiplicative, so the leading monomial of `p^k` is
/// the `k`-th power of that of `p`.
fn univariate_in(target: &Polynomial, p: &Polynomial) -> Option<Polynomial> {
    let n = p.arity();
    let t = Polynomial::var(1, 0);
    let (lead_m, lead_c) = match p.degree() {
        Degree::Finite(d) if d >= 1 => p.terms().last().cloned()?,
        _ => {
            return target
                .is_constant()
                .then(|| Polynomial::constant(1, target.constant_term()));
        }
    };
    let e = lead_m.degree();
    let mut rem = target.clone();
    let mut q = Polynomial::zero(1);
    let top = match target.degree() {
        Degree::NegInfinity => return Some(q),
        Degree::Finite(d) => d,
    };
    if top % e != 0 {
        return None;
    }
    for k in (0..=top / e).rev() {
        let mono = Monomial::new(lead_m.exponents().iter().map(|&x| x * k).collect());
        let coef = &rem.coefficient(&mono) / &lead_c.pow(k);
        if !coef.is_zero() {
            rem = &rem - &p.pow(k).scale(&coef);
            q = &q + &t.pow(k).scale(&coef);
        }
    }
    debug_assert_eq!(rem.arity(), n);
    rem.is_zero().then_some(q)
}

/// The displayed inverse of the normal form, verified by composition, along
/// with the check `((λx_{s+1} + g~)/(λ+1))|_{X=F} = λx_{s+1} + g`.
pub fn rank_one_inverse(nf: &RankOneNormalForm) -> Result<PolyMap> {
    nf.validate()?;
    let n = nf.n;
    let s = nf.s;
    let f = nf.map()?;
    let shift: Vec<Polynomial> = (0..n)
        .map(|j| {
            let x = Polynomial::var(n, j);
            if j < s {
                &x - &Polynomial::constant(n, nf.c[j].clone())
            } else {
                x
            }
        })
        .collect();
    let g_tilde = nf.g.substitute(&shift)?;
    let inv_lp1 = (&nf.lambda + &Scalar::one()).recip().expect("lambda != -1");
    let u = (&Polynomial::var(n, s).scale(&nf.lambda) + &g_tilde).scale(&inv_lp1);
    if u.substitute(f.components())? != nf.pivot() {
        return Err(Error::VerificationFailed("pivot identity does not hold".into()));
    }
    let mut comps: Vec<Polynomial> = shift[..s].to_vec();
    comps.push(&Polynomial::var(n, s) - &u);
    for (k, t) in nf.tail.iter().enumerate() {
        let j = s + 1 + k;
        comps.push(&Polynomial::var(n, j) - &t.substitute(std::slice::from_ref(&u))?);
    }
    let g = PolyMap::new(comps)?;
    if !f.compose(&g)?.is_identity() {
        return Err(Error::VerificationFailed("displayed inverse does not invert F".into()));
    }
    Ok(g)
}

/// `D = diag((1/d_i)(1 + λ + ... + λ^{d_i - 1}))`, equal to
/// `(λ^{d_i} - 1)/(d_i(λ - 1))` for `λ != 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DMatrix {
    pub lambda: Scalar,
    pub degrees: Vec<u32>,
    pub diagonal: Vec<Scalar>,
}

pub fn build_d(lambda: &Scalar, degrees: &[u32]) -> Result<DMatrix> {
    if lambda.is_one() {
        return Err(Error::InvalidInput("lambda must differ from 1".into()));
    }
    if degrees.contains(&0) {
        return Err(Error::InvalidInput("degrees must be at least 1".into()));
    }
    let diagonal = degrees
        .iter()
        .map(|&d| {
            let geo: Scalar = (0..d).map(|k| lambda.pow(k)).sum();
            &geo / &Scalar::from_int(d as i64)
        })
        .collect();
    Ok(DMatrix {
        lambda: lambda.clone(),
        degrees: degrees.to_vec(),
        diagonal,
    })
}

/// `(1/d)(1 + t + ... + t^{d-1})` in variable `var` of the given arity.
pub fn d_entry_polynomial(d: u32, arity: usize, var: usize) -> Polynomial {
    let t = Polynomial::var(arity, var);
    let geo = (0..d).fold(Polynomial::zero(arity), |acc, k| &acc + &t.pow(k));
    geo.scale(&Scalar::frac(1, d as i64))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LineCheck {
    /// `F(a) = F(λa)`.
    pub lhs: bool,
    /// `(I + D·JH|_a)·a = 0`.
    pub rhs: bool,
}

pub fn line_injectivity_check(
    f: &PolyMap,
    profile: &HomogeneousProfile,
    a: &[Scalar],
    lambda: &Scalar,
) -> Result<LineCheck> {
    profile.validate(f)?;
    let n = f.dim();
    if a.len() != n {
        return Err(Error::ArityMismatch {
            expected: n,
            found: a.len(),
        });
    }
    let d = build_d(lambda, &profile.degrees)?;
    let la: Vec<Scalar> = a.iter().map(|v| v * lambda).collect();
    let lhs = f.evaluate(a)? == f.evaluate(&la)?;
    let jh_a = f.jacobian_h().evaluate(a)?;
    let jh_a_a = jh_a.mul_vec(a)?;
    let rhs = (0..n).all(|i| (&a[i] + &(&d.diagonal[i] * &jh_a_a[i])).is_zero());
    Ok(LineCheck { lhs, rhs })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DetIdentityReport {
    pub holds: bool,
    /// First term of `det(I + D·JH) - 1` with `λ` named `lambda`.
    pub witness: Option<String>,
}

/// Whether `det(I + D·JH) = 1` identically in `(x, λ)`.
pub fn det_identity_check(f: &PolyMap, profile: &HomogeneousProfile) -> Result<DetIdentityReport> {
    profile.validate(f)?;
    let n = f.dim();
    let m = n + 1;
    let lift: Vec<Polynomial> = (0..n).map(|j| Polynomial::var(m, j)).collect();
    let jh = f.jacobian_h().substitute(&lift)?;
    let diag: Vec<Polynomial> = profile
        .degrees
        .iter()
        .map(|&d| d_entry_polynomial(d, m, n))
        .collect();
    let mat = PolyMatrix::identity(n, m).add(&jh.scale_rows(&diag))?;
    let diff = &mat.determinant()? - &Polynomial::one(m);
    if diff.is_zero() {
        return Ok(DetIdentityReport {
            holds: true,
            witness: None,
        });
    }
    let mut names = crate::poly::default_var_names(n);
    names.push("lambda".into());
    let (mono, coef) = diff.terms()[0].clone();
    let term = Polynomial::monomial(m, mono, coef);
    Ok(DetIdentityReport {
        holds: false,
        witness: Some(term.render(&names)),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundCheck {
    pub name: String,
    pub bound: Option<u64>,
    pub applicable: bool,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeBoundReport {
    pub n: usize,
    pub degree: u32,
    pub inverse_degree: u32,
    pub bcw_bound: u64,
    /// Least `k` with `JH^k = 0`.
    pub nilpotency_index: Option<usize>,
    pub generic_rank: usize,
    pub checks: Vec<BoundCheck>,
}

impl DegreeBoundReport {
    pub fn check(&self, name: &str) -> Option<&BoundCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn pow_u64(base: u32, exp: u32) -> u64 {
    (base as u64).checked_pow(exp).unwrap_or(u64::MAX)
}

/// Tabulates the inverse degree against the known and conjectured bounds.
/// `pairing` carries a pair with the degree of `f^{-1}` for the sandwich
/// check.
pub fn degree_bound_report(
    f: &PolyMap,
    result: &InverseResult,
    pairing: Option<(&GZPair, u32)>,
) -> Result<DegreeBoundReport> {
    let inverse_degree = result
        .inverse_degree()
        .ok_or_else(|| Error::InvalidInput("no certified inverse to report on".into()))?;
    let n = f.dim();
    let d = f.degree_u32();
    let jh = f.jacobian_h();
    let index = jh.nilpotency_index()?;
    let grank = jh.generic_rank();
    let bcw = pow_u64(d.max(1), n.saturating_sub(1) as u32);
    let deg = inverse_degree as u64;
    let mut checks = vec![BoundCheck {
        name: "bcw".into(),
        bound: Some(bcw),
        applicable: true,
        holds: deg <= bcw,
    }];
    let power_linear_homogeneous = detect_power_linear(f)
        .map(|p| {
            let rows: Vec<usize> = (0..n).filter(|&i| p.a.row(i).iter().any(|c| !c.is_zero())).collect();
            rows.windows(2).all(|w| p.degrees[w[0]] == p.degrees[w[1]])
        })
        .unwrap_or(false);
    // JH^{k+1} = 0 with k = index - 1
    let k = index.map(|i| i.saturating_sub(1) as u32);
    let kb = k.map(|k| pow_u64(d, k));
    checks.push(BoundCheck {
        name: "nilpotent_square".into(),
        bound: (k.is_some_and(|k| k <= 2)).then(|| pow_u64(d, 2)),
        applicable: power_linear_homogeneous && k.is_some_and(|k| k <= 2),
        holds: deg <= pow_u64(d, 2),
    });
    checks.push(BoundCheck {
        name: "nilpotent_power".into(),
        bound: kb,
        applicable: power_linear_homogeneous && k.is_some(),
        holds: kb.is_some_and(|b| deg <= b),
    });
    let rb = pow_u64(d, grank as u32);
    checks.push(BoundCheck {
        name: "rank_power".into(),
        bound: Some(rb),
        applicable: true,
        holds: deg <= rb,
    });
    if let Some((pair, f_inv_degree)) = pairing {
        let dd = pair.big.degree_u32() as u64;
        let lo = f_inv_degree as u64;
        checks.push(BoundCheck {
            name: "pairing_sandwich".into(),
            bound: Some(dd * lo),
            applicable: !matches!(pair.status, PairStatus::Invalid(_)),
            holds: lo <= deg && deg <= dd * lo,
        });
    }
    Ok(DegreeBoundReport {
        n,
        degree: d,
        inverse_degree,
        bcw_bound: bcw,
        nilpotency_index: index,
        generic_rank: grank,
        checks,
    })
}
