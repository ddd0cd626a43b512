//! Polynomial maps `F = X + H`, their Jacobians, and structural diagnostics.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, kernel_basis, RatMatrix};
use crate::poly::{default_var_names, Degree, Monomial, Polynomial};
use crate::power_linear::PowerLinearData;
use crate::rng::SplitMix64;
use crate::scalar::Scalar;

/// A tuple of `n` polynomials in `n` variables.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PolyMap {
    components: Vec<Polynomial>,
}

impl PolyMap {
    pub fn new(components: Vec<Polynomial>) -> Result<Self> {
        let n = components.len();
        if n == 0 {
            return Err(Error::InvalidInput("a polynomial map needs at least one component".into()));
        }
        if let Some(p) = components.iter().find(|p| p.arity() != n) {
            return Err(Error::ArityMismatch {
                expected: n,
                found: p.arity(),
            });
        }
        Ok(PolyMap { components })
    }

    pub fn identity(n: usize) -> Self {
        PolyMap {
            components: (0..n).map(|j| Polynomial::var(n, j)).collect(),
        }
    }

    /// `X + H` from the components of `H`.
    pub fn from_h(h: Vec<Polynomial>) -> Result<Self> {
        let x = PolyMap::new(h)?;
        let n = x.dim();
        Ok(PolyMap {
            components: x
                .components
                .into_iter()
                .enumerate()
                .map(|(i, hi)| &Polynomial::var(n, i) + &hi)
                .collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Polynomial {
        &self.components[i]
    }

    pub fn into_components(self) -> Vec<Polynomial> {
        self.components
    }

    /// `H = F - X`.
    pub fn h(&self) -> Vec<Polynomial> {
        let n = self.dim();
        self.components
            .iter()
            .enumerate()
            .map(|(i, f)| f - &Polynomial::var(n, i))
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        *self == PolyMap::identity(self.dim())
    }

    /// Maximum component degree.
    pub fn degree(&self) -> Degree {
        self.components
            .iter()
            .map(Polynomial::degree)
            .max()
            .unwrap_or(Degree::NegInfinity)
    }

    /// Degree as a plain integer, with the all-zero map at 0.
    pub fn degree_u32(&self) -> u32 {
        self.degree().finite().unwrap_or(0)
    }

    /// `F∘G`.
    pub fn compose(&self, g: &PolyMap) -> Result<PolyMap> {
        if self.dim() != g.dim() {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose maps of dimension {} and {}",
                self.dim(),
                g.dim()
            )));
        }
        let components = self
            .components
            .iter()
            .map(|f| f.substitute(&g.components))
            .collect::<Result<Vec<_>>>()?;
        Ok(PolyMap { components })
    }

    /// `F∘G` with every product truncated above `max_degree`.
    pub fn compose_truncated(&self, g: &PolyMap, max_degree: u32) -> Result<PolyMap> {
        let components = self
            .components
            .iter()
            .map(|f| f.substitute_truncated(&g.components, Some(max_degree)))
            .collect::<Result<Vec<_>>>()?;
        Ok(PolyMap { components })
    }

    pub fn evaluate(&self, a: &[Scalar]) -> Result<Vec<Scalar>> {
        self.components.iter().map(|p| p.evaluate(a)).collect()
    }

    pub fn jacobian(&self) -> PolyMatrix {
        let n = self.dim();
        let mut entries = Vec::with_capacity(n * n);
        for f in &self.components {
            for j in 0..n {
                entries.push(f.differentiate(j).expect("index in range"));
            }
        }
        PolyMatrix {
            rows: n,
            cols: n,
            arity: n,
            entries,
        }
    }

    /// Jacobian of `H = F - X`.
    pub fn jacobian_h(&self) -> PolyMatrix {
        let n = self.dim();
        let mut jf = self.jacobian();
        for i in 0..n {
            let e = &jf.entries[i * n + i] - &Polynomial::one(n);
            jf.entries[i * n + i] = e;
        }
        jf
    }

    pub fn jacobian_determinant(&self) -> Polynomial {
        self.jacobian().determinant().expect("square Jacobian")
    }

    /// Keller in the normalized sense: `det JF = 1` identically.
    pub fn is_keller(&self) -> bool {
        self.jacobian_determinant() == Polynomial::one(self.dim())
    }

    /// Re-embeds in dimension `n + extra` with new components `x_{n+1}, ...`.
    pub fn extend_dim(&self, extra: usize) -> PolyMap {
        let m = self.dim() + extra;
        let mut components: Vec<Polynomial> =
            self.components.iter().map(|p| p.extend_arity(m)).collect();
        for j in self.dim()..m {
            components.push(Polynomial::var(m, j));
        }
        PolyMap { components }
    }

    pub fn render(&self, names: &[String]) -> Vec<String> {
        self.components.iter().map(|p| p.render(names)).collect()
    }

    pub fn render_default(&self) -> Vec<String> {
        self.render(&default_var_names(self.dim()))
    }
}

impl fmt::Display for PolyMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.render_default().join(", "))
    }
}

impl fmt::Debug for PolyMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyMap{self}")
    }
}

/// A matrix with polynomial entries, all of one arity.
#[derive(Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    arity: usize,
    entries: Vec<Polynomial>,
}

impl PolyMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Polynomial>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        let arity = entries.first().map_or(0, Polynomial::arity);
        if let Some(p) = entries.iter().find(|p| p.arity() != arity) {
            return Err(Error::ArityMismatch {
                expected: arity,
                found: p.arity(),
            });
        }
        Ok(PolyMatrix {
            rows,
            cols,
            arity,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize, arity: usize) -> Self {
        PolyMatrix {
            rows,
            cols,
            arity,
            entries: vec![Polynomial::zero(arity); rows * cols],
        }
    }

    pub fn identity(n: usize, arity: usize) -> Self {
        let mut m = PolyMatrix::zeros(n, n, arity);
        for i in 0..n {
            m.entries[i * n + i] = Polynomial::one(arity);
        }
        m
    }

    /// Constant matrix embedded at the given arity.
    pub fn from_rat(m: &RatMatrix, arity: usize) -> Self {
        let mut out = PolyMatrix::zeros(m.rows(), m.cols(), arity);
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                out.entries[i * m.cols() + j] = Polynomial::constant(arity, m[(i, j)].clone());
            }
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn get(&self, i: usize, j: usize) -> &Polynomial {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Polynomial) {
        assert_eq!(p.arity(), self.arity);
        self.entries[i * self.cols + j] = p;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Polynomial::is_zero)
    }

    pub fn mul(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        if self.cols != other.rows || self.arity != other.arity {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = PolyMatrix::zeros(self.rows, other.cols, self.arity);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Polynomial::zero(self.arity);
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    let b = other.get(k, j);
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    acc = &acc + &(a * b);
                }
                out.entries[i * other.cols + j] = acc;
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        if (self.rows, self.cols, self.arity) != (other.rows, other.cols, other.arity) {
            return Err(Error::DimensionMismatch("matrix shapes differ".into()));
        }
        Ok(PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            arity: self.arity,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// Left multiplication by a diagonal given by its entries.
    pub fn scale_rows(&self, diag: &[Polynomial]) -> PolyMatrix {
        assert_eq!(diag.len(), self.rows);
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.entries[i * self.cols + j] = &diag[i] * self.get(i, j);
            }
        }
        out
    }

    /// Matrix-vector product with a polynomial vector.
    pub fn mul_poly_vec(&self, v: &[Polynomial]) -> Result<Vec<Polynomial>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch("vector length".into()));
        }
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = Polynomial::zero(self.arity);
                for (j, vj) in v.iter().enumerate() {
                    let a = self.get(i, j);
                    if !a.is_zero() && !vj.is_zero() {
                        acc = &acc + &(a * vj);
                    }
                }
                acc
            })
            .collect())
    }

    pub fn evaluate(&self, a: &[Scalar]) -> Result<RatMatrix> {
        let rows = (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.get(i, j).evaluate(a))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        if self.rows == 0 {
            return Ok(RatMatrix::zeros(0, self.cols));
        }
        RatMatrix::from_rows(rows)
    }

    /// Entry-wise substitution.
    pub fn substitute(&self, g: &[Polynomial]) -> Result<PolyMatrix> {
        let arity = g.first().map_or(self.arity, Polynomial::arity);
        let entries = self
            .entries
            .iter()
            .map(|p| p.substitute(g))
            .collect::<Result<Vec<_>>>()?;
        Ok(PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            arity,
            entries,
        })
    }

    pub fn trace(&self) -> Result<Polynomial> {
        if self.rows != self.cols {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok((0..self.rows).fold(Polynomial::zero(self.arity), |acc, i| &acc + self.get(i, i)))
    }

    /// Division-free determinant by Laplace expansion along rows, memoized
    /// over column subsets.
    pub fn determinant(&self) -> Result<Polynomial> {
        self.minor(&(0..self.rows).collect::<Vec<_>>(), &(0..self.cols).collect::<Vec<_>>())
    }

    /// Determinant of the submatrix on `rows` x `cols` (equal lengths).
    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> Result<Polynomial> {
        if rows.len() != cols.len() {
            return Err(Error::NotSquare {
                rows: rows.len(),
                cols: cols.len(),
            });
        }
        let k = rows.len();
        if k == 0 {
            return Ok(Polynomial::one(self.arity));
        }
        assert!(k <= 63, "minor too large");
        // level[mask] = minor of the first |mask| rows on the columns in mask.
        let mut level: HashMap<u64, Polynomial> = HashMap::new();
        level.insert(0, Polynomial::one(self.arity));
        for (depth, &r) in rows.iter().enumerate() {
            let mut next: HashMap<u64, Polynomial> = HashMap::new();
            for (&mask, val) in &level {
                if val.is_zero() {
                    continue;
                }
                for (pos, &c) in cols.iter().enumerate() {
                    if mask & (1 << pos) != 0 {
                        continue;
                    }
                    let entry = self.get(r, c);
                    if entry.is_zero() {
                        continue;
                    }
                    // Sign of placing column `pos` after the columns already used,
                    // counted by columns in mask to its right.
                    let right = (mask >> (pos + 1)).count_ones();
                    let term = entry * val;
                    let term = if right % 2 == 1 { -term } else { term };
                    let slot = next
                        .entry(mask | (1 << pos))
                        .or_insert_with(|| Polynomial::zero(self.arity));
                    *slot = &*slot + &term;
                }
            }
            let _ = depth;
            level = next;
        }
        let full = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
        Ok(level
            .remove(&full)
            .unwrap_or_else(|| Polynomial::zero(self.arity)))
    }

    /// Least `k >= 1` with `M^k = 0`, or `None` when `M^rows != 0`.
    pub fn nilpotency_index(&self) -> Result<Option<usize>> {
        if self.rows != self.cols {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut power = self.clone();
        for k in 1..=self.rows.max(1) {
            if power.is_zero() {
                return Ok(Some(k));
            }
            if k < self.rows {
                power = power.mul(self)?;
            }
        }
        Ok(None)
    }

    /// Entry `k - 1` tells whether `M^k = 0`, for `k = 1..=max`.
    pub fn vanishing_powers(&self, max: usize) -> Result<Vec<bool>> {
        if self.rows != self.cols {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut out = Vec::with_capacity(max);
        let mut power = self.clone();
        for k in 1..=max {
            let zero = power.is_zero();
            out.push(zero);
            if zero {
                out.resize(max, true);
                break;
            }
            if k < max {
                power = power.mul(self)?;
            }
        }
        Ok(out)
    }

    /// `{v in Q^cols : M v = 0 identically}`, from one linear condition per
    /// (row, monomial) pair.
    pub fn constant_kernel(&self) -> Vec<Vec<Scalar>> {
        let mut conditions: Vec<Vec<Scalar>> = Vec::new();
        for i in 0..self.rows {
            let mut monos: BTreeSet<Monomial> = BTreeSet::new();
            for j in 0..self.cols {
                for (m, _) in self.get(i, j).terms() {
                    monos.insert(m.clone());
                }
            }
            for m in monos {
                conditions.push((0..self.cols).map(|j| self.get(i, j).coefficient(&m)).collect());
            }
        }
        if conditions.is_empty() {
            return kernel_basis(&RatMatrix::zeros(1, self.cols));
        }
        kernel_basis(&RatMatrix::from_rows(conditions).expect("rectangular"))
    }

    /// Rank over the rational function field. Point evaluations give lower
    /// bounds; `cols - dim constant_kernel` is an upper bound; in between,
    /// symbolic minors decide.
    pub fn generic_rank(&self) -> usize {
        let upper = self.cols - self.constant_kernel().len();
        let mut rng = SplitMix64::new(0x6a09_e667_f3bc_c908);
        let mut best = 0;
        for _ in 0..4 {
            best = best.max(self.rank_at_random_point(&mut rng));
            if best == upper {
                return best;
            }
        }
        loop {
            if best >= upper {
                return best;
            }
            let k = best + 1;
            let witness = linalg::Combinations::new(self.rows, k).find_map(|rs| {
                linalg::Combinations::new(self.cols, k).find_map(|cs| {
                    let m = self.minor(&rs, &cs).expect("square minor");
                    (!m.is_zero()).then_some(m)
                })
            });
            let Some(minor) = witness else {
                return best;
            };
            // A nonzero polynomial has a non-root among enough random points.
            loop {
                let point = random_point(&mut rng, self.arity);
                if !minor.evaluate(&point).expect("arity").is_zero() {
                    let r = linalg::rank(&self.evaluate(&point).expect("arity"));
                    best = best.max(r).max(k);
                    break;
                }
            }
        }
    }

    fn rank_at_random_point(&self, rng: &mut SplitMix64) -> usize {
        let point = random_point(rng, self.arity);
        linalg::rank(&self.evaluate(&point).expect("arity"))
    }

    pub fn render(&self, names: &[String]) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).render(names)).collect())
            .collect()
    }
}

fn random_point(rng: &mut SplitMix64, arity: usize) -> Vec<Scalar> {
    (0..arity)
        .map(|_| Scalar::from_int(rng.range_i64(-97, 97)))
        .collect()
}

impl fmt::Debug for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyMatrix{:?}", self.render(&default_var_names(self.arity)))
    }
}

/// Degrees `d_i` with each `H_i` zero or homogeneous of degree `d_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomogeneousProfile {
    pub degrees: Vec<u32>,
    /// Components whose degree was defaulted because `H_i = 0`.
    pub defaulted: Vec<usize>,
}

/// Degree assigned to zero components of `H`.
pub const ZERO_COMPONENT_DEGREE: u32 = 2;

impl HomogeneousProfile {
    pub fn new(degrees: Vec<u32>) -> Result<Self> {
        if degrees.contains(&0) {
            return Err(Error::ProfileMismatch("degrees must be at least 1".into()));
        }
        Ok(HomogeneousProfile {
            degrees,
            defaulted: Vec::new(),
        })
    }

    pub fn uniform(n: usize, d: u32) -> Result<Self> {
        HomogeneousProfile::new(vec![d; n])
    }

    /// Reads the profile off `F = X + H`; fails if some `H_i` is not
    /// homogeneous of positive degree.
    pub fn infer(f: &PolyMap) -> Result<Self> {
        let mut degrees = Vec::with_capacity(f.dim());
        let mut defaulted = Vec::new();
        for (i, hi) in f.h().iter().enumerate() {
            if hi.is_zero() {
                degrees.push(ZERO_COMPONENT_DEGREE);
                defaulted.push(i);
                continue;
            }
            match hi.homogeneous_degree() {
                Some(d) if d >= 1 => degrees.push(d),
                _ => {
                    return Err(Error::ProfileMismatch(format!(
                        "H_{} is not homogeneous of positive degree",
                        i + 1
                    )))
                }
            }
        }
        Ok(HomogeneousProfile { degrees, defaulted })
    }

    pub fn is_uniform(&self) -> bool {
        self.degrees.windows(2).all(|w| w[0] == w[1])
    }

    /// `diag(1/d_1, ..., 1/d_n)`.
    pub fn reciprocal_diagonal(&self) -> Vec<Scalar> {
        self.degrees
            .iter()
            .map(|&d| Scalar::frac(1, d as i64))
            .collect()
    }

    /// Checks that `F - X` matches this profile component by component.
    pub fn validate(&self, f: &PolyMap) -> Result<()> {
        if self.degrees.len() != f.dim() {
            return Err(Error::ProfileMismatch(format!(
                "profile has {} degrees for a map of dimension {}",
                self.degrees.len(),
                f.dim()
            )));
        }
        for (i, hi) in f.h().iter().enumerate() {
            if hi.is_zero() {
                continue;
            }
            if hi.homogeneous_degree() != Some(self.degrees[i]) {
                return Err(Error::ProfileMismatch(format!(
                    "H_{} is not homogeneous of degree {}",
                    i + 1,
                    self.degrees[i]
                )));
            }
        }
        Ok(())
    }
}

/// Whether `F = (I + D'·JH)·X` identically, `D' = diag(1/d_i)`.
pub fn euler_form_check(f: &PolyMap, profile: &HomogeneousProfile) -> Result<bool> {
    profile.validate(f)?;
    let n = f.dim();
    let jh = f.jacobian_h();
    let x: Vec<Polynomial> = (0..n).map(|j| Polynomial::var(n, j)).collect();
    let jhx = jh.mul_poly_vec(&x)?;
    let dprime = profile.reciprocal_diagonal();
    Ok((0..n).all(|i| {
        let rhs = &x[i] + &jhx[i].scale(&dprime[i]);
        rhs == *f.component(i)
    }))
}

/// Recovers `(A, d)` with `H_i = (A_i X)^{d_i}` if such rational data
/// exists. Zero components get a zero row and the default degree. For even
/// degrees the linear form with positive coefficient at its first variable is
/// chosen.
pub fn detect_power_linear(f: &PolyMap) -> Option<PowerLinearData> {
    let n = f.dim();
    let mut a = RatMatrix::zeros(n, n);
    let mut degrees = Vec::with_capacity(n);
    for (i, hi) in f.h().iter().enumerate() {
        if hi.is_zero() {
            degrees.push(ZERO_COMPONENT_DEGREE);
            continue;
        }
        let d = hi.homogeneous_degree()?;
        if d < 2 {
            return None;
        }
        let form = linear_root(hi, d)?;
        for (j, c) in form.into_iter().enumerate() {
            a[(i, j)] = c;
        }
        degrees.push(d);
    }
    PowerLinearData::new(a, degrees).ok()
}

/// The linear form `l` with `l^d = p`, if any.
fn linear_root(p: &Polynomial, d: u32) -> Option<Vec<Scalar>> {
    let n = p.arity();
    let j0 = *p.support_vars().first()?;
    let mut pure = vec![0u32; n];
    pure[j0] = d;
    let lead_pow = p.coefficient(&Monomial::new(pure));
    let lead = lead_pow.nth_root(d)?;
    if lead.is_zero() {
        return None;
    }
    // coefficient of x_{j0}^{d-1} x_j is d * a_{j0}^{d-1} * a_j
    let denom = &Scalar::from_int(d as i64) * &lead.pow(d - 1);
    let mut form = vec![Scalar::zero(); n];
    form[j0] = lead;
    for (j, slot) in form.iter_mut().enumerate() {
        if j == j0 {
            continue;
        }
        let mut e = vec![0u32; n];
        e[j0] = d - 1;
        e[j] = 1;
        let c = p.coefficient(&Monomial::new(e));
        *slot = &c / &denom;
    }
    let candidate = Polynomial::linear_form(&form).pow(d);
    (candidate == *p).then_some(form)
}
