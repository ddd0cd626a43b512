//! Seeded generators for the scenario corpora. Every generator is a pure
//! function of its `SplitMix64` stream.

use crate::error::Result;
use crate::inversion::RankOneNormalForm;
use crate::linalg::{self, RatMatrix};
use crate::poly::{Monomial, Polynomial};
use crate::polymap::{HomogeneousProfile, PolyMap};
use crate::power_linear::PowerLinearData;
use crate::rng::SplitMix64;
use crate::scalar::Scalar;

fn small_int(rng: &mut SplitMix64, bound: i64) -> Scalar {
    Scalar::from_int(rng.range_i64(-bound, bound))
}

fn nonzero_int(rng: &mut SplitMix64, bound: i64) -> Scalar {
    loop {
        let v = rng.range_i64(-bound, bound);
        if v != 0 {
            return Scalar::from_int(v);
        }
    }
}

/// A random monomial of total degree `d` in the variables `vars`.
pub fn random_monomial(rng: &mut SplitMix64, arity: usize, vars: &[usize], d: u32) -> Monomial {
    let mut e = vec![0u32; arity];
    for _ in 0..d {
        e[vars[rng.below(vars.len() as u64) as usize]] += 1;
    }
    Monomial::new(e)
}

/// Sum of `terms` random monomials of degree `d` in `vars` with small
/// nonzero integer coefficients; may cancel to zero.
pub fn random_homogeneous(rng: &mut SplitMix64, arity: usize, vars: &[usize], d: u32, terms: usize) -> Polynomial {
    if vars.is_empty() {
        return Polynomial::zero(arity);
    }
    (0..terms).fold(Polynomial::zero(arity), |acc, _| {
        let m = random_monomial(rng, arity, vars, d);
        let c = nonzero_int(rng, 3);
        &acc + &Polynomial::monomial(arity, m, c)
    })
}

/// Random polynomial in `vars` with terms of degrees `lo..=hi`.
pub fn random_polynomial(rng: &mut SplitMix64, arity: usize, vars: &[usize], lo: u32, hi: u32, terms: usize) -> Polynomial {
    (0..terms).fold(Polynomial::zero(arity), |acc, _| {
        let d = rng.range_i64(lo as i64, hi as i64) as u32;
        &acc + &random_homogeneous(rng, arity, vars, d, 1)
    })
}

/// Univariate polynomial of degree at most `hi` with terms of degree `lo..=hi`.
pub fn random_univariate(rng: &mut SplitMix64, lo: u32, hi: u32) -> Polynomial {
    random_polynomial(rng, 1, &[0], lo, hi, 2)
}

/// A random polynomial with rational coefficients in canonical form, for
/// render/parse round trips.
pub fn random_canonical_polynomial(rng: &mut SplitMix64, arity: usize) -> Polynomial {
    let vars: Vec<usize> = (0..arity).collect();
    let terms = rng.range_usize(0, 6);
    Polynomial::from_terms(
        arity,
        (0..terms).map(|_| {
            let d = rng.range_i64(0, 4) as u32;
            (random_monomial(rng, arity, &vars, d), rng.small_rational(20, 7))
        }),
    )
}

/// Unit upper triangular integer matrix with rows permuted; determinant ±1.
pub fn unimodular_matrix(rng: &mut SplitMix64, n: usize) -> RatMatrix {
    let mut rows: Vec<Vec<Scalar>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match j.cmp(&i) {
                    std::cmp::Ordering::Equal => Scalar::one(),
                    std::cmp::Ordering::Greater => small_int(rng, 2),
                    std::cmp::Ordering::Less => Scalar::zero(),
                })
                .collect()
        })
        .collect();
    rng.shuffle(&mut rows);
    RatMatrix::from_rows(rows).expect("square")
}

/// `x ↦ Mx`.
pub fn linear_map(m: &RatMatrix) -> PolyMap {
    PolyMap::new((0..m.rows()).map(|i| Polynomial::linear_form(m.row(i))).collect()).expect("square")
}

/// A Keller map `F` with `F(0) = 0`, `JF(0) = I`, together with its inverse
/// assembled from the reversed construction steps.
///
/// Each step is an elementary map `x_i += p(other variables)`, with `p` made
/// of terms of degrees `2..=d`, conjugated by a random unimodular linear map.
pub fn random_keller_with_inverse(n: usize, d: u32, steps: usize, seed: u64) -> (PolyMap, PolyMap) {
    assert!(n >= 1 && d >= 2);
    let mut rng = SplitMix64::new(seed);
    let mut f = PolyMap::identity(n);
    let mut g = PolyMap::identity(n);
    for _ in 0..steps {
        let i = rng.range_usize(0, n - 1);
        let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        let p = if others.is_empty() {
            Polynomial::zero(n)
        } else {
            let terms = rng.range_usize(1, 2);
            random_polynomial(&mut rng, n, &others, 2, d, terms)
        };
        let mut e = PolyMap::identity(n).into_components();
        let mut e_inv = e.clone();
        e[i] = &e[i] + &p;
        e_inv[i] = &e_inv[i] - &p;
        let l = unimodular_matrix(&mut rng, n);
        let l_inv = linalg::inverse(&l).expect("unimodular");
        let (lm, lm_inv) = (linear_map(&l), linear_map(&l_inv));
        let e = PolyMap::new(e).expect("square");
        let e_inv = PolyMap::new(e_inv).expect("square");
        // T = L^{-1} E L, T^{-1} = L^{-1} E^{-1} L
        let t = lm_inv.compose(&e.compose(&lm).unwrap()).unwrap();
        let t_inv = lm_inv.compose(&e_inv.compose(&lm).unwrap()).unwrap();
        f = t.compose(&f).unwrap();
        g = g.compose(&t_inv).unwrap();
    }
    (f, g)
}

/// Keller map from `steps` conjugated elementary steps; the identity when
/// `steps = 0`.
pub fn random_keller_generator(n: usize, d: u32, steps: usize, seed: u64) -> PolyMap {
    random_keller_with_inverse(n, d, steps, seed).0
}

/// Assigns each of `n` variables a level in `0..levels`, with level 0
/// always occupied.
pub fn random_levels(rng: &mut SplitMix64, n: usize, levels: usize) -> Vec<usize> {
    let mut lv: Vec<usize> = (0..n).map(|_| rng.range_usize(0, levels - 1)).collect();
    if !lv.contains(&0) {
        lv[0] = 0;
    }
    lv
}

/// `P A P^t` for a random permutation `P`.
pub fn permute_similar(rng: &mut SplitMix64, a: &RatMatrix) -> RatMatrix {
    let n = a.rows();
    let mut perm: Vec<usize> = (0..n).collect();
    rng.shuffle(&mut perm);
    let mut out = RatMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(perm[i], perm[j])] = a[(i, j)].clone();
        }
    }
    out
}

/// Strictly lower triangular `A` whose nonzero entries respect a level
/// structure with at most three levels (keeps inverse degrees small).
pub fn leveled_triangular_matrix(rng: &mut SplitMix64, n: usize) -> RatMatrix {
    let mut lv = random_levels(rng, n, 3);
    lv.sort_unstable();
    let mut a = RatMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..i {
            if lv[j] < lv[i] && rng.chance(2, 3) {
                a[(i, j)] = small_int(rng, 2);
            }
        }
    }
    a
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceFreeKind {
    Triangular,
    PermutedTriangular,
    RankOne,
}

/// Power-linear data with vanishing trace of `JH` and vanishing principal
/// minors of `A`.
pub fn trace_free_power_linear(rng: &mut SplitMix64, n: usize, d: u32, kind: TraceFreeKind) -> PowerLinearData {
    let a = match kind {
        TraceFreeKind::Triangular => leveled_triangular_matrix(rng, n),
        TraceFreeKind::PermutedTriangular => {
            let a = leveled_triangular_matrix(rng, n);
            permute_similar(rng, &a)
        }
        TraceFreeKind::RankOne => rank_one_trace_free(rng, n, d),
    };
    PowerLinearData::homogeneous(a, d).expect("square")
}

/// `A = u v^t` with `sum_i v_i u_i^d = 0`, solved for `v_n`.
pub fn rank_one_trace_free(rng: &mut SplitMix64, n: usize, d: u32) -> RatMatrix {
    let u: Vec<Scalar> = (0..n).map(|_| nonzero_int(rng, 2)).collect();
    let mut v: Vec<Scalar> = (0..n).map(|_| small_int(rng, 2)).collect();
    let partial: Scalar = (0..n - 1).map(|i| &v[i] * &u[i].pow(d)).sum();
    v[n - 1] = -(&partial / &u[n - 1].pow(d));
    let mut a = RatMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = &u[i] * &v[j];
        }
    }
    a
}

/// Homogeneous `H` of degree `d` with `JH^3 = 0`: either a trace-free
/// rank-one power-linear map, or random homogeneous components respecting
/// a three-level structure, conjugated by a permutation.
pub fn cubic_nilpotent_homogeneous(rng: &mut SplitMix64, n: usize, d: u32) -> PolyMap {
    if rng.chance(1, 3) {
        let data = PowerLinearData::homogeneous(rank_one_trace_free(rng, n, d), d).expect("square");
        return PolyMap::from_h(data.h()).expect("square");
    }
    let lv = random_levels(rng, n, 3);
    let h = (0..n)
        .map(|i| {
            let lower: Vec<usize> = (0..n).filter(|&j| lv[j] < lv[i]).collect();
            let terms = rng.range_usize(1, 2);
            random_homogeneous(rng, n, &lower, d, terms)
        })
        .collect();
    PolyMap::from_h(h).expect("square")
}

/// `H` strictly triangular with respect to a random variable order and
/// homogeneous of degree `d`, so `F` is Keller.
pub fn triangular_homogeneous(rng: &mut SplitMix64, n: usize, d: u32) -> PolyMap {
    let mut order: Vec<usize> = (0..n).collect();
    rng.shuffle(&mut order);
    let mut h = vec![Polynomial::zero(n); n];
    for (pos, &i) in order.iter().enumerate() {
        let lower = order[..pos].to_vec();
        let terms = rng.range_usize(1, 2);
        h[i] = random_homogeneous(rng, n, &lower, d, terms);
    }
    PolyMap::from_h(h).expect("square")
}

/// `H` with random homogeneous components of degree `d`.
pub fn random_homogeneous_map(rng: &mut SplitMix64, n: usize, d: u32) -> PolyMap {
    let vars: Vec<usize> = (0..n).collect();
    let h = (0..n)
        .map(|_| {
            let terms = rng.range_usize(1, 2);
            random_homogeneous(rng, n, &vars, d, terms)
        })
        .collect();
    PolyMap::from_h(h).expect("square")
}

/// An instance for the line test: `(F, profile, a, λ)` with `λ ∉ {0, 1}`.
/// Half of the instances are planted so that `F(a) = F(λa)`.
pub fn line_instance(rng: &mut SplitMix64) -> (PolyMap, HomogeneousProfile, Vec<Scalar>, Scalar) {
    let n = rng.range_usize(1, 4);
    let lambda = loop {
        let l = rng.small_rational(5, 3);
        if !l.is_zero() && !l.is_one() && l != Scalar::from_int(-1) {
            break l;
        }
    };
    let mut degrees: Vec<u32> = (0..n).map(|_| rng.range_i64(2, 3) as u32).collect();
    let all: Vec<usize> = (0..n).collect();
    let planted = rng.chance(1, 2);
    if planted {
        // t + t^2 = λt + λ^2 t^2 has the rational root t = -1/(1+λ)
        degrees[0] = 2;
    }
    let mut h = Vec::with_capacity(n);
    for (i, &d) in degrees.iter().enumerate() {
        let p = if planted {
            // every monomial except a pure x1 power contains some x_j, j >= 2
            let rest: Vec<usize> = (1..n).collect();
            let mut p = Polynomial::zero(n);
            if !rest.is_empty() {
                for _ in 0..rng.range_usize(0, 2) {
                    let mut m = random_monomial(rng, n, &all, d - 1).exponents().to_vec();
                    m[rest[rng.below(rest.len() as u64) as usize]] += 1;
                    p = &p + &Polynomial::monomial(n, Monomial::new(m), nonzero_int(rng, 3));
                }
            }
            if i == 0 {
                let mut e = vec![0; n];
                e[0] = d;
                p = &p + &Polynomial::monomial(n, Monomial::new(e), Scalar::one());
            }
            p
        } else {
            random_homogeneous(rng, n, &all, d, 2)
        };
        h.push(p);
    }
    let f = PolyMap::from_h(h).expect("square");
    let profile = HomogeneousProfile::new(degrees).expect("positive");
    let a = if planted {
        planted_point(n, &lambda)
    } else {
        (0..n).map(|_| rng.small_rational(4, 3)).collect()
    };
    (f, profile, a, lambda)
}

/// `a = (-1/(1+λ), 0, ..., 0)`.
fn planted_point(n: usize, lambda: &Scalar) -> Vec<Scalar> {
    let mut a = vec![Scalar::zero(); n];
    a[0] = -(&Scalar::one() + lambda).recip().expect("λ != -1");
    a
}

/// Normal form with `rank JH <= 1` for the given `(n, s, λ)`.
pub fn rank_one_instance(rng: &mut SplitMix64, n: usize, s: usize, lambda: Scalar) -> RankOneNormalForm {
    let c = (0..s).map(|_| small_int(rng, 3)).collect();
    let first: Vec<usize> = (0..s).collect();
    let g = if s == 0 {
        Polynomial::constant(n, small_int(rng, 3))
    } else {
        let terms = rng.range_usize(1, 3);
        random_polynomial(rng, n, &first, 0, 3, terms)
    };
    let tail = (s + 1..n).map(|_| random_univariate(rng, 0, 3)).collect();
    RankOneNormalForm {
        n,
        s,
        c,
        lambda,
        g,
        tail,
    }
}

/// `f = x + h` in dimension `r` with `h` free of constant and linear terms.
/// When `triangular`, `h_i` only involves `x_{i+1}, ..., x_r`, so `f` is
/// invertible with nilpotent `Jh`.
pub fn liftable_map(rng: &mut SplitMix64, r: usize, max_degree: u32, triangular: bool) -> PolyMap {
    loop {
        let h: Vec<Polynomial> = (0..r)
            .map(|i| {
                let vars: Vec<usize> = if triangular { (i + 1..r).collect() } else { (0..r).collect() };
                if vars.is_empty() {
                    return Polynomial::zero(r);
                }
                let terms = rng.range_usize(1, 2);
                random_polynomial(rng, r, &vars, 2, max_degree, terms)
            })
            .collect();
        if h.iter().any(|p| !p.is_zero()) {
            return PolyMap::from_h(h).expect("square");
        }
    }
}

/// `F = X + q(a·x)` with `sum_i a_i q_i = 0`, so `JH^2 = 0` and the
/// constant kernel of `JH` contains `ker a^t`.
pub fn kh_instance(rng: &mut SplitMix64, n: usize) -> (PolyMap, Vec<Scalar>) {
    assert!(n >= 2);
    let a: Vec<Scalar> = (0..n).map(|_| nonzero_int(rng, 2)).collect();
    let mut q: Vec<Polynomial> = (0..n - 1).map(|_| random_univariate(rng, 2, 3)).collect();
    let partial = (0..n - 1).fold(Polynomial::zero(1), |acc, i| &acc + &q[i].scale(&a[i]));
    q.push(partial.scale(&-(a[n - 1].recip().expect("nonzero"))));
    let t = Polynomial::linear_form(&a);
    let h = q
        .iter()
        .map(|qi| qi.substitute(std::slice::from_ref(&t)))
        .collect::<Result<Vec<_>>>()
        .expect("arity one");
    (PolyMap::from_h(h).expect("square"), a)
}

/// Random power-linear data with prescribed rank structure `A = P Q`.
pub fn random_power_linear(rng: &mut SplitMix64, n: usize) -> PowerLinearData {
    let k = rng.range_usize(1, n);
    let p = RatMatrix::from_rows((0..n).map(|_| (0..k).map(|_| small_int(rng, 2)).collect()).collect())
        .expect("rectangular");
    let q = RatMatrix::from_rows((0..k).map(|_| (0..n).map(|_| small_int(rng, 2)).collect()).collect())
        .expect("rectangular");
    let a = p.mul(&q).expect("conformal");
    let degrees = (0..n).map(|_| rng.range_i64(2, 3) as u32).collect();
    PowerLinearData::new(a, degrees).expect("square")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keller_generator_examples() {
        assert!(random_keller_generator(3, 2, 0, 1).is_identity());
        for seed in 0..10 {
            let (f, g) = random_keller_with_inverse(3, 2, 2, seed);
            assert!(f.is_keller());
            assert!(f.compose(&g).unwrap().is_identity());
            assert!(g.compose(&f).unwrap().is_identity());
            assert!(crate::inversion::require_normalized(&f).is_ok());
        }
        assert_eq!(random_keller_generator(3, 3, 2, 9), random_keller_generator(3, 3, 2, 9));
    }

    #[test]
    fn trace_free_corpora() {
        let mut rng = SplitMix64::new(5);
        for kind in [TraceFreeKind::Triangular, TraceFreeKind::PermutedTriangular, TraceFreeKind::RankOne] {
            for n in 2..=4 {
                let data = trace_free_power_linear(&mut rng, n, 3, kind);
                assert!(crate::power_linear::trace_jh(&data).is_zero());
                assert!(linalg::principal_minor_scan(&data.a, 2, n).unwrap().all_vanish());
            }
        }
    }

    #[test]
    fn cubic_nilpotent_corpus() {
        let mut rng = SplitMix64::new(11);
        for _ in 0..10 {
            let n = rng.range_usize(2, 5);
            let f = cubic_nilpotent_homogeneous(&mut rng, n, 2);
            let idx = f.jacobian_h().nilpotency_index().unwrap();
            assert!(matches!(idx, Some(k) if k <= 3));
        }
    }

    #[test]
    fn kh_instances_are_keller() {
        let mut rng = SplitMix64::new(3);
        for n in 2..=4 {
            let (f, _) = kh_instance(&mut rng, n);
            assert!(f.is_keller());
            assert!(f.jacobian_h().vanishing_powers(2).unwrap()[1]);
        }
    }
}
