//! One line per acceptance criterion. Every corpus is seeded, and every
//! verdict is re-checked here against an oracle that does not share code
//! with the routine under test (evaluation at random points, plain
//! composition, or a construction-time inverse).

use keller_core::casebook::{self, furter_map, furter_pipeline, generators as gen};
use keller_core::inversion::{
    det_identity_check, formal_inverse, inverse_via_pairing, line_injectivity_check,
    nilpotent_inverse_formula, rank_one_inverse,
};
use keller_core::linalg::{kernel_basis, same_span};
use keller_core::pairing::{gz_lift, gz_reduce, kernel_translation_check, GZPair, PairStatus};
use keller_core::power_linear::{realize_map, trace_free_check};
use keller_core::{
    default_var_names, parse_polynomial, Error, HomogeneousProfile, PolyMap, Scalar, SplitMix64,
};

struct Outcome {
    passed: bool,
    summary: String,
}

fn outcome(passed: bool, summary: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        summary: summary.into(),
    }
}

/// `F(G(p)) = p` at a few random rational points.
fn agrees_pointwise(f: &PolyMap, g: &PolyMap, rng: &mut SplitMix64) -> bool {
    (0..3).all(|_| {
        let p: Vec<Scalar> = (0..f.dim()).map(|_| rng.small_rational(9, 5)).collect();
        f.evaluate(&g.evaluate(&p).unwrap()).unwrap() == p
    })
}

fn furter(rng: &mut SplitMix64) -> Outcome {
    let r = match furter_pipeline() {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("pipeline error: {e}")),
    };
    // independent re-derivation of the pieces the report summarizes
    let f = furter_map();
    let inv = formal_inverse(&f, None).unwrap();
    let g = inv.inverse().unwrap();
    let first_degree_ok = g.component(0).degree().finite() == Some(6) && agrees_pointwise(&f, g, rng);
    let pair = gz_lift(&f).unwrap();
    let ext = keller_core::pairing::extend_with_power(&pair, 0, 2).unwrap();
    let big_inv = inverse_via_pairing(&ext, g).unwrap();
    let pointwise = agrees_pointwise(&ext.big, &big_inv, rng);
    let powers = ext.big.jacobian_h().vanishing_powers(4).unwrap();
    let small_powers = f.jacobian_h().vanishing_powers(3).unwrap();
    let passed = first_degree_ok
        && small_powers == [false, false, true]
        && r.lift_status == PairStatus::Strong
        && powers == [false, false, false, true]
        && r.extended_composition_identity
        && pointwise
        && big_inv.degree_u32() >= 12
        && big_inv.degree_u32() > 8;
    outcome(
        passed,
        format!(
            "deg(f^-1)_1 = {:?}, lift n = {} ({}), JH~ index {:?}, deg F~^-1 = {} vs 2^3 = 8",
            r.f_inverse_degrees[0],
            r.lift_dim,
            r.lift_status,
            r.extended_jh_index,
            r.extended_inverse_degree
        ),
    )
}

fn nilpotent_closed_form(rng: &mut SplitMix64) -> Outcome {
    let (mut ok, mut total, mut tried) = (0, 0, 0);
    while total < 100 && tried < 2000 {
        tried += 1;
        let n = rng.range_usize(2, 5);
        let d = rng.range_i64(2, 3) as u32;
        let f = gen::cubic_nilpotent_homogeneous(rng, n, d);
        let res = match nilpotent_inverse_formula(&f) {
            Ok(r) => r,
            Err(Error::HypothesisFailed(_)) => continue,
            Err(_) => {
                total += 1;
                continue;
            }
        };
        total += 1;
        let g = res.inverse().unwrap();
        let exact = f.compose(g).unwrap().is_identity() && g.compose(&f).unwrap().is_identity();
        if res.certified && exact && g.degree_u32() <= f.degree_u32().pow(2) {
            ok += 1;
        }
    }
    outcome(ok == total && total >= 100, format!("{ok}/{total} certified with deg <= d^2 ({tried} drawn)"))
}

fn index_transfer(rng: &mut SplitMix64, pairs: &mut Vec<GZPair>) -> Outcome {
    let (mut ok, mut total) = (0, 0);
    while total < 50 {
        let r = rng.range_usize(2, 3);
        let triangular = rng.chance(2, 3);
        let f = gen::liftable_map(rng, r, 2, triangular);
        let pair = gz_lift(&f).unwrap();
        if pair.status != PairStatus::Strong {
            total += 1;
            continue;
        }
        total += 1;
        let small = f.jacobian_h().vanishing_powers(r).unwrap();
        let big = pair.big.jacobian_h().vanishing_powers(r + 1).unwrap();
        if (1..=r).all(|k| small[k - 1] == big[k]) {
            ok += 1;
        }
        pairs.push(pair);
    }
    outcome(ok == total, format!("{ok}/{total} strong pairs with Jh^k = 0 <=> JH^(k+1) = 0"))
}

fn line_test(rng: &mut SplitMix64) -> Outcome {
    let (mut ok, mut coincident) = (0, 0);
    let total = 120;
    for _ in 0..total {
        let (f, profile, a, lambda) = gen::line_instance(rng);
        let chk = line_injectivity_check(&f, &profile, &a, &lambda).unwrap();
        // oracle: evaluate F directly at a and λa
        let la: Vec<Scalar> = a.iter().map(|v| v * &lambda).collect();
        let direct = f.evaluate(&a).unwrap() == f.evaluate(&la).unwrap();
        coincident += direct as usize;
        if chk.lhs == chk.rhs && chk.lhs == direct {
            ok += 1;
        }
    }
    let (mut det_ok, det_total) = (0, 40);
    for k in 0..det_total {
        let n = rng.range_usize(1, 3);
        let d = rng.range_i64(2, 3) as u32;
        let f = if k % 2 == 0 {
            gen::triangular_homogeneous(rng, n, d)
        } else {
            gen::random_homogeneous_map(rng, n, d)
        };
        let profile = HomogeneousProfile::uniform(n, d).unwrap();
        let holds = det_identity_check(&f, &profile).unwrap().holds;
        // oracle: det JF computed by the polynomial-matrix determinant
        let keller = f.jacobian().determinant().unwrap() == keller_core::Polynomial::one(n);
        det_ok += (holds == keller) as usize;
    }
    outcome(
        ok == total && det_ok == det_total && coincident > 0,
        format!("{ok}/{total} lines with lhs = rhs ({coincident} coincident), {det_ok}/{det_total} Keller <=> det identity"),
    )
}

fn bcw(rng: &mut SplitMix64) -> Outcome {
    let (mut ok, mut total, mut seed) = (0, 0, 0u64);
    while total < 100 {
        seed += 1;
        let n = rng.range_usize(2, 4);
        let d = rng.range_i64(2, 3) as u32;
        let steps = rng.range_usize(1, 2);
        let (f, oracle) = gen::random_keller_with_inverse(n, d, steps, seed);
        if f.degree_u32() > 3 || f.is_identity() {
            continue;
        }
        total += 1;
        let res = formal_inverse(&f, None).unwrap();
        let bound = f.degree_u32().pow(n as u32 - 1);
        if res.certified && res.inverse() == Some(&oracle) && res.inverse_degree().unwrap() <= bound {
            ok += 1;
        }
    }
    outcome(ok == total, format!("{ok}/{total} Keller maps inverted within (deg F)^(n-1), matching the oracle"))
}

fn sandwich(rng: &mut SplitMix64, pairs: &mut Vec<GZPair>) -> Outcome {
    let (mut ok, mut total) = (0, 0);
    while total < 30 {
        let r = rng.range_usize(2, 3);
        let f = gen::liftable_map(rng, r, 3, true);
        let pair = gz_lift(&f).unwrap();
        total += 1;
        let small = formal_inverse(&f, None).unwrap().inverse().unwrap().clone();
        let big_inv = inverse_via_pairing(&pair, &small).unwrap();
        // F∘G = X was checked exactly inside; check G∘F = X pointwise
        let exact = agrees_pointwise(&big_inv, &pair.big, rng);
        let (lo, hi, d) = (small.degree_u32(), big_inv.degree_u32(), pair.big.degree_u32());
        if pair.status == PairStatus::Strong && exact && lo <= hi && hi <= d * lo {
            ok += 1;
        }
        pairs.push(pair);
    }
    outcome(ok == total, format!("{ok}/{total} strong pairs with deg f^-1 <= deg F^-1 <= d·deg f^-1"))
}

fn trace_free(rng: &mut SplitMix64) -> Outcome {
    let kinds = [gen::TraceFreeKind::Triangular, gen::TraceFreeKind::PermutedTriangular, gen::TraceFreeKind::RankOne];
    let (mut ok, total) = (0, 24);
    for k in 0..total {
        let n = rng.range_usize(2, 5);
        let d = rng.range_i64(2, 3) as u32;
        let data = gen::trace_free_power_linear(rng, n, d, kinds[k % 3]);
        let rep = trace_free_check(&data).unwrap();
        let f = realize_map(&data);
        let exact = rep
            .inverse_result
            .as_ref()
            .and_then(|r| r.inverse())
            .is_some_and(|g| g.compose(&f).unwrap().is_identity());
        if rep.hypotheses_hold && exact {
            ok += 1;
        }
    }
    outcome(ok == total, format!("{ok}/{total} trace-free instances with vanishing principal minors inverted"))
}

fn rank_one(rng: &mut SplitMix64) -> Outcome {
    let lambdas = [Scalar::zero(), Scalar::one(), Scalar::from_int(2), Scalar::frac(-1, 2)];
    let (mut ok, mut total) = (0, 0);
    for n in 1..=5 {
        for s in 0..n {
            for lambda in &lambdas {
                let nf = gen::rank_one_instance(rng, n, s, lambda.clone());
                let f = nf.map().unwrap();
                total += 1;
                let Ok(g) = rank_one_inverse(&nf) else { continue };
                let exact = g.compose(&f).unwrap().is_identity() && f.compose(&g).unwrap().is_identity();
                if exact && g.degree() == f.degree() {
                    ok += 1;
                }
            }
        }
    }
    outcome(ok == total && total >= 30, format!("{ok}/{total} normal forms with certified displayed inverse of equal degree"))
}

fn kernels(rng: &mut SplitMix64, pairs: &mut Vec<GZPair>) -> Outcome {
    let (mut ok, total) = (0, 60);
    for _ in 0..total {
        let n = rng.range_usize(1, 5);
        let data = gen::random_power_linear(rng, n);
        let f = realize_map(&data);
        let ck = f.jacobian_h().constant_kernel();
        if same_span(&ck, &kernel_basis(&data.a), n) {
            ok += 1;
        }
    }
    for _ in 0..10 {
        let n = rng.range_usize(2, 4);
        let (big, _) = gen::kh_instance(rng, n);
        pairs.push(gz_reduce(&big, 1).unwrap());
    }
    let valid: Vec<&GZPair> = pairs.iter().filter(|p| p.status.is_valid()).collect();
    let translated = valid
        .iter()
        .filter(|p| kernel_translation_check(&p.big, &p.b, &p.c).unwrap())
        .count();
    outcome(
        ok == total && translated == valid.len(),
        format!("{ok}/{total} constant kernels equal ker A, {translated}/{} pairs translation-invariant", valid.len()),
    )
}

fn round_trip(rng: &mut SplitMix64) -> Outcome {
    let (mut ok, total) = (0, 600);
    for _ in 0..total {
        let n = rng.range_usize(1, 4);
        let p = gen::random_canonical_polynomial(rng, n);
        let names = default_var_names(n);
        let text = p.render(&names);
        if parse_polynomial(&text, &names).ok() == Some(p.clone()) && text == p.to_string() {
            ok += 1;
        }
    }
    let a = serde_json::to_string(&casebook::run_suite(None, 2024)).unwrap();
    let b = serde_json::to_string(&casebook::run_suite(None, 2024)).unwrap();
    outcome(
        ok == total && a == b,
        format!("{ok}/{total} polynomials round-trip, suite JSON identical across runs: {}", a == b),
    )
}

fn main() {
    let mut pairs = Vec::new();
    let mut rng = SplitMix64::new(0x5eed);
    let mut failed = 0;
    let mut report = |i: usize, name: &str, o: Outcome| {
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("criterion {i:>2} {tag} {name}: {}", o.summary);
        failed += !o.passed as usize;
    };
    report(1, "furter pipeline", furter(&mut rng.fork()));
    report(2, "cubic-nilpotent closed form", nilpotent_closed_form(&mut rng.fork()));
    report(3, "index transfer", index_transfer(&mut rng.fork(), &mut pairs));
    report(4, "line injectivity", line_test(&mut rng.fork()));
    report(5, "degree bound", bcw(&mut rng.fork()));
    report(6, "pairing sandwich", sandwich(&mut rng.fork(), &mut pairs));
    report(7, "trace-free inversion", trace_free(&mut rng.fork()));
    report(8, "rank-one normal form", rank_one(&mut rng.fork()));
    report(9, "kernel properties", kernels(&mut rng.fork(), &mut pairs));
    report(10, "round trip and determinism", round_trip(&mut rng.fork()));
    if failed > 0 {
        eprintln!("{failed} criteria failed");
        std::process::exit(1);
    }
}
