use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use keller_core::casebook::run_suite;
use keller_core::files::{
    parse_map_file, parse_matrix_file, parse_rect_matrix, render_map_file, render_rect_matrix, MapFile,
};
use keller_core::inversion::{
    build_d, degree_bound_report, is_right_inverse, line_injectivity_check, nilpotent_inverse_formula,
    rank_one_inverse, DegreeBoundReport, RankOneNormalForm,
};
use keller_core::linalg::principal_minor_scan;
use keller_core::pairing::{extend_with_power, gz_lift, gz_reduce, pull_back, verify_pairing};
use keller_core::polymap::detect_power_linear;
use keller_core::power_linear::corollary_diagnostics;
use keller_core::{
    default_var_names, formal_inverse, GZPair, HomogeneousProfile, InverseResult, PolyMap, RatMatrix, Scalar,
    Verdict,
};
use serde_json::{json, Value};

use crate::report::{CliError, CliResult, Outcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Formal,
    Pairing,
    Nilpotent,
    Rank1,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Formal => "formal",
            Method::Pairing => "pairing",
            Method::Nilpotent => "nilpotent",
            Method::Rank1 => "rank1",
        }
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn in_file<T>(path: &Path, r: keller_core::Result<T>) -> CliResult<T> {
    r.map_err(|source| CliError::File {
        path: path.to_path_buf(),
        source,
    })
}

fn read_map(path: &Path) -> CliResult<MapFile> {
    in_file(path, parse_map_file(&read(path)?))
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

fn map_inputs(path: &Path, mf: &MapFile) -> Value {
    json!({
        "file": path.display().to_string(),
        "vars": mf.vars,
        "map": mf.map.render(&mf.vars),
    })
}

fn join(parts: &[String]) -> String {
    parts.join(", ")
}

pub fn check(path: &Path) -> CliResult<Outcome> {
    let mf = read_map(path)?;
    let f = &mf.map;
    let vars = &mf.vars;
    let jh = f.jacobian_h();
    let index = jh.nilpotency_index()?;
    let kernel = jh.constant_kernel();
    let det = f.jacobian_determinant();
    let keller = f.is_keller();
    let power_linear = detect_power_linear(f);
    let corollaries = power_linear.as_ref().map(corollary_diagnostics).transpose()?;
    let profile = HomogeneousProfile::infer(f).ok();
    let rendered = render_map_file(vars, f);
    let round_trip = parse_map_file(&rendered).map(|back| back == mf).unwrap_or(false);

    let mut text = vec![
        format!("dimension: {}", f.dim()),
        format!("degree: {}", f.degree_u32()),
        format!("keller: {keller}"),
        format!("jacobian determinant: {}", det.render(vars)),
        match index {
            Some(k) => format!("JH nilpotency index: {k}"),
            None => "JH nilpotent: false".to_string(),
        },
        format!("constant kernel dimension: {}", kernel.len()),
        format!("power-linear: {}", power_linear.is_some()),
    ];
    if let Some(p) = &profile {
        text.push(format!(
            "homogeneous profile: {}",
            p.degrees.iter().map(u32::to_string).collect::<Vec<_>>().join(" ")
        ));
    }
    text.push(format!("round trip: {round_trip}"));
    let results = json!({
        "dimension": f.dim(),
        "degree": f.degree_u32(),
        "keller": keller,
        "jacobian_determinant": det.render(vars),
        "nilpotency_index": index,
        "constant_kernel": to_json(&kernel),
        "power_linear": power_linear.as_ref().map(to_json),
        "corollaries": corollaries.as_ref().map(to_json),
        "homogeneous_profile": profile.as_ref().map(|p| p.degrees.clone()),
        "rendered": f.render(vars),
        "round_trip": round_trip,
    });
    Ok(Outcome::ok(map_inputs(path, &mf), results, text))
}

fn degree_table_text(name: &str, t: &DegreeBoundReport) -> Vec<String> {
    let mut out = vec![format!(
        "{name}: deg {} -> inverse deg {}, bcw bound {}",
        t.degree, t.inverse_degree, t.bcw_bound
    )];
    for c in t.checks.iter().filter(|c| c.applicable) {
        let bound = c.bound.map_or(String::new(), |b| format!(" <= {b}"));
        out.push(format!("  {}{}: {}", c.name, bound, if c.holds { "holds" } else { "FAILS" }));
    }
    out
}

pub fn invert(path: &Path, bound: Option<u32>, method: Method) -> CliResult<Outcome> {
    let mf = read_map(path)?;
    let f = &mf.map;
    let vars = &mf.vars;
    let mut inputs = map_inputs(path, &mf);
    inputs["bound"] = json!(bound);
    inputs["method"] = json!(method.name());
    let mut extra = serde_json::Map::new();
    let mut text = vec![format!("method: {}", method.name())];
    let mut lift_table = None;

    let result = match method {
        Method::Formal => formal_inverse(f, bound)?,
        Method::Nilpotent => nilpotent_inverse_formula(f)?,
        Method::Rank1 => {
            let nf = RankOneNormalForm::recognize(f)?;
            let g = rank_one_inverse(&nf)?;
            let certified = g.compose(f)?.is_identity();
            extra.insert("normal_form".into(), json!({ "s": nf.s, "lambda": nf.lambda.to_string() }));
            text.push(format!("normal form: s = {}, lambda = {}", nf.s, nf.lambda));
            certified_result(g, certified)
        }
        Method::Pairing => {
            let pair = gz_lift(f)?;
            let big_result = formal_inverse(&pair.big, bound)?;
            text.push(format!("lift: n = {}, {}", pair.n(), pair.status));
            extra.insert("pair".into(), pair_json(&pair));
            match big_result.inverse() {
                None => InverseResult {
                    verdict: Verdict::NotInvertibleWithinBound,
                    bound: big_result.bound,
                    certified: false,
                },
                Some(big_inv) => {
                    let g = PolyMap::new(pull_back(big_inv, &pair.b, &pair.c)?)?;
                    let certified = is_right_inverse(f, &g)? && g.compose(f)?.is_identity();
                    let table = degree_bound_report(&pair.big, &big_result, Some((&pair, g.degree_u32())))?;
                    extra.insert("lift_inverse".into(), json!(big_inv.render_default()));
                    lift_table = Some(table);
                    certified_result(g, certified)
                }
            }
        }
    };

    let mut results = json!({
        "bound": result.bound,
        "certified": result.certified,
    });
    let negative = match result.inverse() {
        Some(g) => {
            let table = degree_bound_report(f, &result, None)?;
            let rendered = g.render(vars);
            text.push(format!("inverse: {}", join(&rendered)));
            text.push(format!("certified: {}", result.certified));
            text.extend(degree_table_text("degrees", &table));
            results["verdict"] = json!("inverse");
            results["inverse"] = json!(rendered);
            results["inverse_degree"] = json!(g.degree_u32());
            results["degree_table"] = to_json(&table);
            (!result.certified).then(|| "inverse could not be certified".to_string())
        }
        None => {
            text.push(format!("not invertible within bound {}", result.bound));
            results["verdict"] = json!("not_invertible_within_bound");
            Some(format!("no inverse of degree <= {}", result.bound))
        }
    };
    if let Some(t) = &lift_table {
        text.extend(degree_table_text("lift degrees", t));
        results["lift_degree_table"] = to_json(t);
    }
    for (k, v) in extra {
        results[k] = v;
    }
    let message = negative.clone().unwrap_or_default();
    Ok(Outcome::ok(inputs, results, text).negative_if(negative.is_some(), message))
}

fn certified_result(map: PolyMap, certified: bool) -> InverseResult {
    let degree = map.degree_u32();
    InverseResult {
        verdict: Verdict::Inverse { map, degree },
        bound: degree,
        certified,
    }
}

fn pair_json(pair: &GZPair) -> Value {
    json!({
        "r": pair.r(),
        "n": pair.n(),
        "f": pair.f.render_default(),
        "F": pair.big.render_default(),
        "B": pair.b.to_strings(),
        "C": pair.c.to_strings(),
        "status": pair.status.to_string(),
    })
}

fn pair_text(pair: &GZPair) -> Vec<String> {
    let rows = |m: &RatMatrix| {
        m.to_strings()
            .iter()
            .map(|r| format!("  [{}]", r.join(" ")))
            .collect::<Vec<_>>()
    };
    let mut out = vec![
        format!("status: {}", pair.status),
        format!("r = {}, n = {}", pair.r(), pair.n()),
        format!("f: {}", join(&pair.f.render_default())),
        format!("F: {}", join(&pair.big.render_default())),
        "B:".to_string(),
    ];
    out.extend(rows(&pair.b));
    out.push("C:".to_string());
    out.extend(rows(&pair.c));
    out
}

const PAIR_FILES: [&str; 4] = ["f.txt", "F.txt", "B.txt", "C.txt"];

fn save_pair(dir: &Path, pair: &GZPair) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let texts = [
        render_map_file(&default_var_names(pair.r()), &pair.f),
        render_map_file(&default_var_names(pair.n()), &pair.big),
        render_rect_matrix(&pair.b),
        render_rect_matrix(&pair.c),
    ];
    for (name, text) in PAIR_FILES.iter().zip(texts) {
        write(&dir.join(name), &text)?;
    }
    Ok(())
}

fn load_pair(dir: &Path) -> CliResult<GZPair> {
    let path = |name: &str| dir.join(name);
    let f = read_map(&path("f.txt"))?.map;
    let big = read_map(&path("F.txt"))?.map;
    let b = in_file(&path("B.txt"), parse_rect_matrix(&read(&path("B.txt"))?))?;
    let c = in_file(&path("C.txt"), parse_rect_matrix(&read(&path("C.txt"))?))?;
    let status = verify_pairing(&f, &big, &b, &c)?;
    Ok(GZPair { f, big, b, c, status })
}

fn pair_outcome(inputs: Value, pair: &GZPair, save: Option<&PathBuf>) -> CliResult<Outcome> {
    let mut text = pair_text(pair);
    if let Some(dir) = save {
        save_pair(dir, pair)?;
        text.push(format!("saved to {}", dir.display()));
    }
    Ok(Outcome::ok(inputs, pair_json(pair), text)
        .negative_if(!pair.status.is_valid(), format!("pair is {}", pair.status)))
}

pub fn lift(path: &Path, save: Option<&PathBuf>) -> CliResult<Outcome> {
    let mf = read_map(path)?;
    let pair = gz_lift(&mf.map)?;
    pair_outcome(map_inputs(path, &mf), &pair, save)
}

pub fn reduce(path: &Path, r: usize, save: Option<&PathBuf>) -> CliResult<Outcome> {
    let mf = read_map(path)?;
    let pair = gz_reduce(&mf.map, r)?;
    let mut inputs = map_inputs(path, &mf);
    inputs["r"] = json!(r);
    pair_outcome(inputs, &pair, save)
}

pub fn extend(dir: &Path, i: usize, d: u32, save: Option<&PathBuf>) -> CliResult<Outcome> {
    if i == 0 {
        return Err(CliError::Usage("--i is 1-based".into()));
    }
    let pair = load_pair(dir)?;
    let mut inputs = pair_json(&pair);
    inputs["dir"] = json!(dir.display().to_string());
    inputs["i"] = json!(i);
    inputs["d"] = json!(d);
    if !pair.status.is_valid() {
        return Ok(Outcome::ok(inputs, Value::Null, vec![format!("input pair is {}", pair.status)])
            .negative_if(true, format!("input pair is {}", pair.status)));
    }
    let extended = extend_with_power(&pair, i - 1, d)?;
    pair_outcome(inputs, &extended, save)
}

pub fn minors(path: &Path, lo: usize, hi: usize) -> CliResult<Outcome> {
    let m = in_file(path, parse_matrix_file(&read(path)?))?;
    let scan = principal_minor_scan(&m.matrix, lo, hi)?;
    let mut text = Vec::new();
    for s in &scan.sizes {
        match &s.witness {
            None => text.push(format!("size {}: all vanish", s.size)),
            Some(w) => {
                let idx: Vec<String> = w.indices.iter().map(|i| (i + 1).to_string()).collect();
                text.push(format!("size {}: minor on {{{}}} = {}", s.size, idx.join(","), w.value));
            }
        }
    }
    let inputs = json!({
        "file": path.display().to_string(),
        "matrix": m.matrix.to_strings(),
        "degrees": m.degrees,
        "lo": lo,
        "hi": hi,
    });
    let all = scan.all_vanish();
    Ok(Outcome::ok(inputs, to_json(&scan), text).negative_if(!all, "a principal minor does not vanish"))
}

fn parse_point(csv: &str) -> CliResult<Vec<Scalar>> {
    csv.split(',')
        .map(|s| s.trim().parse::<Scalar>().map_err(|e| CliError::Usage(format!("--a: {e}"))))
        .collect()
}

pub fn lines(path: &Path, a: &str, lambda: &str) -> CliResult<Outcome> {
    let mf = read_map(path)?;
    let a = parse_point(a)?;
    let lambda: Scalar = lambda
        .parse()
        .map_err(|e: keller_core::Error| CliError::Usage(format!("--lambda: {e}")))?;
    let profile = HomogeneousProfile::infer(&mf.map)?;
    let d = build_d(&lambda, &profile.degrees)?;
    let check = line_injectivity_check(&mf.map, &profile, &a, &lambda)?;
    let mut inputs = map_inputs(path, &mf);
    inputs["a"] = to_json(&a);
    inputs["lambda"] = json!(lambda.to_string());
    let results = json!({
        "profile": profile.degrees,
        "d": to_json(&d.diagonal),
        "lhs": check.lhs,
        "rhs": check.rhs,
        "agree": check.lhs == check.rhs,
    });
    let text = vec![
        format!("F(a) = F(lambda a): {}", check.lhs),
        format!("(I + D JH(a)) a = 0: {}", check.rhs),
    ];
    Ok(Outcome::ok(inputs, results, text).negative_if(check.lhs != check.rhs, "the two sides disagree"))
}

pub fn casebook(filter: Option<&str>, seed: u64) -> CliResult<Outcome> {
    let suite = run_suite(filter, seed);
    if suite.scenarios.is_empty() {
        return Err(CliError::Usage(format!("no scenario matches `{}`", filter.unwrap_or(""))));
    }
    let mut text = Vec::new();
    for s in &suite.scenarios {
        text.push(format!("{} {}", if s.passed { "PASS" } else { "FAIL" }, s.name));
        for e in s.expectations.iter().filter(|e| !e.passed) {
            text.push(format!("  failed: {}", e.name));
        }
    }
    let inputs = json!({ "filter": filter, "seed": seed });
    let passed = suite.passed;
    Ok(Outcome::ok(inputs, to_json(&suite), text).negative_if(!passed, "some scenarios failed"))
}
