//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::collections::BTreeSet;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;
use wsec_core::oracle::Enumeration;
use wsec_core::{
    equivalence_check, leakage, mi_oracle, CosetCode, FElem, FMatrix, FieldTower, Mode, OuterParams, Quantifier,
    StorageCode, StorageCodeSpec, Verifier,
};

type Outcome = Result<String, String>;

const CONSTRUCT1_SPECS: [(usize, usize, usize, usize, u64); 4] =
    [(4, 2, 3, 2, 5), (5, 2, 3, 2, 7), (5, 3, 4, 2, 11), (6, 3, 4, 3, 13)];
const CONSTRUCT2_SPECS: [(usize, usize, usize, usize, u64); 2] = [(4, 2, 3, 2, 5), (5, 3, 4, 2, 11)];
const RANDOM_CASES: usize = 1000;
const ORACLE_INSTANCES: usize = 60;

macro_rules! check {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn all_specs() -> Vec<(usize, usize, usize, usize, u64)> {
    let set: BTreeSet<_> = CONSTRUCT1_SPECS.iter().chain(&CONSTRUCT2_SPECS).copied().collect();
    set.into_iter().collect()
}

fn outer(spec: (usize, usize, usize, usize, u64)) -> OuterParams {
    OuterParams::new(spec.0, spec.1, spec.2, spec.3, spec.4)
}

fn inner(spec: (usize, usize, usize, usize, u64)) -> Result<StorageCode, String> {
    let s = StorageCodeSpec::new(spec.0, spec.1, spec.2, spec.3, 1, spec.4).map_err(|e| e.to_string())?;
    StorageCode::make_striped_mds(s).map_err(|e| e.to_string())
}

fn e<T: std::fmt::Display>(x: T) -> String {
    x.to_string()
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..1 << n).map(move |mask| (0..n).filter(|i| mask >> i & 1 == 1).collect())
}

fn gf5_rows(rows: &[&[u16]]) -> FMatrix {
    let t = Arc::new(FieldTower::new(5, &[]).unwrap());
    let v: Vec<Vec<FElem>> = rows.iter().map(|r| r.iter().map(|&x| FElem::scalar(x)).collect()).collect();
    FMatrix::from_rows(t, &v).unwrap()
}

fn criterion1() -> Outcome {
    let gprime = gf5_rows(&[&[1, 1, 1, 1], &[1, 2, 3, 4]]);
    let h = FMatrix::identity(Arc::clone(gprime.tower()), 4);
    let table = Enumeration::new(&h, &gprime, 625).map_err(e)?;
    let (mut zero, mut one) = (0, 0);
    for group in subsets(4) {
        let rank_value = leakage(&h.take_rows(&group).map_err(e)?, &gprime).map_err(e)?;
        let exact = table.mutual_information(&group).map_err(e)?;
        check!(exact.is_integer() && exact.to_integer() == rank_value as i128, "group {group:?}: oracle {exact}, rank {rank_value}");
        match group.len() {
            1 | 2 => {
                check!(rank_value == 0, "group {group:?} leaks {rank_value}");
                zero += 1;
            }
            3 => {
                check!(rank_value == 1, "group {group:?} leaks {rank_value}, expected 1");
                one += 1;
            }
            _ => {}
        }
    }
    check!(zero == 10 && one == 4, "counted {zero} zero groups and {one} size-3 groups");
    Ok(format!("{zero} groups of size <= 2 leak 0, {one} groups of size 3 leak 1, oracle agrees on all 16 subsets"))
}

fn criterion2() -> Outcome {
    let mut total = 0u128;
    for spec in CONSTRUCT1_SPECS {
        let code = CosetCode::construct1(outer(spec)).map_err(e)?;
        check!(code.h().invert().is_ok(), "{spec:?}: H is singular");
        let inner = inner(spec)?;
        let v = Verifier::new(&code, &inner).map_err(e)?;
        let l = spec.1 - 1;
        let report = v.check(l, 1, Mode::Exhaustive, Quantifier::Maximal).map_err(e)?;
        check!(report.secure, "{spec:?}: insecure, witness {:?}", report.witness);
        let slow = v.check(l, 1, Mode::Exhaustive, Quantifier::AllSizes).map_err(e)?;
        check!(slow.secure, "{spec:?}: all-sizes quantifier disagrees");
        total += report.checked;
    }
    Ok(format!("4 specs certified at l = k-1, g = 1; {total} (L, G) pairs, 0 failing; H invertible"))
}

fn criterion3() -> Outcome {
    let mut lines = Vec::new();
    for spec in CONSTRUCT2_SPECS {
        let code = CosetCode::construct2(outer(spec)).map_err(e)?;
        let inner = inner(spec)?;
        let v = Verifier::new(&code, &inner).map_err(e)?;
        let (b, alpha) = (code.b(), spec.3);
        let got = v.max_g(1).map_err(e)?;
        check!(got == b - alpha, "{spec:?}: max_g(1) = {got}, expected {}", b - alpha);
        for l in 1..spec.1 {
            let ceiling = b - l * alpha;
            check!(v.ceiling(l).map_err(e)? == ceiling, "{spec:?}: wrong ceiling at l = {l}");
            for r in v.g_sweep(l).map_err(e)? {
                check!(r.g_tested <= ceiling && r.max_g <= ceiling, "{spec:?}: sweep passed the ceiling at l = {l}");
            }
            check!(v.check(l, ceiling + 1, Mode::Exhaustive, Quantifier::Maximal).is_err(), "{spec:?}: g above the ceiling accepted");
        }
        lines.push(format!("{spec:?} max_g = {got}"));
    }
    Ok(lines.join(", "))
}

fn gen_files(dir: &std::path::Path, construction: &str, spec: (usize, usize, usize, usize, u64)) -> Result<(String, String), String> {
    let (n, k, d, a, q) = (spec.0.to_string(), spec.1.to_string(), spec.2.to_string(), spec.3.to_string(), spec.4.to_string());
    let params = ["--n", &n, "--k", &k, "--d", &d, "--alpha", &a, "--q", &q];
    let outer = dir.join(format!("outer_{construction}.txt")).to_str().unwrap().to_string();
    let inner = dir.join("inner.txt").to_str().unwrap().to_string();
    for args in [
        [&["gen-outer", "--construction", construction, "-o", &outer][..], &params[..]].concat(),
        [&["gen-inner", "--beta", "1", "-o", &inner][..], &params[..]].concat(),
    ] {
        let status = Command::new(env!("CARGO_BIN_EXE_wsec")).args(&args).status().map_err(e)?;
        check!(status.success(), "{args:?} failed");
    }
    Ok((outer, inner))
}

fn criterion4() -> Outcome {
    let dir = TempDir::new().map_err(e)?;
    for spec in all_specs() {
        let code = CosetCode::identity(outer(spec)).map_err(e)?;
        let inner = inner(spec)?;
        let report = Verifier::new(&code, &inner)
            .and_then(|v| v.check(1, 1, Mode::Exhaustive, Quantifier::Maximal))
            .map_err(e)?;
        let (nodes, group) = report.witness.clone().ok_or(format!("{spec:?}: no witness"))?;
        check!(!report.secure && report.max_g == 0, "{spec:?}: identity not flagged");
        check!(
            nodes.len() == 1 && nodes[0] < spec.1 && group.len() == 1 && group[0] / spec.3 == nodes[0],
            "{spec:?}: witness L={nodes:?} G={group:?} is not a systematic node exposing its own file"
        );
        let sub = dir.path().join(format!("{}_{}_{}_{}_{}", spec.0, spec.1, spec.2, spec.3, spec.4));
        fs::create_dir_all(&sub).map_err(e)?;
        let (o, i) = gen_files(&sub, "identity", spec)?;
        let out = Command::new(env!("CARGO_BIN_EXE_wsec"))
            .args(["verify", "--outer", &o, "--inner", &i, "--l", "1", "--g", "1"])
            .output()
            .map_err(e)?;
        check!(out.status.code() == Some(2), "{spec:?}: CLI exit {:?}", out.status.code());
        check!(String::from_utf8_lossy(&out.stdout).contains("WITNESS L="), "{spec:?}: CLI printed no witness");
    }
    Ok(format!("{} specs insecure at (1, 1) with systematic witnesses; CLI exit 2", all_specs().len()))
}

fn tiny_towers() -> Vec<Arc<FieldTower>> {
    [(2, vec![]), (3, vec![]), (2, vec![2]), (5, vec![]), (7, vec![])]
        .into_iter()
        .map(|(p, d)| Arc::new(FieldTower::new(p, &d).unwrap()))
        .collect()
}

fn full_row_rank(t: &Arc<FieldTower>, rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> FMatrix {
    loop {
        let m = FMatrix::random(Arc::clone(t), rows, cols, rng);
        if m.rank() == rows {
            return m;
        }
    }
}

/// Returns the inner codes it built, for the structural criterion.
fn criterion5(inners: &mut Vec<StorageCode>) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let towers = tiny_towers();
    let (mut groups, mut zero_groups, mut from_codes) = (0, 0, 0);
    for instance in 0..ORACLE_INSTANCES {
        let t = &towers[instance % towers.len()];
        let size = t.size();
        // Even instances eavesdrop on a real striped MDS code when the field allows one.
        let (b, gprime) = if instance % 2 == 0 && size >= 4 {
            let (n, k, alpha) = if size > 4 { (4, 2, 2) } else { (3, 2, rng.random_range(1..=2)) };
            let spec = StorageCodeSpec::new(n, k, k, alpha, 1, size).map_err(e)?;
            let code = StorageCode::make_striped_mds(spec).map_err(e)?;
            let l = rng.random_range(1..k);
            let nodes = sample(&mut rng, n, l).into_vec();
            let gprime = code.eavesdrop(&nodes).map_err(e)?.gprime;
            inners.push(code);
            from_codes += 1;
            (k * alpha, gprime)
        } else {
            let b = rng.random_range(1..=4);
            let mu = rng.random_range(0..=b);
            (b, FMatrix::random(Arc::clone(t), mu, b, &mut rng))
        };
        let bs = rng.random_range(1..=b);
        let code = CosetCode::custom(full_row_rank(t, bs, b, &mut rng), OuterParams::new(b.max(2), 2, 2, 1, size))
            .map_err(|err| format!("instance {instance}: custom code rejected: {err}"))?;
        let h = code.h();
        let table = Enumeration::new(h, &gprime, 1 << 20).map_err(e)?;
        for group in subsets(bs) {
            let rank_value = leakage(&h.take_rows(&group).map_err(e)?, &gprime).map_err(e)?;
            let exact = table.mutual_information(&group).map_err(e)?;
            check!(
                exact.is_integer() && exact.to_integer() == rank_value as i128,
                "instance {instance} over GF({size}), group {group:?}: oracle {exact}, rank {rank_value}"
            );
            if rank_value == 0 {
                let eq = equivalence_check(h, &gprime, &group, 1 << 20).map_err(e)?;
                check!(eq.unconditional && eq.conditional, "instance {instance}, group {group:?}: {eq:?}");
                zero_groups += 1;
            }
            groups += 1;
        }
        check!(mi_oracle(h, &gprime, &[], 1 << 20).map_err(e)? == 0.into(), "instance {instance}: empty group leaks");
    }
    Ok(format!(
        "{ORACLE_INSTANCES} instances ({from_codes} from striped MDS views), {groups} groups agree exactly, {zero_groups} zero-leakage equivalence checks pass"
    ))
}

fn test_towers() -> Vec<Arc<FieldTower>> {
    [(2, vec![]), (2, vec![2]), (2, vec![3]), (2, vec![2, 3]), (3, vec![2]), (5, vec![3]), (7, vec![]), (13, vec![2]), (5, vec![2, 3])]
        .into_iter()
        .map(|(p, d)| Arc::new(FieldTower::new(p, &d).unwrap()))
        .collect()
}

fn distinct(t: &FieldTower, count: usize, rng: &mut ChaCha8Rng) -> Vec<FElem> {
    sample(rng, t.size() as usize, count).into_iter().map(|i| t.elem(i as u64)).collect()
}

fn criterion6(inners: &[StorageCode]) -> Outcome {
    let mut structure = 0;
    for code in inners {
        let r = code.verify_structure();
        check!(r.passed(), "inner code {:?} fails: {r:?}", code.spec());
        structure += 1;
    }
    let towers = test_towers();
    let primitive: Vec<FElem> = towers.iter().map(|t| t.find_primitive()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for case in 0..RANDOM_CASES {
        let t = &towers[rng.random_range(0..towers.len())];
        let (a, b, c) = (t.random(&mut rng), t.random(&mut rng), t.random(&mut rng));
        let ok = t.add(&t.add(&a, &b), &c) == t.add(&a, &t.add(&b, &c))
            && t.mul(&t.mul(&a, &b), &c) == t.mul(&a, &t.mul(&b, &c))
            && t.add(&a, &b) == t.add(&b, &a)
            && t.mul(&a, &b) == t.mul(&b, &a)
            && t.mul(&a, &t.add(&b, &c)) == t.add(&t.mul(&a, &b), &t.mul(&a, &c))
            && t.add(&a, &t.neg(&a)) == t.zero()
            && t.mul(&a, &t.one()) == a
            && t.add(&a, &t.zero()) == a
            && (a.is_zero() || t.mul(&a, &t.inv(&a).unwrap()) == t.one());
        check!(ok, "field axioms fail in GF({}) at case {case}: {a:?} {b:?} {c:?}", t.size());
    }
    for case in 0..RANDOM_CASES {
        let t = &towers[rng.random_range(0..towers.len())];
        let (a, b) = (t.random(&mut rng), t.random(&mut rng));
        let p = t.p();
        let ok = t.pow(&t.add(&a, &b), p) == t.add(&t.pow(&a, p), &t.pow(&b, p))
            && t.pow(&t.mul(&a, &b), p) == t.mul(&t.pow(&a, p), &t.pow(&b, p))
            && t.pow(&a, t.size()) == a;
        check!(ok, "Frobenius fails in GF({}) at case {case}", t.size());
    }
    for case in 0..RANDOM_CASES {
        let which = rng.random_range(0..towers.len());
        let (t, w) = (&towers[which], &primitive[which]);
        let n = t.size() - 1;
        let i = rng.random_range(1..n.max(2));
        let x = t.random_nonzero(&mut rng);
        let ord = t.order(&x).map_err(e)?;
        let ok = t.pow(w, n) == t.one()
            && (n == 1 || t.pow(w, i) != t.one())
            && n % ord == 0
            && t.pow(&x, ord) == t.one();
        check!(ok, "primitive order fails in GF({}) at case {case}", t.size());
    }
    for case in 0..RANDOM_CASES {
        let t = &towers[rng.random_range(0..towers.len())];
        let room = (t.size() as usize).min(14);
        if room < 2 {
            continue;
        }
        let rows = rng.random_range(1..=room / 2);
        let cols = rng.random_range(1..=room - rows);
        let points = distinct(t, rows + cols, &mut rng);
        let m = FMatrix::cauchy(Arc::clone(t), &points[..rows], &points[rows..]).map_err(e)?;
        let s = rng.random_range(1..=rows.min(cols));
        let sub = m
            .take_rows(&sample(&mut rng, rows, s).into_vec())
            .and_then(|r| r.take_cols(&sample(&mut rng, cols, s).into_vec()))
            .map_err(e)?;
        check!(sub.rank() == s, "singular {s}x{s} Cauchy submatrix over GF({}) at case {case}", t.size());
    }
    for case in 0..RANDOM_CASES {
        let t = &towers[rng.random_range(0..towers.len())];
        let s = rng.random_range(1..=(t.size() as usize).min(8));
        let betas = distinct(t, s, &mut rng);
        let v = FMatrix::vandermonde(Arc::clone(t), &betas, s).map_err(e)?;
        check!(v.invert().is_ok(), "singular Vandermonde over GF({}) at case {case}", t.size());
    }
    Ok(format!(
        "{structure} inner codes pass verify_structure; {RANDOM_CASES} cases each of axioms, Frobenius, primitive order, Cauchy submatrices, Vandermonde"
    ))
}

fn criterion7() -> Outcome {
    let (a, b) = (TempDir::new().map_err(e)?, TempDir::new().map_err(e)?);
    let mut files = 0;
    for spec in all_specs() {
        for construction in ["1", "2", "identity"] {
            let (oa, ia) = gen_files(a.path(), construction, spec)?;
            let (ob, ib) = gen_files(b.path(), construction, spec)?;
            for (x, y) in [(oa, ob), (ia, ib)] {
                check!(fs::read(&x).map_err(e)? == fs::read(&y).map_err(e)?, "{spec:?} construction {construction}: {x} differs");
                files += 1;
            }
        }
    }
    Ok(format!("{files} generated file pairs byte-identical"))
}

fn run(id: u32, name: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
    let took = start.elapsed();
    let outcome = match (outcome, limit) {
        (Ok(_), Some(l)) if took > l => Err(format!("took {took:.2?}, limit {l:?}")),
        (o, _) => o,
    };
    let (tag, detail) = match &outcome {
        Ok(d) => ("PASS", d),
        Err(d) => ("FAIL", d),
    };
    println!("{tag} [{id}] {name}: {detail} ({took:.2?})");
    outcome.is_ok()
}

fn main() -> ExitCode {
    let mut inners: Vec<StorageCode> = Vec::new();
    for spec in all_specs() {
        inners.push(inner(spec).expect("striped MDS code"));
    }
    let results = [
        run(1, "intro example over GF(5)", Some(Duration::from_secs(1)), criterion1),
        run(2, "construct1 certified at l = k-1", Some(Duration::from_secs(30)), criterion2),
        run(3, "construct2 reaches B - alpha", Some(Duration::from_secs(60)), criterion3),
        run(4, "identity negative control", None, criterion4),
        run(5, "rank leakage matches exact enumeration", None, || criterion5(&mut inners)),
        run(6, "structural and algebraic properties", None, || criterion6(&inners)),
        run(7, "deterministic gen-* output", None, criterion7),
    ];
    let passed = results.iter().filter(|&&ok| ok).count();
    println!("{passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
