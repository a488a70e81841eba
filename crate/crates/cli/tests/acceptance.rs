//! One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

use embnum_core::kirby::{
    blow_down, blow_up, cf_to_fraction, chain_upper_bound, characteristic_sublinks,
    even_chain_presentation, linking_matrix, neg_cf,
};
use embnum_core::manifolds::{brieskorn_constraints, milnor_fiber, tange_lower, Brieskorn};
use embnum_core::obstruct::{
    closed_spin_ok, definite_lower_closed_form, feasible, min_embedding_lower, SplitConstraints,
};
use embnum_core::propagate::{
    build_ledger, propagate_in_order, rule_instances, seed_ledger, FactRegistry,
};
use embnum_core::splitcon::{q6, yn_u_form};
use embnum_core::{Mode, QuadraticForm, SpinFilling};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use serde_json::Value;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, Output};

type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn embnum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_embnum"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Result<Value, String> {
    let out = embnum(args);
    ensure!(out.status.success(), "{args:?} exited with {:?}", out.status.code());
    serde_json::from_slice(&out.stdout).map_err(|e| format!("{args:?}: bad JSON: {e}"))
}

fn record(args: &[&str]) -> Result<Value, String> {
    let v = json(args)?;
    v.get(0).cloned().ok_or_else(|| format!("{args:?}: no record"))
}

fn exact(rec: &Value) -> Option<u64> {
    (rec["exact"] == true).then(|| rec["lower"].as_u64()).flatten()
}

fn table_values(v: &Value) -> Vec<u64> {
    v["eps"]
        .as_array()
        .map(|a| a.iter().filter_map(Value::as_u64).collect())
        .unwrap_or_default()
}

/// Every registry derivation reachable from the table rows, as `(index, side)`.
fn registry_uses(v: &Value) -> Vec<(u64, String)> {
    let mut out = Vec::new();
    for row in v["rows"].as_array().into_iter().flatten() {
        for d in row["trace"].as_array().into_iter().flatten() {
            if d["rule"] == "registry" {
                out.push((d["index"].as_u64().unwrap_or(0), d["side"].to_string()));
            }
        }
    }
    out
}

fn odd_lens_n1_table() -> Check {
    let v = json(&["table", "figure1", "--format", "json", "--trace"])?;
    ensure!(table_values(&v) == [2, 4, 6, 8, 10, 10, 8, 6, 4], "values {:?}", table_values(&v));
    let uses = registry_uses(&v);
    ensure!(!uses.is_empty(), "no registry facts used");
    for (n, side) in &uses {
        ensure!((*n == 17 || *n == 19) && side.contains("upper"), "registry used at {n} {side}");
    }
    let csv = String::from_utf8_lossy(&embnum(&["table", "figure1", "--format", "csv"]).stdout).into_owned();
    ensure!(
        csv.lines().nth(1) == Some("2,4,6,8,10,10,8,6,4"),
        "csv eps row: {:?}",
        csv.lines().nth(1)
    );
    Ok(())
}

fn small_ln() -> Check {
    let v = json(&["table", "small-ln", "--format", "json", "--trace"])?;
    let expected: Vec<u64> = (1..=11).chain((4..=10).rev()).collect();
    ensure!(table_values(&v) == expected, "values {:?}", table_values(&v));
    for (n, side) in registry_uses(&v) {
        ensure!((n == 17 || n == 19) && side.contains("upper"), "registry used at {n} {side}");
    }
    Ok(())
}

fn mode_ok(b: i64, s: i64, mode: Mode) -> bool {
    closed_spin_ok(b as u64, s, mode).unwrap_or(false)
}

fn engine_vs_closed_form() -> Check {
    let mut equalities = 0;
    for mode in [Mode::Furuta10_8, Mode::Assume11_8] {
        for b0 in 1..=200u64 {
            let c = SplitConstraints::new(mode)
                .with_mu(-(b0 as i64))
                .with_filling(SpinFilling::negative_definite(b0));
            let engine = min_embedding_lower(&c).map_err(|e| e.to_string())?;
            let closed = definite_lower_closed_form(b0, mode).map_err(|e| e.to_string())?;
            ensure!(engine >= closed, "b0 {b0} {mode}: engine {engine} < closed {closed}");
            // some t ≡ 0 (mod 16) with |t - b0| <= c passes the inequality at rank b0 + c
            let (b, c) = (b0 as i64, closed as i64);
            let lo = (b - c).div_euclid(16) - 1;
            let hi = (b + c).div_euclid(16) + 1;
            let slack = (lo..=hi)
                .map(|k| 16 * k)
                .any(|t| (t - b).abs() <= c && mode_ok(b + c, t, mode));
            if slack {
                ensure!(engine == closed, "b0 {b0} {mode}: slack but engine {engine} > {closed}");
                equalities += 1;
            }
        }
    }
    ensure!(equalities > 0, "no slack case found");
    Ok(())
}

fn poincare() -> Check {
    let rec = record(&["brieskorn", "2", "3", "5", "--format", "json"])?;
    ensure!(exact(&rec) == Some(8), "record {rec}");
    let cites = rec["citations"].to_string();
    ensure!(cites.contains("splitting search"), "lower not from the search: {cites}");
    let b = Brieskorn::new(2, 3, 5).map_err(|e| e.to_string())?;
    let c = brieskorn_constraints(&b, Mode::Furuta10_8, false);
    ensure!(c.zhs, "constraints not zhs");
    ensure!(min_embedding_lower(&c).ok() == Some(8), "search did not give 8");
    ensure!(feasible(7, &c).ok() == Some(None), "m = 7 feasible");
    Ok(())
}

fn trefoil_family() -> Check {
    for n in [1, 3, 5] {
        let r = (6 * n + 1).to_string();
        let rec = record(&["brieskorn", "2", "3", &r, "--d-zero", "--trace", "--format", "json"])?;
        ensure!(exact(&rec) == Some(10), "n = {n}: {rec}");
        let trace: Vec<String> = rec["trace"]
            .as_array()
            .into_iter()
            .flatten()
            .filter_map(|l| l.as_str().map(String::from))
            .collect();
        for m in [8, 9] {
            let head = format!("m = {m}: infeasible");
            let start = trace.iter().position(|l| l.starts_with(&head));
            ensure!(start.is_some(), "n = {n}: no '{head}'");
            let body: Vec<&String> = trace[start.unwrap() + 1..]
                .iter()
                .take_while(|l| l.starts_with("  "))
                .collect();
            ensure!(body.iter().all(|l| l.contains("rejected")), "n = {n}, m = {m}: accepted candidate");
            let e8 = body.iter().any(|l| l.contains("Q_U = E8") && l.contains("Q_V = -E8"));
            ensure!(e8, "n = {n}, m = {m}: no ±E8 analysis");
            if m == 9 {
                let h = body.iter().any(|l| l.contains("-E8 ⊕ H")) && body.iter().any(|l| l.contains("Q_U = E8 ⊕ H"));
                ensure!(h, "n = {n}: no ∓E8 ⊕ H analysis");
            }
        }
        ensure!(trace.iter().any(|l| l.starts_with("m = 10: feasible")), "n = {n}: m = 10 not feasible");
    }
    Ok(())
}

fn milnor_fibers() -> Check {
    for ((p, q, r), (b2, sigma)) in [((2, 3, 5), (8, -8)), ((2, 3, 7), (12, -8)), ((2, 3, 11), (20, -16))] {
        let f = milnor_fiber(&Brieskorn::new(p, q, r).map_err(|e| e.to_string())?);
        ensure!((f.b2, f.sigma) == (b2, sigma), "({p},{q},{r}) gave ({}, {})", f.b2, f.sigma);
    }
    Ok(())
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

fn chain_bounds() -> Check {
    for p in 2..=100i64 {
        for q in (1..p).filter(|&q| gcd(p, q) == 1) {
            let b = chain_upper_bound(p, q).map_err(|e| e.to_string())?;
            ensure!(b.value() <= (p - 1) as u64, "{p}/{q}: {}", b.value());
            let cf = neg_cf(p, q).map_err(|e| e.to_string())?;
            for x in characteristic_sublinks(&linking_matrix(&cf)) {
                let m = even_chain_presentation(p, q, &x).map_err(|e| e.to_string())?;
                ensure!(m.determinant().magnitude().to_string() == p.to_string(), "{p}/{q}: det {}", m.determinant());
            }
        }
    }
    Ok(())
}

fn split_construction() -> Check {
    ensure!(q6().determinant().to_string() == "7", "det q6 = {}", q6().determinant());
    for n in 1..=4usize {
        let u = yn_u_form(n);
        ensure!(u.rank() == 38 * n, "rank U_{n} = {}", u.rank());
        ensure!(u.signature() == -38 * n as i64, "sigma U_{n} = {}", u.signature());
        let det = u.determinant().magnitude().to_string();
        ensure!(det == 7u64.pow(n as u32).to_string(), "|det U_{n}| = {det}");
        let rec = record(&["split", "yn", &n.to_string(), "--assume-11-8", "--format", "json"])?;
        ensure!(exact(&rec) == Some(6 * n as u64), "Y_{n}: {rec}");
    }
    let rec = record(&["split", "zn", "1", "--assume-11-8", "--format", "json"])?;
    ensure!(exact(&rec) == Some(24), "Z_1: {rec}");
    Ok(())
}

fn tange() -> Check {
    let mut prev = 0;
    for n in 1..=1000u64 {
        let v = tange_lower(n, Mode::Furuta10_8).map_err(|e| e.to_string())?.lower_value();
        ensure!(v == (8 * n + 8).div_ceil(9), "n = {n}: {v}");
        ensure!(v >= prev, "not monotone at {n}");
        prev = v;
    }
    ensure!(prev >= 889, "bounded: {prev}");
    let at = |n| tange_lower(n, Mode::Furuta10_8).map(|b| b.lower_value()).ok();
    ensure!(at(1) == Some(2) && at(10) == Some(10), "spot values {:?} {:?}", at(1), at(10));
    Ok(())
}

fn random_form(rng: &mut StdRng, n: usize) -> Result<QuadraticForm, String> {
    let mut rows = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in i..n {
            rows[i][j] = rng.gen_range(-4..=4);
            rows[j][i] = rows[i][j];
        }
    }
    QuadraticForm::from_rows(rows).map_err(|e| e.to_string())
}

fn property_suites() -> Check {
    for p in 2..=500i64 {
        for q in (1..p).filter(|&q| gcd(p, q) == 1) {
            let cf = neg_cf(p, q).map_err(|e| e.to_string())?;
            ensure!(cf_to_fraction(&cf) == (p, q), "cf round trip {p}/{q}");
        }
    }

    let mut rng = StdRng::seed_from_u64(2024);
    for _ in 0..1000 {
        let n = rng.gen_range(0..7);
        let q = random_form(&mut rng, n)?;
        let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
        let link: Vec<i64> = (0..n).map(|_| rng.gen_range(-3..=3)).collect();
        let up = blow_up(&q, sign, &link).map_err(|e| e.to_string())?;
        ensure!(up.determinant() == q.determinant() * sign, "blow-up det");
        ensure!(up.signature() == q.signature() + sign, "blow-up signature");
        let down = blow_down(&up, n).map_err(|e| e.to_string())?;
        ensure!(down == q, "blow-down does not invert blow-up");
    }

    for mode in [Mode::Furuta10_8, Mode::Assume11_8, Mode::RokhlinOnly] {
        for b0 in 0..=60u64 {
            let c = SplitConstraints::new(mode)
                .with_mu(-(b0 as i64))
                .with_filling(SpinFilling::negative_definite(b0));
            let start = min_embedding_lower(&c).map_err(|e| e.to_string())?;
            for m in 0..start + 10 {
                let f = feasible(m, &c).map_err(|e| e.to_string())?.is_some();
                ensure!(f == (m >= start), "b0 {b0} {mode}: feasibility at {m} is {f}");
            }
        }
    }

    let registry = FactRegistry::bundled();
    let reference = build_ledger(40, Mode::Furuta10_8, &registry).map_err(|e| e.to_string())?;
    for _ in 0..10 {
        let mut order = rule_instances(40);
        order.shuffle(&mut rng);
        let seeded = seed_ledger(40, Mode::Furuta10_8, &registry).map_err(|e| e.to_string())?;
        let l = propagate_in_order(seeded, &order).map_err(|e| e.to_string())?;
        for n in 2..=40 {
            ensure!(
                (l.lower(n), l.upper(n)) == (reference.lower(n), reference.upper(n)),
                "shuffled order changed L_{n}"
            );
        }
    }

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("poisoned.json");
    let mut facts: Value = serde_json::from_str(&registry.to_json()).map_err(|e| e.to_string())?;
    facts.as_array_mut().ok_or("registry not an array")?.push(serde_json::json!({
        "index": 12, "direction": "upper", "value": 9,
        "assumption": "PaperConstruction", "citation": "deliberately inconsistent"
    }));
    std::fs::write(&path, facts.to_string()).map_err(|e| e.to_string())?;
    let out = embnum(&["table", "small-ln", "--facts", path.to_str().ok_or("path")?]);
    ensure!(out.status.code() == Some(3), "poisoned registry exit {:?}", out.status.code());
    let err = String::from_utf8_lossy(&out.stderr);
    ensure!(err.contains("12"), "contradiction does not name L_12: {err}");
    Ok(())
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("L(n,1) table for odd n = 3..19", odd_lens_n1_table),
        ("L_n table for n = 2..19", small_ln),
        ("splitting search vs closed-form definite bounds", engine_vs_closed_form),
        ("Poincaré sphere exact 8 from the search", poincare),
        ("Σ(2,3,6n+1), n = 1, 3, 5 with d = 0: exact 10 and traced m = 8, 9", trefoil_family),
        ("Milnor fiber invariants", milnor_fibers),
        ("chain bound <= p - 1 and |det| = p for p <= 100", chain_bounds),
        ("definite splitting constructions Y_n, Z_1", split_construction),
        ("Tange families: monotone unbounded lower bound", tange),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match result {
            Ok(()) => println!("PASS {:>2}: {name}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2}: {name}: {why}", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
