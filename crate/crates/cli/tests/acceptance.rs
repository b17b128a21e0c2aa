//! Acceptance checks; prints one PASS/FAIL line per criterion and exits
//! nonzero when any fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use fermat_pr_cli::sweep::{read_store, run_sweep, SweepSpec};
use fermat_pr_core::padic::padic_coloring;
use fermat_pr_core::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn eq(text: &str) -> Equation {
    parse_equation(text).unwrap_or_else(|e| panic!("{text}: {e}"))
}

const FIXTURE_LIMIT: Duration = Duration::from_secs(1);

fn fixture(text: &str, verdict: Verdict, rules: &[Rule], prime: Option<(Rule, u64)>) -> Check {
    let started = Instant::now();
    let cert = classify(&eq(text), DEFAULT_P_MAX).map_err(|e| format!("{text}: {e}"))?;
    let elapsed = started.elapsed();
    ensure(elapsed < FIXTURE_LIMIT, || format!("{text}: took {elapsed:?}"))?;
    ensure(cert.verdict == verdict, || format!("{text}: verdict {} != {verdict}", cert.verdict))?;
    for rule in rules {
        ensure(cert.has_rule(*rule), || format!("{text}: missing {rule}, got {:?}", cert.rules()))?;
    }
    if let Some((rule, p)) = prime {
        let got = cert.justification(rule).and_then(|j| j.witness_prime);
        ensure(got == Some(p), || format!("{text}: {rule} prime {got:?} != {p}"))?;
    }
    Ok(())
}

fn criterion_fixtures() -> Check {
    use Rule::*;
    use Verdict::*;
    fixture("x^3 - y^2 + 2z = 0", NotPR, &[T1], Some((T1, 3)))?;
    for c in [3, 9] {
        fixture(&format!("x + y = {c}z^2"), NotPR, &[Cor1i], None)?;
    }
    for n in [2, 3] {
        fixture(&format!("x^{n} + y^{n} = 3z"), NotPR, &[Cor1ii], Some((Cor1ii, 2)))?;
    }
    fixture("x + y = z^2", NotPR, &[T3, Cor2], None)?;
    fixture("x + y^2 = z^3", NotPR, &[T4], None)?;
    fixture("x^2 + y^3 = z^4", NotPR, &[Cor3], None)?;
    fixture("x + y = z^3", NotPR, &[Cor3], None)?;
    fixture("x^2 + y^2 = z^2", Unknown, &[], None)?;
    fixture("x + y^2 = z^2", Unknown, &[], None)?;
    fixture("x - y = z^3", KnownPR, &[], None)
}

fn criterion_constant_solutions() -> Check {
    for n in 1..=4u32 {
        for k in 1..=8u32 {
            let e = eq(&format!("x^{n} + y^{n} = z^{k}"));
            let brute: Vec<u128> = (1..=1000u64)
                .filter(|&a| evaluate(&e, &SolutionTuple::from_values(&e, &[a, a, a])).unwrap() == 0)
                .map(u128::from)
                .collect();
            let expected = if k == n + 1 { vec![2] } else { vec![] };
            ensure(brute == expected, || format!("n={n} k={k}: brute force {brute:?}"))?;
            let listed = constant_solutions(&e);
            ensure(listed == ConstantSolutions::List(expected.clone()), || format!("n={n} k={k}: listed {listed:?}"))?;
        }
    }
    Ok(())
}

/// Whether some raw 2-coloring of `[1..n]` avoids every constraint.
fn raw_two_colorable(cs: &ConstraintSet) -> bool {
    let n = cs.max_value();
    (0u64..1 << n).any(|mask| {
        let color = |v: u32| mask >> (v - 1) & 1;
        cs.sets().iter().all(|s| s.iter().any(|&v| color(v) != color(s[0])))
    })
}

fn criterion_schur() -> Check {
    let schur = eq("x + y = z");
    let started = Instant::now();
    let two = rado_threshold(&schur, 2, 40, Budget::UNLIMITED).map_err(|e| e.to_string())?;
    let t2 = started.elapsed();
    ensure(two == Threshold::Found { n: 5 }, || format!("r=2 threshold {two:?}"))?;
    ensure(t2 < Duration::from_secs(1), || format!("r=2 took {t2:?}"))?;

    let started = Instant::now();
    let three = rado_threshold(&schur, 3, 40, Budget::UNLIMITED).map_err(|e| e.to_string())?;
    let t3 = started.elapsed();
    ensure(three == Threshold::Found { n: 14 }, || format!("r=3 threshold {three:?}"))?;
    ensure(t3 < Duration::from_secs(300), || format!("r=3 took {t3:?}"))?;

    let all = build_constraints(&schur, 12, &EnumOptions::new(12)).map_err(|e| e.to_string())?;
    let raw = (1..=12).find(|&n| !raw_two_colorable(&all.restrict(n)));
    ensure(raw == Some(5), || format!("raw 2^N enumeration gives {raw:?}"))
}

fn naive_solutions(e: &Equation, n: u64) -> Vec<Vec<u64>> {
    let terms: Vec<(i128, u32)> = e.terms().map(|t| (t.coefficient, t.exponent)).collect();
    let k = terms.len();
    let mut out = Vec::new();
    let mut values = vec![1u64; k];
    loop {
        let value: i128 = terms.iter().zip(&values).map(|(&(c, p), &x)| c * (x as i128).pow(p)).sum();
        if value == 0 && !values.iter().all(|&x| x == values[0]) {
            out.push(values.clone());
        }
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if values[i] < n {
                values[i] += 1;
                break;
            }
            values[i] = 1;
        }
    }
}

fn criterion_enumeration() -> Check {
    let mut rng = StdRng::seed_from_u64(4);
    let names = ["x", "y", "z", "w"];
    for _ in 0..20 {
        let arity = rng.gen_range(2..=4);
        let terms: Vec<Term> = (0..arity)
            .map(|i| {
                let c = rng.gen_range(1..=3) * if rng.gen_bool(0.5) { -1 } else { 1 };
                Term::new(c, names[i], rng.gen_range(1..=3)).unwrap()
            })
            .collect();
        let e = canonicalize(&terms, &[]).unwrap();
        let n = rng.gen_range(1..=40);
        let fast = enumerate_values(&e, &EnumOptions::new(n)).map_err(|err| err.to_string())?;
        ensure(fast == naive_solutions(&e, n), || format!("{} at N={n}", format_equation(&e)))?;
    }
    let pythagoras = enumerate_solutions(&eq("x^2 + y^2 = z^2"), &EnumOptions::new(13)).unwrap();
    ensure(pythagoras.len() == 6, || format!("x^2 + y^2 = z^2 at N=13 gave {}", pythagoras.len()))
}

fn subset_sums(coefficients: &[i128]) -> Vec<i128> {
    let mut sums = Vec::new();
    for mask in 1u32..1 << coefficients.len() {
        sums.push((0..coefficients.len()).filter(|i| mask >> i & 1 == 1).map(|i| coefficients[i]).sum());
    }
    sums
}

fn criterion_consistency() -> Check {
    let mut rng = StdRng::seed_from_u64(5);
    let names = ["x", "y", "z", "w", "u"];
    for _ in 0..500 {
        let k = rng.gen_range(3..=5);
        let coefficients: Vec<i128> =
            (0..k).map(|_| rng.gen_range(1..=5) * if rng.gen_bool(0.5) { -1 } else { 1 }).collect();
        let terms: Vec<Term> = coefficients.iter().zip(names).map(|(&c, v)| Term::new(c, v, 1).unwrap()).collect();
        let e = canonicalize(&terms, &[]).unwrap();
        let cert = classify(&e, DEFAULT_P_MAX).map_err(|err| err.to_string())?;
        let rado = cert.verdict == Verdict::PRByRado;
        let zero = subset_sums(&coefficients).contains(&0);
        ensure(rado == zero, || format!("{}: verdict {} but zero subset {zero}", format_equation(&e), cert.verdict))?;
        let not_pr = cert.rules().iter().any(|r| r.proves_not_pr());
        ensure(!(rado && not_pr), || format!("{}: both Rado and {:?}", format_equation(&e), cert.rules()))?;
    }
    let not_pr_fixtures = [
        "x^3 - y^2 + 2z = 0",
        "x + y = 3z^2",
        "x + y = 9z^2",
        "x^2 + y^2 = 3z",
        "x^3 + y^3 = 3z",
        "x + y = z^2",
        "x + y^2 = z^3",
        "x^2 + y^3 = z^4",
        "x + y = z^3",
    ];
    let budget = Budget { max_nodes: Some(50_000_000), max_time: Some(Duration::from_secs(60)) };
    for text in not_pr_fixtures {
        let e = eq(text);
        let verdict = classify(&e, DEFAULT_P_MAX).unwrap().verdict;
        ensure(verdict == Verdict::NotPR, || format!("{text}: verdict {verdict}"))?;
        let result = search_coloring(&e, 4, 200, budget).map_err(|err| err.to_string())?;
        ensure(result.status == SearchStatus::Satisfiable, || format!("{text}: r=4 N=200 {:?}", result.status))?;
        let constraints = build_constraints(&e, 200, &EnumOptions::new(200)).unwrap();
        let witness = result.witness.unwrap();
        ensure(verify_coloring(&witness, &constraints).unwrap().valid, || format!("{text}: invalid witness"))?;
    }
    Ok(())
}

fn criterion_padic() -> Check {
    for p in [2u64, 3, 5, 7] {
        for n in 1..=100_000u64 {
            let d = p_adic_decompose(n, p);
            ensure(d.reconstruct(p) == n, || format!("p={p} n={n}: {d:?}"))?;
            if let Some(zeta) = d.zeta {
                ensure(zeta % p != 0, || format!("p={p} n={n}: p divides zeta"))?;
            }
        }
    }
    for p in [2u64, 3, 5, 7] {
        for m in 1..=4 {
            for dd in 0..=2 {
                let params = PAdicParams::new(p, m, dd).unwrap();
                let colors: BTreeSet<u32> = (1..=5000).map(|n| padic_color(n, &params)).collect();
                let bound = p as u32 * m * (p as u32).pow(dd) + p as u32;
                ensure(colors.len() as u32 <= bound && colors.iter().all(|&c| c >= 1 && c <= bound), || {
                    format!("({p},{m},{dd}): {} colors, bound {bound}", colors.len())
                })?;
            }
        }
    }
    let mut rng = StdRng::seed_from_u64(6);
    let pool = ["x + y = z", "x + y = z^2", "x + y = 3z^2", "x^2 + y^2 = 3z", "x + y^2 = z^3", "x^3 - y^2 + 2z = 0"];
    for _ in 0..10 {
        let e = eq(pool[rng.gen_range(0..pool.len())]);
        let params =
            PAdicParams::new([2, 3, 5, 7][rng.gen_range(0..4)], rng.gen_range(1..=4), rng.gen_range(0..=2)).unwrap();
        let n = rng.gen_range(1..=500);
        let colors: Vec<u32> = (1..=n as u64).map(|v| padic_color(v, &params)).collect();
        let coloring = Coloring::new(params.color_bound(), colors).unwrap();
        ensure(coloring == padic_coloring(&params, n), || "materialized coloring differs".into())?;
        let constraints = build_constraints(&e, n, &EnumOptions::new(n as u64)).unwrap();
        let direct = verify_padic(&e, &params, n).unwrap();
        let manual = verify_coloring(&coloring, &constraints).unwrap();
        ensure(direct == manual, || format!("{:?} N={n}: {direct:?} vs {manual:?}", params))?;
    }
    Ok(())
}

fn random_equation(rng: &mut StdRng) -> Equation {
    let names = ["x", "y", "z", "w", "u", "v"];
    let k = rng.gen_range(1..=6);
    let mut lhs = Vec::new();
    let mut rhs = Vec::new();
    for name in &names[..k] {
        let c = rng.gen_range(1..=9) * if rng.gen_bool(0.5) { -1 } else { 1 };
        let term = Term::new(c, *name, rng.gen_range(1..=6)).unwrap();
        if rng.gen_bool(0.5) {
            lhs.push(term)
        } else {
            rhs.push(term)
        }
    }
    canonicalize(&lhs, &rhs).unwrap()
}

fn criterion_round_trip() -> Check {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..1000 {
        let e = random_equation(&mut rng);
        let text = format_equation(&e);
        let back = parse_equation(&text).map_err(|err| format!("{text}: {err}"))?;
        ensure(back == e, || format!("{text} did not round-trip"))?;
    }

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("grid.jsonl");
    let bindings = ["n=1..4".to_string(), "m=1..4".to_string(), "k=1..4".to_string()];
    let spec = SweepSpec::new("x^{n} + y^{m} = z^{k}", &bindings, DEFAULT_P_MAX, path.clone()).unwrap();
    let first = run_sweep(&spec).map_err(|e| e.to_string())?;
    let stored = std::fs::read(&path).unwrap();
    let second = run_sweep(&spec).map_err(|e| e.to_string())?;
    ensure(first.written == 64 && second.written == 0, || format!("wrote {} then {}", first.written, second.written))?;
    ensure(std::fs::read(&path).unwrap() == stored, || "store changed on resume".into())?;
    let records = read_store(&path).unwrap();
    ensure(records.len() == 64, || format!("{} records", records.len()))?;
    for (i, record) in records.iter().enumerate() {
        let (n, m, k) = (i / 16 + 1, i / 4 % 4 + 1, i % 4 + 1);
        ensure(record.equation == format!("x^{n} + y^{m} = z^{k}"), || format!("record {i}: {}", record.equation))?;
        let canonical: Equation = serde_json::from_str(record.canonical.as_ref().unwrap().get()).unwrap();
        let verdict = classify(&canonical, DEFAULT_P_MAX).unwrap().verdict;
        ensure(Some(verdict) == record.verdict, || format!("{}: stored verdict differs", record.equation))?;
        if k != n && k != m {
            let cor3 = record.rules.iter().any(|r| r == "Cor3");
            ensure(verdict == Verdict::NotPR && cor3, || format!("{}: {verdict} {:?}", record.equation, record.rules))?;
        }
    }
    Ok(())
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("1 fixture verdicts", criterion_fixtures),
        ("2 constant solutions of x^n + y^n = z^k", criterion_constant_solutions),
        ("3 Schur thresholds by exhaustive search", criterion_schur),
        ("4 enumeration vs cross-product oracle", criterion_enumeration),
        ("5 Rado consistency and r=4 colorings", criterion_consistency),
        ("6 p-adic coloring properties", criterion_padic),
        ("7 parser round trip and sweep resume", criterion_round_trip),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let started = Instant::now();
        match check() {
            Ok(()) => println!("PASS criterion {name} ({:.2?})", started.elapsed()),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
