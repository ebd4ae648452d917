//! Acceptance criteria, one line per criterion. Every comparison is exact.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use tracemap::bench::{run_bench, to_csv, GridPoint, CSV_HEADER};
use tracemap::oracle::laws::check_laws;
use tracemap::oracle::{brute_solve, half_trace_solve, linalg_solve};
use tracemap::solver::{
    ambient, classify, solvable_tlk, solve_artin_schreier, solve_quadratic, solve_tk, solve_tlk,
};
use tracemap::{Elt, FieldCtx, Instance, MapClass};

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

fn divisors(k: usize) -> Vec<usize> {
    (1..=k).filter(|l| k % l == 0).collect()
}

/// Every `(n, k, l)` with `n <= 8`, `1 <= k <= n`, `l | k`.
fn grid() -> Vec<(usize, usize, usize)> {
    let mut g = Vec::new();
    for n in 1..=8 {
        for k in 1..=n {
            for l in divisors(k) {
                g.push((n, k, l));
            }
        }
    }
    g
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion_1() -> Verdict {
    let mut instances = 0u64;
    for (n, k, l) in grid() {
        let ctx = ambient(n, k).map_err(|e| e.to_string())?;
        for a in ctx.subfield_elements(n).unwrap() {
            let closed = solve_tlk(&Instance::new(n, k, l, a.clone()).unwrap()).unwrap();
            let lin = linalg_solve(n, k, l, &a).unwrap();
            let brute = brute_solve(n, k, l, &a).unwrap();
            let c = closed.enumerate().unwrap();
            let li = lin.enumerate().unwrap();
            ensure(c == brute && li == brute, || {
                format!(
                    "(n,k,l)=({n},{k},{l}) a={a}: closed {} linalg {} brute {}",
                    c.len(),
                    li.len(),
                    brute.len()
                )
            })?;
            instances += 1;
        }
    }
    Ok(format!("{instances} instances, closed = linalg = brute"))
}

fn criterion_2() -> Verdict {
    let mut solvable = 0u64;
    for (n, k, l) in grid() {
        let ctx = ambient(n, k).unwrap();
        let d = gcd(n, k);
        let g = gcd(d, l);
        let want: usize = if (k / lcm(d, l)) % 2 == 1 {
            1 << (d - g)
        } else {
            1 << d
        };
        for a in ctx.subfield_elements(n).unwrap() {
            let brute = brute_solve(n, k, l, &a).unwrap();
            let closed = solve_tlk(&Instance::new(n, k, l, a.clone()).unwrap()).unwrap();
            if !brute.is_empty() {
                solvable += 1;
                ensure(
                    brute.len() == want && closed.count() == want as u128,
                    || {
                        format!(
                            "T_l^k ({n},{k},{l}) a={a}: {} solutions, expected {want}",
                            brute.len()
                        )
                    },
                )?;
            }
            if l == 1 && (k / d) % 2 == 1 {
                let s = solve_tk(n, k, &a).unwrap();
                ensure(
                    s.enumerate().unwrap() == brute
                        && (brute.is_empty() || brute.len() == 1 << (d - 1)),
                    || {
                        format!(
                            "T_k ({n},{k}) a={a}: {} solutions, expected 2^(d-1)",
                            brute.len()
                        )
                    },
                )?;
            }
            if k < n {
                let s = solve_artin_schreier(n, k, &a).unwrap();
                let scan: Vec<Elt> = ctx
                    .subfield_elements(n)
                    .unwrap()
                    .into_iter()
                    .filter(|x| &x.frob(k) + x == a)
                    .collect();
                ensure(
                    s.enumerate().unwrap() == scan && (scan.is_empty() || scan.len() == 1 << d),
                    || {
                        format!(
                            "x^(2^{k})+x over GF(2^{n}) a={a}: {} solutions, expected 2^d",
                            scan.len()
                        )
                    },
                )?;
            }
        }
    }
    Ok(format!(
        "{solvable} solvable T_l^k instances with exact counts; T_k and x^(2^k)+x counts exact"
    ))
}

fn criterion_3() -> Verdict {
    let mut checked = 0u64;
    for (n, k, l) in grid() {
        let ctx = ambient(n, k).unwrap();
        for a in ctx.subfield_elements(n).unwrap() {
            let pred = solvable_tlk(&Instance::new(n, k, l, a.clone()).unwrap()).unwrap();
            let nonempty = !brute_solve(n, k, l, &a).unwrap().is_empty();
            ensure(pred == nonempty, || {
                format!("({n},{k},{l}) a={a}: predicate {pred}, brute {nonempty}")
            })?;
            checked += 1;
        }
    }
    Ok(format!("predicate = nonemptiness on {checked} instances"))
}

/// `{x in field : T_k(x) in GF(2^n)}`.
fn preimage(ctx: &std::sync::Arc<FieldCtx>, n: usize, k: usize) -> BTreeSet<Elt> {
    ctx.subfield_elements(ctx.m())
        .unwrap()
        .into_iter()
        .filter(|x| x.t(k).in_subfield(n).unwrap())
        .collect()
}

fn criterion_4() -> Verdict {
    for m in [4, 8, 12] {
        let ctx = FieldCtx::canonical(m).unwrap();
        let set = preimage(&ctx, 2, 2);
        let in16 = set.iter().all(|x| x.in_subfield(4).unwrap());
        let in4 = set.iter().all(|x| x.in_subfield(2).unwrap());
        ensure(set.len() == 8 && in16 && !in4, || {
            format!(
                "inside GF(2^{m}): {} elements, in GF(16) {in16}, in GF(4) {in4}",
                set.len()
            )
        })?;
    }
    Ok("8 = 2^(n+k-1) elements inside GF(2^4), GF(2^8) and GF(2^12); all in GF(16), not all in GF(4)".into())
}

fn criterion_5() -> Verdict {
    for (n, k) in [(2, 3), (3, 2), (1, 2), (1, 3)] {
        let ctx = ambient(n, k).unwrap();
        let pre = preimage(&ctx, n, k);
        let gn = ctx.subfield_elements(n).unwrap();
        let gk = ctx.subfield_elements(k).unwrap();
        let sum: BTreeSet<Elt> = gn
            .iter()
            .flat_map(|u| gk.iter().map(move |v| u + v))
            .collect();
        ensure(pre == sum && pre.len() == 1 << (n + k - 1), || {
            format!(
                "(n,k)=({n},{k}): preimage {} sumset {}",
                pre.len(),
                sum.len()
            )
        })?;
    }
    let mut pairs = 0;
    for n in 1..=8 {
        for k in 1..=8 {
            let big_l = lcm(n, k);
            if 2 * big_l > 16 {
                continue;
            }
            let ctx = ambient(n, k).unwrap();
            let pre = preimage(&ctx, n, k);
            let image: BTreeSet<Elt> = ctx
                .subfield_elements(ctx.m())
                .unwrap()
                .iter()
                .map(|y| {
                    let t2 = y.tmap(1, 2).unwrap();
                    t2.tmap(k, big_l).unwrap().tmap(n, big_l).unwrap()
                })
                .collect();
            ensure(pre == image, || {
                format!(
                    "(n,k)=({n},{k}): preimage {} image {}",
                    pre.len(),
                    image.len()
                )
            })?;
            pairs += 1;
        }
    }
    Ok(format!(
        "sumset form for 4 coprime pairs; image form for {pairs} pairs with 2[n,k] <= 16"
    ))
}

fn criterion_6() -> Verdict {
    let mut trials = 0;
    for n in 2..=12usize {
        let ctx = ambient(n, 1).unwrap();
        let bctx = ambient(n, 2).unwrap();
        let here = ctx.subfield_poly_basis(n).unwrap();
        let there = bctx.subfield_poly_basis(n).unwrap();
        let mut seen = 0;
        let mut seed = 0u64;
        while seen < 100 {
            let x = ctx.sample_subfield(n, seed).unwrap();
            seed += 1;
            let a = &x.square() + &x;
            let q = solve_quadratic(n, &a).unwrap().enumerate().unwrap();
            let h = half_trace_solve(n, &a).unwrap().enumerate().unwrap();
            let a_there = there.to_ambient(&here.from_ambient(&a).unwrap()).unwrap();
            let brute: BTreeSet<Elt> = brute_solve(n, 2, 1, &a_there)
                .unwrap()
                .iter()
                .map(|y| here.to_ambient(&there.from_ambient(y).unwrap()).unwrap())
                .collect();
            ensure(
                q == h && q.len() == 2 && q.iter().all(|r| brute.contains(r)),
                || format!("n={n} a={a}: quadratic {q:?} half-trace {h:?}"),
            )?;
            seen += 1;
            trials += 1;
        }
    }
    Ok(format!("{trials} solvable right-hand sides over n = 2..12, identical 2-element sets inside brute force"))
}

fn criterion_7() -> Verdict {
    let image_size = |n: usize, k: usize, l: usize| -> usize {
        let ctx = ambient(n, k).unwrap();
        let img: BTreeSet<Elt> = ctx
            .subfield_elements(n)
            .unwrap()
            .iter()
            .map(|x| x.tmap(l, k).unwrap())
            .collect();
        img.len()
    };
    let mut maps = 0;
    for (n, k, l) in grid() {
        let c = classify(n, k, l).unwrap();
        let size = image_size(n, k, l);
        let empirical = if size == 1 << n {
            MapClass::Permutation
        } else if size == 1 << (n - 1) {
            MapClass::TwoToOne
        } else {
            MapClass::Other
        };
        ensure(
            c.tag == empirical && size == 1 << (n - c.kernel_dim),
            || {
                format!(
                    "({n},{k},{l}): classify {} kernel_dim {}, image {size}",
                    c.tag, c.kernel_dim
                )
            },
        )?;
        maps += 1;
    }
    let c = classify(2, 3, 1).unwrap();
    ensure(
        c.tag == MapClass::Permutation && image_size(2, 3, 1) == 4,
        || format!("(2,3,1): {}", c.tag),
    )?;
    let c = classify(2, 4, 1).unwrap();
    ensure(
        c.tag != MapClass::Permutation && image_size(2, 4, 1) < 4,
        || format!("(2,4,1): {}", c.tag),
    )?;
    Ok(format!(
        "{maps} maps plus (2,3,1) permutation, (2,4,1) not a permutation"
    ))
}

fn criterion_8() -> Verdict {
    const SAMPLES: usize = 1000;
    let report = check_laws(8, 8, SAMPLES, 2024).map_err(|e| e.to_string())?;
    for law in &report.laws {
        ensure(law.passed(), || {
            format!(
                "{} failed {}/{}: {:?}",
                law.name, law.failures, law.trials, law.counterexample
            )
        })?;
    }
    let sampled = [
        "commutativity",
        "transitivity",
        "artin-schreier-form",
        "double-trace",
        "field-criterion",
        "gcd-lcm",
        "coset",
        "xi-independence",
    ];
    for name in sampled {
        let law = report
            .get(name)
            .ok_or_else(|| format!("missing law {name}"))?;
        ensure(law.trials >= SAMPLES as u64, || {
            format!("{name}: only {} trials", law.trials)
        })?;
    }
    Ok(format!(
        "{} laws, zero failures, >= {SAMPLES} samples for each sampled law",
        report.laws.len()
    ))
}

fn criterion_9() -> Verdict {
    let grid: Vec<GridPoint> = [8, 16, 32, 64]
        .iter()
        .map(|&n| GridPoint { n, k: n / 2, l: 1 })
        .collect();
    let rows = run_bench(&grid, 5, false).map_err(|e| e.to_string())?;
    let csv = to_csv(&rows);
    let mut lines = csv.lines();
    ensure(lines.next() == Some(CSV_HEADER), || "bad header".into())?;
    let body: Vec<&str> = lines.collect();
    ensure(body.len() == 10, || {
        format!("{} rows, expected 10", body.len())
    })?;
    for line in &body {
        let f: Vec<&str> = line.split(',').collect();
        ensure(f.len() == 7, || format!("malformed row {line}"))?;
        let n: usize = f[0].parse().map_err(|_| format!("bad n in {line}"))?;
        let k: usize = f[1].parse().map_err(|_| format!("bad k in {line}"))?;
        ensure(k == n / 2 && f[2] == "1", || {
            format!("bad parameters in {line}")
        })?;
        ensure(["closed-form", "linalg", "brute"].contains(&f[3]), || {
            format!("bad method in {line}")
        })?;
        ensure(f[3] != "brute" || n <= 16, || {
            format!("brute above n = 16: {line}")
        })?;
        let ns: u64 = f[4].parse().map_err(|_| format!("bad time in {line}"))?;
        ensure(ns > 0 && f[5] == "5" && f[6] == "true", || {
            format!("bad fields in {line}")
        })?;
    }
    Ok(format!("gate passed, {} well-formed rows", body.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        (
            "exhaustive closed-form / linalg / brute equivalence, n <= 8",
            criterion_1,
        ),
        ("solution counts", criterion_2),
        ("solvability predicate", criterion_3),
        ("n = k = 2 preimage example", criterion_4),
        ("preimage membership", criterion_5),
        ("quadratic vs half-trace", criterion_6),
        ("classification vs image size", criterion_7),
        ("law suite", criterion_8),
        ("benchmark integrity", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = run();
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail} ({secs:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
