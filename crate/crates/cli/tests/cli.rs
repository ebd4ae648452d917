use std::process::{Command, Output};

use serde_json::Value;
use tracemap::{make_ctx, BitPoly};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tracemap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn solve_quadratic_golden() {
    let o = run(&["solve", "--n", "3", "--k", "2", "--l", "1", "--a", "0x2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        stdout(&o),
        "equation: T_1^2(x) = 0x2 over GF(2^3)\n\
         ambient: GF(2^12) modulo 0x1009\n\
         solvable: 2 solutions\n\
         0x4\n\
         0x5\n"
    );
}

#[test]
fn identity_equation_has_one_solution() {
    let o = run(&["solve", "--n", "3", "--k", "1", "--l", "1", "--a", "0x2"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("solvable: 1 solution\n0x2\n"));
}

#[test]
fn unsolvable_exits_one() {
    let o = run(&["solve", "--n", "2", "--k", "2", "--l", "1", "--a", "0x2"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).ends_with("unsolvable\n"));
}

#[test]
fn classify_golden() {
    let o = run(&["classify", "--n", "3", "--k", "2", "--l", "1"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "2-to-1\n"));
    let o = run(&["classify", "--n", "2", "--k", "3"]);
    assert_eq!(stdout(&o), "permutation\n");
    let o = run(&["classify", "--n", "2", "--k", "4"]);
    assert_eq!(stdout(&o), "other\n");
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["verify", "--max-n", "0"][..],
        &["frobnicate"],
        &["solve", "--n", "3", "--k", "2"],
        &["solve", "--n", "3", "--k", "2", "--a", "zz"],
        &["solve", "--n", "3", "--k", "2", "--a", "0x8"],
        &[
            "solve", "--n", "3", "--k", "2", "--a", "0x2", "--coords", "ambient",
        ],
        &["solve", "--n", "3", "--k", "2", "--l", "3", "--a", "0x1"],
        &["solve", "--n", "2", "--k", "4", "--a", "0x0"],
        &[
            "solve",
            "--n",
            "3",
            "--k",
            "2",
            "--a",
            "0x1",
            "--modulus",
            "0x1000",
        ],
        &["bench", "--grid", "4,6,1", "--iters", "2"],
    ] {
        let o = run(args);
        assert_eq!(code(&o), 2, "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn ambient_rejection_names_the_modulus() {
    let o = run(&[
        "solve", "--n", "3", "--k", "2", "--a", "0x2", "--coords", "ambient",
    ]);
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("0x1009"), "{err}");
}

#[test]
fn ambient_coordinates_accepted() {
    let o = run(&[
        "solve", "--n", "3", "--k", "2", "--a", "0x4a2", "--coords", "ambient",
    ]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("solvable: 2 solutions"));
}

#[test]
fn k_above_n_through_linalg() {
    let o = run(&[
        "solve", "--n", "2", "--k", "4", "--a", "0x0", "--method", "linalg",
    ]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("solvable: 4 solutions"));
    let o = run(&[
        "solve", "--n", "2", "--k", "4", "--a", "0x1", "--method", "brute",
    ]);
    assert_eq!(code(&o), 1);
}

/// Parses the JSON, rebuilds the field, and substitutes every solution.
fn check_round_trip(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.push("--json");
    let o = run(&full);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let m = v["ambient"]["m"].as_u64().unwrap() as usize;
    let modulus = BitPoly::from_hex(v["ambient"]["modulus"].as_str().unwrap()).unwrap();
    let ctx = make_ctx(m, Some(modulus)).unwrap();
    let eq = &v["equation"];
    let (k, l) = (
        eq["k"].as_u64().unwrap() as usize,
        eq["l"].as_u64().unwrap() as usize,
    );
    let a = ctx.from_hex(eq["a"].as_str().unwrap()).unwrap();
    let sols = v["solutions"].as_array().unwrap();
    assert_eq!(sols.len() as u64, v["count"].as_u64().unwrap());
    for s in sols {
        let x = ctx.from_hex(s.as_str().unwrap()).unwrap();
        assert_eq!(x.tmap(l, k).unwrap(), a);
    }
    v
}

#[test]
fn json_round_trip() {
    let v = check_round_trip(&["solve", "--n", "3", "--k", "2", "--a", "0x2"]);
    assert_eq!(v["solvable"], true);
    assert_eq!(v["count"], 2);
    for (n, k, l) in [
        ("6", "4", "2"),
        ("8", "6", "3"),
        ("5", "5", "1"),
        ("6", "6", "2"),
    ] {
        for seed in ["1", "2", "3"] {
            let o = run(&["sample", "--n", n, "--seed", seed]);
            let a = stdout(&o).trim().to_string();
            for method in ["closed", "linalg", "brute"] {
                let v = Command::new(env!("CARGO_BIN_EXE_tracemap"))
                    .args([
                        "solve", "--n", n, "--k", k, "--l", l, "--a", &a, "--method", method,
                        "--json",
                    ])
                    .output()
                    .unwrap();
                let parsed: Value = serde_json::from_slice(&v.stdout).unwrap();
                if parsed["solvable"] == true {
                    check_round_trip(&[
                        "solve", "--n", n, "--k", k, "--l", l, "--a", &a, "--method", method,
                    ]);
                } else {
                    assert_eq!(v.status.code(), Some(1));
                }
            }
        }
    }
}

#[test]
fn methods_agree_on_output() {
    let closed = run(&[
        "solve", "--n", "6", "--k", "4", "--l", "2", "--a", "0x0", "--json",
    ]);
    let linalg = run(&[
        "solve", "--n", "6", "--k", "4", "--l", "2", "--a", "0x0", "--json", "--method", "linalg",
    ]);
    let c: Value = serde_json::from_slice(&closed.stdout).unwrap();
    let l: Value = serde_json::from_slice(&linalg.stdout).unwrap();
    assert_eq!(c["solutions"], l["solutions"]);
}

#[test]
fn sample_is_deterministic_and_valid() {
    let a = run(&["sample", "--n", "5", "--seed", "9", "--count", "4"]);
    let b = run(&["sample", "--n", "5", "--seed", "9", "--count", "4"]);
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert_eq!(text.lines().count(), 4);
    for line in text.lines() {
        let o = run(&["solve", "--n", "5", "--k", "5", "--l", "5", "--a", line]);
        assert_eq!(code(&o), 0, "{line}");
    }
    let amb = run(&["sample", "--n", "3", "--k", "2", "--coords", "ambient"]);
    let x = stdout(&amb).trim().to_string();
    let o = run(&[
        "solve", "--n", "3", "--k", "2", "--l", "2", "--a", &x, "--coords", "ambient",
    ]);
    assert_eq!(code(&o), 0);
}

#[test]
fn field_info_golden() {
    let o = run(&["field-info", "--n", "3", "--k", "2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        stdout(&o),
        "m = 12\n\
         modulus = 0x1009\n\
         GF(2^3) basis (ambient hex):\n  0x1\n  0x4a2\n  0xd20\n\
         GF(2^3) coordinates: modulo 0xb, X = 0x4a2 in the ambient field\n"
    );
    let o = run(&["field-info", "--n", "2", "--k", "3", "--json"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["m"], 12);
    assert_eq!(v["subfield_basis"].as_array().unwrap().len(), 2);
}

#[test]
fn kernel_output() {
    let o = run(&["kernel", "--n", "4", "--k", "2"]);
    assert_eq!(stdout(&o), "dimension: 1\n0x1\n");
    let o = run(&["kernel", "--n", "2", "--k", "4", "--json"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["dimension"], 2);
}

#[test]
fn verify_small_scopes() {
    let o = run(&["verify", "--max-n", "2"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let line = text.lines().find(|l| l.contains("example-n2-k2")).unwrap();
    assert!(
        line.starts_with("PASS") && line.contains("trials=1 "),
        "{line}"
    );
    assert!(text.lines().all(|l| l.starts_with("PASS")));
    let o = run(&[
        "verify",
        "--max-n",
        "4",
        "--samples",
        "30",
        "--jobs",
        "3",
        "--json",
    ]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["failures"] == 0));
}

#[test]
fn bench_csv() {
    let dir = std::env::temp_dir().join(format!("tracemap-bench-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("out.csv");
    let o = run(&[
        "bench",
        "--grid",
        "8,4,1",
        "--iters",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let csv = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,k,l,method,median_ns,iterations,amortized");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("8,4,1,closed-form,"));
    let o = run(&["bench", "--grid", "", "--iters", "3"]);
    assert_eq!(stdout(&o), "n,k,l,method,median_ns,iterations,amortized\n");
    std::fs::remove_dir_all(&dir).ok();
}
