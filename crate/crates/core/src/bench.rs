//! Timing harness: closed forms against Gaussian elimination and exhaustive
//! search on seeded solvable instances.

use std::fmt;
use std::io::{self, Write};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Elt, FieldCtx};
use crate::oracle::{brute_solve, linalg_solve};
use crate::solver::{ambient, ambient_degree, solve_tlk, Instance};

/// Exhaustive search is only timed up to this `n`.
pub const BRUTE_BENCH_MAX_N: usize = 16;
/// Largest `n` accepted in a grid.
pub const BENCH_MAX_N: usize = 512;
/// Solvable instances generated per grid point.
pub const INSTANCES: usize = 8;
const SEED: u64 = 0x7ace;

pub const CSV_HEADER: &str = "n,k,l,method,median_ns,iterations,amortized";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GridPoint {
    pub n: usize,
    pub k: usize,
    pub l: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Method {
    #[serde(rename = "closed-form")]
    ClosedForm,
    #[serde(rename = "linalg")]
    Linalg,
    #[serde(rename = "brute")]
    Brute,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::ClosedForm => "closed-form",
            Method::Linalg => "linalg",
            Method::Brute => "brute",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub method: Method,
    pub median_ns: u64,
    pub iterations: usize,
    /// `true` when context construction happens once, outside the timed region.
    pub amortized: bool,
}

/// Parses `"n,k,l;n,k,l;..."`; blank input is the empty grid.
pub fn parse_grid(s: &str) -> Result<Vec<GridPoint>> {
    let mut grid = Vec::new();
    for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let nums = part
            .split(',')
            .map(|x| x.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::BadGrid(format!("{part:?}: {e}")))?;
        let [n, k, l] = nums[..] else {
            return Err(Error::BadGrid(format!("{part:?}: expected n,k,l")));
        };
        grid.push(GridPoint { n, k, l });
    }
    Ok(grid)
}

/// Rejects points the closed form or the harness cannot take.
pub fn validate_grid(grid: &[GridPoint]) -> Result<()> {
    for p in grid {
        let GridPoint { n, k, l } = *p;
        if n == 0 || k == 0 || l == 0 {
            return Err(Error::BadGrid(format!(
                "{n},{k},{l}: entries must be positive"
            )));
        }
        if k > n {
            return Err(Error::BadGrid(format!(
                "{n},{k},{l}: closed form needs k <= n"
            )));
        }
        if k % l != 0 {
            return Err(Error::BadGrid(format!("{n},{k},{l}: l must divide k")));
        }
        if n > BENCH_MAX_N {
            return Err(Error::BadGrid(format!(
                "{n},{k},{l}: n above {BENCH_MAX_N}"
            )));
        }
    }
    Ok(())
}

/// Methods timed at a grid point, in output order.
pub fn methods_for(p: &GridPoint) -> Vec<Method> {
    let mut m = vec![Method::ClosedForm, Method::Linalg];
    if p.n <= BRUTE_BENCH_MAX_N {
        m.push(Method::Brute);
    }
    m
}

/// Seeded right-hand sides `a = T_l^k(x)`, so every instance is solvable.
pub fn instances(p: &GridPoint) -> Result<Vec<Elt>> {
    let ctx = ambient(p.n, p.k)?;
    let mut rng =
        ChaCha8Rng::seed_from_u64(SEED ^ ((p.n as u64) << 32 | (p.k as u64) << 16 | p.l as u64));
    (0..INSTANCES)
        .map(|_| ctx.sample_subfield_with(p.n, &mut rng)?.tmap(p.l, p.k))
        .collect()
}

/// Solves one instance and returns the number of solutions.
fn solve(method: Method, p: &GridPoint, a: &Elt) -> Result<u128> {
    Ok(match method {
        Method::ClosedForm => solve_tlk(&Instance::new(p.n, p.k, p.l, a.clone())?)?.count(),
        Method::Linalg => linalg_solve(p.n, p.k, p.l, a)?.count(),
        Method::Brute => brute_solve(p.n, p.k, p.l, a)?.len() as u128,
    })
}

/// Every method must return the same set on every instance before anything
/// is timed.
pub fn gate(p: &GridPoint, rhs: &[Elt]) -> Result<()> {
    for a in rhs {
        let closed = solve_tlk(&Instance::new(p.n, p.k, p.l, a.clone())?)?;
        let lin = linalg_solve(p.n, p.k, p.l, a)?;
        if !closed.solvable || !closed.same_set(&lin) {
            return Err(Error::GateMismatch(format!(
                "{},{},{} a={a}: closed-form and linalg disagree",
                p.n, p.k, p.l
            )));
        }
        if p.n <= BRUTE_BENCH_MAX_N {
            let brute = brute_solve(p.n, p.k, p.l, a)?;
            if brute.len() as u128 != closed.count() || !brute.iter().all(|x| closed.contains(x)) {
                return Err(Error::GateMismatch(format!(
                    "{},{},{} a={a}: closed-form and brute disagree",
                    p.n, p.k, p.l
                )));
            }
        }
    }
    Ok(())
}

fn median(mut xs: Vec<u64>) -> u64 {
    xs.sort_unstable();
    xs[xs.len() / 2]
}

fn time_point(
    p: &GridPoint,
    method: Method,
    rhs: &[Elt],
    iterations: usize,
    amortized: bool,
) -> Result<u64> {
    let m = ambient_degree(p.n, p.k);
    let mut samples = Vec::with_capacity(iterations);
    for i in 0..iterations {
        let a = &rhs[i % rhs.len()];
        let start = Instant::now();
        let solved = if amortized {
            solve(method, p, a)?
        } else {
            let ctx = FieldCtx::build(m, None)?;
            let a = ctx.import(a)?;
            solve(method, p, &a)?
        };
        let ns = start.elapsed().as_nanos();
        std::hint::black_box(solved);
        samples.push(u64::try_from(ns).unwrap_or(u64::MAX).max(1));
    }
    Ok(median(samples))
}

/// Times every method at every grid point. With `include_setup` each method
/// is reported twice: context reused (`amortized`) and context rebuilt inside
/// each timed iteration.
pub fn run_bench(
    grid: &[GridPoint],
    iterations: usize,
    include_setup: bool,
) -> Result<Vec<BenchRow>> {
    if iterations == 0 {
        return Err(Error::BadGrid("iterations must be at least 1".into()));
    }
    validate_grid(grid)?;
    let mut prepared = Vec::with_capacity(grid.len());
    for p in grid {
        let rhs = instances(p)?;
        gate(p, &rhs)?;
        prepared.push(rhs);
    }
    let mut rows = Vec::new();
    for (p, rhs) in grid.iter().zip(&prepared) {
        for method in methods_for(p) {
            let modes: &[bool] = if include_setup {
                &[true, false]
            } else {
                &[true]
            };
            for &amortized in modes {
                rows.push(BenchRow {
                    n: p.n,
                    k: p.k,
                    l: p.l,
                    method,
                    median_ns: time_point(p, method, rhs, iterations, amortized)?,
                    iterations,
                    amortized,
                });
            }
        }
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[BenchRow], mut w: W) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.n, r.k, r.l, r.method, r.median_ns, r.iterations, r.amortized
        )?;
    }
    Ok(())
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse() {
        assert_eq!(
            parse_grid("8,4,1; 16,8,2").unwrap(),
            vec![
                GridPoint { n: 8, k: 4, l: 1 },
                GridPoint { n: 16, k: 8, l: 2 }
            ]
        );
        assert!(parse_grid("").unwrap().is_empty());
        assert!(parse_grid("8,4").is_err());
        assert!(parse_grid("8,x,1").is_err());
    }

    #[test]
    fn three_rows_with_gate() {
        let rows = run_bench(&[GridPoint { n: 8, k: 4, l: 1 }], 5, false).unwrap();
        let methods: Vec<_> = rows.iter().map(|r| r.method).collect();
        assert_eq!(
            methods,
            vec![Method::ClosedForm, Method::Linalg, Method::Brute]
        );
        assert!(rows
            .iter()
            .all(|r| r.median_ns > 0 && r.iterations == 5 && r.amortized));
    }

    #[test]
    fn brute_dropped_above_guard() {
        assert_eq!(methods_for(&GridPoint { n: 20, k: 10, l: 1 }).len(), 2);
    }

    #[test]
    fn setup_rows() {
        let rows = run_bench(&[GridPoint { n: 4, k: 2, l: 1 }], 3, true).unwrap();
        assert_eq!(rows.len(), 6);
        assert_eq!(rows.iter().filter(|r| !r.amortized).count(), 3);
    }

    #[test]
    fn empty_grid_is_header_only() {
        let rows = run_bench(&[], 10, false).unwrap();
        assert_eq!(to_csv(&rows), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn invalid_grid_rejected() {
        assert!(run_bench(&[GridPoint { n: 4, k: 6, l: 1 }], 3, false).is_err());
        assert!(run_bench(&[GridPoint { n: 4, k: 4, l: 3 }], 3, false).is_err());
        assert!(run_bench(&[GridPoint { n: 4, k: 2, l: 1 }], 0, false).is_err());
    }

    #[test]
    fn gate_catches_wrong_answer() {
        let p = GridPoint { n: 4, k: 2, l: 1 };
        let ctx = ambient(4, 2).unwrap();
        // T_2(x) = x + x^2 only reaches trace-zero elements.
        let a = ctx
            .subfield_elements(4)
            .unwrap()
            .into_iter()
            .find(|a| a.t(4).is_one())
            .unwrap();
        assert!(matches!(gate(&p, &[a]), Err(Error::GateMismatch(_))));
    }
}
