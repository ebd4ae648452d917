//! The verification driver behind `tracemap verify`: closed forms against
//! the linear-algebra and exhaustive oracles, counts, solvability,
//! classification, the two quadratic solvers, and the law suite.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::laws::{check_laws, Outcome};
use super::{half_trace_solve, linalg_solve, BRUTE_MAX_N};
use crate::error::{Error, Result};
use crate::field::{Elt, FieldCtx};
use crate::solver::{
    ambient, classify, solvable_tlk, solve_artin_schreier, solve_quadratic, solve_tk, solve_tlk,
    Instance, MapClass, SolutionSet,
};
use crate::{gcd, lcm};

/// Every `a` in GF(2^n) is tried up to this `n`; beyond it `samples` are drawn.
pub const EXHAUSTIVE_MAX_N: usize = 8;
/// Largest `n` the quadratic check compares against a full scan.
pub const QUADRATIC_SCAN_MAX_N: usize = 12;
/// Bound on `n` and `k` handed to the law suite.
pub const LAW_MAX: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteConfig {
    pub max_n: usize,
    pub samples: usize,
    pub seed: u64,
    pub jobs: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            max_n: 6,
            samples: 200,
            seed: 0,
            jobs: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub checks: Vec<Outcome>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Outcome::passed)
    }

    pub fn failures(&self) -> u64 {
        self.checks.iter().map(|c| c.failures).sum()
    }

    pub fn get(&self, name: &str) -> Option<&Outcome> {
        self.checks.iter().find(|c| c.name == name)
    }
}

const CHECKS: [(&str, &str); 7] = [
    (
        "equivalence",
        "closed-form T_l^k solution sets equal the linear-algebra and exhaustive ones (k <= n)",
    ),
    (
        "k-exceeds-n",
        "linear-algebra solution sets equal the exhaustive ones for n < k <= 2n",
    ),
    (
        "counts",
        "solvable T_l^k(x) = a has 2^(d-(d,l)) roots if k/[d,l] is odd, 2^d if even",
    ),
    (
        "special-counts",
        "x^(2^k) + x = a has 0 or 2^d roots; T_k(x) = a with k/d odd has 0 or 2^(d-1)",
    ),
    (
        "solvability",
        "T_d^n(a) in GF(2^(d,l)) (k/[d,l] odd) or T_d^n(a) = 0 (even) iff a root exists",
    ),
    (
        "classification",
        "permutation iff k/l odd and d | l; 2-to-1 iff d = 1, k/l even or d = 2, l and k/2l odd",
    ),
    (
        "quadratic",
        "x^2 + x = a: T_n(a/(xi+1)) + GF(2) equals the half-trace solutions",
    ),
];

type Slot = Mutex<Option<Result<Vec<Outcome>>>>;

/// Runs the suite; `max_n` bounds `n`, and the law suite runs with
/// `n, k <= min(max_n, LAW_MAX)`.
pub fn run_suite(cfg: SuiteConfig) -> Result<SuiteReport> {
    if cfg.max_n == 0 {
        return Err(Error::Invalid(
            "empty scope: --max-n must be at least 1".into(),
        ));
    }
    if cfg.max_n > BRUTE_MAX_N {
        return Err(Error::EnumerationGuard {
            n: cfg.max_n,
            max: BRUTE_MAX_N,
        });
    }
    let jobs = cfg.jobs.max(1);
    let ns: Vec<usize> = (1..=cfg.max_n).collect();
    let slots: Vec<Slot> = ns.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|s| {
        for _ in 0..jobs.min(ns.len()) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= ns.len() {
                    break;
                }
                let r = check_n(ns[i], cfg.samples, cfg.seed);
                *slots[i].lock().unwrap() = Some(r);
            });
        }
    });
    let mut checks: Vec<Outcome> = CHECKS
        .iter()
        .map(|(name, stmt)| Outcome::new(name, stmt))
        .collect();
    for slot in slots {
        let part = slot.into_inner().unwrap().expect("every n was processed")?;
        for (total, p) in checks.iter_mut().zip(part) {
            total.merge(p);
        }
    }
    let bound = cfg.max_n.min(LAW_MAX);
    let laws = check_laws(bound, bound, cfg.samples, cfg.seed)?;
    checks.extend(laws.laws);
    Ok(SuiteReport {
        config: cfg,
        checks,
    })
}

fn divisors(k: usize) -> Vec<usize> {
    (1..=k).filter(|l| k % l == 0).collect()
}

/// `y -> {x in GF(2^n) : f(x) = y}` over all of GF(2^n).
fn preimages(
    ctx: &Arc<FieldCtx>,
    n: usize,
    f: impl Fn(&Elt) -> Elt,
) -> Result<BTreeMap<Elt, Vec<Elt>>> {
    let mut map: BTreeMap<Elt, Vec<Elt>> = BTreeMap::new();
    for x in ctx.subfield_elements(n)? {
        map.entry(f(&x)).or_default().push(x);
    }
    Ok(map)
}

fn lookup(map: &BTreeMap<Elt, Vec<Elt>>, a: &Elt) -> Vec<Elt> {
    map.get(a).cloned().unwrap_or_default()
}

/// The right-hand sides tried for one field: all of GF(2^n) when small,
/// otherwise seeded samples, half of them images so that solvable cases occur.
fn rhs_values(
    ctx: &Arc<FieldCtx>,
    n: usize,
    samples: usize,
    rng: &mut ChaCha8Rng,
    image: impl Fn(&Elt) -> Elt,
) -> Result<Vec<Elt>> {
    if n <= EXHAUSTIVE_MAX_N {
        return ctx.subfield_elements(n);
    }
    let mut out = vec![ctx.zero()];
    for i in 0..samples {
        let x = ctx.sample_subfield_with(n, rng)?;
        out.push(if i % 2 == 0 { image(&x) } else { x });
    }
    Ok(out)
}

fn set_hex(xs: &[Elt]) -> String {
    let parts: Vec<String> = xs.iter().map(Elt::to_hex).collect();
    format!("{{{}}}", parts.join(","))
}

fn tag(n: usize, k: usize, l: usize) -> String {
    format!("n={n} k={k} l={l}")
}

fn expected_count(n: usize, k: usize, l: usize) -> u128 {
    let d = gcd(n, k);
    let g = gcd(d, l);
    if (k / lcm(d, l)) % 2 == 1 {
        1 << (d - g)
    } else {
        1 << d
    }
}

fn size_matches(s: &SolutionSet, brute: &[Elt]) -> bool {
    s.count() == brute.len() as u128
}

fn check_n(n: usize, samples: usize, seed: u64) -> Result<Vec<Outcome>> {
    let mut out: Vec<Outcome> = CHECKS
        .iter()
        .map(|(name, stmt)| Outcome::new(name, stmt))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64).wrapping_mul(0x2545_f491_4f6c_dd1d));

    for k in 1..=2 * n {
        let ctx = ambient(n, k)?;
        for l in divisors(k) {
            let map = preimages(&ctx, n, |x| x.tmap(l, k).expect("l | k"))?;
            let image_size = map.len();
            let cls = classify(n, k, l)?;
            let kernel_dim = n - image_size.trailing_zeros() as usize;
            let tag_ok = match cls.tag {
                MapClass::Permutation => image_size == 1 << n,
                MapClass::TwoToOne => image_size == 1 << (n - 1),
                MapClass::Other => image_size < 1 << (n - 1),
            };
            out[5].record(
                tag_ok && image_size.is_power_of_two() && kernel_dim == cls.kernel_dim,
                || {
                    vec![
                        tag(n, k, l),
                        format!("{} kernel_dim={}", cls.tag, cls.kernel_dim),
                        format!("image={image_size}"),
                    ]
                },
            );
            let rhs = rhs_values(&ctx, n, samples, &mut rng, |x| x.tmap(l, k).expect("l | k"))?;
            for a in rhs {
                let brute = lookup(&map, &a);
                let lin = linalg_solve(n, k, l, &a)?;
                let lin_ok = lin.enumerate()? == brute;
                if k > n {
                    out[1].record(lin_ok, || vec![tag(n, k, l), a.to_hex(), set_hex(&brute)]);
                    continue;
                }
                let inst = Instance::new(n, k, l, a.clone())?;
                let closed = solve_tlk(&inst)?;
                let closed_set = closed.enumerate()?;
                out[0].record(
                    lin_ok && closed_set == brute && closed.same_set(&lin),
                    || {
                        vec![
                            tag(n, k, l),
                            a.to_hex(),
                            set_hex(&closed_set),
                            set_hex(&brute),
                        ]
                    },
                );
                if closed.solvable {
                    out[2].record(
                        closed.count() == expected_count(n, k, l) && size_matches(&closed, &brute),
                        || {
                            vec![
                                tag(n, k, l),
                                a.to_hex(),
                                format!("count={}", closed.count()),
                            ]
                        },
                    );
                }
                let pred = solvable_tlk(&inst)?;
                out[4].record(pred == !brute.is_empty() && pred == closed.solvable, || {
                    vec![tag(n, k, l), a.to_hex(), format!("predicate={pred}")]
                });
            }
        }
    }

    for k in 1..=n {
        let ctx = ambient(n, k)?;
        let d = gcd(n, k);
        if k < n {
            let map = preimages(&ctx, n, |x| x + &x.frob(k))?;
            for a in rhs_values(&ctx, n, samples, &mut rng, |x| x + &x.frob(k))? {
                let brute = lookup(&map, &a);
                let s = solve_artin_schreier(n, k, &a)?;
                let ok = s.enumerate()? == brute && (brute.is_empty() || brute.len() == 1 << d);
                out[3].record(ok, || {
                    vec![format!("x^(2^{k})+x n={n}"), a.to_hex(), set_hex(&brute)]
                });
            }
        }
        if (k / d) % 2 == 1 {
            let map = preimages(&ctx, n, |x| x.t(k))?;
            for a in rhs_values(&ctx, n, samples, &mut rng, |x| x.t(k))? {
                let brute = lookup(&map, &a);
                let s = solve_tk(n, k, &a)?;
                let ok =
                    s.enumerate()? == brute && (brute.is_empty() || brute.len() == 1 << (d - 1));
                out[3].record(ok, || {
                    vec![format!("T_{k} n={n}"), a.to_hex(), set_hex(&brute)]
                });
            }
        }
    }

    let ctx = ambient(n, 1)?;
    let scan = if n <= QUADRATIC_SCAN_MAX_N {
        Some(preimages(&ctx, n, |x| &x.square() + x)?)
    } else {
        None
    };
    let mut values = vec![ctx.zero(), ctx.one()];
    for i in 0..samples {
        let x = ctx.sample_subfield_with(n, &mut rng)?;
        values.push(if i % 4 == 3 { x } else { &x.square() + &x });
    }
    for a in values {
        let q = solve_quadratic(n, &a)?;
        let h = half_trace_solve(n, &a)?;
        let qs = q.enumerate()?;
        let mut ok = q.same_set(&h) && qs == h.enumerate()?;
        ok &= qs.iter().all(|x| &x.square() + x == a);
        ok &= qs.is_empty() || qs.len() == 2;
        if let Some(map) = &scan {
            ok &= qs == lookup(map, &a);
        }
        out[6].record(ok, || vec![format!("n={n}"), a.to_hex(), set_hex(&qs)]);
    }
    Ok(out)
}
