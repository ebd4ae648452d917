//! Randomized and exhaustive checks of the partial-trace identities.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Elt, FieldCtx};
use crate::solver::{ambient, ambient_degree, solve_closure_with, solve_tlk_with, Instance};
use crate::{gcd, lcm};

/// Largest ambient degree the enumeration-based laws will scan.
pub const ENUM_MAX_M: usize = 16;

/// Result of one law: how often it was tried, how often it failed, and the
/// first failing input as hex strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Outcome {
    pub name: String,
    pub statement: String,
    pub trials: u64,
    pub failures: u64,
    pub counterexample: Option<Vec<String>>,
}

impl Outcome {
    pub fn new(name: &str, statement: &str) -> Outcome {
        Outcome {
            name: name.to_string(),
            statement: statement.to_string(),
            trials: 0,
            failures: 0,
            counterexample: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    /// Counts one trial; on failure keeps the first counterexample.
    pub fn record(&mut self, ok: bool, witness: impl FnOnce() -> Vec<String>) {
        self.trials += 1;
        if !ok {
            self.failures += 1;
            if self.counterexample.is_none() {
                self.counterexample = Some(witness());
            }
        }
    }

    /// Folds another tally of the same law into this one; `other` is later in
    /// the deterministic order, so an existing counterexample wins.
    pub fn merge(&mut self, other: Outcome) {
        self.trials += other.trials;
        self.failures += other.failures;
        if self.counterexample.is_none() {
            self.counterexample = other.counterexample;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LawReport {
    pub max_n: usize,
    pub max_k: usize,
    pub samples: usize,
    pub seed: u64,
    pub laws: Vec<Outcome>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.laws.iter().all(Outcome::passed)
    }

    pub fn get(&self, name: &str) -> Option<&Outcome> {
        self.laws.iter().find(|o| o.name == name)
    }
}

fn hex(xs: &[&Elt]) -> Vec<String> {
    xs.iter().map(|x| x.to_hex()).collect()
}

fn label(parts: &[(&str, usize)]) -> String {
    parts
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn divisors(k: usize) -> Vec<usize> {
    (1..=k).filter(|l| k % l == 0).collect()
}

fn pick<R: Rng>(rng: &mut R, xs: &[usize]) -> usize {
    xs[rng.gen_range(0..xs.len())]
}

/// `T_l^k`, with `T_k = T_1^k`.
fn tr(x: &Elt, l: usize, k: usize) -> Elt {
    x.tmap(l, k).expect("l divides k")
}

fn t2(x: &Elt) -> Elt {
    tr(x, 1, 2)
}

fn law_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Runs every law with `n <= max_n`, `k <= max_k` and `samples` random trials
/// per randomized law. Enumeration-based laws cover every admissible `(n, k)`
/// whose field of degree `2 lcm(n, k)` is at most [`ENUM_MAX_M`].
pub fn check_laws(max_n: usize, max_k: usize, samples: usize, seed: u64) -> Result<LawReport> {
    if max_n == 0 {
        return Err(Error::NonPositive("max_n"));
    }
    if max_k == 0 {
        return Err(Error::NonPositive("max_k"));
    }
    let ctx = Bounds {
        max_n,
        max_k,
        samples,
    };
    let laws = vec![
        frobenius(&ctx, &mut law_rng(seed, 1))?,
        linearity(&ctx, &mut law_rng(seed, 2))?,
        commutativity(&ctx, &mut law_rng(seed, 3))?,
        transitivity(&ctx, &mut law_rng(seed, 4))?,
        artin_schreier_form(&ctx, &mut law_rng(seed, 5))?,
        double_trace(&ctx, &mut law_rng(seed, 6))?,
        field_criterion(&ctx, &mut law_rng(seed, 7))?,
        trace_image(&ctx)?,
        gcd_lcm(&ctx, &mut law_rng(seed, 9))?,
        coset(&ctx, &mut law_rng(seed, 10))?,
        membership_coprime(&ctx)?,
        membership_general(&ctx)?,
        example_two_two(&ctx)?,
        xi_independence(&ctx, &mut law_rng(seed, 14))?,
    ];
    Ok(LawReport {
        max_n,
        max_k,
        samples,
        seed,
        laws,
    })
}

struct Bounds {
    max_n: usize,
    max_k: usize,
    samples: usize,
}

impl Bounds {
    /// A random ambient field of degree `2 lcm(n, k)` for `n, k` in range.
    fn field<R: Rng>(&self, rng: &mut R) -> Result<(usize, usize, Arc<FieldCtx>)> {
        let n = rng.gen_range(1..=self.max_n);
        let k = rng.gen_range(1..=self.max_k);
        Ok((n, k, ambient(n, k)?))
    }

    fn k<R: Rng>(&self, rng: &mut R) -> usize {
        rng.gen_range(1..=self.max_k)
    }
}

fn frobenius<R: Rng>(b: &Bounds, rng: &mut R) -> Result<Outcome> {
    let mut out = Outcome::new(
        "frobenius",
        "x -> x^(2^j) is a field automorphism: (x+y)^(2^j) = x^(2^j)+y^(2^j), (xy)^(2^j) = x^(2^j) y^(2^j)",
    );
    for _ in 0..b.samples {
        let (_, _, ctx) = b.field(rng)?;
        let x = ctx.sample_with(rng);
        let y = ctx.sample_with(rng);
        let j = rng.gen_range(0..=ctx.m());
        let ok = (&x + &y).frob(j) == &x.frob(j) + &y.frob(j)
            && (&x * &y).frob(j) == &x.frob(j) * &y.frob(j);
        out.record(ok, || {
            let mut w = hex(&[&x, &y]);
            w.push(label(&[("j", j), ("m", ctx.m())]));
            w
        });
    }
    Ok(out)
}

fn linearity<R: Rng>(b: &Bounds, rng: &mut R) -> Result<Outcome> {
    let mut out = Outcome::new("linearity", "T_l^k(x + y) = T_l^k(x) + T_l^k(y)");
    for _ in 0..b.samples {
        let (_, _, ctx) = b.field(rng)?;
        let k = b.k(rng);
        let l = pick(rng, &divisors(k));
        let x = ctx.sample_with(rng);
        let y = ctx.sample_with(rng);
        let ok = tr(&(&x + &y), l, k) == &tr(&x, l, k) + &tr(&y, l, k);
        out.record(ok, || {
            let mut w = hex(&[&x, &y]);
            w.push(label(&[("k", k), ("l", l), ("m", ctx.m())]));
            w
        });
    }
    Ok(out)
}

fn commutativity<R: Rng>(b: &Bounds, rng: &mut R) -> Result<Outcome> {
    let mut out = Outcome::new("commutativity", "T_l^k o T_l'^k' = T_l'^k' o T_l^k");
    for _ in 0..b.samples {
        let (_, _, ctx) = b.field(rng)?;
        let (k, k2) = (b.k(rng), b.k(rng));
        let (l, l2) = (pick(rng, &divisors(k)), pick(rng, &divisors(k2)));
        let x = ctx.sample_with(rng);
        let ok = tr(&tr(&x, l2, k2), l, k) == tr(&tr(&x, l, k), l2, k2);
        out.record(ok, || {
            let mut w = hex(&[&x]);
            w.push(label(&[
                ("k", k),
                ("l", l),
                ("k'", k2),
                ("l'", l2),
                ("m", ctx.m()),
            ]));
            w
        });
    }
    Ok(out)
}

fn transitivity<R: Rng>(b: &Bounds, rng: &mut R) -> Result<Outcome> {
    let mut out = Outcome::new("transitivity", "T_l^k o T_s^l = T_s^k for s | l | k");
    for _ in 0..b.samples {
        let (_, _, ctx) = b.field(rng)?;
        let k = b.k(rng);
        let l = pick(rng, &divisors(k));
        let s = pick(rng, &divisors(l));
        let x = ctx.sample_with(rng);
        let ok = tr(&tr(&x, s, l), l, k) == tr(&x, s, k);
        out.record(ok, || {
            let mut w = hex(&[&x]);
            w.push(label(&[("k", k), ("l", l), ("s", s), ("m", ctx.m())]));
            w
        });
    }
    Ok(out)
}

fn artin_schreier_form<R: Rng>(b: &Bounds, rng: &mut R) -> Result<Outcome> {
    let mut out = Outcome::new(
        "artin-schreier-form",
        "T_k o T_2 (x) = T_k^(2k)(x) = x + x^(2^k)",
    );
    for _ in 0..b.samples {
        let (_, _, ctx) = b.field(rng)?;
        let k = b.k(rng);
        let x = ctx.sample_with(rng);
        let lhs = tr(&t2(&x), 1, k);
        let ok = lhs == tr(&x, k, 2 * k) && lhs == &x + &x.frob(k);
        out.record(ok, || {
            let mut w = hex(&[&x]);
            w.push(label(&[("k", k), ("m", ctx.m())]));
            w
        });
    }
    Ok(out)
}

fn double_trace<R: Rng>(b: &Bounds, rng: &mut R) -> Result<Outcome> {
    let mut out = Outcome::new("double-trace", "T_k o T_k o T_2 = T_2k");
    for _ in 0..b.samples {
        let (_, _, ctx) = b.field(rng)?;
        let k = b.k(rng);
        let x = ctx.sample_with(rng);
        let ok = tr(&tr(&t2(&x), 1, k), 1, k) == tr(&x, 1, 2 * k);
        out.record(ok, || {
            let mut w = hex(&[&x]);
            w.push(label(&[("k", k), ("m", ctx.m())]));
            w
        });
    }
    Ok(out)
}

/// `T_k(x) in GF(2^n) <=> T_n(x) in GF(2^k)`, and its `k = 1` form. A third
/// of the samples come from the preimage set, a third from GF(2^n), the rest
/// uniformly from the ambient field, so both sides of each equivalence occur.
fn field_criterion<R: Rng>(b: &Bounds, rng: &mut R) -> Result<Outcome> {
    let mut out = Outcome::new(
        "field-criterion",
        "T_k(x) in GF(2^n) <=> T_n(x) in GF(2^k); x in GF(2^n) <=> T_n(x) in GF(2)",
    );
    for i in 0..b.samples {
        let (n, k, ctx) = b.field(rng)?;
        let big_l = lcm(n, k);
        let y = ctx.sample_with(rng);
        let x = match i % 3 {
            0 => tr(&tr(&t2(&y), k, big_l), n, big_l),
            1 => ctx.sample_subfield_with(n, rng)?,
            _ => y,
        };
        let ok = x.t(k).in_subfield(n)? == x.t(n).in_subfield(k)?
            && x.in_subfield(n)? == x.t(n).in_subfield(1)?;
        out.record(ok, || {
            let mut w = hex(&[&x]);
            w.push(label(&[("n", n), ("k", k), ("m", ctx.m())]));
            w
        });
    }
    Ok(out)
}

/// `T_l^k(GF(2^k)) = GF(2^l)`, by enumeration of GF(2^k).
fn trace_image(b: &Bounds) -> Result<Outcome> {
    let mut out = Outcome::new("trace-image", "T_l^k(GF(2^k)) = GF(2^l) for l | k");
    for k in 1..=b.max_k.min(ENUM_MAX_M) {
        let ctx = FieldCtx::canonical(k)?;
        let elems = ctx.subfield_elements(k)?;
        for l in divisors(k) {
            let image: BTreeSet<Elt> = elems.iter().map(|x| tr(x, l, k)).collect();
            let inside = image.iter().all(|y| y.in_subfield(l).unwrap_or(false));
            out.record(inside && image.len() == 1 << l, || {
                vec![label(&[("k", k), ("l", l), ("image", image.len())])]
            });
        }
    }
    Ok(out)
}

fn gcd_lcm<R: Rng>(b: &Bounds, rng: &mut R) -> Result<Outcome> {
    let mut out = Outcome::new(
        "gcd-lcm",
        "for a in GF(2^n): T_k^[n,k](a) = T_d^n(a) = T_(n-k)^[n,n-k](a), d = (n,k)",
    );
    for _ in 0..b.samples {
        let n = rng.gen_range(1..=b.max_n);
        let k = rng.gen_range(1..=b.max_k);
        let ctx = ambient(n, k)?;
        let a = ctx.sample_subfield_with(n, rng)?;
        let d = gcd(n, k);
        let lhs = tr(&a, k, lcm(n, k));
        let mid = tr(&a, d, n);
        let mut ok = lhs == mid;
        if k < n {
            ok &= tr(&a, n - k, lcm(n, n - k)) == mid;
        }
        out.record(ok, || {
            let mut w = hex(&[&a]);
            w.push(label(&[("n", n), ("k", k)]));
            w
        });
    }
    Ok(out)
}

/// Elements of `mu_(2^L + 1)` other than 1 inside a field of degree `2L`.
fn unit_circle(ctx: &Arc<FieldCtx>, big_l: usize) -> Result<Vec<Elt>> {
    let e = (1u128 << big_l) - 1;
    let set: BTreeSet<Elt> = ctx
        .subfield_elements(2 * big_l)?
        .into_iter()
        .filter(|y| !y.is_zero())
        .map(|y| y.pow(e))
        .filter(|xi| !xi.is_one())
        .collect();
    Ok(set.into_iter().collect())
}

fn coset<R: Rng>(b: &Bounds, rng: &mut R) -> Result<Outcome> {
    let mut out = Outcome::new(
        "coset",
        "for a in GF(2^L)*, xi in mu_(2^L+1)\\{1}: a/(xi+1) + GF(2^L) = {a/(xi'+1) : xi' in mu_(2^L+1)\\{1}}",
    );
    let top = b.max_n.max(b.max_k).min(ENUM_MAX_M / 2);
    let mut circles = Vec::new();
    for big_l in 1..=top {
        let ctx = FieldCtx::canonical(2 * big_l)?;
        let mu = unit_circle(&ctx, big_l)?;
        let sub = ctx.subfield_elements(big_l)?;
        circles.push((big_l, ctx, mu, sub));
    }
    for _ in 0..b.samples {
        let (big_l, ctx, mu, sub) = &circles[rng.gen_range(0..circles.len())];
        let a = loop {
            let a = ctx.sample_subfield_with(*big_l, rng)?;
            if !a.is_zero() {
                break a;
            }
        };
        let xi = &mu[rng.gen_range(0..mu.len())];
        let base = &a / &(xi + &ctx.one());
        let lhs: BTreeSet<Elt> = sub.iter().map(|c| &base + c).collect();
        let rhs: BTreeSet<Elt> = mu.iter().map(|x| &a / &(x + &ctx.one())).collect();
        out.record(mu.len() == 1 << big_l && lhs == rhs, || {
            let mut w = hex(&[&a, xi]);
            w.push(label(&[("L", *big_l)]));
            w
        });
    }
    Ok(out)
}

/// `{x : T_k(x) in GF(2^n)}` inside a field of degree `2 lcm(n, k)`, which
/// contains the whole preimage.
fn preimage(ctx: &Arc<FieldCtx>, n: usize, k: usize) -> Result<BTreeSet<Elt>> {
    let mut set = BTreeSet::new();
    for x in ctx.subfield_elements(ctx.m())? {
        if x.t(k).in_subfield(n)? {
            set.insert(x);
        }
    }
    Ok(set)
}

fn enumerable_pairs(b: &Bounds) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for n in 1..=b.max_n {
        for k in 1..=b.max_k {
            if ambient_degree(n, k) <= ENUM_MAX_M {
                pairs.push((n, k));
            }
        }
    }
    pairs
}

fn membership_coprime(b: &Bounds) -> Result<Outcome> {
    let mut out = Outcome::new(
        "membership-coprime",
        "gcd(n,k) = 1: T_k(x) in GF(2^n) <=> x in GF(2^n) + GF(2^k), a set of 2^(n+k-1) elements",
    );
    for (n, k) in enumerable_pairs(b) {
        if gcd(n, k) != 1 {
            continue;
        }
        let ctx = ambient(n, k)?;
        let pre = preimage(&ctx, n, k)?;
        let gn = ctx.subfield_elements(n)?;
        let gk = ctx.subfield_elements(k)?;
        let sum: BTreeSet<Elt> = gn
            .iter()
            .flat_map(|u| gk.iter().map(move |v| u + v))
            .collect();
        out.record(pre == sum && pre.len() == 1 << (n + k - 1), || {
            vec![label(&[
                ("n", n),
                ("k", k),
                ("preimage", pre.len()),
                ("sumset", sum.len()),
            ])]
        });
    }
    Ok(out)
}

fn membership_general(b: &Bounds) -> Result<Outcome> {
    let mut out = Outcome::new(
        "membership-general",
        "{x : T_k(x) in GF(2^n)} = T_n^[n,k] o T_k^[n,k] o T_2 (GF(2^(2[n,k])))",
    );
    for (n, k) in enumerable_pairs(b) {
        let ctx = ambient(n, k)?;
        let big_l = lcm(n, k);
        let pre = preimage(&ctx, n, k)?;
        let image: BTreeSet<Elt> = ctx
            .subfield_elements(ctx.m())?
            .iter()
            .map(|y| tr(&tr(&t2(y), k, big_l), n, big_l))
            .collect();
        out.record(pre == image, || {
            vec![label(&[
                ("n", n),
                ("k", k),
                ("preimage", pre.len()),
                ("image", image.len()),
            ])]
        });
    }
    Ok(out)
}

fn example_two_two(b: &Bounds) -> Result<Outcome> {
    let mut out = Outcome::new(
        "example-n2-k2",
        "n = k = 2: {x : T_2(x) in GF(4)} has 8 elements, lies in GF(16), not in GF(4)",
    );
    if b.max_n < 2 || b.max_k < 2 {
        return Ok(out);
    }
    let ctx = ambient(2, 2)?;
    let pre = preimage(&ctx, 2, 2)?;
    let in16 = pre.iter().all(|x| x.in_subfield(4).unwrap_or(false));
    let in4 = pre.iter().all(|x| x.in_subfield(2).unwrap_or(false));
    out.record(pre.len() == 8 && in16 && !in4, || {
        pre.iter().map(Elt::to_hex).collect()
    });
    Ok(out)
}

/// Solution sets do not depend on the choice of `xi`.
fn xi_independence<R: Rng>(b: &Bounds, rng: &mut R) -> Result<Outcome> {
    let mut out = Outcome::new(
        "xi-independence",
        "closed-form solution sets in GF(2^n) and in the closure are the same for every xi",
    );
    for _ in 0..b.samples {
        let n = rng.gen_range(1..=b.max_n);
        let k = rng.gen_range(1..=b.max_k.min(n));
        let l = pick(rng, &divisors(k));
        let ctx = ambient(n, k)?;
        let a = if rng.gen_bool(0.5) {
            ctx.sample_subfield_with(n, rng)?.tmap(l, k)?
        } else {
            ctx.sample_subfield_with(n, rng)?
        };
        let inst = Instance::new(n, k, l, a.clone())?;
        let base = solve_tlk_with(&inst, 0)?;
        let closure = solve_closure_with(n, k, l, &a, 0)?;
        let mut ok = true;
        for choice in 1..=2 {
            ok &= solve_tlk_with(&inst, choice)?.same_set(&base);
            ok &= solve_closure_with(n, k, l, &a, choice)?.same_set(&closure);
        }
        out.record(ok, || {
            let mut w = hex(&[&a]);
            w.push(label(&[("n", n), ("k", k), ("l", l)]));
            w
        });
    }
    Ok(out)
}
