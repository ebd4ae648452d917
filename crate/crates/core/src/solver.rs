//! Closed-form solutions of `T_l^k(x) = a`.
//!
//! Each solution set is a coset `x0 + K` of the kernel `K` of the operator,
//! stored as a particular solution and a GF(2)-basis of `K`. The particular
//! solutions are built from `a / (xi + 1)` with `xi` on a unit circle
//! `mu_(2^M + 1)`, pushed through compositions of partial traces; `a = 0`
//! skips the formulas and returns the kernel itself.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{span_of, CtxInfo, Elt, FieldCtx};
use crate::gf2::XorBasis;
use crate::{gcd, lcm};

/// Enumeration cap used by [`SolutionSet::enumerate`].
pub const DEFAULT_ENUM_CAP: u128 = 1 << 20;

/// Degree of the ambient field used for an `(n, k)` instance.
pub fn ambient_degree(n: usize, k: usize) -> usize {
    2 * lcm(n, k)
}

/// The canonical ambient field for an `(n, k)` instance.
pub fn ambient(n: usize, k: usize) -> Result<Arc<FieldCtx>> {
    check_positive(n, k, 1)?;
    FieldCtx::canonical(ambient_degree(n, k))
}

fn check_positive(n: usize, k: usize, l: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::NonPositive("n"));
    }
    if k == 0 {
        return Err(Error::NonPositive("k"));
    }
    if l == 0 {
        return Err(Error::NonPositive("l"));
    }
    Ok(())
}

fn check_divides(l: usize, k: usize) -> Result<()> {
    if k % l != 0 {
        Err(Error::NotADivisor { l, k })
    } else {
        Ok(())
    }
}

/// Checks that `a` lives in the ambient field of `(n, k)` and lies in GF(2^n).
fn check_rhs(n: usize, k: usize, a: &Elt) -> Result<()> {
    let expected = ambient_degree(n, k);
    if a.ctx().m() != expected {
        return Err(Error::WrongAmbient {
            expected,
            got: a.ctx().m(),
        });
    }
    if !a.in_subfield(n)? {
        return Err(Error::NotInSubfield {
            elt: a.to_hex(),
            n,
            modulus: a.ctx().modulus().to_hex(),
        });
    }
    Ok(())
}

fn odd(x: usize) -> bool {
    x % 2 == 1
}

/// A request to solve `T_l^k(x) = a` with `a` in GF(2^n).
#[derive(Clone, Debug)]
pub struct Instance {
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub a: Elt,
    /// `gcd(n, k)`
    pub d: usize,
    /// `gcd(d, l)`
    pub g: usize,
    /// `lcm(n, k)`
    pub lnk: usize,
}

impl Instance {
    pub fn new(n: usize, k: usize, l: usize, a: Elt) -> Result<Instance> {
        check_positive(n, k, l)?;
        check_divides(l, k)?;
        check_rhs(n, k, &a)?;
        let d = gcd(n, k);
        Ok(Instance {
            n,
            k,
            l,
            a,
            d,
            g: gcd(d, l),
            lnk: lcm(n, k),
        })
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        self.a.ctx()
    }

    /// Parity of `k / lcm(d, l)`, which decides the shape of the kernel.
    pub fn kernel_parity_odd(&self) -> bool {
        odd(self.k / lcm(self.d, self.l))
    }
}

/// `{particular + span(kernel_basis)}` when solvable, else empty.
#[derive(Clone)]
pub struct SolutionSet {
    pub solvable: bool,
    pub particular: Option<Elt>,
    pub kernel_basis: Vec<Elt>,
    ctx: Arc<FieldCtx>,
}

/// Serialized form of a [`SolutionSet`]; elements in ambient hex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub solvable: bool,
    pub particular: Option<String>,
    pub kernel_basis: Vec<String>,
    pub count: u128,
    pub ambient: CtxInfo,
}

impl SolutionSet {
    pub fn solvable(particular: Elt, kernel_basis: Vec<Elt>) -> Self {
        let ctx = particular.ctx().clone();
        SolutionSet {
            solvable: true,
            particular: Some(particular),
            kernel_basis,
            ctx,
        }
    }

    pub fn unsolvable(ctx: &Arc<FieldCtx>, kernel_basis: Vec<Elt>) -> Self {
        SolutionSet {
            solvable: false,
            particular: None,
            kernel_basis,
            ctx: ctx.clone(),
        }
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    /// The coset spanned by an explicit list of solutions, such as the output
    /// of an exhaustive search. An empty list gives an unsolvable set with an
    /// empty kernel basis; a list that is not a coset is rejected.
    pub fn from_elements(ctx: &Arc<FieldCtx>, xs: &[Elt]) -> Result<SolutionSet> {
        let Some(x0) = xs.first() else {
            return Ok(SolutionSet::unsolvable(ctx, Vec::new()));
        };
        let kernel = independent(xs.iter().map(|x| x + x0));
        let set = SolutionSet::solvable(x0.clone(), kernel);
        if set.count() != xs.len() as u128 || !xs.iter().all(|x| set.contains(x)) {
            return Err(Error::Invalid("elements do not form a coset".into()));
        }
        Ok(set)
    }

    pub fn kernel_dim(&self) -> usize {
        self.kernel_basis.len()
    }

    /// `2^dim` when solvable (saturating at `u128::MAX`), else 0.
    pub fn count(&self) -> u128 {
        if !self.solvable {
            return 0;
        }
        1u128
            .checked_shl(self.kernel_dim() as u32)
            .unwrap_or(u128::MAX)
    }

    pub fn enumerate(&self) -> Result<Vec<Elt>> {
        self.enumerate_capped(DEFAULT_ENUM_CAP)
    }

    /// All solutions in canonical order, refusing sets larger than `cap`.
    pub fn enumerate_capped(&self, cap: u128) -> Result<Vec<Elt>> {
        let count = self.count();
        if count > cap {
            return Err(Error::EnumerationCap { count, cap });
        }
        let Some(x0) = &self.particular else {
            return Ok(Vec::new());
        };
        let mut out: Vec<Elt> = span_of(&self.ctx, &self.kernel_basis)
            .iter()
            .map(|z| z + x0)
            .collect();
        out.sort();
        Ok(out)
    }

    fn echelon(&self) -> XorBasis {
        let mut b = XorBasis::new();
        for z in &self.kernel_basis {
            b.insert(z.words());
        }
        b
    }

    pub fn contains(&self, x: &Elt) -> bool {
        match &self.particular {
            None => false,
            Some(x0) => self.echelon().contains((x + x0).words()),
        }
    }

    /// Set equality without enumeration: same kernel span and same coset.
    pub fn same_set(&self, other: &SolutionSet) -> bool {
        match (&self.particular, &other.particular) {
            (None, None) => true,
            (Some(p), Some(q)) => {
                let mine = self.echelon();
                let theirs = other.echelon();
                mine.rank() == theirs.rank()
                    && mine.reduced_rows() == theirs.reduced_rows()
                    && mine.contains((p + q).words())
            }
            _ => false,
        }
    }

    pub fn to_record(&self) -> SolutionRecord {
        SolutionRecord {
            solvable: self.solvable,
            particular: self.particular.as_ref().map(Elt::to_hex),
            kernel_basis: self.kernel_basis.iter().map(Elt::to_hex).collect(),
            count: self.count(),
            ambient: self.ctx.info(),
        }
    }
}

impl Serialize for SolutionSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_record().serialize(s)
    }
}

impl fmt::Debug for SolutionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SolutionSet")
            .field("solvable", &self.solvable)
            .field("particular", &self.particular)
            .field("kernel_basis", &self.kernel_basis)
            .finish()
    }
}

/// An independent subset of `gens`, in order.
pub(crate) fn independent(gens: impl IntoIterator<Item = Elt>) -> Vec<Elt> {
    let mut echelon = XorBasis::new();
    gens.into_iter()
        .filter(|g| echelon.insert(g.words()))
        .collect()
}

/// `a / (xi + 1)`
fn over_xi_plus_one(a: &Elt, xi: &Elt) -> Elt {
    a / &(xi + &a.ctx().one())
}

/// `T_2(x) = x + x^2`
fn t2(x: &Elt) -> Elt {
    x + &x.square()
}

/// `T_small^big` when `small | big`; all call sites hand in valid divisors.
fn tr(x: &Elt, small: usize, big: usize) -> Elt {
    x.tmap(small, big).expect("divisor checked by caller")
}

/// Basis of `T_s o T_2 (GF(2^d)) = {b + b^(2^s)}` by rank-certified selection.
fn t_s_t2_image(ctx: &Arc<FieldCtx>, d: usize, s: usize) -> Result<Vec<Elt>> {
    let basis = ctx.subfield_basis(d)?;
    Ok(independent(basis.elems.iter().map(|b| tr(&t2(b), 1, s))))
}

/// GF(2)-basis of `{x in GF(2^n) : T_l^k(x) = 0}` in the canonical ambient
/// field of `(n, k)`.
pub fn kernel_tlk(n: usize, k: usize, l: usize) -> Result<Vec<Elt>> {
    kernel_tlk_in(&ambient(n, k)?, n, k, l)
}

/// [`kernel_tlk`] inside a caller-chosen field containing GF(2^n).
pub fn kernel_tlk_in(ctx: &Arc<FieldCtx>, n: usize, k: usize, l: usize) -> Result<Vec<Elt>> {
    check_positive(n, k, l)?;
    check_divides(l, k)?;
    if k > n {
        return Err(Error::KExceedsN { n, k });
    }
    let d = gcd(n, k);
    let g = gcd(d, l);
    if odd(k / lcm(d, l)) {
        t_s_t2_image(ctx, d, g)
    } else {
        Ok(ctx.subfield_basis(d)?.elems)
    }
}

/// Predicate for `T_l^k(x) = a` having a solution in GF(2^n):
/// `T_d^n(a)` in GF(2^gcd(d,l)) when `k/lcm(d,l)` is odd, `T_d^n(a) = 0` otherwise.
pub fn solvable_tlk(inst: &Instance) -> Result<bool> {
    let c = tr(&inst.a, inst.d, inst.n);
    if inst.kernel_parity_odd() {
        c.in_subfield(inst.g)
    } else {
        Ok(c.is_zero())
    }
}

/// `x^(2^k) + x = a` over GF(2^n), `1 <= k < n`.
pub fn solve_artin_schreier(n: usize, k: usize, a: &Elt) -> Result<SolutionSet> {
    solve_artin_schreier_with(n, k, a, 0)
}

pub fn solve_artin_schreier_with(
    n: usize,
    k: usize,
    a: &Elt,
    xi_choice: usize,
) -> Result<SolutionSet> {
    check_positive(n, k, 1)?;
    if k >= n {
        return Err(Error::ArtinSchreierRange { n, k });
    }
    check_rhs(n, k, a)?;
    let ctx = a.ctx();
    let d = gcd(n, k);
    let kernel = ctx.subfield_basis(d)?.elems;
    if !tr(a, d, n).is_zero() {
        return Ok(SolutionSet::unsolvable(ctx, kernel));
    }
    if a.is_zero() {
        return Ok(SolutionSet::solvable(ctx.zero(), kernel));
    }
    let xi = ctx.mu_xi(n, xi_choice)?;
    let x0 = as_particular(n, k, a, &xi);
    Ok(SolutionSet::solvable(x0, kernel))
}

/// A solution of `x^(2^k) + x = a` in the closure; in GF(2^n) once
/// `T_d^n(a) = 0`. `xi` may come from `mu_(2^n+1)`, or from `mu_(2^d+1)` when
/// `k/d` is even.
fn as_particular(n: usize, k: usize, a: &Elt, xi: &Elt) -> Elt {
    let d = gcd(n, k);
    if odd(k / d) {
        tr(&over_xi_plus_one(a, xi), k, lcm(n, k))
    } else {
        // Same GF(2^n)-solutions as x^(2^(n-k)) + x = a^(2^(n-k)), whose
        // exponent ratio (n-k)/d is odd.
        let a2 = a.frob(n - k);
        tr(&over_xi_plus_one(&a2, xi), n - k, lcm(n, n - k))
    }
}

/// `x^2 + x = a` over GF(2^n): `x0 = T_n(a / (xi + 1))` and `x0 + 1`.
pub fn solve_quadratic(n: usize, a: &Elt) -> Result<SolutionSet> {
    solve_quadratic_with(n, a, 0)
}

pub fn solve_quadratic_with(n: usize, a: &Elt, xi_choice: usize) -> Result<SolutionSet> {
    check_positive(n, 1, 1)?;
    check_rhs(n, 1, a)?;
    let ctx = a.ctx();
    let kernel = vec![ctx.one()];
    if !a.t(n).is_zero() {
        return Ok(SolutionSet::unsolvable(ctx, kernel));
    }
    if a.is_zero() {
        return Ok(SolutionSet::solvable(ctx.zero(), kernel));
    }
    let xi = ctx.mu_xi(n, xi_choice)?;
    Ok(SolutionSet::solvable(over_xi_plus_one(a, &xi).t(n), kernel))
}

/// `T_k(x) = x + x^2 + ... + x^(2^(k-1)) = a` over GF(2^n), `k <= n`.
pub fn solve_tk(n: usize, k: usize, a: &Elt) -> Result<SolutionSet> {
    solve_tk_with(n, k, a, 0)
}

pub fn solve_tk_with(n: usize, k: usize, a: &Elt, xi_choice: usize) -> Result<SolutionSet> {
    check_positive(n, k, 1)?;
    if k > n {
        return Err(Error::KExceedsN { n, k });
    }
    check_rhs(n, k, a)?;
    let ctx = a.ctx();
    let d = gcd(n, k);
    let c = tr(a, d, n);
    let (solvable, kernel) = if odd(k / d) {
        (c.is_zero() || c.is_one(), t_s_t2_image(ctx, d, 1)?)
    } else {
        (c.is_zero(), ctx.subfield_basis(d)?.elems)
    };
    if !solvable {
        return Ok(SolutionSet::unsolvable(ctx, kernel));
    }
    if a.is_zero() {
        return Ok(SolutionSet::solvable(ctx.zero(), kernel));
    }
    let xi = ctx.mu_xi(n, xi_choice)?;
    Ok(SolutionSet::solvable(
        t2(&as_particular(n, k, a, &xi)),
        kernel,
    ))
}

/// `T_l^k(x) = a` over GF(2^n), `k <= n`.
pub fn solve_tlk(inst: &Instance) -> Result<SolutionSet> {
    solve_tlk_with(inst, 0)
}

pub fn solve_tlk_with(inst: &Instance, xi_choice: usize) -> Result<SolutionSet> {
    let Instance { n, k, l, d, g, .. } = *inst;
    if k > n {
        return Err(Error::KExceedsN { n, k });
    }
    let ctx = inst.ctx();
    let a = &inst.a;
    let kernel = kernel_tlk_in(ctx, n, k, l)?;
    if !solvable_tlk(inst)? {
        return Ok(SolutionSet::unsolvable(ctx, kernel));
    }
    if a.is_zero() {
        return Ok(SolutionSet::solvable(ctx.zero(), kernel));
    }
    let x0 = if inst.kernel_parity_odd() && odd(k / d) {
        let xi = ctx.mu_xi(n, xi_choice)?;
        tr(&t2(&as_particular(n, k, a, &xi)), 1, l)
    } else if inst.kernel_parity_odd() {
        // k/d even: y0 solves T_l^k(y) = a + T_d^n(a), z0 in GF(2^d) solves
        // T_l^k(z) = T_d^n(a); both with xi on mu_(2^d+1).
        let xi = ctx.mu_xi(d, xi_choice)?;
        let y0 = tr(&t2(&as_particular(n, k, a, &xi)), 1, l);
        let c = tr(a, d, n);
        let z0 = tr(&t2(&over_xi_plus_one(&c, &xi)), 1, g);
        &y0 + &z0
    } else {
        let xi = ctx.mu_xi(d, xi_choice)?;
        tr(&t2(&as_particular(n, k, a, &xi)), 1, l)
    };
    Ok(SolutionSet::solvable(x0, kernel))
}

/// All `2^(k-l)` roots of `T_l^k(x) = a` in the algebraic closure, realized
/// in GF(2^(2 lcm(n,k))).
pub fn solve_closure(n: usize, k: usize, l: usize, a: &Elt) -> Result<SolutionSet> {
    solve_closure_with(n, k, l, a, 0)
}

pub fn solve_closure_with(
    n: usize,
    k: usize,
    l: usize,
    a: &Elt,
    xi_choice: usize,
) -> Result<SolutionSet> {
    check_positive(n, k, l)?;
    check_divides(l, k)?;
    check_rhs(n, k, a)?;
    let ctx = a.ctx();
    let big_l = lcm(n, k);
    let kernel = t_s_t2_image(ctx, k, l)?;
    if a.is_zero() {
        return Ok(SolutionSet::solvable(ctx.zero(), kernel));
    }
    let xi = ctx.mu_xi(big_l, xi_choice)?;
    let x0 = tr(&tr(&t2(&over_xi_plus_one(a, &xi)), k, big_l), 1, l);
    Ok(SolutionSet::solvable(x0, kernel))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MapClass {
    Permutation,
    TwoToOne,
    Other,
}

impl fmt::Display for MapClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MapClass::Permutation => "permutation",
            MapClass::TwoToOne => "2-to-1",
            MapClass::Other => "other",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub tag: MapClass,
    pub kernel_dim: usize,
}

/// Classifies `T_l^k` on GF(2^n) from `n, k, l` alone; `k > n` is allowed.
pub fn classify(n: usize, k: usize, l: usize) -> Result<Classification> {
    check_positive(n, k, l)?;
    check_divides(l, k)?;
    let d = gcd(n, k);
    let g = gcd(d, l);
    let q = k / l;
    let permutation = odd(q) && l % d == 0;
    let two_to_one =
        (d == 1 && !odd(q)) || (d == 2 && odd(l) && k % (2 * l) == 0 && odd(k / (2 * l)));
    let kernel_dim = if odd(k / lcm(d, l)) { d - g } else { d };
    let tag = if permutation {
        MapClass::Permutation
    } else if two_to_one {
        MapClass::TwoToOne
    } else {
        MapClass::Other
    };
    debug_assert_eq!(tag == MapClass::Permutation, kernel_dim == 0);
    debug_assert_eq!(tag == MapClass::TwoToOne, kernel_dim == 1);
    Ok(Classification { tag, kernel_dim })
}
