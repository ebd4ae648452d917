//! The ambient field GF(2^m) in a polynomial basis, its Frobenius powers,
//! subfields and the partial trace maps.
//!
//! A subfield GF(2^n) (n | m) is never given its own representation: its
//! elements are the ambient elements fixed by `x -> x^(2^n)`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul};
use std::sync::{Arc, Mutex, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gf2::XorBasis;
use crate::poly2::{self, canonical_irreducible, BitPoly, Reducer};

/// Seed of the combination stream `mu_xi` falls back to once monomials run out.
const XI_STREAM_SEED: u64 = 0x006d_755f_7869;

/// GF(2^m) defined by an irreducible modulus of degree `m`.
pub struct FieldCtx {
    m: usize,
    modulus: BitPoly,
    red: Reducer,
    subfields: Vec<OnceLock<Arc<SubfieldData>>>,
    xi_cache: Mutex<HashMap<(usize, usize), Vec<u64>>>,
}

/// Cached coordinates for one subfield: the basis and its echelon form.
struct SubfieldData {
    basis: Vec<Vec<u64>>,
    echelon: XorBasis,
}

/// Serializable `{m, modulus}` description of a context.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct CtxInfo {
    pub m: usize,
    pub modulus: BitPoly,
}

fn canonical_cache() -> &'static Mutex<HashMap<usize, Arc<FieldCtx>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<FieldCtx>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Validated context; `None` selects the canonical modulus (cached per degree).
pub fn make_ctx(m: usize, modulus: Option<BitPoly>) -> Result<Arc<FieldCtx>> {
    match modulus {
        None => FieldCtx::canonical(m),
        Some(p) => FieldCtx::build(m, Some(p)),
    }
}

impl FieldCtx {
    /// Shared context over the canonical modulus of degree `m`.
    pub fn canonical(m: usize) -> Result<Arc<FieldCtx>> {
        let mut cache = canonical_cache().lock().expect("canonical cache poisoned");
        if let Some(ctx) = cache.get(&m) {
            return Ok(ctx.clone());
        }
        let ctx = FieldCtx::build(m, None)?;
        cache.insert(m, ctx.clone());
        Ok(ctx)
    }

    /// Fresh, uncached context. Used where construction cost must be measured.
    pub fn build(m: usize, modulus: Option<BitPoly>) -> Result<Arc<FieldCtx>> {
        if m == 0 {
            return Err(Error::NonPositive("m"));
        }
        let modulus = match modulus {
            None => canonical_irreducible(m)?,
            Some(p) => {
                if p.deg() != Some(m) || !p.is_irreducible()? {
                    return Err(Error::BadModulus {
                        m,
                        modulus: p.to_hex(),
                    });
                }
                p
            }
        };
        let red = Reducer::new(&modulus);
        Ok(Arc::new(FieldCtx {
            m,
            modulus,
            red,
            subfields: (0..=m).map(|_| OnceLock::new()).collect(),
            xi_cache: Mutex::new(HashMap::new()),
        }))
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn modulus(&self) -> &BitPoly {
        &self.modulus
    }

    pub fn info(&self) -> CtxInfo {
        CtxInfo {
            m: self.m,
            modulus: self.modulus.clone(),
        }
    }

    fn width(&self) -> usize {
        self.red.width()
    }

    /// Same field: identical degree and modulus.
    pub fn same_as(&self, other: &FieldCtx) -> bool {
        std::ptr::eq(self, other) || (self.m == other.m && self.modulus == other.modulus)
    }

    fn wrap(self: &Arc<Self>, w: Vec<u64>) -> Elt {
        debug_assert_eq!(w.len(), self.width());
        Elt {
            ctx: self.clone(),
            w,
        }
    }

    pub fn zero(self: &Arc<Self>) -> Elt {
        self.wrap(vec![0; self.width()])
    }

    pub fn one(self: &Arc<Self>) -> Elt {
        let mut w = vec![0; self.width()];
        w[0] = 1;
        self.wrap(w)
    }

    /// `X^j` reduced modulo the modulus.
    pub fn monomial(self: &Arc<Self>, j: usize) -> Elt {
        self.wrap(self.red.reduce(BitPoly::monomial(j).into_words()))
    }

    /// Element with the given polynomial-basis coordinates; rejects `deg >= m`.
    pub fn elt(self: &Arc<Self>, p: &BitPoly) -> Result<Elt> {
        if let Some(deg) = p.deg() {
            if deg >= self.m {
                return Err(Error::ElementTooWide { deg, m: self.m });
            }
        }
        let mut w = p.words().to_vec();
        w.resize(self.width(), 0);
        Ok(self.wrap(w))
    }

    pub fn from_hex(self: &Arc<Self>, s: &str) -> Result<Elt> {
        self.elt(&BitPoly::from_hex(s)?)
    }

    /// Moves an element of a structurally identical context into this one.
    pub fn import(self: &Arc<Self>, x: &Elt) -> Result<Elt> {
        self.check(&x.ctx)?;
        Ok(self.wrap(x.w.clone()))
    }

    fn check(&self, other: &FieldCtx) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::ContextMismatch {
                left: self.m,
                right: other.m,
            })
        }
    }

    fn check_divides(&self, n: usize) -> Result<()> {
        if n == 0 || self.m % n != 0 {
            Err(Error::NotASubfield { sub: n, m: self.m })
        } else {
            Ok(())
        }
    }

    fn mul_words(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        self.red.reduce(poly2::mul_words(a, b))
    }

    fn square_words(&self, a: &[u64]) -> Vec<u64> {
        self.red.reduce(poly2::square_words(a))
    }

    fn subfield_data(self: &Arc<Self>, n: usize) -> Result<Arc<SubfieldData>> {
        self.check_divides(n)?;
        Ok(self.subfields[n]
            .get_or_init(|| Arc::new(self.compute_subfield(n)))
            .clone())
    }

    fn compute_subfield(self: &Arc<Self>, n: usize) -> SubfieldData {
        let mut echelon = XorBasis::new();
        let mut basis: Vec<Vec<u64>> = Vec::with_capacity(n);
        for j in 0..self.m {
            if basis.len() == n {
                break;
            }
            let t = self
                .monomial(j)
                .rel_trace(n)
                .expect("n divides m was checked");
            if echelon.insert(&t.w) {
                basis.push(t.w);
            }
        }
        assert_eq!(basis.len(), n, "relative trace failed to reach rank {n}");
        // Put 1 first: swap it in for the first vector whose coefficient in
        // the expansion of 1 is nonzero, then move it to the front.
        let one = self.one();
        let c = echelon.coords(&one.w).expect("1 lies in every subfield");
        let first = (0..n)
            .find(|&i| (c[i / 64] >> (i % 64)) & 1 == 1)
            .expect("1 is nonzero");
        if basis[first] != one.w || first != 0 {
            basis.remove(first);
            basis.insert(0, one.w.clone());
        }
        let mut echelon = XorBasis::new();
        for b in &basis {
            let fresh = echelon.insert(b);
            assert!(fresh, "normalized subfield basis lost rank");
        }
        SubfieldData { basis, echelon }
    }

    /// A GF(2)-basis of GF(2^n) inside this field, 1 first.
    pub fn subfield_basis(self: &Arc<Self>, n: usize) -> Result<SubfieldBasis> {
        let data = self.subfield_data(n)?;
        Ok(SubfieldBasis {
            n,
            elems: data.basis.iter().map(|w| self.wrap(w.clone())).collect(),
        })
    }

    /// Coordinates of `x` over `subfield_basis(n)`, or `None` if `x` is outside GF(2^n).
    pub fn subfield_coords(self: &Arc<Self>, n: usize, x: &Elt) -> Result<Option<Vec<u64>>> {
        self.check(&x.ctx)?;
        let data = self.subfield_data(n)?;
        Ok(data.echelon.coords(&x.w))
    }

    /// Seeded pseudorandom element of GF(2^n).
    pub fn sample_subfield(self: &Arc<Self>, n: usize, seed: u64) -> Result<Elt> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_subfield_with(n, &mut rng)
    }

    pub fn sample_subfield_with<R: Rng>(self: &Arc<Self>, n: usize, rng: &mut R) -> Result<Elt> {
        let data = self.subfield_data(n)?;
        let mut acc = vec![0u64; self.width()];
        for b in &data.basis {
            if rng.gen::<bool>() {
                for (a, x) in acc.iter_mut().zip(b) {
                    *a ^= x;
                }
            }
        }
        Ok(self.wrap(acc))
    }

    /// Uniform element of the whole field.
    pub fn sample_with<R: Rng>(self: &Arc<Self>, rng: &mut R) -> Elt {
        let mut w: Vec<u64> = (0..self.width()).map(|_| rng.gen()).collect();
        let top = self.m % 64;
        if top != 0 {
            *w.last_mut().expect("width >= 1") &= (1u64 << top) - 1;
        }
        self.wrap(w)
    }

    /// All 2^n elements of GF(2^n) in canonical (sorted) order.
    pub fn subfield_elements(self: &Arc<Self>, n: usize) -> Result<Vec<Elt>> {
        if n > 24 {
            return Err(Error::EnumerationGuard { n, max: 24 });
        }
        let mut out = self.subfield_basis(n)?.span();
        out.sort();
        Ok(out)
    }

    /// `xi = s^(2^M - 1)` for an `s` in GF(2^(2M)) \ GF(2^M), so that
    /// `xi^(2^M + 1) = 1` and `xi != 1`.
    ///
    /// Candidates `s` are the projections onto GF(2^(2M)) of `X^0, X^1, ...`
    /// followed by a fixed seeded stream of random subfield elements; `choice`
    /// indexes the distinct values of `xi` this stream produces (modulo the
    /// `2^M` values that exist).
    pub fn mu_xi(self: &Arc<Self>, big_m: usize, choice: usize) -> Result<Elt> {
        if big_m == 0 || self.m % (2 * big_m) != 0 {
            return Err(Error::NotASubfield {
                sub: 2 * big_m,
                m: self.m,
            });
        }
        let choice = if big_m < usize::BITS as usize {
            choice % (1usize << big_m)
        } else {
            choice
        };
        if let Some(w) = self
            .xi_cache
            .lock()
            .expect("xi cache poisoned")
            .get(&(big_m, choice))
        {
            return Ok(self.wrap(w.clone()));
        }
        let mut seen: Vec<Elt> = Vec::new();
        let mut consider = |s: Elt| -> Option<Elt> {
            if s.is_zero() || s.in_subfield(big_m).expect("M | m") {
                return None;
            }
            let xi = &s.frob(big_m) * &s.inv().expect("s != 0");
            if seen.contains(&xi) {
                return None;
            }
            seen.push(xi);
            (seen.len() == choice + 1).then(|| seen[choice].clone())
        };
        let mut found = None;
        for j in 0..self.m {
            let s = self.monomial(j).rel_trace(2 * big_m)?;
            if let Some(xi) = consider(s) {
                found = Some(xi);
                break;
            }
        }
        if found.is_none() {
            let mut rng = ChaCha8Rng::seed_from_u64(XI_STREAM_SEED);
            for _ in 0..(1u32 << 24) {
                let s = self.sample_subfield_with(2 * big_m, &mut rng)?;
                if let Some(xi) = consider(s) {
                    found = Some(xi);
                    break;
                }
            }
        }
        let xi = found.ok_or_else(|| Error::Invalid(format!("no xi for M={big_m}")))?;
        self.xi_cache
            .lock()
            .expect("xi cache poisoned")
            .insert((big_m, choice), xi.w.clone());
        Ok(xi)
    }

    /// Embedding of GF(2^n)'s own polynomial basis (modulo
    /// `canonical_irreducible(n)`) into this field: the powers of the
    /// smallest root of that polynomial lying in GF(2^n). Found by search.
    pub fn subfield_poly_basis(self: &Arc<Self>, n: usize) -> Result<SubfieldPolyBasis> {
        const MAX: usize = 20;
        if n > MAX {
            return Err(Error::EnumerationGuard { n, max: MAX });
        }
        let p = canonical_irreducible(n)?;
        let root = self
            .subfield_elements(n)?
            .into_iter()
            .find(|y| eval_poly(&p, y).is_zero())
            .expect("an irreducible polynomial of degree n splits in GF(2^n)");
        let mut powers = Vec::with_capacity(n);
        let mut cur = self.one();
        let mut echelon = XorBasis::new();
        for _ in 0..n {
            assert!(echelon.insert(&cur.w));
            powers.push(cur.clone());
            cur = &cur * &root;
        }
        Ok(SubfieldPolyBasis {
            n,
            modulus: p,
            powers,
            echelon,
        })
    }
}

fn eval_poly(p: &BitPoly, y: &Elt) -> Elt {
    let mut acc = y.ctx.zero();
    for i in (0..=p.deg().unwrap_or(0)).rev() {
        acc = &acc * y;
        if p.bit(i) {
            acc = &acc + &y.ctx.one();
        }
    }
    acc
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{}) mod {}", self.m, self.modulus)
    }
}

/// A GF(2)-basis of a subfield GF(2^n), expressed in ambient coordinates.
#[derive(Clone, Debug)]
pub struct SubfieldBasis {
    pub n: usize,
    pub elems: Vec<Elt>,
}

impl SubfieldBasis {
    /// `sum_i c_i e_i` for the packed coefficient bits `c`.
    pub fn combine(&self, coeffs: &[u64]) -> Elt {
        let ctx = &self.elems[0].ctx;
        let mut acc = vec![0u64; ctx.width()];
        for (i, e) in self.elems.iter().enumerate() {
            if coeffs.get(i / 64).is_some_and(|w| (w >> (i % 64)) & 1 == 1) {
                for (a, x) in acc.iter_mut().zip(&e.w) {
                    *a ^= x;
                }
            }
        }
        ctx.wrap(acc)
    }

    /// Every element of the span, in Gray-code order.
    pub fn span(&self) -> Vec<Elt> {
        span_of(&self.elems[0].ctx, &self.elems)
    }
}

/// All `2^len` GF(2)-combinations of `gens` (Gray-code order).
pub(crate) fn span_of(ctx: &Arc<FieldCtx>, gens: &[Elt]) -> Vec<Elt> {
    let mut out = Vec::with_capacity(1 << gens.len());
    let mut cur = vec![0u64; ctx.width()];
    out.push(ctx.wrap(cur.clone()));
    for i in 1u64..(1u64 << gens.len()) {
        let flip = i.trailing_zeros() as usize;
        for (a, x) in cur.iter_mut().zip(&gens[flip].w) {
            *a ^= x;
        }
        out.push(ctx.wrap(cur.clone()));
    }
    out
}

/// Coordinates of GF(2^n) in its own polynomial basis `1, r, ..., r^(n-1)`.
#[derive(Clone, Debug)]
pub struct SubfieldPolyBasis {
    pub n: usize,
    pub modulus: BitPoly,
    pub powers: Vec<Elt>,
    echelon: XorBasis,
}

impl SubfieldPolyBasis {
    /// The root `r`; zero for `n = 1`, where the polynomial is `X`.
    pub fn root(&self) -> Elt {
        match self.powers.get(1) {
            Some(r) => r.clone(),
            None => self.powers[0].ctx.zero(),
        }
    }

    pub fn to_ambient(&self, p: &BitPoly) -> Result<Elt> {
        if let Some(deg) = p.deg() {
            if deg >= self.n {
                return Err(Error::ElementTooWide { deg, m: self.n });
            }
        }
        let ctx = &self.powers[0].ctx;
        let mut acc = ctx.zero();
        for (i, e) in self.powers.iter().enumerate() {
            if p.bit(i) {
                acc = &acc + e;
            }
        }
        Ok(acc)
    }

    /// `None` when `x` is outside GF(2^n).
    pub fn from_ambient(&self, x: &Elt) -> Option<BitPoly> {
        self.echelon.coords(&x.w).map(BitPoly::from_words)
    }
}

/// An element of a [`FieldCtx`].
///
/// The arithmetic operators panic when the operands belong to different
/// fields; the `try_*` methods report that as an error instead.
#[derive(Clone)]
pub struct Elt {
    ctx: Arc<FieldCtx>,
    w: Vec<u64>,
}

impl Elt {
    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn words(&self) -> &[u64] {
        &self.w
    }

    pub fn to_poly(&self) -> BitPoly {
        BitPoly::from_words(self.w.clone())
    }

    pub fn to_hex(&self) -> String {
        self.to_poly().to_hex()
    }

    pub fn is_zero(&self) -> bool {
        self.w.iter().all(|&x| x == 0)
    }

    pub fn is_one(&self) -> bool {
        self.w[0] == 1 && self.w[1..].iter().all(|&x| x == 0)
    }

    pub fn try_add(&self, other: &Elt) -> Result<Elt> {
        self.ctx.check(&other.ctx)?;
        let w = self.w.iter().zip(&other.w).map(|(a, b)| a ^ b).collect();
        Ok(self.ctx.wrap(w))
    }

    pub fn try_mul(&self, other: &Elt) -> Result<Elt> {
        self.ctx.check(&other.ctx)?;
        Ok(self.ctx.wrap(self.ctx.mul_words(&self.w, &other.w)))
    }

    pub fn try_div(&self, other: &Elt) -> Result<Elt> {
        self.try_mul(&other.inv()?)
    }

    pub fn square(&self) -> Elt {
        self.ctx.wrap(self.ctx.square_words(&self.w))
    }

    /// Inverse by the extended Euclidean algorithm.
    pub fn inv(&self) -> Result<Elt> {
        if self.is_zero() {
            return Err(Error::ZeroInverse);
        }
        let p = self.ctx.modulus.clone();
        let (mut r0, mut r1) = (p, self.to_poly());
        let (mut s0, mut s1) = (BitPoly::zero(), BitPoly::one());
        while !r1.is_zero() {
            let (q, r) = r0.divmod(&r1)?;
            let s = s0.add(&q.mul(&s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        debug_assert!(r0.is_one());
        let s = s0.rem(&self.ctx.modulus)?;
        self.ctx.elt(&s)
    }

    /// Square and multiply.
    pub fn pow(&self, e: u128) -> Elt {
        let mut acc = self.ctx.one();
        for i in (0..(128 - e.leading_zeros())).rev() {
            acc = acc.square();
            if (e >> i) & 1 == 1 {
                acc = &acc * self;
            }
        }
        acc
    }

    /// `x^(2^j)` by `j mod m` squarings.
    pub fn frob(&self, j: usize) -> Elt {
        let mut w = self.w.clone();
        for _ in 0..(j % self.ctx.m) {
            w = self.ctx.square_words(&w);
        }
        self.ctx.wrap(w)
    }

    /// `T_l^k(x) = sum_{i < k/l} x^(2^(l i))`.
    pub fn tmap(&self, l: usize, k: usize) -> Result<Elt> {
        if l == 0 || k == 0 {
            return Err(Error::NonPositive("l, k"));
        }
        if k % l != 0 {
            return Err(Error::NotADivisor { l, k });
        }
        let mut cur = self.w.clone();
        let mut acc = self.w.clone();
        let step = l % self.ctx.m;
        for _ in 1..(k / l) {
            for _ in 0..step {
                cur = self.ctx.square_words(&cur);
            }
            for (a, c) in acc.iter_mut().zip(&cur) {
                *a ^= c;
            }
        }
        Ok(self.ctx.wrap(acc))
    }

    /// Shorthand for the absolute-style trace `T_k = T_1^k`.
    pub fn t(&self, k: usize) -> Elt {
        self.tmap(1, k).expect("1 divides k")
    }

    /// Frobenius fixed-point test for GF(2^n).
    pub fn in_subfield(&self, n: usize) -> Result<bool> {
        self.ctx.check_divides(n)?;
        Ok(self.frob(n) == *self)
    }

    /// Relative trace `T_n^m` onto GF(2^n).
    pub fn rel_trace(&self, n: usize) -> Result<Elt> {
        self.ctx.check_divides(n)?;
        self.tmap(n, self.ctx.m)
    }
}

impl PartialEq for Elt {
    fn eq(&self, other: &Self) -> bool {
        self.w == other.w && self.ctx.same_as(&other.ctx)
    }
}

impl Eq for Elt {}

impl Hash for Elt {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.w.hash(state);
    }
}

/// Canonical order: by coefficient bits read as an integer.
impl Ord for Elt {
    fn cmp(&self, other: &Self) -> Ordering {
        poly2::cmp_words(&self.w, &other.w)
    }
}

impl PartialOrd for Elt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Elt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl fmt::Debug for Elt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@GF(2^{})", self.to_hex(), self.ctx.m)
    }
}

impl Serialize for Elt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl Add for &Elt {
    type Output = Elt;
    fn add(self, rhs: &Elt) -> Elt {
        self.try_add(rhs).expect("field mismatch in +")
    }
}

impl Mul for &Elt {
    type Output = Elt;
    fn mul(self, rhs: &Elt) -> Elt {
        self.try_mul(rhs).expect("field mismatch in *")
    }
}

impl Div for &Elt {
    type Output = Elt;
    fn div(self, rhs: &Elt) -> Elt {
        self.try_div(rhs).expect("division failed")
    }
}
