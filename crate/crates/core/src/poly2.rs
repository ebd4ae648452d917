//! Polynomials over GF(2) of arbitrary degree.
//!
//! Coefficients are packed little-endian into `u64` words: bit `i` of the
//! polynomial is bit `i % 64` of word `i / 64`. The word vector never carries
//! trailing zero words, so derived equality is polynomial equality.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest degree accepted by [`canonical_irreducible`].
pub const MAX_MODULUS_DEGREE: usize = 1024;

#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitPoly {
    words: Vec<u64>,
}

impl BitPoly {
    pub fn zero() -> Self {
        BitPoly { words: Vec::new() }
    }

    pub fn one() -> Self {
        BitPoly { words: vec![1] }
    }

    /// The indeterminate `X`.
    pub fn x() -> Self {
        BitPoly { words: vec![2] }
    }

    pub fn monomial(i: usize) -> Self {
        let mut words = vec![0; i / 64 + 1];
        words[i / 64] = 1 << (i % 64);
        BitPoly { words }
    }

    pub fn from_u64(v: u64) -> Self {
        Self::from_words(vec![v])
    }

    pub fn from_words(mut words: Vec<u64>) -> Self {
        trim(&mut words);
        BitPoly { words }
    }

    /// Builds a polynomial from the exponents of its nonzero terms.
    pub fn from_exponents(exps: &[usize]) -> Self {
        let mut p = BitPoly::zero();
        for &e in exps {
            p.flip(e);
        }
        p
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn into_words(self) -> Vec<u64> {
        self.words
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.words == [1]
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn deg(&self) -> Option<usize> {
        deg_words(&self.words)
    }

    pub fn bit(&self, i: usize) -> bool {
        self.words
            .get(i / 64)
            .is_some_and(|w| (w >> (i % 64)) & 1 == 1)
    }

    pub fn flip(&mut self, i: usize) {
        if self.words.len() <= i / 64 {
            self.words.resize(i / 64 + 1, 0);
        }
        self.words[i / 64] ^= 1 << (i % 64);
        trim(&mut self.words);
    }

    pub fn weight(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn add(&self, other: &BitPoly) -> BitPoly {
        let (long, short) = if self.words.len() >= other.words.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut words = long.words.clone();
        for (w, s) in words.iter_mut().zip(&short.words) {
            *w ^= s;
        }
        BitPoly::from_words(words)
    }

    pub fn mul(&self, other: &BitPoly) -> BitPoly {
        BitPoly::from_words(mul_words(&self.words, &other.words))
    }

    pub fn square(&self) -> BitPoly {
        BitPoly::from_words(square_words(&self.words))
    }

    pub fn shl(&self, s: usize) -> BitPoly {
        if self.is_zero() {
            return BitPoly::zero();
        }
        let mut out = vec![0; self.words.len() + s / 64 + 1];
        xor_shifted(&mut out, &self.words, s);
        BitPoly::from_words(out)
    }

    pub fn divmod(&self, divisor: &BitPoly) -> Result<(BitPoly, BitPoly)> {
        let dq = divisor.deg().ok_or(Error::DivisionByZero)?;
        let mut rem = self.words.clone();
        let mut quot = vec![0u64; self.words.len()];
        while let Some(dr) = deg_words(&rem) {
            if dr < dq {
                break;
            }
            let s = dr - dq;
            quot[s / 64] ^= 1 << (s % 64);
            xor_shifted(&mut rem, &divisor.words, s);
        }
        Ok((BitPoly::from_words(quot), BitPoly::from_words(rem)))
    }

    pub fn rem(&self, divisor: &BitPoly) -> Result<BitPoly> {
        Ok(self.divmod(divisor)?.1)
    }

    /// Monic gcd by Euclid. Over GF(2) every nonzero polynomial is monic.
    pub fn gcd(&self, other: &BitPoly) -> Result<BitPoly> {
        if self.is_zero() && other.is_zero() {
            return Err(Error::GcdOfZeros);
        }
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b)?;
            a = b;
            b = r;
        }
        Ok(a)
    }

    /// Rabin's test: `X^(2^m) = X (mod p)` and
    /// `gcd(X^(2^(m/r)) - X mod p, p) = 1` for every prime `r | m`.
    pub fn is_irreducible(&self) -> Result<bool> {
        let m = match self.deg() {
            None | Some(0) => return Err(Error::ConstantPolynomial),
            Some(m) => m,
        };
        let red = Reducer::new(self);
        let x_mod = red.reduce(BitPoly::x().words);
        let primes = prime_factors(m);
        let mut frob_at = Vec::with_capacity(primes.len());
        let mut cur = x_mod.clone();
        for i in 1..=m {
            cur = red.reduce(square_words(&cur));
            for &r in &primes {
                if i == m / r {
                    frob_at.push((r, cur.clone()));
                }
            }
        }
        if cur != x_mod {
            return Ok(false);
        }
        for (_, pw) in frob_at {
            let mut h = pw;
            for (w, x) in h.iter_mut().zip(&x_mod) {
                *w ^= x;
            }
            let h = BitPoly::from_words(h);
            if !h.gcd(self)?.is_one() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn to_hex(&self) -> String {
        let mut s = String::from("0x");
        match self.words.split_last() {
            None => s.push('0'),
            Some((top, rest)) => {
                s.push_str(&format!("{top:x}"));
                for w in rest.iter().rev() {
                    s.push_str(&format!("{w:016x}"));
                }
            }
        }
        s
    }

    pub fn from_hex(s: &str) -> Result<BitPoly> {
        let t = s.trim();
        let digits = t
            .strip_prefix("0x")
            .or_else(|| t.strip_prefix("0X"))
            .unwrap_or(t);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(Error::Parse(s.to_string()));
        }
        let bytes = digits.as_bytes();
        let mut words = Vec::with_capacity(bytes.len() / 16 + 1);
        let mut end = bytes.len();
        while end > 0 {
            let start = end.saturating_sub(16);
            let chunk = std::str::from_utf8(&bytes[start..end]).expect("ascii");
            words.push(u64::from_str_radix(chunk, 16).map_err(|_| Error::Parse(s.to_string()))?);
            end = start;
        }
        Ok(BitPoly::from_words(words))
    }
}

/// Ordering by integer encoding.
impl Ord for BitPoly {
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_words(&self.words, &other.words)
    }
}

impl PartialOrd for BitPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl fmt::Debug for BitPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitPoly({})", self.to_hex())
    }
}

impl FromStr for BitPoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BitPoly::from_hex(s)
    }
}

impl Serialize for BitPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for BitPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        BitPoly::from_hex(&s).map_err(serde::de::Error::custom)
    }
}

/// The irreducible polynomial of degree `m` with the smallest integer encoding.
pub fn canonical_irreducible(m: usize) -> Result<BitPoly> {
    if m == 0 || m > MAX_MODULUS_DEGREE {
        return Err(Error::DegreeOutOfRange {
            m,
            max: MAX_MODULUS_DEGREE,
        });
    }
    if m == 1 {
        return Ok(BitPoly::x());
    }
    // For m >= 2 an irreducible polynomial has constant term 1 (X does not
    // divide it) and odd weight (X + 1 does not divide it), so scanning odd
    // tails in increasing order and skipping even weights keeps minimality.
    let top = BitPoly::monomial(m);
    let mut tail: u64 = 1;
    loop {
        if (tail.count_ones() + 1) % 2 == 1 {
            let cand = top.add(&BitPoly::from_u64(tail));
            if cand.is_irreducible()? {
                return Ok(cand);
            }
        }
        tail += 2;
    }
}

fn prime_factors(mut m: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            out.push(p);
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

// ---------------------------------------------------------------------------
// Word-level kernels shared with the field module.
// ---------------------------------------------------------------------------

pub(crate) fn trim(words: &mut Vec<u64>) {
    while words.last() == Some(&0) {
        words.pop();
    }
}

pub(crate) fn deg_words(words: &[u64]) -> Option<usize> {
    words
        .iter()
        .rposition(|&w| w != 0)
        .map(|i| i * 64 + 63 - words[i].leading_zeros() as usize)
}

pub(crate) fn cmp_words(a: &[u64], b: &[u64]) -> Ordering {
    let la = a.iter().rposition(|&w| w != 0).map_or(0, |i| i + 1);
    let lb = b.iter().rposition(|&w| w != 0).map_or(0, |i| i + 1);
    la.cmp(&lb)
        .then_with(|| a[..la].iter().rev().cmp(b[..lb].iter().rev()))
}

/// `dst ^= src << shift`, ignoring bits that fall beyond `dst`.
pub(crate) fn xor_shifted(dst: &mut [u64], src: &[u64], shift: usize) {
    let ws = shift / 64;
    let bs = shift % 64;
    for (i, &w) in src.iter().enumerate() {
        let j = i + ws;
        if j < dst.len() {
            dst[j] ^= w << bs;
        }
        if bs != 0 && j + 1 < dst.len() {
            dst[j + 1] ^= w >> (64 - bs);
        }
    }
}

/// Carry-less 64x64 -> 128 bit product.
#[inline]
pub(crate) fn clmul64(a: u64, b: u64) -> u128 {
    let a = a as u128;
    let mut acc = 0u128;
    let mut b = b;
    while b != 0 {
        let i = b.trailing_zeros();
        acc ^= a << i;
        b &= b - 1;
    }
    acc
}

pub(crate) fn mul_words(a: &[u64], b: &[u64]) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            let p = clmul64(x, y);
            out[i + j] ^= p as u64;
            out[i + j + 1] ^= (p >> 64) as u64;
        }
    }
    out
}

/// Spreads the 32 bits of `x` to the even positions of a `u64`.
#[inline]
fn spread32(x: u32) -> u64 {
    let mut v = x as u64;
    v = (v | (v << 16)) & 0x0000_FFFF_0000_FFFF;
    v = (v | (v << 8)) & 0x00FF_00FF_00FF_00FF;
    v = (v | (v << 4)) & 0x0F0F_0F0F_0F0F_0F0F;
    v = (v | (v << 2)) & 0x3333_3333_3333_3333;
    v = (v | (v << 1)) & 0x5555_5555_5555_5555;
    v
}

pub(crate) fn square_words(a: &[u64]) -> Vec<u64> {
    let mut out = Vec::with_capacity(2 * a.len());
    for &w in a {
        out.push(spread32(w as u32));
        out.push(spread32((w >> 32) as u32));
    }
    out
}

/// Reduction modulo a fixed polynomial of degree `m >= 1`.
///
/// When the modulus is `X^m + r` with `deg r <= m/2` the high part is folded
/// back with one carry-less product per round; otherwise reduction goes bit
/// by bit from the top.
#[derive(Clone, Debug)]
pub(crate) struct Reducer {
    m: usize,
    modulus: Vec<u64>,
    tail: Vec<u64>,
    fold: bool,
}

impl Reducer {
    pub(crate) fn new(modulus: &BitPoly) -> Self {
        let m = modulus.deg().expect("nonzero modulus");
        assert!(m >= 1, "modulus must be non-constant");
        let mut tail = modulus.words.clone();
        tail[m / 64] ^= 1 << (m % 64);
        trim(&mut tail);
        let fold = deg_words(&tail).is_none_or(|t| t <= m / 2);
        Reducer {
            m,
            modulus: modulus.words.clone(),
            tail,
            fold,
        }
    }

    pub(crate) fn width(&self) -> usize {
        self.m.div_ceil(64)
    }

    /// Reduces `buf` modulo the modulus; the result has exactly `width()` words.
    pub(crate) fn reduce(&self, mut buf: Vec<u64>) -> Vec<u64> {
        let m = self.m;
        let width = self.width();
        if self.fold {
            loop {
                match deg_words(&buf) {
                    Some(d) if d >= m => {}
                    _ => break,
                }
                let hi = shr_bits(&buf, m);
                truncate_bits(&mut buf, m);
                let prod = mul_words(&hi, &self.tail);
                if buf.len() < prod.len() {
                    buf.resize(prod.len(), 0);
                }
                for (b, p) in buf.iter_mut().zip(&prod) {
                    *b ^= p;
                }
            }
        } else if let Some(d) = deg_words(&buf) {
            for i in (m..=d).rev() {
                if (buf[i / 64] >> (i % 64)) & 1 == 1 {
                    xor_shifted(&mut buf, &self.modulus, i - m);
                }
            }
        }
        buf.resize(width, 0);
        buf
    }
}

fn shr_bits(words: &[u64], s: usize) -> Vec<u64> {
    let ws = s / 64;
    let bs = s % 64;
    if ws >= words.len() {
        return Vec::new();
    }
    let src = &words[ws..];
    let mut out = Vec::with_capacity(src.len());
    for i in 0..src.len() {
        let lo = src[i] >> bs;
        let hi = if bs != 0 && i + 1 < src.len() {
            src[i + 1] << (64 - bs)
        } else {
            0
        };
        out.push(lo | hi);
    }
    out
}

fn truncate_bits(words: &mut Vec<u64>, m: usize) {
    let full = m / 64;
    let rem = m % 64;
    if rem == 0 {
        words.truncate(full);
    } else {
        words.truncate(full + 1);
        if let Some(w) = words.get_mut(full) {
            *w &= (1u64 << rem) - 1;
        }
    }
}
