//! Closed-form roots of the partial-trace equations
//! `T_l^k(x) = x + x^(2^l) + ... + x^(2^(l(k/l - 1))) = a` over binary fields,
//! both in the algebraic closure and inside GF(2^n), together with
//! independent brute-force and linear-algebra oracles.
//!
//! Every instance `(n, k, l, a)` is solved inside one ambient field of degree
//! `2 * lcm(n, k)`, which contains every subfield and unit circle the solution
//! formulas need.

pub mod bench;
pub mod error;
pub mod field;
pub mod gf2;
pub mod oracle;
pub mod poly2;
pub mod solver;

pub use error::{Error, Result};
pub use field::{make_ctx, CtxInfo, Elt, FieldCtx, SubfieldBasis};
pub use poly2::{canonical_irreducible, BitPoly};
pub use solver::{Classification, Instance, MapClass, SolutionSet};

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}
