//! Ground-truth solvers that share no code path with the closed forms:
//! exhaustive search, Gaussian elimination on the matrix of `T_l^k` over a
//! subfield basis, and the classical half-trace solution of `x^2 + x = a`.

pub mod laws;
pub mod suite;

use crate::error::{Error, Result};
use crate::field::Elt;
pub use crate::gf2::Gf2Matrix;
use crate::solver::{ambient_degree, SolutionSet};

/// Largest `n` for which [`brute_solve`] will enumerate GF(2^n).
pub const BRUTE_MAX_N: usize = 20;

fn validate(n: usize, k: usize, l: usize, a: &Elt) -> Result<()> {
    if n == 0 || k == 0 || l == 0 {
        return Err(Error::NonPositive("n, k, l"));
    }
    if k % l != 0 {
        return Err(Error::NotADivisor { l, k });
    }
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

/// Every `x` in GF(2^n) with `T_l^k(x) = a`, in canonical order.
pub fn brute_solve(n: usize, k: usize, l: usize, a: &Elt) -> Result<Vec<Elt>> {
    if n > BRUTE_MAX_N {
        return Err(Error::EnumerationGuard {
            n,
            max: BRUTE_MAX_N,
        });
    }
    validate(n, k, l, a)?;
    let mut out = Vec::new();
    for x in a.ctx().subfield_basis(n)?.span() {
        if x.tmap(l, k)? == *a {
            out.push(x);
        }
    }
    out.sort();
    Ok(out)
}

/// The `n x n` matrix of `x -> T_l^k(x)` on GF(2^n) in subfield-basis
/// coordinates: column `j` holds the coordinates of `T_l^k(e_j)`.
pub fn tlk_matrix(n: usize, k: usize, l: usize, a: &Elt) -> Result<Gf2Matrix> {
    validate(n, k, l, a)?;
    let ctx = a.ctx();
    let basis = ctx.subfield_basis(n)?;
    let columns = basis
        .elems
        .iter()
        .map(|e| {
            let img = e.tmap(l, k)?;
            ctx.subfield_coords(n, &img)?
                .ok_or_else(|| Error::Invalid("T_l^k left GF(2^n)".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Gf2Matrix::from_columns(n, &columns))
}

/// Solves `T_l^k(x) = a` on GF(2^n) by Gaussian elimination; `k > n` allowed.
pub fn linalg_solve(n: usize, k: usize, l: usize, a: &Elt) -> Result<SolutionSet> {
    let matrix = tlk_matrix(n, k, l, a)?;
    let ctx = a.ctx();
    let basis = ctx.subfield_basis(n)?;
    let kernel: Vec<Elt> = matrix
        .nullspace()
        .iter()
        .map(|v| basis.combine(v))
        .collect();
    let rhs = ctx
        .subfield_coords(n, a)?
        .expect("validated a lies in GF(2^n)");
    Ok(match matrix.solve(&rhs) {
        Some(x) => SolutionSet::solvable(basis.combine(&x), kernel),
        None => SolutionSet::unsolvable(ctx, kernel),
    })
}

/// `x^2 + x = a` on GF(2^n) by the half-trace double sum with an auxiliary
/// `delta` of absolute trace 1 (`delta = 1` for odd `n`).
pub fn half_trace_solve(n: usize, a: &Elt) -> Result<SolutionSet> {
    if n == 0 {
        return Err(Error::NonPositive("n"));
    }
    let ctx = a.ctx();
    if !a.in_subfield(n)? {
        return Err(Error::NotInSubfield {
            elt: a.to_hex(),
            n,
            modulus: ctx.modulus().to_hex(),
        });
    }
    let kernel = vec![ctx.one()];
    if !a.t(n).is_zero() {
        return Ok(SolutionSet::unsolvable(ctx, kernel));
    }
    let delta = if n % 2 == 1 {
        ctx.one()
    } else {
        ctx.subfield_basis(n)?
            .elems
            .into_iter()
            .find(|b| b.t(n).is_one())
            .expect("the absolute trace is onto GF(2)")
    };
    // inner[i] = sum_{j=i+1}^{n-1} delta^(2^j)
    let mut dpow = Vec::with_capacity(n);
    dpow.push(delta);
    for j in 1..n {
        dpow.push(dpow[j - 1].square());
    }
    let mut inner = vec![ctx.zero(); n.saturating_sub(1)];
    let mut acc = ctx.zero();
    for i in (0..n.saturating_sub(1)).rev() {
        acc = &acc + &dpow[i + 1];
        inner[i] = acc.clone();
    }
    let mut x0 = ctx.zero();
    let mut apow = a.clone();
    for term in &inner {
        x0 = &x0 + &(term * &apow);
        apow = apow.square();
    }
    Ok(SolutionSet::solvable(x0, kernel))
}
