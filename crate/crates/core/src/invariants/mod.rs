//! Permutation sums over matrix tuples and trace-word invariants.
//!
//! For a tuple `(A₁, …, A_s)` and a permutation `σ` with cycles
//! `(i₁ … i_k)(j₁ … j_h)⋯`,
//! `Φ_σ = tr(A_{i₁}⋯A_{i_k}) · tr(A_{j₁}⋯A_{j_h}) ⋯`. Then
//! `F = Σ_σ ε(σ) Φ_σ` and `P = Σ_σ A_{σ(1)}⋯A_{σ(s)}`, and for `d` matrices
//! of size `d`
//!
//! ```text
//! Σ_{I ⊆ {1..d}} (−1)^{|I|} F(A_I) P(A_{I^c}) = 0.
//! ```

mod permutation;
mod procesi;

pub use permutation::{cycle_decompose, permutations, CycleDecomposition, Permutation, Permutations};
pub use procesi::{
    d2_length_three, max_relative_deviation, procesi_length, procesi_map, procesi_map_with_length, tau,
    tau_rho_bound, trace_word_count, tuple_norm, TauRhoCheck, TraceVector, MAX_TRACE_WORDS,
    TAU_ZERO_CUTOFF,
};

use crate::error::{Error, Result};
use crate::matrix::{CMatrix, C64, ONE};

/// Default cap on tuple length for permutation sums.
pub const MAX_TUPLE_LEN: usize = 6;

fn check_tuple(tuple: &[CMatrix]) -> Result<Option<usize>> {
    if tuple.len() > MAX_TUPLE_LEN {
        return Err(Error::usage(format!(
            "permutation sums are capped at {MAX_TUPLE_LEN} matrices"
        )));
    }
    let Some(first) = tuple.first() else {
        return Ok(None);
    };
    for a in tuple {
        if a.dim() != first.dim() {
            return Err(Error::DimensionMismatch {
                expected: first.dim(),
                found: a.dim(),
            });
        }
    }
    Ok(Some(first.dim()))
}

/// `Φ_σ(A₁, …, A_s)`: the product over cycles of the trace of the
/// cycle-ordered product.
pub fn phi_sigma(sigma: &Permutation, tuple: &[CMatrix]) -> Result<C64> {
    if sigma.len() != tuple.len() {
        return Err(Error::DimensionMismatch {
            expected: sigma.len(),
            found: tuple.len(),
        });
    }
    check_tuple(tuple)?;
    Ok(phi_unchecked(sigma, tuple))
}

fn phi_unchecked(sigma: &Permutation, tuple: &[CMatrix]) -> C64 {
    let mut acc = ONE;
    for cycle in cycle_decompose(sigma).cycles {
        let t = if cycle.len() == 1 {
            tuple[cycle[0]].trace()
        } else {
            let mut p = tuple[cycle[0]].clone();
            for &i in &cycle[1..] {
                p = &p * &tuple[i];
            }
            p.trace()
        };
        acc *= t;
    }
    acc
}

/// `F(A₁, …, A_s) = Σ_σ ε(σ) Φ_σ`, with `F(∅) = 1`.
pub fn signed_trace_sum(tuple: &[CMatrix]) -> Result<C64> {
    check_tuple(tuple)?;
    let mut acc = C64::new(0.0, 0.0);
    for sigma in permutations(tuple.len()) {
        acc += phi_unchecked(&sigma, tuple) * f64::from(sigma.sign());
    }
    Ok(acc)
}

/// `P(A₁, …, A_s) = Σ_σ A_{σ(1)}⋯A_{σ(s)}`, with `P(∅) = I` of size `dim`.
pub fn symmetrized_product(tuple: &[CMatrix], dim: usize) -> Result<CMatrix> {
    let Some(d) = check_tuple(tuple)? else {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        return Ok(CMatrix::identity(dim));
    };
    if d != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: d });
    }
    let mut acc = CMatrix::zeros(d);
    for sigma in permutations(tuple.len()) {
        let idx = sigma.images();
        let mut p = tuple[idx[0]].clone();
        for &i in &idx[1..] {
            p = &p * &tuple[i];
        }
        acc = &acc + &p;
    }
    Ok(acc)
}

/// `Σ_{I} (−1)^{|I|} F(A_I) P(A_{I^c})` over all subsets `I` of the indices.
pub fn trace_identity_sum(tuple: &[CMatrix]) -> Result<CMatrix> {
    let d = match check_tuple(tuple)? {
        Some(d) if d == tuple.len() => d,
        Some(d) => {
            return Err(Error::usage(format!(
                "the trace identity takes {d} matrices of size {d}, got {}",
                tuple.len()
            )))
        }
        None => return Err(Error::EmptySet),
    };
    let mut acc = CMatrix::zeros(d);
    for mask in 0u32..(1 << d) {
        let (inside, outside): (Vec<_>, Vec<_>) = (0..d).partition(|&i| mask >> i & 1 == 1);
        let a: Vec<CMatrix> = inside.iter().map(|&i| tuple[i].clone()).collect();
        let b: Vec<CMatrix> = outside.iter().map(|&i| tuple[i].clone()).collect();
        let f = signed_trace_sum(&a)?;
        let sign = if inside.len() % 2 == 0 { 1.0 } else { -1.0 };
        let term = symmetrized_product(&b, d)?.scale(f * sign);
        acc = &acc + &term;
    }
    Ok(acc)
}

/// Largest entry modulus of the trace identity sum, divided by
/// `(1 + max‖A_i‖₂)^d`.
pub fn trace_identity_residual(tuple: &[CMatrix]) -> Result<f64> {
    let sum = trace_identity_sum(tuple)?;
    let scale = (1.0 + tuple_norm(tuple)?).powi(tuple.len() as i32);
    Ok(sum.max_abs() / scale)
}
