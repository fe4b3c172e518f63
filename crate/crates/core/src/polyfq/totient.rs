//! Polynomial totient Φ_q, Möbius μ_q and divisor sum σ_q over F_q[x].

use serde::Serialize;

use super::{cyclotomic_profile, factor_xn_minus_1, BaseField, Poly, PolyFactorization};
use crate::error::{Error, Result};

fn overflow(what: &str) -> Error {
    Error::Resource(format!("{what} exceeds 2^64"))
}

fn q_pow(q: u64, e: u64) -> Result<u128> {
    (q as u128).checked_pow(e as u32).filter(|_| e <= u32::MAX as u64).ok_or_else(|| overflow("q^deg"))
}

/// N(f) = q^{deg f}, the size of F_q[x]/(f).
pub fn poly_norm(f: &Poly, q: u64) -> Result<u64> {
    let d = f.degree().unwrap_or(0) as u64;
    u64::try_from(q_pow(q, d)?).map_err(|_| overflow("N(f)"))
}

/// Φ_q(f) = Π_{r^e ∥ f} Q^{e−1}(Q − 1) with Q = q^{deg r}.
pub fn poly_phi(fact: &PolyFactorization, q: u64) -> Result<u64> {
    let mut acc: u128 = 1;
    for (r, e) in fact.entries() {
        let big_q = q_pow(q, r.degree().unwrap() as u64)?;
        let term = big_q
            .checked_pow(e - 1)
            .and_then(|x| x.checked_mul(big_q - 1))
            .ok_or_else(|| overflow("Phi"))?;
        acc = acc.checked_mul(term).ok_or_else(|| overflow("Phi"))?;
    }
    u64::try_from(acc).map_err(|_| overflow("Phi"))
}

/// Signed Möbius: 0 on a repeated factor, else (−1)^{#factors}.
pub fn poly_mobius(fact: &PolyFactorization) -> i8 {
    if !fact.is_squarefree() {
        0
    } else if fact.distinct_count().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// σ_q(f) = Σ_{d | f monic} q^{deg d} = Π (1 + Q + … + Q^e).
pub fn poly_sigma(fact: &PolyFactorization, q: u64) -> Result<u64> {
    let mut acc: u128 = 1;
    for (r, e) in fact.entries() {
        let big_q = q_pow(q, r.degree().unwrap() as u64)?;
        let mut s: u128 = 0;
        let mut t: u128 = 1;
        for _ in 0..=*e {
            s = s.checked_add(t).ok_or_else(|| overflow("sigma"))?;
            t = t.saturating_mul(big_q);
        }
        acc = acc.checked_mul(s).ok_or_else(|| overflow("sigma"))?;
    }
    u64::try_from(acc).map_err(|_| overflow("sigma"))
}

/// Φ_q(xⁿ − 1) from the cyclotomic profile alone, without factoring.
pub fn phi_xn_minus_1(q: u64, n: u64) -> Result<u64> {
    let pr = cyclotomic_profile(q, n)?;
    let mult = pr.multiplicity() as u32;
    let mut acc: u128 = 1;
    for row in &pr.rows {
        let big_q = q_pow(q, row.order)?;
        let term = big_q
            .checked_pow(mult - 1)
            .and_then(|x| x.checked_mul(big_q - 1))
            .ok_or_else(|| overflow("Phi"))?;
        for _ in 0..row.count {
            acc = acc.checked_mul(term).ok_or_else(|| overflow("Phi"))?;
        }
    }
    u64::try_from(acc).map_err(|_| overflow("Phi"))
}

/// Every monic divisor of the factored polynomial, as sub-factorizations in
/// odometer order over the exponent vectors (first factor fastest).
pub fn monic_divisors(fact: &PolyFactorization, fld: &BaseField) -> Vec<PolyFactorization> {
    let maxes: Vec<u32> = fact.entries().iter().map(|&(_, e)| e).collect();
    let mut exps = vec![0u32; maxes.len()];
    let mut out = Vec::new();
    loop {
        out.push(fact.with_exponents(&exps, fld));
        let mut i = 0;
        loop {
            if i == exps.len() {
                return out;
            }
            if exps[i] < maxes[i] {
                exps[i] += 1;
                break;
            }
            exps[i] = 0;
            i += 1;
        }
    }
}

/// Both readings of the σ·Φ product identity for xⁿ − 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SigmaPhiReport {
    pub q: u64,
    pub n: u64,
    pub sigma: u64,
    pub phi: u64,
    /// σΦ/(qⁿ−1)² against Π(1 − 1/Q_r)
    pub variant_lhs: f64,
    pub variant_rhs: f64,
    pub variant_holds: bool,
    /// σΦ/q^{2n} against Π(1 − Q_r^{−(e+1)}), checked in exact integers
    pub corrected_lhs: f64,
    pub corrected_rhs: f64,
    pub corrected_holds: bool,
}

pub fn sigma_phi_identity_check(fld: &BaseField, n: usize) -> Result<SigmaPhiReport> {
    let q = fld.q();
    let fact = factor_xn_minus_1(fld, n)?;
    let sigma = poly_sigma(&fact, q)?;
    let phi = poly_phi(&fact, q)?;
    let qn = q_pow(q, n as u64)?;
    let prod = sigma as f64 * phi as f64;
    let variant_lhs = prod / ((qn - 1) as f64).powi(2);
    let mut variant_rhs = 1.0;
    let mut corrected_rhs = 1.0;
    // exact: σΦ·Π Q^{e+1} = q^{2n}·Π (Q^{e+1} − 1)
    let mut left: Option<u128> = Some(sigma as u128 * phi as u128);
    let mut right: Option<u128> = qn.checked_mul(qn);
    for (r, e) in fact.entries() {
        let big_q = q_pow(q, r.degree().unwrap() as u64)?;
        variant_rhs *= 1.0 - 1.0 / big_q as f64;
        corrected_rhs *= 1.0 - (big_q as f64).powi(-(*e as i32 + 1));
        let qe1 = big_q.checked_pow(e + 1);
        left = left.zip(qe1).and_then(|(a, b)| a.checked_mul(b));
        right = right.zip(qe1).and_then(|(a, b)| a.checked_mul(b - 1));
    }
    let corrected_lhs = prod / (qn as f64).powi(2);
    let corrected_holds = match (left, right) {
        (Some(a), Some(b)) => a == b,
        _ => (corrected_lhs - corrected_rhs).abs() <= 1e-12 * corrected_rhs,
    };
    Ok(SigmaPhiReport {
        q,
        n: n as u64,
        sigma,
        phi,
        variant_lhs,
        variant_rhs,
        variant_holds: (variant_lhs - variant_rhs).abs() <= 1e-12 * variant_rhs.abs().max(1e-300),
        corrected_lhs,
        corrected_rhs,
        corrected_holds,
    })
}
