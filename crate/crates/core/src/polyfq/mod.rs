//! Polynomials over F_q and the polynomial totient machinery.

mod base;
pub mod factor;
pub mod totient;

pub use base::{BaseField, Digits};
pub use factor::{
    certify_irreducible, cyclotomic_profile, factor_xn_minus_1, is_irreducible, is_irreducible_exhaustive,
    smallest_irreducible, CyclotomicProfile, PolyFactorization, ProfileRow,
};
pub use totient::{
    monic_divisors, phi_xn_minus_1, poly_mobius, poly_norm, poly_phi, poly_sigma,
    sigma_phi_identity_check, SigmaPhiReport,
};

use crate::error::{domain, Error, Result};

/// Dense polynomial over F_q, ascending coefficients, no trailing zeros.
/// The zero polynomial has an empty coefficient list and degree `None`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Poly {
    coeffs: Vec<u64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<u64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly { coeffs: vec![1] }
    }

    pub fn x() -> Self {
        Poly { coeffs: vec![0, 1] }
    }

    pub fn constant(c: u64) -> Self {
        Poly::new(vec![c])
    }

    pub fn monomial(c: u64, deg: usize) -> Self {
        let mut v = vec![0; deg + 1];
        v[deg] = c;
        Poly::new(v)
    }

    /// xⁿ − 1 over `f`.
    pub fn xn_minus_one(n: usize, f: &BaseField) -> Self {
        let mut v = vec![0; n + 1];
        v[n] = 1;
        v[0] = f.sub(v[0], 1);
        Poly::new(v)
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<u64> {
        self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1
    }

    /// Leading coefficient, 0 for the zero polynomial.
    pub fn leading(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn add(&self, other: &Poly, f: &BaseField) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|i| f.add(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn sub(&self, other: &Poly, f: &BaseField) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|i| f.sub(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn neg(&self, f: &BaseField) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| f.neg(c)).collect())
    }

    pub fn scale(&self, c: u64, f: &BaseField) -> Poly {
        Poly::new(self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    pub fn mul(&self, other: &Poly, f: &BaseField) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Poly::new(out)
    }

    pub fn pow(&self, e: u32, f: &BaseField) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = acc.mul(self, f);
        }
        acc
    }

    pub fn divrem(&self, d: &Poly, f: &BaseField) -> Result<(Poly, Poly)> {
        let dd = match d.degree() {
            Some(dd) => dd,
            None => return domain("polynomial division by zero"),
        };
        let inv_lead = f.inv(d.leading())?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut quot = vec![0u64; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = rem[i];
            if c == 0 {
                continue;
            }
            let t = f.mul(c, inv_lead);
            quot[i - dd] = t;
            for (j, &dc) in d.coeffs.iter().enumerate() {
                rem[i - dd + j] = f.sub(rem[i - dd + j], f.mul(t, dc));
            }
        }
        rem.truncate(dd);
        Ok((Poly::new(quot), Poly::new(rem)))
    }

    pub fn rem(&self, d: &Poly, f: &BaseField) -> Result<Poly> {
        Ok(self.divrem(d, f)?.1)
    }

    /// Quotient when `d` is known to divide `self`.
    pub fn div_exact(&self, d: &Poly, f: &BaseField) -> Result<Poly> {
        let (q, r) = self.divrem(d, f)?;
        if !r.is_zero() {
            return Err(Error::Internal("inexact polynomial division".into()));
        }
        Ok(q)
    }

    pub fn divides(&self, other: &Poly, f: &BaseField) -> Result<bool> {
        Ok(other.rem(self, f)?.is_zero())
    }

    pub fn monic(&self, f: &BaseField) -> Poly {
        if self.is_zero() || self.is_monic() {
            return self.clone();
        }
        let inv = f.inv(self.leading()).expect("nonzero leading coefficient");
        self.scale(inv, f)
    }

    /// Monic gcd by Euclid.
    pub fn gcd(&self, other: &Poly, f: &BaseField) -> Result<Poly> {
        if self.is_zero() && other.is_zero() {
            return domain("gcd of two zero polynomials");
        }
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b, f)?;
            a = b;
            b = r;
        }
        Ok(a.monic(f))
    }

    pub fn mulmod(&self, other: &Poly, m: &Poly, f: &BaseField) -> Result<Poly> {
        self.mul(other, f).rem(m, f)
    }

    pub fn powmod(&self, mut e: u64, m: &Poly, f: &BaseField) -> Result<Poly> {
        let mut acc = Poly::one().rem(m, f)?;
        let mut base = self.rem(m, f)?;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mulmod(&base, m, f)?;
            }
            base = base.mulmod(&base, m, f)?;
            e >>= 1;
        }
        Ok(acc)
    }

    pub fn eval(&self, x: u64, f: &BaseField) -> u64 {
        self.coeffs.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
    }

    /// Comma-separated ascending coefficients; "0" for the zero polynomial.
    pub fn format(&self, f: &BaseField) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.coeffs.iter().map(|&c| f.format_elem(c)).collect::<Vec<_>>().join(",")
    }

    pub fn parse(text: &str, f: &BaseField) -> Result<Poly> {
        Self::parse_at(text, f, 0)
    }

    /// Parses with error positions offset by `offset` (for embedded fields).
    pub fn parse_at(text: &str, f: &BaseField, offset: usize) -> Result<Poly> {
        if text.trim().is_empty() {
            return Err(Error::Parse { pos: offset, msg: "empty polynomial".into() });
        }
        let mut coeffs = Vec::new();
        let mut pos = offset;
        for tok in text.split(',') {
            coeffs.push(f.parse_elem(tok, pos)?);
            pos += tok.len() + 1;
        }
        Ok(Poly::new(coeffs))
    }

    /// Human-readable form like "x^2 + x + 1" (coefficients in text form).
    pub fn pretty(&self, f: &BaseField) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut terms = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let cs = f.format_elem(c);
            let cs = if cs.contains('/') { format!("({cs})") } else { cs };
            let t = match (i, c) {
                (0, _) => cs,
                (1, 1) => "x".into(),
                (1, _) => format!("{cs}*x"),
                (_, 1) => format!("x^{i}"),
                _ => format!("{cs}*x^{i}"),
            };
            terms.push(t);
        }
        terms.join(" + ")
    }
}
