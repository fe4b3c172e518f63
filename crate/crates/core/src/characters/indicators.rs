//! Indicator functions for primitive and normal elements. The divisor
//! dependent forms sum characters grouped by order; the divisor-free forms
//! match discrete logarithms. Every exact evaluation lands on 0 or 1 or is
//! reported as an internal error.

use num_complex::Complex64;
use num_integer::Integer;

use super::{cyclo, Characters, UnitComplex};
use crate::error::{domain, Error, Result};
use crate::field::{ExtElement, NormalTest};
use crate::polyfq::{poly_phi, Poly};

/// Literal float double sums are only run up to this field size.
pub const LITERAL_LIMIT: u64 = 1 << 12;

/// Outcome of the divisor-dependent normal indicator, which needs xⁿ − 1
/// squarefree (p ∤ n).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalDd {
    Value(u8),
    NotApplicable,
}

fn to_indicator(scaled: i128, denom: u64, what: &str) -> Result<u8> {
    match scaled {
        0 => Ok(0),
        v if v == denom as i128 => Ok(1),
        v => Err(Error::Internal(format!("{what} evaluated to {v}/{denom}"))),
    }
}

/// Σ_{t ∈ [t0, m)} exp(2πi·diff·t/m) for |diff| < m, as an integer.
pub(super) fn geometric_collapse(diff: i128, m: u64, t0: u64) -> i128 {
    if diff == 0 {
        (m - t0) as i128
    } else {
        // the full period sums to zero, so only the skipped terms remain
        -(t0 as i128)
    }
}

impl<'a> Characters<'a> {
    /// log_τ α as a residue in [1, qⁿ − 1], so that α = 1 is represented by
    /// qⁿ − 1 rather than 0.
    fn unit_log(&self, a: &ExtElement) -> Result<u64> {
        let l = self.discrete_log(a)?;
        Ok(if l == 0 { self.order } else { l })
    }

    /// (qⁿ − 1)·Ψ(α) for the divisor-dependent primitive indicator:
    /// Σ over squarefree d | qⁿ − 1 of μ(d)·(φ(qⁿ−1)/φ(d))·Σ_{ord χ = d} χ(α).
    pub fn primitive_dd_scaled(&self, a: &ExtElement) -> Result<i128> {
        let l = self.discrete_log(a)?;
        let phi_n = self.ctx.phi_mult() as i128;
        let mut acc = 0i128;
        for &(d, mu, phi_d) in &self.sqfree {
            // the order-d characters are χ_b with b = (N/d)·b', b' a unit mod d
            let s = self.orbit_sum(d, l % d)?;
            acc += mu as i128 * (phi_n / phi_d as i128) * s;
        }
        Ok(acc)
    }

    pub fn indicator_primitive_dd(&self, a: &ExtElement) -> Result<u8> {
        if a.is_zero() {
            return domain("primitive indicator at zero");
        }
        to_indicator(self.primitive_dd_scaled(a)?, self.order, "divisor-dependent primitive indicator")
    }

    /// Divisor-free primitive indicator, exact: the inner sum over t is qⁿ
    /// when s = log_τ α and 0 otherwise, so Ψ(α) = [log_τ α is a unit].
    pub fn indicator_primitive_df(&self, a: &ExtElement) -> Result<u8> {
        if a.is_zero() {
            return domain("primitive indicator at zero");
        }
        let l = self.unit_log(a)?;
        Ok((l.gcd(&self.order) == 1) as u8)
    }

    /// Same sum with s enumerated from `offset` around [1, qⁿ − 1], every
    /// inner sum collapsed exactly.
    pub fn indicator_primitive_df_rotated(&self, a: &ExtElement, offset: u64) -> Result<u8> {
        if a.is_zero() {
            return domain("primitive indicator at zero");
        }
        let l = self.unit_log(a)? as i128;
        let m = self.ctx.size();
        let n = self.order;
        let mut acc = 0i128;
        for i in 0..n {
            let s = (offset + i) % n + 1;
            if s.gcd(&n) == 1 {
                acc += geometric_collapse(s as i128 - l, m, 0);
            }
        }
        to_indicator(acc, m, "rotated divisor-free primitive indicator")
    }

    /// The divisor-free primitive double sum evaluated in floating point.
    pub fn indicator_primitive_df_literal(&self, a: &ExtElement) -> Result<f64> {
        if a.is_zero() {
            return domain("primitive indicator at zero");
        }
        let m = self.ctx.size();
        if m > LITERAL_LIMIT {
            return Err(Error::Resource(format!("literal double sum over {m} terms")));
        }
        let l = self.unit_log(a)?;
        let tw = twiddles(m);
        let mut acc = Complex64::new(0.0, 0.0);
        for s in 1..=self.order {
            if s.gcd(&self.order) != 1 {
                continue;
            }
            let diff = (s + m - l) % m;
            for t in 0..m {
                acc += tw[(diff * t % m) as usize];
            }
        }
        Ok(acc.re / m as f64)
    }

    /// qⁿ·Ψ_q(α) for the divisor-dependent normal indicator, or None when
    /// xⁿ − 1 is not squarefree.
    pub fn normal_dd_scaled(&self, a: &ExtElement) -> Result<Option<i128>> {
        let ctx = self.ctx;
        let f = ctx.add_factorization();
        if !f.is_squarefree() {
            return Ok(None);
        }
        let cl = self.additive_classes()?;
        let tr = self.trace_table(a)?;
        let p = ctx.p() as usize;
        let mut hist = vec![vec![0i128; p]; cl.divisors.len()];
        for (c, &i) in cl.class_of.iter().enumerate() {
            hist[i as usize][tr[c] as usize] += 1;
        }
        let phi_p = cyclo::cyclotomic_poly(p as u64);
        let big_phi = ctx.phi_add()? as i128;
        let q = ctx.q();
        let mut acc = 0i128;
        for (d, h) in cl.divisors.iter().zip(&hist) {
            // Σ_{Ord ψ = d} ψ(α), an integer in Z[ζ_p]
            let s = cyclo::reduce_root_sum(h, p as u64, &phi_p)
                .ok_or_else(|| Error::Internal("additive class sum is not rational".into()))?;
            let mu: i128 = if d.entries().len() % 2 == 0 { 1 } else { -1 };
            let phi_d = poly_phi(d, q)? as i128;
            acc += mu * (big_phi / phi_d) * s;
        }
        Ok(Some(acc))
    }

    pub fn indicator_normal_dd(&self, a: &ExtElement) -> Result<NormalDd> {
        match self.normal_dd_scaled(a)? {
            None => Ok(NormalDd::NotApplicable),
            Some(v) => Ok(NormalDd::Value(to_indicator(
                v,
                self.ctx.size(),
                "divisor-dependent normal indicator",
            )?)),
        }
    }

    /// Logs of s∘η for every s coprime to xⁿ − 1 with deg s < n.
    pub fn normal_df_table(&self, eta: &ExtElement) -> Result<NormalDfTable> {
        let ctx = self.ctx;
        if !ctx.is_normal(eta, NormalTest::Divisor) {
            return domain(format!("{} is not normal", ctx.format_element(eta)));
        }
        if ctx.size() > crate::DEFAULT_BUDGET {
            return Err(Error::Resource(format!("divisor-free table for {}", ctx.label())));
        }
        let fld = ctx.base();
        let f = Poly::xn_minus_one(ctx.n(), fld);
        let conj = ctx.conjugates(eta);
        let mut logs = Vec::new();
        let mut hit = vec![false; self.order as usize];
        for i in 0..ctx.size() {
            let s = ctx.to_poly(&ctx.element_from_index(i));
            if s.is_zero() || !s.gcd(&f, fld)?.is_one() {
                continue;
            }
            let l = self.discrete_log(&ctx.apply_with_conjugates(&s, &conj))?;
            hit[l as usize] = true;
            logs.push(l);
        }
        Ok(NormalDfTable { modulus: ctx.size(), logs, hit })
    }

    pub fn indicator_normal_df(&self, a: &ExtElement, table: &NormalDfTable) -> Result<u8> {
        if a.is_zero() {
            return domain("normal indicator at zero");
        }
        Ok(table.hit[self.discrete_log(a)? as usize] as u8)
    }

    /// The divisor-free normal sum with s enumerated from position `offset`,
    /// each inner sum collapsed exactly.
    pub fn indicator_normal_df_rotated(
        &self,
        a: &ExtElement,
        table: &NormalDfTable,
        offset: usize,
    ) -> Result<u8> {
        if a.is_zero() {
            return domain("normal indicator at zero");
        }
        let l = self.discrete_log(a)? as i128;
        let len = table.logs.len();
        let mut acc = 0i128;
        for i in 0..len {
            let ls = table.logs[(offset + i) % len] as i128;
            acc += geometric_collapse(ls - l, table.modulus, 0);
        }
        to_indicator(acc, table.modulus, "rotated divisor-free normal indicator")
    }

    pub fn indicator_normal_df_literal(&self, a: &ExtElement, table: &NormalDfTable) -> Result<f64> {
        if a.is_zero() {
            return domain("normal indicator at zero");
        }
        let m = table.modulus;
        if m > LITERAL_LIMIT {
            return Err(Error::Resource(format!("literal double sum over {m} terms")));
        }
        let l = self.discrete_log(a)?;
        let tw = twiddles(m);
        let mut acc = Complex64::new(0.0, 0.0);
        for &ls in &table.logs {
            let diff = (ls + m - l) % m;
            for t in 0..m {
                acc += tw[(diff * t % m) as usize];
            }
        }
        Ok(acc.re / m as f64)
    }
}

pub(crate) fn twiddles(m: u64) -> Vec<Complex64> {
    (0..m).map(|j| UnitComplex::new(j, m).value()).collect()
}

/// Discrete logs of the images s∘η of the units of F_q[x]/(xⁿ − 1).
#[derive(Debug, Clone)]
pub struct NormalDfTable {
    modulus: u64,
    logs: Vec<u64>,
    hit: Vec<bool>,
}

impl NormalDfTable {
    /// Number of units s, which is Φ_q(xⁿ − 1).
    pub fn len(&self) -> usize {
        self.logs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.logs.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldCtx;

    fn field(p: u64, k: u32, n: usize) -> FieldCtx {
        FieldCtx::build(p, k, n, None, None).unwrap()
    }

    #[test]
    fn primitive_examples() {
        let f4 = field(2, 1, 2);
        let ch = Characters::new(&f4).unwrap();
        let x = f4.generator();
        let x1 = f4.add(&x, &f4.one());
        assert_eq!(ch.indicator_primitive_dd(&x).unwrap(), 1);
        assert_eq!(ch.indicator_primitive_dd(&f4.one()).unwrap(), 0);
        assert_eq!(ch.indicator_primitive_df(&x1).unwrap(), 1);
        assert_eq!(ch.indicator_primitive_df(&f4.one()).unwrap(), 0);
        assert!(ch.indicator_primitive_dd(&f4.zero()).is_err());

        let f8 = field(2, 1, 3);
        let ch = Characters::new(&f8).unwrap();
        for a in f8.elements().skip(2) {
            assert_eq!(ch.indicator_primitive_dd(&a).unwrap(), 1);
        }

        let f9 = field(3, 1, 2);
        let ch = Characters::new(&f9).unwrap();
        for l in (0..8).step_by(2) {
            let a = f9.pow(ch.tau(), l);
            assert_eq!(ch.indicator_primitive_df(&a).unwrap(), 0);
        }
    }

    #[test]
    fn f2_plumbing() {
        let f2 = field(2, 1, 1);
        let ch = Characters::new(&f2).unwrap();
        let one = f2.one();
        assert!(f2.is_primitive(&one).unwrap());
        assert_eq!(ch.indicator_primitive_dd(&one).unwrap(), 1);
        assert_eq!(ch.indicator_primitive_df(&one).unwrap(), 1);
        assert_eq!(ch.indicator_primitive_df_rotated(&one, 0).unwrap(), 1);
    }

    #[test]
    fn normal_examples() {
        let f4 = field(2, 1, 2);
        let ch = Characters::new(&f4).unwrap();
        let x = f4.generator();
        assert_eq!(ch.indicator_normal_dd(&x).unwrap(), NormalDd::NotApplicable);
        let t = ch.normal_df_table(&x).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(ch.indicator_normal_df(&x, &t).unwrap(), 1);
        assert_eq!(ch.indicator_normal_df(&f4.one(), &t).unwrap(), 0);
        assert!(ch.normal_df_table(&f4.one()).is_err());

        let f9 = field(3, 1, 2);
        let ch = Characters::new(&f9).unwrap();
        assert_eq!(ch.indicator_normal_dd(&f9.one()).unwrap(), NormalDd::Value(0));
        assert_eq!(f9.additive_order(&f9.one()), Poly::new(vec![2, 1]));
        for a in f9.elements() {
            let want = f9.is_normal(&a, NormalTest::Rank) as u8;
            assert_eq!(ch.indicator_normal_dd(&a).unwrap(), NormalDd::Value(want));
        }
    }

    #[test]
    fn constructed_witness() {
        let f = field(3, 1, 4);
        let ch = Characters::new(&f).unwrap();
        let eta = ch.tau().clone();
        let t = ch.normal_df_table(&eta).unwrap();
        let s0 = Poly::new(vec![1, 2, 0, 1]);
        let fx = Poly::xn_minus_one(4, f.base());
        assert!(s0.gcd(&fx, f.base()).unwrap().is_one());
        let a = f.apply_linearized(&s0, &eta);
        assert_eq!(ch.indicator_normal_df(&a, &t).unwrap(), 1);
    }

    #[test]
    fn all_forms_agree_on_desk_fields() {
        for (p, k, n) in [(2, 1, 3), (2, 1, 4), (3, 1, 2), (3, 1, 3), (2, 2, 2), (5, 1, 2), (2, 1, 6)] {
            let f = field(p, k, n);
            let ch = Characters::new(&f).unwrap();
            let t = ch.normal_df_table(ch.tau()).unwrap();
            assert_eq!(t.len() as u64, f.phi_add().unwrap());
            for (i, a) in f.elements().enumerate().skip(1) {
                let prim = f.is_primitive(&a).unwrap() as u8;
                let norm = f.is_normal(&a, NormalTest::Divisor) as u8;
                assert_eq!(ch.indicator_primitive_dd(&a).unwrap(), prim);
                assert_eq!(ch.indicator_primitive_df(&a).unwrap(), prim);
                assert_eq!(ch.indicator_primitive_df_rotated(&a, i as u64 * 7).unwrap(), prim);
                assert!((ch.indicator_primitive_df_literal(&a).unwrap() - prim as f64).abs() < 1e-6);
                assert_eq!(ch.indicator_normal_df(&a, &t).unwrap(), norm);
                assert_eq!(ch.indicator_normal_df_rotated(&a, &t, i * 3).unwrap(), norm);
                assert!((ch.indicator_normal_df_literal(&a, &t).unwrap() - norm as f64).abs() < 1e-6);
                match ch.indicator_normal_dd(&a).unwrap() {
                    NormalDd::Value(v) => assert_eq!(v, norm),
                    NormalDd::NotApplicable => assert_eq!(n as u64 % p, 0),
                }
            }
        }
    }

    #[test]
    fn other_normal_reference() {
        // any normal η gives the same indicator
        let f = field(2, 1, 5);
        let ch = Characters::new(&f).unwrap();
        let eta = f
            .elements()
            .filter(|a| f.is_normal(a, NormalTest::Rank))
            .find(|a| !f.is_primitive(a).unwrap_or(true))
            .unwrap_or_else(|| ch.tau().clone());
        let t = ch.normal_df_table(&eta).unwrap();
        for a in f.elements().skip(1) {
            let want = f.is_normal(&a, NormalTest::Rank) as u8;
            assert_eq!(ch.indicator_normal_df(&a, &t).unwrap(), want);
        }
    }
}
