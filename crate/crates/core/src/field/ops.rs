//! Frobenius, trace, norm, the linearized action, orders and the
//! primitive/normal tests.

use smallvec::SmallVec;

use super::{Coords, ExtElement, FieldCtx};
use crate::error::{Error, Result};
use crate::polyfq::Poly;

/// How to decide normality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormalTest {
    /// ((xⁿ − 1)/r)∘α ≠ 0 for every irreducible r | xⁿ − 1
    Divisor,
    /// α, α^q, …, α^{q^{n−1}} are F_q-linearly independent
    Rank,
}

impl FieldCtx {
    fn frobenius_once(&self, a: &ExtElement) -> ExtElement {
        let f = &self.base;
        let mut out: Coords = SmallVec::from_elem(0, self.n);
        for (i, &c) in a.coords.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (o, &m) in out.iter_mut().zip(&self.frob_images[i]) {
                if m != 0 {
                    *o = f.add(*o, f.mul(c, m));
                }
            }
        }
        ExtElement { coords: out }
    }

    /// α^{q^i}, with i reduced mod n.
    pub fn frobenius(&self, a: &ExtElement, i: u64) -> ExtElement {
        let mut x = a.clone();
        for _ in 0..(i % self.n as u64) {
            x = self.frobenius_once(&x);
        }
        x
    }

    /// α, α^q, …, α^{q^{n−1}}
    pub fn conjugates(&self, a: &ExtElement) -> Vec<ExtElement> {
        let mut out = Vec::with_capacity(self.n);
        let mut x = a.clone();
        for _ in 0..self.n {
            let next = self.frobenius_once(&x);
            out.push(x);
            x = next;
        }
        out
    }

    /// Absolute trace into F_p via the precomputed F_p-linear weights.
    pub fn trace(&self, a: &ExtElement) -> u64 {
        let p = self.p();
        let mut acc: u128 = 0;
        let mut j = 0;
        for &c in a.coords.iter() {
            for d in self.base.digits(c) {
                acc += d as u128 * self.trace_weights[j] as u128;
                j += 1;
            }
        }
        (acc % p as u128) as u64
    }

    /// Trace weights tr(e_j) for the F_p basis with indices p^j.
    pub fn trace_weights(&self) -> &[u64] {
        &self.trace_weights
    }

    /// Σ_{j < kn} α^{p^j} computed literally; the result must lie in F_p.
    pub fn trace_by_conjugates(&self, a: &ExtElement) -> Result<u64> {
        let kn = self.k() as usize * self.n;
        let mut acc = self.zero();
        let mut x = a.clone();
        for _ in 0..kn {
            acc = self.add(&acc, &x);
            x = self.pow(&x, self.p());
        }
        self.prime_field_value(&acc)
            .ok_or_else(|| Error::Internal("trace left the prime field".into()))
    }

    /// Absolute norm α^{(p^{kn} − 1)/(p − 1)} ∈ F_p; N(0) = 0.
    pub fn norm(&self, a: &ExtElement) -> Result<u64> {
        if a.is_zero() {
            return Ok(0);
        }
        let e = (self.size - 1) / (self.p() - 1);
        let v = self.pow(a, e);
        self.prime_field_value(&v)
            .ok_or_else(|| Error::Internal("norm left the prime field".into()))
    }

    /// Some(c) if a = c ∈ F_p.
    pub fn prime_field_value(&self, a: &ExtElement) -> Option<u64> {
        let c0 = a.coords[0];
        (c0 < self.p() && a.coords[1..].iter().all(|&c| c == 0)).then_some(c0)
    }

    /// r∘α = Σ rᵢ α^{q^i}, exponents reduced mod n.
    pub fn apply_linearized(&self, r: &Poly, a: &ExtElement) -> ExtElement {
        if r.is_zero() {
            return self.zero();
        }
        let conj = self.conjugates(a);
        self.apply_with_conjugates(r, &conj)
    }

    /// r∘α given the conjugates of α.
    pub fn apply_with_conjugates(&self, r: &Poly, conj: &[ExtElement]) -> ExtElement {
        let f = &self.base;
        let mut out: Coords = SmallVec::from_elem(0, self.n);
        for (i, &c) in r.coeffs().iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (o, &x) in out.iter_mut().zip(&conj[i % self.n].coords) {
                *o = f.add(*o, f.mul(c, x));
            }
        }
        ExtElement { coords: out }
    }

    /// Least d | qⁿ − 1 with α^d = 1.
    pub fn multiplicative_order(&self, a: &ExtElement) -> Result<u64> {
        if a.is_zero() {
            return Err(Error::Domain("multiplicative order of zero".into()));
        }
        let mut order = self.size - 1;
        for &(r, _) in self.mult_factorization.entries() {
            while order.is_multiple_of(r) && self.pow(a, order / r) == self.one() {
                order /= r;
            }
        }
        Ok(order)
    }

    /// Minimal monic divisor d of xⁿ − 1 with d∘α = 0.
    pub fn additive_order(&self, a: &ExtElement) -> Poly {
        let f = &self.base;
        let fact = &self.add_factorization;
        let conj = self.conjugates(a);
        let mut exps: Vec<u32> = fact.entries().iter().map(|&(_, e)| e).collect();
        for i in 0..exps.len() {
            while exps[i] > 0 {
                exps[i] -= 1;
                let cand = fact.with_exponents(&exps, f);
                if !self.apply_with_conjugates(cand.value(), &conj).is_zero() {
                    exps[i] += 1;
                    break;
                }
            }
        }
        fact.with_exponents(&exps, f).value().clone()
    }

    /// α^{(qⁿ−1)/r} ≠ 1 for every prime r | qⁿ − 1.
    pub fn is_primitive(&self, a: &ExtElement) -> Result<bool> {
        if a.is_zero() {
            return Err(Error::Domain("primitivity of zero".into()));
        }
        let m = self.size - 1;
        let one = self.one();
        if m == 1 {
            return Ok(*a == one);
        }
        Ok(self.mult_factorization.primes().all(|r| self.pow(a, m / r) != one))
    }

    pub fn is_normal(&self, a: &ExtElement, test: NormalTest) -> bool {
        if a.is_zero() {
            return false;
        }
        let conj = self.conjugates(a);
        match test {
            NormalTest::Divisor => self
                .normal_cofactors
                .iter()
                .all(|c| !self.apply_with_conjugates(c, &conj).is_zero()),
            NormalTest::Rank => self.rank(&conj) == self.n,
        }
    }

    /// Rank over F_q of the rows' coordinate vectors.
    pub fn rank(&self, rows: &[ExtElement]) -> usize {
        let f = &self.base;
        let mut m: Vec<Coords> = rows.iter().map(|r| r.coords.clone()).collect();
        let mut rank = 0;
        for col in 0..self.n {
            let Some(piv) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
                continue;
            };
            m.swap(rank, piv);
            let inv = f.inv(m[rank][col]).expect("nonzero pivot");
            for c in col..self.n {
                m[rank][c] = f.mul(m[rank][c], inv);
            }
            for r in 0..m.len() {
                if r != rank && m[r][col] != 0 {
                    let t = m[r][col];
                    for c in col..self.n {
                        let v = f.mul(t, m[rank][c]);
                        m[r][c] = f.sub(m[r][c], v);
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// Primitive and normal; false for 0.
    pub fn is_primitive_normal(&self, a: &ExtElement) -> bool {
        !a.is_zero()
            && self.is_normal(a, NormalTest::Divisor)
            && self.is_primitive(a).unwrap_or(false)
    }

    /// First primitive normal element in canonical order.
    pub fn find_reference_primitive_normal(&self) -> Result<ExtElement> {
        (1..self.size)
            .map(|i| self.element_from_index(i))
            .find(|a| self.is_primitive_normal(a))
            .ok_or_else(|| Error::Internal(format!("no primitive normal element in {}", self.label())))
    }

    /// The cached reference primitive normal element τ.
    pub fn reference_tau(&self) -> Result<&ExtElement> {
        self.tau
            .get_or_init(|| self.find_reference_primitive_normal().ok())
            .as_ref()
            .ok_or_else(|| Error::Internal(format!("no primitive normal element in {}", self.label())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyfq::BaseField;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f4() -> FieldCtx {
        FieldCtx::build(2, 1, 2, None, None).unwrap()
    }

    fn desk_fields() -> Vec<FieldCtx> {
        let mut v = Vec::new();
        for (p, k, n) in [
            (2u64, 1u32, 1usize),
            (2, 1, 2),
            (2, 1, 3),
            (2, 1, 4),
            (2, 1, 6),
            (3, 1, 2),
            (3, 1, 3),
            (2, 2, 2),
            (2, 2, 3),
            (5, 1, 2),
            (7, 1, 2),
            (3, 2, 2),
            (5, 1, 5),
            (7, 1, 1),
        ] {
            v.push(FieldCtx::build(p, k, n, None, None).unwrap());
        }
        v
    }

    /// Multiplicative order by repeated multiplication.
    fn order_by_powers(ctx: &FieldCtx, a: &ExtElement) -> u64 {
        let mut x = a.clone();
        let mut e = 1;
        while x != ctx.one() {
            x = ctx.mul(&x, a);
            e += 1;
        }
        e
    }

    #[test]
    fn f4_examples() {
        let ctx = f4();
        let a = ctx.generator();
        let a1 = ctx.add(&a, &ctx.one());
        assert_eq!(ctx.frobenius(&a, 1), a1);
        assert_eq!(ctx.frobenius(&ctx.zero(), 1), ctx.zero());
        assert_eq!(ctx.frobenius(&ctx.one(), 1), ctx.one());
        assert_eq!(ctx.frobenius(&a, 2), a);
        assert_eq!(ctx.trace(&a), 1);
        assert_eq!(ctx.trace(&ctx.zero()), 0);
        assert_eq!(ctx.norm(&a).unwrap(), 1);
        let x1 = Poly::new(vec![1, 1]);
        assert_eq!(ctx.apply_linearized(&x1, &a), ctx.one());
        assert_eq!(ctx.apply_linearized(&Poly::one(), &a), a);
        let xn1 = Poly::xn_minus_one(2, ctx.base());
        for e in ctx.elements() {
            assert!(ctx.apply_linearized(&xn1, &e).is_zero());
        }
        assert_eq!(ctx.multiplicative_order(&ctx.one()).unwrap(), 1);
        assert_eq!(ctx.multiplicative_order(&a).unwrap(), 3);
        assert_eq!(ctx.additive_order(&ctx.one()), Poly::new(vec![1, 1]));
        assert_eq!(ctx.additive_order(&a), Poly::new(vec![1, 0, 1]));
        assert_eq!(ctx.additive_order(&ctx.zero()), Poly::one());
        assert!(ctx.is_primitive(&a).unwrap());
        assert!(!ctx.is_primitive(&ctx.one()).unwrap());
        assert!(ctx.is_primitive(&ctx.zero()).is_err());
        for t in [NormalTest::Divisor, NormalTest::Rank] {
            assert!(ctx.is_normal(&a, t));
            assert!(!ctx.is_normal(&ctx.one(), t));
            assert!(!ctx.is_normal(&ctx.zero(), t));
        }
        assert!(ctx.is_primitive_normal(&a));
        assert!(!ctx.is_primitive_normal(&ctx.one()));
        assert_eq!(ctx.reference_tau().unwrap(), &a);
    }

    #[test]
    fn f8_examples() {
        let ctx = FieldCtx::build(2, 1, 3, None, None).unwrap();
        for e in ctx.elements().skip(2) {
            assert_eq!(ctx.multiplicative_order(&e).unwrap(), 7);
            assert!(ctx.is_primitive(&e).unwrap());
            if ctx.trace(&e) == 0 {
                assert!(!ctx.is_normal(&e, NormalTest::Divisor));
            }
        }
        let normals: Vec<_> = ctx.elements().filter(|e| ctx.is_normal(e, NormalTest::Rank)).collect();
        assert_eq!(normals.len(), 3);
        assert_eq!(ctx.reference_tau().unwrap(), &normals[0]);
    }

    #[test]
    fn f9_reference() {
        let ctx = FieldCtx::build(3, 1, 2, None, None).unwrap();
        let tau = ctx.reference_tau().unwrap().clone();
        let first = ctx.elements().find(|e| ctx.is_primitive_normal(e)).unwrap();
        assert_eq!(tau, first);
        assert_eq!(ctx.multiplicative_order(&tau).unwrap(), 8);
    }

    #[test]
    fn trace_and_norm_land_in_prime_field() {
        for ctx in desk_fields() {
            let mut hit = vec![false; ctx.p() as usize];
            for e in ctx.elements() {
                let t = ctx.trace(&e);
                assert_eq!(t, ctx.trace_by_conjugates(&e).unwrap());
                hit[t as usize] = true;
                let _ = ctx.norm(&e).unwrap();
            }
            assert!(hit.iter().all(|&h| h), "trace not surjective on {}", ctx.label());
        }
    }

    #[test]
    fn orders_and_normality_exhaustive() {
        for ctx in desk_fields() {
            let xn1 = ctx.add_factorization().value().clone();
            let mut normal = 0u64;
            let mut primitive = 0u64;
            for e in ctx.elements() {
                let d = ctx.additive_order(&e);
                assert!(d.is_monic());
                assert!(d.divides(&xn1, ctx.base()).unwrap());
                assert!(ctx.apply_linearized(&d, &e).is_zero());
                // no proper divisor annihilates: check d/r for each r | d
                for (r, _) in ctx.add_factorization().entries() {
                    if r.divides(&d, ctx.base()).unwrap() {
                        let smaller = d.div_exact(r, ctx.base()).unwrap();
                        assert!(!ctx.apply_linearized(&smaller, &e).is_zero());
                    }
                }
                let nd = ctx.is_normal(&e, NormalTest::Divisor);
                assert_eq!(nd, ctx.is_normal(&e, NormalTest::Rank));
                assert_eq!(nd, d == xn1);
                normal += nd as u64;
                if !e.is_zero() {
                    let ord = ctx.multiplicative_order(&e).unwrap();
                    assert_eq!(ord, order_by_powers(&ctx, &e));
                    let prim = ctx.is_primitive(&e).unwrap();
                    assert_eq!(prim, ord == ctx.size() - 1);
                    primitive += prim as u64;
                }
            }
            assert_eq!(normal, ctx.phi_add().unwrap(), "{}", ctx.label());
            assert_eq!(primitive, ctx.phi_mult(), "{}", ctx.label());
        }
    }

    #[test]
    fn degree_one_tower() {
        let ctx = FieldCtx::build(7, 1, 1, None, None).unwrap();
        for e in ctx.elements().skip(1) {
            assert!(ctx.is_normal(&e, NormalTest::Divisor));
        }
        let f2 = FieldCtx::build(2, 1, 1, None, None).unwrap();
        assert!(f2.is_primitive(&f2.one()).unwrap());
        assert!(f2.is_normal(&f2.one(), NormalTest::Rank));
    }

    #[test]
    fn supplied_moduli() {
        // F₈ on x³+x+1 instead of the default x³+x²+1
        let m = Poly::new(vec![1, 1, 0, 1]);
        let ctx = FieldCtx::build(2, 1, 3, None, Some(m)).unwrap();
        let a = ctx.generator();
        let a3 = ctx.pow(&a, 3);
        assert_eq!(a3, ctx.add(&a, &ctx.one()));
        let base = BaseField::new(2, 2, None).unwrap();
        let ctx = FieldCtx::build(2, 2, 2, Some(base.modulus().into_coeffs()), None).unwrap();
        assert_eq!(ctx.size(), 16);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn automorphism_and_linearity(seed in any::<u64>(), which in 0usize..13) {
            let ctx = &desk_fields()[which];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..16 {
                let a = ctx.random_element(&mut rng);
                let b = ctx.random_element(&mut rng);
                let fa = ctx.frobenius(&a, 1);
                let fb = ctx.frobenius(&b, 1);
                prop_assert_eq!(ctx.frobenius(&ctx.add(&a, &b), 1), ctx.add(&fa, &fb));
                prop_assert_eq!(ctx.frobenius(&ctx.mul(&a, &b), 1), ctx.mul(&fa, &fb));
                prop_assert_eq!(ctx.frobenius(&a, 1), ctx.pow(&a, ctx.q()));
                let t = (ctx.trace(&a) + ctx.trace(&b)) % ctx.p();
                prop_assert_eq!(ctx.trace(&ctx.add(&a, &b)), t);
                let c = rng.gen_range(0..ctx.p());
                prop_assert_eq!(ctx.trace(&ctx.scale(c, &a)), c * ctx.trace(&a) % ctx.p());
                let nab = ctx.norm(&ctx.mul(&a, &b)).unwrap();
                prop_assert_eq!(nab, ctx.norm(&a).unwrap() * ctx.norm(&b).unwrap() % ctx.p());
                // module action: (rs)∘α = r∘(s∘α)
                let f = ctx.base();
                let r = Poly::new((0..4).map(|_| rng.gen_range(0..ctx.q())).collect());
                let s = Poly::new((0..3).map(|_| rng.gen_range(0..ctx.q())).collect());
                let lhs = ctx.apply_linearized(&r.mul(&s, f), &a);
                let rhs = ctx.apply_linearized(&r, &ctx.apply_linearized(&s, &a));
                prop_assert_eq!(lhs, rhs);
                // F_q-linearity
                let c = rng.gen_range(0..ctx.q());
                let lhs = ctx.apply_linearized(&r, &ctx.add(&ctx.scale(c, &a), &b));
                let rhs = ctx.add(&ctx.scale(c, &ctx.apply_linearized(&r, &a)), &ctx.apply_linearized(&r, &b));
                prop_assert_eq!(lhs, rhs);
            }
        }
    }

    use rand::Rng;
}
