//! Additive and multiplicative characters of F_{q^n}, discrete logarithms,
//! Gauss sums, the four indicator functions and the character-sum checks.
//!
//! Multiplicative characters are χ_b(α) = exp(2πi·b·log_τ α/(qⁿ−1)) for the
//! reference primitive normal τ of the field; additive characters are
//! ψ_c(α) = exp(2πi·tr(cα)/p) with the absolute trace.

mod bounds;
pub mod cyclo;
mod indicators;

pub use bounds::{
    bilinear_sum, bilinear_sum_direct, char_sum_bound_suite, primitive_exp_sum, shifted_sum,
    shifted_sum_direct, subsums, units_sum_ratio, BoundReport, ExpSumOracle, ExpSumRecord,
    Subsums,
};
pub use indicators::{NormalDd, NormalDfTable};

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;
use num_integer::Integer;

use crate::error::{domain, Error, Result};
use crate::field::{ExtElement, FieldCtx};
use crate::numtheory::euler_phi;
use crate::polyfq::{monic_divisors, Poly, PolyFactorization};

/// Fields up to this size get full log/exp tables; larger ones use BSGS.
pub const TABLE_LIMIT: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CharSpec {
    /// ψ_c
    Additive(ExtElement),
    /// χ_b, b taken mod qⁿ − 1
    Multiplicative(u64),
}

/// A root of unity exp(2πi·num/den) carried both exactly and as a float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitComplex {
    num: u64,
    den: u64,
    value: Complex64,
}

impl UnitComplex {
    pub fn new(num: u64, den: u64) -> Self {
        let num = num % den;
        let t = TAU * num as f64 / den as f64;
        UnitComplex { num, den, value: Complex64::new(t.cos(), t.sin()) }
    }

    /// (numerator, denominator) of the angle as a fraction of a full turn.
    pub fn angle(&self) -> (u64, u64) {
        (self.num, self.den)
    }

    pub fn value(&self) -> Complex64 {
        self.value
    }

    pub fn is_one(&self) -> bool {
        self.num == 0
    }
}

enum Dlog {
    /// log indexed by element index, exp[L] = index of τ^L
    Table { log: Vec<u32>, exp: Vec<u32> },
    Bsgs { m: u64, baby: HashMap<u64, u64>, giant: ExtElement },
}

/// Elements grouped by additive order: class_of[c] indexes `divisors`.
pub(crate) struct AdditiveClasses {
    pub divisors: Vec<PolyFactorization>,
    pub class_of: Vec<u32>,
}

/// Character machinery bound to one field and its reference element τ.
pub struct Characters<'a> {
    ctx: &'a FieldCtx,
    tau: ExtElement,
    order: u64,
    dlog: Dlog,
    /// (d, μ(d), φ(d)) for squarefree d | qⁿ − 1
    sqfree: Vec<(u64, i8, u64)>,
    classes: OnceLock<AdditiveClasses>,
    orbit_sums: Mutex<HashMap<(u64, u64), i128>>,
}

impl<'a> Characters<'a> {
    pub fn new(ctx: &'a FieldCtx) -> Result<Self> {
        Self::build(ctx, ctx.size() <= TABLE_LIMIT)
    }

    /// Always use baby-step/giant-step, even for small fields.
    pub fn new_bsgs(ctx: &'a FieldCtx) -> Result<Self> {
        Self::build(ctx, false)
    }

    fn build(ctx: &'a FieldCtx, table: bool) -> Result<Self> {
        let tau = ctx.reference_tau()?.clone();
        let order = ctx.size() - 1;
        let dlog = if table {
            let mut log = vec![u32::MAX; ctx.size() as usize];
            let mut exp = Vec::with_capacity(order as usize);
            let mut x = ctx.one();
            for l in 0..order {
                let idx = ctx.index_of(&x);
                log[idx as usize] = l as u32;
                exp.push(idx as u32);
                x = ctx.mul(&x, &tau);
            }
            Dlog::Table { log, exp }
        } else {
            let m = (order as f64).sqrt().ceil() as u64;
            let mut baby = HashMap::with_capacity(m as usize);
            let mut x = ctx.one();
            for j in 0..m {
                baby.entry(ctx.index_of(&x)).or_insert(j);
                x = ctx.mul(&x, &tau);
            }
            // x = τ^m
            let giant = ctx.inv(&x)?;
            Dlog::Bsgs { m, baby, giant }
        };
        let sqfree = ctx
            .mult_factorization()
            .squarefree_divisors()
            .into_iter()
            .map(|(d, mu)| Ok((d, mu, euler_phi(d)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Characters {
            ctx,
            tau,
            order,
            dlog,
            sqfree,
            classes: OnceLock::new(),
            orbit_sums: Mutex::new(HashMap::new()),
        })
    }

    pub fn ctx(&self) -> &'a FieldCtx {
        self.ctx
    }

    pub fn tau(&self) -> &ExtElement {
        &self.tau
    }

    /// qⁿ − 1
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn has_tables(&self) -> bool {
        matches!(self.dlog, Dlog::Table { .. })
    }

    pub fn discrete_log(&self, a: &ExtElement) -> Result<u64> {
        if a.is_zero() {
            return domain("discrete log of zero");
        }
        match &self.dlog {
            Dlog::Table { log, .. } => Ok(log[self.ctx.index_of(a) as usize] as u64),
            Dlog::Bsgs { m, baby, giant } => {
                let mut g = a.clone();
                for i in 0..*m {
                    if let Some(&j) = baby.get(&self.ctx.index_of(&g)) {
                        return Ok((i * m + j) % self.order);
                    }
                    g = self.ctx.mul(&g, giant);
                }
                Err(Error::Internal("baby-step/giant-step found no logarithm".into()))
            }
        }
    }

    /// τ^l
    pub fn power_of_tau(&self, l: u64) -> ExtElement {
        match &self.dlog {
            Dlog::Table { exp, .. } => self.ctx.element_from_index(exp[(l % self.order) as usize] as u64),
            Dlog::Bsgs { .. } => self.ctx.pow(&self.tau, l % self.order),
        }
    }

    pub(crate) fn exp_table(&self) -> Result<&[u32]> {
        match &self.dlog {
            Dlog::Table { exp, .. } => Ok(exp),
            Dlog::Bsgs { .. } => Err(Error::Resource(format!(
                "{} is above the table limit {TABLE_LIMIT}",
                self.ctx.label()
            ))),
        }
    }

    pub fn eval_char(&self, spec: &CharSpec, a: &ExtElement) -> Result<UnitComplex> {
        match spec {
            CharSpec::Additive(c) => {
                let t = self.ctx.trace(&self.ctx.mul(c, a));
                Ok(UnitComplex::new(t, self.ctx.p()))
            }
            CharSpec::Multiplicative(b) => {
                if a.is_zero() {
                    return domain("multiplicative character at zero");
                }
                let l = self.discrete_log(a)?;
                let e = (*b as u128 * l as u128 % self.order as u128) as u64;
                Ok(UnitComplex::new(e, self.order))
            }
        }
    }

    /// Ord ψ_c, defined as the additive order of c.
    pub fn additive_char_order(&self, c: &ExtElement) -> Poly {
        self.ctx.additive_order(c)
    }

    /// tr(c·e_j) for the F_p basis e_j (the element with index p^j).
    pub fn trace_functional(&self, c: &ExtElement) -> Vec<u64> {
        let ctx = self.ctx;
        let p = ctx.p();
        let kn = ctx.k() as usize * ctx.n();
        let mut idx = 1u64;
        let mut out = Vec::with_capacity(kn);
        for _ in 0..kn {
            out.push(ctx.trace(&ctx.mul(c, &ctx.element_from_index(idx))));
            idx *= p;
        }
        out
    }

    /// tr(c·x) for every x, indexed by element index.
    pub fn trace_table(&self, c: &ExtElement) -> Result<Vec<u64>> {
        let size = self.ctx.size();
        if size > crate::DEFAULT_BUDGET {
            return Err(Error::Resource(format!("trace table over {} elements", size)));
        }
        let p = self.ctx.p();
        let w = self.trace_functional(c);
        let mut t = vec![0u64; size as usize];
        let mut block = 1usize;
        for &wj in &w {
            for d in 1..p as usize {
                let shift = (d as u64 * wj) % p;
                for i in 0..block {
                    t[d * block + i] = (t[i] + shift) % p;
                }
            }
            block *= p as usize;
        }
        Ok(t)
    }

    /// G(χ_b, ψ_c) = Σ_{ρ≠0} χ_b(ρ)ψ_c(ρ) by direct summation.
    pub fn gauss_sum(&self, b: u64, c: &ExtElement) -> Result<Complex64> {
        let exp = self.exp_table()?;
        let tr = self.trace_table(c)?;
        let p = self.ctx.p() as f64;
        let n = self.order;
        let mut acc = Complex64::new(0.0, 0.0);
        for (l, &idx) in exp.iter().enumerate() {
            let e = (b as u128 * l as u128 % n as u128) as f64 / n as f64;
            let t = tr[idx as usize] as f64 / p;
            acc += Complex64::from_polar(1.0, TAU * (e + t));
        }
        Ok(acc)
    }

    /// The exact value of G(χ_b, ψ_c) when either character is trivial.
    pub fn gauss_sum_exact(&self, b: u64, c: &ExtElement) -> Option<i64> {
        let chi_trivial = b.is_multiple_of(self.order);
        match (chi_trivial, c.is_zero()) {
            (true, true) => Some(self.order as i64),
            (false, true) => Some(0),
            (true, false) => Some(-1),
            (false, false) => None,
        }
    }

    /// Largest deviation in the two finite Fourier expansions
    /// ψ_c(α) = (1/(qⁿ−1)) Σ_b χ̄_b(α) G(χ_b, ψ_c) and
    /// χ_b(α) = (1/qⁿ) Σ_c ψ̄_c(α) G(χ_b, ψ_c), over every α ≠ 0.
    /// `adds` and `mults` pick the characters on the left-hand side.
    pub fn fourier_residual(&self, adds: &[ExtElement], mults: &[u64]) -> Result<f64> {
        let ctx = self.ctx;
        let n = self.order;
        let mut worst = 0.0f64;
        for c in adds {
            let g: Vec<Complex64> = (0..n).map(|b| self.gauss_sum(b, c)).collect::<Result<_>>()?;
            let tr = self.trace_table(c)?;
            for l in 0..n {
                let a = self.power_of_tau(l);
                let mut s = Complex64::new(0.0, 0.0);
                for (b, gb) in g.iter().enumerate() {
                    s += UnitComplex::new(n - (b as u64 * l % n), n).value() * gb;
                }
                let lhs = UnitComplex::new(tr[ctx.index_of(&a) as usize], ctx.p()).value();
                worst = worst.max((s / n as f64 - lhs).norm());
            }
        }
        let all: Vec<ExtElement> = ctx.elements().collect();
        for &b in mults {
            let g: Vec<Complex64> = all.iter().map(|c| self.gauss_sum(b, c)).collect::<Result<_>>()?;
            let tables: Vec<Vec<u64>> = all.iter().map(|c| self.trace_table(c)).collect::<Result<_>>()?;
            for l in 0..n {
                let idx = ctx.index_of(&self.power_of_tau(l)) as usize;
                let mut s = Complex64::new(0.0, 0.0);
                for (t, gc) in tables.iter().zip(&g) {
                    s += UnitComplex::new(ctx.p() - t[idx], ctx.p()).value() * gc;
                }
                let lhs = UnitComplex::new(b % n * l % n, n).value();
                worst = worst.max((s / ctx.size() as f64 - lhs).norm());
            }
        }
        Ok(worst)
    }

    pub(crate) fn additive_classes(&self) -> Result<&AdditiveClasses> {
        if let Some(c) = self.classes.get() {
            return Ok(c);
        }
        let ctx = self.ctx;
        if ctx.size() > crate::DEFAULT_BUDGET {
            return Err(Error::Resource(format!("additive classes of {}", ctx.label())));
        }
        let divisors = monic_divisors(ctx.add_factorization(), ctx.base());
        let lookup: HashMap<&Poly, u32> =
            divisors.iter().enumerate().map(|(i, d)| (d.value(), i as u32)).collect();
        let mut class_of = Vec::with_capacity(ctx.size() as usize);
        for a in ctx.elements() {
            let ord = ctx.additive_order(&a);
            let i = *lookup
                .get(&ord)
                .ok_or_else(|| Error::Internal("additive order is not a listed divisor".into()))?;
            class_of.push(i);
        }
        Ok(self.classes.get_or_init(|| AdditiveClasses { divisors, class_of }))
    }

    /// For every monic d | xⁿ − 1: (d, #{c : Ord ψ_c divides d}, q^{deg d}).
    pub fn character_counts(&self) -> Result<Vec<(Poly, u64, u64)>> {
        let cl = self.additive_classes()?;
        let mut sizes = vec![0u64; cl.divisors.len()];
        for &i in &cl.class_of {
            sizes[i as usize] += 1;
        }
        let exps = |d: &PolyFactorization| -> Vec<u32> {
            let mut e = vec![0u32; self.ctx.add_factorization().entries().len()];
            for (r, k) in d.entries() {
                let pos = self
                    .ctx
                    .add_factorization()
                    .entries()
                    .iter()
                    .position(|(s, _)| s == r)
                    .expect("divisor factors come from xⁿ − 1");
                e[pos] = *k;
            }
            e
        };
        let all: Vec<Vec<u32>> = cl.divisors.iter().map(exps).collect();
        let q = self.ctx.q();
        let mut out = Vec::with_capacity(all.len());
        for (i, d) in cl.divisors.iter().enumerate() {
            let count: u64 = all
                .iter()
                .zip(&sizes)
                .filter(|(e, _)| e.iter().zip(&all[i]).all(|(a, b)| a <= b))
                .map(|(_, s)| s)
                .sum();
            let deg = d.value().degree().unwrap_or(0) as u32;
            out.push((d.value().clone(), count, q.pow(deg)));
        }
        Ok(out)
    }

    /// Σ over units b mod d of ζ_d^{b·g}, cached; exact for d up to 2¹⁴,
    /// the Ramanujan closed form above that.
    pub(crate) fn orbit_sum(&self, d: u64, g: u64) -> Result<i128> {
        if d > 1 << 14 {
            return Ok(cyclo::ramanujan_sum(d, g));
        }
        // the sum only depends on gcd(g, d)
        let key = (d, g.gcd(&d));
        if let Some(&v) = self.orbit_sums.lock().expect("cache lock").get(&key) {
            return Ok(v);
        }
        let v = cyclo::unit_orbit_sum(d, key.1, &cyclo::cyclotomic_poly(d))
            .ok_or_else(|| Error::Internal(format!("orbit sum for d={d} is not rational")))?;
        self.orbit_sums.lock().expect("cache lock").insert(key, v);
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(p: u64, k: u32, n: usize) -> FieldCtx {
        FieldCtx::build(p, k, n, None, None).unwrap()
    }

    #[test]
    fn dlog_basics() {
        let f4 = field(2, 1, 2);
        let ch = Characters::new(&f4).unwrap();
        assert_eq!(ch.discrete_log(ch.tau()).unwrap(), 1);
        assert_eq!(ch.discrete_log(&f4.one()).unwrap(), 0);
        assert!(ch.discrete_log(&f4.zero()).is_err());
        // τ = x here, and x² = x + 1
        assert_eq!(ch.tau(), &f4.generator());
        let a1 = f4.add(&f4.generator(), &f4.one());
        assert_eq!(ch.discrete_log(&a1).unwrap(), 2);
    }

    #[test]
    fn bsgs_agrees_with_table() {
        for (p, k, n) in [(2, 1, 8), (3, 1, 5), (2, 2, 4), (5, 1, 3), (7, 1, 2)] {
            let f = field(p, k, n);
            let t = Characters::new(&f).unwrap();
            let b = Characters::new_bsgs(&f).unwrap();
            assert!(t.has_tables() && !b.has_tables());
            for a in f.elements().skip(1) {
                let l = t.discrete_log(&a).unwrap();
                assert_eq!(b.discrete_log(&a).unwrap(), l);
                assert_eq!(f.pow(t.tau(), l), a);
            }
        }
    }

    #[test]
    fn bsgs_on_a_large_field() {
        let f = field(2, 1, 20);
        let ch = Characters::new(&f).unwrap();
        assert!(!ch.has_tables());
        for e in [0u64, 1, 2, 1000, 524_287, 1_048_574] {
            let a = f.pow(ch.tau(), e);
            assert_eq!(ch.discrete_log(&a).unwrap(), e);
        }
    }

    #[test]
    fn character_values() {
        let f4 = field(2, 1, 2);
        let ch = Characters::new(&f4).unwrap();
        for a in f4.elements() {
            assert!(ch.eval_char(&CharSpec::Additive(f4.zero()), &a).unwrap().is_one());
            if !a.is_zero() {
                assert!(ch.eval_char(&CharSpec::Multiplicative(0), &a).unwrap().is_one());
                assert!(ch.eval_char(&CharSpec::Multiplicative(3), &a).unwrap().is_one());
            }
        }
        assert!(ch.eval_char(&CharSpec::Multiplicative(1), &f4.zero()).is_err());
        // tr(x) = x + x² = 1 in F₄
        let x = f4.generator();
        assert_eq!(f4.trace(&x), 1);
        let v = ch.eval_char(&CharSpec::Additive(f4.one()), &x).unwrap();
        assert_eq!(v.angle(), (1, 2));
        assert!((v.value() - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn characters_are_homomorphisms() {
        let f = field(3, 1, 3);
        let ch = Characters::new(&f).unwrap();
        let c = f.element_from_index(5);
        let els: Vec<_> = f.elements().collect();
        for a in els.iter().step_by(3) {
            for b in els.iter().step_by(5) {
                let add = |x: &ExtElement| ch.eval_char(&CharSpec::Additive(c.clone()), x).unwrap();
                let lhs = add(&f.add(a, b)).value();
                assert!((lhs - add(a).value() * add(b).value()).norm() < 1e-9);
                if !a.is_zero() && !b.is_zero() {
                    let mul = |x: &ExtElement| ch.eval_char(&CharSpec::Multiplicative(7), x).unwrap();
                    let lhs = mul(&f.mul(a, b)).value();
                    assert!((lhs - mul(a).value() * mul(b).value()).norm() < 1e-9);
                    assert!((mul(a).value().norm() - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn trace_table_matches_trace() {
        let f = field(3, 2, 2);
        let ch = Characters::new(&f).unwrap();
        let c = f.element_from_index(17);
        let t = ch.trace_table(&c).unwrap();
        for a in f.elements() {
            assert_eq!(t[f.index_of(&a) as usize], f.trace(&f.mul(&c, &a)));
        }
    }

    #[test]
    fn additive_orders_of_characters() {
        let f4 = field(2, 1, 2);
        let ch = Characters::new(&f4).unwrap();
        let b = f4.base();
        assert!(ch.additive_char_order(&f4.zero()).is_one());
        assert_eq!(ch.additive_char_order(&f4.generator()), Poly::xn_minus_one(2, b));
        assert_eq!(ch.additive_char_order(&f4.one()), Poly::new(vec![1, 1]));
    }

    #[test]
    fn character_count_lemma() {
        for (p, k, n) in [(2, 1, 2), (2, 1, 4), (2, 1, 6), (3, 1, 3), (3, 1, 4), (2, 2, 3), (5, 1, 2)] {
            let f = field(p, k, n);
            let ch = Characters::new(&f).unwrap();
            for (d, count, expected) in ch.character_counts().unwrap() {
                assert_eq!(count, expected, "{} d={}", f.label(), d.format(f.base()));
            }
        }
    }

    #[test]
    fn gauss_sums() {
        for (p, k, n) in [(2, 1, 3), (3, 1, 2), (2, 2, 2), (5, 1, 2), (2, 1, 5)] {
            let f = field(p, k, n);
            let ch = Characters::new(&f).unwrap();
            let root = (f.size() as f64).sqrt();
            for b in 0..ch.order() {
                for c in f.elements() {
                    let g = ch.gauss_sum(b, &c).unwrap();
                    match ch.gauss_sum_exact(b, &c) {
                        Some(v) => assert!((g - Complex64::new(v as f64, 0.0)).norm() < 1e-8),
                        None => assert!((g.norm() - root).abs() < 1e-6),
                    }
                }
            }
        }
    }

    #[test]
    fn fourier_expansions() {
        let f = field(2, 1, 4);
        let ch = Characters::new(&f).unwrap();
        let adds: Vec<_> = f.elements().step_by(3).collect();
        let r = ch.fourier_residual(&adds, &[0, 1, 5, 7]).unwrap();
        assert!(r < 1e-8, "residual {r}");
    }
}
