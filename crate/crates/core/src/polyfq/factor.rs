//! Irreducibility, canonical moduli and the factorization of xⁿ − 1.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{BaseField, Poly};
use crate::error::{domain, Error, Result};
use crate::numtheory::{euler_phi, multiplicative_order, prime_power};

/// Largest number of candidate divisors tried by the exhaustive certifier.
const EXHAUSTIVE_LIMIT: u64 = 1 << 16;

/// Ben-Or test: f of degree d is irreducible iff gcd(x^{q^i} − x, f) = 1
/// for every i ≤ d/2.
pub fn is_irreducible(f: &Poly, fld: &BaseField) -> bool {
    let d = match f.degree() {
        None | Some(0) => return false,
        Some(1) => return true,
        Some(d) => d,
    };
    let x = Poly::x();
    let mut h = x.clone();
    for _ in 1..=d / 2 {
        h = h.powmod(fld.q(), f, fld).expect("nonzero modulus");
        let g = h.sub(&x, fld).gcd(f, fld).expect("f nonzero");
        if !g.is_one() {
            return false;
        }
    }
    true
}

/// Tries every monic divisor of degree ≤ deg/2; `None` when that is too many.
pub fn is_irreducible_exhaustive(f: &Poly, fld: &BaseField) -> Option<bool> {
    let d = match f.degree() {
        None | Some(0) => return Some(false),
        Some(d) => d,
    };
    let q = fld.q();
    let mut total: u64 = 0;
    for e in 1..=d / 2 {
        total = total.checked_add(q.checked_pow(e as u32)?)?;
    }
    if total > EXHAUSTIVE_LIMIT {
        return None;
    }
    for e in 1..=d / 2 {
        let count = q.pow(e as u32);
        for t in 0..count {
            let mut c = Vec::with_capacity(e + 1);
            let mut r = t;
            for _ in 0..e {
                c.push(r % q);
                r /= q;
            }
            c.push(1);
            if f.rem(&Poly::new(c), fld).expect("monic divisor").is_zero() {
                return Some(false);
            }
        }
    }
    Some(true)
}

/// Exhaustive check at desk scale, Ben-Or beyond it.
pub fn certify_irreducible(f: &Poly, fld: &BaseField) -> Result<bool> {
    let fast = is_irreducible(f, fld);
    match is_irreducible_exhaustive(f, fld) {
        Some(slow) if slow != fast => Err(Error::Internal(format!(
            "irreducibility tests disagree on {}",
            f.format(fld)
        ))),
        _ => Ok(fast),
    }
}

/// The first monic irreducible of degree `deg` when coefficient tuples
/// (c₀, c₁, …, c_{deg−1}) are compared lexicographically with c₀ first.
pub fn smallest_irreducible(deg: usize, fld: &BaseField) -> Result<Poly> {
    if deg == 0 {
        return domain("irreducible polynomials have degree >= 1");
    }
    let q = fld.q();
    // c₀ is the most significant digit of the counter t
    let start = if deg >= 2 { q.checked_pow(deg as u32 - 1).unwrap_or(u64::MAX) } else { 0 };
    let mut t = start;
    loop {
        let mut c = vec![0u64; deg + 1];
        let mut r = t;
        for i in (0..deg).rev() {
            c[i] = r % q;
            r /= q;
        }
        c[deg] = 1;
        let f = Poly::new(c);
        if is_irreducible(&f, fld) {
            if !certify_irreducible(&f, fld)? {
                return Err(Error::Internal("irreducible candidate failed certification".into()));
            }
            return Ok(f);
        }
        t = t
            .checked_add(1)
            .ok_or_else(|| Error::Internal(format!("no irreducible of degree {deg}")))?;
    }
}

/// Product of powers of distinct monic irreducibles, checked against `value`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyFactorization {
    entries: Vec<(Poly, u32)>,
    value: Poly,
}

impl PolyFactorization {
    pub fn new(entries: Vec<(Poly, u32)>, value: Poly, fld: &BaseField) -> Result<Self> {
        let mut prod = Poly::one();
        for (i, (r, e)) in entries.iter().enumerate() {
            if !r.is_monic() || r.degree().unwrap_or(0) == 0 || *e == 0 {
                return Err(Error::Validation("factors must be monic, nonconstant, e >= 1".into()));
            }
            if entries[..i].iter().any(|(s, _)| s == r) {
                return Err(Error::Validation("repeated factor".into()));
            }
            prod = prod.mul(&r.pow(*e, fld), fld);
        }
        if prod != value {
            return Err(Error::Internal(format!(
                "factor product {} != {}",
                prod.format(fld),
                value.format(fld)
            )));
        }
        Ok(PolyFactorization { entries, value })
    }

    /// Factorization of the constant 1.
    pub fn one() -> Self {
        PolyFactorization { entries: Vec::new(), value: Poly::one() }
    }

    pub fn entries(&self) -> &[(Poly, u32)] {
        &self.entries
    }

    pub fn value(&self) -> &Poly {
        &self.value
    }

    pub fn distinct_count(&self) -> usize {
        self.entries.len()
    }

    pub fn is_squarefree(&self) -> bool {
        self.entries.iter().all(|&(_, e)| e == 1)
    }

    /// Sub-factorization with the given exponent vector (each ≤ the entry's).
    pub fn with_exponents(&self, exps: &[u32], fld: &BaseField) -> PolyFactorization {
        let mut entries = Vec::new();
        let mut value = Poly::one();
        for ((r, _), &e) in self.entries.iter().zip(exps) {
            if e > 0 {
                value = value.mul(&r.pow(e, fld), fld);
                entries.push((r.clone(), e));
            }
        }
        PolyFactorization { entries, value }
    }

    pub fn format(&self, fld: &BaseField) -> String {
        if self.entries.is_empty() {
            return "1".into();
        }
        self.entries
            .iter()
            .map(|(r, e)| {
                let s = format!("({})", r.pretty(fld));
                if *e == 1 {
                    s
                } else {
                    format!("{s}^{e}")
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Distinct-degree factorization of a monic squarefree f.
fn distinct_degree(f: &Poly, fld: &BaseField) -> Result<Vec<(Poly, usize)>> {
    let x = Poly::x();
    let mut out = Vec::new();
    let mut rest = f.clone();
    let mut h = x.clone();
    let mut d = 0;
    while rest.degree().unwrap_or(0) >= 2 * (d + 1) {
        d += 1;
        h = h.powmod(fld.q(), &rest, fld)?;
        let g = h.sub(&x, fld).gcd(&rest, fld)?;
        if !g.is_one() {
            rest = rest.div_exact(&g, fld)?;
            h = h.rem(&rest, fld)?;
            out.push((g, d));
        }
    }
    if let Some(dr) = rest.degree() {
        if dr > 0 {
            out.push((rest, dr));
        }
    }
    Ok(out)
}

/// One attempt at splitting g (all irreducible factors of degree d).
fn split_once(g: &Poly, d: usize, fld: &BaseField, rng: &mut ChaCha8Rng) -> Result<Option<Poly>> {
    let n = g.degree().unwrap_or(0);
    let q = fld.q();
    let a = Poly::new((0..n).map(|_| rng.gen_range(0..q)).collect());
    if a.degree().unwrap_or(0) == 0 {
        return Ok(None);
    }
    let b = if fld.p() == 2 {
        // trace to F₂: Σ_{j < k·d} a^{2^j}
        let mut t = a.clone();
        let mut acc = a.clone();
        for _ in 1..(fld.k() as usize * d) {
            t = t.mulmod(&t, g, fld)?;
            acc = acc.add(&t, fld);
        }
        acc
    } else {
        // a^{(q^d−1)/2} = (a^{1+q+…+q^{d−1}})^{(q−1)/2}
        let mut t = a.clone();
        let mut acc = a.clone();
        for _ in 1..d {
            t = t.powmod(q, g, fld)?;
            acc = acc.mulmod(&t, g, fld)?;
        }
        acc.powmod((q - 1) / 2, g, fld)?.sub(&Poly::one(), fld)
    };
    if b.is_zero() {
        return Ok(None);
    }
    let h = b.gcd(g, fld)?;
    let dh = h.degree().unwrap_or(0);
    Ok((dh > 0 && dh < n).then_some(h))
}

/// Equal-degree splitting (Cantor–Zassenhaus) with a seeded generator.
fn equal_degree(g: &Poly, d: usize, fld: &BaseField, rng: &mut ChaCha8Rng) -> Result<Vec<Poly>> {
    if g.degree() == Some(d) {
        return Ok(vec![g.clone()]);
    }
    for _ in 0..10_000 {
        if let Some(h) = split_once(g, d, fld, rng)? {
            let other = g.div_exact(&h, fld)?;
            let mut out = equal_degree(&h, d, fld, rng)?;
            out.extend(equal_degree(&other, d, fld, rng)?);
            return Ok(out);
        }
    }
    Err(Error::Internal("equal-degree splitting did not converge".into()))
}

/// Monic irreducible factors of a monic squarefree f, sorted by (degree, coefficients).
pub fn factor_squarefree(f: &Poly, fld: &BaseField, seed: u64) -> Result<Vec<Poly>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for (g, d) in distinct_degree(f, fld)? {
        out.extend(equal_degree(&g, d, fld, &mut rng)?);
    }
    out.sort_by(|a, b| a.degree().cmp(&b.degree()).then_with(|| a.coeffs().cmp(b.coeffs())));
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ProfileRow {
    pub d: u64,
    /// ord_d q
    pub order: u64,
    /// φ(d) / ord_d q, the number of irreducible factors of the d-th cyclotomic polynomial
    pub count: u64,
}

/// Degrees of the irreducible factors of xⁿ − 1 over F_q, read off from
/// multiplicative orders: n = m·p^v and x^m − 1 = Π_{d | m} Φ_d.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CyclotomicProfile {
    pub q: u64,
    pub n: u64,
    pub m: u64,
    pub p_exponent: u32,
    pub rows: Vec<ProfileRow>,
}

impl CyclotomicProfile {
    /// Ω_q(xⁿ − 1), the number of distinct irreducible factors.
    pub fn omega(&self) -> u64 {
        self.rows.iter().map(|r| r.count).sum()
    }

    /// Multiplicity p^v of every factor.
    pub fn multiplicity(&self) -> u64 {
        let p = prime_power(self.q).map(|(p, _)| p).unwrap_or(1);
        p.pow(self.p_exponent)
    }
}

pub fn cyclotomic_profile(q: u64, n: u64) -> Result<CyclotomicProfile> {
    let (p, _) = prime_power(q).ok_or_else(|| Error::Domain(format!("{q} is not a prime power")))?;
    if n == 0 {
        return domain("n must be >= 1");
    }
    let mut m = n;
    let mut v = 0;
    while m.is_multiple_of(p) {
        m /= p;
        v += 1;
    }
    let mut rows = Vec::new();
    for d in crate::numtheory::divisors(m)? {
        let order = if d == 1 { 1 } else { multiplicative_order(q, d)? };
        let phi = euler_phi(d)?;
        if phi % order != 0 {
            return Err(Error::Internal(format!("ord_{d} {q} does not divide phi({d})")));
        }
        rows.push(ProfileRow { d, order, count: phi / order });
    }
    let total: u64 = rows.iter().map(|r| r.count * r.order).sum();
    if total != m {
        return Err(Error::Internal("profile degrees do not sum to m".into()));
    }
    Ok(CyclotomicProfile { q, n, m, p_exponent: v, rows })
}

/// xⁿ − 1 over `fld` as a product of powers of monic irreducibles.
pub fn factor_xn_minus_1(fld: &BaseField, n: usize) -> Result<PolyFactorization> {
    if n == 0 {
        return domain("n must be >= 1");
    }
    let p = fld.p() as usize;
    let mut m = n;
    let mut pv: u32 = 1;
    while m.is_multiple_of(p) {
        m /= p;
        pv *= p as u32;
    }
    let seed = fld.q() ^ ((n as u64) << 32) ^ 0x5851_f42d_4c95_7f2d;
    let factors = factor_squarefree(&Poly::xn_minus_one(m, fld), fld, seed)?;
    for r in &factors {
        if !certify_irreducible(r, fld)? {
            return Err(Error::Internal(format!("factor {} is reducible", r.format(fld))));
        }
    }
    let profile = cyclotomic_profile(fld.q(), n as u64)?;
    let mut expected: Vec<u64> = profile
        .rows
        .iter()
        .flat_map(|r| std::iter::repeat_n(r.order, r.count as usize))
        .collect();
    expected.sort_unstable();
    let got: Vec<u64> = factors.iter().map(|r| r.degree().unwrap() as u64).collect();
    if got != expected {
        return Err(Error::Internal("factor degrees disagree with the cyclotomic profile".into()));
    }
    let entries = factors.into_iter().map(|r| (r, pv)).collect();
    PolyFactorization::new(entries, Poly::xn_minus_one(n, fld), fld)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fp(p: u64) -> BaseField {
        BaseField::prime(p).unwrap()
    }

    #[test]
    fn factor_examples() {
        let f2 = fp(2);
        let fx = factor_xn_minus_1(&f2, 3).unwrap();
        assert_eq!(
            fx.entries(),
            &[(Poly::new(vec![1, 1]), 1), (Poly::new(vec![1, 1, 1]), 1)]
        );
        let fx = factor_xn_minus_1(&f2, 2).unwrap();
        assert_eq!(fx.entries(), &[(Poly::new(vec![1, 1]), 2)]);
        let f3 = fp(3);
        let fx = factor_xn_minus_1(&f3, 2).unwrap();
        assert_eq!(fx.entries(), &[(Poly::new(vec![1, 1]), 1), (Poly::new(vec![2, 1]), 1)]);
    }

    #[test]
    fn profile_examples() {
        let pr = cyclotomic_profile(2, 3).unwrap();
        assert_eq!(
            pr.rows,
            vec![ProfileRow { d: 1, order: 1, count: 1 }, ProfileRow { d: 3, order: 2, count: 1 }]
        );
        assert_eq!(pr.omega(), 2);
        for q in [2, 3, 4, 5, 7, 8, 9, 25] {
            assert_eq!(cyclotomic_profile(q, 1).unwrap().omega(), 1);
        }
        let pr = cyclotomic_profile(2, 5).unwrap();
        assert_eq!(pr.rows[1], ProfileRow { d: 5, order: 4, count: 1 });
        assert_eq!(pr.omega(), 2);
        assert!(matches!(cyclotomic_profile(6, 2), Err(Error::Domain(_))));
    }

    /// Brute-force factorization by trial division with monic polynomials in
    /// increasing degree; an independent oracle for small cases.
    fn trial_factor(f: &Poly, fld: &BaseField) -> Vec<(Poly, u32)> {
        let mut rest = f.clone();
        let mut out: Vec<(Poly, u32)> = Vec::new();
        let q = fld.q();
        let mut d = 1;
        while rest.degree().unwrap_or(0) > 0 {
            if 2 * d > rest.degree().unwrap() {
                out.push((rest.monic(fld), 1));
                break;
            }
            for t in 0..q.pow(d as u32) {
                let mut c: Vec<u64> = (0..d).map(|i| t / q.pow(i as u32) % q).collect();
                c.push(1);
                let g = Poly::new(c);
                while rest.rem(&g, fld).unwrap().is_zero() {
                    rest = rest.div_exact(&g, fld).unwrap();
                    match out.iter_mut().find(|(h, _)| *h == g) {
                        Some(e) => e.1 += 1,
                        None => out.push((g.clone(), 1)),
                    }
                }
            }
            d += 1;
        }
        // merge duplicate tail
        let mut merged: Vec<(Poly, u32)> = Vec::new();
        for (g, e) in out {
            match merged.iter_mut().find(|(h, _)| *h == g) {
                Some(x) => x.1 += e,
                None => merged.push((g, e)),
            }
        }
        merged.sort_by(|a, b| a.0.degree().cmp(&b.0.degree()).then(a.0.coeffs().cmp(b.0.coeffs())));
        merged
    }

    #[test]
    fn matches_trial_division_oracle() {
        let fields = vec![
            fp(2),
            fp(3),
            fp(5),
            fp(7),
            BaseField::new(2, 2, None).unwrap(),
            BaseField::new(3, 2, None).unwrap(),
            BaseField::new(2, 3, None).unwrap(),
        ];
        for fld in &fields {
            for n in 1..=12usize {
                if fld.q().pow(n as u32 / 2) > 5000 {
                    continue;
                }
                let fx = factor_xn_minus_1(fld, n).unwrap();
                let oracle = trial_factor(&Poly::xn_minus_one(n, fld), fld);
                assert_eq!(fx.entries(), oracle.as_slice(), "q={} n={n}", fld.q());
                let pr = cyclotomic_profile(fld.q(), n as u64).unwrap();
                assert_eq!(pr.omega() as usize, fx.distinct_count());
            }
        }
    }

    #[test]
    fn large_factorizations() {
        // degrees well past the exhaustive limit
        for (p, k, n) in [(2u64, 1u32, 63usize), (3, 1, 40), (2, 4, 45), (101, 1, 20)] {
            let fld = BaseField::new(p, k, None).unwrap();
            let fx = factor_xn_minus_1(&fld, n).unwrap();
            let pr = cyclotomic_profile(fld.q(), n as u64).unwrap();
            assert_eq!(pr.omega() as usize, fx.distinct_count());
        }
    }

    #[test]
    fn smallest_irreducibles_by_enumeration() {
        // oracle: the first candidate in the canonical order that the
        // exhaustive test accepts
        for (fld, deg) in [(fp(2), 4usize), (fp(3), 3), (fp(5), 2), (BaseField::new(2, 2, None).unwrap(), 2)] {
            let q = fld.q();
            let mut oracle = None;
            for c0 in if deg >= 2 { 1 } else { 0 }..q {
                for t in 0..q.pow(deg as u32 - 1) {
                    let mut c = vec![c0];
                    // c1 is the next most significant digit
                    for i in (0..deg - 1).rev() {
                        c.push(t / q.pow(i as u32) % q);
                    }
                    c.push(1);
                    let f = Poly::new(c);
                    if is_irreducible_exhaustive(&f, &fld) == Some(true) {
                        oracle = Some(f);
                        break;
                    }
                }
                if oracle.is_some() {
                    break;
                }
            }
            assert_eq!(smallest_irreducible(deg, &fld).unwrap(), oracle.unwrap());
        }
        assert_eq!(smallest_irreducible(1, &fp(3)).unwrap(), Poly::x());
    }

    proptest! {
        #[test]
        fn ben_or_matches_exhaustive(c in proptest::collection::vec(0u64..3, 1..7)) {
            let fld = fp(3);
            let mut c = c;
            c.push(1);
            let f = Poly::new(c);
            prop_assert_eq!(Some(is_irreducible(&f, &fld)), is_irreducible_exhaustive(&f, &fld));
        }
    }
}
