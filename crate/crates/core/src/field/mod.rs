//! The tower F_p ⊂ F_q ⊂ F_{q^n} and element arithmetic.
//!
//! An element is the coordinate vector of a polynomial in x of degree < n,
//! reduced modulo the extension modulus. Its *index* Σ cᵢ qⁱ (cᵢ as packed
//! F_q values) is the canonical enumeration order; the index digits in base
//! p are exactly the element's F_p coordinates.

mod ops;
mod spec;

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::OnceLock;

use rand::Rng;
use smallvec::SmallVec;

pub use ops::NormalTest;
pub use spec::{FieldSpec, RangeSpec};

use crate::error::{Error, Result};
use crate::numtheory::{factorize, Factorization};
use crate::polyfq::{
    certify_irreducible, factor_xn_minus_1, poly_phi, smallest_irreducible, BaseField, Poly,
    PolyFactorization,
};

pub type Coords = SmallVec<[u64; 8]>;

/// Element of F_{q^n}: n coordinates in F_q, low degree first.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ExtElement {
    coords: Coords,
}

impl ExtElement {
    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }
}

pub struct FieldCtx {
    base: BaseField,
    n: usize,
    ext_modulus: Poly,
    size: u64,
    mult_factorization: Factorization,
    add_factorization: PolyFactorization,
    /// (xⁿ − 1)/r for each distinct irreducible r | xⁿ − 1
    normal_cofactors: Vec<Poly>,
    /// x^{iq} mod the extension modulus, as coordinate vectors
    frob_images: Vec<Coords>,
    /// tr(e_j) for the F_p basis e_j = element with index p^j
    trace_weights: Vec<u64>,
    tau: OnceLock<Option<ExtElement>>,
    mul_count: AtomicU64,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldCtx({})", self.label())
    }
}

impl FieldCtx {
    /// Builds F_{(p^k)^n}. Omitted moduli default to the smallest irreducible
    /// in the canonical order (coefficients compared from the constant term up).
    pub fn build(
        p: u64,
        k: u32,
        n: usize,
        base_modulus: Option<Vec<u64>>,
        ext_modulus: Option<Poly>,
    ) -> Result<FieldCtx> {
        if n == 0 {
            return Err(Error::Domain("extension degree n must be >= 1".into()));
        }
        if k == 0 {
            return Err(Error::Domain("base degree k must be >= 1".into()));
        }
        let bits = (k as u64 * n as u64) as f64 * (p as f64).log2();
        let size = u32::try_from(k as u64 * n as u64)
            .ok()
            .and_then(|e| p.checked_pow(e))
            .filter(|&s| s <= i64::MAX as u64 && bits <= 63.0)
            .ok_or_else(|| Error::Resource(format!("{p}^({k}*{n}) exceeds 2^63-1")))?;
        let base = BaseField::new(p, k, base_modulus)?;
        let ext_modulus = match ext_modulus {
            Some(m) => {
                if m.degree() != Some(n) || !m.is_monic() {
                    return Err(Error::Validation(format!(
                        "extension modulus must be monic of degree {n}"
                    )));
                }
                if !certify_irreducible(&m, &base)? {
                    return Err(Error::Validation(format!(
                        "extension modulus {} is reducible over F_{}",
                        m.format(&base),
                        base.q()
                    )));
                }
                m
            }
            None => smallest_irreducible(n, &base)?,
        };
        let mult_factorization =
            if size >= 3 { factorize(size - 1)? } else { Factorization::one() };
        let add_factorization = factor_xn_minus_1(&base, n)?;
        let xn1 = add_factorization.value().clone();
        let normal_cofactors = add_factorization
            .entries()
            .iter()
            .map(|(r, _)| xn1.div_exact(r, &base))
            .collect::<Result<Vec<_>>>()?;
        let xq = Poly::x().powmod(base.q(), &ext_modulus, &base)?;
        let mut frob_images = Vec::with_capacity(n);
        let mut cur = Poly::one().rem(&ext_modulus, &base)?;
        for _ in 0..n {
            frob_images.push(pad(&cur, n));
            cur = cur.mulmod(&xq, &ext_modulus, &base)?;
        }
        let mut ctx = FieldCtx {
            base,
            n,
            ext_modulus,
            size,
            mult_factorization,
            add_factorization,
            normal_cofactors,
            frob_images,
            trace_weights: Vec::new(),
            tau: OnceLock::new(),
            mul_count: AtomicU64::new(0),
        };
        let kn = ctx.base.k() as usize * n;
        let mut weights = Vec::with_capacity(kn);
        let mut pj = 1u64;
        for _ in 0..kn {
            weights.push(ctx.trace_by_conjugates(&ctx.element_from_index(pj))?);
            pj = pj.wrapping_mul(p);
        }
        ctx.trace_weights = weights;
        ctx.mul_count.store(0, Ordering::Relaxed);
        Ok(ctx)
    }

    /// Parses "p^k:n[:basePoly][:extPoly]" and builds the field.
    pub fn from_spec(text: &str) -> Result<FieldCtx> {
        FieldSpec::parse(text)?.build()
    }

    pub fn base(&self) -> &BaseField {
        &self.base
    }

    pub fn p(&self) -> u64 {
        self.base.p()
    }

    pub fn k(&self) -> u32 {
        self.base.k()
    }

    pub fn q(&self) -> u64 {
        self.base.q()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// qⁿ
    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn ext_modulus(&self) -> &Poly {
        &self.ext_modulus
    }

    pub fn mult_factorization(&self) -> &Factorization {
        &self.mult_factorization
    }

    pub fn add_factorization(&self) -> &PolyFactorization {
        &self.add_factorization
    }

    /// φ(qⁿ − 1)
    pub fn phi_mult(&self) -> u64 {
        self.mult_factorization.euler_phi()
    }

    /// Φ_q(xⁿ − 1)
    pub fn phi_add(&self) -> Result<u64> {
        poly_phi(&self.add_factorization, self.q())
    }

    /// "q^n" style label, e.g. "2^2:3" for F_{4^3}.
    pub fn label(&self) -> String {
        format!("{}^{}:{}", self.p(), self.k(), self.n)
    }

    /// Extension multiplications performed so far (instrumentation for the
    /// search experiments).
    pub fn mul_count(&self) -> u64 {
        self.mul_count.load(Ordering::Relaxed)
    }

    pub fn zero(&self) -> ExtElement {
        ExtElement { coords: SmallVec::from_elem(0, self.n) }
    }

    pub fn one(&self) -> ExtElement {
        self.from_base(1)
    }

    /// Embeds c ∈ F_q.
    pub fn from_base(&self, c: u64) -> ExtElement {
        let mut e = self.zero();
        e.coords[0] = c;
        e
    }

    /// The class of x (the zero element when n = 1 and the modulus is x).
    pub fn generator(&self) -> ExtElement {
        if self.n == 1 {
            let c = self.base.neg(self.ext_modulus.coeff(0));
            return self.from_base(c);
        }
        let mut e = self.zero();
        e.coords[1] = 1;
        e
    }

    pub fn from_coords(&self, coords: &[u64]) -> Result<ExtElement> {
        if coords.len() != self.n || coords.iter().any(|&c| c >= self.q()) {
            return Err(Error::Validation(format!(
                "need {} coordinates below {}",
                self.n,
                self.q()
            )));
        }
        Ok(ExtElement { coords: coords.iter().copied().collect() })
    }

    /// Reduces a polynomial in x into the field.
    pub fn from_poly(&self, r: &Poly) -> Result<ExtElement> {
        Ok(ExtElement { coords: pad(&r.rem(&self.ext_modulus, &self.base)?, self.n) })
    }

    pub fn to_poly(&self, a: &ExtElement) -> Poly {
        Poly::new(a.coords.to_vec())
    }

    pub fn element_from_index(&self, mut idx: u64) -> ExtElement {
        let q = self.q();
        let mut coords = Coords::with_capacity(self.n);
        for _ in 0..self.n {
            coords.push(idx % q);
            idx /= q;
        }
        ExtElement { coords }
    }

    pub fn index_of(&self, a: &ExtElement) -> u64 {
        let q = self.q();
        a.coords.iter().rev().fold(0u64, |acc, &c| acc * q + c)
    }

    /// All elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = ExtElement> + '_ {
        (0..self.size).map(move |i| self.element_from_index(i))
    }

    pub fn random_element<R: Rng>(&self, rng: &mut R) -> ExtElement {
        self.element_from_index(rng.gen_range(0..self.size))
    }

    pub fn random_nonzero<R: Rng>(&self, rng: &mut R) -> ExtElement {
        self.element_from_index(rng.gen_range(1..self.size))
    }

    pub fn add(&self, a: &ExtElement, b: &ExtElement) -> ExtElement {
        ExtElement {
            coords: a.coords.iter().zip(&b.coords).map(|(&x, &y)| self.base.add(x, y)).collect(),
        }
    }

    pub fn sub(&self, a: &ExtElement, b: &ExtElement) -> ExtElement {
        ExtElement {
            coords: a.coords.iter().zip(&b.coords).map(|(&x, &y)| self.base.sub(x, y)).collect(),
        }
    }

    pub fn neg(&self, a: &ExtElement) -> ExtElement {
        ExtElement { coords: a.coords.iter().map(|&x| self.base.neg(x)).collect() }
    }

    /// Multiplies by c ∈ F_q.
    pub fn scale(&self, c: u64, a: &ExtElement) -> ExtElement {
        ExtElement { coords: a.coords.iter().map(|&x| self.base.mul(c, x)).collect() }
    }

    pub fn mul(&self, a: &ExtElement, b: &ExtElement) -> ExtElement {
        self.mul_count.fetch_add(1, Ordering::Relaxed);
        let n = self.n;
        let f = &self.base;
        let mut prod: SmallVec<[u64; 16]> = SmallVec::from_elem(0, 2 * n - 1);
        for (i, &x) in a.coords.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coords.iter().enumerate() {
                if y != 0 {
                    prod[i + j] = f.add(prod[i + j], f.mul(x, y));
                }
            }
        }
        let m = self.ext_modulus.coeffs();
        for i in (n..2 * n - 1).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            for j in 0..n {
                if m[j] != 0 {
                    prod[i - n + j] = f.sub(prod[i - n + j], f.mul(c, m[j]));
                }
            }
        }
        ExtElement { coords: prod[..n].iter().copied().collect() }
    }

    pub fn square(&self, a: &ExtElement) -> ExtElement {
        self.mul(a, a)
    }

    pub fn pow(&self, a: &ExtElement, mut e: u64) -> ExtElement {
        let mut acc = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    pub fn inv(&self, a: &ExtElement) -> Result<ExtElement> {
        if a.is_zero() {
            return Err(Error::Domain("inverse of zero".into()));
        }
        Ok(self.pow(a, self.size - 2))
    }

    /// Comma-separated F_q coordinates; slash-separated F_p digits when k > 1.
    pub fn format_element(&self, a: &ExtElement) -> String {
        a.coords.iter().map(|&c| self.base.format_elem(c)).collect::<Vec<_>>().join(",")
    }

    pub fn parse_element(&self, text: &str) -> Result<ExtElement> {
        let toks: Vec<&str> = text.split(',').collect();
        if toks.len() != self.n {
            return Err(Error::Parse {
                pos: 0,
                msg: format!("expected {} coordinates, got {}", self.n, toks.len()),
            });
        }
        let mut coords = Coords::with_capacity(self.n);
        let mut pos = 0;
        for tok in toks {
            coords.push(self.base.parse_elem(tok, pos)?);
            pos += tok.len() + 1;
        }
        Ok(ExtElement { coords })
    }
}

pub(crate) fn pad(r: &Poly, n: usize) -> Coords {
    let mut c: Coords = r.coeffs().iter().copied().collect();
    c.resize(n, 0);
    c
}
