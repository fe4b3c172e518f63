//! The base field F_q = F_p[y]/(b(y)).
//!
//! Elements are packed as u64 indices Σ d_l p^l where d_l are the F_p
//! coordinates in the basis 1, y, …, y^{k−1}.

use smallvec::SmallVec;

use super::Poly;
use crate::error::{domain, Error, Result};
use crate::numtheory::{factorize, is_prime, mul_mod, pow_mod};

pub type Digits = SmallVec<[u64; 8]>;

/// Largest q for which log/exp tables are built.
const TABLE_LIMIT: u64 = 1 << 16;

#[derive(Debug, Clone)]
struct LogTables {
    /// exp[i] = g^i for 0 ≤ i < 2(q−1), doubled to skip a reduction
    exp: Vec<u32>,
    /// log[a] for a ≠ 0; log[0] unused
    log: Vec<u32>,
}

#[derive(Debug, Clone)]
pub struct BaseField {
    p: u64,
    k: u32,
    q: u64,
    /// monic, degree k, over F_p, ascending coefficients
    modulus: Vec<u64>,
    tables: Option<LogTables>,
}

impl PartialEq for BaseField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k && self.modulus == other.modulus
    }
}

impl Eq for BaseField {}

impl BaseField {
    /// The prime field F_p, modelled as F_p[y]/(y).
    pub fn prime(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return domain(format!("{p} is not prime"));
        }
        if p > i64::MAX as u64 {
            return Err(Error::Resource("p exceeds 2^63-1".into()));
        }
        Ok(BaseField { p, k: 1, q: p, modulus: vec![0, 1], tables: None })
    }

    /// F_{p^k}; with `modulus == None` the smallest irreducible in the
    /// canonical order is chosen.
    pub fn new(p: u64, k: u32, modulus: Option<Vec<u64>>) -> Result<Self> {
        let fp = Self::prime(p)?;
        if k == 0 {
            return domain("base degree k must be >= 1");
        }
        let q = p
            .checked_pow(k)
            .filter(|&q| q <= i64::MAX as u64)
            .ok_or_else(|| Error::Resource(format!("{p}^{k} exceeds 2^63-1")))?;
        let modulus = match modulus {
            Some(m) => {
                let m: Vec<u64> = m.into_iter().map(|c| c % p).collect();
                let poly = Poly::new(m.clone());
                if poly.degree() != Some(k as usize) || poly.leading() != 1 {
                    return Err(Error::Validation(format!(
                        "base modulus must be monic of degree {k}"
                    )));
                }
                if !super::factor::certify_irreducible(&poly, &fp)? {
                    return Err(Error::Validation(format!(
                        "base modulus {} is reducible over F_{p}",
                        poly.format(&fp)
                    )));
                }
                poly.coeffs().to_vec()
            }
            None => super::factor::smallest_irreducible(k as usize, &fp)?.coeffs().to_vec(),
        };
        if k == 1 {
            return Ok(BaseField { modulus, ..fp });
        }
        let mut f = BaseField { p, k, q, modulus, tables: None };
        if q <= TABLE_LIMIT {
            f.tables = Some(f.build_tables()?);
        }
        Ok(f)
    }

    fn build_tables(&self) -> Result<LogTables> {
        let order = self.q - 1;
        let primes: Vec<u64> = factorize(order)?.primes().collect();
        let g = (2..self.q)
            .find(|&g| primes.iter().all(|&r| self.pow_slow(g, order / r) != 1))
            .ok_or_else(|| Error::Internal("no generator of F_q^x".into()))?;
        let mut exp = vec![0u32; 2 * order as usize];
        let mut log = vec![0u32; self.q as usize];
        let mut x = 1u64;
        for i in 0..order as usize {
            exp[i] = x as u32;
            exp[i + order as usize] = x as u32;
            log[x as usize] = i as u32;
            x = self.mul_poly(x, g);
        }
        if x != 1 {
            return Err(Error::Internal("generator cycle did not close".into()));
        }
        Ok(LogTables { exp, log })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> Poly {
        Poly::new(self.modulus.clone())
    }

    pub fn is_prime_field(&self) -> bool {
        self.k == 1
    }

    /// F_p coordinates of `a`, length k.
    pub fn digits(&self, mut a: u64) -> Digits {
        let mut d = Digits::with_capacity(self.k as usize);
        for _ in 0..self.k {
            d.push(a % self.p);
            a /= self.p;
        }
        d
    }

    pub fn from_digits(&self, d: &[u64]) -> u64 {
        d.iter().rev().fold(0u64, |acc, &x| acc * self.p + x % self.p)
    }

    /// Embeds an integer as an element of the prime subfield.
    pub fn from_int(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }

    /// Is `a` in the prime subfield F_p?
    pub fn in_prime_field(&self, a: u64) -> bool {
        a < self.p
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        if self.k == 1 {
            let s = a + b;
            if s >= self.p {
                s - self.p
            } else {
                s
            }
        } else if self.p == 2 {
            a ^ b
        } else {
            let (mut a, mut b) = (a, b);
            let mut out = 0u64;
            let mut place = 1u64;
            for _ in 0..self.k {
                let s = (a % self.p + b % self.p) % self.p;
                out += s * place;
                place = place.wrapping_mul(self.p);
                a /= self.p;
                b /= self.p;
            }
            out
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if self.k == 1 {
            if a == 0 {
                0
            } else {
                self.p - a
            }
        } else if self.p == 2 {
            a
        } else {
            let d: Digits = self.digits(a).iter().map(|&x| (self.p - x) % self.p).collect();
            self.from_digits(&d)
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if self.k == 1 {
            return if self.p < 1 << 32 { a * b % self.p } else { mul_mod(a, b, self.p) };
        }
        if a == 0 || b == 0 {
            return 0;
        }
        match &self.tables {
            Some(t) => t.exp[(t.log[a as usize] + t.log[b as usize]) as usize] as u64,
            None => self.mul_poly(a, b),
        }
    }

    /// Multiplication by reducing the digit-polynomial product mod b(y).
    fn mul_poly(&self, a: u64, b: u64) -> u64 {
        let p = self.p;
        let k = self.k as usize;
        let da = self.digits(a);
        let db = self.digits(b);
        let mut prod = vec![0u64; 2 * k - 1];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + mul_mod(x, y, p)) % p;
            }
        }
        for i in (k..prod.len()).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            prod[i] = 0;
            for j in 0..k {
                let t = mul_mod(c, self.modulus[j], p);
                prod[i - k + j] = (prod[i - k + j] + p - t) % p;
            }
        }
        self.from_digits(&prod[..k])
    }

    /// Multiplies by an F_p scalar coordinate-wise.
    pub fn scale_fp(&self, c: u64, a: u64) -> u64 {
        if self.k == 1 {
            return mul_mod(c, a, self.p);
        }
        let d: Digits = self.digits(a).iter().map(|&x| mul_mod(c, x, self.p)).collect();
        self.from_digits(&d)
    }

    fn pow_slow(&self, a: u64, e: u64) -> u64 {
        let mut acc = 1u64;
        let mut base = a;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_poly(acc, base);
            }
            base = self.mul_poly(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn pow(&self, a: u64, e: u64) -> u64 {
        if self.k == 1 {
            return pow_mod(a, e, self.p);
        }
        if let Some(t) = &self.tables {
            if a == 0 {
                return if e == 0 { 1 } else { 0 };
            }
            let l = (t.log[a as usize] as u128 * e as u128 % (self.q - 1) as u128) as usize;
            return t.exp[l] as u64;
        }
        let mut acc = 1u64;
        let mut base = a;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> Result<u64> {
        if a == 0 {
            return domain("inverse of zero in F_q");
        }
        if let Some(t) = &self.tables {
            let l = t.log[a as usize] as u64;
            return Ok(t.exp[((self.q - 1 - l) % (self.q - 1)) as usize] as u64);
        }
        Ok(self.pow(a, self.q - 2))
    }

    /// Absolute trace F_q → F_p, Σ_{j<k} a^{p^j}.
    pub fn trace_to_prime(&self, a: u64) -> u64 {
        let mut acc = 0u64;
        let mut x = a;
        for _ in 0..self.k {
            acc = self.add(acc, x);
            x = self.pow(x, self.p);
        }
        acc
    }

    /// Text form: a plain integer for prime fields, slash-separated F_p
    /// digits otherwise (low digit first).
    pub fn format_elem(&self, a: u64) -> String {
        if self.k == 1 {
            return a.to_string();
        }
        self.digits(a).iter().map(|d| d.to_string()).collect::<Vec<_>>().join("/")
    }

    /// Parses one coordinate token. A plain integer names an element of F_p;
    /// a slash list gives all k digits.
    pub fn parse_elem(&self, tok: &str, offset: usize) -> Result<u64> {
        let parts: Vec<&str> = tok.split('/').collect();
        if parts.len() > 1 && parts.len() != self.k as usize {
            return Err(Error::Parse {
                pos: offset,
                msg: format!("expected {} slash-separated digits, got {}", self.k, parts.len()),
            });
        }
        let mut digits = Digits::new();
        let mut pos = offset;
        for part in parts {
            let t = part.trim();
            let v: i64 = t.parse().map_err(|_| Error::Parse {
                pos,
                msg: format!("not an integer: {t:?}"),
            })?;
            digits.push(self.from_int(v));
            pos += part.len() + 1;
        }
        Ok(self.from_digits(&digits))
    }
}
