//! Integer arithmetic: factorization, Möbius and Euler functions, orders,
//! and empirical reports on summatory and extreme-value bounds.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use num_integer::Integer;
use serde::Serialize;

use crate::error::{domain, Error, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const TRIAL_LIMIT: u64 = 1_000_000;
const MERTENS_LIMIT: u64 = 10_000_000;

/// The one n excluded from the Rosser–Schoenfeld upper bound on n/φ(n).
pub const RS_EXCEPTION: u64 = 223_092_870;

fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_up_to(TRIAL_LIMIT))
}

/// Primes ≤ limit by an odd-only Eratosthenes sieve.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let half = (limit as usize - 1) / 2; // index i stands for 2i+1
    let mut composite = vec![false; half + 1];
    let mut i = 1;
    while (2 * i + 1) * (2 * i + 1) <= limit as usize {
        if !composite[i] {
            let p = 2 * i + 1;
            let mut j = p * p / 2;
            while j <= half {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    let mut out = vec![2];
    out.extend((1..=half).filter(|&i| !composite[i]).map(|i| 2 * i as u64 + 1));
    out
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin; the first twelve prime bases cover all of u64.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factorization with strictly increasing prime bases.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Factorization {
    entries: Vec<(u64, u32)>,
    value: u64,
}

impl Factorization {
    /// The empty factorization of 1.
    pub fn one() -> Self {
        Factorization { entries: Vec::new(), value: 1 }
    }

    pub fn from_entries(entries: Vec<(u64, u32)>) -> Result<Self> {
        let mut value: u64 = 1;
        for (i, &(p, e)) in entries.iter().enumerate() {
            if e == 0 {
                return Err(Error::Validation(format!("zero exponent on {p}")));
            }
            if i > 0 && entries[i - 1].0 >= p {
                return Err(Error::Validation("bases must be strictly increasing".into()));
            }
            if !is_prime(p) {
                return Err(Error::Validation(format!("{p} is not prime")));
            }
            let pe = p
                .checked_pow(e)
                .ok_or_else(|| Error::Resource(format!("{p}^{e} overflows u64")))?;
            value = value
                .checked_mul(pe)
                .ok_or_else(|| Error::Resource("factorization value overflows u64".into()))?;
        }
        Ok(Factorization { entries, value })
    }

    pub fn entries(&self) -> &[(u64, u32)] {
        &self.entries
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.iter().map(|&(p, _)| p)
    }

    /// Number of distinct prime factors.
    pub fn omega(&self) -> usize {
        self.entries.len()
    }

    pub fn is_squarefree(&self) -> bool {
        self.entries.iter().all(|&(_, e)| e == 1)
    }

    pub fn euler_phi(&self) -> u64 {
        self.entries
            .iter()
            .map(|&(p, e)| (p - 1) * p.pow(e - 1))
            .product()
    }

    pub fn mobius(&self) -> i8 {
        if !self.is_squarefree() {
            0
        } else if self.entries.len().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// All divisors, ascending.
    pub fn divisors(&self) -> Vec<u64> {
        let mut out = vec![1u64];
        for &(p, e) in &self.entries {
            let len = out.len();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    out.push(out[i] * pk);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Squarefree divisors with their Möbius signs, ascending by divisor.
    pub fn squarefree_divisors(&self) -> Vec<(u64, i8)> {
        let mut out = vec![(1u64, 1i8)];
        for &(p, _) in &self.entries {
            let len = out.len();
            for i in 0..len {
                let (d, s) = out[i];
                out.push((d * p, -s));
            }
        }
        out.sort_unstable();
        out
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "1");
        }
        for (i, &(p, e)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, " * ")?;
            }
            if e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Factor `n` by trial division up to 10⁶, then Brent's rho with a fixed
/// sequence of polynomial constants. Fully deterministic.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n < 2 {
        return domain(format!("factorize needs n >= 2, got {n}"));
    }
    if n > i64::MAX as u64 {
        return domain(format!("factorize needs n <= 2^63-1, got {n}"));
    }
    let mut map = BTreeMap::new();
    let mut m = n;
    let mut exhausted = true;
    for &p in small_primes() {
        if p * p > m {
            exhausted = false;
            break;
        }
        while m.is_multiple_of(p) {
            *map.entry(p).or_insert(0u32) += 1;
            m /= p;
        }
    }
    if m > 1 {
        if exhausted {
            split_large(m, &mut map);
        } else {
            *map.entry(m).or_insert(0) += 1;
        }
    }
    Factorization::from_entries(map.into_iter().collect())
}

fn split_large(m: u64, map: &mut BTreeMap<u64, u32>) {
    if m == 1 {
        return;
    }
    if is_prime(m) {
        *map.entry(m).or_insert(0) += 1;
        return;
    }
    let d = brent_rho(m);
    split_large(d, map);
    split_large(m / d, map);
}

/// A nontrivial factor of composite odd `n` with no prime factor below 10⁶.
fn brent_rho(n: u64) -> u64 {
    const BLOCK: u64 = 128;
    for c in 1u64.. {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let mut y = 2u64;
        let mut x = y;
        let mut ys = y;
        let mut q = 1u64;
        let mut g = 1u64;
        let mut r = 1u64;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BLOCK.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += BLOCK;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!("rho constant sequence is unbounded")
}

pub fn mobius(n: u64) -> Result<i8> {
    match n {
        0 => domain("mobius needs n >= 1"),
        1 => Ok(1),
        _ => Ok(factorize(n)?.mobius()),
    }
}

/// Euler's totient by the product formula, with φ(1) = 1.
pub fn euler_phi(n: u64) -> Result<u64> {
    match n {
        0 => domain("eulerPhi needs n >= 1"),
        1 => Ok(1),
        _ => Ok(factorize(n)?.euler_phi()),
    }
}

pub fn divisors(n: u64) -> Result<Vec<u64>> {
    match n {
        0 => domain("divisors needs n >= 1"),
        1 => Ok(vec![1]),
        _ => Ok(factorize(n)?.divisors()),
    }
}

/// Least e ≥ 1 with a^e ≡ 1 mod m.
pub fn multiplicative_order(a: u64, m: u64) -> Result<u64> {
    if m < 2 {
        return domain(format!("multiplicative order needs modulus >= 2, got {m}"));
    }
    let a = a % m;
    if a.gcd(&m) != 1 {
        return domain(format!("gcd({a}, {m}) != 1"));
    }
    let phi = euler_phi(m)?;
    if phi == 1 {
        return Ok(1);
    }
    let mut order = phi;
    for p in factorize(phi)?.primes() {
        while order % p == 0 && pow_mod(a, order / p, m) == 1 {
            order /= p;
        }
    }
    Ok(order)
}

/// If q = p^k with p prime, returns (p, k).
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let f = factorize(q).ok()?;
    match f.entries() {
        [(p, k)] => Some((*p, *k)),
        _ => None,
    }
}

/// Totients 0..=limit by a linear sieve (entry 0 is unused and set to 0).
pub fn phi_sieve(limit: usize) -> Vec<u64> {
    let mut phi = vec![0u64; limit + 1];
    let mut primes: Vec<usize> = Vec::new();
    if limit >= 1 {
        phi[1] = 1;
    }
    for i in 2..=limit {
        if phi[i] == 0 {
            phi[i] = i as u64 - 1;
            primes.push(i);
        }
        for &p in &primes {
            let ip = i * p;
            if ip > limit {
                break;
            }
            if i % p == 0 {
                phi[ip] = phi[i] * p as u64;
                break;
            }
            phi[ip] = phi[i] * (p as u64 - 1);
        }
    }
    phi
}

/// Möbius values 0..=limit by a linear sieve (entry 0 is unused).
pub fn mobius_sieve(limit: usize) -> Vec<i8> {
    let mut mu = vec![1i8; limit + 1];
    let mut is_comp = vec![false; limit + 1];
    let mut primes: Vec<usize> = Vec::new();
    if !mu.is_empty() {
        mu[0] = 0;
    }
    for i in 2..=limit {
        if !is_comp[i] {
            primes.push(i);
            mu[i] = -1;
        }
        for &p in &primes {
            let ip = i * p;
            if ip > limit {
                break;
            }
            is_comp[ip] = true;
            if i % p == 0 {
                mu[ip] = 0;
                break;
            }
            mu[ip] = -mu[i];
        }
    }
    mu
}

/// Smallest prime factor for 0..=limit (0 and 1 map to 0).
pub fn spf_sieve(limit: usize) -> Vec<u32> {
    let mut spf = vec![0u32; limit + 1];
    for i in 2..=limit {
        if spf[i] == 0 {
            let mut j = i;
            while j <= limit {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

/// |{1 ≤ k < n : k shares no prime with n}|, counted on a bitset of residues.
/// This is the counting definition of φ, independent of the product formula.
/// φ(1) = 1 by convention.
pub fn coprime_residue_count(n: u64, primes_of_n: &[u64], scratch: &mut Vec<u64>) -> u64 {
    if n == 1 {
        return 1;
    }
    let words = (n as usize).div_ceil(64);
    scratch.clear();
    scratch.resize(words, 0);
    for &p in primes_of_n {
        let mut j = p as usize;
        while j < n as usize {
            scratch[j >> 6] |= 1 << (j & 63);
            j += p as usize;
        }
    }
    let struck: u64 = scratch.iter().map(|w| w.count_ones() as u64).sum();
    n - 1 - struck
}

/// Counting-definition totients for every n in 1..=limit.
pub fn coprime_counts_up_to(limit: usize) -> Vec<u64> {
    let spf = spf_sieve(limit);
    let mut out = vec![0u64; limit + 1];
    let mut scratch = Vec::new();
    let mut primes = Vec::new();
    for n in 1..=limit {
        primes.clear();
        let mut m = n;
        while m > 1 {
            let p = spf[m] as usize;
            primes.push(p as u64);
            while m % p == 0 {
                m /= p;
            }
        }
        out[n] = coprime_residue_count(n as u64, &primes, &mut scratch);
    }
    out
}

#[derive(Debug, Clone, Copy, Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummatoryReport {
    pub x: u64,
    /// Σ_{n≤x} μ(n)
    pub mertens: i64,
    /// Σ_{n≤x} μ(n)/n
    pub reciprocal_sum: f64,
    /// Σ_{n≤x} μ(n){x/n}
    pub fractional_sum: f64,
    /// Σ_{n≤x} μ(n)⌊x/n⌋, exactly 1 for every x ≥ 1
    pub floor_sum: i64,
    /// |fractional_sum − (x·reciprocal_sum − 1)|
    pub identity_residual: f64,
    /// mertens, reciprocal_sum and fractional_sum+1 each divided by its
    /// x·e^{−√log x} (resp. e^{−√log x}) scale, with c = 1
    pub bound_ratios: [f64; 3],
}

pub fn mertens_report(x: u64) -> Result<SummatoryReport> {
    if x == 0 {
        return domain("mertensReport needs x >= 1");
    }
    if x > MERTENS_LIMIT {
        return Err(Error::Resource(format!("mertensReport capped at x <= {MERTENS_LIMIT}")));
    }
    let mu = mobius_sieve(x as usize);
    let mut mertens = 0i64;
    let mut floor_sum = 0i64;
    let mut recip = Neumaier::default();
    let mut frac = Neumaier::default();
    for n in 1..=x {
        let m = mu[n as usize] as i64;
        if m == 0 {
            continue;
        }
        mertens += m;
        floor_sum += m * (x / n) as i64;
        recip.add(m as f64 / n as f64);
        frac.add(m as f64 * (x % n) as f64 / n as f64);
    }
    let reciprocal_sum = recip.value();
    let fractional_sum = frac.value();
    let scale = (-(x as f64).ln().sqrt()).exp();
    let xs = x as f64 * scale;
    Ok(SummatoryReport {
        x,
        mertens,
        reciprocal_sum,
        fractional_sum,
        floor_sum,
        identity_residual: (fractional_sum - (x as f64 * reciprocal_sum - 1.0)).abs(),
        bound_ratios: [
            mertens as f64 / xs,
            reciprocal_sum / scale,
            (fractional_sum + 1.0) / xs,
        ],
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhiBoundsReport {
    pub n: u64,
    pub phi: u64,
    /// φ(n)/n
    pub ratio: f64,
    /// n/φ(n) < e^γ loglog n + 5/(2 loglog n), or n is the single exception
    pub rs_upper_ok: bool,
    pub rs_exception: bool,
    /// φ(n)/n ≥ (3/(e^γ π²)) / loglog n
    pub lower_ok: bool,
}

pub fn phi_bounds_report(n: u64) -> Result<PhiBoundsReport> {
    if n < 5 {
        return domain(format!("phiBoundsReport needs n >= 5, got {n}"));
    }
    let phi = euler_phi(n)?;
    Ok(phi_bounds_from(n, phi))
}

/// Same as [`phi_bounds_report`] with φ(n) supplied (for sieved sweeps).
pub fn phi_bounds_from(n: u64, phi: u64) -> PhiBoundsReport {
    let ratio = phi as f64 / n as f64;
    let ll = (n as f64).ln().ln();
    let eg = EULER_GAMMA.exp();
    let upper = eg * ll + 5.0 / (2.0 * ll);
    let rs_exception = n == RS_EXCEPTION;
    PhiBoundsReport {
        n,
        phi,
        ratio,
        rs_upper_ok: rs_exception || 1.0 / ratio < upper,
        rs_exception,
        lower_ok: ratio >= 3.0 / (eg * std::f64::consts::PI.powi(2)) / ll,
    }
}

/// Two readings of the totient-density product identity
/// φ(m)/D · Π_{r | m}(1 + 1/(r−1)) = 1 with m = qⁿ−1 and D ∈ {qⁿ, qⁿ−1}.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TotientProductCheck {
    pub m: u64,
    pub with_q_pow_n: f64,
    pub with_q_pow_n_minus_1: f64,
    pub holds_with_q_pow_n: bool,
    pub holds_with_q_pow_n_minus_1: bool,
}

pub fn totient_product_check(q_pow_n: u64) -> Result<TotientProductCheck> {
    if q_pow_n < 3 {
        return domain("totient product check needs q^n >= 3");
    }
    let m = q_pow_n - 1;
    let f = factorize(m)?;
    let prod: f64 = f.primes().map(|r| 1.0 + 1.0 / (r as f64 - 1.0)).product();
    let phi = f.euler_phi() as f64;
    let a = phi / q_pow_n as f64 * prod;
    let b = phi / m as f64 * prod;
    Ok(TotientProductCheck {
        m,
        with_q_pow_n: a,
        with_q_pow_n_minus_1: b,
        holds_with_q_pow_n: (a - 1.0).abs() < 1e-12,
        holds_with_q_pow_n_minus_1: (b - 1.0).abs() < 1e-12,
    })
}

/// Σ_{d | n} φ(q^d − 1) against qⁿ − 1, next to the standard Σ_{d | m} φ(d) = m.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivisorSumCheck {
    pub q: u64,
    pub n: u64,
    pub variant_lhs: u128,
    pub variant_rhs: u64,
    pub variant_holds: bool,
    pub standard_holds: bool,
}

pub fn divisor_sum_check(q: u64, n: u64) -> Result<DivisorSumCheck> {
    if q < 2 || n < 1 {
        return domain("divisor sum check needs q >= 2 and n >= 1");
    }
    let qn = q
        .checked_pow(n as u32)
        .ok_or_else(|| Error::Resource("q^n overflows u64".into()))?;
    let m = qn - 1;
    let mut lhs: u128 = 0;
    for d in divisors(n)? {
        let v = q.pow(d as u32) - 1;
        lhs += if v == 0 { 0 } else { euler_phi(v)? as u128 };
    }
    let standard: u64 = if m == 0 {
        0
    } else {
        divisors(m)?.into_iter().map(|d| euler_phi(d).unwrap_or(0)).sum()
    };
    Ok(DivisorSumCheck {
        q,
        n,
        variant_lhs: lhs,
        variant_rhs: m,
        variant_holds: lhs == m as u128,
        standard_holds: standard == m,
    })
}
