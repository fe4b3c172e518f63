//! Text forms for single fields and field ranges.

use super::FieldCtx;
use crate::error::{Error, Result};
use crate::numtheory::{is_prime, prime_power};
use crate::polyfq::{BaseField, Poly};

/// Parsed "p^k:n[:basePoly][:extPoly]". An empty poly slot keeps the default.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSpec {
    pub p: u64,
    pub k: u32,
    pub n: usize,
    pub base_modulus: Option<Vec<u64>>,
    ext_modulus: Option<(String, usize)>,
}

fn perr(pos: usize, msg: impl Into<String>) -> Error {
    Error::Parse { pos, msg: msg.into() }
}

fn parse_num<T: std::str::FromStr>(s: &str, pos: usize, what: &str) -> Result<T> {
    s.trim().parse().map_err(|_| perr(pos, format!("expected {what}, found {s:?}")))
}

impl FieldSpec {
    pub fn new(p: u64, k: u32, n: usize) -> Self {
        FieldSpec { p, k, n, base_modulus: None, ext_modulus: None }
    }

    pub fn parse(text: &str) -> Result<FieldSpec> {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() < 2 || parts.len() > 4 {
            return Err(perr(0, "expected p^k:n[:basePoly][:extPoly]"));
        }
        let (p, k) = match parts[0].split_once('^') {
            Some((p, k)) => (
                parse_num::<u64>(p, 0, "a prime p")?,
                parse_num::<u32>(k, p.len() + 1, "an exponent k")?,
            ),
            None => (parse_num::<u64>(parts[0], 0, "a prime p")?, 1),
        };
        if !is_prime(p) {
            return Err(perr(0, format!("{p} is not prime")));
        }
        let mut pos = parts[0].len() + 1;
        let n = parse_num::<usize>(parts[1], pos, "an extension degree n")?;
        pos += parts[1].len() + 1;
        let mut spec = FieldSpec::new(p, k, n);
        if let Some(bp) = parts.get(2).filter(|s| !s.trim().is_empty()) {
            let fp = BaseField::prime(p)?;
            spec.base_modulus = Some(Poly::parse_at(bp, &fp, pos)?.into_coeffs());
        }
        if let Some(&b) = parts.get(2) {
            pos += b.len() + 1;
        }
        if let Some(ep) = parts.get(3).filter(|s| !s.trim().is_empty()) {
            spec.ext_modulus = Some((ep.to_string(), pos));
        }
        Ok(spec)
    }

    pub fn q(&self) -> Option<u64> {
        self.p.checked_pow(self.k)
    }

    pub fn build(&self) -> Result<FieldCtx> {
        let ext = match &self.ext_modulus {
            None => None,
            Some((text, pos)) => {
                let base = BaseField::new(self.p, self.k, self.base_modulus.clone())?;
                Some(Poly::parse_at(text, &base, *pos)?)
            }
        };
        FieldCtx::build(self.p, self.k, self.n, self.base_modulus.clone(), ext)
    }
}

impl std::fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}^{}:{}", self.p, self.k, self.n)
    }
}

/// A set of (q, n) pairs to sweep over, always listed in (q, n) order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RangeSpec {
    /// "q=A..B,n=C..D": prime powers q in [A, B] and n in [C, D]
    Grid { q_lo: u64, q_hi: u64, n_lo: usize, n_hi: usize },
    /// "size<=N" or "size=L..N": every q, n ≥ 2 with L ≤ qⁿ ≤ N
    Size { lo: u64, hi: u64 },
    /// "fields=2^1:3;3^1:2"
    List(Vec<FieldSpec>),
    Empty,
}

impl RangeSpec {
    pub fn parse(text: &str) -> Result<RangeSpec> {
        let t = text.trim();
        if t.is_empty() || t == "none" {
            return Ok(RangeSpec::Empty);
        }
        if let Some(rest) = t.strip_prefix("size<=") {
            return Ok(RangeSpec::Size { lo: 1, hi: parse_num(rest, 6, "an upper size bound")? });
        }
        if let Some(rest) = t.strip_prefix("size=") {
            let (lo, hi) = parse_interval(rest, 5)?;
            return Ok(RangeSpec::Size { lo, hi });
        }
        if let Some(rest) = t.strip_prefix("fields=") {
            let mut out = Vec::new();
            for part in rest.split(';').filter(|s| !s.trim().is_empty()) {
                out.push(FieldSpec::parse(part.trim())?);
            }
            return Ok(RangeSpec::List(out));
        }
        let mut q = None;
        let mut n = None;
        let mut pos = 0;
        for part in t.split(',') {
            let (key, val) = part
                .split_once('=')
                .ok_or_else(|| perr(pos, "expected key=lo..hi"))?;
            let iv = parse_interval(val, pos + key.len() + 1)?;
            match key.trim() {
                "q" => q = Some(iv),
                "n" => n = Some(iv),
                other => return Err(perr(pos, format!("unknown range key {other:?}"))),
            }
            pos += part.len() + 1;
        }
        let (q_lo, q_hi) = q.ok_or_else(|| perr(0, "missing q=lo..hi"))?;
        let (n_lo, n_hi) = n.ok_or_else(|| perr(0, "missing n=lo..hi"))?;
        Ok(RangeSpec::Grid { q_lo, q_hi, n_lo: n_lo as usize, n_hi: n_hi as usize })
    }

    /// The (p, k, n) triples in (q, n) order.
    pub fn fields(&self) -> Vec<FieldSpec> {
        let mut out: Vec<FieldSpec> = match self {
            RangeSpec::Empty => Vec::new(),
            RangeSpec::List(v) => return v.clone(),
            RangeSpec::Grid { q_lo, q_hi, n_lo, n_hi } => {
                let mut v = Vec::new();
                for q in (*q_lo).max(2)..=*q_hi {
                    if let Some((p, k)) = prime_power(q) {
                        for n in (*n_lo).max(1)..=*n_hi {
                            v.push(FieldSpec::new(p, k, n));
                        }
                    }
                }
                v
            }
            RangeSpec::Size { lo, hi } => {
                let mut v = Vec::new();
                let mut q = 2u64;
                while q.saturating_mul(q) <= *hi {
                    if let Some((p, k)) = prime_power(q) {
                        let mut n = 2usize;
                        let mut qn = q * q;
                        loop {
                            if qn >= *lo {
                                v.push(FieldSpec::new(p, k, n));
                            }
                            match qn.checked_mul(q) {
                                Some(next) if next <= *hi => {
                                    qn = next;
                                    n += 1;
                                }
                                _ => break,
                            }
                        }
                    }
                    q += 1;
                }
                v
            }
        };
        out.sort_by_key(|s| (s.q().unwrap_or(u64::MAX), s.n));
        out
    }
}

fn parse_interval(s: &str, pos: usize) -> Result<(u64, u64)> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| perr(pos, format!("expected lo..hi, found {s:?}")))?;
    let lo = parse_num(a, pos, "a lower bound")?;
    let hi = parse_num(b, pos + a.len() + 2, "an upper bound")?;
    Ok((lo, hi))
}
