//! Exhaustive counts of primitive, normal and primitive normal elements,
//! density sweeps, lower bounds for Φ_q(xⁿ − 1), and the fixed-element sweep
//! over extension degrees.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::field::{ExtElement, FieldCtx, NormalTest, RangeSpec};
use crate::polyfq::{phi_xn_minus_1, Poly};

/// Counts for one field against the heuristic product φ(qⁿ−1)·Φ_q(xⁿ−1)/qⁿ.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DensityRecord {
    pub q: u64,
    pub k: u32,
    pub n: usize,
    pub num_primitive: u64,
    pub num_normal: u64,
    #[serde(rename = "numPN")]
    pub num_pn: u64,
    pub predicted: f64,
    /// numPN / predicted
    pub delta: f64,
    /// φ·Φ/q^{2n}, the density normalization
    pub predicted_density: f64,
}

pub const CSV_HEADER: &str = "q,k,n,numPrimitive,numNormal,numPN,predicted,delta,predictedDensity";

impl DensityRecord {
    fn new(ctx: &FieldCtx, num_primitive: u64, num_normal: u64, num_pn: u64) -> Self {
        let size = ctx.size() as f64;
        let predicted = num_primitive as f64 * num_normal as f64 / size;
        DensityRecord {
            q: ctx.q(),
            k: ctx.k(),
            n: ctx.n(),
            num_primitive,
            num_normal,
            num_pn,
            predicted,
            delta: num_pn as f64 / predicted,
            predicted_density: predicted / size,
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.q,
            self.k,
            self.n,
            self.num_primitive,
            self.num_normal,
            self.num_pn,
            self.predicted,
            self.delta,
            self.predicted_density
        )
    }
}

fn check_budget(ctx: &FieldCtx, budget: u64) -> Result<()> {
    if ctx.size() > budget {
        return Err(Error::Resource(format!(
            "{} has {} elements, over the budget of {budget}",
            ctx.label(),
            ctx.size()
        )));
    }
    Ok(())
}

/// Exhaustive counts; the two marginal counts must equal φ(qⁿ−1) and Φ_q(xⁿ−1).
pub fn exact_counts(ctx: &FieldCtx, budget: u64) -> Result<DensityRecord> {
    check_budget(ctx, budget)?;
    let (mut prim, mut norm, mut pn) = (0u64, 0u64, 0u64);
    for a in ctx.elements().skip(1) {
        let is_p = ctx.is_primitive(&a)?;
        let is_n = ctx.is_normal(&a, NormalTest::Divisor);
        prim += is_p as u64;
        norm += is_n as u64;
        pn += (is_p && is_n) as u64;
    }
    if prim != ctx.phi_mult() {
        return Err(Error::Internal(format!(
            "{}: {prim} primitive elements, φ(qⁿ−1) = {}",
            ctx.label(),
            ctx.phi_mult()
        )));
    }
    let big_phi = ctx.phi_add()?;
    if norm != big_phi {
        return Err(Error::Internal(format!(
            "{}: {norm} normal elements, Φ(xⁿ−1) = {big_phi}",
            ctx.label()
        )));
    }
    Ok(DensityRecord::new(ctx, prim, norm, pn))
}

/// Class sizes by additive order and by multiplicative order.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderCensus {
    /// (d, #{α : Ord α = d}) for every monic d | xⁿ − 1 that occurs
    pub additive: Vec<(Poly, u64)>,
    /// (d, #{α ≠ 0 : ord α = d})
    pub multiplicative: Vec<(u64, u64)>,
}

impl OrderCensus {
    pub fn additive_total(&self) -> u64 {
        self.additive.iter().map(|(_, c)| c).sum()
    }

    pub fn multiplicative_total(&self) -> u64 {
        self.multiplicative.iter().map(|(_, c)| c).sum()
    }

    /// Size of the class of additive order xⁿ − 1.
    pub fn maximal_additive(&self, ctx: &FieldCtx) -> u64 {
        let f = Poly::xn_minus_one(ctx.n(), ctx.base());
        self.additive.iter().find(|(d, _)| *d == f).map_or(0, |(_, c)| *c)
    }

    pub fn maximal_multiplicative(&self, ctx: &FieldCtx) -> u64 {
        let m = ctx.size() - 1;
        self.multiplicative.iter().find(|(d, _)| *d == m).map_or(0, |(_, c)| *c)
    }
}

pub fn order_census(ctx: &FieldCtx, budget: u64) -> Result<OrderCensus> {
    check_budget(ctx, budget)?;
    let mut add: BTreeMap<Poly, u64> = BTreeMap::new();
    let mut mult: BTreeMap<u64, u64> = BTreeMap::new();
    for a in ctx.elements() {
        *add.entry(ctx.additive_order(&a)).or_default() += 1;
        if !a.is_zero() {
            *mult.entry(ctx.multiplicative_order(&a)?).or_default() += 1;
        }
    }
    Ok(OrderCensus { additive: add.into_iter().collect(), multiplicative: mult.into_iter().collect() })
}

/// Φ_q(xⁿ−1)/(qⁿ−1) against 1/(5 log qⁿ) and, for q ≥ 8, 1/(5 log log qⁿ).
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LowerBoundRecord {
    pub q: u64,
    pub n: u64,
    pub phi: u64,
    pub ratio: f64,
    pub log_bound_ok: bool,
    /// None for q < 8
    pub loglog_bound_ok: Option<bool>,
    /// |ratio − (1 − n/q)| when n | q − 1
    pub prob_expansion_residual: Option<f64>,
    /// n(n−1)/q², the size of the next term in that expansion
    pub expansion_term: Option<f64>,
}

pub fn phi_poly_lower_bound_check(q: u64, n: u64) -> Result<LowerBoundRecord> {
    if q < 2 || n < 2 {
        return Err(Error::Domain(format!("need q ≥ 2 and n ≥ 2, got q={q}, n={n}")));
    }
    let qn = q
        .checked_pow(n as u32)
        .ok_or_else(|| Error::Resource(format!("{q}^{n} does not fit in 64 bits")))?;
    let phi = phi_xn_minus_1(q, n)?;
    let ratio = phi as f64 / (qn - 1) as f64;
    let log_qn = (qn as f64).ln();
    let (residual, term) = if (q - 1).is_multiple_of(n) {
        let r = (ratio - (1.0 - n as f64 / q as f64)).abs();
        (Some(r), Some((n * (n - 1)) as f64 / (q * q) as f64))
    } else {
        (None, None)
    };
    Ok(LowerBoundRecord {
        q,
        n,
        phi,
        ratio,
        log_bound_ok: ratio >= 1.0 / (5.0 * log_qn),
        loglog_bound_ok: (q >= 8).then(|| ratio >= 1.0 / (5.0 * log_qn.ln())),
        prob_expansion_residual: residual,
        expansion_term: term,
    })
}

/// Exact counts for every field of the range, in (q, n) order. The budget is
/// checked for all fields before any enumeration starts.
pub fn density_sweep(range: &RangeSpec, budget: u64) -> Result<Vec<DensityRecord>> {
    let specs = range.fields();
    for s in &specs {
        let size = s.q().and_then(|q| q.checked_pow(s.n as u32));
        if size.is_none_or(|v| v > budget) {
            return Err(Error::Resource(format!("{s} is over the enumeration budget of {budget}")));
        }
    }
    specs.iter().map(|s| exact_counts(&s.build()?, budget)).collect()
}

pub fn write_csv<W: Write>(records: &[DensityRecord], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(out, "{}", r.csv_row())?;
    }
    Ok(())
}

pub fn sweep_json(records: &[DensityRecord]) -> serde_json::Value {
    json!({ "schema": "pnfield/1", "kind": "densitySweep", "rows": records })
}

/// One extension degree of the fixed-element sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConjectureRow {
    pub n: usize,
    pub alpha: String,
    /// hypotheses that fail at this n; the flags are still computed
    pub violated: Vec<&'static str>,
    pub primitive: bool,
    pub normal: bool,
    pub primitive_normal: bool,
    /// extension-field multiplications spent deciding the two flags
    pub mul_ops: u64,
    /// φ(qⁿ−1)Φ_q(xⁿ−1)/q^{2n}
    pub heuristic: f64,
}

pub const CONJECTURE_CSV_HEADER: &str = "n,alpha,violated,primitive,normal,primitiveNormal,mulOps,heuristic";

impl ConjectureRow {
    pub fn csv_row(&self) -> String {
        format!(
            "{},\"{}\",{},{},{},{},{},{}",
            self.n,
            self.alpha,
            self.violated.join("+"),
            self.primitive,
            self.normal,
            self.primitive_normal,
            self.mul_ops,
            self.heuristic
        )
    }
}

/// The hypotheses on a fixed α that fail in `ctx`.
pub fn conjecture_violations(ctx: &FieldCtx, a: &ExtElement) -> Result<Vec<&'static str>> {
    let mut v = Vec::new();
    if a.is_zero() {
        v.push("nonzero");
        return Ok(v);
    }
    if *a == ctx.one() || *a == ctx.neg(&ctx.one()) {
        v.push("not ±1");
    }
    let n = ctx.n() as u64;
    if (1..n).any(|d| n.is_multiple_of(d) && ctx.frobenius(a, d) == *a) {
        v.push("not in a proper subfield");
    }
    // in characteristic 2 every element is a square
    if ctx.p() == 2 || ctx.pow(a, (ctx.size() - 1) / 2) == ctx.one() {
        v.push("non-square");
    }
    if ctx.trace(a) == 0 {
        v.push("nonzero trace");
    }
    Ok(v)
}

/// The polynomial r ∈ F_q[x] read in F_{qⁿ} (reduced by each canonical
/// modulus) for every n of the range, with its primitive and normal flags.
/// Conditions that fail for every n are errors.
pub fn conjecture_sweep(p: u64, k: u32, r: &Poly, n_lo: usize, n_hi: usize) -> Result<Vec<ConjectureRow>> {
    if p == 2 {
        return Err(Error::Domain("non-square: every element of a field of characteristic 2 is a square".into()));
    }
    if r.degree().is_none_or(|d| d == 0) {
        return Err(Error::Domain("not in a proper subfield: α is a constant".into()));
    }
    if n_lo < 1 || n_lo > n_hi {
        return Err(Error::Domain(format!("empty degree range {n_lo}..{n_hi}")));
    }
    let mut rows = Vec::new();
    for n in n_lo..=n_hi {
        let ctx = FieldCtx::build(p, k, n, None, None)?;
        let a = ctx.from_poly(r)?;
        let violated = conjecture_violations(&ctx, &a)?;
        let before = ctx.mul_count();
        let (primitive, normal) = if a.is_zero() {
            (false, false)
        } else {
            (ctx.is_primitive(&a)?, ctx.is_normal(&a, NormalTest::Divisor))
        };
        let mul_ops = ctx.mul_count() - before;
        let size = ctx.size() as f64;
        rows.push(ConjectureRow {
            n,
            alpha: ctx.format_element(&a),
            violated,
            primitive,
            normal,
            primitive_normal: primitive && normal,
            mul_ops,
            heuristic: ctx.phi_mult() as f64 * ctx.phi_add()? as f64 / (size * size),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldCtx;

    fn field(p: u64, k: u32, n: usize) -> FieldCtx {
        FieldCtx::build(p, k, n, None, None).unwrap()
    }

    /// Brute-force oracle: multiplicative order by repeated multiplication,
    /// normality by the rank of the conjugates.
    fn brute(ctx: &FieldCtx) -> (u64, u64, u64) {
        let m = ctx.size() - 1;
        let (mut p, mut n, mut pn) = (0, 0, 0);
        for a in ctx.elements().skip(1) {
            let mut x = a.clone();
            let mut ord = 1;
            while x != ctx.one() {
                x = ctx.mul(&x, &a);
                ord += 1;
            }
            let is_p = ord == m;
            let is_n = ctx.rank(&ctx.conjugates(&a)) == ctx.n();
            p += is_p as u64;
            n += is_n as u64;
            pn += (is_p && is_n) as u64;
        }
        (p, n, pn)
    }

    #[test]
    fn small_fields() {
        let r = exact_counts(&field(2, 1, 2), 1 << 10).unwrap();
        assert_eq!((r.num_primitive, r.num_normal, r.num_pn), (2, 2, 2));
        assert_eq!(r.delta, 2.0);
        let r = exact_counts(&field(2, 1, 3), 1 << 10).unwrap();
        assert_eq!((r.num_primitive, r.num_normal, r.num_pn), (6, 3, 3));
        let r = exact_counts(&field(2, 1, 1), 1 << 10).unwrap();
        assert_eq!((r.num_primitive, r.num_normal), (1, 1));
        assert!(matches!(exact_counts(&field(2, 1, 12), 1000), Err(Error::Resource(_))));
    }

    #[test]
    fn counts_match_brute_force() {
        for (p, k, n) in [(2, 1, 4), (2, 1, 6), (3, 1, 3), (2, 2, 3), (5, 1, 2), (3, 2, 2), (7, 1, 2)] {
            let ctx = field(p, k, n);
            let r = exact_counts(&ctx, 1 << 12).unwrap();
            assert_eq!((r.num_primitive, r.num_normal, r.num_pn), brute(&ctx), "{}", ctx.label());
            assert!(r.num_pn <= r.num_primitive.min(r.num_normal));
        }
    }

    #[test]
    fn census_invariants() {
        for (p, k, n) in [(2, 1, 4), (3, 1, 3), (2, 2, 2), (5, 1, 2), (2, 1, 6)] {
            let ctx = field(p, k, n);
            let c = order_census(&ctx, 1 << 12).unwrap();
            assert_eq!(c.additive_total(), ctx.size());
            assert_eq!(c.maximal_additive(&ctx), ctx.phi_add().unwrap());
            assert_eq!(c.multiplicative_total(), ctx.size() - 1);
            assert_eq!(c.maximal_multiplicative(&ctx), ctx.phi_mult());
        }
    }

    #[test]
    fn lower_bound_examples() {
        let r = phi_poly_lower_bound_check(3, 2).unwrap();
        assert_eq!(r.phi, 4);
        assert_eq!(r.ratio, 0.5);
        assert!(r.log_bound_ok);
        assert_eq!(r.loglog_bound_ok, None);
        let r = phi_poly_lower_bound_check(2, 2).unwrap();
        assert!((r.ratio - 2.0 / 3.0).abs() < 1e-15 && r.log_bound_ok);
        let r = phi_poly_lower_bound_check(8, 7).unwrap();
        assert_eq!(r.phi, 7u64.pow(7));
        let want = 7f64.powi(7) / (8f64.powi(7) - 1.0);
        assert!((r.ratio - want).abs() < 1e-15);
        assert!(r.loglog_bound_ok.is_some() && r.prob_expansion_residual.is_some());
        assert!(phi_poly_lower_bound_check(2, 1).is_err());
    }

    #[test]
    fn sweep_table() {
        let recs = density_sweep(&RangeSpec::parse("q=2..5,n=2..4").unwrap(), 1 << 12).unwrap();
        assert_eq!(recs.len(), 12);
        let mut buf = Vec::new();
        write_csv(&recs, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 13);
        assert!(text.starts_with("q,k,n,numPrimitive,numNormal,numPN,predicted,delta"));
        assert!(text.contains("\n2,1,2,2,2,2,1,2,0.25\n"));
        let empty = density_sweep(&RangeSpec::Empty, 1).unwrap();
        let mut buf = Vec::new();
        write_csv(&empty, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{CSV_HEADER}\n"));
        assert!(density_sweep(&RangeSpec::parse("q=2..2,n=20..20").unwrap(), 1000).is_err());
    }

    #[test]
    fn conjecture_rows() {
        // x over F_3 is a root of each canonical modulus
        let rows = conjecture_sweep(3, 1, &Poly::x(), 2, 8).unwrap();
        assert_eq!(rows.len(), 7);
        for r in &rows {
            let ctx = field(3, 1, r.n);
            let a = ctx.generator();
            assert_eq!(r.primitive, ctx.is_primitive(&a).unwrap());
            assert_eq!(r.normal, ctx.rank(&ctx.conjugates(&a)) == r.n);
            assert!(!r.violated.contains(&"not in a proper subfield"));
            assert!(r.mul_ops > 0);
        }
        assert!(matches!(conjecture_sweep(2, 1, &Poly::x(), 2, 4), Err(Error::Domain(m)) if m.contains("non-square")));
        assert!(conjecture_sweep(3, 1, &Poly::one(), 2, 4).is_err());
        let ctx = field(5, 1, 2);
        assert!(conjecture_violations(&ctx, &ctx.one()).unwrap().contains(&"not ±1"));
        assert!(conjecture_violations(&ctx, &ctx.from_base(2)).unwrap().contains(&"not in a proper subfield"));
    }
}
