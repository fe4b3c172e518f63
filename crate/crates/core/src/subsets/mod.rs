//! Hamming weight and height, the subset families built from them, structure
//! detection and the small-subset primitive normal search.

mod experiment;

use std::collections::HashSet;

use num_integer::Integer;
use serde_json::{json, Value};

use crate::error::{domain, Error, Result};
use crate::field::{ExtElement, FieldCtx};
use crate::polyfq::{BaseField, Poly};

pub use experiment::{
    threshold_experiment, ExperimentReport, HammingFamily, HeightFamily, PnOracle, SubsetFamily,
    TrialRow, UniformFamily, EXPERIMENT_CSV_HEADER,
};

pub const DEFAULT_EPSILON: f64 = 0.1;

/// Number of nonzero coefficients.
pub fn hamming_weight(r: &Poly) -> u64 {
    r.coeffs().iter().filter(|&&c| c != 0).count() as u64
}

/// |v| for the representative of v in (−p/2, p/2].
fn centered(v: u64, p: u64) -> u64 {
    if v <= p / 2 {
        v
    } else {
        p - v
    }
}

/// Max centered magnitude over every F_p digit of every coefficient.
pub fn height(base: &BaseField, r: &Poly) -> u64 {
    r.coeffs()
        .iter()
        .flat_map(|&c| base.digits(c))
        .map(|d| centered(d, base.p()))
        .max()
        .unwrap_or(0)
}

pub fn weight_distance(ctx: &FieldCtx, r: &ExtElement, s: &ExtElement) -> u64 {
    hamming_weight(&ctx.to_poly(&ctx.sub(s, r)))
}

pub fn height_distance(ctx: &FieldCtx, r: &ExtElement, s: &ExtElement) -> u64 {
    height(ctx.base(), &ctx.to_poly(&ctx.sub(s, r)))
}

#[derive(Debug, Clone, PartialEq)]
pub enum SubsetSpec {
    /// center + c for c ∈ F_p whose binary expansion has at most `radius` ones
    HammingBall { center: ExtElement, radius: u32 },
    /// A_d(H)
    HeightBox { d: usize, h: u64 },
    Explicit(Vec<ExtElement>),
}

impl SubsetSpec {
    pub fn to_json(&self, ctx: &FieldCtx) -> Value {
        match self {
            SubsetSpec::HammingBall { center, radius } => {
                json!({"kind": "hammingBall", "center": ctx.format_element(center), "radius": radius})
            }
            SubsetSpec::HeightBox { d, h } => json!({"kind": "heightBox", "d": d, "H": h}),
            SubsetSpec::Explicit(els) => json!({
                "kind": "explicit",
                "elements": els.iter().map(|a| ctx.format_element(a)).collect::<Vec<_>>(),
            }),
        }
    }

    pub fn from_json(ctx: &FieldCtx, v: &Value) -> Result<SubsetSpec> {
        let bad = |m: &str| Error::Validation(format!("subset spec: {m}"));
        let int = |key: &str| v.get(key).and_then(Value::as_u64).ok_or_else(|| bad(&format!("missing integer \"{key}\"")));
        match v.get("kind").and_then(Value::as_str) {
            Some("hammingBall") => {
                let center = v.get("center").and_then(Value::as_str).ok_or_else(|| bad("missing \"center\""))?;
                let radius = u32::try_from(int("radius")?).map_err(|_| bad("radius too large"))?;
                Ok(SubsetSpec::HammingBall { center: ctx.parse_element(center)?, radius })
            }
            Some("heightBox") => Ok(SubsetSpec::HeightBox { d: int("d")? as usize, h: int("H")? }),
            Some("explicit") => {
                let items = v.get("elements").and_then(Value::as_array).ok_or_else(|| bad("missing \"elements\""))?;
                let els = items
                    .iter()
                    .map(|e| e.as_str().ok_or_else(|| bad("element must be a string")).and_then(|s| ctx.parse_element(s)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(SubsetSpec::Explicit(els))
            }
            Some(k) => Err(bad(&format!("unknown kind \"{k}\""))),
            None => Err(bad("missing \"kind\"")),
        }
    }

    /// Upper bound on the materialized size, known before enumerating.
    pub fn size_bound(&self, ctx: &FieldCtx) -> u64 {
        match self {
            SubsetSpec::HammingBall { .. } => ctx.p(),
            SubsetSpec::HeightBox { d, h } => {
                let side = 2u64.saturating_mul(*h).saturating_add(1);
                (0..=*d).fold(1u64, |acc, _| acc.saturating_mul(side)).min(ctx.size())
            }
            SubsetSpec::Explicit(els) => els.len() as u64,
        }
    }

    /// Duplicate-free elements in deterministic order.
    pub fn materialize(&self, ctx: &FieldCtx, budget: u64) -> Result<Vec<ExtElement>> {
        let bound = self.size_bound(ctx);
        if bound > budget {
            return Err(Error::Resource(format!("subset may have {bound} elements, over the budget of {budget}")));
        }
        match self {
            SubsetSpec::HammingBall { center, radius } => Ok(enumerate_hamming_ball(ctx, center, *radius)),
            SubsetSpec::HeightBox { d, h } => enumerate_height_box(ctx, *d, *h),
            SubsetSpec::Explicit(els) => {
                for a in els {
                    if a.coords().len() != ctx.n() || a.coords().iter().any(|&c| c >= ctx.q()) {
                        return Err(Error::Validation(format!("{a:?} is not an element of {}", ctx.label())));
                    }
                }
                let mut seen = HashSet::new();
                Ok(els.iter().filter(|a| seen.insert(ctx.index_of(a))).cloned().collect())
            }
        }
    }
}

/// center + c for c ∈ F_p of binary weight ≤ radius, in increasing c. A radius
/// at or above the bit length of p gives center + F_p.
pub fn enumerate_hamming_ball(ctx: &FieldCtx, center: &ExtElement, radius: u32) -> Vec<ExtElement> {
    (0..ctx.p())
        .filter(|c| c.count_ones() <= radius)
        .map(|c| ctx.add(center, &ctx.from_base(c)))
        .collect()
}

/// A_d(H): Σ aᵢxⁱ with integer |aᵢ| ≤ H, gcd(a₀,…,a_d) = 1, reduced mod p.
/// Tuples run in lexicographic order (a₀ slowest, each from −H to H) and the
/// first occurrence of each residue is kept.
pub fn enumerate_height_box(ctx: &FieldCtx, d: usize, h: u64) -> Result<Vec<ExtElement>> {
    if d >= ctx.n() {
        return domain(format!("height box degree {d} must be below n = {}", ctx.n()));
    }
    if d < 2 || h < 1 {
        return domain(format!("height box needs d ≥ 2 and H ≥ 1, got d={d}, H={h}"));
    }
    let h = h as i64;
    let side = (2 * h + 1) as u64;
    let total = side
        .checked_pow(d as u32 + 1)
        .ok_or_else(|| Error::Resource(format!("A_{d}({h}) has more than 2^64 tuples")))?;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut tuple = vec![-h; d + 1];
    for step in 0..total {
        if step > 0 {
            // odometer, last coordinate fastest
            let mut i = d;
            loop {
                if tuple[i] < h {
                    tuple[i] += 1;
                    break;
                }
                tuple[i] = -h;
                i -= 1;
            }
        }
        if tuple.iter().fold(0i64, |g, &a| g.gcd(&a)) != 1 {
            continue;
        }
        let mut coords = vec![0u64; ctx.n()];
        for (c, &a) in coords.iter_mut().zip(&tuple) {
            *c = ctx.base().from_int(a);
        }
        let el = ctx.from_coords(&coords)?;
        if seen.insert(ctx.index_of(&el)) {
            out.push(el);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Structure {
    /// S is all of F_{q^d}
    Subfield { degree: usize },
    /// S is an F_p-subspace of dimension `dim`
    Subspace { dim: u32 },
    Unstructured,
}

impl Structure {
    pub fn is_structured(&self) -> bool {
        !matches!(self, Structure::Unstructured)
    }

    pub fn reason(&self) -> String {
        match self {
            Structure::Subfield { degree } => format!("subfield of degree {degree} over F_q"),
            Structure::Subspace { dim } => format!("F_p-subspace of dimension {dim}"),
            Structure::Unstructured => "neither a subfield nor an F_p-subspace".into(),
        }
    }
}

/// Closure is checked on S itself, so a subspace must contain 0.
pub fn is_structured(ctx: &FieldCtx, s: &[ExtElement]) -> Result<Structure> {
    if s.is_empty() {
        return domain("structure of the empty set");
    }
    let idx: HashSet<u64> = s.iter().map(|a| ctx.index_of(a)).collect();
    let size = idx.len() as u64;
    let n = ctx.n();
    for d in (1..=n).filter(|d| n.is_multiple_of(*d)) {
        if ctx.q().checked_pow(d as u32) == Some(size) && s.iter().all(|a| ctx.frobenius(a, d as u64) == *a) {
            return Ok(Structure::Subfield { degree: d });
        }
    }
    let p = ctx.p();
    let mut dim = 0;
    let mut m = 1u64;
    while m < size {
        m = m.saturating_mul(p);
        dim += 1;
    }
    if m != size || !idx.contains(&0) {
        return Ok(Structure::Unstructured);
    }
    // additive closure already gives F_p-scaling
    for a in s {
        for b in s {
            if !idx.contains(&ctx.index_of(&ctx.add(a, b))) {
                return Ok(Structure::Unstructured);
            }
        }
    }
    Ok(Structure::Subspace { dim })
}

/// ln Q·(ln ln Q)^{1+ε}·multiplier; the inner logarithm is clamped at 0.
pub fn threshold(q_n: u64, epsilon: f64, multiplier: f64) -> f64 {
    let l = (q_n as f64).ln();
    l * l.ln().max(0.0).powf(1.0 + epsilon) * multiplier
}

pub fn threshold_size(q_n: u64, epsilon: f64, multiplier: f64) -> u64 {
    (threshold(q_n, epsilon, multiplier).ceil() as u64).max(1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchReport {
    pub subset_size: u64,
    pub witnesses: Vec<ExtElement>,
    pub threshold_size: f64,
    pub epsilon: f64,
    pub hit: bool,
    /// extension-field multiplications spent in the scan
    pub mul_ops: u64,
}

impl SearchReport {
    pub fn to_json(&self, ctx: &FieldCtx, spec: &SubsetSpec) -> Value {
        json!({
            "schema": "pnfield/1",
            "kind": "search",
            "field": ctx.label(),
            "subset": spec.to_json(ctx),
            "subsetSize": self.subset_size,
            "witnesses": self.witnesses.iter().map(|a| ctx.format_element(a)).collect::<Vec<_>>(),
            "thresholdSize": self.threshold_size,
            "epsilon": self.epsilon,
            "hit": self.hit,
            "mulOps": self.mul_ops,
        })
    }
}

pub fn search_primitive_normal(ctx: &FieldCtx, spec: &SubsetSpec, epsilon: f64, budget: u64) -> Result<SearchReport> {
    let set = spec.materialize(ctx, budget)?;
    let before = ctx.mul_count();
    let witnesses: Vec<ExtElement> = set.iter().filter(|a| ctx.is_primitive_normal(a)).cloned().collect();
    Ok(SearchReport {
        subset_size: set.len() as u64,
        hit: !witnesses.is_empty(),
        witnesses,
        threshold_size: threshold(ctx.size(), epsilon, 1.0),
        epsilon,
        mul_ops: ctx.mul_count() - before,
    })
}
