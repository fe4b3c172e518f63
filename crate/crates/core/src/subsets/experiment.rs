//! Random nonstructured subsets at the threshold size.

use std::collections::HashSet;

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use super::{enumerate_height_box, is_structured, threshold, threshold_size};
use crate::characters::{Characters, TABLE_LIMIT};
use crate::error::{domain, Error, Result};
use crate::field::{ExtElement, FieldCtx, NormalTest};
use crate::numtheory::euler_phi;
use crate::seed::SeedSplitter;

pub const EXPERIMENT_CSV_HEADER: &str = "trial,size,hit,witnessCount";

/// Redraws allowed when a draw comes out structured.
const MAX_REDRAWS: usize = 64;

pub trait SubsetFamily: Send + Sync {
    fn name(&self) -> &'static str;
    /// `size` distinct elements; Domain error when the family has fewer.
    fn draw(&self, ctx: &FieldCtx, size: u64, rng: &mut ChaCha8Rng) -> Result<Vec<ExtElement>>;
}

fn too_small(ctx: &FieldCtx, family: &str, size: u64) -> Error {
    Error::Domain(format!("{family} family in {} has no subset of size {size}", ctx.label()))
}

/// Uniform size-subsets of the whole field.
pub struct UniformFamily;

impl SubsetFamily for UniformFamily {
    fn name(&self) -> &'static str {
        "uniform"
    }

    fn draw(&self, ctx: &FieldCtx, size: u64, rng: &mut ChaCha8Rng) -> Result<Vec<ExtElement>> {
        if size > ctx.size() {
            return Err(too_small(ctx, self.name(), size));
        }
        Ok(sample(rng, ctx.size() as usize, size as usize)
            .into_iter()
            .map(|i| ctx.element_from_index(i as u64))
            .collect())
    }
}

/// Uniform size-subsets of the smallest Hamming ball (weight counted over F_q
/// coordinates) around a random center that holds `size` points.
pub struct HammingFamily;

impl SubsetFamily for HammingFamily {
    fn name(&self) -> &'static str {
        "hammingBall"
    }

    fn draw(&self, ctx: &FieldCtx, size: u64, rng: &mut ChaCha8Rng) -> Result<Vec<ExtElement>> {
        let (n, q) = (ctx.n(), ctx.q() as u128);
        // shells[j] = C(n, j)(q − 1)^j
        let mut shells: Vec<u128> = Vec::new();
        let mut binom = 1u128;
        let mut total = 0u128;
        for j in 0..=n {
            if j > 0 {
                binom = binom * (n - j + 1) as u128 / j as u128;
            }
            let s = binom * (q - 1).pow(j as u32);
            shells.push(s);
            total += s;
            if total >= size as u128 {
                break;
            }
        }
        if total < size as u128 {
            return Err(too_small(ctx, self.name(), size));
        }
        let center = ctx.random_element(rng);
        let mut seen = HashSet::new();
        let mut out = Vec::with_capacity(size as usize);
        while (out.len() as u64) < size {
            let mut r = rng.gen_range(0..total);
            let j = shells.iter().position(|&s| {
                let hit = r < s;
                if !hit {
                    r -= s;
                }
                hit
            });
            let j = j.expect("weight within the ball");
            let mut coords = vec![0u64; n];
            for pos in sample(rng, n, j) {
                coords[pos] = rng.gen_range(1..ctx.q());
            }
            let el = ctx.add(&center, &ctx.from_coords(&coords)?);
            if seen.insert(ctx.index_of(&el)) {
                out.push(el);
            }
        }
        Ok(out)
    }
}

/// Uniform size-subsets of the smallest A_d(H) (H first, then d) that holds
/// `size` points; needs n ≥ 3.
pub struct HeightFamily;

impl HeightFamily {
    pub fn box_for(&self, ctx: &FieldCtx, size: u64) -> Result<Vec<ExtElement>> {
        if ctx.n() < 3 {
            return domain(format!("height boxes need n ≥ 3, {} has n = {}", ctx.label(), ctx.n()));
        }
        for h in 1..=(ctx.p() / 2).max(1) {
            for d in 2..ctx.n() {
                let side = 2 * h + 1;
                if side.checked_pow(d as u32 + 1).is_none_or(|t| t > 1 << 22) {
                    break;
                }
                let b = enumerate_height_box(ctx, d, h)?;
                if b.len() as u64 >= size {
                    return Ok(b);
                }
            }
        }
        Err(too_small(ctx, self.name(), size))
    }
}

impl SubsetFamily for HeightFamily {
    fn name(&self) -> &'static str {
        "heightBox"
    }

    fn draw(&self, ctx: &FieldCtx, size: u64, rng: &mut ChaCha8Rng) -> Result<Vec<ExtElement>> {
        let b = self.box_for(ctx, size)?;
        let mut idx: Vec<usize> = sample(rng, b.len(), size as usize).into_vec();
        idx.sort_unstable();
        Ok(idx.into_iter().map(|i| b[i].clone()).collect())
    }
}

/// Primitive-normal membership. Up to the table limit the whole field is
/// classified once: primitive elements are τ^L with gcd(L, qⁿ−1) = 1.
pub enum PnOracle<'a> {
    Table(&'a FieldCtx, Vec<bool>),
    Direct(&'a FieldCtx),
}

impl<'a> PnOracle<'a> {
    pub fn new(ctx: &'a FieldCtx) -> Result<Self> {
        if ctx.size() > TABLE_LIMIT {
            return Ok(PnOracle::Direct(ctx));
        }
        let ch = Characters::new(ctx)?;
        let exp = ch.exp_table()?;
        let m = ch.order();
        let mut pn = vec![false; ctx.size() as usize];
        for l in 1..=m {
            if num_integer::gcd(l, m) == 1 {
                let idx = exp[(l % m) as usize] as usize;
                pn[idx] = ctx.is_normal(&ctx.element_from_index(idx as u64), NormalTest::Divisor);
            }
        }
        Ok(PnOracle::Table(ctx, pn))
    }

    pub fn is_pn(&self, a: &ExtElement) -> bool {
        match self {
            PnOracle::Table(ctx, t) => t[ctx.index_of(a) as usize],
            PnOracle::Direct(ctx) => ctx.is_primitive_normal(a),
        }
    }

    pub fn count(&self) -> Option<u64> {
        match self {
            PnOracle::Table(_, t) => Some(t.iter().filter(|&&b| b).count() as u64),
            PnOracle::Direct(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TrialRow {
    pub trial: u64,
    pub size: u64,
    pub hit: bool,
    pub witness_count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExperimentReport {
    pub field: String,
    pub family: String,
    pub epsilon: f64,
    pub multiplier: f64,
    pub threshold: f64,
    pub size: u64,
    pub trials: u64,
    pub hits: u64,
    pub hit_fraction: f64,
    pub min_witnesses: u64,
    pub mean_witnesses: f64,
    /// smallest power of two at which every trial hit, if one was found
    pub always_hit_size: Option<u64>,
    /// #PN/qⁿ when the field was classified exhaustively
    pub pn_density: Option<f64>,
    pub rows: Vec<TrialRow>,
}

impl ExperimentReport {
    pub fn csv(&self) -> String {
        let mut s = format!("{EXPERIMENT_CSV_HEADER}\n");
        for r in &self.rows {
            s.push_str(&format!("{},{},{},{}\n", r.trial, r.size, r.hit, r.witness_count));
        }
        s
    }

    pub fn to_json(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("plain data");
        v["schema"] = json!("pnfield/1");
        v["kind"] = json!("thresholdExperiment");
        v
    }
}

fn draw_unstructured(
    ctx: &FieldCtx,
    family: &dyn SubsetFamily,
    size: u64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<ExtElement>> {
    for _ in 0..MAX_REDRAWS {
        let s = family.draw(ctx, size, rng)?;
        if !is_structured(ctx, &s)?.is_structured() {
            return Ok(s);
        }
    }
    domain(format!("{} family in {} kept drawing structured sets of size {size}", family.name(), ctx.label()))
}

fn run_trials(
    ctx: &FieldCtx,
    family: &dyn SubsetFamily,
    oracle: &PnOracle,
    size: u64,
    trials: u64,
    seeds: &SeedSplitter,
    label: &str,
) -> Result<Vec<TrialRow>> {
    (0..trials)
        .map(|t| {
            let mut rng = seeds.rng_for(label, t);
            let s = draw_unstructured(ctx, family, size, &mut rng)?;
            let w = s.iter().filter(|a| oracle.is_pn(a)).count() as u64;
            Ok(TrialRow { trial: t, size, hit: w > 0, witness_count: w })
        })
        .collect()
}

pub fn threshold_experiment(
    ctx: &FieldCtx,
    family: &dyn SubsetFamily,
    epsilon: f64,
    multiplier: f64,
    trials: u64,
    seed: u64,
) -> Result<ExperimentReport> {
    if trials == 0 {
        return domain("threshold experiment needs at least one trial");
    }
    let oracle = PnOracle::new(ctx)?;
    let seeds = SeedSplitter::new(seed);
    let size = threshold_size(ctx.size(), epsilon, multiplier);
    let base = format!("experiment/{}/{}", ctx.label(), family.name());
    let rows = run_trials(ctx, family, &oracle, size, trials, &seeds, &base)?;

    let mut always = None;
    let mut s = 1u64;
    while s <= ctx.size() {
        match run_trials(ctx, family, &oracle, s, trials, &seeds, &format!("{base}/doubling/{s}")) {
            Ok(r) if r.iter().all(|t| t.hit) => {
                always = Some(s);
                break;
            }
            Ok(_) => s *= 2,
            Err(Error::Domain(_)) => break,
            Err(e) => return Err(e),
        }
    }

    let hits = rows.iter().filter(|r| r.hit).count() as u64;
    let counts: Vec<u64> = rows.iter().map(|r| r.witness_count).collect();
    let density = oracle.count().map(|c| c as f64 / ctx.size() as f64);
    // cross-check the table against φ(qⁿ−1) ≥ #PN
    if let Some(c) = oracle.count() {
        if c > euler_phi(ctx.size() - 1)? {
            return Err(Error::Internal(format!("{}: {c} primitive normal elements", ctx.label())));
        }
    }
    Ok(ExperimentReport {
        field: ctx.label(),
        family: family.name().into(),
        epsilon,
        multiplier,
        threshold: threshold(ctx.size(), epsilon, multiplier),
        size,
        trials,
        hits,
        hit_fraction: hits as f64 / trials as f64,
        min_witnesses: counts.iter().copied().min().unwrap_or(0),
        mean_witnesses: counts.iter().sum::<u64>() as f64 / trials as f64,
        always_hit_size: always,
        pn_density: density,
        rows,
    })
}
