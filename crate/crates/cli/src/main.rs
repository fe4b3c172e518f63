use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use pnfield::counting::{conjecture_sweep, density_sweep, sweep_json, write_csv, CONJECTURE_CSV_HEADER};
use pnfield::polyfq::cyclotomic_profile;
use pnfield::registry::{element_tests, subset_families};
use pnfield::seed::SeedSplitter;
use pnfield::subsets::{search_primitive_normal, threshold_experiment, SubsetSpec};
use pnfield::verify::{run_verify, VerifyConfig};
use pnfield::{Error, FieldCtx, FieldSpec, Poly, RangeSpec, DEFAULT_BUDGET};

#[derive(Parser)]
#[command(name = "pnfield", version, about = "Primitive and normal elements of finite fields")]
struct Cli {
    /// Seed for every randomized choice
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Largest field (in elements) that may be enumerated
    #[arg(long, global = true, env = "PNFIELD_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Write output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Exponent slack in the threshold (ln Q)(ln ln Q)^{1+ε}
    #[arg(long, global = true, default_value_t = 0.1)]
    epsilon: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Moduli, factorizations and totients of one field
    Info { field: String },
    /// Run the claim suite over a range of fields
    Verify {
        #[arg(long, default_value = "size<=256")]
        range: String,
    },
    /// Exact primitive/normal counts over a range
    Sweep {
        #[arg(long)]
        range: String,
    },
    /// Scan a subset for primitive normal elements.
    ///
    /// SUBSET is `heightBox d=2 H=1`, `hammingBall H=3 [center=E]`,
    /// `explicit E E ...` or a JSON object.
    Search {
        field: String,
        #[arg(required = true, num_args = 1..)]
        subset: Vec<String>,
    },
    /// Hit rates of random nonstructured subsets at the threshold size
    Experiment {
        field: String,
        #[arg(long, default_value = "uniform")]
        family: String,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        /// Constant in front of the threshold
        #[arg(long, default_value_t = 1.0)]
        multiplier: f64,
    },
    /// A fixed polynomial read in F_{q^n} for a range of n
    Conjecture {
        /// Base field, "p" or "p^k"
        #[arg(long)]
        q: String,
        /// `tau:D` (the reference element of F_{q^D}) or `poly:c0,c1,...`
        #[arg(long)]
        alpha: String,
        /// Degree range "lo..hi"
        #[arg(long, default_value = "2..8")]
        n: String,
    },
    /// Decide one element with a named method
    Classify {
        field: String,
        element: String,
        /// Method name; `list` prints the registered ones
        #[arg(long, default_value = "primitive.power-test")]
        method: String,
    },
}

struct Output {
    text: String,
    ok: bool,
}

fn field(text: &str) -> pnfield::Result<FieldCtx> {
    FieldCtx::from_spec(text)
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn info(ctx: &FieldCtx, format: Format) -> anyhow::Result<String> {
    let base = ctx.base();
    let profile = cyclotomic_profile(ctx.q(), ctx.n() as u64)?;
    let tau = ctx.reference_tau()?;
    let v = json!({
        "field": ctx.label(),
        "p": ctx.p(),
        "k": ctx.k(),
        "n": ctx.n(),
        "q": ctx.q(),
        "size": ctx.size(),
        "baseModulus": if ctx.k() > 1 { base.modulus().pretty(&pnfield::BaseField::prime(ctx.p())?) } else { "-".into() },
        "extModulus": ctx.ext_modulus().pretty(base),
        "qnMinus1": ctx.mult_factorization().to_string(),
        "xnMinus1": ctx.add_factorization().format(base),
        "phi": ctx.phi_mult(),
        "Phi": ctx.phi_add()?,
        "Omega": profile.omega(),
        "tau": ctx.format_element(tau),
    });
    Ok(match format {
        Format::Json => pretty(&v),
        _ => {
            let rows = [
                ("field", "field"),
                ("p", "p"),
                ("k", "k"),
                ("n", "n"),
                ("q", "q"),
                ("size", "size"),
                ("base modulus", "baseModulus"),
                ("extension modulus", "extModulus"),
                ("q^n - 1", "qnMinus1"),
                ("x^n - 1", "xnMinus1"),
                ("phi(q^n - 1)", "phi"),
                ("Phi_q(x^n - 1)", "Phi"),
                ("Omega_q(x^n - 1)", "Omega"),
                ("reference element", "tau"),
            ];
            rows.iter()
                .map(|(label, key)| {
                    let val = match &v[key] {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    };
                    format!("{label}: {val}\n")
                })
                .collect()
        }
    })
}

fn parse_subset(ctx: &FieldCtx, args: &[String], seed: u64) -> anyhow::Result<SubsetSpec> {
    let usage = || Error::Parse { pos: 0, msg: format!("cannot read subset {:?}", args.join(" ")) };
    if args[0].trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(&args.join(" ")).map_err(|e| Error::Parse { pos: e.column(), msg: e.to_string() })?;
        return Ok(SubsetSpec::from_json(ctx, &v)?);
    }
    let kv = |key: &str| -> Option<&str> { args[1..].iter().find_map(|a| a.strip_prefix(key)?.strip_prefix('=')) };
    let num = |key: &str| -> anyhow::Result<u64> {
        let s = kv(key).ok_or_else(|| Error::Parse { pos: 0, msg: format!("missing {key}=...") })?;
        Ok(s.parse().map_err(|_| Error::Parse { pos: 0, msg: format!("{key} must be an integer, got {s:?}") })?)
    };
    Ok(match args[0].as_str() {
        "heightBox" => SubsetSpec::HeightBox { d: num("d")? as usize, h: num("H")? },
        "hammingBall" => {
            let center = match kv("center") {
                Some(c) => ctx.parse_element(c)?,
                None => ctx.random_element(&mut SeedSplitter::new(seed).rng_for("search/center", 0)),
            };
            SubsetSpec::HammingBall { center, radius: num("H")? as u32 }
        }
        "explicit" => SubsetSpec::Explicit(args[1..].iter().map(|e| ctx.parse_element(e)).collect::<Result<_, _>>()?),
        _ => return Err(usage().into()),
    })
}

fn parse_range(text: &str) -> anyhow::Result<(usize, usize)> {
    let bad = || Error::Parse { pos: 0, msg: format!("expected lo..hi, got {text:?}") };
    let (a, b) = text.split_once("..").ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn run(cli: &Cli) -> anyhow::Result<Output> {
    let ok = |text| Ok(Output { text, ok: true });
    match &cli.command {
        Command::Info { field: f } => ok(info(&field(f)?, cli.format.unwrap_or(Format::Text))?),
        Command::Verify { range } => {
            let mut cfg = VerifyConfig::new(RangeSpec::parse(range)?, cli.seed);
            cfg.budget = cli.budget;
            let report = run_verify(&cfg)?;
            let text = match cli.format.unwrap_or(Format::Json) {
                Format::Text => report.text(),
                _ => pretty(&report.to_json()),
            };
            Ok(Output { text, ok: report.ok() })
        }
        Command::Sweep { range } => {
            let recs = density_sweep(&RangeSpec::parse(range)?, cli.budget)?;
            match cli.format.unwrap_or(Format::Csv) {
                Format::Json => ok(pretty(&sweep_json(&recs))),
                _ => {
                    let mut buf = Vec::new();
                    write_csv(&recs, &mut buf)?;
                    ok(String::from_utf8(buf)?)
                }
            }
        }
        Command::Search { field: f, subset } => {
            let ctx = field(f)?;
            let spec = parse_subset(&ctx, subset, cli.seed)?;
            let r = search_primitive_normal(&ctx, &spec, cli.epsilon, cli.budget)?;
            ok(pretty(&r.to_json(&ctx, &spec)))
        }
        Command::Experiment { field: f, family, trials, multiplier } => {
            let ctx = field(f)?;
            if ctx.size() > cli.budget {
                return Err(Error::Resource(format!("{} is over the budget of {}", ctx.label(), cli.budget)).into());
            }
            let fams = subset_families();
            let fam = fams.get(family)?;
            let r = threshold_experiment(&ctx, fam, cli.epsilon, *multiplier, *trials, cli.seed)?;
            match cli.format.unwrap_or(Format::Csv) {
                Format::Json => ok(pretty(&r.to_json())),
                _ => ok(r.csv()),
            }
        }
        Command::Conjecture { q, alpha, n } => {
            let (p, k) = match q.split_once('^') {
                Some((p, k)) => (p.parse()?, k.parse()?),
                None => (q.parse()?, 1),
            };
            let base = pnfield::BaseField::new(p, k, None)?;
            let r = if let Some(d) = alpha.strip_prefix("tau:") {
                let sub = FieldSpec::new(p, k, d.parse()?).build()?;
                sub.to_poly(sub.reference_tau()?)
            } else if let Some(c) = alpha.strip_prefix("poly:") {
                Poly::parse(c, &base)?
            } else {
                return Err(Error::Parse { pos: 0, msg: format!("alpha must be tau:D or poly:..., got {alpha:?}") }.into());
            };
            let (lo, hi) = parse_range(n)?;
            let rows = conjecture_sweep(p, k, &r, lo, hi)?;
            match cli.format.unwrap_or(Format::Csv) {
                Format::Json => ok(pretty(&json!({
                    "schema": "pnfield/1",
                    "kind": "conjecture",
                    "q": base.q(),
                    "alpha": r.format(&base),
                    "rows": rows,
                    "primitiveNormalCount": rows.iter().filter(|r| r.primitive_normal).count(),
                }))),
                _ => {
                    let mut s = format!("{CONJECTURE_CSV_HEADER}\n");
                    for row in &rows {
                        s.push_str(&row.csv_row());
                        s.push('\n');
                    }
                    ok(s)
                }
            }
        }
        Command::Classify { field: f, element, method } => {
            let reg = element_tests();
            if method == "list" {
                return ok(reg.names().join("\n") + "\n");
            }
            let test = reg.get(method)?;
            let ctx = field(f)?;
            let a = ctx.parse_element(element)?;
            if a.is_zero() {
                return Err(Error::Domain("zero is neither primitive nor normal".into()).into());
            }
            let ch = pnfield::characters::Characters::new(&ctx)?;
            let verdict = test.bind(&ch)?.decide(&a)?;
            let v = json!({ "field": ctx.label(), "element": ctx.format_element(&a), "method": method, "result": verdict });
            ok(pretty(&v))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::Parse { .. } | Error::Validation(_)) => 2,
        Some(Error::Domain(_)) => 3,
        Some(Error::Resource(_)) => 4,
        Some(Error::Internal(_)) => 5,
        None if e.downcast_ref::<std::num::ParseIntError>().is_some() => 2,
        None => 6,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|out| {
        match &cli.out {
            Some(path) => std::fs::write(path, &out.text).with_context(|| format!("writing {}", path.display()))?,
            None => std::io::stdout().write_all(out.text.as_bytes())?,
        }
        Ok(out.ok)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let code = exit_code(&e);
            let kind = if code == 2 { "usage error" } else { "error" };
            eprintln!("pnfield: {kind}: {e:#}");
            ExitCode::from(code)
        }
    }
}
