use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use charsum_core::characters::crt_character;
use charsum_core::energy::{cong_energy, ff_box_energy, linear_forms_energy, EnergyMethod};
use charsum_core::field::build_field;
use charsum_core::harness::cache::{self, JCache};
use charsum_core::harness::exponents::compare_exponents;
use charsum_core::harness::{self, CampaignConfig, Target, WeightKind};
use charsum_core::mean_values::{vinogradov_count_mitm, vinogradov_count_naive, VinogradovParams, DEFAULT_BUDGET};
use charsum_core::mixed::LinearSystem;
use charsum_core::modular::{factor_squarefree, factorize};

#[derive(Parser)]
#[command(name = "csl", version, about = "Mixed character sums: evaluation and verification campaigns")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also write report records as CSV (verify only).
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    /// Operation budget for exhaustive counts.
    #[arg(long, global = true)]
    budget: Option<u128>,
    #[arg(long, global = true)]
    override_hypotheses: bool,
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Factor a squarefree modulus.
    Factor { q: u64 },
    /// Dirichlet characters.
    Char {
        #[command(subcommand)]
        cmd: CharCmd,
    },
    /// Number of solutions of the Vinogradov system.
    Jcount {
        #[arg(long)]
        r: u32,
        #[arg(long)]
        d: u32,
        #[arg(long = "V")]
        v: u64,
        /// Counting routine; without it the cache is consulted first.
        #[arg(long, value_enum)]
        method: Option<JMethod>,
    },
    /// Multiplicative energies.
    Energy {
        #[command(subcommand)]
        cmd: EnergyCmd,
    },
    /// Run a verification campaign.
    Verify(VerifyArgs),
    /// Saving exponents of the competing bounds at one parameter point.
    CompareExponents {
        #[arg(long)]
        n: f64,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        r: u32,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
    },
    /// The on-disk J-count cache.
    Cache {
        #[command(subcommand)]
        cmd: CacheCmd,
    },
}

#[derive(Subcommand)]
enum CharCmd {
    /// chi(n) for the character with the given per-prime indices.
    Eval {
        #[arg(long)]
        q: u64,
        /// Comma-separated indices, one per prime factor in increasing order.
        #[arg(long, value_delimiter = ',')]
        indices: Vec<u64>,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum JMethod {
    Naive,
    Mitm,
}

#[derive(Clone, Copy, ValueEnum)]
enum EMethod {
    Naive,
    Hashed,
}

impl From<EMethod> for EnergyMethod {
    fn from(m: EMethod) -> Self {
        match m {
            EMethod::Naive => EnergyMethod::Naive,
            EMethod::Hashed => EnergyMethod::Hashed,
        }
    }
}

#[derive(Subcommand)]
enum EnergyCmd {
    /// n1 u1 = n2 u2 (mod q) over an interval and units up to U.
    Cong {
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        m: i64,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        u: u64,
        #[arg(long, value_enum, default_value = "hashed")]
        method: EMethod,
    },
    /// x1 x2 = x3 x4 over boxes in GF(q^n).
    Ffbox {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        h: u64,
        #[arg(long)]
        u: u64,
        #[arg(long, value_enum, default_value = "hashed")]
        method: EMethod,
    },
    /// Simultaneous energy of products of linear forms.
    Linforms {
        #[arg(long)]
        q: u64,
        /// Rows separated by ';', entries by ',', e.g. "1,2;3,5".
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
        #[arg(long)]
        h: u64,
        #[arg(long)]
        u: u64,
        #[arg(long, value_enum, default_value = "hashed")]
        method: EMethod,
    },
}

#[derive(Subcommand)]
enum CacheCmd {
    Ls,
    Clear,
}

#[derive(Args)]
struct VerifyArgs {
    /// Campaign target, e.g. thm1, lemma3, weil, smoothing, phi.
    target: String,
    /// JSON campaign config; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    q_min: Option<u64>,
    #[arg(long)]
    q_max: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    moduli: Option<Vec<u64>>,
    #[arg(long)]
    d: Option<u32>,
    #[arg(long)]
    r: Option<u32>,
    #[arg(long)]
    r_d: Option<u32>,
    #[arg(long)]
    s: Option<u32>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    samples: Option<u32>,
    #[arg(long)]
    length: Option<u64>,
    #[arg(long)]
    h: Option<u64>,
    #[arg(long)]
    u: Option<u64>,
    #[arg(long = "v-max")]
    v_max: Option<u64>,
    #[arg(long)]
    slack: Option<f64>,
    #[arg(long)]
    constant: Option<f64>,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    grid: Option<u64>,
    #[arg(long)]
    field_max: Option<u64>,
    #[arg(long)]
    phi_weights: bool,
    #[arg(long)]
    diagnostics: bool,
}

fn campaign(args: &VerifyArgs, g: &Global) -> Result<CampaignConfig> {
    let target = Target::parse(&args.target)?;
    let mut cfg = match &args.config {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            let mut c: CampaignConfig = serde_json::from_str(&text).context("parsing campaign config")?;
            c.target = target;
            c
        }
        None => CampaignConfig::new(target),
    };
    macro_rules! set {
        ($($field:ident),*) => { $( if let Some(x) = args.$field.clone() { cfg.$field = x; } )* };
    }
    macro_rules! set_opt {
        ($($field:ident),*) => { $( if args.$field.is_some() { cfg.$field = args.$field.clone(); } )* };
    }
    set!(q_min, q_max, d, n, samples, slack, constant, grid, field_max);
    set_opt!(moduli, r, r_d, s, length, h, u, v_max, threshold);
    if args.phi_weights {
        cfg.weights = WeightKind::Phi;
    }
    cfg.diagnostics |= args.diagnostics;
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    if let Some(b) = g.budget {
        cfg.budget = b;
    }
    cfg.override_hypotheses |= g.override_hypotheses;
    cfg.threads = g.threads;
    Ok(cfg)
}

fn parse_matrix(s: &str) -> Result<Vec<Vec<i64>>> {
    s.split(';')
        .map(|row| {
            row.split(',')
                .map(|x| x.trim().parse::<i64>().with_context(|| format!("bad matrix entry {x:?}")))
                .collect()
        })
        .collect()
}

fn emit(g: &Global, v: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(v)? + "\n";
    match &g.out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    let g = &cli.global;
    let budget = g.budget.unwrap_or(DEFAULT_BUDGET);
    let value = match cli.command {
        Command::Factor { q } => match factor_squarefree(q) {
            Ok(m) => json!({ "q": q, "squarefree": true, "primes": m.primes() }),
            Err(_) => json!({ "q": q, "squarefree": false, "factors": factorize(q) }),
        },
        Command::Char { cmd: CharCmd::Eval { q, indices, n } } => {
            let m = factor_squarefree(q)?;
            let chi = crt_character(&m, &indices)?;
            let z = chi.value(n);
            json!({ "q": q, "indices": indices, "n": n, "re": z.re, "im": z.im, "primitive": chi.is_primitive() })
        }
        Command::Jcount { r, d, v, method } => {
            let (count, source) = match method {
                Some(m) => {
                    let p = VinogradovParams::new(r, d, v)?.with_budget(budget);
                    let c = match m {
                        JMethod::Naive => vinogradov_count_naive(&p)?,
                        JMethod::Mitm => vinogradov_count_mitm(&p)?,
                    };
                    (c, if matches!(m, JMethod::Naive) { "naive" } else { "mitm" })
                }
                None => {
                    let dir = cache::default_dir();
                    let mut c = JCache::load(&dir)?;
                    let v32 = u32::try_from(v).context("V too large for the cache")?;
                    let (count, hit) = c.count(r, d, v32, budget)?;
                    if !hit {
                        c.save(&dir)?;
                    }
                    (count, if hit { "cache" } else { "computed" })
                }
            };
            json!({ "r": r, "d": d, "V": v, "count": count, "source": source })
        }
        Command::Energy { cmd } => {
            let ov = g.override_hypotheses;
            match cmd {
                EnergyCmd::Cong { q, m, n, u, method } => {
                    let e = cong_energy(q, m, n, u, method.into(), ov)?;
                    json!({ "variant": "congruence", "q": q, "M": m, "N": n, "U": u, "energy": e })
                }
                EnergyCmd::Ffbox { q, n, h, u, method } => {
                    let spec = build_field(q, n)?;
                    let e = ff_box_energy(&spec, h, u, method.into(), ov)?;
                    json!({ "variant": "field-box", "field": spec.summary(), "H": h, "U": u, "energy": e })
                }
                EnergyCmd::Linforms { q, matrix, h, u, method } => {
                    let l = LinearSystem::new(parse_matrix(&matrix)?)?;
                    let e = linear_forms_energy(q, &l, h, u, method.into(), ov)?;
                    json!({ "variant": "linear-forms", "q": q, "L": l.matrix(), "H": h, "U": u, "energy": e })
                }
            }
        }
        Command::Verify(args) => {
            let cfg = campaign(&args, g)?;
            let report = harness::verify(&cfg)?;
            if let Some(p) = &g.csv {
                harness::emit_csv(&report, p)?;
            }
            match &g.out {
                Some(p) => harness::emit_report(&report, p)?,
                None => print!("{}", report.to_json()),
            }
            eprintln!(
                "{}: {} records, max ratio {:?}, sanity failures {}, {}",
                cfg.target.name(),
                report.aggregate.count,
                report.aggregate.max_ratio,
                report.aggregate.sanity_failures,
                if report.pass { "PASS" } else { "FAIL" }
            );
            return Ok(if report.pass { ExitCode::SUCCESS } else { ExitCode::from(2) });
        }
        Command::CompareExponents { n, q, d, r, delta } => serde_json::to_value(compare_exponents(n, q, d, r, delta)?)?,
        Command::Cache { cmd } => {
            let dir = cache::default_dir();
            match cmd {
                CacheCmd::Ls => {
                    let c = JCache::load(&dir)?;
                    let entries: Vec<Value> = c
                        .entries()
                        .map(|((r, d, v), n)| json!({ "r": r, "d": d, "V": v, "count": n }))
                        .collect();
                    json!({ "dir": dir, "entries": entries })
                }
                CacheCmd::Clear => json!({ "dir": dir, "removed": cache::clear(&dir)? }),
            }
        }
    };
    if g.csv.is_some() {
        bail!("--csv applies to verify only");
    }
    emit(g, &value)?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
