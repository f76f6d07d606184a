mod cache;

use std::io::Write;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};

use anyhow::{anyhow, bail, Context, Result};
use chow_core::chowring::{table_json, ProductEngine};
use chow_core::invariants::{fundamental_invariants, groebner};
use chow_core::preimage::{PreimageSolver, Variant};
use chow_core::{ChowClass, ChowRing, DynkinSpec, EngineOptions, QPoly};
use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::cache::{write_atomic, Cache};

#[derive(Parser)]
#[command(name = "chow", version, about = "Exact Schubert calculus on Chow rings of G/P")]
struct Cli {
    /// Root system type, e.g. E7, F4, A3.
    #[arg(long = "type", short = 't', global = true, default_value = "E7")]
    ty: String,
    /// Omitted simple roots, 1-based: "7", "P7", "1,3".
    #[arg(long, short = 'p', global = true, default_value = "7")]
    parabolic: String,
    #[arg(long, global = true, value_enum, default_value_t = VariantArg::Invariance)]
    variant: VariantArg,
    #[arg(long, global = true, env = "CHOW_CACHE_DIR", default_value = ".chow-cache")]
    cache_dir: PathBuf,
    /// Worker threads for table fills; 0 picks the number of cores.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[arg(long, short = 'f', global = true, value_enum)]
    format: Option<Format>,
    /// Write the artifact here instead of standard output.
    #[arg(long, short = 'o', global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Delta,
    Invariance,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Delta => Variant::Delta,
            VariantArg::Invariance => Variant::Invariance,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Weighted Pieri graph of a divisor class.
    Hasse {
        /// Simple root of the divisor (1-based, omitted from Θ); defaults to
        /// the first omitted root.
        #[arg(long)]
        divisor: Option<usize>,
        /// Unweighted Hasse diagram instead.
        #[arg(long)]
        plain: bool,
    },
    /// Product of classes given as labels (g_{5,1}) or path words ([7,6]),
    /// each optionally raised to a power (g_{10,1}^5).
    Multiply {
        #[arg(required = true)]
        factors: Vec<String>,
    },
    /// A polynomial whose image under the characteristic map is the class.
    Preimage {
        class: String,
        /// Skip the Groebner normal form.
        #[arg(long)]
        no_reduce: bool,
    },
    /// Image of a polynomial in w[1], …, w[l] under the characteristic map.
    Cfunc { polynomial: String },
    /// Full multiplication table.
    Table,
    /// Precompute, inspect, or clear cached data.
    Cache {
        #[arg(value_enum)]
        action: CacheAction,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CacheAction {
    Build,
    Clear,
    Status,
}

fn parse_parabolic(s: &str, rank: usize) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for t in s.split(',') {
        let t = t.trim().trim_start_matches(['P', 'p']);
        let i: usize = t.parse().with_context(|| format!("bad parabolic index `{t}`"))?;
        if i == 0 || i > rank {
            bail!("parabolic index {i} out of range 1..={rank}");
        }
        out.push(i - 1);
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

struct Ctx {
    cli: Cli,
    cache: Cache,
}

impl Ctx {
    fn ring(&self) -> Result<ChowRing> {
        let spec: DynkinSpec = self.cli.ty.parse()?;
        let omitted = parse_parabolic(&self.cli.parabolic, spec.rank)?;
        Ok(ChowRing::new(spec, &omitted)?)
    }

    fn variant(&self) -> Variant {
        self.cli.variant.into()
    }

    fn engine(&self, ring: &ChowRing) -> Result<ProductEngine> {
        let mut opts = EngineOptions {
            variant: self.variant(),
            preimages: self.cache.load_preimages(ring, self.variant())?,
            ..EngineOptions::default()
        };
        if opts.preimages.is_empty() {
            opts.groebner = self.cache.load_groebner(ring.root_system(), 0)?;
        }
        let engine = ProductEngine::build(ring, &opts)?;
        if let Some(gb) = &engine.groebner {
            self.cache.store_groebner(ring.root_system(), gb)?;
        }
        self.cache.store_preimages(ring, self.variant(), &engine)?;
        log::info!("preimages required in codimensions {:?}", engine.gap_codims);
        Ok(engine)
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.cli.output {
            Some(path) => write_atomic(path, text.as_bytes()),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())?;
                out.flush()?;
                Ok(())
            }
        }
    }

    fn format(&self, default: Format) -> Format {
        self.cli.format.unwrap_or(default)
    }
}

fn class_json(ring: &ChowRing, x: &ChowClass) -> Value {
    let mut terms: Vec<(usize, &BigRational)> = x.terms().collect();
    terms.sort_by_key(|(u, _)| (ring.codim(*u), ring.class(*u).number));
    Value::Array(
        terms
            .iter()
            .map(|(u, c)| json!({"class": ring.label(*u), "coeff": c.to_string(), "word": ring.class(*u).word}))
            .collect(),
    )
}

fn parse_factor(ring: &ChowRing, s: &str) -> Result<(usize, u32)> {
    if let Some((base, exp)) = s.rsplit_once('^') {
        if let Ok(e) = exp.trim().parse::<u32>() {
            return Ok((ring.parse_class(base)?, e));
        }
    }
    Ok((ring.parse_class(s)?, 1))
}

fn cmd_hasse(ctx: &Ctx, divisor: Option<usize>, plain: bool) -> Result<()> {
    let ring = ctx.ring()?;
    let alpha = match divisor {
        Some(0) => bail!("divisor index is 1-based"),
        Some(a) => a - 1,
        None => ring.hyperplane_node(),
    };
    let graph = if plain { ring.hasse() } else { ring.pieri_graph(alpha)? };
    let text = match ctx.format(Format::Dot) {
        Format::Dot => graph.to_dot(&ring),
        Format::Json => {
            let mut nodes = Vec::new();
            for list in &graph.nodes {
                for &u in list {
                    let c = ring.class(u);
                    nodes.push(json!({"id": ring.label(u), "codim": c.codim, "index": c.number, "word": c.word}));
                }
            }
            let edges: Vec<Value> = graph
                .edges
                .iter()
                .map(|e| {
                    json!({"from": ring.label(e.from), "to": ring.label(e.to), "label": e.label, "weight": e.weight.to_string()})
                })
                .collect();
            let doc = json!({
                "type": ring.spec().to_string(),
                "parabolic": ring.theta().omitted().iter().map(|i| i + 1).collect::<Vec<_>>(),
                "divisor": if plain { Value::Null } else { json!(alpha + 1) },
                "nodes": nodes,
                "edges": edges,
            });
            serde_json::to_string_pretty(&doc)? + "\n"
        }
        Format::Text => {
            let mut s = String::new();
            for e in &graph.edges {
                let label = e.label.map_or("-".to_string(), |l| l.to_string());
                s += &format!("{} -> {} [{label}] x{}\n", ring.label(e.from), ring.label(e.to), e.weight);
            }
            s
        }
    };
    ctx.emit(&text)
}

fn cmd_multiply(ctx: &Ctx, factors: &[String]) -> Result<()> {
    let ring = ctx.ring()?;
    let parsed: Vec<(usize, u32)> = factors.iter().map(|f| parse_factor(&ring, f)).collect::<Result<_>>()?;
    let total: usize = parsed.iter().map(|&(u, e)| ring.codim(u) * e as usize).sum();
    let mut product = ChowClass::basis(0);
    let mut route = None;
    if total > ring.dim() {
        eprintln!("note: total codimension {total} exceeds dim {}; the product is 0", ring.dim());
        product = ChowClass::zero();
    } else {
        let engine = ctx.engine(&ring)?;
        for &(u, e) in &parsed {
            for _ in 0..e {
                let (z, r) = engine.multiply(&ring, &product, &ChowClass::basis(u))?;
                product = z;
                route = Some(r);
            }
        }
    }
    let lhs: Vec<String> = parsed
        .iter()
        .map(|&(u, e)| if e == 1 { ring.label(u) } else { format!("{}^{e}", ring.label(u)) })
        .collect();
    let text = match ctx.format(Format::Text) {
        Format::Json => {
            let doc = json!({
                "factors": lhs,
                "product": class_json(&ring, &product),
                "route": route.map(|r| format!("{r:?}").to_lowercase()),
            });
            serde_json::to_string_pretty(&doc)? + "\n"
        }
        _ => format!(
            "{} = {}\nwords: {}\n",
            lhs.join(" * "),
            ring.format_class(&product),
            ring.format_class_words(&product)
        ),
    };
    ctx.emit(&text)
}

fn cmd_preimage(ctx: &Ctx, class: &str, no_reduce: bool) -> Result<()> {
    let ring = ctx.ring()?;
    let u = ring.parse_class(class)?;
    let k = ring.codim(u) as u32;
    let rs = ring.root_system();
    let gb = if no_reduce {
        None
    } else if let Some(gb) = ctx.cache.load_groebner(rs, k)? {
        Some(gb)
    } else {
        let inv = fundamental_invariants(rs, Some(k))?;
        log::info!("Groebner basis up to degree {k}");
        let gb = groebner(&inv.generators, Some(k))?;
        ctx.cache.store_groebner(rs, &gb)?;
        Some(gb)
    };
    let solver = PreimageSolver {
        rs,
        ops: ring.weyl_action(),
        theta: ring.theta(),
        reps: ring.reps(),
        variant: ctx.variant(),
        groebner: gb.as_ref(),
    };
    let p = solver.preimage(k, &[(u, BigRational::one())])?;
    let text = match ctx.format(Format::Text) {
        Format::Json => {
            let doc = json!({
                "class": ring.label(u),
                "codim": k,
                "word": ring.class(u).word,
                "reduced": !no_reduce,
                "polynomial": p.to_string(),
            });
            serde_json::to_string_pretty(&doc)? + "\n"
        }
        _ => format!("{p}\n"),
    };
    ctx.emit(&text)
}

fn cmd_cfunc(ctx: &Ctx, poly: &str) -> Result<()> {
    let ring = ctx.ring()?;
    let p = QPoly::parse(ring.root_system().rank(), poly)?;
    let x = ring.c_map(&p)?;
    let text = match ctx.format(Format::Text) {
        Format::Json => serde_json::to_string_pretty(&json!({"class": class_json(&ring, &x)}))? + "\n",
        _ => format!("{}\n", ring.format_class(&x)),
    };
    ctx.emit(&text)
}

fn cmd_table(ctx: &Ctx) -> Result<()> {
    let ring = ctx.ring()?;
    let engine = ctx.engine(&ring)?;
    eprintln!("preimage codimensions: {:?}", engine.gap_codims);
    let n = ring.len();
    let done = AtomicUsize::new(0);
    let step = (n / 20).max(1);
    let columns: Vec<_> = (0..n)
        .into_par_iter()
        .map(|v| {
            let col = engine.table_column(&ring, v);
            let k = done.fetch_add(1, Ordering::Relaxed) + 1;
            if k.is_multiple_of(step) || k == n {
                log::info!("table: {k}/{n} columns");
            }
            col
        })
        .collect::<chow_core::Result<_>>()?;
    let table: Vec<_> = columns.into_iter().flatten().collect();
    let text = match ctx.format(Format::Json) {
        Format::Text => {
            let mut rows: Vec<_> = table.iter().collect();
            let key = |u: usize| (ring.codim(u), ring.class(u).number);
            rows.sort_by_key(|(u, v, _)| (key(*u), key(*v)));
            let mut s = String::new();
            for (u, v, z) in rows {
                s += &format!("{} * {} = {}\n", ring.label(*u), ring.label(*v), ring.format_class(z));
            }
            s
        }
        _ => table_json(&ring, &engine, &table),
    };
    ctx.emit(&text)
}

fn cmd_cache(ctx: &Ctx, action: CacheAction) -> Result<()> {
    match action {
        CacheAction::Build => {
            let ring = ctx.ring()?;
            let engine = ctx.engine(&ring)?;
            eprintln!(
                "cached {} generator preimages for {} in {}",
                engine.generators.iter().filter(|g| g.preimage.is_some()).count(),
                ring.spec(),
                ctx.cache.dir().display()
            );
        }
        CacheAction::Clear => {
            let k = ctx.cache.clear()?;
            eprintln!("removed {k} files from {}", ctx.cache.dir().display());
        }
        CacheAction::Status => {
            let mut s = format!("{}\n", ctx.cache.dir().display());
            for (name, size) in ctx.cache.entries()? {
                s += &format!("  {name}  {size} bytes\n");
            }
            ctx.emit(&s)?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(|e| anyhow!("thread pool: {e}"))?;
    }
    let ctx = Ctx {
        cache: Cache::new(&cli.cache_dir),
        cli,
    };
    match &ctx.cli.command {
        Command::Hasse { divisor, plain } => cmd_hasse(&ctx, *divisor, *plain),
        Command::Multiply { factors } => cmd_multiply(&ctx, factors),
        Command::Preimage { class, no_reduce } => cmd_preimage(&ctx, class, *no_reduce),
        Command::Cfunc { polynomial } => cmd_cfunc(&ctx, polynomial),
        Command::Table => cmd_table(&ctx),
        Command::Cache { action } => cmd_cache(&ctx, *action),
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
