//! Command-line interface over the coloring-invariant library: Alexander
//! polynomials, m-determinants, coloring censuses, palette graphs, lower
//! bounds, affine orbits, minimum-color searches, and arc-injectivity.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{ArgGroup, Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde_json::{json, Value};

use laq::alexander::{alexander_polynomial, m_determinant};
use laq::auto::{orbit_classes, verify_free_action};
use laq::bounds::combined_lower_bound;
use laq::coloring::{
    count_colorings, enumerate_colorings, integral_colorings, kh_check, validate_coloring,
    Coloring, ColoringParams,
};
use laq::diagram::KnotDiagram;
use laq::knotdb;
use laq::linalg::rank_mod_p;
use laq::moves::{minimize_colors, SearchBudget};
use laq::palette::{
    adjacency_matrix, export_dot, is_connected, palette_graph_of_coloring, spanning_forest,
    verify_det_lemma, SpanningForest,
};

#[derive(Parser)]
#[command(
    name = "laq",
    version,
    about = "Coloring invariants of knot diagrams by linear Alexander quandles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Alexander polynomial (reduced normalization) of a diagram
    Alex(AlexArgs),
    /// m-determinants: the coloring-matrix first minor evaluated at T = m
    Mdet(MdetArgs),
    /// Census of (p, m)-colorings: totals and color-usage histogram
    Color(ColorArgs),
    /// Palette graph of one coloring, with the determinant-lemma report
    Palette(PaletteArgs),
    /// Lower bounds on the number of colors of nontrivial colorings
    Bounds(BoundsArgs),
    /// Affine orbit classes of the nontrivial colorings
    Orbits(OrbitsArgs),
    /// Minimum distinct colors: census floor, bounds, optional search
    Mincol(MincolArgs),
    /// Arc-injective (KH) coloring scan
    Kh(KhArgs),
}

/// Where the diagram comes from: a built-in knot or a PD-code file.
#[derive(Args)]
#[command(group(ArgGroup::new("source").required(true).args(["knot", "pd"])))]
struct Source {
    /// Built-in knot name (3_1, 4_1, 6_1, 6_2, 6_3, 7_2, 8_7, 9_12)
    #[arg(long)]
    knot: Option<String>,
    /// File holding one PD code, text `X[a,b,c,d] ...` or JSON
    #[arg(long, value_name = "FILE")]
    pd: Option<PathBuf>,
}

struct Input {
    name: Option<String>,
    pd: String,
    diagram: KnotDiagram,
}

impl Source {
    fn resolve(&self) -> Result<Input, String> {
        if let Some(name) = &self.knot {
            let record = knotdb::lookup(name).map_err(|e| match e {
                knotdb::KnotDbError::UnknownKnot(n) => format!(
                    "unknown knot {n:?}; built-ins: {}",
                    knotdb::builtin_names().join(", ")
                ),
                other => other.to_string(),
            })?;
            let diagram = record.diagram().map_err(|e| e.to_string())?;
            Ok(Input { name: Some(record.name), pd: record.pd, diagram })
        } else {
            let path = self.pd.as_ref().expect("clap enforces one source");
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("reading {}: {e}", path.display()))?;
            let diagram = KnotDiagram::parse_pd(&text).map_err(|e| e.to_string())?;
            let pd = diagram.serialize();
            Ok(Input { name: None, pd, diagram })
        }
    }
}

#[derive(Args)]
struct AlexArgs {
    #[command(flatten)]
    source: Source,
    /// Emit JSON instead of text
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct MdetArgs {
    #[command(flatten)]
    source: Source,
    /// Single value `3` or inclusive range `2..13`; negatives allowed
    #[arg(long, allow_hyphen_values = true)]
    m: String,
    /// Emit JSON instead of text
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ColorArgs {
    #[command(flatten)]
    source: Source,
    /// Modulus (an odd prime)
    #[arg(long)]
    p: u64,
    /// Quandle parameter
    #[arg(long, allow_hyphen_values = true)]
    m: i64,
    /// Emit JSON instead of text
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct PaletteArgs {
    #[command(flatten)]
    source: Source,
    /// Modulus (an odd prime), or 0 for integral colorings
    #[arg(long)]
    p: u64,
    /// Quandle parameter
    #[arg(long, allow_hyphen_values = true)]
    m: i64,
    /// Explicit arc colors `c1,c2,...` (default: first nontrivial coloring)
    #[arg(long, allow_hyphen_values = true)]
    coloring: Option<String>,
    /// Write the palette graph in DOT format to this file
    #[arg(long, value_name = "FILE")]
    dot: Option<PathBuf>,
    /// Emit JSON instead of text
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BoundsArgs {
    #[command(flatten)]
    source: Source,
    /// Modulus (an odd prime)
    #[arg(long)]
    p: u64,
    /// Quandle parameter
    #[arg(long, allow_hyphen_values = true)]
    m: i64,
    /// Emit JSON instead of text
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct OrbitsArgs {
    #[command(flatten)]
    source: Source,
    /// Modulus (an odd prime)
    #[arg(long)]
    p: u64,
    /// Quandle parameter
    #[arg(long, allow_hyphen_values = true)]
    m: i64,
    /// Also verify by exhaustion that the affine action is free
    #[arg(long)]
    verify_free: bool,
    /// Emit JSON instead of text
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct MincolArgs {
    #[command(flatten)]
    source: Source,
    /// Modulus (an odd prime)
    #[arg(long)]
    p: u64,
    /// Quandle parameter
    #[arg(long, allow_hyphen_values = true)]
    m: i64,
    /// Run the move search for a fewer-color diagram and coloring
    #[arg(long)]
    search: bool,
    /// Explicit starting colors `c1,c2,...` for the search
    #[arg(long, allow_hyphen_values = true)]
    coloring: Option<String>,
    /// Budget overrides `key=value,...`; keys: depth, crossings, states,
    /// time (seconds), prune (bool)
    #[arg(long, value_name = "SPEC")]
    budget: Option<String>,
    /// Emit JSON instead of text
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct KhArgs {
    #[command(flatten)]
    source: Source,
    /// Modulus (an odd prime)
    #[arg(long)]
    p: u64,
    /// Quandle parameter
    #[arg(long, allow_hyphen_values = true)]
    m: i64,
    /// Emit JSON instead of text
    #[arg(long)]
    json: bool,
}

fn parse_m_values(text: &str) -> Result<Vec<i64>, String> {
    let parse_one = |s: &str| {
        s.trim()
            .parse::<i64>()
            .map_err(|_| format!("invalid m value {s:?}"))
    };
    match text.split_once("..") {
        Some((lo, hi)) => {
            let (lo, hi) = (parse_one(lo)?, parse_one(hi)?);
            if hi < lo {
                return Err(format!("empty m range {text:?}"));
            }
            Ok((lo..=hi).collect())
        }
        None => Ok(vec![parse_one(text)?]),
    }
}

fn parse_colors(text: &str, params: ColoringParams, arcs: usize) -> Result<Coloring, String> {
    let values: Vec<BigInt> = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<BigInt>()
                .map_err(|_| format!("invalid color {s:?}"))
        })
        .collect::<Result<_, _>>()?;
    if values.len() != arcs {
        return Err(format!(
            "coloring has {} colors but the diagram has {arcs} arcs",
            values.len()
        ));
    }
    let values = if params.is_modular() {
        let n = BigInt::from(params.n());
        values.into_iter().map(|v| ((v % &n) + &n) % &n).collect()
    } else {
        values
    };
    Ok(Coloring { params, values })
}

fn parse_budget(spec: &str) -> Result<SearchBudget, String> {
    let mut budget = SearchBudget::default();
    for part in spec.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| format!("budget item {part:?} is not key=value"))?;
        let value = value.trim();
        let bad = |what: &str| format!("invalid {what} in budget: {value:?}");
        match key.trim() {
            "depth" => budget.max_depth = value.parse().map_err(|_| bad("depth"))?,
            "crossings" => budget.max_crossings = value.parse().map_err(|_| bad("crossings"))?,
            "states" => budget.max_states = value.parse().map_err(|_| bad("states"))?,
            "time" => {
                let secs: u64 = value.parse().map_err(|_| bad("time"))?;
                budget.time_limit = std::time::Duration::from_secs(secs);
            }
            "prune" => budget.color_pruning = value.parse().map_err(|_| bad("prune"))?,
            other => return Err(format!("unknown budget key {other:?}")),
        }
    }
    Ok(budget)
}

fn input_json(input: &Input) -> Value {
    json!({ "knot": input.name, "pd": input.pd })
}

fn print_value(value: &Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("valid JSON"));
}

/// First nontrivial coloring in enumeration order, or the one with the
/// fewest distinct colors when `fewest` is set.
fn pick_nontrivial(
    diagram: &KnotDiagram,
    params: &ColoringParams,
    fewest: bool,
) -> Result<Coloring, String> {
    let iter = enumerate_colorings(diagram, params).map_err(|e| e.to_string())?;
    let mut best: Option<(usize, Coloring)> = None;
    for c in iter {
        if c.is_trivial() {
            continue;
        }
        let d = c.distinct_colors();
        if !fewest {
            return Ok(c);
        }
        if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
            best = Some((d, c));
        }
    }
    best.map(|(_, c)| c)
        .ok_or_else(|| "no nontrivial coloring at these parameters".to_string())
}

fn run_alex(args: &AlexArgs) -> Result<(), String> {
    let input = args.source.resolve()?;
    let alex = alexander_polynomial(&input.diagram).map_err(|e| e.to_string())?;
    if args.json {
        print_value(&json!({
            "command": "alex",
            "input": input_json(&input),
            "reduced": alex.reduced.to_string(),
            "raw": alex.alexander.to_string(),
            "vanishes": alex.vanishes,
            "by_minor_consistent": alex.by_minor_consistent,
        }));
    } else {
        println!("Δ⁰(T) = {}", alex.reduced);
    }
    Ok(())
}

fn run_mdet(args: &MdetArgs) -> Result<(), String> {
    let input = args.source.resolve()?;
    let ms = parse_m_values(&args.m)?;
    let mut rows = Vec::with_capacity(ms.len());
    for &m in &ms {
        let det = m_determinant(&input.diagram, m).map_err(|e| e.to_string())?;
        rows.push((m, det));
    }
    if args.json {
        let values: Vec<Value> = rows
            .iter()
            .map(|(m, det)| json!({ "m": m, "det": det.to_string() }))
            .collect();
        print_value(&json!({
            "command": "mdet",
            "input": input_json(&input),
            "values": values,
        }));
    } else {
        for (m, det) in &rows {
            println!("Δ⁰({m}) = {det}");
        }
    }
    Ok(())
}

fn run_color(args: &ColorArgs) -> Result<(), String> {
    let input = args.source.resolve()?;
    let params = ColoringParams::new(args.p, args.m).map_err(|e| e.to_string())?;
    let census = count_colorings(&input.diagram, &params).map_err(|e| e.to_string())?;
    if args.json {
        let histogram: Option<Vec<Value>> = census.color_usage_histogram.as_ref().map(|h| {
            h.iter()
                .map(|(colors, count)| json!({ "colors": colors, "count": count }))
                .collect()
        });
        print_value(&json!({
            "command": "color",
            "input": input_json(&input),
            "p": args.p,
            "m": args.m,
            "total": census.total.to_string(),
            "trivial": census.trivial,
            "nontrivial": census.nontrivial.to_string(),
            "histogram": histogram,
            "min_colors": census.min_colors(),
        }));
    } else {
        println!("p = {}, m = {}", args.p, args.m);
        println!("total = {}", census.total);
        println!("trivial = {}", census.trivial);
        println!("nontrivial = {}", census.nontrivial);
        match &census.color_usage_histogram {
            Some(hist) => {
                let parts: Vec<String> =
                    hist.iter().map(|(colors, count)| format!("{colors} -> {count}")).collect();
                println!("histogram (distinct colors -> colorings): {}", parts.join(", "));
            }
            None => println!("histogram: skipped (census exceeds the enumeration budget)"),
        }
        match census.min_colors() {
            Some(k) => println!("min_colors = {k}"),
            None => println!("min_colors = n/a"),
        }
    }
    Ok(())
}

fn run_palette(args: &PaletteArgs) -> Result<(), String> {
    let input = args.source.resolve()?;
    let params = ColoringParams::new(args.p, args.m).map_err(|e| e.to_string())?;
    let coloring = match &args.coloring {
        Some(text) => {
            let c = parse_colors(text, params, input.diagram.arc_count())?;
            let (ok, bad) = validate_coloring(&input.diagram, &c).map_err(|e| e.to_string())?;
            if !ok {
                return Err(format!(
                    "not a valid coloring: crossing {} fails its relation",
                    bad.unwrap_or_default()
                ));
            }
            c
        }
        None if params.is_modular() => pick_nontrivial(&input.diagram, &params, false)?,
        None => integral_colorings(&input.diagram, args.m)
            .map_err(|e| e.to_string())?
            .example
            .ok_or_else(|| "no nontrivial integral coloring exists".to_string())?,
    };
    let graph = palette_graph_of_coloring(&input.diagram, &coloring).map_err(|e| e.to_string())?;
    let forest = spanning_forest(&graph);
    let connected = is_connected(&graph);
    let adj_full = adjacency_matrix(
        &graph,
        &SpanningForest { edges: (0..graph.edges.len()).collect(), components: forest.components },
    );
    let rank = if args.p > 0 {
        Some(rank_mod_p(&adj_full.matrix, args.p).map_err(|e| e.to_string())?)
    } else {
        None
    };
    let lemma = connected
        .then(|| verify_det_lemma(&input.diagram, &coloring))
        .transpose()
        .map_err(|e| e.to_string())?;
    if let Some(path) = &args.dot {
        let dot = export_dot(&graph, Some(&forest));
        std::fs::write(path, dot).map_err(|e| format!("writing {}: {e}", path.display()))?;
    }
    let colors: Vec<String> = coloring.values.iter().map(|v| v.to_string()).collect();
    if args.json {
        let lemma_json = lemma.as_ref().map(|l| {
            json!({
                "det_bound": l.det_bound.to_string(),
                "within_bound": l.within_bound,
                "all_hold": l.all_hold,
                "columns": l.columns.iter().map(|c| json!({
                    "column": c.column,
                    "color": c.color.to_string(),
                    "det": c.det.to_string(),
                    "vanishes_mod_p": c.vanishes_mod_p,
                    "unit_mod_m_minus_1": c.unit_mod_m_minus_1,
                })).collect::<Vec<_>>(),
            })
        });
        print_value(&json!({
            "command": "palette",
            "input": input_json(&input),
            "p": args.p,
            "m": args.m,
            "coloring": colors,
            "graph": graph.to_json(),
            "connected": connected,
            "rank_mod_p": rank,
            "det_lemma": lemma_json,
        }));
    } else {
        println!("coloring (arc order): {}", colors.join(","));
        let vertices: Vec<String> = graph.vertices.iter().map(|v| v.to_string()).collect();
        println!("vertices = {}: {}", graph.vertex_count(), vertices.join(","));
        println!("edges = {}", graph.edge_count());
        println!("connected = {connected}");
        if let Some(rank) = rank {
            println!("rank of full adjacency mod p = {rank} (vertices - 2 = {})",
                graph.vertex_count().saturating_sub(2));
        }
        match &lemma {
            Some(l) => {
                for c in &l.columns {
                    let unit = match c.unit_mod_m_minus_1 {
                        Some(u) => format!(", ±1 mod |m-1|: {u}"),
                        None => String::new(),
                    };
                    println!(
                        "det A_{} (drop color {}) = {} (vanishes mod p: {}{unit})",
                        c.column, c.color, c.det, c.vanishes_mod_p
                    );
                }
                println!("det bound = {}, within = {}", l.det_bound, l.within_bound);
                println!("determinant lemma holds = {}", l.all_hold);
            }
            None => println!("determinant lemma: skipped (graph not connected)"),
        }
        if let Some(path) = &args.dot {
            println!("DOT written to {}", path.display());
        }
    }
    Ok(())
}

fn run_bounds(args: &BoundsArgs) -> Result<(), String> {
    let input = args.source.resolve()?;
    let report =
        combined_lower_bound(&input.diagram, args.p, args.m).map_err(|e| e.to_string())?;
    if args.json {
        print_value(&json!({
            "command": "bounds",
            "input": input_json(&input),
            "p": report.p,
            "m": report.m,
            "min3_applicable": report.min3_applicable,
            "needs_four": report.needs_four,
            "blocking_condition": report.blocking_condition.map(|c| format!("{c:?}")),
            "log_bound": report.log_bound,
            "m_used": report.m_used.to_string(),
            "best_lower": report.best_lower,
        }));
    } else {
        println!("p = {}, m = {}", report.p, report.m);
        println!("min3_applicable = {}", report.min3_applicable);
        match report.blocking_condition {
            Some(cond) => println!("needs_four = {} (blocked by {cond:?})", report.needs_four),
            None => println!("needs_four = {}", report.needs_four),
        }
        match report.log_bound {
            Some(b) => println!("log_bound = {b} (M = {})", report.m_used),
            None => println!("log_bound = n/a (side condition fails)"),
        }
        println!("best_lower = {}", report.best_lower);
    }
    Ok(())
}

fn run_orbits(args: &OrbitsArgs) -> Result<(), String> {
    let input = args.source.resolve()?;
    let params = ColoringParams::new(args.p, args.m).map_err(|e| e.to_string())?;
    let nontrivial: Vec<Coloring> = enumerate_colorings(&input.diagram, &params)
        .map_err(|e| e.to_string())?
        .filter(|c| !c.is_trivial())
        .collect();
    let classes = orbit_classes(&nontrivial).map_err(|e| e.to_string())?;
    let free = args
        .verify_free
        .then(|| verify_free_action(&input.diagram, args.p, args.m))
        .transpose()
        .map_err(|e| e.to_string())?;
    if args.json {
        let classes_json: Vec<Value> = classes
            .iter()
            .map(|c| {
                json!({
                    "size": c.size,
                    "distinct_colors": c.distinct_colors,
                    "representative": c.representative.values.iter()
                        .map(|v| v.to_string()).collect::<Vec<_>>(),
                })
            })
            .collect();
        print_value(&json!({
            "command": "orbits",
            "input": input_json(&input),
            "p": args.p,
            "m": args.m,
            "nontrivial": nontrivial.len(),
            "orbit_classes": classes_json,
            "free_on_nontrivial": free.as_ref().map(|f| f.free_on_nontrivial),
        }));
    } else {
        println!("p = {}, m = {}", args.p, args.m);
        println!("nontrivial = {}", nontrivial.len());
        println!("orbit_classes = {}", classes.len());
        for (i, class) in classes.iter().enumerate() {
            let rep: Vec<String> =
                class.representative.values.iter().map(|v| v.to_string()).collect();
            println!(
                "class {}: size = {}, distinct_colors = {}, representative = {}",
                i + 1,
                class.size,
                class.distinct_colors,
                rep.join(",")
            );
        }
        if let Some(f) = &free {
            println!(
                "free_on_nontrivial = {} (checked {})",
                f.free_on_nontrivial, f.nontrivial_checked
            );
        }
    }
    Ok(())
}

fn run_mincol(args: &MincolArgs) -> Result<(), String> {
    let input = args.source.resolve()?;
    let params = ColoringParams::new(args.p, args.m).map_err(|e| e.to_string())?;
    let census = count_colorings(&input.diagram, &params).map_err(|e| e.to_string())?;
    let bound =
        combined_lower_bound(&input.diagram, args.p, args.m).map_err(|e| e.to_string())?;
    let budget = match &args.budget {
        Some(spec) => parse_budget(spec)?,
        None => SearchBudget::default(),
    };
    let outcome = if args.search {
        let start = match &args.coloring {
            Some(text) => parse_colors(text, params, input.diagram.arc_count())?,
            None => pick_nontrivial(&input.diagram, &params, true)?,
        };
        Some(minimize_colors(&input.diagram, &start, &budget).map_err(|e| e.to_string())?)
    } else {
        None
    };
    if args.json {
        let outcome_json = outcome.as_ref().map(|o| {
            json!({
                "colors_used": o.colors_used,
                "coloring": o.coloring.values.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                "final_pd": o.diagram.serialize(),
                "trace": serde_json::to_value(&o.trace).expect("serializable trace"),
                "lower_bound": o.lower_bound,
                "reached_lower_bound": o.reached_lower_bound,
                "budget_exhausted": o.budget_exhausted,
                "states_explored": o.states_explored,
            })
        });
        print_value(&json!({
            "command": "mincol",
            "input": input_json(&input),
            "p": args.p,
            "m": args.m,
            "census_min_colors": census.min_colors(),
            "lower_bound": bound.best_lower,
            "search": outcome_json,
        }));
    } else {
        println!("p = {}, m = {}", args.p, args.m);
        match census.min_colors() {
            Some(k) => println!("census min_colors = {k}"),
            None => println!("census min_colors = n/a"),
        }
        println!("combined lower bound = {}", bound.best_lower);
        if let Some(o) = &outcome {
            println!(
                "search: colors_used = {}, reached_lower_bound = {}, budget_exhausted = {}, \
                 states_explored = {}",
                o.colors_used, o.reached_lower_bound, o.budget_exhausted, o.states_explored
            );
            let colors: Vec<String> = o.coloring.values.iter().map(|v| v.to_string()).collect();
            println!("coloring: {}", colors.join(","));
            println!("final diagram: {}", o.diagram.serialize());
            println!("trace length = {}", o.trace.len());
            for site in &o.trace {
                println!(
                    "  {:?} at edges {:?} (variant {})",
                    site.kind, site.edges, site.variant
                );
            }
        }
    }
    Ok(())
}

fn run_kh(args: &KhArgs) -> Result<(), String> {
    let input = args.source.resolve()?;
    let params = ColoringParams::new(args.p, args.m).map_err(|e| e.to_string())?;
    let report = kh_check(&input.diagram, &params).map_err(|e| e.to_string())?;
    if args.json {
        print_value(&json!({
            "command": "kh",
            "input": input_json(&input),
            "p": args.p,
            "m": args.m,
            "nontrivial": report.nontrivial.to_string(),
            "injective_count": report.injective_count,
            "admits_injective": report.admits_injective,
            "alternating": report.alternating,
        }));
    } else {
        println!("p = {}, m = {}", args.p, args.m);
        println!("nontrivial = {}", report.nontrivial);
        println!("arc-injective colorings = {}", report.injective_count);
        println!("admits_injective = {}", report.admits_injective);
        println!("alternating = {}", report.alternating);
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), String> {
    match &cli.command {
        Command::Alex(args) => run_alex(args),
        Command::Mdet(args) => run_mdet(args),
        Command::Color(args) => run_color(args),
        Command::Palette(args) => run_palette(args),
        Command::Bounds(args) => run_bounds(args),
        Command::Orbits(args) => run_orbits(args),
        Command::Mincol(args) => run_mincol(args),
        Command::Kh(args) => run_kh(args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage_ok =
                matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = e.print();
            return if usage_ok { ExitCode::SUCCESS } else { ExitCode::from(1) };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
