use clap::{Args, Parser, Subcommand, ValueEnum};
use colombeau::embeddings::{ItemKind, CATALOG, GALLERY_VERSION};
use colombeau::scenario::{exit_code, parse_scenario, run, RunOutcome};
use colombeau::{Error, Result};
use serde_json::{json, Value};
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "colombeau", version, about = "Asymptotic classification, flows and invariance tests for nets of smooth functions")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Grid base b: the ε-grid is b^k.
    #[arg(long, global = true)]
    grid_base: Option<f64>,
    #[arg(long, global = true)]
    grid_k_min: Option<i32>,
    #[arg(long, global = true)]
    grid_k_max: Option<i32>,
    /// Output directory for reports.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Decay exponent beyond which a net counts as negligible.
    #[arg(long, global = true)]
    m_max: Option<i32>,
    /// Compact box as `lo,hi;lo,hi;...`.
    #[arg(long = "box", global = true, allow_hyphen_values = true)]
    region: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the growth of a net on the box.
    Classify {
        /// Gallery item; every gallery function of the box dimension when absent.
        #[arg(long)]
        item: Option<String>,
        /// Inline expression in x1..xn and eps instead of a gallery item.
        #[arg(long, conflicts_with = "item")]
        expr: Option<String>,
        /// Derivative multi-index, comma separated.
        #[arg(long)]
        order: Option<String>,
        /// Expected verdict; the exit status reports a mismatch.
        #[arg(long)]
        expect: Option<String>,
    },
    /// Integrate a gallery vector field from a point.
    Flow {
        #[arg(long)]
        field: String,
        #[arg(long, allow_hyphen_values = true)]
        x0: String,
        /// Time span `t0,t1`.
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        #[arg(long)]
        h0: Option<f64>,
        /// Check the group law at `t,s`.
        #[arg(long, allow_hyphen_values = true)]
        group_law: Option<String>,
    },
    /// Test invariance of a gallery net.
    Invariance {
        #[arg(long)]
        item: String,
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long)]
        field: Option<String>,
        /// 1-based axis for translations.
        #[arg(long)]
        axis: Option<usize>,
        /// Comma separated angles for standard rotations.
        #[arg(long, allow_hyphen_values = true)]
        angles: Option<String>,
        #[arg(long)]
        h0: Option<f64>,
    },
    /// Reduce a rotation-invariant net to a radial profile and certify it.
    Reduce {
        #[arg(long)]
        item: String,
    },
    /// Inspect the gallery.
    Gallery {
        #[command(subcommand)]
        action: GalleryAction,
    },
    /// Run a scenario file.
    Run { scenario: PathBuf },
}

#[derive(Subcommand)]
enum GalleryAction {
    /// List every item.
    List,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Infinitesimal,
    Flow,
    StandardRotations,
    GeneralizedRotations,
    Translation,
}

impl Method {
    fn key(self) -> &'static str {
        match self {
            Method::Infinitesimal => "infinitesimal",
            Method::Flow => "flow",
            Method::StandardRotations => "standard_rotations",
            Method::GeneralizedRotations => "generalized_rotations",
            Method::Translation => "translation",
        }
    }
}

fn numbers<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<T>()
                .map_err(|_| Error::Config(format!("{what}: cannot parse `{p}`")))
        })
        .collect()
}

fn parse_box(s: &str) -> Result<Value> {
    let rows = s
        .split(';')
        .map(|iv| match numbers::<f64>(iv, "--box")?.as_slice() {
            [a, b] => Ok(json!([a, b])),
            _ => Err(Error::Config(format!("--box: interval `{iv}` needs `lo,hi`"))),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Value::Array(rows))
}

impl Common {
    fn region(&self, default_dim: usize) -> Result<Value> {
        match &self.region {
            Some(s) => parse_box(s),
            None => Ok(Value::Array(vec![json!([-1.0, 1.0]); default_dim])),
        }
    }

    /// Apply grid, threshold and output overrides to a scenario document.
    fn patch(&self, doc: &mut Value) {
        let obj = doc.as_object_mut().expect("scenario is a JSON object");
        if self.grid_base.is_some() || self.grid_k_min.is_some() || self.grid_k_max.is_some() {
            let grid = obj.entry("grid").or_insert_with(|| json!({"base": 0.5, "k": [4, 24]}));
            if let Some(b) = self.grid_base {
                grid["base"] = json!(b);
            }
            if let Some(k) = self.grid_k_min {
                grid["k"][0] = json!(k);
            }
            if let Some(k) = self.grid_k_max {
                grid["k"][1] = json!(k);
            }
        }
        if let Some(m) = self.m_max {
            let t = obj.entry("thresholds").or_insert_with(|| json!({}));
            t["m_max"] = json!(m);
        }
        if let Some(out) = &self.out {
            obj.insert("output".into(), json!(out));
        }
    }
}

fn dim_of(name: &str) -> usize {
    CATALOG.iter().find(|e| e.name == name).map_or(2, |e| e.dim)
}

fn build(cli: &Cli) -> Result<Value> {
    let c = &cli.common;
    Ok(match &cli.command {
        Command::Classify { item, expr, order, expect } => {
            let region = c.region(2)?;
            let mut items = Vec::new();
            let mut task = json!({"box": region});
            if let Some(name) = item {
                items.push(json!(name));
                task["item"] = json!(name);
            } else if let Some(e) = expr {
                let dim = region.as_array().map_or(1, Vec::len);
                items.push(json!({"name": "expr", "expr": e, "dim": dim}));
                task["item"] = json!("expr");
            } else {
                let dim = region.as_array().map_or(1, Vec::len);
                items.extend(
                    CATALOG
                        .iter()
                        .filter(|e| e.kind == ItemKind::Function && e.dim == dim)
                        .map(|e| json!(e.name)),
                );
            }
            if let Some(o) = order {
                task["order"] = json!(numbers::<usize>(o, "--order")?);
            }
            if let Some(v) = expect {
                task["expect"] = json!(v);
            }
            json!({"items": items, "tasks": [{"classify": task}]})
        }
        Command::Flow { field, x0, t, h0, group_law } => {
            let mut task = json!({"field": field, "x0": numbers::<f64>(x0, "--x0")?, "t": numbers::<f64>(t, "--t")?});
            if let Some(h) = h0 {
                task["h0"] = json!(h);
            }
            if let Some(g) = group_law {
                match numbers::<f64>(g, "--group-law")?.as_slice() {
                    [t, s] => task["group_law"] = json!({"t": t, "s": s}),
                    _ => return Err(Error::Config("--group-law needs `t,s`".into())),
                }
            }
            json!({"items": [field], "tasks": [{"flow": task}]})
        }
        Command::Invariance { item, method, field, axis, angles, h0 } => {
            let mut items = vec![json!(item)];
            let mut task = json!({"item": item, "method": method.key(), "box": c.region(dim_of(item))?});
            if let Some(f) = field {
                items.push(json!(f));
                task["field"] = json!(f);
            }
            if let Some(a) = axis {
                task["axis"] = json!(a);
            }
            if let Some(a) = angles {
                task["angles"] = json!(numbers::<f64>(a, "--angles")?);
            }
            if let Some(h) = h0 {
                task["h0"] = json!(h);
            }
            json!({"items": items, "tasks": [{"invariance": task}]})
        }
        Command::Reduce { item } => {
            json!({"items": [item], "tasks": [{"reduce": {"item": item, "box": c.region(dim_of(item))?}}]})
        }
        Command::Gallery { .. } | Command::Run { .. } => unreachable!("handled without a synthesized scenario"),
    })
}

fn execute(cli: &Cli) -> Result<RunOutcome> {
    let scenario = match &cli.command {
        Command::Run { scenario } => {
            let text = std::fs::read_to_string(scenario)?;
            // report syntax errors against the file as written
            let parsed = parse_scenario(&text)?;
            let c = &cli.common;
            if c.grid_base.is_some() || c.grid_k_min.is_some() || c.grid_k_max.is_some() || c.m_max.is_some() || c.out.is_some() {
                let mut doc: Value = serde_json::from_str(&text)?;
                c.patch(&mut doc);
                parse_scenario(&doc.to_string())?
            } else {
                parsed
            }
        }
        _ => {
            let mut doc = build(cli)?;
            cli.common.patch(&mut doc);
            parse_scenario(&doc.to_string())?
        }
    };
    run(&scenario)
}

fn main() {
    colombeau::init_threads_from_env();
    let cli = Cli::parse();
    if let Command::Gallery { action: GalleryAction::List } = cli.command {
        let mut out = std::io::stdout().lock();
        let _ = writeln!(out, "# gallery version {GALLERY_VERSION}");
        for e in CATALOG {
            let kind = match e.kind {
                ItemKind::Function => "function",
                ItemKind::VectorField => "field",
            };
            let _ = writeln!(out, "{:<26} {:<8} R^{}  {}", e.name, kind, e.dim, e.description);
        }
        return;
    }
    let result = execute(&cli);
    match &result {
        Ok(outcome) => {
            // a closed stdout (e.g. piped into `head`) must not change the exit status
            let mut out = std::io::stdout().lock();
            for t in &outcome.tasks {
                let _ = writeln!(out, "task {:02} {:<10} {}", t.index, t.kind, if t.passed { "pass" } else { "FAIL" });
                for f in &t.files {
                    let _ = writeln!(out, "  {}", f.display());
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            let mut src = std::error::Error::source(e);
            while let Some(s) = src {
                eprintln!("  caused by: {s}");
                src = s.source();
            }
        }
    }
    std::process::exit(exit_code(&result));
}
