use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use orbiquot::catalog::{catalog, lookup, CatalogEntry};
use orbiquot::group::{classify_group, FiniteMatrixGroup, GroupDefinition, GroupKind};
use orbiquot::pipeline::{analyze_quotient, verify_only_if, verify_r5, verify_reflection_group, verify_rotation_quotient, verify_transfer, CertificateFile, Options, VerificationReport};
use orbiquot::polytope::{default_base_point, dirichlet_domain, domain_report};
use orbiquot::scalar::{ExactScalar, ExactVector};

#[derive(Parser)]
#[command(name = "orbiquot", version, about = "Exact quotients of spheres by finite linear groups")]
struct Cli {
    /// Seed for randomized collapse restarts and bistellar moves.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Collapse restarts.
    #[arg(long, global = true, default_value_t = 50)]
    restarts: usize,
    /// Emit JSON instead of markdown.
    #[arg(long, global = true)]
    json: bool,
    /// Record wall-clock time per stage in the report.
    #[arg(long, global = true)]
    timing: bool,
    /// Print stage progress to stderr.
    #[arg(long, global = true)]
    progress: bool,
    /// Write certificates (with their complexes) into this directory.
    #[arg(long, global = true)]
    certificates: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in groups.
    Catalog,
    /// Classify a group (catalog name or group JSON file).
    Classify { group: String },
    /// Dirichlet domain, facet pairings and face lattice.
    Domain {
        group: String,
        /// Base point as comma-separated exact scalars.
        #[arg(long)]
        v0: Option<String>,
    },
    /// Quotient homology, edge-path group and recognition attempt.
    Quotient { group: String },
    /// Reflection or rotation verification, chosen by the group's kind.
    Verify { group: String },
    /// Boundary, stabilizer and certificate checks for the converse direction.
    OnlyIf { group: String },
    /// Vanishing of H_degree from subgroups of the given orders.
    Transfer {
        group: String,
        #[arg(long, value_delimiter = ',', required = true)]
        orders: Vec<usize>,
        #[arg(long)]
        degree: usize,
    },
    /// The full M(R5) run.
    VerifyR5,
    /// Replay a certificate file.
    Replay {
        file: PathBuf,
        /// Recompute homology every this many steps.
        #[arg(long)]
        homology_every: Option<usize>,
    },
}

fn resolve(name: &str) -> Result<(FiniteMatrixGroup, Option<CatalogEntry>)> {
    let path = Path::new(name);
    if path.is_file() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {name}"))?;
        let def: GroupDefinition = serde_json::from_str(&text).with_context(|| format!("parsing {name}"))?;
        let g = def.build(None)?.with_name(def.name.clone());
        return Ok((g, None));
    }
    match lookup(name) {
        Some(e) => Ok((e.build()?, Some(e))),
        None => bail!("unknown group {name}; see `orbiquot catalog`"),
    }
}

fn parse_vector(s: &str) -> Result<ExactVector> {
    let parts = s.split(',').map(|x| x.trim().parse::<ExactScalar>().map_err(|e| anyhow::anyhow!("{x}: {e}"))).collect::<Result<Vec<_>>>()?;
    Ok(ExactVector(parts))
}

fn emit_report(cli: &Cli, r: &VerificationReport) -> Result<ExitCode> {
    if let Some(dir) = &cli.certificates {
        std::fs::create_dir_all(dir)?;
        for b in &r.bundles {
            let file = dir.join(format!("{}.json", b.name.replace(|c: char| !c.is_ascii_alphanumeric(), "_")));
            std::fs::write(&file, serde_json::to_string(b)?)?;
        }
    }
    if cli.json {
        println!("{}", serde_json::to_string_pretty(r)?);
    } else {
        print!("{}", r.to_markdown());
    }
    Ok(if r.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn emit<T: serde::Serialize>(cli: &Cli, value: &T, text: impl FnOnce() -> String) -> Result<ExitCode> {
    if cli.json {
        println!("{}", serde_json::to_string_pretty(value)?);
    } else {
        print!("{}", text());
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let opts = Options { seed: cli.seed, restarts: cli.restarts, keep_certificates: cli.certificates.is_some(), timing: cli.timing, progress: cli.progress, ..Options::default() };
    match &cli.command {
        Command::Catalog => {
            let entries = catalog();
            emit(cli, &entries, || {
                let mut s = String::from("| group | dim | field | order | kind | quotient |\n|---|---|---|---|---|---|\n");
                for e in &entries {
                    let field = if e.field_d() == 0 { "Q".to_string() } else { format!("Q(sqrt {})", e.field_d()) };
                    s += &format!("| {} | {} | {} | {} | {} | {:?} |\n", e.name, e.dimension(), field, e.expected_order, e.expected_kind, e.expected_verdict);
                }
                s
            })
        }
        Command::Classify { group } => {
            let (g, _) = resolve(group)?;
            let c = classify_group(&g);
            emit(cli, &c, || {
                format!(
                    "{}: order {}, {}; {} reflections, {} rotations, rr-closure of order {}\n",
                    g.name(),
                    c.order,
                    c.kind,
                    c.reflections,
                    c.rotations,
                    c.rr_order
                )
            })
        }
        Command::Domain { group, v0 } => {
            let (g, e) = resolve(group)?;
            let v0 = match v0 {
                Some(s) => parse_vector(s)?,
                None => match e.and_then(|e| e.base_point) {
                    Some(v) => v,
                    None => default_base_point(&g)?,
                },
            };
            let d = dirichlet_domain(&g, &v0)?;
            let r = domain_report(&g, &d)?;
            emit(cli, &r, || {
                let mut s = format!("# domain of {} at {}\n\nface f-vector {:?}\n\n", r.group, r.base_point, r.face_f_vector);
                for (i, f) in r.facets.iter().enumerate() {
                    s += &format!("facet {i}: normal {}, rays {:?}\n", f.normal, f.rays);
                }
                for (i, v) in r.rays.iter().enumerate() {
                    s += &format!("ray {i}: {v}\n");
                }
                for id in &r.identifications {
                    s += &format!("facet {} -> {} by {}\n", id.facet, id.partner, id.permutation.clone().unwrap_or_else(|| format!("element {}", id.element)));
                }
                s
            })
        }
        Command::Quotient { group } => {
            let (g, e) = resolve(group)?;
            emit_report(cli, &analyze_quotient(&g, e.and_then(|e| e.base_point).as_ref(), &opts)?)
        }
        Command::Verify { group } => {
            let (g, e) = resolve(group)?;
            let v0 = e.and_then(|e| e.base_point);
            let r = match classify_group(&g).kind {
                GroupKind::ReflectionGroup => verify_reflection_group(&g, v0.as_ref(), &opts)?,
                GroupKind::RotationGroup => verify_rotation_quotient(&g, v0.as_ref(), &opts)?,
                k => bail!("{} is a {k}; use `quotient` or `only-if`", g.name()),
            };
            emit_report(cli, &r)
        }
        Command::OnlyIf { group } => {
            let (g, e) = resolve(group)?;
            emit_report(cli, &verify_only_if(&g, e.and_then(|e| e.base_point).as_ref(), &opts)?)
        }
        Command::Transfer { group, orders, degree } => {
            let (g, _) = resolve(group)?;
            emit_report(cli, &verify_transfer(&g, orders, *degree, &opts)?)
        }
        Command::VerifyR5 => emit_report(cli, &verify_r5(&opts)?),
        Command::Replay { file, homology_every } => {
            let text = std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
            let c: CertificateFile = serde_json::from_str(&text).with_context(|| format!("parsing {}", file.display()))?;
            match c.replay(*homology_every) {
                Ok(()) => {
                    println!("{}: certificate replays", c.name);
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => {
                    println!("{}: replay failed: {e}", c.name);
                    Ok(ExitCode::from(1))
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
