use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use parahoric_core::covers::{enumerate_tuples, genus_riemann_hurwitz, is_connected_genus0, RamificationVector};
use parahoric_core::descent::{certify_descent, compute_cg};
use parahoric_core::dynkin::{dual_involution, AffineType};
use parahoric_core::factorization::{s3_reduce, DEFAULT_BUDGET};
use parahoric_core::group::{format_tuple, parse_tuple, FiniteGroup};
use parahoric_core::picard::{
    c_delta_bundle, charges, is_dominant, is_pic_delta, pic_delta_rank, GroupDatum, WeightBundle, SCHEMA_VERSION,
};
use parahoric_core::verlinde::{rank_closed_form_a, s3_level1_rank, Derivation, RankResult};

#[derive(Parser)]
#[command(name = "parahoric", version, about = "Picard-group invariants of parahoric torsors")]
struct Cli {
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Affine Dynkin data.
    Dynkin {
        #[command(subcommand)]
        action: DynkinCmd,
    },
    /// Central charges and the lattice `Pic^Δ`.
    Picard {
        #[command(subcommand)]
        action: PicardCmd,
    },
    /// Galois covers with given ramification.
    Covers {
        #[command(subcommand)]
        action: CoversCmd,
    },
    /// Reduce ramification data to base cases.
    Reduce {
        #[command(subcommand)]
        action: ReduceCmd,
    },
    /// Level-one conformal-block ranks.
    Verlinde {
        #[command(subcommand)]
        action: VerlindeCmd,
    },
    /// Certify that a line bundle descends.
    Descend {
        #[arg(long)]
        datum: PathBuf,
        #[arg(long)]
        bundle: PathBuf,
    },
    /// Bound the generator charge from both sides.
    Cg {
        #[arg(long)]
        datum: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
    },
}

#[derive(Subcommand)]
enum DynkinCmd {
    Info { affine_type: String },
}

#[derive(Subcommand)]
enum PicardCmd {
    Cdelta(DatumArg),
    Rank(DatumArg),
    Check {
        #[command(flatten)]
        datum: DatumArg,
        #[arg(long)]
        bundle: PathBuf,
    },
}

#[derive(Args)]
struct DatumArg {
    #[arg(long)]
    datum: PathBuf,
}

#[derive(Subcommand)]
enum CoversCmd {
    /// Genus and component count of the cover.
    Genus {
        #[arg(long, default_value = "S3")]
        group: String,
        #[arg(long, default_value_t = 0)]
        genus: u32,
        #[arg(long)]
        tuple: String,
    },
    /// Whether a genus-0 cover with this ramification is connected.
    Connected {
        #[arg(long, default_value = "S3")]
        group: String,
        #[arg(long)]
        tuple: String,
    },
    /// Tuples with product identity drawn from the classes of the given representatives.
    Enumerate {
        #[arg(long, default_value = "S3")]
        group: String,
        #[arg(long)]
        classes: String,
        #[arg(long)]
        connected: bool,
    },
}

#[derive(Subcommand)]
enum ReduceCmd {
    S3 { tuple: String },
}

#[derive(Subcommand)]
enum VerlindeCmd {
    /// Level-one rank for a connected S3 cover of the line.
    Rank {
        tuple: String,
    },
    ClosedForm {
        g: u32,
        n: u32,
        r: u32,
    },
}

/// A domain failure, tagged with the argument it concerns.
struct Failure {
    field: &'static str,
    message: String,
}

trait Field<T> {
    fn field(self, field: &'static str) -> Result<T, Failure>;
}

impl<T, E: std::fmt::Display> Field<T> for Result<T, E> {
    fn field(self, field: &'static str) -> Result<T, Failure> {
        self.map_err(|e| Failure {
            field,
            message: e.to_string(),
        })
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: u32,
    command: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

struct Out {
    json: bool,
}

impl Out {
    fn emit<T: Serialize>(&self, command: &str, body: &T, text: impl FnOnce() -> String) -> Result<(), Failure> {
        if self.json {
            let env = Envelope {
                schema: SCHEMA_VERSION,
                command,
                body,
            };
            let body = serde_json::to_string_pretty(&env).field("output")?;
            // A closed pipe downstream is not our failure.
            let _ = writeln!(io::stdout(), "{body}");
        } else {
            let _ = write!(io::stdout(), "{}", text());
        }
        Ok(())
    }
}

fn read(path: &Path, field: &'static str) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure {
        field,
        message: format!("{}: {e}", path.display()),
    })
}

fn load_datum(path: &Path) -> Result<GroupDatum, Failure> {
    GroupDatum::from_json(&read(path, "--datum")?).field("--datum")
}

fn load_bundle(path: &Path) -> Result<WeightBundle, Failure> {
    WeightBundle::from_json(&read(path, "--bundle")?).field("--bundle")
}

fn matrix(rows: &[Vec<i64>]) -> String {
    rows.iter()
        .map(|r| {
            let cells: Vec<String> = r.iter().map(|x| format!("{x:>3}")).collect();
            format!("  {}\n", cells.join(""))
        })
        .collect()
}

fn join<T: ToString>(xs: impl IntoIterator<Item = T>) -> String {
    xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn run(cli: Cli) -> Result<(), Failure> {
    let out = Out { json: cli.json };
    match cli.command {
        Command::Dynkin {
            action: DynkinCmd::Info { affine_type },
        } => {
            let t: AffineType = affine_type.parse().field("type")?;
            #[derive(Serialize)]
            struct Info {
                #[serde(rename = "type")]
                ty: AffineType,
                twist: u8,
                vertices: usize,
                special_vertex: usize,
                cartan: Vec<Vec<i64>>,
                dual_labels: Vec<u32>,
                #[serde(skip_serializing_if = "Option::is_none")]
                involution: Option<Vec<usize>>,
            }
            let info = Info {
                ty: t.clone(),
                twist: t.twist(),
                vertices: t.vertex_count(),
                special_vertex: t.special_vertex(),
                cartan: t.cartan().to_vec(),
                dual_labels: t.dual_labels().to_vec(),
                involution: (t.twist() == 1).then(|| dual_involution(t.base()).images().to_vec()),
            };
            out.emit("dynkin info", &info, || {
                let mut s = format!("type          {}\n", info.ty);
                s += &format!("vertices      {}\n", join(0..info.vertices));
                s += &format!("special       {}\n", info.special_vertex);
                s += &format!("dual labels   {}\n", join(&info.dual_labels));
                if let Some(inv) = &info.involution {
                    s += &format!("-w0           {}\n", join(inv));
                }
                s += "cartan\n";
                s + &matrix(&info.cartan)
            })
        }
        Command::Picard { action } => match action {
            PicardCmd::Cdelta(a) => {
                let d = load_datum(&a.datum)?;
                let (bundle, c) = c_delta_bundle(&d);
                #[derive(Serialize)]
                struct R {
                    c_delta: u64,
                    bundle: WeightBundle,
                }
                let r = R { c_delta: c, bundle };
                out.emit("picard cdelta", &r, || format!("c_delta {}\n", r.c_delta))
            }
            PicardCmd::Rank(a) => {
                let d = load_datum(&a.datum)?;
                let rank = pic_delta_rank(&d).field("--datum")?;
                #[derive(Serialize)]
                struct R {
                    rank: usize,
                }
                out.emit("picard rank", &R { rank }, || format!("rank {rank}\n"))
            }
            PicardCmd::Check { datum, bundle } => {
                let d = load_datum(&datum.datum)?;
                let b = load_bundle(&bundle)?;
                b.check_against(&d).field("--bundle")?;
                #[derive(Serialize)]
                struct R {
                    charges: Vec<i64>,
                    dominant: bool,
                    pic_delta: bool,
                    charge: Option<i64>,
                }
                let cs = charges(&d, &b).field("--bundle")?;
                let charge = is_pic_delta(&d, &b).field("--bundle")?;
                let r = R {
                    charges: cs,
                    dominant: is_dominant(&b),
                    pic_delta: charge.is_some(),
                    charge,
                };
                out.emit("picard check", &r, || {
                    let labels = d.points().iter().map(|p| p.label());
                    let mut s = String::new();
                    for (l, c) in labels.zip(&r.charges) {
                        s += &format!("{l:<12}{c}\n");
                    }
                    s += &format!("dominant    {}\n", r.dominant);
                    match r.charge {
                        Some(c) => s + &format!("in Pic^Δ    charge {c}\n"),
                        None => s + "not in Pic^Δ\n",
                    }
                })
            }
        },
        Command::Covers { action } => match action {
            CoversCmd::Genus { group, genus, tuple } => {
                let g: FiniteGroup = group.parse().field("--group")?;
                let t = parse_tuple(&tuple).field("--tuple")?;
                let shape = genus_riemann_hurwitz(genus, g, &t).field("--tuple")?;
                out.emit("covers genus", &shape, || {
                    format!("genus {}\ncomponents {}\n", shape.genus, shape.component_count)
                })
            }
            CoversCmd::Connected { group, tuple } => {
                let g: FiniteGroup = group.parse().field("--group")?;
                let r = RamificationVector::new(g, parse_tuple(&tuple).field("--tuple")?).field("--tuple")?;
                let connected = is_connected_genus0(&r).field("--tuple")?;
                #[derive(Serialize)]
                struct R {
                    connected: bool,
                }
                out.emit("covers connected", &R { connected }, || {
                    format!("connected {connected}\n")
                })
            }
            CoversCmd::Enumerate {
                group,
                classes,
                connected,
            } => {
                let g: FiniteGroup = group.parse().field("--group")?;
                let reps = parse_tuple(&classes).field("--classes")?;
                let cls = reps
                    .iter()
                    .map(|&x| g.class_of(x))
                    .collect::<Result<Vec<_>, _>>()
                    .field("--classes")?;
                let tuples = enumerate_tuples(g, &cls, connected).field("--classes")?;
                #[derive(Serialize)]
                struct R {
                    count: usize,
                    tuples: Vec<String>,
                }
                let r = R {
                    count: tuples.len(),
                    tuples: tuples.iter().map(|t| format_tuple(t)).collect(),
                };
                out.emit("covers enumerate", &r, || {
                    let mut s = format!("count {}\n", r.count);
                    for t in &r.tuples {
                        s += &format!("  {t}\n");
                    }
                    s
                })
            }
        },
        Command::Reduce {
            action: ReduceCmd::S3 { tuple },
        } => {
            let r = RamificationVector::new(FiniteGroup::s3(), parse_tuple(&tuple).field("tuple")?).field("tuple")?;
            let w = s3_reduce(&r).field("tuple")?;
            out.emit("reduce s3", &w, || {
                let mut s = format!("{} factor(s)\n", w.factors.len());
                for f in &w.factors {
                    let kind = serde_json::to_value(f.kind).ok();
                    let name = kind
                        .as_ref()
                        .and_then(|k| k["kind"].as_str())
                        .unwrap_or("?")
                        .to_string();
                    s += &format!("  {name:<16}{}\n", format_tuple(&f.tuple()));
                }
                s
            })
        }
        Command::Verlinde { action } => {
            let res = match action {
                VerlindeCmd::Rank { tuple } => {
                    let r = RamificationVector::new(FiniteGroup::s3(), parse_tuple(&tuple).field("tuple")?)
                        .field("tuple")?;
                    s3_level1_rank(&r).field("tuple")?
                }
                VerlindeCmd::ClosedForm { g, n, r } => RankResult {
                    value: rank_closed_form_a(g, n, r).field("closed-form")?,
                    derivation: Derivation::ClosedForm { genus: g, n, r },
                },
            };
            out.emit("verlinde", &res, || format!("rank {}\n", res.value))
        }
        Command::Descend { datum, bundle } => {
            let d = load_datum(&datum)?;
            let b = load_bundle(&bundle)?;
            let cert = certify_descent(&d, &b).field("--bundle")?;
            out.emit("descend", &cert, || {
                let mut s = format!("verdict {:?}\ncharge {}\n", cert.verdict, cert.charge);
                s += &format!("factors {}\n", cert.witness.factors.len());
                if let Some(r) = cert.rank_bound {
                    s += &format!("rank >= {r}\n");
                }
                s
            })
        }
        Command::Cg { datum, budget } => {
            let d = load_datum(&datum)?;
            let report = compute_cg(&d, budget).field("--datum")?;
            out.emit("cg", &report, || {
                let show = |x: Option<u64>| x.map_or("-".to_string(), |v| v.to_string());
                format!(
                    "lower      {}\ncertified  {}\nexact      {}\n",
                    report.lower,
                    show(report.certified_charge),
                    show(report.exact)
                )
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}: {}", f.field, f.message);
            ExitCode::from(1)
        }
    }
}
