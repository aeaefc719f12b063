//! `isoper`: JSON front end to the isoperiodic library.
//!
//! Exit codes: 0 success, 1 certificate rejected, 2 malformed input,
//! 3 precondition violated, 4 internal verification failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use isoperiodic::admissible::{
    find_admissible_decomposition, is_admissible_decomposition, is_admissible_element, non_admissible_locus,
    rank2_envelope, Decomposition, NonAdmissibleLocus,
};
use isoperiodic::arnoldf2::{sp_orbit_arnold, standard_arnold_map, ArnoldMap};
use isoperiodic::decompgraph::{connect, enumerate_bounded, verify_certificate, Certificate};
use isoperiodic::flatsurf::{check_branch, genus2_odd_branch_point, random_cylinder_graph, CylinderGraph, PathChoice};
use isoperiodic::haupt::{enumerate_lifts, haupt_check, PeriodLift};
use isoperiodic::periods::{Degree, PeriodHom};
use isoperiodic::symplattice::LatticeVector;
use isoperiodic::{random, Error};

const DEFAULT_SEED: u64 = 1;

#[derive(Parser)]
#[command(name = "isoper", version, about = "Admissible decompositions, certificates and flat-surface constructions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cardinality of the image of a period homomorphism.
    Degree {
        #[arg(long)]
        period: PathBuf,
    },
    /// Admissibility of elements and decompositions, and the non-admissible locus.
    Admissible {
        #[arg(long)]
        period: PathBuf,
        /// Comma-separated lattice coordinates; repeatable.
        #[arg(long, allow_hyphen_values = true)]
        vector: Vec<String>,
        #[arg(long)]
        decomposition: Option<PathBuf>,
    },
    /// A p-admissible decomposition, or the rank-two envelope of an element.
    Decompose {
        #[arg(long)]
        period: PathBuf,
        /// Require the half reduction of p to be nonzero on every factor.
        #[arg(long)]
        degree3: bool,
        /// Build the envelope of this element instead.
        #[arg(long, allow_hyphen_values = true)]
        envelope: Option<String>,
    },
    /// Connect two admissible decompositions by a certificate.
    Connect {
        #[arg(long)]
        period: PathBuf,
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        to: PathBuf,
        /// Certificate file; printed inline when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a certificate against a period. Exit 1 when rejected.
    VerifyCert {
        #[arg(long)]
        period: PathBuf,
        certificate: PathBuf,
    },
    /// Vertices and edges with factor entries bounded by B.
    GraphEnum {
        #[arg(long)]
        period: PathBuf,
        #[arg(long, default_value_t = 1)]
        bound: u32,
        #[arg(long, default_value_t = 100_000)]
        max_vertices: usize,
        /// Also connect every vertex to the first one and verify.
        #[arg(long)]
        certify: bool,
    },
    /// Haupt verdicts for one lift or for all lifts in a box.
    Haupt {
        #[arg(long, conflicts_with = "lift", required_unless_present = "lift")]
        period: Option<PathBuf>,
        #[arg(long)]
        lift: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        bound: u32,
    },
    /// Arnold classes in the orbit of the period stabilizer.
    ArnoldOrbit {
        #[arg(long, conflicts_with = "genus", required_unless_present = "genus")]
        map: Option<PathBuf>,
        /// Use the standard map of this genus.
        #[arg(long)]
        genus: Option<usize>,
    },
    /// Odd genus-two surface with prescribed real periods.
    Genus2Branch {
        /// Period file; a random degree-3 period is drawn from the seed when omitted.
        #[arg(long)]
        period: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Degenerate a cylinder graph until one cylinder crosses a level.
    CylDegenerate {
        /// Graph file; random graphs are drawn from the seed when omitted.
        #[arg(long, conflicts_with = "genus")]
        graph: Option<PathBuf>,
        #[arg(long)]
        genus: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, value_enum, default_value_t = Choice::Lower)]
        choice: Choice,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Choice {
    Lower,
    Higher,
}

impl From<Choice> for PathChoice {
    fn from(c: Choice) -> Self {
        match c {
            Choice::Lower => PathChoice::LowerIndex,
            Choice::Higher => PathChoice::HigherIndex,
        }
    }
}

/// Payload and exit code of a completed command.
struct Outcome {
    payload: Value,
    code: u8,
}

impl Outcome {
    fn ok(schema: &str, mut payload: Value) -> Self {
        payload["schema"] = json!(format!("isoper/{schema}/v1"));
        Outcome { payload, code: 0 }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| Error::input(format!("{}: {e}", path.display())).into())
}

fn parse_vector(s: &str, dim: usize) -> anyhow::Result<LatticeVector> {
    let xs: Vec<i64> = s
        .split(',')
        .map(|x| x.trim().parse::<i64>())
        .collect::<Result<_, _>>()
        .map_err(|e| Error::input(format!("vector {s:?}: {e}")))?;
    if xs.len() != dim {
        bail!(Error::input(format!("vector {s:?} has {} coordinates, expected {dim}", xs.len())));
    }
    Ok(LatticeVector::from_i64s(&xs))
}

fn strings(v: &LatticeVector) -> Vec<String> {
    v.0.iter().map(ToString::to_string).collect()
}

fn degree_json(d: &Degree) -> Value {
    match d {
        Degree::Finite(n) => n.to_string().parse::<u64>().map_or_else(|_| json!(n.to_string()), |x| json!(x)),
        Degree::Infinite => json!("infinity"),
    }
}

fn locus_json(l: &NonAdmissibleLocus) -> Value {
    match l {
        NonAdmissibleLocus::Empty => json!({ "kind": "empty" }),
        NonAdmissibleLocus::Line { axis } => json!({ "kind": "line", "axis": strings(axis) }),
        NonAdmissibleLocus::Congruence { axis, modulus } => {
            json!({ "kind": "congruence", "axis": strings(axis), "modulus": modulus.to_string() })
        }
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> anyhow::Result<Value> {
    serde_json::to_value(x).map_err(|e| Error::internal("serialization", e.to_string()).into())
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    match cli.command {
        Command::Degree { period } => {
            let p: PeriodHom = read_json(&period)?;
            let d = p.degree();
            Ok(Outcome::ok(
                "degree",
                json!({ "genus": p.genus(), "degree": degree_json(&d), "degree_at_least_3": d.at_least(3) }),
            ))
        }
        Command::Admissible { period, vector, decomposition } => {
            let p: PeriodHom = read_json(&period)?;
            let n = 2 * p.genus();
            let mut elements = vec![];
            for s in &vector {
                let v = parse_vector(s, n)?;
                elements.push(json!({ "vector": strings(&v), "admissible": is_admissible_element(&p, &v)? }));
            }
            let mut payload = json!({
                "elements": elements,
                "non_admissible_locus": locus_json(&non_admissible_locus(&p)?),
            });
            if let Some(path) = decomposition {
                let d: Decomposition = read_json(&path)?;
                d.validate()?;
                payload["decomposition_admissible"] = json!(is_admissible_decomposition(&p, &d));
            }
            Ok(Outcome::ok("admissible", payload))
        }
        Command::Decompose { period, degree3, envelope } => {
            let p: PeriodHom = read_json(&period)?;
            let d = match envelope {
                Some(s) => rank2_envelope(&p, &parse_vector(&s, 2 * p.genus())?)?,
                None => find_admissible_decomposition(&p, degree3)?,
            };
            if !is_admissible_decomposition(&p, &d) {
                bail!(Error::internal("decompose", "result is not p-admissible"));
            }
            let mut payload = to_value(&d)?;
            payload["ranks"] = json!(d.factors.iter().map(|f| f.rank()).collect::<Vec<_>>());
            Ok(Outcome::ok("decomposition", payload))
        }
        Command::Connect { period, from, to, out } => {
            let p: PeriodHom = read_json(&period)?;
            let d1: Decomposition = read_json(&from)?;
            let d2: Decomposition = read_json(&to)?;
            let c = connect(&p, &d1, &d2)?;
            if !verify_certificate(&p, &c) {
                bail!(Error::internal("connect", "emitted certificate fails verification"));
            }
            let mut payload = json!({ "edges": c.edges(), "vertices": c.vertices.len() });
            let mut cert = to_value(&c)?;
            cert["schema"] = json!("isoper/certificate/v1");
            match out {
                Some(path) => {
                    let text = serde_json::to_string_pretty(&cert)?;
                    fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
                    payload["out"] = json!(path.display().to_string());
                }
                None => payload["certificate"] = cert,
            }
            Ok(Outcome::ok("connect", payload))
        }
        Command::VerifyCert { period, certificate } => {
            let p: PeriodHom = read_json(&period)?;
            let c: Certificate = read_json(&certificate)?;
            let same_period = c.period == p;
            let accepted = same_period && !c.vertices.is_empty() && verify_certificate(&p, &c);
            let mut o = Outcome::ok(
                "verify-cert",
                json!({ "accepted": accepted, "period_matches": same_period, "edges": c.edges() }),
            );
            o.code = if accepted { 0 } else { 1 };
            Ok(o)
        }
        Command::GraphEnum { period, bound, max_vertices, certify } => {
            let p: PeriodHom = read_json(&period)?;
            let g = enumerate_bounded(&p, bound, max_vertices)?;
            let mut payload = to_value(&g)?;
            if certify && !g.vertices.is_empty() {
                let base = Decomposition::new(g.vertices[0].factors().to_vec());
                let mut longest = 0;
                for v in &g.vertices {
                    let c = connect(&p, &base, &Decomposition::new(v.factors().to_vec()))?;
                    if !verify_certificate(&p, &c) || c.end() != v {
                        bail!(Error::internal("graph-enum", format!("certificate to {v} fails verification")));
                    }
                    longest = longest.max(c.edges());
                }
                payload["certified"] = json!({ "base": 0, "longest": longest });
            }
            Ok(Outcome::ok("graph-enum", payload))
        }
        Command::Haupt { period, lift, bound } => {
            if let Some(path) = lift {
                let l: PeriodLift = read_json(&path)?;
                let v = haupt_check(&l)?;
                return Ok(Outcome::ok(
                    "haupt",
                    json!({ "lift": to_value(&l)?, "realizable": v.is_realizable(), "verdict": to_value(&v)? }),
                ));
            }
            let p: PeriodHom = read_json(period.as_deref().expect("clap requires period or lift"))?;
            let lifts = enumerate_lifts(&p, bound)?;
            let realizable: Vec<Value> = lifts
                .iter()
                .filter(|(_, v)| v.is_realizable())
                .map(|(l, v)| Ok(json!({ "lift": to_value(l)?, "verdict": to_value(v)? })))
                .collect::<anyhow::Result<_>>()?;
            Ok(Outcome::ok(
                "haupt",
                json!({ "bound": bound, "total": lifts.len(), "realizable_count": realizable.len(), "realizable": realizable }),
            ))
        }
        Command::ArnoldOrbit { map, genus } => {
            let a: ArnoldMap = match (map, genus) {
                (Some(path), _) => read_json(&path)?,
                (None, Some(g)) => standard_arnold_map(g)?,
                (None, None) => unreachable!("clap requires map or genus"),
            };
            let r = sp_orbit_arnold(&a)?;
            Ok(Outcome::ok("arnold-orbit", json!({ "map": to_value(&a)?, "report": to_value(&r)? })))
        }
        Command::Genus2Branch { period, seed } => {
            let p: PeriodHom = match period {
                Some(path) => read_json(&path)?,
                None => random::random_period_degree3(&mut random::rng(seed), 2),
            };
            let b = genus2_odd_branch_point(&p)?;
            let checks = check_branch(&p, &b)?;
            if !checks.all() {
                bail!(Error::internal("genus2-branch", format!("constructed surface fails its checks: {checks:?}")));
            }
            let info = b.surface.validate()?;
            Ok(Outcome::ok(
                "genus2-branch",
                json!({ "period": to_value(&p)?, "checks": to_value(&checks)?, "info": to_value(&info)?, "branch": to_value(&b)? }),
            ))
        }
        Command::CylDegenerate { graph, genus, seed, trials, choice } => {
            let choice = PathChoice::from(choice);
            if let Some(path) = graph {
                let g: CylinderGraph = read_json(&path)?;
                let d = g.degenerate_real(choice)?;
                return Ok(Outcome::ok("cyl-degenerate", json!({ "degeneration": to_value(&d)? })));
            }
            let genus = genus.ok_or_else(|| Error::input("either --graph or --genus is required"))?;
            if genus == 0 {
                bail!(Error::input("genus must be positive"));
            }
            let mut rng = random::rng(seed);
            let mut runs = vec![];
            for _ in 0..trials {
                let g = random_cylinder_graph(&mut rng, genus);
                let d = g.degenerate_real(choice)?;
                runs.push(json!({
                    "graph": to_value(&g)?,
                    "moves": d.moves.len(),
                    "meeting_counts": d.meeting_counts,
                    "level": to_value(&d.level)?,
                }));
            }
            Ok(Outcome::ok("cyl-degenerate", json!({ "genus": genus, "seed": seed, "runs": runs })))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::Input(_)) => 2,
        Some(Error::Precondition(_)) => 3,
        Some(Error::Internal { .. }) => 4,
        None if e.downcast_ref::<std::io::Error>().is_some() || e.downcast_ref::<serde_json::Error>().is_some() => 2,
        None => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(o) => {
            println!("{}", serde_json::to_string_pretty(&o.payload).expect("values serialize"));
            ExitCode::from(o.code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
