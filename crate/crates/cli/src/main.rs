//! Command-line interface: every library operation behind uniform file I/O
//! and stable JSON output (see docs/schema.md at the workspace root).
//!
//! Exit codes: 0 success, 1 domain error (JSON error payload on stdout),
//! 2 usage error.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use revsys::caps::Caps;
use revsys::divisor::Divisor;
use revsys::engine::{
    construct_orientation, rank_via_path_reversals, unfurl, Construction, Outcome,
};
use revsys::error::Error;
use revsys::flow::{break_divisor, is_orientable, max_flow, orient_via_flow, FlowNetwork};
use revsys::graph::Multigraph;
use revsys::orientation::{indegree_divisor, replay, MoveCertificate, PartialOrientation};
use revsys::rank::{rank, rr_verify};
use revsys::reduce::reduce;
use revsys::suites;

#[derive(Parser)]
#[command(
    name = "revsys",
    version,
    about = "Divisor theory on multigraphs via the cycle-cocycle reversal system"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GraphDivisorArgs {
    /// Graph file: one `u v` edge per line.
    graph: String,
    /// Divisor file: `vertex integer` lines; omitted vertices are 0.
    divisor: String,
}

#[derive(Subcommand)]
enum Command {
    /// Genus, spanning tree count, and canonical divisor of a graph.
    Info { graph: String },
    /// The q-reduced representative and its replayable firing vector.
    Reduce {
        #[command(flatten)]
        input: GraphDivisorArgs,
        /// Base vertex (defaults to the lexicographically least).
        #[arg(long)]
        q: Option<String>,
    },
    /// Baker-Norine rank with a replayable certificate.
    Rank {
        #[command(flatten)]
        input: GraphDivisorArgs,
    },
    /// Check the Riemann-Roch identity for one divisor.
    RrCheck {
        #[command(flatten)]
        input: GraphDivisorArgs,
    },
    /// Build a partial orientation realizing the divisor class, or an
    /// obstruction certificate.
    Orient {
        #[command(flatten)]
        input: GraphDivisorArgs,
        /// Replay the certificate before printing.
        #[arg(long)]
        verify: bool,
        /// Include an arrow diagram in the payload.
        #[arg(long)]
        ascii: bool,
    },
    /// Unfurl an orientation to an acyclic or sourceless representative.
    Unfurl {
        graph: String,
        /// Orientation file: `edgeIndex >|<|-` lines.
        orientation: String,
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        ascii: bool,
    },
    /// Rank of an orientation's divisor via directed path reversals.
    RankOrient {
        graph: String,
        orientation: String,
        #[arg(long)]
        verify: bool,
    },
    /// The break divisor representing a degree-g divisor class.
    BreakDivisor {
        #[command(flatten)]
        input: GraphDivisorArgs,
    },
    /// Integral maximum flow and a minimum cut witness.
    Maxflow {
        /// Network file: `u v cap` lines.
        net: String,
        #[arg(long)]
        s: String,
        #[arg(long)]
        t: String,
    },
    /// Whether a degree-(g-1) divisor is orientable.
    Orientable {
        #[command(flatten)]
        input: GraphDivisorArgs,
    },
    /// Brute-force verification suites.
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Run one verification suite against a graph.
    Verify {
        graph: String,
        /// One of: rr, gioan, eulerpar, rank-distance, torsor.
        #[arg(long)]
        suite: String,
        /// Entry bound for divisor sweeps (rr suite).
        #[arg(long, default_value_t = 3)]
        bound: i64,
        /// Sample this many divisors instead of sweeping exhaustively.
        #[arg(long)]
        sample: Option<usize>,
        /// Seed for randomized sampling.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn caps_from_env() -> Result<Caps, String> {
    match std::env::var("ORIENT_RR_CAPS") {
        Ok(spec) => Caps::default().with_overrides(&spec),
        Err(_) => Ok(Caps::default()),
    }
}

fn read(path: &str) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse {
        line: 0,
        msg: format!("{path}: {e}"),
    })
}

fn load_graph(path: &str) -> Result<Multigraph, Error> {
    Multigraph::parse(&read(path)?)
}

fn load_divisor(g: &Multigraph, path: &str) -> Result<Divisor, Error> {
    Divisor::parse(g, &read(path)?)
}

fn pairs(g: &Multigraph, d: &Divisor) -> Vec<(String, i64)> {
    d.pairs_lex(g)
}

#[derive(Serialize)]
struct CertificatePayload<'a> {
    initial: String,
    moves: &'a [revsys::orientation::Move],
    #[serde(rename = "final")]
    final_: String,
}

fn cert_payload(cert: &MoveCertificate) -> CertificatePayload<'_> {
    CertificatePayload {
        initial: format!("{:016x}", cert.initial),
        moves: &cert.moves,
        final_: format!("{:016x}", cert.final_),
    }
}

fn run(cli: Cli) -> Result<serde_json::Value, Error> {
    let caps = caps_from_env().map_err(|msg| Error::Parse { line: 0, msg })?;
    match cli.command {
        Command::Info { graph } => {
            let g = load_graph(&graph)?;
            let k = g.canonical_divisor();
            let vertices: Vec<&str> = g.lex_vertices().iter().map(|&v| g.name(v)).collect();
            let k_values: Vec<i64> = g.lex_vertices().iter().map(|&v| k.get(v)).collect();
            Ok(json!({
                "status": "ok",
                "genus": g.genus(),
                "trees": g.spanning_tree_count(),
                "K": k_values,
                "vertices": vertices,
                "edges": g.edge_count(),
            }))
        }
        Command::Reduce { input, q } => {
            let g = load_graph(&input.graph)?;
            let d = load_divisor(&g, &input.divisor)?;
            let q = match q {
                Some(name) => g.vertex(&name)?,
                None => g.lex_least(),
            };
            let r = reduce(&g, &d, q);
            let firing: Vec<(String, i64)> = g
                .lex_vertices()
                .iter()
                .map(|&v| (g.name(v).to_string(), r.firing[v.0]))
                .collect();
            Ok(json!({
                "status": "ok",
                "q": g.name(q),
                "reduced": pairs(&g, &r.divisor),
                "firing": firing,
            }))
        }
        Command::Rank { input } => {
            let g = load_graph(&input.graph)?;
            let d = load_divisor(&g, &input.divisor)?;
            let cert = rank(&g, &d);
            let winning: Vec<serde_json::Value> = cert
                .winning_removals
                .iter()
                .map(|w| {
                    json!({
                        "removal": pairs(&g, &w.removal),
                        "effective": pairs(&g, &w.effective),
                    })
                })
                .collect();
            Ok(json!({
                "status": "ok",
                "rank": cert.rank,
                "certificate": {
                    "losing_removal": pairs(&g, &cert.losing_removal),
                    "winning_removals": winning,
                },
            }))
        }
        Command::RrCheck { input } => {
            let g = load_graph(&input.graph)?;
            let d = load_divisor(&g, &input.divisor)?;
            let r = rr_verify(&g, &d)?;
            Ok(json!({
                "status": "ok",
                "rank_d": r.rank_d,
                "rank_k_minus_d": r.rank_k_minus_d,
                "degree": r.degree,
                "genus": r.genus,
                "holds": r.holds(),
            }))
        }
        Command::Orient {
            input,
            verify,
            ascii,
        } => {
            let g = load_graph(&input.graph)?;
            let d = load_divisor(&g, &input.divisor)?;
            let construction = construct_orientation(&g, &d)?;
            if verify {
                let empty = PartialOrientation::empty(&g);
                let replayed = replay(&g, construction.certificate(), &empty)?;
                assert_eq!(&replayed, construction.orientation());
            }
            let o = construction.orientation();
            let mut payload = json!({
                "status": "ok",
                "outcome": if construction.is_realized() { "realized" } else { "obstructed" },
                "orientation": o.to_lines(),
                "divisor": pairs(&g, &indegree_divisor(&g, o)),
                "certificate": cert_payload(construction.certificate()),
            });
            if let Construction::Obstructed { d_prime, .. } = &construction {
                payload["d_prime"] = json!(pairs(&g, d_prime));
            }
            if ascii {
                payload["ascii"] = json!(o.to_ascii(&g));
            }
            Ok(payload)
        }
        Command::Unfurl {
            graph,
            orientation,
            verify,
            ascii,
        } => {
            let g = load_graph(&graph)?;
            let o = PartialOrientation::parse(&g, &read(&orientation)?)?;
            let res = unfurl(&g, &o);
            if verify {
                let replayed = replay(&g, &res.certificate, &o)?;
                assert_eq!(replayed, res.orientation);
            }
            let outcome = match res.outcome {
                Outcome::Acyclic => "acyclic",
                Outcome::Sourceless => "sourceless",
                _ => unreachable!("unfurl returns acyclic or sourceless"),
            };
            let mut payload = json!({
                "status": "ok",
                "outcome": outcome,
                "orientation": res.orientation.to_lines(),
                "divisor": pairs(&g, &indegree_divisor(&g, &res.orientation)),
                "certificate": cert_payload(&res.certificate),
            });
            if ascii {
                payload["ascii"] = json!(res.orientation.to_ascii(&g));
            }
            Ok(payload)
        }
        Command::RankOrient {
            graph,
            orientation,
            verify,
        } => {
            let g = load_graph(&graph)?;
            let o = PartialOrientation::parse(&g, &read(&orientation)?)?;
            let (r, cert) = rank_via_path_reversals(&g, &o);
            if verify {
                let replayed = replay(&g, &cert, &o)?;
                assert!(revsys::orientation::classify(&g, &replayed).acyclic);
            }
            Ok(json!({
                "status": "ok",
                "rank": r,
                "certificate": cert_payload(&cert),
            }))
        }
        Command::BreakDivisor { input } => {
            let g = load_graph(&input.graph)?;
            let d = load_divisor(&g, &input.divisor)?;
            let bd = break_divisor(&g, &d)?;
            Ok(json!({
                "status": "ok",
                "break": pairs(&g, &bd),
            }))
        }
        Command::Maxflow { net, s, t } => {
            let network = FlowNetwork::parse(&read(&net)?, &s, &t)?;
            let (flow, cut) = max_flow(&network);
            let cut_names: Vec<&str> = cut.iter().map(|&v| network.name(v)).collect();
            let per_arc: Vec<(usize, i64)> =
                flow.per_arc.iter().copied().enumerate().collect();
            let support: Vec<usize> = flow
                .per_arc
                .iter()
                .enumerate()
                .filter(|(_, &f)| f > 0)
                .map(|(i, _)| i)
                .collect();
            Ok(json!({
                "status": "ok",
                "value": flow.value,
                "cut": cut_names,
                "flow": per_arc,
                "support": support,
            }))
        }
        Command::Orientable { input } => {
            let g = load_graph(&input.graph)?;
            let d = load_divisor(&g, &input.divisor)?;
            let answer = is_orientable(&g, &d)?;
            let witness = if answer {
                Some(orient_via_flow(&g, &d)?.to_lines())
            } else {
                None
            };
            Ok(json!({
                "status": "ok",
                "orientable": answer,
                "orientation": witness,
            }))
        }
        Command::Oracle {
            command:
                OracleCommand::Verify {
                    graph,
                    suite,
                    bound,
                    sample,
                    seed,
                },
        } => {
            let g = load_graph(&graph)?;
            let report = match suite.as_str() {
                "rr" => suites::rr(&g, bound, sample.map(|n| (n, seed))),
                "gioan" => suites::gioan(&g, &caps)?,
                "eulerpar" => suites::eulerpar(&g, &caps)?,
                "rank-distance" => suites::rank_distance(&g, &caps)?,
                "torsor" => suites::torsor(&g, &caps)?,
                other => {
                    return Err(Error::Parse {
                        line: 0,
                        msg: format!(
                            "unknown suite `{other}` (expected rr, gioan, eulerpar, rank-distance, torsor)"
                        ),
                    })
                }
            };
            Ok(json!({
                "status": if report.pass { "ok" } else { "error" },
                "suite": report.suite,
                "pass": report.pass,
                "cases": report.cases,
                "counterexample": report.counterexample,
            }))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(payload) => {
            println!("{payload}");
            if payload["status"] == "ok" {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            let payload = json!({
                "status": "error",
                "code": e.code(),
                "message": e.to_string(),
            });
            println!("{payload}");
            ExitCode::FAILURE
        }
    }
}
