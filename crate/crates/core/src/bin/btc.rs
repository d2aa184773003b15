use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};

use bt_cycles::format::{read_btg, write_btg, write_dec};
use bt_cycles::harness::{self, Coverage, HarnessConfig};
use bt_cycles::patterns::absent_line;
use bt_cycles::search::{find_all_p, find_two_block, SearchError};
use bt_cycles::{canonical_form, find_isomorphism, gen, SearchBudget};

#[derive(Parser)]
#[command(
    name = "btc",
    version,
    about = "Two-block cycles in decomposable bipartite tournaments"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write hosts as .btg files, with .dec decompositions alongside.
    #[command(group(ArgGroup::new("which").required(true).args(["all", "exceptional", "sample"])))]
    Gen {
        #[arg(long)]
        k: usize,
        /// Every isomorphism class.
        #[arg(long)]
        all: bool,
        #[arg(long)]
        exceptional: bool,
        /// Random hosts, one per derived seed.
        #[arg(long, requires = "seed")]
        sample: bool,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Search a host for a spanning D(n,p).
    Find {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, required_unless_present = "all_p")]
        p: Option<usize>,
        #[arg(long)]
        all_p: bool,
        #[arg(long)]
        budget_nodes: Option<u64>,
    },
    /// Print an isomorphism from A to B; exit 1 if there is none.
    Iso { a: PathBuf, b: PathBuf },
    /// Print the canonical form as hex.
    Canon { file: PathBuf },
    /// Run a verification campaign.
    #[command(group(ArgGroup::new("claim").required(true).args(["lemma1", "lemma2", "theorem"])))]
    Verify {
        #[arg(long)]
        lemma1: bool,
        #[arg(long)]
        lemma2: bool,
        #[arg(long, requires = "k")]
        theorem: bool,
        #[arg(long)]
        k: Option<usize>,
        /// Number of distinct sampled classes instead of full enumeration.
        #[arg(long, requires = "seed")]
        sample: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Append-only result cache (JSON lines).
        #[arg(long)]
        cache: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        budget_nodes: Option<u64>,
    },
}

fn budget(nodes: Option<u64>) -> SearchBudget {
    nodes.map_or_else(SearchBudget::unbounded, SearchBudget::nodes)
}

fn run(cli: Cli) -> Result<u8, String> {
    match cli.cmd {
        Cmd::Gen {
            k,
            all,
            exceptional,
            sample: _,
            seed,
            count,
            out,
        } => {
            let hosts = if all {
                gen::enumerate_decomposable(k, true).map_err(|e| e.to_string())?
            } else if exceptional {
                let d = gen::exceptional(k).map_err(|e| e.to_string())?;
                let dec = gen::is_decomposable(&d).ok_or("exceptional host has no decomposition")?;
                vec![(d, dec)]
            } else {
                harness::sample_classes(k, count, seed.expect("clap requires seed")).map_err(|e| e.to_string())?
            };
            fs::create_dir_all(&out).map_err(|e| e.to_string())?;
            for (i, (d, dec)) in hosts.iter().enumerate() {
                let stem = out.join(format!("k{k}_{i:05}"));
                fs::write(stem.with_extension("btg"), write_btg(d)).map_err(|e| e.to_string())?;
                fs::write(stem.with_extension("dec"), write_dec(dec)).map_err(|e| e.to_string())?;
            }
            println!("wrote {} hosts to {}", hosts.len(), out.display());
            Ok(0)
        }
        Cmd::Find {
            input,
            p,
            all_p,
            budget_nodes,
        } => {
            let d = read_btg(&input).map_err(|e| e.to_string())?;
            let budget = budget(budget_nodes);
            if all_p {
                let prof = find_all_p(&d, &budget).map_err(|e| e.to_string())?;
                for p in 2..=d.n() {
                    match prof.witnesses.get(&p) {
                        Some(w) => println!("{}", w.certificate()),
                        None if prof.missing.contains(&p) => println!("{}", absent_line(d.n(), p)),
                        None => println!("undecided n={} p={p}", d.n()),
                    }
                }
                return Ok(if prof.is_complete() { 0 } else { 1 });
            }
            let p = p.expect("clap requires p");
            match find_two_block(&d, p, &budget) {
                Ok(Some(w)) => println!("{}", w.certificate()),
                Ok(None) => println!("{}", absent_line(d.n(), p)),
                Err(SearchError::BudgetExceeded { nodes }) => {
                    println!("undecided n={} p={p} nodes={nodes}", d.n());
                    return Ok(1);
                }
                Err(e) => return Err(e.to_string()),
            }
            Ok(0)
        }
        Cmd::Iso { a, b } => {
            let a = read_btg(&a).map_err(|e| e.to_string())?;
            let b = read_btg(&b).map_err(|e| e.to_string())?;
            match find_isomorphism(&a, &b) {
                Some(m) => {
                    let pairs: Vec<String> = m.iter().enumerate().map(|(i, v)| format!("{}->{v}", i + 1)).collect();
                    println!("isomorphic {}", pairs.join(" "));
                    Ok(0)
                }
                None => {
                    println!("not isomorphic");
                    Ok(1)
                }
            }
        }
        Cmd::Canon { file } => {
            let d = read_btg(&file).map_err(|e| e.to_string())?;
            println!("{}", canonical_form(&d).to_hex());
            Ok(0)
        }
        Cmd::Verify {
            lemma1,
            lemma2,
            theorem: _,
            k,
            sample,
            seed,
            report,
            cache,
            threads,
            budget_nodes,
        } => {
            let cfg = HarnessConfig {
                budget: budget(budget_nodes),
                cache,
                threads,
                ..HarnessConfig::default()
            };
            let campaign = if lemma1 {
                harness::run_lemma1(&cfg)
            } else if lemma2 {
                harness::run_lemma2(&cfg)
            } else {
                let mode = match sample {
                    Some(count) => Coverage::Sampled {
                        count,
                        seed: seed.expect("clap requires seed"),
                    },
                    None => Coverage::Full,
                };
                harness::run_theorem(k.expect("clap requires k"), mode, &cfg)
            }
            .map_err(|e| e.to_string())?;
            for r in &campaign.reports {
                println!(
                    "host {} k={} exceptional={} present={:?} missing={:?} {}ms",
                    r.host_id, r.k, r.is_exceptional, r.p_present, r.p_missing, r.elapsed_ms
                );
            }
            for f in &campaign.failures {
                eprintln!("failure {}: {}\n{}", f.host_id, f.message, f.btg);
            }
            if let Some(path) = report {
                fs::write(&path, campaign.to_json()).map_err(|e| e.to_string())?;
            }
            println!(
                "{}: {} ({} classes)",
                campaign.campaign,
                campaign.verdict,
                campaign.reports.len()
            );
            Ok(campaign.exit_code() as u8)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("btc: {msg}");
            ExitCode::from(2)
        }
    }
}
