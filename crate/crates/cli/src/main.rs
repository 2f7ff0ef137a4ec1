use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use quotopo_core::clans::{all_rooted_clans, build_cover_digraph, build_digraph, RootKind};
use quotopo_core::format::{parse_family, parse_spaces, write_space, ParseError};
use quotopo_core::oracle::{
    census, conjecture_scan, enumerate_topologies, oracle_reconstruct, oracle_reconstruct_labeled,
    EnumerationMode,
};
use quotopo_core::reconstruct::NStarHypothesis;
use quotopo_core::{
    canonical_form, identify, reconstruct_with, verify_candidate, FiniteSpace, PointSet, QuotientFamily,
    ReconstructOptions, SearchStatus, SolutionSet,
};

const EXIT_FALSE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_LIMIT: u8 = 3;

#[derive(Parser)]
#[command(name = "quotopo", version, about = "Quotients of finite topological spaces and their reconstruction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the quotient Q^i of each input space for every i < n.
    Quotients {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Rebuild every space (up to homeomorphism) with the given quotient family.
    Reconstruct {
        #[arg(long)]
        input: PathBuf,
        /// Print every solution instead of the first one.
        #[arg(long)]
        all: bool,
        #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
        max_branches: u64,
        /// Wall-clock limit in seconds.
        #[arg(long, default_value_t = 60, value_parser = clap::value_parser!(u64).range(1..))]
        time_limit: u64,
        #[arg(long, env = "QUOTOPO_THREADS", default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        threads: u64,
        #[arg(long, value_enum, default_value_t = NStar::Any)]
        n_star: NStar,
        #[arg(long)]
        json: bool,
    },
    /// Print the canonical certificate of each input space as hex.
    Canon {
        #[arg(long)]
        input: PathBuf,
    },
    /// Print the rooted clans of each input space, or its digraph in DOT.
    Clans {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        dot: bool,
        /// Write one DOT file per space into this directory.
        #[arg(long, requires = "dot")]
        out_dir: Option<PathBuf>,
        /// Use the digraph of covering sets.
        #[arg(long)]
        covers: bool,
    },
    /// List every topology on n points.
    Enumerate {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=8))]
        n: u64,
        #[arg(long)]
        up_to_homeo: bool,
        /// Print only the number of spaces.
        #[arg(long)]
        count: bool,
        #[arg(long)]
        json: bool,
    },
    /// Solve reconstruction by brute force.
    Oracle {
        #[arg(long)]
        input: PathBuf,
        /// Sweep every labeled topology instead of one per class.
        #[arg(long)]
        deep: bool,
        #[arg(long)]
        json: bool,
    },
    /// Check ambiguous families for nontrivial clans in their quotients.
    ScanConjecture {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=7))]
        n: u64,
        #[arg(long)]
        json: bool,
    },
    /// Count homeomorphism classes by the shape of n*.
    Census {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=6))]
        n: u64,
        #[arg(long)]
        json: bool,
    },
    /// Exit with 0 if the candidate has the given quotient family, 1 if not.
    Verify {
        #[arg(long)]
        candidate: PathBuf,
        #[arg(long)]
        family: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum NStar {
    Any,
    Full,
    Point,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn located(path: &Path, e: ParseError) -> Failure {
    Failure::input(format!("{}:{}:{}: {}", path.display(), e.line, e.column, e.message))
}

fn read_spaces(path: &Path) -> Result<Vec<FiniteSpace>, Failure> {
    let spaces = parse_spaces(&read(path)?).map_err(|e| located(path, e))?;
    if spaces.is_empty() {
        return Err(Failure::input(format!("{}:1:1: no space block found", path.display())));
    }
    Ok(spaces)
}

fn read_family(path: &Path) -> Result<QuotientFamily, Failure> {
    parse_family(&read(path)?).map_err(|e| located(path, e))
}

fn sorted_opens(space: &FiniteSpace) -> Vec<PointSet> {
    let mut opens = space.opens().to_vec();
    opens.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp_lex(b)));
    opens
}

fn space_json(space: &FiniteSpace) -> Value {
    let opens: Vec<Vec<usize>> = sorted_opens(space).iter().map(|o| o.points().collect()).collect();
    json!({ "points": space.n(), "opens": opens })
}

fn status_str(status: SearchStatus) -> &'static str {
    match status {
        SearchStatus::Complete => "complete",
        SearchStatus::LimitExceeded => "limit-exceeded",
    }
}

fn print_solutions(set: &SolutionSet, all: bool, as_json: bool) -> u8 {
    let shown: Vec<&FiniteSpace> = set.spaces().take(if all { usize::MAX } else { 1 }).collect();
    if as_json {
        let doc = json!({
            "solutions": shown.iter().map(|s| space_json(s)).collect::<Vec<_>>(),
            "count": set.len(),
            "status": status_str(set.status),
        });
        println!("{}", serde_json::to_string_pretty(&doc).unwrap());
    } else {
        for (i, s) in shown.iter().enumerate() {
            println!("# solution {}", i + 1);
            println!("{}", write_space(s));
        }
        if set.status == SearchStatus::LimitExceeded {
            println!("status: limit-exceeded");
        }
        println!("solutions: {}", set.len());
    }
    match set.status {
        SearchStatus::Complete => 0,
        SearchStatus::LimitExceeded => EXIT_LIMIT,
    }
}

fn root_kind(kind: RootKind) -> &'static str {
    match kind {
        RootKind::UpperNonPaired => "upper",
        RootKind::LowerNonPaired => "lower",
        RootKind::Paired => "paired",
    }
}

macro_rules! print_json {
    ($value:expr) => {
        println!("{}", serde_json::to_string_pretty($value).unwrap())
    };
}

fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Quotients { input, json: as_json } => {
            let spaces = read_spaces(&input)?;
            let mut docs = Vec::new();
            let mut blocks = Vec::new();
            for space in &spaces {
                if space.n() < 2 {
                    return Err(Failure::input("quotients need at least 2 points"));
                }
                let qs: Vec<FiniteSpace> = (1..space.n())
                    .map(|i| identify(space, i).expect("1 <= i < n").space)
                    .collect();
                docs.push(json!(qs.iter().map(space_json).collect::<Vec<_>>()));
                for (i, q) in qs.iter().enumerate() {
                    blocks.push(format!("# Q^{}\n{}", i + 1, write_space(q)));
                }
            }
            if as_json {
                print_json!(&docs);
            } else {
                println!("{}", blocks.join("\n"));
            }
            Ok(0)
        }
        Command::Reconstruct {
            input,
            all,
            max_branches,
            time_limit,
            threads,
            n_star,
            json: as_json,
        } => {
            let family = read_family(&input)?;
            let options = ReconstructOptions {
                max_branches,
                time_limit: Some(Duration::from_secs(time_limit)),
                threads: threads as usize,
                n_star: match n_star {
                    NStar::Any => NStarHypothesis::Any,
                    NStar::Full => NStarHypothesis::Full,
                    NStar::Point => NStarHypothesis::Point,
                },
            };
            Ok(print_solutions(&reconstruct_with(&family, &options), all, as_json))
        }
        Command::Canon { input } => {
            for space in read_spaces(&input)? {
                println!("{}", canonical_form(&space).to_hex());
            }
            Ok(0)
        }
        Command::Clans {
            input,
            dot,
            out_dir,
            covers,
        } => {
            let spaces = read_spaces(&input)?;
            for (i, space) in spaces.iter().enumerate() {
                let digraph = if covers {
                    build_cover_digraph(space)
                } else {
                    build_digraph(space)
                };
                if dot {
                    match &out_dir {
                        Some(dir) => {
                            fs::create_dir_all(dir)
                                .and_then(|_| fs::write(dir.join(format!("space-{}.dot", i + 1)), digraph.to_dot()))
                                .map_err(|e| Failure::input(format!("{}: {e}", dir.display())))?;
                        }
                        None => print!("{}", digraph.to_dot()),
                    }
                    continue;
                }
                if i > 0 {
                    println!();
                }
                for clan in all_rooted_clans(&digraph) {
                    let members: Vec<String> = clan.members.iter().map(|m| m.to_string()).collect();
                    println!(
                        "root {} {}{}: {}",
                        clan.root,
                        root_kind(clan.root_kind),
                        if clan.is_trivial() { " trivial" } else { "" },
                        members.join(" ")
                    );
                }
            }
            Ok(0)
        }
        Command::Enumerate {
            n,
            up_to_homeo,
            count,
            json: as_json,
        } => {
            let mode = if up_to_homeo {
                EnumerationMode::UpToHomeomorphism
            } else {
                EnumerationMode::Labeled
            };
            let stream = enumerate_topologies(n as usize, mode).map_err(|e| Failure::input(e.to_string()))?;
            if count {
                println!("{}", stream.count());
            } else if as_json {
                print_json!(&stream.map(|s| space_json(&s)).collect::<Vec<_>>());
            } else {
                for (i, s) in stream.enumerate() {
                    if i > 0 {
                        println!();
                    }
                    print!("{}", write_space(&s));
                }
            }
            Ok(0)
        }
        Command::Oracle {
            input,
            deep,
            json: as_json,
        } => {
            let family = read_family(&input)?;
            let set = if deep {
                oracle_reconstruct_labeled(&family)
            } else {
                oracle_reconstruct(&family)
            }
            .map_err(|e| Failure::input(e.to_string()))?;
            Ok(print_solutions(&set, true, as_json))
        }
        Command::ScanConjecture { n, json: as_json } => {
            let report = conjecture_scan(n as usize).map_err(|e| Failure::input(e.to_string()))?;
            if as_json {
                print_json!(&report);
            } else {
                println!("n: {}", report.n);
                println!("families: {}", report.families);
                println!("ambiguous: {}", report.multi_solution);
                println!("counterexamples: {}", report.counterexamples);
                for inst in report.instances.iter().filter(|i| !i.consistent) {
                    let roots: Vec<String> = inst
                        .nontrivial_clans
                        .iter()
                        .map(|(j, r)| format!("{r} in quotient {}", j + 1))
                        .collect();
                    println!("# {} solutions; nontrivial clans at {}", inst.solutions.len(), roots.join(", "));
                }
            }
            Ok(0)
        }
        Command::Census { n, json: as_json } => {
            let report = census(n as usize).map_err(|e| Failure::input(e.to_string()))?;
            if as_json {
                print_json!(&report);
            } else {
                println!("n: {}", report.n);
                println!("classes: {}", report.classes);
                println!("n* = T: {}", report.n_star_full);
                println!("n* = {{n}}: {}", report.n_star_point);
                println!("neither: {}", report.neither);
                println!("violations: {}", report.full_violations.len() + report.point_violations.len());
                for v in report.full_violations.iter().chain(&report.point_violations) {
                    println!("# {v}");
                }
            }
            Ok(0)
        }
        Command::Verify { candidate, family } => {
            let spaces = read_spaces(&candidate)?;
            if spaces.len() != 1 {
                return Err(Failure::input(format!(
                    "{}: expected one space block, found {}",
                    candidate.display(),
                    spaces.len()
                )));
            }
            let ok = verify_candidate(&spaces[0], &read_family(&family)?);
            println!("{ok}");
            Ok(if ok { 0 } else { EXIT_FALSE })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
