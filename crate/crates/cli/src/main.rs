//! `gfcpc` command-line front end.
//!
//! Exit codes: 0 success, 1 semantic failure (invalid code, decode failure,
//! reproduction mismatch), 2 input error, 3 search budget exhausted.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use gfcpc::bounds::{
    binary_structural_bound, binary_triple_bound, dump_reports, lower_bound_drm_submatrix,
    lower_bound_joins, lower_bound_trivial, optimal_redundancy_exact, render_reports,
    upper_bound_grouping, upper_bound_multistep, BoundReport, BoundStatus,
};
use gfcpc::codec::{
    decode_block_within, grouped_construct, multi_step_construct_with, verify_gfcpc,
    ConstructionTrace, IndexGrouping, StepMode,
};
use gfcpc::dcode::{min_length_dcode, SearchBudget, DEFAULT_NODE_LIMIT};
use gfcpc::drm::{gfcpc_drm, GfcpcProblem};
use gfcpc::error::{Error, Result};
use gfcpc::format::{
    read_drm, read_encoding, read_partition, read_problem_file, write_dcode, write_drm,
    write_encoding, write_partition,
};
use gfcpc::partition::join_many;
use gfcpc::reproduce::{reproduce, EXAMPLE_IDS};
use gfcpc::space::FieldVector;

#[derive(Parser)]
#[command(name = "gfcpc", version, about = "Generalized function-correcting partition codes")]
struct Cli {
    /// Node limit for each exact search.
    #[arg(long, global = true, default_value_t = DEFAULT_NODE_LIMIT)]
    budget_nodes: u64,
    /// Worker threads inside the solver; 1 gives bit-reproducible output.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Write the produced file here instead of standard output.
    #[arg(short = 'o', long = "output", global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Join partition files.
    Join {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Requirement matrix of a problem over its message subset or the whole space.
    Drm {
        problem: PathBuf,
        /// Messages to restrict to, overriding the problem file's list.
        #[arg(long, num_args = 1.., value_delimiter = ',')]
        messages: Vec<String>,
    },
    /// Shortest D-code for a requirement matrix dump.
    Solve {
        drm: PathBuf,
        /// Alphabet size when the dump has no `q` line.
        #[arg(long)]
        q: Option<usize>,
    },
    /// Build an encoding and print its trace.
    Construct {
        problem: PathBuf,
        /// Concatenate group codes instead, e.g. `1,2|3` (file-order indices).
        #[arg(long)]
        grouped: Option<String>,
        /// Let multi-step parities vary inside blocks.
        #[arg(long, conflicts_with = "grouped")]
        free: bool,
    },
    /// Check an encoding against a problem.
    Verify { problem: PathBuf, encoding: PathBuf },
    /// Evaluate redundancy bounds.
    Bound {
        problem: PathBuf,
        #[arg(long, value_enum, default_value_t = Kind::All)]
        kind: Kind,
        /// Message subset for `drm-sub`, overriding the problem file's list.
        #[arg(long, num_args = 1.., value_delimiter = ',')]
        messages: Vec<String>,
        /// Print the machine-readable `gfcpc-report v1` dump.
        #[arg(long)]
        dump: bool,
    },
    /// Recover the block of a received word at one level.
    Decode {
        encoding: PathBuf,
        problem: PathBuf,
        /// Level in file order (1-based).
        #[arg(long)]
        level: usize,
        /// Decoding radius; defaults to floor((d_h - 1) / 2).
        #[arg(long)]
        radius: Option<usize>,
        word: String,
    },
    /// Recompute a bundled example against its expected values.
    Reproduce {
        /// ex1 .. ex6, or `all`.
        example: String,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    LowerJoin,
    UpperGrouping,
    DrmSub,
    Trivial,
    BinaryTriple,
    BinaryStructural,
    Exact,
    Multistep,
    All,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

/// Prefixes parse errors with the file name.
fn in_file<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { line, message } => Error::Input(format!("{}:{line}: {message}", path.display())),
        other => other,
    })
}

struct Loaded {
    prob: GfcpcProblem,
    messages: Option<Vec<FieldVector>>,
}

fn load_problem(path: &Path) -> Result<Loaded> {
    let pf = in_file(path, read_problem_file(&read(path)?))?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let prob = pf.load(|p| read(&dir.join(p)))?;
    Ok(Loaded {
        prob,
        messages: pf.messages,
    })
}

fn parse_messages(prob: &GfcpcProblem, texts: &[String]) -> Result<Vec<FieldVector>> {
    texts.iter().map(|t| prob.space().parse_vector(t)).collect()
}

/// Canonical position (0-based) of a 1-based file-order level.
fn canonical_level(prob: &GfcpcProblem, file_level: usize) -> Result<usize> {
    prob.original_order()
        .iter()
        .position(|&o| o + 1 == file_level)
        .ok_or_else(|| Error::Input(format!("level {file_level} outside 1..={}", prob.len())))
}

/// File-order name of the join of canonical levels `levels` (0-based).
fn join_label(prob: &GfcpcProblem, levels: impl IntoIterator<Item = usize>) -> String {
    let mut idx: Vec<usize> = levels.into_iter().map(|h| prob.original_order()[h] + 1).collect();
    idx.sort_unstable();
    idx.iter().map(|i| format!("P{i}")).collect::<Vec<_>>().join("v")
}

fn emit(output: &Option<PathBuf>, text: &str) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| Error::Input(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn print_trace(prob: &GfcpcProblem, trace: &ConstructionTrace) {
    println!("mode: {}", trace.mode);
    println!("step  partition          d   r_h");
    for s in &trace.steps {
        let q = join_label(prob, s.level - 1..prob.len());
        println!("{:<5} {:<18} {:<3} {}", s.level, q, s.distance, s.redundancy());
    }
    println!("total {}", trace.total_redundancy());
}

fn cmd_join(cli: &Cli, inputs: &[PathBuf]) -> Result<ExitCode> {
    let parts = inputs
        .iter()
        .map(|p| in_file(p, read_partition(&read(p)?)))
        .collect::<Result<Vec<_>>>()?;
    let join = join_many(&parts)?;
    emit(&cli.output, &write_partition(&join))?;
    if cli.output.is_some() {
        println!("join has {} blocks", join.num_blocks());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_drm(cli: &Cli, problem: &Path, messages: &[String]) -> Result<ExitCode> {
    let l = load_problem(problem)?;
    let msgs = if !messages.is_empty() {
        parse_messages(&l.prob, messages)?
    } else {
        l.messages.unwrap_or(l.prob.space().vectors()?)
    };
    let d = gfcpc_drm(&l.prob, &msgs)?;
    emit(&cli.output, &write_drm(&d, Some(l.prob.space().q())))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_solve(cli: &Cli, budget: &SearchBudget, drm: &Path, q: Option<usize>) -> Result<ExitCode> {
    let (d, file_q) = in_file(drm, read_drm(&read(drm)?, q))?;
    let q = q.or(file_q).ok_or_else(|| Error::Input("alphabet unknown: pass --q".into()))?;
    let w = min_length_dcode(&d, q, budget)?;
    if cli.output.is_some() {
        println!("N = {}", w.length());
    }
    emit(&cli.output, &write_dcode(&w))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_construct(
    cli: &Cli,
    budget: &SearchBudget,
    problem: &Path,
    grouped: Option<&str>,
    free: bool,
) -> Result<ExitCode> {
    let prob = load_problem(problem)?.prob;
    let enc = match grouped {
        Some(spec) => {
            let file_groups = IndexGrouping::parse(prob.len(), spec)?;
            let groups = file_groups
                .groups()
                .iter()
                .map(|g| g.iter().map(|&i| canonical_level(&prob, i).map(|h| h + 1)).collect())
                .collect::<Result<Vec<Vec<usize>>>>()?;
            let grouping = IndexGrouping::new(prob.len(), groups)?;
            let (enc, codes) = grouped_construct(&prob, &grouping, budget)?;
            println!("grouping {spec}");
            println!("group              d   r");
            for c in &codes {
                let label = join_label(&prob, c.levels.iter().map(|l| l - 1));
                println!("{:<18} {:<3} {}", label, c.distance, c.encoding.r());
            }
            println!("total {}", enc.r());
            enc
        }
        None => {
            let mode = if free { StepMode::Free } else { StepMode::BlockConstant };
            let (enc, trace) = multi_step_construct_with(&prob, budget, mode)?;
            print_trace(&prob, &trace);
            enc
        }
    };
    emit(&cli.output, &write_encoding(&enc))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(problem: &Path, encoding: &Path) -> Result<ExitCode> {
    let prob = load_problem(problem)?.prob;
    let enc = in_file(encoding, read_encoding(&read(encoding)?))?;
    let report = verify_gfcpc(&enc, &prob)?;
    if report.is_valid() {
        println!("valid r={}", enc.r());
        return Ok(ExitCode::SUCCESS);
    }
    for v in &report.violations {
        let h = prob.original_order()[v.level - 1] + 1;
        println!("violate h={h} u={} v={} got={} need={}", v.u, v.v, v.achieved, v.required);
    }
    println!("invalid: {} violations", report.violations.len());
    Ok(ExitCode::from(1))
}

fn bound_reports(
    budget: &SearchBudget,
    l: &Loaded,
    kind: Kind,
    messages: &[String],
) -> Result<Vec<BoundReport>> {
    let prob = &l.prob;
    let sub = || -> Result<BoundReport> {
        let msgs = if !messages.is_empty() {
            parse_messages(prob, messages)?
        } else {
            l.messages
                .clone()
                .ok_or_else(|| Error::Input("drm-sub needs --messages or a `messages` line".into()))?
        };
        lower_bound_drm_submatrix(prob, &msgs, budget)
    };
    Ok(match kind {
        Kind::LowerJoin => vec![lower_bound_joins(prob, budget)?],
        Kind::UpperGrouping => vec![upper_bound_grouping(prob, budget)?],
        Kind::DrmSub => vec![sub()?],
        Kind::Trivial => vec![lower_bound_trivial(prob)?],
        Kind::BinaryTriple => vec![binary_triple_bound(prob)?],
        Kind::BinaryStructural => vec![binary_structural_bound(prob)?],
        Kind::Exact => vec![optimal_redundancy_exact(prob, budget)?],
        Kind::Multistep => vec![upper_bound_multistep(prob, budget)?],
        Kind::All => {
            let mut out = vec![lower_bound_trivial(prob)?, lower_bound_joins(prob, budget)?];
            if l.messages.is_some() || !messages.is_empty() {
                out.push(sub()?);
            }
            if prob.space().q() == 2 && prob.len() == 2 {
                out.push(binary_triple_bound(prob)?);
                out.push(binary_structural_bound(prob)?);
            }
            out.push(upper_bound_multistep(prob, budget)?);
            out.push(upper_bound_grouping(prob, budget)?);
            out.push(optimal_redundancy_exact(prob, budget)?);
            out
        }
    })
}

fn cmd_bound(
    budget: &SearchBudget,
    problem: &Path,
    kind: Kind,
    messages: &[String],
    dump: bool,
) -> Result<ExitCode> {
    let l = load_problem(problem)?;
    let reports = bound_reports(budget, &l, kind, messages)?;
    let sorted = l.prob.original_order().iter().enumerate().all(|(i, &o)| i == o);
    if !sorted && !dump {
        println!("note: levels below are numbered by ascending distance, not file order");
    }
    if dump {
        print!("{}", dump_reports(&reports));
    } else {
        print!("{}", render_reports(&reports));
    }
    let cut_short = reports
        .iter()
        .any(|r| matches!(r.status, BoundStatus::CertifiedLower | BoundStatus::Upper));
    Ok(if cut_short { ExitCode::from(3) } else { ExitCode::SUCCESS })
}

fn cmd_decode(
    encoding: &Path,
    problem: &Path,
    level: usize,
    radius: Option<usize>,
    word: &str,
) -> Result<ExitCode> {
    let prob = load_problem(problem)?.prob;
    let enc = in_file(encoding, read_encoding(&read(encoding)?))?;
    let h = canonical_level(&prob, level)?;
    let received = FieldVector::parse(word, prob.space().q())?;
    let radius = radius.unwrap_or(prob.correctable(h));
    match decode_block_within(&enc, &prob, h + 1, radius, &received)? {
        Some(b) => {
            println!("{}", prob.partitions()[h].representative(b));
            Ok(ExitCode::SUCCESS)
        }
        None => {
            println!("FAIL");
            Ok(ExitCode::from(1))
        }
    }
}

fn cmd_reproduce(budget: &SearchBudget, id: &str) -> Result<ExitCode> {
    let ids: Vec<&str> = if id == "all" { EXAMPLE_IDS.to_vec() } else { vec![id] };
    let mut ok = true;
    for (i, id) in ids.iter().enumerate() {
        let r = reproduce(id, budget)?;
        if i > 0 {
            println!();
        }
        print!("{}", r.render());
        for c in r.mismatches() {
            println!("discrepancy {}: {}: computed {} expected {}", r.id, c.quantity, c.computed, c.expected);
        }
        ok &= r.all_match();
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn run(cli: &Cli) -> Result<ExitCode> {
    if cli.jobs == 0 {
        return Err(Error::Input("--jobs must be at least 1".into()));
    }
    let budget = SearchBudget {
        node_limit: cli.budget_nodes,
        jobs: cli.jobs,
        ..SearchBudget::default()
    };
    match &cli.command {
        Command::Join { inputs } => cmd_join(cli, inputs),
        Command::Drm { problem, messages } => cmd_drm(cli, problem, messages),
        Command::Solve { drm, q } => cmd_solve(cli, &budget, drm, *q),
        Command::Construct { problem, grouped, free } => {
            cmd_construct(cli, &budget, problem, grouped.as_deref(), *free)
        }
        Command::Verify { problem, encoding } => cmd_verify(problem, encoding),
        Command::Bound { problem, kind, messages, dump } => cmd_bound(&budget, problem, *kind, messages, *dump),
        Command::Decode { encoding, problem, level, radius, word } => {
            cmd_decode(encoding, problem, *level, *radius, word)
        }
        Command::Reproduce { example } => cmd_reproduce(&budget, example),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(Error::Construction(partial)) => {
            eprintln!("error: step {} of the construction: {}", partial.level, partial.exhausted);
            println!("partial trace (steps completed before the budget ran out):");
            for s in &partial.trace.steps {
                println!("  step {} d={} r_h={}", s.level, s.distance, s.redundancy());
            }
            ExitCode::from(3)
        }
        Err(e @ Error::Budget(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
