use std::io::{BufRead, IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lexarg::bundled::bundled;
use lexarg::case_file::{load_case, parse_case, CaseDocument, CaseFileError, LoadedCase};
use lexarg::check::check;
use lexarg::repl::{Repl, HELP};
use lexarg::session::{SessionLog, Solved, WhatIf};
use lexarg_core::blaf::CaseError;
use lexarg_core::explain::{explain, explain_verdict, Bound};
use lexarg_core::rational::{parse_rational, Rational};

const EXIT_FAILURE: u8 = 1;
const EXIT_PARSE: u8 = 3;
const EXIT_VALIDATION: u8 = 4;
const EXIT_UNSATISFIABLE: u8 = 5;
const EXIT_CHECK_FAILED: u8 = 6;

/// Exact belief bounds, verdicts and explanations for legal argument graphs.
///
/// Exit codes: 0 success, 1 other failure, 2 usage, 3 parse error,
/// 4 validation error, 5 unsatisfiable, 6 failed check.
#[derive(Parser)]
#[command(name = "lexarg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CaseArgs {
    /// Case file, or the name of a bundled case (three_node, example1,
    /// example2, camera).
    #[arg(long)]
    case: String,
    /// Extra assumption in constraint syntax; repeatable.
    #[arg(long = "assume", value_name = "CONSTRAINT")]
    assume: Vec<String>,
    /// Verdict threshold, strictly between 1/2 and 1.
    #[arg(long)]
    threshold: Option<String>,
    /// Session log (JSON lines) replayed over the case before anything else.
    #[arg(long)]
    session: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check that the case file describes a valid case.
    Validate {
        #[command(flatten)]
        case: CaseArgs,
    },
    /// Print the belief table.
    Solve {
        #[command(flatten)]
        case: CaseArgs,
        /// Exact rationals instead of two-digit decimals.
        #[arg(long)]
        exact: bool,
    },
    /// Interactive loop: assume, retract, solve, explain, verdict, undo.
    Whatif {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long)]
        exact: bool,
    },
    /// Validation, scheme inequalities and, with --oracle, agreement with
    /// the possible-world LP. Prints a JSON report.
    Check {
        #[command(flatten)]
        case: CaseArgs,
        #[arg(long)]
        oracle: bool,
    },
    /// Explain a bound of one argument, or the verdict when none is given.
    Explain {
        #[command(flatten)]
        case: CaseArgs,
        argument: Option<String>,
        #[arg(long, default_value = "lower")]
        bound: String,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: String,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl ToString) -> Self {
        Failure { code, message: message.to_string() }
    }
}

impl From<CaseFileError> for Failure {
    fn from(e: CaseFileError) -> Self {
        let code = match &e {
            CaseFileError::Io { .. } => EXIT_FAILURE,
            e if e.is_parse_error() => EXIT_PARSE,
            _ => EXIT_VALIDATION,
        };
        Failure::new(code, e)
    }
}

impl From<CaseError> for Failure {
    fn from(e: CaseError) -> Self {
        let code = match &e {
            CaseError::Parse(_) => EXIT_PARSE,
            CaseError::Unsatisfiable { .. } => EXIT_UNSATISFIABLE,
            _ => EXIT_VALIDATION,
        };
        Failure::new(code, e)
    }
}

fn read_case(name: &str) -> Result<(CaseDocument, LoadedCase), Failure> {
    if !Path::new(name).exists() {
        if let Some(text) = bundled(name) {
            return Ok(parse_case(text)?);
        }
    }
    Ok(load_case(name)?)
}

/// The session described by the flags: the base case, then either the
/// replayed log or the document's own assumptions, then `--assume`.
fn open(args: &CaseArgs) -> Result<(WhatIf, Rational), Failure> {
    let (doc, _) = read_case(&args.case)?;
    let loaded = doc.build_base()?;
    let threshold = match &args.threshold {
        Some(t) => parse_rational(t).map_err(|e| Failure::new(EXIT_VALIDATION, format!("--threshold: {e}")))?,
        None => loaded.threshold.clone(),
    };
    let log = match &args.session {
        Some(path) => {
            SessionLog::load(path).map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))?
        }
        None => SessionLog::new(),
    };
    let mut session = if log.is_empty() {
        let mut s = WhatIf::new(loaded.case);
        for a in &doc.assumptions {
            s.assume_with_id(&a.id, &a.constraint)?;
        }
        s
    } else {
        WhatIf::replay(loaded.case, &log).map_err(|e| Failure::new(EXIT_VALIDATION, e))?.0
    };
    for text in &args.assume {
        session.assume(text)?;
    }
    Ok((session, threshold))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate { case } => {
            let (session, _) = open(&case)?;
            let c = session.case();
            for w in c.warnings() {
                println!("warning: {w}");
            }
            println!(
                "valid: {} arguments, {} edges, {} constraints",
                c.graph().len(),
                c.graph().edges().len(),
                c.constraints().len()
            );
            Ok(())
        }
        Command::Solve { case, exact } => {
            let (mut session, _) = open(&case)?;
            let solved = session.solve()?;
            if let Some(path) = &case.session {
                let before = SessionLog::load(path).map(|l| l.len()).unwrap_or(0);
                session.log().append_since(before, path).map_err(|e| Failure::new(EXIT_FAILURE, e))?;
            }
            match solved {
                Solved::Beliefs { table, .. } => {
                    print!("{}", table.render(exact));
                    Ok(())
                }
                Solved::Conflict(c) => Err(Failure::new(EXIT_UNSATISFIABLE, c.describe(session.case()))),
            }
        }
        Command::Whatif { case, exact } => {
            let (session, threshold) = open(&case)?;
            let mut repl = Repl::new(session, threshold, exact);
            if let Some(path) = &case.session {
                repl.saved = SessionLog::load(path).map(|l| l.len()).unwrap_or(0);
                repl.session_path = Some(path.clone());
            }
            let interactive = std::io::stdin().is_terminal();
            if interactive {
                println!("{HELP}");
            }
            let stdin = std::io::stdin();
            let mut lines = stdin.lock().lines();
            loop {
                if interactive {
                    print!("> ");
                    std::io::stdout().flush().ok();
                }
                let Some(Ok(line)) = lines.next() else { break };
                let reply = repl.execute(&line);
                if reply.error {
                    eprintln!("error: {}", reply.text);
                } else if !reply.text.is_empty() {
                    println!("{}", reply.text);
                }
                if reply.quit {
                    break;
                }
            }
            Ok(())
        }
        Command::Check { case, oracle } => {
            let (doc, _) = read_case(&case.case)?;
            let (session, _) = open(&case)?;
            let report = check(session.case(), oracle || doc.options.oracle)?;
            println!("{}", serde_json::to_string_pretty(&report).expect("reports serialise"));
            for f in report.failures() {
                eprintln!("{f}");
            }
            if report.passed {
                Ok(())
            } else {
                Err(Failure::new(EXIT_CHECK_FAILED, "check failed"))
            }
        }
        Command::Explain { case, argument, bound, depth } => {
            let (session, threshold) = open(&case)?;
            let c = session.case();
            let bounds = c.solve()?;
            let depth = depth.unwrap_or(usize::MAX);
            let text = match argument {
                Some(arg) => {
                    let bound: Bound = bound.parse().map_err(|e| Failure::new(EXIT_VALIDATION, e))?;
                    explain(c, &bounds, &arg, bound, depth).map_err(|e| Failure::new(EXIT_VALIDATION, e))?.narrative()
                }
                None => {
                    let v =
                        explain_verdict(c, &bounds, &threshold, depth).map_err(|e| Failure::new(EXIT_VALIDATION, e))?;
                    format!("{}\n{}", v.class.kind, v.narrative())
                }
            };
            println!("{text}");
            Ok(())
        }
        Command::Serve { addr } => {
            let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::new(EXIT_FAILURE, e))?;
            eprintln!("listening on http://{addr}");
            runtime.block_on(lexarg::http::serve(&addr)).map_err(|e| Failure::new(EXIT_FAILURE, e))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
