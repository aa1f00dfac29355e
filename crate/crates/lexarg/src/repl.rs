//! Line commands for the interactive what-if loop.

use std::path::PathBuf;

use lexarg_core::explain::Bound;
use lexarg_core::rational::{parse_rational, Rational};

use crate::session::{Solved, WhatIf};

pub const HELP: &str = "\
commands:
  assume <constraint>          add an assumption, e.g. assume p(T3) >= 0.7
  retract <id>                 remove an assumption
  assumptions                  list current assumptions
  solve                        print the belief table
  explain <arg> [lower|upper] [depth]
  verdict [threshold]          classify and explain the verdict
  undo                         revert the last assume or retract
  save-session <path>          write the session log
  help | quit";

/// Output of one command. Errors are reported, never fatal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reply {
    pub text: String,
    pub error: bool,
    pub quit: bool,
}

impl Reply {
    fn ok(text: impl Into<String>) -> Self {
        Reply { text: text.into(), error: false, quit: false }
    }

    fn err(text: impl Into<String>) -> Self {
        Reply { text: text.into(), error: true, quit: false }
    }
}

pub struct Repl {
    pub session: WhatIf,
    pub threshold: Rational,
    pub exact: bool,
    /// Log entries already present in the session file.
    pub saved: usize,
    pub session_path: Option<PathBuf>,
}

impl Repl {
    pub fn new(session: WhatIf, threshold: Rational, exact: bool) -> Self {
        let saved = session.log().len();
        Repl { session, threshold, exact, saved, session_path: None }
    }

    pub fn execute(&mut self, line: &str) -> Reply {
        let line = line.trim();
        let (command, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        let reply = match command {
            "" => Reply::ok(""),
            "help" => Reply::ok(HELP),
            "quit" | "exit" => Reply { quit: true, ..Reply::ok("") },
            "assume" if rest.is_empty() => Reply::err("usage: assume <constraint>"),
            "assume" => match self.session.assume(rest) {
                Ok(id) => Reply::ok(format!("{id}: {rest}")),
                Err(e) => Reply::err(e.to_string()),
            },
            "retract" => match self.session.retract(rest) {
                Ok(()) => Reply::ok(format!("retracted {rest}")),
                Err(e) => Reply::err(e.to_string()),
            },
            "assumptions" => Reply::ok(
                self.session
                    .case()
                    .assumptions()
                    .iter()
                    .map(|a| format!("{}: {}", a.id, a.text))
                    .collect::<Vec<_>>()
                    .join("\n"),
            ),
            "undo" => {
                if self.session.undo() {
                    Reply::ok("undone")
                } else {
                    Reply::err("nothing to undo")
                }
            }
            "solve" => match self.session.solve() {
                Ok(Solved::Beliefs { table, .. }) => Reply::ok(table.render(self.exact).trim_end()),
                Ok(Solved::Conflict(c)) => Reply::err(c.describe(self.session.case())),
                Err(e) => Reply::err(e.to_string()),
            },
            "explain" => self.explain(rest),
            "verdict" => self.verdict(rest),
            "save-session" if rest.is_empty() => Reply::err("usage: save-session <path>"),
            "save-session" => match self.session.log().save(rest) {
                Ok(()) => Reply::ok(format!("saved {} log entries to {rest}", self.session.log().len())),
                Err(e) => Reply::err(e.to_string()),
            },
            other => Reply::err(format!("unknown command `{other}`; try help")),
        };
        if let Some(path) = &self.session_path {
            if let Err(e) = self.session.log().append_since(self.saved, path) {
                return Reply::err(format!("{}\ncould not append to {}: {e}", reply.text, path.display()));
            }
            self.saved = self.session.log().len();
        }
        reply
    }

    fn explain(&self, rest: &str) -> Reply {
        let mut words = rest.split_whitespace();
        let Some(argument) = words.next() else { return Reply::err("usage: explain <arg> [lower|upper] [depth]") };
        let mut bound = Bound::Lower;
        let mut depth = usize::MAX;
        for w in words {
            if let Ok(b) = w.parse::<Bound>() {
                bound = b;
            } else if let Ok(d) = w.parse::<usize>() {
                depth = d;
            } else {
                return Reply::err(format!("expected lower, upper or a depth, found `{w}`"));
            }
        }
        match self.session.explain(argument, bound, depth) {
            Ok(Ok(e)) => Reply::ok(e.narrative()),
            Ok(Err(e)) => Reply::err(e.to_string()),
            Err(e) => Reply::err(e.to_string()),
        }
    }

    fn verdict(&self, rest: &str) -> Reply {
        let threshold = if rest.is_empty() {
            self.threshold.clone()
        } else {
            match parse_rational(rest) {
                Ok(t) => t,
                Err(e) => return Reply::err(e.to_string()),
            }
        };
        match self.session.verdict(&threshold, usize::MAX) {
            Ok(Ok(v)) => Reply::ok(format!("{}\n{}", v.class.kind, v.narrative())),
            Ok(Err(e)) => Reply::err(e.to_string()),
            Err(e) => Reply::err(e.to_string()),
        }
    }
}
