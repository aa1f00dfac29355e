//! What-if sessions: an assumption stack over a base case, with an
//! append-only log that replays to the same state.

use std::io::Write as _;
use std::path::Path;

use chrono::{DateTime, Utc};
use lexarg_core::blaf::{BlafCase, CaseError};
use lexarg_core::epistemic::BeliefBounds;
use lexarg_core::explain::{explain, explain_verdict, Bound, ExplainError, VerdictExplanation};
use lexarg_core::rational::Rational;
use serde::{Deserialize, Serialize};

use crate::payload::{ConflictPayload, RationalPayload};
use crate::table::BeliefTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Assume,
    Retract,
    Solve,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogEntry {
    pub timestamp: DateTime<Utc>,
    pub action: Action,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraint: Option<String>,
    /// Belief in `Innocence` after a solve.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub innocence: Option<RationalPayload>,
    /// Set when a solve found the constraints unsatisfiable.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub conflict: bool,
}

impl LogEntry {
    fn new(action: Action) -> Self {
        LogEntry { timestamp: Utc::now(), action, id: None, constraint: None, innocence: None, conflict: false }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LogError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("log line {line}: {source}")]
    Json {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
}

/// Entries in the order they happened, stored as JSON lines.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SessionLog {
    entries: Vec<LogEntry>,
}

impl SessionLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[LogEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn push(&mut self, entry: LogEntry) {
        self.entries.push(entry);
    }

    pub fn to_jsonl(&self) -> String {
        self.entries.iter().map(|e| serde_json::to_string(e).expect("log entries always serialise") + "\n").collect()
    }

    pub fn from_jsonl(text: &str) -> Result<Self, LogError> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            entries.push(serde_json::from_str(line).map_err(|source| LogError::Json { line: i + 1, source })?);
        }
        Ok(SessionLog { entries })
    }

    /// Empty when `path` does not exist yet.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, LogError> {
        match std::fs::read_to_string(path) {
            Ok(text) => Self::from_jsonl(&text),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Self::new()),
            Err(e) => Err(e.into()),
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), LogError> {
        Ok(std::fs::write(path, self.to_jsonl())?)
    }

    /// Appends `entries[from..]` to the file at `path`.
    pub fn append_since(&self, from: usize, path: impl AsRef<Path>) -> Result<(), LogError> {
        let mut file = std::fs::OpenOptions::new().create(true).append(true).open(path)?;
        for e in &self.entries[from.min(self.entries.len())..] {
            writeln!(file, "{}", serde_json::to_string(e).expect("log entries always serialise"))?;
        }
        Ok(())
    }
}

/// Outcome of solving the current state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solved {
    Beliefs { bounds: BeliefBounds, table: BeliefTable },
    Conflict(ConflictPayload),
}

impl Solved {
    pub fn bounds(&self) -> Option<&BeliefBounds> {
        match self {
            Solved::Beliefs { bounds, .. } => Some(bounds),
            Solved::Conflict(_) => None,
        }
    }
}

pub fn solve_case(case: &BlafCase) -> Result<Solved, CaseError> {
    match case.solve() {
        Ok(bounds) => {
            let table = BeliefTable::new(case, &bounds);
            Ok(Solved::Beliefs { bounds, table })
        }
        Err(CaseError::Unsatisfiable { conflict }) => Ok(Solved::Conflict(ConflictPayload::new(&conflict))),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Step {
    Assumed(String),
    Retracted { id: String, text: String },
}

#[derive(Debug, thiserror::Error)]
pub enum ReplayError {
    #[error("log entry {entry}: {source}")]
    Case {
        entry: usize,
        #[source]
        source: CaseError,
    },
    #[error("log entry {entry}: {action:?} without {missing}")]
    Incomplete { entry: usize, action: Action, missing: &'static str },
    #[error("log entry {entry}: recorded Innocence {recorded}, replay gives {replayed}")]
    Diverged { entry: usize, recorded: String, replayed: String },
}

/// A case with a retractable assumption stack.
#[derive(Debug, Clone)]
pub struct WhatIf {
    case: BlafCase,
    undo: Vec<Step>,
    log: SessionLog,
}

impl WhatIf {
    pub fn new(case: BlafCase) -> Self {
        WhatIf { case, undo: Vec::new(), log: SessionLog::new() }
    }

    pub fn case(&self) -> &BlafCase {
        &self.case
    }

    pub fn log(&self) -> &SessionLog {
        &self.log
    }

    pub fn assume(&mut self, text: &str) -> Result<String, CaseError> {
        let id = self.case.next_assumption_id();
        self.assume_with_id(&id, text)?;
        Ok(id)
    }

    pub fn assume_with_id(&mut self, id: &str, text: &str) -> Result<(), CaseError> {
        self.case = self.case.assume_with_id(id, text)?;
        self.undo.push(Step::Assumed(id.to_string()));
        self.log.push(LogEntry { id: Some(id.into()), constraint: Some(text.into()), ..LogEntry::new(Action::Assume) });
        Ok(())
    }

    pub fn retract(&mut self, id: &str) -> Result<(), CaseError> {
        let text = self.case.assumption(id).map(|a| a.text.clone()).unwrap_or_default();
        self.case = self.case.retract(id)?;
        self.undo.push(Step::Retracted { id: id.into(), text });
        self.log.push(LogEntry { id: Some(id.into()), ..LogEntry::new(Action::Retract) });
        Ok(())
    }

    /// Reverts the last assume or retract by logging its inverse. Returns
    /// `false` when there is nothing to undo.
    pub fn undo(&mut self) -> bool {
        let Some(step) = self.undo.pop() else { return false };
        match step {
            Step::Assumed(id) => {
                self.case = self.case.retract(&id).expect("assumed ids stay present until retracted");
                self.log.push(LogEntry { id: Some(id), ..LogEntry::new(Action::Retract) });
            }
            Step::Retracted { id, text } => {
                self.case = self.case.assume_with_id(&id, &text).expect("retracted assumptions were valid");
                self.log.push(LogEntry { id: Some(id), constraint: Some(text), ..LogEntry::new(Action::Assume) });
            }
        }
        true
    }

    /// Solves and logs the resulting belief in `Innocence`.
    pub fn solve(&mut self) -> Result<Solved, CaseError> {
        let solved = solve_case(&self.case)?;
        let mut entry = LogEntry::new(Action::Solve);
        match &solved {
            Solved::Beliefs { table, .. } => {
                entry.innocence = table.rows.iter().find(|r| r.scalar).map(|r| RationalPayload::new(&r.upper));
            }
            Solved::Conflict(_) => entry.conflict = true,
        }
        self.log.push(entry);
        Ok(solved)
    }

    pub fn verdict(
        &self,
        threshold: &Rational,
        depth: usize,
    ) -> Result<Result<VerdictExplanation, ExplainError>, CaseError> {
        let bounds = self.case.solve()?;
        Ok(explain_verdict(&self.case, &bounds, threshold, depth))
    }

    pub fn explain(
        &self,
        argument: &str,
        bound: Bound,
        depth: usize,
    ) -> Result<Result<lexarg_core::explain::Explanation, ExplainError>, CaseError> {
        let bounds = self.case.solve()?;
        Ok(explain(&self.case, &bounds, argument, bound, depth))
    }

    /// Applies `log` to `base`, checking every recorded solve against a
    /// fresh one. Returns the session and the result of each solve.
    pub fn replay(base: BlafCase, log: &SessionLog) -> Result<(WhatIf, Vec<Solved>), ReplayError> {
        let mut session = WhatIf::new(base);
        let mut solves = Vec::new();
        for (i, e) in log.entries().iter().enumerate() {
            let entry = i + 1;
            let id = || e.id.clone().ok_or(ReplayError::Incomplete { entry, action: e.action, missing: "id" });
            match e.action {
                Action::Assume => {
                    let text = e.constraint.clone().ok_or(ReplayError::Incomplete {
                        entry,
                        action: e.action,
                        missing: "constraint",
                    })?;
                    session.assume_with_id(&id()?, &text).map_err(|source| ReplayError::Case { entry, source })?;
                }
                Action::Retract => session.retract(&id()?).map_err(|source| ReplayError::Case { entry, source })?,
                Action::Solve => {
                    let solved = session.solve().map_err(|source| ReplayError::Case { entry, source })?;
                    let replayed = session.log.entries.last().expect("solve just logged");
                    if replayed.innocence != e.innocence || replayed.conflict != e.conflict {
                        let show = |x: &LogEntry| match (&x.innocence, x.conflict) {
                            (_, true) => String::from("conflict"),
                            (Some(r), _) => format!("{}/{}", r.num, r.den),
                            (None, _) => String::from("none"),
                        };
                        return Err(ReplayError::Diverged { entry, recorded: show(e), replayed: show(replayed) });
                    }
                    solves.push(solved);
                }
            }
            session.log.entries.last_mut().expect("every action logs").timestamp = e.timestamp;
        }
        Ok((session, solves))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use lexarg_core::blaf::{BlafBuilder, Role, EEX};
    use lexarg_core::rational::int;

    fn case() -> BlafCase {
        BlafBuilder::legal().argument("A", Role::Evidence).edge("A", EEX, int(1)).build().unwrap()
    }

    #[test]
    fn undo_restores_and_replays() {
        let mut s = WhatIf::new(case());
        let id = s.assume("p(A) >= 0.5").unwrap();
        s.solve().unwrap();
        s.retract(&id).unwrap();
        assert!(s.undo());
        assert!(s.undo());
        assert!(!s.undo());
        assert!(s.case().assumptions().is_empty());
        s.solve().unwrap();

        let log = SessionLog::from_jsonl(&s.log().to_jsonl()).unwrap();
        assert_eq!(&log, s.log());
        let (replayed, solves) = WhatIf::replay(case(), &log).unwrap();
        assert_eq!(replayed.case(), s.case());
        assert_eq!(replayed.log(), s.log());
        assert_eq!(solves.len(), 2);
    }

    #[test]
    fn tampered_logs_are_rejected() {
        let mut s = WhatIf::new(case());
        s.assume("p(A) >= 0.5").unwrap();
        s.solve().unwrap();
        let text = s.log().to_jsonl().replace(r#""num":"1""#, r#""num":"2""#);
        let log = SessionLog::from_jsonl(&text).unwrap();
        assert!(matches!(WhatIf::replay(case(), &log), Err(ReplayError::Diverged { entry: 2, .. })));
    }
}
