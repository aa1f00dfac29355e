//! In-memory session store behind the HTTP API.
//!
//! A session is a base document plus an ordered assumption stack. Every
//! change re-solves; an unsatisfiable state is kept and flagged, and its
//! beliefs are withheld until an assumption is retracted.

use std::collections::BTreeMap;
use std::sync::{Arc, RwLock};

use lexarg_core::blaf::CaseError;
use lexarg_core::explain::{explain, explain_verdict, Bound, ExplainError};
use lexarg_core::rational::{parse_rational, Rational};
use serde::{Deserialize, Serialize};
use uuid::Uuid;

use crate::bundled::bundled;
use crate::case_file::{parse_case, CaseDocument, CaseFileError, Location};
use crate::payload::{
    AssumptionPayload, BeliefsPayload, ConflictPayload, ExplanationPayload, RationalPayload, VerdictPayload,
};
use crate::session::{LogEntry, Solved, WhatIf};

/// Where a case document comes from; exactly one field is set.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseSource {
    /// Case file text.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case: Option<String>,
    /// Name of a bundled case.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bundled: Option<String>,
    /// The document itself, in its JSON form.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub document: Option<CaseDocument>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub kind: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
}

impl Diagnostic {
    fn new(kind: &str, message: impl ToString, location: Option<Location>) -> Self {
        Diagnostic {
            kind: kind.into(),
            message: message.to_string(),
            line: location.map(|l| l.line),
            column: location.map(|l| l.column),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error("no session {0}")]
    UnknownSession(String),
    #[error("{0}")]
    BadRequest(String),
    #[error(transparent)]
    CaseFile(#[from] CaseFileError),
    #[error(transparent)]
    Case(#[from] CaseError),
    #[error(transparent)]
    Explain(#[from] ExplainError),
    #[error("{}", .0.message)]
    Conflict(ConflictPayload),
}

impl ServiceError {
    pub fn diagnostic(&self) -> Diagnostic {
        match self {
            ServiceError::UnknownSession(_) => Diagnostic::new("not-found", self, None),
            ServiceError::BadRequest(_) => Diagnostic::new("bad-request", self, None),
            ServiceError::CaseFile(e) if e.is_parse_error() => Diagnostic::new("parse", e, e.location()),
            ServiceError::CaseFile(e) => Diagnostic::new("validation", e, e.location()),
            ServiceError::Case(CaseError::Parse(p)) => {
                Diagnostic::new("parse", &p.message, Some(Location { line: p.line, column: p.column }))
            }
            ServiceError::Case(CaseError::UnknownAssumption(_)) => Diagnostic::new("not-found", self, None),
            ServiceError::Case(_) => Diagnostic::new("validation", self, None),
            ServiceError::Explain(ExplainError::Graph(_)) => Diagnostic::new("not-found", self, None),
            ServiceError::Explain(_) => Diagnostic::new("bad-request", self, None),
            ServiceError::Conflict(_) => Diagnostic::new("conflict", self, None),
        }
    }
}

pub fn resolve(source: &CaseSource) -> Result<CaseDocument, ServiceError> {
    match (&source.case, &source.bundled, &source.document) {
        (Some(text), None, None) => Ok(parse_case(text)?.0),
        (None, Some(name), None) => {
            let text = bundled(name).ok_or_else(|| ServiceError::BadRequest(format!("no bundled case `{name}`")))?;
            Ok(parse_case(text)?.0)
        }
        (None, None, Some(doc)) => {
            doc.build()?;
            Ok(doc.clone())
        }
        _ => Err(ServiceError::BadRequest("give exactly one of `case`, `bundled` or `document`".into())),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub arguments: usize,
    pub edges: usize,
    pub constraints: usize,
    pub warnings: Vec<String>,
    pub errors: Vec<Diagnostic>,
}

pub fn validate(source: &CaseSource) -> ValidationReport {
    let built = resolve(source).and_then(|doc| Ok(doc.build()?));
    match built {
        Ok(loaded) => ValidationReport {
            valid: true,
            arguments: loaded.case.graph().len(),
            edges: loaded.case.graph().edges().len(),
            constraints: loaded.case.constraints().len(),
            warnings: loaded.case.warnings().to_vec(),
            errors: Vec::new(),
        },
        Err(e) => ValidationReport {
            valid: false,
            arguments: 0,
            edges: 0,
            constraints: 0,
            warnings: Vec::new(),
            errors: vec![e.diagnostic()],
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Conflict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionPayload {
    pub id: String,
    pub name: Option<String>,
    /// The base document, without the session's assumptions.
    pub document: CaseDocument,
    pub threshold: RationalPayload,
    pub assumptions: Vec<AssumptionPayload>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conflict: Option<ConflictPayload>,
}

/// State after a change: beliefs when satisfiable, the conflict otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatePayload {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assumption: Option<AssumptionPayload>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beliefs: Option<BeliefsPayload>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conflict: Option<ConflictPayload>,
}

pub struct Session {
    id: Uuid,
    document: CaseDocument,
    threshold: Rational,
    whatif: WhatIf,
    solved: Solved,
}

impl Session {
    fn new(document: CaseDocument) -> Result<Self, ServiceError> {
        let loaded = document.build_base()?;
        let mut whatif = WhatIf::new(loaded.case);
        for a in &document.assumptions {
            whatif.assume_with_id(&a.id, &a.constraint)?;
        }
        let solved = whatif.solve()?;
        let document = CaseDocument { assumptions: Vec::new(), ..document };
        Ok(Session { id: Uuid::new_v4(), document, threshold: loaded.threshold, whatif, solved })
    }

    fn resolve(&mut self) -> Result<(), ServiceError> {
        self.solved = self.whatif.solve()?;
        Ok(())
    }

    fn conflict(&self) -> Option<&ConflictPayload> {
        match &self.solved {
            Solved::Conflict(c) => Some(c),
            Solved::Beliefs { .. } => None,
        }
    }

    fn state(&self, assumption: Option<AssumptionPayload>) -> StatePayload {
        match &self.solved {
            Solved::Beliefs { table, .. } => StatePayload {
                assumption,
                status: Status::Ok,
                beliefs: Some(BeliefsPayload::new(table)),
                conflict: None,
            },
            Solved::Conflict(c) => {
                StatePayload { assumption, status: Status::Conflict, beliefs: None, conflict: Some(c.clone()) }
            }
        }
    }

    fn payload(&self) -> SessionPayload {
        SessionPayload {
            id: self.id.to_string(),
            name: self.document.name.clone(),
            document: self.document.clone(),
            threshold: RationalPayload::new(&self.threshold),
            assumptions: self.whatif.case().assumptions().iter().map(AssumptionPayload::new).collect(),
            status: if self.conflict().is_some() { Status::Conflict } else { Status::Ok },
            conflict: self.conflict().cloned(),
        }
    }

    fn bounds(&self) -> Result<&lexarg_core::epistemic::BeliefBounds, ServiceError> {
        match &self.solved {
            Solved::Beliefs { bounds, .. } => Ok(bounds),
            Solved::Conflict(c) => Err(ServiceError::Conflict(c.clone())),
        }
    }
}

/// Sessions keyed by id, each behind its own lock.
#[derive(Default)]
pub struct SessionStore {
    sessions: RwLock<BTreeMap<Uuid, Arc<RwLock<Session>>>>,
}

impl SessionStore {
    pub fn new() -> Self {
        Self::default()
    }

    fn session(&self, id: &str) -> Result<Arc<RwLock<Session>>, ServiceError> {
        let key = Uuid::parse_str(id).map_err(|_| ServiceError::UnknownSession(id.into()))?;
        self.sessions
            .read()
            .expect("store lock")
            .get(&key)
            .cloned()
            .ok_or_else(|| ServiceError::UnknownSession(id.into()))
    }

    fn read<T>(&self, id: &str, f: impl FnOnce(&Session) -> Result<T, ServiceError>) -> Result<T, ServiceError> {
        let s = self.session(id)?;
        let guard = s.read().expect("session lock");
        f(&guard)
    }

    fn write<T>(&self, id: &str, f: impl FnOnce(&mut Session) -> Result<T, ServiceError>) -> Result<T, ServiceError> {
        let s = self.session(id)?;
        let mut guard = s.write().expect("session lock");
        f(&mut guard)
    }

    pub fn create(&self, source: &CaseSource) -> Result<SessionPayload, ServiceError> {
        let session = Session::new(resolve(source)?)?;
        let payload = session.payload();
        self.sessions.write().expect("store lock").insert(session.id, Arc::new(RwLock::new(session)));
        Ok(payload)
    }

    pub fn ids(&self) -> Vec<String> {
        self.sessions.read().expect("store lock").keys().map(Uuid::to_string).collect()
    }

    pub fn get(&self, id: &str) -> Result<SessionPayload, ServiceError> {
        self.read(id, |s| Ok(s.payload()))
    }

    pub fn delete(&self, id: &str) -> Result<(), ServiceError> {
        let key = Uuid::parse_str(id).map_err(|_| ServiceError::UnknownSession(id.into()))?;
        self.sessions
            .write()
            .expect("store lock")
            .remove(&key)
            .map(|_| ())
            .ok_or_else(|| ServiceError::UnknownSession(id.into()))
    }

    pub fn assumptions(&self, id: &str) -> Result<Vec<AssumptionPayload>, ServiceError> {
        self.read(id, |s| Ok(s.whatif.case().assumptions().iter().map(AssumptionPayload::new).collect()))
    }

    /// Adds an assumption under `assumption_id`, or a fresh id.
    pub fn assume(&self, id: &str, text: &str, assumption_id: Option<&str>) -> Result<StatePayload, ServiceError> {
        self.write(id, |s| {
            let aid = match assumption_id {
                Some(a) => {
                    s.whatif.assume_with_id(a, text)?;
                    a.to_string()
                }
                None => s.whatif.assume(text)?,
            };
            s.resolve()?;
            let added = s.whatif.case().assumption(&aid).map(AssumptionPayload::new);
            Ok(s.state(added))
        })
    }

    pub fn retract(&self, id: &str, assumption_id: &str) -> Result<StatePayload, ServiceError> {
        self.write(id, |s| {
            s.whatif.retract(assumption_id)?;
            s.resolve()?;
            Ok(s.state(None))
        })
    }

    pub fn beliefs(&self, id: &str) -> Result<BeliefsPayload, ServiceError> {
        self.read(id, |s| match &s.solved {
            Solved::Beliefs { table, .. } => Ok(BeliefsPayload::new(table)),
            Solved::Conflict(c) => Err(ServiceError::Conflict(c.clone())),
        })
    }

    pub fn verdict(&self, id: &str, threshold: Option<&str>, depth: usize) -> Result<VerdictPayload, ServiceError> {
        self.read(id, |s| {
            let threshold = match threshold {
                Some(t) => parse_rational(t).map_err(|e| ServiceError::BadRequest(format!("threshold: {e}")))?,
                None => s.threshold.clone(),
            };
            let v = explain_verdict(s.whatif.case(), s.bounds()?, &threshold, depth)?;
            Ok(VerdictPayload::new(&v))
        })
    }

    pub fn explanation(
        &self,
        id: &str,
        argument: &str,
        bound: Bound,
        depth: usize,
    ) -> Result<ExplanationPayload, ServiceError> {
        self.read(id, |s| {
            let e = explain(s.whatif.case(), s.bounds()?, argument, bound, depth)?;
            Ok(ExplanationPayload::new(&e))
        })
    }

    pub fn log(&self, id: &str) -> Result<Vec<LogEntry>, ServiceError> {
        self.read(id, |s| Ok(s.whatif.log().entries().to_vec()))
    }
}
