//! TOML case documents.
//!
//! ```toml
//! schema = 1
//! name = "example1"
//!
//! [options]
//! threshold = "3/4"
//! oracle = false
//!
//! [[argument]]
//! id = "T1"
//! tag = "sub-hypothesis"
//! label = "plaintiff noted the registration number"
//!
//! [[edge]]
//! from = "T1"
//! to = "Einc"
//! weight = "0.9"
//!
//! [[collective]]
//! target = "Camera"
//! members = ["Camera1", "Camera2"]
//!
//! [[assumption]]
//! id = "a1"
//! constraint = "p(T3) >= 0.7"
//! ```
//!
//! Weights and thresholds are strings holding exact rationals (`"9/10"`) or
//! decimals (`"0.9"`); plain integers are accepted too.

use std::fmt;
use std::path::{Path, PathBuf};

use lexarg_core::blaf::{Assumption, BlafBuilder, BlafCase, CaseError, Framework, Role, SchemeError};
use lexarg_core::constraint::ConstraintError;
use lexarg_core::explain::default_threshold;
use lexarg_core::graph::GraphError;
use lexarg_core::rational::{parse_rational, ratio, Rational};
use serde::{Deserialize, Deserializer, Serialize};
use toml::de::{DeTable, DeValue};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseDocument {
    pub schema: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Options::is_default")]
    pub options: Options,
    #[serde(default, rename = "argument", skip_serializing_if = "Vec::is_empty")]
    pub arguments: Vec<ArgumentDecl>,
    #[serde(default, rename = "edge", skip_serializing_if = "Vec::is_empty")]
    pub edges: Vec<EdgeDecl>,
    #[serde(default, rename = "collective", skip_serializing_if = "Vec::is_empty")]
    pub collectives: Vec<CollectiveDecl>,
    #[serde(default, rename = "assumption", skip_serializing_if = "Vec::is_empty")]
    pub assumptions: Vec<AssumptionDecl>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub oracle: bool,
    #[serde(default, skip_serializing_if = "FrameworkKind::is_legal")]
    pub framework: FrameworkKind,
}

impl Options {
    fn is_default(&self) -> bool {
        *self == Options::default()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameworkKind {
    #[default]
    Legal,
    Plain,
}

impl FrameworkKind {
    fn is_legal(&self) -> bool {
        *self == FrameworkKind::Legal
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArgumentDecl {
    pub id: String,
    pub tag: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDecl {
    pub from: String,
    pub to: String,
    #[serde(deserialize_with = "rational_text")]
    pub weight: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollectiveDecl {
    pub target: String,
    pub members: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssumptionDecl {
    pub id: String,
    pub constraint: String,
}

fn rational_text<'de, D: Deserializer<'de>>(d: D) -> Result<String, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Text {
        Int(i64),
        Str(String),
    }
    match Text::deserialize(d) {
        Ok(Text::Int(n)) => Ok(n.to_string()),
        Ok(Text::Str(s)) => Ok(s),
        Err(_) => Err(serde::de::Error::custom("expected a string such as \"9/10\" or \"0.9\", or an integer")),
    }
}

/// 1-based position in a case file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

/// Where in a document a problem sits, such as `edge[2].weight`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Field {
    pub section: &'static str,
    pub index: Option<usize>,
    pub key: Option<&'static str>,
}

impl Field {
    fn at(section: &'static str, index: usize, key: &'static str) -> Self {
        Field { section, index: Some(index), key: Some(key) }
    }

    fn section(section: &'static str) -> Self {
        Field { section, index: None, key: None }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.section)?;
        if let Some(i) = self.index {
            write!(f, "[{i}]")?;
        }
        if let Some(k) = self.key {
            write!(f, ".{k}")?;
        }
        Ok(())
    }
}

fn at(location: &Option<Location>) -> String {
    location.map(|l| format!("{}:{}: ", l.line, l.column)).unwrap_or_default()
}

#[derive(Debug, thiserror::Error)]
pub enum CaseFileError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}{message}", at(location))]
    Syntax { location: Option<Location>, message: String },
    #[error("unsupported schema version {found}, expected {SCHEMA_VERSION}")]
    Schema { found: u32 },
    #[error("{}{field}: {message}", at(location))]
    Invalid { location: Option<Location>, field: Field, message: String },
    #[error("{}{field}: {message}", at(location))]
    Assumption { location: Option<Location>, field: Field, message: String },
}

impl CaseFileError {
    /// Syntax, schema and constraint-text errors, as opposed to a well-formed
    /// document describing an invalid case.
    pub fn is_parse_error(&self) -> bool {
        matches!(self, CaseFileError::Syntax { .. } | CaseFileError::Schema { .. } | CaseFileError::Assumption { .. })
    }

    pub fn location(&self) -> Option<Location> {
        match self {
            CaseFileError::Syntax { location, .. }
            | CaseFileError::Invalid { location, .. }
            | CaseFileError::Assumption { location, .. } => *location,
            _ => None,
        }
    }

    fn invalid(field: Field, message: impl ToString) -> Self {
        CaseFileError::Invalid { location: None, field, message: message.to_string() }
    }

    /// Fills in the position of the offending field within `text`.
    fn locate(self, text: &str) -> Self {
        match self {
            CaseFileError::Invalid { location: None, field, message } => {
                CaseFileError::Invalid { location: locate(text, &field, 0), field, message }
            }
            CaseFileError::Assumption { location: None, field, message } => {
                let column = message.split(':').nth(1).and_then(|c| c.parse::<usize>().ok()).unwrap_or(0);
                CaseFileError::Assumption { location: locate(text, &field, column), field, message }
            }
            other => other,
        }
    }
}

fn position(text: &str, offset: usize) -> Location {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    Location { line, column }
}

/// Start of `field` in `text`. `shift` moves right within a string value,
/// past its opening quote, to point into constraint text.
fn locate(text: &str, field: &Field, shift: usize) -> Option<Location> {
    let root = DeTable::parse(text).ok()?;
    fn find<'i>(t: &DeTable<'i>, key: &str) -> Option<toml::Spanned<DeValue<'i>>> {
        t.iter().find(|(k, _)| k.get_ref().as_ref() == key).map(|(_, v)| v.clone())
    }
    let section = find(root.get_ref(), field.section)?;
    let mut span = section.span();
    let mut value = section.into_inner();
    if let (Some(i), DeValue::Array(items)) = (field.index, &value) {
        let item = items.get(i)?.clone();
        span = item.span();
        value = item.into_inner();
    }
    let mut shifted = 0;
    if let (Some(key), DeValue::Table(t)) = (field.key, &value) {
        if let Some(v) = find(t, key) {
            span = v.span();
            if shift > 0 && matches!(v.get_ref(), DeValue::String(_)) {
                shifted = shift;
            }
        }
    }
    Some(position(text, span.start + shifted))
}

/// A document turned into a case, with its options resolved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadedCase {
    pub case: BlafCase,
    pub threshold: Rational,
    pub oracle: bool,
}

impl CaseDocument {
    pub fn new() -> Self {
        CaseDocument {
            schema: SCHEMA_VERSION,
            name: None,
            options: Options::default(),
            arguments: Vec::new(),
            edges: Vec::new(),
            collectives: Vec::new(),
            assumptions: Vec::new(),
        }
    }

    /// Parses TOML without building the case.
    pub fn from_toml(text: &str) -> Result<Self, CaseFileError> {
        let doc: CaseDocument = toml::from_str(text).map_err(|e| CaseFileError::Syntax {
            location: e.span().map(|s| position(text, s.start)),
            message: e.message().trim().to_string(),
        })?;
        if doc.schema != SCHEMA_VERSION {
            return Err(CaseFileError::Schema { found: doc.schema });
        }
        Ok(doc)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("case documents always serialise")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, CaseFileError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| CaseFileError::Io { path: path.into(), source })?;
        Self::from_toml(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), CaseFileError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_toml()).map_err(|source| CaseFileError::Io { path: path.into(), source })
    }

    /// The same document with its assumptions replaced by those of `case`.
    pub fn with_assumptions(&self, assumptions: &[Assumption]) -> Self {
        let mut doc = self.clone();
        doc.assumptions =
            assumptions.iter().map(|a| AssumptionDecl { id: a.id.clone(), constraint: a.text.clone() }).collect();
        doc
    }

    /// The case without the document's assumptions.
    pub fn build_base(&self) -> Result<LoadedCase, CaseFileError> {
        if self.schema != SCHEMA_VERSION {
            return Err(CaseFileError::Schema { found: self.schema });
        }
        let threshold = match &self.options.threshold {
            None => default_threshold(),
            Some(t) => {
                let field = Field { section: "options", index: None, key: Some("threshold") };
                let t = parse_rational(t).map_err(|e| CaseFileError::invalid(field.clone(), e))?;
                if t <= ratio(1, 2) || t >= ratio(1, 1) {
                    return Err(CaseFileError::invalid(field, "threshold must lie strictly between 1/2 and 1"));
                }
                t
            }
        };
        let mut b = BlafBuilder::new(match self.options.framework {
            FrameworkKind::Legal => Framework::Legal,
            FrameworkKind::Plain => Framework::Plain,
        });
        for (i, a) in self.arguments.iter().enumerate() {
            let role: Role = a.tag.parse().map_err(|e| CaseFileError::invalid(Field::at("argument", i, "tag"), e))?;
            b = b.argument(a.id.clone(), role);
        }
        for (i, e) in self.edges.iter().enumerate() {
            let w =
                parse_rational(&e.weight).map_err(|err| CaseFileError::invalid(Field::at("edge", i, "weight"), err))?;
            b = b.edge(e.from.clone(), e.to.clone(), w);
        }
        for g in &self.collectives {
            b = b.collective(g.target.clone(), g.members.iter().cloned());
        }
        let case = b.build().map_err(|e| self.scheme_error(e))?;
        Ok(LoadedCase { case, threshold, oracle: self.options.oracle })
    }

    /// The case with every assumption of the document applied in order.
    pub fn build(&self) -> Result<LoadedCase, CaseFileError> {
        let mut loaded = self.build_base()?;
        for (i, a) in self.assumptions.iter().enumerate() {
            loaded.case = loaded.case.assume_with_id(&a.id, &a.constraint).map_err(|e| match e {
                CaseError::Parse(p) => CaseFileError::Assumption {
                    location: None,
                    field: Field::at("assumption", i, "constraint"),
                    message: p.to_string(),
                },
                CaseError::DuplicateAssumption(_) => CaseFileError::invalid(Field::at("assumption", i, "id"), e),
                other => CaseFileError::invalid(Field::at("assumption", i, "constraint"), other),
            })?;
        }
        Ok(loaded)
    }

    fn edge_field(&self, from: &str, to: &str, key: &'static str) -> Field {
        self.edges
            .iter()
            .position(|e| e.from == from && e.to == to)
            .map_or(Field::section("edge"), |i| Field::at("edge", i, key))
    }

    fn argument_field(&self, name: &str, key: &'static str) -> Field {
        self.arguments
            .iter()
            .position(|a| a.id == name)
            .map_or(Field::section("argument"), |i| Field::at("argument", i, key))
    }

    fn collective_field(&self, target: &str) -> Field {
        self.collectives
            .iter()
            .position(|g| g.target == target)
            .map_or(Field::section("collective"), |i| Field::at("collective", i, "members"))
    }

    fn scheme_error(&self, e: SchemeError) -> CaseFileError {
        let field = match &e {
            SchemeError::Graph(GraphError::InvalidIdentifier(name))
            | SchemeError::Graph(GraphError::UnknownArgument(name)) => {
                if self.arguments.iter().any(|a| &a.id == name) {
                    self.argument_field(name, "id")
                } else if let Some(i) = self.edges.iter().position(|x| &x.from == name || &x.to == name) {
                    Field::at("edge", i, if &self.edges[i].from == name { "from" } else { "to" })
                } else {
                    Field::section("collective")
                }
            }
            SchemeError::Graph(GraphError::ZeroWeight { from, to }) => self.edge_field(from, to, "weight"),
            SchemeError::ConflictingRole { argument } => self.argument_field(argument, "tag"),
            SchemeError::MetaNameWithoutMetaRole { argument, .. } | SchemeError::UnknownMeta { argument } => {
                self.argument_field(argument, "tag")
            }
            SchemeError::MetaEdgeWeight { from, to, .. } | SchemeError::WeightAboveOne { from, to, .. } => {
                self.edge_field(from, to, "weight")
            }
            SchemeError::EdgeIntoInnocence { from, to }
            | SchemeError::EdgeFromMeta { from, to }
            | SchemeError::AttackIntoEvidenceHypothesis { from, to } => self.edge_field(from, to, "to"),
            SchemeError::MissingGroupEdge { target, .. } | SchemeError::EdgeInSeveralGroups { target, .. } => {
                self.collective_field(target)
            }
            SchemeError::Constraint(c) => match c {
                ConstraintError::NotAttack { from, to } | ConstraintError::NotSupport { from, to } => {
                    self.edge_field(from, to, "weight")
                }
                ConstraintError::EmptyGroup { target }
                | ConstraintError::NonPositiveWeight { target, .. }
                | ConstraintError::WeightSumExceedsOne { target, .. } => self.collective_field(target),
            },
        };
        CaseFileError::invalid(field, e)
    }
}

impl Default for CaseDocument {
    fn default() -> Self {
        Self::new()
    }
}

/// Parses and builds `text`, reporting problems with their file position.
pub fn parse_case(text: &str) -> Result<(CaseDocument, LoadedCase), CaseFileError> {
    let doc = CaseDocument::from_toml(text)?;
    let loaded = doc.build().map_err(|e| e.locate(text))?;
    Ok((doc, loaded))
}

pub fn load_case(path: impl AsRef<Path>) -> Result<(CaseDocument, LoadedCase), CaseFileError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| CaseFileError::Io { path: path.into(), source })?;
    parse_case(&text)
}
