//! Weighted bipolar argument graphs.
//!
//! An edge with negative weight is an attack, one with positive weight a
//! support. Zero weights carry no meaning and are rejected. Cycles, including
//! self-loops, are allowed.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_traits::{Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("invalid argument identifier `{0}` (expected letters, digits or `_`)")]
    InvalidIdentifier(String),
    #[error("unknown argument `{0}`")]
    UnknownArgument(String),
    #[error("edge {from} -> {to} has weight 0")]
    ZeroWeight { from: String, to: String },
}

/// Case-sensitive argument name made of ASCII letters, digits and `_`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArgumentId(String);

impl ArgumentId {
    pub fn new(name: impl Into<String>) -> Result<Self, GraphError> {
        let name = name.into();
        if is_identifier(&name) {
            Ok(ArgumentId(name))
        } else {
            Err(GraphError::InvalidIdentifier(name))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

pub(crate) fn is_identifier(name: &str) -> bool {
    !name.is_empty() && name.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

impl fmt::Display for ArgumentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl core::str::FromStr for ArgumentId {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ArgumentId::new(s)
    }
}

impl AsRef<str> for ArgumentId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl core::borrow::Borrow<str> for ArgumentId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub source: ArgumentId,
    pub target: ArgumentId,
    pub weight: Rational,
}

impl Edge {
    pub fn is_attack(&self) -> bool {
        self.weight.is_negative()
    }

    pub fn is_support(&self) -> bool {
        self.weight.is_positive()
    }
}

/// Arguments in insertion order plus at most one weighted edge per ordered pair.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ArgGraph {
    arguments: Vec<ArgumentId>,
    index: BTreeMap<ArgumentId, usize>,
    edges: Vec<Edge>,
    edge_index: BTreeMap<(usize, usize), usize>,
    incoming: Vec<Vec<usize>>,
    outgoing: Vec<Vec<usize>>,
}

impl ArgGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `name` unless it is already present; returns its position.
    pub fn add_argument(&mut self, name: &str) -> Result<usize, GraphError> {
        if let Some(&i) = self.index.get(name) {
            return Ok(i);
        }
        let id = ArgumentId::new(name)?;
        let i = self.arguments.len();
        self.index.insert(id.clone(), i);
        self.arguments.push(id);
        self.incoming.push(Vec::new());
        self.outgoing.push(Vec::new());
        Ok(i)
    }

    /// Records `source -> target`. A second edge on the same ordered pair
    /// replaces the first; the replaced weight is returned.
    pub fn add_edge(&mut self, source: &str, target: &str, weight: Rational) -> Result<Option<Rational>, GraphError> {
        let s = self.position(source)?;
        let t = self.position(target)?;
        if weight.is_zero() {
            return Err(GraphError::ZeroWeight { from: source.to_string(), to: target.to_string() });
        }
        if let Some(&e) = self.edge_index.get(&(s, t)) {
            let old = core::mem::replace(&mut self.edges[e].weight, weight);
            return Ok(Some(old));
        }
        let e = self.edges.len();
        self.edges.push(Edge { source: self.arguments[s].clone(), target: self.arguments[t].clone(), weight });
        self.edge_index.insert((s, t), e);
        self.incoming[t].push(e);
        self.outgoing[s].push(e);
        Ok(None)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn position(&self, name: &str) -> Result<usize, GraphError> {
        self.index.get(name).copied().ok_or_else(|| GraphError::UnknownArgument(name.to_string()))
    }

    pub fn arguments(&self) -> &[ArgumentId] {
        &self.arguments
    }

    pub fn argument(&self, position: usize) -> &ArgumentId {
        &self.arguments[position]
    }

    pub fn len(&self) -> usize {
        self.arguments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arguments.is_empty()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, source: &str, target: &str) -> Option<&Edge> {
        let s = *self.index.get(source)?;
        let t = *self.index.get(target)?;
        self.edge_index.get(&(s, t)).map(|&e| &self.edges[e])
    }

    pub fn weight(&self, source: &str, target: &str) -> Option<&Rational> {
        self.edge(source, target).map(|e| &e.weight)
    }

    /// All edges ending in `name`, in insertion order.
    pub fn incoming(&self, name: &str) -> Result<impl Iterator<Item = &Edge>, GraphError> {
        let t = self.position(name)?;
        Ok(self.incoming[t].iter().map(move |&e| &self.edges[e]))
    }

    pub fn outgoing(&self, name: &str) -> Result<impl Iterator<Item = &Edge>, GraphError> {
        let s = self.position(name)?;
        Ok(self.outgoing[s].iter().map(move |&e| &self.edges[e]))
    }

    /// In-neighbours with negative weight.
    pub fn attackers(&self, name: &str) -> Result<Vec<(ArgumentId, Rational)>, GraphError> {
        Ok(self.incoming(name)?.filter(|e| e.is_attack()).map(|e| (e.source.clone(), e.weight.clone())).collect())
    }

    /// In-neighbours with positive weight.
    pub fn supporters(&self, name: &str) -> Result<Vec<(ArgumentId, Rational)>, GraphError> {
        Ok(self.incoming(name)?.filter(|e| e.is_support()).map(|e| (e.source.clone(), e.weight.clone())).collect())
    }
}
