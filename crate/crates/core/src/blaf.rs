//! Legal argumentation frameworks built on top of the constraint engine.
//!
//! A legal case has three fixed meta-hypotheses: `Innocence`, inculpatory
//! evidence `Einc` and exculpatory evidence `Eex`. Optional extended
//! meta-hypotheses (`Ed`, `Ec`, `Motive`, `Opportunity`, `Alibi`, `Ability`)
//! refine them. The scheme adds
//!
//! * `p(Innocence) + p(Einc) <= 1` (IE),
//! * `p(Eex) <= p(Innocence)` (EE),
//! * `w·p(A) <= p(B)` for every support edge outside a collective group (SE),
//! * `p(B) <= 1 + w·p(A)` for every attack edge (ATT),
//! * `Σ wᵢ·p(Aᵢ) <= p(B)` for every collective group (CS).
//!
//! The belief in `Innocence` is its upper bound.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_traits::One;

use crate::constraint::{
    gen_attack, gen_collective_support, gen_support, ConstraintError, ConstraintSet, LinearAtomicConstraint, Provenance,
};
use crate::dsl::{parse_constraint, ParseError};
use crate::epistemic::{entail_all, BeliefBounds, SolveError};
use crate::graph::{ArgGraph, ArgumentId, GraphError};
use crate::rational::{format_exact, int, one, Rational};

pub const INNOCENCE: &str = "Innocence";
pub const EINC: &str = "Einc";
pub const EEX: &str = "Eex";
pub const BASIC_META: [&str; 3] = [INNOCENCE, EINC, EEX];
pub const EXTENDED_META: [&str; 6] = ["Ed", "Ec", "Motive", "Opportunity", "Alibi", "Ability"];

pub fn is_meta_name(name: &str) -> bool {
    BASIC_META.contains(&name) || EXTENDED_META.contains(&name)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Meta,
    SubHypothesis,
    Evidence,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Meta => "meta",
            Role::SubHypothesis => "subhypothesis",
            Role::Evidence => "evidence",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl core::str::FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "meta" => Ok(Role::Meta),
            "subhypothesis" | "sub-hypothesis" | "sub" => Ok(Role::SubHypothesis),
            "evidence" => Ok(Role::Evidence),
            other => Err(format!("unknown role `{other}`")),
        }
    }
}

/// `Legal` enforces the meta-hypothesis structure; `Plain` only turns edges
/// into SE/ATT/CS constraints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Framework {
    #[default]
    Legal,
    Plain,
}

/// Members whose edges into `target` form one collective support constraint.
/// The weights are those of the graph edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollectiveGroup {
    pub target: ArgumentId,
    pub members: Vec<(ArgumentId, Rational)>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SchemeError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Constraint(#[from] ConstraintError),
    #[error("`{argument}` is declared twice with different roles")]
    ConflictingRole { argument: String },
    #[error("`{argument}` is a meta-hypothesis and must be tagged meta, not {role}")]
    MetaNameWithoutMetaRole { argument: String, role: Role },
    #[error("`{argument}` is not a known meta-hypothesis and cannot be tagged meta")]
    UnknownMeta { argument: String },
    #[error("meta edge {from} -> {to} must have weight {expected}, found {found}")]
    MetaEdgeWeight { from: String, to: String, expected: String, found: String },
    #[error("edge {from} -> {to}: only Einc and Eex may point to Innocence")]
    EdgeIntoInnocence { from: String, to: String },
    #[error("edge {from} -> {to}: {from} may only point to Innocence")]
    EdgeFromMeta { from: String, to: String },
    #[error("edge {from} -> {to}: edges into {to} must be supports")]
    AttackIntoEvidenceHypothesis { from: String, to: String },
    #[error("edge {from} -> {to}: weight {weight} exceeds 1")]
    WeightAboveOne { from: String, to: String, weight: String },
    #[error("collective group for `{target}` names `{member}` without a support edge {member} -> {target}")]
    MissingGroupEdge { member: String, target: String },
    #[error("edge {member} -> {target} belongs to more than one collective group")]
    EdgeInSeveralGroups { member: String, target: String },
}

/// Collects declarations; [`BlafBuilder::build`] validates them all at once.
#[derive(Debug, Clone, Default)]
pub struct BlafBuilder {
    framework: Framework,
    arguments: Vec<(String, Role)>,
    edges: Vec<(String, String, Rational)>,
    groups: Vec<(String, Vec<String>)>,
}

impl BlafBuilder {
    pub fn new(framework: Framework) -> Self {
        BlafBuilder { framework, ..Default::default() }
    }

    pub fn legal() -> Self {
        Self::new(Framework::Legal)
    }

    pub fn plain() -> Self {
        Self::new(Framework::Plain)
    }

    pub fn argument(mut self, name: impl Into<String>, role: Role) -> Self {
        self.arguments.push((name.into(), role));
        self
    }

    pub fn edge(mut self, from: impl Into<String>, to: impl Into<String>, weight: Rational) -> Self {
        self.edges.push((from.into(), to.into(), weight));
        self
    }

    pub fn collective<S: Into<String>>(
        mut self,
        target: impl Into<String>,
        members: impl IntoIterator<Item = S>,
    ) -> Self {
        self.groups.push((target.into(), members.into_iter().map(Into::into).collect()));
        self
    }

    pub fn build(self) -> Result<BlafCase, SchemeError> {
        let legal = self.framework == Framework::Legal;
        let mut graph = ArgGraph::new();
        let mut roles: BTreeMap<ArgumentId, Role> = BTreeMap::new();
        let mut warnings = Vec::new();

        if legal {
            for name in BASIC_META {
                graph.add_argument(name)?;
                roles.insert(ArgumentId::new(name)?, Role::Meta);
            }
        }
        for (name, role) in &self.arguments {
            let id = ArgumentId::new(name.as_str())?;
            if legal {
                if is_meta_name(name) && *role != Role::Meta {
                    return Err(SchemeError::MetaNameWithoutMetaRole { argument: name.clone(), role: *role });
                }
                if !is_meta_name(name) && *role == Role::Meta {
                    return Err(SchemeError::UnknownMeta { argument: name.clone() });
                }
            }
            match roles.get(&id) {
                Some(existing) if existing != role => {
                    return Err(SchemeError::ConflictingRole { argument: name.clone() })
                }
                _ => {}
            }
            graph.add_argument(name)?;
            roles.insert(id, *role);
        }
        for (from, to, weight) in &self.edges {
            if let Some(old) = graph.add_edge(from, to, weight.clone())? {
                warnings.push(format!(
                    "edge {from} -> {to}: weight {} replaced by {}",
                    format_exact(&old),
                    format_exact(weight)
                ));
            }
        }
        if legal {
            for (from, weight) in [(EINC, int(-1)), (EEX, int(1))] {
                match graph.weight(from, INNOCENCE) {
                    None => {
                        graph.add_edge(from, INNOCENCE, weight)?;
                    }
                    Some(found) if *found != weight => {
                        return Err(SchemeError::MetaEdgeWeight {
                            from: from.into(),
                            to: INNOCENCE.into(),
                            expected: format_exact(&weight),
                            found: format_exact(found),
                        })
                    }
                    Some(_) => {}
                }
            }
            validate_legal_edges(&graph)?;
        }

        let mut grouped: BTreeSet<(ArgumentId, ArgumentId)> = BTreeSet::new();
        let mut groups = Vec::with_capacity(self.groups.len());
        for (target, members) in &self.groups {
            let target_id = graph.argument(graph.position(target)?).clone();
            let mut weighted = Vec::with_capacity(members.len());
            for member in members {
                let member_id = graph.argument(graph.position(member)?).clone();
                let edge = graph
                    .edge(member, target)
                    .filter(|e| e.is_support())
                    .ok_or_else(|| SchemeError::MissingGroupEdge { member: member.clone(), target: target.clone() })?;
                if !grouped.insert((member_id.clone(), target_id.clone())) {
                    return Err(SchemeError::EdgeInSeveralGroups { member: member.clone(), target: target.clone() });
                }
                weighted.push((member_id, edge.weight.clone()));
            }
            gen_collective_support(&weighted, &target_id)?;
            groups.push(CollectiveGroup { target: target_id, members: weighted });
        }

        let mut scheme = ConstraintSet::new();
        if legal {
            let inn = ArgumentId::new(INNOCENCE)?;
            let einc = ArgumentId::new(EINC)?;
            let eex = ArgumentId::new(EEX)?;
            scheme.push(
                LinearAtomicConstraint::new([(inn.clone(), one()), (einc, one())], one()),
                Provenance::Inculpatory,
            );
            scheme.push(LinearAtomicConstraint::new([(eex, one()), (inn, -one())], int(0)), Provenance::Exculpatory);
        }
        for edge in graph.edges() {
            if legal && edge.target.as_str() == INNOCENCE {
                continue;
            }
            if grouped.contains(&(edge.source.clone(), edge.target.clone())) {
                continue;
            }
            let (source, target) = (edge.source.clone(), edge.target.clone());
            if edge.is_support() {
                scheme.push(gen_support(edge)?, Provenance::Support { source, target });
            } else {
                scheme.push(gen_attack(edge)?, Provenance::Attack { source, target });
            }
        }
        for group in &groups {
            scheme.push(
                gen_collective_support(&group.members, &group.target)?,
                Provenance::Collective { target: group.target.clone() },
            );
        }

        let roles = graph.arguments().iter().map(|a| roles.get(a).copied().unwrap_or(Role::Evidence)).collect();
        Ok(BlafCase { framework: self.framework, graph, roles, groups, scheme, assumptions: Vec::new(), warnings })
    }
}

fn validate_legal_edges(graph: &ArgGraph) -> Result<(), SchemeError> {
    for edge in graph.edges() {
        let (from, to) = (edge.source.as_str(), edge.target.as_str());
        let err_names = || (from.to_string(), to.to_string());
        if to == INNOCENCE {
            if from != EINC && from != EEX {
                let (from, to) = err_names();
                return Err(SchemeError::EdgeIntoInnocence { from, to });
            }
            continue;
        }
        if BASIC_META.contains(&from) {
            let (from, to) = err_names();
            return Err(SchemeError::EdgeFromMeta { from, to });
        }
        if to == EINC || to == EEX {
            if edge.is_attack() {
                let (from, to) = err_names();
                return Err(SchemeError::AttackIntoEvidenceHypothesis { from, to });
            }
            if edge.weight > one() {
                let (from, to) = err_names();
                return Err(SchemeError::WeightAboveOne { from, to, weight: format_exact(&edge.weight) });
            }
        }
    }
    Ok(())
}

/// A user assumption: its DSL text and the constraints parsed from it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assumption {
    pub id: String,
    pub text: String,
    pub constraints: Vec<LinearAtomicConstraint>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CaseError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("assumption id `{0}` is already in use")]
    DuplicateAssumption(String),
    #[error("no assumption with id `{0}`")]
    UnknownAssumption(String),
    #[error("constraints are unsatisfiable; suspects: {}", join(conflict))]
    Unsatisfiable { conflict: Vec<Provenance> },
    #[error("the case has no Innocence hypothesis")]
    NotLegal,
}

fn join(items: &[Provenance]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

/// Solved bounds plus the belief in `Innocence` (its upper bound). Cases
/// without meta-hypotheses have no innocence belief.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub innocence_belief: Option<Rational>,
    pub bounds: BeliefBounds,
}

/// One inequality implied by the scheme, evaluated on solved bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InequalityCheck {
    pub label: String,
    pub lhs: Rational,
    pub rhs: Rational,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlafCase {
    framework: Framework,
    graph: ArgGraph,
    roles: Vec<Role>,
    groups: Vec<CollectiveGroup>,
    scheme: ConstraintSet,
    assumptions: Vec<Assumption>,
    warnings: Vec<String>,
}

impl BlafCase {
    pub fn framework(&self) -> Framework {
        self.framework
    }

    pub fn is_legal(&self) -> bool {
        self.framework == Framework::Legal
    }

    pub fn graph(&self) -> &ArgGraph {
        &self.graph
    }

    pub fn role(&self, arg: &str) -> Option<Role> {
        self.graph.position(arg).ok().map(|i| self.roles[i])
    }

    pub fn groups(&self) -> &[CollectiveGroup] {
        &self.groups
    }

    /// Groups that `arg` belongs to as a member.
    pub fn groups_with_member<'a>(&'a self, arg: &'a str) -> impl Iterator<Item = &'a CollectiveGroup> {
        self.groups.iter().filter(move |g| g.members.iter().any(|(m, _)| m.as_str() == arg))
    }

    pub fn in_group(&self, source: &str, target: &str) -> bool {
        self.groups.iter().any(|g| g.target.as_str() == target && g.members.iter().any(|(m, _)| m.as_str() == source))
    }

    pub fn scheme_constraints(&self) -> &ConstraintSet {
        &self.scheme
    }

    pub fn assumptions(&self) -> &[Assumption] {
        &self.assumptions
    }

    pub fn assumption(&self, id: &str) -> Option<&Assumption> {
        self.assumptions.iter().find(|a| a.id == id)
    }

    /// Replaced edges noticed while building.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Scheme constraints followed by every assumption in order.
    pub fn constraints(&self) -> ConstraintSet {
        let mut all = self.scheme.clone();
        for a in &self.assumptions {
            for c in &a.constraints {
                all.push(c.clone(), Provenance::Assumption(a.id.clone()));
            }
        }
        all
    }

    /// Smallest `aN` above every numeric id in use.
    pub fn next_assumption_id(&self) -> String {
        let max = self
            .assumptions
            .iter()
            .filter_map(|a| a.id.strip_prefix('a').and_then(|n| n.parse::<u64>().ok()))
            .max()
            .unwrap_or(0);
        format!("a{}", max + 1)
    }

    /// Adds `text` under a fresh id.
    pub fn assume(&self, text: &str) -> Result<(BlafCase, String), CaseError> {
        let id = self.next_assumption_id();
        let case = self.assume_with_id(&id, text)?;
        Ok((case, id))
    }

    pub fn assume_with_id(&self, id: &str, text: &str) -> Result<BlafCase, CaseError> {
        let constraints = parse_constraint(text)?;
        self.assume_constraints(id, text, constraints)
    }

    pub fn assume_constraints(
        &self,
        id: &str,
        text: &str,
        constraints: Vec<LinearAtomicConstraint>,
    ) -> Result<BlafCase, CaseError> {
        if self.assumption(id).is_some() {
            return Err(CaseError::DuplicateAssumption(id.into()));
        }
        for c in &constraints {
            c.validate(&self.graph)?;
        }
        let mut next = self.clone();
        next.assumptions.push(Assumption { id: id.into(), text: text.into(), constraints });
        Ok(next)
    }

    pub fn retract(&self, id: &str) -> Result<BlafCase, CaseError> {
        let pos =
            self.assumptions.iter().position(|a| a.id == id).ok_or_else(|| CaseError::UnknownAssumption(id.into()))?;
        let mut next = self.clone();
        next.assumptions.remove(pos);
        Ok(next)
    }

    /// Bounds for every argument under scheme and assumptions.
    pub fn solve(&self) -> Result<BeliefBounds, CaseError> {
        let all = self.constraints();
        entail_all(&self.graph, &all).map_err(|e| match e {
            SolveError::Graph(g) => CaseError::Graph(g),
            SolveError::Unsatisfiable { conflict } => {
                let mut seen = Vec::new();
                for i in conflict {
                    let (_, p) = all.get(i).expect("conflict rows come from the set");
                    if !seen.contains(p) {
                        seen.push(p.clone());
                    }
                }
                CaseError::Unsatisfiable { conflict: seen }
            }
        })
    }

    pub fn beliefs(&self) -> Result<Verdict, CaseError> {
        let bounds = self.solve()?;
        let innocence_belief = if self.is_legal() { bounds.upper(INNOCENCE).cloned() } else { None };
        Ok(Verdict { innocence_belief, bounds })
    }

    /// Evaluates the inequalities every legal case must satisfy:
    /// `upper(Einc) <= 1 - lower(Eex)`, `upper(Eex) <= 1 - lower(Einc)`, and
    /// for each non-grouped support `a -> E` into one of them,
    /// `upper(other) <= 1 - w·lower(a)`.
    pub fn check_scheme_inequalities(&self, bounds: &BeliefBounds) -> Result<Vec<InequalityCheck>, CaseError> {
        if !self.is_legal() {
            return Err(CaseError::NotLegal);
        }
        let lower = |a: &str| bounds.lower(a).cloned().expect("bounds cover the graph");
        let upper = |a: &str| bounds.upper(a).cloned().expect("bounds cover the graph");
        let mut checks = Vec::new();
        let mut push = |label: String, lhs: Rational, rhs: Rational| {
            let holds = lhs <= rhs;
            checks.push(InequalityCheck { label, lhs, rhs, holds });
        };
        push(String::from("upper(Einc) <= 1 - lower(Eex)"), upper(EINC), one() - lower(EEX));
        push(String::from("upper(Eex) <= 1 - lower(Einc)"), upper(EEX), one() - lower(EINC));
        for (target, other) in [(EINC, EEX), (EEX, EINC)] {
            for edge in self.graph.incoming(target)? {
                if !edge.is_support() || self.in_group(edge.source.as_str(), target) {
                    continue;
                }
                let w = &edge.weight;
                let label = if w.is_one() {
                    format!("upper({other}) <= 1 - lower({})", edge.source)
                } else {
                    format!("upper({other}) <= 1 - {}*lower({})", format_exact(w), edge.source)
                };
                push(label, upper(other), one() - w * lower(edge.source.as_str()));
            }
        }
        Ok(checks)
    }
}

/// Extended skeleton: `Ed`, `Ec` supporting `Einc`, `Alibi`, `Ability`
/// supporting `Eex` (weight 1 each), and a collective group
/// `{Motive, Opportunity} -> Ec` with the given weights.
pub fn extended_template(motive: Rational, opportunity: Rational) -> BlafBuilder {
    let mut b = BlafBuilder::legal();
    for name in EXTENDED_META {
        b = b.argument(name, Role::Meta);
    }
    b.edge("Ed", EINC, int(1))
        .edge("Ec", EINC, int(1))
        .edge("Alibi", EEX, int(1))
        .edge("Ability", EEX, int(1))
        .edge("Motive", "Ec", motive)
        .edge("Opportunity", "Ec", opportunity)
        .collective("Ec", ["Motive", "Opportunity"])
}
