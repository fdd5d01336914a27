//! Tableau reasoning over a [`KnowledgeBase`]: satisfiability, consistency,
//! subsumption, classification, realization and retrieval.

mod datatypes;
mod graph;
pub(crate) mod index;
mod interpretation;
mod tableau;
mod taxonomy;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use thiserror::Error;

pub use datatypes::{check_numeric_range, ranges_intersect};
pub use interpretation::{evaluate, Element, FiniteInterpretation};
pub use taxonomy::{GroupId, Taxonomy};

use crate::model::{ConceptExpr, KnowledgeBase};
use index::Index;
use tableau::Tableau;

pub const DEFAULT_NODE_BUDGET: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReasonerError {
    #[error("unsupported construct: {0}")]
    UnsupportedConstruct(String),
    #[error("node budget of {limit} exceeded")]
    ResourceLimit { limit: usize },
    #[error("knowledge base is inconsistent")]
    InconsistentKB,
    #[error("name `{0}` is not mapped by the interpretation")]
    UnmappedName(String),
}

/// Answer to a DL query, in the shape of the usual query tab.
#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize)]
pub struct QueryAnswer {
    pub equivalents: BTreeSet<String>,
    pub direct_subclasses: BTreeSet<String>,
    pub all_subclasses: BTreeSet<String>,
    pub direct_superclasses: BTreeSet<String>,
    pub instances: BTreeSet<String>,
}

/// A reasoner bound to one knowledge base snapshot. Queries take `&self` and
/// each runs on its own completion graph, so a shared reasoner can serve
/// concurrent callers.
pub struct Reasoner {
    kb: KnowledgeBase,
    index: Index,
    node_budget: usize,
    consistency: OnceLock<Result<bool, ReasonerError>>,
}

impl std::fmt::Debug for Reasoner {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Reasoner")
            .field("axioms", &self.kb.axiom_count())
            .field("node_budget", &self.node_budget)
            .finish_non_exhaustive()
    }
}

impl Reasoner {
    pub fn new(kb: &KnowledgeBase) -> Self {
        Reasoner {
            kb: kb.clone(),
            index: Index::build(kb),
            node_budget: DEFAULT_NODE_BUDGET,
            consistency: OnceLock::new(),
        }
    }

    pub fn with_node_budget(mut self, budget: usize) -> Self {
        self.node_budget = budget;
        self.consistency = OnceLock::new();
        self
    }

    pub fn kb(&self) -> &KnowledgeBase {
        &self.kb
    }

    fn tableau(&self) -> Tableau<'_> {
        Tableau::new(
            self.index.base.clone(),
            &self.index.tbox,
            &self.index.functional_data,
            self.node_budget,
        )
    }

    pub fn is_consistent(&self) -> Result<bool, ReasonerError> {
        self.consistency
            .get_or_init(|| {
                let mut t = self.tableau();
                if t.it.individuals.len() == 0 {
                    let top = t.it.top();
                    t.satisfiable(top, None)
                } else {
                    t.consistent(&self.index.abox, &[])
                }
            })
            .clone()
    }

    fn require_consistent(&self) -> Result<(), ReasonerError> {
        if self.is_consistent()? {
            Ok(())
        } else {
            Err(ReasonerError::InconsistentKB)
        }
    }

    /// Satisfiability w.r.t. the whole knowledge base. Every concept is
    /// unsatisfiable in an inconsistent one.
    pub fn is_satisfiable(&self, c: &ConceptExpr) -> Result<bool, ReasonerError> {
        if !self.is_consistent()? {
            return Ok(false);
        }
        let mut t = self.tableau();
        let cid = t.it.concept(c, false);
        let abox = (self.index.tbox_has_nominals || c.has_nominals()).then_some(&self.index.abox);
        t.satisfiable(cid, abox)
    }

    /// `sub ⊑ sup`, decided as unsatisfiability of `sub ⊓ ¬sup`.
    pub fn subsumes(&self, sup: &ConceptExpr, sub: &ConceptExpr) -> Result<bool, ReasonerError> {
        let test = ConceptExpr::And(vec![sub.clone(), ConceptExpr::not(sup.clone())]);
        Ok(!self.is_satisfiable(&test)?)
    }

    /// Does the knowledge base entail `C(individual)`?
    pub fn is_instance(&self, individual: &str, c: &ConceptExpr) -> Result<bool, ReasonerError> {
        self.require_consistent()?;
        let mut t = self.tableau();
        let i = t.it.individuals.id(individual);
        let neg = t.it.concept(c, true);
        Ok(!t.consistent(&self.index.abox, &[(i, neg)])?)
    }

    pub fn instances_of(&self, c: &ConceptExpr) -> Result<BTreeSet<String>, ReasonerError> {
        self.require_consistent()?;
        let mut out = BTreeSet::new();
        if matches!(c, ConceptExpr::Bottom) {
            return Ok(out);
        }
        for x in self.kb.individual_names() {
            if self.is_instance(x, c)? {
                out.insert(x.clone());
            }
        }
        Ok(out)
    }

    pub fn classify(&self) -> Result<Taxonomy, ReasonerError> {
        self.require_consistent()?;
        taxonomy::classify(self)
    }

    /// Most specific named classes of every individual, one name per
    /// equivalence group.
    pub fn realize(&self, tax: &Taxonomy) -> Result<BTreeMap<String, BTreeSet<String>>, ReasonerError> {
        self.require_consistent()?;
        taxonomy::realize(self, tax)
    }

    pub fn dl_query(&self, c: &ConceptExpr, tax: &Taxonomy) -> Result<QueryAnswer, ReasonerError> {
        self.require_consistent()?;
        taxonomy::dl_query(self, tax, c)
    }
}

pub fn is_satisfiable(c: &ConceptExpr, kb: &KnowledgeBase) -> Result<bool, ReasonerError> {
    Reasoner::new(kb).is_satisfiable(c)
}

pub fn is_consistent(kb: &KnowledgeBase) -> Result<bool, ReasonerError> {
    Reasoner::new(kb).is_consistent()
}

pub fn subsumes(sup: &ConceptExpr, sub: &ConceptExpr, kb: &KnowledgeBase) -> Result<bool, ReasonerError> {
    Reasoner::new(kb).subsumes(sup, sub)
}

pub fn classify(kb: &KnowledgeBase) -> Result<Taxonomy, ReasonerError> {
    Reasoner::new(kb).classify()
}

pub fn realize(kb: &KnowledgeBase) -> Result<BTreeMap<String, BTreeSet<String>>, ReasonerError> {
    let r = Reasoner::new(kb);
    let tax = r.classify()?;
    r.realize(&tax)
}

pub fn instances_of(c: &ConceptExpr, kb: &KnowledgeBase) -> Result<BTreeSet<String>, ReasonerError> {
    Reasoner::new(kb).instances_of(c)
}

pub fn dl_query(c: &ConceptExpr, kb: &KnowledgeBase) -> Result<QueryAnswer, ReasonerError> {
    let r = Reasoner::new(kb);
    let tax = r.classify()?;
    r.dl_query(c, &tax)
}
