//! Description-logic abstract syntax and knowledge-base containers.

mod concept;
mod kb;
mod numeric;

use std::collections::{BTreeSet, VecDeque};

use thiserror::Error;

pub use concept::{ConceptExpr, RoleExpr};
pub use kb::{ABoxAssertion, KbBuilder, KnowledgeBase, RBox, TBoxAxiom};
pub use numeric::{Facet, NumericRange};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("class {class} has no existential restriction on {role}")]
    NoExistentialFillers { class: String, role: String },
    #[error("individual {0} is declared different from itself")]
    ReflexiveDifferentFrom(String),
    #[error("nominal refers to undeclared individual {0}")]
    UndeclaredNominal(String),
    #[error("{0} is used both as an object role and as a data property")]
    NameKindConflict(String),
}

/// Negation normal form: `Not` only remains directly above `Atomic`,
/// `HasValue`, `OneOf` and `DataSome`.
pub fn nnf(c: &ConceptExpr) -> ConceptExpr {
    use ConceptExpr::*;
    match c {
        Top | Bottom | Atomic(_) | AtLeast(..) | AtMost(..) | HasValue(..) | OneOf(_) | DataSome(..) => c.clone(),
        And(cs) => And(cs.iter().map(nnf).collect()),
        Or(cs) => Or(cs.iter().map(nnf).collect()),
        Exists(r, f) => Exists(r.clone(), Box::new(nnf(f))),
        ForAll(r, f) => ForAll(r.clone(), Box::new(nnf(f))),
        Not(inner) => negated_nnf(inner),
    }
}

/// NNF of `¬c`.
fn negated_nnf(c: &ConceptExpr) -> ConceptExpr {
    use ConceptExpr::*;
    match c {
        Top => Bottom,
        Bottom => Top,
        Atomic(_) | HasValue(..) | OneOf(_) | DataSome(..) => Not(Box::new(c.clone())),
        Not(inner) => nnf(inner),
        And(cs) => Or(cs.iter().map(negated_nnf).collect()),
        Or(cs) => And(cs.iter().map(negated_nnf).collect()),
        Exists(r, f) => ForAll(r.clone(), Box::new(negated_nnf(f))),
        ForAll(r, f) => Exists(r.clone(), Box::new(negated_nnf(f))),
        AtLeast(0, _) => Bottom,
        AtLeast(n, r) => AtMost(n - 1, r.clone()),
        AtMost(n, r) => AtLeast(n + 1, r.clone()),
    }
}

/// Builds `cls ⊑ ∀role.(F1 ⊔ … ⊔ Fk)` from the existential restrictions
/// `cls ⊑ ∃role.Fi` asserted in `kb`, fillers in axiom order without repeats.
pub fn build_closure_axiom(cls: &str, role: &RoleExpr, kb: &KnowledgeBase) -> Result<TBoxAxiom, ModelError> {
    let mut fillers: Vec<ConceptExpr> = Vec::new();
    let mut collect = |sup: &ConceptExpr| {
        let conjuncts: Vec<&ConceptExpr> = match sup {
            ConceptExpr::And(cs) => cs.iter().collect(),
            other => vec![other],
        };
        for c in conjuncts {
            if let ConceptExpr::Exists(r, f) = c {
                if r == role && !fillers.contains(f) {
                    fillers.push((**f).clone());
                }
            }
        }
    };
    for ax in kb.tbox() {
        if let TBoxAxiom::SubClassOf { sub, sup } = ax {
            if sub.as_atomic() == Some(cls) {
                collect(sup);
            }
        }
    }
    if fillers.is_empty() {
        return Err(ModelError::NoExistentialFillers {
            class: cls.to_string(),
            role: role.to_string(),
        });
    }
    Ok(TBoxAxiom::sub_class(
        ConceptExpr::atomic(cls),
        ConceptExpr::ForAll(role.clone(), Box::new(ConceptExpr::or(fillers))),
    ))
}

/// A class is defined when it is one side of an `EquivalentClasses` axiom.
pub fn is_defined_class(cls: &str, kb: &KnowledgeBase) -> bool {
    kb.tbox().iter().any(|ax| match ax {
        TBoxAxiom::EquivalentClasses(a, b) => a.as_atomic() == Some(cls) || b.as_atomic() == Some(cls),
        _ => false,
    })
}

fn atomic_conjuncts<'a>(c: &'a ConceptExpr, out: &mut Vec<&'a str>) {
    match c {
        ConceptExpr::Atomic(n) => out.push(n),
        ConceptExpr::And(cs) => cs.iter().for_each(|c| atomic_conjuncts(c, out)),
        _ => {}
    }
}

/// Named classes syntactically reachable from `cls` through `SubClassOf` and
/// `EquivalentClasses` axioms whose other side is atomic or a conjunction.
/// Always contains `cls` itself.
pub fn told_subsumers(cls: &str, kb: &KnowledgeBase) -> BTreeSet<String> {
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut queue = VecDeque::from([cls.to_string()]);
    while let Some(x) = queue.pop_front() {
        if !seen.insert(x.clone()) {
            continue;
        }
        let mut next = Vec::new();
        for ax in kb.tbox() {
            match ax {
                TBoxAxiom::SubClassOf { sub, sup } if sub.as_atomic() == Some(x.as_str()) => {
                    atomic_conjuncts(sup, &mut next)
                }
                TBoxAxiom::EquivalentClasses(a, b) => {
                    if a.as_atomic() == Some(x.as_str()) {
                        atomic_conjuncts(b, &mut next);
                    }
                    if b.as_atomic() == Some(x.as_str()) {
                        atomic_conjuncts(a, &mut next);
                    }
                }
                _ => {}
            }
        }
        queue.extend(next.into_iter().filter(|n| !seen.contains(*n)).map(str::to_owned));
    }
    seen
}
