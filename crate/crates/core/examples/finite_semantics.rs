//! Evaluates concepts in a small hand-built interpretation, and checks the
//! law ∀r.C ⊓ ∀r.D ≡ ∀r.(C ⊓ D) with the reasoner.

use trafficdl::model::{nnf, ConceptExpr, KnowledgeBase};
use trafficdl::reasoner::{evaluate, subsumes, FiniteInterpretation};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Three computers: 0 has no connections, 1 connects to a notebook (2).
    let mut i = FiniteInterpretation::with_domain(3);
    i.concept_ext.insert("Computer".into(), [0, 1].into());
    i.concept_ext.insert("Notebook".into(), [2].into());
    i.concept_ext.insert("Ebook".into(), Default::default());
    i.role_ext.insert("hasConnection".into(), [(1, 2)].into());

    let offline = ConceptExpr::and(vec![
        ConceptExpr::atomic("Computer"),
        ConceptExpr::only("hasConnection", ConceptExpr::Bottom),
    ]);
    println!("Computer ⊓ ∀hasConnection.⊥ = {:?}", evaluate(&offline, &i)?);

    let either = ConceptExpr::only(
        "hasConnection",
        ConceptExpr::or(vec![ConceptExpr::atomic("Notebook"), ConceptExpr::atomic("Ebook")]),
    );
    let negated = ConceptExpr::not(either.clone());
    println!("¬∀hasConnection.(Notebook ⊔ Ebook) = {:?}", evaluate(&negated, &i)?);
    println!("in NNF: {:?}", nnf(&negated));

    let (c, d) = (ConceptExpr::atomic("C"), ConceptExpr::atomic("D"));
    let split = ConceptExpr::and(vec![ConceptExpr::only("r", c.clone()), ConceptExpr::only("r", d.clone())]);
    let joined = ConceptExpr::only("r", ConceptExpr::and(vec![c, d]));
    let kb = KnowledgeBase::empty();
    println!(
        "∀r.C ⊓ ∀r.D ≡ ∀r.(C ⊓ D): {}",
        subsumes(&split, &joined, &kb)? && subsumes(&joined, &split, &kb)?
    );
    Ok(())
}
