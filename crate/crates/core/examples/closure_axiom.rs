//! Open-world reasoning and closure axioms on PoorVisibilityDanger.
//!
//! The three existential restrictions say the danger arises with fog, rain or
//! snow, but nothing rules out other precipitation. Only after the closure
//! axiom is added does the universal restriction follow.

use trafficdl::model::{build_closure_axiom, ConceptExpr, RoleExpr};
use trafficdl::reasoner::subsumes;
use trafficdl::syntax::{parse_text, write_concept};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let kb = parse_text(include_str!("../data/traffic.kb"))?;
    let role = RoleExpr::named("hasPrecipitationCondition");
    let only = ConceptExpr::only(
        role.clone(),
        ConceptExpr::or(["FoggyCondition", "RainyCondition", "SnowyCondition"].map(ConceptExpr::atomic).to_vec()),
    );
    let danger = ConceptExpr::atomic("PoorVisibilityDanger");

    println!("before closure: {}", subsumes(&only, &danger, &kb)?);

    let closure = build_closure_axiom("PoorVisibilityDanger", &role, &kb)?;
    println!("closure axiom: {closure:?}");
    let closed = kb.to_builder().axiom(closure).build()?;
    println!("after closure:  {}", subsumes(&only, &danger, &closed)?);
    println!("restriction:    {}", write_concept(&only));
    Ok(())
}
