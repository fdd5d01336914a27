//! Inverse and transitive roles over the synchronized sample locations.
//!
//! Only `hasLocation(c30-147, ArmiiKrajowej)` is stored; the reasoner infers
//! `isLocationOf(ArmiiKrajowej, c30-147)` and, through transitivity, that every
//! postal code lies in its street's district.

use trafficdl::model::{ConceptExpr, RoleExpr};
use trafficdl::reasoner::Reasoner;
use trafficdl::store::{synchronize, Store};
use trafficdl::syntax::parse_text;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let core = parse_text(include_str!("../data/traffic.kb"))?;
    let store = Store::from_json(include_str!("../data/sample_store.json"))?;
    let kb = synchronize(&core, &store)?;
    let r = Reasoner::new(&kb);

    let located_at = ConceptExpr::some(RoleExpr::inverse_of("hasLocation"), ConceptExpr::one_of(["c30-147"]));
    println!("isLocationOf some {{c30-147}}: {:?}", r.instances_of(&located_at)?);

    for district in ["StareMiasto", "Bronowice"] {
        let inside = ConceptExpr::has_value("hasLocation", district);
        println!("located in {district}: {:?}", r.instances_of(&inside)?);
    }
    Ok(())
}
