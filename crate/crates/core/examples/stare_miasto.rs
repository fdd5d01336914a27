//! The StareMiasto walkthrough: synchronize the sample store into the core
//! ontology, then ask which dangers can occur in the district.

use std::time::Instant;

use trafficdl::model::{ConceptExpr, RoleExpr};
use trafficdl::reasoner::Reasoner;
use trafficdl::store::{synchronize, Store};
use trafficdl::syntax::parse_text;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let core = parse_text(include_str!("../data/traffic.kb"))?;
    let store = Store::from_json(include_str!("../data/sample_store.json"))?;
    let start = Instant::now();
    let kb = synchronize(&core, &store)?;
    let reasoner = Reasoner::new(&kb);
    let tax = reasoner.classify()?;

    // TrafficDanger and hasCondition some (hasLocation some {StareMiasto})
    let query = ConceptExpr::and(vec![
        ConceptExpr::atomic("TrafficDanger"),
        ConceptExpr::some(
            "hasCondition",
            ConceptExpr::some(RoleExpr::named("hasLocation"), ConceptExpr::one_of(["StareMiasto"])),
        ),
    ]);
    let answer = reasoner.dl_query(&query, &tax)?;
    println!("dangers in StareMiasto: {:?}", answer.all_subclasses);
    println!(
        "StreetLocation instances: {:?}",
        reasoner.instances_of(&ConceptExpr::atomic("StreetLocation"))?
    );
    println!("done in {:?}", start.elapsed());
    Ok(())
}
