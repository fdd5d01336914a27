//! Classifies the bundled traffic ontology and prints the inferred hierarchy.
//!
//! `LowFrictionDanger` only has a definition, yet it ends up under
//! `WeatherDanger` with the three surface dangers beneath it.

use std::time::Instant;

use trafficdl::reasoner::Reasoner;
use trafficdl::syntax::parse_text;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let kb = parse_text(include_str!("../data/traffic.kb"))?;
    let start = Instant::now();
    let tax = Reasoner::new(&kb).classify()?;
    println!("{}", tax.render_tree());
    println!(
        "LowFrictionDanger direct subclasses: {:?}",
        tax.direct_subclasses("LowFrictionDanger")
    );
    println!("classified {} classes in {:?}", kb.concept_names().len(), start.elapsed());
    Ok(())
}
