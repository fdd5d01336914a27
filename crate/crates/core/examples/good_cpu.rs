//! Realization on the GoodCPU knowledge base: Itanium is never asserted to be
//! a GoodCPU, but every part of the definition follows from its facts.

use trafficdl::reasoner::Reasoner;
use trafficdl::syntax::parse_text;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let kb = parse_text(include_str!("../data/good_cpu.kb"))?;
    let reasoner = Reasoner::new(&kb);
    let tax = reasoner.classify()?;
    for (individual, classes) in reasoner.realize(&tax)? {
        println!("{individual}: {classes:?}");
    }

    // The same definition, imported from its RDF/XML serialization.
    let owl = trafficdl::rdfxml::import_rdfxml(include_str!("../data/rdfxml/good_cpu.owl"))?;
    println!("RDF/XML definition: {:?}", owl.tbox()[0]);
    Ok(())
}
