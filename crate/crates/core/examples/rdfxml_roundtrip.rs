//! Converts the bundled ontology to RDF/XML and back, then imports the
//! PoorVisibilityDanger snippets.

use trafficdl::rdfxml::{export_rdfxml, import_rdfxml};
use trafficdl::syntax::{parse_text, serialize_text};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let kb = parse_text(include_str!("../data/traffic.kb"))?;
    let xml = export_rdfxml(&kb)?;
    let back = import_rdfxml(&xml)?;
    println!("{} bytes of RDF/XML, logically equal after import: {}", xml.len(), kb.logically_equal(&back));
    println!("{}", xml.lines().take(12).collect::<Vec<_>>().join("\n"));

    for (name, doc) in [
        ("existentials", include_str!("../data/rdfxml/poor_visibility.owl")),
        ("closure", include_str!("../data/rdfxml/poor_visibility_closure.owl")),
    ] {
        let kb = import_rdfxml(doc)?;
        println!("--- {name}: {} axioms\n{}", kb.tbox().len(), serialize_text(&kb));
    }
    Ok(())
}
