use rust_decimal::Decimal;

use super::*;
use crate::model::{ConceptExpr, KnowledgeBase, NumericRange, RoleExpr, TBoxAxiom};
use crate::syntax::parse_text;

const GOOD_CPU: &str = include_str!("../../data/rdfxml/good_cpu.owl");
const POOR_VISIBILITY: &str = include_str!("../../data/rdfxml/poor_visibility.owl");
const CLOSURE: &str = include_str!("../../data/rdfxml/poor_visibility_closure.owl");

fn atomic(n: &str) -> ConceptExpr {
    ConceptExpr::atomic(n)
}

#[test]
fn existential_snippet_gives_three_subclass_axioms() {
    let kb = import_rdfxml(POOR_VISIBILITY).unwrap();
    let expected: Vec<TBoxAxiom> = ["FoggyCondition", "RainyCondition", "SnowyCondition"]
        .iter()
        .map(|f| TBoxAxiom::sub_class(atomic("PoorVisibilityDanger"), ConceptExpr::some("hasPrecipitationCondition", atomic(f))))
        .collect();
    assert_eq!(kb.tbox(), expected.as_slice());
    assert_eq!(kb.label("PoorVisibilityDanger", "en"), "PoorVisibilityDanger");
}

#[test]
fn closure_snippet_gives_universal_over_union() {
    let kb = import_rdfxml(CLOSURE).unwrap();
    let union = ConceptExpr::Or(vec![atomic("FoggyCondition"), atomic("RainyCondition"), atomic("SnowyCondition")]);
    assert_eq!(
        kb.tbox(),
        &[TBoxAxiom::sub_class(
            atomic("PoorVisibilityDanger"),
            ConceptExpr::only("hasPrecipitationCondition", union)
        )]
    );
}

#[test]
fn good_cpu_definition_keeps_thing_and_the_facet() {
    let kb = import_rdfxml(GOOD_CPU).unwrap();
    let feature = ConceptExpr::Or(vec![
        ConceptExpr::not(atomic("x86Arch")),
        ConceptExpr::DataSome("hasCore".into(), NumericRange::at_least(Decimal::from(4))),
    ]);
    let rhs = ConceptExpr::And(vec![
        ConceptExpr::Top,
        ConceptExpr::some("createdBy", atomic("ChipManufacturer")),
        ConceptExpr::some("madeOf", atomic("Metalloid")),
        ConceptExpr::only("hasFeature", feature),
    ]);
    assert_eq!(kb.tbox(), &[TBoxAxiom::EquivalentClasses(atomic("GoodCPU"), rhs)]);
    assert!(kb.data_property_names().contains("hasCore"));
}

#[test]
fn empty_export_is_a_bare_envelope() {
    let xml = export_rdfxml(&KnowledgeBase::empty()).unwrap();
    assert!(xml.contains(&format!("xmlns:owl=\"{OWL}\"")));
    assert!(!xml.contains("xmlns:rdfs"));
    assert!(import_rdfxml(&xml).unwrap().is_empty());
}

#[test]
fn intersection_uses_description_members() {
    let kb = parse_text("Class: Man\n EquivalentTo: Human and Male\n").unwrap();
    let xml = export_rdfxml(&kb).unwrap();
    let start = xml.find("<owl:intersectionOf").unwrap();
    let end = xml.find("</owl:intersectionOf>").unwrap();
    assert_eq!(xml[start..end].matches("<rdf:Description").count(), 2);
}

#[test]
fn full_round_trip() {
    let kb = parse_text(
        "ObjectProperty: hasLocation\n Characteristics: Transitive\n InverseOf: isLocationOf\n\
         ObjectProperty: hasPart\n SubPropertyOf: inverse(partOf)\n\
         ObjectProperty: r\n Characteristics: Functional\n\
         DataProperty: hasCore\n Characteristics: Functional\n\
         Class: A\n Annotations: label \"Śliska\"@pl, label \"Slippery\"@en\n SubClassOf: r max 1, r min 0\n\
         Class: B\n EquivalentTo: {a, b} or (hasLocation value a)\n\
         Class: C\n SubClassOf: hasCore some range[> 2, <= 8] and not (inverse(r) only B)\n\
         Individual: a\n Types: A, r some B\n Facts: hasLocation b, hasCore 12.5\n DifferentFrom: b\n\
         Individual: b\n SameAs: c\n\
         GeneralAxiom: A and B SubClassOf: C\n\
         GeneralAxiom: r some Thing SubClassOf: A\n",
    )
    .unwrap();
    let xml = export_rdfxml(&kb).unwrap();
    let back = import_rdfxml(&xml).unwrap();
    assert!(kb.logically_equal(&back), "{xml}");
    assert_eq!(export_rdfxml(&back).unwrap(), xml);
}

#[test]
fn unknown_elements_are_named() {
    let err = import_rdfxml("<owl:Class rdf:about=\"#A\">\n  <owl:disjointUnionOf/>\n</owl:Class>").unwrap_err();
    match err {
        RdfXmlError::UnsupportedConstruct { element, line, .. } => {
            assert_eq!(element, "owl:disjointUnionOf");
            assert_eq!(line, 2);
        }
        other => panic!("{other}"),
    }
    assert!(import_rdfxml("<owl:AllDifferent/>").unwrap_err().is_unsupported());
    assert!(matches!(import_rdfxml("<owl:Class>"), Err(RdfXmlError::Xml(_))));
}

#[test]
fn inverse_properties_in_restrictions() {
    let xml = "<owl:Class rdf:about=\"#A\"><rdfs:subClassOf><owl:Restriction>\
        <owl:onProperty><owl:ObjectProperty><owl:inverseOf rdf:resource=\"#r\"/></owl:ObjectProperty></owl:onProperty>\
        <owl:someValuesFrom rdf:resource=\"&owl;Thing\"/></owl:Restriction></rdfs:subClassOf></owl:Class>";
    let kb = import_rdfxml(xml).unwrap();
    assert_eq!(
        kb.tbox(),
        &[TBoxAxiom::sub_class(atomic("A"), ConceptExpr::some(RoleExpr::inverse_of("r"), ConceptExpr::Top))]
    );
}
