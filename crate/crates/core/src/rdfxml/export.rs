use std::collections::BTreeMap;

use super::{RdfXmlError, KB, OWL, RDF, RDFS, XSD};
use crate::model::{ABoxAssertion, ConceptExpr, KnowledgeBase, RoleExpr, TBoxAxiom};

fn esc(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn iri(name: &str) -> Result<String, RdfXmlError> {
    if name.contains('#') {
        return Err(RdfXmlError::Inexpressible(format!("name `{name}` contains `#`")));
    }
    Ok(format!("#{}", esc(name)))
}

/// XML element names for property assertions must be NCNames.
fn ncname(name: &str) -> Result<&str, RdfXmlError> {
    let mut chars = name.chars();
    let ok = chars.next().is_some_and(|c| c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'));
    if ok {
        Ok(name)
    } else {
        Err(RdfXmlError::Inexpressible(format!("property `{name}` is not a valid XML element name")))
    }
}

struct Out {
    text: String,
}

impl Out {
    fn line(&mut self, depth: usize, s: &str) {
        for _ in 0..depth {
            self.text.push_str("  ");
        }
        self.text.push_str(s);
        self.text.push('\n');
    }

    fn labels(&mut self, depth: usize, labels: &[(&str, &str)]) {
        for (lang, text) in labels {
            self.line(depth, &format!("<rdfs:label xml:lang=\"{}\">{}</rdfs:label>", esc(lang), esc(text)));
        }
    }

    fn class_ref(&mut self, depth: usize, c: &ConceptExpr) -> Result<(), RdfXmlError> {
        match c {
            ConceptExpr::Top => self.line(depth, &format!("<owl:Class rdf:about=\"{OWL}Thing\"/>")),
            ConceptExpr::Bottom => self.line(depth, &format!("<owl:Class rdf:about=\"{OWL}Nothing\"/>")),
            ConceptExpr::Atomic(a) => self.line(depth, &format!("<rdf:Description rdf:about=\"{}\"/>", iri(a)?)),
            other => {
                let tag = open_tag(other);
                self.line(depth, &format!("<{tag}>"));
                self.definition(depth + 1, other)?;
                self.line(depth, &format!("</{tag}>"));
            }
        }
        Ok(())
    }

    /// `<tag>` wrapping a class, using `rdf:resource` for named ones.
    fn wrapped(&mut self, depth: usize, tag: &str, c: &ConceptExpr) -> Result<(), RdfXmlError> {
        match c {
            ConceptExpr::Atomic(a) => self.line(depth, &format!("<{tag} rdf:resource=\"{}\"/>", iri(a)?)),
            ConceptExpr::Top => self.line(depth, &format!("<{tag} rdf:resource=\"{OWL}Thing\"/>")),
            ConceptExpr::Bottom => self.line(depth, &format!("<{tag} rdf:resource=\"{OWL}Nothing\"/>")),
            other => {
                self.line(depth, &format!("<{tag}>"));
                self.class_ref(depth + 1, other)?;
                self.line(depth, &format!("</{tag}>"));
            }
        }
        Ok(())
    }

    fn property(&mut self, depth: usize, tag: &str, r: &RoleExpr) -> Result<(), RdfXmlError> {
        if r.inverted {
            self.line(depth, &format!("<{tag}>"));
            self.line(depth + 1, "<owl:ObjectProperty>");
            self.line(depth + 2, &format!("<owl:inverseOf rdf:resource=\"{}\"/>", iri(&r.name)?));
            self.line(depth + 1, "</owl:ObjectProperty>");
            self.line(depth, &format!("</{tag}>"));
        } else {
            self.line(depth, &format!("<{tag} rdf:resource=\"{}\"/>", iri(&r.name)?));
        }
        Ok(())
    }

    /// The defining children of a complex class (everything inside its
    /// `owl:Class` or `owl:Restriction` element).
    fn definition(&mut self, depth: usize, c: &ConceptExpr) -> Result<(), RdfXmlError> {
        match c {
            ConceptExpr::And(ops) | ConceptExpr::Or(ops) => {
                let tag = if matches!(c, ConceptExpr::And(_)) { "owl:intersectionOf" } else { "owl:unionOf" };
                self.line(depth, &format!("<{tag} rdf:parseType=\"Collection\">"));
                for o in ops {
                    self.class_ref(depth + 1, o)?;
                }
                self.line(depth, &format!("</{tag}>"));
            }
            ConceptExpr::Not(inner) => self.wrapped(depth, "owl:complementOf", inner)?,
            ConceptExpr::OneOf(names) => {
                self.line(depth, "<owl:oneOf rdf:parseType=\"Collection\">");
                for n in names {
                    self.line(depth + 1, &format!("<rdf:Description rdf:about=\"{}\"/>", iri(n)?));
                }
                self.line(depth, "</owl:oneOf>");
            }
            ConceptExpr::Exists(r, f) | ConceptExpr::ForAll(r, f) => {
                self.property(depth, "owl:onProperty", r)?;
                let tag = if matches!(c, ConceptExpr::Exists(..)) { "owl:someValuesFrom" } else { "owl:allValuesFrom" };
                self.wrapped(depth, tag, f)?;
            }
            ConceptExpr::AtLeast(n, r) | ConceptExpr::AtMost(n, r) => {
                self.property(depth, "owl:onProperty", r)?;
                let tag = if matches!(c, ConceptExpr::AtLeast(..)) { "owl:minCardinality" } else { "owl:maxCardinality" };
                self.line(depth, &format!("<{tag} rdf:datatype=\"{XSD}nonNegativeInteger\">{n}</{tag}>"));
            }
            ConceptExpr::HasValue(r, i) => {
                self.property(depth, "owl:onProperty", r)?;
                self.line(depth, &format!("<owl:hasValue rdf:resource=\"{}\"/>", iri(i)?));
            }
            ConceptExpr::DataSome(p, range) => {
                self.property(depth, "owl:onProperty", &RoleExpr::named(p.as_str()))?;
                if range.lower.is_none() && range.upper.is_none() {
                    self.line(depth, &format!("<owl:someValuesFrom rdf:resource=\"{XSD}decimal\"/>"));
                    return Ok(());
                }
                self.line(depth, "<owl:someValuesFrom>");
                self.line(depth + 1, "<rdfs:Datatype>");
                self.line(depth + 2, &format!("<owl:onDatatype rdf:resource=\"{XSD}decimal\"/>"));
                self.line(depth + 2, "<owl:withRestrictions rdf:parseType=\"Collection\">");
                let facets = [
                    ("minInclusive", range.min_inclusive()),
                    ("minExclusive", range.min_exclusive()),
                    ("maxInclusive", range.max_inclusive()),
                    ("maxExclusive", range.max_exclusive()),
                ];
                for (name, v) in facets {
                    if let Some(v) = v {
                        self.line(depth + 3, "<rdf:Description>");
                        self.line(
                            depth + 4,
                            &format!("<xsd:{name} rdf:datatype=\"{XSD}decimal\">{v}</xsd:{name}>"),
                        );
                        self.line(depth + 3, "</rdf:Description>");
                    }
                }
                self.line(depth + 2, "</owl:withRestrictions>");
                self.line(depth + 1, "</rdfs:Datatype>");
                self.line(depth, "</owl:someValuesFrom>");
            }
            ConceptExpr::Top | ConceptExpr::Bottom | ConceptExpr::Atomic(_) => {
                unreachable!("named classes have no definition")
            }
        }
        Ok(())
    }
}

fn open_tag(c: &ConceptExpr) -> &'static str {
    match c {
        ConceptExpr::Exists(..)
        | ConceptExpr::ForAll(..)
        | ConceptExpr::AtLeast(..)
        | ConceptExpr::AtMost(..)
        | ConceptExpr::HasValue(..)
        | ConceptExpr::DataSome(..) => "owl:Restriction",
        _ => "owl:Class",
    }
}

/// Renders a knowledge base as RDF/XML. Output is deterministic: entities
/// sorted by name, axioms in insertion order.
pub fn export_rdfxml(kb: &KnowledgeBase) -> Result<String, RdfXmlError> {
    let mut out = Out {
        text: String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"),
    };
    if kb.is_empty() {
        out.line(0, &format!("<rdf:RDF xmlns:rdf=\"{RDF}\" xmlns:owl=\"{OWL}\">"));
        out.line(0, "</rdf:RDF>");
        return Ok(out.text);
    }
    out.line(0, &format!("<rdf:RDF xmlns:rdf=\"{RDF}\""));
    out.line(1, &format!("xmlns:rdfs=\"{RDFS}\""));
    out.line(1, &format!("xmlns:owl=\"{OWL}\""));
    out.line(1, &format!("xmlns:xsd=\"{XSD}\""));
    out.line(1, &format!("xmlns:kb=\"{KB}\">"));

    let mut labels: BTreeMap<&str, Vec<(&str, &str)>> = BTreeMap::new();
    for ((entity, lang), text) in kb.labels() {
        labels.entry(entity).or_default().push((lang, text));
    }
    let labels_of = |name: &str| labels.get(name).cloned().unwrap_or_default();

    let rbox = kb.rbox();
    for r in kb.role_names() {
        out.line(1, &format!("<owl:ObjectProperty rdf:about=\"{}\">", iri(r)?));
        out.labels(2, &labels_of(r));
        for (sub, sup) in &rbox.sub_role_axioms {
            if sub.name == *r && !sub.inverted {
                out.property(2, "rdfs:subPropertyOf", sup)?;
            }
        }
        for (a, b) in &rbox.inverse_pairs {
            if a == r {
                out.line(2, &format!("<owl:inverseOf rdf:resource=\"{}\"/>", iri(b)?));
            }
        }
        if rbox.transitive_roles.contains(r) {
            out.line(2, &format!("<rdf:type rdf:resource=\"{OWL}TransitiveProperty\"/>"));
        }
        out.line(1, "</owl:ObjectProperty>");
    }

    for p in kb.data_property_names() {
        out.line(1, &format!("<owl:DatatypeProperty rdf:about=\"{}\">", iri(p)?));
        out.labels(2, &labels_of(p));
        if kb.functional_data_properties().contains(p) {
            out.line(2, &format!("<rdf:type rdf:resource=\"{OWL}FunctionalProperty\"/>"));
        }
        out.line(1, "</owl:DatatypeProperty>");
    }

    let mut by_class: BTreeMap<&str, Vec<(&str, &ConceptExpr)>> = BTreeMap::new();
    let mut general = Vec::new();
    for ax in kb.tbox() {
        match ax {
            TBoxAxiom::SubClassOf { sub: ConceptExpr::Atomic(a), sup } => {
                by_class.entry(a).or_default().push(("rdfs:subClassOf", sup))
            }
            TBoxAxiom::EquivalentClasses(ConceptExpr::Atomic(a), b) => {
                by_class.entry(a).or_default().push(("owl:equivalentClass", b))
            }
            TBoxAxiom::SubClassOf { sub, sup } => general.push((sub, "rdfs:subClassOf", sup)),
            TBoxAxiom::EquivalentClasses(a, b) => general.push((a, "owl:equivalentClass", b)),
            other => {
                return Err(RdfXmlError::Inexpressible(format!("unnormalized axiom {other:?}")));
            }
        }
    }
    for c in kb.concept_names() {
        out.line(1, &format!("<owl:Class rdf:about=\"{}\">", iri(c)?));
        out.labels(2, &labels_of(c));
        for (tag, target) in by_class.remove(c.as_str()).unwrap_or_default() {
            out.wrapped(2, tag, target)?;
        }
        out.line(1, "</owl:Class>");
    }
    for (lhs, tag, rhs) in general {
        match lhs {
            ConceptExpr::Top | ConceptExpr::Bottom => {
                let name = if matches!(lhs, ConceptExpr::Top) { "Thing" } else { "Nothing" };
                out.line(1, &format!("<owl:Class rdf:about=\"{OWL}{name}\">"));
                out.wrapped(2, tag, rhs)?;
                out.line(1, "</owl:Class>");
            }
            _ => {
                let open = open_tag(lhs);
                out.line(1, &format!("<{open}>"));
                out.definition(2, lhs)?;
                out.wrapped(2, tag, rhs)?;
                out.line(1, &format!("</{open}>"));
            }
        }
    }

    let mut by_ind: BTreeMap<&str, Vec<&ABoxAssertion>> = BTreeMap::new();
    for a in kb.abox() {
        let who = match a {
            ABoxAssertion::ClassAssertion { individual, .. } => individual,
            ABoxAssertion::RoleAssertion { subject, .. } => subject,
            ABoxAssertion::DataAssertion { individual, .. } => individual,
            ABoxAssertion::SameAs(x, _) | ABoxAssertion::DifferentFrom(x, _) => x,
        };
        by_ind.entry(who).or_default().push(a);
    }
    for i in kb.individual_names() {
        out.line(1, &format!("<owl:NamedIndividual rdf:about=\"{}\">", iri(i)?));
        out.labels(2, &labels_of(i));
        for a in by_ind.remove(i.as_str()).unwrap_or_default() {
            match a {
                ABoxAssertion::ClassAssertion { concept, .. } => out.wrapped(2, "rdf:type", concept)?,
                ABoxAssertion::RoleAssertion { role, object, .. } => {
                    out.line(2, &format!("<kb:{} rdf:resource=\"{}\"/>", ncname(&role.name)?, iri(object)?))
                }
                ABoxAssertion::DataAssertion { property, value, .. } => {
                    let p = ncname(property)?;
                    out.line(2, &format!("<kb:{p} rdf:datatype=\"{XSD}decimal\">{value}</kb:{p}>"))
                }
                ABoxAssertion::SameAs(_, y) => out.line(2, &format!("<owl:sameAs rdf:resource=\"{}\"/>", iri(y)?)),
                ABoxAssertion::DifferentFrom(_, y) => {
                    out.line(2, &format!("<owl:differentFrom rdf:resource=\"{}\"/>", iri(y)?))
                }
            }
        }
        out.line(1, "</owl:NamedIndividual>");
    }
    out.line(0, "</rdf:RDF>");
    Ok(out.text)
}
