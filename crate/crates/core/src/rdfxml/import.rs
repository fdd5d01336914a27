use std::str::FromStr;

use roxmltree::{Document, Node, ParsingOptions};
use rust_decimal::Decimal;

use super::{RdfXmlError, OWL, RDF, RDFS, XML, XSD};
use crate::model::{ABoxAssertion, ConceptExpr, Facet, KbBuilder, KnowledgeBase, NumericRange, RoleExpr, TBoxAxiom};

const ENTITIES: &str = "<!DOCTYPE rdf:RDF [\n\
    <!ENTITY owl \"http://www.w3.org/2002/07/owl#\">\n\
    <!ENTITY rdf \"http://www.w3.org/1999/02/22-rdf-syntax-ns#\">\n\
    <!ENTITY rdfs \"http://www.w3.org/2000/01/rdf-schema#\">\n\
    <!ENTITY xsd \"http://www.w3.org/2001/XMLSchema#\">\n\
]>\n";

const ENVELOPE: &str = "<rdf:RDF xmlns:rdf=\"http://www.w3.org/1999/02/22-rdf-syntax-ns#\" \
    xmlns:rdfs=\"http://www.w3.org/2000/01/rdf-schema#\" \
    xmlns:owl=\"http://www.w3.org/2002/07/owl#\" \
    xmlns:xsd=\"http://www.w3.org/2001/XMLSchema#\">\n";

/// Adds the DOCTYPE and `rdf:RDF` envelope a bare fragment lacks. Returns the
/// prepared text and how many lines were inserted before the original body.
fn prepare(source: &str) -> (String, u32) {
    let body = source.trim_start_matches('\u{feff}');
    let (decl, rest) = match body.trim_start().strip_prefix("<?xml") {
        Some(after) => match after.find("?>") {
            Some(end) => (&after[..end], &after[end + 2..]),
            None => ("", body),
        },
        None => ("", body),
    };
    let mut out = String::new();
    let mut added = 0;
    if !decl.is_empty() {
        out.push_str("<?xml");
        out.push_str(decl);
        out.push_str("?>");
    }
    if !rest.contains("<!DOCTYPE") {
        out.push_str(ENTITIES);
        added += ENTITIES.lines().count() as u32;
    }
    let wrap = !rest.contains("<rdf:RDF");
    if wrap {
        out.push_str(ENVELOPE);
        added += 1;
    }
    out.push_str(rest);
    if wrap {
        out.push_str("\n</rdf:RDF>\n");
    }
    (out, added)
}

/// Reads the supported OWL subset from RDF/XML.
pub fn import_rdfxml(source: &str) -> Result<KnowledgeBase, RdfXmlError> {
    let (text, line_offset) = prepare(source);
    let opts = ParsingOptions {
        allow_dtd: true,
        ..ParsingOptions::default()
    };
    let doc = Document::parse_with_options(&text, opts).map_err(|e| RdfXmlError::Xml(e.to_string()))?;
    let mut imp = Importer {
        doc: &doc,
        b: KnowledgeBase::builder(),
        line_offset,
    };
    let root = doc.root_element();
    if !is(root, RDF, "RDF") {
        return Err(imp.unsupported(root, "document root must be rdf:RDF"));
    }
    for node in elements(root) {
        imp.top_level(node)?;
    }
    Ok(imp.b.build()?)
}

fn is(node: Node, ns: &str, name: &str) -> bool {
    node.is_element() && node.tag_name().namespace() == Some(ns) && node.tag_name().name() == name
}

fn elements<'a, 'i>(node: Node<'a, 'i>) -> impl Iterator<Item = Node<'a, 'i>> {
    node.children().filter(|n| n.is_element())
}

fn qname(node: Node) -> String {
    let tag = node.tag_name();
    let prefix = tag.namespace().and_then(|ns| node.lookup_prefix(ns));
    match prefix {
        Some(p) if !p.is_empty() => format!("{p}:{}", tag.name()),
        _ => tag.name().to_string(),
    }
}

/// Local part of an IRI: after the last `#`, else after the last `/`.
fn local_name(iri: &str) -> &str {
    match iri.rfind('#') {
        Some(i) => &iri[i + 1..],
        None => iri.rsplit('/').next().unwrap_or(iri),
    }
}

fn resource<'a>(node: Node<'a, '_>) -> Option<&'a str> {
    node.attribute((RDF, "resource"))
}

fn subject(node: Node) -> Option<String> {
    node.attribute((RDF, "about"))
        .map(|a| local_name(a).to_string())
        .or_else(|| node.attribute((RDF, "ID")).map(str::to_string))
}

fn about_iri<'a>(node: Node<'a, '_>) -> Option<&'a str> {
    node.attribute((RDF, "about"))
}

struct Importer<'a, 'i> {
    doc: &'a Document<'i>,
    b: KbBuilder,
    line_offset: u32,
}

impl<'a, 'i> Importer<'a, 'i> {
    fn unsupported(&self, node: Node, reason: &str) -> RdfXmlError {
        let pos = self.doc.text_pos_at(node.range().start);
        RdfXmlError::UnsupportedConstruct {
            element: qname(node),
            line: pos.row.saturating_sub(self.line_offset).max(1),
            column: pos.col,
            reason: reason.to_string(),
        }
    }

    fn top_level(&mut self, node: Node) -> Result<(), RdfXmlError> {
        if is(node, OWL, "Class") || is(node, OWL, "Restriction") {
            self.class_frame(node)
        } else if is(node, OWL, "ObjectProperty") {
            self.object_property(node)
        } else if is(node, OWL, "DatatypeProperty") {
            self.data_property(node)
        } else if is(node, OWL, "NamedIndividual") {
            self.individual(node)
        } else if is(node, OWL, "Ontology") {
            Ok(())
        } else {
            Err(self.unsupported(node, "not part of the supported OWL subset"))
        }
    }

    fn label(&mut self, entity: &str, node: Node) {
        let lang = node.attribute((XML, "lang")).unwrap_or("en");
        self.b.label(entity, lang, node.text().unwrap_or("").trim());
    }

    fn named_class(&mut self, iri: &str) -> ConceptExpr {
        match iri.strip_prefix(OWL) {
            Some("Thing") => ConceptExpr::Top,
            Some("Nothing") => ConceptExpr::Bottom,
            _ => {
                let name = local_name(iri);
                self.b.declare_class(name);
                ConceptExpr::atomic(name)
            }
        }
    }

    /// A class given either by `rdf:resource` or by a single nested element.
    fn target(&mut self, node: Node) -> Result<ConceptExpr, RdfXmlError> {
        if let Some(r) = resource(node) {
            return Ok(self.named_class(r));
        }
        let mut kids = elements(node);
        match (kids.next(), kids.next()) {
            (Some(k), None) => self.class_expr(k),
            _ => Err(self.unsupported(node, "expected a resource or exactly one nested class")),
        }
    }

    fn class_frame(&mut self, node: Node) -> Result<(), RdfXmlError> {
        let (lhs, entity) = match about_iri(node).or(node.attribute((RDF, "ID"))) {
            Some(iri) if is(node, OWL, "Class") => {
                let c = self.named_class(iri);
                let entity = c.as_atomic().map(str::to_string);
                (c, entity)
            }
            _ => (self.class_expr(node)?, None),
        };
        for child in elements(node) {
            if is(child, RDFS, "subClassOf") {
                let sup = self.target(child)?;
                self.b.axiom(TBoxAxiom::sub_class(lhs.clone(), sup));
            } else if is(child, OWL, "equivalentClass") {
                let other = self.target(child)?;
                self.b.axiom(TBoxAxiom::EquivalentClasses(lhs.clone(), other));
            } else if is(child, RDFS, "label") {
                match &entity {
                    Some(e) => self.label(e, child),
                    None => return Err(self.unsupported(child, "labels need a named class")),
                }
            } else if entity.is_some() || !is_defining(child) {
                return Err(self.unsupported(child, "not part of the supported OWL subset"));
            }
        }
        Ok(())
    }

    fn property_ref(&mut self, node: Node) -> Result<RoleExpr, RdfXmlError> {
        if let Some(r) = resource(node) {
            return Ok(RoleExpr::named(local_name(r)));
        }
        let inner = elements(node).next().ok_or_else(|| self.unsupported(node, "missing property"))?;
        if is(inner, OWL, "ObjectProperty") {
            if let Some(iri) = about_iri(inner) {
                return Ok(RoleExpr::named(local_name(iri)));
            }
            if let Some(inv) = elements(inner).find(|n| is(*n, OWL, "inverseOf")) {
                return Ok(self.property_ref(inv)?.inverse());
            }
        }
        Err(self.unsupported(inner, "expected a named or inverse object property"))
    }

    fn object_property(&mut self, node: Node) -> Result<(), RdfXmlError> {
        let name = subject(node).ok_or_else(|| self.unsupported(node, "property without rdf:about"))?;
        self.b.declare_role(name.as_str());
        for child in elements(node) {
            if is(child, OWL, "inverseOf") {
                let other = self.property_ref(child)?;
                if other.inverted {
                    return Err(self.unsupported(child, "inverse of an inverse"));
                }
                self.b.rbox_mut().inverse_pairs.insert((name.clone(), other.name));
            } else if is(child, RDF, "type") {
                let t = resource(child).unwrap_or("");
                let rbox = self.b.rbox_mut();
                match t.strip_prefix(OWL) {
                    Some("TransitiveProperty") => rbox.transitive_roles.insert(name.clone()),
                    Some("FunctionalProperty") => rbox.functional_roles.insert(name.clone()),
                    Some("InverseFunctionalProperty") => rbox.inverse_functional_roles.insert(name.clone()),
                    Some("SymmetricProperty") => rbox.symmetric_roles.insert(name.clone()),
                    _ => return Err(self.unsupported(child, &format!("property type `{t}`"))),
                };
            } else if is(child, RDFS, "subPropertyOf") {
                let sup = self.property_ref(child)?;
                self.b.rbox_mut().sub_role_axioms.insert((RoleExpr::named(name.as_str()), sup));
            } else if is(child, RDFS, "domain") {
                let concept = self.target(child)?;
                self.b.axiom(TBoxAxiom::Domain {
                    role: RoleExpr::named(name.as_str()),
                    concept,
                });
            } else if is(child, RDFS, "range") {
                let concept = self.target(child)?;
                self.b.axiom(TBoxAxiom::Range {
                    role: RoleExpr::named(name.as_str()),
                    concept,
                });
            } else if is(child, RDFS, "label") {
                self.label(&name, child);
            } else {
                return Err(self.unsupported(child, "not part of the supported OWL subset"));
            }
        }
        Ok(())
    }

    fn data_property(&mut self, node: Node) -> Result<(), RdfXmlError> {
        let name = subject(node).ok_or_else(|| self.unsupported(node, "property without rdf:about"))?;
        self.b.declare_data_property(name.as_str());
        for child in elements(node) {
            if is(child, RDF, "type") && resource(child) == Some(&format!("{OWL}FunctionalProperty")) {
                self.b.functional_data_property(name.as_str());
            } else if is(child, RDFS, "label") {
                self.label(&name, child);
            } else {
                return Err(self.unsupported(child, "not part of the supported OWL subset"));
            }
        }
        Ok(())
    }

    fn individual(&mut self, node: Node) -> Result<(), RdfXmlError> {
        let name = subject(node).ok_or_else(|| self.unsupported(node, "individual without rdf:about"))?;
        self.b.declare_individual(name.as_str());
        for child in elements(node) {
            let ns = child.tag_name().namespace().unwrap_or("");
            if is(child, RDF, "type") {
                let concept = self.target(child)?;
                self.b.assertion(ABoxAssertion::ClassAssertion {
                    concept,
                    individual: name.clone(),
                });
            } else if is(child, OWL, "sameAs") || is(child, OWL, "differentFrom") {
                let other = resource(child)
                    .map(|r| local_name(r).to_string())
                    .ok_or_else(|| self.unsupported(child, "expected rdf:resource"))?;
                self.b.assertion(if is(child, OWL, "sameAs") {
                    ABoxAssertion::SameAs(name.clone(), other)
                } else {
                    ABoxAssertion::DifferentFrom(name.clone(), other)
                });
            } else if is(child, RDFS, "label") {
                self.label(&name, child);
            } else if ns != RDF && ns != RDFS && ns != OWL && ns != XSD {
                let property = child.tag_name().name().to_string();
                if let Some(obj) = resource(child) {
                    self.b.assertion(ABoxAssertion::RoleAssertion {
                        role: RoleExpr::named(property),
                        subject: name.clone(),
                        object: local_name(obj).to_string(),
                    });
                } else {
                    let value = self.decimal(child)?;
                    self.b.assertion(ABoxAssertion::DataAssertion {
                        property,
                        individual: name.clone(),
                        value,
                    });
                }
            } else {
                return Err(self.unsupported(child, "not part of the supported OWL subset"));
            }
        }
        Ok(())
    }

    fn decimal(&self, node: Node) -> Result<Decimal, RdfXmlError> {
        let text = node.text().unwrap_or("").trim();
        Decimal::from_str(text).map_err(|_| self.unsupported(node, &format!("malformed number `{text}`")))
    }

    fn class_expr(&mut self, node: Node) -> Result<ConceptExpr, RdfXmlError> {
        if is(node, OWL, "Restriction") {
            return self.restriction(node);
        }
        if is(node, OWL, "Class") || is(node, RDF, "Description") {
            if let Some(iri) = about_iri(node) {
                return Ok(self.named_class(iri));
            }
            if let Some(def) = elements(node).find(|n| is_defining(*n)) {
                return self.definition(def);
            }
        }
        Err(self.unsupported(node, "not a class expression"))
    }

    fn definition(&mut self, node: Node) -> Result<ConceptExpr, RdfXmlError> {
        let name = node.tag_name().name();
        match name {
            "intersectionOf" | "unionOf" => {
                let mut ops = Vec::new();
                for k in elements(node) {
                    ops.push(self.class_expr(k)?);
                }
                if ops.is_empty() {
                    return Err(self.unsupported(node, "empty collection"));
                }
                Ok(if name == "intersectionOf" {
                    ConceptExpr::and(ops)
                } else {
                    ConceptExpr::or(ops)
                })
            }
            "complementOf" => Ok(ConceptExpr::not(self.target(node)?)),
            "oneOf" => {
                let mut names = Vec::new();
                for k in elements(node) {
                    let n = subject(k).ok_or_else(|| self.unsupported(k, "oneOf members need rdf:about"))?;
                    names.push(n);
                }
                if names.is_empty() {
                    return Err(self.unsupported(node, "empty oneOf"));
                }
                Ok(ConceptExpr::OneOf(names))
            }
            _ => Err(self.unsupported(node, "not a class constructor")),
        }
    }

    fn restriction(&mut self, node: Node) -> Result<ConceptExpr, RdfXmlError> {
        let on = elements(node)
            .find(|n| is(*n, OWL, "onProperty"))
            .ok_or_else(|| self.unsupported(node, "restriction without owl:onProperty"))?;
        let role = self.property_ref(on)?;
        let mut kids = elements(node).filter(|n| is_defining(*n) && !is(*n, OWL, "onProperty"));
        let (value, extra) = (kids.next(), kids.next());
        let value = match (value, extra) {
            (Some(v), None) => v,
            (None, _) => return Err(self.unsupported(node, "restriction without a value constraint")),
            (Some(_), Some(e)) => return Err(self.unsupported(e, "a restriction takes exactly one constraint")),
        };
        let data_only = |me: &Self, what: &str| {
            if role.inverted {
                Err(me.unsupported(value, &format!("{what} on an inverse property")))
            } else {
                Ok(role.name.clone())
            }
        };
        match value.tag_name().name() {
            "someValuesFrom" if value.tag_name().namespace() == Some(OWL) => {
                if let Some(r) = resource(value) {
                    if r.starts_with(XSD) || r == format!("{RDFS}Literal") {
                        let p = data_only(self, "a datatype")?;
                        self.b.declare_data_property(p.as_str());
                        return Ok(ConceptExpr::DataSome(p, NumericRange::unbounded()));
                    }
                    let filler = self.named_class(r);
                    return Ok(ConceptExpr::Exists(role, Box::new(filler)));
                }
                let inner = elements(value)
                    .next()
                    .ok_or_else(|| self.unsupported(value, "missing filler"))?;
                if is_datatype(inner) {
                    let p = data_only(self, "a datatype")?;
                    self.b.declare_data_property(p.as_str());
                    let range = self.datatype_range(inner)?;
                    Ok(ConceptExpr::DataSome(p, range))
                } else {
                    Ok(ConceptExpr::Exists(role, Box::new(self.class_expr(inner)?)))
                }
            }
            "allValuesFrom" if value.tag_name().namespace() == Some(OWL) => {
                Ok(ConceptExpr::ForAll(role, Box::new(self.target(value)?)))
            }
            "hasValue" if value.tag_name().namespace() == Some(OWL) => match resource(value) {
                Some(r) => Ok(ConceptExpr::HasValue(role, local_name(r).to_string())),
                None => {
                    let p = data_only(self, "a literal value")?;
                    self.b.declare_data_property(p.as_str());
                    Ok(ConceptExpr::DataSome(p, NumericRange::exactly(self.decimal(value)?)))
                }
            },
            "minCardinality" | "maxCardinality" if value.tag_name().namespace() == Some(OWL) => {
                let text = value.text().unwrap_or("").trim();
                let n: u32 = text
                    .parse()
                    .map_err(|_| self.unsupported(value, &format!("malformed cardinality `{text}`")))?;
                Ok(if value.tag_name().name() == "minCardinality" {
                    ConceptExpr::AtLeast(n, role)
                } else {
                    ConceptExpr::AtMost(n, role)
                })
            }
            _ => Err(self.unsupported(value, "not part of the supported OWL subset")),
        }
    }

    fn datatype_range(&mut self, node: Node) -> Result<NumericRange, RdfXmlError> {
        let mut range = NumericRange::unbounded();
        for child in elements(node) {
            if is(child, OWL, "onDatatype") || is(child, RDF, "type") {
                continue;
            }
            if !is(child, OWL, "withRestrictions") {
                return Err(self.unsupported(child, "not part of the supported datatype subset"));
            }
            for desc in elements(child) {
                for facet in elements(desc) {
                    if facet.tag_name().namespace() != Some(XSD) {
                        return Err(self.unsupported(facet, "expected an xsd facet"));
                    }
                    let v = self.decimal(facet)?;
                    let (lower, f) = match facet.tag_name().name() {
                        "minInclusive" => (true, Facet::inclusive(v)),
                        "minExclusive" => (true, Facet::exclusive(v)),
                        "maxInclusive" => (false, Facet::inclusive(v)),
                        "maxExclusive" => (false, Facet::exclusive(v)),
                        _ => return Err(self.unsupported(facet, "unsupported facet")),
                    };
                    if lower && range.lower.is_some() || !lower && range.upper.is_some() {
                        return Err(self.unsupported(facet, "at most one lower and one upper facet"));
                    }
                    range = if lower { range.with_lower(f) } else { range.with_upper(f) };
                }
            }
        }
        Ok(range)
    }
}

fn is_defining(node: Node) -> bool {
    node.tag_name().namespace() == Some(OWL)
        && matches!(
            node.tag_name().name(),
            "intersectionOf" | "unionOf" | "complementOf" | "oneOf" | "onProperty" | "someValuesFrom"
                | "allValuesFrom" | "hasValue" | "minCardinality" | "maxCardinality"
        )
}

fn is_datatype(node: Node) -> bool {
    is(node, RDFS, "Datatype")
        || elements(node).any(|k| {
            is(k, OWL, "onDatatype")
                || is(k, RDF, "type") && resource(k) == Some(&format!("{RDFS}Datatype"))
        })
}
