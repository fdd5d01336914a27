use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::is_bare_name;
use crate::model::{ABoxAssertion, ConceptExpr, KnowledgeBase, RoleExpr, TBoxAxiom};

const HEADER: &str = "# trafficdl knowledge base\n";

/// Writes a name bare when possible, otherwise quoted.
pub fn write_name(name: &str) -> String {
    if is_bare_name(name) {
        name.to_string()
    } else {
        quote(name)
    }
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

pub fn write_role(r: &RoleExpr) -> String {
    if r.inverted {
        format!("inverse({})", write_name(&r.name))
    } else {
        write_name(&r.name)
    }
}

// Binding strength: or < and < unary (not, restrictions) < atoms.
fn level(c: &ConceptExpr) -> u8 {
    match c {
        ConceptExpr::Or(_) => 1,
        ConceptExpr::And(_) => 2,
        ConceptExpr::Not(_)
        | ConceptExpr::Exists(..)
        | ConceptExpr::ForAll(..)
        | ConceptExpr::AtLeast(..)
        | ConceptExpr::AtMost(..)
        | ConceptExpr::HasValue(..)
        | ConceptExpr::DataSome(..) => 3,
        _ => 4,
    }
}

/// Renders a class expression in the native syntax. Nested conjunctions and
/// disjunctions keep their parentheses so parsing restores the same tree.
pub fn write_concept(c: &ConceptExpr) -> String {
    let mut out = String::new();
    write_at(c, 0, &mut out);
    out
}

fn write_at(c: &ConceptExpr, min_level: u8, out: &mut String) {
    let paren = level(c) < min_level;
    if paren {
        out.push('(');
    }
    match c {
        ConceptExpr::Top => out.push_str("Thing"),
        ConceptExpr::Bottom => out.push_str("Nothing"),
        ConceptExpr::Atomic(n) => out.push_str(&write_name(n)),
        ConceptExpr::Not(inner) => {
            out.push_str("not ");
            write_at(inner, 3, out);
        }
        ConceptExpr::And(cs) | ConceptExpr::Or(cs) => {
            let (sep, sub) = if matches!(c, ConceptExpr::And(_)) {
                (" and ", 3)
            } else {
                (" or ", 2)
            };
            for (i, op) in cs.iter().enumerate() {
                if i > 0 {
                    out.push_str(sep);
                }
                write_at(op, sub, out);
            }
        }
        ConceptExpr::Exists(r, f) | ConceptExpr::ForAll(r, f) => {
            let word = if matches!(c, ConceptExpr::Exists(..)) { "some" } else { "only" };
            let _ = write!(out, "{} {word} ", write_role(r));
            write_at(f, 3, out);
        }
        ConceptExpr::AtLeast(n, r) => {
            let _ = write!(out, "{} min {n}", write_role(r));
        }
        ConceptExpr::AtMost(n, r) => {
            let _ = write!(out, "{} max {n}", write_role(r));
        }
        ConceptExpr::HasValue(r, i) => {
            let _ = write!(out, "{} value {}", write_role(r), write_name(i));
        }
        ConceptExpr::OneOf(is) => {
            let names: Vec<String> = is.iter().map(|i| write_name(i)).collect();
            let _ = write!(out, "{{{}}}", names.join(", "));
        }
        ConceptExpr::DataSome(p, range) => {
            let _ = write!(out, "{} some {range}", write_name(p));
        }
    }
    if paren {
        out.push(')');
    }
}

/// Deterministic text rendering: frames grouped by entity kind and sorted by
/// name, axioms inside a frame in insertion order, and axioms without an
/// atomic left side emitted last as `GeneralAxiom:` frames.
pub fn serialize_text(kb: &KnowledgeBase) -> String {
    let mut out = String::from(HEADER);

    let mut labels: BTreeMap<&str, Vec<(&str, &str)>> = BTreeMap::new();
    for ((entity, lang), text) in kb.labels() {
        labels.entry(entity).or_default().push((lang, text));
    }
    let mut frame = |out: &mut String, kind: &str, name: &str| {
        let _ = writeln!(out, "\n{kind}: {}", write_name(name));
        if let Some(ls) = labels.remove(name) {
            let parts: Vec<String> = ls.iter().map(|(lang, text)| format!("label {}@{lang}", quote(text))).collect();
            let _ = writeln!(out, "    Annotations: {}", parts.join(", "));
        }
    };

    let rbox = kb.rbox();
    for r in kb.role_names() {
        frame(&mut out, "ObjectProperty", r);
        for (sub, sup) in &rbox.sub_role_axioms {
            if sub.name == *r && !sub.inverted {
                let _ = writeln!(out, "    SubPropertyOf: {}", write_role(sup));
            }
        }
        for (a, b) in &rbox.inverse_pairs {
            if a == r && b == r {
                out.push_str("    Characteristics: Symmetric\n");
            } else if a == r {
                let _ = writeln!(out, "    InverseOf: {}", write_name(b));
            }
        }
        if rbox.transitive_roles.contains(r) {
            out.push_str("    Characteristics: Transitive\n");
        }
    }

    for p in kb.data_property_names() {
        frame(&mut out, "DataProperty", p);
        if kb.functional_data_properties().contains(p) {
            out.push_str("    Characteristics: Functional\n");
        }
    }

    let mut general = Vec::new();
    let mut by_class: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    for ax in kb.tbox() {
        match ax {
            TBoxAxiom::SubClassOf { sub: ConceptExpr::Atomic(a), sup } => by_class
                .entry(a)
                .or_default()
                .push(format!("SubClassOf: {}", write_concept(sup))),
            TBoxAxiom::EquivalentClasses(ConceptExpr::Atomic(a), other) => by_class
                .entry(a)
                .or_default()
                .push(format!("EquivalentTo: {}", write_concept(other))),
            other => general.push(other),
        }
    }
    for c in kb.concept_names() {
        frame(&mut out, "Class", c);
        for line in by_class.remove(c.as_str()).unwrap_or_default() {
            let _ = writeln!(out, "    {line}");
        }
    }

    let mut by_ind: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    for a in kb.abox() {
        let (who, line) = match a {
            ABoxAssertion::ClassAssertion { concept, individual } => {
                (individual, format!("Types: {}", write_concept(concept)))
            }
            ABoxAssertion::RoleAssertion { role, subject, object } => {
                (subject, format!("Facts: {} {}", write_role(role), write_name(object)))
            }
            ABoxAssertion::DataAssertion {
                property,
                individual,
                value,
            } => (individual, format!("Facts: {} {value}", write_name(property))),
            ABoxAssertion::SameAs(x, y) => (x, format!("SameAs: {}", write_name(y))),
            ABoxAssertion::DifferentFrom(x, y) => (x, format!("DifferentFrom: {}", write_name(y))),
        };
        by_ind.entry(who).or_default().push(line);
    }
    for i in kb.individual_names() {
        frame(&mut out, "Individual", i);
        for line in by_ind.remove(i.as_str()).unwrap_or_default() {
            let _ = writeln!(out, "    {line}");
        }
    }

    for ax in general {
        let (l, kw, r) = match ax {
            TBoxAxiom::SubClassOf { sub, sup } => (sub, "SubClassOf", sup),
            TBoxAxiom::EquivalentClasses(a, b) => (a, "EquivalentTo", b),
            TBoxAxiom::DisjointClasses(a, b) => (a, "DisjointWith", b),
            // a built knowledge base never holds these
            TBoxAxiom::Domain { .. } | TBoxAxiom::Range { .. } => continue,
        };
        let _ = writeln!(out, "\nGeneralAxiom: {} {kw}: {}", write_concept(l), write_concept(r));
    }
    out
}
