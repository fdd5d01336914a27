use std::collections::{BTreeMap, BTreeSet};

use rust_decimal::Decimal;

use super::concept::{ConceptExpr, RoleExpr};
use super::ModelError;

/// Terminological axiom. After a [`KnowledgeBase`] is built only
/// `SubClassOf` and `EquivalentClasses` remain; the others are rewritten.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TBoxAxiom {
    SubClassOf { sub: ConceptExpr, sup: ConceptExpr },
    EquivalentClasses(ConceptExpr, ConceptExpr),
    DisjointClasses(ConceptExpr, ConceptExpr),
    Domain { role: RoleExpr, concept: ConceptExpr },
    Range { role: RoleExpr, concept: ConceptExpr },
}

impl TBoxAxiom {
    pub fn sub_class(sub: ConceptExpr, sup: ConceptExpr) -> Self {
        TBoxAxiom::SubClassOf { sub, sup }
    }

    fn concepts(&self) -> [&ConceptExpr; 2] {
        match self {
            TBoxAxiom::SubClassOf { sub, sup } => [sub, sup],
            TBoxAxiom::EquivalentClasses(a, b) | TBoxAxiom::DisjointClasses(a, b) => [a, b],
            TBoxAxiom::Domain { concept, .. } | TBoxAxiom::Range { concept, .. } => [concept, concept],
        }
    }

    /// The load-time rewrite into `SubClassOf`/`EquivalentClasses`.
    pub fn normalized(self) -> TBoxAxiom {
        match self {
            TBoxAxiom::Domain { role, concept } => TBoxAxiom::SubClassOf {
                sub: ConceptExpr::Exists(role, Box::new(ConceptExpr::Top)),
                sup: concept,
            },
            TBoxAxiom::Range { role, concept } => TBoxAxiom::SubClassOf {
                sub: ConceptExpr::Top,
                sup: ConceptExpr::ForAll(role, Box::new(concept)),
            },
            TBoxAxiom::DisjointClasses(a, b) => TBoxAxiom::SubClassOf {
                sub: a,
                sup: ConceptExpr::not(b),
            },
            other => other,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ABoxAssertion {
    ClassAssertion { concept: ConceptExpr, individual: String },
    RoleAssertion { role: RoleExpr, subject: String, object: String },
    DataAssertion { property: String, individual: String, value: Decimal },
    SameAs(String, String),
    DifferentFrom(String, String),
}

/// Role axioms.
///
/// `symmetric_roles`, `equivalent_roles`, `functional_roles` and
/// `inverse_functional_roles` are accepted as input and expanded when the
/// knowledge base is built: symmetric `r` becomes the inverse pair `(r, r)`,
/// equivalence becomes two sub-role axioms, and the functional
/// characteristics become `⊤ ⊑ ≤1 r` / `⊤ ⊑ ≤1 r⁻` in the TBox.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RBox {
    pub sub_role_axioms: BTreeSet<(RoleExpr, RoleExpr)>,
    pub inverse_pairs: BTreeSet<(String, String)>,
    pub transitive_roles: BTreeSet<String>,
    pub functional_roles: BTreeSet<String>,
    pub inverse_functional_roles: BTreeSet<String>,
    pub symmetric_roles: BTreeSet<String>,
    pub equivalent_roles: BTreeSet<(String, String)>,
}

impl RBox {
    /// Role expressions `R` with `role ⊑* R`: the reflexive-transitive closure
    /// of the sub-role and inverse axioms, closed under inversion.
    pub fn super_roles(&self, role: &RoleExpr) -> BTreeSet<RoleExpr> {
        let edges = self.hierarchy_edges();
        let mut seen = BTreeSet::new();
        let mut stack = vec![role.clone()];
        while let Some(r) = stack.pop() {
            if !seen.insert(r.clone()) {
                continue;
            }
            for (sub, sup) in &edges {
                if *sub == r && !seen.contains(sup) {
                    stack.push(sup.clone());
                }
            }
        }
        seen
    }

    /// Direct hierarchy edges including inverse variants.
    pub fn hierarchy_edges(&self) -> Vec<(RoleExpr, RoleExpr)> {
        let mut edges = Vec::new();
        for (sub, sup) in &self.sub_role_axioms {
            edges.push((sub.clone(), sup.clone()));
            edges.push((sub.inverse(), sup.inverse()));
        }
        for (a, b) in &self.inverse_pairs {
            let a = RoleExpr::named(a.as_str());
            let b = RoleExpr::named(b.as_str());
            edges.push((a.clone(), b.inverse()));
            edges.push((b.inverse(), a.clone()));
            edges.push((a.inverse(), b.clone()));
            edges.push((b, a.inverse()));
        }
        edges
    }

    pub fn is_sub_role(&self, sub: &RoleExpr, sup: &RoleExpr) -> bool {
        self.super_roles(sub).contains(sup)
    }

    /// Transitive when the role, or a role equivalent to it, is declared transitive.
    pub fn is_transitive(&self, role: &RoleExpr) -> bool {
        let ups = self.super_roles(role);
        ups.iter()
            .filter(|s| self.transitive_roles.contains(&s.name))
            .any(|s| self.is_sub_role(s, role))
    }

    pub fn role_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for (a, b) in &self.sub_role_axioms {
            out.insert(a.name.clone());
            out.insert(b.name.clone());
        }
        for (a, b) in self.inverse_pairs.iter().chain(&self.equivalent_roles) {
            out.insert(a.clone());
            out.insert(b.clone());
        }
        out.extend(self.transitive_roles.iter().cloned());
        out.extend(self.functional_roles.iter().cloned());
        out.extend(self.inverse_functional_roles.iter().cloned());
        out.extend(self.symmetric_roles.iter().cloned());
        out
    }

    fn normalize(&mut self, tbox: &mut Vec<TBoxAxiom>) {
        for r in std::mem::take(&mut self.symmetric_roles) {
            self.inverse_pairs.insert((r.clone(), r));
        }
        self.inverse_pairs = std::mem::take(&mut self.inverse_pairs)
            .into_iter()
            .map(|(a, b)| if a <= b { (a, b) } else { (b, a) })
            .collect();
        for (a, b) in std::mem::take(&mut self.equivalent_roles) {
            self.sub_role_axioms.insert((RoleExpr::named(a.as_str()), RoleExpr::named(b.as_str())));
            self.sub_role_axioms.insert((RoleExpr::named(b), RoleExpr::named(a)));
        }
        for r in std::mem::take(&mut self.functional_roles) {
            tbox.push(TBoxAxiom::sub_class(ConceptExpr::Top, ConceptExpr::AtMost(1, RoleExpr::named(r))));
        }
        for r in std::mem::take(&mut self.inverse_functional_roles) {
            tbox.push(TBoxAxiom::sub_class(ConceptExpr::Top, ConceptExpr::AtMost(1, RoleExpr::inverse_of(r))));
        }
        // a sub-role axiom on two inverses is stored in its positive-subject form
        self.sub_role_axioms = std::mem::take(&mut self.sub_role_axioms)
            .into_iter()
            .map(|(s, t)| if s.inverted { (s.inverse(), t.inverse()) } else { (s, t) })
            .filter(|(s, t)| s != t)
            .collect();
    }
}

/// A loaded knowledge base: TBox, RBox, ABox, labels and signature.
///
/// Values are immutable once built; use [`KnowledgeBase::to_builder`] to derive
/// a modified copy.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KnowledgeBase {
    tbox: Vec<TBoxAxiom>,
    rbox: RBox,
    abox: Vec<ABoxAssertion>,
    labels: BTreeMap<(String, String), String>,
    concept_names: BTreeSet<String>,
    role_names: BTreeSet<String>,
    individual_names: BTreeSet<String>,
    data_property_names: BTreeSet<String>,
    functional_data_properties: BTreeSet<String>,
}

impl KnowledgeBase {
    pub fn empty() -> Self {
        KnowledgeBase::default()
    }

    pub fn builder() -> KbBuilder {
        KbBuilder::default()
    }

    pub fn to_builder(&self) -> KbBuilder {
        KbBuilder { kb: self.clone() }
    }

    pub fn tbox(&self) -> &[TBoxAxiom] {
        &self.tbox
    }

    pub fn rbox(&self) -> &RBox {
        &self.rbox
    }

    pub fn abox(&self) -> &[ABoxAssertion] {
        &self.abox
    }

    pub fn labels(&self) -> &BTreeMap<(String, String), String> {
        &self.labels
    }

    pub fn concept_names(&self) -> &BTreeSet<String> {
        &self.concept_names
    }

    pub fn role_names(&self) -> &BTreeSet<String> {
        &self.role_names
    }

    pub fn individual_names(&self) -> &BTreeSet<String> {
        &self.individual_names
    }

    pub fn data_property_names(&self) -> &BTreeSet<String> {
        &self.data_property_names
    }

    pub fn functional_data_properties(&self) -> &BTreeSet<String> {
        &self.functional_data_properties
    }

    pub fn is_empty(&self) -> bool {
        self.tbox.is_empty()
            && self.abox.is_empty()
            && self.rbox == RBox::default()
            && self.labels.is_empty()
            && self.concept_names.is_empty()
            && self.role_names.is_empty()
            && self.individual_names.is_empty()
            && self.data_property_names.is_empty()
    }

    /// Number of TBox axioms plus ABox assertions.
    pub fn axiom_count(&self) -> usize {
        self.tbox.len() + self.abox.len()
    }

    /// Display label with fallback: requested language, then `en`, then the raw name.
    pub fn label<'a>(&'a self, entity: &'a str, lang: &str) -> &'a str {
        self.labels
            .get(&(entity.to_string(), lang.to_string()))
            .or_else(|| self.labels.get(&(entity.to_string(), "en".to_string())))
            .map(String::as_str)
            .unwrap_or(entity)
    }

    /// Equality up to axiom order: same TBox and ABox multisets, RBox, labels
    /// and signature.
    pub fn logically_equal(&self, other: &KnowledgeBase) -> bool {
        fn counts<T: std::hash::Hash + Eq>(xs: &[T]) -> std::collections::HashMap<&T, usize> {
            let mut m = std::collections::HashMap::new();
            for x in xs {
                *m.entry(x).or_insert(0) += 1;
            }
            m
        }
        counts(&self.tbox) == counts(&other.tbox)
            && counts(&self.abox) == counts(&other.abox)
            && self.rbox == other.rbox
            && self.labels == other.labels
            && self.concept_names == other.concept_names
            && self.role_names == other.role_names
            && self.individual_names == other.individual_names
            && self.data_property_names == other.data_property_names
            && self.functional_data_properties == other.functional_data_properties
    }

    /// Groups of individuals made equal by `SameAs`, each sorted, singletons omitted.
    pub fn same_as_groups(&self) -> Vec<BTreeSet<String>> {
        let mut groups: Vec<BTreeSet<String>> = Vec::new();
        for a in &self.abox {
            if let ABoxAssertion::SameAs(x, y) = a {
                let hits: Vec<usize> = groups
                    .iter()
                    .enumerate()
                    .filter(|(_, g)| g.contains(x) || g.contains(y))
                    .map(|(i, _)| i)
                    .collect();
                let mut merged: BTreeSet<String> = [x.clone(), y.clone()].into();
                for &i in hits.iter().rev() {
                    merged.extend(groups.remove(i));
                }
                groups.push(merged);
            }
        }
        groups.retain(|g| g.len() > 1);
        groups.sort();
        groups
    }
}

/// Accumulates axioms; [`KbBuilder::build`] applies the load-time rewrites and
/// validates the result.
#[derive(Debug, Clone, Default)]
pub struct KbBuilder {
    kb: KnowledgeBase,
}

impl KbBuilder {
    pub fn axiom(&mut self, ax: TBoxAxiom) -> &mut Self {
        self.kb.tbox.push(ax);
        self
    }

    pub fn assertion(&mut self, a: ABoxAssertion) -> &mut Self {
        self.kb.abox.push(a);
        self
    }

    pub fn rbox_mut(&mut self) -> &mut RBox {
        &mut self.kb.rbox
    }

    pub fn label(&mut self, entity: impl Into<String>, lang: impl Into<String>, text: impl Into<String>) -> &mut Self {
        self.kb.labels.insert((entity.into(), lang.into()), text.into());
        self
    }

    pub fn declare_class(&mut self, name: impl Into<String>) -> &mut Self {
        self.kb.concept_names.insert(name.into());
        self
    }

    pub fn declare_role(&mut self, name: impl Into<String>) -> &mut Self {
        self.kb.role_names.insert(name.into());
        self
    }

    pub fn declare_individual(&mut self, name: impl Into<String>) -> &mut Self {
        self.kb.individual_names.insert(name.into());
        self
    }

    pub fn declare_data_property(&mut self, name: impl Into<String>) -> &mut Self {
        self.kb.data_property_names.insert(name.into());
        self
    }

    pub fn functional_data_property(&mut self, name: impl Into<String>) -> &mut Self {
        let name = name.into();
        self.kb.data_property_names.insert(name.clone());
        self.kb.functional_data_properties.insert(name);
        self
    }

    pub fn build(&self) -> Result<KnowledgeBase, ModelError> {
        let mut kb = self.kb.clone();
        let tbox = std::mem::take(&mut kb.tbox);
        kb.tbox = tbox.into_iter().map(TBoxAxiom::normalized).collect();
        let mut tbox = std::mem::take(&mut kb.tbox);
        kb.rbox.normalize(&mut tbox);
        kb.tbox = tbox;

        kb.abox = std::mem::take(&mut kb.abox)
            .into_iter()
            .map(|a| match a {
                ABoxAssertion::RoleAssertion { role, subject, object } if role.inverted => ABoxAssertion::RoleAssertion {
                    role: role.inverse(),
                    subject: object,
                    object: subject,
                },
                other => other,
            })
            .collect();

        // signature: auto-declare on first use
        for ax in kb.tbox.clone() {
            for c in ax.concepts() {
                declare_from(&mut kb, c);
            }
        }
        for r in kb.rbox.role_names() {
            kb.role_names.insert(r);
        }
        for a in kb.abox.clone() {
            match &a {
                ABoxAssertion::ClassAssertion { concept, individual } => {
                    declare_from(&mut kb, concept);
                    kb.individual_names.insert(individual.clone());
                }
                ABoxAssertion::RoleAssertion { role, subject, object } => {
                    kb.role_names.insert(role.name.clone());
                    kb.individual_names.insert(subject.clone());
                    kb.individual_names.insert(object.clone());
                }
                ABoxAssertion::DataAssertion { property, individual, .. } => {
                    kb.data_property_names.insert(property.clone());
                    kb.individual_names.insert(individual.clone());
                }
                ABoxAssertion::SameAs(x, y) => {
                    kb.individual_names.insert(x.clone());
                    kb.individual_names.insert(y.clone());
                }
                ABoxAssertion::DifferentFrom(x, y) => {
                    if x == y {
                        return Err(ModelError::ReflexiveDifferentFrom(x.clone()));
                    }
                    kb.individual_names.insert(x.clone());
                    kb.individual_names.insert(y.clone());
                }
            }
        }

        if let Some(name) = kb.role_names.intersection(&kb.data_property_names).next() {
            return Err(ModelError::NameKindConflict(name.clone()));
        }

        // nominals may only name declared individuals; the declaration has to
        // come from somewhere other than the nominal itself
        let mut nominal_refs = Vec::new();
        for ax in &kb.tbox {
            for c in ax.concepts() {
                nominal_refs.extend(c.individuals().into_iter().map(str::to_owned));
            }
        }
        for a in &kb.abox {
            if let ABoxAssertion::ClassAssertion { concept, .. } = a {
                nominal_refs.extend(concept.individuals().into_iter().map(str::to_owned));
            }
        }
        for i in nominal_refs {
            if !kb.individual_names.contains(&i) {
                return Err(ModelError::UndeclaredNominal(i));
            }
        }

        let mut seen = std::collections::HashSet::new();
        kb.tbox.retain(|ax| seen.insert(ax.clone()));
        let mut seen = std::collections::HashSet::new();
        kb.abox.retain(|a| seen.insert(a.clone()));
        Ok(kb)
    }
}

fn declare_from(kb: &mut KnowledgeBase, c: &ConceptExpr) {
    for n in c.concept_names() {
        kb.concept_names.insert(n.to_owned());
    }
    for r in c.roles() {
        kb.role_names.insert(r.name.clone());
    }
    for p in c.data_properties() {
        kb.data_property_names.insert(p.to_owned());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(n: &str) -> ConceptExpr {
        ConceptExpr::atomic(n)
    }

    #[test]
    fn load_rewrites_domain_range_disjoint() {
        let mut b = KnowledgeBase::builder();
        b.axiom(TBoxAxiom::Domain {
            role: RoleExpr::named("r"),
            concept: a("C"),
        })
        .axiom(TBoxAxiom::Range {
            role: RoleExpr::named("r"),
            concept: a("D"),
        })
        .axiom(TBoxAxiom::DisjointClasses(a("Male"), a("Female")));
        let kb = b.build().unwrap();
        assert!(kb
            .tbox()
            .iter()
            .all(|ax| matches!(ax, TBoxAxiom::SubClassOf { .. } | TBoxAxiom::EquivalentClasses(..))));
        assert!(kb.tbox().contains(&TBoxAxiom::sub_class(a("Male"), ConceptExpr::not(a("Female")))));
        assert!(kb.tbox().contains(&TBoxAxiom::sub_class(
            ConceptExpr::some("r", ConceptExpr::Top),
            a("C")
        )));
        assert!(kb.concept_names().contains("Female"));
        assert!(kb.role_names().contains("r"));
    }

    #[test]
    fn rbox_characteristics_expand() {
        let mut b = KnowledgeBase::builder();
        b.rbox_mut().symmetric_roles.insert("isSiblingOf".into());
        b.rbox_mut().functional_roles.insert("hasMother".into());
        b.rbox_mut().equivalent_roles.insert(("cost".into(), "price".into()));
        let kb = b.build().unwrap();
        let rb = kb.rbox();
        assert!(rb.symmetric_roles.is_empty() && rb.functional_roles.is_empty());
        let sib = RoleExpr::named("isSiblingOf");
        assert!(rb.is_sub_role(&sib, &sib.inverse()));
        assert!(rb.is_sub_role(&RoleExpr::named("cost"), &RoleExpr::named("price")));
        assert!(rb.is_sub_role(&RoleExpr::named("price"), &RoleExpr::named("cost")));
        assert!(kb
            .tbox()
            .contains(&TBoxAxiom::sub_class(ConceptExpr::Top, ConceptExpr::AtMost(1, "hasMother".into()))));
    }

    #[test]
    fn role_hierarchy_closure_is_idempotent_and_inverse_closed() {
        let mut rb = RBox::default();
        rb.sub_role_axioms.insert(("hasDaughter".into(), "hasChild".into()));
        rb.inverse_pairs.insert(("hasChild".into(), "hasParent".into()));
        let d = RoleExpr::named("hasDaughter");
        let ups = rb.super_roles(&d);
        assert!(ups.contains(&RoleExpr::inverse_of("hasParent")));
        let again: BTreeSet<_> = ups.iter().flat_map(|r| rb.super_roles(r)).collect();
        assert_eq!(ups, again);
        assert!(rb.is_sub_role(&d.inverse(), &RoleExpr::named("hasParent")));
    }

    #[test]
    fn transitivity_through_equivalence() {
        let mut rb = RBox::default();
        rb.transitive_roles.insert("hasLocation".into());
        rb.inverse_pairs.insert(("hasLocation".into(), "isLocationOf".into()));
        assert!(rb.is_transitive(&RoleExpr::named("isLocationOf")));
        assert!(rb.is_transitive(&RoleExpr::inverse_of("hasLocation")));
    }

    #[test]
    fn different_from_self_is_rejected() {
        let mut b = KnowledgeBase::builder();
        b.assertion(ABoxAssertion::DifferentFrom("a".into(), "a".into()));
        assert_eq!(b.build(), Err(ModelError::ReflexiveDifferentFrom("a".into())));
    }

    #[test]
    fn nominal_over_undeclared_individual_is_rejected() {
        let mut b = KnowledgeBase::builder();
        b.axiom(TBoxAxiom::sub_class(a("A"), ConceptExpr::has_value("r", "ghost")));
        assert_eq!(b.build(), Err(ModelError::UndeclaredNominal("ghost".into())));
        b.declare_individual("ghost");
        assert!(b.build().is_ok());
    }

    #[test]
    fn label_fallback() {
        let mut b = KnowledgeBase::builder();
        b.label("WetSurfaceDanger", "en", "Wet surface")
            .label("LowFrictionDanger", "pl", "ŚliskaNawierzchnia");
        let kb = b.build().unwrap();
        assert_eq!(kb.label("WetSurfaceDanger", "pl"), "Wet surface");
        assert_eq!(kb.label("LowFrictionDanger", "pl"), "ŚliskaNawierzchnia");
        assert_eq!(kb.label("LowFrictionDanger", "en"), "LowFrictionDanger");
    }

    #[test]
    fn inverted_role_assertions_are_flipped() {
        let mut b = KnowledgeBase::builder();
        b.assertion(ABoxAssertion::RoleAssertion {
            role: RoleExpr::inverse_of("hasLocation"),
            subject: "Szpitalna".into(),
            object: "c30-020".into(),
        });
        let kb = b.build().unwrap();
        assert_eq!(
            kb.abox()[0],
            ABoxAssertion::RoleAssertion {
                role: RoleExpr::named("hasLocation"),
                subject: "c30-020".into(),
                object: "Szpitalna".into()
            }
        );
    }
}
