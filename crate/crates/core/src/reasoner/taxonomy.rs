//! The inferred class hierarchy and the traversals that build and query it.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use super::{QueryAnswer, Reasoner, ReasonerError};
use crate::model::{told_subsumers, ConceptExpr};

pub type GroupId = usize;

/// Equivalence groups of class names linked by direct subsumption. Group 0 is
/// `Thing`, group 1 is `Nothing`; either may hold declared names too.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Taxonomy {
    groups: Vec<BTreeSet<String>>,
    parents: Vec<BTreeSet<GroupId>>,
    children: Vec<BTreeSet<GroupId>>,
    group_of: BTreeMap<String, GroupId>,
}

impl Default for Taxonomy {
    fn default() -> Self {
        Taxonomy {
            groups: vec![BTreeSet::new(), BTreeSet::new()],
            parents: vec![BTreeSet::new(), [Self::TOP].into()],
            children: vec![[Self::BOTTOM].into(), BTreeSet::new()],
            group_of: BTreeMap::new(),
        }
    }
}

impl Taxonomy {
    pub const TOP: GroupId = 0;
    pub const BOTTOM: GroupId = 1;

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.group_of.is_empty()
    }

    pub fn group_ids(&self) -> impl Iterator<Item = GroupId> {
        0..self.groups.len()
    }

    pub fn names(&self, g: GroupId) -> &BTreeSet<String> {
        &self.groups[g]
    }

    pub fn parents(&self, g: GroupId) -> &BTreeSet<GroupId> {
        &self.parents[g]
    }

    pub fn children(&self, g: GroupId) -> &BTreeSet<GroupId> {
        &self.children[g]
    }

    pub fn group_of(&self, name: &str) -> Option<GroupId> {
        self.group_of.get(name).copied()
    }

    /// Display name of a group: `Thing`, `Nothing`, or its smallest member.
    pub fn display_name(&self, g: GroupId) -> String {
        match g {
            Self::TOP => "Thing".into(),
            Self::BOTTOM => "Nothing".into(),
            _ => self.groups[g].iter().next().cloned().unwrap_or_default(),
        }
    }

    /// Strict descendants of `g`.
    pub fn descendants(&self, g: GroupId) -> BTreeSet<GroupId> {
        self.closure(g, &self.children)
    }

    /// Strict ancestors of `g`.
    pub fn ancestors(&self, g: GroupId) -> BTreeSet<GroupId> {
        self.closure(g, &self.parents)
    }

    fn closure(&self, g: GroupId, next: &[BTreeSet<GroupId>]) -> BTreeSet<GroupId> {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<GroupId> = next[g].iter().copied().collect();
        while let Some(x) = stack.pop() {
            if seen.insert(x) {
                stack.extend(next[x].iter().copied());
            }
        }
        seen
    }

    /// Is `sub` below or equal to `sup` in the hierarchy?
    pub fn is_subclass(&self, sub: &str, sup: &str) -> bool {
        match (self.group_of(sub), self.group_of(sup)) {
            (Some(a), Some(b)) => a == b || b == Self::TOP || a == Self::BOTTOM || self.ancestors(a).contains(&b),
            _ => false,
        }
    }

    pub fn equivalents(&self, name: &str) -> BTreeSet<String> {
        self.group_of(name).map(|g| self.groups[g].clone()).unwrap_or_default()
    }

    pub fn direct_superclasses(&self, name: &str) -> BTreeSet<String> {
        self.group_of(name).map(|g| self.names_of(&self.parents[g])).unwrap_or_default()
    }

    pub fn direct_subclasses(&self, name: &str) -> BTreeSet<String> {
        self.group_of(name).map(|g| self.names_of(&self.children[g])).unwrap_or_default()
    }

    /// Names in strictly lower groups, `Nothing`'s members included.
    pub fn all_subclasses(&self, name: &str) -> BTreeSet<String> {
        self.group_of(name).map(|g| self.names_of(&self.descendants(g))).unwrap_or_default()
    }

    fn names_of(&self, gs: &BTreeSet<GroupId>) -> BTreeSet<String> {
        gs.iter().flat_map(|&g| self.groups[g].iter().cloned()).collect()
    }

    /// Direct edges as `(child, parent)` group pairs.
    pub fn edges(&self) -> Vec<(GroupId, GroupId)> {
        let mut out = Vec::new();
        for (c, ps) in self.parents.iter().enumerate() {
            out.extend(ps.iter().map(|&p| (c, p)));
        }
        out
    }

    /// Named pairs `(sub, sup)` with `sub ⊑ sup`, `sub ≠ sup`, over declared names.
    pub fn subsumption_pairs(&self) -> BTreeSet<(String, String)> {
        let mut out = BTreeSet::new();
        for (a, _) in &self.group_of {
            for (b, _) in &self.group_of {
                if a != b && self.is_subclass(a, b) {
                    out.insert((a.clone(), b.clone()));
                }
            }
        }
        out
    }

    /// Indented tree rendering; groups with several parents repeat.
    pub fn render_tree(&self) -> String {
        let mut out = String::new();
        self.render(Self::TOP, 0, &mut out);
        out
    }

    fn render(&self, g: GroupId, depth: usize, out: &mut String) {
        let mut line = self.display_name(g);
        let extra: Vec<&String> = match g {
            Self::TOP | Self::BOTTOM => self.groups[g].iter().collect(),
            _ => self.groups[g].iter().skip(1).collect(),
        };
        for e in extra {
            line.push_str(" ≡ ");
            line.push_str(e);
        }
        out.push_str(&"  ".repeat(depth));
        out.push_str(&line);
        out.push('\n');
        let mut kids: Vec<GroupId> = self.children[g].iter().copied().filter(|&c| c != Self::BOTTOM).collect();
        kids.sort_by_key(|&c| self.display_name(c));
        for c in kids {
            self.render(c, depth + 1, out);
        }
        if g == Self::TOP && !self.groups[Self::BOTTOM].is_empty() {
            self.render_bottom(depth + 1, out);
        }
    }

    fn render_bottom(&self, depth: usize, out: &mut String) {
        out.push_str(&"  ".repeat(depth));
        out.push_str("Nothing");
        for e in &self.groups[Self::BOTTOM] {
            out.push_str(" ≡ ");
            out.push_str(e);
        }
        out.push('\n');
    }

    fn add_group(&mut self, name: &str, parents: &BTreeSet<GroupId>, children: &BTreeSet<GroupId>) -> GroupId {
        let g = self.groups.len();
        self.groups.push([name.to_string()].into());
        self.parents.push(parents.clone());
        self.children.push(children.clone());
        self.group_of.insert(name.to_string(), g);
        for &p in parents {
            for &c in children {
                self.children[p].remove(&c);
                self.parents[c].remove(&p);
            }
            self.children[p].insert(g);
        }
        for &c in children {
            self.parents[c].insert(g);
        }
        g
    }

    fn join(&mut self, g: GroupId, name: &str) {
        self.groups[g].insert(name.to_string());
        self.group_of.insert(name.to_string(), g);
    }
}

/// Subsumption tests against taxonomy groups for one concept being placed.
struct Placement<'a> {
    reasoner: &'a Reasoner,
    tax: &'a Taxonomy,
    concept: ConceptExpr,
    told: BTreeSet<String>,
    /// `concept ⊑ group`
    below: HashMap<GroupId, bool>,
    /// `group ⊑ concept`
    above: HashMap<GroupId, bool>,
}

impl<'a> Placement<'a> {
    fn new(reasoner: &'a Reasoner, tax: &'a Taxonomy, concept: ConceptExpr, told: BTreeSet<String>) -> Self {
        Placement {
            reasoner,
            tax,
            concept,
            told,
            below: HashMap::new(),
            above: HashMap::new(),
        }
    }

    fn representative(&self, g: GroupId) -> ConceptExpr {
        match g {
            Taxonomy::TOP => ConceptExpr::Top,
            Taxonomy::BOTTOM => ConceptExpr::Bottom,
            _ => ConceptExpr::atomic(self.tax.groups[g].iter().next().expect("nonempty group").clone()),
        }
    }

    fn is_below(&mut self, g: GroupId) -> Result<bool, ReasonerError> {
        if g == Taxonomy::TOP {
            return Ok(true);
        }
        if let Some(&v) = self.below.get(&g) {
            return Ok(v);
        }
        let v = self.tax.groups[g].iter().any(|n| self.told.contains(n))
            || self.reasoner.subsumes(&self.representative(g), &self.concept)?;
        self.below.insert(g, v);
        Ok(v)
    }

    fn is_above(&mut self, g: GroupId) -> Result<bool, ReasonerError> {
        if g == Taxonomy::BOTTOM {
            return Ok(true);
        }
        if let Some(&v) = self.above.get(&g) {
            return Ok(v);
        }
        let v = self.reasoner.subsumes(&self.concept, &self.representative(g))?;
        self.above.insert(g, v);
        Ok(v)
    }

    /// Most specific groups subsuming the concept.
    fn top_search(&mut self) -> Result<BTreeSet<GroupId>, ReasonerError> {
        let mut result = BTreeSet::new();
        let mut visited = BTreeSet::new();
        let mut stack = vec![Taxonomy::TOP];
        while let Some(g) = stack.pop() {
            if !visited.insert(g) {
                continue;
            }
            let mut any = false;
            for &c in &self.tax.children[g] {
                if c != Taxonomy::BOTTOM && self.is_below(c)? {
                    any = true;
                    stack.push(c);
                }
            }
            if !any {
                result.insert(g);
            }
        }
        // a group reached by a more specific path is not most specific
        let all: Vec<GroupId> = result.iter().copied().collect();
        for g in all {
            if self.tax.descendants(g).iter().any(|d| result.contains(d)) {
                result.remove(&g);
            }
        }
        Ok(result)
    }

    /// Most general groups subsumed by the concept, restricted to groups
    /// lying under every element of `uppers`.
    fn bottom_search(&mut self, uppers: &BTreeSet<GroupId>) -> Result<BTreeSet<GroupId>, ReasonerError> {
        let mut allowed: Option<BTreeSet<GroupId>> = None;
        for &u in uppers {
            let d = self.tax.descendants(u);
            allowed = Some(match allowed {
                None => d,
                Some(a) => a.intersection(&d).copied().collect(),
            });
        }
        let allowed = allowed.unwrap_or_default();
        let mut result = BTreeSet::new();
        let mut visited = BTreeSet::new();
        let mut stack = vec![Taxonomy::BOTTOM];
        while let Some(g) = stack.pop() {
            if !visited.insert(g) {
                continue;
            }
            let mut any = false;
            for &p in &self.tax.parents[g] {
                if allowed.contains(&p) && p != Taxonomy::TOP && self.is_above(p)? {
                    any = true;
                    stack.push(p);
                }
            }
            if !any {
                result.insert(g);
            }
        }
        let all: Vec<GroupId> = result.iter().copied().collect();
        for g in all {
            if self.tax.ancestors(g).iter().any(|a| result.contains(a)) {
                result.remove(&g);
            }
        }
        Ok(result)
    }
}

enum Slot {
    Equivalent(GroupId),
    Between(BTreeSet<GroupId>, BTreeSet<GroupId>),
}

fn place(p: &mut Placement<'_>) -> Result<Slot, ReasonerError> {
    let uppers = p.top_search()?;
    for &u in &uppers {
        if p.is_above(u)? {
            return Ok(Slot::Equivalent(u));
        }
    }
    let lowers = p.bottom_search(&uppers)?;
    Ok(Slot::Between(uppers, lowers))
}

pub(super) fn classify(reasoner: &Reasoner) -> Result<Taxonomy, ReasonerError> {
    let kb = reasoner.kb();
    let mut tax = Taxonomy::default();
    let mut order: Vec<(usize, &String, BTreeSet<String>)> = kb
        .concept_names()
        .iter()
        .map(|n| {
            let told = told_subsumers(n, kb);
            (told.len(), n, told)
        })
        .collect();
    // told-general classes first keeps most insertions on the top-down path
    order.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(b.1)));
    for (_, name, told) in order {
        let concept = ConceptExpr::atomic(name.clone());
        if !reasoner.is_satisfiable(&concept)? {
            tax.join(Taxonomy::BOTTOM, name);
            continue;
        }
        let slot = {
            let mut p = Placement::new(reasoner, &tax, concept, told);
            place(&mut p)?
        };
        match slot {
            Slot::Equivalent(g) => tax.join(g, name),
            Slot::Between(uppers, lowers) => {
                tax.add_group(name, &uppers, &lowers);
            }
        }
    }
    Ok(tax)
}

pub(super) fn realize(reasoner: &Reasoner, tax: &Taxonomy) -> Result<BTreeMap<String, BTreeSet<String>>, ReasonerError> {
    let kb = reasoner.kb();
    let mut told: BTreeMap<&str, BTreeSet<GroupId>> = BTreeMap::new();
    for a in kb.abox() {
        if let crate::model::ABoxAssertion::ClassAssertion {
            concept: ConceptExpr::Atomic(c),
            individual,
        } = a
        {
            if let Some(g) = tax.group_of(c) {
                let entry = told.entry(individual.as_str()).or_default();
                entry.insert(g);
                entry.extend(tax.ancestors(g));
            }
        }
    }
    let mut out = BTreeMap::new();
    for x in kb.individual_names() {
        let known = told.get(x.as_str()).cloned().unwrap_or_default();
        let mut memo: HashMap<GroupId, bool> = HashMap::new();
        let mut member = |g: GroupId| -> Result<bool, ReasonerError> {
            if g == Taxonomy::TOP || known.contains(&g) {
                return Ok(true);
            }
            if let Some(&v) = memo.get(&g) {
                return Ok(v);
            }
            let name = tax.groups[g].iter().next().expect("nonempty group").clone();
            let v = reasoner.is_instance(x, &ConceptExpr::atomic(name))?;
            memo.insert(g, v);
            Ok(v)
        };
        let mut most_specific = BTreeSet::new();
        let mut visited = BTreeSet::new();
        let mut stack = vec![Taxonomy::TOP];
        while let Some(g) = stack.pop() {
            if !visited.insert(g) {
                continue;
            }
            let mut any = false;
            for &c in &tax.children[g] {
                if c != Taxonomy::BOTTOM && member(c)? {
                    any = true;
                    stack.push(c);
                }
            }
            if !any && g != Taxonomy::TOP {
                most_specific.insert(g);
            }
        }
        let snapshot: Vec<GroupId> = most_specific.iter().copied().collect();
        for g in snapshot {
            if tax.descendants(g).iter().any(|d| most_specific.contains(d)) {
                most_specific.remove(&g);
            }
        }
        let names = most_specific
            .iter()
            .filter_map(|&g| tax.groups[g].iter().next().cloned())
            .collect();
        out.insert(x.clone(), names);
    }
    Ok(out)
}

pub(super) fn dl_query(reasoner: &Reasoner, tax: &Taxonomy, c: &ConceptExpr) -> Result<QueryAnswer, ReasonerError> {
    let own: BTreeSet<String> = c.as_atomic().map(|n| [n.to_string()].into()).unwrap_or_default();
    let named = |gs: &BTreeSet<GroupId>| -> BTreeSet<String> {
        gs.iter().flat_map(|&g| tax.groups[g].iter().cloned()).collect()
    };
    if !reasoner.is_satisfiable(c)? {
        let bottom: BTreeSet<GroupId> = [Taxonomy::BOTTOM].into();
        let mut equivalents = named(&bottom);
        equivalents.extend(own);
        return Ok(QueryAnswer {
            equivalents,
            direct_subclasses: BTreeSet::new(),
            all_subclasses: named(&bottom),
            direct_superclasses: named(&tax.parents[Taxonomy::BOTTOM]),
            instances: BTreeSet::new(),
        });
    }
    let slot = {
        let mut p = Placement::new(reasoner, tax, c.clone(), BTreeSet::new());
        place(&mut p)?
    };
    let without_bottom = |mut gs: BTreeSet<GroupId>| {
        gs.remove(&Taxonomy::BOTTOM);
        gs
    };
    let mut answer = match slot {
        Slot::Equivalent(g) => QueryAnswer {
            equivalents: &tax.groups[g] | &own,
            direct_subclasses: named(&without_bottom(tax.children[g].clone())),
            all_subclasses: named(&without_bottom(tax.descendants(g))),
            direct_superclasses: named(&tax.parents[g]),
            instances: BTreeSet::new(),
        },
        Slot::Between(uppers, lowers) => {
            let lowers = without_bottom(lowers);
            let mut all = lowers.clone();
            for &l in &lowers {
                all.extend(tax.descendants(l));
            }
            QueryAnswer {
                equivalents: own,
                direct_subclasses: named(&lowers),
                all_subclasses: named(&without_bottom(all)),
                direct_superclasses: named(&uppers),
                instances: BTreeSet::new(),
            }
        }
    };
    answer.instances = reasoner.instances_of(c)?;
    Ok(answer)
}
