//! Compiled form of a knowledge base: interned NNF concepts, the role
//! hierarchy, and the TBox split into unfoldable and global parts.

use std::collections::{BTreeSet, HashMap, HashSet};

use rust_decimal::Decimal;

use crate::model::{ABoxAssertion, ConceptExpr, KnowledgeBase, NumericRange, RBox, RoleExpr, TBoxAxiom};

pub(crate) type Cid = u32;
/// Role id: `2 * name + inverted`, so `r ^ 1` is the inverse.
pub(crate) type Rid = u32;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) enum C {
    Top,
    Bottom,
    Atom(u32),
    NotAtom(u32),
    And(Vec<Cid>),
    Or(Vec<Cid>),
    Some(Rid, Cid),
    All(Rid, Cid),
    AtLeast(u32, Rid),
    AtMost(u32, Rid),
    Nom(u32),
    NotNom(u32),
    Data(u32, NumericRange),
    NotData(u32, NumericRange),
}

/// Name table: string to dense id.
#[derive(Debug, Clone, Default)]
pub(crate) struct Names {
    names: Vec<String>,
    index: HashMap<String, u32>,
}

impl Names {
    pub fn id(&mut self, name: &str) -> u32 {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        let i = self.names.len() as u32;
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), i);
        i
    }

    pub fn get(&self, name: &str) -> Option<u32> {
        self.index.get(name).copied()
    }

    pub fn name(&self, id: u32) -> &str {
        &self.names[id as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }
}

#[derive(Debug, Clone, Default)]
pub(crate) struct RoleTable {
    pub names: Names,
    /// Reflexive super roles, indexed by role id.
    pub sup: Vec<BTreeSet<Rid>>,
    /// Transitive sub-roles `S ⊑* R` of each role `R`.
    pub trans_subs: Vec<Vec<Rid>>,
}

impl RoleTable {
    fn build(rbox: &RBox, names: impl IntoIterator<Item = String>) -> Self {
        let mut t = RoleTable::default();
        for n in names {
            t.names.id(&n);
        }
        let n = t.names.len();
        let expr = |t: &RoleTable, rid: Rid| RoleExpr {
            name: t.names.name(rid >> 1).to_string(),
            inverted: rid & 1 == 1,
        };
        let mut transitive = vec![false; 2 * n];
        for rid in 0..(2 * n) as Rid {
            let e = expr(&t, rid);
            let sups: BTreeSet<Rid> = rbox
                .super_roles(&e)
                .iter()
                .map(|s| 2 * t.names.get(&s.name).expect("role in signature") + s.inverted as u32)
                .collect();
            t.sup.push(sups);
            transitive[rid as usize] = rbox.is_transitive(&e);
        }
        t.trans_subs = vec![Vec::new(); 2 * n];
        for s in 0..(2 * n) as Rid {
            if transitive[s as usize] {
                for &r in &t.sup[s as usize] {
                    t.trans_subs[r as usize].push(s);
                }
            }
        }
        t
    }

    pub fn id(&mut self, r: &RoleExpr) -> Rid {
        let before = self.names.len();
        let i = self.names.id(&r.name);
        if self.names.len() > before {
            // fresh role: only related to itself
            self.sup.push([2 * i].into());
            self.sup.push([2 * i + 1].into());
            self.trans_subs.push(Vec::new());
            self.trans_subs.push(Vec::new());
        }
        2 * i + r.inverted as u32
    }
}

/// Hash-consed NNF concepts. Each query works on its own clone, so new
/// concepts created during a test never leak into the shared index.
#[derive(Debug, Clone, Default)]
pub(crate) struct Interner {
    concepts: Vec<C>,
    map: HashMap<C, Cid>,
    negation: HashMap<Cid, Cid>,
    pub atoms: Names,
    pub individuals: Names,
    pub data_props: Names,
    pub roles: RoleTable,
}

impl Interner {
    pub fn get(&self, id: Cid) -> &C {
        &self.concepts[id as usize]
    }

    pub fn lookup(&self, c: &C) -> Option<Cid> {
        self.map.get(c).copied()
    }

    pub fn mk(&mut self, c: C) -> Cid {
        if let Some(&id) = self.map.get(&c) {
            return id;
        }
        let id = self.concepts.len() as Cid;
        self.concepts.push(c.clone());
        self.map.insert(c, id);
        id
    }

    pub fn top(&mut self) -> Cid {
        self.mk(C::Top)
    }

    pub fn bottom(&mut self) -> Cid {
        self.mk(C::Bottom)
    }

    fn mk_and(&mut self, ops: Vec<Cid>) -> Cid {
        let mut flat: Vec<Cid> = Vec::new();
        for op in ops {
            match self.get(op) {
                C::Top => {}
                C::Bottom => return self.bottom(),
                C::And(inner) => {
                    for &i in inner.clone().iter() {
                        if !flat.contains(&i) {
                            flat.push(i);
                        }
                    }
                }
                _ => {
                    if !flat.contains(&op) {
                        flat.push(op)
                    }
                }
            }
        }
        match flat.len() {
            0 => self.top(),
            1 => flat[0],
            _ => self.mk(C::And(flat)),
        }
    }

    fn mk_or(&mut self, ops: Vec<Cid>) -> Cid {
        let mut flat: Vec<Cid> = Vec::new();
        for op in ops {
            match self.get(op) {
                C::Bottom => {}
                C::Top => return self.top(),
                C::Or(inner) => {
                    for &i in inner.clone().iter() {
                        if !flat.contains(&i) {
                            flat.push(i);
                        }
                    }
                }
                _ => {
                    if !flat.contains(&op) {
                        flat.push(op)
                    }
                }
            }
        }
        match flat.len() {
            0 => self.bottom(),
            1 => flat[0],
            _ => self.mk(C::Or(flat)),
        }
    }

    pub fn or2(&mut self, a: Cid, b: Cid) -> Cid {
        self.mk_or(vec![a, b])
    }

    /// Interns `c` (or `¬c` when `neg`) in negation normal form.
    pub fn concept(&mut self, c: &ConceptExpr, neg: bool) -> Cid {
        use ConceptExpr as E;
        match (c, neg) {
            (E::Top, false) | (E::Bottom, true) => self.top(),
            (E::Top, true) | (E::Bottom, false) => self.bottom(),
            (E::Atomic(a), _) => {
                let id = self.atoms.id(a);
                self.mk(if neg { C::NotAtom(id) } else { C::Atom(id) })
            }
            (E::Not(inner), _) => self.concept(inner, !neg),
            (E::And(ops), false) | (E::Or(ops), true) => {
                let ids = ops.iter().map(|o| self.concept(o, neg)).collect();
                self.mk_and(ids)
            }
            (E::Or(ops), false) | (E::And(ops), true) => {
                let ids = ops.iter().map(|o| self.concept(o, neg)).collect();
                self.mk_or(ids)
            }
            (E::Exists(r, f), false) | (E::ForAll(r, f), true) => {
                let r = self.roles.id(r);
                let f = self.concept(f, neg);
                self.mk(C::Some(r, f))
            }
            (E::ForAll(r, f), false) | (E::Exists(r, f), true) => {
                let r = self.roles.id(r);
                let f = self.concept(f, neg);
                self.mk(C::All(r, f))
            }
            (E::AtLeast(0, _), false) => self.top(),
            (E::AtLeast(0, _), true) => self.bottom(),
            (E::AtLeast(n, r), false) => {
                let r = self.roles.id(r);
                self.mk(C::AtLeast(*n, r))
            }
            (E::AtLeast(n, r), true) => {
                let r = self.roles.id(r);
                self.mk(C::AtMost(n - 1, r))
            }
            (E::AtMost(n, r), false) => {
                let r = self.roles.id(r);
                self.mk(C::AtMost(*n, r))
            }
            (E::AtMost(n, r), true) => {
                let r = self.roles.id(r);
                self.mk(C::AtLeast(n + 1, r))
            }
            (E::HasValue(r, a), _) => {
                let r = self.roles.id(r);
                let i = self.individuals.id(a);
                if neg {
                    let f = self.mk(C::NotNom(i));
                    self.mk(C::All(r, f))
                } else {
                    let f = self.mk(C::Nom(i));
                    self.mk(C::Some(r, f))
                }
            }
            (E::OneOf(is), _) => {
                let ids: Vec<Cid> = is
                    .iter()
                    .map(|a| {
                        let i = self.individuals.id(a);
                        self.mk(if neg { C::NotNom(i) } else { C::Nom(i) })
                    })
                    .collect();
                if neg {
                    self.mk_and(ids)
                } else {
                    self.mk_or(ids)
                }
            }
            (E::DataSome(p, range), _) => {
                let p = self.data_props.id(p);
                self.mk(if neg { C::NotData(p, *range) } else { C::Data(p, *range) })
            }
        }
    }

    /// NNF of `¬id`.
    pub fn negate(&mut self, id: Cid) -> Cid {
        if let Some(&n) = self.negation.get(&id) {
            return n;
        }
        let n = match self.get(id).clone() {
            C::Top => self.bottom(),
            C::Bottom => self.top(),
            C::Atom(a) => self.mk(C::NotAtom(a)),
            C::NotAtom(a) => self.mk(C::Atom(a)),
            C::And(ops) => {
                let ops = ops.into_iter().map(|o| self.negate(o)).collect();
                self.mk_or(ops)
            }
            C::Or(ops) => {
                let ops = ops.into_iter().map(|o| self.negate(o)).collect();
                self.mk_and(ops)
            }
            C::Some(r, f) => {
                let f = self.negate(f);
                self.mk(C::All(r, f))
            }
            C::All(r, f) => {
                let f = self.negate(f);
                self.mk(C::Some(r, f))
            }
            C::AtLeast(0, _) => self.bottom(),
            C::AtLeast(n, r) => self.mk(C::AtMost(n - 1, r)),
            C::AtMost(n, r) => self.mk(C::AtLeast(n + 1, r)),
            C::Nom(i) => self.mk(C::NotNom(i)),
            C::NotNom(i) => self.mk(C::Nom(i)),
            C::Data(p, r) => self.mk(C::NotData(p, r)),
            C::NotData(p, r) => self.mk(C::Data(p, r)),
        };
        self.negation.insert(id, n);
        self.negation.insert(n, id);
        n
    }

    /// The complement of a literal, if it has been interned.
    pub fn literal_complement(&self, id: Cid) -> Option<Cid> {
        let c = match self.get(id) {
            C::Atom(a) => C::NotAtom(*a),
            C::NotAtom(a) => C::Atom(*a),
            C::Nom(i) => C::NotNom(*i),
            C::NotNom(i) => C::Nom(*i),
            _ => return None,
        };
        self.lookup(&c)
    }
}

#[derive(Debug, Clone, Default)]
pub(crate) struct CompiledTBox {
    pub unfold: HashMap<u32, Vec<Cid>>,
    pub unfold_neg: HashMap<u32, Vec<Cid>>,
    /// Concepts holding at every node (internalized GCIs, ⊤ ⊑ C).
    pub global: Vec<Cid>,
    /// `∃r.⊤ ⊑ C`: any node with an r-neighbour gets C.
    pub domain: Vec<(Rid, Cid)>,
}

#[derive(Debug, Clone, Default)]
pub(crate) struct CompiledABox {
    pub individuals: Vec<u32>,
    pub types: Vec<(u32, Cid)>,
    pub edges: Vec<(u32, Rid, u32)>,
    pub data: Vec<(u32, u32, Decimal)>,
    pub same: Vec<(u32, u32)>,
    pub different: Vec<(u32, u32)>,
}

#[derive(Debug, Clone)]
pub(crate) struct Index {
    pub base: Interner,
    pub tbox: CompiledTBox,
    pub abox: CompiledABox,
    pub tbox_has_nominals: bool,
    pub functional_data: HashSet<u32>,
    /// Named classes whose axioms were absorbed as definitions (inspected by tests).
    #[cfg_attr(not(test), allow(dead_code))]
    pub definitions: BTreeSet<String>,
}

impl Index {
    pub fn build(kb: &KnowledgeBase) -> Index {
        let mut it = Interner {
            roles: RoleTable::build(kb.rbox(), kb.role_names().iter().cloned()),
            ..Interner::default()
        };
        for a in kb.concept_names() {
            it.atoms.id(a);
        }
        for i in kb.individual_names() {
            let id = it.individuals.id(i);
            it.mk(C::Nom(id));
        }
        for p in kb.data_property_names() {
            it.data_props.id(p);
        }
        it.top();
        it.bottom();

        let (tbox, definitions) = compile_tbox(kb, &mut it);
        let tbox_has_nominals = kb.tbox().iter().any(|ax| match ax {
            TBoxAxiom::SubClassOf { sub, sup } => sub.has_nominals() || sup.has_nominals(),
            TBoxAxiom::EquivalentClasses(a, b) | TBoxAxiom::DisjointClasses(a, b) => {
                a.has_nominals() || b.has_nominals()
            }
            TBoxAxiom::Domain { concept, .. } | TBoxAxiom::Range { concept, .. } => concept.has_nominals(),
        });

        let mut abox = CompiledABox::default();
        for i in kb.individual_names() {
            abox.individuals.push(it.individuals.id(i));
        }
        for a in kb.abox() {
            match a {
                ABoxAssertion::ClassAssertion { concept, individual } => {
                    let c = it.concept(concept, false);
                    abox.types.push((it.individuals.id(individual), c));
                }
                ABoxAssertion::RoleAssertion { role, subject, object } => {
                    let r = it.roles.id(role);
                    abox.edges.push((it.individuals.id(subject), r, it.individuals.id(object)));
                }
                ABoxAssertion::DataAssertion {
                    property,
                    individual,
                    value,
                } => {
                    let p = it.data_props.id(property);
                    abox.data.push((it.individuals.id(individual), p, *value));
                }
                ABoxAssertion::SameAs(x, y) => abox.same.push((it.individuals.id(x), it.individuals.id(y))),
                ABoxAssertion::DifferentFrom(x, y) => {
                    abox.different.push((it.individuals.id(x), it.individuals.id(y)))
                }
            }
        }
        let functional_data = kb
            .functional_data_properties()
            .iter()
            .map(|p| it.data_props.id(p))
            .collect();
        Index {
            base: it,
            tbox,
            abox,
            tbox_has_nominals,
            functional_data,
            definitions,
        }
    }
}

/// Splits the TBox into lazily unfolded axioms and global constraints.
///
/// `A ≡ D` is a definition (unfolded both ways) when it is the only axiom with
/// `A` on the left and `A` is not on a cycle of definitions. Other axioms
/// with an atomic left side, or a conjunction containing a non-defined atom,
/// are absorbed as `A → D`. `∃r.⊤ ⊑ C` becomes a role rule. The rest is
/// internalized as `¬C ⊔ D` at every node.
fn compile_tbox(kb: &KnowledgeBase, it: &mut Interner) -> (CompiledTBox, BTreeSet<String>) {
    let mut lhs_count: HashMap<&str, usize> = HashMap::new();
    let mut candidates: Vec<(&str, &ConceptExpr)> = Vec::new();
    for ax in kb.tbox() {
        match ax {
            TBoxAxiom::SubClassOf {
                sub: ConceptExpr::Atomic(a),
                ..
            } => *lhs_count.entry(a).or_default() += 1,
            TBoxAxiom::EquivalentClasses(ConceptExpr::Atomic(a), d) | TBoxAxiom::EquivalentClasses(d, ConceptExpr::Atomic(a)) => {
                *lhs_count.entry(a).or_default() += 1;
                candidates.push((a, d));
            }
            _ => {}
        }
    }
    let mut defs: HashMap<&str, &ConceptExpr> = candidates
        .iter()
        .filter(|(a, _)| lhs_count[a] == 1)
        .map(|&(a, d)| (a, d))
        .collect();

    // drop definitions that reach themselves through other definitions
    let cyclic: Vec<&str> = defs
        .keys()
        .copied()
        .filter(|&a| {
            let mut stack: Vec<&str> = defs[a].concept_names();
            let mut seen = HashSet::new();
            while let Some(b) = stack.pop() {
                if b == a {
                    return true;
                }
                if seen.insert(b) {
                    if let Some(d) = defs.get(b) {
                        stack.extend(d.concept_names());
                    }
                }
            }
            false
        })
        .collect();
    for a in cyclic {
        defs.remove(a);
    }

    let mut out = CompiledTBox::default();
    let mut gcis: Vec<(ConceptExpr, ConceptExpr)> = Vec::new();
    for ax in kb.tbox() {
        match ax {
            TBoxAxiom::EquivalentClasses(a, b) => {
                let def = match (a, b) {
                    (ConceptExpr::Atomic(n), d) | (d, ConceptExpr::Atomic(n)) if defs.get(n.as_str()) == Some(&d) => {
                        Some((n, d))
                    }
                    _ => None,
                };
                if let Some((n, d)) = def {
                    let id = it.atoms.id(n);
                    let pos = it.concept(d, false);
                    let neg = it.concept(d, true);
                    out.unfold.entry(id).or_default().push(pos);
                    out.unfold_neg.entry(id).or_default().push(neg);
                } else {
                    gcis.push((a.clone(), b.clone()));
                    gcis.push((b.clone(), a.clone()));
                }
            }
            TBoxAxiom::SubClassOf { sub, sup } => gcis.push((sub.clone(), sup.clone())),
            other => {
                if let TBoxAxiom::SubClassOf { sub, sup } = other.clone().normalized() {
                    gcis.push((sub, sup));
                }
            }
        }
    }

    while let Some((sub, sup)) = gcis.pop() {
        match &sub {
            ConceptExpr::Atomic(a) if !defs.contains_key(a.as_str()) => {
                let id = it.atoms.id(a);
                let c = it.concept(&sup, false);
                out.unfold.entry(id).or_default().push(c);
            }
            ConceptExpr::Top => {
                let c = it.concept(&sup, false);
                out.global.push(c);
            }
            ConceptExpr::Exists(r, f) if **f == ConceptExpr::Top => {
                let r = it.roles.id(r);
                let c = it.concept(&sup, false);
                out.domain.push((r, c));
            }
            ConceptExpr::Or(ops) => {
                for op in ops {
                    gcis.push((op.clone(), sup.clone()));
                }
            }
            ConceptExpr::And(ops) => {
                let pick = ops
                    .iter()
                    .position(|o| matches!(o, ConceptExpr::Atomic(a) if !defs.contains_key(a.as_str())));
                if let Some(i) = pick {
                    let ConceptExpr::Atomic(a) = &ops[i] else { unreachable!() };
                    let rest: Vec<ConceptExpr> = ops
                        .iter()
                        .enumerate()
                        .filter(|&(j, _)| j != i)
                        .map(|(_, o)| o.clone())
                        .collect();
                    let id = it.atoms.id(a);
                    let rest = it.concept(&ConceptExpr::and(rest), true);
                    let sup = it.concept(&sup, false);
                    let c = it.or2(rest, sup);
                    out.unfold.entry(id).or_default().push(c);
                } else {
                    internalize(it, &mut out, &sub, &sup);
                }
            }
            _ => internalize(it, &mut out, &sub, &sup),
        }
    }
    // keep the source order for the deterministic rule order
    out.global.reverse();
    out.domain.reverse();
    for v in out.unfold.values_mut() {
        v.reverse();
    }
    out.global.retain(|&c| c != it.lookup(&C::Top).unwrap_or(u32::MAX));
    let mut seen = HashSet::new();
    out.global.retain(|c| seen.insert(*c));

    let definitions = defs.keys().map(|s| s.to_string()).collect();
    (out, definitions)
}

fn internalize(it: &mut Interner, out: &mut CompiledTBox, sub: &ConceptExpr, sup: &ConceptExpr) {
    let n = it.concept(sub, true);
    let s = it.concept(sup, false);
    let c = it.or2(n, s);
    out.global.push(c);
}
