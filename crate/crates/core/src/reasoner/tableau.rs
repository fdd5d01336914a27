//! Tableau expansion over a [`Graph`]: deterministic saturation, then `⊔` and
//! `≤` branching, then generating rules on unblocked nodes. Backtracking is
//! dependency directed: a clash skips every branch point it does not depend on.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use super::graph::{DepSet, Graph, NodeId};
use super::index::{Cid, CompiledABox, CompiledTBox, Interner, Rid, C};
use super::ReasonerError;
use crate::model::NumericRange;

/// An open branch point: the graph before the choice and its alternatives.
struct Frame {
    level: u32,
    base: Graph,
    choice: Choice,
    next: usize,
    /// Dependencies collected from the alternatives that already failed.
    failed: DepSet,
}

enum Choice {
    Or { x: NodeId, ops: Vec<Cid>, deps: DepSet },
    Merge { merges: Vec<(NodeId, NodeId)>, deps: DepSet },
}

impl Choice {
    fn len(&self) -> usize {
        match self {
            Choice::Or { ops, .. } => ops.len(),
            Choice::Merge { merges, .. } => merges.len(),
        }
    }
}

type BlockKey<'g> = (&'g BTreeSet<Cid>, &'g BTreeSet<Cid>, Option<&'g BTreeSet<Rid>>);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Block {
    None,
    Direct,
    Indirect,
}

pub(crate) struct Tableau<'a> {
    pub it: Interner,
    tbox: &'a CompiledTBox,
    functional_data: &'a HashSet<u32>,
    budget: usize,
    created: usize,
}

impl<'a> Tableau<'a> {
    pub fn new(it: Interner, tbox: &'a CompiledTBox, functional_data: &'a HashSet<u32>, budget: usize) -> Self {
        Tableau {
            it,
            tbox,
            functional_data,
            budget,
            created: 0,
        }
    }

    /// Is `concept` satisfiable? With `with_abox` the ABox individuals are
    /// present as roots so nominals can refer to them.
    pub fn satisfiable(&mut self, concept: Cid, abox: Option<&CompiledABox>) -> Result<bool, ReasonerError> {
        let mut g = Graph::default();
        if let Some(abox) = abox {
            self.init_abox(&mut g, abox)?;
        }
        let x = self.new_node(&mut g, None, true)?;
        self.add(&mut g, x, concept, &DepSet::default());
        self.run(g)
    }

    /// Is the ABox, extended with `extra` type assertions, consistent?
    pub fn consistent(&mut self, abox: &CompiledABox, extra: &[(u32, Cid)]) -> Result<bool, ReasonerError> {
        let mut g = Graph::default();
        self.init_abox(&mut g, abox)?;
        for &(i, c) in extra {
            let x = self.root_for(&mut g, i)?;
            self.add(&mut g, x, c, &DepSet::default());
        }
        self.run(g)
    }

    fn init_abox(&mut self, g: &mut Graph, abox: &CompiledABox) -> Result<(), ReasonerError> {
        let none = DepSet::default();
        for i in 0..self.it.individuals.len() as u32 {
            self.root_for(g, i)?;
        }
        for &(i, c) in &abox.types {
            let x = self.root_for(g, i)?;
            self.add(g, x, c, &none);
        }
        for &(a, r, b) in &abox.edges {
            let (x, y) = (self.root_for(g, a)?, self.root_for(g, b)?);
            g.add_edge(x, y, r, &self.it.roles, &none);
        }
        for &(i, p, v) in &abox.data {
            let x = self.root_for(g, i)?;
            g.nodes[x].data.push((p, v));
            if let Some(d) = self.data_clash(g, x) {
                g.set_clash(d);
            }
        }
        for &(a, b) in &abox.different {
            let (x, y) = (self.root_for(g, a)?, self.root_for(g, b)?);
            g.set_neq(x, y, &none);
        }
        for &(a, b) in &abox.same {
            let (x, y) = (self.root_for(g, a)?, self.root_for(g, b)?);
            self.merge(g, y, x, &none);
        }
        Ok(())
    }

    fn root_for(&mut self, g: &mut Graph, individual: u32) -> Result<NodeId, ReasonerError> {
        if let Some(x) = g.root_node(individual) {
            return Ok(x);
        }
        let x = self.new_node(g, None, true)?;
        g.root_of.insert(individual, x);
        g.nodes[x].individuals.insert(individual);
        let nom = self.it.mk(C::Nom(individual));
        self.add(g, x, nom, &DepSet::default());
        Ok(x)
    }

    fn new_node(&mut self, g: &mut Graph, parent: Option<NodeId>, is_root: bool) -> Result<NodeId, ReasonerError> {
        self.created += 1;
        if self.created > self.budget {
            return Err(ReasonerError::ResourceLimit { limit: self.budget });
        }
        let x = g.add_node(parent, is_root);
        let top = self.it.top();
        g.nodes[x].label.insert(top);
        for i in 0..self.tbox.global.len() {
            let c = self.tbox.global[i];
            self.add(g, x, c, &DepSet::default());
        }
        Ok(x)
    }

    /// Adds `c` to `L(x)` with dependencies `deps`; returns true when it was new.
    fn add(&mut self, g: &mut Graph, x: NodeId, c: Cid, deps: &DepSet) -> bool {
        if !g.nodes[x].label.insert(c) {
            return false;
        }
        if !deps.is_empty() {
            g.nodes[x].deps.insert(c, deps.clone());
        }
        match self.it.get(c) {
            C::Bottom => g.set_clash(deps.clone()),
            C::Atom(_) | C::NotAtom(_) | C::Nom(_) | C::NotNom(_) => {
                if let Some(n) = self.it.literal_complement(c) {
                    if g.nodes[x].label.contains(&n) {
                        let d = deps.union(&g.dep(x, n));
                        g.set_clash(d);
                    }
                }
            }
            C::Data(..) | C::NotData(..) => {
                if let Some(d) = self.data_clash(g, x) {
                    g.set_clash(d);
                }
            }
            _ => {}
        }
        true
    }

    /// Dependencies of some clash inside `L(x)`, if there is one.
    fn node_clash(&self, g: &Graph, x: NodeId) -> Option<DepSet> {
        let label = &g.nodes[x].label;
        for &c in label {
            if matches!(self.it.get(c), C::Bottom) {
                return Some(g.dep(x, c));
            }
            if let Some(n) = self.it.literal_complement(c) {
                if label.contains(&n) {
                    return Some(g.dep(x, c).union(&g.dep(x, n)));
                }
            }
        }
        self.data_clash(g, x)
    }

    /// Numeric constraints of one node. For a non-functional property every
    /// positive range needs a value outside all negated ranges, and asserted
    /// values must avoid the negated ranges. For a functional property a
    /// single value must satisfy everything at once. A clash depends on every
    /// data restriction of the node.
    fn data_clash(&self, g: &Graph, x: NodeId) -> Option<DepSet> {
        #[derive(Default)]
        struct Constraints {
            pos: Vec<NumericRange>,
            neg: Vec<NumericRange>,
            values: Vec<rust_decimal::Decimal>,
        }
        let node = &g.nodes[x];
        let mut by_prop: BTreeMap<u32, Constraints> = BTreeMap::new();
        for &c in &node.label {
            match self.it.get(c) {
                C::Data(p, r) => by_prop.entry(*p).or_default().pos.push(*r),
                C::NotData(p, r) => by_prop.entry(*p).or_default().neg.push(*r),
                _ => {}
            }
        }
        for &(p, v) in &node.data {
            by_prop.entry(p).or_default().values.push(v);
        }
        let outside_negatives = |r: NumericRange, neg: &[NumericRange]| {
            let mut pieces: Vec<NumericRange> = vec![r];
            for n in neg {
                pieces = pieces.iter().flat_map(|p| p.subtract(n)).collect();
            }
            pieces.retain(|p| !p.is_empty());
            !pieces.is_empty()
        };
        let clash = by_prop.iter().any(|(p, cs)| {
            if cs.values.iter().any(|v| cs.neg.iter().any(|n| n.contains(*v))) {
                return true;
            }
            if self.functional_data.contains(p) {
                if let Some(v) = cs.values.first() {
                    cs.values.iter().any(|w| w != v) || cs.pos.iter().any(|r| !r.contains(*v))
                } else if cs.pos.is_empty() {
                    false
                } else {
                    let meet = cs.pos.iter().fold(NumericRange::unbounded(), |acc, r| acc.intersect(r));
                    !outside_negatives(meet, &cs.neg)
                }
            } else {
                cs.pos.iter().any(|r| !outside_negatives(*r, &cs.neg))
            }
        });
        clash.then(|| {
            node.label
                .iter()
                .filter(|&&c| matches!(self.it.get(c), C::Data(..) | C::NotData(..)))
                .fold(DepSet::default(), |acc, &c| acc.union(&g.dep(x, c)))
        })
    }

    fn merge(&mut self, g: &mut Graph, from: NodeId, into: NodeId, deps: &DepSet) {
        g.merge(from, into, deps);
        if let Some(d) = self.node_clash(g, into) {
            g.set_clash(d);
        }
    }

    /// Boolean constraint propagation on `⊔`: disjuncts whose negation is
    /// already in the label are dropped; none left is a clash, one left is
    /// added deterministically.
    fn propagate_or(&mut self, g: &mut Graph, x: NodeId, or: Cid, ops: &[Cid]) -> bool {
        let label = &g.nodes[x].label;
        if ops.iter().any(|o| label.contains(o)) {
            return false;
        }
        let mut deps = g.dep(x, or);
        let mut open = None;
        for &o in ops {
            let neg = self.it.negate(o);
            if matches!(self.it.get(o), C::Bottom) {
                continue;
            }
            if g.nodes[x].label.contains(&neg) {
                deps = deps.union(&g.dep(x, neg));
            } else if open.is_some() {
                return false;
            } else {
                open = Some(o);
            }
        }
        match open {
            None => {
                g.set_clash(deps);
                true
            }
            Some(o) => self.add(g, x, o, &deps),
        }
    }

    /// Applies the deterministic rules until nothing changes.
    fn saturate(&mut self, g: &mut Graph) -> Result<(), ReasonerError> {
        loop {
            if g.clash.is_some() {
                return Ok(());
            }
            let mut changed = false;
            for x in 0..g.nodes.len() {
                if !g.nodes[x].alive {
                    continue;
                }
                let label: Vec<Cid> = g.nodes[x].label.iter().copied().collect();
                for c in label {
                    if !g.nodes[x].alive || g.clash.is_some() {
                        break;
                    }
                    let deps = g.dep(x, c);
                    match self.it.get(c).clone() {
                        C::And(ops) => {
                            for o in ops {
                                changed |= self.add(g, x, o, &deps);
                            }
                        }
                        C::Or(ops) => changed |= self.propagate_or(g, x, c, &ops),
                        C::Atom(a) => {
                            if let Some(ds) = self.tbox.unfold.get(&a) {
                                for &d in ds {
                                    changed |= self.add(g, x, d, &deps);
                                }
                            }
                        }
                        C::NotAtom(a) => {
                            if let Some(ds) = self.tbox.unfold_neg.get(&a) {
                                for &d in ds {
                                    changed |= self.add(g, x, d, &deps);
                                }
                            }
                        }
                        C::All(r, d) => {
                            for y in g.neighbours(x, r) {
                                let dy = deps.union(&g.edge_dep(x, y));
                                changed |= self.add(g, y, d, &dy);
                            }
                            for s in self.it.roles.trans_subs[r as usize].clone() {
                                let all_s = self.it.mk(C::All(s, d));
                                for y in g.neighbours(x, s) {
                                    let dy = deps.union(&g.edge_dep(x, y));
                                    changed |= self.add(g, y, all_s, &dy);
                                }
                            }
                        }
                        C::Nom(i) => {
                            let r = self.root_for(g, i)?;
                            if r != x {
                                let (from, into) = if g.nodes[x].is_root && r > x { (r, x) } else { (x, r) };
                                self.merge(g, from, into, &deps);
                                changed = true;
                            }
                        }
                        _ => {}
                    }
                }
                if !g.nodes[x].alive || g.clash.is_some() {
                    continue;
                }
                for i in 0..self.tbox.domain.len() {
                    let (r, c) = self.tbox.domain[i];
                    if let Some(&y) = g.neighbours(x, r).first() {
                        let d = g.edge_dep(x, y);
                        changed |= self.add(g, x, c, &d);
                    }
                }
            }
            if !changed {
                return Ok(());
            }
        }
    }

    /// Pairwise anywhere blocking: a generated node `x` with generated
    /// parent `x'` is directly blocked by an earlier unblocked node `y` with
    /// generated parent `y'` when `L(x) = L(y)`, `L(x') = L(y')` and the
    /// edges `x'→x`, `y'→y` carry the same roles. Descendants of a blocked
    /// node are indirectly blocked.
    fn blocking(&self, g: &Graph) -> Vec<Block> {
        let n = g.nodes.len();
        let mut status = vec![Block::None; n];
        let mut blockers: HashMap<BlockKey<'_>, NodeId> = HashMap::new();
        // a generated node's parent is a root or was created before it
        for x in 0..n {
            let node = &g.nodes[x];
            if !node.alive || node.is_root {
                continue;
            }
            let Some(p) = node.parent else { continue };
            let parent = &g.nodes[p];
            if parent.is_root {
                continue;
            }
            if status[p] != Block::None {
                status[x] = Block::Indirect;
                continue;
            }
            let key = (&node.label, &parent.label, g.edges.get(&(p, x)));
            match blockers.get(&key) {
                Some(_) => status[x] = Block::Direct,
                None => {
                    blockers.insert(key, x);
                }
            }
        }
        status
    }

    /// Runs the expansion, backjumping over branch points a clash does not
    /// depend on. Returns true when a complete clash-free graph is found.
    pub fn run(&mut self, mut g: Graph) -> Result<bool, ReasonerError> {
        let mut stack: Vec<Frame> = Vec::new();
        loop {
            self.saturate(&mut g)?;
            if let Some(mut clash) = g.clash.take() {
                g = loop {
                    let Some(frame) = stack.last_mut() else { return Ok(false) };
                    if !clash.contains(frame.level) {
                        stack.pop();
                        continue;
                    }
                    frame.failed = frame.failed.union(&clash.without(frame.level));
                    if frame.next < frame.choice.len() {
                        break self.branch(frame);
                    }
                    clash = frame.failed.clone();
                    stack.pop();
                };
                continue;
            }
            let blocked = self.blocking(&g);
            let choice = if let Some((x, or, ops)) = self.find_or(&g, &blocked) {
                let deps = g.dep(x, or);
                Choice::Or { x, ops, deps }
            } else if let Some((x, c, candidates)) = self.find_at_most(&g, &blocked) {
                let mut merges = Vec::new();
                let mut deps = g.dep(x, c);
                for (i, &y) in candidates.iter().enumerate() {
                    deps = deps.union(&g.edge_dep(x, y));
                    for &z in &candidates[i + 1..] {
                        match g.neq_dep(y, z) {
                            Some(d) => deps = deps.union(&d),
                            None => merges.push(self.merge_direction(&g, x, y, z)?),
                        }
                    }
                }
                if merges.is_empty() {
                    // every pair is distinct: the restriction cannot be met
                    g.set_clash(deps);
                    continue;
                }
                Choice::Merge { merges, deps }
            } else {
                if !self.generate(&mut g, &blocked)? {
                    return Ok(true);
                }
                continue;
            };
            let mut frame = Frame {
                level: stack.len() as u32,
                base: g,
                choice,
                next: 0,
                failed: DepSet::default(),
            };
            g = self.branch(&mut frame);
            stack.push(frame);
        }
    }

    /// The graph for the next alternative of `frame`. Alternatives are tried
    /// left to right; a later `⊔` branch also negates the earlier disjuncts.
    fn branch(&mut self, frame: &mut Frame) -> Graph {
        let i = frame.next;
        frame.next += 1;
        let mut g = frame.base.clone();
        match &frame.choice {
            Choice::Or { x, ops, deps } => {
                let d = deps.union(&DepSet::level(frame.level));
                for &earlier in &ops[..i] {
                    let neg = self.it.negate(earlier);
                    self.add(&mut g, *x, neg, &d);
                }
                self.add(&mut g, *x, ops[i], &d);
            }
            Choice::Merge { merges, deps } => {
                let d = deps.union(&DepSet::level(frame.level));
                let (from, into) = merges[i];
                self.merge(&mut g, from, into, &d);
            }
        }
        g
    }

    fn find_or(&self, g: &Graph, blocked: &[Block]) -> Option<(NodeId, Cid, Vec<Cid>)> {
        for x in g.alive() {
            if blocked[x] == Block::Indirect {
                continue;
            }
            let label = &g.nodes[x].label;
            for &c in label {
                if let C::Or(ops) = self.it.get(c) {
                    if !ops.iter().any(|o| label.contains(o)) {
                        return Some((x, c, ops.clone()));
                    }
                }
            }
        }
        None
    }

    /// A node with more `R`-neighbours than an `≤ n R` allows, the
    /// restriction, and those neighbours newest first.
    fn find_at_most(&self, g: &Graph, blocked: &[Block]) -> Option<(NodeId, Cid, Vec<NodeId>)> {
        for x in g.alive() {
            if blocked[x] == Block::Indirect {
                continue;
            }
            for &c in &g.nodes[x].label {
                if let C::AtMost(n, r) = self.it.get(c) {
                    let mut ns = g.neighbours(x, *r);
                    if ns.len() > *n as usize {
                        ns.reverse();
                        return Some((x, c, ns));
                    }
                }
            }
        }
        None
    }

    /// Which of two `R`-neighbours of `x` survives a `≤`-merge.
    fn merge_direction(&self, g: &Graph, x: NodeId, y: NodeId, z: NodeId) -> Result<(NodeId, NodeId), ReasonerError> {
        let (ry, rz) = (g.nodes[y].is_root, g.nodes[z].is_root);
        let unsupported = |what: &str| {
            Err(ReasonerError::UnsupportedConstruct(format!(
                "at-most restriction would merge {what}; nominal merging from number restrictions is outside the supported fragment"
            )))
        };
        if ry && rz {
            return unsupported("two distinct named individuals");
        }
        let ancestor_or_self = |a: NodeId| a == x || g.is_ancestor(a, x);
        if ry || rz {
            let (root, gen) = if ry { (y, z) } else { (z, y) };
            if ancestor_or_self(gen) {
                return unsupported("an ancestor of the restricted node into a named individual");
            }
            return Ok((gen, root));
        }
        if y == x || z == x {
            return unsupported("a node with itself");
        }
        if ancestor_or_self(y) {
            return Ok((z, y));
        }
        if ancestor_or_self(z) {
            return Ok((y, z));
        }
        // both are successors: the newer one goes into the older one
        Ok(if y > z { (y, z) } else { (z, y) })
    }

    /// Applies `∃` and `≥` to the first unblocked node that needs them.
    fn generate(&mut self, g: &mut Graph, blocked: &[Block]) -> Result<bool, ReasonerError> {
        for x in 0..g.nodes.len() {
            if !g.nodes[x].alive || blocked[x] != Block::None {
                continue;
            }
            let mut created = false;
            let label: Vec<Cid> = g.nodes[x].label.iter().copied().collect();
            for c in label {
                let deps = g.dep(x, c);
                match self.it.get(c).clone() {
                    C::Some(r, d) => {
                        let satisfied = g.neighbours(x, r).iter().any(|&y| g.nodes[y].label.contains(&d));
                        if !satisfied {
                            let y = self.new_node(g, Some(x), false)?;
                            g.add_edge(x, y, r, &self.it.roles, &deps);
                            self.add(g, y, d, &deps);
                            created = true;
                        }
                    }
                    C::AtLeast(n, r) => {
                        if g.nodes[x].expanded_at_least.insert(c) {
                            let mut fresh = Vec::new();
                            for _ in 0..n {
                                let y = self.new_node(g, Some(x), false)?;
                                g.add_edge(x, y, r, &self.it.roles, &deps);
                                for &z in &fresh {
                                    g.set_neq(y, z, &deps);
                                }
                                fresh.push(y);
                            }
                            created = true;
                        }
                    }
                    _ => {}
                }
            }
            if created {
                return Ok(true);
            }
        }
        Ok(false)
    }
}
