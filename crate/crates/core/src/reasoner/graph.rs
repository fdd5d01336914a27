//! Completion graph: a forest of generated nodes hanging off root nodes,
//! with role-labelled edges kept in both directions. Every label entry, edge
//! and inequality remembers the branch points it depends on, so a clash can
//! jump straight back to the latest choice that caused it.

use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use rust_decimal::Decimal;

use super::index::{Cid, Rid, RoleTable};

pub(crate) type NodeId = usize;

/// Set of branch levels a fact depends on. Empty for facts that hold in
/// every branch.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub(crate) struct DepSet(Option<Rc<BTreeSet<u32>>>);

impl DepSet {
    pub fn level(l: u32) -> Self {
        DepSet(Some(Rc::new(BTreeSet::from([l]))))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_none()
    }

    pub fn contains(&self, l: u32) -> bool {
        self.0.as_ref().is_some_and(|s| s.contains(&l))
    }

    #[cfg_attr(not(test), allow(dead_code))]
    pub fn levels(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().flat_map(|s| s.iter().copied())
    }

    pub fn union(&self, other: &DepSet) -> DepSet {
        match (&self.0, &other.0) {
            (_, None) => self.clone(),
            (None, _) => other.clone(),
            (Some(a), Some(b)) if b.is_subset(a) => self.clone(),
            (Some(a), Some(b)) if a.is_subset(b) => other.clone(),
            (Some(a), Some(b)) => DepSet(Some(Rc::new(a.union(b).copied().collect()))),
        }
    }

    pub fn without(&self, l: u32) -> DepSet {
        match &self.0 {
            Some(s) if s.contains(&l) => {
                let rest: BTreeSet<u32> = s.iter().copied().filter(|&x| x != l).collect();
                DepSet((!rest.is_empty()).then(|| Rc::new(rest)))
            }
            _ => self.clone(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub(crate) struct Node {
    pub label: BTreeSet<Cid>,
    pub deps: HashMap<Cid, DepSet>,
    /// Tree parent of a generated node; `None` for roots.
    pub parent: Option<NodeId>,
    pub is_root: bool,
    pub alive: bool,
    pub merged_into: Option<NodeId>,
    /// Individuals this root stands for.
    pub individuals: BTreeSet<u32>,
    pub data: Vec<(u32, Decimal)>,
    /// `≥`-restrictions already expanded here.
    pub expanded_at_least: BTreeSet<Cid>,
}

#[derive(Debug, Clone, Default)]
pub(crate) struct Graph {
    pub nodes: Vec<Node>,
    /// Role labels of `(x, y)`, closed under super-roles. `(y, x)` holds the inverses.
    pub edges: HashMap<(NodeId, NodeId), BTreeSet<Rid>>,
    pub edge_deps: HashMap<(NodeId, NodeId), DepSet>,
    pub adj: Vec<BTreeSet<NodeId>>,
    pub neq: HashMap<(NodeId, NodeId), DepSet>,
    pub root_of: HashMap<u32, NodeId>,
    /// Dependencies of the first clash found, if any.
    pub clash: Option<DepSet>,
}

fn pair(x: NodeId, y: NodeId) -> (NodeId, NodeId) {
    (x.min(y), x.max(y))
}

impl Graph {
    pub fn add_node(&mut self, parent: Option<NodeId>, is_root: bool) -> NodeId {
        let id = self.nodes.len();
        self.nodes.push(Node {
            parent,
            is_root,
            alive: true,
            ..Node::default()
        });
        self.adj.push(BTreeSet::new());
        id
    }

    pub fn set_clash(&mut self, deps: DepSet) {
        if self.clash.is_none() {
            self.clash = Some(deps);
        }
    }

    /// Dependencies of `c` in `L(x)`.
    pub fn dep(&self, x: NodeId, c: Cid) -> DepSet {
        self.nodes[x].deps.get(&c).cloned().unwrap_or_default()
    }

    pub fn edge_dep(&self, x: NodeId, y: NodeId) -> DepSet {
        self.edge_deps.get(&(x, y)).cloned().unwrap_or_default()
    }

    pub fn alive(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).filter(move |&i| self.nodes[i].alive)
    }

    /// Current representative after merges.
    pub fn find(&self, mut x: NodeId) -> NodeId {
        while let Some(y) = self.nodes[x].merged_into {
            x = y;
        }
        x
    }

    pub fn root_node(&self, individual: u32) -> Option<NodeId> {
        self.root_of.get(&individual).map(|&n| self.find(n))
    }

    pub fn add_edge(&mut self, x: NodeId, y: NodeId, r: Rid, roles: &RoleTable, deps: &DepSet) -> bool {
        let sups = roles.sup[r as usize].clone();
        self.add_edge_labels(x, y, &sups, deps)
    }

    /// Adds already-closed role labels to `(x, y)` and their inverses to `(y, x)`.
    fn add_edge_labels(&mut self, x: NodeId, y: NodeId, roles: &BTreeSet<Rid>, deps: &DepSet) -> bool {
        for key in [(x, y), (y, x)] {
            self.edge_deps.entry(key).or_insert_with(|| deps.clone());
        }
        let fwd = self.edges.entry((x, y)).or_default();
        let before = fwd.len();
        fwd.extend(roles.iter().copied());
        let changed = fwd.len() != before;
        let back = self.edges.entry((y, x)).or_default();
        back.extend(roles.iter().map(|r| r ^ 1));
        self.adj[x].insert(y);
        self.adj[y].insert(x);
        changed
    }

    pub fn is_neighbour(&self, x: NodeId, y: NodeId, r: Rid) -> bool {
        self.edges.get(&(x, y)).is_some_and(|s| s.contains(&r))
    }

    pub fn neighbours(&self, x: NodeId, r: Rid) -> Vec<NodeId> {
        self.adj[x].iter().copied().filter(|&y| self.is_neighbour(x, y, r)).collect()
    }

    pub fn set_neq(&mut self, x: NodeId, y: NodeId, deps: &DepSet) {
        if x == y {
            self.set_clash(deps.clone());
        } else {
            self.neq.entry(pair(x, y)).or_insert_with(|| deps.clone());
        }
    }

    pub fn neq_dep(&self, x: NodeId, y: NodeId) -> Option<DepSet> {
        self.neq.get(&pair(x, y)).cloned()
    }

    pub fn is_ancestor(&self, a: NodeId, mut x: NodeId) -> bool {
        while let Some(p) = self.nodes[x].parent {
            if p == a {
                return true;
            }
            x = p;
        }
        false
    }

    /// Removes the generated descendants of `x`.
    pub fn prune_children(&mut self, x: NodeId) {
        let children: Vec<NodeId> = self
            .alive()
            .filter(|&c| self.nodes[c].parent == Some(x) && !self.nodes[c].is_root)
            .collect();
        for c in children {
            self.prune_children(c);
            self.detach(c);
            self.nodes[c].alive = false;
        }
    }

    fn detach(&mut self, x: NodeId) {
        for w in std::mem::take(&mut self.adj[x]) {
            for key in [(x, w), (w, x)] {
                self.edges.remove(&key);
                self.edge_deps.remove(&key);
            }
            self.adj[w].remove(&x);
        }
        self.neq.retain(|&(a, b), _| a != x && b != x);
    }

    /// Merges `from` into `into`: labels, edges, inequalities and individuals
    /// move over; generated descendants of a generated `from` are pruned,
    /// those of a root are re-parented. Everything moved also depends on `deps`.
    pub fn merge(&mut self, from: NodeId, into: NodeId, deps: &DepSet) {
        if from == into {
            return;
        }
        if let Some(d) = self.neq.get(&pair(from, into)) {
            let d = d.union(deps);
            self.set_clash(d);
        }
        if self.nodes[from].is_root {
            for c in 0..self.nodes.len() {
                if self.nodes[c].alive && self.nodes[c].parent == Some(from) {
                    self.nodes[c].parent = Some(into);
                }
            }
        } else {
            self.prune_children(from);
        }
        for w in std::mem::take(&mut self.adj[from]) {
            let lab = self.edges.remove(&(from, w)).unwrap_or_default();
            let d = self.edge_deps.remove(&(from, w)).unwrap_or_default().union(deps);
            self.edges.remove(&(w, from));
            self.edge_deps.remove(&(w, from));
            self.adj[w].remove(&from);
            let target = if w == from { into } else { w };
            self.add_edge_labels(into, target, &lab, &d);
        }
        let pairs: Vec<((NodeId, NodeId), DepSet)> = self
            .neq
            .iter()
            .filter(|((a, b), _)| *a == from || *b == from)
            .map(|(k, d)| (*k, d.clone()))
            .collect();
        for ((a, b), d) in pairs {
            self.neq.remove(&(a, b));
            let other = if a == from { b } else { a };
            self.set_neq(into, other, &d.union(deps));
        }
        let mut moved = std::mem::take(&mut self.nodes[from]);
        let target = &mut self.nodes[into];
        for c in moved.label {
            if target.label.insert(c) {
                let d = moved.deps.remove(&c).unwrap_or_default().union(deps);
                target.deps.insert(c, d);
            }
        }
        target.individuals.extend(moved.individuals.iter().copied());
        target.data.extend(moved.data);
        target.expanded_at_least.extend(moved.expanded_at_least);
        target.is_root |= moved.is_root;
        if target.is_root {
            target.parent = None;
        }
        self.nodes[from] = Node {
            alive: false,
            merged_into: Some(into),
            parent: moved.parent,
            ..Node::default()
        };
    }
}
