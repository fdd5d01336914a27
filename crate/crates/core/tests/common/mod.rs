//! Shared test helpers: a seeded ALC concept generator, two finite-model
//! oracles (SAT-encoded search at a fixed domain size, and plain enumeration
//! for tiny domains) that never touch the tableau code, and a live server.

#![allow(dead_code)]

pub mod live;

use std::collections::{BTreeMap, BTreeSet};

use rand::rngs::StdRng;
use rand::Rng;
use trafficdl::model::{nnf, ConceptExpr, RoleExpr};
use trafficdl::reasoner::{evaluate, FiniteInterpretation};
use varisat::{ExtendFormula, Lit, Solver};

pub const ATOMS: [&str; 3] = ["A", "B", "C"];
pub const ROLES: [&str; 2] = ["r", "s"];

/// Random ALC concept of depth at most `depth`.
pub fn random_alc(rng: &mut StdRng, depth: usize) -> ConceptExpr {
    let atom = |rng: &mut StdRng| ConceptExpr::atomic(ATOMS[rng.gen_range(0..ATOMS.len())]);
    if depth <= 1 {
        return match rng.gen_range(0..10) {
            0 => ConceptExpr::Top,
            1 => ConceptExpr::Bottom,
            _ => atom(rng),
        };
    }
    let role = |rng: &mut StdRng| RoleExpr::named(ROLES[rng.gen_range(0..ROLES.len())]);
    match rng.gen_range(0..12) {
        0 | 1 => atom(rng),
        2 | 3 => ConceptExpr::not(random_alc(rng, depth - 1)),
        4 | 5 => ConceptExpr::And(vec![random_alc(rng, depth - 1), random_alc(rng, depth - 1)]),
        6 | 7 => ConceptExpr::Or(vec![random_alc(rng, depth - 1), random_alc(rng, depth - 1)]),
        8 | 9 => ConceptExpr::Exists(role(rng), Box::new(random_alc(rng, depth - 1))),
        _ => ConceptExpr::ForAll(role(rng), Box::new(random_alc(rng, depth - 1))),
    }
}

/// Replaces roughly a third of the roles in `c` by their inverses.
pub fn with_inverses(rng: &mut StdRng, c: &ConceptExpr) -> ConceptExpr {
    let mut flip = |r: &RoleExpr| if rng.gen_bool(0.35) { r.inverse() } else { r.clone() };
    fn go(c: &ConceptExpr, flip: &mut impl FnMut(&RoleExpr) -> RoleExpr) -> ConceptExpr {
        match c {
            ConceptExpr::Not(d) => ConceptExpr::Not(Box::new(go(d, flip))),
            ConceptExpr::And(ops) => ConceptExpr::And(ops.iter().map(|o| go(o, flip)).collect()),
            ConceptExpr::Or(ops) => ConceptExpr::Or(ops.iter().map(|o| go(o, flip)).collect()),
            ConceptExpr::Exists(r, d) => ConceptExpr::Exists(flip(r), Box::new(go(d, flip))),
            ConceptExpr::ForAll(r, d) => ConceptExpr::ForAll(flip(r), Box::new(go(d, flip))),
            other => other.clone(),
        }
    }
    go(c, &mut flip)
}

/// Random concept of depth at most 4, half of them top-level conjunctions
/// of several depth-3 parts, which pushes the mix towards unsatisfiable.
pub fn random_test_concept(rng: &mut StdRng) -> ConceptExpr {
    if rng.gen_bool(0.5) {
        random_alc(rng, 4)
    } else {
        let k = rng.gen_range(2..=4);
        ConceptExpr::And((0..k).map(|_| random_alc(rng, 3)).collect())
    }
}

/// Existential subexpressions of the negation normal form.
pub fn existential_count(c: &ConceptExpr) -> usize {
    let mut n = 0;
    nnf(c).walk(&mut |d| {
        if matches!(d, ConceptExpr::Exists(..)) {
            n += 1;
        }
    });
    n
}

pub fn oracle_bound(c: &ConceptExpr) -> usize {
    existential_count(c) + 1
}

fn signature_interpretation(n: usize) -> FiniteInterpretation {
    let mut i = FiniteInterpretation::with_domain(n);
    for a in ATOMS {
        i.concept_ext.insert(a.into(), BTreeSet::new());
    }
    for r in ROLES {
        i.role_ext.insert(r.into(), BTreeSet::new());
    }
    i
}

/// Looks for a model of `c` with exactly `n` elements by SAT encoding the
/// NNF of `c`. Any model found is re-checked with `evaluate`.
pub fn finite_model(c: &ConceptExpr, n: usize) -> Option<FiniteInterpretation> {
    finite_model_with_tbox(c, &[], n)
}

/// As [`finite_model`], additionally satisfying every inclusion `C ⊑ D`
/// in `tbox` at every element.
pub fn finite_model_with_tbox(c: &ConceptExpr, tbox: &[(ConceptExpr, ConceptExpr)], n: usize) -> Option<FiniteInterpretation> {
    let c = nnf(c);
    let gcis: Vec<ConceptExpr> = tbox
        .iter()
        .map(|(sub, sup)| nnf(&ConceptExpr::Or(vec![ConceptExpr::not(sub.clone()), sup.clone()])))
        .collect();
    let mut solver = Solver::new();
    let mut atom_var: BTreeMap<(&str, usize), Lit> = BTreeMap::new();
    let mut role_var: BTreeMap<(&str, usize, usize), Lit> = BTreeMap::new();
    for a in ATOMS {
        for x in 0..n {
            atom_var.insert((a, x), solver.new_lit());
        }
    }
    for r in ROLES {
        for x in 0..n {
            for y in 0..n {
                role_var.insert((r, x, y), solver.new_lit());
            }
        }
    }
    let root = encode(&c, 0, n, &mut solver, &atom_var, &role_var);
    solver.add_clause(&[root]);
    for g in &gcis {
        for x in 0..n {
            let l = encode(g, x, n, &mut solver, &atom_var, &role_var);
            solver.add_clause(&[l]);
        }
    }
    if !solver.solve().expect("solver") {
        return None;
    }
    let model: BTreeSet<Lit> = solver.model().expect("model").into_iter().collect();
    let mut i = signature_interpretation(n);
    for (&(a, x), l) in &atom_var {
        if model.contains(l) {
            i.concept_ext.get_mut(a).unwrap().insert(x);
        }
    }
    for (&(r, x, y), l) in &role_var {
        if model.contains(l) {
            i.role_ext.get_mut(r).unwrap().insert((x, y));
        }
    }
    assert!(
        evaluate(&c, &i).expect("closed signature").contains(&0),
        "SAT encoding produced a non-model for {c}"
    );
    for g in &gcis {
        assert_eq!(evaluate(g, &i).unwrap().len(), n, "SAT encoding violates {g}");
    }
    Some(i)
}

fn edge(roles: &BTreeMap<(&str, usize, usize), Lit>, r: &RoleExpr, x: usize, y: usize) -> Lit {
    let (a, b) = if r.inverted { (y, x) } else { (x, y) };
    roles[&(r.name.as_str(), a, b)]
}

/// Literal `l` with `l → (x ∈ c)` enforced by clauses; NNF only needs this direction.
fn encode(
    c: &ConceptExpr,
    x: usize,
    n: usize,
    s: &mut Solver,
    atoms: &BTreeMap<(&str, usize), Lit>,
    roles: &BTreeMap<(&str, usize, usize), Lit>,
) -> Lit {
    let v = s.new_lit();
    match c {
        ConceptExpr::Top => {}
        ConceptExpr::Bottom => s.add_clause(&[!v]),
        ConceptExpr::Atomic(a) => s.add_clause(&[!v, atoms[&(a.as_str(), x)]]),
        ConceptExpr::Not(inner) => match inner.as_ref() {
            ConceptExpr::Atomic(a) => s.add_clause(&[!v, !atoms[&(a.as_str(), x)]]),
            other => panic!("not in NNF: {other}"),
        },
        ConceptExpr::And(ops) => {
            for o in ops {
                let l = encode(o, x, n, s, atoms, roles);
                s.add_clause(&[!v, l]);
            }
        }
        ConceptExpr::Or(ops) => {
            let mut clause = vec![!v];
            for o in ops {
                clause.push(encode(o, x, n, s, atoms, roles));
            }
            s.add_clause(&clause);
        }
        ConceptExpr::Exists(r, d) => {
            let mut clause = vec![!v];
            for y in 0..n {
                let t = s.new_lit();
                let l = encode(d, y, n, s, atoms, roles);
                s.add_clause(&[!t, edge(roles, r, x, y)]);
                s.add_clause(&[!t, l]);
                clause.push(t);
            }
            s.add_clause(&clause);
        }
        ConceptExpr::ForAll(r, d) => {
            for y in 0..n {
                let l = encode(d, y, n, s, atoms, roles);
                s.add_clause(&[!v, !edge(roles, r, x, y), l]);
            }
        }
        other => panic!("outside ALC: {other}"),
    }
    v
}

/// Oracle verdict: some interpretation with at most `oracle_bound(c)` elements
/// makes `c` nonempty. Models are closed under adding isolated elements, so
/// checking the bound itself suffices.
pub fn oracle_satisfiable(c: &ConceptExpr) -> bool {
    finite_model(c, oracle_bound(c)).is_some()
}

/// Exhaustive enumeration over every interpretation of the test signature
/// with 1..=max elements.
pub fn brute_force_satisfiable(c: &ConceptExpr, max: usize) -> bool {
    (1..=max).any(|n| {
        let atom_bits = ATOMS.len() * n;
        let role_bits = ROLES.len() * n * n;
        (0u64..1 << (atom_bits + role_bits)).any(|mask| {
            let mut i = signature_interpretation(n);
            let mut bit = 0;
            for a in ATOMS {
                for x in 0..n {
                    if mask >> bit & 1 == 1 {
                        i.concept_ext.get_mut(a).unwrap().insert(x);
                    }
                    bit += 1;
                }
            }
            for r in ROLES {
                for x in 0..n {
                    for y in 0..n {
                        if mask >> bit & 1 == 1 {
                            i.role_ext.get_mut(r).unwrap().insert((x, y));
                        }
                        bit += 1;
                    }
                }
            }
            !evaluate(c, &i).unwrap().is_empty()
        })
    })
}
