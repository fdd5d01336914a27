//! Property tests for the invariants of the model, the text format, the
//! reasoner and synchronization.

use std::collections::BTreeSet;

use proptest::collection::{btree_set, vec};
use proptest::prelude::*;
use trafficdl::model::{build_closure_axiom, nnf, ConceptExpr, KnowledgeBase, RoleExpr, TBoxAxiom};
use trafficdl::reasoner::{evaluate, FiniteInterpretation, Reasoner};
use trafficdl::service::{Scope, Snapshot};
use trafficdl::store::{synchronize, update_assignments, ConditionAssignment, Store};
use trafficdl::syntax::{parse_text, serialize_text};

const ATOMS: [&str; 3] = ["A", "B", "C"];
const ROLES: [&str; 2] = ["r", "s"];
const INDIVIDUALS: [&str; 2] = ["a", "b"];
const CORE: &str = include_str!("../data/traffic.kb");
const SAMPLE: &str = include_str!("../data/sample_store.json");

fn role() -> impl Strategy<Value = RoleExpr> {
    (0..ROLES.len(), any::<bool>()).prop_map(|(i, inv)| {
        let r = RoleExpr::named(ROLES[i]);
        if inv {
            r.inverse()
        } else {
            r
        }
    })
}

fn alc_leaf() -> BoxedStrategy<ConceptExpr> {
    prop_oneof![
        1 => Just(ConceptExpr::Top),
        1 => Just(ConceptExpr::Bottom),
        6 => (0..ATOMS.len()).prop_map(|i| ConceptExpr::atomic(ATOMS[i])),
    ]
    .boxed()
}

/// Concepts over the full abstract fragment: ALCI, counting and nominals.
fn concept() -> impl Strategy<Value = ConceptExpr> {
    let leaf = prop_oneof![
        4 => alc_leaf(),
        1 => (0u32..3, role()).prop_map(|(n, r)| ConceptExpr::AtLeast(n, r)),
        1 => (0u32..3, role()).prop_map(|(n, r)| ConceptExpr::AtMost(n, r)),
        1 => (role(), 0..INDIVIDUALS.len()).prop_map(|(r, i)| ConceptExpr::HasValue(r, INDIVIDUALS[i].into())),
        1 => btree_set(0..INDIVIDUALS.len(), 1..=2)
            .prop_map(|s| ConceptExpr::OneOf(s.into_iter().map(|i| INDIVIDUALS[i].to_string()).collect())),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(ConceptExpr::not),
            vec(inner.clone(), 2..=3).prop_map(ConceptExpr::And),
            vec(inner.clone(), 2..=3).prop_map(ConceptExpr::Or),
            (role(), inner.clone()).prop_map(|(r, c)| ConceptExpr::Exists(r, Box::new(c))),
            (role(), inner).prop_map(|(r, c)| ConceptExpr::ForAll(r, Box::new(c))),
        ]
    })
}

/// Plain ALC over named roles, the oracle's fragment.
fn alc() -> impl Strategy<Value = ConceptExpr> {
    alc_leaf().prop_recursive(3, 16, 2, |inner| {
        let named = (0..ROLES.len()).prop_map(|i| RoleExpr::named(ROLES[i]));
        prop_oneof![
            inner.clone().prop_map(ConceptExpr::not),
            vec(inner.clone(), 2).prop_map(ConceptExpr::And),
            vec(inner.clone(), 2).prop_map(ConceptExpr::Or),
            (named.clone(), inner.clone()).prop_map(|(r, c)| ConceptExpr::Exists(r, Box::new(c))),
            (named, inner).prop_map(|(r, c)| ConceptExpr::ForAll(r, Box::new(c))),
        ]
    })
}

fn interpretation() -> impl Strategy<Value = FiniteInterpretation> {
    (1usize..=3).prop_flat_map(|n| {
        let subset = move || btree_set(0..n, 0..=n);
        let pairs = move || btree_set((0..n, 0..n), 0..=n * n);
        (
            vec(subset(), ATOMS.len()),
            vec(pairs(), ROLES.len()),
            vec(0..n, INDIVIDUALS.len()),
        )
            .prop_map(move |(concepts, roles, inds)| {
                let mut i = FiniteInterpretation::with_domain(n);
                for (a, ext) in ATOMS.iter().zip(concepts) {
                    i.concept_ext.insert(a.to_string(), ext);
                }
                for (r, ext) in ROLES.iter().zip(roles) {
                    i.role_ext.insert(r.to_string(), ext);
                }
                for (a, x) in INDIVIDUALS.iter().zip(inds) {
                    i.individual_map.insert(a.to_string(), x);
                }
                i
            })
    })
}

fn kb_with(axioms: impl IntoIterator<Item = TBoxAxiom>) -> KnowledgeBase {
    let mut b = KnowledgeBase::builder();
    for a in INDIVIDUALS {
        b.declare_individual(a);
    }
    for ax in axioms {
        b.axiom(ax);
    }
    b.build().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn nnf_is_idempotent(c in concept()) {
        let once = nnf(&c);
        prop_assert_eq!(nnf(&once), once);
    }

    #[test]
    fn nnf_preserves_extensions(c in concept(), i in interpretation()) {
        prop_assert_eq!(evaluate(&c, &i).unwrap(), evaluate(&nnf(&c), &i).unwrap());
    }

    #[test]
    fn universal_restrictions_distribute_over_conjunction(
        c in concept(), d in concept(), r in role(), i in interpretation()
    ) {
        let split = ConceptExpr::And(vec![
            ConceptExpr::ForAll(r.clone(), Box::new(c.clone())),
            ConceptExpr::ForAll(r.clone(), Box::new(d.clone())),
        ]);
        let joined = ConceptExpr::ForAll(r, Box::new(ConceptExpr::And(vec![c, d])));
        prop_assert_eq!(evaluate(&split, &i).unwrap(), evaluate(&joined, &i).unwrap());
    }

    #[test]
    fn text_round_trip_is_a_fixpoint(
        subs in vec((0..ATOMS.len(), concept()), 0..4),
        eqs in vec((0..ATOMS.len(), concept()), 0..3),
        gcis in vec((concept(), concept()), 0..3),
    ) {
        let axioms = subs
            .into_iter()
            .map(|(a, c)| TBoxAxiom::sub_class(ConceptExpr::atomic(ATOMS[a]), c))
            .chain(eqs.into_iter().map(|(a, c)| TBoxAxiom::EquivalentClasses(ConceptExpr::atomic(ATOMS[a]), c)))
            .chain(gcis.into_iter().map(|(c, d)| TBoxAxiom::sub_class(c, d)));
        let kb = kb_with(axioms);
        let text = serialize_text(&kb);
        let back = parse_text(&text).unwrap();
        prop_assert!(kb.logically_equal(&back), "{}", text);
        let again = serialize_text(&back);
        prop_assert_eq!(serialize_text(&parse_text(&again).unwrap()), again);
    }

    #[test]
    fn load_rewrites_domain_range_and_disjointness(c in concept(), d in concept(), r in role()) {
        let kb = kb_with([
            TBoxAxiom::Domain { role: r.clone(), concept: c.clone() },
            TBoxAxiom::Range { role: r, concept: d.clone() },
            TBoxAxiom::DisjointClasses(c, d),
        ]);
        let rewritten = kb
            .tbox()
            .iter()
            .all(|ax| matches!(ax, TBoxAxiom::SubClassOf { .. } | TBoxAxiom::EquivalentClasses(..)));
        prop_assert!(rewritten);
        prop_assert_eq!(kb.tbox().len(), 3);
    }

    #[test]
    fn closure_axiom_collects_each_filler_once(fillers in vec(alc(), 1..6), noise in vec(alc(), 0..3)) {
        let r = RoleExpr::named("r");
        let axioms = fillers
            .iter()
            .map(|f| TBoxAxiom::sub_class(ConceptExpr::atomic("A"), ConceptExpr::some(r.clone(), f.clone())))
            .chain(noise.iter().map(|f| TBoxAxiom::sub_class(ConceptExpr::atomic("A"), ConceptExpr::some("s", f.clone()))));
        let kb = kb_with(axioms);
        let ax = build_closure_axiom("A", &r, &kb).unwrap();
        let mut expected: Vec<ConceptExpr> = Vec::new();
        for f in fillers {
            if !expected.contains(&f) {
                expected.push(f);
            }
        }
        match ax {
            TBoxAxiom::SubClassOf { sub, sup: ConceptExpr::ForAll(role, filler) } => {
                prop_assert_eq!(sub, ConceptExpr::atomic("A"));
                prop_assert_eq!(role, r);
                let got = match *filler {
                    ConceptExpr::Or(ops) if expected.len() > 1 => ops,
                    single => vec![single],
                };
                prop_assert_eq!(got, expected);
            }
            other => prop_assert!(false, "unexpected shape {:?}", other),
        }
    }
}

/// Random named hierarchies: up to eight classes with told and defined
/// structure plus a few general axioms.
fn hierarchy() -> impl Strategy<Value = KnowledgeBase> {
    const N: usize = 8;
    let name = |i: usize| format!("K{i}");
    let small = || {
        (0..N).prop_flat_map(move |i| {
            prop_oneof![
                Just(ConceptExpr::atomic(format!("K{i}"))),
                Just(ConceptExpr::some("r", ConceptExpr::atomic(format!("K{i}")))),
                Just(ConceptExpr::only("r", ConceptExpr::atomic(format!("K{i}")))),
                Just(ConceptExpr::not(ConceptExpr::atomic(format!("K{i}")))),
            ]
        })
    };
    let body = move || vec(small(), 1..=2).prop_map(|mut v| if v.len() == 1 { v.remove(0) } else { ConceptExpr::And(v) });
    (
        vec((0..N, body()), 0..8),
        vec((0..N, body()), 0..3),
        vec((body(), body()), 0..2),
    )
        .prop_map(move |(subs, eqs, gcis)| {
            let mut b = KnowledgeBase::builder();
            for i in 0..N {
                b.declare_class(name(i));
            }
            for (i, c) in subs {
                b.axiom(TBoxAxiom::sub_class(ConceptExpr::atomic(name(i)), c));
            }
            for (i, c) in eqs {
                b.axiom(TBoxAxiom::EquivalentClasses(ConceptExpr::atomic(name(i)), c));
            }
            for (c, d) in gcis {
                b.axiom(TBoxAxiom::sub_class(c, d));
            }
            b.build().unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn classification_matches_pairwise_subsumption(kb in hierarchy()) {
        let r = Reasoner::new(&kb);
        prop_assume!(r.is_consistent().unwrap());
        let tax = r.classify().unwrap();
        for a in kb.concept_names() {
            for b in kb.concept_names() {
                let pairwise = r.subsumes(&ConceptExpr::atomic(b), &ConceptExpr::atomic(a)).unwrap();
                prop_assert_eq!(tax.is_subclass(a, b), pairwise, "{} ⊑ {}\n{}", a, b, serialize_text(&kb));
            }
        }
    }

    #[test]
    fn realization_is_sound_and_most_specific(
        kb in hierarchy(),
        types in vec((0..3usize, 0..8usize), 1..5),
        links in vec((0..3usize, 0..3usize), 0..3),
    ) {
        use trafficdl::model::ABoxAssertion;
        let mut b = kb.to_builder();
        for (x, k) in types {
            b.assertion(ABoxAssertion::ClassAssertion {
                concept: ConceptExpr::atomic(format!("K{k}")),
                individual: format!("x{x}"),
            });
        }
        for (x, y) in links {
            b.assertion(ABoxAssertion::RoleAssertion {
                role: RoleExpr::named("r"),
                subject: format!("x{x}"),
                object: format!("x{y}"),
            });
        }
        let kb = b.build().unwrap();
        let r = Reasoner::new(&kb);
        prop_assume!(r.is_consistent().unwrap());
        let tax = r.classify().unwrap();
        for (x, classes) in r.realize(&tax).unwrap() {
            for a in &classes {
                prop_assert!(r.is_instance(&x, &ConceptExpr::atomic(a.as_str())).unwrap(), "{} not a {}", x, a);
                for b in &classes {
                    if a != b {
                        let below = r.subsumes(&ConceptExpr::atomic(a.as_str()), &ConceptExpr::atomic(b.as_str())).unwrap();
                        prop_assert!(!below, "{} ⊑ {} both reported for {}", b, a, x);
                    }
                }
            }
        }
    }

    #[test]
    fn inverse_and_transitive_role_inferences(len in 2usize..5, back in 0usize..4) {
        use trafficdl::model::ABoxAssertion;
        let mut b = KnowledgeBase::builder();
        b.rbox_mut().transitive_roles.insert("loc".into());
        for i in 0..len {
            b.assertion(ABoxAssertion::RoleAssertion {
                role: RoleExpr::named("loc"),
                subject: format!("n{i}"),
                object: format!("n{}", i + 1),
            });
        }
        let kb = b.build().unwrap();
        let r = Reasoner::new(&kb);
        let back = back.min(len - 1);
        // every later element is reachable through the transitive role
        let (first, next, last) = (format!("n{back}"), format!("n{}", back + 1), format!("n{len}"));
        let reach = ConceptExpr::some("loc", ConceptExpr::one_of([last.clone()]));
        prop_assert!(r.is_instance(&first, &reach).unwrap());
        let inverse = ConceptExpr::some(RoleExpr::inverse_of("loc"), ConceptExpr::one_of([first.clone()]));
        prop_assert!(r.is_instance(&next, &inverse).unwrap());
        prop_assert!(!r.is_instance(&last, &ConceptExpr::some("loc", ConceptExpr::Top)).unwrap());
    }
}

fn sample() -> Store {
    Store::from_json(SAMPLE).unwrap()
}

fn with_assignments(pairs: &BTreeSet<(i64, i64)>) -> Store {
    let mut store = sample();
    store.traffic_condition_2_postal_code = pairs
        .iter()
        .map(|&(c, p)| ConditionAssignment {
            traffic_condition_id: c,
            postal_code_id: p,
        })
        .collect();
    store
}

fn assignments() -> impl Strategy<Value = BTreeSet<(i64, i64)>> {
    btree_set((1i64..=14, 1i64..=2), 0..5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sync_axiom_count_and_purity(pairs in assignments()) {
        let core = parse_text(CORE).unwrap();
        let store = with_assignments(&pairs);
        let kb = synchronize(&core, &store).unwrap();
        let expected = core.axiom_count()
            + store.postal_codes.len() + store.streets.len() + store.districts.len()
            + store.street_2_postal_code.len() + store.street_2_district.len()
            + pairs.len();
        prop_assert_eq!(kb.axiom_count(), expected);
        prop_assert_eq!(synchronize(&core, &store).unwrap(), kb);
    }

    #[test]
    fn update_then_sync_reflects_exactly_the_new_assignments(
        pairs in assignments(),
        code in 1i64..=2,
        chosen in btree_set(1i64..=14, 0..4),
    ) {
        let core = parse_text(CORE).unwrap();
        let updated = update_assignments(&with_assignments(&pairs), code, &chosen).unwrap();
        let kb = synchronize(&core, &updated).unwrap();
        let individual = format!("c{}", updated.postal_code(code).unwrap().value);
        let mut found = BTreeSet::new();
        for ax in kb.tbox() {
            if let TBoxAxiom::SubClassOf { sub: ConceptExpr::Atomic(name), sup: ConceptExpr::HasValue(role, ind) } = ax {
                if role.name == "hasLocation" && *ind == individual {
                    found.insert(updated.condition_by_name(name).unwrap().id);
                }
            }
        }
        prop_assert_eq!(found, chosen);
    }

    #[test]
    fn dangers_roll_up_monotonically(pairs in assignments()) {
        let core = parse_text(CORE).unwrap();
        let store = with_assignments(&pairs);
        let snap = match Snapshot::build(&core, store.clone(), 1) {
            Ok(s) => s,
            // some random assignments make the knowledge base inconsistent
            Err(_) => return Ok(()),
        };
        let names = |scope, name: &str| -> BTreeSet<String> {
            snap.dangers(scope, name, "en").unwrap().into_iter().map(|l| l.class_name).collect()
        };
        for sp in &store.street_2_postal_code {
            let street = &store.streets.iter().find(|s| s.id == sp.street_id).unwrap().name;
            let code = &store.postal_code(sp.postal_code_id).unwrap().value;
            let p = names(Scope::PostalCode, code);
            let s = names(Scope::Street, street);
            prop_assert!(p.is_subset(&s), "{}: {:?} ⊄ {}: {:?}", code, p, street, s);
            for sd in store.street_2_district.iter().filter(|sd| sd.street_id == sp.street_id) {
                let district = &store.districts.iter().find(|d| d.id == sd.district_id).unwrap().name;
                let d = names(Scope::District, district);
                prop_assert!(s.is_subset(&d), "{}: {:?} ⊄ {}: {:?}", street, s, district, d);
            }
        }
    }
}

#[test]
fn subsumption_is_reflexive_and_transitive_on_the_bundled_ontology() {
    let kb = parse_text(CORE).unwrap();
    let r = Reasoner::new(&kb);
    let names: Vec<&String> = kb.concept_names().iter().collect();
    let mut sub = std::collections::BTreeMap::new();
    for a in &names {
        for b in &names {
            let holds = r.subsumes(&ConceptExpr::atomic(b.as_str()), &ConceptExpr::atomic(a.as_str())).unwrap();
            sub.insert((*a, *b), holds);
        }
    }
    for a in &names {
        assert!(sub[&(*a, *a)], "{a} not reflexive");
        for b in &names {
            for c in &names {
                if sub[&(*a, *b)] && sub[&(*b, *c)] {
                    assert!(sub[&(*a, *c)], "{a} ⊑ {b} ⊑ {c}");
                }
            }
        }
    }
}

#[test]
fn parse_errors_point_inside_the_input() {
    let text = CORE;
    let chars: Vec<char> = text.chars().collect();
    let mut checked = 0;
    for cut in (1..chars.len()).step_by(97) {
        let prefix: String = chars[..cut].iter().collect();
        for candidate in [prefix.clone(), format!("{prefix} ) Class: 9x")] {
            if let Err(e) = parse_text(&candidate) {
                let lines: Vec<&str> = candidate.split('\n').collect();
                let loc = e.location;
                assert!(loc.line >= 1 && loc.line <= lines.len(), "{loc} outside {} lines", lines.len());
                assert!(
                    loc.column >= 1 && loc.column <= lines[loc.line - 1].chars().count().max(1),
                    "{loc} outside line {:?}",
                    lines[loc.line - 1]
                );
                checked += 1;
            }
        }
    }
    assert!(checked > 20);
}

