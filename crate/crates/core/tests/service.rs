//! The query service over real HTTP, and its agreement with the CLI.

mod common;

use std::collections::BTreeSet;

use common::live::*;
use serde_json::json;
use trafficdl::cli;

fn run_cli(args: &[&str]) -> String {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("trafficdl").chain(args.iter().copied());
    let code = cli::run(argv, &mut out, &mut err);
    assert_eq!(code, 0, "{}", String::from_utf8_lossy(&err));
    String::from_utf8(out).unwrap()
}

/// Every (postal code, street, district) chain of a store.
fn chains(store: &trafficdl::store::Store) -> Vec<(String, String, String)> {
    let mut out = Vec::new();
    for sp in &store.street_2_postal_code {
        let street = store.streets.iter().find(|s| s.id == sp.street_id).unwrap();
        let code = store.postal_code(sp.postal_code_id).unwrap();
        for sd in store.street_2_district.iter().filter(|sd| sd.street_id == street.id) {
            let district = store.districts.iter().find(|d| d.id == sd.district_id).unwrap();
            out.push((code.value.clone(), street.name.clone(), district.name.clone()));
        }
    }
    out
}

#[test]
fn dangers_roll_up_along_every_chain() {
    for store in [sample(), rainy_sample()] {
        let server = LiveServer::start(&store);
        let chains = chains(&store);
        assert_eq!(chains.len(), 2);
        for (code, street, district) in chains {
            let names = |scope: &str, name: &str| -> BTreeSet<String> {
                let r = server.get(&format!("/api/dangers?scope={scope}&name={name}"));
                assert_eq!(r.status, 200, "{}", r.body);
                r.class_names().into_iter().collect()
            };
            let (p, s, d) = (names("postal_code", &code), names("street", &street), names("district", &district));
            assert!(p.is_subset(&s) && s.is_subset(&d), "{code} {p:?} / {street} {s:?} / {district} {d:?}");
        }
    }
}

#[test]
fn reads_are_public_and_updates_need_a_session() {
    let server = LiveServer::start(&sample());
    for path in ["/api/locations", "/api/questions", "/api/conditions", "/api/ontology?variant=core"] {
        assert_eq!(server.get(path).status, 200, "{path}");
    }
    let body = json!({"postal_code": "30-020", "condition_names": ["SnowyCondition"]});
    assert_eq!(server.post("/api/conditions", Some(&body), None).status, 401);
    assert_eq!(server.post("/api/conditions", Some(&body), Some("0".repeat(64).as_str())).status, 401);

    let login = server.post("/api/login", Some(&json!({"username": "sa", "password": "traffic"})), None);
    let token = login.json()["token"].as_str().unwrap().to_string();
    let second = server.post("/api/login", Some(&json!({"username": "sa", "password": "traffic"})), None);
    assert_ne!(second.json()["token"].as_str().unwrap(), token, "tokens are single-issue");
    let r = server.post("/api/conditions", Some(&body), Some(&token));
    assert_eq!(r.status, 200, "{}", r.body);
    assert_eq!(r.json()["updated_by"], "sa");
}

#[test]
fn readers_see_exactly_one_generation_during_syncs() {
    let report = sync_atomicity(25, 3);
    assert!(report.failures.is_empty(), "{:#?}", report.failures);
    assert_eq!(report.passed, report.iterations, "{report:?}");
}

#[test]
fn cli_sync_and_query_match_the_service() {
    let server = LiveServer::start(&sample());
    let dir = tempfile::tempdir().unwrap();
    let core = dir.path().join("traffic.kb");
    std::fs::write(&core, CORE).unwrap();
    let out = dir.path().join("synced.kb");
    run_cli(&[
        "sync",
        "--core",
        core.to_str().unwrap(),
        "--store",
        server.store_path.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);

    assert_eq!(server.post("/api/sync", None, None).status, 200);
    let served = server.get("/api/ontology?variant=synchronized");
    assert_eq!(served.status, 200);
    assert_eq!(std::fs::read_to_string(&out).unwrap(), served.body);

    let store = sample();
    for (scope, name, individual) in [
        ("postal_code", "30-020", "c30-020"),
        ("postal_code", "30-147", "c30-147"),
        ("street", "Szpitalna", "Szpitalna"),
        ("district", "StareMiasto", "StareMiasto"),
        ("district", "Bronowice", "Bronowice"),
    ] {
        assert!(chains(&store).iter().any(|c| [&c.0, &c.1, &c.2].contains(&&name.to_string())));
        let query = format!("TrafficDanger and hasCondition some (hasLocation value {individual})");
        let text = run_cli(&["query", out.to_str().unwrap(), &query]);
        let mut from_cli = BTreeSet::new();
        for line in text.lines() {
            for key in ["equivalents: ", "all_subclasses: "] {
                if let Some(rest) = line.strip_prefix(key) {
                    from_cli.extend(rest.split(", ").filter(|n| !n.is_empty() && *n != "Nothing").map(String::from));
                }
            }
        }
        let from_service: BTreeSet<String> = server
            .get(&format!("/api/dangers?scope={scope}&name={name}"))
            .class_names()
            .into_iter()
            .collect();
        assert_eq!(from_cli, from_service, "{scope} {name}");
    }
}
