use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::Store;
use crate::model::{ABoxAssertion, ConceptExpr, KnowledgeBase, ModelError, RoleExpr, TBoxAxiom};

pub const POSTAL_CODE_CLASS: &str = "PostalCodeLocation";
pub const STREET_CLASS: &str = "StreetLocation";
pub const DISTRICT_CLASS: &str = "DistrictLocation";
pub const LOCATION_ROLE: &str = "hasLocation";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyncError {
    #[error("core ontology lacks {0}")]
    MissingCoreEntity(String),
    #[error("individual name {0} is produced twice")]
    IndividualCollision(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Individual name for a postal code value: `30-020` becomes `c30-020`, which
/// is a bare identifier in the native syntax.
pub fn postal_individual(value: &str) -> String {
    format!("c{value}")
}

/// Builds a fresh knowledge base from `core` plus the store's locations and
/// condition assignments. `core` itself is not modified.
///
/// Adds, in table order: a class assertion per postal code, street and
/// district; `hasLocation(code, street)` and `hasLocation(street, district)`
/// per join row; and `Condition ⊑ hasLocation value code` per assignment.
pub fn synchronize(core: &KnowledgeBase, store: &Store) -> Result<KnowledgeBase, SyncError> {
    for class in [POSTAL_CODE_CLASS, STREET_CLASS, DISTRICT_CLASS] {
        if !core.concept_names().contains(class) {
            return Err(SyncError::MissingCoreEntity(format!("class {class}")));
        }
    }
    if !core.role_names().contains(LOCATION_ROLE) {
        return Err(SyncError::MissingCoreEntity(format!("role {LOCATION_ROLE}")));
    }
    for c in &store.traffic_conditions {
        if !core.concept_names().contains(&c.name) {
            return Err(SyncError::MissingCoreEntity(format!("class {}", c.name)));
        }
    }

    let mut taken: BTreeSet<String> = core.individual_names().clone();
    let mut claim = |name: String| {
        if taken.insert(name.clone()) {
            Ok(name)
        } else {
            Err(SyncError::IndividualCollision(name))
        }
    };
    let codes: BTreeMap<i64, String> = store
        .postal_codes
        .iter()
        .map(|p| Ok((p.id, claim(postal_individual(&p.value))?)))
        .collect::<Result<_, SyncError>>()?;
    let streets: BTreeMap<i64, String> = store
        .streets
        .iter()
        .map(|s| Ok((s.id, claim(s.name.clone())?)))
        .collect::<Result<_, SyncError>>()?;
    let districts: BTreeMap<i64, String> = store
        .districts
        .iter()
        .map(|d| Ok((d.id, claim(d.name.clone())?)))
        .collect::<Result<_, SyncError>>()?;

    let mut b = core.to_builder();
    let typed = |rows: Vec<&String>, class: &str, b: &mut crate::model::KbBuilder| {
        for name in rows {
            b.assertion(ABoxAssertion::ClassAssertion {
                concept: ConceptExpr::atomic(class),
                individual: name.clone(),
            });
        }
    };
    typed(store.postal_codes.iter().map(|p| &codes[&p.id]).collect(), POSTAL_CODE_CLASS, &mut b);
    typed(store.streets.iter().map(|s| &streets[&s.id]).collect(), STREET_CLASS, &mut b);
    typed(store.districts.iter().map(|d| &districts[&d.id]).collect(), DISTRICT_CLASS, &mut b);

    let located = |subject: &String, object: &String| ABoxAssertion::RoleAssertion {
        role: RoleExpr::named(LOCATION_ROLE),
        subject: subject.clone(),
        object: object.clone(),
    };
    for j in &store.street_2_postal_code {
        b.assertion(located(&codes[&j.postal_code_id], &streets[&j.street_id]));
    }
    for j in &store.street_2_district {
        b.assertion(located(&streets[&j.street_id], &districts[&j.district_id]));
    }

    let names: BTreeMap<i64, &str> = store.traffic_conditions.iter().map(|c| (c.id, c.name.as_str())).collect();
    for a in &store.traffic_condition_2_postal_code {
        b.axiom(TBoxAxiom::sub_class(
            ConceptExpr::atomic(names[&a.traffic_condition_id]),
            ConceptExpr::has_value(LOCATION_ROLE, codes[&a.postal_code_id].clone()),
        ));
    }
    Ok(b.build()?)
}
