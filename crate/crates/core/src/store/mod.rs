//! Relational location/condition data and its synchronization into the core
//! ontology.
//!
//! The store is a single JSON document whose tables mirror the `traffic`
//! database: `streets`, `districts`, `postal_codes`, the two location join
//! tables, `traffic_conditions`, `traffic_condition_2_postal_code` and
//! `access`.

mod sync;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha1::{Digest, Sha1};
use thiserror::Error;

pub use sync::{postal_individual, synchronize, SyncError, DISTRICT_CLASS, LOCATION_ROLE, POSTAL_CODE_CLASS, STREET_CLASS};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Street {
    pub id: i64,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct District {
    pub id: i64,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PostalCode {
    pub id: i64,
    pub value: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StreetDistrict {
    pub street_id: i64,
    pub district_id: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StreetPostalCode {
    pub street_id: i64,
    pub postal_code_id: i64,
}

/// A node of the condition forest. `name` must be a class of the core ontology.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TrafficCondition {
    pub id: i64,
    pub parent_id: Option<i64>,
    pub name: String,
    #[serde(default)]
    pub description: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ConditionAssignment {
    pub traffic_condition_id: i64,
    pub postal_code_id: i64,
}

/// A trusted user. `password` holds the lowercase hex SHA-1 digest.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Access {
    pub id: i64,
    pub username: String,
    pub password: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct Store {
    pub streets: Vec<Street>,
    pub districts: Vec<District>,
    pub postal_codes: Vec<PostalCode>,
    pub street_2_district: Vec<StreetDistrict>,
    pub street_2_postal_code: Vec<StreetPostalCode>,
    pub traffic_conditions: Vec<TrafficCondition>,
    pub traffic_condition_2_postal_code: Vec<ConditionAssignment>,
    pub access: Vec<Access>,
}

#[derive(Serialize, Deserialize)]
struct Document {
    schema_version: u32,
    #[serde(flatten)]
    store: Store,
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("malformed store document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema_version {found} (expected {SCHEMA_VERSION})")]
    SchemaVersion { found: u64 },
    #[error("{table}[{row}]: {reason}")]
    Integrity { table: &'static str, row: usize, reason: String },
    #[error("unknown {table} id {id}")]
    UnknownId { table: &'static str, id: i64 },
}

fn integrity(table: &'static str, row: usize, reason: impl Into<String>) -> StoreError {
    StoreError::Integrity {
        table,
        row,
        reason: reason.into(),
    }
}

fn unique_ids(table: &'static str, ids: impl Iterator<Item = i64>) -> Result<HashSet<i64>, StoreError> {
    let mut seen = HashSet::new();
    for (row, id) in ids.enumerate() {
        if !seen.insert(id) {
            return Err(integrity(table, row, format!("duplicate id {id}")));
        }
    }
    Ok(seen)
}

fn unique_rows<T: Eq + std::hash::Hash>(table: &'static str, rows: &[T]) -> Result<(), StoreError> {
    let mut seen = HashSet::new();
    for (row, r) in rows.iter().enumerate() {
        if !seen.insert(r) {
            return Err(integrity(table, row, "duplicate row"));
        }
    }
    Ok(())
}

fn refers(table: &'static str, row: usize, column: &str, id: i64, ids: &HashSet<i64>) -> Result<(), StoreError> {
    if ids.contains(&id) {
        Ok(())
    } else {
        Err(integrity(table, row, format!("{column} {id} does not exist")))
    }
}

impl Store {
    /// Checks id uniqueness, referential integrity, the condition forest and
    /// digest format.
    pub fn validate(&self) -> Result<(), StoreError> {
        let streets = unique_ids("streets", self.streets.iter().map(|s| s.id))?;
        let districts = unique_ids("districts", self.districts.iter().map(|d| d.id))?;
        let codes = unique_ids("postal_codes", self.postal_codes.iter().map(|p| p.id))?;
        let conditions = unique_ids("traffic_conditions", self.traffic_conditions.iter().map(|c| c.id))?;
        unique_ids("access", self.access.iter().map(|a| a.id))?;

        let mut values = HashSet::new();
        for (row, p) in self.postal_codes.iter().enumerate() {
            if !values.insert(&p.value) {
                return Err(integrity("postal_codes", row, format!("duplicate value {}", p.value)));
            }
        }
        for (row, j) in self.street_2_district.iter().enumerate() {
            refers("street_2_district", row, "street_id", j.street_id, &streets)?;
            refers("street_2_district", row, "district_id", j.district_id, &districts)?;
        }
        unique_rows("street_2_district", &self.street_2_district)?;
        for (row, j) in self.street_2_postal_code.iter().enumerate() {
            refers("street_2_postal_code", row, "street_id", j.street_id, &streets)?;
            refers("street_2_postal_code", row, "postal_code_id", j.postal_code_id, &codes)?;
        }
        unique_rows("street_2_postal_code", &self.street_2_postal_code)?;

        let mut names = HashSet::new();
        let parents: BTreeMap<i64, Option<i64>> = self.traffic_conditions.iter().map(|c| (c.id, c.parent_id)).collect();
        for (row, c) in self.traffic_conditions.iter().enumerate() {
            if !names.insert(&c.name) {
                return Err(integrity("traffic_conditions", row, format!("duplicate name {}", c.name)));
            }
            if let Some(p) = c.parent_id {
                refers("traffic_conditions", row, "parent_id", p, &conditions)?;
            }
            let mut seen = BTreeSet::from([c.id]);
            let mut cur = c.parent_id;
            while let Some(p) = cur {
                if !seen.insert(p) {
                    return Err(integrity("traffic_conditions", row, "parent links form a cycle"));
                }
                cur = parents.get(&p).copied().flatten();
            }
        }
        for (row, a) in self.traffic_condition_2_postal_code.iter().enumerate() {
            let table = "traffic_condition_2_postal_code";
            refers(table, row, "traffic_condition_id", a.traffic_condition_id, &conditions)?;
            refers(table, row, "postal_code_id", a.postal_code_id, &codes)?;
        }
        unique_rows("traffic_condition_2_postal_code", &self.traffic_condition_2_postal_code)?;

        let mut users = HashSet::new();
        for (row, a) in self.access.iter().enumerate() {
            if !users.insert(&a.username) {
                return Err(integrity("access", row, format!("duplicate username {}", a.username)));
            }
            let hex_ok = a.password.len() == 40 && a.password.bytes().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f'));
            if !hex_ok {
                return Err(integrity("access", row, "password is not a 40-character lowercase hex digest"));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Store, StoreError> {
        let raw: serde_json::Value = serde_json::from_str(text)?;
        let found = raw.get("schema_version").and_then(|v| v.as_u64()).unwrap_or(0);
        if found != u64::from(SCHEMA_VERSION) {
            return Err(StoreError::SchemaVersion { found });
        }
        let doc: Document = serde_json::from_value(raw)?;
        doc.store.validate()?;
        Ok(doc.store)
    }

    pub fn to_json(&self) -> String {
        let doc = Document {
            schema_version: SCHEMA_VERSION,
            store: self.clone(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("store serializes");
        s.push('\n');
        s
    }

    pub fn postal_code(&self, id: i64) -> Option<&PostalCode> {
        self.postal_codes.iter().find(|p| p.id == id)
    }

    pub fn postal_code_by_value(&self, value: &str) -> Option<&PostalCode> {
        self.postal_codes.iter().find(|p| p.value == value)
    }

    pub fn condition_by_name(&self, name: &str) -> Option<&TrafficCondition> {
        self.traffic_conditions.iter().find(|c| c.name == name)
    }

    /// Assigned condition ids for a postal code, ascending.
    pub fn assignments_for(&self, postal_code_id: i64) -> BTreeSet<i64> {
        self.traffic_condition_2_postal_code
            .iter()
            .filter(|a| a.postal_code_id == postal_code_id)
            .map(|a| a.traffic_condition_id)
            .collect()
    }
}

/// Reads and validates a store file.
pub fn load_store(path: impl AsRef<Path>) -> Result<Store, StoreError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Store::from_json(&text)
}

/// Validates and writes a store, replacing the file atomically.
pub fn save_store(store: &Store, path: impl AsRef<Path>) -> Result<(), StoreError> {
    store.validate()?;
    let path = path.as_ref();
    let io_err = |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    fs::write(&tmp, store.to_json()).map_err(io_err)?;
    fs::rename(&tmp, path).map_err(io_err)
}

/// Lowercase hex SHA-1 of a password, the digest format of the `access` table.
pub fn hash_password(password: &str) -> String {
    hex::encode(Sha1::digest(password.as_bytes()))
}

pub fn verify_credentials(store: &Store, username: &str, password: &str) -> bool {
    store
        .access
        .iter()
        .find(|a| a.username == username)
        .is_some_and(|a| a.password == hash_password(password))
}

/// Replaces the condition set of one postal code. The input store is left
/// untouched; the caller persists the returned one.
pub fn update_assignments(store: &Store, postal_code_id: i64, condition_ids: &BTreeSet<i64>) -> Result<Store, StoreError> {
    if store.postal_code(postal_code_id).is_none() {
        return Err(StoreError::UnknownId {
            table: "postal_codes",
            id: postal_code_id,
        });
    }
    for &id in condition_ids {
        if !store.traffic_conditions.iter().any(|c| c.id == id) {
            return Err(StoreError::UnknownId {
                table: "traffic_conditions",
                id,
            });
        }
    }
    let mut next = store.clone();
    next.traffic_condition_2_postal_code.retain(|a| a.postal_code_id != postal_code_id);
    next.traffic_condition_2_postal_code
        .extend(condition_ids.iter().map(|&traffic_condition_id| ConditionAssignment {
            traffic_condition_id,
            postal_code_id,
        }));
    Ok(next)
}
