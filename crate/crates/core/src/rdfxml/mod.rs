//! RDF/XML interchange for the OWL subset the engine understands.
//!
//! Import accepts bare fragments (an `owl:Class` element on its own, say) by
//! wrapping them in an `rdf:RDF` envelope, and resolves the usual `&owl;`,
//! `&rdf;`, `&rdfs;` and `&xsd;` entities even without a DOCTYPE.

mod export;
mod import;

use thiserror::Error;

pub use export::export_rdfxml;
pub use import::import_rdfxml;

use crate::model::ModelError;

pub(crate) const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub(crate) const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub(crate) const OWL: &str = "http://www.w3.org/2002/07/owl#";
pub(crate) const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
pub(crate) const XML: &str = "http://www.w3.org/XML/1998/namespace";
/// Namespace for property elements on exported individuals.
pub(crate) const KB: &str = "http://trafficdl.local/ontology#";

#[derive(Debug, Error)]
pub enum RdfXmlError {
    #[error("malformed XML: {0}")]
    Xml(String),
    #[error("unsupported construct `{element}` at {line}:{column}: {reason}")]
    UnsupportedConstruct {
        element: String,
        line: u32,
        column: u32,
        reason: String,
    },
    #[error("cannot export: {0}")]
    Inexpressible(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl RdfXmlError {
    /// True for both import-side and export-side unsupported content.
    pub fn is_unsupported(&self) -> bool {
        matches!(self, RdfXmlError::UnsupportedConstruct { .. } | RdfXmlError::Inexpressible(_))
    }
}

#[cfg(test)]
mod tests;
