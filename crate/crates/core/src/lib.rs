//! Description-logic knowledge base engine and the traffic-danger service
//! built on it.
//!
//! [`model`] holds concept expressions and knowledge bases, [`syntax`] and
//! [`rdfxml`] read and write them, and [`reasoner`] is a tableau reasoner
//! for classification, realization and DL queries. [`store`] keeps the
//! relational location data and synchronizes it into the core ontology;
//! [`service`] answers danger queries over HTTP and [`cli`] drives it all
//! from the command line.

pub mod cli;
pub mod model;
pub mod rdfxml;
pub mod reasoner;
pub mod service;
pub mod store;
pub mod syntax;
