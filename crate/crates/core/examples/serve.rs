//! Starts the query service on the bundled ontology and sample store.
//!
//! ```text
//! cargo run --example serve
//! curl 'http://127.0.0.1:8080/api/dangers?scope=district&name=StareMiasto'
//! ```
//!
//! The store is copied to a temporary directory so condition updates made
//! through the API leave the shipped sample untouched.

use trafficdl::service::{serve, Config};

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let dir = std::env::temp_dir().join("trafficdl-serve-example");
    std::fs::create_dir_all(&dir)?;
    let store = dir.join("store.json");
    std::fs::copy(format!("{data}/sample_store.json"), &store)?;

    let mut config = Config::new(format!("{data}/traffic.kb"), store);
    if let Ok(addr) = std::env::var("TRAFFICDL_LISTEN") {
        config.listen_address = addr;
    }
    serve(&config).await?;
    Ok(())
}
