//! Command-line front end. Exit codes: 0 success, 1 domain error, 2 usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::model::KnowledgeBase;
use crate::rdfxml::{export_rdfxml, import_rdfxml, RdfXmlError};
use crate::reasoner::{Reasoner, ReasonerError};
use crate::service::{self, Config, StartupError};
use crate::store::{hash_password, load_store, synchronize, StoreError, SyncError};
use crate::syntax::{parse_concept, parse_text, serialize_text, ParseError};

#[derive(Debug, Parser)]
#[command(name = "trafficdl", version, about = "Description-logic knowledge bases and the traffic-danger service")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a knowledge base and check its consistency.
    Check {
        /// Knowledge base, native text or RDF/XML (detected from the content).
        kb: PathBuf,
    },
    /// Print the inferred class hierarchy.
    Classify {
        kb: PathBuf,
        /// `tree` indents subclasses; `pairs` prints one tab-separated `Sub Sup` line per subsumption.
        #[arg(long, value_enum, default_value_t = Format::Tree)]
        format: Format,
    },
    /// Decide satisfiability of a class expression.
    Sat {
        kb: PathBuf,
        /// Class expression in the native syntax, e.g. `Computer and hasConnection only Nothing`.
        concept: String,
    },
    /// Run a DL query: equivalents, super- and subclasses, instances.
    Query { kb: PathBuf, concept: String },
    /// Most specific classes of every individual.
    Realize { kb: PathBuf },
    /// Merge a store into a core ontology and write the result.
    Sync {
        /// Core ontology.
        #[arg(long)]
        core: PathBuf,
        /// JSON store document.
        #[arg(long)]
        store: PathBuf,
        /// Where to write the synchronized ontology.
        #[arg(long)]
        out: PathBuf,
    },
    /// Convert between the native text format and RDF/XML.
    Convert {
        /// RDF/XML input becomes native text and vice versa.
        input: PathBuf,
        output: PathBuf,
    },
    /// Run the HTTP service.
    Serve {
        /// Key-value configuration file, see data/server.conf.
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the SHA-1 digest stored for a password.
    HashPassword { password: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Tree,
    Pairs,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{path}:{source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("{path}: {source}")]
    RdfXml { path: PathBuf, source: RdfXmlError },
    #[error("concept expression: {0}")]
    Concept(ParseError),
    #[error(transparent)]
    Reasoner(#[from] ReasonerError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Sync(#[from] SyncError),
    #[error(transparent)]
    Startup(#[from] StartupError),
    #[error("knowledge base is inconsistent")]
    Inconsistent,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

fn is_rdfxml(text: &str) -> bool {
    text.trim_start().starts_with('<')
}

/// Loads a knowledge base in either format.
pub fn load_kb(path: &Path) -> Result<KnowledgeBase, CliError> {
    let text = read(path)?;
    if is_rdfxml(&text) {
        import_rdfxml(&text).map_err(|source| CliError::RdfXml {
            path: path.to_path_buf(),
            source,
        })
    } else {
        parse_text(&text).map_err(|source| CliError::Parse {
            path: path.to_path_buf(),
            source,
        })
    }
}

fn join(names: &std::collections::BTreeSet<String>) -> String {
    names.iter().cloned().collect::<Vec<_>>().join(", ")
}

fn execute(command: Command, out: &mut dyn Write) -> Result<(), CliError> {
    // Output is best-effort: a closed stdout is not a domain error.
    match command {
        Command::Check { kb } => {
            let kb = load_kb(&kb)?;
            if !Reasoner::new(&kb).is_consistent()? {
                return Err(CliError::Inconsistent);
            }
            let _ = writeln!(
                out,
                "consistent: {} classes, {} roles, {} individuals, {} axioms",
                kb.concept_names().len(),
                kb.role_names().len(),
                kb.individual_names().len(),
                kb.axiom_count()
            );
        }
        Command::Classify { kb, format } => {
            let tax = Reasoner::new(&load_kb(&kb)?).classify()?;
            match format {
                Format::Tree => {
                    let _ = write!(out, "{}", tax.render_tree());
                }
                Format::Pairs => {
                    for (sub, sup) in tax.subsumption_pairs() {
                        let _ = writeln!(out, "{sub}\t{sup}");
                    }
                }
            }
        }
        Command::Sat { kb, concept } => {
            let kb = load_kb(&kb)?;
            let c = parse_concept(&concept).map_err(CliError::Concept)?;
            let verdict = Reasoner::new(&kb).is_satisfiable(&c)?;
            let _ = writeln!(out, "{}", if verdict { "satisfiable" } else { "unsatisfiable" });
        }
        Command::Query { kb, concept } => {
            let kb = load_kb(&kb)?;
            let c = parse_concept(&concept).map_err(CliError::Concept)?;
            let r = Reasoner::new(&kb);
            let tax = r.classify()?;
            let a = r.dl_query(&c, &tax)?;
            let _ = writeln!(out, "equivalents: {}", join(&a.equivalents));
            let _ = writeln!(out, "direct_superclasses: {}", join(&a.direct_superclasses));
            let _ = writeln!(out, "direct_subclasses: {}", join(&a.direct_subclasses));
            let _ = writeln!(out, "all_subclasses: {}", join(&a.all_subclasses));
            let _ = writeln!(out, "instances: {}", join(&a.instances));
        }
        Command::Realize { kb } => {
            let r = Reasoner::new(&load_kb(&kb)?);
            let tax = r.classify()?;
            for (ind, classes) in r.realize(&tax)? {
                let _ = writeln!(out, "{ind}: {}", join(&classes));
            }
        }
        Command::Sync { core, store, out: target } => {
            let kb = synchronize(&load_kb(&core)?, &load_store(&store)?)?;
            write(&target, &serialize_text(&kb))?;
            let _ = writeln!(out, "wrote {} ({} axioms)", target.display(), kb.axiom_count());
        }
        Command::Convert { input, output } => {
            let text = read(&input)?;
            let rendered = if is_rdfxml(&text) {
                serialize_text(&load_kb(&input)?)
            } else {
                export_rdfxml(&load_kb(&input)?).map_err(|source| CliError::RdfXml { path: output.clone(), source })?
            };
            write(&output, &rendered)?;
        }
        Command::Serve { config } => {
            let config = Config::load(&config)?;
            let rt = tokio::runtime::Runtime::new().map_err(|source| CliError::Startup(StartupError::Bind {
                address: config.listen_address.clone(),
                source,
            }))?;
            rt.block_on(service::serve(&config))?;
        }
        Command::HashPassword { password } => {
            let _ = writeln!(out, "{}", hash_password(&password));
        }
    }
    Ok(())
}

/// Parses `args` (program name first) and runs the command, returning the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CORE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data/traffic.kb");
    const STORE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data/sample_store.json");

    fn cli(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("trafficdl").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn classify_tree_shows_low_friction_under_weather() {
        let (code, out, _) = cli(&["classify", CORE]);
        assert_eq!(code, 0);
        assert!(out.contains("    WeatherDanger\n      BlindingLightDanger\n      LowFrictionDanger\n        FreezingSurfaceDanger\n"));
        let (_, pairs, _) = cli(&["classify", CORE, "--format", "pairs"]);
        assert!(pairs.lines().any(|l| l == "LowFrictionDanger\tWeatherDanger"));
    }

    #[test]
    fn sat_on_computers_without_connections() {
        let (code, out, _) = cli(&["sat", CORE, "Computer and hasConnection only Nothing"]);
        assert_eq!((code, out.as_str()), (0, "satisfiable\n"));
        let (_, out, _) = cli(&["sat", CORE, "WeatherCondition and not TrafficCondition"]);
        assert_eq!(out, "unsatisfiable\n");
    }

    #[test]
    fn sync_then_query() {
        let dir = tempfile::tempdir().unwrap();
        let synced = dir.path().join("synced.kb");
        let synced = synced.to_str().unwrap();
        let (code, _, err) = cli(&["sync", "--core", CORE, "--store", STORE, "--out", synced]);
        assert_eq!(code, 0, "{err}");
        let (code, out, _) = cli(&[
            "query",
            synced,
            "TrafficDanger and hasCondition some (hasLocation value c30-020)",
        ]);
        assert_eq!(code, 0);
        assert!(out.contains("all_subclasses: TrafficCongestionDanger\n"), "{out}");

        let (_, out, _) = cli(&["realize", synced]);
        assert!(out.contains("c30-020: PostalCodeLocation\n"), "{out}");
        assert!(cli(&["check", synced]).1.starts_with("consistent:"));
    }

    #[test]
    fn convert_both_ways() {
        let dir = tempfile::tempdir().unwrap();
        let owl = dir.path().join("t.owl");
        let back = dir.path().join("t.kb");
        assert_eq!(cli(&["convert", CORE, owl.to_str().unwrap()]).0, 0);
        assert!(std::fs::read_to_string(&owl).unwrap().starts_with("<?xml"));
        assert_eq!(cli(&["convert", owl.to_str().unwrap(), back.to_str().unwrap()]).0, 0);
        let original = parse_text(&std::fs::read_to_string(CORE).unwrap()).unwrap();
        let round = parse_text(&std::fs::read_to_string(&back).unwrap()).unwrap();
        assert!(original.logically_equal(&round));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(cli(&["frobnicate"]).0, 2);
        assert_eq!(cli(&["classify"]).0, 2);
        assert_eq!(cli(&["--help"]).0, 0);
        let (code, _, err) = cli(&["check", "/nonexistent.kb"]);
        assert_eq!(code, 1);
        assert!(err.starts_with("error: cannot read"));

        let dir = tempfile::tempdir().unwrap();
        let bad = dir.path().join("bad.kb");
        std::fs::write(&bad, "Class: A\n  SubClassOf: r some").unwrap();
        let (code, _, err) = cli(&["check", bad.to_str().unwrap()]);
        assert_eq!(code, 1);
        assert!(err.contains("bad.kb:2:"), "{err}");
        std::fs::write(&bad, "Individual: x Types: A, not A").unwrap();
        assert_eq!(cli(&["check", bad.to_str().unwrap()]), (1, String::new(), "error: knowledge base is inconsistent\n".into()));
    }

    #[test]
    fn hash_password_prints_digest() {
        assert_eq!(cli(&["hash-password", "traffic"]).1, "c8ab51895da8a2a3ea04f31bd7e317af88596327\n");
    }
}
