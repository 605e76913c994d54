use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use weylnorm::document::Document;
use weylnorm::report::{self, NtOptions};
use weylnorm::selftest::{self, Level};
use weylnorm::twoadic::di4;
use weylnorm::Error;

/// Normalizer extensions of finite reflection groups.
///
/// Exit codes: 0 pass, 1 validation failure, 2 usage or parse error, 3 internal assertion.
/// The DI4 fixture directory can be overridden with WEYLNORM_FIXTURES.
#[derive(Parser)]
#[command(name = "weylnorm", version)]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the validators for a document.
    Validate { path: PathBuf },
    /// List the reflections with their markings.
    Markings { path: PathBuf },
    /// Build the normalizer extension.
    BuildNt {
        path: PathBuf,
        #[arg(long)]
        presentation_check: bool,
        #[arg(long)]
        split_check: bool,
        /// Print the full cocycle table.
        #[arg(long)]
        table: bool,
    },
    /// Compare two documents over the same group; exits 1 unless the extensions agree.
    Compare { first: PathBuf, second: PathBuf },
    /// Split a 2-adic lattice into factors and tag them.
    #[command(name = "classify2adic")]
    Classify2adic {
        path: PathBuf,
        #[arg(long)]
        precision: Option<u32>,
    },
    /// Catalog of compact connected Lie groups.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Run the acceptance criteria.
    Selftest {
        #[arg(long, value_enum, default_value = "quick")]
        level: LevelArg,
    },
    /// Regenerate the DI4 fixture from the oracle.
    Di4Fixture {
        #[arg(long, default_value_t = di4::FIXTURE_PRECISION)]
        precision: u32,
        /// Compare with the fixture in use instead of printing.
        #[arg(long)]
        check: bool,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    List,
    /// Print an entry as a document.
    Export {
        name: String,
        #[arg(long)]
        rootsystem: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } | Error::Io(_) | Error::UnknownEntry(_) => 2,
        Error::Assertion(_) => 3,
        _ => 1,
    }
}

fn read(path: &Path) -> Result<Document, Error> {
    Document::parse(&std::fs::read_to_string(path)?)
}

fn emit<T: Serialize>(json: bool, value: &T, text: String) {
    if json {
        println!("{}", serde_json::to_string_pretty(value).expect("reports serialize"));
    } else {
        print!("{text}");
    }
}

fn status(ok: bool) -> u8 {
    if ok {
        0
    } else {
        1
    }
}

fn run(cli: &Cli) -> Result<u8, Error> {
    let json = cli.json;
    match &cli.command {
        Command::Validate { path } => {
            let r = report::validate(&read(path)?)?;
            emit(json, &r, r.render());
            Ok(status(r.passed()))
        }
        Command::Markings { path } => {
            let r = report::markings(&read(path)?)?;
            emit(json, &r, r.render());
            Ok(0)
        }
        Command::BuildNt { path, presentation_check, split_check, table } => {
            let opts = NtOptions { presentation_check: *presentation_check, split_check: *split_check, table: *table };
            let r = report::build_nt(&read(path)?, opts)?;
            emit(json, &r, r.render());
            Ok(status(r.passed()))
        }
        Command::Compare { first, second } => {
            let r = report::compare(&read(first)?, &read(second)?)?;
            emit(json, &r, r.render());
            Ok(status(r.equivalent()))
        }
        Command::Classify2adic { path, precision } => {
            let r = report::classify2adic(&read(path)?, *precision)?;
            emit(json, &r, r.render());
            Ok(0)
        }
        Command::Catalog { action: CatalogAction::List } => {
            let rows = report::catalog_rows()?;
            emit(json, &rows, report::render_catalog(&rows));
            Ok(0)
        }
        Command::Catalog { action: CatalogAction::Export { name, rootsystem } } => {
            let doc = report::export_entry(name, *rootsystem)?;
            let text = doc.render();
            emit(json, &text, text.clone());
            Ok(0)
        }
        Command::Selftest { level } => {
            let level = match level {
                LevelArg::Quick => Level::Quick,
                LevelArg::Full => Level::Full,
            };
            let r = selftest::run(level);
            emit(json, &r, report::render_selftest(&r));
            Ok(status(r.passed()))
        }
        Command::Di4Fixture { precision, check } => {
            let fresh = di4::render_fixture(&di4::di4_oracle(*precision)?)?;
            if *check {
                let same = fresh == di4::fixture_text()?;
                let text = if same { "fixture matches the oracle\n" } else { "fixture differs from the oracle\n" };
                emit(json, &same, text.to_string());
                Ok(status(same))
            } else {
                emit(json, &fresh, fresh.clone());
                Ok(0)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            if cli.json {
                println!("{}", serde_json::json!({ "error": e.to_string() }));
            }
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
