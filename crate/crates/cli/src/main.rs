use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use solvcoh::catalog::{
    builtin_catalog, cohomology_report, load_config, to_sorted_json, verify, verify_c17, verify_catalog, Catalog,
    CatalogEntry, CatalogError, CheckKind, VerificationReport,
};

#[derive(Parser)]
#[command(name = "solvcoh", version, about = "Exact cohomology of solvable Lie algebras and their dense subgroups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Check {
    Main,
    Decomposition,
    Spectral,
    Restriction,
    C17,
    All,
}

impl From<Check> for CheckKind {
    fn from(c: Check) -> Self {
        match c {
            Check::Main => CheckKind::Main,
            Check::Decomposition => CheckKind::Decomposition,
            Check::Spectral => CheckKind::Spectral,
            Check::Restriction => CheckKind::Restriction,
            Check::C17 => CheckKind::C17,
            Check::All => CheckKind::All,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// List the builtin entries with their certificates.
    Catalog {
        #[arg(long)]
        json: bool,
    },
    /// Per-degree dimensions and ring fingerprints, Lie and group side.
    Cohomology {
        #[arg(long, conflicts_with = "input", required_unless_present = "input")]
        entry: Option<String>,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        max_degree: Option<usize>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Run verification checks; without --entry or --input, every builtin entry
    /// (or the BS(1, n) family for c17).
    Verify {
        #[arg(long, conflicts_with = "input")]
        entry: Option<String>,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "all")]
        check: Check,
        #[arg(long)]
        json: bool,
    },
}

fn entry_from(catalog: &Catalog, entry: Option<&str>, input: Option<&PathBuf>) -> Result<Option<CatalogEntry>, CatalogError> {
    match (entry, input) {
        (Some(n), _) => Ok(Some(catalog.get(n)?.clone())),
        (None, Some(p)) => Ok(Some(load_config(p)?)),
        (None, None) => Ok(None),
    }
}

/// Prints to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn print_reports(reports: &[VerificationReport], as_json: bool) {
    if as_json {
        let v: Vec<_> = reports.iter().map(VerificationReport::to_json).collect();
        let v = if v.len() == 1 { v.into_iter().next().unwrap() } else { json!(v) };
        emit(&format!("{}\n", to_sorted_json(&v)));
    } else {
        for r in reports {
            emit(&r.to_text());
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CatalogError> {
    let catalog = builtin_catalog();
    match cli.command {
        Command::Catalog { json } => {
            if json {
                let v: Vec<_> = catalog
                    .entries
                    .iter()
                    .map(|e| {
                        json!({
                            "name": e.name(),
                            "certificates": e.certificates.to_json(),
                            "expected_failure": e.expected_failure(),
                            "lie_rejection": e.lie_rejection,
                        })
                    })
                    .collect();
                emit(&format!("{}\n", to_sorted_json(&json!(v))));
            } else {
                for e in &catalog.entries {
                    let status = match (e.expected_failure(), e.certificates.failing_hypothesis(), &e.lie_rejection) {
                        (Some(f), _, _) => format!("expected FAIL: {f}"),
                        (None, Some(h), _) => format!("hypothesis fails: {h}"),
                        (None, None, Some(r)) => format!("Lie side disabled: {r}"),
                        _ => "certificates YES".to_string(),
                    };
                    emit(&format!("{:<18} dim u = {}, dim t = {}, {status}\n", e.name(), e.u_dim(), e.hull.t_dim()));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Cohomology { entry, input, max_degree, format } => {
            let e = entry_from(&catalog, entry.as_deref(), input.as_ref())?.expect("clap requires a source");
            let rep = cohomology_report(&e, max_degree)?;
            match format {
                Format::Table => emit(&rep.to_table()),
                Format::Json => emit(&format!("{}\n", to_sorted_json(&rep.to_json()))),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { entry, input, check, json } => {
            let kind = CheckKind::from(check);
            let reports = match entry_from(&catalog, entry.as_deref(), input.as_ref())? {
                Some(e) => vec![verify(&e, kind, &catalog)],
                None if kind == CheckKind::C17 => vec![verify_c17(&catalog)?],
                None => verify_catalog(&catalog, kind),
            };
            print_reports(&reports, json);
            Ok(if reports.iter().all(VerificationReport::passed) { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
