//! Command-line front end: class enumeration, order arithmetic, series
//! sizes, bound selection and ledger verification, with reproducible text or
//! JSON output.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or parse error.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use exceptional_core::generic_order::{
    self, compute_e, ell_valuation_symbolic, generic_order_of, TwistTag,
};
use exceptional_core::ledger::{self, RunOptions};
use exceptional_core::par::Parallelism;
use exceptional_core::rootsys::{build_root_datum, CartanType};
use exceptional_core::torsion::{self, enumerate_quasi_isolated};
use exceptional_core::unipotent::{
    self, DisconnectedConvention, SeriesSizeQuery, UnipotentCountTable,
};
use exceptional_core::REPORT_SCHEMA;

#[derive(Parser)]
#[command(name = "exceptional", version, about = "Exact arithmetic for exceptional groups: quasi-isolated classes, generic orders and block inequality ledgers")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Force the sequential code path (default uses all cores).
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the quasi-isolated torsion classes of an exceptional group.
    QuasiIsolated {
        #[arg(long)]
        group: String,
        /// Sweep bound on class orders.
        #[arg(long, default_value_t = 6)]
        max_order: u32,
        /// Opt in to E8 sweeps (expected budget: a few seconds, < 1 GB).
        #[arg(long)]
        e8: bool,
    },
    /// Print the generic order as a cyclotomic product.
    Order {
        #[arg(long)]
        group: String,
        /// Frobenius twist: 1 (split), 2, or 3 (triality).
        #[arg(long, default_value_t = 1)]
        twist: u8,
        /// Also print the ℓ-part of the order.
        #[arg(long)]
        ell: Option<u64>,
        /// Sample prime power (determines e and enables numeric valuation).
        #[arg(long)]
        q: Option<u64>,
        /// Order of q modulo ℓ, when no sample q is given.
        #[arg(long)]
        e: Option<u32>,
    },
    /// Print the symbolic ℓ-part of a generic order.
    EllPart {
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 1)]
        twist: u8,
        #[arg(long)]
        ell: u64,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        e: Option<u32>,
    },
    /// Size of the Lusztig series for a centralizer type string.
    SeriesSize {
        /// Centralizer label, e.g. `A5+A2`, `2A5+T1`, `A1+A1(q3)`.
        #[arg(long)]
        centralizer: String,
        /// Component group order |A(s)^F|.
        #[arg(long, default_value_t = 1)]
        component_order: u64,
        /// Disconnected-centralizer convention: `explicit:<n>` or `scale`.
        #[arg(long)]
        convention: Option<String>,
        /// Override the exceptional count table.
        #[arg(long)]
        counts_file: Option<PathBuf>,
    },
    /// Upper-bound descriptor for the Brauer characters of a quasi-isolated
    /// class at a bad prime.
    Bound {
        #[arg(long)]
        group: String,
        #[arg(long)]
        ell: u64,
        /// Order of the class.
        #[arg(long)]
        order: u32,
        /// Centralizer type to disambiguate classes of equal order.
        #[arg(long)]
        centralizer: Option<String>,
        #[arg(long)]
        e8: bool,
    },
    /// Verify a block ledger.
    Check {
        /// Ledger file (defaults to the ledger shipped with the toolkit).
        #[arg(long)]
        ledger: Option<PathBuf>,
        /// Sample prime power for numeric cross-checks (needs e_3(q) = 1
        /// when defect rows are present).
        #[arg(long, default_value_t = 7)]
        q: u64,
    },
    /// Recompute the defect-group table of the E7 blocks at ℓ = 3, e = 1.
    DefectTableE7 {
        #[arg(long)]
        ledger: Option<PathBuf>,
        #[arg(long, default_value_t = 7)]
        q: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let par = if cli.sequential { Parallelism::Sequential } else { Parallelism::default() };
    match cli.command {
        Command::QuasiIsolated { group, max_order, e8 } => {
            let label = parse_group(&group)?;
            guard_e8(label, e8)?;
            let datum = build_root_datum(label)?;
            let inv = enumerate_quasi_isolated(&datum, max_order, par)?;
            match cli.format {
                Format::Text => print!("{}", torsion::render_inventory(&inv)),
                Format::Json => print_json(&torsion::inventory_report(&inv))?,
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Order { group, twist, ell, q, e } => {
            let label = parse_group(&group)?;
            let order = generic_order_of(label, parse_twist(twist)?)?;
            let ell_part = ell
                .map(|ell| resolve_ell_part(&order, ell, q, e))
                .transpose()?;
            match cli.format {
                Format::Text => {
                    println!("{}", order.render());
                    if let Some(part) = &ell_part {
                        println!("{}", part.0);
                        if let Some(v) = part.1 {
                            println!("valuation at q={}: {}", q.unwrap(), v);
                        }
                    }
                }
                Format::Json => print_json(&serde_json::json!({
                    "schema": REPORT_SCHEMA,
                    "group": label.to_string(),
                    "twist": twist,
                    "order": order.render(),
                    "factors": order,
                    "ell_part": ell_part.as_ref().map(|p| &p.0),
                    "valuation": ell_part.as_ref().and_then(|p| p.1),
                }))?,
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::EllPart { group, twist, ell, q, e } => {
            let label = parse_group(&group)?;
            let order = generic_order_of(label, parse_twist(twist)?)?;
            let (rendered, valuation) = resolve_ell_part(&order, ell, q, e)?;
            match cli.format {
                Format::Text => {
                    println!("{rendered}");
                    if let Some(v) = valuation {
                        println!("valuation at q={}: {}", q.unwrap(), v);
                    }
                }
                Format::Json => print_json(&serde_json::json!({
                    "schema": REPORT_SCHEMA,
                    "group": label.to_string(),
                    "ell": ell,
                    "ell_part": rendered,
                    "valuation": valuation,
                }))?,
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::SeriesSize { centralizer, component_order, convention, counts_file } => {
            let table = load_counts(counts_file.as_deref())?;
            let mut query = SeriesSizeQuery::connected(&centralizer)?;
            query.component_order = component_order;
            query.convention = convention.as_deref().map(parse_convention).transpose()?;
            let size = unipotent::series_size(&query, &table)?;
            match cli.format {
                Format::Text => println!("{size}"),
                Format::Json => print_json(&serde_json::json!({
                    "schema": REPORT_SCHEMA,
                    "centralizer": centralizer,
                    "size": size,
                    "counts_checksum": table.checksum,
                }))?,
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Bound { group, ell, order, centralizer, e8 } => {
            let label = parse_group(&group)?;
            guard_e8(label, e8)?;
            let datum = build_root_datum(label)?;
            let table = UnipotentCountTable::builtin();
            let inv = enumerate_quasi_isolated(&datum, 6, par)?;
            let matches: Vec<_> = inv
                .classes
                .iter()
                .filter(|c| {
                    c.point.order == order
                        && centralizer
                            .as_deref()
                            .map_or(true, |t| c.phi_s.type_string == t)
                })
                .collect();
            let class = match matches.as_slice() {
                [one] => *one,
                [] => bail!("no quasi-isolated class of order {order} matches"),
                many => bail!(
                    "ambiguous class selection; add --centralizer (candidates: {})",
                    many.iter()
                        .map(|c| c.phi_s.type_string.clone())
                        .collect::<Vec<_>>()
                        .join(", ")
                ),
            };
            let bound = ledger::theorem_a_bound(class, ell, &datum, &table)?;
            match cli.format {
                Format::Text => print!("{}", render_bound(&bound, class)),
                Format::Json => print_json(&serde_json::json!({
                    "schema": REPORT_SCHEMA,
                    "group": label.to_string(),
                    "ell": ell,
                    "class": torsion::inventory_report(&inv).classes.iter()
                        .find(|r| r.order == order && r.centralizer == class.phi_s.type_string),
                    "bound": bound,
                }))?,
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Check { ledger: path, q } => {
            let text = load_ledger(path.as_deref())?;
            let options = RunOptions { parallelism: par, defect_q: q };
            let report = ledger::run_ledger(&text, &options)?;
            match cli.format {
                Format::Text => print!("{}", ledger::render_report(&report)),
                Format::Json => print_json(&report)?,
            }
            if report.failures > 0 {
                return Ok(ExitCode::from(1));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::DefectTableE7 { ledger: path, q } => {
            let text = load_ledger(path.as_deref())?;
            let parsed = ledger::parse_ledger(&text)?;
            let rows = ledger::defect_table_e7(q, &parsed.blocks)?;
            match cli.format {
                Format::Text => {
                    for row in &rows {
                        println!(
                            "{:<8} |D|={:<16} cofactor={:<16} {}",
                            row.block_id,
                            row.defect,
                            row.cofactor,
                            if row.product_ok && row.matches_expected != Some(false) {
                                "ok"
                            } else {
                                "MISMATCH"
                            }
                        );
                    }
                }
                Format::Json => print_json(&serde_json::json!({
                    "schema": REPORT_SCHEMA,
                    "q": q,
                    "rows": rows,
                }))?,
            }
            let bad = rows
                .iter()
                .any(|r| !r.product_ok || r.matches_expected == Some(false));
            Ok(if bad { ExitCode::from(1) } else { ExitCode::SUCCESS })
        }
    }
}

fn parse_group(label: &str) -> Result<CartanType> {
    CartanType::parse(label).map_err(|e| anyhow!(e))
}

fn parse_twist(twist: u8) -> Result<TwistTag> {
    match twist {
        1 => Ok(TwistTag::None),
        2 => Ok(TwistTag::Two),
        3 => Ok(TwistTag::Three),
        other => bail!("twist must be 1, 2 or 3, got {other}"),
    }
}

fn guard_e8(label: CartanType, opted_in: bool) -> Result<()> {
    if label == CartanType::E8 && !opted_in {
        bail!(
            "E8 sweeps are opt-in: pass --e8 (expected budget: a few seconds \
             of orbit walks and well under 1 GB at the default order bound)"
        );
    }
    Ok(())
}

/// (symbolic ℓ-part, exact valuation when a sample q was given)
fn resolve_ell_part(
    order: &generic_order::CycloProduct,
    ell: u64,
    q: Option<u64>,
    e: Option<u32>,
) -> Result<(String, Option<u32>)> {
    match (q, e) {
        (Some(q), _) => {
            let profile = compute_e(ell, q)?;
            if let Some(e) = e {
                if e != profile.e {
                    bail!("inconsistent flags: e_{ell}({q}) = {} but --e {e} given", profile.e);
                }
            }
            let val = generic_order::ell_valuation(order, &profile);
            Ok((val.render(), Some(val.numeric(&profile))))
        }
        (None, Some(e)) => Ok((ell_valuation_symbolic(order, ell, e).render(), None)),
        (None, None) => bail!("specify --q or --e to fix the cyclotomic class"),
    }
}

fn parse_convention(s: &str) -> Result<DisconnectedConvention> {
    if s == "scale" {
        return Ok(DisconnectedConvention::ScaleByComponentOrder);
    }
    if let Some(n) = s.strip_prefix("explicit:") {
        return Ok(DisconnectedConvention::Explicit(n.parse().context("explicit size")?));
    }
    bail!("convention must be `scale` or `explicit:<n>`")
}

fn load_counts(path: Option<&std::path::Path>) -> Result<UnipotentCountTable> {
    match path {
        None => Ok(UnipotentCountTable::builtin()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("reading {}", p.display()))?;
            Ok(UnipotentCountTable::parse(&text)?)
        }
    }
}

fn load_ledger(path: Option<&std::path::Path>) -> Result<String> {
    match path {
        None => Ok(ledger::BUILTIN_LEDGER.to_string()),
        Some(p) => {
            std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))
        }
    }
}

fn render_bound(
    bound: &ledger::BoundDescriptor,
    class: &exceptional_core::torsion::CentralizerDatum,
) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "class: order {} centralizer {} |A(s)| {}\n",
        class.point.order, class.phi_s.type_string, class.a_s_order
    ));
    let case = match bound.case {
        ledger::BoundCase::MultiplierThree => "3·|E(G,s)|",
        ledger::BoundCase::MultiplierTwo => "2·|E(G,s)|",
        ledger::BoundCase::Sum => "|E(G,s)| + Σ_t |E(G,st)|",
    };
    out.push_str(&format!("bound form: {case}\n"));
    let size = |s: Option<u64>| s.map_or("(table data)".to_string(), |v| v.to_string());
    out.push_str(&format!(
        "base series: {} -> {}\n",
        bound.base.centralizer,
        size(bound.base.series_size)
    ));
    for t in &bound.terms {
        out.push_str(&format!(
            "  + st term: order {} centralizer {} |A| {} -> {}\n",
            t.order,
            t.centralizer,
            t.component_group,
            size(t.series_size)
        ));
    }
    out.push_str(&format!("total: {}\n", size(bound.total)));
    out
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}
