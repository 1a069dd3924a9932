//! Block-theoretic inequality checking over structured data files.
//!
//! A ledger file carries one record per block: the prime ℓ, the order of q
//! modulo ℓ, the contributing series counts c(B), the Φ_e-shape of the
//! relevant torus and, where needed, an explicit sectional-rank lower bound.
//! Rows are checked against `l(B) ≤ c(B) ≤ ℓ^{s(B)}`; rows of the
//! defect-table kind instead recompute |D| = ℓ^j · |Φ_e(q)|_ℓ^k and its
//! cofactor in the full group order.
//!
//! Only numbers recorded in the data file are trusted; everything derivable
//! (thresholds, valuations, series sizes for connected centralizers) is
//! recomputed here.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generic_order::{
    self, CycloProduct, EllProfile, OrderError, SymbolicValuation, TorusShape,
};
use crate::par::{self, Parallelism};
use crate::rootsys::{CartanType, RootDatum};
use crate::torsion::{self, CentralizerDatum};
use crate::unipotent::{CountError, SeriesSizeQuery, UnipotentCountTable};

pub const LEDGER_SCHEMA: &str = "exceptional-ledger/v1";

/// The ledger shipped with the crate: only rows whose numbers appear in the
/// printed sources cited per record.
pub const BUILTIN_LEDGER: &str = include_str!("../data/paper_blocks.toml");

#[derive(Debug, Error)]
pub enum LedgerError {
    #[error("ledger parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("ledger schema `{0}` is not supported")]
    SchemaMismatch(String),
    #[error("duplicate block id `{0}`")]
    DuplicateBlockId(String),
    #[error("class with centralizer {0} is not quasi-isolated")]
    NotQuasiIsolated(String),
    #[error("ℓ = {ell} divides the class order {order}")]
    EllDividesOrder { ell: u64, order: u32 },
    #[error("defect table requires ℓ = 3 and e = 1, got ℓ = {ell}, e = {e}")]
    BadDefectProfile { ell: u64, e: u32 },
    #[error("block {id}: {msg}")]
    BadDefectRow { id: String, msg: String },
    #[error("centralizer order does not divide the group order")]
    NonDividingOrders,
    #[error("{0} is not a power of ℓ = {1}")]
    NotAnEllPart(u64, u64),
    #[error(transparent)]
    Count(#[from] CountError),
    #[error(transparent)]
    Order(#[from] OrderError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
pub enum BlockKind {
    #[serde(rename = "malle-robinson")]
    MalleRobinson,
    #[serde(rename = "defect-table")]
    DefectTable,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct CTerm {
    /// Which Lusztig series contributes (descriptive label).
    pub series: String,
    /// Number of ordinary characters of the block in that series.
    pub count: u64,
}

/// One ingested block row.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BlockRecord {
    pub id: String,
    pub group: String,
    pub ell: u64,
    pub e: u32,
    pub kind: BlockKind,
    /// Centralizer type of the semisimple label of the block.
    #[serde(default)]
    pub series: String,
    #[serde(default)]
    pub c_terms: Vec<CTerm>,
    /// Φ_e-part of Z(L)^F for the block's cuspidal pair, e.g. `Phi1^7`.
    #[serde(default)]
    pub levi_center_shape: Option<String>,
    /// Exponent j with |W(L,λ)|_ℓ = ℓ^j.
    #[serde(default)]
    pub relative_weyl_ell_exponent: Option<u32>,
    #[serde(default)]
    pub relative_weyl_order: Option<u64>,
    /// Explicit lower bound on the sectional rank s(B), when the torus shape
    /// alone does not supply it.
    #[serde(default)]
    pub rank_bound: Option<u32>,
    #[serde(default)]
    pub expected_defect: Option<String>,
    #[serde(default)]
    pub expected_cofactor: Option<String>,
    /// Whether the source asserts the inequality for this row. Unasserted
    /// rows may come out undecided without failing the run.
    #[serde(default)]
    pub asserted: bool,
    #[serde(default)]
    pub note: String,
    #[serde(default)]
    pub source: String,
}

#[derive(Clone, Debug, Deserialize)]
struct LedgerFileRaw {
    schema: String,
    #[serde(rename = "block", default)]
    blocks: Vec<BlockRecord>,
}

#[derive(Clone, Debug)]
pub struct LedgerFile {
    pub schema: String,
    pub blocks: Vec<BlockRecord>,
}

pub fn parse_ledger(text: &str) -> Result<LedgerFile, LedgerError> {
    let raw: LedgerFileRaw = toml::from_str(text).map_err(|e| {
        let line = e
            .span()
            .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
            .unwrap_or(0);
        LedgerError::Parse { line, msg: e.message().to_string() }
    })?;
    if raw.schema != LEDGER_SCHEMA {
        return Err(LedgerError::SchemaMismatch(raw.schema));
    }
    let mut seen = std::collections::HashSet::new();
    for b in &raw.blocks {
        if !seen.insert(b.id.clone()) {
            return Err(LedgerError::DuplicateBlockId(b.id.clone()));
        }
    }
    Ok(LedgerFile { schema: raw.schema, blocks: raw.blocks })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "holds-strictly")]
    HoldsStrictly,
    #[serde(rename = "holds")]
    Holds,
    #[serde(rename = "undecided")]
    Undecided,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::HoldsStrictly => write!(f, "holds-strictly"),
            Verdict::Holds => write!(f, "holds"),
            Verdict::Undecided => write!(f, "undecided"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InequalityReport {
    pub block_id: String,
    pub c_value: Option<u64>,
    pub rank_bound: Option<u32>,
    pub threshold: Option<u64>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

/// Checks one block row against c(B) ≤ ℓ^{s(B)}.
///
/// The rank bound is the explicit `rank_bound` field when present, otherwise
/// the exponent k of a Φ_e^k torus shape (valid because ℓ divides Φ_e(q) in
/// cross characteristic by the definition of e). A missing field yields
/// `undecided`, never an error.
pub fn malle_robinson_check(record: &BlockRecord) -> InequalityReport {
    let mut notes = Vec::new();
    if !record.note.is_empty() {
        notes.push(record.note.clone());
    }
    let c_value: Option<u64> = if record.c_terms.is_empty() {
        notes.push("no contributing series counts recorded".into());
        None
    } else {
        Some(record.c_terms.iter().map(|t| t.count).sum())
    };
    let shape_rank = record
        .levi_center_shape
        .as_deref()
        .and_then(TorusShape::parse)
        .filter(|s| s.phi_index == record.e)
        .map(|s| s.exponent);
    let rank_bound = record.rank_bound.or(shape_rank);
    if rank_bound.is_none() {
        notes.push("no sectional-rank lower bound available".into());
    }
    let threshold = rank_bound.map(|r| record.ell.pow(r));
    let verdict = match (c_value, threshold) {
        (Some(c), Some(t)) if c < t => Verdict::HoldsStrictly,
        (Some(c), Some(t)) if c == t => Verdict::Holds,
        (Some(c), Some(t)) => {
            notes.push(format!(
                "c = {c} exceeds ℓ^{} = {t}; this bound does not decide the block",
                rank_bound.unwrap()
            ));
            Verdict::Undecided
        }
        _ => Verdict::Undecided,
    };
    InequalityReport { block_id: record.id.clone(), c_value, rank_bound, threshold, verdict, notes }
}

#[derive(Clone, Debug, Serialize)]
pub struct DefectRow {
    pub block_id: String,
    pub defect: String,
    pub cofactor: String,
    pub product_ok: bool,
    pub matches_expected: Option<bool>,
}

/// Recomputes the defect-group orders |D| = 3^j · |Φ1(q)|_3^k and the
/// cofactors |G^F|_3 / |D| for the recorded E7 rows, requiring e_3(q) = 1.
///
/// Each row's product must recover the full 3-part of the E7 order, both
/// symbolically and numerically at the sample q.
pub fn defect_table_e7(q: u64, rows: &[BlockRecord]) -> Result<Vec<DefectRow>, LedgerError> {
    let profile = generic_order::compute_e(3, q)?;
    if profile.e != 1 {
        return Err(LedgerError::BadDefectProfile { ell: 3, e: profile.e });
    }
    let order = generic_order::generic_order_of(CartanType::E7, generic_order::TwistTag::None)?;
    let top = generic_order::ell_valuation(&order, &profile);
    let mut out = Vec::new();
    for record in rows {
        if record.kind != BlockKind::DefectTable {
            continue;
        }
        let bad = |msg: &str| LedgerError::BadDefectRow { id: record.id.clone(), msg: msg.into() };
        let shape = record
            .levi_center_shape
            .as_deref()
            .and_then(TorusShape::parse)
            .ok_or_else(|| bad("missing or unparsable levi_center_shape"))?;
        if shape.phi_index != 1 {
            return Err(bad("defect rows must carry a Φ1-power shape"));
        }
        let j = record
            .relative_weyl_ell_exponent
            .ok_or_else(|| bad("missing relative_weyl_ell_exponent"))?;
        if j > top.constant_exponent || shape.exponent > top.phi_e_multiplicity {
            return Err(bad("defect exceeds the 3-part of the group order"));
        }
        let defect = SymbolicValuation {
            ell: 3,
            e: 1,
            constant_exponent: j,
            phi_e_multiplicity: shape.exponent,
        };
        let cofactor = SymbolicValuation {
            ell: 3,
            e: 1,
            constant_exponent: top.constant_exponent - j,
            phi_e_multiplicity: top.phi_e_multiplicity - shape.exponent,
        };
        let product_ok =
            defect.numeric(&profile) + cofactor.numeric(&profile) == top.numeric(&profile);
        let defect_str = defect.render();
        let cofactor_str = cofactor.render();
        let matches_expected = match (&record.expected_defect, &record.expected_cofactor) {
            (Some(d), Some(c)) => Some(*d == defect_str && *c == cofactor_str),
            _ => None,
        };
        out.push(DefectRow {
            block_id: record.id.clone(),
            defect: defect_str,
            cofactor: cofactor_str,
            product_ok,
            matches_expected,
        });
    }
    Ok(out)
}

/// ℓ-part of a character degree through Jordan decomposition:
/// χ(1)_ℓ = (|G^F|_ℓ / |C^F|_ℓ) · ψ(1)_ℓ, evaluated at the profile's q.
pub fn degree_ell_part(
    jordan_degree_ell_part: u64,
    centralizer_order: &CycloProduct,
    group_order: &CycloProduct,
    profile: &EllProfile,
) -> Result<BigUint, LedgerError> {
    if !centralizer_order.divides(group_order) {
        return Err(LedgerError::NonDividingOrders);
    }
    let mut jp = jordan_degree_ell_part;
    while jp % profile.ell == 0 {
        jp /= profile.ell;
    }
    if jp != 1 {
        return Err(LedgerError::NotAnEllPart(jordan_degree_ell_part, profile.ell));
    }
    let vg = generic_order::ell_valuation(group_order, profile).numeric(profile);
    let vc = generic_order::ell_valuation(centralizer_order, profile).numeric(profile);
    assert!(vg >= vc, "divisibility guarantees the valuation inequality");
    Ok(BigUint::from(profile.ell).pow(vg - vc) * BigUint::from(jordan_degree_ell_part))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BoundCase {
    #[serde(rename = "multiplier-3")]
    MultiplierThree,
    #[serde(rename = "multiplier-2")]
    MultiplierTwo,
    #[serde(rename = "sum")]
    Sum,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundTerm {
    pub centralizer: String,
    pub order: u32,
    pub component_group: u64,
    /// Series size when the centralizer is connected; disconnected sizes are
    /// table data and left empty here.
    pub series_size: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundDescriptor {
    pub case: BoundCase,
    pub multiplier: u64,
    pub base: BoundTerm,
    pub terms: Vec<BoundTerm>,
    pub total: Option<u64>,
}

/// Selects and evaluates the three-case upper bound on the number of
/// irreducible Brauer characters attached to a quasi-isolated ℓ'-class.
///
/// In the sum case, t ranges over nontrivial ℓ-elements such that st is
/// quasi-isolated and either the centralizer of st is disconnected or its
/// connected part is not of type A; operationally the quasi-isolated
/// inventory is scanned for classes whose ℓ'-part matches the given class.
pub fn theorem_a_bound(
    entry: &CentralizerDatum,
    ell: u64,
    datum: &RootDatum,
    table: &UnipotentCountTable,
) -> Result<BoundDescriptor, LedgerError> {
    if !entry.quasi_isolated {
        return Err(LedgerError::NotQuasiIsolated(entry.phi_s.type_string.clone()));
    }
    if entry.point.order as u64 % ell == 0 {
        return Err(LedgerError::EllDividesOrder { ell, order: entry.point.order });
    }
    let connected_size = |cent: &CentralizerDatum| -> Option<u64> {
        if cent.a_s_order != 1 {
            return None;
        }
        SeriesSizeQuery::connected(&cent.phi_s.type_string)
            .ok()
            .and_then(|q| crate::unipotent::series_size(&q, table).ok())
    };
    let to_term = |cent: &CentralizerDatum| BoundTerm {
        centralizer: cent.phi_s.type_string.clone(),
        order: cent.point.order,
        component_group: cent.a_s_order,
        series_size: connected_size(cent),
    };

    let base = to_term(entry);
    let case = match (datum.label, ell, entry.phi_s.type_string.as_str()) {
        (CartanType::E6, 3, "A5+A1") => BoundCase::MultiplierThree,
        (CartanType::E7, 2, "A5+A2") => BoundCase::MultiplierTwo,
        _ => BoundCase::Sum,
    };
    if case != BoundCase::Sum {
        let multiplier = if case == BoundCase::MultiplierThree { 3 } else { 2 };
        let total = base.series_size.map(|s| multiplier * s);
        return Ok(BoundDescriptor { case, multiplier, base, terms: Vec::new(), total });
    }

    let s_canonical = torsion::canonical_class_point(&entry.point.coords, datum);
    let inventory = torsion::enumerate_quasi_isolated(datum, 6, Parallelism::default())
        .expect("max_order 6 is valid");
    let mut terms = Vec::new();
    for z in &inventory.classes {
        if z.point.coords == s_canonical.coords {
            continue; // t = 1
        }
        let n = z.point.order as u64;
        let mut ell_part = 1u64;
        let mut n_prime = n;
        while n_prime % ell == 0 {
            n_prime /= ell;
            ell_part *= ell;
        }
        if ell_part == 1 {
            continue; // no ℓ-part, not of the form st with t an ℓ-element
        }
        // ℓ'-part of z: scale by the multiple of ℓ_part that is 1 mod n'.
        let scale = if n_prime == 1 { 0 } else { ell_part * mod_inverse(ell_part, n_prime) % n };
        let coords: Vec<torsion::Frac> = z
            .point
            .coords
            .iter()
            .map(|c| c * torsion::Frac::from_integer(scale as i64))
            .collect();
        let s_part = torsion::canonical_class_point(&coords, datum);
        if s_part.coords != s_canonical.coords {
            continue;
        }
        let condition_two = z.a_s_order != 1 || !z.phi_s.is_type_a();
        if !condition_two {
            continue;
        }
        terms.push(to_term(z));
    }
    let total = base
        .series_size
        .and_then(|b| terms.iter().map(|t| t.series_size).sum::<Option<u64>>().map(|s| b + s));
    Ok(BoundDescriptor { case, multiplier: 1, base, terms, total })
}

fn mod_inverse(a: u64, m: u64) -> u64 {
    // extended Euclid; m is small and coprime to a
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (m as i128, (a % m) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    assert_eq!(r, 1, "inverse requires coprime arguments");
    t.rem_euclid(m as i128) as u64
}

#[derive(Clone, Debug, Serialize)]
pub struct MrRowOutcome {
    #[serde(flatten)]
    pub report: InequalityReport,
    pub asserted: bool,
    pub failed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DefectRowOutcome {
    #[serde(flatten)]
    pub row: DefectRow,
    pub failed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LedgerReport {
    pub schema: &'static str,
    pub blocks_checked: usize,
    pub failures: usize,
    pub undecided: usize,
    pub inequality: Vec<MrRowOutcome>,
    pub defect_table: Vec<DefectRowOutcome>,
}

#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    pub parallelism: Parallelism,
    /// Sample prime power for numeric defect-table cross-checks.
    pub defect_q: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { parallelism: Parallelism::default(), defect_q: 7 }
    }
}

/// Checks every row of a ledger and assembles a deterministic report,
/// ordered by block id. A row fails only when its source asserts the
/// inequality (or a defect row mismatches); open rows stay `undecided`.
pub fn run_ledger(text: &str, options: &RunOptions) -> Result<LedgerReport, LedgerError> {
    let ledger = parse_ledger(text)?;
    let mr_rows: Vec<BlockRecord> = ledger
        .blocks
        .iter()
        .filter(|b| b.kind == BlockKind::MalleRobinson)
        .cloned()
        .collect();
    let mut inequality: Vec<MrRowOutcome> = par::map_collect(options.parallelism, &mr_rows, |r| {
        let report = malle_robinson_check(r);
        let ok = matches!(report.verdict, Verdict::Holds | Verdict::HoldsStrictly);
        MrRowOutcome { report, asserted: r.asserted, failed: r.asserted && !ok }
    });
    inequality.sort_by_key(|r| natural_key(&r.report.block_id));

    let defect_rows: Vec<BlockRecord> = ledger
        .blocks
        .iter()
        .filter(|b| b.kind == BlockKind::DefectTable)
        .cloned()
        .collect();
    let mut defect_table: Vec<DefectRowOutcome> = if defect_rows.is_empty() {
        Vec::new()
    } else {
        defect_table_e7(options.defect_q, &defect_rows)?
            .into_iter()
            .map(|row| {
                let failed = !row.product_ok || row.matches_expected == Some(false);
                DefectRowOutcome { row, failed }
            })
            .collect()
    };
    defect_table.sort_by_key(|r| natural_key(&r.row.block_id));

    let failures = inequality.iter().filter(|r| r.failed).count()
        + defect_table.iter().filter(|r| r.failed).count();
    let undecided =
        inequality.iter().filter(|r| r.report.verdict == Verdict::Undecided).count();
    Ok(LedgerReport {
        schema: crate::REPORT_SCHEMA,
        blocks_checked: ledger.blocks.len(),
        failures,
        undecided,
        inequality,
        defect_table,
    })
}

/// Human-readable report; byte-stable for identical inputs.
pub fn render_report(report: &LedgerReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("ledger report ({})\n", report.schema));
    for row in &report.inequality {
        let c = row.report.c_value.map_or("-".into(), |c| c.to_string());
        let t = row.report.threshold.map_or("-".into(), |t| t.to_string());
        out.push_str(&format!(
            "MR {:<10} c={:<5} threshold={:<6} {}\n",
            row.report.block_id, c, t, row.report.verdict
        ));
        for note in &row.report.notes {
            out.push_str(&format!("   note: {note}\n"));
        }
    }
    for row in &report.defect_table {
        out.push_str(&format!(
            "DT {:<10} |D|={:<16} cofactor={:<16} {}\n",
            row.row.block_id,
            row.row.defect,
            row.row.cofactor,
            if row.failed { "MISMATCH" } else { "ok" }
        ));
    }
    out.push_str(&format!(
        "summary: {} blocks, {} failures, {} undecided\n",
        report.blocks_checked, report.failures, report.undecided
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::build_root_datum;
    use crate::torsion::enumerate_quasi_isolated;
    use num_traits::ToPrimitive;

    fn mr_record(id: &str, ell: u64, e: u32) -> BlockRecord {
        BlockRecord {
            id: id.into(),
            group: "F4".into(),
            ell,
            e,
            kind: BlockKind::MalleRobinson,
            series: String::new(),
            c_terms: Vec::new(),
            levi_center_shape: None,
            relative_weyl_ell_exponent: None,
            relative_weyl_order: None,
            rank_bound: None,
            expected_defect: None,
            expected_cofactor: None,
            asserted: false,
            note: String::new(),
            source: String::new(),
        }
    }

    #[test]
    fn builtin_ledger_parses() {
        let ledger = parse_ledger(BUILTIN_LEDGER).unwrap();
        assert_eq!(ledger.schema, LEDGER_SCHEMA);
        assert_eq!(ledger.blocks.len(), 12);
    }

    #[test]
    fn builtin_ledger_has_no_failures_and_two_open_rows() {
        let report = run_ledger(BUILTIN_LEDGER, &RunOptions::default()).unwrap();
        assert_eq!(report.failures, 0);
        assert_eq!(report.undecided, 2);
        let undecided: Vec<&str> = report
            .inequality
            .iter()
            .filter(|r| r.report.verdict == Verdict::Undecided)
            .map(|r| r.report.block_id.as_str())
            .collect();
        assert_eq!(undecided, vec!["E8:3u", "E8:8u"]);
        for r in &report.inequality {
            if r.report.block_id.starts_with("E8") {
                assert_eq!(r.report.c_value, Some(6));
                assert_eq!(r.report.threshold, Some(4));
                assert!(!r.failed, "open rows are not asserted failures");
            }
        }
    }

    #[test]
    fn e6_block_five_holds_strictly() {
        let ledger = parse_ledger(BUILTIN_LEDGER).unwrap();
        let row = ledger.blocks.iter().find(|b| b.id == "E6:5").unwrap();
        let report = malle_robinson_check(row);
        assert_eq!(report.c_value, Some(12));
        assert_eq!(report.rank_bound, Some(4));
        assert_eq!(report.threshold, Some(16));
        assert_eq!(report.verdict, Verdict::HoldsStrictly);
    }

    #[test]
    fn torus_shape_supplies_the_rank_bound() {
        let mut record = mr_record("F4:2", 2, 2);
        record.levi_center_shape = Some("Phi2^4".into());
        record.c_terms = vec![CTerm { series: "E(G,s)".into(), count: 9 }];
        let report = malle_robinson_check(&record);
        assert_eq!(report.rank_bound, Some(4));
        assert_eq!(report.threshold, Some(16));
        assert_eq!(report.verdict, Verdict::HoldsStrictly);
    }

    #[test]
    fn missing_counts_yield_undecided_not_a_crash() {
        let record = mr_record("X:1", 3, 1);
        let report = malle_robinson_check(&record);
        assert_eq!(report.verdict, Verdict::Undecided);
        assert!(report.notes.iter().any(|n| n.contains("no contributing series")));
    }

    #[test]
    fn exceeding_the_threshold_is_undecided_with_a_note() {
        let mut record = mr_record("X:2", 2, 1);
        record.c_terms = vec![CTerm { series: "E(G,1)".into(), count: 6 }];
        record.rank_bound = Some(2);
        let report = malle_robinson_check(&record);
        assert_eq!(report.verdict, Verdict::Undecided);
        assert!(report.notes.iter().any(|n| n.contains("does not decide")));
    }

    #[test]
    fn defect_table_reproduces_the_four_rows() {
        let ledger = parse_ledger(BUILTIN_LEDGER).unwrap();
        let rows = defect_table_e7(7, &ledger.blocks).unwrap();
        let expect = [
            ("E7:8", "3^4.|Φ1|_3^7", "1"),
            ("E7:9", "3.|Φ1|_3^3", "3^3.|Φ1|_3^4"),
            ("E7:10", "3^2.|Φ1|_3^4", "3^2.|Φ1|_3^3"),
            ("E7:11", "|Φ1|_3", "3^4.|Φ1|_3^6"),
        ];
        assert_eq!(rows.len(), 4);
        for (row, (id, d, c)) in rows.iter().zip(expect) {
            assert_eq!(row.block_id, id);
            assert_eq!(row.defect, d);
            assert_eq!(row.cofactor, c);
            assert!(row.product_ok, "{id}: defect times cofactor must be the full 3-part");
            assert_eq!(row.matches_expected, Some(true));
        }
    }

    #[test]
    fn defect_table_requires_e_equal_one() {
        let ledger = parse_ledger(BUILTIN_LEDGER).unwrap();
        // e_3(2) = 2
        assert!(matches!(
            defect_table_e7(2, &ledger.blocks),
            Err(LedgerError::BadDefectProfile { ell: 3, e: 2 })
        ));
    }

    #[test]
    fn degree_ell_part_of_the_full_group_is_the_jordan_part() {
        let g = generic_order::generic_order_of(CartanType::E7, generic_order::TwistTag::None)
            .unwrap();
        let profile = generic_order::compute_e(3, 7).unwrap();
        let value = degree_ell_part(1, &g, &g, &profile).unwrap();
        assert_eq!(value.to_u64(), Some(1));
    }

    /// The series with centralizer Φ1·A2(q)^3 (component factor of order 2
    /// carries no 3-part): every degree 3-part is < 3^3 |Φ1(q)|_3^4.
    #[test]
    fn degree_three_parts_force_the_series_into_the_top_defect_block() {
        let g = generic_order::generic_order_of(CartanType::E7, generic_order::TwistTag::None)
            .unwrap();
        let a2 = generic_order::generic_order_of(CartanType::A(2), generic_order::TwistTag::None)
            .unwrap();
        let centralizer = generic_order::CycloProduct::phi(1, 1).mul(&a2.pow(3));
        let profile = generic_order::compute_e(3, 7).unwrap();
        // unipotent degrees of A2(q)^3 have trivial 3-part at e = 1
        let chi = degree_ell_part(1, &centralizer, &g, &profile).unwrap();
        assert_eq!(chi.to_u64(), Some(3));
        let phi1_3 = generic_order::big_ell_valuation(
            &generic_order::cyclotomic_value(1, 7),
            3,
        );
        let bound = 3u64.pow(3) * 3u64.pow(4 * phi1_3);
        assert!(chi.to_u64().unwrap() < bound);
    }

    #[test]
    fn degree_ell_part_rejects_non_dividing_orders() {
        let g = generic_order::generic_order_of(CartanType::E7, generic_order::TwistTag::None)
            .unwrap();
        let too_big = generic_order::CycloProduct::phi(1, 8);
        let profile = generic_order::compute_e(3, 7).unwrap();
        assert!(matches!(
            degree_ell_part(1, &too_big, &g, &profile),
            Err(LedgerError::NonDividingOrders)
        ));
    }

    fn class_by_type<'a>(
        inv: &'a crate::torsion::ClassInventory,
        t: &str,
    ) -> &'a CentralizerDatum {
        inv.classes.iter().find(|c| c.phi_s.type_string == t).unwrap()
    }

    #[test]
    fn theorem_a_selects_the_multiplier_three_case() {
        let d = build_root_datum(CartanType::E6).unwrap();
        let table = UnipotentCountTable::builtin();
        let inv = enumerate_quasi_isolated(&d, 6, Parallelism::default()).unwrap();
        let s = class_by_type(&inv, "A5+A1");
        let bound = theorem_a_bound(s, 3, &d, &table).unwrap();
        assert_eq!(bound.case, BoundCase::MultiplierThree);
        assert_eq!(bound.multiplier, 3);
        assert!(bound.terms.is_empty());
        assert_eq!(bound.total, Some(66)); // 3 · p(6)p(2)
    }

    #[test]
    fn theorem_a_selects_the_multiplier_two_case() {
        let d = build_root_datum(CartanType::E7).unwrap();
        let table = UnipotentCountTable::builtin();
        let inv = enumerate_quasi_isolated(&d, 6, Parallelism::default()).unwrap();
        let s = class_by_type(&inv, "A5+A2");
        let bound = theorem_a_bound(s, 2, &d, &table).unwrap();
        assert_eq!(bound.case, BoundCase::MultiplierTwo);
        assert_eq!(bound.total, Some(66)); // 2 · p(6)p(3)
    }

    #[test]
    fn theorem_a_sum_for_the_f4_principal_series_at_two() {
        let d = build_root_datum(CartanType::F4).unwrap();
        let table = UnipotentCountTable::builtin();
        let inv = enumerate_quasi_isolated(&d, 6, Parallelism::default()).unwrap();
        let s = class_by_type(&inv, "F4");
        let bound = theorem_a_bound(s, 2, &d, &table).unwrap();
        assert_eq!(bound.case, BoundCase::Sum);
        let mut term_types: Vec<&str> =
            bound.terms.iter().map(|t| t.centralizer.as_str()).collect();
        term_types.sort_unstable();
        assert_eq!(term_types, vec!["B4", "C3+A1"]);
        assert!(bound.terms.iter().all(|t| t.series_size.is_some()));
    }

    #[test]
    fn theorem_a_sum_collapses_to_the_base_series_on_g2() {
        let d = build_root_datum(CartanType::G2).unwrap();
        let table = UnipotentCountTable::builtin();
        let inv = enumerate_quasi_isolated(&d, 6, Parallelism::default()).unwrap();
        for ell in [2u64, 3] {
            for s in inv.classes.iter().filter(|c| c.point.order as u64 % ell != 0) {
                let bound = theorem_a_bound(s, ell, &d, &table).unwrap();
                assert_eq!(bound.case, BoundCase::Sum);
                assert!(bound.terms.is_empty(), "ℓ={ell} s={}", s.phi_s.type_string);
                assert_eq!(bound.total, bound.base.series_size);
            }
        }
    }

    #[test]
    fn theorem_a_matches_the_order_six_product_in_e7() {
        let d = build_root_datum(CartanType::E7).unwrap();
        let table = UnipotentCountTable::builtin();
        let inv = enumerate_quasi_isolated(&d, 6, Parallelism::default()).unwrap();
        let s = class_by_type(&inv, "E6"); // order-2 class
        let bound = theorem_a_bound(s, 3, &d, &table).unwrap();
        assert_eq!(bound.case, BoundCase::Sum);
        assert_eq!(bound.terms.len(), 1);
        assert_eq!(bound.terms[0].centralizer, "A2+A2+A2");
        // the D6+A1 class has no order-six partner
        let s2 = class_by_type(&inv, "D6+A1");
        let bound2 = theorem_a_bound(s2, 3, &d, &table).unwrap();
        assert!(bound2.terms.is_empty());
    }

    #[test]
    fn theorem_a_rejects_classes_of_order_divisible_by_ell() {
        let d = build_root_datum(CartanType::E7).unwrap();
        let table = UnipotentCountTable::builtin();
        let inv = enumerate_quasi_isolated(&d, 6, Parallelism::default()).unwrap();
        let s = class_by_type(&inv, "A7");
        assert!(matches!(
            theorem_a_bound(s, 2, &d, &table),
            Err(LedgerError::EllDividesOrder { ell: 2, order: 2 })
        ));
    }

    #[test]
    fn theorem_a_rejects_non_quasi_isolated_classes() {
        let d = build_root_datum(CartanType::E7).unwrap();
        let table = UnipotentCountTable::builtin();
        let p = crate::torsion::alcove_reduce(
            &[
                crate::torsion::Frac::new(1, 4),
                crate::torsion::Frac::new(0, 1),
                crate::torsion::Frac::new(0, 1),
                crate::torsion::Frac::new(0, 1),
                crate::torsion::Frac::new(0, 1),
                crate::torsion::Frac::new(0, 1),
                crate::torsion::Frac::new(0, 1),
            ],
            &d,
        );
        let c = crate::torsion::centralizer_of(&p, &d);
        assert!(matches!(
            theorem_a_bound(&c, 3, &d, &table),
            Err(LedgerError::NotQuasiIsolated(_))
        ));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let broken = "schema = \"exceptional-ledger/v1\"\n\n[[block]]\nid = \"X\"\nell = \"oops\"\n";
        match parse_ledger(broken) {
            Err(LedgerError::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let text = r#"
schema = "exceptional-ledger/v1"
[[block]]
id = "A:1"
group = "G2"
ell = 2
e = 1
kind = "malle-robinson"
[[block]]
id = "A:1"
group = "G2"
ell = 3
e = 1
kind = "malle-robinson"
"#;
        assert!(matches!(parse_ledger(text), Err(LedgerError::DuplicateBlockId(_))));
    }

    #[test]
    fn unknown_schemas_are_rejected() {
        let text = "schema = \"something-else/v9\"\n";
        assert!(matches!(parse_ledger(text), Err(LedgerError::SchemaMismatch(_))));
    }

    #[test]
    fn empty_ledger_yields_an_empty_report() {
        let report = run_ledger("schema = \"exceptional-ledger/v1\"\n", &RunOptions::default())
            .unwrap();
        assert_eq!(report.blocks_checked, 0);
        assert_eq!(report.failures, 0);
        assert_eq!(render_report(&report).lines().count(), 2);
    }

    #[test]
    fn reports_are_deterministic_and_schema_tagged() {
        let a = run_ledger(BUILTIN_LEDGER, &RunOptions::default()).unwrap();
        let b = run_ledger(BUILTIN_LEDGER, &RunOptions::default()).unwrap();
        assert_eq!(render_report(&a), render_report(&b));
        let json = serde_json::to_string_pretty(&a).unwrap();
        assert!(json.contains("exceptional-report/v1"));
        assert_eq!(json, serde_json::to_string_pretty(&b).unwrap());
    }
}
