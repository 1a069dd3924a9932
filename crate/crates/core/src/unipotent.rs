//! Unipotent character counts and Lusztig series sizes.
//!
//! Classical types are counted exactly: partitions for type A (twisted or
//! not), symbols of odd defect for B/C, symbols of defect divisible by 4 for
//! D (degenerate symbols counted twice) and defect ≡ 2 (mod 4) for twisted D.
//! Exceptional types are constants from a checksummed data file; they are
//! table data, never computed here.
//!
//! The size of a Lusztig series attached to a semisimple element with
//! connected centralizer is the product of the unipotent counts of the
//! centralizer's factors, torus factors contributing 1. Disconnected
//! centralizers are only sized under an explicitly chosen convention.

use std::collections::BTreeMap;

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::generic_order::TwistTag;
use crate::rootsys::CartanType;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CountError {
    #[error("unsupported factor `{0}`")]
    UnsupportedFactor(String),
    #[error("no table entry for {label} with twist {twist}")]
    MissingTableEntry { label: CartanType, twist: TwistTag },
    #[error("count table checksum mismatch: header {expected}, actual {actual}")]
    ChecksumMismatch { expected: String, actual: String },
    #[error("malformed count table at line {line}: {msg}")]
    MalformedTable { line: usize, msg: String },
    #[error("disconnected centralizer (|A| = {component_order}) needs an explicit convention")]
    DisconnectedNeedsConvention { component_order: u64 },
}

/// Number of partitions of n.
pub fn partition_count(n: u32) -> u64 {
    let n = n as usize;
    let mut table = vec![0u64; n + 1];
    table[0] = 1;
    for part in 1..=n {
        for total in part..=n {
            table[total] += table[total - part];
        }
    }
    table[n]
}

/// Defect classes of symbols, matching the classical series they
/// parametrize.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DefectClass {
    /// B_n / C_n: odd defect.
    Odd,
    /// D_n: defect ≡ 0 (mod 4), degenerate symbols counted twice.
    Mod4Zero,
    /// twisted D_n: defect ≡ 2 (mod 4).
    Mod4Two,
}

/// Counts symbols of the given rank and defect class, up to shift
/// equivalence and row swap.
pub fn symbol_count(rank: u32, class: DefectClass) -> u64 {
    match class {
        DefectClass::Odd => {
            let mut total = 0;
            let mut defect = 1;
            loop {
                let counted = ordered_symbols_of_defect(rank, defect);
                if counted.is_none() {
                    break;
                }
                total += counted.unwrap();
                defect += 2;
            }
            total
        }
        DefectClass::Mod4Zero => {
            // Defect 0: both row orders are enumerated, so halve the count
            // of distinct pairs; degenerate symbols (S = S) count twice.
            let ordered_equal =
                ordered_symbols_of_defect(rank, 0).expect("defect 0 is always reachable");
            let degenerate = degenerate_symbols(rank);
            let mut total = (ordered_equal + 3 * degenerate) / 2;
            let mut defect = 4;
            while let Some(c) = ordered_symbols_of_defect(rank, defect) {
                total += c;
                defect += 4;
            }
            total
        }
        DefectClass::Mod4Two => {
            let mut ordered = 0;
            let mut defect = 2;
            loop {
                let Some(c) = ordered_symbols_of_defect(rank, defect) else { break };
                ordered += c;
                defect += 4;
            }
            ordered
        }
    }
}

/// Ordered symbol pairs (S, T) with |S| - |T| = defect ≥ 0, reduced, of the
/// given rank, counted with |S| > |T| (for defect 0 all ordered pairs).
/// Returns None when even the minimal sizes exceed the rank, which
/// terminates the defect sweep.
fn ordered_symbols_of_defect(rank: u32, defect: u32) -> Option<u64> {
    let min_sizes_rank = min_rank_for_sizes(defect, 0);
    if min_sizes_rank > rank as i64 {
        return None;
    }
    let mut total = 0u64;
    let mut k = 0u32;
    loop {
        let m = k + defect;
        if min_rank_for_sizes(m, k) > rank as i64 {
            break;
        }
        let offset = ((m + k) as i64 - 1).max(0).pow(2) / 4;
        let target = rank as i64 + offset;
        // Enumerate reduced (S, T): not both rows containing 0.
        total += count_pairs(m, k, target);
        k += 1;
    }
    Some(total)
}

/// Minimal achievable rank for a reduced symbol with row sizes (m, k).
fn min_rank_for_sizes(m: u32, k: u32) -> i64 {
    let (m, k) = (m as i64, k as i64);
    let offset = ((m + k) - 1).max(0).pow(2) / 4;
    // Rows {0..m-1} and {1..k} (or the swap); at most one row contains 0.
    let a = m * (m - 1) / 2 + k * (k + 1) / 2;
    let b = m * (m + 1) / 2 + k * (k - 1) / 2;
    a.min(b) - offset
}

/// Counts ordered reduced pairs of strictly increasing sequences with sizes
/// (m, k) and total entry sum `target`.
fn count_pairs(m: u32, k: u32, target: i64) -> u64 {
    if target < 0 {
        return 0;
    }
    let mut total = 0;
    for (s, s_sum) in &increasing_sequences(m, target) {
        let remaining = target - s_sum;
        for (t, _) in increasing_sequences(k, remaining)
            .into_iter()
            .filter(|(_, sum)| *sum == remaining)
        {
            if s.first() == Some(&0) && t.first() == Some(&0) {
                continue; // shift-reducible
            }
            total += 1;
        }
    }
    total
}

/// All strictly increasing sequences of the given length with entry sum at
/// most `max_sum`, paired with their sums.
fn increasing_sequences(len: u32, max_sum: i64) -> Vec<(Vec<u32>, i64)> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(
        len: u32,
        max_sum: i64,
        next_min: u32,
        current: &mut Vec<u32>,
        sum: i64,
        out: &mut Vec<(Vec<u32>, i64)>,
    ) {
        if current.len() == len as usize {
            out.push((current.clone(), sum));
            return;
        }
        let remaining = len as usize - current.len();
        let mut v = next_min;
        loop {
            // Minimal completion if we start at v: v, v+1, ...
            let r = remaining as i64;
            let min_tail = r * v as i64 + r * (r - 1) / 2;
            if sum + min_tail > max_sum {
                break;
            }
            current.push(v);
            rec(len, max_sum, v + 1, current, sum + v as i64, out);
            current.pop();
            v += 1;
        }
    }
    rec(len, max_sum, 0, &mut current, 0, &mut out);
    out
}

/// Reduced degenerate symbols (S, S) of the given rank.
fn degenerate_symbols(rank: u32) -> u64 {
    let mut total = 0;
    let mut m = 0u32;
    loop {
        let offset = ((2 * m) as i64 - 1).max(0).pow(2) / 4;
        let target = rank as i64 + offset;
        // 0 ∉ S for a reduced degenerate symbol; minimal S = {1..m}.
        let min_sum = m as i64 * (m as i64 + 1) / 2;
        if 2 * min_sum - offset > rank as i64 {
            break;
        }
        total += increasing_sequences(m, target)
            .into_iter()
            .filter(|(s, sum)| s.first() != Some(&0) && 2 * sum == target)
            .count() as u64;
        m += 1;
    }
    total
}

/// Exceptional counts keyed by (type, twist), loaded from a data file whose
/// checksum is echoed into reports.
#[derive(Clone, Debug)]
pub struct UnipotentCountTable {
    exceptional: BTreeMap<(CartanType, u8), u64>,
    pub checksum: String,
}

pub const BUILTIN_COUNTS: &str = include_str!("../data/exceptional_unipotent_counts.txt");

impl UnipotentCountTable {
    pub fn builtin() -> UnipotentCountTable {
        Self::parse(BUILTIN_COUNTS).expect("builtin count table is well-formed")
    }

    pub fn parse(text: &str) -> Result<UnipotentCountTable, CountError> {
        let mut expected_checksum = None;
        let mut records = String::new();
        let mut map = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            if let Some(rest) = line.strip_prefix("# checksum: sha256=") {
                expected_checksum = Some(rest.trim().to_string());
                continue;
            }
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            records.push_str(line);
            records.push('\n');
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(CountError::MalformedTable {
                    line: line_no,
                    msg: "expected `<type> <twist> <count>`".into(),
                });
            }
            let label = CartanType::parse(fields[0]).map_err(|e| CountError::MalformedTable {
                line: line_no,
                msg: e.to_string(),
            })?;
            let twist: u8 = fields[1].parse().map_err(|_| CountError::MalformedTable {
                line: line_no,
                msg: "twist must be 1, 2 or 3".into(),
            })?;
            let count: u64 = fields[2].parse().map_err(|_| CountError::MalformedTable {
                line: line_no,
                msg: "count must be a positive integer".into(),
            })?;
            map.insert((label, twist), count);
        }
        let actual = hex_digest(&records);
        match expected_checksum {
            Some(expected) if expected != actual => {
                Err(CountError::ChecksumMismatch { expected, actual })
            }
            Some(expected) => Ok(UnipotentCountTable { exceptional: map, checksum: expected }),
            None => Err(CountError::MalformedTable {
                line: 0,
                msg: "missing `# checksum: sha256=...` header".into(),
            }),
        }
    }
}

fn hex_digest(s: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(s.as_bytes());
    let out = hasher.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

fn twist_key(twist: TwistTag) -> u8 {
    match twist {
        TwistTag::None => 1,
        TwistTag::Two => 2,
        TwistTag::Three => 3,
    }
}

/// Number of unipotent characters of the (possibly twisted) group of the
/// given type. Classical types are enumerated, exceptional types looked up.
pub fn count_unipotent(
    label: CartanType,
    twist: TwistTag,
    table: &UnipotentCountTable,
) -> Result<u64, CountError> {
    match (label, twist) {
        (CartanType::A(n), TwistTag::None | TwistTag::Two) => {
            Ok(partition_count(n as u32 + 1))
        }
        (CartanType::B(n) | CartanType::C(n), TwistTag::None) => {
            Ok(symbol_count(n as u32, DefectClass::Odd))
        }
        (CartanType::D(n), TwistTag::None) => Ok(symbol_count(n as u32, DefectClass::Mod4Zero)),
        (CartanType::D(n), TwistTag::Two) => Ok(symbol_count(n as u32, DefectClass::Mod4Two)),
        (CartanType::D(4), TwistTag::Three)
        | (CartanType::G2 | CartanType::F4 | CartanType::E6 | CartanType::E7 | CartanType::E8, _) => {
            table
                .exceptional
                .get(&(label, twist_key(twist)))
                .copied()
                .ok_or(CountError::MissingTableEntry { label, twist })
        }
        _ => Err(CountError::MissingTableEntry { label, twist }),
    }
}

/// One factor of a centralizer: a type with an optional twist and an
/// optional field extension (restriction of scalars), e.g. `A1(q3)`.
/// Extension factors count like the base type over the fixed field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Factor {
    pub label: CartanType,
    pub twist: TwistTag,
    pub field_power: u32,
}

impl Factor {
    /// Parses `A5`, `2A5`, `3D4`, `A1(q3)`, `A1(q^3)`.
    pub fn parse(s: &str) -> Result<Factor, CountError> {
        let err = || CountError::UnsupportedFactor(s.to_string());
        let mut rest = s.trim();
        let mut twist = TwistTag::None;
        if let Some(r) = rest.strip_prefix('2') {
            twist = TwistTag::Two;
            rest = r;
        } else if let Some(r) = rest.strip_prefix('3') {
            twist = TwistTag::Three;
            rest = r;
        }
        let mut field_power = 1;
        if let Some(open) = rest.find('(') {
            let inner = rest[open..].strip_prefix('(').and_then(|t| t.strip_suffix(')'));
            let inner = inner.ok_or_else(err)?;
            let power = inner.strip_prefix("q^").or_else(|| inner.strip_prefix('q'));
            field_power = match power {
                Some("") => 1,
                Some(p) => p.parse().map_err(|_| err())?,
                None => return Err(err()),
            };
            rest = &rest[..open];
        }
        let label = CartanType::parse(rest).map_err(|_| err())?;
        Ok(Factor { label, twist, field_power })
    }
}

/// How to size a Lusztig series for a disconnected centralizer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DisconnectedConvention {
    /// The size is supplied externally (table data).
    Explicit(u64),
    /// Product over factors, scaled by the component group order.
    ScaleByComponentOrder,
}

/// A series-size query: the centralizer's factors, its component group
/// order, and (for disconnected centralizers) the sizing convention.
#[derive(Clone, Debug, Serialize)]
pub struct SeriesSizeQuery {
    pub factors: Vec<Factor>,
    pub component_order: u64,
    pub convention: Option<DisconnectedConvention>,
}

impl SeriesSizeQuery {
    /// Parses a `+`-separated centralizer label; torus factors `T` or `Tk`
    /// are skipped.
    pub fn connected(label: &str) -> Result<SeriesSizeQuery, CountError> {
        let mut factors = Vec::new();
        for part in label.split('+') {
            let part = part.trim();
            if part.is_empty() || part == "T" || (part.starts_with('T') && part[1..].parse::<u32>().is_ok()) {
                continue;
            }
            factors.push(Factor::parse(part)?);
        }
        Ok(SeriesSizeQuery { factors, component_order: 1, convention: None })
    }
}

/// Size of the Lusztig series for the given centralizer query.
pub fn series_size(
    query: &SeriesSizeQuery,
    table: &UnipotentCountTable,
) -> Result<u64, CountError> {
    let product: u64 = query
        .factors
        .iter()
        .map(|f| count_unipotent(f.label, f.twist, table))
        .collect::<Result<Vec<u64>, _>>()?
        .into_iter()
        .product();
    if query.component_order == 1 {
        return Ok(product);
    }
    match query.convention {
        None => Err(CountError::DisconnectedNeedsConvention {
            component_order: query.component_order,
        }),
        Some(DisconnectedConvention::Explicit(n)) => Ok(n),
        Some(DisconnectedConvention::ScaleByComponentOrder) => {
            Ok(product * query.component_order)
        }
    }
}
