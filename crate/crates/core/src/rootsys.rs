//! Exact root-system kernel.
//!
//! Roots are stored as integer vectors in the simple-root basis and coroots
//! as integer vectors in the simple-coroot basis, so reflection, closure and
//! pairing computations are exact. The Cartan matrix convention here is
//! `cartan[i][j] = ⟨α_j, α_i^∨⟩`, i.e. row `i` lists the pairings of the
//! `i`-th simple coroot against every simple root.
//!
//! Torsion points of the adjoint torus live in the fundamental-coweight
//! basis; in those coordinates a point lies in the coweight lattice exactly
//! when it is integral, and the coroot lattice is the row span of the Cartan
//! matrix.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use num_rational::Ratio;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::intmat::{self, IntMat, Rat};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RootSysError {
    #[error("unsupported Cartan type label `{0}`")]
    UnsupportedLabel(String),
    #[error("invalid simple system: {0}")]
    InvalidBase(String),
    #[error("subsystem is not a Levi subsystem of the ambient datum")]
    NotALeviSubsystem,
}

/// Irreducible Cartan types supported as ambient systems or as subsystem
/// components. Classical ranks are bounded by 8 since no centralizer in an
/// exceptional group exceeds ambient rank 8.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum CartanType {
    A(u8),
    B(u8),
    C(u8),
    D(u8),
    E6,
    E7,
    E8,
    F4,
    G2,
}

pub const MAX_CLASSICAL_RANK: u8 = 8;

impl CartanType {
    pub fn rank(self) -> usize {
        match self {
            CartanType::A(n) | CartanType::B(n) | CartanType::C(n) | CartanType::D(n) => {
                n as usize
            }
            CartanType::E6 => 6,
            CartanType::E7 => 7,
            CartanType::E8 => 8,
            CartanType::F4 => 4,
            CartanType::G2 => 2,
        }
    }

    pub fn root_count(self) -> usize {
        let n = self.rank();
        match self {
            CartanType::A(_) => n * (n + 1),
            CartanType::B(_) | CartanType::C(_) => 2 * n * n,
            CartanType::D(_) => 2 * n * (n - 1),
            CartanType::E6 => 72,
            CartanType::E7 => 126,
            CartanType::E8 => 240,
            CartanType::F4 => 48,
            CartanType::G2 => 12,
        }
    }

    /// Degrees of the fundamental Weyl-group invariants.
    pub fn weyl_degrees(self) -> Vec<u32> {
        let n = self.rank() as u32;
        match self {
            CartanType::A(_) => (2..=n + 1).collect(),
            CartanType::B(_) | CartanType::C(_) => (1..=n).map(|i| 2 * i).collect(),
            CartanType::D(_) => {
                let mut d: Vec<u32> = (1..n).map(|i| 2 * i).collect();
                d.push(n);
                d.sort_unstable();
                d
            }
            CartanType::E6 => vec![2, 5, 6, 8, 9, 12],
            CartanType::E7 => vec![2, 6, 8, 10, 12, 14, 18],
            CartanType::E8 => vec![2, 8, 12, 14, 18, 20, 24, 30],
            CartanType::F4 => vec![2, 6, 8, 12],
            CartanType::G2 => vec![2, 6],
        }
    }

    pub fn weyl_order(self) -> u128 {
        self.weyl_degrees().iter().map(|&d| d as u128).product()
    }

    /// Dimension of the corresponding simple algebraic group.
    pub fn dimension(self) -> usize {
        self.root_count() + self.rank()
    }

    /// Order of the fundamental group (coweight lattice over coroot lattice).
    pub fn fundamental_group_order(self) -> u64 {
        match self {
            CartanType::A(n) => n as u64 + 1,
            CartanType::B(_) | CartanType::C(_) | CartanType::E7 => 2,
            CartanType::D(_) => 4,
            CartanType::E6 => 3,
            CartanType::E8 | CartanType::F4 | CartanType::G2 => 1,
        }
    }

    pub fn bad_primes(self) -> &'static [u64] {
        match self {
            CartanType::A(_) => &[],
            CartanType::B(_) | CartanType::C(_) | CartanType::D(_) => &[2],
            CartanType::G2 | CartanType::F4 | CartanType::E6 | CartanType::E7 => &[2, 3],
            CartanType::E8 => &[2, 3, 5],
        }
    }

    pub fn is_exceptional(self) -> bool {
        matches!(
            self,
            CartanType::G2 | CartanType::F4 | CartanType::E6 | CartanType::E7 | CartanType::E8
        )
    }

    fn letter(self) -> char {
        match self {
            CartanType::A(_) => 'A',
            CartanType::B(_) => 'B',
            CartanType::C(_) => 'C',
            CartanType::D(_) => 'D',
            CartanType::E6 | CartanType::E7 | CartanType::E8 => 'E',
            CartanType::F4 => 'F',
            CartanType::G2 => 'G',
        }
    }

    pub fn parse(label: &str) -> Result<Self, RootSysError> {
        let err = || RootSysError::UnsupportedLabel(label.to_string());
        let label = label.trim();
        let mut chars = label.chars();
        let letter = chars.next().ok_or_else(err)?.to_ascii_uppercase();
        let n: u8 = chars.as_str().parse().map_err(|_| err())?;
        let ty = match letter {
            'A' if (1..=MAX_CLASSICAL_RANK).contains(&n) => CartanType::A(n),
            'B' if (2..=MAX_CLASSICAL_RANK).contains(&n) => CartanType::B(n),
            'C' if (2..=MAX_CLASSICAL_RANK).contains(&n) => CartanType::C(n),
            'D' if (3..=MAX_CLASSICAL_RANK).contains(&n) => CartanType::D(n),
            'E' if n == 6 => CartanType::E6,
            'E' if n == 7 => CartanType::E7,
            'E' if n == 8 => CartanType::E8,
            'F' if n == 4 => CartanType::F4,
            'G' if n == 2 => CartanType::G2,
            _ => return Err(err()),
        };
        Ok(ty)
    }
}

impl std::fmt::Display for CartanType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}{}", self.letter(), self.rank())
    }
}

/// A complete root datum for one irreducible type: roots, coroots, Cartan
/// matrix, coweight basis and the reflection action, all exact.
#[derive(Clone, Debug)]
pub struct RootDatum {
    pub label: CartanType,
    pub rank: usize,
    /// `cartan[i][j] = ⟨α_j, α_i^∨⟩`
    pub cartan: Vec<Vec<i64>>,
    /// All roots in the simple-root basis, the positive ones first, sorted by
    /// height then lexicographically. Root `n_positive + i` is `-roots[i]`.
    roots: Vec<Vec<i64>>,
    /// Coroots in the simple-coroot basis, indexed like `roots`.
    coroots: Vec<Vec<i64>>,
    n_positive: usize,
    root_index: HashMap<Vec<i64>, usize>,
    /// Permutation of root indices induced by each simple reflection.
    simple_perms: Vec<Vec<u32>>,
    /// Fundamental coweights expressed in the simple-coroot basis
    /// (the inverse Cartan matrix).
    pub coweight_basis: Vec<Vec<Rat>>,
    /// Coefficients of the highest root in the simple-root basis.
    pub marks: Vec<i64>,
    /// Highest coroot θ^∨ in fundamental-coweight coordinates.
    pub theta_coroot_coweight: Vec<i64>,
    /// Coset representatives of the coweight lattice modulo the coroot
    /// lattice, in coweight coordinates. The zero vector comes first.
    pub fundamental_group_reps: Vec<Vec<i64>>,
}

/// Builds the full root datum for a supported Cartan type.
pub fn build_root_datum(label: CartanType) -> Result<RootDatum, RootSysError> {
    let rank = label.rank();
    let cartan = cartan_matrix(label)?;

    // Close the simple roots under all simple reflections.
    let mut index: HashMap<Vec<i64>, usize> = HashMap::new();
    let mut all: Vec<Vec<i64>> = Vec::new();
    let mut queue: VecDeque<Vec<i64>> = VecDeque::new();
    for i in 0..rank {
        let mut v = vec![0i64; rank];
        v[i] = 1;
        index.insert(v.clone(), all.len());
        all.push(v.clone());
        queue.push_back(v);
    }
    while let Some(r) = queue.pop_front() {
        for i in 0..rank {
            let pairing: i64 = (0..rank).map(|j| cartan[i][j] * r[j]).sum();
            if pairing == 0 {
                continue;
            }
            let mut s = r.clone();
            s[i] -= pairing;
            if !index.contains_key(&s) {
                index.insert(s.clone(), all.len());
                all.push(s.clone());
                queue.push_back(s);
            }
        }
    }
    // Also close under negation (reflection closure already contains it for
    // irreducible systems, but keep the invariant explicit).
    for r in all.clone() {
        let neg: Vec<i64> = r.iter().map(|&c| -c).collect();
        if !index.contains_key(&neg) {
            index.insert(neg.clone(), all.len());
            all.push(neg);
        }
    }

    let mut positives: Vec<Vec<i64>> = all
        .iter()
        .filter(|r| r.iter().all(|&c| c >= 0))
        .cloned()
        .collect();
    // Sort by height, then so that root index i < rank is the simple
    // root α_{i+1} in Cartan order.
    positives.sort_by_key(|r| {
        (r.iter().sum::<i64>(), r.iter().rev().copied().collect::<Vec<i64>>())
    });
    for (i, root) in positives.iter().take(rank).enumerate() {
        debug_assert!(
            root.iter().enumerate().all(|(j, &c)| c == i64::from(j == i)),
            "simple roots must head the root list in Cartan order"
        );
    }
    let n_positive = positives.len();
    if 2 * n_positive != all.len() {
        return Err(RootSysError::InvalidBase(format!(
            "root closure of {label} produced a non-symmetric set"
        )));
    }

    let mut roots = positives;
    for i in 0..n_positive {
        let neg: Vec<i64> = roots[i].iter().map(|&c| -c).collect();
        roots.push(neg);
    }
    let root_index: HashMap<Vec<i64>, usize> =
        roots.iter().enumerate().map(|(i, r)| (r.clone(), i)).collect();

    // Coroots: trace each root back to a simple root through reflections.
    // s_i acts on coroot coordinates by d ↦ d - (Σ_k d_k cartan[k][i]) e_i.
    let mut coroots: Vec<Option<Vec<i64>>> = vec![None; roots.len()];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for i in 0..rank {
        let mut v = vec![0i64; rank];
        v[i] = 1;
        let idx = root_index[&{
            let mut r = vec![0i64; rank];
            r[i] = 1;
            r
        }];
        coroots[idx] = Some(v);
        queue.push_back(idx);
    }
    let simple_perms = simple_permutations(&roots, &root_index, &cartan, rank);
    while let Some(r) = queue.pop_front() {
        let d = coroots[r].clone().unwrap();
        for i in 0..rank {
            let img = simple_perms[i][r] as usize;
            if coroots[img].is_none() {
                let pairing: i64 = (0..rank).map(|k| d[k] * cartan[k][i]).sum();
                let mut nd = d.clone();
                nd[i] -= pairing;
                coroots[img] = Some(nd);
                queue.push_back(img);
            }
        }
    }
    let coroots: Vec<Vec<i64>> = coroots.into_iter().map(Option::unwrap).collect();

    if roots.len() != label.root_count() {
        return Err(RootSysError::InvalidBase(format!(
            "{label}: closure produced {} roots, expected {}",
            roots.len(),
            label.root_count()
        )));
    }

    // Highest root: unique height maximum among positive roots.
    let marks = roots[n_positive - 1].clone();
    let theta_height: i64 = marks.iter().sum();
    assert_eq!(
        roots[..n_positive].iter().filter(|r| r.iter().sum::<i64>() == theta_height).count(),
        1,
        "highest root must be unique"
    );
    let theta_coroot = &coroots[n_positive - 1];
    let theta_coroot_coweight: Vec<i64> = (0..rank)
        .map(|j| (0..rank).map(|k| theta_coroot[k] * cartan[k][j]).sum())
        .collect();

    let cartan_mat = IntMat::from_rows(
        &cartan.iter().map(|row| row.iter().map(|&v| v as i128).collect()).collect::<Vec<_>>(),
    );
    let coweight_basis =
        intmat::rational_inverse(&cartan_mat).expect("Cartan matrix is invertible");

    let fundamental_group_reps = fundamental_group_reps(&cartan_mat, &coweight_basis, rank);

    Ok(RootDatum {
        label,
        rank,
        cartan,
        roots,
        coroots,
        n_positive,
        root_index,
        simple_perms,
        coweight_basis,
        marks,
        theta_coroot_coweight,
        fundamental_group_reps,
    })
}

fn simple_permutations(
    roots: &[Vec<i64>],
    root_index: &HashMap<Vec<i64>, usize>,
    cartan: &[Vec<i64>],
    rank: usize,
) -> Vec<Vec<u32>> {
    (0..rank)
        .map(|i| {
            roots
                .iter()
                .map(|r| {
                    let pairing: i64 = (0..rank).map(|j| cartan[i][j] * r[j]).sum();
                    let mut s = r.clone();
                    s[i] -= pairing;
                    root_index[&s] as u32
                })
                .collect()
        })
        .collect()
}

fn fundamental_group_reps(
    cartan: &IntMat,
    cartan_inv: &[Vec<Rat>],
    rank: usize,
) -> Vec<Vec<i64>> {
    let order = intmat::determinant(cartan).unsigned_abs();
    let in_coroot_lattice = |v: &[i64]| -> bool {
        (0..rank).all(|k| {
            let coeff: Rat =
                (0..rank).map(|j| Rat::from_integer(v[j] as i128) * cartan_inv[j][k]).sum();
            coeff.is_integer()
        })
    };
    let mut reps: Vec<Vec<i64>> = vec![vec![0; rank]];
    let mut frontier = reps.clone();
    while (reps.len() as u128) < order {
        let mut next = Vec::new();
        for base in &frontier {
            for i in 0..rank {
                let mut cand = base.clone();
                cand[i] += 1;
                let diff_known = reps.iter().any(|r| {
                    let d: Vec<i64> = cand.iter().zip(r).map(|(&a, &b)| a - b).collect();
                    in_coroot_lattice(&d)
                });
                if !diff_known {
                    reps.push(cand.clone());
                    next.push(cand);
                }
            }
        }
        assert!(!next.is_empty(), "fundamental group enumeration stalled");
        frontier = next;
    }
    reps
}

fn cartan_matrix(label: CartanType) -> Result<Vec<Vec<i64>>, RootSysError> {
    let n = label.rank();
    let mut m = vec![vec![0i64; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 2;
    }
    let edge = |m: &mut Vec<Vec<i64>>, i: usize, j: usize| {
        m[i][j] = -1;
        m[j][i] = -1;
    };
    match label {
        CartanType::A(_) => {
            for i in 1..n {
                edge(&mut m, i - 1, i);
            }
        }
        CartanType::B(_) => {
            for i in 1..n {
                edge(&mut m, i - 1, i);
            }
            // last simple root short: its coroot pairs to -2 with its neighbor
            m[n - 1][n - 2] = -2;
        }
        CartanType::C(_) => {
            for i in 1..n {
                edge(&mut m, i - 1, i);
            }
            m[n - 2][n - 1] = -2;
        }
        CartanType::D(_) => {
            for i in 1..n - 1 {
                edge(&mut m, i - 1, i);
            }
            edge(&mut m, n - 3, n - 1);
        }
        CartanType::E6 | CartanType::E7 | CartanType::E8 => {
            // Bourbaki numbering: chain 1-3-4-5-6(-7)(-8), node 2 joined to 4.
            edge(&mut m, 0, 2);
            edge(&mut m, 1, 3);
            for i in 3..n {
                edge(&mut m, i - 1, i);
            }
        }
        CartanType::F4 => {
            edge(&mut m, 0, 1);
            edge(&mut m, 1, 2);
            edge(&mut m, 2, 3);
            m[2][1] = -2; // α3 short
        }
        CartanType::G2 => {
            edge(&mut m, 0, 1);
            m[0][1] = -3; // α1 short
        }
    }
    Ok(m)
}

impl RootDatum {
    pub fn num_roots(&self) -> usize {
        self.roots.len()
    }

    pub fn num_positive(&self) -> usize {
        self.n_positive
    }

    pub fn root(&self, idx: usize) -> &[i64] {
        &self.roots[idx]
    }

    pub fn coroot(&self, idx: usize) -> &[i64] {
        &self.coroots[idx]
    }

    pub fn positive_roots(&self) -> &[Vec<i64>] {
        &self.roots[..self.n_positive]
    }

    pub fn root_index_of(&self, coords: &[i64]) -> Option<usize> {
        self.root_index.get(coords).copied()
    }

    pub fn is_positive(&self, idx: usize) -> bool {
        idx < self.n_positive
    }

    pub fn negative_of(&self, idx: usize) -> usize {
        if idx < self.n_positive {
            idx + self.n_positive
        } else {
            idx - self.n_positive
        }
    }

    pub fn weyl_order(&self) -> u128 {
        self.label.weyl_order()
    }

    /// `⟨α_a, α_b^∨⟩` for two root indices.
    pub fn pairing(&self, a: usize, b: usize) -> i64 {
        let c = &self.roots[a];
        let d = &self.coroots[b];
        (0..self.rank)
            .map(|k| d[k] * (0..self.rank).map(|j| self.cartan[k][j] * c[j]).sum::<i64>())
            .sum()
    }

    /// Image of root `a` under the reflection in root `b`.
    pub fn reflect_root(&self, a: usize, b: usize) -> usize {
        let pairing = self.pairing(a, b);
        let coords: Vec<i64> = (0..self.rank)
            .map(|j| self.roots[a][j] - pairing * self.roots[b][j])
            .collect();
        self.root_index[&coords]
    }

    pub fn simple_perm(&self, i: usize) -> &[u32] {
        &self.simple_perms[i]
    }

    /// Pairing of a root (as linear functional) with a point in
    /// fundamental-coweight coordinates.
    pub fn root_pairing_point(&self, root: usize, x: &[Ratio<i64>]) -> Ratio<i64> {
        self.roots[root]
            .iter()
            .zip(x)
            .map(|(&c, v)| Ratio::from_integer(c) * v)
            .sum()
    }

    /// Applies the simple reflection `i` to a point in coweight coordinates.
    pub fn reflect_coweight(&self, i: usize, x: &mut [Ratio<i64>]) {
        let xi = x[i];
        if xi.is_zero() {
            return;
        }
        for j in 0..self.rank {
            if self.cartan[i][j] != 0 {
                x[j] -= Ratio::from_integer(self.cartan[i][j]) * xi;
            }
        }
    }
}

/// A root subsystem together with its canonical type decomposition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Subsystem {
    /// Root indices of a simple system for the subsystem.
    pub simple_roots: Vec<usize>,
    /// Canonical label, components ordered by decreasing rank then letter,
    /// e.g. `A5+A1`. The empty subsystem is labelled `T`.
    pub type_string: String,
    /// All root indices of the subsystem, sorted.
    pub full_roots: Vec<usize>,
    /// Component types matching `type_string`.
    pub components: Vec<CartanType>,
}

impl Subsystem {
    pub fn rank(&self) -> usize {
        self.simple_roots.len()
    }

    pub fn weyl_order(&self) -> u128 {
        self.components.iter().map(|c| c.weyl_order()).product()
    }

    pub fn is_type_a(&self) -> bool {
        self.components.iter().all(|c| matches!(c, CartanType::A(_)))
    }
}

/// Classifies a base of roots as a subsystem: validates the simple system,
/// takes the reflection closure and computes the canonical type label.
pub fn classify_subsystem(base: &[usize], datum: &RootDatum) -> Result<Subsystem, RootSysError> {
    validate_base(base, datum)?;
    let full = reflection_closure(base, datum);
    let (type_string, components) = type_of_base(base, datum)?;
    let mut simple_roots = base.to_vec();
    simple_roots.sort_unstable();
    Ok(Subsystem { simple_roots, type_string, full_roots: full, components })
}

fn validate_base(base: &[usize], datum: &RootDatum) -> Result<(), RootSysError> {
    let mut seen = HashSet::new();
    for &b in base {
        if b >= datum.num_roots() {
            return Err(RootSysError::InvalidBase(format!("root index {b} out of range")));
        }
        if !seen.insert(b) {
            return Err(RootSysError::InvalidBase("repeated root in base".into()));
        }
    }
    for (k, &a) in base.iter().enumerate() {
        for &b in &base[k + 1..] {
            if datum.pairing(a, b) > 0 {
                return Err(RootSysError::InvalidBase(format!(
                    "roots {a} and {b} have positive pairing"
                )));
            }
        }
    }
    // Linear independence over Q.
    let m = IntMat::from_rows(
        &base
            .iter()
            .map(|&b| datum.root(b).iter().map(|&v| v as i128).collect())
            .collect::<Vec<_>>(),
    );
    if !intmat::kernel_basis(&transpose(&m)).is_empty() {
        return Err(RootSysError::InvalidBase("base is linearly dependent".into()));
    }
    Ok(())
}

fn transpose(m: &IntMat) -> IntMat {
    let mut t = IntMat::zeros(m.cols, m.rows);
    for i in 0..m.rows {
        for j in 0..m.cols {
            t[(j, i)] = m[(i, j)];
        }
    }
    t
}

/// Closure of `±base` under reflections in the subsystem's own roots.
pub fn reflection_closure(base: &[usize], datum: &RootDatum) -> Vec<usize> {
    let mut set: HashSet<usize> = HashSet::new();
    let mut queue: VecDeque<usize> = VecDeque::new();
    for &b in base {
        for idx in [b, datum.negative_of(b)] {
            if set.insert(idx) {
                queue.push_back(idx);
            }
        }
    }
    while let Some(r) = queue.pop_front() {
        for &b in base {
            let img = datum.reflect_root(r, b);
            if set.insert(img) {
                queue.push_back(img);
            }
        }
        // Reflect the base through r as well so non-simple generators act.
        for &b in base {
            let img = datum.reflect_root(b, r);
            if set.insert(img) {
                queue.push_back(img);
            }
        }
    }
    let mut out: Vec<usize> = set.into_iter().collect();
    out.sort_unstable();
    out
}

/// Closure of a symmetric root set under addition: if α, β are in the set and
/// α+β is a root, α+β joins the set.
pub fn additive_closure(set: &[usize], datum: &RootDatum) -> Vec<usize> {
    let mut full: HashSet<usize> = set.iter().copied().collect();
    for &r in set {
        full.insert(datum.negative_of(r));
    }
    loop {
        let members: Vec<usize> = full.iter().copied().collect();
        let mut grew = false;
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                let sum: Vec<i64> = datum
                    .root(a)
                    .iter()
                    .zip(datum.root(b))
                    .map(|(&x, &y)| x + y)
                    .collect();
                if let Some(idx) = datum.root_index_of(&sum) {
                    if full.insert(idx) {
                        grew = true;
                    }
                }
            }
        }
        if !grew {
            break;
        }
    }
    let mut out: Vec<usize> = full.into_iter().collect();
    out.sort_unstable();
    out
}

/// Recovers a subsystem structure from a closed symmetric set of roots.
pub fn subsystem_from_root_set(set: &[usize], datum: &RootDatum) -> Subsystem {
    let positives: Vec<usize> = set.iter().copied().filter(|&r| datum.is_positive(r)).collect();
    let pos_set: HashSet<usize> = positives.iter().copied().collect();
    let mut simples = Vec::new();
    'outer: for &a in &positives {
        for &b in &positives {
            if b == a {
                continue;
            }
            let diff: Vec<i64> = datum
                .root(a)
                .iter()
                .zip(datum.root(b))
                .map(|(&x, &y)| x - y)
                .collect();
            if let Some(idx) = datum.root_index_of(&diff) {
                if pos_set.contains(&idx) {
                    continue 'outer; // a = b + (a-b) is decomposable
                }
            }
        }
        simples.push(a);
    }
    let (type_string, components) =
        type_of_base(&simples, datum).expect("closed set must yield a valid simple system");
    let mut full: Vec<usize> = set.to_vec();
    full.sort_unstable();
    Subsystem { simple_roots: simples, type_string, full_roots: full, components }
}

/// Canonical type decomposition of a valid base.
fn type_of_base(
    base: &[usize],
    datum: &RootDatum,
) -> Result<(String, Vec<CartanType>), RootSysError> {
    if base.is_empty() {
        return Ok(("T".to_string(), Vec::new()));
    }
    let n = base.len();
    let pair = |i: usize, j: usize| datum.pairing(base[i], base[j]);

    // Connected components of the diagram.
    let mut component_of = vec![usize::MAX; n];
    let mut n_components = 0;
    for start in 0..n {
        if component_of[start] != usize::MAX {
            continue;
        }
        let mut stack = vec![start];
        component_of[start] = n_components;
        while let Some(v) = stack.pop() {
            for u in 0..n {
                if component_of[u] == usize::MAX && pair(v, u) != 0 {
                    component_of[u] = n_components;
                    stack.push(u);
                }
            }
        }
        n_components += 1;
    }

    let mut components = Vec::new();
    for c in 0..n_components {
        let nodes: Vec<usize> = (0..n).filter(|&i| component_of[i] == c).collect();
        components.push(classify_component(&nodes, &pair)?);
    }
    components.sort_by_key(|t| (std::cmp::Reverse(t.rank()), t.letter()));
    let type_string = components.iter().map(|t| t.to_string()).collect::<Vec<_>>().join("+");
    Ok((type_string, components))
}

fn classify_component(
    nodes: &[usize],
    pair: &dyn Fn(usize, usize) -> i64,
) -> Result<CartanType, RootSysError> {
    let invalid = |msg: &str| RootSysError::InvalidBase(msg.to_string());
    let n = nodes.len() as u8;
    if n == 1 {
        return Ok(CartanType::A(1));
    }
    if n > MAX_CLASSICAL_RANK {
        return Err(invalid("component rank exceeds the supported bound"));
    }
    // Edge list with bond multiplicities c_ij * c_ji.
    let mut edges = Vec::new();
    let mut degree = vec![0usize; nodes.len()];
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            let (a, b) = (pair(nodes[i], nodes[j]), pair(nodes[j], nodes[i]));
            if a == 0 {
                continue;
            }
            let bond = (a * b) as u8;
            if a > 0 || b >= 0 || bond > 3 {
                return Err(invalid("pairings do not form a Cartan matrix"));
            }
            edges.push((i, j, bond));
            degree[i] += 1;
            degree[j] += 1;
        }
    }
    if edges.len() != nodes.len() - 1 {
        return Err(invalid("component diagram is not a tree"));
    }
    let max_bond = edges.iter().map(|&(_, _, b)| b).max().unwrap();
    if max_bond == 3 {
        if n == 2 {
            return Ok(CartanType::G2);
        }
        return Err(invalid("triple bond in a component of rank > 2"));
    }
    if max_bond == 2 {
        if degree.iter().any(|&d| d > 2) {
            return Err(invalid("double bond with a branch node"));
        }
        // Walk the path from one end.
        let path = path_order(nodes.len(), &edges).ok_or_else(|| invalid("not a path"))?;
        let double_pos = (0..path.len() - 1)
            .find(|&k| {
                edges
                    .iter()
                    .any(|&(i, j, b)| b == 2 && ((i, j) == (path[k], path[k + 1]) || (j, i) == (path[k], path[k + 1])))
            })
            .unwrap();
        if n == 2 {
            return Ok(CartanType::B(2));
        }
        if double_pos == 0 || double_pos == path.len() - 2 {
            // Orient so the double bond is at the far end.
            let p: Vec<usize> =
                if double_pos == 0 { path.iter().rev().copied().collect() } else { path };
            let end = p[p.len() - 1];
            let prev = p[p.len() - 2];
            // ⟨α_prev, α_end^∨⟩ = -2 means the end node is short: type B.
            if pair(nodes[prev], nodes[end]) == -2 {
                return Ok(CartanType::B(n));
            }
            return Ok(CartanType::C(n));
        }
        if n == 4 && double_pos == 1 {
            return Ok(CartanType::F4);
        }
        return Err(invalid("interior double bond is not of type F4"));
    }
    // Simply laced.
    let branch_nodes: Vec<usize> = (0..nodes.len()).filter(|&i| degree[i] == 3).collect();
    if degree.iter().any(|&d| d > 3) || branch_nodes.len() > 1 {
        return Err(invalid("diagram is not of finite type"));
    }
    if branch_nodes.is_empty() {
        return Ok(CartanType::A(n));
    }
    let b = branch_nodes[0];
    let mut arms: Vec<u8> = edges
        .iter()
        .filter(|&&(i, j, _)| i == b || j == b)
        .map(|&(i, j, _)| {
            let mut prev = b;
            let mut cur = if i == b { j } else { i };
            let mut len = 1u8;
            loop {
                let next = edges
                    .iter()
                    .filter(|&&(x, y, _)| (x == cur || y == cur) && (x != prev && y != prev))
                    .map(|&(x, y, _)| if x == cur { y } else { x })
                    .next();
                match next {
                    Some(nx) => {
                        prev = cur;
                        cur = nx;
                        len += 1;
                    }
                    None => break,
                }
            }
            len
        })
        .collect();
    arms.sort_unstable();
    match arms.as_slice() {
        [1, 1, _] => Ok(CartanType::D(n)),
        [1, 2, 2] => Ok(CartanType::E6),
        [1, 2, 3] => Ok(CartanType::E7),
        [1, 2, 4] => Ok(CartanType::E8),
        _ => Err(invalid("branch diagram is not of finite type")),
    }
}

fn path_order(n: usize, edges: &[(usize, usize, u8)]) -> Option<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(i, j, _) in edges {
        adj[i].push(j);
        adj[j].push(i);
    }
    let start = (0..n).find(|&i| adj[i].len() == 1)?;
    let mut path = vec![start];
    let mut prev = usize::MAX;
    let mut cur = start;
    while path.len() < n {
        let next = *adj[cur].iter().find(|&&x| x != prev)?;
        path.push(next);
        prev = cur;
        cur = next;
    }
    Some(path)
}

/// Lexicographically minimal Weyl image of a sorted root-index set.
///
/// The walk explores the full orbit of the set under the simple reflections,
/// so the representative is deterministic and canonical.
pub fn canonical_root_set(set: &[usize], datum: &RootDatum) -> Vec<usize> {
    let mut start: Vec<u32> = set.iter().map(|&x| x as u32).collect();
    start.sort_unstable();
    let mut best = start.clone();
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    seen.insert(start.clone());
    let mut queue = VecDeque::new();
    queue.push_back(start);
    while let Some(s) = queue.pop_front() {
        for i in 0..datum.rank {
            let perm = datum.simple_perm(i);
            let mut img: Vec<u32> = s.iter().map(|&r| perm[r as usize]).collect();
            img.sort_unstable();
            if !seen.contains(&img) {
                if img < best {
                    best = img.clone();
                }
                seen.insert(img.clone());
                queue.push_back(img);
            }
        }
    }
    best.into_iter().map(|x| x as usize).collect()
}

/// One representative per Weyl-conjugacy class of parabolic (Levi)
/// subsystems, i.e. subsystems generated by subsets of the simple roots.
pub fn enumerate_levi_subsystems(datum: &RootDatum) -> Vec<Subsystem> {
    let rank = datum.rank;
    let mut by_canon: BTreeMap<Vec<usize>, Subsystem> = BTreeMap::new();
    for mask in 0u32..(1 << rank) {
        let base: Vec<usize> = (0..rank).filter(|&i| mask & (1 << i) != 0).collect();
        let sub = classify_subsystem(&base, datum).expect("simple-root subsets are valid bases");
        let canon = canonical_root_set(&sub.full_roots, datum);
        by_canon.entry(canon).or_insert(sub);
    }
    let mut out: Vec<Subsystem> = by_canon.into_values().collect();
    out.sort_by(|a, b| {
        (a.rank(), &a.type_string, &a.full_roots).cmp(&(b.rank(), &b.type_string, &b.full_roots))
    });
    out
}

/// All closed subsystems reachable by the extended-diagram algorithm: extend
/// one component by its lowest root and delete a node, or delete a base node
/// outright, iterated to closure. Representatives up to Weyl conjugacy.
pub fn pseudo_levi_subsystems(datum: &RootDatum) -> Vec<Subsystem> {
    let full: Vec<usize> = (0..datum.num_roots()).collect();
    let start = subsystem_from_root_set(&full, datum);
    let mut by_canon: BTreeMap<Vec<usize>, Subsystem> = BTreeMap::new();
    by_canon.insert(canonical_root_set(&start.full_roots, datum), start.clone());
    let mut queue = VecDeque::new();
    queue.push_back(start);
    while let Some(sys) = queue.pop_front() {
        for base in extension_moves(&sys, datum) {
            let sub =
                classify_subsystem(&base, datum).expect("extended-diagram bases remain valid");
            let canon = canonical_root_set(&sub.full_roots, datum);
            if !by_canon.contains_key(&canon) {
                by_canon.insert(canon, sub.clone());
                queue.push_back(sub);
            }
        }
    }
    let mut out: Vec<Subsystem> = by_canon.into_values().collect();
    out.sort_by(|a, b| {
        (a.rank(), &a.type_string, &a.full_roots).cmp(&(b.rank(), &b.type_string, &b.full_roots))
    });
    out
}

fn extension_moves(sys: &Subsystem, datum: &RootDatum) -> Vec<Vec<usize>> {
    let base = &sys.simple_roots;
    let mut moves = Vec::new();
    // Plain node deletions.
    for k in 0..base.len() {
        let mut b = base.clone();
        b.remove(k);
        moves.push(b);
    }
    if base.is_empty() {
        return moves;
    }
    // Borel-de Siebenthal step on each component.
    let pair = |i: &usize, j: &usize| datum.pairing(*i, *j);
    let mut comp_of: HashMap<usize, usize> = HashMap::new();
    let mut n_comp = 0;
    for &s in base {
        if comp_of.contains_key(&s) {
            continue;
        }
        let mut stack = vec![s];
        comp_of.insert(s, n_comp);
        while let Some(v) = stack.pop() {
            for &u in base {
                if !comp_of.contains_key(&u) && pair(&v, &u) != 0 {
                    comp_of.insert(u, n_comp);
                    stack.push(u);
                }
            }
        }
        n_comp += 1;
    }
    for c in 0..n_comp {
        let comp: Vec<usize> = base.iter().copied().filter(|s| comp_of[s] == c).collect();
        let rest: Vec<usize> = base.iter().copied().filter(|s| comp_of[s] != c).collect();
        let lowest = datum.negative_of(highest_root_of(&comp, datum));
        if comp.contains(&lowest) {
            continue;
        }
        let mut extended = comp.clone();
        extended.push(lowest);
        for k in 0..extended.len() {
            if extended[k] == lowest {
                continue; // deleting the affine node recovers the component
            }
            let mut b = rest.clone();
            b.extend(extended.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, &r)| r));
            moves.push(b);
        }
    }
    moves
}

/// Highest root of the irreducible subsystem generated by `comp`.
fn highest_root_of(comp: &[usize], datum: &RootDatum) -> usize {
    let roots = reflection_closure(comp, datum);
    // Express each subsystem root in the component base and take the unique
    // maximal height.
    let base_mat = IntMat::from_rows(
        &comp
            .iter()
            .map(|&b| datum.root(b).iter().map(|&v| v as i128).collect())
            .collect::<Vec<_>>(),
    );
    let mut best: Option<(Rat, usize)> = None;
    for &r in &roots {
        let target: Vec<i128> = datum.root(r).iter().map(|&v| v as i128).collect();
        if let Some(coords) = solve_in_span(&base_mat, &target) {
            let height: Rat = coords.iter().sum();
            if best.as_ref().map_or(true, |(h, _)| height > *h) {
                best = Some((height, r));
            }
        }
    }
    best.expect("component closure is nonempty").1
}

/// Solves x·M = target over Q, if `target` lies in the row span of `M`.
fn solve_in_span(m: &IntMat, target: &[i128]) -> Option<Vec<Rat>> {
    let rows = m.rows;
    let cols = m.cols;
    let mut a: Vec<Vec<Rat>> = (0..cols)
        .map(|j| {
            let mut row: Vec<Rat> = (0..rows).map(|i| Rat::from_integer(m[(i, j)])).collect();
            row.push(Rat::from_integer(target[j]));
            row
        })
        .collect();
    // Gaussian elimination on the (cols x rows) system aᵀ x = target.
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..rows {
        let Some(p) = (r..cols).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(p, r);
        let inv = a[r][c].recip();
        for j in 0..=rows {
            a[r][j] *= inv;
        }
        for i in 0..cols {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c];
                for j in 0..=rows {
                    let v = f * a[r][j];
                    a[i][j] -= v;
                }
            }
        }
        pivots.push((r, c));
        r += 1;
    }
    // Consistency: rows beyond rank must have zero rhs.
    for i in r..cols {
        if !a[i][rows].is_zero() {
            return None;
        }
    }
    let mut x = vec![Rat::zero(); rows];
    for &(ri, ci) in &pivots {
        x[ci] = a[ri][rows];
    }
    Some(x)
}

/// Result of the coroot-lattice saturation test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LatticeTestResult {
    pub elementary_divisors: Vec<u64>,
    pub is_saturated: bool,
}

/// Tests whether the subsystem's coroot lattice is saturated in the coweight
/// lattice of the ambient (adjoint) datum. For a Levi subsystem L this is
/// exactly the condition that the derived subgroup of L is simply connected.
pub fn derived_simply_connected(
    levi: &Subsystem,
    datum: &RootDatum,
) -> Result<LatticeTestResult, RootSysError> {
    if !is_levi_subsystem(levi, datum) {
        return Err(RootSysError::NotALeviSubsystem);
    }
    Ok(lattice_saturation(levi, datum))
}

/// Smith normal form of the subsystem's simple coroots in coweight
/// coordinates; saturated iff all elementary divisors are 1.
pub fn lattice_saturation(sub: &Subsystem, datum: &RootDatum) -> LatticeTestResult {
    let rows: Vec<Vec<i128>> = sub
        .simple_roots
        .iter()
        .map(|&s| {
            let d = datum.coroot(s);
            (0..datum.rank)
                .map(|j| (0..datum.rank).map(|k| (d[k] * datum.cartan[k][j]) as i128).sum())
                .collect()
        })
        .collect();
    let divisors = if rows.is_empty() {
        Vec::new()
    } else {
        intmat::elementary_divisors(&IntMat::from_rows(&rows))
    };
    let is_saturated = divisors.iter().all(|&d| d == 1);
    LatticeTestResult { elementary_divisors: divisors, is_saturated }
}

/// A subsystem is a Levi subsystem iff it is exactly the set of roots
/// vanishing on its own fixed subspace (the centralizer of a subtorus).
pub fn is_levi_subsystem(sub: &Subsystem, datum: &RootDatum) -> bool {
    let vanishing = vanishing_subsystem_roots(&sub.simple_roots, datum);
    vanishing == sub.full_roots
}

/// Roots vanishing on { x : ⟨α, x⟩ = 0 for all α in `gens` }.
pub fn vanishing_subsystem_roots(gens: &[usize], datum: &RootDatum) -> Vec<usize> {
    let rows: Vec<Vec<i128>> = gens
        .iter()
        .map(|&g| datum.root(g).iter().map(|&v| v as i128).collect())
        .collect();
    let fixed = if rows.is_empty() {
        // Whole space: only the empty subsystem vanishes everywhere.
        let m = IntMat::zeros(0, datum.rank);
        intmat::kernel_basis(&m)
    } else {
        intmat::kernel_basis(&IntMat::from_rows(&rows))
    };
    roots_vanishing_on(&fixed, datum)
}

/// Roots whose pairing with every spanning vector of a subspace (in coweight
/// coordinates) is zero.
pub fn roots_vanishing_on(basis: &[Vec<i128>], datum: &RootDatum) -> Vec<usize> {
    (0..datum.num_roots())
        .filter(|&r| {
            basis.iter().all(|b| {
                datum.root(r).iter().zip(b).map(|(&c, &x)| c as i128 * x).sum::<i128>() == 0
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Deterministic Schreier-Sims on a permutation action: exact group
    /// order as the product of the stabilizer-chain orbit sizes. Test-only
    /// oracle, independent of the Weyl-degree formula.
    mod schreier_sims {
        use std::collections::HashMap;

        fn mul(a: &[u32], b: &[u32]) -> Vec<u32> {
            b.iter().map(|&x| a[x as usize]).collect()
        }

        fn inv(a: &[u32]) -> Vec<u32> {
            let mut out = vec![0u32; a.len()];
            for (i, &v) in a.iter().enumerate() {
                out[v as usize] = i as u32;
            }
            out
        }

        fn is_identity(a: &[u32]) -> bool {
            a.iter().enumerate().all(|(i, &v)| v as usize == i)
        }

        struct Level {
            point: usize,
            gens: Vec<Vec<u32>>,
            transversal: HashMap<usize, Vec<u32>>,
        }

        fn rebuild(level: &mut Level, degree: usize) {
            let mut t = HashMap::new();
            t.insert(level.point, (0..degree as u32).collect::<Vec<u32>>());
            let mut queue = vec![level.point];
            while let Some(p) = queue.pop() {
                let rep = t[&p].clone();
                for g in &level.gens {
                    let q = g[p] as usize;
                    if !t.contains_key(&q) {
                        t.insert(q, mul(g, &rep));
                        queue.push(q);
                    }
                }
            }
            level.transversal = t;
        }

        fn sift(levels: &[Level], g: Vec<u32>) -> (usize, Vec<u32>) {
            let mut h = g;
            for (i, lvl) in levels.iter().enumerate() {
                if is_identity(&h) {
                    return (i, h);
                }
                let img = h[lvl.point] as usize;
                match lvl.transversal.get(&img) {
                    None => return (i, h),
                    Some(rep) => h = mul(&inv(rep), &h),
                }
            }
            (levels.len(), h)
        }

        fn insert_gen(levels: &mut Vec<Level>, at: usize, g: Vec<u32>, degree: usize) {
            if at == levels.len() {
                let point = (0..degree).find(|&p| g[p] as usize != p).unwrap();
                levels.push(Level { point, gens: Vec::new(), transversal: HashMap::new() });
            }
            levels[at].gens.push(g);
            rebuild(&mut levels[at], degree);
        }

        fn close_level(levels: &mut Vec<Level>, level: usize, degree: usize) {
            'restart: loop {
                let mut points: Vec<usize> = levels[level].transversal.keys().copied().collect();
                points.sort_unstable();
                for p in points {
                    for gi in 0..levels[level].gens.len() {
                        let g = levels[level].gens[gi].clone();
                        let tp = levels[level].transversal[&p].clone();
                        let tq = levels[level].transversal[&(g[p] as usize)].clone();
                        let schreier = mul(&inv(&tq), &mul(&g, &tp));
                        if is_identity(&schreier) {
                            continue;
                        }
                        let (rel, residue) = sift(&levels[level + 1..], schreier);
                        if is_identity(&residue) {
                            continue;
                        }
                        // The residue fixes every base point up to its
                        // failure level, so it joins the generating set of
                        // each intermediate level; re-close deepest first.
                        let at = level + 1 + rel;
                        if at == levels.len() {
                            insert_gen(levels, at, residue.clone(), degree);
                        }
                        for j in level + 1..=at.min(levels.len() - 1) {
                            if j == at && levels[at].gens.last() == Some(&residue) {
                                continue;
                            }
                            levels[j].gens.push(residue.clone());
                            rebuild(&mut levels[j], degree);
                        }
                        for j in (level + 1..=at.min(levels.len() - 1)).rev() {
                            close_level(levels, j, degree);
                        }
                        continue 'restart;
                    }
                }
                return;
            }
        }

        pub fn group_order(gens: &[Vec<u32>]) -> u128 {
            let degree = gens[0].len();
            let mut levels: Vec<Level> = Vec::new();
            for g in gens {
                if !is_identity(g) {
                    if levels.is_empty() {
                        insert_gen(&mut levels, 0, g.clone(), degree);
                    } else {
                        levels[0].gens.push(g.clone());
                        rebuild(&mut levels[0], degree);
                    }
                }
            }
            if levels.is_empty() {
                return 1;
            }
            close_level(&mut levels, 0, degree);
            levels.iter().map(|l| l.transversal.len() as u128).product()
        }
    }

    fn datum(label: CartanType) -> RootDatum {
        build_root_datum(label).unwrap()
    }

    fn weyl_order_oracle(d: &RootDatum) -> u128 {
        let gens: Vec<Vec<u32>> = (0..d.rank).map(|i| d.simple_perm(i).to_vec()).collect();
        schreier_sims::group_order(&gens)
    }

    #[test]
    fn root_counts_match_classical_values() {
        for (label, count) in [
            (CartanType::G2, 12),
            (CartanType::F4, 48),
            (CartanType::E6, 72),
            (CartanType::E7, 126),
            (CartanType::E8, 240),
            (CartanType::A(3), 12),
            (CartanType::B(3), 18),
            (CartanType::C(4), 32),
            (CartanType::D(5), 40),
        ] {
            assert_eq!(datum(label).num_roots(), count, "{label}");
        }
    }

    #[test]
    fn cartan_matrix_shape() {
        for label in [CartanType::G2, CartanType::F4, CartanType::E7] {
            let d = datum(label);
            for i in 0..d.rank {
                assert_eq!(d.cartan[i][i], 2);
                for j in 0..d.rank {
                    if i != j {
                        assert!(d.cartan[i][j] <= 0);
                    }
                }
            }
        }
    }

    #[test]
    fn simple_reflections_permute_the_roots() {
        for label in [CartanType::G2, CartanType::F4, CartanType::E6] {
            let d = datum(label);
            for i in 0..d.rank {
                let perm = d.simple_perm(i);
                let mut seen = vec![false; d.num_roots()];
                for &img in perm {
                    assert!(!seen[img as usize]);
                    seen[img as usize] = true;
                }
                // involution
                for r in 0..d.num_roots() {
                    assert_eq!(perm[perm[r] as usize] as usize, r);
                }
            }
        }
    }

    #[test]
    fn weyl_orders_match_orbit_stabilizer_oracle() {
        for (label, expected) in [
            (CartanType::G2, 12u128),
            (CartanType::F4, 1152),
            (CartanType::A(3), 24),
            (CartanType::B(3), 48),
            (CartanType::D(4), 192),
            (CartanType::E6, 51840),
            (CartanType::E7, 2903040),
        ] {
            let d = datum(label);
            assert_eq!(d.weyl_order(), expected, "{label} degree product");
            assert_eq!(weyl_order_oracle(&d), expected, "{label} Schreier-Sims");
        }
    }

    #[test]
    #[ignore = "E8 orbit walks are opt-in"]
    fn e8_weyl_order_matches_oracle() {
        let d = datum(CartanType::E8);
        assert_eq!(d.weyl_order(), 696_729_600);
        assert_eq!(weyl_order_oracle(&d), 696_729_600);
    }

    #[test]
    fn unsupported_labels_are_rejected() {
        assert!(CartanType::parse("E9").is_err());
        assert!(CartanType::parse("H4").is_err());
        assert!(CartanType::parse("A9").is_err());
        assert!(CartanType::parse("D2").is_err());
    }

    #[test]
    fn classify_empty_base_is_torus() {
        let d = datum(CartanType::G2);
        let sub = classify_subsystem(&[], &d).unwrap();
        assert_eq!(sub.type_string, "T");
        assert!(sub.full_roots.is_empty());
    }

    /// Long roots have coroots of minimal squared length; in G2 the highest
    /// root is long, and an orthogonal pair of long roots is a closed A1+A1.
    #[test]
    fn classify_orthogonal_long_pair_in_g2() {
        let d = datum(CartanType::G2);
        let theta = d.num_positive() - 1;
        let partner = (0..d.num_roots())
            .find(|&r| d.pairing(theta, r) == 0 && d.pairing(r, theta) == 0 && {
                // same length as theta: reflection orbit of theta contains r
                let orbit = reflection_closure(&[theta], &d);
                !orbit.contains(&r)
            })
            .unwrap();
        // partner orthogonal to theta; check it is long by comparing Cartan rows
        let sub = classify_subsystem(&[theta, partner], &d).unwrap();
        assert_eq!(sub.type_string, "A1+A1");
        assert_eq!(sub.full_roots.len(), 4);
    }

    #[test]
    fn classify_rejects_bad_bases() {
        let d = datum(CartanType::A(2));
        // both simple roots plus a dependent root
        let dep = d.root_index_of(&[1, 1]).unwrap();
        assert!(classify_subsystem(&[0, 1, dep], &d).is_err());
        // positive pairing: a root and itself
        assert!(classify_subsystem(&[0, 0], &d).is_err());
    }

    #[test]
    fn classify_e8_order_five_vertex_base() {
        let d = datum(CartanType::E8);
        // Extended-diagram base with the node of mark 5 removed:
        // simple roots 1,3,4,2 and 6,7,8 plus the lowest root.
        let lowest = d.negative_of(d.num_positive() - 1);
        let base = vec![0, 2, 3, 1, 5, 6, 7, lowest];
        let sub = classify_subsystem(&base, &d).unwrap();
        assert_eq!(sub.type_string, "A4+A4");
        assert_eq!(sub.full_roots.len(), 40);
    }

    #[test]
    fn classify_is_weyl_invariant() {
        let d = datum(CartanType::E6);
        let base = vec![0usize, 2, 3, 1];
        let reference = classify_subsystem(&base, &d).unwrap().type_string;
        // conjugate by a handful of Weyl words
        for word in [vec![4, 5], vec![1, 3, 4], vec![0, 2, 3, 4, 5, 1]] {
            let image: Vec<usize> = base
                .iter()
                .map(|&r| {
                    word.iter().fold(r, |acc, &i| d.simple_perm(i)[acc] as usize)
                })
                .collect();
            let sub = classify_subsystem(&image, &d).unwrap();
            assert_eq!(sub.type_string, reference);
        }
    }

    #[test]
    fn levi_classes_of_a2() {
        let d = datum(CartanType::A(2));
        let levis = enumerate_levi_subsystems(&d);
        let types: Vec<&str> = levis.iter().map(|l| l.type_string.as_str()).collect();
        assert_eq!(types, vec!["T", "A1", "A2"]);
    }

    #[test]
    fn levi_classes_of_e6_contain_the_expected_types() {
        let d = datum(CartanType::E6);
        let levis = enumerate_levi_subsystems(&d);
        let types: HashSet<&str> = levis.iter().map(|l| l.type_string.as_str()).collect();
        for t in ["A2+A2", "A2+A2+A1", "A5", "D5", "D4", "A4+A1"] {
            assert!(types.contains(t), "missing Levi type {t}");
        }
    }

    #[test]
    fn levi_classes_of_e7_contain_the_expected_types() {
        let d = datum(CartanType::E7);
        let levis = enumerate_levi_subsystems(&d);
        let types: HashSet<&str> = levis.iter().map(|l| l.type_string.as_str()).collect();
        for t in ["D6", "A5+A1", "D4+A1", "E6", "A3+A2+A1"] {
            assert!(types.contains(t), "missing Levi type {t}");
        }
    }

    #[test]
    fn levi_dedup_is_stable_under_recanonicalization() {
        let d = datum(CartanType::F4);
        let levis = enumerate_levi_subsystems(&d);
        let canons: HashSet<Vec<usize>> =
            levis.iter().map(|l| canonical_root_set(&l.full_roots, &d)).collect();
        assert_eq!(canons.len(), levis.len());
        // every simple-root subset lands on exactly one representative
        for mask in 0u32..(1 << d.rank) {
            let base: Vec<usize> = (0..d.rank).filter(|&i| mask & (1 << i) != 0).collect();
            let sub = classify_subsystem(&base, &d).unwrap();
            assert!(canons.contains(&canonical_root_set(&sub.full_roots, &d)));
        }
    }

    #[test]
    fn pseudo_levi_of_g2_includes_the_long_a2() {
        let d = datum(CartanType::G2);
        let systems = pseudo_levi_subsystems(&d);
        let types: HashSet<&str> = systems.iter().map(|s| s.type_string.as_str()).collect();
        assert!(types.contains("G2"), "deleting nothing keeps the full system");
        assert!(types.contains("A2"));
        assert!(types.contains("A1+A1"));
        // the A2 must consist of long roots: closed under addition
        let a2 = systems.iter().find(|s| s.type_string == "A2").unwrap();
        assert_eq!(additive_closure(&a2.full_roots, &d), a2.full_roots);
    }

    #[test]
    fn pseudo_levi_of_f4_includes_b4_and_c3a1() {
        let d = datum(CartanType::F4);
        let systems = pseudo_levi_subsystems(&d);
        let types: HashSet<&str> = systems.iter().map(|s| s.type_string.as_str()).collect();
        for t in ["B4", "C3+A1", "A2+A2", "A3+A1", "F4"] {
            assert!(types.contains(t), "missing pseudo-Levi type {t}");
        }
    }

    #[test]
    fn centralizer_subsystems_are_additively_closed() {
        let d = datum(CartanType::F4);
        for sys in pseudo_levi_subsystems(&d) {
            assert_eq!(additive_closure(&sys.full_roots, &d), sys.full_roots, "{}", sys.type_string);
        }
    }

    #[test]
    fn saturation_of_e6_levis() {
        let d = datum(CartanType::E6);
        let levis = enumerate_levi_subsystems(&d);
        let a5 = levis.iter().find(|l| l.type_string == "A5").unwrap();
        assert!(!derived_simply_connected(a5, &d).unwrap().is_saturated);
        let d5 = levis.iter().find(|l| l.type_string == "D5").unwrap();
        assert!(derived_simply_connected(d5, &d).unwrap().is_saturated);
        // the full system as its own Levi: torsion part is the fundamental group
        let full = levis.iter().find(|l| l.type_string == "E6").unwrap();
        let result = derived_simply_connected(full, &d).unwrap();
        let nontrivial: Vec<u64> =
            result.elementary_divisors.iter().copied().filter(|&x| x != 1).collect();
        assert_eq!(nontrivial, vec![3]);
    }

    #[test]
    fn non_levi_subsystems_are_rejected_by_the_lattice_test() {
        let d = datum(CartanType::G2);
        let a2 = pseudo_levi_subsystems(&d).into_iter().find(|s| s.type_string == "A2").unwrap();
        assert_eq!(derived_simply_connected(&a2, &d), Err(RootSysError::NotALeviSubsystem));
    }

    #[test]
    fn fundamental_group_representatives() {
        assert_eq!(datum(CartanType::G2).fundamental_group_reps.len(), 1);
        assert_eq!(datum(CartanType::F4).fundamental_group_reps.len(), 1);
        assert_eq!(datum(CartanType::E6).fundamental_group_reps.len(), 3);
        assert_eq!(datum(CartanType::E7).fundamental_group_reps.len(), 2);
        assert_eq!(datum(CartanType::E8).fundamental_group_reps.len(), 1);
    }

    #[test]
    fn dimension_bookkeeping() {
        for (label, dim) in [
            (CartanType::G2, 14),
            (CartanType::F4, 52),
            (CartanType::E6, 78),
            (CartanType::E7, 133),
            (CartanType::E8, 248),
        ] {
            assert_eq!(label.dimension(), dim);
        }
    }
}
