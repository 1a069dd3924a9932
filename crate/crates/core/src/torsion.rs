//! Finite-order semisimple classes in the adjoint torus.
//!
//! A torsion point is a rational vector in fundamental-coweight coordinates,
//! taken modulo the lattice. The closed fundamental alcove is a strict
//! fundamental domain for the affine Weyl group (Weyl group extended by
//! coroot translations), so every point has a unique alcove representative;
//! conjugacy in the adjoint group additionally quotients by the fundamental
//! group acting through coweight translations.
//!
//! For a class representative `s` the module computes the integral-pairing
//! subsystem Φ_s, the stabilizer order via orbit counting, the component
//! group order |A(s)| = |Stab_W(s)| / |W(Φ_s)|, and the fixed space of the
//! stabilizer. The two classification flags are
//!
//! * isolated: rank Φ_s equals the ambient rank;
//! * quasi-isolated: the stabilizer fixes no nonzero vector.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_rational::Ratio;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::intmat::{self, IntMat};
use crate::par::{self, Parallelism};
use crate::rootsys::{self, CartanType, RootDatum, Subsystem};

pub type Frac = Ratio<i64>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TorsionError {
    #[error("max_order must be at least 1")]
    ZeroMaxOrder,
    #[error("expected a class of order 6, found order {0}")]
    OrderNotSix(u32),
}

/// An alcove-reduced torsion point of the maximal torus.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TorsionPoint {
    /// Coordinates in the fundamental-coweight basis, inside the closed
    /// fundamental alcove.
    pub coords: Vec<Frac>,
    /// Minimal m with m·coords in the lattice.
    pub order: u32,
}

impl TorsionPoint {
    fn from_reduced_coords(coords: Vec<Frac>) -> Self {
        let order = coords.iter().fold(1i64, |acc, c| num_integer::lcm(acc, *c.denom()));
        TorsionPoint { coords, order: order as u32 }
    }

    pub fn is_identity(&self) -> bool {
        self.order == 1 && self.coords.iter().all(Zero::is_zero)
    }
}

impl Serialize for TorsionPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("TorsionPoint", 2)?;
        let coords: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        st.serialize_field("coords", &coords)?;
        st.serialize_field("order", &self.order)?;
        st.end()
    }
}

/// Centralizer data of one torsion class.
#[derive(Clone, Debug, Serialize)]
pub struct CentralizerDatum {
    pub point: TorsionPoint,
    pub phi_s: Subsystem,
    pub a_s_order: u64,
    pub isolated: bool,
    pub quasi_isolated: bool,
    /// Basis of the fixed space of the stabilizer, in coweight coordinates.
    #[serde(skip)]
    pub fixed_space: Vec<Vec<i128>>,
}

/// One representative per conjugacy class of quasi-isolated torsion points.
#[derive(Clone, Debug, Serialize)]
pub struct ClassInventory {
    pub group_label: CartanType,
    pub classes: Vec<CentralizerDatum>,
    pub search_order_bound: u32,
}

/// Reduces an arbitrary rational point to the unique representative of its
/// affine-Weyl orbit in the closed fundamental alcove.
///
/// Each step reflects across a violated wall of the alcove, which strictly
/// decreases the number of separating hyperplanes, so the walk terminates.
pub fn alcove_reduce(point: &[Frac], datum: &RootDatum) -> TorsionPoint {
    let rank = datum.rank;
    assert_eq!(point.len(), rank);
    let mut x = point.to_vec();
    let mut steps = 0u64;
    loop {
        steps += 1;
        assert!(steps < 1_000_000, "alcove reduction failed to terminate");
        if let Some(i) = (0..rank).find(|&i| x[i] < Frac::zero()) {
            datum.reflect_coweight(i, &mut x);
            continue;
        }
        let height: Frac = (0..rank).map(|i| Frac::from_integer(datum.marks[i]) * x[i]).sum();
        if height > Frac::from_integer(1) {
            let excess = height - Frac::from_integer(1);
            for j in 0..rank {
                x[j] -= excess * Frac::from_integer(datum.theta_coroot_coweight[j]);
            }
            continue;
        }
        return TorsionPoint::from_reduced_coords(x);
    }
}

/// Canonical representative of the adjoint conjugacy class: the minimum of
/// the alcove reductions over the fundamental-group translates.
pub fn canonical_class_point(point: &[Frac], datum: &RootDatum) -> TorsionPoint {
    datum
        .fundamental_group_reps
        .iter()
        .map(|rep| {
            let shifted: Vec<Frac> = point
                .iter()
                .zip(rep)
                .map(|(&c, &r)| c + Frac::from_integer(r))
                .collect();
            alcove_reduce(&shifted, datum)
        })
        .min_by(|a, b| a.coords.cmp(&b.coords))
        .expect("fundamental group has at least the trivial element")
}

/// Computes the centralizer subsystem, component group order and the
/// isolated / quasi-isolated flags of an alcove-reduced point.
pub fn centralizer_of(point: &TorsionPoint, datum: &RootDatum) -> CentralizerDatum {
    let integral: Vec<usize> = (0..datum.num_roots())
        .filter(|&r| datum.root_pairing_point(r, &point.coords).is_integer())
        .collect();
    let phi_s = rootsys::subsystem_from_root_set(&integral, datum);
    let (orbit_size, fixed_space) = stabilizer_data(point, &phi_s, datum);
    let w_order = datum.weyl_order();
    assert_eq!(w_order % orbit_size as u128, 0, "orbit size must divide |W|");
    let stab_order = w_order / orbit_size as u128;
    let sub_order = phi_s.weyl_order();
    assert_eq!(stab_order % sub_order, 0, "|W(Φ_s)| must divide the stabilizer order");
    let a_s_order = (stab_order / sub_order) as u64;
    let isolated = phi_s.rank() == datum.rank;
    let quasi_isolated = fixed_space.is_empty();
    CentralizerDatum { point: point.clone(), phi_s, a_s_order, isolated, quasi_isolated, fixed_space }
}

/// Orbit size of the point modulo the coweight lattice, plus an integer basis
/// of the fixed space of its stabilizer.
///
/// The fixed space starts from the joint kernel of Φ_s (which the reflection
/// subgroup W(Φ_s) fixes pointwise) and is cut down by Schreier generators of
/// the stabilizer whenever the component group is nontrivial.
fn stabilizer_data(
    point: &TorsionPoint,
    phi_s: &Subsystem,
    datum: &RootDatum,
) -> (u64, Vec<Vec<i128>>) {
    let rank = datum.rank;
    let m = point.order as i64;
    assert!(rank <= 8 && m <= 255, "orbit encoding supports rank <= 8, order <= 255");

    let encode = |nums: &[i64]| -> u64 {
        nums.iter().enumerate().fold(0u64, |acc, (i, &n)| acc | ((n as u64) << (8 * i)))
    };
    let start: Vec<i64> = point
        .coords
        .iter()
        .map(|c| {
            let n = (c.numer() * (m / c.denom())).rem_euclid(m.max(1));
            n
        })
        .collect();

    let mut nodes: Vec<Vec<i64>> = vec![start.clone()];
    let mut parent: Vec<u32> = vec![0];
    let mut gen: Vec<u8> = vec![0];
    let mut seen: HashMap<u64, u32> = HashMap::new();
    seen.insert(encode(&start), 0);
    let mut head = 0usize;
    while head < nodes.len() {
        let cur = nodes[head].clone();
        for i in 0..rank {
            let mut img = cur.clone();
            let xi = cur[i];
            if xi != 0 {
                for j in 0..rank {
                    img[j] = (img[j] - datum.cartan[i][j] * xi).rem_euclid(m);
                }
            }
            let key = encode(&img);
            if !seen.contains_key(&key) {
                seen.insert(key, nodes.len() as u32);
                nodes.push(img);
                parent.push(head as u32);
                gen.push(i as u8);
            }
        }
        head += 1;
    }
    let orbit_size = nodes.len() as u64;

    // Joint kernel of the centralizer subsystem.
    let base_rows: Vec<Vec<i128>> = phi_s
        .simple_roots
        .iter()
        .map(|&r| datum.root(r).iter().map(|&v| v as i128).collect())
        .collect();
    let u0 = if base_rows.is_empty() {
        (0..rank)
            .map(|i| {
                let mut v = vec![0i128; rank];
                v[i] = 1;
                v
            })
            .collect()
    } else {
        intmat::kernel_basis(&IntMat::from_rows(&base_rows))
    };
    if u0.is_empty() {
        return (orbit_size, Vec::new());
    }
    let stab_order = datum.weyl_order() / orbit_size as u128;
    if stab_order == phi_s.weyl_order() {
        // Stabilizer is exactly W(Φ_s): its fixed space is the joint kernel.
        return (orbit_size, u0);
    }

    let reflections: Vec<IntMat> = (0..rank).map(|i| reflection_matrix(datum, i)).collect();
    let step = |nums: &Vec<i64>, i: usize| -> Vec<i64> {
        let mut img = nums.clone();
        let xi = nums[i];
        if xi != 0 {
            for j in 0..rank {
                img[j] = (img[j] - datum.cartan[i][j] * xi).rem_euclid(m);
            }
        }
        img
    };

    let mut basis = u0;
    'restart: loop {
        // Propagate basis images along the BFS tree.
        let mut images: Vec<Vec<Vec<i128>>> = Vec::with_capacity(nodes.len());
        images.push(basis.clone());
        for v in 1..nodes.len() {
            let src = &images[parent[v] as usize];
            let img = src.iter().map(|b| apply_reflection(datum, gen[v] as usize, b)).collect();
            images.push(img);
        }
        for (v, node) in nodes.iter().enumerate() {
            for i in 0..rank {
                let target = seen[&encode(&step(node, i))] as usize;
                if target != 0 && parent[target] as usize == v && gen[target] as usize == i {
                    continue; // tree edge, satisfied by construction
                }
                let lhs: Vec<Vec<i128>> =
                    images[v].iter().map(|b| apply_reflection(datum, i, b)).collect();
                if lhs != images[target] {
                    // Shrink by the violated Schreier generator.
                    let g = transversal(&parent, &gen, target, &reflections, true)
                        .mul(&reflections[i])
                        .mul(&transversal(&parent, &gen, v, &reflections, false));
                    basis = intmat::intersect_fixed_space(&basis, &g);
                    if basis.is_empty() {
                        return (orbit_size, Vec::new());
                    }
                    continue 'restart;
                }
            }
        }
        return (orbit_size, basis);
    }
}

fn apply_reflection(datum: &RootDatum, i: usize, v: &[i128]) -> Vec<i128> {
    let xi = v[i];
    let mut out = v.to_vec();
    if xi != 0 {
        for j in 0..datum.rank {
            out[j] -= datum.cartan[i][j] as i128 * xi;
        }
    }
    out
}

/// Matrix of the simple reflection on coweight coordinates.
fn reflection_matrix(datum: &RootDatum, i: usize) -> IntMat {
    let mut mat = IntMat::identity(datum.rank);
    for j in 0..datum.rank {
        mat[(j, i)] -= datum.cartan[i][j] as i128;
    }
    mat
}

/// Product of the reflections along the BFS path from the base point,
/// reversed for the inverse (reflections are involutions).
fn transversal(
    parent: &[u32],
    gen: &[u8],
    mut v: usize,
    reflections: &[IntMat],
    inverse: bool,
) -> IntMat {
    let mut word = Vec::new();
    while v != 0 {
        word.push(gen[v] as usize);
        v = parent[v] as usize;
    }
    // word is now leaf-to-root; the forward transversal multiplies
    // root-to-leaf on the left.
    let rank = reflections.first().map_or(0, |r| r.rows);
    let mut mat = IntMat::identity(rank);
    if inverse {
        for &i in word.iter().rev() {
            mat = mat.mul(&reflections[i]);
        }
    } else {
        for &i in &word {
            mat = mat.mul(&reflections[i]);
        }
    }
    mat
}

/// Sweeps all torsion classes of order at most `max_order`, one canonical
/// representative per adjoint conjugacy class, with full centralizer data.
pub fn enumerate_torsion_classes(
    datum: &RootDatum,
    max_order: u32,
    par: Parallelism,
) -> Result<Vec<CentralizerDatum>, TorsionError> {
    if max_order == 0 {
        return Err(TorsionError::ZeroMaxOrder);
    }
    let candidates = alcove_lattice_points(datum, max_order);
    let canonical = par::map_collect(par, &candidates, |coords| {
        let p = canonical_class_point(coords, datum);
        (p.coords.clone(), p)
    });
    let mut dedup: BTreeMap<Vec<Frac>, TorsionPoint> = BTreeMap::new();
    for (key, p) in canonical {
        dedup.entry(key).or_insert(p);
    }
    let reps: Vec<TorsionPoint> = dedup.into_values().collect();
    let mut classes = par::map_collect(par, &reps, |p| centralizer_of(p, datum));
    classes.sort_by(|a, b| {
        (a.point.order, &a.phi_s.type_string, a.a_s_order, &a.point.coords).cmp(&(
            b.point.order,
            &b.phi_s.type_string,
            b.a_s_order,
            &b.point.coords,
        ))
    });
    Ok(classes)
}

/// The quasi-isolated classes of order at most `max_order`.
pub fn enumerate_quasi_isolated(
    datum: &RootDatum,
    max_order: u32,
    par: Parallelism,
) -> Result<ClassInventory, TorsionError> {
    let classes = enumerate_torsion_classes(datum, max_order, par)?
        .into_iter()
        .filter(|c| c.quasi_isolated)
        .collect();
    Ok(ClassInventory { group_label: datum.label, classes, search_order_bound: max_order })
}

/// All alcove points with denominator at most `max_order`, one per reduced
/// coordinate vector. In coweight coordinates these are the vectors k/m with
/// k nonnegative integers and Σ marks·k ≤ m.
fn alcove_lattice_points(datum: &RootDatum, max_order: u32) -> Vec<Vec<Frac>> {
    let rank = datum.rank;
    let mut out = Vec::new();
    let mut seen: HashSet<Vec<Frac>> = HashSet::new();
    for m in 1..=max_order as i64 {
        let mut k = vec![0i64; rank];
        loop {
            let budget: i64 = (0..rank).map(|i| datum.marks[i] * k[i]).sum();
            if budget <= m {
                let g = k.iter().fold(m, |acc, &v| num_integer::gcd(acc, v));
                if g == 1 || m == 1 {
                    let coords: Vec<Frac> = k.iter().map(|&v| Frac::new(v, m)).collect();
                    if seen.insert(coords.clone()) {
                        out.push(coords);
                    }
                }
            }
            // Odometer increment over the simplex Σ marks·k ≤ m.
            let mut i = 0;
            loop {
                if i == rank {
                    break;
                }
                k[i] += 1;
                let total: i64 = (0..rank).map(|j| datum.marks[j] * k[j]).sum();
                if total <= m {
                    break;
                }
                k[i] = 0;
                i += 1;
            }
            if i == rank {
                break;
            }
        }
    }
    out
}

/// The minimal Levi subsystem containing the centralizer: all roots that
/// vanish on the fixed space of the stabilizer.
pub fn minimal_levi_containing(cent: &CentralizerDatum, datum: &RootDatum) -> Subsystem {
    let roots = rootsys::roots_vanishing_on(&cent.fixed_space, datum);
    rootsys::subsystem_from_root_set(&roots, datum)
}

/// Splits an order-6 class into its order-2 and order-3 parts (coordinates
/// scaled by 3 and 2 respectively), each alcove-reduced and canonicalized.
pub fn factor_order6(
    cent: &CentralizerDatum,
    datum: &RootDatum,
) -> Result<(CentralizerDatum, CentralizerDatum), TorsionError> {
    if cent.point.order != 6 {
        return Err(TorsionError::OrderNotSix(cent.point.order));
    }
    let scale = |factor: i64| -> CentralizerDatum {
        let coords: Vec<Frac> =
            cent.point.coords.iter().map(|c| c * Frac::from_integer(factor)).collect();
        let p = canonical_class_point(&coords, datum);
        centralizer_of(&p, datum)
    };
    let part2 = scale(3);
    let part3 = scale(2);
    debug_assert_eq!(part2.point.order, 2);
    debug_assert_eq!(part3.point.order, 3);
    Ok((part2, part3))
}

/// Row of the class inventory report.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct InventoryRow {
    pub order: u32,
    pub centralizer: String,
    pub component_group: u64,
    pub isolated: bool,
    pub quasi_isolated: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct InventoryReport {
    pub schema: &'static str,
    pub group: String,
    pub search_order_bound: u32,
    pub classes: Vec<InventoryRow>,
}

pub fn inventory_report(inv: &ClassInventory) -> InventoryReport {
    InventoryReport {
        schema: crate::REPORT_SCHEMA,
        group: inv.group_label.to_string(),
        search_order_bound: inv.search_order_bound,
        classes: inv
            .classes
            .iter()
            .map(|c| InventoryRow {
                order: c.point.order,
                centralizer: c.phi_s.type_string.clone(),
                component_group: c.a_s_order,
                isolated: c.isolated,
                quasi_isolated: c.quasi_isolated,
            })
            .collect(),
    }
}

/// Deterministic text rendering of the inventory, one record per class.
pub fn render_inventory(inv: &ClassInventory) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "quasi-isolated classes of {} (orders <= {})\n",
        inv.group_label, inv.search_order_bound
    ));
    out.push_str("order  centralizer     |A(s)|  isolated\n");
    for c in &inv.classes {
        out.push_str(&format!(
            "{:<5}  {:<14}  {:<6}  {}\n",
            c.point.order,
            c.phi_s.type_string,
            c.a_s_order,
            if c.isolated { "yes" } else { "no" },
        ));
    }
    out
}
