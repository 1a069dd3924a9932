//! Small exact linear algebra over the integers and rationals.
//!
//! Everything in this crate works with lattices of rank at most 8, so the
//! implementations favour clarity over asymptotics: Smith normal form by
//! pivot reduction, kernels by rational elimination. No floating point
//! anywhere.

use num_rational::Ratio;
use num_traits::Zero;

pub type Rat = Ratio<i128>;

/// Dense row-major integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<i128>,
}

impl IntMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMat { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i128>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = IntMat::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn row(&self, i: usize) -> &[i128] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[i128]) -> Vec<i128> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for IntMat {
    type Output = i128;
    fn index(&self, (i, j): (usize, usize)) -> &i128 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i128 {
        &mut self.data[i * self.cols + j]
    }
}

/// Smith normal form elementary divisors of an integer matrix, normalized
/// positive and in divisibility order. Zero diagonal entries (rank deficit)
/// are not reported.
pub fn elementary_divisors(m: &IntMat) -> Vec<u64> {
    let mut a = m.clone();
    let n = a.rows.min(a.cols);
    let mut t = 0;
    while t < n {
        // Find a pivot of minimal absolute value in the remaining block.
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..a.rows {
            for j in t..a.cols {
                if a[(i, j)] != 0
                    && pivot.map_or(true, |(pi, pj)| a[(i, j)].abs() < a[(pi, pj)].abs())
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        swap_rows(&mut a, t, pi);
        swap_cols(&mut a, t, pj);

        let mut clean = true;
        for i in t + 1..a.rows {
            let q = div_round(a[(i, t)], a[(t, t)]);
            if q != 0 {
                for j in t..a.cols {
                    let v = q * a[(t, j)];
                    a[(i, j)] -= v;
                }
            }
            if a[(i, t)] != 0 {
                clean = false;
            }
        }
        for j in t + 1..a.cols {
            let q = div_round(a[(t, j)], a[(t, t)]);
            if q != 0 {
                for i in t..a.rows {
                    let v = q * a[(i, t)];
                    a[(i, j)] -= v;
                }
            }
            if a[(t, j)] != 0 {
                clean = false;
            }
        }
        if !clean {
            continue; // smaller pivot now exists, redo this step
        }
        // Divisibility: fold in any entry the pivot does not divide.
        let p = a[(t, t)];
        if let Some((i, j)) = (t + 1..a.rows)
            .flat_map(|i| (t + 1..a.cols).map(move |j| (i, j)))
            .find(|&(i, j)| a[(i, j)] % p != 0)
        {
            let _ = j;
            for jj in t..a.cols {
                let v = a[(i, jj)];
                a[(t, jj)] += v;
            }
            continue;
        }
        t += 1;
    }
    let mut divs: Vec<u64> = (0..t).map(|i| a[(i, i)].unsigned_abs() as u64).collect();
    divs.sort_unstable();
    divs
}

fn swap_rows(a: &mut IntMat, i: usize, j: usize) {
    if i != j {
        for c in 0..a.cols {
            let (x, y) = (a[(i, c)], a[(j, c)]);
            a[(i, c)] = y;
            a[(j, c)] = x;
        }
    }
}

fn swap_cols(a: &mut IntMat, i: usize, j: usize) {
    if i != j {
        for r in 0..a.rows {
            let (x, y) = (a[(r, i)], a[(r, j)]);
            a[(r, i)] = y;
            a[(r, j)] = x;
        }
    }
}

/// Round-to-nearest integer division, so remainders satisfy |r| <= |b|/2.
fn div_round(a: i128, b: i128) -> i128 {
    let q = a / b;
    let r = a - q * b;
    if 2 * r.abs() > b.abs() {
        q + if (r < 0) == (b < 0) { 1 } else { -1 }
    } else {
        q
    }
}

/// Exact determinant by rational elimination.
pub fn determinant(m: &IntMat) -> i128 {
    assert_eq!(m.rows, m.cols);
    let n = m.rows;
    let mut a: Vec<Vec<Rat>> =
        (0..n).map(|i| m.row(i).iter().map(|&v| Rat::from_integer(v)).collect()).collect();
    let mut det = Rat::from_integer(1);
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return 0;
        };
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        det *= a[col][col];
        let inv = a[col][col].recip();
        for j in col..n {
            a[col][j] *= inv;
        }
        for r in col + 1..n {
            let f = a[r][col];
            if !f.is_zero() {
                for j in col..n {
                    let v = f * a[col][j];
                    a[r][j] -= v;
                }
            }
        }
    }
    debug_assert!(det.is_integer());
    det.to_integer()
}

/// Inverse of a square integer matrix as a rational matrix.
pub fn rational_inverse(m: &IntMat) -> Option<Vec<Vec<Rat>>> {
    assert_eq!(m.rows, m.cols);
    let n = m.rows;
    let mut a: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            let mut row: Vec<Rat> = m.row(i).iter().map(|&v| Rat::from_integer(v)).collect();
            row.extend((0..n).map(|j| Rat::from_integer((i == j) as i128)));
            row
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(p, col);
        let inv = a[col][col].recip();
        for j in 0..2 * n {
            a[col][j] *= inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col];
                for j in 0..2 * n {
                    let v = f * a[col][j];
                    a[r][j] -= v;
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Integer basis of the right kernel { x : m x = 0 }, one vector per row.
///
/// Each basis vector is scaled to primitive integer form.
pub fn kernel_basis(m: &IntMat) -> Vec<Vec<i128>> {
    let (rows, cols) = (m.rows, m.cols);
    let mut a: Vec<Vec<Rat>> =
        (0..rows).map(|i| m.row(i).iter().map(|&v| Rat::from_integer(v)).collect()).collect();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for col in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(p, r);
        let inv = a[r][col].recip();
        for j in col..cols {
            a[r][j] *= inv;
        }
        for i in 0..rows {
            if i != r && !a[i][col].is_zero() {
                let f = a[i][col];
                for j in col..cols {
                    let v = f * a[r][j];
                    a[i][j] -= v;
                }
            }
        }
        pivot_cols.push(col);
        r += 1;
        if r == rows {
            break;
        }
    }
    let free_cols: Vec<usize> = (0..cols).filter(|c| !pivot_cols.contains(c)).collect();
    free_cols
        .into_iter()
        .map(|fc| {
            let mut v = vec![Rat::zero(); cols];
            v[fc] = Rat::from_integer(1);
            for (ri, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = -a[ri][fc];
            }
            primitive_integer(&v)
        })
        .collect()
}

/// Clear denominators and divide by the content.
fn primitive_integer(v: &[Rat]) -> Vec<i128> {
    let lcm = v.iter().fold(1i128, |acc, r| num_integer::lcm(acc, *r.denom()));
    let ints: Vec<i128> = v.iter().map(|r| r.numer() * (lcm / r.denom())).collect();
    let g = ints.iter().fold(0i128, |acc, &x| num_integer::gcd(acc, x));
    if g > 1 {
        ints.iter().map(|&x| x / g).collect()
    } else {
        ints
    }
}

/// Restrict the fixed-point condition `g x = x` to the span of `basis`,
/// returning an integer basis of the intersection.
pub fn intersect_fixed_space(basis: &[Vec<i128>], g: &IntMat) -> Vec<Vec<i128>> {
    if basis.is_empty() {
        return Vec::new();
    }
    let dim = basis.len();
    let n = basis[0].len();
    // Columns of `constraints` are (g - 1) applied to each basis vector.
    let mut constraints = IntMat::zeros(n, dim);
    for (k, b) in basis.iter().enumerate() {
        let gb = g.apply(b);
        for i in 0..n {
            constraints[(i, k)] = gb[i] - b[i];
        }
    }
    kernel_basis(&constraints)
        .into_iter()
        .map(|combo| {
            let mut v = vec![0i128; n];
            for (k, &c) in combo.iter().enumerate() {
                for i in 0..n {
                    v[i] += c * basis[k][i];
                }
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn snf_of_identity_is_all_ones() {
        assert_eq!(elementary_divisors(&IntMat::identity(4)), vec![1, 1, 1, 1]);
    }

    #[test]
    fn snf_diagonal_example() {
        let m = IntMat::from_rows(&[vec![2, 0], vec![0, 6]]);
        assert_eq!(elementary_divisors(&m), vec![2, 6]);
    }

    #[test]
    fn snf_requires_divisibility_fix() {
        // divisors of diag(4, 6) are (2, 12), not (4, 6)
        let m = IntMat::from_rows(&[vec![4, 0], vec![0, 6]]);
        assert_eq!(elementary_divisors(&m), vec![2, 12]);
    }

    #[test]
    fn kernel_of_rank_one() {
        let m = IntMat::from_rows(&[vec![1, 2, 3]]);
        let k = kernel_basis(&m);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert_eq!(v[0] + 2 * v[1] + 3 * v[2], 0);
        }
    }

    #[test]
    fn fixed_space_of_swap() {
        // swap of coordinates fixes the diagonal
        let g = IntMat::from_rows(&[vec![0, 1], vec![1, 0]]);
        let basis = vec![vec![1, 0], vec![0, 1]];
        let fix = intersect_fixed_space(&basis, &g);
        assert_eq!(fix.len(), 1);
        assert_eq!(fix[0][0], fix[0][1]);
    }

    proptest! {
        // Product of elementary divisors of a random square integer matrix
        // equals |det|, checked against an independent rational elimination.
        #[test]
        fn snf_product_matches_determinant(entries in proptest::collection::vec(-6i128..=6, 16)) {
            let rows: Vec<Vec<i128>> = entries.chunks(4).map(|c| c.to_vec()).collect();
            let m = IntMat::from_rows(&rows);
            let det = determinant(&m).unsigned_abs() as u64;
            let divs = elementary_divisors(&m);
            if det != 0 {
                prop_assert_eq!(divs.iter().product::<u64>(), det);
            } else {
                prop_assert!(divs.len() < 4);
            }
        }
    }
}
