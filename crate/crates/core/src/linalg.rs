//! Exact integer and rational linear algebra.
//!
//! Everything here works on arbitrary-precision values. Matrices are stored
//! row-major; lattices are always *row* lattices (the set of integer
//! combinations of the rows).

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn int(v: i64) -> Int {
    BigInt::from(v)
}

pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_from_int(v: &Int) -> Rat {
    BigRational::from_integer(v.clone())
}

/// A dense integer matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Int>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![Int::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Int::one();
        }
        m
    }

    /// Builds a matrix from rows; all rows must have `cols` entries.
    pub fn from_rows(cols: usize, rows: &[Vec<Int>]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix rows");
            data.extend(r.iter().cloned());
        }
        IntMatrix {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows: Vec<Vec<Int>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| int(x)).collect())
            .collect();
        Self::from_rows(cols, &rows)
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Int] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Int]> {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn to_rows(&self) -> Vec<Vec<Int>> {
        self.rows().map(|r| r.to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * &other[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        out
    }

    /// Matrix-vector product `self * v`.
    pub fn apply(&self, v: &[Int]) -> Vec<Int> {
        assert_eq!(self.cols, v.len());
        self.rows().map(|r| dot(r, v)).collect()
    }

    pub fn is_zero_row(&self, i: usize) -> bool {
        self.row(i).iter().all(Zero::is_zero)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// row[dst] -= q * row[src]
    fn sub_row(&mut self, dst: usize, src: usize, q: &Int) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = q * &self.data[src * self.cols + j];
            self.data[dst * self.cols + j] -= v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -&self.data[i * self.cols + j];
            self.data[i * self.cols + j] = v;
        }
    }

    /// Determinant of a square matrix (fraction-free Bareiss elimination).
    pub fn det(&self) -> Int {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Int::one();
        }
        let mut m: Vec<Vec<Int>> = self.to_rows();
        let mut sign = Int::one();
        let mut prev = Int::one();
        for k in 0..n - 1 {
            if m[k][k].is_zero() {
                match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                    Some(i) => {
                        m.swap(k, i);
                        sign = -sign;
                    }
                    None => return Int::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                    m[i][j] = v / &prev;
                }
            }
            prev = m[k][k].clone();
        }
        sign * &m[n - 1][n - 1]
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        let (h, _) = hnf(self);
        (0..h.nrows()).filter(|&i| !h.is_zero_row(i)).count()
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = Int;
    fn index(&self, (i, j): (usize, usize)) -> &Int {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Int {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for r in self.rows() {
            let s: Vec<String> = r.iter().map(|x| x.to_string()).collect();
            writeln!(f, "  ({})", s.join(", "))?;
        }
        write!(f, "]")
    }
}

pub fn dot(a: &[Int], b: &[Int]) -> Int {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_q(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter()
        .zip(b)
        .fold(Rat::zero(), |acc, (x, y)| acc + x * y)
}

/// Pairing of a rational vector with an integer vector.
pub fn dot_qi(a: &[Rat], b: &[Int]) -> Rat {
    a.iter()
        .zip(b)
        .fold(Rat::zero(), |acc, (x, y)| acc + x * rat_from_int(y))
}

/// Divides an integer vector by the gcd of its entries.
pub fn primitive(v: &[Int]) -> Vec<Int> {
    let g = v.iter().fold(Int::zero(), |g, x| g.gcd(x));
    if g.is_zero() || g.is_one() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}

/// The primitive integer vector on the ray spanned by a rational vector.
pub fn primitive_of_rational(v: &[Rat]) -> Vec<Int> {
    let l = v
        .iter()
        .fold(Int::one(), |l, x| l.lcm(x.denom()));
    let scaled: Vec<Int> = v.iter().map(|x| (x * rat_from_int(&l)).to_integer()).collect();
    primitive(&scaled)
}

pub fn to_rat_vec(v: &[Int]) -> Vec<Rat> {
    v.iter().map(rat_from_int).collect()
}

/// A rational vector, e.g. an element of M_Q or of its dual.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QVector(pub Vec<Rat>);

impl QVector {
    pub fn from_ints(v: &[Int]) -> Self {
        QVector(to_rat_vec(v))
    }

    pub fn from_i64(v: &[i64]) -> Self {
        QVector(v.iter().map(|&x| rat(x, 1)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|x| x.is_integer())
    }

    pub fn to_ints(&self) -> Option<Vec<Int>> {
        if self.is_integral() {
            Some(self.0.iter().map(|x| x.to_integer()).collect())
        } else {
            None
        }
    }

    /// Smallest positive integer k such that k·v is a lattice point.
    pub fn mu(&self) -> Int {
        self.0.iter().fold(Int::one(), |l, x| l.lcm(x.denom()))
    }

    pub fn scale(&self, k: &Rat) -> QVector {
        QVector(self.0.iter().map(|x| x * k).collect())
    }

    pub fn add(&self, other: &QVector) -> QVector {
        QVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &QVector) -> QVector {
        QVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn dot(&self, other: &QVector) -> Rat {
        dot_q(&self.0, &other.0)
    }

    pub fn dot_int(&self, other: &[Int]) -> Rat {
        dot_qi(&self.0, other)
    }
}

impl fmt::Display for QVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

pub fn fmt_int_vec(v: &[Int]) -> String {
    let s: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", s.join(","))
}

/// Floor division with a positive divisor.
fn floor_div(a: &Int, b: &Int) -> Int {
    a.div_floor(b)
}

/// Row Hermite normal form.
///
/// Returns `(H, U)` with `U` unimodular and `U * A = H`. In `H` every nonzero
/// row has a positive pivot strictly to the right of the pivot of the row
/// above, entries above a pivot lie in `[0, pivot)`, and zero rows come last.
pub fn hnf(a: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let m = a.nrows();
    let n = a.ncols();
    let mut h = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        loop {
            // smallest nonzero |entry| in column c among rows r..m
            let best = (r..m)
                .filter(|&i| !h[(i, c)].is_zero())
                .min_by(|&i, &j| h[(i, c)].abs().cmp(&h[(j, c)].abs()));
            let Some(p) = best else { break };
            h.swap_rows(r, p);
            u.swap_rows(r, p);
            let mut done = true;
            for i in r + 1..m {
                if h[(i, c)].is_zero() {
                    continue;
                }
                let q = floor_div(&h[(i, c)], &h[(r, c)]);
                h.sub_row(i, r, &q);
                u.sub_row(i, r, &q);
                if !h[(i, c)].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[(r, c)].is_zero() {
            continue;
        }
        if h[(r, c)].is_negative() {
            h.negate_row(r);
            u.negate_row(r);
        }
        let piv = h[(r, c)].clone();
        for i in 0..r {
            let q = floor_div(&h[(i, c)], &piv);
            h.sub_row(i, r, &q);
            u.sub_row(i, r, &q);
        }
        r += 1;
    }
    (h, u)
}

/// The nonzero rows of the HNF of `a`: a canonical basis of its row lattice.
pub fn lattice_basis(a: &IntMatrix) -> IntMatrix {
    let (h, _) = hnf(a);
    let rows: Vec<Vec<Int>> = (0..h.nrows())
        .filter(|&i| !h.is_zero_row(i))
        .map(|i| h.row(i).to_vec())
        .collect();
    IntMatrix::from_rows(a.ncols(), &rows)
}

fn pivot_col(row: &[Int]) -> Option<usize> {
    row.iter().position(|x| !x.is_zero())
}

/// Coordinates of `v` with respect to the rows of `h` (which must be in
/// HNF), or `None` if `v` is not in the row lattice.
pub fn lattice_coords(v: &[Int], h: &IntMatrix) -> Result<Option<Vec<Int>>> {
    if v.len() != h.ncols() {
        return Err(Error::DimensionMismatch {
            expected: h.ncols(),
            found: v.len(),
        });
    }
    let mut rem = v.to_vec();
    let mut coords = vec![Int::zero(); h.nrows()];
    for (i, row) in h.rows().enumerate() {
        let Some(c) = pivot_col(row) else { continue };
        let (q, r) = rem[c].div_rem(&row[c]);
        if !r.is_zero() {
            return Ok(None);
        }
        if !q.is_zero() {
            for (x, y) in rem.iter_mut().zip(row) {
                *x -= &q * y;
            }
        }
        coords[i] = q;
    }
    if rem.iter().all(Zero::is_zero) {
        Ok(Some(coords))
    } else {
        Ok(None)
    }
}

/// Whether `v` lies in the row lattice of `h` (which must be in HNF).
pub fn lattice_member(v: &[Int], h: &IntMatrix) -> Result<bool> {
    Ok(lattice_coords(v, h)?.is_some())
}

/// A Z-basis (rows, in HNF) of the integer kernel `{x : A x = 0}`.
pub fn kernel_lattice(a: &IntMatrix) -> IntMatrix {
    let n = a.ncols();
    let (h, u) = hnf(&a.transpose());
    let rows: Vec<Vec<Int>> = (0..h.nrows())
        .filter(|&i| h.is_zero_row(i))
        .map(|i| u.row(i).to_vec())
        .collect();
    if rows.is_empty() {
        return IntMatrix::zeros(0, n);
    }
    lattice_basis(&IntMatrix::from_rows(n, &rows))
}

// ---------------------------------------------------------------------------
// rational elimination

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(rows: &mut Vec<Vec<Rat>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                let pivot = rows[r].clone();
                for (x, p) in rows[i].iter_mut().zip(&pivot).take(ncols) {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

pub fn rank_q(rows: &[Vec<Rat>], ncols: usize) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m, ncols).len()
}

/// Basis of the rational null space `{x : rows · x = 0}`.
pub fn kernel_q(rows: &[Vec<Rat>], ncols: usize) -> Vec<Vec<Rat>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![Rat::zero(); ncols];
            x[f] = Rat::one();
            for (i, &p) in pivots.iter().enumerate() {
                x[p] = -m[i][f].clone();
            }
            x
        })
        .collect()
}

/// Solves `x · rows = target` (x a row vector of coefficients), if possible.
pub fn solve_left_q(rows: &[Vec<Rat>], target: &[Rat]) -> Option<Vec<Rat>> {
    let n = rows.len();
    let d = target.len();
    // columns of the system are the rows; augment with the target
    let mut sys: Vec<Vec<Rat>> = (0..d)
        .map(|j| {
            let mut r: Vec<Rat> = rows.iter().map(|row| row[j].clone()).collect();
            r.push(target[j].clone());
            r
        })
        .collect();
    let pivots = rref(&mut sys, n + 1);
    if pivots.contains(&n) {
        return None;
    }
    let mut x = vec![Rat::zero(); n];
    for (i, &p) in pivots.iter().enumerate() {
        x[p] = sys[i][n].clone();
    }
    Some(x)
}

/// Incrementally maintained echelon basis of a subspace of Q^n, used for
/// span membership and rank tests.
#[derive(Clone, Debug, Default)]
pub struct EchelonBasis {
    rows: Vec<(usize, Vec<Rat>)>,
}

impl EchelonBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &mut [Rat]) {
        for (p, row) in &self.rows {
            if !v[*p].is_zero() {
                let f = v[*p].clone();
                for (x, y) in v.iter_mut().zip(row) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
    }

    /// Inserts `v`; returns true if it was independent of the current span.
    pub fn insert(&mut self, mut v: Vec<Rat>) -> bool {
        self.reduce(&mut v);
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[p].recip();
        for x in v.iter_mut() {
            *x *= &inv;
        }
        // keep existing rows reduced at the new pivot
        for (_, row) in self.rows.iter_mut() {
            if !row[p].is_zero() {
                let f = row[p].clone();
                for (x, y) in row.iter_mut().zip(&v) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        self.rows.push((p, v));
        true
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(Zero::is_zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_i64(rows)
    }

    fn iv(v: &[i64]) -> Vec<Int> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn hnf_identity() {
        let (h, u) = hnf(&IntMatrix::identity(2));
        assert_eq!(h, IntMatrix::identity(2));
        assert_eq!(u, IntMatrix::identity(2));
    }

    #[test]
    fn hnf_index_one_lattice() {
        let a = m(&[&[2, 0], &[0, 3], &[1, 1]]);
        let (h, u) = hnf(&a);
        assert_eq!(h, m(&[&[1, 0], &[0, 1], &[0, 0]]));
        assert_eq!(u.mul(&a), h);
        assert!(u.det().abs().is_one());
    }

    #[test]
    fn hnf_of_rank_two_lattice() {
        let a = m(&[&[2, 4], &[2, 2]]);
        let (h, u) = hnf(&a);
        assert_eq!(h, m(&[&[2, 0], &[0, 2]]));
        assert_eq!(u.mul(&a), h);
    }

    #[test]
    fn hnf_reduces_above_pivots() {
        let a = m(&[&[3, 5, 7], &[0, 4, 1]]);
        let (h, u) = hnf(&a);
        assert_eq!(u.mul(&a), h);
        // pivot of row 1 is column 1; entry above must be in [0, pivot)
        let p = &h[(1, 1)];
        assert!(p.is_positive());
        assert!(!h[(0, 1)].is_negative() && &h[(0, 1)] < p);
    }

    #[test]
    fn membership_examples() {
        let h = m(&[&[2, 0], &[0, 1]]);
        assert!(lattice_member(&iv(&[0, 0]), &h).unwrap());
        assert!(!lattice_member(&iv(&[1, 0]), &h).unwrap());
        assert!(lattice_member(&iv(&[2, 3]), &h).unwrap());
        assert_eq!(
            lattice_coords(&iv(&[2, 3]), &h).unwrap(),
            Some(iv(&[1, 3]))
        );
        assert!(matches!(
            lattice_member(&iv(&[1]), &h),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_lattice(&IntMatrix::identity(3)).nrows(), 0);
        let k = kernel_lattice(&m(&[&[1, 1]]));
        assert_eq!(k, m(&[&[1, -1]]));
    }

    #[test]
    fn kernel_is_saturated() {
        // 2x - 4y = 0 has kernel generated by (2,1), not (4,2)
        let k = kernel_lattice(&m(&[&[2, -4]]));
        assert_eq!(k, m(&[&[2, 1]]));
    }

    #[test]
    fn determinant() {
        assert_eq!(m(&[&[2, 1], &[1, 1]]).det(), int(1));
        assert_eq!(m(&[&[0, 1], &[1, 0]]).det(), int(-1));
        assert_eq!(m(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 10]]).det(), int(-3));
    }

    #[test]
    fn mu_is_lcm_of_denominators() {
        assert_eq!(QVector::from_i64(&[1, 2]).mu(), int(1));
        assert_eq!(QVector(vec![rat(1, 2), rat(1, 3)]).mu(), int(6));
        assert_eq!(QVector::from_i64(&[0, 0]).mu(), int(1));
    }

    #[test]
    fn echelon_span() {
        let mut b = EchelonBasis::new();
        assert!(b.insert(vec![rat(1, 1), rat(2, 1), rat(0, 1)]));
        assert!(b.insert(vec![rat(0, 1), rat(1, 1), rat(1, 1)]));
        assert!(!b.insert(vec![rat(2, 1), rat(5, 1), rat(1, 1)]));
        assert!(b.contains(&[rat(1, 1), rat(3, 1), rat(1, 1)]));
        assert!(!b.contains(&[rat(0, 1), rat(0, 1), rat(1, 1)]));
        assert_eq!(b.rank(), 2);
    }

    #[test]
    fn rational_kernel_and_solve() {
        let rows = vec![vec![rat(1, 1), rat(1, 1), rat(0, 1)]];
        let k = kernel_q(&rows, 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(dot_q(&rows[0], v).is_zero());
        }
        let basis = vec![vec![rat(1, 1), rat(0, 1)], vec![rat(1, 1), rat(1, 1)]];
        let x = solve_left_q(&basis, &[rat(3, 1), rat(1, 2)]).unwrap();
        assert_eq!(x, vec![rat(5, 2), rat(1, 2)]);
    }
}
