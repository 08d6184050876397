//! Rational polyhedral cones carrying both descriptions.
//!
//! A [`QCone`] stores its generators (extreme rays plus a lineality basis)
//! and its inequalities (facet normals plus an equation basis). The dual
//! cone simply swaps the two sides, so conversion happens once, at
//! construction, via a double description pass.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::linalg::{
    dot, fmt_int_vec, kernel_lattice, lattice_basis, primitive, rat_from_int, solve_left_q, Int,
    IntMatrix, Rat,
};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QCone {
    dim: usize,
    rays: Vec<Vec<Int>>,
    lineality: Vec<Vec<Int>>,
    facets: Vec<Vec<Int>>,
    equations: Vec<Vec<Int>>,
}

#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64).max(1)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
    fn subset_of(&self, o: &Bits) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & !b == 0)
    }
    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
}

fn sort_dedup(mut v: Vec<Vec<Int>>) -> Vec<Vec<Int>> {
    v.sort();
    v.dedup();
    v
}

fn basis_rows(dim: usize, rows: &[Vec<Int>]) -> Vec<Vec<Int>> {
    if rows.is_empty() {
        return Vec::new();
    }
    lattice_basis(&IntMatrix::from_rows(dim, rows)).to_rows()
}

/// Extreme rays of the pointed cone `{z : A z >= 0}` where `A` has full
/// column rank `k` (double description with the combinatorial adjacency
/// test).
fn pointed_extreme_rays(k: usize, a: &[Vec<Int>]) -> Vec<Vec<Int>> {
    if k == 0 {
        return Vec::new();
    }
    // pick k independent rows for the initial simplicial cone
    let mut chosen: Vec<usize> = Vec::new();
    let mut basis = crate::linalg::EchelonBasis::new();
    for (i, row) in a.iter().enumerate() {
        if basis.insert(row.iter().map(rat_from_int).collect()) {
            chosen.push(i);
            if chosen.len() == k {
                break;
            }
        }
    }
    assert_eq!(chosen.len(), k, "inequality system is not of full column rank");
    let kmat: Vec<Vec<Rat>> = chosen
        .iter()
        .map(|&i| a[i].iter().map(rat_from_int).collect())
        .collect();
    // column j of K^{-1} solves K z = e_j, i.e. z^T K^T = e_j^T
    let kt: Vec<Vec<Rat>> = (0..k)
        .map(|c| (0..k).map(|r| kmat[r][c].clone()).collect())
        .collect();
    let nrows = a.len();
    let mut rays: Vec<(Vec<Int>, Bits)> = Vec::new();
    for j in 0..k {
        let mut e = vec![Rat::zero(); k];
        e[j] = Rat::one();
        let z = solve_left_q(&kt, &e).expect("invertible initial system");
        let zi = crate::linalg::primitive_of_rational(&z);
        let mut bits = Bits::new(nrows);
        for &i in &chosen {
            if dot(&a[i], &zi).is_zero() {
                bits.set(i);
            }
        }
        rays.push((zi, bits));
    }
    let mut processed: Vec<bool> = vec![false; nrows];
    for &i in &chosen {
        processed[i] = true;
    }
    for i in 0..nrows {
        if processed[i] {
            continue;
        }
        processed[i] = true;
        let row = &a[i];
        let vals: Vec<Int> = rays.iter().map(|(r, _)| dot(row, r)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&j| vals[j].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&j| vals[j].is_negative()).collect();
        if neg.is_empty() {
            for (j, v) in vals.iter().enumerate() {
                if v.is_zero() {
                    rays[j].1.set(i);
                }
            }
            continue;
        }
        let mut next: Vec<(Vec<Int>, Bits)> = Vec::new();
        if k >= 2 {
            for &p in &pos {
                for &n in &neg {
                    let common = rays[p].1.and(&rays[n].1);
                    if common.count() < k - 2 {
                        continue;
                    }
                    let adjacent = rays.iter().enumerate().all(|(r, (_, bits))| {
                        r == p || r == n || !common.subset_of(bits)
                    });
                    if !adjacent {
                        continue;
                    }
                    let new: Vec<Int> = rays[n]
                        .0
                        .iter()
                        .zip(&rays[p].0)
                        .map(|(y, x)| &vals[p] * y - &vals[n] * x)
                        .collect();
                    let mut bits = common;
                    bits.set(i);
                    next.push((primitive(&new), bits));
                }
            }
        }
        for (j, (r, mut bits)) in rays.into_iter().enumerate() {
            if vals[j].is_negative() {
                continue;
            }
            if vals[j].is_zero() {
                bits.set(i);
            }
            next.push((r, bits));
        }
        rays = next;
    }
    rays.into_iter().map(|(r, _)| r).collect()
}

/// Generators (extreme rays modulo lineality, lineality basis) of
/// `{y : ineqs · y >= 0, eqs · y = 0}`.
fn generators_of(
    dim: usize,
    ineqs: &[Vec<Int>],
    eqs: &[Vec<Int>],
) -> (Vec<Vec<Int>>, Vec<Vec<Int>>) {
    let all: Vec<Vec<Int>> = ineqs.iter().chain(eqs).cloned().collect();
    let lineality = if all.is_empty() {
        IntMatrix::identity(dim).to_rows()
    } else {
        kernel_lattice(&IntMatrix::from_rows(dim, &all)).to_rows()
    };
    let constraints: Vec<Vec<Int>> = eqs.iter().chain(&lineality).cloned().collect();
    let w = if constraints.is_empty() {
        IntMatrix::identity(dim).to_rows()
    } else {
        kernel_lattice(&IntMatrix::from_rows(dim, &constraints)).to_rows()
    };
    let k = w.len();
    let reduced: Vec<Vec<Int>> = ineqs
        .iter()
        .map(|a| w.iter().map(|wj| dot(a, wj)).collect())
        .filter(|r: &Vec<Int>| r.iter().any(|x| !x.is_zero()))
        .collect();
    let rays = if k == 0 {
        Vec::new()
    } else {
        // with no effective inequalities the cone would be a subspace,
        // but then it lies in the lineality space and k = 0
        pointed_extreme_rays(k, &reduced)
            .into_iter()
            .map(|z| {
                let mut y = vec![Int::zero(); dim];
                for (zj, wj) in z.iter().zip(&w) {
                    for (t, x) in y.iter_mut().zip(wj) {
                        *t += zj * x;
                    }
                }
                primitive(&y)
            })
            .collect()
    };
    (sort_dedup(rays), basis_rows(dim, &lineality))
}

impl QCone {
    /// The cone generated by `gens` (any finite set of integer vectors).
    pub fn from_generators(dim: usize, gens: &[Vec<Int>]) -> Self {
        let (facets, equations) = generators_of(dim, gens, &[]);
        let (rays, lineality) = generators_of(dim, &facets, &equations);
        QCone {
            dim,
            rays,
            lineality,
            facets,
            equations,
        }
    }

    pub fn from_generators_i64(gens: &[&[i64]]) -> Self {
        let dim = gens.first().map_or(0, |g| g.len());
        let g: Vec<Vec<Int>> = gens
            .iter()
            .map(|r| r.iter().map(|&x| Int::from(x)).collect())
            .collect();
        Self::from_generators(dim, &g)
    }

    /// The cone `{y : ineqs · y >= 0, eqs · y = 0}`.
    pub fn from_inequalities(dim: usize, ineqs: &[Vec<Int>], eqs: &[Vec<Int>]) -> Self {
        let (rays, lineality) = generators_of(dim, ineqs, eqs);
        let (facets, equations) = generators_of(dim, &rays, &lineality);
        QCone {
            dim,
            rays,
            lineality,
            facets,
            equations,
        }
    }

    pub fn whole_space(dim: usize) -> Self {
        Self::from_inequalities(dim, &[], &[])
    }

    pub fn zero(dim: usize) -> Self {
        Self::from_generators(dim, &[])
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[Vec<Int>] {
        &self.rays
    }

    pub fn lineality(&self) -> &[Vec<Int>] {
        &self.lineality
    }

    pub fn facets(&self) -> &[Vec<Int>] {
        &self.facets
    }

    pub fn equations(&self) -> &[Vec<Int>] {
        &self.equations
    }

    /// Dimension of the linear span.
    pub fn dim(&self) -> usize {
        self.dim - self.equations.len()
    }

    pub fn is_pointed(&self) -> bool {
        self.lineality.is_empty()
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.equations.is_empty()
    }

    /// The dual cone `{v : <v,u> >= 0 for all u in self}`.
    pub fn dual(&self) -> QCone {
        QCone {
            dim: self.dim,
            rays: self.facets.clone(),
            lineality: self.equations.clone(),
            facets: self.rays.clone(),
            equations: self.lineality.clone(),
        }
    }

    pub fn intersect(&self, other: &QCone) -> QCone {
        let ineqs: Vec<Vec<Int>> = self.facets.iter().chain(&other.facets).cloned().collect();
        let eqs: Vec<Vec<Int>> = self
            .equations
            .iter()
            .chain(&other.equations)
            .cloned()
            .collect();
        QCone::from_inequalities(self.dim, &ineqs, &eqs)
    }

    pub fn contains(&self, v: &[Int]) -> bool {
        self.facets.iter().all(|f| !dot(f, v).is_negative())
            && self.equations.iter().all(|e| dot(e, v).is_zero())
    }

    pub fn contains_q(&self, v: &[Rat]) -> bool {
        let pair = |f: &[Int]| -> Rat {
            f.iter()
                .zip(v)
                .fold(Rat::zero(), |acc, (a, b)| acc + rat_from_int(a) * b)
        };
        self.facets.iter().all(|f| !pair(f).is_negative())
            && self.equations.iter().all(|e| pair(e).is_zero())
    }

    /// Relative interior membership.
    pub fn contains_in_relint(&self, v: &[Int]) -> bool {
        self.facets.iter().all(|f| dot(f, v).is_positive())
            && self.equations.iter().all(|e| dot(e, v).is_zero())
    }

    pub fn contains_cone(&self, other: &QCone) -> bool {
        other.rays.iter().all(|r| self.contains(r))
            && other.lineality.iter().all(|l| {
                self.contains(l) && self.contains(&l.iter().map(|x| -x).collect::<Vec<_>>())
            })
    }

    /// Sum of the rays: a lattice point in the relative interior of a
    /// pointed cone.
    pub fn interior_point(&self) -> Vec<Int> {
        let mut p = vec![Int::zero(); self.dim];
        for r in &self.rays {
            for (x, y) in p.iter_mut().zip(r) {
                *x += y;
            }
        }
        p
    }

    pub fn is_simplicial(&self) -> bool {
        self.is_pointed() && self.rays.len() == self.dim()
    }

    /// Ray subsets of the facets, in facet order.
    pub fn facet_ray_sets(&self) -> Vec<Vec<usize>> {
        self.facets
            .iter()
            .map(|f| {
                (0..self.rays.len())
                    .filter(|&i| dot(f, &self.rays[i]).is_zero())
                    .collect()
            })
            .collect()
    }

    /// |det| of the rays of a full-dimensional simplicial cone.
    pub fn multiplicity(&self) -> Int {
        let m = IntMatrix::from_rows(self.dim, &self.rays);
        if m.nrows() != m.ncols() {
            return Int::zero();
        }
        m.det().abs()
    }

    pub fn is_unimodular(&self) -> bool {
        self.is_full_dimensional() && self.is_simplicial() && self.multiplicity().is_one()
    }
}

impl fmt::Debug for QCone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rays: Vec<String> = self.rays.iter().map(|r| fmt_int_vec(r)).collect();
        write!(f, "QCone(dim {}, rays [{}]", self.dim, rays.join(" "))?;
        if !self.lineality.is_empty() {
            let l: Vec<String> = self.lineality.iter().map(|r| fmt_int_vec(r)).collect();
            write!(f, ", lineality [{}]", l.join(" "))?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for QCone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rays: Vec<String> = self.rays.iter().map(|r| fmt_int_vec(r)).collect();
        write!(f, "pos{{{}}}", rays.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[i64]) -> Vec<Int> {
        x.iter().map(|&a| Int::from(a)).collect()
    }

    #[test]
    fn orthant_is_self_dual() {
        let c = QCone::from_generators_i64(&[&[1, 0], &[0, 1]]);
        assert_eq!(c.dual().rays(), &[v(&[0, 1]), v(&[1, 0])]);
        assert_eq!(c.facets(), c.rays());
    }

    #[test]
    fn symmetric_cone_dual() {
        let c = QCone::from_generators_i64(&[&[-1, 1], &[1, 1]]);
        let d = c.dual();
        assert_eq!(d.rays(), &[v(&[-1, 1]), v(&[1, 1])]);
        for r in d.rays() {
            for u in c.rays() {
                assert!(!dot(r, u).is_negative());
            }
        }
        assert_eq!(d.facets().len(), 2);
    }

    #[test]
    fn dual_of_origin_is_everything() {
        let z = QCone::zero(2);
        let d = z.dual();
        assert!(d.is_full_dimensional());
        assert_eq!(d.lineality().len(), 2);
        assert!(d.rays().is_empty());
        assert!(d.contains(&v(&[-3, 7])));
    }

    #[test]
    fn redundant_generators_are_dropped() {
        let c = QCone::from_generators_i64(&[&[1, 0], &[2, 1], &[0, 1], &[1, 1]]);
        assert_eq!(c.rays(), &[v(&[0, 1]), v(&[1, 0])]);
    }

    #[test]
    fn lower_dimensional_cone() {
        let c = QCone::from_generators_i64(&[&[1, 0, 0], &[1, 1, 0]]);
        assert_eq!(c.dim(), 2);
        assert_eq!(c.equations(), &[v(&[0, 0, 1])]);
        assert!(c.contains(&v(&[3, 1, 0])));
        assert!(!c.contains(&v(&[3, 1, 1])));
    }

    #[test]
    fn three_dim_square_cone() {
        let c = QCone::from_generators_i64(&[&[1, 0, 1], &[0, 1, 1], &[-1, 0, 1], &[0, -1, 1]]);
        assert_eq!(c.rays().len(), 4);
        assert_eq!(c.facets().len(), 4);
        assert_eq!(c.dual().dual(), c);
    }

    #[test]
    fn halfplane_has_lineality() {
        let c = QCone::from_inequalities(2, &[v(&[0, 1])], &[]);
        assert!(!c.is_pointed());
        assert_eq!(c.rays(), &[v(&[0, 1])]);
        assert_eq!(c.lineality(), &[v(&[1, 0])]);
    }

    #[test]
    fn intersection() {
        let a = QCone::from_generators_i64(&[&[-1, 1], &[1, 1]]);
        let b = QCone::from_inequalities(2, &[v(&[1, 0])], &[]);
        let c = a.intersect(&b);
        assert_eq!(c.rays(), &[v(&[0, 1]), v(&[1, 1])]);
        assert!(c.is_unimodular());
    }
}
