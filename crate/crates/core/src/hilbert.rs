//! Hilbert bases of pointed rational cones.
//!
//! The cone is triangulated; for every simplicial cell the lattice points of
//! its half-open fundamental parallelepiped are enumerated through the HNF
//! of the ray matrix. Rays and parallelepiped points together generate the
//! monoid, and the irreducible ones among them form the Hilbert basis.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::cone::QCone;
use crate::error::{Error, Result};
use crate::linalg::{
    dot, hnf, kernel_lattice, rat_from_int, solve_left_q, Int, IntMatrix, Rat,
};
use crate::subdivision::triangulate;

/// The unique minimal generating set of `C ∩ Z^n`, sorted lexicographically.
pub fn hilbert_basis(cone: &QCone) -> Result<Vec<Vec<Int>>> {
    if !cone.is_pointed() {
        return Err(Error::NonPointedCone);
    }
    if cone.rays().is_empty() {
        return Ok(Vec::new());
    }
    if cone.is_full_dimensional() {
        return Ok(full_dimensional(cone));
    }
    // Work in coordinates of the saturated lattice span(C) ∩ Z^n.
    let n = cone.ambient_dim();
    let basis = kernel_lattice(&IntMatrix::from_rows(n, cone.equations())).to_rows();
    let qbasis: Vec<Vec<Rat>> = basis
        .iter()
        .map(|b| b.iter().map(rat_from_int).collect())
        .collect();
    let coords: Vec<Vec<Int>> = cone
        .rays()
        .iter()
        .map(|r| {
            let target: Vec<Rat> = r.iter().map(rat_from_int).collect();
            solve_left_q(&qbasis, &target)
                .expect("ray lies in the span")
                .into_iter()
                .map(|x| x.to_integer())
                .collect()
        })
        .collect();
    let inner = QCone::from_generators(basis.len(), &coords);
    let mut out: Vec<Vec<Int>> = full_dimensional(&inner)
        .into_iter()
        .map(|c| {
            let mut v = vec![Int::zero(); n];
            for (cj, bj) in c.iter().zip(&basis) {
                for (x, y) in v.iter_mut().zip(bj) {
                    *x += cj * y;
                }
            }
            v
        })
        .collect();
    out.sort();
    Ok(out)
}

fn full_dimensional(cone: &QCone) -> Vec<Vec<Int>> {
    let cells = triangulate(cone);
    let mut candidates: Vec<Vec<Int>> = cells
        .par_iter()
        .flat_map_iter(|cell| parallelepiped_points(cell))
        .collect();
    candidates.extend(cone.rays().iter().cloned());
    candidates.sort();
    candidates.dedup();
    irreducible(cone, candidates)
}

/// Nonzero lattice points `sum λ_i r_i` with all `0 <= λ_i < 1`.
pub fn parallelepiped_points(rays: &[Vec<Int>]) -> Vec<Vec<Int>> {
    let d = rays.len();
    let m = IntMatrix::from_rows(d, rays);
    let (h, _) = hnf(&m);
    let diag: Vec<Int> = (0..d).map(|i| h[(i, i)].clone()).collect();
    let total: Int = diag.iter().product();
    if total.is_one() {
        return Vec::new();
    }
    let qrays: Vec<Vec<Rat>> = rays
        .iter()
        .map(|r| r.iter().map(rat_from_int).collect())
        .collect();
    // inverse of the ray matrix, row i solves e_i = x · R
    let inv: Vec<Vec<Rat>> = (0..d)
        .map(|i| {
            let mut e = vec![Rat::zero(); d];
            e[i] = Rat::one();
            solve_left_q(&qrays, &e).expect("simplicial cell has independent rays")
        })
        .collect();
    let mut out = Vec::new();
    let mut idx = vec![Int::zero(); d];
    loop {
        if idx.iter().any(|x| !x.is_zero()) {
            // λ = idx · R^{-1}
            let mut lambda = vec![Rat::zero(); d];
            for (a, row) in idx.iter().zip(&inv) {
                if a.is_zero() {
                    continue;
                }
                let aq = rat_from_int(a);
                for (l, x) in lambda.iter_mut().zip(row) {
                    *l += &aq * x;
                }
            }
            let mut p = vec![Rat::zero(); d];
            for (l, r) in lambda.iter().zip(&qrays) {
                let f = l - l.floor();
                if f.is_zero() {
                    continue;
                }
                for (x, y) in p.iter_mut().zip(r) {
                    *x += &f * y;
                }
            }
            if p.iter().any(|x| !x.is_zero()) {
                out.push(p.iter().map(|x| x.to_integer()).collect());
            }
        }
        // odometer over the box prod [0, diag_i)
        let mut k = 0;
        loop {
            if k == d {
                return out;
            }
            idx[k] += 1;
            if idx[k] < diag[k] {
                break;
            }
            idx[k] = Int::zero();
            k += 1;
        }
    }
}

/// A linear form strictly positive on the nonzero points of a pointed
/// full-dimensional cone.
pub fn grading(cone: &QCone) -> Vec<Int> {
    let mut g = vec![Int::zero(); cone.ambient_dim()];
    for f in cone.facets() {
        for (x, y) in g.iter_mut().zip(f) {
            *x += y;
        }
    }
    g
}

fn irreducible(cone: &QCone, mut cands: Vec<Vec<Int>>) -> Vec<Vec<Int>> {
    let g = grading(cone);
    cands.sort_by(|a, b| dot(&g, a).cmp(&dot(&g, b)).then(a.cmp(b)));
    let degs: Vec<Int> = cands.iter().map(|c| dot(&g, c)).collect();
    let keep: Vec<bool> = (0..cands.len())
        .into_par_iter()
        .map(|i| {
            let x = &cands[i];
            !(0..cands.len()).any(|j| {
                if j == i || degs[j] >= degs[i] {
                    return false;
                }
                let diff: Vec<Int> = x.iter().zip(&cands[j]).map(|(a, b)| a - b).collect();
                cone.contains(&diff)
            })
        })
        .collect();
    let mut out: Vec<Vec<Int>> = cands
        .into_iter()
        .zip(keep)
        .filter_map(|(c, k)| k.then_some(c))
        .collect();
    out.sort();
    out
}

/// Whether `x` is an N-combination of `gens` (brute force, for small data).
pub fn in_monoid(x: &[Int], gens: &[Vec<Int>], cone: &QCone) -> bool {
    if x.iter().all(Zero::is_zero) {
        return true;
    }
    let g = grading(cone);
    let dx = dot(&g, x);
    if !dx.is_positive() {
        return false;
    }
    gens.iter().any(|y| {
        let dy = dot(&g, y);
        if !dy.is_positive() || dy > dx {
            return false;
        }
        let rest: Vec<Int> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        cone.contains(&rest) && in_monoid(&rest, gens, cone)
    })
}

/// gcd of a list of integers (0 for the empty list).
pub fn gcd_all(v: &[Int]) -> Int {
    v.iter().fold(Int::zero(), |g, x| g.gcd(x))
}
