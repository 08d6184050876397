//! Subdivisions of cones: common refinements, triangulations and
//! unimodular (stellar) triangulations.

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::cone::QCone;
use crate::hilbert::hilbert_basis;
use crate::linalg::{dot, rat_from_int, solve_left_q, Int, IntMatrix, Rat};

/// A subdivision of `ambient` into full-dimensional cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyhedralSubdivision {
    ambient: QCone,
    cells: Vec<QCone>,
}

fn cell_key(c: &QCone) -> (Vec<Vec<Int>>, Vec<Vec<Int>>) {
    (c.rays().to_vec(), c.lineality().to_vec())
}

impl PolyhedralSubdivision {
    pub fn new(ambient: QCone, mut cells: Vec<QCone>) -> Self {
        cells.sort_by_key(cell_key);
        cells.dedup();
        PolyhedralSubdivision { ambient, cells }
    }

    pub fn trivial(ambient: QCone) -> Self {
        let cells = vec![ambient.clone()];
        PolyhedralSubdivision { ambient, cells }
    }

    pub fn ambient(&self) -> &QCone {
        &self.ambient
    }

    pub fn cells(&self) -> &[QCone] {
        &self.cells
    }

    /// All rays of all cells, sorted and deduplicated.
    pub fn rays(&self) -> Vec<Vec<Int>> {
        let mut r: Vec<Vec<Int>> = self
            .cells
            .iter()
            .flat_map(|c| c.rays().iter().cloned())
            .collect();
        r.sort();
        r.dedup();
        r
    }

    /// Index of a cell containing `u`, if any.
    pub fn locate(&self, u: &[Int]) -> Option<usize> {
        self.cells.iter().position(|c| c.contains(u))
    }
}

/// Full-dimensional intersections of one cell from every input with
/// `ambient`. An empty input list gives the trivial subdivision.
pub fn common_refinement(
    subs: &[PolyhedralSubdivision],
    ambient: &QCone,
) -> PolyhedralSubdivision {
    let target = ambient.dim();
    let mut cells = vec![ambient.clone()];
    for sub in subs {
        if sub.cells.len() == 1 && sub.cells[0].contains_cone(ambient) {
            continue;
        }
        let next: Vec<QCone> = cells
            .par_iter()
            .flat_map_iter(|c| {
                sub.cells
                    .iter()
                    .map(move |d| c.intersect(d))
                    .filter(|i| i.dim() == target)
                    .collect::<Vec<_>>()
            })
            .collect();
        cells = next;
    }
    PolyhedralSubdivision::new(ambient.clone(), cells)
}

fn rank_of(rays: &[Vec<Int>]) -> usize {
    if rays.is_empty() {
        return 0;
    }
    IntMatrix::from_rows(rays[0].len(), rays).rank()
}

/// Pulling triangulation of a pointed cone; each cell is a list of rays
/// forming a basis of the cone's span.
pub fn triangulate(cone: &QCone) -> Vec<Vec<Vec<Int>>> {
    let rays = cone.rays();
    if rays.is_empty() {
        return Vec::new();
    }
    let zero_sets: Vec<Vec<usize>> = cone.facet_ray_sets();
    let all: Vec<usize> = (0..rays.len()).collect();
    let mut out = Vec::new();
    pull(rays, &zero_sets, all, cone.dim(), &mut out);
    let mut cells: Vec<Vec<Vec<Int>>> = out
        .into_iter()
        .map(|idx| idx.into_iter().map(|i| rays[i].clone()).collect())
        .collect();
    for c in cells.iter_mut() {
        c.sort();
    }
    cells.sort();
    cells
}

fn pull(
    rays: &[Vec<Int>],
    zero_sets: &[Vec<usize>],
    face: Vec<usize>,
    d: usize,
    out: &mut Vec<Vec<usize>>,
) {
    if face.len() == d {
        out.push(face);
        return;
    }
    let apex = face[0];
    let mut facets: Vec<Vec<usize>> = Vec::new();
    for z in zero_sets {
        let f: Vec<usize> = face.iter().copied().filter(|i| z.contains(i)).collect();
        if f.len() < d - 1 || f.contains(&apex) || facets.contains(&f) {
            continue;
        }
        let sub: Vec<Vec<Int>> = f.iter().map(|&i| rays[i].clone()).collect();
        if rank_of(&sub) == d - 1 {
            facets.push(f);
        }
    }
    for f in facets {
        let mut cells = Vec::new();
        pull(rays, zero_sets, f, d - 1, &mut cells);
        for mut c in cells {
            c.insert(0, apex);
            out.push(c);
        }
    }
}

fn barycentric(cell: &[Vec<Int>], p: &[Int]) -> Option<Vec<Rat>> {
    let q: Vec<Vec<Rat>> = cell
        .iter()
        .map(|r| r.iter().map(rat_from_int).collect())
        .collect();
    let t: Vec<Rat> = p.iter().map(rat_from_int).collect();
    solve_left_q(&q, &t)
}

fn multiplicity(cell: &[Vec<Int>]) -> Int {
    IntMatrix::from_rows(cell[0].len(), cell).det().abs()
}

fn norm2(v: &[Int]) -> Int {
    dot(v, v)
}

/// Refines a full-dimensional pointed cone into unimodular simplicial cells
/// by repeated stellar subdivision at the shortest Hilbert basis element
/// (ties broken lexicographically) of the first non-unimodular cell.
pub fn unimodular_triangulation(cone: &QCone) -> PolyhedralSubdivision {
    let mut cells = triangulate(cone);
    while let Some(bad) = cells.iter().find(|c| !multiplicity(c).is_one()) {
        let simplex = QCone::from_generators(cone.ambient_dim(), bad);
        let hb = hilbert_basis(&simplex).expect("simplicial cells are pointed");
        let p = hb
            .into_iter()
            .filter(|x| !bad.contains(x))
            .min_by(|a, b| norm2(a).cmp(&norm2(b)).then(a.cmp(b)))
            .expect("non-unimodular simplex has a non-ray Hilbert basis element");
        let mut next = Vec::new();
        for c in cells {
            match barycentric(&c, &p) {
                Some(l) if l.iter().all(|x| !x.is_negative()) => {
                    for (i, li) in l.iter().enumerate() {
                        if li.is_zero() {
                            continue;
                        }
                        let mut n = c.clone();
                        n[i] = p.clone();
                        n.sort();
                        next.push(n);
                    }
                }
                _ => next.push(c),
            }
        }
        next.sort();
        next.dedup();
        cells = next;
    }
    let cones = cells
        .iter()
        .map(|c| QCone::from_generators(cone.ambient_dim(), c))
        .collect();
    PolyhedralSubdivision::new(cone.clone(), cones)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[i64]) -> Vec<Int> {
        x.iter().map(|&a| Int::from(a)).collect()
    }

    #[test]
    fn refinement_with_itself() {
        let a = QCone::from_generators_i64(&[&[1, 0], &[0, 1]]);
        let s = PolyhedralSubdivision::trivial(a.clone());
        let r = common_refinement(&[s.clone(), s], &a);
        assert_eq!(r.cells(), std::slice::from_ref(&a));
        assert_eq!(common_refinement(&[], &a).cells(), &[a]);
    }

    #[test]
    fn transverse_splits_of_orthant() {
        // split along x = y and along x = 2y: three cells
        let ambient = QCone::from_generators_i64(&[&[1, 0], &[0, 1]]);
        let half = |n: &[i64]| QCone::from_inequalities(2, &[v(n)], &[]);
        let s1 = PolyhedralSubdivision::new(ambient.clone(), vec![half(&[1, -1]), half(&[-1, 1])]);
        let s2 = PolyhedralSubdivision::new(ambient.clone(), vec![half(&[1, -2]), half(&[-1, 2])]);
        let r = common_refinement(&[s1, s2], &ambient);
        assert_eq!(r.cells().len(), 3);
        assert_eq!(
            r.rays(),
            vec![v(&[0, 1]), v(&[1, 0]), v(&[1, 1]), v(&[2, 1])]
        );
    }

    #[test]
    fn triangulation_of_square_cone() {
        let c = QCone::from_generators_i64(&[&[1, 0, 1], &[0, 1, 1], &[-1, 0, 1], &[0, -1, 1]]);
        let t = triangulate(&c);
        assert_eq!(t.len(), 2);
        let total: Int = t.iter().map(|c| multiplicity(c)).sum();
        assert_eq!(total, Int::from(4));
    }

    #[test]
    fn unimodular_examples() {
        let basis = QCone::from_generators_i64(&[&[1, 0], &[0, 1]]);
        assert_eq!(unimodular_triangulation(&basis).cells(), std::slice::from_ref(&basis));

        let c = QCone::from_generators_i64(&[&[1, 0], &[1, 2]]);
        let t = unimodular_triangulation(&c);
        assert_eq!(t.cells().len(), 2);
        assert!(t.cells().iter().all(|c| c.is_unimodular()));
        assert!(t.rays().contains(&v(&[1, 1])));

        let w = QCone::from_generators_i64(&[&[-1, 1], &[1, 1]]);
        let t = unimodular_triangulation(&w);
        assert_eq!(t.rays(), vec![v(&[-1, 1]), v(&[0, 1]), v(&[1, 1])]);
        assert!(t.cells().iter().all(|c| c.is_unimodular()));
    }
}
