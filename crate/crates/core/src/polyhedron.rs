//! Rational polyhedra of the form `conv(vertices) + tail`.

use std::fmt;

use num_traits::Zero;

use crate::cone::QCone;
use crate::linalg::{primitive_of_rational, to_rat_vec, Int, QVector, Rat};
use crate::subdivision::PolyhedralSubdivision;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TailedPolyhedron {
    vertices: Vec<QVector>,
    tail: QCone,
}

impl TailedPolyhedron {
    /// Builds `conv(points) + tail`, discarding points that are not vertices.
    pub fn new(points: Vec<QVector>, tail: QCone) -> Self {
        let mut pts = points;
        pts.sort();
        pts.dedup();
        let domain = tail.dual();
        let keep: Vec<QVector> = (0..pts.len())
            .filter(|&i| normal_cone_of(&pts, i, &domain).dim() == domain.dim())
            .map(|i| pts[i].clone())
            .collect();
        TailedPolyhedron {
            vertices: keep,
            tail,
        }
    }

    pub fn point_plus_cone(point: QVector, tail: QCone) -> Self {
        Self::new(vec![point], tail)
    }

    pub fn vertices(&self) -> &[QVector] {
        &self.vertices
    }

    pub fn tail(&self) -> &QCone {
        &self.tail
    }

    pub fn ambient_dim(&self) -> usize {
        self.tail.ambient_dim()
    }

    /// `min <P, u>`, or `None` when `u` is outside the dual of the tail
    /// (where the minimum is unbounded).
    pub fn support(&self, u: &[Rat]) -> Option<Rat> {
        if !self.tail.dual().contains_q(u) {
            return None;
        }
        self.vertices.iter().map(|v| crate::linalg::dot_q(&v.0, u)).min()
    }

    pub fn support_int(&self, u: &[Int]) -> Option<Rat> {
        self.support(&to_rat_vec(u))
    }

    /// The vertex attaining the minimum of `<., u>` (first in order on ties).
    pub fn minimizing_vertex(&self, u: &[Rat]) -> Option<usize> {
        let vals: Vec<Rat> = self
            .vertices
            .iter()
            .map(|v| crate::linalg::dot_q(&v.0, u))
            .collect();
        let min = vals.iter().min()?;
        vals.iter().position(|x| x == min)
    }

    /// Normal cone of vertex `i` inside the dual of the tail.
    pub fn normal_cone(&self, i: usize) -> QCone {
        normal_cone_of(&self.vertices, i, &self.tail.dual())
    }

    /// Subdivision of the dual of the tail into cones of linearity of the
    /// support function.
    pub fn normal_fan(&self) -> PolyhedralSubdivision {
        let domain = self.tail.dual();
        let cells = (0..self.vertices.len())
            .map(|i| self.normal_cone(i))
            .filter(|c| c.dim() == domain.dim())
            .collect();
        PolyhedralSubdivision::new(domain, cells)
    }

    pub fn minkowski_sum(&self, other: &TailedPolyhedron) -> TailedPolyhedron {
        let pts: Vec<QVector> = self
            .vertices
            .iter()
            .flat_map(|a| other.vertices.iter().map(move |b| a.add(b)))
            .collect();
        let mut gens: Vec<Vec<Int>> = self.tail.rays().to_vec();
        gens.extend(other.tail.rays().iter().cloned());
        for l in self.tail.lineality().iter().chain(other.tail.lineality()) {
            gens.push(l.clone());
            gens.push(l.iter().map(|x| -x).collect());
        }
        let tail = QCone::from_generators(self.ambient_dim(), &gens);
        TailedPolyhedron::new(pts, tail)
    }

    /// Translate by a vector.
    pub fn translate(&self, by: &QVector) -> TailedPolyhedron {
        TailedPolyhedron {
            vertices: self.vertices.iter().map(|v| v.add(by)).collect(),
            tail: self.tail.clone(),
        }
    }

    pub fn is_bounded(&self) -> bool {
        self.tail.rays().is_empty() && self.tail.lineality().is_empty()
    }
}

fn normal_cone_of(points: &[QVector], i: usize, domain: &QCone) -> QCone {
    let v = &points[i];
    let mut ineqs: Vec<Vec<Int>> = domain.facets().to_vec();
    for (j, w) in points.iter().enumerate() {
        if j == i {
            continue;
        }
        let diff = w.sub(v);
        if diff.0.iter().all(Zero::is_zero) {
            continue;
        }
        ineqs.push(primitive_of_rational(&diff.0));
    }
    QCone::from_inequalities(domain.ambient_dim(), &ineqs, domain.equations())
}

impl fmt::Debug for TailedPolyhedron {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vs: Vec<String> = self.vertices.iter().map(|v| v.to_string()).collect();
        write!(f, "conv{{{}}} + {:?}", vs.join(", "), self.tail)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    fn omega_dual() -> QCone {
        QCone::from_generators_i64(&[&[-1, 1], &[1, 1]]).dual()
    }

    fn delta_d() -> TailedPolyhedron {
        TailedPolyhedron::point_plus_cone(QVector(vec![rat(0, 1), rat(1, 2)]), omega_dual())
    }

    fn delta_e() -> TailedPolyhedron {
        TailedPolyhedron::new(
            vec![QVector::from_i64(&[-1, 1]), QVector::from_i64(&[1, 1])],
            omega_dual(),
        )
    }

    #[test]
    fn support_of_delta_e_is_u2_minus_abs_u1() {
        let e = delta_e();
        for (u1, u2) in [(0, 1), (1, 1), (-1, 1), (1, 3), (-2, 5), (0, 0)] {
            let s = e.support(&[rat(u1, 1), rat(u2, 1)]).unwrap();
            assert_eq!(s, rat(u2 - u1.abs(), 1));
        }
        assert!(e.support(&[rat(2, 1), rat(1, 1)]).is_none());
    }

    #[test]
    fn normal_fan_of_point_is_single_cell() {
        let f = delta_d().normal_fan();
        assert_eq!(f.cells().len(), 1);
        assert_eq!(f.cells()[0], omega_dual().dual());
    }

    #[test]
    fn normal_fan_of_delta_e_splits_at_vertical_ray() {
        let f = delta_e().normal_fan();
        assert_eq!(f.cells().len(), 2);
        let v = |x: &[i64]| -> Vec<Int> { x.iter().map(|&a| Int::from(a)).collect() };
        assert_eq!(f.rays(), vec![v(&[-1, 1]), v(&[0, 1]), v(&[1, 1])]);
    }

    #[test]
    fn redundant_points_are_removed() {
        // (0,2) = (0,1) + (0,1) with (0,1) in the tail direction
        let p = TailedPolyhedron::new(
            vec![QVector::from_i64(&[0, 1]), QVector::from_i64(&[0, 2])],
            omega_dual(),
        );
        assert_eq!(p.vertices(), &[QVector::from_i64(&[0, 1])]);
    }

    #[test]
    fn minkowski_examples() {
        let zero = TailedPolyhedron::point_plus_cone(QVector::from_i64(&[0, 0]), QCone::zero(2));
        let e = delta_e();
        assert_eq!(e.minkowski_sum(&zero), e);

        let seg = |a: &[i64], b: &[i64]| {
            TailedPolyhedron::new(vec![QVector::from_i64(a), QVector::from_i64(b)], QCone::zero(2))
        };
        let sq = seg(&[0, 0], &[1, 0]).minkowski_sum(&seg(&[0, 0], &[0, 1]));
        assert_eq!(sq.vertices().len(), 4);
        assert!(sq.is_bounded());

        let pt = TailedPolyhedron::point_plus_cone(QVector(vec![rat(0, 1), rat(1, 2)]), QCone::zero(2));
        let cone = TailedPolyhedron::point_plus_cone(QVector::from_i64(&[0, 0]), omega_dual());
        assert_eq!(pt.minkowski_sum(&cone), delta_d());
    }
}
