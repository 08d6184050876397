use std::collections::BTreeSet;

use pdiv_core::cone::QCone;
use pdiv_core::engine::is_section;
use pdiv_core::linalg::{int, rat, Int, QVector};
use pdiv_core::pdivisor::PDivisor;
use pdiv_core::poly::Poly;
use pdiv_core::polyhedron::TailedPolyhedron;
use pdiv_core::torus::*;
use pdiv_core::variety::{PointBase, ProjectiveSpace, SectionOracle};

fn iv(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&x| int(x)).collect()
}

fn p2() -> (PDivisor, ProjectiveSpace) {
    let omega = QCone::from_generators_i64(&[&[-1, 1], &[1, 1]]);
    let t = omega.dual();
    let d = PDivisor::new(
        omega,
        vec![
            ("D".into(), TailedPolyhedron::point_plus_cone(QVector(vec![rat(0, 1), rat(1, 2)]), t.clone())),
            ("E".into(), TailedPolyhedron::new(vec![QVector::from_i64(&[-1, 1]), QVector::from_i64(&[1, 1])], t)),
        ],
    )
    .unwrap();
    let y = ProjectiveSpace::parse(&["x", "y", "z"], &[("D", "x*y*z"), ("E", "(y-z)*(x-z)*(x-y)")]).unwrap();
    (d, y)
}

fn cell(a: &[i64], b: &[i64]) -> QCone {
    QCone::from_generators_i64(&[a, b])
}

#[test]
fn p2_cells_are_the_two_halves() {
    let (d, _) = p2();
    let cells = unimodular_cells(&d);
    let rays: Vec<BTreeSet<Vec<Int>>> = cells.iter().map(|c| c.rays().iter().cloned().collect()).collect();
    assert_eq!(rays.len(), 2);
    assert!(rays.contains(&[iv(&[0, 1]), iv(&[1, 1])].into_iter().collect()));
    assert!(rays.contains(&[iv(&[-1, 1]), iv(&[0, 1])].into_iter().collect()));
}

#[test]
fn p2_invariant_twist_and_support() {
    let (d, y) = p2();
    let fan = DivisorialFanRecord::projective(3);
    let c = cell(&[0, 1], &[1, 1]);
    let (rep, twists) = invariantize_cell(&d, &y, &c, &fan).unwrap();
    let names = y.coordinates().to_vec();
    let s1 = twists.iter().find(|t| t.weight == iv(&[0, 1])).unwrap();
    let s2 = twists.iter().find(|t| t.weight == iv(&[1, 1])).unwrap();
    assert_eq!(s1.section.den.degree(), Some(3));
    assert_eq!(s1.section.num.display(&names), "x*y*z");
    assert!(s2.section.equals(&pdiv_core::variety::FunctionFieldElement::one(3)));
    // (3/2 u2 - u1) on every coordinate divisor
    for u in [[0i64, 1], [1, 1], [1, 3], [2, 5]] {
        let want = rat(3 * u[1] - 2 * u[0], 2);
        assert!(rep.evaluate(&iv(&u)).iter().all(|c| *c == want), "{u:?}");
    }
}

#[test]
fn p2_second_cell_is_mirrored() {
    let (d, y) = p2();
    let fan = DivisorialFanRecord::projective(3);
    let (r1, _) = invariantize_cell(&d, &y, &cell(&[0, 1], &[1, 1]), &fan).unwrap();
    let (r2, _) = invariantize_cell(&d, &y, &cell(&[-1, 1], &[0, 1]), &fan).unwrap();
    for u in [[0i64, 1], [1, 1], [1, 2], [3, 4]] {
        assert_eq!(r1.evaluate(&iv(&u)), r2.evaluate(&iv(&[-u[0], u[1]])));
    }
}

#[test]
fn p2_sigma_matches_reference_matrix() {
    let (d, y) = p2();
    let fan = DivisorialFanRecord::projective(3);
    let c = cell(&[0, 1], &[1, 1]);
    let (rep, _) = invariantize_cell(&d, &y, &c, &fan).unwrap();
    let sigma = upgraded_cone(&rep, &c, &fan);
    let got: BTreeSet<Vec<Int>> = sigma.rays().iter().cloned().collect();
    let want: BTreeSet<Vec<Int>> = [
        [-1, 1, 0, 0],
        [1, 0, 0, 0],
        [-2, 3, 2, 0],
        [-2, 3, 0, 2],
        [-2, 3, -2, -2],
    ]
    .iter()
    .map(|r| iv(r))
    .collect();
    assert_eq!(got, want);
    assert!(sigma.is_pointed());
    let up = upgrade(&rep, &c, &fan).unwrap();
    assert_eq!(up.omega(), &sigma.dual());
    assert_eq!(up.coefficients().count(), 0);
}

#[test]
fn p2_run_gives_65_per_cell() {
    let (d, y) = p2();
    let fan = DivisorialFanRecord::projective(3);
    let r = run_torus(&y, &d, &fan).unwrap();
    assert_eq!(r.cells.len(), 2);
    let mut total = 0;
    let mut degrees = BTreeSet::new();
    for c in &r.cells {
        assert_eq!(c.hilbert.len(), 65);
        total += c.elements.len();
        for e in &c.elements {
            degrees.insert(e.weight.clone());
            assert!(is_section(&d, &y, &e.section, &e.weight).unwrap(), "{e:?}");
        }
    }
    assert_eq!(total, 130);
    let want: BTreeSet<Vec<Int>> = [[0, 1], [0, 2], [1, 1], [-1, 1], [1, 2], [-1, 2], [2, 2], [-2, 2]]
        .iter()
        .map(|r| iv(r))
        .collect();
    assert_eq!(degrees, want);
    assert!(r.generators.witness.complete);
}

#[test]
fn p2_graded_dimensions_match_the_quotient() {
    let (d, y) = p2();
    let fan = DivisorialFanRecord::projective(3);
    let c = cell(&[0, 1], &[1, 1]);
    let (rep, _) = invariantize_cell(&d, &y, &c, &fan).unwrap();
    let wc = upgraded_cone(&rep, &c, &fan).dual();
    for u in [[0i64, 1], [0, 2], [1, 1], [1, 2], [2, 2], [1, 3], [2, 3], [0, 3], [3, 4], [2, 4]] {
        let dim = y.section_space(&d.evaluate_int(&iv(&u)).unwrap().floor()).unwrap().dim();
        // points (u, m') of the weight cone; |m'| is bounded by the degree
        let mut count = 0;
        for a in -12..=12 {
            for b in -12..=12 {
                if wc.contains(&iv(&[u[0], u[1], a, b])) {
                    count += 1;
                }
            }
        }
        assert_eq!(dim, count, "{u:?}");
    }
}

#[test]
fn twist_is_invertible() {
    let (d, y) = p2();
    let fan = DivisorialFanRecord::projective(3);
    let r = run_torus(&y, &d, &fan).unwrap();
    let mut factors: Vec<Poly> = (0..3).map(|i| Poly::var(3, i)).collect();
    factors.extend(y.labels().iter().filter_map(|l| l.form.clone()));
    for c in &r.cells {
        for e in c.elements.iter().step_by(7) {
            let coords = ray_coordinates(&c.rays, &e.weight);
            let mut s = e.section.clone();
            for (k, rho) in coords.iter().zip(&c.rays) {
                let t = c.twists.iter().find(|t| &t.weight == rho).unwrap();
                s = s.mul(&t.section.pow(-i64::try_from(k).unwrap()));
            }
            let s = s.reduce_by(&factors);
            // what remains is a character of the torus
            assert!(s.num.as_term().is_some() && s.den.as_term().is_some(), "{s:?}");
        }
    }
}

#[test]
fn point_base_gives_hilbert_basis() {
    let omega = QCone::from_generators_i64(&[&[1, 0], &[1, 3]]);
    let d = PDivisor::new(omega.clone(), vec![]).unwrap();
    let r = run_torus(&PointBase, &d, &DivisorialFanRecord::trivial()).unwrap();
    let got: BTreeSet<Vec<Int>> = r.generators.elements.iter().map(|e| e.weight.clone()).collect();
    let want: BTreeSet<Vec<Int>> = pdiv_core::hilbert::hilbert_basis(&omega).unwrap().into_iter().collect();
    assert_eq!(got, want);
}

#[test]
fn invariant_divisor_has_identity_twist() {
    let omega = QCone::from_generators_i64(&[&[1, 0], &[0, 1]]);
    let t = omega.dual();
    let d = PDivisor::new(
        omega,
        vec![("H".into(), TailedPolyhedron::point_plus_cone(QVector::from_i64(&[1, 0]), t))],
    )
    .unwrap();
    let y = ProjectiveSpace::parse(&["x", "y"], &[("H", "x")]).unwrap();
    let fan = DivisorialFanRecord::projective(2);
    let (_, twists) = invariantize_cell(&d, &y, d.omega(), &fan).unwrap();
    for t in twists {
        assert!(t.section.num.as_term().is_some() && t.section.den.as_term().is_some());
    }
    let r = run_torus(&y, &d, &fan).unwrap();
    for e in &r.generators.elements {
        assert!(is_section(&d, &y, &e.section, &e.weight).unwrap());
    }
}

#[test]
fn fan_record_rejects_inconsistent_characters() {
    let err = DivisorialFanRecord::new(vec![iv(&[1])], vec![0], vec![vec![-1, 1]], vec![]);
    assert!(err.is_err());
    assert!(DivisorialFanRecord::new(vec![iv(&[1]), iv(&[-1])], vec![0, 1], vec![vec![1, -1]], vec![]).is_ok());
}

#[test]
fn vertical_markers_are_unsupported() {
    let (d, y) = p2();
    let mut fan = DivisorialFanRecord::projective(3);
    fan.vertical_markers.push(("P".into(), QVector::from_i64(&[0, 0])));
    assert!(matches!(run_torus(&y, &d, &fan), Err(pdiv_core::Error::UnsupportedBase(_))));
}

fn reference_columns() -> BTreeSet<Vec<Int>> {
    include_str!("data/torus_hilbert_columns.txt")
        .lines()
        .map(|l| l.split_whitespace().map(|x| x.parse::<i64>().map(int).unwrap()).collect())
        .collect()
}

#[test]
fn p2_hilbert_basis_equals_reference_columns() {
    let (d, y) = p2();
    let fan = DivisorialFanRecord::projective(3);
    let c = cell(&[0, 1], &[1, 1]);
    let (rep, _) = invariantize_cell(&d, &y, &c, &fan).unwrap();
    let hb: BTreeSet<Vec<Int>> = pdiv_core::hilbert::hilbert_basis(&upgraded_cone(&rep, &c, &fan).dual())
        .unwrap()
        .into_iter()
        .collect();
    let reference = reference_columns();
    assert_eq!(reference.len(), 65);
    assert_eq!(hb, reference);
}
