use std::sync::OnceLock;

use pdiv_core::cone::QCone;
use pdiv_core::engine::*;
use pdiv_core::hilbert::{grading, hilbert_basis};
use pdiv_core::linalg::{hnf, int, rat, Int, IntMatrix, QVector};
use pdiv_core::pdivisor::PDivisor;
use pdiv_core::poly::Poly;
use pdiv_core::polyhedron::TailedPolyhedron;
use pdiv_core::variety::{FunctionFieldElement, PointBase, ProjectiveSpace, SectionOracle};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn iv(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&x| int(x)).collect()
}

fn p2() -> ProjectiveSpace {
    ProjectiveSpace::parse(&["x", "y", "z"], &[("D", "x*y*z"), ("E", "(y-z)*(x-z)*(x-y)")]).unwrap()
}

fn p2_divisor() -> PDivisor {
    let omega = QCone::from_generators_i64(&[&[-1, 1], &[1, 1]]);
    let t = omega.dual();
    PDivisor::new(
        omega,
        vec![
            ("D".into(), TailedPolyhedron::point_plus_cone(QVector(vec![rat(0, 1), rat(1, 2)]), t.clone())),
            (
                "E".into(),
                TailedPolyhedron::new(vec![QVector::from_i64(&[-1, 1]), QVector::from_i64(&[1, 1])], t),
            ),
        ],
    )
    .unwrap()
}

fn p2_run() -> &'static RunReport {
    static RUN: OnceLock<RunReport> = OnceLock::new();
    RUN.get_or_init(|| run_general(&p2_divisor(), &p2(), &EngineConfig::default()).unwrap())
}

fn element(y: &dyn SectionOracle, num: &str, den: &str, w: &[i64]) -> GradedElement {
    let names = y.coordinates().to_vec();
    let s = FunctionFieldElement::new(Poly::parse(num, &names).unwrap(), Poly::parse(den, &names).unwrap());
    GradedElement::new(s, iv(w))
}

/// Whether `e` lies in the degree piece of the algebra generated by `gens`.
fn in_algebra(d: &PDivisor, y: &dyn SectionOracle, gens: &[GradedElement], e: &GradedElement) -> bool {
    let g = grading(d.omega());
    let mut piece = GradedPiece::new(d, y, &e.weight).unwrap();
    for s in products_at(gens, &e.weight, &g, 1) {
        piece.insert(&s).unwrap();
    }
    piece.contains(&e.section)
}

fn line(omega: &[i64]) -> QCone {
    QCone::from_generators_i64(&[omega])
}

fn p1() -> ProjectiveSpace {
    ProjectiveSpace::parse(&["x", "y"], &[("A", "x"), ("B", "y")]).unwrap()
}

fn p1_divisor(a: (i64, i64), b: (i64, i64)) -> PDivisor {
    let omega = line(&[1]);
    let t = omega.dual();
    PDivisor::new(
        omega,
        vec![
            ("A".into(), TailedPolyhedron::point_plus_cone(QVector(vec![rat(a.0, a.1)]), t.clone())),
            ("B".into(), TailedPolyhedron::point_plus_cone(QVector(vec![rat(b.0, b.1)]), t)),
        ],
    )
    .unwrap()
}

#[test]
fn p2_rays_and_multiples() {
    let r = p2_run();
    assert_eq!(r.cells, 2);
    let rays: Vec<Vec<Int>> = r.rays.iter().map(|x| x.ray.clone()).collect();
    assert_eq!(rays, vec![iv(&[-1, 1]), iv(&[0, 1]), iv(&[1, 1])]);
    assert!(r.rays.iter().all(|x| x.k == int(2)));
    let dims: Vec<usize> = r.rays.iter().map(|x| x.dim).collect();
    assert_eq!(dims, vec![10, 55, 10]);
    assert!(r.twists.is_empty());
}

#[test]
fn p2_raw_pool_and_lattice_step() {
    let r = p2_run();
    assert_eq!(r.raw.len(), 77);
    let w: Vec<Vec<Int>> = r.lattice_added.iter().map(|e| e.weight.clone()).collect();
    assert_eq!(w, vec![iv(&[0, 1]), iv(&[1, 1])]);
    assert!(r.lattice_added.iter().all(|e| e.is_one_section()));
    assert!(r.quotient_added.is_empty());
}

#[test]
fn p2_pruned_keeps_listed_generators() {
    let r = p2_run();
    let d = p2_divisor();
    let y = p2();
    assert!(r.pruned.len() <= 77);
    let f1 = "x*y*z";
    let f12 = "x*y*z*((y-z)*(x-z)*(x-y))^2";
    let listed = [
        ("x^3", f1, [-2, 2]),
        ("y^3", f1, [-2, 2]),
        ("z^3", f1, [-2, 2]),
        ("x^9", f12, [0, 2]),
        ("y^9", f12, [0, 2]),
        ("z^9", f12, [0, 2]),
        ("x^3", f1, [2, 2]),
        ("y^3", f1, [2, 2]),
        ("z^3", f1, [2, 2]),
        ("1", "1", [0, 1]),
        ("1", "1", [1, 1]),
        ("x^2*y", f1, [-2, 2]),
        ("x*y^2", f1, [-2, 2]),
    ];
    for (n, den, w) in listed {
        let e = element(&y, n, den, &w);
        assert!(in_algebra(&d, &y, &r.pruned, &e), "{n}/{den} at {w:?}");
    }
    assert_eq!(r.generators.status, NormalizationStatus::ExportedForNormalization);
    let text = r.generators.export.as_ref().unwrap();
    assert!(text.contains(&format!("generators {}", r.pruned.len())));
    assert!(r.generators.witness.complete);
}

#[test]
fn p2_elements_are_sections_and_products_stay_sections() {
    let r = p2_run();
    let d = p2_divisor();
    let y = p2();
    for e in &r.pruned {
        assert!(is_section(&d, &y, &e.section, &e.weight).unwrap());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let a = &r.pruned[rng.gen_range(0..r.pruned.len())];
        let b = &r.pruned[rng.gen_range(0..r.pruned.len())];
        let p = a.mul(b);
        assert!(is_section(&d, &y, &p.section, &p.weight).unwrap());
    }
    let rows: Vec<Vec<Int>> = r.pruned.iter().map(|e| e.weight.clone()).collect();
    let (h, _) = hnf(&IntMatrix::from_rows(2, &rows));
    assert_eq!(h.row(0), &iv(&[1, 0])[..]);
    assert_eq!(h.row(1), &iv(&[0, 1])[..]);
}

#[test]
fn p2_witness_expresses_coordinate_ratios() {
    let r = p2_run();
    let y = p2();
    let w = &r.generators.witness;
    assert_eq!(w.ratios.len(), 2);
    for (i, exps) in &w.ratios {
        let mut s = FunctionFieldElement::one(3);
        let mut weight = iv(&[0, 0]);
        for (k, e) in exps {
            let x: i64 = e.try_into().unwrap();
            s = s.mul(&r.pruned[*k].section.pow(x));
            for (a, b) in weight.iter_mut().zip(&r.pruned[*k].weight) {
                *a += b * e;
            }
        }
        assert_eq!(weight, iv(&[0, 0]));
        // equal to x_i / z up to a constant
        let target = FunctionFieldElement::new(Poly::var(3, *i), Poly::var(3, 2));
        let q = s.mul(&target.inverse());
        let (a, _) = q.num.as_term().expect("monomial numerator");
        let (b, _) = q.den.as_term().expect("monomial denominator");
        assert_eq!(a, b, "{}", q.display(y.coordinates()));
    }
}

#[test]
fn multiple_one_third_needs_three() {
    let d = p1_divisor((1, 3), (0, 1));
    let (k, basis) = find_k_rho(&d, &p1(), &iv(&[1]), &EngineConfig::default()).unwrap();
    assert_eq!(k, int(3));
    assert_eq!(basis.elements.len(), 2);
    let d = p1_divisor((1, 1), (0, 1));
    let (k, _) = find_k_rho(&d, &p1(), &iv(&[1]), &EngineConfig::default()).unwrap();
    assert_eq!(k, int(1));
}

#[test]
fn lattice_completion_with_gap_at_one() {
    let d = p1_divisor((2, 3), (-1, 2));
    let y = p1();
    // brute force: floor D(j) has degree -1, 0, 0 for j = 1, 2, 3
    for (j, dim) in [(1, 0), (2, 1), (3, 1)] {
        let f = d.evaluate_int(&iv(&[j])).unwrap().floor();
        assert_eq!(y.section_space(&f).unwrap().dim(), dim);
    }
    let added = weight_lattice_completion(&d, &y, &[], &EngineConfig::default()).unwrap();
    let w: Vec<Vec<Int>> = added.iter().map(|e| e.weight.clone()).collect();
    assert_eq!(w, vec![iv(&[2]), iv(&[3])]);
}

#[test]
fn lattice_completion_adds_nothing_when_complete() {
    let d = p2_divisor();
    let y = p2();
    let have = vec![element(&y, "1", "1", &[0, 1]), element(&y, "1", "1", &[1, 1])];
    assert!(weight_lattice_completion(&d, &y, &have, &EngineConfig::default())
        .unwrap()
        .is_empty());
}

#[test]
fn witness_on_the_line() {
    let y = p1();
    let els = vec![element(&y, "1", "1", &[1]), element(&y, "x", "y", &[1])];
    let w = find_witness(&y, &els);
    assert!(w.complete);
    assert_eq!(w.ratios, vec![(0, vec![(0, int(-1)), (1, int(1))])]);
    let names = y.coordinates().to_vec();
    let shown = w.display(&names, |k| format!("g{}", k + 1));
    assert_eq!(shown, vec!["x/y = g1^-1 * g2^1".to_string()]);
    assert!(find_witness(&PointBase, &[]).complete);
}

fn point_divisor(rays: &[&[i64]]) -> PDivisor {
    PDivisor::new(QCone::from_generators_i64(rays), vec![]).unwrap()
}

#[test]
fn monomial_and_duplicate_pruning() {
    let d = point_divisor(&[&[1, 0], &[0, 1]]);
    let y = PointBase;
    let c = |w: &[i64]| GradedElement::character(0, iv(w));
    let out = reduce_generators(&d, &y, &[c(&[1, 0]), c(&[0, 1]), c(&[1, 1])]).unwrap();
    assert_eq!(out, vec![c(&[1, 0]), c(&[0, 1])]);
    let out = reduce_generators(&d, &y, &[c(&[1, 0]), c(&[1, 0]), c(&[0, 1])]).unwrap();
    assert_eq!(out.len(), 2);
}

#[test]
fn saturation_adds_missing_point() {
    let d = point_divisor(&[&[1, 0], &[1, 2]]);
    let c = |w: &[i64]| GradedElement::character(0, iv(w));
    let n = normalize_or_export(&d, &PointBase, &[c(&[1, 0]), c(&[1, 2])]).unwrap();
    assert_eq!(n.status, NormalizationStatus::SaturatedToric);
    assert_eq!(n.added, vec![c(&[1, 1])]);
}

#[test]
fn toric_base_case() {
    let d = point_divisor(&[&[1, 0], &[0, 1]]);
    let y = PointBase;
    let sigma = QCone::from_generators_i64(&[&[1, 0], &[0, 1]]);
    let z = zariski_generators(&d, &y, &sigma, &EngineConfig::default()).unwrap();
    let c = |w: &[i64]| GradedElement::character(0, iv(w));
    assert_eq!(z, vec![c(&[0, 1]), c(&[1, 0])]);
    let r = run_general(&d, &y, &EngineConfig::default()).unwrap();
    assert_eq!(r.generators.status, NormalizationStatus::Normal);
    assert_eq!(weights(&r.generators.elements), vec![iv(&[0, 1]), iv(&[1, 0])]);
}

#[test]
fn toric_base_matches_hilbert_basis() {
    let d = point_divisor(&[&[1, 0], &[1, 3], &[-1, 2]]);
    let r = run_general(&d, &PointBase, &EngineConfig::default()).unwrap();
    let hb = hilbert_basis(d.omega()).unwrap();
    assert_eq!(weights(&r.generators.elements), hb);
}

#[test]
fn iteration_cap_is_reported() {
    let d = p1_divisor((1, 3), (0, 1));
    let cfg = EngineConfig { max_iterations: 0 };
    assert!(matches!(
        find_k_rho(&d, &p1(), &iv(&[1]), &cfg),
        Err(pdiv_core::Error::IterationLimitExceeded { .. })
    ));
}
