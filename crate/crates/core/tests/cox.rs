use std::collections::BTreeSet;
use std::sync::OnceLock;

use pdiv_core::cox::*;
use pdiv_core::engine::{is_section, EngineConfig, NormalizationStatus};
use pdiv_core::linalg::{int, rat, Int};
use pdiv_core::poly::Poly;
use pdiv_core::variety::{QDivisor, SectionOracle};

fn iv(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&x| int(x)).collect()
}

fn setup() -> &'static CoxSetup {
    static S: OnceLock<CoxSetup> = OnceLock::new();
    S.get_or_init(CoxSetup::s5)
}

fn signed() -> &'static CoxReport {
    static R: OnceLock<CoxReport> = OnceLock::new();
    R.get_or_init(|| run_cox(setup(), RaySource::SignedArrangement, &EngineConfig::default()).unwrap())
}

fn linear() -> &'static CoxReport {
    static R: OnceLock<CoxReport> = OnceLock::new();
    R.get_or_init(|| run_cox(setup(), RaySource::Linearity, &EngineConfig::default()).unwrap())
}

fn class(s: &str) -> Vec<Int> {
    let mut c = vec![int(0); 5];
    for t in s.split('+') {
        let (k, name) = match t.find(|ch: char| ch.is_alphabetic()) {
            Some(0) => (1, t),
            Some(i) => (t[..i].parse().unwrap(), &t[i..]),
            None => unreachable!(),
        };
        let i = if name == "H" { 0 } else { name[1..].parse().unwrap() };
        c[i] += int(k);
    }
    c
}

fn neg_e(c: &mut [Int], i: usize, k: i64) {
    c[i] -= int(k);
}

#[test]
fn divisor_values() {
    let d = build_cox_pdivisor(setup()).unwrap();
    let h = d.evaluate_int(&iv(&[1, 0, 0, 0, 0])).unwrap();
    assert_eq!(h, QDivisor::from_pairs([("H", rat(1, 1))]));
    let v = d.evaluate_int(&iv(&[1, -1, 0, 0, 0])).unwrap();
    assert_eq!(v, QDivisor::from_pairs([("H", rat(1, 1)), ("E1", rat(-1, 1))]));
    // a rigid curve: its weight carries a single section
    let y = &setup().surface;
    for c in setup().columns() {
        let dv = d.evaluate_int(&c).unwrap();
        assert_eq!(y.section_space(&dv).unwrap().dim(), 1, "{c:?}");
    }
}

#[test]
fn hilbert_basis_lies_in_columns() {
    assert!(hilbert_basis_in_columns(setup()).unwrap());
}

#[test]
fn other_points_are_rejected() {
    let pts = vec![
        vec![rat(1, 1), rat(0, 1), rat(0, 1)],
        vec![rat(0, 1), rat(1, 1), rat(0, 1)],
        vec![rat(0, 1), rat(0, 1), rat(1, 1)],
        vec![rat(1, 1), rat(2, 1), rat(3, 1)],
    ];
    assert!(CoxSetup::new(pts).is_err());
    let scaled = vec![
        vec![rat(2, 1), rat(0, 1), rat(0, 1)],
        vec![rat(0, 1), rat(1, 1), rat(0, 1)],
        vec![rat(0, 1), rat(0, 1), rat(1, 1)],
        vec![rat(3, 1), rat(3, 1), rat(3, 1)],
    ];
    assert!(CoxSetup::new(scaled).is_ok());
}

#[test]
fn linearity_subdivision_counts() {
    let r = linear();
    assert_eq!(r.cells, 76);
    assert_eq!(r.rays.len(), 20);
    let mut want: BTreeSet<Vec<Int>> = BTreeSet::new();
    want.insert(vec![int(0); 5]);
    want.insert(class("H"));
    let mut all = class("2H");
    for i in 1..=4 {
        let mut c = class("H");
        neg_e(&mut c, i, 1);
        want.insert(c);
        neg_e(&mut all, i, 1);
    }
    want.insert(all.clone());
    for i in 1..=4 {
        let mut c = all.clone();
        c[i] += 1;
        want.insert(c);
    }
    assert_eq!(r.classes.iter().cloned().collect::<BTreeSet<_>>(), want);
    assert_eq!(r.reduced.len(), 20);
}

#[test]
fn signed_arrangement_counts() {
    let r = signed();
    assert_eq!(r.cells, 241);
    assert_eq!(r.rays.len(), 160);
    let mut want: BTreeSet<Vec<Int>> = [vec![int(0); 5], class("H"), class("2H")].into_iter().collect();
    for i in 1..=4 {
        let mut a = class("H");
        neg_e(&mut a, i, 1);
        want.insert(a);
        let mut b = class("2H");
        neg_e(&mut b, i, 2);
        want.insert(b);
    }
    assert_eq!(want.len(), 11);
    assert_eq!(r.classes.iter().cloned().collect::<BTreeSet<_>>(), want);
    assert_eq!(r.reduced.len(), 23);
    assert_eq!(r.pool.len(), 57);
    assert!(r.ray_records.iter().all(|rec| rec.k == int(1)));
}

#[test]
fn lone_zero_class_ray_is_kept() {
    let d = build_cox_pdivisor(setup()).unwrap();
    let rays = classify_rays(&d, &setup().surface, &[iv(&[0, 1, 0, 0, 0])]).unwrap();
    assert_eq!(reduce_rays(&d, &setup().surface, &rays).unwrap().len(), 1);
}

fn expected() -> Vec<(usize, &'static str)> {
    vec![
        (0, "1"),
        (1, "1"),
        (2, "1"),
        (3, "1"),
        (4, "x1 - x2"),
        (5, "x0 - x1"),
        (6, "x0 - x2"),
        (7, "x0"),
        (8, "x1"),
        (9, "x2"),
    ]
}

fn check_generators(r: &CoxReport) {
    let s = setup();
    let names = s.surface.coordinates().to_vec();
    assert_eq!(r.presentation.len(), 10);
    let cols = s.columns();
    for ((i, form), (p, e)) in expected().into_iter().zip(r.presentation.iter().zip(&r.generators.elements)) {
        assert_eq!(e.weight, cols[i]);
        let mut t = vec![int(0); 10];
        t[i] = int(1);
        assert_eq!(p.t, t);
        assert_eq!(p.h_power, cols[i][0]);
        let want = Poly::parse(form, &names).unwrap();
        assert_eq!(p.numerator.monic(), want.monic(), "t{i}");
    }
    assert!(r.minors_ok);
    assert_eq!(r.generators.status, NormalizationStatus::Normal);
    assert!(r.generators.added.is_empty());
    assert_eq!(r.lattice_added, 0);
    assert!(r.generators.witness.complete);
    let d = build_cox_pdivisor(s).unwrap();
    for e in &r.generators.elements {
        assert!(is_section(&d, &s.surface, &e.section, &e.weight).unwrap());
    }
}

#[test]
fn generators_from_signed_arrangement() {
    check_generators(signed());
}

#[test]
fn generators_from_linearity() {
    check_generators(linear());
}

#[test]
fn presentation_display() {
    let names = setup().surface.coordinates().to_vec();
    let shown: Vec<String> = signed().presentation.iter().map(|p| p.display(&names)).collect();
    assert_eq!(shown[0], "t0");
    assert_eq!(shown[4], "(x1 - x2)*h*t4");
    assert_eq!(shown[9], "x2*h*t9");
}

#[test]
fn toric_relations_span_the_kernel() {
    let rels = toric_relations(&setup().matrix);
    assert_eq!(rels.len(), 5);
    let m = &setup().matrix;
    for (a, b) in &rels {
        assert_eq!(m.apply(a), m.apply(b));
    }
}

#[test]
fn minors_are_the_expected_forms() {
    let names: Vec<String> = (0..3).map(|i| format!("x{i}")).collect();
    let got: std::collections::HashSet<Poly> = minors().iter().map(|p| p.monic()).collect();
    let mut forms: Vec<Poly> = ["x0", "x1", "x2", "x0 - x1", "x0 - x2", "x1 - x2"]
        .iter()
        .map(|f| Poly::parse(f, &names).unwrap().monic())
        .collect();
    forms.push(Poly::one(3));
    assert_eq!(got, forms.into_iter().collect::<std::collections::HashSet<_>>());
    assert_eq!(minors().len(), 10);
    assert!(!minors_certificate(&[Poly::one(3)]));
}

#[test]
fn toric_monomial_matches_weight() {
    let s = setup();
    for u in [[1, 0, 0, 0, 0], [2, 0, 1, 1, 1], [2, -2, 1, 1, 1], [1, 0, 0, 0, -1]] {
        let a = toric_monomial(&s.matrix, &s.omega, &iv(&u)).unwrap();
        assert_eq!(s.matrix.apply(&a), iv(&u));
        assert!(a.iter().all(|x| *x >= int(0)));
    }
}
