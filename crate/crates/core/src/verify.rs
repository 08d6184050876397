//! Seeded property checks that can run inside a job.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cone::QCone;
use crate::engine::is_section;
use crate::linalg::{hnf, int, rat, Int, IntMatrix, QVector};
use crate::pdivisor::PDivisor;
use crate::polyhedron::TailedPolyhedron;
use crate::variety::{ProjectiveSpace, SectionOracle};

pub const SAMPLES: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub name: &'static str,
    pub samples: usize,
    pub failures: Vec<String>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn line(&self) -> String {
        if self.passed() {
            format!("{}: ok ({} samples)", self.name, self.samples)
        } else {
            format!(
                "{}: FAILED {}/{} ({})",
                self.name,
                self.failures.len(),
                self.samples,
                self.failures[0]
            )
        }
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn vector(r: &mut ChaCha8Rng, dim: usize, bound: i64) -> Vec<Int> {
    (0..dim).map(|_| int(r.gen_range(-bound..=bound))).collect()
}

/// A full-dimensional pointed cone from random generators in `[-bound, bound]`.
pub fn random_pointed_cone(r: &mut ChaCha8Rng, dim: usize, bound: i64) -> QCone {
    loop {
        let n = r.gen_range(dim..=dim + 2);
        let gens: Vec<Vec<Int>> = (0..n).map(|_| vector(r, dim, bound)).collect();
        let c = QCone::from_generators(dim, &gens);
        if c.is_pointed() && c.is_full_dimensional() {
            return c;
        }
    }
}

fn run(name: &'static str, seed: u64, mut f: impl FnMut(&mut ChaCha8Rng) -> Option<String>) -> CheckResult {
    let mut r = rng(seed);
    let failures = (0..SAMPLES).filter_map(|_| f(&mut r)).collect();
    CheckResult {
        name,
        samples: SAMPLES,
        failures,
    }
}

pub fn dual_involution(seed: u64) -> CheckResult {
    run("dual-cone involution", seed, |r| {
        let dim = r.gen_range(2..=3);
        let c = random_pointed_cone(r, dim, 5);
        (c.dual().dual() != c).then(|| format!("{:?}", c.rays()))
    })
}

pub fn hnf_unimodular(seed: u64) -> CheckResult {
    run("HNF unimodularity", seed, |r| {
        let m = r.gen_range(1..=4);
        let n = r.gen_range(1..=4);
        let rows: Vec<Vec<Int>> = (0..m).map(|_| vector(r, n, 9)).collect();
        let a = IntMatrix::from_rows(n, &rows);
        let (h, u) = hnf(&a);
        let det = u.det();
        let ok = u.mul(&a) == h && (det == int(1) || det == int(-1));
        (!ok).then(|| format!("{rows:?}"))
    })
}

fn random_polytope(r: &mut ChaCha8Rng, tail: &QCone) -> TailedPolyhedron {
    let dim = tail.ambient_dim();
    let n = r.gen_range(1..=4);
    let pts = (0..n)
        .map(|_| QVector((0..dim).map(|_| rat(r.gen_range(-6..=6), r.gen_range(1..=3))).collect()))
        .collect();
    TailedPolyhedron::new(pts, tail.clone())
}

fn random_in(r: &mut ChaCha8Rng, cone: &QCone) -> Vec<Int> {
    let mut u = vec![int(0); cone.ambient_dim()];
    for ray in cone.rays() {
        let k = r.gen_range(0..=3);
        for (x, y) in u.iter_mut().zip(ray) {
            *x += y * k;
        }
    }
    u
}

pub fn support_additivity(seed: u64) -> CheckResult {
    run("support-function additivity", seed, |r| {
        let dim = r.gen_range(2..=3);
        let omega = random_pointed_cone(r, dim, 3);
        let tail = omega.dual();
        let p = random_polytope(r, &tail);
        let q = random_polytope(r, &tail);
        let s = p.minkowski_sum(&q);
        let u = random_in(r, &omega);
        let lhs = s.support_int(&u);
        let rhs = p.support_int(&u).zip(q.support_int(&u)).map(|(a, b)| a + b);
        (lhs != rhs).then(|| format!("u = {u:?}"))
    })
}

/// The running example on the projective plane.
pub fn plane_example() -> (PDivisor, ProjectiveSpace) {
    let omega = QCone::from_generators_i64(&[&[-1, 1], &[1, 1]]);
    let t = omega.dual();
    let d = PDivisor::new(
        omega,
        vec![
            ("D".into(), TailedPolyhedron::point_plus_cone(QVector(vec![rat(0, 1), rat(1, 2)]), t.clone())),
            (
                "E".into(),
                TailedPolyhedron::new(vec![QVector::from_i64(&[-1, 1]), QVector::from_i64(&[1, 1])], t),
            ),
        ],
    )
    .expect("valid example");
    let y = ProjectiveSpace::parse(&["x", "y", "z"], &[("D", "x*y*z"), ("E", "(y-z)*(x-z)*(x-y)")])
        .expect("valid example");
    (d, y)
}

pub fn pdivisor_convexity(seed: u64) -> CheckResult {
    let (d, _) = plane_example();
    run("p-divisor convexity and homogeneity", seed, |r| {
        let u = random_in(r, d.omega());
        let v = random_in(r, d.omega());
        let k = r.gen_range(1..=4);
        let w: Vec<Int> = u.iter().zip(&v).map(|(a, b)| a + b).collect();
        let du = d.evaluate_int(&u).ok()?;
        let dv = d.evaluate_int(&v).ok()?;
        let dw = d.evaluate_int(&w).ok()?;
        let ku: Vec<Int> = u.iter().map(|x| x * k).collect();
        let dku = d.evaluate_int(&ku).ok()?;
        let convex = dw.dominates(&du.add(&dv));
        let homog = dku == du.scale(&rat(k, 1));
        (!(convex && homog)).then(|| format!("u = {u:?}, v = {v:?}"))
    })
}

pub fn section_multiplicativity(seed: u64) -> CheckResult {
    let (d, y) = plane_example();
    run("section multiplicativity", seed, |r| {
        let pick = |r: &mut ChaCha8Rng| loop {
            let u = random_in(r, d.omega());
            if u.iter().all(|x| *x == int(0)) || u[1] > int(2) {
                continue;
            }
            let floor = d.evaluate_int(&u).ok()?.floor();
            let basis = y.sections(&floor).ok()?;
            if basis.elements.is_empty() {
                continue;
            }
            let i = r.gen_range(0..basis.elements.len());
            return Some((u, basis.elements[i].clone()));
        };
        let (u, s) = pick(r)?;
        let (v, t) = pick(r)?;
        let w: Vec<Int> = u.iter().zip(&v).map(|(a, b)| a + b).collect();
        let ok = is_section(&d, &y, &s.mul(&t), &w).unwrap_or(false);
        (!ok).then(|| format!("u = {u:?}, v = {v:?}"))
    })
}

/// Dimension of the span of all products `H^0(D(u)) H^0(D(v))` never
/// exceeds `dim H^0(D(u+v))`.
pub fn product_rank(seed: u64) -> CheckResult {
    let (d, y) = plane_example();
    run("product rank bound", seed, |r| {
        let (u, v) = loop {
            let u = random_in(r, d.omega());
            let v = random_in(r, d.omega());
            if &u[1] + &v[1] <= int(4) {
                break (u, v);
            }
        };
        let w: Vec<Int> = u.iter().zip(&v).map(|(a, b)| a + b).collect();
        let bu = y.sections(&d.evaluate_int(&u).ok()?.floor()).ok()?;
        let bv = y.sections(&d.evaluate_int(&v).ok()?.floor()).ok()?;
        let full = y.section_space(&d.evaluate_int(&w).ok()?.floor()).ok()?.dim();
        let mut piece = crate::engine::GradedPiece::new(&d, &y, &w).ok()?;
        for s in &bu.elements {
            for t in &bv.elements {
                if piece.insert(&s.mul(t)).is_err() {
                    return Some(format!("product at {w:?} is not a section"));
                }
            }
        }
        (piece.rank() > full).then(|| format!("u = {u:?}, v = {v:?}"))
    })
}

pub fn all(seed: u64) -> Vec<CheckResult> {
    vec![
        dual_involution(seed),
        hnf_unimodular(seed + 1),
        support_additivity(seed + 2),
        pdivisor_convexity(seed + 3),
        section_multiplicativity(seed + 4),
        product_rank(seed + 5),
    ]
}
