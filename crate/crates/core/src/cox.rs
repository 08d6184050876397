//! The Cox ring of the degree five del Pezzo surface through its Cox
//! p-divisor on the blow-up of `P^2` in four points.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::cone::QCone;
use crate::engine::{
    find_witness, graded_gap, ray_generators, reduce_generators, weight_lattice_completion, EngineConfig,
    GeneratorSet, GradedElement, NormalizationStatus, RayRecord,
};
use crate::error::{Error, Result};
use crate::hilbert::{grading, hilbert_basis};
use crate::linalg::{dot, fmt_int_vec, int, kernel_lattice, rat, Int, IntMatrix, QVector, Rat};
use crate::pdivisor::PDivisor;
use crate::poly::Poly;
use crate::polyhedron::TailedPolyhedron;
use crate::subdivision::{common_refinement, PolyhedralSubdivision};
use crate::variety::{BlowupOfP2, QDivisor, SectionOracle};

/// Lines through pairs of the four points, as `(i, j, form)` with
/// `1 <= i < j <= 4`.
const LINES: [(usize, usize, &str); 6] = [
    (1, 2, "x2"),
    (1, 3, "x1"),
    (1, 4, "x1 - x2"),
    (2, 3, "x0"),
    (2, 4, "x0 - x2"),
    (3, 4, "x0 - x1"),
];

/// The plane form whose pullback is the hyperplane class `H`.
const H_FORM: &str = "x0 - x1 + x2";

const M_ROWS: [[i64; 10]; 5] = [
    [0, 0, 0, 0, 1, 1, 1, 1, 1, 1],
    [1, 0, 0, 0, -1, 0, 0, 0, -1, -1],
    [0, 1, 0, 0, 0, 0, -1, -1, 0, -1],
    [0, 0, 1, 0, 0, -1, 0, -1, -1, 0],
    [0, 0, 0, 1, -1, -1, -1, 0, 0, 0],
];

/// The four points, the `5 x 10` matrix of effective generators, its cone
/// `omega` and the surface.
#[derive(Clone, Debug)]
pub struct CoxSetup {
    pub points: Vec<Vec<Rat>>,
    pub matrix: IntMatrix,
    pub omega: QCone,
    pub surface: BlowupOfP2,
}

fn standard_points() -> Vec<Vec<Rat>> {
    [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]]
        .iter()
        .map(|p| p.iter().map(|&x| rat(x, 1)).collect())
        .collect()
}

fn proportional(a: &[Rat], b: &[Rat]) -> bool {
    (0..3).all(|i| (0..3).all(|j| &a[i] * &b[j] == &a[j] * &b[i]))
}

impl CoxSetup {
    pub fn s5() -> Self {
        Self::new(standard_points()).expect("standard points")
    }

    /// Only the points `[1:0:0], [0:1:0], [0:0:1], [1:1:1]` (up to scaling)
    /// are supported: the negative curves are fixed for them.
    pub fn new(points: Vec<Vec<Rat>>) -> Result<Self> {
        let std = standard_points();
        if points.len() != 4
            || points.iter().any(|p| p.len() != 3 || p.iter().all(Zero::is_zero))
            || !points.iter().zip(&std).all(|(p, q)| proportional(p, q))
        {
            return Err(Error::Invalid(
                "the Cox pipeline needs the points [1:0:0], [0:1:0], [0:0:1], [1:1:1]".into(),
            ));
        }
        let coords: Vec<String> = (0..3).map(|i| format!("x{i}")).collect();
        let parse = |s: &str| Poly::parse(s, &coords).expect("fixed form");
        let mut curves = vec![("H".to_string(), parse(H_FORM))];
        for (i, j, f) in LINES {
            curves.push((format!("E{i}{j}"), parse(f)));
        }
        let exceptional = (1..=4).map(|i| format!("E{i}")).collect();
        let surface = BlowupOfP2::new(coords, points.clone(), exceptional, curves)?;
        let rows: Vec<&[i64]> = M_ROWS.iter().map(|r| &r[..]).collect();
        let matrix = IntMatrix::from_i64(&rows);
        let omega = QCone::from_generators(5, &matrix.transpose().to_rows());
        Ok(CoxSetup {
            points,
            matrix,
            omega,
            surface,
        })
    }

    pub fn columns(&self) -> Vec<Vec<Int>> {
        self.matrix.transpose().to_rows()
    }
}

fn unit(i: usize) -> Vec<i64> {
    let mut v = vec![0; 5];
    v[i] = 1;
    v
}

/// `D(u) = u_0 H + sum min(0, u_i) E_i + sum min(0, u_0 + u_i + u_j) E_ij`.
pub fn build_cox_pdivisor(setup: &CoxSetup) -> Result<PDivisor> {
    let tail = setup.omega.dual();
    let zero = QVector::from_i64(&[0; 5]);
    let mut coeffs = vec![(
        "H".to_string(),
        TailedPolyhedron::point_plus_cone(QVector::from_i64(&unit(0)), tail.clone()),
    )];
    for i in 1..=4 {
        coeffs.push((
            format!("E{i}"),
            TailedPolyhedron::new(vec![zero.clone(), QVector::from_i64(&unit(i))], tail.clone()),
        ));
    }
    for (i, j, _) in LINES {
        let mut v = unit(0);
        v[i] = 1;
        v[j] = 1;
        coeffs.push((
            format!("E{i}{j}"),
            TailedPolyhedron::new(vec![zero.clone(), QVector::from_i64(&v)], tail.clone()),
        ));
    }
    PDivisor::new(setup.omega.clone(), coeffs)
}

/// Where the rays come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RaySource {
    /// The linearity subdivision of the p-divisor.
    Linearity,
    /// The arrangement `u_i = 0`, `u_0 - u_i - u_j = 0`; its cells are not
    /// linearity domains.
    SignedArrangement,
}

/// Subdivision of `omega` by the hyperplanes `a.u = 0`.
pub fn hyperplane_subdivision(omega: &QCone, normals: &[Vec<Int>]) -> PolyhedralSubdivision {
    let n = omega.ambient_dim();
    let subs: Vec<PolyhedralSubdivision> = normals
        .iter()
        .map(|a| {
            let neg: Vec<Int> = a.iter().map(|x| -x).collect();
            PolyhedralSubdivision::new(
                QCone::whole_space(n),
                vec![
                    QCone::from_inequalities(n, std::slice::from_ref(a), &[]),
                    QCone::from_inequalities(n, &[neg], &[]),
                ],
            )
        })
        .collect();
    common_refinement(&subs, omega)
}

pub fn signed_arrangement_normals() -> Vec<Vec<Int>> {
    let mut out = Vec::new();
    for i in 1..=4 {
        out.push(unit(i).into_iter().map(int).collect());
    }
    for (i, j, _) in LINES {
        let mut v = vec![int(0); 5];
        v[0] = int(1);
        v[i] = int(-1);
        v[j] = int(-1);
        out.push(v);
    }
    out
}

pub fn ray_subdivision(setup: &CoxSetup, d: &PDivisor, source: RaySource) -> PolyhedralSubdivision {
    match source {
        RaySource::Linearity => d.linearity_subdivision().subdivision,
        RaySource::SignedArrangement => hyperplane_subdivision(&setup.omega, &signed_arrangement_normals()),
    }
}

/// A ray with the class of `D(rho)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassifiedRay {
    pub ray: Vec<Int>,
    pub divisor: QDivisor,
    pub class: Vec<Int>,
}

pub fn classify_rays(d: &PDivisor, y: &dyn SectionOracle, rays: &[Vec<Int>]) -> Result<Vec<ClassifiedRay>> {
    rays.iter()
        .map(|r| {
            let divisor = d.evaluate_int(r)?;
            let class = y.linear_equivalence_class(&divisor)?;
            Ok(ClassifiedRay {
                ray: r.clone(),
                divisor,
                class,
            })
        })
        .collect()
}

/// Drops `u2` when another ray `u1` of the same class leaves a difference
/// `u0 = u2 - u1` that is a nonzero lattice point of `omega` with
/// `D(u0) ~ 0`: then `H^0(D(u0)) x H^0(D(u1)) -> H^0(D(u2))` is onto.
pub fn reduce_rays(d: &PDivisor, y: &dyn SectionOracle, rays: &[ClassifiedRay]) -> Result<Vec<ClassifiedRay>> {
    let omega = d.omega();
    let zero_class = |u: &[Int]| -> Result<bool> {
        let c = y.linear_equivalence_class(&d.evaluate_int(u)?)?;
        Ok(c.iter().all(Zero::is_zero))
    };
    let drop: Vec<bool> = rays
        .par_iter()
        .map(|r2| {
            for r1 in rays {
                if r1.ray == r2.ray || r1.class != r2.class {
                    continue;
                }
                let u0: Vec<Int> = r2.ray.iter().zip(&r1.ray).map(|(a, b)| a - b).collect();
                if omega.contains(&u0) && zero_class(&u0)? {
                    return Ok(true);
                }
            }
            Ok(false)
        })
        .collect::<Result<_>>()?;
    Ok(rays
        .iter()
        .zip(drop)
        .filter(|(_, x)| !x)
        .map(|(r, _)| r.clone())
        .collect())
}

/// `t^a` with `M a = u`, `a >= 0`, lexicographically largest.
pub fn toric_monomial(matrix: &IntMatrix, omega: &QCone, u: &[Int]) -> Option<Vec<Int>> {
    let cols = matrix.transpose().to_rows();
    let g = grading(omega);
    let degs: Vec<Int> = cols.iter().map(|c| dot(&g, c)).collect();
    if degs.iter().any(|x| !x.is_positive()) {
        return None;
    }
    fn go(cols: &[Vec<Int>], degs: &[Int], g: &[Int], i: usize, rest: &[Int], a: &mut [Int]) -> bool {
        if rest.iter().all(Zero::is_zero) {
            return true;
        }
        let left = dot(g, rest);
        if i == cols.len() || left.is_negative() {
            return false;
        }
        let top = &left / &degs[i];
        let mut k = top;
        while !k.is_negative() {
            let next: Vec<Int> = rest.iter().zip(&cols[i]).map(|(x, c)| x - c * &k).collect();
            a[i] = k.clone();
            if go(cols, degs, g, i + 1, &next, a) {
                return true;
            }
            k -= 1;
        }
        a[i] = Int::zero();
        false
    }
    let mut a = vec![Int::zero(); cols.len()];
    go(&cols, &degs, &g, 0, u, &mut a).then_some(a)
}

/// An element `N(x) h^{u_0} t^a` of the ring `P`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PElement {
    pub numerator: Poly,
    pub h_power: Int,
    pub t: Vec<Int>,
}

impl PElement {
    pub fn display(&self, names: &[String]) -> String {
        let mut parts = Vec::new();
        let n = self.numerator.display(names);
        let constant = self.numerator.degree() == Some(0);
        if !(constant && self.numerator.leading().is_some_and(|(_, c)| c.is_one())) {
            parts.push(if self.numerator.num_terms() > 1 { format!("({n})") } else { n });
        }
        if !self.h_power.is_zero() {
            parts.push(if self.h_power.is_one() {
                "h".to_string()
            } else {
                format!("h^{}", self.h_power)
            });
        }
        for (i, e) in self.t.iter().enumerate() {
            if e.is_zero() {
                continue;
            }
            parts.push(if e.is_one() { format!("t{i}") } else { format!("t{i}^{e}") });
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

/// Writes `s chi^u` as `N h^{u_0} t^a` with `N = s f^{u_0}`.
pub fn to_p_element(setup: &CoxSetup, e: &GradedElement) -> Result<PElement> {
    let f = Poly::parse(H_FORM, setup.surface.coordinates()).expect("fixed form");
    let u0: u32 = (&e.weight[0])
        .try_into()
        .map_err(|_| Error::Invalid(format!("weight {} has negative H part", fmt_int_vec(&e.weight))))?;
    let numerator = e
        .section
        .num
        .mul(&f.pow(u0))
        .exact_div(&e.section.den)
        .ok_or_else(|| Error::Invalid(format!("{:?} is not a polynomial times h^{u0}", e.section)))?;
    let t = toric_monomial(&setup.matrix, &setup.omega, &e.weight)
        .ok_or_else(|| Error::WeightOutsideCone(fmt_int_vec(&e.weight)))?;
    Ok(PElement {
        numerator,
        h_power: Int::from(u0),
        t,
    })
}

/// Binomials `t^{a+} - t^{a-}` from a basis of `ker M`.
pub fn toric_relations(matrix: &IntMatrix) -> Vec<(Vec<Int>, Vec<Int>)> {
    kernel_lattice(matrix)
        .rows()
        .map(|k| {
            let pos = k.iter().map(|x| if x.is_positive() { x.clone() } else { Int::zero() }).collect();
            let neg = k.iter().map(|x| if x.is_negative() { -x } else { Int::zero() }).collect();
            (pos, neg)
        })
        .collect()
}

fn det3(m: &[[Poly; 3]; 3]) -> Poly {
    let t = |a: &Poly, b: &Poly, c: &Poly| a.mul(b).mul(c);
    t(&m[0][0], &m[1][1], &m[2][2])
        .add(&t(&m[0][1], &m[1][2], &m[2][0]))
        .add(&t(&m[0][2], &m[1][0], &m[2][1]))
        .sub(&t(&m[0][2], &m[1][1], &m[2][0]))
        .sub(&t(&m[0][0], &m[1][2], &m[2][1]))
        .sub(&t(&m[0][1], &m[1][0], &m[2][2]))
}

/// The `3 x 3` minors of `(e_1, e_2, e_3, (1,1,1), (x_0, x_1, x_2))`, with
/// the factor `h` dropped.
pub fn minors() -> Vec<Poly> {
    let c = |v: i64| Poly::constant(3, rat(v, 1));
    let cols: Vec<[Poly; 3]> = vec![
        [c(1), c(0), c(0)],
        [c(0), c(1), c(0)],
        [c(0), c(0), c(1)],
        [c(1), c(1), c(1)],
        [Poly::var(3, 0), Poly::var(3, 1), Poly::var(3, 2)],
    ];
    let mut out = Vec::new();
    for a in 0..5 {
        for b in a + 1..5 {
            for e in b + 1..5 {
                let m = [0, 1, 2].map(|r| [cols[a][r].clone(), cols[b][r].clone(), cols[e][r].clone()]);
                out.push(det3(&m));
            }
        }
    }
    out
}

/// Whether the numerators are the minors up to sign, one to one.
pub fn minors_certificate(numerators: &[Poly]) -> bool {
    let norm = |p: &Poly| p.monic();
    let mut want: Vec<Poly> = minors().iter().map(norm).collect();
    if want.len() != numerators.len() {
        return false;
    }
    for p in numerators {
        let q = norm(p);
        match want.iter().position(|w| *w == q) {
            Some(i) => {
                want.swap_remove(i);
            }
            None => return false,
        }
    }
    true
}

#[derive(Clone, Debug)]
pub struct CoxReport {
    pub cells: usize,
    pub rays: Vec<ClassifiedRay>,
    pub classes: Vec<Vec<Int>>,
    pub reduced: Vec<ClassifiedRay>,
    pub ray_records: Vec<RayRecord>,
    pub pool: Vec<GradedElement>,
    pub generators: GeneratorSet,
    pub presentation: Vec<PElement>,
    pub toric_relations: Vec<(Vec<Int>, Vec<Int>)>,
    pub minors_ok: bool,
    pub lattice_added: usize,
}

impl CoxReport {
    pub fn class_name(c: &[Int]) -> String {
        let mut s = String::new();
        let names = ["H", "E1", "E2", "E3", "E4"];
        for (x, n) in c.iter().zip(names) {
            if x.is_zero() {
                continue;
            }
            let sign = if x.is_negative() { "-" } else if s.is_empty() { "" } else { "+" };
            let a = x.abs();
            if a.is_one() {
                s.push_str(&format!("{sign}{n}"));
            } else {
                s.push_str(&format!("{sign}{a}{n}"));
            }
        }
        if s.is_empty() {
            "0".into()
        } else {
            s
        }
    }
}

pub fn run_cox(setup: &CoxSetup, source: RaySource, cfg: &EngineConfig) -> Result<CoxReport> {
    let d = build_cox_pdivisor(setup)?;
    let y = &setup.surface;
    let sub = ray_subdivision(setup, &d, source);
    let rays = classify_rays(&d, y, &sub.rays())?;
    let classes: BTreeSet<Vec<Int>> = rays.iter().map(|r| r.class.clone()).collect();
    let reduced = reduce_rays(&d, y, &rays)?;
    let per_ray: Vec<_> = reduced
        .par_iter()
        .map(|r| ray_generators(&d, y, &r.ray, cfg))
        .collect::<Result<_>>()?;
    let mut pool = Vec::new();
    let mut ray_records = Vec::new();
    for (rec, els, _) in per_ray {
        ray_records.push(rec);
        pool.extend(els);
    }
    let mut kept = reduce_generators(&d, y, &pool)?;
    let added = weight_lattice_completion(&d, y, &kept, cfg)?;
    let lattice_added = added.len();
    kept.extend(added);
    // columns first, in matrix order
    let cols = setup.columns();
    let pos: BTreeMap<Vec<Int>, usize> = cols.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
    kept.sort_by_key(|e| (pos.get(&e.weight).copied().unwrap_or(usize::MAX), e.weight.clone()));
    let witness = find_witness(y, &kept);
    let gap = graded_gap(&d, y, &kept)?;
    let status = if gap.is_none() {
        NormalizationStatus::Normal
    } else {
        NormalizationStatus::ExportedForNormalization
    };
    let presentation: Vec<PElement> = kept.iter().map(|e| to_p_element(setup, e)).collect::<Result<_>>()?;
    let numerators: Vec<Poly> = presentation.iter().map(|p| p.numerator.clone()).collect();
    let minors_ok = minors_certificate(&numerators);
    Ok(CoxReport {
        cells: sub.cells().len(),
        rays,
        classes: classes.into_iter().collect(),
        reduced,
        ray_records,
        pool,
        generators: GeneratorSet {
            elements: kept,
            status,
            added: Vec::new(),
            witness,
            export: None,
        },
        presentation,
        toric_relations: toric_relations(&setup.matrix),
        minors_ok,
        lattice_added,
    })
}

/// The Hilbert basis of `omega` lies among the columns.
pub fn hilbert_basis_in_columns(setup: &CoxSetup) -> Result<bool> {
    let cols: BTreeSet<Vec<Int>> = setup.columns().into_iter().collect();
    Ok(hilbert_basis(&setup.omega)?.iter().all(|h| cols.contains(h)))
}
