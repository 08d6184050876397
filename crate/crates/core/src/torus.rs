//! Generators via a torus action on the base: each unimodular cell is made
//! invariant, lifted to a cone `sigma~` over a quotient and the Hilbert basis
//! of its dual is pulled back.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::cone::QCone;
use crate::engine::{
    find_witness, GeneratorSet, GradedElement, NormalizationStatus, QuotientWitness, Twist,
};
use crate::error::{Error, Result};
use crate::hilbert::hilbert_basis;
use crate::linalg::{primitive_of_rational, rat_from_int, solve_left_q, Int, QVector, Rat};
use crate::pdivisor::PDivisor;
use crate::poly::Poly;
use crate::polyhedron::TailedPolyhedron;
use crate::subdivision::unimodular_triangulation;
use crate::variety::{FunctionFieldElement, SectionOracle};

/// Rays of the fan of the toric quotient, each marking the coordinate
/// hyperplane `D_r`, and the characters of a basis of `M'` as Laurent
/// monomials in the coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisorialFanRecord {
    pub rays: Vec<Vec<Int>>,
    pub coordinates: Vec<usize>,
    pub characters: Vec<Vec<i64>>,
    /// `(P, v)` markers over a base of positive dimension.
    pub vertical_markers: Vec<(String, QVector)>,
}

impl DivisorialFanRecord {
    pub fn new(
        rays: Vec<Vec<Int>>,
        coordinates: Vec<usize>,
        characters: Vec<Vec<i64>>,
        vertical_markers: Vec<(String, QVector)>,
    ) -> Result<Self> {
        let rank = characters.len();
        if rays.len() != coordinates.len() {
            return Err(Error::Invalid(format!(
                "{} rays but {} coordinate markers",
                rays.len(),
                coordinates.len()
            )));
        }
        let nvars = characters.first().map_or(0, |c| c.len());
        for c in &characters {
            if c.len() != nvars {
                return Err(Error::DimensionMismatch {
                    expected: nvars,
                    found: c.len(),
                });
            }
            if c.iter().sum::<i64>() != 0 {
                return Err(Error::Invalid(format!("character {c:?} has nonzero degree")));
            }
        }
        let mut seen = BTreeSet::new();
        for (r, &k) in rays.iter().zip(&coordinates) {
            if r.len() != rank {
                return Err(Error::DimensionMismatch {
                    expected: rank,
                    found: r.len(),
                });
            }
            if k >= nvars || !seen.insert(k) {
                return Err(Error::Invalid(format!("bad coordinate marker {k}")));
            }
            // <m', r> is the order of chi^{m'} along D_r
            for (j, c) in characters.iter().enumerate() {
                if Int::from(c[k]) != r[j] {
                    return Err(Error::Invalid(format!(
                        "character {j} has order {} along coordinate {k}, ray says {}",
                        c[k], r[j]
                    )));
                }
            }
        }
        Ok(DivisorialFanRecord {
            rays,
            coordinates,
            characters,
            vertical_markers,
        })
    }

    /// The fan of projective space on `nvars` coordinates, with characters
    /// `x_j / x_last`.
    pub fn projective(nvars: usize) -> Self {
        let rank = nvars.saturating_sub(1);
        let mut rays = Vec::with_capacity(nvars);
        let mut characters = Vec::with_capacity(rank);
        for j in 0..rank {
            let mut r = vec![Int::zero(); rank];
            r[j] = Int::one();
            rays.push(r);
            let mut c = vec![0i64; nvars];
            c[j] = 1;
            c[nvars - 1] = -1;
            characters.push(c);
        }
        if nvars > 0 {
            rays.push(vec![-Int::one(); rank]);
        }
        DivisorialFanRecord {
            rays,
            coordinates: (0..nvars).collect(),
            characters,
            vertical_markers: Vec::new(),
        }
    }

    /// `M' = 0`.
    pub fn trivial() -> Self {
        DivisorialFanRecord {
            rays: Vec::new(),
            coordinates: Vec::new(),
            characters: Vec::new(),
            vertical_markers: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.characters.len()
    }

    pub fn nvars(&self) -> usize {
        self.characters.first().map_or(0, |c| c.len())
    }

    /// `chi^{m'}` as a rational function on the base.
    pub fn character(&self, nvars: usize, m: &[Int]) -> FunctionFieldElement {
        let mut e = vec![Int::zero(); nvars];
        for (c, mj) in self.characters.iter().zip(m) {
            for (x, &ci) in e.iter_mut().zip(c) {
                *x += mj * Int::from(ci);
            }
        }
        let mut num = vec![0u32; nvars];
        let mut den = vec![0u32; nvars];
        for (k, x) in e.iter().enumerate() {
            let a: u32 = x.abs().try_into().expect("exponent too large");
            if x.is_negative() {
                den[k] = a;
            } else {
                num[k] = a;
            }
        }
        FunctionFieldElement::new(
            Poly::monomial(nvars, num, Rat::one()),
            Poly::monomial(nvars, den, Rat::one()),
        )
    }
}

/// `sum_r Delta_r (x) D_r + sum Delta_{P,v} (x) mu(v) D_{P,v}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantRepresentation {
    pub rays: Vec<(Vec<Int>, TailedPolyhedron)>,
    pub vertical: Vec<(String, QVector, TailedPolyhedron, Int)>,
}

impl InvariantRepresentation {
    /// The twisted divisor at `u` as coefficients on the `D_r`.
    pub fn evaluate(&self, u: &[Int]) -> Vec<Rat> {
        self.rays
            .iter()
            .map(|(_, p)| p.support_int(u).expect("weight in the cell"))
            .collect()
    }
}

fn cell_rays(cell: &QCone) -> Result<Vec<Vec<Int>>> {
    if !cell.is_full_dimensional() || !cell.is_simplicial() || !cell.is_unimodular() {
        return Err(Error::Invalid(format!(
            "cell {:?} is not unimodular simplicial",
            cell.rays()
        )));
    }
    Ok(cell.rays().to_vec())
}

/// Coordinates of `u` in the ray basis of a unimodular cell.
pub fn ray_coordinates(rays: &[Vec<Int>], u: &[Int]) -> Vec<Int> {
    let q: Vec<Vec<Rat>> = rays.iter().map(|r| r.iter().map(rat_from_int).collect()).collect();
    let t: Vec<Rat> = u.iter().map(rat_from_int).collect();
    solve_left_q(&q, &t)
        .expect("rays span the weight space")
        .into_iter()
        .map(|x| {
            assert!(x.is_integer(), "cell is not unimodular");
            x.to_integer()
        })
        .collect()
}

/// Twists every ray of the cell to an invariant divisor and reads off the
/// polyhedra `Delta_r = v_r + cell^dual`, where `<v_r, rho>` is the
/// coefficient of `D_r` at the ray `rho`.
pub fn invariantize_cell(
    d: &PDivisor,
    y: &dyn SectionOracle,
    cell: &QCone,
    fan: &DivisorialFanRecord,
) -> Result<(InvariantRepresentation, Vec<Twist>)> {
    if !fan.vertical_markers.is_empty() {
        return Err(Error::UnsupportedBase("vertical markers over a point".into()));
    }
    let rays = cell_rays(cell)?;
    let mut twists = Vec::with_capacity(rays.len());
    let mut coeffs = Vec::with_capacity(rays.len());
    for rho in &rays {
        let divisor = d.evaluate_int(rho)?;
        let section = y.invariantizing_section(&divisor)?;
        let c = y.invariant_coefficients(&divisor, &section)?;
        coeffs.push(c);
        twists.push(Twist {
            weight: rho.clone(),
            divisor,
            section,
        });
    }
    // columns of the ray matrix, for solving R v = c
    let n = cell.ambient_dim();
    let cols: Vec<Vec<Rat>> = (0..n)
        .map(|j| rays.iter().map(|r| rat_from_int(&r[j])).collect())
        .collect();
    let tail = cell.dual();
    let mut out = Vec::with_capacity(fan.rays.len());
    for (r, &k) in fan.rays.iter().zip(&fan.coordinates) {
        let c: Vec<Rat> = coeffs
            .iter()
            .map(|ci| ci.get(k).cloned().unwrap_or_else(Rat::zero))
            .collect();
        let v = solve_left_q(&cols, &c).expect("unimodular rays are a basis");
        out.push((r.clone(), TailedPolyhedron::point_plus_cone(QVector(v), tail.clone())));
    }
    Ok((
        InvariantRepresentation {
            rays: out,
            vertical: Vec::new(),
        },
        twists,
    ))
}

fn concat_q(a: &[Rat], b: &[Int]) -> Vec<Rat> {
    a.iter().cloned().chain(b.iter().map(rat_from_int)).collect()
}

/// `sigma~ = pos((cell^dual x 0) u (Delta_r x r))`.
pub fn upgraded_cone(rep: &InvariantRepresentation, cell: &QCone, fan: &DivisorialFanRecord) -> QCone {
    let n = cell.ambient_dim();
    let m = fan.rank();
    let zero = vec![Int::zero(); m];
    let tail = cell.dual();
    let mut gens: Vec<Vec<Int>> = Vec::new();
    for t in tail.rays() {
        gens.push(t.iter().cloned().chain(zero.iter().cloned()).collect());
    }
    for (r, p) in &rep.rays {
        for v in p.vertices() {
            gens.push(primitive_of_rational(&concat_q(&v.0, r)));
        }
    }
    QCone::from_generators(n + m, &gens)
}

/// The p-divisor over the quotient: weight cone `sigma~^dual`, with
/// `Delta_P = conv(Delta_{P,v} x v) + sigma~` for the vertical markers.
pub fn upgrade(rep: &InvariantRepresentation, cell: &QCone, fan: &DivisorialFanRecord) -> Result<PDivisor> {
    let sigma = upgraded_cone(rep, cell, fan);
    let omega = sigma.dual();
    let tail = omega.dual();
    let mut by_prime: Vec<(String, Vec<QVector>)> = Vec::new();
    for (p, v, delta, _) in &rep.vertical {
        let pts = delta.vertices().iter().map(|w| {
            QVector(w.0.iter().cloned().chain(v.0.iter().cloned()).collect())
        });
        match by_prime.iter_mut().find(|(q, _)| q == p) {
            Some((_, list)) => list.extend(pts),
            None => by_prime.push((p.clone(), pts.collect())),
        }
    }
    let coeffs = by_prime
        .into_iter()
        .map(|(p, pts)| (p, TailedPolyhedron::new(pts, tail.clone())))
        .collect();
    PDivisor::new(omega, coeffs)
}

/// `w = (u, m') -> chi^{m'} prod s_rho^{u_rho} chi^u`.
pub fn downgrade_generators(
    gens: &[Vec<Int>],
    twists: &[Twist],
    cell: &QCone,
    fan: &DivisorialFanRecord,
    y: &dyn SectionOracle,
) -> Result<Vec<GradedElement>> {
    let rays = cell_rays(cell)?;
    let n = cell.ambient_dim();
    let nv = y.nvars();
    let mut factors: Vec<Poly> = (0..nv).map(|i| Poly::var(nv, i)).collect();
    factors.extend(y.labels().iter().filter_map(|l| l.form.clone()));
    let mut out = Vec::with_capacity(gens.len());
    for w in gens {
        if w.len() != n + fan.rank() {
            return Err(Error::DimensionMismatch {
                expected: n + fan.rank(),
                found: w.len(),
            });
        }
        let (u, m) = w.split_at(n);
        let mut s = fan.character(nv, m);
        for (c, rho) in ray_coordinates(&rays, u).iter().zip(&rays) {
            if c.is_zero() {
                continue;
            }
            let t = twists
                .iter()
                .find(|t| &t.weight == rho)
                .ok_or_else(|| Error::Invalid(format!("no twist for ray {rho:?}")))?;
            let e: i64 = c.try_into().expect("exponent too large");
            s = s.mul(&t.section.pow(e));
        }
        out.push(GradedElement::new(s.reduce_by(&factors), u.to_vec()));
    }
    Ok(out)
}

/// One unimodular cell of a torus run.
#[derive(Clone, Debug)]
pub struct TorusCell {
    pub rays: Vec<Vec<Int>>,
    pub twists: Vec<Twist>,
    pub representation: InvariantRepresentation,
    pub sigma: QCone,
    pub hilbert: Vec<Vec<Int>>,
    pub elements: Vec<GradedElement>,
}

#[derive(Clone, Debug)]
pub struct TorusReport {
    pub cells: Vec<TorusCell>,
    pub generators: GeneratorSet,
}

/// Unimodular refinement of the linearity subdivision, cells in
/// lexicographic ray order.
pub fn unimodular_cells(d: &PDivisor) -> Vec<QCone> {
    let mut keys: BTreeSet<Vec<Vec<Int>>> = BTreeSet::new();
    for c in d.linearity_subdivision().cells() {
        for u in unimodular_triangulation(c).cells() {
            let mut r = u.rays().to_vec();
            r.sort();
            keys.insert(r);
        }
    }
    let n = d.omega().ambient_dim();
    keys.into_iter().map(|r| QCone::from_generators(n, &r)).collect()
}

pub fn run_torus(y: &dyn SectionOracle, d: &PDivisor, fan: &DivisorialFanRecord) -> Result<TorusReport> {
    if !fan.vertical_markers.is_empty() {
        return Err(Error::UnsupportedBase(
            "quotients of positive dimension are not supported".into(),
        ));
    }
    if fan.rank() > 0 && fan.nvars() != y.nvars() {
        return Err(Error::DimensionMismatch {
            expected: y.nvars(),
            found: fan.nvars(),
        });
    }
    let cells: Vec<TorusCell> = unimodular_cells(d)
        .par_iter()
        .map(|cell| {
            let (rep, twists) = invariantize_cell(d, y, cell, fan)?;
            let sigma = upgraded_cone(&rep, cell, fan);
            let hilbert = hilbert_basis(&sigma.dual())?;
            let elements = downgrade_generators(&hilbert, &twists, cell, fan, y)?;
            Ok(TorusCell {
                rays: cell.rays().to_vec(),
                twists,
                representation: rep,
                sigma,
                hilbert,
                elements,
            })
        })
        .collect::<Result<_>>()?;
    let mut elements: Vec<GradedElement> = Vec::new();
    for c in &cells {
        for e in &c.elements {
            if !elements.iter().any(|x| x.weight == e.weight && x.section.equals(&e.section)) {
                elements.push(e.clone());
            }
        }
    }
    let witness: QuotientWitness = find_witness(y, &elements);
    Ok(TorusReport {
        cells,
        generators: GeneratorSet {
            elements,
            status: NormalizationStatus::Normal,
            added: Vec::new(),
            witness,
            export: None,
        },
    })
}
