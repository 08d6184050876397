//! Generators of the multigraded section algebra `A(D, M)`.
//!
//! The pipeline collects, for every ray of the linearity subdivision, the
//! sections of an integral base point free multiple; completes the weight
//! lattice and the quotient field; prunes redundant elements; and finally
//! saturates (monomial case) or exports a presentation.

mod algebra;
mod normalize;
mod witness;

use std::collections::BTreeSet;

use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::cone::QCone;
use crate::error::{Error, Result};
use crate::hilbert::hilbert_basis;
use crate::linalg::{dot, lattice_basis, lattice_member, Int, IntMatrix, Rat};
use crate::pdivisor::PDivisor;
use crate::variety::{FunctionFieldElement, QDivisor, SectionBasis, SectionOracle};

pub use algebra::{is_section, products_at, GradedElement, GradedPiece};
pub use normalize::{
    export_presentation, graded_gap, normalize_or_export, quadratic_relations, saturate_monomial,
    Normalization, NormalizationStatus,
};
pub use witness::{find_witness, Atoms, QuotientWitness};

#[derive(Clone, Debug)]
pub struct EngineConfig {
    /// Cap on every search loop.
    pub max_iterations: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { max_iterations: 64 }
    }
}

/// What happened at one ray.
#[derive(Clone, Debug)]
pub struct RayRecord {
    pub ray: Vec<Int>,
    pub divisor: QDivisor,
    pub k: Int,
    pub dim: usize,
}

/// A non-effective integral divisor `D(k rho)` and a section `s` with
/// `D(k rho) + div(s)` effective.
#[derive(Clone, Debug)]
pub struct Twist {
    pub weight: Vec<Int>,
    pub divisor: QDivisor,
    pub section: FunctionFieldElement,
}

/// Final output.
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    pub elements: Vec<GradedElement>,
    pub status: NormalizationStatus,
    /// Elements added by the saturation.
    pub added: Vec<GradedElement>,
    pub witness: QuotientWitness,
    /// Presentation text when the status is `ExportedForNormalization`.
    pub export: Option<String>,
}

/// Everything a run records besides the generators.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub cells: usize,
    pub rays: Vec<RayRecord>,
    pub twists: Vec<Twist>,
    pub lattice_added: Vec<GradedElement>,
    pub quotient_added: Vec<GradedElement>,
    /// Size of the list before pruning.
    pub raw: Vec<GradedElement>,
    pub pruned: Vec<GradedElement>,
    pub generators: GeneratorSet,
}

fn scaled(ray: &[Int], k: &Int) -> Vec<Int> {
    ray.iter().map(|x| x * k).collect()
}

/// Smallest `k` with `D(k rho)` integral and base point free, with its
/// sections.
pub fn find_k_rho(
    d: &PDivisor,
    y: &dyn SectionOracle,
    ray: &[Int],
    cfg: &EngineConfig,
) -> Result<(Int, SectionBasis)> {
    let base = d.evaluate_int(ray)?;
    let l = base.denominator_lcm();
    for j in 1..=cfg.max_iterations {
        let k = &l * Int::from(j);
        let dk = base.scale(&Rat::from_integer(k.clone()));
        if y.is_basepoint_free(&dk)? {
            return Ok((k, y.sections(&dk)?));
        }
    }
    Err(Error::IterationLimitExceeded {
        stage: format!("base point freeness at ray {}", crate::linalg::fmt_int_vec(ray)),
        limit: cfg.max_iterations,
    })
}

/// The elements `eta_j chi^{k rho}` for one ray.
pub fn ray_generators(
    d: &PDivisor,
    y: &dyn SectionOracle,
    ray: &[Int],
    cfg: &EngineConfig,
) -> Result<(RayRecord, Vec<GradedElement>, Option<Twist>)> {
    let (k, basis) = find_k_rho(d, y, ray, cfg)?;
    let w = scaled(ray, &k);
    let twist = if basis.divisor.is_effective() {
        None
    } else {
        basis.elements.first().map(|s| Twist {
            weight: w.clone(),
            divisor: basis.divisor.clone(),
            section: s.clone(),
        })
    };
    let elements: Vec<GradedElement> = basis
        .elements
        .iter()
        .map(|s| GradedElement::new(s.clone(), w.clone()))
        .collect();
    let rec = RayRecord {
        ray: ray.to_vec(),
        divisor: basis.divisor,
        k,
        dim: elements.len(),
    };
    Ok((rec, elements, twist))
}

/// Generators for `D` restricted to a simplicial cone.
pub fn zariski_generators(
    d: &PDivisor,
    y: &dyn SectionOracle,
    sigma: &QCone,
    cfg: &EngineConfig,
) -> Result<Vec<GradedElement>> {
    if !sigma.is_simplicial() {
        return Err(Error::Invalid("cone is not simplicial".into()));
    }
    if !d.omega().contains_cone(sigma) {
        return Err(Error::NotSubcone);
    }
    let mut out = Vec::new();
    for r in sigma.rays() {
        out.extend(ray_generators(d, y, r, cfg)?.1);
    }
    Ok(out)
}

/// Lattice directions for the weight completion: the Hilbert basis of the
/// weight cone, interior elements first, each group in descending
/// lexicographic order.
fn completion_directions(omega: &QCone) -> Result<Vec<Vec<Int>>> {
    let mut hb = hilbert_basis(omega)?;
    hb.sort_by(|a, b| {
        let ia = omega.contains_in_relint(a);
        let ib = omega.contains_in_relint(b);
        ib.cmp(&ia).then(b.cmp(a))
    });
    Ok(hb)
}

fn weight_lattice(elements: &[GradedElement], r: usize) -> IntMatrix {
    let rows: Vec<Vec<Int>> = elements.iter().map(|e| e.weight.clone()).collect();
    lattice_basis(&IntMatrix::from_rows(r, &rows))
}

fn is_full_lattice(h: &IntMatrix, r: usize) -> bool {
    h.nrows() == r && (0..r).all(|i| h[(i, i)].is_one())
}

/// A nonzero section of `floor D(u)`: the constant one if that divisor is
/// effective, the first basis element otherwise.
fn some_section(d: &PDivisor, y: &dyn SectionOracle, u: &[Int]) -> Result<Option<FunctionFieldElement>> {
    let floor = d.evaluate_int(u)?.floor();
    if floor.is_effective() {
        return Ok(Some(FunctionFieldElement::one(y.nvars())));
    }
    Ok(y.sections(&floor)?.elements.into_iter().next())
}

/// Adds `s chi^{j b}` along lattice directions `b` until the weights generate
/// `M`. Multiples already in the generated lattice are recorded without
/// adding elements.
pub fn weight_lattice_completion(
    d: &PDivisor,
    y: &dyn SectionOracle,
    elements: &[GradedElement],
    cfg: &EngineConfig,
) -> Result<Vec<GradedElement>> {
    let r = d.rank();
    let mut all = elements.to_vec();
    let mut added = Vec::new();
    let mut h = weight_lattice(&all, r);
    for b in completion_directions(d.omega())? {
        if is_full_lattice(&h, r) {
            break;
        }
        let mut g = Int::zero();
        let mut j = 0usize;
        while !g.is_one() {
            j += 1;
            if j > cfg.max_iterations {
                return Err(Error::IterationLimitExceeded {
                    stage: "weight lattice completion".into(),
                    limit: cfg.max_iterations,
                });
            }
            let u = scaled(&b, &Int::from(j));
            if lattice_member(&u, &h)? {
                g = g.gcd(&Int::from(j));
                continue;
            }
            if let Some(s) = some_section(d, y, &u)? {
                let e = GradedElement::new(s, u);
                all.push(e.clone());
                added.push(e);
                h = weight_lattice(&all, r);
                g = g.gcd(&Int::from(j));
            }
        }
    }
    Ok(added)
}

/// The interior direction used for the quotient field: the lexicographically
/// smallest Hilbert basis element in the interior.
pub fn interior_ray(omega: &QCone) -> Result<Vec<Int>> {
    let hb = hilbert_basis(omega)?;
    hb.into_iter()
        .filter(|h| omega.contains_in_relint(h))
        .min()
        .ok_or_else(|| Error::Invalid("weight cone has no interior Hilbert basis element".into()))
}

/// Adds all sections of `D(j rho)` for `j = 1, 2, ...` until a witness for
/// the quotient field is found.
pub fn quotient_field_complete(
    d: &PDivisor,
    y: &dyn SectionOracle,
    elements: &[GradedElement],
    cfg: &EngineConfig,
) -> Result<(Vec<GradedElement>, QuotientWitness)> {
    let mut all = elements.to_vec();
    let mut added = Vec::new();
    let mut w = find_witness(y, &all);
    if w.complete {
        return Ok((added, w));
    }
    let rho = interior_ray(d.omega())?;
    for j in 1..=cfg.max_iterations {
        let u = scaled(&rho, &Int::from(j));
        let floor = d.evaluate_int(&u)?.floor();
        for s in y.sections(&floor)?.elements {
            let e = GradedElement::new(s, u.clone());
            all.push(e.clone());
            added.push(e);
        }
        w = find_witness(y, &all);
        if w.complete {
            return Ok((added, w));
        }
    }
    Err(Error::IterationLimitExceeded {
        stage: "quotient field completion".into(),
        limit: cfg.max_iterations,
    })
}

/// Drops elements lying in the span of products of the kept ones (and of
/// earlier kept elements of the same weight), in ascending grade.
pub fn reduce_generators(
    d: &PDivisor,
    y: &dyn SectionOracle,
    elements: &[GradedElement],
) -> Result<Vec<GradedElement>> {
    let grade = algebra::weight_grading(d.omega());
    let mut order: Vec<usize> = (0..elements.len()).collect();
    order.sort_by(|&a, &b| {
        let (ua, ub) = (&elements[a].weight, &elements[b].weight);
        dot(&grade, ua).cmp(&dot(&grade, ub)).then(ua.cmp(ub)).then(a.cmp(&b))
    });
    let mut keep = vec![false; elements.len()];
    let mut dropped = vec![false; elements.len()];
    let mut witness = find_witness(y, elements);
    let mut pos = 0;
    while pos < order.len() {
        let u = elements[order[pos]].weight.clone();
        let mut end = pos;
        while end < order.len() && elements[order[end]].weight == u {
            end += 1;
        }
        let kept: Vec<GradedElement> = (0..elements.len())
            .filter(|&i| keep[i])
            .map(|i| elements[i].clone())
            .collect();
        let mut piece = GradedPiece::new(d, y, &u)?;
        for s in products_at(&kept, &u, &grade, 2) {
            piece.insert(&s)?;
        }
        for &i in &order[pos..end] {
            let e = &elements[i];
            if piece.contains(&e.section) {
                if !witness.uses(i) {
                    dropped[i] = true;
                    continue;
                }
                let alive: Vec<usize> = (0..elements.len()).filter(|&j| j != i && !dropped[j]).collect();
                let rest: Vec<GradedElement> = alive.iter().map(|&j| elements[j].clone()).collect();
                let w = find_witness(y, &rest);
                if w.complete {
                    dropped[i] = true;
                    witness = remap(w, &alive);
                    continue;
                }
            }
            piece.insert(&e.section)?;
            keep[i] = true;
        }
        pos = end;
    }
    Ok((0..elements.len())
        .filter(|&i| keep[i])
        .map(|i| elements[i].clone())
        .collect())
}

fn remap(w: QuotientWitness, mask: &[usize]) -> QuotientWitness {
    QuotientWitness {
        ratios: w
            .ratios
            .into_iter()
            .map(|(i, e)| (i, e.into_iter().map(|(k, x)| (mask[k], x)).collect()))
            .collect(),
        complete: w.complete,
    }
}

/// The full pipeline.
pub fn run_general(d: &PDivisor, y: &dyn SectionOracle, cfg: &EngineConfig) -> Result<RunReport> {
    let dom = d.linearity_subdivision();
    let rays = dom.rays();
    let per_ray: Vec<(RayRecord, Vec<GradedElement>, Option<Twist>)> = rays
        .par_iter()
        .map(|r| ray_generators(d, y, r, cfg))
        .collect::<Result<_>>()?;
    let mut raw = Vec::new();
    let mut records = Vec::new();
    let mut twists = Vec::new();
    for (rec, els, tw) in per_ray {
        records.push(rec);
        raw.extend(els);
        twists.extend(tw);
    }
    let lattice_added = weight_lattice_completion(d, y, &raw, cfg)?;
    raw.extend(lattice_added.iter().cloned());
    let (quotient_added, _) = quotient_field_complete(d, y, &raw, cfg)?;
    raw.extend(quotient_added.iter().cloned());
    let pruned = reduce_generators(d, y, &raw)?;
    let witness = find_witness(y, &pruned);
    let norm = normalize_or_export(d, y, &pruned)?;
    let export = if norm.status == NormalizationStatus::ExportedForNormalization {
        Some(export_presentation(d, y, &norm.elements)?)
    } else {
        None
    };
    let generators = GeneratorSet {
        elements: norm.elements,
        status: norm.status,
        added: norm.added,
        witness,
        export,
    };
    Ok(RunReport {
        cells: dom.cells().len(),
        rays: records,
        twists,
        lattice_added,
        quotient_added,
        raw,
        pruned,
        generators,
    })
}

/// Sorted, deduplicated weights of a list of elements.
pub fn weights(elements: &[GradedElement]) -> Vec<Vec<Int>> {
    let set: BTreeSet<Vec<Int>> = elements.iter().map(|e| e.weight.clone()).collect();
    set.into_iter().collect()
}
