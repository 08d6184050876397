//! Normality: exact saturation when the collected elements are
//! monomial, otherwise a bounded comparison of graded dimensions and, if
//! that does not settle normality, an exported presentation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use super::algebra::{products_at, weight_grading, GradedElement, GradedPiece};
use crate::cone::QCone;
use crate::error::{Error, Result};
use crate::hilbert::hilbert_basis;
use crate::linalg::{dot, fmt_int_vec, kernel_lattice, kernel_q, lattice_basis, lattice_coords, Int, IntMatrix, Rat};
use crate::pdivisor::PDivisor;
use crate::poly::{monomial_index, monomials_of_degree, Poly};
use crate::variety::{FunctionFieldElement, QDivisor, SectionOracle};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormalizationStatus {
    /// Nothing had to be added.
    Normal,
    /// Monomial case: the weight semigroup was saturated exactly.
    SaturatedToric,
    /// A presentation was exported for an external normalization.
    ExportedForNormalization,
}

impl NormalizationStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            NormalizationStatus::Normal => "normal",
            NormalizationStatus::SaturatedToric => "saturated-toric",
            NormalizationStatus::ExportedForNormalization => "exported-for-normalization",
        }
    }
}

/// Outcome of the normality stage.
#[derive(Clone, Debug)]
pub struct Normalization {
    pub elements: Vec<GradedElement>,
    pub added: Vec<GradedElement>,
    pub status: NormalizationStatus,
    /// Weight where a graded dimension differed, if any.
    pub gap: Option<Vec<Int>>,
}

/// Exponent vector of a Laurent monomial section, if it is one.
fn laurent_exponents(s: &FunctionFieldElement) -> Option<Vec<Int>> {
    let (a, _) = s.num.as_term()?;
    let (b, _) = s.den.as_term()?;
    Some(a.iter().zip(&b).map(|(x, y)| Int::from(*x) - Int::from(*y)).collect())
}

/// Saturates the monoid of `(exponent, weight)` vectors inside
/// `{(a, u) : sum a = 0}` intersected with its rational span. Returns the
/// Hilbert basis as graded elements.
pub fn saturate_monomial(nvars: usize, elements: &[GradedElement]) -> Result<Vec<GradedElement>> {
    let r = elements.first().map(|e| e.weight.len()).unwrap_or(0);
    let dim = nvars + r;
    let mut vs = Vec::new();
    for e in elements {
        let a = laurent_exponents(&e.section).ok_or_else(|| {
            Error::Invalid("saturation needs monomial sections".into())
        })?;
        let mut v = a;
        v.extend(e.weight.iter().cloned());
        vs.push(v);
    }
    // ambient lattice G = {sum of exponents = 0}
    let mut g_rows = Vec::new();
    for i in 0..nvars.saturating_sub(1) {
        let mut v = vec![Int::zero(); dim];
        v[i] = Int::one();
        v[nvars - 1] = -Int::one();
        g_rows.push(v);
    }
    for j in 0..r {
        let mut v = vec![Int::zero(); dim];
        v[nvars + j] = Int::one();
        g_rows.push(v);
    }
    let g = IntMatrix::from_rows(dim, &g_rows);
    // G intersected with the span of the vectors: kernel of the annihilator
    let s = IntMatrix::from_rows(dim, &vs);
    let ann = kernel_lattice(&s);
    let lam = if ann.nrows() == 0 {
        g.clone()
    } else {
        let cond = ann.mul(&g.transpose());
        let ys = kernel_lattice(&cond);
        ys.mul(&g)
    };
    let basis = lattice_basis(&lam);
    let k = basis.nrows();
    let coords: Vec<Vec<Int>> = vs
        .iter()
        .map(|v| {
            lattice_coords(v, &basis)
                .ok()
                .flatten()
                .expect("generators lie in the lattice")
        })
        .collect();
    let cone = QCone::from_generators(k, &coords);
    let hb = hilbert_basis(&cone)?;
    let mut out = Vec::new();
    for h in hb {
        let v: Vec<Int> = (0..dim)
            .map(|c| h.iter().enumerate().map(|(i, x)| x * &basis[(i, c)]).sum())
            .collect();
        let mut num = vec![0u32; nvars];
        let mut den = vec![0u32; nvars];
        for i in 0..nvars {
            let x: u32 = v[i].abs().try_into().expect("exponent too large");
            if v[i].is_negative() {
                den[i] = x;
            } else {
                num[i] = x;
            }
        }
        let one = Rat::one();
        let section = FunctionFieldElement::new(
            Poly::monomial(nvars, num, one.clone()),
            Poly::monomial(nvars, den, one),
        );
        out.push(GradedElement::new(section, v[nvars..].to_vec()));
    }
    Ok(out)
}

/// Weights at which graded dimensions are compared: generator weights, the
/// Hilbert basis of the weight cone and all pairwise sums.
fn test_weights(d: &PDivisor, elements: &[GradedElement]) -> Result<Vec<Vec<Int>>> {
    let mut base: BTreeSet<Vec<Int>> = elements.iter().map(|e| e.weight.clone()).collect();
    for h in hilbert_basis(d.omega())? {
        base.insert(h);
    }
    let base: Vec<Vec<Int>> = base.into_iter().collect();
    let mut all: BTreeSet<Vec<Int>> = base.iter().cloned().collect();
    for i in 0..base.len() {
        for j in i..base.len() {
            all.insert(base[i].iter().zip(&base[j]).map(|(a, b)| a + b).collect());
        }
    }
    let grade = weight_grading(d.omega());
    let mut out: Vec<Vec<Int>> = all.into_iter().filter(|u| u.iter().any(|x| !x.is_zero())).collect();
    out.sort_by(|a, b| dot(&grade, a).cmp(&dot(&grade, b)).then(a.cmp(b)));
    Ok(out)
}

/// First weight among the test weights where the collected elements do not
/// span all sections.
pub fn graded_gap(d: &PDivisor, y: &dyn SectionOracle, elements: &[GradedElement]) -> Result<Option<Vec<Int>>> {
    let grade = weight_grading(d.omega());
    for u in test_weights(d, elements)? {
        let floor = d.evaluate_int(&u)?.floor();
        let full = y.section_space(&floor)?.dim();
        let mut piece = GradedPiece::new(d, y, &u)?;
        for s in products_at(elements, &u, &grade, 1) {
            piece.insert(&s)?;
            if piece.rank() == full {
                break;
            }
        }
        if piece.rank() < full {
            return Ok(Some(u));
        }
    }
    Ok(None)
}

/// Saturates monomial generators, otherwise compares graded dimensions.
pub fn normalize_or_export(d: &PDivisor, y: &dyn SectionOracle, elements: &[GradedElement]) -> Result<Normalization> {
    let monomial = elements.iter().all(|e| laurent_exponents(&e.section).is_some());
    if monomial && !elements.is_empty() {
        let hb = saturate_monomial(y.nvars(), elements)?;
        let have: BTreeSet<(Vec<Int>, Vec<Int>)> = elements
            .iter()
            .map(|e| (laurent_exponents(&e.section).unwrap(), e.weight.clone()))
            .collect();
        let added: Vec<GradedElement> = hb
            .iter()
            .filter(|e| !have.contains(&(laurent_exponents(&e.section).unwrap(), e.weight.clone())))
            .cloned()
            .collect();
        let status = if added.is_empty() {
            NormalizationStatus::Normal
        } else {
            NormalizationStatus::SaturatedToric
        };
        return Ok(Normalization {
            elements: hb,
            added,
            status,
            gap: None,
        });
    }
    let gap = graded_gap(d, y, elements)?;
    let status = if gap.is_none() {
        NormalizationStatus::Normal
    } else {
        NormalizationStatus::ExportedForNormalization
    };
    Ok(Normalization {
        elements: elements.to_vec(),
        added: Vec::new(),
        status,
        gap,
    })
}

/// `sum c * prod g_k` over index lists.
pub type Relation = Vec<(Rat, Vec<usize>)>;

/// Linear relations of degree at most two among the generators, found by
/// linear algebra on numerators in each weight.
pub fn quadratic_relations(
    d: &PDivisor,
    y: &dyn SectionOracle,
    elements: &[GradedElement],
) -> Result<Vec<Relation>> {
    let mut by_weight: BTreeMap<Vec<Int>, Vec<Vec<usize>>> = BTreeMap::new();
    for i in 0..elements.len() {
        by_weight.entry(elements[i].weight.clone()).or_default().push(vec![i]);
        for j in i..elements.len() {
            let u: Vec<Int> = elements[i].weight.iter().zip(&elements[j].weight).map(|(a, b)| a + b).collect();
            by_weight.entry(u).or_default().push(vec![i, j]);
        }
    }
    // numerator of each element over the label denominator of its weight
    let floors: Vec<QDivisor> = elements
        .iter()
        .map(|e| Ok(d.evaluate_int(&e.weight)?.floor()))
        .collect::<Result<_>>()?;
    let nums: Vec<Poly> = elements
        .iter()
        .zip(&floors)
        .map(|(e, f)| {
            y.numerator_of(f, &e.section)
                .ok_or_else(|| Error::Invalid("element is not a section of its weight".into()))
        })
        .collect::<Result<_>>()?;
    let groups: Vec<(Vec<Int>, Vec<Vec<usize>>)> = by_weight.into_iter().filter(|(_, m)| m.len() > 1).collect();
    let per: Vec<Vec<Relation>> = groups
        .par_iter()
        .map(|(u, monos)| {
            let floor = d.evaluate_int(u)?.floor();
            let rows: Vec<Poly> = monos
                .iter()
                .map(|m| {
                    let mut f = Poly::one(y.nvars());
                    let mut shift = floor.clone();
                    for &i in m {
                        f = f.mul(&nums[i]);
                        shift = shift.add(&floors[i].scale(&-Rat::one()));
                    }
                    f.mul(&label_power(y, &shift))
                })
                .collect();
            // equal rows up to scalars give binomial relations directly
            let mut reps: Vec<(Poly, usize, Rat)> = Vec::new();
            let mut rels = Vec::new();
            for (k, f) in rows.iter().enumerate() {
                if f.is_zero() {
                    rels.push(vec![(Rat::one(), monos[k].clone())]);
                    continue;
                }
                let c = f.leading().unwrap().1.clone();
                let m = f.monic();
                match reps.iter().find(|(p, _, _)| *p == m) {
                    Some((_, r, cr)) => rels.push(vec![
                        (cr.clone(), monos[k].clone()),
                        (-c, monos[*r].clone()),
                    ]),
                    None => reps.push((m, k, c)),
                }
            }
            if reps.len() > 1 {
                let deg = reps[0].0.degree().unwrap_or(0);
                let idx = monomial_index(&monomials_of_degree(y.nvars(), deg));
                let coords: Vec<Vec<Rat>> = reps
                    .iter()
                    .map(|(p, _, c)| p.scale(c).coords(&idx).expect("homogeneous numerator"))
                    .collect();
                let t: Vec<Vec<Rat>> = (0..idx.len())
                    .map(|c| coords.iter().map(|r| r[c].clone()).collect())
                    .collect();
                for k in kernel_q(&t, reps.len()) {
                    rels.push(
                        k.into_iter()
                            .zip(&reps)
                            .filter(|(c, _)| !c.is_zero())
                            .map(|(c, (_, r, _))| (c, monos[*r].clone()))
                            .collect(),
                    );
                }
            }
            Ok(rels)
        })
        .collect::<Result<_>>()?;
    Ok(per.into_iter().flatten().collect())
}

/// `prod g_k^{a_k}` over labels with forms, for an effective integral `a`.
fn label_power(y: &dyn SectionOracle, a: &QDivisor) -> Poly {
    let mut p = Poly::one(y.nvars());
    for (name, c) in a.iter() {
        let Some(g) = y.label(name).and_then(|l| l.form.as_ref()) else {
            continue;
        };
        let e: u32 = c.to_integer().try_into().expect("nonnegative integral exponent");
        p = p.mul(&g.pow(e));
    }
    p
}

/// Plain-text presentation for external normalization.
pub fn export_presentation(
    d: &PDivisor,
    y: &dyn SectionOracle,
    elements: &[GradedElement],
) -> Result<String> {
    let names = y.coordinates().to_vec();
    let mut s = String::new();
    writeln!(s, "# presentation of the algebra generated by the listed elements").unwrap();
    writeln!(s, "coordinates {}", names.join(" ")).unwrap();
    writeln!(s, "generators {}", elements.len()).unwrap();
    for (i, e) in elements.iter().enumerate() {
        let sec = if e.is_one_section() {
            "1".to_string()
        } else {
            e.section.display(&names)
        };
        writeln!(s, "g{} weight {} section {}", i + 1, fmt_int_vec(&e.weight), sec).unwrap();
    }
    let rels = quadratic_relations(d, y, elements)?;
    writeln!(s, "relations {}", rels.len()).unwrap();
    for r in rels {
        let terms: Vec<String> = r
            .iter()
            .map(|(c, m)| {
                let mono: Vec<String> = m.iter().map(|i| format!("g{}", i + 1)).collect();
                format!("({c})*{}", mono.join("*"))
            })
            .collect();
        writeln!(s, "{} = 0", terms.join(" + ")).unwrap();
    }
    Ok(s)
}
