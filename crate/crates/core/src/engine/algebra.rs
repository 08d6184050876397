//! Homogeneous elements `s chi^u` and graded pieces of the algebra they
//! generate.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::cone::QCone;
use crate::error::{Error, Result};
use crate::linalg::{dot, fmt_int_vec, EchelonBasis, Int, Rat};
use crate::pdivisor::PDivisor;
use crate::poly::{monomial_index, monomials_of_degree, Monomial};
use crate::variety::{FunctionFieldElement, QDivisor, SectionOracle};

/// `s chi^u`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GradedElement {
    pub section: FunctionFieldElement,
    pub weight: Vec<Int>,
}

impl GradedElement {
    pub fn new(section: FunctionFieldElement, weight: Vec<Int>) -> Self {
        GradedElement { section, weight }
    }

    /// `chi^u` with the constant section.
    pub fn character(nvars: usize, weight: Vec<Int>) -> Self {
        GradedElement::new(FunctionFieldElement::one(nvars), weight)
    }

    pub fn mul(&self, o: &GradedElement) -> GradedElement {
        let weight = self.weight.iter().zip(&o.weight).map(|(a, b)| a + b).collect();
        GradedElement::new(self.section.mul(&o.section), weight)
    }

    pub fn is_one_section(&self) -> bool {
        self.section.equals(&FunctionFieldElement::one(self.section.num.nvars()))
    }

    pub fn display(&self, names: &[String]) -> String {
        let chi = format!("chi^{}", fmt_int_vec(&self.weight));
        if self.is_one_section() {
            chi
        } else {
            let s = self.section.display(names);
            if self.section.num.num_terms() > 1 && self.section.den.num_terms() == 1 {
                format!("({s})*{chi}")
            } else {
                format!("{s}*{chi}")
            }
        }
    }
}

impl fmt::Debug for GradedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}*chi^{}", self.section, fmt_int_vec(&self.weight))
    }
}

/// The sections of `floor D(u)` as coordinate vectors of their numerators,
/// with an echelon basis of a subspace.
pub struct GradedPiece<'a> {
    y: &'a dyn SectionOracle,
    divisor: QDivisor,
    index: Option<BTreeMap<Monomial, usize>>,
    span: EchelonBasis,
}

impl<'a> GradedPiece<'a> {
    pub fn new(d: &PDivisor, y: &'a dyn SectionOracle, u: &[Int]) -> Result<Self> {
        let divisor = d.evaluate_int(u)?.floor();
        Ok(GradedPiece {
            y,
            divisor,
            index: None,
            span: EchelonBasis::new(),
        })
    }

    pub fn divisor(&self) -> &QDivisor {
        &self.divisor
    }

    fn coords(&mut self, s: &FunctionFieldElement) -> Option<Vec<Rat>> {
        if s.is_zero() {
            return None;
        }
        let f = self.y.numerator_of(&self.divisor, s)?;
        if !f.is_homogeneous() {
            return None;
        }
        let deg = f.degree()?;
        let index = self
            .index
            .get_or_insert_with(|| monomial_index(&monomials_of_degree(f.nvars(), deg)));
        f.coords(index)
    }

    /// Adds `s`; returns whether it enlarged the span. Sections that are not
    /// numerators over the label denominator are rejected.
    pub fn insert(&mut self, s: &FunctionFieldElement) -> Result<bool> {
        match self.coords(s) {
            Some(v) => Ok(self.span.insert(v)),
            None if s.is_zero() => Ok(false),
            None => Err(Error::Invalid(format!(
                "{s:?} is not a section of {}",
                self.divisor
            ))),
        }
    }

    pub fn contains(&mut self, s: &FunctionFieldElement) -> bool {
        if s.is_zero() {
            return true;
        }
        match self.coords(s) {
            Some(v) => self.span.contains(&v),
            None => false,
        }
    }

    pub fn rank(&self) -> usize {
        self.span.rank()
    }
}

/// Whether `s` is a section of `floor D(u)`.
pub fn is_section(d: &PDivisor, y: &dyn SectionOracle, s: &FunctionFieldElement, u: &[Int]) -> Result<bool> {
    let floor = d.evaluate_int(u)?.floor();
    let Some(f) = y.numerator_of(&floor, s) else {
        return Ok(false);
    };
    if s.is_zero() {
        return Ok(true);
    }
    let sp = y.section_space(&floor)?;
    if !f.is_homogeneous() || f.degree() != u32::try_from(sp.degree).ok() {
        return Ok(false);
    }
    let mut basis = EchelonBasis::new();
    let index = monomial_index(&monomials_of_degree(f.nvars(), sp.degree as u32));
    for g in &sp.numerators {
        basis.insert(g.coords(&index).expect("numerator has the space degree"));
    }
    Ok(basis.contains(&f.coords(&index).expect("homogeneous of the space degree")))
}

/// Products of at least `min_factors` elements of `gens` with total weight
/// `u`. `grade` must be positive on every generator weight; generators of
/// non-positive grade are ignored.
pub fn products_at(gens: &[GradedElement], u: &[Int], grade: &[Int], min_factors: usize) -> Vec<FunctionFieldElement> {
    let mut out = Vec::new();
    let Some(first) = gens.first() else {
        return out;
    };
    let degs: Vec<Int> = gens.iter().map(|g| dot(grade, &g.weight)).collect();
    let mut search = Search {
        gens,
        degs: &degs,
        min_factors,
        nvars: first.section.num.nvars(),
        stack: Vec::new(),
        out: &mut out,
    };
    let d = dot(grade, u);
    search.run(u, &d, 0);
    out
}

struct Search<'a> {
    gens: &'a [GradedElement],
    degs: &'a [Int],
    min_factors: usize,
    nvars: usize,
    stack: Vec<usize>,
    out: &'a mut Vec<FunctionFieldElement>,
}

impl Search<'_> {
    fn run(&mut self, rest: &[Int], rest_deg: &Int, from: usize) {
        if rest.iter().all(Zero::is_zero) {
            if !self.stack.is_empty() && self.stack.len() >= self.min_factors {
                let mut s = FunctionFieldElement::one(self.nvars);
                for &i in &self.stack {
                    s = s.mul(&self.gens[i].section);
                }
                self.out.push(s);
            }
            return;
        }
        for i in from..self.gens.len() {
            let di = &self.degs[i];
            if !di.is_positive() || di > rest_deg {
                continue;
            }
            let next: Vec<Int> = rest.iter().zip(&self.gens[i].weight).map(|(a, b)| a - b).collect();
            self.stack.push(i);
            self.run(&next, &(rest_deg - di), i);
            self.stack.pop();
        }
    }
}

/// The linear form used to order weights: positive on the weight cone.
pub fn weight_grading(omega: &QCone) -> Vec<Int> {
    crate::hilbert::grading(omega)
}
