//! Base varieties: divisors, global sections and the torus action.
//!
//! Every backend describes its function field through homogeneous
//! coordinates. A prime divisor label may carry a defining form; a section
//! of an integral divisor `D = sum a_k P_k` is stored as a numerator `F`
//! over the fixed denominator `prod g_k^{a_k}` taken over labels with forms.

mod blowup;
mod point;
mod projective;

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{Int, Rat};
use crate::poly::Poly;

pub use blowup::BlowupOfP2;
pub use point::PointBase;
pub use projective::ProjectiveSpace;

/// A named prime divisor, optionally cut out by a homogeneous form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeDivisorLabel {
    pub name: String,
    pub form: Option<Poly>,
}

/// A rational divisor: a finite map from labels to rational coefficients.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct QDivisor {
    coeffs: BTreeMap<String, Rat>,
}

impl QDivisor {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_pairs<S: Into<String>>(pairs: impl IntoIterator<Item = (S, Rat)>) -> Self {
        let mut d = Self::zero();
        for (k, v) in pairs {
            d.add_term(&k.into(), &v);
        }
        d
    }

    pub fn get(&self, label: &str) -> Rat {
        self.coeffs.get(label).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn add_term(&mut self, label: &str, c: &Rat) {
        let e = self.coeffs.entry(label.to_string()).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(label);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Rat)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.values().all(|c| c.is_integer())
    }

    pub fn is_effective(&self) -> bool {
        self.coeffs.values().all(|c| !c.is_negative())
    }

    pub fn add(&self, other: &QDivisor) -> QDivisor {
        let mut d = self.clone();
        for (k, v) in &other.coeffs {
            d.add_term(k, v);
        }
        d
    }

    pub fn scale(&self, k: &Rat) -> QDivisor {
        QDivisor::from_pairs(self.coeffs.iter().map(|(n, c)| (n.clone(), c * k)))
    }

    pub fn floor(&self) -> QDivisor {
        QDivisor::from_pairs(self.coeffs.iter().map(|(n, c)| (n.clone(), c.floor())))
    }

    /// Smallest positive integer making all coefficients integral.
    pub fn denominator_lcm(&self) -> Int {
        self.coeffs
            .values()
            .fold(Int::one(), |l, c| l.lcm(c.denom()))
    }

    pub fn int_coeff(&self, label: &str) -> Int {
        self.get(label).floor().to_integer()
    }

    /// Coefficientwise `self >= other`.
    pub fn dominates(&self, other: &QDivisor) -> bool {
        other.add(&self.scale(&-Rat::one())).coeffs.values().all(|c| !c.is_positive())
    }
}

impl fmt::Display for QDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        for (i, (n, c)) in self.coeffs.iter().enumerate() {
            if i == 0 {
                write!(f, "{c} {n}")?;
            } else if c.is_negative() {
                write!(f, " - {} {n}", -c)?;
            } else {
                write!(f, " + {c} {n}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for QDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A rational function `num / den` in the homogeneous coordinates.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FunctionFieldElement {
    pub num: Poly,
    pub den: Poly,
}

impl FunctionFieldElement {
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let c = den.leading().unwrap().1.clone();
        let inv = Rat::one() / c;
        FunctionFieldElement {
            num: num.scale(&inv),
            den: den.scale(&inv),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::new(Poly::one(nvars), Poly::one(nvars))
    }

    pub fn from_poly(p: Poly) -> Self {
        let n = p.nvars();
        Self::new(p, Poly::one(n))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn inverse(&self) -> Self {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, e: i64) -> Self {
        let b = if e < 0 { self.inverse() } else { self.clone() };
        let k = e.unsigned_abs() as u32;
        Self::new(b.num.pow(k), b.den.pow(k))
    }

    /// Equality as rational functions.
    pub fn equals(&self, o: &Self) -> bool {
        self.num.mul(&o.den) == o.num.mul(&self.den)
    }

    /// Cancels the given factors from numerator and denominator as often as
    /// they divide both.
    pub fn reduce_by(&self, factors: &[Poly]) -> Self {
        let mut num = self.num.clone();
        let mut den = self.den.clone();
        for g in factors {
            loop {
                match (num.exact_div(g), den.exact_div(g)) {
                    (Some(a), Some(b)) if !num.is_zero() => {
                        num = a;
                        den = b;
                    }
                    _ => break,
                }
            }
        }
        Self::new(num, den)
    }

    pub fn display(&self, names: &[String]) -> String {
        let n = self.num.display(names);
        if self.den.as_term().is_some_and(|(m, c)| m.iter().all(|&e| e == 0) && c.is_one()) {
            return n;
        }
        let wrap = |p: &Poly, s: String| if p.num_terms() > 1 { format!("({s})") } else { s };
        let d = self.den.display(names);
        let d = if self.den.num_terms() > 1 || d.contains('*') { format!("({d})") } else { d };
        format!("{}/{d}", wrap(&self.num, n))
    }
}

impl fmt::Debug for FunctionFieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?})/({:?})", self.num, self.den)
    }
}

/// Global sections of a divisor, as numerators over the label denominator.
#[derive(Clone, Debug)]
pub struct SectionSpace {
    /// The integral divisor whose sections these are.
    pub divisor: QDivisor,
    /// Degree of the numerators; negative means the space is zero.
    pub degree: i64,
    pub numerators: Vec<Poly>,
}

impl SectionSpace {
    pub fn dim(&self) -> usize {
        self.numerators.len()
    }
}

/// A vector-space basis of `H^0(Y, D)` as function-field elements.
#[derive(Clone, Debug)]
pub struct SectionBasis {
    pub divisor: QDivisor,
    pub elements: Vec<FunctionFieldElement>,
}

/// What the algorithms need to know about the base variety.
pub trait SectionOracle: Send + Sync {
    fn coordinates(&self) -> &[String];

    fn labels(&self) -> &[PrimeDivisorLabel];

    /// Sections of an integral divisor.
    fn section_space(&self, d: &QDivisor) -> Result<SectionSpace>;

    fn is_basepoint_free(&self, d: &QDivisor) -> Result<bool>;

    fn linear_equivalence_class(&self, d: &QDivisor) -> Result<Vec<Int>>;

    /// A section `s` with `D + div(s)` supported on torus-invariant divisors.
    fn invariantizing_section(&self, d: &QDivisor) -> Result<FunctionFieldElement>;

    /// Coefficients of `D + div(s)` on the invariant coordinate divisors.
    fn invariant_coefficients(&self, _d: &QDivisor, _s: &FunctionFieldElement) -> Result<Vec<Rat>> {
        Err(Error::UnsupportedBackend(
            "no torus-invariant coordinate divisors".into(),
        ))
    }

    /// `Some(true)` when a sufficient bigness criterion holds, `None` when
    /// undecided.
    fn is_big(&self, d: &QDivisor) -> Option<bool>;

    fn name(&self) -> String;

    fn nvars(&self) -> usize {
        self.coordinates().len()
    }

    fn label(&self, name: &str) -> Option<&PrimeDivisorLabel> {
        self.labels().iter().find(|l| l.name == name)
    }

    fn check_labels(&self, d: &QDivisor) -> Result<()> {
        for (n, _) in d.iter() {
            if self.label(n).is_none() {
                return Err(Error::Invalid(format!("unknown prime divisor '{n}'")));
            }
        }
        Ok(())
    }

    fn sections(&self, d: &QDivisor) -> Result<SectionBasis> {
        let sp = self.section_space(d)?;
        let elements = sp
            .numerators
            .iter()
            .map(|f| self.to_function(&sp.divisor, f))
            .collect();
        Ok(SectionBasis {
            divisor: sp.divisor,
            elements,
        })
    }

    /// `(P, N)` with the label denominator equal to `P / N`: `P` collects
    /// positive and `N` negative coefficients of the floor of `d`.
    fn denominator(&self, d: &QDivisor) -> (Poly, Poly) {
        let n = self.nvars();
        let mut pos = Poly::one(n);
        let mut neg = Poly::one(n);
        for (name, c) in d.iter() {
            let Some(g) = self.label(name).and_then(|l| l.form.as_ref()) else {
                continue;
            };
            let a = c.floor().to_integer();
            let e: u32 = a.abs().try_into().expect("coefficient too large");
            if a.is_positive() {
                pos = pos.mul(&g.pow(e));
            } else if a.is_negative() {
                neg = neg.mul(&g.pow(e));
            }
        }
        (pos, neg)
    }

    /// The function `F / prod g^{floor(a)}`, with common coordinate and
    /// label factors cancelled.
    fn to_function(&self, d: &QDivisor, f: &Poly) -> FunctionFieldElement {
        let (pos, neg) = self.denominator(d);
        let n = self.nvars();
        let mut factors: Vec<Poly> = (0..n).map(|i| Poly::var(n, i)).collect();
        factors.extend(self.labels().iter().filter_map(|l| l.form.clone()));
        FunctionFieldElement::new(f.mul(&neg), pos).reduce_by(&factors)
    }

    /// Inverse of [`to_function`]: the numerator of `s` over the label
    /// denominator of `d`, if it is a polynomial.
    fn numerator_of(&self, d: &QDivisor, s: &FunctionFieldElement) -> Option<Poly> {
        let (pos, neg) = self.denominator(d);
        s.num.mul(&pos).exact_div(&s.den.mul(&neg))
    }
}

/// The shipped backends.
#[derive(Clone, Debug)]
pub enum Variety {
    Projective(ProjectiveSpace),
    Blowup(BlowupOfP2),
    Point(PointBase),
}

impl Variety {
    pub fn oracle(&self) -> &dyn SectionOracle {
        match self {
            Variety::Projective(v) => v,
            Variety::Blowup(v) => v,
            Variety::Point(v) => v,
        }
    }
}
