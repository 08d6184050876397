use num_traits::{Signed, Zero};

use super::{FunctionFieldElement, PrimeDivisorLabel, QDivisor, SectionOracle, SectionSpace};
use crate::error::{Error, Result};
use crate::linalg::{Int, Rat};
use crate::poly::{monomials_of_degree, Poly};

/// Projective space `P^n` with prime divisors given by reduced forms; the
/// diagonal torus acts by scaling coordinates.
#[derive(Clone, Debug)]
pub struct ProjectiveSpace {
    coords: Vec<String>,
    labels: Vec<PrimeDivisorLabel>,
}

impl ProjectiveSpace {
    pub fn new(coords: Vec<String>, labels: Vec<(String, Poly)>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Invalid("projective space needs coordinates".into()));
        }
        let mut out = Vec::new();
        for (name, form) in labels {
            if form.nvars() != coords.len() {
                return Err(Error::DimensionMismatch {
                    expected: coords.len(),
                    found: form.nvars(),
                });
            }
            if !form.is_homogeneous() || form.degree().unwrap_or(0) == 0 {
                return Err(Error::Invalid(format!(
                    "divisor '{name}' needs a nonconstant homogeneous form"
                )));
            }
            if out.iter().any(|l: &PrimeDivisorLabel| l.name == name) {
                return Err(Error::Invalid(format!("duplicate divisor '{name}'")));
            }
            out.push(PrimeDivisorLabel {
                name,
                form: Some(form.monic()),
            });
        }
        Ok(ProjectiveSpace { coords, labels: out })
    }

    /// Convenience constructor parsing the forms.
    pub fn parse(coords: &[&str], labels: &[(&str, &str)]) -> Result<Self> {
        let names: Vec<String> = coords.iter().map(|s| s.to_string()).collect();
        let mut ls = Vec::new();
        for (n, f) in labels {
            let p = Poly::parse(f, &names).map_err(|e| Error::Invalid(e.message))?;
            ls.push((n.to_string(), p));
        }
        Self::new(names, ls)
    }

    fn form(&self, label: &str) -> &Poly {
        self.label(label).and_then(|l| l.form.as_ref()).expect("checked label")
    }

    /// `sum c_k deg g_k`.
    pub fn degree(&self, d: &QDivisor) -> Result<Rat> {
        self.check_labels(d)?;
        Ok(d.iter()
            .map(|(n, c)| c * Rat::from_integer(Int::from(self.form(n).degree().unwrap())))
            .sum())
    }

    /// Whether the divisor is a union of coordinate hyperplanes.
    pub fn is_invariant_label(&self, label: &str) -> bool {
        self.label(label)
            .and_then(|l| l.form.as_ref())
            .is_some_and(|f| f.num_terms() == 1)
    }

    /// Exponents of the monomial defining an invariant label.
    fn invariant_exponents(&self, label: &str) -> Vec<u32> {
        self.form(label).as_term().expect("invariant label").0
    }
}

fn order_along(p: &Poly, k: usize) -> i64 {
    p.terms().map(|(m, _)| m[k] as i64).min().unwrap_or(0)
}

impl SectionOracle for ProjectiveSpace {
    fn coordinates(&self) -> &[String] {
        &self.coords
    }

    fn labels(&self) -> &[PrimeDivisorLabel] {
        &self.labels
    }

    fn name(&self) -> String {
        format!("P^{}", self.coords.len() - 1)
    }

    fn section_space(&self, d: &QDivisor) -> Result<SectionSpace> {
        self.check_labels(d)?;
        if !d.is_integral() {
            return Err(Error::NonIntegralDivisor(d.to_string()));
        }
        let deg = self.degree(d)?.to_integer();
        let degree: i64 = (&deg).try_into().expect("degree fits in i64");
        let n = self.coords.len();
        let numerators = if degree < 0 {
            Vec::new()
        } else {
            monomials_of_degree(n, degree as u32)
                .into_iter()
                .map(|m| Poly::monomial(n, m, Rat::from_integer(1.into())))
                .collect()
        };
        Ok(SectionSpace {
            divisor: d.clone(),
            degree,
            numerators,
        })
    }

    fn is_basepoint_free(&self, d: &QDivisor) -> Result<bool> {
        if !d.is_integral() {
            return Err(Error::NonIntegralDivisor(d.to_string()));
        }
        Ok(!self.degree(d)?.is_negative())
    }

    fn linear_equivalence_class(&self, d: &QDivisor) -> Result<Vec<Int>> {
        if !d.is_integral() {
            return Err(Error::NonIntegralDivisor(d.to_string()));
        }
        Ok(vec![self.degree(d)?.to_integer()])
    }

    fn invariantizing_section(&self, d: &QDivisor) -> Result<FunctionFieldElement> {
        self.check_labels(d)?;
        let n = self.coords.len();
        let mut den = Poly::one(n);
        let mut numf = Poly::one(n);
        let mut needed = Int::zero();
        // lower bounds for the monomial exponents on the coordinate hyperplanes
        let mut lower = vec![Int::zero(); n];
        for (name, c) in d.iter() {
            if self.is_invariant_label(name) {
                let e = self.invariant_exponents(name);
                let fl = c.floor().to_integer();
                for (k, &ek) in e.iter().enumerate() {
                    if ek > 0 {
                        lower[k] -= &fl;
                    }
                }
            } else {
                if !c.is_integer() {
                    return Err(Error::NotTMoveable(format!(
                        "non-invariant divisor '{name}' has coefficient {c}"
                    )));
                }
                let a = c.to_integer();
                let g = self.form(name);
                needed += &a * Int::from(g.degree().unwrap());
                let e: u32 = a.abs().try_into().expect("coefficient too large");
                if a.is_positive() {
                    den = den.mul(&g.pow(e));
                } else {
                    numf = numf.mul(&g.pow(e));
                }
            }
        }
        let slack = &needed - lower.iter().sum::<Int>();
        if slack.is_negative() {
            return Err(Error::NotTMoveable(format!("{d} has no sections")));
        }
        let m = balanced_exponents(&lower, &needed);
        let mut num_e = vec![0u32; n];
        let mut den_e = vec![0u32; n];
        for (k, e) in m.iter().enumerate() {
            let v: u32 = e.abs().try_into().expect("exponent too large");
            if e.is_negative() {
                den_e[k] = v;
            } else {
                num_e[k] = v;
            }
        }
        let one = Rat::from_integer(1.into());
        let num = numf.mul(&Poly::monomial(n, num_e, one.clone()));
        let den = den.mul(&Poly::monomial(n, den_e, one));
        Ok(FunctionFieldElement::new(num, den))
    }

    fn invariant_coefficients(&self, d: &QDivisor, s: &FunctionFieldElement) -> Result<Vec<Rat>> {
        self.check_labels(d)?;
        let n = self.coords.len();
        let mut out = vec![Rat::zero(); n];
        for (name, c) in d.iter() {
            if !self.is_invariant_label(name) {
                continue;
            }
            for (k, &e) in self.invariant_exponents(name).iter().enumerate() {
                out[k] += c * Rat::from_integer(Int::from(e));
            }
        }
        for (k, o) in out.iter_mut().enumerate() {
            *o += Rat::from_integer(Int::from(order_along(&s.num, k) - order_along(&s.den, k)));
        }
        Ok(out)
    }

    fn is_big(&self, d: &QDivisor) -> Option<bool> {
        Some(self.degree(d).ok()?.is_positive())
    }
}

/// Integer vector `m >= lower` with the given sum, minimizing the largest
/// entry and, among those, lexicographically largest.
fn balanced_exponents(lower: &[Int], total: &Int) -> Vec<Int> {
    let n = lower.len() as i64;
    let maxl = lower.iter().max().cloned().unwrap_or_else(Int::zero);
    // smallest cap t with sum max(lower_i, t) >= total
    let mut t = maxl.clone();
    let fill = |t: &Int| -> Int { lower.iter().map(|l| l.max(t).clone()).sum() };
    if fill(&t) < *total {
        let base: Int = total.clone() / Int::from(n);
        t = base.max(maxl);
        while fill(&t) < *total {
            t += 1;
        }
    }
    let mut left = total.clone();
    let mut out = Vec::with_capacity(lower.len());
    for i in 0..lower.len() {
        let rest: Int = lower[i + 1..].iter().sum();
        let v = t.clone().min(&left - &rest).max(lower[i].clone());
        left -= &v;
        out.push(v);
    }
    out
}
