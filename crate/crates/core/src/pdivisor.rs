//! Polyhedral divisors: evaluation, linearity subdivision, restriction and
//! validity checks.

use std::collections::BTreeMap;
use std::fmt;

use crate::cone::QCone;
use crate::error::{Error, Result};
use crate::linalg::{dot_q, to_rat_vec, Int, QVector, Rat};
use crate::polyhedron::TailedPolyhedron;
use crate::subdivision::{common_refinement, PolyhedralSubdivision};
use crate::variety::{QDivisor, SectionOracle};

/// `sum_P D_P (x) P` with every tail equal to the dual of the weight cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PDivisor {
    omega: QCone,
    coeffs: BTreeMap<String, TailedPolyhedron>,
}

/// Cells on which the p-divisor is linear, with the minimizing vertex of
/// every coefficient on each cell.
#[derive(Clone, Debug)]
pub struct LinearityDomain {
    pub subdivision: PolyhedralSubdivision,
    pub forms: Vec<BTreeMap<String, QVector>>,
}

impl LinearityDomain {
    pub fn cells(&self) -> &[QCone] {
        self.subdivision.cells()
    }

    pub fn rays(&self) -> Vec<Vec<Int>> {
        self.subdivision.rays()
    }

    /// The linear expression of cell `i` at `u`.
    pub fn evaluate_on_cell(&self, i: usize, u: &[Rat]) -> QDivisor {
        QDivisor::from_pairs(self.forms[i].iter().map(|(n, v)| (n.clone(), dot_q(&v.0, u))))
    }
}

impl PDivisor {
    pub fn new(omega: QCone, coeffs: Vec<(String, TailedPolyhedron)>) -> Result<Self> {
        let tail = omega.dual();
        let mut map = BTreeMap::new();
        for (name, p) in coeffs {
            if p.ambient_dim() != omega.ambient_dim() {
                return Err(Error::DimensionMismatch {
                    expected: omega.ambient_dim(),
                    found: p.ambient_dim(),
                });
            }
            if *p.tail() != tail {
                return Err(Error::Invalid(format!(
                    "coefficient of '{name}' has tail {:?}, expected {:?}",
                    p.tail(),
                    tail
                )));
            }
            if map.insert(name.clone(), p).is_some() {
                return Err(Error::Invalid(format!("duplicate coefficient for '{name}'")));
            }
        }
        Ok(PDivisor { omega, coeffs: map })
    }

    pub fn omega(&self) -> &QCone {
        &self.omega
    }

    pub fn rank(&self) -> usize {
        self.omega.ambient_dim()
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (&String, &TailedPolyhedron)> {
        self.coeffs.iter()
    }

    pub fn coefficient(&self, label: &str) -> Option<&TailedPolyhedron> {
        self.coeffs.get(label)
    }

    /// `D(u) = sum_P min<D_P, u> P`.
    pub fn evaluate(&self, u: &[Rat]) -> Result<QDivisor> {
        if u.len() != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                found: u.len(),
            });
        }
        if !self.omega.contains_q(u) {
            return Err(Error::WeightOutsideCone(QVector(u.to_vec()).to_string()));
        }
        let mut d = QDivisor::zero();
        for (name, p) in &self.coeffs {
            let v = p.support(u).expect("u lies in the dual of the tail");
            d.add_term(name, &v);
        }
        Ok(d)
    }

    pub fn evaluate_int(&self, u: &[Int]) -> Result<QDivisor> {
        self.evaluate(&to_rat_vec(u))
    }

    /// Coarsest common refinement of the normal fans of the coefficients.
    pub fn linearity_subdivision(&self) -> LinearityDomain {
        let fans: Vec<PolyhedralSubdivision> = self
            .coeffs
            .values()
            .filter(|p| p.vertices().len() > 1)
            .map(|p| p.normal_fan())
            .collect();
        let subdivision = common_refinement(&fans, &self.omega);
        let forms = subdivision
            .cells()
            .iter()
            .map(|c| {
                let w = to_rat_vec(&c.interior_point());
                self.coeffs
                    .iter()
                    .map(|(n, p)| {
                        let i = p.minimizing_vertex(&w).expect("coefficient has a vertex");
                        (n.clone(), p.vertices()[i].clone())
                    })
                    .collect()
            })
            .collect();
        LinearityDomain { subdivision, forms }
    }

    /// The p-divisor on a subcone `C` of the weight cone.
    pub fn restrict(&self, c: &QCone) -> Result<PDivisor> {
        if !self.omega.contains_cone(c) {
            return Err(Error::NotSubcone);
        }
        let tail = c.dual();
        let coeffs = self
            .coeffs
            .iter()
            .map(|(n, p)| (n.clone(), TailedPolyhedron::new(p.vertices().to_vec(), tail.clone())))
            .collect();
        PDivisor::new(c.clone(), coeffs)
    }

    /// Semiampleness at the rays of the linearity subdivision and bigness at
    /// one interior point per cell.
    pub fn validate(&self, y: &dyn SectionOracle) -> ValidationReport {
        let mut checks = Vec::new();
        let dom = self.linearity_subdivision();
        for r in dom.rays() {
            let d = self.evaluate_int(&r).expect("ray lies in the weight cone");
            let k = d.denominator_lcm();
            let mut verdict = Verdict::Fail;
            for j in 1..=4u32 {
                let m = Rat::from_integer(&k * Int::from(j));
                match y.is_basepoint_free(&d.scale(&m)) {
                    Ok(true) => {
                        verdict = Verdict::Pass;
                        break;
                    }
                    Ok(false) => {}
                    Err(_) => {
                        verdict = Verdict::Unverifiable;
                        break;
                    }
                }
            }
            checks.push(Check {
                name: format!("semiample at ray {}", crate::linalg::fmt_int_vec(&r)),
                verdict,
            });
        }
        for (i, cell) in dom.cells().iter().enumerate() {
            let w = cell.interior_point();
            let d = self.evaluate_int(&w).expect("cell lies in the weight cone");
            let verdict = match y.is_big(&d) {
                Some(true) => Verdict::Pass,
                Some(false) => Verdict::Fail,
                None => Verdict::Unverifiable,
            };
            checks.push(Check {
                name: format!("big on cell {i}"),
                verdict,
            });
        }
        ValidationReport { checks }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Unverifiable,
}

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub verdict: Verdict,
}

#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn has_failures(&self) -> bool {
        self.checks.iter().any(|c| c.verdict == Verdict::Fail)
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.verdict == Verdict::Pass)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let v = match c.verdict {
                Verdict::Pass => "pass",
                Verdict::Fail => "FAIL",
                Verdict::Unverifiable => "UNVERIFIABLE",
            };
            writeln!(f, "{}: {v}", c.name)?;
        }
        Ok(())
    }
}
