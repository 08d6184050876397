use super::{FunctionFieldElement, PrimeDivisorLabel, QDivisor, SectionOracle, SectionSpace};
use crate::error::Result;
use crate::linalg::{Int, Rat};
use crate::poly::Poly;

/// `Y` a point: no prime divisors, and the sections of the zero divisor are
/// the constants.
#[derive(Clone, Debug, Default)]
pub struct PointBase;

impl SectionOracle for PointBase {
    fn coordinates(&self) -> &[String] {
        &[]
    }

    fn labels(&self) -> &[PrimeDivisorLabel] {
        &[]
    }

    fn name(&self) -> String {
        "point".into()
    }

    fn section_space(&self, d: &QDivisor) -> Result<SectionSpace> {
        self.check_labels(d)?;
        Ok(SectionSpace {
            divisor: d.clone(),
            degree: 0,
            numerators: vec![Poly::one(0)],
        })
    }

    fn is_basepoint_free(&self, d: &QDivisor) -> Result<bool> {
        self.check_labels(d)?;
        Ok(true)
    }

    fn linear_equivalence_class(&self, d: &QDivisor) -> Result<Vec<Int>> {
        self.check_labels(d)?;
        Ok(Vec::new())
    }

    fn invariantizing_section(&self, d: &QDivisor) -> Result<FunctionFieldElement> {
        self.check_labels(d)?;
        Ok(FunctionFieldElement::one(0))
    }

    fn invariant_coefficients(&self, _d: &QDivisor, _s: &FunctionFieldElement) -> Result<Vec<Rat>> {
        Ok(Vec::new())
    }

    fn is_big(&self, _d: &QDivisor) -> Option<bool> {
        Some(true)
    }
}
