use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use super::{FunctionFieldElement, PrimeDivisorLabel, QDivisor, SectionOracle, SectionSpace};
use crate::error::{Error, Result};
use crate::linalg::{kernel_q, rat_from_int, Int, Rat};
use crate::poly::{monomials_of_degree, Monomial, Poly};

/// The blow-up of `P^2` in finitely many points. Curve labels are strict
/// transforms of plane curves; the exceptional curves carry no form.
#[derive(Clone, Debug)]
pub struct BlowupOfP2 {
    coords: Vec<String>,
    points: Vec<Vec<Rat>>,
    labels: Vec<PrimeDivisorLabel>,
    exceptional: Vec<String>,
    mults: BTreeMap<String, Vec<u32>>,
    general: bool,
}

impl BlowupOfP2 {
    /// `curves` are named plane forms; `exceptional` names the curves over
    /// the points, in order.
    pub fn new(
        coords: Vec<String>,
        points: Vec<Vec<Rat>>,
        exceptional: Vec<String>,
        curves: Vec<(String, Poly)>,
    ) -> Result<Self> {
        if coords.len() != 3 {
            return Err(Error::DimensionMismatch {
                expected: 3,
                found: coords.len(),
            });
        }
        if exceptional.len() != points.len() {
            return Err(Error::Invalid(
                "one exceptional divisor name per point is required".into(),
            ));
        }
        for p in &points {
            if p.len() != 3 || p.iter().all(Zero::is_zero) {
                return Err(Error::Invalid("points need three coordinates, not all zero".into()));
            }
        }
        let mut labels = Vec::new();
        let mut mults = BTreeMap::new();
        for (name, form) in curves {
            if form.nvars() != 3 || !form.is_homogeneous() || form.degree().unwrap_or(0) == 0 {
                return Err(Error::Invalid(format!(
                    "divisor '{name}' needs a nonconstant homogeneous form"
                )));
            }
            let m: Vec<u32> = points.iter().map(|p| form.multiplicity_at(p)).collect();
            mults.insert(name.clone(), m);
            labels.push(PrimeDivisorLabel {
                name,
                form: Some(form.monic()),
            });
        }
        for e in &exceptional {
            labels.push(PrimeDivisorLabel {
                name: e.clone(),
                form: None,
            });
        }
        let mut names: Vec<&String> = labels.iter().map(|l| &l.name).collect();
        names.sort();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Invalid("duplicate divisor names".into()));
        }
        let general = in_general_position(&points);
        Ok(BlowupOfP2 {
            coords,
            points,
            labels,
            exceptional,
            mults,
            general,
        })
    }

    pub fn points(&self) -> &[Vec<Rat>] {
        &self.points
    }

    pub fn exceptional(&self) -> &[String] {
        &self.exceptional
    }

    /// Class of a divisor in the basis `(H, E_1, ..., E_n)`.
    pub fn class_of(&self, d: &QDivisor) -> Result<Vec<Rat>> {
        self.check_labels(d)?;
        let n = self.points.len();
        let mut c = vec![Rat::zero(); n + 1];
        for (name, a) in d.iter() {
            if let Some(i) = self.exceptional.iter().position(|e| e == name) {
                c[i + 1] += a;
            } else {
                let l = self.label(name).unwrap();
                let g = l.form.as_ref().unwrap();
                c[0] += a * Rat::from_integer(Int::from(g.degree().unwrap()));
                for (i, &m) in self.mults[name].iter().enumerate() {
                    c[i + 1] -= a * Rat::from_integer(Int::from(m));
                }
            }
        }
        Ok(c)
    }

    pub fn intersection(a: &[Rat], b: &[Rat]) -> Rat {
        let mut s = &a[0] * &b[0];
        for (x, y) in a[1..].iter().zip(&b[1..]) {
            s -= x * y;
        }
        s
    }

    /// `chi(c) = (c^2 - c.K)/2 + 1` with `K = -3H + sum E_i`.
    pub fn euler_characteristic(class: &[Int]) -> Int {
        let c: Vec<Rat> = class.iter().map(rat_from_int).collect();
        let mut k = vec![Rat::one(); class.len()];
        k[0] = Rat::from_integer(Int::from(-3));
        let v = (Self::intersection(&c, &c) - Self::intersection(&c, &k)) / Rat::from_integer(Int::from(2))
            + Rat::one();
        v.to_integer()
    }

    /// Classes generating the effective cone (for at most four points in
    /// general position): exceptional curves, lines through two points, and
    /// for fewer than two points a line through the remaining ones.
    fn extremal_curves(&self) -> Vec<Vec<Rat>> {
        let n = self.points.len();
        let one = Rat::one();
        let mut out = Vec::new();
        for i in 0..n {
            let mut c = vec![Rat::zero(); n + 1];
            c[i + 1] = one.clone();
            out.push(c);
        }
        for i in 0..n {
            for j in i + 1..n {
                let mut c = vec![Rat::zero(); n + 1];
                c[0] = one.clone();
                c[i + 1] = -one.clone();
                c[j + 1] = -one.clone();
                out.push(c);
            }
        }
        if n <= 1 {
            let mut c = vec![Rat::zero(); n + 1];
            c[0] = one.clone();
            if n == 1 {
                c[1] = -one;
            }
            out.push(c);
        }
        out
    }

    fn is_nef(&self, class: &[Rat]) -> Result<bool> {
        if !self.general || self.points.len() > 4 {
            return Err(Error::UnsupportedBackend(
                "nefness is decided only for at most four points in general position".into(),
            ));
        }
        Ok(self
            .extremal_curves()
            .iter()
            .all(|c| !Self::intersection(class, c).is_negative()))
    }

    /// Total transform of a divisor on `P^2` whose labels are curve labels.
    pub fn pullback(&self, d: &QDivisor) -> Result<QDivisor> {
        self.check_labels(d)?;
        let mut out = d.clone();
        for (name, a) in d.iter() {
            let Some(m) = self.mults.get(name) else {
                return Err(Error::Invalid(format!("'{name}' is not a plane curve")));
            };
            for (i, &mi) in m.iter().enumerate() {
                out.add_term(&self.exceptional[i], &(a * Rat::from_integer(Int::from(mi))));
            }
        }
        Ok(out)
    }
}

fn in_general_position(points: &[Vec<Rat>]) -> bool {
    let n = points.len();
    let rank = |rows: &[&Vec<Rat>]| crate::linalg::rank_q(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>(), 3);
    for i in 0..n {
        for j in i + 1..n {
            if rank(&[&points[i], &points[j]]) < 2 {
                return false;
            }
            for k in j + 1..n {
                if rank(&[&points[i], &points[j], &points[k]]) < 3 {
                    return false;
                }
            }
        }
    }
    true
}

fn falling(m: u32, b: u32) -> Int {
    (0..b).fold(Int::one(), |acc, i| acc * Int::from(m - i))
}

/// Value at `p` of the partial derivative `d^beta` of the monomial `x^m`.
fn monomial_derivative_at(m: &Monomial, beta: &Monomial, p: &[Rat]) -> Rat {
    let mut v = Rat::one();
    for ((&mi, &bi), x) in m.iter().zip(beta).zip(p) {
        if bi > mi {
            return Rat::zero();
        }
        v *= Rat::from_integer(falling(mi, bi));
        let e = mi - bi;
        if e > 0 {
            if x.is_zero() {
                return Rat::zero();
            }
            v *= num_traits::pow(x.clone(), e as usize);
        }
    }
    v
}

impl SectionOracle for BlowupOfP2 {
    fn coordinates(&self) -> &[String] {
        &self.coords
    }

    fn labels(&self) -> &[PrimeDivisorLabel] {
        &self.labels
    }

    fn name(&self) -> String {
        format!("Bl_{} P^2", self.points.len())
    }

    fn section_space(&self, d: &QDivisor) -> Result<SectionSpace> {
        self.check_labels(d)?;
        if !d.is_integral() {
            return Err(Error::NonIntegralDivisor(d.to_string()));
        }
        let n = self.points.len();
        let mut degree = Int::zero();
        let mut order = vec![Int::zero(); n];
        for (name, a) in d.iter() {
            let a = a.to_integer();
            if let Some(i) = self.exceptional.iter().position(|e| e == name) {
                order[i] -= &a;
            } else {
                let g = self.label(name).unwrap().form.as_ref().unwrap();
                degree += &a * Int::from(g.degree().unwrap());
                for (i, &m) in self.mults[name].iter().enumerate() {
                    order[i] += &a * Int::from(m);
                }
            }
        }
        let degree: i64 = (&degree).try_into().expect("degree fits in i64");
        let empty = SectionSpace {
            divisor: d.clone(),
            degree,
            numerators: Vec::new(),
        };
        if degree < 0 {
            return Ok(empty);
        }
        let monos = monomials_of_degree(3, degree as u32);
        let mut rows: Vec<Vec<Rat>> = Vec::new();
        for (p, r) in self.points.iter().zip(&order) {
            if !r.is_positive() {
                continue;
            }
            if *r > Int::from(degree) {
                return Ok(empty);
            }
            let r: u32 = r.try_into().unwrap();
            // vanishing of all partials of order r-1 forces multiplicity r
            for beta in monomials_of_degree(3, r - 1) {
                rows.push(monos.iter().map(|m| monomial_derivative_at(m, &beta, p)).collect());
            }
        }
        let kernel = if rows.is_empty() {
            (0..monos.len())
                .map(|i| {
                    let mut v = vec![Rat::zero(); monos.len()];
                    v[i] = Rat::one();
                    v
                })
                .collect()
        } else {
            kernel_q(&rows, monos.len())
        };
        let numerators = kernel
            .into_iter()
            .map(|v| {
                let mut f = Poly::zero(3);
                for (c, m) in v.into_iter().zip(&monos) {
                    f = f.add(&Poly::monomial(3, m.clone(), c));
                }
                f
            })
            .collect();
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
        let c = self.class_of(d)?;
        self.is_nef(&c)
    }

    fn linear_equivalence_class(&self, d: &QDivisor) -> Result<Vec<Int>> {
        if !d.is_integral() {
            return Err(Error::NonIntegralDivisor(d.to_string()));
        }
        Ok(self.class_of(d)?.into_iter().map(|c| c.to_integer()).collect())
    }

    fn invariantizing_section(&self, d: &QDivisor) -> Result<FunctionFieldElement> {
        if d.is_zero() {
            return Ok(FunctionFieldElement::one(3));
        }
        Err(Error::UnsupportedBackend(
            "the blow-up backend carries no torus action".into(),
        ))
    }

    fn is_big(&self, d: &QDivisor) -> Option<bool> {
        let c = self.class_of(d).ok()?;
        let nef = self.is_nef(&c).ok()?;
        let sq = Self::intersection(&c, &c);
        match (nef, sq.is_positive()) {
            (true, b) => Some(b),
            (false, _) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    fn s5() -> BlowupOfP2 {
        let names: Vec<String> = ["x0", "x1", "x2"].iter().map(|s| s.to_string()).collect();
        let p = |s: &str| Poly::parse(s, &names).unwrap();
        let pts = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]]
            .iter()
            .map(|v| v.iter().map(|&a| rat(a, 1)).collect())
            .collect();
        BlowupOfP2::new(
            names.clone(),
            pts,
            vec!["E1".into(), "E2".into(), "E3".into(), "E4".into()],
            vec![
                ("H".into(), p("x0 - x1 + x2")),
                ("E12".into(), p("x2")),
                ("E14".into(), p("x1 - x2")),
            ],
        )
        .unwrap()
    }

    #[test]
    fn sections_of_h_minus_e1() {
        let y = s5();
        let d = QDivisor::from_pairs([("H", rat(1, 1)), ("E1", rat(-1, 1))]);
        let sp = y.section_space(&d).unwrap();
        assert_eq!(sp.dim(), 2);
        assert!(y.is_basepoint_free(&d).unwrap());
        let e1 = QDivisor::from_pairs([("E1", rat(1, 1))]);
        assert!(!y.is_basepoint_free(&e1).unwrap());
    }

    #[test]
    fn classes() {
        let y = s5();
        let e12 = QDivisor::from_pairs([("E12", rat(1, 1))]);
        let i = |v: &[i64]| v.iter().map(|&a| Int::from(a)).collect::<Vec<_>>();
        assert_eq!(y.linear_equivalence_class(&e12).unwrap(), i(&[1, -1, -1, 0, 0]));
        assert_eq!(y.linear_equivalence_class(&QDivisor::zero()).unwrap(), i(&[0; 5]));
        assert_eq!(BlowupOfP2::euler_characteristic(&i(&[1, -1, 0, 0, 0])), Int::from(2));
        assert_eq!(BlowupOfP2::euler_characteristic(&i(&[2, -2, 0, 0, 0])), Int::from(3));
    }

    #[test]
    fn pullback_of_line_through_two_points() {
        let y = s5();
        let d = QDivisor::from_pairs([("E12", rat(1, 1))]);
        let pb = y.pullback(&d).unwrap();
        assert_eq!(pb.to_string(), "1 E1 + 1 E12 + 1 E2");
        let h = QDivisor::from_pairs([("H", rat(1, 1))]);
        assert_eq!(y.pullback(&h).unwrap(), h);
    }
}
