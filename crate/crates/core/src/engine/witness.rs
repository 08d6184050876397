//! Certificates that the coordinate ratios of the base lie in the degree-zero
//! part of the quotient field of the collected elements.

use num_traits::{One, Zero};

use super::algebra::GradedElement;
use crate::linalg::{hnf, kernel_lattice, lattice_coords, Int, IntMatrix};
use crate::poly::Poly;
use crate::variety::SectionOracle;

/// `x_i / x_last = prod elements[k]^{e_k}` for every coordinate `x_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientWitness {
    /// `(i, exponents)` with sparse exponents `(element index, e)`.
    pub ratios: Vec<(usize, Vec<(usize, Int)>)>,
    /// False when some ratio was not found.
    pub complete: bool,
}

impl QuotientWitness {
    pub fn uses(&self, k: usize) -> bool {
        self.ratios.iter().any(|(_, e)| e.iter().any(|(j, _)| *j == k))
    }

    pub fn display(&self, names: &[String], symbol: impl Fn(usize) -> String) -> Vec<String> {
        let last = names.last().cloned().unwrap_or_default();
        self.ratios
            .iter()
            .map(|(i, e)| {
                let rhs: Vec<String> = e.iter().map(|(k, x)| format!("{}^{}", symbol(*k), x)).collect();
                format!("{}/{} = {}", names[*i], last, rhs.join(" * "))
            })
            .collect()
    }
}

/// Irreducible factors used to read off exponents: the coordinates and the
/// non-monomial label forms.
pub struct Atoms {
    nvars: usize,
    forms: Vec<Poly>,
}

impl Atoms {
    pub fn new(y: &dyn SectionOracle) -> Self {
        let mut forms: Vec<Poly> = Vec::new();
        for l in y.labels() {
            if let Some(f) = &l.form {
                if f.num_terms() > 1 && !forms.contains(f) {
                    forms.push(f.clone());
                }
            }
        }
        Atoms {
            nvars: y.nvars(),
            forms,
        }
    }

    pub fn len(&self) -> usize {
        self.nvars + self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Exponents of `p = c * prod atoms^e`, if `p` factors that way.
    pub fn factor(&self, p: &Poly) -> Option<Vec<Int>> {
        if p.is_zero() {
            return None;
        }
        let mut e = vec![Int::zero(); self.len()];
        let mut rest = p.clone();
        for (k, g) in self.forms.iter().enumerate() {
            while rest.num_terms() > 1 {
                match rest.exact_div(g) {
                    Some(q) => {
                        rest = q;
                        e[self.nvars + k] += 1;
                    }
                    None => break,
                }
            }
        }
        let (m, _) = rest.as_term()?;
        for (i, x) in m.iter().enumerate() {
            e[i] += Int::from(*x);
        }
        Some(e)
    }

    pub fn exponents(&self, g: &GradedElement) -> Option<Vec<Int>> {
        let a = self.factor(&g.section.num)?;
        let b = self.factor(&g.section.den)?;
        Some(a.iter().zip(&b).map(|(x, y)| x - y).collect())
    }
}

/// Searches integer combinations of weight zero whose atom exponents equal
/// `e_{x_i} - e_{x_last}`.
pub fn find_witness(y: &dyn SectionOracle, elements: &[GradedElement]) -> QuotientWitness {
    let n = y.nvars();
    if n <= 1 {
        return QuotientWitness {
            ratios: Vec::new(),
            complete: true,
        };
    }
    let atoms = Atoms::new(y);
    let mut idx = Vec::new();
    let mut exps = Vec::new();
    for (k, g) in elements.iter().enumerate() {
        if let Some(e) = atoms.exponents(g) {
            idx.push(k);
            exps.push(e);
        }
    }
    let failed = QuotientWitness {
        ratios: Vec::new(),
        complete: false,
    };
    if idx.is_empty() {
        return failed;
    }
    let r = elements[0].weight.len();
    let mut w = IntMatrix::zeros(r, idx.len());
    for (c, &k) in idx.iter().enumerate() {
        for i in 0..r {
            w[(i, c)] = elements[k].weight[i].clone();
        }
    }
    let ker = kernel_lattice(&w);
    if ker.nrows() == 0 {
        return failed;
    }
    // images of the kernel generators in atom exponent space
    let images: Vec<Vec<Int>> = ker
        .rows()
        .map(|kv| {
            (0..atoms.len())
                .map(|a| kv.iter().zip(&exps).map(|(c, e)| c * &e[a]).sum())
                .collect()
        })
        .collect();
    let a = IntMatrix::from_rows(atoms.len(), &images);
    let (h, u) = hnf(&a);
    let mut ratios = Vec::new();
    for i in 0..n - 1 {
        let mut t = vec![Int::zero(); atoms.len()];
        t[i] = Int::one();
        t[n - 1] = -Int::one();
        let Ok(Some(yc)) = lattice_coords(&t, &h) else {
            return failed;
        };
        // t = yc * H = (yc * U) * A
        let lam: Vec<Int> = (0..u.ncols())
            .map(|j| yc.iter().enumerate().map(|(r, y)| y * &u[(r, j)]).sum())
            .collect();
        let mut c = vec![Int::zero(); idx.len()];
        for (j, l) in lam.iter().enumerate() {
            if l.is_zero() {
                continue;
            }
            for (x, kv) in c.iter_mut().zip(ker.row(j)) {
                *x += l * kv;
            }
        }
        let sparse = c
            .into_iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(j, x)| (idx[j], x))
            .collect();
        ratios.push((i, sparse));
    }
    QuotientWitness {
        ratios,
        complete: true,
    }
}
