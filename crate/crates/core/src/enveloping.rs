//! Universal enveloping algebra with PBW normal ordering.
//!
//! Elements are finite sums of PBW monomials `X₁^{e₁}⋯X_n^{e_n}` with
//! coefficients in ℚ(√2)(i). Products are reduced by the rewriting rule
//! `X_j X_i → X_i X_j + [X_j, X_i]` for `j > i`. The integer-valued
//! monomial multiplication table is memoized per algebra.

use crate::error::{Error, Result};
use crate::exact_matrix::ExactMatrix;
use crate::graded_lie::{GradedAutomorphism, GradedLieAlgebra};
use crate::scalar::{ExactScalar, Q};
use num_traits::{One, Zero};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

pub const MAX_GENERATORS: usize = 12;

/// Exponent vector of a PBW monomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Mono(pub [u8; MAX_GENERATORS]);

impl Mono {
    pub fn one() -> Self {
        Mono([0; MAX_GENERATORS])
    }
    pub fn generator(j: usize) -> Self {
        let mut m = Self::one();
        m.0[j] = 1;
        m
    }
    pub fn from_exponents(e: &[u8]) -> Self {
        let mut m = Self::one();
        m.0[..e.len()].copy_from_slice(e);
        m
    }
    /// Generator indices of the monomial, in PBW order.
    pub fn word(&self) -> Vec<usize> {
        let mut w = Vec::new();
        for (j, &e) in self.0.iter().enumerate() {
            w.extend(std::iter::repeat(j).take(e as usize));
        }
        w
    }
    pub fn len(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
    fn last_generator(&self) -> Option<usize> {
        self.0.iter().rposition(|&e| e > 0)
    }
}

type Table = Arc<Vec<(Mono, Q)>>;

/// Multiplication context for U(L).
pub struct Enveloping {
    pub algebra: GradedLieAlgebra,
    mono_gen: Mutex<HashMap<(Mono, u8), Table>>,
    mono_mono: Mutex<HashMap<(Mono, Mono), Table>>,
}

impl fmt::Debug for Enveloping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Enveloping({})", self.algebra.name)
    }
}

fn accumulate(acc: &mut HashMap<Mono, Q>, m: Mono, c: Q) {
    let e = acc.entry(m).or_insert_with(Q::zero);
    *e += c;
}

fn finish(acc: HashMap<Mono, Q>) -> Table {
    let mut v: Vec<(Mono, Q)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    v.sort_by(|a, b| a.0.cmp(&b.0));
    Arc::new(v)
}

impl Enveloping {
    pub fn new(algebra: GradedLieAlgebra) -> Result<Self> {
        if algebra.dim() > MAX_GENERATORS {
            return Err(Error::Unsupported(format!(
                "enveloping algebra limited to {MAX_GENERATORS} generators"
            )));
        }
        Ok(Self { algebra, mono_gen: Mutex::new(HashMap::new()), mono_mono: Mutex::new(HashMap::new()) })
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    /// Normal form of `m · X_j`.
    fn mul_mono_gen(&self, m: &Mono, j: usize) -> Table {
        if let Some(t) = self.mono_gen.lock().unwrap().get(&(*m, j as u8)) {
            return t.clone();
        }
        let out = match m.last_generator() {
            Some(k) if k > j => {
                // m = p X_k, and p X_k X_j = (p X_j) X_k + p [X_k, X_j].
                let mut p = *m;
                p.0[k] -= 1;
                let mut acc = HashMap::new();
                for (t, c) in self.mul_mono_gen(&p, j).iter() {
                    for (u, d) in self.mul_mono_gen(t, k).iter() {
                        accumulate(&mut acc, *u, c * d);
                    }
                }
                for (l, c) in &self.algebra.bracket[k][j] {
                    for (u, d) in self.mul_mono_gen(&p, *l).iter() {
                        accumulate(&mut acc, *u, c * d);
                    }
                }
                finish(acc)
            }
            _ => {
                let mut r = *m;
                r.0[j] += 1;
                Arc::new(vec![(r, Q::one())])
            }
        };
        self.mono_gen.lock().unwrap().insert((*m, j as u8), out.clone());
        out
    }

    /// Normal form of `m₁ · m₂`.
    pub fn mul_mono(&self, a: &Mono, b: &Mono) -> Table {
        if b.is_empty() {
            return Arc::new(vec![(*a, Q::one())]);
        }
        if a.is_empty() {
            return Arc::new(vec![(*b, Q::one())]);
        }
        if let Some(t) = self.mono_mono.lock().unwrap().get(&(*a, *b)) {
            return t.clone();
        }
        let mut cur: HashMap<Mono, Q> = HashMap::from([(*a, Q::one())]);
        for g in b.word() {
            let mut next = HashMap::new();
            for (m, c) in &cur {
                for (u, d) in self.mul_mono_gen(m, g).iter() {
                    accumulate(&mut next, *u, c * d);
                }
            }
            cur = next;
        }
        let out = finish(cur);
        self.mono_mono.lock().unwrap().insert((*a, *b), out.clone());
        out
    }

    pub fn mul(&self, x: &UEAElement, y: &UEAElement) -> UEAElement {
        let mut acc: HashMap<Mono, ExactScalar> = HashMap::new();
        for (m1, c1) in &x.terms {
            for (m2, c2) in &y.terms {
                let c = c1 * c2;
                for (u, k) in self.mul_mono(m1, m2).iter() {
                    let v = if k.is_one() { c.clone() } else { c.scale_q(k) };
                    *acc.entry(*u).or_insert_with(ExactScalar::zero) += &v;
                }
            }
        }
        UEAElement::from_map(acc)
    }

    pub fn generator(&self, j: usize) -> UEAElement {
        UEAElement::monomial(Mono::generator(j), ExactScalar::one())
    }

    /// Element from a word of generators, e.g. `[1,0]` is X₂X₁, normal ordered.
    pub fn word(&self, w: &[usize]) -> UEAElement {
        let mut x = UEAElement::one();
        for &g in w {
            x = self.mul(&x, &self.generator(g));
        }
        x
    }

    /// Formal adjoint: reversed factor order, X_j ↦ −X_j, conjugated coefficients.
    pub fn formal_adjoint(&self, x: &UEAElement) -> UEAElement {
        let mut out = UEAElement::zero();
        for (m, c) in &x.terms {
            let mut w = m.word();
            w.reverse();
            let mut coef = c.conj();
            if w.len() % 2 == 1 {
                coef = -coef;
            }
            out = out.add(&self.word(&w).scale(&coef));
        }
        out
    }

    /// Left action of a graded automorphism, X_j ↦ Σ_k φ_{kj} X_k.
    pub fn apply_automorphism(&self, phi: &GradedAutomorphism, x: &UEAElement) -> UEAElement {
        let n = self.dim();
        let images: Vec<UEAElement> = (0..n)
            .map(|j| {
                let mut img = UEAElement::zero();
                for k in 0..n {
                    let c = &phi.full_matrix[k][j];
                    if !c.is_zero() {
                        img = img.add(&self.generator(k).scale(&ExactScalar::rational(c.clone())));
                    }
                }
                img
            })
            .collect();
        let mut out = UEAElement::zero();
        for (m, c) in &x.terms {
            let mut t = UEAElement::one();
            for g in m.word() {
                t = self.mul(&t, &images[g]);
            }
            out = out.add(&t.scale(c));
        }
        out
    }

    pub fn homogeneity_degree(&self, x: &UEAElement) -> Homogeneity {
        let mut deg: Option<u32> = None;
        for m in x.terms.keys() {
            let d: u32 = (0..self.dim()).map(|j| m.0[j] as u32 * self.algebra.weight(j)).sum();
            match deg {
                None => deg = Some(d),
                Some(e) if e != d => return Homogeneity::Inhomogeneous,
                _ => {}
            }
        }
        deg.map_or(Homogeneity::Zero, Homogeneity::Degree)
    }

    /// Number of cached monomial products; diagnostic only.
    pub fn cache_size(&self) -> usize {
        self.mono_mono.lock().unwrap().len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Homogeneity {
    /// The zero element, homogeneous of every degree.
    Zero,
    Degree(u32),
    Inhomogeneous,
}

/// PBW-normal-ordered element of U(L).
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct UEAElement {
    pub terms: BTreeMap<Mono, ExactScalar>,
}

impl UEAElement {
    pub fn zero() -> Self {
        Self::default()
    }
    pub fn one() -> Self {
        Self::monomial(Mono::one(), ExactScalar::one())
    }
    pub fn constant(c: ExactScalar) -> Self {
        Self::monomial(Mono::one(), c)
    }
    pub fn monomial(m: Mono, c: ExactScalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Self { terms }
    }
    fn from_map(acc: HashMap<Mono, ExactScalar>) -> Self {
        Self { terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }
    /// Builds Σ c·X_{word} from PBW-ordered exponent vectors.
    pub fn from_terms(terms: &[(&[u8], ExactScalar)]) -> Self {
        let mut out = Self::zero();
        for (e, c) in terms {
            out = out.add(&Self::monomial(Mono::from_exponents(e), c.clone()));
        }
        out
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn add(&self, o: &UEAElement) -> UEAElement {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            let e = out.terms.entry(*m).or_insert_with(ExactScalar::zero);
            *e += c;
            if e.is_zero() {
                out.terms.remove(m);
            }
        }
        out
    }
    pub fn sub(&self, o: &UEAElement) -> UEAElement {
        self.add(&o.neg())
    }
    pub fn neg(&self) -> UEAElement {
        Self { terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect() }
    }
    pub fn scale(&self, s: &ExactScalar) -> UEAElement {
        if s.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(m, c)| (*m, c * s)).collect() }
    }
    /// Longest monomial (number of generator factors).
    pub fn max_length(&self) -> usize {
        self.terms.keys().map(|m| m.len()).max().unwrap_or(0)
    }
}

impl fmt::Display for UEAElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let w: String = m.word().iter().map(|g| (g + 1).to_string()).collect();
                if w.is_empty() {
                    c.to_string()
                } else {
                    format!("({c})X{w}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Matrix with entries in U(L), stored row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpPolyMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<UEAElement>,
}

impl OpPolyMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![UEAElement::zero(); rows * cols] }
    }
    pub fn from_rows(rows: Vec<Vec<UEAElement>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Self { rows: r, cols: c, entries: rows.into_iter().flatten().collect() }
    }
    pub fn get(&self, i: usize, j: usize) -> &UEAElement {
        &self.entries[i * self.cols + j]
    }
    pub fn set(&mut self, i: usize, j: usize, v: UEAElement) {
        self.entries[i * self.cols + j] = v;
    }
    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }
    /// Positions and values of nonzero entries.
    pub fn nonzero_entries(&self) -> Vec<(usize, usize, UEAElement)> {
        let mut out = Vec::new();
        for i in 0..self.rows {
            for j in 0..self.cols {
                if !self.get(i, j).is_zero() {
                    out.push((i, j, self.get(i, j).clone()));
                }
            }
        }
        out
    }
    pub fn mul(&self, o: &OpPolyMatrix, env: &Enveloping) -> OpPolyMatrix {
        assert_eq!(self.cols, o.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut s = UEAElement::zero();
                for k in 0..self.cols {
                    let (a, b) = (self.get(i, k), o.get(k, j));
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    s = s.add(&env.mul(a, b));
                }
                out.set(i, j, s);
            }
        }
        out
    }
    pub fn add(&self, o: &OpPolyMatrix) -> OpPolyMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&o.entries).map(|(a, b)| a.add(b)).collect(),
        }
    }
    pub fn sub(&self, o: &OpPolyMatrix) -> OpPolyMatrix {
        self.add(&o.neg())
    }
    pub fn neg(&self) -> OpPolyMatrix {
        Self { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|a| a.neg()).collect() }
    }
    pub fn scale(&self, s: &ExactScalar) -> OpPolyMatrix {
        Self { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|a| a.scale(s)).collect() }
    }
    /// Scalar matrix times polynomial matrix.
    pub fn left_scalar(&self, m: &ExactMatrix) -> OpPolyMatrix {
        assert_eq!(m.cols, self.rows);
        let mut out = Self::zeros(m.rows, self.cols);
        for i in 0..m.rows {
            for j in 0..self.cols {
                let mut s = UEAElement::zero();
                for k in 0..m.cols {
                    if !m.get(i, k).is_zero() {
                        s = s.add(&self.get(k, j).scale(m.get(i, k)));
                    }
                }
                out.set(i, j, s);
            }
        }
        out
    }
    /// Polynomial matrix times scalar matrix.
    pub fn right_scalar(&self, m: &ExactMatrix) -> OpPolyMatrix {
        assert_eq!(self.cols, m.rows);
        let mut out = Self::zeros(self.rows, m.cols);
        for i in 0..self.rows {
            for j in 0..m.cols {
                let mut s = UEAElement::zero();
                for k in 0..self.cols {
                    if !m.get(k, j).is_zero() {
                        s = s.add(&self.get(i, k).scale(m.get(k, j)));
                    }
                }
                out.set(i, j, s);
            }
        }
        out
    }
    /// Transpose with entrywise formal adjoints.
    pub fn formal_adjoint(&self, env: &Enveloping) -> OpPolyMatrix {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, env.formal_adjoint(self.get(i, j)));
            }
        }
        out
    }
    pub fn apply_automorphism(&self, phi: &GradedAutomorphism, env: &Enveloping) -> OpPolyMatrix {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| env.apply_automorphism(phi, e)).collect(),
        }
    }
    /// Common homogeneity degree of all entries.
    pub fn homogeneity_degree(&self, env: &Enveloping) -> Homogeneity {
        let mut deg = Homogeneity::Zero;
        for e in &self.entries {
            match (deg, env.homogeneity_degree(e)) {
                (_, Homogeneity::Inhomogeneous) => return Homogeneity::Inhomogeneous,
                (_, Homogeneity::Zero) => {}
                (Homogeneity::Zero, d) => deg = d,
                (Homogeneity::Degree(a), Homogeneity::Degree(b)) if a != b => return Homogeneity::Inhomogeneous,
                _ => {}
            }
        }
        deg
    }
    pub fn pow(&self, k: u32, env: &Enveloping) -> OpPolyMatrix {
        assert_eq!(self.rows, self.cols);
        assert!(k >= 1);
        let mut out = self.clone();
        for _ in 1..k {
            out = out.mul(self, env);
        }
        out
    }
    pub fn max_length(&self) -> usize {
        self.entries.iter().map(|e| e.max_length()).max().unwrap_or(0)
    }
}

impl fmt::Display for OpPolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(" | "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded_lie::{builtin_235, extend_automorphism};
    use crate::scalar::q;

    fn env() -> Enveloping {
        Enveloping::new(builtin_235()).unwrap()
    }

    #[test]
    fn x2_x1_reorders() {
        let e = env();
        let got = e.word(&[1, 0]);
        let want = e.word(&[0, 1]).sub(&e.generator(2));
        assert_eq!(got, want);
    }

    #[test]
    fn adjoint_of_product() {
        let e = env();
        let x = e.word(&[0, 1]);
        assert_eq!(e.formal_adjoint(&x), e.word(&[0, 1]).sub(&e.generator(2)));
        assert_eq!(e.formal_adjoint(&e.generator(0)), e.generator(0).neg());
    }

    #[test]
    fn homogeneity() {
        let e = env();
        assert_eq!(e.homogeneity_degree(&e.word(&[0, 1, 2])), Homogeneity::Degree(4));
        let mixed = e.word(&[0, 1]).add(&e.generator(3));
        assert_eq!(e.homogeneity_degree(&mixed), Homogeneity::Inhomogeneous);
        assert_eq!(e.homogeneity_degree(&UEAElement::zero()), Homogeneity::Zero);
    }

    #[test]
    fn grading_automorphism_scales() {
        let e = env();
        let t = q(2);
        let phi = extend_automorphism(&e.algebra, &[[t.clone(), q(0)], [q(0), t]]).unwrap();
        let x = e.word(&[0, 1]);
        assert_eq!(e.apply_automorphism(&phi, &x), x.scale(&ExactScalar::int(4)));
    }
}
