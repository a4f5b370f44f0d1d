//! Graded nilpotent Lie algebras and their graded automorphisms.
//!
//! Basis vectors are indexed from 0 in code; `X₁…X₅` in documentation are
//! indices 0…4. Brackets are stored as structure constants
//! `[X_i, X_j] = Σ_k c_{ij}^k X_k`.

use crate::error::{Error, Result};
use crate::scalar::{q, Q};
use num_traits::{One, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AlgebraKind {
    /// The (2,3,5) algebra.
    G235,
    Heisenberg,
    Abelian(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GradedLieAlgebra {
    pub name: String,
    pub kind: AlgebraKind,
    pub degrees: Vec<i32>,
    /// `bracket[i][j]` lists the nonzero `(k, c_{ij}^k)`.
    pub bracket: Vec<Vec<Vec<(usize, Q)>>>,
}

impl GradedLieAlgebra {
    fn from_relations(name: &str, kind: AlgebraKind, degrees: Vec<i32>, rel: &[(usize, usize, usize)]) -> Self {
        let n = degrees.len();
        let mut bracket = vec![vec![Vec::new(); n]; n];
        for &(i, j, k) in rel {
            bracket[i][j].push((k, Q::one()));
            bracket[j][i].push((k, -Q::one()));
        }
        Self { name: name.to_string(), kind, degrees, bracket }
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    /// Weight of a basis vector: minus its degree (X₁ ↦ 1, X₃ ↦ 2, …).
    pub fn weight(&self, i: usize) -> u32 {
        (-self.degrees[i]) as u32
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> Q {
        self.bracket[i][j].iter().find(|(kk, _)| *kk == k).map(|(_, c)| c.clone()).unwrap_or_else(Q::zero)
    }

    /// Bracket of two vectors given by coordinates.
    pub fn bracket_vectors(&self, x: &[Q], y: &[Q]) -> Vec<Q> {
        let n = self.dim();
        let mut out = vec![Q::zero(); n];
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if y[j].is_zero() {
                    continue;
                }
                for (k, c) in &self.bracket[i][j] {
                    out[*k] += &x[i] * &y[j] * c;
                }
            }
        }
        out
    }

    pub fn check_antisymmetry(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| {
            (0..n).all(|j| (0..n).all(|k| self.structure_constant(i, j, k) == -self.structure_constant(j, i, k)))
        })
    }

    pub fn check_jacobi(&self) -> bool {
        let n = self.dim();
        let e = |i: usize| -> Vec<Q> { (0..n).map(|k| if k == i { Q::one() } else { Q::zero() }).collect() };
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let (x, y, z) = (e(a), e(b), e(c));
                    let t1 = self.bracket_vectors(&x, &self.bracket_vectors(&y, &z));
                    let t2 = self.bracket_vectors(&y, &self.bracket_vectors(&z, &x));
                    let t3 = self.bracket_vectors(&z, &self.bracket_vectors(&x, &y));
                    if (0..n).any(|k| !(&t1[k] + &t2[k] + &t3[k]).is_zero()) {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn check_grading(&self) -> bool {
        let n = self.dim();
        if self.kind == AlgebraKind::Abelian(n) {
            return (0..n).all(|i| (0..n).all(|j| self.bracket[i][j].is_empty()));
        }
        (0..n).all(|i| {
            (0..n).all(|j| {
                self.bracket[i][j].iter().all(|(k, c)| c.is_zero() || self.degrees[*k] == self.degrees[i] + self.degrees[j])
            })
        })
    }

    /// Does the linear map with matrix `m` (columns = images of basis vectors)
    /// preserve all brackets?
    pub fn preserves_brackets(&self, m: &[Vec<Q>]) -> bool {
        let n = self.dim();
        let col = |j: usize| -> Vec<Q> { (0..n).map(|k| m[k][j].clone()).collect() };
        for i in 0..n {
            for j in 0..n {
                let lhs_br: Vec<Q> = {
                    let mut v = vec![Q::zero(); n];
                    for (k, c) in &self.bracket[i][j] {
                        for (r, vr) in v.iter_mut().enumerate() {
                            *vr += c * &m[r][*k];
                        }
                    }
                    v
                };
                let rhs = self.bracket_vectors(&col(i), &col(j));
                if lhs_br != rhs {
                    return false;
                }
            }
        }
        true
    }
}

pub fn builtin_235() -> GradedLieAlgebra {
    GradedLieAlgebra::from_relations(
        "235",
        AlgebraKind::G235,
        vec![-1, -1, -2, -3, -3],
        &[(0, 1, 2), (0, 2, 3), (1, 2, 4)],
    )
}

pub fn builtin_heisenberg() -> GradedLieAlgebra {
    GradedLieAlgebra::from_relations("heisenberg", AlgebraKind::Heisenberg, vec![-1, -1, -2], &[(0, 1, 2)])
}

pub fn builtin_abelian(n: usize) -> Result<GradedLieAlgebra> {
    if n == 0 {
        return Err(Error::InvalidArgument("abelian algebra needs n >= 1".into()));
    }
    Ok(GradedLieAlgebra::from_relations(&format!("abelian:{n}"), AlgebraKind::Abelian(n), vec![-1; n], &[]))
}

/// Graded automorphism determined by its action Φ on the degree −1 part.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedAutomorphism {
    pub kind: AlgebraKind,
    pub phi_minus1: [[Q; 2]; 2],
    /// `full_matrix[k][j]` is the X_k-coefficient of φ(X_j).
    pub full_matrix: Vec<Vec<Q>>,
}

pub fn det2(p: &[[Q; 2]; 2]) -> Q {
    &p[0][0] * &p[1][1] - &p[0][1] * &p[1][0]
}

pub fn mul2(a: &[[Q; 2]; 2], b: &[[Q; 2]; 2]) -> [[Q; 2]; 2] {
    let e = |i: usize, j: usize| &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j];
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

pub fn inv2(p: &[[Q; 2]; 2]) -> Option<[[Q; 2]; 2]> {
    let d = det2(p);
    if d.is_zero() {
        return None;
    }
    Some([[&p[1][1] / &d, -&p[0][1] / &d], [-&p[1][0] / &d, &p[0][0] / &d]])
}

pub fn extend_automorphism(l: &GradedLieAlgebra, phi: &[[Q; 2]; 2]) -> Result<GradedAutomorphism> {
    let d = det2(phi);
    if d.is_zero() {
        return Err(Error::Singular("graded automorphism needs det Φ ≠ 0".into()));
    }
    let n = l.dim();
    let mut m = vec![vec![Q::zero(); n]; n];
    let mut put_block = |off: usize, s: &Q| {
        for i in 0..2 {
            for j in 0..2 {
                m[off + i][off + j] = &phi[i][j] * s;
            }
        }
    };
    match l.kind {
        AlgebraKind::G235 => {
            put_block(0, &Q::one());
            put_block(3, &d);
            m[2][2] = d.clone();
        }
        AlgebraKind::Heisenberg => {
            put_block(0, &Q::one());
            m[2][2] = d.clone();
        }
        AlgebraKind::Abelian(_) => {
            return Err(Error::Unsupported(
                "abelian algebras carry no (2,·) graded structure for Φ-extension".into(),
            ))
        }
    }
    if !l.preserves_brackets(&m) {
        return Err(Error::InvalidArgument("extended map fails to preserve brackets".into()));
    }
    Ok(GradedAutomorphism { kind: l.kind, phi_minus1: phi.clone(), full_matrix: m })
}

impl GradedAutomorphism {
    pub fn identity(l: &GradedLieAlgebra) -> Result<Self> {
        extend_automorphism(l, &[[q(1), q(0)], [q(0), q(1)]])
    }

    /// Matrix product φ₁∘φ₂.
    pub fn compose(&self, o: &GradedAutomorphism) -> Vec<Vec<Q>> {
        let n = self.full_matrix.len();
        let mut out = vec![vec![Q::zero(); n]; n];
        for i in 0..n {
            for k in 0..n {
                if self.full_matrix[i][k].is_zero() {
                    continue;
                }
                for j in 0..n {
                    out[i][j] += &self.full_matrix[i][k] * &o.full_matrix[k][j];
                }
            }
        }
        out
    }

    pub fn det_phi(&self) -> Q {
        det2(&self.phi_minus1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_are_graded_lie_algebras() {
        for l in [builtin_235(), builtin_heisenberg(), builtin_abelian(4).unwrap()] {
            assert!(l.check_antisymmetry(), "{}", l.name);
            assert!(l.check_jacobi(), "{}", l.name);
            assert!(l.check_grading(), "{}", l.name);
        }
    }

    #[test]
    fn structure_constants_235() {
        let g = builtin_235();
        assert_eq!(g.structure_constant(0, 1, 2), q(1));
        assert_eq!(g.structure_constant(0, 2, 3), q(1));
        assert_eq!(g.structure_constant(1, 2, 4), q(1));
        assert!(g.bracket[3][4].is_empty());
        let nonzero: usize = (0..5).map(|i| (i + 1..5).filter(|&j| !g.bracket[i][j].is_empty()).count()).sum();
        assert_eq!(nonzero, 3);
    }

    #[test]
    fn abelian_zero_rejected() {
        assert!(builtin_abelian(0).is_err());
        assert_eq!(builtin_abelian(1).unwrap().dim(), 1);
    }

    #[test]
    fn swap_extension() {
        let g = builtin_235();
        let a = extend_automorphism(&g, &[[q(0), q(1)], [q(1), q(0)]]).unwrap();
        assert_eq!(a.full_matrix[2][2], q(-1));
        assert_eq!(a.full_matrix[4][3], q(-1));
        assert_eq!(a.full_matrix[3][4], q(-1));
        assert_eq!(a.full_matrix[3][3], q(0));
    }

    #[test]
    fn grading_automorphism() {
        let g = builtin_235();
        let t = q(3);
        let a = extend_automorphism(&g, &[[t.clone(), q(0)], [q(0), t.clone()]]).unwrap();
        let diag: Vec<Q> = (0..5).map(|i| a.full_matrix[i][i].clone()).collect();
        assert_eq!(diag, vec![q(3), q(3), q(9), q(27), q(27)]);
    }

    #[test]
    fn singular_rejected() {
        let g = builtin_235();
        assert!(extend_automorphism(&g, &[[q(1), q(2)], [q(2), q(4)]]).is_err());
    }
}
