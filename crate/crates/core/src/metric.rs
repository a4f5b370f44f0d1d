//! Graded metrics, their invariants a_g and b_g, the induced Hermitian forms
//! on cohomology and the Hodge star.
//!
//! The Hermitian form h_{g,q} is computed for an arbitrary rational graded
//! metric: each pinned class representative is projected g-orthogonally off
//! the exact forms, and h_{g,q} is the Gram matrix of the projections. In
//! normal form this reproduces the diagonal closed form returned by
//! [`hq_normal_form`].

use crate::cohomology::{chevalley_eilenberg, pinned_representatives, wedge_basis, CohomologyData};
use crate::error::{Error, Result};
use crate::exact_matrix::ExactMatrix;
use crate::graded_lie::{AlgebraKind, GradedAutomorphism, GradedLieAlgebra};
use crate::scalar::{q, q_to_f64, ExactScalar, Q};
use num_traits::{One, Signed, Zero};

/// Graded Euclidean inner product, stored as the full Gram matrix in the X-basis.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedMetric {
    pub kind: AlgebraKind,
    pub degrees: Vec<i32>,
    pub gram: Vec<Vec<Q>>,
}

fn det_q(m: &[Vec<Q>]) -> Q {
    let n = m.len();
    if n == 0 {
        return Q::one();
    }
    let mut a: Vec<Vec<Q>> = m.to_vec();
    let mut det = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= &a[c][c];
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] / &a[c][c];
            for j in c..n {
                let v = &a[c][j] * &f;
                a[i][j] -= v;
            }
        }
    }
    det
}

fn inverse_q(m: &[Vec<Q>]) -> Option<Vec<Vec<Q>>> {
    let e = ExactMatrix::from_q_rows(m).inverse()?;
    Some((0..e.rows).map(|i| (0..e.cols).map(|j| e.get(i, j).re.a.clone()).collect()).collect())
}

impl GradedMetric {
    pub fn from_gram(l: &GradedLieAlgebra, gram: Vec<Vec<Q>>) -> Result<Self> {
        let n = l.dim();
        if gram.len() != n || gram.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument(format!("metric must be {n}x{n}")));
        }
        for i in 0..n {
            for j in 0..n {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::InvalidArgument("metric not symmetric".into()));
                }
                if l.degrees[i] != l.degrees[j] && !gram[i][j].is_zero() {
                    return Err(Error::InvalidArgument("metric couples different degrees".into()));
                }
            }
        }
        for k in 1..=n {
            let minor: Vec<Vec<Q>> = gram[..k].iter().map(|r| r[..k].to_vec()).collect();
            if !det_q(&minor).is_positive() {
                return Err(Error::NotPositiveDefinite("graded metric".into()));
            }
        }
        Ok(Self { kind: l.kind, degrees: l.degrees.clone(), gram })
    }

    /// All blocks identity in the X-basis.
    pub fn standard(l: &GradedLieAlgebra) -> Self {
        let n = l.dim();
        let gram = (0..n).map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect()).collect();
        Self { kind: l.kind, degrees: l.degrees.clone(), gram }
    }

    /// Normal form diag(1, 1, a, a·b₁₁, a·b₂₂) on the (2,3,5) algebra.
    pub fn normal_form_235(l: &GradedLieAlgebra, a: Q, b11: Q, b22: Q) -> Result<Self> {
        if l.kind != AlgebraKind::G235 {
            return Err(Error::Unsupported("normal_form_235 on another algebra".into()));
        }
        let d = [Q::one(), Q::one(), a.clone(), &a * &b11, &a * &b22];
        Self::from_gram(l, diag_rows(&d))
    }

    /// Normal form diag(1, 1, a) on the Heisenberg algebra.
    pub fn normal_form_heisenberg(l: &GradedLieAlgebra, a: Q) -> Result<Self> {
        if l.kind != AlgebraKind::Heisenberg {
            return Err(Error::Unsupported("normal_form_heisenberg on another algebra".into()));
        }
        Self::from_gram(l, diag_rows(&[Q::one(), Q::one(), a]))
    }

    pub fn dim(&self) -> usize {
        self.gram.len()
    }

    /// Transported metric (φ·g)(X, Y) = g(φ⁻¹X, φ⁻¹Y).
    pub fn transport(&self, phi: &GradedAutomorphism) -> Self {
        let n = self.dim();
        let minv = inverse_q(&phi.full_matrix).expect("automorphism invertible");
        let mut out = vec![vec![Q::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = Q::zero();
                for k in 0..n {
                    for l in 0..n {
                        if minv[k][i].is_zero() || minv[l][j].is_zero() {
                            continue;
                        }
                        s += &minv[k][i] * &self.gram[k][l] * &minv[l][j];
                    }
                }
                out[i][j] = s;
            }
        }
        Self { kind: self.kind, degrees: self.degrees.clone(), gram: out }
    }

    pub fn inner(&self, x: &[Q], y: &[Q]) -> Q {
        let n = self.dim();
        let mut s = Q::zero();
        for i in 0..n {
            for j in 0..n {
                if !x[i].is_zero() && !y[j].is_zero() {
                    s += &x[i] * &self.gram[i][j] * &y[j];
                }
            }
        }
        s
    }

    /// Gram matrix of the induced inner product on Λ^q in the wedge basis.
    pub fn form_gram(&self, qdeg: usize) -> ExactMatrix {
        let n = self.dim();
        let ginv = inverse_q(&self.gram).expect("metric invertible");
        let basis = wedge_basis(n, qdeg);
        let mut m = ExactMatrix::zeros(basis.len(), basis.len());
        for (a, i) in basis.iter().enumerate() {
            for (b, j) in basis.iter().enumerate() {
                let sub: Vec<Vec<Q>> = i.iter().map(|&r| j.iter().map(|&c| ginv[r][c].clone()).collect()).collect();
                let d = det_q(&sub);
                if !d.is_zero() {
                    m.set(a, b, ExactScalar::rational(d));
                }
            }
        }
        m
    }

    /// Is this the normal form (X₁, X₂ orthonormal, diagonal metric)?
    pub fn is_normal_form(&self) -> bool {
        let n = self.dim();
        let diag = (0..n).all(|i| (0..n).all(|j| i == j || self.gram[i][j].is_zero()));
        diag && self.gram[0][0].is_one() && self.gram[1][1].is_one()
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.gram.iter().map(|r| r.iter().map(q_to_f64).collect()).collect()
    }
}

fn diag_rows(d: &[Q]) -> Vec<Vec<Q>> {
    let n = d.len();
    (0..n).map(|i| (0..n).map(|j| if i == j { d[i].clone() } else { Q::zero() }).collect()).collect()
}

/// The invariants a_g and b_g.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricInvariants {
    pub a: Q,
    /// b_g on the degree −1 part; only defined on the (2,3,5) algebra.
    pub b: Option<[[Q; 2]; 2]>,
}

/// a_g from g₋₂([X,Y],[X,Y]) = a_g·(g(X,X)g(Y,Y) − g(X,Y)²) and b_g from
/// g₋₃([X,Z],[Y,Z]) = g₋₂(Z,Z)·b_g(X,Y); both identities are then checked on
/// basis vectors and their sums.
pub fn metric_invariants(l: &GradedLieAlgebra, g: &GradedMetric) -> Result<MetricInvariants> {
    let n = l.dim();
    let e = |i: usize| -> Vec<Q> { (0..n).map(|k| if k == i { Q::one() } else { Q::zero() }).collect() };
    let add = |x: &[Q], y: &[Q]| -> Vec<Q> { x.iter().zip(y).map(|(a, b)| a + b).collect() };
    match l.kind {
        AlgebraKind::G235 | AlgebraKind::Heisenberg => {}
        AlgebraKind::Abelian(_) => return Err(Error::Unsupported("abelian algebras have no a_g".into())),
    }
    let (x1, x2, x3) = (e(0), e(1), e(2));
    let gram2 = |x: &[Q], y: &[Q]| &g.inner(x, x) * &g.inner(y, y) - g.inner(x, y) * g.inner(x, y);
    let br = l.bracket_vectors(&x1, &x2);
    let a = g.inner(&br, &br) / gram2(&x1, &x2);
    let samples = [x1.clone(), x2.clone(), add(&x1, &x2), add(&x1, &add(&x2, &x2))];
    for x in &samples {
        for y in &samples {
            let br = l.bracket_vectors(x, y);
            if g.inner(&br, &br) != &a * gram2(x, y) {
                return Err(Error::InvalidArgument("a_g identity fails".into()));
            }
        }
    }
    if l.kind == AlgebraKind::Heisenberg {
        return Ok(MetricInvariants { a, b: None });
    }
    let gz = g.inner(&x3, &x3);
    let bf = |x: &[Q], y: &[Q]| g.inner(&l.bracket_vectors(x, &x3), &l.bracket_vectors(y, &x3)) / &gz;
    let b = [[bf(&x1, &x1), bf(&x1, &x2)], [bf(&x2, &x1), bf(&x2, &x2)]];
    let zs = [x3.clone(), x3.iter().map(|v| v * q(3)).collect::<Vec<_>>()];
    for z in &zs {
        for x in &samples {
            for y in &samples {
                let lhs = g.inner(&l.bracket_vectors(x, z), &l.bracket_vectors(y, z));
                let bxy = {
                    let mut s = Q::zero();
                    for i in 0..2 {
                        for j in 0..2 {
                            s += &x[i] * &b[i][j] * &y[j];
                        }
                    }
                    s
                };
                if lhs != g.inner(z, z) * bxy {
                    return Err(Error::InvalidArgument("b_g identity fails".into()));
                }
            }
        }
    }
    Ok(MetricInvariants { a, b: Some(b) })
}

/// Harmonic representatives and Hermitian forms h_{g,q} on cohomology.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianComplexForms {
    pub harmonic: CohomologyData,
    pub h: Vec<ExactMatrix>,
}

impl HermitianComplexForms {
    pub fn identity(betti: &[usize]) -> Vec<ExactMatrix> {
        betti.iter().map(|&b| ExactMatrix::identity(b)).collect()
    }
    pub fn to_complex(&self) -> Vec<Vec<Vec<num_complex::Complex64>>> {
        self.h.iter().map(|m| m.to_complex()).collect()
    }
}

/// Harmonic representatives of the pinned classes for the metric g.
pub fn harmonic_basis(l: &GradedLieAlgebra, g: &GradedMetric) -> Result<CohomologyData> {
    Ok(hermitian_forms(l, g)?.harmonic)
}

pub fn hermitian_forms(l: &GradedLieAlgebra, g: &GradedMetric) -> Result<HermitianComplexForms> {
    if g.kind != l.kind {
        return Err(Error::InvalidArgument("metric and algebra differ".into()));
    }
    let n = l.dim();
    let pinned = pinned_representatives(l);
    let mut bases = Vec::new();
    let mut hs = Vec::new();
    for qd in 0..=n {
        let w = g.form_gram(qd);
        let mut reps = pinned[qd].clone();
        if qd > 0 {
            let d = chevalley_eilenberg(l, qd - 1)?;
            let pivots = d.clone().rref();
            let e_cols: Vec<Vec<ExactScalar>> = pivots.iter().map(|&c| d.column(c)).collect();
            if !e_cols.is_empty() {
                let e = ExactMatrix::from_columns(w.rows, &e_cols);
                let ehw = e.conj_transpose().mul(&w);
                let normal = ehw.mul(&e);
                for r in reps.iter_mut() {
                    let rhs = ehw.mul(&ExactMatrix::from_columns(w.rows, &[r.clone()])).column(0);
                    let c = normal.solve(&rhs).ok_or_else(|| Error::Singular("projection".into()))?;
                    let proj = e.mul(&ExactMatrix::from_columns(c.len(), &[c])).column(0);
                    for (x, p) in r.iter_mut().zip(proj) {
                        *x = &*x - &p;
                    }
                }
            }
        }
        let b = ExactMatrix::from_columns(w.rows, &reps);
        hs.push(b.conj_transpose().mul(&w).mul(&b));
        bases.push(reps);
    }
    Ok(HermitianComplexForms { harmonic: CohomologyData::from_representatives(l, bases)?, h: hs })
}

/// Closed-form h_{g,q} on the (2,3,5) algebra in normal form, with
/// b^{jj} = 1/b_{jj}.
pub fn hq_normal_form(a: &Q, b11: &Q, b22: &Q) -> Vec<ExactMatrix> {
    let u1 = Q::one() / b11;
    let u2 = Q::one() / b22;
    let r = |x: Q| ExactScalar::rational(x);
    let s = &u1 + &u2;
    let p = &u1 * &u2;
    let a2 = a * a;
    let a3 = &a2 * a;
    vec![
        ExactMatrix::identity(1),
        ExactMatrix::identity(2),
        ExactMatrix::diag(vec![r(&u1 / a), r(&s / (q(2) * a)), r(&u2 / a)]),
        ExactMatrix::diag(vec![r(&p / &a2 / &u2), r(&p / &a2 * q(2) / &s), r(&p / &a2 / &u1)]),
        ExactMatrix::diag(vec![r(&p / &a3), r(&p / &a3)]),
        ExactMatrix::diag(vec![r(&p / &a3)]),
    ]
}

/// Hodge star matrices ⋆_{g,q}: H^q → H^{5−q} on the (2,3,5) algebra in
/// normal form (a, b₁₁, b₂₂), in floating point.
pub fn hodge_star(a: f64, b11: f64, b22: f64) -> Vec<Vec<Vec<f64>>> {
    let (u1, u2) = (1.0 / b11, 1.0 / b22);
    let s = (u1 * u2).sqrt();
    let c0 = a.powi(3).sqrt() / s;
    let c2 = a.sqrt() / s;
    let c3 = s / a.sqrt();
    let c4 = s / a.powi(3).sqrt();
    vec![
        vec![vec![c0]],
        vec![vec![0.0, -c0], vec![c0, 0.0]],
        vec![vec![0.0, 0.0, c2 * u2], vec![0.0, -c2 * (u1 + u2) / 2.0, 0.0], vec![c2 * u1, 0.0, 0.0]],
        vec![vec![0.0, 0.0, c3 / u1], vec![0.0, -c3 * 2.0 / (u1 + u2), 0.0], vec![c3 / u2, 0.0, 0.0]],
        vec![vec![0.0, c4], vec![-c4, 0.0]],
        vec![vec![c4]],
    ]
}

/// The Hodge star matrices for the standard metric a = 1, b = I, exactly.
pub fn hodge_star_standard() -> Vec<ExactMatrix> {
    hodge_star(1.0, 1.0, 1.0)
        .into_iter()
        .map(|m| {
            ExactMatrix::from_rows(
                m.into_iter().map(|r| r.into_iter().map(|x| ExactScalar::int(x.round() as i64)).collect()).collect(),
            )
        })
        .collect()
}

/// Normal form reached by an automorphism ψ with ψ*g normal.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalFormReduction {
    /// Ψ on the degree −1 part (columns are the new X₁, X₂).
    pub psi: [[f64; 2]; 2],
    pub a: f64,
    pub b11: f64,
    pub b22: f64,
}

/// Principal-axis reduction of a metric on the (2,3,5) algebra: Ψ = g₋₁^{-1/2}U
/// with U diagonalizing the b-form, so that g(ψ·, ψ·) is in normal form.
pub fn reduce_to_normal_form(l: &GradedLieAlgebra, g: &GradedMetric) -> Result<NormalFormReduction> {
    let inv = metric_invariants(l, g)?;
    let b = inv.b.ok_or_else(|| Error::Unsupported("reduction needs the (2,3,5) algebra".into()))?;
    let gm = g.to_f64();
    let g1 = [[gm[0][0], gm[0][1]], [gm[1][0], gm[1][1]]];
    let bf = [[q_to_f64(&b[0][0]), q_to_f64(&b[0][1])], [q_to_f64(&b[1][0]), q_to_f64(&b[1][1])]];
    let (ev, vecs) = sym_eig2(g1);
    let mut s = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            s[i][j] = (0..2).map(|k| vecs[i][k] * vecs[j][k] / ev[k].sqrt()).sum();
        }
    }
    let m = mat2_mul(&mat2_mul(&transpose2(&s), &bf), &s);
    let (bev, u) = sym_eig2(m);
    let mut psi = mat2_mul(&s, &u);
    if psi[0][0] * psi[1][1] - psi[0][1] * psi[1][0] < 0.0 {
        psi[0][1] = -psi[0][1];
        psi[1][1] = -psi[1][1];
    }
    Ok(NormalFormReduction { psi, a: q_to_f64(&inv.a), b11: bev[0], b22: bev[1] })
}

fn transpose2(a: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [[a[0][0], a[1][0]], [a[0][1], a[1][1]]]
}

fn mat2_mul(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let e = |i: usize, j: usize| a[i][0] * b[0][j] + a[i][1] * b[1][j];
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

/// Eigen-decomposition of a symmetric 2×2 matrix; eigenvectors as columns.
fn sym_eig2(m: [[f64; 2]; 2]) -> ([f64; 2], [[f64; 2]; 2]) {
    let (a, b, d) = (m[0][0], m[0][1], m[1][1]);
    if b.abs() < 1e-300 {
        return ([a, d], [[1.0, 0.0], [0.0, 1.0]]);
    }
    let theta = 0.5 * (2.0 * b).atan2(a - d);
    let (c, s) = (theta.cos(), theta.sin());
    let l1 = a * c * c + 2.0 * b * c * s + d * s * s;
    let l2 = a * s * s - 2.0 * b * c * s + d * c * c;
    ([l1, l2], [[c, -s], [s, c]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded_lie::{builtin_235, builtin_heisenberg};
    use crate::scalar::qf;

    #[test]
    fn invariants_of_standard_and_killing_metrics() {
        let g = builtin_235();
        let inv = metric_invariants(&g, &GradedMetric::standard(&g)).unwrap();
        assert_eq!(inv.a, q(1));
        assert_eq!(inv.b, Some([[q(1), q(0)], [q(0), q(1)]]));
        let m = GradedMetric::normal_form_235(&g, q(4), q(3), q(3)).unwrap();
        let inv = metric_invariants(&g, &m).unwrap();
        assert_eq!(inv.a, q(4));
        assert_eq!(inv.b, Some([[q(3), q(0)], [q(0), q(3)]]));
    }

    #[test]
    fn hermitian_forms_match_closed_form() {
        let g = builtin_235();
        for (a, b11, b22) in [(q(1), q(1), q(1)), (q(1), q(2), q(1)), (qf(3, 2), qf(1, 3), q(5))] {
            let m = GradedMetric::normal_form_235(&g, a.clone(), b11.clone(), b22.clone()).unwrap();
            let h = hermitian_forms(&g, &m).unwrap();
            assert_eq!(h.h, hq_normal_form(&a, &b11, &b22));
        }
    }

    #[test]
    fn middle_harmonic_form() {
        let g = builtin_235();
        let m = GradedMetric::normal_form_235(&g, q(1), qf(1, 2), q(1)).unwrap();
        let data = harmonic_basis(&g, &m).unwrap();
        // b^{11} = 2, b^{22} = 1: (√2/3)(2χ135 + χ234).
        let basis = wedge_basis(5, 3);
        let i135 = basis.iter().position(|s| s == &vec![0, 2, 4]).unwrap();
        let i234 = basis.iter().position(|s| s == &vec![1, 2, 3]).unwrap();
        let v = &data.bases[3][1];
        assert_eq!(v[i135], ExactScalar::surd(q(0), qf(2, 3)));
        assert_eq!(v[i234], ExactScalar::surd(q(0), qf(1, 3)));
    }

    #[test]
    fn heisenberg_forms() {
        let l = builtin_heisenberg();
        let m = GradedMetric::normal_form_heisenberg(&l, q(3)).unwrap();
        let h = hermitian_forms(&l, &m).unwrap();
        let third = ExactScalar::rational(qf(1, 3));
        assert_eq!(h.h[0], ExactMatrix::identity(1));
        assert_eq!(h.h[1], ExactMatrix::identity(2));
        assert_eq!(h.h[2], ExactMatrix::diag(vec![third.clone(), third.clone()]));
        assert_eq!(h.h[3], ExactMatrix::diag(vec![third]));
    }

    #[test]
    fn not_positive_definite_rejected() {
        let g = builtin_235();
        assert!(GradedMetric::normal_form_235(&g, q(-1), q(1), q(1)).is_err());
    }
}
