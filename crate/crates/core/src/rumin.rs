//! Rumin differentials as matrices over U(L), their h-adjoints, the
//! Rumin–Seshadri operators, and naturality under graded automorphisms.

use crate::cohomology::{chevalley_eilenberg, pinned_representatives, wedge_basis, CohomologyData};
use crate::enveloping::{Enveloping, Homogeneity, OpPolyMatrix, UEAElement};
use crate::error::{Error, Result};
use crate::exact_matrix::ExactMatrix;
use crate::graded_lie::{AlgebraKind, GradedAutomorphism, GradedLieAlgebra};
use crate::scalar::{qf, ExactScalar, Q};
use num_traits::{One, Zero};
use std::sync::Arc;

/// The Rumin complex of a built-in algebra with respect to the pinned
/// cohomology bases.
#[derive(Debug, Clone)]
pub struct RuminComplex {
    pub env: Arc<Enveloping>,
    pub cohomology: CohomologyData,
    /// D₀, D₁, …; D_q maps H^q to H^{q+1}.
    pub d: Vec<OpPolyMatrix>,
    /// Exponents a_q with a_q·k_q = κ.
    pub a: Vec<u32>,
    pub kappa: u32,
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl RuminComplex {
    pub fn new(l: GradedLieAlgebra) -> Result<Self> {
        let cohomology = CohomologyData::from_representatives(&l, pinned_representatives(&l))?;
        let env = Arc::new(Enveloping::new(l)?);
        let d = rumin_differentials(&env)?;
        let kappa = cohomology.orders.iter().fold(1, |acc, &k| acc / gcd(acc, k) * k);
        let a = cohomology.orders.iter().map(|&k| kappa / k).collect();
        Ok(Self { env, cohomology, d, a, kappa })
    }

    pub fn algebra(&self) -> &GradedLieAlgebra {
        &self.env.algebra
    }

    /// Number of cohomology degrees (dim L + 1).
    pub fn degrees(&self) -> usize {
        self.cohomology.betti.len()
    }

    pub fn betti(&self) -> &[usize] {
        &self.cohomology.betti
    }
}

/// Parses a 1-based index word such as "112" into an element of U(L).
fn x(env: &Enveloping, w: &str) -> UEAElement {
    let idx: Vec<usize> = w.chars().map(|c| c.to_digit(10).unwrap() as usize - 1).collect();
    env.word(&idx)
}

fn lin(env: &Enveloping, terms: &[(ExactScalar, &str)]) -> UEAElement {
    let mut out = UEAElement::zero();
    for (c, w) in terms {
        out = out.add(&x(env, w).scale(c));
    }
    out
}

pub fn rumin_differentials(env: &Enveloping) -> Result<Vec<OpPolyMatrix>> {
    let one = || ExactScalar::one();
    let m1 = || ExactScalar::int(-1);
    let s2 = || ExactScalar::sqrt2();
    let ms2 = || -ExactScalar::sqrt2();
    let r2 = || ExactScalar::surd(Q::zero(), qf(1, 2));
    let mr2 = || -ExactScalar::surd(Q::zero(), qf(1, 2));
    let z = UEAElement::zero;
    let e = |t: &[(ExactScalar, &str)]| lin(env, t);
    match env.algebra.kind {
        AlgebraKind::G235 => Ok(vec![
            OpPolyMatrix::from_rows(vec![vec![e(&[(one(), "1")])], vec![e(&[(one(), "2")])]]),
            OpPolyMatrix::from_rows(vec![
                vec![e(&[(m1(), "112"), (m1(), "13"), (m1(), "4")]), e(&[(one(), "111")])],
                vec![e(&[(ms2(), "122"), (ms2(), "5")]), e(&[(s2(), "211"), (ms2(), "4")])],
                vec![e(&[(m1(), "222")]), e(&[(one(), "221"), (m1(), "23"), (m1(), "5")])],
            ]),
            OpPolyMatrix::from_rows(vec![
                vec![e(&[(m1(), "12"), (m1(), "3")]), e(&[(r2(), "11")]), z()],
                vec![e(&[(mr2(), "22")]), e(&[(ExactScalar::frac(-3, 2), "3")]), e(&[(r2(), "11")])],
                vec![z(), e(&[(mr2(), "22")]), e(&[(one(), "21"), (m1(), "3")])],
            ]),
            OpPolyMatrix::from_rows(vec![
                vec![
                    e(&[(one(), "122"), (one(), "32"), (m1(), "5")]),
                    e(&[(ms2(), "112"), (s2(), "4")]),
                    e(&[(one(), "111")]),
                ],
                vec![
                    e(&[(one(), "222")]),
                    e(&[(ms2(), "221"), (ms2(), "5")]),
                    e(&[(one(), "211"), (m1(), "31"), (one(), "4")]),
                ],
            ]),
            OpPolyMatrix::from_rows(vec![vec![e(&[(m1(), "2")]), e(&[(one(), "1")])]]),
        ]),
        AlgebraKind::Heisenberg => Ok(vec![
            OpPolyMatrix::from_rows(vec![vec![e(&[(one(), "1")])], vec![e(&[(one(), "2")])]]),
            OpPolyMatrix::from_rows(vec![
                vec![e(&[(m1(), "12"), (m1(), "3")]), e(&[(one(), "11")])],
                vec![e(&[(m1(), "22")]), e(&[(one(), "21"), (m1(), "3")])],
            ]),
            OpPolyMatrix::from_rows(vec![vec![e(&[(m1(), "2")]), e(&[(one(), "1")])]]),
        ]),
        AlgebraKind::Abelian(n) => Ok((0..n).map(|q| abelian_differential(env, n, q)).collect()),
    }
}

/// Exterior derivative Σ_j X_j ⊗ (χ^j ∧ ·) from Λ^q to Λ^{q+1}.
fn abelian_differential(env: &Enveloping, n: usize, q: usize) -> OpPolyMatrix {
    let src = wedge_basis(n, q);
    let dst = wedge_basis(n, q + 1);
    let mut m = OpPolyMatrix::zeros(dst.len(), src.len());
    for (c, set) in src.iter().enumerate() {
        for j in 0..n {
            if set.contains(&j) {
                continue;
            }
            let before = set.iter().filter(|&&i| i < j).count();
            let mut t = set.clone();
            t.push(j);
            t.sort();
            let r = dst.iter().position(|d| *d == t).unwrap();
            let s = if before % 2 == 0 { ExactScalar::one() } else { ExactScalar::int(-1) };
            let v = m.get(r, c).add(&env.generator(j).scale(&s));
            m.set(r, c, v);
        }
    }
    m
}

/// Nonzero residual entries of each composition D_{q+1}D_q.
#[derive(Clone, Debug, Default)]
pub struct ComplexReport {
    pub residuals: Vec<(usize, Vec<(usize, usize, UEAElement)>)>,
    pub compositions: usize,
}

impl ComplexReport {
    pub fn passed(&self) -> bool {
        self.residuals.is_empty()
    }
}

pub fn verify_complex(env: &Enveloping, d: &[OpPolyMatrix]) -> ComplexReport {
    let mut rep = ComplexReport::default();
    for qd in 0..d.len().saturating_sub(1) {
        let c = d[qd + 1].mul(&d[qd], env);
        rep.compositions += 1;
        let nz = c.nonzero_entries();
        if !nz.is_empty() {
            rep.residuals.push((qd, nz));
        }
    }
    rep
}

/// D_q^{*h} = h_q⁻¹ D_q^* h_{q+1}.
pub fn adjoint_matrix(env: &Enveloping, h: &[ExactMatrix], dq: &OpPolyMatrix, q: usize) -> Result<OpPolyMatrix> {
    let hq = h.get(q).ok_or(Error::DegreeOutOfRange(q))?;
    let hq1 = h.get(q + 1).ok_or(Error::DegreeOutOfRange(q + 1))?;
    let hinv = hq.inverse().ok_or_else(|| Error::Singular(format!("h_{q}")))?;
    Ok(dq.formal_adjoint(env).left_scalar(&hinv).right_scalar(hq1))
}

/// Δ_{h,q} = (D_{q−1}D_{q−1}^{*h})^{a_{q−1}} + (D_q^{*h}D_q)^{a_q}.
pub fn rumin_seshadri(c: &RuminComplex, h: &[ExactMatrix], q: usize) -> Result<OpPolyMatrix> {
    let top = c.d.len();
    if q > top {
        return Err(Error::DegreeOutOfRange(q));
    }
    let env = &c.env;
    let mut out: Option<OpPolyMatrix> = None;
    if q > 0 {
        let d = &c.d[q - 1];
        let ds = adjoint_matrix(env, h, d, q - 1)?;
        out = Some(d.mul(&ds, env).pow(c.a[q - 1], env));
    }
    if q < top {
        let d = &c.d[q];
        let ds = adjoint_matrix(env, h, d, q)?;
        let right = ds.mul(d, env).pow(c.a[q], env);
        out = Some(match out {
            Some(l) => l.add(&right),
            None => right,
        });
    }
    Ok(out.expect("degree range checked"))
}

fn det_sub(m: &[Vec<Q>], rows: &[usize], cols: &[usize]) -> Q {
    let sub: Vec<Vec<ExactScalar>> =
        rows.iter().map(|&r| cols.iter().map(|&c| ExactScalar::rational(m[r][c].clone())).collect()).collect();
    if sub.is_empty() {
        return Q::one();
    }
    let em = ExactMatrix::from_rows(sub);
    let cp = em.char_poly();
    let n = rows.len();
    let d = if n % 2 == 0 { cp[0].clone() } else { -cp[0].clone() };
    d.re.a
}

/// Matrix of the pullback ψ* on Λ^q, where ψ(X_j) = Σ_k m[k][j] X_k.
pub fn pullback_matrix(m: &[Vec<Q>], q: usize) -> ExactMatrix {
    let n = m.len();
    let basis = wedge_basis(n, q);
    let mut p = ExactMatrix::zeros(basis.len(), basis.len());
    for (ci, i) in basis.iter().enumerate() {
        for (rj, j) in basis.iter().enumerate() {
            let d = det_sub(m, i, j);
            if !d.is_zero() {
                p.set(rj, ci, ExactScalar::rational(d));
            }
        }
    }
    p
}

/// H^q(φ): the map on cohomology induced by (φ⁻¹)*, in the chosen basis.
pub fn cohomology_action(l: &GradedLieAlgebra, data: &CohomologyData, phi: &GradedAutomorphism, q: usize) -> Result<ExactMatrix> {
    let n = l.dim();
    let full = ExactMatrix::from_q_rows(&phi.full_matrix);
    let inv = full.inverse().ok_or_else(|| Error::Singular("automorphism".into()))?;
    let inv_q: Vec<Vec<Q>> = (0..n).map(|i| (0..n).map(|j| inv.get(i, j).re.a.clone()).collect()).collect();
    let p = pullback_matrix(&inv_q, q);
    let b = data.basis_matrix(n, q);
    let sys = if q > 0 { b.hstack(&chevalley_eilenberg(l, q - 1)?) } else { b.clone() };
    let betti = data.betti[q];
    let mut out = ExactMatrix::zeros(betti, betti);
    for k in 0..betti {
        let img = p.mul(&ExactMatrix::from_columns(b.rows, &[b.column(k)])).column(0);
        let sol = sys.solve(&img).ok_or_else(|| Error::InvalidArgument("pullback leaves cohomology".into()))?;
        for l_ in 0..betti {
            out.set(l_, k, sol[l_].clone());
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Default)]
pub struct NaturalityReport {
    /// Degrees q where φ·D_q ≠ H^{q+1}(φ)⁻¹ D_q H^q(φ).
    pub failures: Vec<usize>,
    pub checked: usize,
}

impl NaturalityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks φ·D_q = H^{q+1}(φ)⁻¹ D_q H^q(φ) exactly for every q.
pub fn naturality_check(c: &RuminComplex, phi: &GradedAutomorphism) -> Result<NaturalityReport> {
    let l = c.algebra();
    let mut rep = NaturalityReport::default();
    let hmats: Vec<ExactMatrix> =
        (0..c.degrees()).map(|q| cohomology_action(l, &c.cohomology, phi, q)).collect::<Result<_>>()?;
    for (q, d) in c.d.iter().enumerate() {
        let lhs = d.apply_automorphism(phi, &c.env);
        let hinv = hmats[q + 1].inverse().ok_or_else(|| Error::Singular("H(φ)".into()))?;
        let rhs = d.left_scalar(&hinv).right_scalar(&hmats[q]);
        rep.checked += 1;
        if lhs != rhs {
            rep.failures.push(q);
        }
    }
    Ok(rep)
}

/// Degrees q where D_q^{*h} ≠ (−1)^{q+1}·⋆·D_{4−q}·⋆ fails, for Hodge
/// stars ⋆_k: H^k → H^{n−k} and metric-induced h (top degree n = 5 for the
/// (2,3,5) algebra).
pub fn poincare_duality_failures(c: &RuminComplex, h: &[ExactMatrix], star: &[ExactMatrix]) -> Result<Vec<usize>> {
    let top = c.d.len();
    let mut failures = Vec::new();
    for q in 0..top {
        let lhs = adjoint_matrix(&c.env, h, &c.d[q], q)?;
        let sign = if q % 2 == 0 { -1 } else { 1 };
        let rhs = c.d[top - 1 - q]
            .left_scalar(&star[top - q])
            .right_scalar(&star[q + 1])
            .scale(&ExactScalar::int(sign));
        if lhs != rhs {
            failures.push(q);
        }
    }
    Ok(failures)
}

/// Homogeneity degree of every D_q.
pub fn differential_orders(c: &RuminComplex) -> Vec<Homogeneity> {
    c.d.iter().map(|d| d.homogeneity_degree(&c.env)).collect()
}
