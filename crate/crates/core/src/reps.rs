//! Unitary representations realized as matrices.
//!
//! Infinite-dimensional representations act on L²(ℝ) in the Hermite basis,
//! truncated to `N + G` modes. Every generator is a polynomial in θ and ∂θ,
//! hence banded, and products of banded matrices are exact on all columns
//! whose spread stays inside the guard band G.

use crate::enveloping::{OpPolyMatrix, UEAElement};
use crate::error::{Error, Result};
use crate::exact_matrix::ExactMatrix;
use crate::scalar::{ExactScalar, Q};
use num_traits::Zero;
use ndarray::Array2;
use num_complex::Complex64 as C64;
use std::collections::HashMap;

/// Square banded complex matrix with `kl` sub- and `ku` superdiagonals.
#[derive(Clone, Debug, PartialEq)]
pub struct Banded {
    pub n: usize,
    pub kl: usize,
    pub ku: usize,
    data: Vec<C64>,
}

impl Banded {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let kl = kl.min(n.saturating_sub(1));
        let ku = ku.min(n.saturating_sub(1));
        Self { n, kl, ku, data: vec![C64::new(0.0, 0.0); n * (kl + ku + 1)] }
    }
    pub fn identity(n: usize) -> Self {
        Self::scalar(n, C64::new(1.0, 0.0))
    }
    pub fn scalar(n: usize, c: C64) -> Self {
        let mut m = Self::zeros(n, 0, 0);
        for i in 0..n {
            m.set(i, i, c);
        }
        m
    }
    fn width(&self) -> usize {
        self.kl + self.ku + 1
    }
    pub fn in_band(&self, i: usize, j: usize) -> bool {
        j + self.kl >= i && j <= i + self.ku
    }
    pub fn get(&self, i: usize, j: usize) -> C64 {
        if i >= self.n || j >= self.n || !self.in_band(i, j) {
            return C64::new(0.0, 0.0);
        }
        self.data[i * self.width() + (j + self.kl - i)]
    }
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        assert!(self.in_band(i, j), "entry outside band");
        let w = self.width();
        self.data[i * w + (j + self.kl - i)] = v;
    }
    /// Column range [lo, hi) of nonzero-capable entries in row i.
    fn row_range(&self, i: usize) -> (usize, usize) {
        (i.saturating_sub(self.kl), (i + self.ku + 1).min(self.n))
    }
    pub fn mul(&self, o: &Banded) -> Banded {
        assert_eq!(self.n, o.n);
        let mut out = Banded::zeros(self.n, self.kl + o.kl, self.ku + o.ku);
        for i in 0..self.n {
            let (lo, hi) = self.row_range(i);
            for k in lo..hi {
                let a = self.get(i, k);
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let (lo2, hi2) = o.row_range(k);
                for j in lo2..hi2 {
                    let b = o.get(k, j);
                    let w = out.width();
                    let idx = i * w + (j + out.kl - i);
                    out.data[idx] += a * b;
                }
            }
        }
        out
    }
    /// self + c·o
    pub fn add_scaled(&self, o: &Banded, c: C64) -> Banded {
        assert_eq!(self.n, o.n);
        let mut out = Banded::zeros(self.n, self.kl.max(o.kl), self.ku.max(o.ku));
        for i in 0..self.n {
            let (lo, hi) = self.row_range(i);
            for j in lo..hi {
                let v = out.get(i, j) + self.get(i, j);
                out.set(i, j, v);
            }
            let (lo, hi) = o.row_range(i);
            for j in lo..hi {
                let v = out.get(i, j) + c * o.get(i, j);
                out.set(i, j, v);
            }
        }
        out
    }
    pub fn to_dense(&self) -> Array2<C64> {
        let mut m = Array2::zeros((self.n, self.n));
        for i in 0..self.n {
            let (lo, hi) = self.row_range(i);
            for j in lo..hi {
                m[[i, j]] = self.get(i, j);
            }
        }
        m
    }
    /// Largest distance |i − j| of a nonzero entry.
    pub fn effective_bandwidth(&self) -> usize {
        let mut b = 0;
        for i in 0..self.n {
            let (lo, hi) = self.row_range(i);
            for j in lo..hi {
                if self.get(i, j).norm() > 0.0 {
                    b = b.max(i.abs_diff(j));
                }
            }
        }
        b
    }
}

/// Irreducible unitary representation.
#[derive(Clone, Debug, PartialEq)]
pub enum RepresentationSpec {
    /// One-dimensional: X_j ↦ iα_j on the degree −1 generators, 0 elsewhere.
    Scalar { alpha: Vec<f64> },
    /// Factors through the Heisenberg quotient with X₃ ↦ iħ.
    Schroedinger { hbar: f64 },
    /// Generic representation with quartic sub-Laplacian.
    Generic { lambda: f64, mu: f64, nu: f64 },
}

impl RepresentationSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Scalar { alpha } => {
                if alpha.iter().any(|a| !a.is_finite()) {
                    return Err(Error::InvalidArgument("non-finite α".into()));
                }
            }
            Self::Schroedinger { hbar } => {
                if *hbar == 0.0 || !hbar.is_finite() {
                    return Err(Error::InvalidArgument("Schrödinger representation needs ħ ≠ 0".into()));
                }
            }
            Self::Generic { lambda, mu, nu } => {
                if !(lambda.is_finite() && mu.is_finite() && nu.is_finite()) || lambda * lambda + mu * mu == 0.0 {
                    return Err(Error::InvalidArgument("generic representation needs (λ, μ) ≠ 0".into()));
                }
            }
        }
        Ok(())
    }
    pub fn is_finite_dimensional(&self) -> bool {
        matches!(self, Self::Scalar { .. })
    }
    /// Bandwidth of a single generator in the Hermite basis.
    pub fn generator_bandwidth(&self) -> usize {
        match self {
            Self::Scalar { .. } => 0,
            Self::Schroedinger { .. } => 1,
            Self::Generic { .. } => 2,
        }
    }
    pub fn label(&self) -> String {
        match self {
            Self::Scalar { alpha } => {
                format!("scalar:{}", alpha.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(","))
            }
            Self::Schroedinger { hbar } => format!("schroedinger:{hbar}"),
            Self::Generic { lambda, mu, nu } => format!("generic:{lambda},{mu},{nu}"),
        }
    }
}

/// Hermite-basis truncation: N interior modes, G guard modes, and the length
/// scale s of the basis functions ψ_m(θ/s).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncationConfig {
    pub n: usize,
    pub guard: usize,
    pub scale: f64,
}

impl Default for TruncationConfig {
    fn default() -> Self {
        Self { n: 400, guard: 24, scale: 1.0 }
    }
}

impl TruncationConfig {
    pub fn new(n: usize, guard: usize) -> Self {
        Self { n, guard, scale: 1.0 }
    }
    pub fn with_scale(mut self, s: f64) -> Self {
        self.scale = s;
        self
    }
    pub fn full_dim(&self) -> usize {
        self.n + self.guard
    }
    pub fn validate(&self) -> Result<()> {
        if self.n < 8 {
            return Err(Error::Truncation("N must be at least 8".into()));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::Truncation("basis scale must be positive".into()));
        }
        Ok(())
    }
    /// Recommended guard: 3 × monomial length × generator bandwidth.
    pub fn recommended_guard(max_len: usize, bandwidth: usize) -> usize {
        3 * max_len * bandwidth
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// θ and ∂θ in the Hermite basis of length scale s, truncated to n modes.
pub fn position_derivative(n: usize, s: f64) -> (Banded, Banded) {
    let mut th = Banded::zeros(n, 1, 1);
    let mut d = Banded::zeros(n, 1, 1);
    for m in 0..n.saturating_sub(1) {
        let r = ((m + 1) as f64 / 2.0).sqrt();
        th.set(m, m + 1, c(s * r, 0.0));
        th.set(m + 1, m, c(s * r, 0.0));
        d.set(m, m + 1, c(r / s, 0.0));
        d.set(m + 1, m, c(-r / s, 0.0));
    }
    (th, d)
}

/// Generator matrices X₁…X_dim at size N+G (1×1 for scalar representations).
pub fn generator_matrices(spec: &RepresentationSpec, dim: usize, trunc: &TruncationConfig) -> Result<Vec<Banded>> {
    spec.validate()?;
    match spec {
        RepresentationSpec::Scalar { alpha } => {
            if alpha.len() > dim {
                return Err(Error::InvalidArgument("α has more entries than generators".into()));
            }
            Ok((0..dim).map(|j| Banded::scalar(1, c(0.0, alpha.get(j).copied().unwrap_or(0.0)))).collect())
        }
        RepresentationSpec::Schroedinger { hbar } => {
            trunc.validate()?;
            if dim < 3 {
                return Err(Error::Unsupported("Schrödinger representation needs X₃".into()));
            }
            let n = trunc.full_dim();
            let (th, d) = position_derivative(n, trunc.scale);
            let r = hbar.abs().sqrt();
            let sg = hbar.signum();
            let mut out = vec![
                Banded::zeros(n, 0, 0).add_scaled(&d, c(r, 0.0)),
                Banded::zeros(n, 1, 1).add_scaled(&th, c(0.0, sg * r)),
                Banded::scalar(n, c(0.0, *hbar)),
            ];
            for _ in 3..dim {
                out.push(Banded::zeros(n, 0, 0));
            }
            Ok(out)
        }
        RepresentationSpec::Generic { lambda, mu, nu } => {
            trunc.validate()?;
            if dim != 5 {
                return Err(Error::Unsupported("generic representations exist on the (2,3,5) algebra only".into()));
            }
            let n = trunc.full_dim();
            let (th, d) = position_derivative(n, trunc.scale);
            let cc = (lambda * lambda + mu * mu).cbrt();
            // w = (θ² + ν c⁻²)/2
            let w = th.mul(&th).add_scaled(&Banded::identity(n), c(nu / (cc * cc), 0.0));
            let w = Banded::zeros(n, 0, 0).add_scaled(&w, c(0.5, 0.0));
            let z = Banded::zeros(n, 0, 0);
            let x1 = z.add_scaled(&d, c(lambda / cc, 0.0)).add_scaled(&w, c(0.0, -mu / cc));
            let x2 = z.add_scaled(&d, c(mu / cc, 0.0)).add_scaled(&w, c(0.0, lambda / cc));
            let x3 = z.add_scaled(&th, c(0.0, cc));
            Ok(vec![x1, x2, x3, Banded::scalar(n, c(0.0, *lambda)), Banded::scalar(n, c(0.0, *mu))])
        }
    }
}

/// Block matrix obtained by evaluating an operator polynomial matrix.
/// Each block is the full (N+G)-dimensional banded product.
#[derive(Clone, Debug)]
pub struct EvaluatedMatrix {
    pub rows: usize,
    pub cols: usize,
    /// Size of every block (N+G, or 1 for scalar representations).
    pub full: usize,
    /// Columns per block that are exact (N, or 1).
    pub interior: usize,
    pub blocks: Vec<Banded>,
}

impl EvaluatedMatrix {
    pub fn block(&self, i: usize, j: usize) -> &Banded {
        &self.blocks[i * self.cols + j]
    }
    /// Dense (rows·full) × (cols·interior) matrix: exact images of the first
    /// `interior` modes of every input block.
    pub fn exact_columns(&self) -> Array2<C64> {
        let mut m = Array2::zeros((self.rows * self.full, self.cols * self.interior));
        for bi in 0..self.rows {
            for bj in 0..self.cols {
                let b = self.block(bi, bj);
                for j in 0..self.interior {
                    let lo = j.saturating_sub(b.ku);
                    let hi = (j + b.kl + 1).min(self.full);
                    for i in lo..hi {
                        m[[bi * self.full + i, bj * self.interior + j]] = b.get(i, j);
                    }
                }
            }
        }
        m
    }
    /// Compression to the interior: (rows·N) × (cols·N).
    pub fn interior_matrix(&self) -> Array2<C64> {
        let n = self.interior;
        let mut m = Array2::zeros((self.rows * n, self.cols * n));
        for bi in 0..self.rows {
            for bj in 0..self.cols {
                let b = self.block(bi, bj);
                for i in 0..n {
                    for j in 0..n {
                        m[[bi * n + i, bj * n + j]] = b.get(i, j);
                    }
                }
            }
        }
        m
    }
}

/// Evaluates an operator polynomial matrix in a representation.
pub fn evaluate(m: &OpPolyMatrix, spec: &RepresentationSpec, dim: usize, trunc: &TruncationConfig) -> Result<EvaluatedMatrix> {
    let gens = generator_matrices(spec, dim, trunc)?;
    let (full, interior) = if spec.is_finite_dimensional() { (1, 1) } else { (trunc.full_dim(), trunc.n) };
    if !spec.is_finite_dimensional() {
        let need = m.max_length() * spec.generator_bandwidth() + 1;
        if trunc.guard < need {
            return Err(Error::Truncation(format!(
                "guard band {} below the {} modes needed for monomials of length {}",
                trunc.guard,
                need,
                m.max_length()
            )));
        }
    }
    let mut powers: HashMap<(usize, u8), Banded> = HashMap::new();
    let mut blocks = Vec::with_capacity(m.entries.len());
    for e in &m.entries {
        blocks.push(evaluate_element(e, &gens, full, &mut powers));
    }
    Ok(EvaluatedMatrix { rows: m.rows, cols: m.cols, full, interior, blocks })
}

fn evaluate_element(e: &UEAElement, gens: &[Banded], full: usize, powers: &mut HashMap<(usize, u8), Banded>) -> Banded {
    let mut acc = Banded::zeros(full, 0, 0);
    for (mono, coef) in &e.terms {
        let mut prod: Option<Banded> = None;
        for (j, &k) in mono.0.iter().enumerate().take(gens.len()) {
            if k == 0 {
                continue;
            }
            let p = power(gens, j, k, powers);
            prod = Some(match prod {
                None => p,
                Some(x) => x.mul(&p),
            });
        }
        let prod = prod.unwrap_or_else(|| Banded::identity(full));
        acc = acc.add_scaled(&prod, coef.to_c64());
    }
    acc
}

fn power(gens: &[Banded], j: usize, k: u8, cache: &mut HashMap<(usize, u8), Banded>) -> Banded {
    if let Some(p) = cache.get(&(j, k)) {
        return p.clone();
    }
    let p = if k == 1 { gens[j].clone() } else { power(gens, j, k - 1, cache).mul(&gens[j]) };
    cache.insert((j, k), p.clone());
    p
}

/// ‖ρ(X₃X₃ + 2X₁X₅ − 2X₂X₄) − ν‖_∞ on the interior block.
pub fn casimir_check(spec: &RepresentationSpec, trunc: &TruncationConfig) -> Result<f64> {
    let RepresentationSpec::Generic { nu, .. } = spec else {
        return Err(Error::InvalidArgument("Casimir check needs a generic representation".into()));
    };
    let l = crate::graded_lie::builtin_235();
    let env = crate::enveloping::Enveloping::new(l)?;
    let two = ExactScalar::int(2);
    let cas = env
        .word(&[2, 2])
        .add(&env.word(&[0, 4]).scale(&two))
        .sub(&env.word(&[1, 3]).scale(&two));
    let ev = evaluate(&OpPolyMatrix::from_rows(vec![vec![cas]]), spec, 5, trunc)?;
    let m = ev.interior_matrix();
    let mut r: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let target = if i == j { *nu } else { 0.0 };
            r = r.max((m[[i, j]] - c(target, 0.0)).norm());
        }
    }
    Ok(r)
}

/// Exact evaluation in the scalar representation X_j ↦ iα_j (α_j = 0 beyond
/// the given entries).
pub fn evaluate_scalar_exact(m: &OpPolyMatrix, alpha: &[Q]) -> ExactMatrix {
    let mut out = ExactMatrix::zeros(m.rows, m.cols);
    for i in 0..m.rows {
        for j in 0..m.cols {
            let mut acc = ExactScalar::zero();
            for (mono, coef) in &m.get(i, j).terms {
                let mut t = coef.clone();
                for (k, &e) in mono.0.iter().enumerate() {
                    for _ in 0..e {
                        let v = alpha.get(k).cloned().unwrap_or_else(Q::zero);
                        t = &t * &(&ExactScalar::i() * &ExactScalar::rational(v));
                    }
                }
                acc += &t;
            }
            out.set(i, j, acc);
        }
    }
    out
}

/// Exact rational value of a finite float.
pub fn rational_from_f64(x: f64) -> Result<Q> {
    Q::from_float(x).ok_or_else(|| Error::InvalidArgument(format!("non-finite value {x}")))
}

/// Hermite basis scale adapted to a generic representation: balances the
/// position and momentum extent of the classically allowed region at the
/// energy of mode n/2 of the quartic oscillator −∂² + w(θ)².
pub fn suggested_scale(spec: &RepresentationSpec, n: usize) -> f64 {
    let RepresentationSpec::Generic { lambda, mu, nu } = spec else {
        return 1.0;
    };
    let cc = (lambda * lambda + mu * mu).cbrt();
    let nup = nu / (cc * cc);
    let target = n as f64 / 2.0;
    let count = |e: f64| {
        // WKB state count (1/π)∫ sqrt(E − w²) dθ over the allowed region
        let th_max = (2.0 * e.sqrt() - nup).max(0.0).sqrt();
        let m = 2000;
        let mut acc = 0.0;
        for k in 0..m {
            let th = -th_max + (k as f64 + 0.5) * 2.0 * th_max / m as f64;
            let w = (th * th + nup) / 2.0;
            acc += (e - w * w).max(0.0).sqrt();
        }
        acc * 2.0 * th_max / m as f64 / std::f64::consts::PI
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    while count(hi) < target {
        hi *= 2.0;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if count(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let e = hi;
    let th_t = (2.0 * e.sqrt() - nup).max(1e-12).sqrt();
    (th_t / e.sqrt()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn banded_product_matches_dense() {
        let (th, d) = position_derivative(12, 1.3);
        let p = th.mul(&d).mul(&th);
        let dense = th.to_dense().dot(&d.to_dense()).dot(&th.to_dense());
        for i in 0..12 {
            for j in 0..12 {
                assert!((p.get(i, j) - dense[[i, j]]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn canonical_commutator() {
        let (th, d) = position_derivative(20, 0.7);
        let cm = d.mul(&th).add_scaled(&th.mul(&d), c(-1.0, 0.0));
        for i in 0..19 {
            for j in 0..19 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((cm.get(i, j) - c(want, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn schroedinger_generators() {
        let g = generator_matrices(&RepresentationSpec::Schroedinger { hbar: 1.0 }, 5, &TruncationConfig::new(8, 4)).unwrap();
        assert_eq!(g[2].get(3, 3), c(0.0, 1.0));
        assert_eq!(g[3].get(3, 3), c(0.0, 0.0));
        assert_eq!(g[4].get(0, 0), c(0.0, 0.0));
    }

    #[test]
    fn scalar_generators() {
        let g = generator_matrices(&RepresentationSpec::Scalar { alpha: vec![1.0, 0.0] }, 5, &TruncationConfig::default()).unwrap();
        assert_eq!(g[0].get(0, 0), c(0.0, 1.0));
        assert!(g[1..].iter().all(|m| m.get(0, 0) == c(0.0, 0.0)));
    }

    #[test]
    fn invalid_specs() {
        assert!(RepresentationSpec::Schroedinger { hbar: 0.0 }.validate().is_err());
        assert!(RepresentationSpec::Generic { lambda: 0.0, mu: 0.0, nu: 1.0 }.validate().is_err());
        assert!(TruncationConfig::new(4, 24).validate().is_err());
    }
}
