//! Spectra of D_q^{*h}D_q in a representation, closed-form comparison
//! spectra, auxiliary operators of the Schrödinger analysis, and
//! Poincaré-duality checks.
//!
//! Eigenvalues are squared singular values of the congruence-weighted factor
//! (L_{q+1}ᴴ ⊗ I)·ρ(D_q)·(L_q⁻ᴴ ⊗ I), where h_q = L_q L_qᴴ. The factor keeps
//! all N+G output modes of every block, so D_q^{*h}D_q is compressed to the
//! first N modes without truncating the intermediate space.

use crate::enveloping::{Enveloping, OpPolyMatrix};
use crate::error::{Error, Result};
use crate::exact_matrix::ExactMatrix;
use crate::graded_lie::{builtin_235, AlgebraKind};
use crate::reps::{evaluate, evaluate_scalar_exact, rational_from_f64, RepresentationSpec, TruncationConfig};
use crate::rumin::{adjoint_matrix, RuminComplex};
use crate::scalar::ExactScalar;
use ndarray::{s, Array2};
use ndarray_linalg::{Cholesky, EigValsh, JobSvd, Inverse, SVDDC, UPLO};
use num_complex::Complex64 as C64;
use serde::Serialize;

pub type CMat = Array2<C64>;

/// Converts exact Hermitian forms to complex matrices.
pub fn forms_to_numeric(h: &[ExactMatrix]) -> Vec<CMat> {
    h.iter()
        .map(|m| {
            let mut out = Array2::zeros((m.rows, m.cols));
            for i in 0..m.rows {
                for j in 0..m.cols {
                    out[[i, j]] = m.get(i, j).to_c64();
                }
            }
            out
        })
        .collect()
}

/// Identity forms (the standard metric in normal form a = 1, b = I).
pub fn identity_forms(betti: &[usize]) -> Vec<CMat> {
    betti.iter().map(|&b| Array2::eye(b)).collect()
}

/// Lower Cholesky factor L with h = L Lᴴ.
pub fn cholesky_lower(h: &CMat) -> Result<CMat> {
    h.cholesky(UPLO::Lower).map_err(|_| Error::NotPositiveDefinite("Hermitian form".into()))
}

/// (Lᴴ ⊗ I)·M·(R ⊗ I) for block matrices with row block size `nr` and
/// column block size `nc`, exploiting the block structure.
fn congruence(m: &CMat, left: &CMat, nr: usize, right: &CMat, nc: usize) -> CMat {
    let (br, bc) = (left.nrows(), right.nrows());
    let mut tmp: CMat = Array2::zeros(m.dim());
    // left multiply by (left ⊗ I)
    for i in 0..br {
        for k in 0..br {
            let c = left[[i, k]];
            if c == C64::new(0.0, 0.0) {
                continue;
            }
            let src = m.slice(s![k * nr..(k + 1) * nr, ..]).to_owned();
            let mut dst = tmp.slice_mut(s![i * nr..(i + 1) * nr, ..]);
            dst.scaled_add(c, &src);
        }
    }
    let mut out: CMat = Array2::zeros(m.dim());
    for j in 0..bc {
        for k in 0..bc {
            let c = right[[k, j]];
            if c == C64::new(0.0, 0.0) {
                continue;
            }
            let src = tmp.slice(s![.., k * nc..(k + 1) * nc]).to_owned();
            let mut dst = out.slice_mut(s![.., j * nc..(j + 1) * nc]);
            dst.scaled_add(c, &src);
        }
    }
    out
}

fn conj_t(m: &CMat) -> CMat {
    m.t().mapv(|z| z.conj())
}

/// Eigenvalues of an operator spectrum together with truncation metadata.
#[derive(Clone, Debug, Serialize)]
pub struct SpectrumResult {
    /// Ascending; kernel eigenvalues first.
    pub eigenvalues: Vec<f64>,
    pub kernel_count: usize,
    pub trust_count: usize,
    pub n: Option<usize>,
    pub guard: Option<usize>,
    pub scale: Option<f64>,
    pub kernel_threshold: f64,
    /// Largest relative shift of trusted nonzero eigenvalues between N/2 and N.
    pub convergence_estimate: Option<f64>,
    /// Eigenvalues removed from the trust window for lacking a partner in
    /// the coarse run.
    pub discarded: Vec<f64>,
}

impl SpectrumResult {
    fn from_eigenvalues(mut eig: Vec<f64>, trunc: Option<&TruncationConfig>) -> Self {
        eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let max = eig.last().copied().unwrap_or(0.0).max(0.0);
        let (kernel_count, trust_count, thr) = match trunc {
            None => {
                let thr = (1e-12 * max).max(1e-12);
                let k = eig.iter().filter(|&&x| x < thr).count();
                (k, eig.len(), thr)
            }
            Some(_) => {
                let mut thr = (1e-8 * max).max(1e-12);
                let mut k;
                let mut t;
                let mut iter = 0;
                loop {
                    k = eig.iter().filter(|&&x| x < thr).count();
                    t = k + (eig.len() - k) / 2;
                    let top = if t > 0 { eig[t - 1] } else { 0.0 };
                    let next = (1e-8 * top).max(1e-12);
                    iter += 1;
                    if next == thr || iter > 8 {
                        break;
                    }
                    thr = next;
                }
                // numerical zeros sit near ε²·max and may form several
                // clusters; the cut goes at the highest multiplicative gap
                // of at least 10⁶ below the relative threshold
                let cut = (0..k).rev().find(|&i| {
                    let hi = if i + 1 < eig.len() { eig[i + 1] } else { f64::INFINITY };
                    hi / eig[i].max(f64::MIN_POSITIVE) >= 1e6
                });
                if let Some(i) = cut.filter(|&i| i + 1 < k) {
                    k = i + 1;
                    thr = (eig[k - 1].max(1e-300) * eig[k]).sqrt().max(1e-12f64.min(eig[k] / 2.0));
                    t = k + (eig.len() - k) / 2;
                }
                (k, t, thr)
            }
        };
        Self {
            eigenvalues: eig,
            kernel_count,
            trust_count,
            n: trunc.map(|t| t.n),
            guard: trunc.map(|t| t.guard),
            scale: trunc.map(|t| t.scale),
            kernel_threshold: thr,
            convergence_estimate: if trunc.is_none() { Some(0.0) } else { None },
            discarded: Vec::new(),
        }
    }
    pub fn nonzero(&self) -> &[f64] {
        &self.eigenvalues[self.kernel_count..]
    }
    pub fn trusted_nonzero(&self) -> &[f64] {
        &self.eigenvalues[self.kernel_count..self.trust_count.max(self.kernel_count)]
    }
    pub fn top_trusted(&self) -> Option<f64> {
        self.trusted_nonzero().last().copied()
    }
    /// Matches the trusted nonzero eigenvalues against a coarser run by
    /// value. With `tol` set, the whole coarse nonzero spectrum is the
    /// reference, fine eigenvalues without a coarse partner
    /// within `tol` are moved to `discarded` (truncation artifacts appear at
    /// N-dependent positions), and the window ends at the first three
    /// consecutive misses. Records the largest matched relative shift.
    pub fn compare_with_coarse(&mut self, coarse: &SpectrumResult, tol: Option<f64>) {
        let fine = self.trusted_nonzero().to_vec();
        let cs = if tol.is_some() { coarse.nonzero() } else { coarse.trusted_nonzero() };
        let Some(&ctop) = cs.last() else {
            self.convergence_estimate = Some(f64::INFINITY);
            if tol.is_some() {
                self.trust_count = self.kernel_count;
            }
            return;
        };
        let nearest = |v: f64| -> f64 {
            let j = cs.partition_point(|&w| w < v);
            [j.saturating_sub(1), j.min(cs.len() - 1)]
                .iter()
                .map(|&k| (cs[k] - v).abs() / v.abs().max(f64::MIN_POSITIVE))
                .fold(f64::INFINITY, f64::min)
        };
        let Some(t) = tol else {
            let m = fine.len().min(cs.len());
            let worst = (0..m).map(|i| (fine[i] - cs[i]).abs() / fine[i].abs().max(f64::MIN_POSITIVE)).fold(0.0, f64::max);
            self.convergence_estimate = Some(worst);
            return;
        };
        let mut kept = Vec::new();
        let mut dropped = Vec::new();
        let mut pending = Vec::new();
        let mut worst: f64 = 0.0;
        for &v in &fine {
            if v > ctop * (1.0 + t) {
                break;
            }
            let r = nearest(v);
            if r <= t {
                dropped.append(&mut pending);
                kept.push(v);
                worst = worst.max(r);
            } else {
                pending.push(v);
                if pending.len() >= 3 {
                    break;
                }
            }
        }
        let k = self.kernel_count;
        let rest: Vec<f64> = self.eigenvalues[k..]
            .iter()
            .copied()
            .filter(|v| !kept.contains(v) && !dropped.contains(v))
            .collect();
        self.eigenvalues.truncate(k);
        self.eigenvalues.extend_from_slice(&kept);
        self.trust_count = self.eigenvalues.len();
        self.eigenvalues.extend(rest);
        self.discarded.extend(dropped);
        self.convergence_estimate = Some(worst);
    }
}

/// Singular values via divide and conquer.
pub fn singular_values(m: &CMat) -> Result<Vec<f64>> {
    if m.is_empty() {
        return Ok(vec![]);
    }
    let (_, s, _) = m.svddc(JobSvd::None).map_err(|e| Error::Backend(e.to_string()))?;
    Ok(s.to_vec())
}

/// Singular values by one-sided Jacobi rotations; slower than
/// [`singular_values`] but accurate to high relative precision for graded
/// matrices.
pub fn jacobi_singular_values(m: &CMat) -> Vec<f64> {
    let mut a = m.clone();
    let n = a.ncols();
    let tol = 1e-15;
    for _sweep in 0..60 {
        let mut rotated = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, C64::new(0.0, 0.0));
                for r in 0..a.nrows() {
                    let (x, y) = (a[[r, i]], a[[r, j]]);
                    alpha += x.norm_sqr();
                    beta += y.norm_sqr();
                    gamma += x.conj() * y;
                }
                let g = gamma.norm();
                if g <= tol * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = c * t;
                for r in 0..a.nrows() {
                    let x = a[[r, i]];
                    let y = a[[r, j]] * phase.conj();
                    a[[r, i]] = x * c - y * sn;
                    a[[r, j]] = x * sn + y * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    (0..n).map(|j| a.column(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).collect()
}

/// Eigenvalues of FᴴF from the singular values of a rows × cols factor.
fn gram_eigenvalues(sv: Vec<f64>, cols: usize) -> Vec<f64> {
    let mut eig: Vec<f64> = sv.into_iter().map(|x| x * x).collect();
    eig.resize(cols.max(eig.len()), 0.0);
    eig.truncate(cols);
    eig
}

/// Congruence-weighted factor of an evaluated operator matrix F from H^src
/// to the given target forms (one per row block).
fn weighted_factor(
    f: &OpPolyMatrix,
    env: &Enveloping,
    spec: &RepresentationSpec,
    h_src: &CMat,
    h_dst: &CMat,
    trunc: &TruncationConfig,
) -> Result<CMat> {
    let ev = evaluate(f, spec, env.dim(), trunc)?;
    let m = ev.exact_columns();
    let l_dst = cholesky_lower(h_dst)?;
    let l_src = cholesky_lower(h_src)?;
    let r = conj_t(&l_src).inv().map_err(|e| Error::Backend(e.to_string()))?;
    Ok(congruence(&m, &conj_t(&l_dst), ev.full, &r, ev.interior))
}

/// Spectrum of ρ(D_q)^{*h}ρ(D_q).
pub fn laplacian_spectrum(
    c: &RuminComplex,
    spec: &RepresentationSpec,
    h: &[CMat],
    q: usize,
    trunc: &TruncationConfig,
) -> Result<SpectrumResult> {
    let d = c.d.get(q).ok_or(Error::DegreeOutOfRange(q))?;
    check_forms(c, h)?;
    let k = weighted_factor(d, &c.env, spec, &h[q], &h[q + 1], trunc)?;
    let eig = gram_eigenvalues(singular_values(&k)?, k.ncols());
    let t = if spec.is_finite_dimensional() { None } else { Some(trunc) };
    Ok(SpectrumResult::from_eigenvalues(eig, t))
}

fn check_forms(c: &RuminComplex, h: &[CMat]) -> Result<()> {
    if h.len() != c.degrees() || h.iter().zip(c.betti()).any(|(m, &b)| m.nrows() != b || m.ncols() != b) {
        return Err(Error::InvalidArgument("Hermitian forms do not match the cohomology dimensions".into()));
    }
    Ok(())
}

/// [`laplacian_spectrum`] with a convergence estimate from a run at N/2;
/// with `tol` set, the trust window is cut where the shift exceeds it.
pub fn laplacian_spectrum_converged(
    c: &RuminComplex,
    spec: &RepresentationSpec,
    h: &[CMat],
    q: usize,
    trunc: &TruncationConfig,
    tol: Option<f64>,
) -> Result<SpectrumResult> {
    let mut fine = laplacian_spectrum(c, spec, h, q, trunc)?;
    if spec.is_finite_dimensional() {
        return Ok(fine);
    }
    let coarse_cfg = TruncationConfig { n: trunc.n / 2, ..*trunc };
    let coarse = laplacian_spectrum(c, spec, h, q, &coarse_cfg)?;
    fine.compare_with_coarse(&coarse, tol);
    Ok(fine)
}

/// Spectrum of Δ_{h,q} assembled from the nonzero spectra of the adjacent
/// D operators: spec_*(D_{q−1}^{*h}D_{q−1})^{a_{q−1}} ⊔ spec_*(D_q^{*h}D_q)^{a_q}.
pub fn rumin_seshadri_spectrum(
    c: &RuminComplex,
    spec: &RepresentationSpec,
    h: &[CMat],
    q: usize,
    trunc: &TruncationConfig,
    tol: Option<f64>,
) -> Result<SpectrumResult> {
    let top = c.d.len();
    if q > top {
        return Err(Error::DegreeOutOfRange(q));
    }
    let mut parts = Vec::new();
    if q > 0 {
        parts.push((laplacian_spectrum_converged(c, spec, h, q - 1, trunc, tol)?, c.a[q - 1]));
    }
    if q < top {
        parts.push((laplacian_spectrum_converged(c, spec, h, q, trunc, tol)?, c.a[q]));
    }
    let mut eig = Vec::new();
    let mut cutoff = f64::INFINITY;
    let mut conv: f64 = 0.0;
    for (sp, a) in &parts {
        let a = *a as i32;
        let vals: Vec<f64> = sp.trusted_nonzero().iter().map(|x| x.powi(a)).collect();
        if let Some(t) = vals.last() {
            cutoff = cutoff.min(*t);
        }
        if let Some(e) = sp.convergence_estimate {
            conv = conv.max(e * a as f64);
        }
        eig.extend(vals);
    }
    eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let kernel = if spec.is_finite_dimensional() { c.betti()[q] - eig.len() } else { 0 };
    let trusted = eig.iter().filter(|&&x| x <= cutoff).count();
    let mut all = vec![0.0; kernel];
    all.extend(eig);
    let first = &parts[0].0;
    Ok(SpectrumResult {
        eigenvalues: all,
        kernel_count: kernel,
        trust_count: kernel + trusted,
        n: first.n,
        guard: first.guard,
        scale: first.scale,
        kernel_threshold: parts.iter().map(|p| p.0.kernel_threshold).fold(0.0, f64::max),
        convergence_estimate: Some(conv),
        discarded: parts.iter().flat_map(|p| p.0.discarded.iter().map(|x| x.powi(p.1 as i32))).collect(),
    })
}

/// Spectrum of Δ_{h,q} from the directly composed operator polynomial,
/// written as FᴴF with F = (X^{a/2} or E·X^{(a−1)/2}) for each summand
/// X = EᴴE, and computed by one-sided Jacobi. Returns nonzero eigenvalues,
/// ascending, of which the lowest half are trustworthy.
pub fn rumin_seshadri_direct(
    c: &RuminComplex,
    spec: &RepresentationSpec,
    h: &[CMat],
    h_exact: &[ExactMatrix],
    q: usize,
    trunc: &TruncationConfig,
) -> Result<Vec<f64>> {
    let top = c.d.len();
    if q > top {
        return Err(Error::DegreeOutOfRange(q));
    }
    check_forms(c, h)?;
    let env = &c.env;
    let mut blocks: Vec<CMat> = Vec::new();
    let mut push = |e: OpPolyMatrix, x: OpPolyMatrix, a: u32, tgt_e: usize| -> Result<()> {
        let (f, tgt) = if a % 2 == 0 { (x.pow(a / 2, env), q) } else { (e.mul(&x.pow((a - 1) / 2, env), env), tgt_e) };
        blocks.push(weighted_factor(&f, env, spec, &h[q], &h[tgt], trunc)?);
        Ok(())
    };
    if q > 0 {
        let d = c.d[q - 1].clone();
        let ds = adjoint_matrix(env, h_exact, &d, q - 1)?;
        let x = d.mul(&ds, env);
        push(ds, x, c.a[q - 1], q - 1)?;
    }
    if q < top {
        let d = c.d[q].clone();
        let ds = adjoint_matrix(env, h_exact, &d, q)?;
        let x = ds.mul(&d, env);
        push(d, x, c.a[q], q + 1)?;
    }
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let cols = blocks[0].ncols();
    let mut f = Array2::zeros((rows, cols));
    let mut off = 0;
    for b in &blocks {
        f.slice_mut(s![off..off + b.nrows(), ..]).assign(b);
        off += b.nrows();
    }
    let mut eig: Vec<f64> = jacobi_singular_values(&f).into_iter().map(|x| x * x).collect();
    eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let max = eig.last().copied().unwrap_or(0.0);
    Ok(eig.into_iter().filter(|&x| x > 1e-12 * max.max(1.0)).collect())
}

/// Normal-form metric data (a, b₁₁, b₂₂).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormalMetric {
    pub a: f64,
    pub b11: f64,
    pub b22: f64,
}

impl NormalMetric {
    pub fn standard() -> Self {
        Self { a: 1.0, b11: 1.0, b22: 1.0 }
    }
    /// Factor by which h_{q+1}/h_q rescales D_q^{*h}D_q when b = βI.
    fn scaling(&self, q: usize) -> Result<f64> {
        if (self.b11 - self.b22).abs() > 1e-15 * self.b11.abs().max(1.0) {
            return Err(Error::Unsupported("closed-form spectra need b proportional to g₋₁".into()));
        }
        let (a, b) = (self.a, self.b11);
        Ok(match q {
            0 | 4 => 1.0,
            1 | 3 => 1.0 / (a * b),
            2 => 1.0 / a,
            _ => return Err(Error::DegreeOutOfRange(q)),
        })
    }
}

/// First `count` nonzero eigenvalues of D_q^{*h}D_q on the (2,3,5) algebra,
/// from the closed forms (Schrödinger, metric with b ∝ g₋₁) or from the
/// exact finite matrix (scalar).
pub fn closed_form_spectrum(rep: &RepresentationSpec, metric: &NormalMetric, q: usize, count: usize) -> Result<Vec<f64>> {
    match rep {
        RepresentationSpec::Schroedinger { hbar } => {
            let s = metric.scaling(q)?;
            let hb = hbar.abs();
            let qq = if q > 2 { 4 - q } else { q };
            let mut out: Vec<f64> = match qq {
                0 => (0..count).map(|n| hb * (2 * n + 1) as f64).collect(),
                1 => (0..count)
                    .map(|n| {
                        let m = (2 * n + 1) as f64;
                        hb.powi(3) * m * (m * m - 2.0).abs()
                    })
                    .collect(),
                _ => {
                    let mut v = Vec::with_capacity(2 * count);
                    for n in 0..count {
                        let m = (2 * n + 1) as f64;
                        let r = (8.0 * m * m + 9.0).sqrt();
                        v.push(hb * hb * ((r + 5.0) / 4.0).powi(2));
                        v.push(hb * hb * ((r - 5.0) / 4.0).powi(2));
                    }
                    v
                }
            };
            out.sort_by(|a, b| a.partial_cmp(b).unwrap());
            out.truncate(count);
            Ok(out.into_iter().map(|x| x * s).collect())
        }
        RepresentationSpec::Scalar { alpha } => {
            let l = builtin_235();
            let c = RuminComplex::new(l)?;
            let al: Vec<_> = alpha.iter().map(|&x| rational_from_f64(x)).collect::<Result<_>>()?;
            let h = crate::metric::hq_normal_form(
                &rational_from_f64(metric.a)?,
                &rational_from_f64(metric.b11)?,
                &rational_from_f64(metric.b22)?,
            );
            let mut v = scalar_nonzero_spectrum(&c, &al, &h, q)?;
            v.truncate(count);
            Ok(v)
        }
        RepresentationSpec::Generic { .. } => Err(Error::Unsupported("generic representations have no closed-form spectrum".into())),
    }
}

/// h_q⁻¹ρ(D_q)ᴴh_{q+1}ρ(D_q) in a scalar representation, exactly.
pub fn scalar_operator_exact(c: &RuminComplex, alpha: &[crate::scalar::Q], h: &[ExactMatrix], q: usize) -> Result<ExactMatrix> {
    let d = c.d.get(q).ok_or(Error::DegreeOutOfRange(q))?;
    let m = evaluate_scalar_exact(d, alpha);
    let hinv = h[q].inverse().ok_or_else(|| Error::Singular(format!("h_{q}")))?;
    Ok(hinv.mul(&m.conj_transpose()).mul(&h[q + 1]).mul(&m))
}

/// Nonzero eigenvalues of the exact scalar operator, from the roots of its
/// characteristic polynomial (rank ≤ 2, or a single repeated root).
pub fn scalar_nonzero_spectrum(c: &RuminComplex, alpha: &[crate::scalar::Q], h: &[ExactMatrix], q: usize) -> Result<Vec<f64>> {
    let p = scalar_operator_exact(c, alpha, h, q)?;
    let cp: Vec<f64> = p.char_poly().iter().map(|z| z.to_c64().re).collect();
    let (rank, _) = p.pseudo_determinant();
    let n = p.rows;
    // nonzero part: x^r + c_{n−1}x^{r−1} + … + c_{n−r}
    let co = &cp[n - rank..];
    let mut roots = match rank {
        0 => vec![],
        1 => vec![-co[0]],
        2 => {
            let (b, c0) = (co[1], co[0]);
            let disc = (b * b - 4.0 * c0).max(0.0).sqrt();
            vec![(-b - disc) / 2.0, (-b + disc) / 2.0]
        }
        r => {
            let x = -co[r - 1] / r as f64;
            vec![x; r]
        }
    };
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(roots)
}

/// Auxiliary operators of the Schrödinger analysis, compressed to the
/// interior (A, G) or constant (J, ⋆₃).
#[derive(Clone, Debug)]
pub struct AuxiliaryOperators {
    pub a: CMat,
    /// Nonzero eigenvalues of A², ascending, lowest half of the window.
    pub a_squared_spectrum: Vec<f64>,
    pub j: CMat,
    pub star3: CMat,
    pub g: CMat,
    /// Eigenvalues of G/i, ascending.
    pub g_spectrum: Vec<f64>,
}

pub fn auxiliary_operators(hbar: f64, trunc: &TruncationConfig) -> Result<AuxiliaryOperators> {
    let spec = RepresentationSpec::Schroedinger { hbar };
    spec.validate()?;
    let env = Enveloping::new(builtin_235())?;
    let w = |idx: &[usize]| env.word(idx);
    let m1 = ExactScalar::int(-1);
    let lap = w(&[0, 0]).scale(&m1).sub(&w(&[1, 1]));
    let r2 = ExactScalar::surd(crate::scalar::q(0), crate::scalar::qf(1, 2));
    let a = OpPolyMatrix::from_rows(vec![
        vec![w(&[1, 1]).scale(&m1), w(&[1, 0]).sub(&w(&[2]))],
        vec![w(&[0, 1]).add(&w(&[2])), w(&[0, 0]).scale(&m1)],
    ]);
    let g = OpPolyMatrix::from_rows(vec![
        vec![w(&[2]).scale(&ExactScalar::int(-2)), lap.scale(&r2)],
        vec![lap.scale(&r2).scale(&m1), w(&[2]).scale(&ExactScalar::frac(-1, 2))],
    ]);
    let ea = evaluate(&a, &spec, 5, trunc)?;
    let eg = evaluate(&g, &spec, 5, trunc)?;
    let mut a2 = gram_eigenvalues(singular_values(&ea.exact_columns())?, 2 * trunc.n);
    a2.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let max = a2.last().copied().unwrap_or(0.0);
    let nz: Vec<f64> = a2.into_iter().filter(|&x| x > 1e-10 * max).collect();
    let half = nz.len() / 2;
    let gi = eg.interior_matrix().mapv(|z| z * C64::new(0.0, -1.0));
    let mut gs = gi.eigvalsh(UPLO::Lower).map_err(|e| Error::Backend(e.to_string()))?.to_vec();
    gs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let cst = |rows: &[&[f64]]| {
        Array2::from_shape_fn((rows.len(), rows[0].len()), |(i, j)| C64::new(rows[i][j], 0.0))
    };
    Ok(AuxiliaryOperators {
        a: ea.interior_matrix(),
        a_squared_spectrum: nz[..half].to_vec(),
        j: cst(&[&[0.0, 1.0], &[-1.0, 0.0]]),
        star3: cst(&[&[0.0, 0.0, 1.0], &[0.0, -1.0, 0.0], &[1.0, 0.0, 0.0]]),
        g: eg.interior_matrix(),
        g_spectrum: gs,
    })
}

/// Largest relative discrepancy between the spectra of D_q^{*h}D_q and
/// D_{q'}^{*h}D_{q'}, q' the Poincaré-dual index: every trusted nonzero
/// eigenvalue of either side below both trust tops is matched by value
/// against all nonzero eigenvalues computed on the other side, including
/// those the convergence filter set aside.
pub fn poincare_check(
    c: &RuminComplex,
    spec: &RepresentationSpec,
    h: &[CMat],
    q: usize,
    trunc: &TruncationConfig,
) -> Result<f64> {
    let top = c.d.len();
    if q >= top {
        return Err(Error::DegreeOutOfRange(q));
    }
    let dual = top - 1 - q;
    if dual == q {
        return Ok(0.0);
    }
    let a = laplacian_spectrum_converged(c, spec, h, q, trunc, Some(1e-9))?;
    let b = laplacian_spectrum_converged(c, spec, h, dual, trunc, Some(1e-9))?;
    let limit = a.top_trusted().unwrap_or(0.0).min(b.top_trusted().unwrap_or(0.0));
    let pool = |s: &SpectrumResult| -> Vec<f64> {
        let mut v: Vec<f64> = s.nonzero().iter().chain(&s.discarded).copied().collect();
        v.sort_by(|x, y| x.partial_cmp(y).unwrap());
        v
    };
    let worst = |from: &SpectrumResult, other: &[f64]| -> f64 {
        from.trusted_nonzero()
            .iter()
            .filter(|&&x| x <= limit)
            .map(|&x| {
                let j = other.partition_point(|&w| w < x);
                [j.saturating_sub(1), j.min(other.len().saturating_sub(1))]
                    .iter()
                    .filter_map(|&k| other.get(k))
                    .map(|w| (w - x).abs() / x)
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    Ok(worst(&a, &pool(&b)).max(worst(&b, &pool(&a))))
}

/// Hermitian forms in normal form as complex matrices, for the algebras
/// that have one.
pub fn normal_forms(kind: &AlgebraKind, metric: &NormalMetric) -> Result<(Vec<ExactMatrix>, Vec<CMat>)> {
    let a = rational_from_f64(metric.a)?;
    let h = match kind {
        AlgebraKind::G235 => crate::metric::hq_normal_form(&a, &rational_from_f64(metric.b11)?, &rational_from_f64(metric.b22)?),
        AlgebraKind::Heisenberg => {
            let ai = ExactScalar::rational(crate::scalar::q(1) / &a);
            vec![
                ExactMatrix::identity(1),
                ExactMatrix::identity(2),
                ExactMatrix::identity(2).scale(&ai),
                ExactMatrix::identity(1).scale(&ai),
            ]
        }
        AlgebraKind::Abelian(n) => (0..=*n).map(|q| ExactMatrix::identity(crate::cohomology::wedge_basis(*n, q).len())).collect(),
    };
    let num = forms_to_numeric(&h);
    Ok((h, num))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_matches_lapack() {
        let m = Array2::from_shape_fn((7, 4), |(i, j)| C64::new((i * 3 + j) as f64 % 5.0 - 1.0, (i + 2 * j) as f64 % 3.0));
        let mut a = jacobi_singular_values(&m);
        let mut b = singular_values(&m).unwrap();
        a.sort_by(|x, y| y.partial_cmp(x).unwrap());
        b.sort_by(|x, y| y.partial_cmp(x).unwrap());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn schroedinger_q0_is_oscillator() {
        let c = RuminComplex::new(builtin_235()).unwrap();
        let h = identity_forms(c.betti());
        let sp = laplacian_spectrum(&c, &RepresentationSpec::Schroedinger { hbar: 1.0 }, &h, 0, &TruncationConfig::new(60, 24)).unwrap();
        assert_eq!(sp.kernel_count, 0);
        for (n, x) in sp.trusted_nonzero().iter().enumerate() {
            assert!((x - (2 * n + 1) as f64).abs() < 1e-10, "{n} {x}");
        }
    }

    #[test]
    fn scalar_q2_spectrum() {
        let v = closed_form_spectrum(&RepresentationSpec::Scalar { alpha: vec![1.0, 0.0] }, &NormalMetric::standard(), 2, 10).unwrap();
        assert_eq!(v.len(), 2);
        assert!((v[0] - 0.5).abs() < 1e-15 && (v[1] - 0.5).abs() < 1e-15);
    }
}
