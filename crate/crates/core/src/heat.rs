//! Heat traces of truncated spectra, their leading small-t exponent, and the
//! degeneration of generic representations onto a Schrödinger pair.

use crate::error::{Error, Result};
use crate::reps::{suggested_scale, RepresentationSpec, TruncationConfig};
use crate::rumin::RuminComplex;
use crate::spectral::{CMat, SpectrumResult};
use crate::zeta::{fit_heat_trace, numeric_log_det, FitSearch, MellinOptions};
use serde::Serialize;

/// Relative tail allowed before a t value counts as uncovered.
pub const TAIL_TOLERANCE: f64 = 1e-10;

/// Fitted expansion θ(t) ≈ Σ c_α t^α.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeatFit {
    pub exponents: Vec<f64>,
    pub coefficients: Vec<f64>,
    pub residual: f64,
    pub condition_number: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeatTraceSeries {
    pub t: Vec<f64>,
    pub trace: Vec<f64>,
    /// Estimated contribution of eigenvalues beyond the trusted window.
    pub tail_bound: Vec<f64>,
    pub kernel_count: usize,
    pub fit: Option<HeatFit>,
}

/// Nonzero eigenvalues with the kernel dimension that the trace adds as a
/// constant.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceInput<'a> {
    pub eigenvalues: &'a [f64],
    pub kernel_count: usize,
}

impl<'a> From<&'a SpectrumResult> for TraceInput<'a> {
    fn from(s: &'a SpectrumResult) -> Self {
        // finite-dimensional kernels are exact; truncated ones are artifacts
        let kernel_count = if s.n.is_some() { 0 } else { s.kernel_count };
        Self { eigenvalues: s.trusted_nonzero(), kernel_count }
    }
}

/// Tail estimate Σ_{λ>λ_top} e^{−λt} from a power law N(λ) ≈ Aλ^p matched
/// on the top half of the window.
fn tail_estimate(sorted: &[f64], t: f64) -> f64 {
    let n = sorted.len();
    if n < 4 {
        return if n == 0 { 0.0 } else { n as f64 * (-sorted[n - 1] * t).exp() };
    }
    let top = sorted[n - 1];
    let half = sorted.partition_point(|&x| x <= top / 2.0).max(1);
    let p = ((n as f64 / half as f64).ln() / 2f64.ln()).max(1e-3);
    let x = top * t;
    // ∫_top^∞ e^{−λt} dN = (n p / top^p) ∫_top^∞ λ^{p−1} e^{−λt} dλ
    let decay = if x > (p - 1.0).max(0.0) + 1.0 { x / (x - (p - 1.0).max(0.0)) } else { f64::INFINITY };
    n as f64 * p * (-x).exp() / x * decay
}

/// Σ e^{−λt} on the given grid, kernel included. Refuses t values where the
/// estimated untrusted tail exceeds [`TAIL_TOLERANCE`] of the trace.
pub fn heat_trace(input: TraceInput<'_>, t_grid: &[f64]) -> Result<HeatTraceSeries> {
    let mut ev: Vec<f64> = input.eigenvalues.iter().copied().filter(|x| *x > 0.0).collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut trace = Vec::with_capacity(t_grid.len());
    let mut tail = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidArgument(format!("heat trace needs t > 0, got {t}")));
        }
        let th: f64 = input.kernel_count as f64 + ev.iter().map(|l| (-l * t).exp()).sum::<f64>();
        let tb = tail_estimate(&ev, t);
        if th > 0.0 && tb > TAIL_TOLERANCE * th {
            return Err(Error::Truncation(format!("t = {t:e} is below the coverage of the trusted spectrum")));
        }
        trace.push(th);
        tail.push(tb);
    }
    Ok(HeatTraceSeries { t: t_grid.to_vec(), trace, tail_bound: tail, kernel_count: input.kernel_count, fit: None })
}

/// Smallest t for which the trusted window covers the trace.
pub fn coverage_t_min(eigenvalues: &[f64]) -> Option<f64> {
    let top = eigenvalues.iter().copied().fold(0.0, f64::max);
    if top <= 0.0 {
        return None;
    }
    let mut ev = eigenvalues.to_vec();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut t = -TAIL_TOLERANCE.ln() / top;
    for _ in 0..200 {
        let th: f64 = ev.iter().map(|l| (-l * t).exp()).sum();
        if th == 0.0 {
            return None;
        }
        if tail_estimate(&ev, t) <= 0.5 * TAIL_TOLERANCE * th {
            return Some(t);
        }
        t *= 1.1;
    }
    None
}

/// Logarithmic grid of `per_decade` points per decade on [t0, t1].
pub fn log_grid(t0: f64, t1: f64, per_decade: usize) -> Vec<f64> {
    let n = (((t1 / t0).log10() * per_decade as f64).ceil() as usize).max(2);
    (0..=n).map(|i| t0 * (t1 / t0).powf(i as f64 / n as f64)).collect()
}

/// Leading exponent with jackknife error.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentEstimate {
    pub slope: f64,
    pub jackknife_error: f64,
    pub t_range: (f64, f64),
    pub points: usize,
}

fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Log-log regression slope of θ − dim ker over the smallest decade of the
/// series, with a delete-one-block jackknife over ten blocks.
pub fn leading_exponent(series: &HeatTraceSeries) -> Result<ExponentEstimate> {
    let t0 = series.t.iter().copied().fold(f64::INFINITY, f64::min);
    let t1 = 10.0 * t0;
    let t_hi = series.t.iter().copied().fold(0.0, f64::max);
    if !(t_hi >= t1 * (1.0 - 1e-12)) {
        return Err(Error::Numeric("leading exponent needs at least one decade of t".into()));
    }
    let mut pts: Vec<(f64, f64)> = series
        .t
        .iter()
        .zip(&series.trace)
        .filter(|(t, _)| **t <= t1 * (1.0 + 1e-12))
        .map(|(t, th)| (t.ln(), (th - series.kernel_count as f64).ln()))
        .filter(|(_, y)| y.is_finite())
        .collect();
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    if pts.len() < 10 {
        return Err(Error::Numeric("too few points in the leading decade".into()));
    }
    let (x, y): (Vec<f64>, Vec<f64>) = pts.iter().copied().unzip();
    let full = slope(&x, &y);
    let blocks = 10;
    let n = x.len();
    let mut est = Vec::with_capacity(blocks);
    for b in 0..blocks {
        let (lo, hi) = (b * n / blocks, (b + 1) * n / blocks);
        let xs: Vec<f64> = x[..lo].iter().chain(&x[hi..]).copied().collect();
        let ys: Vec<f64> = y[..lo].iter().chain(&y[hi..]).copied().collect();
        est.push(slope(&xs, &ys));
    }
    let mean = est.iter().sum::<f64>() / blocks as f64;
    let var = est.iter().map(|e| (e - mean).powi(2)).sum::<f64>() * (blocks - 1) as f64 / blocks as f64;
    Ok(ExponentEstimate { slope: full, jackknife_error: var.sqrt(), t_range: (t0, t1), points: n })
}

/// Fits θ(t) − dim ker ≈ Σ c_α t^α over the whole series.
pub fn fit_expansion(series: &mut HeatTraceSeries, exponents: &[f64]) -> Result<HeatFit> {
    let k = series.kernel_count as f64;
    let (ts, th): (Vec<f64>, Vec<f64>) =
        series.t.iter().zip(&series.trace).map(|(t, x)| (*t, x - k)).filter(|(_, x)| *x > 0.0).unzip();
    if ts.len() < exponents.len() + 2 {
        return Err(Error::Numeric("too few points for the requested expansion".into()));
    }
    let f = fit_heat_trace(&ts, &th, exponents)?;
    let fit = HeatFit { exponents: exponents.to_vec(), coefficients: f.coef, residual: f.residual, condition_number: f.condition };
    series.fit = Some(fit.clone());
    Ok(fit)
}

/// Full exponent ladder j = 0, 1, …, `count` − 1 (odd j included), with the
/// parity of each j.
pub fn full_ladder(spec: &RepresentationSpec, kappa: u32, count: usize) -> Vec<(usize, f64)> {
    let k = kappa as f64;
    (0..count)
        .map(|j| {
            let jf = j as f64;
            let a = match spec {
                RepresentationSpec::Generic { .. } => (jf - 3.0) / (4.0 * k),
                _ => (jf - 1.0) / k,
            };
            (j, a)
        })
        .collect()
}

/// One r value of the degeneration experiment.
#[derive(Clone, Debug, Serialize)]
pub struct DegenerationRow {
    pub r: f64,
    pub zeta_prime: f64,
    pub stability: f64,
    pub n: usize,
    pub guard: usize,
    pub kernel_threshold: f64,
    pub convergence_estimate: Option<f64>,
}

/// Basis function of the degeneration fit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum FitTerm {
    /// r^p
    Power(i32),
    /// r^p ln r
    PowerLog(i32),
}

impl FitTerm {
    pub fn eval(self, r: f64) -> f64 {
        match self {
            FitTerm::Power(p) => r.powi(p),
            FitTerm::PowerLog(p) => r.powi(p) * r.ln(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DegenerationReport {
    pub q: usize,
    pub rows: Vec<DegenerationRow>,
    /// Coefficient of r^{−2} when it is known in closed form and held fixed.
    pub pinned_weyl: Option<f64>,
    pub terms: Vec<FitTerm>,
    pub coefficients: Vec<f64>,
    pub constant: f64,
    pub jackknife_error: f64,
    /// ζ′(0) of Δ_{h,q} in ρ_{+ħ} plus ρ_{−ħ}, ħ = √|ν|.
    pub target: f64,
}

/// r^{−2} coefficient of ζ′_{Δ_{h,0}}(0) in ρ_{rλ,rμ,ν}, ν < 0.
///
/// ζ(0) of D₀*D₀ vanishes, so ζ′(0) is scale invariant and only the shape
/// ε²(−∂²) + ε^{−2}(x² − 1)²/4 matters, with ε² = r²(λ² + μ²)/|ν|^{3/2}.
/// The Weyl symbol term of its heat trace is ε^{−2}F(t/ε²) whose Mellin
/// transform at 0 is Γ(−½)/(2√π)·∫((x² − 1)²/4)^{½}dx continued, i.e. −4/3.
/// Δ_{h,0} = (D₀*D₀)^{κ/k₀} multiplies everything by κ/k₀.
pub fn weyl_coefficient_degree0(c: &RuminComplex, lambda: f64, mu: f64, nu: f64) -> Option<f64> {
    if nu >= 0.0 || lambda * lambda + mu * mu == 0.0 {
        return None;
    }
    Some(-(c.a[0] as f64) * 4.0 / 3.0 * nu.abs().powf(1.5) / (lambda * lambda + mu * mu))
}

/// ζ′_{Δ_{h,q}}(0) with the worst diagnostics of the two degrees it uses.
#[derive(Clone, Debug, Serialize)]
pub struct LaplacianZeta {
    pub zeta_prime: f64,
    /// Largest fit stability, weighted like ζ′.
    pub stability: f64,
    pub guard: usize,
    pub kernel_threshold: f64,
    pub convergence_estimate: Option<f64>,
}

/// ζ′_{Δ_{h,q}}(0) = a_{q−1}ζ′_{D_{q−1}*D_{q−1}}(0) + a_q ζ′_{D_q*D_q}(0),
/// numerically.
pub fn laplacian_zeta_prime(
    c: &RuminComplex,
    spec: &RepresentationSpec,
    h: &[CMat],
    q: usize,
    n: usize,
    opts: &MellinOptions,
    search: &FitSearch,
) -> Result<LaplacianZeta> {
    let top = c.d.len();
    if q > top {
        return Err(Error::DegreeOutOfRange(q));
    }
    let l = c.d.iter().map(|d| d.max_length()).max().unwrap_or(1);
    let guard = TruncationConfig::recommended_guard(l, spec.generator_bandwidth());
    let trunc = TruncationConfig::new(n, guard).with_scale(suggested_scale(spec, n));
    let mut out = LaplacianZeta { zeta_prime: 0.0, stability: 0.0, guard, kernel_threshold: 0.0, convergence_estimate: None };
    for qq in [q.wrapping_sub(1), q] {
        if qq >= top {
            continue;
        }
        let d = numeric_log_det(c, spec, h, qq, &trunc, Some(1e-9), opts, search)?;
        let w = c.a[qq] as f64;
        out.zeta_prime += w * d.zeta.zeta_prime_at_0;
        out.stability = out.stability.max(w * d.zeta.diagnostics.as_ref().map_or(0.0, |x| x.stability));
        out.kernel_threshold = out.kernel_threshold.max(d.spectrum.kernel_threshold);
        out.convergence_estimate = match (out.convergence_estimate, d.spectrum.convergence_estimate) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
    }
    Ok(out)
}

fn least_squares(rows: &[Vec<f64>], y: &[f64]) -> Result<Vec<f64>> {
    use ndarray::{Array1, Array2};
    use ndarray_linalg::LeastSquaresSvd;
    let m = rows.len();
    let p = rows[0].len();
    let a = Array2::from_shape_fn((m, p), |(i, j)| rows[i][j]);
    let b = Array1::from(y.to_vec());
    let r = a.least_squares(&b).map_err(|e| Error::Backend(e.to_string()))?;
    Ok(r.solution.to_vec())
}

/// Extrapolates the r → 0 constant term of ζ′_{Δ_{h,q}}(0) in ρ_{rλ,rμ,ν}
/// and compares it with the Schrödinger pair ρ_{±√|ν|}; for ν > 0 the
/// target is 0. The eigenvalues depend on r through r² only, so the fit uses
/// 1, r², r² ln r after removing the r^{−2} term, which is fixed in closed
/// form for q = 0, ν < 0 and fitted otherwise.
#[allow(clippy::too_many_arguments)]
pub fn degeneration_experiment(
    c: &RuminComplex,
    h: &[CMat],
    lambda: f64,
    mu: f64,
    nu: f64,
    r_list: &[f64],
    q: usize,
    n: usize,
    opts: &MellinOptions,
    search: &FitSearch,
) -> Result<DegenerationReport> {
    if r_list.len() < 3 || r_list.iter().any(|r| !(*r > 0.0 && *r <= 1.0)) {
        return Err(Error::InvalidArgument("need at least three r values in (0, 1]".into()));
    }
    if nu == 0.0 {
        return Err(Error::InvalidArgument("degeneration needs ν ≠ 0".into()));
    }
    let rows: Vec<DegenerationRow> = {
        use rayon::prelude::*;
        r_list
            .par_iter()
            .map(|&r| {
                let spec = RepresentationSpec::Generic { lambda: r * lambda, mu: r * mu, nu };
                spec.validate()?;
                let z = laplacian_zeta_prime(c, &spec, h, q, n, opts, search)?;
                Ok(DegenerationRow {
                    r,
                    zeta_prime: z.zeta_prime,
                    stability: z.stability,
                    n,
                    guard: z.guard,
                    kernel_threshold: z.kernel_threshold,
                    convergence_estimate: z.convergence_estimate,
                })
            })
            .collect::<Result<_>>()?
    };
    let target = if nu < 0.0 {
        let hb = nu.abs().sqrt();
        let mut t = 0.0;
        for s in [hb, -hb] {
            t += laplacian_zeta_prime(c, &RepresentationSpec::Schroedinger { hbar: s }, h, q, n, opts, search)?.zeta_prime;
        }
        t
    } else {
        0.0
    };
    let pinned_weyl = if q == 0 { weyl_coefficient_degree0(c, lambda, mu, nu) } else { None };
    let mut terms = Vec::new();
    if pinned_weyl.is_none() {
        terms.push(FitTerm::Power(-2));
    }
    terms.extend([FitTerm::Power(0), FitTerm::Power(2), FitTerm::PowerLog(2)]);
    terms.truncate(rows.len());
    let z0 = pinned_weyl.unwrap_or(0.0);
    let design = |rs: &[&DegenerationRow]| -> (Vec<Vec<f64>>, Vec<f64>) {
        (
            rs.iter().map(|row| terms.iter().map(|t| t.eval(row.r)).collect()).collect(),
            rs.iter().map(|row| row.zeta_prime - z0 / (row.r * row.r)).collect(),
        )
    };
    let all: Vec<&DegenerationRow> = rows.iter().collect();
    let (a, y) = design(&all);
    let coefficients = least_squares(&a, &y)?;
    let ci = terms.iter().position(|&t| t == FitTerm::Power(0)).expect("constant term");
    let constant = coefficients[ci];
    // delete-one jackknife, only when the reduced system stays determined
    let mut jack = Vec::new();
    if rows.len() > terms.len() {
        for i in 0..rows.len() {
            let sub: Vec<&DegenerationRow> = rows.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, r)| r).collect();
            let (a, y) = design(&sub);
            jack.push(least_squares(&a, &y)?[ci]);
        }
    }
    let jackknife_error = if jack.is_empty() {
        f64::NAN
    } else {
        let n = jack.len() as f64;
        let m = jack.iter().sum::<f64>() / n;
        (jack.iter().map(|x| (x - m).powi(2)).sum::<f64>() * (n - 1.0) / n).sqrt()
    };
    Ok(DegenerationReport { q, rows, pinned_weyl, terms, coefficients, constant, jackknife_error, target })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oscillator_trace() {
        let ev: Vec<f64> = (0..400).map(|n| 2.0 * n as f64 + 1.0).collect();
        let s = heat_trace(TraceInput { eigenvalues: &ev, kernel_count: 0 }, &[1.0]).unwrap();
        assert!((s.trace[0] - 0.5 / 1f64.sinh()).abs() < 1e-15);
        assert!(heat_trace(TraceInput { eigenvalues: &ev, kernel_count: 0 }, &[1e-4]).is_err());
    }

    #[test]
    fn empty_trace() {
        let s = heat_trace(TraceInput { eigenvalues: &[], kernel_count: 0 }, &[0.5, 1.0]).unwrap();
        assert_eq!(s.trace, vec![0.0, 0.0]);
    }

    #[test]
    fn oscillator_exponent() {
        let ev: Vec<f64> = (0..20000).map(|n| 2.0 * n as f64 + 1.0).collect();
        let t0 = coverage_t_min(&ev).unwrap();
        let s = heat_trace(TraceInput { eigenvalues: &ev, kernel_count: 0 }, &log_grid(t0, 100.0 * t0, 60)).unwrap();
        let e = leading_exponent(&s).unwrap();
        assert!((e.slope + 1.0).abs() < 0.01, "{e:?}");
    }
}
