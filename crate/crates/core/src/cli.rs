//! Command-line front end.

use crate::error::Error;
use crate::graded_lie::{builtin_235, builtin_abelian, builtin_heisenberg, extend_automorphism, AlgebraKind, GradedLieAlgebra};
use crate::heat::{coverage_t_min, degeneration_experiment, FitTerm, heat_trace, leading_exponent, log_grid, TraceInput};
use crate::metric::{hermitian_forms, hodge_star, hodge_star_standard, hq_normal_form, GradedMetric};
use crate::output::{num, opt_num, render, write_atomic, Format, Row};
use crate::reps::{casimir_check, suggested_scale, RepresentationSpec, TruncationConfig};
use crate::rumin::{differential_orders, naturality_check, poincare_duality_failures, verify_complex, RuminComplex};
use crate::scalar::{parse_rational, q, q_to_f64, Q};
use crate::spectral::{
    forms_to_numeric, laplacian_spectrum_converged, rumin_seshadri_spectrum, CMat, SpectrumResult,
};
use crate::zeta::{
    abelian_dets, heisenberg_dets, schroedinger_dets, schroedinger_reference_dets, scalar_dets, scalar_dets_exact,
    scalar_pseudo_dets, torsion_closed_form, torsion_numeric, DeterminantReport, FitSearch, MellinOptions,
    NumericTorsionReport,
};
use crate::enveloping::Homogeneity;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::ffi::OsString;
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "rumin-lab", version, about = "Rumin complex spectra, determinants and torsion")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Exact symbolic checks of the complex.
    Verify,
    /// Every closed-form determinant and torsion next to the computed value.
    PaperTables,
    /// Spectrum of D_q^{*h}D_q (or Δ_{h,q} with --laplacian).
    Spectrum,
    /// Regularized determinants det|D_q|.
    Det,
    /// Analytic torsion.
    Torsion,
    /// Heat trace, leading exponent, or the degeneration experiment.
    Heat(HeatArgs),
}

#[derive(Args, Debug, Clone)]
pub struct HeatArgs {
    /// Run the r → 0 degeneration experiment instead of a single heat trace.
    #[arg(long)]
    pub degeneration: bool,
    /// Comma-separated r values for the degeneration experiment.
    #[arg(long, default_value = "0.5,0.45,0.4,0.35,0.3,0.25")]
    pub r: String,
    /// Decades of t above the coverage limit.
    #[arg(long, default_value_t = 3.0)]
    pub decades: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    ClosedForm,
    Numeric,
    Auto,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// 235, heisenberg, or abelian:n
    #[arg(long, global = true, default_value = "235")]
    pub algebra: String,
    /// scalar:α₁,α₂,… | schroedinger:ħ | generic:λ,μ,ν
    #[arg(long, global = true, default_value = "schroedinger:1")]
    pub rep: String,
    /// Form degree; all degrees when omitted.
    #[arg(long, global = true)]
    pub q: Option<usize>,
    /// Retained Hermite modes.
    #[arg(long = "N", global = true, default_value_t = 400)]
    pub n: usize,
    /// Guard band; 3·L·b when omitted.
    #[arg(long = "G", global = true)]
    pub g: Option<usize>,
    /// Metric normal form a (rational).
    #[arg(long, global = true, default_value = "1")]
    pub a: String,
    #[arg(long, global = true, default_value = "1")]
    pub b11: String,
    #[arg(long, global = true, default_value = "1")]
    pub b22: String,
    #[arg(long, global = true, value_enum, default_value_t = Mode::Auto)]
    pub mode: Mode,
    /// Use Δ_{h,q} instead of D_q^{*h}D_q.
    #[arg(long, global = true)]
    pub laplacian: bool,
    /// Relative tolerance for the N/2 versus N trust matching.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub trust_tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Random automorphisms in the naturality check.
    #[arg(long, global = true, default_value_t = 20)]
    pub count: usize,
    /// Include a timestamp in JSON metadata.
    #[arg(long, global = true)]
    pub timestamp: bool,
}

/// Failure categories mapped to exit codes.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numeric(String),
    Io(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numeric(_) | CliError::Io(_) => EXIT_NUMERIC,
        }
    }
    fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Numeric(_) => "numeric",
            CliError::Io(_) => "io",
        }
    }
    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Numeric(m) | CliError::Io(m) => m,
        }
    }
    pub fn to_json(&self) -> String {
        json!({"error": {"kind": self.kind(), "code": self.code(), "message": self.message()}}).to_string()
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::Unsupported(_) | Error::DegreeOutOfRange(_) | Error::NotPositiveDefinite(_) => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn config_err<T>(m: impl Into<String>) -> CliResult<T> {
    Err(CliError::Config(m.into()))
}

pub fn parse_algebra(s: &str) -> CliResult<GradedLieAlgebra> {
    match s {
        "235" => Ok(builtin_235()),
        "heisenberg" => Ok(builtin_heisenberg()),
        _ => match s.strip_prefix("abelian:").map(|n| n.parse::<usize>()) {
            Some(Ok(n)) => Ok(builtin_abelian(n)?),
            _ => config_err(format!("unknown algebra {s:?}")),
        },
    }
}

fn parse_q(s: &str) -> CliResult<Q> {
    parse_rational(s.trim()).ok_or_else(|| CliError::Config(format!("not a rational number: {s:?}")))
}

fn parse_f64(s: &str) -> CliResult<f64> {
    let s = s.trim();
    if let Some(x) = parse_rational(s) {
        return Ok(q_to_f64(&x));
    }
    s.parse::<f64>().map_err(|_| CliError::Config(format!("not a number: {s:?}")))
}

/// A parsed representation; scalar weights are also kept exactly.
#[derive(Clone, Debug)]
pub struct ParsedRep {
    pub spec: RepresentationSpec,
    pub alpha_exact: Option<Vec<Q>>,
}

pub fn parse_rep(s: &str) -> CliResult<ParsedRep> {
    let (kind, args) = s.split_once(':').ok_or_else(|| CliError::Config(format!("representation {s:?} needs kind:params")))?;
    let parts: Vec<&str> = args.split(',').collect();
    let rep = match kind {
        "scalar" => {
            let al: Vec<Q> = parts.iter().map(|p| parse_q(p)).collect::<CliResult<_>>()?;
            ParsedRep { spec: RepresentationSpec::Scalar { alpha: al.iter().map(q_to_f64).collect() }, alpha_exact: Some(al) }
        }
        "schroedinger" | "schrodinger" if parts.len() == 1 => {
            ParsedRep { spec: RepresentationSpec::Schroedinger { hbar: parse_f64(parts[0])? }, alpha_exact: None }
        }
        "generic" if parts.len() == 3 => ParsedRep {
            spec: RepresentationSpec::Generic { lambda: parse_f64(parts[0])?, mu: parse_f64(parts[1])?, nu: parse_f64(parts[2])? },
            alpha_exact: None,
        },
        _ => return config_err(format!("cannot parse representation {s:?}")),
    };
    rep.spec.validate()?;
    Ok(rep)
}

/// Algebra, complex, metric and forms shared by the commands.
pub struct Setup {
    pub complex: RuminComplex,
    pub metric: GradedMetric,
    pub h_exact: Vec<crate::exact_matrix::ExactMatrix>,
    pub h: Vec<CMat>,
    pub rep: ParsedRep,
}

fn build_metric(l: &GradedLieAlgebra, a: &str, b11: &str, b22: &str) -> CliResult<GradedMetric> {
    let (a, b11, b22) = (parse_q(a)?, parse_q(b11)?, parse_q(b22)?);
    Ok(match l.kind {
        AlgebraKind::G235 => GradedMetric::normal_form_235(l, a, b11, b22)?,
        AlgebraKind::Heisenberg => GradedMetric::normal_form_heisenberg(l, a)?,
        AlgebraKind::Abelian(_) => {
            if !(a.is_one() && b11.is_one() && b22.is_one()) {
                return config_err("abelian algebras use the standard metric");
            }
            GradedMetric::standard(l)
        }
    })
}

fn check_rep_fits(l: &GradedLieAlgebra, rep: &ParsedRep) -> CliResult<()> {
    match (&l.kind, &rep.spec) {
        (AlgebraKind::Abelian(n), RepresentationSpec::Scalar { alpha }) if alpha.len() <= *n => Ok(()),
        (AlgebraKind::Abelian(_), _) => config_err("abelian algebras have only scalar representations with at most n weights"),
        (_, RepresentationSpec::Scalar { alpha }) if alpha.len() != 2 => config_err("scalar representations take two weights"),
        (AlgebraKind::Heisenberg, RepresentationSpec::Generic { .. }) => {
            config_err("the Heisenberg group has no generic representations")
        }
        _ => Ok(()),
    }
}

pub fn setup(c: &Common) -> CliResult<Setup> {
    build_setup(&c.algebra, &c.rep, &c.a, &c.b11, &c.b22)
}

/// Same as the command-line options: algebra and representation strings,
/// metric normal-form parameters as rationals.
pub fn build_setup(algebra: &str, rep: &str, a: &str, b11: &str, b22: &str) -> CliResult<Setup> {
    let l = parse_algebra(algebra)?;
    let metric = build_metric(&l, a, b11, b22)?;
    let rep = parse_rep(rep)?;
    check_rep_fits(&l, &rep)?;
    let forms = hermitian_forms(&l, &metric)?;
    let h = forms_to_numeric(&forms.h);
    let complex = RuminComplex::new(l)?;
    Ok(Setup { complex, metric, h_exact: forms.h, h, rep })
}

fn truncation(s: &Setup, c: &Common) -> CliResult<TruncationConfig> {
    truncation_for(s, c.n, c.g)
}

pub fn truncation_for(s: &Setup, n: usize, guard: Option<usize>) -> CliResult<TruncationConfig> {
    let l = s.complex.d.iter().map(|d| d.max_length()).max().unwrap_or(1);
    let bw = s.rep.spec.generator_bandwidth();
    let g = guard.unwrap_or_else(|| TruncationConfig::recommended_guard(l, bw).max(1));
    let t = TruncationConfig::new(n, g).with_scale(suggested_scale(&s.rep.spec, n));
    t.validate()?;
    Ok(t)
}

fn degrees(s: &Setup, c: &Common, laplacian: bool) -> CliResult<Vec<usize>> {
    let top = s.complex.d.len() + usize::from(laplacian);
    match c.q {
        Some(q) if q < top => Ok(vec![q]),
        Some(q) => config_err(format!("degree {q} out of range 0..{top}")),
        None => Ok((0..top).collect()),
    }
}

fn config_value(cli: &Cli) -> Value {
    let c = &cli.common;
    let cmd = match &cli.command {
        Command::Verify => json!("verify"),
        Command::PaperTables => json!("paper-tables"),
        Command::Spectrum => json!("spectrum"),
        Command::Det => json!("det"),
        Command::Torsion => json!("torsion"),
        Command::Heat(h) => json!({"heat": {"degeneration": h.degeneration, "r": h.r, "decades": h.decades}}),
    };
    json!({
        "command": cmd,
        "algebra": c.algebra,
        "rep": c.rep,
        "q": c.q,
        "N": c.n,
        "G": c.g,
        "a": c.a,
        "b11": c.b11,
        "b22": c.b22,
        "mode": format!("{:?}", c.mode),
        "laplacian": c.laplacian,
        "trust_tol": c.trust_tol,
        "seed": c.seed,
        "count": c.count,
    })
}

fn truncation_fields(row: &mut Row, sp: &SpectrumResult) {
    row.push("N", sp.n.map(Value::from).unwrap_or(Value::Null));
    row.push("G", sp.guard.map(Value::from).unwrap_or(Value::Null));
    row.push("kernel_threshold", num(sp.kernel_threshold));
    row.push("convergence_estimate", opt_num(sp.convergence_estimate));
}

// ---------------------------------------------------------------- verify

fn check(rows: &mut Vec<Row>, name: &str, passed: bool, detail: impl Into<String>) {
    rows.push(Row::new().with("check", name).with("passed", passed).with("detail", detail.into()));
}

fn random_automorphism(rng: &mut ChaCha8Rng) -> [[Q; 2]; 2] {
    loop {
        let mut m: [[Q; 2]; 2] = Default::default();
        for row in m.iter_mut() {
            for x in row.iter_mut() {
                *x = Q::new(rng.random_range(-5i64..=5).into(), rng.random_range(1i64..=4).into());
            }
        }
        let det = &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0];
        if !det.is_zero() {
            return m;
        }
    }
}

fn expected_orders(kind: &AlgebraKind) -> Vec<u32> {
    match kind {
        AlgebraKind::G235 => vec![1, 3, 2, 3, 1],
        AlgebraKind::Heisenberg => vec![1, 2, 1],
        AlgebraKind::Abelian(n) => vec![1; *n],
    }
}

pub fn cmd_verify(c: &Common) -> CliResult<(Vec<Row>, bool)> {
    let l = parse_algebra(&c.algebra)?;
    let metric = build_metric(&l, &c.a, &c.b11, &c.b22)?;
    let mut rows = Vec::new();
    check(&mut rows, "antisymmetry", l.check_antisymmetry(), "");
    check(&mut rows, "jacobi", l.check_jacobi(), "");
    check(&mut rows, "grading", l.check_grading(), "");
    let complex = RuminComplex::new(l.clone())?;
    let rep = verify_complex(&complex.env, &complex.d);
    let bad: Vec<usize> = rep.residuals.iter().map(|r| r.0).collect();
    check(&mut rows, "D_{q+1}D_q = 0", rep.passed(), format!("{} compositions; failing q: {:?}", rep.compositions, bad));
    let orders: Vec<Option<u32>> = differential_orders(&complex)
        .into_iter()
        .map(|h| match h {
            Homogeneity::Degree(k) => Some(k),
            _ => None,
        })
        .collect();
    let want: Vec<Option<u32>> = expected_orders(&l.kind).into_iter().map(Some).collect();
    let shown: Vec<String> = orders.iter().map(|o| o.map_or("inhomogeneous".into(), |k| k.to_string())).collect();
    check(&mut rows, "homogeneity of D_q", orders == want, format!("orders [{}]", shown.join(",")));
    if l.kind != AlgebraKind::Abelian(l.dim()) {
        let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
        let mut failures = Vec::new();
        for i in 0..c.count {
            let phi = extend_automorphism(&l, &random_automorphism(&mut rng))?;
            if !naturality_check(&complex, &phi)?.passed() {
                failures.push(i);
            }
        }
        check(&mut rows, "naturality", failures.is_empty(), format!("{} seeded automorphisms; failing: {failures:?}", c.count));
    }
    let forms = hermitian_forms(&l, &metric)?;
    let posdef = forms.h.iter().all(|m| crate::spectral::cholesky_lower(&forms_to_numeric(std::slice::from_ref(m))[0]).is_ok());
    check(&mut rows, "h_q positive definite", posdef, "");
    if l.kind == AlgebraKind::G235 {
        let (a, b11, b22) = (parse_q(&c.a)?, parse_q(&c.b11)?, parse_q(&c.b22)?);
        let closed = hq_normal_form(&a, &b11, &b22);
        check(&mut rows, "h_q normal form", closed == forms.h, "projection versus closed form");
        let stars = hodge_star(q_to_f64(&a), q_to_f64(&b11), q_to_f64(&b22));
        let mut worst: f64 = 0.0;
        for k in 0..stars.len() {
            let (s1, s2) = (&stars[k], &stars[stars.len() - 1 - k]);
            for i in 0..s1.len() {
                for j in 0..s1.len() {
                    let v: f64 = (0..s1.len()).map(|m| s2[i][m] * s1[m][j]).sum();
                    worst = worst.max((v - if i == j { 1.0 } else { 0.0 }).abs());
                }
            }
        }
        check(&mut rows, "star^2 = id", worst < 1e-12, format!("max deviation {worst:.3e}"));
        let std = builtin_235();
        let c0 = RuminComplex::new(std)?;
        let h0 = hq_normal_form(&q(1), &q(1), &q(1));
        let fails = poincare_duality_failures(&c0, &h0, &hodge_star_standard())?;
        check(&mut rows, "Poincare duality (standard metric)", fails.is_empty(), format!("failing q: {fails:?}"));
    }
    let ok = rows.iter().all(|r| r.get("passed") == Some(&Value::Bool(true)));
    Ok((rows, ok))
}

// ---------------------------------------------------- closed-form tables

fn table_row(alg: &str, rep: &str, quantity: &str, closed: f64, computed: f64) -> Row {
    Row::new()
        .with("algebra", alg)
        .with("representation", rep)
        .with("quantity", quantity)
        .with("closed", num(closed))
        .with("computed", num(computed))
        .with("delta", num((closed - computed).abs()))
}

fn q_sqrt_f64(x: &Q) -> f64 {
    q_to_f64(x).sqrt()
}

pub fn cmd_paper_tables() -> CliResult<Vec<Row>> {
    let mut rows = Vec::new();
    let l = builtin_235();
    // Schrödinger determinants and torsion
    let std = crate::spectral::NormalMetric::standard();
    let reference = schroedinger_reference_dets();
    for hbar in [0.5, 1.0, 3.0] {
        let r = schroedinger_dets(hbar, &std)?;
        let rep = format!("schroedinger hbar={hbar}");
        for (qd, (d, e)) in r.dets().iter().zip(reference).enumerate() {
            rows.push(table_row("235", &rep, &format!("det|D_{qd}|"), e, *d));
        }
        rows.push(table_row("235", &rep, "torsion", 1.0, r.torsion()));
    }
    // scalar representations
    let cases: [(&str, [Q; 2], [Q; 3], Vec<f64>, f64); 3] = [
        ("alpha=(1,0) a=1 b=I", [q(1), q(0)], [q(1), q(1), q(1)], vec![1.0, 1.0, 0.5, 1.0, 1.0], 0.5),
        ("alpha=(0,2) a=1 b=I", [q(0), q(2)], [q(1), q(1), q(1)], vec![2.0, 8.0, 8.0, 8.0, 2.0], 0.5),
        ("alpha=(1,0) a=4 b=3I", [q(1), q(0)], [q(4), q(3), q(3)], vec![], 1.5),
    ];
    for (label, alpha, m, dets, tau) in cases {
        let [a, b11, b22] = m;
        let g = GradedMetric::normal_form_235(&l, a.clone(), b11.clone(), b22.clone())?;
        let r = scalar_dets(&l, &alpha, &g)?;
        let rep = format!("scalar {label}");
        for (qd, d) in dets.iter().enumerate() {
            rows.push(table_row("235", &rep, &format!("det|D_{qd}|"), *d, r.dets()[qd]));
        }
        rows.push(table_row("235", &rep, "torsion", tau, r.torsion()));
        // exact cross-check against the finite matrices
        let c = RuminComplex::new(l.clone())?;
        let h = hermitian_forms(&l, &g)?.h;
        let pd = scalar_pseudo_dets(&c, &alpha, &h)?;
        let ex = scalar_dets_exact(&l, &alpha, &g)?;
        for (qd, ((_, p), sq)) in pd.iter().zip(&ex.squared).enumerate() {
            let pv = p.to_c64().re;
            rows.push(table_row("235", &rep, &format!("det|D_{qd}|^2 (matrix)"), q_to_f64(sq), pv));
        }
    }
    // Heisenberg
    let hl = builtin_heisenberg();
    let hg = GradedMetric::normal_form_heisenberg(&hl, q(1))?;
    let r = heisenberg_dets(&hl, &RepresentationSpec::Schroedinger { hbar: 5.0 }, &hg)?;
    let want = [2f64.powf(0.25), 2f64.sqrt(), 2f64.powf(0.25)];
    for (qd, (d, e)) in r.dets().iter().zip(want).enumerate() {
        rows.push(table_row("heisenberg", "schroedinger hbar=5", &format!("det|D_{qd}|"), e, *d));
    }
    rows.push(table_row("heisenberg", "schroedinger hbar=5", "torsion", 1.0, r.torsion()));
    for a in [q(1), q(4), Q::new(9.into(), 4.into())] {
        let g = GradedMetric::normal_form_heisenberg(&hl, a.clone())?;
        let r = heisenberg_dets(&hl, &RepresentationSpec::Scalar { alpha: vec![1.0, 0.0] }, &g)?;
        rows.push(table_row("heisenberg", &format!("scalar alpha=(1,0) a={a}"), "torsion", q_sqrt_f64(&a), r.torsion()));
    }
    // abelian
    for (n, alpha, dets, tau) in [(3usize, vec![2.0, 0.0, 0.0], vec![2.0, 4.0, 2.0], 1.0), (1, vec![3.0], vec![3.0], 3.0)] {
        let r = abelian_dets(n, &alpha)?;
        let rep = format!("scalar |alpha|={}", alpha.iter().map(|x| x * x).sum::<f64>().sqrt());
        for (qd, d) in dets.iter().enumerate() {
            rows.push(table_row(&format!("abelian:{n}"), &rep, &format!("det|D_{qd}|"), *d, r.dets()[qd]));
        }
        rows.push(table_row(&format!("abelian:{n}"), &rep, "torsion", tau, r.torsion()));
    }
    Ok(rows)
}

// ---------------------------------------------------------------- spectrum

pub fn cmd_spectrum(c: &Common) -> CliResult<Vec<Row>> {
    let s = setup(c)?;
    let trunc = truncation(&s, c)?;
    let tol = Some(c.trust_tol);
    let mut rows = Vec::new();
    for qd in degrees(&s, c, c.laplacian)? {
        let sp = if c.laplacian {
            rumin_seshadri_spectrum(&s.complex, &s.rep.spec, &s.h, qd, &trunc, tol)?
        } else {
            laplacian_spectrum_converged(&s.complex, &s.rep.spec, &s.h, qd, &trunc, tol)?
        };
        for (i, e) in sp.eigenvalues.iter().enumerate() {
            let mut row = Row::new()
                .with("q", qd)
                .with("index", i)
                .with("eigenvalue", num(*e))
                .with("kernel", i < sp.kernel_count)
                .with("trusted", i < sp.trust_count);
            truncation_fields(&mut row, &sp);
            rows.push(row);
        }
    }
    Ok(rows)
}

// ---------------------------------------------------------------- det / torsion

pub fn closed_form(s: &Setup) -> CliResult<DeterminantReport> {
    if let (Some(al), AlgebraKind::G235 | AlgebraKind::Heisenberg) = (&s.rep.alpha_exact, &s.complex.algebra().kind) {
        if al.iter().all(|x| x.is_zero()) {
            return config_err("the trivial representation has no regularized determinant");
        }
        return Ok(scalar_dets(s.complex.algebra(), al, &s.metric)?);
    }
    Ok(torsion_closed_form(s.complex.algebra(), &s.rep.spec, &s.metric)?)
}

fn use_closed_form(s: &Setup, mode: Mode) -> CliResult<bool> {
    Ok(match mode {
        Mode::ClosedForm => true,
        Mode::Numeric => {
            if s.rep.spec.is_finite_dimensional() {
                return config_err("scalar representations are finite dimensional; use closed-form mode");
            }
            false
        }
        Mode::Auto => s.rep.spec.is_finite_dimensional() || torsion_closed_form(s.complex.algebra(), &s.rep.spec, &s.metric).is_ok(),
    })
}

fn numeric(s: &Setup, c: &Common) -> CliResult<NumericTorsionReport> {
    numeric_torsion(s, c.n, c.g, c.trust_tol)
}

pub fn numeric_torsion(s: &Setup, n: usize, guard: Option<usize>, trust_tol: f64) -> CliResult<NumericTorsionReport> {
    if s.rep.spec.is_finite_dimensional() {
        return config_err("scalar representations are finite dimensional; use the closed form");
    }
    let trunc = truncation_for(s, n, guard)?;
    Ok(torsion_numeric(&s.complex, &s.rep.spec, &s.h, true, &trunc, Some(trust_tol), &MellinOptions::default(), &FitSearch::default())?)
}

fn det_rows_closed(r: &DeterminantReport, qs: &[usize]) -> Vec<Row> {
    qs.iter()
        .map(|&qd| {
            Row::new()
                .with("q", qd)
                .with("method", "closed-form")
                .with("log_det", num(r.log_dets[qd]))
                .with("det", num(r.log_dets[qd].exp()))
                .with("zeta_at_0", num(r.zeta_at_0[qd]))
        })
        .collect()
}

fn det_rows_numeric(r: &NumericTorsionReport, qs: &[usize]) -> Vec<Row> {
    let top = r.log_dets.len();
    qs.iter()
        .map(|&qd| {
            let src = r.degrees.iter().find(|d| d.q == qd).or_else(|| r.degrees.iter().find(|d| d.q == top - 1 - qd)).expect("degree computed");
            let z = &src.zeta;
            let dg = z.diagnostics.as_ref();
            let sp = &src.spectrum;
            Row::new()
                .with("q", qd)
                .with("method", "numeric")
                .with("log_det", num(r.log_dets[qd]))
                .with("det", num(r.log_dets[qd].exp()))
                .with("zeta_prime_at_0", num(z.zeta_prime_at_0))
                .with("from_degree", src.q)
                .with("N", sp.n.map(Value::from).unwrap_or(Value::Null))
                .with("G", sp.guard.map(Value::from).unwrap_or(Value::Null))
                .with("kernel_threshold", num(sp.kernel_threshold))
                .with("convergence_estimate", opt_num(sp.convergence_estimate))
                .with("trusted", sp.trusted)
                .with("fit_terms", dg.map(|d| d.exponents.len()).unwrap_or(0))
                .with("fit_residual", opt_num(dg.map(|d| d.residual)))
                .with("fit_condition", opt_num(dg.map(|d| d.condition_number)))
                .with("fit_stability", opt_num(dg.map(|d| d.stability)))
        })
        .collect()
}

pub fn cmd_det(c: &Common) -> CliResult<Vec<Row>> {
    let s = setup(c)?;
    let qs = degrees(&s, c, false)?;
    if use_closed_form(&s, c.mode)? {
        Ok(det_rows_closed(&closed_form(&s)?, &qs))
    } else {
        Ok(det_rows_numeric(&numeric(&s, c)?, &qs))
    }
}

pub fn cmd_torsion(c: &Common) -> CliResult<Vec<Row>> {
    let s = setup(c)?;
    let qs: Vec<usize> = (0..s.complex.d.len()).collect();
    if use_closed_form(&s, c.mode)? {
        let r = closed_form(&s)?;
        let mut rows = det_rows_closed(&r, &qs);
        rows.push(torsion_row("closed-form", r.log_torsion));
        return Ok(rows);
    }
    let r = numeric(&s, c)?;
    let mut rows = det_rows_numeric(&r, &qs);
    // worst case over the degrees that were actually computed
    let metas: Vec<_> = r.degrees.iter().map(|d| &d.spectrum).collect();
    let mut summary = torsion_row("numeric", r.log_torsion)
        .with("N", metas.iter().filter_map(|m| m.n).max().map(Value::from).unwrap_or(Value::Null))
        .with("G", metas.iter().filter_map(|m| m.guard).max().map(Value::from).unwrap_or(Value::Null))
        .with("kernel_threshold", num(metas.iter().map(|m| m.kernel_threshold).fold(0.0, f64::max)))
        .with("convergence_estimate", opt_num(metas.iter().filter_map(|m| m.convergence_estimate).reduce(f64::max)));
    summary.push("used_duality", r.used_duality);
    rows.push(summary);
    Ok(rows)
}

fn torsion_row(method: &str, log_tau: f64) -> Row {
    Row::new().with("quantity", "torsion").with("method", method).with("log_torsion", num(log_tau)).with("torsion", num(log_tau.exp()))
}

// ---------------------------------------------------------------- heat

pub fn cmd_heat(c: &Common, args: &HeatArgs) -> CliResult<Vec<Row>> {
    let s = setup(c)?;
    if args.degeneration {
        let RepresentationSpec::Generic { lambda, mu, nu } = s.rep.spec else {
            return config_err("the degeneration experiment needs a generic representation");
        };
        let rs: Vec<f64> = args.r.split(',').map(parse_f64).collect::<CliResult<_>>()?;
        let qd = c.q.unwrap_or(0);
        let rep = degeneration_experiment(&s.complex, &s.h, lambda, mu, nu, &rs, qd, c.n, &MellinOptions::default(), &FitSearch::default())?;
        let mut rows: Vec<Row> = rep
            .rows
            .iter()
            .map(|r| {
                Row::new()
                    .with("q", qd)
                    .with("r", num(r.r))
                    .with("zeta_prime_at_0", num(r.zeta_prime))
                    .with("fit_stability", num(r.stability))
                    .with("N", r.n)
                    .with("G", r.guard)
                    .with("kernel_threshold", num(r.kernel_threshold))
                    .with("convergence_estimate", opt_num(r.convergence_estimate))
            })
            .collect();
        rows.push(
            Row::new()
                .with("q", qd)
                .with("quantity", "constant term")
                .with("value", num(rep.constant))
                .with("jackknife_error", num(rep.jackknife_error))
                .with("target", num(rep.target))
                .with("delta", num((rep.constant - rep.target).abs()))
                .with("pinned_weyl", opt_num(rep.pinned_weyl))
                .with("terms", rep.terms.iter().map(|t| Value::from(term_label(*t))).collect::<Vec<_>>())
                .with("coefficients", rep.coefficients.iter().map(|x| num(*x)).collect::<Vec<_>>()),
        );
        return Ok(rows);
    }
    let trunc = truncation(&s, c)?;
    let qd = c.q.unwrap_or(0);
    let sp = if c.laplacian {
        rumin_seshadri_spectrum(&s.complex, &s.rep.spec, &s.h, qd, &trunc, Some(c.trust_tol))?
    } else {
        laplacian_spectrum_converged(&s.complex, &s.rep.spec, &s.h, qd, &trunc, Some(c.trust_tol))?
    };
    let t0 = coverage_t_min(sp.trusted_nonzero()).ok_or_else(|| CliError::Numeric("no trusted nonzero eigenvalues".into()))?;
    let series = heat_trace(TraceInput::from(&sp), &log_grid(t0, t0 * 10f64.powf(args.decades), 60))?;
    let est = leading_exponent(&series)?;
    let mut rows: Vec<Row> = series
        .t
        .iter()
        .zip(&series.trace)
        .zip(&series.tail_bound)
        .map(|((t, th), tb)| {
            let mut r = Row::new().with("q", qd).with("t", num(*t)).with("trace", num(*th)).with("tail_bound", num(*tb));
            truncation_fields(&mut r, &sp);
            r
        })
        .collect();
    let mut summary = Row::new()
        .with("q", qd)
        .with("quantity", "leading exponent")
        .with("value", num(est.slope))
        .with("jackknife_error", num(est.jackknife_error));
    truncation_fields(&mut summary, &sp);
    rows.push(summary);
    Ok(rows)
}

fn term_label(t: FitTerm) -> String {
    match t {
        FitTerm::Power(0) => "1".into(),
        FitTerm::Power(p) => format!("r^{p}"),
        FitTerm::PowerLog(p) => format!("r^{p} ln r"),
    }
}

/// Representation-level sanity data used by the acceptance suite.
pub fn casimir_residual(spec: &RepresentationSpec, n: usize) -> CliResult<f64> {
    let t = TruncationConfig::new(n, 16).with_scale(suggested_scale(spec, n));
    Ok(casimir_check(spec, &t)?)
}

fn configure_threads() {
    if let Ok(v) = std::env::var("RUMIN_LAB_THREADS") {
        if let Ok(n) = v.trim().parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn timestamp() -> String {
    let secs = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    format!("{secs}")
}

/// Runs the command and returns the rendered document together with the
/// exit code; nothing is printed.
pub fn execute(cli: &Cli) -> (i32, std::result::Result<String, CliError>) {
    let c = &cli.common;
    let result: CliResult<(Vec<Row>, i32)> = match &cli.command {
        Command::Verify => cmd_verify(c).map(|(r, ok)| (r, if ok { EXIT_OK } else { EXIT_VERIFY })),
        Command::PaperTables => cmd_paper_tables().map(|r| {
            let ok = r.iter().all(|row| matches!(row.get("delta"), Some(Value::Number(n)) if n.as_f64().unwrap_or(1.0) < 1e-12));
            (r, if ok { EXIT_OK } else { EXIT_VERIFY })
        }),
        Command::Spectrum => cmd_spectrum(c).map(|r| (r, EXIT_OK)),
        Command::Det => cmd_det(c).map(|r| (r, EXIT_OK)),
        Command::Torsion => cmd_torsion(c).map(|r| (r, EXIT_OK)),
        Command::Heat(h) => cmd_heat(c, h).map(|r| (r, EXIT_OK)),
    };
    match result {
        Ok((rows, code)) => {
            let ts = c.timestamp.then(timestamp);
            (code, Ok(render(c.format, &config_value(cli), &rows, ts)))
        }
        Err(e) => (e.code(), Err(e)),
    }
}

/// Entry point of the binary: parses, runs, writes, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    configure_threads();
    let (code, out) = execute(&cli);
    match out {
        Ok(doc) => match &cli.common.out {
            Some(p) => {
                if let Err(e) = write_atomic(p, &doc) {
                    let err = CliError::Io(e.to_string());
                    eprintln!("{}", err.to_json());
                    return err.code();
                }
                code
            }
            None => {
                print!("{doc}");
                code
            }
        },
        Err(e) => {
            eprintln!("{}", e.to_json());
            code
        }
    }
}

