//! Command-line surface for the spinor-branch toolkit.
//!
//! Subcommands: `classify`, `branch`, `orbit-image`, `duflo-verify`,
//! `analysis-verify`, and `self-test`.  Every run emits a report with the
//! schema `{"request": …, "result": …, "checks": [{name, pass, residual}]}`
//! (JSON by default, CSV/text on request) and exits 0 on success, 1 when a
//! verification check fails, and 2 on usage errors.  Half-integers are
//! serialized as exact strings such as `"3/2"`, never as floats.  The
//! environment variable `SPINOR_BRANCH_THREADS` caps the worker count.

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};
use std::f64::consts::PI;
use std::process::ExitCode;

use spinor_branch_core::branching::{branch_aq, branch_discrete, branch_principal, psi, psi_generator};
use spinor_branch_core::classify::{
    classify_infl_char, irreducibles_with_char, is_unitarizable, AqParam, NuParam, RepLabel,
    SignLabel,
};
use spinor_branch_core::duflo::{verify_duflo, DufloCase};
use spinor_branch_core::fourier::quadrature::{axial_ft, radial_ft, simpson, AngularWeight};
use spinor_branch_core::fourier::{
    convolution_probe, ft_knapp_stein_kernel, ft_lowest_ktype, ft_poisson, gamma_fn, kbessel_tilde,
    riesz_d, verify_convolution_identity, GridFn, KernelParams,
};
use spinor_branch_core::matrix::{
    canonicalize, nbar, p_orbit_invariants, project_p, s_a_vec, t_vec, tprime_vec,
};
use spinor_branch_core::orbits::{
    alpha_b, moment_image, moment_image_point, sample_b, Interval, OrbitKind, OrbitParam, PfRule,
    PfSign,
};
use spinor_branch_core::weights::{rho, spin_series, weyl_dim};
use spinor_branch_core::{CoreError, GroupTag, HalfInt, WeightTuple};

#[derive(Parser)]
#[command(name = "spinor-branch", version, about = "Branching laws, coadjoint orbits, and Fourier kernels for Spin(m+1,1)")]
struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Output::Json)]
    output: Output,
    /// Seed for all randomized checks (identical seed ⇒ identical report).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RepKind {
    /// Principal series I(μ, iν).
    Ps,
    /// π_j(γ) of the regular integral family.
    Pij,
    /// Discrete series π^±(γ) (odd m).
    Ds,
    /// Limit of discrete series (odd m, γ_n = 0).
    LimitDs,
    /// Cohomologically induced A_q(λ).
    Aq,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    /// Elliptic orbit (odd m); regular or singular is inferred from a.
    Elliptic,
    /// Split semisimple orbit (rotation part plus boost).
    NonElliptic,
    /// Non-semisimple orbit with positive nilpotent sign (odd m).
    NonSemisimplePlus,
    /// Non-semisimple orbit with negative nilpotent sign (odd m).
    NonSemisimpleMinus,
    /// The zero orbit.
    Zero,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify an infinitesimal character and list the irreducibles carrying it.
    Classify {
        #[arg(long)]
        m: usize,
        /// Comma-separated half-integer tuple, e.g. "3/2,1/2".
        #[arg(long, allow_hyphen_values = true)]
        gamma: String,
    },
    /// Branching table of a representation restricted to the minimal parabolic.
    Branch {
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum)]
        rep: RepKind,
        /// Infinitesimal character (pij, ds, limit-ds).
        #[arg(long, allow_hyphen_values = true)]
        gamma: Option<String>,
        /// M-highest weight (ps).
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<String>,
        /// A_q parameter λ (aq).
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        /// Index j (pij, aq).
        #[arg(long)]
        j: Option<usize>,
        /// Lowest-K-type sign, "+" or "-" (ds, limit-ds).
        #[arg(long, allow_hyphen_values = true)]
        sign: Option<String>,
    },
    /// Interval-product description of the moment-map image of a coadjoint orbit.
    OrbitImage {
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Comma-separated orbit parameters a.
        #[arg(long, allow_hyphen_values = true)]
        a: String,
    },
    /// Verify the orbit-method dictionary for one representation.
    DufloVerify {
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum)]
        rep: RepKind,
        #[arg(long, allow_hyphen_values = true)]
        gamma: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        #[arg(long)]
        j: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        sign: Option<String>,
        /// Imaginary part of ν for tempered principal series.
        #[arg(long, default_value_t = 1.0)]
        nu: f64,
        /// Candidate-label entry bound, a half-integer string.
        #[arg(long)]
        bound: String,
    },
    /// Numerical verification battery for the Fourier-analytic kernels.
    AnalysisVerify {
        #[arg(long, default_value_t = 3)]
        m: usize,
        /// Wedge degree of the Knapp–Stein kernel.
        #[arg(long, default_value_t = 0)]
        j: usize,
        /// Spectral parameter ν.
        #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
        nu: f64,
        /// Also run the grid convolution identity and the lowest-K-type DFT
        /// comparison (slower).
        #[arg(long)]
        full: bool,
        /// Relative tolerance for the quadrature cross-checks.
        #[arg(long, default_value_t = 1e-6)]
        tol_quadrature: f64,
        /// Residual tolerance for the grid convolution identity.
        #[arg(long, default_value_t = 1e-3)]
        tol_grid: f64,
    },
    /// Quick cross-module consistency battery.
    SelfTest {
        /// Number of random orbit samples for the oracle-equivalence check.
        #[arg(long, default_value_t = 100)]
        orbit_samples: usize,
    },
}

/// One entry of the `checks` array.
struct Check {
    name: String,
    pass: bool,
    residual: f64,
}

impl Check {
    fn new(name: &str, residual: f64, tol: f64) -> Check {
        Check { name: name.to_string(), pass: residual <= tol, residual }
    }

    fn exact(name: &str, pass: bool) -> Check {
        Check { name: name.to_string(), pass, residual: if pass { 0.0 } else { 1.0 } }
    }
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("SPINOR_BRANCH_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
        }
    }
    let cli = Cli::parse();
    let request = json!({
        "argv": std::env::args().skip(1).collect::<Vec<_>>(),
        "seed": cli.seed,
    });
    match run(&cli) {
        Ok((result, checks)) => {
            let pass = checks.iter().all(|c| c.pass);
            emit(cli.output, &request, &result, &checks);
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn emit(output: Output, request: &Value, result: &Value, checks: &[Check]) {
    let checks_json: Vec<Value> = checks
        .iter()
        .map(|c| json!({"name": c.name, "pass": c.pass, "residual": c.residual}))
        .collect();
    match output {
        Output::Json => {
            let report = json!({"request": request, "result": result, "checks": checks_json});
            println!("{report}");
        }
        Output::Csv => {
            println!("name,pass,residual");
            for c in checks {
                println!("{},{},{:e}", c.name, c.pass, c.residual);
            }
            if checks.is_empty() {
                if let Value::Object(map) = result {
                    for (k, v) in map {
                        println!("{k},{v},");
                    }
                }
            }
        }
        Output::Text => {
            println!("result: {result}");
            for c in checks {
                println!(
                    "check {}: {} (residual {:.3e})",
                    c.name,
                    if c.pass { "pass" } else { "FAIL" },
                    c.residual
                );
            }
        }
    }
}

type RunResult = Result<(Value, Vec<Check>), CoreError>;

fn run(cli: &Cli) -> RunResult {
    match &cli.cmd {
        Cmd::Classify { m, gamma } => run_classify(*m, gamma),
        Cmd::Branch { m, rep, gamma, mu, lambda, j, sign } => {
            if *rep == RepKind::Aq {
                let g = GroupTag::new(*m)?;
                let aq = AqParam::new(
                    g,
                    j.ok_or_else(|| CoreError::malformed("--j is required for --rep aq"))?,
                    lambda
                        .as_deref()
                        .ok_or_else(|| CoreError::malformed("--lambda is required for --rep aq"))
                        .and_then(WeightTuple::parse)?,
                )?;
                let table = branch_aq(&aq)?;
                let components: Vec<Value> =
                    table.iter().map(|t| json!({"tau": tuple_strings(t)})).collect();
                return Ok((json!({"components": components}), Vec::new()));
            }
            let label = build_rep(*m, *rep, gamma, mu, lambda, *j, sign, 1.0)?;
            run_branch(*m, &label)
        }
        Cmd::OrbitImage { m, kind, a } => run_orbit_image(*m, *kind, a),
        Cmd::DufloVerify { m, rep, gamma, mu, lambda, j, sign, nu, bound } => {
            run_duflo(*m, *rep, gamma, mu, lambda, *j, sign, *nu, bound)
        }
        Cmd::AnalysisVerify { m, j, nu, full, tol_quadrature, tol_grid } => {
            run_analysis(*m, *j, *nu, *full, *tol_quadrature, *tol_grid, cli.seed)
        }
        Cmd::SelfTest { orbit_samples } => run_self_test(*orbit_samples, cli.seed),
    }
}

// ---------------------------------------------------------------------------
// classify / branch
// ---------------------------------------------------------------------------

fn run_classify(m: usize, gamma: &str) -> RunResult {
    let g = GroupTag::new(m)?;
    let gamma = WeightTuple::parse(gamma)?;
    let ic = classify_infl_char(g, &gamma)?;
    let reps = irreducibles_with_char(&ic)?;
    let listing: Vec<Value> = reps
        .iter()
        .map(|r| {
            json!({
                "label": r.to_string(),
                "unitary": is_unitarizable(g, r).unwrap_or(false),
            })
        })
        .collect();
    let result = json!({
        "class": format!("{:?}", ic.class),
        "gamma": tuple_strings(&gamma),
        "irreducibles": listing,
    });
    Ok((result, Vec::new()))
}

#[allow(clippy::too_many_arguments)]
fn build_rep(
    m: usize,
    rep: RepKind,
    gamma: &Option<String>,
    mu: &Option<String>,
    lambda: &Option<String>,
    j: Option<usize>,
    sign: &Option<String>,
    nu_im: f64,
) -> Result<RepLabel, CoreError> {
    let need = |o: &Option<String>, what: &str| -> Result<WeightTuple, CoreError> {
        o.as_deref()
            .ok_or_else(|| CoreError::malformed(format!("--{what} is required for this --rep")))
            .and_then(WeightTuple::parse)
    };
    match rep {
        RepKind::Ps => Ok(RepLabel::Ps { mu: need(mu, "mu")?, nu: NuParam::imaginary(nu_im) }),
        RepKind::Pij => Ok(RepLabel::PiJ {
            gamma: need(gamma, "gamma")?,
            j: j.ok_or_else(|| CoreError::malformed("--j is required for --rep pij"))?,
        }),
        RepKind::Ds | RepKind::LimitDs => Ok(RepLabel::Ds {
            gamma: need(gamma, "gamma")?,
            sign: parse_sign(sign)?,
            limit: rep == RepKind::LimitDs,
        }),
        RepKind::Aq => {
            let g = GroupTag::new(m)?;
            let aq = AqParam::new(
                g,
                j.ok_or_else(|| CoreError::malformed("--j is required for --rep aq"))?,
                need(lambda, "lambda")?,
            )?;
            aq.to_rep()
        }
    }
}

fn parse_sign(sign: &Option<String>) -> Result<SignLabel, CoreError> {
    match sign.as_deref() {
        Some("+") => Ok(SignLabel::Plus),
        Some("-") => Ok(SignLabel::Minus),
        other => Err(CoreError::malformed(format!(
            "--sign must be '+' or '-', got {other:?}"
        ))),
    }
}

fn run_branch(m: usize, rep: &RepLabel) -> RunResult {
    let g = GroupTag::new(m)?;
    let table = match rep {
        RepLabel::Ps { mu, .. } => branch_principal(g, mu)?,
        RepLabel::Ds { gamma, sign, .. } => branch_discrete(g, gamma, *sign)?,
        RepLabel::PiJ { .. } => psi(g, rep)?,
        RepLabel::FinDim { .. } => Vec::new(),
    };
    let components: Vec<Value> = table.iter().map(|t| json!({"tau": tuple_strings(t)})).collect();
    Ok((json!({"components": components}), Vec::new()))
}

// ---------------------------------------------------------------------------
// orbit-image
// ---------------------------------------------------------------------------

fn parse_floats(s: &str) -> Result<Vec<f64>, CoreError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CoreError::malformed(format!("cannot parse '{t}' as a number")))
        })
        .collect()
}

fn build_orbit(m: usize, kind: KindArg, a: Vec<f64>) -> Result<OrbitParam, CoreError> {
    let g = GroupTag::new(m)?;
    match kind {
        KindArg::Elliptic => OrbitParam::elliptic(g, a),
        KindArg::NonElliptic => OrbitParam::semisimple(g, a),
        KindArg::NonSemisimplePlus => OrbitParam::new(g, OrbitKind::NonSemisimple(true), a),
        KindArg::NonSemisimpleMinus => OrbitParam::new(g, OrbitKind::NonSemisimple(false), a),
        KindArg::Zero => OrbitParam::new(g, OrbitKind::Zero, a),
    }
}

/// Format a scalar exactly when it is (numerically) a half-integer,
/// otherwise as a trimmed decimal.
fn fmt_scalar(v: f64) -> String {
    let twice = (2.0 * v).round();
    if (2.0 * v - twice).abs() < 1e-9 && twice.abs() < 1e15 {
        HalfInt::from_twice(twice as i64).to_string()
    } else {
        format!("{v}")
    }
}

fn interval_value(iv: &Interval) -> Value {
    json!([fmt_scalar(iv.lo), fmt_scalar(iv.hi)])
}

fn run_orbit_image(m: usize, kind: KindArg, a: &str) -> RunResult {
    let o = build_orbit(m, kind, parse_floats(a)?)?;
    let image = moment_image(&o)?;
    let mut map = Map::new();
    for (i, iv) in image.interval_product.iter().enumerate() {
        map.insert(format!("x{}", i + 1), interval_value(iv));
    }
    let pf = match &image.pf_rule {
        PfRule::Fixed(s) => s.as_str().to_string(),
        PfRule::Both => "both".to_string(),
    };
    map.insert("pf".into(), Value::String(pf));
    let open: Vec<usize> = image
        .interval_product
        .iter()
        .enumerate()
        .filter(|(_, iv)| iv.lo_open)
        .map(|(i, _)| i + 1)
        .collect();
    if !open.is_empty() {
        map.insert("open_slots".into(), json!(open));
    }
    if !image.depth0_labels.is_empty() {
        map.insert(
            "depth0".into(),
            json!(image.depth0_labels.iter().map(|l| format!("{l:?}")).collect::<Vec<_>>()),
        );
    }
    Ok((Value::Object(map), Vec::new()))
}

// ---------------------------------------------------------------------------
// duflo-verify
// ---------------------------------------------------------------------------

#[allow(clippy::too_many_arguments)]
fn run_duflo(
    m: usize,
    rep: RepKind,
    gamma: &Option<String>,
    mu: &Option<String>,
    lambda: &Option<String>,
    j: Option<usize>,
    sign: &Option<String>,
    nu: f64,
    bound: &str,
) -> RunResult {
    let g = GroupTag::new(m)?;
    let bound = WeightTuple::parse(bound)?;
    if bound.rank() != 1 {
        return Err(CoreError::malformed("--bound must be a single half-integer"));
    }
    let case = match rep {
        RepKind::Aq => {
            let aq = AqParam::new(
                g,
                j.ok_or_else(|| CoreError::malformed("--j is required for --rep aq"))?,
                lambda
                    .as_deref()
                    .ok_or_else(|| CoreError::malformed("--lambda is required for --rep aq"))
                    .and_then(WeightTuple::parse)?,
            )?;
            DufloCase::Aq(aq)
        }
        _ => DufloCase::Tempered(build_rep(m, rep, gamma, mu, lambda, j, sign, nu)?),
    };
    let report = verify_duflo(g, &case, bound.get(0))?;
    let matched = report.matched;
    let result = serde_json::to_value(&report)
        .map_err(|e| CoreError::numerical(format!("serialization failed: {e}")))?;
    Ok((result, vec![Check::exact("duflo-dictionary", matched)]))
}

// ---------------------------------------------------------------------------
// analysis-verify
// ---------------------------------------------------------------------------

fn run_analysis(
    m: usize,
    j: usize,
    nu: f64,
    full: bool,
    tol_quadrature: f64,
    tol_grid: f64,
    seed: u64,
) -> RunResult {
    let params = KernelParams::new(m, j, nu)?;
    let mut checks = Vec::new();

    // Γ recurrence on random points.
    let mut rng = StdRng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let z = Complex64::new(rng.gen_range(0.6..5.0), rng.gen_range(-4.0..4.0));
        let r = gamma_fn(z + 1.0)? / (z * gamma_fn(z)?) - 1.0;
        worst = worst.max(r.norm());
    }
    checks.push(Check::new("gamma-recurrence", worst, 1e-12));

    // K̃ derivative recursion by five-point central differences.
    let mut worst = 0.0_f64;
    for alpha in [-1.0, -0.5, 0.0, 0.5, 1.0, 1.5] {
        let mut x = 0.1;
        while x <= 20.0 {
            let h = (x / 40.0_f64).min(0.02);
            let f = |t: f64| kbessel_tilde(alpha + 1.0, t).unwrap();
            let deriv =
                (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h);
            let want = -(x / 2.0) * kbessel_tilde(alpha, x)?;
            worst = worst.max((deriv - want).abs() / want.abs().max(1e-300));
            x += 0.83;
        }
    }
    checks.push(Check::new("kbessel-recursion", worst, 1e-6));

    if m > 3 {
        return Err(CoreError::domain(
            "quadrature cross-checks support m <= 3; rerun with a smaller --m",
        ));
    }

    // ft_poisson against radial quadrature.
    let mut worst = 0.0_f64;
    for mm in 1..=m {
        for lambda in [-2.0, -3.0] {
            for xi in [0.5, 1.5] {
                let got = ft_poisson(lambda, mm, xi)?;
                let want = radial_ft(mm, |r| (1.0 + r * r).powf(lambda), xi, 400.0, 200_000);
                worst = worst.max((got - want).abs() / want.abs());
            }
        }
    }
    checks.push(Check::new("poisson-quadrature", worst, tol_quadrature));

    // Riesz pairing for the Gaussian on ℝ³.
    let mut worst = 0.0_f64;
    for alpha in [1.0, 2.0] {
        let lhs = simpson(|r| r.powf(2.0 - alpha) * (-r * r / 2.0).exp(), 1e-12, 40.0, 20_000);
        let rhs = riesz_d(alpha, 3)?
            * simpson(|r| r.powf(alpha - 1.0) * (-r * r / 2.0).exp(), 1e-12, 40.0, 20_000);
        worst = worst.max((lhs - rhs).abs() / rhs.abs());
    }
    checks.push(Check::new("riesz-pairing", worst, tol_quadrature));

    // Lowest-K-type closed forms at n = 2 (five transforms reduced to
    // angular moments on the third axis).
    let c2 = 2.0_f64.powf(-2.5) * PI.sqrt() / 2.0;
    let g3 = |r: f64| (1.0 + r * r).powi(-3);
    let mut worst = 0.0_f64;
    for xi in [0.5_f64, 2.0] {
        let e = (-xi).exp();
        let f2 = axial_ft(AngularWeight::One, g3, xi, 400.0, 200_000).re;
        worst = worst.max((f2 - c2 * (1.0 + xi) * e).abs() / (c2 * e));
        let f3 = axial_ft(AngularWeight::Axial, g3, xi, 400.0, 200_000).im;
        worst = worst.max((f3 - c2 * xi * e).abs() / (c2 * e));
        let f4 = axial_ft(AngularWeight::AxialSquare, g3, xi, 400.0, 200_000).re;
        worst = worst.max((f4 - c2 * (1.0 - xi) * e).abs() / (c2 * e));
    }
    checks.push(Check::new("poisson-moment-formulas", worst, 10.0 * tol_quadrature));

    // Knapp–Stein composition J(ν)J(−ν) is scalar at random frequencies.
    let mut worst = 0.0_f64;
    for _ in 0..50 {
        let xi: Vec<f64> = (0..m).map(|_| rng.gen_range(-2.0..2.0)).collect();
        if xi.iter().map(|v| v * v).sum::<f64>() < 1e-2 {
            continue;
        }
        let k = ft_knapp_stein_kernel(&params, &xi)?;
        let kneg = ft_knapp_stein_kernel(&KernelParams::new(m, j, -nu)?, &xi)?;
        let prod = &k * &kneg;
        let scalar = prod[(0, 0)];
        let dim = prod.nrows();
        let eye = nalgebra::DMatrix::<f64>::identity(dim, dim);
        worst = worst.max((prod - eye * scalar).norm() / scalar.abs().max(1e-300));
    }
    checks.push(Check::new("knapp-stein-composition", worst, 1e-10));

    if full {
        if m != 3 {
            return Err(CoreError::domain("--full requires m = 3 (grid checks)"));
        }
        let probe = convolution_probe(64, 12.0)?;
        let res = verify_convolution_identity(&params, &probe)?;
        checks.push(Check::new("convolution-identity", res, tol_grid));

        let grid = GridFn::sample(3, 64, 12.0, 3, |x| {
            spinor_branch_core::fourier::f_lowest_ktype(x, 2).unwrap().iter().copied().collect()
        })?;
        let ghat = grid.dft();
        let mut num = 0.0;
        let mut den = 0.0;
        for p in 0..ghat.len() {
            let xi = ghat.coords(p);
            let norm: f64 = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 {
                continue;
            }
            let want = ft_lowest_ktype(&xi, 2)?;
            for c in 0..3 {
                num += (ghat.values[p * 3 + c] - want[c]).norm_sqr();
                den += want[c].norm_sqr();
            }
        }
        checks.push(Check::new("lowest-ktype-dft", (num / den).sqrt(), 5e-2));
    }

    let result = json!({
        "m": m, "j": j, "nu": nu,
        "checks_run": checks.len(),
    });
    Ok((result, checks))
}

// ---------------------------------------------------------------------------
// self-test
// ---------------------------------------------------------------------------

fn random_orbit(rng: &mut ChaCha8Rng, m: usize) -> Result<OrbitParam, CoreError> {
    let g = GroupTag::new(m)?;
    let n = g.n();
    let mut mags: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..5.0)).collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    if g.is_odd_m() {
        match rng.gen_range(0..4) {
            0 => {
                if rng.gen_bool(0.5) {
                    mags[n - 1] = -mags[n - 1];
                }
                OrbitParam::elliptic(g, mags)
            }
            1 => OrbitParam::semisimple(g, mags),
            2 => OrbitParam::new(g, OrbitKind::NonSemisimple(true), mags[..n - 1].to_vec()),
            _ => OrbitParam::new(g, OrbitKind::NonSemisimple(false), mags[..n - 1].to_vec()),
        }
    } else {
        OrbitParam::semisimple(g, mags)
    }
}

fn base_matrix(o: &OrbitParam) -> Result<nalgebra::DMatrix<f64>, CoreError> {
    let m = o.g.m();
    match &o.kind {
        OrbitKind::EllipticRegular | OrbitKind::EllipticSingular(_) => t_vec(&o.a, m),
        OrbitKind::NonElliptic | OrbitKind::NonEllipticSingular => tprime_vec(&o.a, m),
        OrbitKind::NonSemisimple(plus) => s_a_vec(&o.a, *plus, m),
        OrbitKind::Zero => Err(CoreError::domain("zero orbit has no sampling pipeline")),
    }
}

fn run_self_test(orbit_samples: usize, seed: u64) -> RunResult {
    let mut checks = Vec::new();

    // Orbit oracle equivalence: closed-form descriptors against the numeric
    // conjugation pipeline.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    let mut signs_ok = true;
    for i in 0..orbit_samples {
        let m = [3, 4, 5, 7][i % 4];
        let o = random_orbit(&mut rng, m)?;
        let bp = sample_b(&o, &mut rng);
        let closed = moment_image_point(&o, &bp)?;
        let alpha = alpha_b(&o, &bp)?;
        let nb = nbar(&alpha);
        let inv = nb
            .clone()
            .try_inverse()
            .ok_or_else(|| CoreError::numerical("nbar is not invertible"))?;
        let conj = &nb * base_matrix(&o)? * inv;
        let (_, canon) = canonicalize(&project_p(&conj)?)?;
        let pipeline = p_orbit_invariants(&canon)?;
        for (u, v) in closed.x.iter().zip(&pipeline.x) {
            worst = worst.max((u * u - v * v).abs() / (1.0 + u * u));
        }
        if pipeline.pf_sign != PfSign::Zero && closed.pf_sign != pipeline.pf_sign {
            signs_ok = false;
        }
    }
    checks.push(Check::new("orbit-oracle-x", worst, 1e-9));
    checks.push(Check::exact("orbit-oracle-sign", signs_ok));

    // Telescoping identity Ψ(π_i) ⊎ Ψ(π_{i+1}) = full interlacing set of μ_i.
    let mut telescope_ok = true;
    for m in [3usize, 4, 5] {
        let g = GroupTag::new(m)?;
        let n = g.n();
        let a = WeightTuple::new((0..n).map(|k| HalfInt::new((n - 1 - k) as i64)).collect());
        let rho_g = rho(g);
        let gamma = WeightTuple::new((0..n).map(|k| a.get(k) + rho_g.get(k)).collect());
        for i in 1..n.saturating_sub(1) {
            let mut lhs = psi(g, &RepLabel::PiJ { gamma: gamma.clone(), j: i })?;
            lhs.extend(psi(g, &RepLabel::PiJ { gamma: gamma.clone(), j: i + 1 })?);
            lhs.sort();
            let mut rhs = branch_principal(g, &psi_generator(g, &a, i)?)?;
            rhs.sort();
            telescope_ok &= lhs == rhs;
        }
    }
    checks.push(Check::exact("telescoping-identity", telescope_ok));

    // Dimension consistency of the principal-series branching tables.
    let mut dims_ok = true;
    for m in [3usize, 4, 5] {
        let g = GroupTag::new(m)?;
        for mu in small_dominant_weights(g) {
            let total = weyl_dim(&mu, spin_series(m))?;
            let mut sum = 0u128;
            for tau in branch_principal(g, &mu)? {
                sum += weyl_dim(&tau, spin_series(m - 1))?;
            }
            dims_ok &= total == sum;
        }
    }
    checks.push(Check::exact("dimension-consistency", dims_ok));

    // One orbit-method dictionary instance per parity.
    let g3 = GroupTag::new(3)?;
    let ds = RepLabel::Ds {
        gamma: WeightTuple::parse("3/2,1/2")?,
        sign: SignLabel::Minus,
        limit: false,
    };
    let rep = verify_duflo(g3, &DufloCase::Tempered(ds), HalfInt::new(5))?;
    let g4 = GroupTag::new(4)?;
    let ps = RepLabel::Ps { mu: WeightTuple::parse("1,0")?, nu: NuParam::imaginary(1.0) };
    let rep_even = verify_duflo(g4, &DufloCase::Tempered(ps), HalfInt::new(5))?;
    checks.push(Check::exact("duflo-dictionary-sample", rep.matched && rep_even.matched));

    // K̃ spot values.
    let mut worst = 0.0_f64;
    for x in [0.5_f64, 1.0, 5.0] {
        let got = kbessel_tilde(0.5, x)?;
        let want = PI.sqrt() / 2.0 * (-x).exp();
        worst = worst.max((got - want).abs() / want);
    }
    checks.push(Check::new("kbessel-half-integer", worst, 1e-11));

    let result = json!({"orbit_samples": orbit_samples, "checks_run": checks.len()});
    Ok((result, checks))
}

/// Dominant M-weights with entries bounded by 2 (both parities).
fn small_dominant_weights(g: GroupTag) -> Vec<WeightTuple> {
    let r = g.rank_m();
    let d_type = g.m() % 2 == 0;
    let mut out = Vec::new();
    let mut cur: Vec<i64> = Vec::new();
    fn rec(cur: &mut Vec<i64>, r: usize, d_type: bool, parity: i64, out: &mut Vec<WeightTuple>) {
        if cur.len() == r {
            out.push(WeightTuple::new(cur.iter().map(|&t| HalfInt::from_twice(t)).collect()));
            return;
        }
        let hi = cur.last().copied().unwrap_or(4);
        let last_slot = cur.len() == r - 1;
        let lo = if last_slot && d_type { -hi } else { 0 };
        let mut t = hi;
        while t >= lo {
            if (t - parity).rem_euclid(2) == 0 && (t >= 0 || t.abs() <= hi) {
                cur.push(t);
                rec(cur, r, d_type, parity, out);
                cur.pop();
            }
            t -= 1;
        }
    }
    for parity in [0i64, 1] {
        rec(&mut cur, r, d_type, parity, &mut out);
    }
    out
}

fn tuple_strings(t: &WeightTuple) -> Vec<String> {
    (0..t.rank()).map(|i| t.get(i).to_string()).collect()
}
