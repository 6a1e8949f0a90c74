//! Command-line front end. [`run`] is pure: it maps an argument list to
//! stdout, stderr and an exit code, so it can be driven from tests.

use std::f64::consts::PI;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algebra::{apply_involution, apply_isomorphism, commutator, EtaSignature, Involution};
use crate::error::{Error, Result};
use crate::expr::{parse_element, parse_matrix2, parse_scalar};
use crate::holo::{default_nodes, fourier_project, gamma_s, verify_implementation, BargmannRotation, TruncFn};
use crate::krein::{
    build_antifock, build_fock_bargmann, build_schroedinger_pair, build_schroedinger_window, reduce_to_canonical,
    verify_rep, BasisRep, Flavor, Sign,
};
use crate::multimode::{
    build_multimode_rep, diagonalize_eta, spectral_condition_check, vacuum_descent, MultiIndex, MultiIndexState,
};
use crate::pcf::{self, weber_d};
use crate::scalar::{Exact, Scalar};
use crate::sl2::{classify_orbit, classify_orbit_exact, conjugation_from_v, Mat2, SlVector};

/// Float output: integral values as integers, everything else with 17
/// significant digits. Non-finite values become `null`.
struct FixedFloat;

impl serde_json::ser::Formatter for FixedFloat {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, x: f64) -> io::Result<()> {
        write!(w, "{}", format_f64(x))
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, x: f32) -> io::Result<()> {
        self.write_f64(w, x as f64)
    }
}

pub fn format_f64(x: f64) -> String {
    if !x.is_finite() {
        "null".into()
    } else if x == x.trunc() && x.abs() < 9.007_199_254_740_992e15 {
        if x == 0.0 {
            "0".into()
        } else {
            format!("{}", x as i64)
        }
    } else {
        format!("{x:.16e}")
    }
}

/// Serializes with the fixed float format and a trailing newline.
pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloat);
    v.serialize(&mut ser).expect("in-memory serialization");
    let mut s = String::from_utf8(buf).expect("json is utf-8");
    s.push('\n');
    s
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    /// Default truncation degree.
    pub degree: Option<usize>,
    /// Numerical tolerance for unimodularity and orbit tests.
    pub tolerance: Option<f64>,
    /// Number of gauge samples in `verify-rep`.
    pub samples: Option<usize>,
    /// Narrower PCF window.
    pub pcf_max_lambda: Option<f64>,
    pub pcf_max_x: Option<f64>,
}

#[derive(Parser, Debug)]
#[command(name = "ccr-krein", version, about = "CCR algebras, regular representations and Krein-space checks")]
pub struct Cli {
    /// TOML file with defaults (degree, tolerance, samples, pcf_max_lambda, pcf_max_x).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Normal-order an element (z before d, creators before annihilators).
    NormalOrder {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long, allow_hyphen_values = true)]
        eta: Option<String>,
    },
    /// Normal-ordered commutator [x, y].
    Commutator {
        #[arg(allow_hyphen_values = true)]
        x: String,
        #[arg(allow_hyphen_values = true)]
        y: String,
        #[arg(long, allow_hyphen_values = true)]
        eta: Option<String>,
    },
    /// Apply the involution with matrix C_K ("a, b; c, d") to a holomorphic element.
    Involve {
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Map a Heisenberg element through (a*, a)^T = V (z, d)^T.
    Isomap {
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Classify n3 s3 + n- s- + n+ s+ into an orbit of the triangular group.
    ClassifyOrbit {
        #[arg(long, allow_hyphen_values = true)]
        n3: String,
        #[arg(long, allow_hyphen_values = true)]
        nminus: String,
        #[arg(long, allow_hyphen_values = true)]
        nplus: String,
    },
    /// Apply Gamma_S for S = [[alpha, 0], [beta, 1/alpha]] to a truncated series.
    GammaS {
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        beta: String,
        /// Comma-separated Taylor coefficients c0, c1, ...
        #[arg(long, allow_hyphen_values = true)]
        coeffs: String,
        #[arg(long)]
        degree: Option<usize>,
    },
    /// Fourier component k of f under f(z) -> f(e^{is} z).
    Project {
        #[arg(long, allow_hyphen_values = true)]
        coeffs: String,
        #[arg(long, allow_hyphen_values = true)]
        k: i64,
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long)]
        nodes: Option<usize>,
    },
    /// Evaluate the parabolic cylinder function D_lambda(x).
    PcfEval {
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        x_im: f64,
    },
    /// Build a representation and print it as JSON.
    BuildRep(BuildArgs),
    /// Check the *-property, CCR, Gram recursion and gauge action.
    VerifyRep {
        /// JSON from build-rep; "-" reads stdin.
        #[arg(long)]
        input: Option<String>,
        #[command(flatten)]
        build: BuildArgs,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Reduce an isomorphism V and gauge constant mu to canonical form.
    ReduceCanonical {
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        mu: String,
    },
    /// Build the multimode representation and report its checks.
    MultimodeBuild(ModeArgs),
    /// Fourier support of s -> <g, U(s) f>.
    SpectralCheck {
        #[command(flatten)]
        modes: ModeArgs,
        /// State as {"n1,n2,...": [re, im], ...}.
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        g: String,
        #[arg(long)]
        nodes: Option<usize>,
    },
    /// Descend from a nonzero state to a vector killed by every annihilator.
    VacuumDescent {
        #[command(flatten)]
        modes: ModeArgs,
        #[arg(long, allow_hyphen_values = true)]
        f: String,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum RepKind {
    Fock,
    Antifock,
    Schroedinger,
    Pair,
}

#[derive(Args, Debug, Clone)]
pub struct BuildArgs {
    #[arg(long, value_enum)]
    pub kind: Option<RepKind>,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub theta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    /// Highest level N.
    #[arg(long)]
    pub levels: Option<usize>,
    /// Lowest level (Schroedinger type only).
    #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
    pub n_min: i64,
    #[arg(long, default_value = "+", allow_hyphen_values = true)]
    pub sign: String,
    #[arg(long, value_enum, default_value = "bargmann")]
    pub flavor: FlavorArg,
    /// Hermitian commutant weight "a, b; c, d" for --kind pair.
    #[arg(long, allow_hyphen_values = true)]
    pub weight: Option<String>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum FlavorArg {
    Bargmann,
    Schroedinger,
}

#[derive(Args, Debug, Clone)]
pub struct ModeArgs {
    /// Signs, e.g. "1,-1,1".
    #[arg(long, allow_hyphen_values = true)]
    pub eta: Option<String>,
    /// Hermitian matrix "h11, h12; h21, h22" reduced to a signature.
    #[arg(long, allow_hyphen_values = true)]
    pub h: Option<String>,
    #[arg(long)]
    pub degree: Option<usize>,
}

pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

fn error_json(code: &str, message: &str) -> String {
    to_json(&json!({"error": {"code": code, "message": message}}))
}

fn exit_code(e: &Error) -> i32 {
    if e.is_parse() {
        2
    } else {
        1
    }
}

/// Parses `args` (including the program name) and executes the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    Outcome { stdout: e.to_string(), stderr: String::new(), code: 0 }
                }
                _ => Outcome { stdout: String::new(), stderr: error_json("ParseError", e.to_string().trim()), code: 2 },
            };
        }
    };
    run_cli(&cli, None)
}

/// Executes a parsed command; `stdin` overrides process stdin for `--input -`.
pub fn run_cli(cli: &Cli, stdin: Option<&str>) -> Outcome {
    let result = load_config(cli.config.as_ref()).and_then(|cfg| execute(&cli.command, &cfg, stdin));
    match result {
        Ok(v) => Outcome { stdout: to_json(&v), stderr: String::new(), code: 0 },
        Err(e) => Outcome { stdout: String::new(), stderr: error_json(e.code(), &e.to_string()), code: exit_code(&e) },
    }
}

fn load_config(path: Option<&PathBuf>) -> Result<Config> {
    let Some(p) = path else {
        return Ok(Config::default());
    };
    let text = std::fs::read_to_string(p).map_err(|e| Error::InvalidInput(format!("{}: {e}", p.display())))?;
    toml::from_str(&text).map_err(|e| Error::Parse {
        offset: e.span().map(|s| s.start).unwrap_or(0),
        expected: vec![e.message().to_string()],
    })
}

fn parse_eta(text: &str) -> Result<EtaSignature> {
    let signs: std::result::Result<Vec<i8>, _> = text.split(',').map(|s| s.trim().parse::<i8>()).collect();
    EtaSignature::new(signs.map_err(|_| Error::InvalidInput(format!("bad eta list {text:?}")))?)
}

fn c64(x: &Exact) -> Complex64 {
    x.to_c64()
}

fn scalar_c64(text: &str) -> Result<Complex64> {
    Ok(c64(&parse_scalar(text)?))
}

fn mat_exact(text: &str) -> Result<Mat2<Exact>> {
    Ok(Mat2::new(parse_matrix2(text)?))
}

fn mat_strings(m: &Mat2<Exact>) -> Value {
    json!([[m.get(0, 0).to_string(), m.get(0, 1).to_string()], [m.get(1, 0).to_string(), m.get(1, 1).to_string()]])
}

/// Real values print as numbers, complex ones as `[re, im]`.
fn number(z: Complex64) -> Value {
    if z.im == 0.0 {
        json!(z.re)
    } else {
        json!([z.re, z.im])
    }
}

fn coeff_list(text: &str) -> Result<Vec<Complex64>> {
    text.split(',').map(scalar_c64).collect()
}

fn trunc_fn(coeffs: &str, degree: Option<usize>, cfg: &Config, pad: usize) -> Result<TruncFn> {
    let cs = coeff_list(coeffs)?;
    let min = cs.len().saturating_sub(1);
    let d = degree.or(cfg.degree).unwrap_or(min + pad).max(min);
    Ok(TruncFn::from_coeffs(cs, d))
}

/// Deterministic gauge samples in `[0, 2π)` from the golden-ratio sequence.
pub fn gauge_samples(count: usize) -> Vec<f64> {
    const PHI: f64 = 0.618_033_988_749_894_9;
    (1..=count).map(|j| 2.0 * PI * (j as f64 * PHI).fract()).collect()
}

fn build_rep(b: &BuildArgs) -> Result<BasisRep> {
    let kind = b.kind.ok_or_else(|| Error::InvalidInput("--kind is required (or pass --input)".into()))?;
    let n = b.levels.ok_or_else(|| Error::InvalidInput("--levels is required".into()))?;
    let sign = Sign::parse(&b.sign)?;
    match kind {
        RepKind::Fock => Ok(build_fock_bargmann(n)),
        RepKind::Antifock => Ok(build_antifock(
            n,
            match b.flavor {
                FlavorArg::Bargmann => Flavor::Bargmann,
                FlavorArg::Schroedinger => Flavor::Schroedinger,
            },
        )),
        RepKind::Schroedinger => build_schroedinger_window(b.theta, b.gamma, b.n_min, n as i64, sign),
        RepKind::Pair => {
            let w = match &b.weight {
                Some(t) => Some(mat_exact(t)?.to_c64()),
                None => None,
            };
            build_schroedinger_pair(b.theta, b.gamma, n, w)
        }
    }
}

fn read_input(path: &str, stdin: Option<&str>) -> Result<String> {
    if path == "-" {
        if let Some(s) = stdin {
            return Ok(s.to_string());
        }
        let mut s = String::new();
        io::Read::read_to_string(&mut io::stdin(), &mut s).map_err(|e| Error::InvalidInput(e.to_string()))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{path}: {e}")))
    }
}

fn json_parse_error(e: serde_json::Error) -> Error {
    Error::Parse { offset: e.column(), expected: vec![e.to_string()] }
}

fn mode_setup(m: &ModeArgs, cfg: &Config) -> Result<(EtaSignature, Option<DMatrix<Complex64>>, usize)> {
    let degree = m.degree.or(cfg.degree).unwrap_or(6);
    match (&m.eta, &m.h) {
        (Some(e), None) => Ok((parse_eta(e)?, None, degree)),
        (None, Some(h)) => {
            let rows: Vec<Vec<Complex64>> = h
                .split(';')
                .map(|r| r.split(',').map(scalar_c64).collect::<Result<Vec<_>>>())
                .collect::<Result<_>>()?;
            let n = rows.len();
            if rows.iter().any(|r| r.len() != n) {
                return Err(Error::InvalidInput("--h must be square".into()));
            }
            let hm = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
            let (l, eta) = diagonalize_eta(&hm)?;
            Ok((eta, Some(l), degree))
        }
        _ => Err(Error::InvalidInput("pass exactly one of --eta or --h".into())),
    }
}

fn parse_state(text: &str, degree: usize) -> Result<MultiIndexState> {
    let map: std::collections::BTreeMap<String, [f64; 2]> = serde_json::from_str(text).map_err(json_parse_error)?;
    let mut s = MultiIndexState::zero(degree as u32);
    for (k, [re, im]) in map {
        s.add_term(k.parse::<MultiIndex>()?, Complex64::new(re, im))?;
    }
    Ok(s)
}

fn matrix_json(m: &DMatrix<Complex64>) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| json!([m[(i, j)].re, m[(i, j)].im])).collect()))
            .collect(),
    )
}

fn execute(cmd: &Command, cfg: &Config, stdin: Option<&str>) -> Result<Value> {
    let tol = cfg.tolerance.unwrap_or(1e-10);
    match cmd {
        Command::NormalOrder { expr, eta } => {
            let eta = eta.as_deref().map(parse_eta).transpose()?;
            Ok(json!({"result": parse_element(expr, eta.as_ref())?.to_string()}))
        }
        Command::Commutator { x, y, eta } => {
            let eta = eta.as_deref().map(parse_eta).transpose()?;
            let (x, y) = (parse_element(x, eta.as_ref())?, parse_element(y, eta.as_ref())?);
            Ok(json!({"result": commutator(&x, &y)?.to_string()}))
        }
        Command::Involve { matrix, expr } => {
            let k = Involution::new(mat_exact(matrix)?, tol)?;
            Ok(json!({"result": apply_involution(&k, &parse_element(expr, None)?)?.to_string()}))
        }
        Command::Isomap { v, expr } => {
            let v = mat_exact(v)?;
            let image = apply_isomorphism(&v, &parse_element(expr, None)?, tol)?;
            let c = conjugation_from_v(&v, tol)?;
            Ok(json!({"result": image.to_string(), "conjugation": mat_strings(&c)}))
        }
        Command::ClassifyOrbit { n3, nminus, nplus } => {
            let n = SlVector::new(parse_scalar(n3)?, parse_scalar(nminus)?, parse_scalar(nplus)?);
            let kind = classify_orbit_exact(&n)?;
            let q = c64(&n.q());
            let numeric = classify_orbit(&SlVector::new(c64(&n.n3), c64(&n.nminus), c64(&n.nplus)))?;
            let witness = numeric.witness.filter(|_| numeric.kind == kind);
            Ok(json!({
                "type": kind,
                "q": number(q),
                "q_exact": n.q().to_string(),
                "witness": witness.map(|w| json!({"a": number(w.a), "b": number(w.b), "scale": number(w.scale)})),
            }))
        }
        Command::GammaS { alpha, beta, coeffs, degree } => {
            let (a, b) = (scalar_c64(alpha)?, scalar_c64(beta)?);
            let f = trunc_fn(coeffs, *degree, cfg, 8)?;
            let g = gamma_s(a, b, &f)?;
            let residual = if f.degree_cap() >= 2 { Some(verify_implementation(a, b, &f)?) } else { None };
            Ok(json!({"result": g, "implementation_residual": residual}))
        }
        Command::Project { coeffs, k, degree, nodes } => {
            let f = trunc_fn(coeffs, *degree, cfg, 0)?;
            let nodes = nodes.unwrap_or_else(|| default_nodes(f.degree_cap()));
            Ok(json!({"result": fourier_project(&BargmannRotation, &f, *k, nodes)?, "nodes": nodes}))
        }
        Command::PcfEval { lambda, x, x_im } => {
            let max_l = cfg.pcf_max_lambda.unwrap_or(pcf::MAX_ABS_LAMBDA);
            let max_x = cfg.pcf_max_x.unwrap_or(pcf::MAX_ABS_X);
            let z = Complex64::new(*x, *x_im);
            if lambda.abs() > max_l || z.norm() > max_x {
                return Err(Error::DomainError(format!(
                    "outside the configured window |lambda| <= {max_l}, |x| <= {max_x}"
                )));
            }
            let v = weber_d(*lambda, z)?;
            Ok(json!({
                "lambda": v.lambda,
                "x": number(v.x),
                "value": number(v.value),
                "derivative": number(v.derivative),
                "second_derivative": number(v.second_derivative),
                "error_estimate": v.error_estimate,
            }))
        }
        Command::BuildRep(b) => Ok(serde_json::to_value(build_rep(b)?).expect("serializable")),
        Command::VerifyRep { input, build, samples } => {
            let rep: BasisRep = match input {
                Some(p) => serde_json::from_str(&read_input(p, stdin)?).map_err(json_parse_error)?,
                None => build_rep(build)?,
            };
            let samples = gauge_samples(samples.or(cfg.samples).unwrap_or(100));
            Ok(serde_json::to_value(verify_rep(&rep, &samples)?).expect("serializable"))
        }
        Command::ReduceCanonical { v, mu } => {
            let v = mat_exact(v)?.to_c64();
            Ok(serde_json::to_value(reduce_to_canonical(&v, scalar_c64(mu)?)?).expect("serializable"))
        }
        Command::MultimodeBuild(m) => {
            let (eta, l, degree) = mode_setup(m, cfg)?;
            let rep = build_multimode_rep(&eta, degree as u32)?;
            let ccr = rep.ccr_max_defect();
            let star = rep.star_property_exact();
            let gram: Vec<f64> = rep.gram::<Exact>().iter().map(|g| g.to_c64().re).collect();
            let negative = gram.iter().filter(|g| **g < 0.0).count();
            Ok(json!({
                "eta": eta.explicit(),
                "transform": l.as_ref().map(matrix_json),
                "degree": degree,
                "dim": rep.dim(),
                "negative_norm_states": negative,
                "ccr_max_defect": ccr,
                "star_property_exact": star,
                "gauge_spectrum": rep.gauge_spectrum(),
            }))
        }
        Command::SpectralCheck { modes, f, g, nodes } => {
            let (eta, _, degree) = mode_setup(modes, cfg)?;
            let rep = build_multimode_rep(&eta, degree as u32)?;
            let (f, g) = (parse_state(f, degree)?, parse_state(g, degree)?);
            let nodes = nodes.unwrap_or(4 * (degree + 1));
            Ok(serde_json::to_value(spectral_condition_check(&rep, &f, &g, nodes)?).expect("serializable"))
        }
        Command::VacuumDescent { modes, f } => {
            let (eta, _, degree) = mode_setup(modes, cfg)?;
            let rep = build_multimode_rep(&eta, degree as u32)?;
            let r = vacuum_descent(&rep, &parse_state(f, degree)?)?;
            let psi0: std::collections::BTreeMap<String, [f64; 2]> =
                r.psi0.terms().iter().map(|(k, c)| (k.to_string(), [c.re, c.im])).collect();
            Ok(json!({"psi0": psi0, "lowest_component": r.lowest_component, "steps": r.steps}))
        }
    }
}
