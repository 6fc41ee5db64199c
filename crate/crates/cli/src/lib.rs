//! Argument parsing and dispatch for the `mfel` binary.
//!
//! Exit codes: 0 success or passing check, 1 failing check, 2 input error.

use clap::{Args, Parser, Subcommand};
use mfel_core::arith::{format_rational, parse_rational, Q, Z};
use mfel_core::birational::{star_subdivide, triangulate, BirationalMorphism, Strategy};
use mfel_core::elliptic_genus::{self as eg, Report, RigidityHypothesis, Sample};
use mfel_core::error::Error;
use mfel_core::fan_io::{self, FanFile};
use mfel_core::multifan::{EdgeVectors, ToricModel};
use num_complex::Complex64;
use serde_json::{json, Value};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "mfel", version, about = "Orbifold elliptic genera of toric multi-fans")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate the genus at a point, or expand it as a character series.
    Genus(GenusArgs),
    /// Run a verification check and emit a JSON report.
    #[command(subcommand)]
    Verify(Verify),
    /// Star-subdivide a cone and print the new fan and the morphism.
    Subdivide(SubdivideArgs),
}

#[derive(Args, Debug, Clone)]
pub struct FanArgs {
    /// Fan file (JSON, schema 1).
    #[arg(long)]
    pub fan: PathBuf,
    /// `canonical0`, `minus-canonical`, `linear:u1,u2,..` or explicit
    /// coefficients `d1,d2,..`; defaults to the file's divisor, then
    /// `canonical0`.
    #[arg(long, allow_hyphen_values = true)]
    pub divisor: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct SampleArgs {
    /// Number of sample points.
    #[arg(long, default_value_t = 3)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Product truncation K of φ_st.
    #[arg(long, default_value_t = 40)]
    pub terms: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct GenusArgs {
    #[command(flatten)]
    pub fan: FanArgs,
    /// `w1,..,wn,tau,sigma` with complex entries such as `0.1+0.02i` or `5i`.
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["qexp", "window"])]
    pub numeric: Option<String>,
    /// q-order N of the character expansion.
    #[arg(long)]
    pub qexp: Option<i64>,
    /// Initial window radius R; doubled while the boundary shell is nonzero.
    #[arg(long, default_value_t = 3)]
    pub window: i64,
    #[arg(long, default_value_t = 40)]
    pub terms: usize,
    /// Write the output here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct MorphismArgs {
    /// Star subdivision `i,j,..@x,y,..`: cone (1-based rays) and new ray.
    #[arg(long, allow_hyphen_values = true)]
    pub subdivide: Option<String>,
    /// Rescale the edge vectors to these multiplicities.
    #[arg(long)]
    pub rescale: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Verify {
    /// Genus invariance under a star subdivision or a rescaling.
    Invariance {
        #[command(flatten)]
        fan: FanArgs,
        #[command(flatten)]
        morphism: MorphismArgs,
        #[command(flatten)]
        sample: SampleArgs,
        /// Also compare the characters exactly on the window `R,N`.
        #[arg(long)]
        exact: Option<String>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// w-independence at σ = k/N for ξ = Nη + u.
    Rigidity {
        #[command(flatten)]
        fan: FanArgs,
        #[arg(long)]
        n: i64,
        #[arg(long, default_value_t = 1)]
        k: i64,
        /// Integral class η as coefficients `e1,e2,..`.
        #[arg(long, allow_hyphen_values = true)]
        eta: String,
        /// Linear part u.
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[command(flatten)]
        sample: SampleArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// The genus of ξ = embed_linear(u) vanishes.
    Vanishing {
        #[arg(long)]
        fan: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[command(flatten)]
        sample: SampleArgs,
        #[arg(long)]
        exact: Option<String>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// ρ_*(Ê′) = Ê to degree D and q-order N.
    Class {
        #[command(flatten)]
        fan: FanArgs,
        #[command(flatten)]
        morphism: MorphismArgs,
        #[arg(long, default_value_t = 2)]
        degree: u32,
        #[arg(long, default_value_t = 1)]
        qexp: i64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Two triangulations of a non-simplicial fan give the same genus.
    Qcartier {
        #[command(flatten)]
        fan: FanArgs,
        /// Vertex order for the pulling triangulation (1-based).
        #[arg(long)]
        pulling: Option<String>,
        /// Vertex order for the placing triangulation (1-based).
        #[arg(long)]
        placing: Option<String>,
        #[arg(long, default_value_t = 2)]
        qexp: i64,
        #[command(flatten)]
        sample: SampleArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
pub struct SubdivideArgs {
    #[arg(long)]
    pub fan: PathBuf,
    /// Cone as 1-based ray indices.
    #[arg(long)]
    pub cone: String,
    #[arg(long, allow_hyphen_values = true)]
    pub ray: String,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// What a command produced.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn input(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn split(s: &str) -> Vec<&str> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty()).collect()
}

pub fn parse_rationals(s: &str) -> Result<Vec<Q>, Error> {
    split(s).into_iter().map(|x| parse_rational(x).ok_or_else(|| input(format!("not a rational: {x:?}")))).collect()
}

fn parse_ints(s: &str) -> Result<Vec<Z>, Error> {
    split(s).into_iter().map(|x| x.parse::<Z>().map_err(|_| input(format!("not an integer: {x:?}")))).collect()
}

fn parse_indices(s: &str, m: usize) -> Result<Vec<usize>, Error> {
    let mut out = Vec::new();
    for x in split(s) {
        let i: usize = x.parse().map_err(|_| input(format!("not a ray index: {x:?}")))?;
        if i == 0 || i > m {
            return Err(input(format!("ray index {i} out of range 1..={m}")));
        }
        out.push(i - 1);
    }
    Ok(out)
}

/// `a`, `bi`, `a+bi`, `a-bi`.
pub fn parse_complex(s: &str) -> Result<Complex64, Error> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || input(format!("not a complex number: {s:?}"));
    let f = |x: &str| -> Result<f64, Error> {
        match x {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => x.parse().map_err(|_| bad()),
        }
    };
    if let Some(body) = t.strip_suffix('i') {
        // split at the last sign that is not an exponent sign or leading
        let bytes = body.as_bytes();
        let cut = (1..bytes.len())
            .rev()
            .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
        match cut {
            Some(k) => Ok(Complex64::new(body[..k].parse().map_err(|_| bad())?, f(&body[k..])?)),
            None => Ok(Complex64::new(0.0, f(body)?)),
        }
    } else {
        Ok(Complex64::new(t.parse().map_err(|_| bad())?, 0.0))
    }
}

fn load(path: &PathBuf) -> Result<FanFile, Error> {
    fan_io::read(path)
}

fn model_of(f: &FanFile) -> Result<ToricModel, Error> {
    let fan = f.multifan()?;
    fan.check(&f.edges())?;
    ToricModel::new(fan, f.edges())
}

/// Resolves a divisor spec against a model.
pub fn resolve_divisor(spec: Option<&str>, file: &FanFile, model: Option<&ToricModel>) -> Result<Vec<Q>, Error> {
    let m = file.rays.len();
    let d = match spec {
        None => file.divisor.clone().unwrap_or_else(|| vec![Q::from_integer(1.into()); m]),
        Some("canonical0") | Some("minus-canonical") => vec![Q::from_integer(1.into()); m],
        Some(s) if s.starts_with("linear:") => {
            let u = parse_rationals(&s["linear:".len()..])?;
            if u.len() != file.rank {
                return Err(input(format!("linear:u needs {} entries", file.rank)));
            }
            let model = model.ok_or_else(|| input("linear:u needs a simplicial fan"))?;
            (0..m).map(|i| mfel_core::arith::dot_qz(&u, &model.edge_vector(i))).collect()
        }
        Some(s) => parse_rationals(s)?,
    };
    if d.len() != m {
        return Err(input(format!("divisor has {} coefficients for {m} rays", d.len())));
    }
    Ok(d)
}

fn morphism(model: &ToricModel, args: &MorphismArgs) -> Result<BirationalMorphism, Error> {
    match (&args.subdivide, &args.rescale) {
        (Some(s), None) => {
            let (cone, ray) = s.split_once('@').ok_or_else(|| input("--subdivide expects CONE@RAY, e.g. 1,2@1,1"))?;
            let cone = parse_indices(cone, model.fan.num_rays())?;
            let ray = parse_ints(ray)?;
            if ray.len() != model.rank() {
                return Err(input(format!("new ray needs {} coordinates", model.rank())));
            }
            star_subdivide(model, &cone, &ray)
        }
        (None, Some(r)) => {
            let mult = parse_ints(r)?;
            if mult.len() != model.fan.num_rays() {
                return Err(input("--rescale needs one multiplicity per ray"));
            }
            BirationalMorphism::rescale(model, EdgeVectors { mult })
        }
        _ => Err(input("give exactly one of --subdivide or --rescale")),
    }
}

fn samples(rank: usize, s: &SampleArgs) -> Vec<Sample> {
    eg::sample_points(rank, s.samples, s.seed)
}

fn window_arg(s: &Option<String>) -> Result<Option<(i64, i64)>, Error> {
    match s {
        None => Ok(None),
        Some(t) => {
            let v = parse_ints(t)?;
            match v.as_slice() {
                [r, n] => {
                    let (r, n) = (mfel_core::arith::to_i64(r), mfel_core::arith::to_i64(n));
                    if r < 1 || n < 0 {
                        return Err(input("--exact R,N needs R ≥ 1 and N ≥ 0"));
                    }
                    Ok(Some((r, n)))
                }
                _ => Err(input("--exact expects R,N")),
            }
        }
    }
}

fn report_json(mut r: Report, seed: Option<u64>) -> (i32, String) {
    if let (Some(seed), Value::Object(map)) = (seed, &mut r.details) {
        map.insert("seed".into(), json!(seed));
    }
    let code = if r.passed() { 0 } else { 1 };
    (code, serde_json::to_string_pretty(&r).expect("report serializes") + "\n")
}

fn genus(a: &GenusArgs) -> Result<(i32, String), Error> {
    let file = load(&a.fan.fan)?;
    let model = model_of(&file)?;
    let d = resolve_divisor(a.fan.divisor.as_deref(), &file, Some(&model))?;
    if let Some(spec) = &a.numeric {
        let vals: Vec<Complex64> = split(spec).into_iter().map(parse_complex).collect::<Result<_, _>>()?;
        let n = model.rank();
        if vals.len() != n + 2 {
            return Err(input(format!("--numeric expects {n} coordinates of w, then tau and sigma")));
        }
        let (w, tau, sigma) = (&vals[..n], vals[n], vals[n + 1]);
        if tau.im <= 0.0 {
            return Err(input("Im tau must be positive"));
        }
        let b = eg::genus_numeric(&model, &d, w, tau, sigma, a.terms)?;
        let out = json!({ "value": [b.value.re, b.value.im], "bound": b.bound, "terms": a.terms });
        return Ok((0, serde_json::to_string_pretty(&out).unwrap() + "\n"));
    }
    let prec = a.qexp.ok_or_else(|| input("give --numeric or --qexp"))?;
    if prec < 0 || a.window < 1 {
        return Err(input("--qexp must be ≥ 0 and --window ≥ 1"));
    }
    let s = eg::genus_char_formula_auto(&model, &d, a.window, prec, 64 * a.window)?;
    let ds: Vec<String> = d.iter().map(format_rational).collect();
    let mut out =
        format!("# s = zeta^(1/{}), N = {}, R = {}, divisor = [{}]\n", s.big_m, s.prec, s.radius, ds.join(", "));
    out.push_str(&s.dump());
    Ok((0, out))
}

fn verify(v: &Verify) -> Result<(i32, String), Error> {
    match v {
        Verify::Invariance { fan, morphism: ma, sample, exact, .. } => {
            let file = load(&fan.fan)?;
            let model = model_of(&file)?;
            let d = resolve_divisor(fan.divisor.as_deref(), &file, Some(&model))?;
            let rho = morphism(&model, ma)?;
            let r = eg::check_invariance(
                &rho,
                &d,
                &samples(model.rank(), sample),
                sample.terms,
                sample.tol,
                window_arg(exact)?,
            );
            Ok(report_json(r, Some(sample.seed)))
        }
        Verify::Rigidity { fan, n, k, eta, u, sample, .. } => {
            let file = load(&fan.fan)?;
            let model = model_of(&file)?;
            let d = resolve_divisor(fan.divisor.as_deref(), &file, Some(&model))?;
            let hyp = RigidityHypothesis { n: *n, eta: parse_rationals(eta)?, u: parse_rationals(u)? };
            let r = eg::check_rigidity(&model, &d, &hyp, *k, &samples(model.rank(), sample), sample.terms, sample.tol)?;
            Ok(report_json(r, Some(sample.seed)))
        }
        Verify::Vanishing { fan, u, sample, exact, .. } => {
            let file = load(fan)?;
            let model = model_of(&file)?;
            let u = parse_rationals(u)?;
            let r = eg::check_vanishing(
                &model,
                &u,
                &samples(model.rank(), sample),
                sample.terms,
                sample.tol,
                window_arg(exact)?,
            )?;
            Ok(report_json(r, Some(sample.seed)))
        }
        Verify::Class { fan, morphism: ma, degree, qexp, .. } => {
            let file = load(&fan.fan)?;
            let model = model_of(&file)?;
            let d = resolve_divisor(fan.divisor.as_deref(), &file, Some(&model))?;
            let rho = morphism(&model, ma)?;
            if *qexp < 0 {
                return Err(input("--qexp must be ≥ 0"));
            }
            Ok(report_json(eg::check_class_invariance(&rho, &d, *degree, *qexp)?, None))
        }
        Verify::Qcartier { fan, pulling, placing, qexp, sample, .. } => {
            let file = load(&fan.fan)?;
            let g = file.general_fan();
            let m = file.rays.len();
            let d = resolve_divisor(fan.divisor.as_deref(), &file, None)?;
            let order = |s: &Option<String>, default: Vec<usize>| -> Result<Vec<usize>, Error> {
                match s {
                    Some(s) => parse_indices(s, m),
                    None => Ok(default),
                }
            };
            let mut swapped: Vec<usize> = (0..m).collect();
            if m > 1 {
                swapped.swap(0, 1);
            }
            let t1 = triangulate(&g, &Strategy::Pulling(order(pulling, (0..m).collect())?))?;
            let t2 = triangulate(&g, &Strategy::Placing(order(placing, swapped)?))?;
            let us: Vec<Vec<i64>> =
                eg::window(file.rank, 1).into_iter().filter(|u| u.iter().all(|&x| x != 0)).take(4).collect();
            let r = eg::check_triangulation_independence(
                &g,
                &file.edges(),
                &d,
                &t1,
                &t2,
                &samples(file.rank, sample),
                sample.terms,
                sample.tol,
                &us,
                *qexp,
            )?;
            Ok(report_json(r, Some(sample.seed)))
        }
    }
}

fn subdivide(a: &SubdivideArgs) -> Result<(i32, String), Error> {
    let file = load(&a.fan)?;
    let model = model_of(&file)?;
    let cone = parse_indices(&a.cone, model.fan.num_rays())?;
    let ray = parse_ints(&a.ray)?;
    if ray.len() != model.rank() {
        return Err(input(format!("--ray needs {} coordinates", model.rank())));
    }
    let rho = star_subdivide(&model, &cone, &ray)?;
    let d = file.divisor.as_ref().map(|d| rho.pullback_divisor(d));
    let new = FanFile::from_multifan(&rho.source.fan, &rho.source.edges, d.as_deref());
    let fan_json: Value = serde_json::from_str(&fan_io::to_string(&new)).expect("canonical fan is JSON");
    let key = |s: &Vec<usize>| s.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",");
    let rho_json: serde_json::Map<String, Value> = rho.rho.iter().map(|(s, t)| (key(s), json!(key(t)))).collect();
    let out = json!({
        "fan": fan_json,
        "morphism": {
            "kappa": rho.kappa,
            "rho": rho_json,
            "a": rho.a.iter().map(|r| r.iter().map(format_rational).collect::<Vec<_>>()).collect::<Vec<_>>(),
        }
    });
    Ok((0, serde_json::to_string_pretty(&out).unwrap() + "\n"))
}

fn output_path(c: &Command) -> Option<&PathBuf> {
    match c {
        Command::Genus(a) => a.output.as_ref(),
        Command::Subdivide(a) => a.output.as_ref(),
        Command::Verify(v) => match v {
            Verify::Invariance { output, .. }
            | Verify::Rigidity { output, .. }
            | Verify::Vanishing { output, .. }
            | Verify::Class { output, .. }
            | Verify::Qcartier { output, .. } => output.as_ref(),
        },
    }
}

/// Runs one command; nothing is printed here.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let result = match &cli.command {
        Command::Genus(a) => genus(a),
        Command::Verify(v) => verify(v),
        Command::Subdivide(a) => subdivide(a),
    };
    match result {
        Ok((code, text)) => match output_path(&cli.command) {
            Some(p) => match std::fs::write(p, &text) {
                Ok(()) => Outcome { code, stdout: String::new(), stderr: String::new() },
                Err(e) => Outcome { code: 2, stdout: String::new(), stderr: format!("error: {}: {e}\n", p.display()) },
            },
            None => Outcome { code, stdout: text, stderr: String::new() },
        },
        Err(e) => Outcome { code: 2, stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("5i").unwrap(), Complex64::new(0.0, 5.0));
        assert_eq!(parse_complex("0.1+0.02i").unwrap(), Complex64::new(0.1, 0.02));
        assert_eq!(parse_complex("-0.3-i").unwrap(), Complex64::new(-0.3, -1.0));
        assert_eq!(parse_complex("1e-3+2e-2i").unwrap(), Complex64::new(1e-3, 2e-2));
        assert_eq!(parse_complex("-2").unwrap(), Complex64::new(-2.0, 0.0));
        assert!(parse_complex("x").is_err());
    }

    #[test]
    fn indices_are_one_based() {
        assert_eq!(parse_indices("1,3", 3).unwrap(), vec![0, 2]);
        assert!(parse_indices("0", 3).is_err());
        assert!(parse_indices("4", 3).is_err());
    }

    #[test]
    fn usage_error_exits_2() {
        let o = run(["mfel", "genus"]);
        assert_eq!(o.code, 2);
        assert!(o.stderr.contains("--fan"));
    }
}
