//! One function per subcommand. Each returns whether its check passed.

use std::error::Error;
use std::path::{Path, PathBuf};

use clap::Args;
use num_rational::BigRational;
use serde_json::{json, Value};

use wandering::asymptotic::{beta_cap, default_sigma_grid, minimal_beta, objective_bound, reproduce_bounds, sigma_condition, sigma_threshold};
use wandering::certify::{check_certificate, verify_sequence, Verdict};
use wandering::model::GeneratorPair;
use wandering::pipeline::{self, PipelineConfig, PipelineError};
use wandering::recovery::{default_z3, parameter_rows, recover, rounded_point};
use wandering::reduction::{compute_c, objective_b0, objective_b1, objective_b2, optimal_z1, reduce, split_e, with_unit_d0, z3_denominator, ReducedSystem};
use wandering::reproduce::{weight_table, parameter_table};
use wandering::scalar::{format_rational, parse_rational, Cplx, Field, Interval, Regime, Surd};
use wandering::search::strategy::DSpace;
use wandering::search::tables::{evaluate_rows, published, Side};
use wandering::search::{minimize, AlphaSet, AlphaValue, IntSet, SearchConfig};

use crate::output::{csv_text, Sink};
use crate::system::{parse_d, SystemArgs};

pub type CmdResult = Result<bool, Box<dyn Error>>;

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    /// `d_1,d_2,d_3` or `d_0,d_1,d_2,d_3`.
    #[arg(long, value_delimiter = ',', default_value = "1,4,6")]
    pub d: Vec<String>,
    /// Real `Z_3`; enables `B_0`.
    #[arg(long, allow_hyphen_values = true)]
    pub z3: Option<String>,
    /// Real `Z_1`; the minimiser when absent.
    #[arg(long)]
    pub z1: Option<String>,
    /// Print the twelve matrix weights as exact rationals instead.
    #[arg(long)]
    pub emit_weights: bool,
}

pub fn eval(args: &EvalArgs, sink: &Sink) -> CmdResult {
    let pattern = args.system.pattern()?;
    let seq = args.system.sequence(&pattern)?;
    if args.emit_weights {
        let mut rows = vec![vec!["t".to_string(), "omega".to_string()]];
        let mut indices = pattern.matrix_indices();
        indices.sort_unstable();
        for t in indices {
            rows.push(vec![t.to_string(), format_rational(&seq.weight::<BigRational>(t)?)]);
        }
        sink.write(&csv_text(&rows)?)?;
        return Ok(true);
    }
    let d = parse_d(&args.d)?;
    let z3 = args.z3.as_deref().map(parse_rational).transpose()?;
    let z1 = args.z1.as_deref().map(parse_rational).transpose()?;
    let rows = match args.system.regime(&seq) {
        Regime::Rational => eval_in::<Surd>(&seq, &pattern, &d, z3.as_ref(), z1.as_ref())?,
        Regime::Interval => eval_in::<Interval>(&seq, &pattern, &d, z3.as_ref(), z1.as_ref())?,
        Regime::Float => eval_in::<f64>(&seq, &pattern, &d, z3.as_ref(), z1.as_ref())?,
    };
    let text: String = rows.iter().map(|(name, v)| format!("{name} = {v:.10e}\n")).collect();
    sink.write(&text)?;
    Ok(true)
}

fn eval_in<T: Field>(
    seq: &wandering::weights::WeightSequence,
    pattern: &wandering::pattern::DegreePattern,
    d: &[BigRational; 3],
    z3: Option<&BigRational>,
    z1: Option<&BigRational>,
) -> Result<Vec<(&'static str, f64)>, Box<dyn Error>> {
    let rs: ReducedSystem<T> = reduce(seq, pattern)?;
    let d = with_unit_d0(d.clone().map(|q| T::from_rational(&q)));
    let c = compute_c(&rs, &d)?;
    let mut rows = vec![
        ("C_1", c.c1.to_f64()),
        ("C_2", c.c2.to_f64()),
        ("C_3", c.c3.to_f64()),
        ("C_4", c.c4.to_f64()),
        ("C_5", c.c5.to_f64()),
        ("B_2", objective_b2(&rs, &d)?.to_f64()),
        ("B_1", objective_b1(&rs, &d)?.to_f64()),
    ];
    if let Some(z3) = z3 {
        let z3 = Cplx::real(T::from_rational(z3));
        let (e0, e1) = split_e(&c, &z3)?;
        let z1 = match z1 {
            Some(z) => T::from_rational(z),
            None => optimal_z1(&e0, &e1)?,
        };
        rows.extend([
            ("|C_1 Z_3 - C_3/2|", z3_denominator(&c, &z3)?.to_f64()),
            ("e_0", e0.to_f64()),
            ("e_1", e1.to_f64()),
            ("Z_1", z1.to_f64()),
            ("B_0", objective_b0(&c, &z3, &z1)?.to_f64()),
        ]);
    }
    Ok(rows)
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    /// JSON or TOML search configuration; replaces the flags below.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value = "-16", allow_hyphen_values = true)]
    pub alpha: String,
    #[arg(long, default_value_t = 6)]
    pub k: u64,
    #[arg(long, default_value_t = 0)]
    pub phi2: u64,
    #[arg(long, default_value_t = 0)]
    pub phi3: u64,
    #[arg(long, default_value = "coordinate-descent")]
    pub strategy: String,
    /// b2, b1 or b0.
    #[arg(long, default_value = "b1")]
    pub target: String,
    /// Points per axis of the log-spaced grid.
    #[arg(long)]
    pub points: Option<usize>,
}

pub fn load_search_config(path: &Path) -> Result<SearchConfig, Box<dyn Error>> {
    let text = std::fs::read_to_string(path)?;
    Ok(match path.extension().and_then(|e| e.to_str()) {
        Some("toml") => toml::from_str(&text)?,
        _ => serde_json::from_str(&text)?,
    })
}

pub fn search(args: &SearchArgs, sink: &Sink) -> CmdResult {
    let config = match &args.config {
        Some(path) => load_search_config(path)?,
        None => {
            let mut c = SearchConfig::new(parse_rational(&args.alpha)?, args.k);
            c.alpha = AlphaSet::One(AlphaValue::Text(args.alpha.clone()));
            c.phi2 = IntSet::One(args.phi2);
            c.phi3 = IntSet::One(args.phi3);
            c.strategy = args.strategy.clone();
            c.target = args.target.clone();
            if let Some(p) = args.points {
                c.d.points = p;
            }
            c
        }
    };
    let result = minimize(&config)?;
    sink.write(&pretty(&serde_json::to_value(&result)?)?)?;
    Ok(result.below_threshold == Some(true))
}

#[derive(Args, Debug)]
pub struct RecoverArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[arg(long, value_delimiter = ',', default_value = "1,4,6")]
    pub d: Vec<String>,
    /// Real `Z_3`; the margin rule when absent.
    #[arg(long, allow_hyphen_values = true)]
    pub z3: Option<String>,
    /// Significant digits of `A_15`.
    #[arg(long, default_value_t = pipeline::POINT_DIGITS)]
    pub digits: usize,
    /// Also write the core generator pair as JSON.
    #[arg(long)]
    pub pair_out: Option<PathBuf>,
}

pub fn recover_cmd(args: &RecoverArgs, sink: &Sink) -> CmdResult {
    let pattern = args.system.pattern()?;
    let seq = args.system.sequence(&pattern)?;
    let d = parse_d(&args.d)?;
    let z3 = args.z3.as_deref().map(parse_rational).transpose()?;
    let (rows, pair) = match args.system.regime(&seq) {
        Regime::Rational => recover_in::<Surd>(&seq, &pattern, &d, z3, args.digits)?,
        Regime::Interval => recover_in::<Interval>(&seq, &pattern, &d, z3, args.digits)?,
        Regime::Float => recover_in::<f64>(&seq, &pattern, &d, z3, args.digits)?,
    };
    if let Some(path) = &args.pair_out {
        std::fs::write(path, pretty(&pair)?)?;
    }
    sink.write(&csv_text(&rows)?)?;
    Ok(true)
}

type Recovered = (Vec<Vec<String>>, Value);

fn recover_in<T: Field>(
    seq: &wandering::weights::WeightSequence,
    pattern: &wandering::pattern::DegreePattern,
    d: &[BigRational; 3],
    z3: Option<BigRational>,
    digits: usize,
) -> Result<Recovered, Box<dyn Error>> {
    let rs: ReducedSystem<T> = reduce(seq, pattern)?;
    let d = with_unit_d0(d.clone().map(|q| T::from_rational(&q)));
    let z3 = match z3 {
        Some(z) => z,
        None => default_z3(&compute_c(&rs, &d)?)?,
    };
    let (point, summary) = rounded_point(&rs, d, Cplx::real(T::from_rational(&z3)), digits)?;
    let params = recover(&point, &rs)?;
    let mut rows = vec![vec!["name".to_string(), "computed".to_string()]];
    rows.extend(parameter_rows(&summary, &params).into_iter().map(|r| vec![r.name, r.computed.to_string()]));
    Ok((rows, params.generator_pair().to_json(pattern)))
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    /// Re-verify a certificate standalone.
    #[arg(long, conflicts_with = "pair")]
    pub check: Option<PathBuf>,
    /// Generator pair JSON to certify against the weights below.
    #[arg(long, required_unless_present = "check")]
    pub pair: Option<PathBuf>,
    #[command(flatten)]
    pub system: SystemArgs,
    /// Highest shift count evaluated.
    #[arg(long)]
    pub smax: Option<u64>,
}

pub fn certify(args: &CertifyArgs, sink: &Sink) -> CmdResult {
    if let Some(path) = &args.check {
        let value: Value = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        let report = check_certificate(&value)?;
        sink.write(&pretty(&json!({
            "recorded": report.recorded,
            "from_spec": report.from_spec,
            "from_embedded": report.from_embedded,
            "mismatches": report.mismatches,
            "consistent": report.consistent(),
        }))?)?;
        return Ok(report.consistent() && report.recorded == Verdict::Pass);
    }
    let path = args.pair.as_ref().ok_or("either --check or --pair is required")?;
    let value: Value = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    let (pattern, _) = GeneratorPair::<Interval>::from_json(&value)?;
    let seq = args.system.sequence(&pattern)?;
    let cert = match args.system.regime(&seq) {
        Regime::Rational => verify_sequence(&GeneratorPair::<Surd>::from_json(&value)?.1, &pattern, &seq, args.smax)?,
        Regime::Interval => verify_sequence(&GeneratorPair::<Interval>::from_json(&value)?.1, &pattern, &seq, args.smax)?,
        Regime::Float => verify_sequence(&GeneratorPair::<f64>::from_json(&value)?.1, &pattern, &seq, args.smax)?,
    };
    sink.write(&pretty(&cert.to_json())?)?;
    Ok(cert.verdict == Verdict::Pass)
}

#[derive(Args, Debug)]
pub struct PipelineArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    /// Fixed `d`; searched when absent.
    #[arg(long, value_delimiter = ',')]
    pub d: Option<Vec<String>>,
    #[arg(long, allow_hyphen_values = true)]
    pub z3: Option<String>,
    /// Initial `a_4 = b_5`, shrunk when too large.
    #[arg(long, default_value = "1")]
    pub register: String,
    /// Points per axis of the search grid.
    #[arg(long)]
    pub points: Option<usize>,
}

pub fn pipeline_cmd(args: &PipelineArgs, sink: &Sink) -> CmdResult {
    let pattern = args.system.pattern()?;
    let seq = args.system.sequence(&pattern)?;
    let mut config = PipelineConfig::new(seq, pattern);
    config.d = args.d.as_deref().map(parse_d).transpose()?;
    config.z3 = args.z3.as_deref().map(parse_rational).transpose()?;
    config.register = parse_rational(&args.register)?;
    config.regime = args.system.regime;
    config.space = DSpace {
        points: args.points.unwrap_or(DSpace::default().points),
        ..DSpace::default()
    };
    match pipeline::run(&config) {
        Ok(out) => {
            eprintln!(
                "verdict {} with c = {:.6}, d = ({}), Z_3 = {}, registers {}",
                out.certificate.verdict,
                out.certificate.c_float,
                out.d.join(", "),
                out.z3,
                out.register
            );
            sink.write(&pretty(&out.certificate.to_json())?)?;
            Ok(out.certificate.verdict == Verdict::Pass)
        }
        Err(PipelineError::NotFound(best)) => {
            eprintln!("no point with B_1 below 1; best value {best}");
            Ok(false)
        }
        Err(e) => Err(e.into()),
    }
}

#[derive(Args, Debug)]
pub struct AsymptoticArgs {
    #[arg(long, default_value_t = 10)]
    pub k_from: u64,
    #[arg(long, default_value_t = 17)]
    pub k_to: u64,
    /// Largest `beta` scanned per `k`.
    #[arg(long, default_value_t = 2000)]
    pub beta_limit: u64,
}

pub fn asymptotic(args: &AsymptoticArgs, sink: &Sink) -> CmdResult {
    if args.k_from < 10 || args.k_to < args.k_from {
        return Err("need 10 <= k-from <= k-to".into());
    }
    let grid = default_sigma_grid();
    let mut rows = vec![["k", "beta", "sigma", "bound", "threshold", "cap", "marginal", "within_cap"]
        .map(String::from)
        .to_vec()];
    let mut all = true;
    for k in args.k_from..=args.k_to {
        match minimal_beta(k, &grid, args.beta_limit) {
            Some((beta, sigma)) => {
                let b = beta as f64;
                let within = b <= beta_cap(k);
                all &= within;
                rows.push(vec![
                    k.to_string(),
                    beta.to_string(),
                    sigma.to_string(),
                    format!("{:.6}", objective_bound(k, b, sigma)),
                    format!("{:.3}", sigma_threshold(k, sigma)),
                    format!("{:.3}", beta_cap(k)),
                    sigma_condition(k, b, sigma).marginal.to_string(),
                    within.to_string(),
                ]);
            }
            None => {
                all = false;
                rows.push(vec![k.to_string(), String::new(), String::new(), String::new(), String::new(), format!("{:.3}", beta_cap(k)), String::new(), "false".into()]);
            }
        }
    }
    sink.write(&csv_text(&rows)?)?;
    Ok(all)
}

#[derive(Args, Debug)]
pub struct ReproduceArgs {
    /// Table number, 1 to 5.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=5))]
    pub table: u8,
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn reproduce(args: &ReproduceArgs, sink: &Sink) -> CmdResult {
    let (rows, ok): (Vec<Vec<String>>, bool) = match args.table {
        1 | 2 => {
            let reports = evaluate_rows(published(args.table).ok_or("unknown table")?);
            let mut rows = vec![[
                "alpha", "phi2", "phi3", "d1", "d2", "d3", "k", "printed", "computed", "ratio", "side", "within_factor_2",
                "regime", "error",
            ]
            .map(String::from)
            .to_vec()];
            let mut ok = true;
            for r in &reports {
                let p = &r.row;
                ok &= r.within_factor_2
                    && match r.side {
                        Some(Side::Below) => true,
                        Some(_) => p.printed >= 0.99,
                        None => false,
                    };
                let side = r.side.map(|s| serde_json::to_value(s).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default());
                rows.push(vec![
                    p.alpha.to_string(),
                    p.phi2.to_string(),
                    p.phi3.to_string(),
                    p.d[0].to_string(),
                    p.d[1].to_string(),
                    p.d[2].to_string(),
                    p.k.to_string(),
                    p.printed.to_string(),
                    opt(r.computed),
                    opt(r.ratio),
                    side.unwrap_or_default(),
                    r.within_factor_2.to_string(),
                    opt(r.regime.map(Regime::as_str)),
                    r.error.clone().unwrap_or_default(),
                ]);
            }
            (rows, ok)
        }
        3 => {
            let table = weight_table()?;
            let mut rows = vec![["t", "label", "printed", "computed", "last_place_error", "rounded", "faithful"]
                .map(String::from)
                .to_vec()];
            rows.extend(table.iter().map(|r| {
                vec![
                    r.t.to_string(),
                    r.label.clone(),
                    r.printed.clone(),
                    format!("{:.14e}", r.computed),
                    format!("{:.4}", r.last_place_error),
                    r.rounded.to_string(),
                    r.faithful.to_string(),
                ]
            }));
            (rows, table.iter().all(|r| r.faithful))
        }
        4 => {
            let table = parameter_table()?;
            let mut rows = vec![["name", "printed", "upper_bound", "computed", "relative_delta", "agrees", "recovered"]
                .map(String::from)
                .to_vec()];
            rows.extend(table.iter().map(|r| {
                vec![
                    r.name.clone(),
                    r.printed.to_string(),
                    r.upper_bound.to_string(),
                    format!("{:.6e}", r.computed),
                    opt(r.relative_delta.map(|x| format!("{x:.4}"))),
                    r.agrees.to_string(),
                    r.recovered.to_string(),
                ]
            }));
            let b0_ok = table.iter().any(|r| r.name == "B_0" && r.computed < 1.0);
            (rows, b0_ok && table.iter().filter(|r| r.recovered).all(|r| r.agrees))
        }
        _ => {
            let table = reproduce_bounds();
            let mut rows = vec![[
                "k", "beta", "sigma", "printed_bound", "printed_threshold", "bound", "threshold", "cap", "sigma_condition",
                "marginal", "ok",
            ]
            .map(String::from)
            .to_vec()];
            rows.extend(table.iter().map(|r| {
                vec![
                    r.k.to_string(),
                    r.beta.to_string(),
                    r.sigma.to_string(),
                    r.printed_bound.to_string(),
                    r.printed_threshold.to_string(),
                    format!("{:.6}", r.bound),
                    format!("{:.3}", r.threshold),
                    format!("{:.3}", r.cap),
                    r.sigma_condition.holds.to_string(),
                    r.sigma_condition.marginal.to_string(),
                    r.ok().to_string(),
                ]
            }));
            (rows, table.iter().all(|r| r.ok()))
        }
    };
    sink.write(&csv_text(&rows)?)?;
    Ok(ok)
}

fn pretty(v: &Value) -> Result<String, Box<dyn Error>> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}
