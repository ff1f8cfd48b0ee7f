//! Command-line definitions and their implementations.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gpbayes::conjugate_uniform::JointPredictiveMode;
use gpbayes::oracle;
use gpbayes::pipeline::{self, DataView, Params, SupportReport};
use gpbayes::{
    ContinuousDist, Gamma, GpParams, LogPower, Lomax, Pareto, Power, Predictive, ShiftedExp,
    SubclassParams, SuffStats, Uniform,
};
use serde::Serialize;
use thiserror::Error;

use crate::document::{ModelDescription, PosteriorDocument, PotRecord};
use crate::ingest::{ingest, Format};

/// Errors in how the tool was invoked, as opposed to what it was given.
#[derive(Debug, Error)]
#[error("{0}")]
pub struct UsageError(pub String);

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

#[derive(Debug, Parser)]
#[command(name = "gpbayes", version, about = "Bayesian support bounds for Generalized Pareto subclasses")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a posterior and write it as a state document.
    Fit(FitArgs),
    /// Summarize the posterior predictive of a state document.
    Predict(PredictArgs),
    /// Print posterior and predictive support bounds.
    Support(StateArgs),
    /// Score held-out data under the posterior predictive.
    Validate(ValidateArgs),
    /// Select a top-k threshold and fit the exceedances.
    Pot(PotArgs),
    /// Draw samples from a named distribution.
    Simulate(SimulateArgs),
    /// Print the grid-oracle diagnostic table.
    Verify(VerifyArgs),
    /// Emit density curves as CSV.
    Plotdata(PlotArgs),
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Input file (CSV with a header row, or JSON lines).
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Column (CSV) or field (JSON lines) holding the values.
    #[arg(long)]
    pub column: Option<String>,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub case: Option<String>,
    /// Prior hyperparameters, e.g. `l0=100,n0=1`.
    #[arg(long, conflicts_with = "noninformative")]
    pub prior: Option<String>,
    /// Use the non-informative limit of the prior.
    #[arg(long)]
    pub noninformative: bool,
    /// Known parameters, e.g. `alpha=1.2`.
    #[arg(long)]
    pub known: Option<String>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub data: DataArgs,
    /// Existing state to update with the new data instead of a prior.
    #[arg(long)]
    pub state: Option<PathBuf>,
    /// Where to write the state document (stdout if absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StateArgs {
    #[arg(long)]
    pub state: PathBuf,
    /// Emit JSON instead of text.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Numeric,
    Plateau,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub state: PathBuf,
    /// Probabilities at which to report predictive quantiles.
    #[arg(long, value_delimiter = ',', default_value = "0.01,0.05,0.5,0.95,0.99")]
    pub quantiles: Vec<f64>,
    /// Points at which to report the predictive density and CDF.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub at: Vec<f64>,
    /// Predictive of the uniform joint model: exact quadrature or the
    /// uniform approximation.
    #[arg(long, value_enum, default_value = "numeric")]
    pub mode: Mode,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub state: PathBuf,
    #[arg(long)]
    pub holdout: PathBuf,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub column: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum View {
    Raw,
    Excess,
}

#[derive(Debug, Args)]
pub struct PotArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub data: DataArgs,
    /// Number of top order statistics; the threshold is the k-th largest.
    #[arg(long)]
    pub k: usize,
    /// Fit raw exceedances or excesses over the threshold.
    #[arg(long, value_enum, default_value = "raw")]
    pub view: View,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// pareto, lomax, shifted_exp, power, inverted_pareto, log_power, uniform or gamma.
    #[arg(long)]
    pub dist: String,
    /// Distribution parameters, e.g. `alpha=1.2,l=5`.
    #[arg(long)]
    pub params: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Grid cells for the single-parameter cases.
    #[arg(long, default_value_t = oracle::DEFAULT_CELLS)]
    pub cells: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    Gp,
    Pareto,
    Exp,
    Power,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[arg(long, value_enum)]
    pub figure: Figure,
    /// Points per curve.
    #[arg(long, default_value_t = 501)]
    pub points: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `k=v,k=v`.
pub fn parse_params(text: &str) -> Result<Params> {
    let mut out = Params::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| usage(format!("expected key=value, got {item:?}")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| usage(format!("value of {k:?} is not a number: {v:?}")))?;
        if out.insert(k.trim().to_string(), v).is_some() {
            return Err(usage(format!("parameter {k:?} given twice")));
        }
    }
    Ok(out)
}

impl ModelArgs {
    fn is_empty(&self) -> bool {
        self.family.is_none()
            && self.case.is_none()
            && self.prior.is_none()
            && !self.noninformative
            && self.known.is_none()
    }

    fn description(&self) -> Result<ModelDescription> {
        let family = self.family.as_deref().ok_or_else(|| usage("--family is required"))?;
        let case = self.case.as_deref().ok_or_else(|| usage("--case is required"))?;
        let prior = match (&self.prior, self.noninformative) {
            (Some(p), false) => Some(parse_params(p)?),
            (None, true) => None,
            _ => return Err(usage("give exactly one of --prior and --noninformative")),
        };
        Ok(ModelDescription {
            family: family.parse()?,
            case: case.parse()?,
            prior,
            known: self.known.as_deref().map_or(Ok(Params::new()), parse_params)?,
        })
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn save(doc: &PosteriorDocument, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => Ok(doc.save(path)?),
        None => emit(None, &doc.to_json()?),
    }
}

fn read_data(args: &DataArgs) -> Result<Vec<f64>> {
    Ok(ingest(&args.data, args.format, args.column.as_deref())?)
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Fit(a) => fit(a),
        Command::Predict(a) => predict(a),
        Command::Support(a) => support(a),
        Command::Validate(a) => validate(a),
        Command::Pot(a) => pot(a),
        Command::Simulate(a) => simulate(a),
        Command::Verify(a) => verify(a),
        Command::Plotdata(a) => plotdata(a),
    }
}

fn fit(args: FitArgs) -> Result<()> {
    let stats = SuffStats::from_data(&read_data(&args.data)?);
    let doc = match &args.state {
        Some(path) => {
            if !args.model.is_empty() {
                return Err(usage("--state carries the model; drop --family/--case/--prior/--known"));
            }
            let old = PosteriorDocument::load(path)?;
            let posterior = pipeline::sequential_update(&old.posterior, &stats)?;
            PosteriorDocument {
                posterior,
                stats: old.stats.merge(&stats),
                ..old
            }
        }
        None => {
            let model = args.model.description()?;
            let posterior = pipeline::fit(&model.spec()?, &stats)?;
            PosteriorDocument::new(model, posterior, stats)
        }
    };
    save(&doc, args.out.as_deref())
}

#[derive(Debug, Serialize)]
pub struct Quantile {
    pub p: f64,
    pub x: f64,
}

#[derive(Debug, Serialize)]
pub struct DensityPoint {
    pub x: f64,
    pub pdf: f64,
    pub cdf: f64,
}

/// What `predict` prints. Infinite support ends appear as `null`.
#[derive(Debug, Serialize)]
pub struct PredictReport {
    pub kind: &'static str,
    pub support: (f64, f64),
    pub quantiles: Vec<Quantile>,
    pub density: Vec<DensityPoint>,
}

pub fn predict_report(pred: &Predictive, probs: &[f64], at: &[f64]) -> Result<PredictReport> {
    Ok(PredictReport {
        kind: pred.kind(),
        support: pred.support(),
        quantiles: probs
            .iter()
            .map(|&p| Ok(Quantile { p, x: pred.quantile(p)? }))
            .collect::<gpbayes::Result<_>>()?,
        density: at
            .iter()
            .map(|&x| DensityPoint {
                x,
                pdf: pred.pdf(x),
                cdf: pred.cdf(x),
            })
            .collect(),
    })
}

fn predict(args: PredictArgs) -> Result<()> {
    let doc = PosteriorDocument::load(&args.state)?;
    let mode = match args.mode {
        Mode::Numeric => JointPredictiveMode::Numeric,
        Mode::Plateau => JointPredictiveMode::Plateau,
    };
    let pred = doc.posterior.predictive_with(mode)?;
    let report = predict_report(&pred, &args.quantiles, &args.at)?;
    emit(args.out.as_deref(), &(serde_json::to_string_pretty(&report)? + "\n"))
}

/// Rounds to 12 significant digits for display.
fn display(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    rounded.to_string()
}

fn opt(x: Option<f64>) -> String {
    x.map_or("none".into(), display)
}

pub fn support_text(r: &SupportReport) -> String {
    format!(
        "family: {}\ncase: {}\nposterior bound: {}\npredictive bound: {}\npredictive support: [{}, {}]\nn effective: {}\n",
        r.family,
        r.case,
        opt(r.posterior_bound),
        opt(r.predictive_bound),
        r.predictive_lower.map_or("-inf".into(), display),
        r.predictive_upper.map_or("inf".into(), display),
        opt(r.n_effective),
    )
}

fn support(args: StateArgs) -> Result<()> {
    let doc = PosteriorDocument::load(&args.state)?;
    let report = pipeline::support(&doc.posterior)?;
    if args.json {
        emit(None, &(serde_json::to_string_pretty(&report)? + "\n"))
    } else {
        emit(None, &support_text(&report))
    }
}

fn validate(args: ValidateArgs) -> Result<()> {
    let doc = PosteriorDocument::load(&args.state)?;
    let holdout = ingest(&args.holdout, args.format, args.column.as_deref())?;
    let pred = pipeline::predict(&doc.posterior)?;
    let score = pipeline::holdout_log_predictive(&pred, &holdout);
    let mut text = format!("holdout log predictive: {score}\nholdout size: {}\n", holdout.len());
    if score == f64::NEG_INFINITY {
        text.push_str("model rejected by holdout\n");
    }
    emit(None, &text)
}

fn pot(args: PotArgs) -> Result<()> {
    let data = read_data(&args.data)?;
    let model = args.model.description()?;
    let view = match args.view {
        View::Raw => DataView::Raw,
        View::Excess => DataView::Excess,
    };
    let fitted = pipeline::pot(&data, args.k, view, &model.spec()?)?;
    let mut doc = PosteriorDocument::new(model, fitted.posterior, fitted.stats);
    doc.pot = Some(PotRecord {
        theta: fitted.theta,
        k: fitted.k,
        view,
    });
    save(&doc, args.out.as_deref())?;
    if args.out.is_some() {
        let report = pipeline::support(&doc.posterior)?;
        eprint!(
            "threshold: {}\nexceedances: {}\n{}",
            display(fitted.theta),
            doc.stats.n,
            support_text(&report)
        );
    }
    Ok(())
}

/// Builds a distribution from its name and exactly its parameters.
pub fn subclass(name: &str, params: &Params) -> Result<SubclassParams> {
    let want = |keys: &[&str]| -> Result<Vec<f64>> {
        let mut got: Vec<&str> = params.keys().map(String::as_str).collect();
        got.sort_unstable();
        let mut need = keys.to_vec();
        need.sort_unstable();
        if got != need {
            return Err(usage(format!("{name} takes parameters [{}]", keys.join(", "))));
        }
        Ok(keys.iter().map(|k| params[*k]).collect())
    };
    Ok(match name {
        "pareto" => {
            let v = want(&["alpha", "l"])?;
            SubclassParams::Pareto(Pareto::new(v[0], v[1])?)
        }
        "lomax" => {
            let v = want(&["alpha", "l"])?;
            SubclassParams::Lomax(Lomax::new(v[0], v[1])?)
        }
        "shifted_exp" => {
            let v = want(&["alpha", "l"])?;
            SubclassParams::ShiftedExp(ShiftedExp::new(v[0], v[1])?)
        }
        "power" => {
            let v = want(&["u", "alpha"])?;
            SubclassParams::Power(Power::new(v[0], v[1])?)
        }
        "inverted_pareto" => {
            let v = want(&["alpha", "l"])?;
            SubclassParams::InvertedPareto(Pareto::new(v[0], v[1])?)
        }
        "log_power" => {
            let v = want(&["a", "b"])?;
            SubclassParams::LogPower(LogPower::new(v[0], v[1])?)
        }
        "uniform" => {
            let v = want(&["l", "u"])?;
            SubclassParams::Uniform(Uniform::new(v[0], v[1])?)
        }
        "gamma" => {
            let v = want(&["shape", "rate"])?;
            SubclassParams::Gamma(Gamma::new(v[0], v[1])?)
        }
        _ => return Err(usage(format!("unknown distribution {name:?}"))),
    })
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let dist = subclass(&args.dist, &parse_params(&args.params)?)?;
    let mut text = String::from("x\n");
    for x in dist.sample_n(args.n, args.seed) {
        text.push_str(&format!("{x}\n"));
    }
    emit(args.out.as_deref(), &text)
}

pub fn diagnostic_csv(rows: &[oracle::DiagnosticRow]) -> String {
    let mut text = String::from("case,tv_distance,max_cdf_gap\n");
    for r in rows {
        text.push_str(&format!("{},{:e},{:e}\n", r.case, r.tv_distance, r.max_cdf_gap));
    }
    text
}

fn verify(args: VerifyArgs) -> Result<()> {
    let rows = oracle::diagnostic_table(args.cells)?;
    emit(args.out.as_deref(), &diagnostic_csv(&rows))?;
    eprint!("{}", oracle::formula_notes()?);
    Ok(())
}

/// One plotted curve: label, distribution, x range.
type Curve = (String, Box<dyn ContinuousDist>, (f64, f64));

fn curves(figure: Figure) -> Result<Vec<Curve>> {
    const SHAPES: [f64; 4] = [0.5, 1.0, 2.0, 4.0];
    let mut out: Vec<Curve> = Vec::new();
    match figure {
        Figure::Gp => {
            for xi in [-1.0, -0.5, 0.0, 0.5, 1.0] {
                out.push((format!("xi={xi}"), Box::new(GpParams::new(0.0, 1.0, xi)?), (0.0, 5.0)));
            }
        }
        Figure::Pareto => {
            for a in SHAPES {
                out.push((format!("alpha={a}"), Box::new(Pareto::new(a, 1.0)?), (1.0, 5.0)));
            }
        }
        Figure::Exp => {
            for a in SHAPES {
                out.push((format!("alpha={a}"), Box::new(ShiftedExp::new(a, 1.0)?), (1.0, 5.0)));
            }
        }
        Figure::Power => {
            for a in SHAPES {
                out.push((format!("alpha={a}"), Box::new(Power::new(3.0, a)?), (0.0, 3.0)));
            }
        }
    }
    Ok(out)
}

pub fn plot_csv(figure: Figure, points: usize) -> Result<String> {
    if points < 2 {
        return Err(usage("--points must be at least 2"));
    }
    let mut text = String::from("x,pdf,label\n");
    for (label, dist, (lo, hi)) in curves(figure)? {
        for i in 0..points {
            let x = lo + (hi - lo) * i as f64 / (points - 1) as f64;
            text.push_str(&format!("{x},{},{label}\n", dist.pdf(x)));
        }
    }
    Ok(text)
}

fn plotdata(args: PlotArgs) -> Result<()> {
    emit(args.out.as_deref(), &plot_csv(args.figure, args.points)?)
}
