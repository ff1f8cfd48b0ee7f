//! Brute-force numerics that the closed forms are checked against: dense
//! grid posteriors built from raw likelihoods, quadrature of densities, and
//! Monte-Carlo summaries.
//!
//! Nothing here calls the conjugate update formulas. Grid likelihoods are
//! evaluated datum by datum from the densities in [`crate::distributions`].

use serde::{Deserialize, Serialize};

use crate::conjugate_exponential::{self as exponential, ExpJointPrior, ExpPriorAlpha, ExpPriorL};
use crate::conjugate_pareto::{self as pareto, ParetoJointPrior, ParetoPriorAlpha, ParetoPriorL};
use crate::conjugate_power::{self as power, PowerJointPrior, PowerPriorAlpha, PowerPriorU};
use crate::conjugate_uniform::{self as uniform, UniformJointPrior, UniformPriorL, UniformPriorW};
use crate::distributions::{
    ContinuousDist, Gamma, LogPower, Pareto, Power, ShiftedExp, SubclassParams, Uniform,
};
use crate::pipeline::ModelSpec;
use crate::error::{ensure, param, Error, Result};
use crate::quadrature::Quadrature;
use crate::suffstats::SuffStats;

/// Default number of grid cells.
pub const DEFAULT_CELLS: usize = 100_000;

/// Closed-form quantiles bounding an automatic grid window.
pub const WINDOW_TAIL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
}

/// A grid of `cells + 1` nodes on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    lo: f64,
    hi: f64,
    cells: usize,
    spacing: Spacing,
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, cells: usize, spacing: Spacing) -> Result<Self> {
        ensure(lo.is_finite() && hi.is_finite() && lo < hi, || {
            param(format!("grid needs finite lo < hi, got [{lo}, {hi}]"))
        })?;
        ensure(cells >= 100, || param(format!("grid needs at least 100 cells, got {cells}")))?;
        ensure(spacing == Spacing::Linear || lo > 0.0, || {
            param(format!("log spacing needs lo > 0, got {lo}"))
        })?;
        Ok(GridSpec { lo, hi, cells, spacing })
    }

    /// Window between the `WINDOW_TAIL` and `1 − WINDOW_TAIL` quantiles.
    pub fn around(dist: &dyn ContinuousDist, cells: usize, spacing: Spacing) -> Result<Self> {
        GridSpec::new(
            dist.inverse_cdf(WINDOW_TAIL),
            dist.inverse_cdf(1.0 - WINDOW_TAIL),
            cells,
            spacing,
        )
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn nodes(&self) -> Vec<f64> {
        let k = self.cells as f64;
        match self.spacing {
            Spacing::Linear => {
                let h = (self.hi - self.lo) / k;
                (0..=self.cells).map(|i| self.lo + h * i as f64).collect()
            }
            Spacing::Log => {
                let (a, b) = (self.lo.ln(), self.hi.ln());
                (0..=self.cells)
                    .map(|i| (a + (b - a) * i as f64 / k).exp())
                    .collect()
            }
        }
    }
}

/// A normalized discrete posterior.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPosterior {
    pub nodes: Vec<f64>,
    /// Density at each node, scaled so the trapezoid integral is one.
    pub density: Vec<f64>,
    /// Trapezoid mass of each cell; sums to one.
    pub masses: Vec<f64>,
}

impl GridPosterior {
    fn from_log_density(nodes: Vec<f64>, logs: Vec<f64>) -> Result<Self> {
        let peak = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        ensure(peak.is_finite(), || {
            Error::Coverage(format!(
                "posterior is zero on every node of [{}, {}]; the grid misses the mass",
                nodes[0],
                nodes[nodes.len() - 1]
            ))
        })?;
        let mut density: Vec<f64> = logs.iter().map(|l| (l - peak).exp()).collect();
        let mut masses = trapezoid_masses(&nodes, &density);
        let total: f64 = masses.iter().sum();
        for d in &mut density {
            *d /= total;
        }
        for m in &mut masses {
            *m /= total;
        }
        Ok(GridPosterior { nodes, density, masses })
    }
}

fn trapezoid_masses(nodes: &[f64], density: &[f64]) -> Vec<f64> {
    nodes
        .windows(2)
        .zip(density.windows(2))
        .map(|(x, d)| 0.5 * (d[0] + d[1]) * (x[1] - x[0]))
        .collect()
}

/// Posterior on a grid from a log-likelihood and a log-prior.
pub fn grid_posterior<L, P>(log_likelihood: L, log_prior: P, grid: &GridSpec) -> Result<GridPosterior>
where
    L: Fn(f64) -> f64,
    P: Fn(f64) -> f64,
{
    let nodes = grid.nodes();
    let logs = nodes.iter().map(|&t| log_likelihood(t) + log_prior(t)).collect();
    GridPosterior::from_log_density(nodes, logs)
}

/// Marginal over the first coordinate of a two-parameter posterior.
///
/// `inner` gives the grid for the second coordinate at each first-coordinate
/// node, so the caller can reparameterize it (the log-joint must then include
/// the Jacobian).
pub fn grid_marginal<J, I>(log_joint: J, outer: &GridSpec, inner: I) -> Result<GridPosterior>
where
    J: Fn(f64, f64) -> f64,
    I: Fn(f64) -> Result<GridSpec>,
{
    let nodes = outer.nodes();
    let mut rows = Vec::with_capacity(nodes.len());
    let mut peak = f64::NEG_INFINITY;
    for &t in &nodes {
        let inner_nodes = inner(t)?.nodes();
        let logs: Vec<f64> = inner_nodes.iter().map(|&s| log_joint(t, s)).collect();
        peak = logs.iter().copied().fold(peak, f64::max);
        rows.push((inner_nodes, logs));
    }
    ensure(peak.is_finite(), || {
        Error::Coverage("joint posterior is zero on the whole grid".into())
    })?;
    let logs = rows
        .into_iter()
        .map(|(xs, ls)| {
            let dens: Vec<f64> = ls.iter().map(|l| (l - peak).exp()).collect();
            trapezoid_masses(&xs, &dens).iter().sum::<f64>().ln()
        })
        .collect();
    GridPosterior::from_log_density(nodes, logs)
}

/// Distance between a closed-form posterior and a grid posterior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub tv_distance: f64,
    pub max_cdf_gap: f64,
}

fn compare_masses(closed: Vec<f64>, grid: &GridPosterior) -> Result<Comparison> {
    let total: f64 = closed.iter().sum();
    ensure(total > 1e-3 && total.is_finite(), || {
        Error::DomainMismatch(format!(
            "closed form puts mass {total:e} on the grid window; domains do not match"
        ))
    })?;
    let (mut tv, mut gap, mut cp, mut cq) = (0.0, 0.0f64, 0.0, 0.0);
    for (q, p) in closed.iter().zip(&grid.masses) {
        let q = q / total;
        tv += (p - q).abs();
        cp += p;
        cq += q;
        gap = gap.max((cp - cq).abs());
    }
    Ok(Comparison {
        tv_distance: (0.5 * tv).min(1.0),
        max_cdf_gap: gap.min(1.0),
    })
}

/// Compares cell masses `F(x_{i+1}) − F(x_i)` of the closed form, renormalized
/// to the window, with the grid's masses.
pub fn compare_posterior(closed: &dyn ContinuousDist, grid: &GridPosterior) -> Result<Comparison> {
    let cdf: Vec<f64> = grid.nodes.iter().map(|&x| closed.cdf(x)).collect();
    compare_masses(cdf.windows(2).map(|w| (w[1] - w[0]).max(0.0)).collect(), grid)
}

/// Like [`compare_posterior`] for a closed form known only by its density;
/// cell masses come from the trapezoid rule on the same nodes.
pub fn compare_density<F: Fn(f64) -> f64>(closed_pdf: F, grid: &GridPosterior) -> Result<Comparison> {
    let dens: Vec<f64> = grid.nodes.iter().map(|&x| closed_pdf(x)).collect();
    compare_masses(trapezoid_masses(&grid.nodes, &dens), grid)
}

/// Monte-Carlo summary of a distribution's sampler.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub ks_statistic: f64,
    pub sample_min: f64,
    pub sample_max: f64,
    pub sample_mean: f64,
    pub sample_sd: f64,
}

/// One-sample Kolmogorov-Smirnov statistic against `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

pub fn mc_check(dist: &dyn ContinuousDist, n_samples: usize, seed: u64) -> McReport {
    let xs = dist.sample_n(n_samples, seed);
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    McReport {
        ks_statistic: ks_statistic(&xs, |x| dist.cdf(x)),
        sample_min: xs.iter().copied().fold(f64::INFINITY, f64::min),
        sample_max: xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        sample_mean: mean,
        sample_sd: var.sqrt(),
    }
}

/// Offsets beyond which a density is not integrated numerically.
const FAR: f64 = 1e300;
const NEAR: f64 = 1e-300;

/// `∫ pdf` over the support by quadrature.
///
/// Each half of the support is integrated after substituting `x = edge ± e^v`,
/// which tames heavy tails and integrable edge singularities alike. The `v`
/// range is cut into pieces of width 2 so that kinks of the density cannot
/// hide inside one huge interval. Mass beyond `1e300` (or within `1e-300` of
/// a singular edge) cannot be reached by any `f64` density evaluation; it is
/// added from the distribution's CDF. That remainder is below `1e-7` for the
/// heaviest predictives in the crate.
pub fn total_mass(dist: &dyn ContinuousDist) -> f64 {
    let (lo, hi) = dist.support();
    let center = match (lo.is_finite(), hi.is_finite()) {
        (true, true) => 0.5 * (lo + hi),
        (true, false) => lo + 1.0,
        (false, true) => hi - 1.0,
        (false, false) => dist.inverse_cdf(0.5),
    };
    let q = Quadrature::with_tolerance(1e-15, 1e-12);
    let pieces = |f: &dyn Fn(f64) -> f64, top: f64| {
        let mut breaks = vec![NEAR.ln()];
        breaks.extend((-20..=20).map(|k| 2.0 * k as f64).filter(|&v| v > NEAR.ln() && v < top));
        breaks.push(top);
        q.integrate_pieces(|v: f64| f(v) * v.exp(), &breaks).value
    };
    let mut mass = 0.0;
    if hi.is_finite() {
        mass += pieces(&|v| dist.pdf(hi - v.exp()), (hi - center).ln());
    } else {
        mass += pieces(&|v| dist.pdf(center + v.exp()), FAR.ln());
        mass += 1.0 - dist.cdf(center + FAR);
    }
    if lo.is_finite() {
        mass += pieces(&|v| dist.pdf(lo + v.exp()), (center - lo).ln());
        mass += dist.cdf(lo + NEAR);
    } else {
        mass += pieces(&|v| dist.pdf(center - v.exp()), FAR.ln());
        mass += dist.cdf(center - FAR);
    }
    mass
}

/// One line of the diagnostic table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticRow {
    pub case: String,
    pub tv_distance: f64,
    pub max_cdf_gap: f64,
}

impl DiagnosticRow {
    fn new(case: &str, c: Comparison) -> Self {
        DiagnosticRow {
            case: case.to_string(),
            tv_distance: c.tv_distance,
            max_cdf_gap: c.max_cdf_gap,
        }
    }
}

fn log_lik<D: ContinuousDist>(data: &[f64], make: impl Fn() -> Result<D>) -> f64 {
    match make() {
        Ok(d) => data.iter().map(|&x| d.ln_pdf(x)).sum(),
        Err(_) => f64::NEG_INFINITY,
    }
}

fn ln_pdf_of<D: ContinuousDist>(d: Result<D>, x: f64) -> f64 {
    d.map_or(f64::NEG_INFINITY, |d| d.ln_pdf(x))
}

/// Fixed data sets behind the diagnostic cases.
pub mod fixtures {
    use super::*;

    /// Twenty prices with minimum 80.
    pub fn laptop_prices() -> Vec<f64> {
        let mut v: Vec<f64> = (0..19).map(|i| 85.0 + i as f64).collect();
        v.push(80.0);
        v
    }

    pub fn pareto_sample() -> Vec<f64> {
        Pareto::new(2.0, 1.0).expect("valid").sample_n(25, 7)
    }

    pub fn exp_sample() -> Vec<f64> {
        ShiftedExp::new(0.7, 0.0).expect("valid").sample_n(20, 11)
    }

    pub fn power_sample() -> Vec<f64> {
        Power::new(3.0, 1.5).expect("valid").sample_n(15, 13)
    }

    pub fn unit_power_sample() -> Vec<f64> {
        Power::new(1.0, 2.5).expect("valid").sample_n(20, 17)
    }

    pub fn uniform_sample() -> Vec<f64> {
        Uniform::new(1.0, 11.0).expect("valid").sample_n(12, 19)
    }

    /// A model with a proper prior and a data-generating distribution whose
    /// draws are always compatible with it.
    #[derive(Debug, Clone, Copy, PartialEq)]
    pub struct ModelCase {
        pub name: &'static str,
        pub spec: ModelSpec,
        pub truth: SubclassParams,
    }

    impl ModelCase {
        pub fn data(&self, n: usize, seed: u64) -> Vec<f64> {
            self.truth.sample_n(n, seed)
        }
    }

    /// One case per family and case, twelve in all.
    pub fn model_cases() -> Vec<ModelCase> {
        use std::f64::consts::E;
        let ok = |r: Result<ModelSpec>| r.expect("fixture priors are valid");
        let d = |r: Result<SubclassParams>| r.expect("fixture truths are valid");
        vec![
            ModelCase {
                name: "pareto/location",
                spec: ok(ParetoPriorL::new(100.0, 1.0, 1.2).map(ModelSpec::ParetoLocation)),
                truth: d(Pareto::new(1.2, 5.0).map(SubclassParams::Pareto)),
            },
            ModelCase {
                name: "pareto/shape",
                spec: ok(ParetoPriorAlpha::new(0.5f64.exp(), 2.0, 1.0).map(ModelSpec::ParetoShape)),
                truth: d(Pareto::new(2.0, 1.0).map(SubclassParams::Pareto)),
            },
            ModelCase {
                name: "pareto/joint",
                spec: ok(ParetoJointPrior::new(10.0, 1.0, E, 1.0).map(ModelSpec::ParetoJoint)),
                truth: d(Pareto::new(1.5, 2.0).map(SubclassParams::Pareto)),
            },
            ModelCase {
                name: "shifted_exp/location",
                spec: ok(ExpPriorL::new(0.5, 2.0, 1.3).map(ModelSpec::ExpLocation)),
                truth: d(ShiftedExp::new(1.3, 1.0).map(SubclassParams::ShiftedExp)),
            },
            ModelCase {
                name: "shifted_exp/shape",
                spec: ok(ExpPriorAlpha::new(2.0, 1.0, 0.0).map(ModelSpec::ExpShape)),
                truth: d(ShiftedExp::new(0.7, 0.0).map(SubclassParams::ShiftedExp)),
            },
            ModelCase {
                name: "shifted_exp/joint",
                spec: ok(ExpJointPrior::new(0.5, 1.0, 2.0, 1.0).map(ModelSpec::ExpJoint)),
                truth: d(ShiftedExp::new(1.0, 1.0).map(SubclassParams::ShiftedExp)),
            },
            ModelCase {
                name: "power/location",
                spec: ok(PowerPriorU::new(2.0, 1.0, 1.5).map(ModelSpec::PowerLocation)),
                truth: d(Power::new(3.0, 1.5).map(SubclassParams::Power)),
            },
            ModelCase {
                name: "power/shape",
                spec: ok(PowerPriorAlpha::new(0.5, 1.0, 1.0).map(ModelSpec::PowerShape)),
                truth: d(Power::new(1.0, 2.5).map(SubclassParams::Power)),
            },
            ModelCase {
                name: "power/joint",
                spec: ok(PowerJointPrior::new(1.0, 1.0, 0.5, 1.0).map(ModelSpec::PowerJoint)),
                truth: d(Power::new(1.0, 2.0).map(SubclassParams::Power)),
            },
            ModelCase {
                name: "uniform/width",
                spec: ok(UniformPriorW::new(5.0, 1.0, 1.0).map(ModelSpec::UniformWidth)),
                truth: d(Uniform::new(1.0, 11.0).map(SubclassParams::Uniform)),
            },
            ModelCase {
                name: "uniform/lower",
                spec: ok(UniformPriorL::new(4.0, 6.0, 10.0).map(ModelSpec::UniformLower)),
                truth: d(Uniform::new(-1.0, 9.0).map(SubclassParams::Uniform)),
            },
            ModelCase {
                name: "uniform/joint",
                spec: ok(UniformJointPrior::new(2.0, 1.0, 4.0, 6.0).map(ModelSpec::UniformJoint)),
                truth: d(Uniform::new(2.0, 9.0).map(SubclassParams::Uniform)),
            },
        ]
    }
}

/// A single-parameter case: closed form against a grid posterior.
fn single_case<L, P>(
    closed: &dyn ContinuousDist,
    spacing: Spacing,
    cells: usize,
    log_likelihood: L,
    log_prior: P,
) -> Result<Comparison>
where
    L: Fn(f64) -> f64,
    P: Fn(f64) -> f64,
{
    let grid = GridSpec::around(closed, cells, spacing)?;
    let post = grid_posterior(log_likelihood, log_prior, &grid)?;
    compare_posterior(closed, &post)
}

/// The eight single-parameter cases at `cells` grid cells each.
pub fn single_parameter_table(cells: usize) -> Result<Vec<DiagnosticRow>> {
    let mut rows = Vec::with_capacity(8);

    let data = fixtures::laptop_prices();
    let prior = ParetoPriorL::new(100.0, 1.0, 1.2)?;
    let closed = pareto::posterior_l(&prior, &SuffStats::from_data(&data))?.distribution()?;
    let c = single_case(
        &closed,
        Spacing::Linear,
        cells,
        |l| log_lik(&data, || Pareto::new(1.2, l)),
        |l| ln_pdf_of(Power::new(100.0, 1.2), l),
    )?;
    rows.push(DiagnosticRow::new("pareto_location", c));

    let data = fixtures::pareto_sample();
    let prior = ParetoPriorAlpha::new(0.5f64.exp(), 2.0, 1.0)?;
    let closed = pareto::posterior_alpha(&prior, &SuffStats::from_data(&data))?
        .gamma
        .distribution()?;
    let c = single_case(
        &closed,
        Spacing::Log,
        cells,
        |a| log_lik(&data, || Pareto::new(a, 1.0)),
        |a| ln_pdf_of(Gamma::new(2.0, 1.0), a),
    )?;
    rows.push(DiagnosticRow::new("pareto_shape", c));

    let data = [1.0, 2.0, 1.4, 3.1];
    let prior = ExpPriorL::new(0.5, 2.0, 1.3)?;
    let closed = exponential::posterior_l(&prior, &SuffStats::from_data(&data))?.distribution()?;
    let c = single_case(
        &closed,
        Spacing::Linear,
        cells,
        |l| log_lik(&data, || ShiftedExp::new(1.3, l)),
        |l| ln_pdf_of(LogPower::new(0.5, 1.3 * 2.0), l),
    )?;
    rows.push(DiagnosticRow::new("exponential_location", c));

    let data = fixtures::exp_sample();
    let prior = ExpPriorAlpha::new(2.0, 1.0, 0.0)?;
    let closed = exponential::posterior_alpha(&prior, &SuffStats::from_data(&data))?
        .gamma
        .distribution()?;
    let c = single_case(
        &closed,
        Spacing::Log,
        cells,
        |a| log_lik(&data, || ShiftedExp::new(a, 0.0)),
        |a| ln_pdf_of(Gamma::new(1.0, 2.0), a),
    )?;
    rows.push(DiagnosticRow::new("exponential_rate", c));

    let data = fixtures::power_sample();
    let prior = PowerPriorU::new(2.0, 1.0, 1.5)?;
    let closed = power::posterior_u(&prior, &SuffStats::from_data(&data))?.distribution()?;
    let c = single_case(
        &closed,
        Spacing::Log,
        cells,
        |u| log_lik(&data, || Power::new(u, 1.5)),
        |u| ln_pdf_of(Pareto::new(1.5, 2.0), u),
    )?;
    rows.push(DiagnosticRow::new("power_bound", c));

    let data = fixtures::unit_power_sample();
    let prior = PowerPriorAlpha::new(0.5, 1.0, 1.0)?;
    let closed = power::posterior_alpha(&prior, &SuffStats::from_data(&data))?
        .gamma
        .distribution()?;
    let c = single_case(
        &closed,
        Spacing::Log,
        cells,
        |a| log_lik(&data, || Power::new(1.0, a)),
        |a| ln_pdf_of(Gamma::new(1.0, 2f64.ln()), a),
    )?;
    rows.push(DiagnosticRow::new("power_shape", c));

    let data = fixtures::uniform_sample();
    let prior = UniformPriorW::new(5.0, 1.0, 1.0)?;
    let closed = uniform::posterior_w(&prior, &SuffStats::from_data(&data))?.distribution()?;
    let c = single_case(
        &closed,
        Spacing::Log,
        cells,
        |w| log_lik(&data, || Uniform::new(1.0, 1.0 + w)),
        |w| ln_pdf_of(Pareto::new(1.0, 5.0), w),
    )?;
    rows.push(DiagnosticRow::new("uniform_width", c));

    let data = [3.5, 7.2, 5.0];
    let prior = UniformPriorL::new(4.0, 6.0, 10.0)?;
    let closed = uniform::posterior_l(&prior, &SuffStats::from_data(&data))?.distribution()?;
    let c = single_case(
        &closed,
        Spacing::Linear,
        cells,
        |l| log_lik(&data, || Uniform::new(l, l + 10.0)),
        |l| ln_pdf_of(Uniform::new(6.0 - 10.0, 4.0), l),
    )?;
    rows.push(DiagnosticRow::new("uniform_lower", c));

    Ok(rows)
}

/// Grid size of the joint diagnostics, per axis.
pub const JOINT_CELLS: usize = 400;

/// Window for a shape marginal: the closed-form quantile window widened so
/// the true marginal, which may sit elsewhere, is still covered.
fn shape_window(closed: &Gamma) -> Result<GridSpec> {
    GridSpec::new(
        closed.inverse_cdf(WINDOW_TAIL) / 5.0,
        closed.inverse_cdf(1.0 - WINDOW_TAIL) * 3.0,
        JOINT_CELLS,
        Spacing::Log,
    )
}

/// Log-spaced grid for the exponentially decaying offset `s` of a bound from
/// its data-implied edge, at decay rate `rate`. Capped at 700 so that
/// `e^{±s}` stays a normal float; the mass cut off only matters at shape
/// values far below the posterior bulk.
fn offset_window(rate: f64) -> Result<GridSpec> {
    let hi = (50.0 / rate).min(700.0);
    GridSpec::new((1e-9 / rate).min(hi * 1e-9), hi, JOINT_CELLS, Spacing::Log)
}

/// Grid marginal of the shape (or width) against the product-form posterior,
/// for each of the four two-parameter models.
pub fn joint_table() -> Result<Vec<DiagnosticRow>> {
    let mut rows = Vec::with_capacity(4);

    // Pareto: l = l_n·e^{−s}.
    let data = [2.0, 2.0 * std::f64::consts::E, 2.0 * std::f64::consts::E.powi(2)];
    let prior = ParetoJointPrior::new(10.0, 1.0, std::f64::consts::E, 1.0)?;
    let post = pareto::posterior_joint(&prior, &SuffStats::from_data(&data))?;
    let closed = post.gamma.distribution()?;
    let l_n = post.l_n;
    let n_eff = post.n_eff;
    let marginal = grid_marginal(
        |a, s| {
            let l = l_n * (-s).exp();
            log_lik(&data, || Pareto::new(a, l))
                + ln_pdf_of(Power::new(10.0, a * 1.0), l)
                + ln_pdf_of(Gamma::new(1.0, 1.0), a)
                + l.ln()
        },
        &shape_window(&closed)?,
        |a| offset_window(a * n_eff),
    )?;
    rows.push(DiagnosticRow::new(
        "pareto_joint",
        compare_posterior(&closed, &marginal)?,
    ));

    // Shifted exponential: l = l_n − s.
    let data = [1.0, 2.0];
    let prior = ExpJointPrior::new(0.5, 1.0, 2.0, 1.0)?;
    let post = exponential::posterior_joint(&prior, &SuffStats::from_data(&data))?;
    let closed = post.gamma.distribution()?;
    let (l_n, n_eff) = (post.l_n, post.n_eff);
    let marginal = grid_marginal(
        |a, s| {
            let l = l_n - s;
            log_lik(&data, || ShiftedExp::new(a, l))
                + ln_pdf_of(LogPower::new(0.5, a * 1.0), l)
                + ln_pdf_of(Gamma::new(1.0, 2.0), a)
        },
        &shape_window(&closed)?,
        |a| offset_window(a * n_eff),
    )?;
    rows.push(DiagnosticRow::new(
        "exponential_joint",
        compare_posterior(&closed, &marginal)?,
    ));

    // Power: u = u_n·e^{s}.
    let data = [0.5, 0.25];
    let prior = PowerJointPrior::new(1.0, 1.0, 0.5, 1.0)?;
    let post = power::posterior_joint(&prior, &SuffStats::from_data(&data))?;
    let closed = post.gamma.distribution()?;
    let (u_n, n_eff) = (post.u_n, post.n_eff);
    let marginal = grid_marginal(
        |a, s| {
            let u = u_n * s.exp();
            log_lik(&data, || Power::new(u, a))
                + ln_pdf_of(Pareto::new(a * 1.0, 1.0), u)
                + ln_pdf_of(Gamma::new(1.0, 2f64.ln()), a)
                + u.ln()
        },
        &shape_window(&closed)?,
        |a| offset_window(a * n_eff),
    )?;
    rows.push(DiagnosticRow::new(
        "power_joint",
        compare_posterior(&closed, &marginal)?,
    ));

    // Uniform: l = l_n − f·(w − w_n) with f in (0, 1).
    let data = [3.0, 5.0, 8.0, 7.2];
    let (w0, n0, l0, u0) = (3.0, 1.0, 4.0, 6.0);
    let prior = UniformJointPrior::new(w0, n0, l0, u0)?;
    let post = uniform::posterior_joint(&prior, &SuffStats::from_data(&data))?;
    let (l_n, w_n) = (post.l_n, post.w_n);
    let outer = GridSpec::new(w_n * (1.0 + 1e-9), w_n * 60.0, JOINT_CELLS, Spacing::Log)?;
    let inner = GridSpec::new(1e-12, 1.0 - 1e-12, JOINT_CELLS, Spacing::Linear)?;
    let marginal = grid_marginal(
        |w, f| {
            let l = l_n - f * (w - w_n);
            log_lik(&data, || Uniform::new(l, l + w))
                + ln_pdf_of(Uniform::new(u0 - w, l0), l)
                + ln_pdf_of(Pareto::new(n0, w0), w)
                + (w - w_n).ln()
        },
        &outer,
        |_| Ok(inner),
    )?;
    rows.push(DiagnosticRow::new(
        "uniform_joint",
        compare_density(|w| post.width_pdf(w), &marginal)?,
    ));

    Ok(rows)
}

/// Side-by-side values for the two closed forms that are evaluated but not
/// used: the uniform-lower middle branch and the incomplete-beta `C(N)`.
pub fn formula_notes() -> Result<String> {
    let post = uniform::posterior_l(&UniformPriorL::new(2.0, 8.0, 10.0)?, &SuffStats::from_data(&[3.0, 7.0]))?;
    let mid = post.middle_branch();
    let ev = uniform::evidence_c(2.0, 0.5, 1.0)?;
    let closed = ev.closed_form.map_or_else(|| ev.closed_form_error.clone().unwrap_or_default(), |c| c.to_string());
    Ok(format!(
        "uniform lower middle branch (l_n=2, u_n=8, w=10): used {} alternative {}\n\
         uniform joint C(N) (N=2, w0=0.5, w_n=1): quadrature {} incomplete-beta form {}\n",
        mid.used, mid.alternative, ev.value, closed
    ))
}

/// Single-parameter rows followed by the joint rows.
pub fn diagnostic_table(cells: usize) -> Result<Vec<DiagnosticRow>> {
    let mut rows = single_parameter_table(cells)?;
    rows.extend(joint_table()?);
    Ok(rows)
}
