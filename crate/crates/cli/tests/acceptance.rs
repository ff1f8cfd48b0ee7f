//! Acceptance criteria, one line of output each.
//!
//! Runs without the libtest harness so the PASS/FAIL lines always reach the
//! terminal; the process fails if any criterion fails.

use gpbayes_cli::document::PosteriorDocument;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, Output};
use std::time::Instant;

use gpbayes::conjugate_pareto::{self as pareto, ParetoPriorL};
use gpbayes::conjugate_power::{self as power, PowerJointPrior};
use gpbayes::conjugate_uniform::{self as uniform, UniformJointPrior, UniformPriorW};
use gpbayes::oracle::{self, fixtures::model_cases, total_mass};
use gpbayes::pipeline::{fit, predict, sequential_update, Params, Posterior};
use gpbayes::predictive::{Link, TransformedPareto, Trapezoid};
use gpbayes::quadrature::{integrate, Quadrature};
use gpbayes::special::{inc_beta_b0, upper_inc_gamma_neg, SeriesAccuracy};
use gpbayes::{
    Case, ContinuousDist, Error, Family, Gamma, GpParams, LogPower, Lomax, ModelSpec, Pareto,
    Power, Predictive, ShiftedExp, SubclassParams, SuffStats, Uniform,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! check {
    ($cond:expr, $($fmt:tt)+) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($fmt)+));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn within_time(start: Instant, limit: f64, what: &str) -> Result<f64, String> {
    let secs = start.elapsed().as_secs_f64();
    check!(secs < limit, "{what} took {secs:.2}s, limit {limit}s");
    Ok(secs)
}

fn c1_conjugacy() -> Check {
    let start = Instant::now();
    let rows = ok(oracle::single_parameter_table(oracle::DEFAULT_CELLS))?;
    check!(rows.len() == 8, "expected 8 cases, got {}", rows.len());
    let worst = rows
        .iter()
        .max_by(|a, b| a.tv_distance.total_cmp(&b.tv_distance))
        .expect("rows");
    for r in &rows {
        check!(r.tv_distance < 1e-3, "{}: TV {:e}", r.case, r.tv_distance);
    }
    let secs = within_time(start, 10.0, "8 grid cases")?;
    Ok(format!("max TV {:.2e} ({}), {secs:.2}s", worst.tv_distance, worst.case))
}

fn c2_normalization() -> Check {
    let start = Instant::now();
    let mut worst = (0.0f64, "");
    for mc in model_cases() {
        let post = ok(fit(&mc.spec, &SuffStats::from_data(&mc.data(10, 5))))?;
        let pred = ok(predict(&post))?;
        let mass = total_mass(&pred);
        check!((mass - 1.0).abs() < 1e-6, "{}: mass {mass}", mc.name);
        if (mass - 1.0).abs() >= worst.0 {
            worst = ((mass - 1.0).abs(), mc.name);
        }
    }
    let secs = within_time(start, 5.0, "12 predictive integrals")?;
    Ok(format!("12 predictives, max |mass-1| {:.1e} ({}), {secs:.2}s", worst.0, worst.1))
}

fn c3_extrapolation() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut count = 0;
    for mc in model_cases() {
        let side = match (mc.spec.family(), mc.spec.case()) {
            (Family::Pareto | Family::ShiftedExp, Case::Location | Case::Joint) => -1,
            (Family::Power, Case::Location | Case::Joint) | (Family::Uniform, Case::Width) => 1,
            _ => continue,
        };
        for _ in 0..200 {
            let n = rng.random_range(1..=60);
            let data = mc.data(n, rng.random());
            let stats = SuffStats::from_data(&data);
            let post = ok(fit(&mc.spec, &stats))?;
            let n_eff = post.n_effective().expect("bound cases carry n + n0");
            check!(n_eff / (n_eff + 1.0) < 1.0, "extrapolation ratio not below one");
            let (lo, hi) = ok(predict(&post))?.support();
            let (min, max) = (stats.min.unwrap(), stats.max.unwrap());
            if side < 0 {
                check!(lo < min, "{}: lower support {lo} !< min {min}", mc.name);
            } else {
                check!(hi > max, "{}: upper support {hi} !> max {max}", mc.name);
            }
            count += 1;
        }
    }
    Ok(format!("{count} instances over 7 cases, all strict"))
}

/// Every number of a posterior's serialized form.
fn numbers(p: &Posterior) -> Vec<f64> {
    fn walk(v: &serde_json::Value, out: &mut Vec<f64>) {
        match v {
            serde_json::Value::Number(n) => out.push(n.as_f64().unwrap()),
            serde_json::Value::Object(o) => o.values().for_each(|x| walk(x, out)),
            serde_json::Value::Array(a) => a.iter().for_each(|x| walk(x, out)),
            _ => {}
        }
    }
    let mut out = Vec::new();
    walk(&serde_json::to_value(p).unwrap(), &mut out);
    out
}

fn c4_sequential() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    let mut cases = 0;
    for mc in model_cases() {
        if mc.name == "uniform/joint" {
            let post = ok(fit(&mc.spec, &SuffStats::from_data(&mc.data(5, 1))))?;
            check!(
                matches!(sequential_update(&post, &SuffStats::default()), Err(Error::UnsupportedComposition(_))),
                "uniform joint must refuse composition"
            );
            continue;
        }
        cases += 1;
        for _ in 0..100 {
            let data = mc.data(rng.random_range(2..=80), rng.random());
            let cut = rng.random_range(0..=data.len());
            let whole = ok(fit(&mc.spec, &SuffStats::from_data(&data)))?;
            let first = ok(fit(&mc.spec, &SuffStats::from_data(&data[..cut])))?;
            let split = ok(sequential_update(&first, &SuffStats::from_data(&data[cut..])))?;
            for (a, b) in numbers(&whole).iter().zip(numbers(&split)) {
                worst = worst.max(rel(*a, b));
            }
        }
    }
    check!(worst <= 1e-12, "max relative difference {worst:e}");
    Ok(format!("{cases} composable cases x 100 splits, max rel diff {worst:.1e}"))
}

fn c5_german_tank() -> Check {
    let data: Vec<f64> = (0..100).map(|i| 1.0 + 992.0 * i as f64 / 99.0).collect();
    let stats = SuffStats::from_data(&data);
    check!(stats.n == 100 && stats.max == Some(993.0), "bad fixture");
    let post = ok(uniform::posterior_w(&ok(UniformPriorW::noninformative(1.0))?, &stats))?;
    let width = ok(post.distribution())?;
    check!(width == ok(Pareto::new(100.0, 992.0))?, "width posterior {width:?}");
    let Predictive::Uniform(pred) = ok(post.predictive())? else {
        return Err("predictive is not uniform".into());
    };
    // Independent value: the predictive is flat at E[1/w] below 993.
    let height = integrate(|w| width.pdf(w) / w, 992.0, f64::INFINITY);
    let (lo, hi) = pred.support();
    check!(lo == 1.0, "lower end {lo}");
    check!((hi - 1002.92).abs() < 1e-9, "upper end {hi}");
    check!((hi - (1.0 + 1.0 / height)).abs() < 1e-9, "quadrature oracle {}", 1.0 + 1.0 / height);
    Ok(format!("Pareto(100, 992), predictive U(1, {hi})"))
}

fn c6_laptop() -> Check {
    let mut data: Vec<f64> = (85..=103).map(f64::from).collect();
    data.push(80.0);
    let stats = SuffStats::from_data(&data);
    let post = ok(pareto::posterior_l(&ok(ParetoPriorL::new(100.0, 1.0, 1.2))?, &stats))?;
    let dist = ok(post.distribution())?;
    check!(dist.a() == 80.0 && dist.b() == 25.2, "posterior {dist:?}");
    let bound = ok(post.predictive_bound())?;
    // Reference from the closed form 80·(21/22)^{1/1.2} ...
    let formula = 80.0 * (21.0f64 / 22.0).powf(1.0 / 1.2);
    // ... and from matching the exact mixture tail at x = 100 by quadrature.
    let mix = integrate(|l| Pareto::new(1.2, l).map_or(0.0, |d| d.pdf(100.0)) * dist.pdf(l), 0.0, 80.0);
    let matched = (mix * 100f64.powf(2.2) / 1.2).powf(1.0 / 1.2);
    check!((bound - formula).abs() < 1e-3, "bound {bound} vs formula {formula}");
    check!((bound - matched).abs() < 1e-3, "bound {bound} vs tail match {matched}");
    Ok(format!(
        "Power(80, 25.2), bound {bound:.6} (formula {formula:.6}; truncated 76.957 is {:.2e} below)",
        bound - 76.957
    ))
}

fn c7_special() -> Check {
    let acc = SeriesAccuracy::default();
    let mut worst = 0.0f64;
    for i in 1..=99 {
        let x = i as f64 / 100.0 * 0.999;
        let a1 = ok(inc_beta_b0(x, 1.0, acc))?;
        let a2 = ok(inc_beta_b0(x, 2.0, acc))?;
        let e1 = -(-x).ln_1p();
        let e2 = -x - (-x).ln_1p();
        check!((a1 - e1).abs() < 1e-10, "a=1, x={x}: {a1} vs {e1}");
        check!((a2 - e2).abs() < 1e-10, "a=2, x={x}: {a2} vs {e2}");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let s = rng.random_range(-6.0..0.5);
        let y = rng.random_range(0.05..30.0);
        let lhs = ok(upper_inc_gamma_neg(s + 1.0, y))?;
        let rhs = s * ok(upper_inc_gamma_neg(s, y))? + y.powf(s) * (-y).exp();
        worst = worst.max(rel(lhs, rhs));
    }
    check!(worst < 1e-10, "recurrence relative error {worst:e}");
    Ok(format!("beta identities < 1e-10, gamma recurrence max rel {worst:.1e}"))
}

fn c8_expected_value() -> Check {
    let prior = ok(PowerJointPrior::new(1.0, 1.0, 0.5, 1.0))?;
    let post = ok(power::posterior_joint(&prior, &SuffStats::from_data(&[0.5, 0.25])))?;
    let closed = ok(post.expected_value())?;
    let pred = ok(post.predictive())?;
    let top = pred.support().1;
    // x = top·e^{−v} maps (0, top] onto [0, ∞).
    let q = Quadrature::with_tolerance(1e-15, 1e-13);
    let mean = q
        .integrate(|v: f64| {
            let x = top * (-v).exp();
            x * pred.pdf(x) * x
        }, 0.0, f64::INFINITY)
        .value;
    check!(rel(closed, mean) < 1e-6, "closed {closed} vs quadrature {mean}");
    let mc = oracle::mc_check(&pred, 1_000_000, 8);
    let se = mc.sample_sd / 1e3;
    check!((mc.sample_mean - closed).abs() < 3.0 * se, "MC mean {} vs {closed} (se {se})", mc.sample_mean);
    Ok(format!(
        "E = {closed:.8}, quadrature rel {:.1e}, MC {:.2} se",
        rel(closed, mean),
        (mc.sample_mean - closed).abs() / se
    ))
}

fn c9_consistency() -> Check {
    let start = Instant::now();
    let truth = ok(Pareto::new(1.2, 5.0))?;
    let spec = ok(ModelSpec::from_parts(
        Family::Pareto,
        Case::Location,
        None,
        &[("alpha".to_string(), 1.2)].into(),
    ))?;
    let mut range = (f64::INFINITY, f64::NEG_INFINITY);
    for seed in 0..20 {
        let post = ok(fit(&spec, &SuffStats::from_data(&truth.sample_n(10_000, seed))))?;
        let l_n = post.posterior_bound().unwrap();
        check!((5.0..=5.05).contains(&l_n), "seed {seed}: l_n = {l_n}");
        range = (range.0.min(l_n), range.1.max(l_n));
    }
    let secs = within_time(start, 5.0, "20 fits of 10^4 points")?;
    Ok(format!("l_n in [{:.5}, {:.5}], {secs:.2}s", range.0, range.1))
}

fn c10_samplers() -> Check {
    let mut dists: Vec<(String, Box<dyn ContinuousDist>)> = vec![
        ("pareto".into(), Box::new(ok(Pareto::new(1.2, 5.0))?)),
        ("lomax".into(), Box::new(ok(Lomax::new(2.0, 3.0))?)),
        ("shifted_exp".into(), Box::new(ok(ShiftedExp::new(0.7, 1.0))?)),
        ("power".into(), Box::new(ok(Power::new(3.0, 1.5))?)),
        ("inverted_pareto".into(), Box::new(SubclassParams::InvertedPareto(ok(Pareto::new(2.0, 1.0))?))),
        ("log_power".into(), Box::new(ok(LogPower::new(0.5, 3.0))?)),
        ("uniform".into(), Box::new(ok(Uniform::new(-1.0, 2.0))?)),
        ("gamma".into(), Box::new(ok(Gamma::new(0.7, 2.0))?)),
        ("gp_neg".into(), Box::new(ok(GpParams::new(0.0, 1.0, -0.5))?)),
        ("gp_zero".into(), Box::new(ok(GpParams::new(0.0, 1.0, 0.0))?)),
        ("gp_pos".into(), Box::new(ok(GpParams::new(1.0, 2.0, 0.5))?)),
        (
            "log_link".into(),
            Box::new(ok(TransformedPareto::new(3.0, 2.5, Link::Log { anchor: 2.0, offset: 3.0 }))?),
        ),
        (
            "shift_link".into(),
            Box::new(ok(TransformedPareto::new(3.0, 4.0, Link::Shift { anchor: 0.5, offset: 5.0 }))?),
        ),
        (
            "neglog_link".into(),
            Box::new(ok(TransformedPareto::new(3.0, 2.0, Link::NegLog { anchor: 1.0, offset: 2.5 }))?),
        ),
        ("trapezoid".into(), Box::new(ok(Trapezoid::new(-2.0, 1.0, 3.0, 8.0))?)),
    ];
    for mc in model_cases() {
        let post = ok(fit(&mc.spec, &SuffStats::from_data(&mc.data(10, 2))))?;
        dists.push((format!("predictive {}", mc.name), Box::new(ok(predict(&post))?)));
    }
    let mut worst = (0.0f64, String::new());
    for (i, (name, d)) in dists.iter().enumerate() {
        let report = oracle::mc_check(d.as_ref(), 10_000, 1000 + i as u64);
        let (lo, hi) = d.support();
        check!(report.sample_min >= lo && report.sample_max <= hi, "{name}: sample outside support");
        check!(report.ks_statistic < 0.02, "{name}: KS {}", report.ks_statistic);
        if report.ks_statistic > worst.0 {
            worst = (report.ks_statistic, name.clone());
        }
    }
    Ok(format!("{} samplers, max KS {:.4} ({})", dists.len(), worst.0, worst.1))
}

/// `(family, case, prior, known)` flags reproducing each fixture model.
fn cli_model(name: &str) -> (&'static str, &'static str, String, String) {
    let g0 = 0.5f64.exp();
    let e = std::f64::consts::E;
    match name {
        "pareto/location" => ("pareto", "location", "l0=100,n0=1".into(), "alpha=1.2".into()),
        "pareto/shape" => ("pareto", "shape", format!("g0={g0},n0=2"), "l=1".into()),
        "pareto/joint" => ("pareto", "joint", format!("l0=10,n0=1,g0={e},n0p=1"), String::new()),
        "shifted_exp/location" => ("shifted_exp", "location", "l0=0.5,n0=2".into(), "alpha=1.3".into()),
        "shifted_exp/shape" => ("shifted_exp", "shape", "mu0=2,n0=1".into(), "l=0".into()),
        "shifted_exp/joint" => ("shifted_exp", "joint", "l0=0.5,n0=1,mu0=2,n0p=1".into(), String::new()),
        "power/location" => ("power", "location", "u0=2,n0=1".into(), "alpha=1.5".into()),
        "power/shape" => ("power", "shape", "g0=0.5,n0=1".into(), "u=1".into()),
        "power/joint" => ("power", "joint", "u0=1,n0=1,g0=0.5,n0p=1".into(), String::new()),
        "uniform/width" => ("uniform", "width", "w0=5,n0=1".into(), "l=1".into()),
        "uniform/lower" => ("uniform", "lower", "l0=4,u0=6".into(), "w=10".into()),
        "uniform/joint" => ("uniform", "joint", "w0=2,n0=1,l0=4,u0=6".into(), String::new()),
        _ => unreachable!("unknown fixture {name}"),
    }
}

fn gpbayes(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gpbayes"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_column(path: &Path, values: &[f64]) {
    let mut text = String::from("x\n");
    for v in values {
        text.push_str(&format!("{v}\n"));
    }
    std::fs::write(path, text).unwrap();
}

fn c11_cli() -> Check {
    let dir = ok(tempfile::tempdir())?;
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let probs = [0.01, 0.1, 0.5, 0.9, 0.99];
    for mc in model_cases() {
        let data = mc.data(15, 11);
        let (family, case, prior, known) = cli_model(mc.name);
        let params = |s: &str| -> Params {
            s.split(',')
                .filter(|kv| !kv.is_empty())
                .map(|kv| {
                    let (k, v) = kv.split_once('=').unwrap();
                    (k.to_string(), v.parse().unwrap())
                })
                .collect()
        };
        let spec = ok(ModelSpec::from_parts(
            family.parse().unwrap(),
            case.parse().unwrap(),
            Some(&params(&prior)),
            &params(&known),
        ))?;
        check!(spec == mc.spec, "{}: CLI flags do not reproduce the fixture", mc.name);
        let (data_path, state) = (p("data.csv"), p("state.json"));
        write_column(Path::new(&data_path), &data);
        let mut args = vec!["fit", "--family", family, "--case", case, "--prior", &prior];
        if !known.is_empty() {
            args.extend(["--known", &known]);
        }
        args.extend(["--data", &data_path, "--out", &state]);
        let out = gpbayes(&args);
        check!(out.status.success(), "{}: fit failed: {}", mc.name, String::from_utf8_lossy(&out.stderr));

        let posterior = ok(fit(&spec, &SuffStats::from_data(&data)))?;
        let pred = ok(predict(&posterior))?;
        let quantiles = probs.map(|q| q.to_string()).join(",");
        let out = gpbayes(&["predict", "--state", &state, "--quantiles", &quantiles]);
        check!(out.status.success(), "{}: predict failed", mc.name);
        let report: serde_json::Value = ok(serde_json::from_slice(&out.stdout))?;
        for (i, q) in probs.iter().enumerate() {
            let cli = report["quantiles"][i]["x"].as_f64().unwrap();
            let local = ok(pred.quantile(*q))?;
            check!(cli.to_bits() == local.to_bits(), "{}: quantile {q}: {cli} vs {local}", mc.name);
        }
        let (lo, hi) = pred.support();
        for (j, end) in [lo, hi].iter().enumerate() {
            let cli = report["support"][j].as_f64();
            check!(
                cli.map(f64::to_bits) == end.is_finite().then_some(end.to_bits()),
                "{}: support end {j}",
                mc.name
            );
        }
        // Save/load is byte-stable.
        let first = std::fs::read_to_string(&state).unwrap();
        let doc = ok(PosteriorDocument::from_json(&first, "state"))?;
        check!(
            ok(doc.to_json())? == first,
            "{}: document is not stable",
            mc.name
        );
    }

    // Sequential fit through --state equals a one-shot fit.
    let data = model_cases()[0].data(40, 5);
    write_column(Path::new(&p("a.csv")), &data[..25]);
    write_column(Path::new(&p("b.csv")), &data[25..]);
    write_column(Path::new(&p("all.csv")), &data);
    let fit_args = ["--family", "pareto", "--case", "location", "--prior", "l0=100,n0=1", "--known", "alpha=1.2"];
    for (inp, out) in [("a.csv", "a.json"), ("all.csv", "all.json")] {
        let (inp, out) = (p(inp), p(out));
        let mut args = vec!["fit"];
        args.extend(fit_args);
        args.extend(["--data", &inp, "--out", &out]);
        check!(gpbayes(&args).status.success(), "fit {inp} failed");
    }
    check!(
        gpbayes(&["fit", "--state", &p("a.json"), "--data", &p("b.csv"), "--out", &p("ab.json")]).status.success(),
        "sequential fit failed"
    );
    let load = |f: &str| -> Posterior {
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(p(f)).unwrap()).unwrap();
        serde_json::from_value(v["posterior"].clone()).unwrap()
    };
    for (a, b) in numbers(&load("ab.json")).iter().zip(numbers(&load("all.json"))) {
        check!(rel(*a, b) <= 1e-12, "sequential {a} vs batch {b}");
    }

    // Exit-code contract.
    write_column(Path::new(&p("prices.csv")), &[85.0, 90.0, 80.0]);
    std::fs::write(p("bad.csv"), "x\n1\n2\n3\n4\n5\nabc\n").unwrap();
    write_column(Path::new(&p("big.csv")), &[5.0, 8.0]);
    write_column(Path::new(&p("far.csv")), &[1.0]);
    let good = p("prices.csv");
    let (bad, big, far) = (p("bad.csv"), p("big.csv"), p("far.csv"));
    let state = p("a.json");
    let ujoint = p("ujoint.json");
    let mut args = vec!["fit", "--family", "uniform", "--case", "joint", "--prior", "w0=2,n0=1,l0=4,u0=6"];
    args.extend(["--data", &good, "--out", &ujoint]);
    check!(gpbayes(&args).status.success(), "uniform joint fit failed");
    let stale = p("stale.json");
    std::fs::write(&stale, std::fs::read_to_string(&state).unwrap().replace("\"schema_version\": 1", "\"schema_version\": 9")).unwrap();
    let pl = ["--family", "pareto", "--case", "location"];
    type Scenario<'a> = (&'a str, Vec<&'a str>, u8, Option<&'a str>);
    let scenarios: Vec<Scenario> = vec![
        ("unknown subcommand", vec!["frobnicate"], 2, None),
        ("conflicting prior flags", [&["fit"], &pl[..], &["--prior", "l0=1,n0=1", "--noninformative", "--known", "alpha=1", "--data", &good]].concat(), 2, None),
        ("missing family", vec!["fit", "--case", "location", "--noninformative", "--data", &good], 2, None),
        ("wrong prior keys", [&["fit"], &pl[..], &["--prior", "l0=1,g0=2", "--known", "alpha=1", "--data", &good]].concat(), 2, None),
        ("simulate without seed", vec!["simulate", "--dist", "pareto", "--params", "alpha=1,l=1", "--n", "5"], 2, None),
        ("missing data file", [&["fit"], &pl[..], &["--noninformative", "--known", "alpha=1", "--data", "/nonexistent.csv"]].concat(), 3, None),
        ("non-numeric line 7", [&["fit"], &pl[..], &["--noninformative", "--known", "alpha=1", "--data", &bad]].concat(), 3, Some("line 7")),
        ("missing state file", vec!["support", "--state", "/nonexistent.json"], 3, None),
        ("schema version mismatch", vec!["predict", "--state", &stale], 3, Some("schema version")),
        ("data below known bound", vec!["fit", "--family", "pareto", "--case", "shape", "--noninformative", "--known", "l=100", "--data", &good], 3, None),
        ("uniform joint cannot compose", vec!["fit", "--state", &ujoint, "--data", &good], 3, Some("refit")),
        ("geometric mean g_n >= 1", vec!["fit", "--family", "power", "--case", "joint", "--prior", "u0=1,n0=1,g0=0.5,n0p=1", "--data", &big], 4, None),
        ("holdout outside support", vec!["validate", "--state", &state, "--holdout", &far], 0, Some("model rejected by holdout")),
    ];
    for (what, args, code, text) in &scenarios {
        let out = gpbayes(args);
        let got = out.status.code().unwrap_or(-1);
        check!(got == i32::from(*code), "{what}: exit {got}, expected {code}; stderr: {}", String::from_utf8_lossy(&out.stderr));
        if let Some(t) = text {
            let all = format!("{}{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr));
            check!(all.contains(t), "{what}: output lacks {t:?}: {all}");
        }
    }
    Ok(format!("12 models bit-identical, sequential == batch, {} exit-code scenarios", scenarios.len()))
}

fn c12_joint_diagnostics() -> Check {
    let out = gpbayes(&["verify", "--cells", "20000"]);
    check!(out.status.success(), "verify failed: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    let lines: Vec<&str> = text.lines().collect();
    check!(lines.first() == Some(&"case,tv_distance,max_cdf_gap"), "bad header");
    for case in ["pareto_joint", "exponential_joint", "power_joint", "uniform_joint"] {
        let row = lines.iter().find(|l| l.starts_with(&format!("{case},")));
        check!(row.is_some(), "missing row {case}");
        let fields: Vec<&str> = row.unwrap().split(',').collect();
        check!(fields.len() == 3 && fields[1..].iter().all(|f| f.parse::<f64>().is_ok()), "bad row {case}");
    }
    let prior = ok(UniformJointPrior::new(3.0, 1.0, 4.0, 6.0))?;
    let post = ok(uniform::posterior_joint(&prior, &SuffStats::from_data(&[3.0, 6.0, 4.5, 5.2])))?;
    check!(post.w_n == post.w0, "fixture must have w0 = w_n");
    let reference = ok(Pareto::new(post.n_eff, post.w_n))?;
    let mut worst = 0.0f64;
    for i in 1..=500 {
        let w = post.w_n * (1.0 + 0.02 * i as f64);
        let (a, b) = (post.width_pdf(w), reference.pdf(w));
        worst = worst.max((a - b).abs());
    }
    check!(worst <= 1e-10, "w0 = w_n reduction off by {worst:e}");
    Ok(format!("table with {} rows, w0 = w_n reduction max |diff| {worst:.1e}", lines.len() - 1))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("conjugacy vs grid oracle", c1_conjugacy),
        ("predictive normalization", c2_normalization),
        ("extrapolation theorems", c3_extrapolation),
        ("batch/sequential identity", c4_sequential),
        ("German tank", c5_german_tank),
        ("laptop prices", c6_laptop),
        ("special functions", c7_special),
        ("joint Power expected value", c8_expected_value),
        ("consistency at scale", c9_consistency),
        ("sampler suite", c10_samplers),
        ("CLI round trip and exit codes", c11_cli),
        ("joint-case diagnostics", c12_joint_diagnostics),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
