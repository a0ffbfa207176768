use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use mdelab::measures::{fmt_f64, measure_from_csv, measure_from_json, measure_to_json};
use mdelab::metrics::wasserstein1_1d;
use mdelab::mvf::{certify_sweep, SweepConfig};
use mdelab::scheme::{convergence_study, solve_with, SolveOptions};
use mdelab::verify::{check_trajectory_bounds, continuity_experiment, residual_study, Bump, TestFunction};
use mdelab::{flat_distance, DiscreteMeasure, Execution, Scenario};

use crate::config::RunConfig;
use crate::output::OutDir;
use crate::{MetricKind, MetricsArgs, RunArgs};

/// Assertion results of one subcommand.
#[derive(Debug, Default)]
pub struct Outcome {
    pub failures: Vec<String>,
    pub witness: Option<PathBuf>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

struct Run {
    cfg: RunConfig,
    scenario: Scenario,
    out: OutDir,
    exec: Execution,
    /// `--n-list` given on the command line
    n_list_flag: bool,
}

impl Run {
    fn setup(a: &RunArgs) -> Result<Run> {
        let mut cfg = match &a.config {
            Some(path) => RunConfig::load(path)?,
            None => match &a.preset {
                Some(name) => RunConfig::from_preset(name),
                None => bail!("nothing to run: pass --config PATH or --preset NAME"),
            },
        };
        if let Some(name) = &a.preset {
            cfg.preset = Some(name.clone());
            cfg.scenario = None;
        }
        if let Some(seed) = a.seed {
            cfg.numerics.seed = seed;
        }
        if let Some(n) = a.n {
            cfg.numerics.n = n;
        }
        if let Some(list) = &a.n_list {
            cfg.numerics.n_list = list.clone();
        }
        if let Some(samples) = a.samples {
            cfg.numerics.samples = samples;
        }
        cfg.numerics.sequential |= a.sequential;
        if let Some(dir) = &a.out {
            cfg.outputs.dir = dir.clone();
        }
        cfg.validate()?;
        let scenario = cfg.scenario().context("building the scenario")?;
        let out = OutDir::create(&cfg.outputs.dir)?;
        out.write("config.toml", &cfg.to_toml()?)?;
        let exec = if cfg.numerics.sequential { Execution::Sequential } else { Execution::Parallel };
        Ok(Run { cfg, scenario, out, exec, n_list_flag: a.n_list.is_some() })
    }

    /// `N` and `2N`, or the explicit `--n-list`.
    fn pair_list(&self) -> Vec<u32> {
        if self.n_list_flag {
            self.cfg.numerics.n_list.clone()
        } else {
            let n = self.cfg.numerics.n;
            vec![n, 2 * n]
        }
    }

    fn fail(&self, outcome: &mut Outcome, witness: &str, contents: &str) -> Result<()> {
        outcome.witness = Some(self.out.write(witness, contents)?);
        Ok(())
    }
}

pub fn solve(a: &RunArgs) -> Result<Outcome> {
    let run = Run::setup(a)?;
    let s = &run.scenario;
    let n = run.cfg.numerics.n;
    let opts = SolveOptions { intermediate_samples: run.cfg.numerics.intermediate_samples };
    let traj = solve_with(s, n, opts)?;
    if run.cfg.outputs.trajectory {
        run.out.write("trajectory.csv", &traj.to_csv())?;
    }
    if run.cfg.outputs.diagnostics {
        run.out.write("diagnostics.csv", &traj.diagnostics_csv())?;
    }
    let bounds = check_trajectory_bounds(s, &traj);
    let last = traj.diagnostics.last().expect("at least the initial state");
    println!(
        "solve {} N={n}: {} steps, final mass {}, {} atoms",
        s.name,
        traj.mesh.num_intervals(),
        last.mass,
        last.atom_count
    );
    println!("  support radius {} (bound {})", bounds.max_support_radius, bounds.support_bound);
    println!("  speed {} (bound {})", bounds.max_speed, bounds.velocity_bound);
    println!("  growth |c| {} (bound {})", bounds.max_growth, bounds.growth_bound);

    let mut outcome = Outcome { failures: bounds.violations.clone(), witness: None };
    if !outcome.passed() {
        run.fail(&mut outcome, "bounds_violations.txt", &(bounds.violations.join("\n") + "\n"))?;
    }
    Ok(outcome)
}

pub fn converge(a: &RunArgs) -> Result<Outcome> {
    let run = Run::setup(a)?;
    let s = &run.scenario;
    let list = match a.n {
        Some(n) => vec![n, 2 * n, 4 * n],
        None => run.cfg.numerics.n_list.clone(),
    };
    if list.len() < 2 {
        bail!("converge needs at least two values of N, got {list:?}");
    }
    let probes = if run.cfg.numerics.probes.is_empty() { vec![s.horizon] } else { run.cfg.numerics.probes.clone() };
    let table = convergence_study(s, &list, &probes, run.exec)?;
    run.out.write("convergence.csv", &table.to_csv())?;
    println!("converge {} N={list:?}", s.name);
    for r in &table.rows {
        let order = r.order.map(|o| format!("{o:.3}")).unwrap_or_else(|| "-".into());
        println!("  t={} N={}->{} distance {:e} order {order}", r.t, r.n, r.n_next, r.distance);
    }

    let mut outcome = Outcome::default();
    if let Some([lo, hi]) = run.cfg.converge.order_band {
        let mut witness = String::from("n,n_next,t,distance,order\n");
        for r in &table.rows {
            if let Some(o) = r.order.filter(|o| !(lo..=hi).contains(o)) {
                outcome
                    .failures
                    .push(format!("order {o} outside [{lo}, {hi}] for N={}->{} at t={}", r.n, r.n_next, r.t));
                witness.push_str(&format!(
                    "{},{},{},{},{}\n",
                    r.n,
                    r.n_next,
                    fmt_f64(r.t),
                    fmt_f64(r.distance),
                    fmt_f64(o)
                ));
            }
        }
        if !outcome.passed() {
            run.fail(&mut outcome, "convergence_violations.csv", &witness)?;
        }
    }
    Ok(outcome)
}

pub fn continuity(a: &RunArgs) -> Result<Outcome> {
    let run = Run::setup(a)?;
    let s = &run.scenario;
    let nu0 = run.cfg.continuity_nu0(s)?;
    let list = run.pair_list();
    let mut reports = Vec::new();
    for &n in &list {
        let r = continuity_experiment(s, &s.mu0, &nu0, n, &run.cfg.numerics.probes, run.exec)?;
        run.out.write(&format!("continuity_N{n}.csv"), &r.to_csv())?;
        println!(
            "continuity {} N={n}: initial distance {}, max ratio {}, fitted C {}",
            s.name,
            r.initial_distance,
            r.max_ratio(),
            r.c_hat
        );
        reports.push(r);
    }

    let mut outcome = Outcome::default();
    let mut witness = String::from("n_fit,n_check,c_hat,excess\n");
    let max_excess = run.cfg.continuity.max_excess;
    for pair in reports.windows(2) {
        let excess = pair[1].excess_over(pair[0].c_hat);
        println!("  N={} exceeds e^(C t) fitted at N={} by {:.3}%", pair[1].n, pair[0].n, 100.0 * excess.max(0.0));
        if excess > max_excess {
            outcome.failures.push(format!(
                "ratio at N={} exceeds the bound fitted at N={} by {excess} > {max_excess}",
                pair[1].n, pair[0].n
            ));
            witness.push_str(&format!("{},{},{},{}\n", pair[0].n, pair[1].n, fmt_f64(pair[0].c_hat), fmt_f64(excess)));
        }
    }
    if !outcome.passed() {
        run.fail(&mut outcome, "continuity_violations.csv", &witness)?;
    }
    Ok(outcome)
}

pub fn residual(a: &RunArgs) -> Result<Outcome> {
    let run = Run::setup(a)?;
    let s = &run.scenario;
    let rc = &run.cfg.residual;
    let mut f = Bump::for_scenario(s);
    if let Some(c) = &rc.center {
        if c.len() != s.dim() {
            bail!("residual.center has {} coordinates, the scenario has dimension {}", c.len(), s.dim());
        }
        f = Bump::new(c.clone(), f.rho);
    }
    if let Some(r) = rc.radius {
        f = Bump::new(f.center.clone(), r);
    }
    let t = rc.t.unwrap_or(s.horizon);
    let list = run.pair_list();
    let table = residual_study(s, &list, &f, t, run.exec)?;
    run.out.write("residual.csv", &table.to_csv())?;
    println!("residual {} t={t} ({}, support radius {})", s.name, f.name(), f.radius());
    for r in &table.reports {
        println!("  N={} residual {:e}", r.n, r.residual);
    }

    let [lo, hi] = rc.ratio_band;
    let mut outcome = Outcome::default();
    let mut witness = String::from("n,n_next,residual,residual_next,ratio\n");
    for (pair, ratio) in table.reports.windows(2).zip(table.ratios()) {
        println!("  ratio N={}->{}: {ratio:.4}", pair[0].n, pair[1].n);
        if !(lo..=hi).contains(&ratio) {
            outcome
                .failures
                .push(format!("residual ratio {ratio} outside [{lo}, {hi}] for N={}->{}", pair[0].n, pair[1].n));
            witness.push_str(&format!(
                "{},{},{},{},{}\n",
                pair[0].n,
                pair[1].n,
                fmt_f64(pair[0].residual),
                fmt_f64(pair[1].residual),
                fmt_f64(ratio)
            ));
        }
    }
    if !outcome.passed() {
        run.fail(&mut outcome, "residual_violations.csv", &witness)?;
    }
    Ok(outcome)
}

pub fn certify(a: &RunArgs) -> Result<Outcome> {
    let run = Run::setup(a)?;
    let s = &run.scenario;
    let cc = &run.cfg.certify;
    let sweep_cfg = SweepConfig {
        samples: run.cfg.numerics.samples,
        seed: run.cfg.numerics.seed,
        dim: s.dim(),
        max_atoms: cc.max_atoms,
        half_width: cc.half_width,
        tau_max: cc.tau_max,
    };
    let source = (!s.source.is_zero()).then_some(s.source.as_ref());
    let report = certify_sweep(s.mvf.as_ref(), source, &sweep_cfg, run.exec)?;
    let mut summary = String::from("quantity,value\n");
    summary.push_str(&format!("samples,{}\n", report.samples));
    summary.push_str(&format!("seed,{}\n", sweep_cfg.seed));
    summary.push_str(&format!("worst_v1_ratio,{}\n", fmt_f64(report.worst_v1_ratio)));
    summary.push_str(&format!("worst_v2_ratio,{}\n", fmt_f64(report.worst_v2_ratio)));
    summary.push_str(&format!("min_v3_gap,{}\n", fmt_f64(report.min_v3_gap)));
    summary.push_str(&format!("violations,{}\n", report.violations.len()));
    println!(
        "certify {} ({}): {} samples, seed {}, worst V1 ratio {}, worst V2 ratio {}, min V3 gap {:e}",
        s.name,
        s.mvf.name(),
        report.samples,
        sweep_cfg.seed,
        report.worst_v1_ratio,
        report.worst_v2_ratio,
        report.min_v3_gap
    );

    let mut outcome = Outcome::default();
    for v in &report.violations {
        outcome.failures.push(format!("{} at sample {}: {}", v.check, v.sample, v.detail));
    }
    if !report.passed() {
        for v in &report.violations {
            let stem = format!("witness_{}_{}", v.check, v.sample);
            run.out.write(&format!("{stem}_mu.json"), &measure_to_json(&v.mu))?;
            if let Some(nu) = &v.nu {
                run.out.write(&format!("{stem}_nu.json"), &measure_to_json(nu))?;
            }
        }
    }

    if cc.trajectory {
        let n = run.cfg.numerics.n;
        let traj = solve_with(s, n, SolveOptions::default())?;
        let bounds = check_trajectory_bounds(s, &traj);
        println!(
            "  trajectory N={n}: support {} <= {}, speed {} <= {}, |c| {} <= {}",
            bounds.max_support_radius,
            bounds.support_bound,
            bounds.max_speed,
            bounds.velocity_bound,
            bounds.max_growth,
            bounds.growth_bound
        );
        summary.push_str(&format!("trajectory_bound_violations,{}\n", bounds.violations.len()));
        outcome.failures.extend(bounds.violations.iter().map(|v| format!("trajectory N={n}: {v}")));
        if !bounds.passed() {
            run.out.write("bounds_violations.txt", &(bounds.violations.join("\n") + "\n"))?;
        }
    }
    run.out.write("certify.csv", &summary)?;
    let violations = run.out.write("violations.csv", &report.violations_csv())?;
    if !outcome.passed() {
        outcome.witness = Some(violations);
    }
    Ok(outcome)
}

fn read_measure(path: &Path) -> Result<DiscreteMeasure> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let parsed = if is_json { measure_from_json(&text) } else { measure_from_csv(&text) };
    parsed.with_context(|| format!("parsing {}", path.display()))
}

pub fn metrics(a: &MetricsArgs) -> Result<Outcome> {
    let mu = read_measure(&a.first)?;
    let nu = read_measure(&a.second)?;
    let (flat, plan) = flat_distance(&mu, &nu)?;
    if let Some(path) = &a.plan {
        let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
        let name = path.file_name().context("--plan needs a file name")?;
        OutDir::create(dir)?.write(&name.to_string_lossy(), &plan.to_csv(&mu, &nu))?;
    }
    match a.metric {
        MetricKind::Flat => println!("{flat}"),
        MetricKind::W1 => println!("{}", wasserstein1_1d(&mu, &nu)?),
        MetricKind::Both => {
            let w1 = wasserstein1_1d(&mu, &nu)?;
            println!("flat {flat}");
            println!("w1 {w1}");
        }
    }
    Ok(Outcome::default())
}
