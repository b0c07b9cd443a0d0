//! Experiment execution: each run composes core operations, writes its
//! CSV files and `report.json` into `output_dir`, and returns the report.

use std::f64::consts::PI;
use std::path::PathBuf;

use penrose_nlw_core::diagnostics::{
    flow_bound_from, scattering_fit, time_zero_lp_power, FlowBoundConfig, ScatterFitConfig,
};
use penrose_nlw_core::dynamics::{
    energy_derivative_check, evolve, EnergyCheckOptions, FlowConfig, FlowError, Trajectory,
};
use penrose_nlw_core::ensemble::SampleMap;
use penrose_nlw_core::measures::{
    density_weight, moment_growth, rho_mass_estimate, sample_mu, tail_norms, MeasureError,
    TailConfig, TailEstimate, WeightVariant,
};
use penrose_nlw_core::penrose::{pt_initial_data, weighted_l2_norm};
use penrose_nlw_core::rng::RngStreamSpec;
use penrose_nlw_core::spectral::{
    endpoint_sum, sobolev_norm, ZonalCoeffs, ZonalTransform, BASIS_SCALE,
};
use penrose_nlw_core::stats::{binomial_half_width, median};
use penrose_nlw_core::Complex64;

use crate::config::{ConfigError, Experiment, InitialData, RunConfig};
use crate::parallel::Parallel;
use crate::report::{Report, Table};
use crate::verify::run_criterion;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    /// 1 for configuration and I/O problems, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Io(_) => 1,
            Self::Numerical(_) => 2,
        }
    }
}

impl From<FlowError> for RunError {
    fn from(e: FlowError) -> Self {
        Self::Numerical(e.to_string())
    }
}

impl From<MeasureError> for RunError {
    fn from(e: MeasureError) -> Self {
        Self::Numerical(e.to_string())
    }
}

#[derive(Debug)]
pub struct RunOutcome {
    pub report: Report,
    /// Every file written, `report.json` last.
    pub files: Vec<PathBuf>,
}

impl RunOutcome {
    /// 0 when all verdicts pass, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.report.passed() {
            0
        } else {
            3
        }
    }
}

/// Runs `cfg`; `log` receives progress lines (one per criterion for `verify`).
pub fn run(cfg: &RunConfig, log: &mut dyn FnMut(&str)) -> Result<RunOutcome, RunError> {
    cfg.validate()?;
    let exec =
        Parallel::new(cfg.workers).map_err(|e| ConfigError::new("workers", e.to_string()))?;
    let mut ctx = Context {
        cfg,
        exec,
        report: Report::new(cfg.clone()),
        files: Vec::new(),
    };
    match cfg.experiment {
        Experiment::Sample => ctx.sample("samples.csv")?,
        Experiment::Evolve => ctx.evolve()?,
        Experiment::Scatter => ctx.scatter("scatter.csv")?,
        Experiment::Measure => ctx.measure()?,
        Experiment::Verify => ctx.verify(log),
        Experiment::Ensemble => match cfg.inner {
            Experiment::Sample => ctx.sample("ensemble.csv")?,
            Experiment::Scatter => ctx.scatter("ensemble.csv")?,
            _ => ctx.flow_ensemble()?,
        },
    }
    ctx.report.write(&cfg.output_dir)?;
    ctx.files.push(cfg.output_dir.join("report.json"));
    Ok(RunOutcome {
        report: ctx.report,
        files: ctx.files,
    })
}

struct Context<'a> {
    cfg: &'a RunConfig,
    exec: Parallel,
    report: Report,
    files: Vec<PathBuf>,
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    if count == 0 {
        f64::NAN
    } else {
        sum / count as f64
    }
}

impl Context<'_> {
    fn write_table(&mut self, name: &str, table: &Table) -> Result<(), RunError> {
        let path = self.cfg.output_dir.join(name);
        table.write(&path)?;
        self.files.push(path);
        Ok(())
    }

    /// Draw `index`: μ_N scaled by `amplitude`, or zero.
    fn datum(&self, index: usize) -> ZonalCoeffs {
        match self.cfg.data {
            InitialData::Zero => ZonalCoeffs::zeros(self.cfg.modes),
            InitialData::Mu => sample_mu(
                RngStreamSpec::new(self.cfg.seed, index as u64),
                self.cfg.modes,
            )
            .coeffs
            .scaled(self.cfg.amplitude),
        }
    }

    fn sample(&mut self, file: &str) -> Result<(), RunError> {
        let cfg = self.cfg;
        let names = [
            "hs_norm",
            "re_l2_norm",
            "f0_weighted_l2_norm",
            "pt_isometry_error",
            "f0_lp_norm",
            "density_weight",
        ];
        let transform = ZonalTransform::new(cfg.grid);
        let radii = cfg.radial_grid.nodes();
        let rows: Vec<Result<Vec<f64>, RunError>> = {
            let this = &*self;
            this.exec.map_indices(cfg.samples, |i| {
                let u = this.datum(i);
                let re = u.real_part();
                let re_l2 = re.iter().map(|x| x * x).sum::<f64>().sqrt();
                let (f0, _) = pt_initial_data(&u, &radii)
                    .map_err(|e| ConfigError::new("radial_grid", e.to_string()))?;
                let weighted = weighted_l2_norm(&f0, -1.0);
                let values = transform.synthesize_real(&re);
                let lp = time_zero_lp_power(&values, BASIS_SCALE * endpoint_sum(&re), cfg.p)
                    .powf(1.0 / cfg.p);
                let weight = density_weight(&u, cfg.alpha, cfg.grid, WeightVariant::Smoothed)?;
                Ok(vec![
                    i as f64,
                    sobolev_norm(&u, cfg.sigma),
                    re_l2,
                    weighted,
                    (weighted - re_l2).abs(),
                    lp,
                    weight,
                ])
            })
        };
        let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
        let mut table = Table::new(
            std::iter::once("sample_index")
                .chain(names)
                .map(String::from)
                .collect(),
        );
        for row in &rows {
            table.push(row.clone());
        }
        self.write_table(file, &table)?;
        for (k, name) in names.iter().enumerate() {
            self.report
                .metric(format!("mean_{name}"), mean(rows.iter().map(|r| r[k + 1])));
        }
        let worst = rows.iter().map(|r| r[4]).fold(0.0, f64::max);
        self.report.metric("max_pt_isometry_error", worst);
        self.report.verdict(
            "pt_isometry",
            worst < 1e-8,
            Some(worst),
            "max |‖f0‖_(L2,-1) - ‖Re u0‖_L2| < 1e-8",
        );
        Ok(())
    }

    fn flow_config(&self) -> FlowConfig {
        let cfg = self.cfg;
        let mut flow = FlowConfig::new(cfg.alpha, cfg.modes).with_span(cfg.span.0, cfg.span.1);
        flow.grid = cfg.grid;
        flow.dt = cfg.dt;
        flow.sigma = cfg.sigma;
        flow
    }

    fn evolve(&mut self) -> Result<(), RunError> {
        let flow = self.flow_config();
        let u0 = self.datum(0);
        let traj = evolve(&u0, &flow)?;
        let energy = energy_derivative_check(&traj, &flow, &EnergyCheckOptions::default())?;
        self.write_table("trajectory.csv", &trajectory_table(&traj))?;

        let r = &mut self.report;
        r.metric("steps", traj.len() - 1);
        r.metric("dt_used", traj.dt());
        r.metric("energy_initial", energy.initial);
        r.metric("energy_final", traj.energies()[traj.len() - 1]);
        r.metric("energy_drift", energy.drift);
        r.metric("energy_rate_mismatch", energy.rate_mismatch);
        r.metric("energy_probes", energy.probes);
        r.metric("max_monotonicity_violation", energy.max_violation);
        r.metric("energy_peak_time", energy.peak_time);
        r.metric("hs_norm_initial", sobolev_norm(&u0, flow.sigma));
        r.metric(
            "hs_norm_final",
            sobolev_norm(&traj.states()[traj.len() - 1], flow.sigma),
        );
        if flow.alpha == 2.0 {
            r.verdict(
                "energy_conservation",
                energy.drift < 1e-8,
                Some(energy.drift),
                "relative drift < 1e-8",
            );
        } else {
            r.verdict(
                "energy_law",
                energy.rate_mismatch < 1e-5,
                Some(energy.rate_mismatch),
                "relative dE/dT mismatch < 1e-5",
            );
            r.verdict(
                "energy_monotone",
                energy.monotone,
                Some(energy.max_violation),
                "non-increasing on [0, π], non-decreasing on [-π, 0], slack 1e-8 E0",
            );
        }
        Ok(())
    }

    fn scatter(&mut self, file: &str) -> Result<(), RunError> {
        let cfg = self.cfg;
        let mut fit_cfg = ScatterFitConfig::new(cfg.seed, cfg.modes, cfg.alpha, cfg.p, cfg.samples);
        fit_cfg.q = cfg.q;
        fit_cfg.dt = cfg.dt;
        fit_cfg.grid = cfg.grid;
        let rep = scattering_fit(&fit_cfg, &self.exec)?;
        let mut header: Vec<String> = [
            "sample_index",
            "slope",
            "r_squared",
            "eventually_decreasing",
            "duhamel_discrepancy",
        ]
        .map(String::from)
        .to_vec();
        header.extend((0..fit_cfg.t_grid.len()).map(|k| format!("norm_t{k}")));
        let mut table = Table::new(header);
        for rec in &rep.records {
            let (slope, r2) = rec
                .fit
                .map_or((f64::NAN, f64::NAN), |f| (f.slope, f.r_squared));
            let mut row = vec![
                rec.index as f64,
                slope,
                r2,
                f64::from(u8::from(rec.eventually_decreasing)),
                rec.duhamel_discrepancy,
            ];
            row.extend(&rec.norms);
            table.push(row);
        }
        self.write_table(file, &table)?;

        let duhamel = rep
            .records
            .iter()
            .map(|r| r.duhamel_discrepancy)
            .fold(0.0, f64::max);
        let bound = -2.0 / cfg.q + 0.1;
        let r = &mut self.report;
        r.metric("t_grid", fit_cfg.t_grid.clone());
        r.metric("inconclusive_fits", rep.inconclusive);
        r.metric("fraction_eventually_decreasing", rep.fraction_decreasing);
        r.metric("max_duhamel_discrepancy", duhamel);
        r.metric("max_residual_norm", rep.max_norm);
        if let Some(m) = rep.median_slope {
            r.metric("median_slope", m);
        }
        let median_ok = rep.median_slope.is_some_and(|m| m <= bound);
        r.verdict(
            "decay_rate",
            median_ok,
            rep.median_slope,
            format!("median slope <= -2/q + 0.1 = {bound:.4}"),
        );
        r.verdict(
            "duhamel_agreement",
            duhamel < 1e-6,
            Some(duhamel),
            "max H^σ gap between scattering routes < 1e-6",
        );
        Ok(())
    }

    fn measure(&mut self) -> Result<(), RunError> {
        let cfg = self.cfg;
        let mass = rho_mass_estimate(cfg.seed, cfg.modes, cfg.alpha, cfg.samples, &self.exec)?;
        let tail_cfg = TailConfig {
            seed: cfg.seed,
            modes: cfg.modes,
            base_modes: 1,
            s: cfg.s,
            p: cfg.p,
            lambda_grid: Vec::new(),
            samples: cfg.samples,
        };
        let norms = tail_norms(&tail_cfg, &self.exec)?;
        let top = norms.iter().copied().fold(0.0, f64::max);
        let grid: Vec<f64> = (0..=400).map(|k| top * k as f64 / 400.0).collect();
        let tail = TailEstimate::from_norms(&norms, &grid);
        let mut table = Table::new(
            ["lambda", "probability", "ci_half_width", "count"]
                .map(String::from)
                .to_vec(),
        );
        for (k, lambda) in grid.iter().enumerate() {
            table.push(vec![
                *lambda,
                tail.prob[k],
                tail.ci[k],
                tail.counts[k] as f64,
            ]);
        }
        self.write_table("tail.csv", &table)?;

        // Khinchin check on the covariance profile of μ_N
        let profile: Vec<Complex64> = (1..=cfg.modes)
            .map(|n| Complex64::new(1.0 / n as f64, 0.0))
            .collect();
        let q_grid: Vec<f64> = (2..=64).map(f64::from).collect();
        let ratios = moment_growth(&profile, &q_grid, cfg.samples, cfg.seed, &self.exec);
        let mut moments = Table::new(["q", "ratio"].map(String::from).to_vec());
        for (q, ratio) in q_grid.iter().zip(&ratios) {
            moments.push(vec![*q, *ratio]);
        }
        self.write_table("moments.csv", &moments)?;

        let worst = ratios.iter().copied().fold(0.0, f64::max);
        let r = &mut self.report;
        r.metric("rho_mass", mass.mean);
        r.metric("rho_mass_stderr", mass.stderr);
        r.metric("khinchin_max_ratio", worst);
        match tail.fit {
            Some(fit) => {
                r.metric("tail_slope", fit.slope);
                r.metric("tail_r_squared", fit.r_squared);
                r.verdict(
                    "tail_shape",
                    fit.slope < 0.0 && fit.r_squared > 0.95,
                    Some(fit.r_squared),
                    "ln P(X > λ) linear in λ² with negative slope, R² > 0.95",
                );
            }
            None => r.verdict(
                "tail_shape",
                false,
                None,
                "at least 3 thresholds with 50 <= count <= samples/10",
            ),
        }
        r.verdict(
            "khinchin",
            worst <= 1.1,
            Some(worst),
            "max_q ‖Σ c_n g_n‖_Lq / √(q Σ|c_n|²) <= 1.1",
        );
        Ok(())
    }

    fn verify(&mut self, log: &mut dyn FnMut(&str)) {
        for &id in &self.cfg.criteria {
            let outcome = run_criterion(id, self.cfg.seed, &self.exec);
            log(&outcome.line());
            for (name, value) in &outcome.metrics {
                self.report.metric(format!("c{id:02}.{name}"), *value);
            }
            self.report.verdict(
                format!("criterion_{id:02}"),
                outcome.passed,
                None,
                outcome.summary,
            );
        }
    }

    /// Per-draw evolution with the energy ledger and the flow-bound functional.
    fn flow_ensemble(&mut self) -> Result<(), RunError> {
        let cfg = self.cfg;
        let flow = self.flow_config();
        let mut bound = FlowBoundConfig::new(cfg.seed, cfg.modes, cfg.alpha, cfg.p, cfg.samples);
        bound.sigma = cfg.sigma;
        bound.dt = cfg.dt;
        bound.grid = cfg.grid;
        bound.validate()?;
        let names = [
            "completed",
            "energy_initial",
            "energy_drift",
            "energy_rate_mismatch",
            "energy_monotone",
            "bound_initial",
            "bound_sup",
            "bound_ratio",
        ];
        let rows: Vec<(Vec<f64>, Option<String>)> = {
            let this = &*self;
            this.exec.map_indices(cfg.samples, |i| {
                let u0 = this.datum(i);
                let evolution = evolve(&u0, &flow);
                let rec = flow_bound_from(evolution.as_ref(), &u0, i as u64, &bound);
                let energy = evolution.as_ref().ok().and_then(|t| {
                    energy_derivative_check(t, &flow, &EnergyCheckOptions::default()).ok()
                });
                let (e0, drift, mismatch, monotone) =
                    energy.map_or((f64::NAN, f64::NAN, f64::NAN, f64::NAN), |e| {
                        (
                            e.initial,
                            e.drift,
                            e.rate_mismatch,
                            f64::from(u8::from(e.monotone)),
                        )
                    });
                let done = f64::from(u8::from(rec.failure.is_none()));
                (
                    vec![
                        i as f64,
                        done,
                        e0,
                        drift,
                        mismatch,
                        monotone,
                        rec.initial,
                        rec.sup,
                        rec.ratio,
                    ],
                    rec.failure,
                )
            })
        };
        let mut table = Table::new(
            std::iter::once("sample_index")
                .chain(names)
                .map(String::from)
                .collect(),
        );
        for (row, _) in &rows {
            table.push(row.clone());
        }
        self.write_table("ensemble.csv", &table)?;

        let completed: Vec<&Vec<f64>> = rows
            .iter()
            .filter(|(_, f)| f.is_none())
            .map(|(r, _)| r)
            .collect();
        let n_done = completed.len();
        let fraction = |pred: &dyn Fn(f64) -> bool| {
            if n_done == 0 {
                0.0
            } else {
                completed.iter().filter(|r| pred(r[8])).count() as f64 / n_done as f64
            }
        };
        let within = fraction(&|x| x <= 3.0);
        let r = &mut self.report;
        r.metric("completed", n_done);
        if let Some((_, Some(first))) = rows.iter().find(|(_, f)| f.is_some()) {
            r.metric("first_failure", first.clone());
        }
        r.metric(
            "max_energy_drift",
            completed.iter().map(|r| r[3]).fold(0.0, f64::max),
        );
        r.metric(
            "median_bound_ratio",
            median(&completed.iter().map(|r| r[8]).collect::<Vec<_>>()).unwrap_or(f64::NAN),
        );
        r.metric("fraction_bound_within_3", within);
        r.metric(
            "fraction_bound_within_3_half_width",
            binomial_half_width(within, n_done),
        );
        for &t in &bound.thresholds {
            r.metric(format!("fraction_bound_above_{t}"), fraction(&|x| x > t));
        }
        let full = cfg.span == (-PI, PI);
        let label = if full {
            "[-π, π]"
        } else {
            "the configured span"
        };
        r.verdict(
            "all_completed",
            n_done == cfg.samples,
            Some(n_done as f64),
            format!("every trajectory completes {label} without integrator failure"),
        );
        r.verdict(
            "bound_within_three",
            within >= 0.95,
            Some(within),
            "sup/initial flow bound <= 3 for >= 95% of draws",
        );
        Ok(())
    }
}

/// `T, c_1_re, c_1_im, …, c_N_re, c_N_im, energy` at every stored time.
pub fn trajectory_table(traj: &Trajectory) -> Table {
    let modes = traj.modes();
    let mut header = vec!["T".to_string()];
    for n in 1..=modes {
        header.push(format!("c_{n}_re"));
        header.push(format!("c_{n}_im"));
    }
    header.push("energy".to_string());
    let mut table = Table::new(header);
    for ((t, u), e) in traj.times().iter().zip(traj.states()).zip(traj.energies()) {
        let mut row = Vec::with_capacity(2 * modes + 2);
        row.push(*t);
        for c in u.as_slice() {
            row.push(c.re);
            row.push(c.im);
        }
        row.push(*e);
        table.push(row);
    }
    table
}
