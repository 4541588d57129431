//! One function per subcommand. Each returns the files to write and the
//! text for stdout; nothing here touches the filesystem.

use std::fmt::Write as _;

use siet_core::analytic::{
    coverage_probability, coverage_probability_closed_alpha4, eeh_probability, eeh_probability_closed_alpha4,
    eeh_probability_with_cdf, interference_cdf_at_origin, EehQuery,
};
use siet_core::feasibility::{
    assess_level, check_p1_constraints, feasible_availability_factor, format_value, log_grid, sweep_fig2,
    sweep_fig3, sweep_fig4, FeasibilityConstraints, SupplyLevel, SweepTable, PRACTICAL_EEH,
};
use siet_core::montecarlo::{estimate_coverage, estimate_eeh, estimate_interference_ccdf, ProbabilityEstimate};
use siet_core::numerics::InverseLaplaceSpec;

use crate::config::RunConfig;
use crate::error::CliError;

/// Monte Carlo and analytic agree when they differ by at most this many
/// CI half-widths.
pub const AGREEMENT_FACTOR: f64 = 1.5;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Output {
    /// `(file name, contents)` in write order.
    pub files: Vec<(String, String)>,
    pub stdout: String,
    pub disagreements: usize,
}

impl Output {
    fn single(name: &str, csv: String) -> Self {
        Output {
            stdout: csv.clone(),
            files: vec![(name.to_string(), csv)],
            disagreements: 0,
        }
    }
}

fn v(x: f64) -> String {
    format_value(x)
}

fn nonempty(grid: &[f64]) -> Result<(), CliError> {
    if grid.is_empty() {
        Err(CliError::Config("empty grid".into()))
    } else {
        Ok(())
    }
}

fn closed_applies(cfg: &RunConfig) -> bool {
    cfg.system.is_alpha4_interference_limited()
}

pub fn cmd_coverage(cfg: &RunConfig) -> Result<Output, CliError> {
    nonempty(&cfg.sinr_thresholds)?;
    let closed = closed_applies(cfg);
    let mut csv = String::from(if closed { "T,P_c_analytic,P_c_closed\n" } else { "T,P_c_analytic\n" });
    for &t in &cfg.sinr_thresholds {
        let general = coverage_probability(&cfg.system, t)?;
        write!(csv, "{},{}", v(t), v(general)).unwrap();
        if closed {
            write!(csv, ",{}", v(coverage_probability_closed_alpha4(t)?)).unwrap();
        }
        csv.push('\n');
    }
    Ok(Output::single("coverage.csv", csv))
}

pub fn cmd_eeh(cfg: &RunConfig) -> Result<Output, CliError> {
    nonempty(&cfg.eeh_thresholds)?;
    let closed = closed_applies(cfg);
    let spec = InverseLaplaceSpec::default();
    let mut csv = String::from(if closed {
        "theta_w,P_eeh_analytic,P_eeh_closed\n"
    } else {
        "theta_w,P_eeh_analytic\n"
    });
    for &theta in &cfg.eeh_thresholds {
        let q = EehQuery::new(cfg.system, theta)?;
        write!(csv, "{},{}", v(theta), v(eeh_probability(&q, &spec)?)).unwrap();
        if closed {
            write!(csv, ",{}", v(eeh_probability_closed_alpha4(&q))).unwrap();
        }
        csv.push('\n');
    }
    Ok(Output::single("eeh.csv", csv))
}

pub fn cmd_montecarlo(cfg: &RunConfig) -> Result<Output, CliError> {
    if cfg.sinr_thresholds.is_empty() && cfg.eeh_thresholds.is_empty() {
        return Err(CliError::Config("empty grid".into()));
    }
    let p = &cfg.system;
    let spec = InverseLaplaceSpec::default();
    let mut rows: Vec<(String, f64, ProbabilityEstimate)> = Vec::new();
    for &t in &cfg.sinr_thresholds {
        let analytic = coverage_probability(p, t)?;
        rows.push((format!("coverage T={}", v(t)), analytic, estimate_coverage(p, t, &cfg.sim)?));
    }
    for &theta in &cfg.eeh_thresholds {
        let q = EehQuery::new(*p, theta)?;
        let analytic = eeh_probability_with_cdf(&q, &spec)?;
        rows.push((format!("eeh theta={}", v(theta)), analytic, estimate_eeh(p, theta, &cfg.sim)?));
    }
    if !cfg.eeh_thresholds.is_empty() {
        let mut levels = cfg.eeh_thresholds.clone();
        levels.sort_by(f64::total_cmp);
        levels.dedup();
        let est = estimate_interference_ccdf(p, &levels, &cfg.sim)?;
        for (x, e) in levels.iter().zip(est) {
            let analytic = 1.0 - interference_cdf_at_origin(p, *x, &spec)?;
            rows.push((format!("interference_ccdf x={}", v(*x)), analytic, e));
        }
    }
    let mut csv = String::from("quantity,analytic,mc_value,ci_halfwidth,agree\n");
    let mut disagreements = 0;
    for (name, analytic, e) in &rows {
        let agree = (analytic - e.value).abs() <= e.ci_halfwidth * AGREEMENT_FACTOR;
        if !agree {
            disagreements += 1;
        }
        writeln!(csv, "{name},{},{},{},{agree}", v(*analytic), v(e.value), v(e.ci_halfwidth)).unwrap();
        if let Some(d) = e.diagnostics {
            log::info!(
                "{name}: window {:.1} m, far-field mean {:.3e} W (std {:.3e} W, compensated {}), {} empty redraws",
                d.window_radius,
                d.truncated_interference,
                d.truncated_interference_std,
                d.tail_compensated,
                d.empty_resamples
            );
        }
    }
    let mut out = Output::single("montecarlo.csv", csv);
    out.disagreements = disagreements;
    Ok(out)
}

struct PlotStyle {
    xlabel: &'static str,
    ylabel: &'static str,
    logx: bool,
    logy: bool,
}

fn plot_script(n: u8, table: &SweepTable, style: &PlotStyle) -> String {
    let mut s = String::new();
    writeln!(s, "# gnuplot script for fig{n}.csv").unwrap();
    for (k, val) in &table.metadata {
        writeln!(s, "# {k} = {val}").unwrap();
    }
    s.push_str("set datafile separator ','\n");
    writeln!(s, "set terminal svg size 800,560\nset output 'fig{n}.svg'").unwrap();
    writeln!(s, "set xlabel '{}'\nset ylabel '{}'", style.xlabel, style.ylabel).unwrap();
    if style.logx {
        s.push_str("set logscale x\n");
    }
    if style.logy {
        s.push_str("set logscale y\n");
    }
    s.push_str("set grid\nset key left top\n");
    writeln!(
        s,
        "plot for [i=2:{}] 'fig{n}.csv' using 1:i with lines linewidth 2 title columnhead(i)",
        table.series.len() + 1
    )
    .unwrap();
    s
}

pub fn cmd_figures(cfg: &RunConfig, which: u8) -> Result<Output, CliError> {
    let zetas = || log_grid(cfg.zeta_min, cfg.zeta_max, cfg.zeta_points);
    let s = &cfg.system;
    let (mut table, style) = match which {
        2 => {
            nonempty(&cfg.eeh_thresholds)?;
            nonempty(&cfg.fig_rhos)?;
            if cfg.eeh_thresholds.len() > 1 {
                log::warn!("figure 2 uses only the first threshold, {} W", cfg.eeh_thresholds[0]);
            }
            let n = cfg.lambda_sqrt_p_points;
            let grid: Vec<f64> = (0..n).map(|k| cfg.lambda_sqrt_p_max * k as f64 / (n - 1) as f64).collect();
            let t = sweep_fig2(&grid, &cfg.fig_rhos, s.epsilon, cfg.eeh_thresholds[0])?;
            let style = PlotStyle {
                xlabel: "lambda*sqrt(P)",
                ylabel: "P_eeh",
                logx: false,
                logy: false,
            };
            (t, style)
        }
        3 => {
            nonempty(&cfg.density_max)?;
            nonempty(&cfg.etas)?;
            let t = sweep_fig3(&zetas(), &cfg.density_max, &cfg.etas, s.rho, s.epsilon, cfg.maintenance_power)?;
            let style = PlotStyle {
                xlabel: "availability factor zeta",
                ylabel: "maximal average P_eeh",
                logx: true,
                logy: false,
            };
            (t, style)
        }
        4 => {
            nonempty(&cfg.etas)?;
            nonempty(&cfg.fig_targets)?;
            let grid = zetas();
            let mut merged = SweepTable::new("zeta", grid.clone())?;
            for &eta in &cfg.etas {
                let t = sweep_fig4(&grid, &cfg.fig_targets, eta, s.rho, s.epsilon, cfg.maintenance_power)?;
                for series in t.series {
                    merged.push_series(series.name, series.values)?;
                }
            }
            merged.push_metadata("rho", s.rho);
            merged.push_metadata("epsilon", s.epsilon);
            merged.push_metadata("p_m_w", cfg.maintenance_power);
            let style = PlotStyle {
                xlabel: "availability factor zeta",
                ylabel: "required standard density (BS/m^2)",
                logx: true,
                logy: true,
            };
            (merged, style)
        }
        other => return Err(CliError::Config(format!("unknown figure {other}; expected 2, 3 or 4"))),
    };
    table.push_metadata("scenario", &cfg.scenario);
    let csv = table.to_csv();
    let plot = plot_script(which, &table, &style);
    Ok(Output {
        stdout: format!("wrote fig{which}.csv and fig{which}.plot ({} series)\n", table.series.len()),
        files: vec![(format!("fig{which}.csv"), csv), (format!("fig{which}.plot"), plot)],
        disagreements: 0,
    })
}

pub fn cmd_feasibility(cfg: &RunConfig) -> Result<Output, CliError> {
    nonempty(&cfg.etas)?;
    nonempty(&cfg.density_max)?;
    let s = &cfg.system;
    let target = cfg.feasibility_target;
    let zetas: Vec<f64> = if cfg.zetas.is_empty() {
        SupplyLevel::ALL.iter().map(|l| l.zeta()).collect()
    } else {
        cfg.zetas.clone()
    };
    let mut csv = String::from(
        "eta,density_max,level,zeta,theta_w,target,achievable_eeh,required_density,density_ratio,feasible,max_practical_zeta\n",
    );
    let mut text = String::new();
    writeln!(
        text,
        "scenario {}: standard density (P = 1 W, alpha = 4, no noise), rho = {}, epsilon = {}, p_m = {} W, target P_eeh = {}",
        cfg.scenario,
        v(s.rho),
        v(s.epsilon),
        v(cfg.maintenance_power),
        v(target)
    )
    .unwrap();
    for &eta in &cfg.etas {
        for &dmax in &cfg.density_max {
            let zstar = feasible_availability_factor(dmax, cfg.maintenance_power, eta, s.rho, s.epsilon)?;
            writeln!(text, "\neta = {}, lambda_max = {} BS/m^2", v(eta), v(dmax)).unwrap();
            for &z in &zetas {
                let a = assess_level(cfg.maintenance_power, eta, z, dmax, target, s.rho, s.epsilon)?;
                let ratio = a.required_density / dmax;
                writeln!(
                    csv,
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    v(eta),
                    v(dmax),
                    a.level.name(),
                    v(z),
                    v(a.theta),
                    v(target),
                    v(a.achievable_eeh),
                    v(a.required_density),
                    v(ratio),
                    a.feasible,
                    v(zstar)
                )
                .unwrap();
                writeln!(
                    text,
                    "  {:<17} zeta = {:<6} theta = {:.3e} W: best P_eeh {:.4}, needs lambda {:.3e} ({:.3}x cap) -> {}",
                    a.level.name(),
                    v(z),
                    a.theta,
                    a.achievable_eeh,
                    a.required_density,
                    ratio,
                    if a.feasible { "feasible" } else { "infeasible" }
                )
                .unwrap();
            }
            writeln!(
                text,
                "  largest zeta with P_eeh >= {}: {:.4e}",
                v(PRACTICAL_EEH),
                zstar
            )
            .unwrap();
        }
    }
    if !cfg.sinr_thresholds.is_empty() {
        writeln!(text, "\ncoverage constraint (system parameters as given, floor {}):", v(cfg.coverage_floor)).unwrap();
        for &t in &cfg.sinr_thresholds {
            for &dmax in &cfg.density_max {
                let c = FeasibilityConstraints::new(cfg.coverage_floor, cfg.power_max, dmax)?;
                let r = check_p1_constraints(s, t, &c)?;
                writeln!(
                    text,
                    "  T = {}, lambda_max = {}: P_c = {:.5} coverage {} power {} density {}",
                    v(t),
                    v(dmax),
                    r.coverage,
                    ok(r.coverage_ok),
                    ok(r.power_ok),
                    ok(r.density_ok)
                )
                .unwrap();
            }
        }
    }
    Ok(Output {
        stdout: text,
        files: vec![("feasibility.csv".to_string(), csv)],
        disagreements: 0,
    })
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "VIOLATED"
    }
}
