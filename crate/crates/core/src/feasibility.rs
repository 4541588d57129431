//! Energy-budget thresholds, the reduced harvesting maximizations, density
//! requirements and the figure sweeps.
//!
//! Everything here lives in the interference-limited α = 4 regime with
//! standard density (P = 1 W): there the harvesting probability depends on
//! λ and P only through λ√P.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::analytic::{coverage_probability, eeh_probability_closed_alpha4, EehQuery};
use crate::error::{Error, Result};
use crate::model::{ParamError, SystemParams};
use crate::numerics::find_root_monotone;

/// Typical LTE-A handset maintenance power, W.
pub const DEFAULT_MAINTENANCE_POWER: f64 = 0.02;

/// Harvesting probability below which a level is not considered practical.
pub const PRACTICAL_EEH: f64 = 0.5;

/// Availability factor standing in for "charging the secondary battery".
pub const SECONDARY_BATTERY_ZETA: f64 = 0.01;
pub const BASIC_SYSTEM_ZETA: f64 = 1.0;
/// Availability factor standing in for "battery-free" (ζ ≫ 1).
pub const BATTERY_FREE_ZETA: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBudget {
    /// `p_m`, W.
    pub maintenance_power: f64,
    /// `ζ`.
    pub availability_factor: f64,
    /// `η`.
    pub converter_efficiency: f64,
}

impl EnergyBudget {
    pub fn new(maintenance_power: f64, availability_factor: f64, converter_efficiency: f64) -> Result<Self> {
        if !(maintenance_power > 0.0 && maintenance_power.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "maintenance power must be positive (got {maintenance_power})"
            )));
        }
        if !(availability_factor > 0.0 && availability_factor.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "availability factor must be positive (got {availability_factor})"
            )));
        }
        if !(converter_efficiency > 0.0 && converter_efficiency <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "converter efficiency out of (0,1] (got {converter_efficiency})"
            )));
        }
        Ok(Self {
            maintenance_power,
            availability_factor,
            converter_efficiency,
        })
    }

    pub fn validate(self) -> Result<Self> {
        Self::new(self.maintenance_power, self.availability_factor, self.converter_efficiency)
    }

    pub fn with_zeta(self, zeta: f64) -> Result<Self> {
        Self::new(self.maintenance_power, zeta, self.converter_efficiency)
    }

    /// `Θ = ζ p_m / η`.
    pub fn harvest_threshold(&self) -> f64 {
        self.availability_factor * self.maintenance_power / self.converter_efficiency
    }
}

pub fn harvest_threshold(budget: &EnergyBudget) -> Result<f64> {
    Ok(budget.validate()?.harvest_threshold())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityConstraints {
    /// Minimum coverage probability `μ`.
    pub coverage_floor: f64,
    /// `P_max`, W.
    pub power_max: f64,
    /// `λ_max`, BS/m².
    pub density_max: f64,
}

impl FeasibilityConstraints {
    pub fn new(coverage_floor: f64, power_max: f64, density_max: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&coverage_floor) {
            return Err(Error::InvalidInput(format!("coverage floor out of [0,1] (got {coverage_floor})")));
        }
        if !(power_max > 0.0 && power_max.is_finite()) {
            return Err(Error::InvalidInput(format!("power_max must be positive (got {power_max})")));
        }
        if !(density_max > 0.0 && density_max.is_finite()) {
            return Err(Error::InvalidInput(format!("density_max must be positive (got {density_max})")));
        }
        Ok(Self {
            coverage_floor,
            power_max,
            density_max,
        })
    }

    pub fn validate(self) -> Result<Self> {
        Self::new(self.coverage_floor, self.power_max, self.density_max)
    }
}

impl Default for FeasibilityConstraints {
    fn default() -> Self {
        Self {
            coverage_floor: 0.0,
            power_max: 1.0,
            density_max: 1e-2,
        }
    }
}

fn check_fraction(rho: f64, epsilon: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(ParamError::Rho(rho).into());
    }
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(ParamError::Epsilon(epsilon).into());
    }
    Ok(())
}

fn check_theta(theta: f64) -> Result<()> {
    if !(theta > 0.0) {
        return Err(ParamError::EehThreshold(theta).into());
    }
    Ok(())
}

/// Closed-form harvesting probability at standard density `λ_s` (P = 1 W).
/// Zero density gives 0.
pub fn standard_density_eeh(theta: f64, density: f64, rho: f64, epsilon: f64) -> Result<f64> {
    check_theta(theta)?;
    check_fraction(rho, epsilon)?;
    if density == 0.0 {
        return Ok(0.0);
    }
    let params = SystemParams {
        lambda: density,
        power: 1.0,
        alpha: 4.0,
        noise: 0.0,
        rho,
        epsilon,
    };
    Ok(eeh_probability_closed_alpha4(&EehQuery::new(params, theta)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct P3Solution {
    pub density: f64,
    pub eeh: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct P2Solution {
    pub density: f64,
    pub power: f64,
    pub eeh: f64,
}

/// Maximizes harvesting over `λ_s ≤ λ_max`. The optimum sits at the cap; the
/// objective is checked to be nondecreasing on a grid below it first.
pub fn solve_p3(budget: &EnergyBudget, density_max: f64, rho: f64, epsilon: f64) -> Result<P3Solution> {
    let theta = harvest_threshold(budget)?;
    if !(density_max > 0.0 && density_max.is_finite()) {
        return Err(Error::InvalidInput(format!("density_max must be positive (got {density_max})")));
    }
    let eeh = standard_density_eeh(theta, density_max, rho, epsilon)?;
    let mut prev = 0.0;
    for k in 1..=16 {
        let density = density_max * k as f64 / 16.0;
        let v = standard_density_eeh(theta, density, rho, epsilon)?;
        if v < prev {
            return Err(Error::NotMonotone { density });
        }
        prev = v;
    }
    Ok(P3Solution {
        density: density_max,
        eeh,
    })
}

/// Joint maximization over `λ ≤ λ_max`, `P ≤ P_max`: both at their caps.
pub fn solve_p2(theta: f64, constraints: &FeasibilityConstraints, rho: f64, epsilon: f64) -> Result<P2Solution> {
    let c = constraints.validate()?;
    // λ√P is the only combination that matters
    let standard = c.density_max * c.power_max.sqrt();
    let eeh = standard_density_eeh(theta, standard, rho, epsilon)?;
    Ok(P2Solution {
        density: c.density_max,
        power: c.power_max,
        eeh,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct P1Report {
    pub coverage: f64,
    pub coverage_ok: bool,
    pub power_ok: bool,
    pub density_ok: bool,
}

impl P1Report {
    pub fn satisfied(&self) -> bool {
        self.coverage_ok && self.power_ok && self.density_ok
    }
}

pub fn check_p1_constraints(
    params: &SystemParams,
    sinr_threshold: f64,
    constraints: &FeasibilityConstraints,
) -> Result<P1Report> {
    let params = params.validate()?;
    let c = constraints.validate()?;
    let coverage = coverage_probability(&params, sinr_threshold)?;
    Ok(P1Report {
        coverage,
        coverage_ok: coverage >= c.coverage_floor,
        power_ok: params.power <= c.power_max,
        density_ok: params.lambda <= c.density_max,
    })
}

/// One point of a brute-force evaluation of the full problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct P1GridPoint {
    pub params: SystemParams,
    pub eeh: f64,
    pub report: P1Report,
}

/// Evaluates coverage and harvesting (general, any α and σ²) over every
/// combination of `densities × powers × rhos` and keeps the rest of `base`.
/// Points come back in lexicographic grid order.
pub fn p1_grid_report(
    base: &SystemParams,
    sinr_threshold: f64,
    theta: f64,
    constraints: &FeasibilityConstraints,
    densities: &[f64],
    powers: &[f64],
    rhos: &[f64],
) -> Result<Vec<P1GridPoint>> {
    use crate::analytic::eeh_probability;
    use crate::numerics::InverseLaplaceSpec;

    let mut grid = Vec::with_capacity(densities.len() * powers.len() * rhos.len());
    for &lambda in densities {
        for &power in powers {
            for &rho in rhos {
                grid.push(base.with_lambda(lambda).with_power(power).with_rho(rho));
            }
        }
    }
    let spec = InverseLaplaceSpec::default();
    grid.into_par_iter()
        .map(|params| {
            let report = check_p1_constraints(&params, sinr_threshold, constraints)?;
            let q = EehQuery::new(params, theta)?;
            let eeh = if params.is_alpha4_interference_limited() {
                eeh_probability_closed_alpha4(&q)
            } else {
                eeh_probability(&q, &spec)?
            };
            Ok(P1GridPoint { params, eeh, report })
        })
        .collect()
}

/// Standard density at which the harvesting probability reaches `target`.
pub fn required_density(target: f64, budget: &EnergyBudget, rho: f64, epsilon: f64) -> Result<f64> {
    let theta = harvest_threshold(budget)?;
    required_density_for_theta(target, theta, rho, epsilon)
}

pub fn required_density_for_theta(target: f64, theta: f64, rho: f64, epsilon: f64) -> Result<f64> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::InvalidInput(format!("target probability out of (0,1) (got {target})")));
    }
    check_theta(theta)?;
    check_fraction(rho, epsilon)?;
    if rho >= 1.0 && epsilon >= 1.0 {
        return Err(Error::InvalidInput("nothing is harvested with rho = 1 and epsilon = 1".into()));
    }
    let f = |d: f64| standard_density_eeh(theta, d, rho, epsilon).unwrap_or(f64::NAN);
    let mut hi = theta.sqrt();
    let mut steps = 0;
    while f(hi) < target {
        hi *= 2.0;
        steps += 1;
        if steps > 2000 || !hi.is_finite() {
            return Err(Error::InvalidInput(format!("target {target} is unreachable")));
        }
    }
    Ok(find_root_monotone(f, target, 0.0, hi, 1e-13 * target)?)
}

/// Largest ζ (availability factor) at which the harvesting probability at
/// `density` still reaches `PRACTICAL_EEH`.
pub fn feasible_availability_factor(
    density: f64,
    maintenance_power: f64,
    converter_efficiency: f64,
    rho: f64,
    epsilon: f64,
) -> Result<f64> {
    let probe = EnergyBudget::new(maintenance_power, 1.0, converter_efficiency)?;
    if !(density > 0.0) {
        return Err(Error::InvalidInput(format!("density must be positive (got {density})")));
    }
    check_fraction(rho, epsilon)?;
    // P_eeh depends on λ and Θ only through λ/√Θ: find the λ needed at
    // Θ(ζ=1), then Θ scales with (density/needed)²
    let needed = required_density_for_theta(PRACTICAL_EEH, probe.harvest_threshold(), rho, epsilon)?;
    Ok((density / needed).powi(2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SupplyLevel {
    SecondaryBattery,
    BasicSystem,
    BatteryFree,
}

impl SupplyLevel {
    pub const ALL: [SupplyLevel; 3] = [
        SupplyLevel::SecondaryBattery,
        SupplyLevel::BasicSystem,
        SupplyLevel::BatteryFree,
    ];

    /// Representative availability factor used for reporting.
    pub fn zeta(self) -> f64 {
        match self {
            SupplyLevel::SecondaryBattery => SECONDARY_BATTERY_ZETA,
            SupplyLevel::BasicSystem => BASIC_SYSTEM_ZETA,
            SupplyLevel::BatteryFree => BATTERY_FREE_ZETA,
        }
    }

    /// Level an arbitrary availability factor belongs to.
    pub fn classify(zeta: f64) -> Self {
        if zeta < 1.0 {
            SupplyLevel::SecondaryBattery
        } else if zeta == 1.0 {
            SupplyLevel::BasicSystem
        } else {
            SupplyLevel::BatteryFree
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SupplyLevel::SecondaryBattery => "secondary-battery",
            SupplyLevel::BasicSystem => "basic-system",
            SupplyLevel::BatteryFree => "battery-free",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelAssessment {
    pub level: SupplyLevel,
    pub zeta: f64,
    pub theta: f64,
    /// Best harvesting probability under the density cap.
    pub achievable_eeh: f64,
    /// Density needed for the target probability.
    pub required_density: f64,
    pub density_max: f64,
    pub feasible: bool,
}

/// Assesses one availability factor against `density_max` for `target`.
pub fn assess_level(
    maintenance_power: f64,
    converter_efficiency: f64,
    zeta: f64,
    density_max: f64,
    target: f64,
    rho: f64,
    epsilon: f64,
) -> Result<LevelAssessment> {
    let budget = EnergyBudget::new(maintenance_power, zeta, converter_efficiency)?;
    let best = solve_p3(&budget, density_max, rho, epsilon)?;
    let need = required_density(target, &budget, rho, epsilon)?;
    Ok(LevelAssessment {
        level: SupplyLevel::classify(zeta),
        zeta,
        theta: budget.harvest_threshold(),
        achievable_eeh: best.eeh,
        required_density: need,
        density_max,
        feasible: need <= density_max,
    })
}

/// [`assess_level`] at the representative ζ of every supply level.
pub fn assess_levels(
    maintenance_power: f64,
    converter_efficiency: f64,
    density_max: f64,
    target: f64,
    rho: f64,
    epsilon: f64,
) -> Result<Vec<LevelAssessment>> {
    SupplyLevel::ALL
        .iter()
        .map(|l| assess_level(maintenance_power, converter_efficiency, l.zeta(), density_max, target, rho, epsilon))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub values: Vec<f64>,
}

/// Tabulated curves over a shared axis.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub axis_name: String,
    pub axis_values: Vec<f64>,
    pub series: Vec<Series>,
    /// Parameter record, in insertion order.
    pub metadata: Vec<(String, String)>,
}

impl SweepTable {
    pub fn new(axis_name: impl Into<String>, axis_values: Vec<f64>) -> Result<Self> {
        let axis_name = axis_name.into();
        check_column_name(&axis_name)?;
        if axis_values.is_empty() {
            return Err(Error::InvalidInput("empty grid".into()));
        }
        if axis_values.iter().any(|v| !v.is_finite()) || axis_values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(format!("{axis_name} grid must be finite and strictly increasing")));
        }
        Ok(Self {
            axis_name,
            axis_values,
            series: Vec::new(),
            metadata: Vec::new(),
        })
    }

    pub fn push_series(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<()> {
        let name = name.into();
        check_column_name(&name)?;
        if values.len() != self.axis_values.len() {
            return Err(Error::InvalidInput(format!(
                "series {name} has {} values for {} axis points",
                values.len(),
                self.axis_values.len()
            )));
        }
        if self.series.iter().any(|s| s.name == name) || name == self.axis_name {
            return Err(Error::InvalidInput(format!("duplicate column {name}")));
        }
        self.series.push(Series { name, values });
        Ok(())
    }

    pub fn push_metadata(&mut self, key: impl Into<String>, value: impl ToString) {
        self.metadata.push((key.into(), value.to_string()));
    }

    pub fn series(&self, name: &str) -> Option<&[f64]> {
        self.series.iter().find(|s| s.name == name).map(|s| s.values.as_slice())
    }

    /// Header row, then one row per axis point, values via [`format_value`].
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.axis_name);
        for s in &self.series {
            out.push(',');
            out.push_str(&s.name);
        }
        out.push('\n');
        for (i, x) in self.axis_values.iter().enumerate() {
            out.push_str(&format_value(*x));
            for s in &self.series {
                write!(out, ",{}", format_value(s.values[i])).unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Shortest round-trip decimal; scientific notation outside `[1e-4, 1e15)`.
pub fn format_value(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn check_column_name(name: &str) -> Result<()> {
    if name.is_empty() || name.contains([',', '"', '\n', '\r']) {
        return Err(Error::InvalidInput(format!("bad column name {name:?}")));
    }
    Ok(())
}

/// `n` points log-spaced on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    let mut grid: Vec<f64> = (0..n)
        .map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp())
        .collect();
    grid[0] = lo;
    grid[n - 1] = hi;
    grid
}

/// Default availability-factor axis for `sweep_fig3` and `sweep_fig4`.
pub fn default_zeta_grid() -> Vec<f64> {
    log_grid(0.01, 2.0, 61)
}

/// Default λ√P axis for `sweep_fig2`, 0 to 0.03 in steps of 5e-4.
pub fn default_lambda_sqrt_power_grid() -> Vec<f64> {
    (0..=60).map(|k| k as f64 * 5e-4).collect()
}

/// Compact number formatting for series names.
fn tag(x: f64) -> String {
    format!("{x}")
}

/// Harvesting probability over λ√P, one series per ρ.
pub fn sweep_fig2(grid: &[f64], rhos: &[f64], epsilon: f64, theta: f64) -> Result<SweepTable> {
    if grid.iter().any(|x| *x < 0.0) {
        return Err(Error::InvalidInput("lambda_sqrt_p grid must be nonnegative".into()));
    }
    let mut table = SweepTable::new("lambda_sqrt_p", grid.to_vec())?;
    for &rho in rhos {
        let values = grid
            .par_iter()
            .map(|&x| standard_density_eeh(theta, x, rho, epsilon))
            .collect::<Result<Vec<_>>>()?;
        table.push_series(format!("rho={}", tag(rho)), values)?;
    }
    table.push_metadata("epsilon", epsilon);
    table.push_metadata("theta_w", theta);
    table.push_metadata("alpha", 4);
    table.push_metadata("noise_w", 0);
    Ok(table)
}

/// Best harvesting probability over ζ, one series per (λ_max, η).
pub fn sweep_fig3(
    zeta_grid: &[f64],
    density_max_list: &[f64],
    eta_list: &[f64],
    rho: f64,
    epsilon: f64,
    maintenance_power: f64,
) -> Result<SweepTable> {
    let mut table = SweepTable::new("zeta", zeta_grid.to_vec())?;
    for &dmax in density_max_list {
        for &eta in eta_list {
            let values = zeta_grid
                .par_iter()
                .map(|&z| {
                    let budget = EnergyBudget::new(maintenance_power, z, eta)?;
                    Ok(solve_p3(&budget, dmax, rho, epsilon)?.eeh)
                })
                .collect::<Result<Vec<_>>>()?;
            table.push_series(format!("lambda_max={} eta={}", tag(dmax), tag(eta)), values)?;
        }
    }
    table.push_metadata("rho", rho);
    table.push_metadata("epsilon", epsilon);
    table.push_metadata("p_m_w", maintenance_power);
    Ok(table)
}

/// Required standard density over ζ, one series per target.
pub fn sweep_fig4(
    zeta_grid: &[f64],
    targets: &[f64],
    eta: f64,
    rho: f64,
    epsilon: f64,
    maintenance_power: f64,
) -> Result<SweepTable> {
    let mut table = SweepTable::new("zeta", zeta_grid.to_vec())?;
    for &target in targets {
        let values = zeta_grid
            .par_iter()
            .map(|&z| required_density(target, &EnergyBudget::new(maintenance_power, z, eta)?, rho, epsilon))
            .collect::<Result<Vec<_>>>()?;
        table.push_series(format!("eta={} p_eeh={}", tag(eta), tag(target)), values)?;
    }
    table.push_metadata("rho", rho);
    table.push_metadata("epsilon", epsilon);
    table.push_metadata("p_m_w", maintenance_power);
    Ok(table)
}
