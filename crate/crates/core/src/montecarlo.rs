//! Monte Carlo oracle: PPP base-station fields in a disk around the typical
//! user, with exponential fading marks and stationary two-state activity.
//!
//! Trial `i` draws everything from its own ChaCha8 stream keyed by
//! `(seed, i)`, and workers only exchange integer tallies, so estimates are
//! bit-identical for any thread count or scheduling.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Poisson};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{instantaneous_sinr, ParamError, SystemParams, UserState};

/// Mean base-station count per realization behind the default window.
pub const DEFAULT_POINT_BUDGET: f64 = 1000.0;

/// Hard cap on the Poisson mean of a single realization.
pub const MAX_EXPECTED_POINTS: f64 = 5e7;

const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BsPoint {
    /// Distance to the origin, m.
    pub distance: f64,
    /// Fading mark `h`, exponential with mean `P`.
    pub fade: f64,
}

impl BsPoint {
    pub fn received_power(&self, alpha: f64) -> f64 {
        self.fade * path_gain(self.distance * self.distance, alpha)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PppRealization {
    pub points: Vec<BsPoint>,
    pub window_radius: f64,
}

impl PppRealization {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index of the serving (closest) base station.
    pub fn nearest(&self) -> Option<usize> {
        self.points
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.distance.total_cmp(&b.1.distance))
            .map(|(i, _)| i)
    }

    /// Total received power at the origin, `Σ h R_i^-α`.
    pub fn total_interference(&self, alpha: f64) -> f64 {
        self.points.iter().map(|p| p.received_power(alpha)).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub trials: u64,
    pub seed: u64,
    /// Fixed simulation disk radius; `None` derives it from the tail budget.
    pub window_radius: Option<f64>,
    /// Bound on the expected interference lost to truncation, W. `None`
    /// uses [`default_tail_tolerance`].
    pub tail_tolerance: Option<f64>,
    /// Add the expected far-field interference `truncated_interference_mean`
    /// to every realization, leaving only its fluctuation as error.
    pub compensate_tail: bool,
}

impl SimConfig {
    pub fn new(trials: u64, seed: u64) -> Self {
        Self {
            trials,
            seed,
            window_radius: None,
            tail_tolerance: None,
            compensate_tail: true,
        }
    }

    pub fn with_tail_compensation(mut self, on: bool) -> Self {
        self.compensate_tail = on;
        self
    }

    pub fn with_window_radius(mut self, radius: f64) -> Self {
        self.window_radius = Some(radius);
        self
    }

    pub fn with_tail_tolerance(mut self, tolerance: f64) -> Self {
        self.tail_tolerance = Some(tolerance);
        self
    }

    pub fn validate(self) -> Result<Self> {
        if self.trials < 1 {
            return Err(Error::InvalidInput("trials must be at least 1".into()));
        }
        if let Some(t) = self.tail_tolerance {
            if !(t > 0.0) {
                return Err(Error::InvalidInput(format!("tail_tolerance must be positive (got {t})")));
            }
        }
        if let Some(r) = self.window_radius {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::InvalidInput(format!("window_radius must be positive (got {r})")));
            }
        }
        Ok(self)
    }

    /// Disk radius used for `params`.
    pub fn resolve_window(&self, params: &SystemParams) -> f64 {
        match self.window_radius {
            Some(r) => r,
            None => {
                let tol = self
                    .tail_tolerance
                    .unwrap_or_else(|| default_tail_tolerance(params));
                auto_window_radius(params, tol)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimateSource {
    MonteCarlo,
    Analytic,
}

/// How a Monte Carlo estimate was produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimDiagnostics {
    pub window_radius: f64,
    /// Expected interference from base stations outside the window, W.
    pub truncated_interference: f64,
    /// Standard deviation of that far-field interference, W.
    pub truncated_interference_std: f64,
    pub tail_compensated: bool,
    /// Realizations redrawn because the window held no base station.
    pub empty_resamples: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityEstimate {
    pub value: f64,
    /// 95% half-width.
    pub ci_halfwidth: f64,
    pub trials: u64,
    pub source: EstimateSource,
    pub diagnostics: Option<SimDiagnostics>,
}

impl ProbabilityEstimate {
    pub fn analytic(value: f64) -> Self {
        Self {
            value,
            ci_halfwidth: 0.0,
            trials: 0,
            source: EstimateSource::Analytic,
            diagnostics: None,
        }
    }

    pub fn from_counts(hits: u64, trials: u64) -> Self {
        let value = hits as f64 / trials as f64;
        Self {
            value,
            ci_halfwidth: ci_halfwidth(value, trials),
            trials,
            source: EstimateSource::MonteCarlo,
            diagnostics: None,
        }
    }

    /// True if `reference` lies within `factor` half-widths of this estimate.
    pub fn agrees_with(&self, reference: f64, factor: f64) -> bool {
        (self.value - reference).abs() <= factor * self.ci_halfwidth
    }
}

/// Normal-approximation 95% half-width, with the rule-of-three bound `3/n`
/// when the empirical probability is 0 or 1.
pub fn ci_halfwidth(p: f64, trials: u64) -> f64 {
    let n = trials as f64;
    if p <= 0.0 || p >= 1.0 {
        3.0 / n
    } else {
        Z95 * (p * (1.0 - p) / n).sqrt()
    }
}

/// Far-field mean at the radius holding [`DEFAULT_POINT_BUDGET`] points on
/// average, so the default window has that many points for any λ and α.
pub fn default_tail_tolerance(params: &SystemParams) -> f64 {
    let radius = (DEFAULT_POINT_BUDGET / (PI * params.lambda)).sqrt();
    truncated_interference_mean(params, radius)
}

/// Expected interference from base stations beyond `radius`,
/// `2πλP·R^(2-α)/(α-2)`.
pub fn truncated_interference_mean(params: &SystemParams, radius: f64) -> f64 {
    2.0 * PI * params.lambda * params.power * radius.powf(2.0 - params.alpha) / (params.alpha - 2.0)
}

/// Standard deviation of the interference from base stations beyond
/// `radius`, `sqrt(4πλP²·R^(2-2α)/(2α-2))` (exponential fades, `E[h²] = 2P²`).
pub fn truncated_interference_std(params: &SystemParams, radius: f64) -> f64 {
    let a = params.alpha;
    (4.0 * PI * params.lambda * params.power * params.power * radius.powf(2.0 - 2.0 * a) / (2.0 * a - 2.0)).sqrt()
}

/// Smallest radius (at least 1 m) whose truncated-interference mean is at
/// most `tail_tolerance`.
pub fn auto_window_radius(params: &SystemParams, tail_tolerance: f64) -> f64 {
    let a = params.alpha - 2.0;
    let r = (2.0 * PI * params.lambda * params.power / (a * tail_tolerance)).powf(1.0 / a);
    if r.is_nan() {
        return 1.0;
    }
    r.max(1.0)
}

/// The random stream of trial `trial_index`.
pub fn trial_rng(seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial_index);
    rng
}

#[inline]
fn path_gain(distance_sq: f64, alpha: f64) -> f64 {
    if alpha == 4.0 {
        1.0 / (distance_sq * distance_sq)
    } else {
        distance_sq.powf(-alpha / 2.0)
    }
}

/// Draws one field inside a disk and feeds `(distance², fade)` per point.
struct FieldSampler {
    radius: f64,
    /// Deterministic far-field term added to every total.
    offset: f64,
    count: Option<Poisson<f64>>,
    fade: Exp<f64>,
}

impl FieldSampler {
    fn new(params: &SystemParams, config: &SimConfig) -> Result<Self> {
        let radius = config.resolve_window(params);
        let mean = params.lambda * PI * radius * radius;
        if !(mean <= MAX_EXPECTED_POINTS) {
            return Err(Error::WindowTooLarge {
                expected_points: mean,
            });
        }
        let count = if mean > 0.0 {
            Some(Poisson::new(mean).map_err(|e| Error::InvalidInput(e.to_string()))?)
        } else {
            None
        };
        let fade = Exp::new(params.fading_rate()).map_err(|e| Error::InvalidInput(e.to_string()))?;
        let offset = if config.compensate_tail {
            truncated_interference_mean(params, radius)
        } else {
            0.0
        };
        Ok(Self {
            radius,
            offset,
            count,
            fade,
        })
    }

    fn draw<R: Rng, F: FnMut(f64, f64)>(&self, rng: &mut R, mut visit: F) -> u64 {
        let n = match &self.count {
            Some(c) => c.sample(rng) as u64,
            None => 0,
        };
        let r2 = self.radius * self.radius;
        for _ in 0..n {
            // (0, 1] keeps every point strictly away from the origin
            let u = 1.0 - rng.random::<f64>();
            let fade = self.fade.sample(rng);
            visit(r2 * u, fade);
        }
        n
    }
}

/// One PPP realization for `trial_index`, reproducible from `(seed, trial_index)`.
pub fn sample_ppp(params: &SystemParams, config: &SimConfig, trial_index: u64) -> Result<PppRealization> {
    let params = params.validate()?;
    let config = config.validate()?;
    let sampler = FieldSampler::new(&params, &config)?;
    let radius = sampler.radius;
    let mut rng = trial_rng(config.seed, trial_index);
    let mut points = Vec::new();
    sampler.draw(&mut rng, |d2, fade| {
        points.push(BsPoint {
            distance: d2.sqrt(),
            fade,
        })
    });
    Ok(PppRealization {
        points,
        window_radius: radius,
    })
}

#[derive(Debug, Clone, Default)]
struct Tally {
    hits: Vec<u64>,
    empties: u64,
}

impl Tally {
    fn zeros(n: usize) -> Self {
        Self {
            hits: vec![0; n],
            empties: 0,
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        for (a, b) in self.hits.iter_mut().zip(other.hits) {
            *a += b;
        }
        self.empties += other.empties;
        self
    }
}

fn run_trials<F>(config: &SimConfig, outputs: usize, trial: F) -> Tally
where
    F: Fn(&mut ChaCha8Rng, &mut Tally) + Sync,
{
    (0..config.trials)
        .into_par_iter()
        .fold(
            || Tally::zeros(outputs),
            |mut tally, i| {
                let mut rng = trial_rng(config.seed, i);
                trial(&mut rng, &mut tally);
                tally
            },
        )
        .reduce(|| Tally::zeros(outputs), Tally::merge)
}

fn diagnostics(params: &SystemParams, sampler: &FieldSampler, empties: u64, trials: u64) -> SimDiagnostics {
    let radius = sampler.radius;
    if empties as f64 > 1e-3 * trials as f64 {
        log::warn!("{empties} of {trials} realizations had no base station in the window and were redrawn");
    }
    if trials < 100 {
        log::warn!("only {trials} trials; confidence intervals are wide");
    }
    SimDiagnostics {
        window_radius: radius,
        truncated_interference: truncated_interference_mean(params, radius),
        truncated_interference_std: truncated_interference_std(params, radius),
        tail_compensated: sampler.offset > 0.0,
        empty_resamples: empties,
    }
}

fn finish(hits: u64, trials: u64, diag: SimDiagnostics) -> ProbabilityEstimate {
    ProbabilityEstimate {
        diagnostics: Some(diag),
        ..ProbabilityEstimate::from_counts(hits, trials)
    }
}

/// Empirical `P[SINR > T]` for a user served by its nearest base station.
/// Realizations with no base station in the window are redrawn.
pub fn estimate_coverage(
    params: &SystemParams,
    sinr_threshold: f64,
    config: &SimConfig,
) -> Result<ProbabilityEstimate> {
    let params = params.validate()?;
    let config = config.validate()?;
    if !(sinr_threshold >= 0.0) {
        return Err(ParamError::SinrThreshold(sinr_threshold).into());
    }
    let sampler = FieldSampler::new(&params, &config)?;
    let alpha = params.alpha;
    let tally = run_trials(&config, 1, |rng, tally| loop {
        let mut nearest_d2 = f64::INFINITY;
        let mut nearest_fade = 0.0;
        let mut others = sampler.offset;
        let n = sampler.draw(rng, |d2, fade| {
            if d2 < nearest_d2 {
                if nearest_d2.is_finite() {
                    others += nearest_fade * path_gain(nearest_d2, alpha);
                }
                nearest_d2 = d2;
                nearest_fade = fade;
            } else {
                others += fade * path_gain(d2, alpha);
            }
        });
        if n == 0 {
            tally.empties += 1;
            continue;
        }
        let sinr = instantaneous_sinr(nearest_fade, nearest_d2.sqrt(), others, &params)
            .unwrap_or(f64::INFINITY);
        if sinr > sinr_threshold {
            tally.hits[0] += 1;
        }
        break;
    });
    let diag = diagnostics(&params, &sampler, tally.empties, config.trials);
    Ok(finish(tally.hits[0], config.trials, diag))
}

/// Empirical `P[I(0) > level]` for each of `levels` (sorted ascending), where
/// `I(0)` is the total received power from every base station.
pub fn estimate_interference_ccdf(
    params: &SystemParams,
    levels: &[f64],
    config: &SimConfig,
) -> Result<Vec<ProbabilityEstimate>> {
    let params = params.validate()?;
    let config = config.validate()?;
    if levels.iter().any(|l| !(*l >= 0.0)) {
        return Err(Error::InvalidInput("interference levels must be nonnegative".into()));
    }
    if levels.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidInput("interference levels must be sorted".into()));
    }
    let sampler = FieldSampler::new(&params, &config)?;
    let alpha = params.alpha;
    let tally = run_trials(&config, levels.len(), |rng, tally| {
        let mut total = sampler.offset;
        sampler.draw(rng, |d2, fade| total += fade * path_gain(d2, alpha));
        // levels strictly below `total` are exceeded
        let exceeded = levels.partition_point(|&l| l < total);
        for h in &mut tally.hits[..exceeded] {
            *h += 1;
        }
    });
    let diag = diagnostics(&params, &sampler, tally.empties, config.trials);
    Ok(tally
        .hits
        .iter()
        .map(|&h| finish(h, config.trials, diag))
        .collect())
}

/// Empirical EEH probability. Each trial draws the user state (active with
/// probability ε) and compares `(1 - ρ·1(active))·I(0) + σ²` with `Θ`.
pub fn estimate_eeh(params: &SystemParams, theta: f64, config: &SimConfig) -> Result<ProbabilityEstimate> {
    let params = params.validate()?;
    let config = config.validate()?;
    if !(theta > 0.0) {
        return Err(ParamError::EehThreshold(theta).into());
    }
    let sampler = FieldSampler::new(&params, &config)?;
    let alpha = params.alpha;
    let tally = run_trials(&config, 1, |rng, tally| {
        let state = UserState::sample(rng, params.epsilon);
        let mut total = sampler.offset;
        sampler.draw(rng, |d2, fade| total += fade * path_gain(d2, alpha));
        let harvested = (1.0 - state.decoder_fraction(params.rho)) * total + params.noise;
        if harvested > theta {
            tally.hits[0] += 1;
        }
    });
    let diag = diagnostics(&params, &sampler, tally.empties, config.trials);
    Ok(finish(tally.hits[0], config.trials, diag))
}

/// Nearest base-station distance of each trial (empty windows redrawn).
pub fn sample_nearest_distances(params: &SystemParams, config: &SimConfig) -> Result<Vec<f64>> {
    let params = params.validate()?;
    let config = config.validate()?;
    let sampler = FieldSampler::new(&params, &config)?;
    Ok((0..config.trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(config.seed, i);
            loop {
                let mut nearest = f64::INFINITY;
                if sampler.draw(&mut rng, |d2, _| nearest = nearest.min(d2)) > 0 {
                    return nearest.sqrt();
                }
            }
        })
        .collect())
}
