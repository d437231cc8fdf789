//! Response-surface parameter tuning.
//!
//! The tuner works in coded units over three factors (population size,
//! crossover rate, mutation rate). Each region runs a 2-level full
//! factorial with center replicates, fits a first-order model and applies
//! a curvature test against the center-replicate standard error. Without
//! curvature it walks the steepest-descent direction until the response
//! worsens and recenters the region there; with curvature it augments to a
//! face-centered design, fits a second-order model and reports the
//! stationary point with a confirmation run.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics;
use crate::model::ProblemInstance;
use crate::nsga2::{run_nsga2, NsgaConfig};
use crate::parallel;
use crate::population::SolveError;

#[derive(Debug, Error)]
pub enum RsmError {
    #[error("design has {points} points but {responses} responses were given")]
    Mismatch { points: usize, responses: usize },
    #[error("need at least {need} design points for this fit, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("singular design matrix")]
    SingularDesign,
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// One tunable factor: the current low/high experimental levels plus hard
/// validity bounds the tuner may never leave.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorSpec {
    pub name: String,
    pub low: f64,
    pub high: f64,
    pub min_valid: f64,
    pub max_valid: f64,
}

impl FactorSpec {
    pub fn new(name: impl Into<String>, low: f64, high: f64) -> Self {
        assert!(low < high, "factor levels must satisfy low < high");
        FactorSpec {
            name: name.into(),
            low,
            high,
            min_valid: f64::NEG_INFINITY,
            max_valid: f64::INFINITY,
        }
    }

    pub fn with_bounds(mut self, min_valid: f64, max_valid: f64) -> Self {
        self.min_valid = min_valid;
        self.max_valid = max_valid;
        self
    }

    pub fn center(&self) -> f64 {
        (self.low + self.high) / 2.0
    }

    pub fn half_range(&self) -> f64 {
        (self.high - self.low) / 2.0
    }

    /// Coded-to-natural: `center + coded * half_range`, clamped to the
    /// validity bounds.
    pub fn decode(&self, coded: f64) -> f64 {
        (self.center() + coded * self.half_range()).clamp(self.min_valid, self.max_valid)
    }

    /// Same half-range around a new center, shifted to stay inside the
    /// validity bounds.
    pub fn recentered(&self, center: f64) -> FactorSpec {
        let h = self.half_range();
        let c = if self.min_valid + h <= self.max_valid - h {
            center.clamp(self.min_valid + h, self.max_valid - h)
        } else {
            (self.min_valid + self.max_valid) / 2.0
        };
        FactorSpec { low: c - h, high: c + h, ..self.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignPoint {
    pub coded: [f64; 3],
    pub natural: [f64; 3],
}

fn design_point(factors: &[FactorSpec; 3], coded: [f64; 3]) -> DesignPoint {
    let natural = [
        factors[0].decode(coded[0]),
        factors[1].decode(coded[1]),
        factors[2].decode(coded[2]),
    ];
    DesignPoint { coded, natural }
}

/// Full 2-level factorial over three factors: 8 corner points at coded
/// levels +/-1 plus `center_replicates` center points (13 runs with 5).
pub fn factorial_design(factors: &[FactorSpec; 3], center_replicates: usize) -> Vec<DesignPoint> {
    let mut points = Vec::with_capacity(8 + center_replicates);
    for k in 0..8u32 {
        let coded = [
            if k & 1 == 1 { 1.0 } else { -1.0 },
            if k & 2 == 2 { 1.0 } else { -1.0 },
            if k & 4 == 4 { 1.0 } else { -1.0 },
        ];
        points.push(design_point(factors, coded));
    }
    for _ in 0..center_replicates {
        points.push(design_point(factors, [0.0; 3]));
    }
    points
}

/// Face-centered augmentation: the factorial corners, one axial point at
/// +/-1 on each axis, and center replicates.
pub fn face_centered_design(factors: &[FactorSpec; 3], center_replicates: usize) -> Vec<DesignPoint> {
    let mut points = factorial_design(factors, 0);
    for axis in 0..3 {
        for sign in [-1.0, 1.0] {
            let mut coded = [0.0; 3];
            coded[axis] = sign;
            points.push(design_point(factors, coded));
        }
    }
    for _ in 0..center_replicates {
        points.push(design_point(factors, [0.0; 3]));
    }
    points
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirstOrderFit {
    /// `[intercept, beta_1, beta_2, beta_3]` in coded units.
    pub coefficients: [f64; 4],
    pub curvature: bool,
    pub corner_mean: f64,
    pub center_mean: Option<f64>,
    pub center_std_error: Option<f64>,
}

/// Least-squares first-order fit in coded units plus the curvature test:
/// flagged when `|corner mean - center mean|` exceeds
/// `threshold_multiplier` times the center-replicate standard error.
pub fn fit_first_order(
    points: &[DesignPoint],
    responses: &[f64],
    threshold_multiplier: f64,
) -> Result<FirstOrderFit, RsmError> {
    if points.len() != responses.len() {
        return Err(RsmError::Mismatch { points: points.len(), responses: responses.len() });
    }
    if points.len() < 4 {
        return Err(RsmError::TooFewPoints { need: 4, got: points.len() });
    }
    let rows: Vec<[f64; 4]> =
        points.iter().map(|p| [1.0, p.coded[0], p.coded[1], p.coded[2]]).collect();
    let beta = least_squares::<4>(&rows, responses)?;

    let is_corner = |p: &DesignPoint| p.coded.iter().all(|c| c.abs() == 1.0);
    let is_center = |p: &DesignPoint| p.coded.iter().all(|&c| c == 0.0);
    let corners: Vec<f64> = points
        .iter()
        .zip(responses)
        .filter(|(p, _)| is_corner(p))
        .map(|(_, &y)| y)
        .collect();
    let centers: Vec<f64> = points
        .iter()
        .zip(responses)
        .filter(|(p, _)| is_center(p))
        .map(|(_, &y)| y)
        .collect();
    let corner_mean = mean(&corners);
    let (center_mean, center_std_error, curvature) = if centers.len() >= 2 {
        let m = mean(&centers);
        let var =
            centers.iter().map(|y| (y - m) * (y - m)).sum::<f64>() / (centers.len() - 1) as f64;
        let se = (var / centers.len() as f64).sqrt();
        let flag = !corners.is_empty() && (corner_mean - m).abs() > threshold_multiplier * se;
        (Some(m), Some(se), flag)
    } else {
        (None, None, false)
    };
    Ok(FirstOrderFit { coefficients: beta, curvature, corner_mean, center_mean, center_std_error })
}

/// One steepest-descent move of `step` coded units along the direction of
/// maximum response decrease, decoded to natural (clamped) levels. `None`
/// when the fitted gradient is zero.
pub fn steepest_descent_step(
    fit: &FirstOrderFit,
    factors: &[FactorSpec; 3],
    step: f64,
) -> Option<[f64; 3]> {
    let g = [fit.coefficients[1], fit.coefficients[2], fit.coefficients[3]];
    let norm = (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt();
    if norm == 0.0 {
        return None;
    }
    let mut levels = [0.0; 3];
    for i in 0..3 {
        levels[i] = factors[i].decode(-step * g[i] / norm);
    }
    Some(levels)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondOrderFit {
    /// `[1, x1, x2, x3, x1^2, x2^2, x3^2, x1x2, x1x3, x2x3]` coefficients.
    pub coefficients: [f64; 10],
    /// Stationary point of the quadratic in coded units, if the Hessian
    /// is invertible.
    pub stationary_coded: Option<[f64; 3]>,
}

pub fn fit_second_order(
    points: &[DesignPoint],
    responses: &[f64],
) -> Result<SecondOrderFit, RsmError> {
    if points.len() != responses.len() {
        return Err(RsmError::Mismatch { points: points.len(), responses: responses.len() });
    }
    if points.len() < 10 {
        return Err(RsmError::TooFewPoints { need: 10, got: points.len() });
    }
    let rows: Vec<[f64; 10]> = points
        .iter()
        .map(|p| {
            let [a, b, c] = p.coded;
            [1.0, a, b, c, a * a, b * b, c * c, a * b, a * c, b * c]
        })
        .collect();
    let beta = least_squares::<10>(&rows, responses)?;
    // gradient zero: b + 2 A x = 0 with A the symmetric quadratic form
    let a = [
        [2.0 * beta[4], beta[7], beta[8]],
        [beta[7], 2.0 * beta[5], beta[9]],
        [beta[8], beta[9], 2.0 * beta[6]],
    ];
    let rhs = [-beta[1], -beta[2], -beta[3]];
    let stationary_coded = solve3(a, rhs);
    Ok(SecondOrderFit { coefficients: beta, stationary_coded })
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Normal-equation least squares for a fixed column count.
fn least_squares<const K: usize>(rows: &[[f64; K]], y: &[f64]) -> Result<[f64; K], RsmError> {
    let mut ata = [[0.0f64; K]; K];
    let mut aty = [0.0f64; K];
    for (row, &resp) in rows.iter().zip(y) {
        for i in 0..K {
            aty[i] += row[i] * resp;
            for j in 0..K {
                ata[i][j] += row[i] * row[j];
            }
        }
    }
    gauss_solve(&mut ata, &mut aty).ok_or(RsmError::SingularDesign)?;
    Ok(aty)
}

/// In-place Gaussian elimination with partial pivoting; solution lands in `b`.
fn gauss_solve<const K: usize>(a: &mut [[f64; K]; K], b: &mut [f64; K]) -> Option<()> {
    for col in 0..K {
        let pivot = (col..K).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in (col + 1)..K {
            let factor = a[row][col] / a[col][col];
            for k in col..K {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    for col in (0..K).rev() {
        let mut sum = b[col];
        for k in (col + 1)..K {
            sum -= a[col][k] * b[k];
        }
        b[col] = sum / a[col][col];
    }
    Some(())
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    gauss_solve(&mut a, &mut b)?;
    Some(b)
}

/// Deterministic replicate seeds from (master, point index, replicate).
pub fn derive_seed(master: u64, point: u64, replicate: u64) -> u64 {
    fn splitmix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    splitmix(master ^ splitmix(point.wrapping_mul(2).wrapping_add(1) ^ splitmix(replicate)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TuneResponse {
    /// Front diversity; lower is treated as better.
    Diversity,
    /// Best (minimum) first objective on the front.
    BestObj1,
    /// Negated front spacing, so that minimizing prefers higher spacing.
    Spacing,
}

impl TuneResponse {
    pub fn as_str(&self) -> &'static str {
        match self {
            TuneResponse::Diversity => "diversity",
            TuneResponse::BestObj1 => "obj1",
            TuneResponse::Spacing => "spacing",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "diversity" => Some(TuneResponse::Diversity),
            "obj1" => Some(TuneResponse::BestObj1),
            "spacing" => Some(TuneResponse::Spacing),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TunerOptions {
    pub replicates: usize,
    pub center_replicates: usize,
    pub curvature_multiplier: f64,
    /// Coded-unit step for the descent walk.
    pub step_size: f64,
    pub max_steps: usize,
    pub max_region_moves: usize,
    pub seed: u64,
}

impl Default for TunerOptions {
    fn default() -> Self {
        TunerOptions {
            replicates: 10,
            center_replicates: 5,
            curvature_multiplier: 2.0,
            step_size: 1.0,
            max_steps: 10,
            max_region_moves: 5,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionLog {
    pub factors: [FactorSpec; 3],
    pub design: Vec<DesignPoint>,
    pub mean_responses: Vec<f64>,
    pub fit: FirstOrderFit,
    /// Accepted descent points (natural levels, mean response).
    pub descent_path: Vec<([f64; 3], f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondOrderSummary {
    pub coefficients: [f64; 10],
    pub stationary_natural: Option<[f64; 3]>,
    pub confirmation_levels: [f64; 3],
    pub confirmation_response: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneReport {
    pub regions: Vec<RegionLog>,
    pub second_order: Option<SecondOrderSummary>,
    pub recommended_levels: [f64; 3],
    pub recommended_response: f64,
}

/// Runs the full tuning procedure against an arbitrary response function
/// `response(natural_levels, seed) -> scalar` (lower is better). Design
/// points are evaluated in parallel; every replicate seed derives from
/// (master seed, point index, replicate index).
pub fn tune_with<F>(
    mut factors: [FactorSpec; 3],
    options: &TunerOptions,
    response: F,
) -> Result<TuneReport, RsmError>
where
    F: Fn(&[f64; 3], u64) -> f64 + Sync,
{
    let mean_at = |points: &[DesignPoint]| -> Vec<f64> {
        let indexed: Vec<(usize, [f64; 3])> =
            points.iter().enumerate().map(|(i, p)| (i, p.natural)).collect();
        parallel::map_slice(&indexed, |(index, natural)| {
            let total: f64 = (0..options.replicates)
                .map(|rep| response(natural, derive_seed(options.seed, *index as u64, rep as u64)))
                .sum();
            total / options.replicates.max(1) as f64
        })
    };

    let mut regions = Vec::new();
    let mut best: Option<([f64; 3], f64)> = None;
    let consider = |levels: [f64; 3], value: f64, best: &mut Option<([f64; 3], f64)>| {
        if best.map_or(true, |(_, b)| value < b) {
            *best = Some((levels, value));
        }
    };

    for _ in 0..options.max_region_moves {
        let design = factorial_design(&factors, options.center_replicates);
        let means = mean_at(&design);
        for (point, &value) in design.iter().zip(&means) {
            consider(point.natural, value, &mut best);
        }
        let fit = fit_first_order(&design, &means, options.curvature_multiplier)?;

        if fit.curvature {
            let augmented = face_centered_design(&factors, options.center_replicates);
            let aug_means = mean_at(&augmented);
            for (point, &value) in augmented.iter().zip(&aug_means) {
                consider(point.natural, value, &mut best);
            }
            let second = fit_second_order(&augmented, &aug_means)?;
            let confirmation_levels = match second.stationary_coded {
                Some(coded) => {
                    let clamped = coded.map(|c| c.clamp(-1.0, 1.0));
                    [
                        factors[0].decode(clamped[0]),
                        factors[1].decode(clamped[1]),
                        factors[2].decode(clamped[2]),
                    ]
                }
                None => [factors[0].center(), factors[1].center(), factors[2].center()],
            };
            let confirmation = mean_at(&[DesignPoint {
                coded: [0.0; 3],
                natural: confirmation_levels,
            }])[0];
            consider(confirmation_levels, confirmation, &mut best);
            let stationary_natural = second.stationary_coded.map(|coded| {
                let clamped = coded.map(|c| c.clamp(-1.0, 1.0));
                [
                    factors[0].decode(clamped[0]),
                    factors[1].decode(clamped[1]),
                    factors[2].decode(clamped[2]),
                ]
            });
            regions.push(RegionLog {
                factors: factors.clone(),
                design,
                mean_responses: means,
                fit: fit.clone(),
                descent_path: Vec::new(),
            });
            let (levels, value) = best.expect("at least one design point was evaluated");
            return Ok(TuneReport {
                regions,
                second_order: Some(SecondOrderSummary {
                    coefficients: second.coefficients,
                    stationary_natural,
                    confirmation_levels,
                    confirmation_response: confirmation,
                }),
                recommended_levels: levels,
                recommended_response: value,
            });
        }

        // descent: walk while the response keeps improving
        let mut path: Vec<([f64; 3], f64)> = Vec::new();
        let center_levels = [factors[0].center(), factors[1].center(), factors[2].center()];
        let mut current = (
            center_levels,
            mean_at(&[DesignPoint { coded: [0.0; 3], natural: center_levels }])[0],
        );
        consider(current.0, current.1, &mut best);
        for k in 1..=options.max_steps {
            let Some(levels) = steepest_descent_step(&fit, &factors, k as f64 * options.step_size)
            else {
                break;
            };
            if levels == current.0 {
                break; // clamped into place
            }
            let value = mean_at(&[DesignPoint { coded: [0.0; 3], natural: levels }])[0];
            if value >= current.1 {
                break;
            }
            current = (levels, value);
            consider(levels, value, &mut best);
            path.push((levels, value));
        }
        let moved = !path.is_empty();
        regions.push(RegionLog {
            factors: factors.clone(),
            design,
            mean_responses: means,
            fit,
            descent_path: path,
        });
        if !moved {
            break;
        }
        factors = [
            factors[0].recentered(current.0[0]),
            factors[1].recentered(current.0[1]),
            factors[2].recentered(current.0[2]),
        ];
    }

    let (levels, value) = best.expect("at least one design point was evaluated");
    Ok(TuneReport {
        regions,
        second_order: None,
        recommended_levels: levels,
        recommended_response: value,
    })
}

/// Factor specs for NSGA-II tuning: population size, crossover rate and
/// mutation rate at their customary initial levels.
pub fn default_nsga_factors() -> [FactorSpec; 3] {
    [
        FactorSpec::new("population_size", 30.0, 50.0).with_bounds(4.0, f64::INFINITY),
        FactorSpec::new("crossover_rate", 0.60, 0.70).with_bounds(0.0, 1.0),
        FactorSpec::new("mutation_rate", 0.15, 0.25).with_bounds(0.0, 1.0),
    ]
}

/// Turns natural tuner levels into a runnable NSGA-II config.
pub fn nsga_config_at(base: &NsgaConfig, levels: &[f64; 3], seed: u64) -> NsgaConfig {
    let mut population = levels[0].round().max(4.0) as usize;
    if population % 2 == 1 {
        population += 1;
    }
    NsgaConfig {
        population_size: population,
        crossover_rate: levels[1].clamp(0.0, 1.0),
        mutation_rate: levels[2].clamp(0.0, 1.0),
        seed,
        ..base.clone()
    }
}

/// Tunes NSGA-II on an instance: the response of one replicate is the
/// chosen scalar of the final archive (lower is better under the adopted
/// comparison directions).
pub fn tune_nsga2(
    instance: &ProblemInstance,
    base: &NsgaConfig,
    response: TuneResponse,
    factors: [FactorSpec; 3],
    options: &TunerOptions,
) -> Result<TuneReport, RsmError> {
    tune_with(factors, options, |levels, seed| {
        let config = nsga_config_at(base, levels, seed);
        match run_nsga2(instance, &config) {
            Ok(archive) => {
                let front = archive.objectives();
                match response {
                    TuneResponse::Diversity => metrics::diversity(&front),
                    TuneResponse::BestObj1 => front
                        .iter()
                        .map(|v| v.obj1)
                        .fold(f64::INFINITY, f64::min),
                    TuneResponse::Spacing => metrics::spacing(&front).map_or(0.0, |s| -s),
                }
            }
            // an invalid point inside the region counts as a terrible response
            Err(_) => f64::INFINITY,
        }
    })
}
