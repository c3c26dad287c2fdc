//! Random gradient descent: perturb randomly until the loss improves, then
//! walk along that displacement until it stops improving.
//!
//! Also fits the parametric Zipf family to a rank/frequency table.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::math::ln;
use crate::zipf::ZipfParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RgdConfig {
    pub lr: f64,
    pub branch_n: usize,
    /// Budget on loss evaluations after the initial one. A round that starts
    /// under budget may overrun it by at most `branch_n`.
    pub max_steps: usize,
    /// Consecutive rounds without an improving branch before giving up; 0 never gives up.
    pub max_attempts: usize,
    pub max_flat: usize,
    pub seed: u64,
}

impl Default for RgdConfig {
    fn default() -> Self {
        Self { lr: 0.01, branch_n: 10, max_steps: 10_000, max_attempts: 10, max_flat: 20, seed: 0 }
    }
}

impl RgdConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lr.is_finite() && self.lr > 0.0) {
            return Err(Error::InvalidArgument("lr must be finite and > 0"));
        }
        if self.branch_n == 0 {
            return Err(Error::InvalidArgument("branch_n must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RgdResult {
    pub args: Vec<f64>,
    pub loss: f64,
    /// Step count in the reference accounting: `branch_n` per branching round
    /// plus improving and flat steps that led to an improvement.
    pub steps: usize,
    /// Loss evaluations, excluding the one at the initial point.
    pub evaluations: usize,
    /// Current loss at the start and after every round.
    pub history: Vec<f64>,
}

/// Best perturbation found by [`get_best_branch`].
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub args: Vec<f64>,
    pub direction: Vec<f64>,
    pub loss: f64,
}

/// NaN compares as worse than anything.
fn sanitize(loss: f64) -> f64 {
    if loss.is_nan() {
        f64::INFINITY
    } else {
        loss
    }
}

/// Samples `branch_n` perturbations of `args` (each coordinate moved by
/// `lr * u * max(1, |x|)`, `u` uniform in `[-1, 1]`) and returns the one with
/// the lowest loss if it is strictly below `current_loss`. Ties go to the
/// earlier branch.
pub fn get_best_branch<F, R>(
    args: &[f64],
    current_loss: f64,
    loss_fn: &F,
    lr: f64,
    branch_n: usize,
    rng: &mut R,
) -> Option<Branch>
where
    F: Fn(&[f64]) -> f64,
    R: Rng + ?Sized,
{
    let mut best: Option<Branch> = None;
    for _ in 0..branch_n {
        let direction: Vec<f64> = args
            .iter()
            .map(|&x| lr * rng.random_range(-1.0..=1.0) * x.abs().max(1.0))
            .collect();
        let candidate: Vec<f64> = args.iter().zip(&direction).map(|(x, d)| x + d).collect();
        let loss = sanitize(loss_fn(&candidate));
        if best.as_ref().is_none_or(|b| loss < b.loss) {
            best = Some(Branch { args: candidate, direction, loss });
        }
    }
    best.filter(|b| b.loss < current_loss)
}

/// Outcome of [`follow_grad`].
#[derive(Debug, Clone, PartialEq)]
pub struct Walk {
    pub args: Vec<f64>,
    /// Improving steps plus the flat steps that preceded each of them.
    pub steps: usize,
    pub loss: f64,
    pub evaluations: usize,
}

/// Repeats `direction` from `args` while the loss does not increase.
///
/// Equal-loss steps move the probe forward without accepting it; the walk
/// ends at the first increase or after `max_flat` consecutive flat steps and
/// returns the best point visited.
pub fn follow_grad<F>(args: &[f64], direction: &[f64], loss_fn: &F, max_flat: usize) -> Walk
where
    F: Fn(&[f64]) -> f64,
{
    let loss = sanitize(loss_fn(args));
    let mut walk = walk_from(args, loss, direction, loss_fn, max_flat, usize::MAX);
    walk.evaluations += 1;
    walk
}

fn walk_from<F>(args: &[f64], loss: f64, direction: &[f64], loss_fn: &F, max_flat: usize, max_evals: usize) -> Walk
where
    F: Fn(&[f64]) -> f64,
{
    let mut best = args.to_vec();
    let mut probe = args.to_vec();
    let mut cur_loss = loss;
    let mut n_flat = 0;
    let mut steps = 0;
    let mut evaluations = 0;
    while evaluations < max_evals {
        for (p, d) in probe.iter_mut().zip(direction) {
            *p += d;
        }
        let new_loss = sanitize(loss_fn(&probe));
        evaluations += 1;
        if new_loss > cur_loss {
            break;
        } else if new_loss == cur_loss {
            n_flat += 1;
            if n_flat >= max_flat {
                break;
            }
        } else {
            steps += 1 + n_flat;
            n_flat = 0;
            best.copy_from_slice(&probe);
            cur_loss = new_loss;
        }
    }
    Walk { args: best, steps, loss: cur_loss, evaluations }
}

/// Minimises `loss_fn` from `initial`. Never returns a loss above the initial one.
pub fn rgd<F>(initial: &[f64], loss_fn: F, cfg: &RgdConfig) -> Result<RgdResult>
where
    F: Fn(&[f64]) -> f64,
{
    cfg.validate()?;
    let initial_loss = loss_fn(initial);
    if !initial_loss.is_finite() {
        return Err(Error::NonFiniteInitialLoss);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut args = initial.to_vec();
    let mut loss = initial_loss;
    let mut steps = 0;
    let mut evaluations = 0;
    let mut n_failed = 0;
    let mut history = alloc::vec![loss];
    while evaluations < cfg.max_steps {
        steps += cfg.branch_n;
        evaluations += cfg.branch_n;
        match get_best_branch(&args, loss, &loss_fn, cfg.lr, cfg.branch_n, &mut rng) {
            None => {
                n_failed += 1;
                history.push(loss);
                if cfg.max_attempts > 0 && n_failed >= cfg.max_attempts {
                    break;
                }
            }
            Some(branch) => {
                n_failed = 0;
                let budget = cfg.max_steps.saturating_sub(evaluations);
                let walk = walk_from(&branch.args, branch.loss, &branch.direction, &loss_fn, cfg.max_flat, budget);
                steps += walk.steps;
                evaluations += walk.evaluations;
                args = walk.args;
                loss = walk.loss;
                history.push(loss);
            }
        }
    }
    Ok(RgdResult { args, loss, steps, evaluations, history })
}

/// Mean squared error in log space between the family and `(n, rank, frequency)` rows.
/// Parameters outside the family's valid region score `+inf`.
pub fn zipf_fit_loss(params: &ZipfParams, table: &[(usize, usize, f64)]) -> f64 {
    if params.validate().is_err() || table.is_empty() {
        return f64::INFINITY;
    }
    let mut sum = 0.0;
    for &(n, rank, freq) in table {
        let fitted = params.frequency(n as f64, rank as f64);
        if !(fitted > 0.0 && fitted.is_finite()) {
            return f64::INFINITY;
        }
        let diff = ln(fitted) - ln(freq);
        sum += diff * diff;
    }
    sum / table.len() as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZipfFit {
    pub params: ZipfParams,
    pub initial_loss: f64,
    pub loss: f64,
    pub result: RgdResult,
}

/// Fits [`ZipfParams`] to an empirical table, starting from the default constants.
pub fn fit_zipf_params(table: &[(usize, usize, f64)], cfg: &RgdConfig) -> Result<ZipfFit> {
    if table.is_empty() {
        return Err(Error::EmptyTable);
    }
    if table.iter().any(|&(n, rank, f)| n == 0 || rank == 0 || !(f > 0.0 && f.is_finite())) {
        return Err(Error::InvalidArgument("table rows need n >= 1, rank >= 1 and a positive finite frequency"));
    }
    let mut lengths: Vec<usize> = table.iter().map(|r| r.0).collect();
    lengths.sort_unstable();
    lengths.dedup();
    if let Some(&n) = lengths.iter().find(|&&n| !table.iter().any(|r| r.0 == n && r.1 == 1)) {
        return Err(Error::MissingRankOne(n));
    }

    let loss = |v: &[f64]| ZipfParams::from_slice(v).map_or(f64::INFINITY, |p| zipf_fit_loss(&p, table));
    let start = ZipfParams::default().to_array();
    let initial_loss = loss(&start);
    let result = rgd(&start, loss, cfg)?;
    Ok(ZipfFit { params: ZipfParams::from_slice(&result.args)?, initial_loss, loss: result.loss, result })
}
