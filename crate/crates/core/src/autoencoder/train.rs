//! Full-batch training.
//!
//! The loss is
//!
//! ```text
//! L = 1/6 · mean_s ‖W_dec (W_enc x_s + b_enc) + b_dec − x_s‖² + λ (‖W_enc‖² + ‖W_dec‖²)
//! ```
//!
//! It is quadratic in the samples, so the full-batch loss and gradient depend
//! on the data only through its mean `μ` and covariance `C`. With
//! `M = W_dec W_enc − I` and `c = W_dec b_enc + b_dec`:
//!
//! ```text
//! L = 1/6 · (tr(M C Mᵀ) + ‖M μ + c‖²) + λ (...)
//! ```
//!
//! Each epoch is therefore a handful of 6x6 products regardless of corpus size.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{PairModel, PixelPairSample, TrainConfig, INPUTS, LATENT, PARAM_COUNT};
use crate::error::{Error, Result};

const MIN_SAMPLES: usize = 64;
const STALL_EPOCHS: usize = 10;
const INIT_RANGE: f64 = 0.1;

const STEP_GROW: f64 = 1.2;
const STEP_SHRINK: f64 = 0.5;
const STEP_MAX: f64 = 1.0;
const STEP_MIN: f64 = 1e-15;

/// Sample count, mean and (population) covariance of a set of pixel pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct PairMoments {
    pub count: usize,
    pub mean: [f64; INPUTS],
    pub cov: [[f64; INPUTS]; INPUTS],
}

impl PairMoments {
    /// Two-pass accumulation in sample order.
    pub fn from_samples(samples: &[PixelPairSample]) -> Self {
        let n = samples.len().max(1) as f64;
        let mut mean = [0.0; INPUTS];
        for s in samples {
            for (m, x) in mean.iter_mut().zip(&s.0) {
                *m += x;
            }
        }
        mean = mean.map(|m| m / n);
        let mut cov = [[0.0; INPUTS]; INPUTS];
        for s in samples {
            let z: [f64; INPUTS] = std::array::from_fn(|i| s.0[i] - mean[i]);
            for i in 0..INPUTS {
                for j in i..INPUTS {
                    cov[i][j] += z[i] * z[j];
                }
            }
        }
        for i in 0..INPUTS {
            for j in i..INPUTS {
                cov[i][j] /= n;
                cov[j][i] = cov[i][j];
            }
        }
        Self {
            count: samples.len(),
            mean,
            cov,
        }
    }
}

/// Regularized loss and its gradient with respect to [`PairModel::params`].
pub fn loss_and_gradient(model: &PairModel, moments: &PairMoments, l2_lambda: f64) -> (f64, [f64; PARAM_COUNT]) {
    let (we, be, wd, bd) = (&model.w_enc, &model.b_enc, &model.w_dec, &model.b_dec);
    let mu = &moments.mean;
    let cov = &moments.cov;

    // M = W_dec W_enc − I, c = W_dec b_enc + b_dec
    let mut m = [[0.0; INPUTS]; INPUTS];
    let mut c = *bd;
    for i in 0..INPUTS {
        for j in 0..INPUTS {
            m[i][j] = (0..LATENT).map(|k| wd[i][k] * we[k][j]).sum::<f64>() - if i == j { 1.0 } else { 0.0 };
        }
        c[i] += (0..LATENT).map(|k| wd[i][k] * be[k]).sum::<f64>();
    }
    // MC and the mean residual r̄ = M μ + c
    let mut mc = [[0.0; INPUTS]; INPUTS];
    let mut rbar = c;
    for i in 0..INPUTS {
        for j in 0..INPUTS {
            mc[i][j] = (0..INPUTS).map(|k| m[i][k] * cov[k][j]).sum();
        }
        rbar[i] += (0..INPUTS).map(|k| m[i][k] * mu[k]).sum::<f64>();
    }
    let trace: f64 = (0..INPUTS)
        .map(|i| (0..INPUTS).map(|j| mc[i][j] * m[i][j]).sum::<f64>())
        .sum();
    let bias_term: f64 = rbar.iter().map(|r| r * r).sum();
    let penalty: f64 = we.iter().flatten().chain(wd.iter().flatten()).map(|w| w * w).sum();
    let inv = 1.0 / INPUTS as f64;
    let loss = inv * (trace + bias_term) + l2_lambda * penalty;

    // dL/dA for A = W_dec W_enc, and dL/dc
    let two_inv = 2.0 * inv;
    let mut ga = [[0.0; INPUTS]; INPUTS];
    for i in 0..INPUTS {
        for j in 0..INPUTS {
            ga[i][j] = two_inv * (mc[i][j] + rbar[i] * mu[j]);
        }
    }
    let gc = rbar.map(|r| two_inv * r);

    let mut g_we = [[0.0; INPUTS]; LATENT];
    let mut g_be = [0.0; LATENT];
    for k in 0..LATENT {
        for j in 0..INPUTS {
            g_we[k][j] = (0..INPUTS).map(|i| wd[i][k] * ga[i][j]).sum::<f64>() + 2.0 * l2_lambda * we[k][j];
        }
        g_be[k] = (0..INPUTS).map(|i| wd[i][k] * gc[i]).sum();
    }
    let mut g_wd = [[0.0; LATENT]; INPUTS];
    for i in 0..INPUTS {
        for k in 0..LATENT {
            g_wd[i][k] = (0..INPUTS).map(|j| ga[i][j] * we[k][j]).sum::<f64>() + gc[i] * be[k] + 2.0 * l2_lambda * wd[i][k];
        }
    }
    let grad = PairModel {
        w_enc: g_we,
        b_enc: g_be,
        w_dec: g_wd,
        b_dec: gc,
        ..PairModel::default()
    }
    .params();
    (loss, grad)
}

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub model: PairModel,
    /// Loss evaluated at the start of each epoch.
    pub loss_history: Vec<f64>,
    /// True when training stopped on the convergence criterion rather than the epoch cap.
    pub converged: bool,
}

/// Full-batch gradient descent with per-parameter adaptive steps (iRprop−).
///
/// Every parameter starts with step `learning_rate`; the step grows while
/// its gradient keeps its sign and halves when the sign flips.
///
/// Stops after `max_epochs` or once the relative loss improvement stays
/// below `convergence_tol` for 10 consecutive epochs.
pub fn train(samples: &[PixelPairSample], cfg: &TrainConfig) -> Result<TrainOutcome> {
    cfg.validate()?;
    if samples.len() < MIN_SAMPLES {
        return Err(Error::InsufficientData(format!(
            "{} pixel pairs, training needs at least {MIN_SAMPLES}",
            samples.len()
        )));
    }
    let moments = PairMoments::from_samples(samples);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut params: [f64; PARAM_COUNT] = std::array::from_fn(|_| rng.gen_range(-INIT_RANGE..=INIT_RANGE));
    let mut model = PairModel::from_params(&params, PairModel::default().norm_scale);

    let mut steps = [cfg.learning_rate; PARAM_COUNT];
    let mut prev_grad = [0.0; PARAM_COUNT];
    let mut history = Vec::new();
    let mut stalled = 0;
    let mut converged = false;

    for epoch in 1..=cfg.max_epochs {
        model.set_params(&params);
        let (loss, grad) = loss_and_gradient(&model, &moments, cfg.l2_lambda);
        if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::Diverged { epoch });
        }
        if let Some(&prev) = history.last() {
            let improvement = (prev - loss) / f64::abs(prev).max(f64::MIN_POSITIVE);
            stalled = if improvement < cfg.convergence_tol { stalled + 1 } else { 0 };
        }
        history.push(loss);
        if stalled >= STALL_EPOCHS {
            converged = true;
            break;
        }
        if epoch == cfg.max_epochs {
            break;
        }
        for i in 0..PARAM_COUNT {
            let mut g = grad[i];
            let agreement = g * prev_grad[i];
            if agreement > 0.0 {
                steps[i] = (steps[i] * STEP_GROW).min(STEP_MAX);
            } else if agreement < 0.0 {
                steps[i] = (steps[i] * STEP_SHRINK).max(STEP_MIN);
                g = 0.0;
            }
            if g != 0.0 {
                params[i] -= g.signum() * steps[i];
            }
            prev_grad[i] = g;
        }
    }

    Ok(TrainOutcome {
        model,
        loss_history: history,
        converged,
    })
}
