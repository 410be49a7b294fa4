//! Linear epsilon-insensitive SVR trained in the primal.
//!
//! Objective on standardized features and centered target:
//!
//! ```text
//! (lambda/2)*||w||^2 + (1/n) * sum_i max(0, |y_i - (w.x_i + b)| - epsilon)
//! ```
//!
//! minimized by seeded-shuffle stochastic subgradient descent with step
//! `eta_t = eta0 / (1 + lambda*eta0*t)`. The returned weights are the average
//! of the iterates over the final half of training, which stabilizes
//! subgradient methods. The stored bias absorbs the target re-centering, so
//! prediction is a plain affine map over standardized features.

use serde_json::json;

use crate::dataset::{Dataset, Scaler};
use crate::error::{Error, Result};
use crate::models::{Payload, PredictorModel, TrainMeta};
use crate::rng;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct SvrPayload<F> {
    pub weights: Vec<F>,
    pub bias: F,
    pub epsilon: F,
    pub lambda: F,
}

#[derive(Debug, Clone, Copy)]
pub struct SvrParams<F> {
    pub epsilon: F,
    pub lambda: F,
    pub epochs: usize,
    pub eta0: F,
    pub seed: u64,
}

impl<F: Real> Default for SvrParams<F> {
    fn default() -> Self {
        SvrParams {
            epsilon: F::from_f64(0.01),
            lambda: F::from_f64(1e-4),
            epochs: 200,
            eta0: F::from_f64(0.1),
            seed: 0,
        }
    }
}

impl<F: Real> SvrParams<F> {
    fn validate(&self) -> Result<()> {
        if !(self.epsilon >= F::zero()) {
            return Err(Error::data("svr epsilon must be >= 0"));
        }
        if !(self.lambda > F::zero()) {
            return Err(Error::data("svr lambda must be > 0"));
        }
        if self.epochs == 0 {
            return Err(Error::data("svr epochs must be >= 1"));
        }
        if !(self.eta0 > F::zero()) {
            return Err(Error::data("svr eta0 must be > 0"));
        }
        Ok(())
    }
}

fn objective<F: Real>(z: &[Vec<F>], yc: &[F], w: &[F], b: F, epsilon: F, lambda: F) -> F {
    let two = F::from_f64(2.0);
    let reg = lambda / two * w.iter().fold(F::zero(), |acc, &wi| acc + wi * wi);
    let n = F::from_usize(z.len()).unwrap();
    let loss = z
        .iter()
        .zip(yc)
        .fold(F::zero(), |acc, (row, &y)| {
            let f = w.iter().zip(row).fold(F::zero(), |a, (&wi, &xi)| a + wi * xi) + b;
            acc + ((y - f).abs() - epsilon).max(F::zero())
        })
        / n;
    reg + loss
}

pub fn fit_svr<F: Real>(train: &Dataset<F>, params: SvrParams<F>) -> Result<PredictorModel<F>> {
    fit_svr_traced(train, params).map(|(model, _)| model)
}

/// Like `fit_svr` but also returns the epoch-end objective values, which the
/// property tests inspect.
pub fn fit_svr_traced<F: Real>(
    train: &Dataset<F>,
    params: SvrParams<F>,
) -> Result<(PredictorModel<F>, Vec<F>)> {
    params.validate()?;
    if train.is_empty() {
        return Err(Error::EmptyDataset { context: "fit_svr".into() });
    }
    let scaler = Scaler::fit(train)?;
    let raw: Vec<Vec<F>> = train.feature_matrix().iter().map(|r| r.to_vec()).collect();
    let z = scaler.transform(&raw)?;
    let y = train.targets();
    let n = y.len();
    let p = z[0].len();
    let y_mean = y.iter().fold(F::zero(), |a, &v| a + v) / F::from_usize(n).unwrap();
    let yc: Vec<F> = y.iter().map(|&v| v - y_mean).collect();

    let mut w = vec![F::zero(); p];
    let mut b = F::zero();
    let mut rng = rng::root_stream(params.seed);
    let mut order: Vec<usize> = (0..n).collect();

    let total_steps = params.epochs * n;
    let avg_from = total_steps / 2; // iterates with step index > avg_from are averaged
    let mut acc_w = vec![F::zero(); p];
    let mut acc_b = F::zero();
    let mut acc_count = 0usize;

    let mut trace = Vec::with_capacity(params.epochs);
    let mut step = 0usize;
    for _epoch in 0..params.epochs {
        rng::shuffle(&mut order, &mut rng);
        for &i in &order {
            let eta = params.eta0
                / (F::one() + params.lambda * params.eta0 * F::from_usize(step).unwrap());
            let row = &z[i];
            let f = w.iter().zip(row).fold(F::zero(), |a, (&wi, &xi)| a + wi * xi) + b;
            let r = yc[i] - f;
            let g = if r.abs() > params.epsilon {
                if r > F::zero() {
                    F::one()
                } else {
                    -F::one()
                }
            } else {
                F::zero()
            };
            for (wj, &xj) in w.iter_mut().zip(row) {
                *wj = *wj - eta * (params.lambda * *wj - g * xj);
            }
            b = b + eta * g;
            step += 1;
            if step > avg_from {
                for (aj, &wj) in acc_w.iter_mut().zip(&w) {
                    *aj = *aj + wj;
                }
                acc_b = acc_b + b;
                acc_count += 1;
            }
        }
        let obj = objective(&z, &yc, &w, b, params.epsilon, params.lambda);
        if !obj.is_finite() {
            return Err(Error::numeric(format!("svr objective became {obj} during training")));
        }
        trace.push(obj);
    }

    let count = F::from_usize(acc_count).unwrap();
    let weights: Vec<F> = acc_w.into_iter().map(|a| a / count).collect();
    let bias = acc_b / count + y_mean;

    let payload = SvrPayload { weights, bias, epsilon: params.epsilon, lambda: params.lambda };
    let meta = TrainMeta {
        seed: params.seed,
        hyperparameters: json!({
            "epsilon": params.epsilon.as_f64(),
            "lambda": params.lambda.as_f64(),
            "epochs": params.epochs,
            "eta0": params.eta0.as_f64(),
        }),
        dataset_fingerprint: train.fingerprint(),
        normalized: train.normalized(),
        ridge_fallback: false,
    };
    let model = PredictorModel::new(
        crate::dataset::feature_names_vec(),
        Some(scaler),
        Payload::Svr(payload),
        meta,
    )?;
    Ok((model, trace))
}
