//! Ordinary least squares via Householder QR.

use serde_json::json;

use crate::dataset::{Dataset, Scaler};
use crate::error::{Error, Result};
use crate::models::{ModelKind, Payload, PredictorModel, TrainMeta};
use crate::scalar::Real;

/// Coefficients live in standardized feature space; `raw_coefficients`
/// converts them back.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearPayload<F> {
    pub intercept: F,
    pub coefficients: Vec<F>,
}

/// Relative threshold on the R diagonal below which the design is treated as
/// rank-deficient, and the ridge penalty used for the fallback refit.
const RANK_TOLERANCE: f64 = 1e-10;
const RIDGE_PENALTY: f64 = 1e-8;

/// Dense row-major matrix, only as big as a design matrix needs to be.
struct Mat<F> {
    data: Vec<F>,
    rows: usize,
    cols: usize,
}

impl<F: Real> Mat<F> {
    fn zeros(rows: usize, cols: usize) -> Self {
        Mat { data: vec![F::zero(); rows * cols], rows, cols }
    }

    fn at(&self, r: usize, c: usize) -> F {
        self.data[r * self.cols + c]
    }

    fn set(&mut self, r: usize, c: usize, v: F) {
        self.data[r * self.cols + c] = v;
    }
}

/// Solve min ||a x - y||^2 by Householder QR. Returns the solution and
/// whether the R diagonal flagged rank deficiency (the returned solution is
/// still the QR solve; callers decide how to react).
fn qr_least_squares<F: Real>(a: &mut Mat<F>, y: &mut [F]) -> Result<(Vec<F>, bool)> {
    let (n, m) = (a.rows, a.cols);
    assert!(n >= m, "least squares needs at least as many rows as columns");
    let mut v = vec![F::zero(); n];

    for k in 0..m {
        let mut norm_sq = F::zero();
        for i in k..n {
            let x = a.at(i, k);
            norm_sq = norm_sq + x * x;
        }
        let norm = norm_sq.sqrt();
        if norm == F::zero() {
            continue; // zero column: R[k][k] stays 0 and trips the rank check
        }
        let alpha = if a.at(k, k) > F::zero() { -norm } else { norm };
        let mut vnorm_sq = F::zero();
        for i in k..n {
            let mut vi = a.at(i, k);
            if i == k {
                vi = vi - alpha;
            }
            v[i] = vi;
            vnorm_sq = vnorm_sq + vi * vi;
        }
        if vnorm_sq == F::zero() {
            continue;
        }
        let two = F::from_f64(2.0);
        for j in k..m {
            let mut dot = F::zero();
            for i in k..n {
                dot = dot + v[i] * a.at(i, j);
            }
            let f = two * dot / vnorm_sq;
            for i in k..n {
                let updated = a.at(i, j) - f * v[i];
                a.set(i, j, updated);
            }
        }
        let mut dot = F::zero();
        for i in k..n {
            dot = dot + v[i] * y[i];
        }
        let f = two * dot / vnorm_sq;
        for i in k..n {
            y[i] = y[i] - f * v[i];
        }
    }

    let max_diag = (0..m).fold(F::zero(), |acc, k| acc.max(a.at(k, k).abs()));
    let rank_deficient =
        (0..m).any(|k| a.at(k, k).abs() < F::from_f64(RANK_TOLERANCE) * max_diag);

    let mut beta = vec![F::zero(); m];
    for k in (0..m).rev() {
        let mut acc = y[k];
        for j in (k + 1)..m {
            acc = acc - a.at(k, j) * beta[j];
        }
        let d = a.at(k, k);
        if d == F::zero() {
            beta[k] = F::zero();
        } else {
            beta[k] = acc / d;
        }
        if !beta[k].is_finite() {
            return Err(Error::numeric("least-squares solve produced non-finite coefficients"));
        }
    }
    Ok((beta, rank_deficient))
}

fn build_design<F: Real>(z: &[Vec<F>], ridge: Option<F>) -> Mat<F> {
    let n = z.len();
    let p = z[0].len();
    let extra = if ridge.is_some() { p + 1 } else { 0 };
    let mut a = Mat::zeros(n + extra, p + 1);
    for (i, row) in z.iter().enumerate() {
        a.set(i, 0, F::one());
        for (j, &x) in row.iter().enumerate() {
            a.set(i, j + 1, x);
        }
    }
    if let Some(lambda) = ridge {
        let s = lambda.sqrt();
        for j in 0..(p + 1) {
            a.set(n + j, j, s);
        }
    }
    a
}

/// Fit ordinary least squares on standardized features. The design matrix is
/// intercept-augmented; if any R diagonal falls below `1e-10` times the
/// largest one, the fit is redone with ridge penalty `1e-8` on augmented rows
/// and the fallback is recorded in `train_meta`.
pub fn fit_linear<F: Real>(train: &Dataset<F>) -> Result<PredictorModel<F>> {
    if train.is_empty() {
        return Err(Error::EmptyDataset { context: "fit_linear".into() });
    }
    let p = crate::dataset::FEATURE_NAMES.len();
    if train.len() < p + 1 {
        return Err(Error::data(format!(
            "fit_linear needs at least {} samples, got {}",
            p + 1,
            train.len()
        )));
    }
    let scaler = Scaler::fit(train)?;
    let raw: Vec<Vec<F>> = train.feature_matrix().iter().map(|r| r.to_vec()).collect();
    let z = scaler.transform(&raw)?;
    let y = train.targets();

    let mut a = build_design(&z, None);
    let mut qty = y.clone();
    let (beta, rank_deficient) = qr_least_squares(&mut a, &mut qty)?;

    let (beta, ridge_fallback) = if rank_deficient {
        let mut a = build_design(&z, Some(F::from_f64(RIDGE_PENALTY)));
        let mut qty = y.clone();
        qty.extend(std::iter::repeat(F::zero()).take(p + 1));
        let (beta, _) = qr_least_squares(&mut a, &mut qty)?;
        (beta, true)
    } else {
        (beta, false)
    };

    let payload = LinearPayload { intercept: beta[0], coefficients: beta[1..].to_vec() };
    let meta = TrainMeta {
        seed: 0,
        hyperparameters: json!({
            "solver": "householder_qr",
            "rank_tolerance": RANK_TOLERANCE,
            "ridge_penalty": RIDGE_PENALTY,
        }),
        dataset_fingerprint: train.fingerprint(),
        normalized: train.normalized(),
        ridge_fallback,
    };
    PredictorModel::new(
        crate::dataset::feature_names_vec(),
        Some(scaler),
        Payload::Linear(payload),
        meta,
    )
}

/// De-standardized `(intercept, coefficients)` of a linear model, i.e. the
/// affine map over raw feature values.
pub fn raw_coefficients<F: Real>(model: &PredictorModel<F>) -> Result<(F, Vec<F>)> {
    let Payload::Linear(payload) = &model.payload else {
        return Err(Error::WrongModelKind {
            expected: ModelKind::Linear.as_str(),
            got: model.kind().as_str().to_string(),
        });
    };
    let scaler = model.scaler.as_ref().expect("linear model has scaler");
    let mut intercept = payload.intercept;
    let mut coefs = Vec::with_capacity(payload.coefficients.len());
    for ((&w, &m), &s) in payload.coefficients.iter().zip(&scaler.means).zip(&scaler.stds) {
        coefs.push(w / s);
        intercept = intercept - w * m / s;
    }
    Ok((intercept, coefs))
}
