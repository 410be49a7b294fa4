//! Z-score standardization fitted on the training partition.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Per-feature mean and population standard deviation. A constant column is
/// recorded as mean 0 / std 1 so it passes through unchanged instead of
/// collapsing to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Scaler<F> {
    pub means: Vec<F>,
    pub stds: Vec<F>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ScalerDoc {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl<F: Real> Scaler<F> {
    /// Fit on the training set only; variance uses the population convention
    /// (divide by n).
    pub fn fit(train: &Dataset<F>) -> Result<Scaler<F>> {
        if train.is_empty() {
            return Err(Error::EmptyDataset { context: "scaler fit".into() });
        }
        let matrix = train.feature_matrix();
        let n = F::from_usize(matrix.len()).unwrap();
        let width = matrix[0].len();
        let mut means = Vec::with_capacity(width);
        let mut stds = Vec::with_capacity(width);
        for j in 0..width {
            let mean = matrix.iter().fold(F::zero(), |acc, row| acc + row[j]) / n;
            let var = matrix
                .iter()
                .fold(F::zero(), |acc, row| acc + (row[j] - mean) * (row[j] - mean))
                / n;
            let std = var.sqrt();
            if std == F::zero() {
                means.push(F::zero());
                stds.push(F::one());
            } else {
                means.push(mean);
                stds.push(std);
            }
        }
        Ok(Scaler { means, stds })
    }

    pub fn width(&self) -> usize {
        self.means.len()
    }

    pub fn transform_row(&self, row: &[F]) -> Result<Vec<F>> {
        if row.len() != self.width() {
            return Err(Error::WidthMismatch { expected: self.width(), got: row.len() });
        }
        Ok(row
            .iter()
            .zip(self.means.iter().zip(&self.stds))
            .map(|(&x, (&m, &s))| (x - m) / s)
            .collect())
    }

    pub fn transform(&self, rows: &[Vec<F>]) -> Result<Vec<Vec<F>>> {
        rows.iter().map(|r| self.transform_row(r)).collect()
    }

    pub fn inverse_row(&self, row: &[F]) -> Result<Vec<F>> {
        if row.len() != self.width() {
            return Err(Error::WidthMismatch { expected: self.width(), got: row.len() });
        }
        Ok(row
            .iter()
            .zip(self.means.iter().zip(&self.stds))
            .map(|(&z, (&m, &s))| z * s + m)
            .collect())
    }

    pub fn to_doc(&self) -> ScalerDoc {
        ScalerDoc {
            means: self.means.iter().map(|m| m.as_f64()).collect(),
            stds: self.stds.iter().map(|s| s.as_f64()).collect(),
        }
    }

    pub fn from_doc(doc: &ScalerDoc) -> Result<Scaler<F>> {
        if doc.means.len() != doc.stds.len() {
            return Err(Error::data("scaler means/stds length mismatch"));
        }
        if doc.stds.iter().any(|&s| !(s > 0.0)) {
            return Err(Error::data("scaler stds must be positive"));
        }
        Ok(Scaler {
            means: doc.means.iter().map(|&m| F::from_f64(m)).collect(),
            stds: doc.stds.iter().map(|&s| F::from_f64(s)).collect(),
        })
    }
}
