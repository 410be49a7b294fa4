//! Dataset CSV persistence.
//!
//! UTF-8, comma-separated, mandatory header, fixed column order:
//! `workload, config_id, interval_id, <the nine features in canonical
//! order>, ipc, normalized`. Numbers carry 17 significant digits so that
//! write ∘ read is the identity.

use std::io::{Read, Write};
use std::path::Path;

use crate::dataset::{Dataset, FeatureVector, LabeledSample, FEATURE_NAMES};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::textfmt::fmt_real;

fn header() -> Vec<&'static str> {
    let mut cols = vec!["workload", "config_id", "interval_id"];
    cols.extend(FEATURE_NAMES);
    cols.push("ipc");
    cols.push("normalized");
    cols
}

pub fn write_csv<F: Real, W: Write>(dataset: &Dataset<F>, writer: W) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    let wrap = |e: csv::Error| Error::Csv { row: None, msg: e.to_string() };
    csv.write_record(header()).map_err(wrap)?;
    for sample in dataset.samples() {
        let mut record: Vec<String> = vec![
            sample.workload.clone(),
            sample.config_id.clone(),
            sample.interval_id.clone(),
        ];
        record.extend(sample.features.as_array().iter().map(|&v| fmt_real(v)));
        record.push(fmt_real(sample.ipc));
        record.push(sample.normalized.to_string());
        csv.write_record(&record).map_err(wrap)?;
    }
    csv.flush().map_err(|e| Error::Csv { row: None, msg: e.to_string() })?;
    Ok(())
}

pub fn write_csv_path<F: Real>(dataset: &Dataset<F>, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(dataset, file)
}

pub fn read_csv<F: Real, R: Read>(reader: R) -> Result<Dataset<F>> {
    let mut csv = csv::ReaderBuilder::new().has_headers(false).from_reader(reader);
    let mut rows = csv.records();

    let head = match rows.next() {
        Some(r) => r.map_err(|e| Error::Csv { row: Some(1), msg: e.to_string() })?,
        None => return Err(Error::Csv { row: None, msg: "empty file".into() }),
    };
    let expected = header();
    if head.len() != expected.len() {
        return Err(Error::Csv {
            row: Some(1),
            msg: format!("expected {} columns, found {}", expected.len(), head.len()),
        });
    }
    for (i, want) in expected.iter().enumerate() {
        if &head[i] != *want {
            return Err(Error::Csv {
                row: Some(1),
                msg: format!("column {} is '{}', expected '{}'", i + 1, &head[i], want),
            });
        }
    }

    let mut samples: Vec<LabeledSample<F>> = Vec::new();
    for (idx, record) in rows.enumerate() {
        let rowno = idx + 2;
        let record = record.map_err(|e| Error::Csv { row: Some(rowno), msg: e.to_string() })?;
        if record.len() != expected.len() {
            return Err(Error::Csv {
                row: Some(rowno),
                msg: format!("expected {} columns, found {}", expected.len(), record.len()),
            });
        }
        let number = |i: usize| -> Result<F> {
            record[i].parse::<f64>().map(F::from_f64).map_err(|_| Error::Csv {
                row: Some(rowno),
                msg: format!("column '{}' value '{}' is not a number", expected[i], &record[i]),
            })
        };
        let mut features = [F::zero(); 9];
        for (j, slot) in features.iter_mut().enumerate() {
            *slot = number(3 + j)?;
        }
        let ipc = number(12)?;
        let normalized = match &record[13] {
            "true" => true,
            "false" => false,
            other => {
                return Err(Error::Csv {
                    row: Some(rowno),
                    msg: format!("column 'normalized' value '{other}' is not true/false"),
                })
            }
        };
        let sample = LabeledSample::new(
            FeatureVector::from_array(features),
            ipc,
            record[0].to_string(),
            record[1].to_string(),
            record[2].to_string(),
            normalized,
        )
        .map_err(|e| Error::Csv { row: Some(rowno), msg: e.to_string() })?;
        samples.push(sample);
    }
    if samples.is_empty() {
        return Err(Error::Csv { row: None, msg: "no data rows".into() });
    }
    let normalized = samples[0].normalized;
    Dataset::new(samples, normalized)
        .map_err(|e| Error::Csv { row: None, msg: e.to_string() })
}

pub fn read_csv_path<F: Real>(path: &Path) -> Result<Dataset<F>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file)
}
