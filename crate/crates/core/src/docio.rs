//! Structured-document (JSON) reading and writing.
//!
//! All documents the crate persists — stat mappings, run manifests, model
//! files, split records, evaluation and importance reports — are JSON with a
//! mandatory `schema_version` field. Floats are written with 17 significant
//! digits so that `load ∘ save` is the identity byte-for-byte.

use std::io::{self, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter, Serializer};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::textfmt::fmt_f64;

/// Pretty JSON formatter that writes every float with 17 significant digits.
struct SigFigFormatter<'a> {
    inner: PrettyFormatter<'a>,
}

impl<'a> SigFigFormatter<'a> {
    fn new() -> Self {
        SigFigFormatter { inner: PrettyFormatter::new() }
    }
}

impl<'a> Formatter for SigFigFormatter<'a> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if !value.is_finite() {
            return Err(io::Error::new(io::ErrorKind::InvalidData, "non-finite float"));
        }
        writer.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object_value(w)
    }
}

/// Serialize a document to canonical bytes (pretty JSON, 17-digit floats,
/// trailing newline).
pub fn to_doc_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut ser = Serializer::with_formatter(&mut out, SigFigFormatter::new());
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Doc { path: None, msg: e.to_string() })?;
    out.push(b'\n');
    Ok(out)
}

pub fn write_doc<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let bytes = to_doc_bytes(value)?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Parse a document after checking its `schema_version`.
pub fn read_doc<T: DeserializeOwned>(path: &Path, expected_version: u64) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    from_doc_str(&text, expected_version).map_err(|e| match e {
        Error::Doc { path: None, msg } => Error::Doc { path: Some(path.to_path_buf()), msg },
        other => other,
    })
}

pub fn from_doc_str<T: DeserializeOwned>(text: &str, expected_version: u64) -> Result<T> {
    let value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| Error::Doc { path: None, msg: e.to_string() })?;
    let version = value
        .get("schema_version")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| Error::Doc { path: None, msg: "missing schema_version".into() })?;
    if version != expected_version {
        return Err(Error::Doc {
            path: None,
            msg: format!("unsupported schema_version {version}, expected {expected_version}"),
        });
    }
    serde_json::from_value(value).map_err(|e| Error::Doc { path: None, msg: e.to_string() })
}

/// SHA-256 of a byte string, hex-encoded. Used to fingerprint datasets and
/// models so downstream artifacts can verify they refer to the same inputs.
pub fn fingerprint(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut hex = String::with_capacity(64);
    for b in digest {
        hex.push_str(&format!("{b:02x}"));
    }
    hex
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::{Deserialize, Serialize};

    #[derive(Serialize, Deserialize)]
    struct Demo {
        schema_version: u64,
        x: f64,
    }

    #[test]
    fn doc_round_trip_is_byte_identical() {
        let d = Demo { schema_version: 1, x: 0.1 + 0.2 };
        let bytes = to_doc_bytes(&d).unwrap();
        let parsed: Demo = from_doc_str(std::str::from_utf8(&bytes).unwrap(), 1).unwrap();
        assert_eq!(parsed.x.to_bits(), d.x.to_bits());
        let again = to_doc_bytes(&parsed).unwrap();
        assert_eq!(bytes, again);
    }

    #[test]
    fn version_mismatch_is_rejected() {
        let err = from_doc_str::<Demo>(r#"{"schema_version": 999, "x": 1.0}"#, 1).unwrap_err();
        assert!(err.to_string().contains("unsupported schema_version 999"));
    }

    #[test]
    fn missing_version_is_rejected() {
        assert!(from_doc_str::<Demo>(r#"{"x": 1.0}"#, 1).is_err());
    }

    #[test]
    fn truncated_document_is_an_error_not_a_panic() {
        assert!(from_doc_str::<Demo>(r#"{"schema_version": 1, "x"#, 1).is_err());
    }

    #[test]
    fn fingerprint_is_stable() {
        assert_eq!(fingerprint(b""), fingerprint(b""));
        assert_ne!(fingerprint(b"a"), fingerprint(b"b"));
        assert_eq!(fingerprint(b"abc").len(), 64);
    }
}
