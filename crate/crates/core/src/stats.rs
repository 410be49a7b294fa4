//! gem5-style statistics dump parsing and serialization.
//!
//! A stats file holds one or more dumps. Dumps are bounded by lines beginning
//! `---------- Begin Simulation Statistics` and
//! `---------- End Simulation Statistics`; a file without delimiters is a
//! single dump. Each stat line is
//!
//! ```text
//! <name> <value> [...] [# comment]
//! ```
//!
//! where the first whitespace-separated token after the name is the value.
//! Trailing tokens (including parenthesized percentages) and `#` comments are
//! ignored, blank lines are skipped. Values that parse as `nan` or `inf` are
//! excluded from the dump and counted; tokens that do not parse as numbers at
//! all are line-level errors.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::textfmt::fmt_f64;

const BEGIN_MARKER: &str = "---------- Begin Simulation Statistics";
const END_MARKER: &str = "---------- End Simulation Statistics";

/// One simulation-statistics snapshot: dotted stat names to finite values.
#[derive(Debug, Clone, PartialEq)]
pub struct StatsDump {
    /// 0-based position of this dump in its file.
    pub dump_index: usize,
    pub values: BTreeMap<String, f64>,
    /// Number of entries dropped because they parsed as nan or inf.
    pub excluded: usize,
}

impl StatsDump {
    pub fn new(dump_index: usize) -> Self {
        StatsDump { dump_index, values: BTreeMap::new(), excluded: 0 }
    }
}

/// Parse a whole stats file into its dumps.
pub fn parse_stats_file(content: &str) -> Result<Vec<StatsDump>> {
    let delimited = content
        .lines()
        .any(|l| l.starts_with(BEGIN_MARKER) || l.starts_with(END_MARKER));
    let mut dumps = Vec::new();
    let mut current: Option<StatsDump> = None;
    if !delimited {
        current = Some(StatsDump::new(0));
    }

    for (idx, line) in content.lines().enumerate() {
        let lineno = idx + 1;
        if line.starts_with(BEGIN_MARKER) {
            if current.is_some() {
                return Err(Error::StatsFile {
                    msg: format!("line {lineno}: Begin delimiter inside an open section"),
                });
            }
            current = Some(StatsDump::new(dumps.len()));
            continue;
        }
        if line.starts_with(END_MARKER) {
            match current.take() {
                Some(dump) => dumps.push(dump),
                None => {
                    return Err(Error::StatsFile {
                        msg: format!("line {lineno}: End delimiter without matching Begin"),
                    })
                }
            }
            continue;
        }
        let Some(dump) = current.as_mut() else {
            // Delimited file: text between sections is ignored.
            continue;
        };
        parse_stat_line(line, lineno, dump)?;
    }

    match current {
        Some(dump) if delimited => {
            let _ = dump;
            Err(Error::StatsFile { msg: "unbalanced delimiters: Begin without End".into() })
        }
        Some(dump) => {
            dumps.push(dump);
            Ok(dumps)
        }
        None => Ok(dumps),
    }
}

fn parse_stat_line(line: &str, lineno: usize, dump: &mut StatsDump) -> Result<()> {
    let payload = match line.find('#') {
        Some(pos) => &line[..pos],
        None => line,
    };
    let mut tokens = payload.split_whitespace();
    let Some(name) = tokens.next() else {
        return Ok(()); // blank or comment-only line
    };
    let Some(value_token) = tokens.next() else {
        return Err(Error::StatsParse { line: lineno, msg: format!("stat '{name}' has no value") });
    };
    let value: f64 = value_token.parse().map_err(|_| Error::StatsParse {
        line: lineno,
        msg: format!("value '{value_token}' for stat '{name}' is not a number"),
    })?;
    if !value.is_finite() {
        dump.excluded += 1;
        return Ok(());
    }
    if dump.values.insert(name.to_string(), value).is_some() {
        return Err(Error::StatsParse {
            line: lineno,
            msg: format!("duplicate stat '{name}' within one dump"),
        });
    }
    Ok(())
}

/// Serialize dumps back to the line grammar. Re-parsing the output yields
/// equal dumps.
pub fn write_stats_file(dumps: &[StatsDump]) -> String {
    let mut out = String::new();
    for dump in dumps {
        out.push_str(BEGIN_MARKER);
        out.push_str(" ----------\n");
        for (name, value) in &dump.values {
            out.push_str(name);
            out.push(' ');
            out.push_str(&fmt_f64(*value));
            out.push('\n');
        }
        out.push_str(END_MARKER);
        out.push_str(" ----------\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_line_without_delimiters_is_one_dump() {
        let dumps = parse_stats_file("system.cpu0.commit.loads 150 # committed loads").unwrap();
        assert_eq!(dumps.len(), 1);
        assert_eq!(dumps[0].dump_index, 0);
        assert_eq!(dumps[0].values["system.cpu0.commit.loads"], 150.0);
    }

    #[test]
    fn two_sections_give_two_dumps() {
        let text = "---------- Begin Simulation Statistics ----------\n\
                    a.b 1\n\
                    ---------- End Simulation Statistics   ----------\n\
                    \n\
                    ---------- Begin Simulation Statistics ----------\n\
                    a.b 2\n\
                    ---------- End Simulation Statistics   ----------\n";
        let dumps = parse_stats_file(text).unwrap();
        assert_eq!(dumps.len(), 2);
        assert_eq!(dumps[0].dump_index, 0);
        assert_eq!(dumps[1].dump_index, 1);
        assert_eq!(dumps[0].values["a.b"], 1.0);
        assert_eq!(dumps[1].values["a.b"], 2.0);
    }

    #[test]
    fn nan_entries_are_excluded_and_counted() {
        let dumps = parse_stats_file("system.cpu0.ipc nan\nsystem.cpu0.cycles 10\n").unwrap();
        assert_eq!(dumps.len(), 1);
        assert!(!dumps[0].values.contains_key("system.cpu0.ipc"));
        assert_eq!(dumps[0].excluded, 1);
        assert_eq!(dumps[0].values["system.cpu0.cycles"], 10.0);
    }

    #[test]
    fn percentages_and_trailing_tokens_are_ignored() {
        let dumps = parse_stats_file("system.cpu.ipc 0.8125 (81.25%) # ipc\n").unwrap();
        assert_eq!(dumps[0].values["system.cpu.ipc"], 0.8125);
    }

    #[test]
    fn malformed_value_reports_line_number() {
        let err = parse_stats_file("a.b 1\nc.d notanumber\n").unwrap_err();
        match err {
            Error::StatsParse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn missing_value_reports_line_number() {
        let err = parse_stats_file("justaname\n").unwrap_err();
        match err {
            Error::StatsParse { line, .. } => assert_eq!(line, 1),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn duplicate_stat_is_an_error() {
        assert!(parse_stats_file("a.b 1\na.b 2\n").is_err());
    }

    #[test]
    fn unbalanced_delimiters_are_file_errors() {
        assert!(parse_stats_file("---------- Begin Simulation Statistics ----------\na.b 1\n")
            .is_err());
        assert!(parse_stats_file("a.b 1\n---------- End Simulation Statistics ----------\n")
            .is_err());
        let two_begins = "---------- Begin Simulation Statistics ----------\n\
                          ---------- Begin Simulation Statistics ----------\n";
        assert!(parse_stats_file(two_begins).is_err());
    }

    #[test]
    fn round_trip_preserves_dumps() {
        let text = "x.y 1.5\nz.w 2.25e3\n";
        let dumps = parse_stats_file(text).unwrap();
        let serialized = write_stats_file(&dumps);
        let reparsed = parse_stats_file(&serialized).unwrap();
        assert_eq!(dumps, reparsed);
    }

    #[test]
    fn text_between_sections_is_ignored() {
        let text = "stray line that is not a stat\n\
                    ---------- Begin Simulation Statistics ----------\n\
                    a.b 1\n\
                    ---------- End Simulation Statistics ----------\n\
                    another stray\n";
        let dumps = parse_stats_file(text).unwrap();
        assert_eq!(dumps.len(), 1);
        assert_eq!(dumps[0].values.len(), 1);
    }
}
