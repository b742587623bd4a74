use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::queue::{Instance, InstanceError};

#[derive(Debug, Error)]
pub enum InstanceFileError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("line {line}: non-ASCII byte")]
    NonAscii { line: usize },
    #[error("file does not end with a newline")]
    MissingFinalNewline,
    #[error("line {line}: expected 5 fields `S N lambda mu Bl` separated by single spaces, got {got:?}")]
    FieldCount { line: usize, got: String },
    #[error("line {line}: field {field} ({name}): cannot parse {text:?}")]
    BadNumber { line: usize, field: usize, name: &'static str, text: String },
    #[error("line {line}: {source}")]
    Invalid { line: usize, source: InstanceError },
}

const FIELD_NAMES: [&str; 5] = ["S", "N", "lambda", "mu", "Bl"];

/// Parses an instance file held in memory.
pub fn parse_instances(text: &str) -> Result<Vec<Instance>, InstanceFileError> {
    if let Some(pos) = text.bytes().position(|b| !b.is_ascii()) {
        let line = text.as_bytes()[..pos].iter().filter(|&&b| b == b'\n').count() + 1;
        return Err(InstanceFileError::NonAscii { line });
    }
    if !text.is_empty() && !text.ends_with('\n') {
        return Err(InstanceFileError::MissingFinalNewline);
    }

    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() || raw.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = raw.split(' ').collect();
        if fields.len() != 5 || fields.iter().any(|f| f.is_empty()) {
            return Err(InstanceFileError::FieldCount { line, got: raw.to_owned() });
        }
        let bad = |field: usize| InstanceFileError::BadNumber {
            line,
            field: field + 1,
            name: FIELD_NAMES[field],
            text: fields[field].to_owned(),
        };
        let capacity: usize = fields[0].parse().map_err(|_| bad(0))?;
        let workers: usize = fields[1].parse().map_err(|_| bad(1))?;
        let mut reals = [0.0; 3];
        for (slot, field) in reals.iter_mut().zip(2..) {
            let text = fields[field];
            if text.contains(['e', 'E']) {
                return Err(bad(field));
            }
            *slot = text.parse().map_err(|_| bad(field))?;
        }
        let inst = Instance::new(capacity, workers, reals[0], reals[1], reals[2])
            .map_err(|source| InstanceFileError::Invalid { line, source })?;
        out.push(inst);
    }
    Ok(out)
}

/// Formats instances, one per line, after an optional comment header.
pub fn format_instances(instances: &[Instance], header: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(header) = header {
        for line in header.lines() {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
    }
    for inst in instances {
        // `{}` on f64 never uses exponent notation and round-trips exactly
        out.push_str(&format!(
            "{} {} {} {} {}\n",
            inst.capacity(),
            inst.workers(),
            inst.arrival_rate(),
            inst.service_rate(),
            inst.min_back_room()
        ));
    }
    out
}

pub fn read_instances(path: impl AsRef<Path>) -> Result<Vec<Instance>, InstanceFileError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| InstanceFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_instances(&text)
}

pub fn write_instances(
    instances: &[Instance],
    header: Option<&str>,
    path: impl AsRef<Path>,
) -> Result<(), InstanceFileError> {
    let path = path.as_ref();
    fs::write(path, format_instances(instances, header)).map_err(|source| InstanceFileError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<Instance> {
        vec![
            Instance::new(6, 3, 15.0, 3.0, 0.32).unwrap(),
            Instance::new(100, 38, 99.0, 1.0, 4.0).unwrap(),
            Instance::new(1, 1, 0.1, 1e-7, 0.0).unwrap(),
        ]
    }

    #[test]
    fn round_trip_in_memory() {
        let text = format_instances(&sample(), Some("seed 1\ns 10"));
        assert!(text.starts_with("# seed 1\n# s 10\n6 3 15 3 0.32\n"));
        assert!(text.lines().filter(|l| !l.starts_with('#')).all(|l| !l.contains('e')));
        assert!(text.ends_with("1 1 0.1 0.0000001 0\n"));
        assert_eq!(parse_instances(&text).unwrap(), sample());
    }

    #[test]
    fn round_trip_through_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("suite.txt");
        write_instances(&sample(), None, &path).unwrap();
        assert_eq!(read_instances(&path).unwrap(), sample());
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let text = "# header\n\n6 3 15 3 0.32\n   \n# trailing\n";
        assert_eq!(parse_instances(text).unwrap().len(), 1);
        assert!(parse_instances("").unwrap().is_empty());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_instances("# c\n6 3 15 3 0.32\n6 3 x 3 0.32\n").unwrap_err();
        assert!(matches!(err, InstanceFileError::BadNumber { line: 3, field: 3, .. }), "{err}");
        assert!(err.to_string().starts_with("line 3"));

        let err = parse_instances("6 3 15 3\n").unwrap_err();
        assert!(matches!(err, InstanceFileError::FieldCount { line: 1, .. }));

        let err = parse_instances("6  3 15 3 0.32\n").unwrap_err();
        assert!(matches!(err, InstanceFileError::FieldCount { line: 1, .. }));

        let err = parse_instances("6 3 15 3 0.32\n3 5 15 3 0.32\n").unwrap_err();
        assert!(matches!(err, InstanceFileError::Invalid { line: 2, .. }));

        let err = parse_instances("6 3 1.5e1 3 0.32\n").unwrap_err();
        assert!(matches!(err, InstanceFileError::BadNumber { line: 1, field: 3, .. }));
    }

    #[test]
    fn format_rules_enforced() {
        assert!(matches!(
            parse_instances("6 3 15 3 0.32").unwrap_err(),
            InstanceFileError::MissingFinalNewline
        ));
        assert!(matches!(
            parse_instances("# caf\u{e9}\n").unwrap_err(),
            InstanceFileError::NonAscii { line: 1 }
        ));
    }
}
