use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

pub const DESCRIPTOR_DIM: usize = 128;

const NORM_TOLERANCE: f64 = 1e-6;
const HEADER: &str = "# object:";

/// Local descriptors extracted from the image of one object.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectDescriptors {
    pub name: String,
    pub descriptors: Vec<Vec<f64>>,
}

pub fn load_descriptors(path: &Path) -> Result<Vec<ObjectDescriptors>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_descriptors(&text, &path.display().to_string())
}

/// Parses blocks of `# object: <name>` followed by one descriptor per line.
/// Rows whose norm is off by more than 1e-6 are rescaled to unit norm.
pub fn parse_descriptors(text: &str, source: &str) -> Result<Vec<ObjectDescriptors>> {
    let mut objects: Vec<ObjectDescriptors> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let err = |msg: String| Error::parse(source, i + 1, msg);
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix(HEADER) {
            let name = name.trim();
            if name.is_empty() {
                return Err(err("object header without a name".into()));
            }
            if objects.iter().any(|o| o.name == name) {
                return Err(err(format!("duplicate object `{name}`")));
            }
            objects.push(ObjectDescriptors {
                name: name.to_string(),
                descriptors: Vec::new(),
            });
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let current = objects
            .last_mut()
            .ok_or_else(|| err("descriptor before the first object header".into()))?;
        let mut row = line
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| err(format!("bad number: {e}")))?;
        if row.len() != DESCRIPTOR_DIM {
            return Err(err(format!(
                "descriptor has {} components, expected {DESCRIPTOR_DIM}",
                row.len()
            )));
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(err("non-finite descriptor component".into()));
        }
        let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(err("zero descriptor".into()));
        }
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            row.iter_mut().for_each(|v| *v /= norm);
        }
        current.descriptors.push(row);
    }
    if let Some(o) = objects.iter().find(|o| o.descriptors.is_empty()) {
        return Err(Error::Malformed(format!(
            "object `{}` has no descriptors",
            o.name
        )));
    }
    Ok(objects)
}

/// Text form read by [`parse_descriptors`].
pub fn write_descriptors(objects: &[ObjectDescriptors]) -> String {
    let mut out = String::new();
    for o in objects {
        writeln!(out, "{HEADER} {}", o.name).unwrap();
        for d in &o.descriptors {
            let row: Vec<String> = d.iter().map(|v| format!("{v:?}")).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_row(k: usize) -> Vec<f64> {
        let mut r = vec![0.0; DESCRIPTOR_DIM];
        r[k] = 1.0;
        r
    }

    fn line(r: &[f64]) -> String {
        r.iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }

    #[test]
    fn empty_file() {
        assert!(parse_descriptors("", "d").unwrap().is_empty());
    }

    #[test]
    fn single_object() {
        let text = format!("# object: cup\n{}\n", line(&unit_row(3)));
        let objs = parse_descriptors(&text, "d").unwrap();
        assert_eq!(objs.len(), 1);
        assert_eq!(objs[0].name, "cup");
        assert_eq!(objs[0].descriptors, vec![unit_row(3)]);
    }

    #[test]
    fn rows_are_renormalized() {
        let mut r = vec![0.0; DESCRIPTOR_DIM];
        r[0] = 2.0 * 0.6;
        r[1] = 2.0 * 0.8;
        let text = format!("# object: cup\n{}\n", line(&r));
        let d = &parse_descriptors(&text, "d").unwrap()[0].descriptors[0];
        assert!((d[0] - 0.6).abs() < 1e-15 && (d[1] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn short_row_reports_line() {
        let text = format!("# object: cup\n{}\n0.5 0.5\n", line(&unit_row(0)));
        match parse_descriptors(&text, "d") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn structural_errors() {
        assert!(parse_descriptors(&line(&unit_row(0)), "d").is_err());
        assert!(parse_descriptors("# object: cup\n", "d").is_err());
        let dup = format!("# object: a\n{0}\n# object: a\n{0}\n", line(&unit_row(0)));
        assert!(parse_descriptors(&dup, "d").is_err());
    }

    #[test]
    fn write_parse_round_trip() {
        let objs = vec![
            ObjectDescriptors {
                name: "a".into(),
                descriptors: vec![unit_row(1), unit_row(2)],
            },
            ObjectDescriptors {
                name: "b".into(),
                descriptors: vec![unit_row(5)],
            },
        ];
        assert_eq!(
            parse_descriptors(&write_descriptors(&objs), "d").unwrap(),
            objs
        );
    }
}
