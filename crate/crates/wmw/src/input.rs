//! Two-sample data in `group,value` CSV form.
//!
//! The header row must name a `group` and a `value` column (in any order,
//! other columns are ignored). Groups are `1` and `2`.

use std::io::Read;
use std::path::Path;

use wmw_core::{Sample, TwoSamples};

use crate::error::CliError;

pub fn read_two_samples(path: &Path) -> Result<TwoSamples, CliError> {
    let file = std::fs::File::open(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_two_samples(file)
}

pub fn parse_two_samples<R: Read>(reader: R) -> Result<TwoSamples, CliError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| CliError::Input { line: 1, message: e.to_string() })?
        .clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| CliError::Input {
                line: 1,
                message: format!("header has no `{name}` column"),
            })
    };
    let (gi, vi) = (find("group")?, find("value")?);

    let (mut s1, mut s2) = (Vec::new(), Vec::new());
    for record in rdr.records() {
        let record = record.map_err(|e| CliError::Input {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let bad = |message: String| CliError::Input { line, message };
        let group = record.get(gi).unwrap_or("");
        let raw = record.get(vi).unwrap_or("");
        let value: f64 = raw.parse().map_err(|_| bad(format!("value `{raw}` is not a number")))?;
        if !value.is_finite() {
            return Err(bad(format!("value `{raw}` is not finite")));
        }
        match group {
            "1" => s1.push(value),
            "2" => s2.push(value),
            other => return Err(bad(format!("group `{other}` is not 1 or 2"))),
        }
    }
    let arm = |v: Vec<f64>, g: u8| {
        Sample::new(v).map_err(|_| CliError::Input {
            line: 0,
            message: format!("group {g} has no observations"),
        })
    };
    Ok(TwoSamples::new(arm(s1, 1)?, arm(s2, 2)?))
}
