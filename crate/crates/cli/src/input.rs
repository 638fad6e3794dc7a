//! Failure-time files: one positive decimal per line, `#` comments and blank
//! lines ignored.

use std::fs;
use std::path::Path;

use plp_core::FailureTimes;

use crate::error::{CliError, CliResult};

/// Parsed file plus any warnings raised while reading it.
#[derive(Debug, Clone)]
pub struct ParsedTimes {
    pub data: FailureTimes,
    pub warnings: Vec<String>,
}

pub fn parse_failure_file(path: &Path, sorted_ok: bool) -> CliResult<ParsedTimes> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    parse_failure_text(&text, sorted_ok)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn parse_failure_text(text: &str, sorted_ok: bool) -> Result<ParsedTimes, String> {
    let mut values: Vec<(f64, usize)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: f64 = line
            .parse()
            .map_err(|_| format!("line {line_no}: '{line}' is not a number"))?;
        if !v.is_finite() || v <= 0.0 {
            return Err(format!("line {line_no}: failure times must be positive, got {line}"));
        }
        values.push((v, line_no));
    }
    if values.is_empty() {
        return Err("no failure times found".into());
    }
    let mut warnings = Vec::new();
    if let Some(w) = values.windows(2).find(|w| w[1].0 <= w[0].0) {
        let (prev, cur) = (w[0], w[1]);
        if cur.0 == prev.0 {
            return Err(format!(
                "line {}: duplicate value {} (also on line {})",
                cur.1, cur.0, prev.1
            ));
        }
        if !sorted_ok {
            return Err(format!(
                "line {}: {} is not greater than {} on line {} (pass --sorted-ok to sort)",
                cur.1, cur.0, prev.0, prev.1
            ));
        }
        values.sort_by(|a, b| a.0.total_cmp(&b.0));
        if let Some(w) = values.windows(2).find(|w| w[1].0 == w[0].0) {
            let later = w[0].1.max(w[1].1);
            let earlier = w[0].1.min(w[1].1);
            return Err(format!(
                "line {later}: duplicate value {} (also on line {earlier})",
                w[0].0
            ));
        }
        warnings.push("failure times were not increasing and have been sorted".to_string());
    }
    let data = FailureTimes::new(values.into_iter().map(|(v, _)| v).collect())
        .map_err(|e| e.to_string())?;
    Ok(ParsedTimes { data, warnings })
}

/// Writes one time per line with 17 significant digits.
pub fn format_failure_times(data: &FailureTimes) -> String {
    let mut out = String::new();
    for t in data.times() {
        out.push_str(&format!("{t:.16e}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn comments_and_blanks() {
        let p = parse_failure_text("# header\n0.7\n\n3.7\n", false).unwrap();
        assert_eq!(p.data.times(), &[0.7, 3.7]);
        assert!(p.warnings.is_empty());
    }

    #[test]
    fn duplicate_names_the_line() {
        let e = parse_failure_text("1.0\n1.0\n", false).unwrap_err();
        assert!(e.contains("line 2") && e.contains("duplicate"), "{e}");
        let e = parse_failure_text("2.0\n1.0\n2.0\n", true).unwrap_err();
        assert!(e.contains("line 3") && e.contains("duplicate"), "{e}");
    }

    #[test]
    fn bad_tokens() {
        let e = parse_failure_text("0.5\nabc\n", false).unwrap_err();
        assert!(e.contains("line 2"), "{e}");
        assert!(parse_failure_text("0.5\n-1\n", false).unwrap_err().contains("positive"));
        assert!(parse_failure_text("0\n", false).is_err());
        assert!(parse_failure_text("# only\n\n", false).is_err());
        assert!(parse_failure_text("inf\n", false).is_err());
    }

    #[test]
    fn unsorted_needs_the_flag() {
        assert!(parse_failure_text("3\n1\n2\n", false).unwrap_err().contains("line 2"));
        let p = parse_failure_text("3\n1\n2\n", true).unwrap();
        assert_eq!(p.data.times(), &[1.0, 2.0, 3.0]);
        assert_eq!(p.warnings.len(), 1);
    }

    proptest! {
        #[test]
        fn write_then_parse_is_identity(gaps in prop::collection::vec(1e-9f64..1e4, 1..80)) {
            let mut t = 0.0;
            let times: Vec<f64> = gaps.iter().map(|g| { t += g; t }).collect();
            let data = FailureTimes::new(times).unwrap();
            let back = parse_failure_text(&format_failure_times(&data), false).unwrap();
            prop_assert_eq!(back.data.times(), data.times());
        }
    }
}
