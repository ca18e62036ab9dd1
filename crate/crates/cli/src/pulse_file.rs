//! Custom pulse sample files.
//!
//! ```text
//! dx=0.01
//! 0.0,0.0
//! 0.012,-0.003
//! ...
//! ```
//!
//! The header gives the grid spacing; each following line is one `re,im`
//! sample, leftmost first, the last sample sitting at `x = 0`. Blank lines
//! are ignored.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use stimemit::Pulse;

use crate::error::{CliError, Result};

fn bad(path: &Path, line: usize, message: impl Into<String>) -> CliError {
    CliError::PulseFile {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Parses the file contents; `path` is only used for diagnostics.
pub fn parse(text: &str, path: &Path) -> Result<(f64, Vec<Complex64>)> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (hline, header) = lines.next().ok_or_else(|| bad(path, 1, "empty pulse file"))?;
    let dx = header
        .trim()
        .strip_prefix("dx=")
        .ok_or_else(|| bad(path, hline + 1, "expected header `dx=<spacing>`"))?
        .trim()
        .parse::<f64>()
        .map_err(|e| bad(path, hline + 1, format!("bad grid spacing: {e}")))?;

    let mut samples = Vec::new();
    for (k, l) in lines {
        let line = k + 1;
        let fields: Vec<&str> = l.split(',').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(bad(
                path,
                line,
                format!("expected `re,im`, found {} fields", fields.len()),
            ));
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| bad(path, line, format!("bad number `{s}`: {e}")))
        };
        samples.push(Complex64::new(parse(fields[0])?, parse(fields[1])?));
    }
    Ok((dx, samples))
}

/// Loads and normalizes a custom pulse.
pub fn load(path: &Path) -> Result<Pulse> {
    let text = fs::read_to_string(path)?;
    let (dx, samples) = parse(&text, path)?;
    let (pulse, norm) = Pulse::custom(dx, samples)?.normalized()?;
    log::debug!("loaded {} with squared norm {norm}", path.display());
    Ok(pulse)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_header_and_samples() {
        let (dx, s) = parse("dx=0.5\n1,0\n\n 0.5 , -2\n", Path::new("p.txt")).unwrap();
        assert_eq!(dx, 0.5);
        assert_eq!(s, vec![Complex64::new(1.0, 0.0), Complex64::new(0.5, -2.0)]);
    }

    #[test]
    fn rejects_malformed_input() {
        let p = Path::new("p.txt");
        assert!(matches!(parse("", p), Err(CliError::PulseFile { .. })));
        assert!(matches!(parse("spacing=1\n1,0\n", p), Err(CliError::PulseFile { .. })));
        assert!(matches!(parse("dx=abc\n1,0\n", p), Err(CliError::PulseFile { .. })));
        assert!(parse("dx=0.1\n1,0\n1,2,3\n", p).is_err());
        match parse("dx=0.1\n1,0\n1,x\n", p) {
            Err(CliError::PulseFile { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }
}
