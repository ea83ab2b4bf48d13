//! CSV emission and deterministic number formatting.
//!
//! Output is RFC-4180-style: comma separators, LF line ends, cells quoted
//! only when they contain a comma, quote, or newline. Numbers are printed
//! with a fixed number of significant digits and trailing zeros trimmed, so
//! identical runs produce identical bytes.

use crate::error::CliError;
use num_complex::Complex64;
use std::io::Write;
use std::path::Path;

pub const DEFAULT_PRECISION: usize = 12;

/// Format with `digits` significant digits, plain decimal notation.
pub fn format_sig(value: f64, digits: usize) -> String {
    if value == 0.0 {
        return "0".to_string();
    }
    if !value.is_finite() {
        return value.to_string();
    }
    let digits = digits.max(1);
    let magnitude = value.abs().log10().floor() as i32;
    let decimals = (digits as i32 - 1 - magnitude).clamp(0, 340) as usize;
    let text = format!("{value:.decimals$}");
    if text.contains('.') {
        text.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        text
    }
}

/// Complex value as `a+bi` / `a-bi` with significant-digit parts.
pub fn format_complex(value: Complex64, digits: usize) -> String {
    let re = format_sig(value.re, digits);
    let im = format_sig(value.im.abs(), digits);
    let sign = if value.im < 0.0 { '-' } else { '+' };
    format!("{re}{sign}{im}i")
}

fn quote_cell(cell: &str) -> String {
    if cell.contains(',') || cell.contains('"') || cell.contains('\n') {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}

/// Collects rows and writes them to a file or standard output.
pub struct CsvTable {
    lines: Vec<String>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        Self {
            lines: vec![header
                .iter()
                .map(|cell| quote_cell(cell))
                .collect::<Vec<_>>()
                .join(",")],
        }
    }

    pub fn push_row(&mut self, cells: Vec<String>) {
        self.lines.push(
            cells
                .iter()
                .map(|cell| quote_cell(cell))
                .collect::<Vec<_>>()
                .join(","),
        );
    }

    pub fn render(&self) -> String {
        let mut text = self.lines.join("\n");
        text.push('\n');
        text
    }

    pub fn write(&self, target: Option<&Path>) -> Result<(), CliError> {
        let text = self.render();
        match target {
            Some(path) => std::fs::write(path, text)
                .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(text.as_bytes())
                    .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}")))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_sig(0.0, 12), "0");
        assert_eq!(format_sig(-0.0, 12), "0");
        assert_eq!(format_sig(2.0, 12), "2");
        assert_eq!(format_sig(18.0, 12), "18");
        assert_eq!(format_sig(0.5, 12), "0.5");
        assert_eq!(format_sig(1.0 / 3.0, 6), "0.333333");
        assert_eq!(format_sig(-1.0 / 3.0, 3), "-0.333");
        assert_eq!(format_sig(1234.5678, 6), "1234.57");
    }

    #[test]
    fn complex_formatting() {
        assert_eq!(format_complex(Complex64::new(1.0, 0.0), 6), "1+0i");
        assert_eq!(format_complex(Complex64::new(-0.5, 0.0), 6), "-0.5+0i");
        assert_eq!(format_complex(Complex64::new(0.0, -2.5), 6), "0-2.5i");
    }

    #[test]
    fn cells_with_commas_are_quoted() {
        let mut table = CsvTable::new(&["a", "b"]);
        table.push_row(vec!["dimer + free".into(), "1,5".into()]);
        assert_eq!(table.render(), "a,b\ndimer + free,\"1,5\"\n");
    }
}
