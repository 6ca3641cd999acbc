//! Key-value text reports.
//!
//! Reports are written as TOML documents: `key = value` lines, optional
//! `[[table]]` groups for repeated rows, reals in scientific notation with
//! 16 significant digits. Any TOML reader can load them back.

use std::fmt;

use num_complex::Complex64;

use crate::qcore::CMatrix;

/// Formats a real with 16 significant digits.
pub fn real(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.15e}")
    }
}

/// `[re, im]`.
pub fn complex(z: Complex64) -> String {
    format!("[{}, {}]", real(z.re), real(z.im))
}

/// Row-major list of `[re, im]` pairs.
pub fn matrix(m: &CMatrix) -> String {
    let entries: Vec<String> = (0..m.nrows())
        .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
        .map(|(i, j)| complex(m[(i, j)]))
        .collect();
    format!("[{}]", entries.join(", "))
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    lines: Vec<String>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    fn push(&mut self, key: &str, value: String) -> &mut Self {
        self.lines.push(format!("{key} = {value}"));
        self
    }

    pub fn real(&mut self, key: &str, x: f64) -> &mut Self {
        self.push(key, real(x))
    }

    pub fn pair(&mut self, key: &str, a: f64, b: f64) -> &mut Self {
        self.push(key, format!("[{}, {}]", real(a), real(b)))
    }

    pub fn int(&mut self, key: &str, n: u64) -> &mut Self {
        self.push(key, n.to_string())
    }

    pub fn ints(&mut self, key: &str, ns: &[u64]) -> &mut Self {
        let items: Vec<String> = ns.iter().map(u64::to_string).collect();
        self.push(key, format!("[{}]", items.join(", ")))
    }

    pub fn flag(&mut self, key: &str, b: bool) -> &mut Self {
        self.push(key, b.to_string())
    }

    pub fn text(&mut self, key: &str, s: &str) -> &mut Self {
        self.push(key, toml::Value::String(s.to_owned()).to_string())
    }

    pub fn raw(&mut self, key: &str, value: String) -> &mut Self {
        self.push(key, value)
    }

    /// Starts a `[[name]]` row; following keys belong to it.
    pub fn row(&mut self, name: &str) -> &mut Self {
        self.lines.push(String::new());
        self.lines.push(format!("[[{name}]]"));
        self
    }

    /// Starts a `[name]` table.
    pub fn table(&mut self, name: &str) -> &mut Self {
        self.lines.push(String::new());
        self.lines.push(format!("[{name}]"));
        self
    }

    /// Appends another report. Top-level keys must precede any table.
    pub fn extend(&mut self, other: &Report) -> &mut Self {
        self.lines.extend(other.lines.iter().cloned());
        self
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in &self.lines {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reports_parse_as_toml() {
        let mut r = Report::new();
        r.real("x", 0.1)
            .pair("eps", 0.6, -0.0)
            .flag("pass", true)
            .text("name", "a\"b");
        r.row("sub").int("label", 0).real("probability", 0.8);
        r.row("sub").int("label", 1).real("probability", 0.2);
        let doc: toml::Table = r.to_string().parse().unwrap();
        assert_eq!(doc["x"].as_float(), Some(0.1));
        assert_eq!(doc["name"].as_str(), Some("a\"b"));
        assert_eq!(doc["sub"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn reals_keep_sixteen_digits() {
        let s = real(std::f64::consts::PI);
        assert_eq!(s, "3.141592653589793e0");
        assert_eq!(s.parse::<f64>().unwrap(), std::f64::consts::PI);
        let m = CMatrix::from_row_slice(1, 2, &[Complex64::new(0.5, 0.0), Complex64::new(0.0, -0.25)]);
        assert_eq!(
            matrix(&m),
            "[[5.000000000000000e-1, 0.000000000000000e0], [0.000000000000000e0, -2.500000000000000e-1]]"
        );
    }
}
