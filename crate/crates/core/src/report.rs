//! Output formatting shared by the CSV writers and summary files.

use std::path::Path;

use crate::budget::BudgetStream;
use crate::error::{Error, Result};
use crate::objectives::ObjectiveFunction;

/// Format with 12 significant digits, `%g` style: fixed notation for
/// exponents in `[-5, 12)`, scientific otherwise, trailing zeros trimmed.
pub fn fmt_sig(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-5..12).contains(&exp) {
        return format!("{}e{exp}", trim_zeros(mantissa));
    }
    let decimals = (11 - exp).max(0) as usize;
    trim_zeros(&format!("{v:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// FNV-1a over the bit patterns of an instance's data. Equal streams give
/// equal fingerprints; used to detect logs and benchmarks from different
/// instances.
pub fn instance_fingerprint(objectives: &[ObjectiveFunction], budget: &BudgetStream) -> u64 {
    let mut h = Fnv::default();
    h.word(budget.horizon() as u64);
    h.word(budget.dim() as u64);
    h.word(budget.total_budget().to_bits());
    for p in budget.prices() {
        for v in p {
            h.word(v.to_bits());
        }
    }
    for f in objectives {
        match f {
            ObjectiveFunction::Quadratic { hessian, linear } => {
                h.word(1);
                hessian.iter().chain(linear).for_each(|v| h.word(v.to_bits()));
            }
            ObjectiveFunction::MultilinearExtension { ground, table } => {
                h.word(2);
                h.word(*ground as u64);
                table.iter().for_each(|v| h.word(v.to_bits()));
            }
        }
    }
    h.0
}

struct Fnv(u64);

impl Default for Fnv {
    fn default() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }
}

impl Fnv {
    fn word(&mut self, w: u64) {
        for byte in w.to_le_bytes() {
            self.0 ^= byte as u64;
            self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
        }
    }
}

/// Ordered `key=value` lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary {
    entries: Vec<(String, String)>,
}

impl Summary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    /// Floats use Rust's shortest round-trip representation.
    pub fn push_f64(&mut self, key: &str, value: f64) {
        self.push(key, format!("{value:?}"));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| Error::parse("summary", format!("missing key `{key}`")))
    }

    pub fn require_f64(&self, key: &str) -> Result<f64> {
        self.require(key)?
            .parse()
            .map_err(|e| Error::parse("summary", format!("key `{key}`: {e}")))
    }

    pub fn require_usize(&self, key: &str) -> Result<usize> {
        self.require(key)?
            .parse()
            .map_err(|e| Error::parse("summary", format!("key `{key}`: {e}")))
    }

    pub fn to_text(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut summary = Summary::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(origin, format!("line {}: expected key=value", i + 1)))?;
            summary.push(k.trim(), v.trim());
        }
        Ok(summary)
    }

    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::MissingFile(path.to_path_buf()));
        }
        Self::parse(&std::fs::read_to_string(path)?, &path.display().to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(-0.0), "0");
        assert_eq!(fmt_sig(1.0), "1");
        assert_eq!(fmt_sig(-2.5), "-2.5");
        assert_eq!(fmt_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_sig(2.0 / 3.0 * 1000.0), "666.666666667");
        assert_eq!(fmt_sig(1.23456789012345e-7), "1.23456789012e-7");
        assert_eq!(fmt_sig(6.02e23), "6.02e23");
        assert_eq!(fmt_sig(123456789012.4), "123456789012");
        assert_eq!(fmt_sig(9.9999999999999), "10");
    }

    #[test]
    fn parsed_values_keep_twelve_digits() {
        for v in [std::f64::consts::PI, -1.0e-3 / 7.0, 12345.678901234] {
            let back: f64 = fmt_sig(v).parse().unwrap();
            assert!((back - v).abs() <= 1e-11 * v.abs());
        }
    }

    #[test]
    fn summary_round_trip() {
        let mut s = Summary::new();
        s.push("T", 100);
        s.push_f64("mu", 0.1 + 0.2);
        let parsed = Summary::parse(&s.to_text(), "inline").unwrap();
        assert_eq!(parsed, s);
        assert_eq!(parsed.require_f64("mu").unwrap(), 0.1 + 0.2);
        assert!(parsed.require("missing").is_err());
        assert!(Summary::parse("novalue\n", "inline").is_err());
    }
}
