use std::fmt::Write as _;

use clap::ValueEnum;
use sl2kirby::{FpSeries, HbarSeries, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// `key: value` lines, series on one line
    Text,
    /// `key=value` lines, one line per series coefficient
    Structured,
}

enum Entry {
    Field(String, String),
    Series { key: String, coeffs: Vec<String>, pretty: String },
}

/// Ordered key-value output plus a failure flag for checks.
#[derive(Default)]
pub struct Report {
    entries: Vec<Entry>,
    failures: usize,
}

const SUPERSCRIPTS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];

fn hbar_power(n: usize) -> String {
    match n {
        0 => String::new(),
        1 => "·ħ".into(),
        _ => format!("·ħ{}", n.to_string().chars().map(|c| SUPERSCRIPTS[c as usize - '0' as usize]).collect::<String>()),
    }
}

/// `1/2 + 0·ħ − 1/64·ħ² + …`
pub fn pretty_rational_series(coeffs: &[Rational]) -> String {
    let mut s = String::new();
    for (n, c) in coeffs.iter().enumerate() {
        let neg = c.is_negative();
        let mag = c.abs();
        match (n, neg) {
            (0, false) => write!(s, "{mag}"),
            (0, true) => write!(s, "−{mag}"),
            (_, false) => write!(s, " + {mag}{}", hbar_power(n)),
            (_, true) => write!(s, " − {mag}{}", hbar_power(n)),
        }
        .unwrap();
    }
    s.push_str(" + …");
    s
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn field(&mut self, key: impl Into<String>, value: impl ToString) {
        self.entries.push(Entry::Field(key.into(), value.to_string()));
    }

    pub fn check(&mut self, key: impl Into<String>, ok: bool) {
        if !ok {
            self.failures += 1;
        }
        self.field(key, if ok { "PASS" } else { "FAIL" });
    }

    pub fn failures(&self) -> usize {
        self.failures
    }

    /// An arity-0 rational series.
    pub fn series(&mut self, key: impl Into<String>, s: &HbarSeries) {
        let coeffs: Vec<Rational> = (0..=s.order()).map(|n| s.scalar_coeff(n)).collect();
        let pretty = pretty_rational_series(&coeffs);
        self.entries.push(Entry::Series { key: key.into(), coeffs: coeffs.iter().map(|c| c.to_string()).collect(), pretty });
    }

    pub fn fp_series(&mut self, key: impl Into<String>, s: &FpSeries) {
        let coeffs: Vec<String> = s.coeffs().iter().map(|c| c.to_string()).collect();
        let body: Vec<String> = coeffs.iter().enumerate().map(|(n, c)| format!("{c}{}", hbar_power(n))).collect();
        let pretty = format!("{} + … (mod {})", body.join(" + "), s.p());
        self.entries.push(Entry::Series { key: key.into(), coeffs, pretty });
    }

    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        for e in &self.entries {
            match (e, format) {
                (Entry::Field(k, v), Format::Text) => writeln!(out, "{k}: {v}"),
                (Entry::Field(k, v), Format::Structured) => writeln!(out, "{k}={v}"),
                (Entry::Series { key, pretty, .. }, Format::Text) => writeln!(out, "{key}: {pretty}"),
                (Entry::Series { key, coeffs, .. }, Format::Structured) => {
                    for (n, c) in coeffs.iter().enumerate() {
                        writeln!(out, "{key}.hbar^{n}={c}").unwrap();
                    }
                    Ok(())
                }
            }
            .unwrap();
        }
        out
    }
}
