//! Number rendering and plain-text tables.

use serde_json::Value;

/// Renders numbers at full precision, or at a fixed number of decimals
/// when `--round` is given.
#[derive(Debug, Clone, Copy, Default)]
pub struct Numbers {
    pub round: Option<usize>,
}

impl Numbers {
    pub fn text(&self, x: f64) -> String {
        match self.round {
            Some(d) => format!("{x:.d$}"),
            None if x != 0.0 && x.is_finite() && !(1e-6..1e15).contains(&x.abs()) => {
                format!("{x:e}")
            }
            None => format!("{x}"),
        }
    }

    pub fn opt_text(&self, x: Option<f64>) -> String {
        x.map(|v| self.text(v)).unwrap_or_default()
    }

    /// JSON number; non-finite values become `null`.
    pub fn json(&self, x: f64) -> Value {
        let v = match self.round {
            // decimal rounding through the formatter, not x * 10^d
            Some(d) => format!("{x:.d$}").parse().unwrap_or(x),
            None => x,
        };
        serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
    }

    pub fn opt_json(&self, x: Option<f64>) -> Value {
        x.map_or(Value::Null, |v| self.json(v))
    }
}

/// Column-aligned table. The first column is left-aligned, the rest
/// right-aligned.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let widths: Vec<usize> = (0..header.len())
        .map(|c| {
            rows.iter()
                .map(|r| r[c].chars().count())
                .chain([header[c].chars().count()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(c, (cell, &w))| {
                if c == 0 {
                    format!("{cell:<w$}")
                } else {
                    format!("{cell:>w$}")
                }
            })
            .collect();
        padded.join("  ").trim_end().to_string()
    };
    let mut text = line(header.to_vec());
    text.push('\n');
    for row in rows {
        text.push_str(&line(row.iter().map(String::as_str).collect()));
        text.push('\n');
    }
    text
}

/// Two-column `label  value` listing.
pub fn pairs(rows: &[(&str, String)]) -> String {
    let width = rows
        .iter()
        .map(|(k, _)| k.chars().count())
        .max()
        .unwrap_or(0);
    rows.iter()
        .map(|(k, v)| format!("{k:<width$}  {v}\n"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_precision_by_default() {
        let n = Numbers::default();
        assert_eq!(n.text(0.1 + 0.2), "0.30000000000000004");
        assert_eq!(n.json(0.1 + 0.2), serde_json::json!(0.30000000000000004));
        assert_eq!(n.text(-3.469446951953614e-18), "-3.469446951953614e-18");
        assert_eq!(n.text(0.0), "0");
    }

    #[test]
    fn rounding_applies_to_text_and_json() {
        let n = Numbers { round: Some(2) };
        assert_eq!(n.text(43.749999), "43.75");
        assert_eq!(n.json(0.125 + 1e-9), serde_json::json!(0.13));
        assert_eq!(n.json(f64::NAN), Value::Null);
    }

    #[test]
    fn table_aligns_columns() {
        let t = table(&["a", "bb"], &[vec!["xyz".into(), "1".into()]]);
        assert_eq!(t, "a    bb\nxyz   1\n");
    }
}
