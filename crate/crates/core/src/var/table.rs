//! Coefficient tables in the `ARx(y,z)` layout.
//!
//! Rows run `Constant(1)..Constant(k)`, then for each lag `x`, each affected
//! variable `z`, each affecting variable `y`: `AR{x}(y,z)`. Numbers are rounded
//! to two decimals with trailing zeros dropped (`0.60` prints as `0.6`, `0.00`
//! as `0`), and the value carries significance stars.

use std::fmt::Write;

use super::stats::stars;
use super::VarFit;

pub const HEADERS: [&str; 4] = ["Value", "Standard Error", "TStatistic", "PValue"];

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub label: String,
    pub value: f64,
    pub se: f64,
    pub tstat: f64,
    pub pvalue: f64,
    pub stars: &'static str,
    /// Lag (0 for constants).
    pub lag: usize,
}

impl TableRow {
    /// Label, starred value, SE, t and p as printed.
    pub fn cells(&self) -> [String; 5] {
        [
            self.label.clone(),
            format!("{}{}", format_num(self.value), self.stars),
            format_num(self.se),
            format_num(self.tstat),
            format_num(self.pvalue),
        ]
    }
}

/// Two-decimal rendering without trailing zeros; negative zero prints as `0`.
pub fn format_num(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let s = format!("{x:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

pub fn format_table(fit: &VarFit) -> Vec<TableRow> {
    let k = fit.spec.k;
    let mut rows = Vec::with_capacity(k + fit.spec.p * k * k);
    if fit.spec.with_constant {
        for z in 0..k {
            rows.push(TableRow {
                label: format!("Constant({})", z + 1),
                value: fit.coefficients.constants[z],
                se: fit.se.constants[z],
                tstat: fit.tstat.constants[z],
                pvalue: fit.pvalue.constants[z],
                stars: stars(fit.pvalue.constants[z]),
                lag: 0,
            });
        }
    }
    for x in 0..fit.spec.p {
        for z in 0..k {
            for y in 0..k {
                let p = fit.pvalue.lags[x][(z, y)];
                rows.push(TableRow {
                    label: format!("AR{{{}}}({},{})", x + 1, y + 1, z + 1),
                    value: fit.coefficients.lags[x][(z, y)],
                    se: fit.se.lags[x][(z, y)],
                    tstat: fit.tstat.lags[x][(z, y)],
                    pvalue: p,
                    stars: stars(p),
                    lag: x + 1,
                });
            }
        }
    }
    rows
}

/// One `label & value & se & t & p` line per row.
pub fn render_latex(rows: &[TableRow]) -> String {
    let mut out = format!("& {} \\\\\n", HEADERS.join(" & "));
    for r in rows {
        let _ = writeln!(out, "{} \\\\", r.cells().join(" & "));
    }
    out
}

pub fn render_csv(rows: &[TableRow]) -> String {
    let mut out = format!("term,{}\n", HEADERS.join(","));
    for r in rows {
        let _ = writeln!(out, "{}", r.cells().map(|c| quote_csv(&c)).join(","));
    }
    out
}

fn quote_csv(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Aligned plain-text table: label left-aligned, numbers right-aligned.
pub fn render_text(rows: &[TableRow]) -> String {
    let cells: Vec<[String; 5]> = rows.iter().map(TableRow::cells).collect();
    let mut widths = [0usize, HEADERS[0].len(), HEADERS[1].len(), HEADERS[2].len(), HEADERS[3].len()];
    for c in &cells {
        for (w, s) in widths.iter_mut().zip(c) {
            *w = (*w).max(s.chars().count());
        }
    }
    let mut out = String::new();
    let _ = write!(out, "{:<w$}", "", w = widths[0]);
    for (h, w) in HEADERS.iter().zip(&widths[1..]) {
        let _ = write!(out, "  {h:>w$}");
    }
    out.push('\n');
    for c in &cells {
        let _ = write!(out, "{:<w$}", c[0], w = widths[0]);
        for (s, w) in c[1..].iter().zip(&widths[1..]) {
            let _ = write!(out, "  {s:>w$}");
        }
        out.push('\n');
    }
    out
}

/// Labels of coefficients with p below `alpha`, grouped by lag (constants excluded).
pub fn significance_summary(rows: &[TableRow], p: usize, alpha: f64) -> Vec<(usize, Vec<String>)> {
    (1..=p)
        .map(|lag| {
            let sig = rows.iter().filter(|r| r.lag == lag && r.pvalue < alpha).map(|r| r.label.clone()).collect();
            (lag, sig)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_rendering() {
        assert_eq!(format_num(0.8234), "0.82");
        assert_eq!(format_num(-1.8), "-1.8");
        assert_eq!(format_num(0.6), "0.6");
        assert_eq!(format_num(3e-9), "0");
        assert_eq!(format_num(-0.004), "0");
        assert_eq!(format_num(-101.514), "-101.51");
        assert_eq!(format_num(7.0), "7");
    }
}
