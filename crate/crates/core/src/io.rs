//! CSV readers and writers for documents, series and panels.
//!
//! Output files start with `#` metadata lines; readers skip such lines. Empty
//! value fields mark undefined observations.

use std::fmt::Write;
use std::io::Read;

use chrono::NaiveDate;
use thiserror::Error;

use crate::corpus::{CountTable, Document, MentionSeries};
use crate::index::{IndexError, IndexSeries, ShareSeries};
use crate::period::{Granularity, Period};
use crate::var::{Panel, VarError};

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("line {line}: {msg}")]
    Malformed { line: u64, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn malformed(line: u64, msg: impl Into<String>) -> CsvError {
    CsvError::Malformed { line, msg: msg.into() }
}

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().comment(Some(b'#')).flexible(false).from_reader(r)
}

fn convert(e: csv::Error) -> CsvError {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CsvError::Io(io),
        kind => malformed(line, format!("{kind:?}")),
    }
}

/// Reads `id,date,outlet,group,text` rows. The `group` column may be omitted.
pub fn read_documents<R: Read>(r: R) -> Result<Vec<Document>, CsvError> {
    let mut rdr = reader(r);
    let headers = rdr.headers().map_err(convert)?.clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);
    let (id, date, outlet, text) = match (col("id"), col("date"), col("outlet"), col("text")) {
        (Some(a), Some(b), Some(c), Some(d)) => (a, b, c, d),
        _ => return Err(malformed(1, "header must contain id,date,outlet,text (and optionally group)")),
    };
    let group = col("group");
    let mut docs = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(convert)?;
        let line = rec.position().map_or(0, |p| p.line());
        let date_str = rec.get(date).unwrap_or_default().trim();
        let parsed = NaiveDate::parse_from_str(date_str, "%Y-%m-%d")
            .map_err(|_| malformed(line, format!("invalid date `{date_str}`")))?;
        let outlet_v = rec.get(outlet).unwrap_or_default().to_string();
        if outlet_v.is_empty() {
            return Err(malformed(line, "empty outlet"));
        }
        docs.push(Document {
            id: rec.get(id).unwrap_or_default().to_string(),
            date: parsed,
            outlet: outlet_v,
            group: group.and_then(|g| rec.get(g)).unwrap_or_default().to_string(),
            text: rec.get(text).unwrap_or_default().to_string(),
        });
    }
    Ok(docs)
}

/// Renders an optional value; undefined becomes an empty field.
pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// `#`-prefixed metadata block.
pub fn meta_header(lines: &[(&str, String)]) -> String {
    let mut out = String::new();
    for (k, v) in lines {
        let _ = writeln!(out, "# {k}: {v}");
    }
    out
}

pub fn write_mentions(series: &MentionSeries) -> String {
    let mut out = String::from("outlet,period,n_docs,n_matching_docs,n_occurrences,share\n");
    let outlet = quote(&series.outlet);
    for r in &series.rows {
        let _ = writeln!(
            out,
            "{outlet},{},{},{},{},{}",
            r.period,
            r.n_docs,
            r.n_matching_docs,
            r.n_occurrences,
            fmt_opt(r.share())
        );
    }
    out
}

/// Phrase sets as rows, periods as columns.
pub fn write_count_table(t: &CountTable) -> String {
    let mut out = String::from("phrase_set");
    for p in &t.periods {
        let _ = write!(out, ",{p}");
    }
    out.push('\n');
    for (name, row) in t.phrase_sets.iter().zip(&t.cells) {
        out.push_str(&quote(name));
        for c in row {
            let _ = write!(out, ",{c}");
        }
        out.push('\n');
    }
    out
}

/// Periods as rows: `period,n,<set1>,…` (the speech-table layout).
pub fn write_period_table(t: &CountTable) -> String {
    let mut out = String::from("period,n");
    for name in &t.phrase_sets {
        let _ = write!(out, ",{}", quote(name));
    }
    out.push('\n');
    for (i, p) in t.periods.iter().enumerate() {
        let _ = write!(out, "{p},{}", t.n_docs[i]);
        for row in &t.cells {
            let _ = write!(out, ",{}", row[i]);
        }
        out.push('\n');
    }
    out
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn write_series_rows(rows: &[(Period, Option<f64>)]) -> String {
    let mut out = String::from("period,value\n");
    for (p, v) in rows {
        let _ = writeln!(out, "{p},{}", fmt_opt(*v));
    }
    out
}

pub fn write_index(idx: &IndexSeries) -> String {
    write_series_rows(&idx.rows)
}

#[derive(Debug, Error)]
pub enum SeriesReadError {
    #[error(transparent)]
    Csv(#[from] CsvError),
    #[error(transparent)]
    Index(#[from] IndexError),
}

/// Reads a `period,value` CSV (extra columns are ignored; a second column is required).
pub fn read_series<R: Read>(label: &str, r: R) -> Result<ShareSeries, SeriesReadError> {
    let mut rdr = reader(r);
    rdr.headers().map_err(convert)?;
    let mut rows = Vec::new();
    let mut granularity: Option<Granularity> = None;
    for rec in rdr.records() {
        let rec = rec.map_err(convert)?;
        let line = rec.position().map_or(0, |p| p.line());
        let p = Period::parse(rec.get(0).unwrap_or_default()).map_err(|e| malformed(line, e.to_string()))?;
        if *granularity.get_or_insert(p.granularity()) != p.granularity() {
            return Err(malformed(line, "mixed period granularities").into());
        }
        let raw = rec.get(1).ok_or_else(|| malformed(line, "missing value column"))?.trim();
        let v = if raw.is_empty() {
            None
        } else {
            Some(raw.parse::<f64>().map_err(|_| malformed(line, format!("invalid number `{raw}`")))?)
        };
        rows.push((p, v));
    }
    Ok(ShareSeries::new(label, granularity.unwrap_or(Granularity::Monthly), rows)?)
}

#[derive(Debug, Error)]
pub enum PanelReadError {
    #[error(transparent)]
    Csv(#[from] CsvError),
    #[error(transparent)]
    Var(#[from] VarError),
}

pub fn write_panel(panel: &Panel) -> String {
    let mut out = String::from("period");
    for n in &panel.variable_names {
        let _ = write!(out, ",{}", quote(n));
    }
    out.push('\n');
    for (p, v) in &panel.rows {
        out.push_str(&p.to_string());
        for x in v {
            let _ = write!(out, ",{x}");
        }
        out.push('\n');
    }
    out
}

/// Reads `period,<var1>,…,<vark>`; every cell must be a number.
pub fn read_panel<R: Read>(r: R) -> Result<Panel, PanelReadError> {
    let mut rdr = reader(r);
    let headers = rdr.headers().map_err(convert)?.clone();
    if headers.len() < 2 {
        return Err(CsvError::Malformed { line: 1, msg: "panel needs a period column and at least one variable".into() }.into());
    }
    let names: Vec<String> = headers.iter().skip(1).map(|h| h.trim().to_string()).collect();
    let mut rows = Vec::new();
    let mut granularity = None;
    for rec in rdr.records() {
        let rec = rec.map_err(convert)?;
        let line = rec.position().map_or(0, |p| p.line());
        let p = Period::parse(&rec[0]).map_err(|e| malformed(line, e.to_string()))?;
        granularity.get_or_insert(p.granularity());
        let vals = rec
            .iter()
            .skip(1)
            .map(|c| c.trim().parse::<f64>().map_err(|_| malformed(line, format!("invalid number `{c}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push((p, vals));
    }
    Ok(Panel::new(names, granularity.unwrap_or(Granularity::Quarterly), rows)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documents_parse_with_quotes_and_comments() {
        let csv = "# note\nid,date,outlet,group,text\n1,2001-02-03,Times,UK,\"Climate change, again\"\n";
        let docs = read_documents(csv.as_bytes()).unwrap();
        assert_eq!(docs[0].text, "Climate change, again");
        assert_eq!(docs[0].group, "UK");
    }

    #[test]
    fn bad_date_reports_line() {
        let csv = "id,date,outlet,group,text\n1,2001-02-03,T,,x\n2,2001-13-01,T,,y\n";
        match read_documents(csv.as_bytes()) {
            Err(CsvError::Malformed { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn ragged_row_is_malformed() {
        let csv = "id,date,outlet,group,text\n1,2001-02-03,T\n";
        assert!(matches!(read_documents(csv.as_bytes()), Err(CsvError::Malformed { line: 2, .. })));
    }

    #[test]
    fn series_round_trip() {
        let s = ShareSeries::from_values("x", Period::parse("2001-Q1").unwrap(), &[Some(0.25), None, Some(1.0 / 3.0)])
            .unwrap();
        let text = write_series_rows(&s.rows);
        assert_eq!(text, "period,value\n2001-Q1,0.25\n2001-Q2,\n2001-Q3,0.3333333333333333\n");
        assert_eq!(read_series("x", text.as_bytes()).unwrap(), s);
    }

    #[test]
    fn panel_round_trip() {
        let csv = "period,a,b\n2000-Q1,1,2\n2000-Q2,3.5,-4\n";
        let p = read_panel(csv.as_bytes()).unwrap();
        assert_eq!(write_panel(&p), "period,a,b\n2000-Q1,1,2\n2000-Q2,3.5,-4\n");
    }
}
