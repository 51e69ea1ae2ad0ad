//! Text artifacts: dataset and vocabulary TSV, projection TSV, confusion and
//! sweep CSV, and the JSON evaluation report.
//!
//! Floats are written with 17 significant digits so every value parses back
//! to the same `f64`.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use ndsl_core::corpus::{Dataset, Sentence};
use ndsl_core::eval::{ConfusionMatrix, CrossDomainReport, EvalReport, GroupStats, LengthStats};
use ndsl_core::features::{charset_char, CharProfile, Vocabulary, CHARSET_SIZE};
use ndsl_core::neural::SweepResult;
use ndsl_core::reduce::Projection2D;
use ndsl_core::{Label, NUM_LABELS};
use serde_json::{json, Number, Value};

use crate::{Error, Result};

/// `x` in scientific notation with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn json_f64(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(Number::from_str(&fmt_f64(x)).expect("formatted float is a JSON number"))
    } else {
        Value::Null
    }
}

/// Reads a whole file as UTF-8, reporting the first bad byte offset.
pub fn read_text(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    String::from_utf8(bytes)
        .map_err(|e| Error::InvalidUtf8 { file: path.to_path_buf(), offset: e.utf8_error().valid_up_to() })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

// ---------------------------------------------------------------- datasets

/// Parses `<label>\t<text>` records. Text is cleaned on the way in (a no-op
/// for files this crate wrote); rows that clean to nothing are malformed.
pub fn parse_dataset(text: &str) -> Result<Dataset, ndsl_core::Error> {
    let mut sentences = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let (code, body) = line.split_once('\t').ok_or(ndsl_core::Error::MalformedRow(n + 1))?;
        let label: Label = code.parse()?;
        let s = Sentence::from_raw(label, body).ok_or(ndsl_core::Error::MalformedRow(n + 1))?;
        sentences.push(s);
    }
    Ok(Dataset::new(sentences, 0))
}

pub fn format_dataset(d: &Dataset) -> String {
    let mut out = String::new();
    for s in d {
        let _ = writeln!(out, "{}\t{}", s.label().code(), s.text());
    }
    out
}

pub fn read_dataset(path: &Path) -> Result<Dataset> {
    parse_dataset(&read_text(path)?).map_err(|source| Error::Parse { path: path.to_path_buf(), source })
}

pub fn write_dataset(path: &Path, d: &Dataset) -> Result<()> {
    write_text(path, &format_dataset(d))
}

// ---------------------------------------------------------------- vocabularies

/// `<token>\t<index>` lines in index order.
pub fn format_vocabulary(v: &Vocabulary) -> String {
    let mut out = String::new();
    for (i, t) in v.tokens().iter().enumerate() {
        let _ = writeln!(out, "{t}\t{i}");
    }
    out
}

/// Inverse of [`format_vocabulary`]; indices must run `0, 1, 2, …`.
pub fn parse_vocabulary(text: &str) -> Result<Vocabulary, ndsl_core::Error> {
    let mut tokens = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let (token, index) = line.rsplit_once('\t').ok_or(ndsl_core::Error::MalformedRow(n + 1))?;
        if index.parse::<usize>().ok() != Some(tokens.len()) {
            return Err(ndsl_core::Error::MalformedRow(n + 1));
        }
        tokens.push(token.to_string());
    }
    Ok(Vocabulary::from_tokens(tokens))
}

// ---------------------------------------------------------------- projections

pub fn format_projection(p: &Projection2D) -> String {
    let mut out = String::new();
    for (label, x, y) in &p.points {
        let _ = writeln!(out, "{}\t{}\t{}", label.code(), fmt_f64(*x), fmt_f64(*y));
    }
    out
}

pub fn parse_projection(text: &str) -> Result<Projection2D, ndsl_core::Error> {
    let mut points = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let bad = || ndsl_core::Error::MalformedRow(n + 1);
        let mut f = line.split('\t');
        let (Some(l), Some(x), Some(y), None) = (f.next(), f.next(), f.next(), f.next()) else {
            return Err(bad());
        };
        points.push((l.parse()?, x.parse().map_err(|_| bad())?, y.parse().map_err(|_| bad())?));
    }
    Ok(Projection2D { points })
}

// ---------------------------------------------------------------- evaluation

fn label_header(first: &str) -> String {
    let mut h = first.to_string();
    for l in Label::ALL {
        h.push(',');
        h.push_str(l.code());
    }
    h
}

/// Rows are true labels, columns predicted labels.
pub fn format_confusion(m: &ConfusionMatrix) -> String {
    let mut out = label_header("true\\pred");
    out.push('\n');
    for l in Label::ALL {
        out.push_str(l.code());
        for c in m.counts[l.index()] {
            let _ = write!(out, ",{c}");
        }
        out.push('\n');
    }
    out
}

fn group_json(g: &Option<GroupStats>) -> Value {
    match g {
        Some(g) => json!({ "count": g.count, "mean": json_f64(g.mean), "std": json_f64(g.std) }),
        None => Value::Null,
    }
}

fn length_json(s: &LengthStats) -> Value {
    json!({
        "all": group_json(&s.all),
        "correct": group_json(&s.correct),
        "misclassified": group_json(&s.misclassified),
    })
}

pub fn report_value(r: &EvalReport) -> Value {
    let per_label: Vec<Value> = r
        .per_label
        .iter()
        .map(|m| {
            json!({
                "label": m.label.code(),
                "precision": json_f64(m.precision),
                "recall": json_f64(m.recall),
                "support": m.support,
            })
        })
        .collect();
    let confusion: Vec<Vec<u64>> = r.confusion.counts.iter().map(|row| row.to_vec()).collect();
    json!({
        "model": r.model,
        "dataset": r.dataset,
        "total": r.confusion.total(),
        "correct": r.confusion.trace(),
        "accuracy": json_f64(r.accuracy),
        "labels": Label::ALL.iter().map(|l| l.code()).collect::<Vec<_>>(),
        "confusion": confusion,
        "per_label": per_label,
        "length_stats": length_json(&r.length_stats()),
        "std_convention": "population",
    })
}

pub fn format_report(r: &EvalReport) -> String {
    let mut s = serde_json::to_string_pretty(&report_value(r)).expect("report serializes");
    s.push('\n');
    s
}

pub fn format_cross_domain(r: &CrossDomainReport) -> String {
    let v = json!({
        "in_domain": report_value(&r.in_domain),
        "out_domain": report_value(&r.out_domain),
        "delta": json_f64(r.delta),
    });
    let mut s = serde_json::to_string_pretty(&v).expect("report serializes");
    s.push('\n');
    s
}

// ---------------------------------------------------------------- experiments

pub fn format_sweep(r: &SweepResult) -> String {
    let mut out = String::from("gram,kernel,accuracy\n");
    for e in &r.entries {
        let _ = writeln!(out, "{},{},{}", e.gram, e.kernel, fmt_f64(e.accuracy));
    }
    out
}

/// One row per charset character (the space is written as `<space>`), one
/// column per label; raw counts or per-character shares.
pub fn format_profile(p: &CharProfile, normalized: bool) -> String {
    let mut out = label_header("char");
    out.push('\n');
    for c in 0..CHARSET_SIZE {
        let ch = charset_char(c).expect("index within charset");
        if ch == ' ' {
            out.push_str("<space>");
        } else {
            out.push(ch);
        }
        for l in 0..NUM_LABELS {
            if normalized {
                let _ = write!(out, ",{}", fmt_f64(p.normalized[l][c]));
            } else {
                let _ = write!(out, ",{}", p.raw[l][c]);
            }
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_through_text() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE, 0.0] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn dataset_round_trip() {
        let text = "dk\thej med dig\nis\tþetta er \n";
        let d = parse_dataset(text).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(format_dataset(&d), text);
    }

    #[test]
    fn dataset_errors_carry_line_numbers() {
        assert_eq!(parse_dataset("dk\tok\nno tab here\n"), Err(ndsl_core::Error::MalformedRow(2)));
        assert_eq!(parse_dataset("dk\t!!\n"), Err(ndsl_core::Error::MalformedRow(1)));
        assert!(matches!(parse_dataset("xx\tabc\n"), Err(ndsl_core::Error::UnknownLabel(_))));
    }

    #[test]
    fn vocabulary_round_trip() {
        let v = Vocabulary::from_tokens(vec!["a b".into(), "ø".into(), "\tx".into()]);
        let text = format_vocabulary(&v);
        assert_eq!(parse_vocabulary(&text).unwrap(), v);
        assert!(parse_vocabulary("a\t1\n").is_err());
    }

    #[test]
    fn confusion_header_and_rows() {
        let mut m = ConfusionMatrix::default();
        m.record(Label::Dk, Label::Sv);
        m.record(Label::Is, Label::Is);
        let csv = format_confusion(&m);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "true\\pred,dk,sv,nn,nb,fo,is");
        assert_eq!(lines[1], "dk,0,1,0,0,0,0");
        assert_eq!(lines[6], "is,0,0,0,0,0,1");
        assert_eq!(lines.len(), 7);
    }

    #[test]
    fn projection_round_trip() {
        let p = Projection2D { points: vec![(Label::Fo, 0.1, -1e-17), (Label::Nb, 3.0, 2.0 / 3.0)] };
        assert_eq!(parse_projection(&format_projection(&p)).unwrap(), p);
    }

    #[test]
    fn report_has_population_std_and_length_groups() {
        let r = EvalReport::from_predictions(vec![(Label::Dk, Label::Dk, 10), (Label::Sv, Label::Dk, 20)], "toy", "nb-char2");
        let v: Value = serde_json::from_str(&format_report(&r)).unwrap();
        assert_eq!(v["std_convention"], "population");
        assert_eq!(v["accuracy"].as_f64(), Some(0.5));
        assert_eq!(v["length_stats"]["misclassified"]["mean"].as_f64(), Some(20.0));
        assert_eq!(v["length_stats"]["correct"]["std"].as_f64(), Some(0.0));
        assert_eq!(v["per_label"][1]["label"], "sv");
    }
}
