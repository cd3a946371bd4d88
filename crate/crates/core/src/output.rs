//! CSV emission shared by every command.
//!
//! Files start with `# key: value` comment lines (seed, units, conventions),
//! followed by a header whose first column is `schema_version`.

use std::io::Write;

use crate::error::Result;
use crate::los::Conditional;

/// Version of every CSV layout produced by this crate.
pub const SCHEMA_VERSION: u32 = 1;

pub struct CsvSink<W: Write> {
    writer: csv::Writer<W>,
    width: usize,
}

impl<W: Write> CsvSink<W> {
    pub fn new(mut out: W, comments: &[(String, String)], columns: &[&str]) -> Result<Self> {
        for (k, v) in comments {
            writeln!(out, "# {k}: {v}")?;
        }
        let mut writer = csv::Writer::from_writer(out);
        let mut header = vec!["schema_version"];
        header.extend_from_slice(columns);
        writer.write_record(&header)?;
        Ok(CsvSink {
            writer,
            width: columns.len(),
        })
    }

    pub fn row(&mut self, fields: &[String]) -> Result<()> {
        assert_eq!(
            fields.len(),
            self.width,
            "row width does not match the header"
        );
        let version = SCHEMA_VERSION.to_string();
        self.writer.write_record(
            std::iter::once(version.as_str()).chain(fields.iter().map(String::as_str)),
        )?;
        Ok(())
    }

    pub fn finish(self) -> Result<W> {
        self.writer
            .into_inner()
            .map_err(|e| crate::error::Error::Io(e.to_string()))
    }
}

/// Shortest round-trip representation.
pub fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

/// Conditional statistics print `NaN` when coverage is zero.
pub fn fmt_cond(v: Conditional) -> String {
    match v {
        Conditional::Value(x) => fmt_f64(x),
        Conditional::ZeroCoverage => "NaN".to_string(),
    }
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_comments_and_version() {
        let mut sink =
            CsvSink::new(Vec::new(), &[("seed".into(), "7".into())], &["a", "b"]).unwrap();
        sink.row(&[fmt_f64(0.1), fmt_cond(Conditional::ZeroCoverage)])
            .unwrap();
        let text = String::from_utf8(sink.finish().unwrap()).unwrap();
        assert_eq!(text, "# seed: 7\nschema_version,a,b\n1,0.1,NaN\n");
    }

    #[test]
    fn floats_round_trip() {
        for v in [1.0 / 3.0, 1e-300, 123456.789, -4.2e-12, 3e20, 0.0, f64::NAN] {
            let back = fmt_f64(v).parse::<f64>().unwrap();
            assert!(back == v || (v.is_nan() && back.is_nan()));
        }
        assert_eq!(fmt_f64(4.004676050667833e-12), "4.004676050667833e-12");
        assert_eq!(fmt_f64(0.02), "0.02");
    }
}
