use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ResultRow;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

pub const COLUMNS: [&str; 8] = [
    "sweep_name",
    "sweep_value",
    "variant",
    "analytic",
    "simulated",
    "stderr",
    "n_iter",
    "seed",
];

#[derive(Serialize)]
struct Record<'a> {
    sweep_name: &'a str,
    sweep_value: f64,
    variant: &'a str,
    analytic: f64,
    simulated: f64,
    stderr: f64,
    n_iter: u64,
    seed: u64,
}

impl<'a> From<&'a ResultRow> for Record<'a> {
    fn from(r: &'a ResultRow) -> Self {
        Record {
            sweep_name: &r.sweep_name,
            sweep_value: r.sweep_value,
            variant: &r.variant,
            analytic: r.analytic.value,
            simulated: r.simulated.value,
            stderr: r.simulated.standard_error,
            n_iter: r.simulated.sample_count,
            seed: r.seed,
        }
    }
}

pub fn write_results<W: Write>(rows: &[ResultRow], format: OutputFormat, mut writer: W) -> Result<()> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
            w.write_record(COLUMNS)?;
            for r in rows {
                w.serialize(Record::from(r))?;
            }
            w.flush().map_err(csv::Error::from)?;
        }
        OutputFormat::Json => {
            let records: Vec<Record> = rows.iter().map(Record::from).collect();
            serde_json::to_writer_pretty(&mut writer, &records)?;
            writeln!(writer).map_err(serde_json::Error::io)?;
        }
    }
    Ok(())
}

/// Writes to `path`, or to stdout when `path` is `None`.
pub fn emit_results(rows: &[ResultRow], format: OutputFormat, path: Option<&Path>) -> Result<()> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| Error::Io { path, source }
    };
    match path {
        Some(p) => {
            let file = File::create(p).map_err(io_err(p))?;
            let mut out = BufWriter::new(file);
            write_results(rows, format, &mut out)?;
            out.flush().map_err(io_err(p))
        }
        None => write_results(rows, format, io::stdout().lock()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::MetricEstimate;

    fn row() -> ResultRow {
        ResultRow {
            sweep_name: "mean_lifespan_s".into(),
            sweep_value: 100.0,
            variant: "independent".into(),
            analytic: MetricEstimate::exact(0.123456789012345),
            simulated: MetricEstimate::from_successes(7, 20),
            seed: 42,
            wall_time_s: 1.5,
        }
    }

    #[test]
    fn empty_csv_has_header() {
        let mut buf = Vec::new();
        write_results(&[], OutputFormat::Csv, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{}\n", COLUMNS.join(",")));
    }

    #[test]
    fn csv_round_trip() {
        let mut buf = Vec::new();
        write_results(&[row()], OutputFormat::Csv, &mut buf).unwrap();
        let mut reader = csv::Reader::from_reader(buf.as_slice());
        assert_eq!(reader.headers().unwrap().iter().collect::<Vec<_>>(), COLUMNS);
        let rec = reader.records().next().unwrap().unwrap();
        let num = |i: usize| rec[i].parse::<f64>().unwrap();
        assert_eq!(&rec[0], "mean_lifespan_s");
        assert_eq!(num(1), 100.0);
        assert_eq!(&rec[2], "independent");
        assert!((num(3) - 0.123456789012345).abs() < 1e-12);
        assert!((num(4) - 0.35).abs() < 1e-12);
        assert!((num(5) - (0.35f64 * 0.65 / 20.0).sqrt()).abs() < 1e-12);
        assert_eq!((&rec[6], &rec[7]), ("20", "42"));
    }

    #[test]
    fn json_uses_same_fields() {
        let mut buf = Vec::new();
        write_results(&[row()], OutputFormat::Json, &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        let obj = v.as_array().unwrap()[0].as_object().unwrap();
        let mut keys: Vec<&str> = obj.keys().map(String::as_str).collect();
        let mut expected = COLUMNS.to_vec();
        keys.sort_unstable();
        expected.sort_unstable();
        assert_eq!(keys, expected);
    }
}
