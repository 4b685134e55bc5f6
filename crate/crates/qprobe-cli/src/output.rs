//! Deterministic CSV and JSON serialization. Floats are written in their
//! shortest round-trip form, metadata carries the config hash and never a
//! timestamp, so identical configurations produce byte-identical files.

use std::collections::BTreeMap;
use std::io::Write;

use qprobe::{Peak, SpectrumSeries};
use serde::Serialize;

use crate::config::{format_f64, RunConfig};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn meta_lines(config: &RunConfig) -> String {
    let mut out = String::new();
    out.push_str(&format!("# qprobe {VERSION}\n"));
    out.push_str(&format!("# config_hash = {}\n", config.config_hash()));
    for (k, v) in config.to_map() {
        out.push_str(&format!("# {k} = {v}\n"));
    }
    out
}

pub fn spectrum_csv(
    w: &mut dyn Write,
    config: &RunConfig,
    series: &SpectrumSeries,
) -> std::io::Result<()> {
    w.write_all(meta_lines(config).as_bytes())?;
    writeln!(w, "omega_over_J,C_total,C_bath,C_zero,C_finite,log10_C_total")?;
    write_series_rows(w, series, config.log_floor, None)?;
    Ok(())
}

fn write_series_rows(
    w: &mut dyn Write,
    series: &SpectrumSeries,
    log_floor: f64,
    sweep_prefix: Option<(usize, f64)>,
) -> std::io::Result<()> {
    for i in 0..series.len() {
        let total = series.total()[i];
        let log10 = total.max(log_floor).log10();
        if let Some((index, value)) = sweep_prefix {
            write!(w, "{index},{},", format_f64(value))?;
        }
        writeln!(
            w,
            "{},{},{},{},{},{}",
            format_f64(series.grid()[i]),
            format_f64(total),
            format_f64(series.bath()[i]),
            format_f64(series.zero_part()[i]),
            format_f64(series.finite_part()[i]),
            format_f64(log10),
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct JsonMeta {
    version: String,
    config_hash: String,
    config: BTreeMap<String, String>,
}

#[derive(Serialize)]
struct JsonSeries {
    total: Vec<f64>,
    bath: Vec<f64>,
    zero: Vec<f64>,
    finite: Vec<f64>,
}

#[derive(Serialize)]
struct JsonPeak {
    center: f64,
    height: f64,
    width: f64,
}

#[derive(Serialize)]
struct SpectrumJson {
    meta: JsonMeta,
    grid: Vec<f64>,
    series: JsonSeries,
    peaks: Vec<JsonPeak>,
}

fn json_meta(config: &RunConfig) -> JsonMeta {
    JsonMeta {
        version: VERSION.to_string(),
        config_hash: config.config_hash(),
        config: config.to_map(),
    }
}

fn json_peaks(peaks: &[Peak]) -> Vec<JsonPeak> {
    peaks
        .iter()
        .map(|p| JsonPeak {
            center: p.center,
            height: p.height,
            width: p.width,
        })
        .collect()
}

pub fn spectrum_json(
    w: &mut dyn Write,
    config: &RunConfig,
    series: &SpectrumSeries,
    peaks: &[Peak],
) -> std::io::Result<()> {
    let doc = SpectrumJson {
        meta: json_meta(config),
        grid: series.grid().to_vec(),
        series: JsonSeries {
            total: series.total().to_vec(),
            bath: series.bath().to_vec(),
            zero: series.zero_part().to_vec(),
            finite: series.finite_part().to_vec(),
        },
        peaks: json_peaks(peaks),
    };
    serde_json::to_writer_pretty(&mut *w, &doc)?;
    writeln!(w)?;
    Ok(())
}

/// One computed sweep point.
pub struct SweepPoint {
    pub index: usize,
    pub value: f64,
    pub series: SpectrumSeries,
    pub peaks: Vec<Peak>,
    /// Smallest positive spectral-density line, the finite-size gap readout.
    pub gap_over_j: Option<f64>,
}

pub fn sweep_csv(
    w: &mut dyn Write,
    config: &RunConfig,
    points: &[SweepPoint],
) -> std::io::Result<()> {
    w.write_all(meta_lines(config).as_bytes())?;
    writeln!(
        w,
        "sweep_index,param_value,omega_over_J,C_total,C_bath,C_zero,C_finite,log10_C_total"
    )?;
    for p in points {
        write_series_rows(w, &p.series, config.log_floor, Some((p.index, p.value)))?;
    }
    writeln!(w, "# gap_trace")?;
    writeln!(w, "sweep_index,param_value,min_positive_center_over_J")?;
    for p in points {
        writeln!(
            w,
            "{},{},{}",
            p.index,
            format_f64(p.value),
            p.gap_over_j.map(format_f64).unwrap_or_default()
        )?;
    }
    writeln!(w, "# peaks_summary")?;
    writeln!(w, "sweep_index,param_value,center_over_J,height,width_over_J")?;
    for p in points {
        for pk in &p.peaks {
            writeln!(
                w,
                "{},{},{},{},{}",
                p.index,
                format_f64(p.value),
                format_f64(pk.center),
                format_f64(pk.height),
                format_f64(pk.width)
            )?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct SweepPointJson {
    index: usize,
    value: f64,
    gap_over_j: Option<f64>,
    peaks: Vec<JsonPeak>,
}

#[derive(Serialize)]
struct SweepJson {
    meta: JsonMeta,
    sweep: Vec<SweepPointJson>,
}

pub fn sweep_json(
    w: &mut dyn Write,
    config: &RunConfig,
    points: &[SweepPoint],
) -> std::io::Result<()> {
    let doc = SweepJson {
        meta: json_meta(config),
        sweep: points
            .iter()
            .map(|p| SweepPointJson {
                index: p.index,
                value: p.value,
                gap_over_j: p.gap_over_j,
                peaks: json_peaks(&p.peaks),
            })
            .collect(),
    };
    serde_json::to_writer_pretty(&mut *w, &doc)?;
    writeln!(w)?;
    Ok(())
}

/// Flat report (equal-time and backaction modes).
pub fn report_csv(
    w: &mut dyn Write,
    config: &RunConfig,
    rows: &[(&str, String)],
) -> std::io::Result<()> {
    w.write_all(meta_lines(config).as_bytes())?;
    writeln!(w, "key,value")?;
    for (k, v) in rows {
        writeln!(w, "{k},{v}")?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ReportJson {
    meta: JsonMeta,
    values: BTreeMap<String, String>,
}

pub fn report_json(
    w: &mut dyn Write,
    config: &RunConfig,
    rows: &[(&str, String)],
) -> std::io::Result<()> {
    let doc = ReportJson {
        meta: json_meta(config),
        values: rows
            .iter()
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect(),
    };
    serde_json::to_writer_pretty(&mut *w, &doc)?;
    writeln!(w)?;
    Ok(())
}
