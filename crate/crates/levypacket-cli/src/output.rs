//! CSV frame and JSON summary writers.
//!
//! Frames carry 17 significant digits (`{:.16e}`) so runs are reproducible
//! bit-for-bit.  By default rows are decimated to at most [`MAX_ROWS`] per
//! frame; `--raw` writes every grid point.  All paths recorded in the summary
//! are relative to the output root, so two runs of the same config into
//! different directories produce byte-identical files.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;

use levypacket::analysis::{
    density_modes, density_norms, density_variances, wave_modes, wave_norms, wave_variances,
    ModeReport, NormReport, Variance,
};
use levypacket::evolution::{DensityField, TailClass, WaveField};
use levypacket::spectral::GridPair;
use levypacket::{Error, Result};

/// Default row cap per CSV frame.
pub const MAX_ROWS: usize = 8192;

fn io_err(context: &str, err: std::io::Error) -> Error {
    Error::Config(format!("{context}: {err}"))
}

fn stride_for(n: usize, raw: bool) -> usize {
    if raw {
        1
    } else {
        n.div_ceil(MAX_ROWS)
    }
}

fn tail_label(tail: TailClass) -> String {
    match tail {
        TailClass::Exponential => "exponential".to_string(),
        TailClass::Algebraic { power } => format!("algebraic({power})"),
    }
}

#[derive(Serialize)]
struct GridSummary {
    n: usize,
    half_width: f64,
    dx: f64,
    du: f64,
}

#[derive(Serialize)]
struct NormRow {
    time: f64,
    grid_part: f64,
    tail_estimate: f64,
    total: f64,
}

#[derive(Serialize)]
struct VarianceRow {
    time: f64,
    finite: bool,
    value: Option<f64>,
}

#[derive(Serialize)]
struct ModeRow {
    time: f64,
    count: usize,
    positions: Vec<f64>,
    prominences: Vec<f64>,
}

#[derive(Serialize)]
struct SideSummary {
    kind: &'static str,
    tail: String,
    /// Largest spurious imaginary part seen in the density transform.
    #[serde(skip_serializing_if = "Option::is_none")]
    max_imag: Option<f64>,
    /// Spectral renormalization applied to the initial wave, 1.0 if none.
    #[serde(skip_serializing_if = "Option::is_none")]
    renorm: Option<f64>,
    frames: Vec<String>,
    norms: Vec<NormRow>,
    variances: Vec<VarianceRow>,
    modes: Vec<ModeRow>,
}

#[derive(Serialize)]
struct RunSummary {
    label: String,
    mode: &'static str,
    times: Vec<f64>,
    grid: GridSummary,
    stride: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    density: Option<SideSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    wave: Option<SideSummary>,
}

fn norm_rows(norms: &[NormReport]) -> Vec<NormRow> {
    norms
        .iter()
        .map(|r| NormRow {
            time: r.time,
            grid_part: r.grid_part,
            tail_estimate: r.tail_estimate,
            total: r.total,
        })
        .collect()
}

fn variance_rows(times: &[f64], variances: &[Variance]) -> Vec<VarianceRow> {
    times
        .iter()
        .zip(variances)
        .map(|(&time, v)| match *v {
            Variance::Finite(value) => VarianceRow {
                time,
                finite: true,
                value: Some(value),
            },
            Variance::Infinite => VarianceRow {
                time,
                finite: false,
                value: None,
            },
        })
        .collect()
}

fn mode_rows(modes: &[ModeReport]) -> Vec<ModeRow> {
    modes
        .iter()
        .map(|m| ModeRow {
            time: m.time,
            count: m.count,
            positions: m.positions.clone(),
            prominences: m.prominences.clone(),
        })
        .collect()
}

fn write_frame(path: &Path, header: &str, rows: impl Iterator<Item = String>) -> Result<()> {
    let mut buf = String::with_capacity(1 << 16);
    buf.push_str(header);
    buf.push('\n');
    for row in rows {
        buf.push_str(&row);
        buf.push('\n');
    }
    let mut file =
        fs::File::create(path).map_err(|e| io_err(&format!("create {}", path.display()), e))?;
    file.write_all(buf.as_bytes())
        .map_err(|e| io_err(&format!("write {}", path.display()), e))
}

fn density_frame_rows<'a>(
    grid: &'a GridPair,
    slice: &'a [f64],
    stride: usize,
) -> impl Iterator<Item = String> + 'a {
    (0..grid.n())
        .step_by(stride)
        .map(move |j| format!("{:.16e},{:.16e}", grid.x(j), slice[j]))
}

fn wave_frame_rows<'a>(
    grid: &'a GridPair,
    slice: &'a [num_complex::Complex64],
    stride: usize,
) -> impl Iterator<Item = String> + 'a {
    (0..grid.n()).step_by(stride).map(move |j| {
        let z = slice[j];
        format!(
            "{:.16e},{:.16e},{:.16e},{:.16e}",
            grid.x(j),
            z.re,
            z.im,
            z.norm_sqr()
        )
    })
}

/// Write all artifacts of a finished run under `out_dir` and return the
/// summary path.  `frames_rel`/`summary_rel` come from the config and are
/// interpreted relative to `out_dir`.
pub fn write_run(
    out_dir: &Path,
    label: &str,
    frames_rel: &str,
    summary_rel: &str,
    raw: bool,
    density: Option<&DensityField>,
    wave: Option<&WaveField>,
) -> Result<std::path::PathBuf> {
    let frames_dir = out_dir.join(frames_rel);
    fs::create_dir_all(&frames_dir)
        .map_err(|e| io_err(&format!("create {}", frames_dir.display()), e))?;

    let (grid, times, mode) = match (density, wave) {
        (Some(d), Some(_)) => (&d.grid, &d.times, "both"),
        (Some(d), None) => (&d.grid, &d.times, "process"),
        (None, Some(w)) => (&w.grid, &w.times, "schrodinger"),
        (None, None) => return Err(Error::Config("nothing to write".into())),
    };
    let stride = stride_for(grid.n(), raw);

    let mut density_summary = None;
    if let Some(field) = density {
        let mut frames = Vec::new();
        for (i, slice) in field.slices.iter().enumerate() {
            let name = format!("density_{i:02}.csv");
            write_frame(
                &frames_dir.join(&name),
                "x,value",
                density_frame_rows(&field.grid, slice, stride),
            )?;
            frames.push(format!("{frames_rel}/{name}"));
        }
        let norms = density_norms(field)?;
        let variances = density_variances(field)?;
        let modes = density_modes(field, None);
        density_summary = Some(SideSummary {
            kind: "density",
            tail: tail_label(field.tail),
            max_imag: Some(field.max_imag),
            renorm: None,
            frames,
            norms: norm_rows(&norms),
            variances: variance_rows(&field.times, &variances),
            modes: mode_rows(&modes),
        });
    }

    let mut wave_summary = None;
    if let Some(field) = wave {
        let mut frames = Vec::new();
        for (i, slice) in field.slices.iter().enumerate() {
            let name = format!("wave_{i:02}.csv");
            write_frame(
                &frames_dir.join(&name),
                "x,re,im,abs2",
                wave_frame_rows(&field.grid, slice, stride),
            )?;
            frames.push(format!("{frames_rel}/{name}"));
        }
        let norms = wave_norms(field)?;
        let variances = wave_variances(field)?;
        let modes = wave_modes(field, None);
        wave_summary = Some(SideSummary {
            kind: "wave",
            tail: tail_label(field.tail),
            max_imag: None,
            renorm: Some(field.renorm),
            frames,
            norms: norm_rows(&norms),
            variances: variance_rows(&field.times, &variances),
            modes: mode_rows(&modes),
        });
    }

    let summary = RunSummary {
        label: label.to_string(),
        mode,
        times: times.clone(),
        grid: GridSummary {
            n: grid.n(),
            half_width: grid.half_width(),
            dx: grid.dx(),
            du: grid.du(),
        },
        stride,
        density: density_summary,
        wave: wave_summary,
    };

    let summary_path = out_dir.join(summary_rel);
    if let Some(parent) = summary_path.parent() {
        fs::create_dir_all(parent)
            .map_err(|e| io_err(&format!("create {}", parent.display()), e))?;
    }
    let mut text = serde_json::to_string_pretty(&summary)
        .map_err(|e| Error::Config(format!("serialize summary: {e}")))?;
    text.push('\n');
    fs::write(&summary_path, text)
        .map_err(|e| io_err(&format!("write {}", summary_path.display()), e))?;
    Ok(summary_path)
}
