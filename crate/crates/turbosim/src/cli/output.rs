//! Deterministic artifact emission: CSV tables with a fixed schema,
//! SVG plots rendered purely from CSV text, and the per-run manifest.
//!
//! Every float is written with Rust's shortest round-trip formatting and
//! every line ends in a bare LF, so identical inputs yield byte-identical
//! files on any platform.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use crate::error::{Error, Result};
use crate::montecarlo::BerPoint;
use crate::signal::SchemeKind;

/// Header of the simulated-BER table.
pub const BER_CSV_HEADER: &str =
    "scheme,M,N,alpha,beta,q,snr_db,trials,bit_errors,ber,ci_low,ci_high";

/// Header of the asymptote-line table.
pub const ASYMPTOTE_CSV_HEADER: &str = "alpha,beta,N,coefficient,snr_db,ber_asymptote";

/// Lower-case scheme tag used in CSV rows and config files.
pub fn scheme_tag(kind: SchemeKind) -> &'static str {
    match kind {
        SchemeKind::Vblast => "vblast",
        SchemeKind::Astbc => "astbc",
        SchemeKind::Siso => "siso",
    }
}

/// One simulated curve's identity for CSV labeling.
#[derive(Debug, Clone, Copy)]
pub struct CurveLabel {
    pub kind: SchemeKind,
    pub m_tx: usize,
    pub n_rx: usize,
    pub alpha: f64,
    pub beta: f64,
    pub q: usize,
}

/// Renders the BER table for a set of labeled curves.
pub fn ber_csv(curves: &[(CurveLabel, Vec<BerPoint>)]) -> String {
    let mut out = String::from(BER_CSV_HEADER);
    out.push('\n');
    for (label, points) in curves {
        for p in points {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                scheme_tag(label.kind),
                label.m_tx,
                label.n_rx,
                label.alpha,
                label.beta,
                label.q,
                p.snr_db,
                p.trials,
                p.bit_errors,
                p.ber,
                p.ci95.0,
                p.ci95.1
            );
        }
    }
    out
}

/// Renders the asymptote table: one row per (N, snr_db) sample.
pub fn asymptote_csv(alpha: f64, beta: f64, rows: &[(u32, f64, f64, f64)]) -> String {
    let mut out = String::from(ASYMPTOTE_CSV_HEADER);
    out.push('\n');
    for &(n_rx, coefficient, snr_db, ber) in rows {
        let _ = writeln!(out, "{alpha},{beta},{n_rx},{coefficient},{snr_db},{ber}");
    }
    out
}

/// Renders an arbitrary table with the given header and stringified rows.
pub fn generic_csv(header: &str, rows: &[Vec<String>]) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

struct Series {
    label: String,
    points: Vec<(f64, f64)>,
}

/// Log-y scatter-line plot of (snr_db, ber)-style CSV content. Pure
/// function of the CSV text: no clocks, no randomness, no recomputation
/// of the data.
///
/// `x_col` and `y_col` name columns of the header; rows are grouped into
/// series by all remaining non-numeric-identity columns before `x_col`.
pub fn svg_from_csv(csv: &str, x_col: &str, y_col: &str, title: &str) -> Result<String> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| Error::Config("empty CSV".into()))?
        .split(',')
        .collect();
    let xi = header
        .iter()
        .position(|&h| h == x_col)
        .ok_or_else(|| Error::Config(format!("CSV has no column `{x_col}`")))?;
    let yi = header
        .iter()
        .position(|&h| h == y_col)
        .ok_or_else(|| Error::Config(format!("CSV has no column `{y_col}`")))?;
    let key_cols: Vec<usize> = (0..header.len()).filter(|&i| i != xi && i != yi).collect();

    let mut series: Vec<Series> = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != header.len() {
            return Err(Error::Config(format!("ragged CSV row `{line}`")));
        }
        let x: f64 = fields[xi]
            .parse()
            .map_err(|_| Error::Config(format!("non-numeric `{x_col}` in `{line}`")))?;
        let y: f64 = fields[yi]
            .parse()
            .map_err(|_| Error::Config(format!("non-numeric `{y_col}` in `{line}`")))?;
        if y <= 0.0 {
            continue; // log-y cannot show exact zeros
        }
        let label: String = key_cols
            .iter()
            .map(|&i| format!("{}={}", header[i], fields[i]))
            .collect::<Vec<_>>()
            .join(" ");
        match series.iter_mut().find(|s| s.label == label) {
            Some(s) => s.points.push((x, y)),
            None => series.push(Series { label, points: vec![(x, y)] }),
        }
    }
    if series.iter().all(|s| s.points.is_empty()) {
        return Err(Error::Config("no plottable rows in CSV".into()));
    }

    let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for s in &series {
        for &(x, y) in &s.points {
            x_min = x_min.min(x);
            x_max = x_max.max(x);
            y_min = y_min.min(y.log10());
            y_max = y_max.max(y.log10());
        }
    }
    if x_max == x_min {
        x_max = x_min + 1.0;
    }
    if y_max == y_min {
        y_max = y_min + 1.0;
    }
    const W: f64 = 640.0;
    const H: f64 = 480.0;
    const ML: f64 = 60.0;
    const MR: f64 = 20.0;
    const MT: f64 = 40.0;
    const MB: f64 = 50.0;
    let sx = |x: f64| ML + (x - x_min) / (x_max - x_min) * (W - ML - MR);
    let sy = |y: f64| H - MB - (y.log10() - y_min) / (y_max - y_min) * (H - MT - MB);

    const PALETTE: &[&str] = &[
        "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
    ];
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
         viewBox=\"0 0 {W} {H}\">\n<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"16\">{title}</text>\n",
        W / 2.0
    );
    // axes
    let _ = writeln!(
        svg,
        "<line x1=\"{ML}\" y1=\"{0}\" x2=\"{1}\" y2=\"{0}\" stroke=\"black\"/>",
        H - MB,
        W - MR
    );
    let _ = writeln!(
        svg,
        "<line x1=\"{ML}\" y1=\"{MT}\" x2=\"{ML}\" y2=\"{}\" stroke=\"black\"/>",
        H - MB
    );
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"12\">{x_col}</text>",
        (ML + W - MR) / 2.0,
        H - 12.0
    );
    let _ = writeln!(
        svg,
        "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"12\" transform=\"rotate(-90 16 {0})\">log10 {y_col}</text>",
        (MT + H - MB) / 2.0
    );
    // decade gridlines and y labels
    let mut decade = y_min.floor() as i64;
    while (decade as f64) <= y_max {
        let y = sy(10f64.powi(decade as i32));
        let _ = writeln!(
            svg,
            "<line x1=\"{ML}\" y1=\"{y}\" x2=\"{}\" y2=\"{y}\" stroke=\"#dddddd\"/>\
             <text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-family=\"sans-serif\" \
             font-size=\"10\">1e{decade}</text>",
            W - MR,
            ML - 6.0,
            y + 3.0
        );
        decade += 1;
    }
    for (si, s) in series.iter().enumerate() {
        let color = PALETTE[si % PALETTE.len()];
        let path: Vec<String> = s
            .points
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| {
                format!("{}{:.2},{:.2}", if i == 0 { "M" } else { "L" }, sx(x), sy(y))
            })
            .collect();
        let _ = writeln!(
            svg,
            "<path d=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
            path.join(" ")
        );
        for &(x, y) in &s.points {
            let _ = writeln!(
                svg,
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\" fill=\"{color}\"/>",
                sx(x),
                sy(y)
            );
        }
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\" \
             fill=\"{color}\">{}</text>",
            W - MR - 240.0,
            MT + 14.0 * si as f64 + 4.0,
            s.label
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Provenance record written next to every artifact set.
#[derive(Debug, Clone)]
pub struct RunManifest {
    pub command: String,
    pub config_hash: u64,
    pub seed: u64,
    pub tool_version: String,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn begin(command: &str, config_hash: u64, seed: u64) -> RunManifest {
        RunManifest {
            command: command.to_string(),
            config_hash,
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            started_unix: unix_now(),
            finished_unix: 0,
            outputs: Vec::new(),
        }
    }

    pub fn record_output(&mut self, path: &Path) {
        self.outputs.push(path.to_path_buf());
    }

    /// Finalizes the timestamp and renders the manifest. Timestamps are
    /// the only fields allowed to differ between reruns of one config.
    pub fn render(&mut self) -> String {
        self.finished_unix = unix_now();
        let outputs = self
            .outputs
            .iter()
            .map(|p| format!("\"{}\"", p.display()))
            .collect::<Vec<_>>()
            .join(", ");
        format!(
            "{{\n  \"command\": \"{}\",\n  \"config_hash\": \"{:016x}\",\n  \"seed\": {},\n  \
             \"tool_version\": \"{}\",\n  \"started_unix\": {},\n  \"finished_unix\": {},\n  \
             \"outputs\": [{}]\n}}\n",
            self.command,
            self.config_hash,
            self.seed,
            self.tool_version,
            self.started_unix,
            self.finished_unix,
            outputs
        )
    }
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}
