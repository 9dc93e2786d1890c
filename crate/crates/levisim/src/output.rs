//! Output writers: RFC-4180 CSV tables, JSON reports and minimal SVG line
//! plots. Every file records the config hash, the seed and the crate
//! version so results are traceable, and all numeric formatting is
//! deterministic (shortest round-trip float representation) so re-runs
//! diff byte-identically.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;

/// Metadata stamped into every output file.
#[derive(Debug, Clone, Serialize)]
pub struct OutputMeta {
    pub config_hash: String,
    pub seed: u64,
    pub version: String,
}

impl OutputMeta {
    pub fn new(config_hash: &str, seed: u64) -> Self {
        Self {
            config_hash: config_hash.to_string(),
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    fn comment_lines(&self) -> String {
        format!(
            "# levisim {}\n# config_hash = {}\n# seed = {}\n",
            self.version, self.config_hash, self.seed
        )
    }
}

/// RFC-4180 field quoting: fields containing commas, quotes, or line
/// breaks are wrapped in double quotes with inner quotes doubled.
pub fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') || s.contains('\r') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Shortest round-trip representation of a float (deterministic).
pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v}")
    }
}

/// Write a CSV table with a commented metadata header.
pub fn write_csv(
    path: &Path,
    meta: &OutputMeta,
    columns: &[&str],
    rows: &[Vec<String>],
) -> Result<()> {
    let mut out = String::new();
    out.push_str(&meta.comment_lines());
    out.push_str(
        &columns
            .iter()
            .map(|c| csv_field(c))
            .collect::<Vec<_>>()
            .join(","),
    );
    out.push_str("\r\n");
    for row in rows {
        out.push_str(
            &row.iter()
                .map(|f| csv_field(f))
                .collect::<Vec<_>>()
                .join(","),
        );
        out.push_str("\r\n");
    }
    write_atomic(path, out.as_bytes())
}

/// Write a JSON report wrapping the payload with the metadata.
pub fn write_json<T: Serialize>(path: &Path, meta: &OutputMeta, payload: &T) -> Result<()> {
    #[derive(Serialize)]
    struct Wrapper<'a, T: Serialize> {
        meta: &'a OutputMeta,
        data: &'a T,
    }
    let text = serde_json::to_string_pretty(&Wrapper { meta, data: payload })
        .map_err(|e| crate::error::Error::Config(format!("serialization failed: {e}")))?;
    write_atomic(path, text.as_bytes())
}

/// One plotted series.
pub struct Series<'a> {
    pub label: &'a str,
    pub points: &'a [(f64, f64)],
}

/// Axis scale for the SVG plots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

fn map_coord(v: f64, lo: f64, hi: f64, scale: Scale) -> f64 {
    match scale {
        Scale::Linear => (v - lo) / (hi - lo),
        Scale::Log => (v.ln() - lo.ln()) / (hi.ln() - lo.ln()),
    }
}

/// Minimal self-contained SVG line plot (800x500, fixed palette).
pub fn write_svg(
    path: &Path,
    meta: &OutputMeta,
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series],
    x_scale: Scale,
    y_scale: Scale,
) -> Result<()> {
    const W: f64 = 800.0;
    const H: f64 = 500.0;
    const M: f64 = 60.0; // margin

    let finite = |v: f64, scale: Scale| v.is_finite() && (scale == Scale::Linear || v > 0.0);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for s in series {
        for &(x, y) in s.points {
            if finite(x, x_scale) && finite(y, y_scale) {
                xs.push(x);
                ys.push(y);
            }
        }
    }
    let (x_lo, x_hi) = bounds(&xs);
    let (y_lo, y_hi) = bounds(&ys);

    let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
    ));
    svg.push_str(&format!(
        "<!-- levisim {} config_hash={} seed={} -->\n",
        meta.version, meta.config_hash, meta.seed
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<rect x=\"{M}\" y=\"{M}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
        W - 2.0 * M,
        H - 2.0 * M
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"30\" text-anchor=\"middle\" font-size=\"18\">{}</text>\n",
        W / 2.0,
        xml_escape(title)
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
        W / 2.0,
        H - 15.0,
        xml_escape(x_label)
    ));
    svg.push_str(&format!(
        "<text x=\"20\" y=\"{}\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 20 {})\">{}</text>\n",
        H / 2.0,
        H / 2.0,
        xml_escape(y_label)
    ));
    // Axis extent annotations.
    svg.push_str(&format!(
        "<text x=\"{M}\" y=\"{}\" font-size=\"11\">{}</text>\n<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-size=\"11\">{}</text>\n",
        H - M + 18.0,
        fmt_f64(x_lo),
        W - M,
        H - M + 18.0,
        fmt_f64(x_hi)
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-size=\"11\">{}</text>\n<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-size=\"11\">{}</text>\n",
        M - 5.0,
        H - M,
        fmt_f64(y_lo),
        M - 5.0,
        M + 10.0,
        fmt_f64(y_hi)
    ));
    for (si, s) in series.iter().enumerate() {
        let color = colors[si % colors.len()];
        let mut pts = String::new();
        for &(x, y) in s.points {
            if !(finite(x, x_scale) && finite(y, y_scale)) {
                continue;
            }
            let px = M + map_coord(x, x_lo, x_hi, x_scale) * (W - 2.0 * M);
            let py = H - M - map_coord(y, y_lo, y_hi, y_scale) * (H - 2.0 * M);
            pts.push_str(&format!("{px:.2},{py:.2} "));
        }
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            pts.trim_end()
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"{color}\">{}</text>\n",
            W - M - 150.0,
            M + 20.0 + 16.0 * si as f64,
            xml_escape(s.label)
        ));
    }
    svg.push_str("</svg>\n");
    write_atomic(path, svg.as_bytes())
}

fn bounds(vals: &[f64]) -> (f64, f64) {
    let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() || !hi.is_finite() {
        (0.0, 1.0)
    } else if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Write the whole file in one syscall sequence via a temp file + rename,
/// so partially written outputs never appear at the target path.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension("tmp");
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Convenience: format a row of floats.
pub fn row(vals: &[f64]) -> Vec<String> {
    vals.iter().map(|&v| fmt_f64(v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta() -> OutputMeta {
        OutputMeta::new("deadbeefdeadbeef", 7)
    }

    #[test]
    fn csv_quoting_rfc4180() {
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
        assert_eq!(csv_field("two\nlines"), "\"two\nlines\"");
    }

    #[test]
    fn csv_header_and_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        write_csv(
            &path,
            &meta(),
            &["a", "b,c"],
            &[row(&[1.0, 2.5]), row(&[0.0, 1e-9])],
        )
        .unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("# config_hash = deadbeefdeadbeef"));
        assert!(text.contains("# seed = 7"));
        assert!(text.contains("a,\"b,c\"\r\n"));
        assert!(text.contains("1,2.5\r\n"));
        assert!(text.contains("0,0.000000001\r\n") || text.contains("0,1e-9\r\n"));
    }

    #[test]
    fn csv_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let p1 = dir.path().join("a.csv");
        let p2 = dir.path().join("b.csv");
        let rows = vec![row(&[std::f64::consts::PI, 1.0 / 3.0])];
        write_csv(&p1, &meta(), &["x", "y"], &rows).unwrap();
        write_csv(&p2, &meta(), &["x", "y"], &rows).unwrap();
        assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
        // Round trip through parse.
        let text = std::fs::read_to_string(&p1).unwrap();
        let data_line = text.lines().find(|l| l.starts_with('3')).unwrap();
        let v: f64 = data_line.split(',').next().unwrap().parse().unwrap();
        assert_eq!(v, std::f64::consts::PI);
    }

    #[test]
    fn json_embeds_meta() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.json");
        write_json(&path, &meta(), &vec![1.0, 2.0]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["meta"]["config_hash"], "deadbeefdeadbeef");
        assert_eq!(v["meta"]["seed"], 7);
        assert_eq!(v["data"][1], 2.0);
    }

    #[test]
    fn svg_contains_polyline_and_meta() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.svg");
        let pts: Vec<(f64, f64)> = (1..=10).map(|i| (i as f64, (i * i) as f64)).collect();
        write_svg(
            &path,
            &meta(),
            "title <x>",
            "x",
            "y",
            &[Series { label: "sq", points: &pts }],
            Scale::Log,
            Scale::Log,
        )
        .unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("<svg"));
        assert!(text.contains("<polyline"));
        assert!(text.contains("config_hash=deadbeefdeadbeef"));
        assert!(text.contains("title &lt;x&gt;"));
        assert!(text.trim_end().ends_with("</svg>"));
    }
}
