//! Result files: curve CSVs, placement tables, summary JSON and SVG plots.

use std::fmt::Write as _;
use std::path::Path;

use planar_qec::layout::Arrangement;
use planar_qec::CurvePoint;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// SHA-256 of the verb and its JSON-encoded configuration, hex encoded.
pub fn fingerprint<T: Serialize>(verb: &str, config: &T) -> String {
    let mut hasher = Sha256::new();
    hasher.update(verb.as_bytes());
    hasher.update(b"\n");
    hasher.update(serde_json::to_vec(config).expect("config serializes"));
    hex::encode(hasher.finalize())
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Runtime(e.to_string())
}

fn stamp(fingerprint: &str, seed: u64, extra: &str) -> String {
    let mut line = format!("# fingerprint={fingerprint} seed={seed}");
    if !extra.is_empty() {
        line.push(' ');
        line.push_str(extra);
    }
    line.push('\n');
    line
}

pub fn curve_csv(
    points: &[CurvePoint],
    fingerprint: &str,
    seed: u64,
    curve: &str,
    breakdown: bool,
) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["p_physical", "t_us", "P_L_hat", "ci_low", "ci_high", "n_trials"];
    if breakdown {
        header.extend(["x_l", "z_l", "y_l", "detected"]);
    }
    w.write_record(&header).map_err(csv_error)?;
    for pt in points {
        let mut row = vec![
            pt.p_physical.to_string(),
            pt.t_us.to_string(),
            pt.p_l_hat.to_string(),
            pt.ci_low.to_string(),
            pt.ci_high.to_string(),
            pt.n_trials.to_string(),
        ];
        if breakdown {
            let f = &pt.failures;
            row.extend([f.x_l, f.z_l, f.y_l, f.detected].map(|c| c.to_string()));
        }
        w.write_record(&row).map_err(csv_error)?;
    }
    let body =
        String::from_utf8(w.into_inner().map_err(|e| CliError::Runtime(e.to_string()))?).expect("csv output is utf-8");
    Ok(stamp(fingerprint, seed, &format!("curve=\"{curve}\"")) + &body)
}

pub fn layout_csv(arrangement: &Arrangement, fingerprint: &str, seed: u64) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["lattice_index", "qubit_id", "t1_us", "t2_us"])
        .map_err(csv_error)?;
    for (i, s) in arrangement.specs().iter().enumerate() {
        w.write_record([i.to_string(), s.id.to_string(), s.t1.to_string(), s.t2.to_string()])
            .map_err(csv_error)?;
    }
    let body =
        String::from_utf8(w.into_inner().map_err(|e| CliError::Runtime(e.to_string()))?).expect("csv output is utf-8");
    Ok(stamp(fingerprint, seed, "") + &body)
}

/// Reads `(lattice_index, qubit_id)` rows from a placement table.
pub fn read_layout_table(text: &str) -> Result<Vec<(usize, u32)>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Data(e.to_string()))?;
        let parse = |i: usize| record.get(i).and_then(|s| s.parse::<u64>().ok());
        match (parse(0), parse(1)) {
            (Some(index), Some(id)) => rows.push((index as usize, id as u32)),
            _ => return Err(CliError::Data(format!("bad layout row {:?}", record))),
        }
    }
    Ok(rows)
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Runtime(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 64.0;
const COLOURS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

/// Log-log plot of `P_L` against `p` with the line `P_L = p`.
pub fn render_svg(curves: &[(String, Vec<CurvePoint>)], fingerprint: &str, seed: u64) -> String {
    let xs: Vec<f64> = curves.iter().flat_map(|c| c.1.iter().map(|p| p.p_physical)).collect();
    let ys: Vec<f64> = curves
        .iter()
        .flat_map(|c| c.1.iter().map(|p| p.p_l_hat))
        .filter(|&y| y > 0.0)
        .chain(xs.iter().copied())
        .collect();
    let decade = |v: f64, up: bool| {
        let e = v.log10();
        if up {
            e.ceil()
        } else {
            e.floor()
        }
    };
    let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
    let max = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (x0, x1) = if xs.is_empty() {
        (-3.0, 0.0)
    } else {
        (decade(min(&xs), false), decade(max(&xs), true))
    };
    let (y0, y1) = if ys.is_empty() {
        (-3.0_f64, 0.0_f64)
    } else {
        (decade(min(&ys), false), 0.0)
    };
    let (x1, y1) = (x1.max(x0 + 1.0), y1.max(y0 + 1.0));
    let sx = |v: f64| MARGIN + (v.log10() - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |v: f64| HEIGHT - MARGIN - (v.log10() - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, "<!-- fingerprint={fingerprint} seed={seed} -->");
    let _ = writeln!(
        s,
        r#"<defs><clipPath id="area"><rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}"/></clipPath></defs>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for e in (x0 as i32)..=(x1 as i32) {
        let x = sx(10f64.powi(e));
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{MARGIN}" x2="{x:.2}" y2="{:.2}" stroke="#ddd"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">1e{e}</text>"##,
            HEIGHT - MARGIN,
            HEIGHT - MARGIN + 18.0
        );
    }
    for e in (y0 as i32)..=(y1 as i32) {
        let y = sy(10f64.powi(e));
        let _ = writeln!(
            s,
            r##"<line x1="{MARGIN}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">1e{e}</text>"##,
            WIDTH - MARGIN,
            MARGIN - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">physical error probability p</text>"#,
        WIDTH / 2.0,
        HEIGHT - 16.0
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(16 {}) rotate(-90)" text-anchor="middle">logical error rate</text>"#,
        HEIGHT / 2.0
    );
    let lo = 10f64.powf(x0.max(y0));
    let hi = 10f64.powf(x1.min(y1));
    let _ = writeln!(
        s,
        r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#555" stroke-dasharray="6 4" clip-path="url(#area)"/>"##,
        sx(lo),
        sy(lo),
        sx(hi),
        sy(hi)
    );

    for (k, (label, points)) in curves.iter().enumerate() {
        let colour = COLOURS[k % COLOURS.len()];
        let visible: Vec<&CurvePoint> = points.iter().filter(|p| p.p_l_hat > 0.0).collect();
        let path: Vec<String> = visible
            .iter()
            .map(|p| format!("{:.2},{:.2}", sx(p.p_physical), sy(p.p_l_hat)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="1.5" clip-path="url(#area)"/>"#,
            path.join(" ")
        );
        for p in &visible {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{colour}" clip-path="url(#area)"/>"#,
                sx(p.p_physical),
                sy(p.p_l_hat)
            );
        }
        let ly = MARGIN + 16.0 + 16.0 * k as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{colour}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            MARGIN + 10.0,
            MARGIN + 30.0,
            MARGIN + 36.0,
            ly + 4.0,
            escape(label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use planar_qec::FailureBreakdown;

    fn point(p: f64, pl: f64) -> CurvePoint {
        CurvePoint {
            p_physical: p,
            p_mean_qubit: p,
            t_us: 1.5,
            n_trials: 100,
            failures: FailureBreakdown {
                x_l: 1,
                z_l: 2,
                y_l: 0,
                detected: 0,
            },
            p_l_hat: pl,
            ci_low: 0.0,
            ci_high: 0.1,
            low_confidence: true,
        }
    }

    #[test]
    fn curve_csv_layout() {
        let csv = curve_csv(&[point(0.01, 0.03)], "abc", 4, "d=3", false).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# fingerprint=abc seed=4 curve=\"d=3\"");
        assert_eq!(lines[1], "p_physical,t_us,P_L_hat,ci_low,ci_high,n_trials");
        assert_eq!(lines[2], "0.01,1.5,0.03,0,0.1,100");
        let csv = curve_csv(&[point(0.01, 0.03)], "abc", 4, "d=3", true).unwrap();
        assert!(csv.lines().nth(2).unwrap().ends_with(",1,2,0,0"));
    }

    #[test]
    fn fingerprint_is_stable() {
        let a = fingerprint("sweep", &vec![1, 2]);
        assert_eq!(a.len(), 64);
        assert_eq!(a, fingerprint("sweep", &vec![1, 2]));
        assert_ne!(a, fingerprint("ensemble", &vec![1, 2]));
    }

    #[test]
    fn svg_has_curves_and_identity_line() {
        let svg = render_svg(&[("a<b".into(), vec![point(0.01, 0.001), point(0.1, 0.2)])], "f", 1);
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("stroke-dasharray"));
        assert!(svg.contains("<polyline"));
        assert!(svg.contains("a&lt;b"));
        assert!(svg.contains("fingerprint=f seed=1"));
    }

    #[test]
    fn layout_table_round_trip() {
        let text = "# fingerprint=x seed=0\nlattice_index,qubit_id,t1_us,t2_us\n0,5,1,1\n1,3,2,2\n";
        assert_eq!(read_layout_table(text).unwrap(), vec![(0, 5), (1, 3)]);
    }
}
