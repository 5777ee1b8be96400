use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use num_complex::Complex64 as C64;
use serde::Serialize;

use super::pseudo::PseudoGrid;
use crate::error::Result;
use crate::symbol::CurveGrid;

pub struct EigenDump<'a> {
    pub trial: u64,
    pub eigenvalues: &'a [C64],
}

/// CSV with header `trial,re,im,dist_to_curve,theta_star`.
pub fn write_eigen_csv<W: Write>(
    mut w: W,
    dumps: &[EigenDump<'_>],
    grid: &CurveGrid,
) -> Result<()> {
    writeln!(w, "trial,re,im,dist_to_curve,theta_star")?;
    for d in dumps {
        for z in d.eigenvalues {
            let (dist, theta) = grid.dist(*z);
            writeln!(w, "{},{},{},{},{}", d.trial, z.re, z.im, dist, theta)?;
        }
    }
    Ok(())
}

/// One JSON document per line.
pub fn write_jsonl<W: Write, T: Serialize>(mut w: W, items: &[T]) -> Result<()> {
    for item in items {
        serde_json::to_writer(&mut w, item)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

#[derive(Serialize)]
struct GridSidecar<'a> {
    bbox: &'a super::pseudo::Bbox,
    nx: usize,
    ny: usize,
    n: usize,
    delta: Option<f64>,
    master_seed: Option<u64>,
    values: &'static str,
    layout: &'static str,
}

/// `log10 s_min` as a CSV matrix (empty cells for failed nodes) and a JSON
/// sidecar describing the grid.
pub fn write_grid(grid: &PseudoGrid, csv: &Path, sidecar: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(csv)?);
    for iy in 0..grid.ny {
        let row: Vec<String> = (0..grid.nx)
            .map(|ix| grid.get(ix, iy).map(|v| v.to_string()).unwrap_or_default())
            .collect();
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()?;
    let meta = GridSidecar {
        bbox: &grid.bbox,
        nx: grid.nx,
        ny: grid.ny,
        n: grid.n,
        delta: grid.delta,
        master_seed: grid.master_seed,
        values: "log10 of the smallest singular value of P - z",
        layout: "row iy from y_min to y_max, column ix from x_min to x_max, edges included",
    };
    let mut f = BufWriter::new(File::create(sidecar)?);
    serde_json::to_writer_pretty(&mut f, &meta)?;
    f.write_all(b"\n")?;
    f.flush()?;
    Ok(())
}

const SVG_SIZE: f64 = 640.0;
const SVG_MARGIN: f64 = 24.0;

/// Eigenvalues as dots over the sampled symbol curve, in a square frame.
pub fn render_svg(eigenvalues: &[C64], curve: &[C64], title: &str) -> String {
    let all = eigenvalues.iter().chain(curve);
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for z in all.filter(|z| z.re.is_finite() && z.im.is_finite()) {
        x0 = x0.min(z.re);
        x1 = x1.max(z.re);
        y0 = y0.min(z.im);
        y1 = y1.max(z.im);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (-1.0, 1.0, -1.0, 1.0);
    }
    let span = (x1 - x0).max(y1 - y0).max(1e-12);
    let (cx, cy) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
    let scale = (SVG_SIZE - 2.0 * SVG_MARGIN) / span;
    let px = |z: &C64| {
        (
            SVG_SIZE / 2.0 + (z.re - cx) * scale,
            SVG_SIZE / 2.0 - (z.im - cy) * scale,
        )
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_SIZE}" height="{SVG_SIZE}" viewBox="0 0 {SVG_SIZE} {SVG_SIZE}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, "<title>{}</title>", escape(title));
    if !curve.is_empty() {
        let pts: Vec<String> = curve
            .iter()
            .chain(std::iter::once(&curve[0]))
            .map(|z| {
                let (x, y) = px(z);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="red" stroke-width="1"/>"#,
            pts.join(" ")
        );
    }
    for z in eigenvalues {
        let (x, y) = px(z);
        let _ = writeln!(
            s,
            r#"<circle cx="{x:.2}" cy="{y:.2}" r="1.5" fill="blue"/>"#
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{SVG_MARGIN}" y="{:.0}" font-family="sans-serif" font-size="12">{}</text>"#,
        SVG_MARGIN * 0.7,
        escape(title)
    );
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
