use std::path::Path;

use image::{Rgb, RgbImage};

use super::output::{PlotKind, Table};

const WIDTH: u32 = 800;
const HEIGHT: u32 = 600;
const MARGIN: u32 = 40;

const PALETTE: [[u8; 3]; 6] = [
    [31, 119, 180],
    [214, 39, 40],
    [44, 160, 44],
    [148, 103, 189],
    [255, 127, 14],
    [23, 190, 207],
];

pub fn render(table: &Table, path: &Path) -> Result<(), String> {
    if table.rows.is_empty() {
        return Err("nothing to plot".into());
    }
    let img = match table.plot {
        PlotKind::Lines => lines(table),
        PlotKind::Heatmap { outer, inner, value } => heatmap(table, outer, inner, value),
    };
    img.save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| format!("cannot write plot {}: {e}", path.display()))
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn frame() -> RgbImage {
    let mut img = RgbImage::from_pixel(WIDTH, HEIGHT, Rgb([255, 255, 255]));
    let black = Rgb([0, 0, 0]);
    for x in MARGIN..=WIDTH - MARGIN {
        img.put_pixel(x, HEIGHT - MARGIN, black);
        img.put_pixel(x, MARGIN, black);
    }
    for y in MARGIN..=HEIGHT - MARGIN {
        img.put_pixel(MARGIN, y, black);
        img.put_pixel(WIDTH - MARGIN, y, black);
    }
    img
}

fn segment(img: &mut RgbImage, (x0, y0): (f64, f64), (x1, y1): (f64, f64), c: Rgb<u8>) {
    let steps = (x1 - x0).abs().max((y1 - y0).abs()).ceil().max(1.0) as usize;
    for s in 0..=steps {
        let t = s as f64 / steps as f64;
        let x = (x0 + (x1 - x0) * t).round();
        let y = (y0 + (y1 - y0) * t).round();
        if x >= 0.0 && y >= 0.0 && (x as u32) < WIDTH && (y as u32) < HEIGHT {
            img.put_pixel(x as u32, y as u32, c);
        }
    }
}

fn lines(table: &Table) -> RgbImage {
    let mut img = frame();
    let xs = table.column(0);
    let (x_lo, x_hi) = range(xs.iter().copied());
    let (y_lo, y_hi) = range(table.rows.iter().flat_map(|r| r[1..].iter().copied()));
    let span_x = (WIDTH - 2 * MARGIN) as f64;
    let span_y = (HEIGHT - 2 * MARGIN) as f64;
    let px = |x: f64| MARGIN as f64 + (x - x_lo) / (x_hi - x_lo) * span_x;
    let py = |y: f64| (HEIGHT - MARGIN) as f64 - (y - y_lo) / (y_hi - y_lo) * span_y;
    for col in 1..table.columns.len() {
        let c = Rgb(PALETTE[(col - 1) % PALETTE.len()]);
        let pts: Vec<(f64, f64)> = table
            .rows
            .iter()
            .filter(|r| r[0].is_finite() && r[col].is_finite())
            .map(|r| (px(r[0]), py(r[col])))
            .collect();
        if pts.len() == 1 {
            segment(&mut img, pts[0], pts[0], c);
        }
        for w in pts.windows(2) {
            segment(&mut img, w[0], w[1], c);
        }
    }
    img
}

fn lerp(a: [u8; 3], b: [u8; 3], t: f64) -> Rgb<u8> {
    let t = t.clamp(0.0, 1.0);
    Rgb([0, 1, 2].map(|i| (a[i] as f64 + (b[i] as f64 - a[i] as f64) * t).round() as u8))
}

fn heatmap(table: &Table, outer: usize, inner: usize, value: usize) -> RgbImage {
    let mut img = frame();
    let mut outer_vals: Vec<f64> = Vec::new();
    let mut inner_vals: Vec<f64> = Vec::new();
    for r in &table.rows {
        if outer_vals.last() != Some(&r[outer]) {
            outer_vals.push(r[outer]);
        }
        if outer_vals.len() == 1 {
            inner_vals.push(r[inner]);
        }
    }
    let (no, ni) = (outer_vals.len(), inner_vals.len().max(1));
    let (lo, hi) = range(table.column(value).into_iter());
    let signed = lo < 0.0;
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    let color = |v: f64| {
        if signed {
            if v < 0.0 {
                lerp([255, 255, 255], [33, 102, 172], -v / scale)
            } else {
                lerp([255, 255, 255], [178, 24, 43], v / scale)
            }
        } else {
            lerp([255, 255, 255], [8, 48, 107], (v - lo) / (hi - lo))
        }
    };
    let w = WIDTH - 2 * MARGIN - 1;
    let h = HEIGHT - 2 * MARGIN - 1;
    for py in 0..h {
        // inner axis increases upwards
        let j = ((h - 1 - py) as usize * ni) / h as usize;
        for px in 0..w {
            let i = (px as usize * no) / w as usize;
            if let Some(row) = table.rows.get(i * ni + j) {
                img.put_pixel(MARGIN + 1 + px, MARGIN + 1 + py, color(row[value]));
            }
        }
    }
    img
}
