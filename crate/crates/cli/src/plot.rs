//! SVG line charts of CSV columns.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use plotters::prelude::*;

type Series = BTreeMap<String, Vec<(f64, f64)>>;

/// Splits the rows of `input` into one `(x, y)` series per distinct value of
/// the `group` columns. Missing group columns are ignored.
pub fn read_series(input: &Path, x: &str, y: &str, group: &[String]) -> Result<Series> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(input)
        .with_context(|| format!("reading {}", input.display()))?;
    let headers = reader.headers()?.clone();
    let column = |name: &str| headers.iter().position(|h| h == name);
    let (Some(xi), Some(yi)) = (column(x), column(y)) else {
        bail!("{} has no `{x}` or `{y}` column; found {:?}", input.display(), headers);
    };
    let keys: Vec<(usize, &str)> = group.iter().filter_map(|g| column(g).map(|i| (i, g.as_str()))).collect();

    let mut out = Series::new();
    for record in reader.records() {
        let record = record?;
        let parse = |i: usize| -> Result<f64> {
            let v = &record[i];
            v.trim().parse().with_context(|| format!("bad number `{v}`"))
        };
        let label = if keys.is_empty() {
            y.to_string()
        } else {
            keys.iter().map(|&(i, name)| format!("{name}={}", &record[i])).collect::<Vec<_>>().join(" ")
        };
        out.entry(label).or_default().push((parse(xi)?, parse(yi)?));
    }
    if out.is_empty() {
        bail!("{} has no data rows", input.display());
    }
    Ok(out)
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if hi > lo {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

pub fn render(input: &Path, x: &str, y: &str, group: &[String], log_y: bool, output: &Path) -> Result<()> {
    let mut series = read_series(input, x, y, group)?;
    if log_y {
        for points in series.values_mut() {
            points.retain(|p| p.1 > 0.0);
            points.iter_mut().for_each(|p| p.1 = p.1.log10());
        }
    }
    let all = || series.values().flatten();
    let (x0, x1) = bounds(all().map(|p| p.0));
    let (y0, y1) = bounds(all().map(|p| p.1));

    let root = SVGBackend::new(output, (800, 500)).into_drawing_area();
    root.fill(&WHITE)?;
    let mut chart = ChartBuilder::on(&root)
        .margin(20)
        .x_label_area_size(40)
        .y_label_area_size(60)
        .build_cartesian_2d(x0..x1, y0..y1)?;
    let y_desc = if log_y { format!("log10 {y}") } else { y.to_string() };
    chart.configure_mesh().x_desc(x).y_desc(y_desc).draw()?;
    for (i, (label, points)) in series.iter().enumerate() {
        let color = Palette99::pick(i).to_rgba();
        chart
            .draw_series(LineSeries::new(points.iter().copied(), color.stroke_width(2)))?
            .label(label.as_str())
            .legend(move |(px, py)| PathElement::new(vec![(px, py), (px + 20, py)], color));
    }
    chart.configure_series_labels().background_style(WHITE.mix(0.8)).border_style(BLACK).draw()?;
    root.present()?;
    Ok(())
}
