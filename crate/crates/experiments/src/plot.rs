//! Static SVG figures.

use std::path::Path;

use plotters::prelude::*;
use tickshare_core::engine::DailyRecord;

use crate::sweep::{BorderlineReport, VolCurveReport};
use crate::ExperimentError;

fn plot_err<E: std::fmt::Display>(path: &Path) -> impl FnOnce(E) -> ExperimentError + '_ {
    move |e| ExperimentError::Plot(format!("{}: {e}", path.display()))
}

/// `W_A` per day.
pub fn share_evolution(
    path: &Path,
    series: &[(String, Vec<DailyRecord>)],
) -> Result<(), ExperimentError> {
    let root = SVGBackend::new(path, (800, 500)).into_drawing_area();
    root.fill(&WHITE).map_err(plot_err(path))?;
    let days = series
        .iter()
        .flat_map(|(_, d)| d.last().map(|r| r.day))
        .max()
        .unwrap_or(1)
        .max(1);
    let mut chart = ChartBuilder::on(&root)
        .caption("Market share of trading volume (A)", ("sans-serif", 22))
        .margin(15)
        .x_label_area_size(40)
        .y_label_area_size(50)
        .build_cartesian_2d(0u64..days, 0f64..1f64)
        .map_err(plot_err(path))?;
    chart
        .configure_mesh()
        .x_desc("day")
        .y_desc("W_A")
        .draw()
        .map_err(plot_err(path))?;
    for (i, (label, records)) in series.iter().enumerate() {
        let color = Palette99::pick(i).to_rgba();
        chart
            .draw_series(LineSeries::new(
                records.iter().map(|r| (r.day, r.w_a)),
                color.stroke_width(2),
            ))
            .map_err(plot_err(path))?
            .label(label.as_str())
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color));
    }
    chart
        .configure_series_labels()
        .border_style(BLACK)
        .background_style(WHITE.mix(0.8))
        .draw()
        .map_err(plot_err(path))?;
    root.present().map_err(plot_err(path))
}

// Fractional index of `value` on a sorted log-spaced axis.
fn log_position(axis: &[f64], value: f64) -> f64 {
    let last = axis.len() - 1;
    if axis.len() == 1 || value <= axis[0] {
        return if axis.len() == 1 {
            0.0
        } else {
            let step = (axis[1] / axis[0]).log10();
            (value / axis[0]).log10() / step
        };
    }
    for i in 0..last {
        if value <= axis[i + 1] {
            let span = (axis[i + 1] / axis[i]).log10();
            return i as f64 + (value / axis[i]).log10() / span;
        }
    }
    let step = (axis[last] / axis[last - 1]).log10();
    last as f64 + (value / axis[last]).log10() / step
}

fn sorted_unique(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Grid of seed-averaged `W_A` with both borderlines drawn over it.
pub fn grid_heatmap(path: &Path, report: &BorderlineReport) -> Result<(), ExperimentError> {
    let xs = sorted_unique(report.cells.iter().map(|c| c.dp_b));
    let ys = sorted_unique(report.cells.iter().map(|c| c.dp_a));
    let root = SVGBackend::new(path, (820, 760)).into_drawing_area();
    root.fill(&WHITE).map_err(plot_err(path))?;
    let (nx, ny) = (xs.len() as f64, ys.len() as f64);
    let mut chart = ChartBuilder::on(&root)
        .caption(
            format!(
                "W_A at day {} (red 1, blue 0), sigma_bar = {:.4}%",
                report.measurement_day, report.sigma_bar
            ),
            ("sans-serif", 22),
        )
        .margin(15)
        .x_label_area_size(50)
        .y_label_area_size(70)
        .build_cartesian_2d(-0.5f64..nx - 0.5, -0.5f64..ny - 0.5)
        .map_err(plot_err(path))?;
    let x_labels = xs.clone();
    let y_labels = ys.clone();
    chart
        .configure_mesh()
        .disable_mesh()
        .x_desc("dP_B (%)")
        .y_desc("dP_A (%)")
        .x_labels(xs.len())
        .y_labels(ys.len())
        .x_label_formatter(&|v| {
            let i = v.round();
            if (v - i).abs() < 1e-9 && i >= 0.0 && (i as usize) < x_labels.len() {
                format!("{}", x_labels[i as usize])
            } else {
                String::new()
            }
        })
        .y_label_formatter(&|v| {
            let i = v.round();
            if (v - i).abs() < 1e-9 && i >= 0.0 && (i as usize) < y_labels.len() {
                format!("{}", y_labels[i as usize])
            } else {
                String::new()
            }
        })
        .draw()
        .map_err(plot_err(path))?;

    let index = |axis: &[f64], v: f64| axis.iter().position(|&a| a == v).unwrap_or(0) as f64;
    chart
        .draw_series(report.cells.iter().map(|c| {
            let (x, y) = (index(&xs, c.dp_b), index(&ys, c.dp_a));
            let color = match c.mean_w_a() {
                Some(w) => HSLColor(0.66 * (1.0 - w), 0.8, 0.5).filled(),
                None => RGBColor(160, 160, 160).filled(),
            };
            Rectangle::new([(x - 0.5, y - 0.5), (x + 0.5, y + 0.5)], color)
        }))
        .map_err(plot_err(path))?;
    chart
        .draw_series(report.cells.iter().filter_map(|c| {
            let w = c.mean_w_a()?;
            let (x, y) = (index(&xs, c.dp_b), index(&ys, c.dp_a));
            Some(Text::new(
                format!("{w:.2}"),
                (x - 0.2, y + 0.1),
                ("sans-serif", 13).into_font().color(&BLACK),
            ))
        }))
        .map_err(plot_err(path))?;

    // dP_A = dP_B, dashed.
    let diagonal: Vec<(f64, f64)> = (0..=40)
        .map(|i| {
            let x = -0.5 + i as f64 * nx / 40.0;
            let value = xs[0]
                * 10f64.powf(
                    (x) * if xs.len() > 1 {
                        (xs[1] / xs[0]).log10()
                    } else {
                        1.0
                    },
                );
            (x, log_position(&ys, value))
        })
        .collect();
    for pair in diagonal.chunks(2) {
        chart
            .draw_series(LineSeries::new(pair.to_vec(), BLACK.stroke_width(3)))
            .map_err(plot_err(path))?;
    }
    // dP_A = sigma_bar, solid.
    let y = log_position(&ys, report.sigma_bar);
    chart
        .draw_series(LineSeries::new(
            vec![(-0.5, y), (nx - 0.5, y)],
            BLACK.stroke_width(3),
        ))
        .map_err(plot_err(path))?;
    root.present().map_err(plot_err(path))
}

/// `sigma_t` (left, log) and `W_A` (right) against `dP_A` (log).
pub fn vol_curve(path: &Path, report: &VolCurveReport) -> Result<(), ExperimentError> {
    let points: Vec<(f64, f64, f64)> = report
        .rows
        .iter()
        .filter_map(|r| Some((r.dp_a, r.mean_sigma()?, r.mean_w_a()?)))
        .collect();
    let root = SVGBackend::new(path, (820, 520)).into_drawing_area();
    root.fill(&WHITE).map_err(plot_err(path))?;
    let x_min = points
        .iter()
        .map(|p| p.0)
        .fold(f64::INFINITY, f64::min)
        .min(1e-4);
    let x_max = points
        .iter()
        .map(|p| p.0)
        .fold(0.0, f64::max)
        .max(x_min * 10.0);
    let s_min = points
        .iter()
        .map(|p| p.1)
        .chain([report.sigma_bar])
        .fold(f64::INFINITY, f64::min)
        .max(1e-6);
    let s_max = points
        .iter()
        .map(|p| p.1)
        .chain([report.sigma_bar])
        .fold(0.0, f64::max)
        .max(s_min * 2.0);
    let mut chart = ChartBuilder::on(&root)
        .caption(
            format!("Volatility and market share, dP_B = {}%", report.dp_b),
            ("sans-serif", 22),
        )
        .margin(15)
        .x_label_area_size(45)
        .y_label_area_size(60)
        .right_y_label_area_size(60)
        .build_cartesian_2d(
            (x_min / 1.5..x_max * 1.5).log_scale(),
            (s_min / 1.5..s_max * 1.5).log_scale(),
        )
        .map_err(plot_err(path))?
        .set_secondary_coord((x_min / 1.5..x_max * 1.5).log_scale(), 0f64..1f64);
    chart
        .configure_mesh()
        .x_desc("dP_A (%)")
        .y_desc("sigma_t (%)")
        .draw()
        .map_err(plot_err(path))?;
    chart
        .configure_secondary_axes()
        .y_desc("W_A")
        .draw()
        .map_err(plot_err(path))?;

    chart
        .draw_series(LineSeries::new(
            points.iter().map(|p| (p.0, p.1)),
            BLUE.stroke_width(2),
        ))
        .map_err(plot_err(path))?
        .label("sigma_t")
        .legend(|(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], BLUE));
    chart
        .draw_series(
            points
                .iter()
                .map(|p| Circle::new((p.0, p.1), 4, BLUE.filled())),
        )
        .map_err(plot_err(path))?;
    chart
        .draw_series(DashedLineSeries::new(
            vec![
                (x_min / 1.5, report.sigma_bar),
                (x_max * 1.5, report.sigma_bar),
            ],
            4,
            4,
            BLUE.mix(0.6).stroke_width(1),
        ))
        .map_err(plot_err(path))?
        .label("sigma_bar")
        .legend(|(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], BLUE.mix(0.6)));
    chart
        .draw_secondary_series(LineSeries::new(
            points.iter().map(|p| (p.0, p.2)),
            RED.stroke_width(2),
        ))
        .map_err(plot_err(path))?
        .label("W_A")
        .legend(|(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], RED));
    chart
        .draw_secondary_series(
            points
                .iter()
                .map(|p| TriangleMarker::new((p.0, p.2), 5, RED.filled())),
        )
        .map_err(plot_err(path))?;
    chart
        .configure_series_labels()
        .border_style(BLACK)
        .background_style(WHITE.mix(0.8))
        .draw()
        .map_err(plot_err(path))?;
    root.present().map_err(plot_err(path))
}
