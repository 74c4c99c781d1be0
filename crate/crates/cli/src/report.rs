//! `report`: SVG figures and text tables from a run directory.

use std::path::Path;

use noisy_vqe::experiment::{fit_noise_curve, histogram, mean_std, FitModel, FitResult, SweepRow, HISTOGRAM_BIN_WIDTH};

use crate::artifacts::{read_recalc_csv, read_sweep_csv, read_trace_csv, ArtifactWriter, RECALC_CSV, SWEEP_CSV, TRACE_CSV};
use crate::svg::{table, Axes, Svg, HEIGHT, PALETTE, WIDTH};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ReportKind {
    Heatmap,
    #[value(name = "noise_curve")]
    NoiseCurve,
    Trace,
    Histogram,
}

impl ReportKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Heatmap => "heatmap",
            Self::NoiseCurve => "noise_curve",
            Self::Trace => "trace",
            Self::Histogram => "histogram",
        }
    }

    fn inputs(self) -> &'static [&'static str] {
        match self {
            Self::Heatmap | Self::NoiseCurve | Self::Histogram => &[SWEEP_CSV],
            Self::Trace => &[TRACE_CSV],
        }
    }
}

/// Per-intensity `(intensity, count, mean, std)` in order of first appearance.
pub fn intensity_stats(rows: &[SweepRow]) -> Vec<(f64, usize, f64, f64)> {
    let mut order: Vec<f64> = Vec::new();
    for r in rows {
        if !order.contains(&r.intensity) {
            order.push(r.intensity);
        }
    }
    order
        .into_iter()
        .map(|x| {
            let e: Vec<f64> = rows.iter().filter(|r| r.intensity == x).map(|r| r.final_energy).collect();
            let (m, s) = mean_std(&e);
            (x, e.len(), m, s)
        })
        .collect()
}

fn fmt(x: f64) -> String {
    format!("{x:.6}")
}

/// Renders every requested kind; missing inputs are reported together before any work.
pub fn cmd_report(run_dir: &Path, kinds: &[ReportKind]) -> Result<Vec<String>, String> {
    let mut missing: Vec<String> = kinds
        .iter()
        .flat_map(|k| k.inputs())
        .filter(|f| !run_dir.join(f).is_file())
        .map(|f| run_dir.join(f).display().to_string())
        .collect();
    missing.dedup();
    if !missing.is_empty() {
        return Err(format!("missing artifacts: {}", missing.join(", ")));
    }
    let mut out = ArtifactWriter::create(run_dir)?;
    let mut tables = Vec::new();
    for &k in kinds {
        let (svg, text) = match k {
            ReportKind::Heatmap => heatmap(&read_sweep_csv(&run_dir.join(SWEEP_CSV))?),
            ReportKind::NoiseCurve => noise_curve(&read_sweep_csv(&run_dir.join(SWEEP_CSV))?)?,
            ReportKind::Histogram => histograms(&read_sweep_csv(&run_dir.join(SWEEP_CSV))?),
            ReportKind::Trace => {
                let recalc = run_dir.join(RECALC_CSV);
                let recalc = if recalc.is_file() { Some(read_recalc_csv(&recalc)?) } else { None };
                trace(&read_trace_csv(&run_dir.join(TRACE_CSV))?, recalc.as_deref())
            }
        };
        out.text(format!("{}.svg", k.name()), &svg)?;
        out.text(format!("{}.txt", k.name()), &text)?;
        tables.push(text);
    }
    Ok(tables)
}

fn heatmap(rows: &[SweepRow]) -> (String, String) {
    let stats = intensity_stats(rows);
    let n = stats.len().max(1);
    let ax = Axes::panel(0, 1, (-0.5, n as f64 - 0.5), (-1.25, -0.35));
    let mut svg = Svg::new(WIDTH, HEIGHT);
    let cols: Vec<Vec<_>> = stats
        .iter()
        .map(|(x, ..)| histogram(&rows.iter().filter(|r| r.intensity == *x).map(|r| r.final_energy).collect::<Vec<_>>()))
        .collect();
    let peak = cols.iter().flatten().map(|b| b.count).max().unwrap_or(1).max(1);
    let mut lines = Vec::new();
    for (i, (col, (x, ..))) in cols.iter().zip(&stats).enumerate() {
        for b in col {
            let shade = 255 - (225 * b.count / peak) as u8;
            let (x0, y1) = ax.point(i as f64 - 0.5, b.lower());
            let (x1, y0) = ax.point(i as f64 + 0.5, b.lower() + HISTOGRAM_BIN_WIDTH);
            svg.rect(x0, y0, x1 - x0, y1 - y0, &format!("rgb({shade},{shade},255)"));
            lines.push(vec![fmt(*x), format!("{:.2}", b.lower()), b.count.to_string()]);
        }
    }
    ax.draw(&mut svg, "final energy distribution", "intensity index", "energy [Ha]");
    for (i, (x, ..)) in stats.iter().enumerate() {
        svg.text(ax.px(i as f64), ax.y0 + ax.h + 48.0, &format!("{x}"), 9.0, "middle");
    }
    (svg.finish(), table(&["intensity", "bin_lower", "count"], &lines))
}

fn fits(points: &[(f64, f64, f64)]) -> Vec<Result<FitResult, String>> {
    [FitModel::Linear, FitModel::Erf]
        .into_iter()
        .map(|m| fit_noise_curve(points, m).map_err(|e| e.to_string()))
        .collect()
}

fn noise_curve(rows: &[SweepRow]) -> Result<(String, String), String> {
    let stats = intensity_stats(rows);
    if stats.is_empty() {
        return Err("sweep table has no rows".into());
    }
    let points: Vec<(f64, f64, f64)> = stats.iter().map(|&(x, _, m, s)| (x, m, s)).collect();
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().flat_map(|p| [p.1 - p.2, p.1 + p.2]).collect();
    let ax = Axes::fit(0, 1, &xs, &ys);
    let mut svg = Svg::new(WIDTH, HEIGHT);
    ax.draw(&mut svg, "mean final energy vs noise", "intensity", "energy [Ha]");
    let results = fits(&points);
    let (lo, hi) = (xs[0], *xs.last().unwrap());
    for (k, r) in results.iter().enumerate() {
        if let Ok(f) = r {
            let curve: Vec<(f64, f64)> = (0..=200)
                .map(|i| lo + (hi - lo) * i as f64 / 200.0)
                .map(|x| ax.point(x, f.eval(x)))
                .filter(|(_, y)| *y >= ax.y0 && *y <= ax.y0 + ax.h)
                .collect();
            svg.polyline(&curve, PALETTE[k + 1], 1.5);
            let label = format!("{:?} R2={:.4}", f.model, f.r_squared);
            svg.text(ax.x0 + ax.w - 8.0, ax.y0 + 18.0 + 16.0 * k as f64, &label, 11.0, "end");
        }
    }
    for &(x, m, s) in &points {
        let (px, py) = ax.point(x, m);
        svg.line(px, ax.py(m - s), px, ax.py(m + s), PALETTE[0], 1.0);
        svg.line(px - 4.0, ax.py(m - s), px + 4.0, ax.py(m - s), PALETTE[0], 1.0);
        svg.line(px - 4.0, ax.py(m + s), px + 4.0, ax.py(m + s), PALETTE[0], 1.0);
        svg.circle(px, py, 3.0, PALETTE[0]);
    }
    let rows_txt: Vec<Vec<String>> = stats
        .iter()
        .map(|&(x, c, m, s)| vec![format!("{x}"), c.to_string(), fmt(m), fmt(s)])
        .collect();
    let mut text = table(&["intensity", "n", "mean", "std"], &rows_txt);
    text.push('\n');
    let fit_rows: Vec<Vec<String>> = results
        .iter()
        .zip(["LINEAR", "ERF"])
        .map(|(r, name)| match r {
            Ok(f) => vec![
                name.to_string(),
                f.coefficients.iter().map(|c| format!("{c:.6}")).collect::<Vec<_>>().join(" "),
                format!("{:.3e}", f.residual_sum_squares),
                format!("{:.4}", f.r_squared),
            ],
            Err(e) => vec![name.to_string(), e.clone(), "-".into(), "-".into()],
        })
        .collect();
    text.push_str(&table(&["model", "coefficients", "rss", "r2"], &fit_rows));
    Ok((svg.finish(), text))
}

fn histograms(rows: &[SweepRow]) -> (String, String) {
    let stats = intensity_stats(rows);
    let hists: Vec<_> = stats
        .iter()
        .map(|(x, ..)| histogram(&rows.iter().filter(|r| r.intensity == *x).map(|r| r.final_energy).collect::<Vec<_>>()))
        .collect();
    let peak = hists.iter().flatten().map(|b| b.count).max().unwrap_or(1).max(1);
    let ax = Axes::panel(0, 1, (-1.25, -0.35), (0.0, peak as f64 * 1.1));
    let mut svg = Svg::new(WIDTH, HEIGHT);
    ax.draw(&mut svg, "final energy histograms", "energy [Ha]", "count");
    let mut lines = Vec::new();
    for (k, (h, (x, ..))) in hists.iter().zip(&stats).enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let mut outline = Vec::new();
        for b in h {
            let (l, r) = (b.lower(), b.lower() + HISTOGRAM_BIN_WIDTH);
            outline.extend([ax.point(l, 0.0), ax.point(l, b.count as f64), ax.point(r, b.count as f64), ax.point(r, 0.0)]);
            lines.push(vec![format!("{x}"), format!("{:.2}", l), b.count.to_string()]);
        }
        svg.polyline(&outline, color, 1.2);
        svg.text(ax.x0 + 8.0, ax.y0 + 16.0 + 14.0 * k as f64, &format!("p={x}"), 10.0, "start");
        svg.rect(ax.x0 + 70.0, ax.y0 + 8.0 + 14.0 * k as f64, 16.0, 8.0, color);
    }
    (svg.finish(), table(&["intensity", "bin_lower", "count"], &lines))
}

fn trace(records: &[noisy_vqe::optimize::TraceRecord], recalc: Option<&[crate::artifacts::RecalcRow]>) -> (String, String) {
    let its: Vec<f64> = records.iter().map(|r| r.iteration as f64).collect();
    let es: Vec<f64> = records.iter().map(|r| r.energy).collect();
    let panels = if recalc.is_some() { 2 } else { 1 };
    let mut svg = Svg::new(WIDTH, HEIGHT);
    let top = Axes::fit(0, panels, &its, &es);
    top.draw(&mut svg, "recorded energy", "iteration", "energy [Ha]");
    svg.polyline(&its.iter().zip(&es).map(|(&i, &e)| top.point(i, e)).collect::<Vec<_>>(), PALETTE[0], 1.2);
    let mut header = vec!["iteration", "evals", "energy"];
    let mut lines: Vec<Vec<String>> = records
        .iter()
        .map(|r| vec![r.iteration.to_string(), r.cumulative_evals.to_string(), fmt(r.energy)])
        .collect();
    if let Some(rc) = recalc {
        let ri: Vec<f64> = rc.iter().map(|r| r.iteration as f64).collect();
        let re: Vec<f64> = rc.iter().map(|r| r.exact_energy).collect();
        let bottom = Axes::fit(1, 2, &ri, &re);
        bottom.draw(&mut svg, "recalculated exact energy", "iteration", "energy [Ha]");
        svg.polyline(&ri.iter().zip(&re).map(|(&i, &e)| bottom.point(i, e)).collect::<Vec<_>>(), PALETTE[1], 1.2);
        header.push("exact");
        for (l, r) in lines.iter_mut().zip(rc) {
            l.push(fmt(r.exact_energy));
        }
    }
    (svg.finish(), table(&header, &lines))
}
