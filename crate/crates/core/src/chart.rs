//! Self-contained SVG line charts of a shift trajectory.

use std::fmt::Write;

use thiserror::Error;

use crate::dynamics::InteractionOutcome;
use crate::sim::StepRecord;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 70.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChartError {
    #[error("no series selected")]
    NoSeries,
    #[error("trajectory is empty")]
    NoRecords,
    #[error("unknown series `{0}` (expected trust, fatigue or productivity)")]
    UnknownSeries(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Series {
    Trust,
    Fatigue,
    /// Items picked so far.
    Productivity,
}

impl Series {
    pub const ALL: [Series; 3] = [Series::Trust, Series::Fatigue, Series::Productivity];

    pub fn name(self) -> &'static str {
        match self {
            Series::Trust => "trust",
            Series::Fatigue => "fatigue",
            Series::Productivity => "productivity",
        }
    }

    fn color(self) -> &'static str {
        match self {
            Series::Trust => "#1f77b4",
            Series::Fatigue => "#d62728",
            Series::Productivity => "#2ca02c",
        }
    }

    /// Values at steps 0..=n, step 0 being the initial state.
    fn values(self, records: &[StepRecord]) -> Vec<f64> {
        let first = &records[0];
        match self {
            Series::Trust => std::iter::once(first.trust_pre)
                .chain(records.iter().map(|r| r.trust_post))
                .collect(),
            Series::Fatigue => std::iter::once(first.fatigue_pre)
                .chain(records.iter().map(|r| r.fatigue_post))
                .collect(),
            Series::Productivity => std::iter::once(0.0)
                .chain(records.iter().scan(0.0, |acc, r| {
                    *acc += r.items_picked;
                    Some(*acc)
                }))
                .collect(),
        }
    }
}

impl std::str::FromStr for Series {
    type Err = ChartError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "trust" => Ok(Series::Trust),
            "fatigue" => Ok(Series::Fatigue),
            "productivity" | "productivity-cumulative" => Ok(Series::Productivity),
            other => Err(ChartError::UnknownSeries(other.to_string())),
        }
    }
}

fn nice_ceiling(v: f64) -> f64 {
    if v <= 10.0 {
        10.0
    } else {
        (v / 10.0).ceil() * 10.0
    }
}

/// Trust is drawn against the left axis on [0, 1]; fatigue and cumulative
/// productivity share the right axis. Severe failures get dashed verticals.
pub fn emit_svg_chart(
    records: &[StepRecord],
    series: &[Series],
    title: &str,
) -> Result<String, ChartError> {
    if series.is_empty() {
        return Err(ChartError::NoSeries);
    }
    if records.is_empty() {
        return Err(ChartError::NoRecords);
    }
    let n = records.len() as f64;
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let x_of = |step: f64| LEFT + step / n * plot_w;

    let right_max = nice_ceiling(
        series
            .iter()
            .filter(|s| **s != Series::Trust)
            .flat_map(|s| s.values(records))
            .fold(0.0, f64::max),
    );
    let y_left = |v: f64| TOP + (1.0 - v) * plot_h;
    let y_right = |v: f64| TOP + (1.0 - v / right_max) * plot_h;
    let has_right = series.iter().any(|s| *s != Series::Trust);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );

    // axes
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM);
    let _ = writeln!(
        svg,
        r#"<path d="M{x0},{y0} L{x0},{y1} L{x1},{y1}{}" fill="none" stroke="black"/>"#,
        if has_right {
            format!(" L{x1},{y0}")
        } else {
            String::new()
        }
    );
    let x_tick = if n <= 20.0 { 1.0 } else { (n / 10.0).ceil() };
    let mut step = 0.0;
    while step <= n {
        let x = x_of(step);
        let _ = writeln!(
            svg,
            r#"<line x1="{x}" y1="{y1}" x2="{x}" y2="{}" stroke="black"/><text x="{x}" y="{}" text-anchor="middle">{step}</text>"#,
            y1 + 5.0,
            y1 + 18.0
        );
        step += x_tick;
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">step</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 12.0
    );
    for i in 0..=5 {
        let frac = i as f64 / 5.0;
        let y = y_left(frac);
        let _ = writeln!(
            svg,
            r##"<line x1="{}" y1="{y}" x2="{x0}" y2="{y}" stroke="black"/><text x="{}" y="{}" text-anchor="end">{:.1}</text><line x1="{x0}" y1="{y}" x2="{x1}" y2="{y}" stroke="#eeeeee"/>"##,
            x0 - 5.0,
            x0 - 8.0,
            y + 4.0,
            frac
        );
        if has_right {
            let _ = writeln!(
                svg,
                r#"<line x1="{x1}" y1="{y}" x2="{}" y2="{y}" stroke="black"/><text x="{}" y="{}">{}</text>"#,
                x1 + 5.0,
                x1 + 8.0,
                y + 4.0,
                frac * right_max
            );
        }
    }
    let _ = writeln!(
        svg,
        r#"<text transform="translate(16,{}) rotate(-90)" text-anchor="middle">trust</text>"#,
        (y0 + y1) / 2.0
    );
    if has_right {
        let _ = writeln!(
            svg,
            r#"<text transform="translate({},{}) rotate(90)" text-anchor="middle">fatigue / items</text>"#,
            WIDTH - 16.0,
            (y0 + y1) / 2.0
        );
    }

    for r in records
        .iter()
        .filter(|r| r.outcome == InteractionOutcome::SevereFailure)
    {
        let x = x_of(r.step as f64);
        let _ = writeln!(
            svg,
            r##"<line class="severe" x1="{x}" y1="{y0}" x2="{x}" y2="{y1}" stroke="#7f7f7f" stroke-dasharray="4 3"/>"##
        );
    }

    for s in series {
        let values = s.values(records);
        let points: Vec<String> = values
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let y = if *s == Series::Trust {
                    y_left(v)
                } else {
                    y_right(v)
                };
                format!("{:.2},{:.2}", x_of(i as f64), y)
            })
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline class="series-{}" fill="none" stroke="{}" stroke-width="2" points="{}"/>"#,
            s.name(),
            s.color(),
            points.join(" ")
        );
    }

    for (i, s) in series.iter().enumerate() {
        let y = TOP + 12.0 + 16.0 * i as f64;
        let x = x0 + 10.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{x}" y1="{y}" x2="{}" y2="{y}" stroke="{}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            x + 20.0,
            s.color(),
            x + 26.0,
            y + 4.0,
            s.name()
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
