//! Asymptotic rate bounds in double precision, curve sampling, and CSV/SVG
//! emission.

use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

const ALPHA_GRID: usize = 1024;
const ALPHA_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AsymptoticError {
    #[error("{what} = {value} outside the admissible interval [{low}, {high}]")]
    Domain { what: &'static str, value: f64, low: f64, high: f64 },
    #[error("alphabet size {0} must be at least 2")]
    Alphabet(u64),
    #[error("unknown bound `{0}`")]
    UnknownBound(String),
    #[error("bound `{0}` needs {1}")]
    MissingParameter(String, &'static str),
    #[error("grid must have at least 2 points, got {0}")]
    Grid(usize),
    #[error("curves are sampled on different grids")]
    MismatchedGrids,
    #[error("no curves to emit")]
    Empty,
}

fn in_range(what: &'static str, value: f64, low: f64, high: f64) -> Result<(), AsymptoticError> {
    if !(low..=high).contains(&value) {
        return Err(AsymptoticError::Domain { what, value, low, high });
    }
    Ok(())
}

fn xlogx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// `h_q` without domain checks; `0 log 0 = 0`.
fn raw_entropy(q: f64, x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    let spread = if x > 0.0 { x * (q - 1.0).ln() } else { 0.0 };
    (spread - xlogx(x) - xlogx(1.0 - x)) / q.ln()
}

fn h(x: f64) -> f64 {
    raw_entropy(2.0, x)
}

/// `h_q(x) = -(1-x) log_q(1-x) - x log_q(x/(q-1))` on `[0, 1]`.
pub fn entropy(q: u64, x: f64) -> Result<f64, AsymptoticError> {
    if q < 2 {
        return Err(AsymptoticError::Alphabet(q));
    }
    in_range("x", x, 0.0, 1.0)?;
    Ok(raw_entropy(q as f64, x))
}

fn root(x: f64) -> f64 {
    x.max(0.0).sqrt()
}

/// `J_q(delta) = (1 - 1/q)(1 - sqrt(1 - q delta / (q-1)))`.
pub fn elias_radius(q: f64, delta: f64) -> f64 {
    (1.0 - 1.0 / q) * (1.0 - root(1.0 - q * delta / (q - 1.0)))
}

/// `gamma_q(delta) = (q - 1 - (q-2) delta - 2 sqrt((q-1) delta (1-delta))) / q`.
pub fn mrrw_radius(q: f64, delta: f64) -> f64 {
    ((q - 1.0 - (q - 2.0) * delta - 2.0 * root((q - 1.0) * delta * (1.0 - delta))) / q).max(0.0)
}

/// `K(delta, alpha) = alpha(1-alpha)(1 - sqrt(1 - delta/(alpha(1-alpha))))`.
pub fn johnson_elias_radius(delta: f64, alpha: f64) -> f64 {
    let spread = alpha * (1.0 - alpha);
    spread * (1.0 - root(1.0 - delta / spread))
}

/// `B(delta, alpha) = (1 - sqrt(1 - 4 (sqrt(alpha(1-alpha) - delta(1-delta)) - delta)^2)) / 2`.
pub fn johnson_mrrw_radius(delta: f64, alpha: f64) -> f64 {
    let inner = root(alpha * (1.0 - alpha) - delta * (1.0 - delta)) - delta;
    (0.5 * (1.0 - root(1.0 - 4.0 * inner * inner))).max(0.0)
}

/// The rate functions that can be sampled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateBound {
    Gv { q: u64 },
    HammingQ { q: u64 },
    EbQ { q: u64 },
    Mrrw1Q { q: u64 },
    Mrrw2,
    Lwb1,
    Lwb2,
    JsHamming { alpha: f64 },
    JsEb { alpha: f64 },
    JsMrrw { alpha: f64 },
}

impl RateBound {
    pub fn identifier(&self) -> &'static str {
        match self {
            Self::Gv { .. } => "gv",
            Self::HammingQ { .. } => "hamming_q",
            Self::EbQ { .. } => "eb_q",
            Self::Mrrw1Q { .. } => "mrrw1_q",
            Self::Mrrw2 => "mrrw2",
            Self::Lwb1 => "lwb1",
            Self::Lwb2 => "lwb2",
            Self::JsHamming { .. } => "js_hamming",
            Self::JsEb { .. } => "js_eb",
            Self::JsMrrw { .. } => "js_mrrw",
        }
    }

    /// Parse an identifier; the `_q` suffix is optional. `q` defaults to 2
    /// for the alphabet families, `alpha` is required for the Johnson ones.
    pub fn parse(id: &str, q: Option<u64>, alpha: Option<f64>) -> Result<Self, AsymptoticError> {
        let q_value = q.unwrap_or(2);
        if q_value < 2 {
            return Err(AsymptoticError::Alphabet(q_value));
        }
        let need_alpha = || {
            let alpha = alpha.ok_or_else(|| AsymptoticError::MissingParameter(id.to_string(), "an alpha"))?;
            in_range("alpha", alpha, f64::MIN_POSITIVE, 0.5)?;
            Ok(alpha)
        };
        let binary_only = |bound: RateBound| {
            if q_value != 2 {
                return Err(AsymptoticError::MissingParameter(id.to_string(), "q = 2"));
            }
            Ok(bound)
        };
        match id {
            "gv" => Ok(Self::Gv { q: q_value }),
            "hamming" | "hamming_q" => Ok(Self::HammingQ { q: q_value }),
            "eb" | "eb_q" => Ok(Self::EbQ { q: q_value }),
            "mrrw1" | "mrrw1_q" => Ok(Self::Mrrw1Q { q: q_value }),
            "mrrw2" => binary_only(Self::Mrrw2),
            "lwb1" => binary_only(Self::Lwb1),
            "lwb2" => binary_only(Self::Lwb2),
            "js_hamming" => Ok(Self::JsHamming { alpha: need_alpha()? }),
            "js_eb" => Ok(Self::JsEb { alpha: need_alpha()? }),
            "js_mrrw" => Ok(Self::JsMrrw { alpha: need_alpha()? }),
            other => Err(AsymptoticError::UnknownBound(other.to_string())),
        }
    }

    /// Admissible interval for `delta`.
    pub fn domain(&self) -> (f64, f64) {
        match *self {
            Self::Gv { q } | Self::HammingQ { q } | Self::EbQ { q } | Self::Mrrw1Q { q } => {
                (0.0, (q as f64 - 1.0) / q as f64)
            }
            Self::Mrrw2 | Self::Lwb1 | Self::Lwb2 => (0.0, 0.5),
            Self::JsHamming { alpha } | Self::JsEb { alpha } | Self::JsMrrw { alpha } => (0.0, alpha * (1.0 - alpha)),
        }
    }

    pub fn eval(&self, delta: f64) -> Result<f64, AsymptoticError> {
        rate_bound_eval(*self, delta)
    }
}

/// `min_alpha 1 - h(alpha) + h(B(delta/2, alpha))` together with the
/// minimising `alpha`.
pub fn mrrw2_with_argmin(delta: f64) -> Result<(f64, f64), AsymptoticError> {
    in_range("delta", delta, 0.0, 0.5)?;
    let half = delta / 2.0;
    // B(half, alpha) needs alpha(1-alpha) >= half.
    let low = 0.5 * (1.0 - root(1.0 - 4.0 * half));
    let objective = |alpha: f64| 1.0 - h(alpha) + h(johnson_mrrw_radius(half, alpha));
    let step = (0.5 - low) / (ALPHA_GRID - 1) as f64;
    let grid = |i: usize| if i + 1 == ALPHA_GRID { 0.5 } else { low + step * i as f64 };
    let (mut best_index, mut best) = (0, objective(grid(0)));
    for i in 1..ALPHA_GRID {
        let value = objective(grid(i));
        if value < best {
            best = value;
            best_index = i;
        }
    }
    let mut a = grid(best_index.saturating_sub(1));
    let mut b = grid((best_index + 1).min(ALPHA_GRID - 1));
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (objective(c), objective(d));
    while b - a > ALPHA_TOLERANCE {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = objective(d);
        }
    }
    let refined = 0.5 * (a + b);
    let value = objective(refined);
    Ok(if value < best { (value, refined) } else { (best, grid(best_index)) })
}

/// Evaluate a rate bound at `delta`.
pub fn rate_bound_eval(bound: RateBound, delta: f64) -> Result<f64, AsymptoticError> {
    let (low, high) = bound.domain();
    in_range("delta", delta, low, high)?;
    let value = match bound {
        RateBound::Gv { q } => 1.0 - raw_entropy(q as f64, delta),
        RateBound::HammingQ { q } => 1.0 - raw_entropy(q as f64, delta / 2.0),
        RateBound::EbQ { q } => 1.0 - raw_entropy(q as f64, elias_radius(q as f64, delta)),
        RateBound::Mrrw1Q { q } => raw_entropy(q as f64, mrrw_radius(q as f64, delta)),
        RateBound::Mrrw2 => mrrw2_with_argmin(delta)?.0,
        RateBound::Lwb1 => 0.5 * ((1.0 - h(delta)) + h(mrrw_radius(2.0, delta))),
        RateBound::Lwb2 => 0.5 * h(1.0 - 2.0 * root(delta * (1.0 - delta))),
        RateBound::JsHamming { alpha } => {
            h(alpha) - (alpha * h(delta / (2.0 * alpha)) + (1.0 - alpha) * h(delta / (2.0 * (1.0 - alpha))))
        }
        RateBound::JsEb { alpha } => {
            let k = johnson_elias_radius(delta, alpha);
            h(alpha) - alpha * h(k / alpha) - (1.0 - alpha) * h(k / (1.0 - alpha))
        }
        RateBound::JsMrrw { alpha } => h(johnson_mrrw_radius(delta, alpha)),
    };
    Ok(value)
}

/// A sampled rate bound.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCurve {
    pub bound: RateBound,
    /// `(delta, value)`, strictly increasing in `delta`.
    pub samples: Vec<(f64, f64)>,
}

/// Sample `bound` on `grid` evenly spaced points of its domain, endpoints
/// included.
pub fn sample_curve(bound: RateBound, grid: usize) -> Result<BoundCurve, AsymptoticError> {
    if grid < 2 {
        return Err(AsymptoticError::Grid(grid));
    }
    let (low, high) = bound.domain();
    let samples = (0..grid)
        .into_par_iter()
        .map(|i| {
            let delta = if i + 1 == grid { high } else { low + (high - low) * i as f64 / (grid - 1) as f64 };
            rate_bound_eval(bound, delta).map(|v| (delta, v))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(BoundCurve { bound, samples })
}

/// Twelve significant digits, trailing zeros removed.
pub fn format_significant(value: f64) -> String {
    if value == 0.0 || !value.is_finite() {
        return if value.is_finite() { "0".into() } else { value.to_string() };
    }
    let exponent = value.abs().log10().floor() as i32;
    let trim = |s: String| {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if (-5..12).contains(&exponent) {
        let decimals = (11 - exponent).max(0) as usize;
        let text = trim(format!("{value:.decimals$}"));
        if text == "-0" {
            "0".into()
        } else {
            text
        }
    } else {
        let text = format!("{value:.11e}");
        let (mantissa, exp) = text.split_once('e').unwrap();
        format!("{}e{exp}", trim(mantissa.to_string()))
    }
}

fn check_grids(curves: &[BoundCurve]) -> Result<(), AsymptoticError> {
    let first = curves.first().ok_or(AsymptoticError::Empty)?;
    for curve in &curves[1..] {
        if curve.samples.len() != first.samples.len()
            || curve.samples.iter().zip(&first.samples).any(|(a, b)| (a.0 - b.0).abs() > 1e-12)
        {
            return Err(AsymptoticError::MismatchedGrids);
        }
    }
    Ok(())
}

/// `delta,<id>,...` followed by one row per grid point.
pub fn emit_csv(curves: &[BoundCurve]) -> Result<String, AsymptoticError> {
    check_grids(curves)?;
    let mut out = String::from("delta");
    for curve in curves {
        out.push(',');
        out.push_str(curve.bound.identifier());
    }
    out.push('\n');
    for (row, &(delta, _)) in curves[0].samples.iter().enumerate() {
        out.push_str(&format_significant(delta));
        for curve in curves {
            out.push(',');
            out.push_str(&format_significant(curve.samples[row].1));
        }
        out.push('\n');
    }
    Ok(out)
}

const PALETTE: [&str; 10] =
    ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"];

/// 800x600 SVG with linear axes, `y` in `[0, 1.05]`, one polyline per curve
/// and a legend.
pub fn emit_svg(curves: &[BoundCurve]) -> Result<String, AsymptoticError> {
    if curves.is_empty() {
        return Err(AsymptoticError::Empty);
    }
    let (width, height) = (800.0, 600.0);
    let (left, right, top, bottom) = (70.0, 30.0, 30.0, 60.0);
    let x_min = curves.iter().flat_map(|c| c.samples.first()).map(|s| s.0).fold(f64::INFINITY, f64::min);
    let mut x_max = curves.iter().flat_map(|c| c.samples.last()).map(|s| s.0).fold(f64::NEG_INFINITY, f64::max);
    if x_max <= x_min {
        x_max = x_min + 1.0;
    }
    let y_max = 1.05;
    let px = |x: f64| left + (x - x_min) / (x_max - x_min) * (width - left - right);
    let py = |y: f64| height - bottom - y.clamp(0.0, y_max) / y_max * (height - top - bottom);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
    let (x0, y0, x1, y1) = (px(x_min), py(0.0), px(x_max), py(y_max));
    let _ = writeln!(svg, r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>"#);
    let _ = writeln!(svg, r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>"#);
    for i in 0..=5 {
        let x = x_min + (x_max - x_min) * i as f64 / 5.0;
        let y = y_max * i as f64 / 5.0;
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="middle">{}</text>"#,
            px(x),
            y0 + 20.0,
            format_significant((x * 1e4).round() / 1e4)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="end">{}</text>"#,
            x0 - 8.0,
            py(y) + 4.0,
            format_significant((y * 1e4).round() / 1e4)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" font-size="14" text-anchor="middle">delta</text>"#,
        (x0 + x1) / 2.0,
        height - 15.0
    );
    for (i, curve) in curves.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let points: Vec<String> = curve.samples.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{colour}" stroke-width="2" points="{}"/>"#,
            points.join(" ")
        );
        let ly = top + 10.0 + 20.0 * i as f64;
        let lx = width - right - 160.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{colour}" stroke-width="2"/>"#,
            lx + 25.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="13">{}</text>"#,
            lx + 32.0,
            ly + 4.0,
            curve.bound.identifier()
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
