//! Deterministic SVG and CSV output for 1D and 2D instances.
//!
//! All geometry stays rational until the final formatting step, which
//! rounds to exact thousandths, so identical inputs produce identical
//! bytes.

use std::fmt::Write as _;

use anyhow::{bail, Result};
use num_traits::{Signed, Zero};

use wbk_core::cuntz::{way_below_epsilon, CuntzClass};
use wbk_core::plfn::PlFunction;
use wbk_core::region::Region;
use wbk_core::scalar::{format_rat, rat, Rat};

use crate::instance::Instance;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RenderFormat {
    Svg,
    Csv,
}

/// Renders an instance; only 1D and 2D payloads are drawable.
pub fn render(instance: &Instance, format: RenderFormat) -> Result<String> {
    match format {
        RenderFormat::Svg => render_svg(instance),
        RenderFormat::Csv => render_csv(instance),
    }
}

/// Decimal with at most three fractional digits, rounded half-up, computed
/// exactly.
fn px(r: &Rat) -> String {
    let scaled = r * rat(1000, 1) + rat(1, 2);
    let n = scaled.floor().to_integer();
    let neg = n.is_negative();
    let abs = n.abs();
    let thousand = num_bigint::BigInt::from(1000);
    let int = &abs / &thousand;
    let frac = (&abs % &thousand).to_string();
    let frac = format!("{:0>3}", frac);
    let frac = frac.trim_end_matches('0');
    let sign = if neg { "-" } else { "" };
    if frac.is_empty() {
        format!("{}{}", sign, int)
    } else {
        format!("{}{}.{}", sign, int, frac)
    }
}

/// Finite bounds of a family of regions along one axis, with sensible
/// defaults and a margin for unbounded or empty input.
fn axis_range(regions: &[&Region], axis: usize) -> (Rat, Rat) {
    let mut lo: Option<Rat> = None;
    let mut hi: Option<Rat> = None;
    for r in regions {
        for b in r.boxes() {
            let iv = &b.intervals()[axis];
            if let Some(v) = iv.lo().as_finite() {
                lo = Some(lo.map_or(v.clone(), |c: Rat| c.min(v.clone())));
                hi = Some(hi.map_or(v.clone(), |c: Rat| c.max(v.clone())));
            }
            if let Some(v) = iv.hi().as_finite() {
                lo = Some(lo.map_or(v.clone(), |c: Rat| c.min(v.clone())));
                hi = Some(hi.map_or(v.clone(), |c: Rat| c.max(v.clone())));
            }
        }
    }
    let lo = lo.unwrap_or_else(Rat::zero);
    let hi = hi.unwrap_or_else(|| rat(1, 1));
    let width = &hi - &lo;
    let margin = if width.is_zero() { rat(1, 2) } else { width / rat(8, 1) };
    (&lo - &margin, hi + margin)
}

struct Map1 {
    x0: Rat,
    scale: Rat,
    pad: Rat,
}

impl Map1 {
    fn new(lo: &Rat, hi: &Rat, span: i64, pad: i64) -> Map1 {
        Map1 {
            x0: lo.clone(),
            scale: rat(span, 1) / (hi - lo),
            pad: rat(pad, 1),
        }
    }

    fn map(&self, x: &Rat) -> Rat {
        &self.pad + (x - &self.x0) * &self.scale
    }
}

fn svg_header(out: &mut String, w: i64, h: i64) {
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">"
    )
    .unwrap();
    writeln!(out, "  <rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>").unwrap();
}

/// One horizontal track of interval blocks with open/closed endpoint
/// markers.
fn track_1d(out: &mut String, region: &Region, map: &Map1, y: i64, color: &str, label: &str) {
    writeln!(
        out,
        "  <text x=\"8\" y=\"{}\" font-family=\"monospace\" font-size=\"12\" fill=\"{}\">{}</text>",
        y + 4,
        color,
        label
    )
    .unwrap();
    for b in region.boxes() {
        let iv = &b.intervals()[0];
        let (lo, hi) = (iv.lo().as_finite(), iv.hi().as_finite());
        let (lo, hi) = match (lo, hi) {
            (Some(lo), Some(hi)) => (lo, hi),
            _ => continue,
        };
        let x1 = map.map(lo);
        let x2 = map.map(hi);
        if lo == hi {
            writeln!(
                out,
                "  <circle cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"{}\"/>",
                px(&x1),
                y,
                color
            )
            .unwrap();
            continue;
        }
        writeln!(
            out,
            "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"5\"/>",
            px(&x1),
            y,
            px(&x2),
            y,
            color
        )
        .unwrap();
        for (x, open) in [(x1, iv.lo_open()), (x2, iv.hi_open())] {
            let fill = if open { "white" } else { color };
            writeln!(
                out,
                "  <circle cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"{}\" stroke=\"{}\" stroke-width=\"1.5\"/>",
                px(&x),
                y,
                fill,
                color
            )
            .unwrap();
        }
    }
}

fn region_svg_1d(u: &Region, v: &Region, k: &Region, cl_u: &Region, verdict: &str) -> String {
    let (lo, hi) = axis_range(&[u, v, k], 0);
    let map = Map1::new(&lo, &hi, 560, 56);
    let mut out = String::new();
    svg_header(&mut out, 672, 220);
    writeln!(
        &mut out,
        "  <text x=\"8\" y=\"20\" font-family=\"monospace\" font-size=\"13\">compactly contained: {}</text>",
        verdict
    )
    .unwrap();
    track_1d(&mut out, k, &map, 180, "#555555", "K");
    track_1d(&mut out, v, &map, 130, "#1f5fbf", "V");
    track_1d(&mut out, cl_u, &map, 95, "#0a7a3d", "cl U");
    track_1d(&mut out, u, &map, 60, "#27ae60", "U");
    out.push_str("</svg>\n");
    out
}

/// Rectangles with per-edge dash style: open faces render dashed.
fn rects_2d(
    out: &mut String,
    region: &Region,
    mx: &Map1,
    my: &Map1,
    height: i64,
    stroke: &str,
    fill: Option<&str>,
) {
    for b in region.boxes() {
        let ix = &b.intervals()[0];
        let iy = &b.intervals()[1];
        let (x1, x2) = match (ix.lo().as_finite(), ix.hi().as_finite()) {
            (Some(a), Some(b)) => (mx.map(a), mx.map(b)),
            _ => continue,
        };
        let (wy1, wy2) = match (iy.lo().as_finite(), iy.hi().as_finite()) {
            (Some(a), Some(b)) => (a, b),
            _ => continue,
        };
        // Flip the vertical axis: larger world y sits higher on the canvas.
        let y1 = rat(height, 1) - my.map(wy2);
        let y2 = rat(height, 1) - my.map(wy1);
        if let Some(fill) = fill {
            writeln!(
                out,
                "  <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\" stroke=\"none\"/>",
                px(&x1),
                px(&y1),
                px(&(&x2 - &x1)),
                px(&(&y2 - &y1)),
                fill
            )
            .unwrap();
        }
        let dash = |open: bool| if open { " stroke-dasharray=\"6 4\"" } else { "" };
        let edges = [
            (&x1, &y1, &x1, &y2, ix.lo_open()),
            (&x2, &y1, &x2, &y2, ix.hi_open()),
            (&x1, &y2, &x2, &y2, iy.lo_open()),
            (&x1, &y1, &x2, &y1, iy.hi_open()),
        ];
        for (ax, ay, bx, by, open) in edges {
            writeln!(
                out,
                "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"2\"{}/>",
                px(ax),
                px(ay),
                px(bx),
                px(by),
                stroke,
                dash(open)
            )
            .unwrap();
        }
    }
}

fn region_svg_2d(u: &Region, v: &Region, k: &Region, cl_u: &Region, verdict: &str) -> String {
    let (xlo, xhi) = axis_range(&[u, v, k], 0);
    let (ylo, yhi) = axis_range(&[u, v, k], 1);
    let mx = Map1::new(&xlo, &xhi, 400, 40);
    let my = Map1::new(&ylo, &yhi, 400, 40);
    let mut out = String::new();
    svg_header(&mut out, 480, 510);
    writeln!(
        &mut out,
        "  <text x=\"8\" y=\"20\" font-family=\"monospace\" font-size=\"13\">compactly contained: {}</text>",
        verdict
    )
    .unwrap();
    rects_2d(&mut out, k, &mx, &my, 480, "#555555", Some("#f0f0f0"));
    rects_2d(&mut out, v, &mx, &my, 480, "#1f5fbf", None);
    rects_2d(&mut out, u, &mx, &my, 480, "#27ae60", Some("#b8e6c9"));
    rects_2d(&mut out, cl_u, &mx, &my, 480, "#0a7a3d", None);
    out.push_str("</svg>\n");
    out
}

/// Polyline paths for a function, one per space component.
fn function_paths(
    out: &mut String,
    f: &PlFunction,
    mx: &Map1,
    my: &Map1,
    height: i64,
    color: &str,
    dashed: bool,
) {
    let dash = if dashed { " stroke-dasharray=\"6 4\"" } else { "" };
    for comp in f.components() {
        let xs: Vec<&Rat> = f
            .breakpoints()
            .iter()
            .filter(|x| **x >= comp.lo && **x <= comp.hi)
            .collect();
        if comp.lo == comp.hi {
            let x = mx.map(&comp.lo);
            let y = rat(height, 1) - my.map(&f.eval(&comp.lo).unwrap());
            writeln!(
                out,
                "  <circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{}\"/>",
                px(&x),
                px(&y),
                color
            )
            .unwrap();
            continue;
        }
        let mut d = String::new();
        for (i, x) in xs.iter().enumerate() {
            let sx = mx.map(x);
            let sy = rat(height, 1) - my.map(&f.eval(x).unwrap());
            let _ = write!(d, "{}{} {}", if i == 0 { "M" } else { " L" }, px(&sx), px(&sy));
        }
        writeln!(
            out,
            "  <path d=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"{}/>",
            d, color, dash
        )
        .unwrap();
    }
}

fn graph_svg(curves: &[(&PlFunction, &str, bool)], level: Option<(&Rat, &str)>) -> String {
    let space = curves[0].0.space().region();
    let (xlo, xhi) = axis_range(&[space], 0);
    let mut ymax = rat(1, 1);
    for (f, _, _) in curves {
        ymax = ymax.max(f.max_value());
    }
    let ylo = rat(0, 1);
    let yhi = &ymax + &ymax / rat(8, 1);
    let mx = Map1::new(&xlo, &xhi, 560, 56);
    let my = Map1::new(&ylo, &yhi, 260, 30);
    let mut out = String::new();
    svg_header(&mut out, 672, 330);
    // Axis line at y = 0.
    let base = rat(330, 1) - my.map(&ylo);
    writeln!(
        &mut out,
        "  <line x1=\"40\" y1=\"{}\" x2=\"640\" y2=\"{}\" stroke=\"#999999\" stroke-width=\"1\"/>",
        px(&base),
        px(&base)
    )
    .unwrap();
    if let Some((t, color)) = level {
        let y = rat(330, 1) - my.map(t);
        writeln!(
            &mut out,
            "  <line x1=\"40\" y1=\"{}\" x2=\"640\" y2=\"{}\" stroke=\"{}\" stroke-width=\"1.5\" stroke-dasharray=\"4 4\"/>",
            px(&y),
            px(&y),
            color
        )
        .unwrap();
        writeln!(
            &mut out,
            "  <text x=\"644\" y=\"{}\" font-family=\"monospace\" font-size=\"11\" fill=\"{}\">{}</text>",
            px(&(&y + rat(4, 1))),
            color,
            format_rat(t)
        )
        .unwrap();
    }
    for (f, color, dashed) in curves {
        function_paths(&mut out, f, &mx, &my, 330, color, *dashed);
    }
    // Support intervals on the baseline.
    for (i, (f, color, _)) in curves.iter().enumerate() {
        let supp = f.open_support();
        let y = 320 - 6 * i as i64;
        for b in supp.boxes() {
            let iv = &b.intervals()[0];
            if let (Some(lo), Some(hi)) = (iv.lo().as_finite(), iv.hi().as_finite()) {
                writeln!(
                    &mut out,
                    "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"3\"/>",
                    px(&mx.map(lo)),
                    y,
                    px(&mx.map(hi)),
                    y,
                    color
                )
                .unwrap();
            }
        }
    }
    out.push_str("</svg>\n");
    out
}

fn render_svg(instance: &Instance) -> Result<String> {
    match instance {
        Instance::Region { u, v, k } => {
            let space = wbk_core::Space::new(k.clone())?;
            let verdict = space
                .compactly_contained(u, v)
                .map(|b| b.to_string())
                .unwrap_or_else(|e| format!("precondition failed: {}", e));
            let cl_u = u.closure().intersect(k)?;
            match k.dim() {
                1 => Ok(region_svg_1d(u, v, k, &cl_u, &verdict)),
                2 => Ok(region_svg_2d(u, v, k, &cl_u, &verdict)),
                d => bail!("cannot render {}-dimensional regions", d),
            }
        }
        Instance::Cuntz { a, b } => {
            let k = a.space().clone();
            let eps = way_below_epsilon(
                &CuntzClass::from_scalar(a.clone()),
                &CuntzClass::from_scalar(b.clone()),
                &k,
            )?;
            Ok(graph_svg(
                &[(b, "#1f5fbf", false), (a, "#27ae60", false)],
                eps.as_ref().map(|e| (e, "#c0392b")),
            ))
        }
        Instance::Cutdown { f, epsilon } => {
            let cut = f.cutdown(epsilon)?;
            Ok(graph_svg(
                &[(f, "#1f5fbf", false), (&cut.function, "#27ae60", true)],
                Some((epsilon, "#c0392b")),
            ))
        }
        Instance::Tensor { a1, b1, a2, b2 } => {
            let k1 = a1.space().clone();
            let k2 = a2.space().clone();
            let supp_a = a1.open_support().product(&a2.open_support());
            let supp_b = b1.open_support().product(&b2.open_support());
            let e1 = way_below_epsilon(
                &CuntzClass::from_scalar(a1.clone()),
                &CuntzClass::from_scalar(b1.clone()),
                &k1,
            )?;
            let e2 = way_below_epsilon(
                &CuntzClass::from_scalar(a2.clone()),
                &CuntzClass::from_scalar(b2.clone()),
                &k2,
            )?;
            let level = match (e1, e2) {
                (Some(e1), Some(e2)) => b1.superlevel(&e1)?.product(&b2.superlevel(&e2)?),
                _ => Region::empty(2),
            };
            let ambient = k1.region().product(k2.region());
            let (xlo, xhi) = axis_range(&[&ambient], 0);
            let (ylo, yhi) = axis_range(&[&ambient], 1);
            let mx = Map1::new(&xlo, &xhi, 400, 40);
            let my = Map1::new(&ylo, &yhi, 400, 40);
            let mut out = String::new();
            svg_header(&mut out, 480, 510);
            writeln!(
                &mut out,
                "  <text x=\"8\" y=\"20\" font-family=\"monospace\" font-size=\"13\">tensor supports and cutdown level sets</text>"
            )
            .unwrap();
            rects_2d(&mut out, &ambient, &mx, &my, 480, "#555555", Some("#f0f0f0"));
            rects_2d(&mut out, &supp_b, &mx, &my, 480, "#1f5fbf", None);
            rects_2d(&mut out, &level, &mx, &my, 480, "#7fb3e6", Some("#ddecfa"));
            rects_2d(&mut out, &supp_a, &mx, &my, 480, "#27ae60", Some("#b8e6c9"));
            out.push_str("</svg>\n");
            Ok(out)
        }
        Instance::Ideal { i, j } => {
            let sub = Instance::Region {
                u: i.carrier().clone(),
                v: j.carrier().clone(),
                k: i.ambient().region().clone(),
            };
            render_svg(&sub)
        }
        Instance::Poset { .. } => bail!("poset instances have no 1D or 2D geometry to render"),
    }
}

/// Probe sweep for a family of 1D regions: every finite endpoint, midpoints
/// between consecutive endpoints, and one point beyond each side.
fn probes(regions: &[&Region], axis: usize) -> Vec<Rat> {
    let mut ends: Vec<Rat> = Vec::new();
    for r in regions {
        for b in r.boxes() {
            let iv = &b.intervals()[axis];
            if let Some(v) = iv.lo().as_finite() {
                ends.push(v.clone());
            }
            if let Some(v) = iv.hi().as_finite() {
                ends.push(v.clone());
            }
        }
    }
    ends.sort();
    ends.dedup();
    if ends.is_empty() {
        ends.push(Rat::zero());
    }
    let mut out = Vec::with_capacity(2 * ends.len() + 1);
    out.push(&ends[0] - rat(1, 8));
    for (i, e) in ends.iter().enumerate() {
        out.push(e.clone());
        if let Some(next) = ends.get(i + 1) {
            out.push((e + next) / rat(2, 1));
        }
    }
    out.push(ends.last().unwrap() + rat(1, 8));
    out
}

fn membership(r: &Region, p: &[Rat]) -> &'static str {
    if r.contains_point(p).unwrap_or(false) {
        "1"
    } else {
        "0"
    }
}

fn render_csv(instance: &Instance) -> Result<String> {
    let mut out = String::new();
    match instance {
        Instance::Region { u, v, k } => {
            match k.dim() {
                1 => {
                    out.push_str("x,in_u,in_v,in_k\n");
                    for x in probes(&[u, v, k], 0) {
                        let p = [x.clone()];
                        writeln!(
                            &mut out,
                            "{},{},{},{}",
                            format_rat(&x),
                            membership(u, &p),
                            membership(v, &p),
                            membership(k, &p)
                        )
                        .unwrap();
                    }
                }
                2 => {
                    out.push_str("x,y,in_u,in_v,in_k\n");
                    for x in probes(&[u, v, k], 0) {
                        for y in probes(&[u, v, k], 1) {
                            let p = [x.clone(), y.clone()];
                            writeln!(
                                &mut out,
                                "{},{},{},{},{}",
                                format_rat(&x),
                                format_rat(&y),
                                membership(u, &p),
                                membership(v, &p),
                                membership(k, &p)
                            )
                            .unwrap();
                        }
                    }
                }
                d => bail!("cannot render {}-dimensional regions", d),
            }
            Ok(out)
        }
        Instance::Ideal { i, j } => render_csv(&Instance::Region {
            u: i.carrier().clone(),
            v: j.carrier().clone(),
            k: i.ambient().region().clone(),
        }),
        Instance::Cuntz { a, b } => {
            out.push_str("x,a,b\n");
            for x in probes(&[a.space().region()], 0) {
                if !a.space().region().contains_point(std::slice::from_ref(&x))? {
                    continue;
                }
                writeln!(
                    &mut out,
                    "{},{},{}",
                    format_rat(&x),
                    format_rat(&a.eval(&x)?),
                    format_rat(&b.eval(&x)?)
                )
                .unwrap();
            }
            Ok(out)
        }
        Instance::Cutdown { f, epsilon } => {
            let cut = f.cutdown(epsilon)?.function;
            out.push_str("x,f,cutdown\n");
            for x in probes(&[f.space().region()], 0) {
                if !f.space().region().contains_point(std::slice::from_ref(&x))? {
                    continue;
                }
                writeln!(
                    &mut out,
                    "{},{},{}",
                    format_rat(&x),
                    format_rat(&f.eval(&x)?),
                    format_rat(&cut.eval(&x)?)
                )
                .unwrap();
            }
            Ok(out)
        }
        Instance::Tensor { a1, b1, a2, b2 } => {
            out.push_str("x,y,a1a2,b1b2\n");
            for x in probes(&[a1.space().region()], 0) {
                if !a1.space().region().contains_point(std::slice::from_ref(&x))? {
                    continue;
                }
                for y in probes(&[a2.space().region()], 0) {
                    if !a2.space().region().contains_point(std::slice::from_ref(&y))? {
                        continue;
                    }
                    writeln!(
                        &mut out,
                        "{},{},{},{}",
                        format_rat(&x),
                        format_rat(&y),
                        format_rat(&(a1.eval(&x)? * a2.eval(&y)?)),
                        format_rat(&(b1.eval(&x)? * b2.eval(&y)?))
                    )
                    .unwrap();
                }
            }
            Ok(out)
        }
        Instance::Poset { .. } => bail!("poset instances have no 1D or 2D geometry to render"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use wbk_core::region::Interval;

    fn q(s: &str) -> Rat {
        wbk_core::scalar::parse_rat(s).unwrap()
    }

    #[test]
    fn px_formats_exact_thousandths() {
        assert_eq!(px(&q("1/2")), "0.5");
        assert_eq!(px(&q("3")), "3");
        assert_eq!(px(&q("-7/8")), "-0.875");
        assert_eq!(px(&q("1/3")), "0.333");
    }

    #[test]
    fn region_svg_is_deterministic() {
        let instance = Instance::Region {
            u: Region::from_interval(Interval::open(q("0"), q("1"))),
            v: Region::from_interval(Interval::open(q("0"), q("2"))),
            k: Region::from_interval(Interval::closed(q("0"), q("2"))),
        };
        let a = render(&instance, RenderFormat::Svg).unwrap();
        let b = render(&instance, RenderFormat::Svg).unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.contains("cl U"));

        let csv = render(&instance, RenderFormat::Csv).unwrap();
        assert!(csv.starts_with("x,in_u,in_v,in_k"));
        assert!(csv.contains("1/2,1,1,1"));
    }

    #[test]
    fn poset_is_not_renderable() {
        let p = wbk_core::poset::FinitePoset::new(1, vec![vec![true]]).unwrap();
        let instance = Instance::Poset { poset: p, x: 0, y: 0 };
        assert!(render(&instance, RenderFormat::Svg).is_err());
        assert!(render(&instance, RenderFormat::Csv).is_err());
    }
}
