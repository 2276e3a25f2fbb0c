//! Critical-value plots on the fixed window [-2, 2]^2.

use std::fmt::Write;

/// Points farther out than this break a polyline.
const CLIP: f64 = 4.0;
const SIZE: u32 = 480;

fn num(v: f64) -> String {
    let s = format!("{v:.5}");
    if s.trim_start_matches('-')
        .chars()
        .all(|c| c == '0' || c == '.')
    {
        "0.00000".into()
    } else {
        s
    }
}

/// Split a sampled curve where it leaves the clip box.
fn runs(curve: &[[f64; 2]]) -> Vec<Vec<[f64; 2]>> {
    let mut out = Vec::new();
    let mut cur: Vec<[f64; 2]> = Vec::new();
    for p in curve {
        if p[0].abs() <= CLIP && p[1].abs() <= CLIP && p.iter().all(|v| v.is_finite()) {
            cur.push(*p);
        } else if !cur.is_empty() {
            out.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

/// SVG with one polyline per curve piece and a marker per cusp.
/// The base plane's second coordinate points up.
pub fn render(title: &str, curves: &[Vec<[f64; 2]>], cusps: &[[f64; 2]]) -> String {
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="-2 -2 4 4" width="{SIZE}" height="{SIZE}">"#
    )
    .unwrap();
    writeln!(s, "<title>{}</title>", escape(title)).unwrap();
    writeln!(
        s,
        r#"<rect x="-2" y="-2" width="4" height="4" fill="white"/>"#
    )
    .unwrap();
    writeln!(
        s,
        r#"<g transform="scale(1,-1)" fill="none" stroke-linejoin="round">"#
    )
    .unwrap();
    writeln!(
        s,
        r##"<path d="M -2 0 H 2 M 0 -2 V 2" stroke="#bbbbbb" stroke-width="0.005"/>"##
    )
    .unwrap();
    for curve in curves {
        for run in runs(curve) {
            if run.len() == 1 {
                let p = run[0];
                writeln!(
                    s,
                    r#"<circle cx="{}" cy="{}" r="0.02" fill="black"/>"#,
                    num(p[0]),
                    num(p[1])
                )
                .unwrap();
                continue;
            }
            let pts: Vec<String> = run
                .iter()
                .map(|p| format!("{},{}", num(p[0]), num(p[1])))
                .collect();
            writeln!(
                s,
                r#"<polyline points="{}" stroke="black" stroke-width="0.01"/>"#,
                pts.join(" ")
            )
            .unwrap();
        }
    }
    for c in cusps {
        writeln!(
            s,
            r#"<circle class="cusp" cx="{}" cy="{}" r="0.035" fill="red"/>"#,
            num(c[0]),
            num(c[1])
        )
        .unwrap();
    }
    s.push_str("</g>\n</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_zero_prints_as_zero() {
        assert_eq!(num(-0.0), "0.00000");
        assert_eq!(num(-1e-9), "0.00000");
        assert_eq!(num(-0.25), "-0.25000");
    }

    #[test]
    fn curves_break_outside_the_window() {
        let c = vec![[0.0, 0.0], [1.0, 1.0], [9.0, 0.0], [1.0, -1.0], [0.5, 0.5]];
        assert_eq!(runs(&c).len(), 2);
        let svg = render("t", &[c], &[[0.0, 0.0]]);
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert_eq!(svg.matches(r#"class="cusp""#).count(), 1);
        assert!(svg.contains(r#"viewBox="-2 -2 4 4""#));
    }

    #[test]
    fn empty_plot_has_no_curves() {
        let svg = render("empty", &[], &[]);
        assert!(!svg.contains("<polyline"));
        assert_eq!(svg, render("empty", &[], &[]));
    }
}
