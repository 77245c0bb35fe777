//! CSV and JSON artifacts. Floats are written with 17 significant digits so
//! every value round-trips exactly.

use std::fmt::Write as _;

use serde::Serialize;

use crate::sampler::CloudPoint;
use crate::tracer::TraceResult;

pub const TRACE_HEADER: &str = "alpha,re_I,im_I,re_w1,im_w1,re_w2,im_w2,A,B,residual_norm";
pub const CLOUD_HEADER: &str = "re_I,im_I,R,theta1,theta2,re_a,im_a";

/// `x` in scientific notation with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn row(out: &mut String, values: &[f64]) {
    let mut first = true;
    for v in values {
        if !first {
            out.push(',');
        }
        first = false;
        out.push_str(&fmt_f64(*v));
    }
    out.push('\n');
}

pub fn trace_csv(trace: &TraceResult) -> String {
    let mut out = String::with_capacity(64 + 260 * trace.points.len());
    writeln!(out, "{TRACE_HEADER}").expect("writing to a String");
    for p in &trace.points {
        row(
            &mut out,
            &[
                p.alpha,
                p.i0.re,
                p.i0.im,
                p.w1.re,
                p.w1.im,
                p.w2.re,
                p.w2.im,
                p.a,
                p.b,
                p.residual_norm,
            ],
        );
    }
    out
}

pub fn cloud_csv(cloud: &[CloudPoint]) -> String {
    let mut out = String::with_capacity(64 + 180 * cloud.len());
    writeln!(out, "{CLOUD_HEADER}").expect("writing to a String");
    for c in cloud {
        row(
            &mut out,
            &[
                c.value.re,
                c.value.im,
                c.pair.scale,
                c.pair.theta1,
                c.pair.theta2,
                c.pair.a.re,
                c.pair.a.im,
            ],
        );
    }
    out
}

/// Pretty JSON with a trailing newline; serde_json prints the shortest
/// round-trip representation of each float.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("artifact types serialize");
    s.push('\n');
    s
}

/// Parses a CSV produced by [`trace_csv`] or [`cloud_csv`] back into rows.
pub fn parse_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>), String> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or("empty CSV")?
        .split(',')
        .map(str::to_string)
        .collect::<Vec<_>>();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let r = line
            .split(',')
            .map(|f| f.parse::<f64>().map_err(|e| format!("row {}: {e}", i + 1)))
            .collect::<Result<Vec<_>, _>>()?;
        if r.len() != header.len() {
            return Err(format!("row {} has {} fields, expected {}", i + 1, r.len(), header.len()));
        }
        rows.push(r);
    }
    Ok((header, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functional::FunctionalSpec;
    use crate::reduction::ProblemConfig;
    use crate::sampler::sample_cloud;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn cloud_csv_round_trip() {
        let cloud = sample_cloud(&FunctionalSpec::ratio(), &ProblemConfig::default(), 20, 5).unwrap();
        let text = cloud_csv(&cloud);
        let (header, rows) = parse_csv(&text).unwrap();
        assert_eq!(header.join(","), CLOUD_HEADER);
        assert_eq!(rows.len(), 20);
        for (r, c) in rows.iter().zip(&cloud) {
            assert_eq!(r[0], c.value.re);
            assert_eq!(r[1], c.value.im);
            assert_eq!(r[2], c.pair.scale);
            assert_eq!(r[6], c.pair.a.im);
        }
    }

    #[test]
    fn parse_rejects_ragged_rows() {
        assert!(parse_csv("a,b\n1,2,3\n").is_err());
        assert!(parse_csv("").is_err());
    }
}
