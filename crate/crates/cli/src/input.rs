//! Argument parsing helpers and body/profile loading.

use std::fs;

use anyhow::{bail, Context, Result};
use willslab::bodies::BodySpec;
use willslab::{ConvexBody, IntrinsicProfile};

/// Accepts `100000`, `100_000` and `1e5`.
pub fn parse_count(s: &str) -> Result<usize, String> {
    let clean = s.replace('_', "");
    if let Ok(n) = clean.parse::<usize>() {
        return Ok(n);
    }
    match clean.parse::<f64>() {
        Ok(v) if v.is_finite() && v >= 0.0 && v.fract() == 0.0 && v < 1e18 => Ok(v as usize),
        _ => Err(format!("`{s}` is not a nonnegative integer")),
    }
}

/// `16:16384:x4` (geometric), `10:40:+10` (arithmetic) or `16,64,256`.
pub fn parse_grid(s: &str) -> Result<Vec<usize>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let grid = match parts.as_slice() {
        [lo, hi, step] => {
            let lo = parse_count(lo)?;
            let hi = parse_count(hi)?;
            let mut out = Vec::new();
            let mut d = lo;
            if let Some(f) = step.strip_prefix('x') {
                let f = parse_count(f)?;
                if f < 2 {
                    return Err("geometric factor must be at least 2".into());
                }
                while d <= hi {
                    out.push(d);
                    d *= f;
                }
            } else {
                let inc = parse_count(step.trim_start_matches('+'))?;
                if inc == 0 {
                    return Err("step must be positive".into());
                }
                while d <= hi {
                    out.push(d);
                    d += inc;
                }
            }
            out
        }
        [list] => list.split(',').map(|t| parse_count(t.trim())).collect::<Result<_, _>>()?,
        _ => return Err(format!("cannot read grid `{s}`")),
    };
    if grid.is_empty() || grid.contains(&0) {
        return Err(format!("grid `{s}` must contain positive dimensions"));
    }
    Ok(grid)
}

pub fn parse_floats(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("`{t}` is not a number")))
        .collect()
}

/// `lo:hi`.
pub fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected LO:HI, got `{s}`"))?;
    let lo = a.trim().parse::<f64>().map_err(|_| format!("bad bound `{a}`"))?;
    let hi = b.trim().parse::<f64>().map_err(|_| format!("bad bound `{b}`"))?;
    Ok((lo, hi))
}

/// Inline JSON when the argument starts with `{` or `[`, otherwise a file path.
fn read_json_arg(arg: &str) -> Result<String> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        Ok(arg.to_string())
    } else {
        fs::read_to_string(arg).with_context(|| format!("cannot read `{arg}`"))
    }
}

pub fn load_body(arg: &str) -> Result<(BodySpec, ConvexBody)> {
    let text = read_json_arg(arg)?;
    let spec: BodySpec = serde_json::from_str(&text).map_err(|e| willslab::Error::Input(format!("body JSON: {e}")))?;
    let body = spec.build()?;
    Ok((body.to_spec(), body))
}

pub fn load_bodies(arg: &str) -> Result<Vec<(BodySpec, ConvexBody)>> {
    let text = read_json_arg(arg)?;
    let specs: Vec<BodySpec> = serde_json::from_str(&text).map_err(|e| willslab::Error::Input(format!("bodies JSON: {e}")))?;
    if specs.is_empty() {
        bail!(willslab::Error::Input("the body list is empty".into()));
    }
    specs
        .into_iter()
        .map(|s| {
            let b = s.build()?;
            Ok((b.to_spec(), b))
        })
        .collect()
}

/// Accepts a bare profile or a `volumes` artifact wrapping one under `result`.
pub fn load_profile(arg: &str) -> Result<IntrinsicProfile> {
    let text = read_json_arg(arg)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| willslab::Error::Input(format!("profile JSON: {e}")))?;
    let inner = match value.get("result") {
        Some(r) if r.get("d").is_some() => r.to_string(),
        _ => text,
    };
    Ok(IntrinsicProfile::from_json(&inner)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(parse_count("1e6"), Ok(1_000_000));
        assert_eq!(parse_count("10_000"), Ok(10_000));
        assert!(parse_count("1.5").is_err());
        assert!(parse_count("-3").is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("16:16384:x4").unwrap(), vec![16, 64, 256, 1024, 4096, 16384]);
        assert_eq!(parse_grid("10:40:+10").unwrap(), vec![10, 20, 30, 40]);
        assert_eq!(parse_grid("3, 5").unwrap(), vec![3, 5]);
        assert!(parse_grid("0,4").is_err());
        assert!(parse_grid("4:2:x2").is_err());
    }
}
