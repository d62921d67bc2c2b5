use std::path::Path;

use crate::error::{Error, Result};
use crate::topology::ParameterLoop;

/// Parses `square:<λm>`, `theta:<λm>:<n>`, `circle:<x>,<y>,<r>` or
/// `polyline:<path>` (a JSON array of `[λ1, λ2]` pairs, given inline or as a
/// file). Coordinates are multiplied by `scale`.
pub fn parse_loop_spec(text: &str, scale: f64) -> Result<ParameterLoop> {
    let bad = |why: &str| Error::InvalidParams(format!("loop `{text}`: {why}"));
    let (kind, rest) = text.split_once(':').ok_or_else(|| bad("expected `<kind>:<arguments>`"))?;
    let number = |s: &str| -> Result<f64> {
        let x: f64 = s.trim().parse().map_err(|_| bad(&format!("`{s}` is not a number")))?;
        if x.is_finite() {
            Ok(x * scale)
        } else {
            Err(bad("coordinates must be finite"))
        }
    };
    match kind {
        "square" => ParameterLoop::square(number(rest)?),
        "theta" => {
            let (lm, n) = rest.split_once(':').ok_or_else(|| bad("expected `theta:<lambda_m>:<samples>`"))?;
            let n: usize = n.trim().parse().map_err(|_| bad(&format!("`{n}` is not a sample count")))?;
            ParameterLoop::parametric_theta(number(lm)?, n)
        }
        "circle" => {
            let parts: Vec<&str> = rest.split(',').collect();
            let [x, y, r] = parts.as_slice() else {
                return Err(bad("expected `circle:<x>,<y>,<radius>`"));
            };
            ParameterLoop::circle((number(x)?, number(y)?), number(r)?)
        }
        "polyline" => {
            let json = if rest.trim_start().starts_with('[') {
                rest.to_string()
            } else {
                std::fs::read_to_string(Path::new(rest)).map_err(|e| bad(&format!("cannot read polyline file: {e}")))?
            };
            let pairs: Vec<[f64; 2]> =
                serde_json::from_str(&json).map_err(|e| bad(&format!("polyline is not a list of [x, y] pairs: {e}")))?;
            let vertices = pairs.iter().map(|p| (p[0] * scale, p[1] * scale)).collect();
            ParameterLoop::polyline(vertices)
        }
        other => Err(bad(&format!("unknown loop kind `{other}`"))),
    }
}
