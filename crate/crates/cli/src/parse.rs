//! Parsing of complex literals, sweep grids and input files.

use anyhow::{anyhow, bail, Context, Result};
use periodlab_core::numerics::c;
use periodlab_core::Complex;
use serde_json::Value;

/// Accepts `1.5`, `-2i`, `i`, `0.5-0.3i`, `1e-3+2e1i` and `[re,im]`.
pub fn complex(s: &str) -> Result<Complex> {
    let t: String = s.chars().filter(|ch| !ch.is_whitespace()).collect();
    if t.is_empty() {
        bail!("empty complex number");
    }
    if let Some(inner) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
        let parts: Vec<&str> = inner.split(',').collect();
        if parts.len() != 2 {
            bail!("expected [re,im], got {s}");
        }
        return Ok(c(real(parts[0])?, real(parts[1])?));
    }
    let Some(body) = t.strip_suffix('i') else {
        return Ok(c(real(&t)?, 0.0));
    };
    // split at the last sign that is not part of an exponent
    let bytes = body.as_bytes();
    let mut split = None;
    for k in (1..bytes.len()).rev() {
        if (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
            split = Some(k);
            break;
        }
    }
    let (re, im) = match split {
        Some(k) => (real(&body[..k])?, imaginary(&body[k..])?),
        None => (0.0, imaginary(body)?),
    };
    Ok(c(re, im))
}

fn real(s: &str) -> Result<f64> {
    let v: f64 = s.parse().map_err(|_| anyhow!("not a number: {s}"))?;
    if !v.is_finite() {
        bail!("not a finite number: {s}");
    }
    Ok(v)
}

fn imaginary(s: &str) -> Result<f64> {
    match s {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => real(s),
    }
}

/// `START:END:N`, `N >= 1` points evenly spaced (both ends included).
pub fn grid(s: &str) -> Result<Vec<Complex>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        bail!("expected START:END:N, got {s}");
    }
    let a = complex(parts[0])?;
    let b = complex(parts[1])?;
    let n: usize = parts[2].parse().with_context(|| format!("bad point count in {s}"))?;
    if n == 0 {
        bail!("a sweep needs at least one point");
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    Ok((0..n).map(|k| a + (b - a) * (k as f64 / (n - 1) as f64)).collect())
}

/// Comma-separated list of complex numbers.
pub fn complex_list(s: &str) -> Result<Vec<Complex>> {
    s.split(',').map(complex).collect()
}

/// A complex number in JSON: `[re, im]`, a number, or a string literal.
pub fn complex_value(v: &Value) -> Result<Complex> {
    match v {
        Value::Number(n) => Ok(c(n.as_f64().ok_or_else(|| anyhow!("bad number"))?, 0.0)),
        Value::String(s) => complex(s),
        Value::Array(a) if a.len() == 2 => {
            let re = a[0].as_f64().ok_or_else(|| anyhow!("bad real part in {v}"))?;
            let im = a[1].as_f64().ok_or_else(|| anyhow!("bad imaginary part in {v}"))?;
            Ok(c(re, im))
        }
        _ => bail!("expected a complex number, got {v}"),
    }
}

pub fn read_json(path: &std::path::Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("{} is not valid JSON", path.display()))
}
