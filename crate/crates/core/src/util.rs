//! Small shared helpers: identifier validation, float formatting, id sorting.

/// Characters forbidden in dataset/model/task/sample identifiers. They would
/// collide with CSV cells, composite report keys (`a|b`), or line endings.
const FORBIDDEN_ID_CHARS: &[char] = &[',', '|', '"', '\n', '\r'];

pub(crate) fn valid_id(s: &str) -> bool {
    !s.is_empty() && !s.chars().any(|c| FORBIDDEN_ID_CHARS.contains(&c))
}

/// Formats a float with the given number of significant digits, in plain
/// decimal notation. Used by every CSV/SVG report so output is reproducible.
pub fn fmt_sig(v: f64, sig: usize) -> String {
    assert!(sig > 0);
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let exp = format!("{:.*e}", sig - 1, v);
    // "d.dddddde-1" -> mantissa + exponent
    let (mantissa, e) = exp.split_once('e').expect("exponential format");
    let e: i32 = e.parse().expect("exponent");
    // Re-render without exponent; decimals needed = sig - 1 - e, clamped at 0.
    let decimals = (sig as i32 - 1 - e).max(0) as usize;
    let value: f64 = mantissa.parse::<f64>().expect("mantissa") * 10f64.powi(e);
    format!("{value:.decimals$}")
}

/// Sorted intersection of two ascending, deduplicated id slices.
pub(crate) fn intersect_sorted<'a>(a: &'a [String], b: &[String]) -> Vec<&'a str> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].as_str().cmp(b[j].as_str()) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i].as_str());
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Mean and sample standard deviation (n-1 denominator). Stdev is `None`
/// when fewer than two values are present.
pub(crate) fn mean_stdev(values: &[f64]) -> (f64, Option<f64>) {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, None);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n as f64 - 1.0);
    (mean, Some(var.sqrt()))
}

/// Stable 64-bit FNV-1a over a list of byte strings, used to derive
/// independent pseudo-random substreams. Not a cryptographic hash; it only
/// needs to be deterministic across platforms and releases.
pub(crate) fn fnv1a(parts: &[&[u8]]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for part in parts {
        for &b in *part {
            h ^= b as u64;
            h = h.wrapping_mul(0x1000_0000_01b3);
        }
        // Separator so ("ab","c") differs from ("a","bc").
        h ^= 0xff;
        h = h.wrapping_mul(0x1000_0000_01b3);
    }
    h
}
