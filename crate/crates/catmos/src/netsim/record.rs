//! Text records: the string form of readings that the codecs compress.
//!
//! Each reading renders as `node:t:value;` with the value printed in
//! decimal tenths, e.g. `3:5:21.5;`. Records concatenate in (node, t)
//! order.

use crate::qmerge::Reading;

use super::SimError;

fn format_tenths(tenths: i64) -> String {
    let sign = if tenths < 0 { "-" } else { "" };
    let mag = tenths.unsigned_abs();
    if mag.is_multiple_of(10) {
        format!("{sign}{}", mag / 10)
    } else {
        format!("{sign}{}.{}", mag / 10, mag % 10)
    }
}

fn parse_tenths(text: &str) -> Option<i64> {
    let (sign, digits) = match text.strip_prefix('-') {
        Some(rest) => (-1i64, rest),
        None => (1i64, text),
    };
    if digits.is_empty() {
        return None;
    }
    let (whole, frac) = match digits.split_once('.') {
        Some((w, f)) => (w, f),
        None => (digits, ""),
    };
    if whole.is_empty() || frac.len() > 1 {
        return None;
    }
    let whole: i64 = whole.parse().ok()?;
    let frac: i64 = if frac.is_empty() { 0 } else { frac.parse().ok()? };
    Some(sign * (whole * 10 + frac))
}

/// Renders readings as concatenated records in (node, t) order.
pub fn tokenize(readings: &[Reading]) -> Vec<u8> {
    let mut sorted: Vec<&Reading> = readings.iter().collect();
    sorted.sort_by_key(|r| (r.node, r.t, r.value_tenths));
    let mut out = String::new();
    for r in sorted {
        out.push_str(&format!(
            "{}:{}:{};",
            r.node,
            r.t,
            format_tenths(r.value_tenths)
        ));
    }
    out.into_bytes()
}

/// Inverts [`tokenize`].
pub fn parse_records(bytes: &[u8]) -> Result<Vec<Reading>, SimError> {
    let text = std::str::from_utf8(bytes).map_err(|_| SimError::MalformedRecord)?;
    let mut out = Vec::new();
    for record in text.split_terminator(';') {
        let mut fields = record.split(':');
        let node = fields
            .next()
            .and_then(|f| f.parse().ok())
            .ok_or(SimError::MalformedRecord)?;
        let t = fields
            .next()
            .and_then(|f| f.parse().ok())
            .ok_or(SimError::MalformedRecord)?;
        let value_tenths = fields
            .next()
            .and_then(parse_tenths)
            .ok_or(SimError::MalformedRecord)?;
        if fields.next().is_some() {
            return Err(SimError::MalformedRecord);
        }
        out.push(Reading {
            node,
            t,
            value_tenths,
        });
    }
    Ok(out)
}
