//! Hexadecimal floating-point literals (`0x1.8p+1`), used wherever matrices are
//! serialized so that a replay reconstructs bit-identical inputs.

/// Formats `x` in the C99 `%a` style with a full 13-digit mantissa.
pub fn format(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { "-" } else { "" };
    let exp_bits = ((bits >> 52) & 0x7ff) as i64;
    let mantissa = bits & ((1u64 << 52) - 1);
    if exp_bits == 0 && mantissa == 0 {
        return format!("{sign}0x0.0p+0");
    }
    if exp_bits == 0 {
        // subnormal
        return format!("{sign}0x0.{mantissa:013x}p-1022");
    }
    let exp = exp_bits - 1023;
    let exp_sign = if exp < 0 { '-' } else { '+' };
    format!("{sign}0x1.{mantissa:013x}p{exp_sign}{}", exp.abs())
}

/// Parses the output of [`format`] (and general `%a` literals).
pub fn parse(s: &str) -> Option<f64> {
    let s = s.trim();
    match s {
        "nan" => return Some(f64::NAN),
        "inf" => return Some(f64::INFINITY),
        "-inf" => return Some(f64::NEG_INFINITY),
        _ => {}
    }
    let (negative, rest) = match s.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let rest = rest.strip_prefix("0x").or_else(|| rest.strip_prefix("0X"))?;
    let (mant, exp) = rest.split_once(['p', 'P'])?;
    let exp: i64 = exp.parse().ok()?;
    let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if frac_part.len() > 13 || int_part.len() > 1 {
        return None;
    }
    let int_val = if int_part.is_empty() {
        0
    } else {
        u64::from_str_radix(int_part, 16).ok()?
    };
    if int_val > 1 {
        return None;
    }
    let frac_val = if frac_part.is_empty() {
        0
    } else {
        u64::from_str_radix(frac_part, 16).ok()? << (4 * (13 - frac_part.len()))
    };
    let value = if int_val == 0 && frac_val == 0 {
        0.0
    } else if int_val == 0 {
        if exp != -1022 {
            return None;
        }
        f64::from_bits(frac_val)
    } else {
        let biased = exp + 1023;
        if !(1..=2046).contains(&biased) {
            return None;
        }
        f64::from_bits(((biased as u64) << 52) | frac_val)
    };
    Some(if negative { -value } else { value })
}
