//! Small helpers shared by the CSV writers.

/// Formats a real with 6 significant digits, `%g` style: fixed notation for
/// exponents in `-5..6`, scientific otherwise, trailing zeros trimmed.
pub fn fmt_real(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{}{:02}", trim_zeros(mantissa.to_string()), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// `fmt_real`, with `None` as an empty field.
pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_real).unwrap_or_default()
}

/// Joins rows into CSV text with LF endings.
pub fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(fmt_real(0.5), "0.5");
        assert_eq!(fmt_real(1.0), "1");
        assert_eq!(fmt_real(123456.4), "123456");
        assert_eq!(fmt_real(1234567.0), "1.23457e+06");
        assert_eq!(fmt_real(0.000123456789), "0.000123457");
        assert_eq!(fmt_real(0.0000012), "1.2e-06");
        assert_eq!(fmt_real(-2.5), "-2.5");
        assert_eq!(fmt_real(999999.7), "1e+06");
        assert_eq!(fmt_real(1.0 / 3.0), "0.333333");
        assert_eq!(fmt_real(f64::NAN), "nan");
    }

    #[test]
    fn csv_layout() {
        let s = csv(&["a", "b"], vec![vec!["1".into(), "2".into()]]);
        assert_eq!(s, "a,b\n1,2\n");
        assert_eq!(fmt_opt(None), "");
    }
}
