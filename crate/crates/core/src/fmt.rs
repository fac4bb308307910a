//! C-style `%.<p>g` float formatting, used for point files (`%.17g`) and
//! report tables (`%.12g`).

/// Formats `x` like C's `printf("%.*g", precision, x)`.
pub fn format_g(x: f64, precision: usize) -> String {
    let precision = precision.max(1);
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.to_string();
    }
    // Rounding to `precision` significant digits decides the exponent.
    let sci = format!("{:.*e}", precision - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("exponent digits");
    if exp < -4 || exp >= precision as i32 {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (precision as i32 - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Rounds `x` to `digits` significant decimal digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", digits.max(1) - 1, x)
        .parse()
        .unwrap_or(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g() {
        assert_eq!(format_g(0.5, 12), "0.5");
        assert_eq!(format_g(1.0, 17), "1");
        assert_eq!(format_g(-0.333_333_333_333_333_3, 12), "-0.333333333333");
        assert_eq!(format_g(1.0e-5, 12), "1e-05");
        assert_eq!(format_g(123_456.0, 3), "1.23e+05");
        assert_eq!(format_g(100.0, 3), "100");
        assert_eq!(format_g(0.0001, 6), "0.0001");
        assert_eq!(format_g(3.809_250_000_1, 6), "3.80925");
        assert_eq!(format_g(f64::NEG_INFINITY, 12), "-inf");
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for &x in &[0.1, 1.0 / 3.0, -0.577_350_269_189_625_8, 1e-300, 6.02e23] {
            let s = format_g(x, 17);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
    }

    #[test]
    fn round_sig_is_idempotent() {
        let x = round_sig(std::f64::consts::PI, 12);
        assert_eq!(x, 3.14159265359);
        assert_eq!(round_sig(x, 12), x);
    }
}
