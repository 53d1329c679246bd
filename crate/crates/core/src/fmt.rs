//! Number formatting shared by the text writers.

/// Formats `x` with `digits` significant digits in the style of C's `%g`:
/// fixed notation for moderate exponents, scientific otherwise, trailing
/// zeros trimmed.
pub fn sig(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{}", trim_zeros(mantissa), exp)
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::sig;

    #[test]
    fn fixed_and_scientific() {
        assert_eq!(sig(1.0, 6), "1");
        assert_eq!(sig(2.0 / 3.0, 6), "0.666667");
        assert_eq!(sig(0.5, 12), "0.5");
        assert_eq!(sig(-1.25e-9, 12), "-1.25e-9");
        assert_eq!(sig(123456789.0, 6), "1.23457e8");
        assert_eq!(sig(0.0, 12), "0");
        assert_eq!(sig(1.0 - (-2.0f64).exp(), 12), "0.864664716763");
    }

    #[test]
    fn parses_back_within_precision() {
        for &x in &[std::f64::consts::PI, -1e-7, 9.999_999_999_999e5, 42.0] {
            let y: f64 = sig(x, 12).parse().unwrap();
            assert!((x - y).abs() <= 1e-11 * x.abs());
        }
    }
}
