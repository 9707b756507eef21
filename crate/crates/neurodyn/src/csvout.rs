use crate::integrate::Trajectory;

/// Formats like C's `%.9g`: 9 significant digits, trailing zeros stripped,
/// fixed notation while the decimal exponent is in [-4, 9), scientific
/// otherwise with a sign and at least two exponent digits. Every CSV cell
/// goes through here so files are reproducible byte for byte.
pub fn format_g9(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x < 0.0 { "-inf" } else { "inf" }.into();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.into();
    }

    // round to 9 significant digits first; the exponent may carry (9.99..e7
    // becoming 1.00000000e8), which decides fixed vs scientific
    let sci = format!("{x:.8e}");
    let (mant, exp_str) = sci.split_once('e').expect("exponential form");
    let exp: i32 = exp_str.parse().expect("numeric exponent");
    let sign = if mant.starts_with('-') { "-" } else { "" };
    let digits: Vec<u8> = mant.bytes().filter(u8::is_ascii_digit).collect();
    debug_assert_eq!(digits.len(), 9);
    let digits = std::str::from_utf8(&digits).expect("ascii digits");

    if (-4..9).contains(&exp) {
        let mut out = String::from(sign);
        if exp >= 0 {
            let split = exp as usize + 1;
            out.push_str(&digits[..split]);
            let frac = digits[split..].trim_end_matches('0');
            if !frac.is_empty() {
                out.push('.');
                out.push_str(frac);
            }
        } else {
            out.push_str("0.");
            for _ in 0..(-exp - 1) {
                out.push('0');
            }
            out.push_str(digits.trim_end_matches('0'));
        }
        out
    } else {
        let frac = digits[1..].trim_end_matches('0');
        let mantissa = if frac.is_empty() {
            digits[..1].to_string()
        } else {
            format!("{}.{}", &digits[..1], frac)
        };
        format!("{sign}{mantissa}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

/// Renders a trajectory as CSV text: a header of `time` plus the channel
/// labels, then one row per sample.
pub fn trajectory_to_csv(tr: &Trajectory) -> String {
    let mut out = String::with_capacity(16 * (tr.labels.len() + 1) * (tr.len() + 1));
    out.push_str("time");
    for label in &tr.labels {
        out.push(',');
        out.push_str(label);
    }
    out.push('\n');
    for (i, sample) in tr.samples.iter().enumerate() {
        out.push_str(&format_g9(tr.time(i)));
        for &v in sample.iter() {
            out.push(',');
            out.push_str(&format_g9(v));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::{integrate, IntegratorConfig, Method};
    use crate::state::StateVector;
    use crate::stimulus::StimulusProtocol;
    use crate::system::ModelSystem;

    #[test]
    fn matches_printf_g9_reference_table() {
        // expected strings produced by printf("%.9g") on the same doubles
        let table: &[(f64, &str)] = &[
            (0.0, "0"),
            (-0.0, "-0"),
            (1.0, "1"),
            (-1.0, "-1"),
            (42.0, "42"),
            (0.1, "0.1"),
            (1.0 / 3.0, "0.333333333"),
            (2.0 / 3.0, "0.666666667"),
            (123456789.0, "123456789"),
            (1234567890.0, "1.23456789e+09"),
            (999999999.0, "999999999"),
            (9999999990.0, "9.99999999e+09"),
            (0.000123456, "0.000123456"),
            (1e-4, "0.0001"),
            (0.5e-4, "5e-05"),
            (1e-5, "1e-05"),
            (-2.5e-10, "-2.5e-10"),
            (6.02214076e23, "6.02214076e+23"),
            (1e100, "1e+100"),
            (f64::MAX, "1.79769313e+308"),
            (f64::MIN_POSITIVE, "2.22507386e-308"),
            (5e-324, "4.94065646e-324"),
            (0.3678794411714423, "0.367879441"),
            (-65.0, "-65"),
            (29.9, "29.9"),
            (31.69, "31.69"),
            (std::f64::consts::PI, "3.14159265"),
            (-0.0001, "-0.0001"),
            (0.00009999999999, "0.0001"),
            (99999999.94999999, "99999999.9"),
            (99999999.95000001, "100000000"),
            (9.999999994999999e8, "999999999"),
            (1000.0, "1000"),
            (0.001, "0.001"),
            (123.456, "123.456"),
            (-123.456e-7, "-1.23456e-05"),
            (7e-4, "0.0007"),
            (0.02, "0.02"),
            (45.40740740740741, "45.4074074"),
            (26.371, "26.371"),
        ];
        for &(v, want) in table {
            assert_eq!(format_g9(v), want, "value {v:?}");
        }
        assert_eq!(format_g9(f64::NAN), "nan");
        assert_eq!(format_g9(f64::INFINITY), "inf");
        assert_eq!(format_g9(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn formatted_values_roundtrip_to_nine_digits() {
        for &v in &[1.0 / 7.0, -2.7e-11, 3.33e18, 0.124999999, 6.5e-5] {
            let back: f64 = format_g9(v).parse().unwrap();
            assert!(((back - v) / v).abs() < 1e-8, "{v} -> {}", format_g9(v));
        }
    }

    struct Ramp;
    impl ModelSystem for Ramp {
        fn dimension(&self) -> usize {
            2
        }
        fn labels(&self) -> Vec<String> {
            vec!["v".into(), "u".into()]
        }
        fn rhs(&self, _t: f64, _s: &[f64], _i: f64, out: &mut [f64]) {
            out[0] = 1.0;
            out[1] = -2.0;
        }
    }

    #[test]
    fn csv_has_header_and_one_row_per_sample() {
        let cfg = IntegratorConfig::new(Method::Euler, 0.5, 2.0);
        let s0 = StateVector::new(vec![0.0, 1.0]).unwrap();
        let tr = integrate(&Ramp, &s0, &StimulusProtocol::zero(), &cfg).unwrap();
        let csv = trajectory_to_csv(&tr);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "time,v,u");
        assert_eq!(lines.len(), 1 + tr.len());
        assert_eq!(lines[1], "0,0,1");
        assert_eq!(lines[2], "0.5,0.5,0");
        assert_eq!(lines.last().unwrap(), &"2,2,-3");
    }
}
