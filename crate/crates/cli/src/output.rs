//! Serialization shared by every command.

/// 17 significant digits: enough to round-trip any finite f64, few enough
/// to stay stable (no dependence on shortest-repr printing heuristics).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::fmt_f64;

    #[test]
    fn round_trips_every_value_class() {
        let values = [
            0.0,
            -0.0,
            2.0,
            core::f64::consts::LN_2 / 3.0,
            2.8026036632466469,
            1e-300,
            -4.9e-324,
            f64::MAX,
            f64::MIN_POSITIVE,
        ];
        for v in values {
            let s = fmt_f64(v);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), v.to_bits(), "{v} -> {s} -> {back}");
        }
    }

    #[test]
    fn reprint_is_stable() {
        for v in [0.14440566261665527, 2.4763769724403741] {
            let s = fmt_f64(v);
            assert_eq!(fmt_f64(s.parse::<f64>().unwrap()), s);
        }
    }
}
