use proptest::prelude::*;

use regulab::chen::check::chen_suite;
use regulab::chen::ChenOptions;
use regulab::curve::expr::parse_poly;
use regulab::curve::CurveModel;
use regulab::mhs::run_selftest;
use regulab::pipeline::hex_f64;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn chen_identities_hold_for_any_seed(seed in any::<u64>()) {
        let m = CurveModel::hyperelliptic(parse_poly::<f64>("x^5 - 1").unwrap().x_part(), None).unwrap();
        let r = chen_suite(&m, seed, 4, &ChenOptions::default()).unwrap();
        prop_assert!(r.worst() < 1e-8, "{r:?}");
    }

    #[test]
    fn extension_suite_is_exact_for_any_seed(seed in any::<u64>()) {
        let r = run_selftest(seed, 8, 2);
        prop_assert!(r.passed(), "{r:?}");
    }
}

proptest! {
    #[test]
    fn hex_float_is_exact(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        let s = hex_f64(x);
        let (neg, body) = s.strip_prefix('-').map(|b| (true, b)).unwrap_or((false, &s));
        let (m, e) = body.strip_prefix("0x").unwrap().split_once('p').unwrap();
        let (int, frac) = m.split_once('.').unwrap_or((m, ""));
        let frac = if frac.is_empty() { 0 } else { u64::from_str_radix(&format!("{frac:0<13}"), 16).unwrap() };
        let e: i64 = e.parse().unwrap();
        let bits = match int {
            "1" => (((e + 1023) as u64) << 52) | frac,
            _ => {
                prop_assert!(frac == 0 || e == -1022);
                frac
            }
        };
        let v = f64::from_bits(bits | if neg { 1 << 63 } else { 0 });
        prop_assert_eq!(v.to_bits(), x.to_bits());
    }
}
