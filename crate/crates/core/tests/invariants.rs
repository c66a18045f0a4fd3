use ppv_core::bounds::{converse_error, converse_rate, normal_approx_rate, BoundQuery, Status};
use ppv_core::temme::ChannelParams;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rate_below_capacity_and_grows_with_n(db in -1.0f64..10.0, k in 2u32..5) {
        let om = 10f64.powf(db / 10.0);
        let c = ChannelParams::new(om).unwrap().capacity_bits;
        let n = 10u64.pow(k);
        let r1 = converse_rate(&BoundQuery::rate(n, om, 1e-4).unwrap()).unwrap();
        let r2 = converse_rate(&BoundQuery::rate(10 * n, om, 1e-4).unwrap()).unwrap();
        prop_assert!(r1.rate_bits <= r2.rate_bits + 1e-12);
        prop_assert!(r2.rate_bits <= c);
    }

    #[test]
    fn rate_and_error_queries_invert(db in 0.0f64..8.0, n in 100u64..3000) {
        let om = 10f64.powf(db / 10.0);
        let pe = 1e-3;
        let r = converse_rate(&BoundQuery::rate(n, om, pe).unwrap()).unwrap();
        prop_assume!(r.status == Status::Ok);
        let e = converse_error(&BoundQuery::error(n, om, r.rate_bits).unwrap()).unwrap();
        prop_assert!((e.log_pe.log10() - pe.log10()).abs() < 1e-6, "{} {}", e.log_pe.log10(), pe.log10());
    }

    #[test]
    fn normal_approximation_stays_below_capacity(db in -2.0f64..20.0, n in 50u64..100_000) {
        let om = 10f64.powf(db / 10.0);
        let c = ChannelParams::new(om).unwrap().capacity_bits;
        let r = normal_approx_rate(n, om, 1e-5).unwrap();
        prop_assert!(r < c);
    }
}

#[test]
fn certified_bracket_contains_rate() {
    let q = BoundQuery::rate(2000, 1.0, 1e-5).unwrap();
    let r = converse_rate(&q).unwrap();
    let (lo, hi) = r.certified_bracket.expect("certificate holds at 0 dB");
    assert!(lo <= r.rate_bits + 1e-9 && r.rate_bits <= hi + 1e-9, "{lo} {} {hi}", r.rate_bits);
}
