use approx::assert_abs_diff_eq;
use cwlap_core::bessel::*;
use cwlap_core::Error;
use proptest::prelude::*;

// (n, x, J_n(x), J_n'(x)), evaluated with mpmath at 40 digits.
const MP_VALUES: &[(u32, f64, f64, f64)] = &[
    (0, 1.0, 0.76519768655796655145, -0.44005058574493351596),
    (1, 2.5, 0.49709410246427403801, -0.24722141745390761153),
    (3, 2.0, 0.1289432494744020511, 0.1594191544040346425),
    (5, 10.0, -0.23406152818679364044, -0.1025719220086117149),
    (10, 30.0, -0.12987689399858876819, -0.068351103137354133064),
    (20, 15.0, 0.0073602340792234852583, 0.0067598609886162726624),
    (40, 60.0, -0.077646197404715064971, 0.068687649820770650819),
    (64, 60.0, 0.030418240409811815756, 0.012670698186708114312),
    (64, 200.0, -0.034059764963014577214, -0.044339952507079775477),
    (0, 200.0, -0.015437439930565091592, 0.054304538182378222711),
    (2, 0.001, 1.2499998958333365885e-7, 0.00024999995833333528646),
    (30, 5.0, 2.6711772782507988106e-21, 1.5810272094515807133e-20),
    (50, 45.0, 0.017284343240791224451, 0.0090347898933806101194),
    (7, 0.3, 3.3805443102187480913e-10, 7.8815962213594820253e-9),
    (12, 13.0, 0.26153687541034509911, 0.051269778182962967448),
    (1, 100.0, -0.077145352014112158033, 0.020757303824364244005),
    (100, 300.0, -0.014491227064785698861, -0.042564433547941878933),
    (128, 500.0, 0.032383156530082576268, -0.015873444380546161659),
];

fn close(got: f64, want: f64) -> bool {
    if want.abs() >= 1e-8 {
        (got - want).abs() <= 1e-12
    } else {
        (got - want).abs() <= 1e-10 * want.abs()
    }
}

#[test]
fn values_match_high_precision_reference() {
    for &(n, x, j, jp) in MP_VALUES {
        let got = bessel_j(n, x).unwrap();
        assert!(close(got, j), "J_{n}({x}) = {got:e}, want {j:e}");
        let gotp = bessel_j_prime(n, x).unwrap();
        assert!(close(gotp, jp), "J_{n}'({x}) = {gotp:e}, want {jp:e}");
    }
}

/// Plain ascending series summed in extended steps until the terms stop
/// changing the sum.
fn series_oracle(n: u32, x: f64) -> f64 {
    let mut fact = 1.0;
    for k in 1..=n {
        fact *= k as f64;
    }
    let mut term = (x / 2.0).powi(n as i32) / fact;
    let mut sum = term;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= -(x * x / 4.0) / (k * (k + n as f64));
        let next = sum + term;
        if next == sum {
            return sum;
        }
        sum = next;
    }
}

#[test]
fn order_three_at_two_matches_series() {
    assert_abs_diff_eq!(bessel_j(3, 2.0).unwrap(), series_oracle(3, 2.0), epsilon = 1e-15);
}

#[test]
fn zero_of_j0_and_table_value_of_j1() {
    let j01 = bessel_zero(0, 1).unwrap();
    assert!(bessel_j(0, j01).unwrap().abs() < 1e-10);
    assert!(bessel_j(1, 3.8317).unwrap().abs() < 1e-4);
}

#[test]
fn symmetric_derivative_identity() {
    let want = 0.5 * (bessel_j(1, 1.0).unwrap() - bessel_j(3, 1.0).unwrap());
    assert_abs_diff_eq!(bessel_j_prime(2, 1.0).unwrap(), want, epsilon = 1e-15);
}

#[test]
fn domain_errors() {
    assert!(matches!(bessel_j(0, 0.0), Err(Error::Domain(_))));
    assert!(matches!(bessel_j(0, -1.0), Err(Error::Domain(_))));
    assert!(matches!(bessel_j(200, 1.0), Err(Error::Domain(_))));
    assert!(matches!(bessel_j(1, 600.0), Err(Error::Domain(_))));
    assert!(matches!(bessel_zero(3, 0), Err(Error::Domain(_))));
}

// (m, p, j_{m,p}) from mpmath.
const MP_ZEROS: &[(u32, u32, f64)] = &[
    (0, 1, 2.4048255576957727686),
    (1, 1, 3.8317059702075123156),
    (2, 1, 5.1356223018406825563),
    (3, 1, 6.3801618959239835062),
    (0, 2, 5.5200781102863106496),
    (7, 1, 11.086370019245083846),
    (2, 5, 17.959819494987826455),
    (1, 2, 7.0155866698156187535),
    (2, 2, 8.4172441403998648578),
    (3, 2, 9.7610231299816696785),
    (4, 2, 11.064709488501184883),
    (6, 1, 9.9361095242176848947),
    (6, 2, 13.589290170541217053),
    (5, 2, 12.338604197466943986),
    (7, 2, 14.821268727013171251),
    (8, 1, 12.225092264004655176),
    (8, 2, 16.037774190887708832),
    (9, 1, 13.354300477435331066),
    (12, 3, 24.4948850438813543),
    (20, 10, 58.602022073846720028),
    (40, 20, 118.03479410965489023),
    (0, 64, 200.27715579333241178),
    (64, 64, 293.80950285531751909),
];

const MP_PRIME_ZEROS: &[(u32, u32, f64)] = &[
    (1, 1, 1.8411837813406593026),
    (5, 1, 6.4156163757002402828),
    (12, 1, 13.878843069697276241),
    (2, 1, 3.0542369282271403228),
    (4, 1, 5.3175531260839943504),
    (13, 1, 14.928374492964715773),
    (3, 3, 11.345924310743006482),
    (20, 5, 39.58453089075876792),
    (64, 64, 292.1979535674975241),
    // first positive root of J_0' is j_{1,1}
    (0, 1, 3.8317059702075123156),
];

#[test]
fn zeros_match_reference() {
    for &(m, p, want) in MP_ZEROS {
        let got = bessel_zero(m, p).unwrap();
        assert!((got - want).abs() <= 1e-12 * want.max(1.0), "j_{m},{p} = {got}, want {want}");
    }
    for &(m, p, want) in MP_PRIME_ZEROS {
        let got = bessel_prime_zero(m, p).unwrap();
        assert!((got - want).abs() <= 1e-12 * want.max(1.0), "j'_{m},{p} = {got}, want {want}");
    }
}

#[test]
fn table_values_to_four_decimals() {
    for (m, p, v) in [(0, 1, 2.4048), (3, 1, 6.3802), (1, 1, 3.8317)] {
        assert!((bessel_zero(m, p).unwrap() - v).abs() < 5e-5);
    }
    for (m, v) in [(1, 1.8411), (5, 6.4156), (12, 13.8788)] {
        assert!((bessel_prime_zero(m, 1).unwrap() - v).abs() < 1e-4);
    }
}

#[test]
fn j2_fifth_zero_is_a_sign_change() {
    let z = bessel_zero(2, 5).unwrap();
    // independent bracket: plain bisection on the series-free evaluator
    let (mut lo, mut hi) = (z - 0.5, z + 0.5);
    let f = |x: f64| bessel_j(2, x).unwrap();
    assert!(f(lo) * f(hi) < 0.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if f(lo) * f(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    assert_abs_diff_eq!(z, 0.5 * (lo + hi), epsilon = 1e-12);
}

#[test]
fn zero_residual_is_tiny() {
    for m in [0u32, 5, 17, 40, 64] {
        for p in [1u32, 7, 30, 64] {
            let z = bessel_zero(m, p).unwrap();
            let (j, jp) = bessel_j_and_prime(m, z).unwrap();
            assert!(j.abs() <= 1e-12 * jp.abs().max(1e-3), "J_{m}(j_{m},{p}) = {j:e}");
        }
    }
}

#[test]
fn log_derivative_shifted_orders() {
    let j31 = bessel_zero(3, 1).unwrap();
    assert_abs_diff_eq!(log_derivative(2, j31).unwrap(), 2.0, epsilon = 1e-8);
    let j11 = bessel_zero(1, 1).unwrap();
    let t = j11 * j11;
    assert_abs_diff_eq!(
        log_derivative(4, j11).unwrap(),
        -4.0 + 4.0 * t / (24.0 - t),
        epsilon = 1e-8
    );
    // mpmath: F_4(j_{1,1})
    assert_abs_diff_eq!(log_derivative(4, j11).unwrap(), 2.3026075914705680639, epsilon = 1e-11);
    // (m+1) at j_{1,1}
    let (j, jp) = bessel_j_and_prime(2, j11).unwrap();
    assert_abs_diff_eq!(j11 * jp / j, -2.0, epsilon = 1e-9);
}

#[test]
fn log_derivative_small_argument_limit() {
    for n in [0u32, 1, 5, 30, 64, 128] {
        assert_abs_diff_eq!(log_derivative(n, 1e-3).unwrap(), n as f64, epsilon = 1e-6);
    }
}

#[test]
fn log_derivative_pole_at_zero() {
    let z = bessel_zero(4, 2).unwrap();
    assert!(matches!(log_derivative(4, z), Err(Error::Pole(_))));
    assert!(bessel_point(4, z).unwrap().logderiv.is_none());
}

#[test]
fn landau_nonnegativity_below_first_stationary_point() {
    for n in 1u32..=30 {
        let d = bessel_prime_zero(n, 1).unwrap();
        for i in 1..=20 {
            let x = d * i as f64 / 20.0;
            assert!(log_derivative(n, x).unwrap() >= -1e-9, "F_{n}({x}) < 0");
        }
    }
}

#[test]
fn closed_forms_spot_values() {
    let j21 = bessel_zero(2, 1).unwrap();
    assert_abs_diff_eq!(ratio_closed_form(Shift::PlusOne, 2, j21).unwrap(), -3.0);
    let j32 = bessel_zero(3, 2).unwrap();
    let t = j32 * j32;
    assert_abs_diff_eq!(
        ratio_closed_form(Shift::MinusThree, 3, j32).unwrap(),
        -4.0 * t / (8.0 - t),
        epsilon = 1e-12
    );
    let t = j21 * j21;
    let want = -7.0 + t * (480.0 - 16.0 * t) / (5760.0 - 240.0 * t + t * t);
    assert_abs_diff_eq!(ratio_closed_form(Shift::PlusFive, 2, j21).unwrap(), want, epsilon = 1e-12);
    assert_abs_diff_eq!(log_derivative(7, j21).unwrap(), want, epsilon = 1e-8);
}

#[test]
fn closed_form_pole_is_reported() {
    // 4(m+2)(m+1) = 24 for m = 1
    let j = 24f64.sqrt();
    assert!(matches!(ratio_closed_form(Shift::PlusThree, 1, j), Err(Error::Pole(_))));
}

#[test]
fn shift_round_trips_through_text() {
    for s in Shift::ALL {
        assert_eq!(s.to_string().parse::<Shift>().unwrap(), s);
    }
    assert!("m+2".parse::<Shift>().is_err());
}

#[test]
fn closed_forms_agree_with_direct_ratios() {
    for m in 0u32..=20 {
        for p in 1u32..=10 {
            let j = bessel_zero(m, p).unwrap();
            for s in Shift::ALL {
                let n = s.order(m).unsigned_abs() as u32;
                let (Ok(c), Ok(d)) = (ratio_closed_form(s, m, j), log_derivative(n, j)) else {
                    continue;
                };
                assert!((c - d).abs() <= 1e-8 * (1.0 + d.abs()), "m={m} p={p} {s}: {c} vs {d}");
            }
        }
    }
}

#[test]
fn cache_round_trip_changes_no_digit() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sub").join("zeros.csv");
    let first = ZeroTable::with_cache(&path).unwrap();
    let a: Vec<f64> = (1..=6).map(|p| first.zero(9, p).unwrap()).collect();
    let b = first.prime_zero(11, 3).unwrap();
    let n = first.len();
    drop(first);

    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.lines().all(|l| l.split(',').count() == 4));
    assert!(text.contains(",zero") && text.contains(",prime_zero"));

    let second = ZeroTable::with_cache(&path).unwrap();
    assert_eq!(second.len(), n);
    for (p, v) in a.iter().enumerate() {
        assert_eq!(second.zero(9, p as u32 + 1).unwrap().to_bits(), v.to_bits());
    }
    assert_eq!(second.prime_zero(11, 3).unwrap().to_bits(), b.to_bits());
    // nothing new was computed, so nothing was appended
    assert_eq!(std::fs::read_to_string(&path).unwrap(), text);

    let fresh = ZeroTable::new();
    assert_eq!(fresh.zero(9, 6).unwrap().to_bits(), a[5].to_bits());
}

#[test]
fn cached_entries_satisfy_ordering_invariants() {
    let t = ZeroTable::new();
    for m in 0..=25 {
        t.zeros(m, 12).unwrap();
        t.prime_zero(m, 1).unwrap();
    }
    assert!(t.check_invariants().is_empty(), "{:?}", t.check_invariants());
}

#[test]
fn corrupt_cache_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("zeros.csv");
    std::fs::write(&path, "1,1,3.83,zero\n1,2,oops,zero\n").unwrap();
    assert!(matches!(ZeroTable::with_cache(&path), Err(Error::Cache { .. })));
}

#[test]
fn sequence_agrees_with_single_evaluations() {
    for x in [0.5, 3.0, 17.3, 44.0] {
        let seq = bessel_j_sequence(40, x);
        for (n, v) in seq.iter().enumerate() {
            let single = bessel_j(n as u32, x).unwrap();
            assert!((v - single).abs() <= 1e-13 + 1e-11 * single.abs(), "n={n} x={x}");
        }
    }
}

proptest! {
    #[test]
    fn three_term_recurrence(n in 1u32..=40, x in 0.1f64..60.0) {
        let a = bessel_j(n - 1, x).unwrap();
        let b = bessel_j(n, x).unwrap();
        let c = bessel_j(n + 1, x).unwrap();
        let r = a + c - 2.0 * n as f64 / x * b;
        prop_assert!(r.abs() <= 1e-10 * b.abs().max(1.0), "residual {r:e}");
    }

    #[test]
    fn derivative_relation(n in 0u32..=40, x in 0.1f64..60.0) {
        let (j, jp) = bessel_j_and_prime(n, x).unwrap();
        let j1 = bessel_j(n + 1, x).unwrap();
        let r = x * jp - n as f64 * j + x * j1;
        prop_assert!(r.abs() <= 1e-10 * x.max(1.0), "residual {r:e}");
    }
}
