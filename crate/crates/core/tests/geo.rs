use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use symspace::catalog::root_system;
use symspace::geo::*;

const H3: [f64; 2] = [1.0, 1.0];

#[test]
fn ball_volume_euclidean_limit() {
    for r in [1e-3, 1e-2] {
        let v = ball_volume(&H3, r, 4.0 * PI).unwrap();
        let e = 4.0 * PI / 3.0 * r.powi(3);
        assert!((v / e - 1.0).abs() < 1e-4, "{r}: {}", v / e);
    }
    assert_eq!(ball_volume(&H3, 0.0, 4.0 * PI).unwrap(), 0.0);
}

#[test]
fn ball_volume_matches_closed_form_on_h3() {
    // vol B_r = pi (sinh 2r - 2r) for curvature -1
    for r in [0.5, 2.0, 6.0] {
        let v = ball_volume(&H3, r, 4.0 * PI).unwrap();
        let want = PI * ((2.0 * r).sinh() - 2.0 * r);
        assert!((v / want - 1.0).abs() < 1e-9, "{r}");
    }
}

#[test]
fn ball_volume_growth_and_monotonicity() {
    for n in 2..=5 {
        let alphas = vec![1.0; n - 1];
        let v0 = sphere_area(n);
        let radii: Vec<f64> = (0..=80).map(|i| i as f64 * 0.25).collect();
        let prof = ball_volume_profile(&alphas, &radii, v0);
        assert!(prof.windows(2).all(|w| w[1] > w[0]));
        let (r1, r2) = (15.0, 20.0);
        let slope = (ball_volume(&alphas, r2, v0).unwrap().ln() - ball_volume(&alphas, r1, v0).unwrap().ln()) / (r2 - r1);
        assert!((slope - (n - 1) as f64).abs() < 1e-3, "n={n}: {slope}");
        // log V has slope decreasing to n - 1, so it is concave
        let l: Vec<f64> = prof.iter().map(|v| v.ln()).collect();
        for i in 1..l.len() - 1 {
            assert!(l[i + 1] - 2.0 * l[i] + l[i - 1] <= 1e-9);
        }
    }
}

#[test]
fn sector_sweep_has_no_violations_in_three_dimensions() {
    let sweep = sector_sweep(&default_sweep(&[3]), 24, 5);
    assert_eq!(sweep.violations, 0);
    assert!(sweep.passes());
    assert!(sweep.fitted[0].1 <= sector_constant_bound(3));
}

#[test]
fn wide_sector_far_away_swallows_the_ball() {
    let mut prev = f64::INFINITY;
    for d in [2.0, 4.0, 8.0] {
        let c = SectorConfig { n: 3, r0: 2.0, d, alpha: PI / 2.0 - 1e-3 };
        let v = c.complement_volume();
        assert!(v <= prev);
        prev = v;
    }
    assert_eq!(prev, 0.0);
}

#[test]
fn containment_holds_with_origin_inside_ball() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 2..=4 {
        for r0 in [1.0, 3.0, 7.0] {
            for alpha in [0.1, 0.5, 1.0] {
                let res = sector_check(SectorConfig { n, r0, d: -0.5, alpha }, 64, &mut rng);
                assert_eq!(res.violations, 0);
                assert!(res.worst_margin >= 0.0);
            }
        }
    }
}

#[test]
fn rank_one_regions_are_trivial() {
    let rs = root_system("H3").unwrap();
    let rc = choose_region_constants(&rs).unwrap();
    let (s1, s2) = rc.slack();
    assert!(s1 >= 0.0 && s2 >= 0.0);
    let rep = verify_regions(&rs, &rc, 12.0, 2000, 4).unwrap();
    assert!(rep.passes());
}

#[test]
fn regions_reject_small_sigma() {
    let rs = root_system("SL3").unwrap();
    let rc = choose_region_constants(&rs).unwrap();
    assert!(verify_regions(&rs, &rc, 10.0, 10, 1).is_err());
}

#[test]
fn sl3_regions_hold() {
    let rs = root_system("SL3").unwrap();
    let rc = choose_region_constants(&rs).unwrap();
    let rep = verify_regions(&rs, &rc, 12.0, 20_000, 9).unwrap();
    assert!(rep.passes(), "{:?}", rep.violations);
    assert!(rep.checked.iter().all(|&c| c > 0));
}
