use symspace::catalog::root_system;
use symspace::geo::sphere_area;
use symspace::heat::{fit_decay, green_l1, run, run_model, HeatModel, HeatParams, HeatRun, HeatState};
use symspace::spectra::{BundleKind, Variant};

fn quick(t_max: f64) -> HeatParams {
    HeatParams { dr: 0.1, t0: 0.04, t_max, ..HeatParams::default() }
}

fn scalar_h3(t_max: f64) -> HeatRun {
    run("H3", &root_system("H3").unwrap(), BundleKind::Scalar, Variant::Plain, &quick(t_max)).unwrap()
}

fn initial_mass(dr: f64, t0: f64, r_max: f64) -> f64 {
    let rs = root_system("H3").unwrap();
    let model = HeatModel::new(&rs, BundleKind::Scalar, Variant::Plain).unwrap();
    let v0 = sphere_area(3) / model.radial.alphas.iter().product::<f64>();
    let st = HeatState::init(model.radial, dr, r_max, t0, 0.2).unwrap();
    st.weighted_norm(1.0) * v0
}

#[test]
fn gaussian_start_has_unit_mass() {
    let m = initial_mass(0.002, 4e-4, 0.5);
    assert!((m - 1.0).abs() < 0.01, "mass {m}");
}

#[test]
fn doubling_node_count_keeps_initial_mass() {
    let a = initial_mass(0.05, 0.04, 8.0);
    let b = initial_mass(0.025, 0.04, 8.0);
    assert!((a - b).abs() / b <= 0.005, "{a} vs {b}");
}

#[test]
fn init_rejects_too_small_t0() {
    let rs = root_system("H3").unwrap();
    let model = HeatModel::new(&rs, BundleKind::Scalar, Variant::Plain).unwrap();
    assert!(HeatState::init(model.radial, 0.1, 5.0, 0.01, 0.2).is_err());
}

#[test]
fn refuses_higher_rank() {
    let rs = root_system("SL3").unwrap();
    assert!(HeatModel::new(&rs, BundleKind::OneForms, Variant::Plain).is_err());
    let rs = root_system("H3").unwrap();
    assert!(HeatModel::new(&rs, BundleKind::OneForms, Variant::Einstein).is_err());
}

#[test]
fn scalar_mass_is_conserved() {
    let r = scalar_h3(4.0);
    let h = r.h1();
    let h0 = h[0];
    assert!(h.iter().all(|x| (x - h0).abs() / h0 <= 0.01));
    assert!(r.fit.as_ref().unwrap().rate.abs() < 1e-3);
}

#[test]
fn scalar_comparison_kernel_coincides() {
    let r = scalar_h3(2.0);
    assert!(r.mus.iter().all(|m| m.abs() < 1e-12));
    assert!(r.lambda_c.abs() < 1e-12);
    let ratio = r.worst_comparison_ratio.unwrap();
    assert!((ratio - 1.0).abs() < 1e-9, "ratio {ratio}");
}

#[test]
fn scalar_green_integral_matches_closed_form() {
    let r = scalar_h3(6.0);
    let t = r.times();
    let h = r.h1();
    let g = green_l1(&t, &h, -1.0, r.fit.as_ref().unwrap());
    let want = (-r.params.t0).exp() * h[0];
    assert!(!g.divergent);
    assert!((g.value - want).abs() / want < 1e-3, "{} vs {want}", g.value);
}

#[test]
fn scalar_envelope_bounded_at_zero_rate() {
    let r = scalar_h3(6.0);
    let (sup, growth) = r.envelope(0.0);
    assert!(sup.is_finite());
    assert!(growth <= 0.05, "growth {growth}");
}

#[test]
fn one_form_mus_equal_and_positive() {
    for key in ["H2", "H3", "H4"] {
        let model = HeatModel::new(&root_system(key).unwrap(), BundleKind::OneForms, Variant::Plain).unwrap();
        let m0 = model.mus[0];
        assert!(m0 > 0.0);
        assert!(model.mus.iter().all(|m| (m - m0).abs() < 1e-10), "{key}: {:?}", model.mus);
    }
}

fn one_forms(t0: f64) -> HeatRun {
    let p = HeatParams { dr: 0.1, t0, t_max: 12.0, ..HeatParams::default() };
    run("H3", &root_system("H3").unwrap(), BundleKind::OneForms, Variant::Plain, &p).unwrap()
}

#[test]
fn one_form_rate_and_t0_insensitivity() {
    let a = one_forms(0.04);
    let b = one_forms(0.08);
    let (ra, rb) = (a.fit.as_ref().unwrap().rate, b.fit.as_ref().unwrap().rate);
    assert!((0.9..=1.1).contains(&ra), "rate {ra}");
    assert!((ra - rb).abs() / ra <= 0.02, "{ra} vs {rb}");
    assert!(!a.fit.as_ref().unwrap().window_too_short);
    assert!(a.worst_comparison_ratio.unwrap() <= 1.02);
    assert!(a.worst_min_eig_ratio >= -1e-7);
    assert!(a.worst_equivariance <= 1e-6);
    assert!(a.max_asym_rate <= 1e-7);

    let t = a.times();
    let h = a.h1();
    let fit = a.fit.as_ref().unwrap();
    assert!(!green_l1(&t, &h, 0.5, fit).divergent);
    assert!(green_l1(&t, &h, 0.5, fit).value.is_finite());
    assert!(green_l1(&t, &h, 1.5, fit).divergent);
}

#[test]
fn einstein_sym2_bounded_and_l2_decays() {
    let p = HeatParams { dr: 0.1, t0: 0.04, t_max: 8.0, ..HeatParams::default() };
    let r = run("H3", &root_system("H3").unwrap(), BundleKind::Sym2, Variant::Einstein, &p).unwrap();
    let (sup, growth) = r.envelope(0.0);
    assert!(sup.is_finite() && growth <= 0.05, "{sup} {growth}");
    // negative control: an exponent above the true bottom makes the ratio grow
    let (_, bad) = r.envelope(0.2);
    assert!(bad > 0.4 && bad > growth + 0.4, "growth {bad}");
    let t = r.times();
    let h2 = fit_decay(&t, &r.h2(), 4.0, 8.0).unwrap();
    assert!(h2.rate >= 0.9, "L2 rate {}", h2.rate);
    let (sup1, _) = r.radial_product(1.0);
    let (sup2, last2) = r.radial_product(2.0);
    assert!(sup1.is_finite() && sup2.is_finite());
    assert!(last2 <= sup2);
    // the a = 10 weight is dominated by H^(1) / 11
    let i0 = r.samples[0].radial_integral;
    assert!(i0 <= r.samples[0].h1);
    assert!(r.weyl_parity_defect < 1e-8, "weyl {}", r.weyl_parity_defect);
}

#[test]
fn traceless_rate_on_h2() {
    let p = HeatParams { dr: 0.1, t0: 0.04, t_max: 6.0, ..HeatParams::default() };
    let model = HeatModel::new(&root_system("H2").unwrap(), BundleKind::Sym2Traceless, Variant::Plain).unwrap();
    let r = run_model("H2", &model, &p).unwrap();
    let rate = r.fit.unwrap().rate;
    assert!((1.8..=2.2).contains(&rate), "rate {rate}");
}

#[test]
fn fit_oracles() {
    let t: Vec<f64> = (0..=300).map(|i| i as f64 * 0.1).collect();
    let e: Vec<f64> = t.iter().map(|t| 3.0 * (-2.0 * t).exp()).collect();
    assert!((fit_decay(&t, &e, 0.0, 10.0).unwrap().rate - 2.0).abs() < 1e-9);
    let p: Vec<f64> = t.iter().map(|t| (t + 2.0) * (-t).exp()).collect();
    let r = fit_decay(&t, &p, 10.0, 30.0).unwrap().rate;
    assert!((0.93..=1.0).contains(&r), "{r}");
    let c = vec![5.0; t.len()];
    assert!(fit_decay(&t, &c, 0.0, 30.0).unwrap().rate.abs() < 1e-9);
    assert!(fit_decay(&t[..10], &c[..10], 0.0, 1.0).is_err());
}
