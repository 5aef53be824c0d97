use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use symspace::catalog::root_system;
use symspace::geo::{ball_volume, choose_region_constants, sector_check, verify_regions, SectorConfig};
use symspace::heat::{fit_decay, sample_times};
use symspace::linalg::{gram_schmidt, max_principal_angle, sym_eigen, DMat, DVec};
use symspace::roots::{enumerate_walls, nilpotent_structure};
use symspace::spectra::{bundle_rep, einstein_wall_blocks, s_chamber, BundleKind, Sym2, Variant};
use symspace::verify::closed_form_quadratic;

fn sym_matrix(n: usize, vals: &[f64]) -> DMat {
    let m = DMat::from_fn(n, n, |i, j| vals[(i * n + j) % vals.len()]);
    (&m + m.transpose()) * 0.5
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sym2_coordinates_round_trip(n in 1usize..6, vals in prop::collection::vec(-5.0f64..5.0, 36)) {
        let sym = Sym2::new(n);
        let m = sym_matrix(n, &vals);
        let back = sym.to_matrix(&sym.coords(&m));
        prop_assert!((back - &m).amax() < 1e-12);
        // orthonormal coordinates preserve the Frobenius norm
        prop_assert!((sym.coords(&m).norm() - m.norm()).abs() < 1e-10);
    }

    #[test]
    fn derivation_of_rotation_is_antisymmetric(n in 2usize..6, vals in prop::collection::vec(-2.0f64..2.0, 36)) {
        let a = DMat::from_fn(n, n, |i, j| vals[(i * n + j) % vals.len()]);
        let a = &a - a.transpose();
        let d = Sym2::new(n).derivation(&a);
        prop_assert!((&d + d.transpose()).amax() < 1e-12);
    }

    #[test]
    fn eigenvalue_ratios_ignore_scale(s in 0.01f64..100.0, key in prop::sample::select(vec!["H3", "CH4", "SL3"])) {
        let rs = root_system(key).unwrap();
        let rep = bundle_rep(&rs, BundleKind::OneForms);
        let m = s_chamber(&rs, &rep, Variant::Plain).unwrap();
        let a = sym_eigen(&m).values;
        let b = sym_eigen(&(&m * s)).values;
        let top = a.last().copied().unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x / top - y / (s * top)).abs() < 1e-10);
        }
    }

    #[test]
    fn fit_recovers_exact_exponentials(rate in -1.0f64..4.0, c in 0.1f64..10.0) {
        let t: Vec<f64> = (0..200).map(|i| i as f64 * 0.05).collect();
        let h: Vec<f64> = t.iter().map(|t| c * (-rate * t).exp()).collect();
        let f = fit_decay(&t, &h, 2.0, 9.0).unwrap();
        prop_assert!((f.rate - rate).abs() < 1e-9);
        prop_assert!((f.log_prefactor - c.ln()).abs() < 1e-8);
    }

    #[test]
    fn sample_times_are_increasing_and_end_at_t_max(t0 in 0.001f64..1.0, len in 1.0f64..30.0, every in 0.05f64..1.0) {
        let ts = sample_times(t0, t0 + len, every);
        prop_assert_eq!(ts[0], t0);
        prop_assert_eq!(*ts.last().unwrap(), t0 + len);
        prop_assert!(ts.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn sector_containment_random_configs(n in 2usize..5, r0 in 0.5f64..10.0, d in -0.5f64..8.0, alpha in 0.05f64..1.5, seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let res = sector_check(SectorConfig { n, r0, d, alpha }, 16, &mut rng);
        prop_assert_eq!(res.violations, 0);
        prop_assert!(res.complement_volume >= 0.0);
    }

    #[test]
    fn ball_volume_is_monotone(a1 in 0.5f64..3.0, a2 in 0.5f64..3.0, r in 0.01f64..8.0, dr in 0.01f64..1.0) {
        let alphas = [a1, a2];
        let v1 = ball_volume(&alphas, r, 1.0).unwrap();
        let v2 = ball_volume(&alphas, r + dr, 1.0).unwrap();
        prop_assert!(v2 > v1 && v1 > 0.0);
    }

    #[test]
    fn principal_angle_ignores_basis_choice(theta in 0.0f64..6.3, n in 3usize..7) {
        let q = DMat::from_fn(n, 2, |i, j| if i == j { 1.0 } else { 0.0 });
        let rot = DMat::from_row_slice(2, 2, &[theta.cos(), -theta.sin(), theta.sin(), theta.cos()]);
        prop_assert!(max_principal_angle(&q, &(&q * rot)) < 1e-12);
    }

    #[test]
    fn gram_schmidt_output_is_orthonormal(vals in prop::collection::vec(-3.0f64..3.0, 20)) {
        let vs: Vec<DVec> = vals.chunks(5).map(|c| DVec::from_row_slice(c)).collect();
        let out = gram_schmidt(&vs, |a, b| a.dot(b), 1e-8);
        for (i, a) in out.iter().enumerate() {
            for (j, b) in out.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((a.dot(b) - want).abs() < 1e-10);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn closed_form_matches_wall_blocks(key in prop::sample::select(vec!["H4", "CH6", "SL3", "SL4", "H3xSL3", "HH8"]), seed in 0u64..10_000) {
        use rand::Rng;
        let rs = root_system(key).unwrap();
        let nd = nilpotent_structure(&rs).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for wall in enumerate_walls(&rs) {
            let un = &wall.un_vectors;
            if un.is_empty() {
                continue;
            }
            let wb = einstein_wall_blocks(&rs, &wall).unwrap();
            let off = wb.geometry.np - un.len();
            let lam: Vec<f64> = (0..un.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let idx = &wb.indices[4];
            let mut v = DVec::zeros(idx.len());
            for (p, &gi) in idx.iter().enumerate() {
                let (a, b) = wb.sym.pairs[gi];
                if a == b {
                    v[p] = lam[a - off];
                }
            }
            let q = 2.0 * v.dot(&(&wb.blocks[4].1 * &v));
            let want = closed_form_quadratic(&rs, &nd, &wall, &lam);
            prop_assert!((q - want).abs() <= 1e-7 * want.abs().max(1e-12), "{} {}: {} vs {}", key, wall.key(), q, want);
        }
    }

    #[test]
    fn region_inclusions_hold_for_any_seed(seed in 0u64..1_000_000, key in prop::sample::select(vec!["SL3", "H2xH2", "SL4"])) {
        let rs = root_system(key).unwrap();
        let rc = choose_region_constants(&rs).unwrap();
        let rep = verify_regions(&rs, &rc, 12.0, 500, seed).unwrap();
        prop_assert!(rep.passes(), "{:?}", rep.violations);
    }
}
