use symspace::catalog::{nilpotent, root_system, MATRIX_SPACES};
use symspace::linalg::{max_principal_angle, min_eig, sym_eigen, DMat, DVec};
use symspace::roots::{enumerate_walls, Wall};
use symspace::spectra::*;

fn report(key: &str, kind: BundleKind, variant: Variant, norm: Normalization) -> SpectralReport {
    spectral_report(key, &root_system(key).unwrap(), kind, variant, norm).unwrap()
}

#[test]
fn fiber_dimensions() {
    let h3 = root_system("H3").unwrap();
    assert_eq!(bundle_rep(&h3, BundleKind::Sym2).fiber_dim, 6);
    assert_eq!(bundle_rep(&h3, BundleKind::OneForms).fiber_dim, 3);
    assert_eq!(bundle_rep(&root_system("H2").unwrap(), BundleKind::Sym2Traceless).fiber_dim, 2);
}

#[test]
fn bundle_actions_are_isometric_representations() {
    for key in MATRIX_SPACES {
        let rs = root_system(key).unwrap();
        for kind in [BundleKind::OneForms, BundleKind::Sym2, BundleKind::Sym2Traceless] {
            let (iso, hom) = bundle_rep(&rs, kind).check(&rs.algebra);
            assert!(iso <= 1e-8 && hom <= 1e-8, "{key} {kind:?}: {iso:e} {hom:e}");
        }
    }
}

fn diagonal(sym: &Sym2, lam: &[f64]) -> DVec {
    let mut v = DVec::zeros(sym.dim());
    for (i, l) in lam.iter().enumerate() {
        v[sym.index_of(i, i)] = *l;
    }
    v
}

#[test]
fn constant_curvature_oracle() {
    for n in 2..=5 {
        let rs = root_system(&format!("H{n}")).unwrap();
        let rep = bundle_rep(&rs, BundleKind::Sym2);
        let k = -rs.roots[0].alpha.norm_squared();
        let sym = Sym2::new(n);
        let r = fiber_curvature(&rep).unwrap();
        let a = bochner_zero_order(&rep, Variant::Einstein).unwrap();
        let lam: Vec<f64> = (0..n).map(|i| ((3 * i + 1) as f64).sin()).collect();
        let v = diagonal(&sym, &lam);
        let (mut want_r, mut want_a) = (0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    want_r += k * lam[i] * lam[j];
                    want_a -= 0.5 * k * (lam[i] + lam[j]).powi(2);
                }
            }
        }
        let got_r = v.dot(&(&r * &v));
        let got_a = v.dot(&(&a * &v));
        assert!((got_r - want_r).abs() <= 1e-8 * want_r.abs().max(1.0), "H{n}: {got_r} vs {want_r}");
        assert!((got_a - want_a).abs() <= 1e-8 * want_a.abs().max(1.0), "H{n}: {got_a} vs {want_a}");
    }
}

#[test]
fn curvature_of_metric_is_einstein_multiple() {
    for key in ["H3", "CH4", "SL3", "H2xH2"] {
        let rs = root_system(key).unwrap();
        let rep = bundle_rep(&rs, BundleKind::Sym2);
        let sym = Sym2::new(rs.algebra.np);
        let g = sym.metric_direction();
        let rg = fiber_curvature(&rep).unwrap() * &g;
        // Killing metric: Ric = -g / 2
        assert!((rg + &g * 0.5).amax() < 1e-10, "{key}");
    }
}

#[test]
fn sym2_chamber_operator_on_hyperbolic_plane() {
    let rs = root_system("H2").unwrap();
    let rep = bundle_rep(&rs, BundleKind::Sym2);
    let s = normalization_scale(&rs, Normalization::UnitRoot);
    let e = sym_eigen(&(s_par_plain(&rs, &rep) * s));
    for (a, b) in e.values.iter().zip([0.0, 4.0, 4.0]) {
        assert!((a - b).abs() < 1e-10, "{:?}", e.values);
    }
    let g = Sym2::new(2).metric_direction();
    assert!((e.vectors.column(0).dot(&g).abs() - 1.0).abs() < 1e-10);
}

#[test]
fn einstein_bochner_kernel_on_hyperbolic_plane_is_traceless() {
    let rs = root_system("H2").unwrap();
    let rep = bundle_rep(&rs, BundleKind::Sym2);
    let a = bochner_zero_order(&rep, Variant::Einstein).unwrap();
    let e = sym_eigen(&a);
    let kernel: Vec<usize> = (0..3).filter(|&j| e.values[j].abs() < 1e-10).collect();
    assert_eq!(kernel.len(), 2);
    let g = Sym2::new(2).metric_direction();
    for j in kernel {
        assert!(e.vectors.column(j).dot(&g).abs() < 1e-10);
    }
}

#[test]
fn hyperbolic_constants() {
    for n in 2..=5 {
        let key = format!("H{n}");
        let one = report(&key, BundleKind::OneForms, Variant::Plain, Normalization::UnitRoot);
        assert!((one.lambda_l - 1.0).abs() < 1e-8);
        assert!((one.lambda_b_lower - (n - 1) as f64).abs() < 1e-8);
        let sym = report(&key, BundleKind::Sym2, Variant::Einstein, Normalization::UnitRoot);
        assert!((sym.lambda_b_lower - (n - 2) as f64).abs() < 1e-8);
    }
    let b = report("H2", BundleKind::Sym2Traceless, Variant::Plain, Normalization::UnitRoot);
    assert!((b.lambda_l - 4.0).abs() < 1e-8);
}

#[test]
fn normalization_rescales_only_eigenvalues() {
    for key in ["H3", "SL3", "CH4"] {
        let a = report(key, BundleKind::Sym2, Variant::Einstein, Normalization::Killing);
        let b = report(key, BundleKind::Sym2, Variant::Einstein, Normalization::UnitRoot);
        assert!((a.lambda_l * b.scale - b.lambda_l).abs() < 1e-10);
        assert!((a.lambda_b_lower * b.scale - b.lambda_b_lower).abs() < 1e-10);
        for (wa, wb) in a.walls.iter().zip(&b.walls) {
            assert_eq!(wa.key, wb.key);
            assert!((wa.bound * b.scale - wb.bound).abs() < 1e-10);
        }
    }
    let rs = root_system("H5").unwrap();
    let rep = bundle_rep(&rs, BundleKind::Sym2);
    let m = s_chamber(&rs, &rep, Variant::Einstein).unwrap();
    let ea = sym_eigen(&m);
    let eb = sym_eigen(&(&m * 7.5));
    let ka = kernel_columns(&ea);
    let kb = kernel_columns(&eb);
    assert_eq!(ka.ncols(), kb.ncols());
    assert!(max_principal_angle(&ka, &kb) < 1e-8);
}

fn kernel_columns(e: &symspace::linalg::SymEigen) -> DMat {
    let scale = e.values.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let cols: Vec<usize> = (0..e.values.len()).filter(|&j| e.values[j].abs() < 1e-8 * scale).collect();
    DMat::from_fn(e.vectors.nrows(), cols.len(), |i, c| e.vectors[(i, cols[c])])
}

#[test]
fn rank_one_chamber_blocks() {
    for n in 2..=5 {
        let rs = root_system(&format!("H{n}")).unwrap();
        let wb = einstein_wall_blocks(&rs, &Wall::new(&rs, &[])).unwrap();
        let dims: Vec<usize> = wb.blocks.iter().map(|b| b.1.nrows()).collect();
        assert_eq!(dims, vec![0, 0, 1, n - 1, n * (n - 1) / 2]);
        assert!((wb.blocks[2].1[(0, 0)] - 1.0).abs() < 1e-8);
    }
}

#[test]
fn sl3_edge_walls_fill_every_block() {
    let rs = root_system("SL3").unwrap();
    for wall in enumerate_walls(&rs).into_iter().filter(|w| w.ov_simple.len() == 1) {
        let wb = einstein_wall_blocks(&rs, &wall).unwrap();
        assert!(wb.blocks.iter().all(|b| b.1.nrows() > 0), "{}", wall.key());
        assert!(wb.leakage <= 1e-8);
        assert!(wb.identity_residual.unwrap() <= 1e-8);
    }
}

#[test]
fn wall_minima_on_hyperbolic_three_space() {
    let r = report("H3", BundleKind::Sym2, Variant::Einstein, Normalization::UnitRoot);
    let chamber = r.walls.iter().find(|w| w.ov_simple.is_empty()).unwrap();
    let origin = r.walls.iter().find(|w| w.ov_simple.len() == 1).unwrap();
    assert!(chamber.bound.abs() < 1e-8);
    assert!(origin.bound > 0.5);
    assert!(r.lambda_l.abs() < 1e-8);
    assert_eq!(r.nullspace.as_ref().unwrap().dim, 2);
    let h2 = report("H2", BundleKind::Sym2, Variant::Einstein, Normalization::UnitRoot);
    assert!(h2.walls.iter().find(|w| w.ov_simple.is_empty()).unwrap().bound > 1.0);
}

#[test]
fn block_minima_nonnegative_everywhere() {
    for key in MATRIX_SPACES {
        let r = report(key, BundleKind::Sym2, Variant::Einstein, Normalization::UnitRoot);
        for w in &r.walls {
            for b in &w.blocks {
                assert!(b.min_eig.is_none_or(|m| m >= -1e-8), "{key} {} {}", w.key, b.name);
            }
        }
    }
    assert!(report("SL3", BundleKind::Sym2, Variant::Einstein, Normalization::UnitRoot).lambda0_lower > 0.1);
}

#[test]
fn cusp_nullspace_dimensions() {
    for (key, dim) in [("H3", 2), ("H4", 5), ("H5", 9), ("CH4", 2), ("CH6", 6), ("HH8", 0), ("OH16", 0), ("SL3", 0), ("SL4", 0)] {
        assert_eq!(cusp_nullspace(&nilpotent(key).unwrap()).dim, dim, "{key}");
    }
}

#[test]
fn product_nullspace_is_sum_of_factors() {
    let nd = nilpotent("H3xSL3").unwrap();
    let ns = cusp_nullspace(&nd);
    assert_eq!(ns.dim, 2);
    // supported on the root vectors of the hyperbolic factor (alpha in the first coordinate)
    let sym = Sym2::new(nd.dim);
    let factor: Vec<bool> = nd.alpha.iter().map(|a| a[0].abs() > 1e-9).collect();
    for b in &ns.basis {
        for (i, &(x, y)) in sym.pairs.iter().enumerate() {
            if !(factor[x] && factor[y]) {
                assert!(b[i].abs() < 1e-9);
            }
        }
    }
}

#[test]
fn chamber_kernel_matches_nullspace_on_every_wall() {
    for key in ["H3", "H4", "CH4", "SL3", "H3xSL3", "HH8"] {
        let rs = root_system(key).unwrap();
        for wall in enumerate_walls(&rs) {
            let (kd, nd, angle) = nullspace_cross_check(&rs, &wall).unwrap();
            assert_eq!(kd, nd, "{key} {}", wall.key());
            assert!(angle <= 1e-6);
            if key == "SL3" {
                assert_eq!(kd, 0);
            }
        }
    }
}

#[test]
fn einstein_chamber_operator_kernel_is_embedded_nullspace() {
    let rs = root_system("H3").unwrap();
    let rep = bundle_rep(&rs, BundleKind::Sym2);
    let m = s_chamber(&rs, &rep, Variant::Einstein).unwrap();
    assert!(min_eig(&m) > -1e-10);
    let e = sym_eigen(&m);
    assert_eq!(kernel_columns(&e).ncols(), 2);
}
