//! Representation checks: bracket closure against the derived structure
//! table, word extension consistency, translation equivariance of the
//! quadratic term, and the wave-operator intertwining for translations.

use num_complex::Complex64 as C64;
use rkg_core::analytic::AnalyticProfile;
use rkg_core::dynamics::{rhs, SystemKind};
use rkg_core::field::Sign;
use rkg_core::grid::Grid;
use rkg_core::norms::{e_norm, e_norm_diff};
use rkg_core::poincare::{
    bracket_check, intertwine_check, structure_constants, t1_apply, t2_apply, t2_bilinear,
    t_apply, t_word, Generator, Translation, Word,
};
use rkg_core::profiles::ScatteringData;
use rkg_core::scattering::WaveOpParams;
use rkg_core::state::{FieldId, PhaseState};

// Width-5 Gaussians: the quadratic source then decays to ~1e-10 of its peak
// at the two-thirds dealias edge, which matters because the boost and
// rotation generators multiply by coordinates as large as L/2 and would
// amplify any sharp spectral edge left by the truncation.
fn localized_state(grid: &Grid<f64>, amps: (f64, f64)) -> PhaseState<f64> {
    let data = ScatteringData::from_catalog(
        grid,
        1.0,
        Some(AnalyticProfile::gaussian(
            C64::new(amps.0, 0.2 * amps.0),
            [0.2, -0.15],
            5.0,
        )),
        Some(AnalyticProfile::gaussian(
            C64::new(amps.1, -0.1 * amps.1),
            [-0.15, 0.25],
            5.0,
        )),
    );
    data.state().clone()
}

fn test_grid() -> Grid<f64> {
    Grid::new(96, 96.0).unwrap()
}

#[test]
fn t1_translation_is_the_fourier_derivative() {
    let grid = test_grid();
    let mut f = PhaseState::zeros(&grid, 1.0);
    let slot = grid.lin(grid.slot_of(3), grid.slot_of(-2));
    f.comp_mut(FieldId::Field1, Sign::Plus).coef_mut()[slot] = C64::new(1.0, 0.0);
    let g = t1_apply(Generator::P1, &f);
    let expected = C64::new(0.0, grid.k_of(grid.slot_of(3)));
    assert!((g.comp(FieldId::Field1, Sign::Plus).coef()[slot] - expected).norm() < 1e-15);
}

#[test]
fn t1_time_translation_signs_and_rotation_kernel() {
    let grid = test_grid();
    let f = localized_state(&grid, (1.0, 0.7));
    let g = t1_apply(Generator::P0, &f);
    for (j, s, comp) in f.components() {
        let m = j.mass(1.0);
        let expected = comp
            .applied(&rkg_core::field::MultiplierSpec::Omega { mass: m, power: 1.0 })
            .scaled(C64::new(0.0, s.factor::<f64>()));
        let diff = g.comp(j, s).sub(&expected).l2_norm();
        assert!(diff < 1e-13 * expected.l2_norm().max(1e-300));
    }

    // a radial field is annihilated by the rotation generator
    let mut radial = PhaseState::zeros(&grid, 1.0);
    *radial.comp_mut(FieldId::Field1, Sign::Plus) =
        AnalyticProfile::gaussian(C64::new(1.0, 0.0), [0.0, 0.0], 3.0).sample(&grid);
    radial.enforce_reality();
    let rot = t1_apply(Generator::R, &radial);
    let rel = e_norm(&rot) / e_norm(&radial);
    assert!(rel < 1e-10, "rotation residual {rel:e}");
}

#[test]
fn quadratic_part_vanishes_for_flat_generators_and_polarizes() {
    let grid = test_grid();
    let f = localized_state(&grid, (1.0, 0.6));
    let h = localized_state(&grid, (0.5, 0.9));
    for kind in [SystemKind::A, SystemKind::B] {
        for g in [Generator::P1, Generator::P2, Generator::R] {
            assert_eq!(t2_apply(g, kind, &f).max_abs(), 0.0);
        }
        // symmetry of the bilinear form
        let fh = t2_bilinear(Generator::P0, kind, &f, &h);
        let hf = t2_bilinear(Generator::P0, kind, &h, &f);
        assert!(e_norm_diff(&fh, &hf) < 1e-14 * e_norm(&fh));

        // quadratic polarization identity: T2(f+h) - T2(f) - T2(h) = 2 B(f,h)
        let mut sum = f.clone();
        sum.axpy(C64::new(1.0, 0.0), &h);
        let mut lhs = t2_apply(Generator::P0, kind, &sum);
        lhs.axpy(C64::new(-1.0, 0.0), &t2_apply(Generator::P0, kind, &f));
        lhs.axpy(C64::new(-1.0, 0.0), &t2_apply(Generator::P0, kind, &h));
        let rhs2 = fh.scaled(C64::new(2.0, 0.0));
        assert!(e_norm_diff(&lhs, &rhs2) < 1e-11 * e_norm(&rhs2));
    }
}

#[test]
fn time_translation_agrees_with_the_evolution_rhs() {
    let grid = test_grid();
    let f = localized_state(&grid, (1.0, 0.8));
    for kind in [SystemKind::A, SystemKind::B] {
        let a = t_apply(Generator::P0, kind, &f);
        let b = rhs(kind, &f);
        assert!(e_norm_diff(&a, &b) < 1e-12 * e_norm(&b), "{kind:?}");
    }
    // zero maps to zero
    let zero = PhaseState::<f64>::zeros(&grid, 1.0);
    assert_eq!(t_apply(Generator::N1, SystemKind::A, &zero).max_abs(), 0.0);
}

#[test]
fn boost_is_linear_part_plus_coordinate_weighted_source() {
    let grid = test_grid();
    let f = localized_state(&grid, (1.0, 0.5));
    let kind = SystemKind::A;
    let full = t_apply(Generator::N1, kind, &f);
    let mut expected = t1_apply(Generator::N1, &f);
    let src = t2_apply(Generator::P0, kind, &f);
    let weighted = {
        let mut w = src.clone();
        for s in Sign::BOTH {
            *w.comp_mut(FieldId::Field2, s) = w
                .comp(FieldId::Field2, s)
                .applied(&rkg_core::field::MultiplierSpec::Coordinate { axis: 0 });
        }
        w
    };
    expected.axpy(C64::new(1.0, 0.0), &weighted);
    assert!(e_norm_diff(&full, &expected) < 1e-12 * e_norm(&expected));
}

#[test]
fn word_extension_base_cases_and_flat_commutation() {
    let grid = test_grid();
    let f = localized_state(&grid, (0.8, 0.5));
    let kind = SystemKind::B;

    // identity word
    let id = t_word(&Word(vec![]), kind, &f);
    assert!(e_norm_diff(&id, &f) < 1e-15);

    // single letter reduces to t_apply
    let w = t_word(&Word(vec![Generator::N2]), kind, &f);
    assert!(e_norm_diff(&w, &t_apply(Generator::N2, kind, &f)) < 1e-15);

    // flat generators commute on linearized data: compare T1-only words
    let p12 = t1_apply(Generator::P1, &t1_apply(Generator::P2, &f));
    let p21 = t1_apply(Generator::P2, &t1_apply(Generator::P1, &f));
    assert!(e_norm_diff(&p12, &p21) < 1e-12 * e_norm(&p12));
}

#[test]
fn word_commutators_reduce_to_bracket_words() {
    // T_{XY} - T_{YX} evaluated through the word extension must equal the
    // bracket expansion from the table
    let grid = test_grid();
    let f = localized_state(&grid, (0.8, 0.5));
    let kind = SystemKind::A;
    let table = structure_constants();
    for (x, y) in [
        (Generator::N1, Generator::P0),
        (Generator::R, Generator::P1),
        (Generator::N1, Generator::N2),
    ] {
        let xy = t_word(&Word(vec![x, y]), kind, &f);
        let yx = t_word(&Word(vec![y, x]), kind, &f);
        let mut lhs = xy.clone();
        lhs.axpy(C64::new(-1.0, 0.0), &yx);
        let mut rhs_state = PhaseState::zeros(&grid, 1.0);
        for (z, &g) in Generator::ALL.iter().enumerate() {
            let c = table.c[x.index()][y.index()][z];
            if c != 0 {
                rhs_state.axpy(C64::new(c as f64, 0.0), &t_apply(g, kind, &f));
            }
        }
        let scale = e_norm(&xy).max(e_norm(&yx)).max(e_norm(&rhs_state));
        let rel = e_norm_diff(&lhs, &rhs_state) / scale;
        assert!(rel < 1e-6, "{x:?},{y:?}: rel {rel:e}");
    }
}

#[test]
fn linear_bracket_closure_all_pairs() {
    let grid = test_grid();
    let f = localized_state(&grid, (1.0, 0.7));
    let table = structure_constants();
    for (i, &x) in Generator::ALL.iter().enumerate() {
        for &y in Generator::ALL.iter().skip(i + 1) {
            let r = bracket_check(x, y, SystemKind::A, &f, &table, true);
            assert!(r < 1e-8, "linear [{}val, {}]: {r:e}", x.label(), y.label());
        }
    }
    // X = Y is exactly zero
    let r = bracket_check(Generator::N1, Generator::N1, SystemKind::A, &f, &table, true);
    assert_eq!(r, 0.0);
}

#[test]
fn nonlinear_bracket_closure_all_pairs_both_kinds() {
    let grid = test_grid();
    let f = localized_state(&grid, (1.0, 0.7));
    let table = structure_constants();
    for kind in [SystemKind::A, SystemKind::B] {
        for (i, &x) in Generator::ALL.iter().enumerate() {
            for &y in Generator::ALL.iter().skip(i + 1) {
                let r = bracket_check(x, y, kind, &f, &table, false);
                assert!(
                    r < 1e-6,
                    "{kind:?} [{}, {}]: {r:e}",
                    x.label(),
                    y.label()
                );
            }
        }
    }
}

#[test]
fn quadratic_term_is_translation_equivariant() {
    let grid = test_grid();
    let data = ScatteringData::from_catalog(
        &grid,
        1.0,
        Some(AnalyticProfile::gaussian(C64::new(1.0, 0.1), [0.0, 0.0], 4.0)),
        Some(AnalyticProfile::gaussian(C64::new(0.6, 0.0), [0.0, 0.0], 4.0)),
    );
    let shift = [1.25, -0.75];
    let shifted = data.translated(shift);
    let kind = SystemKind::A;
    let src_then_shift = {
        let src = t2_apply(Generator::P0, kind, data.state());
        let mut out = src.clone();
        for (j, s, c) in src.components() {
            let mut v = c.clone();
            for (l, kx, ky) in grid.modes() {
                v.coef_mut()[l] *= C64::from_polar(1.0, kx * shift[0] + ky * shift[1]);
            }
            *out.comp_mut(j, s) = v;
        }
        out
    };
    let shift_then_src = t2_apply(Generator::P0, kind, shifted.state());
    let rel = e_norm_diff(&src_then_shift, &shift_then_src) / e_norm(&shift_then_src);
    assert!(rel < 1e-10, "equivariance residual {rel:e}");
}

#[test]
fn space_translation_intertwines_the_wave_operator() {
    // the discrete machinery is exactly equivariant under spectral shifts,
    // so this residual sits at the solver-roundoff floor even at small t_max
    let grid = Grid::<f64>::new(96, 96.0).unwrap();
    let data = ScatteringData::from_catalog(
        &grid,
        1.0,
        Some(AnalyticProfile::gaussian(C64::new(0.8, 0.0), [0.0, 0.0], 4.0)),
        Some(AnalyticProfile::gaussian(C64::new(0.4, 0.0), [0.0, 0.0], 4.0)),
    );
    let params = WaveOpParams {
        t_max: 10.0,
        dt: 0.05,
        doublings: 1,
    };
    let r = intertwine_check(
        SystemKind::A,
        &data,
        Translation::Space([0.5, 0.0]),
        &params,
    )
    .unwrap();
    assert!(r < 1e-10, "space intertwining {r:e}");

    // identity translation is exactly zero
    let r0 = intertwine_check(
        SystemKind::A,
        &data,
        Translation::Space([0.0, 0.0]),
        &params,
    )
    .unwrap();
    assert!(r0 < 1e-14);
}
