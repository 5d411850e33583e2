//! Integrator checks: free-flow exactness, self-convergence order,
//! reversibility, conservation structure of the two systems.

use num_complex::Complex64 as C64;
use rkg_core::analytic::AnalyticProfile;
use rkg_core::dynamics::{integrate, nonlinear_term, rhs, solve, step, SystemKind};
use rkg_core::field::Sign;
use rkg_core::grid::Grid;
use rkg_core::norms::{e_norm, e_norm_diff};
use rkg_core::state::{FieldId, PhaseState};

/// Reality-constrained state built from Gaussian catalog spectra.
fn catalog_state(grid: &Grid<f64>, mass: f64, a1: f64, a2: f64, width: f64) -> PhaseState<f64> {
    let mut state = PhaseState::zeros(grid, mass);
    let f1 = AnalyticProfile::gaussian(C64::new(a1, 0.15 * a1), [0.0, 0.0], width);
    let f2 = AnalyticProfile::gaussian(C64::new(a2, -0.1 * a2), [0.0, 0.0], width);
    *state.comp_mut(FieldId::Field1, Sign::Plus) = f1.sample(grid);
    *state.comp_mut(FieldId::Field2, Sign::Plus) = f2.sample(grid);
    state.enforce_reality();
    state
}

#[test]
fn quadratic_source_vanishes_on_zero_and_on_missing_factor() {
    let grid = Grid::<f64>::new(32, 24.0).unwrap();
    let zero = PhaseState::<f64>::zeros(&grid, 1.0);
    assert_eq!(nonlinear_term(SystemKind::A, &zero).max_abs(), 0.0);
    assert_eq!(nonlinear_term(SystemKind::B, &zero).max_abs(), 0.0);

    // kind A with a1 = 0: source depends only on field 1
    let only2 = catalog_state(&grid, 1.0, 0.0, 1.0, 2.0);
    assert_eq!(nonlinear_term(SystemKind::A, &only2).max_abs(), 0.0);
}

#[test]
fn cosine_mode_squares_onto_the_expected_spectrum() {
    let grid = Grid::<f64>::new(48, 24.0).unwrap();
    let m = 1.0;
    let k0 = (grid.slot_of(2), grid.slot_of(1));
    // phi1 = cos(k0 . x), phidot = 0  =>  ahat_{1,±} = ±i omega phihat
    let mut state = PhaseState::zeros(&grid, m);
    let mut phihat = rkg_core::field::SpectralField::zeros(&grid);
    let half_amp = grid.length() * grid.length() / std::f64::consts::TAU / 2.0;
    phihat.coef_mut()[grid.lin(k0.0, k0.1)] = C64::new(half_amp, 0.0);
    phihat.coef_mut()[grid.lin(grid.reflect(k0.0), grid.reflect(k0.1))] = C64::new(half_amp, 0.0);
    for s in Sign::BOTH {
        *state.comp_mut(FieldId::Field1, s) = phihat
            .applied(&rkg_core::field::MultiplierSpec::Omega { mass: m, power: 1.0 })
            .scaled(C64::new(0.0, s.factor::<f64>()));
    }
    assert!(state.reality_drift() < 1e-13);

    // F2 = phi1^2 = (1 + cos(2 k0 x)) / 2: support {0, ±2 k0}
    let src = nonlinear_term(SystemKind::A, &state);
    let f2 = src.comp(FieldId::Field2, Sign::Plus);
    let expected_slots = [
        grid.lin(0, 0),
        grid.lin(grid.slot_of(4), grid.slot_of(2)),
        grid.lin(grid.slot_of(-4), grid.slot_of(-2)),
    ];
    for (l, _, _) in grid.modes() {
        let v = f2.coef()[l].norm();
        if expected_slots.contains(&l) {
            assert!(v > 1e-6, "missing line at {l}");
        } else {
            assert!(v < 1e-10, "spurious line at {l}: {v:e}");
        }
    }
    // both sign components receive the same real source
    let diff: f64 = f2
        .coef()
        .iter()
        .zip(src.comp(FieldId::Field2, Sign::Minus).coef())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    assert_eq!(diff, 0.0);
}

#[test]
fn rhs_linear_part_matches_free_propagator_by_richardson() {
    let grid = Grid::<f64>::new(32, 24.0).unwrap();
    let state = catalog_state(&grid, 1.0, 0.4, 0.3, 2.0);
    // kind A with a1 = 0 leaves only the linear rotation
    let mut free_only = state.clone();
    *free_only.comp_mut(FieldId::Field1, Sign::Plus) =
        rkg_core::field::SpectralField::zeros(&grid);
    *free_only.comp_mut(FieldId::Field1, Sign::Minus) =
        rkg_core::field::SpectralField::zeros(&grid);

    let f = rhs(SystemKind::A, &free_only);
    for dt in [1e-3, 5e-4] {
        // centered difference of V(t) at t = 0
        let fwd = free_only.free_propagate(dt);
        let bwd = free_only.free_propagate(-dt);
        let mut fd = fwd.sub(&bwd);
        fd = fd.scaled(C64::new(0.5 / dt, 0.0));
        let err = e_norm_diff(&fd, &f);
        // centered difference is O(dt^2)
        assert!(err < 3.0 * dt * dt * e_norm(&f), "dt {dt}: err {err:e}");
    }

    // the source is real, so the constraint derivative vanishes: rhs of a
    // constrained state stays mirror-symmetric
    let full = rhs(SystemKind::A, &state);
    assert!(full.reality_drift() < 1e-12);
}

#[test]
fn disabled_nonlinearity_reduces_to_exact_free_flow() {
    let grid = Grid::<f64>::new(32, 24.0).unwrap();
    // kind A with zero field-1 data: field 2 evolves exactly freely
    let state = catalog_state(&grid, 1.0, 0.0, 0.8, 2.0);
    let stepped = step(SystemKind::A, &state, 0.0, 0.25).unwrap();
    let free = state.free_propagate(0.25);
    assert!(e_norm_diff(&stepped, &free) < 1e-14 * e_norm(&free));
}

#[test]
fn field_one_is_exactly_free_in_system_a() {
    let grid = Grid::<f64>::new(48, 32.0).unwrap();
    let state = catalog_state(&grid, 1.0, 1.0, 0.5, 3.0);
    let t1 = 4.0;
    let end = integrate(SystemKind::A, &state, 0.0, t1, 0.05, usize::MAX, |_, _| {}).unwrap();
    let free1 = state
        .comp(FieldId::Field1, Sign::Plus)
        .free_propagate(1.0, Sign::Plus, t1);
    let err = end.comp(FieldId::Field1, Sign::Plus).sub(&free1).l2_norm();
    assert!(err < 1e-10 * free1.l2_norm(), "err {err:e}");

    // symmetric statement for system B: field 2 free
    let endb = integrate(SystemKind::B, &state, 0.0, t1, 0.05, usize::MAX, |_, _| {}).unwrap();
    let free2 = state
        .comp(FieldId::Field2, Sign::Minus)
        .free_propagate(2.0, Sign::Minus, t1);
    let errb = endb.comp(FieldId::Field2, Sign::Minus).sub(&free2).l2_norm();
    assert!(errb < 1e-10 * free2.l2_norm(), "err {errb:e}");
}

#[test]
fn halving_dt_cuts_the_local_error_sixteenfold() {
    let grid = Grid::<f64>::new(48, 32.0).unwrap();
    let state = catalog_state(&grid, 1.0, 1.5, 0.8, 3.0);
    let t1 = 2.0;
    let coarse = integrate(SystemKind::B, &state, 0.0, t1, 0.1, usize::MAX, |_, _| {}).unwrap();
    let medium = integrate(SystemKind::B, &state, 0.0, t1, 0.05, usize::MAX, |_, _| {}).unwrap();
    let fine = integrate(SystemKind::B, &state, 0.0, t1, 0.025, usize::MAX, |_, _| {}).unwrap();
    let e1 = e_norm_diff(&coarse, &medium);
    let e2 = e_norm_diff(&medium, &fine);
    let order = (e1 / e2).log2();
    assert!(order > 3.8, "measured order {order}");
}

#[test]
fn forward_backward_round_trip_returns_initial_data() {
    let grid = Grid::<f64>::new(48, 32.0).unwrap();
    let state = catalog_state(&grid, 1.0, 0.5, 0.25, 3.0);
    let t1 = 3.0;
    let dt = 0.02;
    let fwd = integrate(SystemKind::B, &state, 0.0, t1, dt, usize::MAX, |_, _| {}).unwrap();
    let back = integrate(SystemKind::B, &fwd, t1, 0.0, dt, usize::MAX, |_, _| {}).unwrap();
    let err = e_norm_diff(&back, &state) / e_norm(&state);
    assert!(err < 1e-8, "round trip err {err:e}");
}

#[test]
fn reality_constraint_drift_stays_tiny() {
    let grid = Grid::<f64>::new(48, 32.0).unwrap();
    let state = catalog_state(&grid, 1.0, 1.0, 0.5, 3.0);
    assert!(state.reality_drift() < 1e-14);
    let t1 = 5.0;
    let end = integrate(SystemKind::B, &state, 0.0, t1, 0.05, usize::MAX, |_, _| {}).unwrap();
    assert!(end.reality_drift() < 1e-10 * t1, "drift {:e}", end.reality_drift());
}

#[test]
fn zero_data_solves_to_zero_trajectory() {
    let grid = Grid::<f64>::new(32, 24.0).unwrap();
    let zero = PhaseState::<f64>::zeros(&grid, 1.0);
    let traj = solve(SystemKind::A, &zero, 0.0, 1.0, 0.1, 2).unwrap();
    assert_eq!(traj.times.len(), traj.states.len());
    assert!(traj.states.iter().all(|s| s.max_abs() == 0.0));
    assert!(traj.times.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn non_integral_span_is_rejected() {
    let grid = Grid::<f64>::new(32, 24.0).unwrap();
    let zero = PhaseState::<f64>::zeros(&grid, 1.0);
    assert!(solve(SystemKind::A, &zero, 0.0, 1.03, 0.1, 1).is_err());
}
