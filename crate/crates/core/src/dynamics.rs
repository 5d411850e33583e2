//! Nonlinear evolution of the phase-space variable: system A couples the
//! square of field 1 into field 2 (field 1 evolves freely), system B couples
//! the product of the two fields back into field 1 (field 2 evolves freely).
//! Time stepping is a classical 4th-order update in the profile frame with
//! the oscillatory linear flow applied exactly.

use crate::error::{Error, Result};
use crate::field::{Sign, SpectralField};
use crate::grid::Grid;
use crate::scalar::{Real, C};
use crate::state::{reconstruct_phi, FieldId, PhaseState};

/// Which of the two resonant systems is being solved. The masses are always
/// `(m, 2m)`, so the quadratic interaction phase is exactly stationary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SystemKind {
    /// `(Box + m^2) phi1 = 0`, `(Box + (2m)^2) phi2 = phi1^2`
    A,
    /// `(Box + m^2) phi1 = phi1 phi2`, `(Box + (2m)^2) phi2 = 0`
    B,
}

impl SystemKind {
    /// Field receiving the quadratic source.
    pub fn source_field(self) -> FieldId {
        match self {
            SystemKind::A => FieldId::Field2,
            SystemKind::B => FieldId::Field1,
        }
    }

    /// Field that evolves exactly freely.
    pub fn free_field(self) -> FieldId {
        match self {
            SystemKind::A => FieldId::Field1,
            SystemKind::B => FieldId::Field2,
        }
    }
}

/// Quadratic source `T^2_{P0}(a)`: the real field `F` is added identically to
/// both sign components of the receiving field. Returns a state that is zero
/// except in those two slots.
pub fn nonlinear_term<T: Real>(kind: SystemKind, a: &PhaseState<T>) -> PhaseState<T> {
    let mut out = PhaseState::zeros(a.grid(), a.mass());
    let f = source_spectrum(kind, a);
    let target = kind.source_field();
    *out.comp_mut(target, Sign::Plus) = f.clone();
    *out.comp_mut(target, Sign::Minus) = f;
    out
}

/// Spectral transform of the scalar source: `phi1^2` for A, `phi1 phi2` for B.
pub fn source_spectrum<T: Real>(kind: SystemKind, a: &PhaseState<T>) -> SpectralField<T> {
    let phi1 = reconstruct_phi(a, FieldId::Field1);
    match kind {
        SystemKind::A => phi1.square(),
        SystemKind::B => {
            let phi2 = reconstruct_phi(a, FieldId::Field2);
            phi1.product(&phi2).expect("same grid")
        }
    }
}

/// Symmetric bilinear polarization of the quadratic source, used by the
/// representation machinery: `B(f, f) = T^2_{P0}(f)`.
pub fn nonlinear_bilinear<T: Real>(
    kind: SystemKind,
    a: &PhaseState<T>,
    b: &PhaseState<T>,
) -> PhaseState<T> {
    let mut out = PhaseState::zeros(a.grid(), a.mass());
    let f = match kind {
        SystemKind::A => {
            let pa = reconstruct_phi(a, FieldId::Field1);
            let pb = reconstruct_phi(b, FieldId::Field1);
            pa.product(&pb).expect("same grid")
        }
        SystemKind::B => {
            let a1 = reconstruct_phi(a, FieldId::Field1);
            let a2 = reconstruct_phi(a, FieldId::Field2);
            let b1 = reconstruct_phi(b, FieldId::Field1);
            let b2 = reconstruct_phi(b, FieldId::Field2);
            let mut p = a1.product(&b2).expect("same grid");
            p.add_assign(&b1.product(&a2).expect("same grid"));
            p.scale(C::new(T::half(), T::zero()));
            p
        }
    };
    let target = kind.source_field();
    *out.comp_mut(target, Sign::Plus) = f.clone();
    *out.comp_mut(target, Sign::Minus) = f;
    out
}

/// Full right-hand side `d/dt a = i eps omega a + T^2_{P0}(a)`.
pub fn rhs<T: Real>(kind: SystemKind, a: &PhaseState<T>) -> PhaseState<T> {
    let mut out = nonlinear_term(kind, a);
    for j in FieldId::BOTH {
        for s in Sign::BOTH {
            let mut lin = a.comp(j, s).clone();
            let m = j.mass(a.mass());
            let i_eps = C::new(T::zero(), s.factor());
            for (l, kx, ky) in a.grid().modes() {
                lin.coef_mut()[l] *= i_eps.scale(crate::field::omega(m, kx, ky));
            }
            out.comp_mut(j, s).add_assign(&lin);
        }
    }
    out
}

/// Precomputed phase tables for one step size; reused across a whole solve.
pub struct Stepper<T: Real> {
    kind: SystemKind,
    dt: T,
    /// `e^{i omega_{jm} dt/2}` per field; the minus component uses the conjugate.
    half: [Vec<C<T>>; 2],
    full: [Vec<C<T>>; 2],
    /// cached energy-norm weights `omega_{jm}^{-1/2} dk` for the step guard
    e_weight: [Vec<T>; 2],
    /// Step-rejection guard: relative energy growth allowed per step.
    pub max_growth: T,
}

impl<T: Real> Stepper<T> {
    pub fn new(grid: &Grid<T>, mass: T, kind: SystemKind, dt: T) -> Self {
        let table = |m: T, t: T| -> Vec<C<T>> {
            grid.modes()
                .map(|(_, kx, ky)| C::from_polar(T::one(), crate::field::omega(m, kx, ky) * t))
                .collect()
        };
        let weights = |m: T| -> Vec<T> {
            grid.modes()
                .map(|(_, kx, ky)| crate::field::omega(m, kx, ky).sqrt().recip() * grid.dk())
                .collect()
        };
        Stepper {
            kind,
            dt,
            half: [
                table(mass, dt * T::half()),
                table(mass * T::two(), dt * T::half()),
            ],
            full: [table(mass, dt), table(mass * T::two(), dt)],
            e_weight: [weights(mass), weights(mass * T::two())],
            max_growth: T::of(1.1),
        }
    }

    /// Energy norm via the cached weight tables.
    fn guard_norm(&self, a: &PhaseState<T>) -> T {
        let mut acc = T::zero();
        for (jj, j) in FieldId::BOTH.into_iter().enumerate() {
            for s in Sign::BOTH {
                for (c, w) in a.comp(j, s).coef().iter().zip(&self.e_weight[jj]) {
                    acc += c.norm_sqr() * *w * *w;
                }
            }
        }
        acc.sqrt()
    }

    #[inline]
    pub fn dt(&self) -> T {
        self.dt
    }

    fn propagate(&self, a: &mut PhaseState<T>, half: bool) {
        for (jj, j) in FieldId::BOTH.into_iter().enumerate() {
            let table = if half { &self.half[jj] } else { &self.full[jj] };
            for s in Sign::BOTH {
                let coef = a.comp_mut(j, s).coef_mut();
                match s {
                    Sign::Plus => {
                        for (c, p) in coef.iter_mut().zip(table) {
                            *c *= *p;
                        }
                    }
                    Sign::Minus => {
                        for (c, p) in coef.iter_mut().zip(table) {
                            *c *= p.conj();
                        }
                    }
                }
            }
        }
    }

    /// One 4th-order step in the profile frame; the linear flow is exact, so
    /// disabling the nonlinearity reproduces free propagation to roundoff.
    pub fn step(&self, a: &PhaseState<T>, t: T) -> Result<PhaseState<T>> {
        let h = C::new(self.dt, T::zero());
        let half = C::new(self.dt * T::half(), T::zero());
        let sixth = C::new(self.dt / T::of(6.0), T::zero());
        let third = C::new(self.dt / T::of(3.0), T::zero());

        let u1 = nonlinear_term(self.kind, a);

        // stage 2: E_{h/2} (a + h/2 u1)
        let mut s2 = a.clone();
        s2.axpy(half, &u1);
        self.propagate(&mut s2, true);
        let u2 = nonlinear_term(self.kind, &s2);

        // stage 3: E_{h/2} a + h/2 u2
        let mut ea_half = a.clone();
        self.propagate(&mut ea_half, true);
        let mut s3 = ea_half.clone();
        s3.axpy(half, &u2);
        let u3 = nonlinear_term(self.kind, &s3);

        // stage 4: E_h a + h E_{h/2} u3
        let mut eu3 = u3.clone();
        self.propagate(&mut eu3, true);
        let mut ea_full = a.clone();
        self.propagate(&mut ea_full, false);
        let mut s4 = ea_full.clone();
        s4.axpy(h, &eu3);
        let u4 = nonlinear_term(self.kind, &s4);

        // combine: E_h a + h/6 (E_h u1 + 2 E_{h/2} (u2 + u3) + u4)
        let mut eu1 = u1;
        self.propagate(&mut eu1, false);
        let mut mid = u2;
        mid.axpy(C::new(T::one(), T::zero()), &u3);
        self.propagate(&mut mid, true);

        let mut out = ea_full;
        out.axpy(sixth, &eu1);
        out.axpy(third, &mid);
        out.axpy(sixth, &u4);

        let before = self.guard_norm(a);
        let after = self.guard_norm(&out);
        if before > T::of(1e-300) && after > before * self.max_growth {
            return Err(Error::StepRejected {
                t: t.to_f64().unwrap_or(f64::NAN),
                growth: (after / before).to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(out)
    }
}

/// One-shot step for callers that do not reuse phase tables.
pub fn step<T: Real>(
    kind: SystemKind,
    a: &PhaseState<T>,
    t: T,
    dt: T,
) -> Result<PhaseState<T>> {
    Stepper::new(a.grid(), a.mass(), kind, dt).step(a, t)
}

/// Sampled solution of the Cauchy problem.
#[derive(Clone, Debug)]
pub struct Trajectory<T: Real> {
    pub times: Vec<T>,
    pub states: Vec<PhaseState<T>>,
    pub dt: T,
    pub order: usize,
}

/// Integrate from `t0` to `t1` (either direction), invoking `on_sample` at
/// `t0`, every `cadence`-th step and at `t1`. `|t1 - t0| / dt` must be an
/// integer up to rounding.
pub fn integrate<T: Real>(
    kind: SystemKind,
    a0: &PhaseState<T>,
    t0: T,
    t1: T,
    dt: T,
    cadence: usize,
    mut on_sample: impl FnMut(T, &PhaseState<T>),
) -> Result<PhaseState<T>> {
    let span = t1 - t0;
    if span == T::zero() {
        on_sample(t0, a0);
        return Ok(a0.clone());
    }
    let steps_real = (span / dt).abs();
    let steps = steps_real.round().to_f64().unwrap() as u64;
    if steps == 0 || (steps_real - T::of(steps as f64)).abs() > T::of(1e-9) {
        return Err(Error::NonIntegralSpan {
            span: span.to_f64().unwrap_or(f64::NAN),
            dt: dt.to_f64().unwrap_or(f64::NAN),
        });
    }
    let signed_dt = if span > T::zero() { dt.abs() } else { -dt.abs() };
    let stepper = Stepper::new(a0.grid(), a0.mass(), kind, signed_dt);
    let cadence = cadence.max(1);

    let mut a = a0.clone();
    on_sample(t0, &a);
    for i in 0..steps {
        let t = t0 + signed_dt * T::of(i as f64);
        a = stepper.step(&a, t)?;
        if (i + 1) % cadence as u64 == 0 || i + 1 == steps {
            on_sample(t0 + signed_dt * T::of((i + 1) as f64), &a);
        }
    }
    Ok(a)
}

/// Cauchy solver returning the sampled trajectory.
pub fn solve<T: Real>(
    kind: SystemKind,
    a0: &PhaseState<T>,
    t0: T,
    t1: T,
    dt: T,
    cadence: usize,
) -> Result<Trajectory<T>> {
    let mut times = Vec::new();
    let mut states = Vec::new();
    integrate(kind, a0, t0, t1, dt, cadence, |t, a| {
        times.push(t);
        states.push(a.clone());
    })?;
    Ok(Trajectory {
        times,
        states,
        dt,
        order: 4,
    })
}
