//! Phase-space variables for the two-field system: the four-component vector
//! `a = (a_{1,+}, a_{1,-}, a_{2,+}, a_{2,-})` with masses `(m, 2m)`, the map
//! to and from the real field pair, and the reality constraint tying the two
//! epsilon components together.

use crate::error::{Error, Result};
use crate::field::{MultiplierSpec, PhysicalField, Sign, SpectralField};
use crate::grid::Grid;
use crate::scalar::{imag_unit, Real, C};

/// The two fields of the system: `Field1` carries mass `m`, `Field2` carries
/// the resonant mass `2m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldId {
    Field1,
    Field2,
}

impl FieldId {
    pub const BOTH: [FieldId; 2] = [FieldId::Field1, FieldId::Field2];

    #[inline]
    pub fn mass<T: Real>(self, m: T) -> T {
        match self {
            FieldId::Field1 => m,
            FieldId::Field2 => m * T::two(),
        }
    }

    #[inline]
    fn offset(self) -> usize {
        match self {
            FieldId::Field1 => 0,
            FieldId::Field2 => 2,
        }
    }
}

#[inline]
fn comp_index(j: FieldId, s: Sign) -> usize {
    j.offset()
        + match s {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
}

/// Four spectral components indexed by `(field, sign)` plus the base mass.
#[derive(Clone, Debug)]
pub struct PhaseState<T: Real> {
    mass: T,
    comps: [SpectralField<T>; 4],
}

impl<T: Real> PhaseState<T> {
    pub fn zeros(grid: &Grid<T>, mass: T) -> Self {
        PhaseState {
            mass,
            comps: std::array::from_fn(|_| SpectralField::zeros(grid)),
        }
    }

    pub fn from_components(mass: T, comps: [SpectralField<T>; 4]) -> Self {
        PhaseState { mass, comps }
    }

    #[inline]
    pub fn mass(&self) -> T {
        self.mass
    }

    #[inline]
    pub fn grid(&self) -> &Grid<T> {
        self.comps[0].grid()
    }

    #[inline]
    pub fn comp(&self, j: FieldId, s: Sign) -> &SpectralField<T> {
        &self.comps[comp_index(j, s)]
    }

    #[inline]
    pub fn comp_mut(&mut self, j: FieldId, s: Sign) -> &mut SpectralField<T> {
        &mut self.comps[comp_index(j, s)]
    }

    pub fn components(&self) -> impl Iterator<Item = (FieldId, Sign, &SpectralField<T>)> {
        FieldId::BOTH.into_iter().flat_map(move |j| {
            Sign::BOTH
                .into_iter()
                .map(move |s| (j, s, self.comp(j, s)))
        })
    }

    /// Free propagator `V(t)`: each component picks up its own mass and sign.
    pub fn free_propagate(&self, t: T) -> Self {
        let mut out = self.clone();
        for j in FieldId::BOTH {
            for s in Sign::BOTH {
                *out.comp_mut(j, s) = self.comp(j, s).free_propagate(j.mass(self.mass), s, t);
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (a, b) in out.comps.iter_mut().zip(&other.comps) {
            a.axpy(C::new(-T::one(), T::zero()), b);
        }
        out
    }

    pub fn axpy(&mut self, c: C<T>, other: &Self) {
        for (a, b) in self.comps.iter_mut().zip(&other.comps) {
            a.axpy(c, b);
        }
    }

    pub fn scaled(&self, c: C<T>) -> Self {
        let mut out = self.clone();
        for a in out.comps.iter_mut() {
            a.scale(c);
        }
        out
    }

    /// Relative violation of `ahat_{j,-}(k) = conj(ahat_{j,+}(-k))`.
    pub fn reality_drift(&self) -> T {
        let mut worst = T::zero();
        for j in FieldId::BOTH {
            let plus = self.comp(j, Sign::Plus);
            let minus = self.comp(j, Sign::Minus);
            let mirror = plus.reflect_conj();
            let scale = plus
                .l2_norm()
                .max(minus.l2_norm())
                .max(T::of(1e-300));
            let drift = minus.sub(&mirror).l2_norm() / scale;
            worst = worst.max(drift);
        }
        worst
    }

    /// Rebuild the minus components from the plus ones so the constraint
    /// holds exactly; used by constructors, never silently by the dynamics.
    pub fn enforce_reality(&mut self) {
        for j in FieldId::BOTH {
            *self.comp_mut(j, Sign::Minus) = self.comp(j, Sign::Plus).reflect_conj();
        }
    }

    pub fn max_abs(&self) -> T {
        self.comps
            .iter()
            .map(|c| c.max_abs())
            .fold(T::zero(), |a, b| a.max(b))
    }
}

/// Real field pair `(phi_j, phidot_j)` on the physical grid.
#[derive(Clone, Debug)]
pub struct FieldPair<T: Real> {
    pub grid: Grid<T>,
    pub mass: T,
    pub phi: [Vec<T>; 2],
    pub phi_dot: [Vec<T>; 2],
}

impl<T: Real> FieldPair<T> {
    pub fn zeros(grid: &Grid<T>, mass: T) -> Self {
        let z = vec![T::zero(); grid.len()];
        FieldPair {
            grid: grid.clone(),
            mass,
            phi: [z.clone(), z.clone()],
            phi_dot: [z.clone(), z],
        }
    }
}

/// Phase-space change of variables `a_{j,eps} = phidot_j + i eps omega_{jm} phi_j`.
/// The output satisfies the reality constraint by construction.
pub fn to_phase_space<T: Real>(pair: &FieldPair<T>) -> Result<PhaseState<T>> {
    let grid = &pair.grid;
    let mut state = PhaseState::zeros(grid, pair.mass);
    for (jj, j) in FieldId::BOTH.into_iter().enumerate() {
        let phi = PhysicalField::from_real(grid, &pair.phi[jj])?.to_spectral();
        let dphi = PhysicalField::from_real(grid, &pair.phi_dot[jj])?.to_spectral();
        let omega_phi = phi.applied(&MultiplierSpec::Omega {
            mass: j.mass(pair.mass),
            power: T::one(),
        });
        for s in Sign::BOTH {
            let mut a = dphi.clone();
            a.axpy(imag_unit::<T>().scale(s.factor()), &omega_phi);
            *state.comp_mut(j, s) = a;
        }
    }
    Ok(state)
}

/// Inverse map: `phi_j = (2 i omega_{jm})^-1 (a_{j,+} - a_{j,-})`,
/// `phidot_j = (a_{j,+} + a_{j,-}) / 2`. Requires the reality constraint to
/// hold within `tol`; imaginary residues up to `tol` are discarded.
pub fn from_phase_space<T: Real>(state: &PhaseState<T>, tol: T) -> Result<FieldPair<T>> {
    let drift = state.reality_drift();
    if drift > tol {
        return Err(Error::RealityViolation {
            drift: drift.to_f64().unwrap_or(f64::NAN),
            tol: tol.to_f64().unwrap_or(f64::NAN),
        });
    }
    let grid = state.grid().clone();
    let mut pair = FieldPair::zeros(&grid, state.mass());
    for (jj, j) in FieldId::BOTH.into_iter().enumerate() {
        let phi_spec = reconstruct_phi(state, j);
        let mut dphi_spec = state.comp(j, Sign::Plus).clone();
        dphi_spec.add_assign(state.comp(j, Sign::Minus));
        dphi_spec.scale(C::new(T::half(), T::zero()));
        pair.phi[jj] = phi_spec.to_physical().into_real(tol)?;
        pair.phi_dot[jj] = dphi_spec.to_physical().into_real(tol)?;
    }
    Ok(pair)
}

/// Spectral reconstruction of `phi_j` from the state (no reality check);
/// `(2 i omega)^-1 (a_+ - a_-)` in a single pass.
pub fn reconstruct_phi<T: Real>(state: &PhaseState<T>, j: FieldId) -> SpectralField<T> {
    let grid = state.grid().clone();
    let m = j.mass(state.mass());
    let plus = state.comp(j, Sign::Plus).coef();
    let minus = state.comp(j, Sign::Minus).coef();
    let mut out = SpectralField::zeros(&grid);
    for (l, kx, ky) in grid.modes() {
        let w = T::half() / crate::field::omega(m, kx, ky);
        let diff = plus[l] - minus[l];
        // (2 i omega)^-1 = -i/(2 omega) applied componentwise
        out.coef_mut()[l] = C::new(diff.im * w, -diff.re * w);
    }
    out
}
