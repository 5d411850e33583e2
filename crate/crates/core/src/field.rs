//! Spectral fields on the periodic grid: transforms, Fourier multipliers,
//! the free propagator and dealiased pointwise products.
//!
//! The Fourier pair is the continuum-normalized one,
//! `fhat(k) = (2 pi)^-1 Int e^{-i k x} f(x) dx`, discretized with the
//! trapezoid weights `dx^2` / `dk^2`. With these weights the discrete pair is
//! exactly unitary: `sum |fhat|^2 dk^2 = sum |f|^2 dx^2`, and a coefficient is
//! the value of the continuum transform at its mode (up to tail truncation).

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::scalar::{imag_unit, Real, C};

/// Sign label for the two branches of the dispersion relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    #[inline]
    pub fn factor<T: Real>(self) -> T {
        match self {
            Sign::Plus => T::one(),
            Sign::Minus => -T::one(),
        }
    }

    #[inline]
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];
}

/// Relativistic dispersion `omega_M(k) = sqrt(M^2 + |k|^2)`.
#[inline]
pub fn omega<T: Real>(mass: T, kx: T, ky: T) -> T {
    (mass * mass + kx * kx + ky * ky).sqrt()
}

/// Fourier coefficients of one scalar field.
#[derive(Clone, Debug)]
pub struct SpectralField<T: Real> {
    grid: Grid<T>,
    coef: Vec<C<T>>,
}

/// Complex samples of one scalar field at the physical grid points.
#[derive(Clone, Debug)]
pub struct PhysicalField<T: Real> {
    grid: Grid<T>,
    values: Vec<C<T>>,
}

/// Diagonal operator in frequency space (plus the physical-space coordinate
/// multiplication, which is diagonal on the other side of the transform).
#[derive(Clone, Copy, Debug)]
pub enum MultiplierSpec<T: Real> {
    /// `omega_M(k)^s`
    Omega { mass: T, power: T },
    /// `(1 + |k|^2)^s`, the symbol of `(I - Laplacian)^s`
    OneMinusLaplacian { power: T },
    /// `exp(i eps omega_M(k) t)`, the free Klein-Gordon propagator
    Phase { mass: T, sign: Sign, time: T },
    /// Multiplication by the centered coordinate `x_axis` in physical space
    Coordinate { axis: usize },
}

impl<T: Real> SpectralField<T> {
    pub fn zeros(grid: &Grid<T>) -> Self {
        SpectralField {
            grid: grid.clone(),
            coef: vec![C::new(T::zero(), T::zero()); grid.len()],
        }
    }

    /// Build from a closure evaluated at every mode `(kx, ky)`.
    pub fn from_modes(grid: &Grid<T>, mut f: impl FnMut(T, T) -> C<T>) -> Self {
        let mut out = Self::zeros(grid);
        for (l, kx, ky) in grid.modes() {
            out.coef[l] = f(kx, ky);
        }
        out
    }

    pub fn from_coef(grid: &Grid<T>, coef: Vec<C<T>>) -> Result<Self> {
        if coef.len() != grid.len() {
            return Err(Error::ShapeMismatch {
                expected: grid.len(),
                got: coef.len(),
            });
        }
        Ok(SpectralField {
            grid: grid.clone(),
            coef,
        })
    }

    #[inline]
    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    #[inline]
    pub fn coef(&self) -> &[C<T>] {
        &self.coef
    }

    #[inline]
    pub fn coef_mut(&mut self) -> &mut [C<T>] {
        &mut self.coef
    }

    /// Discrete L2 norm with the `dk` quadrature weight; by unitarity this
    /// equals the physical-side L2 norm.
    pub fn l2_norm(&self) -> T {
        let s: T = self.coef.iter().map(|c| c.norm_sqr()).sum();
        (s * self.grid.dk() * self.grid.dk()).sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.coef
            .iter()
            .map(|c| c.norm())
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// Apply a multiplier in place.
    pub fn apply(&mut self, m: &MultiplierSpec<T>) {
        // the common small powers avoid powf, which dominates the hot loops
        #[inline]
        fn pow_fast<T: Real>(base: T, power: T) -> T {
            if power == T::one() {
                base
            } else if power == -T::one() {
                base.recip()
            } else if power == -T::half() {
                base.sqrt().recip()
            } else if power == T::half() {
                base.sqrt()
            } else if power == T::two() {
                base * base
            } else {
                base.powf(power)
            }
        }
        match *m {
            MultiplierSpec::Omega { mass, power } => {
                for (l, kx, ky) in self.grid.modes() {
                    let w = pow_fast(omega(mass, kx, ky), power);
                    self.coef[l] = self.coef[l].scale(w);
                }
            }
            MultiplierSpec::OneMinusLaplacian { power } => {
                for (l, kx, ky) in self.grid.modes() {
                    let w = pow_fast(T::one() + kx * kx + ky * ky, power);
                    self.coef[l] = self.coef[l].scale(w);
                }
            }
            MultiplierSpec::Phase { mass, sign, time } => {
                let s = sign.factor::<T>();
                for (l, kx, ky) in self.grid.modes() {
                    let phase = C::from_polar(T::one(), s * omega(mass, kx, ky) * time);
                    self.coef[l] *= phase;
                }
            }
            MultiplierSpec::Coordinate { axis } => {
                let mut phys = self.to_physical();
                phys.mul_coordinate(axis);
                *self = phys.to_spectral();
            }
        }
    }

    pub fn applied(&self, m: &MultiplierSpec<T>) -> Self {
        let mut out = self.clone();
        out.apply(m);
        out
    }

    /// Free Klein-Gordon propagator `V(t)_{(M, eps)}`: multiply each mode by
    /// `exp(i eps omega_M(k) t)`. Unimodular, so the discrete L2 norm is
    /// preserved to machine precision and the group law holds.
    pub fn free_propagate(&self, mass: T, sign: Sign, time: T) -> Self {
        self.applied(&MultiplierSpec::Phase { mass, sign, time })
    }

    /// Spectral partial derivative along `axis` (multiplication by `i k`).
    pub fn derivative(&self, axis: usize) -> Self {
        let mut out = self.clone();
        let i = imag_unit::<T>();
        for (l, kx, ky) in self.grid.modes() {
            let k = if axis == 0 { kx } else { ky };
            out.coef[l] *= i.scale(k);
        }
        out
    }

    /// Mirror conjugation `fhat(k) -> conj(fhat(-k))`. A field is the
    /// transform of a real function exactly when it is a fixed point.
    pub fn reflect_conj(&self) -> Self {
        let mut out = Self::zeros(&self.grid);
        let n = self.grid.n();
        for iy in 0..n {
            let ry = self.grid.reflect(iy);
            for ix in 0..n {
                let rx = self.grid.reflect(ix);
                out.coef[self.grid.lin(ix, iy)] = self.coef[self.grid.lin(rx, ry)].conj();
            }
        }
        out
    }

    /// Plain reflection `fhat(k) -> fhat(-k)`.
    pub fn reflect(&self) -> Self {
        let mut out = Self::zeros(&self.grid);
        let n = self.grid.n();
        for iy in 0..n {
            let ry = self.grid.reflect(iy);
            for ix in 0..n {
                let rx = self.grid.reflect(ix);
                out.coef[self.grid.lin(ix, iy)] = self.coef[self.grid.lin(rx, ry)];
            }
        }
        out
    }

    /// Zero every mode with `|k| > kcut`.
    pub fn truncate_band(&mut self, kcut: T) {
        let kc2 = kcut * kcut * (T::one() + T::of(1e-12));
        for (l, kx, ky) in self.grid.modes() {
            if kx * kx + ky * ky > kc2 {
                self.coef[l] = C::new(T::zero(), T::zero());
            }
        }
    }

    /// Relative spectral mass outside `|k| <= kcut`.
    pub fn band_mass_outside(&self, kcut: T) -> T {
        let kc2 = kcut * kcut;
        let mut outside = T::zero();
        let mut total = T::zero();
        for (l, kx, ky) in self.grid.modes() {
            let m = self.coef[l].norm_sqr();
            total += m;
            if kx * kx + ky * ky > kc2 {
                outside += m;
            }
        }
        if total > T::zero() {
            (outside / total).sqrt()
        } else {
            T::zero()
        }
    }

    pub fn zero_nyquist(&mut self) {
        let n = self.grid.n();
        let ny = self.grid.nyquist_slot();
        for i in 0..n {
            self.coef[self.grid.lin(ny, i)] = C::new(T::zero(), T::zero());
            self.coef[self.grid.lin(i, ny)] = C::new(T::zero(), T::zero());
        }
    }

    pub fn scale(&mut self, c: C<T>) {
        for v in &mut self.coef {
            *v *= c;
        }
    }

    pub fn scaled(&self, c: C<T>) -> Self {
        let mut out = self.clone();
        out.scale(c);
        out
    }

    /// `self += c * other`
    pub fn axpy(&mut self, c: C<T>, other: &Self) {
        debug_assert!(self.grid == other.grid);
        for (a, b) in self.coef.iter_mut().zip(&other.coef) {
            *a += c * b;
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        self.axpy(C::new(T::one(), T::zero()), other);
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(C::new(-T::one(), T::zero()), other);
        out
    }

    /// Inverse transform to physical samples.
    pub fn to_physical(&self) -> PhysicalField<T> {
        let grid = &self.grid;
        let n = grid.n();
        // f_j = (dk^2 / 2 pi) sum_m (-1)^(mx+my) c_m e^{2 pi i m j / n}
        let scale = grid.dk() * grid.dk() / T::TAU();
        let mut buf: Vec<C<T>> = Vec::with_capacity(grid.len());
        for iy in 0..n {
            for ix in 0..n {
                let sgn = if (ix + iy) % 2 == 0 { scale } else { -scale };
                buf.push(self.coef[grid.lin(ix, iy)].scale(sgn));
            }
        }
        fft2_in_place(grid, &mut buf, false);
        PhysicalField {
            grid: grid.clone(),
            values: buf,
        }
    }

    /// Field whose coefficient at mode `k` is `fhat(k/2)`, computed by
    /// embedding the physical samples into a doubled box. Exact for decaying
    /// fields up to the mass wrapped around the original box boundary.
    pub fn half_frequency_sample(&self) -> Result<Self> {
        let grid = &self.grid;
        let n = grid.n();
        let big = Grid::new(2 * n, grid.length() * T::two())?;
        let phys = self.to_physical();
        let mut embedded = PhysicalField::zeros(&big);
        // original sample x_i = -L/2 + i dx sits at doubled slot i + n/2
        for iy in 0..n {
            for ix in 0..n {
                embedded.values[big.lin(ix + n / 2, iy + n / 2)] = phys.values[grid.lin(ix, iy)];
            }
        }
        let spec_big = embedded.to_spectral();
        let mut out = Self::zeros(grid);
        for iy in 0..n {
            let my = grid.idx_of(iy);
            for ix in 0..n {
                let mx = grid.idx_of(ix);
                out.coef[grid.lin(ix, iy)] = spec_big.coef[big.lin(big.slot_of(mx), big.slot_of(my))];
            }
        }
        Ok(out)
    }

    /// Field whose coefficient at mode `k` is `fhat(2k)`: subsample at the
    /// even-index modes. Returns the relative spectral mass above the half
    /// band, which is lost; callers treat it as a warning diagnostic.
    pub fn double_frequency_sample(&self) -> (Self, T) {
        let grid = &self.grid;
        let n = grid.n() as i64;
        let lost = self.band_mass_outside(grid.k_nyquist() * T::half());
        let mut out = Self::zeros(grid);
        for iy in 0..grid.n() {
            let my = grid.idx_of(iy);
            for ix in 0..grid.n() {
                let mx = grid.idx_of(ix);
                let (dx, dy) = (2 * mx, 2 * my);
                if dx >= -n / 2 && dx < n / 2 && dy >= -n / 2 && dy < n / 2 {
                    out.coef[grid.lin(ix, iy)] =
                        self.coef[grid.lin(grid.slot_of(dx), grid.slot_of(dy))];
                }
            }
        }
        (out, lost)
    }

    /// Dealiased pointwise product: both factors and the result are truncated
    /// to the spherical two-thirds band, which removes aliasing of quadratic
    /// terms exactly.
    pub fn product(&self, other: &Self) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        let kcut = self.grid.dealias_k();
        let mut a = self.clone();
        a.truncate_band(kcut);
        let pa = a.to_physical();
        let pb = if std::ptr::eq(self, other) {
            None
        } else {
            let mut b = other.clone();
            b.truncate_band(kcut);
            Some(b.to_physical())
        };
        let mut prod = pa;
        match &pb {
            Some(pb) => {
                for (v, w) in prod.values.iter_mut().zip(&pb.values) {
                    *v *= *w;
                }
            }
            None => {
                for v in prod.values.iter_mut() {
                    *v *= *v;
                }
            }
        }
        let mut out = prod.to_spectral();
        out.truncate_band(kcut);
        Ok(out)
    }

    /// Dealiased square, sharing the single-transform path of `product`.
    pub fn square(&self) -> Self {
        self.product(self).expect("same grid")
    }

    /// Fraction of physical mass inside the central half of the box; data fed
    /// to coordinate-multiplying operators should keep this above 1 - 1e-10.
    pub fn central_mass_fraction(&self) -> T {
        self.to_physical().central_mass_fraction()
    }
}

impl<T: Real> PhysicalField<T> {
    pub fn zeros(grid: &Grid<T>) -> Self {
        PhysicalField {
            grid: grid.clone(),
            values: vec![C::new(T::zero(), T::zero()); grid.len()],
        }
    }

    /// Build from a closure evaluated at every centered sample point.
    pub fn from_points(grid: &Grid<T>, mut f: impl FnMut(T, T) -> C<T>) -> Self {
        let mut out = Self::zeros(grid);
        for (l, x, y) in grid.points() {
            out.values[l] = f(x, y);
        }
        out
    }

    pub fn from_real(grid: &Grid<T>, values: &[T]) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::ShapeMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(PhysicalField {
            grid: grid.clone(),
            values: values.iter().map(|&v| C::new(v, T::zero())).collect(),
        })
    }

    #[inline]
    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[C<T>] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [C<T>] {
        &mut self.values
    }

    pub fn l2_norm(&self) -> T {
        let s: T = self.values.iter().map(|c| c.norm_sqr()).sum();
        (s * self.grid.dx() * self.grid.dx()).sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.values
            .iter()
            .map(|c| c.norm())
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// Largest imaginary part relative to the largest magnitude.
    pub fn imaginary_residue(&self) -> T {
        let scale = self.max_abs().max(T::of(1e-300));
        self.values
            .iter()
            .map(|c| c.im.abs())
            .fold(T::zero(), |a, b| a.max(b))
            / scale
    }

    /// Drop imaginary parts after checking they are below `tol` relative.
    pub fn into_real(self, tol: T) -> Result<Vec<T>> {
        let residue = self.imaginary_residue();
        if residue > tol {
            return Err(Error::ImaginaryResidue {
                residue: residue.to_f64().unwrap_or(f64::NAN),
                tol: tol.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(self.values.into_iter().map(|c| c.re).collect())
    }

    /// Multiply by the centered coordinate along `axis` in place.
    pub fn mul_coordinate(&mut self, axis: usize) {
        let grid = self.grid.clone();
        for (l, x, y) in grid.points() {
            let c = if axis == 0 { x } else { y };
            self.values[l] = self.values[l].scale(c);
        }
    }

    pub fn central_mass_fraction(&self) -> T {
        let quarter = self.grid.length() * T::of(0.25);
        let mut inside = T::zero();
        let mut total = T::zero();
        for (l, x, y) in self.grid.points() {
            let m = self.values[l].norm_sqr();
            total += m;
            if x.abs() <= quarter && y.abs() <= quarter {
                inside += m;
            }
        }
        if total > T::zero() {
            inside / total
        } else {
            T::one()
        }
    }

    /// Forward transform to spectral coefficients.
    pub fn to_spectral(&self) -> SpectralField<T> {
        let grid = &self.grid;
        let n = grid.n();
        let mut buf = self.values.clone();
        fft2_in_place(grid, &mut buf, true);
        // c_m = (dx^2 / 2 pi) (-1)^(mx+my) FFT[f]_m
        let scale = grid.dx() * grid.dx() / T::TAU();
        let mut coef = vec![C::new(T::zero(), T::zero()); grid.len()];
        for iy in 0..n {
            for ix in 0..n {
                let sgn = if (ix + iy) % 2 == 0 { scale } else { -scale };
                coef[grid.lin(ix, iy)] = buf[grid.lin(ix, iy)].scale(sgn);
            }
        }
        SpectralField {
            grid: grid.clone(),
            coef,
        }
    }
}

/// In-place 2D FFT: rows, transpose, rows, transpose back.
fn fft2_in_place<T: Real>(grid: &Grid<T>, buf: &mut [C<T>], forward: bool) {
    let n = grid.n();
    let plan = if forward {
        grid.forward_plan().clone()
    } else {
        grid.inverse_plan().clone()
    };
    let mut scratch = vec![C::new(T::zero(), T::zero()); plan.get_inplace_scratch_len()];
    for row in buf.chunks_exact_mut(n) {
        plan.process_with_scratch(row, &mut scratch);
    }
    transpose_square(buf, n);
    for row in buf.chunks_exact_mut(n) {
        plan.process_with_scratch(row, &mut scratch);
    }
    transpose_square(buf, n);
}

fn transpose_square<T: Copy>(buf: &mut [T], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            buf.swap(i * n + j, j * n + i);
        }
    }
}
