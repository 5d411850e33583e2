//! Square periodic grid and its Fourier-mode layout.

use crate::error::{Error, Result};
use crate::scalar::Real;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::fmt;
use std::sync::Arc;

/// Periodic grid with `n` modes per axis on a box of side `length`.
///
/// Physical sample points are centered, `x_i = -L/2 + i L/n`. Wavenumbers are
/// `k = 2 pi idx / L` with `idx` in `[-n/2, n/2)`; storage uses FFT order, so
/// slot `i` along an axis carries `idx = i` for `i < n/2` and `idx = i - n`
/// above. The single Nyquist row/column (`idx = -n/2`) has no mirror partner
/// and must stay at zero amplitude in admissible fields.
///
/// Cloning is cheap; FFT plans are shared read-only behind an `Arc`.
#[derive(Clone)]
pub struct Grid<T: Real> {
    inner: Arc<GridInner<T>>,
}

struct GridInner<T: Real> {
    n: usize,
    length: T,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

impl<T: Real> PartialEq for Grid<T> {
    fn eq(&self, other: &Self) -> bool {
        self.inner.n == other.inner.n && self.inner.length == other.inner.length
    }
}

impl<T: Real> fmt::Debug for Grid<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Grid({}x{}, L = {})", self.n(), self.n(), self.length())
    }
}

impl<T: Real> Grid<T> {
    /// Build a grid with `n` modes per axis (even, at least 16) on a box of
    /// side `length`. Mode ordering is fixed by the FFT-slot convention above.
    pub fn new(n: usize, length: T) -> Result<Self> {
        if n % 2 != 0 {
            return Err(Error::OddModes(n));
        }
        if n < 16 {
            return Err(Error::TooFewModes(n));
        }
        if length <= T::zero() {
            return Err(Error::NonPositiveLength(length.to_f64().unwrap_or(f64::NAN)));
        }
        let mut planner = FftPlanner::new();
        Ok(Grid {
            inner: Arc::new(GridInner {
                n,
                length,
                forward: planner.plan_fft(n, FftDirection::Forward),
                inverse: planner.plan_fft(n, FftDirection::Inverse),
            }),
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.inner.n
    }

    #[inline]
    pub fn length(&self) -> T {
        self.inner.length
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.inner.n * self.inner.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Physical sample spacing `L/n`.
    #[inline]
    pub fn dx(&self) -> T {
        self.inner.length / T::of(self.inner.n as f64)
    }

    /// Mode spacing `2 pi / L`.
    #[inline]
    pub fn dk(&self) -> T {
        T::TAU() / self.inner.length
    }

    /// Largest representable |k| per axis, `(n/2) dk`.
    #[inline]
    pub fn k_nyquist(&self) -> T {
        T::of((self.inner.n / 2) as f64) * self.dk()
    }

    /// Spherical two-thirds-rule cutoff used when dealiasing quadratic products.
    #[inline]
    pub fn dealias_k(&self) -> T {
        T::of(2.0 / 3.0) * self.k_nyquist()
    }

    /// Signed mode index carried by slot `i`.
    #[inline]
    pub fn idx_of(&self, i: usize) -> i64 {
        let n = self.inner.n as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Slot carrying signed mode index `m` (must be in `[-n/2, n/2)`).
    #[inline]
    pub fn slot_of(&self, m: i64) -> usize {
        let n = self.inner.n as i64;
        debug_assert!(m >= -n / 2 && m < n / 2);
        (if m < 0 { m + n } else { m }) as usize
    }

    /// Wavenumber carried by slot `i` along one axis.
    #[inline]
    pub fn k_of(&self, i: usize) -> T {
        T::of(self.idx_of(i) as f64) * self.dk()
    }

    /// Centered physical coordinate of sample `i` along one axis.
    #[inline]
    pub fn x_of(&self, i: usize) -> T {
        (T::of(i as f64) - T::of(self.inner.n as f64) * T::half()) * self.dx()
    }

    /// Slot holding the reflected mode `-m`; the Nyquist slot maps to itself.
    #[inline]
    pub fn reflect(&self, i: usize) -> usize {
        if i == 0 {
            0
        } else {
            self.inner.n - i
        }
    }

    /// Slot of the Nyquist index `-n/2`.
    #[inline]
    pub fn nyquist_slot(&self) -> usize {
        self.inner.n / 2
    }

    /// Row-major linear index of `(ix, iy)`; `iy` is the row.
    #[inline]
    pub fn lin(&self, ix: usize, iy: usize) -> usize {
        iy * self.inner.n + ix
    }

    /// Iterate `(linear index, kx, ky)` over all modes.
    pub fn modes(&self) -> impl Iterator<Item = (usize, T, T)> + '_ {
        let n = self.inner.n;
        (0..n).flat_map(move |iy| {
            let ky = self.k_of(iy);
            (0..n).map(move |ix| (iy * n + ix, self.k_of(ix), ky))
        })
    }

    /// Iterate `(linear index, x, y)` over all physical samples.
    pub fn points(&self) -> impl Iterator<Item = (usize, T, T)> + '_ {
        let n = self.inner.n;
        (0..n).flat_map(move |iy| {
            let y = self.x_of(iy);
            (0..n).map(move |ix| (iy * n + ix, self.x_of(ix), y))
        })
    }

    pub(crate) fn forward_plan(&self) -> &Arc<dyn Fft<T>> {
        &self.inner.forward
    }

    pub(crate) fn inverse_plan(&self) -> &Arc<dyn Fft<T>> {
        &self.inner.inverse
    }

    pub(crate) fn check_same(&self, other: &Self) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(self.n(), other.n()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_spacing_matches_definition() {
        let g = Grid::<f64>::new(64, 64.0).unwrap();
        assert!((g.dk() - 2.0 * std::f64::consts::PI / 64.0).abs() < 1e-15);
        assert!((g.dk() - 0.0982).abs() < 1e-4);
    }

    #[test]
    fn unit_spacing_modes_are_integers() {
        let g = Grid::<f64>::new(16, std::f64::consts::TAU).unwrap();
        let idxs: Vec<i64> = (0..16).map(|i| g.idx_of(i)).collect();
        let mut sorted = idxs.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (-8..8).collect::<Vec<_>>());
        for i in 0..16 {
            assert!((g.k_of(i) - g.idx_of(i) as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(Grid::<f64>::new(15, 10.0).is_err());
        assert!(Grid::<f64>::new(64, 0.0).is_err());
        assert!(Grid::<f64>::new(64, -3.0).is_err());
        assert!(Grid::<f64>::new(8, 10.0).is_err());
    }

    #[test]
    fn reflection_is_an_involution_off_nyquist() {
        let g = Grid::<f64>::new(32, 10.0).unwrap();
        for i in 0..32 {
            if i == g.nyquist_slot() {
                assert_eq!(g.reflect(i), i);
            } else {
                assert_eq!(g.reflect(g.reflect(i)), i);
                assert_eq!(g.idx_of(g.reflect(i)), -g.idx_of(i));
            }
        }
    }
}
