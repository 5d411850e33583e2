//! Closed-form catalog of Schwartz-class spectra: Gaussians times small
//! polynomials, with optional plane-wave (translation) and free-evolution
//! phases. Catalog entries are evaluable at arbitrary frequency points, which
//! the profile and light-cone machinery uses for off-grid arguments like
//! `fhat(k/2)` and `fhat(-eps M x / rho)`.

use crate::field::{omega, Sign, SpectralField};
use crate::grid::Grid;
use crate::scalar::{imag_unit, Real, C};

/// One catalog term:
/// `A * prod_i (k_i - c_i)^(p_i) * exp(-w^2 |k - c|^2 / 2) * exp(i k . s)`.
///
/// `width` is the physical-space Gaussian width; `shift` is a physical
/// translation realized as the plane-wave phase.
#[derive(Clone, Debug)]
pub struct GaussianTerm<T: Real> {
    pub amplitude: C<T>,
    pub center: [T; 2],
    pub width: T,
    pub power: [u8; 2],
    pub shift: [T; 2],
}

impl<T: Real> GaussianTerm<T> {
    pub fn gaussian(amplitude: C<T>, center: [T; 2], width: T) -> Self {
        GaussianTerm {
            amplitude,
            center,
            width,
            power: [0, 0],
            shift: [T::zero(), T::zero()],
        }
    }

    fn eval(&self, k: [T; 2]) -> C<T> {
        let dx = k[0] - self.center[0];
        let dy = k[1] - self.center[1];
        let w2 = self.width * self.width;
        let mut v = self
            .amplitude
            .scale((-(w2 * (dx * dx + dy * dy)) * T::half()).exp());
        for _ in 0..self.power[0] {
            v = v.scale(dx);
        }
        for _ in 0..self.power[1] {
            v = v.scale(dy);
        }
        if self.shift[0] != T::zero() || self.shift[1] != T::zero() {
            v *= C::from_polar(T::one(), k[0] * self.shift[0] + k[1] * self.shift[1]);
        }
        v
    }

    /// Mirror image under `fhat(k) -> conj(fhat(-k))`; the catalog is closed
    /// under this map, which is what ties the two epsilon components of a
    /// real field together.
    fn mirror(&self) -> Self {
        let sgn = if (self.power[0] + self.power[1]) % 2 == 0 {
            T::one()
        } else {
            -T::one()
        };
        GaussianTerm {
            amplitude: self.amplitude.conj().scale(sgn),
            center: [-self.center[0], -self.center[1]],
            width: self.width,
            power: self.power,
            shift: self.shift,
        }
    }
}

/// Free-evolution phase `exp(i eps omega_M(k) dt)` attached to a profile.
#[derive(Clone, Copy, Debug)]
pub struct FreePhase<T: Real> {
    pub mass: T,
    pub sign: Sign,
    pub dt: T,
}

/// Sum of catalog terms together with accumulated unimodular phases.
#[derive(Clone, Debug, Default)]
pub struct AnalyticProfile<T: Real> {
    pub terms: Vec<GaussianTerm<T>>,
    pub phases: Vec<FreePhase<T>>,
}

impl<T: Real> AnalyticProfile<T> {
    pub fn new(terms: Vec<GaussianTerm<T>>) -> Self {
        AnalyticProfile {
            terms,
            phases: Vec::new(),
        }
    }

    pub fn gaussian(amplitude: C<T>, center: [T; 2], width: T) -> Self {
        Self::new(vec![GaussianTerm::gaussian(amplitude, center, width)])
    }

    /// Evaluate `fhat` at an arbitrary frequency point.
    pub fn eval(&self, k: [T; 2]) -> C<T> {
        let mut v = C::new(T::zero(), T::zero());
        for t in &self.terms {
            v += t.eval(k);
        }
        for p in &self.phases {
            v *= C::from_polar(
                T::one(),
                p.sign.factor::<T>() * omega(p.mass, k[0], k[1]) * p.dt,
            );
        }
        v
    }

    /// Mirror profile under `fhat(k) -> conj(fhat(-k))`.
    pub fn mirror(&self) -> Self {
        AnalyticProfile {
            terms: self.terms.iter().map(GaussianTerm::mirror).collect(),
            phases: self
                .phases
                .iter()
                .map(|p| FreePhase {
                    mass: p.mass,
                    sign: p.sign.flip(),
                    dt: p.dt,
                })
                .collect(),
        }
    }

    /// Physical translation by `s` (multiplies by `e^{i k . s}`).
    pub fn translated(&self, s: [T; 2]) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.shift[0] += s[0];
            t.shift[1] += s[1];
        }
        out
    }

    /// Free evolution by `dt` under `(mass, sign)`.
    pub fn time_shifted(&self, mass: T, sign: Sign, dt: T) -> Self {
        let mut out = self.clone();
        out.phases.push(FreePhase { mass, sign, dt });
        out
    }

    /// Sample onto a grid.
    pub fn sample(&self, grid: &Grid<T>) -> SpectralField<T> {
        SpectralField::from_modes(grid, |kx, ky| self.eval([kx, ky]))
    }

    /// Effective band limit: the radius beyond which `|fhat| < floor` for
    /// every term (phases are unimodular and do not contribute).
    pub fn band_limit(&self, floor: T) -> T {
        let mut band = T::zero();
        for t in &self.terms {
            let c = (t.center[0] * t.center[0] + t.center[1] * t.center[1]).sqrt();
            let amp = t.amplitude.norm();
            if amp == T::zero() {
                continue;
            }
            // solve |A| (r + |c|)^(p) exp(-w^2 r^2 / 2) = floor by bisection
            let p = T::of((t.power[0] + t.power[1]) as f64);
            let f = |r: T| -> T {
                amp.ln() + p * (r + c + T::one()).ln()
                    - t.width * t.width * r * r * T::half()
                    - floor.ln()
            };
            let mut lo = T::zero();
            let mut hi = T::one();
            while f(hi) > T::zero() {
                hi = hi * T::two();
            }
            for _ in 0..80 {
                let mid = (lo + hi) * T::half();
                if f(mid) > T::zero() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            band = band.max(c + hi);
        }
        band
    }

    /// Band limit at the default floor 1e-14.
    pub fn k_eff(&self) -> T {
        self.band_limit(T::of(1e-14))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
            || self.terms.iter().all(|t| t.amplitude.norm() == T::zero())
    }
}

/// Scale the whole profile by a complex constant.
impl<T: Real> AnalyticProfile<T> {
    pub fn scaled(&self, c: C<T>) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.amplitude *= c;
        }
        out
    }
}

/// Convenience: `i` as needed by catalog arithmetic in callers.
pub fn i_unit<T: Real>() -> C<T> {
    imag_unit()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mirror_realizes_the_reality_constraint() {
        let p = AnalyticProfile::<f64> {
            terms: vec![GaussianTerm {
                amplitude: C::new(0.7, -0.3),
                center: [0.4, -0.2],
                width: 1.5,
                power: [1, 2],
                shift: [0.3, 0.0],
            }],
            phases: vec![FreePhase {
                mass: 2.0,
                sign: Sign::Plus,
                dt: 1.7,
            }],
        };
        let m = p.mirror();
        for &k in &[[0.3, 0.1], [-1.2, 0.8], [2.0, -2.0]] {
            let direct = p.eval([-k[0], -k[1]]).conj();
            let via = m.eval(k);
            assert!((direct - via).norm() < 1e-14);
        }
    }

    #[test]
    fn band_limit_brackets_the_true_decay() {
        let p = AnalyticProfile::<f64>::gaussian(C::new(2.0, 0.0), [0.0, 0.0], 1.0);
        let k = p.k_eff();
        assert!(p.eval([k + 0.1, 0.0]).norm() < 1e-14);
        assert!(p.eval([k - 0.5, 0.0]).norm() > 1e-14);
    }

    #[test]
    fn translation_is_a_plane_wave_phase() {
        let p = AnalyticProfile::<f64>::gaussian(C::new(1.0, 0.0), [0.0, 0.0], 2.0);
        let s = [0.5, -0.25];
        let q = p.translated(s);
        let k = [0.7, 0.4];
        let expected = p.eval(k) * C::from_polar(1.0, k[0] * s[0] + k[1] * s[1]);
        assert!((q.eval(k) - expected).norm() < 1e-15);
    }
}
