//! Norm families: the energy-type phase-space norm, the weighted Sobolev
//! ladders `qbar_n` / `q_n`, the sup-plus-derivative norm `Q_N`, and the
//! phase-space ladder built on `q_N`.

use crate::field::{MultiplierSpec, SpectralField};
use crate::scalar::Real;
use crate::state::PhaseState;
use serde::Serialize;

/// Energy-type norm: root-sum-of-squares over components of
/// `|| omega_{jm}^{-1/2} a_{j,eps} ||_{L2}`.
pub fn e_norm<T: Real>(a: &PhaseState<T>) -> T {
    let mut acc = T::zero();
    for (j, _, f) in a.components() {
        let w = f.applied(&MultiplierSpec::Omega {
            mass: j.mass(a.mass()),
            power: -T::half(),
        });
        let n = w.l2_norm();
        acc += n * n;
    }
    acc.sqrt()
}

/// `|| a - b ||_E`
pub fn e_norm_diff<T: Real>(a: &PhaseState<T>, b: &PhaseState<T>) -> T {
    e_norm(&a.sub(b))
}

/// Energy norm of a single `(mass m)` field-1 pair, used by the contraction
/// diagnostics which live entirely in the first field.
pub fn e1_norm<T: Real>(plus: &SpectralField<T>, minus: &SpectralField<T>, mass: T) -> T {
    let mut acc = T::zero();
    for f in [plus, minus] {
        let w = f.applied(&MultiplierSpec::Omega {
            mass,
            power: -T::half(),
        });
        let n = w.l2_norm();
        acc += n * n;
    }
    acc.sqrt()
}

/// All 2D multi-indices with total degree `|mu| <= n`.
fn multi_indices(n: usize) -> Vec<[usize; 2]> {
    let mut v = Vec::new();
    for a in 0..=n {
        for b in 0..=(n - a) {
            v.push([a, b]);
        }
    }
    v
}

/// `qbar_n(f) = (sum_{|mu|,|nu| <= n} || x^mu grad^nu f ||_{L2}^2)^{1/2}`
/// with spectral derivatives and centered physical coordinates.
pub fn q_bar_norm<T: Real>(f: &SpectralField<T>, n: usize) -> T {
    let grid = f.grid().clone();
    let mut acc = T::zero();
    for nu in multi_indices(n) {
        let mut d = f.clone();
        for _ in 0..nu[0] {
            d = d.derivative(0);
        }
        for _ in 0..nu[1] {
            d = d.derivative(1);
        }
        let phys = d.to_physical();
        for mu in multi_indices(n) {
            let mut s = T::zero();
            for (l, x, y) in grid.points() {
                let mut w = T::one();
                for _ in 0..mu[0] {
                    w *= x;
                }
                for _ in 0..mu[1] {
                    w *= y;
                }
                s += phys.values()[l].norm_sqr() * w * w;
            }
            acc += s * grid.dx() * grid.dx();
        }
    }
    acc.sqrt()
}

/// `q_n(f) = qbar_n((I - Laplacian)^{-1/4} f)`
pub fn q_norm<T: Real>(f: &SpectralField<T>, n: usize) -> T {
    let smoothed = f.applied(&MultiplierSpec::OneMinusLaplacian {
        power: -T::of(0.25),
    });
    q_bar_norm(&smoothed, n)
}

/// `Q_N(a) = ||a||_{L_inf} + Q'_N(a)` where `Q'_N` sums
/// `|| x^mu (1+|x|^2)^{-1/4} grad^nu a ||_{L2}^2` over `|mu| <= N`,
/// `1 <= |nu| <= N`.
pub fn q_big_norm<T: Real>(f: &SpectralField<T>, n: usize) -> T {
    let grid = f.grid().clone();
    let sup = f.to_physical().max_abs();
    let mut acc = T::zero();
    for nu in multi_indices(n) {
        if nu[0] + nu[1] == 0 {
            continue;
        }
        let mut d = f.clone();
        for _ in 0..nu[0] {
            d = d.derivative(0);
        }
        for _ in 0..nu[1] {
            d = d.derivative(1);
        }
        let phys = d.to_physical();
        for mu in multi_indices(n) {
            let mut s = T::zero();
            for (l, x, y) in grid.points() {
                let mut w = T::one();
                for _ in 0..mu[0] {
                    w *= x;
                }
                for _ in 0..mu[1] {
                    w *= y;
                }
                let decay = (T::one() + x * x + y * y).sqrt().sqrt();
                let ww = w / decay;
                s += phys.values()[l].norm_sqr() * ww * ww;
            }
            acc += s * grid.dx() * grid.dx();
        }
    }
    sup + acc.sqrt()
}

/// Phase-space regularity ladder realized through the `q_N` equivalent:
/// componentwise `q_N`, combined root-sum-of-squares. This is the surrogate
/// for the representation-theoretic `E_N` norm, not the generator-sum itself.
pub fn e_n_norm<T: Real>(a: &PhaseState<T>, n: usize) -> T {
    let mut acc = T::zero();
    for (_, _, f) in a.components() {
        let q = q_norm(f, n);
        acc += q * q;
    }
    acc.sqrt()
}

/// One row of norm diagnostics, serialized by the experiment drivers.
#[derive(Clone, Debug, Serialize)]
pub struct NormReport {
    pub e_norm: Option<f64>,
    /// `(n, q_n)` pairs
    pub q: Vec<(usize, f64)>,
    /// `(n, qbar_n)` pairs
    pub q_bar: Vec<(usize, f64)>,
    /// `(N, Q_N)` pairs
    pub q_big: Vec<(usize, f64)>,
}

impl NormReport {
    pub fn empty() -> Self {
        NormReport {
            e_norm: None,
            q: Vec::new(),
            q_bar: Vec::new(),
            q_big: Vec::new(),
        }
    }

    pub fn q_bar_value(&self, n: usize) -> Option<f64> {
        self.q_bar.iter().find(|(m, _)| *m == n).map(|(_, v)| *v)
    }
}

/// `qbar_n` of the componentwise difference of two states, combined RSS;
/// the decay diagnostics for the corrected integrand use this.
pub fn q_bar_state<T: Real>(a: &PhaseState<T>, n: usize) -> T {
    let mut acc = T::zero();
    for (_, _, f) in a.components() {
        let q = q_bar_norm(f, n);
        acc += q * q;
    }
    acc.sqrt()
}
