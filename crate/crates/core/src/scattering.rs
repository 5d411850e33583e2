//! The modified wave operator and its diagnostics: backward integration from
//! the approximate solution, the residual of the asymptotic condition, the
//! decay of the corrected integrand, the contraction-space norm, and the
//! non-resonant kernel with its partial-integration identity.

use crate::dynamics::{integrate, SystemKind};
use crate::error::{Error, Result};
use crate::field::{omega, MultiplierSpec, Sign, SpectralField};
use crate::fitting::DecaySeries;
use crate::norms::{e1_norm, e_norm, e_norm_diff, q_bar_norm, NormReport};
use crate::profiles::{approx_solution, profile, profile_dt, ScatteringData};
use crate::scalar::{imag_unit, Real, C};
use crate::state::{reconstruct_phi, FieldId, PhaseState};

/// Parameters of one wave-operator computation.
#[derive(Clone, Copy, Debug)]
pub struct WaveOpParams<T: Real> {
    /// Smallest truncation time; the computation repeats at `t_max 2^i`.
    pub t_max: T,
    pub dt: T,
    /// Number of doublings of `t_max` (at least 1, so the truncation error
    /// has a certificate).
    pub doublings: usize,
}

/// Result of the wave-operator construction.
#[derive(Clone, Debug)]
pub struct WaveOperatorResult<T: Real> {
    /// `a(0)`, from the run with the largest truncation time.
    pub a0: PhaseState<T>,
    pub t_max_used: T,
    /// `(T, || Omega^T - Omega^{2T} ||_E)` per successive pair.
    pub convergence_table: Vec<(T, T)>,
}

/// Modified wave operator: evaluate the approximate solution at the
/// truncation time and integrate the full equation backward to zero. This is
/// the numerically exact analogue of truncating the tail integral of the
/// fixed-point equation; doubling the truncation time certifies convergence.
pub fn wave_operator<T: Real>(
    kind: SystemKind,
    data: &ScatteringData<T>,
    params: &WaveOpParams<T>,
) -> Result<WaveOperatorResult<T>> {
    data.require_admissible(kind)?;
    let doublings = params.doublings.max(1);
    let mut ends = Vec::with_capacity(doublings + 1);
    for i in 0..=doublings {
        let t_max = params.t_max * T::of((1u64 << i) as f64);
        let a_far = approx_solution(kind, data, t_max);
        let a0 = integrate(kind, &a_far, t_max, T::zero(), params.dt, usize::MAX, |_, _| {})?;
        ends.push((t_max, a0));
    }
    let mut table = Vec::new();
    for w in ends.windows(2) {
        table.push((w[0].0, e_norm_diff(&w[0].1, &w[1].1)));
    }
    if table.len() >= 2 {
        let decreasing = table.windows(2).all(|w| w[1].1 <= w[0].1);
        if !decreasing && table[0].1 > T::of(1e-13) {
            return Err(Error::NonMonotoneConvergence(
                table
                    .iter()
                    .map(|(_, d)| d.to_f64().unwrap_or(f64::NAN))
                    .collect(),
            ));
        }
    }
    let (t_max_used, a0) = ends.pop().expect("at least one run");
    Ok(WaveOperatorResult {
        a0,
        t_max_used,
        convergence_table: table,
    })
}

/// Forward-solve from `a0` and sample the residuals of the asymptotic
/// condition: against the modified approximate solution and against the
/// plain free solution.
#[derive(Clone, Debug)]
pub struct ResidualRun<T: Real> {
    /// `|| a(t) - a(f)(t) ||_E`
    pub modified: DecaySeries<T>,
    /// `|| a(t) - V(t) f ||_E = || V(-t) a(t) - f ||_E`
    pub free: DecaySeries<T>,
    pub e_norm: DecaySeries<T>,
    pub constraint_drift: DecaySeries<T>,
    /// `(t, b(t) - b(f)(t))` field-1 components, for the contraction norm.
    pub deviation_samples: Vec<(T, [SpectralField<T>; 2])>,
}

pub fn residual_series<T: Real>(
    kind: SystemKind,
    data: &ScatteringData<T>,
    a0: &PhaseState<T>,
    t_grid: &[T],
    dt: T,
) -> Result<ResidualRun<T>> {
    let mut run = ResidualRun {
        modified: DecaySeries::new("e_norm(a - a_approx)"),
        free: DecaySeries::new("e_norm(a - V f)"),
        e_norm: DecaySeries::new("e_norm(a)"),
        constraint_drift: DecaySeries::new("reality_drift"),
        deviation_samples: Vec::new(),
    };
    let mut current = a0.clone();
    let mut t_now = T::zero();
    for &t in t_grid {
        // round the hop to an integral number of steps
        let hop = ((t - t_now) / dt).round();
        let t_target = t_now + hop * dt;
        current = integrate(kind, &current, t_now, t_target, dt, usize::MAX, |_, _| {})?;
        t_now = t_target;

        let approx = approx_solution(kind, data, t_now);
        run.modified.push(t_now, e_norm_diff(&current, &approx));
        let free = data.state().free_propagate(t_now);
        run.free.push(t_now, e_norm_diff(&current, &free));
        run.e_norm.push(t_now, e_norm(&current));
        run.constraint_drift.push(t_now, current.reality_drift());

        let b = current.free_propagate(-t_now);
        let bp = profile(kind, data, t_now);
        let dev = b.sub(&bp);
        run.deviation_samples.push((
            t_now,
            [
                dev.comp(FieldId::Field1, Sign::Plus).clone(),
                dev.comp(FieldId::Field1, Sign::Minus).clone(),
            ],
        ));
    }
    Ok(run)
}

/// The corrected integrand of the fixed-point equation, restricted to the
/// resonant pairing that the profile derivative was built to cancel:
/// for system A, `V_2(-t)[((2 i omega_m)^-1 a1_eps)^2] - d/dt b2_eps`;
/// for system B, `-V_1(-t)[(2 i omega_m)^-1 a1_{-eps} (2 i omega_{2m})^-1 a2_eps] - d/dt b1_eps`.
/// Returns the state holding the per-component quantities.
pub fn corrected_integrand<T: Real>(
    kind: SystemKind,
    data: &ScatteringData<T>,
    t: T,
) -> Result<PhaseState<T>> {
    let grid = data.grid().clone();
    let m = data.mass();
    let b = profile(kind, data, t);
    let a_plus = b.free_propagate(t);
    let b_dot = profile_dt(kind, data, t)?;
    let mut out = PhaseState::zeros(&grid, m);
    match kind {
        SystemKind::A => {
            for s in Sign::BOTH {
                // (2 i omega_m)^-1 a_{1,eps}
                let mut u = a_plus.comp(FieldId::Field1, s).applied(&MultiplierSpec::Omega {
                    mass: m,
                    power: -T::one(),
                });
                u.scale(C::new(T::zero(), -T::half()));
                let sq = u.square();
                let rotated = sq.free_propagate(m * T::two(), s, -t);
                let mut w = rotated;
                w.axpy(
                    C::new(-T::one(), T::zero()),
                    b_dot.comp(FieldId::Field2, s),
                );
                *out.comp_mut(FieldId::Field2, s) = w;
            }
        }
        SystemKind::B => {
            for s in Sign::BOTH {
                let mut u1 = a_plus
                    .comp(FieldId::Field1, s.flip())
                    .applied(&MultiplierSpec::Omega {
                        mass: m,
                        power: -T::one(),
                    });
                u1.scale(C::new(T::zero(), -T::half()));
                let mut u2 = a_plus.comp(FieldId::Field2, s).applied(&MultiplierSpec::Omega {
                    mass: m * T::two(),
                    power: -T::one(),
                });
                u2.scale(C::new(T::zero(), -T::half()));
                let prod = u1.product(&u2)?;
                let mut w = prod.free_propagate(m, s, -t);
                w.scale(C::new(-T::one(), T::zero()));
                w.axpy(
                    C::new(-T::one(), T::zero()),
                    b_dot.comp(FieldId::Field1, s),
                );
                *out.comp_mut(FieldId::Field1, s) = w;
            }
        }
    }
    Ok(out)
}

/// `qbar_N` norms (N <= 2) of the corrected integrand at time `t`.
pub fn integrand_residual<T: Real>(
    kind: SystemKind,
    data: &ScatteringData<T>,
    t: T,
) -> Result<NormReport> {
    let w = corrected_integrand(kind, data, t)?;
    let target = kind.source_field();
    let mut report = NormReport::empty();
    for n in 0..=2 {
        let mut acc = T::zero();
        for s in Sign::BOTH {
            let q = q_bar_norm(w.comp(target, s), n);
            acc += q * q;
        }
        report
            .q_bar
            .push((n, acc.sqrt().to_f64().unwrap_or(f64::NAN)));
    }
    Ok(report)
}

/// Contraction-space norm: `sup_{t >= tau} (1+t)^c || (I - Lap) h(t) ||_{E1}`
/// over sampled field-1 deviations.
pub fn m_tau_norm<T: Real>(
    samples: &[(T, [SpectralField<T>; 2])],
    c: T,
    tau: T,
    mass: T,
) -> T {
    let mut sup = T::zero();
    for (t, pair) in samples {
        if *t < tau {
            continue;
        }
        let sharp = [
            pair[0].applied(&MultiplierSpec::OneMinusLaplacian { power: T::one() }),
            pair[1].applied(&MultiplierSpec::OneMinusLaplacian { power: T::one() }),
        ];
        let norm = e1_norm(&sharp[0], &sharp[1], mass);
        sup = sup.max((T::one() + *t).powf(c) * norm);
    }
    sup
}

/// Retained sign pairs of the non-resonant kernel: every `(eps1, eps2)` with
/// `eps1 + 2 eps2 != eps`.
pub fn nonresonant_pairs(eps: Sign) -> Vec<(Sign, Sign)> {
    let target = match eps {
        Sign::Plus => 1i32,
        Sign::Minus => -1,
    };
    let val = |s: Sign| match s {
        Sign::Plus => 1i32,
        Sign::Minus => -1,
    };
    let mut v = Vec::new();
    for e1 in Sign::BOTH {
        for e2 in Sign::BOTH {
            if val(e1) + 2 * val(e2) != target {
                v.push((e1, e2));
            }
        }
    }
    v
}

/// Non-resonant kernel: direct quadrature of
/// `(K_eps(g, f2))^(k) = (i/2pi) Int sum_{eps1+2eps2 != eps}
///  d(p, k-p) ghat_{eps1}(p)/(2 i omega_m(p)) f2hat_{eps2}(k-p)/(2 i omega_{2m}(k-p)) dp`
/// with `d = (eps omega_m(p1+p2) - eps1 omega_m(p1) - eps2 omega_{2m}(p2))^{-1}`.
/// O(N^4); intended for verification on small grids only. The denominators of
/// the retained combinations must stay above `m/2` in magnitude, which is
/// asserted (a violation signals an indexing or sign bug).
pub fn nonresonant_kernel<T: Real>(
    g: [&SpectralField<T>; 2],
    f2: [&SpectralField<T>; 2],
    eps: Sign,
    mass: T,
) -> Result<SpectralField<T>> {
    g[0].grid().check_same(f2[0].grid())?;
    let grid = g[0].grid().clone();
    let n = grid.n() as i64;
    let m2 = mass * T::two();
    let quad = grid.dk() * grid.dk();
    // (i / 2 pi) with the dp quadrature weight
    let pref = imag_unit::<T>().scale(T::TAU().recip()) * C::new(quad, T::zero());
    let eps_f = eps.factor::<T>();
    let mut min_denom = T::infinity();
    let mut out = SpectralField::zeros(&grid);

    fn comp<'a, T: Real>(pair: [&'a SpectralField<T>; 2], s: Sign) -> &'a SpectralField<T> {
        match s {
            Sign::Plus => pair[0],
            Sign::Minus => pair[1],
        }
    }

    for ky in 0..grid.n() {
        let kky = grid.k_of(ky);
        let my = grid.idx_of(ky);
        for kx in 0..grid.n() {
            let kkx = grid.k_of(kx);
            let mx = grid.idx_of(kx);
            let om_k = omega(mass, kkx, kky);
            let mut acc = C::new(T::zero(), T::zero());
            for py in 0..grid.n() {
                let ppy = grid.k_of(py);
                let qy = my - grid.idx_of(py);
                if qy < -n / 2 || qy >= n / 2 {
                    continue;
                }
                for px in 0..grid.n() {
                    let ppx = grid.k_of(px);
                    let qx = mx - grid.idx_of(px);
                    if qx < -n / 2 || qx >= n / 2 {
                        continue;
                    }
                    let (sx, sy) = (grid.slot_of(qx), grid.slot_of(qy));
                    let (qkx, qky) = (grid.k_of(sx), grid.k_of(sy));
                    let om_p = omega(mass, ppx, ppy);
                    let om_q = omega(m2, qkx, qky);
                    for (e1, e2) in nonresonant_pairs(eps) {
                        let gv = comp(g, e1).coef()[grid.lin(px, py)];
                        let fv = comp(f2, e2).coef()[grid.lin(sx, sy)];
                        if gv.norm_sqr() + fv.norm_sqr() == T::zero() {
                            continue;
                        }
                        let denom =
                            eps_f * om_k - e1.factor::<T>() * om_p - e2.factor::<T>() * om_q;
                        min_denom = min_denom.min(denom.abs());
                        // (2 i omega)^-1 = -i/(2 omega) per factor
                        let dressed_g = gv * C::new(T::zero(), -(T::half() / om_p));
                        let dressed_f = fv * C::new(T::zero(), -(T::half() / om_q));
                        acc += dressed_g * dressed_f / C::new(denom, T::zero());
                    }
                }
            }
            out.coef_mut()[grid.lin(kx, ky)] = pref * acc;
        }
    }
    if min_denom < mass * T::half() {
        return Err(Error::DenominatorBound {
            min: min_denom.to_f64().unwrap_or(f64::NAN),
            bound: (mass * T::half()).to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(out)
}

/// Non-resonant part of the bilinear source at time `t` for the kernel
/// identity: `sum_{eps1+2eps2 != eps} (2 i omega_m)^-1 (V g)_{eps1} *
/// (2 i omega_{2m})^-1 (V f2)_{eps2}` as a spectral field (dealiased product).
pub fn nonresonant_source<T: Real>(
    g: [&SpectralField<T>; 2],
    f2: [&SpectralField<T>; 2],
    eps: Sign,
    mass: T,
    t: T,
) -> Result<SpectralField<T>> {
    let grid = g[0].grid().clone();
    let m2 = mass * T::two();
    let mut acc = SpectralField::zeros(&grid);
    for (e1, e2) in nonresonant_pairs(eps) {
        let ge = match e1 {
            Sign::Plus => g[0],
            Sign::Minus => g[1],
        };
        let fe = match e2 {
            Sign::Plus => f2[0],
            Sign::Minus => f2[1],
        };
        let mut u = ge.free_propagate(mass, e1, t).applied(&MultiplierSpec::Omega {
            mass,
            power: -T::one(),
        });
        u.scale(C::new(T::zero(), -T::half()));
        let mut w = fe.free_propagate(m2, e2, t).applied(&MultiplierSpec::Omega {
            mass: m2,
            power: -T::one(),
        });
        w.scale(C::new(T::zero(), -T::half()));
        acc.add_assign(&u.product(&w)?);
    }
    Ok(acc)
}

/// All free propagations of a field-1/field-2 pair used by the kernel tests.
pub fn propagate_pair<T: Real>(
    pair: [&SpectralField<T>; 2],
    mass: T,
    t: T,
) -> [SpectralField<T>; 2] {
    [
        pair[0].free_propagate(mass, Sign::Plus, t),
        pair[1].free_propagate(mass, Sign::Minus, t),
    ]
}

/// Reconstruction of `phi_1` shared with the dynamics module, re-exported
/// for the diagnostics drivers.
pub fn phi1<T: Real>(a: &PhaseState<T>) -> SpectralField<T> {
    reconstruct_phi(a, FieldId::Field1)
}
