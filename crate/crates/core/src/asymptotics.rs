//! Light-cone asymptotics of free Klein-Gordon waves and the resonance
//! machinery built on them: the homogeneous cone expansion of a solution, its
//! inversion back to frequency data, weighted decay norms, and the unique
//! coefficient sequence that makes a product of two free waves decay to all
//! orders once the masses are resonant.

use crate::analytic::AnalyticProfile;
use crate::error::{Error, Result};
use crate::field::{omega, PhysicalField, Sign, SpectralField};
use crate::fitting::DecaySeries;
use crate::grid::Grid;
use crate::norms::q_bar_norm;
use crate::scalar::{imag_unit, Real, C};

/// Homogeneous light-cone function represented by its `t = 1` slice on a
/// uniform grid over the square `[-R, R]^2` (support strictly inside the
/// disk `|x| <= R`, `R < 1`), together with its homogeneity degree: the full
/// function is `g(t, x) = t^degree g(1, x/t)` on the forward cone.
#[derive(Clone, Debug)]
pub struct ConeSlice<T: Real> {
    pub radius: T,
    pub n_s: usize,
    pub values: Vec<C<T>>,
    pub degree: i32,
    pub mass: T,
    pub sign: Sign,
}

impl<T: Real> ConeSlice<T> {
    pub fn zeros(radius: T, n_s: usize, degree: i32, mass: T, sign: Sign) -> Self {
        ConeSlice {
            radius,
            n_s,
            values: vec![C::new(T::zero(), T::zero()); n_s * n_s],
            degree,
            mass,
            sign,
        }
    }

    #[inline]
    pub fn spacing(&self) -> T {
        self.radius * T::two() / T::of((self.n_s - 1) as f64)
    }

    #[inline]
    pub fn coord(&self, i: usize) -> T {
        -self.radius + self.spacing() * T::of(i as f64)
    }

    #[inline]
    fn at(&self, ix: usize, iy: usize) -> C<T> {
        self.values[iy * self.n_s + ix]
    }

    pub fn max_abs(&self) -> T {
        self.values
            .iter()
            .map(|v| v.norm())
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// Largest magnitude on the two outermost index rings, relative to the
    /// slice maximum; the support invariant requires this below 1e-13.
    pub fn boundary_ring_level(&self) -> T {
        let n = self.n_s;
        let mut worst = T::zero();
        for iy in 0..n {
            for ix in 0..n {
                if ix <= 1 || iy <= 1 || ix >= n - 2 || iy >= n - 2 {
                    worst = worst.max(self.at(ix, iy).norm());
                }
            }
        }
        worst / self.max_abs().max(T::of(1e-300))
    }

    pub fn validate_support(&self) -> Result<()> {
        let level = self.boundary_ring_level();
        if level > T::of(1e-13) {
            return Err(Error::SupportOverflow {
                needed: f64::NAN,
                radius: self.radius.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(())
    }

    /// Separable 4-point (cubic) Lagrange interpolation at `p`; zero outside
    /// the grid, which is exact for slices supported strictly inside.
    pub fn sample(&self, p: [T; 2]) -> C<T> {
        self.sample_order(p, 4)
    }

    /// 6-point variant used as the interpolation-error probe.
    pub fn sample6(&self, p: [T; 2]) -> C<T> {
        self.sample_order(p, 6)
    }

    fn sample_order(&self, p: [T; 2], points: usize) -> C<T> {
        let h = self.spacing();
        let n = self.n_s as i64;
        let zero = C::new(T::zero(), T::zero());
        // fractional index
        let fx = (p[0] + self.radius) / h;
        let fy = (p[1] + self.radius) / h;
        let half = (points / 2) as i64;
        let ix0 = fx.floor().to_f64().unwrap() as i64 - (half - 1);
        let iy0 = fy.floor().to_f64().unwrap() as i64 - (half - 1);
        let mut acc = zero;
        for jy in 0..points as i64 {
            let iy = iy0 + jy;
            let wy = lagrange_weight::<T>(fy - T::of(iy0 as f64), jy as usize, points);
            if wy == T::zero() {
                continue;
            }
            for jx in 0..points as i64 {
                let ix = ix0 + jx;
                let wx = lagrange_weight::<T>(fx - T::of(ix0 as f64), jx as usize, points);
                if wx == T::zero() {
                    continue;
                }
                let v = if ix < 0 || iy < 0 || ix >= n || iy >= n {
                    zero
                } else {
                    self.at(ix as usize, iy as usize)
                };
                acc += v.scale(wx * wy);
            }
        }
        acc
    }

    /// Pointwise product of two slices on the same grid; degrees add plus one
    /// (the product of two degree `-1` factors carries a `t^{1+l}` prefactor
    /// in the resonance construction, making the slice degree `-1` again).
    pub fn product_slice(&self, other: &Self, degree: i32, mass: T, sign: Sign) -> Result<Self> {
        if self.n_s != other.n_s || self.radius != other.radius {
            return Err(Error::Invalid("slice grids differ".into()));
        }
        let mut out = ConeSlice::zeros(self.radius, self.n_s, degree, mass, sign);
        for (o, (a, b)) in out
            .values
            .iter_mut()
            .zip(self.values.iter().zip(&other.values))
        {
            *o = *a * *b;
        }
        Ok(out)
    }
}

fn lagrange_weight<T: Real>(s: T, j: usize, points: usize) -> T {
    // weight of node j for the normalized coordinate s in [0, points-1]
    let mut w = T::one();
    for m in 0..points {
        if m == j {
            continue;
        }
        w = w * (s - T::of(m as f64)) / (T::of(j as f64) - T::of(m as f64));
    }
    w
}

/// Leading cone amplitude of the free wave with spectrum `f`:
/// `g0(1, x) = i eps (M / rho^2) fhat(-eps M x / rho)`, `rho = sqrt(1 - |x|^2)`.
/// Requires the effective band of `f` to map strictly inside the disk.
pub fn g0_from_profile<T: Real>(
    f: &AnalyticProfile<T>,
    mass: T,
    sign: Sign,
    radius: T,
    n_s: usize,
) -> Result<ConeSlice<T>> {
    let k_eff = f.k_eff();
    let needed = k_eff / (k_eff * k_eff + mass * mass).sqrt();
    if needed >= radius {
        return Err(Error::SupportOverflow {
            needed: needed.to_f64().unwrap_or(f64::NAN),
            radius: radius.to_f64().unwrap_or(f64::NAN),
        });
    }
    let mut slice = ConeSlice::zeros(radius, n_s, -1, mass, sign);
    let i_eps = imag_unit::<T>().scale(sign.factor());
    for iy in 0..n_s {
        let y = slice.coord(iy);
        for ix in 0..n_s {
            let x = slice.coord(ix);
            let r2 = x * x + y * y;
            if r2 >= T::one() {
                continue;
            }
            let rho = (T::one() - r2).sqrt();
            let arg = [
                -sign.factor::<T>() * mass * x / rho,
                -sign.factor::<T>() * mass * y / rho,
            ];
            slice.values[iy * n_s + ix] = i_eps.scale(mass / (rho * rho)) * f.eval(arg);
        }
    }
    Ok(slice)
}

fn fd6_axis<T: Real>(s: &ConeSlice<T>, axis: usize) -> Vec<C<T>> {
    let n = s.n_s;
    let h = s.spacing();
    let w = [T::of(3.0 / 4.0), T::of(-3.0 / 20.0), T::of(1.0 / 60.0)];
    let zero = C::new(T::zero(), T::zero());
    let mut out = vec![zero; n * n];
    let get = |ix: i64, iy: i64| -> C<T> {
        if ix < 0 || iy < 0 || ix >= n as i64 || iy >= n as i64 {
            zero
        } else {
            s.values[iy as usize * n + ix as usize]
        }
    };
    for iy in 0..n as i64 {
        for ix in 0..n as i64 {
            let mut acc = zero;
            for (d, &c) in w.iter().enumerate() {
                let d = d as i64 + 1;
                let (p, m) = if axis == 0 {
                    (get(ix + d, iy), get(ix - d, iy))
                } else {
                    (get(ix, iy + d), get(ix, iy - d))
                };
                acc += (p - m).scale(c);
            }
            out[(iy * n as i64 + ix) as usize] = acc.scale(h.recip());
        }
    }
    out
}

fn fd6_laplacian<T: Real>(s: &ConeSlice<T>) -> Vec<C<T>> {
    let n = s.n_s;
    let h2 = s.spacing() * s.spacing();
    let w0 = T::of(-49.0 / 18.0);
    let w = [T::of(3.0 / 2.0), T::of(-3.0 / 20.0), T::of(1.0 / 90.0)];
    let zero = C::new(T::zero(), T::zero());
    let mut out = vec![zero; n * n];
    let get = |ix: i64, iy: i64| -> C<T> {
        if ix < 0 || iy < 0 || ix >= n as i64 || iy >= n as i64 {
            zero
        } else {
            s.values[iy as usize * n + ix as usize]
        }
    };
    for iy in 0..n as i64 {
        for ix in 0..n as i64 {
            let center = get(ix, iy);
            let mut acc = center.scale(w0 * T::two());
            for (d, &c) in w.iter().enumerate() {
                let d = d as i64 + 1;
                acc += (get(ix + d, iy) + get(ix - d, iy)).scale(c);
                acc += (get(ix, iy + d) + get(ix, iy - d)).scale(c);
            }
            out[(iy * n as i64 + ix) as usize] = acc.scale(h2.recip());
        }
    }
    out
}

/// Slice of `d/dt g` via homogeneity: `(d_t g)(1, x) = (deg - x . grad) g(1, x)`,
/// degree drops by one. Gradients by order-6 centered differences.
pub fn slice_dt<T: Real>(s: &ConeSlice<T>) -> ConeSlice<T> {
    let gx = fd6_axis(s, 0);
    let gy = fd6_axis(s, 1);
    let mut out = ConeSlice::zeros(s.radius, s.n_s, s.degree - 1, s.mass, s.sign);
    let deg = T::of(s.degree as f64);
    for iy in 0..s.n_s {
        let y = s.coord(iy);
        for ix in 0..s.n_s {
            let x = s.coord(ix);
            let l = iy * s.n_s + ix;
            out.values[l] = s.values[l].scale(deg) - gx[l].scale(x) - gy[l].scale(y);
        }
    }
    out
}

/// Slice of the wave operator `Box g = d_t^2 g - Lap g`, degree drops by two.
pub fn slice_box<T: Real>(s: &ConeSlice<T>) -> ConeSlice<T> {
    let dtdt = slice_dt(&slice_dt(s));
    let lap = fd6_laplacian(s);
    let mut out = dtdt;
    for (o, l) in out.values.iter_mut().zip(&lap) {
        *o -= *l;
    }
    out.degree = s.degree - 2;
    out
}

/// Cone expansion `g_l = rho Box g_{l-1} / (2 i eps l M)`: returns
/// `[g_0, ..., g_{n_terms}]`, each of degree `-1-l`.
pub fn cone_expansion<T: Real>(
    f: &AnalyticProfile<T>,
    mass: T,
    sign: Sign,
    radius: T,
    n_s: usize,
    n_terms: usize,
) -> Result<Vec<ConeSlice<T>>> {
    let g0 = g0_from_profile(f, mass, sign, radius, n_s)?;
    g0.validate_support()?;
    let mut out = vec![g0];
    for l in 1..=n_terms {
        let prev = out.last().unwrap();
        let boxed = slice_box(prev);
        let denom = imag_unit::<T>().scale(T::two() * sign.factor::<T>() * T::of(l as f64) * mass);
        let mut next = ConeSlice::zeros(radius, n_s, prev.degree - 1, mass, sign);
        for iy in 0..n_s {
            let y = next.coord(iy);
            for ix in 0..n_s {
                let x = next.coord(ix);
                let r2 = x * x + y * y;
                if r2 >= T::one() {
                    continue;
                }
                let rho = (T::one() - r2).sqrt();
                next.values[iy * n_s + ix] =
                    boxed.values[iy * n_s + ix].scale(rho) / denom;
            }
        }
        next.validate_support()?;
        out.push(next);
    }
    Ok(out)
}

/// Physical-space evaluation of the cone sum
/// `e^{i eps M rho} sum_l t^{-1-l} g_l(1, x/t)` at time `t` on the grid,
/// zero outside the cone.
pub fn cone_sum_field<T: Real>(
    slices: &[ConeSlice<T>],
    t: T,
    grid: &Grid<T>,
) -> Result<PhysicalField<T>> {
    if slices.is_empty() {
        return Ok(PhysicalField::zeros(grid));
    }
    let (mass, sign) = (slices[0].mass, slices[0].sign);
    if t >= grid.length() * T::half() {
        return Err(Error::ConeOverflow {
            cone: t.to_f64().unwrap_or(f64::NAN),
            half_box: (grid.length() * T::half()).to_f64().unwrap_or(f64::NAN),
        });
    }
    let mut out = PhysicalField::zeros(grid);
    for (l, x, y) in grid.points() {
        let s = [x / t, y / t];
        let r2 = s[0] * s[0] + s[1] * s[1];
        if r2 >= T::one() {
            continue;
        }
        let rho = t * (T::one() - r2).sqrt();
        let phase = C::from_polar(T::one(), sign.factor::<T>() * mass * rho);
        let mut acc = C::new(T::zero(), T::zero());
        let mut t_pow = t.recip();
        for slice in slices {
            acc += slice.sample(s).scale(t_pow);
            t_pow = t_pow / t;
        }
        out.values_mut()[l] = phase * acc;
    }
    Ok(out)
}

/// Rest-term decay study: `phi_n(t) = V(t) f - e^{i eps M rho} sum_{l<n} g_l`,
/// returning the L2 series and the `delta(t) = 1 + t + |x|` weighted sup
/// series.
pub fn rest_term_norms<T: Real>(
    f: &AnalyticProfile<T>,
    mass: T,
    sign: Sign,
    n: usize,
    t_grid: &[T],
    grid: &Grid<T>,
    radius: T,
    n_s: usize,
) -> Result<(DecaySeries<T>, DecaySeries<T>)> {
    let slices = cone_expansion(f, mass, sign, radius, n_s, n.saturating_sub(1))?;
    let used = &slices[..n];
    let spectrum = f.sample(grid);
    let mut l2 = DecaySeries::new(format!("L2(phi_{n})"));
    let mut wsup = DecaySeries::new(format!("sup(delta phi_{n})"));
    for &t in t_grid {
        let free = spectrum.free_propagate(mass, sign, t).to_physical();
        let cone = cone_sum_field(used, t, grid)?;
        let mut rest = free;
        for (a, b) in rest.values_mut().iter_mut().zip(cone.values()) {
            *a -= *b;
        }
        l2.push(t, rest.l2_norm());
        let mut sup = T::zero();
        for (l, x, y) in grid.points() {
            let delta = T::one() + t + (x * x + y * y).sqrt();
            sup = sup.max(rest.values()[l].norm() * delta);
        }
        wsup.push(t, sup);
    }
    Ok((l2, wsup))
}

// --- weighted generator norms on free solutions -------------------------------------------

/// One term of a spacetime-generator application to a free wave: a constant
/// times `t^tpow x^xpow` times a spectrally available derivative of the wave.
#[derive(Clone, Debug)]
struct XiTerm<T: Real> {
    coef: C<T>,
    tpow: u8,
    xpow: [u8; 2],
    /// extra spectral symbol: `(i eps omega)^dt_order * (i k1)^d1 * (i k2)^d2`
    dt_order: u8,
    d: [u8; 2],
}

/// Apply one generator to a sum of terms by the product rule; the underlying
/// field is a free wave, so time derivatives are the `i eps omega` symbol.
fn xi_step<T: Real>(terms: &[XiTerm<T>], g: XiGen) -> Vec<XiTerm<T>> {
    let mut out: Vec<XiTerm<T>> = Vec::new();
    let mut push = |t: XiTerm<T>| {
        if t.coef.norm_sqr() != T::zero() {
            out.push(t);
        }
    };
    for term in terms {
        match g {
            XiGen::P0 => {
                // d/dt: coefficient t-power, then the field
                if term.tpow > 0 {
                    let mut t2 = term.clone();
                    t2.coef = t2.coef.scale(T::of(term.tpow as f64));
                    t2.tpow -= 1;
                    push(t2);
                }
                let mut t2 = term.clone();
                t2.dt_order += 1;
                push(t2);
            }
            XiGen::Px(axis) => {
                if term.xpow[axis] > 0 {
                    let mut t2 = term.clone();
                    t2.coef = t2.coef.scale(T::of(term.xpow[axis] as f64));
                    t2.xpow[axis] -= 1;
                    push(t2);
                }
                let mut t2 = term.clone();
                t2.d[axis] += 1;
                push(t2);
            }
            XiGen::N(axis) => {
                // x_axis d/dt + t d/dx_axis
                for sub in xi_step(std::slice::from_ref(term), XiGen::P0) {
                    let mut t2 = sub;
                    t2.xpow[axis] += 1;
                    push(t2);
                }
                for sub in xi_step(std::slice::from_ref(term), XiGen::Px(axis)) {
                    let mut t2 = sub;
                    t2.tpow += 1;
                    push(t2);
                }
            }
            XiGen::R => {
                // x1 d2 - x2 d1
                for sub in xi_step(std::slice::from_ref(term), XiGen::Px(1)) {
                    let mut t2 = sub;
                    t2.xpow[0] += 1;
                    push(t2);
                }
                for sub in xi_step(std::slice::from_ref(term), XiGen::Px(0)) {
                    let mut t2 = sub;
                    t2.coef = -t2.coef;
                    t2.xpow[1] += 1;
                    push(t2);
                }
            }
        }
    }
    out
}

/// Spacetime generators for the weighted-norm machinery.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum XiGen {
    P0,
    /// space translation along the axis
    Px(usize),
    /// boost along the axis
    N(usize),
    R,
}

impl XiGen {
    pub const BASIS: [XiGen; 6] = [
        XiGen::P0,
        XiGen::Px(0),
        XiGen::Px(1),
        XiGen::R,
        XiGen::N(0),
        XiGen::N(1),
    ];
}

/// Physical samples of `xi_word phi(t)` for a free wave `phi = V(t) f`.
fn xi_word_field<T: Real>(
    word: &[XiGen],
    spectrum: &SpectralField<T>,
    mass: T,
    sign: Sign,
    t: T,
    grid: &Grid<T>,
) -> PhysicalField<T> {
    let mut terms = vec![XiTerm {
        coef: C::new(T::one(), T::zero()),
        tpow: 0,
        xpow: [0, 0],
        dt_order: 0,
        d: [0, 0],
    }];
    for &g in word.iter().rev() {
        terms = xi_step(&terms, g);
    }
    let mut out = PhysicalField::zeros(grid);
    for term in &terms {
        // spectral symbol applied to the propagated wave
        let mut spec = spectrum.free_propagate(mass, sign, t);
        let i = imag_unit::<T>();
        for (l, kx, ky) in grid.modes() {
            let mut sym = C::new(T::one(), T::zero());
            for _ in 0..term.dt_order {
                sym *= i.scale(sign.factor::<T>() * omega(mass, kx, ky));
            }
            for _ in 0..term.d[0] {
                sym *= i.scale(kx);
            }
            for _ in 0..term.d[1] {
                sym *= i.scale(ky);
            }
            spec.coef_mut()[l] *= sym;
        }
        let phys = spec.to_physical();
        let t_factor = t.powi(term.tpow as i32);
        for (l, x, y) in grid.points() {
            let mut w = term.coef.scale(t_factor);
            for _ in 0..term.xpow[0] {
                w = w.scale(x);
            }
            for _ in 0..term.xpow[1] {
                w = w.scale(y);
            }
            out.values_mut()[l] += phys.values()[l] * w;
        }
    }
    out
}

/// Which norm the weighted sum uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormKind {
    L2,
    Sup,
}

/// Weighted generator norm of a free wave:
/// `p_j^(s) = sum_{|Y| <= j} ( M ||w xi_Y phi|| + sum_mu ||w xi_{P_mu Y} phi|| )`
/// with weight `w = (1 + lambda(t))^{k/2}` and an optional extra
/// `delta(t)` factor folded in by the caller through `delta_weight`.
pub fn weighted_p_norm<T: Real>(
    f: &AnalyticProfile<T>,
    mass: T,
    sign: Sign,
    t: T,
    grid: &Grid<T>,
    j: usize,
    k_weight: usize,
    s: NormKind,
    delta_weight: bool,
) -> T {
    assert!(j <= 1, "desk-scale restriction: at most one xi application");
    let spectrum = f.sample(grid);
    let weight = |x: T, y: T| -> T {
        let r = (x * x + y * y).sqrt();
        let lambda = if r <= t {
            t / (T::one() + t - r)
        } else {
            r
        };
        let mut w = (T::one() + lambda).powf(T::of(k_weight as f64) * T::half());
        if delta_weight {
            w = w * (T::one() + t + r);
        }
        w
    };
    let weighted_norm = |field: &PhysicalField<T>| -> T {
        match s {
            NormKind::L2 => {
                let mut acc = T::zero();
                for (l, x, y) in grid.points() {
                    let w = weight(x, y);
                    acc += field.values()[l].norm_sqr() * w * w;
                }
                (acc * grid.dx() * grid.dx()).sqrt()
            }
            NormKind::Sup => {
                let mut sup = T::zero();
                for (l, x, y) in grid.points() {
                    sup = sup.max(field.values()[l].norm() * weight(x, y));
                }
                sup
            }
        }
    };

    let mut words: Vec<Vec<XiGen>> = vec![vec![]];
    if j >= 1 {
        for g in XiGen::BASIS {
            words.push(vec![g]);
        }
    }
    let translations = [XiGen::P0, XiGen::Px(0), XiGen::Px(1)];
    let mut acc = T::zero();
    for w in &words {
        let base = xi_word_field(w, &spectrum, mass, sign, t, grid);
        acc += mass * weighted_norm(&base);
        for p in translations {
            let mut ext = vec![p];
            ext.extend_from_slice(w);
            let field = xi_word_field(&ext, &spectrum, mass, sign, t, grid);
            acc += weighted_norm(&field);
        }
    }
    acc
}

// --- inversion of the expansion ------------------------------------------------------------

/// Invert a degree `-1` cone slice into frequency data:
/// `fhat_0(k) = -i eps (M / omega^2) g(1, -eps k/omega)` and, at order one,
/// `fhat_1(k) = +i eps (M / omega^2) g_{0,1}(1, -eps k/omega)` with
/// `g_{0,1} = rho Box g / (2 i eps M)`. Aborts when the two interpolation
/// stencils disagree beyond 1e-8 of the slice scale.
pub fn inverse_construction<T: Real>(
    g: &ConeSlice<T>,
    n_terms: usize,
    grid: &Grid<T>,
) -> Result<Vec<SpectralField<T>>> {
    assert!(n_terms <= 1, "desk-scale restriction: orders 0 and 1 only");
    let mass = g.mass;
    let eps = g.sign.factor::<T>();
    let scale = g.max_abs().max(T::of(1e-300));

    let mut interp_err = T::zero();
    let mut eval = |slice: &ConeSlice<T>| -> SpectralField<T> {
        let mut out = SpectralField::zeros(grid);
        for (l, kx, ky) in grid.modes() {
            let om = omega(mass, kx, ky);
            let p = [-eps * kx / om, -eps * ky / om];
            let v4 = slice.sample(p);
            // wider-stencil probe of the bicubic error
            interp_err = interp_err.max((v4 - slice.sample6(p)).norm());
            let pref = imag_unit::<T>().scale(-eps * mass / (om * om));
            out.coef_mut()[l] = pref * v4;
        }
        out
    };

    let mut result = vec![eval(g)];
    if n_terms >= 1 {
        let boxed = slice_box(g);
        // g_{0,1} = rho Box g / (2 i eps M); the order-one coefficient flips
        // the sign through g_{1,0} = -t g_{0,1}
        let denom = imag_unit::<T>().scale(T::two() * eps * mass);
        let mut g01 = ConeSlice::zeros(g.radius, g.n_s, -2, mass, g.sign);
        for iy in 0..g.n_s {
            let y = g01.coord(iy);
            for ix in 0..g.n_s {
                let x = g01.coord(ix);
                let r2 = x * x + y * y;
                if r2 >= T::one() {
                    continue;
                }
                let rho = (T::one() - r2).sqrt();
                g01.values[iy * g.n_s + ix] = boxed.values[iy * g.n_s + ix].scale(rho) / denom;
            }
        }
        let mut f1 = eval(&g01);
        f1.scale(C::new(-T::one(), T::zero()));
        result.push(f1);
    }
    if interp_err > T::of(1e-8) * scale {
        return Err(Error::InterpolationAccuracy {
            err: (interp_err / scale).to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(result)
}

/// Residual of the inverted expansion:
/// `u_n(t) = e^{i eps M rho} g(t) - sum_{l <= n} t^{-l} V(t) f_l`, L2 series.
pub fn inverse_residual_series<T: Real>(
    g: &ConeSlice<T>,
    coeffs: &[SpectralField<T>],
    t_grid: &[T],
    grid: &Grid<T>,
) -> Result<DecaySeries<T>> {
    let mut series = DecaySeries::new(format!("L2(u_{})", coeffs.len() - 1));
    for &t in t_grid {
        let cone = cone_sum_field(std::slice::from_ref(g), t, grid)?;
        let mut rest = cone;
        let mut t_pow = T::one();
        for f in coeffs {
            let v = f.free_propagate(g.mass, g.sign, t).to_physical();
            for (a, b) in rest.values_mut().iter_mut().zip(v.values()) {
                *a -= b.scale(t_pow);
            }
            t_pow = t_pow / t;
        }
        series.push(t, rest.l2_norm());
    }
    Ok(series)
}

// --- resonance ------------------------------------------------------------------------------

/// Masses and signs of a resonant triple `eps M = eps1 M1 + eps2 M2`.
#[derive(Clone, Copy, Debug)]
pub struct ResonanceTriple<T: Real> {
    pub target: (T, Sign),
    pub one: (T, Sign),
    pub two: (T, Sign),
}

impl<T: Real> ResonanceTriple<T> {
    /// Checks the resonance identity; since the identity is linear it also
    /// certifies the phase coherence `eps M rho = eps1 M1 rho + eps2 M2 rho`
    /// on the whole cone.
    pub fn validate(&self) -> Result<()> {
        let lhs = self.target.1.factor::<T>() * self.target.0;
        let rhs = self.one.1.factor::<T>() * self.one.0 + self.two.1.factor::<T>() * self.two.0;
        let defect = (lhs - rhs).abs();
        if defect > T::of(1e-12) * self.target.0.abs() {
            return Err(Error::NotResonant {
                defect: defect.to_f64().unwrap_or(f64::NAN),
            });
        }
        if self.target.0 <= T::zero() || self.one.0 <= T::zero() || self.two.0 <= T::zero() {
            return Err(Error::Invalid("masses must be positive".into()));
        }
        Ok(())
    }
}

/// Leading resonance coefficient, evaluated directly:
/// `fhat_0(k) = i (eps1 M1 eps2 M2 / (eps M)) (omega_M(k)/M)^2
///              f1hat(eps1 M1 k / (eps M)) f2hat(eps2 M2 k / (eps M))`.
pub fn resonant_f0<T: Real>(
    rt: &ResonanceTriple<T>,
    f1: &AnalyticProfile<T>,
    f2: &AnalyticProfile<T>,
    grid: &Grid<T>,
) -> Result<SpectralField<T>> {
    rt.validate()?;
    let (mass, eps) = rt.target;
    let eps_m = eps.factor::<T>() * mass;
    let (m1, e1) = rt.one;
    let (m2, e2) = rt.two;
    let (s1, s2) = (
        e1.factor::<T>() * m1 / eps_m,
        e2.factor::<T>() * m2 / eps_m,
    );
    let pref = imag_unit::<T>().scale(e1.factor::<T>() * m1 * e2.factor::<T>() * m2 / eps_m);
    let mut out = SpectralField::zeros(grid);
    for (l, kx, ky) in grid.modes() {
        let om = omega(mass, kx, ky);
        let ratio = om / mass;
        out.coef_mut()[l] = pref.scale(ratio * ratio)
            * f1.eval([s1 * kx, s1 * ky])
            * f2.eval([s2 * kx, s2 * ky]);
    }
    Ok(out)
}

/// Coefficients `f_0, f_1` of the resonant product expansion, with `f_0`
/// from the closed formula and `f_1` assembled from the order-one slice
/// products through the inverse construction
/// (`f_1 = f_{0,1} + f_{1,0}`).
pub fn resonant_coefficients<T: Real>(
    rt: &ResonanceTriple<T>,
    f1: &AnalyticProfile<T>,
    f2: &AnalyticProfile<T>,
    grid: &Grid<T>,
    radius: T,
    n_s: usize,
    n: usize,
) -> Result<Vec<SpectralField<T>>> {
    rt.validate()?;
    let mut out = vec![resonant_f0(rt, f1, f2, grid)?];
    if n >= 1 {
        let (mass, eps) = rt.target;
        let e1 = cone_expansion(f1, rt.one.0, rt.one.1, radius, n_s, 1)?;
        let e2 = cone_expansion(f2, rt.two.0, rt.two.1, radius, n_s, 1)?;
        // product slices of total order 0 and 1; each is degree -1 thanks to
        // the t^{1+l} prefactor of the construction
        let s0 = e1[0].product_slice(&e2[0], -1, mass, eps)?;
        let mut s1 = e1[0].product_slice(&e2[1], -1, mass, eps)?;
        let s1b = e1[1].product_slice(&e2[0], -1, mass, eps)?;
        for (a, b) in s1.values.iter_mut().zip(&s1b.values) {
            *a += *b;
        }
        let from_s0 = inverse_construction(&s0, 1, grid)?;
        let from_s1 = inverse_construction(&s1, 0, grid)?;
        let mut f1_coef = from_s0[1].clone();
        f1_coef.add_assign(&from_s1[0]);
        out.push(f1_coef);
    }
    Ok(out)
}

/// Decay series of the resonant-product residual
/// `delta_n(t) = V_M(-t)[(V_{M1}(t) f1)(V_{M2}(t) f2)] - sum_{l<=n} t^{-1-l} f_l`,
/// in `qbar_N` norms for `N = 0, 1, 2`.
pub fn delta_residual<T: Real>(
    rt: &ResonanceTriple<T>,
    f1: &AnalyticProfile<T>,
    f2: &AnalyticProfile<T>,
    coeffs: &[SpectralField<T>],
    t_grid: &[T],
    grid: &Grid<T>,
) -> Result<[DecaySeries<T>; 3]> {
    rt.validate()?;
    let a = f1.sample(grid);
    let b = f2.sample(grid);
    let mut series = [
        DecaySeries::new("qbar_0(delta)"),
        DecaySeries::new("qbar_1(delta)"),
        DecaySeries::new("qbar_2(delta)"),
    ];
    for &t in t_grid {
        let at = a.free_propagate(rt.one.0, rt.one.1, t);
        let bt = b.free_propagate(rt.two.0, rt.two.1, t);
        let prod = at.product(&bt)?;
        let mut delta = prod.free_propagate(rt.target.0, rt.target.1, -t);
        let mut t_pow = t.recip();
        for f in coeffs {
            delta.axpy(C::new(-t_pow, T::zero()), f);
            t_pow = t_pow / t;
        }
        for n in 0..3 {
            series[n].push(t, q_bar_norm(&delta, n));
        }
    }
    Ok(series)
}
