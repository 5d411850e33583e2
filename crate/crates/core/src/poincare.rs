//! The Poincare algebra in 2+1 dimensions acting on the phase space: the
//! linear representation, its quadratic perturbation, the extension to short
//! enveloping-algebra words, structure constants derived symbolically from
//! the spacetime vector-field realization, and the bracket-closure and
//! wave-operator intertwining checks.

use crate::dynamics::{integrate, nonlinear_bilinear, SystemKind};
use crate::error::{Error, Result};
use crate::field::{MultiplierSpec, Sign, SpectralField};
use crate::norms::{e_norm, e_norm_diff};
use crate::profiles::ScatteringData;
use crate::scalar::{Real, C};
use crate::scattering::{wave_operator, WaveOpParams};
use crate::state::{FieldId, PhaseState};

/// Ordered standard basis of the algebra: time translation, two space
/// translations, rotation, two boosts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    P0,
    P1,
    P2,
    R,
    N1,
    N2,
}

impl Generator {
    pub const ALL: [Generator; 6] = [
        Generator::P0,
        Generator::P1,
        Generator::P2,
        Generator::R,
        Generator::N1,
        Generator::N2,
    ];

    pub fn index(self) -> usize {
        Self::ALL.iter().position(|&g| g == self).unwrap()
    }

    pub fn label(self) -> &'static str {
        match self {
            Generator::P0 => "P0",
            Generator::P1 => "P1",
            Generator::P2 => "P2",
            Generator::R => "R",
            Generator::N1 => "N1",
            Generator::N2 => "N2",
        }
    }
}

/// Enveloping-algebra word of length at most 2 (the desk-scale restriction).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Word(pub Vec<Generator>);

// --- symbolic vector-field calculus ------------------------------------------------------

/// First-order operator with coefficients linear in `(t, x1, x2)`:
/// each term is `coef * mono * d/d(dir)` with `mono` one of `1, t, x1, x2`.
/// Exact integer arithmetic, so the derived table is exact.
#[derive(Clone, Debug, PartialEq)]
struct VectorField {
    /// terms[dir][mono] with dir in {t, x1, x2}, mono in {1, t, x1, x2}
    coef: [[i64; 4]; 3],
}

impl VectorField {
    fn zero() -> Self {
        VectorField { coef: [[0; 4]; 3] }
    }

    /// The spacetime realization of the generators. The rotation is oriented
    /// like the phase-space representation (`x1 d2 - x2 d1`); see the module
    /// tests for the consistency argument.
    fn of(g: Generator) -> Self {
        let mut v = Self::zero();
        match g {
            Generator::P0 => v.coef[0][0] = 1,
            Generator::P1 => v.coef[1][0] = 1,
            Generator::P2 => v.coef[2][0] = 1,
            // x1 d2 - x2 d1
            Generator::R => {
                v.coef[2][2] = 1;
                v.coef[1][3] = -1;
            }
            // x_i dt + t d_i
            Generator::N1 => {
                v.coef[0][2] = 1;
                v.coef[1][1] = 1;
            }
            Generator::N2 => {
                v.coef[0][3] = 1;
                v.coef[2][1] = 1;
            }
        }
        v
    }

    /// Derivative of monomial `mono` in direction `dir`: x-linear
    /// coefficients differentiate to constants.
    fn d_mono(dir: usize, mono: usize) -> i64 {
        // mono: 0 -> 1, 1 -> t, 2 -> x1, 3 -> x2; dir: 0 -> t, 1 -> x1, 2 -> x2
        match (dir, mono) {
            (0, 1) | (1, 2) | (2, 3) => 1,
            _ => 0,
        }
    }

    /// Commutator `[self, other]` of two first-order operators with linear
    /// coefficients; the result is again of the same shape.
    fn commutator(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        // [A, B] = sum_{d1,m1,d2,m2} a b ( mono1 * d_{d1}(mono2) * d_{d2} - mono2 * d_{d2}(mono1) * d_{d1} )
        for d1 in 0..3 {
            for m1 in 0..4 {
                let a = self.coef[d1][m1];
                if a == 0 {
                    continue;
                }
                for d2 in 0..3 {
                    for m2 in 0..4 {
                        let b = other.coef[d2][m2];
                        if b == 0 {
                            continue;
                        }
                        out.coef[d2][m1] += a * b * Self::d_mono(d1, m2);
                        out.coef[d1][m2] -= a * b * Self::d_mono(d2, m1);
                    }
                }
            }
        }
        out
    }
}

/// Structure constants `[X, Y] = sum_Z c[X][Y][Z] Z`, exact integers.
#[derive(Clone, Debug)]
pub struct StructureTable {
    pub c: [[[i64; 6]; 6]; 6],
}

/// Derive structure constants by symbolic commutation of the vector fields.
/// Every commutator must land exactly in the span of the basis; anything
/// else panics, since it would mean the realization is not closed.
pub fn structure_constants() -> StructureTable {
    let fields: Vec<VectorField> = Generator::ALL.iter().map(|&g| VectorField::of(g)).collect();
    let mut c = [[[0i64; 6]; 6]; 6];
    for (i, a) in fields.iter().enumerate() {
        for (j, b) in fields.iter().enumerate() {
            let comm = a.commutator(b);
            // expand in the basis by greedy exact matching
            let mut rest = comm.clone();
            let mut coefs = [0i64; 6];
            for (z, base) in fields.iter().enumerate() {
                // find the scalar multiple lambda such that subtracting
                // lambda * base removes base's leading slot
                let mut lambda = 0i64;
                'outer: for d in 0..3 {
                    for m in 0..4 {
                        if base.coef[d][m] != 0 {
                            lambda = rest.coef[d][m] / base.coef[d][m];
                            break 'outer;
                        }
                    }
                }
                if lambda != 0 {
                    for d in 0..3 {
                        for m in 0..4 {
                            rest.coef[d][m] -= lambda * base.coef[d][m];
                        }
                    }
                    coefs[z] = lambda;
                }
            }
            assert_eq!(rest, VectorField::zero(), "commutator not in the span");
            c[i][j] = coefs;
        }
    }
    StructureTable { c }
}

impl StructureTable {
    /// Largest violation of the Jacobi identity over all basis triples,
    /// evaluated in exact integer arithmetic and returned as a float for the
    /// reporting pipeline.
    pub fn jacobi_residual(&self) -> f64 {
        let mut worst = 0i64;
        for x in 0..6 {
            for y in 0..6 {
                for z in 0..6 {
                    for w in 0..6 {
                        let mut acc = 0i64;
                        for u in 0..6 {
                            acc += self.c[y][z][u] * self.c[x][u][w];
                            acc += self.c[z][x][u] * self.c[y][u][w];
                            acc += self.c[x][y][u] * self.c[z][u][w];
                        }
                        worst = worst.max(acc.abs());
                    }
                }
            }
        }
        worst as f64
    }

    pub fn antisymmetry_residual(&self) -> f64 {
        let mut worst = 0i64;
        for x in 0..6 {
            for y in 0..6 {
                for z in 0..6 {
                    worst = worst.max((self.c[x][y][z] + self.c[y][x][z]).abs());
                }
            }
        }
        worst as f64
    }
}

// --- the representation ------------------------------------------------------------------

/// Coordinate multiplication in physical space.
fn coordinate_mul<T: Real>(f: &SpectralField<T>, axis: usize) -> SpectralField<T> {
    f.applied(&MultiplierSpec::Coordinate { axis })
}

/// Linear representation on the four-component phase space.
pub fn t1_apply<T: Real>(x: Generator, f: &PhaseState<T>) -> PhaseState<T> {
    let grid = f.grid().clone();
    let mut out = PhaseState::zeros(&grid, f.mass());
    for j in FieldId::BOTH {
        let m = j.mass(f.mass());
        for s in Sign::BOTH {
            let comp = f.comp(j, s);
            let result = match x {
                // i eps omega_{jm}
                Generator::P0 => {
                    let mut v = comp.applied(&MultiplierSpec::Omega { mass: m, power: T::one() });
                    v.scale(C::new(T::zero(), s.factor()));
                    v
                }
                Generator::P1 => comp.derivative(0),
                Generator::P2 => comp.derivative(1),
                // x1 d2 - x2 d1
                Generator::R => {
                    let mut v = coordinate_mul(&comp.derivative(1), 0);
                    v.axpy(
                        C::new(-T::one(), T::zero()),
                        &coordinate_mul(&comp.derivative(0), 1),
                    );
                    v
                }
                // i eps omega_{jm} (x_n .)
                Generator::N1 | Generator::N2 => {
                    let axis = if x == Generator::N1 { 0 } else { 1 };
                    let mut v = coordinate_mul(comp, axis).applied(&MultiplierSpec::Omega {
                        mass: m,
                        power: T::one(),
                    });
                    v.scale(C::new(T::zero(), s.factor()));
                    v
                }
            };
            *out.comp_mut(j, s) = result;
        }
    }
    out
}

/// Quadratic part, as a symmetric bilinear map. Only the time translation
/// and the boosts carry a nonlinear piece; the boosts weight the source by
/// the coordinate.
pub fn t2_bilinear<T: Real>(
    x: Generator,
    kind: SystemKind,
    f: &PhaseState<T>,
    h: &PhaseState<T>,
) -> PhaseState<T> {
    match x {
        Generator::P1 | Generator::P2 | Generator::R => {
            PhaseState::zeros(f.grid(), f.mass())
        }
        Generator::P0 => nonlinear_bilinear(kind, f, h),
        Generator::N1 | Generator::N2 => {
            let axis = if x == Generator::N1 { 0 } else { 1 };
            let mut src = nonlinear_bilinear(kind, f, h);
            let target = kind.source_field();
            for s in Sign::BOTH {
                *src.comp_mut(target, s) = coordinate_mul(src.comp(target, s), axis);
            }
            src
        }
    }
}

pub fn t2_apply<T: Real>(x: Generator, kind: SystemKind, f: &PhaseState<T>) -> PhaseState<T> {
    t2_bilinear(x, kind, f, f)
}

/// Full nonlinear representation `T_X = T1_X + T2_X`.
pub fn t_apply<T: Real>(x: Generator, kind: SystemKind, f: &PhaseState<T>) -> PhaseState<T> {
    let mut out = t1_apply(x, f);
    let quad = t2_apply(x, kind, f);
    out.axpy(C::new(T::one(), T::zero()), &quad);
    out
}

/// Frechet derivative of `T_X` at `f` in direction `h`:
/// `T1_X h + 2 B_X(f, h)`.
pub fn dt_apply<T: Real>(
    x: Generator,
    kind: SystemKind,
    f: &PhaseState<T>,
    h: &PhaseState<T>,
) -> PhaseState<T> {
    let mut out = t1_apply(x, h);
    let bil = t2_bilinear(x, kind, f, h);
    out.axpy(C::new(T::two(), T::zero()), &bil);
    out
}

/// Enveloping-algebra extension on words of length at most 2, peeling the
/// last letter: `T_{YX} = DT_Y . T_X`.
pub fn t_word<T: Real>(word: &Word, kind: SystemKind, f: &PhaseState<T>) -> PhaseState<T> {
    match word.0.len() {
        0 => f.clone(),
        1 => t_apply(word.0[0], kind, f),
        2 => {
            let inner = t_apply(word.0[1], kind, f);
            dt_apply(word.0[0], kind, f, &inner)
        }
        n => panic!("words of length {n} not supported (desk-scale limit is 2)"),
    }
}

/// Residual of the representation property
/// `(DT_X.T_Y - DT_Y.T_X)(f) = T_{[X,Y]}(f)`, relative to the size of the
/// participating terms. With `linear_only` the quadratic part is dropped on
/// both sides, which validates the structure table against the linear
/// representation alone.
pub fn bracket_check<T: Real>(
    x: Generator,
    y: Generator,
    kind: SystemKind,
    f: &PhaseState<T>,
    table: &StructureTable,
    linear_only: bool,
) -> T {
    let (lhs_xy, lhs_yx) = if linear_only {
        (
            t1_apply(x, &t1_apply(y, f)),
            t1_apply(y, &t1_apply(x, f)),
        )
    } else {
        (
            dt_apply(x, kind, f, &t_apply(y, kind, f)),
            dt_apply(y, kind, f, &t_apply(x, kind, f)),
        )
    };
    let mut rhs = PhaseState::zeros(f.grid(), f.mass());
    for (z, &g) in Generator::ALL.iter().enumerate() {
        let coef = table.c[x.index()][y.index()][z];
        if coef != 0 {
            let tz = if linear_only {
                t1_apply(g, f)
            } else {
                t_apply(g, kind, f)
            };
            rhs.axpy(C::new(T::of(coef as f64), T::zero()), &tz);
        }
    }
    let mut lhs = lhs_xy.clone();
    lhs.axpy(C::new(-T::one(), T::zero()), &lhs_yx);
    let residual = e_norm_diff(&lhs, &rhs);
    let scale = e_norm(&lhs_xy)
        .max(e_norm(&lhs_yx))
        .max(e_norm(&rhs))
        .max(T::of(1e-300));
    residual / scale
}

// --- group-level intertwining -------------------------------------------------------------

/// Translation element used by the intertwining check.
#[derive(Clone, Copy, Debug)]
pub enum Translation<T: Real> {
    Space([T; 2]),
    Time(T),
}

/// `|| U_g(Omega(f)) - Omega(U1_g f) ||_E` for a space or time translation:
/// both sides computed independently through the wave operator; the group
/// action is the exact spectral shift for space, the nonlinear flow against
/// the free flow for time.
pub fn intertwine_check<T: Real>(
    kind: SystemKind,
    data: &ScatteringData<T>,
    g: Translation<T>,
    params: &WaveOpParams<T>,
) -> Result<T> {
    let base = wave_operator(kind, data, params)?;
    match g {
        Translation::Space(s) => {
            let mut lhs = base.a0.clone();
            for j in FieldId::BOTH {
                for sg in Sign::BOTH {
                    let mut c = lhs.comp(j, sg).clone();
                    for (l, kx, ky) in lhs.grid().modes() {
                        c.coef_mut()[l] *= C::from_polar(T::one(), kx * s[0] + ky * s[1]);
                    }
                    *lhs.comp_mut(j, sg) = c;
                }
            }
            let shifted = data.translated(s);
            let rhs = wave_operator(kind, &shifted, params)?;
            Ok(e_norm_diff(&lhs, &rhs.a0))
        }
        Translation::Time(s0) => {
            if s0.abs() > T::one() {
                return Err(Error::Invalid(
                    "time-translation check restricted to |s| <= 1".into(),
                ));
            }
            // U_{s0} Omega(f): nonlinear flow from the constructed datum
            let steps = (s0.abs() / params.dt).ceil();
            let dt_local = s0.abs() / steps;
            let lhs = integrate(
                kind,
                &base.a0,
                T::zero(),
                s0,
                dt_local,
                usize::MAX,
                |_, _| {},
            )?;
            // Omega(V(s0) f)
            let shifted = data.time_shifted(s0);
            let rhs = wave_operator(kind, &shifted, params)?;
            Ok(e_norm_diff(&lhs, &rhs.a0))
        }
    }
}
