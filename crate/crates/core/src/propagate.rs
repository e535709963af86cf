//! Fixed-step fourth-order Magnus integration of `-y'' + q y = lambda y` on
//! `[-S, 0-]` and `[0+, S]`, with the transfer jump applied exactly at the origin.
//!
//! Each step is the exponential of a traceless 2x2 matrix, so the step
//! propagator has unit determinant and the Wronskian is conserved up to
//! rounding. For an identically zero potential the exponential is exact and
//! each half is crossed in a single step when only the end states are needed.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::problem::{Potential, Problem, TransferMatrix};
use crate::state::{StateMatrix, Trajectory};

pub const DEFAULT_STEPS: usize = 2000;

const SQRT3: f64 = 1.732_050_807_568_877_2;
const GAUSS_LO: f64 = 0.5 - SQRT3 / 6.0;
const GAUSS_HI: f64 = 0.5 + SQRT3 / 6.0;

/// Field over which states are propagated: `f64` for real `lambda`, `Complex64` otherwise.
pub trait Scalar:
    Copy
    + Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Mul<f64, Output = Self>
    + Neg<Output = Self>
{
    fn real(v: f64) -> Self;
    /// `(cosh(sqrt z), sinh(sqrt z) / sqrt z)`; both are even in `sqrt z`.
    fn cosh_sinhc(z: Self) -> (Self, Self);
    fn finite(self) -> bool;
    fn to_complex(self) -> Complex64;
}

impl Scalar for f64 {
    fn real(v: f64) -> Self {
        v
    }

    #[inline]
    fn cosh_sinhc(z: f64) -> (f64, f64) {
        if z.abs() < 1e-3 {
            let ch = 1.0 + z * (0.5 + z * (1.0 / 24.0 + z / 720.0));
            let sc = 1.0 + z * (1.0 / 6.0 + z * (1.0 / 120.0 + z / 5040.0));
            (ch, sc)
        } else if z > 0.0 {
            let s = z.sqrt();
            (s.cosh(), s.sinh() / s)
        } else {
            let s = (-z).sqrt();
            let (sn, cs) = s.sin_cos();
            (cs, sn / s)
        }
    }

    fn finite(self) -> bool {
        self.is_finite()
    }

    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
}

impl Scalar for Complex64 {
    fn real(v: f64) -> Self {
        Complex64::new(v, 0.0)
    }

    #[inline]
    fn cosh_sinhc(z: Complex64) -> (Complex64, Complex64) {
        if z.norm() < 1e-3 {
            let ch = 1.0 + z * (0.5 + z * (1.0 / 24.0 + z / 720.0));
            let sc = 1.0 + z * (1.0 / 6.0 + z * (1.0 / 120.0 + z / 5040.0));
            (ch, sc)
        } else {
            let s = z.sqrt();
            (s.cosh(), s.sinh() / s)
        }
    }

    fn finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    fn to_complex(self) -> Complex64 {
        self
    }
}

/// Potential values at the two Gauss nodes of every step on each half.
#[derive(Debug, Clone)]
pub(crate) struct GaussTable {
    pub steps: usize,
    pub h: f64,
    pub left: Vec<[f64; 2]>,
    pub right: Vec<[f64; 2]>,
    pub zero: bool,
}

impl GaussTable {
    pub fn new(potential: &Potential, steps: usize) -> Self {
        let s = potential.half_width();
        let h = s / steps as f64;
        let zero = potential.is_zero();
        let sample = |start: f64, right: bool| -> Vec<[f64; 2]> {
            (0..steps)
                .map(|i| {
                    let x = start + i as f64 * h;
                    [
                        potential.eval(x + GAUSS_LO * h, right),
                        potential.eval(x + GAUSS_HI * h, right),
                    ]
                })
                .collect()
        };
        let (left, right) = if zero {
            (vec![[0.0; 2]; steps], vec![[0.0; 2]; steps])
        } else {
            (sample(-s, false), sample(0.0, true))
        };
        Self {
            steps,
            h,
            left,
            right,
            zero,
        }
    }
}

/// Which end the initial data sits at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Initial data at `x = -S`.
    LeftToRight,
    /// Initial data at `x = S`.
    RightToLeft,
}

/// Row-major step propagator `exp(Omega)` for a signed step `hs` with the
/// potential taken at the first and second Gauss node (in the direction of travel).
#[inline]
fn step_matrix<T: Scalar>(hs: f64, q1: f64, q2: f64, lambda: T) -> [[T; 2]; 2] {
    let a1 = T::real(q1) - lambda;
    let a2 = T::real(q2) - lambda;
    let c = (q1 - q2) * (SQRT3 * hs * hs / 12.0);
    let lower = (a1 + a2) * (0.5 * hs);
    let z = T::real(c * c) + lower * hs;
    let (ch, sc) = T::cosh_sinhc(z);
    [[ch + sc * c, sc * hs], [sc * lower, ch - sc * c]]
}

#[inline]
fn apply<T: Scalar>(m: &[[T; 2]; 2], col: [T; 2]) -> [T; 2] {
    [
        m[0][0] * col[0] + m[0][1] * col[1],
        m[1][0] * col[0] + m[1][1] * col[1],
    ]
}

#[inline]
fn jump<T: Scalar>(m: &TransferMatrix, col: [T; 2]) -> [T; 2] {
    let (y, dy) = m.apply(col[0], col[1]);
    [y, dy]
}

/// Sweeps one half of the interval. `forward` travels in the `+x` direction.
fn sweep_half<T: Scalar, const N: usize>(
    table: &[[f64; 2]],
    h: f64,
    zero: bool,
    lambda: T,
    forward: bool,
    cols: &mut [[T; 2]; N],
) {
    if zero {
        let len = h * table.len() as f64;
        let m = step_matrix(if forward { len } else { -len }, 0.0, 0.0, lambda);
        for col in cols.iter_mut() {
            *col = apply(&m, *col);
        }
        return;
    }
    let mut advance = |q: &[f64; 2]| {
        let m = if forward {
            step_matrix(h, q[0], q[1], lambda)
        } else {
            step_matrix(-h, q[1], q[0], lambda)
        };
        for col in cols.iter_mut() {
            *col = apply(&m, *col);
        }
    };
    if forward {
        table.iter().for_each(&mut advance);
    } else {
        table.iter().rev().for_each(&mut advance);
    }
}

/// End states of a propagation without storing the interior.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Ends<T, const N: usize> {
    pub end: [[T; 2]; N],
}

pub(crate) fn propagate_ends<T: Scalar, const N: usize>(
    problem: &Problem,
    init: [[T; 2]; N],
    lambda: T,
    direction: Direction,
) -> Result<Ends<T, N>> {
    let table = problem.table();
    let m = problem.transfer();
    let mut cols = init;
    let overflow = || Error::Overflow {
        lambda: format!("{lambda:?}"),
    };
    let finite = |c: &[[T; 2]; N]| c.iter().flatten().all(|v| v.finite());
    match direction {
        Direction::LeftToRight => {
            sweep_half(&table.left, table.h, table.zero, lambda, true, &mut cols);
            let origin = finite(&cols);
            for col in cols.iter_mut() {
                *col = jump(m, *col);
            }
            sweep_half(&table.right, table.h, table.zero, lambda, true, &mut cols);
            if !finite(&cols) || !origin {
                return Err(overflow());
            }
            Ok(Ends { end: cols })
        }
        Direction::RightToLeft => {
            sweep_half(&table.right, table.h, table.zero, lambda, false, &mut cols);
            let origin = finite(&cols);
            let inv = m.inverse();
            for col in cols.iter_mut() {
                *col = jump(&inv, *col);
            }
            sweep_half(&table.left, table.h, table.zero, lambda, false, &mut cols);
            if !finite(&cols) || !origin {
                return Err(overflow());
            }
            Ok(Ends { end: cols })
        }
    }
}

/// `integral of y^2` over `[-S, S]` for the real solution with data `init` at `-S`.
///
/// Each integration step is split into `refine` Magnus sub-steps and the
/// samples are combined with Romberg-corrected composite Simpson per half.
pub(crate) fn square_integral(
    problem: &Problem,
    init: [f64; 2],
    lambda: f64,
    refine: usize,
) -> Result<f64> {
    let refine = refine.max(1);
    let table = problem.table();
    let potential = problem.potential();
    let s = problem.half_width();
    let sub = table.h / refine as f64;
    let n = table.steps * refine;
    let mut col = init;
    let mut values = Vec::with_capacity(n + 1);
    let mut total = 0.0;
    for (half, right) in [(&table.left, false), (&table.right, true)] {
        let base = if right { 0.0 } else { -s };
        values.clear();
        values.push(col[0]);
        for (i, q) in half.iter().enumerate() {
            if refine == 1 {
                col = apply(&step_matrix(sub, q[0], q[1], lambda), col);
                values.push(col[0]);
                continue;
            }
            for k in 0..refine {
                let x = base + i as f64 * table.h + k as f64 * sub;
                let (q1, q2) = if table.zero {
                    (0.0, 0.0)
                } else {
                    (
                        potential.eval(x + GAUSS_LO * sub, right),
                        potential.eval(x + GAUSS_HI * sub, right),
                    )
                };
                col = apply(&step_matrix(sub, q1, q2, lambda), col);
                values.push(col[0]);
            }
        }
        if !col[0].is_finite() || !col[1].is_finite() {
            return Err(Error::Overflow {
                lambda: lambda.to_string(),
            });
        }
        total += romberg_simpson(&values, sub);
        if !right {
            col = jump(problem.transfer(), col);
        }
    }
    Ok(total)
}

/// Composite Simpson for `sum y_i^2` on an even number of intervals, with one
/// Richardson step against the doubled spacing when the count allows it.
fn romberg_simpson(values: &[f64], h: f64) -> f64 {
    let simpson = |stride: usize| -> f64 {
        let pts: Vec<f64> = values.iter().step_by(stride).map(|v| v * v).collect();
        let last = pts.len() - 1;
        let mut acc = pts[0] + pts[last];
        for (i, v) in pts.iter().enumerate().take(last).skip(1) {
            acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
        }
        acc * h * stride as f64 / 3.0
    };
    let intervals = values.len() - 1;
    let fine = simpson(1);
    if intervals.is_multiple_of(4) {
        fine + (fine - simpson(2)) / 15.0
    } else {
        fine
    }
}

/// Propagates a fundamental system across `[-S, S]`, returning every node and
/// the states at the requested sample points.
///
/// A sample at exactly `x = 0` reports the right limit `0+`.
pub fn propagate(
    problem: &Problem,
    init: StateMatrix,
    lambda: Complex64,
    direction: Direction,
    samples: &[f64],
) -> Result<Trajectory> {
    let s = problem.half_width();
    let start = match direction {
        Direction::LeftToRight => -s,
        Direction::RightToLeft => s,
    };
    if (init.x - start).abs() > 1e-12 * s {
        return Err(Error::Config(format!(
            "initial state at x = {} does not sit at the starting end {start}",
            init.x
        )));
    }
    if init.det().norm() == 0.0 {
        return Err(Error::Precondition(
            "initial state matrix is singular".into(),
        ));
    }
    if !(lambda.re.is_finite() && lambda.im.is_finite()) {
        return Err(Error::Precondition(format!(
            "lambda = {lambda} is not finite"
        )));
    }
    if let Some(x) = samples.iter().find(|x| !(x.abs() <= s)) {
        return Err(Error::Config(format!(
            "sample point {x} lies outside [-S, S]"
        )));
    }

    let table = problem.table();
    let h = table.h;
    let steps = table.steps;
    let m = problem.transfer();
    let mut left = Vec::with_capacity(steps + 1);
    let mut right = Vec::with_capacity(steps + 1);
    let mut cols = init.cols;

    let step_left = |i: usize, forward: bool, cols: &mut [[Complex64; 2]; 2]| {
        let q = &table.left[i];
        let mat = if forward {
            step_matrix(h, q[0], q[1], lambda)
        } else {
            step_matrix(-h, q[1], q[0], lambda)
        };
        cols[0] = apply(&mat, cols[0]);
        cols[1] = apply(&mat, cols[1]);
    };
    let step_right = |i: usize, forward: bool, cols: &mut [[Complex64; 2]; 2]| {
        let q = &table.right[i];
        let mat = if forward {
            step_matrix(h, q[0], q[1], lambda)
        } else {
            step_matrix(-h, q[1], q[0], lambda)
        };
        cols[0] = apply(&mat, cols[0]);
        cols[1] = apply(&mat, cols[1]);
    };
    let node_x = |base: f64, i: usize| {
        if i == steps {
            base + s
        } else {
            base + i as f64 * h
        }
    };

    match direction {
        Direction::LeftToRight => {
            left.push(StateMatrix { x: -s, cols });
            for i in 0..steps {
                step_left(i, true, &mut cols);
                left.push(StateMatrix {
                    x: node_x(-s, i + 1),
                    cols,
                });
            }
            for col in cols.iter_mut() {
                *col = jump(m, *col);
            }
            right.push(StateMatrix { x: 0.0, cols });
            for i in 0..steps {
                step_right(i, true, &mut cols);
                right.push(StateMatrix {
                    x: node_x(0.0, i + 1),
                    cols,
                });
            }
        }
        Direction::RightToLeft => {
            right.push(StateMatrix { x: s, cols });
            for i in (0..steps).rev() {
                step_right(i, false, &mut cols);
                right.push(StateMatrix {
                    x: node_x(0.0, i),
                    cols,
                });
            }
            let inv = m.inverse();
            for col in cols.iter_mut() {
                *col = jump(&inv, *col);
            }
            left.push(StateMatrix { x: 0.0, cols });
            for i in (0..steps).rev() {
                step_left(i, false, &mut cols);
                left.push(StateMatrix {
                    x: node_x(-s, i),
                    cols,
                });
            }
            left.reverse();
            right.reverse();
        }
    }

    if !left.iter().chain(right.iter()).all(StateMatrix::is_finite) {
        return Err(Error::Overflow {
            lambda: lambda.to_string(),
        });
    }

    let origin_left = left.len() - 1;
    let mut nodes = left;
    nodes.extend(right);

    let potential = problem.potential();
    let sampled = samples
        .iter()
        .map(|&x| sample_at(potential, &nodes, origin_left, steps, h, lambda, x))
        .collect();

    Ok(Trajectory {
        lambda,
        nodes,
        samples: sampled,
        origin_left,
        direction,
    })
}

fn sample_at(
    potential: &Potential,
    nodes: &[StateMatrix],
    origin_left: usize,
    steps: usize,
    h: f64,
    lambda: Complex64,
    x: f64,
) -> StateMatrix {
    let s = potential.half_width();
    let (base, offset, right) = if x >= 0.0 {
        (origin_left + 1, 0.0, true)
    } else {
        (0, -s, false)
    };
    let i = (((x - offset) / h).floor().max(0.0) as usize).min(steps);
    let node = nodes[base + i];
    let d = x - node.x;
    if d == 0.0 {
        return StateMatrix { x, cols: node.cols };
    }
    let q1 = potential.eval(node.x + GAUSS_LO * d, right);
    let q2 = potential.eval(node.x + GAUSS_HI * d, right);
    let mat = step_matrix(d, q1, q2, lambda);
    StateMatrix {
        x,
        cols: [apply(&mat, node.cols[0]), apply(&mat, node.cols[1])],
    }
}
