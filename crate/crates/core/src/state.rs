//! Fundamental-system state matrices and propagated trajectories.

use num_complex::Complex64;

use crate::propagate::Direction;

/// Two solutions stored as `(value, derivative)` columns at position `x`.
///
/// For the initial data `H_alpha` the columns are `(u_alpha, w_alpha)`; the
/// determinant is their Wronskian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateMatrix {
    pub x: f64,
    pub cols: [[Complex64; 2]; 2],
}

impl StateMatrix {
    pub fn new(x: f64, first: [Complex64; 2], second: [Complex64; 2]) -> Self {
        Self {
            x,
            cols: [first, second],
        }
    }

    pub fn from_real(x: f64, first: [f64; 2], second: [f64; 2]) -> Self {
        let c = |v: [f64; 2]| [Complex64::new(v[0], 0.0), Complex64::new(v[1], 0.0)];
        Self::new(x, c(first), c(second))
    }

    /// `W_alpha(-S) = H_alpha`: columns `u_alpha = (cos a, -sin a)`, `w_alpha = (sin a, cos a)`.
    pub fn initial_h_alpha(x: f64, alpha: f64) -> Self {
        let (s, c) = if alpha == 0.0 {
            (0.0, 1.0)
        } else {
            alpha.sin_cos()
        };
        Self::from_real(x, [c, -s], [s, c])
    }

    pub fn value(&self, col: usize) -> Complex64 {
        self.cols[col][0]
    }

    pub fn derivative(&self, col: usize) -> Complex64 {
        self.cols[col][1]
    }

    /// Wronskian of the two columns.
    pub fn det(&self) -> Complex64 {
        self.cols[0][0] * self.cols[1][1] - self.cols[1][0] * self.cols[0][1]
    }

    /// Floating-point floor for evaluating `det`: the size of the products it cancels.
    pub fn det_scale(&self) -> f64 {
        (self.cols[0][0] * self.cols[1][1]).norm() + (self.cols[1][0] * self.cols[0][1]).norm()
    }

    pub fn is_finite(&self) -> bool {
        self.cols
            .iter()
            .flatten()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Relative Wronskian tolerance along a propagation.
pub const WRONSKIAN_TOLERANCE: f64 = 1e-10;

/// Drift of `det` relative to the initial determinant, with the rounding floor
/// of the determinant evaluation (`64 eps` times the cancelled products) removed.
///
/// Values `<= 1` mean the state satisfies the Wronskian invariant at tolerance
/// [`WRONSKIAN_TOLERANCE`].
pub fn wronskian_drift_ratio(initial_det: Complex64, state: &StateMatrix) -> f64 {
    drift_ratio_with_scale(initial_det, state, state.det_scale())
}

fn drift_ratio_with_scale(initial_det: Complex64, state: &StateMatrix, scale: f64) -> f64 {
    let allowed = WRONSKIAN_TOLERANCE * initial_det.norm() + 64.0 * f64::EPSILON * scale;
    (state.det() - initial_det).norm() / allowed
}

/// States at every integration node, ordered by increasing `x`.
///
/// The origin appears twice: the left limit `0-` followed by the right limit `0+`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub lambda: Complex64,
    pub nodes: Vec<StateMatrix>,
    /// Requested sample points, in the order they were requested.
    pub samples: Vec<StateMatrix>,
    pub(crate) origin_left: usize,
    pub(crate) direction: Direction,
}

impl Trajectory {
    pub fn at_left_end(&self) -> &StateMatrix {
        &self.nodes[0]
    }

    pub fn at_right_end(&self) -> &StateMatrix {
        self.nodes.last().expect("trajectory has nodes")
    }

    pub fn at_origin_left(&self) -> &StateMatrix {
        &self.nodes[self.origin_left]
    }

    pub fn at_origin_right(&self) -> &StateMatrix {
        &self.nodes[self.origin_left + 1]
    }

    /// Nodes on `[-S, 0-]`.
    pub fn left_half(&self) -> &[StateMatrix] {
        &self.nodes[..=self.origin_left]
    }

    /// Nodes on `[0+, S]`.
    pub fn right_half(&self) -> &[StateMatrix] {
        &self.nodes[self.origin_left + 1..]
    }

    /// Largest Wronskian drift ratio over all nodes and samples, measured
    /// against the determinant at the starting end.
    ///
    /// Rounding committed where the solution was large persists once it decays,
    /// so each state's floor uses the largest `det_scale` met since the start.
    pub fn max_wronskian_drift(&self, initial_det: Complex64) -> f64 {
        let forward = self.direction == Direction::LeftToRight;
        let mut peaks = vec![0.0; self.nodes.len()];
        let mut peak = 0.0f64;
        let order: Vec<usize> = if forward {
            (0..self.nodes.len()).collect()
        } else {
            (0..self.nodes.len()).rev().collect()
        };
        for &i in &order {
            peak = peak.max(self.nodes[i].det_scale());
            peaks[i] = peak;
        }
        let nodes = self
            .nodes
            .iter()
            .zip(&peaks)
            .map(|(s, &p)| drift_ratio_with_scale(initial_det, s, p));
        let samples = self.samples.iter().map(|s| {
            // peak over the nodes already passed when the sample is reached
            let before = if forward {
                let passed = self.nodes.partition_point(|n| n.x <= s.x);
                passed.checked_sub(1).map_or(0.0, |i| peaks[i])
            } else {
                let first = self.nodes.partition_point(|n| n.x < s.x);
                peaks.get(first).copied().unwrap_or(0.0)
            };
            drift_ratio_with_scale(initial_det, s, before.max(s.det_scale()))
        });
        nodes.chain(samples).fold(0.0, f64::max)
    }
}
