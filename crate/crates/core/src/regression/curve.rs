use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Deepest dyadic partition a curve may use (2^20 cells).
pub const MAX_CURVE_DEPTH: u32 = 20;

/// A step function on `[0, 1]`, constant on each of the `2^depth` dyadic
/// cells `[i/2^depth, (i+1)/2^depth)`; `x = 1` belongs to the last cell.
#[derive(Debug, Clone, PartialEq)]
pub struct StepCurve {
    depth: u32,
    values: Vec<f64>,
}

impl StepCurve {
    pub fn new(depth: u32, values: Vec<f64>) -> Result<Self> {
        if depth > MAX_CURVE_DEPTH {
            return Err(Error::InvalidCurve(format!("depth {depth} exceeds {MAX_CURVE_DEPTH}")));
        }
        if values.len() != 1usize << depth {
            return Err(Error::InvalidCurve(format!(
                "depth {depth} needs {} values, got {}",
                1usize << depth,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidCurve("values must be finite".into()));
        }
        Ok(StepCurve { depth, values })
    }

    pub fn constant(c: f64) -> Self {
        StepCurve { depth: 0, values: alloc::vec![c] }
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Whether the curve has a jump at every one of its `2^depth - 1`
    /// junctions, i.e. lies in the model of its own depth.
    pub fn is_strict_member(&self) -> bool {
        self.values.windows(2).all(|w| w[0] != w[1])
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(x));
        }
        Ok(self.values[cell_index(x, self.depth)])
    }

    /// Values on the finer partition of depth `depth >= self.depth()`.
    pub fn refined(&self, depth: u32) -> Vec<f64> {
        debug_assert!(depth >= self.depth);
        let shift = depth - self.depth;
        (0..1usize << depth).map(|i| self.values[i >> shift]).collect()
    }
}

/// Index of the depth-`depth` cell containing `x` in `[0, 1]`.
pub fn cell_index(x: f64, depth: u32) -> usize {
    let cells = 1usize << depth;
    ((x * cells as f64) as usize).min(cells - 1)
}

/// Free-function form of [`StepCurve::eval`].
pub fn eval_step(f: &StepCurve, x: f64) -> Result<f64> {
    f.eval(x)
}

/// `∫_0^1 |f(x) - g(x)|^2 dx`, exact on the common dyadic refinement.
pub fn l2_distance_sq(f: &StepCurve, g: &StepCurve) -> f64 {
    let depth = f.depth.max(g.depth);
    let (sf, sg) = (depth - f.depth, depth - g.depth);
    let sum: f64 = (0..1usize << depth)
        .map(|i| {
            let d = f.values[i >> sf] - g.values[i >> sg];
            d * d
        })
        .sum();
    sum / (1usize << depth) as f64
}
