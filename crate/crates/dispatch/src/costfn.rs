//! Strongly convex scalar costs used for SoC, generation and ramping.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CostError {
    #[error("no bracket for derivative value {m} within |v| <= {bound}")]
    BracketFailure { m: f64, bound: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CostFunction {
    /// gain * (v - center)^2
    Quadratic { gain: f64, center: f64 },
    /// kappa1 * (v/capacity)^8 + kappa2 * (v/capacity)^2
    ScaledPolynomial {
        kappa1: f64,
        kappa2: f64,
        capacity: f64,
    },
}

impl CostFunction {
    pub fn quadratic(gain: f64) -> Self {
        CostFunction::Quadratic { gain, center: 0.0 }
    }

    pub fn quadratic_centered(gain: f64, center: f64) -> Self {
        CostFunction::Quadratic { gain, center }
    }

    pub fn scaled_polynomial(kappa1: f64, kappa2: f64, capacity: f64) -> Self {
        CostFunction::ScaledPolynomial {
            kappa1,
            kappa2,
            capacity,
        }
    }

    pub fn center(&self) -> f64 {
        match *self {
            CostFunction::Quadratic { center, .. } => center,
            CostFunction::ScaledPolynomial { .. } => 0.0,
        }
    }

    pub fn eval(&self, v: f64) -> f64 {
        match *self {
            CostFunction::Quadratic { gain, center } => gain * (v - center).powi(2),
            CostFunction::ScaledPolynomial {
                kappa1,
                kappa2,
                capacity,
            } => {
                let r = v / capacity;
                let r2 = r * r;
                kappa1 * (r2 * r2).powi(2) + kappa2 * r2
            }
        }
    }

    pub fn d1(&self, v: f64) -> f64 {
        match *self {
            CostFunction::Quadratic { gain, center } => 2.0 * gain * (v - center),
            CostFunction::ScaledPolynomial {
                kappa1,
                kappa2,
                capacity,
            } => {
                let r = v / capacity;
                (8.0 * kappa1 * r.powi(7) + 2.0 * kappa2 * r) / capacity
            }
        }
    }

    pub fn d2(&self, v: f64) -> f64 {
        match *self {
            CostFunction::Quadratic { gain, .. } => 2.0 * gain,
            CostFunction::ScaledPolynomial {
                kappa1,
                kappa2,
                capacity,
            } => {
                let r = v / capacity;
                (56.0 * kappa1 * r.powi(6) + 2.0 * kappa2) / (capacity * capacity)
            }
        }
    }

    /// Lower bound on the second derivative (zero if not strongly convex).
    pub fn strong_convexity(&self) -> f64 {
        match *self {
            CostFunction::Quadratic { gain, .. } => 2.0 * gain,
            CostFunction::ScaledPolynomial {
                kappa2, capacity, ..
            } => 2.0 * kappa2 / (capacity * capacity),
        }
    }

    /// Default half-width of the search interval for `inv_d1`.
    pub fn default_bracket(&self) -> f64 {
        match *self {
            CostFunction::Quadratic { center, .. } => 10.0 * (1.0 + center.abs()),
            CostFunction::ScaledPolynomial { capacity, .. } => 10.0 * capacity,
        }
    }

    /// Solves d1(v) = m.
    pub fn inv_d1(&self, m: f64) -> Result<f64, CostError> {
        self.inv_d1_within(m, self.default_bracket())
    }

    /// Solves d1(v) = m with |v - center| <= bound for the iterative case.
    pub fn inv_d1_within(&self, m: f64, bound: f64) -> Result<f64, CostError> {
        match *self {
            CostFunction::Quadratic { gain, center } => {
                if gain > 0.0 {
                    Ok(center + m / (2.0 * gain))
                } else if m == 0.0 {
                    Ok(center)
                } else {
                    Err(CostError::BracketFailure { m, bound })
                }
            }
            CostFunction::ScaledPolynomial {
                kappa1,
                kappa2,
                capacity,
            } => poly_inverse(kappa1, kappa2, capacity, m, bound, self),
        }
    }
}

fn poly_inverse(
    kappa1: f64,
    kappa2: f64,
    capacity: f64,
    m: f64,
    bound: f64,
    c: &CostFunction,
) -> Result<f64, CostError> {
    if m == 0.0 {
        return Ok(0.0);
    }
    // d1 is odd, so solve for |m| on [0, bound] and restore the sign.
    let target = m.abs();
    let tol = 1e-12 * (1.0 + target);
    if !(c.d1(bound) >= target - tol) {
        return Err(CostError::BracketFailure { m, bound });
    }
    // Either term alone over-estimates the root; the smaller estimate sits to its right.
    let mut guess = bound;
    if kappa2 > 0.0 {
        guess = guess.min(target * capacity * capacity / (2.0 * kappa2));
    }
    if kappa1 > 0.0 {
        guess = guess.min(capacity * (target * capacity / (8.0 * kappa1)).powf(1.0 / 7.0));
    }
    let (mut lo, mut hi) = (0.0_f64, bound);
    let mut v = guess;
    for _ in 0..200 {
        let f = c.d1(v) - target;
        if f.abs() <= tol {
            return Ok(v.copysign(m));
        }
        if f > 0.0 {
            hi = hi.min(v);
        } else {
            lo = lo.max(v);
        }
        let d = c.d2(v);
        let mut next = if d > 0.0 { v - f / d } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if next == v || hi - lo <= f64::EPSILON * hi {
            return Ok(next.copysign(m));
        }
        v = next;
    }
    Ok(v.copysign(m))
}
