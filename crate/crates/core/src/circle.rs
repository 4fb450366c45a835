//! Exact rational points of the unit circle and their embedding as rotation
//! matrices.
//!
//! A circle point is a pair `(c, s)` with `c² + s² = 1`; multiplication is
//! the angle-addition law, so the rational points form a group (the rational
//! solutions are dense — every Pythagorean ratio appears).

use num_traits::{One, Zero};

use crate::qmat::QMat;
use crate::ratio::{qi, Q};
use crate::{Error, Result};

/// A rational point `(cos, sin)` on the unit circle.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CirclePoint {
    c: Q,
    s: Q,
}

impl CirclePoint {
    pub fn new(c: Q, s: Q) -> Result<CirclePoint> {
        if &c * &c + &s * &s != qi(1) {
            return Err(Error::invalid_input(format!(
                "({}, {}) is not on the unit circle",
                crate::ratio::q_to_string(&c),
                crate::ratio::q_to_string(&s)
            )));
        }
        Ok(CirclePoint { c, s })
    }

    /// The identity rotation `(1, 0)`.
    pub fn one() -> CirclePoint {
        CirclePoint {
            c: Q::one(),
            s: Q::zero(),
        }
    }

    /// Rational parametrization: `t ↦ ((1-t²)/(1+t²), 2t/(1+t²))`.
    /// Every rational circle point except `(-1, 0)` arises this way.
    pub fn from_parameter(t: &Q) -> CirclePoint {
        let t2 = t * t;
        let den = Q::one() + &t2;
        CirclePoint {
            c: (Q::one() - &t2) / &den,
            s: (qi(2) * t) / den,
        }
    }

    pub fn cos(&self) -> &Q {
        &self.c
    }

    pub fn sin(&self) -> &Q {
        &self.s
    }

    /// Angle addition.
    pub fn mul(&self, other: &CirclePoint) -> CirclePoint {
        CirclePoint {
            c: &self.c * &other.c - &self.s * &other.s,
            s: &self.c * &other.s + &self.s * &other.c,
        }
    }

    /// The inverse rotation `(c, -s)`.
    pub fn inverse(&self) -> CirclePoint {
        CirclePoint {
            c: self.c.clone(),
            s: -self.s.clone(),
        }
    }
}

/// Embed a circle point as the block-diagonal rotation of `ℝ^{2d}` acting by
/// the same angle on each of the `d` coordinate planes — the diagonal circle
/// inside the unitary, hence special orthogonal, group.
pub fn embed_circle(theta: &CirclePoint, d: usize) -> QMat {
    let mut m = QMat::zero(2 * d, 2 * d);
    for k in 0..d {
        *m.at_mut(2 * k, 2 * k) = theta.c.clone();
        *m.at_mut(2 * k, 2 * k + 1) = -theta.s.clone();
        *m.at_mut(2 * k + 1, 2 * k) = theta.s.clone();
        *m.at_mut(2 * k + 1, 2 * k + 1) = theta.c.clone();
    }
    m
}
