use crate::error::{Error, Result};

/// Plane rotation `[[c, s], [-s, c]]` mapping `(a, b)` to `(r, 0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation {
    pub c: f64,
    pub s: f64,
    pub r: f64,
}

/// `r = sqrt(a^2 + b^2)`, `c = a / r`, `s = b / r`. The sign of `c` follows `a`.
pub fn givens(a: f64, b: f64) -> Result<Rotation> {
    let r = a.hypot(b);
    if r == 0.0 {
        return Err(Error::DegenerateRotation);
    }
    Ok(Rotation {
        c: a / r,
        s: b / r,
        r,
    })
}

/// One step of the squared residual-fraction recurrence for a block:
/// `s^2 mu - 2 s c theta + c^2 psi`, clamped into `[0, 1]`.
pub fn update_block_fraction(mu: f64, theta: f64, psi: f64, c: f64, s: f64) -> f64 {
    (s * s * mu - 2.0 * s * c * theta + c * c * psi).clamp(0.0, 1.0)
}
