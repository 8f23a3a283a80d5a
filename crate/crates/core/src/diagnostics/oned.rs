//! Closed forms for the log barrier of a single interval `(α, β)`.
//!
//! With `p(x) = (x−α)⁻² + (β−x)⁻²` the map `f(x) = ∫ √p` is an isometry
//! onto the real line, so geodesics and the walk's one-step density are
//! explicit in terms of `f` and `f⁻¹`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneDimBarrier {
    pub alpha: f64,
    pub beta: f64,
}

impl OneDimBarrier {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha < beta) || !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidInput("interval needs finite alpha < beta".into()));
        }
        Ok(Self { alpha, beta })
    }

    fn check(&self, x: f64) -> Result<()> {
        if x > self.alpha && x < self.beta {
            Ok(())
        } else {
            Err(Error::NotInterior {
                min_slack: (x - self.alpha).min(self.beta - x),
            })
        }
    }

    /// `φ''(x)`.
    pub fn p(&self, x: f64) -> f64 {
        (x - self.alpha).powi(-2) + (self.beta - x).powi(-2)
    }

    /// `p'(x)`.
    pub fn dp(&self, x: f64) -> f64 {
        -2.0 * (x - self.alpha).powi(-3) + 2.0 * (self.beta - x).powi(-3)
    }

    /// Normalised slacks `a = (x−α)/w`, `b = (β−x)/w` with `w = β − α`.
    fn slacks(&self, x: f64) -> (f64, f64) {
        let w = self.beta - self.alpha;
        ((x - self.alpha) / w, (self.beta - x) / w)
    }

    /// `f(x) = ∫_{mid}^{x} √p`, anchored at the midpoint.
    ///
    /// In normalised slacks `f' = √(a² + b²)/(ab)`, which has the
    /// elementary antiderivative used here.
    pub fn f(&self, x: f64) -> Result<f64> {
        self.check(x)?;
        let (a, b) = self.slacks(x);
        Ok(antiderivative(a, b))
    }

    /// `f⁻¹(u)` by safeguarded Newton iteration in the normalised slack.
    /// Fails when the preimage is numerically on the boundary.
    pub fn f_inv(&self, u: f64) -> Result<f64> {
        if !u.is_finite() {
            return Err(Error::NonFinite("isometry argument"));
        }
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        let mut a = 0.5;
        for _ in 0..300 {
            let b = 1.0 - a;
            let r = antiderivative(a, b) - u;
            if r < 0.0 {
                lo = a;
            } else {
                hi = a;
            }
            let next = a - r * a * b / (a * a + b * b).sqrt();
            let next = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
            if next == a || hi - lo <= f64::EPSILON * a.min(b) {
                break;
            }
            a = next;
        }
        let x = self.alpha + (self.beta - self.alpha) * a;
        if a <= 0.0 || a >= 1.0 || x <= self.alpha || x >= self.beta {
            return Err(Error::GeodesicExit);
        }
        Ok(x)
    }
}

/// `∫_{1/2}^{a} √(t² + (1−t)²)/(t(1−t)) dt`, with `b = 1 − a` passed
/// separately to keep precision near `a = 1`.
fn antiderivative(a: f64, b: f64) -> f64 {
    let q = (a * a + b * b).sqrt();
    let s = 2.0 * std::f64::consts::SQRT_2 * q;
    -std::f64::consts::FRAC_1_SQRT_2 * ((s + 2.0 * (a - b)).ln() - (s + 2.0 * (b - a)).ln()) - ((q + b) / a).ln()
        + ((q + a) / b).ln()
}

/// `exp_x(t·v) = f⁻¹(f(x) + √p(x)·t·v)`.
pub fn oned_geodesic(bar: &OneDimBarrier, x: f64, v: f64, t: f64) -> Result<f64> {
    bar.check(x)?;
    if v == 0.0 || t == 0.0 {
        return Ok(x);
    }
    bar.f_inv(bar.f(x)? + bar.p(x).sqrt() * t * v)
}

/// Log of `p(x→y) = √(p(y)/2πh)·exp[−(f(x) − h·p'(x)/(4p^{3/2}(x)) − f(y))²/(2h)]`.
pub fn oned_transition_log_density(bar: &OneDimBarrier, x: f64, y: f64, h: f64) -> Result<f64> {
    bar.check(x)?;
    bar.check(y)?;
    let px = bar.p(x);
    let shift = h * bar.dp(x) / (4.0 * px.powf(1.5));
    let r = bar.f(x)? - shift - bar.f(y)?;
    Ok(0.5 * (bar.p(y) / (2.0 * std::f64::consts::PI * h)).ln() - r * r / (2.0 * h))
}

pub fn oned_transition_density(bar: &OneDimBarrier, x: f64, y: f64, h: f64) -> Result<f64> {
    oned_transition_log_density(bar, x, y, h).map(f64::exp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isometry_round_trip() {
        let b = OneDimBarrier::new(-1.0, 2.0).unwrap();
        for x in [-0.99, -0.3, 0.5, 1.7, 1.999] {
            let u = b.f(x).unwrap();
            assert!((b.f(b.f_inv(u).unwrap()).unwrap() - u).abs() < 1e-10);
        }
    }

    #[test]
    fn antiderivative_matches_quadrature() {
        use crate::diagnostics::integrate_adaptive;
        let b = OneDimBarrier::new(-1.0, 2.0).unwrap();
        for x in [-0.999, -0.4, 0.5, 1.2, 1.99] {
            let q = integrate_adaptive(|t| b.p(t).sqrt(), 0.5_f64.min(x), 0.5_f64.max(x), 1e-14);
            let q = if x < 0.5 { -q } else { q };
            assert!((b.f(x).unwrap() - q).abs() < 1e-10 * q.abs().max(1.0), "{x}");
        }
    }

    #[test]
    fn far_preimage_is_an_exit() {
        let b = OneDimBarrier::new(0.0, 1.0).unwrap();
        assert_eq!(b.f_inv(1e4).unwrap_err(), Error::GeodesicExit);
        let x = b.f_inv(-30.0).unwrap();
        assert!(x > 0.0 && (b.f(x).unwrap() + 30.0).abs() < 1e-9);
    }

    #[test]
    fn geodesic_is_odd_at_center() {
        let b = OneDimBarrier::new(-1.0, 1.0).unwrap();
        assert_eq!(oned_geodesic(&b, 0.0, 0.0, 3.0).unwrap(), 0.0);
        let a = oned_geodesic(&b, 0.0, 0.4, 1.0).unwrap();
        let c = oned_geodesic(&b, 0.0, -0.4, 1.0).unwrap();
        assert!((a + c).abs() < 1e-12);
    }

    #[test]
    fn density_at_center() {
        let b = OneDimBarrier::new(-1.0, 1.0).unwrap();
        let h = 0.01;
        let d = oned_transition_density(&b, 0.0, 0.0, h).unwrap();
        assert!((d - (1.0 / (std::f64::consts::PI * h)).sqrt()).abs() < 1e-10);
    }
}
