//! Brown-Conrady radial + tangential distortion in pixel units.
//!
//! Offsets are measured from the principal point in pixels and `r` is the
//! pixel distance to it, so coefficient magnitudes are much smaller than in
//! the normalized-coordinate convention (`k1 ~ 1e-7` rather than `~ 0.1`).
//! The radial polynomial scales the offset; all-zero coefficients are the
//! identity:
//!
//! ```text
//! dx = u - cx,  dy = v - cy,  r² = dx² + dy²
//! u' = cx + dx·(1 + k1·r² + k2·r⁴ + k3·r⁶) + p1·(r² + 2dx²) + 2·p2·dx·dy
//! v' = cy + dy·(1 + k1·r² + k2·r⁴ + k3·r⁶) + 2·p1·dx·dy + p2·(r² + 2dy²)
//! ```

use nalgebra::{Matrix2, Vector2};

use super::{GeometryError, Intrinsics, InvalidParameter, PixelPoint};

pub const DEFAULT_UNDISTORT_TOL: f64 = 1e-9;
pub const DEFAULT_UNDISTORT_MAX_ITER: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DistortionCoefficients {
    k1: f64,
    k2: f64,
    k3: f64,
    p1: f64,
    p2: f64,
}

impl DistortionCoefficients {
    /// The ideal lens.
    pub const ZERO: Self = Self {
        k1: 0.0,
        k2: 0.0,
        k3: 0.0,
        p1: 0.0,
        p2: 0.0,
    };

    /// Arguments follow the usual five-coefficient order `k1, k2, p1, p2, k3`.
    pub fn new(k1: f64, k2: f64, p1: f64, p2: f64, k3: f64) -> Result<Self, InvalidParameter> {
        Ok(Self {
            k1: InvalidParameter::check_finite("k1", k1)?,
            k2: InvalidParameter::check_finite("k2", k2)?,
            k3: InvalidParameter::check_finite("k3", k3)?,
            p1: InvalidParameter::check_finite("p1", p1)?,
            p2: InvalidParameter::check_finite("p2", p2)?,
        })
    }

    /// Only the leading radial term.
    pub fn radial(k1: f64) -> Result<Self, InvalidParameter> {
        Self::new(k1, 0.0, 0.0, 0.0, 0.0)
    }

    pub fn k1(&self) -> f64 {
        self.k1
    }

    pub fn k2(&self) -> f64 {
        self.k2
    }

    pub fn k3(&self) -> f64 {
        self.k3
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }

    pub fn p2(&self) -> f64 {
        self.p2
    }

    /// Coefficients in `k1, k2, p1, p2, k3` order.
    pub fn to_array(&self) -> [f64; 5] {
        [self.k1, self.k2, self.p1, self.p2, self.k3]
    }

    pub fn is_zero(&self) -> bool {
        self.to_array().iter().all(|&c| c == 0.0)
    }

    /// Every coefficient multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self, InvalidParameter> {
        Self::new(
            self.k1 * factor,
            self.k2 * factor,
            self.p1 * factor,
            self.p2 * factor,
            self.k3 * factor,
        )
    }

    fn radial_factor(&self, r2: f64) -> f64 {
        1.0 + r2 * (self.k1 + r2 * (self.k2 + r2 * self.k3))
    }

    /// d(radial_factor)/d(r²)
    fn radial_factor_slope(&self, r2: f64) -> f64 {
        self.k1 + r2 * (2.0 * self.k2 + 3.0 * r2 * self.k3)
    }

    fn offset(&self, d: Vector2<f64>) -> Vector2<f64> {
        let (dx, dy) = (d.x, d.y);
        let r2 = dx * dx + dy * dy;
        let radial = self.radial_factor(r2);
        Vector2::new(
            dx * radial + self.p1 * (r2 + 2.0 * dx * dx) + 2.0 * self.p2 * dx * dy,
            dy * radial + 2.0 * self.p1 * dx * dy + self.p2 * (r2 + 2.0 * dy * dy),
        )
    }

    fn jacobian(&self, d: Vector2<f64>) -> Matrix2<f64> {
        let (dx, dy) = (d.x, d.y);
        let r2 = dx * dx + dy * dy;
        let radial = self.radial_factor(r2);
        let slope = self.radial_factor_slope(r2);
        let cross = 2.0 * dx * dy * slope + 2.0 * self.p1 * dy + 2.0 * self.p2 * dx;
        Matrix2::new(
            radial + 2.0 * dx * dx * slope + 6.0 * self.p1 * dx + 2.0 * self.p2 * dy,
            cross,
            cross,
            radial + 2.0 * dy * dy * slope + 2.0 * self.p1 * dx + 6.0 * self.p2 * dy,
        )
    }

    /// Whether the lens map is locally one-to-one and orientation preserving
    /// at this offset, i.e. on the unfolded side of the radial polynomial.
    fn is_invertible_at(&self, d: Vector2<f64>) -> bool {
        let r2 = d.norm_squared();
        let radial = self.radial_factor(r2);
        radial > 0.0
            && radial + 2.0 * r2 * self.radial_factor_slope(r2) > 0.0
            && self.jacobian(d).determinant() > 0.0
    }
}

/// Applies the lens distortion to an ideal pinhole pixel.
pub fn distort(p: PixelPoint, k: &Intrinsics, d: &DistortionCoefficients) -> PixelPoint {
    if d.is_zero() {
        return p;
    }
    let out = d.offset(Vector2::new(p.u - k.cx(), p.v - k.cy()));
    PixelPoint::new(k.cx() + out.x, k.cy() + out.y)
}

/// Inverts [`distort`] by Newton iteration on the pixel offset, starting from
/// the distorted pixel itself.
///
/// Succeeds when `distort(result)` lies within `tol` pixels of `p`. Fails with
/// [`GeometryError::NonConvergent`] when the iteration cap is hit or when the
/// only solution found lies past the fold of the radial polynomial, where the
/// lens map is no longer one-to-one.
pub fn undistort(
    p: PixelPoint,
    k: &Intrinsics,
    d: &DistortionCoefficients,
    tol: f64,
    max_iter: usize,
) -> Result<PixelPoint, GeometryError> {
    if d.is_zero() {
        return Ok(p);
    }
    let target = Vector2::new(p.u - k.cx(), p.v - k.cy());
    let mut q = target;
    let mut residual = d.offset(q) - target;
    let mut iterations = 0;

    while residual.norm() > tol {
        if iterations == max_iter {
            return Err(GeometryError::NonConvergent {
                iterations,
                residual: residual.norm(),
            });
        }
        iterations += 1;

        let step = match d.jacobian(q).lu().solve(&residual) {
            Some(step) if step.iter().all(|s| s.is_finite()) => step,
            _ => {
                return Err(GeometryError::NonConvergent {
                    iterations,
                    residual: residual.norm(),
                })
            }
        };

        // Backtrack until the residual shrinks; a full Newton step can
        // overshoot when the polynomial is steep.
        let mut scale = 1.0;
        loop {
            let candidate = q - step * scale;
            let candidate_residual = d.offset(candidate) - target;
            if candidate_residual.norm() < residual.norm() || scale < 1e-6 {
                q = candidate;
                residual = candidate_residual;
                break;
            }
            scale *= 0.5;
        }
        if !residual.norm().is_finite() {
            return Err(GeometryError::NonConvergent {
                iterations,
                residual: f64::INFINITY,
            });
        }
    }

    if !d.is_invertible_at(q) {
        return Err(GeometryError::NonConvergent {
            iterations,
            residual: residual.norm(),
        });
    }
    Ok(PixelPoint::new(k.cx() + q.x, k.cy() + q.y))
}

/// [`undistort`] with the default tolerance (1e-9 px) and iteration cap (50).
pub fn undistort_default(
    p: PixelPoint,
    k: &Intrinsics,
    d: &DistortionCoefficients,
) -> Result<PixelPoint, GeometryError> {
    undistort(p, k, d, DEFAULT_UNDISTORT_TOL, DEFAULT_UNDISTORT_MAX_ITER)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k_origin() -> Intrinsics {
        Intrinsics::pinhole(1000.0, 1000.0, 0.0, 0.0).unwrap()
    }

    fn k_desk() -> Intrinsics {
        Intrinsics::pinhole(1000.0, 1000.0, 640.0, 360.0).unwrap()
    }

    #[test]
    fn zero_lens_is_identity() {
        let p = PixelPoint::new(12.5, 700.25);
        assert_eq!(distort(p, &k_desk(), &DistortionCoefficients::ZERO), p);
        assert_eq!(
            undistort_default(p, &k_desk(), &DistortionCoefficients::ZERO).unwrap(),
            p
        );
    }

    #[test]
    fn principal_point_is_fixed() {
        let d = DistortionCoefficients::new(3e-7, -1e-13, 2e-6, -4e-6, 1e-19).unwrap();
        let k = k_desk();
        assert_eq!(distort(k.principal_point(), &k, &d), k.principal_point());
    }

    #[test]
    fn single_radial_term_by_hand() {
        // r² = 100² ⇒ 100·(1 + 1e-7·1e4) = 100.1
        let d = DistortionCoefficients::radial(1e-7).unwrap();
        let out = distort(PixelPoint::new(100.0, 0.0), &k_origin(), &d);
        assert!((out.u - 100.1).abs() < 1e-12);
        assert_eq!(out.v, 0.0);
    }

    #[test]
    fn tangential_terms_by_hand() {
        // dx = 30, dy = 40, r² = 2500, radial factor 1.
        let d = DistortionCoefficients::new(0.0, 0.0, 1e-5, 2e-5, 0.0).unwrap();
        let out = distort(PixelPoint::new(30.0, 40.0), &k_origin(), &d);
        let du = 1e-5 * (2500.0 + 2.0 * 900.0) + 2.0 * 2e-5 * 30.0 * 40.0;
        let dv = 2.0 * 1e-5 * 30.0 * 40.0 + 2e-5 * (2500.0 + 2.0 * 1600.0);
        assert!((out.u - (30.0 + du)).abs() < 1e-12);
        assert!((out.v - (40.0 + dv)).abs() < 1e-12);
    }

    #[test]
    fn jacobian_matches_central_differences() {
        let d = DistortionCoefficients::new(2e-7, -3e-13, 4e-6, -2e-6, 5e-19).unwrap();
        let at = Vector2::new(250.0, -180.0);
        let j = d.jacobian(at);
        let h = 1e-4;
        for col in 0..2 {
            let mut e = Vector2::zeros();
            e[col] = h;
            let fd = (d.offset(at + e) - d.offset(at - e)) / (2.0 * h);
            for row in 0..2 {
                assert!((j[(row, col)] - fd[row]).abs() < 1e-7, "J[{row},{col}]");
            }
        }
    }

    #[test]
    fn round_trip_with_strong_positive_radial() {
        // k1·r² = 0.45 at the target, beyond where plain fixed-point contracts.
        let k = k_origin();
        let d = DistortionCoefficients::radial(0.45 / 500.0_f64.powi(2)).unwrap();
        let q = PixelPoint::new(300.0, 400.0);
        let p = distort(q, &k, &d);
        let back = undistort_default(p, &k, &d).unwrap();
        assert!(back.distance(&q) < 1e-6);
    }

    /// Radius where d/dr (r·(1 + k1·r²)) = 0, found by bisection.
    fn fold_radius(k1: f64) -> f64 {
        let slope = |r: f64| 1.0 + 3.0 * k1 * r * r;
        let (mut lo, mut hi) = (0.0, 1e6);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if slope(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    #[test]
    fn target_beyond_fold_is_non_convergent() {
        let k1 = -1e-6;
        let r_fold = fold_radius(k1);
        let max_reach = r_fold * (1.0 + k1 * r_fold * r_fold);
        let d = DistortionCoefficients::radial(k1).unwrap();
        let p = PixelPoint::new(max_reach * 1.2, 0.0);
        let err = undistort_default(p, &k_origin(), &d).unwrap_err();
        assert!(
            matches!(err, GeometryError::NonConvergent { .. }),
            "{err:?}"
        );

        // Just inside the fold the inverse still exists.
        let inside = PixelPoint::new(0.9 * r_fold, 0.0);
        let p = distort(inside, &k_origin(), &d);
        let back = undistort_default(p, &k_origin(), &d).unwrap();
        assert!(back.distance(&inside) < 1e-6);
    }

    #[test]
    fn iteration_cap_is_respected() {
        let d = DistortionCoefficients::radial(1e-7).unwrap();
        let p = PixelPoint::new(1200.0, 900.0);
        let err = undistort(p, &k_desk(), &d, 1e-9, 0).unwrap_err();
        assert!(matches!(
            err,
            GeometryError::NonConvergent { iterations: 0, .. }
        ));
    }

    #[test]
    fn rejects_non_finite_coefficients() {
        let err = DistortionCoefficients::new(0.0, f64::INFINITY, 0.0, 0.0, 0.0).unwrap_err();
        assert_eq!(err.name, "k2");
    }
}
