use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

pub const DEGENERATE_THRESHOLD: f64 = 1e-12;

/// Interior angles of a triangle on the unit sphere, in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SphericalTriangle<T> {
    pub a: T,
    pub b: T,
    pub c: T,
}

impl<T: Real> SphericalTriangle<T> {
    /// Checks each angle lies in `(0, π)` and the sum is below `3π`. Sums at
    /// or just above `π` are accepted here and rejected by
    /// [`spherical_excess`] as degenerate.
    pub fn new(a: T, b: T, c: T) -> Result<Self> {
        let pi = T::lit(std::f64::consts::PI);
        for (name, x) in [("A", a), ("B", b), ("C", c)] {
            if !x.is_finite() || x <= T::zero() || x >= pi {
                return Err(Error::InvalidArgument(format!(
                    "angle {name} = {x} is not in (0, π)"
                )));
            }
        }
        if a + b + c >= T::lit(3.0) * pi {
            return Err(Error::InvalidArgument("angle sum must be below 3π".into()));
        }
        Ok(SphericalTriangle { a, b, c })
    }

    /// Triangle with the given vertices (unit vectors, or anything nonzero).
    pub fn from_vertices(p: [T; 3], q: [T; 3], r: [T; 3]) -> Result<Self> {
        let (p, q, r) = (normalize(p)?, normalize(q)?, normalize(r)?);
        SphericalTriangle::new(
            vertex_angle(p, q, r),
            vertex_angle(q, r, p),
            vertex_angle(r, p, q),
        )
    }

    /// Girard's form, `A + B + C − π`.
    pub fn angle_excess(&self) -> T {
        self.a + self.b + self.c - T::lit(std::f64::consts::PI)
    }
}

fn dot<T: Real>(u: [T; 3], v: [T; 3]) -> T {
    u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
}

fn cross<T: Real>(u: [T; 3], v: [T; 3]) -> [T; 3] {
    [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ]
}

fn normalize<T: Real>(u: [T; 3]) -> Result<[T; 3]> {
    let norm = dot(u, u).sqrt();
    if !(norm > T::zero()) || !norm.is_finite() {
        return Err(Error::InvalidArgument(
            "vertex must be a finite nonzero vector".into(),
        ));
    }
    Ok([u[0] / norm, u[1] / norm, u[2] / norm])
}

/// Angle at `p` between the great circles towards `q` and `r`.
fn vertex_angle<T: Real>(p: [T; 3], q: [T; 3], r: [T; 3]) -> T {
    let n1 = cross(p, q);
    let n2 = cross(p, r);
    let sin = dot(cross(n1, n2), p).abs();
    sin.atan2(dot(n1, n2))
}

/// Side lengths (arcs opposite each angle) from the spherical law of
/// cosines for angles, `cos a = (cos A + cos B cos C) / (sin B sin C)`, in
/// its half-angle form
/// `tan²(a/2) = −cos S cos(S − A) / (cos(S − B) cos(S − C))` with
/// `S = (A + B + C)/2`. The half-angle form keeps full accuracy for short
/// sides, where `acos` near 1 would lose half the digits.
pub fn sides_from_angles<T: Real>(t: &SphericalTriangle<T>) -> Result<[T; 3]> {
    let s = (t.a + t.b + t.c) / T::lit(2.0);
    let cos_s = s.cos();
    let (ca, cb, cc) = ((s - t.a).cos(), (s - t.b).cos(), (s - t.c).cos());
    if !(cos_s < T::zero() && ca > T::zero() && cb > T::zero() && cc > T::zero()) {
        return Err(Error::InvalidArgument(
            "angles do not belong to a spherical triangle".into(),
        ));
    }
    let side = |x: T, y: T, z: T| T::lit(2.0) * (-cos_s * x / (y * z)).sqrt().atan();
    Ok([side(ca, cb, cc), side(cb, cc, ca), side(cc, ca, cb)])
}

/// Area of the triangle with the given sides by L'Huilier's theorem:
/// `tan(E/4)² = tan(s/2) tan((s−a)/2) tan((s−b)/2) tan((s−c)/2)`.
pub fn lhuilier_area<T: Real>(sides: [T; 3]) -> T {
    let two = T::lit(2.0);
    let s = (sides[0] + sides[1] + sides[2]) / two;
    let product = (s / two).tan()
        * ((s - sides[0]) / two).tan()
        * ((s - sides[1]) / two).tan()
        * ((s - sides[2]) / two).tan();
    T::lit(4.0) * product.max(T::zero()).sqrt().atan()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SphericalExcess<T> {
    /// `A + B + C − π`
    pub excess: T,
    /// Area recomputed from the sides.
    pub lhuilier_area: T,
    pub sides: [T; 3],
}

impl<T: Real> SphericalExcess<T> {
    pub fn discrepancy(&self) -> T {
        (self.excess - self.lhuilier_area).abs()
    }
}

/// Excess with the independent area cross-check. Excess at or below
/// `threshold` is a degenerate triangle.
pub fn spherical_excess<T: Real>(
    t: &SphericalTriangle<T>,
    threshold: T,
) -> Result<SphericalExcess<T>> {
    let excess = t.angle_excess();
    if excess <= threshold {
        return Err(Error::Degenerate(format!(
            "angle excess {excess} does not exceed the threshold {threshold}"
        )));
    }
    let sides = sides_from_angles(t)?;
    Ok(SphericalExcess {
        excess,
        lhuilier_area: lhuilier_area(sides),
        sides,
    })
}
