//! Planar vectors and angle arithmetic.
//!
//! All angles are degrees. Internal math orientation: counter-clockwise
//! positive, measured from the +x axis. Conversion to the right-turn-positive
//! convention used at file boundaries lives in [`crate::substrate`].

use std::ops::{Add, Mul, Neg, Sub};

/// 2D point or displacement in millimetres.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z component of the 3D cross product; positive when `other` lies
    /// counter-clockwise of `self`.
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Vec2) -> f64 {
        (self - other).norm()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Wraps an angle into the canonical interval (-180, 180].
pub fn wrap_degrees(angle_deg: f64) -> f64 {
    let mut a = angle_deg % 360.0;
    if a > 180.0 {
        a -= 360.0;
    } else if a <= -180.0 {
        a += 360.0;
    }
    a
}

/// Unit vector at `angle_deg` counter-clockwise from +x.
///
/// Quarter turns return exact axis vectors, mirroring [`deg_atan2`], so
/// axis-aligned geometry survives the degree-trig round trip bit-exactly.
pub fn unit_from_deg(angle_deg: f64) -> Vec2 {
    let turns = angle_deg.rem_euclid(360.0);
    if turns == 0.0 {
        return Vec2::new(1.0, 0.0);
    } else if turns == 90.0 {
        return Vec2::new(0.0, 1.0);
    } else if turns == 180.0 {
        return Vec2::new(-1.0, 0.0);
    } else if turns == 270.0 {
        return Vec2::new(0.0, -1.0);
    }
    let r = angle_deg.to_radians();
    Vec2::new(r.cos(), r.sin())
}

/// Direction angle of `(x, y)` in degrees, wrapped to (-180, 180].
///
/// Axis-aligned inputs return exact multiples of 90 so that straight runs
/// along an axis stay bit-exact.
pub fn deg_atan2(y: f64, x: f64) -> f64 {
    if y == 0.0 {
        return if x >= 0.0 { 0.0 } else { 180.0 };
    }
    if x == 0.0 {
        return if y > 0.0 { 90.0 } else { -90.0 };
    }
    wrap_degrees(y.atan2(x).to_degrees())
}

/// Distance from point `p` to the segment `a`..`b`.
pub fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.distance(a + ab * t)
}
