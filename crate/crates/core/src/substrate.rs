//! Groove patterns, rectangular tiles, and the world map the robot walks on.
//!
//! Groove angles in public structs and files use the right-turn-positive
//! convention: a positive angle steers the robot clockwise when viewed from
//! above. Internally all math is counter-clockwise positive, so conversion
//! happens exactly once, at [`reported_angle_to_internal`].

use crate::error::{Error, Result};
use crate::geom::{unit_from_deg, wrap_degrees, Vec2};

pub const DEFAULT_PITCH_MM: f64 = 0.45;
pub const DEFAULT_RIDGE_HEIGHT_MM: f64 = 0.15;

/// Converts a right-turn-positive groove angle to the internal
/// counter-clockwise-positive convention. Self-inverse.
pub fn reported_angle_to_internal(angle_deg: f64) -> f64 {
    let a = -angle_deg;
    if a == 0.0 {
        0.0
    } else {
        a
    }
}

/// Inverse of [`reported_angle_to_internal`]; kept separate so call sites state
/// their direction of travel.
pub fn internal_angle_to_reported(angle_deg: f64) -> f64 {
    reported_angle_to_internal(angle_deg)
}

/// A parallel groove pattern: orientation plus ridge geometry.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrooveSpec {
    /// Right-turn-positive groove angle, in [-90, 90].
    pub angle_deg: f64,
    /// Crest-to-crest spacing, > 0.
    pub pitch_mm: f64,
    /// Ridge height above the valleys, >= 0.
    pub ridge_height_mm: f64,
}

impl Default for GrooveSpec {
    fn default() -> Self {
        GrooveSpec {
            angle_deg: 0.0,
            pitch_mm: DEFAULT_PITCH_MM,
            ridge_height_mm: DEFAULT_RIDGE_HEIGHT_MM,
        }
    }
}

impl GrooveSpec {
    pub fn new(angle_deg: f64, pitch_mm: f64, ridge_height_mm: f64) -> Result<Self> {
        let spec = GrooveSpec {
            angle_deg,
            pitch_mm,
            ridge_height_mm,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.angle_deg.is_finite() || !(-90.0..=90.0).contains(&self.angle_deg) {
            return Err(Error::invalid(
                "angle_deg",
                format!("{} is outside [-90, 90]", self.angle_deg),
            ));
        }
        if !self.pitch_mm.is_finite() || self.pitch_mm <= 0.0 {
            return Err(Error::invalid(
                "pitch_mm",
                format!("{} is not > 0", self.pitch_mm),
            ));
        }
        if !self.ridge_height_mm.is_finite() || self.ridge_height_mm < 0.0 {
            return Err(Error::invalid(
                "ridge_height_mm",
                format!("{} is not >= 0", self.ridge_height_mm),
            ));
        }
        Ok(())
    }

    /// Direction of the groove normal (perpendicular to the ridge lines) in
    /// the internal convention. The gait couples to this direction.
    pub fn normal_deg_internal(&self) -> f64 {
        reported_angle_to_internal(self.angle_deg)
    }
}

/// Axis-aligned rectangular patch carrying one groove pattern.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubstrateTile {
    pub id: u32,
    pub x_min_mm: f64,
    pub x_max_mm: f64,
    pub y_min_mm: f64,
    pub y_max_mm: f64,
    pub groove: GrooveSpec,
}

impl SubstrateTile {
    pub fn new(
        id: u32,
        x_min_mm: f64,
        x_max_mm: f64,
        y_min_mm: f64,
        y_max_mm: f64,
        groove: GrooveSpec,
    ) -> Result<Self> {
        let tile = SubstrateTile {
            id,
            x_min_mm,
            x_max_mm,
            y_min_mm,
            y_max_mm,
            groove,
        };
        tile.validate()?;
        Ok(tile)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("x_min_mm", self.x_min_mm),
            ("x_max_mm", self.x_max_mm),
            ("y_min_mm", self.y_min_mm),
            ("y_max_mm", self.y_max_mm),
        ] {
            if !v.is_finite() {
                return Err(Error::Invalid {
                    field: "tile bounds",
                    message: format!("{name} is not finite"),
                });
            }
        }
        if self.x_min_mm >= self.x_max_mm {
            return Err(Error::invalid(
                "tile bounds",
                format!("x_min {} must be < x_max {}", self.x_min_mm, self.x_max_mm),
            ));
        }
        if self.y_min_mm >= self.y_max_mm {
            return Err(Error::invalid(
                "tile bounds",
                format!("y_min {} must be < y_max {}", self.y_min_mm, self.y_max_mm),
            ));
        }
        self.groove.validate()
    }

    /// Closed-rectangle membership: boundary points belong to the tile.
    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= self.x_min_mm && p.x <= self.x_max_mm && p.y >= self.y_min_mm && p.y <= self.y_max_mm
    }

    pub fn width_mm(&self) -> f64 {
        self.x_max_mm - self.x_min_mm
    }

    pub fn height_mm(&self) -> f64 {
        self.y_max_mm - self.y_min_mm
    }
}

/// Which patch of ground a point falls on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TileRef {
    Tile(u32),
    Background,
}

impl std::fmt::Display for TileRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TileRef::Tile(id) => write!(f, "{id}"),
            TileRef::Background => write!(f, "background"),
        }
    }
}

/// Ordered list of tiles over an unbounded background groove. Where tiles
/// overlap, the one later in the list wins.
#[derive(Clone, Debug, PartialEq)]
pub struct WorldMap {
    tiles: Vec<SubstrateTile>,
    background: GrooveSpec,
}

impl WorldMap {
    pub fn new(tiles: Vec<SubstrateTile>, background: GrooveSpec) -> Result<Self> {
        background.validate()?;
        let mut seen = std::collections::HashSet::new();
        for tile in &tiles {
            tile.validate()?;
            if !seen.insert(tile.id) {
                return Err(Error::invalid(
                    "tile id",
                    format!("id {} appears more than once", tile.id),
                ));
            }
        }
        Ok(WorldMap { tiles, background })
    }

    /// Uniform world: background only.
    pub fn uniform(background: GrooveSpec) -> Self {
        WorldMap {
            tiles: Vec::new(),
            background,
        }
    }

    pub fn tiles(&self) -> &[SubstrateTile] {
        &self.tiles
    }

    pub fn background(&self) -> &GrooveSpec {
        &self.background
    }

    pub fn tile(&self, id: u32) -> Option<&SubstrateTile> {
        self.tiles.iter().find(|t| t.id == id)
    }

    /// Resolves a point to the last listed tile containing it, or the
    /// background. Total: every point resolves to some groove.
    pub fn locate(&self, p: Vec2) -> TileRef {
        for tile in self.tiles.iter().rev() {
            if tile.contains(p) {
                return TileRef::Tile(tile.id);
            }
        }
        TileRef::Background
    }

    pub fn groove(&self, at: TileRef) -> &GrooveSpec {
        match at {
            TileRef::Tile(id) => self
                .tile(id)
                .map(|t| &t.groove)
                .unwrap_or(&self.background),
            TileRef::Background => &self.background,
        }
    }

    pub fn groove_at(&self, p: Vec2) -> &GrooveSpec {
        self.groove(self.locate(p))
    }

    /// Replaces every groove angle (tiles and background) with `angle_deg`.
    /// Used for angle sweeps over a fixed geometry.
    pub fn with_uniform_angle(&self, angle_deg: f64) -> Self {
        let mut world = self.clone();
        world.background.angle_deg = angle_deg;
        for tile in &mut world.tiles {
            tile.groove.angle_deg = angle_deg;
        }
        world
    }
}

/// Acute signed angle from the heading to the groove normal, folded into
/// (-90, 90]. Ridge lines have no lengthwise orientation, so the angle is
/// defined modulo 180; the exact half-perpendicular tie resolves to +90.
///
/// `heading_deg` is in the internal convention, as is the result.
pub fn groove_relative_angle(groove: &GrooveSpec, heading_deg: f64) -> f64 {
    let raw = wrap_degrees(groove.normal_deg_internal() - heading_deg);
    if raw > 90.0 {
        raw - 180.0
    } else if raw <= -90.0 {
        raw + 180.0
    } else {
        raw
    }
}

/// Projects `p` onto the nearest ridge crest line of the tile's groove
/// pattern. Crest lines sit at integer multiples of the pitch along the
/// groove normal, measured from the tile's (x_min, y_min) corner. A point
/// exactly halfway between two crests moves to the smaller-index crest.
pub fn snap_to_ridge(tile: &SubstrateTile, p: Vec2) -> Result<Vec2> {
    if !tile.contains(p) {
        return Err(Error::OutsideTile {
            tile_id: tile.id,
            x: p.x,
            y: p.y,
        });
    }
    let normal = unit_from_deg(tile.groove.normal_deg_internal());
    let corner = Vec2::new(tile.x_min_mm, tile.y_min_mm);
    let s = (p - corner).dot(normal);
    let pitch = tile.groove.pitch_mm;
    // ceil(s/pitch - 1/2) rounds to nearest with halfway ties downward.
    let index = (s / pitch - 0.5).ceil();
    let offset = index * pitch - s;
    Ok(p + normal * offset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn plain_tile(id: u32, x0: f64, x1: f64, angle: f64) -> SubstrateTile {
        SubstrateTile::new(id, x0, x1, -50.0, 50.0, GrooveSpec::new(angle, 0.45, 0.15).unwrap())
            .unwrap()
    }

    #[test]
    fn sign_convention_flips_once() {
        assert_eq!(reported_angle_to_internal(15.0), -15.0);
        assert_eq!(reported_angle_to_internal(-35.0), 35.0);
        assert_eq!(reported_angle_to_internal(0.0), 0.0);
        assert!(reported_angle_to_internal(0.0).is_sign_positive());
        assert_eq!(internal_angle_to_reported(reported_angle_to_internal(22.5)), 22.5);
    }

    #[test]
    fn locate_prefers_later_tiles_and_falls_back_to_background() {
        let world = WorldMap::new(
            vec![plain_tile(0, 0.0, 100.0, 0.0), plain_tile(1, 100.0, 200.0, 15.0)],
            GrooveSpec::default(),
        )
        .unwrap();
        // Shared edge x = 100 belongs to both closed rectangles; the later
        // tile wins.
        assert_eq!(world.locate(Vec2::new(100.0, 0.0)), TileRef::Tile(1));
        assert_eq!(world.locate(Vec2::new(50.0, 0.0)), TileRef::Tile(0));
        assert_eq!(world.locate(Vec2::new(-1.0, 0.0)), TileRef::Background);
        assert_eq!(world.locate(Vec2::new(50.0, 80.0)), TileRef::Background);
    }

    #[test]
    fn duplicate_tile_ids_are_rejected() {
        let err = WorldMap::new(
            vec![plain_tile(3, 0.0, 10.0, 0.0), plain_tile(3, 10.0, 20.0, 5.0)],
            GrooveSpec::default(),
        );
        assert!(err.is_err());
    }

    #[test]
    fn groove_spec_bounds_are_enforced() {
        assert!(GrooveSpec::new(90.0, 0.45, 0.0).is_ok());
        assert!(GrooveSpec::new(91.0, 0.45, 0.15).is_err());
        assert!(GrooveSpec::new(0.0, 0.0, 0.15).is_err());
        assert!(GrooveSpec::new(0.0, 0.45, -0.1).is_err());
        assert!(SubstrateTile::new(0, 5.0, 5.0, 0.0, 1.0, GrooveSpec::default()).is_err());
    }

    #[test]
    fn relative_angle_folds_into_half_open_quadrant() {
        let g15 = GrooveSpec::new(15.0, 0.45, 0.15).unwrap();
        // Normal of a +15 groove points 15 degrees clockwise; a robot heading
        // along +x sees the normal 15 degrees to its right.
        assert_relative_eq!(groove_relative_angle(&g15, 0.0), -15.0);
        let g0 = GrooveSpec::default();
        assert_eq!(groove_relative_angle(&g0, 0.0), 0.0);
        assert_relative_eq!(groove_relative_angle(&g0, 170.0), 10.0);
        // Exactly perpendicular: fold tie resolves to +90.
        assert_eq!(groove_relative_angle(&g0, 90.0), 90.0);
        assert_eq!(groove_relative_angle(&g0, -90.0), 90.0);
        let g30 = GrooveSpec::new(30.0, 0.45, 0.15).unwrap();
        assert_relative_eq!(groove_relative_angle(&g30, 100.0), 50.0);
    }

    #[test]
    fn relative_angle_is_invariant_to_normal_flip() {
        // Adding 180 to the heading flips which side of the ridges the robot
        // faces; the folded magnitude must not change.
        let g = GrooveSpec::new(25.0, 0.45, 0.15).unwrap();
        for h in [-171.0, -30.0, 0.0, 12.5, 64.0, 150.0] {
            let a = groove_relative_angle(&g, h);
            let b = groove_relative_angle(&g, h + 180.0);
            assert_relative_eq!(a.abs(), b.abs(), epsilon = 1e-12);
        }
    }

    #[test]
    fn snap_moves_to_nearest_crest() {
        let tile = plain_tile(0, 0.0, 100.0, 0.0);
        // Grooves at 0 degrees run along y; crests at x = n * 0.45.
        let on_crest = Vec2::new(0.45 * 7.0, 3.0);
        assert_eq!(snap_to_ridge(&tile, on_crest).unwrap(), on_crest);

        let past = Vec2::new(0.45 * 7.0 + 0.10, 3.0);
        let snapped = snap_to_ridge(&tile, past).unwrap();
        assert_relative_eq!(snapped.x, 0.45 * 7.0, epsilon = 1e-12);
        assert_eq!(snapped.y, 3.0);

        // Halfway between crests 2 and 3: ties go to the smaller index.
        let tie = Vec2::new(0.45 * 2.5, 0.0);
        let snapped = snap_to_ridge(&tile, tie).unwrap();
        assert_relative_eq!(snapped.x, 0.45 * 2.0, epsilon = 1e-12);

        assert!(snap_to_ridge(&tile, Vec2::new(-1.0, 0.0)).is_err());
    }

    #[test]
    fn snap_handles_oblique_grooves() {
        let tile = plain_tile(0, 0.0, 100.0, 30.0);
        let normal = unit_from_deg(tile.groove.normal_deg_internal());
        let corner = Vec2::new(tile.x_min_mm, tile.y_min_mm);
        let p = corner + normal * (0.45 * 4.0 + 0.2) + Vec2::new(-normal.y, normal.x) * 5.0;
        let snapped = snap_to_ridge(&tile, p).unwrap();
        let s = (snapped - corner).dot(normal);
        assert_relative_eq!(s, 0.45 * 4.0, epsilon = 1e-12);
        // Displacement never exceeds half a pitch.
        assert!(p.distance(snapped) <= 0.45 / 2.0 + 1e-12);
    }
}
