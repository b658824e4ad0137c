//! Printable substrate geometry: watertight triangle meshes of grooved
//! tiles and a binary STL writer.
//!
//! A tile becomes a rectangular slab whose top face carries a triangular
//! corrugation: crest lines run along the groove direction at the tile's
//! pitch, rising by the ridge height above the slab, with valleys halfway
//! between. Crests are phased exactly as [`crate::substrate::snap_to_ridge`]
//! places them, so a mesh printed from a tile matches the simulated ridge
//! positions.

use std::collections::HashMap;
use std::io::Write;

use crate::error::{Error, Result};
use crate::geom::{unit_from_deg, Vec2};
use crate::substrate::SubstrateTile;

/// Indexed triangle surface in millimetres.
///
/// Triangles are wound counterclockwise seen from outside the solid, so
/// facet normals computed from the winding point outward.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TriangleMesh {
    /// Vertex positions, deduplicated bitwise.
    pub vertices: Vec<[f64; 3]>,
    /// Vertex index triples.
    pub triangles: Vec<[u32; 3]>,
}

impl TriangleMesh {
    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    /// Outward unit normal of one triangle, from its winding.
    pub fn facet_normal(&self, triangle: [u32; 3]) -> [f64; 3] {
        let a = self.vertices[triangle[0] as usize];
        let b = self.vertices[triangle[1] as usize];
        let c = self.vertices[triangle[2] as usize];
        let u = sub(b, a);
        let v = sub(c, a);
        let n = cross(u, v);
        let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        if len == 0.0 {
            return [0.0, 0.0, 0.0];
        }
        [n[0] / len, n[1] / len, n[2] / len]
    }

    /// Checks that the surface is closed and consistently wound: every
    /// undirected edge is used by exactly two triangles, once in each
    /// direction, no triangle repeats a vertex or has zero area, and all
    /// indices are in range.
    pub fn watertight(&self) -> bool {
        let mut edges: HashMap<(u32, u32), (u32, u32)> = HashMap::new();
        for tri in &self.triangles {
            let [a, b, c] = *tri;
            if a == b || b == c || c == a {
                return false;
            }
            if tri.iter().any(|&i| i as usize >= self.vertices.len()) {
                return false;
            }
            let n = cross(
                sub(self.vertices[b as usize], self.vertices[a as usize]),
                sub(self.vertices[c as usize], self.vertices[a as usize]),
            );
            if n == [0.0, 0.0, 0.0] {
                return false;
            }
            for (u, v) in [(a, b), (b, c), (c, a)] {
                let slot = edges.entry((u.min(v), u.max(v))).or_insert((0, 0));
                if u < v {
                    slot.0 += 1;
                } else {
                    slot.1 += 1;
                }
            }
        }
        edges.values().all(|&(fwd, rev)| fwd == 1 && rev == 1)
    }

    /// Volume enclosed by the surface via the divergence theorem.
    ///
    /// Positive for an outward-wound closed mesh. The body is shifted so
    /// the first vertex sits at the origin before accumulating; a closed
    /// surface's volume is translation invariant, and the shift keeps the
    /// summation well conditioned for tiles far from the origin.
    pub fn signed_volume_mm3(&self) -> f64 {
        let shift = self.vertices.first().copied().unwrap_or([0.0; 3]);
        let mut six_v = 0.0;
        for tri in &self.triangles {
            let a = sub(self.vertices[tri[0] as usize], shift);
            let b = sub(self.vertices[tri[1] as usize], shift);
            let c = sub(self.vertices[tri[2] as usize], shift);
            six_v += dot(a, cross(b, c));
        }
        six_v / 6.0
    }
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Deduplicates vertices bitwise while collecting triangles, so faces
/// built from shared cached points weld exactly.
#[derive(Default)]
struct Builder {
    index: HashMap<[u64; 3], u32>,
    mesh: TriangleMesh,
}

impl Builder {
    fn vertex(&mut self, p: [f64; 3]) -> u32 {
        let key = [p[0].to_bits(), p[1].to_bits(), p[2].to_bits()];
        if let Some(&i) = self.index.get(&key) {
            return i;
        }
        let i = self.mesh.vertices.len() as u32;
        self.mesh.vertices.push(p);
        self.index.insert(key, i);
        i
    }

    fn triangle(&mut self, a: [f64; 3], b: [f64; 3], c: [f64; 3]) {
        let tri = [self.vertex(a), self.vertex(b), self.vertex(c)];
        self.mesh.triangles.push(tri);
    }
}

/// Meshes one tile as a printable solid: a slab of the tile's footprint
/// and the given thickness, topped by the triangular groove corrugation.
///
/// With zero ridge height the result is a plain 12-triangle box. The
/// pitch must not exceed the smaller footprint dimension.
pub fn substrate_mesh(tile: &SubstrateTile, base_thickness_mm: f64) -> Result<TriangleMesh> {
    tile.validate()?;
    if !base_thickness_mm.is_finite() || base_thickness_mm <= 0.0 {
        return Err(Error::invalid(
            "base_thickness_mm",
            format!("{base_thickness_mm} is not > 0"),
        ));
    }
    let footprint = tile.width_mm().min(tile.height_mm());
    if tile.groove.pitch_mm > footprint {
        return Err(Error::invalid(
            "pitch_mm",
            format!(
                "pitch {} exceeds the smallest tile dimension {}",
                tile.groove.pitch_mm, footprint
            ),
        ));
    }
    if tile.groove.ridge_height_mm == 0.0 {
        return Ok(box_mesh(tile, base_thickness_mm));
    }
    Ok(corrugated_mesh(tile, base_thickness_mm))
}

/// Plain rectangular box, two triangles per face.
fn box_mesh(tile: &SubstrateTile, thickness: f64) -> TriangleMesh {
    let (x0, x1, y0, y1) = (tile.x_min_mm, tile.x_max_mm, tile.y_min_mm, tile.y_max_mm);
    let t = thickness;
    let mut b = Builder::default();
    // Footprint corners, counterclockwise seen from above.
    let ring = [[x0, y0], [x1, y0], [x1, y1], [x0, y1]];
    let low = |p: [f64; 2]| [p[0], p[1], 0.0];
    let high = |p: [f64; 2]| [p[0], p[1], t];
    b.triangle(low(ring[0]), low(ring[3]), low(ring[2]));
    b.triangle(low(ring[0]), low(ring[2]), low(ring[1]));
    b.triangle(high(ring[0]), high(ring[1]), high(ring[2]));
    b.triangle(high(ring[0]), high(ring[2]), high(ring[3]));
    for e in 0..4 {
        let p = ring[e];
        let q = ring[(e + 1) % 4];
        b.triangle(low(p), low(q), high(q));
        b.triangle(low(p), high(q), high(p));
    }
    b.mesh
}

/// Slab plus triangular-wave top.
///
/// The footprint is partitioned into strips between consecutive half-pitch
/// lines (crests and valleys). Within a strip the surface height is linear,
/// so lifting the strip polygon gives the surface exactly. Every boundary
/// point is computed once and cached, so strips, walls, and the bottom fan
/// share vertices bitwise and the result welds watertight.
fn corrugated_mesh(tile: &SubstrateTile, thickness: f64) -> TriangleMesh {
    let t = thickness;
    let ridge = tile.groove.ridge_height_mm;
    let pitch = tile.groove.pitch_mm;
    let half = pitch / 2.0;
    let normal = unit_from_deg(tile.groove.normal_deg_internal());

    // Footprint corners, counterclockwise seen from above; corner 0 is the
    // crest phase reference, so its offset along the normal is exactly 0.
    let corners = [
        Vec2::new(tile.x_min_mm, tile.y_min_mm),
        Vec2::new(tile.x_max_mm, tile.y_min_mm),
        Vec2::new(tile.x_max_mm, tile.y_max_mm),
        Vec2::new(tile.x_min_mm, tile.y_max_mm),
    ];
    let s_corner: Vec<f64> = corners.iter().map(|&c| (c - corners[0]).dot(normal)).collect();
    let s_min = s_corner.iter().cloned().fold(f64::INFINITY, f64::min);
    let s_max = s_corner.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let j_lo = (s_min / half).floor() as i64;
    let j_hi = (s_max / half).ceil() as i64;
    let line_s = |j: i64| j as f64 * half;
    // Even lines are crests, odd lines are valleys.
    let line_z = |j: i64| if j.rem_euclid(2) == 0 { t + ridge } else { t };
    let wave_z = |s: f64| {
        let u = s / pitch;
        let f = u - u.floor();
        t + ridge * (2.0 * f - 1.0).abs()
    };

    // Where line j meets footprint edge e, computed once so both adjacent
    // strips and the wall see identical bits. A line collinear with an
    // edge yields no crossing; its corners stand in for it.
    let mut crossings: HashMap<(i64, usize), Vec2> = HashMap::new();
    for j in j_lo..=j_hi {
        let c = line_s(j);
        for e in 0..4 {
            let (a, b) = (corners[e], corners[(e + 1) % 4]);
            let (sa, sb) = (s_corner[e], s_corner[(e + 1) % 4]);
            let hit = if sa == c && sb == c {
                None
            } else if sa == c {
                Some(a)
            } else if sb == c {
                Some(b)
            } else if (sa < c) != (sb < c) {
                let u = (c - sa) / (sb - sa);
                // Edges alternate horizontal and vertical.
                Some(if e % 2 == 0 {
                    Vec2::new(a.x + u * (b.x - a.x), a.y)
                } else {
                    Vec2::new(a.x, a.y + u * (b.y - a.y))
                })
            } else {
                None
            };
            if let Some(p) = hit {
                crossings.insert((j, e), p);
            }
        }
    }

    // One canonical top height per boundary point. Points on a half-pitch
    // line take that line's exact height; free corners evaluate the wave.
    let key = |p: Vec2| (p.x.to_bits(), p.y.to_bits());
    let mut top_z: HashMap<(u64, u64), f64> = HashMap::new();
    for ((j, _), p) in &crossings {
        top_z.entry(key(*p)).or_insert(line_z(*j));
    }
    for (i, &corner) in corners.iter().enumerate() {
        let j_near = (s_corner[i] / half).round() as i64;
        let z = if line_s(j_near) == s_corner[i] {
            line_z(j_near)
        } else {
            wave_z(s_corner[i])
        };
        top_z.entry(key(corner)).or_insert(z);
    }

    let mut b = Builder::default();
    let lift = |p: Vec2, z: &HashMap<(u64, u64), f64>| [p.x, p.y, z[&key(p)]];

    // Top: one convex polygon per strip, fanned from its first vertex.
    for j in j_lo..j_hi {
        let (lo, hi) = (line_s(j), line_s(j + 1));
        let mut poly: Vec<Vec2> = Vec::new();
        let push = |p: Vec2, poly: &mut Vec<Vec2>| {
            if !poly.iter().any(|q| key(*q) == key(p)) {
                poly.push(p);
            }
        };
        for e in 0..4 {
            if let Some(&p) = crossings.get(&(j, e)) {
                push(p, &mut poly);
            }
            if let Some(&p) = crossings.get(&(j + 1, e)) {
                push(p, &mut poly);
            }
        }
        for (i, &corner) in corners.iter().enumerate() {
            if s_corner[i] >= lo && s_corner[i] <= hi {
                push(corner, &mut poly);
            }
        }
        if poly.len() < 3 {
            continue;
        }
        let cx = poly.iter().map(|p| p.x).sum::<f64>() / poly.len() as f64;
        let cy = poly.iter().map(|p| p.y).sum::<f64>() / poly.len() as f64;
        poly.sort_by(|p, q| {
            let ap = (p.y - cy).atan2(p.x - cx);
            let aq = (q.y - cy).atan2(q.x - cx);
            ap.partial_cmp(&aq).unwrap()
        });
        let area: f64 = poly
            .iter()
            .zip(poly.iter().cycle().skip(1))
            .map(|(p, q)| p.cross(*q))
            .sum();
        if area <= 0.0 {
            continue;
        }
        for i in 1..poly.len() - 1 {
            b.triangle(
                lift(poly[0], &top_z),
                lift(poly[i], &top_z),
                lift(poly[i + 1], &top_z),
            );
        }
    }

    // Boundary points of each footprint edge in travel order, shared by
    // the walls and the bottom fan.
    let mut edge_points: Vec<Vec<Vec2>> = Vec::with_capacity(4);
    for e in 0..4 {
        let (a, b2) = (corners[e], corners[(e + 1) % 4]);
        let dir = b2 - a;
        let mut pts = vec![a, b2];
        for j in j_lo..=j_hi {
            if let Some(&p) = crossings.get(&(j, e)) {
                if !pts.iter().any(|q| key(*q) == key(p)) {
                    pts.push(p);
                }
            }
        }
        pts.sort_by(|p, q| {
            let up = (*p - a).dot(dir);
            let uq = (*q - a).dot(dir);
            up.partial_cmp(&uq).unwrap()
        });
        edge_points.push(pts);
    }

    // Walls: vertical quads between consecutive boundary points.
    for pts in &edge_points {
        for w in pts.windows(2) {
            let (p, q) = (w[0], w[1]);
            let zp = top_z[&key(p)];
            let zq = top_z[&key(q)];
            b.triangle([p.x, p.y, 0.0], [q.x, q.y, 0.0], [q.x, q.y, zq]);
            b.triangle([p.x, p.y, 0.0], [q.x, q.y, zq], [p.x, p.y, zp]);
        }
    }

    // Bottom: fan from the footprint centre, wound to face down, with the
    // rim subdivided exactly as the wall feet are.
    let centre = Vec2::new(
        (tile.x_min_mm + tile.x_max_mm) / 2.0,
        (tile.y_min_mm + tile.y_max_mm) / 2.0,
    );
    let mut rim: Vec<Vec2> = Vec::new();
    for pts in &edge_points {
        rim.extend_from_slice(&pts[..pts.len() - 1]);
    }
    for i in 0..rim.len() {
        let p = rim[i];
        let q = rim[(i + 1) % rim.len()];
        b.triangle([centre.x, centre.y, 0.0], [q.x, q.y, 0.0], [p.x, p.y, 0.0]);
    }

    b.mesh
}

/// Writes a mesh as binary little-endian STL and returns the byte count,
/// which is always 84 + 50 per triangle.
///
/// The 80-byte header starts with `groove-gait substrate` and is padded
/// with spaces; each triangle record is the facet normal and three
/// vertices as single-precision floats plus a zero attribute word.
pub fn write_stl<W: Write>(mesh: &TriangleMesh, sink: &mut W) -> Result<u64> {
    let mut header = [b' '; 80];
    header[..21].copy_from_slice(b"groove-gait substrate");
    sink.write_all(&header)?;
    sink.write_all(&(mesh.triangles.len() as u32).to_le_bytes())?;
    for &tri in &mesh.triangles {
        let n = mesh.facet_normal(tri);
        for x in n {
            sink.write_all(&(x as f32).to_le_bytes())?;
        }
        for &i in &tri {
            for x in mesh.vertices[i as usize] {
                sink.write_all(&(x as f32).to_le_bytes())?;
            }
        }
        sink.write_all(&0u16.to_le_bytes())?;
    }
    Ok(84 + 50 * mesh.triangles.len() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::substrate::GrooveSpec;
    use approx::assert_relative_eq;

    fn tile(angle_deg: f64, w: f64, h: f64, pitch: f64, ridge: f64) -> SubstrateTile {
        SubstrateTile::new(
            0,
            0.0,
            w,
            0.0,
            h,
            GrooveSpec::new(angle_deg, pitch, ridge).unwrap(),
        )
        .unwrap()
    }

    /// Chord length of the line at offset s from the phase corner,
    /// clipped to the footprint.
    fn chord_length(tile: &SubstrateTile, s: f64) -> f64 {
        let n = unit_from_deg(tile.groove.normal_deg_internal());
        let o = Vec2::new(tile.x_min_mm + s * n.x, tile.y_min_mm + s * n.y);
        let d = Vec2::new(-n.y, n.x);
        let mut t0 = f64::NEG_INFINITY;
        let mut t1 = f64::INFINITY;
        for (p, v, lo, hi) in [
            (o.x, d.x, tile.x_min_mm, tile.x_max_mm),
            (o.y, d.y, tile.y_min_mm, tile.y_max_mm),
        ] {
            if v == 0.0 {
                if p < lo || p > hi {
                    return 0.0;
                }
            } else {
                let (ta, tb) = ((lo - p) / v, (hi - p) / v);
                t0 = t0.max(ta.min(tb));
                t1 = t1.min(ta.max(tb));
            }
        }
        (t1 - t0).max(0.0)
    }

    /// Closed-form solid volume: slab plus the corrugation profile
    /// integrated against the chord-length function. Both factors are
    /// piecewise linear between breakpoints, so two-point Gauss per
    /// subinterval integrates the product exactly.
    fn oracle_volume(tile: &SubstrateTile, thickness: f64) -> f64 {
        let slab = tile.width_mm() * tile.height_mm() * thickness;
        let ridge = tile.groove.ridge_height_mm;
        if ridge == 0.0 {
            return slab;
        }
        let pitch = tile.groove.pitch_mm;
        let half = pitch / 2.0;
        let n = unit_from_deg(tile.groove.normal_deg_internal());
        let corners = [
            Vec2::new(tile.x_min_mm, tile.y_min_mm),
            Vec2::new(tile.x_max_mm, tile.y_min_mm),
            Vec2::new(tile.x_max_mm, tile.y_max_mm),
            Vec2::new(tile.x_min_mm, tile.y_max_mm),
        ];
        let mut breaks: Vec<f64> = corners
            .iter()
            .map(|&c| (c - corners[0]).dot(n))
            .collect();
        let s_min = breaks.iter().cloned().fold(f64::INFINITY, f64::min);
        let s_max = breaks.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let j_lo = (s_min / half).floor() as i64;
        let j_hi = (s_max / half).ceil() as i64;
        for j in j_lo..=j_hi {
            breaks.push(j as f64 * half);
        }
        breaks.retain(|s| *s >= s_min && *s <= s_max);
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup();
        let profile = |s: f64| {
            let u = s / pitch;
            let f = u - u.floor();
            ridge * (2.0 * f - 1.0).abs()
        };
        let mut volume = 0.0;
        let node = 1.0 / 3.0_f64.sqrt();
        for w in breaks.windows(2) {
            let mid = (w[0] + w[1]) / 2.0;
            let span = (w[1] - w[0]) / 2.0;
            for q in [-node, node] {
                let s = mid + q * span;
                volume += span * profile(s) * chord_length(tile, s);
            }
        }
        slab + volume
    }

    #[test]
    fn flat_tile_is_a_twelve_triangle_box() {
        let mesh = substrate_mesh(&tile(0.0, 10.0, 10.0, 0.45, 0.0), 3.0).unwrap();
        assert_eq!(mesh.triangle_count(), 12);
        assert!(mesh.watertight());
        assert_relative_eq!(mesh.signed_volume_mm3(), 300.0, max_relative = 1e-12);
    }

    #[test]
    fn axis_groove_ridge_count_matches_width_over_pitch() {
        // Width is an exact multiple of the pitch, so crest lines land on
        // both side walls and the interior holds width/pitch full periods.
        let tile = tile(0.0, 4.5, 10.0, 0.45, 0.15);
        let mesh = substrate_mesh(&tile, 2.0).unwrap();
        assert!(mesh.watertight());
        // Count crest lines where they meet one wall.
        let crest_z = 2.0 + 0.15;
        let mut crest_x: Vec<f64> = mesh
            .vertices
            .iter()
            .filter(|v| v[2] == crest_z && v[1] == 0.0)
            .map(|v| v[0])
            .collect();
        crest_x.sort_by(|a, b| a.partial_cmp(b).unwrap());
        crest_x.dedup();
        assert_eq!(crest_x.len() - 1, 10);
    }

    #[test]
    fn boundary_crests_sit_at_exact_height() {
        // The phase corner lies on a crest; every vertex on that wall top
        // must carry the exact crest height, not a rounded wave sample.
        let tile = tile(0.0, 4.5, 10.0, 0.45, 0.15);
        let mesh = substrate_mesh(&tile, 2.0).unwrap();
        let on_left_top: Vec<&[f64; 3]> = mesh
            .vertices
            .iter()
            .filter(|v| v[0] == 0.0 && v[2] > 0.0)
            .collect();
        assert!(!on_left_top.is_empty());
        for v in on_left_top {
            assert_eq!(v[2], 2.15);
        }
    }

    #[test]
    fn rotated_grooves_stay_watertight() {
        for angle in [5.0, 30.0, -30.0, 45.0, 90.0, -77.3] {
            let tile = tile(angle, 7.0, 5.0, 0.45, 0.15);
            let mesh = substrate_mesh(&tile, 1.2).unwrap();
            assert!(mesh.watertight(), "angle {angle}");
            assert!(mesh.signed_volume_mm3() > 0.0, "angle {angle}");
        }
    }

    #[test]
    fn mesh_volume_matches_the_chord_integral() {
        for (angle, w, h, pitch, ridge, t) in [
            (0.0, 4.5, 10.0, 0.45, 0.15, 2.0),
            (15.0, 7.0, 5.0, 0.45, 0.15, 1.2),
            (-30.0, 6.3, 9.1, 0.7, 0.25, 3.0),
            (45.0, 5.0, 5.0, 0.45, 0.15, 1.0),
            (90.0, 8.0, 3.1, 0.9, 0.05, 0.8),
        ] {
            let tile = tile(angle, w, h, pitch, ridge);
            let mesh = substrate_mesh(&tile, t).unwrap();
            let expected = oracle_volume(&tile, t);
            assert_relative_eq!(
                mesh.signed_volume_mm3(),
                expected,
                max_relative = 1e-9
            );
        }
    }

    #[test]
    fn offset_tiles_mesh_identically_up_to_translation() {
        let near = substrate_mesh(&tile(20.0, 6.0, 4.0, 0.45, 0.15), 2.0).unwrap();
        let far_tile = SubstrateTile::new(
            7,
            100.0,
            106.0,
            -50.0,
            -46.0,
            GrooveSpec::new(20.0, 0.45, 0.15).unwrap(),
        )
        .unwrap();
        let far = substrate_mesh(&far_tile, 2.0).unwrap();
        assert!(far.watertight());
        assert_eq!(near.triangle_count(), far.triangle_count());
        assert_relative_eq!(
            near.signed_volume_mm3(),
            far.signed_volume_mm3(),
            max_relative = 1e-9
        );
    }

    #[test]
    fn stl_bytes_follow_the_format_arithmetic() {
        let mesh = substrate_mesh(&tile(0.0, 10.0, 10.0, 0.45, 0.0), 3.0).unwrap();
        let mut bytes = Vec::new();
        let n = write_stl(&mesh, &mut bytes).unwrap();
        assert_eq!(n, 684);
        assert_eq!(bytes.len(), 684);
        assert!(bytes.starts_with(b"groove-gait substrate"));
        assert!(bytes[21..80].iter().all(|&b| b == b' '));
        assert_eq!(u32::from_le_bytes(bytes[80..84].try_into().unwrap()), 12);
    }

    #[test]
    fn empty_mesh_writes_a_bare_header() {
        let mesh = TriangleMesh::default();
        let mut bytes = Vec::new();
        let n = write_stl(&mesh, &mut bytes).unwrap();
        assert_eq!(n, 84);
        assert_eq!(bytes.len(), 84);
        assert_eq!(u32::from_le_bytes(bytes[80..84].try_into().unwrap()), 0);
    }

    #[test]
    fn stl_round_trip_preserves_single_precision_coordinates() {
        let mesh = substrate_mesh(&tile(30.0, 7.0, 5.0, 0.45, 0.15), 1.2).unwrap();
        let mut bytes = Vec::new();
        let n = write_stl(&mesh, &mut bytes).unwrap();
        assert_eq!(n as usize, 84 + 50 * mesh.triangle_count());
        let count = u32::from_le_bytes(bytes[80..84].try_into().unwrap()) as usize;
        assert_eq!(count, mesh.triangle_count());
        for (i, tri) in mesh.triangles.iter().enumerate() {
            let base = 84 + 50 * i + 12;
            for (k, &vi) in tri.iter().enumerate() {
                let v = mesh.vertices[vi as usize];
                for axis in 0..3 {
                    let at = base + 12 * k + 4 * axis;
                    let stored = f32::from_le_bytes(bytes[at..at + 4].try_into().unwrap());
                    assert_eq!(stored, v[axis] as f32);
                }
            }
            let attr = 84 + 50 * i + 48;
            assert_eq!(u16::from_le_bytes(bytes[attr..attr + 2].try_into().unwrap()), 0);
        }
    }

    #[test]
    fn bad_inputs_are_rejected() {
        assert!(substrate_mesh(&tile(0.0, 10.0, 10.0, 0.45, 0.15), 0.0).is_err());
        assert!(substrate_mesh(&tile(0.0, 10.0, 10.0, 0.45, 0.15), -1.0).is_err());
        let coarse = tile(0.0, 2.0, 3.0, 2.5, 0.15);
        assert!(substrate_mesh(&coarse, 1.0).is_err());
    }
}
