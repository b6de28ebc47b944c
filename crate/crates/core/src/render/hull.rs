//! Padded convex hulls for community overlays.

pub const HULL_PADDING: f64 = 12.0;
/// Samples per padding circle in the polygon approximation.
const ARC_SAMPLES: usize = 24;

type Pt = (f64, f64);

fn cross(o: Pt, a: Pt, b: Pt) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Counter-clockwise convex hull (monotone chain); collinear points dropped.
pub fn convex_hull(points: &[Pt]) -> Vec<Pt> {
    let mut pts: Vec<Pt> = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Pt> = Vec::with_capacity(pts.len() * 2);
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Pt>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Polygon around `points` at distance `padding`: the hull of a circle of
/// sample points around each input point. Every input point lies strictly
/// inside the result.
pub fn padded_hull(points: &[Pt], padding: f64) -> Vec<Pt> {
    let ring: Vec<Pt> = (0..ARC_SAMPLES)
        .map(|i| {
            let a = i as f64 * std::f64::consts::TAU / ARC_SAMPLES as f64;
            (padding * a.cos(), padding * a.sin())
        })
        .collect();
    let samples: Vec<Pt> = points
        .iter()
        .flat_map(|p| ring.iter().map(move |r| (p.0 + r.0, p.1 + r.1)))
        .collect();
    convex_hull(&samples)
}

/// Containment in a counter-clockwise convex polygon, boundary included.
pub fn contains(polygon: &[Pt], p: Pt) -> bool {
    if polygon.len() < 3 {
        return false;
    }
    (0..polygon.len()).all(|i| cross(polygon[i], polygon[(i + 1) % polygon.len()], p) >= -1e-9)
}
