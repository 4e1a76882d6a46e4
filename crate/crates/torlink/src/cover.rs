//! Flat-torus and plane geometry: projection, lifting, the deck group,
//! polylines, winding numbers and signed intersection counting.
//!
//! The torus is `R^2 / (L Z)^2` with a configurable modulus `L`. Winding
//! numbers of generating curves are computed by adaptive midpoint
//! refinement with a per-step angle bound of `pi/2`; closed results are
//! asserted integral and rounded. Signed intersections follow the
//! convention that a crossing counts `+1` when the second path crosses the
//! first from its right to its left in the standard plane orientation.

use crate::{Error, Result};

/// Default clearance below which a point is considered to sit on a curve.
pub const DEFAULT_CLEARANCE: f64 = 1e-9;
/// Default cap on adaptive bisection depth.
pub const DEFAULT_MAX_DEPTH: u32 = 24;
/// Closed winding numbers must land this close to an integer.
pub const INTEGER_TOL: f64 = 1e-9;

/// A point of the plane, the universal cover of the torus.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlanePoint {
    pub x: f64,
    pub y: f64,
}

impl PlanePoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn dist(self, other: Self) -> f64 {
        (self - other).norm()
    }

    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the cross product, positive when `other` is to the
    /// left of `self`.
    pub fn cross(self, other: Self) -> f64 {
        self.x * other.y - self.y * other.x
    }

    /// Complex multiplication with the plane identified with C.
    pub fn cmul(self, other: Self) -> Self {
        Self::new(
            self.x * other.x - self.y * other.y,
            self.x * other.y + self.y * other.x,
        )
    }

    /// Complex division; the caller guarantees `other != 0`.
    pub fn cdiv(self, other: Self) -> Self {
        let d = other.norm_sq();
        Self::new(
            (self.x * other.x + self.y * other.y) / d,
            (self.y * other.x - self.x * other.y) / d,
        )
    }
}

impl std::ops::Add for PlanePoint {
    type Output = PlanePoint;
    fn add(self, rhs: PlanePoint) -> PlanePoint {
        PlanePoint::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Sub for PlanePoint {
    type Output = PlanePoint;
    fn sub(self, rhs: PlanePoint) -> PlanePoint {
        PlanePoint::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl std::ops::Neg for PlanePoint {
    type Output = PlanePoint;
    fn neg(self) -> PlanePoint {
        PlanePoint::new(-self.x, -self.y)
    }
}

impl std::ops::Mul<f64> for PlanePoint {
    type Output = PlanePoint;
    fn mul(self, s: f64) -> PlanePoint {
        PlanePoint::new(self.x * s, self.y * s)
    }
}

/// A point of the torus; coordinates are reduced to `[0, L)`.
///
/// Values are only constructed through [`Torus`], which performs the
/// reduction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorusPoint {
    pub x: f64,
    pub y: f64,
}

/// A deck transformation: translation by `(m L, n L)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DeckElement {
    pub m: i64,
    pub n: i64,
}

impl DeckElement {
    pub fn new(m: i64, n: i64) -> Self {
        Self { m, n }
    }

    pub fn identity() -> Self {
        Self { m: 0, n: 0 }
    }

    pub fn is_identity(self) -> bool {
        self.m == 0 && self.n == 0
    }

    pub fn inverse(self) -> Self {
        Self::new(-self.m, -self.n)
    }

    /// Group law: integer vector addition.
    pub fn compose(self, other: Self) -> Self {
        Self::new(self.m + other.m, self.n + other.n)
    }

    /// The translation vector for modulus `l`.
    pub fn offset(self, l: f64) -> PlanePoint {
        PlanePoint::new(self.m as f64 * l, self.n as f64 * l)
    }

    pub fn apply(self, p: PlanePoint, l: f64) -> PlanePoint {
        p + self.offset(l)
    }
}

/// The flat torus `R^2 / (L Z)^2`.
#[derive(Clone, Copy, Debug)]
pub struct Torus {
    modulus: f64,
}

impl Torus {
    pub fn new(modulus: f64) -> Result<Self> {
        if !(modulus > 0.0) || !modulus.is_finite() {
            return Err(Error::Config(format!(
                "torus modulus must be positive and finite, got {modulus}"
            )));
        }
        Ok(Self { modulus })
    }

    pub fn modulus(&self) -> f64 {
        self.modulus
    }

    /// Build a torus point, reducing both coordinates mod `L`.
    pub fn point(&self, x: f64, y: f64) -> TorusPoint {
        TorusPoint {
            x: x.rem_euclid(self.modulus),
            y: y.rem_euclid(self.modulus),
        }
    }

    /// The covering map.
    pub fn project(&self, p: PlanePoint) -> TorusPoint {
        self.point(p.x, p.y)
    }

    /// The canonical lift inside `[0, L)^2`.
    pub fn embed(&self, z: TorusPoint) -> PlanePoint {
        PlanePoint::new(z.x, z.y)
    }

    /// The lift of `z` nearest to `near`, one coordinate at a time.
    ///
    /// Ties (two lifts exactly equidistant in a coordinate) are broken in
    /// favor of the greater coordinate, so `lift_near((2,0), (0,0))` with
    /// `L = 4` is `(2, 0)` rather than `(-2, 0)`.
    pub fn lift_near(&self, z: TorusPoint, near: PlanePoint) -> PlanePoint {
        PlanePoint::new(
            nearest_rep(z.x, near.x, self.modulus),
            nearest_rep(z.y, near.y, self.modulus),
        )
    }

    /// Geodesic distance on the flat torus.
    pub fn dist(&self, a: TorusPoint, b: TorusPoint) -> f64 {
        let dx = wrap_diff(a.x - b.x, self.modulus);
        let dy = wrap_diff(a.y - b.y, self.modulus);
        dx.hypot(dy)
    }

    /// The shortest displacement vector from `a` to `b` on the torus,
    /// with components in `(-L/2, L/2]`.
    pub fn shortest_vector(&self, a: TorusPoint, b: TorusPoint) -> PlanePoint {
        PlanePoint::new(
            wrap_signed(b.x - a.x, self.modulus),
            wrap_signed(b.y - a.y, self.modulus),
        )
    }

    /// The deck element carrying the canonical lift of `project(p)` to `p`
    /// itself, rounded to the nearest lattice element.
    pub fn deck_of(&self, p: PlanePoint) -> DeckElement {
        let base = self.embed(self.project(p));
        DeckElement::new(
            ((p.x - base.x) / self.modulus).round() as i64,
            ((p.y - base.y) / self.modulus).round() as i64,
        )
    }
}

fn nearest_rep(coord: f64, near: f64, l: f64) -> f64 {
    let k = ((near - coord) / l).round();
    let cand = coord + k * l;
    let alt = if cand > near { cand - l } else { cand + l };
    let (d_cand, d_alt) = ((cand - near).abs(), (alt - near).abs());
    if d_alt < d_cand || (d_alt == d_cand && alt > cand) {
        alt
    } else {
        cand
    }
}

fn wrap_signed(d: f64, l: f64) -> f64 {
    let r = d.rem_euclid(l);
    if r > l / 2.0 {
        r - l
    } else {
        r
    }
}

fn wrap_diff(d: f64, l: f64) -> f64 {
    wrap_signed(d, l).abs()
}

/// An oriented polyline in the plane.
///
/// At least two vertices; consecutive vertices are distinct. The path is
/// closed when the first and last vertex coincide exactly.
#[derive(Clone, Debug)]
pub struct PlanePath {
    points: Vec<PlanePoint>,
}

impl PlanePath {
    pub fn new(points: Vec<PlanePoint>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Config("a path needs at least two vertices".into()));
        }
        for w in points.windows(2) {
            if w[0] == w[1] {
                return Err(Error::Config(
                    "consecutive path vertices must be distinct".into(),
                ));
            }
        }
        Ok(Self { points })
    }

    pub fn segment(a: PlanePoint, b: PlanePoint) -> Result<Self> {
        Self::new(vec![a, b])
    }

    pub fn points(&self) -> &[PlanePoint] {
        &self.points
    }

    pub fn first(&self) -> PlanePoint {
        self.points[0]
    }

    pub fn last(&self) -> PlanePoint {
        *self.points.last().unwrap()
    }

    pub fn is_closed(&self) -> bool {
        self.first() == self.last()
    }

    pub fn translated(&self, offset: PlanePoint) -> Self {
        Self {
            points: self.points.iter().map(|&p| p + offset).collect(),
        }
    }

    pub fn reversed(&self) -> Self {
        let mut points = self.points.clone();
        points.reverse();
        Self { points }
    }

    /// Concatenation; the first path must end where the second begins.
    pub fn concat(&self, other: &PlanePath) -> Result<Self> {
        if self.last() != other.first() {
            return Err(Error::Config(
                "paths do not share an endpoint, cannot concatenate".into(),
            ));
        }
        let mut points = self.points.clone();
        points.extend_from_slice(&other.points[1..]);
        Self::new(points)
    }

    /// Axis-aligned bounding box as (min, max) corners.
    pub fn bbox(&self) -> (PlanePoint, PlanePoint) {
        let mut lo = self.points[0];
        let mut hi = self.points[0];
        for p in &self.points {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        (lo, hi)
    }

    /// Minimum distance from `w` to the polyline.
    pub fn distance_to(&self, w: PlanePoint) -> f64 {
        self.points
            .windows(2)
            .map(|s| segment_distance(w, s[0], s[1]))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Controls adaptive refinement of generating curves.
#[derive(Clone, Copy, Debug)]
pub struct RefineConfig {
    /// Minimum admissible distance from the base point to the curve.
    pub clearance: f64,
    /// Cap on bisection depth relative to the whole parameter interval.
    pub max_depth: u32,
}

impl Default for RefineConfig {
    fn default() -> Self {
        Self {
            clearance: DEFAULT_CLEARANCE,
            max_depth: DEFAULT_MAX_DEPTH,
        }
    }
}

/// Distance from a point to a segment.
pub fn segment_distance(w: PlanePoint, a: PlanePoint, b: PlanePoint) -> f64 {
    let ab = b - a;
    let len_sq = ab.norm_sq();
    if len_sq == 0.0 {
        return w.dist(a);
    }
    let t = ((w - a).dot(ab) / len_sq).clamp(0.0, 1.0);
    w.dist(a + ab * t)
}

/// Winding number of a polyline around `w`, as a real number.
///
/// Per-segment angle increments are exact (`atan2` of cross and dot), so no
/// refinement is needed; straight chords cannot alias.
pub fn winding_number(path: &PlanePath, w: PlanePoint, cfg: &RefineConfig) -> Result<f64> {
    let d = path.distance_to(w);
    if d <= cfg.clearance {
        return Err(Error::ClearanceViolation {
            distance: d,
            clearance: cfg.clearance,
        });
    }
    let mut total = 0.0;
    for s in path.points.windows(2) {
        let v0 = s[0] - w;
        let v1 = s[1] - w;
        total += v0.cross(v1).atan2(v0.dot(v1));
    }
    Ok(total / std::f64::consts::TAU)
}

/// Winding number of a closed polyline around `w`, rounded to the integer
/// it must be.
pub fn winding_number_closed(path: &PlanePath, w: PlanePoint, cfg: &RefineConfig) -> Result<i64> {
    if !path.is_closed() {
        return Err(Error::Config("winding of an open path is not integral".into()));
    }
    round_integral(winding_number(path, w, cfg)?)
}

/// Winding of a generating curve `t in [0,1] -> plane` around `w`.
///
/// The curve is bisected adaptively until every accepted step subtends less
/// than `pi/2` as seen from `w` and agrees with its midpoint probe; this
/// queries the generating curve rather than interpolating a fixed polyline,
/// which prevents degree errors near fast winding.
pub fn winding_of_curve<C: Fn(f64) -> PlanePoint>(
    curve: C,
    w: PlanePoint,
    cfg: &RefineConfig,
) -> Result<f64> {
    let mut acc = WindAccumulator::new(w, cfg);
    // Minimum 16 top-level intervals before the angle criterion may accept.
    let n0 = 16;
    let mut prev = curve(0.0);
    for k in 0..n0 {
        let t0 = k as f64 / n0 as f64;
        let t1 = (k + 1) as f64 / n0 as f64;
        let p1 = curve(t1);
        acc.add_arc(&curve, t0, prev, t1, p1, 4)?;
        prev = p1;
    }
    Ok(acc.total / std::f64::consts::TAU)
}

/// Winding of a closed generating curve, rounded to an integer.
pub fn winding_of_closed_curve<C: Fn(f64) -> PlanePoint>(
    curve: C,
    w: PlanePoint,
    cfg: &RefineConfig,
) -> Result<i64> {
    round_integral(winding_of_curve(curve, w, cfg)?)
}

fn round_integral(x: f64) -> Result<i64> {
    let r = x.round();
    if (x - r).abs() > INTEGER_TOL {
        return Err(Error::NonIntegralWinding { value: x });
    }
    Ok(r as i64)
}

struct WindAccumulator<'a> {
    w: PlanePoint,
    cfg: &'a RefineConfig,
    total: f64,
}

impl<'a> WindAccumulator<'a> {
    fn new(w: PlanePoint, cfg: &'a RefineConfig) -> Self {
        Self { w, cfg, total: 0.0 }
    }

    fn angle(&self, p0: PlanePoint, p1: PlanePoint) -> Result<f64> {
        let v0 = p0 - self.w;
        let v1 = p1 - self.w;
        let (n0, n1) = (v0.norm(), v1.norm());
        if n0 <= self.cfg.clearance || n1 <= self.cfg.clearance {
            return Err(Error::ClearanceViolation {
                distance: n0.min(n1),
                clearance: self.cfg.clearance,
            });
        }
        Ok(v0.cross(v1).atan2(v0.dot(v1)))
    }

    fn add_arc<C: Fn(f64) -> PlanePoint>(
        &mut self,
        curve: &C,
        t0: f64,
        p0: PlanePoint,
        t1: f64,
        p1: PlanePoint,
        depth: u32,
    ) -> Result<()> {
        if depth >= self.cfg.max_depth {
            return Err(Error::RefinementExhausted { depth });
        }
        let tm = 0.5 * (t0 + t1);
        let pm = curve(tm);
        let d0 = self.angle(p0, pm)?;
        let d1 = self.angle(pm, p1)?;
        let half = std::f64::consts::FRAC_PI_2;
        if d0.abs() < half && d1.abs() < half {
            self.total += d0 + d1;
            Ok(())
        } else {
            self.add_arc(curve, t0, p0, tm, pm, depth + 1)?;
            self.add_arc(curve, tm, pm, t1, p1, depth + 1)
        }
    }
}

/// Parametric tolerance for classifying a crossing as degenerate.
const PARAM_EPS: f64 = 1e-12;

/// Transversal crossing of segment `q0..q1` over segment `p0..p1`.
///
/// `Some(+1)` when q crosses p from p's right to p's left, `Some(-1)` for
/// the opposite, `None` when disjoint. Endpoint contact and collinear
/// overlap report [`Error::DegenerateIncidence`].
pub fn segment_crossing(
    p0: PlanePoint,
    p1: PlanePoint,
    q0: PlanePoint,
    q1: PlanePoint,
) -> Result<Option<i64>> {
    let r = p1 - p0;
    let s = q1 - q0;
    let denom = r.cross(s);
    let qp = q0 - p0;
    let scale = r.norm() * s.norm();
    if denom.abs() <= PARAM_EPS * scale {
        // Parallel. Overlap only matters when collinear.
        if qp.cross(r).abs() <= PARAM_EPS * r.norm() * (qp.norm() + s.norm())
            && segments_overlap_1d(p0, p1, q0, q1)
        {
            return Err(Error::DegenerateIncidence);
        }
        return Ok(None);
    }
    let t = qp.cross(s) / denom;
    let u = qp.cross(r) / denom;
    let near = |v: f64| v.abs() <= PARAM_EPS || (1.0 - v).abs() <= PARAM_EPS;
    let inside = |v: f64| v > PARAM_EPS && v < 1.0 - PARAM_EPS;
    if inside(t) && inside(u) {
        return Ok(Some(if denom > 0.0 { 1 } else { -1 }));
    }
    if (near(t) && (inside(u) || near(u))) || (near(u) && inside(t)) {
        return Err(Error::DegenerateIncidence);
    }
    Ok(None)
}

fn segments_overlap_1d(p0: PlanePoint, p1: PlanePoint, q0: PlanePoint, q1: PlanePoint) -> bool {
    let r = p1 - p0;
    let t0 = (q0 - p0).dot(r) / r.norm_sq();
    let t1 = (q1 - p0).dot(r) / r.norm_sq();
    let (lo, hi) = (t0.min(t1), t0.max(t1));
    hi >= -PARAM_EPS && lo <= 1.0 + PARAM_EPS
}

/// Signed count of transversal crossings of `b` over `a`.
///
/// Preconditions: endpoints of either path stay off the other and no two
/// segments overlap collinearly; violations report
/// [`Error::DegenerateIncidence`] so the caller can retry with a jittered
/// transversal.
pub fn algebraic_intersection(a: &PlanePath, b: &PlanePath) -> Result<i64> {
    let mut total = 0;
    for pa in a.points().windows(2) {
        for pb in b.points().windows(2) {
            if let Some(sign) = segment_crossing(pa[0], pa[1], pb[0], pb[1])? {
                total += sign;
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn torus() -> Torus {
        Torus::new(4.0).unwrap()
    }

    fn circle(center: PlanePoint, radius: f64, n: usize, turns: f64) -> PlanePath {
        let mut pts = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let a = std::f64::consts::TAU * turns * k as f64 / n as f64;
            pts.push(center + PlanePoint::new(radius * a.cos(), radius * a.sin()));
        }
        // Snap the endpoint so full-turn circles close exactly.
        if (turns - turns.round()).abs() < 1e-12 {
            let first = pts[0];
            *pts.last_mut().unwrap() = first;
        }
        PlanePath::new(pts).unwrap()
    }

    #[test]
    fn project_basic() {
        let t = torus();
        let z = t.project(PlanePoint::new(0.0, 0.0));
        assert_eq!((z.x, z.y), (0.0, 0.0));
        let z = t.project(PlanePoint::new(5.0, -1.0));
        assert_eq!((z.x, z.y), (1.0, 3.0));
    }

    #[test]
    fn lift_near_cases() {
        let t = torus();
        let z = t.point(0.0, 0.0);
        let l = t.lift_near(z, PlanePoint::new(3.9, 0.0));
        assert_eq!((l.x, l.y), (4.0, 0.0));

        let z = t.point(1.0, 1.0);
        let l = t.lift_near(z, PlanePoint::new(1.0, 1.0));
        assert_eq!((l.x, l.y), (1.0, 1.0));

        // Tie at distance L/2: the greater coordinate wins.
        let z = t.point(2.0, 0.0);
        let l = t.lift_near(z, PlanePoint::new(0.0, 0.0));
        assert_eq!((l.x, l.y), (2.0, 0.0));
    }

    #[test]
    fn winding_circle_counterclockwise() {
        let path = circle(PlanePoint::new(0.0, 0.0), 1.0, 16, 1.0);
        let w = winding_number_closed(&path, PlanePoint::new(0.0, 0.0), &RefineConfig::default())
            .unwrap();
        assert_eq!(w, 1);
    }

    #[test]
    fn winding_segment_around_origin_is_zero() {
        let path = PlanePath::segment(PlanePoint::new(2.0, 0.0), PlanePoint::new(3.0, 0.0)).unwrap();
        let w = winding_number(&path, PlanePoint::new(0.0, 0.0), &RefineConfig::default()).unwrap();
        assert!(w.abs() < 1e-12);
    }

    #[test]
    fn winding_double_clockwise_circle() {
        let center = PlanePoint::new(0.5, -0.25);
        let path = circle(center, 2.0, 64, -2.0);
        let w = winding_number_closed(&path, center, &RefineConfig::default()).unwrap();
        assert_eq!(w, -2);
    }

    #[test]
    fn winding_clearance_violation() {
        let path = PlanePath::segment(PlanePoint::new(-1.0, 0.0), PlanePoint::new(1.0, 0.0)).unwrap();
        let err = winding_number(&path, PlanePoint::new(0.0, 0.0), &RefineConfig::default());
        assert!(matches!(err, Err(Error::ClearanceViolation { .. })));
    }

    #[test]
    fn winding_of_fast_curve_needs_refinement() {
        // Five full turns; 16 fixed samples would alias, the curve engine
        // must not.
        let curve = |t: f64| {
            let a = std::f64::consts::TAU * 5.0 * t;
            PlanePoint::new(a.cos(), a.sin())
        };
        let w =
            winding_of_closed_curve(curve, PlanePoint::new(0.0, 0.0), &RefineConfig::default())
                .unwrap();
        assert_eq!(w, 5);
    }

    #[test]
    fn crossing_sign_convention() {
        // b going up crosses a going right: right-to-left, +1.
        let a = PlanePath::segment(PlanePoint::new(-1.0, 0.0), PlanePoint::new(1.0, 0.0)).unwrap();
        let b = PlanePath::segment(PlanePoint::new(0.0, -1.0), PlanePoint::new(0.0, 1.0)).unwrap();
        assert_eq!(algebraic_intersection(&a, &b).unwrap(), 1);
        assert_eq!(algebraic_intersection(&b, &a).unwrap(), -1);
    }

    #[test]
    fn disjoint_paths_do_not_cross() {
        let a = PlanePath::segment(PlanePoint::new(0.0, 0.0), PlanePoint::new(1.0, 0.0)).unwrap();
        let b = PlanePath::segment(PlanePoint::new(0.0, 1.0), PlanePoint::new(1.0, 1.0)).unwrap();
        assert_eq!(algebraic_intersection(&a, &b).unwrap(), 0);
    }

    #[test]
    fn two_opposite_crossings_cancel() {
        // A chord crossing a circle-ish arc twice with opposite signs.
        // Oracle: brute-force scan of the explicit segment pairs below.
        let a = PlanePath::segment(PlanePoint::new(-2.0, 0.1), PlanePoint::new(2.0, 0.1)).unwrap();
        let b = circle(PlanePoint::new(0.0, 0.0), 1.0, 64, 1.0);
        let brute: i64 = {
            let mut n = 0;
            for pa in a.points().windows(2) {
                for pb in b.points().windows(2) {
                    if let Ok(Some(s)) = segment_crossing(pa[0], pa[1], pb[0], pb[1]) {
                        n += s;
                    }
                }
            }
            n
        };
        assert_eq!(brute, 0);
        assert_eq!(algebraic_intersection(&a, &b).unwrap(), 0);
    }

    #[test]
    fn endpoint_contact_is_degenerate() {
        let a = PlanePath::segment(PlanePoint::new(-1.0, 0.0), PlanePoint::new(1.0, 0.0)).unwrap();
        let b = PlanePath::segment(PlanePoint::new(0.0, 0.0), PlanePoint::new(0.0, 1.0)).unwrap();
        assert!(matches!(
            algebraic_intersection(&a, &b),
            Err(Error::DegenerateIncidence)
        ));
    }

    #[test]
    fn collinear_overlap_is_degenerate() {
        let a = PlanePath::segment(PlanePoint::new(0.0, 0.0), PlanePoint::new(2.0, 0.0)).unwrap();
        let b = PlanePath::segment(PlanePoint::new(1.0, 0.0), PlanePoint::new(3.0, 0.0)).unwrap();
        assert!(matches!(
            algebraic_intersection(&a, &b),
            Err(Error::DegenerateIncidence)
        ));
    }

    #[test]
    fn concatenation_additivity() {
        let a = PlanePath::segment(PlanePoint::new(-2.0, 0.0), PlanePoint::new(2.0, 0.0)).unwrap();
        let b1 = PlanePath::segment(PlanePoint::new(-1.0, -1.0), PlanePoint::new(-1.0, 1.0)).unwrap();
        let b2 = PlanePath::segment(PlanePoint::new(-1.0, 1.0), PlanePoint::new(1.0, -1.0)).unwrap();
        let whole = b1.concat(&b2).unwrap();
        let sum = algebraic_intersection(&a, &b1).unwrap() + algebraic_intersection(&a, &b2).unwrap();
        assert_eq!(algebraic_intersection(&a, &whole).unwrap(), sum);
    }

    proptest! {
        #[test]
        fn deck_action_commutes_with_projection(
            x in -20.0f64..20.0, y in -20.0f64..20.0, m in -3i64..=3, n in -3i64..=3,
        ) {
            let t = torus();
            let p = PlanePoint::new(x, y);
            let d = DeckElement::new(m, n);
            let a = t.project(d.apply(p, t.modulus()));
            let b = t.project(p);
            prop_assert!(t.dist(a, b) < 1e-9);
        }

        #[test]
        fn lift_near_round_trip(
            zx in 0.0f64..4.0, zy in 0.0f64..4.0,
            rx in -10.0f64..10.0, ry in -10.0f64..10.0,
        ) {
            let t = torus();
            let z = t.point(zx, zy);
            let l = t.lift_near(z, PlanePoint::new(rx, ry));
            prop_assert!(t.dist(t.project(l), z) < 1e-12);
            let half_diag = t.modulus() * std::f64::consts::SQRT_2 / 2.0;
            prop_assert!(l.dist(PlanePoint::new(rx, ry)) <= half_diag + 1e-12);
        }

        #[test]
        fn winding_deck_equivariance_closed(
            cx in -1.0f64..1.0, cy in -1.0f64..1.0,
            r in 0.2f64..1.5, m in -2i64..=2, n in -2i64..=2,
            wx in -0.1f64..0.1, wy in -0.1f64..0.1,
        ) {
            let t = torus();
            let center = PlanePoint::new(cx, cy);
            let w = center + PlanePoint::new(wx * r, wy * r);
            let path = circle(center, r, 32, 1.0);
            let d = DeckElement::new(m, n).offset(t.modulus());
            let w0 = winding_number_closed(&path, w, &RefineConfig::default()).unwrap();
            let w1 = winding_number_closed(&path.translated(d), w + d, &RefineConfig::default()).unwrap();
            prop_assert_eq!(w0, w1);
        }

        #[test]
        fn winding_outside_hull_is_zero(
            r in 0.3f64..2.0, wx in 2.5f64..10.0, wy in -10.0f64..10.0, turns in 1i32..3,
        ) {
            // Any point beyond the circumscribed radius sees winding 0.
            let path = circle(PlanePoint::new(0.0, 0.0), r, 24, turns as f64);
            let w = PlanePoint::new(wx * r, wy.signum() * (wy.abs() + 2.5) * r);
            let got = winding_number_closed(&path, w, &RefineConfig::default()).unwrap();
            prop_assert_eq!(got, 0);
        }

        #[test]
        fn intersection_antisymmetry(
            ax in -2.0f64..2.0, ay in -2.0f64..2.0,
            bx in -2.0f64..2.0, by in -2.0f64..2.0,
            cx in -2.0f64..2.0, cy in -2.0f64..2.0,
            dx in -2.0f64..2.0, dy in -2.0f64..2.0,
        ) {
            let a = PlanePoint::new(ax, ay);
            let b = PlanePoint::new(bx, by);
            let c = PlanePoint::new(cx, cy);
            let d = PlanePoint::new(dx, dy);
            prop_assume!(a != b && c != d);
            let p = PlanePath::segment(a, b).unwrap();
            let q = PlanePath::segment(c, d).unwrap();
            match (algebraic_intersection(&p, &q), algebraic_intersection(&q, &p)) {
                (Ok(s), Ok(t)) => prop_assert_eq!(s, -t),
                (Err(_), Err(_)) => {}
                _ => prop_assert!(false, "degeneracy must be symmetric"),
            }
        }
    }
}
