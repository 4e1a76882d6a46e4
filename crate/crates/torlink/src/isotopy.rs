//! Identity isotopies on the torus with their canonical lifts.
//!
//! Isotopies are closed-form evaluators, not stored flows: downstream
//! winding computations re-evaluate trajectories at adaptively refined
//! times, which a sampled flow could not support.
//!
//! Built-in families:
//!
//! * `twist` — rotation of the unit disk about a center by the angle
//!   `2 pi beta(r) t` at radius `r`, identity outside; `beta` is either the
//!   linear ramp `beta(r) = r` (supported on the open unit disk) or the
//!   plateau variant `beta = 1` for `r <= 1/2`, `2(1 - r)` up to `r = 1`.
//! * `shear` — `(x, y) -> (x + (tL/10) cos(2 pi y / L), y + (tL/10) sin(2 pi y / L))`.
//! * `rigid` — translation by `t v`.
//!
//! Composition is time-rescaled concatenation (run the first isotopy on
//! `[0, 1/2]`, then the second applied after the first's time-one map); the
//! pointwise product `t -> G_t o F_t` is homotopic to it with fixed
//! extremities, and tests assert that downstream quantities agree rather
//! than assuming it.

use std::sync::Arc;

use crate::cover::{PlanePath, PlanePoint, RefineConfig, Torus, TorusPoint};
use crate::{Error, Result};

/// Radial rotation profile of the twist family.
///
/// `beta` is the number of turns a circle of radius `r` makes over one time
/// unit. Both profiles vanish for `r >= 1`; the linear ramp is supported on
/// the open disk so points on the boundary circle are static.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TwistProfile {
    Linear,
    Plateau,
}

impl TwistProfile {
    pub fn beta(self, r: f64) -> f64 {
        match self {
            TwistProfile::Linear => {
                if r < 1.0 {
                    r
                } else {
                    0.0
                }
            }
            TwistProfile::Plateau => {
                if r <= 0.5 {
                    1.0
                } else if r <= 1.0 {
                    2.0 * (1.0 - r)
                } else {
                    0.0
                }
            }
        }
    }
}

#[derive(Debug)]
enum Node {
    Identity,
    Rigid {
        v: PlanePoint,
    },
    Twist {
        center: TorusPoint,
        profile: TwistProfile,
    },
    Shear,
    Compose {
        first: Arc<Node>,
        second: Arc<Node>,
    },
    Inverse {
        inner: Arc<Node>,
    },
    Power {
        inner: Arc<Node>,
        q: u32,
    },
}

/// A time-parameterized identity isotopy of the torus with its lift.
///
/// `lift(0, .)` is the identity, the lift commutes with every deck
/// translation, and `project . lift = eval . project`.
#[derive(Clone, Debug)]
pub struct Isotopy {
    torus: Torus,
    node: Arc<Node>,
    name: String,
    smooth: bool,
}

impl Isotopy {
    pub fn identity(torus: Torus) -> Self {
        Self {
            torus,
            node: Arc::new(Node::Identity),
            name: "identity".into(),
            smooth: true,
        }
    }

    /// Rigid translation isotopy `F_t(z) = z + t v`.
    pub fn rigid(torus: Torus, v: PlanePoint) -> Self {
        Self {
            torus,
            node: Arc::new(Node::Rigid { v }),
            name: format!("rigid({}, {})", v.x, v.y),
            smooth: true,
        }
    }

    /// Disk twist about `center` with the given radial profile.
    ///
    /// The supporting unit disk must embed in the torus, which requires
    /// `L > 2`.
    pub fn twist(torus: Torus, center: TorusPoint, profile: TwistProfile) -> Result<Self> {
        if torus.modulus() <= 2.0 {
            return Err(Error::Config(format!(
                "twist support radius 1 exceeds the injectivity radius {} of the torus",
                torus.modulus() / 2.0
            )));
        }
        let name = match profile {
            TwistProfile::Linear => "twist",
            TwistProfile::Plateau => "plateau-twist",
        };
        Ok(Self {
            torus,
            node: Arc::new(Node::Twist { center, profile }),
            name: name.into(),
            smooth: false,
        })
    }

    /// The shear `(x, y) -> (x + (tL/10) cos(2 pi y/L), y + (tL/10) sin(2 pi y/L))`.
    pub fn shear(torus: Torus) -> Self {
        Self {
            torus,
            node: Arc::new(Node::Shear),
            name: "shear".into(),
            smooth: true,
        }
    }

    /// Time-rescaled concatenation: runs `self` on `[0, 1/2]`, then `after`
    /// applied to the image of `self`'s time-one map. The time-one map is
    /// `after_1 o self_1`.
    pub fn compose(&self, after: &Isotopy) -> Result<Isotopy> {
        if self.torus.modulus() != after.torus.modulus() {
            return Err(Error::Config(
                "cannot compose isotopies over different torus moduli".into(),
            ));
        }
        Ok(Isotopy {
            torus: self.torus,
            node: Arc::new(Node::Compose {
                first: self.node.clone(),
                second: after.node.clone(),
            }),
            name: format!("({} ; {})", self.name, after.name),
            smooth: self.smooth && after.smooth,
        })
    }

    /// The inverse isotopy `t -> F_{1-t} o F_1^{-1}`.
    pub fn inverse(&self) -> Isotopy {
        Isotopy {
            torus: self.torus,
            node: Arc::new(Node::Inverse {
                inner: self.node.clone(),
            }),
            name: format!("inverse({})", self.name),
            smooth: self.smooth,
        }
    }

    /// The q-th iterate isotopy, concatenating `I` along the orbit of the
    /// time-one map; its time-one map is `F^q`.
    pub fn power(&self, q: u32) -> Result<Isotopy> {
        if q == 0 {
            return Err(Error::Config("power requires q >= 1".into()));
        }
        if q == 1 {
            return Ok(self.clone());
        }
        Ok(Isotopy {
            torus: self.torus,
            node: Arc::new(Node::Power {
                inner: self.node.clone(),
                q,
            }),
            name: format!("{}^{}", self.name, q),
            smooth: self.smooth,
        })
    }

    pub fn torus(&self) -> Torus {
        self.torus
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_smooth(&self) -> bool {
        self.smooth
    }

    /// The lifted evaluator at time `t in [0, 1]`.
    pub fn lift(&self, t: f64, p: PlanePoint) -> PlanePoint {
        lift_node(&self.node, &self.torus, t, p)
    }

    /// The torus evaluator at time `t`.
    pub fn eval(&self, t: f64, z: TorusPoint) -> TorusPoint {
        self.torus.project(self.lift(t, self.torus.embed(z)))
    }

    /// The lifted time-one map.
    pub fn time_one(&self, p: PlanePoint) -> PlanePoint {
        self.lift(1.0, p)
    }

    /// The torus time-one map.
    pub fn time_one_torus(&self, z: TorusPoint) -> TorusPoint {
        self.eval(1.0, z)
    }

    /// Lifted displacement `F_1(p) - p` of the canonical lift of `z`;
    /// invariant under deck translation.
    pub fn displacement(&self, z: TorusPoint) -> PlanePoint {
        let p = self.torus.embed(z);
        self.time_one(p) - p
    }

    /// Residual of `z` as a torus fixed point of the time-one map.
    pub fn torus_residual(&self, z: TorusPoint) -> f64 {
        self.torus.dist(self.time_one_torus(z), z)
    }

    /// Residual of `p` as a fixed point of the lifted time-one map.
    pub fn lift_residual(&self, p: PlanePoint) -> f64 {
        self.time_one(p).dist(p)
    }

    /// Upper bound on `|F_t(p) - p|` over all `t` and `p`, from the family
    /// structure. Used to size deck-translate searches conservatively.
    pub fn displacement_bound(&self) -> f64 {
        disp_bound(&self.node, &self.torus)
    }
}

fn lift_node(node: &Node, torus: &Torus, t: f64, p: PlanePoint) -> PlanePoint {
    match node {
        Node::Identity => p,
        Node::Rigid { v } => p + *v * t,
        Node::Twist { center, profile } => {
            let c = torus.lift_near(*center, p);
            let d = p - c;
            let r = d.norm();
            let turns = profile.beta(r);
            if turns == 0.0 {
                return p;
            }
            let a = std::f64::consts::TAU * turns * t;
            let (sin, cos) = a.sin_cos();
            c + d.cmul(PlanePoint::new(cos, sin))
        }
        Node::Shear => {
            let l = torus.modulus();
            let phase = std::f64::consts::TAU * p.y / l;
            let amp = t * l / 10.0;
            let (sin, cos) = phase.sin_cos();
            PlanePoint::new(p.x + amp * cos, p.y + amp * sin)
        }
        Node::Compose { first, second } => {
            if t <= 0.5 {
                lift_node(first, torus, 2.0 * t, p)
            } else {
                let mid = lift_node(first, torus, 1.0, p);
                lift_node(second, torus, 2.0 * t - 1.0, mid)
            }
        }
        Node::Inverse { inner } => {
            // F_{1-t} applied to F_1^{-1}(p).
            let q = invert_node(inner, torus, 1.0, p)
                .expect("time-one map of a built-in isotopy must be invertible");
            lift_node(inner, torus, 1.0 - t, q)
        }
        Node::Power { inner, q } => {
            let s = (t * *q as f64).clamp(0.0, *q as f64);
            let k = (s.floor() as u32).min(q - 1);
            let frac = s - k as f64;
            let mut cur = p;
            for _ in 0..k {
                cur = lift_node(inner, torus, 1.0, cur);
            }
            lift_node(inner, torus, frac, cur)
        }
    }
}

/// Solve `F_t(q) = target` for `q`.
///
/// Inversion recurses over the algebra tree, so only primitives are ever
/// solved directly: rigid and twist maps have closed inverses, the shear
/// goes through damped Newton (its displacement field is a contraction).
fn invert_node(node: &Node, torus: &Torus, t: f64, target: PlanePoint) -> Result<PlanePoint> {
    match node {
        Node::Identity => Ok(target),
        Node::Rigid { v } => Ok(target - *v * t),
        Node::Twist { center, profile } => {
            // Rotation preserves the radius, so the backward angle is known.
            let c = torus.lift_near(*center, target);
            let d = target - c;
            let r = d.norm();
            let turns = profile.beta(r);
            if turns == 0.0 {
                return Ok(target);
            }
            let a = -std::f64::consts::TAU * turns * t;
            let (sin, cos) = a.sin_cos();
            Ok(c + d.cmul(PlanePoint::new(cos, sin)))
        }
        Node::Shear => newton_invert(node, torus, t, target),
        Node::Compose { first, second } => {
            if t <= 0.5 {
                invert_node(first, torus, 2.0 * t, target)
            } else {
                let mid = invert_node(second, torus, 2.0 * t - 1.0, target)?;
                invert_node(first, torus, 1.0, mid)
            }
        }
        Node::Inverse { inner } => {
            // The time-t map is inner_{1-t} o inner_1^{-1}, so its inverse
            // is inner_1 o inner_{1-t}^{-1}.
            let q = invert_node(inner, torus, 1.0 - t, target)?;
            Ok(lift_node(inner, torus, 1.0, q))
        }
        Node::Power { inner, q } => {
            let s = (t * *q as f64).clamp(0.0, *q as f64);
            let k = (s.floor() as u32).min(q - 1);
            let frac = s - k as f64;
            let mut cur = invert_node(inner, torus, frac, target)?;
            for _ in 0..k {
                cur = invert_node(inner, torus, 1.0, cur)?;
            }
            Ok(cur)
        }
    }
}

fn newton_invert(node: &Node, torus: &Torus, t: f64, target: PlanePoint) -> Result<PlanePoint> {
    const TOL: f64 = 1e-12;
    let mut q = target;
    let mut res = lift_node(node, torus, t, q) - target;
    for _ in 0..60 {
        if res.norm() < TOL {
            return Ok(q);
        }
        let h = 1e-7 * (1.0 + q.norm());
        let fx = lift_node(node, torus, t, PlanePoint::new(q.x + h, q.y))
            - lift_node(node, torus, t, PlanePoint::new(q.x - h, q.y));
        let fy = lift_node(node, torus, t, PlanePoint::new(q.x, q.y + h))
            - lift_node(node, torus, t, PlanePoint::new(q.x, q.y - h));
        let (a, b) = (fx.x / (2.0 * h), fy.x / (2.0 * h));
        let (c, d) = (fx.y / (2.0 * h), fy.y / (2.0 * h));
        let det = a * d - b * c;
        if det.abs() < 1e-14 {
            return Err(Error::InversionDiverged);
        }
        let step = PlanePoint::new((d * res.x - b * res.y) / det, (-c * res.x + a * res.y) / det);
        // Damped update: halve the step until the residual shrinks.
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..10 {
            let cand = q - step * scale;
            let cand_res = lift_node(node, torus, t, cand) - target;
            if cand_res.norm() < res.norm() {
                q = cand;
                res = cand_res;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if !accepted {
            return Err(Error::InversionDiverged);
        }
    }
    if res.norm() < TOL {
        Ok(q)
    } else {
        Err(Error::InversionDiverged)
    }
}

fn disp_bound(node: &Node, torus: &Torus) -> f64 {
    match node {
        Node::Identity => 0.0,
        Node::Rigid { v } => v.norm(),
        // Every point moves on a circle of radius at most 1 about the
        // center, so displacement is at most the disk diameter.
        Node::Twist { .. } => 2.0,
        Node::Shear => torus.modulus() / 10.0,
        Node::Compose { first, second } => disp_bound(first, torus) + disp_bound(second, torus),
        Node::Inverse { inner } => disp_bound(inner, torus),
        Node::Power { inner, q } => *q as f64 * disp_bound(inner, torus),
    }
}

/// An isotopy of the plane (no deck equivariance required).
#[derive(Clone, Debug)]
pub struct PlaneIsotopy {
    kind: PlaneKind,
}

#[derive(Clone, Debug)]
enum PlaneKind {
    /// The plain lift of a torus isotopy; used when the normalization
    /// multiplier is identically one.
    Lifted(Isotopy),
    /// Renormalization fixing two points for all times.
    Normalized {
        base: Isotopy,
        a: PlanePoint,
        b: PlanePoint,
        clearance: f64,
    },
}

impl PlaneIsotopy {
    pub fn eval(&self, t: f64, p: PlanePoint) -> Result<PlanePoint> {
        match &self.kind {
            PlaneKind::Lifted(iso) => Ok(iso.lift(t, p)),
            PlaneKind::Normalized {
                base,
                a,
                b,
                clearance,
            } => {
                let fa = base.lift(t, *a);
                let fb = base.lift(t, *b);
                let den = fb - fa;
                if den.norm() <= *clearance {
                    return Err(Error::DegenerateDenominator);
                }
                let mul = (*b - *a).cdiv(den);
                Ok(mul.cmul(base.lift(t, p) - fa) + *a)
            }
        }
    }

    /// The time-one map; equals the lifted time-one map of the base isotopy
    /// because both anchor points are fixed there.
    pub fn time_one(&self, p: PlanePoint) -> Result<PlanePoint> {
        self.eval(1.0, p)
    }

    pub fn is_normalized(&self) -> bool {
        matches!(self.kind, PlaneKind::Normalized { .. })
    }

    /// The underlying torus isotopy when the plane isotopy is its plain
    /// (deck-equivariant) lift.
    pub fn as_lifted(&self) -> Option<&Isotopy> {
        match &self.kind {
            PlaneKind::Lifted(iso) => Some(iso),
            PlaneKind::Normalized { .. } => None,
        }
    }

    /// Range of the normalization multiplier magnitude over sampled times,
    /// widened by a safety factor. `(1, 1)` for plain lifts.
    pub fn multiplier_range(&self) -> (f64, f64) {
        match &self.kind {
            PlaneKind::Lifted(_) => (1.0, 1.0),
            PlaneKind::Normalized { base, a, b, .. } => {
                let mut lo = f64::INFINITY;
                let mut hi = 0.0f64;
                for k in 0..=128 {
                    let t = k as f64 / 128.0;
                    let den = (base.lift(t, *b) - base.lift(t, *a)).norm();
                    let m = (*b - *a).norm() / den;
                    lo = lo.min(m);
                    hi = hi.max(m);
                }
                (lo * 0.5, hi * 2.0)
            }
        }
    }
}

/// Residual below which a lift counts as a fixed point of the lifted
/// time-one map.
pub const FIXED_TOL: f64 = 1e-9;

/// Renormalize the lifted isotopy so that the two given fixed lifts stay
/// fixed for all times:
///
/// `I'(p)(t) = (b - a) / (F_t(b) - F_t(a)) * (F_t(p) - F_t(a)) + a`
///
/// with complex arithmetic on plane points. When both anchors are already
/// static under the lift the multiplier is identically one and the plain
/// lift is returned.
pub fn normalize_fixing_two(
    iso: &Isotopy,
    a: PlanePoint,
    b: PlanePoint,
    cfg: &RefineConfig,
) -> Result<PlaneIsotopy> {
    let ra = iso.lift_residual(a);
    if ra >= FIXED_TOL {
        return Err(Error::NotFixed { residual: ra });
    }
    let rb = iso.lift_residual(b);
    if rb >= FIXED_TOL {
        return Err(Error::NotFixed { residual: rb });
    }
    if a.dist(b) <= cfg.clearance {
        return Err(Error::DegenerateDenominator);
    }
    // Static anchors: the multiplier is exactly one at every time and the
    // normalization is the identity on evaluator values.
    let static_anchors = (0..=16).all(|k| {
        let t = k as f64 / 16.0;
        iso.lift(t, a).dist(a) < FIXED_TOL && iso.lift(t, b).dist(b) < FIXED_TOL
    });
    if static_anchors {
        return Ok(PlaneIsotopy {
            kind: PlaneKind::Lifted(iso.clone()),
        });
    }
    Ok(PlaneIsotopy {
        kind: PlaneKind::Normalized {
            base: iso.clone(),
            a,
            b,
            clearance: cfg.clearance,
        },
    })
}

/// A sampled lifted trajectory.
#[derive(Clone, Debug)]
pub enum Trajectory {
    /// The point is static under the whole isotopy.
    Stationary(PlanePoint),
    Arc(PlanePath),
}

/// Sample the lifted trajectory `t -> F_t(p)` at `steps` uniform times.
pub fn trajectory(iso: &Isotopy, p: PlanePoint, steps: usize) -> Result<Trajectory> {
    if steps < 2 {
        return Err(Error::Config("trajectory needs at least 2 samples".into()));
    }
    let mut pts = Vec::with_capacity(steps);
    let mut moving = false;
    for k in 0..steps {
        let t = k as f64 / (steps - 1) as f64;
        let q = iso.lift(t, p);
        if q.dist(p) > 1e-12 {
            moving = true;
        }
        pts.push(q);
    }
    if !moving {
        return Ok(Trajectory::Stationary(p));
    }
    pts.dedup();
    if pts.len() < 2 {
        return Ok(Trajectory::Stationary(p));
    }
    Ok(Trajectory::Arc(PlanePath::new(pts)?))
}
