//! First-return machinery on free disks, Birkhoff intersection sums, the
//! linking number of recurrent points and rotation vectors of orbits.
//!
//! The Birkhoff sum `L_n` is the signed intersection count of a transversal
//! arc from one fixed lift `a` to another `b` against the closed-up lifted
//! trajectory family of `z` through the `n`-th return. The walker below
//! accumulates crossings one time-step arc at a time:
//!
//! * trajectory arcs are refined adaptively and checked against the
//!   transversal for every deck translate whose curve can reach it
//!   (a conservative displacement bound keeps the candidate set complete);
//! * at each return the closing chord (a straight segment inside the disk,
//!   chosen per the return component) is counted transiently, so running
//!   estimates `L_n / tau_n` are available along the way;
//! * degenerate incidences against the transversal are retried with the
//!   transversal bent by a deterministic sub-geometric jitter; three
//!   failures surface the error.
//!
//! The value of `L_n` is chord-independent and the intersection route must
//! agree with the winding-number route ([`birkhoff_l_by_winding`]); both
//! facts are exercised by tests rather than assumed.

use crate::cover::{segment_crossing, PlanePoint, RefineConfig, Torus, TorusPoint};
use crate::isotopy::{normalize_fixing_two, Isotopy, PlaneIsotopy, FIXED_TOL};
use crate::{rng, Error, Result};

/// Default iteration cap for orbit walks.
pub const DEFAULT_ORBIT_CAP: u64 = 1_000_000;

/// An open disk on the torus used to induce the first-return map.
#[derive(Clone, Copy, Debug)]
pub struct ReturnDisk {
    pub center: TorusPoint,
    pub radius: f64,
    /// Iteration cap before a missing return is reported.
    pub cap: u64,
}

impl ReturnDisk {
    pub fn new(torus: &Torus, center: TorusPoint, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || radius >= torus.modulus() / 4.0 {
            return Err(Error::Config(format!(
                "return disk radius must lie in (0, L/4), got {radius}"
            )));
        }
        Ok(Self {
            center,
            radius,
            cap: DEFAULT_ORBIT_CAP,
        })
    }

    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }

    pub fn contains(&self, torus: &Torus, z: TorusPoint) -> bool {
        torus.dist(self.center, z) < self.radius
    }

    /// The disk must keep both marked points outside to be admissible for
    /// intersection sums.
    fn check_avoids(&self, torus: &Torus, a: TorusPoint, b: TorusPoint) -> Result<()> {
        if torus.dist(self.center, a) <= self.radius || torus.dist(self.center, b) <= self.radius {
            return Err(Error::Config(
                "return disk must avoid the projections of both fixed lifts".into(),
            ));
        }
        Ok(())
    }
}

/// First return of `z` to the disk: the least `n >= 1` with `F^n(z)` in it.
pub fn first_return(iso: &Isotopy, disk: &ReturnDisk, z: TorusPoint) -> Result<(u64, TorusPoint)> {
    let torus = iso.torus();
    if !disk.contains(&torus, z) {
        return Err(Error::Config("first return needs z inside the disk".into()));
    }
    let mut cur = z;
    for n in 1..=disk.cap {
        cur = iso.time_one_torus(cur);
        if disk.contains(&torus, cur) {
            return Ok((n, cur));
        }
    }
    Err(Error::CapExceeded { cap: disk.cap })
}

/// One recorded return.
#[derive(Clone, Copy, Debug)]
pub struct Return {
    /// Return time of this step.
    pub tau: u64,
    /// Cumulative time since the base point.
    pub cumulative: u64,
    pub point: TorusPoint,
}

/// The first `n` returns of a point.
#[derive(Clone, Debug)]
pub struct ReturnOrbit {
    pub base: TorusPoint,
    pub returns: Vec<Return>,
}

pub fn return_orbit(iso: &Isotopy, disk: &ReturnDisk, z: TorusPoint, n: usize) -> Result<ReturnOrbit> {
    let mut returns = Vec::with_capacity(n);
    let mut cur = z;
    let mut cumulative = 0u64;
    for _ in 0..n {
        let (tau, next) = first_return(iso, disk, cur)?;
        cumulative += tau;
        returns.push(Return {
            tau,
            cumulative,
            point: next,
        });
        cur = next;
    }
    Ok(ReturnOrbit { base: z, returns })
}

/// Convergence policy for orbit limits.
#[derive(Clone, Copy, Debug)]
pub struct ConvergenceConfig {
    /// Number of successive record-close return estimates that must agree.
    pub window: usize,
    /// Spread tolerance over the window.
    pub tol: f64,
    /// Torus distance below which a return counts as an exact period and
    /// the value is returned as a rational without limit machinery.
    pub periodic_eps: f64,
    /// Iteration cap.
    pub max_iterations: u64,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        Self {
            window: 8,
            tol: 1e-3,
            periodic_eps: 1e-9,
            max_iterations: DEFAULT_ORBIT_CAP,
        }
    }
}

/// Result of a recurrent-linking limit.
#[derive(Clone, Copy, Debug)]
pub struct LinkingEstimate {
    pub value: f64,
    /// Spread of the last estimate window (0 for exact rationals).
    pub spread: f64,
    pub iterations: u64,
    pub returns: u64,
    /// `(numerator, denominator)` when the orbit closed exactly.
    pub exact: Option<(i64, u64)>,
    pub converged: bool,
}

/// Result of a rotation-vector limit.
#[derive(Clone, Copy, Debug)]
pub struct RotationEstimate {
    pub vector: PlanePoint,
    pub spread: f64,
    pub iterations: u64,
    /// `(m, n, period)`: lattice class per exact period, when periodic.
    pub exact: Option<(i64, i64, u64)>,
    pub converged: bool,
}

const JITTER_ATTEMPTS: u32 = 3;

/// The transversal arc from `a` to `b`: straight, or bent at a jittered
/// midpoint after a degenerate incidence.
struct Transversal {
    segs: [(PlanePoint, PlanePoint); 2],
    seg_count: usize,
    ends: [PlanePoint; 3],
    end_count: usize,
    lo: PlanePoint,
    hi: PlanePoint,
}

impl Transversal {
    fn build(a: PlanePoint, b: PlanePoint, l: f64, seed: u64, attempt: u32) -> Self {
        let zero = PlanePoint::new(0.0, 0.0);
        let (segs, seg_count, ends, end_count) = if attempt == 0 {
            ([(a, b), (zero, zero)], 1, [a, b, zero], 2)
        } else {
            let dir = b - a;
            let n = PlanePoint::new(-dir.y, dir.x) * (1.0 / dir.norm());
            let amp = 1e-7 * l * (1.0 + rng::unit(seed, attempt as u64));
            let mid = (a + b) * 0.5 + n * amp;
            ([(a, mid), (mid, b)], 2, [a, mid, b], 3)
        };
        let mut lo = a;
        let mut hi = a;
        for &(p, q) in segs.iter().take(seg_count) {
            for r in [p, q] {
                lo.x = lo.x.min(r.x);
                lo.y = lo.y.min(r.y);
                hi.x = hi.x.max(r.x);
                hi.y = hi.y.max(r.y);
            }
        }
        Self {
            segs,
            seg_count,
            ends,
            end_count,
            lo,
            hi,
        }
    }

    #[inline]
    fn shifted_overlaps(&self, shift: PlanePoint, lo: PlanePoint, hi: PlanePoint) -> bool {
        lo.x <= self.hi.x + shift.x
            && hi.x >= self.lo.x + shift.x
            && lo.y <= self.hi.y + shift.y
            && hi.y >= self.lo.y + shift.y
    }

    /// Signed crossings of the segment `p0 -> p1` over the transversal
    /// shifted by `shift`.
    #[inline]
    fn crossings(&self, shift: PlanePoint, p0: PlanePoint, p1: PlanePoint) -> Result<i64> {
        let mut total = 0;
        for &(a, b) in self.segs.iter().take(self.seg_count) {
            if let Some(sign) = segment_crossing(a + shift, b + shift, p0, p1)? {
                total += sign;
            }
        }
        Ok(total)
    }

    /// Distance from `p` to the nearest transversal endpoint under `shift`.
    #[inline]
    fn end_clearance_one(&self, shift: PlanePoint, p: PlanePoint) -> f64 {
        let mut best = f64::INFINITY;
        for &e in self.ends.iter().take(self.end_count) {
            best = best.min(p.dist(e + shift));
        }
        best
    }
}

/// Complete candidate filter: which deck translates `alpha` of the base
/// curve can reach the transversal.
///
/// Equivariant curves (plain lifts) satisfy `curve_alpha = curve_0 + alpha`
/// and stay within the displacement bound of their base point, so a padded
/// bounding-box test is complete. Renormalized curves are confined to a
/// certified annulus around the anchor `a` derived from the multiplier
/// range.
enum Reach {
    Equivariant { bound: f64 },
    Normalized {
        a: PlanePoint,
        mu_lo: f64,
        bound: f64,
        seg_reach: f64,
    },
}

impl Reach {
    fn arc_may_touch(
        &self,
        q: PlanePoint,
        step_end: PlanePoint,
        trans: &Transversal,
        alpha: PlanePoint,
    ) -> bool {
        match self {
            Reach::Equivariant { bound } => {
                let pad = *bound + 1e-9;
                let lo = PlanePoint::new(q.x.min(step_end.x) - pad, q.y.min(step_end.y) - pad);
                let hi = PlanePoint::new(q.x.max(step_end.x) + pad, q.y.max(step_end.y) + pad);
                // curve_alpha near T  <=>  curve_0 near T - alpha.
                trans.shifted_overlaps(-alpha, lo, hi)
            }
            Reach::Normalized {
                a,
                mu_lo,
                bound,
                seg_reach,
            } => {
                // |curve(s, q + alpha) - a| >= mu_lo (|q + alpha - a| - 2 bound),
                // and the transversal lies within seg_reach of `a`.
                let d = (q + alpha - *a).norm().min((step_end + alpha - *a).norm());
                mu_lo * (d - 2.0 * bound) <= *seg_reach + 1e-9
            }
        }
    }
}

struct Walker<'a> {
    iso: &'a Isotopy,
    plane: PlaneIsotopy,
    torus: Torus,
    trans: Transversal,
    reach: Reach,
    cfg: RefineConfig,
    /// Candidate deck shifts (applied to the transversal with a minus
    /// sign, equivalently to the curve with a plus sign).
    candidates: Vec<PlanePoint>,
    /// Extra ring of shifts that must contribute nothing.
    ring: Vec<PlanePoint>,
    verify_ring: bool,
    anchor: PlanePoint,
    rebuild_radius: f64,
}

impl<'a> Walker<'a> {
    fn new(
        iso: &'a Isotopy,
        a: PlanePoint,
        b: PlanePoint,
        z: TorusPoint,
        cfg: &RefineConfig,
        seed: u64,
        attempt: u32,
        verify_ring: bool,
    ) -> Result<Self> {
        let torus = iso.torus();
        let plane = normalize_fixing_two(iso, a, b, cfg)?;
        let l = torus.modulus();
        let trans = Transversal::build(a, b, l, seed, attempt);
        let bound = iso.displacement_bound();
        let (mu_lo, _mu_hi) = plane.multiplier_range();
        let seg_reach = (b - a).norm() + 1.0;
        let reach = if plane.is_normalized() {
            Reach::Normalized {
                a,
                mu_lo,
                bound,
                seg_reach,
            }
        } else {
            Reach::Equivariant { bound }
        };
        let mut walker = Self {
            iso,
            plane,
            torus,
            trans,
            reach,
            cfg: *cfg,
            candidates: Vec::new(),
            ring: Vec::new(),
            verify_ring,
            anchor: torus.embed(z),
            rebuild_radius: l / 2.0,
        };
        walker.rebuild_candidates(walker.anchor);
        Ok(walker)
    }

    /// Enumerate curve translates `alpha` that could reach the transversal
    /// from any orbit position within `rebuild_radius` of `anchor`, plus a
    /// verification ring one modulus further out.
    fn rebuild_candidates(&mut self, anchor: PlanePoint) {
        self.anchor = anchor;
        let l = self.torus.modulus();
        let (focus, reach_r) = match &self.reach {
            Reach::Equivariant { bound } => {
                let trans_mid = (self.trans.lo + self.trans.hi) * 0.5;
                let trans_half = (self.trans.hi - self.trans.lo).norm() * 0.5;
                (trans_mid, bound + self.rebuild_radius + trans_half + 1.0)
            }
            Reach::Normalized {
                a,
                mu_lo,
                bound,
                seg_reach,
            } => (
                *a,
                seg_reach / mu_lo.max(1e-12) + 2.0 * bound + self.rebuild_radius + 1.0,
            ),
        };
        // Candidate iff anchor + alpha lands within reach of the focus.
        let span = ((reach_r + (anchor - focus).norm() + l) / l).ceil() as i64;
        self.candidates.clear();
        self.ring.clear();
        for m in -span..=span {
            for n in -span..=span {
                let alpha = PlanePoint::new(m as f64 * l, n as f64 * l);
                let d = (anchor + alpha - focus).norm();
                if d <= reach_r {
                    self.candidates.push(alpha);
                } else if d <= reach_r + l {
                    self.ring.push(alpha);
                }
            }
        }
        // The hot path screens candidates through a 64-bit mask.
        assert!(
            self.candidates.len() <= 64 && self.ring.len() <= 64,
            "transversal reach spans too many deck translates"
        );
    }

    /// Crossings contributed by the time-step arc starting at `p0` (base
    /// lift chain), ending at `p1`, summed over candidate shifts.
    fn arc_crossings(&self, p0: PlanePoint, p1: PlanePoint) -> Result<i64> {
        let total = self.arc_crossings_over(p0, p1, &self.candidates)?;
        if self.verify_ring {
            let ring = self.arc_crossings_over(p0, p1, &self.ring)?;
            if ring != 0 {
                return Err(Error::TruncationUnverified);
            }
        }
        Ok(total)
    }

    fn arc_crossings_over(
        &self,
        p0: PlanePoint,
        p1: PlanePoint,
        alphas: &[PlanePoint],
    ) -> Result<i64> {
        // Cheap complete pre-filter per translate; candidate sets are small
        // so a bitmask avoids allocation in the hot loop.
        debug_assert!(alphas.len() <= 64);
        let mut mask = 0u64;
        for (i, &alpha) in alphas.iter().enumerate() {
            if self.reach.arc_may_touch(p0, p1, &self.trans, alpha) {
                mask |= 1 << i;
            }
        }
        if mask == 0 {
            return Ok(0);
        }
        if let Some(iso) = self.plane.as_lifted() {
            // curve_alpha = curve_0 + alpha: refine the base arc once and
            // count the same chords against each shifted transversal.
            let curve = |s: f64| iso.lift(s, p0);
            self.recurse_fast(&curve, 0.0, p0, 1.0, p1, 0, alphas, mask)
        } else {
            // Renormalized curves are not translation-covariant: evaluate
            // each translate's arc separately.
            let mut total = 0i64;
            let zero = [PlanePoint::new(0.0, 0.0)];
            for (i, &alpha) in alphas.iter().enumerate() {
                if mask & (1 << i) == 0 {
                    continue;
                }
                let start = p0 + alpha;
                let curve = |s: f64| -> Result<PlanePoint> { self.plane.eval(s, start) };
                total +=
                    self.recurse_arc(&curve, 0.0, curve(0.0)?, 1.0, curve(1.0)?, 0, &zero, 1)?;
            }
            Ok(total)
        }
    }

    /// Monomorphized recursion for plain lifted curves, the hot path of
    /// grid quadrature.
    #[allow(clippy::too_many_arguments)]
    fn recurse_fast<C: Fn(f64) -> PlanePoint>(
        &self,
        curve: &C,
        s0: f64,
        p0: PlanePoint,
        s1: f64,
        p1: PlanePoint,
        depth: u32,
        alphas: &[PlanePoint],
        mask: u64,
    ) -> Result<i64> {
        let sm = 0.5 * (s0 + s1);
        let pm = curve(sm);
        let chord_mid = (p0 + p1) * 0.5;
        let bulge = pm.dist(chord_mid);
        let pad = 4.0 * bulge + 1e-9;
        let lo = PlanePoint::new(p0.x.min(p1.x).min(pm.x) - pad, p0.y.min(p1.y).min(pm.y) - pad);
        let hi = PlanePoint::new(p0.x.max(p1.x).max(pm.x) + pad, p0.y.max(p1.y).max(pm.y) + pad);
        let mut live = 0u64;
        let mut bits = mask;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            if self.trans.shifted_overlaps(-alphas[i], lo, hi) {
                live |= 1 << i;
            }
        }
        if live == 0 {
            return Ok(0);
        }
        if depth >= self.cfg.max_depth {
            return Err(Error::RefinementExhausted { depth });
        }
        // Acceptance needs the chord short relative to the endpoint
        // clearance; probe one live translate cheaply before paying for
        // the full minimum.
        let len = p0.dist(p1);
        let first = live.trailing_zeros() as usize;
        let probe = self.trans.end_clearance_one(-alphas[first], pm);
        if len <= probe && bulge <= 0.1 * probe {
            let mut end_clear = f64::INFINITY;
            let mut bits = live;
            while bits != 0 {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let neg = -alphas[i];
                end_clear = end_clear
                    .min(self.trans.end_clearance_one(neg, pm))
                    .min(self.trans.end_clearance_one(neg, p0))
                    .min(self.trans.end_clearance_one(neg, p1));
            }
            if end_clear <= self.cfg.clearance {
                return Err(Error::ClearanceViolation {
                    distance: end_clear,
                    clearance: self.cfg.clearance,
                });
            }
            if bulge <= 0.1 * end_clear && len <= end_clear {
                let mut total = 0;
                let mut bits = live;
                while bits != 0 {
                    let i = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    total += self.trans.crossings(-alphas[i], p0, pm)?;
                    total += self.trans.crossings(-alphas[i], pm, p1)?;
                }
                return Ok(total);
            }
        }
        Ok(self.recurse_fast(curve, s0, p0, sm, pm, depth + 1, alphas, live)?
            + self.recurse_fast(curve, sm, pm, s1, p1, depth + 1, alphas, live)?)
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse_arc(
        &self,
        curve: &dyn Fn(f64) -> Result<PlanePoint>,
        s0: f64,
        p0: PlanePoint,
        s1: f64,
        p1: PlanePoint,
        depth: u32,
        alphas: &[PlanePoint],
        mask: u64,
    ) -> Result<i64> {
        let sm = 0.5 * (s0 + s1);
        let pm = curve(sm)?;
        let chord_mid = (p0 + p1) * 0.5;
        let bulge = pm.dist(chord_mid);
        let pad = 4.0 * bulge + 1e-9;
        let lo = PlanePoint::new(p0.x.min(p1.x).min(pm.x) - pad, p0.y.min(p1.y).min(pm.y) - pad);
        let hi = PlanePoint::new(p0.x.max(p1.x).max(pm.x) + pad, p0.y.max(p1.y).max(pm.y) + pad);
        let mut live = 0u64;
        let mut bits = mask;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            if self.trans.shifted_overlaps(-alphas[i], lo, hi) {
                live |= 1 << i;
            }
        }
        if live == 0 {
            return Ok(0);
        }
        if depth >= self.cfg.max_depth {
            return Err(Error::RefinementExhausted { depth });
        }
        let mut end_clear = f64::INFINITY;
        let mut bits = live;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let neg = -alphas[i];
            end_clear = end_clear
                .min(self.trans.end_clearance_one(neg, pm))
                .min(self.trans.end_clearance_one(neg, p0))
                .min(self.trans.end_clearance_one(neg, p1));
        }
        if end_clear <= self.cfg.clearance {
            return Err(Error::ClearanceViolation {
                distance: end_clear,
                clearance: self.cfg.clearance,
            });
        }
        let len = p0.dist(p1);
        if bulge <= 0.1 * end_clear && len <= end_clear {
            let mut total = 0;
            let mut bits = live;
            while bits != 0 {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                total += self.trans.crossings(-alphas[i], p0, pm)?;
                total += self.trans.crossings(-alphas[i], pm, p1)?;
            }
            return Ok(total);
        }
        Ok(self.recurse_arc(curve, s0, p0, sm, pm, depth + 1, alphas, live)?
            + self.recurse_arc(curve, sm, pm, s1, p1, depth + 1, alphas, live)?)
    }

    /// Crossings of the closing chord from the current orbit position to
    /// the in-disk lift of `z`, summed over candidate shifts.
    fn chord_crossings(&self, from: PlanePoint, to: PlanePoint) -> Result<i64> {
        if from == to {
            return Ok(0);
        }
        let pad = 1e-9;
        let lo = PlanePoint::new(from.x.min(to.x) - pad, from.y.min(to.y) - pad);
        let hi = PlanePoint::new(from.x.max(to.x) + pad, from.y.max(to.y) + pad);
        let mut total = 0;
        for &alpha in &self.candidates {
            if self.trans.shifted_overlaps(-alpha, lo, hi) {
                total += self.trans.crossings(-alpha, from, to)?;
            }
        }
        if self.verify_ring {
            for &alpha in &self.ring {
                if self.trans.shifted_overlaps(-alpha, lo, hi)
                    && self.trans.crossings(-alpha, from, to)? != 0
                {
                    return Err(Error::TruncationUnverified);
                }
            }
        }
        Ok(total)
    }
}

enum WalkGoal {
    /// Stop at exactly this many returns; yields `L_n` as an integer.
    Returns(u64),
    /// Track record-close returns until the estimate window stabilizes.
    Converge(ConvergenceConfig),
}

enum WalkOutcome {
    Exact { l: i64, tau: u64 },
    Estimate(LinkingEstimate),
}

fn walk(
    iso: &Isotopy,
    a: PlanePoint,
    b: PlanePoint,
    z: TorusPoint,
    disk: &ReturnDisk,
    goal: &WalkGoal,
    cfg: &RefineConfig,
    seed: u64,
    verify_ring: bool,
) -> Result<WalkOutcome> {
    let torus = iso.torus();
    let ra = iso.lift_residual(a);
    if ra >= FIXED_TOL {
        return Err(Error::NotFixed { residual: ra });
    }
    let rb = iso.lift_residual(b);
    if rb >= FIXED_TOL {
        return Err(Error::NotFixed { residual: rb });
    }
    disk.check_avoids(&torus, torus.project(a), torus.project(b))?;
    if !disk.contains(&torus, z) {
        return Err(Error::Config("base point must lie in the return disk".into()));
    }

    let mut attempt = 0;
    loop {
        match walk_attempt(iso, a, b, z, disk, goal, cfg, seed, attempt, verify_ring) {
            Err(Error::DegenerateIncidence) if attempt + 1 < JITTER_ATTEMPTS => {
                attempt += 1;
            }
            other => return other,
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn walk_attempt(
    iso: &Isotopy,
    a: PlanePoint,
    b: PlanePoint,
    z: TorusPoint,
    disk: &ReturnDisk,
    goal: &WalkGoal,
    cfg: &RefineConfig,
    seed: u64,
    attempt: u32,
    verify_ring: bool,
) -> Result<WalkOutcome> {
    let torus = iso.torus();
    let mut walker = Walker::new(iso, a, b, z, cfg, seed, attempt, verify_ring)?;
    let base_lift = torus.embed(z);

    let (cap, conv) = match goal {
        WalkGoal::Returns(_) => (disk.cap, None),
        WalkGoal::Converge(c) => (c.max_iterations.min(disk.cap), Some(*c)),
    };

    let mut crossings = 0i64;
    let mut cur = base_lift;
    let mut returns = 0u64;
    let mut best = f64::INFINITY;
    let mut window: Vec<f64> = Vec::new();
    let mut last_estimate = f64::NAN;

    for k in 1..=cap {
        if cur.dist(walker.anchor) > walker.rebuild_radius - 1e-9 {
            walker.rebuild_candidates(cur);
        }
        let next = iso.time_one(cur);
        crossings += walker.arc_crossings(cur, next)?;
        cur = next;
        let cur_torus = torus.project(cur);
        if disk.contains(&torus, cur_torus) {
            returns += 1;
            let z_lift = torus.lift_near(z, cur);
            let chord = walker.chord_crossings(cur, z_lift)?;
            let l_n = crossings + chord;
            match goal {
                WalkGoal::Returns(n) => {
                    if returns == *n {
                        return Ok(WalkOutcome::Exact { l: l_n, tau: k });
                    }
                }
                WalkGoal::Converge(_) => {
                    let conv = conv.as_ref().unwrap();
                    let d = torus.dist(cur_torus, z);
                    if d < conv.periodic_eps {
                        return Ok(WalkOutcome::Exact { l: l_n, tau: k });
                    }
                    if d < best * 0.999 {
                        best = d;
                        last_estimate = l_n as f64 / k as f64;
                        window.push(last_estimate);
                        if window.len() > conv.window {
                            window.remove(0);
                        }
                        if window.len() == conv.window {
                            let spread = window_spread(&window);
                            if spread < conv.tol {
                                return Ok(WalkOutcome::Estimate(LinkingEstimate {
                                    value: last_estimate,
                                    spread,
                                    iterations: k,
                                    returns,
                                    exact: None,
                                    converged: true,
                                }));
                            }
                        }
                    }
                }
            }
        }
    }

    match goal {
        WalkGoal::Returns(_) => Err(Error::CapExceeded { cap }),
        WalkGoal::Converge(conv) => {
            let spread = if window.len() >= 2 {
                window_spread(&window)
            } else {
                f64::INFINITY
            };
            Ok(WalkOutcome::Estimate(LinkingEstimate {
                value: last_estimate,
                spread,
                iterations: cap,
                returns,
                exact: None,
                converged: last_estimate.is_finite() && spread < conv.tol,
            }))
        }
    }
}

fn window_spread(window: &[f64]) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in window {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    hi - lo
}

/// The Birkhoff intersection sum `L_n` at the `n`-th return of `z`, as an
/// exact integer.
#[allow(clippy::too_many_arguments)]
pub fn birkhoff_l(
    iso: &Isotopy,
    a: PlanePoint,
    b: PlanePoint,
    z: TorusPoint,
    disk: &ReturnDisk,
    n: u64,
    cfg: &RefineConfig,
    seed: u64,
) -> Result<i64> {
    if n == 0 {
        return Err(Error::Config("birkhoff sum needs n >= 1".into()));
    }
    match walk(iso, a, b, z, disk, &WalkGoal::Returns(n), cfg, seed, true)? {
        WalkOutcome::Exact { l, .. } => Ok(l),
        WalkOutcome::Estimate(_) => unreachable!("returns goal yields exact sums"),
    }
}

/// `L_n` together with the return time `tau_n`.
#[allow(clippy::too_many_arguments)]
pub fn birkhoff_l_with_time(
    iso: &Isotopy,
    a: PlanePoint,
    b: PlanePoint,
    z: TorusPoint,
    disk: &ReturnDisk,
    n: u64,
    cfg: &RefineConfig,
    seed: u64,
) -> Result<(i64, u64)> {
    if n == 0 {
        return Err(Error::Config("birkhoff sum needs n >= 1".into()));
    }
    match walk(iso, a, b, z, disk, &WalkGoal::Returns(n), cfg, seed, true)? {
        WalkOutcome::Exact { l, tau } => Ok((l, tau)),
        WalkOutcome::Estimate(_) => unreachable!("returns goal yields exact sums"),
    }
}

/// The linking number of a recurrent point: the limit of `L_n / tau_n`
/// along returns approaching `z`.
///
/// Exactly periodic orbits short-circuit to the rational `L_p / tau_p`.
/// Otherwise estimates are recorded at record-close returns and accepted
/// once a window of them agrees within tolerance; `strict` decides whether
/// an unconverged walk is an error or a flagged estimate.
#[allow(clippy::too_many_arguments)]
pub fn recurrent_linking(
    iso: &Isotopy,
    a: PlanePoint,
    b: PlanePoint,
    z: TorusPoint,
    disk: &ReturnDisk,
    conv: &ConvergenceConfig,
    cfg: &RefineConfig,
    seed: u64,
    strict: bool,
) -> Result<LinkingEstimate> {
    match walk(
        iso,
        a,
        b,
        z,
        disk,
        &WalkGoal::Converge(*conv),
        cfg,
        seed,
        false,
    )? {
        WalkOutcome::Exact { l, tau } => Ok(LinkingEstimate {
            value: l as f64 / tau as f64,
            spread: 0.0,
            iterations: tau,
            returns: 0,
            exact: Some((l, tau)),
            converged: true,
        }),
        WalkOutcome::Estimate(est) => {
            if strict && !est.converged {
                return Err(Error::NotConverged {
                    spread: est.spread,
                    tol: conv.tol,
                });
            }
            Ok(est)
        }
    }
}

/// Rotation vector of a point: the limit of the per-return lattice class
/// over the return time, read off the lifted orbit.
pub fn rotation_vector_point(
    iso: &Isotopy,
    z: TorusPoint,
    disk: &ReturnDisk,
    conv: &ConvergenceConfig,
    strict: bool,
) -> Result<RotationEstimate> {
    let torus = iso.torus();
    if !disk.contains(&torus, z) {
        return Err(Error::Config("base point must lie in the return disk".into()));
    }
    let base = torus.embed(z);
    let l = torus.modulus();
    let mut cur = base;
    let mut best = f64::INFINITY;
    let mut window: Vec<PlanePoint> = Vec::new();
    let mut last = PlanePoint::new(f64::NAN, f64::NAN);
    let cap = conv.max_iterations.min(disk.cap);
    for k in 1..=cap {
        cur = iso.time_one(cur);
        let cur_torus = torus.project(cur);
        if disk.contains(&torus, cur_torus) {
            let z_lift = torus.lift_near(z, cur);
            let m = ((z_lift.x - base.x) / l).round() as i64;
            let n = ((z_lift.y - base.y) / l).round() as i64;
            let d = torus.dist(cur_torus, z);
            if d < conv.periodic_eps {
                return Ok(RotationEstimate {
                    vector: PlanePoint::new(m as f64 * l / k as f64, n as f64 * l / k as f64),
                    spread: 0.0,
                    iterations: k,
                    exact: Some((m, n, k)),
                    converged: true,
                });
            }
            if d < best * 0.999 {
                best = d;
                last = PlanePoint::new(m as f64 * l / k as f64, n as f64 * l / k as f64);
                window.push(last);
                if window.len() > conv.window {
                    window.remove(0);
                }
                if window.len() == conv.window {
                    let spread = vector_spread(&window);
                    if spread < conv.tol {
                        return Ok(RotationEstimate {
                            vector: last,
                            spread,
                            iterations: k,
                            exact: None,
                            converged: true,
                        });
                    }
                }
            }
        }
    }
    let spread = if window.len() >= 2 {
        vector_spread(&window)
    } else {
        f64::INFINITY
    };
    if strict && !(last.x.is_finite() && spread < conv.tol) {
        return Err(Error::NotConverged {
            spread,
            tol: conv.tol,
        });
    }
    Ok(RotationEstimate {
        vector: last,
        spread,
        iterations: cap,
        exact: None,
        converged: last.x.is_finite() && spread < conv.tol,
    })
}

fn vector_spread(window: &[PlanePoint]) -> f64 {
    let (mut lx, mut hx) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut ly, mut hy) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in window {
        lx = lx.min(v.x);
        hx = hx.max(v.x);
        ly = ly.min(v.y);
        hy = hy.max(v.y);
    }
    (hx - lx).max(hy - ly)
}

/// Independent route to `L_n` for closed-up loops: the winding number of
/// the trajectory family around `a` minus the winding around `b`.
///
/// Requires the `n`-th return to land in the same lifted disk component as
/// the start (so every translate curve closes). Kept deliberately separate
/// from the intersection walker; the two must agree exactly.
#[allow(clippy::too_many_arguments)]
pub fn birkhoff_l_by_winding(
    iso: &Isotopy,
    a: PlanePoint,
    b: PlanePoint,
    z: TorusPoint,
    disk: &ReturnDisk,
    n: u64,
    cfg: &RefineConfig,
) -> Result<i64> {
    let torus = iso.torus();
    let ra = iso.lift_residual(a);
    if ra >= FIXED_TOL {
        return Err(Error::NotFixed { residual: ra });
    }
    let rb = iso.lift_residual(b);
    if rb >= FIXED_TOL {
        return Err(Error::NotFixed { residual: rb });
    }
    disk.check_avoids(&torus, torus.project(a), torus.project(b))?;
    let plane = normalize_fixing_two(iso, a, b, cfg)?;
    let base = torus.embed(z);

    // Walk the orbit once, recording positions through the n-th return.
    let mut positions = vec![base];
    let mut cur = base;
    let mut returns = 0;
    for _ in 1..=disk.cap {
        cur = iso.time_one(cur);
        positions.push(cur);
        if disk.contains(&torus, torus.project(cur)) {
            returns += 1;
            if returns == n {
                break;
            }
        }
    }
    if returns < n {
        return Err(Error::CapExceeded { cap: disk.cap });
    }
    let end = *positions.last().unwrap();
    let z_lift = torus.lift_near(z, end);
    if z_lift.dist(base) > 1e-9 {
        return Err(Error::Config(
            "winding route needs a loop: n-th return must close up over the start lift".into(),
        ));
    }

    // Candidate translates whose loop could wind around a or b: the loop
    // for shift s is within the displacement bound of the sampled chain
    // shifted by s.
    let l = torus.modulus();
    let bound = iso.displacement_bound() + 1.0;
    let (mut lo, mut hi) = (positions[0], positions[0]);
    for p in &positions {
        lo = PlanePoint::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = PlanePoint::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let reach = (hi - lo).norm() + 2.0 * bound + 2.0 * l;
    let span = (reach / l).ceil() as i64;
    let mid = (lo + hi) * 0.5;

    let mut total = 0i64;
    for m in -span..=span {
        for nn in -span..=span {
            let shift = PlanePoint::new(m as f64 * l, nn as f64 * l);
            // Skip translates that cannot wind around either marked lift.
            let da = (a - (mid + shift)).norm();
            let db = (b - (mid + shift)).norm();
            let r = (hi - lo).norm() * 0.5 + bound;
            if da > r && db > r {
                continue;
            }
            let wa = loop_winding(&plane, &positions, shift, a, cfg)?;
            let wb = loop_winding(&plane, &positions, shift, b, cfg)?;
            total += wa - wb;
        }
    }
    Ok(total)
}

/// Winding of the closed-up translate curve around `w`: per time-step arcs
/// evaluated through the plane isotopy, plus the closing chord (trivial
/// when the loop closes exactly).
fn loop_winding(
    plane: &PlaneIsotopy,
    positions: &[PlanePoint],
    shift: PlanePoint,
    w: PlanePoint,
    cfg: &RefineConfig,
) -> Result<i64> {
    let mut total = 0.0;
    for k in 0..positions.len() - 1 {
        let q = positions[k] + shift;
        let curve = |s: f64| -> Result<PlanePoint> { plane.eval(s, q) };
        total += arc_angle(&curve, 0.0, curve(0.0)?, 1.0, curve(1.0)?, 0, w, cfg)?;
    }
    // Closing chord from the end back to the start.
    let end = *positions.last().unwrap() + shift;
    let start = positions[0] + shift;
    if end != start {
        let v0 = end - w;
        let v1 = start - w;
        total += v0.cross(v1).atan2(v0.dot(v1));
    }
    let turns = total / std::f64::consts::TAU;
    let rounded = turns.round();
    if (turns - rounded).abs() > 1e-6 {
        return Err(Error::NonIntegralWinding { value: turns });
    }
    Ok(rounded as i64)
}

#[allow(clippy::too_many_arguments)]
fn arc_angle(
    curve: &dyn Fn(f64) -> Result<PlanePoint>,
    s0: f64,
    p0: PlanePoint,
    s1: f64,
    p1: PlanePoint,
    depth: u32,
    w: PlanePoint,
    cfg: &RefineConfig,
) -> Result<f64> {
    let sm = 0.5 * (s0 + s1);
    let pm = curve(sm)?;
    let angle = |u: PlanePoint, v: PlanePoint| -> Result<f64> {
        let (nu, nv) = ((u - w).norm(), (v - w).norm());
        if nu <= cfg.clearance || nv <= cfg.clearance {
            return Err(Error::ClearanceViolation {
                distance: nu.min(nv),
                clearance: cfg.clearance,
            });
        }
        Ok((u - w).cross(v - w).atan2((u - w).dot(v - w)))
    };
    let d0 = angle(p0, pm)?;
    let d1 = angle(pm, p1)?;
    let half = std::f64::consts::FRAC_PI_2;
    if d0.abs() < half && d1.abs() < half {
        return Ok(d0 + d1);
    }
    if depth >= cfg.max_depth {
        return Err(Error::RefinementExhausted { depth });
    }
    Ok(arc_angle(curve, s0, p0, sm, pm, depth + 1, w, cfg)?
        + arc_angle(curve, sm, pm, s1, p1, depth + 1, w, cfg)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isotopy::TwistProfile;

    fn torus() -> Torus {
        Torus::new(4.0).unwrap()
    }

    fn twist() -> Isotopy {
        let t = torus();
        Isotopy::twist(t, t.point(2.0, 2.0), TwistProfile::Linear).unwrap()
    }

    fn center_lift(t: &Torus) -> PlanePoint {
        t.embed(t.point(2.0, 2.0))
    }

    fn exterior_lift() -> PlanePoint {
        PlanePoint::new(0.0, 0.0)
    }

    #[test]
    fn first_return_periods_on_twist_circles() {
        let iso = twist();
        let t = torus();
        // Radius 1/2 rotates by pi per step: period 2.
        let z = t.point(2.5, 2.0);
        let disk = ReturnDisk::new(&t, z, 0.05).unwrap();
        let (tau, back) = first_return(&iso, &disk, z).unwrap();
        assert_eq!(tau, 2);
        assert!(t.dist(back, z) < 1e-12);
        // Radius 1/3: period 3.
        let z = t.point(2.0 + 1.0 / 3.0, 2.0);
        let disk = ReturnDisk::new(&t, z, 0.05).unwrap();
        let (tau, back) = first_return(&iso, &disk, z).unwrap();
        assert_eq!(tau, 3);
        assert!(t.dist(back, z) < 1e-12);
    }

    #[test]
    fn first_return_of_rigid_half_period() {
        let t = torus();
        let iso = Isotopy::rigid(t, PlanePoint::new(2.0, 0.0));
        let z = t.point(1.0, 1.0);
        let disk = ReturnDisk::new(&t, z, 0.5).unwrap();
        let (tau, _) = first_return(&iso, &disk, z).unwrap();
        assert_eq!(tau, 2);
    }

    #[test]
    fn first_return_cap_exceeded_for_drift() {
        let t = torus();
        // Irrational-direction translation never returns to a tiny disk
        // within a short cap.
        let iso = Isotopy::rigid(t, PlanePoint::new(std::f64::consts::SQRT_2, 0.0));
        let z = t.point(1.0, 1.0);
        let disk = ReturnDisk::new(&t, z, 1e-3).unwrap().with_cap(50);
        assert!(matches!(
            first_return(&iso, &disk, z),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn return_orbit_accumulates_times() {
        let iso = twist();
        let t = torus();
        let z = t.point(2.0 + 1.0 / 3.0, 2.0);
        let disk = ReturnDisk::new(&t, z, 0.05).unwrap();
        let orbit = return_orbit(&iso, &disk, z, 4).unwrap();
        assert_eq!(orbit.returns.len(), 4);
        for (j, r) in orbit.returns.iter().enumerate() {
            assert_eq!(r.tau, 3);
            assert_eq!(r.cumulative, 3 * (j as u64 + 1));
            assert!(disk.contains(&t, r.point));
        }
    }

    #[test]
    fn birkhoff_counts_revolutions_of_the_twist() {
        let iso = twist();
        let t = torus();
        let a = center_lift(&t);
        let b = exterior_lift();
        let z = t.point(2.0 + 1.0 / 3.0, 2.0);
        let disk = ReturnDisk::new(&t, z, 0.05).unwrap();
        let cfg = RefineConfig::default();
        // One return = 3 iterates = one full revolution = one crossing.
        let l1 = birkhoff_l(&iso, a, b, z, &disk, 1, &cfg, 7).unwrap();
        assert_eq!(l1, 1);
        // Additivity at the second return.
        let l2 = birkhoff_l(&iso, a, b, z, &disk, 2, &cfg, 7).unwrap();
        assert_eq!(l2, 2);
        // Orientation: swapping the lifts negates the count.
        let neg = birkhoff_l(&iso, b, a, z, &disk, 1, &cfg, 7).unwrap();
        assert_eq!(neg, -1);
    }

    #[test]
    fn birkhoff_additivity_along_returns() {
        let iso = twist();
        let t = torus();
        let a = center_lift(&t);
        let b = exterior_lift();
        let cfg = RefineConfig::default();
        // Radius 2/5: period 5, two revolutions per period.
        let z = t.point(2.4, 2.0);
        let disk = ReturnDisk::new(&t, z, 0.05).unwrap();
        let n = 3;
        let total = birkhoff_l(&iso, a, b, z, &disk, n, &cfg, 7).unwrap();
        // Sum of per-return values along the return orbit.
        let orbit = return_orbit(&iso, &disk, z, n as usize).unwrap();
        let mut sum = 0;
        let mut cur = z;
        for _ in 0..n {
            sum += birkhoff_l(&iso, a, b, cur, &disk, 1, &cfg, 7).unwrap();
            let (_, next) = first_return(&iso, &disk, cur).unwrap();
            cur = next;
        }
        assert_eq!(total, sum);
        assert_eq!(orbit.returns.last().unwrap().cumulative, 15);
    }

    #[test]
    fn birkhoff_cocycle_identity() {
        let iso = twist();
        let t = torus();
        let a = center_lift(&t);
        let b = exterior_lift();
        let c = PlanePoint::new(0.5, 3.5);
        let z = t.point(2.0 + 1.0 / 3.0, 2.0);
        let disk = ReturnDisk::new(&t, z, 0.05).unwrap();
        let cfg = RefineConfig::default();
        let ab = birkhoff_l(&iso, a, b, z, &disk, 2, &cfg, 3).unwrap();
        let bc = birkhoff_l(&iso, b, c, z, &disk, 2, &cfg, 3).unwrap();
        let ca = birkhoff_l(&iso, c, a, z, &disk, 2, &cfg, 3).unwrap();
        assert_eq!(ab + bc + ca, 0);
    }

    #[test]
    fn birkhoff_deck_equivariance() {
        let iso = twist();
        let t = torus();
        let l = t.modulus();
        let a = center_lift(&t);
        let b = exterior_lift();
        let z = t.point(2.0 + 1.0 / 3.0, 2.0);
        let disk = ReturnDisk::new(&t, z, 0.05).unwrap();
        let cfg = RefineConfig::default();
        let base = birkhoff_l(&iso, a, b, z, &disk, 2, &cfg, 3).unwrap();
        let shift = PlanePoint::new(l, -l);
        let moved = birkhoff_l(&iso, a + shift, b + shift, z, &disk, 2, &cfg, 3).unwrap();
        assert_eq!(base, moved);
    }

    #[test]
    fn birkhoff_chord_shape_does_not_matter() {
        // The closing chord is straight by default; a jittered (bent)
        // transversal changes nothing either. Compare seeds: values are
        // exact integers so any admissible geometry agrees.
        let iso = twist();
        let t = torus();
        let a = center_lift(&t);
        let b = exterior_lift();
        let z = t.point(2.0 + 1.0 / 3.0, 2.0);
        let disk = ReturnDisk::new(&t, z, 0.3).unwrap();
        let cfg = RefineConfig::default();
        let v1 = birkhoff_l(&iso, a, b, z, &disk, 3, &cfg, 1).unwrap();
        let v2 = birkhoff_l(&iso, a, b, z, &disk, 3, &cfg, 99).unwrap();
        assert_eq!(v1, v2);
    }

    #[test]
    fn winding_route_agrees_with_intersections() {
        let iso = twist();
        let t = torus();
        let a = center_lift(&t);
        let b = exterior_lift();
        let cfg = RefineConfig::default();
        for (radius, n) in [(1.0 / 3.0, 1u64), (0.4, 1), (0.4, 2), (0.5, 3)] {
            let z = t.point(2.0 + radius, 2.0);
            let disk = ReturnDisk::new(&t, z, 0.05).unwrap();
            let by_int = birkhoff_l(&iso, a, b, z, &disk, n, &cfg, 11).unwrap();
            let by_wind = birkhoff_l_by_winding(&iso, a, b, z, &disk, n, &cfg).unwrap();
            assert_eq!(by_int, by_wind, "radius {radius}, n {n}");
        }
    }

    #[test]
    fn recurrent_linking_rational_radii_exact() {
        let iso = twist();
        let t = torus();
        let a = center_lift(&t);
        let b = exterior_lift();
        let cfg = RefineConfig::default();
        let conv = ConvergenceConfig::default();
        for (num, den) in [(1u64, 3u64), (2, 5), (3, 7)] {
            let r = num as f64 / den as f64;
            let z = t.point(2.0 + r, 2.0);
            let disk = ReturnDisk::new(&t, z, 0.04).unwrap();
            let est = recurrent_linking(&iso, a, b, z, &disk, &conv, &cfg, 5, true).unwrap();
            assert_eq!(est.exact, Some((num as i64, den)), "radius {num}/{den}");
            assert_eq!(est.value, num as f64 / den as f64);
            assert_eq!(est.spread, 0.0);
        }
    }

    #[test]
    fn recurrent_linking_irrational_radius() {
        let iso = twist();
        let t = torus();
        let a = center_lift(&t);
        let b = exterior_lift();
        let cfg = RefineConfig::default();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let z = t.point(2.0 + r, 2.0);
        let disk = ReturnDisk::new(&t, z, 0.04).unwrap();
        let conv = ConvergenceConfig {
            tol: 1e-3,
            ..Default::default()
        };
        let est = recurrent_linking(&iso, a, b, z, &disk, &conv, &cfg, 5, true).unwrap();
        assert!(est.exact.is_none());
        assert!(
            (est.value - r).abs() < 1e-3,
            "value {} vs {}",
            est.value,
            r
        );
    }

    #[test]
    fn recurrent_linking_disk_independence() {
        let iso = twist();
        let t = torus();
        let a = center_lift(&t);
        let b = exterior_lift();
        let cfg = RefineConfig::default();
        let conv = ConvergenceConfig::default();
        let z = t.point(2.0 + 1.0 / 3.0, 2.0);
        let d1 = ReturnDisk::new(&t, z, 0.05).unwrap();
        let d2 = ReturnDisk::new(&t, z, 0.2).unwrap();
        let v1 = recurrent_linking(&iso, a, b, z, &d1, &conv, &cfg, 5, true).unwrap();
        let v2 = recurrent_linking(&iso, a, b, z, &d2, &conv, &cfg, 5, true).unwrap();
        assert_eq!(v1.value, v2.value);
    }

    #[test]
    fn recurrent_linking_invariant_under_time_one_map() {
        let iso = twist();
        let t = torus();
        let a = center_lift(&t);
        let b = exterior_lift();
        let cfg = RefineConfig::default();
        let conv = ConvergenceConfig::default();
        let z = t.point(2.0 + 1.0 / 3.0, 2.0);
        let disk = ReturnDisk::new(&t, z, 0.05).unwrap();
        let v = recurrent_linking(&iso, a, b, z, &disk, &conv, &cfg, 5, true).unwrap();
        let fz = iso.time_one_torus(z);
        let fdisk = ReturnDisk::new(&t, fz, 0.05).unwrap();
        let vf = recurrent_linking(&iso, a, b, fz, &fdisk, &conv, &cfg, 5, true).unwrap();
        assert_eq!(v.value, vf.value);
    }

    #[test]
    fn rotation_vector_cases() {
        let t = torus();
        let conv = ConvergenceConfig::default();
        // Twist orbits stay in one cell: zero vector, exactly.
        let iso = twist();
        let z = t.point(2.0 + 1.0 / 3.0, 2.0);
        let disk = ReturnDisk::new(&t, z, 0.05).unwrap();
        let est = rotation_vector_point(&iso, z, &disk, &conv, true).unwrap();
        assert_eq!(est.vector, PlanePoint::new(0.0, 0.0));
        assert_eq!(est.exact, Some((0, 0, 3)));

        // Rigid rational translation: the vector itself.
        let v = PlanePoint::new(2.0, 1.0); // L/2, L/4
        let iso = Isotopy::rigid(t, v);
        let z = t.point(0.5, 0.5);
        let disk = ReturnDisk::new(&t, z, 0.1).unwrap();
        let est = rotation_vector_point(&iso, z, &disk, &conv, true).unwrap();
        assert!(est.vector.dist(v) < 1e-12);
        assert_eq!(est.exact, Some((2, 1, 4)));

        // Shear on the x-axis circle: drift (L/10, 0) per unit time.
        let iso = Isotopy::shear(t);
        let z = t.point(1.0, 0.0);
        let disk = ReturnDisk::new(&t, z, 0.05).unwrap();
        let est = rotation_vector_point(&iso, z, &disk, &conv, true).unwrap();
        assert!(est.vector.dist(PlanePoint::new(0.4, 0.0)) < 1e-12);
    }

    #[test]
    fn disk_rejects_marked_points_and_bad_radius() {
        let t = torus();
        assert!(ReturnDisk::new(&t, t.point(0.0, 0.0), 1.0).is_err());
        let iso = twist();
        let a = center_lift(&t);
        let b = exterior_lift();
        // Disk containing the projection of a marked lift is inadmissible.
        let z = t.point(2.1, 2.0);
        let disk = ReturnDisk::new(&t, z, 0.3).unwrap();
        assert!(matches!(
            birkhoff_l(&iso, a, b, z, &disk, 1, &RefineConfig::default(), 0),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn walk_rejects_moving_lift() {
        let iso = twist();
        let t = torus();
        let moving = PlanePoint::new(2.5, 2.0);
        let b = exterior_lift();
        let z = t.point(2.0 + 1.0 / 3.0, 2.0);
        let disk = ReturnDisk::new(&t, z, 0.05).unwrap();
        assert!(matches!(
            birkhoff_l(&iso, moving, b, z, &disk, 1, &RefineConfig::default(), 0),
            Err(Error::NotFixed { .. })
        ));
    }
}
