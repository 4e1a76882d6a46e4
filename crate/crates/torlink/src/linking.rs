//! Pairwise linking numbers of lifted fixed points, their deck sums at a
//! contractible fixed point, boundedness diagnostics on finite lift sets,
//! and sampled verification of the four structural properties of the
//! pairwise linking number (local constancy, deck invariance, vanishing on
//! fibers, vanishing at large distance).
//!
//! Boundedness is only decidable on the finite sets supplied here; reports
//! state bounds for the sample and never claim the property for the full
//! fixed point set.

use rayon::prelude::*;

use crate::cover::{winding_of_closed_curve, DeckElement, PlanePoint, RefineConfig, Torus, TorusPoint};
use crate::isotopy::{Isotopy, FIXED_TOL};
use crate::{Error, Result};

/// A located fixed point of the time-one map.
#[derive(Clone, Copy, Debug)]
pub struct FixedPointRecord {
    pub point: TorusPoint,
    /// Canonical lift in `[0, L)^2`.
    pub lift: PlanePoint,
    /// True when the lift itself is fixed, i.e. the trajectory loop is
    /// null-homotopic.
    pub contractible: bool,
    /// Torus distance between the point and its image.
    pub residual: f64,
    /// Index of the connected component this record was assigned to.
    pub component: usize,
}

/// Output of the grid fixed point search.
#[derive(Clone, Debug)]
pub struct FixedPointSet {
    pub records: Vec<FixedPointRecord>,
    pub component_count: usize,
    /// Minimum displacement magnitude seen over the seed grid; a positive
    /// value on an empty record list certifies the absence of fixed points
    /// at grid resolution.
    pub grid_min_displacement: f64,
    pub grid_n: usize,
}

/// Locate fixed points of the time-one map by seeding an `n x n` grid and
/// refining displacement minima with damped Newton.
///
/// Components of the returned sample are joined when two records lie within
/// one grid step of each other on the torus.
pub fn find_fixed_points(iso: &Isotopy, grid_n: usize, tol: f64) -> Result<FixedPointSet> {
    if grid_n < 8 {
        return Err(Error::Config("fixed point grid needs n >= 8".into()));
    }
    let torus = iso.torus();
    let l = torus.modulus();
    let h = l / grid_n as f64;

    let rows: Vec<(Vec<FixedPointRecord>, f64)> = (0..grid_n)
        .into_par_iter()
        .map(|i| {
            let mut found = Vec::new();
            let mut min_disp = f64::INFINITY;
            for j in 0..grid_n {
                let z = torus.point((i as f64 + 0.5) * h, (j as f64 + 0.5) * h);
                let disp = torus_displacement(iso, &torus, torus.embed(z));
                let d = disp.norm();
                min_disp = min_disp.min(d);
                let refined = if d < tol {
                    Some(torus.embed(z))
                } else {
                    newton_refine(iso, &torus, torus.embed(z), tol)
                };
                if let Some(p) = refined {
                    let z = torus.project(p);
                    let residual = iso.torus_residual(z);
                    if residual < tol {
                        let lift = torus.embed(z);
                        found.push(FixedPointRecord {
                            point: z,
                            lift,
                            contractible: iso.lift_residual(lift) < FIXED_TOL,
                            residual,
                            component: 0,
                        });
                    }
                }
            }
            (found, min_disp)
        })
        .collect();

    let mut records: Vec<FixedPointRecord> = Vec::new();
    let mut grid_min = f64::INFINITY;
    for (row, min_disp) in rows {
        grid_min = grid_min.min(min_disp);
        records.extend(row);
    }

    dedup_records(&torus, &mut records, h / 2.0);
    let component_count = label_components(&torus, &mut records, h * 1.0001);

    Ok(FixedPointSet {
        records,
        component_count,
        grid_min_displacement: grid_min,
        grid_n,
    })
}

/// Shortest displacement vector of `p` under the time-one map, reduced to
/// the nearest deck representative.
fn torus_displacement(iso: &Isotopy, torus: &Torus, p: PlanePoint) -> PlanePoint {
    let image = iso.time_one(p);
    torus.shortest_vector(torus.project(p), torus.project(image))
}

fn newton_refine(iso: &Isotopy, torus: &Torus, start: PlanePoint, tol: f64) -> Option<PlanePoint> {
    let mut p = start;
    let mut g = torus_displacement(iso, torus, p);
    for _ in 0..30 {
        if g.norm() < tol {
            return Some(p);
        }
        let h = 1e-6;
        let gx = torus_displacement(iso, torus, PlanePoint::new(p.x + h, p.y))
            - torus_displacement(iso, torus, PlanePoint::new(p.x - h, p.y));
        let gy = torus_displacement(iso, torus, PlanePoint::new(p.x, p.y + h))
            - torus_displacement(iso, torus, PlanePoint::new(p.x, p.y - h));
        let (a, b) = (gx.x / (2.0 * h), gy.x / (2.0 * h));
        let (c, d) = (gx.y / (2.0 * h), gy.y / (2.0 * h));
        let det = a * d - b * c;
        if det.abs() < 1e-12 {
            return None;
        }
        let step = PlanePoint::new((d * g.x - b * g.y) / det, (-c * g.x + a * g.y) / det);
        let mut scale = 1.0;
        let mut moved = false;
        for _ in 0..8 {
            let cand = p - step * scale;
            let cand_g = torus_displacement(iso, torus, cand);
            if cand_g.norm() < g.norm() {
                p = cand;
                g = cand_g;
                moved = true;
                break;
            }
            scale *= 0.5;
        }
        if !moved {
            return None;
        }
    }
    (g.norm() < tol).then_some(p)
}

fn dedup_records(torus: &Torus, records: &mut Vec<FixedPointRecord>, eps: f64) {
    let mut kept: Vec<FixedPointRecord> = Vec::new();
    records.sort_by(|a, b| {
        (a.point.x, a.point.y)
            .partial_cmp(&(b.point.x, b.point.y))
            .unwrap()
    });
    'outer: for r in records.iter() {
        for k in kept.iter_mut() {
            if torus.dist(r.point, k.point) < eps {
                if r.residual < k.residual {
                    *k = *r;
                }
                continue 'outer;
            }
        }
        kept.push(*r);
    }
    *records = kept;
}

fn label_components(torus: &Torus, records: &mut [FixedPointRecord], eps: f64) -> usize {
    let n = records.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let root = find(parent, parent[i]);
            parent[i] = root;
        }
        parent[i]
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if torus.dist(records[i].point, records[j].point) <= eps {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut labels = std::collections::HashMap::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        let next = labels.len();
        let label = *labels.entry(root).or_insert(next);
        records[i].component = label;
    }
    labels.len()
}

/// Pairwise linking number of two distinct fixed lifts: the winding degree
/// of the difference `t -> F_t(b) - F_t(a)` around the origin.
///
/// Symmetric in its arguments and integer-valued; fails with
/// [`Error::NotFixed`] if either lift moves under the time-one map.
pub fn linking_pair(
    iso: &Isotopy,
    a: PlanePoint,
    b: PlanePoint,
    cfg: &RefineConfig,
) -> Result<i64> {
    let ra = iso.lift_residual(a);
    if ra >= FIXED_TOL {
        return Err(Error::NotFixed { residual: ra });
    }
    let rb = iso.lift_residual(b);
    if rb >= FIXED_TOL {
        return Err(Error::NotFixed { residual: rb });
    }
    if a == b {
        return Err(Error::Config("linking number needs distinct lifts".into()));
    }
    let curve = |t: f64| iso.lift(t, b) - iso.lift(t, a);
    winding_of_closed_curve(curve, PlanePoint::new(0.0, 0.0), cfg)
}

/// Deck-summed linking number of a contractible fixed point `z` against the
/// pair of fixed lifts `(a, b)`:
///
/// the sum over lifts `p` of `z` of `linking_pair(a, p) - linking_pair(b, p)`,
/// expanded over square shells and truncated once two consecutive shells
/// contribute nothing.
pub fn linking_at_fixed(
    iso: &Isotopy,
    a: PlanePoint,
    b: PlanePoint,
    z: TorusPoint,
    cfg: &RefineConfig,
    shell_cap: i64,
) -> Result<i64> {
    let torus = iso.torus();
    if iso.torus_residual(z) >= FIXED_TOL {
        return Err(Error::NotContractibleFixed);
    }
    let base = torus.embed(z);
    if iso.lift_residual(base) >= FIXED_TOL {
        // Fixed on the torus but the lift translates: not contractible.
        return Err(Error::NotContractibleFixed);
    }
    if torus.dist(z, torus.project(a)) <= cfg.clearance
        || torus.dist(z, torus.project(b)) <= cfg.clearance
    {
        return Err(Error::NotContractibleFixed);
    }

    let term = |p: PlanePoint| -> Result<i64> {
        Ok(linking_pair(iso, a, p, cfg)? - linking_pair(iso, b, p, cfg)?)
    };

    let mut total = term(base)?;
    let mut empty_shells = 0;
    let mut radius = 1i64;
    while empty_shells < 2 {
        if radius > shell_cap {
            return Err(Error::ShellCapExceeded { cap: shell_cap });
        }
        let mut shell_sum = 0i64;
        let mut shell_nonzero = false;
        for d in shell(radius) {
            let p = d.apply(base, torus.modulus());
            let v = term(p)?;
            if v != 0 {
                shell_nonzero = true;
            }
            shell_sum += v;
        }
        total += shell_sum;
        empty_shells = if shell_nonzero { 0 } else { empty_shells + 1 };
        radius += 1;
    }
    Ok(total)
}

/// Deck elements with sup-norm exactly `r`.
fn shell(r: i64) -> Vec<DeckElement> {
    let mut v = Vec::new();
    for m in -r..=r {
        for n in -r..=r {
            if m.abs().max(n.abs()) == r {
                v.push(DeckElement::new(m, n));
            }
        }
    }
    v
}

/// Symmetric matrix of pairwise linking numbers on a finite lift set.
#[derive(Clone, Debug)]
pub struct LinkingMatrix {
    pub lifts: Vec<PlanePoint>,
    /// `entries[i][j]` for `i != j`; the diagonal is `None`.
    pub entries: Vec<Vec<Option<i64>>>,
    pub max_abs: i64,
}

/// Assemble the pairwise matrix; pairs are computed in parallel and placed
/// in row-major order, so the result is deterministic.
pub fn linking_matrix(
    iso: &Isotopy,
    lifts: &[PlanePoint],
    cfg: &RefineConfig,
) -> Result<LinkingMatrix> {
    let n = lifts.len();
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            pairs.push((i, j));
        }
    }
    let computed: Vec<Result<i64>> = pairs
        .par_iter()
        .map(|&(i, j)| linking_pair(iso, lifts[i], lifts[j], cfg))
        .collect();
    let mut entries = vec![vec![None; n]; n];
    let mut max_abs = 0i64;
    for (&(i, j), v) in pairs.iter().zip(computed) {
        let v = v?;
        max_abs = max_abs.max(v.abs());
        entries[i][j] = Some(v);
        entries[j][i] = Some(v);
    }
    Ok(LinkingMatrix {
        lifts: lifts.to_vec(),
        entries,
        max_abs,
    })
}

/// Boundedness diagnostic over a finite supplied lift set.
#[derive(Clone, Debug)]
pub struct WbReport {
    pub matrix: LinkingMatrix,
    /// Per-lift bound: max |linking| over the row (0 for a singleton).
    pub per_lift: Vec<i64>,
    /// Overall bound over the sample.
    pub global: i64,
    /// Rows achieving the global bound.
    pub extremal_rows: Vec<usize>,
}

pub fn wb_diagnostic(iso: &Isotopy, lifts: &[PlanePoint], cfg: &RefineConfig) -> Result<WbReport> {
    let matrix = linking_matrix(iso, lifts, cfg)?;
    let per_lift: Vec<i64> = matrix
        .entries
        .iter()
        .map(|row| row.iter().flatten().map(|v| v.abs()).max().unwrap_or(0))
        .collect();
    let global = per_lift.iter().copied().max().unwrap_or(0);
    let extremal_rows = per_lift
        .iter()
        .enumerate()
        .filter(|(_, &b)| b == global && global > 0)
        .map(|(i, _)| i)
        .collect();
    Ok(WbReport {
        matrix,
        per_lift,
        global,
        extremal_rows,
    })
}

/// Verdicts for the four structural properties of the pairwise linking
/// number on a sample.
#[derive(Clone, Debug)]
pub struct PropertyReport {
    /// Local constancy along a connected fixed continuum.
    pub p1_locally_constant: bool,
    /// Invariance under simultaneous deck translation.
    pub p2_deck_invariant: bool,
    /// Vanishing on pairs of lifts of one point.
    pub p3_fiber_zero: bool,
    /// Vanishing beyond the empirical radius; `empirical_k` is the largest
    /// distance at which a nonzero linking was observed.
    pub p4_vanishes_far: bool,
    pub empirical_k: f64,
    pub checked_pairs: usize,
}

impl PropertyReport {
    pub fn all_pass(&self) -> bool {
        self.p1_locally_constant
            && self.p2_deck_invariant
            && self.p3_fiber_zero
            && self.p4_vanishes_far
    }
}

/// Check the structural properties on supplied samples.
///
/// `lifts` are fixed lifts used for pairwise values, `continuum` is a set
/// of fixed lifts inside one connected component of the fixed set (for
/// local constancy), `decks` the deck elements to test invariance with.
/// Distances beyond which linking must vanish are probed out to two deck
/// shells past the sample diameter; the report carries sampled evidence
/// only.
pub fn check_linking_properties(
    iso: &Isotopy,
    lifts: &[PlanePoint],
    continuum: &[PlanePoint],
    decks: &[DeckElement],
    cfg: &RefineConfig,
) -> Result<PropertyReport> {
    let torus = iso.torus();
    let l = torus.modulus();
    let mut checked_pairs = 0;

    // P1: against every reference lift, the linking number is constant as
    // the second argument moves inside the continuum.
    let mut p1 = true;
    for &r in lifts {
        let mut first: Option<i64> = None;
        for &c in continuum {
            if r.dist(c) <= cfg.clearance {
                continue;
            }
            let v = linking_pair(iso, r, c, cfg)?;
            checked_pairs += 1;
            match first {
                None => first = Some(v),
                Some(f) => {
                    if f != v {
                        p1 = false;
                    }
                }
            }
        }
    }

    // P2: simultaneous translation leaves every pair unchanged.
    let mut p2 = true;
    for &d in decks {
        for (i, &a) in lifts.iter().enumerate() {
            for &b in lifts.iter().skip(i + 1) {
                let base = linking_pair(iso, a, b, cfg)?;
                let moved = linking_pair(iso, d.apply(a, l), d.apply(b, l), cfg)?;
                checked_pairs += 1;
                if base != moved {
                    p2 = false;
                }
            }
        }
    }

    // P3: two lifts of the same point never link.
    let mut p3 = true;
    for &a in lifts {
        for &d in decks {
            if d.is_identity() {
                continue;
            }
            let v = linking_pair(iso, a, d.apply(a, l), cfg)?;
            checked_pairs += 1;
            if v != 0 {
                p3 = false;
            }
        }
    }

    // P4: record the largest distance with nonzero linking and verify
    // everything sampled beyond it vanishes.
    let mut empirical_k = 0.0f64;
    let mut far_pairs: Vec<(f64, i64)> = Vec::new();
    for (i, &a) in lifts.iter().enumerate() {
        for &b in lifts.iter().skip(i + 1) {
            let v = linking_pair(iso, a, b, cfg)?;
            far_pairs.push((a.dist(b), v));
        }
        // Deck translates push pairs out to a few moduli.
        for shell_r in 1..=2i64 {
            for d in shell(shell_r) {
                let b = d.apply(a, l);
                let v = linking_pair(iso, a, b, cfg)?;
                far_pairs.push((a.dist(b), v));
            }
        }
    }
    checked_pairs += far_pairs.len();
    for &(dist, v) in &far_pairs {
        if v != 0 {
            empirical_k = empirical_k.max(dist);
        }
    }
    let p4 = far_pairs
        .iter()
        .all(|&(dist, v)| v == 0 || dist <= empirical_k);

    Ok(PropertyReport {
        p1_locally_constant: p1,
        p2_deck_invariant: p2,
        p3_fiber_zero: p3,
        p4_vanishes_far: p4,
        empirical_k,
        checked_pairs,
    })
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

    fn plateau() -> Isotopy {
        let t = torus();
        Isotopy::twist(t, t.point(2.0, 2.0), TwistProfile::Plateau).unwrap()
    }

    #[test]
    fn shear_has_no_fixed_points() {
        let t = torus();
        let set = find_fixed_points(&Isotopy::shear(t), 32, 1e-9).unwrap();
        assert!(set.records.is_empty());
        assert!((set.grid_min_displacement - t.modulus() / 10.0).abs() < 1e-9);
    }

    #[test]
    fn rigid_translation_has_no_fixed_points() {
        let t = torus();
        let set =
            find_fixed_points(&Isotopy::rigid(t, PlanePoint::new(2.0, 0.0)), 32, 1e-9).unwrap();
        assert!(set.records.is_empty());
    }

    #[test]
    fn rigid_full_period_is_fixed_but_not_contractible() {
        let t = torus();
        let v = PlanePoint::new(t.modulus(), 0.0);
        let set = find_fixed_points(&Isotopy::rigid(t, v), 16, 1e-9).unwrap();
        assert!(!set.records.is_empty());
        assert!(set.records.iter().all(|r| !r.contractible));
    }

    #[test]
    fn twist_fixed_set_has_two_components() {
        let set = find_fixed_points(&twist(), 48, 1e-9).unwrap();
        assert_eq!(set.component_count, 2, "center and exterior");
        let t = torus();
        let center = t.point(2.0, 2.0);
        // The center is found and isolated in its component.
        // Near the center the residual shrinks quadratically with the
        // distance, so position accuracy is about sqrt(tol).
        let center_rec = set
            .records
            .iter()
            .find(|r| t.dist(r.point, center) < 1e-4)
            .expect("center found");
        assert!(center_rec.contractible);
        let center_comp = center_rec.component;
        let center_count = set
            .records
            .iter()
            .filter(|r| r.component == center_comp)
            .count();
        assert_eq!(center_count, 1);
        // Everything else is at radius >= 1 (the boundary circle counts).
        for r in &set.records {
            if r.component != center_comp {
                assert!(t.dist(r.point, center) >= 1.0 - 1e-6);
                assert!(r.contractible);
            }
        }
    }

    #[test]
    fn static_lifts_do_not_link() {
        let iso = twist();
        let t = torus();
        let a = t.embed(t.point(2.0, 2.0));
        let b = PlanePoint::new(0.0, 0.0);
        assert_eq!(linking_pair(&iso, a, b, &RefineConfig::default()).unwrap(), 0);
    }

    #[test]
    fn plateau_lifts_in_one_cell_link_once() {
        let iso = plateau();
        let a = PlanePoint::new(2.125, 2.0); // r = 1/8
        let b = PlanePoint::new(2.0, 2.25); // r = 1/4
        let cfg = RefineConfig::default();
        assert_eq!(linking_pair(&iso, a, b, &cfg).unwrap(), 1);
        // Against a deck translate the difference vector stays small and
        // never circles the origin.
        let b_far = b + PlanePoint::new(4.0, 0.0);
        assert_eq!(linking_pair(&iso, a, b_far, &cfg).unwrap(), 0);
        // Symmetry.
        assert_eq!(
            linking_pair(&iso, a, b, &cfg).unwrap(),
            linking_pair(&iso, b, a, &cfg).unwrap()
        );
    }

    #[test]
    fn linking_pair_scales_under_power() {
        let iso = plateau();
        let a = PlanePoint::new(2.125, 2.0);
        let b = PlanePoint::new(2.0, 2.25);
        let cfg = RefineConfig::default();
        let base = linking_pair(&iso, a, b, &cfg).unwrap();
        for n in [2u32, 3, 5] {
            let pw = iso.power(n).unwrap();
            assert_eq!(
                linking_pair(&pw, a, b, &cfg).unwrap(),
                n as i64 * base,
                "power {n}"
            );
        }
    }

    #[test]
    fn linking_pair_rejects_moving_point() {
        let iso = twist();
        let a = PlanePoint::new(2.5, 2.0); // radius 1/2 rotates
        let b = PlanePoint::new(0.0, 0.0);
        assert!(matches!(
            linking_pair(&iso, a, b, &RefineConfig::default()),
            Err(Error::NotFixed { .. })
        ));
    }

    #[test]
    fn deck_sum_on_plateau() {
        let iso = plateau();
        let t = torus();
        let a = t.embed(t.point(2.0, 2.0)); // center lift
        let b = PlanePoint::new(0.0, 0.0); // exterior fixed lift
        let z = t.point(2.25, 2.0); // on the plateau, r = 1/4
        let cfg = RefineConfig::default();
        let v = linking_at_fixed(&iso, a, b, z, &cfg, 16).unwrap();
        assert_eq!(v, 1);
        // Deck equivariance of the sum.
        let d = DeckElement::new(1, 1);
        let v2 = linking_at_fixed(
            &iso,
            d.apply(a, t.modulus()),
            d.apply(b, t.modulus()),
            z,
            &cfg,
            16,
        )
        .unwrap();
        assert_eq!(v2, v);
    }

    #[test]
    fn deck_sum_vanishes_for_static_twist() {
        let iso = twist();
        let t = torus();
        let a = t.embed(t.point(2.0, 2.0));
        let b = PlanePoint::new(0.0, 0.0);
        // Any fixed z off the marked points: an exterior point.
        let z = t.point(0.5, 2.0);
        let v = linking_at_fixed(&iso, a, b, z, &RefineConfig::default(), 16).unwrap();
        assert_eq!(v, 0);
    }

    #[test]
    fn deck_sum_cocycle_on_fixed_points() {
        let iso = plateau();
        let t = torus();
        let a = t.embed(t.point(2.0, 2.0));
        let b = PlanePoint::new(0.0, 0.0);
        let c = PlanePoint::new(2.375, 2.0); // plateau lift, r = 3/8
        let z = t.point(2.0, 2.25);
        let cfg = RefineConfig::default();
        let ab = linking_at_fixed(&iso, a, b, z, &cfg, 16).unwrap();
        let bc = linking_at_fixed(&iso, b, c, z, &cfg, 16).unwrap();
        let ca = linking_at_fixed(&iso, c, a, z, &cfg, 16).unwrap();
        assert_eq!(ab + bc + ca, 0, "{ab} + {bc} + {ca}");
    }

    #[test]
    fn deck_sum_rejects_marked_point() {
        let iso = plateau();
        let t = torus();
        let a = t.embed(t.point(2.0, 2.0));
        let b = PlanePoint::new(0.0, 0.0);
        assert!(matches!(
            linking_at_fixed(&iso, a, b, t.point(0.0, 0.0), &RefineConfig::default(), 16),
            Err(Error::NotContractibleFixed)
        ));
        // A non-fixed point is rejected too.
        assert!(matches!(
            linking_at_fixed(&iso, a, b, t.point(2.75, 2.0), &RefineConfig::default(), 16),
            Err(Error::NotContractibleFixed)
        ));
    }

    #[test]
    fn wb_bounds_on_samples() {
        let cfg = RefineConfig::default();
        let t = torus();
        // Twist sample: all static lifts, all bounds zero.
        let lifts = vec![
            t.embed(t.point(2.0, 2.0)),
            PlanePoint::new(0.0, 0.0),
            PlanePoint::new(0.5, 0.5),
        ];
        let report = wb_diagnostic(&twist(), &lifts, &cfg).unwrap();
        assert_eq!(report.global, 0);
        assert!(report.extremal_rows.is_empty());

        // Plateau sample with two same-cell plateau lifts: bound 1.
        let lifts = vec![
            PlanePoint::new(2.125, 2.0),
            PlanePoint::new(2.0, 2.25),
            PlanePoint::new(0.0, 0.0),
        ];
        let report = wb_diagnostic(&plateau(), &lifts, &cfg).unwrap();
        assert_eq!(report.global, 1);
        assert_eq!(report.per_lift[2], 0);

        // Singleton: vacuous bound.
        let report = wb_diagnostic(&plateau(), &lifts[..1], &cfg).unwrap();
        assert_eq!(report.global, 0);
    }

    #[test]
    fn matrix_is_symmetric_with_empty_diagonal() {
        let lifts = vec![
            PlanePoint::new(2.125, 2.0),
            PlanePoint::new(2.0, 2.25),
            PlanePoint::new(2.375, 2.0),
            PlanePoint::new(0.0, 0.0),
        ];
        let m = linking_matrix(&plateau(), &lifts, &RefineConfig::default()).unwrap();
        for i in 0..lifts.len() {
            assert!(m.entries[i][i].is_none());
            for j in 0..lifts.len() {
                assert_eq!(m.entries[i][j], m.entries[j][i]);
            }
        }
        assert_eq!(m.max_abs, 1);
    }

    #[test]
    fn properties_pass_on_plateau() {
        let iso = plateau();
        let lifts = vec![
            PlanePoint::new(2.125, 2.0),
            PlanePoint::new(2.0, 2.25),
            PlanePoint::new(0.0, 0.0),
            PlanePoint::new(1.0, 0.5),
        ];
        let continuum = vec![
            PlanePoint::new(2.25, 2.0),
            PlanePoint::new(2.0, 2.375),
            PlanePoint::new(1.75, 2.0),
            PlanePoint::new(2.0, 1.8),
        ];
        let decks = vec![
            DeckElement::new(1, 0),
            DeckElement::new(0, -1),
            DeckElement::new(2, 1),
        ];
        let report = check_linking_properties(
            &iso,
            &lifts,
            &continuum,
            &decks,
            &RefineConfig::default(),
        )
        .unwrap();
        assert!(report.all_pass(), "{report:?}");
        assert!(report.empirical_k <= iso.torus().modulus());
    }

    #[test]
    fn properties_pass_on_identity_and_twist() {
        let t = torus();
        let cfg = RefineConfig::default();
        let lifts = vec![
            PlanePoint::new(0.3, 0.3),
            PlanePoint::new(1.5, 0.2),
            PlanePoint::new(3.0, 3.0),
        ];
        let decks = vec![DeckElement::new(1, 1)];
        // Identity isotopy: everything fixed, all linkings zero.
        let report =
            check_linking_properties(&Isotopy::identity(t), &lifts, &lifts, &decks, &cfg).unwrap();
        assert!(report.all_pass());
        assert_eq!(report.empirical_k, 0.0);
        // Twist with static samples (exterior and center).
        let lifts = vec![
            t.embed(t.point(2.0, 2.0)),
            PlanePoint::new(0.0, 0.0),
            PlanePoint::new(0.8, 3.2),
        ];
        let continuum = vec![PlanePoint::new(0.0, 0.5), PlanePoint::new(0.0, 1.0)];
        let report =
            check_linking_properties(&twist(), &lifts, &continuum, &decks, &cfg).unwrap();
        assert!(report.all_pass());
    }
}
