//! Straight skeleton of a simple polygon by uniform inward edge offsetting.
//!
//! Event-driven wavefront: every active vertex moves along the intersection
//! of its two adjacent offset edge lines. Edge events merge adjacent
//! vertices whose edge collapses; split events let a reflex vertex cut an
//! opposite edge, dividing the wavefront in two. Candidate events are
//! recomputed from scratch after every processed event, so stale-event
//! bookkeeping is unnecessary; the next event is always the global minimum
//! by (time, x, y), with times within `TIME_TOL` treated as simultaneous.

use crate::error::SynthError;

/// Events closer in time than this are simultaneous and are ordered by
/// ascending (x, y) of their event point. Rectilinear inputs produce exact
/// ties that must collapse deterministically.
const TIME_TOL: f64 = 1e-9;
/// Geometric tolerance for coincidence tests and node clustering.
const GEOM_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkeletonNode {
    pub pos: [f64; 2],
    /// Offset distance at which the wavefront reaches this node; boundary
    /// nodes carry time 0.
    pub time: f64,
}

/// Straight skeleton as a graph: polygon vertices first (time 0), interior
/// nodes after, sorted by (time, x, y); arcs are index pairs (lo, hi).
#[derive(Debug, Clone)]
pub struct SkeletonGraph {
    pub nodes: Vec<SkeletonNode>,
    pub arcs: Vec<(usize, usize)>,
}

impl SkeletonGraph {
    pub fn interior_nodes(&self) -> impl Iterator<Item = &SkeletonNode> {
        self.nodes.iter().filter(|n| n.time > 0.0)
    }
}

/// Twice the signed area; positive for counterclockwise polygons.
pub fn polygon_signed_area(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    let mut acc = 0.0;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        acc += a[0] * b[1] - b[0] * a[1];
    }
    acc
}

fn sub(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn norm(a: [f64; 2]) -> f64 {
    dot(a, a).sqrt()
}

/// Supporting line of an edge: `n . p = c` at time 0, offset inward to
/// `n . p = c + t` at time t, with `n` the unit inward normal.
#[derive(Debug, Clone, Copy)]
struct EdgeLine {
    n: [f64; 2],
    c: f64,
}

impl EdgeLine {
    fn from_points(a: [f64; 2], b: [f64; 2]) -> Self {
        let d = sub(b, a);
        let len = norm(d);
        let dir = [d[0] / len, d[1] / len];
        let n = [-dir[1], dir[0]]; // left of travel = interior for CCW
        EdgeLine { n, c: dot(n, a) }
    }

    fn direction(&self) -> [f64; 2] {
        [self.n[1], -self.n[0]]
    }
}

#[derive(Debug, Clone, Copy)]
struct WfVertex {
    origin: [f64; 2],
    born: f64,
    vel: [f64; 2],
    /// Indices into the original edge-line table.
    left: usize,
    right: usize,
    reflex: bool,
}

impl WfVertex {
    fn pos(&self, t: f64) -> [f64; 2] {
        [
            self.origin[0] + (t - self.born) * self.vel[0],
            self.origin[1] + (t - self.born) * self.vel[1],
        ]
    }
}

/// Velocity of the intersection point of two inward-offsetting lines.
/// Parallel same-direction lines move with the common normal; antiparallel
/// lines pinch instantly, so the vertex is frozen until the simultaneous
/// event that removes it.
fn vertex_velocity(l: &EdgeLine, r: &EdgeLine) -> [f64; 2] {
    let det = l.n[0] * r.n[1] - l.n[1] * r.n[0];
    if det.abs() < 1e-12 {
        if dot(l.n, r.n) > 0.0 {
            return l.n;
        }
        return [0.0, 0.0];
    }
    [(r.n[1] - l.n[1]) / det, (l.n[0] - r.n[0]) / det]
}

fn is_reflex(l: &EdgeLine, r: &EdgeLine) -> bool {
    cross(l.direction(), r.direction()) < -1e-12
}

fn make_vertex(origin: [f64; 2], born: f64, left: usize, right: usize, lines: &[EdgeLine]) -> WfVertex {
    let l = &lines[left];
    let r = &lines[right];
    WfVertex {
        origin,
        born,
        vel: vertex_velocity(l, r),
        left,
        right,
        reflex: is_reflex(l, r),
    }
}

#[derive(Debug, Clone, Copy)]
enum EventKind {
    /// Edge between LAV positions (i, i+1) collapses.
    Edge { lav: usize, pos: usize },
    /// Reflex vertex at position `pos` splits the edge starting at `opp`.
    Split { lav: usize, pos: usize, opp: usize },
}

#[derive(Debug, Clone, Copy)]
struct Event {
    time: f64,
    point: [f64; 2],
    kind: EventKind,
}

struct State {
    lines: Vec<EdgeLine>,
    /// Active wavefront loops (each holds at least 3 vertices).
    lavs: Vec<Vec<WfVertex>>,
    arcs: Vec<RawArc>,
}

#[derive(Debug, Clone, Copy)]
struct RawArc {
    a: [f64; 2],
    ta: f64,
    b: [f64; 2],
    tb: f64,
}

impl State {
    fn push_arc(&mut self, a: [f64; 2], ta: f64, b: [f64; 2], tb: f64) {
        if norm(sub(a, b)) > GEOM_TOL {
            self.arcs.push(RawArc { a, ta, b, tb });
        }
    }

    /// Retires a two-vertex loop: both remaining vertices stop where they
    /// are at `t`, leaving their traces plus the ridge that joins them.
    fn close_two_gon(&mut self, mut lav: Vec<WfVertex>, t: f64) {
        debug_assert_eq!(lav.len(), 2);
        let b = lav.pop().unwrap();
        let a = lav.pop().unwrap();
        let pa = a.pos(t);
        let pb = b.pos(t);
        self.push_arc(a.origin, a.born, pa, t);
        self.push_arc(b.origin, b.born, pb, t);
        self.push_arc(pa, t, pb, t);
    }

    fn collect_events(&self, t_now: f64) -> Vec<Event> {
        let mut events = Vec::new();
        for (li, lav) in self.lavs.iter().enumerate() {
            let m = lav.len();
            for i in 0..m {
                let a = &lav[i];
                let b = &lav[(i + 1) % m];
                if let Some((t, p)) = edge_collapse(a, b, t_now) {
                    events.push(Event { time: t, point: p, kind: EventKind::Edge { lav: li, pos: i } });
                }
            }
            for i in 0..m {
                if !lav[i].reflex {
                    continue;
                }
                for j in 0..m {
                    // Skip the two wavefront edges incident to vertex i.
                    if j == i || (j + 1) % m == i {
                        continue;
                    }
                    let vm = &lav[j];
                    let vn = &lav[(j + 1) % m];
                    let line = &self.lines[vm.right];
                    if let Some((t, p)) = split_hit(&lav[i], vm, vn, line, t_now) {
                        events.push(Event { time: t, point: p, kind: EventKind::Split { lav: li, pos: i, opp: j } });
                    }
                }
            }
        }
        events
    }
}

/// Meet time of two adjacent wavefront vertices; both ride the shared edge's
/// offset line, so their least-squares meet is exact up to roundoff.
fn edge_collapse(a: &WfVertex, b: &WfVertex, t_now: f64) -> Option<(f64, [f64; 2])> {
    let base = [
        b.origin[0] - b.born * b.vel[0] - (a.origin[0] - a.born * a.vel[0]),
        b.origin[1] - b.born * b.vel[1] - (a.origin[1] - a.born * a.vel[1]),
    ];
    let dv = sub(b.vel, a.vel);
    let dv2 = dot(dv, dv);
    if dv2 < 1e-18 {
        return None;
    }
    let t = -dot(base, dv) / dv2;
    if t < t_now - TIME_TOL {
        return None;
    }
    let residual = [base[0] + t * dv[0], base[1] + t * dv[1]];
    if norm(residual) > GEOM_TOL {
        return None;
    }
    let pa = a.pos(t);
    let pb = b.pos(t);
    Some((t, [(pa[0] + pb[0]) * 0.5, (pa[1] + pb[1]) * 0.5]))
}

/// Time at which reflex vertex `r` reaches the offset line of the wavefront
/// edge (vm, vn), provided it lands within the edge's moving extent.
fn split_hit(
    r: &WfVertex,
    vm: &WfVertex,
    vn: &WfVertex,
    line: &EdgeLine,
    t_now: f64,
) -> Option<(f64, [f64; 2])> {
    let nv = dot(line.n, r.vel);
    // gap(t) = n.pos(t) - (c + t) starts positive inside the wavefront and
    // must be strictly shrinking for a genuine hit.
    let shrink = 1.0 - nv;
    if shrink < 1e-12 {
        return None;
    }
    let gap_at_born = dot(line.n, r.origin) - line.c - r.born;
    let t = r.born + gap_at_born / shrink;
    if t < t_now - TIME_TOL {
        return None;
    }
    let b = r.pos(t);
    let pm = vm.pos(t);
    let pn = vn.pos(t);
    let seg = sub(pn, pm);
    let seg2 = dot(seg, seg);
    if seg2 < GEOM_TOL * GEOM_TOL {
        // Edge nearly collapsed; accept only a coincident hit.
        if norm(sub(b, pm)) > GEOM_TOL {
            return None;
        }
        return Some((t, b));
    }
    let s = dot(sub(b, pm), seg) / seg2;
    let slack = GEOM_TOL / seg2.sqrt();
    if s < -slack || s > 1.0 + slack {
        return None;
    }
    Some((t, b))
}

/// Validates that the polygon is simple, counterclockwise, and free of
/// repeated points.
fn validate_polygon(poly: &[[f64; 2]]) -> Result<(), SynthError> {
    let n = poly.len();
    if n < 3 {
        return Err(SynthError::InvalidPolygon { reason: format!("{n} vertices; need at least 3") });
    }
    for i in 0..n {
        for j in i + 1..n {
            if norm(sub(poly[i], poly[j])) < GEOM_TOL {
                return Err(SynthError::InvalidPolygon {
                    reason: format!("repeated point at vertices {i} and {j}"),
                });
            }
        }
    }
    if polygon_signed_area(poly) <= 0.0 {
        return Err(SynthError::InvalidPolygon { reason: "not counterclockwise".into() });
    }
    // Proper or improper intersection between non-adjacent edges.
    for i in 0..n {
        let (a1, a2) = (poly[i], poly[(i + 1) % n]);
        for j in i + 1..n {
            if j == i || (j + 1) % n == i || (i + 1) % n == j {
                continue;
            }
            let (b1, b2) = (poly[j], poly[(j + 1) % n]);
            if segments_intersect(a1, a2, b1, b2) {
                return Err(SynthError::InvalidPolygon {
                    reason: format!("edges {i} and {j} intersect"),
                });
            }
        }
    }
    Ok(())
}

fn segments_intersect(a1: [f64; 2], a2: [f64; 2], b1: [f64; 2], b2: [f64; 2]) -> bool {
    let d1 = cross(sub(a2, a1), sub(b1, a1));
    let d2 = cross(sub(a2, a1), sub(b2, a1));
    let d3 = cross(sub(b2, b1), sub(a1, b1));
    let d4 = cross(sub(b2, b1), sub(a2, b1));
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |d: f64, p: [f64; 2], q: [f64; 2], r: [f64; 2]| {
        d.abs() < 1e-12
            && r[0] >= p[0].min(q[0]) - 1e-12
            && r[0] <= p[0].max(q[0]) + 1e-12
            && r[1] >= p[1].min(q[1]) - 1e-12
            && r[1] <= p[1].max(q[1]) + 1e-12
    };
    on(d1, a1, a2, b1) || on(d2, a1, a2, b2) || on(d3, b1, b2, a1) || on(d4, b1, b2, a2)
}

/// Computes the straight skeleton of a simple counterclockwise polygon.
pub fn straight_skeleton(poly: &[[f64; 2]]) -> Result<SkeletonGraph, SynthError> {
    validate_polygon(poly)?;
    let n = poly.len();
    let lines: Vec<EdgeLine> = (0..n)
        .map(|i| EdgeLine::from_points(poly[i], poly[(i + 1) % n]))
        .collect();
    let initial: Vec<WfVertex> = (0..n)
        .map(|i| make_vertex(poly[i], 0.0, (i + n - 1) % n, i, &lines))
        .collect();
    let mut state = State { lines, lavs: vec![initial], arcs: Vec::new() };

    let mut t_now = 0.0;
    let max_iter = 16 * n + 64;
    for _ in 0..max_iter {
        if state.lavs.is_empty() {
            return Ok(assemble(poly, state.arcs));
        }
        let events = state.collect_events(t_now);
        let Some(best) = pick_event(&events) else {
            return Err(SynthError::SkeletonFailure {
                reason: format!("no events with {} active loops", state.lavs.len()),
            });
        };
        t_now = best.time.max(t_now);
        match best.kind {
            EventKind::Edge { lav, pos } => process_edge(&mut state, lav, pos, best),
            EventKind::Split { lav, pos, opp } => process_split(&mut state, lav, pos, opp, best),
        }
    }
    Err(SynthError::SkeletonFailure { reason: "event budget exhausted".into() })
}

/// Earliest event; ties within `TIME_TOL` break on ascending (x, y).
fn pick_event(events: &[Event]) -> Option<Event> {
    let min_t = events.iter().map(|e| e.time).fold(f64::INFINITY, f64::min);
    events
        .iter()
        .filter(|e| e.time <= min_t + TIME_TOL)
        .min_by(|a, b| {
            (a.point[0], a.point[1], a.time)
                .partial_cmp(&(b.point[0], b.point[1], b.time))
                .unwrap()
        })
        .copied()
}

fn process_edge(state: &mut State, lav_idx: usize, pos: usize, ev: Event) {
    let lav = &mut state.lavs[lav_idx];
    let m = lav.len();
    let a = lav[pos];
    let b = lav[(pos + 1) % m];
    let merged = make_vertex(ev.point, ev.time, a.left, b.right, &state.lines);

    // Replace the pair with the merged vertex.
    let mut next: Vec<WfVertex> = Vec::with_capacity(m - 1);
    next.push(merged);
    let mut k = (pos + 2) % m;
    while k != pos {
        next.push(lav[k]);
        k = (k + 1) % m;
    }
    state.lavs.swap_remove(lav_idx);

    state.push_arc(a.origin, a.born, ev.point, ev.time);
    state.push_arc(b.origin, b.born, ev.point, ev.time);

    if next.len() == 2 {
        state.close_two_gon(next, ev.time);
    } else {
        state.lavs.push(next);
    }
}

fn process_split(state: &mut State, lav_idx: usize, pos: usize, opp: usize, ev: Event) {
    let lav = state.lavs.swap_remove(lav_idx);
    let m = lav.len();
    let r = lav[pos];
    let vm_right = lav[opp].right;

    state.push_arc(r.origin, r.born, ev.point, ev.time);

    let v1 = make_vertex(ev.point, ev.time, r.left, vm_right, &state.lines);
    let v2 = make_vertex(ev.point, ev.time, vm_right, r.right, &state.lines);

    // Walk from r.next around to vm -> first loop with v2 in front;
    // from vn around to r.prev -> second loop with v1 in front.
    let mut loop_a = vec![v2];
    let mut k = (pos + 1) % m;
    loop {
        loop_a.push(lav[k]);
        if k == opp {
            break;
        }
        k = (k + 1) % m;
    }
    let mut loop_b = vec![v1];
    let mut k = (opp + 1) % m;
    loop {
        loop_b.push(lav[k]);
        if k == (pos + m - 1) % m {
            break;
        }
        k = (k + 1) % m;
    }

    for lp in [loop_a, loop_b] {
        if lp.len() == 2 {
            state.close_two_gon(lp, ev.time);
        } else {
            state.lavs.push(lp);
        }
    }
}

/// Clusters arc endpoints into nodes: boundary vertices first (time 0),
/// interior nodes sorted by (time, x, y); arcs become deduplicated index
/// pairs.
fn assemble(poly: &[[f64; 2]], raw: Vec<RawArc>) -> SkeletonGraph {
    let mut nodes: Vec<SkeletonNode> = poly
        .iter()
        .map(|&p| SkeletonNode { pos: p, time: 0.0 })
        .collect();
    let boundary = nodes.len();
    let mut interior: Vec<SkeletonNode> = Vec::new();

    let locate = |p: [f64; 2], t: f64, interior: &mut Vec<SkeletonNode>| -> (bool, usize) {
        if t <= TIME_TOL {
            for (i, node) in nodes.iter().enumerate() {
                if norm(sub(node.pos, p)) <= GEOM_TOL {
                    return (true, i);
                }
            }
        }
        for (i, node) in interior.iter().enumerate() {
            if norm(sub(node.pos, p)) <= GEOM_TOL && (node.time - t).abs() <= GEOM_TOL {
                return (false, i);
            }
        }
        interior.push(SkeletonNode { pos: p, time: t });
        (false, interior.len() - 1)
    };

    let mut endpoint_ids: Vec<((bool, usize), (bool, usize))> = Vec::with_capacity(raw.len());
    for arc in &raw {
        let a = locate(arc.a, arc.ta, &mut interior);
        let b = locate(arc.b, arc.tb, &mut interior);
        endpoint_ids.push((a, b));
    }

    let mut order: Vec<usize> = (0..interior.len()).collect();
    order.sort_by(|&i, &j| {
        (interior[i].time, interior[i].pos[0], interior[i].pos[1])
            .partial_cmp(&(interior[j].time, interior[j].pos[0], interior[j].pos[1]))
            .unwrap()
    });
    let mut rank = vec![0usize; interior.len()];
    for (new, &old) in order.iter().enumerate() {
        rank[old] = new;
    }
    nodes.extend(order.iter().map(|&old| interior[old]));

    let resolve = |(is_boundary, idx): (bool, usize)| -> usize {
        if is_boundary {
            idx
        } else {
            boundary + rank[idx]
        }
    };
    let mut arcs: Vec<(usize, usize)> = endpoint_ids
        .into_iter()
        .map(|(a, b)| {
            let (a, b) = (resolve(a), resolve(b));
            (a.min(b), a.max(b))
        })
        .filter(|&(a, b)| a != b)
        .collect();
    arcs.sort_unstable();
    arcs.dedup();
    SkeletonGraph { nodes, arcs }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Vec<[f64; 2]> {
        vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]
    }

    #[test]
    fn unit_square_collapses_to_center() {
        let sk = straight_skeleton(&square()).unwrap();
        assert_eq!(sk.nodes.len(), 5);
        assert_eq!(sk.arcs.len(), 4);
        let center = &sk.nodes[4];
        assert_eq!(center.pos, [0.5, 0.5]);
        assert_eq!(center.time, 0.5);
        for &(a, b) in &sk.arcs {
            assert!(a < 4);
            assert_eq!(b, 4);
        }
    }

    #[test]
    fn rectangle_has_a_ridge() {
        let poly = vec![[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [0.0, 1.0]];
        let sk = straight_skeleton(&poly).unwrap();
        assert_eq!(sk.nodes.len(), 6);
        assert_eq!(sk.arcs.len(), 5);
        let left = &sk.nodes[4];
        let right = &sk.nodes[5];
        assert!(norm(sub(left.pos, [0.5, 0.5])) < 1e-9);
        assert!(norm(sub(right.pos, [1.5, 0.5])) < 1e-9);
        assert!((left.time - 0.5).abs() < 1e-9);
        assert!((right.time - 0.5).abs() < 1e-9);
        assert!(sk.arcs.contains(&(4, 5)));
    }

    #[test]
    fn slot_notch_produces_pinch_ridge() {
        // A 10x5 rectangle with a slot cut down through the top edge. The
        // slot floor and the polygon floor pinch along y = 1, leaving a
        // ridge between the two split points.
        let poly = vec![
            [0.0, 0.0],
            [10.0, 0.0],
            [10.0, 5.0],
            [6.0, 5.0],
            [6.0, 2.0],
            [4.0, 2.0],
            [4.0, 5.0],
            [0.0, 5.0],
        ];
        let sk = straight_skeleton(&poly).unwrap();
        let find = |p: [f64; 2], t: f64| {
            sk.nodes
                .iter()
                .position(|n| norm(sub(n.pos, p)) < 1e-6 && (n.time - t).abs() < 1e-6)
        };
        let a = find([3.0, 1.0], 1.0).expect("left pinch node");
        let b = find([7.0, 1.0], 1.0).expect("right pinch node");
        assert!(sk.arcs.contains(&(a.min(b), a.max(b))), "pinch ridge present");
        assert_tree(&sk);
    }

    #[test]
    fn l_shape_resolves_with_split() {
        let poly = vec![
            [0.0, 0.0],
            [4.0, 0.0],
            [4.0, 2.0],
            [2.0, 2.0],
            [2.0, 4.0],
            [0.0, 4.0],
        ];
        let sk = straight_skeleton(&poly).unwrap();
        assert_tree(&sk);
        // Every boundary node has exactly one arc.
        for i in 0..6 {
            let deg = sk.arcs.iter().filter(|&&(a, b)| a == i || b == i).count();
            assert_eq!(deg, 1, "boundary node {i}");
        }
    }

    #[test]
    fn rejects_bad_polygons() {
        assert!(matches!(
            straight_skeleton(&[[0.0, 0.0], [1.0, 0.0]]),
            Err(SynthError::InvalidPolygon { .. })
        ));
        let clockwise = vec![[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]];
        assert!(matches!(
            straight_skeleton(&clockwise),
            Err(SynthError::InvalidPolygon { .. })
        ));
        let bowtie = vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]];
        assert!(matches!(
            straight_skeleton(&bowtie),
            Err(SynthError::InvalidPolygon { .. })
        ));
        let repeated = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [1.0, 0.0]];
        assert!(matches!(
            straight_skeleton(&repeated),
            Err(SynthError::InvalidPolygon { .. })
        ));
    }

    /// The skeleton of a simple polygon is a tree over its nodes.
    fn assert_tree(sk: &SkeletonGraph) {
        assert_eq!(sk.arcs.len(), sk.nodes.len() - 1, "arc count");
        // Connectivity via union-find.
        let mut parent: Vec<usize> = (0..sk.nodes.len()).collect();
        fn find(p: &mut Vec<usize>, i: usize) -> usize {
            if p[i] != i {
                let r = find(p, p[i]);
                p[i] = r;
            }
            p[i]
        }
        for &(a, b) in &sk.arcs {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            assert_ne!(ra, rb, "cycle through arc ({a},{b})");
            parent[ra] = rb;
        }
    }

    #[test]
    fn interior_nodes_have_degree_at_least_two() {
        for poly in [
            square(),
            vec![[0.0, 0.0], [3.0, 0.0], [3.0, 1.0], [0.0, 1.0]],
            vec![
                [0.0, 0.0],
                [4.0, 0.0],
                [4.0, 2.0],
                [2.0, 2.0],
                [2.0, 4.0],
                [0.0, 4.0],
            ],
        ] {
            let sk = straight_skeleton(&poly).unwrap();
            for (i, node) in sk.nodes.iter().enumerate() {
                if node.time == 0.0 {
                    continue;
                }
                let deg = sk.arcs.iter().filter(|&&(a, b)| a == i || b == i).count();
                assert!(deg >= 2, "interior node {i} degree {deg}");
            }
        }
    }
}
