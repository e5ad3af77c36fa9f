//! Cutwidth orderings and interval decompositions: computation, validation,
//! normalization and width measurement.
//!
//! Widths here are always *measured* on the layout actually produced; no
//! existential constants appear anywhere. Downstream size bounds are stated
//! in terms of these measured widths.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::digraph::{Arc, Tournament};
use crate::error::Error;

/// Default cap for the exact cutwidth DP (2^n * n states).
pub const CUTWIDTH_EXACT_CAP: usize = 20;
/// Exhaustive endpoint-interleaving pathwidth search is used up to this size.
pub const PATHWIDTH_EXACT_CAP: usize = 6;

/// An ordering sigma of the host vertices; `order[p]` is the vertex at
/// position `p + 1` (positions are 1-based, as in the cut definitions).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexOrdering {
    order: Vec<usize>,
    pos: Vec<usize>,
}

impl VertexOrdering {
    pub fn new(order: Vec<usize>) -> Result<Self, Error> {
        let n = order.len();
        let mut pos = vec![usize::MAX; n];
        for (i, &v) in order.iter().enumerate() {
            if v >= n {
                return Err(Error::UnknownVertex(v));
            }
            if pos[v] != usize::MAX {
                return Err(Error::Invalid(format!("vertex {v} appears twice")));
            }
            pos[v] = i + 1;
        }
        Ok(VertexOrdering { order, pos })
    }

    pub fn identity(n: usize) -> Self {
        VertexOrdering::new((0..n).collect()).unwrap()
    }

    pub fn n(&self) -> usize {
        self.order.len()
    }

    /// 1-based position of `v`.
    pub fn position(&self, v: usize) -> usize {
        self.pos[v]
    }

    /// Vertex at 1-based position `p`.
    pub fn vertex_at(&self, p: usize) -> usize {
        self.order[p - 1]
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Vertices of the sigma-interval (alpha, beta], in position order.
    pub fn interval(&self, alpha: usize, beta: usize) -> Vec<usize> {
        (alpha + 1..=beta.min(self.n()))
            .map(|p| self.vertex_at(p))
            .collect()
    }

    /// The induced ordering on a subset of vertices, relabeled by `map`
    /// (new label i corresponds to old vertex map[i]).
    pub fn restricted(&self, map: &[usize]) -> VertexOrdering {
        let mut idx: Vec<usize> = (0..map.len()).collect();
        idx.sort_by_key(|&i| self.pos[map[i]]);
        VertexOrdering::new(idx).unwrap()
    }
}

/// All alpha-cuts of an ordering, their sizes, the width and an argmax.
#[derive(Clone, Debug)]
pub struct CutProfile {
    /// `cuts[alpha]` for alpha in 0..=n, each sorted.
    pub cuts: Vec<Vec<Arc>>,
    pub width: usize,
    pub argmax: usize,
}

/// Exact cut sets for every alpha: `cut[alpha] = {(u,v) : sigma(u) > alpha >= sigma(v)}`.
pub fn cut_profile(t: &Tournament, sigma: &VertexOrdering) -> CutProfile {
    let n = t.n();
    assert_eq!(sigma.n(), n, "ordering size mismatch");
    let mut cuts: Vec<Vec<Arc>> = vec![Vec::new(); n + 1];
    for (u, v) in t.arcs() {
        let (pu, pv) = (sigma.position(u), sigma.position(v));
        if pu > pv {
            for alpha in pv..pu {
                cuts[alpha].push((u, v));
            }
        }
    }
    for c in &mut cuts {
        c.sort_unstable();
    }
    let (argmax, width) = cuts
        .iter()
        .enumerate()
        .map(|(a, c)| (a, c.len()))
        .max_by(|x, y| x.1.cmp(&y.1).then(y.0.cmp(&x.0)))
        .unwrap_or((0, 0));
    CutProfile {
        cuts,
        width,
        argmax,
    }
}

/// Exact cutwidth by dynamic programming over placed-prefix sets.
///
/// The transition cost for a prefix set S is the number of arcs from
/// unplaced vertices into S, which is exactly the alpha-cut at alpha = |S|.
/// Ties are broken towards the lexicographically smallest insertion order.
pub fn cutwidth_exact(t: &Tournament) -> Result<(VertexOrdering, usize), Error> {
    cutwidth_exact_capped(t, CUTWIDTH_EXACT_CAP)
}

pub fn cutwidth_exact_capped(
    t: &Tournament,
    cap: usize,
) -> Result<(VertexOrdering, usize), Error> {
    let n = t.n();
    if n > cap {
        return Err(Error::CapExceeded {
            what: "cutwidth_exact vertex count (use the heuristic instead)",
            got: n,
            cap,
        });
    }
    if n == 0 {
        return Ok((VertexOrdering::identity(0), 0));
    }
    let full: usize = (1usize << n) - 1;
    let mut in_mask = vec![0usize; n];
    let mut out_mask = vec![0usize; n];
    for (u, v) in t.arcs() {
        out_mask[u] |= 1 << v;
        in_mask[v] |= 1 << u;
    }
    // cutcost[S] = arcs from outside S into S.
    let mut cutcost = vec![0u16; full + 1];
    for s in 1..=full {
        let v = s.trailing_zeros() as usize;
        let rest = s & (s - 1);
        let gained = (in_mask[v] & !s).count_ones() as i32;
        let lost = (out_mask[v] & rest).count_ones() as i32;
        cutcost[s] = (cutcost[rest] as i32 + gained - lost) as u16;
    }
    // best[S] = minimum over completions of the max cut strictly after S.
    let mut best = vec![0u16; full + 1];
    for s in (0..full).rev() {
        let mut b = u16::MAX;
        for v in 0..n {
            if s >> v & 1 == 1 {
                continue;
            }
            let ns = s | (1 << v);
            let cand = cutcost[ns].max(best[ns]);
            if cand < b {
                b = cand;
            }
        }
        best[s] = b;
    }
    let width = best[0] as usize;
    let mut order = Vec::with_capacity(n);
    let mut s = 0usize;
    while s != full {
        for v in 0..n {
            if s >> v & 1 == 1 {
                continue;
            }
            let ns = s | (1 << v);
            if cutcost[ns].max(best[ns]) == best[s] {
                order.push(v);
                s = ns;
                break;
            }
        }
    }
    Ok((VertexOrdering::new(order)?, width))
}

/// Cost used by the local search: width first, then the total of all cut
/// sizes as a tiebreaker so plateaus still drain.
fn ordering_cost(t: &Tournament, order: &[usize]) -> (usize, usize) {
    let n = order.len();
    let mut pos = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i + 1;
    }
    let mut cuts = vec![0usize; n + 1];
    for (u, v) in t.arcs() {
        let (pu, pv) = (pos[u], pos[v]);
        if pu > pv {
            for c in cuts.iter_mut().take(pu).skip(pv) {
                *c += 1;
            }
        }
    }
    let width = cuts.iter().copied().max().unwrap_or(0);
    (width, cuts.iter().sum())
}

/// Local-search cutwidth: vertex reinsertion (which subsumes adjacent swaps)
/// until a local optimum, from an out-degree start plus seeded restarts.
/// Deterministic per seed; the returned width is always an upper bound on
/// the exact cutwidth.
pub fn cutwidth_heuristic(t: &Tournament, seed: u64) -> (VertexOrdering, usize) {
    let n = t.n();
    if n == 0 {
        return (VertexOrdering::identity(0), 0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut degree_start: Vec<usize> = (0..n).collect();
    degree_start.sort_by_key(|&v| (std::cmp::Reverse(t.out_degree(v)), v));
    let mut starts = vec![degree_start, (0..n).collect()];
    for _ in 0..4 {
        let mut s: Vec<usize> = (0..n).collect();
        s.shuffle(&mut rng);
        starts.push(s);
    }
    let mut best: Option<(Vec<usize>, (usize, usize))> = None;
    for start in starts {
        let (order, cost) = local_search(t, start);
        if best.as_ref().map_or(true, |(_, c)| cost < *c) {
            best = Some((order, cost));
        }
    }
    let (order, (width, _)) = best.unwrap();
    (VertexOrdering::new(order).unwrap(), width)
}

fn local_search(t: &Tournament, mut order: Vec<usize>) -> (Vec<usize>, (usize, usize)) {
    let n = order.len();
    let mut cost = ordering_cost(t, &order);
    loop {
        let mut improved = false;
        for from in 0..n {
            for to in 0..n {
                if to == from {
                    continue;
                }
                let mut cand = order.clone();
                let v = cand.remove(from);
                cand.insert(to, v);
                let c = ordering_cost(t, &cand);
                if c < cost {
                    order = cand;
                    cost = c;
                    improved = true;
                }
            }
        }
        if !improved {
            return (order, cost);
        }
    }
}

/// An interval decomposition: one integer interval per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalDecomposition {
    pub first: Vec<i64>,
    pub last: Vec<i64>,
}

impl IntervalDecomposition {
    pub fn new(first: Vec<i64>, last: Vec<i64>) -> Result<Self, Error> {
        if first.len() != last.len() {
            return Err(Error::Invalid("endpoint vectors differ in length".into()));
        }
        for v in 0..first.len() {
            if first[v] > last[v] {
                return Err(Error::Invalid(format!(
                    "interval of vertex {v} is empty ({} > {})",
                    first[v], last[v]
                )));
            }
            if first[v] < 0 {
                return Err(Error::Invalid(format!(
                    "negative endpoint on vertex {v}"
                )));
            }
        }
        Ok(IntervalDecomposition { first, last })
    }

    pub fn n(&self) -> usize {
        self.first.len()
    }

    /// Largest interval end, the paper-style N; 0 for the empty decomposition.
    pub fn max_endpoint(&self) -> i64 {
        self.last.iter().copied().max().unwrap_or(0)
    }

    /// Width as the maximum alpha-cut over the integer sweep.
    pub fn width(&self) -> usize {
        (0..=self.max_endpoint())
            .map(|a| self.vcut(a).len())
            .max()
            .unwrap_or(0)
    }

    /// The alpha-cut: vertices whose interval contains `alpha`.
    pub fn vcut(&self, alpha: i64) -> Vec<usize> {
        (0..self.n())
            .filter(|&v| self.first[v] <= alpha && alpha <= self.last[v])
            .collect()
    }

    /// The vertices whose interval is entirely contained in [alpha, beta].
    pub fn interval_members(&self, alpha: i64, beta: i64) -> Vec<usize> {
        assert!(alpha <= beta, "interval_members needs alpha <= beta");
        (0..self.n())
            .filter(|&v| alpha <= self.first[v] && self.last[v] <= beta)
            .collect()
    }
}

/// Checks validity ("every arc joining disjoint intervals is forward") and
/// the normalized form (pairwise distinct endpoints, positive lengths).
/// Violations are data, not errors.
pub fn validate_decomposition(t: &Tournament, dec: &IntervalDecomposition) -> Vec<String> {
    let mut out = validity_violations(t, dec);
    out.extend(normal_form_violations(dec));
    out
}

fn validity_violations(t: &Tournament, dec: &IntervalDecomposition) -> Vec<String> {
    let mut out = Vec::new();
    if dec.n() != t.n() {
        out.push(format!(
            "decomposition covers {} vertices, tournament has {}",
            dec.n(),
            t.n()
        ));
        return out;
    }
    for u in 0..t.n() {
        for v in 0..t.n() {
            if u != v && dec.last[u] < dec.first[v] && !t.has_arc(u, v) {
                out.push(format!(
                    "intervals of {u} and {v} are disjoint but arc ({u},{v}) is missing"
                ));
            }
        }
    }
    out
}

fn normal_form_violations(dec: &IntervalDecomposition) -> Vec<String> {
    let mut out = Vec::new();
    let mut seen: std::collections::BTreeMap<i64, (usize, &str)> = Default::default();
    for v in 0..dec.n() {
        if dec.first[v] >= dec.last[v] {
            out.push(format!("interval of {v} has non-positive length"));
        }
        for (x, kind) in [(dec.first[v], "start"), (dec.last[v], "end")] {
            if let Some((w, k)) = seen.get(&x) {
                out.push(format!(
                    "endpoint clash at {x}: {kind} of {v} and {k} of {w}"
                ));
            } else {
                seen.insert(x, (v, kind));
            }
        }
    }
    out
}

/// Normalization: all endpoints become pairwise distinct non-negative
/// integers and every interval gets positive length, while preserving the
/// overlap order and the width.
///
/// Co-located endpoints are separated the way the degenerate case demands:
/// starts move infinitesimally before the shared coordinate, ends move
/// infinitesimally after it, then all endpoints are renumbered 0..2n-1.
pub fn normalize_decomposition(dec: &IntervalDecomposition) -> IntervalDecomposition {
    let n = dec.n();
    // Sort key: (coordinate, start-before-end at the same coordinate, vertex).
    let mut events: Vec<(i64, bool, usize)> = Vec::with_capacity(2 * n);
    for v in 0..n {
        events.push((dec.first[v], false, v));
        events.push((dec.last[v], true, v));
    }
    events.sort_unstable();
    let mut first = vec![0i64; n];
    let mut last = vec![0i64; n];
    for (rank, &(_, is_end, v)) in events.iter().enumerate() {
        if is_end {
            last[v] = rank as i64;
        } else {
            first[v] = rank as i64;
        }
    }
    IntervalDecomposition { first, last }
}

/// Canonical interval decomposition from an ordering: each vertex spans from
/// its position to the farthest backward-arc endpoint it participates in,
/// then the result is normalized. Always passes validation.
pub fn decomposition_from_ordering(t: &Tournament, sigma: &VertexOrdering) -> IntervalDecomposition {
    let n = t.n();
    let mut first: Vec<i64> = (0..n).map(|v| sigma.position(v) as i64).collect();
    let mut last = first.clone();
    for (u, v) in t.arcs() {
        let (pu, pv) = (sigma.position(u) as i64, sigma.position(v) as i64);
        if pu > pv {
            // Backward arc (u,v): u must reach down to v's position and
            // v must stretch up to u's position.
            first[u] = first[u].min(pv);
            last[v] = last[v].max(pu);
        }
    }
    normalize_decomposition(&IntervalDecomposition { first, last })
}

/// Result flag of [`pathwidth_search`]: whether the width is known optimal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathwidthQuality {
    Exact,
    UpperBound,
}

/// Minimum-width interval decomposition search.
///
/// Up to [`PATHWIDTH_EXACT_CAP`] vertices this enumerates endpoint
/// interleavings (each left endpoint before its right) with branch-and-bound
/// and is exact. Beyond that it takes the best canonical decomposition over
/// candidate orderings and tightens endpoints greedily while validity holds;
/// the flag is honest about non-exactness. `budget` caps the number of
/// interleaving nodes before falling back to the heuristic path.
pub fn pathwidth_search(
    t: &Tournament,
    budget: Option<u64>,
) -> (IntervalDecomposition, usize, PathwidthQuality) {
    let n = t.n();
    if n == 0 {
        return (
            IntervalDecomposition {
                first: vec![],
                last: vec![],
            },
            0,
            PathwidthQuality::Exact,
        );
    }
    if n <= PATHWIDTH_EXACT_CAP {
        if let Some(dec) = exhaustive_pathwidth(t, budget) {
            let w = dec.width();
            return (dec, w, PathwidthQuality::Exact);
        }
    }
    let mut candidates: Vec<VertexOrdering> = Vec::new();
    match cutwidth_exact(t) {
        Ok((sigma, _)) => candidates.push(sigma),
        Err(_) => candidates.push(cutwidth_heuristic(t, 0).0),
    }
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&v| (std::cmp::Reverse(t.out_degree(v)), v));
    candidates.push(VertexOrdering::new(by_degree).unwrap());
    candidates.push(VertexOrdering::identity(n));
    let mut best: Option<(IntervalDecomposition, usize)> = None;
    for sigma in &candidates {
        let dec = shrink_decomposition(t, decomposition_from_ordering(t, sigma));
        let w = dec.width();
        if best.as_ref().map_or(true, |(_, bw)| w < *bw) {
            best = Some((dec, w));
        }
    }
    let (dec, w) = best.unwrap();
    (dec, w, PathwidthQuality::UpperBound)
}

/// Exhaustive interleaving search; `None` only if the node budget ran out.
fn exhaustive_pathwidth(t: &Tournament, budget: Option<u64>) -> Option<IntervalDecomposition> {
    #[derive(Clone, Copy, PartialEq)]
    enum Last {
        None,
        Open(usize),
        Close(usize),
    }
    struct Search<'a> {
        t: &'a Tournament,
        n: usize,
        opened: Vec<bool>,
        closed: Vec<bool>,
        open_count: usize,
        width: usize,
        seq: Vec<(usize, bool)>,
        best_width: usize,
        best_seq: Option<Vec<(usize, bool)>>,
        nodes: u64,
        budget: Option<u64>,
        exhausted: bool,
    }
    impl Search<'_> {
        fn go(&mut self, last: Last) {
            if let Some(b) = self.budget {
                self.nodes += 1;
                if self.nodes > b {
                    self.exhausted = true;
                }
            }
            if self.exhausted || self.width >= self.best_width {
                return;
            }
            if self.seq.len() == 2 * self.n {
                self.best_width = self.width;
                self.best_seq = Some(self.seq.clone());
                return;
            }
            for v in 0..self.n {
                // Close moves first: they never increase the width.
                if self.opened[v] && !self.closed[v] {
                    // Runs of closes are canonically increasing.
                    if let Last::Close(w) = last {
                        if v < w {
                            continue;
                        }
                    }
                    self.closed[v] = true;
                    self.open_count -= 1;
                    self.seq.push((v, true));
                    self.go(Last::Close(v));
                    self.seq.pop();
                    self.open_count += 1;
                    self.closed[v] = false;
                }
            }
            for v in 0..self.n {
                if self.opened[v] {
                    continue;
                }
                if let Last::Open(w) = last {
                    if v < w {
                        continue;
                    }
                }
                // Opening v after u closed forces the arc (u, v).
                if (0..self.n).any(|u| self.closed[u] && !self.t.has_arc(u, v)) {
                    continue;
                }
                self.opened[v] = true;
                self.open_count += 1;
                let saved = self.width;
                self.width = self.width.max(self.open_count);
                self.seq.push((v, false));
                self.go(Last::Open(v));
                self.seq.pop();
                self.width = saved;
                self.open_count -= 1;
                self.opened[v] = false;
            }
        }
    }
    let n = t.n();
    let mut s = Search {
        t,
        n,
        opened: vec![false; n],
        closed: vec![false; n],
        open_count: 0,
        width: 0,
        seq: Vec::new(),
        best_width: usize::MAX,
        best_seq: None,
        nodes: 0,
        budget,
        exhausted: false,
    };
    s.go(Last::None);
    if s.exhausted {
        return None;
    }
    let seq = s.best_seq.expect("some interleaving is always valid");
    let mut first = vec![0i64; n];
    let mut last = vec![0i64; n];
    for (rank, &(v, is_end)) in seq.iter().enumerate() {
        if is_end {
            last[v] = rank as i64;
        } else {
            first[v] = rank as i64;
        }
    }
    Some(IntervalDecomposition { first, last })
}

/// Greedy endpoint tightening: pull each endpoint inward one rank at a time
/// while the decomposition stays valid. Widths never increase under
/// shrinking, so every valid move is kept.
fn shrink_decomposition(t: &Tournament, dec: IntervalDecomposition) -> IntervalDecomposition {
    let n = dec.n();
    // Work on the symbol sequence so the normal form survives each move.
    let mut events: Vec<(usize, bool)> = Vec::with_capacity(2 * n);
    {
        let mut tagged: Vec<(i64, usize, bool)> = Vec::new();
        for v in 0..n {
            tagged.push((dec.first[v], v, false));
            tagged.push((dec.last[v], v, true));
        }
        tagged.sort_unstable();
        for (_, v, e) in tagged {
            events.push((v, e));
        }
    }
    let rebuild = |events: &[(usize, bool)]| {
        let mut first = vec![0i64; n];
        let mut last = vec![0i64; n];
        for (rank, &(v, is_end)) in events.iter().enumerate() {
            if is_end {
                last[v] = rank as i64;
            } else {
                first[v] = rank as i64;
            }
        }
        IntervalDecomposition { first, last }
    };
    let mut changed = true;
    while changed {
        changed = false;
        for i in 1..events.len() {
            let (v, is_end) = events[i];
            let (w, _) = events[i - 1];
            if !is_end || v == w {
                continue;
            }
            // Move the end of v one rank earlier.
            events.swap(i - 1, i);
            let cand = rebuild(&events);
            if cand.first[v] < cand.last[v] && validity_violations(t, &cand).is_empty() {
                changed = true;
            } else {
                events.swap(i - 1, i);
            }
        }
        for i in 0..events.len().saturating_sub(1) {
            let (v, is_end) = events[i];
            let (w, _) = events[i + 1];
            if is_end || v == w {
                continue;
            }
            // Move the start of v one rank later.
            events.swap(i, i + 1);
            let cand = rebuild(&events);
            if cand.first[v] < cand.last[v] && validity_violations(t, &cand).is_empty() {
                changed = true;
            } else {
                events.swap(i, i + 1);
            }
        }
    }
    rebuild(&events)
}
