//! Exhaustive search and verification for immersion and topological-minor
//! models of a pattern in a host digraph (a tournament or a tournament minus
//! deletions).
//!
//! The searcher backtracks over the vertex embedding in pattern-degree
//! order, then routes arc paths shortest-first with lexicographic
//! tie-breaks, reserving arcs (immersions) or internal vertices (topological
//! minors) and backtracking fully over path choices. `Absent` is returned
//! only after the search space is exhausted; running out of node budget is
//! a distinct answer and never treated as absence.

use serde::{Deserialize, Serialize};

use crate::digraph::{strong_components_of, Arc, Digraph, Pattern};
use crate::error::Error;

/// Bitmask-based search; hosts beyond this size are refused.
pub const EMBED_VERTEX_CAP: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Immersion,
    TopMinor,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModelKind::Immersion => write!(f, "immersion"),
            ModelKind::TopMinor => write!(f, "topminor"),
        }
    }
}

/// An embedding of a pattern into a host: the injective vertex map plus one
/// directed host path per pattern arc.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Model {
    pub kind: ModelKind,
    /// `vertex_map[u]` is the host image of pattern vertex `u`.
    pub vertex_map: Vec<usize>,
    /// One entry per pattern arc, sorted by arc: the host path as a vertex
    /// sequence from the image of the tail to the image of the head.
    pub paths: Vec<(Arc, Vec<usize>)>,
}

impl Model {
    /// All host vertices that participate: images and path vertices.
    pub fn vertices(&self) -> std::collections::BTreeSet<usize> {
        let mut s: std::collections::BTreeSet<usize> = self.vertex_map.iter().copied().collect();
        for (_, p) in &self.paths {
            s.extend(p.iter().copied());
        }
        s
    }

    /// All host arcs used by paths, in path order, with repeats kept so
    /// audits can spot reuse.
    pub fn arcs(&self) -> Vec<Arc> {
        let mut out = Vec::new();
        for (_, p) in &self.paths {
            for w in p.windows(2) {
                out.push((w[0], w[1]));
            }
        }
        out
    }

    /// Rewrites labels through `map` (local label -> host label).
    pub fn relabel(&self, map: &[usize]) -> Model {
        Model {
            kind: self.kind,
            vertex_map: self.vertex_map.iter().map(|&v| map[v]).collect(),
            paths: self
                .paths
                .iter()
                .map(|(a, p)| (*a, p.iter().map(|&v| map[v]).collect()))
                .collect(),
        }
    }
}

/// Node budget for the backtracking searches. Budgets count expanded search
/// nodes, not time, so runs are reproducible. Counters use interior
/// mutability so nested searches can share one budget.
#[derive(Debug)]
pub struct Budget {
    limit: Option<u64>,
    used: std::cell::Cell<u64>,
    exhausted: std::cell::Cell<bool>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget::new(None)
    }

    pub fn limited(n: u64) -> Self {
        Budget::new(Some(n))
    }

    pub fn new(limit: Option<u64>) -> Self {
        Budget {
            limit,
            used: std::cell::Cell::new(0),
            exhausted: std::cell::Cell::new(false),
        }
    }

    #[inline]
    fn tick(&self) -> bool {
        self.used.set(self.used.get() + 1);
        if let Some(l) = self.limit {
            if self.used.get() > l {
                self.exhausted.set(true);
            }
        }
        !self.exhausted.get()
    }

    pub fn used(&self) -> u64 {
        self.used.get()
    }

    pub fn is_exhausted(&self) -> bool {
        self.exhausted.get()
    }
}

/// Outcome of a complete backtracking search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchResult<T> {
    Found(T),
    Absent,
    Exhausted,
}

impl<T> SearchResult<T> {
    pub fn found(self) -> Option<T> {
        match self {
            SearchResult::Found(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, SearchResult::Found(_))
    }
}

/// Mechanical verification of a model against the definitions. Returns the
/// empty list iff the model is valid for `kind` in `host`.
pub fn verify_model(host: &Digraph, pattern: &Pattern, model: &Model) -> Vec<String> {
    let mut v = Vec::new();
    let n = host.n();
    if model.vertex_map.len() != pattern.n() {
        v.push(format!(
            "vertex map covers {} pattern vertices, expected {}",
            model.vertex_map.len(),
            pattern.n()
        ));
        return v;
    }
    for (u, &img) in model.vertex_map.iter().enumerate() {
        if img >= n {
            v.push(format!("image {img} of pattern vertex {u} outside host"));
        }
    }
    if !v.is_empty() {
        return v;
    }
    let mut seen = std::collections::BTreeSet::new();
    for (u, &img) in model.vertex_map.iter().enumerate() {
        if !seen.insert(img) {
            v.push(format!("vertex map not injective at pattern vertex {u}"));
        }
    }
    // Exactly one path per pattern arc.
    let have: Vec<Arc> = model.paths.iter().map(|(a, _)| *a).collect();
    let mut want: Vec<Arc> = pattern.arcs().to_vec();
    want.sort_unstable();
    let mut have_sorted = have.clone();
    have_sorted.sort_unstable();
    if have_sorted != want {
        v.push("path map does not cover exactly the pattern arcs".to_string());
        return v;
    }
    let images: std::collections::BTreeSet<usize> = model.vertex_map.iter().copied().collect();
    let mut arc_used: std::collections::BTreeSet<Arc> = Default::default();
    let mut internal_used: std::collections::BTreeSet<usize> = Default::default();
    for ((pu, pv), path) in &model.paths {
        if path.len() < 2 {
            v.push(format!("path for ({pu},{pv}) has no arcs"));
            continue;
        }
        if path[0] != model.vertex_map[*pu] {
            v.push(format!("path for ({pu},{pv}) does not start at the tail image"));
        }
        if *path.last().unwrap() != model.vertex_map[*pv] {
            v.push(format!("path for ({pu},{pv}) does not end at the head image"));
        }
        for w in path.windows(2) {
            if w[0] >= n || w[1] >= n || !host.has_arc(w[0], w[1]) {
                v.push(format!(
                    "path for ({pu},{pv}) is disconnected: host arc ({},{}) missing",
                    w[0], w[1]
                ));
            }
            if !arc_used.insert((w[0], w[1])) {
                v.push(format!(
                    "arc reused: ({},{}) appears in more than one place",
                    w[0], w[1]
                ));
            }
        }
        match model.kind {
            ModelKind::Immersion => {
                // Arc-level reuse was checked above; vertex revisits inside a
                // path are tolerated for immersions.
            }
            ModelKind::TopMinor => {
                let mut on_path = std::collections::BTreeSet::new();
                for &x in path.iter() {
                    if !on_path.insert(x) {
                        v.push(format!("path for ({pu},{pv}) revisits vertex {x}"));
                    }
                }
                for &x in &path[1..path.len() - 1] {
                    if images.contains(&x) {
                        v.push(format!(
                            "path for ({pu},{pv}) runs through image vertex {x}"
                        ));
                    }
                    if !internal_used.insert(x) {
                        v.push(format!(
                            "internal vertex {x} shared between paths"
                        ));
                    }
                }
            }
        }
    }
    v
}

/// Complete search for a model of `pattern` in `host`, deterministic given
/// its inputs.
pub fn find_model(
    host: &Digraph,
    pattern: &Pattern,
    kind: ModelKind,
    budget: &Budget,
) -> Result<SearchResult<Model>, Error> {
    let mut hit = None;
    let r = for_each_model(host, pattern, kind, &Restrictions::none(), budget, &mut |m| {
        hit = Some(m.clone());
        true
    })?;
    Ok(match r {
        SearchResult::Found(()) => SearchResult::Found(hit.unwrap()),
        SearchResult::Absent => SearchResult::Absent,
        SearchResult::Exhausted => SearchResult::Exhausted,
    })
}

/// True iff the host contains no model of the pattern. A budget exhaustion
/// is surfaced as an error rather than a (wrong) answer.
pub fn is_free(
    host: &Digraph,
    pattern: &Pattern,
    kind: ModelKind,
    budget: &Budget,
) -> Result<bool, Error> {
    match find_model(host, pattern, kind, budget)? {
        SearchResult::Found(_) => Ok(false),
        SearchResult::Absent => Ok(true),
        SearchResult::Exhausted => Err(Error::BudgetExhausted(budget.used())),
    }
}

/// External restrictions for enumeration: vertices that may not participate
/// at all, and arcs that may not be used (both in host labels). Used by the
/// packing layer for disjointness reservations and symmetry breaking.
#[derive(Clone, Debug, Default)]
pub struct Restrictions {
    pub banned_vertices: u64,
    pub banned_arcs: std::collections::BTreeSet<Arc>,
}

impl Restrictions {
    pub fn none() -> Self {
        Restrictions::default()
    }
}

/// Enumerates models in deterministic order, invoking `on_model` for each;
/// the callback returns `true` to stop. `Found(())` means the callback
/// stopped the enumeration, `Absent` that it ran to completion.
pub(crate) fn for_each_model(
    host: &Digraph,
    pattern: &Pattern,
    kind: ModelKind,
    restrict: &Restrictions,
    budget: &Budget,
    on_model: &mut dyn FnMut(&Model) -> bool,
) -> Result<SearchResult<()>, Error> {
    let n = host.n();
    if n > EMBED_VERTEX_CAP {
        return Err(Error::CapExceeded {
            what: "embedding host size",
            got: n,
            cap: EMBED_VERTEX_CAP,
        });
    }
    // Usable adjacency after restrictions.
    let mut adj: Vec<u64> = vec![0; n];
    let alive: u64 = (0..n)
        .filter(|&v| restrict.banned_vertices >> v & 1 == 0)
        .fold(0, |m, v| m | 1 << v);
    for u in 0..n {
        if alive >> u & 1 == 0 {
            continue;
        }
        for v in 0..n {
            if u == v || alive >> v & 1 == 0 {
                continue;
            }
            if host.has_arc(u, v) && !restrict.banned_arcs.contains(&(u, v)) {
                adj[u] |= 1 << v;
            }
        }
    }
    if (alive.count_ones() as usize) < pattern.n() {
        return Ok(SearchResult::Absent);
    }
    // Transitive closure over the usable digraph.
    let mut reach: Vec<u64> = adj.clone();
    for k in 0..n {
        for i in 0..n {
            if reach[i] >> k & 1 == 1 {
                reach[i] |= reach[k];
            }
        }
    }
    // Host strong components over the usable digraph.
    let mut hscc = vec![usize::MAX; n];
    {
        let mut next = 0;
        for v in 0..n {
            if alive >> v & 1 == 0 || hscc[v] != usize::MAX {
                continue;
            }
            for w in 0..n {
                if alive >> w & 1 == 0 || hscc[w] != usize::MAX {
                    continue;
                }
                let mutual = (v == w)
                    || (reach[v] >> w & 1 == 1 && reach[w] >> v & 1 == 1);
                if mutual {
                    hscc[w] = next;
                }
            }
            next += 1;
        }
    }
    let host_has_cycle = (0..n).any(|v| alive >> v & 1 == 1 && reach[v] >> v & 1 == 1);
    let pdec = strong_components_of(pattern.as_digraph());
    let pattern_acyclic = pdec.components.iter().all(|c| c.len() == 1);
    // A pattern with a directed cycle can never embed into an acyclic host.
    if !pattern_acyclic && !host_has_cycle {
        return Ok(SearchResult::Absent);
    }

    let mut v_order: Vec<usize> = (0..pattern.n()).collect();
    v_order.sort_by_key(|&u| {
        (
            std::cmp::Reverse(pattern.out_degree(u) + pattern.in_degree(u)),
            u,
        )
    });
    let mut arcs: Vec<Arc> = pattern.arcs().to_vec();
    arcs.sort_unstable();

    let mut s = Search {
        host_n: n,
        pattern,
        kind,
        adj,
        reach,
        hscc,
        alive,
        comp_of: pdec.comp_of.clone(),
        comp_trivial: (0..pattern.n())
            .map(|u| pdec.components[pdec.comp_of[u]].len() == 1)
            .collect(),
        v_order,
        arcs,
        phi: vec![usize::MAX; pattern.n()],
        used_image: 0,
        used_arc: vec![false; n * n],
        used_internal: 0,
        paths: Vec::new(),
        budget,
        stopped: false,
    };
    for _ in 0..s.arcs.len() {
        s.paths.push(Vec::new());
    }
    let ok = s.assign(0, on_model);
    if s.budget.is_exhausted() {
        return Ok(SearchResult::Exhausted);
    }
    Ok(if ok {
        SearchResult::Found(())
    } else {
        SearchResult::Absent
    })
}

struct Search<'a> {
    host_n: usize,
    pattern: &'a Pattern,
    kind: ModelKind,
    adj: Vec<u64>,
    reach: Vec<u64>,
    hscc: Vec<usize>,
    alive: u64,
    comp_of: Vec<usize>,
    comp_trivial: Vec<bool>,
    v_order: Vec<usize>,
    arcs: Vec<Arc>,
    phi: Vec<usize>,
    used_image: u64,
    used_arc: Vec<bool>,
    used_internal: u64,
    paths: Vec<Vec<usize>>,
    budget: &'a Budget,
    stopped: bool,
}

impl Search<'_> {
    /// Backtracks over images for `v_order[d..]`; returns true iff the
    /// callback stopped the enumeration.
    fn assign(&mut self, d: usize, on_model: &mut dyn FnMut(&Model) -> bool) -> bool {
        if self.stopped || self.budget.is_exhausted() {
            return self.stopped;
        }
        if d == self.v_order.len() {
            return self.route(0, on_model);
        }
        let pu = self.v_order[d];
        let (pout, pin) = (self.pattern.out_degree(pu), self.pattern.in_degree(pu));
        for hv in 0..self.host_n {
            if self.alive >> hv & 1 == 0 || self.used_image >> hv & 1 == 1 {
                continue;
            }
            if !self.budget.tick() {
                return false;
            }
            if (self.adj[hv].count_ones() as usize) < pout
                || ((0..self.host_n)
                    .filter(|&u| self.adj[u] >> hv & 1 == 1)
                    .count())
                    < pin
            {
                continue;
            }
            if !self.compatible(pu, hv) {
                continue;
            }
            self.phi[pu] = hv;
            self.used_image |= 1 << hv;
            let hit = self.assign(d + 1, on_model);
            self.used_image &= !(1 << hv);
            self.phi[pu] = usize::MAX;
            if hit || self.budget.is_exhausted() {
                return hit;
            }
        }
        false
    }

    /// Necessary conditions against already-assigned pattern vertices:
    /// reachability along pattern arcs, and one host strong component per
    /// non-trivial pattern component.
    fn compatible(&self, pu: usize, hv: usize) -> bool {
        for q in 0..self.pattern.n() {
            let hq = self.phi[q];
            if hq == usize::MAX {
                continue;
            }
            if self.pattern.has_arc(pu, q) && self.reach[hv] >> hq & 1 == 0 {
                return false;
            }
            if self.pattern.has_arc(q, pu) && self.reach[hq] >> hv & 1 == 0 {
                return false;
            }
            if !self.comp_trivial[pu]
                && self.comp_of[q] == self.comp_of[pu]
                && self.hscc[hq] != self.hscc[hv]
            {
                return false;
            }
        }
        true
    }

    /// Routes paths for arcs `ai..`, shortest-first.
    fn route(&mut self, ai: usize, on_model: &mut dyn FnMut(&Model) -> bool) -> bool {
        if self.stopped || self.budget.is_exhausted() {
            return self.stopped;
        }
        if ai == self.arcs.len() {
            let model = Model {
                kind: self.kind,
                vertex_map: self.phi.clone(),
                paths: self
                    .arcs
                    .iter()
                    .cloned()
                    .zip(self.paths.iter().cloned())
                    .collect(),
            };
            if on_model(&model) {
                self.stopped = true;
            }
            return self.stopped;
        }
        let (pu, pv) = self.arcs[ai];
        let (from, to) = (self.phi[pu], self.phi[pv]);
        for len in 1..self.host_n.max(2) {
            self.paths[ai].clear();
            self.paths[ai].push(from);
            if self.extend_path(ai, from, to, len, 1 << from, on_model) {
                return true;
            }
            if self.budget.is_exhausted() {
                return false;
            }
        }
        false
    }

    fn extend_path(
        &mut self,
        ai: usize,
        cur: usize,
        target: usize,
        remaining: usize,
        on_path: u64,
        on_model: &mut dyn FnMut(&Model) -> bool,
    ) -> bool {
        for nxt in 0..self.host_n {
            if self.adj[cur] >> nxt & 1 == 0 {
                continue;
            }
            if self.used_arc[cur * self.host_n + nxt] {
                continue;
            }
            if !self.budget.tick() {
                return false;
            }
            if remaining == 1 {
                if nxt != target {
                    continue;
                }
            } else {
                if nxt == target || on_path >> nxt & 1 == 1 {
                    continue;
                }
                match self.kind {
                    ModelKind::TopMinor => {
                        // Internal vertices avoid images and other paths.
                        if self.used_image >> nxt & 1 == 1 || self.used_internal >> nxt & 1 == 1 {
                            continue;
                        }
                    }
                    ModelKind::Immersion => {}
                }
                // The target must stay reachable in the remaining length;
                // reach is an over-approximation but sound to prune on.
                if self.reach[nxt] >> target & 1 == 0 {
                    continue;
                }
            }
            self.used_arc[cur * self.host_n + nxt] = true;
            self.paths[ai].push(nxt);
            let hit = if remaining == 1 {
                let internal_mask = if self.kind == ModelKind::TopMinor {
                    let mut m = 0u64;
                    for &x in &self.paths[ai][1..self.paths[ai].len() - 1] {
                        m |= 1 << x;
                    }
                    m
                } else {
                    0
                };
                self.used_internal |= internal_mask;
                let r = self.route(ai + 1, on_model);
                self.used_internal &= !internal_mask;
                r
            } else {
                self.extend_path(ai, nxt, target, remaining - 1, on_path | 1 << nxt, on_model)
            };
            self.paths[ai].pop();
            self.used_arc[cur * self.host_n + nxt] = false;
            if hit || self.budget.is_exhausted() {
                return hit;
            }
        }
        false
    }
}
