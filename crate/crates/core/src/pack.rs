//! Disjoint-packing constructions: direct exhaustive packing, acyclic
//! packing through transitive subtournaments, and the interval-stitched
//! packing driven by transversal independent sets.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::digraph::{
    transitive_subtournament, Arc, ComponentOrdering, Digraph, Pattern, StrongDecomposition,
    Tournament,
};
use crate::embed::{
    for_each_model, verify_model, Budget, Model, ModelKind, Restrictions, SearchResult,
};
use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Disjointness {
    Arc,
    Vertex,
}

impl std::fmt::Display for Disjointness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Disjointness::Arc => write!(f, "arc"),
            Disjointness::Vertex => write!(f, "vertex"),
        }
    }
}

/// A packing: disjoint certified copies of the pattern in the host.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackingCertificate {
    pub kind: ModelKind,
    pub disjointness: Disjointness,
    pub models: Vec<Model>,
}

impl PackingCertificate {
    /// Full audit from the raw arc lists: every copy re-verifies and the
    /// pairwise disjointness is recomputed, trusting no flags.
    pub fn audit(&self, host: &Digraph, pattern: &Pattern) -> Vec<String> {
        let mut out = Vec::new();
        for (i, m) in self.models.iter().enumerate() {
            if m.kind != self.kind {
                out.push(format!(
                    "copy {i} is tagged {} but the certificate is {}",
                    m.kind, self.kind
                ));
            }
            for v in verify_model(host, pattern, m) {
                out.push(format!("copy {i}: {v}"));
            }
        }
        match self.disjointness {
            Disjointness::Arc => {
                let mut used: BTreeMap<Arc, usize> = BTreeMap::new();
                for (i, m) in self.models.iter().enumerate() {
                    for a in m.arcs() {
                        if let Some(j) = used.insert(a, i) {
                            if j != i {
                                out.push(format!(
                                    "arc ({},{}) shared between copies {j} and {i}",
                                    a.0, a.1
                                ));
                            }
                        }
                    }
                }
            }
            Disjointness::Vertex => {
                let mut used: BTreeMap<usize, usize> = BTreeMap::new();
                for (i, m) in self.models.iter().enumerate() {
                    for v in m.vertices() {
                        if let Some(j) = used.insert(v, i) {
                            if j != i {
                                out.push(format!("vertex {v} shared between copies {j} and {i}"));
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

fn arc_index(n: usize, a: Arc) -> usize {
    a.0 * n + a.1
}

/// Exhaustive search for `k` pairwise disjoint copies: find a copy, reserve
/// its footprint, recurse on the residual host, and backtrack over the copy
/// choice. Copies are forced into increasing order of their smallest
/// footprint element, and a footprint that failed at some level also prunes
/// its supersets there.
pub fn pack_direct(
    host: &Digraph,
    pattern: &Pattern,
    k: usize,
    kind: ModelKind,
    disjointness: Disjointness,
    budget: &Budget,
) -> Result<SearchResult<PackingCertificate>, Error> {
    if k == 0 {
        return Ok(SearchResult::Found(PackingCertificate {
            kind,
            disjointness,
            models: Vec::new(),
        }));
    }
    if pattern.arc_count() == 0 {
        return Ok(pack_arcless(host.n(), pattern, k, kind, disjointness));
    }
    let mut acc: Vec<Model> = Vec::new();
    let found = pack_rec(
        host,
        pattern,
        kind,
        disjointness,
        k,
        &Restrictions::none(),
        0,
        budget,
        &mut acc,
    )?;
    if budget.is_exhausted() {
        return Ok(SearchResult::Exhausted);
    }
    if !found {
        return Ok(SearchResult::Absent);
    }
    let cert = PackingCertificate {
        kind,
        disjointness,
        models: acc,
    };
    debug_assert!(cert.audit(host, pattern).is_empty());
    Ok(SearchResult::Found(cert))
}

/// Copies of an arcless pattern are bare vertex sets: arc-disjointness is
/// vacuous, so one set repeated k times suffices; vertex-disjointness needs
/// k separate blocks.
fn pack_arcless(
    n: usize,
    pattern: &Pattern,
    k: usize,
    kind: ModelKind,
    disjointness: Disjointness,
) -> SearchResult<PackingCertificate> {
    let m = pattern.n();
    let mut models = Vec::new();
    match disjointness {
        Disjointness::Arc => {
            if n < m {
                return SearchResult::Absent;
            }
            for _ in 0..k {
                models.push(Model {
                    kind,
                    vertex_map: (0..m).collect(),
                    paths: Vec::new(),
                });
            }
        }
        Disjointness::Vertex => {
            if n < m * k {
                return SearchResult::Absent;
            }
            for i in 0..k {
                models.push(Model {
                    kind,
                    vertex_map: (i * m..(i + 1) * m).collect(),
                    paths: Vec::new(),
                });
            }
        }
    }
    SearchResult::Found(PackingCertificate {
        kind,
        disjointness,
        models,
    })
}

#[allow(clippy::too_many_arguments)]
fn pack_rec(
    host: &Digraph,
    pattern: &Pattern,
    kind: ModelKind,
    disjointness: Disjointness,
    remaining: usize,
    restrict: &Restrictions,
    min_bound: usize,
    budget: &Budget,
    acc: &mut Vec<Model>,
) -> Result<bool, Error> {
    if remaining == 0 {
        return Ok(true);
    }
    let n = host.n();
    // Counting prune: not enough raw material left for the copies to come.
    let alive = (0..n)
        .filter(|&v| restrict.banned_vertices >> v & 1 == 0)
        .count();
    match disjointness {
        Disjointness::Vertex => {
            if alive < remaining * pattern.n() {
                return Ok(false);
            }
        }
        Disjointness::Arc => {
            if alive < pattern.n() {
                return Ok(false);
            }
        }
    }
    // Symmetry breaking: the next copy's smallest footprint element must
    // exceed the previous copy's, so everything below the bound is banned.
    let mut level = restrict.clone();
    match disjointness {
        Disjointness::Vertex => {
            for v in 0..min_bound.min(n) {
                level.banned_vertices |= 1 << v;
            }
        }
        Disjointness::Arc => {
            for u in 0..n {
                for v in 0..n {
                    if arc_index(n, (u, v)) < min_bound && host.has_arc(u, v) {
                        level.banned_arcs.insert((u, v));
                    }
                }
            }
        }
    }
    let mut failed_prints: Vec<BTreeSet<usize>> = Vec::new();
    let mut nested_err: Option<Error> = None;
    let mut done = false;
    for_each_model(host, pattern, kind, &level, budget, &mut |m| {
        let print: BTreeSet<usize> = match disjointness {
            Disjointness::Vertex => m.vertices(),
            Disjointness::Arc => m.arcs().iter().map(|&a| arc_index(n, a)).collect(),
        };
        // A failed footprint dooms every superset: more gets reserved while
        // the continuation constraints only tighten.
        if failed_prints.iter().any(|f| f.is_subset(&print)) {
            return false;
        }
        let mut deeper = restrict.clone();
        match disjointness {
            Disjointness::Vertex => {
                for &v in &print {
                    deeper.banned_vertices |= 1 << v;
                }
            }
            Disjointness::Arc => {
                for a in m.arcs() {
                    deeper.banned_arcs.insert(a);
                }
            }
        }
        let new_bound = print.iter().next().copied().unwrap_or(0) + 1;
        acc.push(m.clone());
        match pack_rec(
            host,
            pattern,
            kind,
            disjointness,
            remaining - 1,
            &deeper,
            new_bound,
            budget,
            acc,
        ) {
            Ok(true) => {
                done = true;
                true
            }
            Ok(false) => {
                acc.pop();
                failed_prints.push(print);
                false
            }
            Err(e) => {
                acc.pop();
                nested_err = Some(e);
                true
            }
        }
    })?;
    if let Some(e) = nested_err {
        return Err(e);
    }
    Ok(done)
}

/// Deterministic topological order of an acyclic pattern, smallest index
/// first among available sources.
fn topological_order(pattern: &Pattern) -> Vec<usize> {
    let n = pattern.n();
    let mut indeg: Vec<usize> = (0..n).map(|v| pattern.in_degree(v)).collect();
    let mut placed = vec![false; n];
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let v = (0..n)
            .find(|&v| !placed[v] && indeg[v] == 0)
            .expect("pattern is acyclic");
        placed[v] = true;
        out.push(v);
        for w in 0..n {
            if pattern.has_arc(v, w) {
                indeg[w] -= 1;
            }
        }
    }
    out
}

/// Embeds an acyclic pattern as a subgraph of a transitive vertex sequence
/// given in dominance order; every path is the single forward arc.
fn subgraph_model(pattern: &Pattern, seq: &[usize], kind: ModelKind) -> Model {
    let topo = topological_order(pattern);
    let mut vertex_map = vec![0usize; pattern.n()];
    for (i, &pv) in topo.iter().enumerate() {
        vertex_map[pv] = seq[i];
    }
    let paths = pattern
        .arcs()
        .iter()
        .map(|&(u, v)| ((u, v), vec![vertex_map[u], vertex_map[v]]))
        .collect();
    Model {
        kind,
        vertex_map,
        paths,
    }
}

/// Arc-disjoint copies of an acyclic pattern: collect vertex blocks of size
/// 2^|P| that pairwise share at most one vertex (their induced arc sets are
/// then disjoint), extract a transitive subtournament from each, and embed
/// the pattern as a subgraph. Falls back to [`pack_direct`] before giving up.
pub fn pack_acyclic_arc_disjoint(
    t: &Tournament,
    pattern: &Pattern,
    k: usize,
    seed: u64,
    budget: &Budget,
) -> Result<SearchResult<PackingCertificate>, Error> {
    if !pattern.is_acyclic() {
        return Err(Error::Invalid("pattern is not acyclic".into()));
    }
    if pattern.arc_count() == 0 {
        return Ok(pack_arcless(
            t.n(),
            pattern,
            k,
            ModelKind::Immersion,
            Disjointness::Arc,
        ));
    }
    let n = t.n();
    let q = 1usize << pattern.n().min(30);
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let overlap_ok = |blocks: &[Vec<usize>], cand: &[usize]| {
        blocks
            .iter()
            .all(|b| b.iter().filter(|v| cand.contains(v)).count() <= 1)
    };
    if q.saturating_mul(k) <= n {
        for i in 0..k {
            blocks.push((i * q..(i + 1) * q).collect());
        }
    } else if q <= n {
        // Seeded sampling of blocks sharing at most one vertex pairwise.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..200 * k.max(1) {
            if blocks.len() == k {
                break;
            }
            let mut pool: Vec<usize> = (0..n).collect();
            for i in 0..q {
                let j = rng.gen_range(i..n);
                pool.swap(i, j);
            }
            let mut cand: Vec<usize> = pool[..q].to_vec();
            cand.sort_unstable();
            if overlap_ok(&blocks, &cand) {
                blocks.push(cand);
            }
        }
        // Exhaustive completion over lexicographic q-subsets at small n.
        if blocks.len() < k && binomial(n, q) <= 200_000 {
            let mut cand: Vec<usize> = Vec::new();
            complete_blocks(n, q, 0, &mut cand, &mut blocks, k, &overlap_ok);
        }
    }
    if blocks.len() >= k {
        let mut models = Vec::new();
        for block in blocks.iter().take(k) {
            let (sub, map) = t.restrict(block)?;
            let seq = transitive_subtournament(&sub, pattern.n()).expect(
                "blocks of size 2^|P| always contain a transitive subtournament of size |P|",
            );
            let host_seq: Vec<usize> = seq.into_iter().map(|v| map[v]).collect();
            models.push(subgraph_model(pattern, &host_seq, ModelKind::Immersion));
        }
        let cert = PackingCertificate {
            kind: ModelKind::Immersion,
            disjointness: Disjointness::Arc,
            models,
        };
        let audit = cert.audit(t.as_digraph(), pattern);
        if !audit.is_empty() {
            return Err(Error::Internal(format!(
                "acyclic packing failed audit: {audit:?}"
            )));
        }
        return Ok(SearchResult::Found(cert));
    }
    pack_direct(
        t.as_digraph(),
        pattern,
        k,
        ModelKind::Immersion,
        Disjointness::Arc,
        budget,
    )
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut r: usize = 1;
    for i in 0..k.min(n - k) {
        r = r.saturating_mul(n - i) / (i + 1);
    }
    r
}

#[allow(clippy::too_many_arguments)]
fn complete_blocks(
    n: usize,
    q: usize,
    start: usize,
    cand: &mut Vec<usize>,
    blocks: &mut Vec<Vec<usize>>,
    k: usize,
    overlap_ok: &dyn Fn(&[Vec<usize>], &[usize]) -> bool,
) {
    if blocks.len() >= k {
        return;
    }
    if cand.len() == q {
        if overlap_ok(blocks, cand) {
            blocks.push(cand.clone());
        }
        return;
    }
    for v in start..n {
        cand.push(v);
        complete_blocks(n, q, v + 1, cand, blocks, k, overlap_ok);
        cand.pop();
        if blocks.len() >= k {
            return;
        }
    }
}

/// Vertex-disjoint copies of an acyclic pattern by partitioning the vertex
/// set into k blocks and extracting a transitive subtournament from each.
/// Guaranteed to succeed when n >= 2^|P| * k; below that the partition is
/// still attempted and may succeed thanks to the exhaustive transitive
/// fallback.
pub fn pack_acyclic_vertex_disjoint(
    t: &Tournament,
    pattern: &Pattern,
    k: usize,
) -> Result<Option<PackingCertificate>, Error> {
    if !pattern.is_acyclic() {
        return Err(Error::Invalid("pattern is not acyclic".into()));
    }
    let n = t.n();
    let m = pattern.n();
    if k == 0 {
        return Ok(Some(PackingCertificate {
            kind: ModelKind::TopMinor,
            disjointness: Disjointness::Vertex,
            models: Vec::new(),
        }));
    }
    if m == 0 || n < m * k {
        return Ok(None);
    }
    if pattern.arc_count() == 0 {
        return Ok(pack_arcless(n, pattern, k, ModelKind::TopMinor, Disjointness::Vertex).found());
    }
    // Consecutive blocks, as even as possible.
    let base = n / k;
    let mut models = Vec::new();
    for i in 0..k {
        let lo = i * base;
        let hi = if i + 1 == k { n } else { (i + 1) * base };
        let block: Vec<usize> = (lo..hi).collect();
        let (sub, map) = t.restrict(&block)?;
        match transitive_subtournament(&sub, m) {
            Some(seq) => {
                let host_seq: Vec<usize> = seq.into_iter().map(|v| map[v]).collect();
                models.push(subgraph_model(pattern, &host_seq, ModelKind::TopMinor));
            }
            None => return Ok(None),
        }
    }
    let cert = PackingCertificate {
        kind: ModelKind::TopMinor,
        disjointness: Disjointness::Vertex,
        models,
    };
    let audit = cert.audit(t.as_digraph(), pattern);
    if !audit.is_empty() {
        return Err(Error::Internal(format!(
            "vertex-disjoint acyclic packing failed audit: {audit:?}"
        )));
    }
    Ok(Some(cert))
}

/// A graph on h parts of s copies each; an edge marks a conflicting pair of
/// copies. Vertices are (part, index-within-part).
#[derive(Clone, Debug)]
pub struct PartitionedConflictGraph {
    pub h: usize,
    pub s: usize,
    edges: BTreeSet<((usize, usize), (usize, usize))>,
}

impl PartitionedConflictGraph {
    pub fn new(
        h: usize,
        s: usize,
        edges: impl IntoIterator<Item = ((usize, usize), (usize, usize))>,
    ) -> Result<Self, Error> {
        if s % 2 != 0 {
            return Err(Error::TransversalPrecondition(format!(
                "part size s = {s} must be even"
            )));
        }
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            for &(i, x) in [&a, &b] {
                if i >= h || x >= s {
                    return Err(Error::TransversalPrecondition(format!(
                        "vertex ({i},{x}) outside {h} parts of size {s}"
                    )));
                }
            }
            if a == b {
                return Err(Error::TransversalPrecondition("self-loop".into()));
            }
            set.insert(if a <= b { (a, b) } else { (b, a) });
        }
        Ok(PartitionedConflictGraph { h, s, edges: set })
    }

    pub fn has_edge(&self, a: (usize, usize), b: (usize, usize)) -> bool {
        let key = if a <= b { (a, b) } else { (b, a) };
        self.edges.contains(&key)
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn cross_count(&self, i: usize, j: usize) -> usize {
        self.edges
            .iter()
            .filter(|((pi, _), (pj, _))| (*pi, *pj) == (i, j) || (*pi, *pj) == (j, i))
            .count()
    }

    /// The edge bound required by the shift-vector argument: at most
    /// s^2/h^2 edges between any two parts.
    pub fn satisfies_edge_bound(&self) -> bool {
        for i in 0..self.h {
            for j in (i + 1)..self.h {
                if self.cross_count(i, j) * self.h * self.h > self.s * self.s {
                    return false;
                }
            }
        }
        true
    }

    pub fn slice_is_independent(&self, slice: &[(usize, usize)]) -> bool {
        for a in 0..slice.len() {
            for b in (a + 1)..slice.len() {
                if self.has_edge(slice[a], slice[b]) {
                    return false;
                }
            }
        }
        true
    }
}

/// At least s/2 pairwise disjoint independent transversals, one vertex per
/// part each, via the random-shift argument: sample a shift vector, keep
/// the independent diagonal slices, retry, and finally sweep all shift
/// vectors when the space is small. Deterministic per seed.
pub fn transversal_independent_sets(
    g: &PartitionedConflictGraph,
    seed: u64,
) -> Result<Vec<Vec<(usize, usize)>>, Error> {
    if g.s % 2 != 0 {
        return Err(Error::TransversalPrecondition("s must be even".into()));
    }
    if !g.satisfies_edge_bound() {
        return Err(Error::TransversalPrecondition(format!(
            "some part pair exceeds s^2/h^2 = {}/{} edges",
            g.s * g.s,
            g.h * g.h
        )));
    }
    let (h, s) = (g.h, g.s);
    if h == 0 || s == 0 {
        return Ok(Vec::new());
    }
    let slices_for = |shifts: &[usize]| -> Vec<Vec<(usize, usize)>> {
        (0..s)
            .map(|t| (0..h).map(|i| (i, (t + shifts[i]) % s)).collect::<Vec<_>>())
            .filter(|slice| g.slice_is_independent(slice))
            .collect()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..64 * h {
        let shifts: Vec<usize> = (0..h).map(|_| rng.gen_range(0..s)).collect();
        let good = slices_for(&shifts);
        if good.len() >= s / 2 {
            return Ok(good);
        }
    }
    if s * h <= 16 {
        let mut shifts = vec![0usize; h];
        loop {
            let good = slices_for(&shifts);
            if good.len() >= s / 2 {
                return Ok(good);
            }
            // Next shift vector in lexicographic order.
            let mut i = h;
            loop {
                if i == 0 {
                    return Err(Error::TransversalExhausted(format!(
                        "all {s}^{h} shift vectors tried"
                    )));
                }
                i -= 1;
                shifts[i] += 1;
                if shifts[i] < s {
                    break;
                }
                shifts[i] = 0;
            }
        }
    }
    Err(Error::TransversalExhausted(format!(
        "{} sampling attempts failed and s*h = {} exceeds the sweep cap",
        64 * h,
        s * h
    )))
}

/// Stitches models of the full pattern out of per-window component copies:
/// pick conflict-free transversals (one copy per window), union the
/// component models, and map every cross-component pattern arc to the
/// single forward host arc between the chosen copies' endpoint images.
///
/// `families[i]` holds `s` vertex-disjoint models (host labels, component-
/// local vertex maps) of the component at position i+1 of `pi`, found
/// inside window i; windows are layout-ordered, so conflicts between copies
/// are backward arcs and cut-bounded.
#[allow(clippy::too_many_arguments)]
pub fn assemble_interval_packing(
    host: &Tournament,
    pattern: &Pattern,
    dec: &StrongDecomposition,
    pi: &ComponentOrdering,
    families: &[Vec<Model>],
    k: usize,
    kind: ModelKind,
    seed: u64,
) -> Result<PackingCertificate, Error> {
    let h = dec.h();
    if families.len() != h {
        return Err(Error::Invalid(format!(
            "{} families for {h} components",
            families.len()
        )));
    }
    let s = families.first().map_or(0, |f| f.len());
    if families.iter().any(|f| f.len() != s) || s == 0 {
        return Err(Error::Invalid(
            "families must share one positive size".into(),
        ));
    }
    // Conflict edge: some host arc from a later-window copy into an
    // earlier-window copy.
    let verts: Vec<Vec<BTreeSet<usize>>> = families
        .iter()
        .map(|f| f.iter().map(|m| m.vertices()).collect())
        .collect();
    let mut edges = Vec::new();
    for i in 0..h {
        for j in (i + 1)..h {
            for (a, va) in verts[i].iter().enumerate() {
                for (b, vb) in verts[j].iter().enumerate() {
                    let conflict = vb.iter().any(|&x| va.iter().any(|&y| host.has_arc(x, y)));
                    if conflict {
                        edges.push(((i, a), (j, b)));
                    }
                }
            }
        }
    }
    let transversals: Vec<Vec<usize>> = if edges.is_empty() {
        // Every diagonal slice works; take the first k.
        if s < k {
            return Err(Error::Invalid(format!(
                "need {k} copies per window, families hold {s}"
            )));
        }
        (0..k).map(|t| vec![t; h]).collect()
    } else {
        if s < 2 * k {
            return Err(Error::TransversalPrecondition(format!(
                "family size s = {s} is below 2k = {}",
                2 * k
            )));
        }
        let g = PartitionedConflictGraph::new(h, s, edges)?;
        let slices = transversal_independent_sets(&g, seed)?;
        if slices.len() < k {
            return Err(Error::Internal(format!(
                "got {} transversals, needed {k}",
                slices.len()
            )));
        }
        slices[..k]
            .iter()
            .map(|slice| {
                let mut choice = vec![0usize; h];
                for &(i, x) in slice {
                    choice[i] = x;
                }
                choice
            })
            .collect()
    };
    let mut models = Vec::new();
    for choice in &transversals {
        models.push(stitch(host, pattern, dec, pi, families, choice, kind)?);
    }
    let cert = PackingCertificate {
        kind,
        disjointness: Disjointness::Vertex,
        models,
    };
    let audit = cert.audit(host.as_digraph(), pattern);
    if !audit.is_empty() {
        return Err(Error::Internal(format!(
            "stitched packing failed audit: {audit:?}"
        )));
    }
    Ok(cert)
}

fn stitch(
    host: &Tournament,
    pattern: &Pattern,
    dec: &StrongDecomposition,
    pi: &ComponentOrdering,
    families: &[Vec<Model>],
    choice: &[usize],
    kind: ModelKind,
) -> Result<Model, Error> {
    let h = dec.h();
    // Window slot of each component under pi.
    let mut slot_of = vec![0usize; h];
    for (slot, &c) in pi.seq.iter().enumerate() {
        slot_of[c] = slot;
    }
    let mut vertex_map = vec![usize::MAX; pattern.n()];
    let mut paths: Vec<(Arc, Vec<usize>)> = Vec::new();
    for c in 0..h {
        let slot = slot_of[c];
        let model = &families[slot][choice[slot]];
        let members = &dec.components[c];
        for (local, &global) in members.iter().enumerate() {
            vertex_map[global] = model.vertex_map[local];
        }
        for ((lu, lv), path) in &model.paths {
            paths.push(((members[*lu], members[*lv]), path.clone()));
        }
    }
    for &(u, v) in pattern.arcs() {
        if dec.comp_of[u] == dec.comp_of[v] {
            continue;
        }
        let (hu, hv) = (vertex_map[u], vertex_map[v]);
        if !host.has_arc(hu, hv) {
            // Impossible when the transversal is independent: the only
            // other orientation would be a conflict edge.
            return Err(Error::Internal(format!(
                "stitch arc ({hu},{hv}) missing or backward"
            )));
        }
        paths.push(((u, v), vec![hu, hv]));
    }
    paths.sort_by_key(|(a, _)| *a);
    Ok(Model {
        kind,
        vertex_map,
        paths,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::{enumerate_component_orderings, strong_components, Tournament};
    use crate::oracle::two_c3_blocks;

    fn c3p() -> Pattern {
        Pattern::new(3, &[(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    fn p2() -> Pattern {
        Pattern::new(2, &[(0, 1)]).unwrap()
    }

    fn seeded_tournament(n: usize, seed: u64) -> Tournament {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut adj = vec![false; n * n];
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.gen_bool(0.5) {
                    adj[u * n + v] = true;
                } else {
                    adj[v * n + u] = true;
                }
            }
        }
        Tournament::from_matrix(n, &adj).unwrap()
    }

    #[test]
    fn pack_direct_c3_in_c3() {
        let host = Tournament::c3();
        let r = pack_direct(
            host.as_digraph(),
            &c3p(),
            1,
            ModelKind::Immersion,
            Disjointness::Arc,
            &Budget::unlimited(),
        )
        .unwrap();
        let cert = r.found().expect("one copy fits");
        assert!(cert.audit(host.as_digraph(), &c3p()).is_empty());

        let r = pack_direct(
            host.as_digraph(),
            &c3p(),
            2,
            ModelKind::Immersion,
            Disjointness::Arc,
            &Budget::unlimited(),
        )
        .unwrap();
        assert_eq!(r, SearchResult::Absent);
    }

    #[test]
    fn pack_direct_two_blocks() {
        let host = two_c3_blocks();
        let cert = pack_direct(
            host.as_digraph(),
            &c3p(),
            2,
            ModelKind::TopMinor,
            Disjointness::Vertex,
            &Budget::unlimited(),
        )
        .unwrap()
        .found()
        .expect("one copy per block");
        assert!(cert.audit(host.as_digraph(), &c3p()).is_empty());
        assert_eq!(cert.models.len(), 2);
    }

    #[test]
    fn pack_direct_matches_oracle_feasibility() {
        let patterns = [
            (p2(), Disjointness::Arc, ModelKind::Immersion),
            (c3p(), Disjointness::Arc, ModelKind::Immersion),
            (c3p(), Disjointness::Vertex, ModelKind::TopMinor),
        ];
        for seed in 0..4u64 {
            let t = seeded_tournament(6, seed);
            for (p, d, kind) in &patterns {
                let max = crate::oracle::brute_max_packing(&t, p, *kind, *d, 10)
                    .unwrap()
                    .value;
                for k in 1..=4usize {
                    let r = pack_direct(t.as_digraph(), p, k, *kind, *d, &Budget::unlimited())
                        .unwrap();
                    assert_eq!(r.is_found(), k <= max, "seed={seed} k={k} max={max}");
                }
            }
        }
    }

    #[test]
    fn pack_arcless_corner() {
        let p = Pattern::new(3, &[]).unwrap();
        let host = Tournament::transitive(4);
        let r = pack_direct(
            host.as_digraph(),
            &p,
            5,
            ModelKind::Immersion,
            Disjointness::Arc,
            &Budget::unlimited(),
        )
        .unwrap()
        .found()
        .unwrap();
        // Copies may share vertices: arc-disjointness is vacuous.
        assert_eq!(r.models.len(), 5);
        assert!(r.audit(host.as_digraph(), &p).is_empty());
    }

    #[test]
    fn acyclic_arc_disjoint_examples() {
        let t = Tournament::transitive(8);
        let cert = pack_acyclic_arc_disjoint(&t, &p2(), 2, 0, &Budget::unlimited())
            .unwrap()
            .found()
            .unwrap();
        assert!(cert.audit(t.as_digraph(), &p2()).is_empty());
        assert_eq!(cert.models.len(), 2);

        let tt3 = Pattern::new(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        let t4 = Tournament::transitive(4);
        let cert = pack_acyclic_arc_disjoint(&t4, &tt3, 1, 0, &Budget::unlimited())
            .unwrap()
            .found()
            .unwrap();
        assert!(cert.audit(t4.as_digraph(), &tt3).is_empty());
    }

    #[test]
    fn acyclic_arc_disjoint_seeded_cross_check() {
        let t = seeded_tournament(16, 31);
        let cert = pack_acyclic_arc_disjoint(&t, &p2(), 4, 7, &Budget::unlimited())
            .unwrap()
            .found()
            .expect("4 arc-disjoint arcs in a 16-vertex tournament");
        assert_eq!(cert.models.len(), 4);
        assert!(cert.audit(t.as_digraph(), &p2()).is_empty());
    }

    #[test]
    fn acyclic_vertex_disjoint_examples() {
        let t = Tournament::transitive(8);
        let cert = pack_acyclic_vertex_disjoint(&t, &p2(), 2).unwrap().unwrap();
        assert_eq!(cert.models.len(), 2);
        assert!(cert.audit(t.as_digraph(), &p2()).is_empty());

        let small = Tournament::transitive(1);
        assert!(pack_acyclic_vertex_disjoint(&small, &p2(), 1)
            .unwrap()
            .is_none());

        let t = seeded_tournament(12, 12);
        let tt3 = Pattern::new(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        let cert = pack_acyclic_vertex_disjoint(&t, &tt3, 1).unwrap().unwrap();
        assert!(cert.audit(t.as_digraph(), &tt3).is_empty());
    }

    #[test]
    fn transversals_without_edges() {
        let g = PartitionedConflictGraph::new(1, 4, Vec::new()).unwrap();
        let sets = transversal_independent_sets(&g, 0).unwrap();
        assert!(sets.len() >= 2);

        let g = PartitionedConflictGraph::new(2, 2, Vec::new()).unwrap();
        let sets = transversal_independent_sets(&g, 0).unwrap();
        assert!(!sets.is_empty());
        check_transversal_properties(&g, &sets);
    }

    #[test]
    fn transversals_on_perfect_matching() {
        // h=2, s=4, a perfect matching between the parts: 4 = s^2/h^2 edges.
        let edges: Vec<_> = (0..4).map(|i| ((0, i), (1, i))).collect();
        let g = PartitionedConflictGraph::new(2, 4, edges).unwrap();
        for seed in 0..10u64 {
            let sets = transversal_independent_sets(&g, seed).unwrap();
            assert!(sets.len() >= 2, "seed {seed}: {} sets", sets.len());
            check_transversal_properties(&g, &sets);
        }
    }

    #[test]
    fn transversal_edge_bound_rejected_up_front() {
        // 5 cross edges exceed s^2/h^2 = 4.
        let mut edges: Vec<_> = (0..4).map(|i| ((0, i), (1, i))).collect();
        edges.push(((0, 0), (1, 1)));
        let g = PartitionedConflictGraph::new(2, 4, edges).unwrap();
        assert!(matches!(
            transversal_independent_sets(&g, 0),
            Err(Error::TransversalPrecondition(_))
        ));
    }

    fn check_transversal_properties(g: &PartitionedConflictGraph, sets: &[Vec<(usize, usize)>]) {
        for set in sets {
            // Exactly one vertex per part.
            let parts: Vec<usize> = set.iter().map(|&(i, _)| i).collect();
            let expect: Vec<usize> = (0..g.h).collect();
            assert_eq!(parts, expect);
            // Independent.
            for a in 0..set.len() {
                for b in (a + 1)..set.len() {
                    assert!(!g.has_edge(set[a], set[b]));
                }
            }
        }
        // Pairwise disjoint.
        for x in 0..sets.len() {
            for y in (x + 1)..sets.len() {
                assert!(sets[x].iter().all(|v| !sets[y].contains(v)));
            }
        }
    }

    #[test]
    fn matching_monte_carlo_success_rate() {
        // Per-shift success probability for the matching instance is 3/4;
        // the estimate over seeded trials must stay well above 0.45.
        use rand::{Rng, SeedableRng};
        let edges: Vec<_> = (0..4).map(|i| ((0, i), (1, i))).collect();
        let g = PartitionedConflictGraph::new(2, 4, edges).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let trials = 10_000;
        let mut ok = 0usize;
        for _ in 0..trials {
            let t = rng.gen_range(0..4usize);
            let a: Vec<usize> = (0..2).map(|_| rng.gen_range(0..4usize)).collect();
            let slice: Vec<(usize, usize)> = (0..2).map(|i| (i, (t + a[i]) % 4)).collect();
            if g.slice_is_independent(&slice) {
                ok += 1;
            }
        }
        let rate = ok as f64 / trials as f64;
        assert!(rate >= 0.45, "rate {rate}");
    }

    #[test]
    fn transversals_over_seeded_instances() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for trial in 0..200 {
            let h = rng.gen_range(1..=4usize);
            let s = 2 * rng.gen_range(1..=4usize);
            let cap = (s * s) / (h * h);
            let mut edges = Vec::new();
            for i in 0..h {
                for j in (i + 1)..h {
                    let m = rng.gen_range(0..=cap);
                    let mut pairs = BTreeSet::new();
                    while pairs.len() < m {
                        pairs.insert((rng.gen_range(0..s), rng.gen_range(0..s)));
                    }
                    for (a, b) in pairs {
                        edges.push(((i, a), (j, b)));
                    }
                }
            }
            let g = PartitionedConflictGraph::new(h, s, edges).unwrap();
            let sets = transversal_independent_sets(&g, trial as u64).unwrap();
            assert!(sets.len() >= s / 2, "trial {trial}");
            check_transversal_properties(&g, &sets);
        }
    }

    #[test]
    fn assemble_two_windows() {
        // Two C3 blocks forward-joined; pattern is C3 -> C3 with one link.
        let host = two_c3_blocks();
        let pattern = Pattern::new(
            6,
            &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3)],
        )
        .unwrap();
        let dec = strong_components(&pattern);
        assert_eq!(dec.h(), 2);
        let pi = enumerate_component_orderings(&dec).unwrap()[0].clone();
        let window_hosts = [vec![0usize, 1, 2], vec![3usize, 4, 5]];
        let mut families = Vec::new();
        for (slot, &c) in pi.seq.iter().enumerate() {
            let members = &dec.components[c];
            let (comp_pattern, _) = pattern.induced(members).unwrap();
            let (sub, map) = host.restrict(&window_hosts[slot]).unwrap();
            let cert = pack_direct(
                sub.as_digraph(),
                &comp_pattern,
                1,
                ModelKind::Immersion,
                Disjointness::Vertex,
                &Budget::unlimited(),
            )
            .unwrap()
            .found()
            .unwrap();
            families.push(vec![cert.models[0].relabel(&map)]);
        }
        let cert = assemble_interval_packing(
            &host,
            &pattern,
            &dec,
            &pi,
            &families,
            1,
            ModelKind::Immersion,
            0,
        )
        .unwrap();
        assert_eq!(cert.models.len(), 1);
        assert!(cert.audit(host.as_digraph(), &pattern).is_empty());
    }

    #[test]
    fn assemble_single_window_reduces_to_selection() {
        // h = 1: the transversals are just the first k copies.
        let host = seeded_tournament(9, 4);
        let pattern = c3p();
        let dec = strong_components(&pattern);
        let pi = enumerate_component_orderings(&dec).unwrap()[0].clone();
        let cert = pack_direct(
            host.as_digraph(),
            &pattern,
            2,
            ModelKind::Immersion,
            Disjointness::Vertex,
            &Budget::unlimited(),
        )
        .unwrap()
        .found();
        let Some(cert) = cert else {
            return;
        };
        let families = vec![cert.models.clone()];
        let out = assemble_interval_packing(
            &host,
            &pattern,
            &dec,
            &pi,
            &families,
            2,
            ModelKind::Immersion,
            0,
        )
        .unwrap();
        assert_eq!(out.models.len(), 2);
        assert!(out.audit(host.as_digraph(), &pattern).is_empty());
    }
}
