//! Foundational digraph values: tournaments, pattern digraphs, strong
//! components, condensation and its topological orderings.
//!
//! Vertices are dense 0-indexed integers. Induced substructures carry an
//! explicit relabeling map back to the host labels, so certificates can
//! always be expressed in host labels. All values are immutable after
//! construction and all operations here are pure.

use std::collections::BTreeSet;

use crate::error::Error;

/// A directed arc, tail then head.
pub type Arc = (usize, usize);

/// Linear extensions of a condensation with more components than this are
/// refused outright (h! blowup).
pub const COMPONENT_ORDERING_CAP: usize = 8;

/// A simple digraph on vertices `0..n`, stored as a dense adjacency matrix.
///
/// Hosts handed to the embedding search are of this type: a tournament, or a
/// tournament minus deleted arcs or vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    adj: Vec<bool>,
}

impl Digraph {
    pub fn empty(n: usize) -> Self {
        Digraph {
            n,
            adj: vec![false; n * n],
        }
    }

    pub fn from_arcs(n: usize, arcs: &[Arc]) -> Result<Self, Error> {
        let mut d = Digraph::empty(n);
        for &(u, v) in arcs {
            if u >= n {
                return Err(Error::UnknownVertex(u));
            }
            if v >= n {
                return Err(Error::UnknownVertex(v));
            }
            if u == v {
                return Err(Error::Invalid(format!("self-loop at {u}")));
            }
            if d.adj[u * n + v] {
                return Err(Error::Invalid(format!("duplicate arc ({u},{v})")));
            }
            d.adj[u * n + v] = true;
        }
        Ok(d)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.adj[u * self.n + v]
    }

    pub fn arc_count(&self) -> usize {
        self.adj.iter().filter(|&&b| b).count()
    }

    pub fn arcs(&self) -> Vec<Arc> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in 0..self.n {
                if self.has_arc(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn out_degree(&self, u: usize) -> usize {
        (0..self.n).filter(|&v| self.has_arc(u, v)).count()
    }

    pub fn in_degree(&self, u: usize) -> usize {
        (0..self.n).filter(|&v| self.has_arc(v, u)).count()
    }

    /// Same digraph with the listed arcs removed. Unknown arcs are an error.
    pub fn minus_arcs(&self, arcs: &[Arc]) -> Result<Digraph, Error> {
        let mut d = self.clone();
        for &(u, v) in arcs {
            if u >= self.n {
                return Err(Error::UnknownVertex(u));
            }
            if v >= self.n {
                return Err(Error::UnknownVertex(v));
            }
            if !d.adj[u * self.n + v] {
                return Err(Error::UnknownArc(u, v));
            }
            d.adj[u * self.n + v] = false;
        }
        Ok(d)
    }

    /// Induced subgraph on `keep`, relabeled to `0..keep.len()` in the given
    /// order. Returns the subgraph and the map from new labels to old.
    pub fn induced(&self, keep: &[usize]) -> Result<(Digraph, Vec<usize>), Error> {
        for &v in keep {
            if v >= self.n {
                return Err(Error::UnknownVertex(v));
            }
        }
        let m = keep.len();
        let mut d = Digraph::empty(m);
        for (i, &u) in keep.iter().enumerate() {
            for (j, &v) in keep.iter().enumerate() {
                if i != j && self.has_arc(u, v) {
                    d.adj[i * m + j] = true;
                }
            }
        }
        Ok((d, keep.to_vec()))
    }

    pub fn is_acyclic(&self) -> bool {
        strong_components_of(self)
            .components
            .iter()
            .all(|c| c.len() == 1)
    }
}

/// A tournament: a complete orientation on `n` labeled vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tournament {
    d: Digraph,
}

impl Tournament {
    /// Builds from the row-major matrix answer to "is there an arc u -> v".
    pub fn from_matrix(n: usize, m: &[bool]) -> Result<Self, Error> {
        if m.len() != n * n {
            return Err(Error::Invalid(format!(
                "matrix length {} for n = {n}",
                m.len()
            )));
        }
        for u in 0..n {
            if m[u * n + u] {
                return Err(Error::Invalid(format!("self-loop at {u}")));
            }
            for v in (u + 1)..n {
                let fwd = m[u * n + v];
                let bwd = m[v * n + u];
                if fwd == bwd {
                    return Err(Error::Invalid(format!(
                        "pair {{{u},{v}}} must have exactly one arc"
                    )));
                }
            }
        }
        Ok(Tournament {
            d: Digraph {
                n,
                adj: m.to_vec(),
            },
        })
    }

    pub fn from_arcs(n: usize, arcs: &[Arc]) -> Result<Self, Error> {
        let d = Digraph::from_arcs(n, arcs)?;
        Tournament::from_matrix(n, &d.adj)
    }

    /// Transitive tournament in dominance order: arc (u,v) for every u < v.
    pub fn transitive(n: usize) -> Self {
        let mut adj = vec![false; n * n];
        for u in 0..n {
            for v in (u + 1)..n {
                adj[u * n + v] = true;
            }
        }
        Tournament {
            d: Digraph { n, adj },
        }
    }

    /// The directed triangle 0 -> 1 -> 2 -> 0.
    pub fn c3() -> Self {
        Tournament::from_arcs(3, &[(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    pub fn n(&self) -> usize {
        self.d.n
    }

    #[inline]
    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.d.has_arc(u, v)
    }

    pub fn arcs(&self) -> Vec<Arc> {
        self.d.arcs()
    }

    pub fn arc_count(&self) -> usize {
        self.d.n * (self.d.n.saturating_sub(1)) / 2
    }

    pub fn out_degree(&self, u: usize) -> usize {
        self.d.out_degree(u)
    }

    pub fn as_digraph(&self) -> &Digraph {
        &self.d
    }

    /// Host view with the listed arcs removed; no longer a tournament.
    pub fn delete_arcs(&self, arcs: &[Arc]) -> Result<Digraph, Error> {
        self.d.minus_arcs(arcs)
    }

    /// Host view with the listed vertices removed (relabeled).
    pub fn delete_vertices(&self, gone: &BTreeSet<usize>) -> Result<(Digraph, Vec<usize>), Error> {
        let keep: Vec<usize> = (0..self.n()).filter(|v| !gone.contains(v)).collect();
        self.d.induced(&keep)
    }

    /// Induced subtournament on `keep` (in the given order), with the map
    /// from new labels back to host labels.
    pub fn restrict(&self, keep: &[usize]) -> Result<(Tournament, Vec<usize>), Error> {
        let mut seen = BTreeSet::new();
        for &v in keep {
            if !seen.insert(v) {
                return Err(Error::Invalid(format!("duplicate vertex {v} in restriction")));
            }
        }
        let (d, map) = self.d.induced(keep)?;
        Ok((Tournament { d }, map))
    }
}

/// A simple pattern digraph H. Digons (both (u,v) and (v,u)) are allowed;
/// self-loops and repeated arcs are not.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pattern {
    d: Digraph,
    arcs: Vec<Arc>,
}

impl Pattern {
    pub fn new(n: usize, arcs: &[Arc]) -> Result<Self, Error> {
        let d = Digraph::from_arcs(n, arcs)?;
        let mut sorted = arcs.to_vec();
        sorted.sort_unstable();
        Ok(Pattern { d, arcs: sorted })
    }

    pub fn n(&self) -> usize {
        self.d.n
    }

    /// |H|, the number of vertices.
    pub fn order(&self) -> usize {
        self.d.n
    }

    /// The combined size |V(H)| + |A(H)|.
    pub fn size(&self) -> usize {
        self.d.n + self.arcs.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    #[inline]
    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.d.has_arc(u, v)
    }

    pub fn as_digraph(&self) -> &Digraph {
        &self.d
    }

    pub fn out_degree(&self, u: usize) -> usize {
        self.d.out_degree(u)
    }

    pub fn in_degree(&self, u: usize) -> usize {
        self.d.in_degree(u)
    }

    pub fn is_acyclic(&self) -> bool {
        strong_components(self).components.iter().all(|c| c.len() == 1)
    }

    /// Induced sub-pattern on `keep` (sorted ascending), with the map from
    /// new labels back to the pattern's labels.
    pub fn induced(&self, keep: &[usize]) -> Result<(Pattern, Vec<usize>), Error> {
        let (d, map) = self.d.induced(keep)?;
        let arcs = d.arcs();
        Ok((Pattern { d, arcs }, map))
    }
}

/// Strong components of a pattern, its acyclic condensation, and the count.
#[derive(Clone, Debug)]
pub struct StrongDecomposition {
    /// Partition of `0..n` into strongly connected classes, each sorted
    /// ascending. Component order is a topological order of the condensation.
    pub components: Vec<Vec<usize>>,
    /// Component index of each vertex.
    pub comp_of: Vec<usize>,
    /// Condensation arcs between component indices; acyclic.
    pub condensation: Digraph,
}

impl StrongDecomposition {
    pub fn h(&self) -> usize {
        self.components.len()
    }

    /// A component is trivial iff it has exactly one vertex.
    pub fn is_trivial(&self, c: usize) -> bool {
        self.components[c].len() == 1
    }
}

/// One topological ordering of the strong components: `seq[pos]` is the
/// component placed at position `pos + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentOrdering {
    pub seq: Vec<usize>,
}

/// Strong components by Tarjan's algorithm, components emitted in a
/// topological order of the condensation.
pub fn strong_components(p: &Pattern) -> StrongDecomposition {
    strong_components_of(p.as_digraph())
}

pub fn strong_components_of(d: &Digraph) -> StrongDecomposition {
    let n = d.n();
    let mut state = Tarjan {
        d,
        index: 0,
        idx: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        comps: Vec::new(),
    };
    for v in 0..n {
        if state.idx[v].is_none() {
            state.connect(v);
        }
    }
    // Tarjan emits components in reverse topological order.
    state.comps.reverse();
    let mut comp_of = vec![usize::MAX; n];
    for (ci, comp) in state.comps.iter_mut().enumerate() {
        comp.sort_unstable();
        for &v in comp.iter() {
            comp_of[v] = ci;
        }
    }
    let h = state.comps.len();
    let mut cond = Digraph::empty(h);
    for (u, v) in d.arcs() {
        let (cu, cv) = (comp_of[u], comp_of[v]);
        if cu != cv {
            cond.adj[cu * h + cv] = true;
        }
    }
    StrongDecomposition {
        components: state.comps,
        comp_of,
        condensation: cond,
    }
}

struct Tarjan<'a> {
    d: &'a Digraph,
    index: usize,
    idx: Vec<Option<usize>>,
    low: Vec<usize>,
    on_stack: Vec<bool>,
    stack: Vec<usize>,
    comps: Vec<Vec<usize>>,
}

impl Tarjan<'_> {
    fn connect(&mut self, v: usize) {
        self.idx[v] = Some(self.index);
        self.low[v] = self.index;
        self.index += 1;
        self.stack.push(v);
        self.on_stack[v] = true;
        for w in 0..self.d.n() {
            if !self.d.has_arc(v, w) {
                continue;
            }
            if self.idx[w].is_none() {
                self.connect(w);
                self.low[v] = self.low[v].min(self.low[w]);
            } else if self.on_stack[w] {
                self.low[v] = self.low[v].min(self.idx[w].unwrap());
            }
        }
        if self.low[v] == self.idx[v].unwrap() {
            let mut comp = Vec::new();
            loop {
                let w = self.stack.pop().expect("tarjan stack underflow");
                self.on_stack[w] = false;
                comp.push(w);
                if w == v {
                    break;
                }
            }
            self.comps.push(comp);
        }
    }
}

/// All linear extensions of the condensation, in lexicographic order of
/// component-index sequences. Hard error above [`COMPONENT_ORDERING_CAP`]
/// components.
pub fn enumerate_component_orderings(
    dec: &StrongDecomposition,
) -> Result<Vec<ComponentOrdering>, Error> {
    let h = dec.h();
    if h > COMPONENT_ORDERING_CAP {
        return Err(Error::CapExceeded {
            what: "strong components for ordering enumeration",
            got: h,
            cap: COMPONENT_ORDERING_CAP,
        });
    }
    let mut indeg = vec![0usize; h];
    for (u, v) in dec.condensation.arcs() {
        let _ = u;
        indeg[v] += 1;
    }
    let mut out = Vec::new();
    let mut seq = Vec::with_capacity(h);
    let mut placed = vec![false; h];
    extend(dec, &mut indeg, &mut placed, &mut seq, &mut out);
    Ok(out)
}

fn extend(
    dec: &StrongDecomposition,
    indeg: &mut [usize],
    placed: &mut [bool],
    seq: &mut Vec<usize>,
    out: &mut Vec<ComponentOrdering>,
) {
    let h = dec.h();
    if seq.len() == h {
        out.push(ComponentOrdering { seq: seq.clone() });
        return;
    }
    // Sources are tried in increasing index order, so the output is
    // lexicographic by construction.
    for c in 0..h {
        if placed[c] || indeg[c] != 0 {
            continue;
        }
        placed[c] = true;
        seq.push(c);
        for w in 0..h {
            if dec.condensation.has_arc(c, w) {
                indeg[w] -= 1;
            }
        }
        extend(dec, indeg, placed, seq, out);
        for w in 0..h {
            if dec.condensation.has_arc(c, w) {
                indeg[w] += 1;
            }
        }
        seq.pop();
        placed[c] = false;
    }
}

/// A transitive subtournament on `m` vertices, as a sequence in dominance
/// order (each listed vertex beats all later ones), or `None` if the
/// tournament has no acyclic subtournament of that size.
///
/// The max-out-degree recursion is tried first; it cannot fail when
/// n >= 2^m. A full search over m-subsets keeps the operation total below
/// that threshold.
pub fn transitive_subtournament(t: &Tournament, m: usize) -> Option<Vec<usize>> {
    if m == 0 {
        return Some(Vec::new());
    }
    if m > t.n() {
        return None;
    }
    let all: Vec<usize> = (0..t.n()).collect();
    if let Some(seq) = greedy_transitive(t, &all, m) {
        return Some(seq);
    }
    exhaustive_transitive(t, m)
}

fn greedy_transitive(t: &Tournament, pool: &[usize], m: usize) -> Option<Vec<usize>> {
    let mut pool = pool.to_vec();
    let mut seq = Vec::with_capacity(m);
    while seq.len() < m {
        if pool.is_empty() {
            return None;
        }
        // Max out-degree within the pool; ties go to the smallest label.
        let best = *pool
            .iter()
            .max_by_key(|&&v| {
                let deg = pool.iter().filter(|&&w| w != v && t.has_arc(v, w)).count();
                (deg, std::cmp::Reverse(v))
            })
            .unwrap();
        seq.push(best);
        pool.retain(|&w| w != best && t.has_arc(best, w));
    }
    Some(seq)
}

fn exhaustive_transitive(t: &Tournament, m: usize) -> Option<Vec<usize>> {
    let n = t.n();
    let mut subset: Vec<usize> = Vec::with_capacity(m);
    fn rec(t: &Tournament, n: usize, m: usize, start: usize, subset: &mut Vec<usize>) -> Option<Vec<usize>> {
        if subset.len() == m {
            return order_if_transitive(t, subset);
        }
        for v in start..n {
            subset.push(v);
            if let Some(seq) = rec(t, n, m, v + 1, subset) {
                return Some(seq);
            }
            subset.pop();
        }
        None
    }
    rec(t, n, m, 0, &mut subset)
}

/// Sorts the subset into dominance order if its induced subtournament is
/// acyclic, i.e. out-degrees within the subset are all distinct.
fn order_if_transitive(t: &Tournament, subset: &[usize]) -> Option<Vec<usize>> {
    let mut scored: Vec<(usize, usize)> = subset
        .iter()
        .map(|&v| {
            let deg = subset.iter().filter(|&&w| w != v && t.has_arc(v, w)).count();
            (deg, v)
        })
        .collect();
    scored.sort_unstable_by(|a, b| b.cmp(a));
    for (i, &(deg, _)) in scored.iter().enumerate() {
        if deg != subset.len() - 1 - i {
            return None;
        }
    }
    Some(scored.into_iter().map(|(_, v)| v).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c3_pattern() -> Pattern {
        Pattern::new(3, &[(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    fn tt3_pattern() -> Pattern {
        Pattern::new(3, &[(0, 1), (0, 2), (1, 2)]).unwrap()
    }

    #[test]
    fn tournament_invariants() {
        let t = Tournament::transitive(5);
        assert_eq!(t.arc_count(), 10);
        assert!(Tournament::from_arcs(2, &[(0, 1), (1, 0)]).is_err());
        assert!(Tournament::from_arcs(2, &[]).is_err());
        assert!(Tournament::from_arcs(1, &[]).is_ok());
    }

    #[test]
    fn pattern_allows_digons_rejects_junk() {
        let digon = Pattern::new(2, &[(0, 1), (1, 0)]).unwrap();
        assert_eq!(digon.size(), 4);
        assert!(Pattern::new(2, &[(0, 0)]).is_err());
        assert!(Pattern::new(2, &[(0, 1), (0, 1)]).is_err());
    }

    #[test]
    fn pattern_metrics() {
        let p = c3_pattern();
        assert_eq!(p.order(), 3);
        assert_eq!(p.size(), 6);
    }

    #[test]
    fn scc_of_cycle_is_one_component() {
        let dec = strong_components(&c3_pattern());
        assert_eq!(dec.h(), 1);
        assert_eq!(dec.components[0], vec![0, 1, 2]);
        assert!(!dec.is_trivial(0));
    }

    #[test]
    fn scc_of_transitive_triangle_is_a_chain() {
        let dec = strong_components(&tt3_pattern());
        assert_eq!(dec.h(), 3);
        assert!((0..3).all(|c| dec.is_trivial(c)));
        // Condensation is a topologically ordered chain plus the shortcut arc.
        assert!(dec.condensation.has_arc(dec.comp_of[0], dec.comp_of[1]));
        assert!(dec.condensation.has_arc(dec.comp_of[1], dec.comp_of[2]));
        assert!(dec.condensation.has_arc(dec.comp_of[0], dec.comp_of[2]));
    }

    #[test]
    fn scc_mixed_example() {
        // a -> b, b <-> c: components {a}, {b,c} with one condensation arc.
        let p = Pattern::new(3, &[(0, 1), (1, 2), (2, 1)]).unwrap();
        let dec = strong_components(&p);
        assert_eq!(dec.h(), 2);
        assert_eq!(dec.components[dec.comp_of[0]], vec![0]);
        assert_eq!(dec.components[dec.comp_of[1]], vec![1, 2]);
        assert!(dec
            .condensation
            .has_arc(dec.comp_of[0], dec.comp_of[1]));
        assert!(!dec
            .condensation
            .has_arc(dec.comp_of[1], dec.comp_of[0]));
    }

    /// Mutual-reachability classes by transitive closure; the independent
    /// check for the strong-component partition.
    fn reachability_components(d: &Digraph) -> Vec<BTreeSet<usize>> {
        let n = d.n();
        let mut reach = vec![vec![false; n]; n];
        for v in 0..n {
            reach[v][v] = true;
        }
        for (u, v) in d.arcs() {
            reach[u][v] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if reach[i][k] && reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
        let mut seen = vec![false; n];
        let mut comps = Vec::new();
        for v in 0..n {
            if seen[v] {
                continue;
            }
            let mut comp = BTreeSet::new();
            for w in 0..n {
                if reach[v][w] && reach[w][v] {
                    comp.insert(w);
                    seen[w] = true;
                }
            }
            comps.push(comp);
        }
        comps
    }

    #[test]
    fn scc_matches_reachability_oracle_on_all_small_patterns() {
        // All simple digraphs on 3 vertices, plus seeded samples on 4..=6.
        let pairs3: Vec<Arc> = vec![(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)];
        for mask in 0u32..(1 << 6) {
            let arcs: Vec<Arc> = pairs3
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &a)| a)
                .collect();
            let p = Pattern::new(3, &arcs).unwrap();
            check_against_oracle(&p);
        }
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in 4..=6 {
            for _ in 0..40 {
                let mut arcs = Vec::new();
                for u in 0..n {
                    for v in 0..n {
                        if u != v && rng.gen_bool(0.4) {
                            arcs.push((u, v));
                        }
                    }
                }
                let p = Pattern::new(n, &arcs).unwrap();
                check_against_oracle(&p);
            }
        }
    }

    fn check_against_oracle(p: &Pattern) {
        let dec = strong_components(p);
        let got: BTreeSet<BTreeSet<usize>> = dec
            .components
            .iter()
            .map(|c| c.iter().copied().collect())
            .collect();
        let want: BTreeSet<BTreeSet<usize>> =
            reachability_components(p.as_digraph()).into_iter().collect();
        assert_eq!(got, want, "partition mismatch on {:?}", p.arcs());
        // Condensation acyclic: every strong component of it is trivial.
        let cdec = strong_components_of(&dec.condensation);
        assert!(cdec.components.iter().all(|c| c.len() == 1));
        // Every pattern arc is inside a component or respects a condensation arc.
        for (u, v) in p.as_digraph().arcs() {
            let (cu, cv) = (dec.comp_of[u], dec.comp_of[v]);
            assert!(cu == cv || dec.condensation.has_arc(cu, cv));
        }
    }

    #[test]
    fn orderings_of_chain_antichain_diamond() {
        let chain = strong_components(&tt3_pattern());
        assert_eq!(enumerate_component_orderings(&chain).unwrap().len(), 1);

        let antichain = strong_components(&Pattern::new(3, &[]).unwrap());
        assert_eq!(enumerate_component_orderings(&antichain).unwrap().len(), 6);

        // Diamond: s -> a, s -> b, a -> t, b -> t.
        let p = Pattern::new(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        let dec = strong_components(&p);
        let pis = enumerate_component_orderings(&dec).unwrap();
        assert_eq!(pis.len(), 2);
    }

    #[test]
    fn orderings_are_linear_extensions_and_match_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for n in 2..=6 {
            for _ in 0..25 {
                let mut arcs = Vec::new();
                for u in 0..n {
                    for v in 0..n {
                        if u != v && rng.gen_bool(0.3) {
                            arcs.push((u, v));
                        }
                    }
                }
                let p = Pattern::new(n, &arcs).unwrap();
                let dec = strong_components(&p);
                if dec.h() > 6 {
                    continue;
                }
                let pis = enumerate_component_orderings(&dec).unwrap();
                for pi in &pis {
                    assert!(is_linear_extension(&dec, &pi.seq));
                }
                // Brute force: filter all permutations of component indices.
                let brute = permutations(dec.h())
                    .into_iter()
                    .filter(|perm| is_linear_extension(&dec, perm))
                    .count();
                assert_eq!(pis.len(), brute);
                // Lexicographic and duplicate-free.
                for w in pis.windows(2) {
                    assert!(w[0].seq < w[1].seq);
                }
            }
        }
    }

    fn is_linear_extension(dec: &StrongDecomposition, seq: &[usize]) -> bool {
        let mut pos = vec![0usize; dec.h()];
        for (i, &c) in seq.iter().enumerate() {
            pos[c] = i;
        }
        dec.condensation
            .arcs()
            .iter()
            .all(|&(c, d)| pos[c] < pos[d])
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = Vec::new();
        let mut used = vec![false; n];
        fn rec(n: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
            if cur.len() == n {
                out.push(cur.clone());
                return;
            }
            for v in 0..n {
                if !used[v] {
                    used[v] = true;
                    cur.push(v);
                    rec(n, cur, used, out);
                    cur.pop();
                    used[v] = false;
                }
            }
        }
        rec(n, &mut cur, &mut used, &mut out);
        out
    }

    #[test]
    fn ordering_cap_is_enforced() {
        let p = Pattern::new(9, &[]).unwrap();
        let dec = strong_components(&p);
        assert!(matches!(
            enumerate_component_orderings(&dec),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn transitive_subtournament_on_transitive_host() {
        let t = Tournament::transitive(4);
        assert_eq!(transitive_subtournament(&t, 3), Some(vec![0, 1, 2]));
    }

    #[test]
    fn transitive_subtournament_on_c3() {
        let t = Tournament::c3();
        let seq = transitive_subtournament(&t, 2).unwrap();
        assert_eq!(seq.len(), 2);
        assert!(t.has_arc(seq[0], seq[1]));
        assert_eq!(transitive_subtournament(&t, 3), None);
    }

    #[test]
    fn transitive_subtournament_guarantee_at_power_of_two() {
        use rand::{Rng, SeedableRng};
        for seed in 0..30u64 {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = 8;
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
            let t = Tournament::from_matrix(n, &adj).unwrap();
            // n = 2^3 guarantees a transitive subtournament of size 3.
            let seq = transitive_subtournament(&t, 3).expect("guaranteed at n >= 2^m");
            for i in 0..seq.len() {
                for j in (i + 1)..seq.len() {
                    assert!(t.has_arc(seq[i], seq[j]));
                }
            }
        }
    }

    #[test]
    fn restrict_and_delete() {
        let t = Tournament::transitive(4);
        let (sub, map) = t.restrict(&[1, 2, 3]).unwrap();
        assert_eq!(sub.n(), 3);
        assert_eq!(map, vec![1, 2, 3]);
        assert!(sub.has_arc(0, 1) && sub.has_arc(1, 2) && sub.has_arc(0, 2));

        let c3 = Tournament::c3();
        let d = c3.delete_arcs(&[(2, 0)]).unwrap();
        assert_eq!(d.arc_count(), 2);
        assert!(strong_components_of(&d).components.iter().all(|c| c.len() == 1));
        assert!(c3.delete_arcs(&[(0, 2)]).is_err());

        let (empty, map) = t.restrict(&[]).unwrap();
        assert_eq!(empty.n(), 0);
        assert!(map.is_empty());
    }
}
