//! Independent brute-force ground truth for tests and `verify --deep`:
//! exact packing numbers, exact minimum hitting sets, factorial cutwidth,
//! exhaustive pathwidth.
//!
//! Everything here is intentionally naive (subset and permutation
//! enumeration, plain recursive path listing) so a bug in the clever code
//! cannot hide in the oracle. Hard caps raise errors instead of silently
//! sampling.

use std::collections::BTreeSet;

use crate::digraph::{Arc, Digraph, Pattern, Tournament};
use crate::embed::{self, Budget, Model, ModelKind};
use crate::error::Error;
use crate::layouts::{cut_profile, VertexOrdering};
use crate::pack::Disjointness;

pub const ORACLE_HOST_CAP: usize = 7;
pub const ORACLE_PATTERN_CAP: usize = 4;
pub const ORACLE_CUTWIDTH_CAP: usize = 8;
pub const ORACLE_PATHWIDTH_CAP: usize = 6;

/// A brute-force answer together with its witness.
#[derive(Clone, Debug)]
pub struct OracleReport<W> {
    pub quantity: &'static str,
    pub value: usize,
    pub witness: W,
}

fn check_caps(host_n: usize, pattern_n: usize) -> Result<(), Error> {
    if host_n > ORACLE_HOST_CAP {
        return Err(Error::CapExceeded {
            what: "oracle host size",
            got: host_n,
            cap: ORACLE_HOST_CAP,
        });
    }
    if pattern_n > ORACLE_PATTERN_CAP {
        return Err(Error::CapExceeded {
            what: "oracle pattern size",
            got: pattern_n,
            cap: ORACLE_PATTERN_CAP,
        });
    }
    Ok(())
}

/// Every model of the pattern in the host, by plain recursion: all injective
/// vertex maps in lexicographic order, then all simple path combinations.
/// A path combination is dropped as soon as it conflicts with the model
/// definition (shared arc, shared internal vertex); that is a filter over
/// the definitions, not a search heuristic. The embed verifier has the last
/// word on every emitted model.
pub fn naive_models(host: &Digraph, pattern: &Pattern, kind: ModelKind) -> Vec<Model> {
    let mut out = Vec::new();
    for_each_naive_model(host, pattern, kind, &mut |m| {
        out.push(m.clone());
        true
    });
    out
}

/// True iff the host contains at least one model, by the naive enumeration.
pub fn naive_contains(host: &Digraph, pattern: &Pattern, kind: ModelKind) -> bool {
    let mut found = false;
    for_each_naive_model(host, pattern, kind, &mut |_| {
        found = true;
        false
    });
    found
}

/// Calls `keep_going` on each model; stops when it returns false.
pub fn for_each_naive_model(
    host: &Digraph,
    pattern: &Pattern,
    kind: ModelKind,
    keep_going: &mut dyn FnMut(&Model) -> bool,
) {
    let mut phi = vec![usize::MAX; pattern.n()];
    let mut used = vec![false; host.n()];
    assign_naive(host, pattern, kind, 0, &mut phi, &mut used, keep_going);
}

fn assign_naive(
    host: &Digraph,
    pattern: &Pattern,
    kind: ModelKind,
    u: usize,
    phi: &mut Vec<usize>,
    used: &mut Vec<bool>,
    keep_going: &mut dyn FnMut(&Model) -> bool,
) -> bool {
    if u == pattern.n() {
        let arcs: Vec<Arc> = pattern.arcs().to_vec();
        let mut paths: Vec<Vec<usize>> = Vec::new();
        return route_naive(host, pattern, kind, phi, &arcs, 0, &mut paths, keep_going);
    }
    for hv in 0..host.n() {
        if used[hv] {
            continue;
        }
        phi[u] = hv;
        used[hv] = true;
        let go_on = assign_naive(host, pattern, kind, u + 1, phi, used, keep_going);
        used[hv] = false;
        phi[u] = usize::MAX;
        if !go_on {
            return false;
        }
    }
    true
}

/// Does the candidate path conflict with already chosen paths, per the
/// model definitions? Recomputed from raw lists on every call.
fn path_conflicts(kind: ModelKind, phi: &[usize], paths: &[Vec<usize>], cand: &[usize]) -> bool {
    let arcs_of = |p: &[usize]| -> Vec<Arc> { p.windows(2).map(|w| (w[0], w[1])).collect() };
    let cand_arcs = arcs_of(cand);
    for prev in paths {
        let prev_arcs = arcs_of(prev);
        if cand_arcs.iter().any(|a| prev_arcs.contains(a)) {
            return true;
        }
        if kind == ModelKind::TopMinor
            && cand[1..cand.len() - 1]
                .iter()
                .any(|x| prev[1..prev.len() - 1].contains(x))
        {
            return true;
        }
    }
    if kind == ModelKind::TopMinor
        && cand[1..cand.len() - 1].iter().any(|x| phi.contains(x))
    {
        return true;
    }
    false
}

#[allow(clippy::too_many_arguments)]
fn route_naive(
    host: &Digraph,
    pattern: &Pattern,
    kind: ModelKind,
    phi: &[usize],
    arcs: &[Arc],
    ai: usize,
    paths: &mut Vec<Vec<usize>>,
    keep_going: &mut dyn FnMut(&Model) -> bool,
) -> bool {
    if ai == arcs.len() {
        let model = Model {
            kind,
            vertex_map: phi.to_vec(),
            paths: arcs.iter().cloned().zip(paths.iter().cloned()).collect(),
        };
        debug_assert!(embed::verify_model(host, pattern, &model).is_empty());
        return keep_going(&model);
    }
    let (pu, pv) = arcs[ai];
    let mut all_paths = Vec::new();
    let mut cur = vec![phi[pu]];
    list_simple_paths(host, phi[pv], &mut cur, &mut all_paths);
    for p in all_paths {
        if path_conflicts(kind, phi, paths, &p) {
            continue;
        }
        paths.push(p);
        let go_on = route_naive(host, pattern, kind, phi, arcs, ai + 1, paths, keep_going);
        paths.pop();
        if !go_on {
            return false;
        }
    }
    true
}

fn list_simple_paths(
    host: &Digraph,
    target: usize,
    cur: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    let last = *cur.last().unwrap();
    for nxt in 0..host.n() {
        if !host.has_arc(last, nxt) || cur.contains(&nxt) {
            continue;
        }
        cur.push(nxt);
        if nxt == target {
            out.push(cur.clone());
        } else {
            list_simple_paths(host, target, cur, out);
        }
        cur.pop();
    }
}

fn footprint(model: &Model, disjointness: Disjointness) -> BTreeSet<usize> {
    match disjointness {
        Disjointness::Vertex => model.vertices(),
        Disjointness::Arc => {
            // Arcs flattened to single indices so both cases share a shape.
            let mut s = BTreeSet::new();
            for (u, v) in model.arcs() {
                s.insert(u * embed::EMBED_VERTEX_CAP + v);
            }
            s
        }
    }
}

/// Exact maximum number of pairwise disjoint copies, by exhaustive search
/// over distinct model footprints. `cap` clips the reported value so the
/// recursion terminates quickly on trivially packable patterns; answers
/// below the cap are exact.
pub fn brute_max_packing(
    t: &Tournament,
    pattern: &Pattern,
    kind: ModelKind,
    disjointness: Disjointness,
    cap: usize,
) -> Result<OracleReport<Vec<Model>>, Error> {
    check_caps(t.n(), pattern.n())?;
    let host = t.as_digraph();
    if pattern.arc_count() == 0 {
        // Copies are bare vertex sets.
        let value = match disjointness {
            Disjointness::Arc => {
                if t.n() >= pattern.n() {
                    cap
                } else {
                    0
                }
            }
            Disjointness::Vertex => (t.n() / pattern.n().max(1)).min(cap),
        };
        let mut witness = Vec::new();
        for i in 0..value {
            let base = match disjointness {
                Disjointness::Arc => 0,
                Disjointness::Vertex => i * pattern.n(),
            };
            witness.push(Model {
                kind,
                vertex_map: (base..base + pattern.n()).collect(),
                paths: Vec::new(),
            });
        }
        return Ok(OracleReport {
            quantity: "max-packing",
            value,
            witness,
        });
    }
    // Distinct footprints only, one representative model per footprint:
    // models with equal footprints are interchangeable in any packing.
    let mut reps: std::collections::BTreeMap<BTreeSet<usize>, Model> = Default::default();
    for_each_naive_model(host, pattern, kind, &mut |m| {
        reps.entry(footprint(m, disjointness)).or_insert_with(|| m.clone());
        true
    });
    let mut prints: Vec<(BTreeSet<usize>, Model)> = reps.into_iter().collect();
    prints.sort_by(|a, b| (a.0.len(), &a.0).cmp(&(b.0.len(), &b.0)));
    let mut best: Vec<usize> = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    fn grow(
        prints: &[(BTreeSet<usize>, Model)],
        start: usize,
        used: &BTreeSet<usize>,
        chosen: &mut Vec<usize>,
        best: &mut Vec<usize>,
        cap: usize,
    ) {
        if chosen.len() > best.len() {
            *best = chosen.clone();
        }
        if best.len() >= cap {
            return;
        }
        for i in start..prints.len() {
            if prints[i].0.iter().any(|x| used.contains(x)) {
                continue;
            }
            let mut u2 = used.clone();
            u2.extend(prints[i].0.iter().copied());
            chosen.push(i);
            grow(prints, i + 1, &u2, chosen, best, cap);
            chosen.pop();
            if best.len() >= cap {
                return;
            }
        }
    }
    grow(&prints, 0, &BTreeSet::new(), &mut chosen, &mut best, cap);
    let witness: Vec<Model> = best.iter().map(|&i| prints[i].1.clone()).collect();
    for m in &witness {
        debug_assert!(embed::verify_model(host, pattern, m).is_empty());
    }
    Ok(OracleReport {
        quantity: "max-packing",
        value: witness.len(),
        witness,
    })
}

/// Smallest arc set (immersion mode) or vertex set (topminor mode) whose
/// removal makes the host pattern-free, by increasing-size subset
/// enumeration with freeness checks. Arc witnesses are flattened indices
/// `u * EMBED_VERTEX_CAP + v`.
pub fn brute_min_hitting(
    t: &Tournament,
    pattern: &Pattern,
    kind: ModelKind,
) -> Result<OracleReport<Vec<usize>>, Error> {
    check_caps(t.n(), pattern.n())?;
    match kind {
        ModelKind::Immersion => {
            let arcs = t.arcs();
            for size in 0..=arcs.len() {
                if let Some(subset) = first_good_subset(&arcs, size, &mut |chosen| {
                    let host = t.delete_arcs(chosen).unwrap();
                    embed::is_free(&host, pattern, kind, &Budget::unlimited()).unwrap()
                }) {
                    let witness: Vec<usize> = subset
                        .iter()
                        .map(|&(u, v)| u * embed::EMBED_VERTEX_CAP + v)
                        .collect();
                    return Ok(OracleReport {
                        quantity: "min-hitting-arcs",
                        value: subset.len(),
                        witness,
                    });
                }
            }
            unreachable!("removing all arcs kills every copy of a pattern with arcs")
        }
        ModelKind::TopMinor => {
            let verts: Vec<usize> = (0..t.n()).collect();
            for size in 0..=verts.len() {
                if let Some(subset) = first_good_subset(&verts, size, &mut |chosen| {
                    let gone: BTreeSet<usize> = chosen.iter().copied().collect();
                    let (host, _) = t.delete_vertices(&gone).unwrap();
                    embed::is_free(&host, pattern, kind, &Budget::unlimited()).unwrap()
                }) {
                    return Ok(OracleReport {
                        quantity: "min-hitting-vertices",
                        value: subset.len(),
                        witness: subset,
                    });
                }
            }
            unreachable!("removing all vertices kills every copy")
        }
    }
}

fn first_good_subset<T: Clone>(
    items: &[T],
    size: usize,
    is_good: &mut dyn FnMut(&[T]) -> bool,
) -> Option<Vec<T>> {
    fn rec<T: Clone>(
        items: &[T],
        size: usize,
        start: usize,
        cur: &mut Vec<T>,
        is_good: &mut dyn FnMut(&[T]) -> bool,
    ) -> Option<Vec<T>> {
        if cur.len() == size {
            if is_good(cur) {
                return Some(cur.clone());
            }
            return None;
        }
        for i in start..items.len() {
            cur.push(items[i].clone());
            if let Some(found) = rec(items, size, i + 1, cur, is_good) {
                return Some(found);
            }
            cur.pop();
        }
        None
    }
    rec(items, size, 0, &mut Vec::new(), is_good)
}

/// Exact cutwidth by enumerating all n! orderings.
pub fn brute_cutwidth(t: &Tournament) -> Result<usize, Error> {
    if t.n() > ORACLE_CUTWIDTH_CAP {
        return Err(Error::CapExceeded {
            what: "brute cutwidth host size",
            got: t.n(),
            cap: ORACLE_CUTWIDTH_CAP,
        });
    }
    let n = t.n();
    let mut best = usize::MAX;
    let mut order: Vec<usize> = Vec::new();
    let mut used = vec![false; n];
    fn rec(t: &Tournament, order: &mut Vec<usize>, used: &mut [bool], best: &mut usize) {
        let n = t.n();
        if order.len() == n {
            let sigma = VertexOrdering::new(order.clone()).unwrap();
            *best = (*best).min(cut_profile(t, &sigma).width);
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                order.push(v);
                rec(t, order, used, best);
                order.pop();
                used[v] = false;
            }
        }
    }
    rec(t, &mut order, &mut used, &mut best);
    Ok(if best == usize::MAX { 0 } else { best })
}

/// Exact pathwidth by enumerating endpoint interleavings: sequences over the
/// 2n endpoint symbols with each left endpoint placed before its right.
/// Prefixes that already violate "arc joining disjoint intervals is forward"
/// are dropped; everything else is a plain filter over the definitions.
pub fn brute_pathwidth(t: &Tournament) -> Result<usize, Error> {
    if t.n() > ORACLE_PATHWIDTH_CAP {
        return Err(Error::CapExceeded {
            what: "brute pathwidth host size",
            got: t.n(),
            cap: ORACLE_PATHWIDTH_CAP,
        });
    }
    let n = t.n();
    if n == 0 {
        return Ok(0);
    }
    struct S<'a> {
        t: &'a Tournament,
        opened: Vec<bool>,
        closed: Vec<bool>,
        open_count: usize,
        width: usize,
        placed: usize,
        best: usize,
    }
    fn rec(s: &mut S<'_>) {
        let n = s.t.n();
        if s.placed == 2 * n {
            s.best = s.best.min(s.width);
            return;
        }
        for v in 0..n {
            if s.opened[v] && !s.closed[v] {
                s.closed[v] = true;
                s.open_count -= 1;
                s.placed += 1;
                rec(s);
                s.placed -= 1;
                s.open_count += 1;
                s.closed[v] = false;
            } else if !s.opened[v] {
                // Opening v after u closed makes their intervals disjoint,
                // which requires the arc (u, v).
                if (0..n).any(|u| s.closed[u] && !s.t.has_arc(u, v)) {
                    continue;
                }
                s.opened[v] = true;
                s.open_count += 1;
                s.placed += 1;
                let saved = s.width;
                s.width = s.width.max(s.open_count);
                rec(s);
                s.width = saved;
                s.placed -= 1;
                s.open_count -= 1;
                s.opened[v] = false;
            }
        }
    }
    let mut s = S {
        t,
        opened: vec![false; n],
        closed: vec![false; n],
        open_count: 0,
        width: 0,
        placed: 0,
        best: usize::MAX,
    };
    rec(&mut s);
    Ok(s.best)
}

/// Two C3 blocks with every cross arc pointing forward; a recurring desk
/// instance in tests.
pub fn two_c3_blocks() -> Tournament {
    let mut arcs = vec![(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)];
    for u in 0..3 {
        for v in 3..6 {
            arcs.push((u, v));
        }
    }
    Tournament::from_arcs(6, &arcs).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c3p() -> Pattern {
        Pattern::new(3, &[(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    #[test]
    fn packing_counts() {
        let r = brute_max_packing(
            &Tournament::c3(),
            &c3p(),
            ModelKind::Immersion,
            Disjointness::Arc,
            8,
        )
        .unwrap();
        assert_eq!(r.value, 1);

        let r = brute_max_packing(
            &Tournament::transitive(5),
            &c3p(),
            ModelKind::Immersion,
            Disjointness::Arc,
            8,
        )
        .unwrap();
        assert_eq!(r.value, 0);

        let r = brute_max_packing(
            &two_c3_blocks(),
            &c3p(),
            ModelKind::TopMinor,
            Disjointness::Vertex,
            8,
        )
        .unwrap();
        assert_eq!(r.value, 2);
    }

    #[test]
    fn hitting_counts() {
        let r = brute_min_hitting(&Tournament::c3(), &c3p(), ModelKind::Immersion).unwrap();
        assert_eq!(r.value, 1);

        let r = brute_min_hitting(&Tournament::transitive(6), &c3p(), ModelKind::TopMinor).unwrap();
        assert_eq!(r.value, 0);

        let r = brute_min_hitting(&two_c3_blocks(), &c3p(), ModelKind::Immersion).unwrap();
        assert_eq!(r.value, 2);
    }

    #[test]
    fn widths() {
        assert_eq!(brute_cutwidth(&Tournament::c3()).unwrap(), 1);
        assert_eq!(brute_cutwidth(&Tournament::transitive(7)).unwrap(), 0);
        assert_eq!(brute_pathwidth(&Tournament::c3()).unwrap(), 2);
        assert_eq!(brute_pathwidth(&Tournament::transitive(4)).unwrap(), 1);
    }

    #[test]
    fn caps_raise() {
        assert!(brute_cutwidth(&Tournament::transitive(9)).is_err());
        assert!(brute_pathwidth(&Tournament::transitive(7)).is_err());
        assert!(
            brute_min_hitting(&Tournament::transitive(8), &c3p(), ModelKind::Immersion).is_err()
        );
    }

    #[test]
    fn weak_duality_on_samples() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let patterns = [
            (
                Pattern::new(2, &[(0, 1)]).unwrap(),
                Disjointness::Arc,
                ModelKind::Immersion,
            ),
            (c3p(), Disjointness::Arc, ModelKind::Immersion),
            (c3p(), Disjointness::Vertex, ModelKind::TopMinor),
        ];
        for _ in 0..4 {
            let n = 6;
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
            for (p, d, k) in &patterns {
                let pack = brute_max_packing(&t, p, *k, *d, 30).unwrap().value;
                let hit = brute_min_hitting(&t, p, *k).unwrap().value;
                assert!(pack <= hit, "duality direction violated");
            }
        }
    }
}
