//! The recursive hitting constructions and the top-level duality
//! dispatcher: given a host tournament, a pattern and a budget k, produce
//! either a packing certificate (disjoint copies) or a hitting certificate
//! (arcs or vertices whose removal makes the host pattern-free), plus a
//! bound report stated in measured layout widths.
//!
//! The strongly-connected constructions assume the host lacks k disjoint
//! copies; instead of returning junk when that contract is violated they
//! surface the copies they discover ("packing detected"), which the
//! dispatcher turns into a packing outcome. Every certificate is
//! self-verified before it is returned.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::digraph::{
    enumerate_component_orderings, strong_components, Arc, ComponentOrdering, Pattern,
    StrongDecomposition, Tournament,
};
use crate::embed::{find_model, is_free, Budget, Model, ModelKind, SearchResult};
use crate::error::Error;
use crate::layouts::{
    cut_profile, cutwidth_exact_capped, cutwidth_heuristic, pathwidth_search, VertexOrdering,
    CUTWIDTH_EXACT_CAP,
};
use crate::pack::{
    assemble_interval_packing, pack_acyclic_arc_disjoint, pack_acyclic_vertex_disjoint,
    pack_direct, Disjointness, PackingCertificate,
};

/// Knobs for the duality engine. Budgets count search nodes per decision;
/// `None` means unlimited.
#[derive(Clone, Debug)]
pub struct EpConfig {
    pub seed: u64,
    /// Budget per disjoint-copy decision inside windows and recursions.
    pub decision_budget: Option<u64>,
    /// Budget for the dispatcher's upfront direct packing attempt.
    pub upfront_budget: Option<u64>,
    /// Hosts up to this size get exact cutwidth; larger ones the heuristic.
    pub cutwidth_cap: usize,
    /// Node budget for the exhaustive pathwidth search.
    pub pathwidth_budget: Option<u64>,
}

impl Default for EpConfig {
    fn default() -> Self {
        EpConfig {
            seed: 0,
            decision_budget: Some(20_000_000),
            upfront_budget: Some(2_000_000),
            cutwidth_cap: CUTWIDTH_EXACT_CAP,
            pathwidth_budget: Some(50_000_000),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WidthKind {
    Cutwidth,
    Pathwidth,
}

/// Everything a size bound needs: the instance parameters, the measured
/// width of the layout actually used, the derived family size s, and the
/// bound formula value with the measured width substituted in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub k: usize,
    pub h: usize,
    pub pattern_order: usize,
    pub pattern_size: usize,
    pub pi_count: usize,
    pub width: usize,
    pub width_kind: WidthKind,
    pub s: Option<usize>,
    pub certificate_size: usize,
    pub formula: Option<FormulaBound>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormulaBound {
    pub name: String,
    pub value: f64,
}

/// Hitting elements: arcs in immersion mode, vertices in topminor mode.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HitElements {
    Arcs(Vec<Arc>),
    Vertices(Vec<usize>),
}

impl HitElements {
    pub fn len(&self) -> usize {
        match self {
            HitElements::Arcs(a) => a.len(),
            HitElements::Vertices(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HittingCertificate {
    pub kind: ModelKind,
    pub elements: HitElements,
}

/// One event per rule firing; the acceptance suite walks these to check the
/// per-node size recurrences.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "kebab-case")]
pub enum TraceEvent {
    Dispatch {
        rule: String,
    },
    PackAttempt {
        outcome: String,
        nodes: u64,
    },
    StrongBase {
        depth: usize,
        k: usize,
    },
    StrongPrefixOnly {
        depth: usize,
        k: usize,
    },
    StrongSplit {
        depth: usize,
        k: usize,
        alpha: usize,
        cut_alpha: usize,
        cut_alpha_next: usize,
        width: usize,
    },
    StrongSummary {
        k: usize,
        total: usize,
        width: usize,
    },
    VrtxBase {
        depth: usize,
        k: usize,
    },
    VrtxPeel {
        depth: usize,
        k: usize,
        alpha: usize,
        b_size: usize,
        width: usize,
    },
    VrtxSummary {
        k: usize,
        total: usize,
        width: usize,
    },
    TopStrongBase {
        depth: usize,
        k: usize,
    },
    TopStrongHalve {
        depth: usize,
        k: usize,
    },
    TopStrongSplit {
        depth: usize,
        k: usize,
        alpha: i64,
        vcut_size: usize,
        width: usize,
    },
    TopStrongSummary {
        k: usize,
        total: usize,
        width: usize,
    },
    WindowImm {
        pi: usize,
        slot: usize,
        comp_size: usize,
        trivial: bool,
        alpha: usize,
        beta: usize,
        filled: bool,
        a_size: usize,
        b_size: usize,
        degraded: bool,
    },
    WindowTop {
        pi: usize,
        slot: usize,
        comp_size: usize,
        trivial: bool,
        alpha: i64,
        beta: i64,
        filled: bool,
        a_size: usize,
        b_size: usize,
        degraded: bool,
    },
    PackingBranch {
        pi: usize,
    },
    Degraded {
        what: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum EpResult {
    Packing(PackingCertificate),
    Hitting(HittingCertificate),
}

/// The duality outcome: exactly one certificate branch, the bound report,
/// and the construction trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpOutcome {
    pub result: EpResult,
    pub report: BoundReport,
    pub trace: Vec<TraceEvent>,
    pub nodes_expanded: u64,
}

impl EpOutcome {
    pub fn is_packing(&self) -> bool {
        matches!(self.result, EpResult::Packing(_))
    }
}

/// Result of a strongly-connected hitting construction: either the hitting
/// set (with the maximum layout width used anywhere in the recursion) or
/// the disjoint copies that refute the caller's contract.
#[derive(Clone, Debug)]
pub enum StrongOutcome<E> {
    Hit { elements: Vec<E>, width: usize },
    PackingDetected(Vec<Model>),
}

fn ceil_sqrt(x: usize) -> usize {
    let mut r = (x as f64).sqrt() as usize;
    while r * r < x {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= x {
        r -= 1;
    }
    r
}

fn smallest_even_at_least(x: usize) -> usize {
    let x = x.max(2);
    if x % 2 == 0 {
        x
    } else {
        x + 1
    }
}

struct Engine<'a> {
    cfg: &'a EpConfig,
    trace: Vec<TraceEvent>,
    nodes: u64,
}

impl<'a> Engine<'a> {
    fn new(cfg: &'a EpConfig) -> Self {
        Engine {
            cfg,
            trace: Vec::new(),
            nodes: 0,
        }
    }

    /// Exact freeness decision; budget exhaustion is a hard error because
    /// the recursive constructions cannot use an inconclusive answer.
    fn find(
        &mut self,
        host: &Tournament,
        pattern: &Pattern,
        kind: ModelKind,
    ) -> Result<Option<Model>, Error> {
        let b = Budget::new(self.cfg.decision_budget);
        let r = find_model(host.as_digraph(), pattern, kind, &b);
        self.nodes += b.used();
        match r? {
            SearchResult::Found(m) => Ok(Some(m)),
            SearchResult::Absent => Ok(None),
            SearchResult::Exhausted => Err(Error::BudgetExhausted(b.used())),
        }
    }

    /// Exact disjoint-packing decision on an induced subtournament; the
    /// returned witness models carry host labels.
    fn decide_pack(
        &mut self,
        host: &Tournament,
        map: Option<&[usize]>,
        pattern: &Pattern,
        k: usize,
        kind: ModelKind,
        disjointness: Disjointness,
    ) -> Result<SearchResult<Vec<Model>>, Error> {
        let b = Budget::new(self.cfg.decision_budget);
        let r = pack_direct(host.as_digraph(), pattern, k, kind, disjointness, &b);
        self.nodes += b.used();
        Ok(match r? {
            SearchResult::Found(cert) => SearchResult::Found(match map {
                Some(map) => cert.models.iter().map(|m| m.relabel(map)).collect(),
                None => cert.models,
            }),
            SearchResult::Absent => SearchResult::Absent,
            SearchResult::Exhausted => SearchResult::Exhausted,
        })
    }

    fn ordering_for(&mut self, t: &Tournament) -> Result<(VertexOrdering, usize), Error> {
        if t.n() <= self.cfg.cutwidth_cap {
            cutwidth_exact_capped(t, self.cfg.cutwidth_cap)
        } else {
            Ok(cutwidth_heuristic(t, self.cfg.seed))
        }
    }
}

// ---------------------------------------------------------------------------
// Strongly connected, immersions, arc hitting (halving recursion).
// ---------------------------------------------------------------------------

/// Arc hitting set for a strongly connected pattern, assuming the host has
/// no k arc-disjoint immersion copies; discovered copies surface instead of
/// an invalid answer. Total size is at most 6 * width * k^2 with the width
/// measured as the maximum over all orderings used in the recursion.
pub fn hit_strongly_immersion(
    t: &Tournament,
    pattern: &Pattern,
    k: usize,
    cfg: &EpConfig,
) -> Result<(StrongOutcome<Arc>, Vec<TraceEvent>), Error> {
    require_strong(pattern)?;
    let mut eng = Engine::new(cfg);
    let out = strongly_imm(&mut eng, t, pattern, k, 0)?;
    if let StrongOutcome::Hit { elements, width } = &out {
        eng.trace.push(TraceEvent::StrongSummary {
            k,
            total: elements.len(),
            width: *width,
        });
    }
    Ok((out, eng.trace))
}

fn strongly_imm(
    eng: &mut Engine,
    t: &Tournament,
    pattern: &Pattern,
    k: usize,
    depth: usize,
) -> Result<StrongOutcome<Arc>, Error> {
    if k == 0 {
        return Ok(StrongOutcome::Hit {
            elements: Vec::new(),
            width: 0,
        });
    }
    let Some(first) = eng.find(t, pattern, ModelKind::Immersion)? else {
        eng.trace.push(TraceEvent::StrongBase { depth, k });
        return Ok(StrongOutcome::Hit {
            elements: Vec::new(),
            width: 0,
        });
    };
    if k == 1 {
        return Ok(StrongOutcome::PackingDetected(vec![first]));
    }
    let (sigma, width) = eng.ordering_for(t)?;
    let n = t.n();
    let half_up = k.div_ceil(2);
    let half_down = k / 2;
    // P(alpha): the alpha-prefix holds half_up arc-disjoint copies.
    let probe = |eng: &mut Engine, alpha: usize| -> Result<Option<Vec<Model>>, Error> {
        let verts = sigma.interval(0, alpha);
        let (sub, map) = t.restrict(&verts)?;
        match eng.decide_pack(
            &sub,
            Some(&map),
            pattern,
            half_up,
            ModelKind::Immersion,
            Disjointness::Arc,
        )? {
            SearchResult::Found(models) => Ok(Some(models)),
            SearchResult::Absent => Ok(None),
            SearchResult::Exhausted => Err(Error::BudgetExhausted(eng.nodes)),
        }
    };
    let at_n = probe(eng, n)?;
    if at_n.is_none() {
        // The whole host lacks half_up copies; one recursion suffices.
        eng.trace.push(TraceEvent::StrongPrefixOnly { depth, k });
        return match strongly_imm(eng, t, pattern, half_up, depth + 1)? {
            StrongOutcome::Hit { elements, width: w } => Ok(StrongOutcome::Hit {
                elements,
                width: w.max(width),
            }),
            StrongOutcome::PackingDetected(_) => Err(Error::Internal(
                "copies detected in a prefix that was decided copy-free".into(),
            )),
        };
    }
    let mut lo = 0usize; // P(lo) false: the empty prefix holds no copy.
    let mut hi = n; // P(hi) true.
    let mut witness_hi = at_n.unwrap();
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        match probe(eng, mid)? {
            Some(models) => {
                hi = mid;
                witness_hi = models;
            }
            None => lo = mid,
        }
    }
    let alpha = lo;
    let profile = cut_profile(t, &sigma);
    let prefix_verts = sigma.interval(0, alpha);
    let (prefix_t, prefix_map) = t.restrict(&prefix_verts)?;
    let f1 = match strongly_imm(eng, &prefix_t, pattern, half_up, depth + 1)? {
        StrongOutcome::Hit { elements, width: w } => (relabel_arcs(&elements, &prefix_map), w),
        StrongOutcome::PackingDetected(_) => {
            return Err(Error::Internal(
                "copies detected in a prefix that was decided copy-free".into(),
            ))
        }
    };
    let suffix_verts = sigma.interval(alpha + 1, n);
    let (suffix_t, suffix_map) = t.restrict(&suffix_verts)?;
    let f2 = match strongly_imm(eng, &suffix_t, pattern, half_down, depth + 1)? {
        StrongOutcome::Hit { elements, width: w } => (relabel_arcs(&elements, &suffix_map), w),
        StrongOutcome::PackingDetected(models) => {
            // half_down copies beyond position alpha+1 plus half_up copies
            // inside the (alpha+1)-prefix: k disjoint copies in total.
            let mut all: Vec<Model> =
                models.iter().map(|m| m.relabel(&suffix_map)).collect();
            all.extend(witness_hi);
            return Ok(StrongOutcome::PackingDetected(all));
        }
    };
    let cut_a = &profile.cuts[alpha];
    let cut_a1 = &profile.cuts[(alpha + 1).min(n)];
    eng.trace.push(TraceEvent::StrongSplit {
        depth,
        k,
        alpha,
        cut_alpha: cut_a.len(),
        cut_alpha_next: cut_a1.len(),
        width,
    });
    let mut arcs: BTreeSet<Arc> = f1.0.into_iter().collect();
    arcs.extend(f2.0);
    arcs.extend(cut_a.iter().copied());
    arcs.extend(cut_a1.iter().copied());
    Ok(StrongOutcome::Hit {
        elements: arcs.into_iter().collect(),
        width: width.max(f1.1).max(f2.1),
    })
}

fn relabel_arcs(arcs: &[Arc], map: &[usize]) -> Vec<Arc> {
    arcs.iter().map(|&(u, v)| (map[u], map[v])).collect()
}

fn require_strong(pattern: &Pattern) -> Result<StrongDecomposition, Error> {
    let dec = strong_components(pattern);
    if dec.h() != 1 || pattern.arc_count() == 0 {
        return Err(Error::Invalid(
            "pattern must be strongly connected with at least one arc".into(),
        ));
    }
    Ok(dec)
}

// ---------------------------------------------------------------------------
// Strongly connected, immersions, vertex-disjoint contract (peel loop).
// ---------------------------------------------------------------------------

/// Arc hitting set for a strongly connected pattern under the
/// vertex-disjoint contract: the host has no k vertex-disjoint immersion
/// copies, and `sigma` is an ordering of the host with width c. Size is at
/// most 2(k-1)c.
pub fn hit_strongly_vrtx_immersion(
    t: &Tournament,
    pattern: &Pattern,
    k: usize,
    sigma: &VertexOrdering,
    cfg: &EpConfig,
) -> Result<(StrongOutcome<Arc>, Vec<TraceEvent>), Error> {
    require_strong(pattern)?;
    let mut eng = Engine::new(cfg);
    let width = cut_profile(t, sigma).width;
    let out = strongly_vrtx(&mut eng, t, pattern, k, sigma, 0)?;
    if let StrongOutcome::Hit { elements, .. } = &out {
        eng.trace.push(TraceEvent::VrtxSummary {
            k,
            total: elements.len(),
            width,
        });
    }
    Ok((out, eng.trace))
}

fn strongly_vrtx(
    eng: &mut Engine,
    t: &Tournament,
    pattern: &Pattern,
    k: usize,
    sigma: &VertexOrdering,
    depth: usize,
) -> Result<StrongOutcome<Arc>, Error> {
    if k == 0 {
        return Ok(StrongOutcome::Hit {
            elements: Vec::new(),
            width: 0,
        });
    }
    let profile = cut_profile(t, sigma);
    let c = profile.width;
    let Some(first) = eng.find(t, pattern, ModelKind::Immersion)? else {
        eng.trace.push(TraceEvent::VrtxBase { depth, k });
        return Ok(StrongOutcome::Hit {
            elements: Vec::new(),
            width: c,
        });
    };
    if k == 1 {
        return Ok(StrongOutcome::PackingDetected(vec![first]));
    }
    let n = t.n();
    // Minimal alpha whose prefix holds a copy; monotone, P(n) = true.
    let probe = |eng: &mut Engine, alpha: usize| -> Result<Option<Model>, Error> {
        let verts = sigma.interval(0, alpha);
        let (sub, map) = t.restrict(&verts)?;
        Ok(eng
            .find(&sub, pattern, ModelKind::Immersion)?
            .map(|m| m.relabel(&map)))
    };
    let mut lo = 0usize; // false
    let mut hi = n; // true
    let mut witness = first;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        match probe(eng, mid)? {
            Some(m) => {
                hi = mid;
                witness = m;
            }
            None => lo = mid,
        }
    }
    let alpha = hi;
    // B1: backward arcs whose tail sits exactly at position alpha.
    let tail = sigma.vertex_at(alpha);
    let mut b: BTreeSet<Arc> = t
        .arcs()
        .into_iter()
        .filter(|&(u, v)| u == tail && sigma.position(v) < alpha)
        .collect();
    b.extend(profile.cuts[alpha].iter().copied());
    let b_size = b.len();
    eng.trace.push(TraceEvent::VrtxPeel {
        depth,
        k,
        alpha,
        b_size,
        width: c,
    });
    let rest_verts = sigma.interval(alpha, n);
    let (rest_t, rest_map) = t.restrict(&rest_verts)?;
    let rest_sigma = sigma.restricted(&rest_map);
    match strongly_vrtx(eng, &rest_t, pattern, k - 1, &rest_sigma, depth + 1)? {
        StrongOutcome::Hit { elements, width: w } => {
            let mut arcs = b;
            arcs.extend(relabel_arcs(&elements, &rest_map));
            Ok(StrongOutcome::Hit {
                elements: arcs.into_iter().collect(),
                width: c.max(w),
            })
        }
        StrongOutcome::PackingDetected(models) => {
            // k-1 vertex-disjoint copies beyond the prefix plus the copy
            // inside it: k vertex-disjoint copies.
            let mut all: Vec<Model> = models.iter().map(|m| m.relabel(&rest_map)).collect();
            all.push(witness);
            Ok(StrongOutcome::PackingDetected(all))
        }
    }
}

// ---------------------------------------------------------------------------
// Strongly connected, topological minors, vertex hitting.
// ---------------------------------------------------------------------------

/// Vertex hitting set for a strongly connected pattern, assuming the host
/// has no k vertex-disjoint topological minor copies. Size is at most
/// 2 * width * k * log2(k) for k >= 2, width measured over the interval
/// decompositions used in the recursion.
pub fn hit_strongly_topminor(
    t: &Tournament,
    pattern: &Pattern,
    k: usize,
    cfg: &EpConfig,
) -> Result<(StrongOutcome<usize>, Vec<TraceEvent>), Error> {
    require_strong(pattern)?;
    let mut eng = Engine::new(cfg);
    let out = strongly_top(&mut eng, t, pattern, k, 0)?;
    if let StrongOutcome::Hit { elements, width } = &out {
        eng.trace.push(TraceEvent::TopStrongSummary {
            k,
            total: elements.len(),
            width: *width,
        });
    }
    Ok((out, eng.trace))
}

fn strongly_top(
    eng: &mut Engine,
    t: &Tournament,
    pattern: &Pattern,
    k: usize,
    depth: usize,
) -> Result<StrongOutcome<usize>, Error> {
    if k == 0 {
        return Ok(StrongOutcome::Hit {
            elements: Vec::new(),
            width: 0,
        });
    }
    let Some(first) = eng.find(t, pattern, ModelKind::TopMinor)? else {
        eng.trace.push(TraceEvent::TopStrongBase { depth, k });
        return Ok(StrongOutcome::Hit {
            elements: Vec::new(),
            width: 0,
        });
    };
    if k == 1 {
        return Ok(StrongOutcome::PackingDetected(vec![first]));
    }
    let half_up = k.div_ceil(2);
    let half_down = k / 2;
    let whole = eng.decide_pack(
        t,
        None,
        pattern,
        half_up,
        ModelKind::TopMinor,
        Disjointness::Vertex,
    )?;
    let whole_models = match whole {
        SearchResult::Absent => {
            // The host lacks even half_up copies: recurse at the smaller k.
            eng.trace.push(TraceEvent::TopStrongHalve { depth, k });
            return match strongly_top(eng, t, pattern, half_up, depth + 1)? {
                StrongOutcome::Hit { elements, width } => {
                    Ok(StrongOutcome::Hit { elements, width })
                }
                StrongOutcome::PackingDetected(_) => Err(Error::Internal(
                    "copies detected after the host was decided below half_up".into(),
                )),
            };
        }
        SearchResult::Found(models) => models,
        SearchResult::Exhausted => return Err(Error::BudgetExhausted(eng.nodes)),
    };
    let (dec, p_hat, _) = pathwidth_search(t, eng.cfg.pathwidth_budget);
    let big_n = dec.max_endpoint();
    // Largest alpha with I[0, alpha] lacking half_up copies.
    let probe = |eng: &mut Engine, alpha: i64| -> Result<Option<Vec<Model>>, Error> {
        let members = dec.interval_members(0, alpha);
        let (sub, map) = t.restrict(&members)?;
        match eng.decide_pack(
            &sub,
            Some(&map),
            pattern,
            half_up,
            ModelKind::TopMinor,
            Disjointness::Vertex,
        )? {
            SearchResult::Found(models) => Ok(Some(models)),
            SearchResult::Absent => Ok(None),
            SearchResult::Exhausted => Err(Error::BudgetExhausted(eng.nodes)),
        }
    };
    let mut lo = 0i64; // I[0,0] is empty: false.
    let mut hi = big_n; // true via whole_models.
    let mut witness_hi = whole_models;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        match probe(eng, mid)? {
            Some(models) => {
                hi = mid;
                witness_hi = models;
            }
            None => lo = mid,
        }
    }
    let alpha = lo;
    let prefix_members = dec.interval_members(0, alpha);
    let (prefix_t, prefix_map) = t.restrict(&prefix_members)?;
    let s1 = match strongly_top(eng, &prefix_t, pattern, half_up, depth + 1)? {
        StrongOutcome::Hit { elements, width } => (
            elements.into_iter().map(|v| prefix_map[v]).collect::<Vec<_>>(),
            width,
        ),
        StrongOutcome::PackingDetected(_) => {
            return Err(Error::Internal(
                "copies detected in a window that was decided copy-free".into(),
            ))
        }
    };
    let suffix_members = if alpha + 2 > big_n {
        Vec::new()
    } else {
        dec.interval_members(alpha + 2, big_n)
    };
    let (suffix_t, suffix_map) = t.restrict(&suffix_members)?;
    let s2 = match strongly_top(eng, &suffix_t, pattern, half_down, depth + 1)? {
        StrongOutcome::Hit { elements, width } => (
            elements.into_iter().map(|v| suffix_map[v]).collect::<Vec<_>>(),
            width,
        ),
        StrongOutcome::PackingDetected(models) => {
            // half_down copies entirely right of alpha+1 plus half_up
            // copies inside I[0, alpha+1]: k vertex-disjoint copies.
            let mut all: Vec<Model> = models.iter().map(|m| m.relabel(&suffix_map)).collect();
            all.extend(witness_hi);
            return Ok(StrongOutcome::PackingDetected(all));
        }
    };
    let vcut = dec.vcut(alpha + 1);
    eng.trace.push(TraceEvent::TopStrongSplit {
        depth,
        k,
        alpha,
        vcut_size: vcut.len(),
        width: p_hat,
    });
    let mut vertices: BTreeSet<usize> = s1.0.into_iter().collect();
    vertices.extend(s2.0);
    vertices.extend(vcut);
    Ok(StrongOutcome::Hit {
        elements: vertices.into_iter().collect(),
        width: p_hat.max(s1.1).max(s2.1),
    })
}

// ---------------------------------------------------------------------------
// Not-acyclic patterns: window sweeps per topological ordering.
// ---------------------------------------------------------------------------

fn canonical_disjointness(kind: ModelKind) -> Disjointness {
    match kind {
        ModelKind::Immersion => Disjointness::Arc,
        ModelKind::TopMinor => Disjointness::Vertex,
    }
}

struct WeaklyContext {
    dec: StrongDecomposition,
    orderings: Vec<ComponentOrdering>,
}

fn weakly_context(pattern: &Pattern) -> Result<WeaklyContext, Error> {
    let dec = strong_components(pattern);
    if dec.components.iter().all(|c| c.len() == 1) {
        return Err(Error::Invalid(
            "pattern is acyclic; the window construction needs a cycle".into(),
        ));
    }
    let orderings = enumerate_component_orderings(&dec)?;
    Ok(WeaklyContext { dec, orderings })
}

/// Arc hitting or packing for a non-acyclic pattern via sigma-interval
/// windows: per topological ordering pi, grow each component's window until
/// it holds s vertex-disjoint copies, take a hitting set inside every
/// window plus the window-boundary cuts, and union over pi. If some pi
/// fills all its windows, the transversal stitching yields k disjoint
/// copies instead.
pub fn hit_weakly_immersion(
    t: &Tournament,
    pattern: &Pattern,
    k: usize,
    cfg: &EpConfig,
) -> Result<EpOutcome, Error> {
    let mut eng = Engine::new(cfg);
    let (result, report) = weakly_immersion(&mut eng, t, pattern, k)?;
    finish(&mut eng, t, pattern, result, report)
}

fn weakly_immersion(
    eng: &mut Engine,
    t: &Tournament,
    pattern: &Pattern,
    k: usize,
) -> Result<(EpResult, BoundReport), Error> {
    let ctx = weakly_context(pattern)?;
    let (dec, orderings) = (&ctx.dec, &ctx.orderings);
    let h = dec.h();
    let (sigma, c_hat) = eng.ordering_for(t)?;
    let profile = cut_profile(t, &sigma);
    let n = t.n();
    let s = smallest_even_at_least((h * ceil_sqrt(c_hat)).max(2 * k));
    let mut hitting: BTreeSet<Arc> = BTreeSet::new();
    for (pi_rank, pi) in orderings.iter().enumerate() {
        let mut alpha = 0usize;
        let mut families: Vec<Vec<Model>> = Vec::new();
        let mut all_filled = true;
        let mut pi_arcs: BTreeSet<Arc> = BTreeSet::new();
        let mut pi_degraded = false;
        for (slot, &comp) in pi.seq.iter().enumerate() {
            let members = &dec.components[comp];
            let trivial = members.len() == 1;
            let (beta, filled, family, a_set, degraded) = if trivial {
                let beta = (alpha + s).min(n);
                let filled = alpha + s <= n;
                let window = sigma.interval(alpha, beta);
                let family: Vec<Model> = window
                    .iter()
                    .map(|&v| Model {
                        kind: ModelKind::Immersion,
                        vertex_map: vec![v],
                        paths: Vec::new(),
                    })
                    .collect();
                // All backward arcs inside the window.
                let inside: BTreeSet<usize> = window.iter().copied().collect();
                let a_set: BTreeSet<Arc> = t
                    .arcs()
                    .into_iter()
                    .filter(|&(u, v)| {
                        inside.contains(&u)
                            && inside.contains(&v)
                            && sigma.position(u) > sigma.position(v)
                    })
                    .collect();
                (beta, filled, family, a_set, false)
            } else {
                let (comp_pattern, _) = pattern.induced(members)?;
                let mut degraded = false;
                // Minimal beta <= n such that the window holds s
                // vertex-disjoint immersion copies of the component.
                let probe = |eng: &mut Engine,
                             beta: usize,
                                 degraded: &mut bool|
                 -> Result<Option<Vec<Model>>, Error> {
                    let verts = sigma.interval(alpha, beta);
                    let (sub, map) = t.restrict(&verts)?;
                    match eng.decide_pack(
                        &sub,
                        Some(&map),
                        &comp_pattern,
                        s,
                        ModelKind::Immersion,
                        Disjointness::Vertex,
                    )? {
                        SearchResult::Found(models) => Ok(Some(models)),
                        SearchResult::Absent => Ok(None),
                        SearchResult::Exhausted => {
                            *degraded = true;
                            Ok(None)
                        }
                    }
                };
                let at_n = probe(eng, n, &mut degraded)?;
                let (beta, filled, family) = match at_n {
                    None => (n, false, Vec::new()),
                    Some(models_n) => {
                        let mut lo = alpha;
                        let mut hi = n;
                        let mut witness = models_n;
                        while hi - lo > 1 {
                            let mid = (lo + hi) / 2;
                            match probe(eng, mid, &mut degraded)? {
                                Some(m) => {
                                    hi = mid;
                                    witness = m;
                                }
                                None => lo = mid,
                            }
                        }
                        (hi, true, witness)
                    }
                };
                let verts = sigma.interval(alpha, beta);
                let (window_t, window_map) = t.restrict(&verts)?;
                let window_sigma = sigma.restricted(&window_map);
                let a_set: BTreeSet<Arc> = match strongly_vrtx(
                    eng,
                    &window_t,
                    &comp_pattern,
                    s + 1,
                    &window_sigma,
                    0,
                )? {
                    StrongOutcome::Hit { elements, width } => {
                        eng.trace.push(TraceEvent::VrtxSummary {
                            k: s + 1,
                            total: elements.len(),
                            width,
                        });
                        relabel_arcs(&elements, &window_map).into_iter().collect()
                    }
                    StrongOutcome::PackingDetected(_) => {
                        if degraded {
                            return Err(Error::BudgetExhausted(eng.nodes));
                        }
                        return Err(Error::Internal(
                            "window holds s+1 disjoint copies despite minimal growth".into(),
                        ));
                    }
                };
                (beta, filled, family, a_set, degraded)
            };
            let b_set = &profile.cuts[beta.min(n)];
            eng.trace.push(TraceEvent::WindowImm {
                pi: pi_rank,
                slot,
                comp_size: members.len(),
                trivial,
                alpha,
                beta,
                filled,
                a_size: a_set.len(),
                b_size: b_set.len(),
                degraded,
            });
            pi_arcs.extend(a_set);
            pi_arcs.extend(b_set.iter().copied());
            pi_degraded |= degraded;
            all_filled &= filled;
            families.push(family);
            alpha = beta;
        }
        if all_filled {
            eng.trace.push(TraceEvent::PackingBranch { pi: pi_rank });
            let cert = assemble_interval_packing(
                t,
                pattern,
                dec,
                pi,
                &families,
                k,
                ModelKind::Immersion,
                eng.cfg.seed,
            )?;
            let report = BoundReport {
                k,
                h,
                pattern_order: pattern.order(),
                pattern_size: pattern.size(),
                pi_count: orderings.len(),
                width: c_hat,
                width_kind: WidthKind::Cutwidth,
                s: Some(s),
                certificate_size: cert.models.len(),
                formula: None,
            };
            return Ok((EpResult::Packing(cert), report));
        }
        let _ = pi_degraded;
        hitting.extend(pi_arcs);
    }
    let elements: Vec<Arc> = hitting.into_iter().collect();
    let formula_value =
        (orderings.len() * pattern.order() * (2 * s + 1) * c_hat) as f64;
    let report = BoundReport {
        k,
        h,
        pattern_order: pattern.order(),
        pattern_size: pattern.size(),
        pi_count: orderings.len(),
        width: c_hat,
        width_kind: WidthKind::Cutwidth,
        s: Some(s),
        certificate_size: elements.len(),
        formula: Some(FormulaBound {
            name: "pi * order * (2s+1) * ctw".into(),
            value: formula_value,
        }),
    };
    Ok((
        EpResult::Hitting(HittingCertificate {
            kind: ModelKind::Immersion,
            elements: HitElements::Arcs(elements),
        }),
        report,
    ))
}

/// Vertex hitting or packing for a non-acyclic pattern via interval
/// windows over a normalized decomposition.
pub fn hit_weakly_topminor(
    t: &Tournament,
    pattern: &Pattern,
    k: usize,
    cfg: &EpConfig,
) -> Result<EpOutcome, Error> {
    let mut eng = Engine::new(cfg);
    let (result, report) = weakly_topminor(&mut eng, t, pattern, k)?;
    finish(&mut eng, t, pattern, result, report)
}

fn weakly_topminor(
    eng: &mut Engine,
    t: &Tournament,
    pattern: &Pattern,
    k: usize,
) -> Result<(EpResult, BoundReport), Error> {
    let ctx = weakly_context(pattern)?;
    let (dec, orderings) = (&ctx.dec, &ctx.orderings);
    let h = dec.h();
    let (ivd, p_hat, _) = pathwidth_search(t, eng.cfg.pathwidth_budget);
    let big_n = ivd.max_endpoint();
    let mut hitting: BTreeSet<usize> = BTreeSet::new();
    let mut max_a = 0usize;
    for (pi_rank, pi) in orderings.iter().enumerate() {
        let mut alpha = 0i64;
        let mut families: Vec<Vec<Model>> = Vec::new();
        let mut windows: Vec<Vec<usize>> = Vec::new();
        let mut all_filled = true;
        let mut pi_vertices: BTreeSet<usize> = BTreeSet::new();
        for (slot, &comp) in pi.seq.iter().enumerate() {
            let members = &dec.components[comp];
            let trivial = members.len() == 1;
            let (beta, filled, family, a_set, degraded) = if trivial {
                // Minimal beta with at least k members in I[alpha, beta].
                let count = |beta: i64| ivd.interval_members(alpha, beta).len();
                let (beta, filled) = if count(big_n) < k {
                    (big_n, false)
                } else {
                    // count(alpha) = 0 since I[alpha, alpha] is empty.
                    let mut lo = alpha;
                    let mut hi = big_n;
                    while hi - lo > 1 {
                        let mid = (lo + hi) / 2;
                        if count(mid) >= k {
                            hi = mid;
                        } else {
                            lo = mid;
                        }
                    }
                    (hi, true)
                };
                let window = ivd.interval_members(alpha, beta);
                let family: Vec<Model> = window
                    .iter()
                    .take(k)
                    .map(|&v| Model {
                        kind: ModelKind::TopMinor,
                        vertex_map: vec![v],
                        paths: Vec::new(),
                    })
                    .collect();
                let a_set: BTreeSet<usize> = window.iter().copied().collect();
                (beta, filled, family, a_set, false)
            } else {
                let (comp_pattern, _) = pattern.induced(members)?;
                let mut degraded = false;
                let probe = |eng: &mut Engine,
                             beta: i64,
                                 degraded: &mut bool|
                 -> Result<Option<Vec<Model>>, Error> {
                    let verts = ivd.interval_members(alpha, beta);
                    let (sub, map) = t.restrict(&verts)?;
                    match eng.decide_pack(
                        &sub,
                        Some(&map),
                        &comp_pattern,
                        k,
                        ModelKind::TopMinor,
                        Disjointness::Vertex,
                    )? {
                        SearchResult::Found(models) => Ok(Some(models)),
                        SearchResult::Absent => Ok(None),
                        SearchResult::Exhausted => {
                            *degraded = true;
                            Ok(None)
                        }
                    }
                };
                let at_n = probe(eng, big_n, &mut degraded)?;
                let (beta, filled, family) = match at_n {
                    None => (big_n, false, Vec::new()),
                    Some(models_n) => {
                        let mut lo = alpha;
                        let mut hi = big_n;
                        let mut witness = models_n;
                        while hi - lo > 1 {
                            let mid = (lo + hi) / 2;
                            match probe(eng, mid, &mut degraded)? {
                                Some(m) => {
                                    hi = mid;
                                    witness = m;
                                }
                                None => lo = mid,
                            }
                        }
                        (hi, true, witness)
                    }
                };
                let verts = ivd.interval_members(alpha, beta);
                let (window_t, window_map) = t.restrict(&verts)?;
                // The window lacks k+1 disjoint copies by minimality, so
                // the vertex construction applies at threshold k+1.
                let a_set: BTreeSet<usize> =
                    match strongly_top(eng, &window_t, &comp_pattern, k + 1, 0)? {
                        StrongOutcome::Hit { elements, width } => {
                            eng.trace.push(TraceEvent::TopStrongSummary {
                                k: k + 1,
                                total: elements.len(),
                                width,
                            });
                            elements.into_iter().map(|v| window_map[v]).collect()
                        }
                        StrongOutcome::PackingDetected(_) => {
                            if degraded {
                                return Err(Error::BudgetExhausted(eng.nodes));
                            }
                            return Err(Error::Internal(
                                "window holds k+1 disjoint copies despite minimal growth"
                                    .into(),
                            ));
                        }
                    };
                (beta, filled, family, a_set, degraded)
            };
            let b_set = ivd.vcut(beta);
            eng.trace.push(TraceEvent::WindowTop {
                pi: pi_rank,
                slot,
                comp_size: members.len(),
                trivial,
                alpha,
                beta,
                filled,
                a_size: a_set.len(),
                b_size: b_set.len(),
                degraded,
            });
            max_a = max_a.max(a_set.len());
            pi_vertices.extend(a_set);
            pi_vertices.extend(b_set);
            windows.push(ivd.interval_members(alpha, beta));
            families.push(family);
            all_filled &= filled;
            alpha = beta;
        }
        // Window audit: pairwise disjoint, cross-window arcs forward.
        for i in 0..windows.len() {
            for j in (i + 1)..windows.len() {
                for &u in &windows[i] {
                    for &v in &windows[j] {
                        if u == v {
                            return Err(Error::Internal(format!(
                                "windows {i} and {j} of pi {pi_rank} share vertex {u}"
                            )));
                        }
                        if t.has_arc(v, u) {
                            return Err(Error::Internal(format!(
                                "backward arc ({v},{u}) between windows {j} and {i}"
                            )));
                        }
                    }
                }
            }
        }
        if all_filled {
            eng.trace.push(TraceEvent::PackingBranch { pi: pi_rank });
            let cert = assemble_interval_packing(
                t,
                pattern,
                dec,
                pi,
                &families,
                k,
                ModelKind::TopMinor,
                eng.cfg.seed,
            )?;
            let report = BoundReport {
                k,
                h,
                pattern_order: pattern.order(),
                pattern_size: pattern.size(),
                pi_count: orderings.len(),
                width: p_hat,
                width_kind: WidthKind::Pathwidth,
                s: Some(k),
                certificate_size: cert.models.len(),
                formula: None,
            };
            return Ok((EpResult::Packing(cert), report));
        }
        hitting.extend(pi_vertices);
    }
    let elements: Vec<usize> = hitting.into_iter().collect();
    let formula_value = (orderings.len() * pattern.order() * (max_a + p_hat)) as f64;
    let report = BoundReport {
        k,
        h,
        pattern_order: pattern.order(),
        pattern_size: pattern.size(),
        pi_count: orderings.len(),
        width: p_hat,
        width_kind: WidthKind::Pathwidth,
        s: None,
        certificate_size: elements.len(),
        formula: Some(FormulaBound {
            name: "pi * order * (max_a + pw)".into(),
            value: formula_value,
        }),
    };
    Ok((
        EpResult::Hitting(HittingCertificate {
            kind: ModelKind::TopMinor,
            elements: HitElements::Vertices(elements),
        }),
        report,
    ))
}

// ---------------------------------------------------------------------------
// Acyclic patterns.
// ---------------------------------------------------------------------------

/// Acyclic pattern, immersion mode: pack k arc-disjoint copies through
/// transitive blocks, or fall back to every arc of the host as the hitting
/// set (always valid once the pattern has an arc).
pub fn hit_acyclic_immersion(
    t: &Tournament,
    pattern: &Pattern,
    k: usize,
    cfg: &EpConfig,
) -> Result<EpOutcome, Error> {
    let mut eng = Engine::new(cfg);
    let (result, report) = acyclic_immersion(&mut eng, t, pattern, k)?;
    finish(&mut eng, t, pattern, result, report)
}

fn acyclic_immersion(
    eng: &mut Engine,
    t: &Tournament,
    pattern: &Pattern,
    k: usize,
) -> Result<(EpResult, BoundReport), Error> {
    if !pattern.is_acyclic() {
        return Err(Error::Invalid("pattern is not acyclic".into()));
    }
    let report = |cert_size: usize| BoundReport {
        k,
        h: pattern.n(),
        pattern_order: pattern.order(),
        pattern_size: pattern.size(),
        pi_count: 0,
        width: 0,
        width_kind: WidthKind::Cutwidth,
        s: None,
        certificate_size: cert_size,
        formula: None,
    };
    if pattern.arc_count() == 0 {
        // Repeating one vertex set k times is an arc-disjoint packing.
        if t.n() >= pattern.n() {
            let b = Budget::new(eng.cfg.upfront_budget);
            let cert = pack_direct(
                t.as_digraph(),
                pattern,
                k,
                ModelKind::Immersion,
                Disjointness::Arc,
                &b,
            )?
            .found()
            .expect("arcless packing is immediate");
            eng.nodes += b.used();
            return Ok((EpResult::Packing(cert.clone()), report(cert.models.len())));
        }
        return Ok((
            EpResult::Hitting(HittingCertificate {
                kind: ModelKind::Immersion,
                elements: HitElements::Arcs(Vec::new()),
            }),
            report(0),
        ));
    }
    let b = Budget::new(eng.cfg.upfront_budget);
    let attempt = pack_acyclic_arc_disjoint(t, pattern, k, eng.cfg.seed, &b)?;
    eng.nodes += b.used();
    match attempt {
        SearchResult::Found(cert) => {
            let size = cert.models.len();
            Ok((EpResult::Packing(cert), report(size)))
        }
        other => {
            if other == SearchResult::Exhausted {
                eng.trace.push(TraceEvent::Degraded {
                    what: "acyclic packing attempt ran out of budget".into(),
                });
            }
            // Every copy of a pattern with an arc uses an arc.
            let arcs = t.arcs();
            let size = arcs.len();
            Ok((
                EpResult::Hitting(HittingCertificate {
                    kind: ModelKind::Immersion,
                    elements: HitElements::Arcs(arcs),
                }),
                report(size),
            ))
        }
    }
}

/// Acyclic pattern, topminor mode: partition into k blocks and embed, or
/// return the whole vertex set; the packing is guaranteed whenever
/// n >= 2^|P| * k, so the hitting set is below 2^|P| * k vertices.
pub fn hit_acyclic_topminor(
    t: &Tournament,
    pattern: &Pattern,
    k: usize,
    cfg: &EpConfig,
) -> Result<EpOutcome, Error> {
    let mut eng = Engine::new(cfg);
    let (result, report) = acyclic_topminor(&mut eng, t, pattern, k)?;
    finish(&mut eng, t, pattern, result, report)
}

fn acyclic_topminor(
    eng: &mut Engine,
    t: &Tournament,
    pattern: &Pattern,
    k: usize,
) -> Result<(EpResult, BoundReport), Error> {
    if !pattern.is_acyclic() {
        return Err(Error::Invalid("pattern is not acyclic".into()));
    }
    let formula = FormulaBound {
        name: "2^order * k".into(),
        value: (1u64 << pattern.n().min(62)) as f64 * k as f64,
    };
    let report = |cert_size: usize| BoundReport {
        k,
        h: pattern.n(),
        pattern_order: pattern.order(),
        pattern_size: pattern.size(),
        pi_count: 0,
        width: 0,
        width_kind: WidthKind::Pathwidth,
        s: None,
        certificate_size: cert_size,
        formula: Some(formula.clone()),
    };
    if let Some(cert) = pack_acyclic_vertex_disjoint(t, pattern, k)? {
        let size = cert.models.len();
        return Ok((EpResult::Packing(cert), report(size)));
    }
    // A stronger answer may still exist below the partition threshold.
    let b = Budget::new(eng.cfg.upfront_budget);
    let direct = pack_direct(
        t.as_digraph(),
        pattern,
        k,
        ModelKind::TopMinor,
        Disjointness::Vertex,
        &b,
    )?;
    eng.nodes += b.used();
    if let SearchResult::Found(cert) = direct {
        let size = cert.models.len();
        return Ok((EpResult::Packing(cert), report(size)));
    }
    if direct == SearchResult::Exhausted {
        eng.trace.push(TraceEvent::Degraded {
            what: "direct packing attempt ran out of budget".into(),
        });
    }
    let elements: Vec<usize> = if t.n() < pattern.n() {
        Vec::new()
    } else {
        (0..t.n()).collect()
    };
    let size = elements.len();
    Ok((
        EpResult::Hitting(HittingCertificate {
            kind: ModelKind::TopMinor,
            elements: HitElements::Vertices(elements),
        }),
        report(size),
    ))
}

// ---------------------------------------------------------------------------
// Dispatcher.
// ---------------------------------------------------------------------------

/// The duality engine: returns a packing certificate or a hitting
/// certificate, dispatching on the pattern shape as the dichotomy proofs
/// do. A direct packing attempt runs before any hitting branch so outcomes
/// are maximally informative, and every certificate is self-verified.
pub fn erdos_posa(
    t: &Tournament,
    pattern: &Pattern,
    k: usize,
    kind: ModelKind,
    cfg: &EpConfig,
) -> Result<EpOutcome, Error> {
    if k == 0 {
        return Err(Error::Invalid("k must be at least 1".into()));
    }
    let mut eng = Engine::new(cfg);
    if pattern.arc_count() == 0 || pattern.is_acyclic() {
        let rule = if pattern.arc_count() == 0 {
            "arcless-corner"
        } else {
            "acyclic"
        };
        eng.trace.push(TraceEvent::Dispatch { rule: rule.into() });
        let (result, report) = match kind {
            ModelKind::Immersion => acyclic_immersion(&mut eng, t, pattern, k)?,
            ModelKind::TopMinor => acyclic_topminor(&mut eng, t, pattern, k)?,
        };
        return finish(&mut eng, t, pattern, result, report);
    }
    eng.trace.push(TraceEvent::Dispatch {
        rule: "not-acyclic".into(),
    });
    // Upfront direct packing attempt with a budget.
    let b = Budget::new(cfg.upfront_budget);
    let attempt = pack_direct(
        t.as_digraph(),
        pattern,
        k,
        kind,
        canonical_disjointness(kind),
        &b,
    )?;
    eng.nodes += b.used();
    eng.trace.push(TraceEvent::PackAttempt {
        outcome: match &attempt {
            SearchResult::Found(_) => "packing".into(),
            SearchResult::Absent => "absent".into(),
            SearchResult::Exhausted => "budget-exhausted".into(),
        },
        nodes: b.used(),
    });
    if let SearchResult::Found(cert) = attempt {
        let dec = strong_components(pattern);
        let report = BoundReport {
            k,
            h: dec.h(),
            pattern_order: pattern.order(),
            pattern_size: pattern.size(),
            pi_count: 0,
            width: 0,
            width_kind: match kind {
                ModelKind::Immersion => WidthKind::Cutwidth,
                ModelKind::TopMinor => WidthKind::Pathwidth,
            },
            s: None,
            certificate_size: cert.models.len(),
            formula: None,
        };
        return finish(&mut eng, t, pattern, EpResult::Packing(cert), report);
    }
    let (result, report) = match kind {
        ModelKind::Immersion => weakly_immersion(&mut eng, t, pattern, k)?,
        ModelKind::TopMinor => weakly_topminor(&mut eng, t, pattern, k)?,
    };
    finish(&mut eng, t, pattern, result, report)
}

/// Self-verification gate: packings are audited, hitting sets are checked
/// by an exhaustive freeness search on the residual host.
fn finish(
    eng: &mut Engine,
    t: &Tournament,
    pattern: &Pattern,
    result: EpResult,
    report: BoundReport,
) -> Result<EpOutcome, Error> {
    match &result {
        EpResult::Packing(cert) => {
            let audit = cert.audit(t.as_digraph(), pattern);
            if !audit.is_empty() {
                return Err(Error::Internal(format!(
                    "packing certificate failed self-verification: {audit:?}"
                )));
            }
        }
        EpResult::Hitting(cert) => {
            let b = Budget::unlimited();
            let free = match &cert.elements {
                HitElements::Arcs(arcs) => {
                    let host = t.delete_arcs(arcs)?;
                    is_free(&host, pattern, cert.kind, &b)?
                }
                HitElements::Vertices(verts) => {
                    let gone: BTreeSet<usize> = verts.iter().copied().collect();
                    let (host, _) = t.delete_vertices(&gone)?;
                    is_free(&host, pattern, cert.kind, &b)?
                }
            };
            eng.nodes += b.used();
            if !free {
                return Err(Error::Internal(
                    "hitting certificate failed self-verification".into(),
                ));
            }
        }
    }
    Ok(EpOutcome {
        result,
        report,
        trace: std::mem::take(&mut eng.trace),
        nodes_expanded: eng.nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::pattern_by_name;
    use crate::oracle::two_c3_blocks;

    fn cfg() -> EpConfig {
        EpConfig::default()
    }

    fn c3p() -> Pattern {
        pattern_by_name("c3").unwrap()
    }

    fn assert_hitting_valid(t: &Tournament, p: &Pattern, out: &EpOutcome) {
        match &out.result {
            EpResult::Hitting(cert) => {
                let free = match &cert.elements {
                    HitElements::Arcs(arcs) => {
                        let host = t.delete_arcs(arcs).unwrap();
                        is_free(&host, p, cert.kind, &Budget::unlimited()).unwrap()
                    }
                    HitElements::Vertices(verts) => {
                        let gone: BTreeSet<usize> = verts.iter().copied().collect();
                        let (host, _) = t.delete_vertices(&gone).unwrap();
                        is_free(&host, p, cert.kind, &Budget::unlimited()).unwrap()
                    }
                };
                assert!(free, "residual host still contains the pattern");
            }
            EpResult::Packing(_) => panic!("expected a hitting outcome"),
        }
    }

    #[test]
    fn strongly_immersion_base_cases() {
        // k=1 on a copy-free host: the empty set.
        let (out, _) = hit_strongly_immersion(&Tournament::transitive(6), &c3p(), 1, &cfg()).unwrap();
        match out {
            StrongOutcome::Hit { elements, .. } => assert!(elements.is_empty()),
            _ => panic!("expected empty hit"),
        }
        // Large k on a copy-free host: still empty.
        let (out, _) = hit_strongly_immersion(&Tournament::transitive(6), &c3p(), 5, &cfg()).unwrap();
        match out {
            StrongOutcome::Hit { elements, .. } => assert!(elements.is_empty()),
            _ => panic!("expected empty hit"),
        }
        // Contract violation surfaces the copy instead of junk.
        let (out, _) = hit_strongly_immersion(&Tournament::c3(), &c3p(), 1, &cfg()).unwrap();
        assert!(matches!(out, StrongOutcome::PackingDetected(_)));
    }

    #[test]
    fn strongly_immersion_two_blocks() {
        let t = two_c3_blocks();
        let (out, trace) = hit_strongly_immersion(&t, &c3p(), 3, &cfg()).unwrap();
        match out {
            StrongOutcome::Hit { elements, width } => {
                let host = t.delete_arcs(&elements).unwrap();
                assert!(is_free(&host, &c3p(), ModelKind::Immersion, &Budget::unlimited()).unwrap());
                assert!(elements.len() <= 6 * width * 9, "6*c*k^2 bound");
                // Per-node recurrence: each split adds at most 2 * width arcs.
                for ev in &trace {
                    if let TraceEvent::StrongSplit {
                        cut_alpha,
                        cut_alpha_next,
                        width,
                        ..
                    } = ev
                    {
                        assert!(cut_alpha + cut_alpha_next <= 2 * width);
                    }
                }
            }
            StrongOutcome::PackingDetected(models) => {
                panic!("3 arc-disjoint C3 copies cannot fit in two blocks: {models:?}")
            }
        }
    }

    #[test]
    fn strongly_vrtx_on_c3() {
        let t = Tournament::c3();
        let (sigma, _) = crate::layouts::cutwidth_exact(&t).unwrap();
        let (out, _) = hit_strongly_vrtx_immersion(&t, &c3p(), 2, &sigma, &cfg()).unwrap();
        match out {
            StrongOutcome::Hit { elements, width } => {
                assert_eq!(elements.len(), 1);
                assert!(elements.len() <= 2 * (2 - 1) * width);
                let host = t.delete_arcs(&elements).unwrap();
                assert!(is_free(&host, &c3p(), ModelKind::Immersion, &Budget::unlimited()).unwrap());
            }
            _ => panic!("C3 has no 2 vertex-disjoint copies"),
        }
    }

    #[test]
    fn strongly_vrtx_transitive_host() {
        let t = Tournament::transitive(5);
        let sigma = VertexOrdering::identity(5);
        let (out, _) = hit_strongly_vrtx_immersion(&t, &c3p(), 3, &sigma, &cfg()).unwrap();
        match out {
            StrongOutcome::Hit { elements, .. } => assert!(elements.is_empty()),
            _ => panic!("no copies in a transitive host"),
        }
    }

    #[test]
    fn strongly_topminor_cases() {
        let (out, _) = hit_strongly_topminor(&Tournament::transitive(6), &c3p(), 4, &cfg()).unwrap();
        match out {
            StrongOutcome::Hit { elements, .. } => assert!(elements.is_empty()),
            _ => panic!("no copies"),
        }
        let t = two_c3_blocks();
        let (out, trace) = hit_strongly_topminor(&t, &c3p(), 3, &cfg()).unwrap();
        match out {
            StrongOutcome::Hit { elements, width } => {
                let gone: BTreeSet<usize> = elements.iter().copied().collect();
                let (host, _) = t.delete_vertices(&gone).unwrap();
                assert!(is_free(&host, &c3p(), ModelKind::TopMinor, &Budget::unlimited()).unwrap());
                let bound = 2.0 * width as f64 * 3.0 * (3.0f64).log2();
                assert!(elements.len() as f64 <= bound);
                for ev in &trace {
                    if let TraceEvent::TopStrongSplit {
                        vcut_size, width, ..
                    } = ev
                    {
                        assert!(vcut_size <= width);
                    }
                }
            }
            StrongOutcome::PackingDetected(_) => panic!("only 2 disjoint copies exist"),
        }
    }

    #[test]
    fn weakly_immersion_on_transitive_host() {
        let t = Tournament::transitive(8);
        for name in ["c3", "digon", "digon-tail", "c3-source"] {
            let p = pattern_by_name(name).unwrap();
            let out = hit_weakly_immersion(&t, &p, 2, &cfg()).unwrap();
            assert_hitting_valid(&t, &p, &out);
        }
    }

    #[test]
    fn weakly_immersion_source_plus_c3() {
        // Host: source vertex 3 into a C3 on {0,1,2}; pattern C3 + source.
        let t = Tournament::from_arcs(
            4,
            &[(0, 1), (1, 2), (2, 0), (3, 0), (3, 1), (3, 2)],
        )
        .unwrap();
        let p = pattern_by_name("c3-source").unwrap();
        let out = hit_weakly_immersion(&t, &p, 1, &cfg()).unwrap();
        match &out.result {
            EpResult::Hitting(_) => assert_hitting_valid(&t, &p, &out),
            EpResult::Packing(cert) => {
                assert!(cert.audit(t.as_digraph(), &p).is_empty());
            }
        }
    }

    #[test]
    fn weakly_immersion_packing_branch_on_stacked_blocks() {
        // Four C3 blocks all joined forward; C3 -> C3 with one link; k = 1
        // forces s = 2 and both windows fill with 2 disjoint C3 copies.
        let mut arcs = Vec::new();
        for b in 0..4usize {
            let o = 3 * b;
            arcs.extend([(o, o + 1), (o + 1, o + 2), (o + 2, o)]);
        }
        for u in 0..12usize {
            for v in 0..12usize {
                if u / 3 < v / 3 {
                    arcs.push((u, v));
                }
            }
        }
        let t = Tournament::from_arcs(12, &arcs).unwrap();
        let p = pattern_by_name("c3c3").unwrap();
        let out = hit_weakly_immersion(&t, &p, 1, &cfg()).unwrap();
        match &out.result {
            EpResult::Packing(cert) => {
                assert_eq!(cert.models.len(), 1);
                assert!(cert.audit(t.as_digraph(), &p).is_empty());
                assert_eq!(out.report.s, Some(2));
            }
            EpResult::Hitting(_) => panic!("expected the packing branch"),
        }
    }

    #[test]
    fn weakly_topminor_examples() {
        let t = Tournament::transitive(8);
        let p = c3p();
        let out = hit_weakly_topminor(&t, &p, 2, &cfg()).unwrap();
        assert_hitting_valid(&t, &p, &out);

        let t = Tournament::from_arcs(
            4,
            &[(0, 1), (1, 2), (2, 0), (3, 0), (3, 1), (3, 2)],
        )
        .unwrap();
        let p = pattern_by_name("c3-source").unwrap();
        let out = hit_weakly_topminor(&t, &p, 1, &cfg()).unwrap();
        match &out.result {
            EpResult::Hitting(_) => assert_hitting_valid(&t, &p, &out),
            EpResult::Packing(cert) => {
                assert!(cert.audit(t.as_digraph(), &p).is_empty());
            }
        }
    }

    #[test]
    fn weakly_topminor_packing_branch() {
        let mut arcs = Vec::new();
        for b in 0..2usize {
            let o = 3 * b;
            arcs.extend([(o, o + 1), (o + 1, o + 2), (o + 2, o)]);
        }
        for u in 0..6usize {
            for v in 0..6usize {
                if u / 3 < v / 3 {
                    arcs.push((u, v));
                }
            }
        }
        let t = Tournament::from_arcs(6, &arcs).unwrap();
        let p = pattern_by_name("c3c3").unwrap();
        let out = hit_weakly_topminor(&t, &p, 1, &cfg()).unwrap();
        match &out.result {
            EpResult::Packing(cert) => {
                assert_eq!(cert.models.len(), 1);
                assert!(cert.audit(t.as_digraph(), &p).is_empty());
            }
            EpResult::Hitting(_) => panic!("expected the packing branch"),
        }
    }

    #[test]
    fn acyclic_immersion_cases() {
        let p2 = pattern_by_name("p2").unwrap();
        let out = hit_acyclic_immersion(&Tournament::transitive(8), &p2, 2, &cfg()).unwrap();
        assert!(out.is_packing());

        // Tiny host: the hitting branch returns all arcs, vacuously valid.
        let tt3 = pattern_by_name("tt3").unwrap();
        let t2 = Tournament::transitive(2);
        let out = hit_acyclic_immersion(&t2, &tt3, 1, &cfg()).unwrap();
        match &out.result {
            EpResult::Hitting(cert) => {
                assert_eq!(cert.elements.len(), t2.arc_count());
                assert_hitting_valid(&t2, &tt3, &out);
            }
            _ => panic!("expected hitting"),
        }

        // Arcless pattern: k identical vertex sets are arc-disjoint copies.
        let arcless = Pattern::new(3, &[]).unwrap();
        let out =
            hit_acyclic_immersion(&Tournament::transitive(5), &arcless, 4, &cfg()).unwrap();
        match &out.result {
            EpResult::Packing(cert) => assert_eq!(cert.models.len(), 4),
            _ => panic!("expected packing"),
        }
        let out =
            hit_acyclic_immersion(&Tournament::transitive(2), &arcless, 1, &cfg()).unwrap();
        match &out.result {
            EpResult::Hitting(cert) => assert!(cert.elements.is_empty()),
            _ => panic!("no copies fit, empty set hits"),
        }
    }

    #[test]
    fn acyclic_topminor_cases() {
        let p2 = pattern_by_name("p2").unwrap();
        let out = hit_acyclic_topminor(&Tournament::transitive(8), &p2, 2, &cfg()).unwrap();
        assert!(out.is_packing());

        let tt3 = pattern_by_name("tt3").unwrap();
        let t3 = Tournament::transitive(3);
        let out = hit_acyclic_topminor(&t3, &tt3, 2, &cfg()).unwrap();
        match &out.result {
            EpResult::Packing(_) => panic!("3 vertices cannot host 2 disjoint copies"),
            EpResult::Hitting(cert) => {
                assert_eq!(cert.elements.len(), 3);
                // Certificate size stays below the 2^order * k formula.
                let f = out.report.formula.as_ref().unwrap();
                assert!((cert.elements.len() as f64) <= f.value);
            }
        }

        let out = hit_acyclic_topminor(&Tournament::transitive(1), &p2, 1, &cfg()).unwrap();
        match &out.result {
            EpResult::Hitting(cert) => assert!(cert.elements.is_empty()),
            _ => panic!("expected the vacuous hitting branch"),
        }
    }

    #[test]
    fn dispatcher_examples() {
        let out = erdos_posa(
            &Tournament::c3(),
            &c3p(),
            1,
            ModelKind::Immersion,
            &cfg(),
        )
        .unwrap();
        assert!(out.is_packing());

        let out = erdos_posa(
            &two_c3_blocks(),
            &c3p(),
            3,
            ModelKind::Immersion,
            &cfg(),
        )
        .unwrap();
        assert!(!out.is_packing());

        let out = erdos_posa(
            &Tournament::transitive(8),
            &pattern_by_name("p2").unwrap(),
            2,
            ModelKind::TopMinor,
            &cfg(),
        )
        .unwrap();
        assert!(out.is_packing());

        assert!(erdos_posa(
            &Tournament::c3(),
            &c3p(),
            0,
            ModelKind::Immersion,
            &cfg()
        )
        .is_err());
    }

    #[test]
    fn dispatcher_outcomes_self_verify_on_seeded_instances() {
        for seed in 0..3u64 {
            let t = crate::gen::generate(9, seed, crate::gen::GenModel::Uniform);
            for name in ["c3", "digon", "c3-source"] {
                let p = pattern_by_name(name).unwrap();
                for k in [1usize, 2] {
                    for kind in [ModelKind::Immersion, ModelKind::TopMinor] {
                        let out = erdos_posa(&t, &p, k, kind, &cfg()).unwrap();
                        match &out.result {
                            EpResult::Packing(cert) => {
                                assert!(cert.models.len() >= k);
                                assert!(cert.audit(t.as_digraph(), &p).is_empty());
                            }
                            EpResult::Hitting(_) => assert_hitting_valid(&t, &p, &out),
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn prefix_packing_predicate_is_monotone() {
        let t = crate::gen::generate(8, 41, crate::gen::GenModel::Uniform);
        let p = c3p();
        let (sigma, _) = crate::layouts::cutwidth_exact(&t).unwrap();
        let mut seen_true = false;
        for alpha in 0..=t.n() {
            let verts = sigma.interval(0, alpha);
            let (sub, _) = t.restrict(&verts).unwrap();
            let r = pack_direct(
                sub.as_digraph(),
                &p,
                1,
                ModelKind::Immersion,
                Disjointness::Arc,
                &Budget::unlimited(),
            )
            .unwrap()
            .is_found();
            if seen_true {
                assert!(r, "predicate dropped back to false at alpha = {alpha}");
            }
            seen_true |= r;
        }
    }
}
