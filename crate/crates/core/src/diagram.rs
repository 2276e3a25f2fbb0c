//! Combinatorial fibration diagrams: regions labelled by fibre genera, fold
//! arcs, cusps, crossings of fold images and Lefschetz points, together with
//! vanishing cycles read in local reference fibres.
//!
//! Folds are oriented with the high-genus side on the left. A cusp then has
//! one incoming and one outgoing branch, and a crossing joins an incoming
//! strand to an outgoing one on each of its two branches. These rotation rules
//! stand in for an embedding of the critical image.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::homology::{CycleClass, SurfaceModel};
use crate::models::Chirality;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    pub id: String,
    /// Genera of the fibre components, sorted.
    pub fiber: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum End {
    Boundary,
    Cusp(String),
    Crossing(String),
}

impl End {
    fn cell(&self) -> Option<&str> {
        match self {
            End::Boundary => None,
            End::Cusp(k) | End::Crossing(k) => Some(k),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldArc {
    pub id: String,
    /// Start and end; `None` for a closed circle with no cusps or crossings.
    pub ends: Option<[End; 2]>,
    pub high: String,
    pub low: String,
    /// Vanishing cycle, read in the fibre over the high side.
    pub cycle: String,
    #[serde(default)]
    pub separating: bool,
}

impl FoldArc {
    pub fn is_closed(&self) -> bool {
        self.ends.is_none()
    }
}

fn unit_signs() -> [i64; 2] {
    [1, 1]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cusp {
    pub id: String,
    /// Incoming branch, then outgoing branch.
    pub arcs: [String; 2],
    /// Branch vanishing cycles in the fibre over the cusp interior.
    pub cycles: [String; 2],
    /// Orientations of the branch cycles used when the cusp is smoothed.
    #[serde(default = "unit_signs")]
    pub signs: [i64; 2],
    /// Counterclockwise position among the cells of the interior region.
    #[serde(default)]
    pub position: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Crossing {
    pub id: String,
    /// Two branches, each `[incoming arc, outgoing arc]`.
    pub strands: [[String; 2]; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LefschetzPoint {
    pub id: String,
    pub region: String,
    pub cycle: String,
    pub chirality: Chirality,
    #[serde(default)]
    pub position: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedCycle {
    pub surface: String,
    pub class: CycleClass,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Intersection {
    pub pair: [String; 2],
    pub count: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CycleConfig {
    /// Local reference surfaces by name.
    pub surfaces: BTreeMap<String, SurfaceModel>,
    pub cycles: BTreeMap<String, NamedCycle>,
    /// Declared geometric intersection numbers; symmetric by construction.
    #[serde(default)]
    pub geometric: Vec<Intersection>,
}

impl CycleConfig {
    pub fn geometric(&self, a: &str, b: &str) -> Option<u32> {
        self.geometric
            .iter()
            .find(|g| (g.pair[0] == a && g.pair[1] == b) || (g.pair[0] == b && g.pair[1] == a))
            .map(|g| g.count)
    }

    pub fn set_geometric(&mut self, a: &str, b: &str, count: u32) {
        if let Some(g) = self
            .geometric
            .iter_mut()
            .find(|g| (g.pair[0] == a && g.pair[1] == b) || (g.pair[0] == b && g.pair[1] == a))
        {
            g.count = count;
        } else {
            self.geometric.push(Intersection {
                pair: [a.to_string(), b.to_string()],
                count,
            });
        }
    }

    /// Algebraic intersection when both cycles live on the same surface.
    pub fn pairing(&self, a: &str, b: &str) -> Option<i64> {
        let ca = self.cycles.get(a)?;
        let cb = self.cycles.get(b)?;
        if ca.surface != cb.surface {
            return None;
        }
        self.surfaces
            .get(&ca.surface)?
            .pairing(&ca.class, &cb.class)
            .ok()
    }

    pub fn add_cycle(&mut self, name: &str, surface: &str, class: CycleClass) {
        self.cycles.insert(
            name.to_string(),
            NamedCycle {
                surface: surface.to_string(),
                class,
            },
        );
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FibrationDiagram {
    #[serde(default)]
    pub name: String,
    pub regions: Vec<Region>,
    #[serde(default)]
    pub arcs: Vec<FoldArc>,
    #[serde(default)]
    pub cusps: Vec<Cusp>,
    #[serde(default)]
    pub crossings: Vec<Crossing>,
    #[serde(default)]
    pub lefschetz: Vec<LefschetzPoint>,
    #[serde(default)]
    pub cycles: CycleConfig,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub rule: &'static str,
    pub cell: String,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}: {}", self.rule, self.cell, self.detail)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct CellCounts {
    pub regions: usize,
    pub arcs: usize,
    pub cusps: usize,
    pub crossings: usize,
    pub lefschetz: usize,
    /// Components of the critical image with no end on the boundary.
    pub closed_curves: usize,
    pub open_curves: usize,
}

/// Whether `low` is `high` surgered along one cycle.
pub fn surgery_consistent(high: &[u32], low: &[u32], separating: bool) -> bool {
    let mut target = low.to_vec();
    target.sort_unstable();
    for (i, &g) in high.iter().enumerate() {
        let rest = high
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &h)| h);
        if separating {
            for g1 in 1..g {
                let mut cand: Vec<u32> = rest.clone().chain([g1, g - g1]).collect();
                cand.sort_unstable();
                if cand == target {
                    return true;
                }
            }
        } else if g >= 1 {
            let mut cand: Vec<u32> = rest.chain([g - 1]).collect();
            cand.sort_unstable();
            if cand == target {
                return true;
            }
        }
    }
    false
}

impl FibrationDiagram {
    /// One region with a connected fibre of the given genus.
    pub fn trivial(genus: u32) -> FibrationDiagram {
        FibrationDiagram {
            name: format!("trivial genus {genus}"),
            regions: vec![Region {
                id: "r0".into(),
                fiber: vec![genus],
            }],
            arcs: Vec::new(),
            cusps: Vec::new(),
            crossings: Vec::new(),
            lefschetz: Vec::new(),
            cycles: CycleConfig::default(),
        }
    }

    pub fn region(&self, id: &str) -> Option<&Region> {
        self.regions.iter().find(|r| r.id == id)
    }

    pub fn arc(&self, id: &str) -> Option<&FoldArc> {
        self.arcs.iter().find(|a| a.id == id)
    }

    pub fn cusp(&self, id: &str) -> Option<&Cusp> {
        self.cusps.iter().find(|c| c.id == id)
    }

    pub fn crossing(&self, id: &str) -> Option<&Crossing> {
        self.crossings.iter().find(|c| c.id == id)
    }

    pub fn point(&self, id: &str) -> Option<&LefschetzPoint> {
        self.lefschetz.iter().find(|p| p.id == id)
    }

    pub(crate) fn all_ids(&self) -> impl Iterator<Item = &str> {
        self.regions
            .iter()
            .map(|r| r.id.as_str())
            .chain(self.arcs.iter().map(|a| a.id.as_str()))
            .chain(self.cusps.iter().map(|c| c.id.as_str()))
            .chain(self.crossings.iter().map(|c| c.id.as_str()))
            .chain(self.lefschetz.iter().map(|p| p.id.as_str()))
            .chain(self.cycles.cycles.keys().map(|k| k.as_str()))
            .chain(self.cycles.surfaces.keys().map(|k| k.as_str()))
    }

    /// `prefix` followed by the smallest integer not used by any id.
    pub fn fresh_id(&self, prefix: &str) -> String {
        let used: BTreeSet<&str> = self.all_ids().collect();
        (1..)
            .map(|n| format!("{prefix}{n}"))
            .find(|c| !used.contains(c.as_str()))
            .expect("unbounded range")
    }

    /// Arcs incident to each cusp or crossing: `(arc id, end index)`.
    fn incidences(&self) -> BTreeMap<&str, Vec<(&str, usize)>> {
        let mut out: BTreeMap<&str, Vec<(&str, usize)>> = BTreeMap::new();
        for a in &self.arcs {
            if let Some(ends) = &a.ends {
                for (i, e) in ends.iter().enumerate() {
                    if let Some(c) = e.cell() {
                        out.entry(c).or_default().push((a.id.as_str(), i));
                    }
                }
            }
        }
        out
    }

    /// Arc ids grouped into connected components of the critical image.
    pub fn curves(&self) -> Vec<Vec<String>> {
        let idx: BTreeMap<&str, usize> = self
            .arcs
            .iter()
            .enumerate()
            .map(|(i, a)| (a.id.as_str(), i))
            .collect();
        let mut parent: Vec<usize> = (0..self.arcs.len()).collect();
        fn find(p: &mut [usize], i: usize) -> usize {
            let mut r = i;
            while p[r] != r {
                r = p[r];
            }
            let mut j = i;
            while p[j] != r {
                let n = p[j];
                p[j] = r;
                j = n;
            }
            r
        }
        let mut union = |a: &str, b: &str| {
            if let (Some(&i), Some(&j)) = (idx.get(a), idx.get(b)) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri] = rj;
            }
        };
        for c in &self.cusps {
            union(&c.arcs[0], &c.arcs[1]);
        }
        for x in &self.crossings {
            for s in &x.strands {
                union(&s[0], &s[1]);
            }
        }
        let mut groups: BTreeMap<usize, Vec<String>> = BTreeMap::new();
        for i in 0..self.arcs.len() {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().push(self.arcs[i].id.clone());
        }
        groups.into_values().collect()
    }

    pub fn counts(&self) -> CellCounts {
        let mut closed = 0;
        let mut open = 0;
        for comp in self.curves() {
            let touches_boundary = comp.iter().any(|id| {
                self.arc(id)
                    .and_then(|a| a.ends.as_ref())
                    .is_some_and(|e| e.contains(&End::Boundary))
            });
            if touches_boundary {
                open += 1;
            } else {
                closed += 1;
            }
        }
        CellCounts {
            regions: self.regions.len(),
            arcs: self.arcs.len(),
            cusps: self.cusps.len(),
            crossings: self.crossings.len(),
            lefschetz: self.lefschetz.len(),
            closed_curves: closed,
            open_curves: open,
        }
    }

    /// Cycles referenced by some arc, cusp or point.
    pub fn referenced_cycles(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for a in &self.arcs {
            out.insert(a.cycle.clone());
        }
        for c in &self.cusps {
            out.extend(c.cycles.iter().cloned());
        }
        for p in &self.lefschetz {
            out.insert(p.cycle.clone());
        }
        out
    }
}

/// Every violated local rule; empty when the diagram is consistent.
pub fn validate(d: &FibrationDiagram) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut v = |rule: &'static str, cell: &str, detail: String| {
        out.push(Violation {
            rule,
            cell: cell.to_string(),
            detail,
        })
    };

    let mut seen = BTreeSet::new();
    for id in d
        .regions
        .iter()
        .map(|r| &r.id)
        .chain(d.arcs.iter().map(|a| &a.id))
        .chain(d.cusps.iter().map(|c| &c.id))
        .chain(d.crossings.iter().map(|c| &c.id))
        .chain(d.lefschetz.iter().map(|p| &p.id))
    {
        if !seen.insert(id.as_str()) {
            v("unique_id", id, "id used twice".into());
        }
    }

    for r in &d.regions {
        if r.fiber.is_empty() {
            v("region_fiber", &r.id, "empty fibre".into());
        }
    }

    let cfg = &d.cycles;
    for (name, c) in &cfg.cycles {
        match cfg.surfaces.get(&c.surface) {
            None => v(
                "cycle_class",
                name,
                format!("unknown surface {}", c.surface),
            ),
            Some(s) if s.rank() != c.class.0.len() => v(
                "cycle_class",
                name,
                format!(
                    "class has {} entries, surface rank {}",
                    c.class.0.len(),
                    s.rank()
                ),
            ),
            _ => {}
        }
    }
    for g in &cfg.geometric {
        if g.pair[0] == g.pair[1] {
            v(
                "pairing_bound",
                &g.pair[0],
                "self intersection declared".into(),
            );
            continue;
        }
        if let Some(p) = cfg.pairing(&g.pair[0], &g.pair[1]) {
            if p.unsigned_abs() > g.count as u64 {
                v(
                    "pairing_bound",
                    &format!("{}|{}", g.pair[0], g.pair[1]),
                    format!("|pairing| = {} exceeds geometric {}", p.abs(), g.count),
                );
            }
        }
    }
    let need_cycle = |name: &str| cfg.cycles.contains_key(name);

    for a in &d.arcs {
        let high = d.region(&a.high);
        let low = d.region(&a.low);
        if high.is_none() {
            v("dangling_ref", &a.id, format!("high region {}", a.high));
        }
        if low.is_none() {
            v("dangling_ref", &a.id, format!("low region {}", a.low));
        }
        if !need_cycle(&a.cycle) {
            v("dangling_ref", &a.id, format!("cycle {}", a.cycle));
        }
        if a.high == a.low {
            v("arc_sides", &a.id, "high and low side coincide".into());
        } else if let (Some(h), Some(l)) = (high, low) {
            if !surgery_consistent(&h.fiber, &l.fiber, a.separating) {
                v(
                    "fold_surgery",
                    &a.id,
                    format!(
                        "{:?} -> {:?} is not a surgery along one cycle",
                        h.fiber, l.fiber
                    ),
                );
            }
        }
        if let Some(ends) = &a.ends {
            for e in ends {
                let ok = match e {
                    End::Boundary => true,
                    End::Cusp(k) => d.cusp(k).is_some(),
                    End::Crossing(x) => d.crossing(x).is_some(),
                };
                if !ok {
                    v("dangling_ref", &a.id, format!("end {e:?}"));
                }
            }
        }
    }

    let inc = d.incidences();
    let empty = Vec::new();
    for c in &d.cusps {
        let here = inc.get(c.id.as_str()).unwrap_or(&empty);
        let mut got: Vec<(&str, usize)> = here.clone();
        got.sort();
        let mut want = vec![(c.arcs[0].as_str(), 1usize), (c.arcs[1].as_str(), 0usize)];
        want.sort();
        if here.len() != 2 {
            v(
                "cusp_incidence",
                &c.id,
                format!("{} arc ends, expected 2", here.len()),
            );
        } else if got != want {
            v(
                "cusp_rotation",
                &c.id,
                format!("expected {} in and {} out", c.arcs[0], c.arcs[1]),
            );
        }
        match (d.arc(&c.arcs[0]), d.arc(&c.arcs[1])) {
            (Some(a), Some(b)) => {
                if a.high != b.high || a.low != b.low {
                    v(
                        "cusp_sides",
                        &c.id,
                        "branches bound different regions".into(),
                    );
                }
            }
            _ => v("dangling_ref", &c.id, "missing branch arc".into()),
        }
        for name in &c.cycles {
            if !need_cycle(name) {
                v("dangling_ref", &c.id, format!("cycle {name}"));
            }
        }
        if cfg.geometric(&c.cycles[0], &c.cycles[1]) != Some(1) {
            v(
                "cusp_intersection",
                &c.id,
                format!(
                    "branch cycles {} and {} do not meet exactly once",
                    c.cycles[0], c.cycles[1]
                ),
            );
        }
    }

    for x in &d.crossings {
        let mut got = inc.get(x.id.as_str()).unwrap_or(&empty).clone();
        got.sort();
        let mut want: Vec<(&str, usize)> = x
            .strands
            .iter()
            .flat_map(|s| [(s[0].as_str(), 1usize), (s[1].as_str(), 0usize)])
            .collect();
        want.sort();
        if got != want {
            v(
                "crossing_incidence",
                &x.id,
                "arc ends do not match strands".into(),
            );
        }
    }

    for p in &d.lefschetz {
        if d.region(&p.region).is_none() {
            v("dangling_ref", &p.id, format!("region {}", p.region));
        }
        if !need_cycle(&p.cycle) {
            v("dangling_ref", &p.id, format!("cycle {}", p.cycle));
        }
    }
    out
}

/// Directed graph with labelled nodes and sets of edge labels.
struct LabeledGraph {
    labels: Vec<String>,
    edges: BTreeMap<(usize, usize), BTreeSet<String>>,
}

impl LabeledGraph {
    fn signature(&self, u: usize) -> Vec<String> {
        let mut sig = vec![self.labels[u].clone()];
        for ((a, b), ls) in &self.edges {
            for l in ls {
                if *a == u {
                    sig.push(format!(">{l}:{}", self.labels[*b]));
                }
                if *b == u {
                    sig.push(format!("<{l}:{}", self.labels[*a]));
                }
            }
        }
        sig.sort();
        sig
    }

    fn edge(&self, a: usize, b: usize) -> Option<&BTreeSet<String>> {
        self.edges.get(&(a, b))
    }
}

fn diagram_graph(d: &FibrationDiagram) -> LabeledGraph {
    let mut labels = Vec::new();
    let mut index: BTreeMap<(char, String), usize> = BTreeMap::new();
    let mut node = |kind: char, id: &str, label: String, labels: &mut Vec<String>| {
        index.insert((kind, id.to_string()), labels.len());
        labels.push(label);
    };
    for r in &d.regions {
        node('r', &r.id, format!("region{:?}", r.fiber), &mut labels);
    }
    for a in &d.arcs {
        let bounds = match &a.ends {
            None => "closed".to_string(),
            Some(e) => format!(
                "{}{}",
                (e[0] == End::Boundary) as u8,
                (e[1] == End::Boundary) as u8
            ),
        };
        node(
            'a',
            &a.id,
            format!("arc:{bounds}:{}", a.separating),
            &mut labels,
        );
    }
    for c in &d.cusps {
        node('k', &c.id, "cusp".into(), &mut labels);
    }
    for x in &d.crossings {
        node('x', &x.id, "crossing".into(), &mut labels);
        for i in 0..2 {
            node('s', &format!("{}#{i}", x.id), "strand".into(), &mut labels);
        }
    }
    for p in &d.lefschetz {
        node('p', &p.id, format!("point:{:?}", p.chirality), &mut labels);
    }
    let cycles = d.referenced_cycles();
    let mut surfaces = BTreeSet::new();
    for c in &cycles {
        let surf = d
            .cycles
            .cycles
            .get(c)
            .map(|n| n.surface.clone())
            .unwrap_or_default();
        node('c', c, "cycle".into(), &mut labels);
        surfaces.insert(surf);
    }
    for s in &surfaces {
        node('S', s, "surface".into(), &mut labels);
    }

    let mut edges: BTreeMap<(usize, usize), BTreeSet<String>> = BTreeMap::new();
    let mut add = |a: (char, &str), b: (char, &str), l: &str| {
        if let (Some(&i), Some(&j)) = (
            index.get(&(a.0, a.1.to_string())),
            index.get(&(b.0, b.1.to_string())),
        ) {
            edges.entry((i, j)).or_default().insert(l.to_string());
        }
    };
    for a in &d.arcs {
        add(('a', &a.id), ('r', &a.high), "high");
        add(('a', &a.id), ('r', &a.low), "low");
        add(('a', &a.id), ('c', &a.cycle), "cycle");
        if let Some(ends) = &a.ends {
            for (i, e) in ends.iter().enumerate() {
                let l = if i == 0 { "start" } else { "end" };
                match e {
                    End::Cusp(k) => add(('a', &a.id), ('k', k), l),
                    End::Crossing(x) => add(('a', &a.id), ('x', x), l),
                    End::Boundary => {}
                }
            }
        }
    }
    for c in &d.cusps {
        add(('k', &c.id), ('a', &c.arcs[0]), "in");
        add(('k', &c.id), ('a', &c.arcs[1]), "out");
        add(('k', &c.id), ('c', &c.cycles[0]), "cycle_in");
        add(('k', &c.id), ('c', &c.cycles[1]), "cycle_out");
    }
    for x in &d.crossings {
        for (i, s) in x.strands.iter().enumerate() {
            let sid = format!("{}#{i}", x.id);
            add(('x', &x.id), ('s', &sid), "strand");
            add(('s', &sid), ('a', &s[0]), "in");
            add(('s', &sid), ('a', &s[1]), "out");
        }
    }
    for p in &d.lefschetz {
        add(('p', &p.id), ('r', &p.region), "region");
        add(('p', &p.id), ('c', &p.cycle), "cycle");
    }
    let cyc: Vec<&String> = cycles.iter().collect();
    for (i, a) in cyc.iter().enumerate() {
        if let Some(n) = d.cycles.cycles.get(*a) {
            add(('c', a), ('S', &n.surface), "on");
        }
        for b in &cyc[i + 1..] {
            if let Some(p) = d.cycles.pairing(a, b) {
                let l = format!("pair{}", p.abs());
                add(('c', a), ('c', b), &l);
                add(('c', b), ('c', a), &l);
            }
            if let Some(g) = d.cycles.geometric(a, b) {
                let l = format!("geom{g}");
                add(('c', a), ('c', b), &l);
                add(('c', b), ('c', a), &l);
            }
        }
    }
    LabeledGraph { labels, edges }
}

/// Structural isomorphism: a bijection of all cells and referenced cycles
/// preserving incidences, fibres, chirality, surface membership, absolute
/// pairings and declared geometric intersections. Ids, positions and cusp
/// orientation signs are ignored.
pub fn isomorphic(d1: &FibrationDiagram, d2: &FibrationDiagram) -> bool {
    if d1.counts() != d2.counts() {
        return false;
    }
    let g1 = diagram_graph(d1);
    let g2 = diagram_graph(d2);
    let n = g1.labels.len();
    if n != g2.labels.len() {
        return false;
    }
    let s1: Vec<Vec<String>> = (0..n).map(|u| g1.signature(u)).collect();
    let s2: Vec<Vec<String>> = (0..n).map(|u| g2.signature(u)).collect();
    let mut m1 = s1.clone();
    let mut m2 = s2.clone();
    m1.sort();
    m2.sort();
    if m1 != m2 {
        return false;
    }
    let cands: Vec<Vec<usize>> = (0..n)
        .map(|u| (0..n).filter(|&v| s1[u] == s2[v]).collect())
        .collect();
    // Most constrained first, then grow along edges so checks bite early.
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    let adjacent = |u: usize, w: usize| g1.edge(u, w).is_some() || g1.edge(w, u).is_some();
    while order.len() < n {
        let next = (0..n)
            .filter(|&u| !placed[u])
            .max_by_key(|&u| {
                let links = order.iter().filter(|&&w| adjacent(u, w)).count();
                (
                    links,
                    std::cmp::Reverse(cands[u].len()),
                    std::cmp::Reverse(u),
                )
            })
            .expect("unplaced node");
        placed[next] = true;
        order.push(next);
    }
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn search(
        k: usize,
        order: &[usize],
        cands: &[Vec<usize>],
        g1: &LabeledGraph,
        g2: &LabeledGraph,
        map: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        if k == order.len() {
            return true;
        }
        let u = order[k];
        for &v in &cands[u] {
            if used[v] {
                continue;
            }
            let consistent = order[..k].iter().chain([&u]).all(|&w| {
                let fw = if w == u { v } else { map[w] };
                g1.edge(u, w) == g2.edge(v, fw) && g1.edge(w, u) == g2.edge(fw, v)
            });
            if !consistent {
                continue;
            }
            map[u] = v;
            used[v] = true;
            if search(k + 1, order, cands, g1, g2, map, used) {
                return true;
            }
            used[v] = false;
            map[u] = usize::MAX;
        }
        false
    }
    search(0, &order, &cands, &g1, &g2, &mut map, &mut used)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// A closed wrinkle with two cusps inside a genus-`g` region.
    fn wrinkle(g: u32) -> FibrationDiagram {
        let mut d = FibrationDiagram::trivial(g);
        d.regions.push(Region {
            id: "in".into(),
            fiber: vec![g + 1],
        });
        d.cycles.surfaces.insert("s".into(), SurfaceModel::torus());
        d.cycles.add_cycle("u", "s", CycleClass(vec![1, 0]));
        d.cycles.add_cycle("l", "s", CycleClass(vec![0, 1]));
        d.cycles.set_geometric("u", "l", 1);
        let arc = |id: &str, from: &str, to: &str, cyc: &str| FoldArc {
            id: id.into(),
            ends: Some([End::Cusp(from.into()), End::Cusp(to.into())]),
            high: "in".into(),
            low: "r0".into(),
            cycle: cyc.into(),
            separating: false,
        };
        d.arcs.push(arc("up", "ke", "kw", "u"));
        d.arcs.push(arc("down", "kw", "ke", "l"));
        let cusp = |id: &str, i: &str, o: &str, ci: &str, co: &str| Cusp {
            id: id.into(),
            arcs: [i.into(), o.into()],
            cycles: [ci.into(), co.into()],
            signs: [1, 1],
            position: 0,
        };
        d.cusps.push(cusp("kw", "up", "down", "u", "l"));
        d.cusps.push(cusp("ke", "down", "up", "l", "u"));
        d
    }

    fn relabel(d: &FibrationDiagram, tag: &str) -> FibrationDiagram {
        let s = serde_json::to_string(d).unwrap();
        let mut ids: Vec<String> = d.all_ids().map(String::from).collect();
        ids.sort_by_key(|s| std::cmp::Reverse(s.len()));
        let mut out = s;
        for id in ids {
            out = out.replace(&format!("\"{id}\""), &format!("\"{tag}{id}\""));
        }
        serde_json::from_str(&out).unwrap()
    }

    #[test]
    fn trivial_and_wrinkle_validate() {
        assert!(validate(&FibrationDiagram::trivial(2)).is_empty());
        let w = wrinkle(1);
        assert_eq!(validate(&w), vec![]);
        let c = w.counts();
        assert_eq!((c.cusps, c.closed_curves, c.open_curves), (2, 1, 0));
    }

    /// A single cusp whose branches run off the boundary.
    fn lone_cusp(g: u32, meet: u32) -> FibrationDiagram {
        let mut d = FibrationDiagram::trivial(g);
        d.regions.push(Region {
            id: "in".into(),
            fiber: vec![g + 1],
        });
        d.cycles.surfaces.insert("s".into(), SurfaceModel::torus());
        let second = if meet == 1 { vec![0, 1] } else { vec![1, 0] };
        d.cycles.add_cycle("u", "s", CycleClass(vec![1, 0]));
        d.cycles.add_cycle("v", "s", CycleClass(second));
        d.cycles.set_geometric("u", "v", meet);
        d.arcs.push(FoldArc {
            id: "left".into(),
            ends: Some([End::Boundary, End::Cusp("k".into())]),
            high: "in".into(),
            low: "r0".into(),
            cycle: "u".into(),
            separating: false,
        });
        d.arcs.push(FoldArc {
            id: "right".into(),
            ends: Some([End::Cusp("k".into()), End::Boundary]),
            high: "in".into(),
            low: "r0".into(),
            cycle: "v".into(),
            separating: false,
        });
        d.cusps.push(Cusp {
            id: "k".into(),
            arcs: ["left".into(), "right".into()],
            cycles: ["u".into(), "v".into()],
            signs: [1, 1],
            position: 0,
        });
        d
    }

    #[test]
    fn disjoint_cusp_cycles_violate() {
        assert!(validate(&lone_cusp(1, 1)).is_empty());
        let v = validate(&lone_cusp(1, 0));
        assert_eq!(v.len(), 1, "{v:?}");
        assert_eq!(v[0].rule, "cusp_intersection");
        let mut w = wrinkle(1);
        w.cycles.set_geometric("u", "l", 0);
        assert!(validate(&w).iter().any(|x| x.rule == "pairing_bound"));
    }

    #[test]
    fn fold_surgery_rules() {
        assert!(surgery_consistent(&[2], &[1], false));
        assert!(!surgery_consistent(&[2], &[2], false));
        assert!(surgery_consistent(&[3], &[1, 2], true));
        assert!(!surgery_consistent(&[3], &[0, 3], true));
        assert!(surgery_consistent(&[1, 2], &[1, 1], false));
        let mut w = wrinkle(1);
        w.regions[1].fiber = vec![3];
        assert!(validate(&w).iter().any(|v| v.rule == "fold_surgery"));
    }

    #[test]
    fn rotation_is_checked() {
        let mut w = wrinkle(1);
        w.cusps[0].arcs.swap(0, 1);
        assert!(validate(&w).iter().any(|v| v.rule == "cusp_rotation"));
    }

    #[test]
    fn pairing_bound() {
        let mut w = wrinkle(1);
        w.cycles.add_cycle("v", "s", CycleClass(vec![2, 0]));
        w.cycles.set_geometric("v", "l", 1);
        assert!(validate(&w).iter().any(|v| v.rule == "pairing_bound"));
    }

    #[test]
    fn isomorphism_basics() {
        let w = wrinkle(1);
        assert!(isomorphic(&w, &w));
        assert!(isomorphic(&w, &relabel(&w, "z_")));
        assert!(!isomorphic(&w, &wrinkle(2)));
        let mut p = FibrationDiagram::trivial(1);
        p.cycles.surfaces.insert("s".into(), SurfaceModel::torus());
        p.cycles.add_cycle("a", "s", CycleClass(vec![1, 0]));
        p.lefschetz.push(LefschetzPoint {
            id: "p".into(),
            region: "r0".into(),
            cycle: "a".into(),
            chirality: Chirality::Standard,
            position: 0,
        });
        assert!(validate(&p).is_empty());
        assert!(!isomorphic(&w, &p));
        let mut q = p.clone();
        q.lefschetz[0].chirality = Chirality::Achiral;
        assert!(!isomorphic(&p, &q));
    }

    #[test]
    fn json_round_trip() {
        let w = wrinkle(1);
        let s = serde_json::to_string(&w).unwrap();
        let back: FibrationDiagram = serde_json::from_str(&s).unwrap();
        assert_eq!(back, w);
    }
}
