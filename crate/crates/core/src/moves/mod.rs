//! Guarded rewrites of fibration diagrams and scripted sequences of them.
//!
//! Every rewrite keeps folds oriented with the high side on the left. A piece
//! that replaces the start of an arc takes over the outgoing slot at the cell
//! there; a piece that replaces the end takes over the incoming slot.

mod builtin;
pub mod checks;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use builtin::{builtin_script, BUILTIN_SCRIPTS};

use crate::diagram::{
    validate, CellCounts, Crossing, Cusp, End, FibrationDiagram, FoldArc, Intersection,
    LefschetzPoint, Region,
};
use crate::error::{Error, Result};
use crate::homology::{
    circle_parity_monodromy, CycleClass, MonodromyParity, SurfaceModel, TwistWord,
};
use crate::models::Chirality;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    Birth,
    InverseBirth,
    Merging,
    InverseMerging,
    Flipping,
    InverseFlipping,
    Wrinkling,
    InverseWrinkling,
    CuspSmoothing,
    AchiralCuspSmoothing,
    AchiralWrinkling,
    LegExchangeIsotopy,
    /// Push a cusp across a fold whose cycle is disjoint from both branch cycles.
    CuspArcIsotopy,
}

impl MoveKind {
    pub const ALL: [MoveKind; 13] = [
        MoveKind::Birth,
        MoveKind::InverseBirth,
        MoveKind::Merging,
        MoveKind::InverseMerging,
        MoveKind::Flipping,
        MoveKind::InverseFlipping,
        MoveKind::Wrinkling,
        MoveKind::InverseWrinkling,
        MoveKind::CuspSmoothing,
        MoveKind::AchiralCuspSmoothing,
        MoveKind::AchiralWrinkling,
        MoveKind::LegExchangeIsotopy,
        MoveKind::CuspArcIsotopy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MoveKind::Birth => "birth",
            MoveKind::InverseBirth => "inverse_birth",
            MoveKind::Merging => "merging",
            MoveKind::InverseMerging => "inverse_merging",
            MoveKind::Flipping => "flipping",
            MoveKind::InverseFlipping => "inverse_flipping",
            MoveKind::Wrinkling => "wrinkling",
            MoveKind::InverseWrinkling => "inverse_wrinkling",
            MoveKind::CuspSmoothing => "cusp_smoothing",
            MoveKind::AchiralCuspSmoothing => "achiral_cusp_smoothing",
            MoveKind::AchiralWrinkling => "achiral_wrinkling",
            MoveKind::LegExchangeIsotopy => "leg_exchange_isotopy",
            MoveKind::CuspArcIsotopy => "cusp_arc_isotopy",
        }
    }
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MoveKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<MoveKind> {
        MoveKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownId(s.to_string()))
    }
}

/// One rewrite request.
///
/// Cycle roles per kind: birth `upper`, `lower`; wrinkling `first`,
/// `second`, `third`; flipping `left`, `up`, `right`; smoothing `vanishing`,
/// `joined`; inverse flipping `joined`; inverse merging `top`, `bottom`;
/// inverse wrinkling `vanishing`. Birth and wrinkling always create their
/// cycles; the other roles reuse an existing cycle of that name if there is one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveSpec {
    pub kind: MoveKind,
    pub site: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub cycles: BTreeMap<String, String>,
    /// Intersection numbers declared after the rewrite.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub geometric: Vec<Intersection>,
    /// Cells carried into the face split off by merging or inverse merging.
    /// `None` keeps the face whole.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<Vec<String>>,
    /// Fibre component gaining genus when the fibre is disconnected.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub component: Option<usize>,
}

impl MoveSpec {
    pub fn new(kind: MoveKind, site: &[&str]) -> MoveSpec {
        MoveSpec {
            kind,
            site: site.iter().map(|s| s.to_string()).collect(),
            cycles: BTreeMap::new(),
            geometric: Vec::new(),
            split: None,
            component: None,
        }
    }

    pub fn cycle(mut self, role: &str, name: &str) -> MoveSpec {
        self.cycles.insert(role.into(), name.into());
        self
    }

    pub fn declare(mut self, a: &str, b: &str, count: u32) -> MoveSpec {
        self.geometric.push(Intersection {
            pair: [a.into(), b.into()],
            count,
        });
        self
    }

    pub fn split(mut self, cells: &[&str]) -> MoveSpec {
        self.split = Some(cells.iter().map(|s| s.to_string()).collect());
        self
    }
}

type Step<T> = std::result::Result<T, String>;

/// Diagram under construction plus the ids handed out so far.
struct Work {
    d: FibrationDiagram,
    used: BTreeSet<String>,
}

impl Work {
    fn new(d: &FibrationDiagram) -> Work {
        Work {
            used: d.all_ids().map(String::from).collect(),
            d: d.clone(),
        }
    }

    fn fresh(&mut self, prefix: &str) -> String {
        let id = (1..)
            .map(|n| format!("{prefix}{n}"))
            .find(|c| !self.used.contains(c))
            .expect("unbounded range");
        self.used.insert(id.clone());
        id
    }

    fn new_surface(&mut self, model: SurfaceModel) -> String {
        let id = self.fresh("S");
        self.d.cycles.surfaces.insert(id.clone(), model);
        id
    }

    fn drop_surface_if_unused(&mut self, surface: &str) {
        if !self.d.cycles.cycles.values().any(|c| c.surface == surface) {
            self.d.cycles.surfaces.remove(surface);
        }
    }

    /// A new cycle under the caller's name for `role`, or a fresh one.
    fn create_cycle(
        &mut self,
        m: &MoveSpec,
        role: &str,
        surface: &str,
        class: CycleClass,
    ) -> Step<String> {
        let name = match m.cycles.get(role) {
            Some(n) if self.d.cycles.cycles.contains_key(n) => {
                return Err(format!("cycle name {n} for role {role} is already in use"))
            }
            Some(n) => {
                self.used.insert(n.clone());
                n.clone()
            }
            None => self.fresh("c"),
        };
        self.d.cycles.add_cycle(&name, surface, class);
        Ok(name)
    }

    /// The existing cycle named for `role`, else a new one.
    fn cycle_or_create(
        &mut self,
        m: &MoveSpec,
        role: &str,
        surface: &str,
        class: CycleClass,
    ) -> Step<String> {
        match m.cycles.get(role) {
            Some(n) if self.d.cycles.cycles.contains_key(n) => Ok(n.clone()),
            _ => self.create_cycle(m, role, surface, class),
        }
    }

    /// An existing cycle named for `role`, or `default`.
    fn existing_cycle(&self, m: &MoveSpec, role: &str, default: &str) -> Step<String> {
        match m.cycles.get(role) {
            Some(n) if self.d.cycles.cycles.contains_key(n) => Ok(n.clone()),
            Some(n) => Err(format!("cycle {n} for role {role} does not exist")),
            None => Ok(default.to_string()),
        }
    }

    fn region(&self, id: &str) -> Step<Region> {
        self.d
            .region(id)
            .cloned()
            .ok_or_else(|| format!("no region {id}"))
    }

    fn arc(&self, id: &str) -> Step<FoldArc> {
        self.d
            .arc(id)
            .cloned()
            .ok_or_else(|| format!("no fold arc {id}"))
    }

    fn cusp(&self, id: &str) -> Step<Cusp> {
        self.d
            .cusp(id)
            .cloned()
            .ok_or_else(|| format!("no cusp {id}"))
    }

    fn remove_arcs(&mut self, ids: &[&str]) {
        self.d.arcs.retain(|a| !ids.contains(&a.id.as_str()));
    }

    fn remove_cusps(&mut self, ids: &[&str]) {
        self.d.cusps.retain(|c| !ids.contains(&c.id.as_str()));
    }

    fn remove_region(&mut self, id: &str) {
        self.d.regions.retain(|r| r.id != id);
    }

    /// Replace `old` by `new` in the slot it occupies at `end`.
    fn retarget(&mut self, end: &End, old: &str, new: &str, outgoing: bool) {
        let slot = usize::from(outgoing);
        match end {
            End::Boundary => {}
            End::Cusp(k) => {
                if let Some(c) = self.d.cusps.iter_mut().find(|c| &c.id == k) {
                    if c.arcs[slot] == old {
                        c.arcs[slot] = new.to_string();
                    }
                }
            }
            End::Crossing(x) => {
                if let Some(c) = self.d.crossings.iter_mut().find(|c| &c.id == x) {
                    if let Some(s) = c.strands.iter_mut().find(|s| s[slot] == old) {
                        s[slot] = new.to_string();
                    }
                }
            }
        }
    }

    fn rename_region(&mut self, from: &str, to: &str) {
        for a in &mut self.d.arcs {
            if a.high == from {
                a.high = to.to_string();
            }
            if a.low == from {
                a.low = to.to_string();
            }
        }
        for p in &mut self.d.lefschetz {
            if p.region == from {
                p.region = to.to_string();
            }
        }
    }

    fn touching(&self, region: &str) -> Vec<FoldArc> {
        self.d
            .arcs
            .iter()
            .filter(|a| a.high == region || a.low == region)
            .cloned()
            .collect()
    }

    fn points_in(&self, region: &str) -> usize {
        self.d
            .lefschetz
            .iter()
            .filter(|p| p.region == region)
            .count()
    }

    /// Move the listed arcs and points from face `from` to face `to`.
    fn carry(&mut self, cells: &[String], from: &str, to: &str, fixed: &[&str]) -> Step<()> {
        for c in cells {
            if fixed.contains(&c.as_str()) {
                return Err(format!("{c} cannot be carried into the split face"));
            }
            if let Some(a) = self.d.arcs.iter_mut().find(|a| &a.id == c) {
                if a.high != from && a.low != from {
                    return Err(format!("arc {c} does not border {from}"));
                }
                if a.high == from {
                    a.high = to.to_string();
                }
                if a.low == from {
                    a.low = to.to_string();
                }
            } else if let Some(p) = self.d.lefschetz.iter_mut().find(|p| &p.id == c) {
                if p.region != from {
                    return Err(format!("point {c} is not in {from}"));
                }
                p.region = to.to_string();
            } else {
                return Err(format!("{c} is not an arc or Lefschetz point"));
            }
        }
        Ok(())
    }
}

fn fold(id: &str, from: End, to: End, high: &str, low: &str, cycle: &str) -> FoldArc {
    FoldArc {
        id: id.to_string(),
        ends: Some([from, to]),
        high: high.to_string(),
        low: low.to_string(),
        cycle: cycle.to_string(),
        separating: false,
    }
}

fn cusp_cell(id: &str, arcs: [&str; 2], cycles: [&str; 2], signs: [i64; 2], position: u32) -> Cusp {
    Cusp {
        id: id.to_string(),
        arcs: arcs.map(String::from),
        cycles: cycles.map(String::from),
        signs,
        position,
    }
}

fn kc(id: &str) -> End {
    End::Cusp(id.to_string())
}

fn kx(id: &str) -> End {
    End::Crossing(id.to_string())
}

fn site<const N: usize>(m: &MoveSpec) -> Step<[&str; N]> {
    if m.site.len() != N {
        return Err(format!(
            "{} takes {N} site cell(s), got {}",
            m.kind,
            m.site.len()
        ));
    }
    Ok(std::array::from_fn(|i| m.site[i].as_str()))
}

fn ends_of(a: &FoldArc) -> Step<[End; 2]> {
    a.ends
        .clone()
        .ok_or_else(|| format!("arc {} is a closed circle", a.id))
}

fn raised(fiber: &[u32], component: Option<usize>) -> Step<Vec<u32>> {
    let i = component.unwrap_or(0);
    if i >= fiber.len() {
        return Err(format!("fibre {fiber:?} has no component {i}"));
    }
    let mut out = fiber.to_vec();
    out[i] += 1;
    out.sort_unstable();
    Ok(out)
}

fn birth(w: &mut Work, m: &MoveSpec) -> Step<()> {
    let [r] = site::<1>(m)?;
    let region = w.region(r)?;
    let fiber = raised(&region.fiber, m.component)?;
    let inner = w.fresh("r");
    let surf = w.new_surface(SurfaceModel::torus());
    let upper = w.create_cycle(m, "upper", &surf, CycleClass(vec![1, 0]))?;
    let lower = w.create_cycle(m, "lower", &surf, CycleClass(vec![0, 1]))?;
    w.d.cycles.set_geometric(&upper, &lower, 1);
    let (kw, ke) = (w.fresh("k"), w.fresh("k"));
    let (up, down) = (w.fresh("f"), w.fresh("f"));
    w.d.regions.push(Region {
        id: inner.clone(),
        fiber,
    });
    w.d.arcs
        .push(fold(&up, kc(&ke), kc(&kw), &inner, r, &upper));
    w.d.arcs
        .push(fold(&down, kc(&kw), kc(&ke), &inner, r, &lower));
    w.d.cusps
        .push(cusp_cell(&kw, [&up, &down], [&upper, &lower], [1, 1], 0));
    w.d.cusps
        .push(cusp_cell(&ke, [&down, &up], [&lower, &upper], [1, 1], 1));
    Ok(())
}

/// Arcs bounding `region`, required to be `n` folds with `region` on the high
/// side joined end to end through cusps only. Returns the arcs and the cusps.
fn cusped_cycle(w: &Work, region: &str, n: usize) -> Step<(Vec<FoldArc>, Vec<String>)> {
    let arcs = w.touching(region);
    if arcs.len() != n || arcs.iter().any(|a| a.high != region) {
        return Err(format!(
            "region {region} is not bounded by exactly {n} folds with it on the high side"
        ));
    }
    if w.points_in(region) > 0 {
        return Err(format!("region {region} contains Lefschetz points"));
    }
    let mut cusps = BTreeSet::new();
    for a in &arcs {
        for e in ends_of(a)? {
            match e {
                End::Cusp(k) => {
                    cusps.insert(k);
                }
                _ => return Err(format!("arc {} does not end at cusps", a.id)),
            }
        }
    }
    if cusps.len() != n {
        return Err(format!(
            "region {region} has {} cusps, expected {n}",
            cusps.len()
        ));
    }
    let ids: BTreeSet<&str> = arcs.iter().map(|a| a.id.as_str()).collect();
    for k in &cusps {
        let c = w.cusp(k)?;
        if !c.arcs.iter().all(|a| ids.contains(a.as_str())) {
            return Err(format!("cusp {k} has a branch outside region {region}"));
        }
    }
    let low = &arcs[0].low;
    if arcs.iter().any(|a| &a.low != low) {
        return Err(format!("region {region} borders several low regions"));
    }
    Ok((arcs, cusps.into_iter().collect()))
}

fn inverse_birth(w: &mut Work, m: &MoveSpec) -> Step<()> {
    let [r] = site::<1>(m)?;
    w.region(r)?;
    let (arcs, cusps) = cusped_cycle(w, r, 2)?;
    let ids: Vec<&str> = arcs.iter().map(|a| a.id.as_str()).collect();
    w.remove_arcs(&ids);
    let ks: Vec<&str> = cusps.iter().map(String::as_str).collect();
    w.remove_cusps(&ks);
    w.remove_region(r);
    Ok(())
}

fn wrinkling(w: &mut Work, m: &MoveSpec, chirality: Chirality) -> Step<()> {
    let [p] = site::<1>(m)?;
    let point =
        w.d.point(p)
            .cloned()
            .ok_or_else(|| format!("no Lefschetz point {p}"))?;
    if point.chirality != chirality {
        return Err(format!(
            "point {p} is {:?}, the move needs {:?}",
            point.chirality, chirality
        ));
    }
    let outer = point.region.clone();
    let fiber = raised(&w.region(&outer)?.fiber, m.component)?;
    let inner = w.fresh("r");
    let surf = w.new_surface(SurfaceModel::torus2p());
    let first = w.create_cycle(m, "first", &surf, CycleClass(vec![1, 0, 0]))?;
    let second = w.create_cycle(m, "second", &surf, CycleClass(vec![0, 1, 0]))?;
    let third = w.create_cycle(m, "third", &surf, CycleClass(vec![0, 1, 1]))?;
    for (a, b) in [(&first, &second), (&second, &third), (&third, &first)] {
        w.d.cycles.set_geometric(a, b, 1);
    }
    let k: Vec<String> = (0..3).map(|_| w.fresh("k")).collect();
    let f: Vec<String> = (0..3).map(|_| w.fresh("f")).collect();
    w.d.regions.push(Region {
        id: inner.clone(),
        fiber,
    });
    w.d.arcs
        .push(fold(&f[0], kc(&k[2]), kc(&k[0]), &inner, &outer, &first));
    w.d.arcs
        .push(fold(&f[1], kc(&k[0]), kc(&k[1]), &inner, &outer, &second));
    w.d.arcs
        .push(fold(&f[2], kc(&k[1]), kc(&k[2]), &inner, &outer, &third));
    // The mirror image runs through the same cusps in the opposite order.
    let pos = match chirality {
        Chirality::Standard => [0, 1, 2],
        Chirality::Achiral => [2, 1, 0],
    };
    w.d.cusps.push(cusp_cell(
        &k[0],
        [&f[0], &f[1]],
        [&first, &second],
        [1, 1],
        pos[0],
    ));
    w.d.cusps.push(cusp_cell(
        &k[1],
        [&f[1], &f[2]],
        [&second, &third],
        [1, 1],
        pos[1],
    ));
    w.d.cusps.push(cusp_cell(
        &k[2],
        [&f[2], &f[0]],
        [&third, &first],
        [1, -1],
        pos[2],
    ));
    w.d.lefschetz.retain(|q| q.id != p);
    Ok(())
}

fn inverse_wrinkling(w: &mut Work, m: &MoveSpec) -> Step<()> {
    let [r] = site::<1>(m)?;
    w.region(r)?;
    let (arcs, cusps) = cusped_cycle(w, r, 3)?;
    let outer = arcs[0].low.clone();
    let vanishing = match m.cycles.get("vanishing") {
        Some(n) if w.d.cycles.cycles.contains_key(n) => n.clone(),
        _ => {
            let surf = w.new_surface(SurfaceModel::torus());
            w.create_cycle(m, "vanishing", &surf, CycleClass(vec![1, 0]))?
        }
    };
    let ids: Vec<&str> = arcs.iter().map(|a| a.id.as_str()).collect();
    w.remove_arcs(&ids);
    let ks: Vec<&str> = cusps.iter().map(String::as_str).collect();
    w.remove_cusps(&ks);
    w.remove_region(r);
    let id = w.fresh("p");
    w.d.lefschetz.push(LefschetzPoint {
        id,
        region: outer,
        cycle: vanishing,
        chirality: Chirality::Standard,
        position: 0,
    });
    Ok(())
}

fn cusp_smoothing(w: &mut Work, m: &MoveSpec, chirality: Chirality) -> Step<()> {
    let [k] = site::<1>(m)?;
    let c = w.cusp(k)?;
    let inn = w.arc(&c.arcs[0])?;
    let out = w.arc(&c.arcs[1])?;
    let vanishing = match m.cycles.get("vanishing") {
        Some(n) if w.d.cycles.cycles.contains_key(n) => n.clone(),
        _ => {
            let x = &w.d.cycles.cycles[&c.cycles[0]];
            let y = &w.d.cycles.cycles[&c.cycles[1]];
            if x.surface != y.surface {
                return Err(format!(
                    "branch cycles of {k} live on different surfaces; name the vanishing cycle"
                ));
            }
            let sign = match chirality {
                Chirality::Standard => -1,
                Chirality::Achiral => 1,
            };
            let class = CycleClass(
                x.class
                    .0
                    .iter()
                    .zip(&y.class.0)
                    .map(|(a, b)| c.signs[0] * a + sign * c.signs[1] * b)
                    .collect(),
            );
            if class.is_zero() {
                return Err(format!("vanishing class at {k} is zero"));
            }
            let surface = x.surface.clone();
            let name = w.create_cycle(m, "vanishing", &surface, class)?;
            w.d.cycles.set_geometric(&name, &c.cycles[0], 1);
            w.d.cycles.set_geometric(&name, &c.cycles[1], 1);
            name
        }
    };
    let cycle = w.existing_cycle(m, "joined", &inn.cycle)?;
    let j = w.fresh("f");
    let ends = if inn.id == out.id {
        None
    } else {
        let (ie, oe) = (ends_of(&inn)?, ends_of(&out)?);
        w.retarget(&ie[0], &inn.id, &j, true);
        w.retarget(&oe[1], &out.id, &j, false);
        Some([ie[0].clone(), oe[1].clone()])
    };
    w.remove_arcs(&[&inn.id, &out.id]);
    w.remove_cusps(&[k]);
    w.d.arcs.push(FoldArc {
        id: j,
        ends,
        high: inn.high.clone(),
        low: inn.low.clone(),
        cycle,
        separating: inn.separating,
    });
    let id = w.fresh("p");
    w.d.lefschetz.push(LefschetzPoint {
        id,
        region: inn.high,
        cycle: vanishing,
        chirality,
        position: c.position,
    });
    Ok(())
}

fn merging(w: &mut Work, m: &MoveSpec) -> Step<()> {
    let [s1, s2] = site::<2>(m)?;
    if s1 == s2 {
        return Err("merging needs two distinct arcs".into());
    }
    let a1 = w.arc(s1)?;
    let a2 = w.arc(s2)?;
    if a1.high != a2.high {
        return Err(format!("{s1} and {s2} do not share their high side"));
    }
    let (c1, c2) = (a1.cycle.clone(), a2.cycle.clone());
    if w.d.cycles.geometric(&c1, &c2) != Some(1) {
        return Err(format!(
            "cycles {c1} and {c2} are not declared to meet once"
        ));
    }
    let (up, down) = (a1.low.clone(), a2.low.clone());
    if up != down && w.region(&up)?.fiber != w.region(&down)?.fiber {
        return Err(format!(
            "low regions {up} and {down} carry different fibres"
        ));
    }
    if m.split.is_some() && (a1.is_closed() || a2.is_closed()) {
        return Err("a closed circle cannot split the middle face".into());
    }
    let middle = a1.high.clone();
    let (ke, kw) = (w.fresh("k"), w.fresh("k"));
    w.remove_arcs(&[s1, s2]);
    let (a1e, a1w) = match &a1.ends {
        None => {
            let id = w.fresh("f");
            w.d.arcs.push(FoldArc {
                ends: Some([kc(&kw), kc(&ke)]),
                id: id.clone(),
                ..a1.clone()
            });
            (id.clone(), id)
        }
        Some([e0, e1]) => {
            let (east, west) = (w.fresh("f"), w.fresh("f"));
            w.retarget(e0, s1, &east, true);
            w.retarget(e1, s1, &west, false);
            w.d.arcs.push(FoldArc {
                ends: Some([e0.clone(), kc(&ke)]),
                id: east.clone(),
                ..a1.clone()
            });
            w.d.arcs.push(FoldArc {
                ends: Some([kc(&kw), e1.clone()]),
                id: west.clone(),
                ..a1.clone()
            });
            (east, west)
        }
    };
    let (a2w, a2e) = match &a2.ends {
        None => {
            let id = w.fresh("f");
            w.d.arcs.push(FoldArc {
                ends: Some([kc(&ke), kc(&kw)]),
                id: id.clone(),
                ..a2.clone()
            });
            (id.clone(), id)
        }
        Some([e0, e1]) => {
            let (west, east) = (w.fresh("f"), w.fresh("f"));
            w.retarget(e0, s2, &west, true);
            w.retarget(e1, s2, &east, false);
            w.d.arcs.push(FoldArc {
                ends: Some([e0.clone(), kc(&kw)]),
                id: west.clone(),
                ..a2.clone()
            });
            w.d.arcs.push(FoldArc {
                ends: Some([kc(&ke), e1.clone()]),
                id: east.clone(),
                ..a2.clone()
            });
            (west, east)
        }
    };
    w.d.cusps
        .push(cusp_cell(&ke, [&a1e, &a2e], [&c1, &c2], [1, 1], 0));
    w.d.cusps
        .push(cusp_cell(&kw, [&a2w, &a1w], [&c2, &c1], [1, 1], 0));
    if up != down {
        w.rename_region(&down, &up);
        w.remove_region(&down);
    }
    if let Some(cells) = &m.split {
        let east = w.fresh("r");
        let fiber = w.region(&middle)?.fiber;
        w.d.regions.push(Region {
            id: east.clone(),
            fiber,
        });
        for a in w.d.arcs.iter_mut() {
            if a.id == a1e || a.id == a2e {
                a.high = east.clone();
            }
        }
        w.carry(cells, &middle, &east, &[&a1e, &a1w, &a2e, &a2w])?;
    }
    Ok(())
}

fn inverse_merging(w: &mut Work, m: &MoveSpec) -> Step<()> {
    let [kw, ke] = site::<2>(m)?;
    if kw == ke {
        return Err("inverse merging needs two distinct cusps".into());
    }
    let cw = w.cusp(kw)?;
    let ce = w.cusp(ke)?;
    if cw.arcs[0] == cw.arcs[1] || ce.arcs[0] == ce.arcs[1] {
        return Err("a cusp closing a loop on itself cannot be merged".into());
    }
    let (xi, xo) = (w.arc(&cw.arcs[0])?, w.arc(&cw.arcs[1])?);
    let (yi, yo) = (w.arc(&ce.arcs[0])?, w.arc(&ce.arcs[1])?);
    let low = xi.low.clone();
    if [&xo, &yi, &yo].iter().any(|a| a.low != low) {
        return Err(format!("cusps {kw} and {ke} do not face across one region"));
    }
    let (hw, he) = (xi.high.clone(), yi.high.clone());
    if w.region(&hw)?.fiber != w.region(&he)?.fiber {
        return Err("the two cusp interiors carry different fibres".into());
    }
    if w.region(&low)?.fiber.len() != 1 {
        return Err(format!(
            "fibre over the middle region {low} is disconnected"
        ));
    }
    let top_cycle = w.existing_cycle(m, "top", &xo.cycle)?;
    let bottom_cycle = w.existing_cycle(m, "bottom", &xi.cycle)?;
    let (top, bottom) = (w.fresh("f"), w.fresh("f"));
    let top_ends = if xo.id == yi.id {
        None
    } else {
        let (s, e) = (ends_of(&yi)?[0].clone(), ends_of(&xo)?[1].clone());
        w.retarget(&s, &yi.id, &top, true);
        w.retarget(&e, &xo.id, &top, false);
        Some([s, e])
    };
    let bottom_ends = if xi.id == yo.id {
        None
    } else {
        let (s, e) = (ends_of(&xi)?[0].clone(), ends_of(&yo)?[1].clone());
        w.retarget(&s, &xi.id, &bottom, true);
        w.retarget(&e, &yo.id, &bottom, false);
        Some([s, e])
    };
    w.remove_arcs(&[&xi.id, &xo.id, &yi.id, &yo.id]);
    w.remove_cusps(&[kw, ke]);
    if he != hw {
        w.rename_region(&he, &hw);
        w.remove_region(&he);
    }
    w.d.arcs.push(FoldArc {
        id: top.clone(),
        ends: top_ends,
        high: hw.clone(),
        low: low.clone(),
        cycle: top_cycle,
        separating: xo.separating,
    });
    w.d.arcs.push(FoldArc {
        id: bottom.clone(),
        ends: bottom_ends,
        high: hw,
        low: low.clone(),
        cycle: bottom_cycle,
        separating: xi.separating,
    });
    if let Some(cells) = &m.split {
        let lower = w.fresh("r");
        let fiber = w.region(&low)?.fiber;
        w.d.regions.push(Region {
            id: lower.clone(),
            fiber,
        });
        if let Some(b) = w.d.arcs.iter_mut().find(|a| a.id == bottom) {
            b.low = lower.clone();
        }
        w.carry(cells, &low, &lower, &[&top, &bottom])?;
    }
    Ok(())
}

fn flipping(w: &mut Work, m: &MoveSpec) -> Step<()> {
    let [s] = site::<1>(m)?;
    let arc = w.arc(s)?;
    let high = arc.high.clone();
    let fiber = raised(&w.region(&high)?.fiber, m.component)?;
    let surf = w.new_surface(SurfaceModel::torus2p());
    let left = w.cycle_or_create(m, "left", &surf, CycleClass(vec![1, 0, 0]))?;
    let up = w.cycle_or_create(m, "up", &surf, CycleClass(vec![0, 1, 0]))?;
    let right = w.cycle_or_create(m, "right", &surf, CycleClass(vec![0, 0, 1]))?;
    w.drop_surface_if_unused(&surf);
    let cfg = &w.d.cycles;
    let (Some(lu), Some(ur), Some(lr)) = (
        cfg.pairing(&left, &up),
        cfg.pairing(&up, &right),
        cfg.pairing(&left, &right),
    ) else {
        return Err("flip cycles must share one reference surface".into());
    };
    let (cl, cr) = (&cfg.cycles[&left].class, &cfg.cycles[&right].class);
    if lu.abs() != 1 || ur.abs() != 1 || lr != 0 || cl == cr || *cl == cr.neg() {
        return Err(format!(
            "cycles {left}, {up}, {right} are not in flip position (pairings {lu}, {ur}, {lr})"
        ));
    }
    for (a, b, n) in [(&left, &up, 1), (&up, &right, 1), (&left, &right, 0)] {
        match w.d.cycles.geometric(a, b) {
            Some(g) if g != n => {
                return Err(format!(
                    "{a} and {b} are declared to meet {g} times, not {n}"
                ))
            }
            _ => w.d.cycles.set_geometric(a, b, n),
        }
    }
    let inner = w.fresh("r");
    let x = w.fresh("x");
    let (k1, k2) = (w.fresh("k"), w.fresh("k"));
    let (p2, q, r2) = (w.fresh("f"), w.fresh("f"), w.fresh("f"));
    w.d.regions.push(Region {
        id: inner.clone(),
        fiber,
    });
    w.remove_arcs(&[s]);
    let strands = match &arc.ends {
        None => {
            let o = w.fresh("f");
            w.d.arcs.push(FoldArc {
                id: o.clone(),
                ends: Some([kx(&x), kx(&x)]),
                ..arc.clone()
            });
            [[o.clone(), p2.clone()], [r2.clone(), o]]
        }
        Some([e0, e1]) => {
            let (p1, r1) = (w.fresh("f"), w.fresh("f"));
            w.retarget(e0, s, &p1, true);
            w.retarget(e1, s, &r1, false);
            w.d.arcs.push(FoldArc {
                id: p1.clone(),
                ends: Some([e0.clone(), kx(&x)]),
                ..arc.clone()
            });
            w.d.arcs.push(FoldArc {
                id: r1.clone(),
                ends: Some([kx(&x), e1.clone()]),
                ..arc.clone()
            });
            [[p1, p2.clone()], [r2.clone(), r1]]
        }
    };
    w.d.crossings.push(Crossing {
        id: x.clone(),
        strands,
    });
    w.d.arcs
        .push(fold(&p2, kx(&x), kc(&k1), &inner, &high, &left));
    w.d.arcs
        .push(fold(&q, kc(&k1), kc(&k2), &inner, &high, &up));
    w.d.arcs
        .push(fold(&r2, kc(&k2), kx(&x), &inner, &high, &right));
    // Signs chosen so the smoothed cusps vanish along left+up and right-up.
    w.d.cusps
        .push(cusp_cell(&k1, [&p2, &q], [&left, &up], [1, -1], 0));
    w.d.cusps
        .push(cusp_cell(&k2, [&q, &r2], [&up, &right], [-1, -1], 1));
    Ok(())
}

fn inverse_flipping(w: &mut Work, m: &MoveSpec) -> Step<()> {
    let [k1, k2] = site::<2>(m)?;
    let c1 = w.cusp(k1)?;
    let c2 = w.cusp(k2)?;
    if k1 == k2 || c1.arcs[1] != c2.arcs[0] {
        return Err(format!(
            "{k1} and {k2} are not consecutive cusps on one branch"
        ));
    }
    let (p2, q, r2) = (
        w.arc(&c1.arcs[0])?,
        w.arc(&c1.arcs[1])?,
        w.arc(&c2.arcs[1])?,
    );
    if p2.id == q.id || r2.id == q.id || p2.id == r2.id {
        return Err("the cusps do not bound a triangle".into());
    }
    let x = match (&ends_of(&p2)?[0], &ends_of(&r2)?[1]) {
        (End::Crossing(a), End::Crossing(b)) if a == b => a.clone(),
        _ => return Err("the outer branches do not meet at one crossing".into()),
    };
    let cross =
        w.d.crossing(&x)
            .cloned()
            .ok_or_else(|| format!("no crossing {x}"))?;
    let sp = cross.strands.iter().position(|s| s[1] == p2.id);
    let sr = cross.strands.iter().position(|s| s[0] == r2.id);
    let (Some(sp), Some(sr)) = (sp, sr) else {
        return Err(format!("crossing {x} does not carry the triangle sides"));
    };
    if sp == sr {
        return Err(format!("the triangle sides form one strand at {x}"));
    }
    let p1 = w.arc(&cross.strands[sp][0])?;
    let r1 = w.arc(&cross.strands[sr][1])?;
    let inner = q.high.clone();
    let sides = [p2.id.as_str(), q.id.as_str(), r2.id.as_str()];
    if sides.contains(&p1.id.as_str()) || sides.contains(&r1.id.as_str()) {
        return Err("the legs run back into the triangle".into());
    }
    if w.touching(&inner)
        .iter()
        .any(|a| !sides.contains(&a.id.as_str()))
    {
        return Err(format!("triangle region {inner} borders other folds"));
    }
    if w.points_in(&inner) > 0 {
        return Err(format!("triangle region {inner} contains Lefschetz points"));
    }
    let outer = p2.low.clone();
    if p1.high != outer || r1.high != outer || p1.low != r1.low {
        return Err("the legs do not separate the same pair of regions".into());
    }
    let (a, b, c) = (&p2.cycle, &q.cycle, &r2.cycle);
    let cfg = &w.d.cycles;
    if cfg.geometric(a, b) != Some(1) || cfg.geometric(b, c) != Some(1) {
        return Err(format!("{b} must meet both {a} and {c} once"));
    }
    if a == c || cfg.geometric(a, c) != Some(0) || cfg.pairing(a, c).is_some_and(|p| p != 0) {
        return Err(format!("{a} and {c} must be disjoint and distinct"));
    }
    if let (Some(ca), Some(cc)) = (cfg.cycles.get(a), cfg.cycles.get(c)) {
        if ca.surface == cc.surface && (ca.class == cc.class || ca.class == cc.class.neg()) {
            return Err(format!("{a} and {c} are homologous"));
        }
    }
    let cycle = w.existing_cycle(m, "joined", &p1.cycle)?;
    let j = w.fresh("f");
    let ends = if p1.id == r1.id {
        None
    } else {
        let (s, e) = (ends_of(&p1)?[0].clone(), ends_of(&r1)?[1].clone());
        w.retarget(&s, &p1.id, &j, true);
        w.retarget(&e, &r1.id, &j, false);
        Some([s, e])
    };
    w.remove_arcs(&[&p1.id, &r1.id, &p2.id, &q.id, &r2.id]);
    w.remove_cusps(&[k1, k2]);
    w.d.crossings.retain(|c| c.id != x);
    w.remove_region(&inner);
    w.d.arcs.push(FoldArc {
        id: j,
        ends,
        cycle,
        ..p1
    });
    Ok(())
}

fn cusp_arc_isotopy(w: &mut Work, m: &MoveSpec) -> Step<()> {
    let [k, f] = site::<2>(m)?;
    let c = w.cusp(k)?;
    let (ain, aout) = (w.arc(&c.arcs[0])?, w.arc(&c.arcs[1])?);
    let arc = w.arc(f)?;
    if ain.id == aout.id || arc.id == ain.id || arc.id == aout.id {
        return Err("the cusp must be pushed across a different fold".into());
    }
    let (inner, outer) = (ain.high.clone(), ain.low.clone());
    if arc.high != outer {
        return Err(format!("cusp {k} does not sit on the high side of {f}"));
    }
    if arc.separating {
        return Err("pushing a cusp across a separating fold is not modelled".into());
    }
    for b in &c.cycles {
        if w.d.cycles.geometric(b, &arc.cycle) != Some(0) {
            return Err(format!("{b} is not declared disjoint from {}", arc.cycle));
        }
    }
    let below = arc.low.clone();
    let tip = w.fresh("r");
    let fiber = w.region(&outer)?.fiber;
    w.d.regions.push(Region {
        id: tip.clone(),
        fiber,
    });
    let (x1, x2) = (w.fresh("x"), w.fresh("x"));
    let (a2, a1, b1, b2) = (w.fresh("f"), w.fresh("f"), w.fresh("f"), w.fresh("f"));
    let mid = w.fresh("f");
    let (ie, oe) = (ends_of(&ain)?, ends_of(&aout)?);
    w.remove_arcs(&[&ain.id, &aout.id, f]);
    w.retarget(&ie[0], &ain.id, &a2, true);
    w.retarget(&oe[1], &aout.id, &b2, false);
    w.d.arcs.push(fold(
        &a2,
        ie[0].clone(),
        kx(&x1),
        &inner,
        &outer,
        &ain.cycle,
    ));
    w.d.arcs
        .push(fold(&a1, kx(&x1), kc(k), &tip, &below, &ain.cycle));
    w.d.arcs
        .push(fold(&b1, kc(k), kx(&x2), &tip, &below, &aout.cycle));
    w.d.arcs.push(fold(
        &b2,
        kx(&x2),
        oe[1].clone(),
        &inner,
        &outer,
        &aout.cycle,
    ));
    w.d.arcs
        .push(fold(&mid, kx(&x1), kx(&x2), &inner, &tip, &arc.cycle));
    let (before, after) = match &arc.ends {
        None => {
            let rest = w.fresh("f");
            w.d.arcs.push(FoldArc {
                id: rest.clone(),
                ends: Some([kx(&x2), kx(&x1)]),
                ..arc.clone()
            });
            (rest.clone(), rest)
        }
        Some([e0, e1]) => {
            let (f1, f3) = (w.fresh("f"), w.fresh("f"));
            w.retarget(e0, f, &f1, true);
            w.retarget(e1, f, &f3, false);
            w.d.arcs.push(FoldArc {
                id: f1.clone(),
                ends: Some([e0.clone(), kx(&x1)]),
                ..arc.clone()
            });
            w.d.arcs.push(FoldArc {
                id: f3.clone(),
                ends: Some([kx(&x2), e1.clone()]),
                ..arc.clone()
            });
            (f1, f3)
        }
    };
    w.d.crossings.push(Crossing {
        id: x1,
        strands: [[before, mid.clone()], [a2, a1.clone()]],
    });
    w.d.crossings.push(Crossing {
        id: x2,
        strands: [[mid, after], [b1.clone(), b2]],
    });
    if let Some(cc) = w.d.cusps.iter_mut().find(|cc| cc.id == k) {
        cc.arcs = [a1, b1];
    }
    Ok(())
}

fn leg_exchange(w: &mut Work, m: &MoveSpec) -> Step<()> {
    let [sa, sb] = site::<2>(m)?;
    let a = w.arc(sa)?;
    let b = w.arc(sb)?;
    if sa == sb {
        return Err("leg exchange needs two legs".into());
    }
    let (ea, eb) = (ends_of(&a)?, ends_of(&b)?);
    let (x1, x2) = match (&ea[0], &ea[1], &eb[0], &eb[1]) {
        (End::Crossing(p), End::Crossing(q), End::Crossing(r), End::Crossing(s))
            if q == r && s == p && p != q =>
        {
            (p.clone(), q.clone())
        }
        _ => {
            return Err(
                "legs must run between the same two crossings in opposite directions".into(),
            )
        }
    };
    if a.low != b.low {
        return Err("legs do not share their low side".into());
    }
    let strip = a.low.clone();
    if w.touching(&strip).iter().any(|f| f.id != sa && f.id != sb) || w.points_in(&strip) > 0 {
        return Err(format!("region {strip} is not a strip between the legs"));
    }
    if !a.separating {
        return Err(format!(
            "the first leg {sa} must vanish along a separating cycle"
        ));
    }
    let above = w.region(&a.high)?.fiber;
    if w.region(&b.high)?.fiber != above {
        return Err("the two sides beyond the legs carry different fibres".into());
    }
    if w.region(&strip)?.fiber.len() < 2 {
        return Err(format!("fibre over {strip} is already connected"));
    }
    let fiber = raised(&above, m.component)?;
    let swap = |w: &mut Work, x: &str, incoming: &str, outgoing: &str| -> Step<()> {
        let cr =
            w.d.crossings
                .iter_mut()
                .find(|c| c.id == x)
                .ok_or_else(|| format!("no crossing {x}"))?;
        let i = cr.strands.iter().position(|s| s[0] == incoming);
        let o = cr.strands.iter().position(|s| s[1] == outgoing);
        match (i, o) {
            (Some(i), Some(o)) if i != o => {
                cr.strands[i][0] = outgoing.to_string();
                cr.strands[o][1] = incoming.to_string();
                Ok(())
            }
            _ => Err(format!("legs close up on themselves at {x}")),
        }
    };
    swap(w, &x1, sb, sa)?;
    swap(w, &x2, sa, sb)?;
    for f in w.d.arcs.iter_mut() {
        if f.id == sa || f.id == sb {
            let old_high = std::mem::replace(&mut f.high, strip.clone());
            f.low = old_high;
            f.separating = false;
            if let Some(e) = f.ends.as_mut() {
                e.swap(0, 1);
            }
        }
    }
    if let Some(r) = w.d.regions.iter_mut().find(|r| r.id == strip) {
        r.fiber = fiber;
    }
    Ok(())
}

fn rewrite(d: &FibrationDiagram, m: &MoveSpec) -> Step<FibrationDiagram> {
    let mut w = Work::new(d);
    match m.kind {
        MoveKind::Birth => birth(&mut w, m)?,
        MoveKind::InverseBirth => inverse_birth(&mut w, m)?,
        MoveKind::Merging => merging(&mut w, m)?,
        MoveKind::InverseMerging => inverse_merging(&mut w, m)?,
        MoveKind::Flipping => flipping(&mut w, m)?,
        MoveKind::InverseFlipping => inverse_flipping(&mut w, m)?,
        MoveKind::Wrinkling => wrinkling(&mut w, m, Chirality::Standard)?,
        MoveKind::AchiralWrinkling => wrinkling(&mut w, m, Chirality::Achiral)?,
        MoveKind::InverseWrinkling => inverse_wrinkling(&mut w, m)?,
        MoveKind::CuspSmoothing => cusp_smoothing(&mut w, m, Chirality::Standard)?,
        MoveKind::AchiralCuspSmoothing => cusp_smoothing(&mut w, m, Chirality::Achiral)?,
        MoveKind::LegExchangeIsotopy => leg_exchange(&mut w, m)?,
        MoveKind::CuspArcIsotopy => cusp_arc_isotopy(&mut w, m)?,
    }
    for g in &m.geometric {
        for n in &g.pair {
            if !w.d.cycles.cycles.contains_key(n) {
                return Err(format!("declared intersection names unknown cycle {n}"));
            }
        }
        w.d.cycles.set_geometric(&g.pair[0], &g.pair[1], g.count);
    }
    Ok(w.d)
}

fn rejected(step: usize, violation: String) -> Error {
    Error::MoveRejected { step, violation }
}

fn apply_at(d: &FibrationDiagram, m: &MoveSpec, step: usize) -> Result<FibrationDiagram> {
    if let Some(v) = validate(d).first() {
        return Err(rejected(
            step,
            format!("input diagram is inconsistent: {v}"),
        ));
    }
    let out = rewrite(d, m).map_err(|v| rejected(step, format!("{}: {v}", m.kind)))?;
    let post = validate(&out);
    if !post.is_empty() {
        let list: Vec<String> = post.iter().map(|v| v.to_string()).collect();
        return Err(rejected(
            step,
            format!(
                "{} produced an inconsistent diagram: {}",
                m.kind,
                list.join("; ")
            ),
        ));
    }
    Ok(out)
}

/// `None` when the move applies; otherwise the reason it does not.
pub fn check_precondition(d: &FibrationDiagram, m: &MoveSpec) -> Option<String> {
    match apply_at(d, m, 0) {
        Ok(_) => None,
        Err(Error::MoveRejected { violation, .. }) => Some(violation),
        Err(e) => Some(e.to_string()),
    }
}

pub fn apply_move(d: &FibrationDiagram, m: &MoveSpec) -> Result<FibrationDiagram> {
    apply_at(d, m, 0)
}

/// Twists of the Lefschetz points in `region`, listed outermost first, so the
/// point at the smallest position acts first.
pub fn region_monodromy(d: &FibrationDiagram, region: &str) -> Result<(SurfaceModel, TwistWord)> {
    let mut pts: Vec<&LefschetzPoint> = d.lefschetz.iter().filter(|p| p.region == region).collect();
    if pts.is_empty() {
        return Err(Error::Unsupported(format!(
            "no Lefschetz points in {region}"
        )));
    }
    pts.sort_by_key(|p| p.position);
    let mut surface: Option<&str> = None;
    let mut word = Vec::new();
    for p in pts.iter().rev() {
        let c = d
            .cycles
            .cycles
            .get(&p.cycle)
            .ok_or_else(|| Error::UnknownId(p.cycle.clone()))?;
        match surface {
            None => surface = Some(&c.surface),
            Some(s) if s != c.surface => {
                return Err(Error::Unsupported(format!(
                    "points in {region} use different reference surfaces"
                )))
            }
            _ => {}
        }
        word.push((c.class.clone(), 1));
    }
    let s = surface.expect("at least one point");
    let model = d
        .cycles
        .surfaces
        .get(s)
        .cloned()
        .ok_or_else(|| Error::UnknownId(s.to_string()))?;
    Ok((model, TwistWord(word)))
}

/// Parity of a closed fold circle from the monodromy of the points inside it.
pub fn circle_parity(d: &FibrationDiagram, arc: &str) -> Result<MonodromyParity> {
    let a = d
        .arc(arc)
        .ok_or_else(|| Error::UnknownId(arc.to_string()))?;
    if !a.is_closed() {
        return Err(Error::Unsupported(format!("{arc} is not a closed circle")));
    }
    let (surface, word) = region_monodromy(d, &a.high)?;
    let fold = d
        .cycles
        .cycles
        .get(&a.cycle)
        .ok_or_else(|| Error::UnknownId(a.cycle.clone()))?;
    if surface.rank() != fold.class.0.len() {
        return Err(Error::DimensionMismatch(fold.class.0.len(), surface.rank()));
    }
    circle_parity_monodromy(&surface, &word, &fold.class)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveScript {
    #[serde(default)]
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
    pub initial: FibrationDiagram,
    pub steps: Vec<MoveSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<FibrationDiagram>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub step: usize,
    pub kind: MoveKind,
    pub site: Vec<String>,
    pub before: CellCounts,
    pub after: CellCounts,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScriptOutcome {
    pub final_diagram: FibrationDiagram,
    pub trace: Vec<TraceEntry>,
    /// `None` when the script has no expected diagram.
    pub matches_expected: Option<bool>,
}

pub fn run_script(script: &MoveScript) -> Result<ScriptOutcome> {
    let mut d = script.initial.clone();
    let mut trace = Vec::with_capacity(script.steps.len());
    for (i, m) in script.steps.iter().enumerate() {
        let next = apply_at(&d, m, i)?;
        trace.push(TraceEntry {
            step: i,
            kind: m.kind,
            site: m.site.clone(),
            before: d.counts(),
            after: next.counts(),
        });
        d = next;
    }
    let matches_expected = script
        .expected
        .as_ref()
        .map(|e| crate::diagram::isomorphic(&d, e));
    Ok(ScriptOutcome {
        final_diagram: d,
        trace,
        matches_expected,
    })
}

/// Independent scripts in parallel, results in input order.
pub fn run_scripts(scripts: &[MoveScript]) -> Vec<Result<ScriptOutcome>> {
    scripts.par_iter().map(run_script).collect()
}

#[cfg(test)]
mod tests;
