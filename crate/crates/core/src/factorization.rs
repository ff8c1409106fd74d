//! Degeneration rewrites: a conformal-block space on a `Γ`-cover degenerates
//! into a tensor product of blocks on covers of `P^1` whose ranks are known.
//! Only the combinatorial output is produced — which points (with which
//! monodromy and weight) land on which base case.

use std::collections::BTreeSet;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::covers::{monodromy_partition_gsd3, RamificationVector, Scenario};
use crate::dynkin::{dual_involution, VertexInvolution};
use crate::error::{Error, Result};
use crate::group::{format_tuple, product, FiniteGroup, GroupKind, Perm};
use crate::picard::{Coefficients, GroupDatum, WeightBundle};

/// The base cases whose ranks the verlinde module knows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum BaseCaseKind {
    /// One unramified point on `P^1`.
    UntwistedVacuum,
    /// Two unramified points on `P^1` carrying `λ` and `λ*`.
    UntwistedPair,
    /// Cyclic cover of `P^1` ramified at `0` and `∞`.
    TwistedPair,
    /// `C3` cover ramified at three points with the same monodromy.
    EllipticTriple,
    /// `S3` data made only of transpositions, at most two.
    S3Case1,
    /// `S3` data made only of 3-cycles, at most three.
    S3Case2,
    /// `((12),(23),(132))` up to conjugation.
    S3Case3,
    /// `((12),(23),(123),(123))` up to conjugation.
    S3Case4,
    /// Double cover with `2n` branch points in type `A_{2r-1}^(2)`, base genus kept.
    ClosedFormA { genus: u32, n: u32, r: u32 },
}

pub const S3_CASE3: [Perm; 3] = [Perm::T12, Perm::T23, Perm::C132];
pub const S3_CASE4: [Perm; 4] = [Perm::T12, Perm::T23, Perm::C123, Perm::C123];

/// Where a factor point comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointSource {
    /// Index into the input points (or tuple).
    Point(usize),
    /// Padding point added to make a pairing possible.
    Auxiliary,
    /// One branch of a node created by pinching a handle.
    Node(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorPoint {
    pub source: PointSource,
    pub monodromy: Perm,
    pub weight: Coefficients,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseCase {
    #[serde(flatten)]
    pub kind: BaseCaseKind,
    /// Common central charge of the weights.
    pub level: i64,
    pub points: Vec<FactorPoint>,
    /// `δ` with `points[i].monodromy = δ γ_i δ⁻¹` for the original `γ_i`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conjugator: Option<Perm>,
}

impl BaseCase {
    fn new(kind: BaseCaseKind, level: i64, points: Vec<FactorPoint>) -> Self {
        BaseCase {
            kind,
            level,
            points,
            conjugator: None,
        }
    }

    pub fn tuple(&self) -> Vec<Perm> {
        self.points.iter().map(|p| p.monodromy).collect()
    }

    /// Monodromies before canonicalization.
    pub fn original_tuple(&self) -> Vec<Perm> {
        let undo = self.conjugator.unwrap_or(Perm::IDENTITY).inverse();
        self.points.iter().map(|p| p.monodromy.conjugate_by(undo)).collect()
    }

    /// Every point carries `level · Λ_o`.
    pub fn is_vacuum(&self) -> bool {
        let vacuum = Coefficients::from([(0, self.level)]);
        self.points.iter().all(|p| p.weight == vacuum)
    }

    /// Kind-specific shape checks plus the product identity.
    pub fn validate(&self) -> Result<()> {
        let t = self.tuple();
        let bad = |why: &str| {
            Err(Error::Inconsistent(format!(
                "{:?} factor {}: {why}",
                self.kind,
                format_tuple(&t)
            )))
        };
        if !product(&t).is_identity() {
            return bad("product is not e");
        }
        let all = |f: fn(Perm) -> bool| t.iter().all(|&g| f(g));
        let ok = match self.kind {
            BaseCaseKind::UntwistedVacuum => t.len() == 1 && all(Perm::is_identity),
            BaseCaseKind::UntwistedPair => t.len() == 2 && all(Perm::is_identity),
            BaseCaseKind::TwistedPair => t.len() == 2 && !t[0].is_identity(),
            BaseCaseKind::EllipticTriple => t.len() == 3 && t[0].is_three_cycle() && t.iter().all(|&g| g == t[0]),
            BaseCaseKind::S3Case1 => t.len() <= 2 && all(Perm::is_transposition),
            BaseCaseKind::S3Case2 => t.len() <= 3 && all(Perm::is_three_cycle),
            BaseCaseKind::S3Case3 => t == S3_CASE3,
            BaseCaseKind::S3Case4 => t == S3_CASE4,
            BaseCaseKind::ClosedFormA { n, r, .. } => {
                n >= 1 && r >= 2 && t.len() == 2 * n as usize && all(Perm::is_transposition)
            }
        };
        if ok {
            Ok(())
        } else {
            bad("shape does not match the kind")
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionWitness {
    pub factors: Vec<BaseCase>,
    /// Original monodromies of all input points, factor by factor.
    pub conservation: Vec<Perm>,
}

impl DecompositionWitness {
    pub fn new(factors: Vec<BaseCase>) -> Self {
        let conservation = factors
            .iter()
            .flat_map(|f| {
                f.original_tuple()
                    .into_iter()
                    .zip(&f.points)
                    .filter(|(_, p)| matches!(p.source, PointSource::Point(_)))
                    .map(|(g, _)| g)
                    .collect::<Vec<_>>()
            })
            .collect();
        DecompositionWitness { factors, conservation }
    }

    pub fn exceptional_count(&self) -> usize {
        self.factors
            .iter()
            .filter(|f| !matches!(f.kind, BaseCaseKind::S3Case1 | BaseCaseKind::S3Case2))
            .count()
    }
}

#[derive(Debug, Clone)]
struct Entry {
    monodromy: Perm,
    source: PointSource,
    weight: Coefficients,
}

impl Entry {
    fn point(self) -> FactorPoint {
        FactorPoint {
            source: self.source,
            monodromy: self.monodromy,
            weight: self.weight,
        }
    }
}

fn vacuum(level: i64) -> Coefficients {
    Coefficients::from([(0, level)])
}

// ---------------------------------------------------------------- gsd 2

/// A side of a pair: a real point or the padding point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Slot {
    Point(usize),
    Auxiliary,
}

/// Pairings of the branch points (`bad`) and of the remaining points (`good`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gsd2Pairing {
    pub bad: Vec<(usize, usize)>,
    pub good: Vec<(Slot, Slot)>,
}

fn require_kind(d: &GroupDatum, kind: GroupKind) -> Result<()> {
    if d.gamma().kind() != kind {
        return Err(Error::Precondition(format!(
            "group is {}, expected {kind:?}",
            d.gamma()
        )));
    }
    Ok(())
}

/// Branch points and unramified points of a `C2` datum, by index.
fn split_ramified(d: &GroupDatum) -> (Vec<usize>, Vec<usize>) {
    (0..d.points().len()).partition(|&i| d.points()[i].is_ramified())
}

/// Adjacent pairing in input order; an odd unramified side is padded with
/// an auxiliary point carrying the vacuum.
pub fn pair_partition_gsd2(d: &GroupDatum) -> Result<Gsd2Pairing> {
    require_kind(d, GroupKind::C2)?;
    let (ramified, unramified) = split_ramified(d);
    if ramified.len() % 2 == 1 {
        return Err(Error::OddBranchCount(ramified.len()));
    }
    let mut good: Vec<Slot> = unramified.into_iter().map(Slot::Point).collect();
    if good.len() % 2 == 1 {
        good.push(Slot::Auxiliary);
    }
    Ok(Gsd2Pairing {
        bad: ramified.chunks(2).map(|c| (c[0], c[1])).collect(),
        good: good.chunks(2).map(|c| (c[0], c[1])).collect(),
    })
}

impl Gsd2Pairing {
    /// Accepts a user-supplied pairing if it is a perfect matching of the
    /// right point sets.
    pub fn check(&self, d: &GroupDatum) -> Result<()> {
        require_kind(d, GroupKind::C2)?;
        let (ramified, unramified) = split_ramified(d);
        if ramified.len() % 2 == 1 {
            return Err(Error::OddBranchCount(ramified.len()));
        }
        let bad: Vec<usize> = self.bad.iter().flat_map(|&(a, b)| [a, b]).collect();
        let mut sorted = bad.clone();
        sorted.sort_unstable();
        if sorted != ramified {
            return Err(Error::PairingInadmissible(
                "bad pairs must match every branch point once".into(),
            ));
        }
        let mut good: Vec<Slot> = self.good.iter().flat_map(|&(a, b)| [a, b]).collect();
        good.sort_unstable();
        let mut expected: Vec<Slot> = unramified.into_iter().map(Slot::Point).collect();
        if expected.len() % 2 == 1 {
            expected.push(Slot::Auxiliary);
        }
        if good != expected {
            return Err(Error::PairingInadmissible(
                "good pairs must match every unramified point once (plus one auxiliary if odd)".into(),
            ));
        }
        Ok(())
    }
}

/// All perfect matchings of `items`, first element paired first.
pub fn perfect_matchings<T: Copy>(items: &[T]) -> Vec<Vec<(T, T)>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    if items.len() % 2 == 1 {
        return Vec::new();
    }
    let first = items[0];
    let mut out = Vec::new();
    for k in 1..items.len() {
        let rest: Vec<T> = items[1..]
            .iter()
            .enumerate()
            .filter(|&(i, _)| i + 1 != k)
            .map(|(_, &x)| x)
            .collect();
        for mut m in perfect_matchings(&rest) {
            m.insert(0, (first, items[k]));
            out.push(m);
        }
    }
    out
}

// ---------------------------------------------------------------- gsd 3

/// Scenario decomposition of a `C3` datum with the `Λ⃗_o` bundle.
pub fn degenerate_gsd3(d: &GroupDatum) -> Result<DecompositionWitness> {
    degenerate_gsd3_with(d, &WeightBundle::vacuum(d, 1), 1)
}

/// Same-monodromy triples, `{x⁺, x⁻}` pairs as dictated by the scenario,
/// and one vacuum factor per unramified point.
pub fn degenerate_gsd3_with(d: &GroupDatum, b: &WeightBundle, level: i64) -> Result<DecompositionWitness> {
    require_kind(d, GroupKind::C3)?;
    let part = monodromy_partition_gsd3(d.points())?;
    let entry = |i: usize| Entry {
        monodromy: d.points()[i].monodromy(),
        source: PointSource::Point(i),
        weight: b.at(&d.points()[i]),
    };
    let pairs = match part.scenario {
        Scenario::A => 0,
        Scenario::B => 1,
        Scenario::C => 2,
    };
    let mut factors = Vec::new();
    for side in [&part.plus[pairs..], &part.minus[pairs..]] {
        for triple in side.chunks(3) {
            let points = triple.iter().map(|&i| entry(i).point()).collect();
            factors.push(BaseCase::new(BaseCaseKind::EllipticTriple, level, points));
        }
    }
    for k in 0..pairs {
        let points = vec![entry(part.plus[k]).point(), entry(part.minus[k]).point()];
        factors.push(BaseCase::new(BaseCaseKind::TwistedPair, level, points));
    }
    for (i, p) in d.points().iter().enumerate() {
        if !p.is_ramified() {
            factors.push(BaseCase::new(
                BaseCaseKind::UntwistedVacuum,
                level,
                vec![entry(i).point()],
            ));
        }
    }
    Ok(DecompositionWitness::new(factors))
}

// ---------------------------------------------------------------- gsd 6

pub fn s3_parity_check(r: &RamificationVector) -> bool {
    r.tuple().iter().filter(|g| g.is_transposition()).count() % 2 == 0
}

/// Reduces `S3` ramification data to the four base cases, with level-1
/// vacuum weights. Trivial entries are dropped (propagation of vacua).
pub fn s3_reduce(r: &RamificationVector) -> Result<DecompositionWitness> {
    let entries = r
        .tuple()
        .iter()
        .enumerate()
        .map(|(i, &g)| Entry {
            monodromy: g,
            source: PointSource::Point(i),
            weight: vacuum(1),
        })
        .collect();
    s3_reduce_entries(r.group(), entries, 1).map(DecompositionWitness::new)
}

/// [`s3_reduce`] on explicit `(source, monodromy, weight)` triples.
pub fn s3_reduce_weighted(points: Vec<(PointSource, Perm, Coefficients)>, level: i64) -> Result<DecompositionWitness> {
    let entries = points
        .into_iter()
        .map(|(source, monodromy, weight)| Entry {
            monodromy,
            source,
            weight,
        })
        .collect();
    s3_reduce_entries(FiniteGroup::s3(), entries, level).map(DecompositionWitness::new)
}

/// Moves the entry at `from` to `to < from` by repeated
/// `στ = τ(τ⁻¹στ)`: the moved element is unchanged, the ones it passes are
/// conjugated.
fn move_left(entries: &mut [Entry], from: usize, to: usize) {
    for k in (to + 1..=from).rev() {
        let tau = entries[k].monodromy;
        entries[k - 1].monodromy = entries[k - 1].monodromy.conjugate_by(tau.inverse());
        entries.swap(k - 1, k);
    }
}

fn s3_reduce_entries(group: FiniteGroup, entries: Vec<Entry>, level: i64) -> Result<Vec<BaseCase>> {
    if group != FiniteGroup::s3() {
        return Err(Error::Precondition(format!("s3 reduction needs group S3, got {group}")));
    }
    let tuple: Vec<Perm> = entries.iter().map(|e| e.monodromy).collect();
    if !product(&tuple).is_identity() {
        return Err(Error::Precondition(format!(
            "ordered product of {} is not e",
            format_tuple(&tuple)
        )));
    }
    let mut entries: Vec<Entry> = entries.into_iter().filter(|e| !e.monodromy.is_identity()).collect();
    let t = entries.iter().filter(|e| e.monodromy.is_transposition()).count();
    if t % 2 == 1 {
        return Err(Error::Precondition(format!("odd number ({t}) of transpositions")));
    }

    // transpositions first, stably
    let mut front = 0;
    for k in 0..entries.len() {
        if entries[k].monodromy.is_transposition() {
            move_left(&mut entries, k, front);
            front += 1;
        }
    }

    let mut factors = Vec::new();
    let mut t = t;
    while t > 2 {
        let (i, j) = (0..t)
            .flat_map(|i| (i + 1..t).map(move |j| (i, j)))
            .find(|&(i, j)| entries[i].monodromy == entries[j].monodromy)
            .expect("pigeonhole: four transpositions in S3 repeat");
        move_left(&mut entries, i, 0);
        move_left(&mut entries, j, 1);
        let pair: Vec<FactorPoint> = entries.drain(..2).map(Entry::point).collect();
        factors.push(BaseCase::new(BaseCaseKind::S3Case1, level, pair));
        t -= 2;
    }

    let cycles: Vec<Entry>;
    if t == 2 {
        let (g1, g2) = (entries[0].monodromy, entries[1].monodromy);
        let rest: Vec<Entry> = entries.drain(2..).collect();
        let head: Vec<Entry> = std::mem::take(&mut entries);
        if g1 == g2 {
            let pair = head.into_iter().map(Entry::point).collect();
            factors.push(BaseCase::new(BaseCaseKind::S3Case1, level, pair));
            cycles = rest;
        } else {
            let c = g1 * g2;
            let mut rest = rest;
            let (kind, picked, literal): (_, Vec<Entry>, &[Perm]) =
                if let Some(k) = rest.iter().position(|e| e.monodromy == c.inverse()) {
                    (BaseCaseKind::S3Case3, vec![rest.remove(k)], &S3_CASE3)
                } else {
                    let first = rest.iter().position(|e| e.monodromy == c).expect("product forces c");
                    let a = rest.remove(first);
                    let second = rest
                        .iter()
                        .position(|e| e.monodromy == c)
                        .expect("product forces c twice");
                    (BaseCaseKind::S3Case4, vec![a, rest.remove(second)], &S3_CASE4)
                };
            let members: Vec<Entry> = head.into_iter().chain(picked).collect();
            let delta = Perm::ALL
                .into_iter()
                .find(|&dl| {
                    members
                        .iter()
                        .zip(literal)
                        .all(|(e, &lit)| e.monodromy.conjugate_by(dl) == lit)
                })
                .expect("S3 acts simply transitively on ordered pairs of distinct transpositions");
            let points = members
                .into_iter()
                .map(|e| FactorPoint {
                    monodromy: e.monodromy.conjugate_by(delta),
                    ..e.point()
                })
                .collect();
            let mut f = BaseCase::new(kind, level, points);
            f.conjugator = Some(delta);
            factors.push(f);
            cycles = rest;
        }
    } else {
        cycles = entries;
    }
    factors.extend(cycle_groups(cycles, level));
    Ok(factors)
}

/// 3-cycles with trivial product: `p mod 3` pairs `(c, c²)`, then triples of
/// equal elements.
fn cycle_groups(cycles: Vec<Entry>, level: i64) -> Vec<BaseCase> {
    let (mut plus, mut minus): (Vec<_>, Vec<_>) = cycles
        .into_iter()
        .enumerate()
        .partition(|(_, e)| e.monodromy == Perm::C123);
    let pairs = plus.len() % 3;
    let mut factors = Vec::new();
    let rest_plus = plus.split_off(pairs);
    let rest_minus = minus.split_off(pairs);
    for (a, b) in plus.into_iter().zip(minus) {
        let mut pair = [a, b];
        pair.sort_by_key(|(i, _)| *i);
        let points = pair.into_iter().map(|(_, e)| e.point()).collect();
        factors.push(BaseCase::new(BaseCaseKind::S3Case2, level, points));
    }
    for side in [rest_plus, rest_minus] {
        let mut side = side.into_iter().map(|(_, e)| e).peekable();
        while side.peek().is_some() {
            let points = side.by_ref().take(3).map(Entry::point).collect();
            factors.push(BaseCase::new(BaseCaseKind::S3Case2, level, points));
        }
    }
    factors
}

/// Node monodromies `(x, y)` with `y = b x⁻¹ b⁻¹` and `x · y · c = e`:
/// pinching one handle of the base turns `[x, b]` into two branch points.
pub fn pinch_handle(gamma: FiniteGroup, c: Perm) -> Option<(Perm, Perm)> {
    gamma.elements().find_map(|x| {
        gamma.elements().find_map(|b| {
            let y = x.inverse().conjugate_by(b);
            (x * y * c).is_identity().then_some((x, y))
        })
    })
}

// ---------------------------------------------------------------- P/Q sets

/// `P = Y_n ∩ Y_m` and `Q = {i ∈ Y_n : i* ∈ Y_m}`.
pub fn pq_sets(
    yn: &BTreeSet<usize>,
    ym: &BTreeSet<usize>,
    inv: &VertexInvolution,
) -> Result<(BTreeSet<usize>, BTreeSet<usize>)> {
    if let Some(&v) = yn.iter().chain(ym).find(|&&v| v >= inv.len()) {
        return Err(Error::TypeMismatch(
            format!("facet vertex {v}"),
            format!("involution on {} vertices", inv.len()),
        ));
    }
    let p = yn.intersection(ym).copied().collect();
    let q = yn.iter().copied().filter(|&i| ym.contains(&inv.apply(i))).collect();
    Ok((p, q))
}

/// lcm of the chosen labels.
pub fn lcmai_bound(labels: &[u32]) -> Result<u64> {
    if labels.contains(&0) {
        return Err(Error::Precondition("dual labels are positive".into()));
    }
    Ok(labels.iter().fold(1u64, |acc, &a| acc.lcm(&u64::from(a))))
}

/// One certificate: a pairing and a chosen vertex per pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LcmaiCertificate {
    pub pairing: Gsd2Pairing,
    /// Chosen vertex per bad pair, then per good pair.
    pub vertices: Vec<usize>,
    pub bound: u64,
}

impl LcmaiCertificate {
    /// `C/ǎ_i · Λ_i` on both points of a bad pair; `C/ǎ_j · Λ_j` and
    /// `C/ǎ_j · Λ_{j*}` on a good pair.
    pub fn bundle(&self, d: &GroupDatum) -> WeightBundle {
        let c = self.bound as i64;
        let mut b = WeightBundle::new();
        let (bad_vs, good_vs) = self.vertices.split_at(self.pairing.bad.len());
        for (&(n, m), &i) in self.pairing.bad.iter().zip(bad_vs) {
            let a = i64::from(d.points()[n].affine_type().dual_labels()[i]);
            for k in [n, m] {
                b.set(d.points()[k].label(), Coefficients::from([(i, c / a)]));
            }
        }
        if let Some(base) = d.base() {
            let inv = dual_involution(base);
            for (&(sn, sm), &j) in self.pairing.good.iter().zip(good_vs) {
                let a = i64::from(crate::dynkin::AffineType::untwisted(base).dual_labels()[j]);
                for (slot, v) in [(sn, j), (sm, inv.apply(j))] {
                    if let Slot::Point(k) = slot {
                        b.set(d.points()[k].label(), Coefficients::from([(v, c / a)]));
                    }
                }
            }
        }
        b
    }
}

/// Candidate `(vertex, label)` choices per pair, lowest label first.
pub fn lcmai_choice_sets(d: &GroupDatum, pairing: &Gsd2Pairing) -> Result<Vec<Vec<(usize, u32)>>> {
    let base = d.base().ok_or(Error::NoPoints)?;
    let inv = dual_involution(base);
    let auxiliary: BTreeSet<usize> = BTreeSet::from([0]);
    let facet = |s: Slot| match s {
        Slot::Point(i) => d.points()[i].facet(),
        Slot::Auxiliary => &auxiliary,
    };
    let name = |s: Slot| match s {
        Slot::Point(i) => d.points()[i].label().to_string(),
        Slot::Auxiliary => "auxiliary".into(),
    };
    let mut sets = Vec::new();
    for &(n, m) in &pairing.bad {
        let (pn, pm) = (&d.points()[n], &d.points()[m]);
        if pn.affine_type() != pm.affine_type() {
            return Err(Error::TypeMismatch(
                pn.affine_type().to_string(),
                pm.affine_type().to_string(),
            ));
        }
        let (p, _) = pq_sets(
            pn.facet(),
            pm.facet(),
            &VertexInvolution::identity(pn.affine_type().vertex_count()),
        )?;
        sets.push(labelled(p, pn.affine_type().dual_labels(), || {
            format!("P is empty for ({}, {})", pn.label(), pm.label())
        })?);
    }
    let untwisted = crate::dynkin::AffineType::untwisted(base);
    for &(sn, sm) in &pairing.good {
        let (_, q) = pq_sets(facet(sn), facet(sm), &inv)?;
        sets.push(labelled(q, untwisted.dual_labels(), || {
            format!("Q is empty for ({}, {})", name(sn), name(sm))
        })?);
    }
    Ok(sets)
}

fn labelled(set: BTreeSet<usize>, labels: &[u32], why: impl FnOnce() -> String) -> Result<Vec<(usize, u32)>> {
    if set.is_empty() {
        return Err(Error::PairingInadmissible(why()));
    }
    let mut v: Vec<(usize, u32)> = set.into_iter().map(|i| (i, labels[i])).collect();
    v.sort_by_key(|&(i, a)| (a, i));
    Ok(v)
}

/// Result of a bounded search over Prop.-style certificates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LcmaiSearch {
    /// gcd of all certificate bounds seen.
    pub bound: u64,
    /// The certificate with the least bound (first found on ties).
    pub best: LcmaiCertificate,
    pub examined: usize,
    /// The gcd is final: everything was examined or it already reached 1.
    pub complete: bool,
}

pub const DEFAULT_BUDGET: usize = 10_000;

/// gcd over pairings and per-pair vertex choices of [`lcmai_bound`]; stops
/// after `budget` certificates or once a bound of 1 is found.
pub fn best_lcmai_bound(d: &GroupDatum, budget: usize) -> Result<LcmaiSearch> {
    require_kind(d, GroupKind::C2)?;
    let default = pair_partition_gsd2(d)?;
    let bad_points: Vec<usize> = default.bad.iter().flat_map(|&(a, b)| [a, b]).collect();
    let good_slots: Vec<Slot> = default.good.iter().flat_map(|&(a, b)| [a, b]).collect();
    let bad_matchings = perfect_matchings(&bad_points);
    let good_matchings = perfect_matchings(&good_slots);

    let mut search: Option<LcmaiSearch> = None;
    let mut examined = 0usize;
    let mut last_error = None;
    let mut budget_hit = false;
    'outer: for bad in &bad_matchings {
        for good in &good_matchings {
            let pairing = Gsd2Pairing {
                bad: bad.clone(),
                good: good.clone(),
            };
            let sets = match lcmai_choice_sets(d, &pairing) {
                Ok(s) => s,
                Err(e) => {
                    last_error = Some(e);
                    continue;
                }
            };
            let mut idx = vec![0usize; sets.len()];
            loop {
                if examined >= budget {
                    budget_hit = true;
                    break 'outer;
                }
                examined += 1;
                let labels: Vec<u32> = idx.iter().zip(&sets).map(|(&k, s)| s[k].1).collect();
                let bound = lcmai_bound(&labels)?;
                let cert = || LcmaiCertificate {
                    pairing: pairing.clone(),
                    vertices: idx.iter().zip(&sets).map(|(&k, s)| s[k].0).collect(),
                    bound,
                };
                match &mut search {
                    None => {
                        search = Some(LcmaiSearch {
                            bound,
                            best: cert(),
                            examined: 0,
                            complete: false,
                        })
                    }
                    Some(s) => {
                        s.bound = s.bound.gcd(&bound);
                        if bound < s.best.bound {
                            s.best = cert();
                        }
                    }
                }
                if search.as_ref().is_some_and(|s| s.best.bound == 1) {
                    break 'outer;
                }
                if !advance(&mut idx, &sets) {
                    break;
                }
            }
        }
    }
    match search {
        Some(mut s) => {
            s.complete = !budget_hit || s.best.bound == 1;
            s.examined = examined;
            Ok(s)
        }
        None if budget_hit => Err(Error::BoundUnavailable(format!("search budget {budget} exhausted"))),
        None => Err(last_error.unwrap_or_else(|| Error::PairingInadmissible("no admissible pairing".into()))),
    }
}

/// Odometer step over per-slot choice indices; false once wrapped.
fn advance(idx: &mut [usize], sets: &[Vec<(usize, u32)>]) -> bool {
    for pos in (0..idx.len()).rev() {
        idx[pos] += 1;
        if idx[pos] < sets[pos].len() {
            return true;
        }
        idx[pos] = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::parse_tuple;
    use crate::picard::PointDatum;

    fn s3(s: &str) -> RamificationVector {
        RamificationVector::s3(parse_tuple(s).unwrap())
    }

    fn kinds(w: &DecompositionWitness) -> Vec<BaseCaseKind> {
        w.factors.iter().map(|f| f.kind).collect()
    }

    #[test]
    fn parity() {
        assert!(s3_parity_check(&s3("(12),(23),(132)")));
        assert!(!s3_parity_check(&s3("(12),(123),(132)")));
        assert!(s3_parity_check(&s3("")));
    }

    #[test]
    fn reduce_base_cases() {
        let w = s3_reduce(&s3("(12),(12)")).unwrap();
        assert_eq!(kinds(&w), vec![BaseCaseKind::S3Case1]);
        let w = s3_reduce(&s3("(12),(23),(132)")).unwrap();
        assert_eq!(kinds(&w), vec![BaseCaseKind::S3Case3]);
        assert_eq!(w.factors[0].conjugator, Some(Perm::IDENTITY));
        let w = s3_reduce(&s3("(12),(12),(123),(132)")).unwrap();
        assert_eq!(kinds(&w), vec![BaseCaseKind::S3Case1, BaseCaseKind::S3Case2]);
        assert_eq!(w.factors[1].tuple(), parse_tuple("(123),(132)").unwrap());
        let w = s3_reduce(&s3("(12),(23),(123),(123)")).unwrap();
        assert_eq!(kinds(&w), vec![BaseCaseKind::S3Case4]);
    }

    #[test]
    fn reduce_canonicalizes_case3() {
        // (13)(12) = (123), so (132) closes it
        let w = s3_reduce(&s3("(13),(12),(132)")).unwrap();
        assert_eq!(kinds(&w), vec![BaseCaseKind::S3Case3]);
        let f = &w.factors[0];
        assert_eq!(f.tuple(), S3_CASE3.to_vec());
        assert_eq!(f.original_tuple(), parse_tuple("(13),(12),(132)").unwrap());
        assert_eq!(w.conservation, parse_tuple("(13),(12),(132)").unwrap());
    }

    #[test]
    fn reduce_splits_transposition_pairs() {
        let r = s3("(12),(13),(13),(12)");
        assert!(product(r.tuple()).is_identity());
        let w = s3_reduce(&r).unwrap();
        for f in &w.factors {
            f.validate().unwrap();
        }
        assert!(w.exceptional_count() <= 1);
        assert_eq!(w.factors[0].kind, BaseCaseKind::S3Case1);
    }

    #[test]
    fn reduce_rejects_bad_input() {
        assert!(s3_reduce(&s3("(12),(13)")).is_err());
        assert!(s3_reduce(&s3("(12),(123),(132)")).is_err());
        let c3 = RamificationVector::new(FiniteGroup::c3(), vec![Perm::C123; 3]).unwrap();
        assert!(s3_reduce(&c3).is_err());
    }

    #[test]
    fn reduce_drops_identities() {
        let w = s3_reduce(&s3("e,(12),e,(12)")).unwrap();
        assert_eq!(kinds(&w), vec![BaseCaseKind::S3Case1]);
        let sources: Vec<_> = w.factors[0].points.iter().map(|p| p.source).collect();
        assert_eq!(sources, vec![PointSource::Point(1), PointSource::Point(3)]);
    }

    #[test]
    fn cycle_grouping() {
        let w = s3_reduce(&s3("(123),(123),(123),(132),(123)")).unwrap();
        // p = 4, q = 1: one pair, one triple
        assert_eq!(kinds(&w), vec![BaseCaseKind::S3Case2; 2]);
        assert_eq!(w.factors[0].points.len(), 2);
        assert_eq!(w.factors[1].points.len(), 3);
    }

    #[test]
    fn pinching() {
        let (x, y) = pinch_handle(FiniteGroup::s3(), Perm::C123).unwrap();
        assert!((x * y * Perm::C123).is_identity());
        assert_eq!(
            pinch_handle(FiniteGroup::s3(), Perm::IDENTITY),
            Some((Perm::IDENTITY, Perm::IDENTITY))
        );
        assert_eq!(pinch_handle(FiniteGroup::c3(), Perm::C123), None);
    }

    #[test]
    fn pq() {
        let inv = VertexInvolution::identity(3);
        let (p, q) = pq_sets(&BTreeSet::from([0, 1]), &BTreeSet::from([1]), &inv).unwrap();
        assert_eq!(p, BTreeSet::from([1]));
        assert_eq!(q, p);
        let a3 = dual_involution("A3".parse().unwrap());
        let (p, q) = pq_sets(&BTreeSet::from([1]), &BTreeSet::from([3]), &a3).unwrap();
        assert!(p.is_empty());
        assert_eq!(q, BTreeSet::from([1]));
        assert!(matches!(
            pq_sets(&BTreeSet::from([5]), &BTreeSet::from([1]), &inv),
            Err(Error::TypeMismatch(_, _))
        ));
    }

    #[test]
    fn lcm_bounds() {
        assert_eq!(lcmai_bound(&[1, 1, 1]).unwrap(), 1);
        assert_eq!(lcmai_bound(&[2, 2]).unwrap(), 2);
        assert_eq!(lcmai_bound(&[2, 3]).unwrap(), 6);
        assert_eq!(lcmai_bound(&[]).unwrap(), 1);
    }

    fn twisted(label: &str, ty: &str, facet: &[usize]) -> PointDatum {
        PointDatum::new(label, ty.parse().unwrap(), facet.iter().copied(), Perm::T12, true).unwrap()
    }

    #[test]
    fn default_pairings() {
        let pts = |n: usize| {
            (0..n)
                .map(|i| twisted(&format!("x{i}"), "A2~2", &[0, 1]))
                .collect::<Vec<_>>()
        };
        let d = GroupDatum::new(0, FiniteGroup::c2(), pts(2)).unwrap();
        let p = pair_partition_gsd2(&d).unwrap();
        assert_eq!(p.bad, vec![(0, 1)]);
        assert!(p.good.is_empty());

        let d = GroupDatum::new(0, FiniteGroup::c2(), pts(4)).unwrap();
        assert_eq!(pair_partition_gsd2(&d).unwrap().bad, vec![(0, 1), (2, 3)]);

        let mut points = pts(2);
        points.push(PointDatum::good("g", "A2".parse().unwrap()));
        let d = GroupDatum::new(0, FiniteGroup::c2(), points).unwrap();
        let p = pair_partition_gsd2(&d).unwrap();
        assert_eq!(p.good, vec![(Slot::Point(2), Slot::Auxiliary)]);
        p.check(&d).unwrap();
        let swapped = Gsd2Pairing {
            bad: vec![(1, 0)],
            good: vec![(Slot::Auxiliary, Slot::Point(2))],
        };
        swapped.check(&d).unwrap();
        let wrong = Gsd2Pairing {
            bad: vec![(0, 2)],
            good: vec![(Slot::Point(1), Slot::Auxiliary)],
        };
        assert!(wrong.check(&d).is_err());
    }

    #[test]
    fn odd_branch_count() {
        // an odd count cannot come from a valid datum; use genus-0 data with
        // an extra unramified bad point to check the default on a real datum
        let d = GroupDatum::new(
            0,
            FiniteGroup::c2(),
            vec![twisted("x", "A2~2", &[1]), twisted("y", "A2~2", &[1])],
        )
        .unwrap();
        assert!(pair_partition_gsd2(&d).is_ok());
        assert_eq!(
            Error::OddBranchCount(3).to_string(),
            "no C2 cover exists: 3 branch points is odd"
        );
    }

    #[test]
    fn matchings() {
        assert_eq!(perfect_matchings(&[1, 2, 3, 4]).len(), 3);
        assert_eq!(perfect_matchings(&[1, 2, 3, 4, 5, 6]).len(), 15);
        assert_eq!(perfect_matchings::<u8>(&[]).len(), 1);
        assert!(perfect_matchings(&[1, 2, 3]).is_empty());
    }

    #[test]
    fn lcmai_search() {
        let d = GroupDatum::new(
            0,
            FiniteGroup::c2(),
            vec![twisted("x", "A2~2", &[1]), twisted("y", "A2~2", &[1])],
        )
        .unwrap();
        let s = best_lcmai_bound(&d, DEFAULT_BUDGET).unwrap();
        assert_eq!(s.bound, 2);
        assert_eq!(s.best.vertices, vec![1]);
        let b = s.best.bundle(&d);
        assert_eq!(b.coefficients("x"), Some(&Coefficients::from([(1, 1)])));

        let d = GroupDatum::new(
            0,
            FiniteGroup::c2(),
            vec![twisted("x", "A2~2", &[0, 1]), twisted("y", "A2~2", &[0, 1])],
        )
        .unwrap();
        assert_eq!(best_lcmai_bound(&d, DEFAULT_BUDGET).unwrap().bound, 1);

        // disjoint facets: no admissible pairing
        let d = GroupDatum::new(
            0,
            FiniteGroup::c2(),
            vec![twisted("x", "A2~2", &[0]), twisted("y", "A2~2", &[1])],
        )
        .unwrap();
        assert!(matches!(
            best_lcmai_bound(&d, DEFAULT_BUDGET),
            Err(Error::PairingInadmissible(_))
        ));
    }

    #[test]
    fn lcmai_gcd_over_pairings() {
        // A4~2 labels [1, 2, 2]; pairing {x,y},{z,w} forces label 2 on both
        // pairs, while {x,z},{y,w} reaches o on both.
        let d = GroupDatum::new(
            0,
            FiniteGroup::c2(),
            vec![
                twisted("x", "A4~2", &[0, 1]),
                twisted("y", "A4~2", &[1]),
                twisted("z", "A4~2", &[0, 2]),
                twisted("w", "A4~2", &[0, 1]),
            ],
        )
        .unwrap();
        let s = best_lcmai_bound(&d, DEFAULT_BUDGET).unwrap();
        assert_eq!(s.bound, 2);
    }

    #[test]
    fn gsd3_scenarios() {
        let ty: crate::dynkin::AffineType = "D4~3".parse().unwrap();
        let datum = |ms: &[Perm]| {
            let pts = ms
                .iter()
                .enumerate()
                .map(|(i, &g)| PointDatum::iwahori(format!("p{i}"), ty.clone(), g).unwrap())
                .collect();
            GroupDatum::new(0, FiniteGroup::c3(), pts).unwrap()
        };
        let (p, m) = (Perm::C123, Perm::C132);
        assert_eq!(
            kinds(&degenerate_gsd3(&datum(&[p, p, p])).unwrap()),
            vec![BaseCaseKind::EllipticTriple]
        );
        assert_eq!(
            kinds(&degenerate_gsd3(&datum(&[p, m])).unwrap()),
            vec![BaseCaseKind::TwistedPair]
        );
        assert_eq!(
            kinds(&degenerate_gsd3(&datum(&[p, p, p, m, m, m])).unwrap()),
            vec![BaseCaseKind::EllipticTriple; 2]
        );
        let w = degenerate_gsd3(&datum(&[p, p, m, m])).unwrap();
        assert_eq!(kinds(&w), vec![BaseCaseKind::TwistedPair; 2]);
        for f in &w.factors {
            f.validate().unwrap();
        }
    }
}
