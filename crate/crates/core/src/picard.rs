//! Line bundles on products of partial affine flag varieties.
//!
//! A point carries an affine type and a facet `Y` (a nonempty set of
//! vertices); its Picard lattice is free on the fundamental weights `Λ_i`,
//! `i ∈ Y`. A [`WeightBundle`] assigns integer coefficients per point, and the
//! central charge of `Σ n_i Λ_i` is `Σ n_i ǎ_i`.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::covers;
use crate::dynkin::{AffineType, FiniteType};
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GroupKind, Perm};

/// Current version of the JSON file schema.
pub const SCHEMA_VERSION: u32 = 1;

pub type Coefficients = BTreeMap<usize, i64>;

/// A marked point: affine type, facet, local monodromy and badness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPoint", into = "RawPoint")]
pub struct PointDatum {
    label: String,
    affine_type: AffineType,
    facet: BTreeSet<usize>,
    monodromy: Perm,
    is_bad: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPoint {
    label: String,
    #[serde(rename = "type")]
    affine_type: AffineType,
    facet: BTreeSet<usize>,
    #[serde(default)]
    monodromy: Perm,
    #[serde(default)]
    bad: bool,
}

impl TryFrom<RawPoint> for PointDatum {
    type Error = Error;

    fn try_from(raw: RawPoint) -> Result<Self> {
        PointDatum::new(raw.label, raw.affine_type, raw.facet, raw.monodromy, raw.bad)
    }
}

impl From<PointDatum> for RawPoint {
    fn from(p: PointDatum) -> Self {
        RawPoint {
            label: p.label,
            affine_type: p.affine_type,
            facet: p.facet,
            monodromy: p.monodromy,
            bad: p.is_bad,
        }
    }
}

impl PointDatum {
    pub fn new(
        label: impl Into<String>,
        affine_type: AffineType,
        facet: impl IntoIterator<Item = usize>,
        monodromy: Perm,
        is_bad: bool,
    ) -> Result<Self> {
        let label = label.into();
        let facet: BTreeSet<usize> = facet.into_iter().collect();
        let invalid = |reason: String| Error::InvalidPoint {
            point: label.clone(),
            reason,
        };
        if facet.is_empty() {
            return Err(invalid("facet is empty".into()));
        }
        if let Some(&v) = facet.iter().find(|&&v| v >= affine_type.vertex_count()) {
            return Err(invalid(format!("vertex {v} is not a vertex of {affine_type}")));
        }
        if monodromy.order() != affine_type.twist() {
            return Err(invalid(format!(
                "monodromy {monodromy} has order {} but {affine_type} has twist {}",
                monodromy.order(),
                affine_type.twist()
            )));
        }
        if !is_bad && (!monodromy.is_identity() || !facet.contains(&0)) {
            return Err(invalid(
                "a good point needs trivial monodromy and o in its facet".into(),
            ));
        }
        Ok(PointDatum {
            label,
            affine_type,
            facet,
            monodromy,
            is_bad,
        })
    }

    /// Iwahori point: the facet is every vertex of the diagram.
    pub fn iwahori(label: impl Into<String>, affine_type: AffineType, monodromy: Perm) -> Result<Self> {
        let facet: Vec<usize> = affine_type.vertices().collect();
        PointDatum::new(label, affine_type, facet, monodromy, true)
    }

    /// Hyperspecial good point with facet `{o}`.
    pub fn good(label: impl Into<String>, base: FiniteType) -> Self {
        PointDatum::new(label, AffineType::untwisted(base), [0], Perm::IDENTITY, false)
            .expect("a hyperspecial point is always valid")
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn affine_type(&self) -> &AffineType {
        &self.affine_type
    }

    pub fn facet(&self) -> &BTreeSet<usize> {
        &self.facet
    }

    pub fn monodromy(&self) -> Perm {
        self.monodromy
    }

    pub fn is_bad(&self) -> bool {
        self.is_bad
    }

    pub fn is_ramified(&self) -> bool {
        !self.monodromy.is_identity()
    }

    pub fn is_iwahori(&self) -> bool {
        self.facet.len() == self.affine_type.vertex_count()
    }

    /// gcd of the dual labels over the facet.
    pub fn label_gcd(&self) -> u64 {
        self.facet
            .iter()
            .map(|&v| u64::from(self.affine_type.dual_labels()[v]))
            .fold(0, |acc, a| acc.gcd(&a))
    }

    pub fn check_coefficients(&self, coeffs: &Coefficients) -> Result<()> {
        match coeffs.keys().find(|v| !self.facet.contains(v)) {
            Some(&vertex) => Err(Error::VertexOutsideFacet {
                point: self.label.clone(),
                vertex,
            }),
            None => Ok(()),
        }
    }
}

/// Base genus, Galois group and marked points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawDatum", into = "RawDatum")]
pub struct GroupDatum {
    genus: u32,
    gamma: FiniteGroup,
    points: Vec<PointDatum>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDatum {
    #[serde(default = "schema_version")]
    schema: u32,
    genus: u32,
    group: FiniteGroup,
    points: Vec<PointDatum>,
}

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

impl TryFrom<RawDatum> for GroupDatum {
    type Error = Error;

    fn try_from(raw: RawDatum) -> Result<Self> {
        if raw.schema != SCHEMA_VERSION {
            return Err(Error::Malformed(format!("unsupported schema {}", raw.schema)));
        }
        GroupDatum::new(raw.genus, raw.group, raw.points)
    }
}

impl From<GroupDatum> for RawDatum {
    fn from(d: GroupDatum) -> Self {
        RawDatum {
            schema: SCHEMA_VERSION,
            genus: d.genus,
            group: d.gamma,
            points: d.points,
        }
    }
}

impl GroupDatum {
    pub fn new(genus: u32, gamma: FiniteGroup, points: Vec<PointDatum>) -> Result<Self> {
        let mut labels = HashSet::new();
        for p in &points {
            if !labels.insert(p.label.as_str()) {
                return Err(Error::InvalidDatum(format!("duplicate label {:?}", p.label)));
            }
            if !gamma.contains(p.monodromy) {
                return Err(Error::InvalidPoint {
                    point: p.label.clone(),
                    reason: format!("monodromy {} is not in {gamma}", p.monodromy),
                });
            }
        }
        if let Some(first) = points.first() {
            let base = first.affine_type.base();
            if let Some(p) = points.iter().find(|p| p.affine_type.base() != base) {
                return Err(Error::TypeMismatch(
                    first.affine_type.to_string(),
                    p.affine_type.to_string(),
                ));
            }
            let needed = match gamma.kind() {
                GroupKind::Trivial => 1,
                GroupKind::C2 => 2,
                GroupKind::C3 | GroupKind::S3 => 3,
            };
            let acts = match gamma.kind() {
                GroupKind::S3 => base.admits_twist(2) && base.admits_twist(3),
                _ => base.admits_twist(needed),
            };
            if !acts {
                return Err(Error::InvalidDatum(format!(
                    "{gamma} does not act on {base} by diagram automorphisms"
                )));
            }
        }
        let monodromies: Vec<Perm> = points.iter().map(|p| p.monodromy).collect();
        // rejects non-closing genus-0 data and data with no connected cover
        let shape = covers::genus_riemann_hurwitz(genus, gamma, &monodromies)?;
        if shape.component_count != 1 {
            return Err(Error::InconsistentRamification(format!(
                "no connected {gamma} cover realizes these monodromies over genus {genus}"
            )));
        }
        Ok(GroupDatum { genus, gamma, points })
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn gamma(&self) -> FiniteGroup {
        self.gamma
    }

    pub fn points(&self) -> &[PointDatum] {
        &self.points
    }

    pub fn point(&self, label: &str) -> Option<&PointDatum> {
        self.points.iter().find(|p| p.label == label)
    }

    pub fn base(&self) -> Option<FiniteType> {
        self.points.first().map(|p| p.affine_type.base())
    }

    pub fn bad_points(&self) -> impl Iterator<Item = &PointDatum> {
        self.points.iter().filter(|p| p.is_bad)
    }

    pub fn monodromies(&self) -> Vec<Perm> {
        self.points.iter().map(|p| p.monodromy).collect()
    }

    pub fn is_iwahori(&self) -> bool {
        self.points.iter().all(PointDatum::is_iwahori)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("datum serializes")
    }
}

/// Per-point integer coefficients of a line bundle; absent entries are 0.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightBundle {
    weights: BTreeMap<String, Coefficients>,
}

impl WeightBundle {
    pub fn new() -> Self {
        WeightBundle::default()
    }

    pub fn set(&mut self, label: impl Into<String>, coeffs: Coefficients) -> &mut Self {
        self.weights.insert(label.into(), coeffs);
        self
    }

    pub fn coefficients(&self, label: &str) -> Option<&Coefficients> {
        self.weights.get(label)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Coefficients)> {
        self.weights.iter()
    }

    /// `level · Λ_o` at every point of `d`. Level 1 is the bundle `Λ⃗_o`.
    pub fn vacuum(d: &GroupDatum, level: i64) -> Self {
        let mut b = WeightBundle::new();
        for p in d.points() {
            b.set(p.label(), Coefficients::from([(0, level)]));
        }
        b
    }

    /// Every label exists in `d` and every key lies in that point's facet.
    pub fn check_against(&self, d: &GroupDatum) -> Result<()> {
        for (label, coeffs) in &self.weights {
            let p = d.point(label).ok_or_else(|| Error::UnknownPoint(label.clone()))?;
            p.check_coefficients(coeffs)?;
        }
        Ok(())
    }

    /// Coefficients at `p`, with zeros dropped.
    pub fn at(&self, p: &PointDatum) -> Coefficients {
        self.weights
            .get(p.label())
            .map(|c| c.iter().filter(|(_, &n)| n != 0).map(|(&v, &n)| (v, n)).collect())
            .unwrap_or_default()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bundle serializes")
    }
}

pub fn pic_basis(p: &PointDatum) -> Vec<usize> {
    p.facet.iter().copied().collect()
}

pub fn central_charge(p: &PointDatum, coeffs: &Coefficients) -> Result<i64> {
    p.check_coefficients(coeffs)?;
    coeffs.iter().try_fold(0i64, |acc, (&v, &n)| {
        n.checked_mul(i64::from(p.affine_type.dual_labels()[v]))
            .and_then(|x| acc.checked_add(x))
            .ok_or(Error::Overflow("central charge"))
    })
}

pub fn is_dominant(b: &WeightBundle) -> bool {
    b.weights.values().all(|c| c.values().all(|&n| n >= 0))
}

/// Central charge at every point of `d`, in point order.
pub fn charges(d: &GroupDatum, b: &WeightBundle) -> Result<Vec<i64>> {
    b.check_against(d)?;
    d.points.iter().map(|p| central_charge(p, &b.at(p))).collect()
}

/// `Some(charge)` when the central charge agrees at all points.
pub fn is_pic_delta(d: &GroupDatum, b: &WeightBundle) -> Result<Option<i64>> {
    let cs = charges(d, b)?;
    match cs.split_first() {
        None => Ok(Some(0)),
        Some((&c, rest)) => Ok(rest.iter().all(|&x| x == c).then_some(c)),
    }
}

/// `lcm over bad points of gcd_{i ∈ Y_x} ǎ_i`; 1 when there are no bad points.
pub fn c_delta(d: &GroupDatum) -> u64 {
    d.bad_points().map(PointDatum::label_gcd).fold(1, |acc, g| acc.lcm(&g))
}

/// Rank of `Pic^Δ`: the kernel of the pairwise charge differences.
pub fn pic_delta_rank(d: &GroupDatum) -> Result<usize> {
    if d.points.is_empty() {
        return Err(Error::NoPoints);
    }
    let total: usize = d.points.iter().map(|p| p.facet.len()).sum();
    Ok(total - (d.points.len() - 1))
}

/// Smallest-mass nonnegative coefficients on `p`'s facet with charge
/// `target`, preferring a single vertex.
pub fn dominant_representation(p: &PointDatum, target: u64) -> Option<Coefficients> {
    let labels = p.affine_type.dual_labels();
    if target == 0 {
        return Some(Coefficients::new());
    }
    if let Some(&v) = p.facet.iter().find(|&&v| target.is_multiple_of(u64::from(labels[v]))) {
        let n = i64::try_from(target / u64::from(labels[v])).ok()?;
        return Some(Coefficients::from([(v, n)]));
    }
    // fewest-coefficient combination, ties broken towards lower vertices
    let t = usize::try_from(target).ok()?;
    let mut best: Vec<Option<(usize, usize)>> = vec![None; t + 1];
    best[0] = Some((0, usize::MAX));
    for value in 1..=t {
        for &v in &p.facet {
            let a = labels[v] as usize;
            if a > value {
                continue;
            }
            if let Some((count, _)) = best[value - a] {
                if best[value].is_none_or(|(c, _)| count + 1 < c) {
                    best[value] = Some((count + 1, v));
                }
            }
        }
    }
    best[t]?;
    let mut coeffs = Coefficients::new();
    let mut value = t;
    while value > 0 {
        let (_, v) = best[value]?;
        *coeffs.entry(v).or_insert(0) += 1;
        value -= labels[v] as usize;
    }
    Some(coeffs)
}

/// Dominant `Pic^Δ` bundle of the least charge that is a multiple of
/// `c_delta(d)` and representable with nonnegative coefficients at every
/// point. Single-vertex supports `C/ǎ_i · Λ_i` are used whenever possible.
pub fn c_delta_bundle(d: &GroupDatum) -> (WeightBundle, u64) {
    let base = c_delta(d);
    let mut k = 1u64;
    loop {
        let charge = base * k;
        let reps: Option<Vec<_>> = d
            .points
            .iter()
            .map(|p| dominant_representation(p, charge).map(|c| (p.label.clone(), c)))
            .collect();
        if let Some(reps) = reps {
            let mut b = WeightBundle::new();
            for (label, c) in reps {
                b.set(label, c);
            }
            return (b, charge);
        }
        k += 1;
    }
}
