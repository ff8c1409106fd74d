//! Permutations of `{1,2,3}` and the subgroups of `S3` used as Galois groups.
//!
//! Composition is right-to-left: `a * b` applies `b` first. Every product
//! identity check in the crate uses this convention.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A permutation of `{1,2,3}`, stored as zero-based images.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Perm([u8; 3]);

impl Perm {
    pub const IDENTITY: Perm = Perm([0, 1, 2]);
    pub const T12: Perm = Perm([1, 0, 2]);
    pub const T13: Perm = Perm([2, 1, 0]);
    pub const T23: Perm = Perm([0, 2, 1]);
    /// `(123)`: 1 -> 2 -> 3 -> 1.
    pub const C123: Perm = Perm([1, 2, 0]);
    pub const C132: Perm = Perm([2, 0, 1]);

    /// All of `S3` in serialization order.
    pub const ALL: [Perm; 6] = [Perm::IDENTITY, Perm::T12, Perm::T13, Perm::T23, Perm::C123, Perm::C132];

    pub fn from_images(images: [u8; 3]) -> Option<Perm> {
        let mut seen = [false; 3];
        for &i in &images {
            if i > 2 || seen[i as usize] {
                return None;
            }
            seen[i as usize] = true;
        }
        Some(Perm(images))
    }

    /// Image of `point` in `1..=3`.
    pub fn apply(self, point: u8) -> u8 {
        self.0[(point - 1) as usize] + 1
    }

    pub fn inverse(self) -> Perm {
        let mut out = [0u8; 3];
        for (i, &j) in self.0.iter().enumerate() {
            out[j as usize] = i as u8;
        }
        Perm(out)
    }

    /// `delta * self * delta^-1`.
    pub fn conjugate_by(self, delta: Perm) -> Perm {
        delta * self * delta.inverse()
    }

    pub fn is_identity(self) -> bool {
        self == Perm::IDENTITY
    }

    pub fn order(self) -> u8 {
        match self.fixed_points() {
            3 => 1,
            1 => 2,
            _ => 3,
        }
    }

    pub fn is_transposition(self) -> bool {
        self.order() == 2
    }

    pub fn is_three_cycle(self) -> bool {
        self.order() == 3
    }

    pub fn is_even(self) -> bool {
        self.order() != 2
    }

    fn fixed_points(self) -> usize {
        self.0.iter().enumerate().filter(|(i, &j)| *i == j as usize).count()
    }

    fn index(self) -> usize {
        Perm::ALL.iter().position(|&p| p == self).unwrap()
    }

    pub fn pow(self, exp: u32) -> Perm {
        (0..exp).fold(Perm::IDENTITY, |acc, _| acc * self)
    }
}

impl Mul for Perm {
    type Output = Perm;

    fn mul(self, rhs: Perm) -> Perm {
        Perm([
            self.0[rhs.0[0] as usize],
            self.0[rhs.0[1] as usize],
            self.0[rhs.0[2] as usize],
        ])
    }
}

impl PartialOrd for Perm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Perm {
    fn cmp(&self, other: &Self) -> Ordering {
        self.index().cmp(&other.index())
    }
}

impl Default for Perm {
    fn default() -> Self {
        Perm::IDENTITY
    }
}

/// Ordered product `g_1 * g_2 * ... * g_s`.
pub fn product<'a, I: IntoIterator<Item = &'a Perm>>(elements: I) -> Perm {
    elements.into_iter().fold(Perm::IDENTITY, |acc, &g| acc * g)
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.index() {
            0 => "e",
            1 => "(12)",
            2 => "(13)",
            3 => "(23)",
            4 => "(123)",
            _ => "(132)",
        };
        f.write_str(s)
    }
}

impl FromStr for Perm {
    type Err = Error;

    /// Accepts `e`, `()`, `id`, and products of cycles such as `(12)(23)`
    /// (composed right to left). Digits inside a cycle may be separated by
    /// spaces or commas.
    fn from_str(s: &str) -> Result<Perm> {
        let err = || Error::ParseElement(s.to_string());
        let t = s.trim();
        if t.is_empty() {
            return Err(err());
        }
        if matches!(t, "e" | "1" | "id" | "()") {
            return Ok(Perm::IDENTITY);
        }
        let mut result = Perm::IDENTITY;
        let mut rest = t;
        while !rest.is_empty() {
            rest = rest.trim_start();
            let body_end = rest.find(')').ok_or_else(err)?;
            if !rest.starts_with('(') {
                return Err(err());
            }
            let body = &rest[1..body_end];
            let digits: Vec<u8> = body
                .chars()
                .filter(|c| !c.is_whitespace() && *c != ',')
                .map(|c| match c {
                    '1'..='3' => Ok(c as u8 - b'1'),
                    _ => Err(err()),
                })
                .collect::<Result<_>>()?;
            let mut images = [0u8, 1, 2];
            let mut seen = [false; 3];
            for &d in &digits {
                if seen[d as usize] {
                    return Err(err());
                }
                seen[d as usize] = true;
            }
            for (k, &d) in digits.iter().enumerate() {
                images[d as usize] = digits[(k + 1) % digits.len()];
            }
            result = result * Perm(images);
            rest = &rest[body_end + 1..];
        }
        Ok(result)
    }
}

impl Serialize for Perm {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Perm {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses a comma- or space-separated list of elements, optionally wrapped
/// in brackets or one extra pair of parentheses: `"(12),(23),(132)"`,
/// `"[(12), (23)]"`, `"((12),(23),(132))"`.
pub fn parse_tuple(s: &str) -> Result<Vec<Perm>> {
    let mut t = s.trim();
    if let Some(inner) = t.strip_prefix('[').and_then(|x| x.strip_suffix(']')) {
        t = inner.trim();
    } else if t.starts_with("((") && t.ends_with("))") {
        t = &t[1..t.len() - 1];
    }
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, c) in t.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.checked_sub(1).ok_or_else(|| Error::ParseElement(s.into()))?,
            ',' | ' ' | ';' if depth == 0 => {
                let token = t[start..i].trim();
                if !token.is_empty() {
                    out.push(token.parse()?);
                }
                start = i + 1;
            }
            _ => {}
        }
    }
    let token = t[start..].trim();
    if !token.is_empty() {
        out.push(token.parse()?);
    }
    Ok(out)
}

pub fn format_tuple(tuple: &[Perm]) -> String {
    tuple.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

/// Kind of a Galois group, by isomorphism type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupKind {
    Trivial,
    C2,
    C3,
    S3,
}

/// A subgroup of `S3`, stored as a membership mask over [`Perm::ALL`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FiniteGroup {
    mask: u8,
}

impl FiniteGroup {
    pub fn trivial() -> Self {
        FiniteGroup::generated_by(&[])
    }

    /// `<(12)>`.
    pub fn c2() -> Self {
        FiniteGroup::generated_by(&[Perm::T12])
    }

    pub fn c3() -> Self {
        FiniteGroup::generated_by(&[Perm::C123])
    }

    pub fn s3() -> Self {
        FiniteGroup { mask: 0b11_1111 }
    }

    pub fn of_kind(kind: GroupKind) -> Self {
        match kind {
            GroupKind::Trivial => FiniteGroup::trivial(),
            GroupKind::C2 => FiniteGroup::c2(),
            GroupKind::C3 => FiniteGroup::c3(),
            GroupKind::S3 => FiniteGroup::s3(),
        }
    }

    pub fn generated_by(generators: &[Perm]) -> Self {
        let mut mask = 1u8;
        loop {
            let mut next = mask;
            for a in Perm::ALL.iter().filter(|p| mask & (1 << p.index()) != 0) {
                for &g in generators {
                    next |= 1 << (*a * g).index();
                }
            }
            if next == mask {
                return FiniteGroup { mask };
            }
            mask = next;
        }
    }

    pub fn order(self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn kind(self) -> GroupKind {
        match self.order() {
            1 => GroupKind::Trivial,
            2 => GroupKind::C2,
            3 => GroupKind::C3,
            _ => GroupKind::S3,
        }
    }

    pub fn contains(self, g: Perm) -> bool {
        self.mask & (1 << g.index()) != 0
    }

    pub fn elements(self) -> impl Iterator<Item = Perm> {
        Perm::ALL.into_iter().filter(move |&p| self.contains(p))
    }

    pub fn is_subgroup_of(self, other: FiniteGroup) -> bool {
        self.mask & !other.mask == 0
    }

    pub fn conjugate_by(self, delta: Perm) -> FiniteGroup {
        let gens: Vec<Perm> = self.elements().map(|g| g.conjugate_by(delta)).collect();
        FiniteGroup::generated_by(&gens)
    }

    /// Conjugacy class of `g` inside this group.
    pub fn class_of(self, g: Perm) -> Result<ConjugacyClass> {
        if !self.contains(g) {
            return Err(Error::Precondition(format!("{g} is not in {self}")));
        }
        let mut elements: Vec<Perm> = self.elements().map(|d| g.conjugate_by(d)).collect();
        elements.sort();
        elements.dedup();
        Ok(ConjugacyClass { elements })
    }

    pub fn conjugacy_classes(self) -> Vec<ConjugacyClass> {
        let mut out: Vec<ConjugacyClass> = Vec::new();
        for g in self.elements() {
            let class = self.class_of(g).expect("g is in the group");
            if !out.contains(&class) {
                out.push(class);
            }
        }
        out
    }
}

impl fmt::Display for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            GroupKind::Trivial => f.write_str("Trivial"),
            GroupKind::C3 => f.write_str("C3"),
            GroupKind::S3 => f.write_str("S3"),
            GroupKind::C2 if *self == FiniteGroup::c2() => f.write_str("C2"),
            GroupKind::C2 => {
                let g = self.elements().find(|g| !g.is_identity()).unwrap();
                write!(f, "<{g}>")
            }
        }
    }
}

impl FromStr for FiniteGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "trivial" | "1" | "c1" => return Ok(FiniteGroup::trivial()),
            "c2" | "z2" => return Ok(FiniteGroup::c2()),
            "c3" | "z3" | "a3" => return Ok(FiniteGroup::c3()),
            "s3" => return Ok(FiniteGroup::s3()),
            _ => {}
        }
        let inner = t
            .strip_prefix('<')
            .and_then(|x| x.strip_suffix('>'))
            .ok_or_else(|| Error::ParseGroup(s.to_string()))?;
        Ok(FiniteGroup::generated_by(&parse_tuple(inner)?))
    }
}

impl Serialize for FiniteGroup {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FiniteGroup {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A conjugacy class of some subgroup of `S3`, elements sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConjugacyClass {
    elements: Vec<Perm>,
}

impl ConjugacyClass {
    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn representative(&self) -> Perm {
        self.elements[0]
    }

    pub fn contains(&self, g: Perm) -> bool {
        self.elements.contains(&g)
    }

    pub fn conjugate_by(&self, delta: Perm) -> ConjugacyClass {
        let mut elements: Vec<Perm> = self.elements.iter().map(|g| g.conjugate_by(delta)).collect();
        elements.sort();
        ConjugacyClass { elements }
    }
}
