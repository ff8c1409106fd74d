//! Finite and affine Dynkin data.
//!
//! Vertices follow Kac's labeling (Infinite dimensional Lie algebras, Tables
//! Aff 1-3). Vertex `0` is always the special vertex `o`, whose dual label is
//! one. Dual labels are written under each vertex; `=>`, `=>>` and `<=` mark
//! double, triple and quadruple bonds, with the arrow pointing at the shorter
//! root. A facet in an input file is a set of these vertex indices.
//!
//! Untwisted types `X_N^(1)`:
//!
//! ```text
//! A1~1   0 <=> 1                        (a01 = a10 = -2)
//!        1     1
//! AN~1   0 - 1 - 2 - ... - N - 0        (cycle, all labels 1)
//! BN~1   0,1 - 2 - 3 - ... - (N-1) => N
//!        1 1   2   2         2        1
//! CN~1   0 => 1 - 2 - ... - (N-1) <= N
//!        1    1   1          1       1
//! DN~1   0,1 - 2 - ... - (N-2) - (N-1),N
//!        1 1   2           2      1   1
//! E6~1   1 - 2 - 3 - 4 - 5,  3 - 6 - 0
//!        1   2   3   2   1   labels: 6 -> 2, 0 -> 1
//! E7~1   0 - 1 - 2 - 3 - 4 - 5 - 6,  3 - 7
//!        1   2   3   4   3   2   1   labels: 7 -> 2
//! E8~1   1 - 2 - 3 - 4 - 5 - 6 - 7 - 0,  3 - 8
//!        2   4   6   5   4   3   2   1   labels: 8 -> 3
//! F4~1   0 - 1 - 2 => 3 - 4
//!        1   2   3    2   1
//! G2~1   0 - 1 =>> 2
//!        1   2     1
//! ```
//!
//! Twisted types:
//!
//! ```text
//! A2~2        0 <=<= 1                      (a01 = -4, a10 = -1)
//!             1      2
//! A(2l)~2     0 <= 1 - ... - (l-1) <= l     (l >= 2)
//!             1    2           2      2
//! A3~2        0 <= 1 => 2                   (Kac's D3~2)
//!             1    2    1
//! A(2l-1)~2   0,1 - 2 - ... - (l-1) <= l    (l >= 3)
//!             1 1   2           2      2
//! D(l+1)~2    0 <= 1 - ... - (l-1) => l     (l >= 3)
//!             1    2           2      1
//! E6~2        0 - 1 - 2 <= 3 - 4
//!             1   2   3    4   2
//! D4~3        0 - 1 <<= 2
//!             1   2     3
//! ```
//!
//! The Cartan convention is `a_ij = <alpha_i^vee, alpha_j>`, so the dual
//! labels form the left null vector: `sum_i label_i * a_ij = 0` for all `j`.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest rank accepted for a finite type.
pub const MAX_RANK: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Series {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl Series {
    pub const ALL: [Series; 7] = [
        Series::A,
        Series::B,
        Series::C,
        Series::D,
        Series::E,
        Series::F,
        Series::G,
    ];

    pub fn letter(self) -> char {
        match self {
            Series::A => 'A',
            Series::B => 'B',
            Series::C => 'C',
            Series::D => 'D',
            Series::E => 'E',
            Series::F => 'F',
            Series::G => 'G',
        }
    }

    fn from_letter(c: char) -> Option<Series> {
        Series::ALL
            .iter()
            .copied()
            .find(|s| s.letter() == c.to_ascii_uppercase())
    }
}

/// Type `X_N` of a simple Lie algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteType {
    series: Series,
    rank: usize,
}

impl FiniteType {
    pub fn new(series: Series, rank: usize) -> Result<Self> {
        let ok = match series {
            Series::A => rank >= 1,
            Series::B => rank >= 3,
            Series::C => rank >= 2,
            Series::D => rank >= 4,
            Series::E => (6..=8).contains(&rank),
            Series::F => rank == 4,
            Series::G => rank == 2,
        };
        if !ok || rank > MAX_RANK {
            return Err(Error::InvalidFiniteType {
                series: series.letter(),
                rank,
            });
        }
        Ok(FiniteType { series, rank })
    }

    pub fn series(self) -> Series {
        self.series
    }

    pub fn rank(self) -> usize {
        self.rank
    }

    /// Whether the Dynkin diagram has an automorphism of order `twist`.
    pub fn admits_twist(self, twist: u8) -> bool {
        match twist {
            1 => true,
            2 => matches!(
                (self.series, self.rank),
                (Series::A, 2..) | (Series::D, _) | (Series::E, 6)
            ),
            3 => self.series == Series::D && self.rank == 4,
            _ => false,
        }
    }

    /// Cartan matrix over the finite vertices `1..=N`, stored zero-based.
    pub fn cartan_matrix(self) -> Vec<Vec<i64>> {
        let affine = untwisted_diagram(self);
        let n = self.rank;
        (1..=n)
            .map(|i| (1..=n).map(|j| affine.cartan[i][j]).collect())
            .collect()
    }

    /// Every finite type of rank at most `max_rank`.
    pub fn inventory(max_rank: usize) -> Vec<FiniteType> {
        let mut out = Vec::new();
        for series in Series::ALL {
            for rank in 1..=max_rank.min(MAX_RANK) {
                if let Ok(t) = FiniteType::new(series, rank) {
                    out.push(t);
                }
            }
        }
        out
    }
}

impl fmt::Display for FiniteType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.series.letter(), self.rank)
    }
}

impl FromStr for FiniteType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut chars = s.chars();
        let series = chars
            .next()
            .and_then(Series::from_letter)
            .ok_or_else(|| Error::ParseType(s.to_string()))?;
        let rank: usize = chars
            .as_str()
            .trim_start_matches('_')
            .parse()
            .map_err(|_| Error::ParseType(s.to_string()))?;
        FiniteType::new(series, rank)
    }
}

/// Affine Dynkin type `X_N^(r)` with its generalized Cartan matrix and dual
/// Kac labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AffineType {
    base: FiniteType,
    twist: u8,
    cartan: Vec<Vec<i64>>,
    dual_labels: Vec<u32>,
}

impl AffineType {
    pub fn new(base: FiniteType, twist: u8) -> Result<Self> {
        if !base.admits_twist(twist) {
            return Err(Error::InadmissibleTwist {
                base: base.to_string(),
                twist,
            });
        }
        let diagram = match twist {
            1 => untwisted_diagram(base),
            2 => order_two_diagram(base),
            _ => d4_order_three_diagram(),
        };
        let t = AffineType {
            base,
            twist,
            cartan: diagram.cartan,
            dual_labels: diagram.dual_labels,
        };
        t.verify()?;
        Ok(t)
    }

    pub fn untwisted(base: FiniteType) -> Self {
        AffineType::new(base, 1).expect("twist 1 is admissible for every base")
    }

    pub fn base(&self) -> FiniteType {
        self.base
    }

    pub fn twist(&self) -> u8 {
        self.twist
    }

    pub fn vertex_count(&self) -> usize {
        self.dual_labels.len()
    }

    pub fn vertices(&self) -> std::ops::Range<usize> {
        0..self.vertex_count()
    }

    pub fn special_vertex(&self) -> usize {
        0
    }

    pub fn cartan(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    pub fn dual_labels(&self) -> &[u32] {
        &self.dual_labels
    }

    pub fn dual_label(&self, vertex: usize) -> Option<u32> {
        self.dual_labels.get(vertex).copied()
    }

    /// All implemented affine types whose base has rank at most `max_rank`.
    pub fn inventory(max_rank: usize) -> Vec<AffineType> {
        let mut out = Vec::new();
        for base in FiniteType::inventory(max_rank) {
            for twist in 1..=3 {
                if let Ok(t) = AffineType::new(base, twist) {
                    out.push(t);
                }
            }
        }
        out
    }

    // Stored labels must be the primitive positive left null vector.
    fn verify(&self) -> Result<()> {
        let n = self.vertex_count();
        let bad = |what: &str| Error::Inconsistent(format!("{self}: {what}"));
        if self.cartan.len() != n || self.cartan.iter().any(|row| row.len() != n) {
            return Err(bad("Cartan matrix shape"));
        }
        for j in 0..n {
            let s: i64 = (0..n).map(|i| i64::from(self.dual_labels[i]) * self.cartan[i][j]).sum();
            if s != 0 {
                return Err(bad("dual labels are not a left null vector"));
            }
        }
        let g = self.dual_labels.iter().fold(0u32, |acc, &a| acc.gcd(&a));
        if g != 1 || self.dual_labels[0] != 1 {
            return Err(bad("dual labels are not primitive with label 1 at o"));
        }
        if self.dual_labels.iter().any(|&a| !(1..=6).contains(&a)) {
            return Err(bad("dual label outside 1..=6"));
        }
        Ok(())
    }
}

impl fmt::Display for AffineType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twist == 1 {
            write!(f, "{}", self.base)
        } else {
            write!(f, "{}~{}", self.base, self.twist)
        }
    }
}

impl FromStr for AffineType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (base, twist) = match s.trim().split_once('~') {
            Some((b, t)) => (b, t.trim().parse::<u8>().map_err(|_| Error::ParseType(s.to_string()))?),
            None => (s.trim(), 1),
        };
        AffineType::new(base.parse()?, twist)
    }
}

impl Serialize for AffineType {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for AffineType {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Serialize for FiniteType {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FiniteType {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn twisted_type(base: FiniteType, order: u8) -> Result<AffineType> {
    AffineType::new(base, order)
}

pub fn dual_kac_labels(t: &AffineType) -> Vec<u32> {
    t.dual_labels.clone()
}

pub fn affine_cartan_matrix(t: &AffineType) -> Vec<Vec<i64>> {
    t.cartan.clone()
}

/// Permutation of affine vertices; vertex `o = 0` is always fixed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VertexInvolution {
    images: Vec<usize>,
}

impl VertexInvolution {
    pub fn identity(vertex_count: usize) -> Self {
        VertexInvolution {
            images: (0..vertex_count).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let inv = VertexInvolution { images };
        let self_inverse = (0..n).all(|i| inv.images[i] < n && inv.images[inv.images[i]] == i);
        if !self_inverse || inv.images.first().is_some_and(|&o| o != 0) {
            return Err(Error::Precondition(format!(
                "{:?} is not an involution fixing o",
                inv.images
            )));
        }
        Ok(inv)
    }

    pub fn apply(&self, vertex: usize) -> usize {
        self.images.get(vertex).copied().unwrap_or(vertex)
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }
}

/// The involution `i -> i* = -w0(i)` on the vertices of `base`'s untwisted
/// affine diagram.
pub fn dual_involution(base: FiniteType) -> VertexInvolution {
    let cartan = base.cartan_matrix();
    let n = cartan.len();
    let word = longest_word(&cartan);
    let mut images = vec![0usize; n + 1];
    for k in 0..n {
        let mut weight = vec![0i64; n];
        weight[k] = 1;
        for &i in &word {
            reflect(&cartan, &mut weight, i);
        }
        // w0 maps the fundamental weight k to minus another fundamental weight
        let star = weight
            .iter()
            .position(|&x| x == -1)
            .expect("w0 sends dominant weights to antidominant ones");
        images[k + 1] = star + 1;
    }
    VertexInvolution { images }
}

// s_i(lambda) = lambda - lambda_i alpha_i in fundamental-weight coordinates.
fn reflect(cartan: &[Vec<i64>], weight: &mut [i64], i: usize) {
    let k = weight[i];
    for (j, w) in weight.iter_mut().enumerate() {
        *w -= k * cartan[j][i];
    }
}

// Reduced word for w0: descend from rho until every coordinate is negative.
fn longest_word(cartan: &[Vec<i64>]) -> Vec<usize> {
    let mut rho = vec![1i64; cartan.len()];
    let mut word = Vec::new();
    while let Some(i) = rho.iter().position(|&x| x > 0) {
        reflect(cartan, &mut rho, i);
        word.push(i);
    }
    word
}

struct Diagram {
    cartan: Vec<Vec<i64>>,
    dual_labels: Vec<u32>,
}

impl Diagram {
    fn new(dual_labels: Vec<u32>) -> Self {
        let n = dual_labels.len();
        let mut cartan = vec![vec![0i64; n]; n];
        for (i, row) in cartan.iter_mut().enumerate() {
            row[i] = 2;
        }
        Diagram { cartan, dual_labels }
    }

    fn simple(&mut self, i: usize, j: usize) -> &mut Self {
        self.bond(i, j, -1, -1)
    }

    // a_ij and a_ji for one edge.
    fn bond(&mut self, i: usize, j: usize, a_ij: i64, a_ji: i64) -> &mut Self {
        self.cartan[i][j] = a_ij;
        self.cartan[j][i] = a_ji;
        self
    }

    fn chain(&mut self, from: usize, to: usize) -> &mut Self {
        for i in from..to {
            self.simple(i, i + 1);
        }
        self
    }

    fn finish(&mut self) -> Diagram {
        Diagram {
            cartan: std::mem::take(&mut self.cartan),
            dual_labels: std::mem::take(&mut self.dual_labels),
        }
    }
}

fn untwisted_diagram(base: FiniteType) -> Diagram {
    let l = base.rank;
    match base.series {
        Series::A if l == 1 => Diagram::new(vec![1, 1]).bond(0, 1, -2, -2).finish(),
        Series::A => Diagram::new(vec![1; l + 1]).chain(0, l).simple(l, 0).finish(),
        Series::B => {
            let mut labels = vec![2; l + 1];
            labels[0] = 1;
            labels[1] = 1;
            labels[l] = 1;
            Diagram::new(labels)
                .simple(0, 2)
                .chain(1, l - 1)
                .bond(l - 1, l, -1, -2)
                .finish()
        }
        Series::C => Diagram::new(vec![1; l + 1])
            .bond(0, 1, -1, -2)
            .chain(1, l - 1)
            .bond(l - 1, l, -2, -1)
            .finish(),
        Series::D => {
            let mut labels = vec![2; l + 1];
            for v in [0, 1, l - 1, l] {
                labels[v] = 1;
            }
            Diagram::new(labels)
                .simple(0, 2)
                .chain(1, l - 1)
                .simple(l - 2, l)
                .finish()
        }
        Series::E => match l {
            6 => Diagram::new(vec![1, 1, 2, 3, 2, 1, 2])
                .chain(1, 5)
                .simple(3, 6)
                .simple(6, 0)
                .finish(),
            7 => Diagram::new(vec![1, 2, 3, 4, 3, 2, 1, 2])
                .chain(0, 6)
                .simple(3, 7)
                .finish(),
            _ => Diagram::new(vec![1, 2, 4, 6, 5, 4, 3, 2, 3])
                .chain(1, 7)
                .simple(7, 0)
                .simple(3, 8)
                .finish(),
        },
        Series::F => Diagram::new(vec![1, 2, 3, 2, 1])
            .chain(0, 2)
            .bond(2, 3, -1, -2)
            .simple(3, 4)
            .finish(),
        Series::G => Diagram::new(vec![1, 2, 1]).simple(0, 1).bond(1, 2, -1, -3).finish(),
    }
}

fn order_two_diagram(base: FiniteType) -> Diagram {
    let n = base.rank;
    match base.series {
        Series::A if n == 2 => Diagram::new(vec![1, 2]).bond(0, 1, -4, -1).finish(),
        Series::A if n == 3 => d_twisted_diagram(2),
        Series::A if n.is_multiple_of(2) => {
            // A_{2l}^(2)
            let l = n / 2;
            let mut labels = vec![2; l + 1];
            labels[0] = 1;
            Diagram::new(labels)
                .bond(0, 1, -2, -1)
                .chain(1, l - 1)
                .bond(l - 1, l, -2, -1)
                .finish()
        }
        Series::A => {
            // A_{2l-1}^(2), l >= 3
            let l = n.div_ceil(2);
            let mut labels = vec![2; l + 1];
            labels[0] = 1;
            labels[1] = 1;
            Diagram::new(labels)
                .simple(0, 2)
                .simple(1, 2)
                .chain(2, l - 1)
                .bond(l - 1, l, -2, -1)
                .finish()
        }
        Series::D => d_twisted_diagram(n - 1),
        _ => Diagram::new(vec![1, 2, 3, 4, 2])
            .chain(0, 2)
            .bond(2, 3, -2, -1)
            .simple(3, 4)
            .finish(),
    }
}

// D_{l+1}^(2): 0 <= 1 - ... - (l-1) => l
fn d_twisted_diagram(l: usize) -> Diagram {
    let mut labels = vec![2; l + 1];
    labels[0] = 1;
    labels[l] = 1;
    Diagram::new(labels)
        .bond(0, 1, -2, -1)
        .chain(1, l - 1)
        .bond(l - 1, l, -1, -2)
        .finish()
}

fn d4_order_three_diagram() -> Diagram {
    Diagram::new(vec![1, 2, 3]).simple(0, 1).bond(1, 2, -3, -1).finish()
}
