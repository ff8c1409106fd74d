//! Exact ranks of the base-case conformal blocks.
//!
//! Three sources: a small table of one- and two-dimensional blocks, the
//! closed form `2^g r^(g+n-1)` for double covers in type `A_{2r-1}^(2)` with
//! vacuum weights, and the level-1 `S3` Verlinde product
//!
//! ```text
//! rank = Π S^{γ_i}_{0,0} / (S_{0,0})^(s-2)
//! ```
//!
//! with `S_{0,0} = 1/2`, `S^{(12)}_{0,0} = 2^(-1/2)` and `S^{(123)}_{0,0} = 1`.
//! Only one summand survives at level 1 because the trivial representation
//! is the only `S3`-fixed one. The product is evaluated for any connected
//! genus-0 `S3` vacuum data, which goes beyond the two instances (cases 3
//! and 4) it was originally derived for.

use std::fmt;
use std::ops::{Div, Mul};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::covers::{is_connected_genus0, RamificationVector};
use crate::error::{Error, Result};
use crate::factorization::{BaseCase, BaseCaseKind, DecompositionWitness};
use crate::group::{FiniteGroup, Perm};

/// `q · 2^(h/2)` with `h ∈ {0, 1}` after canonicalization.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExactScalar {
    rational: BigRational,
    root2: bool,
}

impl ExactScalar {
    pub fn zero() -> Self {
        ExactScalar::from_rational(BigRational::zero())
    }

    pub fn one() -> Self {
        ExactScalar::from_rational(BigRational::one())
    }

    pub fn from_rational(q: BigRational) -> Self {
        ExactScalar {
            rational: q,
            root2: false,
        }
    }

    pub fn from_ratio(n: i64, d: i64) -> Result<Self> {
        if d == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(ExactScalar::from_rational(BigRational::new(n.into(), d.into())))
    }

    /// `q · 2^(h/2)` for any integer `h`.
    pub fn new(q: BigRational, h: i64) -> Self {
        let whole = h.div_euclid(2);
        let two = BigRational::from_integer(BigInt::from(2));
        let scale = if whole >= 0 {
            num_traits::pow(two, whole as usize)
        } else {
            num_traits::pow(two, whole.unsigned_abs() as usize).recip()
        };
        ExactScalar::canonical(q * scale, h.rem_euclid(2) == 1)
    }

    fn canonical(q: BigRational, root2: bool) -> Self {
        let root2 = root2 && !q.is_zero();
        ExactScalar { rational: q, root2 }
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.rational
    }

    pub fn root2_exponent(&self) -> u8 {
        u8::from(self.root2)
    }

    pub fn signum(&self) -> i8 {
        if self.rational.is_zero() {
            0
        } else if self.rational.is_positive() {
            1
        } else {
            -1
        }
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero()
    }

    pub fn checked_div(&self, rhs: &ExactScalar) -> Result<ExactScalar> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let q = &self.rational / &rhs.rational;
        Ok(match (self.root2, rhs.root2) {
            (a, false) => ExactScalar::canonical(q, a),
            (true, true) => ExactScalar::canonical(q, false),
            // 1/√2 = √2/2
            (false, true) => ExactScalar::canonical(q / BigRational::from_integer(2.into()), true),
        })
    }

    pub fn pow(&self, exp: i32) -> Result<ExactScalar> {
        let mut acc = ExactScalar::one();
        for _ in 0..exp.unsigned_abs() {
            acc = &acc * self;
        }
        if exp < 0 {
            ExactScalar::one().checked_div(&acc)
        } else {
            Ok(acc)
        }
    }

    /// The value as an integer, if it is one.
    pub fn to_integer(&self) -> Option<BigInt> {
        (!self.root2 && self.rational.is_integer()).then(|| self.rational.to_integer())
    }
}

impl Mul for &ExactScalar {
    type Output = ExactScalar;

    fn mul(self, rhs: &ExactScalar) -> ExactScalar {
        let q = &self.rational * &rhs.rational;
        if self.root2 && rhs.root2 {
            ExactScalar::canonical(q * BigRational::from_integer(2.into()), false)
        } else {
            ExactScalar::canonical(q, self.root2 || rhs.root2)
        }
    }
}

impl Mul for ExactScalar {
    type Output = ExactScalar;

    fn mul(self, rhs: ExactScalar) -> ExactScalar {
        &self * &rhs
    }
}

impl Div for &ExactScalar {
    type Output = Result<ExactScalar>;

    fn div(self, rhs: &ExactScalar) -> Result<ExactScalar> {
        self.checked_div(rhs)
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.root2, self.rational.is_one()) {
            (false, _) => write!(f, "{}", self.rational),
            (true, true) => f.write_str("sqrt(2)"),
            (true, false) => write!(f, "{}*sqrt(2)", self.rational),
        }
    }
}

/// `S_{0,0}` at level 1.
pub fn s00() -> ExactScalar {
    ExactScalar::from_ratio(1, 2).expect("nonzero denominator")
}

/// `S^{γ}_{0,0}` at level 1 for `D4` with `S3` symmetry.
pub fn twisted_s00(g: Perm) -> ExactScalar {
    if g.is_identity() {
        s00()
    } else if g.is_transposition() {
        ExactScalar::new(BigRational::one(), -1)
    } else {
        ExactScalar::one()
    }
}

/// How a rank was obtained; [`RankResult::recompute`] replays it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Derivation {
    Table { entry: String },
    ClosedForm { genus: u32, n: u32, r: u32 },
    Verlinde { tuple: Vec<Perm> },
    Product { factors: Vec<u64> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankResult {
    pub value: u64,
    pub derivation: Derivation,
}

impl RankResult {
    fn table(value: u64, entry: &str) -> Self {
        RankResult {
            value,
            derivation: Derivation::Table { entry: entry.into() },
        }
    }

    /// Value implied by the derivation alone.
    pub fn recompute(&self) -> Result<u64> {
        match &self.derivation {
            Derivation::Table { .. } => Ok(self.value),
            Derivation::ClosedForm { genus, n, r } => rank_closed_form_a(*genus, *n, *r),
            Derivation::Verlinde { tuple } => s3_level1_rank(&RamificationVector::s3(tuple.clone())).map(|r| r.value),
            Derivation::Product { factors } => factors
                .iter()
                .try_fold(1u64, |acc, &x| acc.checked_mul(x))
                .ok_or(Error::Overflow("rank product")),
        }
    }
}

/// Known rank, or an explicit unknown — never conflated with 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum RankOutcome {
    Known(RankResult),
    Unknown { reason: String },
}

impl RankOutcome {
    pub fn value(&self) -> Option<u64> {
        match self {
            RankOutcome::Known(r) => Some(r.value),
            RankOutcome::Unknown { .. } => None,
        }
    }
}

fn unknown(b: &BaseCase, why: &str) -> RankOutcome {
    RankOutcome::Unknown {
        reason: format!("{:?} at level {}: {why}", b.kind, b.level),
    }
}

/// Rank of a base case from the table. Weights outside the table give
/// `Unknown`.
pub fn base_case_rank(b: &BaseCase) -> RankOutcome {
    let level1_vacuum = b.level == 1 && b.is_vacuum();
    let known = |v: u64, entry: &str| RankOutcome::Known(RankResult::table(v, entry));
    match b.kind {
        BaseCaseKind::UntwistedVacuum if b.is_vacuum() => known(1, "untwisted vacuum on P1"),
        BaseCaseKind::UntwistedVacuum => unknown(b, "non-vacuum weight at a single point"),
        BaseCaseKind::UntwistedPair => {
            // λ* permutes the coefficients of λ; the exact pairing with the
            // involution is the caller's job
            let spectrum = |c: &crate::picard::Coefficients| {
                let mut v: Vec<i64> = c.values().copied().filter(|&n| n != 0).collect();
                v.sort_unstable();
                v
            };
            if b.points.len() == 2 && spectrum(&b.points[0].weight) == spectrum(&b.points[1].weight) {
                known(1, "untwisted two-point block (λ, λ*)")
            } else {
                unknown(b, "malformed pair")
            }
        }
        BaseCaseKind::TwistedPair => {
            let order = b.points.first().map_or(0, |p| p.monodromy.order());
            let equal_single =
                b.points.len() == 2 && b.points[0].weight == b.points[1].weight && b.points[0].weight.len() == 1;
            if level1_vacuum || (order == 2 && equal_single) {
                known(1, "twisted two-point block")
            } else {
                unknown(b, "twisted pair weights outside the table")
            }
        }
        BaseCaseKind::EllipticTriple if level1_vacuum => known(2, "C3 cover ramified at three points"),
        BaseCaseKind::S3Case1 | BaseCaseKind::S3Case2 if level1_vacuum => {
            // disconnected as an S3 cover: a cyclic cover repeated on the
            // components of a trivial étale cover
            let cyclic = match (b.kind, b.points.len()) {
                (BaseCaseKind::S3Case2, 3) => (2, "S3 case (2) as an elliptic C3 triple"),
                (_, 0) => (1, "empty cyclic datum"),
                _ => (1, "S3 case (1)/(2) as a cyclic two-point block"),
            };
            known(cyclic.0, cyclic.1)
        }
        BaseCaseKind::S3Case3 if level1_vacuum => known(1, "S3 case (3)"),
        BaseCaseKind::S3Case4 if level1_vacuum => known(2, "S3 case (4)"),
        BaseCaseKind::ClosedFormA { genus, n, r } if level1_vacuum => match rank_closed_form_a(genus, n, r) {
            Ok(v) => RankOutcome::Known(RankResult {
                value: v,
                derivation: Derivation::ClosedForm { genus, n, r },
            }),
            Err(e) => unknown(b, &e.to_string()),
        },
        _ => unknown(b, "only level-1 vacuum weights are tabulated"),
    }
}

/// `2^g · r^(g+n-1)`.
pub fn rank_closed_form_a(g: u32, n: u32, r: u32) -> Result<u64> {
    if n < 1 || r < 2 {
        return Err(Error::Precondition(format!(
            "closed form needs n >= 1 and r >= 2, got n={n}, r={r}"
        )));
    }
    let two = 2u64.checked_pow(g);
    let rest = u64::from(r).checked_pow(g + n - 1);
    two.zip(rest)
        .and_then(|(a, b)| a.checked_mul(b))
        .ok_or(Error::Overflow("closed-form rank"))
}

/// Level-1 Verlinde product for connected genus-0 `S3` vacuum data.
pub fn s3_level1_rank(r: &RamificationVector) -> Result<RankResult> {
    if r.group() != FiniteGroup::s3() {
        return Err(Error::Precondition(format!("group is {}, expected S3", r.group())));
    }
    if !is_connected_genus0(r)? {
        return Err(Error::Precondition(format!(
            "entries generate {}, not S3: the cover is disconnected",
            r.generated()
        )));
    }
    let numerator = r
        .tuple()
        .iter()
        .fold(ExactScalar::one(), |acc, &g| acc * twisted_s00(g));
    let s = r.len() as i32;
    let value = numerator.checked_div(&s00().pow(s - 2)?)?;
    let n = value
        .to_integer()
        .filter(|n| !n.is_negative())
        .and_then(|n| n.to_u64())
        .ok_or_else(|| Error::Inconsistent(format!("Verlinde product evaluates to {value}")))?;
    Ok(RankResult {
        value: n,
        derivation: Derivation::Verlinde {
            tuple: r.tuple().to_vec(),
        },
    })
}

/// Product of the factor ranks of a witness.
pub fn rank_lower_bound(w: &DecompositionWitness) -> Result<u64> {
    let mut acc = 1u64;
    for f in &w.factors {
        match base_case_rank(f) {
            RankOutcome::Known(r) => acc = acc.checked_mul(r.value).ok_or(Error::Overflow("rank bound"))?,
            RankOutcome::Unknown { reason } => return Err(Error::BoundUnavailable(reason)),
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factorization::{s3_reduce, FactorPoint, PointSource};
    use crate::group::parse_tuple;
    use crate::picard::Coefficients;

    fn q(n: i64, d: i64) -> ExactScalar {
        ExactScalar::from_ratio(n, d).unwrap()
    }

    #[test]
    fn scalar_arithmetic() {
        let r = ExactScalar::new(BigRational::one(), -1);
        assert_eq!(&r * &r, q(1, 2));
        assert_eq!(q(1, 2).checked_div(&q(1, 2).pow(2).unwrap()).unwrap(), q(2, 1));
        let c = ExactScalar::new(BigRational::one(), 2);
        assert_eq!(c, q(2, 1));
        assert_eq!(c.root2_exponent(), 0);
        assert_eq!(ExactScalar::new(BigRational::zero(), 1), ExactScalar::zero());
        assert_eq!(q(1, 1).checked_div(&ExactScalar::zero()), Err(Error::DivisionByZero));
        assert_eq!(ExactScalar::from_ratio(1, 0), Err(Error::DivisionByZero));
        assert_eq!(r.to_integer(), None);
        assert_eq!(q(-3, 1).to_integer(), Some(BigInt::from(-3)));
        assert_eq!(q(-3, 1).signum(), -1);
        assert_eq!(r.to_string(), "1/2*sqrt(2)");
        // 1/√2 / √2 = 1/2
        assert_eq!(
            r.checked_div(&ExactScalar::new(BigRational::one(), 1)).unwrap(),
            q(1, 2)
        );
        assert_eq!(
            q(1, 1).checked_div(&r).unwrap(),
            ExactScalar::new(BigRational::one(), 1)
        );
    }

    #[test]
    fn closed_form() {
        assert_eq!(rank_closed_form_a(0, 1, 2).unwrap(), 1);
        assert_eq!(rank_closed_form_a(1, 1, 2).unwrap(), 4);
        assert_eq!(rank_closed_form_a(0, 2, 3).unwrap(), 3);
        assert!(rank_closed_form_a(0, 0, 3).is_err());
        assert!(rank_closed_form_a(0, 1, 1).is_err());
        assert_eq!(rank_closed_form_a(200, 1, 2), Err(Error::Overflow("closed-form rank")));
    }

    #[test]
    fn verlinde_products() {
        let rank = |s: &str| s3_level1_rank(&RamificationVector::s3(parse_tuple(s).unwrap()));
        assert_eq!(rank("(12),(23),(132)").unwrap().value, 1);
        assert_eq!(rank("(12),(23),(123),(123)").unwrap().value, 2);
        assert_eq!(rank("(123),(132),(12),(12)").unwrap().value, 2);
        // trivial entries are vacua and do not change the rank
        assert_eq!(rank("e,(12),(23),(132)").unwrap().value, 1);
        assert!(matches!(rank("(12),(12)"), Err(Error::Precondition(_))));
        assert!(matches!(rank("(12),(23)"), Err(Error::Precondition(_))));
    }

    #[test]
    fn table_agrees_with_verlinde() {
        for s in ["(12),(23),(132)", "(12),(23),(123),(123)"] {
            let r = RamificationVector::s3(parse_tuple(s).unwrap());
            let w = s3_reduce(&r).unwrap();
            assert_eq!(w.factors.len(), 1);
            let table = base_case_rank(&w.factors[0]).value().unwrap();
            assert_eq!(table, s3_level1_rank(&r).unwrap().value);
        }
    }

    fn factor(kind: BaseCaseKind, level: i64, ms: &[Perm], weight: Coefficients) -> BaseCase {
        BaseCase {
            kind,
            level,
            points: ms
                .iter()
                .enumerate()
                .map(|(i, &g)| FactorPoint {
                    source: PointSource::Point(i),
                    monodromy: g,
                    weight: weight.clone(),
                })
                .collect(),
            conjugator: None,
        }
    }

    #[test]
    fn table_entries() {
        let vac = Coefficients::from([(0, 1)]);
        let rank = |b: &BaseCase| base_case_rank(b).value();
        assert_eq!(
            rank(&factor(
                BaseCaseKind::UntwistedVacuum,
                1,
                &[Perm::IDENTITY],
                vac.clone()
            )),
            Some(1)
        );
        assert_eq!(
            rank(&factor(BaseCaseKind::EllipticTriple, 1, &[Perm::C123; 3], vac.clone())),
            Some(2)
        );
        assert_eq!(
            rank(&factor(BaseCaseKind::S3Case2, 1, &[Perm::C123; 3], vac.clone())),
            Some(2)
        );
        assert_eq!(
            rank(&factor(
                BaseCaseKind::S3Case2,
                1,
                &[Perm::C123, Perm::C132],
                vac.clone()
            )),
            Some(1)
        );
        assert_eq!(
            rank(&factor(BaseCaseKind::S3Case1, 1, &[Perm::T12; 2], vac.clone())),
            Some(1)
        );
        let closed = BaseCaseKind::ClosedFormA { genus: 1, n: 1, r: 2 };
        assert_eq!(rank(&factor(closed, 1, &[Perm::T12; 2], vac)), Some(4));

        let lvl2 = Coefficients::from([(1, 1)]);
        assert_eq!(
            rank(&factor(BaseCaseKind::TwistedPair, 2, &[Perm::T12; 2], lvl2.clone())),
            Some(1)
        );
        let out = base_case_rank(&factor(BaseCaseKind::S3Case4, 2, &[Perm::T12; 4], lvl2));
        assert!(matches!(out, RankOutcome::Unknown { .. }));
        let out = base_case_rank(&factor(
            BaseCaseKind::UntwistedVacuum,
            1,
            &[Perm::IDENTITY],
            Coefficients::from([(1, 1)]),
        ));
        assert_eq!(out.value(), None);
    }

    #[test]
    fn lower_bounds() {
        let vac = Coefficients::from([(0, 1)]);
        let w = DecompositionWitness::new(vec![
            factor(BaseCaseKind::EllipticTriple, 1, &[Perm::C123; 3], vac.clone()),
            factor(BaseCaseKind::UntwistedVacuum, 1, &[Perm::IDENTITY], vac.clone()),
        ]);
        assert_eq!(rank_lower_bound(&w).unwrap(), 2);
        assert_eq!(rank_lower_bound(&DecompositionWitness::new(vec![])).unwrap(), 1);
        let w = DecompositionWitness::new(vec![factor(BaseCaseKind::S3Case3, 3, &[Perm::T12], vac)]);
        assert!(matches!(rank_lower_bound(&w), Err(Error::BoundUnavailable(_))));
    }

    #[test]
    fn derivations_replay() {
        let r = RankResult {
            value: 12,
            derivation: Derivation::Product { factors: vec![2, 6] },
        };
        assert_eq!(r.recompute().unwrap(), 12);
        let r = RankResult {
            value: 2,
            derivation: Derivation::Verlinde {
                tuple: parse_tuple("(12),(23),(123),(123)").unwrap(),
            },
        };
        assert_eq!(r.recompute().unwrap(), 2);
    }
}
