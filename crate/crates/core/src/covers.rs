//! Ramification data of Galois covers of curves.
//!
//! Only the monodromy shadow of a cover is modelled: the group, the ordered
//! local monodromies at the branch points, and what Riemann–Hurwitz says about
//! the total space. Products compose right to left, as in [`crate::group`].

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{product, ConjugacyClass, FiniteGroup, Perm};
use crate::picard::PointDatum;

/// Ordered local monodromies `(γ_1, …, γ_s)` in a group.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawVector")]
pub struct RamificationVector {
    group: FiniteGroup,
    tuple: Vec<Perm>,
}

#[derive(Deserialize)]
struct RawVector {
    group: FiniteGroup,
    tuple: Vec<Perm>,
}

impl TryFrom<RawVector> for RamificationVector {
    type Error = Error;

    fn try_from(raw: RawVector) -> Result<Self> {
        RamificationVector::new(raw.group, raw.tuple)
    }
}

impl RamificationVector {
    pub fn new(group: FiniteGroup, tuple: Vec<Perm>) -> Result<Self> {
        if let Some(g) = tuple.iter().find(|&&g| !group.contains(g)) {
            return Err(Error::Precondition(format!("{g} is not an element of {group}")));
        }
        Ok(RamificationVector { group, tuple })
    }

    /// Vector in `S3`.
    pub fn s3(tuple: Vec<Perm>) -> Self {
        RamificationVector {
            group: FiniteGroup::s3(),
            tuple,
        }
    }

    pub fn group(&self) -> FiniteGroup {
        self.group
    }

    pub fn tuple(&self) -> &[Perm] {
        &self.tuple
    }

    pub fn len(&self) -> usize {
        self.tuple.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuple.is_empty()
    }

    pub fn product(&self) -> Perm {
        product(&self.tuple)
    }

    /// Subgroup generated by the entries.
    pub fn generated(&self) -> FiniteGroup {
        FiniteGroup::generated_by(&self.tuple)
    }
}

pub fn product_identity_check(r: &RamificationVector) -> bool {
    r.product().is_identity()
}

/// Connectivity of the genus-0 cover: the entries generate the whole group.
pub fn is_connected_genus0(r: &RamificationVector) -> Result<bool> {
    if !product_identity_check(r) {
        return Err(Error::Precondition(format!(
            "ordered product of {} is {}, not e",
            crate::group::format_tuple(&r.tuple),
            r.product()
        )));
    }
    Ok(r.generated() == r.group)
}

pub fn gsd(gamma: FiniteGroup) -> usize {
    gamma.order()
}

/// Genus of each component and the number of components of a cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverShape {
    pub genus: u64,
    pub component_count: usize,
}

impl CoverShape {
    pub fn is_connected(&self) -> bool {
        self.component_count == 1
    }
}

/// Riemann–Hurwitz for a `Γ`-cover of a genus-`g_base` curve.
///
/// On genus 0 the components are indexed by `Γ/⟨γ_i⟩`. On higher genus the
/// handle monodromies `a_j, b_j` are free subject to
/// `Π[a_j, b_j] · Π γ_i = e`; the reported shape is the most connected one
/// the relation allows. The genus is that of a single component.
pub fn genus_riemann_hurwitz(g_base: u32, gamma: FiniteGroup, monodromies: &[Perm]) -> Result<CoverShape> {
    if let Some(g) = monodromies.iter().find(|&&g| !gamma.contains(g)) {
        return Err(Error::Precondition(format!("{g} is not an element of {gamma}")));
    }
    let order = gamma.order();
    let c = product(monodromies);
    let generated = largest_realizable_subgroup(g_base, gamma, monodromies, c).ok_or_else(|| {
        Error::InconsistentRamification(format!(
            "ordered product {c} cannot be cancelled by {g_base} handle(s) in {gamma}"
        ))
    })?;
    let k = order / generated.order();

    let n = order as i64;
    let ramification: i64 = monodromies
        .iter()
        .map(|g| {
            let e = i64::from(g.order());
            (n / e) * (e - 1)
        })
        .sum();
    // 2k(g_C - 1) = |Γ|(2g - 2) + R
    let rhs = n * (2 * i64::from(g_base) - 2) + ramification;
    let denom = 2 * k as i64;
    if rhs % denom != 0 || rhs / denom + 1 < 0 {
        return Err(Error::InconsistentRamification(format!(
            "Riemann-Hurwitz gives 2g - 2 = {rhs}/{k}"
        )));
    }
    Ok(CoverShape {
        genus: (rhs / denom + 1) as u64,
        component_count: k,
    })
}

/// Largest `⟨γ_i, a_j, b_j⟩` over handle assignments satisfying the relation,
/// by a fixpoint over (commutator product, generated subgroup) states.
fn largest_realizable_subgroup(g_base: u32, gamma: FiniteGroup, monodromies: &[Perm], c: Perm) -> Option<FiniteGroup> {
    // one handle contributes its commutator and the group its pair generates
    let moves: BTreeSet<(Perm, FiniteGroup)> = gamma
        .elements()
        .flat_map(|a| {
            gamma
                .elements()
                .map(move |b| (a * b * a.inverse() * b.inverse(), FiniteGroup::generated_by(&[a, b])))
        })
        .collect();
    let mut states: BTreeSet<(Perm, FiniteGroup)> =
        BTreeSet::from([(Perm::IDENTITY, FiniteGroup::generated_by(monodromies))]);
    for _ in 0..g_base {
        let mut next = states.clone();
        for &(p, h) in &states {
            for &(comm, k) in &moves {
                let gens: Vec<Perm> = h.elements().chain(k.elements()).collect();
                next.insert((p * comm, FiniteGroup::generated_by(&gens)));
            }
        }
        if next == states {
            break;
        }
        states = next;
    }
    states
        .into_iter()
        .filter(|(p, _)| (*p * c).is_identity())
        .map(|(_, h)| h)
        .max_by_key(|h| h.order())
}

/// All tuples with `γ_i ∈ classes[i]` and product `e`, in lexicographic order.
pub fn enumerate_tuples(
    gamma: FiniteGroup,
    classes: &[ConjugacyClass],
    connected_only: bool,
) -> Result<Vec<Vec<Perm>>> {
    if classes.is_empty() {
        return Err(Error::Precondition("class list is empty".into()));
    }
    let sorted: Vec<Vec<Perm>> = classes
        .iter()
        .map(|cl| {
            let mut els = cl.elements().to_vec();
            els.sort();
            els
        })
        .collect();
    if let Some(g) = sorted.iter().flatten().find(|&&g| !gamma.contains(g)) {
        return Err(Error::Precondition(format!("{g} is not an element of {gamma}")));
    }
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(sorted.len());
    extend_tuples(&sorted, Perm::IDENTITY, &mut current, &mut |t| {
        if !connected_only || FiniteGroup::generated_by(t) == gamma {
            out.push(t.to_vec());
        }
    });
    Ok(out)
}

fn extend_tuples(classes: &[Vec<Perm>], prefix: Perm, current: &mut Vec<Perm>, emit: &mut impl FnMut(&[Perm])) {
    let depth = current.len();
    if depth == classes.len() {
        if prefix.is_identity() {
            emit(current);
        }
        return;
    }
    for &g in &classes[depth] {
        current.push(g);
        extend_tuples(classes, prefix * g, current, emit);
        current.pop();
    }
}

/// First `δ` (in [`Perm::ALL`] order) of `ambient` with `Γ_1 = δΓ_2δ⁻¹` and
/// `r1[i] = δ r2[i] δ⁻¹` for every `i`.
pub fn equivalent_cover_data(
    r1: &RamificationVector,
    r2: &RamificationVector,
    ambient: FiniteGroup,
) -> Result<Option<Perm>> {
    if r1.len() != r2.len() {
        return Err(Error::LengthMismatch(r1.len(), r2.len()));
    }
    for r in [r1, r2] {
        if !r.group.is_subgroup_of(ambient) {
            return Err(Error::Precondition(format!(
                "{} is not a subgroup of {ambient}",
                r.group
            )));
        }
    }
    Ok(ambient.elements().find(|&delta| {
        r2.group.conjugate_by(delta) == r1.group
            && r1
                .tuple
                .iter()
                .zip(&r2.tuple)
                .all(|(&a, &b)| b.conjugate_by(delta) == a)
    }))
}

/// Degeneration scenario for C3 data, by `|R3+| mod 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    A,
    B,
    C,
}

/// Ramified points split by monodromy; indices refer to the input slice.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gsd3Partition {
    pub plus: Vec<usize>,
    pub minus: Vec<usize>,
    pub scenario: Scenario,
}

/// Splits the ramified points by whether they carry `(123)` (the `+`
/// generator) or `(132)`. Points with trivial monodromy are left out.
pub fn monodromy_partition_gsd3(points: &[PointDatum]) -> Result<Gsd3Partition> {
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for (i, p) in points.iter().enumerate() {
        match p.monodromy() {
            Perm::C123 => plus.push(i),
            Perm::C132 => minus.push(i),
            g if g.is_identity() => {}
            g => {
                return Err(Error::Precondition(format!(
                    "point {}: monodromy {g} is not in C3",
                    p.label()
                )))
            }
        }
    }
    if plus.len() % 3 != minus.len() % 3 {
        return Err(Error::NoSuchCover {
            plus: plus.len(),
            minus: minus.len(),
        });
    }
    let scenario = match plus.len() % 3 {
        0 => Scenario::A,
        1 => Scenario::B,
        _ => Scenario::C,
    };
    Ok(Gsd3Partition { plus, minus, scenario })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::parse_tuple;

    fn s3(s: &str) -> RamificationVector {
        RamificationVector::s3(parse_tuple(s).unwrap())
    }

    #[test]
    fn product_identity() {
        assert!(product_identity_check(&s3("(12),(23),(132)")));
        assert!(!product_identity_check(&s3("(12),(13)")));
        assert!(product_identity_check(&s3("(123),(123),(123)")));
        assert!(product_identity_check(&s3("")));
    }

    #[test]
    fn riemann_hurwitz() {
        let c2 = FiniteGroup::c2();
        let shape = genus_riemann_hurwitz(0, c2, &[Perm::T12, Perm::T12]).unwrap();
        assert_eq!(
            shape,
            CoverShape {
                genus: 0,
                component_count: 1
            }
        );

        let shape = genus_riemann_hurwitz(0, FiniteGroup::s3(), s3("(12),(23),(132)").tuple()).unwrap();
        assert_eq!(
            shape,
            CoverShape {
                genus: 0,
                component_count: 1
            }
        );
        let shape = genus_riemann_hurwitz(0, FiniteGroup::s3(), s3("(12),(23),(123),(123)").tuple()).unwrap();
        assert_eq!(
            shape,
            CoverShape {
                genus: 2,
                component_count: 1
            }
        );

        // ((12),(12)) in S3: three copies of a double cover of the line
        let shape = genus_riemann_hurwitz(0, FiniteGroup::s3(), &[Perm::T12, Perm::T12]).unwrap();
        assert_eq!(
            shape,
            CoverShape {
                genus: 0,
                component_count: 3
            }
        );

        // unramified over an elliptic curve: connected by the handle
        let shape = genus_riemann_hurwitz(1, c2, &[]).unwrap();
        assert_eq!(
            shape,
            CoverShape {
                genus: 1,
                component_count: 1
            }
        );
        let shape = genus_riemann_hurwitz(2, FiniteGroup::trivial(), &[]).unwrap();
        assert_eq!(shape.genus, 2);
    }

    #[test]
    fn riemann_hurwitz_rejects_inconsistent_data() {
        let err = genus_riemann_hurwitz(0, FiniteGroup::c2(), &[Perm::T12]).unwrap_err();
        assert!(matches!(err, Error::InconsistentRamification(_)));
        assert!(err.to_string().starts_with("inconsistent ramification data"));
        // abelian handles have trivial commutators
        assert!(genus_riemann_hurwitz(3, FiniteGroup::c3(), &[Perm::C123]).is_err());
        // a 3-cycle is a commutator in S3
        let shape = genus_riemann_hurwitz(1, FiniteGroup::s3(), &[Perm::C123]).unwrap();
        assert!(shape.is_connected());
        // 2k(g - 1) = 6·0 + 4 on S3 over an elliptic curve
        assert_eq!(shape.genus, 3);
        assert!(genus_riemann_hurwitz(0, FiniteGroup::c2(), &[Perm::C123]).is_err());
    }

    #[test]
    fn connectivity() {
        assert!(!is_connected_genus0(&s3("(12),(12)")).unwrap());
        assert!(is_connected_genus0(&s3("(12),(23),(132)")).unwrap());
        let r = RamificationVector::new(FiniteGroup::c3(), vec![Perm::C123, Perm::C132]).unwrap();
        assert!(is_connected_genus0(&r).unwrap());
        assert!(matches!(is_connected_genus0(&s3("(12)")), Err(Error::Precondition(_))));
    }

    #[test]
    fn vector_membership() {
        assert!(RamificationVector::new(FiniteGroup::c2(), vec![Perm::C123]).is_err());
        assert!(RamificationVector::new(FiniteGroup::c2(), vec![Perm::T12]).is_ok());
    }

    #[test]
    fn gsd_values() {
        assert_eq!(gsd(FiniteGroup::trivial()), 1);
        assert_eq!(gsd(FiniteGroup::c2()), 2);
        assert_eq!(gsd(FiniteGroup::c3()), 3);
        assert_eq!(gsd(FiniteGroup::s3()), 6);
    }

    #[test]
    fn enumeration() {
        let c2 = FiniteGroup::c2();
        let t = c2.class_of(Perm::T12).unwrap();
        assert_eq!(
            enumerate_tuples(c2, &[t.clone(), t], false).unwrap(),
            vec![vec![Perm::T12; 2]]
        );

        let s = FiniteGroup::s3();
        let tr = s.class_of(Perm::T12).unwrap();
        let cy = s.class_of(Perm::C123).unwrap();
        let all = enumerate_tuples(s, &[tr.clone(), tr.clone(), cy.clone()], false).unwrap();
        assert_eq!(all.len(), 6);
        assert_eq!(
            enumerate_tuples(s, &[tr.clone(), tr, cy.clone()], true).unwrap().len(),
            6
        );
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(all, sorted);

        assert_eq!(enumerate_tuples(s, &[cy.clone(), cy.clone()], false).unwrap().len(), 2);
        assert!(enumerate_tuples(s, &[cy.clone(), cy], true).unwrap().is_empty());
        assert!(enumerate_tuples(s, &[], false).is_err());
    }

    #[test]
    fn equivalence() {
        let s = FiniteGroup::s3();
        let a = s3("(12),(23),(132)");
        assert_eq!(equivalent_cover_data(&a, &a, s).unwrap(), Some(Perm::IDENTITY));
        let w = equivalent_cover_data(&s3("(12),(12)"), &s3("(13),(13)"), s)
            .unwrap()
            .unwrap();
        assert!(w.is_transposition());
        assert_eq!(Perm::T13.conjugate_by(w), Perm::T12);
        assert_eq!(
            equivalent_cover_data(&s3("(123),(132)"), &s3("(12),(12)"), s).unwrap(),
            None
        );
        assert_eq!(
            equivalent_cover_data(&s3("(12)"), &s3("(12),(12)"), s),
            Err(Error::LengthMismatch(1, 2))
        );
        // subgroups must move together
        let c2 = RamificationVector::new(FiniteGroup::c2(), vec![Perm::T12, Perm::T12]).unwrap();
        let c2b = RamificationVector::new(FiniteGroup::generated_by(&[Perm::T13]), vec![Perm::T13, Perm::T13]).unwrap();
        assert_eq!(equivalent_cover_data(&c2, &c2b, s).unwrap(), Some(Perm::T23));
        assert!(equivalent_cover_data(&c2, &c2b, FiniteGroup::c2()).is_err());
    }

    fn c3_points(monodromies: &[Perm]) -> Vec<PointDatum> {
        let ty: crate::dynkin::AffineType = "D4~3".parse().unwrap();
        monodromies
            .iter()
            .enumerate()
            .map(|(i, &g)| PointDatum::iwahori(format!("p{i}"), ty.clone(), g).unwrap())
            .collect()
    }

    #[test]
    fn gsd3_partition() {
        let (p, m) = (Perm::C123, Perm::C132);
        let part = monodromy_partition_gsd3(&c3_points(&[p, p, p])).unwrap();
        assert_eq!((part.plus.len(), part.minus.len(), part.scenario), (3, 0, Scenario::A));
        let part = monodromy_partition_gsd3(&c3_points(&[p, m])).unwrap();
        assert_eq!((part.plus, part.minus, part.scenario), (vec![0], vec![1], Scenario::B));
        let part = monodromy_partition_gsd3(&c3_points(&[p, p, m, m])).unwrap();
        assert_eq!(part.scenario, Scenario::C);
        let err = monodromy_partition_gsd3(&c3_points(&[p, p])).unwrap_err();
        assert_eq!(err, Error::NoSuchCover { plus: 2, minus: 0 });
        assert!(err.to_string().starts_with("no such cover exists"));
    }
}
