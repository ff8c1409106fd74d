//! Descent certificates and bounds on `c_G`.
//!
//! A dominant bundle in `Pic^Δ` descends to the moduli stack as soon as its
//! space of twisted conformal blocks is nonzero. A certificate is a
//! degeneration witness whose factors all have known positive rank; the
//! criterion is one-sided, so the only verdicts are `Descends` and `Unknown`.

use serde::{Deserialize, Serialize};

use crate::dynkin::{dual_involution, Series, VertexInvolution};
use crate::error::{Error, Result};
use crate::factorization::{
    best_lcmai_bound, degenerate_gsd3_with, pinch_handle, s3_reduce_weighted, BaseCase, BaseCaseKind,
    DecompositionWitness, FactorPoint, PointSource,
};
use crate::group::{product, FiniteGroup, GroupKind, Perm};
use crate::picard::{self, c_delta, c_delta_bundle, Coefficients, GroupDatum, WeightBundle};
use crate::verlinde::{base_case_rank, RankOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Descends,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescentCertificate {
    pub bundle: WeightBundle,
    pub charge: u64,
    pub witness: DecompositionWitness,
    /// Rank per factor of the witness, in order.
    pub ranks: Vec<RankOutcome>,
    /// Product of the factor ranks when all are known.
    pub rank_bound: Option<u64>,
    pub verdict: Verdict,
}

/// Checks dominance and `Pic^Δ` membership, degenerates by generic splitting
/// degree and evaluates the factor ranks.
pub fn certify_descent(d: &GroupDatum, b: &WeightBundle) -> Result<DescentCertificate> {
    if d.points().is_empty() {
        return Err(Error::NoPoints);
    }
    b.check_against(d)?;
    for p in d.points() {
        if b.at(p).values().any(|&n| n < 0) {
            return Err(Error::NotDominant(p.label().to_string()));
        }
    }
    let charges = picard::charges(d, b)?;
    if charges.iter().any(|&c| c != charges[0]) {
        return Err(Error::NotInPicDelta(charges));
    }
    let level = charges[0];
    if level <= 0 {
        return Err(Error::Precondition("the common central charge must be positive".into()));
    }
    let weights: Vec<Coefficients> = d.points().iter().map(|p| b.at(p)).collect();

    let factors = match d.gamma().kind() {
        GroupKind::Trivial => {
            let all: Vec<usize> = (0..d.points().len()).collect();
            untwisted_factors(d, &all, &weights, level)
        }
        GroupKind::C2 => gsd2_factors(d, &weights, level),
        GroupKind::C3 => degenerate_gsd3_with(d, b, level)?.factors,
        GroupKind::S3 => gsd6_factors(d, &weights, level)?,
    };
    let witness = DecompositionWitness::new(factors);
    let ranks: Vec<RankOutcome> = witness.factors.iter().map(base_case_rank).collect();
    let rank_bound = ranks
        .iter()
        .map(RankOutcome::value)
        .try_fold(1u64, |acc, r| r.and_then(|r| acc.checked_mul(r)));
    let verdict = match rank_bound {
        Some(r) if r >= 1 => Verdict::Descends,
        _ => Verdict::Unknown,
    };
    Ok(DescentCertificate {
        bundle: b.clone(),
        charge: level as u64,
        witness,
        ranks,
        rank_bound,
        verdict,
    })
}

fn factor(kind: BaseCaseKind, level: i64, points: Vec<FactorPoint>) -> BaseCase {
    BaseCase {
        kind,
        level,
        points,
        conjugator: None,
    }
}

fn point_at(d: &GroupDatum, weights: &[Coefficients], i: usize) -> FactorPoint {
    FactorPoint {
        source: PointSource::Point(i),
        monodromy: d.points()[i].monodromy(),
        weight: weights[i].clone(),
    }
}

fn dual_weight(w: &Coefficients, inv: &VertexInvolution) -> Coefficients {
    w.iter().map(|(&v, &n)| (inv.apply(v), n)).collect()
}

/// Unramified points: vacua stand alone, other weights pair `λ` with `λ*`.
/// Anything left over becomes a single-point factor of unknown rank.
fn untwisted_factors(d: &GroupDatum, idx: &[usize], weights: &[Coefficients], level: i64) -> Vec<BaseCase> {
    let vacuum = Coefficients::from([(0, level)]);
    let inv = d.base().map(dual_involution);
    let mut used = vec![false; idx.len()];
    let mut factors = Vec::new();
    for a in 0..idx.len() {
        if used[a] {
            continue;
        }
        used[a] = true;
        let i = idx[a];
        if weights[i] == vacuum {
            factors.push(factor(
                BaseCaseKind::UntwistedVacuum,
                level,
                vec![point_at(d, weights, i)],
            ));
            continue;
        }
        let dual = inv.as_ref().map(|inv| dual_weight(&weights[i], inv));
        let partner = (a + 1..idx.len()).find(|&c| !used[c] && Some(&weights[idx[c]]) == dual.as_ref());
        match partner {
            Some(c) => {
                used[c] = true;
                let pts = vec![point_at(d, weights, i), point_at(d, weights, idx[c])];
                factors.push(factor(BaseCaseKind::UntwistedPair, level, pts));
            }
            None => factors.push(factor(
                BaseCaseKind::UntwistedVacuum,
                level,
                vec![point_at(d, weights, i)],
            )),
        }
    }
    factors
}

/// `r` with base `A_{2r-1}`, `r ≥ 2`.
fn closed_form_r(d: &GroupDatum) -> Option<u32> {
    let base = d.base()?;
    (base.series() == Series::A && base.rank() % 2 == 1 && base.rank() >= 3).then(|| (base.rank() as u32).div_ceil(2))
}

fn gsd2_factors(d: &GroupDatum, weights: &[Coefficients], level: i64) -> Vec<BaseCase> {
    let (ramified, unramified): (Vec<usize>, Vec<usize>) =
        (0..d.points().len()).partition(|&i| d.points()[i].is_ramified());
    let vacuum = Coefficients::from([(0, 1)]);
    let mut factors = Vec::new();
    let all_vacuum = level == 1 && weights.iter().all(|w| *w == vacuum);
    match closed_form_r(d) {
        Some(r) if all_vacuum && !ramified.is_empty() => {
            let n = (ramified.len() / 2) as u32;
            let kind = BaseCaseKind::ClosedFormA { genus: d.genus(), n, r };
            factors.push(factor(
                kind,
                level,
                ramified.iter().map(|&i| point_at(d, weights, i)).collect(),
            ));
        }
        _ => {
            // equal weights pair up; leftovers are paired in order
            let mut used = vec![false; ramified.len()];
            let mut leftovers = Vec::new();
            for a in 0..ramified.len() {
                if used[a] {
                    continue;
                }
                used[a] = true;
                let i = ramified[a];
                match (a + 1..ramified.len()).find(|&c| !used[c] && weights[ramified[c]] == weights[i]) {
                    Some(c) => {
                        used[c] = true;
                        let pts = vec![point_at(d, weights, i), point_at(d, weights, ramified[c])];
                        factors.push(factor(BaseCaseKind::TwistedPair, level, pts));
                    }
                    None => leftovers.push(i),
                }
            }
            for pair in leftovers.chunks(2) {
                let pts = pair.iter().map(|&i| point_at(d, weights, i)).collect();
                factors.push(factor(BaseCaseKind::TwistedPair, level, pts));
            }
        }
    }
    factors.extend(untwisted_factors(d, &unramified, weights, level));
    factors
}

fn gsd6_factors(d: &GroupDatum, weights: &[Coefficients], level: i64) -> Result<Vec<BaseCase>> {
    let (ramified, unramified): (Vec<usize>, Vec<usize>) =
        (0..d.points().len()).partition(|&i| d.points()[i].is_ramified());
    let vacuum = Coefficients::from([(0, level)]);
    let mut entries: Vec<(PointSource, Perm, Coefficients)> = Vec::new();
    let c = product(&d.monodromies());
    if !c.is_identity() {
        let (x, y) = pinch_handle(FiniteGroup::s3(), c)
            .ok_or_else(|| Error::InconsistentRamification(format!("product {c} is not a commutator in S3")))?;
        if d.genus() == 0 {
            return Err(Error::InconsistentRamification(format!(
                "product {c} is not e on genus 0"
            )));
        }
        entries.push((PointSource::Node(0), x, vacuum.clone()));
        entries.push((PointSource::Node(1), y, vacuum));
    }
    entries.extend(
        ramified
            .iter()
            .map(|&i| (PointSource::Point(i), d.points()[i].monodromy(), weights[i].clone())),
    );
    let mut factors = s3_reduce_weighted(entries, level)?.factors;
    factors.extend(untwisted_factors(d, &unramified, weights, level));
    Ok(factors)
}

/// Certificate for `Λ⃗_o` on Iwahori data: descends at charge 1.
pub fn iwahori_theorem(d: &GroupDatum) -> Result<DescentCertificate> {
    if let Some(p) = d.points().iter().find(|p| !p.is_iwahori()) {
        return Err(Error::NotIwahori(p.label().to_string()));
    }
    let cert = certify_descent(d, &WeightBundle::vacuum(d, 1))?;
    if cert.verdict != Verdict::Descends {
        return Err(Error::Inconsistent(
            "Iwahori datum without a descent certificate".into(),
        ));
    }
    Ok(cert)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CGReport {
    /// `c_Δ`; `c_G` is a multiple of it.
    pub lower: u64,
    /// Least charge with a `Descends` certificate; `c_G` divides it.
    pub certified_charge: Option<u64>,
    /// Present when the two bounds meet.
    pub exact: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<DescentCertificate>,
}

/// Bounds `c_G` from both sides. Candidates, in order: `Λ⃗_o` when every
/// facet contains `o`, the charge-`c_Δ` bundle, then for `C2` data the
/// least-charge certificate found in a `budget`-bounded pairing search.
pub fn compute_cg(d: &GroupDatum, budget: usize) -> Result<CGReport> {
    let lower = c_delta(d);
    let mut best: Option<DescentCertificate> = None;
    if !d.points().is_empty() {
        let mut candidates = Vec::new();
        if d.points().iter().all(|p| p.facet().contains(&0)) {
            candidates.push(WeightBundle::vacuum(d, 1));
        }
        candidates.push(c_delta_bundle(d).0);
        let consider = |b: &WeightBundle, best: &mut Option<DescentCertificate>| -> Result<()> {
            let cert = match certify_descent(d, b) {
                Ok(c) => c,
                Err(Error::NotInPicDelta(_) | Error::NotDominant(_)) => return Ok(()),
                Err(e) => return Err(e),
            };
            if cert.verdict == Verdict::Descends {
                let better = best
                    .as_ref()
                    .is_none_or(|cur| (cert.charge, &cert.bundle) < (cur.charge, &cur.bundle));
                if better {
                    *best = Some(cert);
                }
            }
            Ok(())
        };
        for b in &candidates {
            consider(b, &mut best)?;
            if best.as_ref().is_some_and(|c| c.charge == lower) {
                break;
            }
        }
        let settled = best.as_ref().is_some_and(|c| c.charge == lower);
        if !settled && d.gamma().kind() == GroupKind::C2 {
            if let Ok(search) = best_lcmai_bound(d, budget) {
                consider(&search.best.bundle(d), &mut best)?;
            }
        }
    }
    let certified_charge = best.as_ref().map(|c| c.charge);
    Ok(CGReport {
        lower,
        certified_charge,
        exact: certified_charge.filter(|&c| c == lower),
        certificate: best,
    })
}
