//! Improvements of configurations along finer partial orders, and the
//! split-sequence criterion for best configurations.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::config::{quotient_configuration, substitute, ConfigError, Configuration};
use crate::poset::{FinitePoset, GluingSpec, PosetError, Subset};
use crate::quivercat::{hom_space, CategoryError, Rep, RepMor};

/// Default bound on `p^dim Hom` for [`enumerate_improvements`].
pub const MAX_IMPROVEMENTS: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ImproveError {
    #[error("NotSplit: the sequence at ({0}, {1}) does not split")]
    NotSplit(String, String),
    #[error("BadParameterLength: expected {expected}, got {got}")]
    BadParameterLength { expected: usize, got: usize },
    #[error("TooMany: {p}^{dim} improvements exceed the limit {limit}")]
    TooMany { p: u32, dim: usize, limit: u64 },
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Category(#[from] CategoryError),
}

#[derive(Debug, Clone)]
pub struct SplitReport {
    pub split: bool,
    pub retraction: Option<RepMor>,
}

/// One improvement: the covering pair removed, the coordinates of the
/// chosen element of Hom(σ({j}), σ({i})) and the finer configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ImprovementStep {
    pub pair: (usize, usize),
    pub parameter: Vec<u32>,
    pub result: Configuration,
}

fn pair_sets(c: &Configuration, i: usize, j: usize) -> Result<(Subset, Subset, Subset), ImproveError> {
    let p = c.poset();
    if !p.is_covering_pair(i, j) {
        let name = |x: usize| p.labels().get(x).cloned().unwrap_or_else(|| x.to_string());
        return Err(PosetError::NotCoveringPair(name(i), name(j)).into());
    }
    let (si, sj) = (Subset::singleton(i), Subset::singleton(j));
    Ok((si, sj, si.union(sj)))
}

/// Test whether `0 -> σ({i}) -> σ({i,j}) -> σ({j}) -> 0` splits.
pub fn split_pair_test(c: &Configuration, i: usize, j: usize) -> Result<SplitReport, ImproveError> {
    let (si, _, k) = pair_sets(c, i, j)?;
    match c.iota(si, k).retraction() {
        Ok(r) => Ok(SplitReport { split: true, retraction: Some(r) }),
        Err(CategoryError::NotSplit) => Ok(SplitReport { split: false, retraction: None }),
        Err(e) => Err(e.into()),
    }
}

pub fn is_best(c: &Configuration) -> Result<bool, ImproveError> {
    for (i, j) in c.poset().covering_pairs() {
        if split_pair_test(c, i, j)?.split {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The basis of Hom(σ({j}), σ({i})) that parameters are coordinates in.
pub fn parameter_basis(c: &Configuration, i: usize, j: usize) -> Result<Vec<RepMor>, ImproveError> {
    let (si, sj, _) = pair_sets(c, i, j)?;
    Ok(hom_space(c.sigma(sj), c.sigma(si))?)
}

fn improve_with_basis(
    c: &Configuration,
    i: usize,
    j: usize,
    r0: &RepMor,
    basis: &[RepMor],
    parameter: &[u32],
) -> Result<ImprovementStep, ImproveError> {
    if parameter.len() != basis.len() {
        return Err(ImproveError::BadParameterLength { expected: basis.len(), got: parameter.len() });
    }
    let (si, sj, k) = pair_sets(c, i, j)?;
    let iota = c.iota(si, k);
    let pi = c.pi(k, sj);
    let f = RepMor::linear_combination(c.sigma(sj), c.sigma(si), basis, parameter);
    let r = r0.sub(&f.after(pi)?)?;
    let s = pi.descend_through(&RepMor::identity(c.sigma(k)).sub(&iota.after(&r)?)?)?;

    // the two-element configuration on the discrete order
    let p = c.poset();
    let inner_poset = FinitePoset::discrete(&[p.label(i), p.label(j)])?;
    let psi: Vec<usize> = inner_poset.labels().iter().map(|l| p.index_of(l).unwrap()).collect();
    let up = |s: Subset| FinitePoset::push_subset(&psi, s);
    let objects: BTreeMap<Subset, Arc<Rep>> =
        inner_poset.fsets().into_iter().map(|a| (a, c.sigma(up(a)).clone())).collect();
    let mut iotas = BTreeMap::new();
    for (a, b) in inner_poset.g_pairs() {
        let m = if (up(a), up(b)) == (sj, k) { s.clone() } else { c.iota(up(a), up(b)).clone() };
        iotas.insert((a, b), m);
    }
    let mut pis = BTreeMap::new();
    for (a, b) in inner_poset.h_pairs() {
        let m = if (up(a), up(b)) == (k, si) { r.clone() } else { c.pi(up(a), up(b)).clone() };
        pis.insert((a, b), m);
    }
    let inner = Configuration::new(inner_poset.clone(), objects, iotas, pis)?;
    let spec = GluingSpec {
        sub_poset: inner_poset,
        ambient_poset: p.clone(),
        glue_fset: k,
        psi,
    };
    let sub = substitute(c, &inner, &spec, None)?;
    debug_assert_eq!(sub.result.poset(), &p.remove_covering_pair(i, j)?);
    debug_assert!(sub.phi.iter().enumerate().all(|(a, &b)| a == b));
    Ok(ImprovementStep { pair: (i, j), parameter: parameter.to_vec(), result: sub.result })
}

/// Refine `c` by removing the covering relation `i ⪯ j`, using the
/// retraction shifted by the given element of Hom(σ({j}), σ({i})).
pub fn one_step_improve(c: &Configuration, i: usize, j: usize, parameter: &[u32]) -> Result<ImprovementStep, ImproveError> {
    let report = split_pair_test(c, i, j)?;
    let Some(r0) = report.retraction else {
        return Err(ImproveError::NotSplit(c.poset().label(i).into(), c.poset().label(j).into()));
    };
    let basis = parameter_basis(c, i, j)?;
    improve_with_basis(c, i, j, &r0, &basis, parameter)
}

/// All improvements at `(i, j)`, in lexicographic parameter order.
pub fn enumerate_improvements(c: &Configuration, i: usize, j: usize) -> Result<Vec<ImprovementStep>, ImproveError> {
    enumerate_improvements_capped(c, i, j, MAX_IMPROVEMENTS)
}

pub fn enumerate_improvements_capped(
    c: &Configuration,
    i: usize,
    j: usize,
    limit: u64,
) -> Result<Vec<ImprovementStep>, ImproveError> {
    let report = split_pair_test(c, i, j)?;
    let Some(r0) = report.retraction else {
        return Ok(Vec::new());
    };
    let basis = parameter_basis(c, i, j)?;
    let p = c.field().modulus();
    let count = (p as u64).checked_pow(basis.len() as u32).filter(|&n| n <= limit);
    let Some(count) = count else {
        return Err(ImproveError::TooMany { p, dim: basis.len(), limit });
    };
    let mut out = Vec::with_capacity(count as usize);
    for n in 0..count {
        let mut param = vec![0u32; basis.len()];
        let mut rest = n;
        for slot in param.iter_mut().rev() {
            *slot = (rest % p as u64) as u32;
            rest /= p as u64;
        }
        out.push(improve_with_basis(c, i, j, &r0, &basis, &param)?);
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct BestSearch {
    pub best: Configuration,
    pub trail: Vec<ImprovementStep>,
}

/// Improve greedily at the least splittable covering pair, with zero
/// parameter, until no covering pair splits.
pub fn best_search(c: &Configuration) -> Result<BestSearch, ImproveError> {
    let mut current = c.clone();
    let mut trail = Vec::new();
    loop {
        let mut next = None;
        for (i, j) in current.poset().covering_pairs() {
            if split_pair_test(&current, i, j)?.split {
                next = Some((i, j));
                break;
            }
        }
        let Some((i, j)) = next else {
            return Ok(BestSearch { best: current, trail });
        };
        let dim = parameter_basis(&current, i, j)?.len();
        let step = one_step_improve(&current, i, j, &vec![0; dim])?;
        current = step.result.clone();
        trail.push(step);
    }
}

/// The input of an improvement, recovered as the quotient along the
/// identity map onto the coarser order.
pub fn coarsen(step: &ImprovementStep, coarse: &FinitePoset) -> Result<Configuration, ImproveError> {
    let id: Vec<usize> = (0..coarse.len()).collect();
    Ok(quotient_configuration(&step.result, coarse, &id)?)
}
