//! Configurations `(σ, ι, π)` indexed by the f-sets of a finite poset,
//! their axioms, and the sub/quotient constructions.

mod build;
mod substitute;

pub use build::{build_from_filtration, build_from_subobjects, extract_subobjects, SubobjectFamily};
pub use substitute::{solve_config_morphism, substitute, transport, Substitution};

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::exactla::FieldSpec;
use crate::poset::{FinitePoset, PosetError, Subset};
use crate::quivercat::{CategoryError, Quiver, Rep, RepMor};

/// Largest index set a configuration may live on.
pub const MAX_CONFIG_ELEMENTS: usize = 10;

pub type Pair = (Subset, Subset);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("MissingEntry: {0}")]
    MissingEntry(String),
    #[error("UnexpectedEntry: {0}")]
    UnexpectedEntry(String),
    #[error("TooLarge: {0} elements (limit {MAX_CONFIG_ELEMENTS})")]
    TooLarge(usize),
    #[error("NotAnFSet: {0}")]
    NotAnFSet(String),
    #[error("NotMonotone")]
    NotMonotone,
    #[error("NotSurjective")]
    NotSurjective,
    #[error("PosetMismatch: {0}")]
    PosetMismatch(String),
    #[error("FamilyAxiomViolation: {0}")]
    FamilyAxiomViolation(String),
    #[error("NotAChain: step {0}")]
    NotAChain(usize),
    #[error("GluingMismatch: {0}")]
    GluingMismatch(String),
    #[error("AdditivityViolation: {0}")]
    AdditivityViolation(String),
    #[error("InvalidConfiguration: {0}")]
    InvalidConfiguration(String),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Category(#[from] CategoryError),
}

/// One failed axiom instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// `i`, `ii`, `iii`, `A`, `B`, `C`, `D`, `endpoint` or `morphism`.
    pub axiom: &'static str,
    pub sets: Vec<Subset>,
    pub detail: String,
}

impl Violation {
    fn new(axiom: &'static str, sets: &[Subset], detail: impl Into<String>) -> Self {
        Violation {
            axiom,
            sets: sets.to_vec(),
            detail: detail.into(),
        }
    }

    pub fn describe(&self, poset: &FinitePoset) -> String {
        let sets: Vec<String> = self
            .sets
            .iter()
            .map(|&s| format!("{{{}}}", poset.subset_labels(s).join(",")))
            .collect();
        format!("({}) {} at {}", self.axiom, self.detail, sets.join(" "))
    }
}

/// An `(I, ⪯)`-configuration with every object and morphism stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    poset: FinitePoset,
    objects: BTreeMap<Subset, Arc<Rep>>,
    iotas: BTreeMap<Pair, RepMor>,
    pis: BTreeMap<Pair, RepMor>,
}

impl Configuration {
    /// Assemble a configuration, checking that the tables cover exactly the
    /// f-sets and pair sets of the poset. Axioms are checked by
    /// [`validate_config`].
    pub fn new(
        poset: FinitePoset,
        objects: BTreeMap<Subset, Arc<Rep>>,
        iotas: BTreeMap<Pair, RepMor>,
        pis: BTreeMap<Pair, RepMor>,
    ) -> Result<Self, ConfigError> {
        if poset.len() > MAX_CONFIG_ELEMENTS {
            return Err(ConfigError::TooLarge(poset.len()));
        }
        let show = |s: Subset| format!("{:?}", poset.subset_labels(s));
        let fsets = poset.fsets();
        for f in &fsets {
            if !objects.contains_key(f) {
                return Err(ConfigError::MissingEntry(format!("object {}", show(*f))));
            }
        }
        if objects.len() != fsets.len() {
            let extra = objects.keys().find(|k| !poset.is_fset(**k)).unwrap();
            return Err(ConfigError::UnexpectedEntry(format!("object {}", show(*extra))));
        }
        for (kind, table, pairs) in [("iota", &iotas, poset.g_pairs()), ("pi", &pis, poset.h_pairs())] {
            for &(a, b) in &pairs {
                if !table.contains_key(&(a, b)) {
                    return Err(ConfigError::MissingEntry(format!("{kind} {} {}", show(a), show(b))));
                }
            }
            if table.len() != pairs.len() {
                let extra = table.keys().find(|k| !pairs.contains(k)).unwrap();
                return Err(ConfigError::UnexpectedEntry(format!("{kind} {} {}", show(extra.0), show(extra.1))));
            }
        }
        let zero = &objects[&Subset::EMPTY];
        for r in objects.values() {
            zero.same_category(r)?;
        }
        for m in iotas.values().chain(pis.values()) {
            zero.same_category(m.source())?;
        }
        Ok(Configuration {
            poset,
            objects,
            iotas,
            pis,
        })
    }

    pub fn poset(&self) -> &FinitePoset {
        &self.poset
    }

    pub fn objects(&self) -> &BTreeMap<Subset, Arc<Rep>> {
        &self.objects
    }

    pub fn iotas(&self) -> &BTreeMap<Pair, RepMor> {
        &self.iotas
    }

    pub fn pis(&self) -> &BTreeMap<Pair, RepMor> {
        &self.pis
    }

    pub fn quiver(&self) -> &Arc<Quiver> {
        self.objects[&Subset::EMPTY].quiver()
    }

    pub fn field(&self) -> FieldSpec {
        self.objects[&Subset::EMPTY].field()
    }

    /// σ(J); panics if `j` is not an f-set.
    pub fn sigma(&self, j: Subset) -> &Arc<Rep> {
        &self.objects[&j]
    }

    /// ι(J, K); panics if the pair is not in 𝒢.
    pub fn iota(&self, j: Subset, k: Subset) -> &RepMor {
        &self.iotas[&(j, k)]
    }

    /// π(J, K); panics if the pair is not in ℋ.
    pub fn pi(&self, j: Subset, k: Subset) -> &RepMor {
        &self.pis[&(j, k)]
    }

    /// The top object σ(I).
    pub fn top(&self) -> &Arc<Rep> {
        self.sigma(self.poset.full())
    }
}

/// Every failed instance of the configuration axioms; empty when valid.
pub fn validate_config(c: &Configuration) -> Vec<Violation> {
    let p = &c.poset;
    let mut out = Vec::new();
    if !c.sigma(Subset::EMPTY).is_zero() {
        out.push(Violation::new("i", &[Subset::EMPTY], "σ(∅) is not zero"));
    }
    let mut endpoints_ok = true;
    for (kind, table) in [("ι", &c.iotas), ("π", &c.pis)] {
        for (&(a, b), m) in table {
            if **m.source() != **c.sigma(a) || **m.target() != **c.sigma(b) {
                out.push(Violation::new("endpoint", &[a, b], format!("{kind} has wrong endpoints")));
                endpoints_ok = false;
            }
        }
    }
    if !endpoints_ok {
        return out;
    }
    for (&(a, b), m) in &c.iotas {
        if !m.is_injective() {
            out.push(Violation::new("ii", &[a, b], "ι not injective"));
        }
        if a == b && !m.is_identity() {
            out.push(Violation::new("ii", &[a, b], "ι(J,J) is not the identity"));
        }
    }
    for (&(a, b), m) in &c.pis {
        if !m.is_surjective() {
            out.push(Violation::new("iii", &[a, b], "π not surjective"));
        }
        if a == b && !m.is_identity() {
            out.push(Violation::new("iii", &[a, b], "π(J,J) is not the identity"));
        }
    }
    let g = p.g_pairs();
    let h = p.h_pairs();
    for &(j, k) in &g {
        let l = k.difference(j);
        let (i, q) = (c.iota(j, k), c.pi(k, l));
        let exact = q.after(i).map(|m| m.is_zero()).unwrap_or(false)
            && (0..c.sigma(k).dims().len()).all(|v| c.sigma(k).dim(v) == c.sigma(j).dim(v) + c.sigma(l).dim(v));
        if !exact {
            out.push(Violation::new("A", &[j, k], "sequence is not exact"));
        }
    }
    for &(j, k) in &g {
        for &(k2, l) in g.iter().filter(|(a, _)| *a == k) {
            debug_assert_eq!(k2, k);
            if c.iota(k, l).after(c.iota(j, k)).ok().as_ref() != Some(c.iota(j, l)) {
                out.push(Violation::new("B", &[j, k, l], "ι(J,L) ≠ ι(K,L)∘ι(J,K)"));
            }
        }
    }
    for &(j, k) in &h {
        for &(_, l) in h.iter().filter(|(a, _)| *a == k) {
            if c.pi(k, l).after(c.pi(j, k)).ok().as_ref() != Some(c.pi(j, l)) {
                out.push(Violation::new("C", &[j, k, l], "π(J,L) ≠ π(K,L)∘π(J,K)"));
            }
        }
    }
    for &(j, k) in &g {
        for &(_, l) in h.iter().filter(|(a, _)| *a == k) {
            let jl = j.intersection(l);
            let lhs = c.pi(k, l).after(c.iota(j, k)).ok();
            let rhs = c.iota(jl, l).after(c.pi(j, jl)).ok();
            if lhs.is_none() || lhs != rhs {
                out.push(Violation::new("D", &[j, k, l], "π(K,L)∘ι(J,K) ≠ ι(J∩L,L)∘π(J,J∩L)"));
            }
        }
    }
    out
}

/// Dimension vector of σ({i}) for each element, checked to be additive
/// over every f-set.
pub fn kappa(c: &Configuration) -> Result<Vec<Vec<usize>>, ConfigError> {
    let n = c.poset.len();
    let k: Vec<Vec<usize>> = (0..n).map(|i| c.sigma(Subset::singleton(i)).dims().to_vec()).collect();
    let nv = c.quiver().vertex_count();
    for f in c.poset.fsets() {
        let mut sum = vec![0; nv];
        for i in f.iter() {
            for v in 0..nv {
                sum[v] += k[i][v];
            }
        }
        if sum != c.sigma(f).dims() {
            return Err(ConfigError::AdditivityViolation(format!("{:?}", c.poset.subset_labels(f))));
        }
    }
    Ok(k)
}

/// Restriction to the f-set `j`, on the induced sub-poset.
pub fn subconfiguration(c: &Configuration, j: Subset) -> Result<Configuration, ConfigError> {
    if !j.is_subset(c.poset.full()) || !c.poset.is_fset(j) {
        return Err(ConfigError::NotAnFSet(format!("{:?}", c.poset.subset_labels(j))));
    }
    let (sub, map) = c.poset.restrict(j);
    let push = |s: Subset| FinitePoset::push_subset(&map, s);
    let objects = sub.fsets().into_iter().map(|f| (f, c.sigma(push(f)).clone())).collect();
    let iotas = sub
        .g_pairs()
        .into_iter()
        .map(|(a, b)| ((a, b), c.iota(push(a), push(b)).clone()))
        .collect();
    let pis = sub
        .h_pairs()
        .into_iter()
        .map(|(a, b)| ((a, b), c.pi(push(a), push(b)).clone()))
        .collect();
    Configuration::new(sub, objects, iotas, pis)
}

/// Check that `phi` is a surjective monotone map from `source` onto `target`.
pub fn check_poset_map(source: &FinitePoset, target: &FinitePoset, phi: &[usize]) -> Result<(), ConfigError> {
    if phi.len() != source.len() || phi.iter().any(|&k| k >= target.len()) {
        return Err(ConfigError::PosetMismatch("map must send every element into the target".into()));
    }
    if Subset::from_indices(phi.iter().copied()) != target.full() {
        return Err(ConfigError::NotSurjective);
    }
    for (i, j) in source.relation_pairs() {
        if !target.leq(phi[i], phi[j]) {
            return Err(ConfigError::NotMonotone);
        }
    }
    Ok(())
}

/// Pull everything back along `phi: I -> K`.
pub fn quotient_configuration(c: &Configuration, target: &FinitePoset, phi: &[usize]) -> Result<Configuration, ConfigError> {
    check_poset_map(&c.poset, target, phi)?;
    let pull = |s: Subset| FinitePoset::pull_subset(phi, s);
    let objects = target.fsets().into_iter().map(|f| (f, c.sigma(pull(f)).clone())).collect();
    let iotas = target
        .g_pairs()
        .into_iter()
        .map(|(a, b)| ((a, b), c.iota(pull(a), pull(b)).clone()))
        .collect();
    let pis = target
        .h_pairs()
        .into_iter()
        .map(|(a, b)| ((a, b), c.pi(pull(a), pull(b)).clone()))
        .collect();
    Configuration::new(target.clone(), objects, iotas, pis)
}

/// A family `α(J): σ(J) -> σ'(J)` between configurations on one poset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigMorphism {
    pub source: Arc<Configuration>,
    pub target: Arc<Configuration>,
    pub alphas: BTreeMap<Subset, RepMor>,
}

impl ConfigMorphism {
    pub fn identity(c: &Arc<Configuration>) -> Self {
        ConfigMorphism {
            source: c.clone(),
            target: c.clone(),
            alphas: c.objects.iter().map(|(&f, r)| (f, RepMor::identity(r))).collect(),
        }
    }

    pub fn is_isomorphism(&self) -> bool {
        self.alphas.values().all(RepMor::is_isomorphism)
    }

    /// Componentwise inverse of an isomorphism.
    pub fn inverse(&self) -> Result<ConfigMorphism, ConfigError> {
        let alphas = self
            .alphas
            .iter()
            .map(|(&f, a)| Ok((f, a.inverse()?)))
            .collect::<Result<_, CategoryError>>()?;
        Ok(ConfigMorphism {
            source: self.target.clone(),
            target: self.source.clone(),
            alphas,
        })
    }
}

/// Every failed compatibility square of a configuration morphism.
pub fn check_config_morphism(m: &ConfigMorphism) -> Vec<Violation> {
    let (s, t) = (&m.source, &m.target);
    let mut out = Vec::new();
    if s.poset != t.poset {
        out.push(Violation::new("morphism", &[], "source and target posets differ"));
        return out;
    }
    for f in s.poset.fsets() {
        match m.alphas.get(&f) {
            None => out.push(Violation::new("morphism", &[f], "missing component")),
            Some(a) => {
                if **a.source() != **s.sigma(f) || **a.target() != **t.sigma(f) {
                    out.push(Violation::new("morphism", &[f], "component has wrong endpoints"));
                }
            }
        }
    }
    if !out.is_empty() {
        return out;
    }
    let al = |f: Subset| &m.alphas[&f];
    for (j, k) in s.poset.g_pairs() {
        let lhs = al(k).after(s.iota(j, k)).ok();
        let rhs = t.iota(j, k).after(al(j)).ok();
        if lhs.is_none() || lhs != rhs {
            out.push(Violation::new("morphism", &[j, k], "ι square does not commute"));
        }
    }
    for (j, k) in s.poset.h_pairs() {
        let lhs = al(k).after(s.pi(j, k)).ok();
        let rhs = t.pi(j, k).after(al(j)).ok();
        if lhs.is_none() || lhs != rhs {
            out.push(Violation::new("morphism", &[j, k], "π square does not commute"));
        }
    }
    out
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "configuration on {}", self.poset)
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::exactla::Matrix;
    use crate::quivercat::SubobjectCF;

    pub use crate::quivercat::rep_fixtures::*;

    /// The configuration of X_ind on v2 ⪯ v1.
    pub fn a2_config() -> Configuration {
        let x = Arc::new(x_ind());
        let p = FinitePoset::new(&["v1", "v2"], &[("v2", "v1")]).unwrap();
        let f = f2();
        let s2 = SubobjectCF::new(x.clone(), vec![Matrix::zeros(f, 1, 0), Matrix::identity(f, 1)]).unwrap();
        let fam = SubobjectFamily::new(
            x.clone(),
            p.clone(),
            [
                (Subset::EMPTY, SubobjectCF::zero(&x)),
                (p.subset_from_labels(&["v2"]).unwrap(), s2),
                (p.full(), SubobjectCF::full(&x)),
            ]
            .into_iter()
            .collect(),
        );
        build_from_subobjects(&fam).unwrap()
    }

    pub fn chain_config(x: Rep, bottom: &[Vec<Matrix>]) -> Configuration {
        let x = Arc::new(x);
        let mut chain = vec![SubobjectCF::zero(&x)];
        for b in bottom {
            chain.push(SubobjectCF::new(x.clone(), b.clone()).unwrap());
        }
        chain.push(SubobjectCF::full(&x));
        build_from_filtration(&x, &chain).unwrap()
    }

    /// Y_split on the chain v2 ⪯ v1, labelled by vertex.
    pub fn ysplit_config() -> Configuration {
        let x = Arc::new(y_split());
        let p = FinitePoset::new(&["v1", "v2"], &[("v2", "v1")]).unwrap();
        let f = f2();
        let s2 = SubobjectCF::new(x.clone(), vec![Matrix::zeros(f, 1, 0), Matrix::identity(f, 1)]).unwrap();
        let fam = SubobjectFamily::new(
            x.clone(),
            p.clone(),
            [
                (Subset::EMPTY, SubobjectCF::zero(&x)),
                (p.subset_from_labels(&["v2"]).unwrap(), s2),
                (p.full(), SubobjectCF::full(&x)),
            ]
            .into_iter()
            .collect(),
        );
        build_from_subobjects(&fam).unwrap()
    }
}
