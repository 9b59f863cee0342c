use std::collections::BTreeMap;
use std::sync::Arc;

use super::{ConfigError, Configuration};
use crate::poset::{FinitePoset, Subset};
use crate::quivercat::{direct_sum, Rep, RepMor, SubobjectCF};

/// Subobjects `S^J` of one representation, one for each s-set `J`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubobjectFamily {
    pub ambient: Arc<Rep>,
    pub poset: FinitePoset,
    pub table: BTreeMap<Subset, SubobjectCF>,
}

impl SubobjectFamily {
    pub fn new(ambient: Arc<Rep>, poset: FinitePoset, table: BTreeMap<Subset, SubobjectCF>) -> Self {
        SubobjectFamily { ambient, poset, table }
    }

    /// Check that the table is indexed by the s-sets, that `S^∅ = 0`,
    /// `S^I = X`, and that meets and sums of subobjects follow
    /// intersections and unions of s-sets.
    pub fn check(&self) -> Result<(), ConfigError> {
        let p = &self.poset;
        let show = |s: Subset| format!("{:?}", p.subset_labels(s));
        let ssets = p.ssets();
        for s in &ssets {
            if !self.table.contains_key(s) {
                return Err(ConfigError::MissingEntry(format!("subobject {}", show(*s))));
            }
        }
        if let Some(extra) = self.table.keys().find(|k| !k.is_subset(p.full()) || !p.is_sset(**k)) {
            return Err(ConfigError::UnexpectedEntry(format!("subobject {}", show(*extra))));
        }
        for s in self.table.values() {
            if s.ambient() != &self.ambient {
                return Err(ConfigError::FamilyAxiomViolation("subobject of a different ambient".into()));
            }
        }
        if self.table[&Subset::EMPTY] != SubobjectCF::zero(&self.ambient) {
            return Err(ConfigError::FamilyAxiomViolation("S^∅ is not zero".into()));
        }
        if self.table[&p.full()] != SubobjectCF::full(&self.ambient) {
            return Err(ConfigError::FamilyAxiomViolation("S^I is not the whole object".into()));
        }
        for (i, &a) in ssets.iter().enumerate() {
            for &b in &ssets[i + 1..] {
                let (sa, sb) = (&self.table[&a], &self.table[&b]);
                if sa.meet(sb)? != self.table[&a.intersection(b)] {
                    return Err(ConfigError::FamilyAxiomViolation(format!(
                        "S^{} ∩ S^{} ≠ S^(A∩B)",
                        show(a),
                        show(b)
                    )));
                }
                if sa.join(sb)? != self.table[&a.union(b)] {
                    return Err(ConfigError::FamilyAxiomViolation(format!(
                        "S^{} + S^{} ≠ S^(A∪B)",
                        show(a),
                        show(b)
                    )));
                }
            }
        }
        Ok(())
    }
}

/// The configuration with top object `X` whose injections `ι(J, I)`
/// represent the given subobjects. Objects on s-sets are the canonical
/// subrepresentations; other f-sets get canonical cokernels; every
/// remaining map is the unique solution of its defining factorization.
pub fn build_from_subobjects(fam: &SubobjectFamily) -> Result<Configuration, ConfigError> {
    fam.check()?;
    let p = &fam.poset;
    let x = &fam.ambient;
    let full = p.full();
    let ssets = p.ssets();
    let fsets = p.fsets();

    let mut objects: BTreeMap<Subset, Arc<Rep>> = BTreeMap::new();
    let mut to_top: BTreeMap<Subset, RepMor> = BTreeMap::new();
    for &s in &ssets {
        let (obj, incl) = if s.is_empty() {
            let z = Arc::new(Rep::zero(x.quiver().clone(), x.field()));
            let i = RepMor::zero(&z, x);
            (z, i)
        } else if s == full {
            (x.clone(), RepMor::identity(x))
        } else {
            fam.table[&s].to_rep()
        };
        objects.insert(s, obj);
        to_top.insert(s, incl);
    }

    let mut iotas = BTreeMap::new();
    for &j in &ssets {
        for &k in ssets.iter().filter(|k| j.is_subset(**k)) {
            iotas.insert((j, k), to_top[&k].lift_through(&to_top[&j])?);
        }
    }

    // π(K', L) with J' = I \ up(L), K' = J' ∪ L
    let bracket = |l: Subset| {
        let jp = full.difference(p.up_closure(l));
        (jp, jp.union(l))
    };
    let mut pi_top: BTreeMap<Subset, RepMor> = BTreeMap::new();
    for &l in &fsets {
        let (jp, kp) = bracket(l);
        if p.is_sset(l) {
            let ds = direct_sum(&objects[&jp], &objects[&l])?;
            let h = iotas[&(jp, kp)]
                .after(&ds.proj_x)?
                .add(&iotas[&(l, kp)].after(&ds.proj_y)?)?;
            pi_top.insert(l, h.descend_through(&ds.proj_y)?);
        } else {
            let (c, q) = iotas[&(jp, kp)].cokernel();
            objects.insert(l, c);
            pi_top.insert(l, q);
        }
    }

    let mut pis = BTreeMap::new();
    for (k, l) in p.h_pairs() {
        if p.is_sset(k) {
            let (_, kp) = bracket(l);
            pis.insert((k, l), pi_top[&l].after(&iotas[&(k, kp)])?);
        }
    }

    for (j, k) in p.g_pairs() {
        let a = full.difference(p.up_closure(k));
        let (b, c) = (a.union(j), a.union(k));
        if !(p.is_sset(j) && p.is_sset(k)) {
            let m = pis[&(c, k)].after(&iotas[&(b, c)])?;
            let i = pis[&(b, j)].descend_through(&m)?;
            iotas.insert((j, k), i);
        }
        if !p.is_sset(k) {
            let l = k.difference(j);
            let q = pis[&(c, k)].descend_through(&pis[&(c, l)])?;
            pis.insert((k, l), q);
        }
    }

    Configuration::new(p.clone(), objects, iotas, pis)
}

/// The chain configuration on `{1, ..., n}` of a filtration
/// `0 = A_0 ⊆ A_1 ⊆ ... ⊆ A_n = X`.
pub fn build_from_filtration(x: &Arc<Rep>, chain: &[SubobjectCF]) -> Result<Configuration, ConfigError> {
    if chain.is_empty() {
        return Err(ConfigError::NotAChain(0));
    }
    for (k, w) in chain.windows(2).enumerate() {
        if !w[0].is_contained_in(&w[1]) {
            return Err(ConfigError::NotAChain(k + 1));
        }
    }
    let n = chain.len() - 1;
    let labels: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
    let poset = FinitePoset::chain(&labels)?;
    let mut table = BTreeMap::new();
    for (k, s) in chain.iter().enumerate() {
        let set = poset.subset_from_labels(&labels[..k])?;
        table.insert(set, s.clone());
    }
    build_from_subobjects(&SubobjectFamily::new(x.clone(), poset, table))
}

/// The subobjects represented by `ι(J, I)` for each s-set `J`.
pub fn extract_subobjects(c: &Configuration) -> Result<SubobjectFamily, ConfigError> {
    let p = c.poset();
    let table = p
        .ssets()
        .into_iter()
        .map(|s| (s, SubobjectCF::image_of(c.iota(s, p.full()))))
        .collect();
    let fam = SubobjectFamily::new(c.top().clone(), p.clone(), table);
    fam.check()?;
    Ok(fam)
}
