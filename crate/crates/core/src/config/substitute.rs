use std::collections::BTreeMap;
use std::sync::Arc;

use super::{
    build_from_subobjects, check_config_morphism, quotient_configuration, subconfiguration, ConfigError,
    ConfigMorphism, Configuration, SubobjectFamily,
};
use crate::poset::{FinitePoset, GluingSpec, Subset};
use crate::quivercat::{RepMor, SubobjectCF};

/// Result of gluing an inner configuration into an outer one.
#[derive(Debug, Clone)]
pub struct Substitution {
    pub result: Configuration,
    /// Map from the glued index set onto the outer index set.
    pub phi: Vec<usize>,
    /// The inner index set as a subset of the glued one.
    pub inner_set: Subset,
    /// From the result's subconfiguration on the inner set to `inner`.
    pub sub_witness: ConfigMorphism,
    /// From the result's quotient configuration along `phi` to `outer`.
    pub quot_witness: ConfigMorphism,
}

/// The unique configuration morphism `src -> dst` restricting to `top`
/// on the top objects, when it exists.
pub fn solve_config_morphism(src: &Configuration, dst: &Configuration, top: &RepMor) -> Result<ConfigMorphism, ConfigError> {
    let p = src.poset();
    if p != dst.poset() {
        return Err(ConfigError::PosetMismatch("morphism between different posets".into()));
    }
    let full = p.full();
    let mut alphas: BTreeMap<Subset, RepMor> = BTreeMap::new();
    for a in p.ssets() {
        let m = top.after(src.iota(a, full))?;
        alphas.insert(a, dst.iota(a, full).lift_through(&m)?);
    }
    for f in p.fsets() {
        if p.is_sset(f) {
            continue;
        }
        let d = p.down_closure(f);
        let m = dst.pi(d, f).after(&alphas[&d])?;
        alphas.insert(f, src.pi(d, f).descend_through(&m)?);
    }
    let morphism = ConfigMorphism {
        source: Arc::new(src.clone()),
        target: Arc::new(dst.clone()),
        alphas,
    };
    let v = check_config_morphism(&morphism);
    if !v.is_empty() {
        return Err(ConfigError::InvalidConfiguration(v[0].describe(p)));
    }
    Ok(morphism)
}

/// Replace σ(A) by the target of the isomorphism `gammas[A]` and conjugate
/// every ι and π accordingly. Missing entries are identities.
pub fn transport(c: &Configuration, gammas: &BTreeMap<Subset, RepMor>) -> Result<Configuration, ConfigError> {
    let inverses = gammas
        .iter()
        .map(|(&a, g)| Ok((a, g.inverse()?)))
        .collect::<Result<BTreeMap<_, _>, ConfigError>>()?;
    let conj = |a: Subset, b: Subset, m: &RepMor| -> Result<RepMor, ConfigError> {
        let mut out = m.clone();
        if let Some(inv) = inverses.get(&a) {
            out = out.after(inv)?;
        }
        if let Some(g) = gammas.get(&b) {
            out = g.after(&out)?;
        }
        Ok(out)
    };
    let objects = c
        .objects()
        .iter()
        .map(|(&a, r)| (a, gammas.get(&a).map_or_else(|| r.clone(), |g| g.target().clone())))
        .collect();
    let iotas = c
        .iotas()
        .iter()
        .map(|(&(a, b), m)| Ok(((a, b), conj(a, b, m)?)))
        .collect::<Result<_, ConfigError>>()?;
    let pis = c
        .pis()
        .iter()
        .map(|(&(a, b), m)| Ok(((a, b), conj(a, b, m)?)))
        .collect::<Result<_, ConfigError>>()?;
    Configuration::new(c.poset().clone(), objects, iotas, pis)
}

/// Glue `inner` on `(J, ≲)` into the f-set `L` of `outer` on `(K, ⊴)`.
///
/// Without `alpha`, the `L`-subconfiguration of `outer` must equal the
/// quotient of `inner` along `psi`; with `alpha`, that isomorphism
/// identifies them. The result has `inner` as its `J`-subconfiguration
/// literally, and a quotient isomorphic to `outer` via `quot_witness`
/// (equal to `outer` when `alpha` is absent).
pub fn substitute(
    outer: &Configuration,
    inner: &Configuration,
    spec: &GluingSpec,
    alpha: Option<&ConfigMorphism>,
) -> Result<Substitution, ConfigError> {
    if &spec.ambient_poset != outer.poset() {
        return Err(ConfigError::PosetMismatch("gluing ambient poset differs from the outer poset".into()));
    }
    if &spec.sub_poset != inner.poset() {
        return Err(ConfigError::PosetMismatch("gluing sub-poset differs from the inner poset".into()));
    }
    outer.top().same_category(inner.top())?;
    let (iposet, phi) = FinitePoset::glue(spec)?;
    let kposet = outer.poset();
    let l = spec.glue_fset;

    let (lposet, lmap) = kposet.restrict(l);
    let psi_l: Vec<usize> = spec
        .psi
        .iter()
        .map(|k| lmap.iter().position(|x| x == k).expect("psi lands in L"))
        .collect();
    let check = subconfiguration(outer, l)?;
    let hat = quotient_configuration(inner, &lposet, &psi_l)?;

    // β: outer -> dotted, equal to α on subsets of L
    let mut beta: BTreeMap<Subset, RepMor> = BTreeMap::new();
    match alpha {
        None => {
            if check != hat {
                return Err(ConfigError::GluingMismatch(
                    "outer restricted to L differs from the quotient of inner".into(),
                ));
            }
        }
        Some(a) => {
            if *a.source != check || *a.target != hat {
                return Err(ConfigError::GluingMismatch("alpha has the wrong endpoints".into()));
            }
            let v = check_config_morphism(a);
            if let Some(first) = v.first() {
                return Err(ConfigError::GluingMismatch(first.describe(&lposet)));
            }
            if !a.is_isomorphism() {
                return Err(ConfigError::GluingMismatch("alpha is not an isomorphism".into()));
            }
            for (&f, m) in &a.alphas {
                beta.insert(FinitePoset::push_subset(&lmap, f), m.clone());
            }
        }
    }
    let dotted = transport(outer, &beta)?;

    // the inner index set inside I, and its index map
    let jmap: Vec<usize> = inner
        .poset()
        .labels()
        .iter()
        .map(|s| iposet.index_of(s).expect("inner label in glued poset"))
        .collect();
    let jset = Subset::from_indices(jmap.iter().copied());
    let to_inner = |s: Subset| FinitePoset::pull_subset(&jmap, s);
    let pull = |s: Subset| FinitePoset::pull_subset(&phi, s);

    let x = dotted.top().clone();
    let kfull = kposet.full();
    let mut table = BTreeMap::new();
    for b in iposet.ssets() {
        let p_set = Subset::from_indices(
            (0..kposet.len()).filter(|&k| pull(kposet.down_set(k)).is_subset(b)),
        );
        let r_set = kposet.down_closure(FinitePoset::push_subset(&phi, b));
        let c_set = pull(r_set);
        let incl = if b == c_set {
            dotted.iota(r_set, kfull).clone()
        } else {
            let d = pull(p_set).intersection(jset);
            let e = b.intersection(jset);
            let f = c_set.intersection(jset);
            let g = inner
                .pi(to_inner(f.difference(d)), to_inner(f.difference(e)))
                .after(dotted.pi(r_set, r_set.difference(p_set)))?;
            let (_, k) = g.kernel();
            dotted.iota(r_set, kfull).after(&k)?
        };
        table.insert(b, SubobjectCF::image_of(&incl));
    }
    let fam = SubobjectFamily::new(x.clone(), iposet.clone(), table);
    let c0 = build_from_subobjects(&fam)?;

    // make the quotient equal to the dotted configuration
    let q0 = quotient_configuration(&c0, kposet, &phi)?;
    let w = solve_config_morphism(&q0, &dotted, &RepMor::identity(&x))?;
    let gammas: BTreeMap<Subset, RepMor> = w.alphas.iter().map(|(&a, m)| (pull(a), m.clone())).collect();
    let c1 = transport(&c0, &gammas)?;

    // then make the J-subconfiguration equal to inner
    let s1 = subconfiguration(&c1, jset)?;
    let top_j = RepMor::identity(inner.top()).with_endpoints(s1.top(), inner.top())?;
    let u = solve_config_morphism(&s1, inner, &top_j)?;
    let gammas: BTreeMap<Subset, RepMor> = u
        .alphas
        .iter()
        .filter(|(_, m)| !(m.is_identity() && m.source() == m.target()))
        .map(|(&a, m)| (FinitePoset::push_subset(&jmap, a), m.clone()))
        .collect();
    let result = transport(&c1, &gammas)?;

    let sub = subconfiguration(&result, jset)?;
    if &sub != inner {
        return Err(ConfigError::InvalidConfiguration("subconfiguration does not match inner".into()));
    }
    let quot = quotient_configuration(&result, kposet, &phi)?;
    if quot != dotted {
        return Err(ConfigError::InvalidConfiguration("quotient does not match outer".into()));
    }
    let inner_arc = Arc::new(inner.clone());
    let sub_witness = ConfigMorphism {
        source: Arc::new(sub),
        target: inner_arc.clone(),
        alphas: inner.objects().iter().map(|(&f, r)| (f, RepMor::identity(r))).collect(),
    };
    let quot_witness = ConfigMorphism {
        source: Arc::new(quot),
        target: Arc::new(outer.clone()),
        alphas: outer
            .objects()
            .iter()
            .map(|(&f, r)| {
                let m = match beta.get(&f) {
                    Some(b) => b.inverse()?,
                    None => RepMor::identity(r),
                };
                Ok((f, m))
            })
            .collect::<Result<_, ConfigError>>()?,
    };
    Ok(Substitution {
        result,
        phi,
        inner_set: jset,
        sub_witness,
        quot_witness,
    })
}
