//! Random generators and brute-force oracles shared by the integration
//! tests and the acceptance suite.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use configcalc::config::{build_from_subobjects, validate_config, Configuration, SubobjectFamily};
use configcalc::exactla::{FieldSpec, Matrix};
use configcalc::poset::{FinitePoset, GluingSpec, Subset};
use configcalc::quivercat::{hom_space, Quiver, Rep, RepMor, SubobjectCF};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn field(p: u64) -> FieldSpec {
    FieldSpec::new(p).unwrap()
}

pub fn all_subsets(n: usize) -> impl Iterator<Item = Subset> {
    (0u32..1 << n).map(move |m| Subset::from_indices((0..n).filter(move |i| m >> i & 1 == 1)))
}

// ---- posets ----

/// A random partial order on `n` elements labelled with `prefix` and an index.
pub fn random_poset_labelled(rng: &mut Rng8, n: usize, prefix: &str, density: f64) -> FinitePoset {
    let labels: Vec<String> = (0..n).map(|i| format!("{prefix}{i}")).collect();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(density) {
                pairs.push((labels[perm[a]].clone(), labels[perm[b]].clone()));
            }
        }
    }
    FinitePoset::new(&labels, &pairs).unwrap()
}

pub fn random_poset(rng: &mut Rng8, n: usize) -> FinitePoset {
    let d = rng.gen_range(0.1..0.7);
    random_poset_labelled(rng, n, "e", d)
}

pub fn oracle_is_sset(p: &FinitePoset, s: Subset) -> bool {
    s.iter().all(|j| (0..p.len()).all(|i| !p.leq(i, j) || s.contains(i)))
}

pub fn oracle_is_qset(p: &FinitePoset, s: Subset) -> bool {
    s.iter().all(|i| (0..p.len()).all(|j| !p.leq(i, j) || s.contains(j)))
}

pub fn oracle_is_fset(p: &FinitePoset, s: Subset) -> bool {
    s.iter()
        .all(|h| s.iter().all(|j| (0..p.len()).all(|i| !(p.leq(h, i) && p.leq(i, j)) || s.contains(i))))
}

pub fn oracle_is_g(p: &FinitePoset, j: Subset, k: Subset) -> bool {
    oracle_is_fset(p, j)
        && oracle_is_fset(p, k)
        && j.is_subset(k)
        && j.iter().all(|a| k.iter().all(|b| !p.leq(b, a) || j.contains(b)))
}

pub fn oracle_is_h(p: &FinitePoset, j: Subset, k: Subset) -> bool {
    oracle_is_fset(p, j)
        && oracle_is_fset(p, k)
        && k.is_subset(j)
        && k.iter().all(|a| j.iter().all(|b| !p.leq(a, b) || k.contains(b)))
}

/// Pairs `(i, j)`, `i != j`, whose removal from the relation leaves a
/// partial order, found by testing transitivity directly.
pub fn oracle_removable_pairs(p: &FinitePoset) -> Vec<(usize, usize)> {
    let n = p.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j || !p.leq(i, j) {
                continue;
            }
            let rel = |a: usize, b: usize| p.leq(a, b) && (a, b) != (i, j);
            let transitive = (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| !(rel(a, b) && rel(b, c)) || rel(a, c))));
            if transitive {
                out.push((i, j));
            }
        }
    }
    out
}

// ---- quivers and representations ----

pub fn random_quiver(rng: &mut Rng8, vertices: usize, arrows: usize) -> Arc<Quiver> {
    let vs: Vec<String> = (0..vertices).map(|i| format!("v{i}")).collect();
    let arr: Vec<(String, String, String)> = (0..arrows)
        .map(|k| {
            let f = rng.gen_range(0..vertices);
            let t = rng.gen_range(0..vertices);
            (format!("a{k}"), vs[f].clone(), vs[t].clone())
        })
        .collect();
    Arc::new(Quiver::new(&vs, &arr, &[]).unwrap())
}

pub fn random_matrix(rng: &mut Rng8, f: FieldSpec, rows: usize, cols: usize) -> Matrix {
    let p = f.modulus();
    Matrix::from_fn(f, rows, cols, |_, _| rng.gen_range(0..p))
}

pub fn random_invertible(rng: &mut Rng8, f: FieldSpec, n: usize) -> Matrix {
    loop {
        let m = random_matrix(rng, f, n, n);
        if m.rank() == n {
            return m;
        }
    }
}

/// A nilpotent representation with every dimension 0 or 1 and no
/// relations.
pub fn random_mf_nilpotent_rep(rng: &mut Rng8, f: FieldSpec) -> Rep {
    loop {
        let nv = rng.gen_range(1..=5);
        let na = rng.gen_range(0..=6);
        let q = random_quiver(rng, nv, na);
        let mut dims: Vec<usize> = (0..nv).map(|_| usize::from(rng.gen_bool(0.8))).collect();
        if dims.iter().all(|&d| d == 0) {
            dims[rng.gen_range(0..nv)] = 1;
        }
        let mats: Vec<Matrix> = q
            .arrows()
            .iter()
            .map(|a| {
                let (r, c) = (dims[a.to], dims[a.from]);
                if a.from == a.to {
                    Matrix::zeros(f, r, c)
                } else {
                    random_matrix(rng, f, r, c)
                }
            })
            .collect();
        let x = Rep::new(q, f, dims, mats).unwrap();
        if x.is_nilpotent() {
            return x;
        }
    }
}

pub fn support(x: &Rep) -> Vec<usize> {
    (0..x.dims().len()).filter(|&v| x.dim(v) > 0).collect()
}

/// Subsets of the support (bit `k` for `support[k]`) that span a
/// subrepresentation.
pub fn oracle_closed_sets(x: &Rep) -> Vec<u32> {
    let supp = support(x);
    let pos = |v: usize| supp.iter().position(|&s| s == v);
    (0u32..1 << supp.len())
        .filter(|&m| {
            x.quiver().arrows().iter().zip(x.mats()).all(|(a, mat)| {
                match (pos(a.from), pos(a.to)) {
                    (Some(fi), Some(ti)) => mat.is_zero() || m >> fi & 1 == 0 || m >> ti & 1 == 1,
                    _ => true,
                }
            })
        })
        .collect()
}

/// All maximal chains of closed sets, each given as the sequence of
/// support positions added; `None` if some step adds more than one.
pub fn oracle_composition_series(x: &Rep) -> Option<Vec<Vec<usize>>> {
    let closed = oracle_closed_sets(x);
    let n = support(x).len();
    let full = (1u32 << n) - 1;
    let mut out = Vec::new();
    let mut ok = true;
    fn walk(s: u32, full: u32, closed: &[u32], path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>, ok: &mut bool) {
        if s == full {
            out.push(path.clone());
            return;
        }
        for &t in closed {
            if t & s != s || t == s {
                continue;
            }
            let covers = !closed.iter().any(|&u| u != s && u != t && u & s == s && u & t == u);
            if !covers {
                continue;
            }
            let added = t & !s;
            if added.count_ones() != 1 {
                *ok = false;
                continue;
            }
            path.push(added.trailing_zeros() as usize);
            walk(t, full, closed, path, out, ok);
            path.pop();
        }
    }
    walk(0, full, &closed, &mut Vec::new(), &mut out, &mut ok);
    ok.then_some(out)
}

/// The subobject spanned by the coordinate lines of a multiplicity-free
/// representation at the given vertices.
pub fn coordinate_subobject(x: &Arc<Rep>, vertices: &[usize]) -> SubobjectCF {
    let f = x.field();
    let spans = (0..x.dims().len())
        .map(|v| {
            let d = x.dim(v);
            if vertices.contains(&v) {
                Matrix::identity(f, d)
            } else {
                Matrix::zeros(f, d, 0)
            }
        })
        .collect();
    SubobjectCF::new(x.clone(), spans).unwrap()
}

/// A random order on the support containing `base`, drawn by keeping a
/// random subset of the pairs of a random linear extension.
pub fn random_coarsening(rng: &mut Rng8, base: &FinitePoset) -> FinitePoset {
    let exts = base.linear_extensions().unwrap();
    let ext = exts.choose(rng).unwrap();
    let mut pairs: Vec<(usize, usize)> = base.relation_pairs();
    for a in 0..ext.len() {
        for b in a + 1..ext.len() {
            if rng.gen_bool(0.3) {
                pairs.push((ext[a], ext[b]));
            }
        }
    }
    let labels: Vec<&str> = base.labels().iter().map(String::as_str).collect();
    let named: Vec<(&str, &str)> = pairs.iter().map(|&(a, b)| (labels[a], labels[b])).collect();
    FinitePoset::new(&labels, &named).unwrap()
}

/// The coordinate family of a multiplicity-free representation on an
/// order whose elements are vertex labels.
pub fn coordinate_family(x: &Arc<Rep>, p: &FinitePoset) -> SubobjectFamily {
    let table = p
        .ssets()
        .into_iter()
        .map(|s| {
            let vs: Vec<usize> = s.iter().map(|i| x.quiver().vertex_index(p.label(i)).unwrap()).collect();
            (s, coordinate_subobject(x, &vs))
        })
        .collect();
    SubobjectFamily::new(x.clone(), p.clone(), table)
}

// ---- configurations ----

/// Random configuration on `p`: each element gets a small representation,
/// off-diagonal blocks go from higher to lower elements, and the whole
/// object is conjugated by a random change of basis.
pub struct Generated {
    pub config: Configuration,
    pub family: SubobjectFamily,
    /// `parts[i]` is the dimension vector given to element `i`.
    pub parts: Vec<Vec<usize>>,
}

pub fn random_config_on(rng: &mut Rng8, p: &FinitePoset, f: FieldSpec, max_dim: usize) -> Generated {
    let n = p.len();
    let nv = rng.gen_range(1..=3);
    let na = rng.gen_range(0..=3);
    let q = random_quiver(rng, nv, na);
    let mut budget = max_dim;
    let mut parts = vec![vec![0usize; nv]; n];
    for part in parts.iter_mut() {
        if budget == 0 {
            break;
        }
        let v = rng.gen_range(0..nv);
        part[v] += 1;
        budget -= 1;
    }
    while budget > 0 && rng.gen_bool(0.5) {
        let (i, v) = (rng.gen_range(0..n), rng.gen_range(0..nv));
        parts[i][v] += 1;
        budget -= 1;
    }
    // offsets[i][v]: first coordinate of element i at vertex v
    let mut offsets = vec![vec![0usize; nv]; n];
    let mut dims = vec![0usize; nv];
    for (off, part) in offsets.iter_mut().zip(&parts) {
        off.copy_from_slice(&dims);
        for (d, k) in dims.iter_mut().zip(part) {
            *d += k;
        }
    }
    let split_bias = rng.gen_range(0.2..0.8);
    let mut mats = Vec::new();
    for a in q.arrows() {
        let mut m = Matrix::zeros(f, dims[a.to], dims[a.from]);
        for i in 0..n {
            for j in 0..n {
                if !p.leq(i, j) || (i != j && rng.gen_bool(split_bias)) {
                    continue;
                }
                let block = random_matrix(rng, f, parts[i][a.to], parts[j][a.from]);
                for r in 0..block.rows() {
                    for c in 0..block.cols() {
                        m.set(offsets[i][a.to] + r, offsets[j][a.from] + c, block.get(r, c));
                    }
                }
            }
        }
        mats.push(m);
    }
    let g: Vec<Matrix> = dims.iter().map(|&d| random_invertible(rng, f, d)).collect();
    let conj: Vec<Matrix> = q
        .arrows()
        .iter()
        .zip(&mats)
        .map(|(a, m)| g[a.to].mul(m).mul(&g[a.from].inverse().unwrap()))
        .collect();
    let x = Arc::new(Rep::new(q, f, dims.clone(), conj).unwrap());
    let mut table = BTreeMap::new();
    for s in p.ssets() {
        let spans = (0..nv)
            .map(|v| {
                let cols: Vec<usize> =
                    s.iter().flat_map(|i| offsets[i][v]..offsets[i][v] + parts[i][v]).collect();
                g[v].select_cols(&cols)
            })
            .collect();
        table.insert(s, SubobjectCF::new(x.clone(), spans).unwrap());
    }
    let family = SubobjectFamily::new(x, p.clone(), table);
    let config = build_from_subobjects(&family).unwrap();
    Generated { config, family, parts }
}

pub fn random_config(rng: &mut Rng8, max_elems: usize, max_dim: usize) -> Generated {
    let f = field(*[2u64, 3].choose(rng).unwrap());
    let n = rng.gen_range(1..=max_elems);
    let p = random_poset(rng, n);
    random_config_on(rng, &p, f, max_dim)
}

/// A random gluing with `|J| + |K \ L| <= max_elems`.
pub fn random_gluing(rng: &mut Rng8, max_elems: usize) -> GluingSpec {
    loop {
        let nk = rng.gen_range(1..=3.min(max_elems));
        let k = random_poset_labelled(rng, nk, "k", 0.5);
        let fsets: Vec<Subset> = k.fsets().into_iter().filter(|s| !s.is_empty()).collect();
        let l = *fsets.choose(rng).unwrap();
        let lmembers: Vec<usize> = l.iter().collect();
        let room = max_elems - (nk - l.len());
        if room < l.len() {
            continue;
        }
        let nj = rng.gen_range(l.len()..=room);
        let mut psi: Vec<usize> = lmembers.clone();
        while psi.len() < nj {
            psi.push(*lmembers.choose(rng).unwrap());
        }
        psi.shuffle(rng);
        let labels: Vec<String> = (0..nj).map(|i| format!("j{i}")).collect();
        let mut perm: Vec<usize> = (0..nj).collect();
        perm.shuffle(rng);
        let mut pairs = Vec::new();
        for a in 0..nj {
            for b in a + 1..nj {
                let (x, y) = (perm[a], perm[b]);
                if k.leq(psi[x], psi[y]) && rng.gen_bool(0.5) {
                    pairs.push((labels[x].clone(), labels[y].clone()));
                }
            }
        }
        let j = FinitePoset::new(&labels, &pairs).unwrap();
        // labels are sorted the same way as the index order used above
        return GluingSpec {
            sub_poset: j,
            ambient_poset: k,
            glue_fset: l,
            psi,
        };
    }
}

// ---- improvement oracle ----

fn flatten(m: &RepMor) -> Vec<u32> {
    m.mats().iter().flat_map(|a| a.entries().to_vec()).collect()
}

/// Solve `Σ c_k · g(basis_k) = target` for the coefficients, where each
/// side is flattened to one column.
fn solve_in_span(basis: &[RepMor], image: impl Fn(&RepMor) -> Vec<u32>, target: Vec<u32>, f: FieldSpec) -> Option<Vec<u32>> {
    let cols: Vec<Vec<u32>> = basis.iter().map(&image).collect();
    let m = target.len();
    if basis.is_empty() {
        return target.iter().all(|&x| x == 0).then(Vec::new);
    }
    let a = Matrix::from_fn(f, m, basis.len(), |r, c| cols[c][r]);
    let b = Matrix::from_fn(f, m, 1, |r, _| target[r]);
    a.solve(&b).ok().map(|x| (0..basis.len()).map(|k| x.get(k, 0)).collect())
}

/// Whether the two-element subconfiguration at `(i, j)` admits a finer
/// configuration on the discrete order: a retraction `r` of ι({i},{i,j})
/// and a section `s` of π({i,j},{j}) with `r∘s = 0`, found by solving in
/// Hom-space coordinates.
pub fn oracle_pair_improvable(c: &Configuration, i: usize, j: usize) -> bool {
    let f = c.field();
    let (si, sj) = (Subset::singleton(i), Subset::singleton(j));
    let k = si.union(sj);
    let (xi, xj, xk) = (c.sigma(si), c.sigma(sj), c.sigma(k));
    let iota = c.iota(si, k);
    let pi = c.pi(k, sj);
    let rb = hom_space(xk, xi).unwrap();
    let id_i = flatten(&RepMor::identity(xi));
    let Some(rc) = solve_in_span(&rb, |b| flatten(&b.after(iota).unwrap()), id_i, f) else {
        return false;
    };
    let r = RepMor::linear_combination(xk, xi, &rb, &rc);
    let sb = hom_space(xj, xk).unwrap();
    let mut target = flatten(&RepMor::identity(xj));
    target.extend(flatten(&RepMor::zero(xj, xi)));
    let image = |b: &RepMor| {
        let mut v = flatten(&pi.after(b).unwrap());
        v.extend(flatten(&r.after(b).unwrap()));
        v
    };
    let Some(sc) = solve_in_span(&sb, image, target, f) else {
        return false;
    };
    let s = RepMor::linear_combination(xj, xk, &sb, &sc);
    // the direct-sum identity closes the construction
    let sum = iota.after(&r).unwrap().add(&s.after(pi).unwrap()).unwrap();
    assert!(sum.is_identity());
    true
}

/// Whether some one-step finer order admits an improvement.
pub fn oracle_improvable(c: &Configuration) -> bool {
    oracle_removable_pairs(c.poset())
        .into_iter()
        .any(|(i, j)| oracle_pair_improvable(c, i, j))
}

pub fn assert_valid(c: &Configuration) {
    let v = validate_config(c);
    assert!(v.is_empty(), "{:?}", v.iter().map(|x| x.describe(c.poset())).collect::<Vec<_>>());
}
