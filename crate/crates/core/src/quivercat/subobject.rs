use std::collections::BTreeMap;
use std::sync::Arc;

use super::morphism::sub_rep;
use super::{CategoryError, Rep, RepMor};
use crate::exactla::{column_span_contains, subspace_meet_join, Matrix};
use crate::poset::{FinitePoset, Subset};

/// A subrepresentation, stored as canonical per-vertex column bases so
/// that equal subobjects compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubobjectCF {
    ambient: Arc<Rep>,
    bases: Vec<Matrix>,
}

impl SubobjectCF {
    /// Canonicalize spanning sets and check closure under the arrows.
    pub fn new(ambient: Arc<Rep>, spans: Vec<Matrix>) -> Result<Self, CategoryError> {
        if spans.len() != ambient.dims().len() {
            return Err(CategoryError::ShapeMismatch("one spanning matrix per vertex".into()));
        }
        for (v, s) in spans.iter().enumerate() {
            if s.rows() != ambient.dim(v) {
                return Err(CategoryError::ShapeMismatch(format!(
                    "vertex {} spans live in dimension {}",
                    ambient.quiver().vertices()[v],
                    ambient.dim(v)
                )));
            }
            if s.field() != ambient.field() {
                return Err(CategoryError::FieldMismatch);
            }
        }
        let bases: Vec<Matrix> = spans.iter().map(Matrix::column_basis).collect();
        for (ai, a) in ambient.quiver().arrows().iter().enumerate() {
            let moved = ambient.mat(ai).mul(&bases[a.from]);
            if !column_span_contains(&bases[a.to], &moved) {
                return Err(CategoryError::NotClosed(a.name.clone()));
            }
        }
        Ok(SubobjectCF { ambient, bases })
    }

    pub fn zero(ambient: &Arc<Rep>) -> Self {
        let f = ambient.field();
        let bases = ambient.dims().iter().map(|&d| Matrix::zeros(f, d, 0)).collect();
        SubobjectCF {
            ambient: ambient.clone(),
            bases,
        }
    }

    pub fn full(ambient: &Arc<Rep>) -> Self {
        let f = ambient.field();
        let bases = ambient.dims().iter().map(|&d| Matrix::identity(f, d)).collect();
        SubobjectCF {
            ambient: ambient.clone(),
            bases,
        }
    }

    /// The image of a morphism into `target(f)`.
    pub fn image_of(f: &RepMor) -> Self {
        SubobjectCF {
            ambient: f.target().clone(),
            bases: f.mats().iter().map(Matrix::column_basis).collect(),
        }
    }

    pub fn ambient(&self) -> &Arc<Rep> {
        &self.ambient
    }

    pub fn bases(&self) -> &[Matrix] {
        &self.bases
    }

    pub fn dims(&self) -> Vec<usize> {
        self.bases.iter().map(Matrix::cols).collect()
    }

    pub fn is_contained_in(&self, other: &SubobjectCF) -> bool {
        self.ambient == other.ambient
            && self
                .bases
                .iter()
                .zip(&other.bases)
                .all(|(a, b)| column_span_contains(b, a))
    }

    fn combine(&self, other: &SubobjectCF, meet: bool) -> Result<SubobjectCF, CategoryError> {
        if self.ambient != other.ambient {
            return Err(CategoryError::AmbientMismatch);
        }
        let mut bases = Vec::with_capacity(self.bases.len());
        for (a, b) in self.bases.iter().zip(&other.bases) {
            let (m, j) = subspace_meet_join(a, b)?;
            bases.push(if meet { m } else { j });
        }
        Ok(SubobjectCF {
            ambient: self.ambient.clone(),
            bases,
        })
    }

    pub fn meet(&self, other: &SubobjectCF) -> Result<SubobjectCF, CategoryError> {
        self.combine(other, true)
    }

    pub fn join(&self, other: &SubobjectCF) -> Result<SubobjectCF, CategoryError> {
        self.combine(other, false)
    }

    /// The subobject as a representation together with its inclusion.
    pub fn to_rep(&self) -> (Arc<Rep>, RepMor) {
        let s = sub_rep(&self.ambient, &self.bases);
        let incl = RepMor::new_trusted(s.clone(), self.ambient.clone(), self.bases.clone());
        (s, incl)
    }
}

/// Vertices with nonzero dimension, checking the multiplicity-free
/// nilpotent hypothesis.
fn support(x: &Rep) -> Result<Vec<usize>, CategoryError> {
    if x.dims().iter().any(|&d| d > 1) {
        return Err(CategoryError::NotMultiplicityFree);
    }
    if !x.is_nilpotent() {
        return Err(CategoryError::NotNilpotent);
    }
    Ok((0..x.dims().len()).filter(|&v| x.dim(v) == 1).collect())
}

/// Vertex sets of support closed under the nonzero arrows.
fn closed_supports(x: &Rep, supp: &[usize]) -> Vec<u32> {
    let edges: Vec<(usize, usize)> = x
        .quiver()
        .arrows()
        .iter()
        .enumerate()
        .filter(|(ai, _)| !x.mat(*ai).is_zero())
        .map(|(_, a)| (a.from, a.to))
        .collect();
    let n = supp.len();
    (0u32..1 << n)
        .filter(|&mask| {
            let has = |v: usize| supp.iter().position(|&s| s == v).is_some_and(|i| mask >> i & 1 == 1);
            edges.iter().all(|&(b, e)| !has(b) || has(e))
        })
        .collect()
}

fn support_subobject(x: &Arc<Rep>, supp: &[usize], mask: u32) -> SubobjectCF {
    let f = x.field();
    let bases = (0..x.dims().len())
        .map(|v| match supp.iter().position(|&s| s == v) {
            Some(i) if mask >> i & 1 == 1 => Matrix::identity(f, 1),
            _ => Matrix::zeros(f, x.dim(v), 0),
        })
        .collect();
    SubobjectCF {
        ambient: x.clone(),
        bases,
    }
}

/// All subrepresentations of a multiplicity-free nilpotent representation,
/// ordered by the bitmask of their support within the support of `x`.
pub fn enumerate_subobjects(x: &Arc<Rep>) -> Result<Vec<SubobjectCF>, CategoryError> {
    let supp = support(x)?;
    Ok(closed_supports(x, &supp)
        .into_iter()
        .map(|m| support_subobject(x, &supp, m))
        .collect())
}

/// The Jordan–Hölder poset on the support of `x` and the subobject
/// attached to each of its s-sets.
#[derive(Debug, Clone)]
pub struct JhPoset {
    pub poset: FinitePoset,
    /// `vertex[i]` is the quiver vertex of poset element `i`.
    pub vertex: Vec<usize>,
    pub sset_table: BTreeMap<Subset, SubobjectCF>,
}

pub fn jh_poset(x: &Arc<Rep>) -> Result<JhPoset, CategoryError> {
    let supp = support(x)?;
    let closed = closed_supports(x, &supp);
    let labels: Vec<&str> = supp.iter().map(|&v| x.quiver().vertices()[v].as_str()).collect();
    let mut pairs = Vec::new();
    for (a, &la) in labels.iter().enumerate() {
        for (b, &lb) in labels.iter().enumerate() {
            if a != b && closed.iter().all(|&m| m >> b & 1 == 0 || m >> a & 1 == 1) {
                pairs.push((la, lb));
            }
        }
    }
    let poset = FinitePoset::new(&labels, &pairs).map_err(|e| CategoryError::IncompatibleOrder(e.to_string()))?;
    let vertex: Vec<usize> = poset
        .labels()
        .iter()
        .map(|l| x.quiver().vertex_index(l).expect("support label"))
        .collect();
    // translate support-bit masks to poset subsets
    let to_subset = |mask: u32| {
        Subset::from_indices(
            (0..supp.len())
                .filter(|&i| mask >> i & 1 == 1)
                .map(|i| vertex.iter().position(|&v| v == supp[i]).unwrap()),
        )
    };
    let sset_table = closed
        .iter()
        .map(|&m| (to_subset(m), support_subobject(x, &supp, m)))
        .collect::<BTreeMap<_, _>>();
    debug_assert_eq!(sset_table.keys().copied().collect::<Vec<_>>().len(), poset.ssets().len());
    Ok(JhPoset {
        poset,
        vertex,
        sset_table,
    })
}

/// The composition series whose factors appear in the given total order,
/// bottom first, when that order extends the Jordan–Hölder poset.
pub fn composition_series(x: &Arc<Rep>, total_order: &FinitePoset) -> Result<Vec<SubobjectCF>, CategoryError> {
    let jh = jh_poset(x)?;
    if total_order.labels() != jh.poset.labels() {
        return Err(CategoryError::IncompatibleOrder("order is not on the support".into()));
    }
    if !total_order.is_total() {
        return Err(CategoryError::IncompatibleOrder("order is not total".into()));
    }
    let n = total_order.len();
    let mut sorted: Vec<usize> = (0..n).collect();
    sorted.sort_by_key(|&i| total_order.down_set(i).len());
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = Subset::EMPTY;
    out.push(jh.sset_table[&acc].clone());
    for i in sorted {
        acc = acc.with(i);
        match jh.sset_table.get(&acc) {
            Some(s) => out.push(s.clone()),
            None => {
                return Err(CategoryError::IncompatibleOrder(format!(
                    "{:?} is not a subobject support",
                    jh.poset.subset_labels(acc)
                )))
            }
        }
    }
    Ok(out)
}
