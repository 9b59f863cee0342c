use std::sync::Arc;

use super::{CategoryError, Rep, ISO_SEARCH_LIMIT};
use crate::exactla::{FieldSpec, Matrix};

/// A morphism of representations: one `dim target(v) x dim source(v)`
/// matrix per vertex, intertwining the arrow matrices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RepMor {
    source: Arc<Rep>,
    target: Arc<Rep>,
    mats: Vec<Matrix>,
}

/// The chain `K -> X -> I -> Y -> C` attached to `f: X -> Y`.
#[derive(Debug, Clone)]
pub struct ImageFactorization {
    pub kernel: Arc<Rep>,
    pub k: RepMor,
    pub image: Arc<Rep>,
    pub i: RepMor,
    pub j: RepMor,
    pub cokernel: Arc<Rep>,
    pub c: RepMor,
}

#[derive(Debug, Clone)]
pub struct DirectSum {
    pub sum: Arc<Rep>,
    pub inj_x: RepMor,
    pub inj_y: RepMor,
    pub proj_x: RepMor,
    pub proj_y: RepMor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Isomorphism {
    Isomorphic,
    NotIsomorphic,
    Undecided,
}

impl RepMor {
    pub fn new(source: Arc<Rep>, target: Arc<Rep>, mats: Vec<Matrix>) -> Result<Self, CategoryError> {
        source.same_category(&target)?;
        if mats.len() != source.dims().len() {
            return Err(CategoryError::ShapeMismatch(format!(
                "{} vertex matrices for {} vertices",
                mats.len(),
                source.dims().len()
            )));
        }
        for (v, m) in mats.iter().enumerate() {
            if m.field() != source.field() {
                return Err(CategoryError::FieldMismatch);
            }
            if m.shape() != (target.dim(v), source.dim(v)) {
                return Err(CategoryError::ShapeMismatch(format!(
                    "vertex {} needs shape {}x{}, got {}x{}",
                    source.quiver().vertices()[v],
                    target.dim(v),
                    source.dim(v),
                    m.rows(),
                    m.cols()
                )));
            }
        }
        let f = RepMor { source, target, mats };
        for (ai, a) in f.source.quiver().arrows().iter().enumerate() {
            let lhs = f.mats[a.to].mul(f.source.mat(ai));
            let rhs = f.target.mat(ai).mul(&f.mats[a.from]);
            if lhs != rhs {
                return Err(CategoryError::NotIntertwining(a.name.clone()));
            }
        }
        Ok(f)
    }

    /// For constructions that intertwine by design; checked in debug builds.
    pub(crate) fn new_trusted(source: Arc<Rep>, target: Arc<Rep>, mats: Vec<Matrix>) -> Self {
        if cfg!(debug_assertions) {
            Self::new(source, target, mats).expect("constructed morphism must be valid")
        } else {
            RepMor { source, target, mats }
        }
    }

    pub fn identity(x: &Arc<Rep>) -> Self {
        let mats = x.dims().iter().map(|&d| Matrix::identity(x.field(), d)).collect();
        RepMor {
            source: x.clone(),
            target: x.clone(),
            mats,
        }
    }

    pub fn zero(source: &Arc<Rep>, target: &Arc<Rep>) -> Self {
        let mats = source
            .dims()
            .iter()
            .zip(target.dims())
            .map(|(&s, &t)| Matrix::zeros(source.field(), t, s))
            .collect();
        RepMor {
            source: source.clone(),
            target: target.clone(),
            mats,
        }
    }

    pub fn source(&self) -> &Arc<Rep> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Rep> {
        &self.target
    }

    pub fn mats(&self) -> &[Matrix] {
        &self.mats
    }

    pub fn mat(&self, v: usize) -> &Matrix {
        &self.mats[v]
    }

    pub fn field(&self) -> FieldSpec {
        self.source.field()
    }

    /// `self ∘ f`.
    pub fn after(&self, f: &RepMor) -> Result<RepMor, CategoryError> {
        compose(self, f)
    }

    pub fn add(&self, other: &RepMor) -> Result<RepMor, CategoryError> {
        if self.source != other.source || self.target != other.target {
            return Err(CategoryError::CompositionMismatch);
        }
        let mats = self.mats.iter().zip(&other.mats).map(|(a, b)| a.add(b)).collect();
        Ok(RepMor {
            source: self.source.clone(),
            target: self.target.clone(),
            mats,
        })
    }

    pub fn sub(&self, other: &RepMor) -> Result<RepMor, CategoryError> {
        self.add(&other.scale(self.field().modulus() - 1))
    }

    pub fn scale(&self, s: u32) -> RepMor {
        RepMor {
            source: self.source.clone(),
            target: self.target.clone(),
            mats: self.mats.iter().map(|m| m.scale(s)).collect(),
        }
    }

    /// `Σ coeffs[k] * basis[k]`; an empty basis gives the zero morphism.
    pub fn linear_combination(source: &Arc<Rep>, target: &Arc<Rep>, basis: &[RepMor], coeffs: &[u32]) -> RepMor {
        assert_eq!(basis.len(), coeffs.len(), "coefficient count");
        let mut acc = RepMor::zero(source, target);
        for (b, &c) in basis.iter().zip(coeffs) {
            acc = acc.add(&b.scale(c)).expect("basis elements share endpoints");
        }
        acc
    }

    /// Same matrices, reinterpreted between equal source and target objects.
    pub fn with_endpoints(&self, source: &Arc<Rep>, target: &Arc<Rep>) -> Result<RepMor, CategoryError> {
        if **source != *self.source || **target != *self.target {
            return Err(CategoryError::CompositionMismatch);
        }
        Ok(RepMor {
            source: source.clone(),
            target: target.clone(),
            mats: self.mats.clone(),
        })
    }

    pub fn is_zero(&self) -> bool {
        self.mats.iter().all(Matrix::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target && self.mats.iter().all(Matrix::is_identity)
    }

    pub fn is_injective(&self) -> bool {
        self.mats.iter().all(Matrix::has_full_column_rank)
    }

    pub fn is_surjective(&self) -> bool {
        self.mats.iter().all(Matrix::has_full_row_rank)
    }

    pub fn is_isomorphism(&self) -> bool {
        self.source.dims() == self.target.dims() && self.is_injective()
    }

    pub fn inverse(&self) -> Result<RepMor, CategoryError> {
        if !self.is_isomorphism() {
            return Err(CategoryError::NotInvertible);
        }
        let mats = self
            .mats
            .iter()
            .map(|m| m.inverse())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RepMor::new_trusted(self.target.clone(), self.source.clone(), mats))
    }

    /// The unique `x` with `self ∘ x = m`, for injective `self`.
    pub fn lift_through(&self, m: &RepMor) -> Result<RepMor, CategoryError> {
        if m.target != self.target {
            return Err(CategoryError::CompositionMismatch);
        }
        if !self.is_injective() {
            return Err(CategoryError::NotInjective);
        }
        let mats = self
            .mats
            .iter()
            .zip(&m.mats)
            .map(|(i, mv)| i.solve(mv).map_err(|_| CategoryError::NoFactorization))
            .collect::<Result<Vec<_>, _>>()?;
        RepMor::new(m.source.clone(), self.source.clone(), mats)
    }

    /// The unique `x` with `x ∘ self = m`, for surjective `self`.
    pub fn descend_through(&self, m: &RepMor) -> Result<RepMor, CategoryError> {
        if m.source != self.source {
            return Err(CategoryError::CompositionMismatch);
        }
        if !self.is_surjective() {
            return Err(CategoryError::NotSurjective);
        }
        let mats = self
            .mats
            .iter()
            .zip(&m.mats)
            .map(|(p, mv)| {
                p.transpose()
                    .solve(&mv.transpose())
                    .map(|x| x.transpose())
                    .map_err(|_| CategoryError::NoFactorization)
            })
            .collect::<Result<Vec<_>, _>>()?;
        RepMor::new(self.target.clone(), m.target.clone(), mats)
    }

    pub fn kernel(&self) -> (Arc<Rep>, RepMor) {
        let x = &self.source;
        let bases: Vec<Matrix> = self.mats.iter().map(Matrix::kernel_basis).collect();
        let k = sub_rep(x, &bases);
        let incl = RepMor::new_trusted(k.clone(), x.clone(), bases);
        (k, incl)
    }

    pub fn cokernel(&self) -> (Arc<Rep>, RepMor) {
        let y = &self.target;
        let f = y.field();
        let mut projs = Vec::new();
        let mut sections = Vec::new();
        for (v, m) in self.mats.iter().enumerate() {
            let n = y.dim(v);
            let u = m.column_basis();
            let piv = m.column_basis_pivots();
            let rest: Vec<usize> = (0..n).filter(|r| !piv.contains(r)).collect();
            let reduce = Matrix::identity(f, n).sub(&u.mul(&Matrix::identity(f, n).select_rows(&piv)));
            projs.push(reduce.select_rows(&rest));
            sections.push(Matrix::identity(f, n).select_cols(&rest));
        }
        let dims: Vec<usize> = projs.iter().map(Matrix::rows).collect();
        let mats = y
            .quiver()
            .arrows()
            .iter()
            .enumerate()
            .map(|(ai, a)| projs[a.to].mul(y.mat(ai)).mul(&sections[a.from]))
            .collect();
        let c = Arc::new(Rep::new(y.quiver().clone(), f, dims, mats).expect("quotient of a rep is a rep"));
        let proj = RepMor::new_trusted(y.clone(), c.clone(), projs);
        (c, proj)
    }

    pub fn image_factorization(&self) -> ImageFactorization {
        let (kernel, k) = self.kernel();
        let (cokernel, c) = self.cokernel();
        let bases: Vec<Matrix> = self.mats.iter().map(Matrix::column_basis).collect();
        let image = sub_rep(&self.target, &bases);
        let j = RepMor::new_trusted(image.clone(), self.target.clone(), bases);
        let i = j.lift_through(self).expect("f factors through its image");
        ImageFactorization {
            kernel,
            k,
            image,
            i,
            j,
            cokernel,
            c,
        }
    }

    /// A left inverse `r` with `r ∘ self = id`, if one exists; free
    /// parameters are set to zero.
    pub fn retraction(&self) -> Result<RepMor, CategoryError> {
        let x = &self.source;
        let y = &self.target;
        let sys = IntertwiningSystem::new(y, x);
        let mut a = sys.matrix.clone();
        let mut b = Matrix::zeros(x.field(), a.rows(), 1);
        // r_v * i_v = I at each vertex
        let f = x.field();
        for v in 0..x.dims().len() {
            let iv = &self.mats[v];
            let (rows, inner, cols) = (x.dim(v), y.dim(v), x.dim(v));
            let mut block = Matrix::zeros(f, rows * cols, sys.unknowns);
            let mut rhs = Matrix::zeros(f, rows * cols, 1);
            for r in 0..rows {
                for c in 0..cols {
                    let eq = r * cols + c;
                    for k in 0..inner {
                        block.set(eq, sys.var(v, r, k), iv.get(k, c));
                    }
                    if r == c {
                        rhs.set(eq, 0, 1);
                    }
                }
            }
            a = a.vcat(&block);
            b = b.vcat(&rhs);
        }
        let sol = a.solve(&b).map_err(|_| CategoryError::NotSplit)?;
        Ok(sys.morphism(y, x, &sol))
    }
}

/// `g ∘ f`.
pub fn compose(g: &RepMor, f: &RepMor) -> Result<RepMor, CategoryError> {
    if f.target != g.source {
        return Err(CategoryError::CompositionMismatch);
    }
    let mats = g.mats.iter().zip(&f.mats).map(|(a, b)| a.mul(b)).collect();
    Ok(RepMor {
        source: f.source.clone(),
        target: g.target.clone(),
        mats,
    })
}

/// The subrepresentation spanned by per-vertex column bases, which must
/// be closed under the arrows.
pub(crate) fn sub_rep(x: &Arc<Rep>, bases: &[Matrix]) -> Arc<Rep> {
    let dims = bases.iter().map(Matrix::cols).collect();
    let mats = x
        .quiver()
        .arrows()
        .iter()
        .enumerate()
        .map(|(ai, a)| {
            bases[a.to]
                .solve(&x.mat(ai).mul(&bases[a.from]))
                .expect("subspace closed under arrows")
        })
        .collect();
    Arc::new(Rep::new(x.quiver().clone(), x.field(), dims, mats).expect("subrep of a rep is a rep"))
}

/// Linear system whose solutions are the morphisms `source -> target`.
/// Unknowns are vertex-major, each vertex matrix row-major.
struct IntertwiningSystem {
    offsets: Vec<usize>,
    cols: Vec<usize>,
    unknowns: usize,
    matrix: Matrix,
}

impl IntertwiningSystem {
    fn new(x: &Rep, y: &Rep) -> Self {
        let f = x.field();
        let n = x.dims().len();
        let mut offsets = Vec::with_capacity(n);
        let mut acc = 0;
        for v in 0..n {
            offsets.push(acc);
            acc += y.dim(v) * x.dim(v);
        }
        let cols: Vec<usize> = x.dims().to_vec();
        let var = |v: usize, r: usize, c: usize| offsets[v] + r * cols[v] + c;
        let eq_count: usize = x.quiver().arrows().iter().map(|a| y.dim(a.to) * x.dim(a.from)).sum();
        let mut m = Matrix::zeros(f, eq_count, acc);
        let mut row = 0;
        for (ai, a) in x.quiver().arrows().iter().enumerate() {
            let (rho, sig) = (x.mat(ai), y.mat(ai));
            // phi_to * rho - sig * phi_from = 0, entry (r, c)
            for r in 0..y.dim(a.to) {
                for c in 0..x.dim(a.from) {
                    for k in 0..x.dim(a.to) {
                        let idx = var(a.to, r, k);
                        let v = f.add(m.get(row, idx), rho.get(k, c));
                        m.set(row, idx, v);
                    }
                    for k in 0..y.dim(a.from) {
                        let idx = var(a.from, k, c);
                        let v = f.sub(m.get(row, idx), sig.get(r, k));
                        m.set(row, idx, v);
                    }
                    row += 1;
                }
            }
        }
        IntertwiningSystem {
            offsets,
            cols,
            unknowns: acc,
            matrix: m,
        }
    }

    fn var(&self, v: usize, r: usize, c: usize) -> usize {
        self.offsets[v] + r * self.cols[v] + c
    }

    fn morphism(&self, x: &Arc<Rep>, y: &Arc<Rep>, sol: &Matrix) -> RepMor {
        let mats = (0..x.dims().len())
            .map(|v| Matrix::from_fn(x.field(), y.dim(v), x.dim(v), |r, c| sol.get(self.var(v, r, c), 0)))
            .collect();
        RepMor::new_trusted(x.clone(), y.clone(), mats)
    }
}

/// A basis of `Hom(x, y)`, in kernel-basis order of the intertwining system.
pub fn hom_space(x: &Arc<Rep>, y: &Arc<Rep>) -> Result<Vec<RepMor>, CategoryError> {
    x.same_category(y)?;
    let sys = IntertwiningSystem::new(x, y);
    let k = sys.matrix.kernel_basis();
    Ok((0..k.cols())
        .map(|c| sys.morphism(x, y, &k.select_cols(&[c])))
        .collect())
}

pub fn direct_sum(x: &Arc<Rep>, y: &Arc<Rep>) -> Result<DirectSum, CategoryError> {
    x.same_category(y)?;
    let f = x.field();
    let dims: Vec<usize> = x.dims().iter().zip(y.dims()).map(|(a, b)| a + b).collect();
    let mats = x.mats().iter().zip(y.mats()).map(|(a, b)| a.block_diag(b)).collect();
    let sum = Arc::new(Rep::new(x.quiver().clone(), f, dims, mats)?);
    let n = x.dims().len();
    let id = |d: usize| Matrix::identity(f, d);
    let inj_x = (0..n)
        .map(|v| id(x.dim(v)).vcat(&Matrix::zeros(f, y.dim(v), x.dim(v))))
        .collect();
    let inj_y = (0..n)
        .map(|v| Matrix::zeros(f, x.dim(v), y.dim(v)).vcat(&id(y.dim(v))))
        .collect();
    let proj_x = (0..n)
        .map(|v| id(x.dim(v)).hcat(&Matrix::zeros(f, x.dim(v), y.dim(v))))
        .collect();
    let proj_y = (0..n)
        .map(|v| Matrix::zeros(f, y.dim(v), x.dim(v)).hcat(&id(y.dim(v))))
        .collect();
    Ok(DirectSum {
        inj_x: RepMor::new_trusted(x.clone(), sum.clone(), inj_x),
        inj_y: RepMor::new_trusted(y.clone(), sum.clone(), inj_y),
        proj_x: RepMor::new_trusted(sum.clone(), x.clone(), proj_x),
        proj_y: RepMor::new_trusted(sum.clone(), y.clone(), proj_y),
        sum,
    })
}

/// Exhaustive search of `Hom(x, y)` for an invertible element, when the
/// space has at most [`ISO_SEARCH_LIMIT`] elements.
pub fn is_isomorphic(x: &Arc<Rep>, y: &Arc<Rep>) -> Result<Isomorphism, CategoryError> {
    x.same_category(y)?;
    if x.dims() != y.dims() {
        return Ok(Isomorphism::NotIsomorphic);
    }
    let basis = hom_space(x, y)?;
    let p = x.field().modulus() as u64;
    let mut count: u64 = 1;
    for _ in 0..basis.len() {
        count = count.saturating_mul(p);
        if count > ISO_SEARCH_LIMIT {
            return Ok(Isomorphism::Undecided);
        }
    }
    let mut coeffs = vec![0u32; basis.len()];
    for _ in 0..count {
        let f = RepMor::linear_combination(x, y, &basis, &coeffs);
        if f.is_isomorphism() {
            return Ok(Isomorphism::Isomorphic);
        }
        for c in coeffs.iter_mut().rev() {
            *c += 1;
            if (*c as u64) < p {
                break;
            }
            *c = 0;
        }
    }
    Ok(Isomorphism::NotIsomorphic)
}
