use std::collections::BTreeSet;
use std::sync::Arc;

use super::CategoryError;
use crate::exactla::{FieldSpec, Matrix};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Arrow {
    pub name: String,
    pub from: usize,
    pub to: usize,
}

/// One term `coef * path` of a relation. Paths list arrow indices in the
/// order they are traversed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RelationTerm {
    pub coef: i64,
    pub path: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Quiver {
    vertices: Vec<String>,
    arrows: Vec<Arrow>,
    relations: Vec<Vec<RelationTerm>>,
}

impl Quiver {
    /// Arrows are `(name, from, to)` by vertex label; relation paths are
    /// lists of arrow names.
    pub fn new<S: AsRef<str>>(
        vertices: &[S],
        arrows: &[(S, S, S)],
        relations: &[Vec<(i64, Vec<S>)>],
    ) -> Result<Self, CategoryError> {
        let bad = |m: String| Err(CategoryError::InvalidQuiver(m));
        let vertices: Vec<String> = vertices.iter().map(|s| s.as_ref().to_string()).collect();
        if vertices.iter().collect::<BTreeSet<_>>().len() != vertices.len() {
            return bad("duplicate vertex".into());
        }
        let vidx = |s: &str| vertices.iter().position(|v| v == s);
        let mut arr = Vec::new();
        for (name, from, to) in arrows {
            let (Some(f), Some(t)) = (vidx(from.as_ref()), vidx(to.as_ref())) else {
                return bad(format!("arrow {} has an undeclared endpoint", name.as_ref()));
            };
            if arr.iter().any(|a: &Arrow| a.name == name.as_ref()) {
                return bad(format!("duplicate arrow {}", name.as_ref()));
            }
            arr.push(Arrow {
                name: name.as_ref().to_string(),
                from: f,
                to: t,
            });
        }
        let mut rels = Vec::new();
        for rel in relations {
            let mut terms = Vec::new();
            for (coef, path) in rel {
                let mut idx = Vec::new();
                for a in path {
                    match arr.iter().position(|x| x.name == a.as_ref()) {
                        Some(i) => idx.push(i),
                        None => return bad(format!("relation uses unknown arrow {}", a.as_ref())),
                    }
                }
                terms.push(RelationTerm { coef: *coef, path: idx });
            }
            rels.push(terms);
        }
        Self::from_parts(vertices, arr, rels)
    }

    pub fn from_parts(
        vertices: Vec<String>,
        arrows: Vec<Arrow>,
        relations: Vec<Vec<RelationTerm>>,
    ) -> Result<Self, CategoryError> {
        let bad = |m: String| Err(CategoryError::InvalidQuiver(m));
        let n = vertices.len();
        for a in &arrows {
            if a.from >= n || a.to >= n {
                return bad(format!("arrow {} has an undeclared endpoint", a.name));
            }
        }
        for (ri, rel) in relations.iter().enumerate() {
            if rel.is_empty() {
                return bad(format!("relation {ri} is empty"));
            }
            let mut ends = None;
            for t in rel {
                if t.path.len() < 2 {
                    return bad(format!("relation {ri} has a path of length < 2"));
                }
                if t.path.iter().any(|&a| a >= arrows.len()) {
                    return bad(format!("relation {ri} uses an unknown arrow"));
                }
                for w in t.path.windows(2) {
                    if arrows[w[0]].to != arrows[w[1]].from {
                        return bad(format!("relation {ri} has a non-composable path"));
                    }
                }
                let se = (arrows[t.path[0]].from, arrows[*t.path.last().unwrap()].to);
                match ends {
                    None => ends = Some(se),
                    Some(e) if e != se => {
                        return bad(format!("relation {ri} mixes paths with different endpoints"));
                    }
                    _ => {}
                }
            }
        }
        Ok(Quiver {
            vertices,
            arrows,
            relations,
        })
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn relations(&self) -> &[Vec<RelationTerm>] {
        &self.relations
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_index(&self, label: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == label)
    }

    pub fn arrow_index(&self, name: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.name == name)
    }
}

/// A representation: a vector space `F_p^{dims[v]}` at each vertex and a
/// `dims[to] x dims[from]` matrix for each arrow.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rep {
    quiver: Arc<Quiver>,
    field: FieldSpec,
    dims: Vec<usize>,
    mats: Vec<Matrix>,
}

impl Rep {
    pub fn new(quiver: Arc<Quiver>, field: FieldSpec, dims: Vec<usize>, mats: Vec<Matrix>) -> Result<Self, CategoryError> {
        if dims.len() != quiver.vertex_count() {
            return Err(CategoryError::ShapeMismatch(format!(
                "{} dimensions for {} vertices",
                dims.len(),
                quiver.vertex_count()
            )));
        }
        if mats.len() != quiver.arrows().len() {
            return Err(CategoryError::ShapeMismatch(format!(
                "{} matrices for {} arrows",
                mats.len(),
                quiver.arrows().len()
            )));
        }
        for (a, m) in quiver.arrows().iter().zip(&mats) {
            if m.field() != field {
                return Err(CategoryError::FieldMismatch);
            }
            if m.shape() != (dims[a.to], dims[a.from]) {
                return Err(CategoryError::ShapeMismatch(format!(
                    "arrow {} needs shape {}x{}, got {}x{}",
                    a.name,
                    dims[a.to],
                    dims[a.from],
                    m.rows(),
                    m.cols()
                )));
            }
        }
        let rep = Rep {
            quiver,
            field,
            dims,
            mats,
        };
        for (i, rel) in rep.quiver.relations().iter().enumerate() {
            if !rep.eval_relation(rel).is_zero() {
                return Err(CategoryError::RelationViolated(i));
            }
        }
        Ok(rep)
    }

    pub fn zero(quiver: Arc<Quiver>, field: FieldSpec) -> Self {
        let dims = vec![0; quiver.vertex_count()];
        Self::with_zero_arrows(quiver, field, dims)
    }

    /// The representation with the given dimensions and all arrows zero.
    pub fn with_zero_arrows(quiver: Arc<Quiver>, field: FieldSpec, dims: Vec<usize>) -> Self {
        let mats = quiver
            .arrows()
            .iter()
            .map(|a| Matrix::zeros(field, dims[a.to], dims[a.from]))
            .collect();
        Rep::new(quiver, field, dims, mats).expect("zero arrows satisfy every relation")
    }

    /// The simple representation at vertex `v`.
    pub fn simple(quiver: Arc<Quiver>, field: FieldSpec, v: usize) -> Self {
        let mut dims = vec![0; quiver.vertex_count()];
        dims[v] = 1;
        Self::with_zero_arrows(quiver, field, dims)
    }

    pub fn quiver(&self) -> &Arc<Quiver> {
        &self.quiver
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, v: usize) -> usize {
        self.dims[v]
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn mats(&self) -> &[Matrix] {
        &self.mats
    }

    pub fn mat(&self, a: usize) -> &Matrix {
        &self.mats[a]
    }

    pub fn is_zero(&self) -> bool {
        self.total_dim() == 0
    }

    /// Matrix of a path, applying its arrows in order.
    pub fn eval_path(&self, path: &[usize]) -> Matrix {
        let arrows = self.quiver.arrows();
        let start = arrows[path[0]].from;
        let mut acc = Matrix::identity(self.field, self.dims[start]);
        for &a in path {
            acc = self.mats[a].mul(&acc);
        }
        acc
    }

    fn eval_relation(&self, rel: &[RelationTerm]) -> Matrix {
        let mut acc: Option<Matrix> = None;
        for t in rel {
            let term = self.eval_path(&t.path).scale(self.field.reduce(t.coef));
            acc = Some(match acc {
                None => term,
                Some(m) => m.add(&term),
            });
        }
        acc.expect("relations are nonempty")
    }

    /// Offsets of each vertex block in the concatenated vector space.
    pub(crate) fn offsets(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.dims.len() + 1);
        let mut acc = 0;
        out.push(0);
        for &d in &self.dims {
            acc += d;
            out.push(acc);
        }
        out
    }

    /// True when every sufficiently long path acts as zero. Iterates the
    /// span of images of all paths of length k on the total space; this
    /// vanishes for some k ≤ total dimension exactly when the rep is nilpotent.
    pub fn is_nilpotent(&self) -> bool {
        let m = self.total_dim();
        if m == 0 {
            return true;
        }
        let off = self.offsets();
        let blocks: Vec<Matrix> = self
            .quiver
            .arrows()
            .iter()
            .zip(&self.mats)
            .map(|(a, mat)| {
                let mut e = Matrix::zeros(self.field, m, m);
                for r in 0..mat.rows() {
                    for c in 0..mat.cols() {
                        e.set(off[a.to] + r, off[a.from] + c, mat.get(r, c));
                    }
                }
                e
            })
            .collect();
        let mut span = Matrix::identity(self.field, m);
        for _ in 0..m {
            if span.cols() == 0 {
                return true;
            }
            let mut next = Matrix::zeros(self.field, m, 0);
            for e in &blocks {
                next = next.hcat(&e.mul(&span));
            }
            span = next.column_basis();
        }
        span.cols() == 0
    }

    pub fn same_category(&self, other: &Rep) -> Result<(), CategoryError> {
        if self.quiver != other.quiver {
            return Err(CategoryError::QuiverMismatch);
        }
        if self.field != other.field {
            return Err(CategoryError::FieldMismatch);
        }
        Ok(())
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn validate_rep_examples() {
        let x = x_ind();
        assert_eq!(x.dims(), &[1, 1]);
        let f = f2();
        let err = Rep::new(qa2(), f, vec![1, 1], vec![Matrix::zeros(f, 2, 1)]);
        assert!(matches!(err, Err(CategoryError::ShapeMismatch(_))));
        assert_eq!(n2().dim(0), 2);
        let bad = Rep::new(qloop(true), f, vec![1], vec![Matrix::from_slice_rows(f, &[&[1]])]);
        assert_eq!(bad, Err(CategoryError::RelationViolated(0)));
    }

    #[test]
    fn quiver_validation() {
        assert!(Quiver::new(&["a"], &[("x", "a", "b")], &[]).is_err());
        assert!(Quiver::new(&["a", "b"], &[("x", "a", "b")], &[vec![(1, vec!["x"])]]).is_err());
        assert!(Quiver::new(&["a", "b"], &[("x", "a", "b")], &[vec![(1, vec!["x", "x"])]]).is_err());
        let q = Quiver::new(
            &["1", "2", "3"],
            &[("x", "1", "2"), ("y", "2", "3")],
            &[vec![(1, vec!["x", "y"])]],
        )
        .unwrap();
        assert_eq!(q.relations()[0][0].path, vec![0, 1]);
    }

    #[test]
    fn path_order() {
        let f = FieldSpec::new(5).unwrap();
        let q = Arc::new(Quiver::new(&["1", "2", "3"], &[("x", "1", "2"), ("y", "2", "3")], &[]).unwrap());
        let r = Rep::new(
            q,
            f,
            vec![1, 2, 1],
            vec![Matrix::from_slice_rows(f, &[&[1], &[2]]), Matrix::from_slice_rows(f, &[&[3, 1]])],
        )
        .unwrap();
        assert_eq!(r.eval_path(&[0, 1]), Matrix::from_slice_rows(f, &[&[0]]));
    }

    #[test]
    fn nilpotency_examples() {
        assert!(x_ind().is_nilpotent());
        assert!(n2().is_nilpotent());
        let f = f2();
        let one = Rep::new(qloop(false), f, vec![1], vec![Matrix::from_slice_rows(f, &[&[1]])]).unwrap();
        assert!(!one.is_nilpotent());
        let q = Arc::new(Quiver::new(&["1", "2"], &[("x", "1", "2"), ("y", "2", "1")], &[]).unwrap());
        let cyc = Rep::new(
            q.clone(),
            f,
            vec![1, 1],
            vec![Matrix::from_slice_rows(f, &[&[1]]), Matrix::from_slice_rows(f, &[&[1]])],
        )
        .unwrap();
        assert!(!cyc.is_nilpotent());
        let half = Rep::new(
            q,
            f,
            vec![1, 1],
            vec![Matrix::from_slice_rows(f, &[&[1]]), Matrix::from_slice_rows(f, &[&[0]])],
        )
        .unwrap();
        assert!(half.is_nilpotent());
    }
}
