//! Finite-dimensional Lie algebras over Q given by structure constants, their
//! modules, and semidirect products `u ⋊ t` with an abelian, Q-split `t`.
//!
//! Basis convention for semidirect products: the `u` basis comes first, then
//! the torus basis. The Hochschild–Serre filtration and every bitmask in
//! [`crate::cecoh`] rely on that ordering.

use std::collections::BTreeMap;

use num_traits::Zero;
use thiserror::Error;

use crate::exactla::{
    axpy, is_zero_vec, simultaneous_eigenspaces, unit_vec, zero_vec, LinAlgError, QVec, RatMatrix, Rational,
    Subspace,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LieError {
    #[error("invalid structure constants: {0}")]
    Shape(String),
    #[error("Jacobi identity fails on basis triple ({i}, {j}, {k})")]
    Jacobi { i: usize, j: usize, k: usize },
    #[error("module law fails on basis pair ({i}, {j}): rho([e_i, e_j]) != [rho(e_i), rho(e_j)]")]
    ModuleLaw { i: usize, j: usize },
    #[error("derivation {index} violates the Leibniz rule on basis pair ({i}, {j})")]
    Derivation { index: usize, i: usize, j: usize },
    #[error("derivations {0} and {1} do not commute")]
    NonCommuting(usize, usize),
    #[error("{0}")]
    LinAlg(#[from] LinAlgError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieAlgebra {
    names: Vec<String>,
    /// `[e_i, e_j]` for `i < j`; absent pairs bracket to zero.
    brackets: BTreeMap<(usize, usize), QVec>,
}

impl LieAlgebra {
    /// Builds an algebra from triples `(i, j, [e_i, e_j])` with `i < j`.
    /// The Jacobi identity is not checked here; see [`validate_jacobi`].
    pub fn new(names: Vec<String>, triples: Vec<(usize, usize, QVec)>) -> Result<Self, LieError> {
        let n = names.len();
        let mut brackets = BTreeMap::new();
        for (i, j, v) in triples {
            if i >= j || j >= n {
                return Err(LieError::Shape(format!("bracket index pair ({i}, {j}) must satisfy i < j < {n}")));
            }
            if v.len() != n {
                return Err(LieError::Shape(format!("bracket ({i}, {j}) has {} coordinates, expected {n}", v.len())));
            }
            if brackets.contains_key(&(i, j)) {
                return Err(LieError::Shape(format!("bracket ({i}, {j}) given twice")));
            }
            if !is_zero_vec(&v) {
                brackets.insert((i, j), v);
            }
        }
        Ok(LieAlgebra { names, brackets })
    }

    pub fn abelian(n: usize) -> Self {
        LieAlgebra { names: (0..n).map(|i| format!("e{i}")).collect(), brackets: BTreeMap::new() }
    }

    /// The three-dimensional Heisenberg algebra, basis `(x, y, z)` with `[x, y] = z`.
    pub fn heisenberg() -> Self {
        let z = vec![Rational::zero(), Rational::zero(), crate::int(1)];
        LieAlgebra::new(vec!["x".into(), "y".into(), "z".into()], vec![(0, 1, z)]).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn with_names(mut self, names: Vec<String>) -> Self {
        assert_eq!(names.len(), self.names.len());
        self.names = names;
        self
    }

    /// Stored brackets `(i, j, [e_i, e_j])`, `i < j`, in index order.
    pub fn triples(&self) -> impl Iterator<Item = (usize, usize, &QVec)> {
        self.brackets.iter().map(|(&(i, j), v)| (i, j, v))
    }

    pub fn is_abelian(&self) -> bool {
        self.brackets.is_empty()
    }

    /// `[e_i, e_j]`
    pub fn bracket_basis(&self, i: usize, j: usize) -> QVec {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Equal => zero_vec(self.dim()),
            Less => self.brackets.get(&(i, j)).cloned().unwrap_or_else(|| zero_vec(self.dim())),
            Greater => self
                .brackets
                .get(&(j, i))
                .map(|v| v.iter().map(|c| -c).collect())
                .unwrap_or_else(|| zero_vec(self.dim())),
        }
    }

    pub fn bracket(&self, x: &[Rational], y: &[Rational]) -> QVec {
        let mut out = zero_vec(self.dim());
        for (&(i, j), v) in &self.brackets {
            let c = &x[i] * &y[j] - &x[j] * &y[i];
            axpy(&mut out, &c, v);
        }
        out
    }

    /// Matrix of `ad x` acting on column coordinate vectors.
    pub fn ad(&self, x: &[Rational]) -> RatMatrix {
        let n = self.dim();
        let cols: Vec<QVec> = (0..n).map(|j| self.bracket(x, &unit_vec(n, j))).collect();
        RatMatrix::from_columns(&cols, n)
    }

    pub fn ad_basis(&self, i: usize) -> RatMatrix {
        self.ad(&unit_vec(self.dim(), i))
    }

    /// Span of `[a, b]` over basis vectors of `a_space` and `b_space`.
    pub fn bracket_span(&self, a_space: &Subspace, b_space: &Subspace) -> Subspace {
        let mut vs = Vec::new();
        for a in a_space.basis() {
            for b in b_space.basis() {
                let c = self.bracket(a, b);
                if !is_zero_vec(&c) {
                    vs.push(c);
                }
            }
        }
        Subspace::span(self.dim(), &vs)
    }

    /// Whether the span of the first `k` basis vectors is an ideal whose
    /// brackets close on themselves.
    pub fn has_prefix_ideal(&self, k: usize) -> bool {
        let n = self.dim();
        let ideal = Subspace::coordinate(n, 0..k);
        (0..n).all(|i| (0..k).all(|j| ideal.contains(&self.bracket_basis(i, j))))
    }

    /// The subalgebra on the first `k` basis vectors, assuming they span an ideal.
    pub fn prefix_subalgebra(&self, k: usize) -> LieAlgebra {
        let triples = self
            .brackets
            .iter()
            .filter(|(&(_, j), _)| j < k)
            .map(|(&(i, j), v)| (i, j, v[..k].to_vec()))
            .collect();
        LieAlgebra::new(self.names[..k].to_vec(), triples).unwrap()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum JacobiReport {
    Valid,
    Violation { triple: (usize, usize, usize), residual: QVec },
}

impl JacobiReport {
    pub fn is_valid(&self) -> bool {
        matches!(self, JacobiReport::Valid)
    }

    pub fn into_result(self) -> Result<(), LieError> {
        match self {
            JacobiReport::Valid => Ok(()),
            JacobiReport::Violation { triple: (i, j, k), .. } => Err(LieError::Jacobi { i, j, k }),
        }
    }
}

/// Checks `[e_i,[e_j,e_k]] + [e_j,[e_k,e_i]] + [e_k,[e_i,e_j]] = 0` on every
/// basis triple `i < j < k`, reporting the first failure.
pub fn validate_jacobi(g: &LieAlgebra) -> JacobiReport {
    let n = g.dim();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let e = |a| unit_vec(n, a);
                let mut r = g.bracket(&e(i), &g.bracket_basis(j, k));
                let t2 = g.bracket(&e(j), &g.bracket_basis(k, i));
                let t3 = g.bracket(&e(k), &g.bracket_basis(i, j));
                axpy(&mut r, &crate::int(1), &t2);
                axpy(&mut r, &crate::int(1), &t3);
                if !is_zero_vec(&r) {
                    return JacobiReport::Violation { triple: (i, j, k), residual: r };
                }
            }
        }
    }
    JacobiReport::Valid
}

/// A finite-dimensional module, one action matrix per algebra basis element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieModule {
    dim: usize,
    action: Vec<RatMatrix>,
}

impl LieModule {
    pub fn new(g: &LieAlgebra, dim: usize, action: Vec<RatMatrix>) -> Result<Self, LieError> {
        let m = LieModule::new_unchecked(dim, action)?;
        if m.action.len() != g.dim() {
            return Err(LieError::Shape(format!(
                "module has {} action matrices for an algebra of dimension {}",
                m.action.len(),
                g.dim()
            )));
        }
        m.validate(g)?;
        Ok(m)
    }

    /// Builds without the module-law check (shapes are still checked).
    pub fn new_unchecked(dim: usize, action: Vec<RatMatrix>) -> Result<Self, LieError> {
        if let Some(i) = action.iter().position(|a| a.rows() != dim || a.cols() != dim) {
            return Err(LieError::Shape(format!("action matrix {i} is not {dim}x{dim}")));
        }
        Ok(LieModule { dim, action })
    }

    /// The one-dimensional trivial module.
    pub fn trivial(g: &LieAlgebra) -> Self {
        Self::trivial_of_dim(g, 1)
    }

    pub fn trivial_of_dim(g: &LieAlgebra, dim: usize) -> Self {
        LieModule { dim, action: vec![RatMatrix::zeros(dim, dim); g.dim()] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn algebra_dim(&self) -> usize {
        self.action.len()
    }

    pub fn action(&self, i: usize) -> &RatMatrix {
        &self.action[i]
    }

    pub fn actions(&self) -> &[RatMatrix] {
        &self.action
    }

    pub fn is_trivial(&self) -> bool {
        self.action.iter().all(RatMatrix::is_zero)
    }

    /// `rho(x)` for an algebra element in coordinates.
    pub fn act(&self, x: &[Rational]) -> RatMatrix {
        let mut out = RatMatrix::zeros(self.dim, self.dim);
        for (c, a) in x.iter().zip(&self.action) {
            if !c.is_zero() {
                out = out.add(&a.scale(c));
            }
        }
        out
    }

    pub fn validate(&self, g: &LieAlgebra) -> Result<(), LieError> {
        let n = g.dim();
        for i in 0..n {
            for j in i + 1..n {
                let lhs = self.act(&g.bracket_basis(i, j));
                let rhs = self.action[i].commutator(&self.action[j]);
                if lhs != rhs {
                    return Err(LieError::ModuleLaw { i, j });
                }
            }
        }
        Ok(())
    }

    /// Restriction to the ideal spanned by the first `k` basis vectors.
    pub fn restrict_prefix(&self, k: usize) -> LieModule {
        LieModule { dim: self.dim, action: self.action[..k].to_vec() }
    }
}

/// `g = u ⋊ t` with `t` abelian acting on `u` by commuting Q-split derivations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemidirectPresentation {
    pub u: LieAlgebra,
    pub derivations: Vec<RatMatrix>,
    pub torus_names: Vec<String>,
}

impl SemidirectPresentation {
    pub fn new(u: LieAlgebra, derivations: Vec<RatMatrix>) -> Self {
        let torus_names = match derivations.len() {
            1 => vec!["D".to_string()],
            k => (0..k).map(|a| format!("D{a}")).collect(),
        };
        SemidirectPresentation { u, derivations, torus_names }
    }

    pub fn t_dim(&self) -> usize {
        self.derivations.len()
    }

    pub fn validate(&self) -> Result<(), LieError> {
        let n = self.u.dim();
        validate_jacobi(&self.u).into_result()?;
        for (a, d) in self.derivations.iter().enumerate() {
            if d.rows() != n || d.cols() != n {
                return Err(LieError::Shape(format!("derivation {a} is not {n}x{n}")));
            }
            for i in 0..n {
                for j in i + 1..n {
                    let lhs = d.mul_vec(&self.u.bracket_basis(i, j));
                    let mut rhs = self.u.bracket(&d.col(i), &unit_vec(n, j));
                    let t = self.u.bracket(&unit_vec(n, i), &d.col(j));
                    axpy(&mut rhs, &crate::int(1), &t);
                    if lhs != rhs {
                        return Err(LieError::Derivation { index: a, i, j });
                    }
                }
            }
        }
        for a in 0..self.t_dim() {
            for b in a + 1..self.t_dim() {
                if !self.derivations[a].commutator(&self.derivations[b]).is_zero() {
                    return Err(LieError::NonCommuting(a, b));
                }
            }
        }
        simultaneous_eigenspaces(&self.derivations, n)?;
        Ok(())
    }
}

/// Assembles `u ⋊ t`: u-u brackets from `u`, `[t_a, u_i] = D_a(u_i)`, `[t, t] = 0`.
pub fn semidirect(p: &SemidirectPresentation) -> Result<LieAlgebra, LieError> {
    p.validate()?;
    let n = p.u.dim();
    let total = n + p.t_dim();
    let mut triples: Vec<(usize, usize, QVec)> = p
        .u
        .triples()
        .map(|(i, j, v)| {
            let mut w = v.clone();
            w.resize(total, Rational::zero());
            (i, j, w)
        })
        .collect();
    for (a, d) in p.derivations.iter().enumerate() {
        for i in 0..n {
            // [u_i, t_a] = -D_a(u_i)
            let mut w: QVec = d.col(i).iter().map(|c| -c).collect();
            w.resize(total, Rational::zero());
            triples.push((i, n + a, w));
        }
    }
    let mut names = p.u.names().to_vec();
    names.extend(p.torus_names.iter().cloned());
    let g = LieAlgebra::new(names, triples)?;
    validate_jacobi(&g).into_result()?;
    Ok(g)
}

fn descending_series(g: &LieAlgebra, step: impl Fn(&Subspace) -> Subspace) -> Vec<Subspace> {
    let mut out = vec![Subspace::full(g.dim())];
    loop {
        let next = step(out.last().unwrap());
        if &next == out.last().unwrap() {
            return out;
        }
        let done = next.is_zero();
        out.push(next);
        if done {
            return out;
        }
    }
}

/// `γ_1 = g`, `γ_{i+1} = [g, γ_i]`, listed until it reaches zero or stabilizes.
pub fn lower_central_series(g: &LieAlgebra) -> Vec<Subspace> {
    let full = Subspace::full(g.dim());
    descending_series(g, |s| g.bracket_span(&full, s))
}

/// `g^(0) = g`, `g^(i+1) = [g^(i), g^(i)]`, listed until it reaches zero or stabilizes.
pub fn derived_series(g: &LieAlgebra) -> Vec<Subspace> {
    descending_series(g, |s| g.bracket_span(s, s))
}

pub fn is_nilpotent(g: &LieAlgebra) -> bool {
    lower_central_series(g).last().is_some_and(Subspace::is_zero) || g.dim() == 0
}

pub fn is_solvable(g: &LieAlgebra) -> bool {
    derived_series(g).last().is_some_and(Subspace::is_zero) || g.dim() == 0
}

/// Joint weight spaces of the torus on `u`, weights in lexicographic order.
pub fn weight_decomposition(p: &SemidirectPresentation) -> Result<Vec<(QVec, Subspace)>, LieError> {
    Ok(simultaneous_eigenspaces(&p.derivations, p.u.dim())?)
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::exactla::int;

    #[test]
    fn jacobi_examples() {
        assert!(validate_jacobi(&LieAlgebra::abelian(3)).is_valid());
        assert!(validate_jacobi(&LieAlgebra::heisenberg()).is_valid());

        // [x,z] = x on top of [x,y] = z breaks Jacobi on (x, y, z)
        let bad = LieAlgebra::new(
            vec!["x".into(), "y".into(), "z".into()],
            vec![(0, 1, vec![int(0), int(0), int(1)]), (0, 2, vec![int(1), int(0), int(0)])],
        )
        .unwrap();
        match validate_jacobi(&bad) {
            JacobiReport::Violation { triple, residual } => {
                assert_eq!(triple, (0, 1, 2));
                assert_eq!(residual, vec![int(0), int(0), int(1)]);
            }
            JacobiReport::Valid => panic!("expected a violation"),
        }

        // [x,z] = y on top of [x,y] = z is ad(x) acting on an abelian plane: still a Lie algebra
        let plane = LieAlgebra::new(
            vec!["x".into(), "y".into(), "z".into()],
            vec![(0, 1, vec![int(0), int(0), int(1)]), (0, 2, vec![int(0), int(1), int(0)])],
        )
        .unwrap();
        assert!(validate_jacobi(&plane).is_valid());
    }

    #[test]
    fn semidirect_examples() {
        let g = semidirect(&bs_presentation()).unwrap();
        assert_eq!(g.dim(), 2);
        // [D, u] = u
        assert_eq!(g.bracket_basis(1, 0), vec![int(1), int(0)]);

        let p = heis_presentation();
        let g = semidirect(&p).unwrap();
        assert_eq!(g.dim(), 4);
        assert_eq!(g.prefix_subalgebra(3), p.u);
        assert!(g.has_prefix_ideal(3));
        assert!(is_solvable(&g));
        assert!(!is_nilpotent(&g));
        // [D, z] = 2 z
        assert_eq!(g.bracket_basis(3, 1), vec![int(0), int(2), int(0), int(0)]);

        let g = semidirect(&SemidirectPresentation::new(LieAlgebra::abelian(2), vec![])).unwrap();
        assert!(g.is_abelian());
        assert_eq!(g.dim(), 2);
    }

    #[test]
    fn semidirect_rejections() {
        let u = LieAlgebra::heisenberg();
        // diag(1,1,1) is not a derivation of h3: D z must be 2 z
        let p = SemidirectPresentation::new(u.clone(), vec![RatMatrix::identity(3)]);
        assert!(matches!(semidirect(&p), Err(LieError::Derivation { .. })));

        let a = RatMatrix::from_i64(&[&[2, 1], &[1, 1]]);
        let p = SemidirectPresentation::new(LieAlgebra::abelian(2), vec![a]);
        let err = semidirect(&p).unwrap_err();
        assert!(err.to_string().contains("not Q-split"), "{err}");

        let d1 = RatMatrix::from_i64(&[&[1, 1], &[0, 2]]);
        let d2 = RatMatrix::from_i64(&[&[1, 0], &[0, 3]]);
        let p = SemidirectPresentation::new(LieAlgebra::abelian(2), vec![d1, d2]);
        assert_eq!(semidirect(&p), Err(LieError::NonCommuting(0, 1)));
    }

    #[test]
    fn series_examples() {
        let h = LieAlgebra::heisenberg();
        let lcs = lower_central_series(&h);
        assert_eq!(lcs.iter().map(Subspace::dim).collect::<Vec<_>>(), vec![3, 1, 0]);
        assert_eq!(lcs[1], Subspace::coordinate(3, [2]));
        assert!(is_nilpotent(&h));

        let a = LieAlgebra::abelian(3);
        assert_eq!(lower_central_series(&a).iter().map(Subspace::dim).collect::<Vec<_>>(), vec![3, 0]);

        let g = semidirect(&bs_presentation()).unwrap();
        let ds = derived_series(&g);
        assert_eq!(ds.iter().map(Subspace::dim).collect::<Vec<_>>(), vec![2, 1, 0]);
        assert_eq!(ds[1], Subspace::coordinate(2, [0]));
        let lcs = lower_central_series(&g);
        assert_eq!(lcs.last().unwrap(), &Subspace::coordinate(2, [0]));
        assert!(!is_nilpotent(&g));
    }

    #[test]
    fn weights() {
        let w = weight_decomposition(&bs_presentation()).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].0, vec![int(1)]);

        let w = weight_decomposition(&heis_presentation()).unwrap();
        assert_eq!(w.len(), 2);
        assert_eq!(w[0], (vec![int(1)], Subspace::coordinate(3, [0, 2])));
        assert_eq!(w[1], (vec![int(2)], Subspace::coordinate(3, [1])));

        let p = SemidirectPresentation::new(LieAlgebra::abelian(2), vec![]);
        let w = weight_decomposition(&p).unwrap();
        assert_eq!(w, vec![(vec![], Subspace::full(2))]);
    }

    #[test]
    fn module_law() {
        let g = semidirect(&bs_presentation()).unwrap();
        // u -> E21, D -> diag(0, 1)
        let good = LieModule::new(
            &g,
            2,
            vec![RatMatrix::from_i64(&[&[0, 0], &[1, 0]]), RatMatrix::from_i64(&[&[0, 0], &[0, 1]])],
        );
        assert!(good.is_ok());
        let bad = LieModule::new(
            &g,
            2,
            vec![RatMatrix::from_i64(&[&[0, 1], &[0, 0]]), RatMatrix::from_i64(&[&[0, 0], &[0, 1]])],
        );
        assert_eq!(bad, Err(LieError::ModuleLaw { i: 0, j: 1 }));
        assert!(LieModule::trivial(&g).is_trivial());
    }
}
