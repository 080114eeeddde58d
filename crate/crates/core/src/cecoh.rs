//! Chevalley–Eilenberg cochains `C^n(h, M) = Hom(∧^n h, M)`, their cohomology,
//! the action of an ambient algebra on cochains, shuffle cup products and the
//! resulting graded rings.
//!
//! A basis cochain is `m_a ⊗ e^S` where `S` is an `n`-subset of the algebra
//! basis encoded as a bitmask. Coordinates are module-index major: the index
//! of `(a, S)` is `a * C(dim h, n) + position of S`, with subsets of a fixed
//! size ordered by their numeric value.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exactla::{
    axpy, is_zero_vec, kernel_basis, quotient_basis, solve, zero_vec, LinAlgError, QVec, RatMatrix, RatStr,
    Rational, Subspace,
};
use crate::liealg::{LieAlgebra, LieError, LieModule};

pub type Mask = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CohError {
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
    #[error("the first {0} basis vectors of the ambient algebra do not form an ideal isomorphic to h")]
    NotIdeal(usize),
    #[error("module mismatch: {0}")]
    Module(String),
    #[error("pairing: {0}")]
    Pairing(String),
    #[error("algebra of dimension {0} exceeds the bitmask limit of 32")]
    TooLarge(usize),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// Parity-signed value: +1 or -1.
fn parity(count: u32) -> i32 {
    if count % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Sign of the shuffle placing `s` before `t` into increasing order:
/// `(-1)^#{(a, b) : a in s, b in t, a > b}`.
pub fn shuffle_sign(s: Mask, t: Mask) -> i32 {
    let mut count = 0;
    let mut rest = t;
    while rest != 0 {
        let b = rest.trailing_zeros();
        count += (s >> b >> 1).count_ones();
        rest &= rest - 1;
    }
    parity(count)
}

/// Sign of the permutation sorting `args`, and the resulting mask; `None` on repeats.
pub fn sort_sign(args: &[usize]) -> Option<(i32, Mask)> {
    let mut mask: Mask = 0;
    let mut inv = 0;
    for (p, &a) in args.iter().enumerate() {
        if mask & (1 << a) != 0 {
            return None;
        }
        mask |= 1 << a;
        inv += args[..p].iter().filter(|&&b| b > a).count() as u32;
    }
    Some((parity(inv), mask))
}

pub fn mask_indices(mask: Mask) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut m = mask;
    while m != 0 {
        out.push(m.trailing_zeros() as usize);
        m &= m - 1;
    }
    out
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Subsets of `{0..n}` grouped by size, each group in increasing numeric order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExteriorBasis {
    n: usize,
    by_degree: Vec<Vec<Mask>>,
    position: HashMap<Mask, usize>,
}

impl ExteriorBasis {
    pub fn new(n: usize) -> Self {
        assert!(n <= 32, "exterior basis limited to 32 generators");
        let mut by_degree = vec![Vec::new(); n + 1];
        let mut position = HashMap::new();
        for m in 0..(1u64 << n) {
            let m = m as Mask;
            let d = m.count_ones() as usize;
            position.insert(m, by_degree[d].len());
            by_degree[d].push(m);
        }
        ExteriorBasis { n, by_degree, position }
    }

    pub fn generators(&self) -> usize {
        self.n
    }

    pub fn subsets(&self, degree: usize) -> &[Mask] {
        self.by_degree.get(degree).map_or(&[], Vec::as_slice)
    }

    pub fn count(&self, degree: usize) -> usize {
        self.subsets(degree).len()
    }

    pub fn position(&self, mask: Mask) -> usize {
        self.position[&mask]
    }

    /// Coordinate of `m_a ⊗ e^S` in `C^deg` with a module of any dimension.
    pub fn index(&self, a: usize, mask: Mask) -> usize {
        a * self.count(mask.count_ones() as usize) + self.position(mask)
    }

    pub fn cochain_dim(&self, module_dim: usize, degree: usize) -> usize {
        module_dim * self.count(degree)
    }

    /// Inverse of [`ExteriorBasis::index`].
    pub fn unindex(&self, degree: usize, idx: usize) -> (usize, Mask) {
        let c = self.count(degree);
        (idx / c, self.subsets(degree)[idx % c])
    }
}

#[derive(Debug, Clone)]
pub struct CochainComplex {
    algebra: LieAlgebra,
    module: LieModule,
    basis: ExteriorBasis,
    /// `d[n]: C^n -> C^{n+1}` for `n = 0..=dim h`.
    d: Vec<RatMatrix>,
}

/// Builds `C*(h, M)` and verifies `d ∘ d = 0`.
pub fn build_complex(h: &LieAlgebra, m: &LieModule) -> Result<CochainComplex, CohError> {
    let c = build_complex_unchecked(h, m)?;
    for n in 0..h.dim() {
        if !c.d[n + 1].mul(&c.d[n]).is_zero() {
            return Err(CohError::Internal(format!("d^{} d^{} != 0", n + 1, n)));
        }
    }
    Ok(c)
}

fn build_complex_unchecked(h: &LieAlgebra, m: &LieModule) -> Result<CochainComplex, CohError> {
    let n = h.dim();
    if n > 32 {
        return Err(CohError::TooLarge(n));
    }
    if m.algebra_dim() != n {
        return Err(CohError::Module(format!(
            "module has {} action matrices, algebra has dimension {n}",
            m.algebra_dim()
        )));
    }
    m.validate(h)?;
    let basis = ExteriorBasis::new(n);
    let md = m.dim();
    let mut d = Vec::with_capacity(n + 1);
    for deg in 0..=n {
        let rows = basis.cochain_dim(md, deg + 1);
        let cols = basis.cochain_dim(md, deg);
        let mut mat = RatMatrix::zeros(rows, cols);
        for &t in basis.subsets(deg + 1) {
            let ts = mask_indices(t);
            // Y_i acting on the module
            for (i, &ti) in ts.iter().enumerate() {
                let s = t & !(1 << ti);
                let sign = Rational::from_integer(parity(i as u32).into());
                let rho = m.action(ti);
                for b in 0..md {
                    for a in 0..md {
                        if !rho[(b, a)].is_zero() {
                            mat[(basis.index(b, t), basis.index(a, s))] += &sign * &rho[(b, a)];
                        }
                    }
                }
            }
            // bracket terms
            for i in 0..ts.len() {
                for j in i + 1..ts.len() {
                    let br = h.bracket_basis(ts[i], ts[j]);
                    let rest = t & !(1 << ts[i]) & !(1 << ts[j]);
                    for (k, ck) in br.iter().enumerate() {
                        if ck.is_zero() || rest & (1 << k) != 0 {
                            continue;
                        }
                        let below = (rest & ((1 << k) - 1)).count_ones();
                        let sign = parity((i + j) as u32) * parity(below);
                        let coef = ck * Rational::from_integer(sign.into());
                        let s = rest | (1 << k);
                        for a in 0..md {
                            mat[(basis.index(a, t), basis.index(a, s))] += &coef;
                        }
                    }
                }
            }
        }
        d.push(mat);
    }
    Ok(CochainComplex { algebra: h.clone(), module: m.clone(), basis, d })
}

impl CochainComplex {
    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn module(&self) -> &LieModule {
        &self.module
    }

    pub fn basis(&self) -> &ExteriorBasis {
        &self.basis
    }

    pub fn top_degree(&self) -> usize {
        self.algebra.dim()
    }

    pub fn cochain_dim(&self, n: usize) -> usize {
        if n > self.top_degree() {
            return 0;
        }
        self.basis.cochain_dim(self.module.dim(), n)
    }

    /// `d^n`; the zero map outside `0..=dim h`.
    pub fn differential(&self, n: usize) -> RatMatrix {
        match self.d.get(n) {
            Some(m) => m.clone(),
            None => RatMatrix::zeros(self.cochain_dim(n + 1), self.cochain_dim(n)),
        }
    }

    pub fn d_ref(&self, n: usize) -> Option<&RatMatrix> {
        self.d.get(n)
    }

    pub fn apply_d(&self, n: usize, phi: &[Rational]) -> QVec {
        match self.d.get(n) {
            Some(m) => m.mul_vec(phi),
            None => Vec::new(),
        }
    }

    /// `m_a ⊗ e^S` as a coordinate vector.
    pub fn basis_cochain(&self, a: usize, mask: Mask) -> QVec {
        let n = mask.count_ones() as usize;
        let mut v = zero_vec(self.cochain_dim(n));
        v[self.basis.index(a, mask)] = Rational::one();
        v
    }

    pub fn euler_characteristic_of_cochains(&self) -> i64 {
        (0..=self.top_degree())
            .map(|n| if n % 2 == 0 { self.cochain_dim(n) as i64 } else { -(self.cochain_dim(n) as i64) })
            .sum()
    }

    /// JSON form `{degree, coefficients: [[module_index, [subset], "p/q"], ...]}`.
    pub fn cochain_json(&self, degree: usize, v: &[Rational]) -> serde_json::Value {
        let coeffs: Vec<serde_json::Value> = v
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(idx, c)| {
                let (a, mask) = self.basis.unindex(degree, idx);
                serde_json::json!([a, mask_indices(mask), RatStr(c.clone())])
            })
            .collect();
        serde_json::json!({ "degree": degree, "coefficients": coeffs })
    }
}

/// `H^n(h, M)` with deterministic representatives.
#[derive(Debug, Clone)]
pub struct CohomologySpace {
    pub degree: usize,
    pub cocycles: Subspace,
    pub coboundaries: Subspace,
    pub representatives: Vec<QVec>,
    /// Columns: representatives followed by the coboundary basis.
    solver: RatMatrix,
}

impl CohomologySpace {
    /// Subquotient `cocycles / coboundaries`; the second must lie in the first.
    pub fn from_subspaces(degree: usize, cocycles: Subspace, coboundaries: Subspace) -> Result<Self, CohError> {
        let representatives = quotient_basis(&cocycles, &coboundaries)?;
        let mut cols = representatives.clone();
        cols.extend(coboundaries.basis().iter().cloned());
        let solver = RatMatrix::from_columns(&cols, cocycles.ambient_dim());
        Ok(CohomologySpace { degree, cocycles, coboundaries, representatives, solver })
    }

    pub fn zero(degree: usize) -> Self {
        CohomologySpace::from_subspaces(degree, Subspace::zero(0), Subspace::zero(0)).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.representatives.len()
    }

    pub fn cochain_dim(&self) -> usize {
        self.cocycles.ambient_dim()
    }

    /// Coordinates of the class of a cocycle in the representative basis;
    /// `None` if `z` is not a cocycle.
    pub fn class_of(&self, z: &[Rational]) -> Option<QVec> {
        if self.cochain_dim() == 0 {
            return Some(Vec::new());
        }
        if !self.cocycles.contains(z) {
            return None;
        }
        let x = solve(&self.solver, z)?;
        Some(x[..self.dim()].to_vec())
    }

    pub fn is_coboundary(&self, z: &[Rational]) -> bool {
        self.cochain_dim() == 0 || self.coboundaries.contains(z)
    }

    /// Cocycle `Σ c_i r_i`.
    pub fn cocycle_from(&self, coords: &[Rational]) -> QVec {
        let mut v = zero_vec(self.cochain_dim());
        for (c, r) in coords.iter().zip(&self.representatives) {
            axpy(&mut v, c, r);
        }
        v
    }
}

/// `H^n = Ker d^n / Im d^{n-1}`; the zero space above the top degree.
pub fn cohomology(c: &CochainComplex, n: usize) -> Result<CohomologySpace, CohError> {
    if n > c.top_degree() {
        return Ok(CohomologySpace::zero(n));
    }
    let cocycles = kernel_basis(&c.d[n]);
    let coboundaries = if n == 0 {
        Subspace::zero(c.cochain_dim(0))
    } else {
        crate::exactla::image_basis(&c.d[n - 1])
    };
    CohomologySpace::from_subspaces(n, cocycles, coboundaries)
}

pub fn all_cohomology(c: &CochainComplex) -> Result<Vec<CohomologySpace>, CohError> {
    (0..=c.top_degree()).map(|n| cohomology(c, n)).collect()
}

pub fn betti_numbers(c: &CochainComplex) -> Result<Vec<usize>, CohError> {
    Ok(all_cohomology(c)?.iter().map(CohomologySpace::dim).collect())
}

// ---------------------------------------------------------------------------
// ambient action

/// Checks that the first `h.dim()` basis vectors of `ambient` form an ideal
/// with the same brackets as `h`, and that `module` restricts to the
/// complex's module.
pub fn check_ambient(c: &CochainComplex, ambient: &LieAlgebra, module: &LieModule) -> Result<(), CohError> {
    let k = c.algebra.dim();
    if ambient.dim() < k || !ambient.has_prefix_ideal(k) {
        return Err(CohError::NotIdeal(k));
    }
    let sub = ambient.prefix_subalgebra(k);
    if sub.triples().ne(c.algebra.triples()) {
        return Err(CohError::NotIdeal(k));
    }
    if module.algebra_dim() != ambient.dim() || module.dim() != c.module.dim() {
        return Err(CohError::Module("ambient module has the wrong shape".into()));
    }
    if module.actions()[..k] != *c.module.actions() {
        return Err(CohError::Module("ambient module does not restrict to the coefficient module".into()));
    }
    module.validate(ambient)?;
    Ok(())
}

/// Matrix of `φ ↦ X·φ` on `C^n(h, M)`, where
/// `(X·φ)(Y_1..Y_n) = X·φ(Y_1..Y_n) - Σ_i φ(Y_1..[X, Y_i]..Y_n)`.
pub fn ambient_action_matrix(
    c: &CochainComplex,
    ambient: &LieAlgebra,
    module: &LieModule,
    x: &[Rational],
    n: usize,
) -> Result<RatMatrix, CohError> {
    check_ambient(c, ambient, module)?;
    Ok(ambient_action_matrix_unchecked(c, ambient, module, x, n))
}

pub(crate) fn ambient_action_matrix_unchecked(
    c: &CochainComplex,
    ambient: &LieAlgebra,
    module: &LieModule,
    x: &[Rational],
    n: usize,
) -> RatMatrix {
    let dim = c.cochain_dim(n);
    let mut mat = RatMatrix::zeros(dim, dim);
    if n > c.top_degree() {
        return mat;
    }
    let md = c.module.dim();
    let k = c.algebra.dim();
    let rho = module.act(x);
    let ad = ambient.ad(x);
    let basis = &c.basis;
    for &t in basis.subsets(n) {
        for b in 0..md {
            for a in 0..md {
                if !rho[(b, a)].is_zero() {
                    mat[(basis.index(b, t), basis.index(a, t))] += &rho[(b, a)];
                }
            }
        }
        let ts = mask_indices(t);
        for (i, &ti) in ts.iter().enumerate() {
            for kk in 0..k {
                let coef = &ad[(kk, ti)];
                if coef.is_zero() {
                    continue;
                }
                let mut args = ts.clone();
                args[i] = kk;
                let Some((sign, s)) = sort_sign(&args) else { continue };
                let v = coef * Rational::from_integer((-sign).into());
                for a in 0..md {
                    mat[(basis.index(a, t), basis.index(a, s))] += &v;
                }
            }
        }
    }
    mat
}

/// `X·φ` for a single cochain of degree `n`.
pub fn ambient_action(
    x: &[Rational],
    phi: &[Rational],
    n: usize,
    c: &CochainComplex,
    ambient: &LieAlgebra,
    module: &LieModule,
) -> Result<QVec, CohError> {
    Ok(ambient_action_matrix(c, ambient, module, x, n)?.mul_vec(phi))
}

/// Matrix of the action induced by ambient basis element `x_index` on `H^n`
/// in the representative basis.
pub fn induced_action(
    c: &CochainComplex,
    h: &CohomologySpace,
    ambient: &LieAlgebra,
    module: &LieModule,
    x_index: usize,
) -> Result<RatMatrix, CohError> {
    check_ambient(c, ambient, module)?;
    let x = crate::exactla::unit_vec(ambient.dim(), x_index);
    let act = ambient_action_matrix_unchecked(c, ambient, module, &x, h.degree);
    induced_on_cohomology(h, &act)
}

/// Matrix of a cochain map of `C^n` on `H^n` in the representative basis.
pub fn induced_on_cohomology(h: &CohomologySpace, map: &RatMatrix) -> Result<RatMatrix, CohError> {
    let cols: Result<Vec<QVec>, CohError> = h
        .representatives
        .iter()
        .map(|r| {
            h.class_of(&map.mul_vec(r))
                .ok_or_else(|| CohError::Internal("cochain map does not preserve cocycles".into()))
        })
        .collect();
    Ok(RatMatrix::from_columns(&cols?, h.dim()))
}

/// Classes of `H^n(h, M)` annihilated by the ambient algebra.
#[derive(Debug, Clone)]
pub struct InvariantClasses {
    pub degree: usize,
    /// Subspace of `H^n` in representative coordinates.
    pub coords: Subspace,
    /// Cocycles representing a basis of the invariant classes.
    pub representatives: Vec<QVec>,
}

impl InvariantClasses {
    pub fn dim(&self) -> usize {
        self.coords.dim()
    }
}

/// For each degree, the joint kernel of the induced action of the ambient
/// basis elements outside `h` (elements of `h` act trivially on cohomology).
pub fn invariant_cohomology(
    c: &CochainComplex,
    ambient: &LieAlgebra,
    module: &LieModule,
) -> Result<Vec<InvariantClasses>, CohError> {
    check_ambient(c, ambient, module)?;
    let spaces = all_cohomology(c)?;
    let mut out = Vec::new();
    for h in &spaces {
        let mut rows: Vec<QVec> = Vec::new();
        for xi in c.algebra.dim()..ambient.dim() {
            let m = induced_action(c, h, ambient, module, xi)?;
            rows.extend(m.to_rows());
        }
        let coords = if rows.is_empty() {
            Subspace::full(h.dim())
        } else {
            kernel_basis(&RatMatrix::from_rows(rows, h.dim())?)
        };
        let representatives = coords.basis().iter().map(|v| h.cocycle_from(v)).collect();
        out.push(InvariantClasses { degree: h.degree, coords, representatives });
    }
    Ok(out)
}

/// Cohomology of the subcomplex of cochains annihilated by the ambient
/// elements outside `h`. Its representatives are invariant at cochain level.
pub fn invariant_subcomplex_cohomology(
    c: &CochainComplex,
    ambient: &LieAlgebra,
    module: &LieModule,
) -> Result<Vec<Vec<QVec>>, CohError> {
    check_ambient(c, ambient, module)?;
    let top = c.top_degree();
    let invariant: Vec<Subspace> = (0..=top)
        .map(|n| {
            let mut rows = Vec::new();
            for xi in c.algebra.dim()..ambient.dim() {
                let x = crate::exactla::unit_vec(ambient.dim(), xi);
                rows.extend(ambient_action_matrix_unchecked(c, ambient, module, &x, n).to_rows());
            }
            if rows.is_empty() {
                Subspace::full(c.cochain_dim(n))
            } else {
                kernel_basis(&RatMatrix::from_rows(rows, c.cochain_dim(n)).unwrap())
            }
        })
        .collect();
    let mut out = Vec::new();
    for n in 0..=top {
        let z = invariant[n].preimage_within(&c.d[n], &Subspace::zero(c.cochain_dim(n + 1)));
        let b = if n == 0 { Subspace::zero(c.cochain_dim(0)) } else { invariant[n - 1].image_under(&c.d[n - 1]) };
        out.push(quotient_basis(&z, &b)?);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// cup products

/// Bilinear pairing `M × N → P` given by `coeffs[a][b]` = image of `(m_a, n_b)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pairing {
    pub left_dim: usize,
    pub right_dim: usize,
    pub out_dim: usize,
    pub coeffs: Vec<Vec<QVec>>,
}

impl Pairing {
    /// `Q × Q → Q`, multiplication.
    pub fn trivial() -> Self {
        Pairing { left_dim: 1, right_dim: 1, out_dim: 1, coeffs: vec![vec![vec![Rational::one()]]] }
    }

    /// `M × Q → M`, `(m, α) ↦ α m`.
    pub fn scalar_right(m: usize) -> Self {
        let coeffs = (0..m).map(|a| vec![crate::exactla::unit_vec(m, a)]).collect();
        Pairing { left_dim: m, right_dim: 1, out_dim: m, coeffs }
    }

    /// `Q × M → M`, `(α, m) ↦ α m`.
    pub fn scalar_left(m: usize) -> Self {
        let coeffs = vec![(0..m).map(|b| crate::exactla::unit_vec(m, b)).collect()];
        Pairing { left_dim: 1, right_dim: m, out_dim: m, coeffs }
    }

    pub fn apply(&self, m: &[Rational], n: &[Rational]) -> QVec {
        let mut out = zero_vec(self.out_dim);
        for (a, ma) in m.iter().enumerate() {
            if ma.is_zero() {
                continue;
            }
            for (b, nb) in n.iter().enumerate() {
                if !nb.is_zero() {
                    axpy(&mut out, &(ma * nb), &self.coeffs[a][b]);
                }
            }
        }
        out
    }

    /// `X·(m ∪ n) = (X·m) ∪ n + m ∪ (X·n)` on basis vectors, for every algebra basis element.
    pub fn check_law(&self, left: &LieModule, right: &LieModule, out: &LieModule) -> Result<(), CohError> {
        if left.dim() != self.left_dim || right.dim() != self.right_dim || out.dim() != self.out_dim {
            return Err(CohError::Pairing("module dimensions do not match the pairing".into()));
        }
        for x in 0..left.algebra_dim() {
            for a in 0..self.left_dim {
                for b in 0..self.right_dim {
                    let ea = crate::exactla::unit_vec(self.left_dim, a);
                    let eb = crate::exactla::unit_vec(self.right_dim, b);
                    let lhs = out.action(x).mul_vec(&self.coeffs[a][b]);
                    let mut rhs = self.apply(&left.action(x).mul_vec(&ea), &eb);
                    let t = self.apply(&ea, &right.action(x).mul_vec(&eb));
                    axpy(&mut rhs, &Rational::one(), &t);
                    if lhs != rhs {
                        return Err(CohError::Pairing(format!(
                            "pairing law fails for algebra element {x} on ({a}, {b})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Shuffle cup product of an `i`-cochain with values in `M` and a `j`-cochain
/// with values in `N`, landing in `C^{i+j}(h, P)`. Degrees beyond the top give
/// the (empty) zero cochain.
pub fn cup(
    basis: &ExteriorBasis,
    phi: &[Rational],
    i: usize,
    psi: &[Rational],
    j: usize,
    pairing: &Pairing,
) -> QVec {
    if i + j > basis.generators() {
        return Vec::new();
    }
    let mut out = zero_vec(basis.cochain_dim(pairing.out_dim, i + j));
    for (ia, ca) in phi.iter().enumerate() {
        if ca.is_zero() {
            continue;
        }
        let (a, s) = basis.unindex(i, ia);
        for (jb, cb) in psi.iter().enumerate() {
            if cb.is_zero() {
                continue;
            }
            let (b, t) = basis.unindex(j, jb);
            if s & t != 0 {
                continue;
            }
            let sign = Rational::from_integer(shuffle_sign(s, t).into());
            let coef = ca * cb * sign;
            let u = s | t;
            for (k, pk) in pairing.coeffs[a][b].iter().enumerate() {
                if !pk.is_zero() {
                    out[basis.index(k, u)] += &coef * pk;
                }
            }
        }
    }
    out
}

/// Cup product with trivial one-dimensional coefficients.
pub fn cup_trivial(basis: &ExteriorBasis, phi: &[Rational], i: usize, psi: &[Rational], j: usize) -> QVec {
    cup(basis, phi, i, psi, j, &Pairing::trivial())
}

// ---------------------------------------------------------------------------
// graded rings

/// A finite graded-commutative algebra given by structure constants in a
/// fixed basis of each degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedRing {
    dims: Vec<usize>,
    /// `(i, j)` → matrix `dims[i+j] × (dims[i] * dims[j])`, column `a * dims[j] + b`.
    products: BTreeMap<(usize, usize), RatMatrix>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RingFingerprint {
    pub poincare: Vec<usize>,
    /// Rank of the cup map `∧^a H^1 → H^a` for `a = 0..=top`.
    pub exterior_cup_ranks: Vec<usize>,
    /// `(i, j, rank of H^i ⊗ H^j → H^{i+j})`.
    pub product_ranks: Vec<(usize, usize, usize)>,
}

impl GradedRing {
    pub fn from_products(dims: Vec<usize>, products: BTreeMap<(usize, usize), RatMatrix>) -> Self {
        let mut r = GradedRing { dims, products };
        r.fill_missing();
        r
    }

    fn fill_missing(&mut self) {
        let top = self.top();
        for i in 0..=top {
            for j in 0..=top - i {
                let (di, dj, dk) = (self.dims[i], self.dims[j], self.dims[i + j]);
                self.products.entry((i, j)).or_insert_with(|| RatMatrix::zeros(dk, di * dj));
            }
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, i: usize) -> usize {
        self.dims.get(i).copied().unwrap_or(0)
    }

    pub fn top(&self) -> usize {
        self.dims.len().saturating_sub(1)
    }

    pub fn product_matrix(&self, i: usize, j: usize) -> Option<&RatMatrix> {
        self.products.get(&(i, j))
    }

    /// Product of homogeneous elements in coordinates.
    pub fn mul(&self, x: &[Rational], i: usize, y: &[Rational], j: usize) -> QVec {
        if i + j > self.top() {
            return Vec::new();
        }
        let m = &self.products[&(i, j)];
        let dj = self.dims[j];
        let mut out = zero_vec(self.dims[i + j]);
        for (a, xa) in x.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            for (b, yb) in y.iter().enumerate() {
                if !yb.is_zero() {
                    axpy(&mut out, &(xa * yb), &m.col(a * dj + b));
                }
            }
        }
        out
    }

    pub fn basis_vec(&self, i: usize, a: usize) -> QVec {
        crate::exactla::unit_vec(self.dims[i], a)
    }

    /// Exterior algebra on `k` degree-one generators, basis by subsets in
    /// increasing numeric order.
    pub fn exterior(k: usize) -> Self {
        let basis = ExteriorBasis::new(k);
        let dims: Vec<usize> = (0..=k).map(|d| basis.count(d)).collect();
        let mut products = BTreeMap::new();
        for i in 0..=k {
            for j in 0..=k - i {
                let mut m = RatMatrix::zeros(dims[i + j], dims[i] * dims[j]);
                for (a, &s) in basis.subsets(i).iter().enumerate() {
                    for (b, &t) in basis.subsets(j).iter().enumerate() {
                        if s & t == 0 {
                            m[(basis.position(s | t), a * dims[j] + b)] = Rational::from_integer(shuffle_sign(s, t).into());
                        }
                    }
                }
                products.insert((i, j), m);
            }
        }
        GradedRing { dims, products }
    }

    /// Graded tensor product with `(x ⊗ a)(y ⊗ b) = (-1)^{|a||y|} xy ⊗ ab`.
    /// Degree-`n` basis: pairs `(i, p, q)` with `i + j = n`, ordered by `i`
    /// ascending, then `p`, then `q`.
    pub fn tensor(&self, other: &GradedRing) -> GradedRing {
        let top = self.top() + other.top();
        let layout = |n: usize| -> Vec<(usize, usize, usize)> {
            let mut v = Vec::new();
            for i in 0..=n.min(self.top()) {
                let j = n - i;
                if j > other.top() {
                    continue;
                }
                for p in 0..self.dim(i) {
                    for q in 0..other.dim(j) {
                        v.push((i, p, q));
                    }
                }
            }
            v
        };
        let layouts: Vec<Vec<(usize, usize, usize)>> = (0..=top).map(layout).collect();
        let pos: Vec<HashMap<(usize, usize, usize), usize>> = layouts
            .iter()
            .map(|l| l.iter().enumerate().map(|(k, &t)| (t, k)).collect())
            .collect();
        let dims: Vec<usize> = layouts.iter().map(Vec::len).collect();
        let mut products = BTreeMap::new();
        for n1 in 0..=top {
            for n2 in 0..=top - n1 {
                let mut m = RatMatrix::zeros(dims[n1 + n2], dims[n1] * dims[n2]);
                for (c1, &(i1, p1, q1)) in layouts[n1].iter().enumerate() {
                    let j1 = n1 - i1;
                    for (c2, &(i2, p2, q2)) in layouts[n2].iter().enumerate() {
                        let j2 = n2 - i2;
                        if i1 + i2 > self.top() || j1 + j2 > other.top() {
                            continue;
                        }
                        let xy = self.mul(&self.basis_vec(i1, p1), i1, &self.basis_vec(i2, p2), i2);
                        let ab = other.mul(&other.basis_vec(j1, q1), j1, &other.basis_vec(j2, q2), j2);
                        let sign = if (j1 * i2) % 2 == 0 { Rational::one() } else { -Rational::one() };
                        for (p, xp) in xy.iter().enumerate() {
                            if xp.is_zero() {
                                continue;
                            }
                            for (q, aq) in ab.iter().enumerate() {
                                if !aq.is_zero() {
                                    let row = pos[n1 + n2][&(i1 + i2, p, q)];
                                    m[(row, c1 * dims[n2] + c2)] += &sign * xp * aq;
                                }
                            }
                        }
                    }
                }
                products.insert((n1, n2), m);
            }
        }
        GradedRing { dims, products }
    }

    /// Subring spanned in each degree by the given coordinate vectors.
    /// Fails if the span is not closed under products.
    pub fn subring(&self, bases: &[Vec<QVec>]) -> Result<GradedRing, CohError> {
        let dims: Vec<usize> = bases.iter().map(Vec::len).collect();
        let top = dims.len().saturating_sub(1);
        let mut products = BTreeMap::new();
        for i in 0..=top {
            for j in 0..=top - i {
                let k = i + j;
                let target = RatMatrix::from_columns(&bases[k], self.dim(k));
                let mut m = RatMatrix::zeros(dims[k], dims[i] * dims[j]);
                for (a, x) in bases[i].iter().enumerate() {
                    for (b, y) in bases[j].iter().enumerate() {
                        let xy = self.mul(x, i, y, j);
                        if is_zero_vec(&xy) {
                            continue;
                        }
                        let c = solve(&target, &xy)
                            .ok_or_else(|| CohError::Internal(format!("subring not closed in degree {k}")))?;
                        for (r, cr) in c.into_iter().enumerate() {
                            m[(r, a * dims[j] + b)] = cr;
                        }
                    }
                }
                products.insert((i, j), m);
            }
        }
        Ok(GradedRing { dims, products })
    }

    pub fn check_graded_commutative(&self) -> bool {
        let top = self.top();
        for i in 0..=top {
            for j in 0..=top - i {
                for a in 0..self.dim(i) {
                    for b in 0..self.dim(j) {
                        let x = self.basis_vec(i, a);
                        let y = self.basis_vec(j, b);
                        let xy = self.mul(&x, i, &y, j);
                        let mut yx = self.mul(&y, j, &x, i);
                        if (i * j) % 2 == 1 {
                            yx.iter_mut().for_each(|c| *c = -c.clone());
                        }
                        if xy != yx {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    pub fn check_associative(&self) -> bool {
        let top = self.top();
        for i in 0..=top {
            for j in 0..=top - i {
                for k in 0..=top - i - j {
                    for a in 0..self.dim(i) {
                        for b in 0..self.dim(j) {
                            for c in 0..self.dim(k) {
                                let (x, y, z) = (self.basis_vec(i, a), self.basis_vec(j, b), self.basis_vec(k, c));
                                let l = self.mul(&self.mul(&x, i, &y, j), i + j, &z, k);
                                let r = self.mul(&x, i, &self.mul(&y, j, &z, k), j + k);
                                if l != r {
                                    return false;
                                }
                            }
                        }
                    }
                }
            }
        }
        true
    }

    pub fn fingerprint(&self) -> RingFingerprint {
        let top = self.top();
        let b1 = self.dim(1);
        let ext = ExteriorBasis::new(b1);
        let mut exterior_cup_ranks = Vec::new();
        for a in 0..=top {
            if a == 0 {
                exterior_cup_ranks.push(usize::from(self.dim(0) > 0));
                continue;
            }
            let cols: Vec<QVec> = ext
                .subsets(a)
                .iter()
                .map(|&s| {
                    let idx = mask_indices(s);
                    let mut acc = self.basis_vec(1, idx[0]);
                    for (deg, &g) in idx.iter().enumerate().skip(1) {
                        acc = self.mul(&acc, deg, &self.basis_vec(1, g), 1);
                    }
                    acc
                })
                .collect();
            let rank = if cols.is_empty() { 0 } else { RatMatrix::from_columns(&cols, self.dim(a)).rank() };
            exterior_cup_ranks.push(rank);
        }
        let product_ranks = self.products.iter().map(|(&(i, j), m)| (i, j, m.rank())).collect();
        RingFingerprint { poincare: self.dims.clone(), exterior_cup_ranks, product_ranks }
    }

    /// Whether the degreewise maps `maps[n]: self_n → other_n` form a ring isomorphism.
    pub fn is_isomorphism(&self, other: &GradedRing, maps: &[RatMatrix]) -> bool {
        if self.dims != other.dims || maps.len() != self.dims.len() {
            return false;
        }
        for (n, m) in maps.iter().enumerate() {
            if m.rows() != self.dims[n] || m.cols() != self.dims[n] || m.rank() != self.dims[n] {
                return false;
            }
        }
        self.is_multiplicative(other, maps)
    }

    /// `f(xy) = f(x) f(y)` on all basis pairs.
    pub fn is_multiplicative(&self, other: &GradedRing, maps: &[RatMatrix]) -> bool {
        let top = self.top();
        for i in 0..=top {
            for j in 0..=top - i {
                for a in 0..self.dim(i) {
                    for b in 0..self.dim(j) {
                        let x = self.basis_vec(i, a);
                        let y = self.basis_vec(j, b);
                        let lhs = maps[i + j].mul_vec(&self.mul(&x, i, &y, j));
                        let rhs = other.mul(&maps[i].mul_vec(&x), i, &maps[j].mul_vec(&y), j);
                        if lhs != rhs {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

/// The cohomology ring `H*(h, Q)` in the deterministic representative bases.
/// Requires trivial one-dimensional coefficients.
pub fn ring_structure(c: &CochainComplex) -> Result<GradedRing, CohError> {
    if c.module.dim() != 1 || !c.module.is_trivial() {
        return Err(CohError::Module("ring structure needs trivial one-dimensional coefficients".into()));
    }
    let spaces = all_cohomology(c)?;
    let ring = ring_from_spaces(c, &spaces)?;
    if !ring.check_graded_commutative() || !ring.check_associative() {
        return Err(CohError::Internal("cohomology ring fails graded commutativity or associativity".into()));
    }
    Ok(ring)
}

pub(crate) fn ring_from_spaces(c: &CochainComplex, spaces: &[CohomologySpace]) -> Result<GradedRing, CohError> {
    let top = c.top_degree();
    let dims: Vec<usize> = spaces.iter().map(CohomologySpace::dim).collect();
    let mut products = BTreeMap::new();
    for i in 0..=top {
        for j in 0..=top - i {
            let k = i + j;
            let mut m = RatMatrix::zeros(dims[k], dims[i] * dims[j]);
            for (a, x) in spaces[i].representatives.iter().enumerate() {
                for (b, y) in spaces[j].representatives.iter().enumerate() {
                    let xy = cup_trivial(&c.basis, x, i, y, j);
                    let cls = spaces[k]
                        .class_of(&xy)
                        .ok_or_else(|| CohError::Internal("cup product of cocycles is not a cocycle".into()))?;
                    for (r, v) in cls.into_iter().enumerate() {
                        m[(r, a * dims[j] + b)] = v;
                    }
                }
            }
            products.insert((i, j), m);
        }
    }
    Ok(GradedRing { dims, products })
}

pub fn ring_invariants(r: &GradedRing) -> RingFingerprint {
    r.fingerprint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::{int, unit_vec};
    use crate::liealg::fixtures::*;
    use crate::liealg::semidirect;

    fn trivial_complex(g: &LieAlgebra) -> CochainComplex {
        build_complex(g, &LieModule::trivial(g)).unwrap()
    }

    #[test]
    fn signs() {
        assert_eq!(shuffle_sign(0b01, 0b10), 1);
        assert_eq!(shuffle_sign(0b10, 0b01), -1);
        assert_eq!(shuffle_sign(0b101, 0b010), -1);
        assert_eq!(sort_sign(&[2, 0, 1]), Some((1, 0b111)));
        assert_eq!(sort_sign(&[1, 0]), Some((-1, 0b11)));
        assert_eq!(sort_sign(&[1, 1]), None);
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(2, 5), 0);
    }

    #[test]
    fn abelian_line_has_zero_differential() {
        let c = trivial_complex(&LieAlgebra::abelian(1));
        assert!(c.differential(0).is_zero());
        assert!(c.differential(1).is_zero());
        assert_eq!(betti_numbers(&c).unwrap(), vec![1, 1]);
    }

    #[test]
    fn heisenberg_differential() {
        let c = trivial_complex(&LieAlgebra::heisenberg());
        let d1 = c.differential(1);
        let xy = c.basis_cochain(0, 0b011);
        let zs = c.basis_cochain(0, 0b100);
        let neg_xy: QVec = xy.iter().map(|v| -v).collect();
        assert_eq!(d1.mul_vec(&zs), neg_xy);
        assert!(is_zero_vec(&d1.mul_vec(&c.basis_cochain(0, 0b001))));
        assert!(is_zero_vec(&d1.mul_vec(&c.basis_cochain(0, 0b010))));
        assert_eq!(betti_numbers(&c).unwrap(), vec![1, 2, 2, 1]);
    }

    #[test]
    fn bs_hull_differential() {
        let g = semidirect(&bs_presentation()).unwrap();
        let c = trivial_complex(&g);
        // basis (u, D): d(u*) = u*∧D* = -D*∧u*
        assert_eq!(c.differential(1).mul_vec(&c.basis_cochain(0, 0b01)), vec![int(1)]);
        assert!(is_zero_vec(&c.differential(1).mul_vec(&c.basis_cochain(0, 0b10))));
        assert_eq!(betti_numbers(&c).unwrap(), vec![1, 1, 0]);
        let h1 = cohomology(&c, 1).unwrap();
        assert_eq!(h1.representatives, vec![c.basis_cochain(0, 0b10)]);
    }

    #[test]
    fn abelian_binomials() {
        for n in 1..=5 {
            let c = trivial_complex(&LieAlgebra::abelian(n));
            let expect: Vec<usize> = (0..=n).map(|k| binomial(n, k)).collect();
            assert_eq!(betti_numbers(&c).unwrap(), expect);
        }
    }

    #[test]
    fn degree_above_top_is_zero() {
        let c = trivial_complex(&LieAlgebra::heisenberg());
        let h = cohomology(&c, 7).unwrap();
        assert_eq!(h.dim(), 0);
        assert_eq!(c.cochain_dim(7), 0);
    }

    #[test]
    fn ambient_action_examples() {
        let p = bs_presentation();
        let g = semidirect(&p).unwrap();
        let c = trivial_complex(&p.u);
        let m = LieModule::trivial(&g);
        let d = unit_vec(2, 1);
        // D·u* = -u*
        let out = ambient_action(&d, &[int(1)], 1, &c, &g, &m).unwrap();
        assert_eq!(out, vec![int(-1)]);
        let zero = ambient_action(&[int(0), int(0)], &[int(1)], 1, &c, &g, &m).unwrap();
        assert!(is_zero_vec(&zero));

        // h acts trivially on its own cohomology
        let h3 = LieAlgebra::heisenberg();
        let c = trivial_complex(&h3);
        let m = LieModule::trivial(&h3);
        let h1 = cohomology(&c, 1).unwrap();
        for xi in 0..3 {
            for r in &h1.representatives {
                let v = ambient_action(&unit_vec(3, xi), r, 1, &c, &h3, &m).unwrap();
                assert!(h1.is_coboundary(&v));
            }
        }
    }

    #[test]
    fn ambient_must_contain_ideal() {
        let g = semidirect(&bs_presentation()).unwrap();
        // u = span(D) is not an ideal when D is listed first
        let swapped = LieAlgebra::new(vec!["D".into(), "u".into()], vec![(0, 1, vec![int(0), int(1)])]).unwrap();
        let c = trivial_complex(&LieAlgebra::abelian(1));
        let m = LieModule::trivial(&swapped);
        assert_eq!(
            ambient_action(&[int(1), int(0)], &[int(1)], 1, &c, &swapped, &m),
            Err(CohError::NotIdeal(1))
        );
        assert!(check_ambient(&c, &g, &LieModule::trivial(&g)).is_ok());
    }

    #[test]
    fn invariant_examples() {
        let p = heis_presentation();
        let g = semidirect(&p).unwrap();
        let c = trivial_complex(&p.u);
        let inv = invariant_cohomology(&c, &g, &LieModule::trivial(&g)).unwrap();
        assert_eq!(inv.iter().map(InvariantClasses::dim).collect::<Vec<_>>(), vec![1, 0, 0, 0]);
        let h1 = cohomology(&c, 1).unwrap();
        assert_eq!(induced_action(&c, &h1, &g, &LieModule::trivial(&g), 3).unwrap(), RatMatrix::diagonal(&[int(-1), int(-1)]));
        let h2 = cohomology(&c, 2).unwrap();
        assert_eq!(induced_action(&c, &h2, &g, &LieModule::trivial(&g), 3).unwrap(), RatMatrix::diagonal(&[int(-3), int(-3)]));

        let p = bs_presentation();
        let g = semidirect(&p).unwrap();
        let c = trivial_complex(&p.u);
        let inv = invariant_cohomology(&c, &g, &LieModule::trivial(&g)).unwrap();
        assert_eq!(inv.iter().map(InvariantClasses::dim).collect::<Vec<_>>(), vec![1, 0]);

        let h3 = LieAlgebra::heisenberg();
        let c = trivial_complex(&h3);
        let inv = invariant_cohomology(&c, &h3, &LieModule::trivial(&h3)).unwrap();
        assert_eq!(inv.iter().map(InvariantClasses::dim).collect::<Vec<_>>(), vec![1, 2, 2, 1]);
    }

    #[test]
    fn cup_examples() {
        let b = ExteriorBasis::new(2);
        let x = vec![int(1), int(0)];
        let y = vec![int(0), int(1)];
        assert_eq!(cup_trivial(&b, &x, 1, &y, 1), vec![int(1)]);
        assert_eq!(cup_trivial(&b, &y, 1, &x, 1), vec![int(-1)]);
        assert_eq!(cup_trivial(&b, &x, 1, &[int(1)], 0), x);
        assert!(cup_trivial(&b, &[int(1)], 2, &x, 1).is_empty());

        let c = trivial_complex(&LieAlgebra::heisenberg());
        let xy = cup_trivial(c.basis(), &c.basis_cochain(0, 0b001), 1, &c.basis_cochain(0, 0b010), 1);
        let h2 = cohomology(&c, 2).unwrap();
        assert_eq!(h2.class_of(&xy), Some(vec![int(0), int(0)]));
    }

    #[test]
    fn ring_examples() {
        let r = ring_structure(&trivial_complex(&LieAlgebra::abelian(3))).unwrap();
        assert_eq!(r, GradedRing::exterior(3));

        let r = ring_structure(&trivial_complex(&LieAlgebra::heisenberg())).unwrap();
        assert_eq!(r.dims(), &[1, 2, 2, 1]);
        assert!(r.product_matrix(1, 1).unwrap().is_zero());
        assert_eq!(r.product_matrix(1, 2).unwrap().rank(), 1);
        // H^2 representatives are x*∧z* and y*∧z*
        let c = trivial_complex(&LieAlgebra::heisenberg());
        let h2 = cohomology(&c, 2).unwrap();
        assert_eq!(h2.representatives, vec![c.basis_cochain(0, 0b101), c.basis_cochain(0, 0b110)]);
        let x = r.basis_vec(1, 0);
        let y = r.basis_vec(1, 1);
        let xz = r.basis_vec(2, 0);
        assert_eq!(r.mul(&x, 1, &xz, 2), vec![int(0)]);
        assert_eq!(r.mul(&y, 1, &xz, 2), vec![int(-1)]);

        let g = semidirect(&bs_presentation()).unwrap();
        let r = ring_structure(&trivial_complex(&g)).unwrap();
        assert_eq!(r.dims(), &[1, 1, 0]);
        let fp = r.fingerprint();
        assert_eq!(fp.exterior_cup_ranks, vec![1, 1, 0]);
    }

    #[test]
    fn fingerprints_separate_abelian_from_heisenberg() {
        let a = ring_structure(&trivial_complex(&LieAlgebra::abelian(2))).unwrap().fingerprint();
        let h = ring_structure(&trivial_complex(&LieAlgebra::heisenberg())).unwrap().fingerprint();
        assert_eq!(a.exterior_cup_ranks[2], 1);
        assert_eq!(h.exterior_cup_ranks[2], 0);
        let z = GradedRing::from_products(vec![1, 0, 0], BTreeMap::new());
        assert_eq!(z.fingerprint(), z.clone().fingerprint());
    }

    #[test]
    fn tensor_with_exterior() {
        let e1 = GradedRing::exterior(1);
        let e2 = e1.tensor(&e1);
        assert_eq!(e2.dims(), &[1, 2, 1]);
        assert!(e2.check_graded_commutative());
        assert!(e2.check_associative());
        assert_eq!(e2.fingerprint(), GradedRing::exterior(2).fingerprint());
        // degree one is ordered 1⊗b, a⊗1
        let swap = RatMatrix::from_i64(&[&[0, 1], &[1, 0]]);
        let maps = vec![RatMatrix::identity(1), swap, RatMatrix::identity(1)];
        assert!(!e2.is_isomorphism(&GradedRing::exterior(2), &[RatMatrix::identity(1), RatMatrix::identity(2), RatMatrix::identity(1)]));
        assert!(e2.is_isomorphism(&GradedRing::exterior(2), &maps));
    }

    #[test]
    fn pairing_law_with_weight_module() {
        let g = semidirect(&bs_presentation()).unwrap();
        let m = LieModule::new(
            &g,
            2,
            vec![RatMatrix::from_i64(&[&[0, 0], &[1, 0]]), RatMatrix::from_i64(&[&[0, 0], &[0, 1]])],
        )
        .unwrap();
        let q = LieModule::trivial(&g);
        assert!(Pairing::scalar_right(2).check_law(&m, &q, &m).is_ok());
        assert!(Pairing::trivial().check_law(&q, &q, &q).is_ok());
        // M × M → M by coordinatewise product is not a pairing
        let bad = Pairing {
            left_dim: 2,
            right_dim: 2,
            out_dim: 2,
            coeffs: vec![vec![unit_vec(2, 0), vec![int(0), int(0)]], vec![vec![int(0), int(0)], unit_vec(2, 1)]],
        };
        assert!(bad.check_law(&m, &m, &m).is_err());
    }
}
