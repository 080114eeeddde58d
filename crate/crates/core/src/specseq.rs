//! Spectral sequences of filtered cochain complexes and the checks built on
//! the Hochschild–Serre filtration of `g = u ⋊ t`.
//!
//! Pages are stored as explicit subquotients `E_r^p = Z_r^p / B_r^p` inside
//! the original cochain coordinates, with
//! `Z_r^p = {x ∈ F^p : dx ∈ F^{p+r}}` and
//! `B_r^p = Z_{r-1}^{p+1} + d Z_{r-1}^{p-r+1}`.
//! The differential `d_r` is "lift, apply `d`, project".

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::cecoh::{
    all_cohomology, betti_numbers, binomial, build_complex, check_ambient, cohomology, cup, induced_action,
    invariant_cohomology, invariant_subcomplex_cohomology, ring_structure, CochainComplex, CohError, CohomologySpace,
    ExteriorBasis, Mask, Pairing,
};
use crate::exactla::{
    image_basis, kernel_basis, simultaneous_eigenspaces, zero_vec, LinAlgError, QVec, RatMatrix, Rational, Subspace,
};
use crate::groupcoh::{koszul_zk_cohomology, unipotent_group_cohomology, wang_tower, GroupCohError};
use crate::grouphull::{
    declared_hirsch_length, is_zariski_dense_unipotent, torus_density_in_hull, torus_discreteness_in_hull, Decision,
    DenseSubgroupData,
};
use crate::liealg::{LieAlgebra, LieError, LieModule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecSeqError {
    #[error(transparent)]
    Coh(#[from] CohError),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Group(#[from] GroupCohError),
    #[error("filtration: {0}")]
    Filtration(String),
    #[error("the first {0} basis vectors do not span an ideal; expected u-first basis ordering")]
    BasisConvention(usize),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub check: String,
    pub pass: bool,
    pub witness: serde_json::Value,
}

impl Verdict {
    fn new(check: &str, pass: bool, witness: serde_json::Value) -> Self {
        Verdict { check: check.to_string(), pass, witness }
    }
}

// ---------------------------------------------------------------------------
// filtered complexes

#[derive(Debug, Clone)]
pub struct FilteredComplex {
    dims: Vec<usize>,
    d: Vec<RatMatrix>,
    /// `filt[n][p]` for `p = 0..=n+1`.
    filt: Vec<Vec<Subspace>>,
    source: Option<CochainComplex>,
}

impl FilteredComplex {
    /// Checks `d² = 0`, `d(F^p) ⊆ F^p`, monotonicity and the bounds
    /// `F^0 C^n = C^n`, `F^{n+1} C^n = 0`.
    pub fn new(dims: Vec<usize>, d: Vec<RatMatrix>, filt: Vec<Vec<Subspace>>) -> Result<Self, SpecSeqError> {
        let top = dims.len().checked_sub(1).ok_or_else(|| SpecSeqError::Filtration("empty complex".into()))?;
        if d.len() != dims.len() || filt.len() != dims.len() {
            return Err(SpecSeqError::Filtration("one differential and one filtration per degree".into()));
        }
        for n in 0..=top {
            let next = if n < top { dims[n + 1] } else { 0 };
            if d[n].rows() != next || d[n].cols() != dims[n] {
                return Err(SpecSeqError::Filtration(format!("d^{n} has the wrong shape")));
            }
            if n < top && !d[n + 1].mul(&d[n]).is_zero() {
                return Err(SpecSeqError::Filtration(format!("d^{} d^{n} != 0", n + 1)));
            }
            if filt[n].len() != n + 2 {
                return Err(SpecSeqError::Filtration(format!("degree {n} needs F^0..F^{}", n + 1)));
            }
            if filt[n][0] != Subspace::full(dims[n]) || !filt[n][n + 1].is_zero() {
                return Err(SpecSeqError::Filtration(format!("degree {n} is not canonically bounded")));
            }
            for p in 0..=n {
                if !filt[n][p].contains_subspace(&filt[n][p + 1]) {
                    return Err(SpecSeqError::Filtration(format!("F^{} C^{n} not inside F^{p} C^{n}", p + 1)));
                }
            }
        }
        let fc = FilteredComplex { dims, d, filt, source: None };
        for n in 0..top {
            for p in 0..=n + 1 {
                let img = fc.filt[n][p].image_under(&fc.d[n]);
                if !fc.f(p as isize, n + 1).contains_subspace(&img) {
                    return Err(SpecSeqError::Filtration(format!("d does not preserve F^{p} in degree {n}")));
                }
            }
        }
        Ok(fc)
    }

    /// Filtration of a CE complex by total weight: `F^p` is spanned by the
    /// basis cochains `m_a ⊗ e^S` with `Σ_{s ∈ S} w_s ≥ p`.
    pub fn by_weights(c: &CochainComplex, weights: &[usize]) -> Result<Self, SpecSeqError> {
        let top = c.top_degree();
        if weights.len() != top {
            return Err(SpecSeqError::Filtration("one weight per algebra basis vector".into()));
        }
        let md = c.module().dim();
        let mut filt = Vec::new();
        for n in 0..=top {
            let subsets = c.basis().subsets(n);
            let w = |s: Mask| -> usize { crate::cecoh::mask_indices(s).iter().map(|&i| weights[i]).sum() };
            let levels: Vec<Subspace> = (0..=n + 1)
                .map(|p| {
                    let idx = (0..md).flat_map(|a| subsets.iter().filter(move |&&s| w(s) >= p).map(move |&s| (a, s)));
                    Subspace::coordinate(c.cochain_dim(n), idx.map(|(a, s)| c.basis().index(a, s)).collect::<Vec<_>>())
                })
                .collect();
            filt.push(levels);
        }
        let dims = (0..=top).map(|n| c.cochain_dim(n)).collect();
        let d = (0..=top).map(|n| c.differential(n)).collect();
        let mut fc = FilteredComplex::new(dims, d, filt)?;
        fc.source = Some(c.clone());
        Ok(fc)
    }

    pub fn top(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn dim(&self, n: usize) -> usize {
        self.dims.get(n).copied().unwrap_or(0)
    }

    pub fn differential(&self, n: usize) -> &RatMatrix {
        &self.d[n]
    }

    pub fn source(&self) -> Option<&CochainComplex> {
        self.source.as_ref()
    }

    /// `F^p C^n`, extended by `C^n` below zero and by `0` above `n + 1`.
    pub fn f(&self, p: isize, n: usize) -> Subspace {
        if n > self.top() {
            return Subspace::zero(0);
        }
        if p <= 0 {
            return Subspace::full(self.dims[n]);
        }
        let p = p as usize;
        if p > n + 1 {
            Subspace::zero(self.dims[n])
        } else {
            self.filt[n][p].clone()
        }
    }

    /// `E_0^{p,q}` dims: `dim F^p C^{p+q} - dim F^{p+1} C^{p+q}`.
    pub fn e0_dim(&self, p: usize, q: usize) -> usize {
        let n = p + q;
        self.f(p as isize, n).dim() - self.f(p as isize + 1, n).dim()
    }
}

/// Hochschild–Serre filtration of `C^*(g, M)` for `g` with `u` spanned by the
/// first `u_dim` basis vectors.
pub fn hs_filtration(g: &LieAlgebra, u_dim: usize, m: &LieModule) -> Result<FilteredComplex, SpecSeqError> {
    if u_dim > g.dim() || !g.has_prefix_ideal(u_dim) {
        return Err(SpecSeqError::BasisConvention(u_dim));
    }
    let c = build_complex(g, m)?;
    let weights: Vec<usize> = (0..g.dim()).map(|i| usize::from(i >= u_dim)).collect();
    FilteredComplex::by_weights(&c, &weights)
}

// ---------------------------------------------------------------------------
// pages

#[derive(Debug, Clone)]
pub struct Page {
    pub r: usize,
    pub cells: BTreeMap<(usize, usize), CohomologySpace>,
    /// `d_r: E_r^{p,q} → E_r^{p+r, q-r+1}`; zero-row matrices when the target is outside the quadrant.
    pub d: BTreeMap<(usize, usize), RatMatrix>,
}

impl Page {
    pub fn dim(&self, p: usize, q: usize) -> usize {
        self.cells.get(&(p, q)).map_or(0, CohomologySpace::dim)
    }

    pub fn is_zero_differential(&self) -> bool {
        self.d.values().all(RatMatrix::is_zero)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let cells: Vec<serde_json::Value> = self
            .cells
            .iter()
            .map(|(&(p, q), c)| {
                serde_json::json!({ "p": p, "q": q, "dim": c.dim(), "d_r_rank": self.d[&(p, q)].rank() })
            })
            .collect();
        serde_json::json!({ "r": self.r, "cells": cells })
    }
}

#[derive(Debug, Clone)]
pub struct SpectralSequence {
    pub pages: Vec<Page>,
    /// Smallest `r` from which every `d_s` vanishes.
    pub stabilized_at: usize,
    filtered: FilteredComplex,
}

impl SpectralSequence {
    pub fn page(&self, r: usize) -> &Page {
        &self.pages[r.min(self.pages.len() - 1)]
    }

    pub fn e_infinity(&self) -> &Page {
        self.pages.last().unwrap()
    }

    pub fn filtered(&self) -> &FilteredComplex {
        &self.filtered
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "pages": self.pages.iter().map(Page::to_json).collect::<Vec<_>>(),
            "stabilized_at": self.stabilized_at,
        })
    }
}

struct PageBuilder<'a> {
    fc: &'a FilteredComplex,
    z: HashMap<(isize, isize, usize), Subspace>,
}

impl<'a> PageBuilder<'a> {
    /// `Z_r^{p,n}`, with `Z_r = F^p` for `r < 0`.
    fn z(&mut self, r: isize, p: isize, n: usize) -> Subspace {
        if let Some(s) = self.z.get(&(r, p, n)) {
            return s.clone();
        }
        let f = self.fc.f(p, n);
        let out = if r < 0 || n >= self.fc.top() {
            f
        } else {
            let target = self.fc.f(p + r, n + 1);
            f.preimage_within(&self.fc.d[n], &target)
        };
        self.z.insert((r, p, n), out.clone());
        out
    }

    fn b(&mut self, r: isize, p: isize, n: usize) -> Subspace {
        let inner = self.z(r - 1, p + 1, n);
        if n == 0 {
            return inner;
        }
        let lower = self.z(r - 1, p - r + 1, n - 1);
        inner.sum(&lower.image_under(&self.fc.d[n - 1]))
    }

    fn page(&mut self, r: usize) -> Result<Page, SpecSeqError> {
        let top = self.fc.top();
        let ri = r as isize;
        let mut cells = BTreeMap::new();
        for n in 0..=top {
            for p in 0..=n {
                let z = self.z(ri, p as isize, n);
                let b = self.b(ri, p as isize, n);
                if !z.contains_subspace(&b) {
                    return Err(SpecSeqError::Internal(format!("B_{r} not inside Z_{r} at ({p}, {})", n - p)));
                }
                cells.insert((p, n - p), CohomologySpace::from_subspaces(n, z, b)?);
            }
        }
        let mut d = BTreeMap::new();
        for (&(p, q), cell) in &cells {
            let n = p + q;
            let target = if q + 1 >= r { cells.get(&(p + r, q + 1 - r)) } else { None };
            let mat = match target {
                Some(t) if n < top => {
                    let mut cols = Vec::new();
                    for x in &cell.representatives {
                        let dx = self.fc.d[n].mul_vec(x);
                        let c = t.class_of(&dx).ok_or_else(|| {
                            SpecSeqError::Internal(format!("d_{r} leaves Z_{r} at ({p}, {q})"))
                        })?;
                        cols.push(c);
                    }
                    RatMatrix::from_columns(&cols, t.dim())
                }
                Some(t) => RatMatrix::zeros(t.dim(), cell.dim()),
                None => RatMatrix::zeros(0, cell.dim()),
            };
            d.insert((p, q), mat);
        }
        Ok(Page { r, cells, d })
    }
}

/// All pages `E_0 … E_{r_max}`; `r_max` defaults to `top + 2`. Checks
/// `d_r ∘ d_r = 0` and `E_{r+1} ≅ H(E_r, d_r)` dimensionwise.
pub fn pages(fc: &FilteredComplex, r_max: Option<usize>) -> Result<SpectralSequence, SpecSeqError> {
    let r_max = r_max.unwrap_or(fc.top() + 2);
    let mut builder = PageBuilder { fc, z: HashMap::new() };
    let mut out: Vec<Page> = Vec::new();
    for r in 0..=r_max {
        let page = builder.page(r)?;
        for (&(p, q), m) in &page.d {
            if q + 1 >= r {
                if let Some(next) = page.d.get(&(p + r, q + 1 - r)) {
                    if m.rows() > 0 && next.cols() == m.rows() && !next.mul(m).is_zero() {
                        return Err(SpecSeqError::Internal(format!("d_{r} d_{r} != 0 at ({p}, {q})")));
                    }
                }
            }
        }
        if let Some(prev) = out.last() {
            let pr = prev.r;
            for (&(p, q), cell) in &page.cells {
                let ker = prev.d[&(p, q)].cols() - prev.d[&(p, q)].rank();
                let im = if p >= pr && q + pr >= 1 { prev.d.get(&(p - pr, q + pr - 1)).map_or(0, RatMatrix::rank) } else { 0 };
                if cell.dim() != ker - im {
                    return Err(SpecSeqError::Internal(format!(
                        "E_{r}^({p},{q}) has dim {} but H(E_{pr}) has dim {}",
                        cell.dim(),
                        ker - im
                    )));
                }
            }
        }
        out.push(page);
    }
    let stabilized_at = (0..=r_max).find(|&r| out[r..].iter().all(Page::is_zero_differential)).unwrap_or(r_max);
    Ok(SpectralSequence { pages: out, stabilized_at, filtered: fc.clone() })
}

// ---------------------------------------------------------------------------
// checks against the Lie algebra

fn t_dim_of(g: &LieAlgebra, u_dim: usize) -> usize {
    g.dim() - u_dim
}

/// Induced actions of the torus basis on `H^q(u, M)`.
fn torus_actions_on(
    cu: &CochainComplex,
    h: &CohomologySpace,
    g: &LieAlgebra,
    m: &LieModule,
) -> Result<Vec<RatMatrix>, SpecSeqError> {
    let u_dim = cu.algebra().dim();
    (u_dim..g.dim()).map(|x| Ok(induced_action(cu, h, g, m, x)?)).collect()
}

/// `H^p(t, V)` for abelian `t` acting on `V` by commuting matrices.
fn abelian_cohomology(actions: &[RatMatrix], dim: usize) -> Result<(CochainComplex, Vec<CohomologySpace>), SpecSeqError> {
    let t = LieAlgebra::abelian(actions.len());
    let module = LieModule::new(&t, dim, actions.to_vec())?;
    let c = build_complex(&t, &module)?;
    let s = all_cohomology(&c)?;
    Ok((c, s))
}

/// `dim E_2^{pq} = dim H^p(t, H^q(u, M)) = C(t_dim, p) · dim H^q(u, M)^t`.
pub fn e2_identification(
    ss: &SpectralSequence,
    g: &LieAlgebra,
    u_dim: usize,
    m: &LieModule,
) -> Result<Verdict, SpecSeqError> {
    let k = t_dim_of(g, u_dim);
    let u = g.prefix_subalgebra(u_dim);
    let cu = build_complex(&u, &m.restrict_prefix(u_dim))?;
    let e2 = ss.page(2);
    let mut table = Vec::new();
    let mut pass = true;
    for q in 0..=u_dim {
        let h = cohomology(&cu, q)?;
        let acts = torus_actions_on(&cu, &h, g, m)?;
        let (_, coh) = abelian_cohomology(&acts, h.dim())?;
        let inv = if acts.is_empty() {
            h.dim()
        } else {
            let rows: Vec<QVec> = acts.iter().flat_map(RatMatrix::to_rows).collect();
            kernel_basis(&RatMatrix::from_rows(rows, h.dim())?).dim()
        };
        for p in 0..=k {
            let direct = coh[p].dim();
            let formula = binomial(k, p) * inv;
            let page = e2.dim(p, q);
            let ok = direct == formula && page == direct;
            pass &= ok;
            table.push(serde_json::json!({ "p": p, "q": q, "e2": page, "koszul": direct, "binomial_times_invariants": formula }));
        }
    }
    // nothing outside 0 ≤ p ≤ t_dim, 0 ≤ q ≤ dim u
    for (&(p, q), c) in &e2.cells {
        if (p > k || q > u_dim) && c.dim() != 0 {
            pass = false;
            table.push(serde_json::json!({ "p": p, "q": q, "e2": c.dim(), "koszul": 0, "binomial_times_invariants": 0 }));
        }
    }
    Ok(Verdict::new("e2_identification", pass, serde_json::Value::Array(table)))
}

/// `Σ_p dim E_∞^{p,n-p} = dim H^n(g, M)` and the induced filtration on `H^n`
/// has subquotients of the `E_∞` dims.
pub fn abutment_check(ss: &SpectralSequence, g: &LieAlgebra, m: &LieModule) -> Result<Verdict, SpecSeqError> {
    let betti = betti_numbers(&build_complex(g, m)?)?;
    let fc = ss.filtered();
    let einf = ss.e_infinity();
    let mut pass = true;
    let mut rows = Vec::new();
    for n in 0..=fc.top() {
        let total: usize = (0..=n).map(|p| einf.dim(p, n - p)).sum();
        let z = kernel_basis(fc.differential(n));
        let b = if n == 0 { Subspace::zero(fc.dim(0)) } else { image_basis(fc.differential(n - 1)) };
        let fh = |p: usize| -> usize { fc.f(p as isize, n).intersection(&z).sum(&b).dim() - b.dim() };
        let sub: Vec<usize> = (0..=n).map(|p| fh(p) - fh(p + 1)).collect();
        let einf_row: Vec<usize> = (0..=n).map(|p| einf.dim(p, n - p)).collect();
        let ok = total == betti.get(n).copied().unwrap_or(0) && sub == einf_row;
        pass &= ok;
        rows.push(serde_json::json!({ "n": n, "e_infinity": einf_row, "filtration_quotients": sub, "betti": betti.get(n) }));
    }
    Ok(Verdict::new("abutment", pass, serde_json::Value::Array(rows)))
}

/// Leibniz rule `d_r(xy) = d_r(x) y + (-1)^{|x|} x d_r(y)` on page
/// representatives for `r = 0, 1, 2`, with trivial coefficients.
pub fn page_multiplicativity_check(ss: &SpectralSequence) -> Result<Verdict, SpecSeqError> {
    let c = ss
        .filtered()
        .source()
        .ok_or_else(|| SpecSeqError::Unsupported("filtered complex without cochain source".into()))?;
    if c.module().dim() != 1 || !c.module().is_trivial() {
        return Err(SpecSeqError::Unsupported("page products need trivial coefficients".into()));
    }
    let basis = c.basis();
    let pairing = Pairing::trivial();
    let top = c.top_degree();
    let mut checked = 0usize;
    let mut nonzero = Vec::new();
    for r in 0..=2usize.min(ss.pages.len() - 1) {
        let page = ss.page(r);
        let rep_of = |p: usize, q: usize, coords: &[Rational]| -> QVec {
            page.cells.get(&(p, q)).map_or_else(Vec::new, |cell| cell.cocycle_from(coords))
        };
        let d_of = |p: usize, q: usize, coords: &[Rational]| -> Option<(usize, usize, QVec)> {
            if q + 1 < r || !page.cells.contains_key(&(p + r, q + 1 - r)) {
                return None;
            }
            let m = &page.d[&(p, q)];
            Some((p + r, q + 1 - r, m.mul_vec(coords)))
        };
        for (&(p1, q1), c1) in &page.cells {
            for (&(p2, q2), c2) in &page.cells {
                let n1 = p1 + q1;
                let n2 = p2 + q2;
                if n1 + n2 > top || c1.dim() == 0 || c2.dim() == 0 {
                    continue;
                }
                let (p, q) = (p1 + p2, q1 + q2);
                let Some(prod_cell) = page.cells.get(&(p, q)) else { continue };
                for a in 0..c1.dim() {
                    for b in 0..c2.dim() {
                        let ea = crate::exactla::unit_vec(c1.dim(), a);
                        let eb = crate::exactla::unit_vec(c2.dim(), b);
                        let x = &c1.representatives[a];
                        let y = &c2.representatives[b];
                        let xy = cup(basis, x, n1, y, n2, &pairing);
                        let cls = prod_cell.class_of(&xy).ok_or_else(|| {
                            SpecSeqError::Internal(format!("product leaves Z_{r} at ({p}, {q})"))
                        })?;
                        if !crate::exactla::is_zero_vec(&cls) {
                            nonzero.push(serde_json::json!({ "r": r, "left": [p1, q1], "right": [p2, q2] }));
                        }
                        let lhs = d_of(p, q, &cls);
                        let Some((tp, tq, lhs)) = lhs else { continue };
                        let target = &page.cells[&(tp, tq)];
                        let mut rhs = zero_vec(target.dim());
                        if let Some((sp, sq, dx)) = d_of(p1, q1, &ea) {
                            let term = cup(basis, &rep_of(sp, sq, &dx), n1 + 1, y, n2, &pairing);
                            let t = target.class_of(&term).ok_or_else(|| SpecSeqError::Internal("d_r(x)y not in Z_r".into()))?;
                            crate::exactla::axpy(&mut rhs, &Rational::one(), &t);
                        }
                        if let Some((sp, sq, dy)) = d_of(p2, q2, &eb) {
                            let term = cup(basis, x, n1, &rep_of(sp, sq, &dy), n2 + 1, &pairing);
                            let t = target.class_of(&term).ok_or_else(|| SpecSeqError::Internal("x d_r(y) not in Z_r".into()))?;
                            let sign = if n1 % 2 == 0 { Rational::one() } else { -Rational::one() };
                            crate::exactla::axpy(&mut rhs, &sign, &t);
                        }
                        checked += 1;
                        if lhs != rhs {
                            return Ok(Verdict::new(
                                "page_multiplicativity",
                                false,
                                serde_json::json!({ "r": r, "left": [p1, q1, a], "right": [p2, q2, b] }),
                            ));
                        }
                    }
                }
            }
        }
    }
    Ok(Verdict::new(
        "page_multiplicativity",
        true,
        serde_json::json!({ "checked_pairs": checked, "nonzero_products": nonzero }),
    ))
}

// ---------------------------------------------------------------------------
// comparison with the group side

/// The map `f_2` between the Lie and group `E_2` pages, per `(p, q)`.
#[derive(Debug, Clone)]
pub struct ComparisonReport {
    pub verdict: Verdict,
    pub f2: BTreeMap<(usize, usize), RatMatrix>,
}

fn refused(reason: &str, d: &DenseSubgroupData, g_dim: usize, extra: serde_json::Value) -> ComparisonReport {
    ComparisonReport {
        verdict: Verdict::new(
            "comparison",
            false,
            serde_json::json!({
                "refused": reason,
                "declared_hirsch_length": declared_hirsch_length(d),
                "lie_hirsch_length": g_dim,
                "certificate": extra,
            }),
        ),
        f2: BTreeMap::new(),
    }
}

/// Projection onto the joint kernel of `ops` along the other joint eigenspaces.
fn weight_zero_projection(ops: &[RatMatrix], dim: usize) -> Result<RatMatrix, SpecSeqError> {
    if ops.is_empty() {
        return Ok(RatMatrix::identity(dim));
    }
    if dim == 0 {
        return Ok(RatMatrix::zeros(0, 0));
    }
    let parts = simultaneous_eigenspaces(ops, dim)?;
    let mut cols = Vec::new();
    let mut diag = Vec::new();
    for (w, s) in &parts {
        let zero = w.iter().all(Zero::is_zero);
        for b in s.basis() {
            cols.push(b.clone());
            diag.push(if zero { Rational::one() } else { Rational::zero() });
        }
    }
    let s = RatMatrix::from_columns(&cols, dim);
    Ok(s.mul(&RatMatrix::diagonal(&diag)).mul(&s.inverse().expect("eigenspaces span")))
}

/// Builds `f_2` from the identity on `H^q(u, M)` and the identification of
/// `∧^p t^*` with the Koszul exterior generators of `Z^k`; PASS iff every
/// component is an isomorphism and the abutment dims agree with the Wang model.
pub fn comparison(
    ss: &SpectralSequence,
    g: &LieAlgebra,
    d: &DenseSubgroupData,
    m: &LieModule,
) -> Result<ComparisonReport, SpecSeqError> {
    let u_dim = d.u().dim();
    let dense = is_zariski_dense_unipotent(d).map_err(GroupCohError::from)?;
    if dense.verdict != Decision::Yes {
        return Ok(refused("unipotent density", d, g.dim(), serde_json::to_value(&dense).unwrap()));
    }
    let disc = torus_discreteness_in_hull(d).map_err(GroupCohError::from)?;
    if disc.verdict != Decision::Yes {
        return Ok(refused("discreteness", d, g.dim(), serde_json::to_value(&disc).unwrap()));
    }
    let tdense = torus_density_in_hull(d).map_err(GroupCohError::from)?;
    if tdense.verdict != Decision::Yes {
        return Ok(refused("torus density", d, g.dim(), serde_json::to_value(&tdense).unwrap()));
    }
    if !d.automorphisms.is_empty() {
        return Ok(refused("not Q-split", d, g.dim(), serde_json::json!("extra automorphisms")));
    }
    let k = t_dim_of(g, u_dim);
    if d.torus_gens.len() != k {
        return Ok(refused("torus rank", d, g.dim(), serde_json::json!({ "generators": d.torus_gens.len(), "t_dim": k })));
    }
    let uc = unipotent_group_cohomology(d, m)?;
    let e2 = ss.page(2);
    let mut f2 = BTreeMap::new();
    let mut table = Vec::new();
    let mut pass = true;
    for (q, h) in uc.spaces.iter().enumerate() {
        let acts = torus_actions_on(&uc.complex, h, g, m)?;
        let (lie_c, lie_h) = abelian_cohomology(&acts, h.dim())?;
        let group_ops: Vec<RatMatrix> = uc.operators.iter().map(|(_, mats)| mats[q].clone()).collect();
        let group = koszul_zk_cohomology(h.dim(), &group_ops)?;
        let p0 = weight_zero_projection(&acts, h.dim())?;
        let ext = lie_c.basis();
        for p in 0..=k {
            let count = ext.count(p);
            let mut cols = Vec::new();
            for rep in &lie_h[p].representatives {
                let mut v = zero_vec(rep.len());
                for s in 0..count {
                    for a in 0..h.dim() {
                        for b in 0..h.dim() {
                            if !p0[(a, b)].is_zero() {
                                v[a * count + s] += &p0[(a, b)] * &rep[b * count + s];
                            }
                        }
                    }
                }
                let cls = group.spaces[p]
                    .class_of(&v)
                    .ok_or_else(|| SpecSeqError::Internal("projected class is not a Koszul cocycle".into()))?;
                cols.push(cls);
            }
            let mat = RatMatrix::from_columns(&cols, group.spaces[p].dim());
            let iso = mat.rows() == mat.cols() && mat.rank() == mat.rows();
            let page_ok = e2.dim(p, q) == lie_h[p].dim();
            pass &= iso && page_ok;
            table.push(serde_json::json!({
                "p": p, "q": q, "lie_e2": lie_h[p].dim(), "group_e2": group.spaces[p].dim(),
                "rank": mat.rank(), "page_dim": e2.dim(p, q),
            }));
            f2.insert((p, q), mat);
        }
    }
    let lie_betti = betti_numbers(&build_complex(g, m)?)?;
    let model = wang_tower(d, m)?;
    let abut = lie_betti == model.dims;
    pass &= abut;
    Ok(ComparisonReport {
        verdict: Verdict::new(
            "comparison",
            pass,
            serde_json::json!({ "f2": table, "lie_dims": lie_betti, "group_dims": model.dims }),
        ),
        f2,
    })
}

/// Ring map `Φ: H^*(g, Q) → H^*(Γ, Q)` in bases, with multiplicativity and
/// bijectivity verdict.
#[derive(Debug, Clone)]
pub struct PhiReport {
    pub maps: Vec<RatMatrix>,
    pub verdict: Verdict,
}

/// Extends a cochain on `u` by zero on arguments from `t`.
fn extend_to(cu: &CochainComplex, cg: &CochainComplex, degree: usize, v: &[Rational]) -> QVec {
    let mut out = zero_vec(cg.cochain_dim(degree));
    for (idx, c) in v.iter().enumerate() {
        if !c.is_zero() {
            let (a, mask) = cu.basis().unindex(degree, idx);
            out[cg.basis().index(a, mask)] = c.clone();
        }
    }
    out
}

/// `e^S` for `S` a subset of the torus basis (`s` indexes `{0..t_dim}`).
fn torus_cochain(cg: &CochainComplex, u_dim: usize, s: Mask) -> QVec {
    let mask = s << u_dim;
    let n = mask.count_ones() as usize;
    let mut out = zero_vec(cg.basis().count(n));
    out[cg.basis().position(mask)] = Rational::one();
    out
}

pub fn phi_ring_map(g: &LieAlgebra, d: &DenseSubgroupData, m: &LieModule) -> Result<PhiReport, SpecSeqError> {
    if m.dim() != 1 || !m.is_trivial() {
        return Err(SpecSeqError::Unsupported("ring map needs trivial coefficients".into()));
    }
    let u_dim = d.u().dim();
    let k = t_dim_of(g, u_dim);
    let model = wang_tower(d, m)?;
    let (Some(gring), Some(gcoords)) = (model.ring.as_ref(), model.invariant_coords.as_ref()) else {
        return Err(SpecSeqError::Unsupported(
            model.ring_note.clone().unwrap_or_else(|| "group ring unavailable".into()),
        ));
    };
    if d.torus_gens.len() != k || !d.automorphisms.is_empty() {
        return Err(SpecSeqError::Unsupported("group operators do not match the torus of g".into()));
    }
    let uc = unipotent_group_cohomology(d, m)?;
    let cu = &uc.complex;
    let cg = build_complex(g, m)?;
    let gspaces = all_cohomology(&cg)?;
    let lring = ring_structure(&cg)?;
    let inv = invariant_subcomplex_cohomology(cu, g, m)?;
    let ext = ExteriorBasis::new(k);
    let pairing = Pairing::trivial();
    let top = g.dim();
    // identification of Lie invariant representatives with group invariant coordinates
    let mut iota = Vec::new();
    for (i, reps) in inv.iter().enumerate() {
        let mut cols = Vec::new();
        for x in reps {
            let cls = uc.spaces[i].class_of(x).ok_or_else(|| SpecSeqError::Internal("invariant rep not a cocycle".into()))?;
            let c = gcoords[i].coordinates(&cls).ok_or_else(|| {
                SpecSeqError::Internal(format!("t-invariant class in degree {i} is not fixed by Γ_T"))
            })?;
            cols.push(c);
        }
        iota.push(RatMatrix::from_columns(&cols, gcoords[i].dim()));
    }
    let mut maps = Vec::new();
    let mut pass = true;
    let mut notes = Vec::new();
    for n in 0..=top {
        let mut kcols = Vec::new();
        let mut layout = Vec::new();
        for i in 0..=n.min(u_dim) {
            let j = n - i;
            if j > k {
                continue;
            }
            for (p, x) in inv[i].iter().enumerate() {
                let xe = extend_to(cu, &cg, i, x);
                for (q, &s) in ext.subsets(j).iter().enumerate() {
                    let prod = cup(cg.basis(), &xe, i, &torus_cochain(&cg, u_dim, s), j, &pairing);
                    let cls = gspaces[n].class_of(&prod).ok_or_else(|| SpecSeqError::Internal("product not a cocycle".into()))?;
                    kcols.push(cls);
                    layout.push((i, p, q));
                }
            }
        }
        let kmat = RatMatrix::from_columns(&kcols, gspaces[n].dim());
        let Some(kinv) = kmat.inverse() else {
            pass = false;
            notes.push(format!("decomposition map not invertible in degree {n}"));
            maps.push(RatMatrix::zeros(gring.dim(n), gspaces[n].dim()));
            continue;
        };
        // Lie tensor coordinates -> group tensor coordinates
        let mut ident = RatMatrix::zeros(gring.dim(n), layout.len());
        let mut offsets = BTreeMap::new();
        let mut acc = 0;
        for i in 0..=n.min(top) {
            offsets.insert(i, acc);
            if n - i <= k && i < gcoords.len() {
                acc += gcoords[i].dim() * ext.count(n - i);
            }
        }
        for (col, &(i, p, q)) in layout.iter().enumerate() {
            let cq = ext.count(n - i);
            for pp in 0..iota[i].rows() {
                let v = &iota[i][(pp, p)];
                if !v.is_zero() {
                    ident[(offsets[&i] + pp * cq + q, col)] = v.clone();
                }
            }
        }
        maps.push(ident.mul(&kinv));
    }
    let iso = pass && lring.is_isomorphism(gring, &maps);
    Ok(PhiReport {
        maps,
        verdict: Verdict::new(
            "phi_ring_map",
            iso,
            serde_json::json!({ "lie_dims": lring.dims(), "group_dims": gring.dims(), "notes": notes }),
        ),
    })
}

// ---------------------------------------------------------------------------
// decomposition

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KunnethRow {
    pub i: usize,
    pub j: usize,
    pub invariant_dim: usize,
    pub exterior_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KunnethReport {
    pub degree: usize,
    pub rows: Vec<KunnethRow>,
    pub total: usize,
    pub lie_dim: usize,
    /// Rank of `⊕ H^i(u, M)^t ⊗ ∧^j t^* → H^n(g, M)`.
    pub map_rank: usize,
    pub sign_rule: bool,
    pub sign_pairs_checked: usize,
    /// Kernel of `H^n(u, M)^t → H^n(u, M)`.
    pub restriction_kernel: usize,
    pub pass: bool,
}

/// `Σ_{i+j=n} dim H^i(u, M)^t · C(t_dim, j) = dim H^n(g, M)`, realized by the
/// cup-product map, with the sign rule
/// `(x ∪ a) ∪ (b ∪ c) = (-1)^{|a||b|} (x ∪ b) ∪ (a ∪ c)` on representatives.
pub fn kunneth_decomposition(
    g: &LieAlgebra,
    u_dim: usize,
    m: &LieModule,
    n: usize,
) -> Result<KunnethReport, SpecSeqError> {
    if !g.has_prefix_ideal(u_dim) {
        return Err(SpecSeqError::BasisConvention(u_dim));
    }
    let k = t_dim_of(g, u_dim);
    let u = g.prefix_subalgebra(u_dim);
    let cu = build_complex(&u, &m.restrict_prefix(u_dim))?;
    check_ambient(&cu, g, m)?;
    let cg = build_complex(g, m)?;
    let inv = invariant_subcomplex_cohomology(&cu, g, m)?;
    let inv_dims: Vec<usize> = invariant_cohomology(&cu, g, m)?.iter().map(|c| c.dim()).collect();
    if inv_dims != inv.iter().map(Vec::len).collect::<Vec<_>>() {
        return Err(SpecSeqError::Internal("invariant subcomplex and invariant classes disagree".into()));
    }
    let hn = cohomology(&cg, n)?;
    let ext = ExteriorBasis::new(k);
    let md = m.dim();
    let scalar = Pairing::scalar_right(md);
    let mut rows = Vec::new();
    let mut cols = Vec::new();
    for i in 0..=n.min(u_dim) {
        let j = n - i;
        if j > k {
            continue;
        }
        rows.push(KunnethRow { i, j, invariant_dim: inv[i].len(), exterior_dim: binomial(k, j) });
        for x in &inv[i] {
            let xe = extend_to(&cu, &cg, i, x);
            for &s in ext.subsets(j) {
                let prod = cup(cg.basis(), &xe, i, &torus_cochain(&cg, u_dim, s), j, &scalar);
                cols.push(hn.class_of(&prod).ok_or_else(|| SpecSeqError::Internal("product not a cocycle".into()))?);
            }
        }
    }
    let total: usize = rows.iter().map(|r| r.invariant_dim * r.exterior_dim).sum();
    let map_rank = if cols.is_empty() { 0 } else { RatMatrix::from_columns(&cols, hn.dim()).rank() };

    // sign rule against trivial-coefficient invariant classes
    let trivial_g = LieModule::trivial(g);
    let cu_q = build_complex(&u, &trivial_g.restrict_prefix(u_dim))?;
    let cg_q = build_complex(g, &trivial_g)?;
    let inv_q = invariant_subcomplex_cohomology(&cu_q, g, &trivial_g)?;
    let mut sign_rule = true;
    let mut checked = 0;
    let qq = Pairing::trivial();
    for i in 0..=n.min(u_dim) {
        for j in 0..=(n - i).min(k) {
            for l in 0..=(n - i - j).min(u_dim) {
                let p = n - i - j - l;
                if p > k {
                    continue;
                }
                for x in &inv[i] {
                    let xe = extend_to(&cu, &cg, i, x);
                    for b in &inv_q[l] {
                        let be = extend_to(&cu_q, &cg_q, l, b);
                        for &sa in ext.subsets(j) {
                            let a = torus_cochain(&cg, u_dim, sa);
                            for &sc in ext.subsets(p) {
                                let c = torus_cochain(&cg, u_dim, sc);
                                let xa = cup(cg.basis(), &xe, i, &a, j, &scalar);
                                let bc = cup(cg.basis(), &be, l, &c, p, &qq);
                                let lhs = cup(cg.basis(), &xa, i + j, &bc, l + p, &scalar);
                                let xb = cup(cg.basis(), &xe, i, &be, l, &scalar);
                                let ac = cup(cg.basis(), &a, j, &c, p, &qq);
                                let mut rhs = cup(cg.basis(), &xb, i + l, &ac, j + p, &scalar);
                                if (j * l) % 2 == 1 {
                                    rhs.iter_mut().for_each(|v| *v = -v.clone());
                                }
                                checked += 1;
                                if lhs != rhs {
                                    sign_rule = false;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let _ = md;

    // restriction to H^n(u, M)
    let hu = cohomology(&cu, n)?;
    let restriction_kernel = if n > u_dim || inv[n].is_empty() {
        0
    } else {
        let rc: Vec<QVec> = inv[n]
            .iter()
            .map(|x| hu.class_of(x).ok_or_else(|| SpecSeqError::Internal("invariant rep not a cocycle".into())))
            .collect::<Result<_, _>>()?;
        rc.len() - RatMatrix::from_columns(&rc, hu.dim()).rank()
    };
    let lie_dim = hn.dim();
    let pass = total == lie_dim && map_rank == lie_dim && sign_rule && restriction_kernel == 0;
    Ok(KunnethReport {
        degree: n,
        rows,
        total,
        lie_dim,
        map_rank,
        sign_rule,
        sign_pairs_checked: checked,
        restriction_kernel,
        pass,
    })
}

/// Injectivity of `H^*(u, M)^t → H^*(u, M)` in every degree.
pub fn restriction_check(g: &LieAlgebra, u_dim: usize, m: &LieModule) -> Result<Verdict, SpecSeqError> {
    let u = g.prefix_subalgebra(u_dim);
    let cu = build_complex(&u, &m.restrict_prefix(u_dim))?;
    let inv = invariant_subcomplex_cohomology(&cu, g, m)?;
    let mut kernels = Vec::new();
    for (n, reps) in inv.iter().enumerate() {
        let h = cohomology(&cu, n)?;
        let cls: Vec<QVec> = reps
            .iter()
            .map(|x| h.class_of(x).ok_or_else(|| SpecSeqError::Internal("invariant rep not a cocycle".into())))
            .collect::<Result<_, _>>()?;
        let rank = if cls.is_empty() { 0 } else { RatMatrix::from_columns(&cls, h.dim()).rank() };
        kernels.push(cls.len() - rank);
    }
    let pass = kernels.iter().all(|&k| k == 0);
    Ok(Verdict::new(
        "restriction_injective",
        pass,
        serde_json::json!({ "invariant_dims": inv.iter().map(Vec::len).collect::<Vec<_>>(), "kernel_dims": kernels }),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::int;
    use crate::grouphull::fixtures::*;
    use crate::liealg::fixtures::*;
    use crate::liealg::{semidirect, SemidirectPresentation};

    fn hull(p: &SemidirectPresentation) -> (LieAlgebra, LieModule) {
        let g = semidirect(p).unwrap();
        let m = LieModule::trivial(&g);
        (g, m)
    }

    #[test]
    fn hs_examples() {
        let (g, m) = hull(&bs_presentation());
        let fc = hs_filtration(&g, 1, &m).unwrap();
        // C^1 basis: u*, D*
        assert_eq!(fc.f(1, 1), Subspace::coordinate(2, [1]));
        assert!(fc.f(2, 1).is_zero());
        assert_eq!(fc.e0_dim(0, 1), 1);

        let a = LieAlgebra::abelian(2);
        let fc = hs_filtration(&a, 2, &LieModule::trivial(&a)).unwrap();
        for n in 0..=2 {
            assert_eq!(fc.f(0, n).dim(), fc.dim(n));
            assert!(fc.f(1, n).is_zero());
        }

        let (g, m) = hull(&heis_presentation());
        let fc = hs_filtration(&g, 3, &m).unwrap();
        assert_eq!(fc.f(1, 2).dim(), 3);

        let swapped = LieAlgebra::new(vec!["D".into(), "u".into()], vec![(0, 1, vec![int(0), int(1)])]).unwrap();
        assert!(matches!(
            hs_filtration(&swapped, 1, &LieModule::trivial(&swapped)),
            Err(SpecSeqError::BasisConvention(1))
        ));
    }

    #[test]
    fn bs_pages() {
        let (g, m) = hull(&bs_presentation());
        let ss = pages(&hs_filtration(&g, 1, &m).unwrap(), None).unwrap();
        let e2 = ss.page(2);
        assert_eq!((e2.dim(0, 0), e2.dim(1, 0), e2.dim(0, 1), e2.dim(1, 1)), (1, 1, 0, 0));
        assert!(ss.stabilized_at <= 2);
        assert!(e2_identification(&ss, &g, 1, &m).unwrap().pass);
        assert!(abutment_check(&ss, &g, &m).unwrap().pass);
        assert!(page_multiplicativity_check(&ss).unwrap().pass);
        let js = e2.to_json();
        assert_eq!(js["r"], 2);
    }

    #[test]
    fn heis_pages() {
        let (g, m) = hull(&heis_presentation());
        let ss = pages(&hs_filtration(&g, 3, &m).unwrap(), None).unwrap();
        let e2 = ss.page(2);
        let nonzero: Vec<(usize, usize, usize)> =
            e2.cells.iter().filter(|(_, c)| c.dim() > 0).map(|(&(p, q), c)| (p, q, c.dim())).collect();
        assert_eq!(nonzero, vec![(0, 0, 1), (1, 0, 1)]);
        assert!(e2_identification(&ss, &g, 3, &m).unwrap().pass);
        assert!(abutment_check(&ss, &g, &m).unwrap().pass);
        assert!(page_multiplicativity_check(&ss).unwrap().pass);
    }

    #[test]
    fn zero_differential_pages_are_constant() {
        let a = LieAlgebra::abelian(3);
        let m = LieModule::trivial(&a);
        let ss = pages(&hs_filtration(&a, 3, &m).unwrap(), None).unwrap();
        for r in 0..ss.pages.len() {
            for (&(p, q), c) in &ss.page(r).cells {
                assert_eq!(c.dim(), ss.page(0).dim(p, q));
            }
        }
        assert_eq!(ss.stabilized_at, 0);
        assert!(e2_identification(&ss, &a, 3, &m).unwrap().pass);
    }

    #[test]
    fn nonzero_page_product() {
        // u = Q, t = Q acting trivially
        let p = SemidirectPresentation::new(LieAlgebra::abelian(1), vec![RatMatrix::zeros(1, 1)]);
        let (g, m) = hull(&p);
        let ss = pages(&hs_filtration(&g, 1, &m).unwrap(), None).unwrap();
        let v = page_multiplicativity_check(&ss).unwrap();
        assert!(v.pass);
        let nz = v.witness["nonzero_products"].as_array().unwrap();
        assert!(nz.iter().any(|w| w["left"] == serde_json::json!([1, 0]) && w["right"] == serde_json::json!([0, 1])));
    }

    #[test]
    fn comparison_examples() {
        let d = bs_model(2);
        let (g, m) = hull(&d.hull);
        let ss = pages(&hs_filtration(&g, 1, &m).unwrap(), None).unwrap();
        let rep = comparison(&ss, &g, &d, &m).unwrap();
        assert!(rep.verdict.pass, "{:?}", rep.verdict);
        let again = comparison(&ss, &g, &d, &m).unwrap();
        assert_eq!(rep.f2, again.f2);

        let d = heis_model(2);
        let (g, m) = hull(&d.hull);
        let ss = pages(&hs_filtration(&g, 3, &m).unwrap(), None).unwrap();
        assert!(comparison(&ss, &g, &d, &m).unwrap().verdict.pass);

        let mut multi = bs_model(2);
        multi.torus_gens = vec![vec![int(2)], vec![int(3)]];
        let (g, m) = hull(&multi.hull);
        let ss = pages(&hs_filtration(&g, 1, &m).unwrap(), None).unwrap();
        let rep = comparison(&ss, &g, &multi, &m).unwrap();
        assert!(!rep.verdict.pass);
        assert_eq!(rep.verdict.witness["refused"], "discreteness");
        assert_eq!(rep.verdict.witness["declared_hirsch_length"], 3);
        assert_eq!(rep.verdict.witness["lie_hirsch_length"], 2);
    }

    #[test]
    fn phi_examples() {
        for d in [bs_model(2), bs_model(5), heis_model(2)] {
            let (g, m) = hull(&d.hull);
            let rep = phi_ring_map(&g, &d, &m).unwrap();
            assert!(rep.verdict.pass, "{:?}", rep.verdict);
        }
        let a = SemidirectPresentation::new(LieAlgebra::abelian(3), vec![]);
        let gens = (0..3).map(|i| crate::grouphull::DeltaGen::Log(crate::exactla::unit_vec(3, i))).collect();
        let d = DenseSubgroupData::new(a, gens, vec![]);
        let (g, m) = hull(&d.hull);
        let rep = phi_ring_map(&g, &d, &m).unwrap();
        assert!(rep.verdict.pass);
        assert!(rep.maps.iter().enumerate().all(|(n, mm)| *mm == RatMatrix::identity(binomial(3, n))));
    }

    #[test]
    fn kunneth_examples() {
        let (g, m) = hull(&heis_presentation());
        let r = kunneth_decomposition(&g, 3, &m, 1).unwrap();
        assert_eq!(r.rows, vec![
            KunnethRow { i: 0, j: 1, invariant_dim: 1, exterior_dim: 1 },
            KunnethRow { i: 1, j: 0, invariant_dim: 0, exterior_dim: 1 },
        ]);
        assert_eq!((r.total, r.lie_dim), (1, 1));
        assert!(r.pass);
        let (g, m) = hull(&bs_presentation());
        let r = kunneth_decomposition(&g, 1, &m, 2).unwrap();
        assert_eq!((r.total, r.lie_dim), (0, 0));
        let h3 = LieAlgebra::heisenberg();
        let m = LieModule::trivial(&h3);
        for n in 0..=3 {
            let r = kunneth_decomposition(&h3, 3, &m, n).unwrap();
            assert_eq!(r.total, r.lie_dim);
            assert!(r.pass);
        }
    }

    #[test]
    fn weight_module_decomposition() {
        let (g, _) = hull(&bs_presentation());
        let m = LieModule::new(
            &g,
            2,
            vec![RatMatrix::from_i64(&[&[0, 0], &[1, 0]]), RatMatrix::from_i64(&[&[0, 0], &[0, 1]])],
        )
        .unwrap();
        let betti = betti_numbers(&build_complex(&g, &m).unwrap()).unwrap();
        for n in 0..=2 {
            let r = kunneth_decomposition(&g, 1, &m, n).unwrap();
            assert_eq!(r.total, betti[n]);
            assert!(r.pass, "{r:?}");
        }
        assert!(restriction_check(&g, 1, &m).unwrap().pass);
        let ss = pages(&hs_filtration(&g, 1, &m).unwrap(), None).unwrap();
        assert!(e2_identification(&ss, &g, 1, &m).unwrap().pass);
        assert!(abutment_check(&ss, &g, &m).unwrap().pass);
    }
}
