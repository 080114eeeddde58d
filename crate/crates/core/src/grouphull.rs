//! Desk-scale models of dense subgroups `Γ = Δ ⋊ Γ_T` of `G = U ⋊ T` and
//! certificates for the hypotheses they are meant to satisfy.
//!
//! `Δ` is given by generators in `U(Q)`, either as log coordinates in `u` or as
//! unipotent matrices in a stated faithful representation. Each generator of
//! `Γ_T` is given by the scalars it induces on the torus weight spaces of `u`,
//! listed in lexicographic weight order.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exactla::{
    factor_integer, kernel_basis, prime_bound, rat_pow, solve, to_ratstr, valuation, LinAlgError, QVec, RatMatrix,
    RatStr, Rational, Subspace,
};
use crate::liealg::{LieAlgebra, LieError, SemidirectPresentation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HullError {
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
    #[error("matrix is not unipotent")]
    NotUnipotent,
    #[error("u is not nilpotent")]
    NotNilpotent,
    #[error("representation: {0}")]
    Representation(String),
    #[error("torus generator {index}: {reason}")]
    TorusGenerator { index: usize, reason: String },
    #[error("automorphism {index}: {reason}")]
    Automorphism { index: usize, reason: String },
    #[error("Δ is not Zariski dense in U: its Lie closure has dimension {closure} < {dim}")]
    NotDense { closure: usize, dim: usize },
    #[error(
        "Hirsch length undefined: torus part is not free abelian of the declared rank \
         (discreteness {verdict:?}; declared Hirsch length {declared}); see torus_discreteness_check"
    )]
    Hirsch { declared: usize, verdict: Decision },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Decision {
    Yes,
    No,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeltaGen {
    Log(QVec),
    Matrix(RatMatrix),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseSubgroupData {
    pub hull: SemidirectPresentation,
    /// Matrices of the `u` basis in a faithful representation; needed only
    /// for matrix generators.
    pub representation: Vec<RatMatrix>,
    pub delta_gens: Vec<DeltaGen>,
    pub torus_gens: Vec<QVec>,
    /// Extra automorphisms of `u` acting on `Δ`, seen only on the group side.
    pub automorphisms: Vec<RatMatrix>,
    pub labels: Vec<String>,
}

impl DenseSubgroupData {
    pub fn new(hull: SemidirectPresentation, delta_gens: Vec<DeltaGen>, torus_gens: Vec<QVec>) -> Self {
        let labels = (0..delta_gens.len()).map(|i| format!("g{i}")).collect();
        DenseSubgroupData { hull, representation: Vec::new(), delta_gens, torus_gens, automorphisms: Vec::new(), labels }
    }

    pub fn with_representation(mut self, rep: Vec<RatMatrix>) -> Self {
        self.representation = rep;
        self
    }

    pub fn with_automorphisms(mut self, autos: Vec<RatMatrix>) -> Self {
        self.automorphisms = autos;
        self
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        self.labels = labels;
        self
    }

    pub fn u(&self) -> &LieAlgebra {
        &self.hull.u
    }

    pub fn delta_logs(&self) -> Result<Vec<QVec>, HullError> {
        self.delta_gens
            .iter()
            .map(|g| match g {
                DeltaGen::Log(v) => {
                    if v.len() != self.u().dim() {
                        return Err(HullError::Representation(format!(
                            "log vector of length {} in a {}-dimensional algebra",
                            v.len(),
                            self.u().dim()
                        )));
                    }
                    Ok(v.clone())
                }
                DeltaGen::Matrix(m) => log_coordinates(m, &self.representation),
            })
            .collect()
    }

    /// Joint weight spaces of the torus on `u`, lexicographic order.
    pub fn weights(&self) -> Result<Vec<(QVec, Subspace)>, HullError> {
        Ok(crate::liealg::weight_decomposition(&self.hull)?)
    }

    /// The automorphism of `u` induced by torus generator `i`.
    pub fn torus_automorphism(&self, i: usize) -> Result<RatMatrix, HullError> {
        let weights = self.weights()?;
        let v = &self.torus_gens[i];
        if v.len() != weights.len() {
            return Err(HullError::TorusGenerator {
                index: i,
                reason: format!("{} multipliers for {} weight spaces", v.len(), weights.len()),
            });
        }
        if v.iter().any(Zero::is_zero) {
            return Err(HullError::TorusGenerator { index: i, reason: "zero multiplier".into() });
        }
        let n = self.u().dim();
        let mut cols = Vec::new();
        let mut diag = Vec::new();
        for ((_, space), c) in weights.iter().zip(v) {
            for b in space.basis() {
                cols.push(b.clone());
                diag.push(c.clone());
            }
        }
        let s = RatMatrix::from_columns(&cols, n);
        let a = s.mul(&RatMatrix::diagonal(&diag)).mul(&s.inverse().expect("weight spaces span u"));
        if !is_automorphism(self.u(), &a) {
            return Err(HullError::TorusGenerator {
                index: i,
                reason: "multipliers do not define an automorphism of u".into(),
            });
        }
        Ok(a)
    }

    /// Torus automorphisms followed by the extra automorphisms, with labels.
    pub fn group_operators(&self) -> Result<Vec<(String, RatMatrix)>, HullError> {
        let mut out = Vec::new();
        for i in 0..self.torus_gens.len() {
            out.push((format!("t{i}"), self.torus_automorphism(i)?));
        }
        for (i, a) in self.automorphisms.iter().enumerate() {
            let n = self.u().dim();
            if a.rows() != n || a.cols() != n || a.inverse().is_none() {
                return Err(HullError::Automorphism { index: i, reason: format!("not an invertible {n}x{n} matrix") });
            }
            if !is_automorphism(self.u(), a) {
                return Err(HullError::Automorphism { index: i, reason: "does not preserve brackets".into() });
            }
            out.push((format!("a{i}"), a.clone()));
        }
        Ok(out)
    }
}

pub fn is_automorphism(u: &LieAlgebra, a: &RatMatrix) -> bool {
    let n = u.dim();
    (0..n).all(|i| {
        (i + 1..n).all(|j| a.mul_vec(&u.bracket_basis(i, j)) == u.bracket(&a.col(i), &a.col(j)))
    })
}

fn nilpotent_part(m: &RatMatrix) -> Result<RatMatrix, HullError> {
    if !m.is_square() {
        return Err(HullError::NotUnipotent);
    }
    let n = m.sub(&RatMatrix::identity(m.rows()));
    if !n.pow(m.rows() as u32).is_zero() {
        return Err(HullError::NotUnipotent);
    }
    Ok(n)
}

/// `log(I + N) = Σ (-1)^{k+1} N^k / k`, a finite sum for nilpotent `N`.
pub fn unipotent_log(m: &RatMatrix) -> Result<RatMatrix, HullError> {
    let n = nilpotent_part(m)?;
    let mut out = RatMatrix::zeros(m.rows(), m.cols());
    let mut pow = n.clone();
    for k in 1..m.rows().max(1) {
        let c = Rational::new(if k % 2 == 1 { 1.into() } else { (-1).into() }, k.into());
        out = out.add(&pow.scale(&c));
        pow = pow.mul(&n);
    }
    Ok(out)
}

/// `exp(N) = Σ N^k / k!` for nilpotent `N`.
pub fn unipotent_exp(n: &RatMatrix) -> RatMatrix {
    let size = n.rows();
    let mut out = RatMatrix::identity(size);
    let mut term = RatMatrix::identity(size);
    for k in 1..=size {
        term = term.mul(n).scale(&Rational::new(1.into(), k.into()));
        if term.is_zero() {
            break;
        }
        out = out.add(&term);
    }
    out
}

/// Coordinates of `log m` in the basis given by `rep`.
pub fn log_coordinates(m: &RatMatrix, rep: &[RatMatrix]) -> Result<QVec, HullError> {
    let l = unipotent_log(m)?;
    if rep.is_empty() {
        return Err(HullError::Representation("matrix generator without a representation".into()));
    }
    if rep.iter().any(|r| r.rows() != l.rows() || r.cols() != l.cols()) {
        return Err(HullError::Representation("generator size differs from the representation".into()));
    }
    let flat = |x: &RatMatrix| -> QVec { x.to_rows().concat() };
    let a = RatMatrix::from_columns(&rep.iter().map(flat).collect::<Vec<_>>(), l.rows() * l.cols());
    solve(&a, &flat(&l)).ok_or_else(|| HullError::Representation("log does not lie in the image of u".into()))
}

// ---------------------------------------------------------------------------
// density of Δ

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BracketWord {
    pub word: String,
    pub log: Vec<RatStr>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DensityCertificate {
    pub verdict: Decision,
    pub closure_dim: usize,
    pub ambient_dim: usize,
    /// Bracket words whose logs form a basis of the Lie closure.
    pub witness: Vec<BracketWord>,
}

/// Lie closure of the generator logs: YES iff it is all of `u`.
pub fn is_zariski_dense_unipotent(d: &DenseSubgroupData) -> Result<DensityCertificate, HullError> {
    let u = d.u();
    let n = u.dim();
    let logs = d.delta_logs()?;
    let mut elems: Vec<(String, QVec)> = Vec::new();
    let mut span = Subspace::zero(n);
    for (i, v) in logs.into_iter().enumerate() {
        if !span.contains(&v) {
            span = span.with_vectors(std::slice::from_ref(&v));
            let label = d.labels.get(i).cloned().unwrap_or_else(|| format!("g{i}"));
            elems.push((format!("log {label}"), v));
        }
    }
    let mut k = 0;
    while k < elems.len() {
        for j in 0..k {
            let b = u.bracket(&elems[j].1, &elems[k].1);
            if !span.contains(&b) {
                span = span.with_vectors(std::slice::from_ref(&b));
                let word = format!("[{}, {}]", elems[j].0, elems[k].0);
                elems.push((word, b));
            }
        }
        k += 1;
    }
    let verdict = if span.dim() == n { Decision::Yes } else { Decision::No };
    Ok(DensityCertificate {
        verdict,
        closure_dim: span.dim(),
        ambient_dim: n,
        witness: elems.into_iter().map(|(word, v)| BracketWord { word, log: to_ratstr(&v) }).collect(),
    })
}

// ---------------------------------------------------------------------------
// torus part

fn primes_of(q: &Rational, bound: u64, acc: &mut BTreeSet<BigInt>) -> Result<(), HullError> {
    for part in [q.numer(), q.denom()] {
        for (p, _) in factor_integer(part, bound)? {
            acc.insert(p);
        }
    }
    Ok(())
}

struct ExponentData {
    primes: Vec<BigInt>,
    /// `exps[i][j][p]`: valuation of entry `j` of generator `i` at prime `p`.
    exps: Vec<Vec<Vec<i64>>>,
    /// Sign bit of each entry.
    signs: Vec<Vec<bool>>,
}

fn exponent_data(gens: &[QVec], k: usize) -> Result<ExponentData, HullError> {
    let bound = prime_bound();
    let mut primes = BTreeSet::new();
    for (i, g) in gens.iter().enumerate() {
        if g.len() != k {
            return Err(HullError::TorusGenerator { index: i, reason: format!("expected {k} entries, got {}", g.len()) });
        }
        for v in g {
            if v.is_zero() {
                return Err(HullError::TorusGenerator { index: i, reason: "zero entry".into() });
            }
            primes_of(v, bound, &mut primes)?;
        }
    }
    let primes: Vec<BigInt> = primes.into_iter().collect();
    let exps = gens.iter().map(|g| g.iter().map(|v| primes.iter().map(|p| valuation(v, p)).collect()).collect()).collect();
    let signs = gens.iter().map(|g| g.iter().map(Signed::is_negative).collect()).collect();
    Ok(ExponentData { primes, exps, signs })
}

/// Rational characters `a` with `Π_j v_ij^{a_j}` of absolute value one for all `i`.
fn character_kernel(data: &ExponentData, k: usize) -> Subspace {
    let mut rows = Vec::new();
    for g in &data.exps {
        for p in 0..data.primes.len() {
            rows.push((0..k).map(|j| Rational::from_integer(g[j][p].into())).collect());
        }
    }
    if rows.is_empty() {
        return Subspace::full(k);
    }
    kernel_basis(&RatMatrix::from_rows(rows, k).unwrap())
}

fn primitive_integer(v: &[Rational]) -> Vec<BigInt> {
    let l = v.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let ints: Vec<BigInt> = v.iter().map(|c| (c * Rational::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    let mut out: Vec<BigInt> = ints.into_iter().map(|c| c / &g).collect();
    if out.iter().find(|c| !c.is_zero()).is_some_and(Signed::is_negative) {
        out.iter_mut().for_each(|c| *c = -c.clone());
    }
    out
}

/// Makes an integer character with trivial absolute values also trivial on signs.
fn fix_signs(a: Vec<BigInt>, data: &ExponentData) -> Vec<BigInt> {
    let odd = data.signs.iter().any(|s| {
        let total: BigInt = s.iter().zip(&a).filter(|(neg, _)| **neg).map(|(_, x)| x.clone()).sum();
        total.is_odd()
    });
    if odd {
        a.into_iter().map(|x| x * 2).collect()
    } else {
        a
    }
}

fn to_i64(a: &[BigInt]) -> Vec<i64> {
    a.iter().map(|x| i64::try_from(x).expect("character entry fits in i64")).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TorusDensityCertificate {
    pub verdict: Decision,
    /// A nonzero character trivial on the generators, when not dense.
    pub witness: Option<Vec<i64>>,
}

/// Density of `⟨v_1, …, v_m⟩` in `(Q^*)^k`: dense iff no nonzero integer
/// character vanishes on all generators.
pub fn torus_density_check(gens: &[QVec], k: usize) -> Result<TorusDensityCertificate, HullError> {
    density_against(gens, k, &Subspace::zero(k))
}

fn density_against(gens: &[QVec], k: usize, relations: &Subspace) -> Result<TorusDensityCertificate, HullError> {
    let data = exponent_data(gens, k)?;
    let kernel = character_kernel(&data, k);
    match kernel.basis().iter().find(|v| !relations.contains(v)) {
        None => Ok(TorusDensityCertificate { verdict: Decision::Yes, witness: None }),
        Some(v) => {
            let a = fix_signs(primitive_integer(v), &data);
            Ok(TorusDensityCertificate { verdict: Decision::No, witness: Some(to_i64(&a)) })
        }
    }
}

/// Integer relations among the torus weights of `u`, as a rational subspace of
/// `Q^{#weights}`.
pub fn weight_relations(d: &DenseSubgroupData) -> Result<Subspace, HullError> {
    let weights = d.weights()?;
    let m = weights.len();
    let t = d.hull.t_dim();
    if t == 0 || m == 0 {
        return Ok(Subspace::full(m));
    }
    let rows: Vec<QVec> = (0..t).map(|a| weights.iter().map(|(w, _)| w[a].clone()).collect()).collect();
    Ok(kernel_basis(&RatMatrix::from_rows(rows, m)?))
}

/// Density of `Γ_T` in the torus `T` of the hull, seen through its weight
/// characters. Also checks that each generator satisfies the weight relations.
pub fn torus_density_in_hull(d: &DenseSubgroupData) -> Result<TorusDensityCertificate, HullError> {
    let rel = weight_relations(d)?;
    let m = rel.ambient_dim();
    let data = exponent_data(&d.torus_gens, m)?;
    for b in rel.basis() {
        let a = to_i64(&primitive_integer(b));
        for (i, g) in d.torus_gens.iter().enumerate() {
            let val = g.iter().zip(&a).fold(Rational::one(), |acc, (v, e)| acc * rat_pow(v, *e));
            if !val.is_one() {
                return Err(HullError::TorusGenerator {
                    index: i,
                    reason: format!("violates the weight relation {a:?}"),
                });
            }
        }
    }
    if d.hull.t_dim() == 0 {
        return Ok(TorusDensityCertificate { verdict: Decision::Yes, witness: None });
    }
    let kernel = character_kernel(&data, m);
    match kernel.basis().iter().find(|v| !rel.contains(v)) {
        None => Ok(TorusDensityCertificate { verdict: Decision::Yes, witness: None }),
        Some(v) => {
            let a = fix_signs(primitive_integer(v), &data);
            Ok(TorusDensityCertificate { verdict: Decision::No, witness: Some(to_i64(&a)) })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiscretenessCertificate {
    pub verdict: Decision,
    /// Rank of the subgroup modulo torsion.
    pub rank: usize,
    pub dimension: usize,
    pub witness: String,
}

/// Discreteness of `⟨v_1, …, v_m⟩` in a `k`-dimensional torus, read off the
/// image under `log |·|`. Decided only in the enumerated cases.
pub fn torus_discreteness_check(gens: &[QVec], k: usize) -> Result<DiscretenessCertificate, HullError> {
    let coords = gens.first().map_or(k, Vec::len);
    let data = exponent_data(gens, coords)?;
    let np = data.primes.len();
    let row = |g: &Vec<Vec<i64>>| -> QVec {
        g.iter().flat_map(|e| e.iter().map(|&x| Rational::from_integer(x.into()))).collect()
    };
    let rank_of = |idx: &[usize]| -> usize {
        if idx.is_empty() || np == 0 {
            return 0;
        }
        RatMatrix::from_rows(idx.iter().map(|&i| row(&data.exps[i])).collect(), coords * np).unwrap().rank()
    };
    let all: Vec<usize> = (0..gens.len()).collect();
    let r = rank_of(&all);
    let cert = |verdict, witness: String| DiscretenessCertificate { verdict, rank: r, dimension: k, witness };
    if r > k {
        return Ok(cert(Decision::No, format!("rank {r} exceeds the dimension {k} of the log space")));
    }
    let support = |i: usize| -> BTreeSet<usize> {
        (0..coords).filter(|&j| data.exps[i][j].iter().any(|&x| x != 0)).collect()
    };
    for j in 0..coords {
        let on_j: Vec<usize> = all.iter().copied().filter(|&i| support(i) == BTreeSet::from([j])).collect();
        let rj = rank_of(&on_j);
        if rj >= 2 {
            return Ok(cert(Decision::No, format!("coordinate {j} alone carries rank {rj}")));
        }
    }
    if r <= 1 {
        return Ok(cert(Decision::Yes, format!("rank {r} is at most one")));
    }
    let supports: Vec<BTreeSet<usize>> = all.iter().map(|&i| support(i)).filter(|s| !s.is_empty()).collect();
    let disjoint = supports.iter().enumerate().all(|(a, s)| supports[a + 1..].iter().all(|t| s.is_disjoint(t)));
    if disjoint {
        return Ok(cert(Decision::Yes, "generators have pairwise disjoint coordinate supports".into()));
    }
    Ok(cert(Decision::Unknown, "not covered by the decidable cases".into()))
}

/// Discreteness of `Γ_T` in the hull's torus.
pub fn torus_discreteness_in_hull(d: &DenseSubgroupData) -> Result<DiscretenessCertificate, HullError> {
    if d.torus_gens.is_empty() {
        return Ok(DiscretenessCertificate {
            verdict: Decision::Yes,
            rank: 0,
            dimension: d.hull.t_dim(),
            witness: "no torus generators".into(),
        });
    }
    torus_discreteness_check(&d.torus_gens, d.hull.t_dim())
}

// ---------------------------------------------------------------------------
// series and Hirsch length

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyrationalSeries {
    /// `0 = I_0 ⊂ I_1 ⊂ … ⊂ I_n = u`, each an ideal of `u`.
    pub flags: Vec<Subspace>,
    pub quotients: Vec<String>,
}

impl PolyrationalSeries {
    pub fn length(&self) -> usize {
        self.quotients.len()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let flags: Vec<Vec<Vec<RatStr>>> =
            self.flags.iter().map(|f| f.basis().iter().map(|v| to_ratstr(v)).collect()).collect();
        serde_json::json!({ "length": self.length(), "flags": flags, "quotients": self.quotients })
    }
}

/// Ascending series through successive centres: each step adds the first
/// echelon vector of `Z(u / I)` not already in `I`.
pub fn polyrational_series(d: &DenseSubgroupData) -> Result<PolyrationalSeries, HullError> {
    if !crate::liealg::is_nilpotent(d.u()) {
        return Err(HullError::NotNilpotent);
    }
    let cert = is_zariski_dense_unipotent(d)?;
    if cert.verdict != Decision::Yes {
        return Err(HullError::NotDense { closure: cert.closure_dim, dim: cert.ambient_dim });
    }
    Ok(central_flag(d.u()))
}

pub(crate) fn central_flag(u: &LieAlgebra) -> PolyrationalSeries {
    let n = u.dim();
    let mut flags = vec![Subspace::zero(n)];
    let mut quotients = Vec::new();
    loop {
        let cur = flags.last().unwrap().clone();
        if cur.dim() == n {
            break;
        }
        let ann = cur.annihilator();
        let mut rows = Vec::new();
        for j in 0..n {
            rows.extend(ann.mul(&u.ad_basis(j)).to_rows());
        }
        let centre = if rows.is_empty() { Subspace::full(n) } else { kernel_basis(&RatMatrix::from_rows(rows, n).unwrap()) };
        let v = centre
            .basis()
            .iter()
            .find(|v| !cur.contains(v))
            .expect("nilpotent algebras have nontrivial centre modulo any proper ideal")
            .clone();
        flags.push(cur.with_vectors(&[v]));
        quotients.push("subgroup of Q".to_string());
    }
    PolyrationalSeries { flags, quotients }
}

pub fn declared_hirsch_length(d: &DenseSubgroupData) -> usize {
    d.u().dim() + d.torus_gens.len() + d.automorphisms.len()
}

/// `dim u + k` once `Γ_T` is certified free abelian of rank `k`.
pub fn hirsch_length(d: &DenseSubgroupData) -> Result<usize, HullError> {
    let cert = is_zariski_dense_unipotent(d)?;
    if cert.verdict != Decision::Yes {
        return Err(HullError::NotDense { closure: cert.closure_dim, dim: cert.ambient_dim });
    }
    let disc = torus_discreteness_in_hull(d)?;
    let declared = declared_hirsch_length(d);
    if disc.verdict != Decision::Yes || disc.rank != d.torus_gens.len() {
        return Err(HullError::Hirsch { declared, verdict: disc.verdict });
    }
    Ok(declared)
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::exactla::int;
    use crate::liealg::fixtures::*;

    pub fn heis_rep() -> Vec<RatMatrix> {
        // basis x, z, y
        vec![
            RatMatrix::from_i64(&[&[0, 1, 0], &[0, 0, 0], &[0, 0, 0]]),
            RatMatrix::from_i64(&[&[0, 0, 1], &[0, 0, 0], &[0, 0, 0]]),
            RatMatrix::from_i64(&[&[0, 0, 0], &[0, 0, 1], &[0, 0, 0]]),
        ]
    }

    pub fn heis_integer_gens() -> Vec<DeltaGen> {
        vec![
            DeltaGen::Matrix(RatMatrix::from_i64(&[&[1, 1, 0], &[0, 1, 0], &[0, 0, 1]])),
            DeltaGen::Matrix(RatMatrix::from_i64(&[&[1, 0, 0], &[0, 1, 1], &[0, 0, 1]])),
        ]
    }

    pub fn heis_model(n: i64) -> DenseSubgroupData {
        DenseSubgroupData::new(heis_presentation(), heis_integer_gens(), vec![vec![int(n), int(n * n)]])
            .with_representation(heis_rep())
            .with_labels(vec!["a".into(), "b".into()])
    }

    pub fn bs_model(n: i64) -> DenseSubgroupData {
        DenseSubgroupData::new(bs_presentation(), vec![DeltaGen::Log(vec![int(1)])], vec![vec![int(n)]])
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::exactla::{int, rat};
    use proptest::prelude::*;

    #[test]
    fn log_examples() {
        assert!(unipotent_log(&RatMatrix::identity(3)).unwrap().is_zero());
        let m = RatMatrix::from_i64(&[&[1, 1, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(log_coordinates(&m, &heis_rep()).unwrap(), vec![int(1), int(0), int(0)]);
        let n = RatMatrix::from_i64(&[&[0, 0, 5], &[0, 0, 0], &[0, 0, 0]]);
        assert_eq!(unipotent_log(&RatMatrix::identity(3).add(&n)).unwrap(), n);
        // I + E12 + E23 has a second-order term
        let m = RatMatrix::from_i64(&[&[1, 1, 0], &[0, 1, 1], &[0, 0, 1]]);
        let l = unipotent_log(&m).unwrap();
        assert_eq!(l[(0, 2)], rat(-1, 2));
        assert_eq!(unipotent_exp(&l), m);
        assert_eq!(unipotent_log(&RatMatrix::from_i64(&[&[2]])), Err(HullError::NotUnipotent));
    }

    #[test]
    fn density_examples() {
        let c = is_zariski_dense_unipotent(&heis_model(2)).unwrap();
        assert_eq!(c.verdict, Decision::Yes);
        assert_eq!(c.witness.last().unwrap().word, "[log a, log b]");
        assert_eq!(c.witness.last().unwrap().log, to_ratstr(&[int(0), int(1), int(0)]));

        let mut one = heis_model(2);
        one.delta_gens.truncate(1);
        let c = is_zariski_dense_unipotent(&one).unwrap();
        assert_eq!(c.verdict, Decision::No);
        assert_eq!(c.closure_dim, 1);

        let h = LieAlgebra::heisenberg();
        let p = SemidirectPresentation::new(h, vec![]);
        let gens = (0..3).map(|i| DeltaGen::Log(crate::exactla::unit_vec(3, i))).collect();
        let d = DenseSubgroupData::new(p, gens, vec![]);
        assert_eq!(is_zariski_dense_unipotent(&d).unwrap().verdict, Decision::Yes);
    }

    #[test]
    fn torus_density_examples() {
        let c = torus_density_check(&[vec![int(2)]], 1).unwrap();
        assert_eq!(c.verdict, Decision::Yes);
        let c = torus_density_check(&[vec![int(-1)]], 1).unwrap();
        assert_eq!((c.verdict, c.witness), (Decision::No, Some(vec![2])));
        let c = torus_density_check(&[vec![int(2), int(4)]], 2).unwrap();
        assert_eq!((c.verdict, c.witness), (Decision::No, Some(vec![2, -1])));
        // dense in the one-dimensional torus of the Heisenberg hull
        assert_eq!(torus_density_in_hull(&heis_model(2)).unwrap().verdict, Decision::Yes);
        assert_eq!(torus_density_in_hull(&bs_model(3)).unwrap().verdict, Decision::Yes);
        let mut bad = heis_model(2);
        bad.torus_gens = vec![vec![int(2), int(3)]];
        assert!(matches!(torus_density_in_hull(&bad), Err(HullError::TorusGenerator { index: 0, .. })));
        assert_eq!(torus_density_in_hull(&bs_model(1)).unwrap().verdict, Decision::No);
    }

    #[test]
    fn discreteness_examples() {
        let c = torus_discreteness_check(&[vec![int(2)], vec![int(3)]], 1).unwrap();
        assert_eq!(c.verdict, Decision::No);
        assert_eq!(c.rank, 2);
        let c = torus_discreteness_check(&[vec![rat(3, 2)]], 1).unwrap();
        assert_eq!(c.verdict, Decision::Yes);
        let c = torus_discreteness_check(&[vec![int(2), int(1)], vec![int(1), int(3)]], 2).unwrap();
        assert_eq!(c.verdict, Decision::Yes);
        let c = torus_discreteness_check(&[vec![int(2), int(3)], vec![int(3), int(2)]], 2).unwrap();
        assert_eq!(c.verdict, Decision::Unknown);
        let c = torus_discreteness_check(&[vec![int(2), int(1)], vec![int(3), int(1)]], 2).unwrap();
        assert_eq!(c.verdict, Decision::No);
        let c = torus_discreteness_check(&[vec![int(4)], vec![int(8)]], 1).unwrap();
        assert_eq!((c.verdict, c.rank), (Decision::Yes, 1));
    }

    #[test]
    fn series_and_hirsch() {
        let s = polyrational_series(&heis_model(2)).unwrap();
        assert_eq!(s.length(), 3);
        assert_eq!(s.flags[1], Subspace::coordinate(3, [1]));
        assert_eq!(s.flags[2], Subspace::coordinate(3, [0, 1]));
        assert_eq!(polyrational_series(&bs_model(2)).unwrap().length(), 1);
        let ab = SemidirectPresentation::new(LieAlgebra::abelian(2), vec![]);
        let d = DenseSubgroupData::new(
            ab,
            vec![DeltaGen::Log(vec![int(1), int(0)]), DeltaGen::Log(vec![int(0), int(1)])],
            vec![],
        );
        assert_eq!(polyrational_series(&d).unwrap().length(), 2);

        assert_eq!(hirsch_length(&bs_model(2)).unwrap(), 2);
        assert_eq!(hirsch_length(&heis_model(2)).unwrap(), 4);
        let mut multi = bs_model(2);
        multi.torus_gens = vec![vec![int(2)], vec![int(3)], vec![int(5)]];
        assert_eq!(hirsch_length(&multi), Err(HullError::Hirsch { declared: 4, verdict: Decision::No }));
    }

    #[test]
    fn torus_automorphisms() {
        let a = heis_model(2).torus_automorphism(0).unwrap();
        assert_eq!(a, RatMatrix::diagonal(&[int(2), int(4), int(2)]));
        let mut bad = heis_model(2);
        bad.torus_gens = vec![vec![int(2), int(3)]];
        assert!(bad.torus_automorphism(0).is_err());
        let anosov = DenseSubgroupData::new(
            SemidirectPresentation::new(LieAlgebra::abelian(2), vec![]),
            vec![],
            vec![],
        )
        .with_automorphisms(vec![RatMatrix::from_i64(&[&[2, 1], &[1, 1]])]);
        assert_eq!(anosov.group_operators().unwrap().len(), 1);
        assert_eq!(declared_hirsch_length(&anosov), 3);
    }

    fn small_rat() -> impl Strategy<Value = Rational> {
        (prop_oneof![Just(-1i64), Just(1)], 1i64..13, 1i64..13).prop_map(|(s, a, b)| rat(s * a, b))
    }

    proptest! {
        #[test]
        fn exp_log_roundtrip(entries in proptest::collection::vec(-5i64..6, 6)) {
            let mut m = RatMatrix::identity(4);
            let mut it = entries.into_iter();
            for i in 0..4 {
                for j in i + 1..4 {
                    m[(i, j)] = int(it.next().unwrap());
                }
            }
            let l = unipotent_log(&m).unwrap();
            prop_assert_eq!(unipotent_exp(&l), m);
        }

        #[test]
        fn discreteness_invariant_under_moves(gens in proptest::collection::vec(proptest::collection::vec(small_rat(), 2), 1..4), flip in 0usize..4) {
            let before = torus_discreteness_check(&gens, 2).unwrap().verdict;
            let mut moved = gens.clone();
            moved.reverse();
            let f = flip % moved.len();
            moved[f] = moved[f].iter().map(|v| v.recip()).collect();
            let after = torus_discreteness_check(&moved, 2).unwrap().verdict;
            prop_assert_eq!(before, after);
        }
    }
}
