//! Group-side cohomology of `Γ = Δ ⋊ Z^k` without group cochains.
//!
//! `H^*(Δ, M)` is computed as `H^*(u, M)` for Zariski dense `Δ`, with each
//! group operator acting through its automorphism of `u` and of `M`.
//! Extensions by `Z` are then handled one at a time through the Wang short
//! exact sequence `0 → coinvariants of H^{n-1} → H^n(Γ') → invariants of H^n → 0`.

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::cecoh::{
    all_cohomology, betti_numbers, build_complex, induced_on_cohomology, mask_indices, ring_structure, CochainComplex,
    CohError, CohomologySpace, GradedRing, RingFingerprint,
};
use crate::exactla::{
    image_basis, kernel_basis, prime_bound, quotient_basis, rat_pow, rational_eigenvalues, shift,
    simultaneous_eigenspaces, solve, LinAlgError, QVec, RatMatrix, Rational, Subspace,
};
use crate::grouphull::{
    is_zariski_dense_unipotent, torus_discreteness_in_hull, Decision, DenseSubgroupData, DiscretenessCertificate,
    HullError,
};
use crate::liealg::{LieAlgebra, LieError, LieModule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupCohError {
    #[error(transparent)]
    Hull(#[from] HullError),
    #[error(transparent)]
    Coh(#[from] CohError),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error("operators {0} and {1} do not commute")]
    NotCommuting(usize, usize),
    #[error("Δ is not Zariski dense in U (closure dimension {closure} of {dim})")]
    NotDense { closure: usize, dim: usize },
    #[error("torus part is not certified discrete: {}", .0.witness)]
    NotDiscrete(DiscretenessCertificate),
    #[error("coefficient module: {0}")]
    Module(String),
}

/// `H^*(Δ, M)` realized as `H^*(u, M)`, with the action of every group operator.
#[derive(Debug, Clone)]
pub struct UnipotentCohomology {
    pub complex: CochainComplex,
    pub spaces: Vec<CohomologySpace>,
    /// `(label, matrices on H^0, H^1, …)` in representative coordinates.
    pub operators: Vec<(String, Vec<RatMatrix>)>,
}

impl UnipotentCohomology {
    pub fn dims(&self) -> Vec<usize> {
        self.spaces.iter().map(CohomologySpace::dim).collect()
    }
}

fn u_module(d: &DenseSubgroupData, m: &LieModule) -> Result<LieModule, GroupCohError> {
    let n = d.u().dim();
    let expected = n + d.hull.t_dim();
    if m.algebra_dim() != expected {
        return Err(GroupCohError::Module(format!(
            "module has {} action matrices, the hull has dimension {expected}",
            m.algebra_dim()
        )));
    }
    Ok(m.restrict_prefix(n))
}

/// Action on `M` of torus generator `i`: on each weight space of `M` it is the
/// product of `u`-multipliers matching the weight as an integer combination of
/// `u`-weights.
fn module_operator(d: &DenseSubgroupData, m: &LieModule, i: usize) -> Result<RatMatrix, GroupCohError> {
    let n = d.u().dim();
    let t = d.hull.t_dim();
    if m.is_trivial() {
        return Ok(RatMatrix::identity(m.dim()));
    }
    let uw = d.weights()?;
    let mops: Vec<RatMatrix> = (0..t).map(|a| m.action(n + a).clone()).collect();
    let mw = simultaneous_eigenspaces(&mops, m.dim())?;
    let w = RatMatrix::from_columns(&uw.iter().map(|(w, _)| w.clone()).collect::<Vec<_>>(), t);
    let mut cols = Vec::new();
    let mut diag = Vec::new();
    for (mu, space) in &mw {
        let c = if mu.iter().all(Zero::is_zero) {
            vec![Rational::zero(); uw.len()]
        } else {
            solve(&w, mu).ok_or_else(|| GroupCohError::Module(format!("weight {mu:?} is not a combination of u-weights")))?
        };
        if c.iter().any(|x| !x.is_integer()) {
            return Err(GroupCohError::Module(format!("weight {mu:?} is not an integer combination of u-weights")));
        }
        let mult = d.torus_gens[i]
            .iter()
            .zip(&c)
            .fold(Rational::one(), |acc, (v, e)| acc * rat_pow(v, i64::try_from(e.to_integer()).unwrap()));
        for b in space.basis() {
            cols.push(b.clone());
            diag.push(mult.clone());
        }
    }
    let s = RatMatrix::from_columns(&cols, m.dim());
    let b = s.mul(&RatMatrix::diagonal(&diag)).mul(&s.inverse().expect("weight spaces span M"));
    let a = d.torus_automorphism(i)?;
    let binv = b.inverse().unwrap();
    for y in 0..n {
        let lhs = b.mul(m.action(y)).mul(&binv);
        if lhs != m.act(&a.col(y)) {
            return Err(GroupCohError::Module(format!("torus generator {i} is incompatible with the u-action")));
        }
    }
    Ok(b)
}

/// Matrix on `C^n(u, M)` of `(γ·φ)(Y_1, …, Y_n) = B φ(A^{-1} Y_1, …, A^{-1} Y_n)`.
pub fn cochain_operator(c: &CochainComplex, a: &RatMatrix, b: &RatMatrix, n: usize) -> RatMatrix {
    let dim = c.cochain_dim(n);
    let mut out = RatMatrix::zeros(dim, dim);
    if n > c.top_degree() {
        return out;
    }
    let ainv = a.inverse().expect("automorphism is invertible");
    let basis = c.basis();
    let md = b.rows();
    for &t in basis.subsets(n) {
        let ti = mask_indices(t);
        for &s in basis.subsets(n) {
            let minor = if n == 0 { Rational::one() } else { ainv.submatrix(&mask_indices(s), &ti).det() };
            if minor.is_zero() {
                continue;
            }
            for bb in 0..md {
                for aa in 0..md {
                    if !b[(bb, aa)].is_zero() {
                        out[(basis.index(bb, t), basis.index(aa, s))] += &b[(bb, aa)] * &minor;
                    }
                }
            }
        }
    }
    out
}

/// Lemma-style identification of `H^*(Δ, M)` with `H^*(u, M)`, plus the
/// operator actions. `M` is a module over the hull `u ⋊ t`.
pub fn unipotent_group_cohomology(d: &DenseSubgroupData, m: &LieModule) -> Result<UnipotentCohomology, GroupCohError> {
    let cert = is_zariski_dense_unipotent(d)?;
    if cert.verdict != Decision::Yes {
        return Err(GroupCohError::NotDense { closure: cert.closure_dim, dim: cert.ambient_dim });
    }
    let mu = u_module(d, m)?;
    let complex = build_complex(d.u(), &mu)?;
    let spaces = all_cohomology(&complex)?;
    let mut operators = Vec::new();
    let ops = d.group_operators()?;
    for (idx, (label, a)) in ops.into_iter().enumerate() {
        let b = if idx < d.torus_gens.len() {
            module_operator(d, m, idx)?
        } else if mu.is_trivial() {
            RatMatrix::identity(mu.dim())
        } else {
            return Err(GroupCohError::Module("extra automorphisms need trivial coefficients".into()));
        };
        let mats = spaces
            .iter()
            .map(|h| induced_on_cohomology(h, &cochain_operator(&complex, &a, &b, h.degree)))
            .collect::<Result<Vec<_>, _>>()?;
        operators.push((label, mats));
    }
    Ok(UnipotentCohomology { complex, spaces, operators })
}

/// Cohomology of `Z^k` with coefficients in `V = Q^dim` on which generator
/// `i` acts by `ops[i]`: the Koszul complex on `(φ_1 - 1, …, φ_k - 1)`.
#[derive(Debug, Clone)]
pub struct KoszulCohomology {
    pub complex: CochainComplex,
    pub spaces: Vec<CohomologySpace>,
}

impl KoszulCohomology {
    pub fn dims(&self) -> Vec<usize> {
        self.spaces.iter().map(CohomologySpace::dim).collect()
    }
}

pub fn koszul_zk_cohomology(dim: usize, ops: &[RatMatrix]) -> Result<KoszulCohomology, GroupCohError> {
    for (i, a) in ops.iter().enumerate() {
        if a.rows() != dim || a.cols() != dim {
            return Err(GroupCohError::Module(format!("operator {i} is not {dim}x{dim}")));
        }
    }
    for i in 0..ops.len() {
        for j in i + 1..ops.len() {
            if !ops[i].commutator(&ops[j]).is_zero() {
                return Err(GroupCohError::NotCommuting(i, j));
            }
        }
    }
    let k = ops.len();
    let actions: Vec<RatMatrix> = ops.iter().map(|a| shift(a, &Rational::one())).collect();
    let z = LieAlgebra::abelian(k);
    let module = LieModule::new(&z, dim, actions)?;
    let complex = build_complex(&z, &module)?;
    let spaces = all_cohomology(&complex)?;
    Ok(KoszulCohomology { complex, spaces })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WangStep {
    pub operator: String,
    pub invariants: Vec<usize>,
    pub coinvariants: Vec<usize>,
    pub dims: Vec<usize>,
    pub semisimple: bool,
}

#[derive(Debug, Clone)]
pub struct GroupCohModel {
    pub dims: Vec<usize>,
    pub ring: Option<GradedRing>,
    /// Joint fixed classes of `H^q(u, M)` in representative coordinates
    /// (present with the ring).
    pub invariant_coords: Option<Vec<Subspace>>,
    pub steps: Vec<WangStep>,
    pub ring_note: Option<String>,
    pub provenance: Vec<String>,
}

impl GroupCohModel {
    pub fn euler_characteristic(&self) -> i64 {
        self.dims.iter().enumerate().map(|(n, &b)| if n % 2 == 0 { b as i64 } else { -(b as i64) }).sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let ring = self.ring.as_ref().map(|r| {
            let fp = r.fingerprint();
            serde_json::json!({ "poincare": fp.poincare, "fingerprints": fp })
        });
        serde_json::json!({
            "dims": self.dims,
            "ring": ring,
            "provenance": self.provenance,
        })
    }
}

fn is_semisimple(mats: &[RatMatrix]) -> bool {
    mats.iter().all(|m| m.rows() == 0 || rational_eigenvalues(m, 0, prime_bound()).is_ok())
}

/// `H^*(Γ, M)` for `Γ = Δ ⋊ Z^k`, one Wang step per group operator in the
/// declared order. Remaining operators act block-diagonally on the invariant
/// and coinvariant parts of each step.
pub fn wang_tower(d: &DenseSubgroupData, m: &LieModule) -> Result<GroupCohModel, GroupCohError> {
    let disc = torus_discreteness_in_hull(d)?;
    if disc.verdict != Decision::Yes {
        return Err(GroupCohError::NotDiscrete(disc));
    }
    let uc = unipotent_group_cohomology(d, m)?;
    let mut provenance = vec![format!("H*(Δ, M) = H*(u, M): dims {:?}", uc.dims())];
    let mut dims = uc.dims();
    let mut ops: Vec<(String, Vec<RatMatrix>)> = uc.operators.clone();
    let mut steps = Vec::new();
    let mut all_semisimple = true;
    while !ops.is_empty() {
        let (label, phi) = ops.remove(0);
        let semisimple = is_semisimple(&phi);
        all_semisimple &= semisimple;
        let top = dims.len();
        let mut kers = Vec::new();
        let mut imgs = Vec::new();
        let mut cokers = Vec::new();
        for (n, p) in phi.iter().enumerate() {
            let a = shift(p, &Rational::one());
            let k = kernel_basis(&a);
            let im = image_basis(&a);
            cokers.push(quotient_basis(&Subspace::full(dims[n]), &im)?);
            kers.push(k);
            imgs.push(im);
        }
        let mut new_dims = vec![0; top + 1];
        for (n, nd) in new_dims.iter_mut().enumerate() {
            let inv = if n < top { kers[n].dim() } else { 0 };
            let coinv = if n > 0 { cokers[n - 1].len() } else { 0 };
            *nd = inv + coinv;
        }
        // remaining operators on the new spaces
        for (_, psi) in ops.iter_mut() {
            let mut next = Vec::new();
            for n in 0..=top {
                let mut cols = Vec::new();
                if n < top {
                    for v in kers[n].basis() {
                        let w = psi[n].mul_vec(v);
                        let mut c = kers[n].coordinates(&w).expect("commuting operators preserve fixed spaces");
                        c.resize(new_dims[n], Rational::zero());
                        cols.push(c);
                    }
                }
                if n > 0 {
                    let reps = &cokers[n - 1];
                    let mut basis_cols = reps.clone();
                    basis_cols.extend(imgs[n - 1].basis().iter().cloned());
                    let solver = RatMatrix::from_columns(&basis_cols, dims[n - 1]);
                    for r in reps {
                        let w = psi[n - 1].mul_vec(r);
                        let x = solve(&solver, &w).expect("quotient basis spans");
                        let mut c = vec![Rational::zero(); new_dims[n] - reps.len()];
                        c.extend(x[..reps.len()].iter().cloned());
                        cols.push(c);
                    }
                }
                next.push(RatMatrix::from_columns(&cols, new_dims[n]));
            }
            *psi = next;
        }
        let step = WangStep {
            operator: label.clone(),
            invariants: kers.iter().map(Subspace::dim).collect(),
            coinvariants: cokers.iter().map(Vec::len).collect(),
            dims: new_dims.clone(),
            semisimple,
        };
        provenance.push(format!(
            "Wang step {label}: invariants {:?}, coinvariants {:?} -> dims {:?}{}",
            step.invariants,
            step.coinvariants,
            new_dims,
            if semisimple { "" } else { " (operator not Q-diagonalizable)" }
        ));
        steps.push(step);
        dims = new_dims;
    }
    let trivial = m.dim() == 1 && m.is_trivial();
    let (ring, invariant_coords, ring_note) = if !trivial {
        (None, None, Some("ring omitted: nontrivial coefficients".to_string()))
    } else if !all_semisimple {
        (None, None, Some("ring omitted: a Wang step operator is not Q-diagonalizable".to_string()))
    } else {
        let coords: Vec<Subspace> = (0..uc.spaces.len())
            .map(|n| {
                uc.operators.iter().fold(Subspace::full(uc.spaces[n].dim()), |acc, (_, mats)| {
                    acc.intersection(&kernel_basis(&shift(&mats[n], &Rational::one())))
                })
            })
            .collect();
        let hu = ring_structure(&uc.complex)?;
        let bases: Vec<Vec<QVec>> = coords.iter().map(|s| s.basis().to_vec()).collect();
        let inv = hu.subring(&bases)?;
        let ring = inv.tensor(&GradedRing::exterior(uc.operators.len()));
        provenance.push(format!(
            "ring: H*(u)^Γ_T with dims {:?} tensor exterior algebra on {} generators",
            inv.dims(),
            uc.operators.len()
        ));
        (Some(ring), Some(coords), None)
    };
    if let Some(note) = &ring_note {
        provenance.push(note.clone());
    }
    Ok(GroupCohModel { dims, ring, invariant_coords, steps, ring_note, provenance })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LieComparison {
    pub pass: bool,
    pub lie_dims: Vec<usize>,
    pub group_dims: Vec<usize>,
    pub first_mismatch: Option<usize>,
    pub rings_compared: bool,
    pub lie_fingerprint: Option<RingFingerprint>,
    pub group_fingerprint: Option<RingFingerprint>,
}

/// Degreewise dims against `H^*(g, M)`, and ring fingerprints when both rings exist.
pub fn compare_with_lie(model: &GroupCohModel, g: &LieAlgebra, m: &LieModule) -> Result<LieComparison, GroupCohError> {
    let c = build_complex(g, m)?;
    let lie_dims = betti_numbers(&c)?;
    let len = lie_dims.len().max(model.dims.len());
    let at = |v: &[usize], i: usize| v.get(i).copied().unwrap_or(0);
    let mut first_mismatch = (0..len).find(|&i| at(&lie_dims, i) != at(&model.dims, i));
    let (mut lie_fp, mut group_fp, mut rings_compared) = (None, None, false);
    if let Some(r) = &model.ring {
        if m.dim() == 1 && m.is_trivial() {
            let lr = ring_structure(&c)?;
            lie_fp = Some(lr.fingerprint());
            group_fp = Some(r.fingerprint());
            rings_compared = true;
            if first_mismatch.is_none() && lie_fp != group_fp {
                first_mismatch = Some(
                    (0..len)
                        .find(|&i| {
                            lie_fp.as_ref().unwrap().exterior_cup_ranks.get(i)
                                != group_fp.as_ref().unwrap().exterior_cup_ranks.get(i)
                        })
                        .unwrap_or(0),
                );
            }
        }
    }
    Ok(LieComparison {
        pass: first_mismatch.is_none(),
        lie_dims,
        group_dims: model.dims.clone(),
        first_mismatch,
        rings_compared,
        lie_fingerprint: lie_fp,
        group_fingerprint: group_fp,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::{int, rat};
    use crate::grouphull::fixtures::*;
    use crate::grouphull::DeltaGen;
    use crate::liealg::{semidirect, SemidirectPresentation};

    fn trivial_on_hull(d: &DenseSubgroupData) -> (LieAlgebra, LieModule) {
        let g = semidirect(&d.hull).unwrap();
        let m = LieModule::trivial(&g);
        (g, m)
    }

    #[test]
    fn heisenberg_actions() {
        let d = heis_model(2);
        let (_, m) = trivial_on_hull(&d);
        let uc = unipotent_group_cohomology(&d, &m).unwrap();
        assert_eq!(uc.dims(), vec![1, 2, 2, 1]);
        let ops = &uc.operators[0].1;
        assert_eq!(ops[0], RatMatrix::identity(1));
        assert_eq!(ops[1], RatMatrix::diagonal(&[rat(1, 2), rat(1, 2)]));
        assert_eq!(ops[2], RatMatrix::diagonal(&[rat(1, 8), rat(1, 8)]));
        assert_eq!(ops[3], RatMatrix::diagonal(&[rat(1, 16)]));
    }

    #[test]
    fn bs_actions() {
        let d = bs_model(2);
        let (_, m) = trivial_on_hull(&d);
        let uc = unipotent_group_cohomology(&d, &m).unwrap();
        assert_eq!(uc.dims(), vec![1, 1]);
        assert_eq!(uc.operators[0].1[1], RatMatrix::diagonal(&[rat(1, 2)]));

        let h = SemidirectPresentation::new(LieAlgebra::heisenberg(), vec![]);
        let gens = (0..3).map(|i| DeltaGen::Log(crate::exactla::unit_vec(3, i))).collect();
        let d = DenseSubgroupData::new(h, gens, vec![]);
        let (_, m) = trivial_on_hull(&d);
        let uc = unipotent_group_cohomology(&d, &m).unwrap();
        assert_eq!(uc.dims(), vec![1, 2, 2, 1]);
        assert!(uc.operators.is_empty());
    }

    #[test]
    fn koszul_examples() {
        assert_eq!(koszul_zk_cohomology(1, &[RatMatrix::diagonal(&[int(2)])]).unwrap().dims(), vec![0, 0]);
        assert_eq!(koszul_zk_cohomology(1, &[RatMatrix::identity(1)]).unwrap().dims(), vec![1, 1]);
        let id = RatMatrix::identity(1);
        assert_eq!(koszul_zk_cohomology(1, &[id.clone(), id]).unwrap().dims(), vec![1, 2, 1]);
        let a = RatMatrix::from_i64(&[&[1, 1], &[0, 1]]);
        let b = RatMatrix::from_i64(&[&[1, 0], &[1, 1]]);
        assert_eq!(koszul_zk_cohomology(2, &[a, b]).unwrap_err(), GroupCohError::NotCommuting(0, 1));
    }

    #[test]
    fn wang_examples() {
        let d = bs_model(2);
        let (g, m) = trivial_on_hull(&d);
        let model = wang_tower(&d, &m).unwrap();
        assert_eq!(model.dims, vec![1, 1, 0]);
        let ring = model.ring.as_ref().unwrap();
        assert_eq!(ring.dims(), &[1, 1, 0]);
        assert!(compare_with_lie(&model, &g, &m).unwrap().pass);

        let d = heis_model(2);
        let (g, m) = trivial_on_hull(&d);
        let model = wang_tower(&d, &m).unwrap();
        assert_eq!(model.dims, vec![1, 1, 0, 0, 0]);
        assert_eq!(model.euler_characteristic(), 0);
        assert!(compare_with_lie(&model, &g, &m).unwrap().pass);

        let anosov = DenseSubgroupData::new(
            SemidirectPresentation::new(LieAlgebra::abelian(2), vec![]),
            vec![DeltaGen::Log(vec![int(1), int(0)]), DeltaGen::Log(vec![int(0), int(1)])],
            vec![],
        )
        .with_automorphisms(vec![RatMatrix::from_i64(&[&[2, 1], &[1, 1]])]);
        let (_, m) = trivial_on_hull(&anosov);
        let model = wang_tower(&anosov, &m).unwrap();
        assert_eq!(model.dims, vec![1, 1, 1, 1]);
        assert!(model.ring.is_none());
        assert!(!model.steps[0].semisimple);
    }

    #[test]
    fn corrupted_weight_fails_at_degree_one() {
        let mut d = bs_model(2);
        d.torus_gens = vec![vec![int(1)]];
        let (g, m) = trivial_on_hull(&d);
        let model = wang_tower(&d, &m).unwrap();
        let v = compare_with_lie(&model, &g, &m).unwrap();
        assert!(!v.pass);
        assert_eq!(v.first_mismatch, Some(1));
    }

    #[test]
    fn inverse_generator_gives_same_verdict() {
        let mut d = heis_model(2);
        d.torus_gens = vec![vec![rat(1, 2), rat(1, 4)]];
        let (g, m) = trivial_on_hull(&d);
        assert!(compare_with_lie(&wang_tower(&d, &m).unwrap(), &g, &m).unwrap().pass);
    }

    #[test]
    fn weight_module() {
        let d = bs_model(2);
        let g = semidirect(&d.hull).unwrap();
        let m = LieModule::new(
            &g,
            2,
            vec![RatMatrix::from_i64(&[&[0, 0], &[1, 0]]), RatMatrix::from_i64(&[&[0, 0], &[0, 1]])],
        )
        .unwrap();
        let model = wang_tower(&d, &m).unwrap();
        assert!(model.ring.is_none());
        let v = compare_with_lie(&model, &g, &m).unwrap();
        assert!(v.pass, "{v:?}");
    }

    #[test]
    fn non_discrete_is_refused() {
        let mut d = bs_model(2);
        d.torus_gens = vec![vec![int(2)], vec![int(3)]];
        let (_, m) = trivial_on_hull(&d);
        assert!(matches!(wang_tower(&d, &m), Err(GroupCohError::NotDiscrete(_))));
    }
}
