//! Validated density matrices, support projectors and quantum relative entropy.

use super::bipartite::BipartiteOperator;
use super::eigen::eig_hermitian;
use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Tolerances used when validating a density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateTolerances {
    pub hermiticity: f64,
    pub psd: f64,
    pub trace: f64,
}

impl Default for StateTolerances {
    fn default() -> Self {
        Self { hermiticity: 1e-10, psd: 1e-10, trace: 1e-10 }
    }
}

impl StateTolerances {
    pub fn uniform(tol: f64) -> Self {
        Self { hermiticity: tol, psd: tol, trace: tol }
    }
}

/// A Hermitian, positive semidefinite, unit-trace bipartite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    op: BipartiteOperator,
    tolerances: StateTolerances,
}

impl DensityMatrix {
    pub fn new(op: BipartiteOperator) -> Result<Self> {
        Self::with_tolerances(op, StateTolerances::default())
    }

    pub fn with_tolerances(op: BipartiteOperator, tolerances: StateTolerances) -> Result<Self> {
        let m = op.matrix();
        let defect = m.hermiticity_defect();
        if defect > tolerances.hermiticity {
            return Err(Error::InvalidState(format!("hermiticity defect {defect:.3e}")));
        }
        let tr = m.trace().re;
        if (tr - 1.0).abs() > tolerances.trace {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let eig = eig_hermitian(&m.hermitian_part())?;
        if eig.min() < -tolerances.psd {
            return Err(Error::InvalidState(format!("negative eigenvalue {:.3e}", eig.min())));
        }
        Ok(Self { op, tolerances })
    }

    /// Normalized `|ψ⟩⟨ψ|`.
    pub fn pure(dim_a: usize, dim_b: usize, ket: &[C64]) -> Result<Self> {
        let norm = super::matrix::vec_norm(ket);
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        let unit: Vec<C64> = ket.iter().map(|z| z / norm).collect();
        Self::new(BipartiteOperator::projector(dim_a, dim_b, &unit)?)
    }

    pub fn op(&self) -> &BipartiteOperator {
        &self.op
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.op.matrix()
    }

    pub fn tolerances(&self) -> StateTolerances {
        self.tolerances
    }

    pub fn dim_a(&self) -> usize {
        self.op.dim_a()
    }

    pub fn dim_b(&self) -> usize {
        self.op.dim_b()
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn kron(&self, other: &Self) -> Result<Self> {
        Self::with_tolerances(self.op.kron(&other.op), self.tolerances)
    }
}

/// Orthogonal projector onto the support of a state.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportProjector {
    op: BipartiteOperator,
    rank: usize,
}

impl SupportProjector {
    /// Validates an explicit projector: Hermitian, idempotent and 0/1 spectrum within 1e-10.
    pub fn new(op: BipartiteOperator) -> Result<Self> {
        const TOL: f64 = 1e-10;
        let m = op.matrix();
        if !m.is_hermitian(TOL) {
            return Err(Error::InvalidProjector("not Hermitian".into()));
        }
        let sq = m.matmul(m)?;
        let idem = sq.max_abs_diff(m);
        if idem > TOL {
            return Err(Error::InvalidProjector(format!("‖P²-P‖ = {idem:.3e}")));
        }
        let vals = eig_hermitian(m)?.values;
        let mut rank = 0;
        for v in vals {
            if (v - 1.0).abs() <= TOL {
                rank += 1;
            } else if v.abs() > TOL {
                return Err(Error::InvalidProjector(format!("eigenvalue {v} not in {{0,1}}")));
            }
        }
        Ok(Self { op, rank })
    }

    /// Projector onto the span of orthonormal kets.
    pub fn from_orthonormal(dim_a: usize, dim_b: usize, kets: &[Vec<C64>]) -> Result<Self> {
        let mut acc = BipartiteOperator::zeros(dim_a, dim_b);
        for k in kets {
            acc = acc.add(&BipartiteOperator::projector(dim_a, dim_b, k)?)?;
        }
        Self::new(acc)
    }

    pub fn op(&self) -> &BipartiteOperator {
        &self.op
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.op.matrix()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim_a(&self) -> usize {
        self.op.dim_a()
    }

    pub fn dim_b(&self) -> usize {
        self.op.dim_b()
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    /// `P₁ ⊗ P₂` on the joint cut.
    pub fn kron(&self, other: &Self) -> Self {
        Self { op: self.op.kron(&other.op), rank: self.rank * other.rank }
    }

    /// Orthonormal basis of the range, as columns.
    pub fn range_basis(&self) -> Result<Vec<Vec<C64>>> {
        let e = eig_hermitian(self.matrix())?;
        Ok((0..self.rank).map(|k| e.vector(k)).collect())
    }
}

/// Default relative cutoff for deciding which eigenvalues belong to the support.
pub const DEFAULT_SUPPORT_CUTOFF: f64 = 1e-10;

/// `Σ v_i v_i†` over eigenvalues above `cutoff · λ_max`.
pub fn support_projector(rho: &DensityMatrix, cutoff: f64) -> Result<SupportProjector> {
    if cutoff.is_nan() || cutoff <= 0.0 {
        return Err(Error::BadParameter(format!("support cutoff must be positive, got {cutoff}")));
    }
    let e = eig_hermitian(rho.matrix())?;
    let lmax = e.max();
    if lmax <= 0.0 || e.values.iter().all(|v| v.abs() < f64::MIN_POSITIVE) {
        return Err(Error::ZeroState);
    }
    let kept: Vec<Vec<C64>> =
        e.values.iter().enumerate().filter(|(_, &v)| v > cutoff * lmax).map(|(k, _)| e.vector(k)).collect();
    let n = rho.dim();
    let mut p = ComplexMatrix::zeros(n, n);
    for v in &kept {
        p = &p + &ComplexMatrix::projector_onto(v);
    }
    let rank = kept.len();
    Ok(SupportProjector { op: BipartiteOperator::new(rho.dim_a(), rho.dim_b(), p)?, rank })
}

/// Tolerance on `tr((1-Π_σ)ρ)` used to decide support inclusion.
pub const SUPPORT_INCLUSION_TOL: f64 = 1e-9;

/// `S(ρ‖σ) = tr ρ log₂ρ − tr ρ log₂σ`, or `+∞` when `supp ρ ⊄ supp σ`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    rho.op().check_dims(sigma.op())?;
    let er = eig_hermitian(rho.matrix())?;
    let es = eig_hermitian(sigma.matrix())?;
    let cut_r = DEFAULT_SUPPORT_CUTOFF * er.max().max(0.0);
    let cut_s = DEFAULT_SUPPORT_CUTOFF * es.max().max(0.0);

    let neg_entropy: f64 = er.values.iter().filter(|&&l| l > cut_r).map(|&l| l * l.log2()).sum();

    let mut cross = 0.0;
    let mut outside = 0.0;
    for (k, &l) in es.values.iter().enumerate() {
        let v = es.vector(k);
        let w = rho.matrix().sandwich(&v, &v).re;
        if l > cut_s {
            cross += w * l.log2();
        } else {
            outside += w;
        }
    }
    if outside > SUPPORT_INCLUSION_TOL {
        return Ok(f64::INFINITY);
    }
    Ok(neg_entropy - cross)
}

/// `P τ P + (1-P) τ (1-P)`.
pub fn pinch(tau: &BipartiteOperator, p: &SupportProjector) -> Result<BipartiteOperator> {
    tau.pinch(p.op())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(dim: usize, idx: usize) -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); dim];
        v[idx] = C64::new(1.0, 0.0);
        v
    }

    #[test]
    fn rejects_invalid_states() {
        let half = BipartiteOperator::identity(2, 2).scale(0.2);
        assert!(matches!(DensityMatrix::new(half), Err(Error::InvalidState(_))));
        let neg = BipartiteOperator::new(1, 2, ComplexMatrix::from_real(2, 2, &[1.5, 0.0, 0.0, -0.5]).unwrap()).unwrap();
        assert!(matches!(DensityMatrix::new(neg), Err(Error::InvalidState(_))));
    }

    #[test]
    fn pure_state_support() {
        let rho = DensityMatrix::pure(2, 2, &basis(4, 0)).unwrap();
        let p = support_projector(&rho, DEFAULT_SUPPORT_CUTOFF).unwrap();
        assert_eq!(p.rank(), 1);
        assert!(p.matrix().max_abs_diff(rho.matrix()) < 1e-15);
    }

    #[test]
    fn zero_cutoff_rejected() {
        let rho = DensityMatrix::pure(2, 2, &basis(4, 0)).unwrap();
        assert!(matches!(support_projector(&rho, 0.0), Err(Error::BadParameter(_))));
    }

    #[test]
    fn projector_validation() {
        let bad = BipartiteOperator::identity(2, 2).scale(0.5);
        assert!(matches!(SupportProjector::new(bad), Err(Error::InvalidProjector(_))));
    }

    #[test]
    fn entropy_of_maxent_against_maximally_mixed() {
        let mut phi = vec![C64::new(0.0, 0.0); 4];
        phi[0] = C64::new(1.0, 0.0);
        phi[3] = C64::new(1.0, 0.0);
        let rho = DensityMatrix::pure(2, 2, &phi).unwrap();
        let mixed = DensityMatrix::new(BipartiteOperator::identity(2, 2).scale(0.25)).unwrap();
        assert!((relative_entropy(&rho, &mixed).unwrap() - 2.0).abs() < 1e-12);
        assert!(relative_entropy(&rho, &rho).unwrap().abs() < 1e-12);
        // |00⟩ against |11⟩ has disjoint support.
        let a = DensityMatrix::pure(2, 2, &basis(4, 0)).unwrap();
        let b = DensityMatrix::pure(2, 2, &basis(4, 3)).unwrap();
        assert_eq!(relative_entropy(&a, &b).unwrap(), f64::INFINITY);
    }
}
