//! Named states, kets and operators used throughout the bounds.
//!
//! All 3⊗3 kets are written in the product basis `|ij⟩ ↦ 3i + j`.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::linalg::{
    support_projector, BipartiteOperator, ComplexMatrix, DensityMatrix, SupportProjector, C64,
    DEFAULT_SUPPORT_CUTOFF,
};

/// A state together with its support projector and the parameters that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedState {
    pub name: String,
    pub params: Vec<f64>,
    pub state: DensityMatrix,
    pub projector: SupportProjector,
}

impl NamedState {
    /// Wraps an arbitrary state, deriving the projector numerically.
    pub fn from_state(name: impl Into<String>, params: Vec<f64>, state: DensityMatrix, cutoff: f64) -> Result<Self> {
        let projector = support_projector(&state, cutoff)?;
        Ok(Self { name: name.into(), params, state, projector })
    }

    /// `ρ₁ ⊗ ρ₂` on the joint cut, with `P₁ ⊗ P₂` as its projector.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            name: format!("{}*{}", self.name, other.name),
            params: self.params.iter().chain(&other.params).copied().collect(),
            state: self.state.kron(&other.state)?,
            projector: self.projector.kron(&other.projector),
        })
    }

    /// Canonical `name[:p1,p2]` label.
    pub fn label(&self) -> String {
        if self.params.is_empty() {
            self.name.clone()
        } else {
            let ps: Vec<String> = self.params.iter().map(|p| format!("{p}")).collect();
            format!("{}:{}", self.name, ps.join(","))
        }
    }
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Basis ket `|i_A j_B⟩`.
pub fn basis_ket(dim_a: usize, dim_b: usize, i: usize, j: usize) -> Vec<C64> {
    let mut v = vec![c(0.0); dim_a * dim_b];
    v[i * dim_b + j] = c(1.0);
    v
}

/// Normalized copy of `coeffs` on `dim_a ⊗ dim_b`.
pub fn make_ket(coeffs: &[C64], dim_a: usize, dim_b: usize) -> Result<Vec<C64>> {
    if coeffs.len() != dim_a * dim_b {
        return Err(Error::DimensionMismatch(format!("{} coefficients for {dim_a}⊗{dim_b}", coeffs.len())));
    }
    let norm = crate::linalg::vec_norm(coeffs);
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::ZeroVector);
    }
    Ok(coeffs.iter().map(|z| z / norm).collect())
}

/// `Σ_k w_k |k⟩` on 3⊗3 from `(i, j, w)` triples.
fn ket3(terms: &[(usize, usize, f64)]) -> Vec<C64> {
    let mut v = vec![c(0.0); 9];
    for &(i, j, w) in terms {
        v[i * 3 + j] += c(w);
    }
    v
}

/// `|v1⟩ = (|01⟩ − |10⟩)/√2`.
pub fn ket_v1() -> Vec<C64> {
    ket3(&[(0, 1, FRAC_1_SQRT_2), (1, 0, -FRAC_1_SQRT_2)])
}

/// `|v2⟩ = (|02⟩ − |20⟩)/√2`.
pub fn ket_v2() -> Vec<C64> {
    ket3(&[(0, 2, FRAC_1_SQRT_2), (2, 0, -FRAC_1_SQRT_2)])
}

/// `|r1⟩ = (|01⟩ + |10⟩)/√2`.
pub fn ket_r1() -> Vec<C64> {
    ket3(&[(0, 1, FRAC_1_SQRT_2), (1, 0, FRAC_1_SQRT_2)])
}

/// `|r2⟩ = (|02⟩ + |20⟩)/√2`.
pub fn ket_r2() -> Vec<C64> {
    ket3(&[(0, 2, FRAC_1_SQRT_2), (2, 0, FRAC_1_SQRT_2)])
}

/// `|ψ1⟩ = √α|01⟩ − √(1−α)|10⟩`.
pub fn ket_psi1(alpha: f64) -> Vec<C64> {
    ket3(&[(0, 1, alpha.sqrt()), (1, 0, -(1.0 - alpha).sqrt())])
}

/// `|ψ2⟩ = √α|02⟩ − √(1−α)|20⟩`.
pub fn ket_psi2(alpha: f64) -> Vec<C64> {
    ket3(&[(0, 2, alpha.sqrt()), (2, 0, -(1.0 - alpha).sqrt())])
}

/// `|u2⟩ = [(cosθ|0⟩ + sinθ|1⟩)⊗|2⟩ − |2⟩⊗(cosθ|0⟩ + sinθ|1⟩)]/√2`.
pub fn ket_u2(theta: f64) -> Vec<C64> {
    let (s, co) = theta.sin_cos();
    let h = FRAC_1_SQRT_2;
    ket3(&[(0, 2, co * h), (1, 2, s * h), (2, 0, -co * h), (2, 1, -s * h)])
}

/// `|00⟩ + |11⟩ + |22⟩` (unnormalized).
pub fn ket_phi_plus3() -> Vec<C64> {
    ket3(&[(0, 0, 1.0), (1, 1, 1.0), (2, 2, 1.0)])
}

fn mixture(dim_a: usize, dim_b: usize, parts: &[(f64, &[C64])]) -> Result<DensityMatrix> {
    let mut acc = BipartiteOperator::zeros(dim_a, dim_b);
    for (w, k) in parts {
        acc = acc.add(&BipartiteOperator::projector(dim_a, dim_b, k)?.scale(*w))?;
    }
    DensityMatrix::new(acc)
}

/// `ρ_v = (|v1⟩⟨v1| + |v2⟩⟨v2|)/2` on 3⊗3.
pub fn make_rho_v() -> NamedState {
    let (v1, v2) = (ket_v1(), ket_v2());
    NamedState {
        name: "rho_v".into(),
        params: vec![],
        state: mixture(3, 3, &[(0.5, &v1), (0.5, &v2)]).expect("rho_v is a valid state"),
        projector: SupportProjector::from_orthonormal(3, 3, &[v1, v2]).expect("orthonormal kets"),
    }
}

/// `ρ^(α) = (|ψ1⟩⟨ψ1| + |ψ2⟩⟨ψ2|)/2` for `0 < α < 1`.
pub fn make_rho_alpha(alpha: f64) -> Result<NamedState> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::BadParameter(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let (p1, p2) = (ket_psi1(alpha), ket_psi2(alpha));
    Ok(NamedState {
        name: "rho_alpha".into(),
        params: vec![alpha],
        state: mixture(3, 3, &[(0.5, &p1), (0.5, &p2)])?,
        projector: SupportProjector::from_orthonormal(3, 3, &[p1, p2])?,
    })
}

/// `p|u1⟩⟨u1| + (1−p)|u2⟩⟨u2|` with `|u1⟩ = |v1⟩` and `|u2⟩` rotated by `θ`.
pub fn make_ranktwo_antisym(p: f64, theta: f64) -> Result<NamedState> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::BadParameter(format!("p must lie in (0, 1), got {p}")));
    }
    if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&theta) {
        return Err(Error::BadParameter(format!("theta must lie in [0, π/2], got {theta}")));
    }
    let (u1, u2) = (ket_v1(), ket_u2(theta));
    Ok(NamedState {
        name: "ranktwo".into(),
        params: vec![p, theta],
        state: mixture(3, 3, &[(p, &u1), (1.0 - p, &u2)])?,
        projector: SupportProjector::from_orthonormal(3, 3, &[u1, u2])?,
    })
}

/// `Φ(d) = (1/d) Σ_ij |ii⟩⟨jj|`.
pub fn make_max_entangled(d: usize) -> Result<NamedState> {
    if d < 2 {
        return Err(Error::BadParameter(format!("maximally entangled state needs d >= 2, got {d}")));
    }
    let inv = 1.0 / (d as f64).sqrt();
    let mut phi = vec![c(0.0); d * d];
    for i in 0..d {
        phi[i * d + i] = c(inv);
    }
    let state = DensityMatrix::new(BipartiteOperator::projector(d, d, &phi)?)?;
    Ok(NamedState {
        name: "maxent".into(),
        params: vec![d as f64],
        projector: SupportProjector::new(state.op().clone())?,
        state,
    })
}

/// `σ_a = (1 − SWAP)/6`, the normalized projector onto the 3⊗3 antisymmetric subspace.
pub fn make_antisymmetric_state() -> NamedState {
    let anti = BipartiteOperator::identity(3, 3)
        .sub(&BipartiteOperator::swap(3))
        .expect("same dims")
        .scale(0.5);
    NamedState {
        name: "antisym3".into(),
        params: vec![],
        state: DensityMatrix::new(anti.scale(1.0 / 3.0)).expect("valid state"),
        projector: SupportProjector::new(anti).expect("antisymmetric projector"),
    }
}

/// `|00⟩⟨00|` on `d ⊗ d`.
pub fn make_product_zero(d: usize) -> Result<NamedState> {
    if d < 1 {
        return Err(Error::BadParameter("dimension must be positive".into()));
    }
    let state = DensityMatrix::pure(d, d, &basis_ket(d, d, 0, 0))?;
    Ok(NamedState {
        name: "product".into(),
        params: vec![d as f64],
        projector: SupportProjector::new(state.op().clone())?,
        state,
    })
}

/// `Q = |01⟩⟨01| + |10⟩⟨10| + |02⟩⟨02| + |20⟩⟨20|`.
pub fn make_q_operator() -> BipartiteOperator {
    let mut m = ComplexMatrix::zeros(9, 9);
    for (i, j) in [(0, 1), (1, 0), (0, 2), (2, 0)] {
        m[(i * 3 + j, i * 3 + j)] = c(1.0);
    }
    BipartiteOperator::new(3, 3, m).expect("9x9 on 3⊗3")
}

/// The PPT state `τ = Q/4`.
pub fn make_tau() -> DensityMatrix {
    DensityMatrix::new(make_q_operator().scale(0.25)).expect("Q/4 is a state")
}

/// `τ` as a named state.
pub fn make_tau_named() -> NamedState {
    let q = make_q_operator();
    NamedState {
        name: "tau".into(),
        params: vec![],
        state: make_tau(),
        projector: SupportProjector::new(q).expect("Q is a projector"),
    }
}

/// Parses `name[:p1,p2]` into a named state.
///
/// Recognized names: `rho_v`, `rho_alpha:α`, `ranktwo:p,θ`, `antisym3`, `maxent:d`,
/// plus `tau` (`Q/4`) and `product:d` (`|00⟩⟨00|` on `d⊗d`).
pub fn parse_state_spec(spec: &str) -> Result<NamedState> {
    let (name, args) = match spec.split_once(':') {
        Some((n, a)) => (n.trim(), Some(a)),
        None => (spec.trim(), None),
    };
    let params: Vec<f64> = match args {
        Some(a) => a
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| Error::BadParameter(format!("cannot parse '{s}' in '{spec}'"))))
            .collect::<Result<_>>()?,
        None => vec![],
    };
    let expect = |n: usize| -> Result<()> {
        if params.len() == n {
            Ok(())
        } else {
            Err(Error::BadParameter(format!("'{name}' takes {n} parameter(s), got {}", params.len())))
        }
    };
    let as_dim = |x: f64| -> Result<usize> {
        if x.fract() == 0.0 && x >= 1.0 && x <= 64.0 {
            Ok(x as usize)
        } else {
            Err(Error::BadParameter(format!("dimension must be a positive integer, got {x}")))
        }
    };
    match name {
        "rho_v" => {
            expect(0)?;
            Ok(make_rho_v())
        }
        "rho_alpha" => {
            expect(1)?;
            make_rho_alpha(params[0])
        }
        "ranktwo" => {
            expect(2)?;
            make_ranktwo_antisym(params[0], params[1])
        }
        "antisym3" => {
            expect(0)?;
            Ok(make_antisymmetric_state())
        }
        "maxent" => {
            expect(1)?;
            make_max_entangled(as_dim(params[0])?)
        }
        "tau" => {
            expect(0)?;
            Ok(make_tau_named())
        }
        "product" => {
            expect(1)?;
            make_product_zero(as_dim(params[0])?)
        }
        other => Err(Error::BadParameter(format!("unknown state name '{other}'"))),
    }
}

/// Numerical support projector with the default cutoff, for states read from files.
pub fn named_from_density(name: &str, state: DensityMatrix) -> Result<NamedState> {
    NamedState::from_state(name, vec![], state, DEFAULT_SUPPORT_CUTOFF)
}
