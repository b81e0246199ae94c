//! Block linear-matrix-inequality problems.
//!
//! A problem reads
//!
//! ```text
//! maximize  b·y
//! subject to  C_k − Σ_i y_i A_{k,i} ⪰ 0   for every block k
//! ```
//!
//! Constant matrices are dense; coefficient matrices are stored sparsely
//! because every coefficient produced by the measure compilers touches a
//! handful of entries.

use std::io::{self, Write};

use super::dense::RealMatrix;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// Real symmetric sparse matrix holding both triangles explicitly.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseSym {
    entries: Vec<(usize, usize, f64)>,
}

impl SparseSym {
    /// Builds from upper- or lower-triangle triplets; off-diagonal entries are mirrored.
    /// Duplicate positions are summed.
    pub fn from_triangle(triplets: impl IntoIterator<Item = (usize, usize, f64)>) -> Self {
        let mut full = Vec::new();
        for (i, j, v) in triplets {
            if v == 0.0 {
                continue;
            }
            full.push((i, j, v));
            if i != j {
                full.push((j, i, v));
            }
        }
        Self::from_full(full)
    }

    /// Builds from triplets that already list both triangles.
    pub fn from_full(mut entries: Vec<(usize, usize, f64)>) -> Self {
        entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(entries.len());
        for (i, j, v) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == i && last.1 == j => last.2 += v,
                _ => merged.push((i, j, v)),
            }
        }
        merged.retain(|e| e.2 != 0.0);
        Self { entries: merged }
    }

    pub fn from_dense(m: &RealMatrix) -> Self {
        let n = m.n();
        let mut entries = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let v = m.get(i, j);
                if v != 0.0 {
                    entries.push((i, j, v));
                }
            }
        }
        Self { entries }
    }

    pub fn identity(n: usize, scale: f64) -> Self {
        Self { entries: (0..n).map(|i| (i, i, scale)).collect() }
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { entries: self.entries.iter().map(|&(i, j, v)| (i, j, v * s)).collect() }
    }

    pub fn to_dense(&self, n: usize) -> RealMatrix {
        let mut m = RealMatrix::zeros(n);
        for &(i, j, v) in &self.entries {
            m.add_at(i, j, v);
        }
        m
    }

    /// `tr(A · G)` for any square `G`.
    pub fn trace_with(&self, g: &RealMatrix) -> f64 {
        self.entries.iter().map(|&(p, q, a)| a * g.get(q, p)).sum()
    }

    /// `out += s · A`.
    pub fn add_scaled_to(&self, out: &mut RealMatrix, s: f64) {
        for &(i, j, v) in &self.entries {
            out.add_at(i, j, s * v);
        }
    }

    fn max_index(&self) -> Option<usize> {
        self.entries.iter().map(|&(i, j, _)| i.max(j)).max()
    }

    fn asymmetry(&self, n: usize) -> f64 {
        self.to_dense(n).max_asymmetry()
    }
}

/// One LMI block `C − Σ_i y_i A_i ⪰ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LmiBlock {
    constant: RealMatrix,
    /// `(variable index, A_i)` sorted by variable, without duplicates.
    terms: Vec<(usize, SparseSym)>,
}

impl LmiBlock {
    pub fn new(constant: RealMatrix) -> Self {
        Self { constant, terms: Vec::new() }
    }

    pub fn zero(size: usize) -> Self {
        Self::new(RealMatrix::zeros(size))
    }

    pub fn size(&self) -> usize {
        self.constant.n()
    }

    pub fn constant(&self) -> &RealMatrix {
        &self.constant
    }

    pub fn constant_mut(&mut self) -> &mut RealMatrix {
        &mut self.constant
    }

    pub fn terms(&self) -> &[(usize, SparseSym)] {
        &self.terms
    }

    /// Adds `A` to the coefficient of variable `var`, merging with any existing term.
    pub fn add_term(&mut self, var: usize, a: SparseSym) {
        if a.is_empty() {
            return;
        }
        match self.terms.binary_search_by_key(&var, |t| t.0) {
            Ok(pos) => {
                let mut merged = self.terms[pos].1.entries.clone();
                merged.extend_from_slice(&a.entries);
                self.terms[pos].1 = SparseSym::from_full(merged);
                if self.terms[pos].1.is_empty() {
                    self.terms.remove(pos);
                }
            }
            Err(pos) => self.terms.insert(pos, (var, a)),
        }
    }

    /// `C − Σ y_i A_i`.
    pub fn slack(&self, y: &[f64]) -> RealMatrix {
        let mut s = self.constant.clone();
        for (var, a) in &self.terms {
            a.add_scaled_to(&mut s, -y[*var]);
        }
        s
    }

    /// `Σ y_i A_i`.
    pub fn combination(&self, y: &[f64]) -> RealMatrix {
        let mut s = RealMatrix::zeros(self.size());
        for (var, a) in &self.terms {
            a.add_scaled_to(&mut s, y[*var]);
        }
        s
    }
}

/// `maximize b·y  s.t.  C_k − Σ y_i A_{k,i} ⪰ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LmiProblem {
    objective: Vec<f64>,
    blocks: Vec<LmiBlock>,
}

impl LmiProblem {
    pub fn new(objective: Vec<f64>, blocks: Vec<LmiBlock>) -> Result<Self> {
        let p = Self { objective, blocks };
        p.validate()?;
        Ok(p)
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn blocks(&self) -> &[LmiBlock] {
        &self.blocks
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(LmiBlock::size).collect()
    }

    /// Checks shapes, variable indices, symmetry (1e-12) and finiteness.
    pub fn validate(&self) -> Result<()> {
        if self.blocks.is_empty() {
            return Err(Error::MalformedProblem("at least one block is required".into()));
        }
        if self.objective.iter().any(|b| !b.is_finite()) {
            return Err(Error::MalformedProblem("objective has non-finite entries".into()));
        }
        let m = self.num_vars();
        for (k, block) in self.blocks.iter().enumerate() {
            let n = block.size();
            if n == 0 {
                return Err(Error::MalformedProblem(format!("block {k} is empty")));
            }
            if block.constant.as_slice().iter().any(|x| !x.is_finite()) {
                return Err(Error::MalformedProblem(format!("block {k} constant has non-finite entries")));
            }
            if block.constant.max_asymmetry() > 1e-12 {
                return Err(Error::MalformedProblem(format!("block {k} constant is not symmetric")));
            }
            for (var, a) in &block.terms {
                if *var >= m {
                    return Err(Error::MalformedProblem(format!("block {k} references variable {var} of {m}")));
                }
                if a.max_index().is_some_and(|i| i >= n) {
                    return Err(Error::MalformedProblem(format!("block {k} coefficient {var} exceeds size {n}")));
                }
                if a.entries.iter().any(|e| !e.2.is_finite()) || a.asymmetry(n) > 1e-12 {
                    return Err(Error::MalformedProblem(format!("block {k} coefficient {var} is not finite symmetric")));
                }
            }
        }
        Ok(())
    }

    /// Slack matrices `S_k(y)`.
    pub fn slacks(&self, y: &[f64]) -> Vec<RealMatrix> {
        self.blocks.iter().map(|b| b.slack(y)).collect()
    }

    /// `A(X)_i = Σ_k tr(A_{k,i} X_k)`.
    pub fn adjoint_map(&self, x: &[RealMatrix]) -> Vec<f64> {
        let mut out = vec![0.0; self.num_vars()];
        for (block, xk) in self.blocks.iter().zip(x) {
            for (var, a) in &block.terms {
                out[*var] += a.trace_with(xk);
            }
        }
        out
    }

    /// Writes the plain-text dump format:
    ///
    /// ```text
    /// lmi 1
    /// vars <m>
    /// objective <b_0> … <b_{m-1}>
    /// blocks <K>
    /// block <k> size <n> terms <T>
    /// <n rows of the constant, row-major>
    /// term <var> nnz <E>
    /// <i> <j> <value>          (upper triangle, E lines)
    /// ```
    pub fn write_text<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "lmi 1")?;
        writeln!(w, "vars {}", self.num_vars())?;
        let obj: Vec<String> = self.objective.iter().map(|b| format!("{b:e}")).collect();
        writeln!(w, "objective {}", obj.join(" "))?;
        writeln!(w, "blocks {}", self.blocks.len())?;
        for (k, block) in self.blocks.iter().enumerate() {
            let n = block.size();
            writeln!(w, "block {k} size {n} terms {}", block.terms.len())?;
            for i in 0..n {
                let row: Vec<String> = block.constant.row(i).iter().map(|x| format!("{x:e}")).collect();
                writeln!(w, "{}", row.join(" "))?;
            }
            for (var, a) in &block.terms {
                let upper: Vec<_> = a.entries.iter().filter(|e| e.0 <= e.1).collect();
                writeln!(w, "term {var} nnz {}", upper.len())?;
                for (i, j, v) in upper {
                    writeln!(w, "{i} {j} {v:e}")?;
                }
            }
        }
        Ok(())
    }
}

/// `[[Re H, −Im H], [Im H, Re H]]`; PSD exactly when `H` is, with every eigenvalue doubled.
pub fn realify_hermitian(h: &ComplexMatrix) -> Result<RealMatrix> {
    if !h.is_square() {
        return Err(Error::NotSquare { rows: h.rows(), cols: h.cols() });
    }
    let defect = h.hermiticity_defect();
    if defect > 1e-10 * h.max_abs().max(1.0) {
        return Err(Error::NotHermitian(defect));
    }
    let n = h.rows();
    Ok(RealMatrix::from_fn(2 * n, |i, j| {
        let z = h[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigvals_hermitian, C64};

    #[test]
    fn sparse_merging_and_trace() {
        let a = SparseSym::from_triangle([(0, 1, 2.0), (1, 1, 3.0), (0, 1, -1.0)]);
        assert_eq!(a.nnz(), 3);
        let g = RealMatrix::from_vec(2, vec![1.0, 2.0, 3.0, 4.0]);
        // tr(A G) with A = [[0,1],[1,3]]
        assert_eq!(a.trace_with(&g), 3.0 + 2.0 + 12.0);
    }

    #[test]
    fn validation_catches_errors() {
        let mut b = LmiBlock::zero(2);
        b.add_term(3, SparseSym::identity(2, 1.0));
        assert!(matches!(LmiProblem::new(vec![1.0], vec![b]), Err(Error::MalformedProblem(_))));
        assert!(matches!(LmiProblem::new(vec![1.0], vec![]), Err(Error::MalformedProblem(_))));
        let asym = LmiBlock::new(RealMatrix::from_vec(2, vec![0.0, 1.0, 0.0, 0.0]));
        assert!(matches!(LmiProblem::new(vec![], vec![asym]), Err(Error::MalformedProblem(_))));
    }

    #[test]
    fn add_term_merges_and_cancels() {
        let mut b = LmiBlock::zero(2);
        b.add_term(0, SparseSym::identity(2, 1.0));
        b.add_term(0, SparseSym::identity(2, -1.0));
        assert!(b.terms().is_empty());
    }

    #[test]
    fn realify_real_input_is_block_diagonal() {
        let h = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 2.0, 5.0]).unwrap();
        let r = realify_hermitian(&h).unwrap();
        assert_eq!(r.get(0, 1), 2.0);
        assert_eq!(r.get(2, 3), 2.0);
        assert_eq!(r.get(0, 2), 0.0);
        assert_eq!(r.get(3, 1), 0.0);
    }

    #[test]
    fn realify_pauli_y_doubles_spectrum() {
        let zero = C64::new(0.0, 0.0);
        let y = ComplexMatrix::from_vec(2, 2, vec![zero, -C64::i(), C64::i(), zero]).unwrap();
        let vals = realify_hermitian(&y).unwrap().symmetric_eigen().unwrap().values;
        let expected = [-1.0, -1.0, 1.0, 1.0];
        for (v, e) in vals.iter().zip(expected) {
            assert!((v - e).abs() < 1e-14);
        }
        assert_eq!(eigvals_hermitian(&y).unwrap().len(), 2);
    }

    #[test]
    fn dump_format_lists_upper_triangle() {
        let mut b = LmiBlock::new(RealMatrix::identity(2));
        b.add_term(0, SparseSym::from_triangle([(0, 1, 1.0)]));
        let p = LmiProblem::new(vec![1.0], vec![b]).unwrap();
        let mut out = Vec::new();
        p.write_text(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("lmi 1\nvars 1\n"));
        assert!(text.contains("term 0 nnz 1\n0 1 1e0\n"));
    }
}
