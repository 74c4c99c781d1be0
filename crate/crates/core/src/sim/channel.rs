use super::matrix::Matrix;
use crate::error::{Error, Result};

/// Completeness tolerance for `Σ E_k†E_k = I`.
pub const COMPLETENESS_TOL: f64 = 1e-10;

/// Trace-preserving channel in operator-sum form acting on 1 or 2 qubits.
///
/// The superoperator `Σ_k conj(E_k) ⊗ E_k` is precomputed so that application to a
/// density matrix is a single local matrix product over row and column bits.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    arity: usize,
    operators: Vec<Matrix>,
    superop: Matrix,
}

impl KrausChannel {
    pub fn new(arity: usize, operators: Vec<Matrix>) -> Result<Self> {
        if arity == 0 || arity > 2 {
            return Err(Error::InvalidArity(arity));
        }
        let dim = 1usize << arity;
        if let Some(bad) = operators.iter().find(|e| e.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: bad.dim(),
            });
        }
        let deviation = completeness_deviation(dim, &operators);
        if deviation > COMPLETENESS_TOL {
            return Err(Error::NotTracePreserving(deviation));
        }
        let mut superop = Matrix::zeros(dim * dim);
        for e in &operators {
            superop.add_assign(&e.conj().kron(e));
        }
        Ok(Self {
            arity,
            operators,
            superop,
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn operators(&self) -> &[Matrix] {
        &self.operators
    }

    pub fn superoperator(&self) -> &Matrix {
        &self.superop
    }

    /// Max elementwise deviation of `Σ E_k†E_k` from the identity.
    pub fn completeness_deviation(&self) -> f64 {
        completeness_deviation(1 << self.arity, &self.operators)
    }
}

fn completeness_deviation(dim: usize, operators: &[Matrix]) -> f64 {
    let mut sum = Matrix::zeros(dim);
    for e in operators {
        sum.add_assign(&e.dagger().matmul(e));
    }
    sum.max_abs_diff(&Matrix::identity(dim))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::matrix::C64;

    #[test]
    fn rejects_non_trace_preserving() {
        let half = Matrix::identity(2).scale(C64::new(0.5, 0.0));
        assert!(matches!(
            KrausChannel::new(1, vec![half]),
            Err(Error::NotTracePreserving(_))
        ));
    }

    #[test]
    fn rejects_bad_arity_and_dimension() {
        assert!(matches!(
            KrausChannel::new(3, vec![Matrix::identity(8)]),
            Err(Error::InvalidArity(3))
        ));
        assert!(KrausChannel::new(2, vec![Matrix::identity(2)]).is_err());
    }

    #[test]
    fn identity_superoperator() {
        let ch = KrausChannel::new(1, vec![Matrix::identity(2)]).unwrap();
        assert_eq!(ch.superoperator(), &Matrix::identity(4));
    }
}
