//! Cyclic Jacobi diagonalization of small Hermitian matrices.

use super::matrix::{Matrix, C64};

/// Off-diagonal Frobenius norm at which iteration stops.
pub const JACOBI_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// Eigenvalues (ascending) and matching unit eigenvectors of a Hermitian matrix.
///
/// Each pivot `(p, q)` first removes the phase of `A[p][q]` with a diagonal unitary
/// and then applies a real Givens rotation, so one step is `J = D·R`.
pub fn hermitian_eigen(m: &Matrix) -> (Vec<f64>, Vec<Vec<C64>>) {
    let n = m.dim();
    let mut a = m.clone();
    let mut v = Matrix::identity(n);
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) < JACOBI_TOL {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let b = a[(p, q)];
                let mag = b.norm();
                if mag < 1e-300 {
                    continue;
                }
                let phase = b / mag; // e^{iφ}
                let (app, aqq) = (a[(p, p)].re, a[(q, q)].re);
                let t = 0.5 * (2.0 * mag).atan2(aqq - app);
                let (s, c) = t.sin_cos();
                let jqp = -phase.conj() * s; // J[q][p]
                let jqq = phase.conj() * c; // J[q][q]
                // A ← A·J on columns p, q
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = akp * c + akq * jqp;
                    a[(k, q)] = akp * s + akq * jqq;
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = vkp * c + vkq * jqp;
                    v[(k, q)] = vkp * s + vkq * jqq;
                }
                // A ← J†·A on rows p, q
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = apk * c + aqk * jqp.conj();
                    a[(q, k)] = apk * s + aqk * jqq.conj();
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = order
        .iter()
        .map(|&i| (0..n).map(|k| v[(k, i)]).collect())
        .collect();
    (values, vectors)
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigenvalues(m: &Matrix) -> Vec<f64> {
    hermitian_eigen(m).0
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                s += a[(r, c)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, seed: u64) -> Matrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = Matrix::zeros(n);
        for r in 0..n {
            m[(r, r)] = C64::new(rng.gen_range(-1.0..1.0), 0.0);
            for c in r + 1..n {
                let z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                m[(r, c)] = z;
                m[(c, r)] = z.conj();
            }
        }
        m
    }

    #[test]
    fn reconstructs_random_hermitian() {
        for seed in 0..5 {
            let m = random_hermitian(12, seed);
            let (vals, vecs) = hermitian_eigen(&m);
            for (lambda, v) in vals.iter().zip(&vecs) {
                let mv = m.apply(v);
                let err = mv
                    .iter()
                    .zip(v)
                    .map(|(a, b)| (a - b * lambda).norm())
                    .fold(0.0, f64::max);
                assert!(err < 1e-10, "residual {err}");
            }
            assert!(vals.windows(2).all(|w| w[0] <= w[1]));
            let tr: f64 = vals.iter().sum();
            assert!((tr - m.trace().re).abs() < 1e-10);
        }
    }

    #[test]
    fn two_by_two_known_spectrum() {
        // [[1, i],[-i, 1]] has eigenvalues 0 and 2
        let m = Matrix::from_rows(
            2,
            vec![
                C64::new(1.0, 0.0),
                C64::new(0.0, 1.0),
                C64::new(0.0, -1.0),
                C64::new(1.0, 0.0),
            ],
        );
        let vals = hermitian_eigenvalues(&m);
        assert!((vals[0]).abs() < 1e-14 && (vals[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn degenerate_spectrum() {
        let vals = hermitian_eigenvalues(&Matrix::identity(4));
        assert_eq!(vals, vec![1.0; 4]);
    }
}
