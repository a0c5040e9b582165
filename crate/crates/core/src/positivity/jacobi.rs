//! Cyclic Jacobi eigenvalues for real symmetric and complex Hermitian
//! matrices.

use num_complex::Complex64;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues of the symmetric `n×n` row-major matrix `a`, ascending.
pub fn symmetric_eigenvalues(mut a: Vec<f64>, n: usize) -> Vec<f64> {
    assert_eq!(a.len(), n * n);
    let idx = |i: usize, j: usize| i * n + j;
    let frob: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[idx(i, j)] * a[idx(i, j)])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-17 * frob || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[idx(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[idx(q, q)] - a[idx(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[idx(k, p)];
                    let akq = a[idx(k, q)];
                    a[idx(k, p)] = c * akp - s * akq;
                    a[idx(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[idx(p, k)];
                    let aqk = a[idx(q, k)];
                    a[idx(p, k)] = c * apk - s * aqk;
                    a[idx(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[idx(i, i)]).collect();
    eig.sort_by(f64::total_cmp);
    eig
}

/// Eigenvalues of a Hermitian matrix, ascending, via the real embedding
/// `[[A, −B], [B, A]]` whose spectrum repeats each eigenvalue twice.
pub fn hermitian_eigenvalues(m: &[Vec<Complex64>]) -> Vec<f64> {
    let r = m.len();
    let n = 2 * r;
    let mut a = vec![0.0; n * n];
    for i in 0..r {
        for j in 0..r {
            let z = m[i][j];
            a[i * n + j] = z.re;
            a[(i + r) * n + j + r] = z.re;
            a[i * n + j + r] = -z.im;
            a[(i + r) * n + j] = z.im;
        }
    }
    symmetric_eigenvalues(a, n).into_iter().step_by(2).collect()
}
