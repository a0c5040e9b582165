//! Even Bernoulli numbers `B₂ … B₆₀`, generated once from exact rationals.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Highest even index held by the table.
pub const MAX_INDEX: usize = 60;

pub struct BernoulliTable {
    /// `B_{2k}` for `k = 1..=30`, stored at `k - 1`.
    values: Vec<f64>,
    /// `B_{2k} / (2k)!`, the Euler–Maclaurin weights.
    em_weights: Vec<f64>,
    /// `B_{2k} / (2k(2k-1))`, the Stirling series weights.
    stirling_weights: Vec<f64>,
}

/// Exact `B_0 … B_n` by the Akiyama–Tanigawa recurrence (`B_1 = +1/2`
/// convention; only even indices are used).
fn exact_bernoulli(n: usize) -> Vec<BigRational> {
    let mut row: Vec<BigRational> = Vec::with_capacity(n + 1);
    let mut out = Vec::with_capacity(n + 1);
    for m in 0..=n {
        row.push(BigRational::new(BigInt::one(), BigInt::from(m + 1)));
        for j in (1..=m).rev() {
            let diff = &row[j - 1] - &row[j];
            row[j - 1] = diff * BigRational::from_integer(BigInt::from(j));
        }
        out.push(row[0].clone());
    }
    out
}

impl BernoulliTable {
    fn build() -> Self {
        let exact = exact_bernoulli(MAX_INDEX);
        let mut values = Vec::new();
        let mut em_weights = Vec::new();
        let mut stirling_weights = Vec::new();
        let mut factorial = BigInt::one();
        for n in 1..=MAX_INDEX {
            factorial *= BigInt::from(n);
            if n % 2 == 1 {
                continue;
            }
            let b = &exact[n];
            debug_assert!(!b.is_zero());
            values.push(b.to_f64().expect("finite Bernoulli number"));
            em_weights.push(
                (b / BigRational::from_integer(factorial.clone()))
                    .to_f64()
                    .expect("finite weight"),
            );
            stirling_weights.push(
                (b / BigRational::from_integer(BigInt::from(n * (n - 1))))
                    .to_f64()
                    .expect("finite weight"),
            );
        }
        Self {
            values,
            em_weights,
            stirling_weights,
        }
    }

    pub fn get() -> &'static Self {
        static TABLE: OnceLock<BernoulliTable> = OnceLock::new();
        TABLE.get_or_init(Self::build)
    }

    /// `B_{2k}`, `k ≥ 1`.
    pub fn b2k(&self, k: usize) -> f64 {
        self.values[k - 1]
    }

    pub fn em_weight(&self, k: usize) -> f64 {
        self.em_weights[k - 1]
    }

    pub fn stirling_weight(&self, k: usize) -> f64 {
        self.stirling_weights[k - 1]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}
