//! Replica-space operators and the superoperators built from them.
//!
//! Basis conventions used everywhere in the crate:
//!
//! * single qubit: `|0⟩` (ground) is index 0, `|1⟩` (excited) is index 1, and
//!   the lowering operator maps `|1⟩ → |0⟩`;
//! * replica 1 is the leftmost tensor factor, so in a basis index replica `k`
//!   of `M` occupies bit `M - k`;
//! * vectorization is row-major: `ρ[i][j]` lands at `i·d + j`, which turns
//!   `A ρ B` into `(A ⊗ Bᵀ)·vec(ρ)`.

use alloc::vec::Vec;
use core::ops::{Add, AddAssign, Mul};

use faer::{c64, Mat, MatRef};

use crate::error::{Error, Result};

const ZERO: c64 = c64 { re: 0.0, im: 0.0 };
const ONE: c64 = c64 { re: 1.0, im: 0.0 };

/// Dense operator on the `2^M`-dimensional Hilbert space of `M` qubit replicas.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicaOperator {
    replicas: usize,
    matrix: Mat<c64>,
}

/// Dense linear map on vectorized replica operators, dimension `4^M`.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperOperator {
    replicas: usize,
    matrix: Mat<c64>,
}

fn log_base(n: usize, base: usize) -> Option<usize> {
    let mut k = 0;
    let mut v = 1usize;
    while v < n {
        v = v.checked_mul(base)?;
        k += 1;
    }
    (v == n && k > 0).then_some(k)
}

fn check_finite(m: MatRef<'_, c64>) -> Result<()> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let z = m[(i, j)];
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(())
}

fn check_square(m: MatRef<'_, c64>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            left: m.nrows(),
            right: m.ncols(),
        });
    }
    Ok(m.nrows())
}

impl ReplicaOperator {
    pub fn from_matrix(matrix: Mat<c64>) -> Result<Self> {
        let dim = check_square(matrix.as_ref())?;
        let replicas = log_base(dim, 2).ok_or(Error::NotPowerOf(dim, 2))?;
        check_finite(matrix.as_ref())?;
        Ok(Self { replicas, matrix })
    }

    pub fn identity(replicas: usize) -> Self {
        let d = 1usize << replicas;
        Self {
            replicas,
            matrix: Mat::from_fn(d, d, |i, j| if i == j { ONE } else { ZERO }),
        }
    }

    /// `I^⊗(k-1) ⊗ local ⊗ I^⊗(M-k)` for a 2×2 `local` acting on replica `k`
    /// (1-based).
    pub fn embed(local: [[c64; 2]; 2], k: usize, replicas: usize) -> Result<Self> {
        if k == 0 || k > replicas {
            return Err(Error::ReplicaIndex { index: k, replicas });
        }
        let d = 1usize << replicas;
        let shift = replicas - k;
        let others = !(1usize << shift);
        let matrix = Mat::from_fn(d, d, |r, c| {
            if r & others == c & others {
                local[(r >> shift) & 1][(c >> shift) & 1]
            } else {
                ZERO
            }
        });
        Ok(Self { replicas, matrix })
    }

    pub fn replicas(&self) -> usize {
        self.replicas
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> MatRef<'_, c64> {
        self.matrix.as_ref()
    }

    pub fn get(&self, row: usize, col: usize) -> c64 {
        self.matrix[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self {
            replicas: self.replicas,
            matrix: self.matrix.adjoint().to_owned(),
        }
    }

    pub fn scale(&self, s: c64) -> Self {
        Self {
            replicas: self.replicas,
            matrix: Mat::from_fn(self.dim(), self.dim(), |i, j| self.matrix[(i, j)] * s),
        }
    }
}

impl Mul for &ReplicaOperator {
    type Output = ReplicaOperator;

    fn mul(self, rhs: &ReplicaOperator) -> ReplicaOperator {
        assert_eq!(self.replicas, rhs.replicas, "replica count mismatch");
        ReplicaOperator {
            replicas: self.replicas,
            matrix: &self.matrix * &rhs.matrix,
        }
    }
}

impl Add for &ReplicaOperator {
    type Output = ReplicaOperator;

    fn add(self, rhs: &ReplicaOperator) -> ReplicaOperator {
        assert_eq!(self.replicas, rhs.replicas, "replica count mismatch");
        ReplicaOperator {
            replicas: self.replicas,
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

const SIGMA: [[c64; 2]; 2] = [[ZERO, ONE], [ZERO, ZERO]];
const SIGMA_DAG: [[c64; 2]; 2] = [[ZERO, ZERO], [ONE, ZERO]];
const PAULI_X: [[c64; 2]; 2] = [[ZERO, ONE], [ONE, ZERO]];
const PAULI_Z: [[c64; 2]; 2] = [[ONE, ZERO], [ZERO, c64 { re: -1.0, im: 0.0 }]];

/// Lowering operator `σ = |0⟩⟨1|` on replica `k` of `replicas`.
pub fn lowering(k: usize, replicas: usize) -> Result<ReplicaOperator> {
    ReplicaOperator::embed(SIGMA, k, replicas)
}

/// Raising operator `σ† = |1⟩⟨0|` on replica `k`.
pub fn raising(k: usize, replicas: usize) -> Result<ReplicaOperator> {
    ReplicaOperator::embed(SIGMA_DAG, k, replicas)
}

pub fn pauli_x(k: usize, replicas: usize) -> Result<ReplicaOperator> {
    ReplicaOperator::embed(PAULI_X, k, replicas)
}

/// `Z = diag(1, -1)` on replica `k`.
pub fn pauli_z(k: usize, replicas: usize) -> Result<ReplicaOperator> {
    ReplicaOperator::embed(PAULI_Z, k, replicas)
}

pub fn vectorize(a: &ReplicaOperator) -> Vec<c64> {
    let d = a.dim();
    let mut v = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            v.push(a.matrix[(i, j)]);
        }
    }
    v
}

pub fn devectorize(v: &[c64]) -> Result<ReplicaOperator> {
    let replicas = log_base(v.len(), 4).ok_or(Error::NotPowerOf(v.len(), 4))?;
    let d = 1usize << replicas;
    ReplicaOperator::from_matrix(Mat::from_fn(d, d, |i, j| v[i * d + j]))
}

impl SuperOperator {
    pub fn zeros(replicas: usize) -> Self {
        let n = 1usize << (2 * replicas);
        Self {
            replicas,
            matrix: Mat::zeros(n, n),
        }
    }

    pub fn from_matrix(matrix: Mat<c64>) -> Result<Self> {
        let dim = check_square(matrix.as_ref())?;
        let replicas = log_base(dim, 4).ok_or(Error::NotPowerOf(dim, 4))?;
        check_finite(matrix.as_ref())?;
        Ok(Self { replicas, matrix })
    }

    pub fn replicas(&self) -> usize {
        self.replicas
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> MatRef<'_, c64> {
        self.matrix.as_ref()
    }

    pub(crate) fn matrix_mut(&mut self) -> &mut Mat<c64> {
        &mut self.matrix
    }

    pub fn get(&self, row: usize, col: usize) -> c64 {
        self.matrix[(row, col)]
    }

    pub fn apply(&self, v: &[c64]) -> Vec<c64> {
        assert_eq!(v.len(), self.dim(), "vector length mismatch");
        let n = self.dim();
        let mut out = alloc::vec![ZERO; n];
        for (j, &x) in v.iter().enumerate() {
            if x == ZERO {
                continue;
            }
            for (i, o) in out.iter_mut().enumerate() {
                *o += self.matrix[(i, j)] * x;
            }
        }
        out
    }

    /// Induced 1-norm: maximum absolute column sum.
    pub fn norm_l1(&self) -> f64 {
        norm_l1(self.matrix.as_ref())
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &SuperOperator) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        let mut worst = 0.0f64;
        for j in 0..self.dim() {
            for i in 0..self.dim() {
                worst = worst.max(abs(self.matrix[(i, j)] - other.matrix[(i, j)]));
            }
        }
        worst
    }
}

impl AddAssign<&SuperOperator> for SuperOperator {
    fn add_assign(&mut self, rhs: &SuperOperator) {
        assert_eq!(self.replicas, rhs.replicas, "replica count mismatch");
        self.matrix += &rhs.matrix;
    }
}

impl Add for &SuperOperator {
    type Output = SuperOperator;

    fn add(self, rhs: &SuperOperator) -> SuperOperator {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

pub(crate) fn abs(z: c64) -> f64 {
    libm::hypot(z.re, z.im)
}

pub(crate) fn norm_l1(m: MatRef<'_, c64>) -> f64 {
    (0..m.ncols())
        .map(|j| (0..m.nrows()).map(|i| abs(m[(i, j)])).sum::<f64>())
        .fold(0.0, f64::max)
}

fn nonzeros(m: MatRef<'_, c64>) -> Vec<(usize, usize, c64)> {
    let mut out = Vec::new();
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let z = m[(i, j)];
            if z != ZERO {
                out.push((i, j, z));
            }
        }
    }
    out
}

/// `target += coeff · (A ⊗ Bᵀ)`, i.e. the map `ρ ↦ coeff · A ρ B`.
pub(crate) fn add_sandwich(target: &mut Mat<c64>, coeff: c64, a: MatRef<'_, c64>, b: MatRef<'_, c64>) {
    if coeff == ZERO {
        return;
    }
    let d = a.nrows();
    let bs = nonzeros(b);
    for (i, k, x) in nonzeros(a) {
        let ax = coeff * x;
        for &(l, j, y) in &bs {
            target[(i * d + j, k * d + l)] += ax * y;
        }
    }
}

/// `target += coeff · (A ⊗ I)`, the map `ρ ↦ coeff · A ρ`.
pub(crate) fn add_left(target: &mut Mat<c64>, coeff: c64, a: MatRef<'_, c64>) {
    if coeff == ZERO {
        return;
    }
    let d = a.nrows();
    for (i, k, x) in nonzeros(a) {
        let ax = coeff * x;
        for j in 0..d {
            target[(i * d + j, k * d + j)] += ax;
        }
    }
}

/// `target += coeff · (I ⊗ Bᵀ)`, the map `ρ ↦ coeff · ρ B`.
pub(crate) fn add_right(target: &mut Mat<c64>, coeff: c64, b: MatRef<'_, c64>) {
    if coeff == ZERO {
        return;
    }
    let d = b.nrows();
    for (l, j, y) in nonzeros(b) {
        let by = coeff * y;
        for i in 0..d {
            target[(i * d + j, i * d + l)] += by;
        }
    }
}

fn same_shape(a: &ReplicaOperator, b: &ReplicaOperator) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(())
}

/// The superoperator of `ρ ↦ A ρ B`, equal to `A ⊗ Bᵀ` under row-major
/// vectorization.
pub fn sandwich(a: &ReplicaOperator, b: &ReplicaOperator) -> Result<SuperOperator> {
    same_shape(a, b)?;
    let mut out = SuperOperator::zeros(a.replicas);
    add_sandwich(&mut out.matrix, ONE, a.matrix(), b.matrix());
    Ok(out)
}

/// The superoperator of `ρ ↦ Hρ - ρH`.
pub fn commutator(h: &ReplicaOperator) -> SuperOperator {
    let mut out = SuperOperator::zeros(h.replicas);
    add_left(&mut out.matrix, ONE, h.matrix());
    add_right(&mut out.matrix, -ONE, h.matrix());
    out
}

/// The superoperator of `ρ ↦ Aρ + ρA`.
pub fn anticommutator(a: &ReplicaOperator) -> SuperOperator {
    let mut out = SuperOperator::zeros(a.replicas);
    add_left(&mut out.matrix, ONE, a.matrix());
    add_right(&mut out.matrix, ONE, a.matrix());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> c64 {
        c64::new(re, 0.0)
    }

    fn random_op(rng: &mut ChaCha8Rng, replicas: usize) -> ReplicaOperator {
        let d = 1 << replicas;
        ReplicaOperator::from_matrix(Mat::from_fn(d, d, |_, _| {
            c64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        }))
        .unwrap()
    }

    fn max_diff(a: &[c64], b: &[c64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| abs(*x - *y)).fold(0.0, f64::max)
    }

    #[test]
    fn lowering_single_replica() {
        let s = lowering(1, 1).unwrap();
        assert_eq!(s.dim(), 2);
        for i in 0..2 {
            for j in 0..2 {
                let want = if (i, j) == (0, 1) { ONE } else { ZERO };
                assert_eq!(s.get(i, j), want);
            }
        }
    }

    #[test]
    fn lowering_second_of_two() {
        let s = lowering(2, 2).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if (i, j) == (0, 1) || (i, j) == (2, 3) { ONE } else { ZERO };
                assert_eq!(s.get(i, j), want, "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn lowering_first_of_two_acts_on_high_bit() {
        let s = lowering(1, 2).unwrap();
        assert_eq!(s.get(0, 2), ONE);
        assert_eq!(s.get(1, 3), ONE);
    }

    #[test]
    fn lowering_out_of_range() {
        assert_eq!(
            lowering(0, 2).unwrap_err(),
            Error::ReplicaIndex { index: 0, replicas: 2 }
        );
        assert!(lowering(3, 2).is_err());
    }

    #[test]
    fn ladder_anticommutator_is_identity() {
        for m in 1..=4 {
            for k in 1..=m {
                let s = lowering(k, m).unwrap();
                let sd = s.adjoint();
                let sum = &(&s * &sd) + &(&sd * &s);
                assert_eq!(sum, ReplicaOperator::identity(m), "k={k} M={m}");
            }
        }
    }

    #[test]
    fn vectorize_identity_and_coherence() {
        assert_eq!(vectorize(&ReplicaOperator::identity(1)), [ONE, ZERO, ZERO, ONE]);
        assert_eq!(vectorize(&lowering(1, 1).unwrap()), [ZERO, ONE, ZERO, ZERO]);
    }

    #[test]
    fn devectorize_rejects_bad_length() {
        assert_eq!(devectorize(&[ONE; 8]).unwrap_err(), Error::NotPowerOf(8, 4));
        assert!(devectorize(&[]).is_err());
    }

    #[test]
    fn vectorize_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_op(&mut rng, 2);
        assert_eq!(devectorize(&vectorize(&a)).unwrap(), a);
    }

    #[test]
    fn sandwich_identity() {
        let i = ReplicaOperator::identity(1);
        let k = sandwich(&i, &i).unwrap();
        for r in 0..4 {
            for s in 0..4 {
                assert_eq!(k.get(r, s), if r == s { ONE } else { ZERO });
            }
        }
    }

    #[test]
    fn sandwich_moves_excited_to_ground() {
        let s = lowering(1, 1).unwrap();
        let k = sandwich(&s, &s.adjoint()).unwrap();
        let excited = vectorize(&(&s.adjoint() * &s));
        assert_eq!(k.apply(&excited), [ONE, ZERO, ZERO, ZERO]);
    }

    #[test]
    fn sandwich_dimension_mismatch() {
        let a = ReplicaOperator::identity(1);
        let b = ReplicaOperator::identity(2);
        assert_eq!(
            sandwich(&a, &b).unwrap_err(),
            Error::DimensionMismatch { left: 2, right: 4 }
        );
    }

    #[test]
    fn sandwich_matches_direct_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let (a, b, rho) = (random_op(&mut rng, 2), random_op(&mut rng, 2), random_op(&mut rng, 2));
            let k = sandwich(&a, &b).unwrap();
            let direct = vectorize(&(&(&a * &rho) * &b));
            assert!(max_diff(&k.apply(&vectorize(&rho)), &direct) < 1e-14);
        }
    }

    #[test]
    fn sandwich_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let ops: Vec<_> = (0..5).map(|_| random_op(&mut rng, 2)).collect();
        let (a, b, cc, d, rho) = (&ops[0], &ops[1], &ops[2], &ops[3], &ops[4]);
        let k = &sandwich(a, b).unwrap() + &sandwich(cc, d).unwrap();
        let direct = &(&(a * rho) * b) + &(&(cc * rho) * d);
        assert!(max_diff(&k.apply(&vectorize(rho)), &vectorize(&direct)) < 1e-13);
    }

    #[test]
    fn commutator_of_identity_vanishes() {
        let k = commutator(&ReplicaOperator::identity(2));
        assert_eq!(k.norm_l1(), 0.0);
    }

    #[test]
    fn coherence_is_eigenoperator_of_ad_z() {
        let z = pauli_z(1, 1).unwrap();
        let v = vectorize(&lowering(1, 1).unwrap());
        let out = commutator(&z).apply(&v);
        assert_eq!(out, [ZERO, c(2.0), ZERO, ZERO]);
    }

    #[test]
    fn anticommutator_of_number_on_identity() {
        let s = lowering(1, 1).unwrap();
        let n = &s.adjoint() * &s;
        let out = anticommutator(&n).apply(&vectorize(&ReplicaOperator::identity(1)));
        assert_eq!(out, vectorize(&n.scale(c(2.0))));
    }

    #[test]
    fn dimension_laws() {
        for m in 1..=3 {
            let k = commutator(&pauli_x(1, m).unwrap());
            assert_eq!(k.dim(), 1 << (2 * m));
            assert_eq!(k.replicas(), m);
        }
        assert!(SuperOperator::from_matrix(Mat::zeros(8, 8)).is_err());
        assert!(ReplicaOperator::from_matrix(Mat::zeros(3, 3)).is_err());
        let mut bad = Mat::<c64>::zeros(4, 4);
        bad[(1, 2)] = c64::new(f64::NAN, 0.0);
        assert_eq!(
            SuperOperator::from_matrix(bad).unwrap_err(),
            Error::NonFinite { row: 1, col: 2 }
        );
    }
}
