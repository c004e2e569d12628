//! Reference and seeded random instances.

use std::path::PathBuf;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::io::{load_instance, IoError};
use crate::lcp::LcpInstance;
use crate::operator::SymOperator;

#[derive(Debug, Error)]
pub enum GalleryError {
    #[error("invalid parameters: {0}")]
    BadParameter(String),
    #[error(transparent)]
    Io(#[from] IoError),
}

fn bad(msg: impl Into<String>) -> GalleryError {
    GalleryError::BadParameter(msg.into())
}

/// Finite truncation of the projection onto `l²(N)` inside `l²(Z)`.
#[derive(Debug, Clone)]
pub struct ProjectionExample {
    pub instance: LcpInstance,
    pub known_solution: DVector<f64>,
    /// `‖z - x_b‖`, equal to `‖b‖ / 2` for any orthogonal projection.
    pub expected_distance: f64,
    /// `<b, T†b> / 4`.
    pub expected_identity: f64,
}

/// `T = diag(1 (k times), 0 (n - k times))`, `b = (-1/3, 2, 0, ...)`,
/// known solution `z = (1/3, 0, ...)`.
///
/// Index 0 of the doubly infinite sequence maps to coordinate 0; the
/// range block comes first. With `k = 1` only `-1/3` fits in the range.
pub fn projection_example(k: usize, n: usize) -> Result<ProjectionExample, GalleryError> {
    projection_example_with(k, n, 2.0)
}

/// [`projection_example`] with the second range entry of `b` replaced.
pub fn projection_example_with(k: usize, n: usize, second: f64) -> Result<ProjectionExample, GalleryError> {
    if k == 0 || k > n {
        return Err(bad(format!("projection example needs 1 <= k <= n, got k={k}, n={n}")));
    }
    let diag: Vec<f64> = (0..n).map(|i| if i < k { 1.0 } else { 0.0 }).collect();
    let t = SymOperator::from_diagonal(&diag).expect("diagonal is symmetric");
    let mut b = DVector::zeros(n);
    b[0] = -1.0 / 3.0;
    let mut z = DVector::zeros(n);
    z[0] = 1.0 / 3.0;
    if k >= 2 {
        b[1] = second;
        z[1] = (-second).max(0.0);
    }
    let bn2 = b.norm_squared();
    let instance = LcpInstance::new(t, b)
        .expect("dimensions match")
        .with_label(format!("projection-k{k}-n{n}"));
    Ok(ProjectionExample {
        instance,
        known_solution: z,
        expected_distance: bn2.sqrt() / 2.0,
        expected_identity: bn2 / 4.0,
    })
}

/// How `b` is drawn for a random instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BPolicy {
    /// `b = T g` for Gaussian `g`.
    InRange,
    /// Gaussian `b`.
    FullSpace,
    /// `b = w* - T z*` for a planted complementary pair `z*, w* >= 0`
    /// lying in `R(T)`; `b ∈ R(T)` and `z*` is the solution in `R(T)`.
    Planted,
}

#[derive(Debug, Clone)]
pub struct RandomInstance {
    pub instance: LcpInstance,
    /// Generating spectrum, descending, zeros included.
    pub spectrum: Vec<f64>,
    pub planted: Option<DVector<f64>>,
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_vector(n: usize, rng: &mut impl Rng) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.sample(StandardNormal))
}

/// Orthonormal `n x n` basis from the QR factorization of a seeded Gaussian
/// matrix whose leading columns are replaced by `leading`. The first
/// `leading.len()` columns of the result span the same subspace as
/// `leading`, which must be linearly independent.
pub fn orthonormal_basis(n: usize, leading: &[DVector<f64>], rng: &mut impl Rng) -> DMatrix<f64> {
    let mut g = DMatrix::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    for (j, v) in leading.iter().enumerate() {
        g.set_column(j, v);
    }
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    // sign-fix so that diag(R) > 0
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            let mut col = q.column_mut(j);
            col.neg_mut();
        }
    }
    q
}

fn assemble(q: &DMatrix<f64>, spectrum: &[f64]) -> DMatrix<f64> {
    let mut scaled = q.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= spectrum.get(j).copied().unwrap_or(0.0);
    }
    let m = &scaled * q.transpose();
    (&m + m.transpose()) * 0.5
}

fn check_spectrum_params(n: usize, r: usize, lo: f64, hi: f64) -> Result<(), GalleryError> {
    if n == 0 || r == 0 || r > n {
        return Err(bad(format!("need 1 <= r <= n, got r={r}, n={n}")));
    }
    if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
        return Err(bad(format!("need 0 < lambda_min <= lambda_max, got [{lo}, {hi}]")));
    }
    Ok(())
}

fn draw_spectrum(r: usize, n: usize, lo: f64, hi: f64, rng: &mut impl Rng) -> Vec<f64> {
    let mut s: Vec<f64> = (0..r)
        .map(|_| if lo == hi { lo } else { rng.random_range(lo..=hi) })
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s.resize(n, 0.0);
    s
}

/// Planted nonnegative complementary pair with disjoint supports avoiding
/// `excluded` coordinates.
fn planted_pair(n: usize, r: usize, excluded: &[usize], rng: &mut impl Rng) -> (DVector<f64>, DVector<f64>) {
    let free: Vec<usize> = (0..n).filter(|i| !excluded.contains(i)).collect();
    let mut z = DVector::zeros(n);
    let mut w = DVector::zeros(n);
    for &i in &free {
        match rng.random_range(0..3u8) {
            0 => z[i] = rng.random_range(0.5..2.0),
            1 if r >= 2 => w[i] = rng.random_range(0.5..2.0),
            _ => {}
        }
    }
    if z.iter().all(|&v| v == 0.0) {
        let i = free[rng.random_range(0..free.len())];
        w[i] = 0.0;
        z[i] = rng.random_range(0.5..2.0);
    }
    (z, w)
}

/// `T = Q Λ Qᵀ` with `r` eigenvalues uniform in `[lambda_min, lambda_max]`
/// and `n - r` zeros.
pub fn random_psd_instance(
    n: usize,
    r: usize,
    lambda_min: f64,
    lambda_max: f64,
    seed: u64,
    policy: BPolicy,
) -> Result<RandomInstance, GalleryError> {
    check_spectrum_params(n, r, lambda_min, lambda_max)?;
    let mut rng = rng_from_seed(seed);
    let spectrum = draw_spectrum(r, n, lambda_min, lambda_max, &mut rng);
    let (leading, pair) = match policy {
        BPolicy::Planted => {
            let (z, w) = planted_pair(n, r, &[], &mut rng);
            let lead: Vec<DVector<f64>> = [&z, &w]
                .into_iter()
                .filter(|v| v.norm() > 0.0)
                .map(|v| v.normalize())
                .collect();
            (lead, Some((z, w)))
        }
        _ => (Vec::new(), None),
    };
    let q = orthonormal_basis(n, &leading, &mut rng);
    let op = SymOperator::new(assemble(&q, &spectrum), None).expect("assembled matrix is symmetric");
    let (b, planted) = match (policy, pair) {
        (BPolicy::Planted, Some((z, w))) => (&w - op.apply(&z), Some(z)),
        (BPolicy::InRange, _) => (op.apply(&gaussian_vector(n, &mut rng)), None),
        _ => (gaussian_vector(n, &mut rng), None),
    };
    let instance = LcpInstance::new(op, b)
        .expect("dimensions match")
        .with_label(format!("psd-n{n}-r{r}-s{seed}"));
    Ok(RandomInstance {
        instance,
        spectrum,
        planted,
    })
}

/// Sign pattern of a random symmetric spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignPolicy {
    Positive,
    Negative,
    Mixed,
}

/// Random symmetric operator with `r` nonzero eigenvalues of magnitude in
/// `[mag_min, mag_max]` and an exact null block. Returns the operator and
/// its generating spectrum (descending).
pub fn random_symmetric_operator(
    n: usize,
    r: usize,
    mag_min: f64,
    mag_max: f64,
    signs: SignPolicy,
    seed: u64,
) -> Result<(SymOperator, Vec<f64>), GalleryError> {
    check_spectrum_params(n, r, mag_min, mag_max)?;
    let mut rng = rng_from_seed(seed);
    let mut spectrum: Vec<f64> = (0..n)
        .map(|i| {
            if i >= r {
                return 0.0;
            }
            let mag = if mag_min == mag_max {
                mag_min
            } else {
                rng.random_range(mag_min..=mag_max)
            };
            let negative = match signs {
                SignPolicy::Positive => false,
                SignPolicy::Negative => true,
                SignPolicy::Mixed => rng.random_bool(0.5),
            };
            if negative {
                -mag
            } else {
                mag
            }
        })
        .collect();
    let q = orthonormal_basis(n, &[], &mut rng);
    let op = SymOperator::new(assemble(&q, &spectrum), None).expect("assembled matrix is symmetric");
    spectrum.sort_by(|a, b| b.total_cmp(a));
    Ok((op, spectrum))
}

/// PSD instance whose null space is spanned by `null_dim` nonnegative
/// directions with disjoint supports, each orthogonal to `b`, plus a
/// planted solution. Every such direction is a ray of the solution set.
pub fn random_ray_instance(n: usize, null_dim: usize, seed: u64) -> Result<RandomInstance, GalleryError> {
    if null_dim == 0 || 2 * null_dim + 1 > n {
        return Err(bad(format!(
            "ray instance needs 1 <= null_dim and 2 null_dim + 1 <= n, got n={n}, null_dim={null_dim}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let r = n - null_dim;
    // each null direction gets at least one coordinate; the rest stay free
    let mut coords: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        coords.swap(i, rng.random_range(0..=i));
    }
    let mut dirs = Vec::with_capacity(null_dim);
    let mut used = Vec::new();
    let mut cursor = 0;
    for _ in 0..null_dim {
        let len = rng.random_range(1..=2usize);
        let mut d = DVector::zeros(n);
        for &c in &coords[cursor..cursor + len] {
            d[c] = rng.random_range(0.2..1.0);
            used.push(c);
        }
        cursor += len;
        dirs.push(d.normalize());
    }
    let (z, w) = planted_pair(n, r, &used, &mut rng);
    let mut leading = dirs.clone();
    leading.extend([&z, &w].into_iter().filter(|v| v.norm() > 0.0).map(|v| v.normalize()));
    let qfull = orthonormal_basis(n, &leading, &mut rng);
    // null directions first, then the range block
    let spectrum = draw_spectrum(r, n, 0.5, 4.0, &mut rng);
    let range_q = DMatrix::from_fn(n, n, |i, j| {
        if j < r {
            qfull[(i, null_dim + j)]
        } else {
            qfull[(i, j - r)]
        }
    });
    let op = SymOperator::new(assemble(&range_q, &spectrum), None).expect("assembled matrix is symmetric");
    let b = &w - op.apply(&z);
    let instance = LcpInstance::new(op, b)
        .expect("dimensions match")
        .with_label(format!("ray-n{n}-k{null_dim}-s{seed}"));
    Ok(RandomInstance {
        instance,
        spectrum,
        planted: Some(z),
    })
}

/// Declarative description of an instance.
#[derive(Debug, Clone, PartialEq)]
pub enum InstanceRecipe {
    ProjectionExample {
        k: usize,
        n: usize,
    },
    RandomPsd {
        n: usize,
        rank: usize,
        lambda_min: f64,
        lambda_max: f64,
        seed: u64,
        policy: BPolicy,
    },
    Diagonal {
        diag: Vec<f64>,
        b: Vec<f64>,
    },
    File(PathBuf),
}

impl InstanceRecipe {
    pub fn build(&self) -> Result<LcpInstance, GalleryError> {
        match self {
            InstanceRecipe::ProjectionExample { k, n } => Ok(projection_example(*k, *n)?.instance),
            InstanceRecipe::RandomPsd {
                n,
                rank,
                lambda_min,
                lambda_max,
                seed,
                policy,
            } => Ok(random_psd_instance(*n, *rank, *lambda_min, *lambda_max, *seed, *policy)?.instance),
            InstanceRecipe::Diagonal { diag, b } => {
                let op = SymOperator::from_diagonal(diag).map_err(|e| bad(e.to_string()))?;
                LcpInstance::new(op, DVector::from_row_slice(b)).map_err(|e| bad(e.to_string()))
            }
            InstanceRecipe::File(path) => Ok(load_instance(path)?),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lcp::{verify_solution, DEFAULT_TOL};
    use approx::assert_abs_diff_eq;

    #[test]
    fn projection_example_solution_verifies() {
        let ex = projection_example(4, 6).unwrap();
        assert_eq!(ex.instance.operator().rank(), 4);
        assert!(verify_solution(&ex.instance, &ex.known_solution, DEFAULT_TOL).pass);
        assert_eq!(ex.known_solution.as_slice(), &[1.0 / 3.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_abs_diff_eq!(ex.expected_distance, 37f64.sqrt() / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(ex.expected_identity, 37.0 / 36.0, epsilon = 1e-15);
    }

    #[test]
    fn projection_example_scalar() {
        let ex = projection_example(1, 1).unwrap();
        assert_eq!(ex.instance.b().as_slice(), &[-1.0 / 3.0]);
        assert_eq!(ex.known_solution.as_slice(), &[1.0 / 3.0]);
        assert!(verify_solution(&ex.instance, &ex.known_solution, DEFAULT_TOL).pass);
    }

    #[test]
    fn projection_example_replaced_entry() {
        let ex = projection_example_with(2, 2, 7.0).unwrap();
        assert!(verify_solution(&ex.instance, &ex.known_solution, DEFAULT_TOL).pass);
        assert_abs_diff_eq!(ex.expected_distance, ex.instance.b().norm() / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn projection_example_rejects_k_above_n() {
        assert!(matches!(projection_example(5, 3), Err(GalleryError::BadParameter(_))));
        assert!(projection_example(0, 3).is_err());
    }

    #[test]
    fn unit_spectrum_is_identity() {
        let ri = random_psd_instance(5, 5, 1.0, 1.0, 11, BPolicy::FullSpace).unwrap();
        assert_abs_diff_eq!(
            ri.instance.operator().matrix(),
            &DMatrix::identity(5, 5),
            epsilon = 1e-14
        );
    }

    #[test]
    fn rank_deficient_metadata() {
        let ri = random_psd_instance(6, 3, 0.5, 4.0, 42, BPolicy::InRange).unwrap();
        let s = ri.instance.operator().spectral_summary();
        assert_eq!(s.rank, 3);
        let m_r = s.m_r.unwrap();
        assert!((0.5..=4.0).contains(&m_r));
        assert_abs_diff_eq!(m_r, ri.spectrum[2], epsilon = 1e-10);
        assert_abs_diff_eq!(s.big_m, ri.spectrum[0], epsilon = 1e-10);
    }

    #[test]
    fn rank_one_fixed_eigenvalue() {
        let ri = random_psd_instance(2, 1, 2.0, 2.0, 3, BPolicy::FullSpace).unwrap();
        let t = ri.instance.operator();
        let v = t.eigenvectors().column(0).into_owned();
        assert_abs_diff_eq!(t.matrix(), &(&v * v.transpose() * 2.0), epsilon = 1e-14);
    }

    #[test]
    fn same_seed_same_instance() {
        let a = random_psd_instance(7, 4, 0.1, 10.0, 99, BPolicy::Planted).unwrap();
        let b = random_psd_instance(7, 4, 0.1, 10.0, 99, BPolicy::Planted).unwrap();
        assert_eq!(a.instance.operator().matrix(), b.instance.operator().matrix());
        assert_eq!(a.instance.b(), b.instance.b());
    }

    #[test]
    fn planted_solution_lies_in_range() {
        for seed in 0..20 {
            let ri = random_psd_instance(8, 1 + seed as usize % 8, 0.5, 3.0, seed, BPolicy::Planted).unwrap();
            let z = ri.planted.as_ref().unwrap();
            let t = ri.instance.operator();
            assert!(verify_solution(&ri.instance, z, 1e-10).pass, "seed {seed}");
            assert!(crate::lcp::split_solution(t, z).in_range, "seed {seed}");
            assert!(crate::lcp::split_solution(t, ri.instance.b()).in_range, "seed {seed}");
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(random_psd_instance(3, 4, 1.0, 2.0, 0, BPolicy::InRange).is_err());
        assert!(random_psd_instance(3, 2, 0.0, 2.0, 0, BPolicy::InRange).is_err());
        assert!(random_psd_instance(3, 2, 3.0, 2.0, 0, BPolicy::InRange).is_err());
        assert!(random_ray_instance(2, 1, 0).is_err());
    }

    #[test]
    fn mixed_spectrum_matches_metadata() {
        let (op, spectrum) = random_symmetric_operator(9, 5, 0.1, 10.0, SignPolicy::Mixed, 5).unwrap();
        for (a, b) in op.eigenvalues().iter().zip(&spectrum) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-10);
        }
        assert_eq!(op.rank(), 5);
    }
}
