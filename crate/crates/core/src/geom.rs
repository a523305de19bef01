//! 3D primitives, rotation metrics and the rotation solvers used by every
//! later stage: Horn's 3-point triad solver and the weighted least-squares
//! (Procrustes) solver.

use nalgebra::{Matrix3, Matrix4, Quaternion, Rotation3, SymmetricEigen, UnitQuaternion, Vector3};
use rand::Rng;
use rand_distr::StandardNormal;
use std::ops::Mul;

use crate::error::{Error, Result};
use crate::scalar::Real;

pub type Vec3<T> = Vector3<T>;

/// A 3×3 orthonormal matrix with determinant +1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RotationMatrix<T: Real>(Matrix3<T>);

impl<T: Real> RotationMatrix<T> {
    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    /// Validates `m` against the orthonormality and determinant tolerances.
    pub fn from_matrix(m: Matrix3<T>) -> Result<Self> {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::NotARotation("non-finite entry"));
        }
        let tol = T::lit(T::ROTATION_TOL);
        let gram = m.transpose() * m - Matrix3::identity();
        if gram.iter().any(|v| v.abs() > tol) {
            return Err(Error::NotARotation("columns are not orthonormal"));
        }
        if (m.determinant() - T::one()).abs() > tol {
            return Err(Error::NotARotation("determinant is not +1"));
        }
        Ok(Self(m))
    }

    /// Wraps `m` without checking. Callers guarantee `m ∈ SO(3)`.
    pub fn from_matrix_unchecked(m: Matrix3<T>) -> Self {
        Self(m)
    }

    /// Row-major entries.
    pub fn from_row_slice(rows: &[T; 9]) -> Result<Self> {
        Self::from_matrix(Matrix3::from_row_slice(rows))
    }

    /// Rotation of `angle` radians about `axis` (need not be unit length).
    pub fn from_axis_angle(axis: &Vec3<T>, angle: T) -> Self {
        let n = axis.norm();
        if n == T::zero() {
            return Self::identity();
        }
        Self::exp(&(axis * (angle / n)))
    }

    /// Exponential map of the rotation vector `omega`: `Exp([omega]×)`.
    pub fn exp(omega: &Vec3<T>) -> Self {
        Self(Rotation3::new(*omega).into_inner())
    }

    pub fn matrix(&self) -> &Matrix3<T> {
        &self.0
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn inverse(&self) -> Self {
        self.transpose()
    }

    /// Row-major entries.
    pub fn to_row_array(&self) -> [T; 9] {
        let m = &self.0;
        [
            m[(0, 0)],
            m[(0, 1)],
            m[(0, 2)],
            m[(1, 0)],
            m[(1, 1)],
            m[(1, 2)],
            m[(2, 0)],
            m[(2, 1)],
            m[(2, 2)],
        ]
    }

    pub fn trace(&self) -> T {
        self.0.trace()
    }

    pub fn cast<U: Real>(&self) -> RotationMatrix<U> {
        RotationMatrix(self.0.map(|v| U::lit(v.as_f64())))
    }
}

impl<T: Real> Mul for RotationMatrix<T> {
    type Output = RotationMatrix<T>;

    fn mul(self, rhs: Self) -> Self::Output {
        RotationMatrix(self.0 * rhs.0)
    }
}

impl<T: Real> Mul<Vec3<T>> for RotationMatrix<T> {
    type Output = Vec3<T>;

    fn mul(self, rhs: Vec3<T>) -> Self::Output {
        self.0 * rhs
    }
}

impl<T: Real> Mul<&Vec3<T>> for &RotationMatrix<T> {
    type Output = Vec3<T>;

    fn mul(self, rhs: &Vec3<T>) -> Self::Output {
        self.0 * rhs
    }
}

/// Rotation followed by translation: `x ↦ R x + t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RigidTransform<T: Real> {
    pub rotation: RotationMatrix<T>,
    pub translation: Vec3<T>,
}

impl<T: Real> RigidTransform<T> {
    pub fn new(rotation: RotationMatrix<T>, translation: Vec3<T>) -> Self {
        Self {
            rotation,
            translation,
        }
    }

    pub fn identity() -> Self {
        Self::new(RotationMatrix::identity(), Vec3::zeros())
    }

    pub fn apply(&self, x: &Vec3<T>) -> Vec3<T> {
        &self.rotation * x + self.translation
    }

    pub fn inverse(&self) -> Self {
        let rt = self.rotation.transpose();
        Self::new(rt, -(rt * self.translation))
    }

    /// `self ∘ other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        Self::new(
            self.rotation * other.rotation,
            self.rotation * other.translation + self.translation,
        )
    }
}

/// Putative correspondences `p_i ↔ q_i` together with the noise level σ.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrespondenceSet<T: Real> {
    points_p: Vec<Vec3<T>>,
    points_q: Vec<Vec3<T>>,
    sigma: T,
}

impl<T: Real> CorrespondenceSet<T> {
    pub fn new(points_p: Vec<Vec3<T>>, points_q: Vec<Vec3<T>>, sigma: T) -> Result<Self> {
        if points_p.len() != points_q.len() {
            return Err(Error::InvalidParameter(format!(
                "point lists differ in length: {} vs {}",
                points_p.len(),
                points_q.len()
            )));
        }
        if !(sigma > T::zero()) || !sigma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
        if points_p
            .iter()
            .chain(points_q.iter())
            .any(|v| v.iter().any(|c| !c.is_finite()))
        {
            return Err(Error::InvalidParameter("non-finite point".into()));
        }
        Ok(Self {
            points_p,
            points_q,
            sigma,
        })
    }

    pub fn len(&self) -> usize {
        self.points_p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points_p.is_empty()
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    pub fn points_p(&self) -> &[Vec3<T>] {
        &self.points_p
    }

    pub fn points_q(&self) -> &[Vec3<T>] {
        &self.points_q
    }

    #[inline]
    pub fn p(&self, i: usize) -> &Vec3<T> {
        &self.points_p[i]
    }

    #[inline]
    pub fn q(&self, i: usize) -> &Vec3<T> {
        &self.points_q[i]
    }

    /// `‖R p_i + t − q_i‖`.
    pub fn residual(&self, i: usize, transform: &RigidTransform<T>) -> T {
        (transform.apply(&self.points_p[i]) - self.points_q[i]).norm()
    }

    /// Replaces `q` by `g(q)` for every pair, keeping `p` fixed.
    pub fn map_q(&self, g: &RigidTransform<T>) -> Self {
        Self {
            points_p: self.points_p.clone(),
            points_q: self.points_q.iter().map(|q| g.apply(q)).collect(),
            sigma: self.sigma,
        }
    }

    pub fn ensure_len(&self, required: usize) -> Result<()> {
        if self.len() < required {
            Err(Error::InsufficientCorrespondences {
                required,
                got: self.len(),
            })
        } else {
            Ok(())
        }
    }
}

/// Angle of the relative rotation `aᵀb`, in `[0, π]`.
///
/// Evaluated as `atan2(sin θ, cos θ)` with `cos θ = (tr(aᵀb) − 1)/2` clamped to
/// `[−1, 1]` and `sin θ` read from the skew part; this equals the arccos form
/// but keeps full precision near 0 and π.
pub fn geodesic_distance<T: Real>(a: &RotationMatrix<T>, b: &RotationMatrix<T>) -> T {
    let m = a.0.transpose() * b.0;
    let two = T::lit(2.0);
    let cos = ((m.trace() - T::one()) / two).clamp(-T::one(), T::one());
    let skew = Vec3::new(
        m[(2, 1)] - m[(1, 2)],
        m[(0, 2)] - m[(2, 0)],
        m[(1, 0)] - m[(0, 1)],
    );
    let sin = skew.norm() / two;
    sin.atan2(cos).abs()
}

/// Frobenius norm of `a − b`.
pub fn chordal_distance<T: Real>(a: &RotationMatrix<T>, b: &RotationMatrix<T>) -> T {
    (a.0 - b.0).norm()
}

/// Orthonormal frame `[x̂ ŷ ẑ]` (as columns) of a point triple.
fn triad_frame<T: Real>(a: &Vec3<T>, b: &Vec3<T>, c: &Vec3<T>) -> Result<Matrix3<T>> {
    let e1 = b - a;
    let e2 = c - a;
    let n1 = e1.norm();
    let n2 = e2.norm();
    let cross = e1.cross(&e2);
    let tol = T::lit(T::DEGENERACY_TOL);
    if n1 == T::zero() || n2 == T::zero() || cross.norm() <= tol * n1 * n2 {
        return Err(Error::DegenerateTriad);
    }
    let x = e1 / n1;
    let z = x.cross(&e2).normalize();
    let y = z.cross(&x);
    Ok(Matrix3::from_columns(&[x, y, z]))
}

/// Horn's triad method: the rotation carrying the frame of `(p1, p2, p3)` onto
/// the frame of `(q1, q2, q3)`.
pub fn horn_triad_rotation<T: Real>(
    p: [&Vec3<T>; 3],
    q: [&Vec3<T>; 3],
) -> Result<RotationMatrix<T>> {
    let tp = triad_frame(p[0], p[1], p[2])?;
    let tq = triad_frame(q[0], q[1], q[2])?;
    Ok(RotationMatrix(tq * tp.transpose()))
}

/// Least-squares rotation of three centered pairs. Unlike
/// [`horn_triad_rotation`] it treats the three points symmetrically, so
/// rotations from triads sharing two points do not agree on that edge by
/// construction.
pub fn triad_rotation<T: Real>(p: [&Vec3<T>; 3], q: [&Vec3<T>; 3]) -> Result<RotationMatrix<T>> {
    let one = T::one();
    match weighted_alignment((0..3).map(|k| (p[k], q[k], one))) {
        Ok(a) => Ok(a.rotation),
        Err(Error::RankDeficient) => Err(Error::DegenerateTriad),
        Err(e) => Err(e),
    }
}

/// Result of a weighted Procrustes fit: the rotation and the weighted centroids
/// it was computed about.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightedAlignment<T: Real> {
    pub rotation: RotationMatrix<T>,
    pub centroid_p: Vec3<T>,
    pub centroid_q: Vec3<T>,
}

impl<T: Real> WeightedAlignment<T> {
    /// `t = q̄ − R p̄`, the optimal translation for the fitted rotation.
    pub fn translation(&self) -> Vec3<T> {
        self.centroid_q - self.rotation * self.centroid_p
    }

    pub fn transform(&self) -> RigidTransform<T> {
        RigidTransform::new(self.rotation, self.translation())
    }
}

/// Weighted centroids `Σ ω p / Σ ω`, `Σ ω q / Σ ω` over `(p, q, ω)` triples.
pub fn weighted_centroids<'a, T: Real + 'a>(
    pairs: impl Iterator<Item = (&'a Vec3<T>, &'a Vec3<T>, T)> + Clone,
) -> Option<(Vec3<T>, Vec3<T>)> {
    let mut sp = Vec3::zeros();
    let mut sq = Vec3::zeros();
    let mut sw = T::zero();
    for (p, q, w) in pairs {
        sp += p * w;
        sq += q * w;
        sw += w;
    }
    (sw > T::zero()).then(|| (sp / sw, sq / sw))
}

/// Minimizes `Σ ω_i ‖R(p_i − p̄) − (q_i − q̄)‖²` over SO(3) with weighted
/// centroids, for an arbitrary sequence of weighted pairs.
pub fn weighted_alignment<'a, T: Real + 'a>(
    pairs: impl Iterator<Item = (&'a Vec3<T>, &'a Vec3<T>, T)> + Clone,
) -> Result<WeightedAlignment<T>> {
    for (_, _, w) in pairs.clone() {
        if !(w >= T::zero()) || !w.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "weights must be finite and non-negative, got {w}"
            )));
        }
    }
    let (cp, cq) = weighted_centroids(pairs.clone()).ok_or(Error::RankDeficient)?;

    let mut h = Matrix3::zeros();
    let mut scatter = Matrix3::zeros();
    for (p, q, w) in pairs {
        if w == T::zero() {
            continue;
        }
        let dp = p - cp;
        let dq = q - cq;
        h += (dp * w) * dq.transpose();
        scatter += (dp * w) * dp.transpose();
    }

    let mut eig = SymmetricEigen::new(scatter).eigenvalues;
    eig.as_mut_slice()
        .sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let tol = T::lit(T::DEGENERACY_TOL);
    if !(eig[0] > T::zero()) || eig[1] <= tol * eig[0] {
        return Err(Error::RankDeficient);
    }

    Ok(WeightedAlignment {
        rotation: RotationMatrix(rotation_from_cross_covariance(&h)),
        centroid_p: cp,
        centroid_q: cq,
    })
}

/// The rotation maximizing `tr(R Σ dp dqᵀ)`, read off the dominant
/// eigenvector of the symmetric 4×4 quaternion form of `h`.
///
/// Equivalent to `V diag(1, 1, det(V Uᵀ)) Uᵀ` from the SVD `h = U Σ Vᵀ`, but
/// its accuracy depends on the second singular value rather than its square,
/// so three nearly collinear points still give a rotation exact to rounding.
fn rotation_from_cross_covariance<T: Real>(h: &Matrix3<T>) -> Matrix3<T> {
    let (xx, xy, xz) = (h[(0, 0)], h[(0, 1)], h[(0, 2)]);
    let (yx, yy, yz) = (h[(1, 0)], h[(1, 1)], h[(1, 2)]);
    let (zx, zy, zz) = (h[(2, 0)], h[(2, 1)], h[(2, 2)]);
    #[rustfmt::skip]
    let n = Matrix4::new(
        xx + yy + zz, yz - zy,      zx - xz,      xy - yx,
        yz - zy,      xx - yy - zz, xy + yx,      zx + xz,
        zx - xz,      xy + yx,      yy - xx - zz, yz + zy,
        xy - yx,      zx + xz,      yz + zy,      zz - xx - yy,
    );
    let eig = SymmetricEigen::new(n);
    let v = eig.eigenvectors.column(eig.eigenvalues.imax());
    UnitQuaternion::from_quaternion(Quaternion::new(v[0], v[1], v[2], v[3]))
        .to_rotation_matrix()
        .into_inner()
}

/// Weighted SVD rotation over the whole correspondence set.
pub fn weighted_svd_rotation<T: Real>(
    pairs: &CorrespondenceSet<T>,
    weights: &[T],
) -> Result<RotationMatrix<T>> {
    if weights.len() != pairs.len() {
        return Err(Error::InvalidParameter(format!(
            "{} weights for {} pairs",
            weights.len(),
            pairs.len()
        )));
    }
    pairs.ensure_len(3)?;
    let it = pairs
        .points_p()
        .iter()
        .zip(pairs.points_q())
        .zip(weights.iter().copied())
        .map(|((p, q), w)| (p, q, w));
    weighted_alignment(it).map(|a| a.rotation)
}

/// Weighted SVD alignment restricted to `indices`; `weights[k]` belongs to
/// `indices[k]`.
pub fn weighted_alignment_subset<T: Real>(
    pairs: &CorrespondenceSet<T>,
    indices: &[usize],
    weights: &[T],
) -> Result<WeightedAlignment<T>> {
    debug_assert_eq!(indices.len(), weights.len());
    let it = indices
        .iter()
        .zip(weights.iter().copied())
        .map(|(&i, w)| (pairs.p(i), pairs.q(i), w));
    weighted_alignment(it)
}

/// Nearest rotation in Frobenius norm.
pub fn project_to_so3<T: Real>(m: &Matrix3<T>) -> Result<RotationMatrix<T>> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularInput);
    }
    let svd = m.svd(true, true);
    let tol = T::lit(T::DEGENERACY_TOL);
    if svd.singular_values.iter().all(|s| *s < tol) {
        return Err(Error::SingularInput);
    }
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return Err(Error::SingularInput),
    };
    let d = (u * v_t).determinant();
    let correction = Matrix3::from_diagonal(&Vec3::new(T::one(), T::one(), d.signum()));
    Ok(RotationMatrix(u * correction * v_t))
}

/// Haar-uniform rotation from a normalized Gaussian quaternion.
pub fn random_rotation<T: Real, R: Rng + ?Sized>(rng: &mut R) -> RotationMatrix<T> {
    loop {
        let v: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let q = nalgebra::Quaternion::new(v[0], v[1], v[2], v[3]);
        if q.norm() < 1e-9 {
            continue;
        }
        let r = UnitQuaternion::from_quaternion(q).to_rotation_matrix();
        return RotationMatrix(r.into_inner().map(T::lit));
    }
}
