//! Tukey's Biweight (TB) surrogate family used by GNC, and the per-pair vote
//! kernels used to rank correspondences.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Controlling parameter `mu` and inlier threshold `xi` of the TB surrogate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GncParams<T: Real> {
    pub mu: T,
    pub xi: T,
}

impl<T: Real> GncParams<T> {
    pub fn new(mu: T, xi: T) -> Result<Self> {
        if !(mu > T::zero()) || !mu.is_finite() {
            return Err(Error::InvalidParameter(format!("mu must be positive, got {mu}")));
        }
        if !(xi > T::zero()) || !xi.is_finite() {
            return Err(Error::InvalidParameter(format!("xi must be positive, got {xi}")));
        }
        Ok(Self { mu, xi })
    }

    /// `mu * xi²`, the squared truncation radius.
    #[inline]
    pub fn scale_sq(&self) -> T {
        self.mu * self.xi * self.xi
    }
}

/// Surrogate TB cost `ρ_{μ,ξ}(r)`.
///
/// The quartic term divides by `μξ⁴`, so the two branches only meet at
/// `r² = μξ²` when `μ = 1`. The algorithms never evaluate this cost; they use
/// [`tb_weight`] and [`tb_outlier_process`].
pub fn tb_surrogate_cost<T: Real>(r: T, params: &GncParams<T>) -> T {
    let GncParams { mu, xi } = *params;
    let r2 = r * r;
    if r2 <= mu * xi * xi {
        let xi2 = xi * xi;
        let xi4 = xi2 * xi2;
        let xi6 = xi4 * xi2;
        r2 / (mu * xi2) - r2 * r2 / (mu * xi4) + r2 * r2 * r2 / (T::lit(3.0) * mu * xi6)
    } else {
        T::lit(1.0 / 3.0)
    }
}

/// Outlier process `Ψ_{μ,ξ}(ω) = μξ² (1/3 − ω + ⅔ ω^{3/2})`.
pub fn tb_outlier_process<T: Real>(omega: T, params: &GncParams<T>) -> T {
    let third = T::lit(1.0 / 3.0);
    let two_thirds = T::lit(2.0 / 3.0);
    params.scale_sq() * (third - omega + two_thirds * omega * omega.sqrt())
}

/// Closed-form weight update `(1 − r²/(μξ²))²`, zero outside the support.
pub fn tb_weight<T: Real>(r: T, params: &GncParams<T>) -> T {
    let u = r * r / params.scale_sq();
    if u <= T::one() {
        let s = T::one() - u;
        s * s
    } else {
        T::zero()
    }
}

/// Per-residual objective `ω r²/(μξ²) + Ψ_{μ,ξ}(ω)/(μξ²)`.
///
/// Normalized by `μξ²` so that [`tb_stationarity_residual`] is its exact
/// derivative in `ω`.
pub fn tb_objective<T: Real>(r: T, omega: T, params: &GncParams<T>) -> T {
    let c = params.scale_sq();
    omega * r * r / c + tb_outlier_process(omega, params) / c
}

/// `∂E/∂ω = r²/(μξ²) − 1 + ω^{1/2}`; zero at `ω = tb_weight(r)` inside the support.
pub fn tb_stationarity_residual<T: Real>(r: T, omega: T, params: &GncParams<T>) -> T {
    r * r / params.scale_sq() - T::one() + omega.sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VoteKernelKind {
    ZeroOne,
    TukeyBiweight,
    GemanMcClure,
    Cauchy,
    Leclerc,
    TruncatedLs,
}

impl VoteKernelKind {
    pub const ALL: [VoteKernelKind; 6] = [
        VoteKernelKind::ZeroOne,
        VoteKernelKind::TukeyBiweight,
        VoteKernelKind::GemanMcClure,
        VoteKernelKind::Cauchy,
        VoteKernelKind::Leclerc,
        VoteKernelKind::TruncatedLs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            VoteKernelKind::ZeroOne => "zeroone",
            VoteKernelKind::TukeyBiweight => "tb",
            VoteKernelKind::GemanMcClure => "gm",
            VoteKernelKind::Cauchy => "cauchy",
            VoteKernelKind::Leclerc => "leclerc",
            VoteKernelKind::TruncatedLs => "tls",
        }
    }
}

impl std::str::FromStr for VoteKernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        VoteKernelKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown kernel '{s}'")))
    }
}

/// A pairwise vote kernel evaluated on the scale gap `S`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VoteKernel<T: Real> {
    pub kind: VoteKernelKind,
    pub params: GncParams<T>,
}

impl<T: Real> VoteKernel<T> {
    pub fn new(kind: VoteKernelKind, params: GncParams<T>) -> Self {
        Self { kind, params }
    }

    pub fn tukey(mu: T, xi: T) -> Result<Self> {
        Ok(Self::new(VoteKernelKind::TukeyBiweight, GncParams::new(mu, xi)?))
    }

    /// Largest gap that still earns a vote.
    pub fn support(&self) -> T {
        let two = T::lit(2.0);
        match self.kind {
            VoteKernelKind::ZeroOne => two * self.params.xi,
            _ => two * self.params.xi * self.params.mu.sqrt(),
        }
    }

    /// Vote earned by a pair with scale gap `s`.
    #[inline]
    pub fn increment(&self, s: T) -> T {
        vote_increment(s, self)
    }
}

/// Vote contributed to both members of a pair with scale gap `s`.
///
/// TB gives `(1 − S²/(4μξ²))²` inside `S² < 4μξ²`; 0-1 voting gives 1 when
/// `S ≤ 2ξ`. The remaining kernels use their usual weight functions of
/// `x = S / (2ξ√μ)`, truncated at `x = 1` so all share TB's support.
#[inline]
pub fn vote_increment<T: Real>(s: T, kernel: &VoteKernel<T>) -> T {
    let GncParams { mu, xi } = kernel.params;
    if kernel.kind == VoteKernelKind::ZeroOne {
        return if s <= T::lit(2.0) * xi { T::one() } else { T::zero() };
    }
    let c2 = T::lit(4.0) * mu * xi * xi;
    let s2 = s * s;
    if s2 >= c2 {
        return T::zero();
    }
    let x2 = s2 / c2;
    match kernel.kind {
        VoteKernelKind::TukeyBiweight => {
            let a = T::one() - x2;
            a * a
        }
        VoteKernelKind::GemanMcClure => {
            let a = T::one() / (T::one() + x2);
            a * a
        }
        VoteKernelKind::Cauchy => T::one() / (T::one() + x2),
        VoteKernelKind::Leclerc => (-x2).exp(),
        VoteKernelKind::TruncatedLs => T::one(),
        VoteKernelKind::ZeroOne => unreachable!(),
    }
}
