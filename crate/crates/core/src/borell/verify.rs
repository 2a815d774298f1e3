use num::bigint::BigInt;
use num::traits::{One, Pow, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::bodies::ConvexBody;
use crate::error::{Error, Result};
use crate::lattice::{enumerate, moment, moment_exact, tail, ProjectionDistribution};
use crate::scalar::{rational_to_f64, Rational, Scalar};

use super::c0::C0Profile;
use super::report::{float_le, InequalityReport};

fn as_small_int(p: f64) -> Option<u32> {
    (p.fract() == 0.0 && (1.0..=64.0).contains(&p)).then_some(p as u32)
}

fn exact_rational(v: f64) -> Rational {
    Rational::from_float(v).expect("finite value")
}

/// Both sides of the discrete Borell inequality.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BorellVerification {
    /// `m_p <= m_q`.
    pub holder: InequalityReport,
    /// `m_q <= C_ref·(q/p)·C₀(K,p)·m_p`, with `C* = m_q / ((q/p)·C₀·m_p)`.
    pub upper: InequalityReport,
}

impl BorellVerification {
    pub fn pass(&self) -> bool {
        self.holder.pass && self.upper.pass
    }
}

/// `m_p <= m_q`: exact for integer orders, otherwise a float comparison with
/// no slack.
pub fn holder_check(dist: &ProjectionDistribution, p: f64, q: f64) -> Result<InequalityReport> {
    if !(1.0..=q).contains(&p) {
        return Err(Error::PreconditionViolated(format!("need 1 <= p <= q, got p = {p}, q = {q}")));
    }
    let mp = moment(dist, p)?.root;
    let mq = moment(dist, q)?.root;
    let implied = if mq == 0.0 { 0.0 } else { mp / mq };
    Ok(match (as_small_int(p), as_small_int(q)) {
        (Some(pi), Some(qi)) => {
            // (M_p)^{1/p} <= (M_q)^{1/q}  ⟺  M_p^q <= M_q^p
            let lhs = Pow::pow(moment_exact(dist, pi), qi);
            let rhs = Pow::pow(moment_exact(dist, qi), pi);
            InequalityReport::decided("holder", mp, mq, implied, lhs <= rhs)
        }
        _ => InequalityReport::decided("holder", mp, mq, implied, mp <= mq).inexact(),
    }
    .with("p", p)
    .with("q", q))
}

/// Both discrete Borell checks from a precomputed profile.
pub fn borell_from_profile(profile: &C0Profile, p: f64, q: f64, c_ref: f64) -> Result<BorellVerification> {
    let holder = holder_check(profile.inner(), p, q)?;
    let c0 = profile.value(p)?;
    let mp = holder.lhs;
    let mq = holder.rhs;
    let scale = (q / p) * c0 * mp;
    let implied = mq / scale;
    let upper = InequalityReport::decided("discrete-borell", mq, c_ref * scale, implied, float_le(implied, c_ref))
        .inexact()
        .with("p", p)
        .with("q", q)
        .with("c0", c0)
        .with("c_ref", c_ref)
        .with("raw_ratio", mq / mp);
    Ok(BorellVerification { holder, upper })
}

/// Hölder's lower bound and the `C₀`-normalized upper bound on `m_q / m_p`.
pub fn verify_discrete_borell(body: &ConvexBody, p: f64, q: f64, c_ref: f64) -> Result<BorellVerification> {
    let profile = C0Profile::of(body)?;
    let mut v = borell_from_profile(&profile, p, q, c_ref)?;
    v.holder = v.holder.with_body(body);
    v.upper = v.upper.with_body(body).with("ambiguous_count", profile.ambiguous_count());
    Ok(v)
}

/// `(1−λ)G(K)^{1/n} + λG(L)^{1/n} <= G((1−λ)K + λL + C_n)^{1/n}`.
pub fn verify_discrete_bm(k: &ConvexBody, l: &ConvexBody, lambda: &Scalar) -> Result<InequalityReport> {
    if k.dim() != l.dim() {
        return Err(Error::InvalidBody("bodies differ in dimension".into()));
    }
    if lambda.exact().is_negative() || lambda.exact() > &Rational::one() {
        return Err(Error::PreconditionViolated("λ must lie in [0, 1]".into()));
    }
    let n = k.dim() as f64;
    let gk = enumerate(k)?;
    let gl = enumerate(l)?;
    if gk.count() == 0 || gl.count() == 0 {
        return Err(Error::EmptyLattice);
    }
    let combo = ConvexBody::combination(lambda.clone(), k.clone(), l.clone(), true)?;
    let gc = enumerate(&combo)?;
    let lam = lambda.value();
    let lhs = (1.0 - lam) * (gk.count() as f64).powf(1.0 / n) + lam * (gl.count() as f64).powf(1.0 / n);
    let rhs = (gc.count() as f64).powf(1.0 / n);
    Ok(InequalityReport::float("discrete-brunn-minkowski", lhs, rhs, lhs / rhs)
        .with("k", crate::bodies::json::short_label(k))
        .with("l", crate::bodies::json::short_label(l))
        .with("lambda", lambda.to_literal())
        .with("count_k", gk.count())
        .with("count_l", gl.count())
        .with("count_combination", gc.count())
        .with("ambiguous_count", gk.ambiguous_count() + gl.ambiguous_count() + gc.ambiguous_count()))
}

/// `#{v : (2v)^p >= M_p} / total`, i.e. the tail at half the `p`-th moment root.
fn half_moment_tail_exact(dist: &ProjectionDistribution, p: u32) -> Rational {
    let mp = moment_exact(dist, p);
    let hits: u64 = dist
        .values()
        .iter()
        .zip(dist.counts())
        .filter(|(&v, _)| Rational::from_integer(BigInt::from(2 * v).pow(p)) >= mp)
        .map(|(_, &c)| c)
        .sum();
    Rational::new(BigInt::from(hits), BigInt::from(dist.total()))
}

/// `P(|X_n| >= m_p/2) >= (1−2^{−p})²·M_p²/M_{2p} >= 1/(4(C_ref·C₀(K,p))^{2p})`.
///
/// The first link is exact for integer `p`; the second is exact at `p = 1`.
pub fn paley_zygmund_from_profile(profile: &C0Profile, p: f64, c_ref: f64) -> Result<InequalityReport> {
    if !(p >= 1.0) {
        return Err(Error::PreconditionViolated(format!("p = {p} must be at least 1")));
    }
    let dist = profile.inner();
    let mp = moment(dist, p)?;
    let m2p = moment(dist, 2.0 * p)?;
    let c0 = profile.value(p)?;
    let factor = (1.0 - 0.5f64.powf(p)).powi(2);
    let (tail_v, pz_v, first_ok, first_exact) = match as_small_int(p) {
        Some(pi) => {
            let t = half_moment_tail_exact(dist, pi);
            let f = Pow::pow(Rational::one() - Rational::new(BigInt::one(), BigInt::from(2).pow(pi)), 2u32);
            let pz = f * Pow::pow(moment_exact(dist, pi), 2u32) / moment_exact(dist, 2 * pi);
            (rational_to_f64(&t), rational_to_f64(&pz), pz <= t, true)
        }
        None => {
            let t = tail(dist, 0.5 * mp.root);
            let pz = factor * mp.raw * mp.raw / m2p.raw;
            (t, pz, float_le(pz, t), false)
        }
    };
    let (chain_v, second_ok, second_exact) = if p == 1.0 {
        let base = exact_rational(c_ref) * profile.exact_p1();
        let chain = Rational::one() / (Rational::from_integer(4.into()) * Pow::pow(base, 2u32));
        let pz = Rational::new(1.into(), 4.into()) * Pow::pow(moment_exact(dist, 1), 2u32) / moment_exact(dist, 2);
        (rational_to_f64(&chain), chain <= pz, true)
    } else {
        let chain = 1.0 / (4.0 * (c_ref * c0).powf(2.0 * p));
        (chain, float_le(chain, pz_v), false)
    };
    let implied = if tail_v == 0.0 { f64::INFINITY } else { pz_v / tail_v };
    let mut report =
        InequalityReport::decided("paley-zygmund", pz_v, tail_v, implied, first_ok && second_ok)
            .with("p", p)
            .with("c_ref", c_ref)
            .with("c0", c0)
            .with("threshold", 0.5 * mp.root)
            .with("chain_bound", chain_v)
            .with("first_link_exact", first_exact)
            .with("second_link_exact", second_exact);
    report.exact = first_exact && second_exact;
    Ok(report)
}

pub fn paley_zygmund_check(body: &ConvexBody, p: f64, c_ref: f64) -> Result<InequalityReport> {
    let profile = C0Profile::of(body)?;
    Ok(paley_zygmund_from_profile(&profile, p, c_ref)?.with_body(body))
}

/// Largest `N` for which `1 − (1−τ)^N` is evaluated exactly.
const EXACT_POWER_LIMIT: u64 = 4096;

/// `P(max_i |X_i,n| >= a·m_q) <= N·P(|X_n| >= a·m_q) <= N·a^{−q}` over `N`
/// independent lattice points. Exact for integer `q`.
pub fn union_bound_check(dist: &ProjectionDistribution, a: f64, q: f64, n: u64) -> Result<InequalityReport> {
    if !(a > 0.0) || !(q > 0.0) || n == 0 {
        return Err(Error::PreconditionViolated("need a > 0, q > 0 and N >= 1".into()));
    }
    let mq = moment(dist, q)?;
    let rhs_v = n as f64 * a.powf(-q);
    let report = match as_small_int(q) {
        Some(qi) if n <= EXACT_POWER_LIMIT => {
            let ar = exact_rational(a);
            let level = Pow::pow(ar.clone(), qi) * moment_exact(dist, qi);
            let hits: u64 = dist
                .values()
                .iter()
                .zip(dist.counts())
                .filter(|(&v, _)| Rational::from_integer(BigInt::from(v).pow(qi)) >= level)
                .map(|(_, &c)| c)
                .sum();
            let tau = Rational::new(BigInt::from(hits), BigInt::from(dist.total()));
            let p_max = Rational::one() - Pow::pow(Rational::one() - &tau, n as u32);
            let mid = Rational::from_integer(BigInt::from(n)) * &tau;
            let rhs = Rational::from_integer(BigInt::from(n)) / Pow::pow(ar, qi);
            let lhs_v = rational_to_f64(&p_max);
            let implied = if rhs.is_zero() { f64::INFINITY } else { lhs_v / rhs_v };
            InequalityReport::decided("union-bound", lhs_v, rhs_v, implied, p_max <= mid && mid <= rhs)
                .with("middle", rational_to_f64(&mid))
        }
        _ => {
            let tau = tail(dist, a * mq.root);
            let p_max = 1.0 - (1.0 - tau).powf(n as f64);
            let mid = n as f64 * tau;
            let pass = float_le(p_max, mid) && float_le(mid, rhs_v);
            InequalityReport::decided("union-bound", p_max, rhs_v, p_max / rhs_v, pass).inexact().with("middle", mid)
        }
    };
    Ok(report.with("a", a).with("q", q).with("n_samples", n).with("threshold", a * mq.root))
}
