//! Dual certificates for the Delsarte linear program.
//!
//! A radial function `f` with `hat(f) >= 0`, `hat(f)(0) > 0` and `f(x) <= 0`
//! for `x >= d` proves `A_LP(n, d) <= |X| f(0) / hat(f)(0)`. This module builds
//! three such families and checks every one of them exactly before returning.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exact::{binomial_row, first_nonpositive, first_nonpositive_index, ExactError, KrawtchoukSpec};
use crate::params::{ParamError, RadialFunction, SchemeParameters};

/// The first certificate condition that fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NegativeTransform { x: usize, value: BigRational },
    NonPositiveTransformAtZero { value: BigRational },
    PositiveBeyondDistance { x: usize, value: BigRational },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NegativeTransform { x, value } => write!(f, "fhat({x}) = {value} is negative"),
            Self::NonPositiveTransformAtZero { value } => write!(f, "fhat(0) = {value} is not positive"),
            Self::PositiveBeyondDistance { x, value } => write!(f, "f({x}) = {value} is positive at or beyond d"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertificateError {
    #[error("minimum distance {d} outside [1, {n}]")]
    Domain { d: usize, n: usize },
    #[error("infeasible certificate: {0}")]
    Infeasible(Violation),
    #[error("q_1(0) = {0} is not positive")]
    Q1NotPositive(BigRational),
    #[error("q_1 increases between {0} and the next index")]
    Q1NotDecreasing(usize),
    #[error("no admissible u with q_1(u)^2 >= q_1(0) (q_1(d) + 1)")]
    NoAdmissibleU,
    #[error("scheme is not Q-polynomial")]
    NotQPolynomial,
    #[error("no r_perp with q_1(r_perp) >= q_1(d) + 1")]
    NoValidRPerp,
    #[error("q_x(r_perp) stays positive for every x")]
    NoSignChange,
    #[error("dual Laplacian inequality fails at x = {0}")]
    LaplacianFails(usize),
    #[error("certificate bound {certificate} exceeds its closed form {closed_form}")]
    ClosedFormExceeded { certificate: BigRational, closed_form: BigRational },
    #[error(transparent)]
    Param(#[from] ParamError),
}

/// How a certificate was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Construction {
    Hamming { radius: usize },
    EliasBassalygo { u: usize },
    Mrrw { r_perp: usize, r: usize },
    Custom,
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Hamming { radius } => write!(f, "hamming(radius={radius})"),
            Self::EliasBassalygo { u } => write!(f, "elias_bassalygo(u={u})"),
            Self::Mrrw { r_perp, r } => write!(f, "mrrw(r_perp={r_perp}, r={r})"),
            Self::Custom => write!(f, "custom"),
        }
    }
}

/// A verified dual-feasible function and the bound it proves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub f: RadialFunction,
    pub fhat: RadialFunction,
    pub d: usize,
    pub bound: BigRational,
    pub construction: Construction,
}

impl Certificate {
    /// One line per `x`: `x f(x) fhat(x)`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for x in 0..self.f.len() {
            out.push_str(&format!("{x} {} {}\n", fraction(&self.f[x]), fraction(&self.fhat[x])));
        }
        out
    }
}

/// `p/q`, always with an explicit denominator.
pub fn fraction(value: &BigRational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

fn check_distance(params: &SchemeParameters, d: usize) -> Result<(), CertificateError> {
    if d == 0 || d > params.n() {
        return Err(CertificateError::Domain { d, n: params.n() });
    }
    Ok(())
}

/// Verify the three certificate conditions exactly and compute
/// `|X| f(0) / hat(f)(0)`.
pub fn check_and_bound(
    params: &SchemeParameters,
    f: &RadialFunction,
    d: usize,
) -> Result<Certificate, CertificateError> {
    check_distance(params, d)?;
    let fhat = params.hat(f)?;
    if let Some(x) = (d..f.len()).find(|&x| f[x].is_positive()) {
        return Err(CertificateError::Infeasible(Violation::PositiveBeyondDistance { x, value: f[x].clone() }));
    }
    if let Some(x) = (0..fhat.len()).find(|&x| fhat[x].is_negative()) {
        return Err(CertificateError::Infeasible(Violation::NegativeTransform { x, value: fhat[x].clone() }));
    }
    if !fhat[0].is_positive() {
        return Err(CertificateError::Infeasible(Violation::NonPositiveTransformAtZero { value: fhat[0].clone() }));
    }
    let bound = params.size_rational() * &f[0] / &fhat[0];
    Ok(Certificate { f: f.clone(), fhat, d, bound, construction: Construction::Custom })
}

/// `f = 1_{<=e} star 1_{<=e}` with `e = floor((d-1)/2)`.
pub fn hamming_certificate(params: &SchemeParameters, d: usize) -> Result<Certificate, CertificateError> {
    check_distance(params, d)?;
    let radius = (d - 1) / 2;
    let ball = RadialFunction::ball(params.n(), radius);
    let f = params.star(&ball, &ball)?;
    let mut cert = check_and_bound(params, &f, d)?;
    cert.construction = Construction::Hamming { radius };
    Ok(cert)
}

fn decreasing_q1(params: &SchemeParameters) -> Result<RadialFunction, CertificateError> {
    let q1 = params.q_row(1);
    if !q1[0].is_positive() {
        return Err(CertificateError::Q1NotPositive(q1[0].clone()));
    }
    if let Some(x) = (0..params.n()).find(|&x| q1[x + 1] > q1[x]) {
        return Err(CertificateError::Q1NotDecreasing(x));
    }
    Ok(q1)
}

/// The radius chosen by the Elias-Bassalygo construction, with the closed
/// form `(q_1(0) - q_1(d)) |X| / v_u`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EbData {
    pub u: usize,
    pub closed_form_bound: BigRational,
}

/// `f = (q_1 - q_1(d)) * (1_{u} star 1_{u})` for the admissible `u` of
/// largest valency.
pub fn eb_certificate(params: &SchemeParameters, d: usize) -> Result<(Certificate, EbData), CertificateError> {
    check_distance(params, d)?;
    let q1 = decreasing_q1(params)?;
    let threshold = &q1[0] * (&q1[d] + BigRational::one());
    let u = (0..=params.n())
        .filter(|&u| &q1[u] * &q1[u] >= threshold)
        .fold(None::<usize>, |best, u| match best {
            Some(b) if params.valency(b) >= params.valency(u) => Some(b),
            _ => Some(u),
        })
        .ok_or(CertificateError::NoAdmissibleU)?;

    let shift = RadialFunction::new(vec![q1[d].clone(); params.n() + 1]);
    let indicator = RadialFunction::indicator(params.n(), u);
    let f = q1.difference(&shift).product(&params.star(&indicator, &indicator)?);
    let mut cert = check_and_bound(params, &f, d)?;
    cert.construction = Construction::EliasBassalygo { u };

    let closed_form_bound =
        (&q1[0] - &q1[d]) * params.size_rational() / BigRational::from_integer(params.valency(u).clone());
    if cert.bound > closed_form_bound {
        return Err(CertificateError::ClosedFormExceeded { certificate: cert.bound, closed_form: closed_form_bound });
    }
    Ok((cert, EbData { u, closed_form_bound }))
}

/// Parameters of the MRRW construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MrrwData {
    pub r_perp: usize,
    pub r: usize,
    /// `q_1(r_perp)`
    pub lambda: BigRational,
    /// `hat(f)(x) = q_x(r_perp) / m_x` on `[0, r)`, zero beyond.
    pub fhat: RadialFunction,
    /// `(q_1(0) - q_1(d)) sum_{x < r} m_x`
    pub closed_form_bound: BigRational,
}

/// Whether `|X| (1_{1} ostar fhat)(x) >= lambda fhat(x)` for every `x`.
pub fn dual_laplacian_check(
    params: &SchemeParameters,
    fhat: &RadialFunction,
    lambda: &BigRational,
) -> Result<bool, CertificateError> {
    let first = first_violation(params, fhat, lambda)?;
    Ok(first.is_none())
}

fn first_violation(
    params: &SchemeParameters,
    fhat: &RadialFunction,
    lambda: &BigRational,
) -> Result<Option<usize>, CertificateError> {
    let spread = params.ostar(&RadialFunction::indicator(params.n(), 1), fhat)?.scale(&params.size_rational());
    Ok((0..fhat.len()).find(|&x| spread[x] < lambda * &fhat[x]))
}

/// The MRRW certificate: an eigenfunction-like `hat(f)` supported on
/// `[0, r)`, squared through `ostar` and turned into a dual-feasible `g`.
pub fn mrrw_certificate(params: &SchemeParameters, d: usize) -> Result<(Certificate, MrrwData), CertificateError> {
    check_distance(params, d)?;
    if !params.is_q_polynomial() {
        return Err(CertificateError::NotQPolynomial);
    }
    let q1 = decreasing_q1(params)?;
    let n = params.n();
    let target = &q1[d] + BigRational::one();
    let r_perp = (0..=n).rev().find(|&x| q1[x] >= target).ok_or(CertificateError::NoValidRPerp)?;

    let column: Vec<BigRational> = (0..=n).map(|x| params.q(x, r_perp).clone()).collect();
    let r = first_nonpositive_index(&column)
        .map_err(|_: ExactError| CertificateError::NoSignChange)?
        .ok_or(CertificateError::NoSignChange)?;

    let fhat = RadialFunction::new(
        (0..=n)
            .map(|x| {
                if x < r {
                    &column[x] / BigRational::from_integer(params.multiplicity(x).clone())
                } else {
                    BigRational::zero()
                }
            })
            .collect(),
    );
    let lambda = q1[r_perp].clone();
    if let Some(x) = first_violation(params, &fhat, &lambda)? {
        return Err(CertificateError::LaplacianFails(x));
    }

    let size = params.size_rational();
    let squared = params.ostar(&fhat, &fhat)?;
    let spread = params.ostar(&RadialFunction::indicator(n, 1), &squared)?.scale(&size);
    let ghat = spread.difference(&squared.scale(&q1[d]));
    let g = params.tilde(&ghat)?;
    let mut cert = check_and_bound(params, &g, d)?;
    cert.construction = Construction::Mrrw { r_perp, r };

    let mass: BigInt = (0..r).map(|x| params.multiplicity(x).clone()).sum();
    let closed_form_bound = (&q1[0] - &q1[d]) * BigRational::from_integer(mass);
    if cert.bound > closed_form_bound {
        return Err(CertificateError::ClosedFormExceeded { certificate: cert.bound, closed_form: closed_form_bound });
    }
    Ok((cert, MrrwData { r_perp, r, lambda, fhat, closed_form_bound }))
}

/// The MRRW closed form for the `q`-ary Hamming scheme, computed without a
/// parameter table so that it scales to long lengths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HammingMrrwClosedForm {
    pub r_perp: u64,
    pub r: u64,
    pub bound: BigInt,
}

/// In the Hamming scheme `r_perp = d - 1`, the sign of `q_x(r_perp)` is the
/// sign of `K_{r_perp}(x)`, and the bound is `q d sum_{x<r} C(n,x) (q-1)^x`.
pub fn hamming_mrrw_closed_form(n: u64, q: u64, d: u64) -> Result<HammingMrrwClosedForm, CertificateError> {
    if d == 0 || d > n {
        return Err(CertificateError::Domain { d: d as usize, n: n as usize });
    }
    let r_perp = d - 1;
    let spec = KrawtchoukSpec::new(n, q, r_perp).map_err(|e| CertificateError::Param(e.into()))?;
    let r = first_nonpositive::<_, BigInt, BigInt>(spec.values_iter())
        .map_err(|_| CertificateError::NoSignChange)?
        .ok_or(CertificateError::NoSignChange)? as u64;
    let row = binomial_row(n);
    let base = BigInt::from(q - 1);
    let mut power = BigInt::one();
    let mut mass = BigInt::zero();
    for coefficient in row.iter().take(r as usize) {
        mass += coefficient * &power;
        power *= &base;
    }
    Ok(HammingMrrwClosedForm { r_perp, r, bound: BigInt::from(q * d) * mass })
}
