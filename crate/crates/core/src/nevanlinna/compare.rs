use num_complex::Complex64;
use serde::Serialize;

use super::handle::MeromorphicHandle;
use super::profile::{tfr_profile, ProfileOptions};
use super::winding::Circle;
use super::NevanlinnaError;

/// `log M(R) = log max_{|z|=R} |F|` on `nodes` equispaced circle points.
pub fn log_max_modulus(f: &MeromorphicHandle, r: f64, nodes: usize) -> Result<f64, NevanlinnaError> {
    let circle = Circle::new(Complex64::new(0.0, 0.0), r);
    let mut best = 0.0f64;
    for k in 0..nodes {
        let z = circle.point(k, nodes);
        let v = f.value(z)?.finite().ok_or_else(|| NevanlinnaError::EvaluationFailure {
            function: f.name().to_string(),
            z,
            reason: "log M needs an entire function".into(),
        })?;
        best = best.max(v.norm());
    }
    Ok(best.ln())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TLogMComparison {
    pub r: f64,
    pub r1: f64,
    pub t_r: f64,
    pub t_r1: f64,
    pub log_m_r: f64,
    /// `T(R) - log M(R)`.
    pub lhs1: f64,
    /// `log M(R) - ((R1+R)/(R1-R)) T(R1)`.
    pub lhs2: f64,
}

/// Both sides of the two classical comparisons between `T` and `log M`.
pub fn compare_t_log_m(
    f: &MeromorphicHandle,
    r: f64,
    r1: f64,
    opts: &ProfileOptions,
) -> Result<TLogMComparison, NevanlinnaError> {
    if !f.is_entire() || !(r1 > r && r > 0.0) {
        return Err(NevanlinnaError::InvalidArgument(format!(
            "compare_T_logM needs an entire function and R1 > R > 0 (R = {r}, R1 = {r1})"
        )));
    }
    let profile = tfr_profile(f, r1, opts)?;
    let (t_r, t_r1) = (profile.t_at(r), profile.t_at(r1));
    let log_m_r = log_max_modulus(f, r, 4096)?;
    Ok(TLogMComparison {
        r,
        r1,
        t_r,
        t_r1,
        log_m_r,
        lhs1: t_r - log_m_r,
        lhs2: log_m_r - (r1 + r) / (r1 - r) * t_r1,
    })
}
