use super::step::Stencil;
use super::FlowError;
use crate::geometry::{Profile, ProfileKind};

/// Smooths a polar profile by running the zonal heat equation on the unit
/// sphere `S^n`, `f_s = f'' + (n - 1) cot(theta) f'`, for time `eps`.
///
/// Poles reflect (`f' = 0`), where the operator becomes `n f''`. `eps = 0`
/// returns the input unchanged.
pub fn mollify_polar(p: &Profile, eps: f64) -> Result<Profile, FlowError> {
    if p.kind != ProfileKind::PolarGraph {
        return Err(FlowError::InvalidConfig("mollification needs a polar profile".into()));
    }
    if !(eps >= 0.0) {
        return Err(FlowError::InvalidConfig(format!("mollification time {eps} must be >= 0")));
    }
    if eps == 0.0 {
        return Ok(p.clone());
    }
    let m = p.len();
    let stencil = Stencil::new(p);
    let n1 = (p.n - 1) as f64;
    let nf = p.n as f64;
    let cot: Vec<f64> = p.params.iter().map(|t| t.cos() / t.sin()).collect();
    let h_min = (0..m).map(|i| stencil.spacing(i)).fold(f64::INFINITY, f64::min);
    let dt_max = 0.9 * h_min * h_min / (2.0 * nf);
    let steps = (eps / dt_max).ceil().max(1.0) as usize;
    let dt = eps / steps as f64;
    let mut f = p.values.clone();
    let mut rate = vec![0.0; m];
    for _ in 0..steps {
        for i in 0..m {
            let d2 = stencil.d2(i, &f);
            rate[i] = if stencil.is_pole(i) {
                nf * d2
            } else {
                d2 + n1 * cot[i] * stencil.d1(i, &f)
            };
        }
        for (v, r) in f.iter_mut().zip(&rate) {
            *v += dt * r;
        }
    }
    Ok(Profile::polar(p.n, p.center, p.params.clone(), f)?)
}
