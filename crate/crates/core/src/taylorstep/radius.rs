use std::io::{self, Write};

use num_traits::ToPrimitive;
use serde::Serialize;

use super::{TaylorError, TrajectoryJets};
use crate::combinatorics::binomial_half;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiusMethod {
    Ratio,
    Root,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadiusEstimate {
    pub per_particle_ratio: Vec<f64>,
    pub per_particle_root: Vec<f64>,
    /// Minimum over particles of the ratio estimate.
    pub ratio: f64,
    /// Minimum over particles of the root estimate.
    pub root: f64,
    /// Every particle's coefficient tail vanished.
    pub all_zero_tail: bool,
    /// Ratio estimates increase monotonically beyond order 10, at least like
    /// `√n`, as for an entire trajectory. Needs order ≥ 14.
    pub no_finite_radius: bool,
}

impl RadiusEstimate {
    pub fn aggregate(&self, method: RadiusMethod) -> f64 {
        match method {
            RadiusMethod::Ratio => self.ratio,
            RadiusMethod::Root => self.root,
        }
    }
}

/// Ratio `|c_n|/|c_{n+1}|` with the conventions `0/0 = ∞`, `x/0 = ∞`.
fn ratio(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        f64::INFINITY
    } else {
        a / b
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Radius of convergence estimates from the coefficient norms of each
/// particle. The ratio test takes the median of `|c_n|/|c_{n+1}|` over the
/// top half of orders; the root test inverts the largest `|c_n|^{1/n}` there.
pub fn estimate_radius(jets: &TrajectoryJets) -> Result<RadiusEstimate, TaylorError> {
    let order = jets.order;
    if order < 4 {
        return Err(TaylorError::OrderTooSmall { order, min: 4 });
    }
    let lo = order / 2;
    let mut est = RadiusEstimate {
        per_particle_ratio: Vec::with_capacity(jets.len()),
        per_particle_root: Vec::with_capacity(jets.len()),
        ratio: f64::INFINITY,
        root: f64::INFINITY,
        all_zero_tail: true,
        no_finite_radius: false,
    };
    let mut min_ratio_seq = vec![f64::INFINITY; order];
    for i in 0..jets.len() {
        let c: Vec<f64> = (0..=order).map(|n| jets.coeff_norm(i, n)).collect();
        if c[lo..].iter().any(|&v| v > 0.0) {
            est.all_zero_tail = false;
        }
        for n in 0..order {
            min_ratio_seq[n] = min_ratio_seq[n].min(ratio(c[n], c[n + 1]));
        }
        let r = median((lo..order).map(|n| ratio(c[n], c[n + 1])).collect());
        let root_max = (lo.max(1)..=order).map(|n| c[n].powf(1.0 / n as f64)).fold(0.0, f64::max);
        let root = if root_max == 0.0 { f64::INFINITY } else { 1.0 / root_max };
        est.ratio = est.ratio.min(r);
        est.root = est.root.min(root);
        est.per_particle_ratio.push(r);
        est.per_particle_root.push(root);
    }
    if order >= 14 {
        let tail = &min_ratio_seq[10..order];
        // entire motions have c_n/c_{n+1} growing like n; convergent ratios
        // of a finite radius level off
        let growth = ((order as f64) / 11.0).sqrt();
        est.no_finite_radius = tail.iter().all(|v| v.is_finite())
            && tail.windows(2).all(|w| w[1] > w[0])
            && tail[tail.len() - 1] >= growth * tail[0];
    }
    Ok(est)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeForm {
    /// `|c_n| ≤ C·R^{−n}`.
    Geometric,
    /// `|c_n| ≤ C·b_n·R^{−n}` with `b_n = (−1)^{n−1}(½ choose n) > 0`.
    HalfBinomial,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CauchyFit {
    pub form: EnvelopeForm,
    pub c: f64,
    pub r: f64,
    pub satisfied: bool,
    /// Orders that entered the fit.
    pub points: usize,
}

/// [`fit_cauchy_form`] with the geometric envelope.
pub fn fit_cauchy(jets: &TrajectoryJets) -> Result<CauchyFit, TaylorError> {
    fit_cauchy_form(jets, EnvelopeForm::Geometric)
}

/// Fits `log m_n ≈ n·log(1/R) + log C` by least squares on `n ≥ 1`, where
/// `m_n` is the largest coefficient norm over particles (divided by `b_n`
/// for the half-binomial form), then raises `log C` to the smallest value
/// that puts every point under the envelope.
pub fn fit_cauchy_form(jets: &TrajectoryJets, form: EnvelopeForm) -> Result<CauchyFit, TaylorError> {
    if jets.order < 4 {
        return Err(TaylorError::OrderTooSmall { order: jets.order, min: 4 });
    }
    let scale = |n: usize| match form {
        EnvelopeForm::Geometric => 1.0,
        EnvelopeForm::HalfBinomial => {
            let b = binomial_half(n as u32).to_f64().unwrap_or(f64::NAN);
            if n % 2 == 1 {
                b
            } else {
                -b
            }
        }
    };
    let pts: Vec<(f64, f64)> = (1..=jets.order)
        .filter_map(|n| {
            let m = (0..jets.len()).map(|i| jets.coeff_norm(i, n)).fold(0.0, f64::max);
            (m > 0.0).then(|| (n as f64, (m / scale(n)).ln()))
        })
        .collect();
    if pts.is_empty() {
        return Err(TaylorError::ZeroJets);
    }
    let slope = if pts.len() == 1 {
        0.0
    } else {
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    };
    let log_c = pts.iter().map(|p| p.1 - slope * p.0).fold(f64::NEG_INFINITY, f64::max);
    let (c, r) = (log_c.exp(), (-slope).exp());
    let satisfied = c.is_finite()
        && r.is_finite()
        && r > 0.0
        && pts.iter().all(|p| p.1.exp() <= c * r.powf(-p.0) * (1.0 + 1e-9));
    Ok(CauchyFit { form, c, r, satisfied, points: pts.len() })
}

/// `particle_id,n,coef_norm,ratio_est,root_est`; estimates left empty where
/// undefined (`n = N` for the ratio, `n = 0` or a zero coefficient for the root).
pub fn write_coefficients_csv<W: Write>(out: &mut W, jets: &TrajectoryJets) -> io::Result<()> {
    writeln!(out, "particle_id,n,coef_norm,ratio_est,root_est")?;
    for i in 0..jets.len() {
        for n in 0..=jets.order {
            let c = jets.coeff_norm(i, n);
            let r = if n < jets.order { format!("{:?}", ratio(c, jets.coeff_norm(i, n + 1))) } else { String::new() };
            let root = if n > 0 && c > 0.0 { format!("{:?}", c.powf(-1.0 / n as f64)) } else { String::new() };
            writeln!(out, "{i},{n},{c:?},{r},{root}")?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::Jet;

    fn scalar(c: Vec<f64>) -> TrajectoryJets {
        TrajectoryJets::from_scalar(&Jet::new(c))
    }

    #[test]
    fn unit_coefficients() {
        let j = scalar(vec![1.0; 13]);
        let f = fit_cauchy(&j).unwrap();
        assert!((f.c - 1.0).abs() < 1e-12 && (f.r - 1.0).abs() < 1e-12 && f.satisfied);
        let e = estimate_radius(&j).unwrap();
        assert_eq!((e.ratio, e.root), (1.0, 1.0));
    }

    #[test]
    fn geometric_coefficients() {
        let j = scalar((0..13).map(|n| 0.5f64.powi(n)).collect());
        let f = fit_cauchy(&j).unwrap();
        assert!((f.r - 2.0).abs() < 1e-12 && (f.c - 1.0).abs() < 1e-12);
        assert!((estimate_radius(&j).unwrap().ratio - 2.0).abs() < 1e-12);
    }

    #[test]
    fn constant_jet_is_flagged_infinite() {
        let mut c = vec![0.0; 9];
        c[0] = 3.0;
        let e = estimate_radius(&scalar(c.clone())).unwrap();
        assert!(e.all_zero_tail && e.ratio.is_infinite() && e.root.is_infinite());
        assert_eq!(fit_cauchy(&scalar(c)), Err(TaylorError::ZeroJets));
        assert!(matches!(estimate_radius(&scalar(vec![1.0; 4])), Err(TaylorError::OrderTooSmall { .. })));
    }

    #[test]
    fn half_binomial_envelope_of_square_root() {
        // (1 − 3t)^{1/2} has |c_n| = b_n·3ⁿ
        let j = scalar((0..13).map(|n| binomial_half(n).to_f64().unwrap() * (-3.0f64).powi(n as i32)).collect());
        let f = fit_cauchy_form(&j, EnvelopeForm::HalfBinomial).unwrap();
        assert!((f.r - 1.0 / 3.0).abs() < 1e-9 && (f.c - 1.0).abs() < 1e-9 && f.satisfied);
    }
}
