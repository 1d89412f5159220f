//! Reference distributions and their upper-tail probabilities.

use serde::Serialize;

use super::special::{integrate_gl, ln_gamma, normal_cdf, normal_pdf, reg_inc_beta, reg_inc_gamma_q};
use super::StatsError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Distribution {
    F { df1: f64, df2: f64 },
    ChiSquare { df: f64 },
    /// Range of `k` independent standard normals divided by an independent
    /// chi/sqrt(df) scale.
    StudentizedRange { k: usize, df: f64 },
}

impl Distribution {
    fn check(&self) -> Result<(), StatsError> {
        let ok = |v: f64| v > 0.0 && !v.is_nan();
        let valid = match *self {
            Distribution::F { df1, df2 } => ok(df1) && ok(df2),
            Distribution::ChiSquare { df } => ok(df),
            Distribution::StudentizedRange { k, df } => k >= 2 && ok(df),
        };
        if valid {
            Ok(())
        } else {
            Err(StatsError::InvalidParameter(format!("{self:?}")))
        }
    }
}

/// `P(X >= statistic)`.
pub fn tail_probability(dist: Distribution, statistic: f64) -> Result<f64, StatsError> {
    dist.check()?;
    if statistic.is_nan() {
        return Err(StatsError::InvalidParameter("statistic is NaN".into()));
    }
    if statistic <= 0.0 {
        return Ok(1.0);
    }
    if statistic == f64::INFINITY {
        return Ok(0.0);
    }
    let p = match dist {
        Distribution::F { df1, df2 } => {
            reg_inc_beta(0.5 * df2, 0.5 * df1, df2 / (df2 + df1 * statistic))
        }
        Distribution::ChiSquare { df } => reg_inc_gamma_q(0.5 * df, 0.5 * statistic),
        Distribution::StudentizedRange { k, df } => 1.0 - studentized_range_cdf(statistic, k, df),
    };
    Ok(p.clamp(0.0, 1.0))
}

/// Lower-tail quantile of the F distribution, by bisection on the incomplete beta.
pub fn f_quantile(prob: f64, df1: f64, df2: f64) -> Result<f64, StatsError> {
    Distribution::F { df1, df2 }.check()?;
    if !(0.0..1.0).contains(&prob) || prob == 0.0 {
        return Err(StatsError::InvalidParameter(format!("quantile probability {prob} not in (0, 1)")));
    }
    let (a, b) = (0.5 * df1, 0.5 * df2);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if reg_inc_beta(a, b, mid) < prob {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-17 {
            break;
        }
    }
    let y = 0.5 * (lo + hi);
    Ok(df2 * y / (df1 * (1.0 - y)))
}

/// Quadrature over the standard normal variable of the range integral
/// `W(w) = k * integral of phi(z) * (Phi(z) - Phi(z - w))^(k-1) dz`.
struct RangeIntegrand {
    k: usize,
    nodes: Vec<f64>,
    /// Quadrature weight times `phi(z)` at each node.
    weighted_pdf: Vec<f64>,
    cdf: Vec<f64>,
}

impl RangeIntegrand {
    const HALF_WIDTH: f64 = 9.0;
    const PANELS: usize = 2;

    fn new(k: usize) -> Self {
        let (gl_nodes, gl_weights) = super::special::gauss_legendre_64();
        let width = 2.0 * Self::HALF_WIDTH / Self::PANELS as f64;
        let mut nodes = Vec::with_capacity(64 * Self::PANELS);
        let mut weighted_pdf = Vec::with_capacity(64 * Self::PANELS);
        for p in 0..Self::PANELS {
            let mid = -Self::HALF_WIDTH + (p as f64 + 0.5) * width;
            for (x, w) in gl_nodes.iter().zip(gl_weights) {
                let z = mid + 0.5 * width * x;
                nodes.push(z);
                weighted_pdf.push(0.5 * width * w * normal_pdf(z));
            }
        }
        let cdf = nodes.iter().map(|&z| normal_cdf(z)).collect();
        RangeIntegrand {
            k,
            nodes,
            weighted_pdf,
            cdf,
        }
    }

    /// `P(range of k standard normals < w)`.
    fn cdf_at(&self, w: f64) -> f64 {
        if w <= 0.0 {
            return 0.0;
        }
        let km1 = (self.k - 1) as i32;
        let mut acc = 0.0;
        for ((&z, &wp), &c) in self.nodes.iter().zip(&self.weighted_pdf).zip(&self.cdf) {
            if wp == 0.0 {
                continue;
            }
            let band = c - normal_cdf(z - w);
            acc += wp * band.powi(km1);
        }
        (self.k as f64 * acc).clamp(0.0, 1.0)
    }
}

#[cfg(test)]
fn normal_range_cdf(w: f64, k: usize) -> f64 {
    RangeIntegrand::new(k).cdf_at(w)
}

/// CDF of the studentized range distribution.
pub fn studentized_range_cdf(q: f64, k: usize, df: f64) -> f64 {
    if q <= 0.0 {
        return 0.0;
    }
    let range = RangeIntegrand::new(k);
    if df.is_infinite() {
        return range.cdf_at(q);
    }
    // Density of s = sqrt(chi2_df / df).
    let ln_norm = std::f64::consts::LN_2 + 0.5 * df * (0.5 * df).ln() - ln_gamma(0.5 * df);
    let density = |s: f64| {
        if s <= 0.0 {
            0.0
        } else {
            (ln_norm + (df - 1.0) * s.ln() - 0.5 * df * s * s).exp()
        }
    };
    let spread = 12.0 / df.sqrt();
    let lo = (1.0 - spread).max(0.0);
    let hi = 1.0 + spread;
    let panels = if df < 10.0 { 4 } else { 2 };
    let total = integrate_gl(|s| density(s) * range.cdf_at(q * s), lo, hi, panels);
    total.clamp(0.0, 1.0)
}
