use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fem::FeSpace;
use crate::gepup::element_curl_samples;

/// `η_K = h_K ‖∇×u_h‖_{L∞(K)}`, with the maximum taken over each element's
/// quadrature and support points.
pub fn vorticity_indicator(space: &FeSpace, u: [&[f64]; 2]) -> Vec<f64> {
    let h = space.mesh().h();
    let mut samples = Vec::new();
    (0..space.mesh().num_elements())
        .map(|e| {
            element_curl_samples(space, u, e, &mut samples);
            h * samples.iter().fold(0.0f64, |m, v| m.max(v.abs()))
        })
        .collect()
}

/// Element sets selected for refinement and coarsening (ascending indices).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MarkingResult {
    pub refine: Vec<usize>,
    pub coarsen: Vec<usize>,
}

/// Dörfler marking.
///
/// The refine set is the shortest prefix of the elements sorted by
/// decreasing indicator whose sum reaches `θ_R · total`. The coarsen set is
/// the longest prefix of the remaining elements sorted by increasing
/// indicator whose sum stays within `θ_C · total`. Ties go to the lower
/// element index.
pub fn dorfler_mark(indicators: &[f64], theta_r: f64, theta_c: f64) -> Result<MarkingResult> {
    for (name, th) in [("theta_r", theta_r), ("theta_c", theta_c)] {
        if !(th > 0.0 && th < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "{name} must lie in (0, 1), got {th}"
            )));
        }
    }
    if let Some(i) = indicators
        .iter()
        .position(|v| !(*v >= 0.0) || !v.is_finite())
    {
        return Err(Error::InvalidArgument(format!(
            "indicator {i} must be finite and nonnegative, got {}",
            indicators[i]
        )));
    }
    let total: f64 = indicators.iter().sum();
    if total == 0.0 {
        return Ok(MarkingResult::default());
    }

    let mut order: Vec<usize> = (0..indicators.len()).collect();
    order.sort_by(|&a, &b| indicators[b].total_cmp(&indicators[a]).then(a.cmp(&b)));
    let mut refine = Vec::new();
    let mut in_refine = alloc::vec![false; indicators.len()];
    let mut sum = 0.0;
    for &e in &order {
        if sum >= theta_r * total {
            break;
        }
        sum += indicators[e];
        refine.push(e);
        in_refine[e] = true;
    }

    order.sort_by(|&a, &b| indicators[a].total_cmp(&indicators[b]).then(a.cmp(&b)));
    let mut coarsen = Vec::new();
    let mut sum = 0.0;
    for &e in order.iter().filter(|&&e| !in_refine[e]) {
        if sum + indicators[e] > theta_c * total {
            break;
        }
        sum += indicators[e];
        coarsen.push(e);
    }
    refine.sort_unstable();
    coarsen.sort_unstable();
    Ok(MarkingResult { refine, coarsen })
}
