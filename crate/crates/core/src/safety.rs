//! Safety performance index of a width profile and ranking of routes.

use std::cmp::Ordering;
use std::fmt;
use std::fmt::Write as _;

use thiserror::Error;

use crate::network::{mean, Route};
use crate::num::{cmp_real, Real};
use crate::profile::{ProfileError, WidthProfile};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SafetyConfig<T> {
    /// Width threshold ξ below which samples are penalised, meters.
    pub threshold: T,
    /// Resampling spacing Δs, meters.
    pub spacing: T,
}

impl<T: Real> Default for SafetyConfig<T> {
    fn default() -> Self {
        Self {
            threshold: T::lit(70.0),
            spacing: T::one(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Spi<T> {
    /// No sample below the threshold.
    Unconstrained,
    Finite(T),
}

impl<T: Real> Spi<T> {
    pub fn value(self) -> T {
        match self {
            Spi::Unconstrained => T::infinity(),
            Spi::Finite(v) => v,
        }
    }

    pub fn is_unconstrained(self) -> bool {
        matches!(self, Spi::Unconstrained)
    }
}

impl<T: Real> fmt::Display for Spi<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Spi::Unconstrained => f.write_str("inf"),
            Spi::Finite(v) => write!(f, "{:.6}", v),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assessment<T> {
    pub route: usize,
    pub mean_width: T,
    pub min_width: T,
    pub length: T,
    /// Sum of `log10(ξ / w)` over samples narrower than ξ.
    pub penalty: T,
    pub spi: Spi<T>,
    pub spacing: T,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SafetyError {
    #[error("invalid safety configuration")]
    InvalidConfig,
    #[error("profile contains a non-positive width")]
    NonPositiveWidth,
    #[error("assessments use different sample spacings")]
    MixedSpacing,
    #[error(transparent)]
    Profile(#[from] ProfileError),
}

fn check<T: Real>(cfg: &SafetyConfig<T>) -> Result<(), SafetyError> {
    if cfg.threshold > T::zero() && cfg.spacing > T::zero() {
        Ok(())
    } else {
        Err(SafetyError::InvalidConfig)
    }
}

/// `(mean, min, length)` over the resampled widths.
pub fn summarize<T: Real>(profile: &WidthProfile<T>, spacing: T) -> Result<(T, T, T), SafetyError> {
    let widths = profile.symmetric_widths(spacing)?;
    let min = widths.iter().copied().fold(T::infinity(), T::min);
    Ok((mean(&widths), min, profile.total_length()))
}

/// Mean width divided by the summed logarithmic penalty of narrow samples.
pub fn spi<T: Real>(profile: &WidthProfile<T>, cfg: &SafetyConfig<T>) -> Result<Assessment<T>, SafetyError> {
    check(cfg)?;
    let widths = profile.symmetric_widths(cfg.spacing)?;
    if widths.iter().any(|w| !(*w > T::zero())) {
        return Err(SafetyError::NonPositiveWidth);
    }
    let mut terms: Vec<T> = widths
        .iter()
        .filter(|&&w| w < cfg.threshold)
        .map(|&w| (cfg.threshold / w).log10())
        .collect();
    terms.sort_by(cmp_real);
    let penalty = terms.iter().fold(T::zero(), |a, &b| a + b);
    let mean_width = mean(&widths);
    let min_width = widths.iter().copied().fold(T::infinity(), T::min);
    let spi = if penalty > T::zero() {
        Spi::Finite(mean_width / penalty)
    } else {
        Spi::Unconstrained
    };
    Ok(Assessment {
        route: 0,
        mean_width,
        min_width,
        length: profile.total_length(),
        penalty,
        spi,
        spacing: cfg.spacing,
    })
}

pub fn assess_route<T: Real>(route: &Route<T>, cfg: &SafetyConfig<T>) -> Result<Assessment<T>, SafetyError> {
    let mut a = spi(&route.profile, cfg)?;
    a.route = route.id;
    Ok(a)
}

fn rank_order<T: Real>(a: &Assessment<T>, b: &Assessment<T>) -> Ordering {
    let by_spi = match (a.spi, b.spi) {
        (Spi::Unconstrained, Spi::Unconstrained) => Ordering::Equal,
        (Spi::Unconstrained, _) => Ordering::Less,
        (_, Spi::Unconstrained) => Ordering::Greater,
        (Spi::Finite(x), Spi::Finite(y)) => cmp_real(&y, &x),
    };
    by_spi
        .then_with(|| cmp_real(&b.mean_width, &a.mean_width))
        .then_with(|| cmp_real(&a.length, &b.length))
        .then_with(|| a.route.cmp(&b.route))
}

/// Safest first. All assessments must share one sample spacing.
pub fn rank_routes<T: Real>(mut assessments: Vec<Assessment<T>>) -> Result<Vec<Assessment<T>>, SafetyError> {
    if let Some(first) = assessments.first() {
        let ds = first.spacing;
        if assessments.iter().any(|a| a.spacing != ds) {
            return Err(SafetyError::MixedSpacing);
        }
    }
    assessments.sort_by(rank_order);
    Ok(assessments)
}

/// CSV with header `route,mean_dwc_m,min_dwc_m,length_m,spi`.
pub fn assessments_csv<T: Real>(ranked: &[Assessment<T>]) -> String {
    let mut out = String::from("route,mean_dwc_m,min_dwc_m,length_m,spi\n");
    for a in ranked {
        let _ = writeln!(
            out,
            "{},{:.6},{:.6},{:.6},{}",
            a.route, a.mean_width, a.min_width, a.length, a.spi
        );
    }
    out
}

/// CSV with header `route_id,node_sequence,length_m,min_width_m,mean_width_m,spi`,
/// one row per assessed route in the given order.
pub fn routes_csv<T: Real>(routes: &[Route<T>], ranked: &[Assessment<T>]) -> String {
    let mut out = String::from("route_id,node_sequence,length_m,min_width_m,mean_width_m,spi\n");
    for a in ranked {
        let Some(r) = routes.iter().find(|r| r.id == a.route) else { continue };
        let _ = writeln!(
            out,
            "{},{},{:.6},{:.6},{:.6},{}",
            r.id,
            r.node_sequence(),
            a.length,
            a.min_width,
            a.mean_width,
            a.spi
        );
    }
    out
}
