//! Width-versus-arc-length profiles.

use thiserror::Error;

use crate::geometry::{ElementId, Point2};
use crate::num::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WidthSample<T> {
    /// Arc length along the trace, meters.
    pub s: T,
    /// Clearance (dynamic width characteristic), meters.
    pub width: T,
    pub position: Point2<T>,
    /// The two boundary elements the sample is equidistant from, when known.
    pub active: Option<[ElementId; 2]>,
}

impl<T: Real> WidthSample<T> {
    pub fn new(s: T, width: T, position: Point2<T>) -> Self {
        Self {
            s,
            width,
            position,
            active: None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProfileError {
    #[error("profile has no samples")]
    Empty,
    #[error("sample spacing must be positive")]
    BadSpacing,
    #[error("arc length decreases at sample {0}")]
    Unsorted(usize),
}

/// Sampled function `s ↦ width` along a traced pathway.
#[derive(Debug, Clone, PartialEq)]
pub struct WidthProfile<T> {
    samples: Vec<WidthSample<T>>,
}

impl<T: Real> Default for WidthProfile<T> {
    fn default() -> Self {
        Self { samples: Vec::new() }
    }
}

impl<T: Real> WidthProfile<T> {
    pub fn new(samples: Vec<WidthSample<T>>) -> Result<Self, ProfileError> {
        if let Some(i) = samples.windows(2).position(|w| w[1].s < w[0].s) {
            return Err(ProfileError::Unsorted(i + 1));
        }
        Ok(Self { samples })
    }

    /// Builds a profile from `(s, width)` pairs with positions laid along the x axis.
    pub fn from_pairs(pairs: &[(T, T)]) -> Result<Self, ProfileError> {
        Self::new(
            pairs
                .iter()
                .map(|&(s, w)| WidthSample::new(s, w, Point2::new(s, T::zero())))
                .collect(),
        )
    }

    /// Unit-spaced samples `s = 0, 1, 2, …`.
    pub fn from_widths(widths: &[T]) -> Self {
        let pairs: Vec<(T, T)> = widths
            .iter()
            .enumerate()
            .map(|(i, &w)| (T::from_usize(i).unwrap(), w))
            .collect();
        Self::from_pairs(&pairs).expect("monotone by construction")
    }

    pub(crate) fn from_samples_unchecked(samples: Vec<WidthSample<T>>) -> Self {
        debug_assert!(samples.windows(2).all(|w| w[1].s >= w[0].s));
        Self { samples }
    }

    pub fn samples(&self) -> &[WidthSample<T>] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Arc length of the last sample (0 when empty).
    pub fn total_length(&self) -> T {
        self.samples.last().map_or(T::zero(), |s| s.s)
    }

    pub fn widths(&self) -> impl Iterator<Item = T> + '_ {
        self.samples.iter().map(|s| s.width)
    }

    pub fn positions(&self) -> Vec<Point2<T>> {
        self.samples.iter().map(|s| s.position).collect()
    }

    pub fn min_width(&self) -> Option<T> {
        self.widths().reduce(T::min)
    }

    /// Same samples traversed in the opposite direction, re-based to start at 0.
    pub fn reversed(&self) -> Self {
        let total = self.total_length();
        let samples = self
            .samples
            .iter()
            .rev()
            .map(|s| WidthSample {
                s: total - s.s,
                active: s.active.map(|[a, b]| [b, a]),
                ..*s
            })
            .collect();
        Self { samples }
    }

    /// Shifts every arc length so the profile starts at `origin`.
    pub fn rebased(&self, origin: T) -> Self {
        let first = self.samples.first().map_or(T::zero(), |s| s.s);
        let samples = self
            .samples
            .iter()
            .map(|s| WidthSample {
                s: s.s - first + origin,
                ..*s
            })
            .collect();
        Self { samples }
    }

    /// Appends `other` after `self`. Arc length continues across the joint;
    /// the shared joint sample is kept once with the smaller of the two widths.
    pub fn concat(&self, other: &Self) -> Self {
        if self.is_empty() {
            return other.rebased(T::zero());
        }
        if other.is_empty() {
            return self.clone();
        }
        let mut samples = self.samples.clone();
        let offset = self.total_length();
        let first = other.samples[0].s;
        let joint = samples.last_mut().unwrap();
        joint.width = joint.width.min(other.samples[0].width);
        samples.extend(other.samples[1..].iter().map(|s| WidthSample {
            s: s.s - first + offset,
            ..*s
        }));
        Self { samples }
    }

    /// Linear interpolation of the width at arc length `s` (clamped to the ends).
    pub fn width_at(&self, s: T) -> Option<T> {
        let first = self.samples.first()?;
        if s <= first.s {
            return Some(first.width);
        }
        let last = self.samples.last().unwrap();
        if s >= last.s {
            return Some(last.width);
        }
        let i = self.samples.partition_point(|x| x.s <= s);
        let (a, b) = (&self.samples[i - 1], &self.samples[i]);
        if a.s == s || b.s == a.s {
            return Some(a.width);
        }
        let t = (s - a.s) / (b.s - a.s);
        Some(a.width + (b.width - a.width) * t)
    }

    fn position_at(&self, s: T) -> Point2<T> {
        let i = self.samples.partition_point(|x| x.s <= s).clamp(1, self.samples.len() - 1);
        let (a, b) = (&self.samples[i - 1], &self.samples[i]);
        if b.s == a.s {
            return a.position;
        }
        let t = ((s - a.s) / (b.s - a.s)).max(T::zero()).min(T::one());
        a.position.lerp(b.position, t)
    }

    /// Uniform resampling at `s0, s0 + Δs, s0 + 2Δs, …` plus the final arc length.
    pub fn resample(&self, spacing: T) -> Result<Self, ProfileError> {
        if !(spacing > T::zero()) {
            return Err(ProfileError::BadSpacing);
        }
        let first = self.samples.first().ok_or(ProfileError::Empty)?;
        if self.samples.len() == 1 {
            return Ok(self.clone());
        }
        let start = first.s;
        let end = self.total_length();
        let guard = spacing * T::lit(1e-9);
        let mut out = Vec::new();
        let mut k = 0usize;
        loop {
            let s = start + spacing * T::from_usize(k).unwrap();
            if s >= end - guard {
                break;
            }
            out.push(WidthSample::new(s, self.width_at(s).unwrap(), self.position_at(s)));
            k += 1;
        }
        let last = *self.samples.last().unwrap();
        out.push(WidthSample::new(end, last.width, last.position));
        Ok(Self { samples: out })
    }

    /// Widths sampled at spacing no larger than `spacing`, reversal-exact:
    /// every stored sample is kept and each interval is split into
    /// `ceil(Δ/spacing)` equal parts with integer-weighted interpolation, so the
    /// reversed profile yields bit-identical values in reverse order.
    pub fn symmetric_widths(&self, spacing: T) -> Result<Vec<T>, ProfileError> {
        if !(spacing > T::zero()) {
            return Err(ProfileError::BadSpacing);
        }
        let first = self.samples.first().ok_or(ProfileError::Empty)?;
        let mut out = vec![first.width];
        for w in self.samples.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            let ratio = ((b.s - a.s) / spacing - T::lit(1e-9)).ceil();
            let parts = ratio.to_usize().unwrap_or(1).max(1);
            let n = T::from_usize(parts).unwrap();
            for j in 1..parts {
                let jt = T::from_usize(j).unwrap();
                out.push((a.width * (n - jt) + b.width * jt) / n);
            }
            out.push(b.width);
        }
        Ok(out)
    }

    /// Splits at arc length `s`, inserting an interpolated sample at the cut.
    /// The second part is re-based to start at 0.
    pub fn split_at(&self, s: T) -> Option<(Self, Self)> {
        let first = self.samples.first()?;
        let last = self.samples.last()?;
        if s < first.s || s > last.s {
            return None;
        }
        let cut = WidthSample {
            s,
            width: self.width_at(s)?,
            position: if self.samples.len() == 1 { first.position } else { self.position_at(s) },
            active: None,
        };
        let idx = self.samples.partition_point(|x| x.s < s);
        let mut head: Vec<WidthSample<T>> = self.samples[..idx].to_vec();
        let mut tail: Vec<WidthSample<T>> = Vec::new();
        if idx < self.samples.len() && self.samples[idx].s == s {
            head.push(self.samples[idx]);
            tail.push(self.samples[idx]);
            tail.extend_from_slice(&self.samples[idx + 1..]);
        } else {
            head.push(cut);
            tail.push(cut);
            tail.extend_from_slice(&self.samples[idx..]);
        }
        let tail = Self { samples: tail }.rebased(T::zero());
        Some((Self { samples: head }, tail))
    }

    /// CSV with header `s_m,width_m,x,y`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s_m,width_m,x,y\n");
        for s in &self.samples {
            out.push_str(&format!(
                "{:.6},{:.6},{:.6},{:.6}\n",
                s.s, s.width, s.position.x, s.position.y
            ));
        }
        out
    }
}
