use serde::{Deserialize, Serialize};

use super::SpectrumSeries;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Peak<T> {
    pub index: usize,
    pub omega: T,
    pub power: T,
    /// Height above the higher of the two minima separating the peak from
    /// taller neighbours (or the grid ends).
    pub prominence: T,
}

fn prominence<T: Real>(v: &[T], i: usize) -> T {
    let mut left = v[i];
    for &x in v[..i].iter().rev() {
        if x > v[i] {
            break;
        }
        left = left.min(x);
    }
    let mut right = v[i];
    for &x in &v[i + 1..] {
        if x > v[i] {
            break;
        }
        right = right.min(x);
    }
    v[i] - left.max(right)
}

/// Local maxima whose prominence is at least `rel_prominence` times the
/// global maximum, ascending in frequency.
///
/// Plateaus count once, at their first bin.
pub fn find_peaks<T: Real>(spectrum: &SpectrumSeries<T>, rel_prominence: T) -> Vec<Peak<T>> {
    let v = &spectrum.values;
    let top = v.iter().fold(T::zero(), |a, &b| a.max(b));
    if v.len() < 3 || top <= T::zero() {
        return Vec::new();
    }
    let floor = top * rel_prominence;
    let mut peaks = Vec::new();
    let mut i = 1;
    while i + 1 < v.len() {
        if v[i] > v[i - 1] {
            let mut j = i;
            while j + 1 < v.len() && v[j + 1] == v[i] {
                j += 1;
            }
            if j + 1 < v.len() && v[j + 1] < v[i] {
                let prom = prominence(v, i);
                if prom >= floor {
                    peaks.push(Peak {
                        index: i,
                        omega: spectrum.omegas[i],
                        power: v[i],
                        prominence: prom,
                    });
                }
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    peaks
}
