//! Closed-loop products: dynamic feedback `c@d`, static feedback `c@̂d`, and relative degree.

use num_traits::Zero;

use crate::compose::{composition, group_inverse, mixed_composition, wf_admissible, wf_compose};
use crate::error::{FpaError, Result};
use crate::series::{CommSeries, NCSeries, Q};
use crate::word::Word;

fn check_static_shape(c: &NCSeries, d: &CommSeries) -> Result<()> {
    if d.nvars() != c.ell() || d.ncomps() != c.m() {
        return Err(FpaError::ShapeMismatch(format!(
            "static map R^{} -> R^{} does not close a loop around {} outputs and {} inputs",
            d.nvars(),
            d.ncomps(),
            c.ell(),
            c.m()
        )));
    }
    Ok(())
}

/// Static output feedback `c@̂d = c∘̃(-d∘̆c)_δ^{-1}`.
pub fn static_feedback(c: &NCSeries, d: &CommSeries, n: usize) -> Result<NCSeries> {
    check_static_shape(c, d)?;
    let maxdeg = wf_admissible(d, c, n)?;
    let e = wf_compose(&d.neg(), c, maxdeg)?;
    let inv = group_inverse(&e, maxdeg)?;
    mixed_composition(c, &inv, maxdeg)
}

/// Dynamic output feedback `c@d = c∘̃(-d∘c)_δ^{-1}`; `d` maps the `ℓ` outputs back to the `m` inputs.
pub fn dynamic_feedback(c: &NCSeries, d: &NCSeries, n: usize) -> Result<NCSeries> {
    if d.m() != c.ell() || d.ell() != c.m() {
        return Err(FpaError::ShapeMismatch(format!(
            "feedback series over x0..x{} with {} components cannot close a loop around {} outputs and {} inputs",
            d.m(),
            d.ell(),
            c.ell(),
            c.m()
        )));
    }
    let maxdeg = n.min(c.maxdeg()).min(d.maxdeg());
    let e = composition(d, c, maxdeg)?.neg();
    let inv = group_inverse(&e, maxdeg)?;
    mixed_composition(c, &inv, maxdeg)
}

/// Outcome of the contraction iteration `e ↦ c∘̃(d∘̆e)_δ`.
#[derive(Debug, Clone)]
pub struct FixedPoint {
    pub series: NCSeries,
    /// Map evaluations performed, including the one that confirmed stabilization.
    pub iterations: usize,
    /// `ord(e^{k+1} - e^k)` for each evaluation; `None` once the iterates agree.
    pub increments: Vec<Option<usize>>,
}

/// Static feedback by fixed-point iteration from `e^0 = c`; gives up after `N + 2` evaluations.
pub fn static_feedback_fixed_point(c: &NCSeries, d: &CommSeries, n: usize) -> Result<FixedPoint> {
    check_static_shape(c, d)?;
    let maxdeg = wf_admissible(d, c, n)?;
    let c = c.truncate(maxdeg);
    let mut e = c.clone();
    let mut increments = Vec::new();
    for k in 1..=maxdeg + 2 {
        let next = mixed_composition(&c, &wf_compose(d, &e, maxdeg)?, maxdeg)?;
        let ord = next.sub(&e)?.order();
        increments.push(ord);
        if ord.is_none() {
            return Ok(FixedPoint { series: next, iterations: k, increments });
        }
        e = next;
    }
    Err(FpaError::NoConvergence { iterations: maxdeg + 2 })
}

/// `(c@̂d1)@̂d2 == c@̂(d1 + d2)` up to `N`.
pub fn group_action_check(c: &NCSeries, d1: &CommSeries, d2: &CommSeries, n: usize) -> Result<bool> {
    let left = static_feedback(&static_feedback(c, d1, n)?, d2, n)?;
    let right = static_feedback(c, &d1.add(d2)?, n)?;
    let k = left.maxdeg().min(right.maxdeg());
    Ok(left.truncate(k) == right.truncate(k))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelativeDegreeReport {
    /// `None` when the series has no relative degree on the checked words.
    pub r: Option<usize>,
    /// The coefficient `K` of `x0^{r-1}x1`.
    pub gain: Option<Q>,
    pub truncation_limited: bool,
    pub maxdeg: usize,
}

/// Relative degree of a single-input single-output series.
///
/// `r` is defined when every word containing `x1` starts with `x0^{r-1}` and the word
/// `x0^{r-1}x1` itself has a nonzero coefficient.
pub fn relative_degree(c: &NCSeries) -> Result<RelativeDegreeReport> {
    if c.m() != 1 || c.ell() != 1 {
        return Err(FpaError::ShapeMismatch("relative degree needs one input and one output".into()));
    }
    let maxdeg = c.maxdeg();
    let lead = c.terms(0).keys().filter_map(|w| w.letters().iter().position(|&l| l == 1)).min();
    let Some(p) = lead else {
        return Ok(RelativeDegreeReport { r: None, gain: None, truncation_limited: true, maxdeg });
    };
    let mut key = vec![0; p];
    key.push(1);
    let gain = c.coeff(&Word(key), 0)?;
    let r = p + 1;
    if gain.is_zero() {
        return Ok(RelativeDegreeReport { r: None, gain: None, truncation_limited: maxdeg < r + 1, maxdeg });
    }
    Ok(RelativeDegreeReport { r: Some(r), gain: Some(gain), truncation_limited: maxdeg < r + 1, maxdeg })
}

/// Whether static feedback left a defined relative degree unchanged.
pub fn feedback_relative_degree_check(c: &NCSeries, d: &CommSeries, n: usize) -> Result<bool> {
    let before = relative_degree(&c.truncate(n))?;
    if before.r.is_none() {
        return Ok(true);
    }
    let after = relative_degree(&static_feedback(c, d, n)?)?;
    Ok(before.r == after.r)
}
