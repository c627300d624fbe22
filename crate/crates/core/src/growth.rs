//! Seminorms, growth-constant fitting, and numeric validators for coefficient bounds.
//!
//! All real-valued comparisons run in `f64` with log-gamma and a relative slack of `1e-9`.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use statrs::function::gamma::ln_gamma;

use crate::compose::{mixed_composition, wf_compose};
use crate::error::{FpaError, Result};
use crate::series::{CommSeries, NCSeries, Q};
use crate::shuffle::{shuffle, shuffle_power};
use crate::word::Word;

pub const SLACK: f64 = 1e-9;

/// `a <= b` up to the relative slack.
pub fn le_slack(a: f64, b: f64) -> bool {
    a <= b + SLACK * b.abs().max(a.abs())
}

/// `e^a <= e^b` up to the relative slack, i.e. `a <= b + ln(1 + SLACK)`.
pub fn le_ln(a: f64, b: f64) -> bool {
    a <= b + SLACK.ln_1p()
}

fn ln_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits < 1000 {
        n.abs().to_f64().unwrap().ln()
    } else {
        let shift = bits - 64;
        (n.abs() >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// `ln|x|`, finite for every nonzero rational.
pub fn ln_abs(x: &Q) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    ln_bigint(x.numer()) - ln_bigint(x.denom())
}

pub fn ln_factorial(n: usize) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

/// Truncated seminorm `sup_{|η|≤N} |(c,η)| R^{|η|} / |η|!`, reported with the degree it covers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Seminorm {
    pub value: f64,
    pub maxdeg: usize,
}

pub fn seminorm(c: &NCSeries, r: f64) -> Result<Seminorm> {
    if r <= 0.0 || !r.is_finite() {
        return Err(FpaError::Domain(format!("radius {r} must be positive")));
    }
    let mut best = f64::NEG_INFINITY;
    for i in 0..c.ell() {
        for (w, a) in c.terms(i) {
            let n = w.len();
            let v = ln_abs(a) + n as f64 * r.ln() - ln_factorial(n);
            best = best.max(v);
        }
    }
    Ok(Seminorm { value: if best.is_finite() { best.exp() } else { 0.0 }, maxdeg: c.maxdeg() })
}

/// Coefficient bound `|(c,η)| ≤ K M^{|η|} (|η|!)^s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthBound {
    pub k: f64,
    pub m: f64,
    pub gevrey: f64,
}

impl GrowthBound {
    pub fn new(k: f64, m: f64, gevrey: f64) -> Self {
        assert!(k > 0.0 && m > 0.0, "growth constants must be positive");
        GrowthBound { k, m, gevrey }
    }

    pub fn ln_at(&self, n: usize) -> f64 {
        self.k.ln() + n as f64 * self.m.ln() + self.gevrey * ln_factorial(n)
    }

    /// Whether every stored coefficient of `c` respects the bound.
    pub fn dominates(&self, c: &NCSeries) -> bool {
        (0..c.ell()).all(|i| c.terms(i).iter().all(|(w, a)| le_ln(ln_abs(a), self.ln_at(w.len()))))
    }

    pub fn dominates_comm(&self, d: &CommSeries) -> bool {
        (0..d.ncomps()).all(|i| d.terms(i).iter().all(|(k, a)| le_ln(ln_abs(a), self.ln_at(k.degree()))))
    }
}

/// The grid `{2^{k/8} : -32 ≤ k ≤ 64}`.
pub fn m_grid() -> impl Iterator<Item = f64> {
    (-32..=64).map(|k| 2f64.powf(k as f64 / 8.0))
}

/// Fits `(K, M)` to a profile of `ln max|coefficient|` per degree (`-inf` where empty).
///
/// `M` is the smallest grid value dominating every local growth rate in the upper half of
/// the degrees; `K` is then the largest ratio. Returns `None` when the upper-half rates
/// are positive and keep increasing across three or more steps, which is read as growth
/// beyond class `s`.
pub fn fit_profile(ln_max: &[f64], s: f64) -> Option<GrowthBound> {
    let maxdeg = ln_max.len().saturating_sub(1);
    let pts: Vec<(usize, f64)> = ln_max.iter().enumerate().filter(|(_, v)| v.is_finite()).map(|(n, v)| (n, v - s * ln_factorial(n))).collect();
    if pts.is_empty() {
        return None;
    }
    let rates: Vec<f64> = pts.windows(2).filter(|p| 2 * p[1].0 > maxdeg).map(|p| (p[1].1 - p[0].1) / (p[1].0 - p[0].0) as f64).collect();
    if rates.len() >= 3 {
        let increasing = rates[0] > SLACK && rates.windows(2).all(|r| r[1] > r[0] + SLACK);
        if increasing && rates[rates.len() - 1] - rates[0] > std::f64::consts::LN_2 / 8.0 {
            return None;
        }
    }
    let need = rates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let m = m_grid().find(|m| le_ln(need, m.ln()))?;
    let k = pts.iter().map(|&(n, v)| v - n as f64 * m.ln()).fold(f64::NEG_INFINITY, f64::max).exp();
    Some(GrowthBound::new(k, m, s))
}

/// Growth fit of a noncommutative series in Gevrey class `s`.
pub fn fit_growth(c: &NCSeries, s: f64) -> Option<GrowthBound> {
    let prof = exact_profile(c.maxdeg(), (0..c.ell()).flat_map(|i| c.terms(i).iter().map(|(w, a)| (w.len(), a))));
    fit_profile(&prof, s)
}

/// Growth fit of a commutative series, by total degree.
pub fn fit_growth_comm(d: &CommSeries, s: f64) -> Option<GrowthBound> {
    let exact = exact_profile(d.maxdeg(), (0..d.ncomps()).flat_map(|i| d.terms(i).iter().map(|(k, a)| (k.degree(), a))));
    fit_profile(&exact, s)
}

fn exact_profile<'a, I: Iterator<Item = (usize, &'a Q)>>(maxdeg: usize, it: I) -> Vec<f64> {
    let mut out = vec![f64::NEG_INFINITY; maxdeg + 1];
    for (n, a) in it {
        out[n] = out[n].max(ln_abs(a));
    }
    out
}

/// Result of a coefficientwise bound check.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub holds: bool,
    /// Largest `|coefficient| / bound` seen.
    pub worst_ratio: f64,
    pub worst_word: Option<Word>,
}

fn check_against<F: Fn(usize) -> f64>(result: &NCSeries, ln_bound: F) -> BoundReport {
    let mut rep = BoundReport { holds: true, worst_ratio: 0.0, worst_word: None };
    for i in 0..result.ell() {
        for (w, a) in result.terms(i) {
            let lb = ln_bound(w.len());
            let la = ln_abs(a);
            let ratio = (la - lb).exp();
            if ratio > rep.worst_ratio {
                rep.worst_ratio = ratio;
                rep.worst_word = Some(w.clone());
            }
            if !le_ln(la, lb) {
                rep.holds = false;
            }
        }
    }
    rep
}

/// Local bound on `d∘̆c` for proper `c` with `k` components.
///
/// `d_bound` is `|(d,η̃)| ≤ K_d M_d^{|η̃|}`; `c_bound` is `|(c_i,ζ)| ≤ K_c M_c^{|ζ|}|ζ|!`.
pub fn wf_local_bound_ln(d_bound: &GrowthBound, c_bound: &GrowthBound, k: usize, n: usize) -> f64 {
    let (kd, md, kc, mc) = (d_bound.k, d_bound.m, c_bound.k, c_bound.m);
    if n == 0 {
        return kd.ln();
    }
    let a = k as f64 * kc * md;
    (k as f64 * kd * kc * md / (1.0 + a)).ln() + n as f64 * (mc * (1.0 + a)).ln() + ln_factorial(n)
}

pub fn check_wf_local_bound(d_bound: &GrowthBound, c_bound: &GrowthBound, k: usize, result: &NCSeries) -> BoundReport {
    check_against(result, |n| wf_local_bound_ln(d_bound, c_bound, k, n))
}

/// Computes `d∘̆c` and checks it against [`wf_local_bound_ln`].
pub fn wf_local_bound_instance(d: &CommSeries, d_bound: &GrowthBound, c: &NCSeries, c_bound: &GrowthBound, n: usize) -> Result<BoundReport> {
    if !d_bound.dominates_comm(d) || !c_bound.dominates(c) || !c.is_proper() {
        return Err(FpaError::Domain("input bounds are not certified for these series".into()));
    }
    Ok(check_wf_local_bound(d_bound, c_bound, c.ell(), &wf_compose(d, c, n)?))
}

/// Local bound on `c∘̃d_δ` where `|(c,η)| ≤ K_c M_c^{|η|}|η|!` and `|(d_i,ζ)| ≤ K_d M_d^{|ζ|}|ζ|!`.
pub fn mixed_bound_ln(c_bound: &GrowthBound, d_bound: &GrowthBound, m: usize, n: usize) -> f64 {
    let (kc, mc, kd, md) = (c_bound.k, c_bound.m, d_bound.k, d_bound.m);
    if n == 0 {
        return kc.ln();
    }
    let a = 1.0 + m as f64 * kd;
    let base = a * mc + md;
    (kc * mc * a / base).ln() + n as f64 * base.ln() + ln_factorial(n)
}

pub fn check_mixed_bound(c_bound: &GrowthBound, d_bound: &GrowthBound, m: usize, result: &NCSeries) -> BoundReport {
    check_against(result, |n| mixed_bound_ln(c_bound, d_bound, m, n))
}

pub fn mixed_bound_instance(c: &NCSeries, c_bound: &GrowthBound, d: &NCSeries, d_bound: &GrowthBound, n: usize) -> Result<BoundReport> {
    if !c_bound.dominates(c) || !d_bound.dominates(d) {
        return Err(FpaError::Domain("input bounds are not certified for these series".into()));
    }
    Ok(check_mixed_bound(c_bound, d_bound, c.m(), &mixed_composition(c, d, n)?))
}

/// `𝒜(K) = 1 / (1 - mK ln(1 + 1/(mK)))`.
pub fn antipode_amplification(k: f64, m: usize) -> f64 {
    let a = m as f64 * k;
    1.0 / (1.0 - a * (1.0 / a).ln_1p())
}

/// Constants `(K_r, K̃_r, M_r)` of the two-sided gamma estimate.
pub fn gamma_constants(r: f64) -> (f64, f64, f64) {
    let base = 2.0 * std::f64::consts::PI / std::f64::consts::E.powi(2);
    let kr = (base.powf(1.0 - r) * r).sqrt();
    let kr_tilde = 2.0 * (base.powf(1.0 - r) * 4.0).sqrt();
    (kr, kr_tilde, r.powf(r))
}

/// `K_r M_r^x Γ(x+1)^r ≤ Γ(rx+1) ≤ K̃_r 2^x Γ(x+1)^r`, as `(lower holds, upper holds)`.
pub fn gamma_inequality_check(x: f64, r: f64) -> (bool, bool) {
    assert!(x >= 0.0 && r > 0.0 && r <= 1.0);
    let (kr, krt, mr) = gamma_constants(r);
    let mid = ln_gamma(r * x + 1.0);
    let g = r * ln_gamma(x + 1.0);
    let lower = kr.ln() + x * mr.ln() + g;
    let upper = krt.ln() + x * std::f64::consts::LN_2 + g;
    (le_ln(lower, mid), le_ln(mid, upper))
}

fn compositions(m: usize, n: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(m: usize, left: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() + 1 == m {
            cur.push(left);
            f(cur);
            cur.pop();
            return;
        }
        for i in 0..=left {
            cur.push(i);
            rec(m, left - i, cur, f);
            cur.pop();
        }
    }
    rec(m, n, &mut Vec::with_capacity(m), f);
}

/// Both sides of the neoclassical inequality
/// `Σ_{i_1+…+i_m=n} (rn; ri_1,…,ri_m) x_1^{ri_1}⋯x_m^{ri_m} ≤ (1/r)^{2(m-1)} (x_1+…+x_m)^{rn}`,
/// with gamma-function multinomials.
pub fn neoclassical_sides(r: f64, n: usize, x: &[f64]) -> (f64, f64) {
    assert!(r > 0.0 && r <= 1.0 && !x.is_empty() && x.iter().all(|&v| v >= 0.0));
    let m = x.len();
    let rn = r * n as f64;
    let mut lhs = 0.0;
    compositions(m, n, &mut |idx| {
        let mut l = ln_gamma(rn + 1.0);
        for (&i, &xi) in idx.iter().zip(x) {
            let e = r * i as f64;
            l -= ln_gamma(e + 1.0);
            if e > 0.0 {
                l += e * xi.ln();
            }
        }
        lhs += l.exp();
    });
    let total: f64 = x.iter().sum();
    let rhs = (1.0 / r).powi(2 * (m as i32 - 1)) * if rn == 0.0 { 1.0 } else { total.powf(rn) };
    (lhs, rhs)
}

pub fn neoclassical_check(r: f64, n: usize, x: &[f64]) -> bool {
    let (l, rh) = neoclassical_sides(r, n, x);
    le_slack(l, rh)
}

/// `E_α(x) = Σ x^n / Γ(αn + 1)`, summed until the terms have peaked and dropped below `tol`.
pub fn mittag_leffler(alpha: f64, x: f64, tol: f64) -> f64 {
    assert!(alpha > 0.0 && alpha <= 1.0 && x >= 0.0 && tol > 0.0);
    if x == 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    for n in 0.. {
        let t = (n as f64 * x.ln() - ln_gamma(alpha * n as f64 + 1.0)).exp();
        sum += t;
        if t < prev && t < tol * sum.max(1.0) {
            break;
        }
        prev = t;
    }
    sum
}

/// `‖c_1 ⧢ … ⧢ c_k‖_{εR} ≤ ∏‖c_i‖_R / (1-ε)^k` on truncations.
pub fn check_shuffle_seminorm_bound(cs: &[NCSeries], r: f64, eps: f64, n: usize) -> Result<bool> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(FpaError::Domain(format!("epsilon = {eps} must lie in (0, 1)")));
    }
    let first = cs.first().ok_or_else(|| FpaError::Domain("empty list".into()))?;
    let mut prod = first.truncate(n);
    let mut rhs = seminorm(first, r)?.value;
    for c in &cs[1..] {
        prod = shuffle(&prod, c, n)?;
        rhs *= seminorm(c, r)?.value;
    }
    rhs /= (1.0 - eps).powi(cs.len() as i32);
    Ok(le_slack(seminorm(&prod, eps * r)?.value, rhs))
}

fn ln_binom(a: usize, b: usize) -> f64 {
    ln_factorial(a) - ln_factorial(b) - ln_factorial(a - b)
}

/// `|(e^{⧢n},ζ)| ≤ K^n M^{|ζ|-nj} |ζ|! C(|ζ|-1, n-1)` for proper `e` with `|(e,ζ)| ≤ K M^{|ζ|-j}|ζ|!`.
pub fn check_shuffle_power_growth(e: &NCSeries, k: f64, m: f64, j: usize, n: usize, maxdeg: usize) -> Result<BoundReport> {
    if !e.is_proper() || n == 0 {
        return Err(FpaError::Domain("shuffle power bound needs a proper series and n ≥ 1".into()));
    }
    let certified = (0..e.ell()).all(|i| {
        e.terms(i).iter().all(|(w, a)| {
            let z = w.len();
            le_ln(ln_abs(a), k.ln() + (z as f64 - j as f64) * m.ln() + ln_factorial(z))
        })
    });
    if !certified {
        return Err(FpaError::Domain("input bound is not certified".into()));
    }
    let p = shuffle_power(e, n, maxdeg);
    let mut rep = check_against(&p, |z| {
        if z < n {
            f64::NEG_INFINITY
        } else {
            n as f64 * k.ln() + (z as f64 - (n * j) as f64) * m.ln() + ln_factorial(z) + ln_binom(z - 1, n - 1)
        }
    });
    if rep.worst_ratio.is_nan() {
        rep.holds = false;
    }
    Ok(rep)
}
