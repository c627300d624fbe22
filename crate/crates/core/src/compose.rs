//! Composition products: cascade `c∘d`, mixed `c∘̃d_δ`, the group `⊚`, and Wiener-Fliess `d∘̆c`.

use std::collections::HashMap;
use std::rc::Rc;

use num_traits::{One, Zero};

use crate::error::{FpaError, Result};
use crate::series::{add_scaled, add_term, CommSeries, Monomial, NCSeries, Terms, Q};
use crate::shuffle::{shuffle_terms, unit_terms};
use crate::word::{Letter, Word};

/// Evaluates `ψ_d(η)(1)` or `φ_d(η)(1)` right to left, memoized by `(suffix, degree)`.
struct Homomorphism<'a> {
    d: &'a NCSeries,
    mixed: bool,
    memo: HashMap<(Word, usize), Rc<Terms>>,
}

impl<'a> Homomorphism<'a> {
    fn new(d: &'a NCSeries, mixed: bool) -> Self {
        Homomorphism { d, mixed, memo: HashMap::new() }
    }

    /// One letter: `ψ(x_i)e = x0(d_i ⧢ e)` with `d_0 = 1`; `φ(x_i)e = x_i e + x0(d_i ⧢ e)` with `d_0 = 0`.
    fn apply_letter(&self, i: Letter, e: &Terms, deg: usize) -> Terms {
        let mut out = Terms::new();
        if deg == 0 {
            return out;
        }
        if i == 0 {
            for (w, c) in e {
                if w.len() < deg {
                    out.insert(w.prepend(0), c.clone());
                }
            }
            return out;
        }
        if self.mixed {
            for (w, c) in e {
                if w.len() < deg {
                    out.insert(w.prepend(i), c.clone());
                }
            }
        }
        for (w, c) in shuffle_terms(self.d.terms(i as usize - 1), e, deg - 1) {
            add_term(&mut out, w.prepend(0), c);
        }
        out
    }

    fn eval(&mut self, s: &[Letter], deg: usize) -> Rc<Terms> {
        if s.is_empty() {
            return Rc::new(unit_terms());
        }
        if deg == 0 {
            return Rc::new(Terms::new());
        }
        let key = (Word::from(s), deg);
        if let Some(t) = self.memo.get(&key) {
            return t.clone();
        }
        let inner = self.eval(&s[1..], deg - 1);
        let out = Rc::new(self.apply_letter(s[0], &inner, deg));
        self.memo.insert(key, out.clone());
        out
    }

    fn sum(&mut self, c: &NCSeries, m_out: usize, maxdeg: usize) -> NCSeries {
        let comps = (0..c.ell())
            .map(|k| {
                let mut acc = Terms::new();
                for (w, cw) in c.terms(k) {
                    if w.len() > maxdeg {
                        break;
                    }
                    let t = self.eval(w.letters(), maxdeg);
                    add_scaled(&mut acc, &t, cw, maxdeg);
                }
                acc
            })
            .collect();
        NCSeries::from_raw(m_out, maxdeg, comps)
    }
}

/// `c∘d = Σ (c,η) ψ_d(η)(1)`. `d` needs one component per input letter of `c`; the result lives over `d`'s alphabet.
pub fn composition(c: &NCSeries, d: &NCSeries, n: usize) -> Result<NCSeries> {
    if d.ell() != c.m() {
        return Err(FpaError::ShapeMismatch(format!("inner series has {} components, outer series has {} inputs", d.ell(), c.m())));
    }
    let maxdeg = n.min(c.maxdeg()).min(d.maxdeg());
    Ok(Homomorphism::new(d, false).sum(c, d.m(), maxdeg))
}

/// `c∘̃d_δ = Σ (c,η) φ_d(η)(1)`, where `d_δ = δ + d` and `δ` is the composition identity.
pub fn mixed_composition(c: &NCSeries, d: &NCSeries, n: usize) -> Result<NCSeries> {
    if d.m() != c.m() || d.ell() != c.m() {
        return Err(FpaError::ShapeMismatch(format!("mixed composition needs an {}-component series over x0..x{}", c.m(), c.m())));
    }
    let maxdeg = n.min(c.maxdeg()).min(d.maxdeg());
    Ok(Homomorphism::new(d, true).sum(c, c.m(), maxdeg))
}

/// Group product `c ⊚ d = d + c∘̃d_δ` on `m`-component series over `x0..xm`.
pub fn group_product(c: &NCSeries, d: &NCSeries, n: usize) -> Result<NCSeries> {
    if c.ell() != c.m() {
        return Err(FpaError::ShapeMismatch("group elements need as many components as inputs".into()));
    }
    mixed_composition(c, d, n)?.add(&d.truncate(n))
}

/// Inverse under `⊚`: the fixed point of `w ↦ -c∘̃w_δ`, reached in at most `N + 1` steps.
pub fn group_inverse(c: &NCSeries, n: usize) -> Result<NCSeries> {
    if c.ell() != c.m() {
        return Err(FpaError::ShapeMismatch("group elements need as many components as inputs".into()));
    }
    let maxdeg = n.min(c.maxdeg());
    let c = c.truncate(maxdeg);
    let mut w = c.neg();
    for _ in 0..maxdeg + 2 {
        let next = mixed_composition(&c, &w, maxdeg)?.neg();
        if next == w {
            return Ok(w);
        }
        w = next;
    }
    Err(FpaError::NoConvergence { iterations: maxdeg + 2 })
}

/// Shuffle power `c_1^{⧢k_1} ⧢ ... ⧢ c_ℓ^{⧢k_ℓ}` of a monomial, memoized over exponent vectors.
struct MonomialPowers<'a> {
    c: &'a NCSeries,
    maxdeg: usize,
    memo: HashMap<Vec<u32>, Rc<Terms>>,
}

impl<'a> MonomialPowers<'a> {
    fn new(c: &'a NCSeries, maxdeg: usize) -> Self {
        MonomialPowers { c, maxdeg, memo: HashMap::new() }
    }

    fn get(&mut self, k: &[u32]) -> Rc<Terms> {
        if let Some(t) = self.memo.get(k) {
            return t.clone();
        }
        let out = match k.iter().position(|&e| e > 0) {
            None => Rc::new(unit_terms()),
            Some(j) => {
                let mut prev = k.to_vec();
                prev[j] -= 1;
                let p = self.get(&prev);
                Rc::new(shuffle_terms(self.c.terms(j), &p, self.maxdeg))
            }
        };
        self.memo.insert(k.to_vec(), out.clone());
        out
    }
}

/// Truncation degree of `d∘̆c`, or the reason the pair is not admissible.
pub fn wf_admissible(d: &CommSeries, c: &NCSeries, n: usize) -> Result<usize> {
    if d.nvars() != c.ell() {
        return Err(FpaError::ShapeMismatch(format!("static map in {} variables for {} outputs", d.nvars(), c.ell())));
    }
    if !c.is_proper() && !d.is_polynomial() {
        return Err(FpaError::Inadmissible("non-proper series composed with a non-polynomial static map".into()));
    }
    let mut maxdeg = n.min(c.maxdeg());
    if !d.is_polynomial() {
        maxdeg = maxdeg.min(d.maxdeg());
    }
    Ok(maxdeg)
}

/// `d∘̆c = Σ (d,η̃) c^{⧢η̃}` by direct summation.
///
/// Admissible when `c` is proper or `d` is a polynomial. With `c` proper and `d` a
/// truncated series, the result is exact only up to `d`'s truncation degree.
pub fn wf_compose(d: &CommSeries, c: &NCSeries, n: usize) -> Result<NCSeries> {
    let maxdeg = wf_admissible(d, c, n)?;
    let proper = c.is_proper();
    let mut powers = MonomialPowers::new(c, maxdeg);
    let comps = (0..d.ncomps())
        .map(|k| {
            let mut acc = Terms::new();
            for (mono, coeff) in d.terms(k) {
                if proper && mono.degree() > maxdeg {
                    break;
                }
                let p = powers.get(&mono.0);
                add_scaled(&mut acc, &p, coeff, maxdeg);
            }
            acc
        })
        .collect();
    Ok(NCSeries::from_raw(c.m(), maxdeg, comps))
}

/// `d∘̆c` through the coordinate-function operators `χ` (proper `c`) or `χ̂` (all constant terms nonzero).
pub fn wf_compose_hopf(d: &CommSeries, c: &NCSeries, n: usize) -> Result<NCSeries> {
    let maxdeg = wf_admissible(d, c, n)?;
    let proper = c.is_proper();
    let words = crate::word::enumerate_words_upto(c.m(), maxdeg);
    let mut comps = Vec::with_capacity(d.ncomps());
    for k in 0..d.ncomps() {
        let mut acc = Terms::new();
        for (mono, coeff) in d.terms(k) {
            if proper && mono.degree() > maxdeg {
                break;
            }
            for w in &words {
                let v = if proper { crate::shuffle::chi_eval(mono, w, c)? } else { crate::shuffle::chi_hat_eval(mono, w, c)? };
                if !v.is_zero() {
                    add_term(&mut acc, w.clone(), v * coeff);
                }
            }
        }
        comps.push(acc);
    }
    Ok(NCSeries::from_raw(c.m(), maxdeg, comps))
}

/// `η̃ ∘̆ c` for a single monomial.
pub fn monomial_compose(eta: &Monomial, c: &NCSeries, n: usize) -> Result<NCSeries> {
    let d = CommSeries::polynomial(eta.0.len(), 1, [(eta.clone(), vec![Q::one()])])?;
    wf_compose(&d, c, n)
}
