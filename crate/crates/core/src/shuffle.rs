//! Shuffle algebra, the shuffle group, and the Hopf algebra of coordinate functions on it.
//!
//! Coordinate functions `a_η(c) = (c, η)` carry the deshuffle coproduct, whose antipode
//! computes coefficients of shuffle inverses one word at a time.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use crate::error::{FpaError, Result};
use crate::series::{add_term, Monomial, NCSeries, Terms, Q};
use crate::word::{Letter, Word};

/// Words up to this length have their partition map materialized; longer words stream subsets.
pub const PARTITION_CAP: usize = 16;

/// All interleavings of `a` and `b`, with multiplicity.
pub fn shuffle_words(a: &[Letter], b: &[Letter]) -> BTreeMap<Word, u64> {
    let mut out = BTreeMap::new();
    let mut buf = Vec::with_capacity(a.len() + b.len());
    interleave(a, b, &mut buf, &mut out);
    out
}

fn interleave(a: &[Letter], b: &[Letter], buf: &mut Vec<Letter>, out: &mut BTreeMap<Word, u64>) {
    if a.is_empty() || b.is_empty() {
        let mut w = buf.clone();
        w.extend_from_slice(a);
        w.extend_from_slice(b);
        *out.entry(Word(w)).or_insert(0) += 1;
        return;
    }
    buf.push(a[0]);
    interleave(&a[1..], b, buf, out);
    buf.pop();
    buf.push(b[0]);
    interleave(a, &b[1..], buf, out);
    buf.pop();
}

pub(crate) fn shuffle_terms(a: &Terms, b: &Terms, maxdeg: usize) -> Terms {
    let mut acc: HashMap<Word, Q> = HashMap::new();
    for (u, cu) in a {
        if u.len() > maxdeg {
            break;
        }
        for (v, cv) in b {
            if u.len() + v.len() > maxdeg {
                break;
            }
            let p = cu * cv;
            if u.is_empty() || v.is_empty() {
                let w = if u.is_empty() { v.clone() } else { u.clone() };
                *acc.entry(w).or_insert_with(Q::zero) += p;
                continue;
            }
            for (w, k) in shuffle_words(u.letters(), v.letters()) {
                *acc.entry(w).or_insert_with(Q::zero) += &p * Q::from_integer(k.into());
            }
        }
    }
    acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

pub(crate) fn unit_terms() -> Terms {
    let mut t = Terms::new();
    t.insert(Word::empty(), Q::one());
    t
}

fn same_shape(c: &NCSeries, d: &NCSeries) -> Result<()> {
    if c.m() != d.m() || c.ell() != d.ell() {
        return Err(FpaError::ShapeMismatch("shuffle operands differ in alphabet or component count".into()));
    }
    Ok(())
}

/// Componentwise shuffle product, truncated at `min(N, c.N, d.N)`.
pub fn shuffle(c: &NCSeries, d: &NCSeries, n: usize) -> Result<NCSeries> {
    same_shape(c, d)?;
    let maxdeg = n.min(c.maxdeg()).min(d.maxdeg());
    let comps = (0..c.ell()).map(|i| shuffle_terms(c.terms(i), d.terms(i), maxdeg)).collect();
    Ok(NCSeries::from_raw(c.m(), maxdeg, comps))
}

/// `c^{⧢k}`, componentwise.
pub fn shuffle_power(c: &NCSeries, k: usize, n: usize) -> NCSeries {
    let maxdeg = n.min(c.maxdeg());
    let comps = (0..c.ell())
        .map(|i| {
            let mut acc = unit_terms();
            for _ in 0..k {
                acc = shuffle_terms(&acc, c.terms(i), maxdeg);
            }
            acc
        })
        .collect();
    NCSeries::from_raw(c.m(), maxdeg, comps)
}

/// `Σ_{k≥0} c^{⧢k}` for proper `c`, exact up to the truncation degree.
pub fn shuffle_star(c: &NCSeries, n: usize) -> Result<NCSeries> {
    if !c.is_proper() {
        return Err(FpaError::Domain("shuffle star needs a proper series".into()));
    }
    let maxdeg = n.min(c.maxdeg());
    let comps = (0..c.ell())
        .map(|i| {
            // Horner: s <- 1 + c ⧢ s, each pass fixes one more degree
            let mut s = unit_terms();
            for _ in 0..maxdeg {
                s = shuffle_terms(c.terms(i), &s, maxdeg);
                add_term(&mut s, Word::empty(), Q::one());
            }
            s
        })
        .collect();
    Ok(NCSeries::from_raw(c.m(), maxdeg, comps))
}

/// Componentwise shuffle inverse `(c,∅)^{-1} (1 - c/(c,∅))^{⧢*}`.
pub fn shuffle_inverse(c: &NCSeries, n: usize) -> Result<NCSeries> {
    let maxdeg = n.min(c.maxdeg());
    let mut parts = Vec::with_capacity(c.ell());
    for i in 0..c.ell() {
        let ci = c.component(i).truncate(maxdeg);
        let r = ci.constant(0);
        if r.is_zero() {
            return Err(FpaError::ZeroConstantTerm { component: i });
        }
        let rinv = r.recip();
        let cp = ci.scale(&-&rinv).proper_part();
        parts.push(shuffle_star(&cp, maxdeg)?.scale(&rinv));
    }
    NCSeries::from_components(&parts)
}

/// Terms `α ⊗ β` of the partition map μ(w), with multiplicity.
pub type TensorSum = BTreeMap<(Word, Word), u64>;

fn split_by_mask(w: &[Letter], mask: u64) -> (Word, Word) {
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (p, &l) in w.iter().enumerate() {
        if mask >> p & 1 == 1 {
            a.push(l);
        } else {
            b.push(l);
        }
    }
    (Word(a), Word(b))
}

/// Materialized μ(w); errors when `|w|` exceeds [`PARTITION_CAP`].
pub fn partition_map(w: &Word) -> Result<TensorSum> {
    if w.len() > PARTITION_CAP {
        return Err(FpaError::Domain(format!("partition map of a word of length {} exceeds the cap {PARTITION_CAP}", w.len())));
    }
    let mut out = TensorSum::new();
    for_each_split(w, |a, b| *out.entry((a, b)).or_insert(0) += 1);
    Ok(out)
}

/// Streams the `2^|w|` terms of μ(w).
pub fn for_each_split<F: FnMut(Word, Word)>(w: &Word, mut f: F) {
    assert!(w.len() < 64, "word too long to split");
    for mask in 0..(1u64 << w.len()) {
        let (a, b) = split_by_mask(w.letters(), mask);
        f(a, b);
    }
}

fn visit_partition<F: FnMut(&Word, &Word, u64)>(w: &Word, mut f: F) {
    if w.len() <= PARTITION_CAP {
        for ((a, b), k) in partition_map(w).expect("within cap") {
            f(&a, &b, k);
        }
    } else {
        for_each_split(w, |a, b| f(&a, &b, 1));
    }
}

fn coeff_or_zero(t: &Terms, w: &Word) -> Q {
    t.get(w).cloned().unwrap_or_else(Q::zero)
}

/// `Δa_w(c, d) = Σ a_{w(1)}(c) a_{w(2)}(d)` on single-component series.
pub fn coproduct_eval(w: &Word, c: &NCSeries, d: &NCSeries) -> Result<Q> {
    c.coeff(w, 0)?;
    d.coeff(w, 0)?;
    let mut acc = Q::zero();
    visit_partition(w, |a, b, k| {
        if let (Some(x), Some(y)) = (c.terms(0).get(a), d.terms(0).get(b)) {
            acc += x * y * Q::from_integer(k.into());
        }
    });
    Ok(acc)
}

/// `Δ'a_w = Δa_w - a_w ⊗ 1 - 1 ⊗ a_w`, and zero on the empty word.
pub fn reduced_coproduct_eval(w: &Word, c: &NCSeries, d: &NCSeries) -> Result<Q> {
    if w.is_empty() {
        return Ok(Q::zero());
    }
    Ok(coproduct_eval(w, c, d)? - c.coeff(w, 0)? * d.constant(0) - c.constant(0) * d.coeff(w, 0)?)
}

/// Antipode evaluator `S(a_η)(c) = (c^{⧢-1}, η)` for one component, memoized per word.
pub struct Antipode {
    normalized: Terms,
    scale: Q,
    memo: HashMap<Word, Q>,
    maxdeg: usize,
}

impl Antipode {
    /// Normalizes `c` to constant term one; the result is rescaled by `1/(c,∅)`.
    pub fn new(c: &NCSeries) -> Result<Self> {
        if c.ell() != 1 {
            return Err(FpaError::ShapeMismatch("antipode evaluator takes one component".into()));
        }
        let r = c.constant(0);
        if r.is_zero() {
            return Err(FpaError::ZeroConstantTerm { component: 0 });
        }
        let rinv = r.recip();
        let normalized = c.scale(&rinv).terms(0).clone();
        let mut memo = HashMap::new();
        memo.insert(Word::empty(), Q::one());
        Ok(Antipode { normalized, scale: rinv, memo, maxdeg: c.maxdeg() })
    }

    fn s(&mut self, w: &Word) -> Q {
        if let Some(v) = self.memo.get(w) {
            return v.clone();
        }
        // S(a) = -a - Σ a'(1) S(a'(2)) over the reduced coproduct
        let mut acc = -coeff_or_zero(&self.normalized, w);
        let mut terms: Vec<(Word, Word, u64)> = Vec::new();
        visit_partition(w, |a, b, k| {
            if !a.is_empty() && !b.is_empty() && self.normalized.contains_key(a) {
                terms.push((a.clone(), b.clone(), k));
            }
        });
        for (a, b, k) in terms {
            let ca = self.normalized[&a].clone();
            acc -= ca * self.s(&b) * Q::from_integer(k.into());
        }
        self.memo.insert(w.clone(), acc.clone());
        acc
    }

    pub fn eval(&mut self, w: &Word) -> Result<Q> {
        if w.len() > self.maxdeg {
            return Err(FpaError::DegreeExceeded { len: w.len(), maxdeg: self.maxdeg });
        }
        Ok(self.s(w) * &self.scale)
    }
}

/// `S(a_w)(c)` for single-component `c` with nonzero constant term.
pub fn antipode_eval(w: &Word, c: &NCSeries) -> Result<Q> {
    Antipode::new(c)?.eval(w)
}

/// Shuffle inverse assembled word by word from the antipode.
pub fn shuffle_inverse_antipode(c: &NCSeries, n: usize) -> Result<NCSeries> {
    let maxdeg = n.min(c.maxdeg());
    let mut parts = Vec::new();
    for i in 0..c.ell() {
        let ci = c.component(i).truncate(maxdeg);
        let mut s = Antipode::new(&ci).map_err(|e| match e {
            FpaError::ZeroConstantTerm { .. } => FpaError::ZeroConstantTerm { component: i },
            e => e,
        })?;
        let mut out = Terms::new();
        for w in crate::word::enumerate_words_upto(c.m(), maxdeg) {
            add_term(&mut out, w.clone(), s.eval(&w)?);
        }
        parts.push(NCSeries::from_raw(c.m(), maxdeg, vec![out]));
    }
    NCSeries::from_components(&parts)
}

fn subword(w: &[Letter], mask: u32) -> Word {
    Word(w.iter().enumerate().filter(|(p, _)| mask >> p & 1 == 1).map(|(_, &l)| l).collect())
}

/// Σ over maps positions→slots of ∏ (slot series, subword); empty slots allowed only if `allow_empty`.
fn slot_sum(w: &[Letter], remaining: u32, slots: &[&Terms], allow_empty: bool) -> Q {
    let (first, rest) = match slots.split_first() {
        None => return if remaining == 0 { Q::one() } else { Q::zero() },
        Some(x) => x,
    };
    if rest.is_empty() {
        if remaining == 0 && !allow_empty {
            return Q::zero();
        }
        return coeff_or_zero(first, &subword(w, remaining));
    }
    let mut acc = Q::zero();
    let mut sub = remaining;
    loop {
        if sub != 0 || allow_empty {
            if let Some(c) = first.get(&subword(w, sub)) {
                let tail = slot_sum(w, remaining & !sub, rest, allow_empty);
                if !tail.is_zero() {
                    acc += c * tail;
                }
            }
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & remaining;
    }
    acc
}

fn slot_components(eta: &Monomial, c: &NCSeries) -> Result<Vec<usize>> {
    if eta.0.len() != c.ell() {
        return Err(FpaError::ShapeMismatch(format!("monomial in {} variables for {} components", eta.0.len(), c.ell())));
    }
    Ok(eta.0.iter().enumerate().flat_map(|(i, &k)| std::iter::repeat_n(i, k as usize)).collect())
}

/// `χ_η̃(c)` at `w` for proper `c`: products over splittings of `w` into nonempty subwords.
pub fn chi_eval(eta: &Monomial, w: &Word, c: &NCSeries) -> Result<Q> {
    if !c.is_proper() {
        return Err(FpaError::Domain("χ needs a proper series".into()));
    }
    c.coeffs(w)?;
    let slots = slot_components(eta, c)?;
    if slots.is_empty() {
        return Ok(if w.is_empty() { Q::one() } else { Q::zero() });
    }
    let refs: Vec<&Terms> = slots.iter().map(|&i| c.terms(i)).collect();
    let full = if w.is_empty() { 0 } else { (1u32 << w.len()) - 1 };
    Ok(slot_sum(w.letters(), full, &refs, false))
}

/// `χ̂_η̃(c)` at `w` for `c` with every constant term nonzero, via the normalized series `c_i/(c_i,∅)`.
pub fn chi_hat_eval(eta: &Monomial, w: &Word, c: &NCSeries) -> Result<Q> {
    c.coeffs(w)?;
    let slots = slot_components(eta, c)?;
    let mut normalized = Vec::with_capacity(c.ell());
    let mut consts = Vec::with_capacity(c.ell());
    for i in 0..c.ell() {
        let r = c.constant(i);
        if r.is_zero() {
            return Err(FpaError::ZeroConstantTerm { component: i });
        }
        normalized.push(c.component(i).scale(&r.recip()).terms(0).clone());
        consts.push(r);
    }
    if slots.is_empty() {
        return Ok(if w.is_empty() { Q::one() } else { Q::zero() });
    }
    let scale = slots.iter().fold(Q::one(), |acc, &i| acc * &consts[i]);
    let refs: Vec<&Terms> = slots.iter().map(|&i| &normalized[i]).collect();
    let full = if w.is_empty() { 0 } else { (1u32 << w.len()) - 1 };
    Ok(scale * slot_sum(w.letters(), full, &refs, true))
}
