#![allow(dead_code)]

use std::collections::BTreeMap;

use fpa_core::word::enumerate_words_upto;
use fpa_core::{q, qr, CommSeries, Monomial, NCSeries, Word, Q};
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn small_q(rng: &mut ChaCha8Rng) -> Q {
    let mut n = 0;
    while n == 0 {
        n = rng.gen_range(-3..=3);
    }
    qr(n, rng.gen_range(1..=2))
}

/// Random series with roughly `density` of the words up to `n` present.
pub fn rand_nc(rng: &mut ChaCha8Rng, m: usize, ell: usize, n: usize, proper: bool, density: f64) -> NCSeries {
    let mut s = NCSeries::zero(m, ell, n);
    let words = enumerate_words_upto(m, n);
    for i in 0..ell {
        for w in &words {
            if w.is_empty() {
                if !proper {
                    s.set(w.clone(), i, small_q(rng)).unwrap();
                }
            } else if rng.gen_bool(density) {
                s.set(w.clone(), i, small_q(rng)).unwrap();
            }
        }
    }
    s
}

pub fn rand_comm(rng: &mut ChaCha8Rng, nvars: usize, ncomps: usize, n: usize, polynomial: bool, density: f64) -> CommSeries {
    let mut d = CommSeries::zero(nvars, ncomps, n, polynomial);
    for k in monomials_upto(nvars, n) {
        for i in 0..ncomps {
            if rng.gen_bool(density) {
                d.add_coeff(k.clone(), i, small_q(rng)).unwrap();
            }
        }
    }
    d
}

pub fn monomials_upto(nvars: usize, n: usize) -> Vec<Monomial> {
    let mut out = vec![Monomial(vec![0; nvars])];
    for _ in 0..n {
        let mut next = Vec::new();
        for k in &out {
            for i in 0..nvars {
                let mut e = k.0.clone();
                e[i] += 1;
                next.push(Monomial(e));
            }
        }
        out.extend(next);
    }
    out.sort();
    out.dedup();
    out
}

prop_compose! {
    pub fn arb_nc(m: usize, ell: usize, n: usize, proper: bool)(seed in any::<u64>(), density in 0.2f64..0.7) -> NCSeries {
        rand_nc(&mut rng(seed), m, ell, n, proper, density)
    }
}

prop_compose! {
    pub fn arb_comm(nvars: usize, ncomps: usize, n: usize, polynomial: bool)(seed in any::<u64>(), density in 0.2f64..0.8) -> CommSeries {
        rand_comm(&mut rng(seed), nvars, ncomps, n, polynomial, density)
    }
}

pub fn arb_q() -> impl Strategy<Value = Q> {
    (-5i64..=5, 1i64..=4).prop_map(|(a, b)| qr(a, b))
}

/// Sparse single-component coefficient map used by the oracles.
pub type Poly = BTreeMap<Vec<u8>, Q>;

pub fn poly_of(c: &NCSeries, comp: usize) -> Poly {
    c.terms(comp).iter().map(|(w, a)| (w.0.clone(), a.clone())).collect()
}

fn add_into(acc: &mut Poly, w: Vec<u8>, a: Q) {
    let e = acc.entry(w.clone()).or_insert_with(Q::zero);
    *e += a;
    if e.is_zero() {
        acc.remove(&w);
    }
}

/// Shuffle of two words by choosing which output positions come from `u`.
pub fn naive_shuffle_words(u: &[u8], v: &[u8]) -> Vec<Vec<u8>> {
    let n = u.len() + v.len();
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != u.len() {
            continue;
        }
        let (mut i, mut j) = (0, 0);
        let mut w = Vec::with_capacity(n);
        for p in 0..n {
            if mask & (1 << p) != 0 {
                w.push(u[i]);
                i += 1;
            } else {
                w.push(v[j]);
                j += 1;
            }
        }
        out.push(w);
    }
    out
}

pub fn naive_shuffle(a: &Poly, b: &Poly, n: usize) -> Poly {
    let mut acc = Poly::new();
    for (u, x) in a {
        for (v, y) in b {
            if u.len() + v.len() > n {
                continue;
            }
            for w in naive_shuffle_words(u, v) {
                add_into(&mut acc, w, x * y);
            }
        }
    }
    acc
}

fn unit() -> Poly {
    let mut p = Poly::new();
    p.insert(vec![], Q::one());
    p
}

fn left_quotient(c: &Poly, i: u8) -> Poly {
    c.iter().filter(|(w, _)| w.first() == Some(&i)).map(|(w, a)| (w[1..].to_vec(), a.clone())).collect()
}

fn prepend(p: &Poly, i: u8, n: usize) -> Poly {
    p.iter()
        .filter(|(w, _)| w.len() < n)
        .map(|(w, a)| {
            let mut v = vec![i];
            v.extend_from_slice(w);
            (v, a.clone())
        })
        .collect()
}

/// `c∘d` by the left-quotient recursion `c∘d = (c,∅) + Σ_i x0 (d_i ⧢ (x_i⁻¹c ∘ d))`, `d_0 = 1`.
pub fn oracle_composition(c: &Poly, m: usize, d: &[Poly], n: usize) -> Poly {
    let mut out = Poly::new();
    if let Some(a) = c.get(&vec![]) {
        out.insert(vec![], a.clone());
    }
    if n == 0 {
        return out;
    }
    for i in 0..=m {
        let q = left_quotient(c, i as u8);
        if q.is_empty() {
            continue;
        }
        let inner = oracle_composition(&q, m, d, n - 1);
        let di = if i == 0 { unit() } else { d[i - 1].clone() };
        for (w, a) in prepend(&naive_shuffle(&di, &inner, n - 1), 0, n) {
            add_into(&mut out, w, a);
        }
    }
    out
}

/// `c∘̃d_δ = (c,∅) + Σ_i [x_i (x_i⁻¹c ∘̃ d_δ) + x0 (d_i ⧢ (x_i⁻¹c ∘̃ d_δ))]`, `d_0 = 0`.
pub fn oracle_mixed(c: &Poly, m: usize, d: &[Poly], n: usize) -> Poly {
    let mut out = Poly::new();
    if let Some(a) = c.get(&vec![]) {
        out.insert(vec![], a.clone());
    }
    if n == 0 {
        return out;
    }
    for i in 0..=m {
        let q = left_quotient(c, i as u8);
        if q.is_empty() {
            continue;
        }
        let inner = oracle_mixed(&q, m, d, n - 1);
        for (w, a) in prepend(&inner, i as u8, n) {
            add_into(&mut out, w, a);
        }
        if i > 0 {
            for (w, a) in prepend(&naive_shuffle(&d[i - 1], &inner, n - 1), 0, n) {
                add_into(&mut out, w, a);
            }
        }
    }
    out
}

/// `Σ (d,η̃) c^{⧢η̃}` with naive shuffles.
pub fn oracle_wf(d: &CommSeries, comp: usize, c: &NCSeries, n: usize) -> Poly {
    let cs: Vec<Poly> = (0..c.ell()).map(|i| poly_of(c, i)).collect();
    let mut out = Poly::new();
    for (k, a) in d.terms(comp) {
        let mut p = unit();
        for (i, &e) in k.0.iter().enumerate() {
            for _ in 0..e {
                p = naive_shuffle(&p, &cs[i], n);
            }
        }
        for (w, b) in p {
            add_into(&mut out, w, a * b);
        }
    }
    out
}

pub fn to_series(m: usize, n: usize, comps: &[Poly]) -> NCSeries {
    let mut s = NCSeries::zero(m, comps.len(), n);
    for (i, p) in comps.iter().enumerate() {
        for (w, a) in p {
            if w.len() <= n {
                s.set(Word(w.clone()), i, a.clone()).unwrap();
            }
        }
    }
    s
}

pub fn factorial(k: usize) -> Q {
    (1..=k as i64).fold(q(1), |acc, i| acc * q(i))
}

/// The catenation star `Σ_{k≤n} x_i^k`.
pub fn star(m: usize, i: u8, n: usize) -> NCSeries {
    NCSeries::from_terms(m, n, (0..=n).map(|k| (Word(vec![i; k]), q(1)))).unwrap()
}

pub fn nc(m: usize, n: usize, terms: &[(&str, Q)]) -> NCSeries {
    NCSeries::from_terms(m, n, terms.iter().map(|(w, a)| (Word::parse(w).unwrap(), a.clone()))).unwrap()
}
