//! Truncated noncommutative and commutative formal power series with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{FpaError, Result};
use crate::word::{Letter, Word};

pub type Q = BigRational;

/// Sparse coefficients of one component. Zero coefficients are never stored.
pub type Terms = BTreeMap<Word, Q>;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // numerator or denominator beyond f64 range
        let n = x.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = x.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

pub fn parse_q(s: &str) -> Result<Q> {
    let bad = || FpaError::Parse { line: 0, column: 0, msg: format!("bad coefficient `{s}`") };
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => Ok(Q::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub(crate) fn add_term(t: &mut Terms, w: Word, c: Q) {
    if c.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match t.entry(w) {
        Entry::Vacant(e) => {
            e.insert(c);
        }
        Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

pub(crate) fn add_scaled(t: &mut Terms, other: &Terms, s: &Q, maxdeg: usize) {
    if s.is_zero() {
        return;
    }
    for (w, c) in other {
        if w.len() <= maxdeg {
            add_term(t, w.clone(), c * s);
        }
    }
}

pub(crate) fn truncate_terms(t: &Terms, maxdeg: usize) -> Terms {
    t.iter().filter(|(w, _)| w.len() <= maxdeg).map(|(w, c)| (w.clone(), c.clone())).collect()
}

/// An `ell`-component series over `{x0..xm}`, known exactly up to words of length `maxdeg`.
#[derive(Clone, PartialEq, Eq)]
pub struct NCSeries {
    m: usize,
    maxdeg: usize,
    comps: Vec<Terms>,
}

impl NCSeries {
    pub fn zero(m: usize, ell: usize, maxdeg: usize) -> Self {
        assert!(ell >= 1, "series needs at least one component");
        assert!(m < Letter::MAX as usize, "alphabet too large");
        NCSeries { m, maxdeg, comps: vec![Terms::new(); ell] }
    }

    /// Constant series with every component equal to `1`.
    pub fn one(m: usize, ell: usize, maxdeg: usize) -> Self {
        let mut s = Self::zero(m, ell, maxdeg);
        for t in &mut s.comps {
            t.insert(Word::empty(), Q::one());
        }
        s
    }

    /// Single-component series from `(word, coefficient)` pairs; repeated words accumulate.
    pub fn from_terms<I: IntoIterator<Item = (Word, Q)>>(m: usize, maxdeg: usize, terms: I) -> Result<Self> {
        let mut s = Self::zero(m, 1, maxdeg);
        for (w, c) in terms {
            s.check_word(&w)?;
            add_term(&mut s.comps[0], w, c);
        }
        Ok(s)
    }

    pub(crate) fn from_raw(m: usize, maxdeg: usize, comps: Vec<Terms>) -> Self {
        debug_assert!(comps.iter().all(|t| t.keys().all(|w| w.len() <= maxdeg)));
        NCSeries { m, maxdeg, comps }
    }

    /// Stacks single-component series into one vector series.
    pub fn from_components(parts: &[NCSeries]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| FpaError::ShapeMismatch("no components".into()))?;
        let maxdeg = parts.iter().map(|p| p.maxdeg).min().unwrap();
        let mut comps = Vec::new();
        for p in parts {
            if p.m != first.m {
                return Err(FpaError::ShapeMismatch("components over different alphabets".into()));
            }
            for t in &p.comps {
                comps.push(truncate_terms(t, maxdeg));
            }
        }
        Ok(NCSeries { m: first.m, maxdeg, comps })
    }

    /// Largest letter index: the alphabet is `{x0..xm}`.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn alphabet_size(&self) -> usize {
        self.m + 1
    }

    pub fn ell(&self) -> usize {
        self.comps.len()
    }

    pub fn maxdeg(&self) -> usize {
        self.maxdeg
    }

    pub fn terms(&self, comp: usize) -> &Terms {
        &self.comps[comp]
    }

    pub fn component(&self, i: usize) -> NCSeries {
        NCSeries { m: self.m, maxdeg: self.maxdeg, comps: vec![self.comps[i].clone()] }
    }

    pub fn components(&self) -> Vec<NCSeries> {
        (0..self.ell()).map(|i| self.component(i)).collect()
    }

    fn check_word(&self, w: &Word) -> Result<()> {
        if w.len() > self.maxdeg {
            return Err(FpaError::DegreeExceeded { len: w.len(), maxdeg: self.maxdeg });
        }
        if let Some(l) = w.max_letter() {
            if l as usize > self.m {
                return Err(FpaError::ShapeMismatch(format!("letter x{l} outside alphabet x0..x{}", self.m)));
            }
        }
        Ok(())
    }

    pub fn coeff(&self, w: &Word, comp: usize) -> Result<Q> {
        self.check_word(w)?;
        if comp >= self.ell() {
            return Err(FpaError::ShapeMismatch(format!("component {comp} of {}", self.ell())));
        }
        Ok(self.comps[comp].get(w).cloned().unwrap_or_else(Q::zero))
    }

    /// All components of the coefficient of `w`.
    pub fn coeffs(&self, w: &Word) -> Result<Vec<Q>> {
        self.check_word(w)?;
        Ok(self.comps.iter().map(|t| t.get(w).cloned().unwrap_or_else(Q::zero)).collect())
    }

    pub fn set(&mut self, w: Word, comp: usize, c: Q) -> Result<()> {
        self.check_word(&w)?;
        if c.is_zero() {
            self.comps[comp].remove(&w);
        } else {
            self.comps[comp].insert(w, c);
        }
        Ok(())
    }

    pub fn constant(&self, comp: usize) -> Q {
        self.comps[comp].get(&Word::empty()).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|t| t.is_empty())
    }

    /// Length of the shortest word in the support; `None` for the zero series.
    pub fn order(&self) -> Option<usize> {
        self.comps.iter().filter_map(|t| t.keys().next().map(|w| w.len())).min()
    }

    pub fn is_proper(&self) -> bool {
        self.comps.iter().all(|t| !t.contains_key(&Word::empty()))
    }

    pub fn is_polynomial_of_degree_below(&self, n: usize) -> bool {
        self.comps.iter().all(|t| t.keys().all(|w| w.len() < n))
    }

    /// Restriction to words of length `<= n` (never extends the known range).
    pub fn truncate(&self, n: usize) -> NCSeries {
        let n = n.min(self.maxdeg);
        NCSeries { m: self.m, maxdeg: n, comps: self.comps.iter().map(|t| truncate_terms(t, n)).collect() }
    }

    fn check_same_shape(&self, other: &NCSeries) -> Result<()> {
        if self.m != other.m || self.ell() != other.ell() {
            return Err(FpaError::ShapeMismatch(format!(
                "alphabet x0..x{} with {} components vs x0..x{} with {}",
                self.m,
                self.ell(),
                other.m,
                other.ell()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &NCSeries) -> Result<NCSeries> {
        self.check_same_shape(other)?;
        let maxdeg = self.maxdeg.min(other.maxdeg);
        let mut out = self.truncate(maxdeg);
        for (t, o) in out.comps.iter_mut().zip(&other.comps) {
            add_scaled(t, o, &Q::one(), maxdeg);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &NCSeries) -> Result<NCSeries> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> NCSeries {
        self.scale(&-Q::one())
    }

    pub fn scale(&self, s: &Q) -> NCSeries {
        let comps = if s.is_zero() {
            vec![Terms::new(); self.ell()]
        } else {
            self.comps.iter().map(|t| t.iter().map(|(w, c)| (w.clone(), c * s)).collect()).collect()
        };
        NCSeries { m: self.m, maxdeg: self.maxdeg, comps }
    }

    /// Terms supported on powers of `x0` only.
    pub fn natural_part(&self) -> NCSeries {
        let comps = self
            .comps
            .iter()
            .map(|t| t.iter().filter(|(w, _)| w.letters().iter().all(|&l| l == 0)).map(|(w, c)| (w.clone(), c.clone())).collect())
            .collect();
        NCSeries { m: self.m, maxdeg: self.maxdeg, comps }
    }

    /// The series with its constant terms removed.
    pub fn proper_part(&self) -> NCSeries {
        let mut out = self.clone();
        for t in &mut out.comps {
            t.remove(&Word::empty());
        }
        out
    }

    /// Same coefficients regarded over a larger alphabet.
    pub fn widen_alphabet(&self, m: usize) -> NCSeries {
        assert!(m >= self.m);
        NCSeries { m, maxdeg: self.maxdeg, comps: self.comps.clone() }
    }

    /// Union of the supports of all components.
    pub fn support(&self) -> std::collections::BTreeSet<Word> {
        self.comps.iter().flat_map(|t| t.keys().cloned()).collect()
    }

    /// Largest coefficient magnitude over words of each length, as `f64`.
    pub fn max_abs_by_length(&self) -> Vec<f64> {
        let mut out = vec![0.0f64; self.maxdeg + 1];
        for t in &self.comps {
            for (w, c) in t {
                let a = q_to_f64(&c.abs());
                if a > out[w.len()] {
                    out[w.len()] = a;
                }
            }
        }
        out
    }
}

/// `sigma^ord(c - d)`, and `0` when the truncations agree.
pub fn ultrametric(c: &NCSeries, d: &NCSeries, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(FpaError::Domain(format!("sigma = {sigma} must lie in (0, 1)")));
    }
    Ok(match c.sub(d)?.order() {
        None => 0.0,
        Some(k) => sigma.powi(k as i32),
    })
}

/// `sigma^ord(c)`.
pub fn ultrametric_norm(c: &NCSeries, sigma: f64) -> Result<f64> {
    ultrametric(c, &NCSeries::zero(c.m(), c.ell(), c.maxdeg()), sigma)
}

fn fmt_coeff_term(f: &mut fmt::Formatter<'_>, first: bool, c: &Q, body: &str) -> fmt::Result {
    let neg = c.is_negative();
    let a = c.abs();
    if first {
        if neg {
            write!(f, "-")?;
        }
    } else {
        write!(f, "{}", if neg { " - " } else { " + " })?;
    }
    if body.is_empty() {
        write!(f, "{a}")
    } else if a.is_one() {
        write!(f, "{body}")
    } else {
        write!(f, "{a}{body}")
    }
}

impl fmt::Display for NCSeries {
    /// Components as polynomials in length-lex order, e.g. `1 - x1 + 1/2x0x1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.comps.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            if t.is_empty() {
                write!(f, "0")?;
                continue;
            }
            for (k, (w, c)) in t.iter().enumerate() {
                let body = if w.is_empty() { String::new() } else { w.to_string() };
                fmt_coeff_term(f, k == 0, c, &body)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for NCSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NCSeries(m={}, N={}: {})", self.m, self.maxdeg, self)
    }
}

/// Exponent vector of a commutative monomial, ordered by total degree then lexicographically.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn degree(&self) -> usize {
        self.0.iter().map(|&k| k as usize).sum()
    }

    pub fn unit(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut v = vec![0; nvars];
        v[i] = 1;
        Monomial(v)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree().cmp(&other.degree()).then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|k| k.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

pub type CommTerms = BTreeMap<Monomial, Q>;

/// An `m`-component series in `nvars` commuting variables, known up to total degree `maxdeg`.
///
/// When `polynomial` is set the coefficients above `maxdeg` are known to vanish.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CommSeries {
    nvars: usize,
    maxdeg: usize,
    polynomial: bool,
    comps: Vec<CommTerms>,
}

impl CommSeries {
    pub fn zero(nvars: usize, ncomps: usize, maxdeg: usize, polynomial: bool) -> Self {
        assert!(nvars >= 1 && ncomps >= 1);
        CommSeries { nvars, maxdeg, polynomial, comps: vec![CommTerms::new(); ncomps] }
    }

    /// Polynomial with the given terms; `maxdeg` is the largest degree present.
    pub fn polynomial<I: IntoIterator<Item = (Monomial, Vec<Q>)>>(nvars: usize, ncomps: usize, terms: I) -> Result<Self> {
        let terms: Vec<_> = terms.into_iter().collect();
        let maxdeg = terms.iter().map(|(k, _)| k.degree()).max().unwrap_or(0);
        let mut s = Self::zero(nvars, ncomps, maxdeg, true);
        for (k, cs) in terms {
            for (i, c) in cs.into_iter().enumerate() {
                s.add_coeff(k.clone(), i, c)?;
            }
        }
        Ok(s)
    }

    /// Single-component polynomial in one variable from `(exponent, coefficient)` pairs.
    pub fn univariate(terms: &[(u32, Q)]) -> Self {
        Self::polynomial(1, 1, terms.iter().map(|(k, c)| (Monomial(vec![*k]), vec![c.clone()]))).unwrap()
    }

    /// Identity map `w -> w` on `n` variables.
    pub fn identity(n: usize) -> Self {
        let mut s = Self::zero(n, n, 1, true);
        for i in 0..n {
            s.comps[i].insert(Monomial::var(n, i), Q::one());
        }
        s
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn ncomps(&self) -> usize {
        self.comps.len()
    }

    pub fn maxdeg(&self) -> usize {
        self.maxdeg
    }

    pub fn is_polynomial(&self) -> bool {
        self.polynomial
    }

    pub fn set_polynomial(&mut self, p: bool) {
        self.polynomial = p;
    }

    pub fn terms(&self, comp: usize) -> &CommTerms {
        &self.comps[comp]
    }

    fn check(&self, k: &Monomial, comp: usize) -> Result<()> {
        if k.0.len() != self.nvars {
            return Err(FpaError::ShapeMismatch(format!("exponent vector of length {} for {} variables", k.0.len(), self.nvars)));
        }
        if comp >= self.ncomps() {
            return Err(FpaError::ShapeMismatch(format!("component {comp} of {}", self.ncomps())));
        }
        if k.degree() > self.maxdeg && !self.polynomial {
            return Err(FpaError::DegreeExceeded { len: k.degree(), maxdeg: self.maxdeg });
        }
        Ok(())
    }

    pub fn coeff(&self, k: &Monomial, comp: usize) -> Result<Q> {
        self.check(k, comp)?;
        Ok(self.comps[comp].get(k).cloned().unwrap_or_else(Q::zero))
    }

    pub fn add_coeff(&mut self, k: Monomial, comp: usize, c: Q) -> Result<()> {
        if k.degree() > self.maxdeg {
            if self.polynomial {
                self.maxdeg = k.degree();
            } else {
                return Err(FpaError::DegreeExceeded { len: k.degree(), maxdeg: self.maxdeg });
            }
        }
        self.check(&k, comp)?;
        let t = &mut self.comps[comp];
        let e = t.entry(k.clone()).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            t.remove(&k);
        }
        Ok(())
    }

    pub fn add(&self, other: &CommSeries) -> Result<CommSeries> {
        if self.nvars != other.nvars || self.ncomps() != other.ncomps() {
            return Err(FpaError::ShapeMismatch("commutative series of different shapes".into()));
        }
        let polynomial = self.polynomial && other.polynomial;
        let maxdeg = match (self.polynomial, other.polynomial) {
            (true, true) => self.maxdeg.max(other.maxdeg),
            (true, false) => other.maxdeg,
            (false, true) => self.maxdeg,
            (false, false) => self.maxdeg.min(other.maxdeg),
        };
        let mut out = CommSeries::zero(self.nvars, self.ncomps(), maxdeg, polynomial);
        for s in [self, other] {
            for (i, t) in s.comps.iter().enumerate() {
                for (k, c) in t {
                    if k.degree() <= maxdeg {
                        out.add_coeff(k.clone(), i, c.clone())?;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: &Q) -> CommSeries {
        let mut out = self.clone();
        for t in &mut out.comps {
            *t = t.iter().filter(|_| !s.is_zero()).map(|(k, c)| (k.clone(), c * s)).collect();
        }
        out
    }

    pub fn neg(&self) -> CommSeries {
        self.scale(&-Q::one())
    }

    /// Monomials appearing in any component.
    pub fn support(&self) -> std::collections::BTreeSet<Monomial> {
        self.comps.iter().flat_map(|t| t.keys().cloned()).collect()
    }

    pub fn max_abs_by_degree(&self) -> Vec<f64> {
        let mut out = vec![0.0f64; self.maxdeg + 1];
        for t in &self.comps {
            for (k, c) in t {
                let a = q_to_f64(&c.abs());
                let d = k.degree();
                if d < out.len() && a > out[d] {
                    out[d] = a;
                }
            }
        }
        out
    }
}

impl fmt::Display for CommSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.comps.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            if t.is_empty() {
                write!(f, "0")?;
                continue;
            }
            for (n, (k, c)) in t.iter().enumerate() {
                let mut body = String::new();
                for (v, &e) in k.0.iter().enumerate() {
                    match e {
                        0 => {}
                        1 => body.push_str(&format!("w{}", v + 1)),
                        _ => body.push_str(&format!("w{}^{}", v + 1, e)),
                    }
                }
                fmt_coeff_term(f, n == 0, c, &body)?;
            }
        }
        Ok(())
    }
}
