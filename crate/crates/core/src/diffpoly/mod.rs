//! Differential polynomials in the jets of ψ, φ and their conjugates.
//!
//! A [`DiffPoly`] is a finite sum of [`Monomial`]s with exact
//! [`GaussianRational`] coefficients. Values are always canonical: like terms
//! are combined, zero terms dropped, and terms sorted by total degree and then
//! lexicographically on their factor lists. Structural equality is therefore
//! semantic equality.

mod antidx;
mod matrix;
mod render;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::rational::GaussianRational;

pub use matrix::{LambdaMatrixPoly, MatrixDP};
pub use render::{Format, JsonSchemaError};

/// The four field symbols. Declaration order is the canonical order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Psi,
    Phi,
    PsiBar,
    PhiBar,
}

impl Symbol {
    pub const ALL: [Symbol; 4] = [Symbol::Psi, Symbol::Phi, Symbol::PsiBar, Symbol::PhiBar];

    pub fn name(self) -> &'static str {
        match self {
            Symbol::Psi => "psi",
            Symbol::Phi => "phi",
            Symbol::PsiBar => "psibar",
            Symbol::PhiBar => "phibar",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Symbol::ALL.into_iter().find(|sym| sym.name() == s)
    }

    pub fn is_conjugate(self) -> bool {
        matches!(self, Symbol::PsiBar | Symbol::PhiBar)
    }
}

/// A symbol together with its number of x-derivatives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Jet {
    pub symbol: Symbol,
    pub order: u32,
}

impl Jet {
    pub const fn new(symbol: Symbol, order: u32) -> Self {
        Self { symbol, order }
    }

    pub fn dx(self) -> Self {
        Self::new(self.symbol, self.order + 1)
    }
}

impl fmt::Display for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol.name())?;
        if self.order > 0 {
            write!(f, "_{}", "x".repeat(self.order as usize))?;
        }
        Ok(())
    }
}

/// Sorted `(jet, exponent)` list, compared by total degree first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Factors(Vec<(Jet, u32)>);

impl Factors {
    pub fn one() -> Self {
        Self(Vec::new())
    }

    /// Builds a canonical factor list from arbitrary `(jet, exponent)` pairs.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Jet, u32)>) -> Self {
        let mut map: BTreeMap<Jet, u32> = BTreeMap::new();
        for (j, e) in pairs {
            if e > 0 {
                *map.entry(j).or_insert(0) += e;
            }
        }
        Self(map.into_iter().collect())
    }

    pub fn as_slice(&self) -> &[(Jet, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, jet: Jet) -> u32 {
        self.0
            .binary_search_by(|(j, _)| j.cmp(&jet))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn max_order(&self) -> Option<u32> {
        self.0.iter().map(|(j, _)| j.order).max()
    }

    fn mul(&self, other: &Factors) -> Factors {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut k) = (0, 0);
        while i < self.0.len() && k < other.0.len() {
            match self.0[i].0.cmp(&other.0[k].0) {
                Ordering::Less => {
                    out.push(self.0[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[k]);
                    k += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0, self.0[i].1 + other.0[k].1));
                    i += 1;
                    k += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[k..]);
        Factors(out)
    }

    /// Divides out one power of `jet`; `None` if absent.
    fn remove_one(&self, jet: Jet) -> Option<Factors> {
        let idx = self.0.iter().position(|(j, _)| *j == jet)?;
        let mut v = self.0.clone();
        if v[idx].1 == 1 {
            v.remove(idx);
        } else {
            v[idx].1 -= 1;
        }
        Some(Factors(v))
    }

    fn with_one(&self, jet: Jet) -> Factors {
        self.mul(&Factors(vec![(jet, 1)]))
    }
}

impl Ord for Factors {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Factors {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A nonzero coefficient times a product of jets.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub coeff: GaussianRational,
    pub factors: Factors,
}

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.factors.degree()
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum DiffPolyError {
    #[error("not a total x-derivative; irreducible remainder: {remainder}")]
    NotExact { remainder: DiffPoly },
    #[error("reduction expects psi/phi jets only, found {0}")]
    ConjugateJetInInput(Jet),
    #[error("no value supplied for jet {0}")]
    MissingJet(Jet),
}

/// Canonical differential polynomial.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct DiffPoly {
    terms: Vec<Monomial>,
}

impl DiffPoly {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn constant(c: GaussianRational) -> Self {
        Self::from_terms([(c, Factors::one())])
    }

    pub fn one() -> Self {
        Self::constant(GaussianRational::one())
    }

    pub fn jet(symbol: Symbol, order: u32) -> Self {
        Self::from_terms([(GaussianRational::one(), Factors(vec![(Jet::new(symbol, order), 1)]))])
    }

    pub fn psi(order: u32) -> Self {
        Self::jet(Symbol::Psi, order)
    }

    pub fn phi(order: u32) -> Self {
        Self::jet(Symbol::Phi, order)
    }

    pub fn psibar(order: u32) -> Self {
        Self::jet(Symbol::PsiBar, order)
    }

    pub fn phibar(order: u32) -> Self {
        Self::jet(Symbol::PhiBar, order)
    }

    /// Canonicalizing constructor: combines like terms and drops zeros.
    pub fn from_terms(terms: impl IntoIterator<Item = (GaussianRational, Factors)>) -> Self {
        let mut acc: BTreeMap<Factors, GaussianRational> = BTreeMap::new();
        for (c, f) in terms {
            accumulate(&mut acc, f, &c);
        }
        Self::from_map(acc)
    }

    fn from_map(acc: BTreeMap<Factors, GaussianRational>) -> Self {
        let terms = acc
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(factors, coeff)| Monomial { coeff, factors })
            .collect();
        Self { terms }
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_order(&self) -> Option<u32> {
        self.terms.iter().filter_map(|m| m.factors.max_order()).max()
    }

    pub fn jets(&self) -> BTreeSet<Jet> {
        self.terms
            .iter()
            .flat_map(|m| m.factors.0.iter().map(|(j, _)| *j))
            .collect()
    }

    /// The degree-0 part.
    pub fn constant_term(&self) -> GaussianRational {
        self.terms
            .iter()
            .find(|m| m.factors.0.is_empty())
            .map(|m| m.coeff.clone())
            .unwrap_or_else(GaussianRational::zero)
    }

    /// Terms of the given total degree.
    pub fn homogeneous_part(&self, degree: u32) -> DiffPoly {
        Self {
            terms: self.terms.iter().filter(|m| m.degree() == degree).cloned().collect(),
        }
    }

    pub fn coefficients_real(&self) -> bool {
        self.terms.iter().all(|m| m.coeff.is_real())
    }

    pub fn scale(&self, c: &GaussianRational) -> DiffPoly {
        if c.is_zero() {
            return DiffPoly::zero();
        }
        Self {
            terms: self
                .terms
                .iter()
                .map(|m| Monomial {
                    coeff: &m.coeff * c,
                    factors: m.factors.clone(),
                })
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> DiffPoly {
        (0..e).fold(DiffPoly::one(), |acc, _| &acc * self)
    }

    /// Total x-derivative (Leibniz rule, jet (s, n) ↦ (s, n+1)).
    pub fn dx(&self) -> DiffPoly {
        let mut acc = BTreeMap::new();
        for m in &self.terms {
            for &(jet, e) in &m.factors.0 {
                let rest = m.factors.remove_one(jet).expect("factor present");
                let f = rest.with_one(jet.dx());
                let c = &m.coeff * &GaussianRational::integer(e as i64);
                accumulate(&mut acc, f, &c);
            }
        }
        Self::from_map(acc)
    }

    pub fn dx_n(&self, n: u32) -> DiffPoly {
        (0..n).fold(self.clone(), |p, _| p.dx())
    }

    /// Partial derivative with respect to a single jet variable.
    pub fn partial(&self, jet: Jet) -> DiffPoly {
        let mut acc = BTreeMap::new();
        for m in &self.terms {
            let e = m.factors.exponent(jet);
            if e == 0 {
                continue;
            }
            let f = m.factors.remove_one(jet).expect("factor present");
            accumulate(&mut acc, f, &(&m.coeff * &GaussianRational::integer(e as i64)));
        }
        Self::from_map(acc)
    }

    /// Euler operator (variational derivative) with respect to `symbol`:
    /// `Σ_n (−D)^n ∂p/∂(symbol, n)`.
    pub fn euler(&self, symbol: Symbol) -> DiffPoly {
        let max = self.max_order().unwrap_or(0);
        let mut out = DiffPoly::zero();
        for n in 0..=max {
            let mut term = self.partial(Jet::new(symbol, n));
            if term.is_zero() {
                continue;
            }
            term = term.dx_n(n);
            if n % 2 == 1 {
                term = -term;
            }
            out = &out + &term;
        }
        out
    }

    /// Anti-derivative in x with zero integration constant.
    pub fn antidx(&self) -> Result<DiffPoly, DiffPolyError> {
        antidx::antidx(self)
    }

    /// Applies φ = −ψ̄: every jet (phi, n) becomes −(psibar, n).
    pub fn reduce(&self) -> Result<DiffPoly, DiffPolyError> {
        let mut acc = BTreeMap::new();
        for m in &self.terms {
            let mut sign_flip = false;
            let mut pairs = Vec::with_capacity(m.factors.0.len());
            for &(jet, e) in &m.factors.0 {
                match jet.symbol {
                    Symbol::PsiBar | Symbol::PhiBar => {
                        return Err(DiffPolyError::ConjugateJetInInput(jet));
                    }
                    Symbol::Phi => {
                        if e % 2 == 1 {
                            sign_flip = !sign_flip;
                        }
                        pairs.push((Jet::new(Symbol::PsiBar, jet.order), e));
                    }
                    Symbol::Psi => pairs.push((jet, e)),
                }
            }
            let c = if sign_flip { -&m.coeff } else { m.coeff.clone() };
            accumulate(&mut acc, Factors::from_pairs(pairs), &c);
        }
        Ok(Self::from_map(acc))
    }

    /// Substitutes complex values for every jet and sums.
    pub fn eval(&self, jets: &HashMap<Jet, Complex64>) -> Result<Complex64, DiffPolyError> {
        let mut total = Complex64::new(0.0, 0.0);
        for m in &self.terms {
            let mut v = m.coeff.to_complex64();
            for &(jet, e) in &m.factors.0 {
                let x = jets.get(&jet).ok_or(DiffPolyError::MissingJet(jet))?;
                v *= x.powu(e);
            }
            total += v;
        }
        Ok(total)
    }

    /// Replaces jets by arbitrary polynomials, then re-canonicalizes.
    pub fn substitute(&self, f: &mut impl FnMut(Jet) -> DiffPoly) -> DiffPoly {
        let mut cache: HashMap<Jet, DiffPoly> = HashMap::new();
        let mut out = DiffPoly::zero();
        for m in &self.terms {
            let mut t = DiffPoly::constant(m.coeff.clone());
            for &(jet, e) in &m.factors.0 {
                let base = cache.entry(jet).or_insert_with(|| f(jet)).clone();
                t = &t * &base.pow(e);
            }
            out = &out + &t;
        }
        out
    }

    pub fn render(&self, format: Format) -> String {
        render::render(self, format)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        render::to_json_value(self)
    }

    pub fn from_json_str(s: &str) -> Result<DiffPoly, JsonSchemaError> {
        render::from_json_str(s)
    }
}

fn accumulate(acc: &mut BTreeMap<Factors, GaussianRational>, f: Factors, c: &GaussianRational) {
    if c.is_zero() {
        return;
    }
    match acc.get_mut(&f) {
        Some(v) => *v = &*v + c,
        None => {
            acc.insert(f, c.clone());
        }
    }
}

impl fmt::Display for DiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(Format::Text))
    }
}

impl fmt::Debug for DiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiffPoly({})", self.render(Format::Text))
    }
}

impl Add for &DiffPoly {
    type Output = DiffPoly;
    fn add(self, rhs: &DiffPoly) -> DiffPoly {
        let mut acc: BTreeMap<Factors, GaussianRational> = BTreeMap::new();
        for m in self.terms.iter().chain(rhs.terms.iter()) {
            accumulate(&mut acc, m.factors.clone(), &m.coeff);
        }
        DiffPoly::from_map(acc)
    }
}

impl Sub for &DiffPoly {
    type Output = DiffPoly;
    fn sub(self, rhs: &DiffPoly) -> DiffPoly {
        self + &(-rhs)
    }
}

impl Neg for &DiffPoly {
    type Output = DiffPoly;
    fn neg(self) -> DiffPoly {
        DiffPoly {
            terms: self
                .terms
                .iter()
                .map(|m| Monomial {
                    coeff: -&m.coeff,
                    factors: m.factors.clone(),
                })
                .collect(),
        }
    }
}

impl Mul for &DiffPoly {
    type Output = DiffPoly;
    fn mul(self, rhs: &DiffPoly) -> DiffPoly {
        let mut acc = BTreeMap::new();
        for a in &self.terms {
            for b in &rhs.terms {
                accumulate(&mut acc, a.factors.mul(&b.factors), &(&a.coeff * &b.coeff));
            }
        }
        DiffPoly::from_map(acc)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for DiffPoly {
            type Output = DiffPoly;
            fn $m(self, rhs: DiffPoly) -> DiffPoly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&DiffPoly> for DiffPoly {
            type Output = DiffPoly;
            fn $m(self, rhs: &DiffPoly) -> DiffPoly {
                (&self).$m(rhs)
            }
        }
        impl $tr<DiffPoly> for &DiffPoly {
            type Output = DiffPoly;
            fn $m(self, rhs: DiffPoly) -> DiffPoly {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for DiffPoly {
    type Output = DiffPoly;
    fn neg(self) -> DiffPoly {
        -&self
    }
}

impl Mul<&GaussianRational> for &DiffPoly {
    type Output = DiffPoly;
    fn mul(self, rhs: &GaussianRational) -> DiffPoly {
        self.scale(rhs)
    }
}

impl Mul<GaussianRational> for DiffPoly {
    type Output = DiffPoly;
    fn mul(self, rhs: GaussianRational) -> DiffPoly {
        self.scale(&rhs)
    }
}

impl From<GaussianRational> for DiffPoly {
    fn from(c: GaussianRational) -> Self {
        DiffPoly::constant(c)
    }
}

/// Shorthand for an integer constant.
pub fn int(n: i64) -> DiffPoly {
    DiffPoly::constant(GaussianRational::integer(n))
}

/// Shorthand for `n·i`.
pub fn imag(n: i64) -> DiffPoly {
    DiffPoly::constant(GaussianRational::imag(n))
}
