//! Vector fields on the big phase space, evaluated at small-slice points.
//!
//! A field is expanded as `Σ_{n,α} f_{n,α} τ_n(γ_α)`. Coefficients live in
//! [`Lin`]: a number plus a linear combination of two-point descendant
//! correlators `⟨⟨τ_n(γ_α) τ_m(γ_β)⟩⟩`, which genus-0 recursion cannot
//! express through primary data and which must cancel in any reducible
//! quantity.

mod reduce;

use std::collections::BTreeMap;
use std::fmt;

use crate::calculus::EvalPoint;
use crate::error::{Error, Result};
use crate::model::FrobeniusModel;
use crate::numeric::C64;

pub use reduce::{inner, reduce_correlator, Reducer, RewriteMode, DEFAULT_MAX_LEVEL};

/// Formal vector-field expression.
#[derive(Debug, Clone, PartialEq)]
pub enum VectorFieldExpr {
    /// Constant primary coefficients `Σ c^α γ_α`.
    Primary(Vec<C64>),
    /// `τ_n(γ_α)`.
    Basis { level: u32, index: usize },
    /// Idempotent `E_i` of the supplied frame.
    Idempotent(usize),
    S,
    X,
    L0,
    /// `τ_+` for `+1`, `τ_−` for `−1`.
    Tau(Box<VectorFieldExpr>, i8),
    T(Box<VectorFieldExpr>),
    Prod(Box<VectorFieldExpr>, Box<VectorFieldExpr>),
    Sum(Vec<VectorFieldExpr>),
    Scale(C64, Box<VectorFieldExpr>),
}

pub type Expr = VectorFieldExpr;

impl VectorFieldExpr {
    pub fn primary(c: Vec<C64>) -> Self {
        Self::Primary(c)
    }

    pub fn gamma(index: usize) -> Self {
        Self::Basis { level: 0, index }
    }

    pub fn tau_n(level: u32, index: usize) -> Self {
        Self::Basis { level, index }
    }

    pub fn idempotent(i: usize) -> Self {
        Self::Idempotent(i)
    }

    pub fn tau_plus(self) -> Self {
        Self::Tau(Box::new(self), 1)
    }

    pub fn tau_minus(self) -> Self {
        Self::Tau(Box::new(self), -1)
    }

    pub fn t(self) -> Self {
        Self::T(Box::new(self))
    }

    pub fn prod(self, other: Self) -> Self {
        Self::Prod(Box::new(self), Box::new(other))
    }

    pub fn scale(self, c: C64) -> Self {
        Self::Scale(c, Box::new(self))
    }

    pub fn add(self, other: Self) -> Self {
        Self::Sum(vec![self, other])
    }

    pub fn sub(self, other: Self) -> Self {
        Self::Sum(vec![self, other.scale(C64::new(-1.0, 0.0))])
    }
}

/// `W̄ = W∘S`.
pub fn bar(expr: Expr) -> Expr {
    expr.prod(Expr::S)
}

/// `T(W) = τ_+(W) − S∘τ_+(W)`.
pub fn t_op(expr: Expr) -> Expr {
    expr.t()
}

/// The dilaton field `D = T(S)`.
pub fn dilaton() -> Expr {
    Expr::S.t()
}

/// Unknown two-point descendant correlator, stored with sorted slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TwoPoint {
    pub first: (u32, usize),
    pub second: (u32, usize),
}

impl TwoPoint {
    pub fn new(a: (u32, usize), b: (u32, usize)) -> Self {
        let (first, second) = if a <= b { (a, b) } else { (b, a) };
        Self { first, second }
    }
}

impl fmt::Display for TwoPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "<<tau_{}(g{}) tau_{}(g{})>>",
            self.first.0,
            self.first.1 + 1,
            self.second.0,
            self.second.1 + 1
        )
    }
}

/// Coefficients of unknowns below this size are rounding debris of exact cancellations.
const UNKNOWN_EPS: f64 = 1e-11;

/// `constant + Σ coeff · unknown`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lin {
    pub constant: C64,
    pub unknowns: BTreeMap<TwoPoint, C64>,
}

impl Lin {
    pub fn constant(c: C64) -> Self {
        Self {
            constant: c,
            unknowns: BTreeMap::new(),
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn unknown(symbol: TwoPoint) -> Self {
        let mut unknowns = BTreeMap::new();
        unknowns.insert(symbol, C64::new(1.0, 0.0));
        Self {
            constant: C64::new(0.0, 0.0),
            unknowns,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.unknowns.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.constant == C64::new(0.0, 0.0) && self.unknowns.is_empty()
    }

    pub fn add_assign(&mut self, other: &Lin) {
        self.constant += other.constant;
        for (k, v) in &other.unknowns {
            *self.unknowns.entry(*k).or_insert(C64::new(0.0, 0.0)) += v;
        }
    }

    pub fn add_scaled(&mut self, other: &Lin, s: C64) {
        self.constant += s * other.constant;
        for (k, v) in &other.unknowns {
            *self.unknowns.entry(*k).or_insert(C64::new(0.0, 0.0)) += s * v;
        }
    }

    pub fn scaled(&self, s: C64) -> Lin {
        Lin {
            constant: self.constant * s,
            unknowns: self.unknowns.iter().map(|(k, v)| (*k, v * s)).collect(),
        }
    }

    pub fn mul(&self, other: &Lin) -> Result<Lin> {
        match (self.is_constant(), other.is_constant()) {
            (true, _) => Ok(other.scaled(self.constant)),
            (_, true) => Ok(self.scaled(other.constant)),
            _ => Err(Error::Irreducible(format!(
                "product of unknown correlators {} and {}",
                self.describe_unknowns(),
                other.describe_unknowns()
            ))),
        }
    }

    /// Drops unknowns whose coefficients cancelled up to rounding.
    pub fn pruned(&self) -> Lin {
        let scale = 1.0f64.max(self.constant.norm());
        Lin {
            constant: self.constant,
            unknowns: self
                .unknowns
                .iter()
                .filter(|(_, v)| v.norm() > UNKNOWN_EPS * scale)
                .map(|(k, v)| (*k, *v))
                .collect(),
        }
    }

    /// The numeric value; unknowns that survive pruning are an error.
    pub fn value(&self) -> Result<C64> {
        let p = self.pruned();
        if p.unknowns.is_empty() {
            Ok(p.constant)
        } else {
            Err(Error::Irreducible(format!(
                "result depends on {}",
                p.describe_unknowns()
            )))
        }
    }

    fn describe_unknowns(&self) -> String {
        self.unknowns
            .keys()
            .map(|k| k.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    }

    pub fn max_diff(&self, other: &Lin) -> f64 {
        let mut d = (self.constant - other.constant).norm();
        for (k, v) in &self.unknowns {
            let w = other.unknowns.get(k).copied().unwrap_or_default();
            d = d.max((v - w).norm());
        }
        for (k, w) in &other.unknowns {
            if !self.unknowns.contains_key(k) {
                d = d.max(w.norm());
            }
        }
        d
    }
}

/// `levels[n][α]` is the coefficient of `τ_n(γ_α)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Expansion {
    dim: usize,
    levels: Vec<Vec<Lin>>,
}

impl Expansion {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            levels: Vec::new(),
        }
    }

    pub fn primary(c: &[C64]) -> Self {
        Self {
            dim: c.len(),
            levels: vec![c.iter().map(|&z| Lin::constant(z)).collect()],
        }
    }

    pub fn from_primary_lins(level0: Vec<Lin>) -> Self {
        Self {
            dim: level0.len(),
            levels: vec![level0],
        }
    }

    pub fn basis(dim: usize, level: u32, index: usize) -> Self {
        let mut e = Self::zero(dim);
        e.ensure(level as usize);
        e.levels[level as usize][index] = Lin::constant(C64::new(1.0, 0.0));
        e
    }

    fn ensure(&mut self, level: usize) {
        while self.levels.len() <= level {
            self.levels.push(vec![Lin::zero(); self.dim]);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeff(&self, level: usize, index: usize) -> Lin {
        self.levels
            .get(level)
            .map(|l| l[index].clone())
            .unwrap_or_default()
    }

    /// Highest level carrying a non-negligible coefficient.
    pub fn top_level(&self) -> Option<usize> {
        (0..self.levels.len()).rev().find(|&n| {
            self.levels[n]
                .iter()
                .any(|c| !c.pruned().is_zero())
        })
    }

    pub fn is_zero(&self) -> bool {
        self.top_level().is_none()
    }

    /// Level-0 part as numbers.
    pub fn primary_part(&self) -> Result<Vec<C64>> {
        (0..self.dim).map(|a| self.coeff(0, a).value()).collect()
    }

    pub fn shift_up(&self) -> Expansion {
        let mut levels = vec![vec![Lin::zero(); self.dim]];
        levels.extend(self.levels.iter().cloned());
        Expansion {
            dim: self.dim,
            levels,
        }
    }

    pub fn shift_down(&self) -> Expansion {
        Expansion {
            dim: self.dim,
            levels: self.levels.iter().skip(1).cloned().collect(),
        }
    }

    pub fn add_scaled(&mut self, other: &Expansion, s: C64) {
        self.ensure(other.levels.len().saturating_sub(1));
        for (n, level) in other.levels.iter().enumerate() {
            for (a, c) in level.iter().enumerate() {
                self.levels[n][a].add_scaled(c, s);
            }
        }
    }

    pub fn scaled(&self, s: C64) -> Expansion {
        let mut out = Expansion::zero(self.dim);
        out.add_scaled(self, s);
        out
    }

    /// Nonzero `(level, index, coefficient)` triples.
    pub fn entries(&self) -> Vec<(u32, usize, Lin)> {
        let mut out = Vec::new();
        for (n, level) in self.levels.iter().enumerate() {
            for (a, c) in level.iter().enumerate() {
                if !c.is_zero() {
                    out.push((n as u32, a, c.clone()));
                }
            }
        }
        out
    }

    pub fn max_diff(&self, other: &Expansion) -> f64 {
        let depth = self.levels.len().max(other.levels.len());
        let mut d = 0.0f64;
        for n in 0..depth {
            for a in 0..self.dim {
                d = d.max(self.coeff(n, a).max_diff(&other.coeff(n, a)));
            }
        }
        d
    }
}

/// Coefficients `f_{n,α}(t) = constant + Σ_β linear[β] t^β` of an atom,
/// with the descendant times at their slice values (`t̃_1^1 = −1`).
#[derive(Debug, Clone, PartialEq)]
pub struct AffineField {
    /// `terms[n][α] = (constant, linear coefficients in t^1..t^N)`
    pub terms: Vec<Vec<(C64, Vec<C64>)>>,
}

impl AffineField {
    /// `S = −Σ t̃_m^α τ_{m−1}(γ_α)`; on the slice only `m = 1, α = 1` survives.
    pub fn string(model: &FrobeniusModel) -> Self {
        let n = model.dim();
        let zero = vec![C64::new(0.0, 0.0); n];
        let mut level0 = vec![(C64::new(0.0, 0.0), zero.clone()); n];
        level0[0].0 = C64::new(1.0, 0.0);
        Self {
            terms: vec![level0],
        }
    }

    /// `X = −Σ (m + b_α − b_1 − 1) t̃_m^α τ_m(γ_α) − Σ C_α^β t̃_m^α τ_{m−1}(γ_β)`.
    ///
    /// On the slice the level-1 coefficient `−(1 + b_1 − b_1 − 1)·(−1)` of
    /// `τ_1(γ_1)` vanishes, so only level 0 remains.
    pub fn euler(model: &FrobeniusModel) -> Self {
        let n = model.dim();
        let b = model.b_f64();
        let c1 = model.c_first_row();
        let level0 = (0..n)
            .map(|a| {
                let mut linear = vec![C64::new(0.0, 0.0); n];
                linear[a] = C64::new(-(b[a] - b[0] - 1.0), 0.0);
                (c1[a], linear)
            })
            .collect();
        let level1 = (0..n)
            .map(|a| {
                let shifted = if a == 0 { -1.0 } else { 0.0 };
                let coeff = -(1.0 + b[a] - b[0] - 1.0) * shifted;
                (C64::new(coeff, 0.0), vec![C64::new(0.0, 0.0); n])
            })
            .collect();
        Self {
            terms: vec![level0, level1],
        }
    }

    pub fn evaluate(&self, point: &EvalPoint) -> Expansion {
        let dim = point.dim();
        let mut out = Expansion::zero(dim);
        out.ensure(self.terms.len().saturating_sub(1));
        for (n, level) in self.terms.iter().enumerate() {
            for (a, (constant, linear)) in level.iter().enumerate() {
                let value = constant
                    + linear
                        .iter()
                        .zip(point.coords())
                        .map(|(l, t)| l * t)
                        .sum::<C64>();
                out.levels[n][a] = Lin::constant(value);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lin_products() {
        let u = Lin::unknown(TwoPoint::new((1, 0), (0, 1)));
        let c = Lin::constant(C64::new(2.0, 0.0));
        assert_eq!(u.mul(&c).unwrap().unknowns.values().next(), Some(&C64::new(2.0, 0.0)));
        assert!(matches!(u.mul(&u), Err(Error::Irreducible(_))));
        assert!(u.value().is_err());
        assert_eq!(c.value().unwrap(), C64::new(2.0, 0.0));
    }

    #[test]
    fn two_point_symbols_are_symmetric() {
        assert_eq!(TwoPoint::new((1, 2), (0, 1)), TwoPoint::new((0, 1), (1, 2)));
    }

    #[test]
    fn tau_shifts() {
        let e = Expansion::basis(2, 0, 1);
        assert_eq!(e.shift_up().shift_down(), e);
        assert!(e.shift_down().is_zero());
    }
}
