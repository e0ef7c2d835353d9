use std::cell::RefCell;
use std::collections::HashMap;

use itertools::Itertools;

use super::{AffineField, Expansion, Expr, Lin, TwoPoint};
use crate::calculus::{correlator_tensor, CorrelatorTensor, EvalPoint};
use crate::error::{Error, Result};
use crate::frame::CanonicalFrame;
use crate::model::FrobeniusModel;
use crate::numeric::C64;

pub const DEFAULT_MAX_LEVEL: u32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RewriteMode {
    /// T-headed and S-headed slots are rewritten before expanding.
    Rules,
    /// Everything is expanded and reduced by genus-0 recursion alone.
    ExpansionOnly,
}

type Slot = (u32, usize);

/// Correlator evaluation at one slice point.
pub struct Reducer<'a> {
    model: &'a FrobeniusModel,
    point: EvalPoint,
    frame: Option<&'a CanonicalFrame>,
    tensors: Vec<CorrelatorTensor>,
    max_level: u32,
    mode: RewriteMode,
    memo: RefCell<HashMap<Vec<Slot>, Lin>>,
}

impl<'a> Reducer<'a> {
    pub fn new(
        model: &'a FrobeniusModel,
        point: &EvalPoint,
        frame: Option<&'a CanonicalFrame>,
    ) -> Result<Self> {
        point.check_dim(model)?;
        let tensors = (2..=6)
            .map(|k| correlator_tensor(model, point, k))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            model,
            point: point.clone(),
            frame,
            tensors,
            max_level: DEFAULT_MAX_LEVEL,
            mode: RewriteMode::Rules,
            memo: RefCell::new(HashMap::new()),
        })
    }

    pub fn with_mode(mut self, mode: RewriteMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_max_level(mut self, max_level: u32) -> Self {
        self.max_level = max_level;
        self
    }

    pub fn mode(&self) -> RewriteMode {
        self.mode
    }

    fn dim(&self) -> usize {
        self.model.dim()
    }

    fn check_level(&self, e: &Expansion) -> Result<()> {
        match e.top_level() {
            Some(level) if level as u32 > self.max_level => Err(Error::Irreducible(format!(
                "descendant level {level} exceeds max_level {}",
                self.max_level
            ))),
            _ => Ok(()),
        }
    }

    /// Expansion in the `τ_n(γ_α)` basis at the point.
    pub fn expand(&self, expr: &Expr) -> Result<Expansion> {
        let n = self.dim();
        let out = match expr {
            Expr::Primary(c) => {
                if c.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: c.len(),
                    });
                }
                Expansion::primary(c)
            }
            Expr::Basis { level, index } => {
                if *index >= n {
                    return Err(Error::IndexOutOfRange { index: *index, dim: n });
                }
                Expansion::basis(n, *level, *index)
            }
            Expr::Idempotent(i) => {
                let frame = self.frame.ok_or(Error::MissingFrame)?;
                if *i >= n {
                    return Err(Error::IndexOutOfRange { index: *i, dim: n });
                }
                Expansion::primary(&frame.idempotent(*i))
            }
            Expr::S => AffineField::string(self.model).evaluate(&self.point),
            Expr::X => AffineField::euler(self.model).evaluate(&self.point),
            Expr::L0 => {
                let b1 = self.model.b_f64()[0];
                let l0 = Expr::X
                    .scale(C64::new(-1.0, 0.0))
                    .add(Expr::S.t().scale(C64::new(-(b1 + 1.0), 0.0)));
                self.expand(&l0)?
            }
            Expr::Tau(inner, shift) => {
                let e = self.expand(inner)?;
                if *shift > 0 {
                    e.shift_up()
                } else {
                    e.shift_down()
                }
            }
            Expr::T(inner) => {
                let raised = (**inner).clone().tau_plus();
                let mut e = self.expand(&raised)?;
                let correction = self.product(&Expr::S, &raised)?;
                e.add_scaled(&correction, C64::new(-1.0, 0.0));
                e
            }
            Expr::Prod(a, b) => self.product(a, b)?,
            Expr::Sum(parts) => {
                let mut acc = Expansion::zero(n);
                for p in parts {
                    acc.add_scaled(&self.expand(p)?, C64::new(1.0, 0.0));
                }
                acc
            }
            Expr::Scale(c, inner) => self.expand(inner)?.scaled(*c),
        };
        self.check_level(&out)?;
        Ok(out)
    }

    /// `(A∘B)^μ = ⟨⟨A B γ_ν⟩⟩ η^{νμ}`.
    pub fn product(&self, a: &Expr, b: &Expr) -> Result<Expansion> {
        let n = self.dim();
        let lowered = (0..n)
            .map(|nu| self.reduce(&[a.clone(), b.clone(), Expr::gamma(nu)]))
            .collect::<Result<Vec<_>>>()?;
        let mut level0 = vec![Lin::zero(); n];
        for (mu, slot) in level0.iter_mut().enumerate() {
            for (nu, low) in lowered.iter().enumerate() {
                let w = self.model.eta_inv()[(nu, mu)];
                if w != C64::new(0.0, 0.0) {
                    slot.add_scaled(low, w);
                }
            }
        }
        Ok(Expansion::from_primary_lins(level0))
    }

    /// Correlator with at least three slots; unknowns must cancel.
    pub fn correlator(&self, args: &[Expr]) -> Result<C64> {
        if args.len() < 3 {
            return Err(Error::TooFewInsertions {
                min: 3,
                got: args.len(),
            });
        }
        self.reduce(args)?.value()
    }

    /// Correlator as a linear form in the unknown two-point descendants.
    pub fn correlator_lin(&self, args: &[Expr]) -> Result<Lin> {
        if args.len() < 2 {
            return Err(Error::TooFewInsertions {
                min: 2,
                got: args.len(),
            });
        }
        self.reduce(args)
    }

    /// `⟨W, V⟩ = ⟨⟨S W V⟩⟩`.
    pub fn inner(&self, w: &Expr, v: &Expr) -> Result<C64> {
        self.correlator(&[Expr::S, w.clone(), v.clone()])
    }

    fn reduce(&self, args: &[Expr]) -> Result<Lin> {
        for (k, arg) in args.iter().enumerate() {
            match arg {
                Expr::Sum(parts) => {
                    let mut acc = Lin::zero();
                    for p in parts {
                        let mut a = args.to_vec();
                        a[k] = p.clone();
                        acc.add_assign(&self.reduce(&a)?);
                    }
                    return Ok(acc);
                }
                Expr::Scale(c, inner) => {
                    let mut a = args.to_vec();
                    a[k] = (**inner).clone();
                    return Ok(self.reduce(&a)?.scaled(*c));
                }
                _ => {}
            }
        }

        if self.mode == RewriteMode::Rules && args.len() >= 3 {
            if let Some(k) = args.iter().position(|a| matches!(a, Expr::T(_))) {
                let Expr::T(w) = &args[k] else { unreachable!() };
                match args.len() {
                    3 => return Ok(Lin::zero()),
                    4 => {
                        let partner = if k == 0 { 1 } else { 0 };
                        let mut next = vec![(**w).clone().prod(args[partner].clone())];
                        next.extend(
                            args.iter()
                                .enumerate()
                                .filter(|(idx, _)| *idx != k && *idx != partner)
                                .map(|(_, a)| a.clone()),
                        );
                        return self.reduce(&next);
                    }
                    _ => {}
                }
            }
            if let Some(k) = args.iter().position(|a| matches!(a, Expr::S)) {
                return self.string_rule(args, k);
            }
        }

        let expansions = args
            .iter()
            .map(|a| self.expand(a))
            .collect::<Result<Vec<_>>>()?;
        self.expanded(&expansions)
    }

    /// `⟨⟨S W_1…W_m⟩⟩ = Σ ⟨⟨…τ_−(W_i)…⟩⟩`, plus `η(W_1, W_2)` on level 0 when `m = 2`.
    fn string_rule(&self, args: &[Expr], k: usize) -> Result<Lin> {
        let others: Vec<Expr> = args
            .iter()
            .enumerate()
            .filter(|(idx, _)| *idx != k)
            .map(|(_, a)| a.clone())
            .collect();
        let mut acc = Lin::zero();
        for i in 0..others.len() {
            let mut a = others.clone();
            a[i] = a[i].clone().tau_minus();
            if self.expand(&a[i])?.is_zero() {
                continue;
            }
            acc.add_assign(&self.reduce(&a)?);
        }
        if others.len() == 2 {
            let w1 = self.expand(&others[0])?;
            let w2 = self.expand(&others[1])?;
            let eta = self.model.eta();
            for a in 0..self.dim() {
                for b in 0..self.dim() {
                    if eta[(a, b)] == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let term = w1.coeff(0, a).mul(&w2.coeff(0, b))?;
                    acc.add_scaled(&term, eta[(a, b)]);
                }
            }
        }
        Ok(acc)
    }

    fn expanded(&self, expansions: &[Expansion]) -> Result<Lin> {
        let entries: Vec<Vec<(u32, usize, Lin)>> = expansions
            .iter()
            .map(|e| {
                e.entries()
                    .into_iter()
                    .map(|(n, a, c)| (n, a, c.pruned()))
                    .filter(|(_, _, c)| !c.is_zero())
                    .collect()
            })
            .collect();
        if entries.iter().any(|e| e.is_empty()) {
            return Ok(Lin::zero());
        }
        let mut acc = Lin::zero();
        for combo in entries.iter().map(|e| e.iter()).multi_cartesian_product() {
            let slots: Vec<Slot> = combo.iter().map(|(n, a, _)| (*n, *a)).collect();
            let value = self.basis(&slots)?;
            if value.is_zero() {
                continue;
            }
            let mut coeff = Lin::constant(C64::new(1.0, 0.0));
            for (_, _, c) in &combo {
                coeff = coeff.mul(c)?;
            }
            acc.add_assign(&coeff.mul(&value)?);
        }
        Ok(acc)
    }

    /// `⟨⟨τ_{n_1}(γ_{a_1}) … τ_{n_k}(γ_{a_k})⟩⟩` by genus-0 recursion:
    /// `⟨⟨τ_{n+1}(γ_a) X Y Z⟩⟩ = Σ_{A ⊔ B = Z} ⟨⟨τ_n(γ_a) γ_μ Z_A⟩⟩ η^{μν} ⟨⟨γ_ν X Y Z_B⟩⟩`.
    fn basis(&self, slots: &[Slot]) -> Result<Lin> {
        let mut key = slots.to_vec();
        key.sort_unstable();
        if let Some(hit) = self.memo.borrow().get(&key) {
            return Ok(hit.clone());
        }
        let value = self.basis_uncached(&key)?;
        self.memo.borrow_mut().insert(key, value.clone());
        Ok(value)
    }

    fn basis_uncached(&self, slots: &[Slot]) -> Result<Lin> {
        let k = slots.len();
        if slots.iter().all(|s| s.0 == 0) {
            if !(2..=6).contains(&k) {
                return Err(Error::TensorOrder(k));
            }
            let idx: Vec<usize> = slots.iter().map(|s| s.1).collect();
            return Ok(Lin::constant(self.tensors[k - 2].get(&idx)));
        }
        if k == 2 {
            return Ok(Lin::unknown(TwoPoint::new(slots[0], slots[1])));
        }
        let d = slots.iter().position(|s| s.0 > 0).expect("descendant slot");
        let (level, a) = slots[d];
        let rest: Vec<Slot> = slots
            .iter()
            .enumerate()
            .filter(|(idx, _)| *idx != d)
            .map(|(_, s)| *s)
            .collect();
        let (x, y, z) = (rest[0], rest[1], &rest[2..]);
        let n = self.dim();
        let eta_inv = self.model.eta_inv();
        let mut acc = Lin::zero();
        for mask in 0..(1usize << z.len()) {
            let (za, zb): (Vec<Slot>, Vec<Slot>) = z
                .iter()
                .enumerate()
                .partition_map(|(bit, s)| {
                    if mask & (1 << bit) != 0 {
                        itertools::Either::Left(*s)
                    } else {
                        itertools::Either::Right(*s)
                    }
                });
            for mu in 0..n {
                let mut left_slots = vec![(level - 1, a), (0, mu)];
                left_slots.extend(&za);
                let left = self.basis(&left_slots)?;
                if left.is_zero() {
                    continue;
                }
                for nu in 0..n {
                    let w = eta_inv[(mu, nu)];
                    if w == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let mut right_slots = vec![(0, nu), x, y];
                    right_slots.extend(&zb);
                    let right = self.basis(&right_slots)?;
                    if right.is_zero() {
                        continue;
                    }
                    acc.add_scaled(&left.mul(&right)?, w);
                }
            }
        }
        Ok(acc)
    }
}

/// Reduces `⟨⟨W_1 … W_k⟩⟩` (`k ≥ 3`) to primary data at a slice point.
pub fn reduce_correlator(
    model: &FrobeniusModel,
    point: &EvalPoint,
    frame: Option<&CanonicalFrame>,
    args: &[Expr],
    max_level: u32,
) -> Result<C64> {
    Reducer::new(model, point, frame)?
        .with_max_level(max_level)
        .correlator(args)
}

/// `⟨W, V⟩ := ⟨⟨S W V⟩⟩`.
pub fn inner(
    model: &FrobeniusModel,
    point: &EvalPoint,
    frame: Option<&CanonicalFrame>,
    w: &Expr,
    v: &Expr,
) -> Result<C64> {
    Reducer::new(model, point, frame)?.inner(w, v)
}
