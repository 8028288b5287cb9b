//! Square classes, diagonal quadratic forms, and Pfister forms over iterated
//! Laurent series towers K = Q((t1))...((tm)).
//!
//! Every nonzero element of K^×/K^{×2} has a unique normal form
//! c·t1^{e1}·...·tm^{em} with c a squarefree integer and each exponent 0 or 1;
//! [`SquareClass`] stores exactly that. A [`DiagonalForm`] is a finite
//! sequence of square classes attached to a tower. Form equality is multiset
//! equality of normalized entries — it is deliberately *not* isometry, which
//! lives in the decider modules.

use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::scalars::{squarefree_part, Rational, SquarefreeInt};

/// The base field Q together with an ordered list of Laurent variables.
/// The order is semantically meaningful: K_i = K_{i-1}((t_i)).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TowerField {
    vars: Vec<String>,
}

/// Hard cap on tower depth so exponent vectors fit in one machine word.
pub const MAX_TOWER_LEVEL: usize = 64;

impl TowerField {
    /// The level-0 tower: plain Q.
    pub fn rationals() -> Self {
        TowerField { vars: Vec::new() }
    }

    /// Builds a tower from ordered, distinct variable names.
    pub fn new<S: Into<String>>(vars: impl IntoIterator<Item = S>) -> Result<Self> {
        let vars: Vec<String> = vars.into_iter().map(Into::into).collect();
        if vars.len() > MAX_TOWER_LEVEL {
            return Err(Error::Precondition(format!(
                "tower level {} exceeds the supported maximum {MAX_TOWER_LEVEL}",
                vars.len()
            )));
        }
        for (i, v) in vars.iter().enumerate() {
            if v.is_empty()
                || v.chars().next().unwrap().is_ascii_digit()
                || !v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
            {
                return Err(Error::Precondition(format!("bad variable name {v:?}")));
            }
            if vars[..i].contains(v) {
                return Err(Error::VariableCollision(v.clone()));
            }
        }
        Ok(TowerField { vars })
    }

    pub fn level(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// The tower extended by fresh variables (appended in order).
    pub fn extended<S: Into<String>>(&self, fresh: impl IntoIterator<Item = S>) -> Result<Self> {
        let mut vars = self.vars.clone();
        for v in fresh {
            let v = v.into();
            if vars.contains(&v) {
                return Err(Error::VariableCollision(v));
            }
            vars.push(v);
        }
        TowerField::new(vars)
    }

    /// True iff `self`'s variables are an initial segment of `other`'s.
    pub fn is_prefix_of(&self, other: &TowerField) -> bool {
        other.vars.len() >= self.vars.len() && other.vars[..self.vars.len()] == self.vars[..]
    }

    fn mismatch(&self, other: &TowerField) -> Error {
        Error::TowerMismatch {
            left: self.to_string(),
            right: other.to_string(),
        }
    }

    /// Errors unless both towers are identical.
    pub fn require_same(&self, other: &TowerField) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(self.mismatch(other))
        }
    }
}

impl fmt::Display for TowerField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q")?;
        for v in &self.vars {
            write!(f, "(({v}))")?;
        }
        Ok(())
    }
}

/// Exponent vector in {0,1}^m, one bit per tower variable. Packed into a
/// word; `len` keeps vectors over different levels from comparing equal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exponents {
    len: u8,
    bits: u64,
}

impl Exponents {
    pub fn zero(len: usize) -> Self {
        assert!(len <= MAX_TOWER_LEVEL);
        Exponents {
            len: len as u8,
            bits: 0,
        }
    }

    /// The vector with a single 1 at position `index`.
    pub fn var(len: usize, index: usize) -> Result<Self> {
        if index >= len {
            return Err(Error::IndexOutOfRange { index, level: len });
        }
        Ok(Exponents {
            len: len as u8,
            bits: 1 << index,
        })
    }

    pub fn from_bits(len: usize, bits: u64) -> Self {
        assert!(len <= MAX_TOWER_LEVEL);
        debug_assert!(len == 64 || bits < (1u64 << len));
        Exponents {
            len: len as u8,
            bits,
        }
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn bit(&self, index: usize) -> bool {
        index < self.len() && (self.bits >> index) & 1 == 1
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// Componentwise addition mod 2. Callers must have checked the levels.
    pub(crate) fn xor(&self, other: &Exponents) -> Exponents {
        debug_assert_eq!(self.len, other.len);
        Exponents {
            len: self.len,
            bits: self.bits ^ other.bits,
        }
    }

    /// Drops position `index`, shifting higher positions down.
    pub(crate) fn remove(&self, index: usize) -> Exponents {
        debug_assert!(index < self.len());
        let low = self.bits & ((1u64 << index) - 1);
        let high = if index + 1 < 64 {
            (self.bits >> (index + 1)) << index
        } else {
            0
        };
        Exponents {
            len: self.len - 1,
            bits: low | high,
        }
    }

    /// Reinterprets over a deeper tower; the new trailing bits are 0.
    pub(crate) fn widen(&self, len: usize) -> Exponents {
        debug_assert!(len >= self.len());
        Exponents {
            len: len as u8,
            bits: self.bits,
        }
    }

    pub fn set_positions(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| self.bit(i))
    }
}

/// An element of K^×/K^{×2} in normal form: squarefree integer coefficient
/// times a multilinear monomial in the tower variables.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SquareClass {
    exponents: Exponents,
    coeff: SquarefreeInt,
}

impl SquareClass {
    pub fn new(coeff: SquarefreeInt, exponents: Exponents) -> Self {
        SquareClass { coeff, exponents }
    }

    /// The identity class 1 at a given tower level.
    pub fn one(level: usize) -> Self {
        SquareClass {
            coeff: SquarefreeInt::one(),
            exponents: Exponents::zero(level),
        }
    }

    /// The class of the variable t_index.
    pub fn var(level: usize, index: usize) -> Result<Self> {
        Ok(SquareClass {
            coeff: SquarefreeInt::one(),
            exponents: Exponents::var(level, index)?,
        })
    }

    /// Normalizes a nonzero rational constant into its square class.
    pub fn from_rational(x: &Rational, level: usize) -> Result<Self> {
        Ok(SquareClass {
            coeff: squarefree_part(x)?,
            exponents: Exponents::zero(level),
        })
    }

    pub fn from_int(x: i64, level: usize) -> Result<Self> {
        Self::from_rational(&Rational::from(BigInt::from(x)), level)
    }

    pub fn coeff(&self) -> &SquarefreeInt {
        &self.coeff
    }

    pub fn exponents(&self) -> Exponents {
        self.exponents
    }

    pub fn level(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_one(&self) -> bool {
        self.coeff.is_one() && self.exponents.is_zero()
    }

    /// True iff the monomial part is trivial (a constant class).
    pub fn is_constant(&self) -> bool {
        self.exponents.is_zero()
    }

    pub fn negated(&self) -> Self {
        SquareClass {
            coeff: self.coeff.negated(),
            exponents: self.exponents,
        }
    }

    /// Group law on K^×/K^{×2}: squarefree part of the coefficient product,
    /// exponents added mod 2.
    pub fn mul(&self, other: &SquareClass) -> Result<SquareClass> {
        if self.level() != other.level() {
            return Err(Error::TowerMismatch {
                left: format!("level {}", self.level()),
                right: format!("level {}", other.level()),
            });
        }
        Ok(SquareClass {
            coeff: self.coeff.mul(&other.coeff)?,
            exponents: self.exponents.xor(&other.exponents),
        })
    }

    /// Renders the class in the entry grammar using the tower's variable names.
    pub fn render(&self, tower: &TowerField) -> String {
        let mut s = self.coeff.to_string();
        for i in self.exponents.set_positions() {
            s.push('*');
            s.push_str(&tower.vars()[i]);
        }
        s
    }

    pub(crate) fn widen(&self, level: usize) -> SquareClass {
        SquareClass {
            coeff: self.coeff.clone(),
            exponents: self.exponents.widen(level),
        }
    }
}

/// A nondegenerate diagonal quadratic form over a tower field. The empty
/// entry list is the zero form, the additive identity of the Witt ring.
#[derive(Debug, Clone, Eq)]
pub struct DiagonalForm {
    field: TowerField,
    entries: Vec<SquareClass>,
}

impl DiagonalForm {
    pub fn new(field: TowerField, entries: Vec<SquareClass>) -> Result<Self> {
        for e in &entries {
            if e.level() != field.level() {
                return Err(Error::TowerMismatch {
                    left: field.to_string(),
                    right: format!("entry of level {}", e.level()),
                });
            }
        }
        Ok(DiagonalForm { field, entries })
    }

    pub fn empty(field: TowerField) -> Self {
        DiagonalForm {
            field,
            entries: Vec::new(),
        }
    }

    pub fn field(&self) -> &TowerField {
        &self.field
    }

    pub fn entries(&self) -> &[SquareClass] {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero_form(&self) -> bool {
        self.entries.is_empty()
    }

    /// Orthogonal sum: concatenation of entries.
    pub fn orthogonal_sum(&self, other: &DiagonalForm) -> Result<DiagonalForm> {
        self.field.require_same(&other.field)?;
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        Ok(DiagonalForm {
            field: self.field.clone(),
            entries,
        })
    }

    /// The scaled form c·q.
    pub fn scale(&self, c: &SquareClass) -> Result<DiagonalForm> {
        if c.level() != self.field.level() {
            return Err(Error::TowerMismatch {
                left: self.field.to_string(),
                right: format!("scalar of level {}", c.level()),
            });
        }
        let entries = self
            .entries
            .iter()
            .map(|e| e.mul(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(DiagonalForm {
            field: self.field.clone(),
            entries,
        })
    }

    /// The form (-1)·q.
    pub fn negated(&self) -> DiagonalForm {
        DiagonalForm {
            field: self.field.clone(),
            entries: self.entries.iter().map(SquareClass::negated).collect(),
        }
    }

    /// Tensor product: all pairwise entry products, row-major.
    pub fn tensor(&self, other: &DiagonalForm) -> Result<DiagonalForm> {
        self.field.require_same(&other.field)?;
        let mut entries = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.entries {
            for b in &other.entries {
                entries.push(a.mul(b)?);
            }
        }
        Ok(DiagonalForm {
            field: self.field.clone(),
            entries,
        })
    }

    /// Reinterprets the form over a deeper tower of which the current one is
    /// an initial segment.
    pub fn lift(&self, to: &TowerField) -> Result<DiagonalForm> {
        if !self.field.is_prefix_of(to) {
            return Err(Error::TowerMismatch {
                left: self.field.to_string(),
                right: to.to_string(),
            });
        }
        let level = to.level();
        Ok(DiagonalForm {
            field: to.clone(),
            entries: self.entries.iter().map(|e| e.widen(level)).collect(),
        })
    }

    /// Signed discriminant (-1)^{d(d-1)/2}·∏ entries as a square class over
    /// the tower. For d = 0 this is the identity class.
    pub fn signed_discriminant(&self) -> SquareClass {
        let level = self.field.level();
        let mut acc = SquareClass::one(level);
        for e in &self.entries {
            acc = acc.mul(e).expect("entries share the form's level");
        }
        let d = self.dim();
        if (d * d.saturating_sub(1) / 2) % 2 == 1 {
            acc = acc.negated();
        }
        acc
    }

    pub(crate) fn sorted_entries(&self) -> Vec<SquareClass> {
        let mut v = self.entries.clone();
        v.sort();
        v
    }
}

/// Forms are entry multisets: equality ignores entry order but not the tower.
impl PartialEq for DiagonalForm {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.sorted_entries() == other.sorted_entries()
    }
}

impl fmt::Display for DiagonalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", e.render(&self.field))?;
        }
        write!(f, ">")
    }
}

/// An n-fold Pfister form presented by its n slots, with the convention
/// ⟨⟨a⟩⟩ = ⟨1, a⟩ (no sign flip). The expansion has dimension 2^n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PfisterSlots {
    field: TowerField,
    slots: Vec<SquareClass>,
}

impl PfisterSlots {
    pub fn new(field: TowerField, slots: Vec<SquareClass>) -> Result<Self> {
        for s in &slots {
            if s.level() != field.level() {
                return Err(Error::TowerMismatch {
                    left: field.to_string(),
                    right: format!("slot of level {}", s.level()),
                });
            }
        }
        Ok(PfisterSlots { field, slots })
    }

    pub fn field(&self) -> &TowerField {
        &self.field
    }

    pub fn slots(&self) -> &[SquareClass] {
        &self.slots
    }

    /// The fold number n.
    pub fn fold(&self) -> usize {
        self.slots.len()
    }

    /// Expands ⊗_i ⟨1, a_i⟩ to a diagonal form of dimension 2^n. Entry k is
    /// the product of the slots selected by the bits of k, so the first
    /// entry is always 1.
    pub fn expand(&self) -> DiagonalForm {
        let level = self.field.level();
        let mut entries = vec![SquareClass::one(level)];
        for slot in &self.slots {
            let scaled: Vec<SquareClass> = entries
                .iter()
                .map(|e| e.mul(slot).expect("slots share the field's level"))
                .collect();
            entries.extend(scaled);
        }
        DiagonalForm {
            field: self.field.clone(),
            entries,
        }
    }

    /// The pure subform: the expansion with one copy of the leading 1
    /// removed, of dimension 2^n - 1. Undefined for the 0-fold form.
    pub fn pure_subform(&self) -> Result<DiagonalForm> {
        if self.slots.is_empty() {
            return Err(Error::ZeroFoldPfister);
        }
        let mut expanded = self.expand();
        expanded.entries.remove(0);
        Ok(expanded)
    }

    pub(crate) fn lift(&self, to: &TowerField) -> Result<PfisterSlots> {
        if !self.field.is_prefix_of(to) {
            return Err(Error::TowerMismatch {
                left: self.field.to_string(),
                right: to.to_string(),
            });
        }
        let level = to.level();
        Ok(PfisterSlots {
            field: to.clone(),
            slots: self.slots.iter().map(|s| s.widen(level)).collect(),
        })
    }
}

impl fmt::Display for PfisterSlots {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<<")?;
        for (i, s) in self.slots.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", s.render(&self.field))?;
        }
        write!(f, ">>")
    }
}

/// A generalized Pfister form α·p given by the scalar and the slots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralizedPfisterTerm {
    pub alpha: SquareClass,
    pub pfister: PfisterSlots,
}

impl GeneralizedPfisterTerm {
    pub fn new(alpha: SquareClass, pfister: PfisterSlots) -> Result<Self> {
        if alpha.level() != pfister.field.level() {
            return Err(Error::TowerMismatch {
                left: pfister.field.to_string(),
                right: format!("scalar of level {}", alpha.level()),
            });
        }
        Ok(GeneralizedPfisterTerm { alpha, pfister })
    }

    /// The diagonal form α·(expansion of p).
    pub fn expand(&self) -> DiagonalForm {
        self.pfister
            .expand()
            .scale(&self.alpha)
            .expect("alpha shares the term's level")
    }
}
