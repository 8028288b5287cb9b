//! Text grammar for forms and square classes, shared by the CLI, the
//! certificate format, and test fixtures.
//!
//! ```text
//! form    := "<" entry ("," entry)* ">" | "<>"
//! pfister := "<<" entry ("," entry)* ">>"
//! entry   := [sign] rational ("*" var)*
//! rational:= integer ["/" integer]
//! var     := a name declared in the tower, e.g. t1
//! ```
//!
//! Entries are normalized on the way in ("<4>" parses to ⟨1⟩, a repeated
//! variable cancels); printing always emits the canonical squarefree form,
//! so print-then-parse is the identity.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::forms::{DiagonalForm, Exponents, PfisterSlots, SquareClass, TowerField};
use crate::scalars::{squarefree_part, Rational};

struct Scanner<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Scanner<'a> {
    fn new(text: &'a str) -> Self {
        Scanner { text, pos: 0 }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.text[self.pos..]
            .chars()
            .next()
            .is_some_and(|c| c.is_whitespace())
        {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.text[self.pos..].chars().next()
    }

    fn eat(&mut self, expected: char) -> Result<()> {
        match self.peek() {
            Some(c) if c == expected => {
                self.pos += c.len_utf8();
                Ok(())
            }
            Some(c) => Err(self.err(format!("expected {expected:?}, found {c:?}"))),
            None => Err(self.err(format!("expected {expected:?}, found end of input"))),
        }
    }

    fn eat_if(&mut self, expected: char) -> bool {
        if self.peek() == Some(expected) {
            self.pos += expected.len_utf8();
            true
        } else {
            false
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.text[self.pos..]
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_digit())
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        Ok(self.text[start..self.pos].parse().expect("digits only"))
    }

    fn ident(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let start = self.pos;
        while self.text[self.pos..]
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_')
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a variable name"));
        }
        Ok(&self.text[start..self.pos])
    }

    /// One entry of the grammar, resolved against the tower.
    fn entry(&mut self, tower: &TowerField) -> Result<SquareClass> {
        let negative = if self.eat_if('-') {
            true
        } else {
            self.eat_if('+');
            false
        };

        let entry_pos = self.pos;
        let mut exponents = Exponents::zero(tower.level());
        let mut coeff;

        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let numer = self.integer()?;
                let denom = if self.eat_if('/') {
                    let dpos = self.pos;
                    let d = self.integer()?;
                    if d == BigInt::from(0) {
                        return Err(Error::Parse {
                            pos: dpos,
                            msg: "zero denominator".into(),
                        });
                    }
                    d
                } else {
                    BigInt::from(1)
                };
                if numer == BigInt::from(0) {
                    return Err(Error::Parse {
                        pos: entry_pos,
                        msg: "zero entry is not a valid square class".into(),
                    });
                }
                coeff = Rational::new(numer, denom);
            }
            // Lenient extension: a bare variable stands for coefficient 1.
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                coeff = Rational::from(BigInt::from(1));
                let name = self.ident()?;
                let idx = tower.var_index(name).ok_or(Error::Parse {
                    pos: entry_pos,
                    msg: format!("unbound variable {name:?}"),
                })?;
                exponents = exponents.xor(&Exponents::var(tower.level(), idx)?);
            }
            _ => return Err(self.err("expected an entry")),
        }

        while self.eat_if('*') {
            let vpos = self.pos;
            let name = self.ident()?;
            let idx = tower.var_index(name).ok_or(Error::Parse {
                pos: vpos,
                msg: format!("unbound variable {name:?}"),
            })?;
            // A repeated variable is a square and cancels.
            exponents = exponents.xor(&Exponents::var(tower.level(), idx)?);
        }

        if negative {
            coeff = -coeff;
        }
        Ok(SquareClass::new(squarefree_part(&coeff)?, exponents))
    }

    fn entry_list(&mut self, tower: &TowerField, close: &str) -> Result<Vec<SquareClass>> {
        let mut entries = vec![self.entry(tower)?];
        while self.eat_if(',') {
            entries.push(self.entry(tower)?);
        }
        for c in close.chars() {
            self.eat(c)?;
        }
        Ok(entries)
    }

    fn end(&mut self) -> Result<()> {
        if let Some(c) = self.peek() {
            Err(self.err(format!("unexpected trailing {c:?}")))
        } else {
            Ok(())
        }
    }
}

/// Parses a diagonal form such as `<1, -2, 3*t1, -5*t1*t2>` or `<>`.
pub fn form(text: &str, tower: &TowerField) -> Result<DiagonalForm> {
    let mut sc = Scanner::new(text);
    sc.eat('<')?;
    if sc.eat_if('>') {
        sc.end()?;
        return Ok(DiagonalForm::empty(tower.clone()));
    }
    let entries = sc.entry_list(tower, ">")?;
    sc.end()?;
    DiagonalForm::new(tower.clone(), entries)
}

/// Parses a Pfister literal such as `<<2, -1*t1>>`.
pub fn pfister(text: &str, tower: &TowerField) -> Result<PfisterSlots> {
    let mut sc = Scanner::new(text);
    sc.eat('<')?;
    sc.eat('<')?;
    let slots = sc.entry_list(tower, ">>")?;
    sc.end()?;
    PfisterSlots::new(tower.clone(), slots)
}

/// Parses a single square class such as `-5*t1*t2` or `8` (normalized to 2).
pub fn square_class(text: &str, tower: &TowerField) -> Result<SquareClass> {
    let mut sc = Scanner::new(text);
    let class = sc.entry(tower)?;
    sc.end()?;
    Ok(class)
}
