//! Residue maps and Springer-based deciders over K = Q((t1))...((tm)).
//!
//! The second residue homomorphism W(k((t))) → W(k) sends q0 ⊥ t·q1 (units
//! q0, q1) to q1, and the associated exact sequence is split on both sides.
//! Iterating over all m variables at once decomposes any diagonal form into
//! 2^m components over Q indexed by exponent vectors, and every Witt-ring
//! question over the tower reduces to the componentwise question over Q:
//! a form is anisotropic iff every component is (Springer), hyperbolic iff
//! every component is, and so on.

use std::collections::BTreeMap;

use crate::base;
use crate::error::{Error, Result};
use crate::forms::{DiagonalForm, Exponents, PfisterSlots, SquareClass, TowerField};

/// A form over a level-m tower split into its 2^m unit components over Q.
/// Only nonempty components are stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentDecomposition {
    tower: TowerField,
    components: BTreeMap<Exponents, DiagonalForm>,
}

impl ComponentDecomposition {
    pub fn tower(&self) -> &TowerField {
        &self.tower
    }

    /// The nonempty components, keyed by exponent vector.
    pub fn components(&self) -> &BTreeMap<Exponents, DiagonalForm> {
        &self.components
    }

    /// The component at ε; absent components are the zero form.
    pub fn component(&self, eps: Exponents) -> DiagonalForm {
        self.components
            .get(&eps)
            .cloned()
            .unwrap_or_else(|| DiagonalForm::empty(TowerField::rationals()))
    }

    /// Rebuilds ⊥_ε t^ε·(lift of q_ε); entry-multiset equal to the source.
    pub fn reassemble(&self) -> DiagonalForm {
        let mut out = DiagonalForm::empty(self.tower.clone());
        for (eps, component) in &self.components {
            let monomial = SquareClass::new(crate::scalars::SquarefreeInt::one(), *eps);
            let lifted = component
                .lift(&self.tower)
                .expect("Q is a prefix of every tower");
            let block = lifted.scale(&monomial).expect("levels agree");
            out = out.orthogonal_sum(&block).expect("same tower");
        }
        out
    }
}

/// Splits a form over all variables at once: component ε collects the
/// coefficient parts of the entries whose exponent vector is exactly ε.
pub fn decompose(q: &DiagonalForm) -> ComponentDecomposition {
    let mut components: BTreeMap<Exponents, Vec<SquareClass>> = BTreeMap::new();
    for e in q.entries() {
        components
            .entry(e.exponents())
            .or_default()
            .push(SquareClass::new(e.coeff().clone(), Exponents::zero(0)));
    }
    ComponentDecomposition {
        tower: q.field().clone(),
        components: components
            .into_iter()
            .map(|(eps, entries)| {
                let form = DiagonalForm::new(TowerField::rationals(), entries)
                    .expect("level-0 entries by construction");
                (eps, form)
            })
            .collect(),
    }
}

/// The second residue map with respect to the variable at `var` (0-based):
/// returns (q0, q1) with q = q0 ⊥ t·q1 as entry multisets, both over the
/// tower with that variable removed. q1 is the residue.
pub fn second_residue(q: &DiagonalForm, var: usize) -> Result<(DiagonalForm, DiagonalForm)> {
    let level = q.field().level();
    if var >= level {
        return Err(Error::IndexOutOfRange { index: var, level });
    }
    let mut reduced_vars: Vec<String> = q.field().vars().to_vec();
    reduced_vars.remove(var);
    let reduced = TowerField::new(reduced_vars)?;

    let mut unit_part = Vec::new();
    let mut residue_part = Vec::new();
    for e in q.entries() {
        let stripped = SquareClass::new(e.coeff().clone(), e.exponents().remove(var));
        if e.exponents().bit(var) {
            residue_part.push(stripped);
        } else {
            unit_part.push(stripped);
        }
    }
    Ok((
        DiagonalForm::new(reduced.clone(), unit_part)?,
        DiagonalForm::new(reduced, residue_part)?,
    ))
}

/// Springer's theorem, iterated: q is anisotropic over the tower iff every
/// component is anisotropic over Q.
pub fn is_anisotropic(q: &DiagonalForm) -> bool {
    decompose(q)
        .components
        .values()
        .all(|c| !base::is_isotropic(c).expect("components are level 0 with factorable entries"))
}

/// q is hyperbolic over the tower iff every component is hyperbolic over Q
/// (exactness of the residue sequence).
pub fn is_hyperbolic(q: &DiagonalForm) -> bool {
    decompose(q)
        .components
        .values()
        .all(|c| base::is_hyperbolic(c).expect("components are level 0 with factorable entries"))
}

/// Equality in W(K): componentwise Witt equivalence over Q.
pub fn witt_equivalent(q1: &DiagonalForm, q2: &DiagonalForm) -> Result<bool> {
    q1.field().require_same(q2.field())?;
    let d1 = decompose(q1);
    let d2 = decompose(q2);
    let keys: std::collections::BTreeSet<Exponents> = d1
        .components
        .keys()
        .chain(d2.components.keys())
        .copied()
        .collect();
    for eps in keys {
        if !base::witt_equivalent(&d1.component(eps), &d2.component(eps))? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Isometry over the tower: equal dimension plus Witt equivalence.
pub fn isometric(q1: &DiagonalForm, q2: &DiagonalForm) -> Result<bool> {
    Ok(q1.dim() == q2.dim() && witt_equivalent(q1, q2)?)
}

/// Per-component anisotropic dimensions; their sum is the dimension of the
/// anisotropic part of q over the tower. The map runs over the nonempty
/// components of q.
pub fn anisotropic_part_dims(q: &DiagonalForm) -> BTreeMap<Exponents, usize> {
    decompose(q)
        .components
        .iter()
        .map(|(&eps, c)| {
            let d = base::anisotropic_dimension(c)
                .expect("components are level 0 with factorable entries");
            (eps, d)
        })
        .collect()
}

/// Membership in D(q), the nonzero represented values: an isotropic form is
/// universal; an anisotropic q represents c iff q ⊥ ⟨-c⟩ is isotropic.
pub fn represents(q: &DiagonalForm, c: &SquareClass) -> Result<bool> {
    if c.level() != q.field().level() {
        return Err(Error::TowerMismatch {
            left: q.field().to_string(),
            right: format!("value of level {}", c.level()),
        });
    }
    if !is_anisotropic(q) {
        // isotropic forms are universal
        return Ok(true);
    }
    let extended = q.orthogonal_sum(&DiagonalForm::new(q.field().clone(), vec![c.negated()])?)?;
    Ok(!is_anisotropic(&extended))
}

/// Membership in G(q), the similarity factors: λ·q ≅ q.
pub fn is_similarity_factor(q: &DiagonalForm, lambda: &SquareClass) -> Result<bool> {
    isometric(&q.scale(lambda)?, q)
}

/// Whether ⟨1,-λ⟩ ⊗ p is hyperbolic over the tower, i.e. λ annihilates the
/// Pfister form in the Witt ring.
pub fn annihilated_by(p: &PfisterSlots, lambda: &SquareClass) -> Result<bool> {
    let level = p.field().level();
    if lambda.level() != level {
        return Err(Error::TowerMismatch {
            left: p.field().to_string(),
            right: format!("scalar of level {}", lambda.level()),
        });
    }
    let annihilator = DiagonalForm::new(
        p.field().clone(),
        vec![SquareClass::one(level), lambda.negated()],
    )?;
    Ok(is_hyperbolic(&annihilator.tensor(&p.expand())?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse;

    fn t1() -> TowerField {
        TowerField::new(["t1"]).unwrap()
    }

    fn t2() -> TowerField {
        TowerField::new(["t1", "t2"]).unwrap()
    }

    fn f(text: &str, tower: &TowerField) -> DiagonalForm {
        parse::form(text, tower).unwrap()
    }

    fn cls(text: &str, tower: &TowerField) -> SquareClass {
        parse::square_class(text, tower).unwrap()
    }

    #[test]
    fn second_residue_examples() {
        let t = t1();
        // unit entry: nothing in the residue part
        let (q0, q1) = second_residue(&f("<7>", &t), 0).unwrap();
        assert_eq!(q0.to_string(), "<7>");
        assert_eq!(q1.dim(), 0);

        // δ(q ⊥ t·p) = p
        let (q0, q1) = second_residue(&f("<2, -3, 5*t1, 7*t1>", &t), 0).unwrap();
        assert_eq!(q0, f("<2, -3>", &TowerField::rationals()));
        assert_eq!(q1, f("<5, 7>", &TowerField::rationals()));

        let (q0, q1) = second_residue(&f("<1, t1, -1*t1>", &t), 0).unwrap();
        assert_eq!(q0.to_string(), "<1>");
        assert_eq!(q1, f("<1, -1>", &TowerField::rationals()));
    }

    #[test]
    fn second_residue_keeps_other_variables() {
        let t = t2();
        let (q0, q1) = second_residue(&f("<6*t1*t2, -1>", &t), 1).unwrap();
        let rt1 = TowerField::new(["t1"]).unwrap();
        assert_eq!(q0, f("<-1>", &rt1));
        assert_eq!(q1, f("<6*t1>", &rt1));
        assert!(second_residue(&f("<-1>", &rt1), 1).is_err());
    }

    #[test]
    fn decompose_examples() {
        let t = t1();
        let d = decompose(&f("<1, 1, t1, t1>", &t));
        assert_eq!(d.component(Exponents::zero(1)).dim(), 2);
        assert_eq!(d.component(Exponents::var(1, 0).unwrap()).dim(), 2);

        // a unit form over a level-2 tower sits entirely in ε = (0,0)
        let d = decompose(&f("<1>", &t2()));
        assert_eq!(d.components().len(), 1);
        assert_eq!(d.component(Exponents::zero(2)).to_string(), "<1>");

        let d = decompose(&f("<6*t1*t2, -1>", &t2()));
        assert_eq!(d.component(Exponents::zero(2)).to_string(), "<-1>");
        assert_eq!(
            d.component(Exponents::from_bits(2, 0b11)).to_string(),
            "<6>"
        );
    }

    #[test]
    fn decompose_reassembles_to_the_same_multiset() {
        let t = t2();
        for text in ["<1, -2, 3*t1, -5*t1*t2, 7*t2, 1*t1>", "<>", "<10*t2>"] {
            let q = f(text, &t);
            let d = decompose(&q);
            assert_eq!(d.reassemble(), q);
            assert!(witt_equivalent(&d.reassemble(), &q).unwrap());
            let total: usize = d.components().values().map(|c| c.dim()).sum();
            assert_eq!(total, q.dim());
        }
    }

    #[test]
    fn springer_anisotropy_examples() {
        let t = t1();
        // both components are ⟨1⟩
        assert!(is_anisotropic(&f("<1, t1>", &t)));
        assert!(!is_anisotropic(&f("<1, -1>", &t)));
        // q ⊥ t·p with q, p anisotropic over Q stays anisotropic
        assert!(is_anisotropic(&f("<1, 1, 2*t1, 3*t1>", &t)));
        // isotropy hides in the residue component
        assert!(!is_anisotropic(&f("<1, 1, 2*t1, -2*t1>", &t)));
    }

    #[test]
    fn witt_equivalence_examples() {
        let t = t1();
        // the t-part ⟨t1,-t1⟩ is hyperbolic
        assert!(witt_equivalent(&f("<1, t1, -1*t1>", &t), &f("<1>", &t)).unwrap());
        let p = parse::pfister("<<1, t1>>", &t).unwrap();
        assert!(witt_equivalent(&f("<1, 1, t1, t1>", &t), &p.expand()).unwrap());
        assert!(!witt_equivalent(&f("<t1>", &t), &f("<1>", &t)).unwrap());
    }

    #[test]
    fn isometry_examples() {
        let t = t1();
        // the hyperbolic plane is round: t1·⟨1,-1⟩ ≅ ⟨1,-1⟩
        let h = f("<1, -1>", &t);
        assert!(isometric(&h.scale(&cls("t1", &t)).unwrap(), &h).unwrap());
        assert!(!isometric(&f("<1,1,t1,t1>", &t), &f("<1,1,1,t1>", &t)).unwrap());
        let q = f("<2, 3*t1>", &t);
        assert!(isometric(&q, &q).unwrap());
        // same Witt class, different dimension
        assert!(!isometric(&f("<1, 1, -1>", &t), &f("<1>", &t)).unwrap());
    }

    #[test]
    fn anisotropic_part_dims_examples() {
        let t = t1();
        let dims = anisotropic_part_dims(&f("<1, -1, t1>", &t));
        assert_eq!(dims[&Exponents::zero(1)], 0);
        assert_eq!(dims[&Exponents::var(1, 0).unwrap()], 1);

        let dims = anisotropic_part_dims(&f("<1, 1, 2*t1, 3*t1>", &t));
        assert_eq!(dims[&Exponents::zero(1)], 2);
        assert_eq!(dims[&Exponents::var(1, 0).unwrap()], 2);

        let dims = anisotropic_part_dims(&f("<1, -1, t1, -1*t1>", &t));
        assert!(dims.values().all(|&d| d == 0));
    }

    #[test]
    fn represents_examples() {
        let q0 = TowerField::rationals();
        // 5 = 2² + 1
        assert!(represents(&f("<1,1>", &q0), &cls("5", &q0)).unwrap());
        assert!(!represents(&f("<1,1>", &q0), &cls("-1", &q0)).unwrap());
        let t = t1();
        assert!(represents(&f("<1, t1>", &t), &cls("t1", &t)).unwrap());
        // isotropic forms are universal
        assert!(represents(&f("<1, -1>", &t), &cls("-7*t1", &t)).unwrap());
        // the zero form represents nothing
        assert!(!represents(&f("<>", &q0), &cls("1", &q0)).unwrap());
    }

    #[test]
    fn similarity_examples() {
        let q0 = TowerField::rationals();
        for text in ["<1,1>", "<1,-2>", "<1,1,-3>"] {
            assert!(is_similarity_factor(&f(text, &q0), &cls("1", &q0)).unwrap());
        }
        // 2 = 2² - 2·1² is a norm from Q(√2)
        assert!(is_similarity_factor(&f("<1,-2>", &q0), &cls("2", &q0)).unwrap());
        // x² - 2y² = 3 has no solution mod 8
        assert!(!is_similarity_factor(&f("<1,-2>", &q0), &cls("3", &q0)).unwrap());
    }

    #[test]
    fn annihilation_examples() {
        let q0 = TowerField::rationals();
        let lambda_one = cls("1", &q0);
        for slots in ["<<2>>", "<<-2>>", "<<3, -5>>"] {
            let p = parse::pfister(slots, &q0).unwrap();
            // ⟨1,-1⟩ ⊗ anything is hyperbolic
            assert!(annihilated_by(&p, &lambda_one).unwrap());
        }
        let p = parse::pfister("<<-2>>", &q0).unwrap();
        // ⟨1,1,-2,-2⟩ is hyperbolic
        assert!(annihilated_by(&p, &cls("2", &q0)).unwrap());
        // ⟨1,-2,-3,6⟩ is the anisotropic quaternion norm form
        assert!(!annihilated_by(&p, &cls("3", &q0)).unwrap());
    }

    #[test]
    fn annihilation_ignores_square_factors_of_lambda() {
        let q0 = TowerField::rationals();
        let p = parse::pfister("<<-2>>", &q0).unwrap();
        // 8 and 2 are the same square class
        assert_eq!(
            annihilated_by(&p, &cls("8", &q0)).unwrap(),
            annihilated_by(&p, &cls("2", &q0)).unwrap()
        );
    }

    #[test]
    fn represented_pure_subform_values_open_a_slot() {
        // c ∈ D(pure subform of a 2-fold p) exactly when p rewrites as
        // <<c, c2>> for some c2; search c2 over small classes.
        let t = t1();
        let p = parse::pfister("<<t1, 2>>", &t).unwrap();
        let pure = p.pure_subform().unwrap();
        let candidates: Vec<SquareClass> = [
            "1", "-1", "2", "-2", "3", "-3", "t1", "-1*t1", "2*t1", "-2*t1", "3*t1", "-3*t1",
        ]
        .iter()
        .map(|s| cls(s, &t))
        .collect();
        for c in &candidates {
            if !represents(&pure, c).unwrap() {
                continue;
            }
            let rewritten = candidates.iter().any(|c2| {
                let q = PfisterSlots::new(t.clone(), vec![c.clone(), c2.clone()]).unwrap();
                isometric(&q.expand(), &p.expand()).unwrap()
            });
            assert!(rewritten, "no slot rewrite found for {}", c.render(&t));
        }
        // 2 is a represented value of <t1, 2, 2*t1>, and <<2, t1>> works
        assert!(represents(&pure, &cls("2", &t)).unwrap());
        let rewrite = parse::pfister("<<2, t1>>", &t).unwrap();
        assert!(isometric(&rewrite.expand(), &p.expand()).unwrap());
    }

    #[test]
    fn springer_dimension_inequality() {
        // dim(q ⊥ t·p) > dim(p) whenever q is nonempty
        let t = t1();
        let q = f("<1, 1, 2*t1, 3*t1>", &t);
        let (_, p) = second_residue(&q, 0).unwrap();
        assert!(q.dim() > p.dim());
    }

    #[test]
    fn tower_mismatch_is_reported() {
        let a = f("<1>", &t1());
        let b = f("<1>", &t2());
        assert!(matches!(
            witt_equivalent(&a, &b),
            Err(Error::TowerMismatch { .. })
        ));
    }
}
