//! Brute-force oracles, independent of the decision procedures they check.
//!
//! Everything here decides by exhaustive search in exact integer arithmetic:
//! isotropic vectors by meet-in-the-middle over bounded coordinate boxes,
//! Hilbert symbols by primitive solvability modulo p³ (resp. 32), and
//! anisotropic dimensions by explicitly splitting off hyperbolic planes with
//! rational linear algebra. The searches are sound but bounded: a missing
//! witness inside the box proves nothing, which is exactly the asymmetry the
//! acceptance tests exploit.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use witt::scalars::{squarefree_part_int, Rational};

/// Searches for a nontrivial integer zero of ⟨a_1,…,a_n⟩ (n ≤ 4) with all
/// coordinates in [0, bound]. Signs never matter for diagonal forms.
pub fn isotropy_search(entries: &[i64], bound: i64) -> Option<Vec<i64>> {
    match entries.len() {
        0 | 1 => None,
        2 => search_dim2(entries[0], entries[1], bound).map(|(x, y)| vec![x, y]),
        3 => search_dim3(entries, bound),
        4 => search_dim4(entries, bound),
        n => panic!("isotropy_search supports dim ≤ 4, got {n}"),
    }
}

fn search_dim2(a: i64, b: i64, bound: i64) -> Option<(i64, i64)> {
    for x in 0..=bound {
        for y in 0..=bound {
            if (x, y) == (0, 0) {
                continue;
            }
            if a * x * x + b * y * y == 0 {
                return Some((x, y));
            }
        }
    }
    None
}

fn search_dim3(e: &[i64], bound: i64) -> Option<Vec<i64>> {
    let (a, b, c) = (e[0], e[1], e[2]);
    let mut by_value: HashMap<i64, i64> = HashMap::new();
    for z in 0..=bound {
        by_value.entry(c * z * z).or_insert(z);
    }
    for x in 0..=bound {
        for y in 0..=bound {
            if (x, y) == (0, 0) {
                continue;
            }
            if let Some(&z) = by_value.get(&-(a * x * x + b * y * y)) {
                return Some(vec![x, y, z]);
            }
        }
    }
    None
}

fn search_dim4(e: &[i64], bound: i64) -> Option<Vec<i64>> {
    let (a, b, c, d) = (e[0], e[1], e[2], e[3]);
    // one half entirely zero reduces to the binary cases
    if let Some((x, y)) = search_dim2(a, b, bound) {
        return Some(vec![x, y, 0, 0]);
    }
    if let Some((z, w)) = search_dim2(c, d, bound) {
        return Some(vec![0, 0, z, w]);
    }
    // both halves nonzero: hash the left half
    let mut left: HashMap<i64, (i64, i64)> = HashMap::new();
    for x in 0..=bound {
        for y in 0..=bound {
            if (x, y) == (0, 0) {
                continue;
            }
            left.entry(a * x * x + b * y * y).or_insert((x, y));
        }
    }
    for z in 0..=bound {
        for w in 0..=bound {
            if let Some(&(x, y)) = left.get(&-(c * z * z + d * w * w)) {
                return Some(vec![x, y, z, w]);
            }
        }
    }
    None
}

/// Checks that a claimed witness really is a nontrivial zero.
pub fn check_witness(entries: &[i64], witness: &[i64]) -> bool {
    witness.iter().any(|&x| x != 0)
        && entries
            .iter()
            .zip(witness)
            .map(|(&a, &x)| a * x * x)
            .sum::<i64>()
            == 0
}

/// Anisotropic dimension by iterated hyperbolic-plane splitting: find an
/// isotropic vector by bounded search, split the plane off with exact
/// rational linear algebra, renormalize the complement to squarefree
/// integer entries, repeat. Bounded, hence an overestimate in principle;
/// the acceptance grid keeps witnesses tiny.
pub fn anisotropic_dimension_by_splitting(entries: &[i64], bound: i64) -> usize {
    let mut current: Vec<i64> = entries.iter().map(|&a| squarefree_i64(a)).collect();
    loop {
        match isotropy_search(&current, bound) {
            None => return current.len(),
            Some(witness) => {
                assert!(
                    check_witness(&current, &witness),
                    "oracle produced a bad witness"
                );
                current = split_hyperbolic_plane(&current, &witness)
                    .iter()
                    .map(squarefree_big_to_i64)
                    .collect();
            }
        }
    }
}

fn squarefree_i64(a: i64) -> i64 {
    squarefree_big_to_i64(&BigInt::from(a))
}

fn squarefree_big_to_i64(a: &BigInt) -> i64 {
    squarefree_part_int(a)
        .expect("oracle entries are factorable")
        .value()
        .to_i64()
        .expect("squarefree oracle entries fit in i64")
}

/// Given diagonal entries a and an isotropic vector v, computes diagonal
/// entries of the orthogonal complement of the hyperbolic plane spanned by
/// v and a dual vector, as integers (scaled by squares).
fn split_hyperbolic_plane(entries: &[i64], witness: &[i64]) -> Vec<BigInt> {
    let n = entries.len();
    let a: Vec<Rational> = entries.iter().map(|&x| int_rat(x)).collect();
    let v: Vec<Rational> = witness.iter().map(|&x| int_rat(x)).collect();
    let bilinear = |x: &[Rational], y: &[Rational]| -> Rational {
        let mut acc = Rational::zero();
        for i in 0..n {
            acc += &a[i] * &x[i] * &y[i];
        }
        acc
    };

    // dual vector: the basis vector e_k with v_k ≠ 0 pairs nontrivially with v
    let k = witness
        .iter()
        .position(|&x| x != 0)
        .expect("nontrivial witness");
    let mut u = vec![Rational::zero(); n];
    u[k] = Rational::from(BigInt::from(1));
    let c = bilinear(&v, &u);
    assert!(!c.is_zero());
    let uu = bilinear(&u, &u);

    // project every basis vector onto the complement of span(v, u):
    // x' = x - αv - βu with B(x',v) = B(x',u) = 0; the Gram matrix of (v,u)
    // is [[0, c], [c, uu]], so β = B(x,v)/c and α = (B(x,u) - uu·β)/c.
    let mut projected: Vec<Vec<Rational>> = Vec::new();
    for j in 0..n {
        let mut x = vec![Rational::zero(); n];
        x[j] = Rational::from(BigInt::from(1));
        let bv = bilinear(&x, &v);
        let bu = bilinear(&x, &u);
        let beta = &bv / &c;
        let alpha = (&bu - &uu * &beta) / &c;
        for i in 0..n {
            let s = &x[i] - &alpha * &v[i] - &beta * &u[i];
            x[i] = s;
        }
        projected.push(x);
    }

    // row-reduce to extract n-2 independent complement vectors
    let mut basis: Vec<Vec<Rational>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for mut row in projected {
        for (b, &p) in basis.iter().zip(&pivots) {
            if !row[p].is_zero() {
                let factor = &row[p] / &b[p];
                for i in 0..n {
                    let s = &row[i] - &factor * &b[i];
                    row[i] = s;
                }
            }
        }
        if let Some(p) = row.iter().position(|x| !x.is_zero()) {
            pivots.push(p);
            basis.push(row);
        }
    }
    assert_eq!(basis.len(), n - 2, "complement has the wrong dimension");

    // Gram matrix of the complement, then symmetric congruence diagonalization
    let m = n - 2;
    let mut gram: Vec<Vec<Rational>> = (0..m)
        .map(|i| (0..m).map(|j| bilinear(&basis[i], &basis[j])).collect())
        .collect();

    let mut diagonal = Vec::with_capacity(m);
    for i in 0..m {
        if gram[i][i].is_zero() {
            if let Some(j) = (i + 1..m).find(|&j| !gram[j][j].is_zero()) {
                gram.swap(i, j);
                for row in gram.iter_mut() {
                    row.swap(i, j);
                }
            } else {
                // all remaining diagonal entries vanish; a nonzero cross term
                // must exist because the complement is regular
                let j = (i + 1..m)
                    .find(|&j| !gram[i][j].is_zero())
                    .expect("regular complement");
                for col in 0..m {
                    let s = &gram[i][col] + &gram[j][col];
                    gram[i][col] = s;
                }
                for row in gram.iter_mut() {
                    let s = &row[i] + &row[j];
                    row[i] = s;
                }
            }
        }
        let pivot = gram[i][i].clone();
        for j in i + 1..m {
            let factor = &gram[i][j] / &pivot;
            if factor.is_zero() {
                continue;
            }
            for col in 0..m {
                let s = &gram[j][col] - &factor * &gram[i][col];
                gram[j][col] = s;
            }
            for row in gram.iter_mut() {
                let s = &row[j] - &factor * &row[i];
                row[j] = s;
            }
        }
        diagonal.push(gram[i][i].clone());
    }

    diagonal
        .into_iter()
        .map(|d| {
            assert!(!d.is_zero(), "regular form diagonalizes to nonzero entries");
            d.numer() * d.denom()
        })
        .collect()
}

fn int_rat(x: i64) -> Rational {
    Rational::from(BigInt::from(x))
}

/// Hilbert symbol at an odd prime by brute force: +1 iff z² = a·x² + b·y²
/// has a solution mod p³ that is primitive (not all coordinates divisible
/// by p). A primitive solution mod p³ lifts to Z_p by Hensel's lemma
/// because v_p(a), v_p(b) ≤ 1 on squarefree input.
pub fn hilbert_search_odd(a: i64, b: i64, p: u64) -> i32 {
    let m = (p * p * p) as i64;
    let p = p as i64;
    let mut squares: HashMap<i64, i64> = HashMap::new();
    let mut unit_squares: HashMap<i64, i64> = HashMap::new();
    for z in 0..m {
        let v = z * z % m;
        squares.entry(v).or_insert(z);
        if z % p != 0 {
            unit_squares.entry(v).or_insert(z);
        }
    }
    for x in 0..m {
        for y in 0..m {
            let v = ((a * x % m) * x % m + (b * y % m) * y % m).rem_euclid(m);
            if x % p != 0 || y % p != 0 {
                if squares.contains_key(&v) {
                    return 1;
                }
            } else if unit_squares.contains_key(&v) {
                return 1;
            }
        }
    }
    -1
}

/// Hilbert symbol at 2 by brute force: +1 iff z² = a·x² + b·y² has a
/// primitive solution mod 32, which is the 2-adic Hensel threshold for
/// entries of valuation ≤ 1.
pub fn hilbert_search_two(a: i64, b: i64) -> i32 {
    const M: i64 = 32;
    for x in 0..M {
        for y in 0..M {
            for z in 0..M {
                if x % 2 == 0 && y % 2 == 0 && z % 2 == 0 {
                    continue;
                }
                if (a * x * x + b * y * y - z * z).rem_euclid(M) == 0 {
                    return 1;
                }
            }
        }
    }
    -1
}

/// Bounded isotropy search over Q((t)) for q0 ⊥ t·q1 with unit parts q0, q1
/// given by integer entries. Candidate vectors have polynomial coordinates
/// of degree ≤ max_deg with coefficients in [-coeff_bound, coeff_bound];
/// meet-in-the-middle over the two residue components. Returns true iff a
/// nontrivial vector with q0(A) + t·q1(B) = 0 exists inside the window.
pub fn laurent_isotropy_search(
    unit: &[i64],
    residue: &[i64],
    max_deg: usize,
    coeff_bound: i64,
) -> bool {
    // coefficient vectors of q0(A) and t·q1(B) both live in degree ≤ 2·max_deg + 1
    let key_len = 2 * max_deg + 2;

    // every assignment of polynomials to the unit entries, keyed by the
    // value polynomial; the flag records whether a nonzero assignment
    // reaches the key
    let mut left: HashMap<Vec<i64>, bool> = HashMap::new();
    for assignment in assignments(unit.len(), max_deg, coeff_bound) {
        let mut value = vec![0i64; key_len];
        for (entry, poly) in unit.iter().zip(&assignment) {
            accumulate_scaled_square(&mut value, *entry, poly, 0);
        }
        let nonzero = assignment.iter().flatten().any(|&c| c != 0);
        let slot = left.entry(value).or_insert(false);
        *slot = *slot || nonzero;
    }

    for assignment in assignments(residue.len(), max_deg, coeff_bound) {
        let mut value = vec![0i64; key_len];
        for (entry, poly) in residue.iter().zip(&assignment) {
            // the residue block contributes t·(entry)·B_j²
            accumulate_scaled_square(&mut value, *entry, poly, 1);
        }
        for c in value.iter_mut() {
            *c = -*c;
        }
        let nonzero = assignment.iter().flatten().any(|&c| c != 0);
        match left.get(&value) {
            Some(&left_nonzero) if nonzero || left_nonzero => return true,
            _ => {}
        }
    }
    false
}

/// value += entry · poly² · t^shift, as coefficient vectors.
fn accumulate_scaled_square(value: &mut [i64], entry: i64, poly: &[i64], shift: usize) {
    for (i, &ci) in poly.iter().enumerate() {
        if ci == 0 {
            continue;
        }
        for (j, &cj) in poly.iter().enumerate() {
            if cj == 0 {
                continue;
            }
            value[i + j + shift] += entry * ci * cj;
        }
    }
}

/// Number of candidate polynomial vectors a side contributes for a window.
pub fn laurent_window_size(count: usize, max_deg: usize, bound: i64) -> u128 {
    let slots = (count * (max_deg + 1)) as u32;
    (2 * bound as u128 + 1).pow(slots)
}

/// All vectors of `count` polynomials of degree ≤ max_deg with coefficients
/// in [-bound, bound], enumerated odometer-style.
fn assignments(count: usize, max_deg: usize, bound: i64) -> impl Iterator<Item = Vec<Vec<i64>>> {
    let coeffs_per_poly = max_deg + 1;
    let radix = 2 * bound + 1;
    let total = laurent_window_size(count, max_deg, bound);
    assert!(total <= 1 << 28, "laurent search window too large: {total}");
    (0..total).map(move |mut index| {
        let mut out = vec![vec![0i64; coeffs_per_poly]; count];
        for poly in out.iter_mut() {
            for c in poly.iter_mut() {
                *c = (index % radix as u128) as i64 - bound;
                index /= radix as u128;
            }
        }
        out
    })
}
