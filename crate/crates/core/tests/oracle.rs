//! PBW normal forms against naive rewriting of words.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rumin_lab::enveloping::{Enveloping, UEAElement};
use rumin_lab::graded_lie::{builtin_235, builtin_heisenberg, GradedLieAlgebra};
use rumin_lab::scalar::{ExactScalar, Q};
use std::collections::HashMap;

type Words = HashMap<Vec<usize>, Q>;

/// Repeatedly replaces the first descent `… X_j X_i …` (j > i) with
/// `… X_i X_j …` plus the bracket term, until every word is sorted.
fn rewrite(l: &GradedLieAlgebra, input: Words) -> Words {
    let mut done: Words = HashMap::new();
    let mut todo: Vec<(Vec<usize>, Q)> = input.into_iter().collect();
    while let Some((w, c)) = todo.pop() {
        if c.is_zero() {
            continue;
        }
        let Some(p) = (0..w.len().saturating_sub(1)).find(|&p| w[p] > w[p + 1]) else {
            *done.entry(w).or_insert_with(Q::zero) += c;
            continue;
        };
        let (j, i) = (w[p], w[p + 1]);
        let mut swapped = w.clone();
        swapped.swap(p, p + 1);
        todo.push((swapped, c.clone()));
        for k in 0..l.dim() {
            let s = l.structure_constant(j, i, k);
            if s.is_zero() {
                continue;
            }
            let mut shorter = w[..p].to_vec();
            shorter.push(k);
            shorter.extend_from_slice(&w[p + 2..]);
            todo.push((shorter, &c * &s));
        }
    }
    done.retain(|_, c| !c.is_zero());
    done
}

fn to_words(x: &UEAElement) -> Words {
    x.terms
        .iter()
        .map(|(m, c)| {
            assert!(c.im.is_zero() && c.re.b.is_zero(), "rational coefficients expected");
            (m.word(), c.re.a.clone())
        })
        .collect()
}

fn random_word(rng: &mut ChaCha8Rng, dim: usize, max_len: usize) -> Vec<usize> {
    let len = rng.random_range(0..=max_len);
    (0..len).map(|_| rng.random_range(0..dim)).collect()
}

fn check_algebra(l: GradedLieAlgebra, seed: u64) {
    let env = Enveloping::new(l.clone()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..150 {
        let w = random_word(&mut rng, l.dim(), 7);
        let want = rewrite(&l, HashMap::from([(w.clone(), Q::from_integer(1.into()))]));
        assert_eq!(to_words(&env.word(&w)), want, "word {w:?}");
    }
    for _ in 0..60 {
        let (a, b) = (random_word(&mut rng, l.dim(), 4), random_word(&mut rng, l.dim(), 4));
        let prod = env.mul(&env.word(&a), &env.word(&b));
        let ab: Vec<usize> = a.iter().chain(&b).copied().collect();
        let want = rewrite(&l, HashMap::from([(ab, Q::from_integer(1.into()))]));
        assert_eq!(to_words(&prod), want, "{a:?}·{b:?}");
    }
}

#[test]
fn pbw_words_235() {
    check_algebra(builtin_235(), 11);
}

#[test]
fn pbw_words_heisenberg() {
    check_algebra(builtin_heisenberg(), 12);
}

#[test]
fn sorted_words_are_fixed() {
    let l = builtin_235();
    let env = Enveloping::new(l).unwrap();
    let w = [0, 0, 1, 2, 4];
    let x = env.word(&w);
    assert_eq!(x.terms.len(), 1);
    let (m, c) = x.terms.iter().next().unwrap();
    assert_eq!(m.word(), w.to_vec());
    assert_eq!(c, &ExactScalar::one());
}
