//! Chevalley–Eilenberg cohomology with pinned class representatives.
//!
//! Forms in Λ^q L* are coordinate vectors in the wedge basis χ^I, I ranging
//! over increasing index sets in lexicographic order.

use crate::error::{Error, Result};
use crate::exact_matrix::ExactMatrix;
use crate::graded_lie::{AlgebraKind, GradedLieAlgebra};
use crate::scalar::{qf, ExactScalar, Q};
use num_traits::Zero;

/// Increasing index sets of size q in lexicographic order.
pub fn wedge_basis(n: usize, q: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, q: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == q {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, q, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if q <= n {
        rec(0, n, q, &mut Vec::new(), &mut out);
    }
    out
}

pub fn wedge_index(n: usize, set: &[usize]) -> usize {
    wedge_basis(n, set.len()).iter().position(|s| s == set).expect("not an increasing index set")
}

/// Sorts a list of distinct indices; returns the permutation sign, or 0 on repeats.
pub fn sort_with_sign(v: &mut [usize]) -> i32 {
    let mut sign = 1;
    if v.len() < 2 {
        return 1;
    }
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] == v[j + 1] {
                return 0;
            }
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        0
    } else {
        sign
    }
}

/// Matrix of ∂: Λ^q L* → Λ^{q+1} L*, determined on 1-forms by
/// (∂α)(X, Y) = −α([X, Y]) and extended as a graded derivation.
pub fn chevalley_eilenberg(l: &GradedLieAlgebra, q: usize) -> Result<ExactMatrix> {
    let n = l.dim();
    if q > n {
        return Err(Error::DegreeOutOfRange(q));
    }
    let src = wedge_basis(n, q);
    let dst = wedge_basis(n, q + 1);
    let mut m = ExactMatrix::zeros(dst.len(), src.len());
    for (col, set) in src.iter().enumerate() {
        for (p, &k) in set.iter().enumerate() {
            for i in 0..n {
                for j in i + 1..n {
                    let c = l.structure_constant(i, j, k);
                    if c.is_zero() {
                        continue;
                    }
                    // ∂χ^k contains −c χ^i∧χ^j, placed at position p after (−1)^p.
                    let mut idx: Vec<usize> = set[..p].to_vec();
                    idx.push(i);
                    idx.push(j);
                    idx.extend_from_slice(&set[p + 1..]);
                    let s = sort_with_sign(&mut idx);
                    if s == 0 {
                        continue;
                    }
                    let sign = if p % 2 == 0 { -s } else { s };
                    let row = dst.iter().position(|d| *d == idx).unwrap();
                    let v = m.get(row, col) + &ExactScalar::rational(c.clone() * Q::from_integer(sign.into()));
                    m.set(row, col, v);
                }
            }
        }
    }
    Ok(m)
}

/// Betti numbers from exact ranks of ∂.
pub fn betti_numbers(l: &GradedLieAlgebra) -> Result<Vec<usize>> {
    let n = l.dim();
    let ranks: Vec<usize> = (0..=n).map(|q| chevalley_eilenberg(l, q).map(|m| m.rank())).collect::<Result<_>>()?;
    Ok((0..=n)
        .map(|q| {
            let dim = wedge_basis(n, q).len();
            let prev = if q == 0 { 0 } else { ranks[q - 1] };
            dim - ranks[q] - prev
        })
        .collect())
}

/// Chosen basis of H^q for every degree, with weights and orders.
#[derive(Clone, Debug, PartialEq)]
pub struct CohomologyData {
    pub kind: AlgebraKind,
    pub betti: Vec<usize>,
    /// `bases[q][i]` is the i-th representative as a coordinate vector in Λ^q.
    pub bases: Vec<Vec<Vec<ExactScalar>>>,
    /// Weights N_q: each representative is homogeneous of weight N_q under φ_t.
    pub weights: Vec<u32>,
    /// Orders k_q = N_{q+1} − N_q of the differentials.
    pub orders: Vec<u32>,
}

fn form(n: usize, q: usize, terms: &[(&[usize], ExactScalar)]) -> Vec<ExactScalar> {
    let mut v = vec![ExactScalar::zero(); wedge_basis(n, q).len()];
    for (set, c) in terms {
        let idx: Vec<usize> = set.iter().map(|i| i - 1).collect();
        let k = wedge_index(n, &idx);
        v[k] = &v[k] + c;
    }
    v
}

/// Representatives of the pinned class table, before any metric adjustment.
/// Indices in the table are 1-based (χ¹…χⁿ).
pub fn pinned_representatives(l: &GradedLieAlgebra) -> Vec<Vec<Vec<ExactScalar>>> {
    let one = ExactScalar::one;
    let r2 = || ExactScalar::surd(Q::zero(), qf(1, 2)); // 1/√2
    match l.kind {
        AlgebraKind::G235 => {
            let n = 5;
            vec![
                vec![form(n, 0, &[(&[], one())])],
                vec![form(n, 1, &[(&[1], one())]), form(n, 1, &[(&[2], one())])],
                vec![
                    form(n, 2, &[(&[1, 4], one())]),
                    form(n, 2, &[(&[1, 5], r2()), (&[2, 4], r2())]),
                    form(n, 2, &[(&[2, 5], one())]),
                ],
                vec![
                    form(n, 3, &[(&[1, 3, 4], one())]),
                    form(n, 3, &[(&[1, 3, 5], r2()), (&[2, 3, 4], r2())]),
                    form(n, 3, &[(&[2, 3, 5], one())]),
                ],
                vec![form(n, 4, &[(&[1, 3, 4, 5], one())]), form(n, 4, &[(&[2, 3, 4, 5], one())])],
                vec![form(n, 5, &[(&[1, 2, 3, 4, 5], one())])],
            ]
        }
        AlgebraKind::Heisenberg => {
            let n = 3;
            vec![
                vec![form(n, 0, &[(&[], one())])],
                vec![form(n, 1, &[(&[1], one())]), form(n, 1, &[(&[2], one())])],
                vec![form(n, 2, &[(&[1, 3], one())]), form(n, 2, &[(&[2, 3], one())])],
                vec![form(n, 3, &[(&[1, 2, 3], one())])],
            ]
        }
        AlgebraKind::Abelian(n) => (0..=n)
            .map(|q| {
                let dim = wedge_basis(n, q).len();
                (0..dim)
                    .map(|i| {
                        let mut v = vec![ExactScalar::zero(); dim];
                        v[i] = one();
                        v
                    })
                    .collect()
            })
            .collect(),
    }
}

/// Weight of a form if homogeneous.
pub fn form_weight(l: &GradedLieAlgebra, q: usize, v: &[ExactScalar]) -> Option<u32> {
    let basis = wedge_basis(l.dim(), q);
    let mut w = None;
    for (set, c) in basis.iter().zip(v) {
        if c.is_zero() {
            continue;
        }
        let ws: u32 = set.iter().map(|&i| l.weight(i)).sum();
        match w {
            None => w = Some(ws),
            Some(x) if x != ws => return None,
            _ => {}
        }
    }
    w
}

impl CohomologyData {
    pub fn from_representatives(l: &GradedLieAlgebra, bases: Vec<Vec<Vec<ExactScalar>>>) -> Result<Self> {
        let betti: Vec<usize> = bases.iter().map(|b| b.len()).collect();
        let mut weights = Vec::new();
        for (q, b) in bases.iter().enumerate() {
            let ws: Vec<Option<u32>> = b.iter().map(|v| form_weight(l, q, v)).collect();
            let w = ws[0].ok_or_else(|| Error::InvalidArgument(format!("degree {q} representative not homogeneous")))?;
            if ws.iter().any(|x| *x != Some(w)) {
                return Err(Error::InvalidArgument(format!("degree {q} representatives of mixed weight")));
            }
            weights.push(w);
        }
        let orders = weights.windows(2).map(|w| w[1] - w[0]).collect();
        Ok(Self { kind: l.kind, betti, bases, weights, orders })
    }

    /// Representatives as columns of a matrix in the wedge basis.
    pub fn basis_matrix(&self, n: usize, q: usize) -> ExactMatrix {
        ExactMatrix::from_columns(wedge_basis(n, q).len(), &self.bases[q])
    }
}

/// Checks that the representatives are closed and project to a basis of ker ∂ / im ∂.
pub fn check_representatives(l: &GradedLieAlgebra, data: &CohomologyData) -> Result<()> {
    let n = l.dim();
    let betti = betti_numbers(l)?;
    if betti != data.betti {
        return Err(Error::InvalidArgument(format!("Betti numbers {:?} vs chosen {:?}", betti, data.betti)));
    }
    for q in 0..=n {
        let d = chevalley_eilenberg(l, q)?;
        let b = data.basis_matrix(n, q);
        if !d.mul(&b).is_zero() {
            return Err(Error::InvalidArgument(format!("degree {q} representative not closed")));
        }
        if q > 0 {
            let img = chevalley_eilenberg(l, q - 1)?;
            let r_img = img.rank();
            if img.hstack(&b).rank() != r_img + betti[q] {
                return Err(Error::InvalidArgument(format!("degree {q} representatives not independent mod exact forms")));
            }
        } else if b.rank() != betti[0] {
            return Err(Error::InvalidArgument("degree 0 representative".into()));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded_lie::{builtin_235, builtin_abelian, builtin_heisenberg};
    use crate::scalar::q;

    #[test]
    fn d_of_one_forms() {
        let g = builtin_235();
        let d = chevalley_eilenberg(&g, 1).unwrap();
        let row = |set: &[usize]| wedge_index(5, set);
        assert_eq!(*d.get(row(&[0, 1]), 2), ExactScalar::int(-1));
        assert_eq!(*d.get(row(&[0, 2]), 3), ExactScalar::int(-1));
        assert_eq!(*d.get(row(&[1, 2]), 4), ExactScalar::int(-1));
        assert!(d.column(0).iter().all(|x| x.is_zero()));
        assert!(d.column(1).iter().all(|x| x.is_zero()));
    }

    #[test]
    fn d_squared_zero() {
        for l in [builtin_235(), builtin_heisenberg(), builtin_abelian(4).unwrap()] {
            for qq in 0..l.dim() {
                let a = chevalley_eilenberg(&l, qq).unwrap();
                let b = chevalley_eilenberg(&l, qq + 1).unwrap();
                assert!(b.mul(&a).is_zero(), "{} q={qq}", l.name);
            }
        }
    }

    #[test]
    fn betti() {
        assert_eq!(betti_numbers(&builtin_235()).unwrap(), vec![1, 2, 3, 3, 2, 1]);
        assert_eq!(betti_numbers(&builtin_heisenberg()).unwrap(), vec![1, 2, 2, 1]);
        assert_eq!(betti_numbers(&builtin_abelian(3).unwrap()).unwrap(), vec![1, 3, 3, 1]);
    }

    #[test]
    fn pinned_tables_are_valid() {
        for l in [builtin_235(), builtin_heisenberg(), builtin_abelian(3).unwrap()] {
            let data = CohomologyData::from_representatives(&l, pinned_representatives(&l)).unwrap();
            check_representatives(&l, &data).unwrap();
        }
        let g = builtin_235();
        let data = CohomologyData::from_representatives(&g, pinned_representatives(&g)).unwrap();
        assert_eq!(data.weights, vec![0, 1, 4, 6, 9, 10]);
        assert_eq!(data.orders, vec![1, 3, 2, 3, 1]);
        let _ = q(0);
    }

    #[test]
    fn sign_sorting() {
        let mut v = vec![2, 0, 1];
        assert_eq!(sort_with_sign(&mut v), 1);
        assert_eq!(v, vec![0, 1, 2]);
        let mut w = vec![1, 0];
        assert_eq!(sort_with_sign(&mut w), -1);
        let mut z = vec![1, 1];
        assert_eq!(sort_with_sign(&mut z), 0);
    }
}
