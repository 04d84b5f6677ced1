//! Linear secret sharing over access trees.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::wire::{Reader, Writer};

use super::formula::{PolicyFormula, PolicyNode};

/// A share-generating matrix `A` (`ℓ x n` over `Z_p`) with its row labels `δ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccessPolicy<S> {
    matrix: Vec<Vec<S>>,
    labels: Vec<String>,
}

/// One share per matrix row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShareVector<S>(pub Vec<S>);

/// Rows `I` and coefficients `c` with `Σ c_x A_x = (1, 0, …, 0)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reconstruction<S> {
    pub rows: Vec<usize>,
    pub coefficients: Vec<S>,
}

impl<S: Scalar> Reconstruction<S> {
    /// `Σ c_x · shares[x]`.
    pub fn combine(&self, shares: &ShareVector<S>) -> S {
        self.rows
            .iter()
            .zip(&self.coefficients)
            .fold(S::zero(), |acc, (&row, &c)| acc + c * shares.0[row])
    }
}

/// Labels the access tree top-down and returns the leaf vectors in
/// left-to-right order. Entries are always -1, 0 or 1.
fn label_tree(root: &PolicyNode) -> Vec<(Vec<i8>, String)> {
    fn walk(node: &PolicyNode, label: Vec<i8>, counter: &mut usize, out: &mut Vec<(Vec<i8>, String)>) {
        match node {
            PolicyNode::Leaf(attr) => out.push((label, attr.clone())),
            PolicyNode::Or(left, right) => {
                walk(left, label.clone(), counter, out);
                walk(right, label, counter, out);
            }
            PolicyNode::And(left, right) => {
                let mut padded = label;
                padded.resize(*counter, 0);
                let mut left_label = padded;
                left_label.push(1);
                let mut right_label = vec![0; *counter];
                right_label.push(-1);
                *counter += 1;
                walk(left, left_label, counter, out);
                walk(right, right_label, counter, out);
            }
        }
    }

    let mut counter = 1;
    let mut leaves = Vec::new();
    walk(root, vec![1], &mut counter, &mut leaves);
    leaves
}

/// Compiles a formula into its LSS matrix. The root is labelled `(1)`, OR
/// children inherit their parent's vector, and an AND gives its left child
/// `v|1` and its right child `(0,…,0)|-1`. Leaf vectors are zero-padded to a
/// common width.
pub fn compile_lss<S: Scalar>(formula: &PolicyFormula) -> AccessPolicy<S> {
    let leaves = label_tree(&formula.root);
    let width = leaves.iter().map(|(v, _)| v.len()).max().unwrap_or(1);
    let (matrix, labels) = leaves
        .into_iter()
        .map(|(v, attr)| {
            let mut row: Vec<S> = v.into_iter().map(|e| S::from_i64(e as i64)).collect();
            row.resize(width, S::zero());
            (row, attr)
        })
        .unzip();
    AccessPolicy { matrix, labels }
}

impl<S: Scalar> AccessPolicy<S> {
    /// Builds a policy from an explicit matrix. All rows must share one
    /// nonzero width and there must be one label per row.
    pub fn from_parts(matrix: Vec<Vec<S>>, labels: Vec<String>) -> Result<Self> {
        if matrix.is_empty() {
            return Err(Error::EmptyPolicy);
        }
        if labels.len() != matrix.len() {
            return Err(Error::DimensionMismatch {
                expected: matrix.len(),
                actual: labels.len(),
            });
        }
        let width = matrix[0].len();
        if width == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                actual: 0,
            });
        }
        if let Some(row) = matrix.iter().find(|r| r.len() != width) {
            return Err(Error::DimensionMismatch {
                expected: width,
                actual: row.len(),
            });
        }
        Ok(AccessPolicy { matrix, labels })
    }

    /// `ℓ`
    pub fn rows(&self) -> usize {
        self.matrix.len()
    }

    /// `n`
    pub fn columns(&self) -> usize {
        self.matrix[0].len()
    }

    pub fn matrix(&self) -> &[Vec<S>] {
        &self.matrix
    }

    pub fn row(&self, x: usize) -> &[S] {
        &self.matrix[x]
    }

    /// `δ(x)`
    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// `A · (first, rest…)ᵀ`.
    fn share(&self, first: S, rest: &[S]) -> Result<ShareVector<S>> {
        let expected = self.columns() - 1;
        if rest.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: rest.len(),
            });
        }
        let shares = self
            .matrix
            .iter()
            .map(|row| {
                row[1..]
                    .iter()
                    .zip(rest)
                    .fold(row[0] * first, |acc, (&a, &v)| acc + a * v)
            })
            .collect();
        Ok(ShareVector(shares))
    }

    /// Shares `secret` with the vector `(secret, randomness…)`;
    /// `randomness` has length `n - 1`.
    pub fn share_secret(&self, secret: S, randomness: &[S]) -> Result<ShareVector<S>> {
        self.share(secret, randomness)
    }

    /// Shares of zero with the vector `(0, randomness…)`.
    pub fn share_zero(&self, randomness: &[S]) -> Result<ShareVector<S>> {
        self.share(S::zero(), randomness)
    }

    /// Finds coefficients over the rows whose labels are in `owned`, or
    /// `None` when those rows do not span the target vector.
    pub fn reconstruction_coefficients(&self, owned: &HashSet<String>) -> Option<Reconstruction<S>> {
        let candidates: Vec<usize> = (0..self.rows())
            .filter(|&x| owned.contains(&self.labels[x]))
            .collect();
        self.reconstruct_from_rows(&candidates)
    }

    /// Gaussian elimination over the candidate rows, taken in the given
    /// order. Rows are added to an echelon basis one at a time and the
    /// search stops as soon as `(1, 0, …, 0)` is in their span, so earlier
    /// rows are always preferred. Rows whose final coefficient is zero are
    /// dropped from the result.
    pub fn reconstruct_from_rows(&self, candidates: &[usize]) -> Option<Reconstruction<S>> {
        let n = self.columns();
        let l = self.rows();
        // (reduced vector, pivot column, dense combination of original rows)
        let mut basis: Vec<(Vec<S>, usize, Vec<S>)> = Vec::new();

        let reduce = |basis: &[(Vec<S>, usize, Vec<S>)], mut v: Vec<S>, mut combo: Vec<S>| {
            for (b, pivot, b_combo) in basis {
                if v[*pivot].is_zero() {
                    continue;
                }
                let factor = v[*pivot] * b[*pivot].inverse().expect("pivot is nonzero");
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi = *vi - factor * *bi;
                }
                for (ci, bi) in combo.iter_mut().zip(b_combo) {
                    *ci = *ci - factor * *bi;
                }
            }
            (v, combo)
        };

        let mut target = vec![S::zero(); n];
        target[0] = S::one();

        for &x in candidates {
            let mut unit = vec![S::zero(); l];
            unit[x] = S::one();
            let (v, combo) = reduce(&basis, self.matrix[x].clone(), unit);
            let Some(pivot) = v.iter().position(|e| !e.is_zero()) else {
                continue;
            };
            basis.push((v, pivot, combo));

            let (residue, combo) = reduce(&basis, target.clone(), vec![S::zero(); l]);
            if residue.iter().all(|e| e.is_zero()) {
                // target + combo·A = 0
                let (rows, coefficients) = combo
                    .into_iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(row, c)| (row, -c))
                    .unzip();
                return Some(Reconstruction { rows, coefficients });
            }
        }
        None
    }

    /// `ℓ`, `n`, row-major fixed-width scalars, then the row labels.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        self.write(&mut w);
        w.into_bytes()
    }

    pub fn write(&self, w: &mut Writer) {
        w.u32(self.rows() as u32).u32(self.columns() as u32);
        for row in &self.matrix {
            for s in row {
                w.scalar(s);
            }
        }
        for label in &self.labels {
            w.str(label);
        }
    }

    pub fn read(r: &mut Reader<'_>) -> Result<Self> {
        let rows = r.u32()? as usize;
        let cols = r.u32()? as usize;
        if rows == 0 || cols == 0 || cols > rows.max(1) * 64 {
            return Err(Error::Decode(format!("implausible policy dimensions {rows}x{cols}")));
        }
        let mut matrix = Vec::with_capacity(rows.min(4096));
        for _ in 0..rows {
            let row = (0..cols).map(|_| r.scalar()).collect::<Result<Vec<S>>>()?;
            matrix.push(row);
        }
        let labels = (0..rows).map(|_| r.str()).collect::<Result<Vec<_>>>()?;
        Self::from_parts(matrix, labels)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let policy = Self::read(&mut r)?;
        r.finish()?;
        Ok(policy)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Zp;
    use crate::policy::parse_policy;
    use num_traits::{One, Zero};

    type F = Zp<1009>;

    fn ints(rows: &[&[i64]]) -> Vec<Vec<F>> {
        rows.iter()
            .map(|r| r.iter().map(|&e| F::from_i64(e)).collect())
            .collect()
    }

    fn owned(attrs: &[&str]) -> HashSet<String> {
        attrs.iter().map(|s| s.to_string()).collect()
    }

    fn worked_example() -> AccessPolicy<F> {
        compile_lss(&parse_policy("W AND (X OR (Y AND Z))").unwrap())
    }

    #[test]
    fn compiles_worked_example() {
        let p = worked_example();
        assert_eq!(p.matrix(), ints(&[&[1, 1, 0], &[0, -1, 0], &[0, -1, 1], &[0, 0, -1]]));
        assert_eq!(p.labels(), ["W", "X", "Y", "Z"]);
        assert_eq!(p.row(1)[1].value(), 1008);
    }

    #[test]
    fn compiles_trivial_shapes() {
        let leaf: AccessPolicy<F> = compile_lss(&parse_policy("W").unwrap());
        assert_eq!(leaf.matrix(), ints(&[&[1]]));
        let or: AccessPolicy<F> = compile_lss(&parse_policy("W OR X").unwrap());
        assert_eq!(or.matrix(), ints(&[&[1], &[1]]));
        for single in ["W", "X"] {
            let r = or.reconstruction_coefficients(&owned(&[single])).unwrap();
            assert_eq!(r.coefficients, vec![F::one()]);
        }
    }

    #[test]
    fn shares_worked_example() {
        let p = worked_example();
        let lambda = p.share_secret(F::from_u64(65), &[F::from_u64(3), F::from_u64(4)]).unwrap();
        assert_eq!(lambda.0, ints(&[&[68], &[-3], &[1], &[-4]]).concat());
        let zero = p.share_zero(&[F::one(), F::one()]).unwrap();
        assert_eq!(zero.0, ints(&[&[1], &[-1], &[0], &[-1]]).concat());
        assert_eq!(
            p.share_zero(&[F::zero(), F::zero()]).unwrap().0,
            vec![F::zero(); 4]
        );
        assert_eq!(
            p.share_secret(F::one(), &[F::one()]),
            Err(Error::DimensionMismatch { expected: 2, actual: 1 })
        );
    }

    #[test]
    fn reconstructs_worked_example() {
        let p = worked_example();
        let lambda = p.share_secret(F::from_u64(65), &[F::from_u64(3), F::from_u64(4)]).unwrap();

        let wx = p.reconstruction_coefficients(&owned(&["W", "X"])).unwrap();
        assert_eq!(wx.rows, vec![0, 1]);
        assert_eq!(wx.coefficients, vec![F::one(); 2]);
        assert_eq!(wx.combine(&lambda), F::from_u64(65));

        let wyz = p.reconstruction_coefficients(&owned(&["W", "Y", "Z"])).unwrap();
        assert_eq!(wyz.rows, vec![0, 2, 3]);
        assert_eq!(wyz.coefficients, vec![F::one(); 3]);
        assert_eq!(wyz.combine(&lambda), F::from_u64(65));

        assert!(p.reconstruction_coefficients(&owned(&["X", "Y"])).is_none());
        assert!(p.reconstruction_coefficients(&owned(&["W", "Y"])).is_none());
        assert!(p.reconstruction_coefficients(&owned(&[])).is_none());

        // the earliest satisfying rows win
        let all = p.reconstruction_coefficients(&owned(&["W", "X", "Y", "Z"])).unwrap();
        assert_eq!(all.rows, vec![0, 1]);
    }

    #[test]
    fn duplicate_labels_are_independent_rows() {
        let p: AccessPolicy<F> = compile_lss(&parse_policy("(A AND B) OR (A AND C)").unwrap());
        assert_eq!(p.labels(), ["A", "B", "A", "C"]);
        let r = p.reconstruction_coefficients(&owned(&["A", "C"])).unwrap();
        assert_eq!(r.rows, vec![2, 3]);
    }

    #[test]
    fn general_solver_handles_non_unit_coefficients() {
        // rows (2, 0) and (0, 1) over Z_1009: c = (2^-1)
        let p = AccessPolicy::from_parts(ints(&[&[2, 0], &[0, 1]]), vec!["a".into(), "b".into()]).unwrap();
        let r = p.reconstruction_coefficients(&owned(&["a", "b"])).unwrap();
        assert_eq!(r.rows, vec![0]);
        assert_eq!(r.coefficients, vec![F::from_u64(2).inverse().unwrap()]);
    }

    #[test]
    fn bytes_roundtrip_and_layout() {
        let p = worked_example();
        let bytes = p.to_bytes();
        assert_eq!(&bytes[..8], &[0, 0, 0, 4, 0, 0, 0, 3]);
        // first row: 1, 1, 0 as two-byte scalars
        assert_eq!(&bytes[8..14], &[0, 1, 0, 1, 0, 0]);
        assert_eq!(AccessPolicy::<F>::from_bytes(&bytes).unwrap(), p);
        assert!(AccessPolicy::<F>::from_bytes(&bytes[..bytes.len() - 1]).is_err());
    }

    #[test]
    fn from_parts_validates_shape() {
        assert!(AccessPolicy::<F>::from_parts(vec![], vec![]).is_err());
        assert!(AccessPolicy::from_parts(ints(&[&[1], &[1, 0]]), vec!["a".into(), "b".into()]).is_err());
        assert!(AccessPolicy::from_parts(ints(&[&[1]]), vec![]).is_err());
    }
}
