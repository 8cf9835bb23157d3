use rand::seq::SliceRandom;
use rand::RngCore;

use super::otp::BlockMatrix;
use super::CryptoError;

/// A bijection on `{0, …, n-1}`; `image[i]` is where row `i` goes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { image: (0..n).collect() }
    }

    pub fn sample<R: RngCore + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut image: Vec<usize> = (0..n).collect();
        image.shuffle(rng);
        Permutation { image }
    }

    pub fn from_image(image: Vec<usize>) -> Result<Self, CryptoError> {
        let mut seen = vec![false; image.len()];
        for &i in &image {
            if i >= image.len() || std::mem::replace(&mut seen[i], true) {
                return Err(CryptoError::NotAPermutation);
            }
        }
        Ok(Permutation { image })
    }

    /// Builds from the conventional one-based notation `(π(1), …, π(n))`.
    pub fn from_one_based(image: &[usize]) -> Result<Self, CryptoError> {
        if image.contains(&0) {
            return Err(CryptoError::NotAPermutation);
        }
        Permutation::from_image(image.iter().map(|&i| i - 1).collect())
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn map(&self, i: usize) -> usize {
        self.image[i]
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.image.len()];
        for (i, &j) in self.image.iter().enumerate() {
            inv[j] = i;
        }
        Permutation { image: inv }
    }

    /// `next ∘ self`: apply `self` first.
    pub fn then(&self, next: &Permutation) -> Permutation {
        Permutation { image: self.image.iter().map(|&i| next.image[i]).collect() }
    }

    /// Row permutation: element `i` moves to position `π(i)`.
    pub fn apply<T: Clone>(&self, items: &[T]) -> Vec<T> {
        assert_eq!(items.len(), self.image.len(), "permutation length mismatch");
        let mut out: Vec<Option<T>> = vec![None; items.len()];
        for (i, item) in items.iter().enumerate() {
            out[self.image[i]] = Some(item.clone());
        }
        out.into_iter().map(|x| x.unwrap()).collect()
    }

    pub fn apply_rows(&self, m: &BlockMatrix) -> BlockMatrix {
        assert_eq!(m.rows(), self.image.len(), "permutation length mismatch");
        let mut out = BlockMatrix::zeros(m.rows(), m.cols());
        for (i, &j) in self.image.iter().enumerate() {
            out.row_mut(j).copy_from_slice(m.row(i));
        }
        out
    }
}
