//! Dense row-major f64 tensor of rank 1..=3.

use ndarray::{ArrayView2, ArrayViewMut2};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Row-major real-valued array carrying activations, parameters and
/// gradients. Rank is 1, 2 or 3; `data.len()` always equals the product
/// of the extents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(shape: &[usize]) -> Self {
        assert!(
            (1..=3).contains(&shape.len()) && shape.iter().all(|&e| e > 0),
            "tensor rank must be 1..=3 with positive extents, got {shape:?}"
        );
        Tensor {
            shape: shape.to_vec(),
            data: vec![0.0; shape.iter().product()],
        }
    }

    pub fn from_vec(shape: &[usize], data: Vec<f64>) -> Result<Self> {
        let expected: usize = shape.iter().product();
        if shape.is_empty() || shape.len() > 3 || shape.contains(&0) || data.len() != expected {
            return Err(Error::ShapeMismatch {
                context: "Tensor::from_vec",
                expected: shape.to_vec(),
                got: vec![data.len()],
            });
        }
        Ok(Tensor {
            shape: shape.to_vec(),
            data,
        })
    }

    /// Rank-1 tensor from a slice.
    pub fn vector(data: &[f64]) -> Self {
        assert!(!data.is_empty());
        Tensor {
            shape: vec![data.len()],
            data: data.to_vec(),
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// View a rank-2 tensor as an ndarray matrix.
    pub fn view2(&self) -> ArrayView2<'_, f64> {
        assert_eq!(self.rank(), 2, "view2 on rank-{} tensor", self.rank());
        ArrayView2::from_shape((self.shape[0], self.shape[1]), &self.data).unwrap()
    }

    pub fn view2_mut(&mut self) -> ArrayViewMut2<'_, f64> {
        assert_eq!(self.rank(), 2);
        ArrayViewMut2::from_shape((self.shape[0], self.shape[1]), &mut self.data).unwrap()
    }

    /// Matrix view of arbitrary (r, c) over the flat data; r*c must equal len.
    pub fn view_as(&self, r: usize, c: usize) -> ArrayView2<'_, f64> {
        assert_eq!(r * c, self.data.len());
        ArrayView2::from_shape((r, c), &self.data).unwrap()
    }

    /// Row `b` of a rank-2 tensor.
    pub fn row(&self, b: usize) -> &[f64] {
        assert_eq!(self.rank(), 2);
        let c = self.shape[1];
        &self.data[b * c..(b + 1) * c]
    }

    pub fn row_mut(&mut self, b: usize) -> &mut [f64] {
        assert_eq!(self.rank(), 2);
        let c = self.shape[1];
        &mut self.data[b * c..(b + 1) * c]
    }

    /// Wrap a single vector as a [1, n] batch of one.
    pub fn into_batch_of_one(mut self) -> Tensor {
        assert_eq!(self.rank(), 1);
        self.shape = vec![1, self.shape[0]];
        self
    }

    /// Element-wise check used throughout the layer tests.
    pub fn approx_eq(&self, other: &Tensor, tol: f64) -> bool {
        self.shape == other.shape
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| (a - b).abs() <= tol)
    }
}
