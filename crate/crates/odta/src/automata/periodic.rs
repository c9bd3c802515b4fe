use crate::error::{Error, Result};

/// One linear set ū + ℕ·v̄₁ + ⋯ + ℕ·v̄_ℓ where v̄_i is zero outside coordinate i.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicTuple {
    pub base: Vec<u64>,
    /// periods[i] is the i-th coordinate of v̄_i.
    pub periods: Vec<u64>,
}

/// Finite union of periodic languages, described by their Parikh images.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicLanguageUnion {
    dim: usize,
    tuples: Vec<PeriodicTuple>,
}

impl PeriodicLanguageUnion {
    pub fn new(dim: usize) -> Self {
        PeriodicLanguageUnion { dim, tuples: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tuples(&self) -> &[PeriodicTuple] {
        &self.tuples
    }

    /// Adds (ū, v̄₁, …, v̄_ℓ); every v̄_i must be an i-base.
    pub fn add(&mut self, base: Vec<u64>, bases: Vec<Vec<u64>>) -> Result<()> {
        if base.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: base.len() });
        }
        if bases.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: bases.len() });
        }
        let mut periods = Vec::with_capacity(self.dim);
        for (i, v) in bases.iter().enumerate() {
            if v.len() != self.dim {
                return Err(Error::DimensionMismatch { expected: self.dim, got: v.len() });
            }
            if v.iter().enumerate().any(|(j, &x)| j != i && x != 0) {
                return Err(Error::Invalid(format!("vector {i} is not an {i}-base")));
            }
            periods.push(v[i]);
        }
        self.tuples.push(PeriodicTuple { base, periods });
        Ok(())
    }

    pub fn add_periods(&mut self, base: Vec<u64>, periods: Vec<u64>) -> Result<()> {
        let bases = (0..periods.len())
            .map(|i| (0..periods.len()).map(|j| if i == j { periods[i] } else { 0 }).collect())
            .collect();
        self.add(base, bases)
    }

    pub fn contains(&self, v: &[u64]) -> Result<bool> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: v.len() });
        }
        Ok(self.tuples.iter().any(|t| {
            v.iter().zip(&t.base).zip(&t.periods).all(|((&x, &u), &p)| {
                x >= u && if p == 0 { x == u } else { (x - u) % p == 0 }
            })
        }))
    }
}
