//! Complex tridiagonal systems by the Thomas algorithm.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::{Error, Result};

/// `sub[i] x[i-1] + diag[i] x[i] + sup[i] x[i+1] = rhs[i]`, with `sub[0]`
/// and `sup[n-1]` ignored.
pub fn solve(sub: &[Complex64], diag: &[Complex64], sup: &[Complex64], rhs: &[Complex64]) -> Result<Vec<Complex64>> {
    let lu = Factored::new(sub, diag, sup)?;
    let mut x = rhs.to_vec();
    lu.solve_in_place(&mut x)?;
    Ok(x)
}

/// Forward-elimination factors, reusable across right-hand sides.
#[derive(Debug, Clone)]
pub struct Factored {
    sub: Vec<Complex64>,
    sup_scaled: Vec<Complex64>,
    pivot_inv: Vec<Complex64>,
}

impl Factored {
    pub fn new(sub: &[Complex64], diag: &[Complex64], sup: &[Complex64]) -> Result<Self> {
        let n = diag.len();
        if sub.len() != n {
            return Err(Error::SizeMismatch { expected: n, found: sub.len() });
        }
        if sup.len() != n {
            return Err(Error::SizeMismatch { expected: n, found: sup.len() });
        }
        let mut sup_scaled = Vec::with_capacity(n);
        let mut pivot_inv = Vec::with_capacity(n);
        for i in 0..n {
            let pivot = if i == 0 { diag[0] } else { diag[i] - sub[i] * sup_scaled[i - 1] };
            if pivot.norm() == 0.0 || !pivot.is_finite() {
                return Err(Error::InvalidArgument("singular tridiagonal pivot"));
            }
            let inv = pivot.inv();
            pivot_inv.push(inv);
            sup_scaled.push(sup[i] * inv);
        }
        Ok(Self { sub: sub.to_vec(), sup_scaled, pivot_inv })
    }

    pub fn len(&self) -> usize {
        self.pivot_inv.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pivot_inv.is_empty()
    }

    pub fn solve_in_place(&self, x: &mut [Complex64]) -> Result<()> {
        let n = self.len();
        if x.len() != n {
            return Err(Error::SizeMismatch { expected: n, found: x.len() });
        }
        if n == 0 {
            return Ok(());
        }
        x[0] *= self.pivot_inv[0];
        for i in 1..n {
            x[i] = (x[i] - self.sub[i] * x[i - 1]) * self.pivot_inv[i];
        }
        for i in (0..n - 1).rev() {
            x[i] -= self.sup_scaled[i] * x[i + 1];
        }
        Ok(())
    }
}
