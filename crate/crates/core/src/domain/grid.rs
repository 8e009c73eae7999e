use super::DomainError;

/// Collocated grid on `[0,1] x T^2`, cross-section period 2.
///
/// Axial nodes `x1 = i h1`, `i = 0..n1`, include both ends. Cross-section
/// nodes are `x = -1 + j h`, `j = 0..n`, so `x = 0` sits at `j = n/2` and
/// `x = 1` is identified with `j = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridSpec {
    pub n1: usize,
    pub n2: usize,
    pub n3: usize,
}

impl GridSpec {
    pub fn new(n1: usize, n2: usize, n3: usize) -> Result<Self, DomainError> {
        if n1 < 9 {
            return Err(DomainError::InvalidGrid(format!("n1 = {n1} must be at least 9")));
        }
        for (name, n) in [("n2", n2), ("n3", n3)] {
            if n < 8 || n % 2 != 0 {
                return Err(DomainError::InvalidGrid(format!("{name} = {n} must be even and at least 8")));
            }
        }
        Ok(Self { n1, n2, n3 })
    }

    /// Grid with every spacing divided by `k`.
    pub fn refined(&self, k: usize) -> Self {
        Self { n1: (self.n1 - 1) * k + 1, n2: self.n2 * k, n3: self.n3 * k }
    }

    pub fn h1(&self) -> f64 {
        1.0 / (self.n1 - 1) as f64
    }
    pub fn h2(&self) -> f64 {
        2.0 / self.n2 as f64
    }
    pub fn h3(&self) -> f64 {
        2.0 / self.n3 as f64
    }
    pub fn spacing(&self, axis: usize) -> f64 {
        match axis {
            0 => self.h1(),
            1 => self.h2(),
            _ => self.h3(),
        }
    }
    pub fn x1(&self, i: usize) -> f64 {
        i as f64 * self.h1()
    }
    pub fn x2(&self, j: usize) -> f64 {
        -1.0 + j as f64 * self.h2()
    }
    pub fn x3(&self, k: usize) -> f64 {
        -1.0 + k as f64 * self.h3()
    }
    pub fn len(&self) -> usize {
        self.n1 * self.n2 * self.n3
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
    pub fn cross_len(&self) -> usize {
        self.n2 * self.n3
    }
    #[inline]
    pub fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n2 + j) * self.n3 + k
    }
    /// `(i, j, k)` of a flat index.
    #[inline]
    pub fn ijk(&self, n: usize) -> (usize, usize, usize) {
        let k = n % self.n3;
        let r = n / self.n3;
        (r / self.n2, r % self.n2, k)
    }
    pub fn cross(&self) -> CrossGrid {
        CrossGrid { n2: self.n2, n3: self.n3 }
    }
    /// Volume weight of one node for discrete L2 norms.
    pub fn cell_volume(&self) -> f64 {
        self.h1() * self.h2() * self.h3()
    }
}

/// The periodic cross-section `T^2` of a `GridSpec`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CrossGrid {
    pub n2: usize,
    pub n3: usize,
}

impl CrossGrid {
    pub fn h2(&self) -> f64 {
        2.0 / self.n2 as f64
    }
    pub fn h3(&self) -> f64 {
        2.0 / self.n3 as f64
    }
    pub fn x2(&self, j: usize) -> f64 {
        -1.0 + j as f64 * self.h2()
    }
    pub fn x3(&self, k: usize) -> f64 {
        -1.0 + k as f64 * self.h3()
    }
    pub fn len(&self) -> usize {
        self.n2 * self.n3
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
    #[inline]
    pub fn idx(&self, j: usize, k: usize) -> usize {
        j * self.n3 + k
    }
    /// Points per direction on the closed quadrant `[0,1]^2`.
    pub fn quadrant_shape(&self) -> (usize, usize) {
        (self.n2 / 2 + 1, self.n3 / 2 + 1)
    }
}

/// Wraps a cross-section coordinate into `[-1, 1)`.
#[inline]
pub fn wrap_periodic(x: f64) -> f64 {
    let y = (x + 1.0).rem_euclid(2.0) - 1.0;
    if y >= 1.0 {
        -1.0
    } else {
        y
    }
}
