//! Dense LU of the basis matrix with product-form (eta) updates.

/// Pivot magnitude below which a basis column is declared dependent.
const SINGULAR_TOL: f64 = 1e-11;

struct Eta {
    pos: usize,
    pivot: f64,
    entries: Vec<(usize, f64)>,
}

pub(crate) struct Singular {
    /// Basis positions whose column had no acceptable pivot.
    pub positions: Vec<usize>,
    /// Rows left without a pivot, one per entry of `positions`.
    pub rows: Vec<usize>,
}

pub(crate) struct BasisFactor {
    m: usize,
    /// Row-major working matrix holding multipliers (left of the pivot) and `U`.
    lu: Vec<f64>,
    /// `order[t]` is the original row used as pivot for basis position `t`.
    order: Vec<usize>,
    etas: Vec<Eta>,
}

impl BasisFactor {
    /// Factorizes the `m x m` matrix given as `columns[t] = [(row, value)]`.
    pub fn new(m: usize, columns: &[Vec<(usize, f64)>]) -> Result<Self, Singular> {
        debug_assert_eq!(columns.len(), m);
        let mut w = vec![0.0; m * m];
        for (t, col) in columns.iter().enumerate() {
            for &(i, v) in col {
                w[i * m + t] += v;
            }
        }
        let mut used = vec![false; m];
        let mut order = vec![usize::MAX; m];
        let mut singular = Vec::new();
        for t in 0..m {
            let scale = (0..m).fold(
                0.0_f64,
                |acc, i| if used[i] { acc } else { acc.max(w[i * m + t].abs()) },
            );
            let mut best = None;
            let mut best_val = 0.0;
            for i in 0..m {
                if !used[i] && w[i * m + t].abs() > best_val {
                    best_val = w[i * m + t].abs();
                    best = Some(i);
                }
            }
            let p = match best {
                Some(p) if best_val > SINGULAR_TOL * scale.max(1.0) => p,
                _ => {
                    singular.push(t);
                    continue;
                }
            };
            used[p] = true;
            order[t] = p;
            let piv = w[p * m + t];
            for i in 0..m {
                if used[i] {
                    continue;
                }
                let mult = w[i * m + t] / piv;
                if mult == 0.0 {
                    continue;
                }
                w[i * m + t] = mult;
                for k in t + 1..m {
                    let upk = w[p * m + k];
                    if upk != 0.0 {
                        w[i * m + k] -= mult * upk;
                    }
                }
            }
        }
        if !singular.is_empty() {
            let rows = (0..m).filter(|i| !used[*i]).collect();
            return Err(Singular {
                positions: singular,
                rows,
            });
        }
        Ok(BasisFactor {
            m,
            lu: w,
            order,
            etas: Vec::new(),
        })
    }

    #[cfg(test)]
    pub fn num_etas(&self) -> usize {
        self.etas.len()
    }

    /// Solves `B x = rhs` (rhs indexed by row, result by basis position).
    pub fn ftran(&self, rhs: &[f64]) -> Vec<f64> {
        let m = self.m;
        let mut z = vec![0.0; m];
        for t in 0..m {
            let row = self.order[t];
            let mut v = rhs[row];
            let base = row * m;
            for (j, zj) in z.iter().enumerate().take(t) {
                v -= self.lu[base + j] * zj;
            }
            z[t] = v;
        }
        for t in (0..m).rev() {
            let base = self.order[t] * m;
            let mut v = z[t];
            for k in t + 1..m {
                v -= self.lu[base + k] * z[k];
            }
            z[t] = v / self.lu[base + t];
        }
        for eta in &self.etas {
            let xr = z[eta.pos] / eta.pivot;
            z[eta.pos] = xr;
            if xr != 0.0 {
                for &(i, a) in &eta.entries {
                    z[i] -= a * xr;
                }
            }
        }
        z
    }

    /// Solves `B^T y = rhs` (rhs indexed by basis position, result by row).
    pub fn btran(&self, rhs: &[f64]) -> Vec<f64> {
        let m = self.m;
        let mut c = rhs.to_vec();
        for eta in self.etas.iter().rev() {
            let mut v = c[eta.pos];
            for &(i, a) in &eta.entries {
                v -= a * c[i];
            }
            c[eta.pos] = v / eta.pivot;
        }
        // U^T w = c
        let mut w = vec![0.0; m];
        for t in 0..m {
            let mut v = c[t];
            for k in 0..t {
                v -= self.lu[self.order[k] * m + t] * w[k];
            }
            w[t] = v / self.lu[self.order[t] * m + t];
        }
        // L^T v = w
        for t in (0..m).rev() {
            let mut v = w[t];
            for j in t + 1..m {
                v -= self.lu[self.order[j] * m + t] * w[j];
            }
            w[t] = v;
        }
        let mut y = vec![0.0; m];
        for t in 0..m {
            y[self.order[t]] = w[t];
        }
        y
    }

    /// Records the replacement of the column at `pos` by a column whose FTRAN image is `alpha`.
    pub fn update(&mut self, pos: usize, alpha: &[f64]) {
        let entries = alpha
            .iter()
            .enumerate()
            .filter(|(i, a)| *i != pos && a.abs() > 1e-14)
            .map(|(i, a)| (i, *a))
            .collect();
        self.etas.push(Eta {
            pos,
            pivot: alpha[pos],
            entries,
        });
    }
}
