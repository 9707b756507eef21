use crate::coupled::ml::SigmoidSpec;
use crate::error::{Error, Result};
use crate::models::hr::{HRParams, HindmarshRose};
use crate::system::ModelSystem;

/// Pairwise coupling kernel Gamma(v_i, v_j).
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HrKernel {
    /// Gamma = v_j - v_i (electrical). Antisymmetric, zero on the
    /// synchronization manifold.
    Diffusive,
    /// Gamma = logistic presynaptic gate on v_j (chemical-style).
    Sigmoidal { theta: f64, slope: f64 },
}

/// Per-cell gate sigma(v_i) multiplying that cell's whole coupling sum.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HrGate {
    /// sigma = 1.
    Uniform,
    Sigmoid { theta: f64, slope: f64 },
}

/// N Hindmarsh-Rose cells on a weighted directed graph. Cell i's voltage
/// equation is the isolated one minus
///
///   g_s sigma(v_i) * sum_j C[i][j] Gamma(v_i, v_j)
///
/// Note the leading minus: with the diffusive kernel a *negative* g_s pulls
/// voltages together and a positive one pushes them apart. The catalog
/// documents this sign convention.
pub struct HrNetwork {
    cell: HindmarshRose,
    g_s: f64,
    sigma: HrGate,
    kernel: HrKernel,
    weights: Vec<Vec<f64>>,
    /// Nonzero columns per row, precomputed so zeroed edges cost nothing and
    /// contribute nothing (bitwise) to the derivative.
    edges: Vec<Vec<usize>>,
}

#[derive(Clone, Debug)]
pub struct HrNetworkParams {
    pub cell: HRParams,
    pub g_s: f64,
    pub sigma: HrGate,
    pub kernel: HrKernel,
    /// Square coupling matrix with zero diagonal; row i weights the inputs
    /// of cell i.
    pub coupling: Vec<Vec<f64>>,
}

impl HrNetwork {
    pub fn new(params: HrNetworkParams) -> Result<Self> {
        params.cell.validate()?;
        if !params.g_s.is_finite() {
            return Err(Error::InvalidGain(params.g_s));
        }
        if let HrKernel::Sigmoidal { theta, slope } = params.kernel {
            SigmoidSpec { theta, slope }.validate()?;
        }
        if let HrGate::Sigmoid { theta, slope } = params.sigma {
            SigmoidSpec { theta, slope }.validate()?;
        }
        let n = params.coupling.len();
        if n == 0 {
            return Err(Error::InvalidConfig("network needs at least one cell".into()));
        }
        for row in &params.coupling {
            if row.len() != n {
                return Err(Error::TopologyMismatch {
                    rows: n,
                    cols: row.len(),
                    cells: n,
                });
            }
        }
        let mut edges = Vec::with_capacity(n);
        for (i, row) in params.coupling.iter().enumerate() {
            let mut cols = Vec::new();
            for (j, &w) in row.iter().enumerate() {
                if !w.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "coupling weight [{i}][{j}] must be finite, got {w}"
                    )));
                }
                if i == j && w != 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "coupling matrix must have a zero diagonal, found [{i}][{i}] = {w}"
                    )));
                }
                if w != 0.0 {
                    cols.push(j);
                }
            }
            edges.push(cols);
        }
        Ok(Self {
            cell: HindmarshRose { params: params.cell },
            g_s: params.g_s,
            sigma: params.sigma,
            kernel: params.kernel,
            weights: params.coupling,
            edges,
        })
    }

    pub fn cells(&self) -> usize {
        self.weights.len()
    }

    fn gamma(&self, v_i: f64, v_j: f64) -> f64 {
        match self.kernel {
            HrKernel::Diffusive => v_j - v_i,
            HrKernel::Sigmoidal { theta, slope } => SigmoidSpec { theta, slope }.apply(v_j),
        }
    }

    fn gate(&self, v_i: f64) -> f64 {
        match self.sigma {
            HrGate::Uniform => 1.0,
            HrGate::Sigmoid { theta, slope } => SigmoidSpec { theta, slope }.apply(v_i),
        }
    }
}

impl ModelSystem for HrNetwork {
    fn dimension(&self) -> usize {
        3 * self.cells()
    }

    fn labels(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(self.dimension());
        for i in 1..=self.cells() {
            out.push(format!("v_{i}"));
            out.push(format!("u_{i}"));
            out.push(format!("w_{i}"));
        }
        out
    }

    fn rhs(&self, t: f64, s: &[f64], input: f64, out: &mut [f64]) {
        let n = self.cells();
        for i in 0..n {
            let cell_state = &s[3 * i..3 * i + 3];
            self.cell
                .rhs(t, cell_state, input, &mut out[3 * i..3 * i + 3]);
            if self.g_s != 0.0 && !self.edges[i].is_empty() {
                let v_i = cell_state[0];
                // fixed ascending-j summation order keeps results
                // independent of any parallel caller
                let mut sum = 0.0;
                for &j in &self.edges[i] {
                    sum += self.weights[i][j] * self.gamma(v_i, s[3 * j]);
                }
                out[3 * i] -= self.g_s * self.gate(v_i) * sum;
            }
        }
    }

    fn voltage_index(&self) -> usize {
        0
    }
}

/// Parses a whitespace-separated matrix: one row per line, `#` starts a
/// comment, blank lines are skipped. Squareness is checked at network
/// construction, not here.
pub fn parse_matrix(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let data = line.split('#').next().unwrap_or("").trim();
        if data.is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for tok in data.split_whitespace() {
            let w: f64 = tok.parse().map_err(|_| {
                Error::InvalidInput(format!(
                    "matrix line {}: '{tok}' is not a number",
                    lineno + 1
                ))
            })?;
            row.push(w);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::InvalidInput("matrix file contains no rows".into()));
    }
    Ok(rows)
}
