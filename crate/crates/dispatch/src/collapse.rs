//! Recovering the co-state pair from two observed classes, and any other
//! class from the pair.

use serde::Serialize;
use thiserror::Error;

use crate::costfn::CostError;
use crate::scenario::LoadClass;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CollapseError {
    #[error("classes {a} and {b} have equal leakage rates; the pair does not determine the co-state")]
    SingularPair { a: String, b: String },
    #[error("trajectories have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error(transparent)]
    Cost(#[from] CostError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reconstruction {
    /// Values at nodes `first_node..`.
    pub lambda: Vec<f64>,
    pub dlambda: Vec<f64>,
    pub first_node: usize,
    pub sources: (String, String),
    /// 2-norm condition number of [[alpha_a, -1], [alpha_b, -1]].
    pub condition: f64,
}

fn condition_number(aa: f64, ab: f64) -> f64 {
    // singular values of a 2x2 matrix from its Frobenius norm and determinant
    let fro2 = aa * aa + ab * ab + 2.0;
    let det = (ab - aa).abs();
    let disc = (fro2 * fro2 - 4.0 * det * det).max(0.0).sqrt();
    let smax = ((fro2 + disc) / 2.0).sqrt();
    let smin = ((fro2 - disc) / 2.0).max(0.0).sqrt();
    if smin > 0.0 {
        smax / smin
    } else {
        f64::INFINITY
    }
}

/// Solves alpha_a lambda - dlambda = c_a'(x_a), alpha_b lambda - dlambda = c_b'(x_b)
/// at every node from 1 on (node 0 precedes the initial jump).
pub fn reconstruct(
    x_a: &[f64],
    x_b: &[f64],
    class_a: &LoadClass,
    class_b: &LoadClass,
) -> Result<Reconstruction, CollapseError> {
    if x_a.len() != x_b.len() {
        return Err(CollapseError::LengthMismatch(x_a.len(), x_b.len()));
    }
    let (aa, ab) = (class_a.alpha, class_b.alpha);
    let det = ab - aa;
    if det.abs() <= 1e-12 {
        return Err(CollapseError::SingularPair {
            a: class_a.name.clone(),
            b: class_b.name.clone(),
        });
    }
    let first = 1.min(x_a.len());
    let mut lambda = Vec::with_capacity(x_a.len());
    let mut dlambda = Vec::with_capacity(x_a.len());
    for k in first..x_a.len() {
        let ma = class_a.cost.d1(x_a[k]);
        let mb = class_b.cost.d1(x_b[k]);
        let l = (ma - mb) / (aa - ab);
        lambda.push(l);
        dlambda.push(aa * l - ma);
    }
    Ok(Reconstruction {
        lambda,
        dlambda,
        first_node: first,
        sources: (class_a.name.clone(), class_b.name.clone()),
        condition: condition_number(aa, ab),
    })
}

/// x_i = (c_i')^{-1}(alpha_i lambda - dlambda) at each reconstructed node.
pub fn recover_class(rec: &Reconstruction, class: &LoadClass) -> Result<Vec<f64>, CollapseError> {
    rec.lambda
        .iter()
        .zip(&rec.dlambda)
        .map(|(l, dl)| class.cost.inv_d1(class.alpha * l - dl).map_err(CollapseError::from))
        .collect()
}
