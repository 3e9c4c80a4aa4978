//! The four dimension curves of the carpet family as `ε` varies.

use regdim::sponge::{badcarpet_family, CarpetDimensions};

use crate::output::{fmt_f64, Table};
use crate::CliError;

pub const HEADER: [&str; 5] = ["epsilon", "dimreg", "T", "sup_local", "assouad"];

/// Which expression attains the local-dimension supremum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalBranch {
    /// `-log ε / log 3`
    Rare,
    /// the mixed expression along the frequent digit
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub epsilon: f64,
    pub dims: CarpetDimensions,
    pub branch: LocalBranch,
}

/// `steps` equally spaced values from `eps_min` to `eps_max`, both included.
pub fn sweep_epsilon(eps_min: f64, eps_max: f64, steps: usize) -> Result<Vec<SweepRow>, CliError> {
    let bad = |m: String| CliError::Config { key: "sweep-epsilon".into(), message: m };
    if !(eps_min > 0.0 && eps_min < eps_max && eps_max <= 0.5) {
        return Err(bad(format!("need 0 < eps_min < eps_max <= 1/2, got {eps_min}..{eps_max}")));
    }
    if steps < 2 {
        return Err(bad(format!("need at least 2 steps, got {steps}")));
    }
    (0..steps)
        .map(|i| {
            let eps = if i + 1 == steps { eps_max } else { eps_min + (eps_max - eps_min) * i as f64 / (steps - 1) as f64 };
            let dims = badcarpet_family(eps)?;
            let rare = -eps.ln() / 3f64.ln();
            let branch = if dims.sup_local == rare { LocalBranch::Rare } else { LocalBranch::Mixed };
            Ok(SweepRow { epsilon: eps, dims, branch })
        })
        .collect()
}

/// Consecutive `ε` values between which the supremum changes branch.
pub fn branch_switches(rows: &[SweepRow]) -> Vec<(f64, f64)> {
    rows.windows(2).filter(|w| w[0].branch != w[1].branch).map(|w| (w[0].epsilon, w[1].epsilon)).collect()
}

pub fn sweep_table(rows: &[SweepRow], hash: String) -> Table {
    let mut t = Table::new(hash, &HEADER);
    for r in rows {
        let d = r.dims;
        t.push(vec![fmt_f64(r.epsilon), fmt_f64(d.dim_reg), fmt_f64(d.top), fmt_f64(d.sup_local), fmt_f64(d.assouad)]);
    }
    t
}
