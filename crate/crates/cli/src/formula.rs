use regdim::sponge::badcarpet_family;

use crate::config::{Model, Plan};
use crate::output::{fmt_f64, Table};

pub const HEADER: [&str; 3] = ["quantity", "value", "note"];

fn row(q: &str, v: f64, note: &str) -> Vec<String> {
    vec![q.into(), fmt_f64(v), note.into()]
}

/// Closed-form values for the configured model.
pub fn formula_table(plan: &Plan, hash: String) -> Table {
    let mut t = Table::new(hash, &HEADER);
    match &plan.model {
        Model::SelfSimilar(s) => match s.dim_reg_formula() {
            Ok(v) => t.push(row("dim_reg", v, "max log p_i / log c_i")),
            Err(e) => t.push(vec!["dim_reg".into(), String::new(), format!("no closed form: {e}")]),
        },
        Model::Sponge(s) => {
            match s.dim_reg_formula() {
                Ok(v) => t.push(row("dim_reg", v, "sum over axes of min conditional exponents")),
                Err(e) => t.push(vec!["dim_reg".into(), String::new(), format!("no closed form: {e}")]),
            }
            if let Some(c) = plan.epsilon.and_then(|e| badcarpet_family(e).ok()) {
                t.push(row("T", c.top, "carpet family"));
                t.push(row("sup_local", c.sup_local, "carpet family"));
                t.push(row("assouad", c.assouad, "carpet family"));
            }
        }
        Model::Sequence(m) => {
            t.push(row("dim_reg", m.dim_reg_formula().as_f64(), &format!("{} points, {} weights", m.points(), m.weights())));
            t.push(row("local_at_zero", m.local_dim_at_zero(), ""));
        }
        Model::Lens(_) => t.push(vec!["dim_reg".into(), String::new(), "no closed form".into()]),
    }
    t
}
