//! PRISM-language text export with weights as transition rewards.

use super::Mdp;
use crate::rat;
use std::fmt::Write;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("PRISM export needs integer weights; {state}/{action} has weight {weight}")]
pub struct NonIntegerWeight {
    pub state: String,
    pub action: String,
    pub weight: String,
}

fn ident(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect()
}

pub fn to_prism(mdp: &Mdp) -> Result<String, NonIntegerWeight> {
    for s in 0..mdp.num_states() {
        for a in mdp.actions(s) {
            if !a.weight.is_integer() {
                return Err(NonIntegerWeight {
                    state: mdp.name(s).to_string(),
                    action: a.name.clone(),
                    weight: rat::fmt(&a.weight),
                });
            }
        }
    }
    let n = mdp.num_states();
    let mut out = String::new();
    out.push_str("mdp\n\n");
    for s in 0..n {
        let _ = writeln!(out, "// s={s} {}", mdp.name(s));
    }
    let _ = writeln!(out, "\nmodule m\n  s : [0..{}] init {};", n.saturating_sub(1), mdp.initial());
    for s in 0..n {
        if mdp.is_terminal(s) {
            let _ = writeln!(out, "  [done] s={s} -> (s'={s});");
        }
        for a in mdp.actions(s) {
            let br: Vec<String> = a.branches.iter().map(|(p, t)| format!("{} : (s'={t})", rat::fmt(p))).collect();
            let _ = writeln!(out, "  [{}] s={s} -> {};", ident(&a.name), br.join(" + "));
        }
    }
    out.push_str("endmodule\n\n");
    for (m, set) in mdp.marks() {
        let cond: Vec<String> = set.iter().map(|s| format!("s={s}")).collect();
        let body = if cond.is_empty() { "false".to_string() } else { cond.join(" | ") };
        let _ = writeln!(out, "label \"{}\" = {};", ident(m), body);
    }
    out.push_str("\nrewards \"weight\"\n");
    for s in 0..n {
        for a in mdp.actions(s) {
            if !num_traits::Zero::is_zero(&a.weight) {
                let _ = writeln!(out, "  [{}] s={s} : {};", ident(&a.name), rat::fmt(&a.weight));
            }
        }
    }
    out.push_str("endrewards\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{q, qi};

    #[test]
    fn small_model() {
        let mut m = Mdp::new("a");
        m.add_action("a", "go", qi(-2), &[(q(1, 2), "a"), (q(1, 2), "b")]).unwrap();
        m.mark("goal", "b");
        let t = to_prism(&m).unwrap();
        assert!(t.starts_with("mdp\n"));
        assert!(t.contains("[go] s=0 -> 1/2 : (s'=0) + 1/2 : (s'=1);"));
        assert!(t.contains("label \"goal\" = s=1;"));
        assert!(t.contains("[go] s=0 : -2;"));
    }

    #[test]
    fn refuses_fractions() {
        let mut m = Mdp::new("a");
        m.add_action("a", "go", q(1, 3), &[(qi(1), "a")]).unwrap();
        assert!(to_prism(&m).is_err());
    }
}
