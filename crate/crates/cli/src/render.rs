//! Text and JSON rendering shared by the subcommands.

use serde_json::{json, Value};

use conevolve::groups::PermGroup;
use conevolve::lp::ImplicationCertificate;
use conevolve::netinfo::{format_relation, Layout};
use conevolve::polyhedra::HRep;
use conevolve::Q;

pub const SCHEMA: u32 = 1;

/// JSON object tagged with the schema version and the command name.
pub fn envelope(command: &str, body: Value) -> String {
    let mut obj = json!({ "schema": SCHEMA, "command": command });
    if let (Some(o), Value::Object(b)) = (obj.as_object_mut(), body) {
        o.extend(b);
    }
    let mut s = serde_json::to_string_pretty(&obj).expect("serializable");
    s.push('\n');
    s
}

pub fn vector(v: &[Q]) -> String {
    v.iter().map(Q::to_string).collect::<Vec<_>>().join(" ")
}

pub fn group_summary(g: &PermGroup) -> Value {
    json!({
        "order": g.order().ok(),
        "generators": g.generators().iter().map(|p| p.cycles()).collect::<Vec<_>>(),
    })
}

pub fn group_text(g: &PermGroup) -> String {
    match g.order() {
        Ok(1) => "trivial group (order 1)\n".to_string(),
        Ok(n) => {
            let gens: Vec<String> = g.generators().iter().map(|p| p.cycles()).collect();
            format!("group of order {n} generated by {}\n", gens.join(", "))
        }
        Err(e) => format!("group too large to enumerate ({e})\n"),
    }
}

/// Name of row `i` of the outer bound, written over named parent coordinates.
fn outer_row(outer: &HRep, layout: &Layout, i: usize, equality: bool) -> String {
    let names: Vec<String> = (0..outer.dim).map(|c| layout.coord_name(c)).collect();
    let normal = if equality { &outer.equalities[i].normal } else { &outer.inequalities[i].normal };
    let terms: Vec<String> = normal
        .iter()
        .zip(&names)
        .filter(|(a, _)| !a.is_zero())
        .map(|(a, n)| {
            let sign = if a.is_negative() { '-' } else { '+' };
            if a.abs().is_one() {
                format!("{sign}{n}")
            } else {
                format!("{sign}{} {n}", a.abs())
            }
        })
        .collect();
    format!("{} {} 0", terms.join(" "), if equality { "=" } else { ">=" })
}

/// One line per multiplier under a heading naming the certified inequality.
pub fn certificate_text(heading: &str, cert: &ImplicationCertificate, outer: &HRep, layout: &Layout) -> String {
    let mut out = format!("{heading}\n");
    for (i, lam) in cert.ineq_support() {
        out.push_str(&format!("  {lam} x [{}]\n", outer_row(outer, layout, i, false)));
    }
    for (i, mu) in cert.eq_support() {
        out.push_str(&format!("  {mu} x [{}]\n", outer_row(outer, layout, i, true)));
    }
    out
}

pub fn certificate_json(line: &str, cert: &ImplicationCertificate) -> Value {
    let pairs = |s: Vec<(usize, Q)>| s.into_iter().map(|(i, q)| json!([i, q])).collect::<Vec<_>>();
    json!({ "inequality": line, "inequality_multipliers": pairs(cert.ineq_support()), "equality_multipliers": pairs(cert.eq_support()) })
}

pub fn relation(names: &[String], normal: &[Q]) -> String {
    format_relation(names, normal, ">=")
}
