//! Line-oriented framework text format:
//!
//! ```text
//! # comment
//! arg a
//! arg b
//! att a b
//! sup b a
//! ```

use super::{ArgError, Argument, DungFramework};

pub fn parse_af(text: &str) -> Result<DungFramework, ArgError> {
    let mut args = Vec::new();
    let mut attacks = Vec::new();
    let mut supports = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let err = |msg: &str| ArgError::Parse {
            line: line_no,
            msg: msg.to_string(),
        };
        match toks.as_slice() {
            ["arg", id] => args.push((line_no, *id)),
            ["att", a, b] => attacks.push((line_no, *a, *b)),
            ["sup", a, b] => supports.push((line_no, *a, *b)),
            ["arg", ..] => return Err(err("expected `arg <id>`")),
            ["att", ..] | ["sup", ..] => return Err(err("expected two argument ids")),
            [other, ..] => return Err(err(&format!("unknown directive `{other}`"))),
            [] => unreachable!(),
        }
    }

    let mut seen = std::collections::BTreeSet::new();
    for (line, id) in &args {
        if !seen.insert(*id) {
            return Err(ArgError::Parse {
                line: *line,
                msg: format!("duplicate argument `{id}`"),
            });
        }
    }
    let mut g = DungFramework::new(args.iter().map(|(_, id)| Argument::bare(*id)))?;
    let with_line = |line: usize| {
        move |e: ArgError| ArgError::Parse {
            line,
            msg: e.to_string(),
        }
    };
    for (line, a, b) in attacks {
        g.add_attack(a, b).map_err(with_line(line))?;
    }
    for (line, a, b) in supports {
        g.add_support(a, b).map_err(with_line(line))?;
    }
    Ok(g)
}

/// Canonical text form: arguments, attacks, then supports, each sorted.
pub fn to_af_text(g: &DungFramework) -> String {
    let mut out = String::new();
    for a in g.arguments() {
        out.push_str(&format!("arg {}\n", a.id));
    }
    for (a, b) in g.attacks() {
        out.push_str(&format!("att {a} {b}\n"));
    }
    for (a, b) in g.supports() {
        out.push_str(&format!("sup {a} {b}\n"));
    }
    out
}
