//! Deterministic JSON result dumps.
//!
//! Every number is printed with 17 significant digits so dumps are byte
//! stable across runs and round-trip the underlying doubles exactly.  Keys
//! keep insertion order; nothing here depends on hashing.

use std::fmt::Write;

use hypervol::geom::{Circle, ProjPoint};

pub enum Val {
    Null,
    Uint(usize),
    Float(f64),
    Str(String),
    Arr(Vec<Val>),
    Obj(Vec<(&'static str, Val)>),
}

impl Val {
    pub fn floats<I: IntoIterator<Item = f64>>(it: I) -> Val {
        Val::Arr(it.into_iter().map(Val::Float).collect())
    }

    pub fn uints<I: IntoIterator<Item = usize>>(it: I) -> Val {
        Val::Arr(it.into_iter().map(Val::Uint).collect())
    }

    /// Finite point as [re, im], the point at infinity as the string "inf".
    pub fn point(p: &ProjPoint) -> Val {
        match p.to_z() {
            Some(z) => Val::floats([z.re, z.im]),
            None => Val::Str("inf".into()),
        }
    }

    /// Inversive coordinates [a, re b, im b, d] of a circle form.
    pub fn circle(c: &Circle) -> Val {
        Val::floats([c.a, c.b.re, c.b.im, c.d])
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        self.write(&mut s, 0);
        s.push('\n');
        s
    }

    fn write(&self, s: &mut String, indent: usize) {
        match self {
            Val::Null => s.push_str("null"),
            Val::Uint(v) => {
                let _ = write!(s, "{v}");
            }
            Val::Float(v) => {
                let _ = write!(s, "{v:.16e}");
            }
            Val::Str(v) => {
                s.push('"');
                for ch in v.chars() {
                    match ch {
                        '"' => s.push_str("\\\""),
                        '\\' => s.push_str("\\\\"),
                        '\n' => s.push_str("\\n"),
                        c if (c as u32) < 0x20 => {
                            let _ = write!(s, "\\u{:04x}", c as u32);
                        }
                        c => s.push(c),
                    }
                }
                s.push('"');
            }
            Val::Arr(items) => {
                if items.is_empty() {
                    s.push_str("[]");
                    return;
                }
                // Scalar-only arrays stay on one line.
                let flat = items
                    .iter()
                    .all(|v| !matches!(v, Val::Arr(_) | Val::Obj(_)));
                if flat {
                    s.push('[');
                    for (i, v) in items.iter().enumerate() {
                        if i > 0 {
                            s.push_str(", ");
                        }
                        v.write(s, indent);
                    }
                    s.push(']');
                } else {
                    s.push_str("[\n");
                    for (i, v) in items.iter().enumerate() {
                        pad(s, indent + 1);
                        v.write(s, indent + 1);
                        if i + 1 < items.len() {
                            s.push(',');
                        }
                        s.push('\n');
                    }
                    pad(s, indent);
                    s.push(']');
                }
            }
            Val::Obj(fields) => {
                if fields.is_empty() {
                    s.push_str("{}");
                    return;
                }
                s.push_str("{\n");
                for (i, (k, v)) in fields.iter().enumerate() {
                    pad(s, indent + 1);
                    let _ = write!(s, "\"{k}\": ");
                    v.write(s, indent + 1);
                    if i + 1 < fields.len() {
                        s.push(',');
                    }
                    s.push('\n');
                }
                pad(s, indent);
                s.push('}');
            }
        }
    }
}

fn pad(s: &mut String, indent: usize) {
    for _ in 0..indent {
        s.push_str("  ");
    }
}
