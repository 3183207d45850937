//! Line-based text formats for triangulations and surface graphs.
//!
//! See FORMATS.md at the repository root for the grammar.  Parsing is purely
//! structural: it checks token shapes, index ranges against the header, full
//! face coverage, and that the gluing table is involutive.  Whether the data
//! describes a sensible complex is the library's call, not the parser's.

use std::collections::BTreeMap;
use std::fmt;

use hypervol::angles::AngleTarget;
use hypervol::cell::Cellulation;
use hypervol::complex::{FaceGluing, GluingData, IdealComplex, Perm};

/// Position-carrying parse failure.  Line and column are 1-based.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.col, self.msg)
    }
}

impl std::error::Error for ParseError {}

type PResult<T> = std::result::Result<T, ParseError>;

/// Angle prescription attached to a triangulation file.
#[derive(Debug, Clone, PartialEq)]
pub enum TargetSpec {
    /// One dihedral angle for every boundary class; interior classes get 2 pi.
    UniformBoundary(f64),
    /// Per-class boundary dihedral angles; interior classes get 2 pi.
    Boundary(Vec<(usize, f64)>),
    /// Explicit totals per edge class, interior ones included.
    Totals(Vec<(usize, f64)>),
}

/// Parsed triangulation file.
#[derive(Debug, Clone, PartialEq)]
pub struct TriFile {
    pub gluing: GluingData,
    pub target: Option<TargetSpec>,
    /// Edge-class circuits the file declares contractible.
    pub circuits: Vec<Vec<usize>>,
}

impl TriFile {
    /// Turn the file's target section into totals for a built complex.
    pub fn resolve_target(&self, cx: &IdealComplex) -> hypervol::Result<Option<AngleTarget>> {
        let spec = match &self.target {
            None => return Ok(None),
            Some(s) => s,
        };
        let target = match spec {
            TargetSpec::UniformBoundary(x) => AngleTarget::uniform_boundary(cx, *x),
            TargetSpec::Boundary(pairs) => {
                let map: BTreeMap<usize, f64> = pairs.iter().copied().collect();
                AngleTarget::with_boundary(cx, &map)?
            }
            TargetSpec::Totals(pairs) => {
                let e = cx.edge_classes.len();
                let mut totals = vec![f64::NAN; e];
                for &(id, v) in pairs {
                    if id >= e {
                        return Err(hypervol::Error::Mismatch(format!(
                            "target names edge class {id}, complex has {e}"
                        )));
                    }
                    totals[id] = v;
                }
                if let Some(id) = totals.iter().position(|v| v.is_nan()) {
                    return Err(hypervol::Error::Mismatch(format!(
                        "no total given for edge class {id}"
                    )));
                }
                AngleTarget::from_totals(totals)
            }
        };
        Ok(Some(target))
    }
}

/// Parsed surface graph file.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphFile {
    pub cell: Cellulation,
}

/// Whitespace tokenizer that remembers byte columns for error reports.
struct Line<'a> {
    no: usize,
    toks: std::vec::IntoIter<(usize, &'a str)>,
    /// Column just past the last token, for "expected more" errors.
    end_col: usize,
}

impl<'a> Line<'a> {
    fn new(no: usize, text: &'a str) -> Self {
        let toks: Vec<(usize, &'a str)> = text
            .split_whitespace()
            .map(|t| {
                let col = t.as_ptr() as usize - text.as_ptr() as usize;
                (col + 1, t)
            })
            .collect();
        let end_col = text.trim_end().len() + 1;
        Self {
            no,
            toks: toks.into_iter(),
            end_col,
        }
    }

    fn err<T>(&self, col: usize, msg: impl Into<String>) -> PResult<T> {
        Err(ParseError {
            line: self.no,
            col,
            msg: msg.into(),
        })
    }

    fn next(&mut self, what: &str) -> PResult<(usize, &'a str)> {
        match self.toks.next() {
            Some(t) => Ok(t),
            None => self.err(self.end_col, format!("expected {what}")),
        }
    }

    fn usize(&mut self, what: &str) -> PResult<(usize, usize)> {
        let (col, tok) = self.next(what)?;
        match tok.parse() {
            Ok(v) => Ok((col, v)),
            Err(_) => self.err(col, format!("expected {what}, found '{tok}'")),
        }
    }

    fn f64(&mut self, what: &str) -> PResult<(usize, f64)> {
        let (col, tok) = self.next(what)?;
        match tok.parse() {
            Ok(v) => Ok((col, v)),
            Err(_) => self.err(col, format!("expected {what}, found '{tok}'")),
        }
    }

    fn keyword(&mut self, kw: &str) -> PResult<usize> {
        let (col, tok) = self.next(&format!("'{kw}'"))?;
        if tok != kw {
            return self.err(col, format!("expected '{kw}', found '{tok}'"));
        }
        Ok(col)
    }

    fn done(&mut self) -> PResult<()> {
        if let Some((col, tok)) = self.toks.next() {
            return self.err(col, format!("unexpected trailing token '{tok}'"));
        }
        Ok(())
    }
}

/// Content lines of a source: comments stripped, blanks skipped.
fn lines(src: &str) -> impl Iterator<Item = (usize, &str)> {
    src.lines().enumerate().filter_map(|(i, raw)| {
        let text = raw.split('#').next().unwrap_or("");
        if text.trim().is_empty() {
            None
        } else {
            Some((i + 1, text))
        }
    })
}

pub fn parse_tri(src: &str) -> PResult<TriFile> {
    let mut it = lines(src);

    let (no, text) = match it.next() {
        Some(l) => l,
        None => {
            return Err(ParseError {
                line: 1,
                col: 1,
                msg: "empty file; expected 'tri 1' header".into(),
            })
        }
    };
    let mut l = Line::new(no, text);
    l.keyword("tri")?;
    let (vcol, ver) = l.usize("format version")?;
    if ver != 1 {
        return l.err(vcol, format!("unsupported format version {ver}"));
    }
    l.done()?;

    let (no, text) = match it.next() {
        Some(l) => l,
        None => {
            return Err(ParseError {
                line: no + 1,
                col: 1,
                msg: "expected 'tets N' line".into(),
            })
        }
    };
    let mut l = Line::new(no, text);
    l.keyword("tets")?;
    let (ncol, num_tets) = l.usize("tetrahedron count")?;
    if num_tets == 0 {
        return l.err(ncol, "tetrahedron count must be positive");
    }
    l.done()?;

    // Raw face entries; checked for coverage and involution afterwards.
    let mut entries: Vec<[Option<(usize, FaceGluing)>; 4]> = vec![[None; 4]; num_tets];
    let mut target: Option<TargetSpec> = None;
    let mut circuits: Vec<Vec<usize>> = Vec::new();

    for (no, text) in it {
        let mut l = Line::new(no, text);
        let (col, head) = l.next("directive")?;
        match head {
            "face" => {
                let (tcol, t) = l.usize("tet index")?;
                if t >= num_tets {
                    return l.err(tcol, format!("tet index {t} out of range 0..{num_tets}"));
                }
                let (fcol, f) = l.usize("face index")?;
                if f >= 4 {
                    return l.err(fcol, format!("face index {f} out of range 0..4"));
                }
                let (pcol, peek) = l.next("'boundary' or '->'")?;
                let fg = match peek {
                    "boundary" => FaceGluing::Boundary,
                    "->" => {
                        let (t2col, t2) = l.usize("target tet index")?;
                        if t2 >= num_tets {
                            return l
                                .err(t2col, format!("tet index {t2} out of range 0..{num_tets}"));
                        }
                        let (f2col, f2) = l.usize("target face index")?;
                        if f2 >= 4 {
                            return l.err(f2col, format!("face index {f2} out of range 0..4"));
                        }
                        l.keyword("perm")?;
                        let mut map = [0usize; 4];
                        let mut p0col = 0;
                        for (k, slot) in map.iter_mut().enumerate() {
                            let (c, v) = l.usize("permutation image")?;
                            if k == 0 {
                                p0col = c;
                            }
                            *slot = v;
                        }
                        let perm = match Perm::new(map) {
                            Ok(p) => p,
                            Err(e) => return l.err(p0col, e.to_string()),
                        };
                        if perm.apply(f) != f2 {
                            return l.err(
                                f2col,
                                format!(
                                    "permutation sends face {f} to {}, line says {f2}",
                                    perm.apply(f)
                                ),
                            );
                        }
                        FaceGluing::Glued { tet: t2, face: f2, perm }
                    }
                    other => {
                        return l.err(pcol, format!("expected 'boundary' or '->', found '{other}'"))
                    }
                };
                l.done()?;
                if entries[t][f].is_some() {
                    return l.err(tcol, format!("duplicate line for tet {t} face {f}"));
                }
                entries[t][f] = Some((no, fg));
            }
            "target" => {
                let (kcol, kind) = l.next("target kind")?;
                match kind {
                    "uniform-boundary" => {
                        let (_, x) = l.f64("dihedral angle")?;
                        l.done()?;
                        match target {
                            None => target = Some(TargetSpec::UniformBoundary(x)),
                            Some(_) => {
                                return l.err(kcol, "conflicting target directives".to_string())
                            }
                        }
                    }
                    "boundary" => {
                        let (ccol, id) = l.usize("edge class id")?;
                        let (_, x) = l.f64("dihedral angle")?;
                        l.done()?;
                        match &mut target {
                            None => target = Some(TargetSpec::Boundary(vec![(id, x)])),
                            Some(TargetSpec::Boundary(pairs)) => {
                                if pairs.iter().any(|&(j, _)| j == id) {
                                    return l
                                        .err(ccol, format!("duplicate target for edge class {id}"));
                                }
                                pairs.push((id, x));
                            }
                            Some(_) => {
                                return l.err(kcol, "conflicting target directives".to_string())
                            }
                        }
                    }
                    "total" => {
                        let (ccol, id) = l.usize("edge class id")?;
                        let (_, x) = l.f64("angle total")?;
                        l.done()?;
                        match &mut target {
                            None => target = Some(TargetSpec::Totals(vec![(id, x)])),
                            Some(TargetSpec::Totals(pairs)) => {
                                if pairs.iter().any(|&(j, _)| j == id) {
                                    return l
                                        .err(ccol, format!("duplicate target for edge class {id}"));
                                }
                                pairs.push((id, x));
                            }
                            Some(_) => {
                                return l.err(kcol, "conflicting target directives".to_string())
                            }
                        }
                    }
                    other => {
                        return l.err(
                            kcol,
                            format!(
                                "expected 'uniform-boundary', 'boundary' or 'total', found '{other}'"
                            ),
                        )
                    }
                }
            }
            "circuit" => {
                let mut ids = Vec::new();
                let (_, first) = l.usize("edge class id")?;
                ids.push(first);
                while let Some((col, tok)) = l.toks.next() {
                    match tok.parse() {
                        Ok(v) => ids.push(v),
                        Err(_) => {
                            return l.err(col, format!("expected edge class id, found '{tok}'"))
                        }
                    }
                }
                circuits.push(ids);
            }
            other => return l.err(col, format!("unknown directive '{other}'")),
        }
    }

    // Coverage, then involution.  An involution failure names the offending
    // tet and face so the complaint can be matched to the file.
    let mut faces = vec![[FaceGluing::Boundary; 4]; num_tets];
    for t in 0..num_tets {
        for f in 0..4 {
            match entries[t][f] {
                Some((_, fg)) => faces[t][f] = fg,
                None => {
                    return Err(ParseError {
                        line: 1,
                        col: 1,
                        msg: format!("missing face line for tet {t} face {f}"),
                    })
                }
            }
        }
    }
    for t in 0..num_tets {
        for f in 0..4 {
            if let FaceGluing::Glued { tet: t2, face: f2, perm } = faces[t][f] {
                let (line, _) = entries[t][f].unwrap();
                let back = faces[t2][f2];
                let expect = FaceGluing::Glued { tet: t, face: f, perm: perm.inverse() };
                if back != expect {
                    return Err(ParseError {
                        line,
                        col: 1,
                        msg: format!(
                            "gluing of tet {t} face {f} is not involutive: \
                             tet {t2} face {f2} does not glue back with the inverse permutation"
                        ),
                    });
                }
            }
        }
    }

    // Deterministic order inside target sections.
    match &mut target {
        Some(TargetSpec::Boundary(pairs)) | Some(TargetSpec::Totals(pairs)) => {
            pairs.sort_by_key(|&(id, _)| id)
        }
        _ => {}
    }

    Ok(TriFile {
        gluing: GluingData { num_tets, faces },
        target,
        circuits,
    })
}

/// Exact decimal form: 17 significant digits round-trip every finite f64.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn serialize_tri(t: &TriFile) -> String {
    let mut s = String::new();
    s.push_str("tri 1\n");
    s.push_str(&format!("tets {}\n", t.gluing.num_tets));
    for (tet, faces) in t.gluing.faces.iter().enumerate() {
        for (f, fg) in faces.iter().enumerate() {
            match fg {
                FaceGluing::Boundary => s.push_str(&format!("face {tet} {f} boundary\n")),
                FaceGluing::Glued { tet: t2, face: f2, perm } => {
                    let p = perm.as_array();
                    s.push_str(&format!(
                        "face {tet} {f} -> {t2} {f2} perm {} {} {} {}\n",
                        p[0], p[1], p[2], p[3]
                    ));
                }
            }
        }
    }
    match &t.target {
        None => {}
        Some(TargetSpec::UniformBoundary(x)) => {
            s.push_str(&format!("target uniform-boundary {}\n", float(*x)));
        }
        Some(TargetSpec::Boundary(pairs)) => {
            for &(id, x) in pairs {
                s.push_str(&format!("target boundary {id} {}\n", float(x)));
            }
        }
        Some(TargetSpec::Totals(pairs)) => {
            for &(id, x) in pairs {
                s.push_str(&format!("target total {id} {}\n", float(x)));
            }
        }
    }
    for c in &t.circuits {
        s.push_str("circuit");
        for id in c {
            s.push_str(&format!(" {id}"));
        }
        s.push('\n');
    }
    s
}

pub fn parse_graph(src: &str) -> PResult<GraphFile> {
    let mut it = lines(src);

    let (no, text) = match it.next() {
        Some(l) => l,
        None => {
            return Err(ParseError {
                line: 1,
                col: 1,
                msg: "empty file; expected 'graph 1' header".into(),
            })
        }
    };
    let mut l = Line::new(no, text);
    l.keyword("graph")?;
    let (vcol, ver) = l.usize("format version")?;
    if ver != 1 {
        return l.err(vcol, format!("unsupported format version {ver}"));
    }
    l.done()?;

    let (no, text) = match it.next() {
        Some(l) => l,
        None => {
            return Err(ParseError {
                line: no + 1,
                col: 1,
                msg: "expected 'vertices N' line".into(),
            })
        }
    };
    let mut l = Line::new(no, text);
    l.keyword("vertices")?;
    let (ncol, num_vertices) = l.usize("vertex count")?;
    if num_vertices == 0 {
        return l.err(ncol, "vertex count must be positive");
    }
    l.done()?;

    let mut faces = Vec::new();
    for (no, text) in it {
        let mut l = Line::new(no, text);
        let (col, head) = l.next("directive")?;
        if head != "face" {
            return l.err(col, format!("unknown directive '{head}'"));
        }
        let mut ids = Vec::new();
        while let Some((col, tok)) = l.toks.next() {
            let v: usize = match tok.parse() {
                Ok(v) => v,
                Err(_) => return l.err(col, format!("expected vertex id, found '{tok}'")),
            };
            if v >= num_vertices {
                return l.err(col, format!("vertex id {v} out of range 0..{num_vertices}"));
            }
            if ids.contains(&v) {
                return l.err(col, format!("vertex {v} repeated within a face"));
            }
            ids.push(v);
        }
        if ids.len() < 3 {
            return l.err(l.end_col, "face needs at least three vertices");
        }
        faces.push(ids);
    }
    if faces.is_empty() {
        return Err(ParseError {
            line: no,
            col: 1,
            msg: "graph file lists no faces".into(),
        });
    }

    Ok(GraphFile {
        cell: Cellulation { num_vertices, faces },
    })
}

pub fn serialize_graph(g: &GraphFile) -> String {
    let mut s = String::new();
    s.push_str("graph 1\n");
    s.push_str(&format!("vertices {}\n", g.cell.num_vertices));
    for face in &g.cell.faces {
        s.push_str("face");
        for v in face {
            s.push_str(&format!(" {v}"));
        }
        s.push('\n');
    }
    s
}
