//! Line-oriented text formats shared by every file the toolkit reads or writes.
//!
//! * element: prime-field coordinates, little-endian, comma separated (`3,0,1`)
//! * tower: `GF p=<p> degs=<d1>,<d2> mods=<poly1>;<poly2>`, each modulus given
//!   as all of its coefficients (leading one included, constant first), every
//!   coefficient in element format over the level below
//! * matrix: tower line, `<rows> <cols>`, then one line per row of
//!   space-separated elements; vectors are single-row matrices
//! * coset code: `COSET construction=.. n=.. k=.. d=.. alpha=.. q=.. qr=.. m=..`,
//!   the element `ω`, then `H`
//! * storage code: `STORE n=.. k=.. d=.. alpha=.. beta=.. q=..`, then the `n`
//!   node generators
//! * node share: `SHARE node=<i>` then the share vector
//! * eavesdropper view: `VIEW nodes=<i,j,..>` then the observed vector
//!
//! Node indices in files are 1-based.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use itertools::Itertools;

use crate::coset::{Construction, CosetCode, CosetParams};
use crate::error::{Error, Result};
use crate::field::{FElem, FieldTower};
use crate::matrix::FMatrix;
use crate::storage::{StorageCode, StorageCodeSpec};

struct Cursor<'a> {
    lines: Vec<&'a str>,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Cursor<'a> {
        Cursor { lines: text.lines().collect(), pos: 0 }
    }

    fn next(&mut self) -> Result<&'a str> {
        let line = self.lines.get(self.pos).copied().ok_or_else(|| self.err("unexpected end of input"))?;
        self.pos += 1;
        Ok(line)
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse { line: self.pos.max(1), msg: msg.into() }
    }

    fn finish(&self) -> Result<()> {
        match self.lines[self.pos..].iter().position(|l| !l.trim().is_empty()) {
            None => Ok(()),
            Some(off) => Err(Error::Parse { line: self.pos + off + 1, msg: "trailing content".into() }),
        }
    }
}

fn coords_string(x: &FElem, width: usize) -> String {
    x.coords()[..width].iter().join(",")
}

pub fn format_elem(tower: &FieldTower, x: &FElem) -> String {
    coords_string(x, tower.total_degree())
}

fn parse_coords(s: &str, width: usize, p: u64) -> std::result::Result<FElem, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != width {
        return Err(format!("element {s:?} should have {width} coordinates"));
    }
    let mut c = Vec::with_capacity(width);
    for part in parts {
        let v: u64 = part.trim().parse().map_err(|_| format!("bad coordinate {part:?}"))?;
        if v >= p {
            return Err(format!("coordinate {v} is not below p = {p}"));
        }
        c.push(v as u16);
    }
    FElem::from_coords(&c).map_err(|e| e.to_string())
}

pub fn parse_elem(tower: &FieldTower, s: &str) -> Result<FElem> {
    parse_coords(s, tower.total_degree(), tower.p()).map_err(|msg| Error::Parse { line: 1, msg })
}

pub fn tower_header(t: &FieldTower) -> String {
    let degs = t.degrees().iter().join(",");
    let mods = (1..=t.top_level())
        .map(|level| {
            let w = t.width(level - 1);
            t.modulus(level).iter().map(|c| coords_string(c, w)).join(",")
        })
        .join(";");
    format!("GF p={} degs={degs} mods={mods}", t.p())
}

/// Splits `PREFIX key=value key=value` into its values.
fn fields<'a>(line: &'a str, prefix: &str, keys: &[&str]) -> std::result::Result<HashMap<String, &'a str>, String> {
    let mut words = line.split(' ');
    if words.next() != Some(prefix) {
        return Err(format!("expected a {prefix} line"));
    }
    let mut out = HashMap::new();
    for word in words.filter(|w| !w.is_empty()) {
        let (k, v) = word.split_once('=').ok_or_else(|| format!("malformed field {word:?}"))?;
        out.insert(k.to_string(), v);
    }
    for k in keys {
        if !out.contains_key(*k) {
            return Err(format!("missing field {k}"));
        }
    }
    Ok(out)
}

fn num<T: std::str::FromStr>(map: &HashMap<String, &str>, key: &str) -> std::result::Result<T, String> {
    map[key].parse().map_err(|_| format!("bad value for {key}: {:?}", map[key]))
}

fn parse_tower_line(line: &str) -> std::result::Result<FieldTower, String> {
    let f = fields(line, "GF", &["p", "degs", "mods"])?;
    let p: u64 = num(&f, "p")?;
    let degs: Vec<usize> = if f["degs"].is_empty() {
        Vec::new()
    } else {
        f["degs"].split(',').map(|d| d.parse().map_err(|_| format!("bad degree {d:?}"))).try_collect()?
    };
    let mods: Vec<&str> = if f["mods"].is_empty() { Vec::new() } else { f["mods"].split(';').collect() };
    if mods.len() != degs.len() {
        return Err(format!("{} degrees but {} moduli", degs.len(), mods.len()));
    }
    let mut width = 1;
    let mut moduli = Vec::with_capacity(degs.len());
    for (&d, m) in degs.iter().zip(mods) {
        let coords: Vec<&str> = m.split(',').collect();
        if coords.len() != (d + 1) * width {
            return Err(format!("modulus {m:?} should have {} coordinates", (d + 1) * width));
        }
        let poly = coords
            .chunks(width)
            .map(|chunk| parse_coords(&chunk.join(","), width, p))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        moduli.push(poly);
        width *= d;
    }
    FieldTower::from_moduli(p, moduli).map_err(|e| e.to_string())
}

pub fn parse_tower_header(line: &str) -> Result<FieldTower> {
    parse_tower_line(line).map_err(|msg| Error::Parse { line: 1, msg })
}

pub fn write_matrix(m: &FMatrix) -> String {
    let t = m.tower();
    let mut out = String::new();
    writeln!(out, "{}", tower_header(t)).unwrap();
    writeln!(out, "{} {}", m.rows(), m.cols()).unwrap();
    for i in 0..m.rows() {
        writeln!(out, "{}", m.row(i).iter().map(|x| format_elem(t, x)).join(" ")).unwrap();
    }
    out
}

/// Towers already seen in one document, so equal headers share one `Arc`.
#[derive(Default)]
struct TowerCache(HashMap<String, Arc<FieldTower>>);

impl TowerCache {
    fn get(&mut self, cur: &Cursor, line: &str) -> Result<Arc<FieldTower>> {
        if let Some(t) = self.0.get(line) {
            return Ok(Arc::clone(t));
        }
        let t = Arc::new(parse_tower_line(line).map_err(|m| cur.err(m))?);
        self.0.insert(line.to_string(), Arc::clone(&t));
        Ok(t)
    }
}

fn read_matrix(cur: &mut Cursor, cache: &mut TowerCache) -> Result<FMatrix> {
    let header = cur.next()?;
    let tower = cache.get(cur, header)?;
    let dims = cur.next()?;
    let (rows, cols) = dims
        .split_once(' ')
        .and_then(|(r, c)| Some((r.parse::<usize>().ok()?, c.parse::<usize>().ok()?)))
        .ok_or_else(|| cur.err(format!("bad dimensions {dims:?}")))?;
    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows {
        let line = cur.next()?;
        let entries: Vec<&str> = if line.is_empty() { Vec::new() } else { line.split(' ').collect() };
        if entries.len() != cols {
            return Err(cur.err(format!("expected {cols} entries, found {}", entries.len())));
        }
        for e in entries {
            data.push(parse_coords(e, tower.total_degree(), tower.p()).map_err(|m| cur.err(m))?);
        }
    }
    FMatrix::new(tower, rows, cols, data)
}

pub fn parse_matrix(text: &str) -> Result<FMatrix> {
    let mut cur = Cursor::new(text);
    let m = read_matrix(&mut cur, &mut TowerCache::default())?;
    cur.finish()?;
    Ok(m)
}

pub fn write_vector(tower: &Arc<FieldTower>, v: &[FElem]) -> Result<String> {
    Ok(write_matrix(&FMatrix::row_vector(Arc::clone(tower), v)?))
}

fn read_vector(cur: &mut Cursor, cache: &mut TowerCache) -> Result<(Arc<FieldTower>, Vec<FElem>)> {
    let m = read_matrix(cur, cache)?;
    if m.rows() != 1 {
        return Err(cur.err(format!("a vector is a single-row matrix, found {} rows", m.rows())));
    }
    Ok((Arc::clone(m.tower()), m.data().to_vec()))
}

pub fn parse_vector(text: &str) -> Result<(Arc<FieldTower>, Vec<FElem>)> {
    let mut cur = Cursor::new(text);
    let v = read_vector(&mut cur, &mut TowerCache::default())?;
    cur.finish()?;
    Ok(v)
}

pub fn write_coset(code: &CosetCode) -> String {
    let CosetParams { n, k, d, alpha, q, qr, m } = *code.params();
    let mut out = format!(
        "COSET construction={} n={n} k={k} d={d} alpha={alpha} q={q} qr={qr} m={m}\n",
        code.construction()
    );
    writeln!(out, "{}", format_elem(code.tower(), &code.omega())).unwrap();
    out.push_str(&write_matrix(code.h()));
    out
}

pub fn parse_coset(text: &str) -> Result<CosetCode> {
    let mut cur = Cursor::new(text);
    let header = cur.next()?;
    let parsed = (|| {
        let f = fields(header, "COSET", &["construction", "n", "k", "d", "alpha", "q", "qr", "m"])?;
        let construction: Construction = f["construction"].parse()?;
        let params = CosetParams {
            n: num(&f, "n")?,
            k: num(&f, "k")?,
            d: num(&f, "d")?,
            alpha: num(&f, "alpha")?,
            q: num(&f, "q")?,
            qr: num(&f, "qr")?,
            m: num(&f, "m")?,
        };
        Ok::<_, String>((construction, params))
    })();
    let (construction, params) = parsed.map_err(|m| cur.err(m))?;
    let omega_line = cur.next()?;
    let h = read_matrix(&mut cur, &mut TowerCache::default())?;
    let omega = parse_coords(omega_line, h.tower().total_degree(), h.tower().p())
        .map_err(|m| Error::Parse { line: 2, msg: m })?;
    cur.finish()?;
    CosetCode::from_parts(construction, params, omega, h)
}

pub fn write_storage(code: &StorageCode) -> String {
    let StorageCodeSpec { n, k, d, alpha, beta, q } = *code.spec();
    let mut out = format!("STORE n={n} k={k} d={d} alpha={alpha} beta={beta} q={q}\n");
    for g in code.generators() {
        out.push_str(&write_matrix(g));
    }
    out
}

pub fn parse_storage(text: &str) -> Result<StorageCode> {
    let mut cur = Cursor::new(text);
    let header = cur.next()?;
    let spec = (|| {
        let f = fields(header, "STORE", &["n", "k", "d", "alpha", "beta", "q"])?;
        StorageCodeSpec::new(
            num(&f, "n")?,
            num(&f, "k")?,
            num(&f, "d")?,
            num(&f, "alpha")?,
            num(&f, "beta")?,
            num(&f, "q")?,
        )
        .map_err(|e| e.to_string())
    })()
    .map_err(|m| cur.err(m))?;
    let mut cache = TowerCache::default();
    let nodes = (0..spec.n).map(|_| read_matrix(&mut cur, &mut cache)).collect::<Result<Vec<_>>>()?;
    cur.finish()?;
    StorageCode::from_generators(spec, nodes)
}

/// One node's stored symbols; `node` is 0-based here and 1-based on disk.
pub fn write_share(node: usize, tower: &Arc<FieldTower>, share: &[FElem]) -> Result<String> {
    Ok(format!("SHARE node={}\n{}", node + 1, write_vector(tower, share)?))
}

pub fn parse_share(text: &str) -> Result<(usize, Arc<FieldTower>, Vec<FElem>)> {
    let mut cur = Cursor::new(text);
    let header = cur.next()?;
    let node: usize = fields(header, "SHARE", &["node"])
        .and_then(|f| num(&f, "node"))
        .map_err(|m| cur.err(m))?;
    if node == 0 {
        return Err(cur.err("node indices start at 1"));
    }
    let (tower, v) = read_vector(&mut cur, &mut TowerCache::default())?;
    cur.finish()?;
    Ok((node - 1, tower, v))
}

/// What an eavesdropper recorded from `nodes` (0-based here, 1-based on disk).
pub fn write_view(nodes: &[usize], tower: &Arc<FieldTower>, observed: &[FElem]) -> Result<String> {
    let list = nodes.iter().map(|i| i + 1).join(",");
    Ok(format!("VIEW nodes={list}\n{}", write_vector(tower, observed)?))
}

pub fn parse_view(text: &str) -> Result<(Vec<usize>, Arc<FieldTower>, Vec<FElem>)> {
    let mut cur = Cursor::new(text);
    let header = cur.next()?;
    let nodes: Vec<usize> = fields(header, "VIEW", &["nodes"])
        .and_then(|f| {
            if f["nodes"].is_empty() {
                return Ok(Vec::new());
            }
            f["nodes"]
                .split(',')
                .map(|s| match s.parse::<usize>() {
                    Ok(i) if i > 0 => Ok(i - 1),
                    _ => Err(format!("bad node index {s:?}")),
                })
                .collect()
        })
        .map_err(|m| cur.err(m))?;
    let (tower, v) = read_vector(&mut cur, &mut TowerCache::default())?;
    cur.finish()?;
    Ok((nodes, tower, v))
}
