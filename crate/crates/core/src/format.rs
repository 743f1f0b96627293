//! Line-oriented text formats.
//!
//! Every format starts with a `gfcpc-<kind> v1` header. Blank lines and lines
//! starting with `#` are ignored. An empty vector (length-zero parity) is
//! written as `-`. Errors carry the 1-based line number of the offending line.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use crate::codec::SystematicEncoding;
use crate::dcode::DcodeWitness;
use crate::drm::{canonicalize_problem, GfcpcProblem, RequirementMatrix};
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::space::{FieldVector, Space};

struct Line<'a> {
    number: usize,
    words: Vec<&'a str>,
}

impl Line<'_> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::parse(self.number, message)
    }

    fn keyword(&self, expected: &str) -> Result<()> {
        if self.words[0] == expected {
            Ok(())
        } else {
            Err(self.err(format!("expected `{expected}`, found `{}`", self.words[0])))
        }
    }

    /// `<keyword> <int>`
    fn int_field(&self, keyword: &str) -> Result<usize> {
        self.keyword(keyword)?;
        if self.words.len() != 2 {
            return Err(self.err(format!("`{keyword}` takes exactly one integer")));
        }
        self.int(1)
    }

    fn int(&self, i: usize) -> Result<usize> {
        let w = self.word(i)?;
        w.parse()
            .map_err(|_| self.err(format!("`{w}` is not a non-negative integer")))
    }

    fn word(&self, i: usize) -> Result<&str> {
        self.words
            .get(i)
            .copied()
            .ok_or_else(|| self.err("line is too short"))
    }

    fn vector(&self, i: usize, q: usize, len: usize) -> Result<FieldVector> {
        let w = self.word(i)?;
        let text = if w == "-" { "" } else { w };
        let v = FieldVector::parse(text, q).map_err(|e| self.err(strip(e)))?;
        if v.len() != len {
            return Err(self.err(format!(
                "`{w}` has {} symbols, expected {len}",
                v.len()
            )));
        }
        Ok(v)
    }
}

fn strip(e: Error) -> String {
    match e {
        Error::Input(m) | Error::Shape(m) | Error::Domain(m) | Error::Capacity(m) => m,
        other => other.to_string(),
    }
}

struct Reader<'a> {
    lines: std::vec::IntoIter<Line<'a>>,
    last: usize,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str, header: &str) -> Result<Self> {
        let lines: Vec<Line<'a>> = text
            .lines()
            .enumerate()
            .map(|(i, l)| Line {
                number: i + 1,
                words: l.split_whitespace().collect(),
            })
            .filter(|l| !l.words.is_empty() && !l.words[0].starts_with('#'))
            .collect();
        let last = text.lines().count();
        let mut reader = Reader {
            lines: lines.into_iter(),
            last,
        };
        let first = reader.next_line()?;
        if first.words.join(" ") != header {
            return Err(first.err(format!("expected header `{header}`")));
        }
        Ok(reader)
    }

    fn next_line(&mut self) -> Result<Line<'a>> {
        self.lines
            .next()
            .ok_or_else(|| Error::parse(self.last + 1, "unexpected end of file"))
    }

    fn space(&mut self) -> Result<Space> {
        let ql = self.next_line()?;
        let q = ql.int_field("q")?;
        let kl = self.next_line()?;
        let k = kl.int_field("k")?;
        let space = Space::new(q, k).map_err(|e| kl.err(strip(e)))?;
        if q > 10 {
            return Err(ql.err("text formats need q <= 10"));
        }
        space.size().map_err(|e| kl.err(strip(e)))?;
        Ok(space)
    }
}

fn vec_text(v: &FieldVector) -> String {
    if v.is_empty() {
        "-".to_string()
    } else {
        v.to_string()
    }
}

// ---------------------------------------------------------------------------
// partitions

pub const PARTITION_HEADER: &str = "gfcpc-partition v1";

/// Reads `block <name> <vec> ...` records. Every vector of the space must
/// appear exactly once.
pub fn read_partition(text: &str) -> Result<Partition> {
    let mut r = Reader::new(text, PARTITION_HEADER)?;
    let space = r.space()?;
    let mut seen: HashMap<usize, usize> = HashMap::new();
    let mut names = HashSet::new();
    let mut blocks: Vec<Vec<FieldVector>> = Vec::new();
    for line in r.lines.by_ref() {
        line.keyword("block")?;
        let name = line.word(1)?;
        if !names.insert(name.to_string()) {
            return Err(line.err(format!("block name `{name}` repeats")));
        }
        if line.words.len() < 3 {
            return Err(line.err(format!("block `{name}` is empty")));
        }
        let mut members = Vec::new();
        for i in 2..line.words.len() {
            let v = line.vector(i, space.q(), space.k())?;
            if let Some(prev) = seen.insert(space.rank(&v), line.number) {
                return Err(line.err(format!("vector {v} already appeared on line {prev}")));
            }
            members.push(v);
        }
        blocks.push(members);
    }
    for v in space.vectors()? {
        if !seen.contains_key(&space.rank(&v)) {
            return Err(Error::parse(r.last + 1, format!("vector {v} is in no block")));
        }
    }
    Partition::from_blocks(space, &blocks)
}

/// Canonical form: blocks in canonical order named 1, 2, ..., members in
/// lexicographic order.
pub fn write_partition(p: &Partition) -> String {
    let s = p.space();
    let mut out = format!("{PARTITION_HEADER}\nq {}\nk {}\n", s.q(), s.k());
    for b in 0..p.num_blocks() {
        let members: Vec<String> = p.block_members(b).iter().map(vec_text).collect();
        writeln!(out, "block {} {}", b + 1, members.join(" ")).unwrap();
    }
    out
}

// ---------------------------------------------------------------------------
// requirement matrices

pub const DRM_HEADER: &str = "gfcpc-drm v1";

/// Reads a matrix dump. The optional `q` line before `m` fixes the alphabet
/// of the message labels; without it `default_q` is used.
pub fn read_drm(text: &str, default_q: Option<usize>) -> Result<(RequirementMatrix, Option<usize>)> {
    let mut r = Reader::new(text, DRM_HEADER)?;
    let mut line = r.next_line()?;
    let mut q = default_q;
    if line.words[0] == "q" {
        let v = line.int_field("q")?;
        if !(2..=10).contains(&v) {
            return Err(line.err(format!("alphabet size {v} out of range")));
        }
        q = Some(v);
        line = r.next_line()?;
    }
    let m = line.int_field("m")?;
    let mut rows = Vec::with_capacity(m);
    for _ in 0..m {
        let line = r.next_line()?;
        if line.words.len() != m {
            return Err(line.err(format!("matrix row has {} entries, expected {m}", line.words.len())));
        }
        rows.push((0..m).map(|i| line.int(i)).collect::<Result<Vec<_>>>()?);
    }
    let label_q = q.unwrap_or(10);
    let mut messages = Vec::with_capacity(m);
    let mut width = None;
    for i in 0..m {
        let line = r.next_line()?;
        line.keyword("msg")?;
        if line.words.len() != 3 {
            return Err(line.err("expected `msg <i> <vec>`"));
        }
        if line.int(1)? != i + 1 {
            return Err(line.err(format!("expected message index {}", i + 1)));
        }
        let len = *width.get_or_insert(line.word(2)?.len());
        messages.push(line.vector(2, label_q, len)?);
    }
    if let Some(extra) = r.lines.next() {
        return Err(extra.err("unexpected content after the message list"));
    }
    let d = RequirementMatrix::new(messages, rows).map_err(|e| Error::parse(r.last + 1, strip(e)))?;
    Ok((d, q))
}

pub fn write_drm(d: &RequirementMatrix, q: Option<usize>) -> String {
    let mut out = format!("{DRM_HEADER}\n");
    if let Some(q) = q {
        writeln!(out, "q {q}").unwrap();
    }
    writeln!(out, "m {}", d.len()).unwrap();
    for i in 0..d.len() {
        let row: Vec<String> = d.row(i).iter().map(|x| x.to_string()).collect();
        writeln!(out, "{}", row.join(" ")).unwrap();
    }
    for (i, v) in d.messages().iter().enumerate() {
        writeln!(out, "msg {} {}", i + 1, vec_text(v)).unwrap();
    }
    out
}

// ---------------------------------------------------------------------------
// D-codes

pub const DCODE_HEADER: &str = "gfcpc-dcode v1";

pub fn read_dcode(text: &str, q: usize) -> Result<DcodeWitness> {
    let mut r = Reader::new(text, DCODE_HEADER)?;
    let n = r.next_line()?.int_field("n")?;
    let mut parities = Vec::new();
    for line in r.lines.by_ref() {
        line.keyword("parity")?;
        if line.words.len() != 3 {
            return Err(line.err("expected `parity <i> <vec>`"));
        }
        if line.int(1)? != parities.len() + 1 {
            return Err(line.err(format!("expected parity index {}", parities.len() + 1)));
        }
        parities.push(line.vector(2, q, n)?);
    }
    DcodeWitness::new(q, n, parities).map_err(|e| Error::parse(r.last + 1, strip(e)))
}

pub fn write_dcode(w: &DcodeWitness) -> String {
    let mut out = format!("{DCODE_HEADER}\nn {}\n", w.length());
    for (i, p) in w.parities().iter().enumerate() {
        writeln!(out, "parity {} {}", i + 1, vec_text(p)).unwrap();
    }
    out
}

// ---------------------------------------------------------------------------
// encodings

pub const ENCODING_HEADER: &str = "gfcpc-encoding v1";

/// Reads `row <message> <parity>` lines, which must list every message in
/// lexicographic order.
pub fn read_encoding(text: &str) -> Result<SystematicEncoding> {
    let mut r = Reader::new(text, ENCODING_HEADER)?;
    let space = r.space()?;
    let rl = r.next_line()?;
    let red = rl.int_field("r")?;
    let size = space.size()?;
    let mut parities = Vec::with_capacity(size);
    for line in r.lines.by_ref() {
        line.keyword("row")?;
        if line.words.len() != 3 {
            return Err(line.err("expected `row <message> <parity>`"));
        }
        let u = line.vector(1, space.q(), space.k())?;
        let expected = parities.len();
        let got = space.rank(&u);
        if got != expected {
            if expected == size || got < expected {
                return Err(line.err(format!("row for {u} is out of lexicographic order or repeated")));
            }
            return Err(Error::Input(format!(
                "encoding has no row for message {}",
                space.unrank(expected)
            )));
        }
        let p = line.vector(2, space.q(), red).map_err(|e| match e {
            Error::Parse { line, message } => Error::Parse {
                line,
                message: format!("{message} (r = {red})"),
            },
            other => other,
        })?;
        parities.push(p);
    }
    if parities.len() < size {
        return Err(Error::Input(format!(
            "encoding has no row for message {}",
            space.unrank(parities.len())
        )));
    }
    SystematicEncoding::new(space, red, parities)
}

pub fn write_encoding(enc: &SystematicEncoding) -> String {
    let s = enc.space();
    let mut out = format!("{ENCODING_HEADER}\nq {}\nk {}\nr {}\n", s.q(), s.k(), enc.r());
    for (i, p) in enc.parities().iter().enumerate() {
        writeln!(out, "row {} {}", s.unrank(i), vec_text(p)).unwrap();
    }
    out
}

// ---------------------------------------------------------------------------
// problems

pub const PROBLEM_HEADER: &str = "gfcpc-problem v1";

/// A problem description: partition files with their distances, in the
/// caller's order, plus an optional message subset.
///
/// ```text
/// gfcpc-problem v1
/// q 3
/// k 3
/// partition weight.part 3
/// partition first.part 5
/// messages 000 100 200 010
/// ```
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemFile {
    pub space: Space,
    pub partitions: Vec<(String, usize)>,
    pub messages: Option<Vec<FieldVector>>,
}

pub fn read_problem_file(text: &str) -> Result<ProblemFile> {
    let mut r = Reader::new(text, PROBLEM_HEADER)?;
    let space = r.space()?;
    let mut partitions = Vec::new();
    let mut messages: Option<Vec<FieldVector>> = None;
    for line in r.lines.by_ref() {
        match line.words[0] {
            "partition" => {
                if line.words.len() != 3 {
                    return Err(line.err("expected `partition <path> <distance>`"));
                }
                let d = line.int(2)?;
                if d == 0 {
                    return Err(line.err("distances must be positive"));
                }
                partitions.push((line.words[1].to_string(), d));
            }
            "messages" => {
                let list = messages.get_or_insert_with(Vec::new);
                for i in 1..line.words.len() {
                    list.push(line.vector(i, space.q(), space.k())?);
                }
            }
            other => return Err(line.err(format!("unknown record `{other}`"))),
        }
    }
    if partitions.is_empty() {
        return Err(Error::parse(r.last + 1, "a problem needs at least one partition"));
    }
    Ok(ProblemFile {
        space,
        partitions,
        messages,
    })
}

pub fn write_problem_file(p: &ProblemFile) -> String {
    let mut out = format!("{PROBLEM_HEADER}\nq {}\nk {}\n", p.space.q(), p.space.k());
    for (path, d) in &p.partitions {
        writeln!(out, "partition {path} {d}").unwrap();
    }
    if let Some(ms) = &p.messages {
        let v: Vec<String> = ms.iter().map(vec_text).collect();
        writeln!(out, "messages {}", v.join(" ")).unwrap();
    }
    out
}

impl ProblemFile {
    /// Loads each partition through `fetch` (path to file contents) and
    /// builds the canonical problem.
    pub fn load<F>(&self, mut fetch: F) -> Result<GfcpcProblem>
    where
        F: FnMut(&str) -> Result<String>,
    {
        let mut parts = Vec::with_capacity(self.partitions.len());
        for (path, _) in &self.partitions {
            let p = read_partition(&fetch(path)?).map_err(|e| match e {
                Error::Parse { line, message } => Error::Input(format!("{path}: line {line}: {message}")),
                other => other,
            })?;
            if p.space() != self.space {
                return Err(Error::Shape(format!(
                    "{path} partitions {}, the problem is over {}",
                    p.space(),
                    self.space
                )));
            }
            parts.push(p);
        }
        canonicalize_problem(parts, self.partitions.iter().map(|p| p.1).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_of(e: Error) -> usize {
        match e {
            Error::Parse { line, .. } => line,
            other => panic!("expected a parse error, got {other}"),
        }
    }

    const HALVES: &str = "gfcpc-partition v1\nq 2\nk 2\nblock 1 00 01\nblock 2 10 11\n";

    #[test]
    fn partition_round_trip_is_canonical() {
        let p = read_partition(HALVES).unwrap();
        assert_eq!(write_partition(&p), HALVES);
        let shuffled = "gfcpc-partition v1\n# comment\nq 2\nk 2\n\nblock hi 11 10\nblock lo 01 00\n";
        assert_eq!(write_partition(&read_partition(shuffled).unwrap()), HALVES);
    }

    #[test]
    fn partition_diagnostics_name_the_line() {
        let dup = "gfcpc-partition v1\nq 2\nk 2\nblock a 00 01\nblock b 10 01 11\n";
        assert_eq!(line_of(read_partition(dup).unwrap_err()), 5);
        let digit = "gfcpc-partition v1\nq 2\nk 2\nblock a 00 02\nblock b 10 11\n";
        assert_eq!(line_of(read_partition(digit).unwrap_err()), 4);
        let missing = "gfcpc-partition v1\nq 2\nk 2\nblock a 00 01\nblock b 10\n";
        let e = read_partition(missing).unwrap_err();
        assert!(e.to_string().contains("11"), "{e}");
        assert_eq!(line_of(e), 6);
        let header = "gfcpc-partition v2\nq 2\nk 2\n";
        assert_eq!(line_of(read_partition(header).unwrap_err()), 1);
        let short = "gfcpc-partition v1\nq 2\nk 2\nblock a 00 0\nblock b 10 11 01\n";
        assert_eq!(line_of(read_partition(short).unwrap_err()), 4);
    }

    #[test]
    fn drm_round_trip() {
        let s = Space::new(3, 1).unwrap();
        let msgs = s.vectors().unwrap();
        let d = RequirementMatrix::new(msgs, vec![vec![0, 2, 1], vec![2, 0, 3], vec![1, 3, 0]]).unwrap();
        let text = write_drm(&d, Some(3));
        let (back, q) = read_drm(&text, None).unwrap();
        assert_eq!((back, q), (d, Some(3)));
        let bad = "gfcpc-drm v1\nm 2\n0 1\n2 0\nmsg 1 0\nmsg 2 1\n";
        assert!(read_drm(bad, Some(2)).is_err());
    }

    #[test]
    fn dcode_round_trip_with_empty_parities() {
        let w = DcodeWitness::new(2, 0, vec![FieldVector::zero(2, 0); 2]).unwrap();
        let text = write_dcode(&w);
        assert_eq!(text, "gfcpc-dcode v1\nn 0\nparity 1 -\nparity 2 -\n");
        assert_eq!(read_dcode(&text, 2).unwrap(), w);
    }

    #[test]
    fn encoding_round_trip_and_errors() {
        let s = Space::new(2, 2).unwrap();
        let enc = SystematicEncoding::new(
            s,
            2,
            ["00", "11", "10", "01"].iter().map(|t| FieldVector::parse(t, 2).unwrap()).collect(),
        )
        .unwrap();
        let text = write_encoding(&enc);
        assert_eq!(read_encoding(&text).unwrap(), enc);
        let empty = SystematicEncoding::empty(s).unwrap();
        assert_eq!(read_encoding(&write_encoding(&empty)).unwrap(), empty);

        let missing = text.replace("row 10 10\n", "");
        match read_encoding(&missing) {
            Err(Error::Input(m)) => assert!(m.contains("10"), "{m}"),
            other => panic!("{other:?}"),
        }
        let truncated = text.replace("row 11 01\n", "");
        assert!(matches!(read_encoding(&truncated), Err(Error::Input(_))));
        let wrong_r = text.replace("row 01 11", "row 01 110");
        assert_eq!(line_of(read_encoding(&wrong_r).unwrap_err()), 6);
    }

    #[test]
    fn problem_file_round_trip() {
        let text = "gfcpc-problem v1\nq 2\nk 2\npartition a.part 5\npartition b.part 3\nmessages 00 11\n";
        let pf = read_problem_file(text).unwrap();
        assert_eq!(write_problem_file(&pf), text);
        let prob = pf
            .load(|path| {
                Ok(match path {
                    "a.part" => HALVES.to_string(),
                    _ => write_partition(&Partition::finest(Space::new(2, 2).unwrap()).unwrap()),
                })
            })
            .unwrap();
        assert_eq!(prob.distances(), [3, 5]);
        assert_eq!(prob.original_order(), [1, 0]);
        assert!(read_problem_file("gfcpc-problem v1\nq 2\nk 2\n").is_err());
        assert!(read_problem_file("gfcpc-problem v1\nq 2\nk 2\npartition a 0\n").is_err());
    }
}
