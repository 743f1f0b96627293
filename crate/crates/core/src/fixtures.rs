//! Bundled data for the six worked examples: partitions, problems, code
//! tables and expected values, compiled into the library.

use crate::codec::SystematicEncoding;
use crate::drm::GfcpcProblem;
use crate::error::{Error, Result};
use crate::format::{read_encoding, read_partition, read_problem_file, ProblemFile};
use crate::partition::Partition;
use crate::space::{FieldVector, Space};

macro_rules! files {
    ($dir:literal: $($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../fixtures/", $dir, "/", $name)))),*]
    };
}

pub struct Example {
    pub id: &'static str,
    pub title: &'static str,
    dir: &'static str,
    files: &'static [(&'static str, &'static str)],
}

pub static EXAMPLES: &[Example] = &[
    Example {
        id: "ex1",
        title: "weight and sum mod 3 over GF(3)^3, d = (3, 5)",
        dir: "ex1",
        files: files!("ex1": "expected.txt", "problem.txt", "weight.part", "sum.part", "join.part",
            "table1.enc", "table2.enc", "table3.enc"),
    },
    Example {
        id: "ex2",
        title: "weight and first coordinate over GF(3)^3, d = (3, 5)",
        dir: "ex2",
        files: files!("ex2": "expected.txt", "problem.txt", "join-problem.txt", "weight.part",
            "first.part", "join.part", "table5.enc", "table6.enc"),
    },
    Example {
        id: "ex3",
        title: "three coordinate projections over GF(2)^3, d = (3, 3, 11)",
        dir: "ex3",
        files: files!("ex3": "expected.txt", "problem.txt", "x1.part", "x2.part", "x3.part",
            "table-a.enc", "table-b.enc", "table-c.enc", "table-d.enc", "table-e.enc",
            "table-f.enc", "table-g.enc", "multistep.enc"),
    },
    Example {
        id: "ex4",
        title: "requirement matrix of three partitions of GF(2)^4, d = (3, 5, 7)",
        dir: "ex4",
        files: files!("ex4": "expected.txt", "problem.txt", "p1.part", "p2.part", "p3.part",
            "join12.part", "join13.part", "join23.part", "join123.part", "drm.txt"),
    },
    Example {
        id: "ex5",
        title: "binary triple bound and the two neighbourhood conditions",
        dir: "ex5",
        files: &[
            ("expected.txt", include_str!("../fixtures/ex5/expected.txt")),
            ("problem.txt", include_str!("../fixtures/ex5/problem.txt")),
            ("p1.part", include_str!("../fixtures/ex5/p1.part")),
            ("p2.part", include_str!("../fixtures/ex5/p2.part")),
            ("conditions-a/problem.txt", include_str!("../fixtures/conditions-a/problem.txt")),
            ("conditions-a/p1.part", include_str!("../fixtures/conditions-a/p1.part")),
            ("conditions-a/p2.part", include_str!("../fixtures/conditions-a/p2.part")),
            ("conditions-b/problem.txt", include_str!("../fixtures/conditions-b/problem.txt")),
            ("conditions-b/p1.part", include_str!("../fixtures/conditions-b/p1.part")),
            ("conditions-b/p2.part", include_str!("../fixtures/conditions-b/p2.part")),
            ("conditions-c/problem.txt", include_str!("../fixtures/conditions-c/problem.txt")),
            ("conditions-c/p1.part", include_str!("../fixtures/conditions-c/p1.part")),
            ("conditions-c/p2.part", include_str!("../fixtures/conditions-c/p2.part")),
        ],
    },
    Example {
        id: "ex6",
        title: "finest and first coordinate over GF(3)^2, d = (3, 5)",
        dir: "ex6",
        files: files!("ex6": "expected.txt", "problem.txt", "finest.part", "first.part", "table8.enc"),
    },
];

pub fn example(id: &str) -> Result<&'static Example> {
    EXAMPLES
        .iter()
        .find(|e| e.id == id)
        .ok_or_else(|| Error::Input(format!("unknown example `{id}`")))
}

impl Example {
    pub fn files(&self) -> &'static [(&'static str, &'static str)] {
        self.files
    }

    /// Path of a bundled file relative to the fixtures directory.
    pub fn path(&self, name: &str) -> String {
        match name.split_once('/') {
            Some(_) => name.to_string(),
            None => format!("{}/{name}", self.dir),
        }
    }

    pub fn file(&self, name: &str) -> Result<&'static str> {
        self.files
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, text)| *text)
            .ok_or_else(|| Error::Input(format!("{} has no file `{name}`", self.id)))
    }

    fn context(&self, name: &str, e: Error) -> Error {
        match e {
            Error::Parse { line, message } => Error::Input(format!("{}: line {line}: {message}", self.path(name))),
            other => other,
        }
    }

    pub fn partition(&self, name: &str) -> Result<Partition> {
        read_partition(self.file(name)?).map_err(|e| self.context(name, e))
    }

    pub fn encoding(&self, name: &str) -> Result<SystematicEncoding> {
        read_encoding(self.file(name)?).map_err(|e| self.context(name, e))
    }

    pub fn problem_file(&self, name: &str) -> Result<ProblemFile> {
        read_problem_file(self.file(name)?).map_err(|e| self.context(name, e))
    }

    /// Loads a problem; partition paths resolve next to the problem file.
    pub fn problem(&self, name: &str) -> Result<GfcpcProblem> {
        let prefix = name.rsplit_once('/').map(|(d, _)| format!("{d}/")).unwrap_or_default();
        self.problem_file(name)?
            .load(|path| self.file(&format!("{prefix}{path}")).map(str::to_string))
    }

    pub fn expected(&self) -> Result<Expected> {
        Expected::parse(self.file("expected.txt")?)
    }
}

/// `key value ...` lines of expected values.
#[derive(Clone, Debug)]
pub struct Expected(Vec<(String, Vec<String>)>);

impl Expected {
    pub fn parse(text: &str) -> Result<Self> {
        let mut out = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let mut words = line.split_whitespace();
            match words.next() {
                None => continue,
                Some(w) if w.starts_with('#') => continue,
                Some(key) => {
                    let values: Vec<String> = words.map(str::to_string).collect();
                    if values.is_empty() {
                        return Err(Error::parse(i + 1, format!("`{key}` has no value")));
                    }
                    out.push((key.to_string(), values));
                }
            }
        }
        Ok(Expected(out))
    }

    pub fn get(&self, key: &str) -> Result<&[String]> {
        self.0
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_slice())
            .ok_or_else(|| Error::Input(format!("no expected value `{key}`")))
    }

    pub fn text(&self, key: &str) -> Result<String> {
        Ok(self.get(key)?.join(" "))
    }

    pub fn ints(&self, key: &str) -> Result<Vec<usize>> {
        self.get(key)?
            .iter()
            .map(|w| {
                w.parse()
                    .map_err(|_| Error::Input(format!("expected value `{key}` holds `{w}`")))
            })
            .collect()
    }

    pub fn int(&self, key: &str) -> Result<usize> {
        match self.ints(key)?.as_slice() {
            [x] => Ok(*x),
            _ => Err(Error::Input(format!("expected value `{key}` is not a single integer"))),
        }
    }
}

/// One transcribed matrix entry: demand, binding level, and whether it was
/// marked as a same-block zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MatrixCell {
    pub value: usize,
    pub level: Option<usize>,
    pub marked_zero: bool,
}

/// A transcribed requirement matrix with its message order.
#[derive(Clone, Debug)]
pub struct AnnotatedMatrix {
    pub order: Vec<FieldVector>,
    pub cells: Vec<Vec<MatrixCell>>,
}

/// Reads `order <vec> ...` then one `<vec> <cell> ...` row per message, each
/// cell `value/level`, `0`, or `0!`.
pub fn read_annotated_matrix(text: &str, space: Space) -> Result<AnnotatedMatrix> {
    let mut order = Vec::new();
    let mut cells = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        let words: Vec<&str> = line.split_whitespace().collect();
        if words.is_empty() || words[0].starts_with('#') {
            continue;
        }
        let vec = |t: &str| space.parse_vector(t).map_err(|e| Error::parse(n, e.to_string()));
        if words[0] == "order" {
            order = words[1..].iter().map(|t| vec(t)).collect::<Result<_>>()?;
            continue;
        }
        if vec(words[0])? != *order.get(cells.len()).ok_or_else(|| Error::parse(n, "row outside the order"))? {
            return Err(Error::parse(n, "row label does not follow the order"));
        }
        let row = words[1..]
            .iter()
            .map(|&t| {
                let bad = || Error::parse(n, format!("bad cell `{t}`"));
                Ok(match t {
                    "0" => MatrixCell { value: 0, level: None, marked_zero: false },
                    "0!" => MatrixCell { value: 0, level: None, marked_zero: true },
                    _ => {
                        let (v, h) = t.split_once('/').ok_or_else(bad)?;
                        MatrixCell {
                            value: v.parse().map_err(|_| bad())?,
                            level: Some(h.parse().map_err(|_| bad())?),
                            marked_zero: false,
                        }
                    }
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if row.len() != order.len() {
            return Err(Error::parse(n, format!("row has {} cells, expected {}", row.len(), order.len())));
        }
        cells.push(row);
    }
    if cells.len() != order.len() {
        return Err(Error::Input(format!("matrix has {} rows for {} messages", cells.len(), order.len())));
    }
    Ok(AnnotatedMatrix { order, cells })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_example_loads() {
        for ex in EXAMPLES {
            ex.expected().unwrap();
            for (name, _) in ex.files() {
                if name.ends_with(".part") {
                    ex.partition(name).unwrap();
                } else if name.ends_with(".enc") {
                    ex.encoding(name).unwrap();
                } else if name.ends_with("problem.txt") {
                    ex.problem(name).unwrap();
                }
            }
        }
        assert!(example("ex7").is_err());
    }

    #[test]
    fn annotated_matrix_parses() {
        let ex = example("ex4").unwrap();
        let m = read_annotated_matrix(ex.file("drm.txt").unwrap(), Space::new(2, 4).unwrap()).unwrap();
        assert_eq!(m.cells.len(), 16);
        assert_eq!(m.cells.iter().flatten().filter(|c| c.marked_zero).count(), 6);
    }
}
