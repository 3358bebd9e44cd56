//! Permutation and coloring files: one line of `n` space-separated
//! integers (ranks, respectively color ids). Blank lines are ignored.

use std::fs;
use std::io::Write;
use std::path::Path;

use acychrom::{Coloring, Error, Permutation, Result};

pub fn permutation_line(pi: &Permutation) -> String {
    line(pi.ranks())
}

pub fn coloring_line(c: &Coloring) -> String {
    line(&c.color)
}

fn line(xs: &[usize]) -> String {
    let mut s = xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    s.push('\n');
    s
}

/// The single non-blank line as integers, checked to hold `n` values.
pub fn parse_line(text: &str, n: usize) -> Result<Vec<usize>> {
    let mut found: Option<(usize, Vec<usize>)> = None;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        if found.is_some() {
            return Err(Error::Parse {
                line: lineno,
                message: "expected a single line of values".into(),
            });
        }
        let values = raw
            .split_whitespace()
            .map(|tok| {
                tok.parse::<usize>().map_err(|_| Error::Parse {
                    line: lineno,
                    message: format!("not a non-negative integer: {tok:?}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        found = Some((lineno, values));
    }
    let (lineno, values) = found.unwrap_or((1, Vec::new()));
    if values.len() != n {
        return Err(Error::Parse {
            line: lineno,
            message: format!("expected {n} values, found {}", values.len()),
        });
    }
    Ok(values)
}

pub fn parse_permutation(text: &str, n: usize) -> Result<Permutation> {
    Permutation::from_ranks(parse_line(text, n)?)
}

pub fn parse_coloring(text: &str, n: usize) -> Result<Vec<usize>> {
    parse_line(text, n)
}

/// Writes through a temporary sibling and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp"));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        let pi = Permutation::from_ranks(vec![2, 0, 1]).unwrap();
        assert_eq!(permutation_line(&pi), "2 0 1\n");
        assert_eq!(parse_permutation("\n2 0 1\n\n", 3).unwrap(), pi);
        let c = Coloring::normalized(vec![0, 1, 0]);
        assert_eq!(parse_coloring(&coloring_line(&c), 3).unwrap(), c.color);
    }

    #[test]
    fn errors_name_lines() {
        assert_eq!(
            parse_line("\n1 x 2\n", 3),
            Err(Error::Parse {
                line: 2,
                message: "not a non-negative integer: \"x\"".into()
            })
        );
        assert!(matches!(parse_line("0 1\n2\n", 2), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_line("0 1", 3), Err(Error::Parse { line: 1, .. })));
        assert!(parse_permutation("0 0 1", 3).is_err());
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = std::env::temp_dir().join(format!("acychrom-art-{}", std::process::id()));
        let p = dir.join("x.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two");
        fs::remove_dir_all(dir).unwrap();
    }
}
