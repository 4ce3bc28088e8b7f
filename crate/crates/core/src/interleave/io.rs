use std::io::{BufRead, Write};

use super::Interleaver;
use crate::error::{Error, Result};

/// Plain-text format: first line N, then N lines holding pi(0), ..., pi(N-1).
pub fn write_interleaver<W: Write>(pi: &Interleaver, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{}", pi.len())?;
    for &y in pi.as_slice() {
        writeln!(out, "{y}")?;
    }
    Ok(())
}

pub fn read_interleaver<R: BufRead>(input: R) -> Result<Interleaver> {
    let mut lines = input.lines().enumerate();
    let parse = |lineno: usize, line: std::io::Result<String>| -> Result<usize> {
        let line = line.map_err(|e| Error::Parse(e.to_string()))?;
        line.trim()
            .parse::<usize>()
            .map_err(|e| Error::Parse(format!("line {}: {e}: {:?}", lineno + 1, line.trim())))
    };
    let (i, first) = lines
        .next()
        .ok_or_else(|| Error::Parse("empty interleaver file".into()))?;
    let n = parse(i, first)?;
    let mut map = Vec::with_capacity(n);
    for (i, line) in lines {
        if map.len() == n {
            let line = line.map_err(|e| Error::Parse(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            return Err(Error::Parse(format!("line {}: trailing data after {n} entries", i + 1)));
        }
        map.push(parse(i, line)?);
    }
    if map.len() != n {
        return Err(Error::Parse(format!("expected {n} entries, found {}", map.len())));
    }
    Interleaver::new(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let pi = Interleaver::new(vec![0, 3, 2, 5, 4, 7, 6, 1]).unwrap();
        let mut buf = Vec::new();
        write_interleaver(&pi, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "8\n0\n3\n2\n5\n4\n7\n6\n1\n");
        assert_eq!(read_interleaver(&buf[..]).unwrap(), pi);
    }

    #[test]
    fn strict_validation() {
        assert!(read_interleaver(&b""[..]).is_err());
        assert!(read_interleaver(&b"3\n0\n1\n"[..]).is_err());
        assert!(read_interleaver(&b"2\n0\n1\n1\n"[..]).is_err());
        assert!(read_interleaver(&b"2\n0\n0\n"[..]).is_err());
        assert!(read_interleaver(&b"2\n0\nx\n"[..]).is_err());
        assert!(read_interleaver(&b"2\n1\n0\n\n"[..]).is_ok());
    }
}
